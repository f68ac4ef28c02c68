//! Synthetic attack generation for six scenario kinds, with ground-truth
//! labels. Used to evaluate the pipeline and to build reference signatures.
//!
//! All randomness flows from the explicit seed through one ChaCha stream per
//! cluster, so a parameter set is a complete, reproducible description of
//! the generated attack. IPs are sampled collision-free from the full IPv4
//! space (minus 0.0.0.0 and 255.255.255.255); ports are uniform in
//! `[1024, 65535]` unless the pattern fixes them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::alert::{Alert, AlertCluster};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("{kind} requires a population of at least {min}, got {got}")]
    PopulationTooSmall {
        kind: ScenarioKind,
        min: u32,
        got: u32,
    },
    #[error("alerts per entity must be >= 1, got {0}")]
    InvalidAlertsPerEntity(f64),
    #[error("port reuse probability must be within [0, 1], got {0}")]
    InvalidReuseProbability(f64),
    #[error("spread factor must be >= 1")]
    InvalidSpreadFactor,
    #[error("attacker ratio must be in (0, 1), got {0}")]
    InvalidAttackerRatio(f64),
    #[error("worm target fraction must be in (0, 1], got {0}")]
    InvalidTargetFraction(f64),
    #[error("attacker ratio {ratio} leaves no {side} for population {population}")]
    DegenerateSplit {
        ratio: f64,
        population: u32,
        side: &'static str,
    },
    #[error("unknown scenario kind {0:?}")]
    UnknownKind(String),
}

/// The six synthetic attack scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    /// Many attackers, one victim host and service.
    Ddos,
    /// One attacker scanning one port on many targets.
    Scan,
    /// Multiple attackers splitting the targets of a scan.
    Dscan,
    /// Every host attacks a random subset of the others on one port.
    Worm,
    /// Lateral movement fanning out from a single source.
    Expl,
    /// Lateral movement converging on a single final target.
    Conv,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Ddos,
        ScenarioKind::Scan,
        ScenarioKind::Dscan,
        ScenarioKind::Worm,
        ScenarioKind::Expl,
        ScenarioKind::Conv,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Ddos => "ddos",
            ScenarioKind::Scan => "scan",
            ScenarioKind::Dscan => "dscan",
            ScenarioKind::Worm => "worm",
            ScenarioKind::Expl => "expl",
            ScenarioKind::Conv => "conv",
        }
    }

    pub fn parse(s: &str) -> Result<Self, GenerateError> {
        match s {
            "ddos" => Ok(ScenarioKind::Ddos),
            "scan" => Ok(ScenarioKind::Scan),
            "dscan" => Ok(ScenarioKind::Dscan),
            "worm" => Ok(ScenarioKind::Worm),
            "expl" => Ok(ScenarioKind::Expl),
            "conv" => Ok(ScenarioKind::Conv),
            other => Err(GenerateError::UnknownKind(other.to_string())),
        }
    }

    /// Smallest population that still produces the pattern, given the
    /// spread factor for the tree-shaped kinds.
    fn min_population(&self, spread_factor: u32) -> u32 {
        match self {
            ScenarioKind::Ddos | ScenarioKind::Scan | ScenarioKind::Worm => 2,
            ScenarioKind::Dscan => 3,
            ScenarioKind::Expl | ScenarioKind::Conv => 1 + spread_factor,
        }
    }
}

impl core::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generator configuration for one attack instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    /// Number of hosts involved in the attack.
    pub population: u32,
    /// Mean alerts per attacking/targeted entity, where the pattern repeats
    /// alerts (default 1.5: every entity sends a second alert half the
    /// time).
    pub alerts_per_entity: f64,
    /// Probability that a source reuses its previous source port on its
    /// next alert (default 0.5).
    pub port_reuse_prob: f64,
    /// Fan-out of the lateral-movement kinds (default 5).
    pub spread_factor: u32,
    /// Fraction of the population acting as attackers in a distributed scan
    /// (default 0.5: equal halves).
    pub attacker_ratio: f64,
    /// Fraction of the other hosts each worm-infected host targets
    /// (default 0.1).
    pub worm_target_fraction: f64,
    pub seed: u64,
}

impl ScenarioParams {
    pub fn new(kind: ScenarioKind, population: u32, seed: u64) -> Self {
        ScenarioParams {
            kind,
            population,
            alerts_per_entity: 1.5,
            port_reuse_prob: 0.5,
            spread_factor: 5,
            attacker_ratio: 0.5,
            worm_target_fraction: 0.1,
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenerateError> {
        let min = self.kind.min_population(self.spread_factor);
        if self.population < min {
            return Err(GenerateError::PopulationTooSmall {
                kind: self.kind,
                min,
                got: self.population,
            });
        }
        if self.alerts_per_entity.is_nan() || self.alerts_per_entity < 1.0 {
            return Err(GenerateError::InvalidAlertsPerEntity(self.alerts_per_entity));
        }
        if !(0.0..=1.0).contains(&self.port_reuse_prob) {
            return Err(GenerateError::InvalidReuseProbability(self.port_reuse_prob));
        }
        if self.spread_factor == 0 {
            return Err(GenerateError::InvalidSpreadFactor);
        }
        if !(self.attacker_ratio > 0.0 && self.attacker_ratio < 1.0) {
            return Err(GenerateError::InvalidAttackerRatio(self.attacker_ratio));
        }
        if !(self.worm_target_fraction > 0.0 && self.worm_target_fraction <= 1.0) {
            return Err(GenerateError::InvalidTargetFraction(self.worm_target_fraction));
        }
        Ok(())
    }
}

const PORT_RANGE: core::ops::RangeInclusive<u16> = 1024..=65535;

fn draw_port(rng: &mut ChaCha8Rng) -> u16 {
    rng.gen_range(PORT_RANGE)
}

/// Collision-free dotted-quad IPs over the full IPv4 space, excluding
/// 0.0.0.0 and 255.255.255.255.
fn draw_ips(rng: &mut ChaCha8Rng, count: u32) -> Vec<String> {
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut out = Vec::with_capacity(count as usize);
    while out.len() < count as usize {
        let raw = rng.gen_range(1..u32::MAX);
        if seen.insert(raw) {
            let [a, b, c, d] = raw.to_be_bytes();
            out.push(format!("{a}.{b}.{c}.{d}"));
        }
    }
    out
}

/// Number of alerts for one entity: `floor(alpha)` plus one more with
/// probability `frac(alpha)`, so the mean is exactly `alpha`.
fn entity_alert_count(rng: &mut ChaCha8Rng, alpha: f64) -> u32 {
    let base = libm::floor(alpha);
    let frac = alpha - base;
    let mut n = base as u32;
    if frac > 0.0 && rng.gen_bool(frac) {
        n += 1;
    }
    n
}

/// Per-source-host source-port state: the first alert draws fresh, each
/// subsequent alert of the same host reuses the previous port with
/// probability `reuse_prob`.
struct PortChain {
    last: Option<u16>,
}

impl PortChain {
    fn new() -> Self {
        PortChain { last: None }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng, reuse_prob: f64) -> u16 {
        let port = match self.last {
            Some(p) if reuse_prob > 0.0 && rng.gen_bool(reuse_prob) => p,
            _ => draw_port(rng),
        };
        self.last = Some(port);
        port
    }
}

fn push_alert(alerts: &mut Vec<Alert>, src_ip: &str, src_port: u16, dst_ip: &str, dst_port: u16) {
    alerts.push(Alert::new(src_ip, src_port, dst_ip, dst_port).expect("generated tokens are valid"));
}

fn gen_ddos(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Vec<Alert> {
    let ips = draw_ips(rng, p.population);
    let (victim, attackers) = (&ips[0], &ips[1..]);
    let victim_port = draw_port(rng);
    let mut alerts = Vec::new();
    for attacker in attackers {
        let count = entity_alert_count(rng, p.alerts_per_entity);
        let mut chain = PortChain::new();
        for _ in 0..count {
            let sp = chain.next(rng, p.port_reuse_prob);
            push_alert(&mut alerts, attacker, sp, victim, victim_port);
        }
    }
    alerts
}

fn gen_scan(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Vec<Alert> {
    let ips = draw_ips(rng, p.population);
    let (attacker, targets) = (&ips[0], &ips[1..]);
    let dst_port = draw_port(rng);
    let mut alerts = Vec::new();
    let mut chain = PortChain::new();
    for target in targets {
        let count = entity_alert_count(rng, p.alerts_per_entity);
        for _ in 0..count {
            let sp = chain.next(rng, p.port_reuse_prob);
            push_alert(&mut alerts, attacker, sp, target, dst_port);
        }
    }
    alerts
}

fn gen_dscan(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Result<Vec<Alert>, GenerateError> {
    let attackers_n = libm::ceil(p.attacker_ratio * p.population as f64) as u32;
    let targets_n = p.population.saturating_sub(attackers_n);
    if attackers_n == 0 {
        return Err(GenerateError::DegenerateSplit {
            ratio: p.attacker_ratio,
            population: p.population,
            side: "attackers",
        });
    }
    if targets_n == 0 {
        return Err(GenerateError::DegenerateSplit {
            ratio: p.attacker_ratio,
            population: p.population,
            side: "targets",
        });
    }

    let ips = draw_ips(rng, p.population);
    let (attackers, targets) = ips.split_at(attackers_n as usize);
    let dst_port = draw_port(rng);
    let mut chains: Vec<PortChain> = (0..attackers_n).map(|_| PortChain::new()).collect();
    let mut alerts = Vec::new();

    // Base sweep: the target list is split among the attackers; when there
    // are more attackers than targets, every attacker still scans one
    // (repeated) target so all hosts take part.
    let mut base_attacker_of: Vec<u32> = Vec::with_capacity(targets_n as usize);
    if attackers_n <= targets_n {
        for t in 0..targets_n {
            let a = (t as u64 * attackers_n as u64 / targets_n as u64) as u32;
            base_attacker_of.push(a);
            let sp = chains[a as usize].next(rng, p.port_reuse_prob);
            push_alert(&mut alerts, &attackers[a as usize], sp, &targets[t as usize], dst_port);
        }
    } else {
        base_attacker_of = (0..targets_n).collect();
        for a in 0..attackers_n {
            let t = a % targets_n;
            let sp = chains[a as usize].next(rng, p.port_reuse_prob);
            push_alert(&mut alerts, &attackers[a as usize], sp, &targets[t as usize], dst_port);
        }
    }

    // Repeat scans: some targets are scanned again, by a different
    // attacker, so the mean alert count per target reaches alpha.
    for t in 0..targets_n {
        let extra = entity_alert_count(rng, p.alerts_per_entity).saturating_sub(1);
        for _ in 0..extra {
            let a = if attackers_n >= 2 {
                let pick = rng.gen_range(0..attackers_n - 1);
                if pick >= base_attacker_of[t as usize] {
                    pick + 1
                } else {
                    pick
                }
            } else {
                0
            };
            let sp = chains[a as usize].next(rng, p.port_reuse_prob);
            push_alert(&mut alerts, &attackers[a as usize], sp, &targets[t as usize], dst_port);
        }
    }
    Ok(alerts)
}

fn gen_worm(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Vec<Alert> {
    let ips = draw_ips(rng, p.population);
    let dst_port = draw_port(rng);
    let victims_each = libm::ceil(p.worm_target_fraction * (p.population - 1) as f64) as usize;
    let mut alerts = Vec::new();
    for h in 0..p.population as usize {
        let mut candidates: Vec<usize> =
            (0..p.population as usize).filter(|&x| x != h).collect();
        // Partial Fisher-Yates: the first `victims_each` slots become a
        // uniform distinct sample.
        for i in 0..victims_each {
            let j = rng.gen_range(i..candidates.len());
            candidates.swap(i, j);
            let victim = candidates[i];
            let sp = draw_port(rng);
            push_alert(&mut alerts, &ips[h], sp, &ips[victim], dst_port);
        }
    }
    alerts
}

/// Children of host `k` in the spread tree: the next `f` unused hosts.
fn tree_children(k: u32, spread: u32, population: u32) -> core::ops::Range<u32> {
    let first = (1 + k as u64 * spread as u64).min(population as u64) as u32;
    let last = (1 + (k as u64 + 1) * spread as u64).min(population as u64) as u32;
    first..last
}

fn gen_expl(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Vec<Alert> {
    let ips = draw_ips(rng, p.population);
    let mut alerts = Vec::new();
    for k in 0..p.population {
        for child in tree_children(k, p.spread_factor, p.population) {
            let sp = draw_port(rng);
            let dp = draw_port(rng);
            push_alert(&mut alerts, &ips[k as usize], sp, &ips[child as usize], dp);
        }
    }
    alerts
}

fn gen_conv(rng: &mut ChaCha8Rng, p: &ScenarioParams) -> Vec<Alert> {
    let ips = draw_ips(rng, p.population);
    let mut alerts = Vec::new();
    for k in 0..p.population {
        for child in tree_children(k, p.spread_factor, p.population) {
            let sp = draw_port(rng);
            let dp = draw_port(rng);
            push_alert(&mut alerts, &ips[child as usize], sp, &ips[k as usize], dp);
        }
    }
    alerts
}

/// Generates one labeled attack cluster. Deterministic: the cluster id is
/// `{kind}-{population}-{seed:016x}` and identical parameters reproduce the
/// cluster byte for byte.
pub fn generate(params: &ScenarioParams) -> Result<AlertCluster, GenerateError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let alerts = match params.kind {
        ScenarioKind::Ddos => gen_ddos(&mut rng, params),
        ScenarioKind::Scan => gen_scan(&mut rng, params),
        ScenarioKind::Dscan => gen_dscan(&mut rng, params)?,
        ScenarioKind::Worm => gen_worm(&mut rng, params),
        ScenarioKind::Expl => gen_expl(&mut rng, params),
        ScenarioKind::Conv => gen_conv(&mut rng, params),
    };
    let id = format!("{}-{}-{:016x}", params.kind, params.population, params.seed);
    Ok(AlertCluster::new(id, alerts, Some(params.kind.as_str().to_string()))
        .expect("patterns emit at least one alert"))
}

/// One corpus entry: `count` attacks of `kind` at every population in
/// `psi_lo..=psi_hi` stepping by `psi_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub kind: ScenarioKind,
    pub psi_lo: u32,
    pub psi_hi: u32,
    pub psi_step: u32,
    pub count: u32,
    /// Non-default pattern parameters, applied to every generated cluster.
    pub alerts_per_entity: f64,
    pub port_reuse_prob: f64,
    pub spread_factor: u32,
    pub attacker_ratio: f64,
    pub worm_target_fraction: f64,
}

impl CorpusSpec {
    pub fn new(kind: ScenarioKind, psi_lo: u32, psi_hi: u32, psi_step: u32, count: u32) -> Self {
        let defaults = ScenarioParams::new(kind, psi_lo, 0);
        CorpusSpec {
            kind,
            psi_lo,
            psi_hi,
            psi_step,
            count,
            alerts_per_entity: defaults.alerts_per_entity,
            port_reuse_prob: defaults.port_reuse_prob,
            spread_factor: defaults.spread_factor,
            attacker_ratio: defaults.attacker_ratio,
            worm_target_fraction: defaults.worm_target_fraction,
        }
    }

    pub fn fixed(kind: ScenarioKind, psi: u32, count: u32) -> Self {
        CorpusSpec::new(kind, psi, psi, 1, count)
    }

    fn populations(&self) -> impl Iterator<Item = u32> + '_ {
        (self.psi_lo..=self.psi_hi).step_by(self.psi_step.max(1) as usize)
    }
}

/// Generates a labeled corpus. Each cluster runs on its own seed derived
/// from the master seed and a running index, so corpora are reproducible
/// and clusters may be generated in any order or in parallel.
pub fn generate_corpus(
    specs: &[CorpusSpec],
    master_seed: u64,
) -> Result<Vec<AlertCluster>, GenerateError> {
    let mut out = Vec::new();
    let mut index: u64 = 0;
    for spec in specs {
        for psi in spec.populations() {
            for _ in 0..spec.count {
                let params = ScenarioParams {
                    kind: spec.kind,
                    population: psi,
                    alerts_per_entity: spec.alerts_per_entity,
                    port_reuse_prob: spec.port_reuse_prob,
                    spread_factor: spec.spread_factor,
                    attacker_ratio: spec.attacker_ratio,
                    worm_target_fraction: spec.worm_target_fraction,
                    seed: seed::derive(master_seed, index),
                };
                out.push(generate(&params)?);
                index += 1;
            }
        }
    }
    Ok(out)
}
