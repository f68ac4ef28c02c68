//! Alert-cluster interchange formats: JSONL (one alert per line, carrying
//! its `cluster_id`) and CSV (header `cluster_id,src_ip,src_port,dst_ip,
//! dst_port[,label]`, RFC-4180 quoting, LF line endings). Both decode to the
//! same grouped [`AlertCluster`] list, preserving alert order within a
//! cluster and merging duplicate cluster ids across non-contiguous regions.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use motifsig_core::alert::{Alert, AlertCluster, AlertError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterFormat {
    Jsonl,
    Csv,
}

impl ClusterFormat {
    /// `.csv` means CSV, anything else JSONL.
    pub fn from_path(path: &Path) -> ClusterFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ClusterFormat::Csv,
            _ => ClusterFormat::Jsonl,
        }
    }
}

impl std::str::FromStr for ClusterFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(ClusterFormat::Jsonl),
            "csv" => Ok(ClusterFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: {field}: {message}")]
    Field {
        line: u64,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: cluster {cluster_id:?}: label {new:?} conflicts with earlier label {old:?}")]
    LabelConflict {
        line: u64,
        cluster_id: String,
        old: String,
        new: String,
    },
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What [`measure_bytes`] serializes: everything, or only the four address
/// attributes per alert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    Full,
    IpPortOnly,
}

#[derive(Deserialize)]
struct RawAlert {
    cluster_id: String,
    src_ip: String,
    src_port: i64,
    dst_ip: String,
    dst_port: i64,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Serialize)]
struct AlertLine<'a> {
    cluster_id: &'a str,
    src_ip: &'a str,
    src_port: u16,
    dst_ip: &'a str,
    dst_port: u16,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

#[derive(Serialize)]
struct EndpointLine<'a> {
    src_ip: &'a str,
    src_port: u16,
    dst_ip: &'a str,
    dst_port: u16,
}

fn check_port(line: u64, field: &'static str, value: i64) -> Result<u16, FormatError> {
    u16::try_from(value).map_err(|_| FormatError::Field {
        line,
        field,
        message: format!("port {value} out of range [0, 65535]"),
    })
}

fn alert_error(line: u64, err: AlertError) -> FormatError {
    let field = match &err {
        AlertError::EmptyAddress(f) => f,
        AlertError::AddressContainsSeparator { field, .. } => field,
        _ => "alert",
    };
    FormatError::Field {
        line,
        field,
        message: err.to_string(),
    }
}

/// Accumulates alerts into clusters keyed by id, first-appearance order.
struct Grouper {
    clusters: Vec<AlertCluster>,
    index: std::collections::BTreeMap<String, usize>,
}

impl Grouper {
    fn new() -> Self {
        Grouper {
            clusters: Vec::new(),
            index: std::collections::BTreeMap::new(),
        }
    }

    fn push(
        &mut self,
        line: u64,
        cluster_id: String,
        alert: Alert,
        label: Option<String>,
    ) -> Result<(), FormatError> {
        if cluster_id.is_empty() {
            return Err(FormatError::Field {
                line,
                field: "cluster_id",
                message: "must be non-empty".into(),
            });
        }
        // Empty label cells mean "no label".
        let label = label.filter(|l| !l.is_empty());
        match self.index.get(&cluster_id) {
            Some(&i) => {
                let cluster = &mut self.clusters[i];
                cluster.extend_alerts([alert]);
                if let Some(new) = label {
                    if !cluster.set_label(new.clone()) {
                        return Err(FormatError::LabelConflict {
                            line,
                            cluster_id,
                            old: cluster.label().unwrap_or_default().to_string(),
                            new,
                        });
                    }
                }
            }
            None => {
                let cluster = AlertCluster::new(cluster_id.clone(), vec![alert], label)
                    .map_err(|e| alert_error(line, e))?;
                self.index.insert(cluster_id, self.clusters.len());
                self.clusters.push(cluster);
            }
        }
        Ok(())
    }
}

fn raw_to_alert(line: u64, raw: RawAlert) -> Result<(String, Alert, Option<String>), FormatError> {
    let src_port = check_port(line, "src_port", raw.src_port)?;
    let dst_port = check_port(line, "dst_port", raw.dst_port)?;
    let alert = Alert::new(raw.src_ip, src_port, raw.dst_ip, dst_port)
        .map_err(|e| alert_error(line, e))?;
    Ok((raw.cluster_id, alert, raw.label))
}

fn parse_jsonl<R: Read>(reader: R) -> Result<Vec<AlertCluster>, FormatError> {
    let mut grouper = Grouper::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let raw: RawAlert = serde_json::from_str(&text).map_err(|e| FormatError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let (cluster_id, alert, label) = raw_to_alert(line_no, raw)?;
        grouper.push(line_no, cluster_id, alert, label)?;
    }
    Ok(grouper.clusters)
}

fn parse_csv<R: Read>(reader: R) -> Result<Vec<AlertCluster>, FormatError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| FormatError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &'static str| -> Result<usize, FormatError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(FormatError::MissingColumn(name))
    };
    let id_col = col("cluster_id")?;
    let src_ip_col = col("src_ip")?;
    let src_port_col = col("src_port")?;
    let dst_ip_col = col("dst_ip")?;
    let dst_port_col = col("dst_port")?;
    let label_col = headers.iter().position(|h| h == "label");

    let mut grouper = Grouper::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| FormatError::Malformed {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize, name: &'static str| -> Result<&str, FormatError> {
            record.get(idx).ok_or(FormatError::Field {
                line,
                field: name,
                message: "missing cell".into(),
            })
        };
        let parse_port = |idx: usize, name: &'static str| -> Result<i64, FormatError> {
            field(idx, name)?.trim().parse().map_err(|_| FormatError::Field {
                line,
                field: name,
                message: format!("{:?} is not an integer", record.get(idx).unwrap_or("")),
            })
        };
        let raw = RawAlert {
            cluster_id: field(id_col, "cluster_id")?.to_string(),
            src_ip: field(src_ip_col, "src_ip")?.to_string(),
            src_port: parse_port(src_port_col, "src_port")?,
            dst_ip: field(dst_ip_col, "dst_ip")?.to_string(),
            dst_port: parse_port(dst_port_col, "dst_port")?,
            label: match label_col {
                Some(idx) => record.get(idx).map(str::to_string),
                None => None,
            },
        };
        let (cluster_id, alert, label) = raw_to_alert(line, raw)?;
        grouper.push(line, cluster_id, alert, label)?;
    }
    Ok(grouper.clusters)
}

/// Decodes an alert-cluster byte stream.
pub fn parse_clusters<R: Read>(
    reader: R,
    format: ClusterFormat,
) -> Result<Vec<AlertCluster>, FormatError> {
    match format {
        ClusterFormat::Jsonl => parse_jsonl(reader),
        ClusterFormat::Csv => parse_csv(reader),
    }
}

/// Encodes clusters; `parse_clusters(serialize_clusters(x)) == x`.
///
/// For CSV the `label` column is present exactly when at least one cluster
/// is labeled; an empty list serializes to an empty payload (plus the fixed
/// header for CSV).
pub fn serialize_clusters(clusters: &[AlertCluster], format: ClusterFormat) -> Vec<u8> {
    match format {
        ClusterFormat::Jsonl => {
            let mut out = Vec::new();
            for cluster in clusters {
                for alert in cluster.alerts() {
                    let line = AlertLine {
                        cluster_id: cluster.cluster_id(),
                        src_ip: alert.src_ip(),
                        src_port: alert.src_port(),
                        dst_ip: alert.dst_ip(),
                        dst_port: alert.dst_port(),
                        label: cluster.label(),
                    };
                    out.extend_from_slice(&serde_json::to_vec(&line).expect("plain struct"));
                    out.push(b'\n');
                }
            }
            out
        }
        ClusterFormat::Csv => {
            let with_label = clusters.iter().any(|c| c.label().is_some());
            let mut writer = csv::Writer::from_writer(Vec::new());
            let header: &[&str] = if with_label {
                &["cluster_id", "src_ip", "src_port", "dst_ip", "dst_port", "label"]
            } else {
                &["cluster_id", "src_ip", "src_port", "dst_ip", "dst_port"]
            };
            writer.write_record(header).expect("vec writer");
            for cluster in clusters {
                for alert in cluster.alerts() {
                    let src_port = alert.src_port().to_string();
                    let dst_port = alert.dst_port().to_string();
                    let mut row = vec![
                        cluster.cluster_id(),
                        alert.src_ip(),
                        &src_port,
                        alert.dst_ip(),
                        &dst_port,
                    ];
                    if with_label {
                        row.push(cluster.label().unwrap_or(""));
                    }
                    writer.write_record(&row).expect("vec writer");
                }
            }
            writer.into_inner().expect("vec writer")
        }
    }
}

/// Serialized size of the clusters in the given format and mode.
///
/// `IpPortOnly` keeps only the four address attributes per alert (no cluster
/// id, no label); it is a measurement projection, not a round-trippable
/// encoding. An empty list measures 0 bytes for JSONL and the bare header
/// for CSV.
pub fn measure_bytes(
    clusters: &[AlertCluster],
    format: ClusterFormat,
    mode: MeasureMode,
) -> usize {
    match mode {
        MeasureMode::Full => serialize_clusters(clusters, format).len(),
        MeasureMode::IpPortOnly => match format {
            ClusterFormat::Jsonl => {
                let mut total = 0usize;
                for cluster in clusters {
                    for alert in cluster.alerts() {
                        let line = EndpointLine {
                            src_ip: alert.src_ip(),
                            src_port: alert.src_port(),
                            dst_ip: alert.dst_ip(),
                            dst_port: alert.dst_port(),
                        };
                        total += serde_json::to_vec(&line).expect("plain struct").len() + 1;
                    }
                }
                total
            }
            ClusterFormat::Csv => {
                let mut writer = csv::Writer::from_writer(Vec::new());
                writer
                    .write_record(["src_ip", "src_port", "dst_ip", "dst_port"])
                    .expect("vec writer");
                for cluster in clusters {
                    for alert in cluster.alerts() {
                        writer
                            .write_record([
                                alert.src_ip(),
                                &alert.src_port().to_string(),
                                alert.dst_ip(),
                                &alert.dst_port().to_string(),
                            ])
                            .expect("vec writer");
                    }
                }
                writer.into_inner().expect("vec writer").len()
            }
        },
    }
}
