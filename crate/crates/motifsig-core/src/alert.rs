//! Alerts and alert clusters.
//!
//! An alert is one IDS detection record reduced to its four address
//! attributes: source IP and port, destination IP and port. A cluster is the
//! set of alerts attributed to one attack by an upstream correlation step;
//! this crate never clusters raw alerts itself.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlertError {
    #[error("{0} must be a non-empty address token")]
    EmptyAddress(&'static str),
    /// `:` separates hosts from ports in graph node ids, so it cannot appear
    /// inside an address token.
    #[error("{field} token {token:?} contains ':'")]
    AddressContainsSeparator { field: &'static str, token: String },
    #[error("cluster id must be non-empty")]
    EmptyClusterId,
    #[error("cluster {0:?} has no alerts")]
    EmptyCluster(String),
    #[error("cluster {0:?} has an empty label")]
    EmptyLabel(String),
}

/// One alert: `src_ip:src_port -> dst_ip:dst_port`.
///
/// Address fields are opaque tokens: dotted IPv4 strings in generated data,
/// but hashed or otherwise anonymized tokens are accepted as long as they are
/// non-empty and free of `:`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alert {
    src_ip: String,
    src_port: u16,
    dst_ip: String,
    dst_port: u16,
}

fn check_token(field: &'static str, token: &str) -> Result<(), AlertError> {
    if token.is_empty() {
        return Err(AlertError::EmptyAddress(field));
    }
    if token.contains(':') {
        return Err(AlertError::AddressContainsSeparator {
            field,
            token: String::from(token),
        });
    }
    Ok(())
}

impl Alert {
    pub fn new(
        src_ip: impl Into<String>,
        src_port: u16,
        dst_ip: impl Into<String>,
        dst_port: u16,
    ) -> Result<Self, AlertError> {
        let src_ip = src_ip.into();
        let dst_ip = dst_ip.into();
        check_token("src_ip", &src_ip)?;
        check_token("dst_ip", &dst_ip)?;
        Ok(Alert {
            src_ip,
            src_port,
            dst_ip,
            dst_port,
        })
    }

    pub fn src_ip(&self) -> &str {
        &self.src_ip
    }

    pub fn src_port(&self) -> u16 {
        self.src_port
    }

    pub fn dst_ip(&self) -> &str {
        &self.dst_ip
    }

    pub fn dst_port(&self) -> u16 {
        self.dst_port
    }
}

/// A non-empty, ordered list of alerts belonging to one attack.
///
/// `label` carries the ground-truth scenario name for synthetic data and is
/// absent for real inputs. Alert order is preserved exactly as given;
/// duplicate alerts are kept here (graph construction deduplicates) so byte
/// measurements reflect real input size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlertCluster {
    cluster_id: String,
    alerts: Vec<Alert>,
    label: Option<String>,
}

impl AlertCluster {
    pub fn new(
        cluster_id: impl Into<String>,
        alerts: Vec<Alert>,
        label: Option<String>,
    ) -> Result<Self, AlertError> {
        let cluster_id = cluster_id.into();
        if cluster_id.is_empty() {
            return Err(AlertError::EmptyClusterId);
        }
        if alerts.is_empty() {
            return Err(AlertError::EmptyCluster(cluster_id));
        }
        if let Some(l) = &label {
            if l.is_empty() {
                return Err(AlertError::EmptyLabel(cluster_id));
            }
        }
        Ok(AlertCluster {
            cluster_id,
            alerts,
            label,
        })
    }

    pub fn cluster_id(&self) -> &str {
        &self.cluster_id
    }

    pub fn alerts(&self) -> &[Alert] {
        &self.alerts
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Appends alerts from a later region of the same input file (duplicate
    /// cluster ids are merged during parsing).
    pub fn extend_alerts(&mut self, alerts: impl IntoIterator<Item = Alert>) {
        self.alerts.extend(alerts);
    }

    /// Attaches a label discovered after construction. Returns `false` if a
    /// different label was already present.
    pub fn set_label(&mut self, label: String) -> bool {
        match &self.label {
            Some(existing) => *existing == label,
            None => {
                self.label = Some(label);
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_tokens() {
        assert_eq!(
            Alert::new("", 1, "2.2.2.2", 2),
            Err(AlertError::EmptyAddress("src_ip"))
        );
        assert!(matches!(
            Alert::new("1.1.1.1", 1, "fe80::1", 2),
            Err(AlertError::AddressContainsSeparator { field: "dst_ip", .. })
        ));
    }

    #[test]
    fn opaque_tokens_are_fine() {
        let a = Alert::new("h4sh3d", 80, "5.6.7.8", 443).unwrap();
        assert_eq!(a.src_ip(), "h4sh3d");
    }

    #[test]
    fn cluster_must_be_non_empty() {
        assert_eq!(
            AlertCluster::new("c1", vec![], None),
            Err(AlertError::EmptyCluster("c1".into()))
        );
    }

    #[test]
    fn label_conflicts_are_reported() {
        let a = Alert::new("1.1.1.1", 1, "2.2.2.2", 2).unwrap();
        let mut c = AlertCluster::new("c1", vec![a], Some("scan".into())).unwrap();
        assert!(c.set_label("scan".into()));
        assert!(!c.set_label("worm".into()));
    }
}
