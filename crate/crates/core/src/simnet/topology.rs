//! Topology files: nodes with roles, and the links between them.
//!
//! ```toml
//! [[node]]
//! id = "fortworth"
//! role = "radar"
//! seqs_per_round = 1
//! round_duration_s = 70.0
//! mean_file_mb = 12.0
//!
//! [[node]]
//! id = "agg"
//! role = "forwarder"
//!
//! [[link]]
//! a = "fortworth"
//! b = "agg"
//! bandwidth_mbps = 10
//! delay_ms = 6
//! ```

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use super::link::LinkProfile;
use crate::names::Name;
use crate::protocol::RadarConfig;

pub const DEFAULT_STORE_CAPACITY_FILES: usize = 32;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}{}: {field}: {message}", line_suffix(*.line))]
    Invalid {
        path: String,
        line: Option<usize>,
        field: String,
        message: String,
    },
}

fn line_suffix(line: Option<usize>) -> String {
    line.map_or_else(String::new, |l| format!(":{l}"))
}

impl ConfigError {
    pub fn invalid(
        path: &str,
        line: Option<usize>,
        field: &str,
        message: impl Into<String>,
    ) -> Self {
        ConfigError::Invalid {
            path: path.to_string(),
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// 1-based line of a byte offset.
pub(crate) fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Radar,
    Forwarder,
    Consumer,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Radar => "radar",
            Role::Forwarder => "forwarder",
            Role::Consumer => "consumer",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    pub id: String,
    pub role: Role,
    /// Present exactly when `role` is [`Role::Radar`].
    pub radar: Option<RadarConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub a: String,
    pub b: String,
    pub profile: LinkProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<NodeConfig>,
    pub links: Vec<LinkConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    #[serde(default)]
    node: Vec<NodeSpec>,
    #[serde(default)]
    link: Vec<LinkSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeSpec {
    id: Spanned<String>,
    role: Role,
    seqs_per_round: Option<u64>,
    round_duration_s: Option<f64>,
    mean_file_mb: Option<f64>,
    store_capacity_files: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSpec {
    a: Spanned<String>,
    b: Spanned<String>,
    bandwidth_mbps: f64,
    delay_ms: f64,
    loss: Option<Spanned<f64>>,
    queue_limit: Option<usize>,
}

pub fn load_topology(path: &Path) -> Result<Topology, ConfigError> {
    let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Topology::parse(&src, &path.display().to_string())
}

impl Topology {
    /// Parses and validates topology text; `origin` labels diagnostics.
    pub fn parse(src: &str, origin: &str) -> Result<Topology, ConfigError> {
        let file: TopologyFile = toml::from_str(src).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        let at = |span: std::ops::Range<usize>| Some(line_of(src, span.start));

        let mut nodes = Vec::new();
        for spec in file.node {
            let line = at(spec.id.span());
            let id = spec.id.into_inner();
            let radar_fields = [
                spec.seqs_per_round.is_some(),
                spec.round_duration_s.is_some(),
                spec.mean_file_mb.is_some(),
                spec.store_capacity_files.is_some(),
            ];
            let radar = if spec.role == Role::Radar {
                let missing = |field: &str| {
                    ConfigError::invalid(origin, line, field, format!("required for radar {id:?}"))
                };
                let seqs = spec
                    .seqs_per_round
                    .ok_or_else(|| missing("seqs_per_round"))?;
                let round = spec
                    .round_duration_s
                    .ok_or_else(|| missing("round_duration_s"))?;
                let mb = spec.mean_file_mb.ok_or_else(|| missing("mean_file_mb"))?;
                if seqs == 0 {
                    return Err(ConfigError::invalid(
                        origin,
                        line,
                        "seqs_per_round",
                        "must be at least 1",
                    ));
                }
                if !(round.is_finite() && round > 0.0) {
                    return Err(ConfigError::invalid(
                        origin,
                        line,
                        "round_duration_s",
                        "must be positive",
                    ));
                }
                if !(mb.is_finite() && mb >= 0.0) {
                    return Err(ConfigError::invalid(
                        origin,
                        line,
                        "mean_file_mb",
                        "must be non-negative",
                    ));
                }
                Some(RadarConfig {
                    radar_id: id.clone(),
                    round_duration: Duration::from_secs_f64(round),
                    seqs_per_round: seqs,
                    store_capacity_files: spec
                        .store_capacity_files
                        .unwrap_or(DEFAULT_STORE_CAPACITY_FILES)
                        .max(1),
                    mean_file_bytes: (mb * 1e6).round() as u64,
                })
            } else {
                if radar_fields.iter().any(|&f| f) {
                    return Err(ConfigError::invalid(
                        origin,
                        line,
                        "role",
                        format!("radar parameters given for {} node {id:?}", spec.role),
                    ));
                }
                None
            };
            nodes.push(NodeConfig {
                id,
                role: spec.role,
                radar,
            });
            if let Err(message) = check_node_id(&nodes.last().unwrap().id) {
                return Err(ConfigError::invalid(origin, line, "id", message));
            }
        }

        let mut links = Vec::new();
        for spec in file.link {
            let line = at(spec.a.span());
            for end in [&spec.a, &spec.b] {
                if !nodes.iter().any(|n| &n.id == end.get_ref()) {
                    return Err(ConfigError::invalid(
                        origin,
                        at(end.span()),
                        "link",
                        format!("unknown node {:?}", end.get_ref()),
                    ));
                }
            }
            let loss_line = spec.loss.as_ref().map_or(line, |l| at(l.span()));
            let loss = spec.loss.map_or(0.0, |l| l.into_inner());
            let mut profile =
                LinkProfile::mbps(spec.bandwidth_mbps, spec.delay_ms, loss).map_err(|m| {
                    let field = if m.contains("loss") {
                        "loss"
                    } else if m.contains("delay") {
                        "delay_ms"
                    } else {
                        "bandwidth_mbps"
                    };
                    ConfigError::invalid(
                        origin,
                        if field == "loss" { loss_line } else { line },
                        field,
                        m,
                    )
                })?;
            profile.queue_limit = spec.queue_limit;
            links.push(LinkConfig {
                a: spec.a.into_inner(),
                b: spec.b.into_inner(),
                profile,
            });
        }
        Topology::new(nodes, links)
            .map_err(|(field, message)| ConfigError::invalid(origin, None, &field, message))
    }

    /// Builds a topology, checking ids, link endpoints and connectivity.
    pub fn new(
        nodes: Vec<NodeConfig>,
        links: Vec<LinkConfig>,
    ) -> Result<Topology, (String, String)> {
        let mut ids = BTreeSet::new();
        for n in &nodes {
            check_node_id(&n.id).map_err(|m| ("id".to_string(), m))?;
            if !ids.insert(n.id.as_str()) {
                return Err(("id".into(), format!("duplicate node id {:?}", n.id)));
            }
            if (n.role == Role::Radar) != n.radar.is_some() {
                return Err((
                    "role".into(),
                    format!("radar parameters do not match role of {:?}", n.id),
                ));
            }
        }
        if !nodes.iter().any(|n| n.role == Role::Radar) {
            return Err(("node".into(), "no radar node".into()));
        }
        if !nodes.iter().any(|n| n.role == Role::Consumer) {
            return Err(("node".into(), "no consumer node".into()));
        }
        let mut pairs = BTreeSet::new();
        for l in &links {
            for end in [&l.a, &l.b] {
                if !ids.contains(end.as_str()) {
                    return Err(("link".into(), format!("unknown node {end:?}")));
                }
            }
            if l.a == l.b {
                return Err(("link".into(), format!("link from {:?} to itself", l.a)));
            }
            let key = if l.a < l.b {
                (&l.a, &l.b)
            } else {
                (&l.b, &l.a)
            };
            if !pairs.insert(key) {
                return Err(("link".into(), format!("duplicate link {} -- {}", l.a, l.b)));
            }
            if !(0.0..1.0).contains(&l.profile.loss_prob) || l.profile.bandwidth_bps == 0 {
                return Err((
                    "link".into(),
                    format!("invalid profile on {} -- {}", l.a, l.b),
                ));
            }
        }
        let topo = Topology { nodes, links };
        if let Some(unreached) = topo.unreachable_from(&topo.nodes[0].id).first() {
            return Err((
                "link".into(),
                format!("node {unreached:?} is not connected"),
            ));
        }
        Ok(topo)
    }

    pub fn node(&self, id: &str) -> Option<&NodeConfig> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn radars(&self) -> impl Iterator<Item = &RadarConfig> {
        self.nodes.iter().filter_map(|n| n.radar.as_ref())
    }

    pub fn seqs_per_round(&self) -> BTreeMap<String, u64> {
        self.radars()
            .map(|r| (r.radar_id.clone(), r.seqs_per_round))
            .collect()
    }

    /// Files in one complete round across all radars.
    pub fn ideal_files(&self) -> u64 {
        self.radars().map(|r| r.seqs_per_round).sum()
    }

    pub fn neighbors(&self, id: &str) -> Vec<&str> {
        self.links
            .iter()
            .filter_map(|l| {
                if l.a == id {
                    Some(l.b.as_str())
                } else if l.b == id {
                    Some(l.a.as_str())
                } else {
                    None
                }
            })
            .collect()
    }

    fn unreachable_from(&self, start: &str) -> Vec<String> {
        let mut seen = BTreeSet::from([start.to_string()]);
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(n) = queue.pop_front() {
            for m in self.neighbors(&n) {
                if seen.insert(m.to_string()) {
                    queue.push_back(m.to_string());
                }
            }
        }
        self.nodes
            .iter()
            .filter(|n| !seen.contains(&n.id))
            .map(|n| n.id.clone())
            .collect()
    }

    /// Applies `f` to every link with a radar at one end.
    pub fn map_radar_links(&mut self, mut f: impl FnMut(&mut LinkProfile)) {
        let radars: BTreeSet<String> = self.radars().map(|r| r.radar_id.clone()).collect();
        for l in &mut self.links {
            if radars.contains(&l.a) || radars.contains(&l.b) {
                f(&mut l.profile);
            }
        }
    }
}

fn check_node_id(id: &str) -> Result<(), String> {
    if Name::from_components([id]).is_err() || id.contains('/') {
        return Err(format!("{id:?} is not a usable name component"));
    }
    Ok(())
}
