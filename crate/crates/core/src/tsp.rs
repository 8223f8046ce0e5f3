//! Triad significance profiles.
//!
//! A user's ego-network census is turned into per-class Z-scores against the
//! mean and spread of a sample of legitimate users, then scaled to unit
//! length. Only the 13 connected classes take part.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ego::{ego_network, EgoCap};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::triad::{census, TriadCensus, TriadClass};

/// Floor applied to per-class standard deviations.
pub const STD_FLOOR: f64 = 1e-9;

/// Legitimate-population triad statistics (population standard deviation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriadBaseline {
    pub mean: [f64; 13],
    pub std: [f64; 13],
    pub sample_size: usize,
    /// Ego cap the sampled censuses were computed with.
    pub cap: Option<EgoCap>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TspVector {
    pub z: [f64; 13],
    pub tsp: [f64; 13],
}

/// Per-class mean and population standard deviation, single pass (Welford).
pub fn compute_baseline(censuses: &[TriadCensus]) -> Result<TriadBaseline> {
    if censuses.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "baseline needs at least 2 censuses, got {}",
            censuses.len()
        )));
    }
    let mut mean = [0f64; 13];
    let mut m2 = [0f64; 13];
    for (k, c) in censuses.iter().enumerate() {
        let seen = (k + 1) as f64;
        for (i, &x) in c.feature_counts().iter().enumerate() {
            let x = x as f64;
            let delta = x - mean[i];
            mean[i] += delta / seen;
            m2[i] += delta * (x - mean[i]);
        }
    }
    let n = censuses.len() as f64;
    let std = m2.map(|s| (s / n).max(0.0).sqrt().max(STD_FLOOR));
    Ok(TriadBaseline {
        mean,
        std,
        sample_size: censuses.len(),
        cap: None,
    })
}

pub fn zscores(census: &TriadCensus, baseline: &TriadBaseline) -> [f64; 13] {
    let counts = census.feature_counts();
    std::array::from_fn(|i| (counts[i] as f64 - baseline.mean[i]) / baseline.std[i])
}

/// Scales `z` to unit Euclidean length; the zero vector stays zero.
pub fn normalize_tsp(z: &[f64; 13]) -> [f64; 13] {
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return [0.0; 13];
    }
    z.map(|x| x / norm)
}

pub fn tsp_from_census(census: &TriadCensus, baseline: &TriadBaseline) -> TspVector {
    let z = zscores(census, baseline);
    TspVector {
        tsp: normalize_tsp(&z),
        z,
    }
}

/// Census of `u`'s ego network, using the baseline's cap.
pub fn ego_census(g: &DirectedGraph, u: NodeId, cap: Option<EgoCap>) -> Result<TriadCensus> {
    Ok(census(&ego_network(g, u, cap)?.graph))
}

/// The 13 profile values for `u`, followed by indegree and outdegree when
/// `include_degrees` is set.
pub fn tsp_features(
    g: &DirectedGraph,
    u: NodeId,
    baseline: &TriadBaseline,
    include_degrees: bool,
) -> Result<Vec<f64>> {
    let c = ego_census(g, u, baseline.cap)?;
    let mut row = tsp_from_census(&c, baseline).tsp.to_vec();
    if include_degrees {
        let (indeg, outdeg) = g.degrees(u)?;
        row.push(indeg as f64);
        row.push(outdeg as f64);
    }
    Ok(row)
}

impl TriadBaseline {
    /// Text form: header records, then one `class mean std` line per class.
    /// Floats carry 17 significant digits so they parse back bit-exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# triad baseline\n");
        let _ = writeln!(s, "sample_size {}", self.sample_size);
        s.push_str("std population\n");
        match self.cap {
            None => s.push_str("cap none\n"),
            Some(c) => {
                let _ = writeln!(s, "cap {} {}", c.max_neighbors, c.seed);
            }
        }
        for (i, class) in TriadClass::FEATURES.iter().enumerate() {
            let _ = writeln!(s, "{} {:.16e} {:.16e}", class, self.mean[i], self.std[i]);
        }
        s
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut mean = [f64::NAN; 13];
        let mut std = [f64::NAN; 13];
        let mut sample_size = None;
        let mut cap = None;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            let bad = |msg: &str| Error::parse(origin, lineno, msg.to_string());
            match fields.as_slice() {
                ["sample_size", n] => {
                    sample_size = Some(n.parse::<usize>().map_err(|_| bad("bad sample_size"))?)
                }
                ["std", "population"] => {}
                ["std", other] => return Err(bad(&format!("unsupported std kind {other}"))),
                ["cap", "none"] => cap = None,
                ["cap", max, seed] => {
                    cap = Some(EgoCap {
                        max_neighbors: max.parse().map_err(|_| bad("bad cap"))?,
                        seed: seed.parse().map_err(|_| bad("bad cap seed"))?,
                    })
                }
                [label, m, s] => {
                    let class: TriadClass = label.parse().map_err(|_| bad("unknown class"))?;
                    let i = TriadClass::FEATURES
                        .iter()
                        .position(|&c| c == class)
                        .ok_or_else(|| bad("class is not a feature class"))?;
                    mean[i] = m.parse().map_err(|_| bad("bad mean"))?;
                    std[i] = s.parse().map_err(|_| bad("bad std"))?;
                }
                _ => return Err(bad("unrecognized record")),
            }
        }
        let sample_size =
            sample_size.ok_or_else(|| Error::parse(origin, 0, "missing sample_size"))?;
        if sample_size < 2 {
            return Err(Error::parse(origin, 0, "sample_size must be >= 2"));
        }
        if let Some(i) = (0..13).find(|&i| !mean[i].is_finite() || std[i].is_nan() || std[i] < 0.0) {
            return Err(Error::parse(
                origin,
                0,
                format!("missing or invalid record for {}", TriadClass::FEATURES[i]),
            ));
        }
        Ok(TriadBaseline {
            mean,
            std,
            sample_size,
            cap,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}
