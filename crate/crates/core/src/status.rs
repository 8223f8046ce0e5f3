//! Social-status features: a user's status, the share of follows that point
//! to higher-status users, and the average status of followees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeTable, DirectedGraph, NodeId};

/// `indegree / max(outdegree, 1)` for every node.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusTable {
    status: Vec<f64>,
}

impl StatusTable {
    pub fn get(&self, u: NodeId) -> f64 {
        self.status[u.index()]
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.status
    }
}

pub fn build_status_table(degrees: &DegreeTable) -> StatusTable {
    let status = degrees
        .indegree
        .iter()
        .zip(&degrees.outdegree)
        .map(|(&i, &o)| i as f64 / o.max(1) as f64)
        .collect();
    StatusTable { status }
}

/// A ratio over a user's followees; `no_followees` marks the 0/0 case,
/// reported as 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FolloweeStat {
    pub value: f64,
    pub no_followees: bool,
}

fn check(g: &DirectedGraph, st: &StatusTable, u: NodeId) -> Result<()> {
    if !g.contains(u) || u.index() >= st.len() {
        return Err(Error::UnknownNode(u.0 as u64));
    }
    Ok(())
}

/// Positive link probability: the fraction of `u`'s followees whose status is
/// strictly higher than `u`'s. Equal status counts as a negative link.
pub fn plp(g: &DirectedGraph, st: &StatusTable, u: NodeId) -> Result<FolloweeStat> {
    check(g, st, u)?;
    let followees = g.out_neighbors(u);
    if followees.is_empty() {
        return Ok(FolloweeStat {
            value: 0.0,
            no_followees: true,
        });
    }
    let own = st.get(u);
    let positive = followees.iter().filter(|&&v| st.get(v) > own).count();
    Ok(FolloweeStat {
        value: positive as f64 / followees.len() as f64,
        no_followees: false,
    })
}

pub fn avg_followee_status(g: &DirectedGraph, st: &StatusTable, u: NodeId) -> Result<FolloweeStat> {
    check(g, st, u)?;
    let followees = g.out_neighbors(u);
    if followees.is_empty() {
        return Ok(FolloweeStat {
            value: 0.0,
            no_followees: true,
        });
    }
    let sum: f64 = followees.iter().map(|&v| st.get(v)).sum();
    Ok(FolloweeStat {
        value: sum / followees.len() as f64,
        no_followees: false,
    })
}

/// Min-max bounds of a normalization batch, kept so later single-user
/// scoring reuses the training scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    pub fn fit(values: &[f64]) -> Result<MinMax> {
        if values.is_empty() {
            return Err(Error::Empty("normalization batch"));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(MinMax { min, max })
    }

    /// Maps into [0, 1]; out-of-batch values are clamped. A degenerate
    /// batch (min == max) maps everything to 0.
    pub fn apply(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            return 0.0;
        }
        ((x - self.min) / span).clamp(0.0, 1.0)
    }
}

pub fn normalize_batch(values: &[f64]) -> Result<(Vec<f64>, MinMax)> {
    let mm = MinMax::fit(values)?;
    Ok((values.iter().map(|&x| mm.apply(x)).collect(), mm))
}

/// Un-normalized social-status values of one user.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawStatusFeatures {
    pub status: f64,
    pub plp: f64,
    pub avg_followee_status: f64,
    pub no_followees: bool,
    pub indegree: usize,
    pub outdegree: usize,
}

pub fn raw_status_features(
    g: &DirectedGraph,
    st: &StatusTable,
    u: NodeId,
) -> Result<RawStatusFeatures> {
    let p = plp(g, st, u)?;
    let f = avg_followee_status(g, st, u)?;
    let (indegree, outdegree) = g.degrees(u)?;
    Ok(RawStatusFeatures {
        status: st.get(u),
        plp: p.value,
        avg_followee_status: f.value,
        no_followees: p.no_followees,
        indegree,
        outdegree,
    })
}

/// Emitted values: status, normalized followee status, PLP, then indegree
/// and outdegree when requested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsFeatures {
    pub status: f64,
    pub plp: f64,
    pub avg_followee_status_raw: f64,
    pub avg_followee_status_norm: f64,
}

impl SsFeatures {
    pub fn row(&self, raw: &RawStatusFeatures, include_degrees: bool) -> Vec<f64> {
        let mut v = vec![self.status, self.avg_followee_status_norm, self.plp];
        if include_degrees {
            v.push(raw.indegree as f64);
            v.push(raw.outdegree as f64);
        }
        v
    }
}

/// Status features for a batch of users. The followee-status column is
/// min-max scaled over this batch; the bounds are returned alongside.
pub fn ss_features(
    g: &DirectedGraph,
    st: &StatusTable,
    users: &[NodeId],
    include_degrees: bool,
) -> Result<(Vec<Vec<f64>>, MinMax)> {
    let raws: Vec<RawStatusFeatures> = users
        .iter()
        .map(|&u| raw_status_features(g, st, u))
        .collect::<Result<_>>()?;
    let followee: Vec<f64> = raws.iter().map(|r| r.avg_followee_status).collect();
    let (norm, mm) = normalize_batch(&followee)?;
    let rows = raws
        .iter()
        .zip(norm)
        .map(|(r, n)| {
            SsFeatures {
                status: r.status,
                plp: r.plp,
                avg_followee_status_raw: r.avg_followee_status,
                avg_followee_status_norm: n,
            }
            .row(r, include_degrees)
        })
        .collect();
    Ok((rows, mm))
}
