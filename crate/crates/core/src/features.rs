//! Assembles feature tables from a graph, its labels and a triad baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{FeatureMode, FeatureRow, FeatureSchema, FeatureTable, ModelFile};
use crate::ego::EgoCap;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, IdTable, NodeId};
use crate::labels::{Label, LabelFile};
use crate::status::{build_status_table, raw_status_features, MinMax, StatusTable};
use crate::tsp::{compute_baseline, ego_census, tsp_from_census, TriadBaseline};

/// Default number of legitimate users behind a baseline.
pub const DEFAULT_BASELINE_SAMPLE: usize = 1000;

fn labeled_nodes(ids: &IdTable, labels: &LabelFile, only: Option<Label>) -> Result<Vec<(u64, NodeId, Label)>> {
    labels
        .iter()
        .filter(|&(_, l)| only.is_none_or(|o| o == l))
        .map(|(raw, l)| Ok((raw, ids.dense_or_err(raw)?, l)))
        .collect()
}

/// The seeded uniform sample of at most `sample` labeled legitimate users
/// a baseline is computed from, in ascending node order.
pub fn baseline_sample(ids: &IdTable, labels: &LabelFile, sample: usize, seed: u64) -> Result<Vec<NodeId>> {
    let legit = labeled_nodes(ids, labels, Some(Label::Legitimate))?;
    if legit.len() < 2 || sample < 2 {
        return Err(Error::InvalidArgument(format!(
            "baseline needs at least 2 legitimate users, have {} (sample {sample})",
            legit.len()
        )));
    }
    let k = sample.min(legit.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<NodeId> = rand::seq::index::sample(&mut rng, legit.len(), k)
        .into_iter()
        .map(|i| legit[i].1)
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

pub fn build_baseline(
    g: &DirectedGraph,
    ids: &IdTable,
    labels: &LabelFile,
    sample: usize,
    seed: u64,
    cap: Option<EgoCap>,
) -> Result<TriadBaseline> {
    let picked = baseline_sample(ids, labels, sample, seed)?;
    let censuses = picked
        .par_iter()
        .map(|&u| ego_census(g, u, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut b = compute_baseline(&censuses)?;
    b.cap = cap;
    Ok(b)
}

/// One row per labeled user, ordered by raw ID. `baseline` is required for
/// modes with triad columns.
pub fn extract_features(
    g: &DirectedGraph,
    ids: &IdTable,
    labels: &LabelFile,
    baseline: Option<&TriadBaseline>,
    mode: FeatureMode,
) -> Result<FeatureTable> {
    let users = labeled_nodes(ids, labels, None)?;
    if users.is_empty() {
        return Err(Error::Empty("labeled users"));
    }
    let tsp: Vec<Vec<f64>> = if mode.uses_tsp() {
        let b = baseline.ok_or_else(|| Error::InvalidArgument(format!("{mode} features need a baseline")))?;
        users
            .par_iter()
            .map(|&(_, u, _)| Ok(tsp_from_census(&ego_census(g, u, b.cap)?, b).tsp.to_vec()))
            .collect::<Result<_>>()?
    } else {
        vec![Vec::new(); users.len()]
    };

    let st = build_status_table(&g.degree_table());
    let raws = users
        .iter()
        .map(|&(_, u, _)| raw_status_features(g, &st, u))
        .collect::<Result<Vec<_>>>()?;
    let norm = if mode.uses_status() {
        let followee: Vec<f64> = raws.iter().map(|r| r.avg_followee_status).collect();
        Some(MinMax::fit(&followee)?)
    } else {
        None
    };

    let rows = users
        .iter()
        .zip(tsp)
        .zip(&raws)
        .map(|((&(raw, _, label), mut values), r)| {
            if let Some(mm) = norm {
                values.extend([r.status, mm.apply(r.avg_followee_status), r.plp]);
            }
            if mode.uses_degrees() {
                values.extend([r.indegree as f64, r.outdegree as f64]);
            }
            FeatureRow {
                user: raw,
                values,
                label,
            }
        })
        .collect();
    FeatureTable::new(FeatureSchema::new(mode), rows, norm)
}

/// Feature values for a single user, laid out as `model` expects and using
/// its stored followee-status scale.
pub fn score_features(
    g: &DirectedGraph,
    st: &StatusTable,
    u: NodeId,
    model: &ModelFile,
    baseline: Option<&TriadBaseline>,
) -> Result<Vec<f64>> {
    let mode = model.schema.mode;
    let mut values = Vec::with_capacity(model.schema.width());
    if mode.uses_tsp() {
        let b = baseline
            .or(model.baseline.as_ref())
            .ok_or_else(|| Error::InvalidArgument(format!("{mode} model needs a baseline")))?;
        values.extend(tsp_from_census(&ego_census(g, u, b.cap)?, b).tsp);
    }
    let r = raw_status_features(g, st, u)?;
    if mode.uses_status() {
        let mm = model
            .followee_norm
            .ok_or_else(|| Error::SchemaMismatch("model lacks followee-status normalization".into()))?;
        values.extend([r.status, mm.apply(r.avg_followee_status), r.plp]);
    }
    if mode.uses_degrees() {
        values.extend([r.indegree as f64, r.outdegree as f64]);
    }
    Ok(values)
}
