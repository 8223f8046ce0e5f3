//! Labelled synthetic follow networks.
//!
//! The legitimate network has a small core of popular accounts that all
//! follow each other. Every other legitimate user gets a log-normal quota of
//! follows. Each follow closes a triangle through a followee's followee with
//! `triadic_closure_prob`; otherwise it goes to a core member with the
//! user's own core share, and failing that to a target drawn by current
//! indegree or uniformly. Core members never follow back outside the core,
//! everyone else does with `legit_reciprocity`. Per-user core shares are
//! Beta distributed, so some users mostly watch the core (low status) and
//! others mostly keep mutual friends.
//!
//! Spammers then follow uniformly random legitimate users, and each target
//! follows back with `follow_back_prob`. Node IDs `0..n_legit` are
//! legitimate, the rest are spammers.
//!
//! The knob defaults are tuned so that spammer ego networks carry more
//! out-stars (021D) than the legitimate baseline while the core keeps the
//! followees of legitimate users at higher status than a spammer's random
//! targets.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::labels::{Label, LabelFile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_legit: usize,
    pub n_spam: usize,
    /// Mean out-degree of legitimate users inside the legitimate network,
    /// follow-backs included.
    pub legit_mean_out: f64,
    /// Echoed for reference. Inside a closed legitimate network the mean
    /// indegree equals the mean out-degree, so it is not a free parameter.
    pub legit_mean_in: f64,
    pub spam_mean_out: f64,
    pub follow_back_prob: f64,
    pub triadic_closure_prob: f64,
    /// Log-normal shape of the legitimate follow quotas.
    pub degree_sigma: f64,
    /// Chance that a legitimate user outside the core returns a follow from
    /// another legitimate user.
    pub legit_reciprocity: f64,
    /// Share of non-closing follows drawn by current indegree rather than
    /// uniformly.
    pub attachment_mix: f64,
    /// Fraction of legitimate users in the mutually connected core.
    pub core_fraction: f64,
    /// Mean chance that a non-closing follow goes to a core member.
    pub core_share: f64,
    /// Beta concentration of the per-user core share around `core_share`.
    /// Zero gives every user exactly `core_share`.
    pub core_share_concentration: f64,
    pub seed: u64,
    /// Multiplier on all mean degrees.
    pub scale: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_legit: 1000,
            n_spam: 1000,
            legit_mean_out: 462.0,
            legit_mean_in: 401.5,
            spam_mean_out: 866.5,
            follow_back_prob: 0.82,
            triadic_closure_prob: 0.15,
            degree_sigma: 0.9,
            legit_reciprocity: 1.0,
            attachment_mix: 0.5,
            core_fraction: 0.02,
            core_share: 0.5,
            core_share_concentration: 2.0,
            seed: 1,
            scale: 0.1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleConfig(m));
        if self.n_legit < 2 || self.n_spam < 1 {
            return bad(format!(
                "need n_legit >= 2 and n_spam >= 1, got {} and {}",
                self.n_legit, self.n_spam
            ));
        }
        for (name, p) in [
            ("follow_back_prob", self.follow_back_prob),
            ("triadic_closure_prob", self.triadic_closure_prob),
            ("legit_reciprocity", self.legit_reciprocity),
            ("attachment_mix", self.attachment_mix),
            ("core_fraction", self.core_fraction),
            ("core_share", self.core_share),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        for (name, x) in [
            ("degree_sigma", self.degree_sigma),
            ("core_share_concentration", self.core_share_concentration),
        ] {
            if !(x >= 0.0 && x.is_finite()) {
                return bad(format!("{name} must be >= 0, got {x}"));
            }
        }
        for (name, m) in [
            ("legit_mean_out", self.legit_mean_out),
            ("legit_mean_in", self.legit_mean_in),
            ("spam_mean_out", self.spam_mean_out),
        ] {
            if !(m > 0.0 && m.is_finite()) {
                return bad(format!("{name} must be positive, got {m}"));
            }
        }
        let legit_out = self.legit_mean_out * self.scale;
        if legit_out >= (self.n_legit - 1) as f64 {
            return bad(format!(
                "legitimate out-degree target {legit_out:.1} needs more than {} legitimate users",
                self.n_legit
            ));
        }
        let spam_out = self.spam_mean_out * self.scale;
        if spam_out > self.n_legit as f64 {
            return bad(format!(
                "spammer out-degree target {spam_out:.1} exceeds {} legitimate users",
                self.n_legit
            ));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n_legit + self.n_spam
    }
}

struct Builder {
    out: Vec<Vec<u32>>,
    arcs: HashSet<(u32, u32)>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            out: vec![Vec::new(); n],
            arcs: HashSet::new(),
        }
    }

    fn add(&mut self, a: u32, b: u32) -> bool {
        if a == b || !self.arcs.insert((a, b)) {
            return false;
        }
        self.out[a as usize].push(b);
        true
    }
}

pub fn generate(config: &SynthConfig) -> Result<(DirectedGraph, LabelFile)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_legit = config.n_legit;
    let n = config.node_count();
    let mut b = Builder::new(n);

    let n_core = (config.core_fraction * n_legit as f64).round() as usize;
    let mut core: Vec<u32> = rand::seq::index::sample(&mut rng, n_legit, n_core)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    core.sort_unstable();
    let mut in_core = vec![false; n_legit];
    for &c in &core {
        in_core[c as usize] = true;
    }

    // Quotas count initiated follows only; returned follows make up the
    // rest of legit_mean_out.
    let returned = config.legit_reciprocity * (1.0 - config.core_share);
    let initiated_mean = config.legit_mean_out * config.scale / (1.0 + returned);
    let mu = initiated_mean.max(1.0).ln() - config.degree_sigma.powi(2) / 2.0;
    let quota: Vec<usize> = (0..n_legit)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            ((mu + config.degree_sigma * z).exp().round() as usize).clamp(1, n_legit - 1)
        })
        .collect();
    let kappa = config.core_share_concentration;
    let shares: Vec<f64> = if kappa > 0.0 && config.core_share > 0.0 && config.core_share < 1.0 {
        let beta = Beta::new(kappa * config.core_share, kappa * (1.0 - config.core_share))
            .map_err(|e| Error::InfeasibleConfig(e.to_string()))?;
        (0..n_legit).map(|_| beta.sample(&mut rng)).collect()
    } else {
        vec![config.core_share; n_legit]
    };

    // Targets of all legitimate arcs so far; a uniform draw from it is a
    // draw proportional to current indegree.
    let mut endpoints: Vec<u32> = Vec::new();
    for &a in &core {
        for &c in &core {
            if b.add(a, c) {
                endpoints.push(c);
            }
        }
    }

    let mut order: Vec<u32> = (0..n_legit as u32).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    for &u in &order {
        let want = quota[u as usize];
        let share = shares[u as usize];
        let mut made = 0;
        let mut attempts = 0;
        while made < want && attempts < want * 20 {
            attempts += 1;
            let closing = !b.out[u as usize].is_empty() && rng.random_bool(config.triadic_closure_prob);
            let v = if closing {
                let &f = b.out[u as usize].choose(&mut rng).expect("non-empty");
                match b.out[f as usize]
                    .iter()
                    .copied()
                    .filter(|&x| (x as usize) < n_legit)
                    .collect::<Vec<_>>()
                    .choose(&mut rng)
                {
                    Some(&x) => x,
                    None => continue,
                }
            } else if !core.is_empty() && rng.random_bool(share) {
                *core.choose(&mut rng).expect("non-empty")
            } else if !endpoints.is_empty() && rng.random_bool(config.attachment_mix) {
                *endpoints.choose(&mut rng).expect("non-empty")
            } else {
                rng.random_range(0..n_legit as u32)
            };
            if !b.add(u, v) {
                continue;
            }
            made += 1;
            endpoints.push(v);
            let returns = !in_core[v as usize] || in_core[u as usize];
            if returns && rng.random_bool(config.legit_reciprocity) && b.add(v, u) {
                endpoints.push(u);
            }
        }
    }

    let spam_dist = Poisson::new(config.spam_mean_out * config.scale)
        .map_err(|e| Error::InfeasibleConfig(e.to_string()))?;
    for s in n_legit..n {
        let k = (spam_dist.sample(&mut rng) as usize).clamp(1, n_legit);
        for t in rand::seq::index::sample(&mut rng, n_legit, k) {
            let (s, t) = (s as u32, t as u32);
            b.add(s, t);
            if rng.random_bool(config.follow_back_prob) {
                b.add(t, s);
            }
        }
    }

    let mut edges: Vec<(u32, u32)> = b.arcs.into_iter().collect();
    edges.sort_unstable();
    let g = DirectedGraph::from_edges(n, edges);
    let labels = (0..n as u64)
        .map(|i| {
            let label = if (i as usize) < n_legit {
                Label::Legitimate
            } else {
                Label::Spammer
            };
            (i, label)
        })
        .collect();
    Ok((g, labels))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackStrength {
    pub value: f64,
    /// Set when the node is not labelled a spammer; the value is still valid.
    pub not_spammer: bool,
}

/// Fraction of `s`'s followees that follow `s` back. `labels` is keyed by
/// dense ID here (the synthetic generator's raw IDs are dense).
pub fn attack_strength(g: &DirectedGraph, labels: &LabelFile, s: NodeId) -> Result<AttackStrength> {
    let (_, outdeg) = g.degrees(s)?;
    if outdeg == 0 {
        return Err(Error::InvalidArgument(format!("node {s} follows nobody")));
    }
    let followed_back = g
        .out_neighbors(s)
        .iter()
        .filter(|&&v| g.has_edge(v, s))
        .count();
    Ok(AttackStrength {
        value: followed_back as f64 / outdeg as f64,
        not_spammer: labels.get(s.0 as u64) != Some(Label::Spammer),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_legit: 300,
            n_spam: 40,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = SynthConfig {
            n_legit: 100,
            n_spam: 10,
            scale: 0.05,
            seed: 7,
            ..SynthConfig::default()
        };
        let (a, la) = generate(&cfg).unwrap();
        let (b, lb) = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
    }

    #[test]
    fn labels_cover_nodes() {
        let (g, labels) = generate(&small(1)).unwrap();
        assert_eq!(labels.len(), g.node_count());
        assert_eq!(labels.with_label(Label::Spammer).len(), 40);
    }

    #[test]
    fn spammer_in_links_are_follow_backs() {
        let (g, labels) = generate(&small(2)).unwrap();
        for (raw, label) in labels.iter() {
            if label.is_spam() {
                let s = NodeId(raw as u32);
                for &f in g.in_neighbors(s) {
                    assert!(g.has_edge(s, f), "{f} follows {s} without being followed");
                }
            }
        }
    }

    #[test]
    fn spammer_outdegree_near_target() {
        let mut means = Vec::new();
        for seed in 0..10 {
            let cfg = small(seed);
            let (g, labels) = generate(&cfg).unwrap();
            let spam = labels.with_label(Label::Spammer);
            let total: usize = spam.iter().map(|&s| g.out_neighbors(NodeId(s as u32)).len()).sum();
            means.push(total as f64 / spam.len() as f64);
        }
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        let target = 866.5 * 0.1;
        assert!((mean - target).abs() <= 0.15 * target, "mean {mean}");
    }

    #[test]
    fn follow_back_fraction_near_config() {
        let (g, labels) = generate(&small(3)).unwrap();
        let mut fb = 0usize;
        let mut total = 0usize;
        for s in labels.with_label(Label::Spammer) {
            let s = NodeId(s as u32);
            total += g.out_neighbors(s).len();
            fb += g.out_neighbors(s).iter().filter(|&&v| g.has_edge(v, s)).count();
        }
        let frac = fb as f64 / total as f64;
        assert!((frac - 0.82).abs() <= 0.05, "{frac}");
    }

    #[test]
    fn attack_strength_cases() {
        // 0 follows 1..=100; 1..=82 follow back.
        let mut edges: Vec<(u32, u32)> = (1..=100).map(|v| (0, v)).collect();
        edges.extend((1..=82).map(|v| (v, 0)));
        let g = DirectedGraph::from_edges(101, edges);
        let labels: LabelFile = [(0u64, Label::Spammer)].into_iter().collect();
        let a = attack_strength(&g, &labels, NodeId(0)).unwrap();
        assert!((a.value - 0.82).abs() < 1e-15);
        assert!(!a.not_spammer);

        let g = DirectedGraph::from_edges(3, [(0, 1), (0, 2)]);
        assert_eq!(attack_strength(&g, &labels, NodeId(0)).unwrap().value, 0.0);
        let g = DirectedGraph::from_edges(3, [(0, 1), (0, 2), (1, 0), (2, 0)]);
        assert_eq!(attack_strength(&g, &labels, NodeId(0)).unwrap().value, 1.0);
        assert!(attack_strength(&g, &labels, NodeId(1)).unwrap().not_spammer);

        let g = DirectedGraph::from_edges(2, [(1, 0)]);
        assert!(attack_strength(&g, &labels, NodeId(0)).is_err());
    }

    #[test]
    fn infeasible_configs() {
        let base = SynthConfig::default();
        for cfg in [
            SynthConfig { n_legit: 10, ..base.clone() },
            SynthConfig { follow_back_prob: 1.5, ..base.clone() },
            SynthConfig { scale: 0.0, ..base.clone() },
            SynthConfig { n_spam: 0, ..base.clone() },
        ] {
            assert!(matches!(generate(&cfg), Err(Error::InfeasibleConfig(_))));
        }
    }

    fn legit_subgraph(g: &DirectedGraph, n_legit: usize) -> DirectedGraph {
        let members: Vec<NodeId> = (0..n_legit as u32).map(NodeId).collect();
        g.induced_subgraph(&members)
    }

    #[test]
    fn legit_network_has_triadic_closure() {
        use crate::triad::{census, TriadClass};
        use rand::seq::SliceRandom;

        let cfg = SynthConfig {
            n_legit: 400,
            n_spam: 50,
            seed: 5,
            ..SynthConfig::default()
        };
        let (g, _) = generate(&cfg).unwrap();
        let legit = legit_subgraph(&g, cfg.n_legit);
        let closed = |c: &crate::triad::TriadCensus| c.get(TriadClass::T030T) + c.get(TriadClass::T300);

        // Degree-matched rewiring that also keeps each node's mutual degree:
        // mutual pairs are rewired as undirected stubs, one-way arcs by
        // shuffling their heads.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut stubs = Vec::new();
        let (mut tails, mut heads) = (Vec::new(), Vec::new());
        for (a, b) in legit.edges() {
            if legit.has_edge(b, a) {
                if a < b {
                    stubs.extend([a.0, b.0]);
                }
            } else {
                tails.push(a.0);
                heads.push(b.0);
            }
        }
        stubs.shuffle(&mut rng);
        heads.shuffle(&mut rng);
        let mut arcs: Vec<(u32, u32)> = tails.into_iter().zip(heads).collect();
        for p in stubs.chunks(2) {
            arcs.extend([(p[0], p[1]), (p[1], p[0])]);
        }
        let rewired = DirectedGraph::from_edges(cfg.n_legit, arcs.into_iter().filter(|(a, b)| a != b));

        let real = closed(&census(&legit));
        let random = closed(&census(&rewired));
        assert!(real > random, "closed triads {real} vs rewired {random}");
    }

    #[test]
    fn full_reciprocity_without_core_makes_every_legit_link_mutual() {
        let cfg = SynthConfig {
            n_legit: 200,
            n_spam: 20,
            scale: 0.05,
            core_fraction: 0.0,
            legit_reciprocity: 1.0,
            ..SynthConfig::default()
        };
        let (g, _) = generate(&cfg).unwrap();
        let legit = legit_subgraph(&g, cfg.n_legit);
        assert!(legit.edge_count() > 0);
        for (a, b) in legit.edges() {
            assert!(legit.has_edge(b, a), "{a}->{b} not returned");
        }
    }

    #[test]
    fn core_members_follow_each_other_and_attract_unreturned_follows() {
        let cfg = SynthConfig {
            n_legit: 500,
            n_spam: 10,
            core_fraction: 0.02,
            ..SynthConfig::default()
        };
        let (g, _) = generate(&cfg).unwrap();
        let legit = legit_subgraph(&g, cfg.n_legit);
        let unreturned = |a: NodeId| legit.in_neighbors(a).iter().filter(|&&f| !legit.has_edge(a, f)).count();
        let mut by_fans: Vec<NodeId> = legit.nodes().collect();
        by_fans.sort_by_key(|&u| std::cmp::Reverse(unreturned(u)));
        let core = &by_fans[..10];
        for &a in core {
            for &c in core {
                assert!(a == c || legit.has_edge(a, c), "core {a} does not follow {c}");
            }
        }
        // Outside the core every follow is returned.
        assert_eq!(unreturned(by_fans[10]), 0);
    }

    #[test]
    fn legit_outdegree_near_target() {
        let cfg = SynthConfig {
            n_spam: 10,
            seed: 4,
            ..SynthConfig::default()
        };
        let (g, _) = generate(&cfg).unwrap();
        let legit = legit_subgraph(&g, cfg.n_legit);
        let mean = legit.edge_count() as f64 / cfg.n_legit as f64;
        let target = cfg.legit_mean_out * cfg.scale;
        assert!((mean - target).abs() <= 0.25 * target, "mean {mean} target {target}");
    }

    #[test]
    fn shares_without_spread_are_fixed() {
        let cfg = SynthConfig {
            n_legit: 100,
            n_spam: 10,
            scale: 0.05,
            core_share_concentration: 0.0,
            ..SynthConfig::default()
        };
        let (a, _) = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap().0);
        let bad = SynthConfig {
            core_share: 1.2,
            ..cfg
        };
        assert!(matches!(generate(&bad), Err(Error::InfeasibleConfig(_))));
    }
}
