//! Runs the detection pipeline on synthetic networks for a range of seeds
//! and prints the per-seed figures: spammer triad Z-scores, status means,
//! information-gain ranking and, unless `STUDY_FAST` is set, cross-validated
//! rates and AUCs for each feature set.
//!
//! cargo run --release -p followspam --example synthetic_study -- [seeds] [config-json]

use std::time::Instant;

use followspam::classifier::{
    cross_validate, rank_features, Algo, FeatureMode, FeatureRow, FeatureSchema, FeatureTable, ForestParams,
};
use followspam::features::baseline_sample;
use followspam::metrics::{per_class_rates, roc_auc};
use followspam::status::{build_status_table, ss_features};
use followspam::synth::{generate, SynthConfig};
use followspam::tsp::{compute_baseline, ego_census, tsp_from_census, zscores};
use followspam::{IdTable, NodeId, TriadCensus, TriadClass};

fn evaluate(t: &FeatureTable, seed: u64) -> (f64, f64, f64, f64) {
    let params = ForestParams {
        seed,
        ..ForestParams::default()
    };
    let r = cross_validate(t, 10, Algo::Forest(params), seed).unwrap();
    let truth: Vec<bool> = t.rows.iter().map(|r| r.label.is_spam()).collect();
    let auc = roc_auc(&r.scores, &truth).unwrap().auc;
    let rates = per_class_rates(&r.pooled).unwrap();
    (auc, r.pooled.accuracy(), rates.spammer_tp_rate, rates.legit_fp_rate)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mut config = serde_json::to_value(SynthConfig::default()).unwrap();
    if let Some(s) = args.get(2) {
        let overrides: serde_json::Value = serde_json::from_str(s).expect("config JSON");
        for (k, v) in overrides.as_object().expect("JSON object") {
            config[k] = v.clone();
        }
    }
    let fast = std::env::var("STUDY_FAST").is_ok();
    let verbose = std::env::var("STUDY_VERBOSE").is_ok();

    for seed in 1..=seeds {
        let t0 = Instant::now();
        config["seed"] = seed.into();
        let cfg: SynthConfig = serde_json::from_value(config.clone()).unwrap();
        let (g, labels) = generate(&cfg).unwrap();
        let ids = IdTable::identity(g.node_count());
        let users: Vec<NodeId> = g.nodes().collect();
        let spam: Vec<bool> = users.iter().map(|u| labels.get(u.0 as u64).unwrap().is_spam()).collect();
        let censuses: Vec<TriadCensus> = users.iter().map(|&u| ego_census(&g, u, None).unwrap()).collect();
        let sample = baseline_sample(&ids, &labels, 1000, seed).unwrap();
        let picked: Vec<TriadCensus> = sample.iter().map(|u| censuses[u.index()]).collect();
        let b = compute_baseline(&picked).unwrap();

        let st = build_status_table(&g.degree_table());
        let (ss, _) = ss_features(&g, &st, &users, true).unwrap();
        let rows: Vec<FeatureRow> = users
            .iter()
            .map(|&u| {
                let mut values = tsp_from_census(&censuses[u.index()], &b).tsp.to_vec();
                values.extend(&ss[u.index()]);
                FeatureRow {
                    user: u.0 as u64,
                    values,
                    label: labels.get(u.0 as u64).unwrap(),
                }
            })
            .collect();
        let t = FeatureTable::new(FeatureSchema::new(FeatureMode::Cascaded), rows, None).unwrap();

        // Class means: [legit, spam].
        let mut n = [0.0f64; 2];
        let mut z = [[0.0f64; 13]; 2];
        let mut counts = [[0.0f64; 16]; 2];
        let mut feat = [[0.0f64; 5]; 2];
        for (i, c) in censuses.iter().enumerate() {
            let k = spam[i] as usize;
            n[k] += 1.0;
            for (j, v) in zscores(c, &b).iter().enumerate() {
                z[k][j] += v;
            }
            for (j, cl) in TriadClass::ALL.iter().enumerate() {
                counts[k][j] += c.get(*cl) as f64;
            }
            for (f, v) in feat[k].iter_mut().zip(&t.rows[i].values[13..]) {
                *f += v;
            }
        }
        let zi = |c: TriadClass| TriadClass::FEATURES.iter().position(|&f| f == c).unwrap();
        let zm = |k: usize, c: TriadClass| z[k][zi(c)] / n[k];
        if verbose {
            for (j, cl) in TriadClass::ALL.iter().enumerate() {
                println!("  {:>5} spam {:>12.1} legit {:>12.1}", cl.label(), counts[1][j] / n[1], counts[0][j] / n[0]);
            }
            for (j, name) in ["status", "followee", "plp", "in", "out"].iter().enumerate() {
                println!("  {name:>8} spam {:>10.4} legit {:>10.4}", feat[1][j] / n[1], feat[0][j] / n[0]);
            }
        }

        let ranked = rank_features(&t).unwrap();
        let rank021d = ranked.iter().position(|r| r.name == "021D").unwrap() + 1;
        let top: Vec<String> = ranked
            .iter()
            .take(if verbose { 18 } else { 5 })
            .map(|r| format!("{}:{:.3}", r.name, r.gain))
            .collect();
        let c4 = zm(1, TriadClass::T021D) > 0.0
            && [TriadClass::T201, TriadClass::T210, TriadClass::T300].iter().all(|&c| zm(1, c) < 0.0);
        let c5 = feat[1][0] / n[1] < feat[0][0] / n[0] && feat[1][1] / n[1] < feat[0][1] / n[0];
        println!(
            "seed {seed} | z 021D {:+.3} 201 {:+.3} 210 {:+.3} 300 {:+.3} | status {:.3}/{:.3} fol {:.4}/{:.4} | c4 {c4} c5 {c5} rank021D {rank021d} {}",
            zm(1, TriadClass::T021D),
            zm(1, TriadClass::T201),
            zm(1, TriadClass::T210),
            zm(1, TriadClass::T300),
            feat[1][0] / n[1],
            feat[0][0] / n[0],
            feat[1][1] / n[1],
            feat[0][1] / n[0],
            top.join(" "),
        );
        if fast {
            continue;
        }
        let (auc_c, acc_c, tp_c, fp_c) = evaluate(&t, seed);
        let (auc_t, acc_t, _, _) = evaluate(&t.project(FeatureMode::TspDeg).unwrap(), seed);
        let (auc_s, _, _, _) = evaluate(&t.project(FeatureMode::SsDeg).unwrap(), seed);
        let (_, acc_d, _, _) = evaluate(&t.project(FeatureMode::DegreeOnly).unwrap(), seed);
        println!(
            "    cascaded tp {tp_c:.3} fp {fp_c:.3} auc {auc_c:.4} acc {acc_c:.4} | tsp+deg auc {auc_t:.4} acc {acc_t:.4} | ss+deg auc {auc_s:.4} | degree acc {acc_d:.4} | c6 {} c7 {} | {:.1}s",
            tp_c >= 0.9 && fp_c <= 0.1,
            auc_c >= auc_t && auc_c >= auc_s && acc_t > acc_d,
            t0.elapsed().as_secs_f64()
        );
    }
}
