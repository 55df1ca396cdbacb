//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs under `cargo test`.

use std::process::Command;
use std::time::{Duration, Instant};

use expander_core::experiment::{
    ols_oracle_comparison, recovery_error, run_dantzig_experiment, run_lasso_experiment, run_recovery_experiment,
    Estimator, ExperimentReport, LambdaPolicy, RecoveryInstance, TargetKind, TargetSpec,
};
use expander_core::field::FieldSpec;
use expander_core::graph::{pv_expander, random_left_regular, Provenance};
use expander_core::nalgebra::DMatrix;
use expander_core::noise::{empirical_noise_bound, thresholds, NoiseModel};
use expander_core::rng::Rng;
use expander_core::solve::{dantzig, lasso, lp_solve, soft_threshold, LinearProgram, LpOutcome};
use expander_core::verify::{
    check_expansion_exhaustive, check_expansion_sampled, check_rip1_sampled, check_up2_sampled,
    nullspace_property_oracle, search_random_expander, subset_count, ExpansionCertificate,
};
use expander_core::{BipartiteGraph, DesignMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

/// The certified (4, 1/8) instance used by criteria 4-7 and 9.
fn certified_graph() -> BipartiteGraph {
    pv_expander(&FieldSpec::from_order(8).unwrap(), 2, 2, 3).unwrap()
}

fn instance(estimator: Estimator, multiple: f64) -> RecoveryInstance {
    let g = certified_graph();
    let n = g.n();
    RecoveryInstance::new(
        g,
        TargetSpec {
            kind: TargetKind::ExactSparse,
            s: 2,
        },
        NoiseModel::iid(n, 1.0),
        LambdaPolicy { estimator, multiple },
        2024,
    )
    .unwrap()
}

fn event_clean(r: &ExperimentReport, names: &[&str]) -> (bool, String) {
    let mut ok = r.event_ok && r.solver_failures == 0;
    let mut parts = vec![format!(
        "events {}/{} (bound {:.5} - 3SE)",
        (r.event_frequency * r.trials as f64).round(),
        r.trials,
        r.event_bound
    )];
    for name in names {
        match r.check(name) {
            Some(c) => {
                ok &= c.event_violations == 0 && c.event_trials > 0;
                parts.push(format!(
                    "{name}: {} violations, min slack {:.4e}",
                    c.event_violations,
                    c.min_event_slack.unwrap_or(f64::NAN)
                ));
            }
            None => {
                ok = false;
                parts.push(format!("{name}: missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn c1_expansion_oracle() -> Outcome {
    let (mut compared, mut disagreements) = (0, 0);
    for k in 0..100u64 {
        let mut rng = Rng::for_trial(1, k);
        let p = 2 + rng.below(11) as usize;
        let n = 1 + rng.below(10) as usize;
        let d = 1 + rng.below(n.min(4) as u64) as usize;
        let s = 1 + rng.below(3) as usize;
        let g = random_left_regular(p, d, n, k).unwrap();
        let trials = 1000;
        let ex = check_expansion_exhaustive(&g, s, 0.125).unwrap();
        let sa = check_expansion_sampled(&g, s, 0.125, trials, k).unwrap();
        if trials as u128 >= subset_count(p, s) {
            compared += 1;
            if sa.ok && !ex.ok {
                disagreements += 1;
            }
        }
    }
    outcome(
        disagreements == 0 && compared > 0,
        format!("{compared} graphs with trials >= subsets, {disagreements} false passes"),
    )
}

fn c2_construction() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |m: &str, file: &str| {
        let path = dir.path().join(file);
        let status = Command::new(env!("CARGO_BIN_EXE_expander"))
            .args(["construct", "pv", "--q", "3", "--l", "2", "--m", m, "--h", "2", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        BipartiteGraph::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
    };
    let g2 = run("2", "m2.json");
    let g1 = run("1", "m1.json");
    // f = x has digits (0, 1): left index 3; f = x + 1: left index 4
    let f_x_y1 = g2.neighbors(3)[1];
    let ok = f_x_y1 == 14 && g1.neighbors(4) == [1, 5, 6] && g2.neighbors(0) == [0, 9, 18];
    outcome(
        ok,
        format!(
            "f=x,y=1 -> {f_x_y1}; m=1 f=x+1 -> {:?}; provenance {}",
            g1.neighbors(4),
            g2.provenance()
        ),
    )
}

fn c3_certified_random() -> Outcome {
    let seeds = 400;
    let found = search_random_expander(64, 8, 40..=64, seeds, 0, 4, 0.125).unwrap();
    let Some(g) = found else {
        let best = (40..=64)
            .map(|n| check_expansion_exhaustive(&random_left_regular(64, 8, n, 0).unwrap(), 4, 0.125).unwrap())
            .map(|r| r.worst_ratio)
            .fold(0.0, f64::max);
        return outcome(
            false,
            format!(
                "none of {} graphs random_left_regular(64, 8, n in 40..=64) passes (4, 1/8); \
                 best worst-ratio over seed 0 is {best:.4} < 0.875",
                25 * seeds
            ),
        );
    };
    let x = DesignMatrix::from_graph(&g);
    let ex = check_expansion_exhaustive(&g, 4, 0.125).unwrap();
    let rip = check_rip1_sampled(&x, 4, 0.125, 10_000, 0).unwrap();
    let up2 = check_up2_sampled(&x, 4, 10_000, 0).unwrap();
    outcome(
        ex.ok && rip.ok && rip.worst_ratio >= 0.75 && up2.ok,
        format!(
            "{}: rip1 worst {:.4}, up2 ok {}",
            g.provenance(),
            rip.worst_ratio,
            up2.ok
        ),
    )
}

fn c4_recovery() -> Outcome {
    let g = certified_graph();
    let cert = ExpansionCertificate::issue(&g, 4, 0.125).unwrap();
    let r = run_recovery_experiment(&g, &cert, 2, 100, 7).unwrap();
    outcome(
        r.pass && r.recovered == 100 && r.max_relative_error <= 1e-6,
        format!(
            "{} ({} subsets, worst ratio {}): {}/100 recovered, max rel err {:.2e}",
            g.provenance(),
            cert.report.trials,
            cert.report.worst_ratio,
            r.recovered,
            r.max_relative_error
        ),
    )
}

fn c5_lasso_oracle() -> Outcome {
    let r = run_lasso_experiment(&instance(Estimator::Lasso, 6.0), 200).unwrap();
    let (ok, detail) = event_clean(&r, &["lasso_oracle", "lasso_prediction"]);
    let rhs100 = 24.0 * 2f64.sqrt() * (100.0 * 100f64.ln()).sqrt();
    outcome(
        ok && close(rhs100, 728.4, 1e-4),
        format!("n={} {detail}; RHS(n=100) = {rhs100:.1}", r.n),
    )
}

fn c6_lasso_selection() -> Outcome {
    let r = run_lasso_experiment(&instance(Estimator::Lasso, 7.0), 200).unwrap();
    let (ok, detail) = event_clean(&r, &["lasso_selection"]);
    let rhs100 = 392.0 * 2f64.sqrt() * 100.0 * 100f64.ln().sqrt();
    outcome(
        ok && close(rhs100, 1.1897e5, 1e-4),
        format!("{detail}; RHS(n=100) = {rhs100:.5e}"),
    )
}

fn c7_dantzig() -> Outcome {
    let r = run_dantzig_experiment(&instance(Estimator::Dantzig, 1.0), 200).unwrap();
    let (ok, detail) = event_clean(&r, &["dantzig_prediction", "dantzig_selection", "target_feasible"]);
    let big = thresholds(1.0, 100, 1.0).unwrap().lambda;
    let (pred100, sel100) = (8.0 * 2.0 * big * 10.0, 32.0 * 2.0 * big * 100.0);
    outcome(
        ok && close(pred100, 686.7, 1e-4) && close(sel100, 2.7469e4, 1e-4),
        format!("{detail}; RHS(n=100) = {pred100:.1}, {sel100:.5e}"),
    )
}

fn c8_noise() -> Outcome {
    let x = DesignMatrix::from_graph(&random_left_regular(128, 8, 100, 3).unwrap());
    let th = thresholds(1.0, 100, 1.0).unwrap();
    let mut ok = close(th.eta, 1.8590e-3, 1e-4);
    let mut parts = vec![format!("eta_100 = {:.4e}", th.eta)];
    for (name, model) in [
        ("iid", NoiseModel::iid(100, 1.0)),
        ("ar1(0.5)", NoiseModel::ar1(100, 1.0, 0.5)),
    ] {
        let r = empirical_noise_bound(&x, &model, 1.0, 10_000, 11).unwrap();
        ok &= r.pass && r.non_amplification_violations == 0;
        parts.push(format!(
            "{name}: freq {:.4} vs {:.5} - 3SE, amplified {}",
            r.frequency, r.bound, r.non_amplification_violations
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c9_ols_oracle() -> Outcome {
    let r = ols_oracle_comparison(&instance(Estimator::Lasso, 6.0), 10_000).unwrap();
    outcome(
        r.within_tolerance,
        format!(
            "mean {:.5e} vs sigma^2 s/n = {:.5e} (dev {:.2}%); lasso/oracle ratio {:.3}",
            r.mean_ols_error,
            r.expected,
            100.0 * r.relative_deviation,
            r.estimator_ratio
        ),
    )
}

/// Solves `B x = b` by Gaussian elimination with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..m {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..m).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum of `c^T x` over the vertices of `{Ax = b, x >= 0}`.
fn vertex_enumeration(c: &[f64], a: &DMatrix<f64>, b: &[f64]) -> Option<f64> {
    let (m, nv) = a.shape();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << nv) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let cols: Vec<usize> = (0..nv).filter(|j| mask >> j & 1 == 1).collect();
        let rows = (0..m).map(|r| cols.iter().map(|&j| a[(r, j)]).collect()).collect();
        if let Some(xb) = gauss_solve(rows, b.to_vec()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let val: f64 = cols.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(val, |bv: f64| bv.min(val)));
            }
        }
    }
    best
}

fn c10_lp_core() -> Outcome {
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for k in 0..50u64 {
        let mut rng = Rng::for_trial(10, k);
        let nv = 2 + rng.below(5) as usize;
        let m = 1 + rng.below((nv - 1).min(3) as u64) as usize;
        // last row sum(x) = const keeps the feasible set bounded
        let x0: Vec<f64> = (0..nv).map(|_| rng.uniform_range(0.0, 2.0)).collect();
        let a = DMatrix::from_fn(m, nv, |r, _| if r == m - 1 { 1.0 } else { 0.0 })
            + DMatrix::from_fn(
                m,
                nv,
                |r, _| if r == m - 1 { 0.0 } else { rng.uniform_range(-2.0, 2.0) },
            );
        let b: Vec<f64> = (0..m).map(|r| (0..nv).map(|j| a[(r, j)] * x0[j]).sum()).collect();
        let c: Vec<f64> = (0..nv).map(|_| rng.uniform_range(-3.0, 3.0)).collect();
        let oracle = vertex_enumeration(&c, &a, &b);
        let simplex = match lp_solve(&LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap()).unwrap() {
            LpOutcome::Optimal(s) => Some(s.objective),
            _ => None,
        };
        match (oracle, simplex) {
            (Some(o), Some(s)) => {
                let diff = (o - s).abs();
                worst = worst.max(diff);
                mismatches += (diff > 1e-9) as u32;
            }
            _ => mismatches += 1,
        }
    }
    outcome(
        mismatches == 0,
        format!("50 LPs, max |simplex - vertices| = {worst:.2e}"),
    )
}

fn c11_closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let mut rng = Rng::for_trial(11, k);
        let p = 1 + rng.below(8) as usize;
        let y: Vec<f64> = (0..p).map(|_| rng.uniform_range(-5.0, 5.0)).collect();
        let lambda = rng.uniform_range(0.0, 4.0);
        let eye = DMatrix::<f64>::identity(p, p);
        let l = lasso(&eye, &y, lambda).unwrap();
        let d = dantzig(&eye, &y, lambda).unwrap();
        for j in 0..p {
            worst = worst.max((l.beta[j] - soft_threshold(y[j], lambda / 2.0)).abs());
            worst = worst.max((d.beta[j] - soft_threshold(y[j], lambda)).abs());
        }
    }
    outcome(worst <= 1e-8, format!("100 pairs, max deviation {worst:.2e}"))
}

fn all_sparse_targets(p: usize, s: usize, mut f: impl FnMut(&[f64])) {
    let mut rng = Rng::new(12);
    let mut support: Vec<usize> = (0..s).collect();
    loop {
        for signs in 0..(1u32 << s) {
            let mut beta = vec![0.0; p];
            for (k, &i) in support.iter().enumerate() {
                let sign = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                beta[i] = sign * rng.uniform_range(1.0, 2.0);
            }
            f(&beta);
        }
        // next combination
        let mut i = s;
        while i > 0 && support[i - 1] == p - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        support[i - 1] += 1;
        for j in i..s {
            support[j] = support[j - 1] + 1;
        }
    }
}

fn c12_nsp_consistency() -> Outcome {
    let (mut passing, mut failures) = (0, 0);
    for k in 0..40u64 {
        let mut rng = Rng::for_trial(12, k);
        let p = 3 + rng.below(8) as usize;
        let n = 2 + rng.below(9) as usize;
        let d = 1 + rng.below(n.min(3) as u64) as usize;
        let x = DesignMatrix::from_graph(&random_left_regular(p, d, n, k).unwrap());
        for s in 1..=2usize.min(p) {
            if nullspace_property_oracle(&x, s).unwrap().ok {
                passing += 1;
                all_sparse_targets(p, s, |beta| {
                    if recovery_error(&x, beta).map_or(true, |e| e > 1e-6) {
                        failures += 1;
                    }
                });
            }
        }
    }
    let mut dup_fail = true;
    for p in 2..=6 {
        let mut lists: Vec<Vec<usize>> = (0..p).map(|i| vec![i]).collect();
        lists.push(vec![0]);
        let g = BipartiteGraph::new(p, 1, lists, Provenance::Explicit).unwrap();
        dup_fail &= !nullspace_property_oracle(&DesignMatrix::from_graph(&g), 1).unwrap().ok;
    }
    outcome(
        failures == 0 && passing > 0 && dup_fail,
        format!("{passing} passing (instance, s) pairs, {failures} recovery failures; duplicate columns fail at s=1: {dup_fail}"),
    )
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        (1, "expansion oracle equivalence", 10, c1_expansion_oracle),
        (2, "deterministic construction", 1, c2_construction),
        (3, "certified random instance", 120, c3_certified_random),
        (4, "exact recovery", 30, c4_recovery),
        (5, "lasso oracle inequality", 120, c5_lasso_oracle),
        (6, "lasso selection bound", 120, c6_lasso_selection),
        (7, "dantzig bounds", 180, c7_dantzig),
        (8, "noise bounds", 30, c8_noise),
        (9, "OLS oracle", 60, c9_ols_oracle),
        (10, "LP core vs vertex enumeration", 60, c10_lp_core),
        (11, "solver closed forms", 60, c11_closed_forms),
        (12, "NSP oracle consistency", 60, c12_nsp_consistency),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let pass = out.pass && in_time;
        println!(
            "criterion {id:>2} {name}: {} ({:.2}s, limit {limit}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: {} failing criteria: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
