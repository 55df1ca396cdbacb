use expander_core::nalgebra::DMatrix;
use expander_core::rng::Rng;
use expander_core::solve::{basis_pursuit, dantzig, lasso, lp_solve, LinearProgram, LpOutcome};
use expander_core::Design;
use proptest::prelude::*;

fn dense(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = Rng::new(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

#[test]
fn dantzig_is_zero_above_the_correlation() {
    let x = dense(12, 6, 1);
    let y = Rng::new(2).normal_vec(12);
    let max = x
        .transpose_matvec(&y)
        .unwrap()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let sol = dantzig(&x, &y, max * 1.01).unwrap();
    assert!(sol.beta.iter().all(|b| *b == 0.0));
    let tight = dantzig(&x, &y, max * 0.5).unwrap();
    assert!(tight.objective > 0.0 && tight.slack <= max * 0.5 * (1.0 + 1e-7));
}

#[test]
fn lasso_matches_dantzig_at_zero_penalty_on_full_rank() {
    let x = dense(15, 4, 3);
    let y = Rng::new(4).normal_vec(15);
    let l = lasso(&x, &y, 0.0).unwrap();
    let d = dantzig(&x, &y, 0.0).unwrap();
    for (a, b) in l.beta.iter().zip(&d.beta) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn infeasible_and_unbounded_programs() {
    // x0 + x1 = -1 with x >= 0
    let lp = LinearProgram::new(vec![1.0, 1.0], DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), vec![-1.0]).unwrap();
    assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Infeasible);
    // min -x0 s.t. x0 - x1 = 0
    let lp = LinearProgram::new(vec![-1.0, 0.0], DMatrix::from_row_slice(1, 2, &[1.0, -1.0]), vec![0.0]).unwrap();
    assert_eq!(lp_solve(&lp).unwrap(), LpOutcome::Unbounded);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lp_solution_is_feasible_and_beats_a_known_point(seed in 0u64..10_000, m in 1usize..5, extra in 1usize..5) {
        let nv = m + extra;
        let mut rng = Rng::new(seed);
        let a = DMatrix::from_fn(m, nv, |_, _| rng.uniform_range(-1.0, 1.0));
        let x0: Vec<f64> = (0..nv).map(|_| rng.uniform()).collect();
        let b: Vec<f64> = (0..m).map(|r| (0..nv).map(|j| a[(r, j)] * x0[j]).sum()).collect();
        let cost: Vec<f64> = (0..nv).map(|_| rng.uniform_range(0.0, 1.0)).collect();
        let lp = LinearProgram::new(cost, a.clone(), b.clone()).unwrap();
        let sol = lp_solve(&lp).unwrap();
        let LpOutcome::Optimal(sol) = sol else { panic!("bounded feasible LP reported {sol:?}") };
        prop_assert!(sol.x.iter().all(|v| *v >= -1e-9));
        for r in 0..m {
            let lhs: f64 = (0..nv).map(|j| a[(r, j)] * sol.x[j]).sum();
            prop_assert!((lhs - b[r]).abs() < 1e-7);
        }
        prop_assert!(sol.objective <= lp.objective(&x0) + 1e-9);
    }

    #[test]
    fn basis_pursuit_is_no_larger_than_the_truth(seed in 0u64..10_000) {
        let x = dense(6, 10, seed);
        let mut rng = Rng::new(seed ^ 0xff);
        let beta: Vec<f64> = (0..10).map(|_| rng.normal()).collect();
        let y = x.matvec(&beta).unwrap();
        let hat = basis_pursuit(&x, &y).unwrap();
        let fit = x.matvec(&hat).unwrap();
        prop_assert!(fit.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-6));
        let l1 = |v: &[f64]| v.iter().map(|a| a.abs()).sum::<f64>();
        prop_assert!(l1(&hat) <= l1(&beta) + 1e-7);
    }
}
