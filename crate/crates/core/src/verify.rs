//! Certificates and falsification tests for the design conditions.
//!
//! Exhaustive subset enumeration on the graph is the ground truth for
//! expansion. Vector-side checks (RIP-1, UP2, kernel concentration) draw
//! random vectors and can only refute. Sampling distributions:
//!
//! - expansion: nonempty subsets of size `<= s`, uniform over all of them;
//!   when the request covers the whole subset space, every subset is visited
//!   once in shuffled order.
//! - RIP-1: uniform support of size `s`, entries `±U[1, 2]`.
//! - UP2 and the H-condition: i.i.d. standard normal dense vectors.
//! - kernel: standard normal combinations of an orthonormal kernel basis.
//!
//! Sample `t` always comes from the stream `Rng::for_trial(seed, t)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::design::Design;
use crate::error::{capacity, domain, Result};
use crate::graph::BipartiteGraph;
use crate::rng::Rng;
use crate::solve::{lp_solve, LinearProgram, LpOutcome};
use crate::vecops::{norm1, norm2, split_l1, top_s};

/// Default enumeration budget for exhaustive expansion checks.
pub const DEFAULT_SUBSET_BUDGET: u64 = 10_000_000;
/// Budget on `C(p, s) * 2^s` linear programs for the nullspace oracle.
pub const NSP_LP_BUDGET: u64 = 10_000;
/// Strictness margin for the nullspace property.
pub const NSP_MARGIN: f64 = 1e-9;
/// Relative kernel tolerance on singular values.
pub const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Subset(Vec<usize>),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub condition: String,
    pub ok: bool,
    /// Worst observed ratio; its direction depends on the condition
    /// (minimum for expansion and RIP-1, maximum for the others).
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub worst_ratio: f64,
    pub witness: Option<Witness>,
    pub trials: u64,
    pub seed: Option<u64>,
}

fn ser_ratio<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Number of nonempty subsets of `[0, p)` with at most `s` elements.
pub fn subset_count(p: usize, s: usize) -> u128 {
    (1..=s.min(p) as u64).fold(0u128, |acc, k| acc.saturating_add(binomial(p as u64, k)))
}

fn required(d: usize, k: usize, eps: f64) -> f64 {
    (1.0 - eps) * d as f64 * k as f64
}

/// True when `|N(I)| < (1 - eps) d |I|`.
pub fn expansion_violated(g: &BipartiteGraph, subset: &[usize], eps: f64) -> Result<bool> {
    let j = g.neighbor_set(subset)?.len();
    Ok((j as f64) < required(g.d(), subset.len(), eps) - 1e-9)
}

/// Calls `visit` on every nonempty subset of size `<= s` in lexicographic
/// order, with the running neighbor count. Stops early when `visit` returns
/// false.
fn for_each_subset(g: &BipartiteGraph, s: usize, mut visit: impl FnMut(&[usize], usize) -> bool) {
    let mut mult = vec![0u32; g.n()];
    let mut stack: Vec<usize> = Vec::with_capacity(s);
    let mut distinct = 0usize;

    fn rec(
        g: &BipartiteGraph,
        s: usize,
        start: usize,
        stack: &mut Vec<usize>,
        mult: &mut [u32],
        distinct: &mut usize,
        visit: &mut dyn FnMut(&[usize], usize) -> bool,
    ) -> bool {
        for i in start..g.p() {
            for &j in g.neighbors(i) {
                if mult[j] == 0 {
                    *distinct += 1;
                }
                mult[j] += 1;
            }
            stack.push(i);
            let mut go = visit(stack, *distinct);
            if go && stack.len() < s {
                go = rec(g, s, i + 1, stack, mult, distinct, visit);
            }
            stack.pop();
            for &j in g.neighbors(i) {
                mult[j] -= 1;
                if mult[j] == 0 {
                    *distinct -= 1;
                }
            }
            if !go {
                return false;
            }
        }
        true
    }
    rec(g, s, 0, &mut stack, &mut mult, &mut distinct, &mut visit);
}

/// Exact `(s, eps)` expansion check over every `I` with `1 <= |I| <= s`.
/// Reports `min |J| / (d |I|)` and the first subset attaining it.
pub fn check_expansion_exhaustive(g: &BipartiteGraph, s: usize, eps: f64) -> Result<VerificationReport> {
    check_expansion_exhaustive_with_budget(g, s, eps, DEFAULT_SUBSET_BUDGET)
}

pub fn check_expansion_exhaustive_with_budget(
    g: &BipartiteGraph,
    s: usize,
    eps: f64,
    budget: u64,
) -> Result<VerificationReport> {
    validate_eps(eps)?;
    let total = subset_count(g.p(), s);
    if total > budget as u128 {
        return capacity(format!("{total} subsets exceed the budget of {budget}"));
    }
    let d = g.d();
    let mut worst = f64::INFINITY;
    let mut witness = Vec::new();
    let mut ok = true;
    let mut visited = 0u64;
    for_each_subset(g, s, |set, j| {
        visited += 1;
        let ratio = j as f64 / (d * set.len()) as f64;
        if ratio < worst {
            worst = ratio;
            witness = set.to_vec();
        }
        if (j as f64) < required(d, set.len(), eps) - 1e-9 {
            ok = false;
        }
        true
    });
    Ok(VerificationReport {
        condition: "expansion_exhaustive".into(),
        ok,
        worst_ratio: if visited == 0 { 1.0 } else { worst },
        witness: (visited > 0).then_some(Witness::Subset(witness)),
        trials: visited,
        seed: None,
    })
}

/// First violating subset in enumeration order, if any. Cheaper than the
/// full report when only the verdict matters (seed searches).
pub fn first_expansion_violation(g: &BipartiteGraph, s: usize, eps: f64, budget: u64) -> Result<Option<Vec<usize>>> {
    validate_eps(eps)?;
    let total = subset_count(g.p(), s);
    if total > budget as u128 {
        return capacity(format!("{total} subsets exceed the budget of {budget}"));
    }
    let d = g.d();
    let mut found = None;
    // Grow by size so small violations are found first.
    for size in 1..=s.min(g.p()) {
        for_each_subset(g, size, |set, j| {
            if set.len() == size && (j as f64) < required(d, size, eps) - 1e-9 {
                found = Some(set.to_vec());
                return false;
            }
            true
        });
        if found.is_some() {
            break;
        }
    }
    Ok(found)
}

/// Seed search over `random_left_regular(p, d, n, base_seed + k)` for `n` in
/// `n_range` and `k < seeds_per_n`; returns the first graph with no
/// `(s, eps)` expansion violation.
pub fn search_random_expander(
    p: usize,
    d: usize,
    n_range: std::ops::RangeInclusive<usize>,
    seeds_per_n: u64,
    base_seed: u64,
    s: usize,
    eps: f64,
) -> Result<Option<BipartiteGraph>> {
    for n in n_range {
        for k in 0..seeds_per_n {
            let g = crate::graph::random_left_regular(p, d, n, base_seed.wrapping_add(k))?;
            if first_expansion_violation(&g, s, eps, DEFAULT_SUBSET_BUDGET)?.is_none() {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

fn validate_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0, 1)");
    }
    Ok(())
}

fn nth_subset(p: usize, k: usize, mut rank: u128) -> Vec<usize> {
    // Lexicographic unranking of k-subsets of [0, p).
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        loop {
            let c = binomial((p - next - 1) as u64, (remaining - 1) as u64);
            if rank < c {
                out.push(next);
                next += 1;
                break;
            }
            rank -= c;
            next += 1;
        }
    }
    out
}

/// Randomized expansion check; one-sided (can only refute).
pub fn check_expansion_sampled(
    g: &BipartiteGraph,
    s: usize,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    validate_eps(eps)?;
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    let p = g.p();
    let smax = s.min(p);
    let sizes: Vec<u128> = (1..=smax).map(|k| binomial(p as u64, k as u64)).collect();
    let total: u128 = sizes.iter().sum();
    let exhaustive_order = total <= trials as u128 && total <= DEFAULT_SUBSET_BUDGET as u128;

    let mut order: Vec<u64> = Vec::new();
    if exhaustive_order {
        order = (0..total as u64).collect();
        Rng::new(seed).shuffle(&mut order);
    }
    let count = if exhaustive_order { total as u64 } else { trials };
    let unrank = |mut rank: u128| -> Vec<usize> {
        for (k, &c) in sizes.iter().enumerate() {
            if rank < c {
                return nth_subset(p, k + 1, rank);
            }
            rank -= c;
        }
        unreachable!("rank within total")
    };

    let d = g.d();
    let mut marks = vec![0u32; g.n()];
    let mut worst = f64::INFINITY;
    let mut witness = Vec::new();
    let mut ok = true;
    for t in 0..count {
        let set = if exhaustive_order {
            unrank(order[t as usize] as u128)
        } else {
            let mut rng = Rng::for_trial(seed, t);
            if total <= u64::MAX as u128 {
                unrank(rng.below(total as u64) as u128)
            } else {
                // Astronomical subset spaces: draw the size uniformly instead.
                let k = 1 + rng.below(smax as u64) as usize;
                rng.sample_indices(p, k)
            }
        };
        let stamp = (t % u32::MAX as u64) as u32 + 1;
        if stamp == 1 {
            marks.iter_mut().for_each(|m| *m = 0);
        }
        let j = g.neighbor_count_with(&set, &mut marks, stamp);
        let ratio = j as f64 / (d * set.len()) as f64;
        if (j as f64) < required(d, set.len(), eps) - 1e-9 {
            ok = false;
        }
        if ratio < worst {
            worst = ratio;
            witness = set;
        }
    }
    Ok(VerificationReport {
        condition: "expansion_sampled".into(),
        ok,
        worst_ratio: worst,
        witness: Some(Witness::Subset(witness)),
        trials: count,
        seed: Some(seed),
    })
}

/// `||X gamma||_1 / ||gamma||_1` (1 for the zero vector).
pub fn rip1_ratio<D: Design + ?Sized>(x: &D, gamma: &[f64]) -> Result<f64> {
    let den = norm1(gamma);
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(norm1(&x.matvec(gamma)?) / den)
}

fn rip1_violated(ratio: f64, eps: f64) -> bool {
    ratio < 1.0 - 2.0 * eps - 1e-12 || ratio > 1.0 + 1e-12
}

/// Sampled RIP-1 check `(1 - 2 eps) ||g||_1 <= ||X g||_1 <= ||g||_1` on
/// `s`-sparse vectors. `worst_ratio` is the smallest observed ratio.
pub fn check_rip1_sampled<D: Design + ?Sized>(
    x: &D,
    s: usize,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let p = x.ncols();
    if s > p {
        return domain(format!("s = {s} exceeds p = {p}"));
    }
    let mut worst = f64::INFINITY;
    let mut witness: Option<Vec<f64>> = None;
    let mut violation: Option<Vec<f64>> = None;
    for t in 0..trials {
        let mut rng = Rng::for_trial(seed, t);
        let mut gamma = vec![0.0; p];
        for i in rng.sample_indices(p, s) {
            gamma[i] = rng.sign() * rng.uniform_range(1.0, 2.0);
        }
        let ratio = rip1_ratio(x, &gamma)?;
        if violation.is_none() && rip1_violated(ratio, eps) {
            violation = Some(gamma.clone());
        }
        if ratio < worst {
            worst = ratio;
            witness = Some(gamma);
        }
    }
    let ok = violation.is_none();
    Ok(VerificationReport {
        condition: "rip1_sampled".into(),
        ok,
        worst_ratio: if trials == 0 { 1.0 } else { worst },
        witness: violation.or(witness).map(Witness::Vector),
        trials,
        seed: Some(seed),
    })
}

/// Both sides of the uncertainty principle at the worst support (top `s`
/// coordinates): `(||g_S||_1, 2 ||X g||_1 + ||g_{S^c}||_1 / 2)`.
pub fn up2_sides<D: Design + ?Sized>(x: &D, gamma: &[f64], s: usize) -> Result<(f64, f64)> {
    let support = top_s(gamma, s);
    let (on, off) = split_l1(gamma, &support);
    Ok((on, 2.0 * norm1(&x.matvec(gamma)?) + 0.5 * off))
}

/// Both sides of the H-condition form
/// `||g_S||_1 <= lhat s ||X g||_2 + ||g||_1 / 3`, `lhat = 4 sqrt(n) / (3 s)`.
pub fn h_condition_sides<D: Design + ?Sized>(x: &D, gamma: &[f64], s: usize) -> Result<(f64, f64)> {
    let support = top_s(gamma, s);
    let (on, _) = split_l1(gamma, &support);
    let lhat = 4.0 * (x.nrows() as f64).sqrt() / (3.0 * s.max(1) as f64);
    Ok((on, lhat * s as f64 * norm2(&x.matvec(gamma)?) + norm1(gamma) / 3.0))
}

fn violates(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + 1e-12 * rhs.abs().max(1.0)
}

fn sampled_inequality<D: Design + ?Sized>(
    condition: &str,
    x: &D,
    s: usize,
    trials: u64,
    seed: u64,
    sides: impl Fn(&D, &[f64], usize) -> Result<(f64, f64)>,
) -> Result<VerificationReport> {
    let p = x.ncols();
    if s > p {
        return domain(format!("s = {s} exceeds p = {p}"));
    }
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut violation = None;
    for t in 0..trials {
        let gamma = Rng::for_trial(seed, t).normal_vec(p);
        let (lhs, rhs) = sides(x, &gamma, s)?;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if violation.is_none() && violates(lhs, rhs) {
            violation = Some(gamma.clone());
        }
        if ratio > worst || witness.is_none() {
            worst = worst.max(ratio);
            witness = Some(gamma);
        }
    }
    Ok(VerificationReport {
        condition: condition.into(),
        ok: violation.is_none(),
        worst_ratio: worst,
        witness: violation.or(witness).map(Witness::Vector),
        trials,
        seed: Some(seed),
    })
}

/// Sampled uncertainty-principle check with `S` = top-`s` coordinates of each
/// draw (the support maximizing `||g_S||_1 - ||g_{S^c}||_1 / 2`).
/// `worst_ratio` is the largest `lhs / rhs`.
pub fn check_up2_sampled<D: Design + ?Sized>(x: &D, s: usize, trials: u64, seed: u64) -> Result<VerificationReport> {
    sampled_inequality("up2_sampled", x, s, trials, seed, up2_sides)
}

/// H-condition on the same draws as [`check_up2_sampled`] for equal seeds.
pub fn check_h_condition_sampled<D: Design + ?Sized>(
    x: &D,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    sampled_inequality("h_condition_sampled", x, s, trials, seed, h_condition_sides)
}

/// Orthonormal basis of `ker X` (columns), from an SVD of `X` padded with
/// zero rows to a square matrix.
pub fn kernel_basis<D: Design + ?Sized>(x: &D) -> DMatrix<f64> {
    let dense = x.to_dense();
    let (n, p) = dense.shape();
    let rows = n.max(p);
    let mut padded = DMatrix::zeros(rows, p);
    padded.view_mut((0, 0), (n, p)).copy_from(&dense);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let tol = KERNEL_TOL * smax.max(1.0);
    let cols: Vec<_> = (0..p)
        .filter(|&k| svd.singular_values[k] <= tol)
        .map(|k| v_t.row(k).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(p, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// `(||g_S||_1, ||g_{S^c}||_1 / 2)` with `S` = top-`s` coordinates.
pub fn concentration_sides(gamma: &[f64], s: usize) -> (f64, f64) {
    let (on, off) = split_l1(gamma, &top_s(gamma, s));
    (on, 0.5 * off)
}

/// Kernel vectors must not concentrate: `||g_S||_1 <= ||g_{S^c}||_1 / 2`.
/// Vacuously ok when the kernel is trivial.
pub fn check_kernel_concentration<D: Design + ?Sized>(
    x: &D,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let basis = kernel_basis(x);
    let k = basis.ncols();
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut violation = None;
    if k > 0 {
        for t in 0..trials {
            let coef = nalgebra::DVector::from_vec(Rng::for_trial(seed, t).normal_vec(k));
            let gamma: Vec<f64> = (&basis * coef).iter().copied().collect();
            let (lhs, rhs) = concentration_sides(&gamma, s);
            let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
            if violation.is_none() && lhs > rhs * (1.0 + 1e-9) {
                violation = Some(gamma.clone());
            }
            if ratio > worst || witness.is_none() {
                worst = worst.max(ratio);
                witness = Some(gamma);
            }
        }
    }
    Ok(VerificationReport {
        condition: "kernel_concentration".into(),
        ok: violation.is_none(),
        worst_ratio: worst,
        witness: violation.or(witness).map(Witness::Vector),
        trials: if k > 0 { trials } else { 0 },
        seed: Some(seed),
    })
}

/// Exact nullspace property of order `s` for small instances.
///
/// For every `|S| = s` and sign pattern `sigma`, solves
/// `max sigma^T g_S  s.t.  X g = 0, ||g_{S^c}||_1 <= 1` (with `g = g+ - g-`).
/// The property holds iff every optimum is below `1 - NSP_MARGIN`; an
/// unbounded program is a kernel vector living on `S` alone.
pub fn nullspace_property_oracle<D: Design + ?Sized>(x: &D, s: usize) -> Result<VerificationReport> {
    let p = x.ncols();
    if s == 0 || s > p {
        return domain(format!("need 1 <= s <= p, got s = {s}"));
    }
    let lps = binomial(p as u64, s as u64).saturating_mul(1u128 << s.min(100));
    if lps > NSP_LP_BUDGET as u128 {
        return capacity(format!("{lps} linear programs exceed the budget of {NSP_LP_BUDGET}"));
    }
    let dense = x.to_dense();
    let rows: Vec<usize> = (0..dense.nrows())
        .filter(|&r| dense.row(r).iter().any(|v| *v != 0.0))
        .collect();
    let m = rows.len();
    // columns: g+ (p), g- (p), slack (1)
    let mut a = DMatrix::zeros(m + 1, 2 * p + 1);
    for (k, &r) in rows.iter().enumerate() {
        for j in 0..p {
            a[(k, j)] = dense[(r, j)];
            a[(k, p + j)] = -dense[(r, j)];
        }
    }
    a[(m, 2 * p)] = 1.0;
    let mut b = vec![0.0; m + 1];
    b[m] = 1.0;

    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut count = 0u64;
    let mut support: Vec<usize> = (0..s).collect();
    loop {
        let mut row = a.clone();
        let mut in_s = vec![false; p];
        for &i in &support {
            in_s[i] = true;
        }
        for j in 0..p {
            let v = if in_s[j] { 0.0 } else { 1.0 };
            row[(m, j)] = v;
            row[(m, p + j)] = v;
        }
        for signs in 0u64..(1 << s) {
            let mut cost = vec![0.0; 2 * p + 1];
            for (k, &i) in support.iter().enumerate() {
                let sg = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                cost[i] = -sg;
                cost[p + i] = sg;
            }
            count += 1;
            let lp = LinearProgram::new(cost, row.clone(), b.clone())?;
            match lp_solve(&lp)? {
                LpOutcome::Optimal(sol) => {
                    let value = -sol.objective;
                    if value > worst {
                        worst = value;
                        let gamma: Vec<f64> = (0..p).map(|j| sol.x[j] - sol.x[p + j]).collect();
                        witness = Some(Witness::Vector(gamma));
                    }
                }
                LpOutcome::Unbounded => {
                    worst = f64::INFINITY;
                    witness = Some(Witness::Subset(support.clone()));
                }
                LpOutcome::Infeasible => unreachable!("g = 0 is always feasible"),
            }
            if worst.is_infinite() {
                break;
            }
        }
        if worst.is_infinite() || !next_combination(&mut support, p) {
            break;
        }
    }
    Ok(VerificationReport {
        condition: "nullspace_property".into(),
        ok: worst < 1.0 - NSP_MARGIN,
        worst_ratio: worst,
        witness,
        trials: count,
        seed: None,
    })
}

/// `||g_S||_1 / ||g_{S^c}||_1` at the top-`s` support, and `||X g||_inf`,
/// for re-checking a nullspace witness.
pub fn nsp_witness_ratio<D: Design + ?Sized>(x: &D, gamma: &[f64], s: usize) -> Result<(f64, f64)> {
    let (on, off) = split_l1(gamma, &top_s(gamma, s));
    let residual = crate::vecops::norm_inf(&x.matvec(gamma)?);
    Ok((if off > 0.0 { on / off } else { f64::INFINITY }, residual))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Proof that a graph passed the exhaustive `(s, eps)` expansion check.
/// Experiments that rely on the uncertainty principle require one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCertificate {
    pub s: usize,
    pub eps: f64,
    pub p: usize,
    pub n: usize,
    pub d: usize,
    pub fingerprint: u64,
    pub report: VerificationReport,
}

/// FNV-1a over the neighbor lists.
pub fn graph_fingerprint(g: &BipartiteGraph) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for list in g.neighbor_lists() {
        for &j in list.iter().chain(std::iter::once(&usize::MAX)) {
            for byte in (j as u64).to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    h
}

impl ExpansionCertificate {
    /// Runs the exhaustive check; fails with `Precondition` if it does not pass.
    pub fn issue(g: &BipartiteGraph, s: usize, eps: f64) -> Result<Self> {
        let report = check_expansion_exhaustive(g, s, eps)?;
        if !report.ok {
            return Err(crate::Error::Precondition(format!(
                "graph is not an ({s}, {eps})-expander (worst ratio {})",
                report.worst_ratio
            )));
        }
        Ok(Self {
            s,
            eps,
            p: g.p(),
            n: g.n(),
            d: g.d(),
            fingerprint: graph_fingerprint(g),
            report,
        })
    }

    pub fn covers(&self, g: &BipartiteGraph) -> bool {
        self.p == g.p() && self.n == g.n() && self.d == g.d() && self.fingerprint == graph_fingerprint(g)
    }
}
