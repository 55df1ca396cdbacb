//! Small dense-vector helpers shared by the solvers and checks.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Indices of the `s` largest `|v_i|`, ties broken by lower index, ascending.
pub fn top_s(v: &[f64], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.truncate(s.min(v.len()));
    idx.sort_unstable();
    idx
}

/// `(||v_S||_1, ||v_{S^c}||_1)` for a sorted index set `S`.
pub fn split_l1(v: &[f64], support: &[usize]) -> (f64, f64) {
    let on: f64 = support.iter().map(|&i| v[i].abs()).sum();
    (on, norm1(v) - on)
}

/// `||v_{S^c}||_1` computed directly over the complement (no cancellation).
pub fn off_support_l1(v: &[f64], support: &[usize]) -> f64 {
    let mut mask = vec![false; v.len()];
    for &i in support {
        mask[i] = true;
    }
    v.iter().zip(&mask).filter(|(_, &m)| !m).map(|(x, _)| x.abs()).sum()
}
