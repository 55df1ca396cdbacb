//! Left-regular bipartite graphs: random and Parvaresh–Vardy style
//! constructions, plus the JSON interchange format.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Error, Result};
use crate::field::{find_irreducible_over, FieldPoly, FieldSpec};
use crate::rng::Rng;

/// Largest vertex count on either side of a code-based construction.
pub const MAX_PV_VERTICES: u64 = 1 << 20;

/// How a graph was produced. Serialized as a short text tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Random {
        seed: u64,
        p: usize,
        d: usize,
        n: usize,
    },
    Pv {
        q: u32,
        l: u32,
        m: u32,
        h: u64,
        modulus: String,
    },
    Explicit,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Random { seed, p, d, n } => write!(f, "random(seed={seed},p={p},d={d},n={n})"),
            Provenance::Pv { q, l, m, h, modulus } => write!(f, "pv(q={q},l={l},m={m},h={h},E={modulus})"),
            Provenance::Explicit => write!(f, "explicit"),
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "explicit" {
            return Ok(Provenance::Explicit);
        }
        let (head, body) = s
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(|| Error::Domain(format!("bad provenance tag {s:?}")))?;
        let field = |key: &str| -> Result<&str> {
            body.split(',')
                .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .ok_or_else(|| Error::Domain(format!("provenance {s:?} lacks {key}")))
        };
        fn num<T: FromStr>(v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Domain(format!("bad number {v:?} in provenance")))
        }
        match head {
            "random" => Ok(Provenance::Random {
                seed: num(field("seed")?)?,
                p: num(field("p")?)?,
                d: num(field("d")?)?,
                n: num(field("n")?)?,
            }),
            "pv" => Ok(Provenance::Pv {
                q: num(field("q")?)?,
                l: num(field("l")?)?,
                m: num(field("m")?)?,
                h: num(field("h")?)?,
                modulus: field("E")?.to_string(),
            }),
            _ => domain(format!("unknown provenance {head:?}")),
        }
    }
}

/// d-left-regular bipartite graph with `p` left and `n` right vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct BipartiteGraph {
    p: usize,
    n: usize,
    d: usize,
    neighbors: Vec<Vec<usize>>,
    provenance: Provenance,
}

/// On-disk form: `{p, n, d, provenance, neighbors}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    p: usize,
    n: usize,
    d: usize,
    provenance: String,
    neighbors: Vec<Vec<usize>>,
}

impl From<BipartiteGraph> for GraphFile {
    fn from(g: BipartiteGraph) -> Self {
        GraphFile {
            p: g.p,
            n: g.n,
            d: g.d,
            provenance: g.provenance.to_string(),
            neighbors: g.neighbors,
        }
    }
}

impl TryFrom<GraphFile> for BipartiteGraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        if f.neighbors.len() != f.p {
            return domain(format!("p = {} but {} neighbor lists", f.p, f.neighbors.len()));
        }
        let g = BipartiteGraph::new(f.n, f.d, f.neighbors, f.provenance.parse()?)?;
        Ok(g)
    }
}

impl BipartiteGraph {
    /// Validates left-regularity, range and ordering of the neighbor lists.
    pub fn new(n: usize, d: usize, neighbors: Vec<Vec<usize>>, provenance: Provenance) -> Result<Self> {
        if neighbors.is_empty() {
            return domain("graph needs at least one left vertex");
        }
        if d == 0 || d > n {
            return domain(format!("left degree {d} invalid for n = {n}"));
        }
        for (i, list) in neighbors.iter().enumerate() {
            if list.len() != d {
                return domain(format!("left vertex {i} has {} neighbors, expected {d}", list.len()));
            }
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return domain(format!("neighbors of left vertex {i} not strictly increasing"));
            }
            if list.last().is_some_and(|&j| j >= n) {
                return domain(format!("neighbor of left vertex {i} out of range"));
            }
        }
        Ok(Self {
            p: neighbors.len(),
            n,
            d,
            neighbors,
            provenance,
        })
    }

    /// The perfect matching `i <-> i` on `p` vertices (d = 1).
    pub fn matching(p: usize) -> Result<Self> {
        Self::new(p, 1, (0..p).map(|i| vec![i]).collect(), Provenance::Explicit)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn neighbor_lists(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Union of the neighbor lists of `left`.
    pub fn neighbor_set(&self, left: &[usize]) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &i in left {
            if i >= self.p {
                return domain(format!("left index {i} out of range (p = {})", self.p));
            }
            out.extend(self.neighbors[i].iter().copied());
        }
        Ok(out)
    }

    /// Size of the neighbor set, using a caller-owned mark buffer of length `n`.
    pub(crate) fn neighbor_count_with(&self, left: &[usize], marks: &mut [u32], stamp: u32) -> usize {
        let mut count = 0;
        for &i in left {
            for &j in &self.neighbors[i] {
                if marks[j] != stamp {
                    marks[j] = stamp;
                    count += 1;
                }
            }
        }
        count
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Each left vertex picks `d` distinct right vertices uniformly, independently
/// of the others, from the stream seeded by `seed`.
pub fn random_left_regular(p: usize, d: usize, n: usize, seed: u64) -> Result<BipartiteGraph> {
    if p == 0 {
        return domain("p must be at least 1");
    }
    if d == 0 || d > n {
        return domain(format!("need 1 <= d <= n, got d = {d}, n = {n}"));
    }
    let mut rng = Rng::new(seed);
    let neighbors = (0..p).map(|_| rng.sample_indices(n, d)).collect();
    BipartiteGraph::new(n, d, neighbors, Provenance::Random { seed, p, d, n })
}

/// Degree and right size for the random construction:
/// `d = ceil(c ln(p/s))`, `n = ceil(c s ln(p/s))`.
pub fn suggest_random_params(p: usize, s: usize, c: f64) -> Result<(usize, usize)> {
    if s == 0 || p < 2 * s {
        return domain(format!("need p >= 2s >= 2, got p = {p}, s = {s}"));
    }
    if !(c > 0.0) {
        return domain("constant c must be positive");
    }
    let l = (p as f64 / s as f64).ln();
    Ok(((c * l).ceil() as usize, (c * s as f64 * l).ceil() as usize))
}

/// Expansion parameters. `theta0` is the unspecified universal constant of
/// the explicit construction and only feeds informational bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpanderParams {
    pub s: usize,
    pub eps: f64,
    pub alpha: f64,
    pub theta0: f64,
}

impl Default for ExpanderParams {
    fn default() -> Self {
        Self {
            s: 1,
            eps: 0.125,
            alpha: 1.0,
            theta0: 1.0,
        }
    }
}

impl ExpanderParams {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return domain("s must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return domain("eps must lie in (0, 1)");
        }
        if !(self.alpha > 0.0) || !(self.theta0 > 0.0) {
            return domain("alpha and theta0 must be positive");
        }
        Ok(())
    }

    /// The constant `theta0 / eps` used by the oracle factors.
    pub fn theta(&self) -> f64 {
        self.theta0 / self.eps
    }
}

/// Upper bounds `(d, n)` of the explicit construction, for reporting only.
pub fn suggest_pv_bounds(p: usize, params: &ExpanderParams) -> Result<(f64, f64)> {
    params.validate()?;
    let s = params.s;
    if s < 2 || p <= s {
        return domain(format!("need p > s >= 2, got p = {p}, s = {s}"));
    }
    let inner = params.theta() * (p as f64).ln() * (s as f64).ln();
    let a = params.alpha;
    let d = inner.powf(1.0 + 1.0 / a);
    let n = (s as f64).powf(1.0 + a) * inner.powf(2.0 + 2.0 / a);
    Ok((d, n))
}

/// Code-based construction over GF(q).
///
/// Left vertices are the `q^l` polynomials of degree `< l` (left index `i`
/// has base-q digits `c_0, c_1, ...` with `c_0` least significant). Left
/// vertex `f` has one neighbor per `y` in GF(q): the tuple
/// `(y, f_0(y), ..., f_{m-1}(y))` with `f_0 = f`, `f_i = f_{i-1}^h mod E`,
/// encoded base q with `y` most significant, so `n = q^{m+1}` and `d = q`.
/// `E` is the smallest monic irreducible of degree `l` over GF(q).
pub fn pv_expander(field: &FieldSpec, l: u32, m: u32, h: u64) -> Result<BipartiteGraph> {
    if l == 0 || m == 0 || h < 2 {
        return domain("need l >= 1, m >= 1, h >= 2");
    }
    let q = field.order() as u64;
    let p = q.checked_pow(l).filter(|&v| v <= MAX_PV_VERTICES);
    let n = q.checked_pow(m + 1).filter(|&v| v <= MAX_PV_VERTICES);
    let (p, n) = match (p, n) {
        (Some(p), Some(n)) => (p as usize, n as usize),
        _ => return capacity(format!("q^l or q^(m+1) exceeds {MAX_PV_VERTICES}")),
    };
    let modulus = find_irreducible_over(field, l as usize)?;
    let ys: Vec<_> = field.elements().collect();
    let mut neighbors = Vec::with_capacity(p);
    for idx in 0..p as u64 {
        let mut digits = Vec::with_capacity(l as usize);
        let mut rest = idx;
        for _ in 0..l {
            digits.push((rest % q) as u32);
            rest /= q;
        }
        let mut fi = FieldPoly::from_indices(field, &digits)?;
        let mut iterates = Vec::with_capacity(m as usize);
        for i in 0..m {
            if i > 0 {
                fi = field.poly_mod_pow(&fi, h, &modulus)?;
            }
            iterates.push(fi.clone());
        }
        let mut list: Vec<usize> = ys
            .iter()
            .map(|&y| {
                iterates.iter().fold(y.index() as u64, |code, f| {
                    code * q + field.poly_eval(f, y).index() as u64
                }) as usize
            })
            .collect();
        list.sort_unstable();
        list.dedup();
        debug_assert_eq!(list.len(), q as usize);
        neighbors.push(list);
    }
    BipartiteGraph::new(
        n,
        q as usize,
        neighbors,
        Provenance::Pv {
            q: field.order(),
            l,
            m,
            h,
            modulus: modulus.to_string(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_degree_forces_complete_graph() {
        for seed in 0..5 {
            let g = random_left_regular(4, 4, 4, seed).unwrap();
            for i in 0..4 {
                assert_eq!(g.neighbors(i), &[0, 1, 2, 3]);
            }
        }
    }

    #[test]
    fn single_vertex() {
        let g = random_left_regular(1, 1, 5, 0).unwrap();
        assert_eq!(g.neighbors(0).len(), 1);
        assert!(g.neighbors(0)[0] < 5);
    }

    #[test]
    fn random_rejects_d_above_n() {
        assert!(matches!(random_left_regular(3, 6, 5, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(
            random_left_regular(20, 3, 9, 11).unwrap(),
            random_left_regular(20, 3, 9, 11).unwrap()
        );
        assert_ne!(
            random_left_regular(20, 3, 9, 11).unwrap(),
            random_left_regular(20, 3, 9, 12).unwrap()
        );
    }

    #[test]
    fn random_params_example() {
        assert_eq!(suggest_random_params(64, 4, 4.0).unwrap(), (12, 45));
        let l2 = 2f64.ln();
        assert_eq!(
            suggest_random_params(10, 5, 3.0).unwrap(),
            ((3.0 * l2).ceil() as usize, (15.0 * l2).ceil() as usize)
        );
        assert!(suggest_random_params(7, 4, 1.0).is_err());
        let mut last = (0, 0);
        for p in 8..200 {
            let cur = suggest_random_params(p, 4, 2.5).unwrap();
            assert!(cur.0 >= last.0 && cur.1 >= last.1);
            last = cur;
        }
    }

    #[test]
    fn pv_bounds_example() {
        let params = ExpanderParams {
            s: 4,
            ..Default::default()
        };
        let (d, n) = suggest_pv_bounds(256, &params).unwrap();
        let inner = 8.0 * 256f64.ln() * 4f64.ln();
        assert!((inner - 61.50).abs() < 0.01);
        assert!((d - inner * inner).abs() < 1e-9 && (d - 3.78e3).abs() < 5.0);
        assert!((n / 2.29e8 - 1.0).abs() < 0.005);
        assert_eq!(params.theta(), 8.0);
        let bigger = suggest_pv_bounds(256, &ExpanderParams { s: 5, ..params }).unwrap();
        assert!(bigger.0 > d && bigger.1 > n);
    }

    #[test]
    fn pv_rs_example() {
        let f = FieldSpec::new(3, 1).unwrap();
        let g = pv_expander(&f, 2, 1, 2).unwrap();
        assert_eq!((g.p(), g.d(), g.n()), (9, 3, 9));
        // f = x + 1 has digits (1, 1) -> index 1 + 3 = 4
        assert_eq!(g.neighbors(4), &[1, 5, 6]);
    }

    #[test]
    fn pv_two_iterates_example() {
        let f = FieldSpec::new(3, 1).unwrap();
        let g = pv_expander(&f, 2, 2, 2).unwrap();
        assert_eq!(g.n(), 27);
        // f = x is index 3; at y = 1: (1, 1, 2) -> 14
        assert!(g.neighbors(3).contains(&14));
        assert_eq!(g.provenance().to_string(), "pv(q=3,l=2,m=2,h=2,E=x^2+1)");
        // zero polynomial: (y, 0, 0)
        assert_eq!(g.neighbors(0), &[0, 9, 18]);
    }

    #[test]
    fn pv_capacity() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert!(matches!(pv_expander(&f, 30, 1, 2), Err(Error::Capacity(_))));
        assert!(pv_expander(&f, 2, 1, 1).is_err());
    }

    #[test]
    fn pv_over_extension_field() {
        let f = FieldSpec::from_order(4).unwrap();
        let g = pv_expander(&f, 2, 2, 2).unwrap();
        assert_eq!((g.p(), g.d(), g.n()), (16, 4, 64));
        assert_eq!(g, pv_expander(&f, 2, 2, 2).unwrap());
    }

    #[test]
    fn neighbor_set_examples() {
        let g = random_left_regular(10, 3, 12, 5).unwrap();
        assert!(g.neighbor_set(&[]).unwrap().is_empty());
        assert_eq!(g.neighbor_set(&[4]).unwrap().len(), 3);
        assert!(g.neighbor_set(&[10]).is_err());
        let m = BipartiteGraph::matching(6).unwrap();
        assert_eq!(m.neighbor_set(&[1, 3, 5]).unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = random_left_regular(5, 2, 6, 1).unwrap();
        let s = g.to_json().unwrap();
        assert!(s.starts_with("{\"p\":5,\"n\":6,\"d\":2,\"provenance\":\"random(seed=1,p=5,d=2,n=6)\""));
        assert_eq!(BipartiteGraph::from_json(&s).unwrap(), g);
        let bad = r#"{"p":1,"n":3,"d":2,"provenance":"explicit","neighbors":[[2,1]]}"#;
        assert!(BipartiteGraph::from_json(bad).is_err());
        let bad = r#"{"p":2,"n":3,"d":1,"provenance":"explicit","neighbors":[[0]]}"#;
        assert!(BipartiteGraph::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn neighbor_set_bounded_by_degree_sum(seed in 0u64..500, k in 0usize..6) {
            let g = random_left_regular(12, 3, 10, seed).unwrap();
            let mut rng = crate::rng::Rng::new(seed);
            let set = rng.sample_indices(12, k);
            let j = g.neighbor_set(&set).unwrap();
            prop_assert!(j.len() <= 3 * k);
            let disjoint = set.iter().enumerate().all(|(a, &x)| set[a + 1..].iter().all(|&y| {
                g.neighbors(x).iter().all(|v| !g.neighbors(y).contains(v))
            }));
            prop_assert_eq!(j.len() == 3 * k, disjoint);
        }
    }
}
