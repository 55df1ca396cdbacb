//! Renormalized adjacency design matrices.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{domain, Result};
use crate::graph::BipartiteGraph;

/// Linear design `X` (n rows, p columns) as seen by the solvers and checks.
///
/// Implemented by the sparse [`DesignMatrix`] and by dense `DMatrix<f64>`,
/// which is how hand-built or invalid designs enter the verifiers.
pub trait Design {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out += a * X_j`
    fn col_axpy(&self, j: usize, a: f64, out: &mut [f64]);
    /// `X_j^T v`
    fn col_dot(&self, j: usize, v: &[f64]) -> f64;
    fn col_norm_sq(&self, j: usize) -> f64;
    fn to_dense(&self) -> DMatrix<f64>;

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols() {
            return domain(format!("vector length {} != p = {}", x.len(), self.ncols()));
        }
        let mut out = vec![0.0; self.nrows()];
        for (j, &v) in x.iter().enumerate() {
            if v != 0.0 {
                self.col_axpy(j, v, &mut out);
            }
        }
        Ok(out)
    }

    fn transpose_matvec(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.nrows() {
            return domain(format!("vector length {} != n = {}", z.len(), self.nrows()));
        }
        Ok((0..self.ncols()).map(|j| self.col_dot(j, z)).collect())
    }
}

/// `X_{ji} = 1/d` when right vertex `j` neighbors left vertex `i`.
///
/// Stored by column as the graph's neighbor lists; the value `1/d` is
/// implicit, so every column has l1 norm 1 and l2 norm `1/sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    p: usize,
    n: usize,
    d: usize,
    columns: Vec<Vec<usize>>,
    value: f64,
}

impl DesignMatrix {
    pub fn from_graph(g: &BipartiteGraph) -> Self {
        Self {
            p: g.p(),
            n: g.n(),
            d: g.d(),
            columns: g.neighbor_lists().to_vec(),
            value: 1.0 / g.d() as f64,
        }
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

    /// The stored nonzero value `1/d`.
    pub fn entry_value(&self) -> f64 {
        self.value
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    /// Dense CSV: `n` lines of `p` comma-separated values, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dense = self.to_dense();
        for r in 0..self.n {
            let line: Vec<String> = (0..self.p).map(|c| format!("{:.16e}", dense[(r, c)])).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

impl Design for DesignMatrix {
    fn nrows(&self) -> usize {
        self.n
    }

    fn ncols(&self) -> usize {
        self.p
    }

    fn col_axpy(&self, j: usize, a: f64, out: &mut [f64]) {
        let v = a * self.value;
        for &r in &self.columns[j] {
            out[r] += v;
        }
    }

    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        self.columns[j].iter().map(|&r| v[r]).sum::<f64>() / self.d as f64
    }

    fn col_norm_sq(&self, _j: usize) -> f64 {
        self.value
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.p);
        for (c, rows) in self.columns.iter().enumerate() {
            for &r in rows {
                m[(r, c)] = self.value;
            }
        }
        m
    }
}

impl Design for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn col_axpy(&self, j: usize, a: f64, out: &mut [f64]) {
        for (o, x) in out.iter_mut().zip(self.column(j).iter()) {
            *o += a * x;
        }
    }

    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        self.column(j).iter().zip(v).map(|(x, y)| x * y).sum()
    }

    fn col_norm_sq(&self, j: usize) -> f64 {
        self.column(j).norm_squared()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_left_regular;
    use crate::rng::Rng;
    use crate::vecops::{dot, norm1, norm2, norm_inf};
    use proptest::prelude::*;

    #[test]
    fn degree_two_entries_are_half() {
        let g = random_left_regular(6, 2, 5, 3).unwrap();
        let x = DesignMatrix::from_graph(&g);
        assert_eq!(x.entry_value(), 0.5);
        let dense = x.to_dense();
        for c in 0..6 {
            let col = dense.column(c);
            assert_eq!(col.iter().filter(|&&v| v == 0.5).count(), 2);
            assert!((col.iter().map(|v| v.abs()).sum::<f64>() - 1.0).abs() < 1e-15);
            assert!((col.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn matching_is_identity() {
        let x = DesignMatrix::from_graph(&BipartiteGraph::matching(4).unwrap());
        let g = [1.0, -2.0, 0.5, 3.0];
        assert_eq!(x.matvec(&g).unwrap(), g.to_vec());
        assert_eq!(x.transpose_matvec(&g).unwrap(), g.to_vec());
    }

    #[test]
    fn unit_vector_and_ones() {
        let g = random_left_regular(8, 3, 7, 9).unwrap();
        let x = DesignMatrix::from_graph(&g);
        let mut e = vec![0.0; 8];
        e[5] = 1.0;
        let col = x.matvec(&e).unwrap();
        for (r, v) in col.iter().enumerate() {
            let expect = if g.neighbors(5).contains(&r) { 1.0 / 3.0 } else { 0.0 };
            assert_eq!(*v, expect);
        }
        for v in x.transpose_matvec(&[1.0; 7]).unwrap() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch() {
        let x = DesignMatrix::from_graph(&random_left_regular(4, 2, 3, 0).unwrap());
        assert!(x.matvec(&[1.0; 3]).is_err());
        assert!(x.transpose_matvec(&[1.0; 4]).is_err());
    }

    #[test]
    fn csv_export() {
        let x = DesignMatrix::from_graph(&BipartiteGraph::matching(2).unwrap());
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "1.0000000000000000e0,0.0000000000000000e0\n0.0000000000000000e0,1.0000000000000000e0\n"
        );
    }

    proptest! {
        #[test]
        fn contraction_and_adjoint(seed in 0u64..1000) {
            let g = random_left_regular(30, 4, 20, seed).unwrap();
            let x = DesignMatrix::from_graph(&g);
            let mut rng = Rng::new(seed ^ 0xabc);
            let gamma = rng.normal_vec(30);
            let z = rng.normal_vec(20);
            let xg = x.matvec(&gamma).unwrap();
            let xtz = x.transpose_matvec(&z).unwrap();
            prop_assert!((dot(&xg, &z) - dot(&gamma, &xtz)).abs() < 1e-12);
            prop_assert!(norm1(&xg) <= norm1(&gamma) + 1e-12);
            prop_assert!(norm1(&xg) <= (20f64).sqrt() * norm2(&xg) + 1e-12);
            prop_assert!(norm_inf(&xtz) <= norm_inf(&z));
            // dense route agrees with the sparse one
            let dense = x.to_dense();
            let xg2 = Design::matvec(&dense, &gamma).unwrap();
            for (a, b) in xg.iter().zip(&xg2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
