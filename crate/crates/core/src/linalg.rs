//! Sparse system assembly, Dirichlet imposition and direct solution.
//!
//! Assembly collects triplets, finalization compresses them to CSR with a
//! canonical reduction order (duplicates summed in bit-pattern order, so the
//! finalized matrix is identical no matter how element visits were ordered),
//! and `solve` runs a sparse LU with partial pivoting. Constrained rows become
//! identity rows; constrained columns are moved to the right-hand side.

use crate::error::{Error, Result};
use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use std::io::Write;

/// Node-major dof numbering: `dof = node * n_fields + field`.
#[derive(Debug, Clone)]
pub struct DofLayout {
    pub n_nodes: usize,
    pub fields: Vec<String>,
}

impl DofLayout {
    pub fn new(n_nodes: usize, fields: &[&str]) -> Self {
        Self { n_nodes, fields: fields.iter().map(|s| s.to_string()).collect() }
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes * self.fields.len()
    }

    pub fn dof(&self, node: usize, field: usize) -> usize {
        debug_assert!(node < self.n_nodes && field < self.fields.len());
        node * self.fields.len() + field
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    /// Per-field nodal values from a dof-ordered vector.
    pub fn split<'a>(&self, values: &'a [f64], field: usize) -> impl Iterator<Item = f64> + 'a {
        let nf = self.fields.len();
        values.iter().skip(field).step_by(nf).copied()
    }
}

/// Triplet-stage system; finalize to a [`SparseSystem`] before constraining.
#[derive(Debug, Clone)]
pub struct SystemBuilder {
    n: usize,
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
    replaced: Vec<(usize, Vec<(usize, f64)>, f64)>,
}

impl SystemBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, triplets: Vec::new(), rhs: vec![0.0; n], replaced: Vec::new() }
    }

    pub fn n_dofs(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, row: usize, col: usize, v: f64) -> Result<()> {
        if row >= self.n || col >= self.n {
            return Err(Error::DofOutOfRange { dof: row.max(col), n: self.n });
        }
        if v != 0.0 {
            self.triplets.push((row, col, v));
        }
        Ok(())
    }

    pub fn add_rhs(&mut self, row: usize, v: f64) -> Result<()> {
        if row >= self.n {
            return Err(Error::DofOutOfRange { dof: row, n: self.n });
        }
        self.rhs[row] += v;
        Ok(())
    }

    /// Adds a dense `k x k` local matrix (row-major) and optional local rhs at
    /// the global dofs in `dof_map`.
    pub fn scatter_add(
        &mut self,
        local: &[f64],
        local_rhs: Option<&[f64]>,
        dof_map: &[usize],
    ) -> Result<()> {
        let k = dof_map.len();
        debug_assert_eq!(local.len(), k * k);
        for &d in dof_map {
            if d >= self.n {
                return Err(Error::DofOutOfRange { dof: d, n: self.n });
            }
        }
        for i in 0..k {
            let ri = dof_map[i];
            for j in 0..k {
                let v = local[i * k + j];
                if v != 0.0 {
                    self.triplets.push((ri, dof_map[j], v));
                }
            }
        }
        if let Some(rhs) = local_rhs {
            debug_assert_eq!(rhs.len(), k);
            for (i, &v) in rhs.iter().enumerate() {
                self.rhs[dof_map[i]] += v;
            }
        }
        Ok(())
    }

    /// Replaces an entire equation row at finalization time. Used for the
    /// integral closure of auxiliary fields whose derivative-weighted test
    /// functions sum to zero.
    pub fn replace_row(&mut self, row: usize, entries: Vec<(usize, f64)>, rhs: f64) -> Result<()> {
        if row >= self.n || entries.iter().any(|&(c, _)| c >= self.n) {
            return Err(Error::DofOutOfRange { dof: row, n: self.n });
        }
        self.replaced.push((row, entries, rhs));
        Ok(())
    }

    /// Compresses to CSR. Duplicate entries are summed in a canonical order.
    pub fn finalize(mut self) -> SparseSystem {
        use std::collections::BTreeSet;
        let dropped: BTreeSet<usize> = self.replaced.iter().map(|r| r.0).collect();
        if !dropped.is_empty() {
            self.triplets.retain(|t| !dropped.contains(&t.0));
            for &row in &dropped {
                self.rhs[row] = 0.0;
            }
            for (row, entries, rhs) in &self.replaced {
                for &(c, v) in entries {
                    self.triplets.push((*row, c, v));
                }
                self.rhs[*row] = *rhs;
            }
        }
        // guarantee a diagonal slot for every dof
        for d in 0..self.n {
            self.triplets.push((d, d, 0.0));
        }
        self.triplets
            .sort_unstable_by_key(|&(r, c, v)| (r, c, v.to_bits() ^ (1u64 << 63)));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSystem {
            n: self.n,
            row_ptr,
            col_idx,
            vals,
            rhs: self.rhs,
            constraints: vec![None; self.n],
            eliminated: false,
            residual_tol: 1e-10,
        }
    }
}

/// Finalized CSR system with pending Dirichlet constraints.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
    constraints: Vec<Option<f64>>,
    eliminated: bool,
    /// Max allowed `|Ax - b|_inf / |b|_inf` reported by [`Self::solve`].
    pub residual_tol: f64,
}

/// Diagnostics from a direct solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub n_dofs: usize,
    pub nnz: usize,
    /// `|Ax - b|_inf / |b|_inf` on the constrained system.
    pub residual: f64,
}

impl SparseSystem {
    pub fn n_dofs(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn rhs_mut(&mut self) -> &mut [f64] {
        &mut self.rhs
    }

    /// Entry lookup (zero when outside the pattern).
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.col_idx[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    /// Prescribes `dof = value`. Constraining the same dof twice is allowed
    /// only with an equal value.
    pub fn constrain(&mut self, dof: usize, value: f64) -> Result<()> {
        if dof >= self.n {
            return Err(Error::DofOutOfRange { dof, n: self.n });
        }
        if let Some(prev) = self.constraints[dof] {
            if prev != value {
                return Err(Error::ConflictingConstraint { dof, first: prev, second: value });
            }
        }
        self.constraints[dof] = Some(value);
        Ok(())
    }

    /// Applies one Dirichlet value to a whole (node set, field) pair.
    pub fn apply_dirichlet(
        &mut self,
        layout: &DofLayout,
        nodes: &[usize],
        field: usize,
        value: f64,
    ) -> Result<()> {
        for &n in nodes {
            self.constrain(layout.dof(n, field), value)?;
        }
        Ok(())
    }

    /// Moves constrained columns to the right-hand side and rewrites
    /// constrained rows as identity rows. Idempotent.
    pub fn eliminate_constraints(&mut self) {
        if self.eliminated {
            return;
        }
        for r in 0..self.n {
            let lo = self.row_ptr[r];
            let hi = self.row_ptr[r + 1];
            if let Some(v) = self.constraints[r] {
                for k in lo..hi {
                    self.vals[k] = if self.col_idx[k] == r { 1.0 } else { 0.0 };
                }
                self.rhs[r] = v;
            } else {
                for k in lo..hi {
                    if let Some(vc) = self.constraints[self.col_idx[k]] {
                        self.rhs[r] -= self.vals[k] * vc;
                        self.vals[k] = 0.0;
                    }
                }
            }
        }
        self.eliminated = true;
    }

    /// `y = A x` on the current (possibly eliminated) matrix.
    pub fn spmv(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// Direct sparse LU solve with partial pivoting.
    pub fn solve(&mut self) -> Result<(Vec<f64>, SolveReport)> {
        self.eliminate_constraints();
        let mut trips = Vec::with_capacity(self.vals.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trips.push(Triplet::new(r, self.col_idx[k], self.vals[k]));
            }
        }
        let a = SparseColMat::try_new_from_triplets(self.n, self.n, &trips)
            .map_err(|_| Error::NumericalSingular)?;
        let sym = SymbolicLu::try_new(a.symbolic()).map_err(|_| Error::NumericalSingular)?;
        let lu = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            Lu::try_new_with_symbolic(sym, a.as_ref())
        }))
        .map_err(|_| Error::NumericalSingular)? // faer panics on an exact zero pivot
        .map_err(|e| match e {
            faer::sparse::linalg::LuError::SymbolicSingular { index } => {
                Error::StructuralSingular { col: index }
            }
            _ => Error::NumericalSingular,
        })?;

        let mut x = faer::Mat::<f64>::from_fn(self.n, 1, |i, _| self.rhs[i]);
        lu.solve_in_place(x.as_mut());
        let x: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();

        let ax = self.spmv(&x);
        let bnorm = self.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rnorm = ax
            .iter()
            .zip(&self.rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
        if !residual.is_finite() || residual > self.residual_tol {
            return Err(Error::ResidualTooLarge { residual, tol: self.residual_tol });
        }
        Ok((x, SolveReport { n_dofs: self.n, nnz: self.vals.len(), residual }))
    }

    /// Matrix Market coordinate dump of the current matrix values.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n, self.n, self.vals.len())?;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(w, "{} {} {:.17e}", r + 1, self.col_idx[k] + 1, self.vals[k])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_identity_twice() {
        let mut b = SystemBuilder::new(2);
        let eye = [1.0, 0.0, 0.0, 1.0];
        b.scatter_add(&eye, None, &[0, 1]).unwrap();
        b.scatter_add(&eye, None, &[0, 1]).unwrap();
        let s = b.finalize();
        assert_eq!(s.get(0, 0), 2.0);
        assert_eq!(s.get(1, 1), 2.0);
        assert_eq!(s.get(0, 1), 0.0);
    }

    #[test]
    fn scatter_rejects_out_of_range() {
        let mut b = SystemBuilder::new(2);
        assert!(b.scatter_add(&[1.0], None, &[5]).is_err());
        assert!(b.add(0, 7, 1.0).is_err());
    }

    #[test]
    fn permuted_assembly_is_bit_identical() {
        // 1D Laplacian, h = 0.5: local (1/h) [[1,-1],[-1,1]]
        let local = [2.0, -2.0, -2.0, 2.0];
        let assemble = |order: &[usize]| {
            let mut b = SystemBuilder::new(3);
            for &e in order {
                b.scatter_add(&local, None, &[e, e + 1]).unwrap();
            }
            b.finalize()
        };
        let s1 = assemble(&[0, 1]);
        let s2 = assemble(&[1, 0]);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(s1.get(r, c).to_bits(), s2.get(r, c).to_bits());
            }
        }
        // interior row of the assembled Laplacian: (-2, 4, -2)
        assert_eq!(s1.get(1, 0), -2.0);
        assert_eq!(s1.get(1, 1), 4.0);
        assert_eq!(s1.get(1, 2), -2.0);
    }

    #[test]
    fn dirichlet_linear_solution() {
        // (1/h)[-1 2 -1] psi = 0 on 4 elements, psi(0)=0, psi(1)=1 -> linear
        let n = 5;
        let h = 0.25;
        let mut b = SystemBuilder::new(n);
        let local = [1.0 / h, -1.0 / h, -1.0 / h, 1.0 / h];
        for e in 0..4 {
            b.scatter_add(&local, None, &[e, e + 1]).unwrap();
        }
        let mut s = b.finalize();
        s.constrain(0, 0.0).unwrap();
        s.constrain(4, 1.0).unwrap();
        let (x, rep) = s.solve().unwrap();
        for i in 0..n {
            assert!((x[i] - 0.25 * i as f64).abs() < 1e-13);
        }
        assert!(rep.residual <= 1e-10);
    }

    #[test]
    fn all_dofs_constrained_returns_prescribed() {
        let mut b = SystemBuilder::new(3);
        b.scatter_add(&[1.0, 2.0, 2.0, 1.0], None, &[0, 1]).unwrap();
        b.scatter_add(&[1.0, -1.0, -1.0, 1.0], None, &[1, 2]).unwrap();
        let mut s = b.finalize();
        for (d, v) in [(0, 3.0), (1, -1.5), (2, 7.0)] {
            s.constrain(d, v).unwrap();
        }
        let (x, _) = s.solve().unwrap();
        assert_eq!(x, vec![3.0, -1.5, 7.0]);
    }

    #[test]
    fn conflicting_constraint_rejected() {
        let mut b = SystemBuilder::new(1);
        b.add(0, 0, 1.0).unwrap();
        let mut s = b.finalize();
        s.constrain(0, 1.0).unwrap();
        s.constrain(0, 1.0).unwrap(); // same value is fine
        assert!(matches!(
            s.constrain(0, 2.0),
            Err(Error::ConflictingConstraint { .. })
        ));
    }

    #[test]
    fn identity_system_returns_rhs() {
        let mut b = SystemBuilder::new(4);
        for i in 0..4 {
            b.add(i, i, 1.0).unwrap();
            b.add_rhs(i, i as f64 - 1.5).unwrap();
        }
        let (x, _) = b.finalize().solve().unwrap();
        for i in 0..4 {
            assert_eq!(x[i], i as f64 - 1.5);
        }
    }

    #[test]
    fn nonsymmetric_solve_matches_dense_oracle() {
        // Galerkin advection-diffusion at Pe = 0.5 on 8 elements
        let n_el = 8;
        let n = n_el + 1;
        let h = 1.0 / n_el as f64;
        let pe = 0.5;
        let c = 2.0 * pe / h;
        let mut b = SystemBuilder::new(n);
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for e in 0..n_el {
            let local = [
                1.0 / h - c / 2.0,
                -1.0 / h + c / 2.0,
                -1.0 / h - c / 2.0,
                1.0 / h + c / 2.0,
            ];
            b.scatter_add(&local, Some(&[h / 2.0, h / 2.0]), &[e, e + 1]).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    dense[(e + i, e + j)] += local[i * 2 + j];
                }
            }
        }
        let mut s = b.finalize();
        s.constrain(0, 0.0).unwrap();
        s.constrain(n - 1, 0.0).unwrap();
        let (x, _) = s.solve().unwrap();

        let mut rhs = nalgebra::DVector::<f64>::from_element(n, h);
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        rhs[1] -= 0.0; // boundary columns carry zero prescribed values
        for r in 0..n {
            dense[(0, r)] = if r == 0 { 1.0 } else { 0.0 };
            dense[(n - 1, r)] = if r == n - 1 { 1.0 } else { 0.0 };
            if r != 0 && r != n - 1 {
                dense[(r, 0)] = 0.0;
                dense[(r, n - 1)] = 0.0;
            }
        }
        rhs[1] = h; // unchanged: prescribed values are zero
        let xd = dense.lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert!((x[i] - xd[i]).abs() < 1e-12, "i={i}: {} vs {}", x[i], xd[i]);
        }
    }

    #[test]
    fn singular_matrix_reports_error() {
        let mut b = SystemBuilder::new(2);
        b.add(0, 0, 1.0).unwrap();
        b.add(0, 1, 1.0).unwrap();
        b.add(1, 0, 1.0).unwrap();
        b.add(1, 1, 1.0).unwrap();
        b.add_rhs(0, 1.0).unwrap();
        let mut s = b.finalize();
        assert!(s.solve().is_err());
    }

    #[test]
    fn replace_row_inserts_constraint_row() {
        let mut b = SystemBuilder::new(3);
        for i in 0..3 {
            b.add(i, i, 2.0).unwrap();
        }
        b.add_rhs(1, 5.0).unwrap();
        b.replace_row(1, vec![(0, 1.0), (1, 1.0), (2, 1.0)], 6.0).unwrap();
        let mut s = b.finalize();
        let (x, _) = s.solve().unwrap();
        // rows 0,2: 2x = 0; row 1: x0+x1+x2 = 6
        assert!((x[0] - 0.0).abs() < 1e-14);
        assert!((x[1] - 6.0).abs() < 1e-12);
        assert!((x[2] - 0.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_market_roundtrip_shape() {
        let mut b = SystemBuilder::new(2);
        b.add(0, 0, 1.5).unwrap();
        b.add(1, 0, -2.0).unwrap();
        let s = b.finalize();
        let mut buf = Vec::new();
        s.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
        assert!(text.contains("2 2 "));
        assert!(text.contains("2 1 -2"));
    }
}
