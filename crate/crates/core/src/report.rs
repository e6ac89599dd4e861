//! Error norms, experimental orders of convergence, and the convergence
//! runners that produce the per-problem refinement tables.

use crate::error::{Error, Result};
use crate::problems1d::{
    analytic_mc1d, analytic_transport, solve_mc1d, solve_transport1d, Mc1dConfig,
    Transport1dConfig,
};
use crate::problems2d::{solve_circ_a, CircAConfig};

/// `(L2, absolute)` error pair: root-mean-square and maximum of the
/// pointwise differences over aligned sample sets.
pub fn error_norms(numeric: &[f64], oracle: &[f64]) -> Result<(f64, f64)> {
    if numeric.is_empty() || numeric.len() != oracle.len() {
        return Err(Error::Config(format!(
            "error_norms needs equal-length nonempty samples, got {} vs {}",
            numeric.len(),
            oracle.len()
        )));
    }
    let mut sq = 0.0;
    let mut mx: f64 = 0.0;
    for (a, b) in numeric.iter().zip(oracle) {
        let d = a - b;
        sq += d * d;
        mx = mx.max(d.abs());
    }
    Ok(((sq / numeric.len() as f64).sqrt(), mx))
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n_elems: usize,
    /// Representative mesh spacing used for the order computation.
    pub h: f64,
    pub l2_error: f64,
    pub abs_error: f64,
    /// `log(e_prev / e) / log(h_prev / h)` from the absolute errors;
    /// `None` on the first row.
    pub eoc: Option<f64>,
}

/// Per-refinement error table for one problem and formulation.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub problem: String,
    pub formulation: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Builds the report from `(n_elems, h, l2, abs)` tuples, filling in the
    /// experimental orders of convergence.
    pub fn from_errors(
        problem: &str,
        formulation: &str,
        data: &[(usize, f64, f64, f64)],
    ) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::Config("a convergence ladder needs at least 2 levels".into()));
        }
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(data.len());
        for &(n_elems, h, l2, abs) in data {
            let eoc = rows.last().map(|prev: &ConvergenceRow| eoc(prev.abs_error, prev.h, abs, h)).transpose()?;
            rows.push(ConvergenceRow { n_elems, h, l2_error: l2, abs_error: abs, eoc });
        }
        Ok(Self { problem: problem.into(), formulation: formulation.into(), rows })
    }

    pub fn final_eoc(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.eoc)
    }
}

/// Experimental order of convergence between two levels, computed from the
/// absolute error: `log(e_coarse / e_fine) / log(h_coarse / h_fine)`.
pub fn eoc(e_coarse: f64, h_coarse: f64, e_fine: f64, h_fine: f64) -> Result<f64> {
    if e_fine <= 0.0 || e_coarse < 0.0 {
        return Err(Error::Config("EOC needs positive errors".into()));
    }
    if h_fine <= 0.0 || h_coarse <= h_fine {
        return Err(Error::Config("EOC needs a monotone mesh ladder".into()));
    }
    Ok((e_coarse / e_fine).ln() / (h_coarse / h_fine).ln())
}

/// Moving-conductor refinement ladder: recovered `b = -dA/dz` at element
/// midpoints against the closed-form solution at the same points.
pub fn mc1d_convergence(base: &Mc1dConfig, ladder: &[usize]) -> Result<ConvergenceReport> {
    let mut data = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let cfg = Mc1dConfig { n_elems: n, ..base.clone() };
        let sol = solve_mc1d(&cfg)?;
        let rec = sol.recovered_b_midpoints();
        let num: Vec<f64> = rec.iter().map(|&(_, b)| b).collect();
        let ora: Vec<f64> = rec.iter().map(|&(z, _)| analytic_mc1d(&cfg, z).1).collect();
        let (l2, abs) = error_norms(&num, &ora)?;
        let h = (cfg.domain.1 - cfg.domain.0) / n as f64;
        data.push((n, h, l2, abs));
    }
    ConvergenceReport::from_errors("mc1d", base.formulation.name(), &data)
}

/// Transport refinement ladder: nodal `psi` against the closed form.
pub fn transport_convergence(
    base: &Transport1dConfig,
    ladder: &[usize],
) -> Result<ConvergenceReport> {
    let mut data = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let cfg = Transport1dConfig { n_elems: n, ..base.clone() };
        let sol = solve_transport1d(&cfg)?;
        let num = sol.psi();
        let ora: Vec<f64> =
            sol.node_zs().iter().map(|&z| analytic_transport(&cfg, z)).collect();
        let (l2, abs) = error_norms(&num, &ora)?;
        let h = (cfg.domain.1 - cfg.domain.0) / n as f64;
        data.push((n, h, l2, abs));
    }
    ConvergenceReport::from_errors("transport1d", base.formulation.name(), &data)
}

/// Circulation-of-A ladder against a finer self-reference: levels refine the
/// advection direction by 2 each; the reference solution is `ref_extra`
/// further refinements beyond the last level. Errors sample the recovered
/// reaction field at the coarse element centers.
pub fn circ_a_convergence(
    base: &CircAConfig,
    refine_levels: &[usize],
    ref_extra: u32,
) -> Result<ConvergenceReport> {
    if refine_levels.len() < 2 {
        return Err(Error::Config("ladder needs at least two levels".into()));
    }
    let ref_cfg = CircAConfig {
        refine_z: refine_levels.last().unwrap() * (1usize << ref_extra),
        ..base.clone()
    };
    let reference = solve_circ_a(&ref_cfg)?;
    let mut data = Vec::with_capacity(refine_levels.len());
    for &refine in refine_levels {
        let cfg = CircAConfig { refine_z: refine, ..base.clone() };
        let sol = solve_circ_a(&cfg)?;
        let centers = sol.recovered_b_centers()?;
        let pts: Vec<[f64; 3]> = centers.iter().map(|&(p, _)| p).collect();
        let num: Vec<f64> = centers.iter().map(|&(_, b)| b).collect();
        let ora = reference.recovered_b_at(&pts)?;
        let (l2, abs) = error_norms(&num, &ora)?;
        let hz = cfg.lz / (cfg.nz * refine) as f64;
        data.push((cfg.n_elems(), hz, l2, abs));
    }
    ConvergenceReport::from_errors("circ_a", base.formulation.name(), &data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_zero_norms() {
        let (l2, ab) = error_norms(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((l2, ab), (0.0, 0.0));
    }

    #[test]
    fn norm_arithmetic() {
        // difference vector (3, 4): L2 = sqrt(12.5), abs = 4
        let (l2, ab) = error_norms(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!((l2 - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(ab, 4.0);
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(error_norms(&[], &[]).is_err());
        assert!(error_norms(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn eoc_from_printed_table_values() {
        // halving h with absolute errors 2.04e-2 -> 1.05e-2 gives 0.96
        let q = eoc(2.04e-2, 0.02, 1.05e-2, 0.01).unwrap();
        assert!((q - 0.96).abs() < 0.005, "eoc = {q}");
    }

    #[test]
    fn eoc_quartering_is_second_order() {
        let q = eoc(4.0e-3, 0.1, 1.0e-3, 0.05).unwrap();
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eoc_equal_errors_is_zero() {
        let q = eoc(1.0e-3, 0.1, 1.0e-3, 0.05).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn report_fills_orders() {
        let rep = ConvergenceReport::from_errors(
            "mc1d",
            "wr",
            &[(50, 0.02, 2.49e-3, 2.04e-2), (100, 0.01, 1.76e-3, 1.05e-2)],
        )
        .unwrap();
        assert!(rep.rows[0].eoc.is_none());
        let q = rep.rows[1].eoc.unwrap();
        assert!((q - 0.96).abs() < 0.005);
        assert_eq!(rep.final_eoc(), rep.rows[1].eoc);
    }

    #[test]
    fn eoc_rejects_bad_ladders() {
        assert!(eoc(1.0, 0.1, 0.0, 0.05).is_err());
        assert!(eoc(1.0, 0.05, 0.5, 0.1).is_err());
    }
}
