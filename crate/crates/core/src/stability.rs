//! Discrete-stability analysis of the 1D schemes via Z-transforms.
//!
//! Interior-node difference-equation stencils are extracted from assembled
//! systems on a unit-spacing mesh (so the printed nondimensional form holds
//! exactly), the auxiliary field is eliminated in the Z domain, and the poles
//! of the resulting rational transfer function classify the scheme: a
//! negative or complex pole flips sign from node to node, a nonnegative real
//! pole set is non-oscillatory.

use crate::error::{Error, Result};
use crate::linalg::DofLayout;
use crate::mesh::build_line_mesh;
use crate::problems1d::{assemble_mc1d, Source1d};
use crate::Formulation;
use nalgebra::{Complex, DMatrix};

/// Coefficient triplet `(c_{n-1}, c_n, c_{n+1})` of one field in one
/// difference-equation row.
pub type Triplet = [f64; 3];

/// One interior difference-equation row: coefficients per unknown field plus
/// the source-field triplet.
#[derive(Debug, Clone)]
pub struct StencilRow {
    /// Field whose equation this row is (index into `fields`).
    pub equation: usize,
    /// One triplet per unknown field.
    pub coeffs: Vec<Triplet>,
    /// Source (applied field) triplet.
    pub rhs: Triplet,
}

/// Interior-node stencils of a formulation at one Peclet number.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub formulation: Formulation,
    pub pe: f64,
    pub fields: Vec<String>,
    pub rows: Vec<StencilRow>,
}

/// Rational transfer function in Z between the primary unknown and the
/// applied field, with its poles and zeros.
#[derive(Debug, Clone)]
pub struct StencilTF {
    /// Numerator coefficients, lowest power first.
    pub num: Vec<f64>,
    /// Denominator coefficients, lowest power first.
    pub den: Vec<f64>,
    pub poles: Vec<Complex<f64>>,
    pub zeros: Vec<Complex<f64>>,
}

/// Verdict for one Peclet sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NonOscillatory,
    Oscillatory,
}

/// Pole classification over a Peclet range.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub formulation: Formulation,
    pub samples: Vec<PeSample>,
}

#[derive(Debug, Clone)]
pub struct PeSample {
    pub pe: f64,
    pub poles: Vec<Complex<f64>>,
    /// Poles that survive pole/zero cancellation.
    pub active_poles: Vec<Complex<f64>>,
    pub verdict: Verdict,
}

/// Relative distance under which a pole and a zero are treated as a
/// cancelling pair (the exact transfer function carries a nearly common
/// factor whose pole-zero spacing shrinks as 1/Pe^2).
pub const CANCEL_TOL: f64 = 0.05;

/// Extracts the interior difference-equation stencils of `formulation` at
/// Peclet number `pe` from an assembled system on a unit-spacing mesh.
///
/// With spacing 1 and `mu sigma u = 2 Pe`, the assembled rows reproduce the
/// nondimensional difference equations directly; each row is normalized so
/// its own field carries the pattern `(-1, 2, -1)`.
pub fn extract_stencil(formulation: Formulation, pe: f64) -> Result<Stencil> {
    if pe < 0.0 || !pe.is_finite() {
        return Err(Error::Config(format!("need a finite Pe >= 0, got {pe}")));
    }
    let n_elems = 10usize;
    let mesh = build_line_mesh(n_elems, 0.0, n_elems as f64)?;
    let c = 2.0 * pe;

    // assemble once per unit source node to read off the rhs triplets
    let assemble_with_nodal = |vals: &[f64]| -> Result<(Vec<Vec<f64>>, DofLayout)> {
        let (sys, layout) = assemble_mc1d(&mesh, c, formulation, &Source1d::Nodal(vals))?;
        let n = layout.n_dofs();
        let s = sys.finalize();
        let mut dense_rows = Vec::with_capacity(n);
        for r in 0..n {
            let mut row = vec![0.0; n + 1];
            for (col, v) in s.row(r) {
                row[col] = v;
            }
            row[n] = s.rhs()[r];
            dense_rows.push(row);
        }
        Ok((dense_rows, layout))
    };

    let zero_src = vec![0.0; mesh.n_nodes()];
    let (base, layout) = assemble_with_nodal(&zero_src)?;
    let nf = layout.n_fields();
    let n_dofs = layout.n_dofs();

    // rhs response columns for a unit source at each probe node
    let probe_nodes: Vec<usize> = (3..=7).collect();
    let mut rhs_cols = std::collections::BTreeMap::new();
    for &j in &probe_nodes {
        let mut vals = zero_src.clone();
        vals[j] = 1.0;
        let (rows, _) = assemble_with_nodal(&vals)?;
        let col: Vec<f64> = (0..n_dofs).map(|r| rows[r][n_dofs]).collect();
        rhs_cols.insert(j, col);
    }

    let read_rows = |node: usize| -> Result<Vec<StencilRow>> {
        let mut out = Vec::new();
        for eq in 0..nf {
            let r = layout.dof(node, eq);
            // normalize so the equation's own field has center coefficient 2
            let center = base[r][layout.dof(node, eq)];
            if center == 0.0 {
                return Err(Error::StencilNotUniform(format!(
                    "zero diagonal in equation {eq} at node {node}"
                )));
            }
            let scale = 2.0 / center;
            let mut coeffs = Vec::with_capacity(nf);
            for f in 0..nf {
                coeffs.push([
                    base[r][layout.dof(node - 1, f)] * scale,
                    base[r][layout.dof(node, f)] * scale,
                    base[r][layout.dof(node + 1, f)] * scale,
                ]);
            }
            let rhs = [
                rhs_cols[&(node - 1)][r] * scale,
                rhs_cols[&node][r] * scale,
                rhs_cols[&(node + 1)][r] * scale,
            ];
            // the row must vanish outside the three-node window
            for col in 0..n_dofs {
                let nd = col / nf;
                if (nd + 1 < node || nd > node + 1)
                    && base[r][col].abs() > 1e-12 * center.abs()
                {
                    return Err(Error::StencilNotUniform(format!(
                        "row at node {node} touches node {nd}"
                    )));
                }
            }
            out.push(StencilRow { equation: eq, coeffs, rhs });
        }
        Ok(out)
    };

    // three consecutive interior node sets must agree (translation invariance)
    let rows4 = read_rows(4)?;
    let rows5 = read_rows(5)?;
    let rows6 = read_rows(6)?;
    let scale = 1.0 + pe.abs();
    for (a, b) in rows4.iter().zip(&rows6).chain(rows5.iter().zip(&rows6)) {
        for (ca, cb) in a.coeffs.iter().zip(&b.coeffs) {
            for k in 0..3 {
                if (ca[k] - cb[k]).abs() > 1e-12 * scale {
                    return Err(Error::StencilNotUniform(format!(
                        "coefficients differ between interior nodes: {} vs {}",
                        ca[k], cb[k]
                    )));
                }
            }
        }
        for k in 0..3 {
            if (a.rhs[k] - b.rhs[k]).abs() > 1e-12 * scale {
                return Err(Error::StencilNotUniform(
                    "rhs differs between interior nodes".into(),
                ));
            }
        }
    }

    Ok(Stencil { formulation, pe, fields: layout.fields.clone(), rows: rows5 })
}

// --- small dense polynomial helpers (lowest power first) -------------------

fn poly_from_triplet(t: Triplet) -> Vec<f64> {
    vec![t[0], t[1], t[2]]
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn poly_trim(mut p: Vec<f64>) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while p.len() > 1 && p.last().unwrap().abs() <= 1e-13 * scale {
        p.pop();
    }
    p
}

/// Roots via companion-matrix eigenvalues (robust at near-double roots).
pub fn poly_roots(p: &[f64]) -> Vec<Complex<f64>> {
    let p = poly_trim(p.to_vec());
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
        if i > 0 {
            comp[(i, i - 1)] = 1.0;
        }
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

fn poly_from_roots(roots: &[Complex<f64>], lead: f64) -> Vec<f64> {
    let mut p = vec![Complex::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex::new(0.0, 0.0); p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i] -= c * r;
            next[i + 1] += c;
        }
        p = next;
    }
    p.iter().map(|c| c.re * lead).collect()
}

/// Forms the transfer function `primary / source` by eliminating the
/// auxiliary field in the Z domain, exactly as the analysis substitutes the
/// auxiliary equation into the primary one; the 2x2 determinant route is
/// computed as a cross-check and must give the same poles.
pub fn transfer_function(stencil: &Stencil) -> Result<StencilTF> {
    let (num, den) = match stencil.rows.len() {
        1 => {
            let row = &stencil.rows[0];
            (poly_from_triplet(row.rhs), poly_from_triplet(row.coeffs[0]))
        }
        2 => {
            let ra = &stencil.rows[0]; // primary equation
            let rb = &stencil.rows[1]; // auxiliary equation
            let p_aa = poly_from_triplet(ra.coeffs[0]);
            let p_ab = poly_from_triplet(ra.coeffs[1]);
            let p_arhs = poly_from_triplet(ra.rhs);
            let p_ba = poly_from_triplet(rb.coeffs[0]);
            let p_bb = poly_from_triplet(rb.coeffs[1]);
            let p_brhs = poly_from_triplet(rb.rhs);
            // substitute aux = (rhs_a - P_aa A) / P_ab into the aux equation
            let num = poly_sub(&poly_mul(&p_brhs, &p_ab), &poly_mul(&p_bb, &p_arhs));
            let den = poly_sub(&poly_mul(&p_ba, &p_ab), &poly_mul(&p_bb, &p_aa));
            // determinant route gives the same polynomials up to overall sign
            let det_num = poly_sub(&poly_mul(&p_arhs, &p_bb), &poly_mul(&p_ab, &p_brhs));
            let det_den = poly_sub(&poly_mul(&p_aa, &p_bb), &poly_mul(&p_ab, &p_ba));
            let p1 = poles_of(&den)?;
            let p2 = poles_of(&det_den)?;
            for (a, b) in p1.iter().zip(&p2) {
                if (a - b).norm() > 1e-10 * (1.0 + a.norm()) {
                    return Err(Error::Config(format!(
                        "elimination and determinant poles disagree: {a} vs {b}"
                    )));
                }
            }
            let _ = det_num;
            (num, den)
        }
        n => {
            return Err(Error::Config(format!(
                "transfer function needs 1 or 2 fields, got {n}"
            )))
        }
    };
    let num = poly_trim(num);
    let den = poly_trim(den);
    if den.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let poles = sorted_roots(&den);
    let zeros = sorted_roots(&num);
    Ok(StencilTF { num, den, poles, zeros })
}

fn poles_of(den: &[f64]) -> Result<Vec<Complex<f64>>> {
    let d = poly_trim(den.to_vec());
    if d.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(sorted_roots(&d))
}

fn sorted_roots(p: &[f64]) -> Vec<Complex<f64>> {
    let mut r = poly_roots(p);
    r.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    r
}

/// Removes pole/zero pairs closer than [`CANCEL_TOL`] in relative distance
/// and returns the surviving poles.
pub fn active_poles(tf: &StencilTF) -> Vec<Complex<f64>> {
    let mut zeros = tf.zeros.clone();
    let mut active = Vec::new();
    'poles: for &p in &tf.poles {
        for (i, &z) in zeros.iter().enumerate() {
            if (p - z).norm() <= CANCEL_TOL * p.norm().max(z.norm()).max(1e-12) {
                zeros.remove(i);
                continue 'poles;
            }
        }
        active.push(p);
    }
    active
}

fn is_nonneg_real(p: Complex<f64>) -> bool {
    p.im.abs() <= 1e-8 * (1.0 + p.re.abs()) && p.re >= -1e-9
}

/// Classifies a formulation over a range of Peclet samples.
pub fn classify(formulation: Formulation, pe_samples: &[f64]) -> Result<StabilityReport> {
    let mut samples = Vec::with_capacity(pe_samples.len());
    for &pe in pe_samples {
        let stencil = extract_stencil(formulation, pe)?;
        let tf = transfer_function(&stencil)?;
        let active = active_poles(&tf);
        let verdict = if active.iter().all(|&p| is_nonneg_real(p)) {
            Verdict::NonOscillatory
        } else {
            Verdict::Oscillatory
        };
        samples.push(PeSample { pe, poles: tf.poles.clone(), active_poles: active, verdict });
    }
    Ok(StabilityReport { formulation, samples })
}

/// Cancels the near-common factors and renormalizes; used to compare the
/// large-Pe limit against the closed asymptotic form
/// `(Z^2 - 1) / (2 (Z - 1)^2)`.
pub fn reduced_tf(tf: &StencilTF) -> StencilTF {
    let mut zeros = tf.zeros.clone();
    let mut poles_keep = Vec::new();
    'p: for &p in &tf.poles {
        for (i, &z) in zeros.iter().enumerate() {
            if (p - z).norm() <= CANCEL_TOL * p.norm().max(z.norm()).max(1e-12) {
                zeros.remove(i);
                continue 'p;
            }
        }
        poles_keep.push(p);
    }
    let num_lead = *poly_trim(tf.num.clone()).last().unwrap();
    let den_lead = *poly_trim(tf.den.clone()).last().unwrap();
    let num = poly_from_roots(&zeros, 1.0);
    let den = poly_from_roots(&poles_keep, 1.0);
    let gain = num_lead / den_lead;
    let num: Vec<f64> = num.iter().map(|c| c * gain).collect();
    StencilTF { poles: poles_keep, zeros, num, den }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_triplet(got: Triplet, want: Triplet, tol: f64) {
        for k in 0..3 {
            assert!(
                (got[k] - want[k]).abs() <= tol,
                "triplet mismatch: {got:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn wr_stencils_match_printed_difference_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pe = 10f64.powf(rng.random_range(-1.0..4.0));
            let s = extract_stencil(Formulation::WeightedResidual, pe).unwrap();
            let tol = 1e-12 * (1.0 + pe);
            let a_row = &s.rows[0];
            assert_triplet(a_row.coeffs[0], [-1.0, 2.0, -1.0], tol);
            assert_triplet(a_row.coeffs[1], [-pe / 3.0, -4.0 * pe / 3.0, -pe / 3.0], tol);
            assert_triplet(a_row.rhs, [pe / 3.0, 4.0 * pe / 3.0, pe / 3.0], tol);
            let b_row = &s.rows[1];
            assert_triplet(b_row.coeffs[1], [-1.0, 2.0, -1.0], tol);
            assert_triplet(b_row.coeffs[0], [-2.0 * pe, 4.0 * pe, -2.0 * pe], tol);
            assert_triplet(b_row.rhs, [pe, 0.0, -pe], tol);
        }
    }

    #[test]
    fn galerkin_stencil_is_upwindless_advection_diffusion() {
        for pe in [0.5, 2.0, 10.0, 400.0] {
            let s = extract_stencil(Formulation::Galerkin, pe).unwrap();
            let tol = 1e-12 * (1.0 + pe);
            assert_triplet(s.rows[0].coeffs[0], [-1.0 - pe, 2.0, -1.0 + pe], tol);
        }
    }

    #[test]
    fn wr_asymptotic_transfer_function() {
        let s = extract_stencil(Formulation::WeightedResidual, 1e6).unwrap();
        let tf = transfer_function(&s).unwrap();
        let red = reduced_tf(&tf);
        // target: (Z^2 - 1) / (2 (Z^2 - 2Z + 1))
        let den_scale = red.den.last().unwrap();
        let den: Vec<f64> = red.den.iter().map(|c| c / den_scale).collect();
        let num: Vec<f64> = red.num.iter().map(|c| c / den_scale / 0.5).collect();
        assert_eq!(den.len(), 3);
        assert!((den[0] - 1.0).abs() < 1e-4, "den {den:?}");
        assert!((den[1] + 2.0).abs() < 1e-4, "den {den:?}");
        assert!((den[2] - 1.0).abs() < 1e-4, "den {den:?}");
        assert_eq!(num.len(), 3);
        for (g, w) in num.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((g - w).abs() < 1e-4, "num {num:?}");
        }
    }

    #[test]
    fn wr_poles_nonoscillatory_over_pe_sweep() {
        let report =
            classify(Formulation::WeightedResidual, &[1.0, 10.0, 100.0, 1000.0, 10000.0])
                .unwrap();
        for s in &report.samples {
            assert_eq!(s.verdict, Verdict::NonOscillatory, "Pe = {}", s.pe);
        }
        // at Pe = 1e4 the active poles sit within 0.05 of the double root at 1
        let s = classify(Formulation::WeightedResidual, &[1e4]).unwrap();
        for p in &s.samples[0].active_poles {
            assert!(is_nonneg_real(*p));
            assert!((p.re - 1.0).abs() < 0.05, "pole {p}");
        }
    }

    #[test]
    fn galerkin_pole_is_exact_rational() {
        for pe in [2.0, 10.0, 50.0, 4000.0] {
            let s = extract_stencil(Formulation::Galerkin, pe).unwrap();
            let tf = transfer_function(&s).unwrap();
            let want = (1.0 + pe) / (1.0 - pe);
            let found = tf.poles.iter().any(|p| {
                p.im.abs() < 1e-10 && (p.re - want).abs() < 1e-10 * (1.0 + want.abs())
            });
            assert!(found, "Pe {pe}: poles {:?} missing {want}", tf.poles);
            let report = classify(Formulation::Galerkin, &[pe]).unwrap();
            assert_eq!(report.samples[0].verdict, Verdict::Oscillatory);
        }
    }

    #[test]
    fn zero_peclet_is_pure_diffusion() {
        for formulation in [Formulation::Galerkin, Formulation::WeightedResidual] {
            let report = classify(formulation, &[0.0]).unwrap();
            assert_eq!(report.samples[0].verdict, Verdict::NonOscillatory);
            for p in &report.samples[0].poles {
                assert!((p.re - 1.0).abs() < 1e-6 && p.im.abs() < 1e-6, "pole {p}");
            }
        }
    }

    #[test]
    fn companion_roots_handle_double_root() {
        // (Z - 1)^2 = 1 - 2Z + Z^2
        let r = poly_roots(&[1.0, -2.0, 1.0]);
        assert_eq!(r.len(), 2);
        for root in r {
            assert!((root.re - 1.0).abs() < 1e-6 && root.im.abs() < 1e-6);
        }
    }
}
