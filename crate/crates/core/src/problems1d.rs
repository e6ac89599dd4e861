//! 1D moving-conductor and transport solvers with closed-form oracles.
//!
//! Moving conductor: `-A'' + c A' = c B(z)` with `c = mu sigma u_z` and a
//! piecewise-constant applied field `B`. The weighted-residual scheme carries
//! the reaction field `b = -A'` as a second nodal unknown: the `A` equation is
//! Galerkin-weighted with the advective term written through `b`, and the `b`
//! equation is weighted with `dN/dz` so that no bare first-derivative term
//! remains.
//!
//! Transport: `-k psi'' + u psi' = S` with hard Dirichlet values at both ends
//! and the flux `F = psi'` as the auxiliary unknown.
//!
//! The derivative-weighted auxiliary equations are assembled for every node,
//! but the full set of derivative weights sums to zero, which leaves exactly
//! one redundant (consistent) equation. One auxiliary row is therefore
//! replaced by the exact integral closure `int b = A(z0) - A(z1)`
//! (respectively `int F = psi(z1) - psi(z0)`), or by the far-field pin at the
//! outflow when the outflow boundary is natural.

use crate::error::{Error, Result};
use crate::linalg::{DofLayout, SolveReport, SystemBuilder};
use crate::mesh::{build_line_mesh, gauss_rule, Mesh};
use crate::solution::FieldSolution;
use crate::weakforms::{self, ElemQuad, TrialForm, WeightForm};
use crate::Formulation;
use std::sync::Arc;

/// Outflow treatment for the moving-conductor problem. The applied field of
/// the paper's test cases vanishes ahead of the outflow, so the exact reaction
/// field carries no outflow layer only when the outflow is left natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutflowBc {
    /// `A` free at `z1` (weak natural condition `A'(z1) = 0`).
    Natural,
    /// `A(z1) = 0` hard-imposed.
    Dirichlet,
}

/// 1D moving-conductor configuration.
#[derive(Debug, Clone)]
pub struct Mc1dConfig {
    /// Product `mu sigma u_z` (1/m).
    pub musigma_u: f64,
    /// Applied-field amplitude on the support interval (T).
    pub b_amp: f64,
    /// Support `[z_a, z_b]` of the applied field.
    pub support: (f64, f64),
    pub n_elems: usize,
    pub domain: (f64, f64),
    pub formulation: Formulation,
    pub outflow: OutflowBc,
}

impl Default for Mc1dConfig {
    fn default() -> Self {
        Self {
            musigma_u: 1000.0,
            b_amp: 1.0,
            support: (0.4, 0.6),
            n_elems: 50,
            domain: (0.0, 1.0),
            formulation: Formulation::WeightedResidual,
            outflow: OutflowBc::Natural,
        }
    }
}

/// Development knob: how the auxiliary-field equation set is closed and how
/// the source enters. Exercised by the closure-selection experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxClosure {
    /// Replace one auxiliary row by the exact integral identity.
    IntegralRow,
    /// Replace both boundary auxiliary rows by one-sided difference
    /// definitions of the auxiliary field.
    OneSidedBoth,
    /// One-sided definition at the inflow node only.
    OneSidedLeft,
    /// One-sided definition at the outflow node only.
    OneSidedRight,
    /// Second-order (3-point) one-sided definitions at both ends.
    OneSided2Both,
    /// Pin the auxiliary field to zero at both boundary nodes.
    AuxZeroBoth,
    /// Pin the auxiliary field to zero at the inflow node only.
    AuxZeroLeft,
}

/// Source representation knob: exact per-element quadrature with interval
/// splitting, or nodal interpolation of the source (the difference-equation
/// form of the paper carries nodal source values).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    SplitQuadrature,
    NodalInterpolation,
    /// Nodal interpolation with jump nodes carrying the mean of the one-sided
    /// limits.
    NodalMidJump,
}

impl Mc1dConfig {
    pub fn validate(&self) -> Result<()> {
        let (z0, z1) = self.domain;
        let (za, zb) = self.support;
        if self.n_elems == 0 || !(z1 > z0) {
            return Err(Error::Config("need n_elems >= 1 and z1 > z0".into()));
        }
        if !(za >= z0 && zb <= z1 && zb > za) {
            return Err(Error::Config("source support must lie inside the domain".into()));
        }
        if self.musigma_u < 0.0 {
            return Err(Error::Config("mu sigma u_z must be nonnegative".into()));
        }
        if self.formulation == Formulation::Supg {
            return Err(Error::Config(
                "the SU/PG baseline is provided for the transport equation".into(),
            ));
        }
        Ok(())
    }

    /// Per-element Peclet number `c h / 2`.
    pub fn peclet(&self) -> f64 {
        let h = (self.domain.1 - self.domain.0) / self.n_elems as f64;
        weakforms::peclet(self.musigma_u, h)
    }

    pub fn source(&self) -> impl Fn(f64) -> f64 + '_ {
        let (za, zb) = self.support;
        let amp = self.b_amp;
        move |z| if (za..=zb).contains(&z) { amp } else { 0.0 }
    }
}

/// Source description for an element-wise 1D load integral.
pub(crate) enum Source1d<'a> {
    /// A function of `z` with known discontinuity locations.
    Func { f: &'a dyn Fn(f64) -> f64, breaks: &'a [f64] },
    /// Nodally interpolated values (used for stencil extraction).
    Nodal(&'a [f64]),
}

/// Integrates `int w_i(z) f(z) dz` over element `e`, splitting the interval at
/// the source discontinuities so the quadrature never straddles a jump.
pub(crate) fn integrate_line_rhs(
    mesh: &Mesh,
    e: usize,
    weight: WeightForm,
    source: &Source1d,
) -> [f64; 2] {
    let nodes = mesh.elem_nodes(e);
    let zl = mesh.coords[nodes[0]][0];
    let zr = mesh.coords[nodes[1]][0];
    let h = zr - zl;
    let mut out = [0.0; 2];
    match source {
        Source1d::Nodal(vals) => {
            // f = sum_j N_j f_j; 2-point Gauss is exact for these integrands
            let ctx = ElemQuad::standard(mesh, e).expect("line element");
            let m = match weight {
                WeightForm::Value => weakforms::kernel_mass_pair(&ctx, &|_| 1.0),
                WeightForm::Grad(_) => {
                    weakforms::kernel_grad_weight_pair(&ctx, &|_| 1.0, 0, TrialForm::Value)
                }
            };
            for i in 0..2 {
                for j in 0..2 {
                    out[i] += m[i * 2 + j] * vals[nodes[j]];
                }
            }
        }
        Source1d::Func { f, breaks } => {
            let mut cuts = vec![zl];
            for &b in breaks.iter() {
                if b > zl && b < zr {
                    cuts.push(b);
                }
            }
            cuts.push(zr);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let gauss = gauss_rule(crate::mesh::ElementKind::Line2, 2).expect("order 2");
            for seg in cuts.windows(2) {
                let (a, b) = (seg[0], seg[1]);
                let half = 0.5 * (b - a);
                for (&xi, &w) in gauss.points.iter().zip(&gauss.weights) {
                    let z = 0.5 * (a + b) + half * xi[0];
                    // local coordinate within the parent element
                    let xe = 2.0 * (z - zl) / h - 1.0;
                    let n = [0.5 * (1.0 - xe), 0.5 * (1.0 + xe)];
                    let dn = [-1.0 / h, 1.0 / h];
                    let fv = f(z) * w * half;
                    for i in 0..2 {
                        let wi = match weight {
                            WeightForm::Value => n[i],
                            WeightForm::Grad(_) => dn[i],
                        };
                        out[i] += wi * fv;
                    }
                }
            }
        }
    }
    out
}

/// Trapezoid-consistent nodal weights `int N_j dz` used by integral closures.
fn nodal_integral_weights(mesh: &Mesh) -> Vec<f64> {
    let mut w = vec![0.0; mesh.n_nodes()];
    for e in 0..mesh.n_elems() {
        let nodes = mesh.elem_nodes(e);
        let h = mesh.coords[nodes[1]][0] - mesh.coords[nodes[0]][0];
        w[nodes[0]] += 0.5 * h;
        w[nodes[1]] += 0.5 * h;
    }
    w
}

pub(crate) fn assemble_mc1d(
    mesh: &Mesh,
    musigma_u: f64,
    formulation: Formulation,
    source: &Source1d,
) -> Result<(SystemBuilder, DofLayout)> {
    let c = musigma_u;
    match formulation {
        Formulation::Galerkin => {
            let layout = DofLayout::new(mesh.n_nodes(), &["a_y"]);
            let mut sys = SystemBuilder::new(layout.n_dofs());
            for e in 0..mesh.n_elems() {
                let ctx = ElemQuad::standard(mesh, e)?;
                let mut local = weakforms::kernel_diffusion(&ctx, &|_| 1.0);
                let adv = weakforms::kernel_pair(&ctx, WeightForm::Value, TrialForm::Grad(0), &|_| c);
                for (l, a) in local.iter_mut().zip(&adv) {
                    *l += a;
                }
                let rhs = integrate_line_rhs(mesh, e, WeightForm::Value, source);
                let dofs: Vec<usize> =
                    mesh.elem_nodes(e).iter().map(|&n| layout.dof(n, 0)).collect();
                sys.scatter_add(&local, Some(&rhs.map(|v| v * c)), &dofs)?;
            }
            Ok((sys, layout))
        }
        Formulation::WeightedResidual => {
            let layout = DofLayout::new(mesh.n_nodes(), &["a_y", "b_x"]);
            let mut sys = SystemBuilder::new(layout.n_dofs());
            for e in 0..mesh.n_elems() {
                let ctx = ElemQuad::standard(mesh, e)?;
                let stiff = weakforms::kernel_diffusion(&ctx, &|_| 1.0);
                let mass = weakforms::kernel_mass_pair(&ctx, &|_| 1.0);
                let rhs_n = integrate_line_rhs(mesh, e, WeightForm::Value, source);
                let rhs_g = integrate_line_rhs(mesh, e, WeightForm::Grad(0), source);
                let nodes = mesh.elem_nodes(e);
                for i in 0..2 {
                    let row_a = layout.dof(nodes[i], 0);
                    let row_b = layout.dof(nodes[i], 1);
                    for j in 0..2 {
                        let col_a = layout.dof(nodes[j], 0);
                        let col_b = layout.dof(nodes[j], 1);
                        let k = stiff[i * 2 + j];
                        let m = mass[i * 2 + j];
                        // A-equation: int N' A' - c int N b = c int N B
                        sys.add(row_a, col_a, k)?;
                        sys.add(row_a, col_b, -c * m)?;
                        // b-equation: int N' b' + c int N' A' = c int N' B
                        sys.add(row_b, col_b, k)?;
                        sys.add(row_b, col_a, c * k)?;
                    }
                    sys.add_rhs(row_a, c * rhs_n[i])?;
                    sys.add_rhs(row_b, c * rhs_g[i])?;
                }
            }
            Ok((sys, layout))
        }
        Formulation::Supg => Err(Error::Config("SU/PG is not defined for the MC problem".into())),
    }
}

/// Solution wrapper for the 1D moving-conductor problem.
#[derive(Debug, Clone)]
pub struct Mc1dSolution {
    pub cfg: Mc1dConfig,
    pub fields: FieldSolution,
    pub report: SolveReport,
}

impl Mc1dSolution {
    pub fn a_y(&self) -> Vec<f64> {
        self.fields.nodal(0)
    }

    /// Auxiliary nodal reaction field (weighted-residual scheme only).
    pub fn b_x_nodal(&self) -> Option<Vec<f64>> {
        (self.fields.layout.n_fields() == 2).then(|| self.fields.nodal(1))
    }

    /// Reaction field `b = -dA/dz` recovered at element midpoints.
    pub fn recovered_b_midpoints(&self) -> Vec<(f64, f64)> {
        let mesh = &self.fields.mesh;
        (0..mesh.n_elems())
            .map(|e| {
                let g = self.fields.gradient(0, e, [0.0; 3]).expect("line element");
                let z = mesh.element_center(e)[0];
                (z, -g[0])
            })
            .collect()
    }

    pub fn node_zs(&self) -> Vec<f64> {
        self.fields.mesh.coords.iter().map(|c| c[0]).collect()
    }
}

/// Builds the replacement rows that close the auxiliary-field equations.
/// `aux_sign`: the auxiliary field equals `aux_sign * d(primary)/dz`.
fn aux_closure_rows(
    mesh: &Mesh,
    layout: &DofLayout,
    closure: AuxClosure,
    aux_sign: f64,
    integral_rhs: f64,
) -> Vec<(usize, Vec<(usize, f64)>, f64)> {
    let last = mesh.n_nodes() - 1;
    let one_sided = |n: usize| -> (usize, Vec<(usize, f64)>, f64) {
        let (lo, hi) = if n == 0 { (0, 1) } else { (last - 1, last) };
        let h = mesh.coords[hi][0] - mesh.coords[lo][0];
        let entries = vec![
            (layout.dof(n, 1), 1.0),
            (layout.dof(hi, 0), -aux_sign / h),
            (layout.dof(lo, 0), aux_sign / h),
        ];
        (layout.dof(n, 1), entries, 0.0)
    };
    // aux = aux_sign * p' via the 3-point one-sided difference
    let one_sided2 = |n: usize| -> (usize, Vec<(usize, f64)>, f64) {
        let h = if n == 0 {
            mesh.coords[1][0] - mesh.coords[0][0]
        } else {
            mesh.coords[last][0] - mesh.coords[last - 1][0]
        };
        let entries = if n == 0 {
            vec![
                (layout.dof(0, 1), 1.0),
                (layout.dof(0, 0), aux_sign * 1.5 / h),
                (layout.dof(1, 0), -aux_sign * 2.0 / h),
                (layout.dof(2, 0), aux_sign * 0.5 / h),
            ]
        } else {
            vec![
                (layout.dof(last, 1), 1.0),
                (layout.dof(last, 0), -aux_sign * 1.5 / h),
                (layout.dof(last - 1, 0), aux_sign * 2.0 / h),
                (layout.dof(last - 2, 0), -aux_sign * 0.5 / h),
            ]
        };
        (layout.dof(n, 1), entries, 0.0)
    };
    let zero_pin =
        |n: usize| -> (usize, Vec<(usize, f64)>, f64) { (layout.dof(n, 1), vec![(layout.dof(n, 1), 1.0)], 0.0) };
    match closure {
        AuxClosure::IntegralRow => {
            // int aux dz = aux_sign (primary(z1) - primary(z0))
            let w = nodal_integral_weights(mesh);
            let mut entries: Vec<(usize, f64)> =
                (0..mesh.n_nodes()).map(|n| (layout.dof(n, 1), w[n])).collect();
            entries.push((layout.dof(last, 0), -aux_sign));
            entries.push((layout.dof(0, 0), aux_sign));
            vec![(layout.dof(0, 1), entries, integral_rhs)]
        }
        AuxClosure::OneSidedLeft => vec![one_sided(0)],
        AuxClosure::OneSidedRight => vec![one_sided(last)],
        AuxClosure::OneSidedBoth => vec![one_sided(0), one_sided(last)],
        AuxClosure::OneSided2Both => vec![one_sided2(0), one_sided2(last)],
        AuxClosure::AuxZeroBoth => vec![zero_pin(0), zero_pin(last)],
        AuxClosure::AuxZeroLeft => vec![zero_pin(0)],
    }
}

/// Solves the 1D moving-conductor problem.
pub fn solve_mc1d(cfg: &Mc1dConfig) -> Result<Mc1dSolution> {
    solve_mc1d_with(cfg, AuxClosure::IntegralRow, SourceMode::SplitQuadrature)
}

/// Variant with explicit auxiliary-closure and source-representation choices.
pub fn solve_mc1d_with(
    cfg: &Mc1dConfig,
    closure: AuxClosure,
    source_mode: SourceMode,
) -> Result<Mc1dSolution> {
    cfg.validate()?;
    let mesh = build_line_mesh(cfg.n_elems, cfg.domain.0, cfg.domain.1)?;
    let f = cfg.source();
    let breaks = [cfg.support.0, cfg.support.1];
    let nodal_vals: Vec<f64>;
    let source = match source_mode {
        SourceMode::SplitQuadrature => Source1d::Func { f: &f, breaks: &breaks },
        SourceMode::NodalInterpolation => {
            nodal_vals = mesh.coords.iter().map(|c| f(c[0])).collect();
            Source1d::Nodal(&nodal_vals)
        }
        SourceMode::NodalMidJump => {
            let eps = 1e-9 * (cfg.domain.1 - cfg.domain.0);
            nodal_vals = mesh
                .coords
                .iter()
                .map(|c| 0.5 * (f(c[0] - eps) + f(c[0] + eps)))
                .collect();
            Source1d::Nodal(&nodal_vals)
        }
    };
    let (mut sys, layout) = assemble_mc1d(&mesh, cfg.musigma_u, cfg.formulation, &source)?;

    let last = mesh.n_nodes() - 1;
    if cfg.formulation == Formulation::WeightedResidual {
        // b = -dA/dz: the derivative-weighted b-rows leave one constant free
        for (row, entries, rhs) in aux_closure_rows(&mesh, &layout, closure, -1.0, 0.0) {
            sys.replace_row(row, entries, rhs)?;
        }
    }

    let mut s = sys.finalize();
    s.apply_dirichlet(&layout, &[0], 0, 0.0)?;
    if cfg.outflow == OutflowBc::Dirichlet {
        s.apply_dirichlet(&layout, &[last], 0, 0.0)?;
    }
    let (x, report) = s.solve()?;
    let fields = FieldSolution::new(Arc::new(mesh), layout, x);
    Ok(Mc1dSolution { cfg: cfg.clone(), fields, report })
}

/// Closed-form solution of `-A'' + c A' = c B` for piecewise-constant `B`,
/// evaluated in overflow-safe form (no exponential argument is positive).
/// Returns `(A_y, b_x)` at `z`.
pub fn analytic_mc1d(cfg: &Mc1dConfig, z: f64) -> (f64, f64) {
    let c = cfg.musigma_u;
    let b0 = cfg.b_amp;
    let (z0, z1) = cfg.domain;
    let (za, zb) = cfg.support;
    if c == 0.0 || b0 == 0.0 {
        return (0.0, 0.0);
    }
    match cfg.outflow {
        OutflowBc::Natural => {
            // b' - c b = c B with b(z1) = 0 (field vanishes past the support):
            // upstream decay, plateau -B0 in the support, identically 0 after.
            let b = if z <= za {
                -b0 * ((c * (z - za)).exp() - (c * (z - zb)).exp())
            } else if z <= zb {
                -b0 * (1.0 - (c * (z - zb)).exp())
            } else {
                0.0
            };
            let a_at_za = (b0 / c)
                * (1.0 - (c * (z0 - za)).exp() - (c * (za - zb)).exp() + (c * (z0 - zb)).exp());
            let a = if z <= za {
                (b0 / c)
                    * ((c * (z - za)).exp() - (c * (z0 - za)).exp() - (c * (z - zb)).exp()
                        + (c * (z0 - zb)).exp())
            } else if z <= zb {
                a_at_za + b0 * (z - za)
                    - (b0 / c) * ((c * (z - zb)).exp() - (c * (za - zb)).exp())
            } else {
                a_at_za + b0 * (zb - za) - (b0 / c) * (1.0 - (c * (za - zb)).exp())
            };
            (a, b)
        }
        OutflowBc::Dirichlet => {
            let len = z1 - z0;
            if c * len < 1e-4 {
                // leading-order limit A = c A1 + O(c^2) with -A1'' = B,
                // A1(z0) = A1(z1) = 0; the exponential form below cancels
                // catastrophically in this regime.
                let (a1, a1p) = poisson_piecewise(z0, z1, za, zb, b0, z);
                return (c * a1, -c * a1p);
            }
            // b = K_k e^{cz} - B_k per interval, C0-matched, with the closure
            // int b = 0 from A(z0) = A(z1) = 0. S_k(w) = K_k e^{cw} below.
            let d = 1.0 - (-c * len).exp();
            let s2 = |w: f64| -> f64 {
                b0 * (c * (zb - za) * (c * (w - z1)).exp() - (c * (w - za - (z1 - z0))).exp()
                    + (c * (w - zb)).exp())
                    / d
            };
            let s1 = |w: f64| s2(w) - b0 * (c * (w - za)).exp();
            let s3 = |w: f64| -> f64 {
                b0 * (c * (zb - za) * (c * (w - z1)).exp() - (c * (w - za - (z1 - z0))).exp()
                    + (c * (w - zb - len)).exp())
                    / d
            };
            let b = if z <= za {
                s1(z)
            } else if z <= zb {
                s2(z) - b0
            } else {
                s3(z)
            };
            let a_za = -(s1(za) - s1(z0)) / c;
            let a_zb = a_za - (s2(zb) - s2(za)) / c + b0 * (zb - za);
            let a = if z <= za {
                -(s1(z) - s1(z0)) / c
            } else if z <= zb {
                a_za - (s2(z) - s2(za)) / c + b0 * (z - za)
            } else {
                a_zb - (s3(z) - s3(zb)) / c
            };
            (a, b)
        }
    }
}

/// Solution and derivative of `-A1'' = B0 1_[za,zb]` with `A1(z0) = A1(z1) = 0`.
fn poisson_piecewise(z0: f64, z1: f64, za: f64, zb: f64, b0: f64, z: f64) -> (f64, f64) {
    // -A1' = B0 * (length of [za, zb] left of z) + alpha
    let cum = |z: f64| -> f64 {
        // int_{z0}^{z} B and int_{z0}^{z} int B
        let t = (z.min(zb) - za).max(0.0);
        b0 * t
    };
    let cum2 = |z: f64| -> f64 {
        let t = (z.min(zb) - za).max(0.0);
        0.5 * b0 * t * t + cum(z) * (z - z.min(zb))
    };
    // A1' (z) = -cum(z) + alpha with A1(z0)=0, A1(z1)=0
    // A1(z) = -cum2(z) + alpha (z - z0); alpha = cum2(z1) / (z1 - z0)
    let alpha = cum2(z1) / (z1 - z0);
    (alpha * (z - z0) - cum2(z), alpha - cum(z))
}

// ---------------------------------------------------------------------------
// transport equation
// ---------------------------------------------------------------------------

/// Source term of the transport problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportSource {
    Zero,
    /// `S(z) = z^2`.
    ZSquared,
}

impl TransportSource {
    pub fn eval(self, z: f64) -> f64 {
        match self {
            TransportSource::Zero => 0.0,
            TransportSource::ZSquared => z * z,
        }
    }
}

/// 1D transport configuration: `-k psi'' + u psi' = S`.
#[derive(Debug, Clone)]
pub struct Transport1dConfig {
    /// Ratio `u / k` (1/m).
    pub u_over_k: f64,
    /// Diffusivity `k`; the paper's cases state only `u/k`, so `k = 1`.
    pub k: f64,
    pub source: TransportSource,
    pub psi_left: f64,
    pub psi_right: f64,
    pub n_elems: usize,
    pub domain: (f64, f64),
    pub formulation: Formulation,
}

impl Transport1dConfig {
    /// TP1: `u/k = 400`, `S = 0`, `psi(0) = 0`, `psi(1) = 1`.
    pub fn tp1(n_elems: usize, formulation: Formulation) -> Self {
        Self {
            u_over_k: 400.0,
            k: 1.0,
            source: TransportSource::Zero,
            psi_left: 0.0,
            psi_right: 1.0,
            n_elems,
            domain: (0.0, 1.0),
            formulation,
        }
    }

    /// TP2: `u/k = 200`, `S = z^2`, `psi(0) = psi(1) = 0`.
    pub fn tp2(n_elems: usize, formulation: Formulation) -> Self {
        Self {
            u_over_k: 200.0,
            k: 1.0,
            source: TransportSource::ZSquared,
            psi_left: 0.0,
            psi_right: 0.0,
            n_elems,
            domain: (0.0, 1.0),
            formulation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elems == 0 || !(self.domain.1 > self.domain.0) {
            return Err(Error::Config("need n_elems >= 1 and z1 > z0".into()));
        }
        if self.u_over_k < 0.0 || self.k <= 0.0 {
            return Err(Error::Config("need u/k >= 0 and k > 0".into()));
        }
        Ok(())
    }
}

/// Solution wrapper for the transport problem.
#[derive(Debug, Clone)]
pub struct Transport1dSolution {
    pub cfg: Transport1dConfig,
    pub fields: FieldSolution,
    pub report: SolveReport,
}

impl Transport1dSolution {
    pub fn psi(&self) -> Vec<f64> {
        self.fields.nodal(0)
    }

    /// Auxiliary nodal flux (weighted-residual scheme only).
    pub fn flux_nodal(&self) -> Option<Vec<f64>> {
        (self.fields.layout.n_fields() == 2).then(|| self.fields.nodal(1))
    }

    pub fn node_zs(&self) -> Vec<f64> {
        self.fields.mesh.coords.iter().map(|c| c[0]).collect()
    }
}

/// Solves the 1D transport problem with the selected formulation.
pub fn solve_transport1d(cfg: &Transport1dConfig) -> Result<Transport1dSolution> {
    solve_transport1d_with(cfg, AuxClosure::IntegralRow)
}

/// Variant with an explicit auxiliary-closure choice (weighted residual only).
pub fn solve_transport1d_with(
    cfg: &Transport1dConfig,
    closure: AuxClosure,
) -> Result<Transport1dSolution> {
    cfg.validate()?;
    let mesh = build_line_mesh(cfg.n_elems, cfg.domain.0, cfg.domain.1)?;
    let r = cfg.u_over_k;
    let k = cfg.k;
    let src = cfg.source;
    let f = move |z: f64| src.eval(z);

    let (mut sys, layout) = match cfg.formulation {
        Formulation::Galerkin | Formulation::Supg => {
            let layout = DofLayout::new(mesh.n_nodes(), &["psi"]);
            let mut sys = SystemBuilder::new(layout.n_dofs());
            for e in 0..mesh.n_elems() {
                let ctx = ElemQuad::standard(&mesh, e)?;
                let mut local = weakforms::kernel_diffusion(&ctx, &|_| 1.0);
                let h = mesh.extent(e)[0];
                let tau = match cfg.formulation {
                    Formulation::Supg => weakforms::supg_tau_optimal(h, r, 1.0),
                    _ => 0.0,
                };
                // advective + source terms carry the (possibly upwinded) weight
                let (adv, rhs) =
                    weakforms::kernel_supg(&ctx, [r, 0.0, 0.0], tau, &|x| f(x[0]) / k);
                for (l, a) in local.iter_mut().zip(&adv) {
                    *l += a;
                }
                let dofs: Vec<usize> =
                    mesh.elem_nodes(e).iter().map(|&n| layout.dof(n, 0)).collect();
                sys.scatter_add(&local, Some(&rhs), &dofs)?;
            }
            (sys, layout)
        }
        Formulation::WeightedResidual => {
            let layout = DofLayout::new(mesh.n_nodes(), &["psi", "f_z"]);
            let mut sys = SystemBuilder::new(layout.n_dofs());
            let breaks: [f64; 0] = [];
            for e in 0..mesh.n_elems() {
                let ctx = ElemQuad::standard(&mesh, e)?;
                let stiff = weakforms::kernel_diffusion(&ctx, &|_| 1.0);
                let mass = weakforms::kernel_mass_pair(&ctx, &|_| 1.0);
                let sf = |z: f64| f(z) / k;
                let rhs_n =
                    integrate_line_rhs(&mesh, e, WeightForm::Value, &Source1d::Func { f: &sf, breaks: &breaks });
                let rhs_g =
                    integrate_line_rhs(&mesh, e, WeightForm::Grad(0), &Source1d::Func { f: &sf, breaks: &breaks });
                let nodes = mesh.elem_nodes(e);
                for i in 0..2 {
                    let row_p = layout.dof(nodes[i], 0);
                    let row_f = layout.dof(nodes[i], 1);
                    for j in 0..2 {
                        let col_p = layout.dof(nodes[j], 0);
                        let col_f = layout.dof(nodes[j], 1);
                        let kk = stiff[i * 2 + j];
                        let mm = mass[i * 2 + j];
                        // psi-equation: int N' psi' + (u/k) int N F = (1/k) int N S
                        sys.add(row_p, col_p, kk)?;
                        sys.add(row_p, col_f, r * mm)?;
                        // F-equation: -int N' F' + (u/k) int N' psi' = (1/k) int N' S
                        sys.add(row_f, col_f, -kk)?;
                        sys.add(row_f, col_p, r * kk)?;
                    }
                    sys.add_rhs(row_p, rhs_n[i])?;
                    sys.add_rhs(row_f, rhs_g[i])?;
                }
            }
            // F = +dpsi/dz: close the derivative-weighted F-rows
            for (row, entries, rhs) in aux_closure_rows(&mesh, &layout, closure, 1.0, 0.0) {
                sys.replace_row(row, entries, rhs)?;
            }
            (sys, layout)
        }
    };

    let last = mesh.n_nodes() - 1;
    let _ = &mut sys;
    let mut s = sys.finalize();
    s.apply_dirichlet(&layout, &[0], 0, cfg.psi_left)?;
    s.apply_dirichlet(&layout, &[last], 0, cfg.psi_right)?;
    let (x, report) = s.solve()?;
    let fields = FieldSolution::new(Arc::new(mesh), layout, x);
    Ok(Transport1dSolution { cfg: cfg.clone(), fields, report })
}

/// Overflow-safe `(e^{r z} - 1) / (e^{r} - 1)` on `[0, 1]`.
fn exp_ramp(r: f64, z: f64) -> f64 {
    if r == 0.0 {
        return z;
    }
    ((r * (z - 1.0)).exp() - (-r * z).exp() * (-r * (1.0 - z)).exp()) / (1.0 - (-r).exp())
}

/// Closed-form transport solutions for `S` in `{0, z^2}` on the unit domain.
pub fn analytic_transport(cfg: &Transport1dConfig, z: f64) -> f64 {
    let r = cfg.u_over_k;
    let (psi_l, psi_r) = (cfg.psi_left, cfg.psi_right);
    match cfg.source {
        TransportSource::Zero => {
            if r == 0.0 {
                // pure diffusion: linear between the boundary values
                return psi_l + (psi_r - psi_l) * (z - cfg.domain.0) / (cfg.domain.1 - cfg.domain.0);
            }
            psi_l + (psi_r - psi_l) * exp_ramp(r, z)
        }
        TransportSource::ZSquared => {
            // particular solution of -psi'' + r psi' = z^2 / k:
            // psi_p = (z^3/(3r) + z^2/r^2 + 2z/r^3) / k
            let k = cfg.k;
            let psi_p = |z: f64| (z.powi(3) / (3.0 * r) + z * z / (r * r) + 2.0 * z / r.powi(3)) / k;
            psi_p(z) + psi_l + (psi_r - psi_l - psi_p(1.0)) * exp_ramp(r, z)
        }
    }
}

/// Counts adjacent sign alternations among `samples = (z, v)` pairs whose
/// magnitudes exceed `floor`, optionally restricted to `z` outside
/// `exclude = (lo, hi)`.
pub fn sign_alternations(samples: &[(f64, f64)], floor: f64, exclude: Option<(f64, f64)>) -> usize {
    let mut count = 0;
    for w in samples.windows(2) {
        let ((z0, v0), (z1, v1)) = (w[0], w[1]);
        if let Some((lo, hi)) = exclude {
            if (z0 >= lo && z0 <= hi) || (z1 >= lo && z1 <= hi) {
                continue;
            }
        }
        if v0.abs() > floor && v1.abs() > floor && v0 * v1 < 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_velocity_gives_zero_solution() {
        for formulation in [Formulation::Galerkin, Formulation::WeightedResidual] {
            let cfg = Mc1dConfig {
                musigma_u: 0.0,
                formulation,
                outflow: OutflowBc::Dirichlet,
                ..Default::default()
            };
            let sol = solve_mc1d(&cfg).unwrap();
            assert!(sol.a_y().iter().all(|v| v.abs() < 1e-14));
            if let Some(b) = sol.b_x_nodal() {
                assert!(b.iter().all(|v| v.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn analytic_zero_amplitude_is_zero() {
        let cfg = Mc1dConfig { b_amp: 0.0, ..Default::default() };
        for z in [0.0, 0.3, 0.5, 0.9] {
            assert_eq!(analytic_mc1d(&cfg, z), (0.0, 0.0));
        }
    }

    #[test]
    fn analytic_small_c_tends_to_zero() {
        // c -> 0: governing equation becomes -A'' = 0 with zero data
        for outflow in [OutflowBc::Natural, OutflowBc::Dirichlet] {
            let cfg = Mc1dConfig { musigma_u: 1e-6, outflow, ..Default::default() };
            for z in [0.1, 0.5, 0.77] {
                let (a, b) = analytic_mc1d(&cfg, z);
                assert!(a.abs() < 1e-6 && b.abs() < 1e-6, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn analytic_dirichlet_satisfies_both_bcs() {
        let cfg = Mc1dConfig {
            musigma_u: 50.0,
            outflow: OutflowBc::Dirichlet,
            ..Default::default()
        };
        let (a0, _) = analytic_mc1d(&cfg, 0.0);
        let (a1, _) = analytic_mc1d(&cfg, 1.0);
        assert!(a0.abs() < 1e-14);
        assert!(a1.abs() < 1e-12);
    }

    #[test]
    fn analytic_natural_has_flat_tail() {
        let cfg = Mc1dConfig { musigma_u: 1000.0, ..Default::default() };
        let (_, b) = analytic_mc1d(&cfg, 0.8);
        assert_eq!(b, 0.0);
        let (a8, _) = analytic_mc1d(&cfg, 0.8);
        let (a9, _) = analytic_mc1d(&cfg, 0.95);
        assert!((a8 - a9).abs() < 1e-14);
        // plateau value ~ B0 (zb - za) = 0.2
        assert!((a8 - 0.2).abs() < 1e-3);
    }

    #[test]
    fn wr_solution_residual_reported() {
        let cfg = Mc1dConfig { n_elems: 50, ..Default::default() };
        let sol = solve_mc1d(&cfg).unwrap();
        assert!(sol.report.residual <= 1e-10);
        assert_eq!(sol.fields.layout.n_fields(), 2);
    }

    #[test]
    fn aux_field_tracks_recovered_derivative() {
        // max |b_aux - (-dA/dz)| at midpoints shrinks at least linearly in h
        // once the source-edge ramps (width 1/c) are resolved
        let discrepancy = |n: usize| -> f64 {
            let cfg = Mc1dConfig { musigma_u: 50.0, n_elems: n, ..Default::default() };
            let sol = solve_mc1d(&cfg).unwrap();
            let aux = sol.b_x_nodal().unwrap();
            sol.recovered_b_midpoints()
                .iter()
                .enumerate()
                .map(|(e, &(_, rec))| {
                    let mid = 0.5 * (aux[e] + aux[e + 1]);
                    (mid - rec).abs()
                })
                .fold(0.0, f64::max)
        };
        let d100 = discrepancy(100);
        let d200 = discrepancy(200);
        assert!(
            d200 < d100 / 1.7,
            "no O(h) consistency: d100={d100:.3e} d200={d200:.3e}"
        );
    }

    #[test]
    fn transport_pure_diffusion_linear() {
        let mut cfg = Transport1dConfig::tp1(16, Formulation::WeightedResidual);
        cfg.u_over_k = 0.0;
        let sol = solve_transport1d(&cfg).unwrap();
        let zs = sol.node_zs();
        for (z, p) in zs.iter().zip(sol.psi()) {
            assert!((p - z).abs() < 1e-12, "psi({z}) = {p}");
        }
    }

    #[test]
    fn tp1_analytic_values() {
        let cfg = Transport1dConfig::tp1(10, Formulation::WeightedResidual);
        assert_eq!(analytic_transport(&cfg, 0.0), 0.0);
        assert!((analytic_transport(&cfg, 1.0) - 1.0).abs() < 1e-14);
        // psi(0.99) = (e^{396} - 1)/(e^{400} - 1) ~ e^{-4}
        let v = analytic_transport(&cfg, 0.99);
        assert!((v - 1.8316e-2).abs() < 1e-5, "got {v}");
    }

    #[test]
    fn tp2_analytic_boundary_values() {
        let cfg = Transport1dConfig::tp2(10, Formulation::WeightedResidual);
        assert!(analytic_transport(&cfg, 0.0).abs() < 1e-16);
        assert!(analytic_transport(&cfg, 1.0).abs() < 1e-18 + 1e-14);
    }

    #[test]
    fn transport_boundary_values_reproduced_exactly() {
        for formulation in
            [Formulation::Galerkin, Formulation::WeightedResidual, Formulation::Supg]
        {
            let cfg = Transport1dConfig::tp1(40, formulation);
            let sol = solve_transport1d(&cfg).unwrap();
            let psi = sol.psi();
            assert_eq!(psi[0], 0.0);
            assert_eq!(psi[40], 1.0);
        }
    }

    #[test]
    fn supg_tp1_is_nodally_exact() {
        // the optimal tau makes SU/PG nodally exact for constant-coefficient
        // sourceless advection-diffusion
        let cfg = Transport1dConfig::tp1(20, Formulation::Supg);
        let sol = solve_transport1d(&cfg).unwrap();
        for (z, p) in sol.node_zs().iter().zip(sol.psi()) {
            let exact = analytic_transport(&cfg, *z);
            assert!((p - exact).abs() < 1e-10, "psi({z}) = {p} vs {exact}");
        }
    }

    #[test]
    fn manufactured_diffusion_is_nodally_exact() {
        // -psi'' = -2 with psi = z^2: nodal exactness of linear elements in 1D
        let n = 9;
        let mesh = build_line_mesh(n, 0.0, 1.0).unwrap();
        let layout = DofLayout::new(mesh.n_nodes(), &["psi"]);
        let mut sys = SystemBuilder::new(layout.n_dofs());
        for e in 0..n {
            let ctx = ElemQuad::standard(&mesh, e).unwrap();
            let local = weakforms::kernel_diffusion(&ctx, &|_| 1.0);
            let rhs = weakforms::rhs_weighted(&ctx, WeightForm::Value, &|_| 1.0, &|_| -2.0);
            let dofs: Vec<usize> = mesh.elem_nodes(e).iter().map(|&k| layout.dof(k, 0)).collect();
            sys.scatter_add(&local, Some(&rhs), &dofs).unwrap();
        }
        let mut s = sys.finalize();
        s.apply_dirichlet(&layout, &[0], 0, 0.0).unwrap();
        s.apply_dirichlet(&layout, &[n], 0, 1.0).unwrap();
        let (x, _) = s.solve().unwrap();
        for (i, c) in mesh.coords.iter().enumerate() {
            let exact = c[0] * c[0];
            assert!((x[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_alternation_counter() {
        let osc: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, if i % 2 == 0 { 1.0 } else { -1.0 })).collect();
        assert_eq!(sign_alternations(&osc, 0.5, None), 9);
        assert_eq!(sign_alternations(&osc, 2.0, None), 0);
        assert_eq!(sign_alternations(&osc, 0.5, Some((0.0, 4.0))), 4);
        let smooth: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.0 + i as f64)).collect();
        assert_eq!(sign_alternations(&smooth, 0.0, None), 0);
    }
}
