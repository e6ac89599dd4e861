//! Element-level kernels for every term of the Galerkin, weighted-residual
//! and SU/PG formulations.
//!
//! All kernels integrate a (test form, trial form) pairing over one element
//! with a pointwise coefficient, using precomputed shape data at the Gauss
//! points ([`ElemQuad`]). Axisymmetric problems fold the `2 pi r` measure into
//! the quadrature weights at construction.

use crate::error::Result;
use crate::mesh::{gauss_rule, Mesh, QuadratureRule};

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Material data of one mesh region.
#[derive(Debug, Clone, Copy)]
pub struct MaterialRegion {
    /// Conductivity (S/m); zero in air.
    pub sigma: f64,
    /// Relative permeability.
    pub mu_r: f64,
}

impl MaterialRegion {
    pub const AIR: MaterialRegion = MaterialRegion { sigma: 0.0, mu_r: 1.0 };

    pub fn conductor(sigma: f64, mu_r: f64) -> Self {
        Self { sigma, mu_r }
    }

    /// Absolute permeability (H/m).
    pub fn mu(&self) -> f64 {
        MU0 * self.mu_r
    }
}

/// Element Peclet number `mu sigma |u| h / 2` with `h` the element extent
/// along the advection direction.
pub fn peclet(mu_sigma_u_abs: f64, h: f64) -> f64 {
    0.5 * mu_sigma_u_abs * h
}

/// Shape data at one quadrature point; `w` already contains the Jacobian
/// determinant, the Gauss weight and any extra measure factor.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub n: [f64; 8],
    pub grad: [[f64; 3]; 8],
    pub w: f64,
    pub x: [f64; 3],
}

/// Precomputed quadrature data for one element.
#[derive(Debug, Clone)]
pub struct ElemQuad {
    pub n_nodes: usize,
    pub pts: Vec<QuadPoint>,
}

impl ElemQuad {
    pub fn new(mesh: &Mesh, elem: usize, rule: &QuadratureRule) -> Result<Self> {
        Self::with_measure(mesh, elem, rule, &|_| 1.0)
    }

    /// Folds `measure(x)` into the quadrature weight, e.g. `2 pi r` for
    /// axisymmetric weak forms.
    pub fn with_measure(
        mesh: &Mesh,
        elem: usize,
        rule: &QuadratureRule,
        measure: &dyn Fn([f64; 3]) -> f64,
    ) -> Result<Self> {
        let geom = mesh.geom(elem);
        let mut pts = Vec::with_capacity(rule.points.len());
        for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
            let s = geom.eval(xi)?;
            pts.push(QuadPoint {
                n: s.n,
                grad: s.grad,
                w: w * s.det_j * measure(s.point),
                x: s.point,
            });
        }
        Ok(Self { n_nodes: geom.n_nodes(), pts })
    }

    /// Default rule: 2-point Gauss per direction.
    pub fn standard(mesh: &Mesh, elem: usize) -> Result<Self> {
        let rule = gauss_rule(mesh.kind, 2)?;
        Self::new(mesh, elem, &rule)
    }
}

/// Test-function form of a weak term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightForm {
    /// The shape function itself (Galerkin weighting).
    Value,
    /// A derivative component `dN/dx_axis`.
    Grad(usize),
}

/// Trial-function form of a weak term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialForm {
    Value,
    Grad(usize),
}

fn pick(form: WeightForm, p: &QuadPoint, i: usize) -> f64 {
    match form {
        WeightForm::Value => p.n[i],
        WeightForm::Grad(a) => p.grad[i][a],
    }
}

fn pick_trial(form: TrialForm, p: &QuadPoint, j: usize) -> f64 {
    match form {
        TrialForm::Value => p.n[j],
        TrialForm::Grad(a) => p.grad[j][a],
    }
}

/// `int c(x) T_i(x) U_j(x) dOmega` for the chosen test/trial forms;
/// row-major `n_nodes x n_nodes`.
pub fn kernel_pair(
    ctx: &ElemQuad,
    test: WeightForm,
    trial: TrialForm,
    coeff: &dyn Fn([f64; 3]) -> f64,
) -> Vec<f64> {
    let k = ctx.n_nodes;
    let mut out = vec![0.0; k * k];
    for p in &ctx.pts {
        let cw = coeff(p.x) * p.w;
        if cw == 0.0 {
            continue;
        }
        for i in 0..k {
            let ti = pick(test, p, i) * cw;
            if ti == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += ti * pick_trial(trial, p, j);
            }
        }
    }
    out
}

/// `int c grad N_i . grad N_j dOmega`.
pub fn kernel_diffusion(ctx: &ElemQuad, coeff: &dyn Fn([f64; 3]) -> f64) -> Vec<f64> {
    let k = ctx.n_nodes;
    let mut out = vec![0.0; k * k];
    for p in &ctx.pts {
        let cw = coeff(p.x) * p.w;
        for i in 0..k {
            for j in 0..k {
                let dot = p.grad[i][0] * p.grad[j][0]
                    + p.grad[i][1] * p.grad[j][1]
                    + p.grad[i][2] * p.grad[j][2];
                out[i * k + j] += cw * dot;
            }
        }
    }
    out
}

/// `int c N_i N_j dOmega`.
pub fn kernel_mass_pair(ctx: &ElemQuad, coeff: &dyn Fn([f64; 3]) -> f64) -> Vec<f64> {
    kernel_pair(ctx, WeightForm::Value, TrialForm::Value, coeff)
}

/// `int c (dN_i/dx_w) U_j dOmega` with `U` a value or gradient component.
pub fn kernel_grad_weight_pair(
    ctx: &ElemQuad,
    coeff: &dyn Fn([f64; 3]) -> f64,
    weight_axis: usize,
    trial: TrialForm,
) -> Vec<f64> {
    kernel_pair(ctx, WeightForm::Grad(weight_axis), trial, coeff)
}

/// Coupling of an arbitrary test form to the in-plane curl component
/// `curl A . x = dA_z/dx_1 - dA_y/dx_0` (coordinates `(x_0, x_1) = (z, y)`).
/// Returns the local matrices multiplying the nodal `A_y` and `A_z` values.
pub fn kernel_curlx_pair(
    ctx: &ElemQuad,
    coeff: &dyn Fn([f64; 3]) -> f64,
    test: WeightForm,
) -> (Vec<f64>, Vec<f64>) {
    let m_ay = kernel_pair(ctx, test, TrialForm::Grad(0), &|x| -coeff(x));
    let m_az = kernel_pair(ctx, test, TrialForm::Grad(1), coeff);
    (m_ay, m_az)
}

/// Derivative-weighted curl coupling (the weighted-residual pairing).
pub fn kernel_grad_curlx(
    ctx: &ElemQuad,
    coeff: &dyn Fn([f64; 3]) -> f64,
    weight_axis: usize,
) -> (Vec<f64>, Vec<f64>) {
    kernel_curlx_pair(ctx, coeff, WeightForm::Grad(weight_axis))
}

/// `int c T_i f(x) dOmega` load vector.
pub fn rhs_weighted(
    ctx: &ElemQuad,
    test: WeightForm,
    coeff: &dyn Fn([f64; 3]) -> f64,
    f: &dyn Fn([f64; 3]) -> f64,
) -> Vec<f64> {
    let k = ctx.n_nodes;
    let mut out = vec![0.0; k];
    for p in &ctx.pts {
        let cw = coeff(p.x) * f(p.x) * p.w;
        if cw == 0.0 {
            continue;
        }
        for i in 0..k {
            out[i] += cw * pick(test, p, i);
        }
    }
    out
}

/// SU/PG stabilization parameter for `-k psi'' + a psi' = f`:
/// `tau = (h / 2a) (coth(Pe) - 1/Pe)` with `Pe = a h / (2 k)`.
/// Vanishes as `Pe -> 0` and tends to `h / (2a)` as `Pe -> inf`.
pub fn supg_tau_optimal(h_stream: f64, a: f64, k_diff: f64) -> f64 {
    if a == 0.0 || h_stream == 0.0 {
        return 0.0;
    }
    let a = a.abs();
    let pe = a * h_stream / (2.0 * k_diff);
    let zeta = if pe < 1e-4 {
        // coth x - 1/x = x/3 - x^3/45 + O(x^5)
        pe / 3.0 - pe.powi(3) / 45.0
    } else {
        1.0 / pe.tanh() - 1.0 / pe
    };
    h_stream / (2.0 * a) * zeta
}

/// Streamline-upwind advection kernel and source: the weight `N` is replaced
/// by `N + tau a . grad N` on the advective term `a . grad(.)` and on the
/// source `f`. `tau = 0` reproduces the Galerkin kernels bitwise.
pub fn kernel_supg(
    ctx: &ElemQuad,
    a: [f64; 3],
    tau: f64,
    f: &dyn Fn([f64; 3]) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let k = ctx.n_nodes;
    let mut mat = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for p in &ctx.pts {
        for i in 0..k {
            let mut wi = p.n[i];
            if tau != 0.0 {
                wi += tau * (a[0] * p.grad[i][0] + a[1] * p.grad[i][1] + a[2] * p.grad[i][2]);
            }
            let wiw = wi * p.w;
            for j in 0..k {
                let adv = a[0] * p.grad[j][0] + a[1] * p.grad[j][1] + a[2] * p.grad[j][2];
                mat[i * k + j] += wiw * adv;
            }
            rhs[i] += wiw * f(p.x);
        }
    }
    (mat, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_line_mesh, build_quad_mesh, gauss_rule, ElementKind};

    fn line_ctx(h: f64) -> ElemQuad {
        let mesh = build_line_mesh(1, 0.0, h).unwrap();
        ElemQuad::standard(&mesh, 0).unwrap()
    }

    #[test]
    fn line2_diffusion_hand_values() {
        let ctx = line_ctx(0.02);
        let m = kernel_diffusion(&ctx, &|_| 1.0);
        let want = [50.0, -50.0, -50.0, 50.0];
        for (a, b) in m.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn line2_mass_hand_values() {
        let ctx = line_ctx(0.02);
        let m = kernel_mass_pair(&ctx, &|_| 1.0);
        let want = [1.0 / 150.0, 1.0 / 300.0, 1.0 / 300.0, 1.0 / 150.0];
        for (a, b) in m.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        // constant field: each row sums to int N_i = h/2
        for i in 0..2 {
            let s = m[2 * i] + m[2 * i + 1];
            assert!((s - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn assembled_interior_mass_row_is_141_over_6() {
        // two h = 1/2 elements: interior row of the mass operator = (h/6)(1,4,1)
        let h = 0.5;
        let mesh = build_line_mesh(2, 0.0, 1.0).unwrap();
        let mut row = [0.0; 3];
        for e in 0..2 {
            let ctx = ElemQuad::standard(&mesh, e).unwrap();
            let m = kernel_mass_pair(&ctx, &|_| 1.0);
            for i in 0..2 {
                if e + i != 1 {
                    continue;
                }
                for j in 0..2 {
                    row[e + j] += m[i * 2 + j];
                }
            }
        }
        assert!((row[0] - h / 6.0).abs() < 1e-15);
        assert!((row[1] - 4.0 * h / 6.0).abs() < 1e-15);
        assert!((row[2] - h / 6.0).abs() < 1e-15);
    }

    #[test]
    fn line2_grad_weight_value_pattern() {
        let ctx = line_ctx(1.0);
        let m = kernel_grad_weight_pair(&ctx, &|_| 1.0, 0, TrialForm::Value);
        let want = [-0.5, -0.5, 0.5, 0.5];
        for (a, b) in m.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        // gradient-gradient pairing reduces to the diffusion kernel
        let g = kernel_grad_weight_pair(&ctx, &|_| 1.0, 0, TrialForm::Grad(0));
        let d = kernel_diffusion(&ctx, &|_| 1.0);
        for (a, b) in g.iter().zip(&d) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quad4_unit_square_stiffness_diagonal() {
        let mesh = build_quad_mesh(vec![0.0, 1.0], vec![0.0, 1.0], &|_| 0).unwrap();
        let ctx = ElemQuad::standard(&mesh, 0).unwrap();
        let m = kernel_diffusion(&ctx, &|_| 1.0);
        for i in 0..4 {
            assert!((m[i * 4 + i] - 2.0 / 3.0).abs() < 1e-14);
        }
        // matrix times constant vector = 0 (null space)
        for i in 0..4 {
            let s: f64 = (0..4).map(|j| m[i * 4 + j]).sum();
            assert!(s.abs() < 1e-14);
        }
        // order-3 quadrature gives the same integrals on an affine element
        let rule3 = gauss_rule(ElementKind::Quad4, 3).unwrap();
        let ctx3 = ElemQuad::new(&mesh, 0, &rule3).unwrap();
        let m3 = kernel_diffusion(&ctx3, &|_| 1.0);
        for (a, b) in m.iter().zip(&m3) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_sufficiency_on_stretched_elements() {
        let mesh = build_quad_mesh(vec![0.0, 0.7], vec![0.0, 0.3], &|_| 0).unwrap();
        let r2 = gauss_rule(ElementKind::Quad4, 2).unwrap();
        let r3 = gauss_rule(ElementKind::Quad4, 3).unwrap();
        let c2 = ElemQuad::new(&mesh, 0, &r2).unwrap();
        let c3 = ElemQuad::new(&mesh, 0, &r3).unwrap();
        let coeff = |x: [f64; 3]| 1.0 + 0.3 * x[0] - 0.1 * x[1];
        for (a, b) in [
            (kernel_diffusion(&c2, &coeff), kernel_diffusion(&c3, &coeff)),
            (kernel_mass_pair(&c2, &|_| 1.0), kernel_mass_pair(&c3, &|_| 1.0)),
            (
                kernel_grad_weight_pair(&c2, &|_| 2.0, 0, TrialForm::Grad(1)),
                kernel_grad_weight_pair(&c3, &|_| 2.0, 0, TrialForm::Grad(1)),
            ),
        ] {
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        // integrating 1 over the element equals its measure
        let ones = kernel_mass_pair(&c2, &|_| 1.0);
        let total: f64 = ones.iter().sum();
        assert!((total - 0.21).abs() < 1e-12);
    }

    #[test]
    fn curl_kernel_matches_direct_quadrature_for_linear_fields() {
        let mesh = build_quad_mesh(vec![0.0, 1.0], vec![0.0, 1.0], &|_| 0).unwrap();
        let rule3 = gauss_rule(ElementKind::Quad4, 3).unwrap();
        let ctx = ElemQuad::new(&mesh, 0, &rule3).unwrap();
        // A_y = 0.4 z - 0.2 y, A_z = 0.1 z + 0.7 y  ->  curl_x = 0.7 - 0.4 = 0.3
        let ay: Vec<f64> = (0..4)
            .map(|i| {
                let p = mesh.coords[mesh.elem_nodes(0)[i]];
                0.4 * p[0] - 0.2 * p[1]
            })
            .collect();
        let az: Vec<f64> = (0..4)
            .map(|i| {
                let p = mesh.coords[mesh.elem_nodes(0)[i]];
                0.1 * p[0] + 0.7 * p[1]
            })
            .collect();
        let (m_ay, m_az) = kernel_grad_curlx(&ctx, &|_| 1.0, 0);
        let mut lhs = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                lhs[i] += m_ay[i * 4 + j] * ay[j] + m_az[i * 4 + j] * az[j];
            }
        }
        // reference: int (dN_i/dz) * 0.3 dOmega
        let want = rhs_weighted(&ctx, WeightForm::Grad(0), &|_| 0.3, &|_| 1.0);
        for i in 0..4 {
            assert!((lhs[i] - want[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn supg_tau_limits() {
        // Pe -> infinity: tau -> h / (2|u|)
        let tau = supg_tau_optimal(0.1, 1e9, 1.0);
        assert!((tau - 0.05 / 1e9).abs() < 1e-17);
        // Pe -> 0 (h -> 0): tau ~ h^2 / (12 k) -> 0
        let tau_h = supg_tau_optimal(1e-6, 1.0, 1.0);
        assert!(tau_h >= 0.0 && tau_h < 1e-12);
        assert!((tau_h - 1e-12 / 12.0).abs() < 1e-15);
        assert_eq!(supg_tau_optimal(0.1, 0.0, 1.0), 0.0);
    }

    #[test]
    fn supg_tau_zero_is_galerkin_bitwise() {
        let ctx = line_ctx(0.25);
        let f = |x: [f64; 3]| 1.0 + x[0];
        let (m0, r0) = kernel_supg(&ctx, [3.0, 0.0, 0.0], 0.0, &f);
        let mg = kernel_pair(&ctx, WeightForm::Value, TrialForm::Grad(0), &|_| 3.0);
        let rg = rhs_weighted(&ctx, WeightForm::Value, &|_| 1.0, &f);
        for (a, b) in m0.iter().zip(&mg) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in r0.iter().zip(&rg) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn axisymmetric_measure_folds_2_pi_r() {
        // int_0^1 int_1^2 2 pi r dr dz = 3 pi
        let mesh = build_quad_mesh(vec![0.0, 1.0], vec![1.0, 2.0], &|_| 0).unwrap();
        let rule = gauss_rule(ElementKind::Quad4, 2).unwrap();
        let ctx =
            ElemQuad::with_measure(&mesh, 0, &rule, &|x| 2.0 * std::f64::consts::PI * x[1])
                .unwrap();
        let m = kernel_mass_pair(&ctx, &|_| 1.0);
        let total: f64 = m.iter().sum();
        assert!((total - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
