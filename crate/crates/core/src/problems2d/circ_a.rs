//! 2D moving-conductor problem with circulating vector potential.
//!
//! A conductor strip of width `d` moves along `z` through an applied
//! out-of-plane field patch `B_x^a`; the reaction field circulates `A` in the
//! `(z, y)` plane. Unknowns are the nodal scalars `phi, A_y, A_z` plus the
//! auxiliary reaction field `b_x` in the weighted-residual scheme.
//! Coordinates: `x0 = z` (motion direction), `x1 = y`.

use crate::error::{Error, Result};
use crate::linalg::{DofLayout, SolveReport, SystemBuilder};
use crate::mesh::{build_axis, build_quad_mesh, GradingSpec, Mesh};
use crate::recovery;
use crate::solution::FieldSolution;
use crate::weakforms::{self, ElemQuad, MaterialRegion, TrialForm, WeightForm, MU0};
use crate::Formulation;
use std::sync::Arc;

pub const REGION_AIR: u32 = 0;
pub const REGION_CONDUCTOR: u32 = 1;

#[derive(Debug, Clone)]
pub struct CircAConfig {
    /// Domain `[0, lz] x [0, ly]`.
    pub lz: f64,
    pub ly: f64,
    /// Base mesh counts; `refine_z` multiplies `nz` (the ladder direction).
    pub nz: usize,
    pub ny: usize,
    pub refine_z: usize,
    /// Conductor strip `[y0, y1]` spanning the whole z-extent.
    pub strip: (f64, f64),
    pub sigma: f64,
    pub mu_r: f64,
    pub u_z: f64,
    /// Applied-field patch `[z0, z1] x [y0, y1]` and amplitude.
    pub patch_z: (f64, f64),
    pub patch_y: (f64, f64),
    pub b_amp: f64,
    pub formulation: Formulation,
}

impl Default for CircAConfig {
    fn default() -> Self {
        // square base cells: 160 x 64 on [0, 1] x [0, 0.4]; all geometry
        // aligned with the base mesh so every ladder level is conforming
        Self {
            lz: 1.0,
            ly: 0.4,
            nz: 160,
            ny: 64,
            refine_z: 1,
            strip: (0.18125, 0.21875),
            sigma: 5.0e6,
            mu_r: 1.0,
            u_z: 76_394.372_684_109_77, // mu0 sigma u_z = 4.8e5 -> Pe = 1500 at nz = 160
            patch_z: (0.45, 0.55),
            patch_y: (0.15, 0.25),
            b_amp: 0.01,
            formulation: Formulation::WeightedResidual,
        }
    }
}

impl CircAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nz == 0 || self.ny == 0 || self.refine_z == 0 {
            return Err(Error::Config("mesh counts must be positive".into()));
        }
        if !(self.lz > 0.0 && self.ly > 0.0) {
            return Err(Error::Config("domain extents must be positive".into()));
        }
        let (s0, s1) = self.strip;
        if !(s0 < s1 && s0 > 0.0 && s1 < self.ly) {
            return Err(Error::Config("conductor strip must lie inside the domain".into()));
        }
        if self.sigma < 0.0 || self.mu_r < 1.0 {
            return Err(Error::Config("need sigma >= 0 and mu_r >= 1".into()));
        }
        Ok(())
    }

    pub fn n_elems(&self) -> usize {
        self.nz * self.refine_z * self.ny
    }

    /// Per-element Peclet number of the conductor elements.
    pub fn peclet(&self) -> f64 {
        let hz = self.lz / (self.nz * self.refine_z) as f64;
        weakforms::peclet(MU0 * self.mu_r * self.sigma * self.u_z.abs(), hz)
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        let zx = build_axis(0.0, self.lz, &GradingSpec::Uniform { n: self.nz * self.refine_z })?;
        let ya = build_axis(0.0, self.ly, &GradingSpec::Uniform { n: self.ny })?;
        let (s0, s1) = self.strip;
        build_quad_mesh(zx, ya, &move |c| {
            if c[1] > s0 && c[1] < s1 {
                REGION_CONDUCTOR
            } else {
                REGION_AIR
            }
        })
    }

    fn material(&self, region: u32) -> MaterialRegion {
        if region == REGION_CONDUCTOR {
            MaterialRegion::conductor(self.sigma, self.mu_r)
        } else {
            MaterialRegion::AIR
        }
    }

    fn applied(&self) -> impl Fn([f64; 3]) -> f64 + '_ {
        let (pz0, pz1) = self.patch_z;
        let (py0, py1) = self.patch_y;
        let amp = self.b_amp;
        move |x| {
            if x[0] >= pz0 && x[0] <= pz1 && x[1] >= py0 && x[1] <= py1 {
                amp
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CircASolution {
    pub cfg: CircAConfig,
    pub fields: FieldSolution,
    pub report: SolveReport,
}

impl CircASolution {
    fn a_indices(&self) -> (usize, usize) {
        (self.fields.field_index("a_y"), self.fields.field_index("a_z"))
    }

    /// Recovered reaction field `b_x = dA_z/dy - dA_y/dz` at element centers.
    pub fn recovered_b_centers(&self) -> Result<Vec<([f64; 3], f64)>> {
        let (ay, az) = self.a_indices();
        let mesh = &self.fields.mesh;
        (0..mesh.n_elems())
            .map(|e| {
                let b = recovery::curl_x_2d(&self.fields, ay, az, e, [0.0; 3])?;
                Ok((mesh.element_center(e), b))
            })
            .collect()
    }

    /// Recovered `b_x` at arbitrary interior points.
    pub fn recovered_b_at(&self, points: &[[f64; 3]]) -> Result<Vec<f64>> {
        let (ay, az) = self.a_indices();
        recovery::curl_x_2d_at_points(&self.fields, ay, az, points)
    }

    /// Sign alternations of the recovered field along the conductor midline,
    /// sampled at element centers, with a relative amplitude floor.
    pub fn oscillation_count(&self, floor_rel: f64) -> Result<usize> {
        let y_mid = 0.5 * (self.cfg.strip.0 + self.cfg.strip.1);
        let nz = self.cfg.nz * self.cfg.refine_z;
        let hz = self.cfg.lz / nz as f64;
        let points: Vec<[f64; 3]> =
            (0..nz).map(|i| [(i as f64 + 0.5) * hz, y_mid, 0.0]).collect();
        let vals = self.recovered_b_at(&points)?;
        let maxb = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let samples: Vec<(f64, f64)> =
            points.iter().zip(&vals).map(|(p, &v)| (p[0], v)).collect();
        Ok(crate::problems1d::sign_alternations(&samples, floor_rel * maxb, None))
    }
}

/// Solves the circulation-of-A problem with the configured formulation.
pub fn solve_circ_a(cfg: &CircAConfig) -> Result<CircASolution> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let wr = cfg.formulation == Formulation::WeightedResidual;
    let fields: &[&str] =
        if wr { &["phi", "a_y", "a_z", "b_x"] } else { &["phi", "a_y", "a_z"] };
    let layout = DofLayout::new(mesh.n_nodes(), fields);
    let mut sys = SystemBuilder::new(layout.n_dofs());
    let applied = cfg.applied();
    let u = cfg.u_z;

    let (f_phi, f_ay, f_az) = (0usize, 1usize, 2usize);
    let f_b = 3usize;

    for e in 0..mesh.n_elems() {
        let mat = cfg.material(mesh.region[e]);
        let (sigma, mu) = (mat.sigma, mat.mu());
        let su = sigma * u;
        let ctx = ElemQuad::standard(&mesh, e)?;
        let nodes = mesh.elem_nodes(e);
        let k = ctx.n_nodes;
        let dof = |f: usize, j: usize| layout.dof(nodes[j], f);

        let add_block = |sys: &mut SystemBuilder,
                             row_f: usize,
                             col_f: usize,
                             local: &[f64]|
         -> Result<()> {
            for i in 0..k {
                for j in 0..k {
                    let v = local[i * k + j];
                    if v != 0.0 {
                        sys.add(dof(row_f, i), dof(col_f, j), v)?;
                    }
                }
            }
            Ok(())
        };
        let add_rhs = |sys: &mut SystemBuilder, row_f: usize, local: &[f64]| -> Result<()> {
            for i in 0..k {
                if local[i] != 0.0 {
                    sys.add_rhs(dof(row_f, i), local[i])?;
                }
            }
            Ok(())
        };

        // phi equation: Galerkin weighting of the current-continuity equation
        if sigma > 0.0 {
            let m = weakforms::kernel_diffusion(&ctx, &|_| sigma);
            add_block(&mut sys, f_phi, f_phi, &m)?;
            if wr {
                let m = weakforms::kernel_pair(&ctx, WeightForm::Grad(1), TrialForm::Value, &|_| {
                    -su
                });
                add_block(&mut sys, f_phi, f_b, &m)?;
            } else {
                // b_x expressed through curl A
                let (m_ay, m_az) = weakforms::kernel_grad_curlx(&ctx, &|_| -su, 1);
                add_block(&mut sys, f_phi, f_ay, &m_ay)?;
                add_block(&mut sys, f_phi, f_az, &m_az)?;
            }
            let r = weakforms::rhs_weighted(&ctx, WeightForm::Grad(1), &|_| su, &applied);
            add_rhs(&mut sys, f_phi, &r)?;
        }

        // A_y equation
        {
            let m = weakforms::kernel_diffusion(&ctx, &|_| 1.0 / mu);
            add_block(&mut sys, f_ay, f_ay, &m)?;
            if sigma > 0.0 {
                let tau = if cfg.formulation == Formulation::Supg {
                    let hz = mesh.extent(e)[0];
                    weakforms::supg_tau_optimal(hz, su, 1.0 / mu)
                } else {
                    0.0
                };
                // phi coupling keeps the plain Galerkin weight
                let m = weakforms::kernel_pair(&ctx, WeightForm::Value, TrialForm::Grad(1), &|_| {
                    sigma
                });
                add_block(&mut sys, f_ay, f_phi, &m)?;
                // advective term and source with the (possibly upwinded)
                // weight N + tau (sigma u) dN/dz
                let weight_terms: Vec<(WeightForm, f64)> = if tau != 0.0 {
                    vec![(WeightForm::Value, 1.0), (WeightForm::Grad(0), tau * su)]
                } else {
                    vec![(WeightForm::Value, 1.0)]
                };
                for &(wf, scale) in &weight_terms {
                    if wr {
                        let m = weakforms::kernel_pair(&ctx, wf, TrialForm::Value, &|_| {
                            -su * scale
                        });
                        add_block(&mut sys, f_ay, f_b, &m)?;
                    } else {
                        let (m_ay, m_az) =
                            weakforms::kernel_curlx_pair(&ctx, &|_| -su * scale, wf);
                        add_block(&mut sys, f_ay, f_ay, &m_ay)?;
                        add_block(&mut sys, f_ay, f_az, &m_az)?;
                    }
                    let r = weakforms::rhs_weighted(&ctx, wf, &|_| su * scale, &applied);
                    add_rhs(&mut sys, f_ay, &r)?;
                }
            }
        }

        // A_z equation
        {
            let m = weakforms::kernel_diffusion(&ctx, &|_| 1.0 / mu);
            add_block(&mut sys, f_az, f_az, &m)?;
            if sigma > 0.0 {
                let m = weakforms::kernel_pair(&ctx, WeightForm::Value, TrialForm::Grad(0), &|_| {
                    sigma
                });
                add_block(&mut sys, f_az, f_phi, &m)?;
            }
        }

        // b_x equation (weighted residual only): derivative-weighted sum of
        // the A_y and A_z equations with the auxiliary diffusion term
        if wr {
            let m = weakforms::kernel_diffusion(&ctx, &|_| 1.0 / mu);
            add_block(&mut sys, f_b, f_b, &m)?;
            if sigma > 0.0 {
                let m1 = weakforms::kernel_pair(&ctx, WeightForm::Grad(0), TrialForm::Grad(1), &|_| {
                    sigma
                });
                add_block(&mut sys, f_b, f_phi, &m1)?;
                let m2 = weakforms::kernel_pair(&ctx, WeightForm::Grad(1), TrialForm::Grad(0), &|_| {
                    -sigma
                });
                add_block(&mut sys, f_b, f_phi, &m2)?;
                let (m_ay, m_az) = weakforms::kernel_grad_curlx(&ctx, &|_| -su, 0);
                add_block(&mut sys, f_b, f_ay, &m_ay)?;
                add_block(&mut sys, f_b, f_az, &m_az)?;
                let r = weakforms::rhs_weighted(&ctx, WeightForm::Grad(0), &|_| su, &applied);
                add_rhs(&mut sys, f_b, &r)?;
            }
        }
    }

    // auxiliary closure: one b-row replaced by int b dOmega = 0 (the
    // derivative test functions sum to zero, leaving one consistent
    // redundancy; A = 0 on the whole outer boundary makes the circulation
    // integral vanish exactly)
    if wr {
        let mut w = vec![0.0; mesh.n_nodes()];
        for e in 0..mesh.n_elems() {
            let ctx = ElemQuad::standard(&mesh, e)?;
            let ones = weakforms::rhs_weighted(&ctx, WeightForm::Value, &|_| 1.0, &|_| 1.0);
            for (j, &n) in mesh.elem_nodes(e).iter().enumerate() {
                w[n] += ones[j];
            }
        }
        let entries: Vec<(usize, f64)> =
            (0..mesh.n_nodes()).map(|n| (layout.dof(n, f_b), w[n])).collect();
        sys.replace_row(layout.dof(0, f_b), entries, 0.0)?;
    }

    // phi is supported only where sigma > 0: pin it to zero elsewhere and
    // gauge-pin one conductor node
    let mut phi_active = vec![false; mesh.n_nodes()];
    for e in 0..mesh.n_elems() {
        if cfg.material(mesh.region[e]).sigma > 0.0 {
            for &n in mesh.elem_nodes(e) {
                phi_active[n] = true;
            }
        }
    }

    let mut s = sys.finalize();
    let outer = mesh.boundary_set("outer")?.to_vec();
    s.apply_dirichlet(&layout, &outer, f_ay, 0.0)?;
    s.apply_dirichlet(&layout, &outer, f_az, 0.0)?;
    let mut gauge_pinned = false;
    for n in 0..mesh.n_nodes() {
        if !phi_active[n] {
            s.constrain(layout.dof(n, f_phi), 0.0)?;
        } else if !gauge_pinned {
            s.constrain(layout.dof(n, f_phi), 0.0)?;
            gauge_pinned = true;
        }
    }
    if !gauge_pinned {
        return Err(Error::Config("no conductor region in the mesh".into()));
    }

    let (x, report) = s.solve()?;
    let fields = FieldSolution::new(Arc::new(mesh), layout, x);
    Ok(CircASolution { cfg: cfg.clone(), fields, report })
}
