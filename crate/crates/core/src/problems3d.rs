//! 3D cartesian TEAM-9a solver.
//!
//! The bore geometry loses its symmetry when expressed in `(x, y, z)`
//! coordinates, giving a true 3D test with mixed materials. Fields per node:
//! `phi, A_x, A_y, A_z` plus, for the weighted-residual scheme, the
//! interface-continuous auxiliary unknowns `b_x, b_y` (perpendicular flux
//! components, weighted with `dN/dz`) and `h_z` (parallel field intensity,
//! projected with the Galerkin weight). Motion is along `z` (axis index 2);
//! the mesh is an extruded cylinder cross-section with a cartesian core.

use crate::error::{Error, Result};
use crate::linalg::{DofLayout, SolveReport, SystemBuilder};
use crate::mesh::{build_hex_cylinder, Mesh};
use crate::problems2d::loopfield::loop_field;
use crate::problems2d::team9a::Team9aConfig;
use crate::recovery;
use crate::solution::FieldSolution;
use crate::weakforms::{self, ElemQuad, TrialForm, WeightForm};
use crate::Formulation;
use std::sync::Arc;

pub const REGION_AIR: u32 = 0;
pub const REGION_CONDUCTOR: u32 = 1;

#[derive(Debug, Clone)]
pub struct Team9a3dConfig {
    /// Shared physics and `(z, r)` discretisation.
    pub base: Team9aConfig,
    /// Angular sector count (multiple of 4).
    pub n_theta: usize,
    /// Up-front memory guard for the factorization (GiB).
    pub memory_cap_gib: f64,
    pub formulation: Formulation,
}

impl Default for Team9a3dConfig {
    fn default() -> Self {
        Self {
            base: Team9aConfig::default(),
            n_theta: 12,
            memory_cap_gib: 12.0,
            formulation: Formulation::WeightedResidual,
        }
    }
}

impl Team9a3dConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.n_theta < 8 || self.n_theta % 4 != 0 {
            return Err(Error::Config("n_theta must be a multiple of 4, >= 8".into()));
        }
        Ok(())
    }

    /// Extruded-cylinder mesh whose `(z, r)` discretisation matches the
    /// axisymmetric mesh of `base` (the cartesian core replaces the innermost
    /// radial interval).
    pub fn build_mesh(&self) -> Result<Mesh> {
        let (z_axis, r_axis) = self.base.axes()?;
        let radii: Vec<f64> = r_axis[1..].to_vec();
        let r_i = self.base.bore_radius;
        build_hex_cylinder(z_axis, radii, self.n_theta, &move |c| {
            let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
            if r > r_i {
                REGION_CONDUCTOR
            } else {
                REGION_AIR
            }
        })
    }

    fn applied_txy(&self, x: [f64; 3]) -> (f64, f64) {
        // transverse applied components B_x^a, B_y^a from the loop field
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r < 1e-12 {
            return (0.0, 0.0);
        }
        match loop_field(self.base.loop_radius, self.base.current, r, x[2]) {
            Ok((br, _)) => (br * x[0] / r, br * x[1] / r),
            Err(_) => (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Team9a3dSolution {
    pub cfg: Team9a3dConfig,
    pub fields: FieldSolution,
    pub report: SolveReport,
}

/// One sampled point of the theta-slice profile.
#[derive(Debug, Clone, Copy)]
pub struct SlicePoint {
    pub z: f64,
    pub r: f64,
    /// Radial component of the recovered reaction flux.
    pub b_r: f64,
    /// Radial component of the applied field at the sample.
    pub b_r_applied: f64,
}

impl Team9a3dSolution {
    fn a_indices(&self) -> (usize, usize, usize) {
        (
            self.fields.field_index("a_x"),
            self.fields.field_index("a_y"),
            self.fields.field_index("a_z"),
        )
    }

    /// Recovered reaction flux vector at a cartesian point.
    pub fn reaction_b_at(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        let (ax, ay, az) = self.a_indices();
        let (e, xi) = self.fields.mesh.locate_point(p)?;
        recovery::curl_3d(&self.fields, ax, ay, az, e, xi)
    }

    /// Angular position of the sampling plane: the sector midline closest to
    /// `theta = 0` (sectors start at -45 degrees).
    pub fn slice_theta(&self) -> f64 {
        let n = self.cfg.n_theta as f64;
        let step = 2.0 * std::f64::consts::PI / n;
        let theta0 = -std::f64::consts::FRAC_PI_4;
        let mut best = f64::INFINITY;
        let mut best_theta = 0.0;
        for k in 0..self.cfg.n_theta {
            let mid = theta0 + (k as f64 + 0.5) * step;
            if mid.abs() < best {
                best = mid.abs();
                best_theta = mid;
            }
        }
        best_theta
    }

    /// Samples the reaction `b_r` on the near-zero theta plane at the given
    /// `(z, r)` points.
    pub fn extract_slice(&self, zr_points: &[(f64, f64)]) -> Result<Vec<SlicePoint>> {
        if zr_points.is_empty() {
            return Err(Error::Config("empty slice sample set".into()));
        }
        let th = self.slice_theta();
        let (ct, st) = (th.cos(), th.sin());
        zr_points
            .iter()
            .map(|&(z, r)| {
                let p = [r * ct, r * st, z];
                let b = self.reaction_b_at(p)?;
                let b_r = b[0] * ct + b[1] * st;
                let (bra, _) = loop_field(self.cfg.base.loop_radius, self.cfg.base.current, r, z)?;
                Ok(SlicePoint { z, r, b_r, b_r_applied: bra })
            })
            .collect()
    }

    /// Oscillation metric along a z-line in the conductor on the slice plane.
    pub fn oscillation_count(&self, r_line: f64, n_samples: usize, floor_rel: f64) -> Result<usize> {
        let z_max = self.cfg.base.half_z * 0.85;
        let points: Vec<(f64, f64)> = (0..n_samples)
            .map(|i| (-z_max + 2.0 * z_max * (i as f64 + 0.5) / n_samples as f64, r_line))
            .collect();
        let slice = self.extract_slice(&points)?;
        let maxb = slice.iter().fold(0.0f64, |m, s| m.max(s.b_r.abs()));
        let samples: Vec<(f64, f64)> = slice.iter().map(|s| (s.z, s.b_r)).collect();
        Ok(crate::problems1d::sign_alternations(&samples, floor_rel * maxb, None))
    }
}

/// Rough factorization-memory estimate used by the up-front guard.
fn estimate_factor_gib(n_dofs: usize, nnz: usize) -> f64 {
    // supernodal LU fill on extruded 3D grids grows roughly an order of
    // magnitude over the assembled pattern at these sizes
    let fill = 30.0;
    (nnz as f64 * fill * 12.0 + n_dofs as f64 * 64.0) / (1024.0 * 1024.0 * 1024.0)
}

/// Solves the 3D cartesian TEAM-9a problem.
pub fn solve_team9a_3d(cfg: &Team9a3dConfig) -> Result<Team9a3dSolution> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let wr = cfg.formulation == Formulation::WeightedResidual;
    let fields: &[&str] = if wr {
        &["phi", "a_x", "a_y", "a_z", "b_x", "b_y", "h_z"]
    } else {
        &["phi", "a_x", "a_y", "a_z"]
    };
    let layout = DofLayout::new(mesh.n_nodes(), fields);

    // memory guard before any heavy allocation
    let nnz_guess = mesh.n_elems() * 64 * layout.n_fields() * layout.n_fields();
    let est = estimate_factor_gib(layout.n_dofs(), nnz_guess);
    if est > cfg.memory_cap_gib {
        return Err(Error::MemoryCap { estimate_gb: est, cap_gb: cfg.memory_cap_gib });
    }

    let mut sys = SystemBuilder::new(layout.n_dofs());
    let u = cfg.base.u_z;
    let (f_phi, f_ax, f_ay, f_az) = (0usize, 1usize, 2usize, 3usize);
    let (f_bx, f_by, f_hz) = (4usize, 5usize, 6usize);
    const GX: usize = 0;
    const GY: usize = 1;
    const GZ: usize = 2;

    for e in 0..mesh.n_elems() {
        let mat = cfg.base.material(mesh.region[e]);
        let (sigma, mu) = (mat.sigma, mat.mu());
        let su = sigma * u;
        let ctx = ElemQuad::standard(&mesh, e)?;
        let nodes = mesh.elem_nodes(e);
        let k = ctx.n_nodes;
        let dof = |f: usize, j: usize| layout.dof(nodes[j], f);
        let add_block =
            |sys: &mut SystemBuilder, rf: usize, cf: usize, local: &[f64]| -> Result<()> {
                for i in 0..k {
                    for j in 0..k {
                        let v = local[i * k + j];
                        if v != 0.0 {
                            sys.add(dof(rf, i), dof(cf, j), v)?;
                        }
                    }
                }
                Ok(())
            };
        let pair = |w: WeightForm, t: TrialForm, c: f64| weakforms::kernel_pair(&ctx, w, t, &|_| c);

        // phi equation (Galerkin): sigma grad N . grad phi
        //   - sigma grad N . (u x curl A) = sigma grad N . (u x B^a)
        if sigma > 0.0 {
            add_block(&mut sys, f_phi, f_phi, &weakforms::kernel_diffusion(&ctx, &|_| sigma))?;
            // u x curl A = u (-curl_y, curl_x, 0)
            add_block(&mut sys, f_phi, f_ax, &pair(WeightForm::Grad(GX), TrialForm::Grad(GZ), su))?;
            add_block(&mut sys, f_phi, f_az, &pair(WeightForm::Grad(GX), TrialForm::Grad(GX), -su))?;
            add_block(&mut sys, f_phi, f_az, &pair(WeightForm::Grad(GY), TrialForm::Grad(GY), -su))?;
            add_block(&mut sys, f_phi, f_ay, &pair(WeightForm::Grad(GY), TrialForm::Grad(GZ), su))?;
            let rx = weakforms::rhs_weighted(&ctx, WeightForm::Grad(GX), &|_| -su, &|x| {
                cfg.applied_txy(x).1
            });
            let ry = weakforms::rhs_weighted(&ctx, WeightForm::Grad(GY), &|_| su, &|x| {
                cfg.applied_txy(x).0
            });
            for i in 0..k {
                sys.add_rhs(dof(f_phi, i), rx[i] + ry[i])?;
            }
        }

        // A component equations (Galerkin weight)
        for (fa, grad_axis) in [(f_ax, GX), (f_ay, GY), (f_az, GZ)] {
            add_block(&mut sys, fa, fa, &weakforms::kernel_diffusion(&ctx, &|_| 1.0 / mu))?;
            if sigma > 0.0 {
                add_block(
                    &mut sys,
                    fa,
                    f_phi,
                    &pair(WeightForm::Value, TrialForm::Grad(grad_axis), sigma),
                )?;
            }
        }
        if sigma > 0.0 {
            // -sigma (u x b): A_x row couples +su b_y, A_y row couples -su b_x
            if wr {
                add_block(&mut sys, f_ax, f_by, &weakforms::kernel_mass_pair(&ctx, &|_| su))?;
                add_block(&mut sys, f_ay, f_bx, &weakforms::kernel_mass_pair(&ctx, &|_| -su))?;
            } else {
                // Galerkin: b = curl A
                // A_x row: +su curl_y = su (dA_x/dz - dA_z/dx)
                add_block(&mut sys, f_ax, f_ax, &pair(WeightForm::Value, TrialForm::Grad(GZ), su))?;
                add_block(&mut sys, f_ax, f_az, &pair(WeightForm::Value, TrialForm::Grad(GX), -su))?;
                // A_y row: -su curl_x = -su (dA_z/dy - dA_y/dz)
                add_block(&mut sys, f_ay, f_az, &pair(WeightForm::Value, TrialForm::Grad(GY), -su))?;
                add_block(&mut sys, f_ay, f_ay, &pair(WeightForm::Value, TrialForm::Grad(GZ), su))?;
            }
            // rhs: sigma (u x B^a) = sigma u (-B_y^a, B_x^a, 0)
            let rx = weakforms::rhs_weighted(&ctx, WeightForm::Value, &|_| -su, &|x| {
                cfg.applied_txy(x).1
            });
            let ry = weakforms::rhs_weighted(&ctx, WeightForm::Value, &|_| su, &|x| {
                cfg.applied_txy(x).0
            });
            for i in 0..k {
                sys.add_rhs(dof(f_ax, i), rx[i])?;
                sys.add_rhs(dof(f_ay, i), ry[i])?;
            }
        }

        if wr {
            // b_x row: y-component of the curl equation weighted with dN/dz:
            // sigma dphi/dy + (1/mu) db_x/dz - dh_z/dx - su curl_x = su B_x^a
            add_block(&mut sys, f_bx, f_bx, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GZ), 1.0 / mu))?;
            add_block(&mut sys, f_bx, f_hz, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GX), -1.0))?;
            if sigma > 0.0 {
                add_block(&mut sys, f_bx, f_phi, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GY), sigma))?;
                add_block(&mut sys, f_bx, f_az, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GY), -su))?;
                add_block(&mut sys, f_bx, f_ay, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GZ), su))?;
                let r = weakforms::rhs_weighted(&ctx, WeightForm::Grad(GZ), &|_| su, &|x| {
                    cfg.applied_txy(x).0
                });
                for i in 0..k {
                    sys.add_rhs(dof(f_bx, i), r[i])?;
                }
            }

            // b_y row: x-component weighted with dN/dz:
            // sigma dphi/dx + dh_z/dy - (1/mu) db_y/dz + su curl_y = -su B_y^a
            add_block(&mut sys, f_by, f_by, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GZ), -1.0 / mu))?;
            add_block(&mut sys, f_by, f_hz, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GY), 1.0))?;
            if sigma > 0.0 {
                add_block(&mut sys, f_by, f_phi, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GX), sigma))?;
                add_block(&mut sys, f_by, f_ax, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GZ), su))?;
                add_block(&mut sys, f_by, f_az, &pair(WeightForm::Grad(GZ), TrialForm::Grad(GX), -su))?;
                let r = weakforms::rhs_weighted(&ctx, WeightForm::Grad(GZ), &|_| -su, &|x| {
                    cfg.applied_txy(x).1
                });
                for i in 0..k {
                    sys.add_rhs(dof(f_by, i), r[i])?;
                }
            }

            // h_z projection: int N (dA_y/dx - dA_x/dy) - int N mu h_z = 0
            add_block(&mut sys, f_hz, f_ay, &pair(WeightForm::Value, TrialForm::Grad(GX), 1.0))?;
            add_block(&mut sys, f_hz, f_ax, &pair(WeightForm::Value, TrialForm::Grad(GY), -1.0))?;
            add_block(&mut sys, f_hz, f_hz, &weakforms::kernel_mass_pair(&ctx, &|_| -mu))?;
        }
    }

    // phi support and gauge
    let mut phi_active = vec![false; mesh.n_nodes()];
    for e in 0..mesh.n_elems() {
        if cfg.base.material(mesh.region[e]).sigma > 0.0 {
            for &n in mesh.elem_nodes(e) {
                phi_active[n] = true;
            }
        }
    }

    let mut s = sys.finalize();
    let outer = mesh.boundary_set("outer")?.to_vec();
    for fa in [f_ax, f_ay, f_az] {
        s.apply_dirichlet(&layout, &outer, fa, 0.0)?;
    }
    let mut gauge = false;
    for n in 0..mesh.n_nodes() {
        if !phi_active[n] {
            s.constrain(layout.dof(n, f_phi), 0.0)?;
        } else if !gauge {
            s.constrain(layout.dof(n, f_phi), 0.0)?;
            gauge = true;
        }
    }
    if wr {
        // far-field pins: the dN/dz-weighted curl equations cannot see
        // z-constant transverse flux in the source-free bore
        for set in ["zmin", "zmax"] {
            let nodes = mesh.boundary_set(set)?.to_vec();
            s.apply_dirichlet(&layout, &nodes, f_bx, 0.0)?;
            s.apply_dirichlet(&layout, &nodes, f_by, 0.0)?;
        }
    }

    let (x, report) = s.solve()?;
    let fields = FieldSolution::new(Arc::new(mesh), layout, x);
    Ok(Team9a3dSolution { cfg: cfg.clone(), fields, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(formulation: Formulation) -> Team9a3dConfig {
        Team9a3dConfig {
            base: Team9aConfig {
                nz: 8,
                nr_bore: 3,
                nr_out: 4,
                ..Team9aConfig::default()
            },
            n_theta: 8,
            memory_cap_gib: 12.0,
            formulation,
        }
    }

    #[test]
    fn zero_velocity_zero_solution() {
        let mut cfg = tiny_cfg(Formulation::WeightedResidual);
        cfg.base.u_z = 0.0;
        let sol = solve_team9a_3d(&cfg).unwrap();
        for f in 0..sol.fields.layout.n_fields() {
            assert!(sol.fields.max_abs(f) < 1e-14, "field {f} nonzero");
        }
    }

    #[test]
    fn memory_cap_rejects_up_front() {
        let mut cfg = tiny_cfg(Formulation::WeightedResidual);
        cfg.memory_cap_gib = 1e-6;
        match solve_team9a_3d(&cfg) {
            Err(Error::MemoryCap { .. }) => {}
            other => panic!("expected memory-cap rejection, got {other:?}"),
        }
    }

    #[test]
    fn manufactured_axisymmetric_field_slices_correctly() {
        // embed A_theta = c r (1 - (r/R)^2) g(z), theta-independent; the
        // slice must reproduce b_r = -dA_theta/dz to interpolation accuracy
        let cfg = tiny_cfg(Formulation::WeightedResidual);
        let mesh = cfg.build_mesh().unwrap();
        let layout = DofLayout::new(
            mesh.n_nodes(),
            &["phi", "a_x", "a_y", "a_z", "b_x", "b_y", "h_z"],
        );
        let mut vals = vec![0.0; layout.n_dofs()];
        let rr = cfg.base.outer_r;
        let zz = cfg.base.half_z;
        let atheta = |r: f64, z: f64| 0.7 * r * (1.0 - (r / rr) * (r / rr)) * (z / zz);
        for n in 0..mesh.n_nodes() {
            let p = mesh.coords[n];
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let a = atheta(r, p[2]);
            if r > 1e-14 {
                vals[layout.dof(n, 1)] = -a * p[1] / r; // A_x = -A_theta sin
                vals[layout.dof(n, 2)] = a * p[0] / r; // A_y = A_theta cos
            }
        }
        let fields = FieldSolution::new(Arc::new(mesh), layout, vals);
        let sol = Team9a3dSolution {
            cfg: cfg.clone(),
            fields,
            report: SolveReport { n_dofs: 0, nnz: 0, residual: 0.0 },
        };
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| (0.01 * i as f64 - 0.025, 0.02 + 0.01 * i as f64))
            .collect();
        let slice = sol.extract_slice(&pts).unwrap();
        for s in &slice {
            // b_r = -dA_theta/dz = -0.7 r (1 - (r/R)^2) / zz
            let want = -0.7 * s.r * (1.0 - (s.r / rr) * (s.r / rr)) / zz;
            let h = 0.02; // coarse mesh: interpolation-level agreement
            assert!(
                (s.b_r - want).abs() < 0.05 * want.abs().max(h),
                "b_r {} vs {want}",
                s.b_r
            );
        }
    }

    #[test]
    fn zero_solution_slices_to_zero_and_applied_matches_loop() {
        let cfg = tiny_cfg(Formulation::WeightedResidual);
        let mesh = cfg.build_mesh().unwrap();
        let layout = DofLayout::new(
            mesh.n_nodes(),
            &["phi", "a_x", "a_y", "a_z", "b_x", "b_y", "h_z"],
        );
        let vals = vec![0.0; layout.n_dofs()];
        let fields = FieldSolution::new(Arc::new(mesh), layout, vals);
        let sol = Team9a3dSolution {
            cfg: cfg.clone(),
            fields,
            report: SolveReport { n_dofs: 0, nnz: 0, residual: 0.0 },
        };
        let pts = vec![(0.01, 0.02), (-0.02, 0.05)];
        let slice = sol.extract_slice(&pts).unwrap();
        for s in &slice {
            assert_eq!(s.b_r, 0.0);
            let (want, _) = loop_field(cfg.base.loop_radius, 1.0, s.r, s.z).unwrap();
            assert!((s.b_r_applied - want).abs() <= 1e-8 * want.abs().max(1e-12));
        }
        // empty sample set is rejected
        assert!(sol.extract_slice(&[]).is_err());
    }
}
