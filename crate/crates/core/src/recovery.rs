//! Field recovery from `curl A` at element-interior points.
//!
//! The reaction magnetic field reported by every solver is recovered from the
//! vector potential by differentiating the FE interpolant inside elements,
//! not read from the auxiliary nodal unknowns; the auxiliary fields are used
//! only to stabilize the formulations.

use crate::error::Result;
use crate::solution::FieldSolution;

/// In-plane curl component for the `(z, y)` circulation-of-A problem:
/// `b_x = dA_z/dy - dA_y/dz` with coordinates `(x0, x1) = (z, y)`.
pub fn curl_x_2d(
    sol: &FieldSolution,
    ay: usize,
    az: usize,
    elem: usize,
    xi: [f64; 3],
) -> Result<f64> {
    let gy = sol.gradient(ay, elem, xi)?;
    let gz = sol.gradient(az, elem, xi)?;
    Ok(gz[1] - gy[0])
}

/// Axisymmetric curl of `A = A_theta e_theta` on `(x0, x1) = (z, r)`:
/// `b_r = -dA/dz`, `b_z = dA/dr + A/r`.
pub fn curl_axi(
    sol: &FieldSolution,
    a_theta: usize,
    elem: usize,
    xi: [f64; 3],
) -> Result<(f64, f64)> {
    let g = sol.gradient(a_theta, elem, xi)?;
    let s = sol.mesh.geom(elem).eval(xi)?;
    let a = sol.interpolate(a_theta, elem, xi);
    let r = s.point[1];
    Ok((-g[0], g[1] + a / r))
}

/// Full 3D curl of `(A_x, A_y, A_z)` nodal fields.
pub fn curl_3d(
    sol: &FieldSolution,
    ax: usize,
    ay: usize,
    az: usize,
    elem: usize,
    xi: [f64; 3],
) -> Result<[f64; 3]> {
    let gx = sol.gradient(ax, elem, xi)?;
    let gy = sol.gradient(ay, elem, xi)?;
    let gz = sol.gradient(az, elem, xi)?;
    Ok([gz[1] - gy[2], gx[2] - gz[0], gy[0] - gx[1]])
}

/// Recovered 2D curl at arbitrary physical points.
pub fn curl_x_2d_at_points(
    sol: &FieldSolution,
    ay: usize,
    az: usize,
    points: &[[f64; 3]],
) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&p| {
            let (e, xi) = sol.mesh.locate_point(p)?;
            curl_x_2d(sol, ay, az, e, xi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DofLayout;
    use crate::mesh::{build_axis, build_quad_mesh, GradingSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn quad_solution(f_ay: impl Fn(f64, f64) -> f64, f_az: impl Fn(f64, f64) -> f64) -> FieldSolution {
        let x = build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 5 }).unwrap();
        let y = build_axis(0.0, 0.5, &GradingSpec::Uniform { n: 4 }).unwrap();
        let mesh = Arc::new(build_quad_mesh(x, y, &|_| 0).unwrap());
        let layout = DofLayout::new(mesh.n_nodes(), &["a_y", "a_z"]);
        let mut values = vec![0.0; layout.n_dofs()];
        for n in 0..mesh.n_nodes() {
            let p = mesh.coords[n];
            values[layout.dof(n, 0)] = f_ay(p[0], p[1]);
            values[layout.dof(n, 1)] = f_az(p[0], p[1]);
        }
        FieldSolution::new(mesh, layout, values)
    }

    #[test]
    fn linear_a_gives_unit_curl() {
        // A_z = y, A_y = 0 -> b_x = 1 everywhere
        let sol = quad_solution(|_, _| 0.0, |_, y| y);
        for &p in &[[0.31, 0.21, 0.0], [0.77, 0.05, 0.0], [0.5, 0.49, 0.0]] {
            let (e, xi) = sol.mesh.locate_point(p).unwrap();
            let b = curl_x_2d(&sol, 0, 1, e, xi).unwrap();
            assert!((b - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_a_gives_zero_curl() {
        let sol = quad_solution(|_, _| 3.5, |_, _| -2.0);
        let b = curl_x_2d_at_points(&sol, 0, 1, &[[0.5, 0.25, 0.0]]).unwrap();
        assert!(b[0].abs() < 1e-13);
    }

    #[test]
    fn bilinear_patch_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cy: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let cz: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let fay = move |z: f64, y: f64| cy[0] + cy[1] * z + cy[2] * y + cy[3] * z * y;
        let faz = move |z: f64, y: f64| cz[0] + cz[1] * z + cz[2] * y + cz[3] * z * y;
        let sol = quad_solution(fay, faz);
        let h = 1e-6;
        for &p in &[[0.45, 0.23, 0.0], [0.81, 0.41, 0.0]] {
            let (e, xi) = sol.mesh.locate_point(p).unwrap();
            let b = curl_x_2d(&sol, 0, 1, e, xi).unwrap();
            // central differences of the interpolant itself
            let az_p = sol.interpolate_at(1, [p[0], p[1] + h, 0.0]).unwrap();
            let az_m = sol.interpolate_at(1, [p[0], p[1] - h, 0.0]).unwrap();
            let ay_p = sol.interpolate_at(0, [p[0] + h, p[1], 0.0]).unwrap();
            let ay_m = sol.interpolate_at(0, [p[0] - h, p[1], 0.0]).unwrap();
            let fd = (az_p - az_m) / (2.0 * h) - (ay_p - ay_m) / (2.0 * h);
            assert!((b - fd).abs() < 1e-7, "curl {b} vs fd {fd}");
        }
    }

    #[test]
    fn point_outside_mesh_is_an_error() {
        let sol = quad_solution(|_, _| 0.0, |_, _| 0.0);
        assert!(curl_x_2d_at_points(&sol, 0, 1, &[[2.0, 0.2, 0.0]]).is_err());
    }
}
