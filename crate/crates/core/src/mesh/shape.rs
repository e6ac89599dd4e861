//! Linear nodal shape functions (line2, quad4, hex8), Jacobians and the
//! inverse isoparametric map.

use super::ElementKind;
use crate::error::{Error, Result};

/// Hex node sign pattern; quad4 uses the first 4 entries of (XI, ETA),
/// line2 the first 2 of XI.
const XI: [f64; 8] = [-1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 8] = [-1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
const ZETA: [f64; 8] = [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0];

/// Shape-function values and reference gradients at one local point.
#[derive(Debug, Clone)]
pub struct RefShape {
    pub n: [f64; 8],
    /// d N_i / d xi_j
    pub dref: [[f64; 3]; 8],
    pub n_nodes: usize,
}

pub fn ref_shape(kind: ElementKind, xi: [f64; 3]) -> RefShape {
    let mut n = [0.0; 8];
    let mut dref = [[0.0; 3]; 8];
    match kind {
        ElementKind::Line2 => {
            let x = xi[0];
            n[0] = 0.5 * (1.0 - x);
            n[1] = 0.5 * (1.0 + x);
            dref[0][0] = -0.5;
            dref[1][0] = 0.5;
        }
        ElementKind::Quad4 => {
            let (x, y) = (xi[0], xi[1]);
            for i in 0..4 {
                n[i] = 0.25 * (1.0 + XI[i] * x) * (1.0 + ETA[i] * y);
                dref[i][0] = 0.25 * XI[i] * (1.0 + ETA[i] * y);
                dref[i][1] = 0.25 * (1.0 + XI[i] * x) * ETA[i];
            }
        }
        ElementKind::Hex8 => {
            let (x, y, z) = (xi[0], xi[1], xi[2]);
            for i in 0..8 {
                n[i] = 0.125 * (1.0 + XI[i] * x) * (1.0 + ETA[i] * y) * (1.0 + ZETA[i] * z);
                dref[i][0] = 0.125 * XI[i] * (1.0 + ETA[i] * y) * (1.0 + ZETA[i] * z);
                dref[i][1] = 0.125 * (1.0 + XI[i] * x) * ETA[i] * (1.0 + ZETA[i] * z);
                dref[i][2] = 0.125 * (1.0 + XI[i] * x) * (1.0 + ETA[i] * y) * ZETA[i];
            }
        }
    }
    RefShape { n, dref, n_nodes: kind.n_nodes() }
}

/// Shape data at one local point of one physical element: values, physical
/// gradients, the Jacobian determinant and the mapped coordinates.
#[derive(Debug, Clone)]
pub struct ShapeSet {
    pub kind: ElementKind,
    pub n: [f64; 8],
    /// d N_i / d x_j (physical gradients via the inverse Jacobian).
    pub grad: [[f64; 3]; 8],
    pub det_j: f64,
    /// Physical coordinates of the local point.
    pub point: [f64; 3],
    pub n_nodes: usize,
}

/// Geometry of one element: its node coordinates in local order.
#[derive(Debug, Clone)]
pub struct ElementGeom {
    pub kind: ElementKind,
    pub coords: [[f64; 3]; 8],
    pub elem_id: usize,
}

impl ElementGeom {
    pub fn n_nodes(&self) -> usize {
        self.kind.n_nodes()
    }

    /// Evaluates shape values and physical gradients at local point `xi`.
    ///
    /// The Jacobian is square in the element's intrinsic dimension; a 1D
    /// element embedded on the x-axis uses dx/dxi alone.
    pub fn eval(&self, xi: [f64; 3]) -> Result<ShapeSet> {
        let rs = ref_shape(self.kind, xi);
        let nn = rs.n_nodes;
        let dim = self.kind.dim();

        // J[a][b] = d x_b / d xi_a
        let mut jac = [[0.0f64; 3]; 3];
        for i in 0..nn {
            for a in 0..dim {
                for b in 0..dim {
                    jac[a][b] += rs.dref[i][a] * self.coords[i][b];
                }
            }
        }
        let (det, inv) = invert(&jac, dim);
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvertedElement { elem: self.elem_id, det });
        }

        // inv[r][k] = d xi_k / d x_r, so dN/dx_b = sum_a dN/dxi_a * inv[b][a]
        let mut grad = [[0.0; 3]; 8];
        for i in 0..nn {
            for b in 0..dim {
                let mut g = 0.0;
                for a in 0..dim {
                    g += inv[b][a] * rs.dref[i][a];
                }
                grad[i][b] = g;
            }
        }

        let mut point = [0.0; 3];
        for i in 0..nn {
            for b in 0..3 {
                point[b] += rs.n[i] * self.coords[i][b];
            }
        }
        Ok(ShapeSet { kind: self.kind, n: rs.n, grad, det_j: det, point, n_nodes: nn })
    }

    /// Inverse isoparametric map: local coordinates of physical point `x`,
    /// or `None` when the point lies outside this element (with tolerance).
    pub fn locate(&self, x: [f64; 3], tol: f64) -> Option<[f64; 3]> {
        let dim = self.kind.dim();
        let mut xi = [0.0f64; 3];
        for _ in 0..30 {
            let rs = ref_shape(self.kind, xi);
            let nn = rs.n_nodes;
            let mut r = [0.0f64; 3];
            for i in 0..nn {
                for b in 0..dim {
                    r[b] += rs.n[i] * self.coords[i][b];
                }
            }
            for b in 0..dim {
                r[b] -= x[b];
            }
            let norm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut jac = [[0.0f64; 3]; 3];
            for i in 0..nn {
                for a in 0..dim {
                    for b in 0..dim {
                        jac[a][b] += rs.dref[i][a] * self.coords[i][b];
                    }
                }
            }
            let (det, inv) = invert(&jac, dim);
            if det.abs() < 1e-300 {
                return None;
            }
            // Newton update: dxi_a = sum_b (dxi_a/dx_b) r_b = sum_b inv[b][a] r_b
            let mut dxi = [0.0f64; 3];
            for a in 0..dim {
                for b in 0..dim {
                    dxi[a] += inv[b][a] * r[b];
                }
            }
            for a in 0..dim {
                xi[a] -= dxi[a];
            }
            if norm < 1e-13 && dxi.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-12 {
                break;
            }
        }
        let inside = (0..dim).all(|a| xi[a].abs() <= 1.0 + tol);
        if inside {
            Some(xi)
        } else {
            None
        }
    }
}

/// Determinant and inverse of the leading `dim` x `dim` block.
fn invert(j: &[[f64; 3]; 3], dim: usize) -> (f64, [[f64; 3]; 3]) {
    let mut inv = [[0.0f64; 3]; 3];
    let det = match dim {
        1 => {
            let d = j[0][0];
            if d != 0.0 {
                inv[0][0] = 1.0 / d;
            }
            d
        }
        2 => {
            let d = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if d != 0.0 {
                inv[0][0] = j[1][1] / d;
                inv[0][1] = -j[0][1] / d;
                inv[1][0] = -j[1][0] / d;
                inv[1][1] = j[0][0] / d;
            }
            d
        }
        3 => {
            let c00 = j[1][1] * j[2][2] - j[1][2] * j[2][1];
            let c01 = j[1][2] * j[2][0] - j[1][0] * j[2][2];
            let c02 = j[1][0] * j[2][1] - j[1][1] * j[2][0];
            let d = j[0][0] * c00 + j[0][1] * c01 + j[0][2] * c02;
            if d != 0.0 {
                inv[0][0] = c00 / d;
                inv[1][0] = c01 / d;
                inv[2][0] = c02 / d;
                inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / d;
                inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / d;
                inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / d;
                inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / d;
                inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / d;
                inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / d;
            }
            d
        }
        _ => unreachable!(),
    };
    (det, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> ElementGeom {
        ElementGeom {
            kind: ElementKind::Quad4,
            coords: [
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0; 3],
                [0.0; 3],
                [0.0; 3],
                [0.0; 3],
            ],
            elem_id: 0,
        }
    }

    fn unit_cube() -> ElementGeom {
        let mut coords = [[0.0; 3]; 8];
        for i in 0..8 {
            coords[i] = [
                0.5 * (1.0 + XI[i]),
                0.5 * (1.0 + ETA[i]),
                0.5 * (1.0 + ZETA[i]),
            ];
        }
        ElementGeom { kind: ElementKind::Hex8, coords, elem_id: 0 }
    }

    #[test]
    fn line2_midpoint_values() {
        let rs = ref_shape(ElementKind::Line2, [0.0; 3]);
        assert_eq!(rs.n[0], 0.5);
        assert_eq!(rs.n[1], 0.5);
    }

    #[test]
    fn quad4_kronecker_at_corners() {
        for i in 0..4 {
            let rs = ref_shape(ElementKind::Quad4, [XI[i], ETA[i], 0.0]);
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((rs.n[j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partition_of_unity_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for kind in [ElementKind::Line2, ElementKind::Quad4, ElementKind::Hex8] {
            for _ in 0..1000 {
                let xi = [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ];
                let rs = ref_shape(kind, xi);
                let sum: f64 = rs.n[..rs.n_nodes].iter().sum();
                assert!((sum - 1.0).abs() < 1e-14);
                for a in 0..kind.dim() {
                    let gsum: f64 = rs.dref[..rs.n_nodes].iter().map(|g| g[a]).sum();
                    assert!(gsum.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn unit_square_jacobian_det() {
        let g = unit_square();
        for &xi in &[[0.0, 0.0, 0.0], [0.5, -0.3, 0.0], [-1.0, 1.0, 0.0]] {
            let s = g.eval(xi).unwrap();
            assert!((s.det_j - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn hex8_gradients_match_finite_differences() {
        // distorted hex: perturb unit cube corners
        let mut g = unit_cube();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in g.coords.iter_mut() {
            for v in c.iter_mut() {
                *v += rng.random_range(-0.05..0.05);
            }
        }
        let xi = [0.3, -0.4, 0.25];
        let s = g.eval(xi).unwrap();
        // interpolate each shape function at physical points offset along x_b
        let interp = |geom: &ElementGeom, x: [f64; 3], i: usize| -> f64 {
            let loc = geom.locate(x, 1e-6).unwrap();
            ref_shape(geom.kind, loc).n[i]
        };
        let h = 1e-6;
        for i in 0..8 {
            for b in 0..3 {
                let mut xp = s.point;
                let mut xm = s.point;
                xp[b] += h;
                xm[b] -= h;
                let fd = (interp(&g, xp, i) - interp(&g, xm, i)) / (2.0 * h);
                assert!(
                    (fd - s.grad[i][b]).abs() < 1e-8,
                    "node {i} dir {b}: fd {fd} vs {g}",
                    g = s.grad[i][b]
                );
            }
        }
    }

    #[test]
    fn inverted_element_reports_id() {
        let mut g = unit_square();
        g.coords.swap(1, 3); // flips orientation
        g.elem_id = 99;
        match g.eval([0.0; 3]) {
            Err(Error::InvertedElement { elem, .. }) => assert_eq!(elem, 99),
            other => panic!("expected inverted-element error, got {other:?}"),
        }
    }

    #[test]
    fn locate_roundtrip() {
        let g = unit_cube();
        let xi = [0.37, -0.81, 0.55];
        let s = g.eval(xi).unwrap();
        let back = g.locate(s.point, 1e-9).unwrap();
        for a in 0..3 {
            assert!((back[a] - xi[a]).abs() < 1e-10);
        }
        assert!(g.locate([2.0, 2.0, 2.0], 1e-9).is_none());
    }
}
