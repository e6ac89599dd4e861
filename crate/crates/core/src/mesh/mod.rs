//! Structured meshes for the 1D/2D/3D solvers.
//!
//! All meshes are node-conforming structured grids: tensor products of 1D
//! axes (line2 / quad4 / hex8 boxes) or a cylinder-with-core grid for the 3D
//! bore geometry, where a cartesian core block replaces the degenerate cells
//! an r-theta grid would produce at the axis. Region tags mark material
//! regions (conductor / air); named boundary node sets drive Dirichlet
//! application.

pub mod grading;
pub mod quadrature;
pub mod shape;

pub use grading::{build_axis, geometric_coords, subdivide_axis, AxisSegment, GradingSpec};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use shape::{ref_shape, ElementGeom, RefShape, ShapeSet};

use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Line2,
    Quad4,
    Hex8,
}

impl ElementKind {
    pub fn n_nodes(self) -> usize {
        match self {
            ElementKind::Line2 => 2,
            ElementKind::Quad4 => 4,
            ElementKind::Hex8 => 8,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ElementKind::Line2 => 1,
            ElementKind::Quad4 => 2,
            ElementKind::Hex8 => 3,
        }
    }

    pub fn vtk_cell_type(self) -> u8 {
        match self {
            ElementKind::Line2 => 3,
            ElementKind::Quad4 => 9,
            ElementKind::Hex8 => 12,
        }
    }
}

/// How the mesh was constructed; used for point location.
#[derive(Debug, Clone)]
pub enum Structure {
    /// Tensor grid: one coordinate axis per dimension.
    Tensor { axes: Vec<Vec<f64>> },
    /// Extruded cylinder cross-section with a cartesian core block.
    Cylinder {
        z_axis: Vec<f64>,
        radii: Vec<f64>,
        n_theta: usize,
        core_half: f64,
        /// Quads per cross-section slab.
        slab_cells: usize,
        /// Nodes per cross-section level.
        level_nodes: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub kind: ElementKind,
    pub coords: Vec<[f64; 3]>,
    /// Flattened connectivity, `kind.n_nodes()` entries per element.
    pub conn: Vec<usize>,
    /// Material region tag per element.
    pub region: Vec<u32>,
    pub boundary_sets: BTreeMap<String, Vec<usize>>,
    pub structure: Structure,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_elems(&self) -> usize {
        self.conn.len() / self.kind.n_nodes()
    }

    pub fn elem_nodes(&self, e: usize) -> &[usize] {
        let n = self.kind.n_nodes();
        &self.conn[e * n..(e + 1) * n]
    }

    pub fn geom(&self, e: usize) -> ElementGeom {
        let mut coords = [[0.0; 3]; 8];
        for (k, &node) in self.elem_nodes(e).iter().enumerate() {
            coords[k] = self.coords[node];
        }
        ElementGeom { kind: self.kind, coords, elem_id: e }
    }

    pub fn element_center(&self, e: usize) -> [f64; 3] {
        let nodes = self.elem_nodes(e);
        let mut c = [0.0; 3];
        for &n in nodes {
            for b in 0..3 {
                c[b] += self.coords[n][b];
            }
        }
        for b in 0..3 {
            c[b] /= nodes.len() as f64;
        }
        c
    }

    /// Axis-aligned extent of element `e` per coordinate direction.
    pub fn extent(&self, e: usize) -> [f64; 3] {
        let nodes = self.elem_nodes(e);
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &n in nodes {
            for b in 0..3 {
                lo[b] = lo[b].min(self.coords[n][b]);
                hi[b] = hi[b].max(self.coords[n][b]);
            }
        }
        [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]]
    }

    /// Characteristic spacing: the largest axis-aligned extent.
    pub fn h(&self, e: usize) -> f64 {
        let ext = self.extent(e);
        ext[0].max(ext[1]).max(ext[2])
    }

    pub fn boundary_set(&self, name: &str) -> Result<&[usize]> {
        self.boundary_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::MeshSpec(format!("no boundary set named '{name}'")))
    }

    /// Finds the element containing `x` and its local coordinates.
    pub fn locate_point(&self, x: [f64; 3]) -> Result<(usize, [f64; 3])> {
        let tol = 1e-9;
        match &self.structure {
            Structure::Tensor { axes } => {
                let mut idx = [0usize; 3];
                let mut dims = [1usize; 3];
                for (a, axis) in axes.iter().enumerate() {
                    dims[a] = axis.len() - 1;
                    idx[a] = locate_interval(axis, x[a])
                        .ok_or(Error::PointOutsideMesh { point: x })?;
                }
                let e = match axes.len() {
                    1 => idx[0],
                    2 => idx[0] + dims[0] * idx[1],
                    _ => idx[0] + dims[0] * (idx[1] + dims[1] * idx[2]),
                };
                let xi = self
                    .geom(e)
                    .locate(x, 1e-6)
                    .ok_or(Error::PointOutsideMesh { point: x })?;
                Ok((e, xi))
            }
            Structure::Cylinder { z_axis, radii, n_theta, core_half, slab_cells, .. } => {
                let iz = locate_interval(z_axis, x[2]).ok_or(Error::PointOutsideMesh { point: x })?;
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let m = n_theta / 4;
                let base = iz * slab_cells;
                // candidate cross-section cells
                let mut candidates: Vec<usize> = Vec::new();
                if r >= radii[0] * (1.0 - 1e-12) {
                    // ring region: sector by angle, radial interval by search
                    let theta0 = -std::f64::consts::FRAC_PI_4;
                    let dth = 2.0 * std::f64::consts::PI / *n_theta as f64;
                    let mut th = (x[1].atan2(x[0]) - theta0).rem_euclid(2.0 * std::f64::consts::PI);
                    if !th.is_finite() {
                        th = 0.0;
                    }
                    let k = ((th / dth) as usize).min(n_theta - 1);
                    let jr = locate_interval(radii, r).unwrap_or(radii.len().saturating_sub(2));
                    let ring_start = m * m + n_theta;
                    for kk in [k, (k + n_theta - 1) % n_theta, (k + 1) % n_theta] {
                        for jj in
                            [jr, jr.saturating_sub(1), (jr + 1).min(radii.len().saturating_sub(2))]
                        {
                            if jj + 1 < radii.len() {
                                candidates.push(base + ring_start + jj * n_theta + kk);
                            }
                        }
                    }
                } else if r <= *core_half * 1.5 {
                    candidates.extend((0..m * m).map(|c| base + c));
                    candidates.extend((m * m..m * m + n_theta).map(|c| base + c));
                } else {
                    candidates.extend((m * m..m * m + n_theta).map(|c| base + c));
                    candidates.extend((0..m * m).map(|c| base + c));
                }
                for e in candidates {
                    if let Some(xi) = self.geom(e).locate(x, tol) {
                        return Ok((e, xi));
                    }
                }
                Err(Error::PointOutsideMesh { point: x })
            }
        }
    }

    /// Checks connectivity ranges, node distinctness and Jacobian positivity
    /// at all order-2 Gauss points.
    pub fn validate(&self) -> Result<()> {
        let nn = self.kind.n_nodes();
        if self.conn.len() % nn != 0 || self.region.len() != self.n_elems() {
            return Err(Error::MeshSpec("connectivity/region length mismatch".into()));
        }
        let quad = gauss_rule(self.kind, 2)?;
        for e in 0..self.n_elems() {
            let nodes = self.elem_nodes(e);
            for (i, &a) in nodes.iter().enumerate() {
                if a >= self.n_nodes() {
                    return Err(Error::MeshSpec(format!("element {e} references node {a}")));
                }
                for &b in &nodes[i + 1..] {
                    if a == b {
                        return Err(Error::MeshSpec(format!("element {e} repeats node {a}")));
                    }
                }
            }
            let geom = self.geom(e);
            for &p in &quad.points {
                geom.eval(p)?; // errors on nonpositive det J
            }
        }
        for (name, set) in &self.boundary_sets {
            for &n in set {
                if n >= self.n_nodes() {
                    return Err(Error::MeshSpec(format!("set '{name}' references node {n}")));
                }
            }
        }
        Ok(())
    }
}

fn locate_interval(axis: &[f64], x: f64) -> Option<usize> {
    let n = axis.len();
    let tol = 1e-12 * (axis[n - 1] - axis[0]).abs().max(1.0);
    if x < axis[0] - tol || x > axis[n - 1] + tol {
        return None;
    }
    let i = axis.partition_point(|&v| v <= x);
    Some(i.clamp(1, n - 1) - 1)
}

/// Uniform 1D mesh with `n_elems` line2 elements on `[z0, z1]`.
/// Boundary sets: `left`, `right`.
pub fn build_line_mesh(n_elems: usize, z0: f64, z1: f64) -> Result<Mesh> {
    if n_elems == 0 {
        return Err(Error::MeshSpec("n_elems must be >= 1".into()));
    }
    if !(z1 > z0) {
        return Err(Error::MeshSpec(format!("need z1 > z0, got [{z0}, {z1}]")));
    }
    let axis = build_axis(z0, z1, &GradingSpec::Uniform { n: n_elems })?;
    build_line_mesh_from_axis(axis)
}

/// 1D mesh over an explicit coordinate axis.
pub fn build_line_mesh_from_axis(axis: Vec<f64>) -> Result<Mesh> {
    let n = axis.len() - 1;
    let coords: Vec<[f64; 3]> = axis.iter().map(|&z| [z, 0.0, 0.0]).collect();
    let mut conn = Vec::with_capacity(2 * n);
    for e in 0..n {
        conn.push(e);
        conn.push(e + 1);
    }
    let mut boundary_sets = BTreeMap::new();
    boundary_sets.insert("left".to_string(), vec![0]);
    boundary_sets.insert("right".to_string(), vec![n]);
    let mesh = Mesh {
        kind: ElementKind::Line2,
        coords,
        conn,
        region: vec![0; n],
        boundary_sets,
        structure: Structure::Tensor { axes: vec![axis] },
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Structured quad4 mesh from two coordinate axes. Region tags come from
/// `region` evaluated at element centers. Boundary sets: `xmin`, `xmax`,
/// `ymin`, `ymax`, `outer`.
pub fn build_quad_mesh(
    x_axis: Vec<f64>,
    y_axis: Vec<f64>,
    region: &dyn Fn([f64; 3]) -> u32,
) -> Result<Mesh> {
    for axis in [&x_axis, &y_axis] {
        if axis.len() < 2 || axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MeshSpec("axes must be strictly increasing".into()));
        }
    }
    let (nx, ny) = (x_axis.len() - 1, y_axis.len() - 1);
    let node = |i: usize, j: usize| i + (nx + 1) * j;
    let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            coords.push([x_axis[i], y_axis[j], 0.0]);
        }
    }
    // row-major storage is j-major; rebuild in node order
    let mut coords_ordered = vec![[0.0; 3]; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            coords_ordered[node(i, j)] = [x_axis[i], y_axis[j], 0.0];
        }
    }
    let coords = {
        let _ = coords;
        coords_ordered
    };
    let mut conn = Vec::with_capacity(4 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            conn.extend_from_slice(&[node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)]);
        }
    }
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    sets.insert("xmin".into(), (0..=ny).map(|j| node(0, j)).collect());
    sets.insert("xmax".into(), (0..=ny).map(|j| node(nx, j)).collect());
    sets.insert("ymin".into(), (0..=nx).map(|i| node(i, 0)).collect());
    sets.insert("ymax".into(), (0..=nx).map(|i| node(i, ny)).collect());
    let mut outer: Vec<usize> = sets.values().flatten().copied().collect();
    outer.sort_unstable();
    outer.dedup();
    sets.insert("outer".into(), outer);

    let mut mesh = Mesh {
        kind: ElementKind::Quad4,
        coords,
        conn,
        region: Vec::new(),
        boundary_sets: sets,
        structure: Structure::Tensor { axes: vec![x_axis, y_axis] },
    };
    mesh.region = (0..nx * ny).map(|e| region(mesh.element_center(e))).collect();
    mesh.validate()?;
    Ok(mesh)
}

/// Tensor-product hex8 box mesh. Boundary sets: the six faces plus `outer`.
pub fn build_hex_box(
    x_axis: Vec<f64>,
    y_axis: Vec<f64>,
    z_axis: Vec<f64>,
    region: &dyn Fn([f64; 3]) -> u32,
) -> Result<Mesh> {
    for axis in [&x_axis, &y_axis, &z_axis] {
        if axis.len() < 2 || axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MeshSpec("axes must be strictly increasing".into()));
        }
    }
    let (nx, ny, nz) = (x_axis.len() - 1, y_axis.len() - 1, z_axis.len() - 1);
    let node = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut coords = vec![[0.0; 3]; (nx + 1) * (ny + 1) * (nz + 1)];
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                coords[node(i, j, k)] = [x_axis[i], y_axis[j], z_axis[k]];
            }
        }
    }
    let mut conn = Vec::with_capacity(8 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                conn.extend_from_slice(&[
                    node(i, j, k),
                    node(i + 1, j, k),
                    node(i + 1, j + 1, k),
                    node(i, j + 1, k),
                    node(i, j, k + 1),
                    node(i + 1, j, k + 1),
                    node(i + 1, j + 1, k + 1),
                    node(i, j + 1, k + 1),
                ]);
            }
        }
    }
    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut face = |name: &str, pred: &dyn Fn(usize, usize, usize) -> bool| {
        let mut v = Vec::new();
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    if pred(i, j, k) {
                        v.push(node(i, j, k));
                    }
                }
            }
        }
        sets.insert(name.into(), v);
    };
    face("xmin", &|i, _, _| i == 0);
    face("xmax", &|i, _, _| i == nx);
    face("ymin", &|_, j, _| j == 0);
    face("ymax", &|_, j, _| j == ny);
    face("zmin", &|_, _, k| k == 0);
    face("zmax", &|_, _, k| k == nz);
    let mut outer: Vec<usize> = sets.values().flatten().copied().collect();
    outer.sort_unstable();
    outer.dedup();
    sets.insert("outer".into(), outer);

    let mut mesh = Mesh {
        kind: ElementKind::Hex8,
        coords,
        conn,
        region: Vec::new(),
        boundary_sets: sets,
        structure: Structure::Tensor { axes: vec![x_axis, y_axis, z_axis] },
    };
    mesh.region = (0..nx * ny * nz).map(|e| region(mesh.element_center(e))).collect();
    mesh.validate()?;
    Ok(mesh)
}

/// Extruded cylinder mesh for the 3D bore geometry: a cartesian core block
/// inside the first ring radius avoids degenerate cells at the axis; the
/// number of angular sectors `n_theta` must be divisible by 4. Cross-section
/// cells are extruded along `z_axis`. The `(z, r)` discretisation of the ring
/// region therefore matches a 2D tensor mesh built from `z_axis` and `radii`.
///
/// Boundary sets: `shell` (outermost radius), `zmin`, `zmax`, `outer`.
pub fn build_hex_cylinder(
    z_axis: Vec<f64>,
    radii: Vec<f64>,
    n_theta: usize,
    region: &dyn Fn([f64; 3]) -> u32,
) -> Result<Mesh> {
    if n_theta < 8 || n_theta % 4 != 0 {
        return Err(Error::MeshSpec(format!(
            "n_theta must be a multiple of 4 and >= 8, got {n_theta}"
        )));
    }
    if radii.len() < 2 || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MeshSpec("radii must be strictly increasing and positive".into()));
    }
    if z_axis.len() < 2 || z_axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MeshSpec("z axis must be strictly increasing".into()));
    }
    let m = n_theta / 4;
    let r1 = radii[0];
    let core_half = 0.5 * r1;
    let nr = radii.len();
    let nz = z_axis.len() - 1;

    // Cross-section nodes: core square grid, then rings.
    let mut xs: Vec<[f64; 2]> = Vec::new();
    let core_node = |i: usize, j: usize| i + (m + 1) * j;
    for j in 0..=m {
        for i in 0..=m {
            xs.push([
                core_half * (2.0 * i as f64 / m as f64 - 1.0),
                core_half * (2.0 * j as f64 / m as f64 - 1.0),
            ]);
        }
    }
    let n_core = (m + 1) * (m + 1);
    let theta0 = -std::f64::consts::FRAC_PI_4;
    for (jr, &r) in radii.iter().enumerate() {
        let _ = jr;
        for k in 0..n_theta {
            let th = theta0 + 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            xs.push([r * th.cos(), r * th.sin()]);
        }
    }
    let ring_node = |jr: usize, k: usize| n_core + jr * n_theta + (k % n_theta);

    // Square perimeter in angular (counterclockwise) order, starting at the
    // corner (core_half, -core_half) which sits at theta0.
    let mut perim = Vec::with_capacity(4 * m);
    for j in 0..m {
        perim.push(core_node(m, j)); // +x side, upward
    }
    for i in (1..=m).rev() {
        perim.push(core_node(i, m)); // +y side, leftward
    }
    for j in (1..=m).rev() {
        perim.push(core_node(0, j)); // -x side, downward
    }
    for i in 0..m {
        perim.push(core_node(i, 0)); // -y side, rightward
    }
    debug_assert_eq!(perim.len(), 4 * m);
    // rotate so perim[0] is the corner (m, 0) at angle -45 deg
    let pos = perim.iter().position(|&p| p == core_node(m, 0)).unwrap();
    perim.rotate_left(pos);

    // Cross-section cells, counterclockwise node order.
    let mut cells: Vec<[usize; 4]> = Vec::new();
    for j in 0..m {
        for i in 0..m {
            cells.push([core_node(i, j), core_node(i + 1, j), core_node(i + 1, j + 1), core_node(i, j + 1)]);
        }
    }
    for k in 0..n_theta {
        cells.push([perim[k], ring_node(0, k), ring_node(0, k + 1), perim[(k + 1) % (4 * m)]]);
    }
    for jr in 0..nr - 1 {
        for k in 0..n_theta {
            cells.push([
                ring_node(jr, k),
                ring_node(jr + 1, k),
                ring_node(jr + 1, k + 1),
                ring_node(jr, k + 1),
            ]);
        }
    }
    let slab_cells = cells.len();
    let level_nodes = xs.len();

    // Extrude along z.
    let mut coords = Vec::with_capacity(level_nodes * z_axis.len());
    for &z in &z_axis {
        for p in &xs {
            coords.push([p[0], p[1], z]);
        }
    }
    let mut conn = Vec::with_capacity(8 * slab_cells * nz);
    for iz in 0..nz {
        let lo = iz * level_nodes;
        let hi = (iz + 1) * level_nodes;
        for c in &cells {
            conn.extend_from_slice(&[
                lo + c[0],
                lo + c[1],
                lo + c[2],
                lo + c[3],
                hi + c[0],
                hi + c[1],
                hi + c[2],
                hi + c[3],
            ]);
        }
    }

    let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let shell: Vec<usize> = (0..z_axis.len())
        .flat_map(|iz| (0..n_theta).map(move |k| iz * level_nodes + n_core + (nr - 1) * n_theta + k))
        .collect();
    sets.insert("shell".into(), shell.clone());
    sets.insert("zmin".into(), (0..level_nodes).collect());
    sets.insert("zmax".into(), (nz * level_nodes..(nz + 1) * level_nodes).collect());
    let mut outer: Vec<usize> = sets.values().flatten().copied().collect();
    outer.sort_unstable();
    outer.dedup();
    sets.insert("outer".into(), outer);

    let mut mesh = Mesh {
        kind: ElementKind::Hex8,
        coords,
        conn,
        region: Vec::new(),
        boundary_sets: sets,
        structure: Structure::Cylinder {
            z_axis,
            radii,
            n_theta,
            core_half,
            slab_cells,
            level_nodes,
        },
    };
    mesh.region = (0..mesh.n_elems()).map(|e| region(mesh.element_center(e))).collect();
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_mesh_basic() {
        let m = build_line_mesh(50, 0.0, 1.0).unwrap();
        assert_eq!(m.n_nodes(), 51);
        assert_eq!(m.n_elems(), 50);
        for e in 0..50 {
            assert!((m.extent(e)[0] - 0.02).abs() < 1e-14);
        }
        assert_eq!(m.boundary_set("left").unwrap(), &[0]);
        assert_eq!(m.boundary_set("right").unwrap(), &[50]);
    }

    #[test]
    fn line_mesh_single_element() {
        let m = build_line_mesh(1, 0.0, 1.0).unwrap();
        assert_eq!(m.n_nodes(), 2);
        assert!((m.h(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_mesh_peclet_example() {
        // 800 elements, mu*sigma*u = 1000 -> per-element Pe = 0.625
        let m = build_line_mesh(800, 0.0, 1.0).unwrap();
        let h = m.extent(0)[0];
        assert!((h - 1.25e-3).abs() < 1e-15);
        assert!((1000.0 * h / 2.0 - 0.625).abs() < 1e-12);
    }

    #[test]
    fn line_mesh_rejects_bad_input() {
        assert!(build_line_mesh(0, 0.0, 1.0).is_err());
        assert!(build_line_mesh(5, 1.0, 1.0).is_err());
        assert!(build_line_mesh(5, 2.0, 1.0).is_err());
    }

    #[test]
    fn quad_mesh_counts_and_jacobian() {
        let x = build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 160 }).unwrap();
        let y = build_axis(0.0, 0.4, &GradingSpec::Uniform { n: 64 }).unwrap();
        let m = build_quad_mesh(x, y, &|_| 0).unwrap();
        assert_eq!(m.n_elems(), 10240);

        let unit = build_quad_mesh(vec![0.0, 1.0], vec![0.0, 1.0], &|_| 0).unwrap();
        assert_eq!(unit.n_nodes(), 4);
        let q = gauss_rule(ElementKind::Quad4, 2).unwrap();
        let geom = unit.geom(0);
        for &p in &q.points {
            assert!((geom.eval(p).unwrap().det_j - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn quad_mesh_graded_monotone_spacing() {
        let x = build_axis(0.0, 1.0, &GradingSpec::Geometric { n: 20, ratio: 1.15 }).unwrap();
        let y = build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 4 }).unwrap();
        let m = build_quad_mesh(x, y, &|_| 0).unwrap();
        let mut last = 0.0;
        for i in 0..20 {
            let w = m.extent(i)[0];
            assert!(w > last);
            last = w;
        }
    }

    #[test]
    fn unit_cube_hex() {
        let m = build_hex_box(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0], &|_| 0).unwrap();
        assert_eq!(m.n_nodes(), 8);
        assert_eq!(m.n_elems(), 1);
        let q = gauss_rule(ElementKind::Hex8, 2).unwrap();
        let geom = m.geom(0);
        let vol: f64 = q.points.iter().zip(&q.weights).map(|(&p, w)| w * geom.eval(p).unwrap().det_j).sum();
        assert!((vol - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_mesh_positive_jacobians_reduced() {
        // reduced bore mesh: validate() checks all order-2 Gauss points
        let z = build_axis(-0.06, 0.06, &GradingSpec::Focused { n: 30, focus: 0.0, ratio: 1.2 }).unwrap();
        let radii = geometric_coords(0.004, 0.1, 25, 1.12).unwrap();
        let m = build_hex_cylinder(z, radii, 24, &|c| {
            let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
            u32::from(r > 0.014)
        })
        .unwrap();
        assert_eq!(m.n_elems(), 30 * (25 * 24 + 6 * 6 + 24));
        // ~18000-hex class mesh per the reduced-resolution configuration
        assert!(m.n_elems() > 15_000 && m.n_elems() < 22_000);
    }

    #[test]
    fn cylinder_mesh_paper_scale_constructible() {
        // 48 z-slabs, 59 radial rings, 24 sectors -> 48*(59*24 + 36 + 24) = 70848
        let z = build_axis(-0.1, 0.1, &GradingSpec::Focused { n: 48, focus: 0.0, ratio: 1.12 }).unwrap();
        let radii = geometric_coords(0.003, 0.12, 59, 1.08).unwrap();
        let m = build_hex_cylinder(z, radii, 24, &|_| 0).unwrap();
        assert!(m.n_elems() > 70_000, "got {}", m.n_elems());
        // validate() already ran inside the builder: all Jacobians positive
    }

    #[test]
    fn cylinder_point_location() {
        let z = build_axis(-0.05, 0.05, &GradingSpec::Uniform { n: 8 }).unwrap();
        let radii = geometric_coords(0.004, 0.05, 10, 1.1).unwrap();
        let m = build_hex_cylinder(z, radii, 12, &|_| 0).unwrap();
        for &p in &[
            [0.02, 0.003, 0.011],
            [0.001, 0.0005, -0.04],   // core
            [0.0035, 0.0002, 0.0],    // transition
            [-0.03, -0.02, 0.049],
        ] {
            let (e, xi) = m.locate_point(p).unwrap();
            let s = m.geom(e).eval(xi).unwrap();
            for b in 0..3 {
                assert!((s.point[b] - p[b]).abs() < 1e-10, "point {p:?}");
            }
        }
        assert!(m.locate_point([0.2, 0.0, 0.0]).is_err());
    }

    #[test]
    fn tensor_point_location() {
        let x = build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 10 }).unwrap();
        let y = build_axis(0.0, 0.4, &GradingSpec::Geometric { n: 6, ratio: 1.3 }).unwrap();
        let m = build_quad_mesh(x, y, &|_| 0).unwrap();
        let (e, xi) = m.locate_point([0.314, 0.159, 0.0]).unwrap();
        let s = m.geom(e).eval(xi).unwrap();
        assert!((s.point[0] - 0.314).abs() < 1e-12);
        assert!((s.point[1] - 0.159).abs() < 1e-12);
    }

    #[test]
    fn refinement_nests_uniform_mesh_nodes() {
        let coarse = build_line_mesh(10, 0.0, 1.0).unwrap();
        let fine = build_line_mesh(20, 0.0, 1.0).unwrap();
        for (i, c) in coarse.coords.iter().enumerate() {
            let f = fine.coords[2 * i];
            assert!((c[0] - f[0]).abs() < 1e-15);
        }
    }
}
