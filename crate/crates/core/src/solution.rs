//! Nodal field solutions bound to a mesh and dof layout.

use crate::error::Result;
use crate::linalg::DofLayout;
use crate::mesh::{ref_shape, Mesh};
use std::sync::Arc;

/// All unknown fields of one solve, stored dof-ordered (node-major).
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub mesh: Arc<Mesh>,
    pub layout: DofLayout,
    pub values: Vec<f64>,
}

impl FieldSolution {
    pub fn new(mesh: Arc<Mesh>, layout: DofLayout, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), layout.n_dofs());
        debug_assert_eq!(layout.n_nodes, mesh.n_nodes());
        Self { mesh, layout, values }
    }

    pub fn field_index(&self, name: &str) -> usize {
        self.layout
            .field_index(name)
            .unwrap_or_else(|| panic!("no field named '{name}'"))
    }

    pub fn value(&self, node: usize, field: usize) -> f64 {
        self.values[self.layout.dof(node, field)]
    }

    /// Nodal values of one field.
    pub fn nodal(&self, field: usize) -> Vec<f64> {
        self.layout.split(&self.values, field).collect()
    }

    /// FE interpolation of a field at a local point of an element.
    pub fn interpolate(&self, field: usize, elem: usize, xi: [f64; 3]) -> f64 {
        let rs = ref_shape(self.mesh.kind, xi);
        self.mesh
            .elem_nodes(elem)
            .iter()
            .enumerate()
            .map(|(k, &n)| rs.n[k] * self.value(n, field))
            .sum()
    }

    /// Physical gradient of a field at a local point of an element.
    pub fn gradient(&self, field: usize, elem: usize, xi: [f64; 3]) -> Result<[f64; 3]> {
        let s = self.mesh.geom(elem).eval(xi)?;
        let mut g = [0.0; 3];
        for (k, &n) in self.mesh.elem_nodes(elem).iter().enumerate() {
            let v = self.value(n, field);
            for b in 0..3 {
                g[b] += s.grad[k][b] * v;
            }
        }
        Ok(g)
    }

    /// Interpolated value at a physical point (locates the element first).
    pub fn interpolate_at(&self, field: usize, x: [f64; 3]) -> Result<f64> {
        let (e, xi) = self.mesh.locate_point(x)?;
        Ok(self.interpolate(field, e, xi))
    }

    pub fn max_abs(&self, field: usize) -> f64 {
        self.layout.split(&self.values, field).fold(0.0, |m, v| m.max(v.abs()))
    }
}
