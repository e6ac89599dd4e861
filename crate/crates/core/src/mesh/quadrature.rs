//! Gauss–Legendre quadrature on the reference line, square and cube.

use super::ElementKind;
use crate::error::{Error, Result};

/// Tensor-product Gauss rule on a reference element.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: ElementKind,
    /// Points per direction.
    pub order: usize,
    /// Local coordinates of the quadrature points.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// 1D Gauss–Legendre points and weights on [-1, 1].
fn gauss_1d(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    match order {
        1 => Ok((vec![0.0], vec![2.0])),
        2 => {
            let a = 1.0 / 3.0f64.sqrt();
            Ok((vec![-a, a], vec![1.0, 1.0]))
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            Ok((vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]))
        }
        _ => Err(Error::QuadratureOrder(order)),
    }
}

/// Builds the tensor-product Gauss rule with `order` points per direction.
pub fn gauss_rule(kind: ElementKind, order: usize) -> Result<QuadratureRule> {
    let (xs, ws) = gauss_1d(order)?;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match kind {
        ElementKind::Line2 => {
            for (x, w) in xs.iter().zip(&ws) {
                points.push([*x, 0.0, 0.0]);
                weights.push(*w);
            }
        }
        ElementKind::Quad4 => {
            for (y, wy) in xs.iter().zip(&ws) {
                for (x, wx) in xs.iter().zip(&ws) {
                    points.push([*x, *y, 0.0]);
                    weights.push(wx * wy);
                }
            }
        }
        ElementKind::Hex8 => {
            for (z, wz) in xs.iter().zip(&ws) {
                for (y, wy) in xs.iter().zip(&ws) {
                    for (x, wx) in xs.iter().zip(&ws) {
                        points.push([*x, *y, *z]);
                        weights.push(wx * wy * wz);
                    }
                }
            }
        }
    }
    Ok(QuadratureRule { kind, order, points, weights })
}
