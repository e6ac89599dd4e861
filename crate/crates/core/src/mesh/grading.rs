//! 1D axis generation: uniform and geometrically graded coordinate vectors.
//!
//! Structured meshes are tensor products of 1D axes. A graded axis follows a
//! geometric progression of element sizes away from a focus coordinate, which
//! is how the TEAM-9a meshes concentrate resolution near the current loop.

use crate::error::{Error, Result};

/// Grading of a single mesh direction.
#[derive(Debug, Clone, PartialEq)]
pub enum GradingSpec {
    /// `n` equal intervals.
    Uniform { n: usize },
    /// Geometric progression from `x0` to `x1`: the first interval has width
    /// `h0` scaled to fit, each following interval is `ratio` times the
    /// previous one. `ratio > 1` coarsens away from `x0`, `ratio < 1` refines.
    Geometric { n: usize, ratio: f64 },
    /// Two-sided grading around an interior focus: finest spacing at `focus`,
    /// geometric coarsening with `ratio` toward both ends. The number of
    /// intervals on each side is proportional to the side length.
    Focused { n: usize, focus: f64, ratio: f64 },
    /// Piecewise axis assembled from segments; coordinates are concatenated.
    Segments(Vec<AxisSegment>),
}

/// One segment of a piecewise axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSegment {
    pub x0: f64,
    pub x1: f64,
    pub n: usize,
    /// Interval growth factor from the `x0` end; 1.0 is uniform.
    pub ratio: f64,
}

/// Builds the sorted coordinate vector for `[x0, x1]` under `spec`.
pub fn build_axis(x0: f64, x1: f64, spec: &GradingSpec) -> Result<Vec<f64>> {
    if !(x1 > x0) {
        return Err(Error::MeshSpec(format!(
            "axis extent must be positive, got [{x0}, {x1}]"
        )));
    }
    match spec {
        GradingSpec::Uniform { n } => geometric_coords(x0, x1, *n, 1.0),
        GradingSpec::Geometric { n, ratio } => geometric_coords(x0, x1, *n, *ratio),
        GradingSpec::Focused { n, focus, ratio } => {
            if !(*focus > x0 && *focus < x1) {
                return Err(Error::MeshSpec(format!(
                    "focus {focus} must lie inside ({x0}, {x1})"
                )));
            }
            let frac = (focus - x0) / (x1 - x0);
            let n_lo = ((*n as f64) * frac).round().max(1.0) as usize;
            let n_hi = n.checked_sub(n_lo).filter(|&m| m >= 1).ok_or_else(|| {
                Error::MeshSpec(format!("focused axis needs intervals on both sides of {focus}"))
            })?;
            // Left side coarsens toward x0, so grade from the focus outward.
            let mut left = geometric_coords(*focus, *focus + (focus - x0), n_lo, *ratio)?;
            for x in &mut left {
                *x = 2.0 * focus - *x; // mirror back onto [x0, focus]
            }
            left.reverse();
            let right = geometric_coords(*focus, x1, n_hi, *ratio)?;
            left.extend_from_slice(&right[1..]);
            Ok(left)
        }
        GradingSpec::Segments(segments) => {
            if segments.is_empty() {
                return Err(Error::MeshSpec("empty segment list".into()));
            }
            let mut coords = Vec::new();
            for (i, seg) in segments.iter().enumerate() {
                let piece = geometric_coords(seg.x0, seg.x1, seg.n, seg.ratio)?;
                if i == 0 {
                    if (seg.x0 - x0).abs() > 1e-12 {
                        return Err(Error::MeshSpec("first segment must start at x0".into()));
                    }
                    coords.extend_from_slice(&piece);
                } else {
                    let last = *coords.last().unwrap();
                    if (seg.x0 - last).abs() > 1e-12 {
                        return Err(Error::MeshSpec(format!(
                            "segment {i} starts at {} but previous ended at {last}",
                            seg.x0
                        )));
                    }
                    coords.extend_from_slice(&piece[1..]);
                }
            }
            if (coords.last().unwrap() - x1).abs() > 1e-12 {
                return Err(Error::MeshSpec("last segment must end at x1".into()));
            }
            Ok(coords)
        }
    }
}

/// `n` intervals on `[x0, x1]` with widths in geometric progression `ratio`.
pub fn geometric_coords(x0: f64, x1: f64, n: usize, ratio: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::MeshSpec("interval count must be >= 1".into()));
    }
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::MeshSpec(format!("grading ratio must be positive, got {ratio}")));
    }
    if !(x1 > x0) {
        return Err(Error::MeshSpec(format!("segment extent must be positive, got [{x0}, {x1}]")));
    }
    let len = x1 - x0;
    // First width h0 so that h0 * (1 + r + ... + r^{n-1}) = len.
    let sum = if (ratio - 1.0).abs() < 1e-14 {
        n as f64
    } else {
        (ratio.powi(n as i32) - 1.0) / (ratio - 1.0)
    };
    let h0 = len / sum;
    let mut coords = Vec::with_capacity(n + 1);
    coords.push(x0);
    let mut h = h0;
    let mut x = x0;
    for i in 0..n {
        x += h;
        h *= ratio;
        // Land exactly on the endpoint regardless of rounding.
        coords.push(if i + 1 == n { x1 } else { x });
    }
    for w in coords.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::MeshSpec(format!(
                "grading produced a degenerate interval near x = {}",
                w[0]
            )));
        }
    }
    Ok(coords)
}

/// Splits every interval of `coords` into `factor` equal parts. Parent
/// coordinates are preserved bitwise, so refinement nests exactly.
pub fn subdivide_axis(coords: &[f64], factor: usize) -> Vec<f64> {
    assert!(factor >= 1 && coords.len() >= 2);
    let mut out = Vec::with_capacity((coords.len() - 1) * factor + 1);
    for w in coords.windows(2) {
        out.push(w[0]);
        for k in 1..factor {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / factor as f64);
        }
    }
    out.push(*coords.last().unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis_is_uniform() {
        let c = build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 50 }).unwrap();
        assert_eq!(c.len(), 51);
        for (i, w) in c.windows(2).enumerate() {
            assert!((w[1] - w[0] - 0.02).abs() < 1e-14, "interval {i}");
        }
        assert_eq!(c[0], 0.0);
        assert_eq!(*c.last().unwrap(), 1.0);
    }

    #[test]
    fn geometric_ratio_holds() {
        let c = geometric_coords(0.0, 1.0, 10, 1.15).unwrap();
        assert_eq!(c.len(), 11);
        for w in c.windows(3) {
            let r = (w[2] - w[1]) / (w[1] - w[0]);
            assert!((r - 1.15).abs() < 1e-10);
        }
    }

    #[test]
    fn focused_axis_monotone_and_finest_at_focus() {
        let c = build_axis(-0.1, 0.1, &GradingSpec::Focused { n: 30, focus: 0.0, ratio: 1.3 })
            .unwrap();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        let widths: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
        let min = widths.iter().cloned().fold(f64::INFINITY, f64::min);
        // the smallest interval must touch the focus
        let at_focus = widths
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((c[at_focus] - 0.0).abs() < min * 2.0 || (c[at_focus + 1] - 0.0).abs() < min * 2.0);
    }

    #[test]
    fn subdivision_nests_parent_coordinates() {
        let c = geometric_coords(0.0, 2.0, 7, 1.4).unwrap();
        let f = subdivide_axis(&c, 2);
        assert_eq!(f.len(), 15);
        for (i, x) in c.iter().enumerate() {
            assert_eq!(f[2 * i].to_bits(), x.to_bits());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(build_axis(1.0, 0.0, &GradingSpec::Uniform { n: 5 }).is_err());
        assert!(build_axis(0.0, 1.0, &GradingSpec::Uniform { n: 0 }).is_err());
        assert!(geometric_coords(0.0, 1.0, 5, -2.0).is_err());
    }
}
