//! Magnetostatic field of a circular current loop via complete elliptic
//! integrals (AGM evaluation, machine precision).

use crate::error::{Error, Result};
use crate::weakforms::MU0;

/// Complete elliptic integral of the first kind, parameter `m = k^2`.
pub fn ellipk(m: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&m));
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    while (a - b).abs() > 1e-16 * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::FRAC_PI_2 / a
}

/// Complete elliptic integral of the second kind, parameter `m = k^2`.
pub fn ellipe(m: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&m));
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    let mut c2_sum = 0.5 * m; // 2^{n-1} c_n^2 accumulated, n = 0 term
    let mut pow = 1.0f64;
    while (a - b).abs() > 1e-16 * a {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        c2_sum += pow * 0.5 * c * c;
    }
    (std::f64::consts::FRAC_PI_2 / a) * (1.0 - c2_sum)
}

/// Field of a circular loop of radius `r_loop` carrying current `i` centered
/// on the z-axis in the plane `z = 0`, evaluated at cylindrical `(r, z)`.
/// Returns `(B_r, B_z)` in tesla.
pub fn loop_field(r_loop: f64, i: f64, r: f64, z: f64) -> Result<(f64, f64)> {
    if r_loop <= 0.0 {
        return Err(Error::Config("loop radius must be positive".into()));
    }
    let a = r_loop;
    // reject evaluation on the filament itself
    let d2 = (r - a) * (r - a) + z * z;
    if d2 < (1e-9 * a) * (1e-9 * a) {
        return Err(Error::Config(format!("field evaluated on the loop filament (r={r}, z={z})")));
    }
    if r.abs() < 1e-12 * a {
        // on-axis closed form: B_z = mu0 I a^2 / (2 (a^2 + z^2)^{3/2})
        let bz = MU0 * i * a * a / (2.0 * (a * a + z * z).powf(1.5));
        return Ok((0.0, bz));
    }
    let denom2 = (a + r) * (a + r) + z * z;
    let denom = denom2.sqrt();
    let m = 4.0 * a * r / denom2;
    let k = ellipk(m);
    let e = ellipe(m);
    let front = MU0 * i / (2.0 * std::f64::consts::PI * denom);
    let near = (a - r) * (a - r) + z * z;
    let br = front * (z / r) * (-k + (a * a + r * r + z * z) / near * e);
    let bz = front * (k + (a * a - r * r - z * z) / near * e);
    Ok((br, bz))
}
