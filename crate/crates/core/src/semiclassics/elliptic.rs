//! Complete elliptic integrals by the arithmetic–geometric mean.
//!
//! The argument is the modulus u: K(u) = ∫₀^{π/2} dx/√(1 − u² sin²x).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// K and E from the complementary modulus u' = √(1 − u²), which keeps
/// precision when u is close to 1.
pub fn elliptic_ke_complement(kp: f64) -> Result<(f64, f64)> {
    if !(kp > 0.0 && kp <= 1.0) {
        return Err(Error::Domain(format!("complementary modulus {kp} outside (0, 1]")));
    }
    let mut a = 1.0;
    let mut b = kp;
    let mut sum = 0.5 * (1.0 - kp) * (1.0 + kp);
    let mut pow = 0.5;
    for _ in 0..64 {
        let cn = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * cn * cn;
        // the next c is about c²/4a, already below rounding
        if cn.abs() <= 1e-9 * a {
            break;
        }
    }
    let k = PI / (2.0 * a);
    Ok((k, k * (1.0 - sum)))
}

pub fn elliptic_k(u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u.abs()) {
        return Err(Error::Domain(format!("K(u) needs |u| < 1, got {u}")));
    }
    Ok(elliptic_ke_complement(((1.0 - u) * (1.0 + u)).sqrt())?.0)
}

pub fn elliptic_e(u: f64) -> Result<f64> {
    let u = u.abs();
    if u > 1.0 {
        return Err(Error::Domain(format!("E(u) needs |u| <= 1, got {u}")));
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    Ok(elliptic_ke_complement(((1.0 - u) * (1.0 + u)).sqrt())?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassics::quadrature::integrate;

    #[test]
    fn trivial_values() {
        assert!((elliptic_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((elliptic_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn matches_direct_quadrature() {
        for &u in &[0.1, 0.5, 0.8, 0.95, 0.999] {
            let kq = integrate(|x: f64| 1.0 / (1.0 - u * u * x.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14).unwrap();
            let eq = integrate(|x: f64| (1.0 - u * u * x.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14).unwrap();
            assert!((elliptic_k(u).unwrap() - kq).abs() < 1e-13 * kq, "K({u})");
            assert!((elliptic_e(u).unwrap() - eq).abs() < 1e-13 * eq, "E({u})");
        }
    }

    #[test]
    fn legendre_relation() {
        // E K' + E' K − K K' = π/2
        for &u in &[0.2f64, 0.6, 0.9] {
            let up = (1.0 - u * u).sqrt();
            let (k, e) = (elliptic_k(u).unwrap(), elliptic_e(u).unwrap());
            let (kp, ep) = (elliptic_k(up).unwrap(), elliptic_e(up).unwrap());
            let r = e * kp + ep * k - k * kp - PI / 2.0;
            assert!(r.abs() < 1e-13, "{u}: {r}");
        }
    }
}
