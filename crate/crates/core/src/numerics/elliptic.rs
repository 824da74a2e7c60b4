use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

struct Agm {
    a: f64,
    /// `Σ_{n≥1} 2^{n−1} c_n^2`
    tail: f64,
}

// a_0 = 1, b_0 = k', c_0 = k; c_{n+1} = c_n^2 / (4 a_{n+1}) avoids the
// cancellation in (a_n − b_n)/2.
fn agm(k: f64) -> Agm {
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut c = k;
    let mut tail = 0.0;
    let mut weight = 0.5;
    for _ in 0..64 {
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        c = c * c / (4.0 * next_a);
        weight *= 2.0;
        tail += weight * c * c;
        a = next_a;
        b = next_b;
        if c <= f64::EPSILON * a * 1e-3 {
            break;
        }
    }
    Agm { a, tail }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "elliptic modulus {k} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, modulus `k ∈ [0, 1)`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    if k >= 1.0 {
        return Err(Error::EllipticDomain(k));
    }
    Ok(FRAC_PI_2 / agm(k).a)
}

/// Complete elliptic integral of the second kind, modulus `k ∈ [0, 1]`.
pub fn elliptic_e(k: f64) -> Result<f64> {
    check_modulus(k)?;
    if k == 1.0 {
        return Ok(1.0);
    }
    let g = agm(k);
    Ok(FRAC_PI_2 / g.a * (1.0 - 0.5 * k * k - g.tail))
}

/// `(K(k), E(k))`; rejects `k = 1` where K diverges.
pub fn elliptic_k_e(k: f64) -> Result<(f64, f64)> {
    Ok((elliptic_k(k)?, elliptic_e(k)?))
}

/// Action at the separatrix of `V = 1 − cos α`.
pub const PENDULUM_SEPARATRIX_ACTION: f64 = 8.0 / PI;

/// `A(E) = (8/π)[E(k) − (1 − k²)K(k)]` with `k² = E/2`, for `0 < E < 2`,
/// evaluated as `(8/π)·K·(k²/2 − Σ_{n≥1} 2^{n−1} c_n²)`.
pub fn pendulum_action_closed_form(energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy < 2.0) {
        return Err(Error::EnergyOutOfRange {
            energy,
            min: 0.0,
            max: 2.0,
        });
    }
    let k2 = 0.5 * energy;
    let g = agm(k2.sqrt());
    Ok(8.0 / PI * (FRAC_PI_2 / g.a) * (0.5 * k2 - g.tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_modulus() {
        let (k, e) = elliptic_k_e(0.0).unwrap();
        assert_eq!(k, FRAC_PI_2);
        assert_eq!(e, FRAC_PI_2);
    }

    #[test]
    fn unit_modulus() {
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        assert!(matches!(elliptic_k(1.0), Err(Error::EllipticDomain(_))));
        assert!(elliptic_k(1.5).is_err());
    }

    #[test]
    fn pendulum_limits() {
        let small = pendulum_action_closed_form(1e-6).unwrap();
        assert!((small / 1e-6 - 1.0).abs() < 1e-6);
        let near = pendulum_action_closed_form(2.0 - 1e-12).unwrap();
        assert!((near - PENDULUM_SEPARATRIX_ACTION).abs() < 1e-9);
        assert!(pendulum_action_closed_form(2.0).is_err());
        assert!(pendulum_action_closed_form(0.0).is_err());
    }
}
