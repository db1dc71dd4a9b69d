//! Special functions needed by the closed-form eigenfunctions.
//!
//! Everything is evaluated by forward recurrence. Normalisation constants go
//! through [`ln_gamma`] so that factorials never overflow.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default cap on polynomial order.
pub const N_MAX: usize = 200;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Polynomial degree / quantum number, bounded by a recurrence-length cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyOrder(usize);

impl PolyOrder {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, N_MAX)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::OrderTooLarge { order: n, cap });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Physicists' Hermite polynomial Hₙ(z).
pub fn hermite_phys(n: usize, z: f64) -> Result<f64> {
    let n = PolyOrder::new(n)?.get();
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Orthonormal Hermite functions (ψₙ(y), ψₙ₋₁(y)) with
/// ψₙ(y) = (2ⁿ n! √π)^(−1/2) Hₙ(y) e^(−y²/2). ψ₋₁ is reported as 0.
pub(crate) fn hermite_function_pair(n: usize, y: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * y * y).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Orthonormal Hermite function ψₙ(y).
pub fn hermite_function(n: usize, y: f64) -> Result<f64> {
    let n = PolyOrder::new(n)?.get();
    Ok(hermite_function_pair(n, y).0)
}

/// Derivative ψₙ'(y) = √(2n) ψₙ₋₁(y) − y ψₙ(y).
pub fn hermite_function_derivative(n: usize, y: f64) -> Result<f64> {
    let n = PolyOrder::new(n)?.get();
    let (cur, prev) = hermite_function_pair(n, y);
    Ok((2.0 * n as f64).sqrt() * prev - y * cur)
}

/// Parabolic cylinder function Dₙ(z) = 2^(−n/2) e^(−z²/4) Hₙ(z/√2) for integer n ≥ 0.
///
/// Evaluated as √(n!√π)·ψₙ(z/√2) so the polynomial never overflows on its own.
pub fn parabolic_cylinder_d(n: usize, z: f64) -> Result<f64> {
    let n = PolyOrder::new(n)?.get();
    let (psi, _) = hermite_function_pair(n, z / std::f64::consts::SQRT_2);
    let log_scale = 0.5 * (ln_gamma(n as f64 + 1.0)? + 0.5 * PI.ln());
    Ok(log_scale.exp() * psi)
}

/// Generalised Laguerre polynomial Lₙ^α(z).
pub fn laguerre_assoc(n: usize, alpha: f64, z: f64) -> Result<f64> {
    let n = PolyOrder::new(n)?.get();
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("Laguerre parameter alpha = {alpha} must exceed -1")));
    }
    Ok(laguerre_unchecked(n, alpha, z))
}

pub(crate) fn laguerre_unchecked(n: usize, alpha: f64, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - z) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// d/dz Lₙ^α(z) = −Lₙ₋₁^(α+1)(z).
pub fn laguerre_assoc_derivative(n: usize, alpha: f64, z: f64) -> Result<f64> {
    laguerre_assoc(n, alpha, z)?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(-laguerre_unchecked(n - 1, alpha + 1.0, z))
}

/// ζ(k) for k = 2..=ZETA_TERMS by Euler–Maclaurin summation.
const ZETA_TERMS: usize = 40;

fn zeta_table() -> &'static [f64; ZETA_TERMS + 1] {
    static TABLE: OnceLock<[f64; ZETA_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B₂ₖ/(2k)! for k = 1..8
        const B_OVER_FACT: [f64; 8] = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30_240.0,
            -1.0 / 1_209_600.0,
            1.0 / 47_900_160.0,
            -691.0 / 1_307_674_368_000.0,
            1.0 / 74_724_249_600.0,
            -3617.0 / 10_670_622_842_880_000.0,
        ];
        const CUT: f64 = 12.0;
        let mut table = [0.0; ZETA_TERMS + 1];
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let s = k as f64;
            // sum from the small terms upward
            let mut sum = 0.0;
            for j in (1..CUT as usize).rev() {
                sum += (j as f64).powf(-s);
            }
            sum += CUT.powf(1.0 - s) / (s - 1.0) + 0.5 * CUT.powf(-s);
            let mut rising = s;
            let mut power = CUT.powf(-s - 1.0);
            for (i, coeff) in B_OVER_FACT.iter().enumerate() {
                sum += coeff * rising * power;
                let m = 2.0 * i as f64;
                rising *= (s + m + 1.0) * (s + m + 2.0);
                power /= CUT * CUT;
            }
            *slot = sum;
        }
        table
    })
}

/// ln Γ(1+z) for |z| ≤ 1/4 from the ζ-series.
fn ln_gamma_1p(z: f64) -> f64 {
    let zeta = zeta_table();
    let mut sum = -EULER_GAMMA * z;
    let mut zk = z;
    for (k, zeta_k) in zeta.iter().enumerate().skip(2) {
        zk *= -z;
        let term = zeta_k * zk / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Stirling series for x ≥ 10.
fn ln_gamma_stirling(x: f64) -> f64 {
    // B₂ₖ/(2k(2k−1)) for k = 1..8
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in C {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Natural logarithm of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires a finite x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if (x - 1.0).abs() <= 0.25 {
        return Ok(ln_gamma_1p(x - 1.0));
    }
    if (x - 2.0).abs() <= 0.25 {
        let z = x - 2.0;
        return Ok(ln_gamma_1p(z) + z.ln_1p());
    }
    if x < 0.75 {
        // Γ(x) = Γ(x+1)/x
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    if x >= 10.0 {
        return Ok(ln_gamma_stirling(x));
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < 10.0 {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(ln_gamma_stirling(shifted) - product.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_trivial_values() {
        assert_eq!(hermite_phys(0, 1.7).unwrap(), 1.0);
        assert_eq!(hermite_phys(2, 1.0).unwrap(), 2.0);
        assert_eq!(hermite_phys(3, 0.5).unwrap(), 8.0 * 0.125 - 12.0 * 0.5);
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(matches!(
            hermite_phys(N_MAX + 1, 0.0),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(laguerre_assoc(N_MAX + 1, 0.0, 1.0).is_err());
        assert!(PolyOrder::with_cap(5, 4).is_err());
    }

    #[test]
    fn parabolic_cylinder_low_orders() {
        for z in [-3.0, -0.4, 0.0, 1.1, 4.5] {
            let d0 = parabolic_cylinder_d(0, z).unwrap();
            assert_relative_eq!(d0, (-z * z / 4.0).exp(), max_relative = 1e-14);
        }
        let d1 = parabolic_cylinder_d(1, 2.0).unwrap();
        assert_relative_eq!(d1, 2.0 * (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(d1, 0.735_758_882_342_884_6, max_relative = 1e-12);
    }

    #[test]
    fn laguerre_values_and_domain() {
        assert_eq!(laguerre_assoc(0, 3.2, 7.0).unwrap(), 1.0);
        assert_relative_eq!(laguerre_assoc(1, 1.5, 2.0).unwrap(), 0.5, max_relative = 1e-15);
        assert!(matches!(laguerre_assoc(2, -1.0, 0.3), Err(Error::Domain(_))));
        // L₂^α(z) = ((z² − 2(α+2)z + (α+1)(α+2))/2
        let (a, z) = (0.7, 1.9);
        let want = (z * z - 2.0 * (a + 2.0) * z + (a + 1.0) * (a + 2.0)) / 2.0;
        assert_relative_eq!(laguerre_assoc(2, a, z).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn laguerre_derivative_matches_finite_difference() {
        let h = 1e-5;
        for n in 0..8 {
            let d = laguerre_assoc_derivative(n, 1.5, 2.3).unwrap();
            let fd = (laguerre_assoc(n, 1.5, 2.3 + h).unwrap()
                - laguerre_assoc(n, 1.5, 2.3 - h).unwrap())
                / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "n={n}: {d} vs {fd}");
        }
    }

    #[test]
    fn ln_gamma_reference_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(ln_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(0.5).unwrap(), 0.572_364_942_924_700_1, max_relative = 1e-13);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-2.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_near_zeros_keeps_relative_accuracy() {
        // ln Γ(1+z) ≈ −γ z and ln Γ(2+z) ≈ (1−γ) z for tiny z
        for z in [1e-9, -3e-8, 2e-6] {
            let near1 = ln_gamma(1.0 + z).unwrap();
            assert_relative_eq!(near1, -EULER_GAMMA * z, max_relative = 1e-5);
            let near2 = ln_gamma(2.0 + z).unwrap();
            assert_relative_eq!(near2, (1.0 - EULER_GAMMA) * z, max_relative = 1e-5);
        }
    }

    #[test]
    fn zeta_table_known_values() {
        let z = zeta_table();
        assert_relative_eq!(z[2], PI * PI / 6.0, max_relative = 1e-15);
        assert_relative_eq!(z[4], PI.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(z[3], 1.202_056_903_159_594_3, max_relative = 1e-15);
    }
}
