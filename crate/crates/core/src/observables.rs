//! Expectation values, uncertainty products and autocorrelation functions.
//!
//! Every lab-frame state has the form φ = σ^(−1/2) χ(x/σ) e^(iθx²) with a
//! real profile χ, so the moments reduce to ξ-space averages:
//!   ⟨x⟩ = σ⟨ξ⟩, ⟨x²⟩ = σ²⟨ξ²⟩, ⟨p⟩ = mσ̇⟨ξ⟩,
//!   ⟨p²⟩ = m²σ̇²⟨ξ²⟩ + (ħ²/σ²)⟨χ′²⟩.
//! The closed forms below evaluate these averages analytically; the
//! quadrature routines integrate the lab-frame wavefunctions directly.
//!
//! Model B lives on the half-line. Its moments are those of the
//! parity-symmetric extension to the full line, which is smooth only when
//! b = 2ℓ+1; odd moments then vanish and even moments equal the half-line
//! values.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{eigen, Eigenstate, Method};
use crate::model::{ModelConfig, ModelKind, WaveValue};
use crate::perturb::perturbed_state;
use crate::quad::{try_integrate, QuadOptions, QuadValue};

/// Moments of one state at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    pub t: f64,
    pub method: Method,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    /// ΔxΔp.
    pub dxdp: f64,
}

impl ObservableSet {
    fn from_xi(model: &ModelConfig, t: f64, method: Method, xi: XiMoments) -> Result<Self> {
        let ep = model.ep()?;
        let (s, sd, m, h) = (ep.sigma(t), ep.sigma_dot(t), model.m, model.hbar);
        Ok(Self {
            t,
            method,
            mean_x: s * xi.mean,
            mean_p: m * sd * xi.mean,
            mean_x2: s * s * xi.second,
            mean_p2: m * m * sd * sd * xi.second + h * h * xi.kinetic / (s * s),
            dxdp: xi.uncertainty(m * s * sd, h),
        })
    }

    pub fn var_x(&self) -> f64 {
        self.mean_x2 - self.mean_x * self.mean_x
    }

    pub fn var_p(&self) -> f64 {
        self.mean_p2 - self.mean_p * self.mean_p
    }
}

/// ξ-space averages ⟨ξ⟩, ⟨ξ²⟩, ⟨χ′²⟩ of a real profile.
#[derive(Debug, Clone, Copy)]
struct XiMoments {
    mean: f64,
    second: f64,
    kinetic: f64,
}

impl XiMoments {
    /// ΔxΔp = ħ√(vK + (mσσ̇)²v²/ħ²) with v the ξ-variance, K = ⟨χ′²⟩.
    fn uncertainty(&self, m_sigma_sigma_dot: f64, hbar: f64) -> f64 {
        let v = self.second - self.mean * self.mean;
        let c = m_sigma_sigma_dot / hbar;
        hbar * (v * self.kinetic + c * c * v * v).sqrt()
    }
}

fn require_parity_extension(model: &ModelConfig) -> Result<()> {
    if model.kind == ModelKind::GoldmanKrivchenko && !model.has_odd_integer_b() {
        return Err(Error::Constraint(format!(
            "Model B observables need b = 2l+1 with integer l, got b = {}",
            model.b_param()
        )));
    }
    Ok(())
}

/// Exact ξ-space averages at expansion parameter ε, with their ε-derivatives.
fn xi_moments(model: &ModelConfig, n: usize) -> (XiMoments, XiMoments) {
    let (m, tau, h) = (model.m, model.tau, model.hbar);
    let nf = n as f64;
    match model.kind {
        ModelKind::StarkQuadratic => {
            // Hermite profile of width √(ħ/Ω_I) centred at ξ₀
            let w = model.omega_i();
            let x0 = model.xi0();
            let base = m * tau + 2.0 * model.c_kappa;
            let dx0 = 2.0 * model.e0 / (base * base);
            let dw = m / w;
            let q = nf + 0.5;
            (
                XiMoments {
                    mean: x0,
                    second: x0 * x0 + q * h / w,
                    kinetic: q * w / h,
                },
                XiMoments {
                    mean: dx0,
                    second: 2.0 * x0 * dx0 - q * h * dw / (w * w),
                    kinetic: q * dw / h,
                },
            )
        }
        ModelKind::GoldmanKrivchenko => {
            // radial oscillator: ⟨ξ²⟩ = λ/a², and ⟨ξ⁻²⟩ = 2a/(ħb) by
            // Hellmann–Feynman in the barrier strength
            let a = model.a_param();
            let b = model.b_param();
            let da = m / a;
            let s = 2.0 * nf + 1.0 + 0.5 * b;
            let r = 2.0 * nf + 1.0 + 0.5 / b;
            (
                XiMoments {
                    mean: 0.0,
                    second: h * s / a,
                    kinetic: a * r / h,
                },
                XiMoments {
                    mean: 0.0,
                    second: -h * s * da / (a * a),
                    kinetic: da * r / h,
                },
            )
        }
    }
}

/// Closed-form moments of the exact state ψₙ at time t.
pub fn expectations_exact(model: &ModelConfig, n: usize, t: f64) -> Result<ObservableSet> {
    model.validate()?;
    require_parity_extension(model)?;
    let (xi, _) = xi_moments(model, n);
    ObservableSet::from_xi(model, t, Method::Exact, xi)
}

/// Closed-form moments of the first-order state: every exact closed form
/// expanded to first order in ε about ε = 0.
pub fn expectations_perturbative(model: &ModelConfig, n: usize, t: f64) -> Result<ObservableSet> {
    model.validate()?;
    require_parity_extension(model)?;
    let eps = model.epsilon();
    if eps < 0.0 {
        return Err(Error::InvalidConfig(format!("expansion parameter must be >= 0, got {eps}")));
    }
    let base = model.with_epsilon(0.0)?;
    let (xi, d) = xi_moments(&base, n);
    let ep = model.ep()?;
    let (s, sd, m, h) = (ep.sigma(t), ep.sigma_dot(t), model.m, model.hbar);
    let lin = XiMoments {
        mean: xi.mean + eps * d.mean,
        second: xi.second + eps * d.second,
        kinetic: xi.kinetic + eps * d.kinetic,
    };
    let mut out = ObservableSet::from_xi(model, t, Method::Perturbative, lin)?;
    // ΔxΔp is not linear in the moments; expand the product itself
    let c = m * s * sd / h;
    let v = xi.second - xi.mean * xi.mean;
    let dv = d.second - 2.0 * xi.mean * d.mean;
    let g = v * xi.kinetic + c * c * v * v;
    let dg = dv * xi.kinetic + v * d.kinetic + 2.0 * c * c * v * dv;
    out.dxdp = h * (g.sqrt() + eps * 0.5 * dg / g.sqrt());
    Ok(out)
}

/// ∫ of the moment integrands, accumulated together.
#[derive(Debug, Clone, Copy, Default)]
struct Sums([f64; 5]);

impl Add for Sums {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Sums(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Sums {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Sums(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for Sums {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Sums(self.0.map(|v| v * c))
    }
}

impl QuadValue for Sums {
    fn zero() -> Self {
        Sums::default()
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Parity of the Model B extension, (−1)^(ℓ+1) with ℓ = (b−1)/2.
fn extension_parity(model: &ModelConfig) -> f64 {
    let ell = ((model.b_param() - 1.0) / 2.0).round() as i64;
    if ell % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Moments of any state by direct quadrature of the lab-frame wavefunction
/// and its analytic x-derivative, normalised by the computed norm.
pub fn expectations_quadrature(state: &Eigenstate, t: f64) -> Result<ObservableSet> {
    let model = state.model();
    require_parity_extension(model)?;
    let frame = state.frame(t);
    let hbar = model.hbar;
    let (lo, hi) = state.x_support(t, 14.0);
    let half_line = model.kind == ModelKind::GoldmanKrivchenko;
    let parity = if half_line { extension_parity(model) } else { 1.0 };
    let lo = if half_line { -hi } else { lo };
    let eval = |x: f64| -> Result<WaveValue> {
        if half_line && x < 0.0 {
            let w = state.phi_in(&frame, -x)?;
            Ok(WaveValue {
                value: w.value * parity,
                dx: w.dx * -parity,
                ..WaveValue::ZERO
            })
        } else {
            state.phi_in(&frame, x)
        }
    };
    let opts = QuadOptions::with_tol(1e-15, 1e-13).panels(32);
    let est = try_integrate(
        |x| {
            let w = eval(x)?;
            let rho = w.value.norm_sqr();
            // ⟨p⟩ density Re[φ*(−iħφ′)] = ħ Im[φ*φ′]
            let p = hbar * (w.value.conj() * w.dx).im;
            Ok(Sums([rho, x * rho, x * x * rho, p, hbar * hbar * w.dx.norm_sqr()]))
        },
        lo,
        hi,
        &opts,
    )?;
    let [norm, x1, x2, p1, p2] = est.value.0;
    let (mean_x, mean_x2, mean_p, mean_p2) = (x1 / norm, x2 / norm, p1 / norm, p2 / norm);
    let var = ((mean_x2 - mean_x * mean_x) * (mean_p2 - mean_p * mean_p)).max(0.0);
    Ok(ObservableSet {
        t,
        method: state.method,
        mean_x,
        mean_p,
        mean_x2,
        mean_p2,
        dxdp: var.sqrt(),
    })
}

fn state_for(model: &ModelConfig, n: usize, method: Method) -> Result<Eigenstate> {
    match method {
        Method::Exact => eigen(model, n),
        Method::Perturbative => perturbed_state(model, n),
        other => Err(Error::Unsupported(other.to_string())),
    }
}

/// Aₙ(t) = |⟨ψₙ(t)|ψₙ(0)⟩|/(‖ψₙ(t)‖‖ψₙ(0)‖) for the exact or first-order state.
pub fn autocorrelation(model: &ModelConfig, n: usize, t: f64, method: Method) -> Result<f64> {
    autocorrelation_of(&state_for(model, n, method)?, t)
}

/// Autocorrelation of a given state. The domain starts at 12 widths of the
/// wider of ψ(t), ψ(0) and doubles until the value changes by < 1e-9.
pub fn autocorrelation_of(state: &Eigenstate, t: f64) -> Result<f64> {
    let (f0, ft) = (state.frame(0.0), state.frame(t));
    let half_line = state.model().kind == ModelKind::GoldmanKrivchenko;
    let opts = QuadOptions::with_tol(1e-15, 1e-13).panels(32);
    let overlap = |extra: f64| -> Result<f64> {
        let (a0, b0) = state.x_support(0.0, extra);
        let (a1, b1) = state.x_support(t, extra);
        let lo = if half_line { 0.0 } else { a0.min(a1) };
        let hi = b0.max(b1);
        let est = try_integrate(
            |x| {
                let p0 = state.psi_in(&f0, x)?.value;
                let pt = state.psi_in(&ft, x)?.value;
                Ok(Sums([
                    (pt.conj() * p0).re,
                    (pt.conj() * p0).im,
                    p0.norm_sqr(),
                    pt.norm_sqr(),
                    0.0,
                ]))
            },
            lo,
            hi,
            &opts,
        )?;
        let [re, im, n0, nt, _] = est.value.0;
        Ok(Complex64::new(re, im).norm() / (n0 * nt).sqrt())
    };
    let mut extra = 12.0;
    let mut prev = overlap(extra)?;
    for _ in 0..4 {
        extra *= 2.0;
        let next = overlap(extra)?;
        if (next - prev).abs() < 1e-9 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        estimate: f64::NAN,
        tolerance: 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn close(a: &ObservableSet, b: &ObservableSet, tol: f64) {
        for (u, v, name) in [
            (a.mean_x, b.mean_x, "x"),
            (a.mean_p, b.mean_p, "p"),
            (a.mean_x2, b.mean_x2, "x2"),
            (a.mean_p2, b.mean_p2, "p2"),
            (a.dxdp, b.dxdp, "dxdp"),
        ] {
            assert!((u - v).abs() <= tol * (1.0 + v.abs()), "{name}: {u} vs {v} at t={}", a.t);
        }
    }

    #[test]
    fn stark_mean_position_example() {
        let model = ModelConfig::stark(3.0, 0.5, 1.0, 2.0, 0.0).unwrap();
        let o = expectations_exact(&model, 1, 0.0).unwrap();
        assert_relative_eq!(o.mean_x, -2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(o.dxdp, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn perturbative_mean_position_example() {
        let model = ModelConfig::stark(3.0, 0.5, 1.0, 2.0, 0.1).unwrap();
        let o = expectations_perturbative(&model, 0, 0.0).unwrap();
        assert!((o.mean_x - (-2.0 / 3.0 + 0.1 * 4.0 / 9.0)).abs() < 1e-12);
        let e = expectations_exact(&model, 0, 0.0).unwrap();
        assert!((e.mean_x + 0.625).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_quadrature_over_a_period() {
        let models = [
            ModelConfig::stark(3.0, 0.5, 1.0, 2.0, 0.1).unwrap(),
            ModelConfig::goldman_krivchenko_ell(1.0, 0.5, 1.0, 0.5, 1).unwrap(),
            ModelConfig::goldman_krivchenko_ell(2.0, 0.7, 1.3, 0.2, 2).unwrap(),
        ];
        for model in models {
            let period = PI / model.omega;
            for n in [0, 3] {
                let state = eigen(&model, n).unwrap();
                for k in 0..5 {
                    let t = period * k as f64 / 5.0 + 0.1;
                    let q = expectations_quadrature(&state, t).unwrap();
                    close(&expectations_exact(&model, n, t).unwrap(), &q, 1e-9);
                }
            }
        }
    }

    #[test]
    fn uncertainty_formula_for_stark() {
        let (m, w, tau, c) = (3.0, 0.5, 1.0, 0.1);
        let model = ModelConfig::stark(m, w, tau, 2.0, c).unwrap();
        for t in [0.3, 1.1, 2.9] {
            let o = expectations_exact(&model, 2, t).unwrap();
            let s = (2.0 * w * t).sin();
            let want = 2.5 * (1.0 + m * (tau - w * w).powi(2) * s * s / (4.0 * w * w * (2.0 * c + m * tau))).sqrt();
            assert_relative_eq!(o.dxdp, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn perturbative_is_first_order_taylor() {
        for base in [
            ModelConfig::stark(1.5, 0.6, 1.2, 0.7, 0.0).unwrap(),
            ModelConfig::goldman_krivchenko_ell(1.5, 0.6, 1.2, 0.0, 1).unwrap(),
        ] {
            let t = 0.9;
            let defect = |eps: f64| {
                let model = base.with_epsilon(eps).unwrap();
                let e = expectations_exact(&model, 2, t).unwrap();
                let p = expectations_perturbative(&model, 2, t).unwrap();
                [e.mean_x - p.mean_x, e.mean_x2 - p.mean_x2, e.mean_p2 - p.mean_p2, e.dxdp - p.dxdp]
            };
            let (d1, d2) = (defect(0.002), defect(0.001));
            for i in 0..4 {
                if d1[i].abs() > 1e-12 {
                    let r = d1[i] / d2[i];
                    assert!((r - 4.0).abs() < 0.1, "component {i}: ratio {r}");
                }
            }
            let e0 = expectations_exact(&base, 2, t).unwrap();
            let p0 = expectations_perturbative(&base, 2, t).unwrap();
            close(&e0, &ObservableSet { method: Method::Exact, ..p0 }, 1e-14);
        }
    }

    #[test]
    fn model_b_needs_odd_integer_b() {
        let model = ModelConfig::goldman_krivchenko(1.0, 0.5, 1.0, 0.0, 0.7).unwrap();
        assert!(matches!(expectations_exact(&model, 0, 0.0), Err(Error::Constraint(_))));
    }

    #[test]
    fn autocorrelation_starts_at_one_and_is_periodic() {
        let model = ModelConfig::stark(3.0, 0.5, 1.0, 2.0, 0.1).unwrap();
        for method in [Method::Exact, Method::Perturbative] {
            assert!((autocorrelation(&model, 1, 0.0, method).unwrap() - 1.0).abs() < 1e-9);
            let a = autocorrelation(&model, 1, 1.3, method).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&a));
        }
        let gk = ModelConfig::goldman_krivchenko_ell(1.0, 0.5, 1.0, 0.3, 1).unwrap();
        assert!((autocorrelation(&gk, 2, 0.0, Method::Exact).unwrap() - 1.0).abs() < 1e-9);
        assert!(autocorrelation(&model, 1, 1.0, Method::Wkb).is_err());
    }
}
