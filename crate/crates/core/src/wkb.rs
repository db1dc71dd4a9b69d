//! WKB treatment of Model A's transformed invariant
//! Î = −(ħ²/2)∂²_ξ + V(ξ), V(ξ) = k₂ξ² + k₁ξ, k₂ = m²τ/2 + mc_κ, k₁ = mE₀.
//!
//! With p = √(2(λ−V)) and q = √(2(V−λ)) the matched solution is
//!   ξ < ξ₋:        C₃(−1)ⁿ q^(−1/2) exp(−(1/ħ)∫_ξ^ξ₋ q)
//!   ξ₋ < ξ < ξ₊:   2C₃(−1)ⁿ p^(−1/2) cos((1/ħ)∫_ξ₋^ξ p − π/4)
//!   ξ > ξ₊:        C₃ q^(−1/2) exp(−(1/ħ)∫_ξ₊^ξ q)
//! with C₃ = (2∫dξ/p)^(−1/2) = √(Ω_I/2π). Every action integral has a closed
//! form for a quadratic potential.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{Eigenstate, Method, PhaseFn, Profile};
use crate::model::{hamiltonian_apply, ModelConfig, ModelKind, XiValue};
use crate::quad::{integrate, try_integrate, QuadOptions};
use crate::specfun::PolyOrder;

/// Default half-width of the masked zone around each turning point, as a
/// fraction of ξ₊ − ξ₋.
pub const EXCLUSION_FRACTION: f64 = 0.05;

fn require_model_a(model: &ModelConfig) -> Result<()> {
    model.validate()?;
    if model.kind != ModelKind::StarkQuadratic {
        return Err(Error::Unsupported("wkb".into()));
    }
    Ok(())
}

/// (k₂, k₁) of V(ξ) = k₂ξ² + k₁ξ.
fn potential_coeffs(model: &ModelConfig) -> (f64, f64) {
    let m = model.m;
    (0.5 * m * m * model.tau + m * model.c_kappa, m * model.e0)
}

/// Classical turning points ξ₋ < ξ₊ with λ = V(ξ±).
pub fn turning_points(model: &ModelConfig, lambda: f64) -> Result<(f64, f64)> {
    require_model_a(model)?;
    let (k2, k1) = potential_coeffs(model);
    let disc = k1 * k1 + 4.0 * k2 * lambda;
    if !(disc > 0.0) {
        return Err(Error::NoClassicalRegion(disc));
    }
    // roots of k₂ξ² + k₁ξ − λ, avoiding cancellation
    let sq = disc.sqrt();
    let sign = if k1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (k1 + sign * sq);
    let (r1, r2) = (q / k2, -lambda / q);
    Ok((r1.min(r2), r1.max(r2)))
}

/// ∫_ξ₋^ξ₊ √(2(λ−V)) dξ by adaptive quadrature after ξ = c − u₀cos θ.
pub fn action_integral(model: &ModelConfig, lambda: f64) -> Result<f64> {
    let (lo, hi) = turning_points(model, lambda)?;
    let (k2, k1) = potential_coeffs(model);
    let c = 0.5 * (lo + hi);
    let u0 = 0.5 * (hi - lo);
    let v = |xi: f64| k2 * xi * xi + k1 * xi;
    try_integrate(
        |th: f64| {
            let xi = c - u0 * th.cos();
            let gap = (2.0 * (lambda - v(xi))).max(0.0);
            Ok(gap.sqrt() * u0 * th.sin())
        },
        0.0,
        PI,
        &QuadOptions::with_tol(1e-15, 1e-13),
    )
    .map(|e| e.value)
}

/// Solves ∫√(2(λ−V)) dξ = πħ(n+½) for λ by bisection.
pub fn wkb_quantize(model: &ModelConfig, n: usize) -> Result<f64> {
    require_model_a(model)?;
    let n = PolyOrder::new(n)?.get();
    let (k2, k1) = potential_coeffs(model);
    let v_min = -k1 * k1 / (4.0 * k2);
    let b2 = (8.0 * k2).sqrt();
    let target = PI * model.hbar * (n as f64 + 0.5);
    let mut lo = v_min + 1e-12;
    let mut hi = v_min + 10.0 * b2 * (n as f64 + 1.0) * model.hbar;
    let f = |l: f64| action_integral(model, l).map(|s| s - target);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Bracketing(format!(
            "action minus target is {f_lo:e} at {lo} and {f_hi:e} at {hi}; no sign change"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * mid.abs().max(1.0) {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Region-matched WKB eigenfunction of Î (the WKBData of the construction).
#[derive(Debug, Clone, PartialEq)]
pub struct WkbProfile {
    pub n: usize,
    pub lambda: f64,
    pub xi_minus: f64,
    pub xi_plus: f64,
    /// Normalisation constant of the matched solution in ξ-space.
    pub c3: f64,
    /// Compact constants with V(ξ) = b⁴ξ²/8 + ab³ξ/4.
    pub a: f64,
    pub b: f64,
    /// Half-width of the masked zone around each turning point.
    pub exclusion: f64,
    /// Drop the amplitude-curvature term ħ²(p^(−1/2))″ from second
    /// derivatives, keeping them at the order in ħ of the WKB form itself.
    pub first_order_derivatives: bool,
    k2: f64,
    hbar: f64,
}

impl WkbProfile {
    pub fn new(model: &ModelConfig, n: usize) -> Result<Self> {
        let lambda = wkb_quantize(model, n)?;
        let (xi_minus, xi_plus) = turning_points(model, lambda)?;
        let (k2, k1) = potential_coeffs(model);
        let b = (8.0 * k2).powf(0.25);
        Ok(Self {
            n,
            lambda,
            xi_minus,
            xi_plus,
            c3: ((2.0 * k2).sqrt() / (2.0 * PI)).sqrt(),
            a: 4.0 * k1 / (b * b * b),
            b,
            exclusion: EXCLUSION_FRACTION * (xi_plus - xi_minus),
            first_order_derivatives: false,
            k2,
            hbar: model.hbar,
        })
    }

    pub fn with_exclusion_fraction(mut self, frac: f64) -> Self {
        self.exclusion = frac * (self.xi_plus - self.xi_minus);
        self
    }

    pub fn with_first_order_derivatives(mut self, on: bool) -> Self {
        self.first_order_derivatives = on;
        self
    }

    fn center(&self) -> f64 {
        0.5 * (self.xi_minus + self.xi_plus)
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.xi_plus - self.xi_minus)
    }

    fn parity(&self) -> f64 {
        if self.n % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// ∫_ξ₋^ξ p dz for ξ inside the allowed region.
    pub fn allowed_action(&self, xi: f64) -> f64 {
        let u0 = self.half_width();
        let u = (xi - self.center()).clamp(-u0, u0);
        let r = (u0 * u0 - u * u).max(0.0).sqrt();
        (2.0 * self.k2).sqrt() * (0.5 * (u * r + u0 * u0 * (u / u0).asin()) + 0.25 * PI * u0 * u0)
    }

    /// ∫ q dz from the nearer turning point to ξ, for ξ outside.
    pub fn forbidden_action(&self, xi: f64) -> f64 {
        let u0 = self.half_width();
        let u = (xi - self.center()).abs().max(u0);
        let r = (u * u - u0 * u0).max(0.0).sqrt();
        (2.0 * self.k2).sqrt() * 0.5 * (u * r - u0 * u0 * ((u + r) / u0).ln())
    }

    /// Classical momentum p(ξ) (allowed) or q(ξ) (forbidden).
    pub fn local_momentum(&self, xi: f64) -> f64 {
        let u0 = self.half_width();
        let u = xi - self.center();
        ((2.0 * self.k2) * (u0 * u0 - u * u).abs()).sqrt()
    }

    pub fn eval(&self, xi: f64) -> Result<XiValue> {
        for tp in [self.xi_minus, self.xi_plus] {
            if (xi - tp).abs() <= self.exclusion {
                return Err(Error::TurningPointSingular { xi, turning_point: tp });
            }
        }
        let k2 = self.k2;
        let h = self.hbar;
        let u = xi - self.center();
        if xi > self.xi_minus && xi < self.xi_plus {
            let p = self.local_momentum(xi);
            let dp = -2.0 * k2 * u / p;
            let amp = p.powf(-0.5);
            let d_amp = k2 * u * p.powf(-2.5);
            let dd_amp = if self.first_order_derivatives {
                0.0
            } else {
                k2 * p.powf(-2.5) + 5.0 * k2 * k2 * u * u * p.powf(-4.5)
            };
            let phase = self.allowed_action(xi) / h - 0.25 * PI;
            let (s, c) = phase.sin_cos();
            let w = p / h;
            let scale = 2.0 * self.c3 * self.parity();
            Ok(XiValue {
                v: amp * c,
                d1: d_amp * c - amp * s * w,
                d2: dd_amp * c - 2.0 * d_amp * s * w - amp * c * w * w - amp * s * dp / h,
            }
            .scale(scale))
        } else {
            let q = self.local_momentum(xi);
            let dq = 2.0 * k2 * u / q;
            // exponent slope d(−Q/ħ)/dξ = −s·q/ħ with s = +1 right, −1 left
            let s = if xi >= self.xi_plus { 1.0 } else { -1.0 };
            let amp = q.powf(-0.5);
            let d_amp = -k2 * u * q.powf(-2.5);
            let dd_amp = if self.first_order_derivatives {
                0.0
            } else {
                -k2 * q.powf(-2.5) + 5.0 * k2 * k2 * u * u * q.powf(-4.5)
            };
            let e = (-self.forbidden_action(xi) / h).exp();
            let g = s * q / h;
            let scale = self.c3 * if s > 0.0 { 1.0 } else { self.parity() };
            Ok(XiValue {
                v: amp * e,
                d1: (d_amp - amp * g) * e,
                d2: (dd_amp - 2.0 * d_amp * g - amp * s * dq / h + amp * g * g) * e,
            }
            .scale(scale))
        }
    }

    /// ξ-interval outside which the tails are below ~e^(−extra²/2).
    pub fn xi_support(&self, extra: f64) -> (f64, f64) {
        let len = (self.hbar / (2.0 * self.k2).sqrt()).sqrt() * extra;
        (self.xi_minus - len, self.xi_plus + len)
    }

    /// Pieces of the support with the exclusion zones removed.
    pub fn regions(&self, extra: f64) -> [(f64, f64); 3] {
        let (lo, hi) = self.xi_support(extra);
        let d = self.exclusion;
        [
            (lo, self.xi_minus - d),
            (self.xi_minus + d, self.xi_plus - d),
            (self.xi_plus + d, hi),
        ]
    }

    /// Total probability of the matched solution, integrating every region
    /// up to the turning points (the singularities are integrable).
    pub fn normalization(&self) -> Result<f64> {
        let opts = QuadOptions::with_tol(1e-12, 1e-10);
        let u0 = self.half_width();
        let c = self.center();
        let g = (2.0 * self.k2).sqrt();
        let h = self.hbar;
        // allowed: ξ = c − u₀cos θ turns |φ|²dξ into 4C₃²cos²(S/ħ − π/4)/g dθ
        let inside = integrate(
            |th| {
                let xi = c - u0 * th.cos();
                let ph = self.allowed_action(xi) / h - 0.25 * PI;
                4.0 * self.c3 * self.c3 * ph.cos().powi(2) / g
            },
            0.0,
            PI,
            &opts,
        )?;
        // forbidden: |u| = u₀cosh s turns |φ|²dξ into C₃² e^(−2Q/ħ)/g ds
        let s_max = {
            let (_, hi) = self.xi_support(40.0);
            ((hi - c) / u0).acosh()
        };
        let tail = integrate(
            |s| {
                let xi = c + u0 * s.cosh();
                self.c3 * self.c3 * (-2.0 * self.forbidden_action(xi) / h).exp() / g
            },
            0.0,
            s_max,
            &opts,
        )?;
        Ok(inside + 2.0 * tail)
    }
}

/// WKB eigenstate of Model A; its phase uses the quantised λ.
pub fn wkb_state(model: &ModelConfig, n: usize) -> Result<Eigenstate> {
    let prof = WkbProfile::new(model, n)?;
    Eigenstate::new(*model, n, prof.lambda, Method::Wkb, Profile::Wkb(Box::new(prof)))
}

/// χ^WKB(ξ) of the transformed invariant.
pub fn wkb_wavefunction(model: &ModelConfig, n: usize, xi: f64) -> Result<f64> {
    Ok(WkbProfile::new(model, n)?.eval(xi)?.v)
}

/// ⟨φ|iħ∂ₜ − H|φ⟩/⟨φ|φ⟩ for the lifted WKB state, with the turning-point
/// zones cut out of the x-integration.
pub fn wkb_matrix_element(state: &Eigenstate, t: f64) -> Result<f64> {
    let Profile::Wkb(prof) = state.profile() else {
        return Err(Error::Unsupported("matrix element needs a WKB state".into()));
    };
    let model = state.model();
    let ep = state.ep();
    let frame = state.frame(t);
    let opts = QuadOptions::with_tol(1e-12, 1e-10);
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for (lo, hi) in prof.regions(12.0) {
        let (a, b) = (frame.sigma * lo, frame.sigma * hi);
        num += try_integrate(
            |x| {
                let w = state.phi_in(&frame, x)?;
                let op = Complex64::i() * model.hbar * w.dt - hamiltonian_apply(model, ep, x, t, &w);
                Ok(w.value.conj() * op)
            },
            a,
            b,
            &opts,
        )?
        .value;
        den += try_integrate(|x| Ok(state.phi_in(&frame, x)?.value.norm_sqr()), a, b, &opts)?.value;
    }
    Ok(num.re / den)
}

/// α^WKB(t) = (1/ħ)∫₀ᵗ ⟨φ^WKB|iħ∂ₜ − H|φ^WKB⟩ dt′, by nested quadrature.
///
/// H acts on the WKB form at its own order in ħ (see
/// [`WkbProfile::first_order_derivatives`]); the dropped O(ħ²) amplitude
/// term is what makes the form singular at the turning points.
pub fn wkb_phase(model: &ModelConfig, n: usize, t: f64) -> Result<f64> {
    let prof = WkbProfile::new(model, n)?.with_first_order_derivatives(true);
    let state = Eigenstate::new(*model, n, prof.lambda, Method::Wkb, Profile::Wkb(Box::new(prof)))?;
    let opts = QuadOptions::with_tol(1e-10, 1e-8).panels(4);
    let integral = try_integrate(|s| wkb_matrix_element(&state, s), 0.0, t, &opts)?.value;
    Ok(integral / model.hbar)
}

/// Closed-form WKB phase −(λ^WKB/(mħ))∫dt/σ².
pub fn wkb_phase_closed_form(model: &ModelConfig, n: usize, t: f64) -> Result<f64> {
    Ok(PhaseFn::new(wkb_quantize(model, n)?, model.ep()?).eval(t))
}
