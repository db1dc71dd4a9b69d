//! Closed-form eigenstates of the invariant, the Lewis–Riesenfeld phase and
//! the full TDSE solutions ψₙ(x,t) = e^(iαₙ(t)) φₙ(x,t).
//!
//! Eigenfunctions are stored as real ξ-space profiles χ(ξ) of the
//! transformed invariant Î; [`LabFrame::lift`] maps them to the lab frame.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ermakov::EpSolution;
use crate::error::{Error, Result};
use crate::model::{ModelConfig, ModelKind, LabFrame, WaveValue, XiValue};
use crate::specfun::{hermite_function_pair, laguerre_unchecked, ln_gamma, PolyOrder};
use crate::wkb::WkbProfile;

/// How an eigenstate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Perturbative,
    Wkb,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Perturbative => "perturbative",
            Method::Wkb => "wkb",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "perturbative" | "pert" => Ok(Method::Perturbative),
            "wkb" => Ok(Method::Wkb),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Lewis–Riesenfeld phase α(t) = −(λ/(mħ)) ∫₀ᵗ dt′/σ(t′)², branch-unwrapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFn {
    rate: f64,
    ep: EpSolution,
}

impl PhaseFn {
    pub fn new(lambda: f64, ep: EpSolution) -> Self {
        let cfg = ep.config();
        Self {
            rate: -lambda / (cfg.m * cfg.hbar),
            ep,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.rate * self.ep.inverse_sigma2_integral(t)
    }

    /// dα/dt = −λ/(mσ²ħ).
    pub fn derivative(&self, t: f64) -> f64 {
        self.rate / self.ep.sigma_squared(t)
    }
}

/// Real ξ-space eigenfunction of Î.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// √κ ψₙ(κ(ξ − ξ₀)) with the orthonormal Hermite function ψₙ.
    Hermite { n: usize, kappa: f64, xi0: f64 },
    /// N ξ^((1+b)/2) e^(−kξ²/2) Lₙ^(b/2)(kξ²) on ξ > 0.
    Laguerre { n: usize, k: f64, b: f64, ln_norm: f64 },
    /// Σ cⱼ χⱼ(ξ).
    Combination(Vec<(f64, Profile)>),
    Wkb(Box<WkbProfile>),
    /// Grid samples, linearly interpolated; zero outside the grid.
    Sampled { xi_min: f64, h: f64, values: Vec<f64> },
}

impl Profile {
    pub fn hermite(model: &ModelConfig, n: usize) -> Result<Self> {
        let n = PolyOrder::new(n)?.get();
        Ok(Profile::Hermite {
            n,
            kappa: (model.omega_i() / model.hbar).sqrt(),
            xi0: model.xi0(),
        })
    }

    pub fn laguerre(model: &ModelConfig, n: usize) -> Result<Self> {
        let n = PolyOrder::new(n)?.get();
        let k = model.a_param() / model.hbar;
        let b = model.b_param();
        let ln_norm = 0.5
            * (std::f64::consts::LN_2 + ln_gamma(n as f64 + 1.0)? - ln_gamma(n as f64 + 1.0 + 0.5 * b)?)
            + 0.25 * (2.0 + b) * k.ln();
        Ok(Profile::Laguerre { n, k, b, ln_norm })
    }

    pub fn eval(&self, xi: f64) -> Result<XiValue> {
        match self {
            Profile::Hermite { n, kappa, xi0 } => {
                let y = kappa * (xi - xi0);
                let (psi, prev) = hermite_function_pair(*n, y);
                let nf = *n as f64;
                let d = (2.0 * nf).sqrt() * prev - y * psi;
                let rk = kappa.sqrt();
                Ok(XiValue {
                    v: rk * psi,
                    d1: rk * kappa * d,
                    d2: rk * kappa * kappa * (y * y - 2.0 * nf - 1.0) * psi,
                })
            }
            Profile::Laguerre { n, k, b, ln_norm } => {
                if xi <= 0.0 {
                    return Ok(XiValue::default());
                }
                let u = k * xi * xi;
                let env = (ln_norm + 0.5 * (1.0 + b) * xi.ln() - 0.5 * u).exp();
                let alpha = 0.5 * b;
                let l = laguerre_unchecked(*n, alpha, u);
                let dl = if *n == 0 {
                    0.0
                } else {
                    -laguerre_unchecked(n - 1, alpha + 1.0, u)
                };
                let v = env * l;
                let d1 = v * (0.5 * (1.0 + b) / xi - k * xi) + env * dl * 2.0 * k * xi;
                let nf = *n as f64;
                let q = k * k * xi * xi + 0.25 * (b * b - 1.0) / (xi * xi)
                    - 2.0 * k * (2.0 * nf + 1.0 + 0.5 * b);
                Ok(XiValue { v, d1, d2: q * v })
            }
            Profile::Combination(parts) => {
                let mut acc = XiValue::default();
                for (c, p) in parts {
                    acc = acc.add(p.eval(xi)?.scale(*c));
                }
                Ok(acc)
            }
            Profile::Wkb(w) => w.eval(xi),
            Profile::Sampled { xi_min, h, values } => Ok(sampled_eval(*xi_min, *h, values, xi)),
        }
    }

    /// ξ-interval outside which the profile is negligible (below ~e^(−extra²/2)).
    pub fn xi_support(&self, extra: f64) -> (f64, f64) {
        match self {
            Profile::Hermite { n, kappa, xi0 } => {
                let r = ((2 * n + 1) as f64).sqrt() + extra;
                (xi0 - r / kappa, xi0 + r / kappa)
            }
            Profile::Laguerre { n, k, b, .. } => {
                let r = (4.0 * *n as f64 + 2.0 + b).sqrt() + extra;
                (0.0, r / k.sqrt())
            }
            Profile::Combination(parts) => parts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (_, p)| {
                let (lo, hi) = p.xi_support(extra);
                (acc.0.min(lo), acc.1.max(hi))
            }),
            Profile::Wkb(w) => w.xi_support(extra),
            Profile::Sampled { xi_min, h, values } => (*xi_min, xi_min + h * (values.len() as f64 - 1.0)),
        }
    }
}

fn sampled_eval(xi_min: f64, h: f64, values: &[f64], xi: f64) -> XiValue {
    let n = values.len();
    let s = (xi - xi_min) / h;
    if n < 3 || s < 0.0 || s > (n - 1) as f64 {
        return XiValue::default();
    }
    let i = (s.floor() as usize).min(n - 2);
    let f = s - i as f64;
    let v = values[i] * (1.0 - f) + values[i + 1] * f;
    let j = s.round().clamp(1.0, (n - 2) as f64) as usize;
    let d1 = (values[j + 1] - values[j - 1]) / (2.0 * h);
    let d2 = (values[j + 1] - 2.0 * values[j] + values[j - 1]) / (h * h);
    XiValue { v, d1, d2 }
}

/// An eigenstate of the invariant together with its TDSE solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenstate {
    pub n: usize,
    pub lambda: f64,
    pub method: Method,
    model: ModelConfig,
    ep: EpSolution,
    profile: Profile,
    phase: PhaseFn,
}

impl Eigenstate {
    pub fn new(model: ModelConfig, n: usize, lambda: f64, method: Method, profile: Profile) -> Result<Self> {
        Self::with_phase_lambda(model, n, lambda, lambda, method, profile)
    }

    /// Eigenstate whose phase is generated by `phase_lambda` instead of `lambda`.
    pub fn with_phase_lambda(
        model: ModelConfig,
        n: usize,
        lambda: f64,
        phase_lambda: f64,
        method: Method,
        profile: Profile,
    ) -> Result<Self> {
        model.validate()?;
        let ep = model.ep()?;
        Ok(Self {
            n,
            lambda,
            method,
            model,
            ep,
            profile,
            phase: PhaseFn::new(phase_lambda, ep),
        })
    }

    pub fn model(&self) -> &ModelConfig {
        &self.model
    }

    pub fn ep(&self) -> &EpSolution {
        &self.ep
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn phase_fn(&self) -> &PhaseFn {
        &self.phase
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.phase.eval(t)
    }

    pub fn frame(&self, t: f64) -> LabFrame {
        LabFrame::at(&self.ep, t)
    }

    pub fn chi(&self, xi: f64) -> Result<XiValue> {
        self.profile.eval(xi)
    }

    /// Lab-frame x-interval carrying the state at time t.
    pub fn x_support(&self, t: f64, extra: f64) -> (f64, f64) {
        let s = self.ep.sigma(t);
        let (lo, hi) = self.profile.xi_support(extra);
        (s * lo, s * hi)
    }

    /// φₙ(x,t) with its derivatives, using a precomputed frame.
    pub fn phi_in(&self, frame: &LabFrame, x: f64) -> Result<WaveValue> {
        if self.model.kind == ModelKind::GoldmanKrivchenko && x <= 0.0 {
            return Ok(WaveValue::ZERO);
        }
        Ok(frame.lift(x, self.profile.eval(frame.xi(x))?))
    }

    /// ψₙ(x,t) with its derivatives, using a precomputed frame.
    pub fn psi_in(&self, frame: &LabFrame, x: f64) -> Result<WaveValue> {
        let phi = self.phi_in(frame, x)?;
        let rot = Complex64::from_polar(1.0, self.phase.eval(frame.t));
        let mut out = phi.scale(rot);
        out.dt += out.value * Complex64::new(0.0, self.phase.derivative(frame.t));
        Ok(out)
    }

    pub fn phi_full(&self, x: f64, t: f64) -> Result<WaveValue> {
        self.phi_in(&self.frame(t), x)
    }

    pub fn psi_full(&self, x: f64, t: f64) -> Result<WaveValue> {
        self.psi_in(&self.frame(t), x)
    }

    pub fn phi(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.phi_full(x, t)?.value)
    }

    pub fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.psi_full(x, t)?.value)
    }
}

/// Exact invariant eigenvalue λₙ.
pub fn lambda_exact(model: &ModelConfig, n: usize) -> Result<f64> {
    model.validate()?;
    let n = PolyOrder::new(n)?.get() as f64;
    let hbar = model.hbar;
    Ok(match model.kind {
        ModelKind::StarkQuadratic => {
            let m = model.m;
            hbar * model.omega_i() * (n + 0.5)
                - m * model.e0 * model.e0 / (2.0 * (m * model.tau + 2.0 * model.c_kappa))
        }
        ModelKind::GoldmanKrivchenko => hbar * model.a_param() * (2.0 * n + 1.0 + 0.5 * model.b_param()),
    })
}

pub fn eigen_a(model: &ModelConfig, n: usize) -> Result<Eigenstate> {
    if model.kind != ModelKind::StarkQuadratic {
        return Err(Error::InvalidConfig("eigen_a needs a StarkQuadratic model".into()));
    }
    let lambda = lambda_exact(model, n)?;
    Eigenstate::new(*model, n, lambda, Method::Exact, Profile::hermite(model, n)?)
}

pub fn eigen_b(model: &ModelConfig, n: usize) -> Result<Eigenstate> {
    if model.kind != ModelKind::GoldmanKrivchenko {
        return Err(Error::InvalidConfig("eigen_b needs a GoldmanKrivchenko model".into()));
    }
    let lambda = lambda_exact(model, n)?;
    Eigenstate::new(*model, n, lambda, Method::Exact, Profile::laguerre(model, n)?)
}

/// Exact eigenstate for either model.
pub fn eigen(model: &ModelConfig, n: usize) -> Result<Eigenstate> {
    match model.kind {
        ModelKind::StarkQuadratic => eigen_a(model, n),
        ModelKind::GoldmanKrivchenko => eigen_b(model, n),
    }
}

/// Unperturbed-style basis profile χₙ of the given model (exact form).
pub(crate) fn basis_profile(model: &ModelConfig, n: usize) -> Result<Profile> {
    match model.kind {
        ModelKind::StarkQuadratic => Profile::hermite(model, n),
        ModelKind::GoldmanKrivchenko => Profile::laguerre(model, n),
    }
}

pub fn lr_phase(model: &ModelConfig, n: usize, t: f64) -> Result<f64> {
    let lambda = lambda_exact(model, n)?;
    Ok(PhaseFn::new(lambda, model.ep()?).eval(t))
}

pub fn psi_full(model: &ModelConfig, n: usize, x: f64, t: f64) -> Result<Complex64> {
    eigen(model, n)?.psi(x, t)
}

/// e^(imσ̇x²/(2σħ)).
pub fn unitary_map_weight(model: &ModelConfig, t: f64, x: f64) -> Result<Complex64> {
    Ok(LabFrame::at(&model.ep()?, t).weight(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::invariant_quadratic_form;
    use crate::model::{hamiltonian_apply, tdse_defect};
    use crate::quad::{try_integrate, QuadOptions};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fig1(c: f64) -> ModelConfig {
        ModelConfig::stark(3.0, 0.5, 1.0, 2.0, c).unwrap()
    }

    fn fig3(e0: f64) -> ModelConfig {
        ModelConfig::goldman_krivchenko_ell(3.0, 0.5, 1.0, e0, 2).unwrap()
    }

    fn overlap(a: &Eigenstate, b: &Eigenstate, t: f64) -> Complex64 {
        let fa = a.frame(t);
        let (lo1, hi1) = a.x_support(t, 12.0);
        let (lo2, hi2) = b.x_support(t, 12.0);
        try_integrate(
            |x| Ok(a.phi_in(&fa, x)?.value.conj() * b.phi_in(&fa, x)?.value),
            lo1.min(lo2),
            hi1.max(hi2),
            &QuadOptions::default(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn eigenvalue_examples() {
        let ho = ModelConfig::stark(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        for n in 0..6 {
            assert_relative_eq!(lambda_exact(&ho, n).unwrap(), n as f64 + 0.5, max_relative = 1e-15);
        }
        let a = ModelConfig::stark(1.0, 1.0, 1.0, 1.0, 0.2).unwrap();
        assert_relative_eq!(
            lambda_exact(&a, 0).unwrap(),
            0.5 * 1.4f64.sqrt() - 1.0 / 2.8,
            max_relative = 1e-15
        );
        let b = ModelConfig::goldman_krivchenko_ell(1.0, 1.0, 1.0, 0.0, 1).unwrap();
        assert_relative_eq!(lambda_exact(&b, 0).unwrap(), 2.5, max_relative = 1e-15);
        let b2 = ModelConfig::goldman_krivchenko(1.0, 1.0, 1.0, 0.5, 2f64.sqrt()).unwrap();
        assert_relative_eq!(lambda_exact(&b2, 0).unwrap(), 2f64.sqrt() * 2.5, max_relative = 1e-14);
    }

    #[test]
    fn method_round_trip() {
        for m in [Method::Exact, Method::Perturbative, Method::Wkb, Method::Oracle] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("spline".parse::<Method>().is_err());
    }

    #[test]
    fn orthonormal_at_several_times() {
        for model in [fig1(0.2), fig3(0.3)] {
            let states: Vec<_> = (0..=5).map(|n| eigen(&model, n).unwrap()).collect();
            for t in [0.0, 1.3, 2.9] {
                for a in &states {
                    for b in &states {
                        let o = overlap(a, b, t);
                        let want = if a.n == b.n { 1.0 } else { 0.0 };
                        assert!((o - want).norm() < 1e-8, "{:?} n={} m={} t={t}: {o}", model.kind, a.n, b.n);
                    }
                }
            }
        }
    }

    #[test]
    fn non_integer_b_is_normalized() {
        let model = ModelConfig::goldman_krivchenko(1.0, 0.5, 1.0, 0.2, 0.37).unwrap();
        for n in 0..=5 {
            let s = eigen(&model, n).unwrap();
            assert!((overlap(&s, &s, 0.7).re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn profile_second_derivative_matches_finite_difference() {
        let h = 1e-4;
        for p in [Profile::hermite(&fig1(0.1), 3).unwrap(), Profile::laguerre(&fig3(0.2), 2).unwrap()] {
            for xi in [0.3, 0.9, 1.6] {
                let c = p.eval(xi).unwrap();
                let fd1 = (p.eval(xi + h).unwrap().v - p.eval(xi - h).unwrap().v) / (2.0 * h);
                let fd2 = (p.eval(xi + h).unwrap().v - 2.0 * c.v + p.eval(xi - h).unwrap().v) / (h * h);
                assert!((c.d1 - fd1).abs() < 1e-6, "{p:?} {xi}");
                assert!((c.d2 - fd2).abs() < 1e-5, "{p:?} {xi}");
            }
        }
    }

    #[test]
    fn phase_properties() {
        let model = fig1(0.1);
        let s = eigen(&model, 2).unwrap();
        assert_eq!(s.phase(0.0), 0.0);
        let ep = model.ep().unwrap();
        let q = crate::quad::integrate(
            |t| -s.lambda / (3.0 * ep.sigma_squared(t)),
            0.0,
            2.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((s.phase(2.0) - q).abs() < 1e-9);
        let deg = ModelConfig::stark(2.0, 1.0, 1.0, 0.5, 0.3).unwrap();
        let l = lambda_exact(&deg, 1).unwrap();
        for t in [0.5, 2.0, 9.0] {
            assert_relative_eq!(lr_phase(&deg, 1, t).unwrap(), -l * t / 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn unitary_weight_examples() {
        let model = fig1(0.0);
        assert_eq!(unitary_map_weight(&model, 0.0, 1.3).unwrap(), Complex64::new(1.0, 0.0));
        let t = PI / 2.0;
        let w = unitary_map_weight(&model, t, 1.0).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-15);
        let c = invariant_quadratic_form(&model, t).unwrap();
        // phase mσ̇/(2σ) = −δ/(2α) at x = 1
        assert!((w.arg() - (-c.delta / (2.0 * c.alpha))).abs() < 1e-14);
    }

    #[test]
    fn psi_at_zero_time_and_modulus() {
        let s = eigen(&fig1(0.1), 1).unwrap();
        for x in [-1.0, 0.2, 0.8] {
            assert_eq!(s.psi(x, 0.0).unwrap(), s.phi(x, 0.0).unwrap());
            assert!((s.psi(x, 2.3).unwrap().norm() - s.phi(x, 2.3).unwrap().norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn matrix_element_identity_and_constant_lambda() {
        for model in [fig1(0.1), fig3(0.3)] {
            let ep = model.ep().unwrap();
            for n in 0..3 {
                let s = eigen(&model, n).unwrap();
                for t in [0.0, 0.7, 2.5, 4.0, 5.9] {
                    let f = s.frame(t);
                    let (lo, hi) = s.x_support(t, 12.0);
                    let me = try_integrate(
                        |x| {
                            let w = s.phi_in(&f, x)?;
                            let op = Complex64::i() * model.hbar * w.dt - hamiltonian_apply(&model, &ep, x, t, &w);
                            Ok(w.value.conj() * op)
                        },
                        lo.max(if model.kind == ModelKind::GoldmanKrivchenko { 0.0 } else { lo }),
                        hi,
                        &QuadOptions::default(),
                    )
                    .unwrap()
                    .value;
                    let want = -s.lambda / (model.m * ep.sigma_squared(t));
                    assert!((me - want).norm() < 1e-6, "{:?} n={n} t={t}: {me} vs {want}", model.kind);
                    let inv = invariant_quadratic_form(&model, t).unwrap();
                    let lam = try_integrate(
                        |x| {
                            let w = s.phi_in(&f, x)?;
                            Ok(w.value.conj() * inv.apply(x, &w))
                        },
                        lo,
                        hi,
                        &QuadOptions::default(),
                    )
                    .unwrap()
                    .value;
                    assert!((lam - s.lambda).norm() < 1e-7 * s.lambda.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn psi_solves_tdse_pointwise() {
        for model in [fig1(0.3), fig3(0.5)] {
            let ep = model.ep().unwrap();
            let s = eigen(&model, 2).unwrap();
            for t in [0.4, 3.3] {
                for x in [0.3, 0.9, 1.7] {
                    let w = s.psi_full(x, t).unwrap();
                    let r = tdse_defect(&model, &ep, x, t, &w);
                    assert!(r.norm() < 1e-10, "{:?} x={x} t={t}: {r}", model.kind);
                }
            }
        }
    }

    #[test]
    fn spectrum_errors() {
        let b = fig3(0.1);
        assert!(eigen_a(&b, 0).is_err());
        assert!(eigen_b(&fig1(0.1), 0).is_err());
        assert!(matches!(eigen(&b, 500), Err(Error::OrderTooLarge { .. })));
    }
}
