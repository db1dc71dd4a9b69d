//! Ermakov–Pinney auxiliary equation σ̈ + ω²σ = τ/σ³ and the driving field
//! and couplings parameterised by its solution.
//!
//! With u₁ = A sin ωt and u₂ = B cos ωt the Pinney construction gives
//! σ² = s₀cos²ωt + s₁sin²ωt with s₀ = τ/(A²ω²) and s₁ = A².

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpConfig {
    pub m: f64,
    pub omega: f64,
    pub tau: f64,
    /// Amplitude A of u₁ = A sin ωt.
    pub amp: f64,
    /// Field scale: E(t) = E₀σ(0)³/σ(t)³.
    pub e0: f64,
    pub hbar: f64,
}

impl EpConfig {
    /// Configuration with the default amplitude A = √τ/ω (so σ(0) = 1) and ħ = 1.
    pub fn new(m: f64, omega: f64, tau: f64, e0: f64) -> Result<Self> {
        let cfg = Self {
            m,
            omega,
            tau,
            amp: tau.sqrt() / omega,
            e0,
            hbar: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_amp(mut self, amp: f64) -> Result<Self> {
        self.amp = amp;
        self.validate()?;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("omega", self.omega),
            ("tau", self.tau),
            ("amp", self.amp),
            ("hbar", self.hbar),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.e0.is_finite() {
            return Err(Error::InvalidConfig(format!("E0 must be finite, got {}", self.e0)));
        }
        Ok(())
    }
}

/// Closed-form solution of the EP equation for a given configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpSolution {
    config: EpConfig,
    s0: f64,
    s1: f64,
}

impl EpSolution {
    pub fn new(config: EpConfig) -> Result<Self> {
        config.validate()?;
        let s0 = config.tau / (config.amp * config.amp * config.omega * config.omega);
        let s1 = config.amp * config.amp;
        Ok(Self { config, s0, s1 })
    }

    pub fn config(&self) -> &EpConfig {
        &self.config
    }

    /// Period of σ, π/ω.
    pub fn period(&self) -> f64 {
        PI / self.config.omega
    }

    pub fn sigma_squared(&self, t: f64) -> f64 {
        let (s, c) = (self.config.omega * t).sin_cos();
        self.s0 * c * c + self.s1 * s * s
    }

    pub fn sigma(&self, t: f64) -> f64 {
        self.sigma_squared(t).sqrt()
    }

    pub fn sigma_dot(&self, t: f64) -> f64 {
        let w = self.config.omega;
        0.5 * (self.s1 - self.s0) * w * (2.0 * w * t).sin() / self.sigma(t)
    }

    pub fn sigma_ddot(&self, t: f64) -> f64 {
        let w = self.config.omega;
        let sigma = self.sigma(t);
        let sd = self.sigma_dot(t);
        ((self.s1 - self.s0) * w * w * (2.0 * w * t).cos() - sd * sd) / sigma
    }

    /// E(t) = E₀σ(0)³/σ(t)³.
    pub fn field_e(&self, t: f64) -> f64 {
        self.config.e0 * (self.s0 / self.sigma_squared(t)).powf(1.5)
    }

    /// κ_p(t) = c̃_p σ(t)^−(2+p).
    pub fn kappa_p(&self, p: f64, c_tilde: f64, t: f64) -> f64 {
        c_tilde * self.sigma(t).powf(-(2.0 + p))
    }

    /// Residual σ̈ + ω²σ − τ/σ³ of the EP equation.
    pub fn residual(&self, t: f64) -> f64 {
        let s = self.sigma(t);
        let w = self.config.omega;
        self.sigma_ddot(t) + w * w * s - self.config.tau / s.powi(3)
    }

    /// ∫₀ᵗ dt′/σ(t′)², continuous in t.
    ///
    /// Equals arctan(ρ tan ωt)/√τ with ρ = A²ω/√τ, continued across the
    /// branch points ωt = π/2 + kπ.
    pub fn inverse_sigma2_integral(&self, t: f64) -> f64 {
        let cfg = &self.config;
        let rho = cfg.amp * cfg.amp * cfg.omega / cfg.tau.sqrt();
        unwrapped_arctan(rho, cfg.omega * t) / cfg.tau.sqrt()
    }
}

/// Continuous branch of arctan(ρ tan θ) that equals θ at every multiple of π.
pub fn unwrapped_arctan(rho: f64, theta: f64) -> f64 {
    let k = (theta / PI).round();
    let r = theta - k * PI;
    k * PI + (rho * r.sin()).atan2(r.cos())
}

pub fn sigma(cfg: &EpConfig, t: f64) -> Result<f64> {
    Ok(EpSolution::new(*cfg)?.sigma(t))
}

pub fn sigma_dot(cfg: &EpConfig, t: f64) -> Result<f64> {
    Ok(EpSolution::new(*cfg)?.sigma_dot(t))
}

pub fn field_e(cfg: &EpConfig, t: f64) -> Result<f64> {
    Ok(EpSolution::new(*cfg)?.field_e(t))
}

pub fn kappa_p(cfg: &EpConfig, p: f64, c_tilde: f64, t: f64) -> Result<f64> {
    Ok(EpSolution::new(*cfg)?.kappa_p(p, c_tilde, t))
}

/// Integrates the EP equation numerically with classical RK4 from the closed
/// form's initial data, using `steps_per_period` steps per period π/ω.
/// Returns (σ, σ̇) at `t_end`. Used only as a cross-check.
pub fn integrate_rk4(cfg: &EpConfig, t_end: f64, steps_per_period: usize) -> Result<(f64, f64)> {
    let sol = EpSolution::new(*cfg)?;
    let (w2, tau) = (cfg.omega * cfg.omega, cfg.tau);
    let accel = |s: f64| -w2 * s + tau / (s * s * s);
    let periods = (t_end.abs() / sol.period()).max(1e-12);
    let steps = ((periods * steps_per_period as f64).ceil() as usize).max(1);
    let h = t_end / steps as f64;
    let (mut s, mut v) = (sol.sigma(0.0), sol.sigma_dot(0.0));
    for _ in 0..steps {
        let (k1s, k1v) = (v, accel(s));
        let (k2s, k2v) = (v + 0.5 * h * k1v, accel(s + 0.5 * h * k1s));
        let (k3s, k3v) = (v + 0.5 * h * k2v, accel(s + 0.5 * h * k2s));
        let (k4s, k4v) = (v + h * k3v, accel(s + h * k3s));
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    Ok((s, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig_cfg() -> EpConfig {
        EpConfig::new(3.0, 0.5, 1.0, 2.0).unwrap()
    }

    #[test]
    fn sigma_reference_values() {
        let sol = EpSolution::new(fig_cfg()).unwrap();
        assert_eq!(sol.sigma(0.0), 1.0);
        assert_eq!(sol.sigma_dot(0.0), 0.0);
        let (rk_s, _) = integrate_rk4(&fig_cfg(), PI / 2.0, 10_000).unwrap();
        assert_relative_eq!(sol.sigma(PI / 2.0), rk_s, max_relative = 1e-10);
        assert_relative_eq!(sol.sigma(PI / 2.0), 2.5f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn degenerate_point_is_static() {
        let cfg = EpConfig::new(1.3, 2.0, 4.0, 0.7).unwrap();
        let sol = EpSolution::new(cfg).unwrap();
        for t in [0.0, 0.3, 1.7, 12.0] {
            assert!((sol.sigma(t) - 1.0).abs() < 1e-12);
            assert_eq!(sol.sigma_dot(t), 0.0);
            assert!((sol.field_e(t) - 0.7).abs() < 1e-12);
            assert!((sol.kappa_p(4.0, 1.5, t) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_dot_matches_finite_difference() {
        let sol = EpSolution::new(fig_cfg()).unwrap();
        let h = 1e-5;
        let t = PI / 2.0;
        let fd = (sol.sigma(t + h) - sol.sigma(t - h)) / (2.0 * h);
        assert!((sol.sigma_dot(t) - fd).abs() < 1e-8);
    }

    #[test]
    fn field_and_kappa_reference_values() {
        let cfg = fig_cfg();
        let (rk_s, _) = integrate_rk4(&cfg, PI / 2.0, 10_000).unwrap();
        let e = field_e(&cfg, PI / 2.0).unwrap();
        assert_relative_eq!(e, 2.0 / rk_s.powi(3), max_relative = 1e-9);
        assert_relative_eq!(e, 0.505_964_425_626_940_5, max_relative = 1e-12);
        assert_eq!(field_e(&cfg, 0.0).unwrap(), 2.0);
        let cfg1 = EpConfig::new(1.0, 0.5, 1.0, 0.0).unwrap();
        assert_relative_eq!(kappa_p(&cfg1, 2.0, 1.0, PI / 2.0).unwrap(), 0.16, max_relative = 1e-13);
        for t in [0.0, 0.9, 2.2] {
            assert_eq!(kappa_p(&cfg1, -2.0, 0.8, t).unwrap(), 0.8);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(EpConfig::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(EpConfig::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(EpConfig::new(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(fig_cfg().with_amp(0.0).is_err());
        assert!(fig_cfg().with_hbar(-2.0).is_err());
    }

    #[test]
    fn inverse_sigma2_integral_matches_quadrature() {
        let sol = EpSolution::new(fig_cfg().with_amp(0.7).unwrap()).unwrap();
        for t in [0.4, 3.1, 3.2, 7.5, 13.0] {
            let q = crate::quad::integrate(
                |s| 1.0 / sol.sigma_squared(s),
                0.0,
                t,
                &crate::quad::QuadOptions::default(),
            )
            .unwrap();
            assert_relative_eq!(sol.inverse_sigma2_integral(t), q, max_relative = 1e-11);
        }
    }

    proptest! {
        #[test]
        fn ep_residual_vanishes(
            m in 0.5f64..4.0, omega in 0.2f64..3.0, tau in 0.2f64..4.0,
            amp_scale in 0.5f64..2.0, frac in 0.0f64..4.0,
        ) {
            let cfg = EpConfig::new(m, omega, tau, 1.0).unwrap();
            let cfg = cfg.with_amp(cfg.amp * amp_scale).unwrap();
            let sol = EpSolution::new(cfg).unwrap();
            let t = frac * PI / omega;
            prop_assert!(sol.residual(t).abs() < 1e-8);
            prop_assert!((sol.sigma(t + sol.period()) - sol.sigma(t)).abs() < 1e-12);
            prop_assert!(sol.sigma(t) > 0.0);
        }

        #[test]
        fn pinney_composition(
            omega in 0.2f64..3.0, tau in 0.2f64..4.0, a in 0.3f64..3.0, t in 0.0f64..10.0,
        ) {
            // σ² = u₁² + (τ/W²)u₂² with u₁ = A sin ωt, u₂ = B cos ωt, W = −ABω
            let b = 1.7;
            let (u1, u2) = (a * (omega * t).sin(), b * (omega * t).cos());
            let w = -a * b * omega;
            let pinney = (u1 * u1 + tau / (w * w) * u2 * u2).sqrt();
            let cfg = EpConfig::new(1.0, omega, tau, 0.0).unwrap().with_amp(a).unwrap();
            let sol = EpSolution::new(cfg).unwrap();
            prop_assert!((pinney - sol.sigma(t)).abs() < 1e-12 * pinney.max(1.0));
        }
    }
}
