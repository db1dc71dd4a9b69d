//! The two benchmark Hamiltonians and the map between the transformed
//! invariant's ξ-space eigenfunctions and lab-frame wavefunctions.
//!
//! Model A (Stark + quadratic coupling):
//!   H = p²/2m + ½mω²x² + (c_κ/σ⁴)x² + E(t)x,  E(t) = E₀/σ³.
//! Model B (Goldman–Krivchenko with a field-driven x² term), x > 0:
//!   H = p²/2m + ½mω²x² + mΩ²/(2x²) + E₀x²/σ⁴.
//!
//! In both cases the invariant, after the unitary map e^(−imσ̇x²/(2σħ)) and
//! the rescaling ξ = x/σ, becomes the time-independent operator
//! Î = −(ħ²/2)∂²_ξ + V_I(ξ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ermakov::{EpConfig, EpSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Model A: Stark term plus κ(t)x² coupling.
    StarkQuadratic,
    /// Model B: Goldman–Krivchenko barrier plus x²E(t).
    GoldmanKrivchenko,
}

/// Spatial domain of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    FullLine,
    /// (0, ∞) with φ(0) = 0.
    HalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub m: f64,
    pub omega: f64,
    pub tau: f64,
    pub e0: f64,
    pub hbar: f64,
    /// Model A coupling constant.
    pub c_kappa: f64,
    /// Model B barrier frequency Ω (ignored when `ell` is set).
    pub big_omega: f64,
    /// Model B angular label; fixes Ω² = ħ²ℓ(ℓ+1)/m² so that b = 2ℓ+1.
    pub ell: Option<u32>,
}

impl ModelConfig {
    pub fn stark(m: f64, omega: f64, tau: f64, e0: f64, c_kappa: f64) -> Result<Self> {
        let cfg = Self {
            kind: ModelKind::StarkQuadratic,
            m,
            omega,
            tau,
            e0,
            hbar: 1.0,
            c_kappa,
            big_omega: 0.0,
            ell: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn goldman_krivchenko(m: f64, omega: f64, tau: f64, e0: f64, big_omega: f64) -> Result<Self> {
        let cfg = Self {
            kind: ModelKind::GoldmanKrivchenko,
            m,
            omega,
            tau,
            e0,
            hbar: 1.0,
            c_kappa: 0.0,
            big_omega,
            ell: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn goldman_krivchenko_ell(m: f64, omega: f64, tau: f64, e0: f64, ell: u32) -> Result<Self> {
        let cfg = Self {
            kind: ModelKind::GoldmanKrivchenko,
            m,
            omega,
            tau,
            e0,
            hbar: 1.0,
            c_kappa: 0.0,
            big_omega: 0.0,
            ell: Some(ell),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    /// Same model with the perturbation parameter replaced
    /// (c_κ for Model A, E₀ for Model B).
    pub fn with_epsilon(mut self, eps: f64) -> Result<Self> {
        match self.kind {
            ModelKind::StarkQuadratic => self.c_kappa = eps,
            ModelKind::GoldmanKrivchenko => self.e0 = eps,
        }
        self.validate()?;
        Ok(self)
    }

    /// The perturbation parameter ε.
    pub fn epsilon(&self) -> f64 {
        match self.kind {
            ModelKind::StarkQuadratic => self.c_kappa,
            ModelKind::GoldmanKrivchenko => self.e0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ep_config()?;
        match self.kind {
            ModelKind::StarkQuadratic => {
                if !(self.c_kappa >= 0.0 && self.c_kappa.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "c_kappa must be a non-negative number, got {}",
                        self.c_kappa
                    )));
                }
                if !(2.0 * self.c_kappa + self.m * self.tau > 0.0) {
                    return Err(Error::UnboundedSpectrum(format!(
                        "2 c_kappa + m tau = {} must be positive",
                        2.0 * self.c_kappa + self.m * self.tau
                    )));
                }
            }
            ModelKind::GoldmanKrivchenko => {
                if self.ell.is_none() && !self.big_omega.is_finite() {
                    return Err(Error::InvalidConfig("Omega must be finite".into()));
                }
                let a2 = self.tau * self.m * self.m + 2.0 * self.m * self.e0;
                if !(a2 > 0.0) {
                    return Err(Error::Domain(format!(
                        "tau m^2 + 2 m E0 = {a2} must be positive"
                    )));
                }
            }
        }
        Ok(())
    }

    /// EP configuration shared by both models (default amplitude, σ(0) = 1).
    /// Its E₀ is the Stark field scale, so Model B carries E₀ = 0 here.
    pub fn ep_config(&self) -> Result<EpConfig> {
        let e0 = match self.kind {
            ModelKind::StarkQuadratic => self.e0,
            ModelKind::GoldmanKrivchenko => 0.0,
        };
        EpConfig::new(self.m, self.omega, self.tau, e0)?.with_hbar(self.hbar)
    }

    pub fn ep(&self) -> Result<EpSolution> {
        EpSolution::new(self.ep_config()?)
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            ModelKind::StarkQuadratic => Domain::FullLine,
            ModelKind::GoldmanKrivchenko => Domain::HalfLine,
        }
    }

    /// Ω² of the Model B barrier.
    pub fn barrier_omega2(&self) -> f64 {
        match self.ell {
            Some(l) => {
                let l = l as f64;
                self.hbar * self.hbar * l * (l + 1.0) / (self.m * self.m)
            }
            None => self.big_omega * self.big_omega,
        }
    }

    /// Model B exponent b = √(1 + 4m²Ω²/ħ²); exactly 2ℓ+1 when ℓ is given.
    pub fn b_param(&self) -> f64 {
        match self.ell {
            Some(l) => 2.0 * l as f64 + 1.0,
            None => {
                let g = self.m * self.big_omega / self.hbar;
                (1.0 + 4.0 * g * g).sqrt()
            }
        }
    }

    /// Model B frequency a = √(τm² + 2mE₀).
    pub fn a_param(&self) -> f64 {
        (self.tau * self.m * self.m + 2.0 * self.m * self.e0).sqrt()
    }

    /// Model A frequency of Î, Ω_I = √(m(mτ + 2c_κ)).
    pub fn omega_i(&self) -> f64 {
        (self.m * (self.m * self.tau + 2.0 * self.c_kappa)).sqrt()
    }

    /// Model A centre of Î, ξ₀ = −E₀/(mτ + 2c_κ).
    pub fn xi0(&self) -> f64 {
        -self.e0 / (self.m * self.tau + 2.0 * self.c_kappa)
    }

    /// Ω_I for Model A and a for Model B: the oscillator frequency of Î.
    pub fn invariant_frequency(&self) -> f64 {
        match self.kind {
            ModelKind::StarkQuadratic => self.omega_i(),
            ModelKind::GoldmanKrivchenko => self.a_param(),
        }
    }

    /// True when b = 2ℓ+1 for some ℓ ∈ ℕ₀.
    pub fn has_odd_integer_b(&self) -> bool {
        if self.ell.is_some() {
            return true;
        }
        let b = self.b_param();
        let r = b.round();
        (b - r).abs() < 1e-9 && (r as i64) % 2 == 1
    }

    /// Potential V_I(ξ) of the transformed invariant Î = −(ħ²/2)∂² + V_I.
    pub fn invariant_potential(&self, xi: f64) -> f64 {
        let m = self.m;
        match self.kind {
            ModelKind::StarkQuadratic => {
                (0.5 * m * m * self.tau + m * self.c_kappa) * xi * xi + m * self.e0 * xi
            }
            ModelKind::GoldmanKrivchenko => {
                let a = self.a_param();
                0.5 * a * a * xi * xi + 0.5 * m * m * self.barrier_omega2() / (xi * xi)
            }
        }
    }

    /// Potential of the Hamiltonian, V(x,t); +∞ outside Model B's half-line.
    pub fn potential_at(&self, ep: &EpSolution, x: f64, t: f64) -> f64 {
        let m = self.m;
        let w2 = self.omega * self.omega;
        let s2 = ep.sigma_squared(t);
        match self.kind {
            ModelKind::StarkQuadratic => {
                0.5 * m * w2 * x * x + self.c_kappa / (s2 * s2) * x * x + ep.field_e(t) * x
            }
            ModelKind::GoldmanKrivchenko => {
                if x <= 0.0 {
                    return f64::INFINITY;
                }
                0.5 * m * w2 * x * x
                    + 0.5 * m * self.barrier_omega2() / (x * x)
                    + self.e0 / (s2 * s2) * x * x
            }
        }
    }

    pub fn potential(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.potential_at(&self.ep()?, x, t))
    }
}

/// Real ξ-space profile value with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XiValue {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl XiValue {
    pub fn scale(self, c: f64) -> Self {
        Self {
            v: self.v * c,
            d1: self.d1 * c,
            d2: self.d2 * c,
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

/// Lab-frame wavefunction value with ∂ₓ, ∂ₓ² and ∂ₜ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveValue {
    pub value: Complex64,
    pub dx: Complex64,
    pub dxx: Complex64,
    pub dt: Complex64,
}

impl WaveValue {
    pub const ZERO: Self = Self {
        value: Complex64::new(0.0, 0.0),
        dx: Complex64::new(0.0, 0.0),
        dxx: Complex64::new(0.0, 0.0),
        dt: Complex64::new(0.0, 0.0),
    };

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            dx: self.dx * c,
            dxx: self.dxx * c,
            dt: self.dt * c,
        }
    }
}

/// σ and derived quantities of the ξ ↔ x map at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabFrame {
    pub t: f64,
    pub sigma: f64,
    pub sigma_dot: f64,
    pub sigma_ddot: f64,
    /// θ = mσ̇/(2σħ), the chirp of the unitary map weight e^(iθx²).
    pub theta: f64,
    pub theta_dot: f64,
}

impl LabFrame {
    pub fn at(ep: &EpSolution, t: f64) -> Self {
        let cfg = ep.config();
        let sigma = ep.sigma(t);
        let sigma_dot = ep.sigma_dot(t);
        let sigma_ddot = ep.sigma_ddot(t);
        let k = cfg.m / (2.0 * cfg.hbar);
        Self {
            t,
            sigma,
            sigma_dot,
            sigma_ddot,
            theta: k * sigma_dot / sigma,
            theta_dot: k * (sigma_ddot * sigma - sigma_dot * sigma_dot) / (sigma * sigma),
        }
    }

    pub fn xi(&self, x: f64) -> f64 {
        x / self.sigma
    }

    /// e^(imσ̇x²/(2σħ)).
    pub fn weight(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta * x * x)
    }

    /// φ(x) = σ^(−1/2) χ(x/σ) e^(iθx²) and its derivatives, given χ at ξ = x/σ.
    pub fn lift(&self, x: f64, chi: XiValue) -> WaveValue {
        let s = self.sigma;
        let rs = s.sqrt();
        let (c0, c1, c2) = (chi.v / rs, chi.d1 / (s * rs), chi.d2 / (s * s * rs));
        let th = self.theta;
        let w = self.weight(x);
        let i = Complex64::i();
        let value = w * c0;
        let dx = w * (c1 + i * (2.0 * th * x * c0));
        let dxx = w
            * (c2 + i * (4.0 * th * x * c1) + Complex64::new(-4.0 * th * th * x * x, 2.0 * th) * c0);
        let sd = self.sigma_dot;
        let dt = w
            * (-0.5 * sd / s * c0 - c1 * x * sd / s + i * (self.theta_dot * x * x * c0));
        WaveValue { value, dx, dxx, dt }
    }
}

/// (iħ∂ₜ − H)φ at one point.
pub fn tdse_defect(model: &ModelConfig, ep: &EpSolution, x: f64, t: f64, w: &WaveValue) -> Complex64 {
    let hbar = model.hbar;
    let kinetic = w.dxx * (-hbar * hbar / (2.0 * model.m));
    let v = model.potential_at(ep, x, t);
    Complex64::i() * hbar * w.dt - kinetic - w.value * v
}

/// ⟨H⟩ density φ̄ Hφ at one point.
pub fn hamiltonian_apply(model: &ModelConfig, ep: &EpSolution, x: f64, t: f64, w: &WaveValue) -> Complex64 {
    let hbar = model.hbar;
    w.dxx * (-hbar * hbar / (2.0 * model.m)) + w.value * model.potential_at(ep, x, t)
}
