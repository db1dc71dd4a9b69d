//! Lewis–Riesenfeld invariant coefficients and the factorising potential
//! family V(x,t) = Σ_p κ_p(t) c_p x^p with κ_p = c̃_p σ^−(2+p).
//!
//! The invariant is
//!   I = ½[αp² + γx + δ{x,p} + εx²] + Σ_p β_p c_p x^p
//! with α = σ², γ = 2mσ²E, δ = −mσσ̇, ε = m²σ̇² + m²τ/σ², β_p = mσ²κ_p.

use num_complex::Complex64;

use crate::ermakov::{EpConfig, EpSolution};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, ModelKind, WaveValue};

/// One member c_p x^p of the potential family, with temporal constant c̃_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub p: f64,
    pub c: f64,
    pub c_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialSeries {
    terms: Vec<SeriesTerm>,
}

impl PotentialSeries {
    pub fn new(terms: Vec<SeriesTerm>) -> Result<Self> {
        for (i, a) in terms.iter().enumerate() {
            if terms[..i].iter().any(|b| b.p == a.p) {
                return Err(Error::InvalidConfig(format!("duplicate exponent p = {}", a.p)));
            }
        }
        Ok(Self { terms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    /// Truncation order (number of terms).
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// V(x,t) = Σ c̃_p σ^−(2+p) c_p x^p for a given σ.
    pub fn eval(&self, x: f64, sigma: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.c_tilde * sigma.powf(-(2.0 + t.p)) * t.c * x.powf(t.p))
            .sum()
    }
}

/// Terms (2n, 1, (−1)ⁿ/n!) for n = 1..N: the time-dependent Gaussian
/// e^(−x²/σ²) − 1 written in the κ_p family.
pub fn expand_gaussian(order: usize) -> Result<PotentialSeries> {
    if order < 1 {
        return Err(Error::Domain("series order must be at least 1".into()));
    }
    let mut coeff = 1.0;
    let terms = (1..=order)
        .map(|n| {
            coeff *= -1.0 / n as f64;
            SeriesTerm {
                p: 2.0 * n as f64,
                c: 1.0,
                c_tilde: coeff,
            }
        })
        .collect();
    PotentialSeries::new(terms)
}

/// Terms (2n, 1, (−1)ⁿ(2n)!/((2n)!!)² k^−(1+2n)) for n = 1..N: the soft
/// Coulomb potential 1/√(x²+k²) minus its value at the origin.
pub fn expand_soft_coulomb(order: usize, k: f64) -> Result<PotentialSeries> {
    if order < 1 {
        return Err(Error::Domain("series order must be at least 1".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("softening k must be positive, got {k}")));
    }
    // (2n)!/((2n)!!)² = C(2n,n)/4ⁿ, built by the ratio (2n−1)/(2n)
    let mut ratio = 1.0;
    let terms = (1..=order)
        .map(|n| {
            let nf = n as f64;
            ratio *= (2.0 * nf - 1.0) / (2.0 * nf);
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            SeriesTerm {
                p: 2.0 * nf,
                c: 1.0,
                c_tilde: sign * ratio * k.powf(-(1.0 + 2.0 * nf)),
            }
        })
        .collect();
    PotentialSeries::new(terms)
}

/// β_p c_p x^p contribution to the invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaTerm {
    pub p: f64,
    pub c: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCoeffs {
    pub t: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub beta_terms: Vec<BetaTerm>,
    hbar: f64,
}

impl InvariantCoeffs {
    /// Multiplicative part ½γx + ½εx² + Σβ_p c_p x^p.
    pub fn potential(&self, x: f64) -> f64 {
        let series: f64 = self.beta_terms.iter().map(|b| b.beta * b.c * x.powf(b.p)).sum();
        0.5 * (self.gamma * x + self.epsilon * x * x) + series
    }

    /// Total coefficient of x² inside ½[…], including p = 2 series terms.
    pub fn x2_coefficient(&self) -> f64 {
        self.epsilon
            + 2.0
                * self
                    .beta_terms
                    .iter()
                    .filter(|b| b.p == 2.0)
                    .map(|b| b.beta * b.c)
                    .sum::<f64>()
    }

    /// Coefficient of x⁻² inside ½[…].
    pub fn inverse_square_coefficient(&self) -> f64 {
        2.0 * self
            .beta_terms
            .iter()
            .filter(|b| b.p == -2.0)
            .map(|b| b.beta * b.c)
            .sum::<f64>()
    }

    /// (Iφ)(x), with {x,p}φ = −iħ(2xφ′ + φ).
    pub fn apply(&self, x: f64, w: &WaveValue) -> Complex64 {
        let h = self.hbar;
        let kinetic = w.dxx * (-0.5 * self.alpha * h * h);
        let anti = (w.dx * (2.0 * x) + w.value) * Complex64::new(0.0, -0.5 * self.delta * h);
        kinetic + anti + w.value * self.potential(x)
    }
}

/// Invariant coefficients for H = p²/2m + ½mω²x² + E(t)x + Σ κ_p c_p x^p.
pub fn coeffs_at(cfg: &EpConfig, series: &PotentialSeries, t: f64) -> Result<InvariantCoeffs> {
    let ep = EpSolution::new(*cfg)?;
    Ok(coeffs_from(&ep, series, t))
}

pub(crate) fn coeffs_from(ep: &EpSolution, series: &PotentialSeries, t: f64) -> InvariantCoeffs {
    let cfg = ep.config();
    let m = cfg.m;
    let s = ep.sigma(t);
    let sd = ep.sigma_dot(t);
    let s2 = s * s;
    let beta_terms = series
        .terms()
        .iter()
        .map(|term| BetaTerm {
            p: term.p,
            c: term.c,
            beta: m * s2 * ep.kappa_p(term.p, term.c_tilde, t),
        })
        .collect();
    InvariantCoeffs {
        t,
        alpha: s2,
        gamma: 2.0 * m * s2 * ep.field_e(t),
        delta: -m * s * sd,
        epsilon: m * m * sd * sd + m * m * cfg.tau / s2,
        beta_terms,
        hbar: cfg.hbar,
    }
}

/// The κ_p series that builds each model's non-harmonic, non-Stark part.
pub fn model_series(model: &ModelConfig) -> PotentialSeries {
    let terms = match model.kind {
        // (c_κ/σ⁴)x² = κ₂·(x²/2) with c̃₂ = 2c_κ
        ModelKind::StarkQuadratic => vec![SeriesTerm {
            p: 2.0,
            c: 0.5,
            c_tilde: 2.0 * model.c_kappa,
        }],
        // E₀x²/σ⁴ and the static barrier mΩ²/(2x²) (p = −2)
        ModelKind::GoldmanKrivchenko => vec![
            SeriesTerm {
                p: 2.0,
                c: 1.0,
                c_tilde: model.e0,
            },
            SeriesTerm {
                p: -2.0,
                c: 0.5 * model.m * model.barrier_omega2(),
                c_tilde: 1.0,
            },
        ],
    };
    PotentialSeries { terms }
}

/// Full invariant of a benchmark model at time t.
pub fn invariant_quadratic_form(model: &ModelConfig, t: f64) -> Result<InvariantCoeffs> {
    model.validate()?;
    Ok(coeffs_from(&model.ep()?, &model_series(model), t))
}
