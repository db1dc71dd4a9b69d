//! First-order Rayleigh–Schrödinger treatment of the invariant,
//! I = I₀ + εI_p with I_p = (m/σ²)x² (mξ² after the unitary map).
//!
//! Model A expands in ε = c_κ, Model B in ε = E₀. The unperturbed basis is
//! the exact eigenbasis at ε = 0, lifted with the same σ(t).

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{basis_profile, Eigenstate, Method, PhaseFn, Profile};
use crate::model::{ModelConfig, ModelKind};
use crate::specfun::PolyOrder;

/// Above this ε the first-order results are flagged as unreliable.
pub const EPSILON_ADVISORY: f64 = 0.5;

/// Splitting of a model into its ε = 0 part and the expansion parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSplit {
    pub unperturbed: ModelConfig,
    pub epsilon: f64,
}

impl PerturbSplit {
    pub fn new(model: &ModelConfig) -> Result<Self> {
        let epsilon = model.epsilon();
        if epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!("expansion parameter must be >= 0, got {epsilon}")));
        }
        if epsilon > EPSILON_ADVISORY {
            warn!("perturbation parameter {epsilon} exceeds {EPSILON_ADVISORY}; first-order results may be poor");
        }
        Ok(Self {
            unperturbed: model.with_epsilon(0.0)?,
            epsilon,
        })
    }

    /// λₖ⁽⁰⁾ of the unperturbed invariant.
    pub fn lambda0(&self, k: usize) -> f64 {
        let m0 = &self.unperturbed;
        let (m, tau, hbar) = (m0.m, m0.tau, m0.hbar);
        let k = k as f64;
        match m0.kind {
            ModelKind::StarkQuadratic => hbar * (k + 0.5) * m * tau.sqrt() - m0.e0 * m0.e0 / (2.0 * tau),
            ModelKind::GoldmanKrivchenko => hbar * (2.0 * k + 1.0 + 0.5 * m0.b_param()) * m * tau.sqrt(),
        }
    }
}

/// (λₙ⁽⁰⁾, λₙ⁽¹⁾) with λₙ ≈ λₙ⁽⁰⁾ + ελₙ⁽¹⁾.
pub fn lambda_first_order(model: &ModelConfig, n: usize) -> Result<(f64, f64)> {
    model.validate()?;
    let split = PerturbSplit::new(model)?;
    let n = PolyOrder::new(n)?.get();
    let (m, tau, hbar) = (model.m, model.tau, model.hbar);
    let nf = n as f64;
    let l1 = match model.kind {
        ModelKind::StarkQuadratic => hbar * (nf + 0.5) / tau.sqrt() + model.e0 * model.e0 / (m * tau * tau),
        ModelKind::GoldmanKrivchenko => hbar * (2.0 * nf + 1.0 + 0.5 * model.b_param()) / tau.sqrt(),
    };
    Ok((split.lambda0(n), l1))
}

/// Coefficients cₖ of φₙ⁽¹⁾ = Σₖ cₖ φₖ⁽⁰⁾.
pub fn mixing_coefficients(model: &ModelConfig, n: usize) -> Result<Vec<(usize, f64)>> {
    model.validate()?;
    let split = PerturbSplit::new(model)?;
    let n = PolyOrder::new(n)?.get();
    let (m, tau, hbar) = (model.m, model.tau, model.hbar);
    let nf = n as f64;
    let mut out = Vec::with_capacity(4);
    match model.kind {
        ModelKind::StarkQuadratic => {
            let q = 4.0 * m * tau;
            let lin = model.e0 * 2f64.sqrt() / (m.powf(1.5) * tau.powf(1.75) * hbar.sqrt());
            if n >= 2 {
                out.push((n - 2, (nf * (nf - 1.0)).sqrt() / q));
            }
            if n >= 1 {
                out.push((n - 1, -nf.sqrt() * lin));
            }
            out.push((n + 1, (nf + 1.0).sqrt() * lin));
            out.push((n + 2, -((nf + 1.0) * (nf + 2.0)).sqrt() / q));
        }
        ModelKind::GoldmanKrivchenko => {
            let half_b = 0.5 * model.b_param();
            let q = 2.0 * m * tau;
            if n >= 1 {
                out.push((n - 1, -(nf * (nf + half_b)).sqrt() / q));
            }
            out.push((n + 1, ((nf + 1.0) * (nf + 1.0 + half_b)).sqrt() / q));
        }
    }
    for &(k, _) in &out {
        PolyOrder::new(k)?;
        let gap = split.lambda0(n) - split.lambda0(k);
        if gap.abs() <= 1e-12 * split.lambda0(n).abs().max(1.0) {
            return Err(Error::Degenerate(n, k));
        }
    }
    Ok(out)
}

/// The first-order state e^(iαₙ⁽¹⁾)(φₙ⁽⁰⁾ + εφₙ⁽¹⁾).
pub fn perturbed_state(model: &ModelConfig, n: usize) -> Result<Eigenstate> {
    let split = PerturbSplit::new(model)?;
    let (l0, l1) = lambda_first_order(model, n)?;
    let eps = split.epsilon;
    let base = &split.unperturbed;
    let mut parts = vec![(1.0, basis_profile(base, n)?)];
    for (k, c) in mixing_coefficients(model, n)? {
        parts.push((eps * c, basis_profile(base, k)?));
    }
    Eigenstate::new(*model, n, l0 + eps * l1, Method::Perturbative, Profile::Combination(parts))
}

pub fn phi_first_order(model: &ModelConfig, n: usize, x: f64, t: f64) -> Result<Complex64> {
    perturbed_state(model, n)?.phi(x, t)
}

/// αₙ⁽¹⁾(t) = −((λ⁽⁰⁾ + ελ⁽¹⁾)/(mħ)) ∫₀ᵗ dt′/σ².
pub fn phase_first_order(model: &ModelConfig, n: usize, t: f64) -> Result<f64> {
    let (l0, l1) = lambda_first_order(model, n)?;
    Ok(PhaseFn::new(l0 + model.epsilon() * l1, model.ep()?).eval(t))
}

pub fn psi_first_order(model: &ModelConfig, n: usize, x: f64, t: f64) -> Result<Complex64> {
    perturbed_state(model, n)?.psi(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{eigen, lambda_exact};
    use crate::quad::{try_integrate, QuadOptions};
    use approx::assert_relative_eq;

    fn model_a(c: f64) -> ModelConfig {
        ModelConfig::stark(3.0, 0.5, 1.0, 2.0, c).unwrap()
    }

    fn model_b(e0: f64) -> ModelConfig {
        ModelConfig::goldman_krivchenko_ell(3.0, 0.5, 1.0, e0, 2).unwrap()
    }

    fn xi_overlap(a: &Profile, b: &Profile, w: impl Fn(f64) -> f64) -> f64 {
        let (l1, h1) = a.xi_support(12.0);
        let (l2, h2) = b.xi_support(12.0);
        try_integrate(
            |xi| Ok(a.eval(xi)?.v * w(xi) * b.eval(xi)?.v),
            l1.min(l2),
            h1.max(h2),
            &QuadOptions::default(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn field_free_reduction() {
        let m = ModelConfig::stark(2.0, 0.5, 1.5, 0.0, 0.1).unwrap();
        for n in 0..4 {
            let (l0, l1) = lambda_first_order(&m, n).unwrap();
            let nf = n as f64 + 0.5;
            assert_relative_eq!(l0, nf * 2.0 * 1.5f64.sqrt(), max_relative = 1e-15);
            assert_relative_eq!(l1, nf / 1.5f64.sqrt(), max_relative = 1e-15);
        }
    }

    #[test]
    fn first_order_eigenvalue_matches_quadrature() {
        let m = ModelConfig::stark(1.0, 0.5, 1.0, 1.0, 0.2).unwrap();
        let (l0, l1) = lambda_first_order(&m, 0).unwrap();
        assert!(l0.abs() < 1e-15);
        assert_relative_eq!(l1, 1.5, max_relative = 1e-15);
        // λ⁽¹⁾ = ⟨φ⁽⁰⁾|(m/σ²)x²|φ⁽⁰⁾⟩ at t = 0
        let p0 = basis_profile(&m.with_epsilon(0.0).unwrap(), 0).unwrap();
        assert_relative_eq!(xi_overlap(&p0, &p0, |x| x * x), 1.5, max_relative = 1e-12);
        let b = model_b(0.3);
        let base = b.with_epsilon(0.0).unwrap();
        for n in 0..4 {
            let p = basis_profile(&base, n).unwrap();
            let (_, l1) = lambda_first_order(&b, n).unwrap();
            assert_relative_eq!(xi_overlap(&p, &p, |x| 3.0 * x * x), l1, max_relative = 1e-10);
        }
    }

    #[test]
    fn mixing_matches_sum_over_states() {
        for model in [model_a(0.1), model_b(0.1)] {
            let split = PerturbSplit::new(&model).unwrap();
            let base = split.unperturbed;
            for n in 0..5 {
                let mix = mixing_coefficients(&model, n).unwrap();
                let pn = basis_profile(&base, n).unwrap();
                for k in 0..=n + 4 {
                    if k == n {
                        continue;
                    }
                    let pk = basis_profile(&base, k).unwrap();
                    let me = xi_overlap(&pk, &pn, |x| model.m * x * x);
                    let want = me / (split.lambda0(n) - split.lambda0(k));
                    let got = mix.iter().find(|(j, _)| *j == k).map_or(0.0, |(_, c)| *c);
                    assert!((got - want).abs() < 1e-10, "{:?} n={n} k={k}: {got} vs {want}", model.kind);
                }
            }
        }
    }

    #[test]
    fn mixing_is_antisymmetric() {
        for model in [model_a(0.1), model_b(0.1)] {
            for n in 0..5 {
                for (k, c) in mixing_coefficients(&model, n).unwrap() {
                    let back = mixing_coefficients(&model, k).unwrap();
                    let (_, ck) = back.iter().find(|(j, _)| *j == n).unwrap();
                    assert!((c + ck).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn model_b_ground_state_mixes_one_level() {
        let mix = mixing_coefficients(&model_b(0.2), 0).unwrap();
        assert_eq!(mix.len(), 1);
        assert_eq!(mix[0].0, 1);
    }

    #[test]
    fn first_order_correction_is_orthogonal() {
        for model in [model_a(0.1), model_b(0.1)] {
            let base = model.with_epsilon(0.0).unwrap();
            for n in 0..4 {
                let pn = basis_profile(&base, n).unwrap();
                let parts = mixing_coefficients(&model, n)
                    .unwrap()
                    .into_iter()
                    .map(|(k, c)| (c, basis_profile(&base, k).unwrap()))
                    .collect();
                let corr = Profile::Combination(parts);
                assert!(xi_overlap(&pn, &corr, |_| 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn taylor_defect_scales_quadratically() {
        for kind in [0, 1] {
            for n in 0..=5 {
                let defect = |e: f64| {
                    let m = if kind == 0 { model_a(e) } else { model_b(e) };
                    let (l0, l1) = lambda_first_order(&m, n).unwrap();
                    (lambda_exact(&m, n).unwrap() - l0 - e * l1).abs()
                };
                let r1 = defect(0.2) / defect(0.1);
                let r2 = defect(0.1) / defect(0.05);
                assert!((r1 - 4.0).abs() < 0.8 && (r2 - 4.0).abs() < 0.8, "{kind} {n}: {r1} {r2}");
                assert!((r1 / r2 - 1.0).abs() < 0.2);
            }
        }
    }

    #[test]
    fn zero_epsilon_reduces_to_exact() {
        for model in [model_a(0.0), model_b(0.0)] {
            let p = perturbed_state(&model, 2).unwrap();
            let e = eigen(&model, 2).unwrap();
            for (x, t) in [(0.3, 0.0), (1.1, 1.7), (-0.6, 4.2)] {
                assert!((p.psi(x, t).unwrap() - e.psi(x, t).unwrap()).norm() < 1e-14);
            }
            assert_eq!(phase_first_order(&model, 2, 3.0).unwrap(), e.phase(3.0));
            assert_eq!(phase_first_order(&model, 2, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn distance_to_exact_shrinks_with_epsilon() {
        let dist = |c: f64| {
            let m = ModelConfig::stark(1.0, 0.5, 1.0, 1.0, c).unwrap();
            let p = perturbed_state(&m, 1).unwrap();
            let e = eigen(&m, 1).unwrap();
            let f = p.frame(1.0);
            let (lo, hi) = p.x_support(1.0, 12.0);
            try_integrate(
                |x| Ok((p.psi_in(&f, x)?.value - e.psi_in(&f, x)?.value).norm_sqr()),
                lo,
                hi,
                &QuadOptions::default(),
            )
            .unwrap()
            .value
            .sqrt()
        };
        assert!(dist(0.1) <= 0.5 * dist(0.2));
    }

    #[test]
    fn negative_epsilon_rejected() {
        let m = ModelConfig::goldman_krivchenko_ell(1.0, 0.5, 1.0, -0.1, 1).unwrap();
        assert!(lambda_first_order(&m, 0).is_err());
    }
}
