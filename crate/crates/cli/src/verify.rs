//! Self-checks of the closed forms against independent numerics.

use std::f64::consts::PI;

use serde::Serialize;

use lrinv_core::exact::{eigen, lambda_exact};
use lrinv_core::observables::{expectations_exact, expectations_perturbative, expectations_quadrature};
use lrinv_core::oracle::{certified_eigenvalues, default_grid, default_invariant_grid, propagate, tdse_residual};
use lrinv_core::wkb::wkb_quantize;
use lrinv_core::{ModelConfig, WaveSample};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
    pub status: &'static str,
}

impl Check {
    /// `value` is an error measure; it passes when it does not exceed `tolerance`.
    fn new(check: &str, value: f64, tolerance: f64) -> Self {
        let status = if value <= tolerance { "pass" } else { "fail" };
        Self {
            check: check.to_string(),
            value,
            tolerance,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

fn oracle_spectrum(models: &[ModelConfig], levels: usize) -> lrinv_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for model in models {
        let grid = default_invariant_grid(model, 2048, levels)?;
        for (n, c) in certified_eigenvalues(model, &grid, levels)?.iter().enumerate() {
            let exact = lambda_exact(model, n)?;
            let scale = exact.abs().max(model.hbar * model.invariant_frequency());
            worst = worst.max((c.lambda - exact).abs() / scale);
        }
    }
    Ok(worst)
}

fn wkb_defect(models: &[ModelConfig]) -> lrinv_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for model in models {
        for n in 0..=8 {
            worst = worst.max((wkb_quantize(model, n)? - lambda_exact(model, n)?).abs());
        }
    }
    Ok(worst)
}

/// Largest shortfall of ΔxΔp below ħ/2, in units of ħ/2.
fn heisenberg_shortfall(models: &[ModelConfig]) -> lrinv_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for model in models {
        for n in 0..=4 {
            for k in 0..16 {
                let t = 2.0 * PI / model.omega * k as f64 / 16.0;
                for o in [expectations_exact(model, n, t)?, expectations_perturbative(model, n, t)?] {
                    worst = worst.max(1.0 - o.dxdp / (0.5 * model.hbar));
                }
            }
        }
    }
    Ok(worst)
}

fn moments_vs_quadrature(models: &[ModelConfig]) -> lrinv_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for model in models {
        for n in 0..=3 {
            let state = eigen(model, n)?;
            for k in 0..4 {
                let t = PI / model.omega * k as f64 / 4.0;
                let q = expectations_quadrature(&state, t)?;
                let c = expectations_exact(model, n, t)?;
                for (a, b) in [(c.mean_x, q.mean_x), (c.mean_p, q.mean_p), (c.mean_x2, q.mean_x2), (c.mean_p2, q.mean_p2)] {
                    worst = worst.max((a - b).abs() / (1.0 + b.abs()));
                }
            }
        }
    }
    Ok(worst)
}

fn tdse_residuals(models: &[ModelConfig]) -> lrinv_core::Result<f64> {
    let mut worst: f64 = 0.0;
    for model in models {
        for n in 0..=2 {
            let state = eigen(model, n)?;
            let grid = default_grid(model, 8192, n)?;
            for k in 0..4 {
                let t = PI / model.omega * k as f64 / 4.0;
                worst = worst.max(tdse_residual(model, |x, tt| state.psi(x, tt), t, &grid)?);
            }
        }
    }
    Ok(worst)
}

/// 1 − |⟨ψ_CN|ψ⟩| over one period for the n = 5 Model A state.
fn crank_nicolson_defect() -> lrinv_core::Result<f64> {
    let model = ModelConfig::stark(1.0, 0.5, 1.0, 1.0, 0.1)?;
    let state = eigen(&model, 5)?;
    let grid = default_grid(&model, 4096, 5)?;
    let mut cn = WaveSample::from_state(&state, grid, 0.0)?;
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let t = PI / model.omega * k as f64 / 4.0;
        cn = propagate(&model, &cn, t, 1e-4)?;
        worst = worst.max(1.0 - cn.overlap(&WaveSample::from_state(&state, grid, t)?));
    }
    Ok(worst)
}

pub fn run(full: bool) -> anyhow::Result<Vec<Check>> {
    let a = [
        ModelConfig::stark(1.0, 1.0, 1.0, 1.0, 0.2)?,
        ModelConfig::stark(3.0, 0.5, 1.0, 2.0, 0.1)?,
    ];
    let b = [
        ModelConfig::goldman_krivchenko_ell(3.0, 0.5, 1.0, 0.1, 2)?,
        ModelConfig::goldman_krivchenko_ell(1.0, 0.5, 1.0, 0.5, 1)?,
    ];
    let all = [a[0], a[1], b[0], b[1]];
    let mut checks = vec![
        Check::new("eigenvalues_model_a_vs_oracle", oracle_spectrum(&a, 6)?, 1e-6),
        Check::new("eigenvalues_model_b_vs_oracle", oracle_spectrum(&b, 6)?, 1e-5),
        Check::new("wkb_quantization_model_a", wkb_defect(&a)?, 1e-8),
        Check::new("observables_vs_quadrature", moments_vs_quadrature(&all)?, 1e-8),
        Check::new("heisenberg_shortfall", heisenberg_shortfall(&all)?, 2e-10),
        Check::new("tdse_residual", tdse_residuals(&all)?, 1e-4),
    ];
    if full {
        checks.push(Check::new("crank_nicolson_overlap_defect", crank_nicolson_defect()?, 1e-3));
    }
    Ok(checks)
}
