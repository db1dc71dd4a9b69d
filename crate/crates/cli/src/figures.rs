//! Data behind the six reference figures, with the caption parameters.

use std::f64::consts::PI;

use rayon::prelude::*;

use lrinv_core::observables::{expectations_exact, expectations_perturbative};
use lrinv_core::wkb::turning_points;
use lrinv_core::{Error, Method, ModelConfig};

use crate::commands::{autocorr_for, state};
use crate::output::{Cell, Table};

/// Fig. 1: E₀ = 2, ω = 1/2, τ = 1, m = 3, n = 1.
fn fig1(c: f64) -> lrinv_core::Result<ModelConfig> {
    ModelConfig::stark(3.0, 0.5, 1.0, 2.0, c)
}

/// Fig. 3/4: ω = 1/2, τ = 1, ℓ = 2, m = 3.
fn fig3(e0: f64) -> lrinv_core::Result<ModelConfig> {
    ModelConfig::goldman_krivchenko_ell(3.0, 0.5, 1.0, e0, 2)
}

/// Fig. 5/6: ħ = 1, E₀ = 1, m = 1, τ = 1 (ω = 0.5 for the time-dependent panels).
fn fig5(c: f64) -> lrinv_core::Result<ModelConfig> {
    ModelConfig::stark(1.0, 0.5, 1.0, 1.0, c)
}

const AUTOCORR_LEVELS: [usize; 4] = [0, 1, 2, 3];

fn grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t0 + (t1 - t0) * k as f64 / steps as f64).collect()
}

/// Moments for exact and first-order states over two periods.
fn moments(models: &[(f64, ModelConfig)], param: &str, n: usize) -> anyhow::Result<Table> {
    let mut t = Table::new(["t", param, "method", "mean_x", "mean_p", "mean_x2", "mean_p2", "dxdp"]);
    for (value, model) in models {
        for time in grid(0.0, 2.0 * PI / model.omega, 200) {
            for m in [Method::Exact, Method::Perturbative] {
                let o = match m {
                    Method::Exact => expectations_exact(model, n, time)?,
                    _ => expectations_perturbative(model, n, time)?,
                };
                t.push(vec![
                    time.into(),
                    (*value).into(),
                    m.as_str().into(),
                    o.mean_x.into(),
                    o.mean_p.into(),
                    o.mean_x2.into(),
                    o.mean_p2.into(),
                    o.dxdp.into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// Autocorrelation panels stacked with a leading parameter column.
fn autocorr_panels(models: &[(f64, ModelConfig)], param: &str) -> anyhow::Result<Table> {
    let methods = [Method::Exact, Method::Perturbative];
    let mut out: Option<Table> = None;
    for (value, model) in models {
        let times = grid(0.0, 2.0 * PI / model.omega, 200);
        let panel = autocorr_for(model, &AUTOCORR_LEVELS, &methods, &times)?;
        let table = out.get_or_insert_with(|| {
            let mut h = vec![panel.header[0].clone(), param.to_string()];
            h.extend(panel.header[1..].iter().cloned());
            Table::new(h)
        });
        for mut row in panel.rows {
            row.insert(1, Cell::Num(*value));
            table.push(row);
        }
    }
    Ok(out.expect("at least one panel"))
}

fn value_or_mask(v: lrinv_core::Result<f64>) -> anyhow::Result<Cell> {
    match v {
        Ok(v) => Ok(Cell::Num(v)),
        Err(Error::TurningPointSingular { .. }) => Ok(Cell::Missing),
        Err(e) => Err(e.into()),
    }
}

/// Fig. 5: ξ-space eigenfunctions of Î for n = 1, c_κ ∈ {0.18, 0.2}.
fn fig5_table() -> anyhow::Result<Table> {
    let n = 1;
    let mut t = Table::new(["c_kappa", "xi", "exact", "wkb", "pert", "xi_minus", "xi_plus"]);
    for c in [0.18, 0.2] {
        let model = fig5(c)?;
        let states = [Method::Exact, Method::Wkb, Method::Perturbative].map(|m| state(&model, n, m));
        let [exact, wkb, pert] = states;
        let (exact, wkb, pert) = (exact?, wkb?, pert?);
        let (xm, xp) = turning_points(&model, wkb.lambda)?;
        for xi in grid(-6.0, 4.0, 1000) {
            t.push(vec![
                c.into(),
                xi.into(),
                value_or_mask(exact.chi(xi).map(|v| v.v))?,
                value_or_mask(wkb.chi(xi).map(|v| v.v))?,
                value_or_mask(pert.chi(xi).map(|v| v.v))?,
                xm.into(),
                xp.into(),
            ]);
        }
    }
    Ok(t)
}

/// Fig. 6: Re ψ₅(x,t) at four times over one period, with x± = σ(t)ξ±.
fn fig6_table() -> anyhow::Result<Table> {
    let n = 5;
    let model = fig5(0.1)?;
    let period = PI / model.omega;
    let states = [Method::Exact, Method::Wkb, Method::Perturbative]
        .map(|m| state(&model, n, m))
        .into_iter()
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (xm, xp) = turning_points(&model, states[1].lambda)?;
    let ep = model.ep()?;
    let times = [0.0, 0.25 * period, 0.5 * period, 0.75 * period];
    let blocks = times
        .par_iter()
        .map(|&time| {
            let s = ep.sigma(time);
            let frames: Vec<_> = states.iter().map(|st| st.frame(time)).collect();
            grid(-12.0, 8.0, 1000)
                .into_iter()
                .map(|x| {
                    let mut row = vec![Cell::Num(time), Cell::Num(x)];
                    for (st, fr) in states.iter().zip(&frames) {
                        row.push(value_or_mask(st.psi_in(fr, x).map(|w| w.value.re))?);
                    }
                    row.extend([Cell::Num(s * xm), Cell::Num(s * xp)]);
                    Ok(row)
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut t = Table::new(["t", "x", "re_exact", "re_wkb", "re_pert", "x_minus", "x_plus"]);
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

pub fn figure(id: u8) -> anyhow::Result<Table> {
    match id {
        1 => moments(&[(0.1, fig1(0.1)?), (0.3, fig1(0.3)?), (0.5, fig1(0.5)?)], "c_kappa", 1),
        2 => autocorr_panels(&[(0.1, fig1(0.1)?), (0.3, fig1(0.3)?)], "c_kappa"),
        3 => moments(&[(0.1, fig3(0.1)?), (0.3, fig3(0.3)?), (0.5, fig3(0.5)?)], "E0", 1),
        4 => autocorr_panels(&[(0.1, fig3(0.1)?), (0.5, fig3(0.5)?)], "E0"),
        5 => fig5_table(),
        6 => fig6_table(),
        _ => unreachable!("figure id is validated by the argument parser"),
    }
}
