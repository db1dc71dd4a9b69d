//! Table-producing subcommands.

use rayon::prelude::*;

use lrinv_core::exact::{eigen, lambda_exact};
use lrinv_core::invariant::invariant_quadratic_form;
use lrinv_core::observables::{autocorrelation, expectations_exact, expectations_perturbative};
use lrinv_core::oracle::{certified_eigenvalues, default_invariant_grid, oracle_state, Grid};
use lrinv_core::perturb::{lambda_first_order, perturbed_state};
use lrinv_core::wkb::{wkb_quantize, wkb_state};
use lrinv_core::{Eigenstate, Error, Method, ModelConfig, ModelKind};

use crate::output::{Cell, Table};
use crate::scenario::{Scenario, UsageError};

fn col(method: Method) -> &'static str {
    match method {
        Method::Perturbative => "pert",
        other => other.as_str(),
    }
}

/// σ, σ̇ and the driving field. For Model B the field column is the
/// coefficient E₀/σ⁴ of its x² drive.
pub fn ep_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    let ep = model.ep()?;
    let mut t = Table::new(["t", "sigma", "sigma_dot", "E"]);
    for time in s.times(&model)? {
        let field = match model.kind {
            ModelKind::StarkQuadratic => ep.field_e(time),
            ModelKind::GoldmanKrivchenko => model.e0 / ep.sigma_squared(time).powi(2),
        };
        t.push(vec![time.into(), ep.sigma(time).into(), ep.sigma_dot(time).into(), field.into()]);
    }
    Ok(t)
}

pub fn invariant_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    let times = s.times(&model)?;
    let first = invariant_quadratic_form(&model, times[0])?;
    let mut header: Vec<String> = ["t", "alpha", "gamma", "delta", "epsilon"].map(String::from).to_vec();
    header.extend(first.beta_terms.iter().map(|b| format!("beta_{}", b.p)));
    let mut t = Table::new(header);
    for time in times {
        let c = invariant_quadratic_form(&model, time)?;
        let mut row: Vec<Cell> = vec![time.into(), c.alpha.into(), c.gamma.into(), c.delta.into(), c.epsilon.into()];
        row.extend(c.beta_terms.iter().map(|b| Cell::Num(b.beta)));
        t.push(row);
    }
    Ok(t)
}

fn unsupported(e: &Error) -> bool {
    matches!(e, Error::Unsupported(_))
}

/// λₙ per method; methods the model does not support are left empty.
pub fn eigen_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    let levels = s.levels()?;
    let methods = s.methods(&[Method::Exact])?;
    let top = *levels.iter().max().expect("levels are non-empty");
    let oracle = if methods.contains(&Method::Oracle) {
        if top >= 20 {
            return Err(UsageError("the grid oracle resolves n < 20 only".into()).into());
        }
        let grid = default_invariant_grid(&model, s.grid.n.unwrap_or(4096), top + 1)?;
        Some(certified_eigenvalues(&model, &grid, top + 1)?)
    } else {
        None
    };
    let mut header = vec!["n".to_string()];
    header.extend(methods.iter().map(|m| format!("lambda_{}", col(*m))));
    let mut t = Table::new(header);
    for &n in &levels {
        let mut row = vec![Cell::from(n)];
        for &m in &methods {
            let v = match m {
                Method::Exact => lambda_exact(&model, n),
                Method::Perturbative => lambda_first_order(&model, n).map(|(l0, l1)| l0 + model.epsilon() * l1),
                Method::Wkb => wkb_quantize(&model, n),
                Method::Oracle => Ok(oracle.as_ref().expect("oracle computed above")[n].lambda),
            };
            row.push(match v {
                Ok(v) => Cell::Num(v),
                Err(e) if unsupported(&e) => Cell::Missing,
                Err(e) => return Err(e.into()),
            });
        }
        t.push(row);
    }
    Ok(t)
}

pub fn state(model: &ModelConfig, n: usize, method: Method) -> anyhow::Result<Eigenstate> {
    Ok(match method {
        Method::Exact => eigen(model, n)?,
        Method::Perturbative => perturbed_state(model, n)?,
        Method::Wkb => wkb_state(model, n)?,
        Method::Oracle => {
            let grid = default_invariant_grid(model, 4096, n + 1)?;
            oracle_state(model, n, &grid)?
        }
    })
}

/// ψ(x,t) per method; WKB points inside the turning-point zones are empty.
pub fn wavefn_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    let levels = s.levels()?;
    let methods = s.methods(&[Method::Exact])?;
    let top = *levels.iter().max().expect("levels are non-empty");
    let grid = s.lab_grid(&model, top, 512)?;
    let times = s.times(&model)?;
    let mut header = vec!["t".to_string(), "n".to_string(), "x".to_string()];
    for m in &methods {
        let c = col(*m);
        header.extend([format!("re_{c}"), format!("im_{c}"), format!("abs2_{c}")]);
    }
    let mut t = Table::new(header);
    for &n in &levels {
        let states = methods.iter().map(|&m| state(&model, n, m)).collect::<anyhow::Result<Vec<_>>>()?;
        let blocks = times
            .par_iter()
            .map(|&time| wavefn_block(&states, &grid, time, n))
            .collect::<anyhow::Result<Vec<_>>>()?;
        blocks.into_iter().flatten().for_each(|r| t.push(r));
    }
    Ok(t)
}

fn wavefn_block(states: &[Eigenstate], grid: &Grid, time: f64, n: usize) -> anyhow::Result<Vec<Vec<Cell>>> {
    let frames: Vec<_> = states.iter().map(|s| s.frame(time)).collect();
    let mut rows = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let mut row = vec![Cell::Num(time), Cell::from(n), Cell::Num(x)];
        for (st, fr) in states.iter().zip(&frames) {
            match st.psi_in(fr, x) {
                Ok(w) => row.extend([w.value.re.into(), w.value.im.into(), w.value.norm_sqr().into()]),
                Err(Error::TurningPointSingular { .. }) => row.extend([Cell::Missing, Cell::Missing, Cell::Missing]),
                Err(e) => return Err(e.into()),
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn observable_methods(s: &Scenario) -> anyhow::Result<Vec<Method>> {
    let methods = s.methods(&[Method::Exact, Method::Perturbative])?;
    if let Some(m) = methods.iter().find(|m| !matches!(m, Method::Exact | Method::Perturbative)) {
        return Err(UsageError(format!("method '{m}' has no closed-form observables")).into());
    }
    Ok(methods)
}

pub fn observables_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    let levels = s.levels()?;
    let methods = observable_methods(s)?;
    let mut t = Table::new(["t", "n", "method", "mean_x", "mean_p", "mean_x2", "mean_p2", "dxdp"]);
    for time in s.times(&model)? {
        for &n in &levels {
            for &m in &methods {
                let o = match m {
                    Method::Exact => expectations_exact(&model, n, time)?,
                    _ => expectations_perturbative(&model, n, time)?,
                };
                t.push(vec![
                    time.into(),
                    n.into(),
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

/// Columns A_exact_n, A_pert_n for each requested n.
pub fn autocorr_table(s: &Scenario) -> anyhow::Result<Table> {
    let model = s.model_config()?;
    autocorr_for(&model, &s.levels()?, &observable_methods(s)?, &s.times(&model)?)
}

pub fn autocorr_for(model: &ModelConfig, levels: &[usize], methods: &[Method], times: &[f64]) -> anyhow::Result<Table> {
    let mut header = vec!["t".to_string()];
    for n in levels {
        header.extend(methods.iter().map(|m| format!("A_{}_{n}", col(*m))));
    }
    let mut t = Table::new(header);
    let rows = times
        .par_iter()
        .map(|&time| {
            let mut row = vec![Cell::Num(time)];
            for &n in levels {
                for &m in methods {
                    row.push(autocorrelation(model, n, time, m)?.into());
                }
            }
            Ok(row)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}
