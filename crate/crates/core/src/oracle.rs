//! Independent numerical checks: finite-difference diagonalisation of the
//! transformed invariant Î and Crank–Nicolson propagation of the lab-frame
//! TDSE, both on uniform grids with Dirichlet ends.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{Eigenstate, Method, Profile};
use crate::model::{ModelConfig, ModelKind};

/// Uniform grid x_i = x_min + i·h, i = 0..n−1, with ψ = 0 just outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 64 {
            return Err(Error::InvalidConfig(format!("grid needs at least 64 points, got {n}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidConfig(format!("bad grid extent [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid for a model: Model B must start strictly inside the half-line.
    pub fn for_model(model: &ModelConfig, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if model.kind == ModelKind::GoldmanKrivchenko && x_min <= 0.0 {
            return Err(Error::InvalidConfig(format!("Model B grid must have x_min > 0, got {x_min}")));
        }
        Self::new(x_min, x_max, n)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }

    /// Same extent with the spacing halved (2n − 1 points).
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1, ..*self }
    }
}

/// Complex wavefunction samples on a grid at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSample {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl WaveSample {
    pub fn from_fn(grid: Grid, t: f64, mut f: impl FnMut(f64) -> Result<Complex64>) -> Result<Self> {
        let values = grid.points().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, t })
    }

    /// Samples of the state's ψ(x,t).
    pub fn from_state(state: &Eigenstate, grid: Grid, t: f64) -> Result<Self> {
        let frame = state.frame(t);
        Self::from_fn(grid, t, |x| Ok(state.psi_in(&frame, x)?.value))
    }

    /// Discrete L² norm √(h Σ|ψᵢ|²).
    pub fn norm(&self) -> f64 {
        (self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let s = 1.0 / self.norm();
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// h Σ conj(selfᵢ)·otherᵢ.
    pub fn inner(&self, other: &WaveSample) -> Complex64 {
        let h = self.grid.spacing();
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * h
    }

    /// |⟨self|other⟩|/(‖self‖‖other‖).
    pub fn overlap(&self, other: &WaveSample) -> f64 {
        self.inner(other).norm() / (self.norm() * other.norm())
    }
}

/// Symmetric tridiagonal matrix with diagonal d and off-diagonal e.
#[derive(Debug, Clone)]
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below x (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            let e2 = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] };
            q = self.d[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The j-th smallest eigenvalue by bisection.
    fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.d.len();
        let scale = self.d.iter().chain(&self.e).fold(0.0f64, |a, v| a.max(v.abs()));
        let shift = lambda + 1e-12 * scale.max(1.0);
        let mut v = vec![1.0; n];
        // deterministic, non-symmetric start so no eigenvector is orthogonal to it
        for (i, x) in v.iter_mut().enumerate() {
            *x += 0.1 * ((i as f64) * 0.618_033_988_749_895).fract();
        }
        for _ in 0..3 {
            v = solve_real_tridiagonal(&self.e, &self.d, &self.e, shift, &v);
            let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= s);
        }
        v
    }
}

/// Solves (T − shift·I)y = rhs for tridiagonal T (sub, diag, sup).
fn solve_real_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let tiny = 1e-300;
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut b0 = diag[0] - shift;
    if b0 == 0.0 {
        b0 = tiny;
    }
    c[0] = if n > 1 { sup[0] / b0 } else { 0.0 };
    y[0] = rhs[0] / b0;
    for i in 1..n {
        let mut den = diag[i] - shift - sub[i - 1] * c[i - 1];
        if den == 0.0 {
            den = tiny;
        }
        if i + 1 < n {
            c[i] = sup[i] / den;
        }
        y[i] = (rhs[i] - sub[i - 1] * y[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    y
}

/// Î = −(ħ²/2)∂²_ξ + V_I on the grid with the 3-point Laplacian.
fn invariant_matrix(model: &ModelConfig, grid: &Grid) -> Tridiagonal {
    let h = grid.spacing();
    let k = model.hbar * model.hbar / (2.0 * h * h);
    Tridiagonal {
        d: grid.points().map(|xi| 2.0 * k + model.invariant_potential(xi)).collect(),
        e: vec![-k; grid.n - 1],
    }
}

/// ξ-grid wide enough for the lowest `levels` eigenstates of Î.
pub fn default_invariant_grid(model: &ModelConfig, n: usize, levels: usize) -> Result<Grid> {
    model.validate()?;
    let w = model.invariant_frequency();
    let len = (model.hbar / w).sqrt();
    let top = (4 * levels + 2) as f64;
    match model.kind {
        ModelKind::StarkQuadratic => {
            let r = len * (top.sqrt() + 10.0);
            Grid::new(model.xi0() - r, model.xi0() + r, n)
        }
        ModelKind::GoldmanKrivchenko => {
            let l = len * ((top + model.b_param()).sqrt() + 10.0);
            Grid::new(l / n as f64, l, n)
        }
    }
}

/// Lab-frame grid covering the state n over a whole period of σ(t):
/// L = max σ·(max|ξ±| + 10√(ħ/Ω)).
pub fn default_grid(model: &ModelConfig, n_points: usize, level: usize) -> Result<Grid> {
    model.validate()?;
    let sigma_max = 1.0f64.max(model.tau.sqrt() / model.omega);
    let w = model.invariant_frequency();
    let len = (model.hbar / w).sqrt();
    let q = (2 * level + 1) as f64;
    match model.kind {
        ModelKind::StarkQuadratic => {
            let reach = model.xi0().abs() + len * q.sqrt();
            let l = sigma_max * (reach + 10.0 * len);
            Grid::new(-l, l, n_points)
        }
        ModelKind::GoldmanKrivchenko => {
            let reach = len * (2.0 * q + model.b_param()).sqrt();
            let l = sigma_max * (reach + 10.0 * len);
            Grid::for_model(model, l / n_points as f64, l, n_points)
        }
    }
}

/// The k lowest eigenpairs of Î on a ξ-grid, eigenvalues ascending and
/// eigenvectors normalised to h Σ vᵢ² = 1.
pub fn diagonalize_invariant(model: &ModelConfig, grid: &Grid, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    model.validate()?;
    if k == 0 || k > 20 {
        return Err(Error::InvalidConfig(format!("eigenpair count must be in 1..=20, got {k}")));
    }
    if model.kind == ModelKind::GoldmanKrivchenko && grid.x_min <= 0.0 {
        return Err(Error::InvalidConfig("Model B grid must have x_min > 0".into()));
    }
    let t = invariant_matrix(model, grid);
    let h = grid.spacing();
    Ok((0..k)
        .map(|j| {
            let lambda = t.eigenvalue(j);
            let mut v = t.eigenvector(lambda);
            let s = 1.0 / h.sqrt();
            v.iter_mut().for_each(|x| *x *= s);
            // fix the sign: positive in the far-right lobe
            let last = v.iter().rev().find(|x| x.abs() > 1e-8).copied().unwrap_or(1.0);
            if last < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (lambda, v)
        })
        .collect())
}

/// Eigenvalue certified by grid refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    /// Richardson extrapolation (4λ_fine − λ_coarse)/3.
    pub lambda: f64,
    /// Value on the finer grid.
    pub raw: f64,
    /// |λ_fine − λ_coarse|/3, the O(h²) error estimate of the raw value.
    pub error: f64,
}

/// Eigenvalues of Î on `grid` and on its refinement, extrapolated in h².
pub fn certified_eigenvalues(model: &ModelConfig, grid: &Grid, k: usize) -> Result<Vec<Certified>> {
    let coarse = diagonalize_invariant(model, grid, k)?;
    // Model B grids sit at x_i = i·h, so the refinement also halves x_min
    let fine_grid = if model.kind == ModelKind::GoldmanKrivchenko && (grid.x_min - grid.spacing()).abs() < 1e-12 * grid.x_max {
        Grid {
            x_min: 0.5 * grid.x_min,
            x_max: grid.x_max,
            n: 2 * grid.n,
        }
    } else {
        grid.refined()
    };
    let fine = diagonalize_invariant(model, &fine_grid, k)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|((lc, _), (lf, _))| {
            let c = Certified {
                lambda: (4.0 * lf - lc) / 3.0,
                raw: *lf,
                error: (lf - lc).abs() / 3.0,
            };
            if c.error > 1e-6 * c.lambda.abs().max(model.hbar * model.invariant_frequency()) {
                warn!("grid too coarse: eigenvalue {} carries an O(h^2) error of {:e}", c.raw, c.error);
            }
            c
        })
        .collect())
}

/// Eigenstate whose ξ-profile is the grid eigenvector of Î.
pub fn oracle_state(model: &ModelConfig, n: usize, grid: &Grid) -> Result<Eigenstate> {
    let mut pairs = diagonalize_invariant(model, grid, n + 1)?;
    let (lambda, values) = pairs.pop().expect("n + 1 pairs requested");
    let profile = Profile::Sampled {
        xi_min: grid.x_min,
        h: grid.spacing(),
        values,
    };
    Eigenstate::new(*model, n, lambda, Method::Oracle, profile)
}

/// Diagonal of H(t) on a lab-frame grid (kinetic part included).
fn hamiltonian_diagonal(model: &ModelConfig, grid: &Grid, t: f64) -> Result<(Vec<f64>, f64)> {
    let ep = model.ep()?;
    let h = grid.spacing();
    let k = model.hbar * model.hbar / (2.0 * model.m * h * h);
    // V(x,t) = q x² + l x + g/x², with the time dependence sampled once
    let s2 = ep.sigma_squared(t);
    let base = 0.5 * model.m * model.omega * model.omega;
    let (q, l, g) = match model.kind {
        ModelKind::StarkQuadratic => (base + model.c_kappa / (s2 * s2), ep.field_e(t), 0.0),
        ModelKind::GoldmanKrivchenko => (base + model.e0 / (s2 * s2), 0.0, 0.5 * model.m * model.barrier_omega2()),
    };
    let d = grid
        .points()
        .map(|x| 2.0 * k + q * x * x + l * x + if g != 0.0 { g / (x * x) } else { 0.0 })
        .collect();
    Ok((d, -k))
}

/// H(t)ψ on the grid.
pub fn apply_hamiltonian(model: &ModelConfig, state: &WaveSample) -> Result<Vec<Complex64>> {
    let (d, e) = hamiltonian_diagonal(model, &state.grid, state.t)?;
    let v = &state.values;
    let n = v.len();
    Ok((0..n)
        .map(|i| {
            let left = if i > 0 { v[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n { v[i + 1] } else { Complex64::new(0.0, 0.0) };
            v[i] * d[i] + (left + right) * e
        })
        .collect())
}

/// One Crank–Nicolson step (1 + iΔtH/2ħ)ψ′ = (1 − iΔtH/2ħ)ψ with H sampled
/// at the midpoint time t + Δt/2.
pub fn crank_nicolson_step(model: &ModelConfig, state: &WaveSample, dt: f64) -> Result<WaveSample> {
    let grid = state.grid;
    let (d, e) = hamiltonian_diagonal(model, &grid, state.t + 0.5 * dt)?;
    let a = Complex64::new(0.0, 0.5 * dt / model.hbar);
    let v = &state.values;
    let n = v.len();
    let zero = Complex64::new(0.0, 0.0);
    let rhs: Vec<Complex64> = (0..n)
        .map(|i| {
            let left = if i > 0 { v[i - 1] } else { zero };
            let right = if i + 1 < n { v[i + 1] } else { zero };
            v[i] - a * (v[i] * d[i] + (left + right) * e)
        })
        .collect();
    let off = a * e;
    let diag: Vec<Complex64> = d.iter().map(|&di| Complex64::new(1.0, 0.0) + a * di).collect();
    Ok(WaveSample {
        grid,
        values: solve_complex_tridiagonal(off, &diag, &rhs),
        t: state.t + dt,
    })
}

/// Thomas algorithm for a tridiagonal system with constant off-diagonal.
fn solve_complex_tridiagonal(off: Complex64, diag: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    c[0] = off / diag[0];
    y[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - off * c[i - 1];
        c[i] = off / den;
        y[i] = (rhs[i] - off * y[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        let next = y[i + 1];
        y[i] -= c[i] * next;
    }
    y
}

/// Repeated Crank–Nicolson steps of size ≤ dt up to time t_end.
pub fn propagate(model: &ModelConfig, state: &WaveSample, t_end: f64, dt: f64) -> Result<WaveSample> {
    let span = t_end - state.t;
    let steps = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut cur = state.clone();
    for _ in 0..steps {
        cur = crank_nicolson_step(model, &cur, h)?;
    }
    cur.t = t_end;
    Ok(cur)
}

/// ‖iħ∂ₜψ − H(t)ψ‖/‖ψ‖ on the grid, ∂ₜ by 4th-order central differences
/// with step 1e-4 and H by the 3-point grid action.
pub fn tdse_residual(
    model: &ModelConfig,
    mut psi: impl FnMut(f64, f64) -> Result<Complex64>,
    t: f64,
    grid: &Grid,
) -> Result<f64> {
    let ht = 1e-4;
    let mut sample = |tt: f64| WaveSample::from_fn(*grid, tt, |x| psi(x, tt));
    let now = sample(t)?;
    let (p1, m1, p2, m2) = (sample(t + ht)?, sample(t - ht)?, sample(t + 2.0 * ht)?, sample(t - 2.0 * ht)?);
    let hpsi = apply_hamiltonian(model, &now)?;
    let ih = Complex64::new(0.0, model.hbar);
    let h = grid.spacing();
    let mut num = 0.0;
    for i in 0..grid.n {
        let dt = (m2.values[i] - p2.values[i] + (p1.values[i] - m1.values[i]) * 8.0) / (12.0 * ht);
        num += (ih * dt - hpsi[i]).norm_sqr();
    }
    Ok((num * h).sqrt() / now.norm())
}
