use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::{CsrMatrix, DiscreteLinearSystem, Step, TimeGrid};
use crate::error::{domain, Error, Result};
use crate::scalar_oracle::Coefficient;
use crate::Series;

/// Time stepping for `y' = f y + g u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OdeScheme {
    /// `y_{k+1} = (y_k + dt g(t_{k+1}) u_k) / (1 - dt f(t_{k+1}))`
    #[default]
    ImplicitEuler,
    /// Crank–Nicolson in the state, midpoint in the control:
    /// `(1 - dt f_{k+1}/2) y_{k+1} = (1 + dt f_k/2) y_k + dt g(t_k + dt/2) u_k`
    Trapezoidal,
}

pub fn from_scalar_ode(
    f: &Coefficient,
    g: &Coefficient,
    grid: TimeGrid,
    alpha: f64,
    scheme: OdeScheme,
) -> Result<DiscreteLinearSystem> {
    f.validate()?;
    g.validate()?;
    if !alpha.is_finite() {
        return Err(domain("initial state must be finite"));
    }
    let dt = grid.dt();
    let mut steps = Vec::with_capacity(grid.steps());
    for k in 0..grid.steps() {
        let t1 = grid.time(k + 1);
        let (a, b) = match scheme {
            OdeScheme::ImplicitEuler => {
                let value = dt * f.eval(t1);
                if value >= 1.0 {
                    return Err(Error::Stability {
                        node: k + 1,
                        value,
                        limit: 1.0,
                    });
                }
                let denom = 1.0 - value;
                (1.0 / denom, dt * g.eval(t1) / denom)
            }
            OdeScheme::Trapezoidal => {
                let value = dt * f.eval(t1);
                if value >= 2.0 {
                    return Err(Error::Stability {
                        node: k + 1,
                        value,
                        limit: 2.0,
                    });
                }
                let denom = 1.0 - 0.5 * value;
                let t0 = grid.time(k);
                (
                    (1.0 + 0.5 * dt * f.eval(t0)) / denom,
                    dt * g.eval(0.5 * (t0 + t1)) / denom,
                )
            }
        };
        steps.push(Step {
            a: CsrMatrix::from_triplets(1, 1, &[(0, 0, a)]),
            b: CsrMatrix::from_triplets(1, 1, &[(0, 0, b)]),
            offset: None,
        });
    }
    DiscreteLinearSystem::new(grid, vec![alpha], steps)
}

/// Boundary conditions of the diagonal 2×2 system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Boundary {
    /// `r₊(t, 0) = u(t)`, `r₋(t, L) = r_minus_right`.
    Dirichlet { r_minus_right: f64 },
    /// Riemann form of `y_tt = y_xx` with `y(t, 0) = 0` and
    /// `y_x(t, L) = u(t)`, where `r₊ = y_t - y_x`, `r₋ = y_t + y_x`:
    /// `r₊(t, 0) = -r₋(t, 0)` and `r₋(t, L) = r₊(t, L) + 2u(t)`.
    WaveNeumann,
}

/// `r_t + D r_x = η₀ M r` on `[0, L]` with `D = diag(d₊, d₋)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperbolicParams {
    pub d_plus: f64,
    pub d_minus: f64,
    pub eta0: f64,
    /// One 2×2 row-major matrix per cell, or a single matrix for all cells.
    pub coupling: Vec<[[f64; 2]; 2]>,
    pub length: f64,
    pub cells: usize,
    pub boundary: Boundary,
}

impl HyperbolicParams {
    /// `y_tt = y_xx` on `[0, 1]` in Riemann variables.
    pub fn wave(cells: usize) -> Self {
        HyperbolicParams {
            d_plus: 1.0,
            d_minus: -1.0,
            eta0: 0.0,
            coupling: vec![[[0.0; 2]; 2]],
            length: 1.0,
            cells,
            boundary: Boundary::WaveNeumann,
        }
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Step size that puts the faster characteristic at CFL 1.
    pub fn required_dt(&self) -> f64 {
        self.dx() / self.d_plus.max(-self.d_minus)
    }

    /// Grid with the CFL-1 step and `steps` steps.
    pub fn grid(&self, steps: usize) -> Result<TimeGrid> {
        TimeGrid::new(self.required_dt() * steps as f64, steps)
    }

    fn validate(&self) -> Result<()> {
        if !(self.d_plus > 0.0 && self.d_minus < 0.0) {
            return Err(domain(format!(
                "need d_plus > 0 > d_minus, got {} and {}",
                self.d_plus, self.d_minus
            )));
        }
        if !(self.eta0 <= 0.0) {
            return Err(domain(format!("eta0 must be <= 0, got {}", self.eta0)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) || self.cells == 0 {
            return Err(domain("length must be positive and cells >= 1"));
        }
        if self.coupling.len() != 1 && self.coupling.len() != self.cells {
            return Err(domain(format!(
                "coupling needs 1 or {} matrices, got {}",
                self.cells,
                self.coupling.len()
            )));
        }
        for (i, m) in self.coupling.iter().enumerate() {
            let s = 0.5 * (m[0][1] + m[1][0]);
            let (a, d) = (m[0][0], m[1][1]);
            let tol = 1e-12 * (a.abs() + d.abs() + s.abs()).max(1.0);
            if !(a >= -tol && d >= -tol && a * d - s * s >= -tol) {
                return Err(domain(format!(
                    "coupling matrix of cell {i} is not positive semidefinite"
                )));
            }
        }
        Ok(())
    }
}

/// State layout: `r₊` at `x_1..x_nx` in entries `0..nx`, `r₋` at
/// `x_0..x_{nx-1}` in entries `nx..2nx`. Cell `i` couples entries `i` and
/// `nx + i`. The faster characteristic moves exactly one cell per step; the
/// slower one uses linear interpolation. The source is applied implicitly
/// after transport. The state weight is `Δx` and `x0 = 0`.
pub fn from_diag_hyperbolic(p: &HyperbolicParams, grid: TimeGrid) -> Result<DiscreteLinearSystem> {
    p.validate()?;
    let required = p.required_dt();
    if (grid.dt() - required).abs() > 1e-9 * required {
        return Err(Error::Cfl {
            required,
            actual: grid.dt(),
        });
    }
    let nx = p.cells;
    let dt = grid.dt();
    let nu_p = (p.d_plus * dt / p.dx()).min(1.0);
    let nu_m = (-p.d_minus * dt / p.dx()).min(1.0);

    let mut t = DMatrix::<f64>::zeros(2 * nx, 2 * nx);
    let mut b = DMatrix::<f64>::zeros(2 * nx, 1);
    let mut c = vec![0.0; 2 * nx];
    for i in 0..nx {
        t[(i, i)] += 1.0 - nu_p;
        if i > 0 {
            t[(i, i - 1)] += nu_p;
        } else {
            match p.boundary {
                Boundary::Dirichlet { .. } => b[(0, 0)] += nu_p,
                Boundary::WaveNeumann => t[(0, nx)] -= nu_p,
            }
        }
        let r = nx + i;
        t[(r, r)] += 1.0 - nu_m;
        if i + 1 < nx {
            t[(r, r + 1)] += nu_m;
        } else {
            match p.boundary {
                Boundary::Dirichlet { r_minus_right } => c[r] += nu_m * r_minus_right,
                Boundary::WaveNeumann => {
                    t[(r, nx - 1)] += nu_m;
                    b[(r, 0)] += 2.0 * nu_m;
                }
            }
        }
    }

    let mut source_inv = DMatrix::<f64>::identity(2 * nx, 2 * nx);
    if p.eta0 != 0.0 {
        for i in 0..nx {
            let m = p.coupling[if p.coupling.len() == 1 { 0 } else { i }];
            let local = Matrix2::new(
                1.0 - dt * p.eta0 * m[0][0],
                -dt * p.eta0 * m[0][1],
                -dt * p.eta0 * m[1][0],
                1.0 - dt * p.eta0 * m[1][1],
            );
            let inv = local
                .try_inverse()
                .ok_or_else(|| domain(format!("implicit source step singular in cell {i}")))?;
            let idx = [i, nx + i];
            for (a, &ra) in idx.iter().enumerate() {
                for (bb, &rb) in idx.iter().enumerate() {
                    source_inv[(ra, rb)] = inv[(a, bb)];
                }
            }
        }
    }

    let a = &source_inv * &t;
    let b = &source_inv * &b;
    let offset = matches!(p.boundary, Boundary::Dirichlet { .. }).then(|| {
        (&source_inv * DMatrix::from_column_slice(2 * nx, 1, &c))
            .as_slice()
            .to_vec()
    });
    let step = Step {
        a: CsrMatrix::from_dense(&a),
        b: CsrMatrix::from_dense(&b),
        offset,
    };
    DiscreteLinearSystem::time_invariant(grid, vec![0.0; 2 * nx], step)?.with_state_weight(p.dx())
}

/// Displacement `y(t_k, x_j)`, `j = 0..nx`, recovered from a trajectory of
/// the wave system by trapezoidal time integration of `y_t = (r₊ + r₋)/2`
/// from `y(0, ·) = 0`.
pub fn wave_displacement(x: &Series, u: &Series, cells: usize, dt: f64) -> Result<Series> {
    let nx = cells;
    if x.dim() != 2 * nx || u.len() + 1 != x.len() || u.dim() != 1 {
        return Err(Error::Dimension {
            step: 0,
            detail: format!(
                "wave trajectory {}x{} and controls {}x{} do not match {nx} cells",
                x.len(),
                x.dim(),
                u.len(),
                u.dim()
            ),
        });
    }
    let velocity = |k: usize| -> Vec<f64> {
        let s = x.node(k);
        let mut v = vec![0.0; nx + 1];
        for (j, vj) in v.iter_mut().enumerate().skip(1) {
            let q = s[j - 1];
            *vj = if j < nx {
                0.5 * (q + s[nx + j])
            } else {
                q + u.node(k.min(u.len() - 1))[0]
            };
        }
        v
    };
    let mut y = Series::zeros(x.len(), nx + 1);
    let mut prev = velocity(0);
    for k in 1..x.len() {
        let cur = velocity(k);
        let (done, rest) = y.as_mut_slice().split_at_mut(k * (nx + 1));
        let last = &done[(k - 1) * (nx + 1)..];
        for j in 0..=nx {
            rest[j] = last[j] + 0.5 * dt * (prev[j] + cur[j]);
        }
        prev = cur;
    }
    Ok(y)
}

/// Second-order leapfrog for `y_tt = y_xx` on `[0, 1]` with `y(t, 0) = 0`,
/// `y_x(t, 1) = u(t)`, starting from rest, at `dt = Δx`. Returns the nodal
/// displacement at every step.
pub fn leapfrog_wave(u: impl Fn(f64) -> f64, cells: usize, steps: usize) -> Series {
    let nx = cells;
    let h = 1.0 / nx as f64;
    let lap = |y: &[f64], t: f64| -> Vec<f64> {
        let mut l = vec![0.0; nx + 1];
        for j in 1..=nx {
            let right = if j < nx { y[j + 1] } else { y[nx - 1] + 2.0 * h * u(t) };
            l[j] = right - 2.0 * y[j] + y[j - 1];
        }
        l
    };
    let mut out = Series::zeros(steps + 1, nx + 1);
    let y0 = vec![0.0; nx + 1];
    let l0 = lap(&y0, 0.0);
    let mut y1: Vec<f64> = (0..=nx).map(|j| y0[j] + 0.5 * l0[j]).collect();
    y1[0] = 0.0;
    if steps >= 1 {
        out.node_mut(1).copy_from_slice(&y1);
    }
    let mut prev = y0;
    for k in 1..steps {
        let l = lap(&y1, k as f64 * h);
        let mut next: Vec<f64> = (0..=nx).map(|j| 2.0 * y1[j] - prev[j] + l[j]).collect();
        next[0] = 0.0;
        out.node_mut(k + 1).copy_from_slice(&next);
        prev = std::mem::replace(&mut y1, next);
    }
    out
}
