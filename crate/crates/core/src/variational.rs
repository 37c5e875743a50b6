//! Action and Nehari functionals, the Nehari-projected gradient flow, and the
//! explicit competitors behind the existence thresholds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{assemble_hamiltonian, norms, pde_residual, BorderedOperator, GraphFunction, GraphParams};
use crate::phase::PhasePoint;
use crate::states::{boundary_distances, classify, ShapeClass, DEFAULT_TOL};

/// Action of the soliton on the line, `(4/3) ω^{3/2}`.
pub fn line_action(omega: f64) -> f64 {
    4.0 / 3.0 * omega.powf(1.5)
}

/// `S(v) = ½Q(v) + (ω/2)‖v‖² - ¼‖v‖⁴₄`.
pub fn action(v: &GraphFunction, params: &GraphParams) -> Result<f64> {
    let n = norms(v, params)?;
    Ok(0.5 * n.quadratic_form(params.gamma) + 0.5 * params.omega * n.l2_sq - 0.25 * n.l4_4)
}

/// `I(v) = Q(v) + ω‖v‖² - ‖v‖⁴₄`.
pub fn nehari(v: &GraphFunction, params: &GraphParams) -> Result<f64> {
    let n = norms(v, params)?;
    Ok(n.quadratic_form(params.gamma) + params.omega * n.l2_sq - n.l4_4)
}

/// Scaling `t > 0` with `I(t v) = 0`.
pub fn nehari_scale(v: &GraphFunction, params: &GraphParams) -> Result<f64> {
    let n = norms(v, params)?;
    if n.l4_4 == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let quad = n.quadratic_form(params.gamma) + params.omega * n.l2_sq;
    if !(quad > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Q(v) + omega |v|^2 = {quad} is not positive, no Nehari scaling"
        )));
    }
    Ok((quad / n.l4_4).sqrt())
}

pub fn nehari_project(v: &GraphFunction, params: &GraphParams) -> Result<GraphFunction> {
    let t = nehari_scale(v, params)?;
    Ok(if t == 1.0 { v.clone() } else { v.scaled(t) })
}

/// One semi-implicit step `(M + dt(A + ωM - M u²)) ũ = M u` followed by the
/// Nehari projection.
pub fn gradient_flow_step(
    u: &GraphFunction,
    dt: f64,
    params: &GraphParams,
    op: &BorderedOperator,
) -> Result<GraphFunction> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    u.check_grid(params)?;
    let x = u.to_unknowns();
    let w = params.omega;
    let d: Vec<f64> = x
        .iter()
        .zip(&op.mass)
        .map(|(xi, m)| m * (1.0 + dt * (w - xi * xi)))
        .collect();
    let rhs: Vec<f64> = x.iter().zip(&op.mass).map(|(xi, m)| m * xi).collect();
    let y = op.combine(dt, &d).solve(&rhs)?;
    nehari_project(&GraphFunction::from_unknowns(params, &y), params)
}

/// `cos(πx/2L)` on the loop, zero on the half-line.
pub fn initial_datum(params: &GraphParams) -> GraphFunction {
    let l = params.l;
    let k = std::f64::consts::PI / (2.0 * l);
    let mut loop_values: Vec<f64> = (0..=params.n_loop).map(|j| (k * params.loop_x(j)).cos()).collect();
    // cos(±π/2) is not exactly zero in floating point
    loop_values[0] = 0.0;
    loop_values[params.n_loop] = 0.0;
    GraphFunction::new(loop_values, vec![0.0; params.n_tail + 1]).expect("finite values")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub dt: f64,
    pub max_iter: usize,
    /// Threshold on `‖u_{n+1} - u_n‖² / ‖u_n‖²`.
    pub tol: f64,
    /// Smallest step before the flow gives up.
    pub dt_min: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            dt: 10.0,
            max_iter: 5000,
            tol: 1e-7,
            dt_min: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub action: f64,
    pub nehari: f64,
    pub relative_change: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_relative_change: f64,
    pub action: f64,
    pub nehari_residual: f64,
    pub pde_residual: f64,
    pub boundary_point: PhasePoint,
    /// Distance of the boundary point to the closest Γ-subset.
    pub gamma_distance: f64,
    /// `None` when the boundary point is off the curve.
    pub shape: Option<ShapeClass>,
    pub final_dt: f64,
    pub params: GraphParams,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub state: GraphFunction,
    pub report: SolveReport,
    pub history: Vec<HistoryRow>,
}

fn l2_sq(v: &GraphFunction, params: &GraphParams) -> Result<f64> {
    Ok(norms(v, params)?.l2_sq)
}

/// Gradient flow from [`initial_datum`] until the relative squared change
/// drops below `opts.tol`. Returns the last iterate either way; check
/// `report.converged`.
pub fn solve_ground_state(params: &GraphParams, opts: &SolveOptions) -> Result<Solution> {
    solve_from(initial_datum(params), params, opts)
}

pub fn solve_from(u0: GraphFunction, params: &GraphParams, opts: &SolveOptions) -> Result<Solution> {
    let op = assemble_hamiltonian(params)?;
    let mut u = nehari_project(&u0, params)?;
    let mut s = action(&u, params)?;
    let mut dt = opts.dt;
    let mut history = Vec::new();
    let mut change = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let next = match gradient_flow_step(&u, dt, params, &op) {
            Ok(v) => v,
            Err(Error::SingularSystem(_)) if dt / 2.0 >= opts.dt_min => {
                dt /= 2.0;
                continue;
            }
            Err(e) => return Err(e),
        };
        let s_next = action(&next, params)?;
        if s_next > s + 1e-12 * s.abs().max(1.0) && dt / 2.0 >= opts.dt_min {
            dt /= 2.0;
            continue;
        }
        let next = if next.min_value() < -1e-10 { next.map(f64::abs) } else { next };
        change = l2_sq(&next.axpby(1.0, &u, -1.0), params)? / l2_sq(&u, params)?;
        u = next;
        s = action(&u, params)?;
        iterations += 1;
        history.push(HistoryRow {
            iteration: iterations,
            action: s,
            nehari: nehari(&u, params)?,
            relative_change: change,
            dt,
        });
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    let (boundary_point, distances) = boundary_distances(&u, params);
    let report = SolveReport {
        converged,
        iterations,
        final_relative_change: change,
        action: s,
        nehari_residual: nehari(&u, params)?,
        pde_residual: pde_residual(&u, params)?,
        boundary_point,
        gamma_distance: distances.to_curve(),
        shape: classify(&u, params, DEFAULT_TOL).ok(),
        final_dt: dt,
        params: *params,
    };
    Ok(Solution { state: u, report, history })
}

/// Length thresholds for the explicit competitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceThresholds {
    /// `((2-√3)ω^{3/2} - 2γ³)/(6ω²)`; `None` outside its range of validity.
    pub l_star: Option<f64>,
    /// `artanh(γ/√ω)/√ω`; `None` for `γ ≥ √ω`.
    pub l_double_star: Option<f64>,
    /// `0 < γ < ((2-√3)/2)^{1/3} √ω`.
    pub criterion_gamma_small: bool,
    /// `0 < γ < √ω`.
    pub criterion_gamma_large: bool,
}

impl ExistenceThresholds {
    /// Whether one of the competitors certifies a minimizer at length `l`.
    pub fn certifies(&self, l: f64) -> bool {
        self.l_star.is_some_and(|s| l < s) || self.l_double_star.is_some_and(|s| l >= s)
    }
}

pub fn existence_thresholds(omega: f64, gamma: f64) -> Result<ExistenceThresholds> {
    if !(omega > 0.0 && omega.is_finite()) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("omega = {omega}, gamma = {gamma}")));
    }
    let sw = omega.sqrt();
    let small = gamma > 0.0 && gamma < ((2.0 - 3f64.sqrt()) / 2.0).cbrt() * sw;
    let large = gamma > 0.0 && gamma < sw;
    let l_star = small.then(|| ((2.0 - 3f64.sqrt()) * omega.powf(1.5) - 2.0 * gamma.powi(3)) / (6.0 * omega * omega));
    let l_double_star = large.then(|| (gamma / sw).atanh() / sw);
    Ok(ExistenceThresholds {
        l_star,
        l_double_star,
        criterion_gamma_small: small,
        criterion_gamma_large: large,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Candidate {
    /// Constant loop with the Robin-shifted soliton tail.
    SmallL,
    /// Soliton centered on the loop, continued on the half-line.
    LargeL,
}

/// Samples the competitor on the grid; the node at `R` is set to zero.
pub fn candidate(which: Candidate, params: &GraphParams) -> Result<GraphFunction> {
    let (w, g, l) = (params.omega, params.gamma, params.l);
    let sw = w.sqrt();
    let top = (2.0 * w).sqrt();
    let v = match which {
        Candidate::SmallL => {
            if !(g * g < w) {
                return Err(Error::InvalidParameter(format!("need gamma^2 < omega, got gamma = {g}")));
            }
            let c = (2.0 * (w - g * g)).sqrt();
            let b = (g / sw).atanh();
            GraphFunction::from_fn(params, |_| c, |x| top / (sw * x - b).cosh())
        }
        Candidate::LargeL => GraphFunction::from_fn(params, |x| top / (sw * x).cosh(), |x| top / (sw * (x + l)).cosh()),
    };
    let mut tail = v.tail_values().to_vec();
    *tail.last_mut().expect("non-empty tail") = 0.0;
    GraphFunction::new(v.loop_values().to_vec(), tail)
}

/// Closed-form Nehari value of the small-L competitor.
pub fn candidate_small_nehari(omega: f64, gamma: f64, l: f64) -> f64 {
    -4.0 * l * (omega - gamma * gamma) * (omega - 2.0 * gamma * gamma)
}

/// Closed-form Nehari value of the large-L competitor.
pub fn candidate_large_nehari(omega: f64, gamma: f64, l: f64) -> f64 {
    let t = (omega.sqrt() * l).tanh();
    2.0 * gamma * (1.0 - t * t) * omega - 2.0 * t * (1.0 - t * t) * omega.powf(1.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: f64,
    pub converged: bool,
    pub iterations: usize,
    pub action: f64,
    pub p: f64,
    pub q: f64,
    pub gamma_distance: f64,
    pub shape: Option<ShapeClass>,
    pub error: Option<String>,
}

/// One ground-state solve per length, in parallel; rows keep the input
/// order. `grid` builds the discretization for each length.
pub fn sweep(
    lengths: &[f64],
    grid: impl Fn(f64) -> Result<GraphParams> + Sync,
    opts: &SolveOptions,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let run = |l: f64| -> SweepRow {
        let outcome = grid(l).and_then(|p| solve_ground_state(&p, opts));
        match outcome {
            Ok(sol) => SweepRow {
                l,
                converged: sol.report.converged,
                iterations: sol.report.iterations,
                action: sol.report.action,
                p: sol.report.boundary_point.p,
                q: sol.report.boundary_point.q,
                gamma_distance: sol.report.gamma_distance,
                shape: sol.report.shape,
                error: None,
            },
            Err(e) => SweepRow {
                l,
                converged: false,
                iterations: 0,
                action: f64::NAN,
                p: f64::NAN,
                q: f64::NAN,
                gamma_distance: f64::NAN,
                shape: None,
                error: Some(e.to_string()),
            },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| lengths.par_iter().map(|&l| run(l)).collect()))
}

/// Whether consecutive sweep points move monotonically along Γ from the
/// junction towards the origin (arc parameter non-decreasing in `L`),
/// ignoring failed rows.
pub fn monotone_along_gamma(rows: &[SweepRow], omega: f64, gamma: f64, slack: f64) -> bool {
    let s: Vec<f64> = rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| crate::phase::gamma_arc_parameter(PhasePoint::new(r.p, r.q), omega, gamma))
        .collect();
    s.windows(2).all(|w| w[1] >= w[0] - slack)
}
