//! Spectrum of the δ-coupled Laplacian on the tadpole: the negative
//! eigenvalue for attractive coupling, the embedded eigenvalues `(kπ/L)²`,
//! and the resolvent through its Green's function.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{assemble_hamiltonian, Edge, GraphFunction, GraphParams, GraphPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub essential_min: f64,
    /// The negative eigenvalue, present iff `γ < 0`.
    pub discrete: Option<f64>,
    /// `|m(2 tanh(mL) + 1) + γ|` at `m = √|λ|`.
    pub discrete_residual: Option<f64>,
    pub pi_eigenvalues: Vec<f64>,
}

/// `m (2 tanh(mL) + 1)`, strictly increasing in `m ≥ 0`.
pub fn eigen_profile(m: f64, l: f64) -> f64 {
    m * (2.0 * (m * l).tanh() + 1.0)
}

/// The unique negative eigenvalue, by bisection in `m = √|λ|` on
/// `[|γ|/3, |γ|]`.
pub fn negative_eigenvalue(gamma: f64, l: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("L = {l} must be positive")));
    }
    if !(gamma < 0.0) {
        return Err(Error::NoDiscreteSpectrum);
    }
    let g = -gamma;
    let (mut lo, mut hi) = (g / 3.0, g);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eigen_profile(mid, l) < g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = 0.5 * (lo + hi);
    Ok(-m * m)
}

/// `(kπ/L)²` for `k = 1..=k_max`.
pub fn pi_eigenvalues(l: f64, k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| (k as f64 * PI / l).powi(2)).collect()
}

/// Largest `k` with `(kπ/L)² ≤ 100ω`.
pub fn default_k_max(l: f64, omega: f64) -> usize {
    (10.0 * omega.sqrt() * l / PI).floor() as usize
}

/// `sin(kπx/L)` on the loop, zero on the half-line: an eigenfunction for
/// `(kπ/L)²` that vanishes at the vertex.
pub fn pi_eigenfunction(k: usize, params: &GraphParams) -> GraphFunction {
    let w = k as f64 * PI / params.l;
    let mut f = GraphFunction::from_fn(params, |x| (w * x).sin(), |_| 0.0);
    // sin(±kπ) is not exactly zero in floating point
    let mut c = f.loop_values().to_vec();
    c[0] = 0.0;
    *c.last_mut().expect("non-empty loop") = 0.0;
    f = GraphFunction::new(c, f.tail_values().to_vec()).expect("finite values");
    f
}

pub fn spectrum(gamma: f64, l: f64, k_max: usize) -> Result<SpectrumResult> {
    let discrete = match negative_eigenvalue(gamma, l) {
        Ok(v) => Some(v),
        Err(Error::NoDiscreteSpectrum) => None,
        Err(e) => return Err(e),
    };
    let discrete_residual = discrete.map(|v| (eigen_profile((-v).sqrt(), l) + gamma).abs());
    Ok(SpectrumResult {
        essential_min: 0.0,
        discrete,
        discrete_residual,
        pi_eigenvalues: pi_eigenvalues(l, k_max),
    })
}

/// Kernel of `(H_γ - λ)⁻¹` for `λ < 0` on the untruncated graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensFunction {
    m: f64,
    l: f64,
    den: f64,
}

impl GreensFunction {
    pub fn new(lambda: f64, gamma: f64, l: f64) -> Result<Self> {
        if !(lambda < 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be negative")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter(format!("L = {l} must be positive")));
        }
        let m = (-lambda).sqrt();
        let den = gamma + eigen_profile(m, l);
        if den.abs() <= 1e-12 * (gamma.abs() + m) {
            return Err(Error::ResolventPole(lambda));
        }
        Ok(Self { m, l, den })
    }

    /// Value at the vertex of `G(·, ξ)`.
    fn vertex_value(&self, xi: GraphPoint) -> f64 {
        let (m, l) = (self.m, self.l);
        match xi.edge {
            Edge::Loop => (m * xi.x).cosh() / ((m * l).cosh() * self.den),
            Edge::Tail => (-m * xi.x).exp() / self.den,
        }
    }

    /// `G(x, ξ)`.
    pub fn eval(&self, x: GraphPoint, xi: GraphPoint) -> f64 {
        let (m, l) = (self.m, self.l);
        let v = self.vertex_value(xi);
        let free = |a: f64, b: f64| (-m * (a - b).abs()).exp() / (2.0 * m);
        match (x.edge, xi.edge) {
            (Edge::Loop, Edge::Loop) => {
                let e = (-m * l).exp();
                let c1 = (v - e * (m * xi.x).cosh() / (2.0 * m)) / (m * l).cosh();
                let c2 = -e * (m * xi.x).sinh() / (2.0 * m * (m * l).sinh());
                free(x.x, xi.x) + c1 * (m * x.x).cosh() + c2 * (m * x.x).sinh()
            }
            (Edge::Tail, Edge::Loop) => v * (-m * x.x).exp(),
            (Edge::Loop, Edge::Tail) => v * (m * x.x).cosh() / (m * l).cosh(),
            (Edge::Tail, Edge::Tail) => {
                free(x.x, xi.x) + (v - (-m * xi.x).exp() / (2.0 * m)) * (-m * x.x).exp()
            }
        }
    }
}

pub fn greens_function(x: GraphPoint, xi: GraphPoint, lambda: f64, gamma: f64, l: f64) -> Result<f64> {
    Ok(GreensFunction::new(lambda, gamma, l)?.eval(x, xi))
}

/// `u = ∫ G(·, ξ) f(ξ) dξ` on the grid by the trapezoid rule over both edges
/// (the half-line integral is cut at `R`). Costs `O(N²)`.
pub fn resolvent_apply(f: &GraphFunction, lambda: f64, params: &GraphParams) -> Result<GraphFunction> {
    f.check_grid(params)?;
    let g = GreensFunction::new(lambda, params.gamma, params.l)?;
    let h = params.h;
    let trap = |i: usize, n: usize| if i == 0 || i == n { 0.5 * h } else { h };
    let mut sources = Vec::with_capacity(params.n_loop + params.n_tail + 2);
    for (j, &fv) in f.loop_values().iter().enumerate() {
        sources.push((GraphPoint::on_loop(params.loop_x(j)), trap(j, params.n_loop) * fv));
    }
    for (i, &fv) in f.tail_values().iter().enumerate() {
        sources.push((GraphPoint::on_tail(params.tail_x(i)), trap(i, params.n_tail) * fv));
    }
    let sources: Vec<_> = sources.into_iter().filter(|s| s.1 != 0.0).collect();
    let eval = |x: GraphPoint| sources.iter().map(|&(xi, w)| w * g.eval(x, xi)).sum::<f64>();
    let loop_values: Vec<f64> = (0..=params.n_loop).map(|j| eval(GraphPoint::on_loop(params.loop_x(j)))).collect();
    let mut tail_values: Vec<f64> = (0..=params.n_tail).map(|i| eval(GraphPoint::on_tail(params.tail_x(i)))).collect();
    // the three evaluations of the vertex agree only up to rounding
    tail_values[0] = loop_values[0];
    let last = params.n_loop;
    let mut loop_values = loop_values;
    loop_values[last] = loop_values[0];
    GraphFunction::new(loop_values, tail_values)
}

/// Discrete counterpart: `(A - λM) u = M f` with the bordered solver.
pub fn resolvent_solve(f: &GraphFunction, lambda: f64, params: &GraphParams) -> Result<GraphFunction> {
    f.check_grid(params)?;
    let op = assemble_hamiltonian(params)?;
    let rhs: Vec<f64> = f.to_unknowns().iter().zip(&op.mass).map(|(v, m)| v * m).collect();
    let x = op.shifted(lambda).solve(&rhs)?;
    Ok(GraphFunction::from_unknowns(params, &x))
}

/// Number of eigenvalues of the discrete operator below `sigma`.
pub fn discrete_count_below(params: &GraphParams, sigma: f64) -> Result<usize> {
    let op = assemble_hamiltonian(params)?;
    Ok(op.shifted(sigma).factor()?.negative_count())
}

/// Smallest eigenvalue of the discrete operator, by shifted inverse
/// iteration started from `e^{-x}`-like data; `shift` must lie below it.
pub fn discrete_lowest_eigenvalue(params: &GraphParams, shift: f64) -> Result<f64> {
    let op = assemble_hamiltonian(params)?;
    let factor = op.shifted(shift).factor()?;
    if factor.negative_count() != 0 {
        return Err(Error::InvalidParameter(format!("shift {shift} is not below the spectrum")));
    }
    let init = GraphFunction::from_fn(params, |_| 1.0, |x| (-x).exp());
    let mut x = init.to_unknowns();
    let mut mu = op.rayleigh(&x);
    for _ in 0..10_000 {
        let rhs: Vec<f64> = x.iter().zip(&op.mass).map(|(v, m)| v * m).collect();
        let mut y = factor.solve(&rhs);
        let norm = y.iter().zip(&op.mass).map(|(v, m)| v * v * m).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let next = op.rayleigh(&y);
        x = y;
        if (next - mu).abs() <= 1e-15 * next.abs().max(1e-300) {
            return Ok(next);
        }
        mu = next;
    }
    Ok(mu)
}
