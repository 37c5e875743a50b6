//! The tadpole graph: a loop identified with [-L, L] and a half-line [0, R]
//! (Dirichlet at R) glued at a single vertex, together with its uniform grid,
//! grid functions, quadratures and the discretized δ-coupled Laplacian.
//!
//! Unknowns of the discrete operator are ordered as
//! `[loop interior | tail interior | vertex]`; the tail node at `R` is pinned
//! to zero and not part of the system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BorderedMatrix, SymTridiagonal};

const ALIGN_TOL: f64 = 1e-8;

/// Problem instance plus grid controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub omega: f64,
    pub gamma: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub h: f64,
    /// Number of cells on the loop, `2L / h`.
    pub n_loop: usize,
    /// Number of cells on the half-line, `R / h`.
    pub n_tail: usize,
}

impl GraphParams {
    /// Default grid: `h ≈ 1e-3·min(1, L)` rounded so that it divides `2L`,
    /// and `R` the smallest multiple of `h` above `max(10/√ω, L + 10/√ω)`.
    pub fn new(omega: f64, gamma: f64, l: f64) -> Result<Self> {
        Self::with_grid(omega, gamma, l, None, None)
    }

    /// Grid with optional overrides. An explicit `h` must divide `2L`, an
    /// explicit `R` must be a multiple of the (final) `h`.
    pub fn with_grid(omega: f64, gamma: f64, l: f64, h: Option<f64>, r: Option<f64>) -> Result<Self> {
        check_physical(omega, gamma, l)?;
        let (n_loop, h) = match h {
            Some(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidParameter(format!("h = {h} must be positive")));
                }
                let n = aligned_count(2.0 * l, h).ok_or_else(|| {
                    Error::MisalignedGrid(format!("2L/h = {} is not an integer", 2.0 * l / h))
                })?;
                (n, 2.0 * l / n as f64)
            }
            None => {
                let target = 1e-3 * l.min(1.0);
                let n = ((2.0 * l / target) - 1e-9).ceil().max(2.0) as usize;
                (n, 2.0 * l / n as f64)
            }
        };
        let r_min = 10.0 / omega.sqrt();
        let n_tail = match r {
            Some(r) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidParameter(format!("R = {r} must be positive")));
                }
                if r < r_min * (1.0 - ALIGN_TOL) {
                    return Err(Error::InvalidParameter(format!(
                        "R = {r} is below the decay length 10/sqrt(omega) = {r_min}"
                    )));
                }
                aligned_count(r, h).ok_or_else(|| {
                    Error::MisalignedGrid(format!("R/h = {} is not an integer", r / h))
                })?
            }
            None => {
                let target = r_min.max(l + r_min);
                ((target / h) - 1e-9).ceil() as usize
            }
        };
        Self::from_counts(omega, gamma, l, n_loop, n_tail)
    }

    /// Grid given by its cell counts; `h = 2L / n_loop`, `R = n_tail·h`.
    pub fn from_counts(omega: f64, gamma: f64, l: f64, n_loop: usize, n_tail: usize) -> Result<Self> {
        check_physical(omega, gamma, l)?;
        if n_loop < 2 || n_tail < 2 {
            return Err(Error::MisalignedGrid(format!(
                "need at least two cells per edge (n_loop = {n_loop}, n_tail = {n_tail})"
            )));
        }
        let h = 2.0 * l / n_loop as f64;
        Ok(Self {
            omega,
            gamma,
            l,
            r: n_tail as f64 * h,
            h,
            n_loop,
            n_tail,
        })
    }

    /// Same physical parameters on a grid with half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            h: self.h / 2.0,
            n_loop: 2 * self.n_loop,
            n_tail: 2 * self.n_tail,
            ..*self
        }
    }

    pub fn with_omega_gamma(&self, omega: f64, gamma: f64) -> Result<Self> {
        check_physical(omega, gamma, self.l)?;
        Ok(Self { omega, gamma, ..*self })
    }

    pub fn loop_x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h
    }

    pub fn tail_x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Number of unknowns of the discrete operator.
    pub fn dim(&self) -> usize {
        (self.n_loop - 1) + (self.n_tail - 1) + 1
    }
}

fn check_physical(omega: f64, gamma: f64, l: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be positive")));
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be finite")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("L = {l} must be positive")));
    }
    Ok(())
}

fn aligned_count(len: f64, h: f64) -> Option<usize> {
    let ratio = len / h;
    let n = ratio.round();
    if n >= 1.0 && (ratio - n).abs() <= ALIGN_TOL * ratio.max(1.0) {
        Some(n as usize)
    } else {
        None
    }
}

/// Which edge a grid node or graph point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    #[serde(rename = "c")]
    Loop,
    #[serde(rename = "h")]
    Tail,
}

/// A point of the graph: `x ∈ [-L, L]` on the loop or `x ≥ 0` on the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: Edge,
    pub x: f64,
}

impl GraphPoint {
    pub fn on_loop(x: f64) -> Self {
        Self { edge: Edge::Loop, x }
    }

    pub fn on_tail(x: f64) -> Self {
        Self { edge: Edge::Tail, x }
    }
}

/// Real grid function on the tadpole. The vertex value is stored once, so
/// `loop_values()[0] == loop_values()[n] == tail_values()[0]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    loop_values: Vec<f64>,
    tail_values: Vec<f64>,
}

impl GraphFunction {
    /// Build from full edge samples; the three vertex samples must coincide.
    pub fn new(loop_values: Vec<f64>, tail_values: Vec<f64>) -> Result<Self> {
        if loop_values.len() < 3 || tail_values.len() < 3 {
            return Err(Error::GridMismatch("each edge needs at least three nodes".into()));
        }
        let v = loop_values[0];
        if loop_values[loop_values.len() - 1].to_bits() != v.to_bits() || tail_values[0].to_bits() != v.to_bits() {
            return Err(Error::GridMismatch(format!(
                "vertex samples differ: {}, {}, {}",
                v,
                loop_values[loop_values.len() - 1],
                tail_values[0]
            )));
        }
        if let Some(bad) = loop_values.iter().chain(&tail_values).find(|x| !x.is_finite()) {
            return Err(Error::GridMismatch(format!("non-finite value {bad}")));
        }
        Ok(Self { loop_values, tail_values })
    }

    /// Sample `f_loop` on the loop nodes and `f_tail` on the tail nodes; the
    /// vertex takes the loop value at `x = -L`.
    pub fn from_fn(
        params: &GraphParams,
        f_loop: impl Fn(f64) -> f64,
        f_tail: impl Fn(f64) -> f64,
    ) -> Self {
        let mut loop_values: Vec<f64> = (0..=params.n_loop).map(|j| f_loop(params.loop_x(j))).collect();
        let v = loop_values[0];
        loop_values[params.n_loop] = v;
        let mut tail_values: Vec<f64> = (0..=params.n_tail).map(|i| f_tail(params.tail_x(i))).collect();
        tail_values[0] = v;
        Self { loop_values, tail_values }
    }

    pub fn zeros(params: &GraphParams) -> Self {
        Self {
            loop_values: vec![0.0; params.n_loop + 1],
            tail_values: vec![0.0; params.n_tail + 1],
        }
    }

    /// Rebuild from the unknown vector of the discrete operator; the node at
    /// `R` is set to zero.
    pub fn from_unknowns(params: &GraphParams, x: &[f64]) -> Self {
        let nc = params.n_loop - 1;
        let nt = params.n_tail - 1;
        assert_eq!(x.len(), nc + nt + 1);
        let v = x[nc + nt];
        let mut loop_values = Vec::with_capacity(nc + 2);
        loop_values.push(v);
        loop_values.extend_from_slice(&x[..nc]);
        loop_values.push(v);
        let mut tail_values = Vec::with_capacity(nt + 2);
        tail_values.push(v);
        tail_values.extend_from_slice(&x[nc..nc + nt]);
        tail_values.push(0.0);
        Self { loop_values, tail_values }
    }

    /// Unknown vector `[loop interior | tail interior | vertex]`.
    pub fn to_unknowns(&self) -> Vec<f64> {
        let nc = self.loop_values.len() - 2;
        let nt = self.tail_values.len() - 2;
        let mut x = Vec::with_capacity(nc + nt + 1);
        x.extend_from_slice(&self.loop_values[1..=nc]);
        x.extend_from_slice(&self.tail_values[1..=nt]);
        x.push(self.vertex());
        x
    }

    pub fn loop_values(&self) -> &[f64] {
        &self.loop_values
    }

    pub fn tail_values(&self) -> &[f64] {
        &self.tail_values
    }

    pub fn vertex(&self) -> f64 {
        self.loop_values[0]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            loop_values: self.loop_values.iter().map(|&x| f(x)).collect(),
            tail_values: self.tail_values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|x| t * x)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.loop_values.len(), other.loop_values.len());
        assert_eq!(self.tail_values.len(), other.tail_values.len());
        let comb = |u: &[f64], w: &[f64]| u.iter().zip(w).map(|(x, y)| a * x + b * y).collect();
        Self {
            loop_values: comb(&self.loop_values, &other.loop_values),
            tail_values: comb(&self.tail_values, &other.tail_values),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.loop_values.iter().chain(&self.tail_values).copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.loop_values.iter().chain(&self.tail_values).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn conforms_to(&self, params: &GraphParams) -> bool {
        self.loop_values.len() == params.n_loop + 1 && self.tail_values.len() == params.n_tail + 1
    }

    pub(crate) fn check_grid(&self, params: &GraphParams) -> Result<()> {
        if self.conforms_to(params) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "function has {}+{} nodes, grid has {}+{}",
                self.loop_values.len(),
                self.tail_values.len(),
                params.n_loop + 1,
                params.n_tail + 1
            )))
        }
    }
}

/// Quadrature values of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    /// ‖v‖²_{L²}
    pub l2_sq: f64,
    /// ‖v‖⁴_{L⁴}
    pub l4_4: f64,
    /// ‖v′‖²_{L²}
    pub h1_semi_sq: f64,
    pub vertex_value: f64,
}

impl Norms {
    /// The δ-coupled quadratic form `‖v′‖² + γ v(vertex)²`.
    pub fn quadratic_form(&self, gamma: f64) -> f64 {
        self.h1_semi_sq + gamma * self.vertex_value * self.vertex_value
    }
}

fn trapezoid(values: &[f64], h: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().map(|&x| f(x)).sum();
    h * (inner + 0.5 * (f(values[0]) + f(values[n])))
}

fn forward_diff_sq(values: &[f64], h: f64) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / h
}

/// Composite trapezoid norms, edge by edge.
pub fn norms(v: &GraphFunction, params: &GraphParams) -> Result<Norms> {
    v.check_grid(params)?;
    let h = params.h;
    let (c, t) = (v.loop_values(), v.tail_values());
    Ok(Norms {
        l2_sq: trapezoid(c, h, |x| x * x) + trapezoid(t, h, |x| x * x),
        l4_4: trapezoid(c, h, |x| x.powi(4)) + trapezoid(t, h, |x| x.powi(4)),
        h1_semi_sq: forward_diff_sq(c, h) + forward_diff_sq(t, h),
        vertex_value: v.vertex(),
    })
}

/// Ratio `‖v‖_{L⁴} / (‖v′‖^{1/4} ‖v‖^{3/4})`, the constant in the
/// Gagliardo–Nirenberg inequality attained by `v`.
pub fn gagliardo_nirenberg_ratio(n: &Norms) -> f64 {
    n.l4_4.powf(0.25) / (n.h1_semi_sq.powf(0.125) * n.l2_sq.powf(0.375))
}

/// Vertex defects of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexResiduals {
    pub continuity_gap: f64,
    pub flux_gap: f64,
}

/// One-sided second-order derivative at the start of `v`, oriented along `v`.
pub(crate) fn outgoing_derivative2(v: &[f64], h: f64) -> f64 {
    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
}

/// One-sided fourth-order derivative at the start of `v`, oriented along `v`.
pub(crate) fn outgoing_derivative4(v: &[f64], h: f64) -> f64 {
    (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
}

/// Continuity gap and the defect `|u_c′(-L) - u_c′(L) + u_h′(0) - γ v|`.
pub fn vertex_residuals(v: &GraphFunction, params: &GraphParams) -> Result<VertexResiduals> {
    v.check_grid(params)?;
    let (c, t) = (v.loop_values(), v.tail_values());
    let n = c.len() - 1;
    let vv = v.vertex();
    let continuity_gap = (c[0] - c[n]).abs().max((c[0] - t[0]).abs()).max((c[n] - t[0]).abs());
    let reversed = [c[n], c[n - 1], c[n - 2]];
    let outgoing = outgoing_derivative2(c, params.h) + outgoing_derivative2(&reversed, params.h)
        + outgoing_derivative2(t, params.h);
    Ok(VertexResiduals {
        continuity_gap,
        flux_gap: (outgoing - params.gamma * vv).abs(),
    })
}

/// Sup norm of `-v″ + ωv - v³` over interior nodes of both edges (three-point
/// second difference).
pub fn pde_residual(v: &GraphFunction, params: &GraphParams) -> Result<f64> {
    v.check_grid(params)?;
    let h2 = params.h * params.h;
    let w = params.omega;
    let edge = |u: &[f64]| {
        u.windows(3)
            .map(|s| (-(s[0] - 2.0 * s[1] + s[2]) / h2 + w * s[1] - s[1].powi(3)).abs())
            .fold(0.0, f64::max)
    };
    Ok(edge(v.loop_values()).max(edge(v.tail_values())))
}

/// Discretized δ-coupled Laplacian `H = M⁻¹A` with stiffness `A` (the matrix
/// of `Σ h (D⁺v)² + γ v_vertex²`) and lumped trapezoid mass `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedOperator {
    pub stiffness: BorderedMatrix,
    /// Diagonal of `M`: `h` at interior nodes, `3h/2` at the vertex.
    pub mass: Vec<f64>,
    pub params: GraphParams,
}

/// Assemble the operator on the grid of `params`.
pub fn assemble_hamiltonian(params: &GraphParams) -> Result<BorderedOperator> {
    if params.n_loop < 2 || params.n_tail < 2 {
        return Err(Error::MisalignedGrid("need at least two cells per edge".into()));
    }
    if aligned_count(2.0 * params.l, params.h) != Some(params.n_loop)
        || aligned_count(params.r, params.h) != Some(params.n_tail)
    {
        return Err(Error::MisalignedGrid(format!(
            "2L/h = {}, R/h = {} disagree with the stored cell counts",
            2.0 * params.l / params.h,
            params.r / params.h
        )));
    }
    let h = params.h;
    let chain = |n: usize| SymTridiagonal::new(vec![2.0 / h; n], vec![-1.0 / h; n.saturating_sub(1)]);
    let stiffness = BorderedMatrix {
        loop_chain: chain(params.n_loop - 1),
        tail_chain: chain(params.n_tail - 1),
        loop_coupling: -1.0 / h,
        tail_coupling: -1.0 / h,
        corner: 3.0 / h + params.gamma,
    };
    let mut mass = vec![h; params.dim()];
    mass[params.dim() - 1] = 1.5 * h;
    Ok(BorderedOperator {
        stiffness,
        mass,
        params: *params,
    })
}

impl BorderedOperator {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// `H x = M⁻¹ A x` on unknown vectors.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.stiffness.apply(x);
        for (yi, m) in y.iter_mut().zip(&self.mass) {
            *yi /= m;
        }
        y
    }

    /// `H v` as a grid function (zero at the pinned node `R`).
    pub fn apply_fn(&self, v: &GraphFunction) -> Result<GraphFunction> {
        v.check_grid(&self.params)?;
        Ok(GraphFunction::from_unknowns(&self.params, &self.apply(&v.to_unknowns())))
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.stiffness.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Rayleigh quotient `xᵀAx / xᵀMx`.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let m: f64 = x.iter().zip(&self.mass).map(|(a, w)| a * a * w).sum();
        self.quadratic_form(x) / m
    }

    /// `scale·A + diag(d)`, the shape of every linear system we solve.
    pub fn combine(&self, scale: f64, d: &[f64]) -> BorderedMatrix {
        assert_eq!(d.len(), self.dim());
        let a = &self.stiffness;
        let nc = a.loop_chain.len();
        let nt = a.tail_chain.len();
        let chain = |c: &SymTridiagonal, off: usize, n: usize| {
            SymTridiagonal::new(
                (0..n).map(|i| scale * c.diag[i] + d[off + i]).collect(),
                c.off.iter().map(|o| scale * o).collect(),
            )
        };
        BorderedMatrix {
            loop_chain: chain(&a.loop_chain, 0, nc),
            tail_chain: chain(&a.tail_chain, nc, nt),
            loop_coupling: scale * a.loop_coupling,
            tail_coupling: scale * a.tail_coupling,
            corner: scale * a.corner + d[nc + nt],
        }
    }

    /// `A - λM`.
    pub fn shifted(&self, lambda: f64) -> BorderedMatrix {
        let d: Vec<f64> = self.mass.iter().map(|m| -lambda * m).collect();
        self.combine(1.0, &d)
    }
}
