//! Exact stationary states on the tadpole built from phase-plane data, and
//! the classifier that maps a (numerical) state to its shape.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{outgoing_derivative4, GraphFunction, GraphParams};
use crate::phase::{
    gamma_distances, half_period, integral_of_motion, minus_split, non_even_abscissa, period_t_minus,
    period_t_plus, solve_even_boundary, solve_non_even, even_residual, GammaDistances, PhasePoint, Sector,
};
use crate::special::{elliptic_k, family_for_level, ProfileFamily, ProfileSpec, K_MAX};

/// Default Γ-membership tolerance (absolute, in `q`) for numerical states.
pub const DEFAULT_TOL: f64 = 5e-3;

/// Tolerance for exact phase data handed to the builders.
const EXACT_TOL: f64 = 1e-8;

/// Shape of the half-line profile `√(2ω) sech(√ω x + b)` by the sign of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailType {
    /// `b > 0`: monotone decay from the vertex.
    Tail,
    /// `b = 0`: the peak sits at the vertex.
    HalfSoliton,
    /// `b < 0`: the peak lies inside the half-line.
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LoopType {
    Dnoidal,
    Sech,
    Cnoidal,
    Constant,
}

/// Location of the boundary point `(u_c(-L), u_c′(-L))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundarySet {
    G1,
    G2,
    G3,
    G4,
    /// The point `(√(2(ω-γ²)), 0)` shared by `Γ²` and `Γ³`.
    Junction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeClass {
    pub tail_type: TailType,
    pub loop_type: LoopType,
    pub boundary_set: BoundarySet,
    pub even: bool,
    pub wrap_count: u32,
}

/// Rows of the decision table for boundary points of non-negative states
/// with `0 < γ < √ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeCase {
    /// On `Γ¹` below the split point.
    TailDnoidal,
    /// On `Γ¹` at the split point.
    TailSech,
    /// On `Γ¹` above the split point, apex excluded.
    TailCnoidal,
    /// The apex `(√(2ω), q₊(√(2ω)))`.
    HalfSolitonCnoidal,
    /// On `Γ²` above `√(2(ω-γ²/9))`.
    BumpCnoidal,
    /// On `Γ²` at `√(2(ω-γ²/9))`.
    BumpSech,
    /// On `Γ²` strictly between the two thresholds.
    BumpDnoidal,
    /// The junction, `γ ≠ √(ω/2)`.
    JunctionDnoidal,
    /// The junction, `γ = √(ω/2)`: the loop is the constant `√ω`.
    JunctionConstant,
    /// On `Γ³`.
    LowerDnoidal,
    /// On `Γ⁴` (non-even loop).
    NonEven,
}

impl ShapeCase {
    pub fn tail_type(self) -> TailType {
        match self {
            ShapeCase::TailDnoidal | ShapeCase::TailSech | ShapeCase::TailCnoidal => TailType::Tail,
            ShapeCase::HalfSolitonCnoidal => TailType::HalfSoliton,
            _ => TailType::Bump,
        }
    }

    pub fn loop_type(self) -> LoopType {
        match self {
            ShapeCase::TailSech | ShapeCase::BumpSech => LoopType::Sech,
            ShapeCase::TailCnoidal | ShapeCase::HalfSolitonCnoidal | ShapeCase::BumpCnoidal => LoopType::Cnoidal,
            ShapeCase::JunctionConstant => LoopType::Constant,
            _ => LoopType::Dnoidal,
        }
    }

    pub fn boundary_set(self) -> BoundarySet {
        match self {
            ShapeCase::TailDnoidal
            | ShapeCase::TailSech
            | ShapeCase::TailCnoidal
            | ShapeCase::HalfSolitonCnoidal => BoundarySet::G1,
            ShapeCase::BumpCnoidal | ShapeCase::BumpSech | ShapeCase::BumpDnoidal => BoundarySet::G2,
            ShapeCase::JunctionDnoidal | ShapeCase::JunctionConstant => BoundarySet::Junction,
            ShapeCase::LowerDnoidal => BoundarySet::G3,
            ShapeCase::NonEven => BoundarySet::G4,
        }
    }

    pub fn class(self, wrap_count: u32) -> ShapeClass {
        ShapeClass {
            tail_type: self.tail_type(),
            loop_type: self.loop_type(),
            boundary_set: self.boundary_set(),
            even: self != ShapeCase::NonEven,
            wrap_count,
        }
    }
}

/// Decision table for an even boundary point. `tol` bounds the distance to
/// the curve, `tie` the distance to a threshold counted as "at" it.
pub fn even_case(pt: PhasePoint, omega: f64, gamma: f64, tol: f64, tie: f64) -> Result<ShapeCase> {
    if !(gamma > 0.0 && gamma * gamma < omega) {
        return Err(Error::InvalidParameter(format!(
            "the shape table needs 0 < gamma < sqrt(omega), got gamma = {gamma}"
        )));
    }
    let d = gamma_distances(pt, omega, gamma);
    if d.to_curve() > tol {
        return Err(Error::OffCurve(d));
    }
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let p9 = (2.0 * (omega - gamma * gamma / 9.0)).sqrt();
    if (pt.p - split).hypot(pt.q) <= tie {
        let center = (split * split - omega).abs() <= tie * omega.sqrt();
        return Ok(if center { ShapeCase::JunctionConstant } else { ShapeCase::JunctionDnoidal });
    }
    let apex_q = 0.5 * top * gamma;
    if (pt.p - top).hypot(pt.q - apex_q) <= tie {
        return Ok(ShapeCase::HalfSolitonCnoidal);
    }
    let nearest = if d.g1 <= d.g2.min(d.g3) {
        BoundarySet::G1
    } else if d.g2 <= d.g3 {
        BoundarySet::G2
    } else {
        BoundarySet::G3
    };
    Ok(match nearest {
        BoundarySet::G1 => {
            if (pt.p - split).abs() <= tie {
                ShapeCase::TailSech
            } else if pt.p < split {
                ShapeCase::TailDnoidal
            } else {
                ShapeCase::TailCnoidal
            }
        }
        BoundarySet::G2 => {
            if (pt.p - p9).abs() <= tie {
                ShapeCase::BumpSech
            } else if pt.p > p9 {
                ShapeCase::BumpCnoidal
            } else {
                ShapeCase::BumpDnoidal
            }
        }
        _ => ShapeCase::LowerDnoidal,
    })
}

/// Exact state: one profile per edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryState {
    pub loop_profile: ProfileSpec,
    pub tail_profile: ProfileSpec,
    pub shape: ShapeClass,
    pub params: GraphParams,
}

impl StationaryState {
    pub fn loop_value(&self, x: f64) -> f64 {
        self.loop_profile.value(x)
    }

    pub fn tail_value(&self, x: f64) -> f64 {
        self.tail_profile.value(x)
    }

    /// Largest pairwise gap between `u_c(-L)`, `u_c(L)`, `u_h(0)`.
    pub fn continuity_gap(&self) -> f64 {
        let l = self.params.l;
        let (a, b, c) = (self.loop_value(-l), self.loop_value(l), self.tail_value(0.0));
        (a - b).abs().max((a - c).abs()).max((b - c).abs())
    }

    /// `|u_c′(-L) - u_c′(L) + u_h′(0) - γ u(vertex)|` with exact derivatives.
    pub fn flux_residual(&self) -> f64 {
        let l = self.params.l;
        let (v, dl) = self.loop_profile.value_and_derivative(-l);
        let dr = self.loop_profile.derivative(l);
        let dh = self.tail_profile.derivative(0.0);
        (dl - dr + dh - self.params.gamma * v).abs()
    }

    /// Boundary point `(u_c(-L), u_c′(-L))`.
    pub fn boundary_point(&self) -> PhasePoint {
        let (p, q) = self.loop_profile.value_and_derivative(-self.params.l);
        PhasePoint::new(p, q)
    }
}

/// Profile through `(p, q)` at `x = -L`, parametrized with the given family
/// and modulus. Returns the shift `a` with `φ(-L) = p`, `φ′(-L) = q`.
fn loop_shift(family: ProfileFamily, omega: f64, k: f64, pt: PhasePoint, l: f64) -> Result<f64> {
    let base = match family {
        ProfileFamily::Dnoidal => ProfileSpec::dnoidal(omega, k, 0.0)?,
        ProfileFamily::Cnoidal => ProfileSpec::cnoidal(omega, k, 0.0)?,
        ProfileFamily::Sech => ProfileSpec::sech(omega, 0.0)?,
    };
    let amp = base.amplitude();
    let mu = base.wavenumber();
    let y = (pt.p / amp).clamp(-1.0, 1.0);
    // argument z ≥ 0 on the decreasing branch with φ(z/μ) = p
    let z0 = match family {
        ProfileFamily::Sech => (1.0 / y.max(f64::MIN_POSITIVE)).acosh(),
        ProfileFamily::Dnoidal | ProfileFamily::Cnoidal => {
            let kk = elliptic_k(k)?;
            let hi = if family == ProfileFamily::Dnoidal { kk } else { 2.0 * kk };
            let f = |z: f64| base.value(z / mu) / amp - y;
            let (mut a, mut b) = (0.0, hi);
            if f(a) <= 0.0 {
                0.0
            } else if f(b) >= 0.0 {
                hi
            } else {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if f(m) > 0.0 { a = m } else { b = m }
                }
                0.5 * (a + b)
            }
        }
    };
    // on the decreasing branch the derivative is negative; q > 0 mirrors it
    let z = if pt.q > 0.0 { -z0 } else { z0 };
    Ok(z + mu * l)
}

/// Modulus and family for the level through `pt`; the separatrix is used
/// once the modulus would exceed the admissible range.
fn loop_family(pt: PhasePoint, omega: f64) -> Result<(ProfileFamily, f64)> {
    let e = integral_of_motion(pt, omega);
    let (family, k) = family_for_level(omega, e)?;
    if family != ProfileFamily::Sech && k > K_MAX {
        return Ok((ProfileFamily::Sech, 1.0));
    }
    Ok((family, k))
}

/// Reduce `a` to the nearest evenness value of the family (multiples of the
/// half period in argument units).
fn snap_even_shift(family: ProfileFamily, k: f64, a: f64) -> Result<f64> {
    let step = match family {
        ProfileFamily::Sech => return if a.abs() <= 1e-6 { Ok(0.0) } else { Err(Error::QuantizationViolated(a.abs())) },
        ProfileFamily::Dnoidal => {
            if k == 0.0 {
                return Ok(0.0);
            }
            elliptic_k(k)?
        }
        ProfileFamily::Cnoidal => 2.0 * elliptic_k(k)?,
    };
    let period = 2.0 * step;
    let m = (a / step).round();
    let gap = (a - m * step).abs();
    if gap > 1e-6 {
        return Err(Error::QuantizationViolated(gap));
    }
    Ok((m * step).rem_euclid(period))
}

fn tail_for_value(omega: f64, p: f64, tail: TailType) -> Result<ProfileSpec> {
    let top = (2.0 * omega).sqrt();
    let mag = (top / p).max(1.0).acosh();
    let b = match tail {
        TailType::Tail => mag,
        TailType::HalfSoliton => 0.0,
        TailType::Bump => -mag,
    };
    ProfileSpec::sech(omega, b)
}

/// Even state with boundary point `pt` and wrap count `n` on the grid of
/// `params`.
pub fn build_even_state(pt: PhasePoint, n: u32, params: &GraphParams) -> Result<StationaryState> {
    let (w, g, l) = (params.omega, params.gamma, params.l);
    let case = even_case(pt, w, g, EXACT_TOL, 1e-12)?;
    let sector = match case.boundary_set() {
        BoundarySet::G3 => Some(Sector::G3),
        BoundarySet::Junction => None,
        _ => Some(Sector::G12),
    };
    // the constant loop solves the equation for every L
    let residual = match sector {
        _ if case == ShapeCase::JunctionConstant => 0.0,
        Some(s) => even_residual(pt, l, w, n, s)?,
        None => n as f64 * half_period(pt, w)? - l,
    };
    if !(residual.abs() <= 1e-8 * l.max(1.0)) {
        return Err(Error::QuantizationViolated(residual));
    }
    let (loop_profile, tail_profile) = if case == ShapeCase::JunctionConstant {
        (ProfileSpec::dnoidal(w, 0.0, 0.0)?, ProfileSpec::sech(w, -(g / w.sqrt()).atanh())?)
    } else {
        let (family, k) = loop_family(pt, w)?;
        let a = snap_even_shift(family, k, loop_shift(family, w, k, pt, l)?)?;
        let loop_profile = ProfileSpec { family, omega: w, k, shift: a };
        let tail_profile = if case.boundary_set() == BoundarySet::Junction {
            ProfileSpec::sech(w, -(g / w.sqrt()).atanh())?
        } else {
            tail_for_value(w, pt.p, case.tail_type())?
        };
        (loop_profile, tail_profile)
    };
    Ok(StationaryState {
        loop_profile,
        tail_profile,
        shape: case.class(n),
        params: *params,
    })
}

/// Non-even state: dnoidal loop through `pt ∈ Γ⁴` wrapping `n` periods,
/// Robin tail `√(2ω) sech(√ω x - artanh(γ/√ω))`.
pub fn build_non_even_state(pt: PhasePoint, n: u32, params: &GraphParams) -> Result<StationaryState> {
    let (w, g, l) = (params.omega, params.gamma, params.l);
    let p4 = non_even_abscissa(w, g)
        .ok_or_else(|| Error::InvalidParameter(format!("no non-even states for gamma = {g}")))?;
    let e = integral_of_motion(pt, w);
    if (pt.p - p4).abs() > EXACT_TOL || pt.q == 0.0 || e >= 0.0 {
        let mut d = gamma_distances(pt, w, g);
        d.g4 = (pt.p - p4).abs();
        return Err(Error::OffCurve(d));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("non-even states wrap at least once".into()));
    }
    let residual = n as f64 * half_period(pt, w)? - l;
    if !(residual.abs() <= 1e-8 * l.max(1.0)) {
        return Err(Error::QuantizationViolated(residual));
    }
    let (family, k) = loop_family(pt, w)?;
    let a = loop_shift(family, w, k, pt, l)?;
    let tail_type = if g > 0.0 { TailType::Bump } else { TailType::Tail };
    Ok(StationaryState {
        loop_profile: ProfileSpec { family, omega: w, k, shift: a },
        tail_profile: ProfileSpec::sech(w, -(g / w.sqrt()).atanh())?,
        shape: ShapeClass {
            tail_type,
            loop_type: LoopType::Dnoidal,
            boundary_set: BoundarySet::G4,
            even: false,
            wrap_count: n,
        },
        params: *params,
    })
}

/// Every even state with wrap count up to `n_max` and every non-even state.
pub fn enumerate_states(params: &GraphParams, n_max: u32) -> Vec<StationaryState> {
    let (w, g, l) = (params.omega, params.gamma, params.l);
    let mut out = Vec::new();
    if g > 0.0 && (2.0 * g * g - w).abs() <= 1e-12 * w {
        let center = PhasePoint::new(w.sqrt(), 0.0);
        if let Ok(s) = build_even_state(center, 0, params) {
            out.push(s);
        }
    }
    for n in 0..=n_max {
        for sector in [Sector::G12, Sector::G3] {
            for pt in solve_even_boundary(l, w, g, n, sector) {
                if let Ok(s) = build_even_state(pt, n, params) {
                    out.push(s);
                }
            }
        }
    }
    for (pt, n) in solve_non_even(l, w, g).points {
        if let Ok(s) = build_non_even_state(pt, n, params) {
            out.push(s);
        }
    }
    out
}

/// Evaluate both profiles on the grid.
pub fn sample_state(s: &StationaryState, params: &GraphParams) -> GraphFunction {
    if s.loop_profile.family == ProfileFamily::Dnoidal && s.loop_profile.k == 0.0 {
        let c = s.loop_profile.amplitude();
        return GraphFunction::from_fn(params, |_| c, |x| if x == 0.0 { c } else { s.tail_value(x) });
    }
    GraphFunction::from_fn(params, |x| s.loop_value(x), |x| s.tail_value(x))
}

/// Wrap count implied by the quantization identity at `pt`.
fn wrap_count(pt: PhasePoint, l: f64, omega: f64, set: BoundarySet) -> u32 {
    let tp = period_t_plus(pt, omega).map(|t| t.value()).unwrap_or(f64::NAN);
    let tm = period_t_minus(pt, omega).map(|t| t.value()).unwrap_or(f64::NAN);
    let full = tp + tm;
    if !(full.is_finite() && full > 0.0) {
        return 0;
    }
    let n = match set {
        BoundarySet::G1 | BoundarySet::G2 => (l - tp) / full,
        BoundarySet::G3 => (l - tm) / full,
        BoundarySet::Junction | BoundarySet::G4 => l / full,
    };
    n.round().max(0.0) as u32
}

/// Classification of a grid function by its boundary data at `x = -L`.
pub fn classify(v: &GraphFunction, params: &GraphParams, tol: f64) -> Result<ShapeClass> {
    let (w, g, l) = (params.omega, params.gamma, params.l);
    let c = v.loop_values();
    let n = c.len() - 1;
    if n < 4 {
        return Err(Error::GridMismatch("classification needs at least five loop nodes".into()));
    }
    let p = v.vertex();
    let q = outgoing_derivative4(c, params.h);
    let reversed = [c[n], c[n - 1], c[n - 2], c[n - 3], c[n - 4]];
    let q_right = outgoing_derivative4(&reversed, params.h);
    // even loops have equal outgoing derivatives at both ends
    let even = (q - q_right).abs() <= (q + q_right).abs() || q.abs().max(q_right.abs()) <= tol;
    let pt = PhasePoint::new(p, q);
    if !even {
        let p4 = non_even_abscissa(w, g);
        let e = integral_of_motion(pt, w);
        return match p4 {
            Some(p4) if (p - p4).abs() <= tol && e < 0.0 => Ok(ShapeClass {
                tail_type: if g > 0.0 { TailType::Bump } else { TailType::Tail },
                loop_type: LoopType::Dnoidal,
                boundary_set: BoundarySet::G4,
                even: false,
                wrap_count: wrap_count(pt, l, w, BoundarySet::G4),
            }),
            _ => {
                let mut d = gamma_distances(pt, w, g);
                d.g4 = p4.map_or(f64::INFINITY, |p4| (p - p4).abs());
                Err(Error::OffCurve(d))
            }
        };
    }
    let case = even_case(pt, w, g, tol, tol * tol)?;
    Ok(case.class(wrap_count(pt, l, w, case.boundary_set())))
}

/// Distances from the boundary point of `v` to each Γ-subset.
pub fn boundary_distances(v: &GraphFunction, params: &GraphParams) -> (PhasePoint, GammaDistances) {
    let pt = PhasePoint::new(v.vertex(), outgoing_derivative4(v.loop_values(), params.h));
    (pt, gamma_distances(pt, params.omega, params.gamma))
}

/// Half the line-soliton period is not defined; this is the minimal
/// half period `π/√(2ω)` of dnoidal orbits, attained at the center.
pub fn minimal_dnoidal_half_period(omega: f64) -> f64 {
    PI / (2.0 * omega).sqrt()
}
