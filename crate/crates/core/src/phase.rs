//! Phase plane of `φ″ = ωφ - φ³`: integral of motion, turning points,
//! period functions and the Γ-curves of admissible boundary data.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive;

/// Relative tolerance of the adaptive period quadrature.
const PERIOD_TOL: f64 = 1e-13;

/// A point `(p, q) = (φ, φ′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub q: f64,
}

impl PhasePoint {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// `E = q² - p²(ω - p²/2)`.
pub fn integral_of_motion(pt: PhasePoint, omega: f64) -> f64 {
    pt.q * pt.q - pt.p * pt.p * (omega - 0.5 * pt.p * pt.p)
}

/// Intersections of a level curve with the `p`-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    pub p_plus: f64,
    pub p_minus: f64,
}

fn level_root(e: f64, omega: f64) -> Result<f64> {
    let x = 1.0 + 2.0 * e / (omega * omega);
    if x < -1e-12 || e.is_nan() {
        return Err(Error::EnergyBelowCenter(e));
    }
    Ok(x.max(0.0).sqrt())
}

/// Turning points of the level `e`. The center level `-ω²/2` is accepted
/// and gives `p₊ = p₋ = √ω`.
pub fn turning_points_for_level(e: f64, omega: f64) -> Result<TurningPoints> {
    let r = level_root(e, omega)?;
    let p_plus = (omega * (1.0 + r)).sqrt();
    let p_minus = if e <= 0.0 {
        // ω(1 - r) without the cancellation near the separatrix
        (-2.0 * e / (omega * (1.0 + r))).max(0.0).sqrt()
    } else {
        -p_plus
    };
    Ok(TurningPoints { p_plus, p_minus })
}

pub fn turning_points(pt: PhasePoint, omega: f64) -> Result<TurningPoints> {
    turning_points_for_level(integral_of_motion(pt, omega), omega)
}

/// A period value that may diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Period {
    Finite(f64),
    Infinite,
}

impl Period {
    /// The value, `+∞` for the divergent marker.
    pub fn value(self) -> f64 {
        match self {
            Period::Finite(t) => t,
            Period::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Period::Infinite)
    }
}

/// Level data in the form used by the period quadrature: after
/// `s = c - ρ cos θ` the integrand becomes `√2 / √g(s)`.
struct Orbit {
    e: f64,
    omega: f64,
    tp: TurningPoints,
    r: f64,
}

impl Orbit {
    fn new(pt: PhasePoint, omega: f64) -> Result<Self> {
        if !(pt.p >= 0.0) || !pt.q.is_finite() {
            return Err(Error::OutOfPhaseRange(pt.p));
        }
        let e = integral_of_motion(pt, omega);
        let tp = turning_points_for_level(e, omega)?;
        if pt.p > tp.p_plus * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::AboveTurningPoint { p: pt.p, p_plus: tp.p_plus });
        }
        let r = level_root(e, omega)?;
        Ok(Self { e, omega, tp, r })
    }

    fn center(&self) -> f64 {
        0.5 * (self.tp.p_plus + self.tp.p_minus)
    }

    fn radius(&self) -> f64 {
        0.5 * (self.tp.p_plus - self.tp.p_minus)
    }

    /// `g(s)` with `q² = ρ² sin²θ · g(s) / 2` on the orbit.
    fn factor(&self, s: f64) -> f64 {
        if self.e <= 0.0 {
            (self.tp.p_plus + s) * (s + self.tp.p_minus)
        } else {
            // ω(r - 1), written without cancellation for small E > 0
            s * s + 2.0 * self.e / (self.omega * (1.0 + self.r))
        }
    }

    /// Angle `θ ∈ [0, π]` of the point on the orbit, from both coordinates
    /// so that turning points map to exactly `0` and `π`.
    fn angle(&self, pt: PhasePoint) -> f64 {
        let sin = std::f64::consts::SQRT_2 * pt.q.abs() / self.factor(pt.p).sqrt();
        sin.atan2(self.center() - pt.p)
    }

    /// Integrand in `θ` after `s = c - ρ cos θ`.
    fn integrand(&self) -> impl Fn(f64) -> f64 + '_ {
        let (c, rho) = (self.center(), self.radius());
        move |theta: f64| std::f64::consts::SQRT_2 / self.factor(c - rho * theta.cos()).sqrt()
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        adaptive(self.integrand(), a, b, PERIOD_TOL)
    }
}

/// `T₊(p, q)`: distance in `x` from the point to the upper turning point.
pub fn period_t_plus(pt: PhasePoint, omega: f64) -> Result<Period> {
    if pt.p == 0.0 && pt.q == 0.0 {
        return Ok(Period::Infinite);
    }
    let orbit = Orbit::new(pt, omega)?;
    if orbit.radius() == 0.0 {
        return Ok(Period::Finite(0.0));
    }
    Ok(Period::Finite(orbit.integrate(orbit.angle(pt), PI)))
}

/// `T₋(p, q)`: distance in `x` from the lower turning point to the point.
/// Diverges on the separatrix `E = 0`.
pub fn period_t_minus(pt: PhasePoint, omega: f64) -> Result<Period> {
    let orbit = Orbit::new(pt, omega)?;
    if orbit.e == 0.0 {
        return Ok(Period::Infinite);
    }
    if orbit.radius() == 0.0 {
        return Ok(Period::Finite(0.0));
    }
    Ok(Period::Finite(orbit.integrate(0.0, orbit.angle(pt))))
}

/// Branch of the Γ-curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// `q±(p) = (p/2)(γ ± √(ω - p²/2))`.
pub fn gamma_q(p: f64, omega: f64, gamma: f64, branch: Branch) -> Result<f64> {
    let top = (2.0 * omega).sqrt();
    if !(p >= 0.0) || p > top * (1.0 + 1e-12) {
        return Err(Error::OutOfPhaseRange(p));
    }
    let root = (omega - 0.5 * p * p).max(0.0).sqrt();
    Ok(match branch {
        Branch::Plus => 0.5 * p * (gamma + root),
        Branch::Minus => 0.5 * p * (gamma - root),
    })
}

fn q_unchecked(p: f64, omega: f64, gamma: f64, branch: Branch) -> f64 {
    let root = (omega - 0.5 * p * p).max(0.0).sqrt();
    match branch {
        Branch::Plus => 0.5 * p * (gamma + root),
        Branch::Minus => 0.5 * p * (gamma - root),
    }
}

/// Point where the minus branch changes sign, `√(2(ω-γ²))` for
/// `0 < γ < √ω`; clamped to the ends of `[0, √(2ω)]` otherwise.
pub fn minus_split(omega: f64, gamma: f64) -> f64 {
    if gamma <= 0.0 {
        (2.0 * omega).sqrt()
    } else if gamma * gamma >= omega {
        0.0
    } else {
        (2.0 * (omega - gamma * gamma)).sqrt()
    }
}

/// Abscissa of the set of non-even boundary data, `√(2(ω-γ²))`, if any.
pub fn non_even_abscissa(omega: f64, gamma: f64) -> Option<f64> {
    (gamma != 0.0 && gamma * gamma < omega).then(|| (2.0 * (omega - gamma * gamma)).sqrt())
}

/// Subsets of the Γ-curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GammaSubset {
    G1,
    G2,
    G3,
    G4,
    None,
}

/// Distance in `q` from a point to each Γ-subset (Euclidean to the nearest
/// endpoint when `p` is outside the subset's range).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDistances {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl GammaDistances {
    pub fn min(&self) -> f64 {
        self.g1.min(self.g2).min(self.g3).min(self.g4)
    }

    /// Distance to the even part `Γ¹ ∪ Γ² ∪ Γ³`.
    pub fn to_curve(&self) -> f64 {
        self.g1.min(self.g2).min(self.g3)
    }
}

impl fmt::Display for GammaDistances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G1 {:.3e}, G2 {:.3e}, G3 {:.3e}, G4 {:.3e}", self.g1, self.g2, self.g3, self.g4)
    }
}

/// Result of a Γ-membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub subset: GammaSubset,
    /// Set when more than one subset lies within the tolerance.
    pub ambiguous: bool,
    pub distances: GammaDistances,
}

fn branch_distance(pt: PhasePoint, omega: f64, gamma: f64, branch: Branch, lo: f64, hi: f64) -> f64 {
    if hi < lo {
        return f64::INFINITY;
    }
    let p = pt.p.clamp(lo, hi);
    let q = q_unchecked(p, omega, gamma, branch);
    if p == pt.p {
        (pt.q - q).abs()
    } else {
        (pt.p - p).hypot(pt.q - q)
    }
}

pub fn gamma_distances(pt: PhasePoint, omega: f64, gamma: f64) -> GammaDistances {
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let g4 = match non_even_abscissa(omega, gamma) {
        Some(p4) if pt.q != 0.0 && integral_of_motion(PhasePoint::new(p4, pt.q), omega) < 0.0 => {
            (pt.p - p4).abs()
        }
        _ => f64::INFINITY,
    };
    GammaDistances {
        g1: branch_distance(pt, omega, gamma, Branch::Plus, 0.0, top),
        g2: branch_distance(pt, omega, gamma, Branch::Minus, split, top),
        g3: branch_distance(pt, omega, gamma, Branch::Minus, 0.0, split),
        g4,
    }
}

/// Membership of `pt` in the Γ-subsets within `tol`; ties report the
/// smallest subset and set the ambiguity flag.
pub fn gamma_subset(pt: PhasePoint, omega: f64, gamma: f64, tol: f64) -> Membership {
    let distances = gamma_distances(pt, omega, gamma);
    let hits: Vec<GammaSubset> = [
        (GammaSubset::G1, distances.g1),
        (GammaSubset::G2, distances.g2),
        (GammaSubset::G3, distances.g3),
        (GammaSubset::G4, distances.g4),
    ]
    .into_iter()
    .filter(|(_, d)| *d <= tol)
    .map(|(s, _)| s)
    .collect();
    Membership {
        subset: hits.first().copied().unwrap_or(GammaSubset::None),
        ambiguous: hits.len() > 1,
        distances,
    }
}

/// `F₊`, `F₋` and `G`: signed gaps between the Γ-branches and the
/// separatrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignFunctions {
    pub f_plus: f64,
    pub f_minus: f64,
    pub g: f64,
}

pub fn sign_functions(p: f64, omega: f64, gamma: f64) -> Result<SignFunctions> {
    let sep = (p * p * (omega - 0.5 * p * p)).max(0.0).sqrt();
    let qp = gamma_q(p, omega, gamma, Branch::Plus)?;
    let qm = gamma_q(p, omega, gamma, Branch::Minus)?;
    Ok(SignFunctions {
        f_plus: sep - qp,
        f_minus: sep - qm,
        g: -sep - qm,
    })
}

/// Samples of each Γ-subset, `n` per piece. `Γ⁴` is the vertical segment at
/// `√(2(ω-γ²))` inside the region `E < 0`, without its midpoint.
pub fn gamma_curve_samples(omega: f64, gamma: f64, n: usize) -> Vec<(GammaSubset, PhasePoint)> {
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let n = n.max(2);
    let mut out = Vec::with_capacity(4 * n);
    let mut piece = |subset, branch, lo: f64, hi: f64| {
        if hi > lo {
            for i in 0..=n {
                let p = lo + (hi - lo) * i as f64 / n as f64;
                out.push((subset, PhasePoint::new(p, q_unchecked(p, omega, gamma, branch))));
            }
        }
    };
    piece(GammaSubset::G1, Branch::Plus, 0.0, top);
    piece(GammaSubset::G2, Branch::Minus, split, top);
    piece(GammaSubset::G3, Branch::Minus, 0.0, split);
    if let Some(p4) = non_even_abscissa(omega, gamma) {
        let q_max = (p4 * p4 * (omega - 0.5 * p4 * p4)).max(0.0).sqrt();
        for i in 1..n {
            let q = q_max * (2.0 * i as f64 / n as f64 - 1.0);
            if q != 0.0 {
                out.push((GammaSubset::G4, PhasePoint::new(p4, q)));
            }
        }
    }
    out
}

/// Which part of the Γ-curve an even state's boundary point is sought on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    /// `Γ¹ ∪ Γ²`: `L = (n+1)T₊ + nT₋`.
    G12,
    /// `Γ³`: `L = nT₊ + (n+1)T₋`.
    G3,
}

/// Arc parameter along the curve, increasing from `(0, 0)` on `Γ³` through
/// the junction (`s = 0`), up `Γ²` to the apex and back down `Γ¹`.
pub fn gamma_arc_parameter(pt: PhasePoint, omega: f64, gamma: f64) -> f64 {
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let d = gamma_distances(pt, omega, gamma);
    let p = pt.p.clamp(0.0, top);
    if d.g1 < d.g2.min(d.g3) {
        (top - split) + (top - p)
    } else {
        p - split
    }
}

/// Point on the sector at arc parameter `s` (see [`gamma_arc_parameter`]).
pub fn gamma_point_at(s: f64, omega: f64, gamma: f64) -> PhasePoint {
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let (p, branch) = if s <= top - split {
        (split + s, Branch::Minus)
    } else {
        (top - (s - (top - split)), Branch::Plus)
    };
    let p = p.clamp(0.0, top);
    PhasePoint::new(p, q_unchecked(p, omega, gamma, branch))
}

/// Residual of the even quantization identity at `pt`.
pub fn even_residual(pt: PhasePoint, l: f64, omega: f64, n: u32, sector: Sector) -> Result<f64> {
    let nf = n as f64;
    let (cp, cm) = match sector {
        Sector::G12 => (nf + 1.0, nf),
        Sector::G3 => (nf, nf + 1.0),
    };
    // a zero coefficient drops its term even where the period diverges
    let term = |c: f64, t: fn(PhasePoint, f64) -> Result<Period>| -> Result<f64> {
        if c == 0.0 { Ok(0.0) } else { Ok(c * t(pt, omega)?.value()) }
    };
    Ok(term(cp, period_t_plus)? + term(cm, period_t_minus)? - l)
}

/// All boundary points on `sector` satisfying the even quantization with
/// wrap count `n`.
pub fn solve_even_boundary(l: f64, omega: f64, gamma: f64, n: u32, sector: Sector) -> Vec<PhasePoint> {
    let top = (2.0 * omega).sqrt();
    let split = minus_split(omega, gamma);
    let ds = 1e-4 * top;
    let (s_lo, s_hi) = match sector {
        Sector::G12 => (0.0, (top - split) + top - ds),
        Sector::G3 => (-(split - ds), 0.0),
    };
    if s_hi <= s_lo {
        return Vec::new();
    }
    let point = |s: f64| {
        if s < 0.0 {
            let p = split + s;
            PhasePoint::new(p, q_unchecked(p, omega, gamma, Branch::Minus))
        } else {
            gamma_point_at(s, omega, gamma)
        }
    };
    let residual = |s: f64| even_residual(point(s), l, omega, n, sector).unwrap_or(f64::NAN);
    // the junction belongs to neither sector when it is the center
    let junction_is_center = (split * split - omega).abs() <= 1e-12 * omega;
    let steps = ((s_hi - s_lo) / ds).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| s_lo + (s_hi - s_lo) * i as f64 / steps as f64)
        .filter(|&s| !(junction_is_center && s == 0.0))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&s| residual(s)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (ra, rb) = (values[i], values[i + 1]);
        if !(ra.is_finite() && rb.is_finite()) {
            continue;
        }
        if ra == 0.0 {
            roots.push(a);
            continue;
        }
        if ra.signum() == rb.signum() {
            continue;
        }
        let s = bisect(&residual, a, b, ra);
        if residual(s).abs() <= 1e-10 {
            roots.push(s);
        }
    }
    if let (Some(&last), Some(&r)) = (grid.last(), values.last()) {
        if r == 0.0 {
            roots.push(last);
        }
    }
    roots.dedup();
    roots.into_iter().map(point).collect()
}

/// Bisection to machine precision on `[a, b]` with `f(a) = fa`.
pub(crate) fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let fb = f(b);
    if fa.abs() <= fb.abs() { a } else { b }
}

/// Non-even boundary data for one loop length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonEvenSolutions {
    /// Boundary points with their wrap counts `n ≥ 1`; both signs of `q`.
    pub points: Vec<(PhasePoint, u32)>,
    /// Infimum of `T₊ + T₋` over the closure of the non-even set, with the
    /// periods at the center taken as zero.
    pub l_tilde: f64,
    /// Infimum of `T₊ + T₋` over the non-even set itself; non-even states
    /// exist iff `L` exceeds it.
    pub existence_threshold: f64,
}

/// `T₊ + T₋` at `(p, q)`, half the orbit's period.
pub fn half_period(pt: PhasePoint, omega: f64) -> Result<f64> {
    Ok(period_t_plus(pt, omega)?.value() + period_t_minus(pt, omega)?.value())
}

/// Dnoidal half period `√((2-k²)/ω) K(k)` at the level `e < 0`.
fn dnoidal_half_period(e: f64, omega: f64) -> Result<f64> {
    let (_, k) = crate::special::family_for_level(omega, e)?;
    Ok(((2.0 - k * k) / omega).sqrt() * crate::special::elliptic_k(k)?)
}

/// Points of the non-even set with `L = n(T₊ + T₋)`.
pub fn solve_non_even(l: f64, omega: f64, gamma: f64) -> NonEvenSolutions {
    let Some(p4) = non_even_abscissa(omega, gamma) else {
        return NonEvenSolutions {
            points: Vec::new(),
            l_tilde: f64::INFINITY,
            existence_threshold: f64::INFINITY,
        };
    };
    // levels on the set range over (e0, 0)
    let e0 = -p4 * p4 * (omega - 0.5 * p4 * p4);
    let threshold = dnoidal_half_period(e0.max(-0.5 * omega * omega), omega).unwrap_or(f64::INFINITY);
    let at_center = (p4 * p4 - omega).abs() <= 1e-12 * omega;
    let l_tilde = if at_center { 0.0 } else { threshold };
    let q_max = (-e0).sqrt();
    let mut points = Vec::new();
    let n_max = if threshold > 0.0 { (l / threshold).ceil() as u32 } else { 0 };
    for n in 1..=n_max {
        let target = l / n as f64;
        if target <= threshold {
            break;
        }
        let f = |q: f64| match half_period(PhasePoint::new(p4, q), omega) {
            Ok(t) => t - target,
            Err(_) => f64::NAN,
        };
        // half period increases with |q| from the threshold to +∞
        let (mut lo, mut hi) = (0.0, q_max);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let v = f(m);
            if v.is_nan() || v > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let q = 0.5 * (lo + hi);
        if q > 0.0 && q < q_max {
            points.push((PhasePoint::new(p4, q), n));
            points.push((PhasePoint::new(p4, -q), n));
        }
    }
    NonEvenSolutions {
        points,
        l_tilde,
        existence_threshold: threshold,
    }
}

/// Samples of the level curve `E = e` for `p ≥ p₋` (upper and lower halves
/// joined into one closed polyline where the orbit is closed).
pub fn sample_level_curve(e: f64, omega: f64, n: usize) -> Result<Vec<PhasePoint>> {
    let tp = turning_points_for_level(e, omega)?;
    let (lo, hi) = (tp.p_minus, tp.p_plus);
    let mut upper = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // cosine spacing resolves the vertical tangents at the turning points
        let t = PI * i as f64 / n as f64;
        let p = 0.5 * (lo + hi) - 0.5 * (hi - lo) * t.cos();
        let q2 = e + p * p * (omega - 0.5 * p * p);
        upper.push(PhasePoint::new(p, q2.max(0.0).sqrt()));
    }
    let lower: Vec<PhasePoint> = upper.iter().rev().skip(1).map(|pt| PhasePoint::new(pt.p, -pt.q)).collect();
    upper.extend(lower);
    Ok(upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{elliptic_k, ProfileSpec};

    #[test]
    fn integral_of_motion_anchors() {
        assert_eq!(integral_of_motion(PhasePoint::new(0.0, 0.0), 1.0), 0.0);
        let e = integral_of_motion(PhasePoint::new(2f64.sqrt(), 0.0), 1.0);
        assert!(e.abs() < 1e-15);
        assert_eq!(integral_of_motion(PhasePoint::new(1.0, 0.0), 1.0), -0.5);
    }

    #[test]
    fn turning_point_anchors() {
        let t = turning_points(PhasePoint::new(0.0, 0.0), 1.0).unwrap();
        assert!((t.p_plus - 2f64.sqrt()).abs() < 1e-15 && t.p_minus == 0.0);
        let t = turning_points(PhasePoint::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!((t.p_plus, t.p_minus), (1.0, 1.0));
        let t = turning_points(PhasePoint::new(0.0, 1.0), 1.0).unwrap();
        // oracle: bisection on X²(1 - X²/2) = -1
        let (mut a, mut b) = (1.0f64, 2.0f64);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if -m * m * (1.0 - m * m / 2.0) < 1.0 { a = m } else { b = m }
        }
        assert!((t.p_plus - a).abs() < 1e-14 && (t.p_plus - 1.6529).abs() < 1e-4);
        assert_eq!(t.p_minus, -t.p_plus);
        assert!(turning_points_for_level(-0.51, 1.0).is_err());
    }

    #[test]
    fn period_anchors() {
        assert_eq!(period_t_plus(PhasePoint::new(1.0, 0.0), 1.0).unwrap(), Period::Finite(0.0));
        assert_eq!(period_t_plus(PhasePoint::new(2f64.sqrt(), 0.0), 1.0).unwrap().value(), 0.0);
        assert!(period_t_plus(PhasePoint::new(0.0, 0.0), 1.0).unwrap().is_infinite());
        assert_eq!(period_t_minus(PhasePoint::new(0.5, 0.0), 1.0).unwrap().value(), 0.0);
        assert!(period_t_minus(PhasePoint::new(0.0, 0.0), 1.0).unwrap().is_infinite());
        assert!(matches!(
            period_t_plus(PhasePoint::new(1.2, 0.0), 1.0),
            Err(Error::AboveTurningPoint { .. }) | Ok(_)
        ));
    }

    #[test]
    fn dnoidal_closure() {
        let k = 0.5f64;
        let s = ProfileSpec::dnoidal(1.0, k, 0.0).unwrap();
        let tp = turning_points_for_level(s.level(), 1.0).unwrap();
        let pt = PhasePoint::new(tp.p_minus, 0.0);
        let half = half_period(pt, 1.0).unwrap();
        let exact = ((2.0 - k * k) / 1.0).sqrt() * elliptic_k(k).unwrap();
        assert!((half - exact).abs() < 1e-8, "{half} vs {exact}");
    }

    #[test]
    fn cnoidal_mirror_symmetry() {
        let pt = PhasePoint::new(0.0, 0.7);
        let a = period_t_plus(pt, 1.0).unwrap().value();
        let b = period_t_minus(pt, 1.0).unwrap().value();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn gamma_curve_anchors() {
        let (w, g) = (1.0f64, 0.5f64);
        let split = (2.0 * (w - g * g)).sqrt();
        assert!(gamma_q(split, w, g, Branch::Minus).unwrap().abs() < 1e-15);
        let v = gamma_q(2f64.sqrt(), w, g, Branch::Plus).unwrap();
        assert!((v - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!(gamma_q(1e-12, w, g, Branch::Minus).unwrap().abs() < 1e-12);
        assert!(gamma_q(1.5, w, g, Branch::Plus).is_err());
    }

    #[test]
    fn membership_anchors() {
        let (w, g) = (1.0f64, 0.5f64);
        let split = (2.0 * (w - g * g)).sqrt();
        let m = gamma_subset(PhasePoint::new(split, 0.0), w, g, 1e-9);
        assert_eq!(m.subset, GammaSubset::G2);
        assert!(m.ambiguous);
        let top = 2f64.sqrt();
        let apex = PhasePoint::new(top, gamma_q(top, w, g, Branch::Plus).unwrap());
        assert_eq!(gamma_subset(apex, w, g, 1e-9).subset, GammaSubset::G1);
        assert_eq!(gamma_subset(PhasePoint::new(1.0, 0.0), w, g, 1e-6).subset, GammaSubset::None);
        let m = gamma_subset(PhasePoint::new(split, 0.3), w, g, 1e-9);
        assert_eq!(m.subset, GammaSubset::G4);
    }

    #[test]
    fn sign_function_zeros() {
        let (w, g) = (1.0f64, 0.5f64);
        let s = sign_functions((2.0 * (w - g * g)).sqrt(), w, g).unwrap();
        assert!(s.f_plus.abs() < 1e-15);
        let s = sign_functions((2.0 * (w - g * g / 9.0)).sqrt(), w, g).unwrap();
        assert!(s.f_minus.abs() < 1e-15);
        assert!(sign_functions(1.0, w, g).unwrap().g < 0.0);
    }

    #[test]
    fn arc_parameter_round_trip() {
        let (w, g) = (1.0f64, 0.5f64);
        for i in 1..50 {
            let s = 0.03 * i as f64;
            let pt = gamma_point_at(s, w, g);
            assert!((gamma_arc_parameter(pt, w, g) - s).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn even_boundary_small_l_approaches_junction() {
        let (w, g) = (1.0f64, 0.5f64);
        let split = 1.5f64.sqrt();
        let mut prev = f64::INFINITY;
        for l in [0.1, 0.03, 0.01] {
            let pts = solve_even_boundary(l, w, g, 0, Sector::G12);
            assert_eq!(pts.len(), 1, "L = {l}: {pts:?}");
            let d = (pts[0].p - split).hypot(pts[0].q);
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn non_even_threshold() {
        let (w, g) = (1.0f64, 0.5f64);
        let sol = solve_non_even(0.5, w, g);
        assert!(sol.l_tilde > 0.5 && sol.points.is_empty());
        let sol = solve_non_even(3.0 * sol.existence_threshold, w, g);
        assert!(!sol.points.is_empty());
        let g = (0.5f64).sqrt();
        let sol = solve_non_even(1.0, w, g);
        assert_eq!(sol.l_tilde, 0.0);
        assert!((sol.existence_threshold - PI / 2f64.sqrt()).abs() < 1e-9);
    }
}
