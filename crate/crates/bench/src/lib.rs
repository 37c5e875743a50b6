//! Shared fixtures for the criterion benches.

use tadpole_core::{GraphFunction, GraphParams};

/// Grid used by the flow benches: `ω = 1`, `γ = 1/2`, `h = 1e-3`.
pub fn flow_grid(l: f64) -> GraphParams {
    GraphParams::with_grid(1.0, 0.5, l, Some(1e-3), None).expect("aligned grid")
}

/// A positive, vertex-continuous grid function.
pub fn smooth_datum(params: &GraphParams) -> GraphFunction {
    let l = params.l;
    let v0 = 1.0 + 0.5 * (2.0 * l).cos();
    GraphFunction::from_fn(params, |x| 1.0 + 0.5 * (2.0 * x).cos(), |x| v0 * (-x).exp())
}
