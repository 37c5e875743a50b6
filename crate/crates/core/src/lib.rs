//! Action ground states of the cubic NLS on a tadpole graph with a
//! δ-coupling at the vertex.
//!
//! * [`graph`]: grid, grid functions, quadratures, the discrete operator.
//! * [`special`]: elliptic integral, Jacobi functions, exact profiles.
//! * [`phase`]: integral of motion, period functions, Γ-curves and the
//!   quantization of boundary data.
//! * [`states`]: exact stationary states and the shape classifier.
//! * [`variational`]: action, Nehari projection, gradient flow, sweeps.
//! * [`spectrum`]: eigenvalues and the resolvent of the linear operator.
//! * [`io`]: CSV/JSON writers.

pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod phase;
pub mod quadrature;
pub mod special;
pub mod spectrum;
pub mod states;
pub mod variational;

pub use error::{Error, Result};
pub use graph::{
    assemble_hamiltonian, norms, pde_residual, vertex_residuals, BorderedOperator, Edge, GraphFunction,
    GraphParams, GraphPoint, Norms, VertexResiduals,
};
pub use phase::{
    gamma_distances, gamma_subset, integral_of_motion, period_t_minus, period_t_plus, GammaDistances, GammaSubset,
    Membership, Period, PhasePoint, Sector, TurningPoints,
};
pub use special::{ProfileFamily, ProfileSpec};
pub use spectrum::SpectrumResult;
pub use states::{BoundarySet, LoopType, ShapeCase, ShapeClass, StationaryState, TailType};
pub use variational::{SolveOptions, SolveReport, Solution, SweepRow};
