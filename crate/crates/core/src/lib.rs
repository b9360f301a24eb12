//! Compile multi-depot capacitated vehicle routing problems to QUBO, sample
//! them, and turn bitstrings back into validated routes.
//!
//! ```
//! use mdcvrp_core::{assemble, decode, parse_instance, solve_exhaustive, validate_routes};
//! use mdcvrp_core::{CompileConfig, ExhaustiveConfig};
//!
//! let inst = parse_instance(r#"{
//!     "depots": [{"id": "D1", "capacity": 3, "position": [0, 0]}],
//!     "vehicles": [{"id": "K1", "depot": "D1", "capacity": 3}],
//!     "customers": [{"id": "C1", "demand": 1, "position": [0, 1]},
//!                   {"id": "C2", "demand": 2, "position": [1, 1]}]
//! }"#).unwrap();
//! let (model, layout) = assemble(&inst, &CompileConfig::default()).unwrap();
//! let samples = solve_exhaustive(&model, &ExhaustiveConfig::default()).unwrap();
//! let plan = decode(&samples.best().unwrap().bits, &layout).unwrap();
//! assert!(validate_routes(&plan, &inst).passed());
//! ```

pub mod compiler;
pub mod decoder;
pub mod dynamic;
pub mod instance;
pub mod io;
pub mod layout;
pub mod model;
pub mod problem;
pub mod render;
pub mod scalar;
pub mod solver;

pub use compiler::{
    assemble, assemble_problem, energy_breakdown, CompileConfig, CompileError, FlowForm,
    HamiltonianTerm, PenaltyConfig,
};
pub use decoder::{
    decode, encode, plan_cost, route_distance, validate_against, validate_routes, Constraint,
    DecodeError, RoutePlan, ValidationReport, Violation,
};
pub use dynamic::{
    apply_progress, compile_rerouting, remaining_depot_capacity, remaining_vehicle_capacity,
    ExecutionState, ReroutingConfig, ReroutingModel, Requests,
};
pub use instance::{parse_instance, validate_instance, Distance, Instance, InstanceError};
pub use io::{export_layout, export_qubo, import_qubo, parse_layout};
pub use layout::{
    build_layout, estimate_size, layout_for_instance, LayoutOptions, SizeReport, SlackEncoding,
    VariableLayout,
};
pub use model::{ising_to_qubo, qubo_to_ising, IsingModel, Polynomial, QuboModel};
pub use problem::{RoutingProblem, StartSymbol};
pub use render::render_svg;
pub use scalar::{Field, Scalar};
pub use solver::{
    solve_exhaustive, solve_simulated_annealing, AnnealSchedule, ExhaustiveConfig, Sample,
    SampleSet,
};

/// Exact integer QUBO, as emitted by the compiler.
pub type Qubo = QuboModel<i64>;
/// Floating-point QUBO for externally produced models.
pub type FloatQubo = QuboModel<f64>;
/// Exact Ising model; biases and couplings are multiples of 1/4.
pub type RationalIsing = IsingModel<num_rational::Ratio<i64>>;
pub type FloatIsing = IsingModel<f64>;
