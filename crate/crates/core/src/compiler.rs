//! Expansion of the routing objective and the eight constraint penalties
//! into one integer QUBO over a [`VariableLayout`].
//!
//! Every constraint is written as an affine expression `A(x) + slack - b`
//! that must vanish, and contributes `B * (A(x) + slack - b)^2`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;
use crate::layout::{build_layout, LayoutError, LayoutOptions, SlackOwner, VariableLayout};
use crate::model::{Polynomial, QuboModel};
use crate::problem::RoutingProblem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("penalty weight must be non-negative, got {0}")]
    NegativePenalty(i64),
}

/// Uniform penalty weight `B` applied to every constraint family.
///
/// `B = 0` is accepted as a diagnostic mode that leaves only the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PenaltyConfig {
    pub weight: i64,
}

impl PenaltyConfig {
    pub fn new(weight: i64) -> Result<Self, CompileError> {
        if weight < 0 {
            Err(CompileError::NegativePenalty(weight))
        } else {
            Ok(Self { weight })
        }
    }

    /// One more than the sum of every scaled distance entry, so a unit of
    /// violation always costs more than any route can save.
    pub fn default_for(inst: &Instance) -> Self {
        Self {
            weight: 1 + inst.scaled().total(),
        }
    }
}

/// Form of the flow-conservation penalty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowForm {
    /// In-arcs minus out-arcs over customer arcs only. Penalizes the first
    /// and last stop of every multi-stop route.
    ArcsOnly,
    /// Counts the first-stop variable as inflow and the last-stop variable
    /// as outflow.
    #[default]
    Corrected,
}

impl FlowForm {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowForm::ArcsOnly => "arcs",
            FlowForm::Corrected => "corrected",
        }
    }
}

impl std::str::FromStr for FlowForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arcs" => Ok(FlowForm::ArcsOnly),
            "corrected" => Ok(FlowForm::Corrected),
            other => Err(format!("unknown flow form `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileConfig {
    /// `None` picks [`PenaltyConfig::default_for`].
    pub penalty: Option<PenaltyConfig>,
    pub flow: FlowForm,
    pub layout: LayoutOptions,
    /// When false the distance objective is left out (constraint-only model).
    pub include_objective: bool,
}

impl Default for CompileConfig {
    fn default() -> Self {
        Self {
            penalty: None,
            flow: FlowForm::Corrected,
            layout: LayoutOptions::default(),
            include_objective: true,
        }
    }
}

/// Named parts of the full Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum HamiltonianTerm {
    Objective,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
}

impl HamiltonianTerm {
    pub const CONSTRAINTS: [HamiltonianTerm; 8] = [
        HamiltonianTerm::C1,
        HamiltonianTerm::C2,
        HamiltonianTerm::C3,
        HamiltonianTerm::C4,
        HamiltonianTerm::C5,
        HamiltonianTerm::C6,
        HamiltonianTerm::C7,
        HamiltonianTerm::C8,
    ];
}

impl fmt::Display for HamiltonianTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            HamiltonianTerm::Objective => "H_O",
            HamiltonianTerm::C1 => "H_C1",
            HamiltonianTerm::C2 => "H_C2",
            HamiltonianTerm::C3 => "H_C3",
            HamiltonianTerm::C4 => "H_C4",
            HamiltonianTerm::C5 => "H_C5",
            HamiltonianTerm::C6 => "H_C6",
            HamiltonianTerm::C7 => "H_C7",
            HamiltonianTerm::C8 => "H_C8",
        };
        f.write_str(name)
    }
}

fn finish(mut poly: Polynomial<i64>) -> Polynomial<i64> {
    poly.prune();
    poly
}

/// Route distance as linear terms on arc, first-stop and last-stop bits.
pub fn compile_objective(problem: &RoutingProblem, layout: &VariableLayout) -> Polynomial<i64> {
    let mut poly = Polynomial::new();
    let n = problem.n_customers();
    for k in 0..problem.n_vehicles() {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                poly.add_linear(layout.arc(i, j, k).unwrap(), problem.arc[i][j]);
            }
            poly.add_linear(layout.start(i, k), problem.start_leg[k][i]);
            poly.add_linear(layout.end(i, k), problem.end_leg[k][i]);
        }
    }
    finish(poly)
}

fn outflow_terms(problem: &RoutingProblem, layout: &VariableLayout, i: usize) -> Vec<(usize, i64)> {
    let n = problem.n_customers();
    let mut terms = Vec::new();
    for k in 0..problem.n_vehicles() {
        terms.extend((0..n).filter(|&j| j != i).map(|j| (layout.arc(i, j, k).unwrap(), 1)));
        terms.push((layout.end(i, k), 1));
    }
    terms
}

fn inflow_terms(problem: &RoutingProblem, layout: &VariableLayout, i: usize) -> Vec<(usize, i64)> {
    let n = problem.n_customers();
    let mut terms = Vec::new();
    for k in 0..problem.n_vehicles() {
        terms.extend((0..n).filter(|&j| j != i).map(|j| (layout.arc(j, i, k).unwrap(), 1)));
        terms.push((layout.start(i, k), 1));
    }
    terms
}

/// C1 (each customer left exactly once) and C2 (entered exactly once).
pub fn compile_assignment_constraints(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
) -> (Polynomial<i64>, Polynomial<i64>) {
    let (mut c1, mut c2) = (Polynomial::new(), Polynomial::new());
    for i in 0..problem.n_customers() {
        c1.add_squared_affine(&outflow_terms(problem, layout, i), -1, penalty.weight);
        c2.add_squared_affine(&inflow_terms(problem, layout, i), -1, penalty.weight);
    }
    (finish(c1), finish(c2))
}

/// C3 (one first stop per vehicle) and C4 (one last stop per vehicle).
pub fn compile_terminal_constraints(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
) -> (Polynomial<i64>, Polynomial<i64>) {
    let (mut c3, mut c4) = (Polynomial::new(), Polynomial::new());
    let n = problem.n_customers();
    for k in 0..problem.n_vehicles() {
        let starts: Vec<_> = (0..n).map(|i| (layout.start(i, k), 1)).collect();
        let ends: Vec<_> = (0..n).map(|i| (layout.end(i, k), 1)).collect();
        c3.add_squared_affine(&starts, -1, penalty.weight);
        c4.add_squared_affine(&ends, -1, penalty.weight);
    }
    (finish(c3), finish(c4))
}

/// C5, flow balance per customer and vehicle.
pub fn compile_flow_constraint(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
    form: FlowForm,
) -> Polynomial<i64> {
    let mut poly = Polynomial::new();
    let n = problem.n_customers();
    for k in 0..problem.n_vehicles() {
        for i in 0..n {
            let mut terms = Vec::with_capacity(2 * n);
            for j in (0..n).filter(|&j| j != i) {
                terms.push((layout.arc(j, i, k).unwrap(), 1));
                terms.push((layout.arc(i, j, k).unwrap(), -1));
            }
            if form == FlowForm::Corrected {
                terms.push((layout.start(i, k), 1));
                terms.push((layout.end(i, k), -1));
            }
            poly.add_squared_affine(&terms, 0, penalty.weight);
        }
    }
    finish(poly)
}

/// C6, at most `|S| - 1` arcs inside every customer subset `S`.
pub fn compile_subtour_constraints(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
) -> Polynomial<i64> {
    let mut poly = Polynomial::new();
    for reg in layout.subtour_registers() {
        let SlackOwner::Subtour(subset) = &reg.owner else {
            unreachable!("subtour block holds subtour registers")
        };
        let mut terms = Vec::new();
        for k in 0..problem.n_vehicles() {
            for &i in subset {
                for &j in subset.iter().filter(|&&j| j != i) {
                    terms.push((layout.arc(i, j, k).unwrap(), 1));
                }
            }
        }
        terms.extend(reg.bits());
        poly.add_squared_affine(&terms, -reg.bound, penalty.weight);
    }
    finish(poly)
}

/// Load terms of vehicle `k`: each served customer has exactly one outgoing
/// arc or last-stop bit, weighted by its demand.
fn load_terms(problem: &RoutingProblem, layout: &VariableLayout, k: usize) -> Vec<(usize, i64)> {
    let n = problem.n_customers();
    let mut terms = Vec::new();
    for i in 0..n {
        let q = problem.demand[i];
        terms.extend((0..n).filter(|&j| j != i).map(|j| (layout.arc(i, j, k).unwrap(), q)));
        terms.push((layout.end(i, k), q));
    }
    terms
}

/// C7, vehicle capacity.
pub fn compile_vehicle_capacity(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
) -> Polynomial<i64> {
    let mut poly = Polynomial::new();
    for k in 0..problem.n_vehicles() {
        let reg = layout.vehicle_register(k);
        let mut terms = load_terms(problem, layout, k);
        terms.extend(reg.bits());
        poly.add_squared_affine(&terms, -reg.bound, penalty.weight);
    }
    finish(poly)
}

/// C8, depot capacity over the vehicles homed at each depot.
pub fn compile_depot_capacity(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
) -> Polynomial<i64> {
    let mut poly = Polynomial::new();
    for d in 0..problem.n_depots() {
        let reg = layout.depot_register(d);
        let mut terms = Vec::new();
        for k in (0..problem.n_vehicles()).filter(|&k| problem.vehicle_depot[k] == d) {
            terms.extend(load_terms(problem, layout, k));
        }
        terms.extend(reg.bits());
        poly.add_squared_affine(&terms, -reg.bound, penalty.weight);
    }
    finish(poly)
}

/// Every Hamiltonian part, separately.
pub fn compile_terms(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
    flow: FlowForm,
) -> Vec<(HamiltonianTerm, Polynomial<i64>)> {
    let (c1, c2) = compile_assignment_constraints(problem, layout, penalty);
    let (c3, c4) = compile_terminal_constraints(problem, layout, penalty);
    vec![
        (HamiltonianTerm::Objective, compile_objective(problem, layout)),
        (HamiltonianTerm::C1, c1),
        (HamiltonianTerm::C2, c2),
        (HamiltonianTerm::C3, c3),
        (HamiltonianTerm::C4, c4),
        (HamiltonianTerm::C5, compile_flow_constraint(problem, layout, penalty, flow)),
        (HamiltonianTerm::C6, compile_subtour_constraints(problem, layout, penalty)),
        (HamiltonianTerm::C7, compile_vehicle_capacity(problem, layout, penalty)),
        (HamiltonianTerm::C8, compile_depot_capacity(problem, layout, penalty)),
    ]
}

/// Compiles a routing problem with an explicit penalty.
pub fn assemble_problem(
    problem: &RoutingProblem,
    penalty: PenaltyConfig,
    config: &CompileConfig,
) -> Result<(QuboModel<i64>, VariableLayout), CompileError> {
    let layout = build_layout(problem, &config.layout)?;
    let mut total = Polynomial::new();
    for (term, poly) in compile_terms(problem, &layout, penalty, config.flow) {
        if term == HamiltonianTerm::Objective && !config.include_objective {
            continue;
        }
        total.add_scaled(&poly, 1);
    }
    let mut model =
        QuboModel::new(layout.total_bits, total).expect("layout covers every compiled bit");
    model.penalty = Some(penalty);
    model.scale = problem.scale;
    Ok((model, layout))
}

/// Compiles the static model `H_O + sum(H_Ci)` of an instance.
pub fn assemble(
    inst: &Instance,
    config: &CompileConfig,
) -> Result<(QuboModel<i64>, VariableLayout), CompileError> {
    let penalty = config.penalty.unwrap_or_else(|| PenaltyConfig::default_for(inst));
    assemble_problem(&RoutingProblem::from_instance(inst), penalty, config)
}

/// Value of each Hamiltonian part on `bits`.
pub fn energy_breakdown(
    problem: &RoutingProblem,
    layout: &VariableLayout,
    penalty: PenaltyConfig,
    flow: FlowForm,
    bits: &[bool],
) -> Vec<(HamiltonianTerm, i64)> {
    compile_terms(problem, layout, penalty, flow)
        .into_iter()
        .map(|(t, p)| (t, p.evaluate(bits)))
        .collect()
}
