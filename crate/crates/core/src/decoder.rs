//! Bitstrings to routes and back, plus a route validator that checks the
//! routing constraints directly on the plan without touching the QUBO.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Distance, Instance};
use crate::layout::{SlackOwner, VariableLayout};
use crate::problem::RoutingProblem;

/// Ordered customer ids per vehicle id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutePlan {
    pub routes: BTreeMap<String, Vec<String>>,
}

impl RoutePlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_route(mut self, vehicle: &str, customers: &[&str]) -> Self {
        self.routes.insert(
            vehicle.to_string(),
            customers.iter().map(|c| c.to_string()).collect(),
        );
        self
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Demand carried by each routed vehicle; unknown customers count as 0.
    pub fn loads(&self, problem: &RoutingProblem) -> BTreeMap<String, i64> {
        self.routes
            .iter()
            .map(|(k, route)| {
                let load = route
                    .iter()
                    .filter_map(|c| problem.customer_index(c))
                    .map(|i| problem.demand[i])
                    .sum();
                (k.clone(), load)
            })
            .collect()
    }
}

impl fmt::Display for RoutePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (vehicle, route) in &self.routes {
            writeln!(f, "{vehicle}: {}", route.join(" -> "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bitstring has {found} bits, layout has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vehicle `{vehicle}` has no first stop")]
    NoStart { vehicle: String },
    #[error("vehicle `{vehicle}` has several first stops: {customers:?}")]
    MultipleStarts { vehicle: String, customers: Vec<String> },
    #[error("route of vehicle `{vehicle}` stops at `{at}` with no successor and no last-stop bit")]
    BrokenChain { vehicle: String, at: String },
    #[error("vehicle `{vehicle}` leaves `{at}` towards several customers: {next:?}")]
    MultipleSuccessors {
        vehicle: String,
        at: String,
        next: Vec<String>,
    },
    #[error("route of vehicle `{vehicle}` revisits `{at}`")]
    CycleDetected { vehicle: String, at: String },
    #[error("vehicle `{vehicle}` has set bits off its route: {bits:?}")]
    DanglingArcs { vehicle: String, bits: Vec<String> },
}

/// Follows each vehicle's chain from its first-stop bit through arc bits to
/// its last-stop bit. Slack bits are ignored.
pub fn decode(bits: &[bool], layout: &VariableLayout) -> Result<RoutePlan, DecodeError> {
    if bits.len() != layout.total_bits {
        return Err(DecodeError::LengthMismatch {
            expected: layout.total_bits,
            found: bits.len(),
        });
    }
    let n = layout.n_customers();
    let cid = |i: usize| layout.customer_ids[i].clone();
    let mut plan = RoutePlan::new();
    for k in 0..layout.n_vehicles() {
        let vehicle = layout.vehicle_ids[k].clone();
        let starts: Vec<usize> = (0..n).filter(|&i| bits[layout.start(i, k)]).collect();
        let start = match starts.as_slice() {
            [] => return Err(DecodeError::NoStart { vehicle }),
            [one] => *one,
            many => {
                return Err(DecodeError::MultipleStarts {
                    vehicle,
                    customers: many.iter().map(|&i| cid(i)).collect(),
                })
            }
        };
        let mut used = BTreeSet::from([layout.start(start, k)]);
        let mut route = vec![start];
        let mut current = start;
        loop {
            if bits[layout.end(current, k)] {
                used.insert(layout.end(current, k));
                break;
            }
            let next: Vec<usize> = (0..n)
                .filter(|&j| j != current && bits[layout.arc(current, j, k).unwrap()])
                .collect();
            let j = match next.as_slice() {
                [] => {
                    return Err(DecodeError::BrokenChain {
                        vehicle,
                        at: cid(current),
                    })
                }
                [one] => *one,
                many => {
                    return Err(DecodeError::MultipleSuccessors {
                        vehicle,
                        at: cid(current),
                        next: many.iter().map(|&j| cid(j)).collect(),
                    })
                }
            };
            used.insert(layout.arc(current, j, k).unwrap());
            if route.contains(&j) {
                return Err(DecodeError::CycleDetected { vehicle, at: cid(j) });
            }
            route.push(j);
            current = j;
        }
        let mut dangling = Vec::new();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let b = layout.arc(i, j, k).unwrap();
                if bits[b] && !used.contains(&b) {
                    dangling.push(b);
                }
            }
            let e = layout.end(i, k);
            if bits[e] && !used.contains(&e) {
                dangling.push(e);
            }
        }
        if !dangling.is_empty() {
            dangling.sort_unstable();
            return Err(DecodeError::DanglingArcs {
                vehicle,
                bits: dangling
                    .into_iter()
                    .filter_map(|b| layout.symbol_name(b))
                    .collect(),
            });
        }
        plan.routes
            .insert(vehicle, route.into_iter().map(cid).collect());
    }
    Ok(plan)
}

/// Routing constraints C1..C8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Constraint {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
}

impl Constraint {
    pub const ALL: [Constraint; 8] = [
        Constraint::C1,
        Constraint::C2,
        Constraint::C3,
        Constraint::C4,
        Constraint::C5,
        Constraint::C6,
        Constraint::C7,
        Constraint::C8,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Constraint::C1 => "every customer is left exactly once",
            Constraint::C2 => "every customer is entered exactly once",
            Constraint::C3 => "every vehicle has one first stop",
            Constraint::C4 => "every vehicle has one last stop",
            Constraint::C5 => "routes are continuous",
            Constraint::C6 => "no subtours",
            Constraint::C7 => "vehicle capacity",
            Constraint::C8 => "depot capacity",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotServed { customer: String },
    ServedMultiple { customer: String, vehicles: Vec<String> },
    UnknownCustomer { customer: String, vehicle: String },
    UnknownVehicle { vehicle: String },
    EmptyRoute { vehicle: String },
    VehicleOverload { vehicle: String, load: i64, capacity: i64 },
    DepotOverload { depot: String, load: i64, capacity: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotServed { customer } => write!(f, "customer {customer} is not served"),
            Violation::ServedMultiple { customer, vehicles } => {
                write!(f, "customer {customer} served {} times by {vehicles:?}", vehicles.len())
            }
            Violation::UnknownCustomer { customer, vehicle } => {
                write!(f, "vehicle {vehicle} visits unknown customer {customer}")
            }
            Violation::UnknownVehicle { vehicle } => write!(f, "unknown vehicle {vehicle}"),
            Violation::EmptyRoute { vehicle } => write!(f, "vehicle {vehicle} has an empty route"),
            Violation::VehicleOverload { vehicle, load, capacity } => {
                write!(f, "vehicle {vehicle} carries {load} > {capacity}")
            }
            Violation::DepotOverload { depot, load, capacity } => {
                write!(f, "depot {depot} dispatches {load} > {capacity}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, constraint: Constraint) -> &ConstraintCheck {
        self.checks
            .iter()
            .find(|c| c.constraint == constraint)
            .expect("report covers every constraint")
    }

    pub fn violations(&self) -> impl Iterator<Item = (Constraint, &Violation)> {
        self.checks
            .iter()
            .flat_map(|c| c.violations.iter().map(move |v| (c.constraint, v)))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let mark = if check.passed { "pass" } else { "FAIL" };
            writeln!(f, "{} {mark}  {}", check.constraint, check.constraint.description())?;
            for v in &check.violations {
                writeln!(f, "     - {v}")?;
            }
        }
        Ok(())
    }
}

/// Validates a plan of the static problem.
pub fn validate_routes(plan: &RoutePlan, inst: &Instance) -> ValidationReport {
    validate_against(plan, &RoutingProblem::from_instance(inst))
}

/// Validates a plan against any routing problem view.
pub fn validate_against(plan: &RoutePlan, problem: &RoutingProblem) -> ValidationReport {
    let mut visits: BTreeMap<&str, Vec<String>> = problem
        .customer_ids
        .iter()
        .map(|c| (c.as_str(), Vec::new()))
        .collect();
    let mut coverage = Vec::new();
    let mut terminals = Vec::new();
    let mut vehicle_load = vec![0i64; problem.n_vehicles()];
    for (vehicle, route) in &plan.routes {
        let k = problem.vehicle_index(vehicle);
        if k.is_none() {
            terminals.push(Violation::UnknownVehicle {
                vehicle: vehicle.clone(),
            });
        }
        for c in route {
            match visits.get_mut(c.as_str()) {
                Some(v) => v.push(vehicle.clone()),
                None => coverage.push(Violation::UnknownCustomer {
                    customer: c.clone(),
                    vehicle: vehicle.clone(),
                }),
            }
            if let (Some(k), Some(i)) = (k, problem.customer_index(c)) {
                vehicle_load[k] += problem.demand[i];
            }
        }
    }
    for (customer, vehicles) in &visits {
        match vehicles.len() {
            0 => coverage.push(Violation::NotServed {
                customer: customer.to_string(),
            }),
            1 => {}
            _ => coverage.push(Violation::ServedMultiple {
                customer: customer.to_string(),
                vehicles: vehicles.clone(),
            }),
        }
    }
    for vehicle in &problem.vehicle_ids {
        if plan.routes.get(vehicle).is_none_or(|r| r.is_empty()) {
            terminals.push(Violation::EmptyRoute {
                vehicle: vehicle.clone(),
            });
        }
    }
    let capacity: Vec<Violation> = (0..problem.n_vehicles())
        .filter(|&k| vehicle_load[k] > problem.vehicle_bound[k])
        .map(|k| Violation::VehicleOverload {
            vehicle: problem.vehicle_ids[k].clone(),
            load: vehicle_load[k],
            capacity: problem.vehicle_bound[k],
        })
        .collect();
    let depot: Vec<Violation> = (0..problem.n_depots())
        .filter_map(|d| {
            let load: i64 = (0..problem.n_vehicles())
                .filter(|&k| problem.vehicle_depot[k] == d)
                .map(|k| vehicle_load[k])
                .sum();
            (load > problem.depot_bound[d]).then(|| Violation::DepotOverload {
                depot: problem.depot_ids[d].clone(),
                load,
                capacity: problem.depot_bound[d],
            })
        })
        .collect();
    let check = |constraint, violations: Vec<Violation>| ConstraintCheck {
        constraint,
        passed: violations.is_empty(),
        violations,
    };
    // a list of stops is continuous and acyclic by construction
    ValidationReport {
        checks: vec![
            check(Constraint::C1, coverage.clone()),
            check(Constraint::C2, coverage),
            check(Constraint::C3, terminals.clone()),
            check(Constraint::C4, terminals),
            check(Constraint::C5, Vec::new()),
            check(Constraint::C6, Vec::new()),
            check(Constraint::C7, capacity),
            check(Constraint::C8, depot),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("vehicle `{0}` has an empty route")]
    EmptyRoute(String),
    #[error("unknown vehicle `{0}`")]
    UnknownVehicle(String),
    #[error("unknown customer `{0}`")]
    UnknownCustomer(String),
}

fn local_route(
    problem: &RoutingProblem,
    vehicle: &str,
    route: &[String],
) -> Result<(usize, Vec<usize>), RouteError> {
    let k = problem
        .vehicle_index(vehicle)
        .ok_or_else(|| RouteError::UnknownVehicle(vehicle.to_string()))?;
    if route.is_empty() {
        return Err(RouteError::EmptyRoute(vehicle.to_string()));
    }
    let stops = route
        .iter()
        .map(|c| {
            problem
                .customer_index(c)
                .ok_or_else(|| RouteError::UnknownCustomer(c.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((k, stops))
}

/// Total scaled distance of a plan; vehicles absent from the plan add 0.
pub fn plan_cost(plan: &RoutePlan, problem: &RoutingProblem) -> Result<i64, RouteError> {
    plan.routes.iter().try_fold(0i64, |acc, (vehicle, route)| {
        let (k, stops) = local_route(problem, vehicle, route)?;
        Ok(acc + problem.route_cost(k, &stops).expect("non-empty route"))
    })
}

/// Distance travelled by all vehicles, each leaving and returning to its
/// home depot.
pub fn route_distance(plan: &RoutePlan, inst: &Instance) -> Result<Distance, RouteError> {
    let problem = RoutingProblem::from_instance(inst);
    Ok(Ratio::new(plan_cost(plan, &problem)?, problem.scale))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("plan is infeasible:\n{0}")]
    Infeasible(ValidationReport),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error("slack register `{register}` cannot hold residual {residual}")]
    Unrepresentable { register: String, residual: i64 },
}

/// Bitstring of a feasible plan with every slack register set to its
/// residual, so all penalty terms vanish.
pub fn encode(
    plan: &RoutePlan,
    layout: &VariableLayout,
    problem: &RoutingProblem,
) -> Result<Vec<bool>, EncodeError> {
    let report = validate_against(plan, problem);
    if !report.passed() {
        return Err(EncodeError::Infeasible(report));
    }
    let mut bits = vec![false; layout.total_bits];
    let mut successor: Vec<Option<usize>> = vec![None; problem.n_customers()];
    let mut load = vec![0i64; problem.n_vehicles()];
    for (vehicle, route) in &plan.routes {
        let (k, stops) = local_route(problem, vehicle, route)?;
        bits[layout.start(stops[0], k)] = true;
        for w in stops.windows(2) {
            bits[layout.arc(w[0], w[1], k).unwrap()] = true;
            successor[w[0]] = Some(w[1]);
        }
        bits[layout.end(*stops.last().unwrap(), k)] = true;
        load[k] = stops.iter().map(|&i| problem.demand[i]).sum();
    }
    for reg in &layout.slack_registers {
        let used = match &reg.owner {
            SlackOwner::Subtour(set) => set
                .iter()
                .filter(|&&i| successor[i].is_some_and(|j| set.binary_search(&j).is_ok()))
                .count() as i64,
            SlackOwner::Vehicle(k) => load[*k],
            SlackOwner::Depot(d) => (0..problem.n_vehicles())
                .filter(|&k| problem.vehicle_depot[k] == *d)
                .map(|k| load[k])
                .sum(),
        };
        let residual = reg.bound - used;
        let slack = reg.encode(residual).ok_or_else(|| EncodeError::Unrepresentable {
            register: layout.owner_tag(&reg.owner),
            residual,
        })?;
        for (l, on) in slack.into_iter().enumerate() {
            bits[reg.first_bit + l] = on;
        }
    }
    Ok(bits)
}
