//! Rerouting after partial execution.
//!
//! A plan has been followed for a number of stops per vehicle and new
//! customers have appeared. The remaining work is compiled as a fresh routing
//! problem over the pending customers: vehicles start from wherever they are,
//! return to their home depot, and carry only their remaining capacity.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;
use thiserror::Error;

use crate::compiler::{assemble_problem, CompileConfig, CompileError, PenaltyConfig};
use crate::decoder::RoutePlan;
use crate::instance::{
    parse_customer, parse_distance_block, Customer, DistanceModel, DistanceSource, Instance,
    InstanceError,
};
use crate::layout::VariableLayout;
use crate::model::QuboModel;
use crate::problem::{RoutingProblem, StartSymbol};

#[derive(Debug, Error)]
pub enum DynamicError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("unknown vehicle `{0}`")]
    UnknownVehicle(String),
    #[error("unknown customer `{0}` in plan")]
    UnknownCustomer(String),
    #[error("customer `{0}` appears more than once in the plan")]
    RepeatedCustomer(String),
    #[error("vehicle `{vehicle}` cannot have served {steps} stops of a {route_len}-stop route")]
    StepOverflow {
        vehicle: String,
        steps: usize,
        route_len: usize,
    },
    #[error("request id `{0}` is already in use")]
    DuplicateRequest(String),
    #[error("requests need positions or a distances block covering every customer")]
    MissingRequestDistances,
    #[error("no pending customers to reroute")]
    NothingPending,
    #[error("infeasible fleet: {0}")]
    InfeasibleFleet(String),
}

/// Newly arrived customers, with either positions or a distances block over
/// all original and new customers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Requests {
    pub customers: Vec<Customer>,
    pub distances: Option<DistanceModel>,
}

impl Requests {
    pub fn none() -> Self {
        Self::default()
    }
}

/// Parses `{"customers": [...], "distances": {...}}`; both keys optional.
pub fn parse_requests(text: &str) -> Result<Requests, InstanceError> {
    let doc: Value = serde_json::from_str(text)?;
    let customers = match doc.get("customers") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(n, v)| parse_customer(v, format!("customers[{n}]")))
            .collect::<Result<_, _>>()?,
        Some(_) => {
            return Err(InstanceError::Schema {
                location: "customers".into(),
                message: "expected an array".into(),
            })
        }
    };
    let distances = match doc.get("distances") {
        None | Some(Value::Null) => None,
        Some(block) => Some(parse_distance_block(block)?),
    };
    Ok(Requests {
        customers,
        distances,
    })
}

/// Parses a progress document: vehicle id to number of stops served.
pub fn parse_progress(text: &str) -> Result<BTreeMap<String, usize>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Where a vehicle is now. Indices refer to the extended instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Depot(usize),
    Customer(usize),
}

/// Bookkeeping of a partially executed plan over the extended customer set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionState {
    instance: Instance,
    served: Vec<Vec<usize>>,
    pending: BTreeSet<usize>,
    current: Vec<Location>,
    requests: Vec<usize>,
}

impl ExecutionState {
    /// Base customers followed by the requests.
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Customers served by each vehicle, in visiting order.
    pub fn served_by(&self, vehicle: usize) -> &[usize] {
        &self.served[vehicle]
    }

    /// `(customer id, vehicle id)` for every served stop.
    pub fn served_pairs(&self) -> Vec<(String, String)> {
        let inst = &self.instance;
        self.served
            .iter()
            .enumerate()
            .flat_map(|(k, stops)| {
                stops.iter().map(move |&i| {
                    (inst.customers()[i].id.clone(), inst.vehicles()[k].id.clone())
                })
            })
            .collect()
    }

    pub fn pending(&self) -> &BTreeSet<usize> {
        &self.pending
    }

    pub fn pending_ids(&self) -> Vec<String> {
        self.pending
            .iter()
            .map(|&i| self.instance.customers()[i].id.clone())
            .collect()
    }

    pub fn requests(&self) -> &[usize] {
        &self.requests
    }

    pub fn current(&self, vehicle: usize) -> Location {
        self.current[vehicle]
    }

    pub fn location_id(&self, vehicle: usize) -> &str {
        match self.current[vehicle] {
            Location::Depot(d) => &self.instance.depots()[d].id,
            Location::Customer(i) => &self.instance.customers()[i].id,
        }
    }

    pub fn served_demand(&self, vehicle: usize) -> i64 {
        self.served[vehicle]
            .iter()
            .map(|&i| self.instance.customers()[i].demand)
            .sum()
    }

    /// Full plan: the served prefix of every vehicle followed by its new
    /// route, if any.
    pub fn merge(&self, rerouted: &RoutePlan) -> RoutePlan {
        let mut plan = RoutePlan::new();
        for (k, v) in self.instance.vehicles().iter().enumerate() {
            let mut stops: Vec<String> = self.served[k]
                .iter()
                .map(|&i| self.instance.customers()[i].id.clone())
                .collect();
            if let Some(more) = rerouted.routes.get(&v.id) {
                stops.extend(more.iter().cloned());
            }
            if !stops.is_empty() {
                plan.routes.insert(v.id.clone(), stops);
            }
        }
        plan
    }
}

fn extend_instance(base: &Instance, requests: &Requests) -> Result<Instance, DynamicError> {
    let mut seen: BTreeSet<&str> = base.customers().iter().map(|c| c.id.as_str()).collect();
    for c in &requests.customers {
        if !seen.insert(c.id.as_str()) {
            return Err(DynamicError::DuplicateRequest(c.id.clone()));
        }
    }
    let distances = match (&requests.distances, base.distance_source()) {
        (Some(d), _) => Some(d.clone()),
        (None, DistanceSource::Positions) => {
            if requests.customers.iter().any(|c| c.position.is_none()) {
                return Err(DynamicError::MissingRequestDistances);
            }
            None
        }
        (None, DistanceSource::Explicit) if requests.customers.is_empty() => {
            Some(base.distances().clone())
        }
        (None, DistanceSource::Explicit) => return Err(DynamicError::MissingRequestDistances),
    };
    let mut customers = base.customers().to_vec();
    customers.extend(requests.customers.iter().cloned());
    Ok(Instance::new(
        base.depots().to_vec(),
        base.vehicles().to_vec(),
        customers,
        distances,
    )?)
}

/// Marks the first `steps[k]` stops of each route as served and adds the
/// requests to the pending set. Vehicles missing from `steps` have served
/// nothing; customers missing from the plan stay pending.
pub fn apply_progress(
    base: &Instance,
    plan: &RoutePlan,
    steps: &BTreeMap<String, usize>,
    requests: &Requests,
) -> Result<ExecutionState, DynamicError> {
    for vehicle in plan.routes.keys().chain(steps.keys()) {
        if base.vehicle_index(vehicle).is_none() {
            return Err(DynamicError::UnknownVehicle(vehicle.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for c in plan.routes.values().flatten() {
        if base.customer_index(c).is_none() {
            return Err(DynamicError::UnknownCustomer(c.clone()));
        }
        if !seen.insert(c.as_str()) {
            return Err(DynamicError::RepeatedCustomer(c.clone()));
        }
    }
    let instance = extend_instance(base, requests)?;
    let n_vehicles = instance.vehicles().len();
    let mut served = vec![Vec::new(); n_vehicles];
    let mut current: Vec<Location> = (0..n_vehicles)
        .map(|k| Location::Depot(instance.home_depot(k)))
        .collect();
    for (k, v) in instance.vehicles().iter().enumerate() {
        let route = plan.routes.get(&v.id).map(Vec::as_slice).unwrap_or(&[]);
        let done = steps.get(&v.id).copied().unwrap_or(0);
        if done > route.len() {
            return Err(DynamicError::StepOverflow {
                vehicle: v.id.clone(),
                steps: done,
                route_len: route.len(),
            });
        }
        served[k] = route[..done]
            .iter()
            .map(|c| instance.customer_index(c).expect("checked above"))
            .collect();
        if let Some(&last) = served[k].last() {
            current[k] = Location::Customer(last);
        }
    }
    let done: BTreeSet<usize> = served.iter().flatten().copied().collect();
    let pending = (0..instance.customers().len())
        .filter(|i| !done.contains(i))
        .collect();
    let requests = (base.customers().len()..instance.customers().len()).collect();
    Ok(ExecutionState {
        instance,
        served,
        pending,
        current,
        requests,
    })
}

/// `Q_k` minus the demand vehicle `k` has already delivered.
pub fn remaining_vehicle_capacity(state: &ExecutionState, vehicle: usize) -> i64 {
    state.instance.vehicles()[vehicle].capacity - state.served_demand(vehicle)
}

/// `V_d` minus the demand delivered by vehicles homed at `d`.
pub fn remaining_depot_capacity(state: &ExecutionState, depot: usize) -> i64 {
    let used: i64 = (0..state.instance.vehicles().len())
        .filter(|&k| state.instance.home_depot(k) == depot)
        .map(|k| state.served_demand(k))
        .sum();
    state.instance.depots()[depot].capacity - used
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReroutingConfig {
    pub compile: CompileConfig,
    /// Drop vehicles that cannot serve any pending customer instead of
    /// failing. Every compiled vehicle must serve at least one customer.
    pub exclude_idle: bool,
}

impl Default for ReroutingConfig {
    fn default() -> Self {
        Self {
            compile: CompileConfig::default(),
            exclude_idle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReroutingModel {
    pub model: QuboModel<i64>,
    pub layout: VariableLayout,
    pub problem: RoutingProblem,
    pub penalty: PenaltyConfig,
    /// Vehicles left out of the model, with the reason.
    pub excluded: Vec<(String, String)>,
}

/// The routing problem left after `state`, before bit allocation.
pub fn rerouting_problem(
    state: &ExecutionState,
    exclude_idle: bool,
) -> Result<(RoutingProblem, Vec<(String, String)>), DynamicError> {
    let inst = &state.instance;
    let pending: Vec<usize> = state.pending.iter().copied().collect();
    if pending.is_empty() {
        return Err(DynamicError::NothingPending);
    }
    let min_demand = pending
        .iter()
        .map(|&i| inst.customers()[i].demand)
        .min()
        .expect("non-empty");
    let mut fleet = Vec::new();
    let mut excluded = Vec::new();
    for (k, v) in inst.vehicles().iter().enumerate() {
        let remaining = remaining_vehicle_capacity(state, k);
        let home_left = remaining_depot_capacity(state, inst.home_depot(k));
        let reason = if remaining <= 0 {
            Some(format!("vehicle {} has no capacity left", v.id))
        } else if remaining < min_demand {
            Some(format!(
                "vehicle {} has {remaining} capacity left, below the smallest pending demand {min_demand}",
                v.id
            ))
        } else if home_left < min_demand {
            Some(format!(
                "depot {} has {home_left} capacity left, below the smallest pending demand {min_demand}",
                v.home_depot
            ))
        } else {
            None
        };
        match reason {
            None => fleet.push(k),
            Some(r) if exclude_idle => excluded.push((v.id.clone(), r)),
            Some(r) => return Err(DynamicError::InfeasibleFleet(r)),
        }
    }
    if fleet.is_empty() {
        return Err(DynamicError::InfeasibleFleet(
            "no vehicle can serve a pending customer".into(),
        ));
    }
    if fleet.len() > pending.len() {
        return Err(DynamicError::InfeasibleFleet(format!(
            "{} participating vehicles for {} pending customers",
            fleet.len(),
            pending.len()
        )));
    }
    let sd = inst.scaled();
    let start_leg = fleet
        .iter()
        .map(|&k| {
            pending
                .iter()
                .map(|&i| match state.current[k] {
                    Location::Depot(d) => sd.depot_customer[d][i],
                    Location::Customer(c) => sd.customer_customer[c][i],
                })
                .collect()
        })
        .collect();
    let end_leg = fleet
        .iter()
        .map(|&k| {
            let d = inst.home_depot(k);
            pending.iter().map(|&i| sd.customer_depot[i][d]).collect()
        })
        .collect();
    let problem = RoutingProblem {
        customer_ids: pending
            .iter()
            .map(|&i| inst.customers()[i].id.clone())
            .collect(),
        vehicle_ids: fleet.iter().map(|&k| inst.vehicles()[k].id.clone()).collect(),
        depot_ids: inst.depots().iter().map(|d| d.id.clone()).collect(),
        start_symbol: StartSymbol::Beta,
        demand: pending.iter().map(|&i| inst.customers()[i].demand).collect(),
        arc: pending
            .iter()
            .map(|&i| pending.iter().map(|&j| sd.customer_customer[i][j]).collect())
            .collect(),
        start_leg,
        end_leg,
        vehicle_bound: fleet
            .iter()
            .map(|&k| remaining_vehicle_capacity(state, k))
            .collect(),
        vehicle_depot: fleet.iter().map(|&k| inst.home_depot(k)).collect(),
        depot_bound: (0..inst.depots().len())
            .map(|d| remaining_depot_capacity(state, d))
            .collect(),
        scale: sd.scale,
    };
    Ok((problem, excluded))
}

/// Compiles the rerouting QUBO. The default penalty is derived from the
/// extended instance, so it matches the static default when nothing changed.
pub fn compile_rerouting(
    state: &ExecutionState,
    config: &ReroutingConfig,
) -> Result<ReroutingModel, DynamicError> {
    let (problem, excluded) = rerouting_problem(state, config.exclude_idle)?;
    let penalty = config
        .compile
        .penalty
        .unwrap_or_else(|| PenaltyConfig::default_for(&state.instance));
    let (model, layout) = assemble_problem(&problem, penalty, &config.compile)?;
    Ok(ReroutingModel {
        model,
        layout,
        problem,
        penalty,
        excluded,
    })
}
