//! The routing problem as seen by the layout, compiler and decoder.
//!
//! A static instance and a partially executed one (see [`crate::dynamic`])
//! both reduce to this view: a set of customers to serve, a set of vehicles
//! with per-customer start and end legs, and capacity bounds.

use crate::instance::Instance;

/// Name of the "first customer" variable family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartSymbol {
    /// Vehicles leave their home depot (μ).
    Mu,
    /// Vehicles leave their current location (β).
    Beta,
}

impl StartSymbol {
    pub fn as_str(self) -> &'static str {
        match self {
            StartSymbol::Mu => "mu",
            StartSymbol::Beta => "beta",
        }
    }
}

/// Integer (scaled) data for one compilation. Local indices are positions in
/// `customer_ids` / `vehicle_ids` / `depot_ids`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingProblem {
    pub customer_ids: Vec<String>,
    pub vehicle_ids: Vec<String>,
    pub depot_ids: Vec<String>,
    pub start_symbol: StartSymbol,
    pub demand: Vec<i64>,
    /// `[i][j]` arc length between served customers.
    pub arc: Vec<Vec<i64>>,
    /// `[k][i]` length of the first leg when `i` is vehicle `k`'s first stop.
    pub start_leg: Vec<Vec<i64>>,
    /// `[k][i]` length of the return leg when `i` is vehicle `k`'s last stop.
    pub end_leg: Vec<Vec<i64>>,
    pub vehicle_bound: Vec<i64>,
    /// Depot index of each local vehicle.
    pub vehicle_depot: Vec<usize>,
    pub depot_bound: Vec<i64>,
    /// Distance denominator shared with the source instance.
    pub scale: i64,
}

impl RoutingProblem {
    /// Static view: every customer, every vehicle, starting at home depots.
    pub fn from_instance(inst: &Instance) -> Self {
        let sd = inst.scaled();
        let n_vehicles = inst.vehicles().len();
        let vehicle_depot: Vec<usize> = (0..n_vehicles).map(|k| inst.home_depot(k)).collect();
        Self {
            customer_ids: inst.customers().iter().map(|c| c.id.clone()).collect(),
            vehicle_ids: inst.vehicles().iter().map(|v| v.id.clone()).collect(),
            depot_ids: inst.depots().iter().map(|d| d.id.clone()).collect(),
            start_symbol: StartSymbol::Mu,
            demand: inst.customers().iter().map(|c| c.demand).collect(),
            arc: sd.customer_customer.clone(),
            start_leg: vehicle_depot
                .iter()
                .map(|&d| sd.depot_customer[d].clone())
                .collect(),
            end_leg: vehicle_depot
                .iter()
                .map(|&d| sd.customer_depot.iter().map(|row| row[d]).collect())
                .collect(),
            vehicle_bound: inst.vehicles().iter().map(|v| v.capacity).collect(),
            vehicle_depot,
            depot_bound: inst.depots().iter().map(|d| d.capacity).collect(),
            scale: sd.scale,
        }
    }

    pub fn n_customers(&self) -> usize {
        self.customer_ids.len()
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicle_ids.len()
    }

    pub fn n_depots(&self) -> usize {
        self.depot_ids.len()
    }

    pub fn customer_index(&self, id: &str) -> Option<usize> {
        self.customer_ids.iter().position(|c| c == id)
    }

    pub fn vehicle_index(&self, id: &str) -> Option<usize> {
        self.vehicle_ids.iter().position(|v| v == id)
    }

    /// Scaled length of a route given as local customer indices.
    pub fn route_cost(&self, vehicle: usize, route: &[usize]) -> Option<i64> {
        let (first, last) = (*route.first()?, *route.last()?);
        let inner: i64 = route.windows(2).map(|w| self.arc[w[0]][w[1]]).sum();
        Some(self.start_leg[vehicle][first] + inner + self.end_leg[vehicle][last])
    }
}
