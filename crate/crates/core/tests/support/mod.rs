//! Generators and independent oracles shared by the integration tests.
//!
//! Nothing here calls the compiler. The oracles work directly on the exact
//! rational distances of an instance.

#![allow(dead_code)]

use std::collections::BTreeMap;

use mdcvrp_core::instance::{Customer, Depot, DistanceModel, Point, Vehicle};
use mdcvrp_core::{Distance, Instance, RoutePlan};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub customers: usize,
    pub vehicles: usize,
    pub depots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    /// Integer grid positions, Euclidean distances.
    Grid,
    /// Explicit asymmetric integer matrices.
    Integer,
    /// Explicit asymmetric matrices in halves and tenths.
    Decimal,
}

fn random_distance(rng: &mut ChaCha8Rng, mode: DistanceMode) -> Distance {
    match mode {
        DistanceMode::Decimal => {
            let den = if rng.random_bool(0.5) { 2 } else { 10 };
            Ratio::new(rng.random_range(1..=20 * den), den)
        }
        _ => Ratio::from_integer(rng.random_range(1..=20)),
    }
}

fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, mode: DistanceMode, zero_diag: bool) -> Vec<Vec<Distance>> {
    (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| {
                    if zero_diag && r == c {
                        Ratio::from_integer(0)
                    } else {
                        random_distance(rng, mode)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.random_range(0..=10) as f64, rng.random_range(0..=10) as f64)
}

/// Random instance of a given shape. Capacities are drawn between the
/// largest demand and a bit over the total, so most draws are feasible.
pub fn random_instance(rng: &mut ChaCha8Rng, shape: Shape, mode: DistanceMode) -> Instance {
    let demands: Vec<i64> = (0..shape.customers).map(|_| rng.random_range(1..=3)).collect();
    let total: i64 = demands.iter().sum();
    let max_demand = *demands.iter().max().unwrap();
    let positions = mode == DistanceMode::Grid;
    let homes: Vec<usize> = (0..shape.vehicles)
        .map(|k| if k < shape.depots { k } else { rng.random_range(0..shape.depots) })
        .collect();
    let vehicles: Vec<Vehicle> = homes
        .iter()
        .enumerate()
        .map(|(k, &d)| Vehicle {
            id: format!("K{}", k + 1),
            home_depot: format!("D{}", d + 1),
            capacity: rng.random_range(max_demand..=total + 1),
        })
        .collect();
    let depots: Vec<Depot> = (0..shape.depots)
        .map(|d| {
            let fleet: i64 = vehicles
                .iter()
                .zip(&homes)
                .filter(|(_, &h)| h == d)
                .map(|(v, _)| v.capacity)
                .sum();
            Depot {
                id: format!("D{}", d + 1),
                capacity: rng.random_range(max_demand.min(fleet)..=fleet + 1),
                position: positions.then(|| random_point(rng)),
            }
        })
        .collect();
    let customers: Vec<Customer> = demands
        .iter()
        .enumerate()
        .map(|(i, &q)| Customer {
            id: format!("C{}", i + 1),
            demand: q,
            position: positions.then(|| random_point(rng)),
        })
        .collect();
    let distances = (!positions).then(|| DistanceModel {
        customer_customer: matrix(rng, shape.customers, shape.customers, mode, true),
        depot_customer: matrix(rng, shape.depots, shape.customers, mode, false),
        customer_depot: matrix(rng, shape.customers, shape.depots, mode, false),
    });
    Instance::new(depots, vehicles, customers, distances).expect("generated instance is valid")
}

/// Independent bit count: route variables, then one register per subset of
/// size >= 2, per vehicle and per depot.
pub fn size_formula(inst: &Instance) -> u128 {
    fn width(b: i64) -> u128 {
        // smallest w with 2^(w-1) >= b, i.e. ceil(1 + log2 b)
        if b <= 0 {
            return 0;
        }
        let mut w = 1u128;
        while (1i128 << (w - 1)) < b as i128 {
            w += 1;
        }
        w
    }
    fn choose(n: u128, k: u128) -> u128 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    let t = inst.customers().len() as u128;
    let k = inst.vehicles().len() as u128;
    let route = t * k * (t + 1);
    let subtours: u128 = (2..=t).map(|s| choose(t, s) * width(s as i64 - 1)).sum();
    let vehicles: u128 = inst.vehicles().iter().map(|v| width(v.capacity)).sum();
    let depots: u128 = inst.depots().iter().map(|d| width(d.capacity)).sum();
    route + subtours + vehicles + depots
}

/// Cost of one route: vehicle index and ordered customer indices.
pub type CostFn<'a> = Box<dyn Fn(usize, &[usize]) -> Distance + 'a>;

/// An abstract routing space for brute force: every listed vehicle must
/// serve at least one customer, loads respect both capacities.
pub struct RouteSpace<'a> {
    pub customer_ids: Vec<String>,
    pub demand: Vec<i64>,
    pub vehicle_ids: Vec<String>,
    pub vehicle_capacity: Vec<i64>,
    pub vehicle_depot: Vec<usize>,
    pub depot_capacity: Vec<i64>,
    pub cost: CostFn<'a>,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (n, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(n);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

impl RouteSpace<'_> {
    /// Every feasible plan with its exact cost.
    pub fn feasible_plans(&self) -> Vec<(RoutePlan, Distance)> {
        let n = self.customer_ids.len();
        let k = self.vehicle_ids.len();
        let mut plans = Vec::new();
        let mut assignment = vec![0usize; n];
        loop {
            let groups: Vec<Vec<usize>> = (0..k)
                .map(|v| (0..n).filter(|&i| assignment[i] == v).collect())
                .collect();
            let loads: Vec<i64> = groups
                .iter()
                .map(|g| g.iter().map(|&i| self.demand[i]).sum())
                .collect();
            let mut depot_load = vec![0i64; self.depot_capacity.len()];
            for v in 0..k {
                depot_load[self.vehicle_depot[v]] += loads[v];
            }
            let ok = groups.iter().all(|g| !g.is_empty())
                && (0..k).all(|v| loads[v] <= self.vehicle_capacity[v])
                && depot_load
                    .iter()
                    .zip(&self.depot_capacity)
                    .all(|(l, c)| l <= c);
            if ok {
                let orders: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
                let mut pick = vec![0usize; k];
                loop {
                    let mut plan = RoutePlan::new();
                    let mut cost = Ratio::from_integer(0);
                    for v in 0..k {
                        let route = &orders[v][pick[v]];
                        cost += (self.cost)(v, route);
                        plan.routes.insert(
                            self.vehicle_ids[v].clone(),
                            route.iter().map(|&i| self.customer_ids[i].clone()).collect(),
                        );
                    }
                    plans.push((plan, cost));
                    let mut v = 0;
                    while v < k {
                        pick[v] += 1;
                        if pick[v] < orders[v].len() {
                            break;
                        }
                        pick[v] = 0;
                        v += 1;
                    }
                    if v == k {
                        break;
                    }
                }
            }
            let mut i = 0;
            while i < n {
                assignment[i] += 1;
                if assignment[i] < k {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        plans
    }

    /// Optimal cost and every plan attaining it, or `None` when infeasible.
    pub fn optimum(&self) -> Option<(Distance, Vec<RoutePlan>)> {
        let plans = self.feasible_plans();
        let best = plans.iter().map(|(_, c)| *c).min()?;
        let argmin = plans
            .into_iter()
            .filter(|(_, c)| *c == best)
            .map(|(p, _)| p)
            .collect();
        Some((best, argmin))
    }
}

/// Static route space of an instance: depot to customers and back home.
pub fn static_space(inst: &Instance) -> RouteSpace<'_> {
    let homes: Vec<usize> = inst
        .vehicles()
        .iter()
        .map(|v| inst.depots().iter().position(|d| d.id == v.home_depot).unwrap())
        .collect();
    let dist = inst.distances();
    let cost_homes = homes.clone();
    RouteSpace {
        customer_ids: inst.customers().iter().map(|c| c.id.clone()).collect(),
        demand: inst.customers().iter().map(|c| c.demand).collect(),
        vehicle_ids: inst.vehicles().iter().map(|v| v.id.clone()).collect(),
        vehicle_capacity: inst.vehicles().iter().map(|v| v.capacity).collect(),
        vehicle_depot: homes,
        depot_capacity: inst.depots().iter().map(|d| d.capacity).collect(),
        cost: Box::new(move |v, route| {
            let d = cost_homes[v];
            let mut c = dist.depot_customer[d][route[0]];
            for w in route.windows(2) {
                c += dist.customer_customer[w[0]][w[1]];
            }
            c + dist.customer_depot[*route.last().unwrap()][d]
        }),
    }
}

/// Distance scale as an exact multiplier.
pub fn scaled(cost: Distance, scale: i64) -> i64 {
    let v = cost * Ratio::from_integer(scale);
    assert!(v.is_integer(), "{cost} is not a multiple of 1/{scale}");
    v.to_integer()
}

/// Shapes allowed in the oracle family, with weights biased towards the
/// cheaper ones.
pub const FAMILY_SHAPES: [Shape; 6] = [
    Shape { customers: 2, vehicles: 1, depots: 1 },
    Shape { customers: 2, vehicles: 1, depots: 2 },
    Shape { customers: 2, vehicles: 2, depots: 1 },
    Shape { customers: 2, vehicles: 2, depots: 2 },
    Shape { customers: 3, vehicles: 1, depots: 1 },
    Shape { customers: 3, vehicles: 1, depots: 2 },
];

/// Feasible instances cycling through every family shape and distance mode,
/// each within `max_bits`.
pub fn oracle_family(count: usize, max_bits: u128, seed: u64) -> Vec<Instance> {
    let mut rng = rng(seed);
    let modes = [DistanceMode::Grid, DistanceMode::Integer, DistanceMode::Decimal];
    let mut out = Vec::with_capacity(count);
    let mut n = 0usize;
    while out.len() < count {
        let shape = FAMILY_SHAPES[n % FAMILY_SHAPES.len()];
        let mode = modes[(n / FAMILY_SHAPES.len()) % modes.len()];
        let inst = random_instance(&mut rng, shape, mode);
        if size_formula(&inst) <= max_bits && static_space(&inst).optimum().is_some() {
            out.push(inst);
            n += 1;
        }
    }
    out
}

pub fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    items.shuffle(rng);
}

pub fn plan_of(pairs: &[(&str, &[&str])]) -> RoutePlan {
    RoutePlan {
        routes: pairs
            .iter()
            .map(|(k, r)| (k.to_string(), r.iter().map(|c| c.to_string()).collect()))
            .collect::<BTreeMap<_, _>>(),
    }
}
