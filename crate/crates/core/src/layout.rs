//! Bit allocation for route variables and slack registers, and the size
//! estimate that predicts it.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;
use crate::problem::{RoutingProblem, StartSymbol};

/// Largest customer count for which subtour constraints are expanded by
/// default (2^12 - 13 = 4,083 subsets).
pub const DEFAULT_SUBTOUR_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error(
        "{customers} customers need {subsets} subtour constraints; the cap is {cap} customers"
    )]
    SubtourExplosion {
        customers: usize,
        cap: usize,
        subsets: u128,
    },
}

/// Number of slack bits for an inequality with right-hand side `bound`:
/// `ceil(1 + log2(bound))`, and 0 for a zero bound.
pub fn slack_width(bound: u64) -> usize {
    if bound == 0 {
        0
    } else {
        1 + ceil_log2(bound)
    }
}

fn ceil_log2(b: u64) -> usize {
    if b <= 1 {
        0
    } else {
        (64 - (b - 1).leading_zeros()) as usize
    }
}

/// How slack registers weight their bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlackEncoding {
    /// Pure powers of two over `slack_width(b)` bits.
    #[default]
    Binary,
    /// Minimal bit count with the top weight clipped so the register sums to
    /// exactly `b`.
    Tight,
}

impl SlackEncoding {
    pub fn width(self, bound: i64) -> usize {
        let b = bound.max(0) as u64;
        match self {
            SlackEncoding::Binary => slack_width(b),
            SlackEncoding::Tight => (64 - b.leading_zeros()) as usize,
        }
    }

    pub fn coefficients(self, bound: i64) -> Vec<i64> {
        let width = self.width(bound);
        let mut coeffs: Vec<i64> = (0..width).map(|l| 1i64 << l).collect();
        if self == SlackEncoding::Tight && width > 0 {
            coeffs[width - 1] = bound - ((1i64 << (width - 1)) - 1);
        }
        coeffs
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlackEncoding::Binary => "binary",
            SlackEncoding::Tight => "tight",
        }
    }
}

impl std::str::FromStr for SlackEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(SlackEncoding::Binary),
            "tight" => Ok(SlackEncoding::Tight),
            other => Err(format!("unknown slack encoding `{other}`")),
        }
    }
}

/// Which inequality a slack register belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlackOwner {
    /// Subtour elimination over a customer subset (local indices, ascending).
    Subtour(Vec<usize>),
    Vehicle(usize),
    Depot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackRegister {
    pub owner: SlackOwner,
    pub bound: i64,
    pub coefficients: Vec<i64>,
    pub first_bit: usize,
}

impl SlackRegister {
    pub fn width(&self) -> usize {
        self.coefficients.len()
    }

    pub fn bits(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(l, &c)| (self.first_bit + l, c))
    }

    /// Bits encoding `residual`, highest weight first, or `None` when the
    /// register cannot hold it.
    pub fn encode(&self, residual: i64) -> Option<Vec<bool>> {
        let mut rest = residual;
        let mut bits = vec![false; self.width()];
        for l in (0..self.width()).rev() {
            if self.coefficients[l] <= rest {
                bits[l] = true;
                rest -= self.coefficients[l];
            }
        }
        (rest == 0).then_some(bits)
    }
}

/// A decoded bit meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    /// `x_ijk`: vehicle `k` serves `j` right after `i`.
    Arc { from: usize, to: usize, vehicle: usize },
    /// `mu_ik` / `beta_ik`: `i` is vehicle `k`'s first stop.
    Start { customer: usize, vehicle: usize },
    /// `eta_ik`: `i` is vehicle `k`'s last stop.
    End { customer: usize, vehicle: usize },
    Slack { register: usize, bit: usize },
}

/// Bijection between variables and bit indices.
///
/// Ordering: the arc block (by vehicle, then from, then to), the start block
/// and end block (by vehicle, then customer), then slack registers for
/// subtours (by subset size, then lexicographic), vehicles and depots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    pub customer_ids: Vec<String>,
    pub vehicle_ids: Vec<String>,
    pub depot_ids: Vec<String>,
    pub start_symbol: StartSymbol,
    pub encoding: SlackEncoding,
    pub slack_registers: Vec<SlackRegister>,
    pub total_bits: usize,
    subtour_registers: usize,
}

impl VariableLayout {
    pub(crate) fn from_parts(
        customer_ids: Vec<String>,
        vehicle_ids: Vec<String>,
        depot_ids: Vec<String>,
        start_symbol: StartSymbol,
        encoding: SlackEncoding,
        slack_registers: Vec<SlackRegister>,
    ) -> Self {
        let route = route_bit_count(customer_ids.len(), vehicle_ids.len());
        let total_bits = route + slack_registers.iter().map(|r| r.width()).sum::<usize>();
        let subtour_registers = slack_registers
            .iter()
            .filter(|r| matches!(r.owner, SlackOwner::Subtour(_)))
            .count();
        Self {
            customer_ids,
            vehicle_ids,
            depot_ids,
            start_symbol,
            encoding,
            slack_registers,
            total_bits,
            subtour_registers,
        }
    }

    pub fn n_customers(&self) -> usize {
        self.customer_ids.len()
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicle_ids.len()
    }

    fn arc_count(&self) -> usize {
        let n = self.n_customers();
        n * n.saturating_sub(1) * self.n_vehicles()
    }

    pub fn route_bits(&self) -> usize {
        route_bit_count(self.n_customers(), self.n_vehicles())
    }

    /// Bit of `x_ijk`; `None` on the diagonal.
    pub fn arc(&self, from: usize, to: usize, vehicle: usize) -> Option<usize> {
        if from == to {
            return None;
        }
        let n = self.n_customers();
        let col = if to < from { to } else { to - 1 };
        Some(vehicle * n * (n - 1) + from * (n - 1) + col)
    }

    pub fn start(&self, customer: usize, vehicle: usize) -> usize {
        self.arc_count() + vehicle * self.n_customers() + customer
    }

    pub fn end(&self, customer: usize, vehicle: usize) -> usize {
        let n = self.n_customers();
        self.arc_count() + n * self.n_vehicles() + vehicle * n + customer
    }

    pub fn subtour_registers(&self) -> &[SlackRegister] {
        &self.slack_registers[..self.subtour_registers]
    }

    pub fn vehicle_register(&self, vehicle: usize) -> &SlackRegister {
        &self.slack_registers[self.subtour_registers + vehicle]
    }

    pub fn depot_register(&self, depot: usize) -> &SlackRegister {
        &self.slack_registers[self.subtour_registers + self.n_vehicles() + depot]
    }

    pub fn symbol(&self, bit: usize) -> Option<Symbol> {
        let n = self.n_customers();
        let arcs = self.arc_count();
        let starts = arcs + n * self.n_vehicles();
        let route = self.route_bits();
        if bit < arcs {
            let vehicle = bit / (n * (n - 1));
            let rem = bit % (n * (n - 1));
            let from = rem / (n - 1);
            let col = rem % (n - 1);
            let to = if col < from { col } else { col + 1 };
            Some(Symbol::Arc { from, to, vehicle })
        } else if bit < starts {
            let r = bit - arcs;
            Some(Symbol::Start {
                customer: r % n,
                vehicle: r / n,
            })
        } else if bit < route {
            let r = bit - starts;
            Some(Symbol::End {
                customer: r % n,
                vehicle: r / n,
            })
        } else {
            self.slack_registers
                .iter()
                .enumerate()
                .find(|(_, reg)| bit >= reg.first_bit && bit < reg.first_bit + reg.width())
                .map(|(register, reg)| Symbol::Slack {
                    register,
                    bit: bit - reg.first_bit,
                })
        }
    }

    pub fn owner_tag(&self, owner: &SlackOwner) -> String {
        match owner {
            SlackOwner::Subtour(set) => format!(
                "subtour:{}",
                set.iter()
                    .map(|&i| self.customer_ids[i].as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            SlackOwner::Vehicle(k) => format!("vehicle:{}", self.vehicle_ids[*k]),
            SlackOwner::Depot(d) => format!("depot:{}", self.depot_ids[*d]),
        }
    }

    /// Human-readable name of a bit, as written to layout sidecars.
    pub fn symbol_name(&self, bit: usize) -> Option<String> {
        let c = |i: usize| self.customer_ids[i].as_str();
        let v = |k: usize| self.vehicle_ids[k].as_str();
        Some(match self.symbol(bit)? {
            Symbol::Arc { from, to, vehicle } => format!("x {} {} {}", c(from), c(to), v(vehicle)),
            Symbol::Start { customer, vehicle } => {
                format!("{} {} {}", self.start_symbol.as_str(), c(customer), v(vehicle))
            }
            Symbol::End { customer, vehicle } => format!("eta {} {}", c(customer), v(vehicle)),
            Symbol::Slack { register, bit } => format!(
                "slack {} {}",
                self.owner_tag(&self.slack_registers[register].owner),
                bit
            ),
        })
    }
}

fn route_bit_count(n: usize, k: usize) -> usize {
    n * n.saturating_sub(1) * k + 2 * n * k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutOptions {
    pub encoding: SlackEncoding,
    pub subtour_cap: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self {
            encoding: SlackEncoding::Binary,
            subtour_cap: DEFAULT_SUBTOUR_CAP,
        }
    }
}

/// Subsets of `0..n` with at least two elements, by size then
/// lexicographically.
pub fn subtour_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (2..=n).flat_map(move |size| Combinations::new(n, size))
}

struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, size: usize) -> Self {
        Self {
            n,
            current: (size <= n).then(|| (0..size).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let size = out.len();
        let mut next = out.clone();
        let mut pos = size;
        while pos > 0 && next[pos - 1] == self.n - size + pos - 1 {
            pos -= 1;
        }
        self.current = if pos == 0 {
            None
        } else {
            next[pos - 1] += 1;
            for p in pos..size {
                next[p] = next[p - 1] + 1;
            }
            Some(next)
        };
        Some(out)
    }
}

/// Allocates every route bit and slack register for `problem`.
pub fn build_layout(
    problem: &RoutingProblem,
    options: &LayoutOptions,
) -> Result<VariableLayout, LayoutError> {
    let n = problem.n_customers();
    if n > options.subtour_cap {
        return Err(LayoutError::SubtourExplosion {
            customers: n,
            cap: options.subtour_cap,
            subsets: subset_count(n),
        });
    }
    let mut next = route_bit_count(n, problem.n_vehicles());
    let mut registers = Vec::new();
    let mut push = |owner: SlackOwner, bound: i64| {
        let coefficients = options.encoding.coefficients(bound);
        let first_bit = next;
        next += coefficients.len();
        registers.push(SlackRegister {
            owner,
            bound,
            coefficients,
            first_bit,
        });
    };
    for subset in subtour_subsets(n) {
        let bound = subset.len() as i64 - 1;
        push(SlackOwner::Subtour(subset), bound);
    }
    for (k, &bound) in problem.vehicle_bound.iter().enumerate() {
        push(SlackOwner::Vehicle(k), bound);
    }
    for (d, &bound) in problem.depot_bound.iter().enumerate() {
        push(SlackOwner::Depot(d), bound);
    }
    Ok(VariableLayout::from_parts(
        problem.customer_ids.clone(),
        problem.vehicle_ids.clone(),
        problem.depot_ids.clone(),
        problem.start_symbol,
        options.encoding,
        registers,
    ))
}

/// Layout of the static problem with default options.
pub fn layout_for_instance(inst: &Instance) -> Result<VariableLayout, LayoutError> {
    build_layout(&RoutingProblem::from_instance(inst), &LayoutOptions::default())
}

fn subset_count(n: usize) -> u128 {
    (2..=n).map(|s| binomial(n, s)).fold(0u128, u128::saturating_add)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Per-term decision variable count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub customers: usize,
    pub vehicles: usize,
    pub depots: usize,
    pub arc_bits: u128,
    pub start_bits: u128,
    pub end_bits: u128,
    pub route_bits: u128,
    pub subtour_constraints: u128,
    pub subtour_slack: u128,
    pub vehicle_slack: u128,
    pub depot_slack: u128,
    pub total: u128,
}

/// Decision variable count of the static model under the default binary
/// slack encoding.
pub fn estimate_size(inst: &Instance) -> SizeReport {
    estimate_size_with(inst, SlackEncoding::Binary)
}

pub fn estimate_size_with(inst: &Instance, encoding: SlackEncoding) -> SizeReport {
    size_of(
        inst.customers().len(),
        inst.vehicles().len(),
        inst.depots().len(),
        inst.vehicles().iter().map(|v| v.capacity),
        inst.depots().iter().map(|d| d.capacity),
        encoding,
    )
}

pub fn estimate_problem_size(problem: &RoutingProblem, encoding: SlackEncoding) -> SizeReport {
    size_of(
        problem.n_customers(),
        problem.n_vehicles(),
        problem.n_depots(),
        problem.vehicle_bound.iter().copied(),
        problem.depot_bound.iter().copied(),
        encoding,
    )
}

fn size_of(
    n: usize,
    k: usize,
    depots: usize,
    vehicle_bounds: impl Iterator<Item = i64>,
    depot_bounds: impl Iterator<Item = i64>,
    encoding: SlackEncoding,
) -> SizeReport {
    let (n128, k128) = (n as u128, k as u128);
    let arc_bits = n128 * n128.saturating_sub(1) * k128;
    let start_bits = n128 * k128;
    let end_bits = n128 * k128;
    let mut subtour_constraints = 0u128;
    let mut subtour_slack = 0u128;
    for s in 2..=n {
        let c = binomial(n, s);
        subtour_constraints = subtour_constraints.saturating_add(c);
        subtour_slack =
            subtour_slack.saturating_add(c.saturating_mul(encoding.width(s as i64 - 1) as u128));
    }
    let vehicle_slack: u128 = vehicle_bounds.map(|b| encoding.width(b) as u128).sum();
    let depot_slack: u128 = depot_bounds.map(|b| encoding.width(b) as u128).sum();
    let route_bits = arc_bits + start_bits + end_bits;
    SizeReport {
        customers: n,
        vehicles: k,
        depots,
        arc_bits,
        start_bits,
        end_bits,
        route_bits,
        subtour_constraints,
        subtour_slack,
        vehicle_slack,
        depot_slack,
        total: route_bits
            .saturating_add(subtour_slack)
            .saturating_add(vehicle_slack)
            .saturating_add(depot_slack),
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("customers |T|", self.customers as u128),
            ("vehicles |K|", self.vehicles as u128),
            ("depots |D|", self.depots as u128),
            ("arc bits x_ijk", self.arc_bits),
            ("first-stop bits", self.start_bits),
            ("last-stop bits", self.end_bits),
            ("route bits", self.route_bits),
            ("subtour constraints", self.subtour_constraints),
            ("subtour slack bits", self.subtour_slack),
            ("vehicle slack bits", self.vehicle_slack),
            ("depot slack bits", self.depot_slack),
            ("total N_D", self.total),
        ];
        for (label, value) in rows {
            writeln!(f, "{label:<22}{value:>12}")?;
        }
        Ok(())
    }
}
