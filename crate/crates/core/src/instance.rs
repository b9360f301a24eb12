//! Multi-depot capacitated routing instances: types, JSON ingestion and
//! sanity diagnostics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde_json::{Map, Number, Value};
use thiserror::Error;

/// Exact distance value.
pub type Distance = Ratio<i64>;

/// Euclidean distances derived from positions are rounded to this many
/// parts per unit so they stay exact rationals.
pub const EUCLIDEAN_RESOLUTION: i64 = 1000;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation at `{location}`: {message}")]
    Schema { location: String, message: String },
    #[error("vehicle `{vehicle}` references unknown depot `{depot}`")]
    UnknownDepot { vehicle: String, depot: String },
    #[error("negative value {value} at `{location}`")]
    Negative { location: String, value: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("instance needs at least one {0}")]
    Empty(&'static str),
    #[error("distance block `{location}` has shape {found}, expected {expected}")]
    DistanceShape {
        location: String,
        expected: String,
        found: String,
    },
    #[error("no distances block and not every node carries a position")]
    MissingDistances,
    #[error("distance scaling overflows 64-bit integers")]
    ScaleOverflow,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance rounded to [`EUCLIDEAN_RESOLUTION`].
    pub fn distance_to(&self, other: &Point) -> Distance {
        let d = (self.x - other.x).hypot(self.y - other.y);
        let units = (d * EUCLIDEAN_RESOLUTION as f64).round() as i64;
        Ratio::new(units, EUCLIDEAN_RESOLUTION)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Depot {
    pub id: String,
    pub capacity: i64,
    pub position: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: String,
    pub home_depot: String,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    pub id: String,
    pub demand: i64,
    pub position: Option<Point>,
}

/// Fully asymmetric distance matrices between customers and depots.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceModel {
    /// `[i][j]`, customer to customer.
    pub customer_customer: Vec<Vec<Distance>>,
    /// `[d][i]`, depot to customer.
    pub depot_customer: Vec<Vec<Distance>>,
    /// `[i][d]`, customer to depot.
    pub customer_depot: Vec<Vec<Distance>>,
}

impl DistanceModel {
    /// Euclidean distances between positioned nodes.
    pub fn euclidean(depots: &[Point], customers: &[Point]) -> Self {
        let customer_customer = customers
            .iter()
            .map(|a| customers.iter().map(|b| a.distance_to(b)).collect())
            .collect();
        let depot_customer = depots
            .iter()
            .map(|d| customers.iter().map(|c| d.distance_to(c)).collect())
            .collect();
        let customer_depot = customers
            .iter()
            .map(|c| depots.iter().map(|d| c.distance_to(d)).collect())
            .collect();
        Self {
            customer_customer,
            depot_customer,
            customer_depot,
        }
    }

    fn entries(&self) -> impl Iterator<Item = &Distance> {
        self.customer_customer
            .iter()
            .chain(&self.depot_customer)
            .chain(&self.customer_depot)
            .flatten()
    }

    fn check_shape(&self, depots: usize, customers: usize) -> Result<(), InstanceError> {
        let blocks = [
            ("customer_customer", &self.customer_customer, customers, customers),
            ("depot_customer", &self.depot_customer, depots, customers),
            ("customer_depot", &self.customer_depot, customers, depots),
        ];
        for (name, rows, want_rows, want_cols) in blocks {
            let bad_row = rows.iter().position(|r| r.len() != want_cols);
            if rows.len() != want_rows || bad_row.is_some() {
                let found = match bad_row {
                    Some(r) => format!("row {r} of length {}", rows[r].len()),
                    None => format!("{} rows", rows.len()),
                };
                return Err(InstanceError::DistanceShape {
                    location: format!("distances.{name}"),
                    expected: format!("{want_rows}x{want_cols}"),
                    found,
                });
            }
            for (r, row) in rows.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    if *v < Distance::from_integer(0) {
                        return Err(InstanceError::Negative {
                            location: format!("distances.{name}[{r}][{c}]"),
                            value: v.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Where an instance's distances came from; kept so rendering reproduces the
/// input document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceSource {
    Positions,
    Explicit,
}

/// Distances multiplied by the common denominator, so every coefficient
/// downstream is an exact integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledDistances {
    pub scale: i64,
    pub customer_customer: Vec<Vec<i64>>,
    pub depot_customer: Vec<Vec<i64>>,
    pub customer_depot: Vec<Vec<i64>>,
}

impl ScaledDistances {
    fn from_model(model: &DistanceModel) -> Result<Self, InstanceError> {
        let mut scale = 1i64;
        for d in model.entries() {
            scale = scale.lcm(d.denom());
            if scale > i64::MAX / 1024 {
                return Err(InstanceError::ScaleOverflow);
            }
        }
        let conv = |rows: &Vec<Vec<Distance>>| -> Result<Vec<Vec<i64>>, InstanceError> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|d| {
                            d.numer()
                                .checked_mul(scale / d.denom())
                                .ok_or(InstanceError::ScaleOverflow)
                        })
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            scale,
            customer_customer: conv(&model.customer_customer)?,
            depot_customer: conv(&model.depot_customer)?,
            customer_depot: conv(&model.customer_depot)?,
        })
    }

    /// Sum of every entry; the default penalty is derived from it.
    pub fn total(&self) -> i64 {
        self.customer_customer
            .iter()
            .chain(&self.depot_customer)
            .chain(&self.customer_depot)
            .flatten()
            .sum()
    }
}

/// A validated, immutable MDCVRP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    depots: Vec<Depot>,
    vehicles: Vec<Vehicle>,
    customers: Vec<Customer>,
    distances: DistanceModel,
    source: DistanceSource,
    home: Vec<usize>,
    scaled: ScaledDistances,
}

impl Instance {
    /// Builds an instance, deriving Euclidean distances when `distances` is
    /// `None` and every node has a position.
    pub fn new(
        depots: Vec<Depot>,
        vehicles: Vec<Vehicle>,
        customers: Vec<Customer>,
        distances: Option<DistanceModel>,
    ) -> Result<Self, InstanceError> {
        if depots.is_empty() {
            return Err(InstanceError::Empty("depot"));
        }
        if vehicles.is_empty() {
            return Err(InstanceError::Empty("vehicle"));
        }
        if customers.is_empty() {
            return Err(InstanceError::Empty("customer"));
        }
        check_ids("depot", depots.iter().map(|d| d.id.as_str()))?;
        check_ids("vehicle", vehicles.iter().map(|v| v.id.as_str()))?;
        check_ids("customer", customers.iter().map(|c| c.id.as_str()))?;
        for (n, d) in depots.iter().enumerate() {
            non_negative(&format!("depots[{n}].capacity"), d.capacity)?;
        }
        for (n, v) in vehicles.iter().enumerate() {
            non_negative(&format!("vehicles[{n}].capacity"), v.capacity)?;
        }
        for (n, c) in customers.iter().enumerate() {
            non_negative(&format!("customers[{n}].demand"), c.demand)?;
            if c.demand == 0 {
                return Err(schema(format!("customers[{n}].demand"), "demand must be at least 1"));
            }
        }
        let home = vehicles
            .iter()
            .map(|v| {
                depots
                    .iter()
                    .position(|d| d.id == v.home_depot)
                    .ok_or_else(|| InstanceError::UnknownDepot {
                        vehicle: v.id.clone(),
                        depot: v.home_depot.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let (distances, source) = match distances {
            Some(model) => (model, DistanceSource::Explicit),
            None => {
                let dp: Option<Vec<Point>> = depots.iter().map(|d| d.position).collect();
                let cp: Option<Vec<Point>> = customers.iter().map(|c| c.position).collect();
                match (dp, cp) {
                    (Some(dp), Some(cp)) => {
                        (DistanceModel::euclidean(&dp, &cp), DistanceSource::Positions)
                    }
                    _ => return Err(InstanceError::MissingDistances),
                }
            }
        };
        distances.check_shape(depots.len(), customers.len())?;
        let scaled = ScaledDistances::from_model(&distances)?;
        Ok(Self {
            depots,
            vehicles,
            customers,
            distances,
            source,
            home,
            scaled,
        })
    }

    pub fn depots(&self) -> &[Depot] {
        &self.depots
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    pub fn distances(&self) -> &DistanceModel {
        &self.distances
    }

    pub fn distance_source(&self) -> DistanceSource {
        self.source
    }

    pub fn scaled(&self) -> &ScaledDistances {
        &self.scaled
    }

    /// Common denominator applied to all distances.
    pub fn scale(&self) -> i64 {
        self.scaled.scale
    }

    /// Depot index of vehicle `k` (the fixed assignment γ_kd).
    pub fn home_depot(&self, vehicle: usize) -> usize {
        self.home[vehicle]
    }

    pub fn customer_index(&self, id: &str) -> Option<usize> {
        self.customers.iter().position(|c| c.id == id)
    }

    pub fn vehicle_index(&self, id: &str) -> Option<usize> {
        self.vehicles.iter().position(|v| v.id == id)
    }

    pub fn depot_index(&self, id: &str) -> Option<usize> {
        self.depots.iter().position(|d| d.id == id)
    }

    pub fn total_demand(&self) -> i64 {
        self.customers.iter().map(|c| c.demand).sum()
    }

    pub fn has_positions(&self) -> bool {
        self.depots.iter().all(|d| d.position.is_some())
            && self.customers.iter().all(|c| c.position.is_some())
    }

    /// Serializes back into the instance document format.
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert(
            "depots".into(),
            Value::Array(
                self.depots
                    .iter()
                    .map(|d| {
                        let mut m = Map::new();
                        m.insert("id".into(), Value::from(d.id.clone()));
                        m.insert("capacity".into(), Value::from(d.capacity));
                        if let Some(p) = d.position {
                            m.insert("position".into(), point_json(p));
                        }
                        Value::Object(m)
                    })
                    .collect(),
            ),
        );
        root.insert(
            "vehicles".into(),
            Value::Array(
                self.vehicles
                    .iter()
                    .map(|v| {
                        let mut m = Map::new();
                        m.insert("id".into(), Value::from(v.id.clone()));
                        m.insert("depot".into(), Value::from(v.home_depot.clone()));
                        m.insert("capacity".into(), Value::from(v.capacity));
                        Value::Object(m)
                    })
                    .collect(),
            ),
        );
        root.insert(
            "customers".into(),
            Value::Array(
                self.customers
                    .iter()
                    .map(|c| {
                        let mut m = Map::new();
                        m.insert("id".into(), Value::from(c.id.clone()));
                        m.insert("demand".into(), Value::from(c.demand));
                        if let Some(p) = c.position {
                            m.insert("position".into(), point_json(p));
                        }
                        Value::Object(m)
                    })
                    .collect(),
            ),
        );
        if self.source == DistanceSource::Explicit {
            let block = |rows: &Vec<Vec<Distance>>| {
                Value::Array(
                    rows.iter()
                        .map(|r| Value::Array(r.iter().map(|d| distance_json(*d)).collect()))
                        .collect(),
                )
            };
            let mut m = Map::new();
            m.insert("customer_customer".into(), block(&self.distances.customer_customer));
            m.insert("depot_customer".into(), block(&self.distances.depot_customer));
            m.insert("customer_depot".into(), block(&self.distances.customer_depot));
            root.insert("distances".into(), Value::Object(m));
        }
        Value::Object(root)
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("instance JSON serializes")
    }
}

impl FromStr for Instance {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_instance(s)
    }
}

fn check_ids<'a>(kind: &'static str, ids: impl Iterator<Item = &'a str>) -> Result<(), InstanceError> {
    let mut seen = HashSet::new();
    for id in ids {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(schema(
                format!("{kind} id `{id}`"),
                "ids must be non-empty and contain no whitespace",
            ));
        }
        if !seen.insert(id) {
            return Err(InstanceError::DuplicateId {
                kind,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

fn non_negative(location: &str, value: i64) -> Result<(), InstanceError> {
    if value < 0 {
        Err(InstanceError::Negative {
            location: location.to_string(),
            value: value.to_string(),
        })
    } else {
        Ok(())
    }
}

fn point_json(p: Point) -> Value {
    Value::Array(vec![float_json(p.x), float_json(p.y)])
}

fn float_json(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Value::from(v as i64)
    } else {
        Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    }
}

/// Writes a rational as a JSON number, exactly when it has a terminating
/// decimal expansion.
fn distance_json(d: Distance) -> Value {
    if d.is_integer() {
        return Value::from(d.to_integer());
    }
    let mut den = *d.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den == 1 {
        let digits = twos.max(fives);
        let factor = 10i128.pow(digits) / *d.denom() as i128;
        let scaled = *d.numer() as i128 * factor;
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.abs();
        let pow = 10i128.pow(digits);
        let text = format!(
            "{sign}{}.{:0width$}",
            abs / pow,
            abs % pow,
            width = digits as usize
        );
        if let Ok(n) = Number::from_str(&text) {
            return Value::Number(n);
        }
    }
    let approx = *d.numer() as f64 / *d.denom() as f64;
    Number::from_f64(approx).map(Value::Number).unwrap_or(Value::Null)
}

/// Parses decimal JSON number text (`-1.25`, `3e-2`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Distance> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: i128 = digits.parse().ok()?;
    let exp = exponent - frac_part.len() as i32;
    let mut denom: i128 = 1;
    if exp >= 0 {
        numer = numer.checked_mul(10i128.checked_pow(exp as u32)?)?;
    } else {
        denom = 10i128.checked_pow((-exp) as u32)?;
    }
    if negative {
        numer = -numer;
    }
    let r = Ratio::new(numer, denom);
    Some(Ratio::new(
        i64::try_from(*r.numer()).ok()?,
        i64::try_from(*r.denom()).ok()?,
    ))
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
    location: String,
}

impl<'a> Fields<'a> {
    fn of(value: &'a Value, location: String) -> Result<Self, InstanceError> {
        match value {
            Value::Object(map) => Ok(Self { map, location }),
            _ => Err(schema(location, "expected an object")),
        }
    }

    fn at(&self, key: &str) -> String {
        format!("{}.{key}", self.location)
    }

    fn string(&self, key: &str) -> Result<String, InstanceError> {
        match self.map.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(schema(self.at(key), "expected a string")),
            None => Err(schema(self.at(key), "missing field")),
        }
    }

    fn integer(&self, key: &str) -> Result<i64, InstanceError> {
        let loc = self.at(key);
        match self.map.get(key) {
            Some(Value::Number(n)) => {
                if let Some(v) = n.as_i64() {
                    Ok(v)
                } else if n.as_f64().is_some_and(|f| f < 0.0) {
                    Err(InstanceError::Negative {
                        location: loc,
                        value: n.to_string(),
                    })
                } else {
                    Err(schema(loc, "expected an integer"))
                }
            }
            Some(_) => Err(schema(loc, "expected an integer")),
            None => Err(schema(loc, "missing field")),
        }
    }

    fn position(&self) -> Result<Option<Point>, InstanceError> {
        let loc = self.at("position");
        match self.map.get("position") {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Array(xy)) if xy.len() == 2 => {
                let x = xy[0].as_f64().ok_or_else(|| schema(&loc, "expected numbers"))?;
                let y = xy[1].as_f64().ok_or_else(|| schema(&loc, "expected numbers"))?;
                Ok(Some(Point::new(x, y)))
            }
            Some(_) => Err(schema(loc, "expected a [x, y] pair")),
        }
    }
}

fn array<'a>(root: &'a Map<String, Value>, key: &str) -> Result<&'a Vec<Value>, InstanceError> {
    match root.get(key) {
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(schema(key, "expected an array")),
        None => Err(schema(key, "missing field")),
    }
}

fn matrix(block: &Map<String, Value>, key: &str) -> Result<Vec<Vec<Distance>>, InstanceError> {
    let loc = format!("distances.{key}");
    let rows = match block.get(key) {
        Some(Value::Array(rows)) => rows,
        Some(_) => return Err(schema(loc, "expected an array of rows")),
        None => return Err(schema(loc, "missing field")),
    };
    rows.iter()
        .enumerate()
        .map(|(r, row)| match row {
            Value::Array(cells) => cells
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    let cloc = format!("{loc}[{r}][{c}]");
                    match cell {
                        Value::Number(n) => {
                            let d = parse_decimal(&n.to_string())
                                .ok_or_else(|| schema(&cloc, "unrepresentable distance"))?;
                            if d < Distance::from_integer(0) {
                                Err(InstanceError::Negative {
                                    location: cloc,
                                    value: n.to_string(),
                                })
                            } else {
                                Ok(d)
                            }
                        }
                        _ => Err(schema(cloc, "expected a number")),
                    }
                })
                .collect(),
            _ => Err(schema(format!("{loc}[{r}]"), "expected an array")),
        })
        .collect()
}

/// Parses a distances block (`customer_customer`, `depot_customer`,
/// `customer_depot`).
pub fn parse_distance_block(value: &Value) -> Result<DistanceModel, InstanceError> {
    let block = match value {
        Value::Object(m) => m,
        _ => return Err(schema("distances", "expected an object")),
    };
    Ok(DistanceModel {
        customer_customer: matrix(block, "customer_customer")?,
        depot_customer: matrix(block, "depot_customer")?,
        customer_depot: matrix(block, "customer_depot")?,
    })
}

pub(crate) fn parse_customer(value: &Value, location: String) -> Result<Customer, InstanceError> {
    let f = Fields::of(value, location)?;
    Ok(Customer {
        id: f.string("id")?,
        demand: f.integer("demand")?,
        position: f.position()?,
    })
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: Value = serde_json::from_str(text)?;
    let root = match &doc {
        Value::Object(m) => m,
        _ => return Err(schema("$", "expected a top-level object")),
    };
    let depots = array(root, "depots")?
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let f = Fields::of(v, format!("depots[{n}]"))?;
            Ok(Depot {
                id: f.string("id")?,
                capacity: f.integer("capacity")?,
                position: f.position()?,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let vehicles = array(root, "vehicles")?
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let f = Fields::of(v, format!("vehicles[{n}]"))?;
            Ok(Vehicle {
                id: f.string("id")?,
                home_depot: f.string("depot")?,
                capacity: f.integer("capacity")?,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let customers = array(root, "customers")?
        .iter()
        .enumerate()
        .map(|(n, v)| parse_customer(v, format!("customers[{n}]")))
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let distances = match root.get("distances") {
        None | Some(Value::Null) => None,
        Some(block) => Some(parse_distance_block(block)?),
    };
    Instance::new(depots, vehicles, customers, distances)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.severity, self.message)
    }
}

/// Structural feasibility checks that can be decided before compiling.
pub fn validate_instance(inst: &Instance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let error = |message: String| Diagnostic {
        severity: Severity::Error,
        message,
    };
    let (n_vehicles, n_customers) = (inst.vehicles.len(), inst.customers.len());
    if n_vehicles > n_customers {
        // every vehicle must serve a first and last customer
        out.push(error(format!(
            "more vehicles than customers ({n_vehicles} > {n_customers})"
        )));
    }
    let demand = inst.total_demand();
    let fleet: i64 = inst.vehicles.iter().map(|v| v.capacity).sum();
    if demand > fleet {
        out.push(error(format!(
            "total demand {demand} exceeds fleet capacity {fleet}"
        )));
    }
    let depot_total: i64 = inst.depots.iter().map(|d| d.capacity).sum();
    if demand > depot_total {
        out.push(error(format!(
            "total demand {demand} exceeds depot capacity {depot_total}"
        )));
    }
    let mut homed: BTreeMap<usize, i64> = BTreeMap::new();
    for (k, v) in inst.vehicles.iter().enumerate() {
        *homed.entry(inst.home[k]).or_default() += v.capacity;
    }
    for (d, depot) in inst.depots.iter().enumerate() {
        let fleet_at = homed.get(&d).copied().unwrap_or(0);
        if depot.capacity >= fleet_at {
            out.push(Diagnostic {
                severity: Severity::Warning,
                message: format!(
                    "depot `{}` capacity {} is not below the combined capacity {} of its vehicles",
                    depot.id, depot.capacity, fleet_at
                ),
            });
        }
    }
    out
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}
