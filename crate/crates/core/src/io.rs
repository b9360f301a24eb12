//! Coordinate text format for QUBO models and the layout sidecar.
//!
//! ```text
//! # comment
//! qubo <dimension> <offset-num> <offset-den> <distance-scale>
//! p p c      linear terms
//! p q c      quadratic terms, p < q
//! ```
//!
//! Coefficients are scaled integers. The header offset is written in
//! distance units as a reduced fraction, so `offset / scale` survives exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

use crate::compiler::PenaltyConfig;
use crate::layout::{SlackEncoding, SlackOwner, SlackRegister, VariableLayout};
use crate::model::{Polynomial, QuboModel};
use crate::problem::StartSymbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `qubo` header")]
    MissingHeader,
    #[error("offset {num}/{den} is not a whole number of scaled units at scale {scale}")]
    InexactOffset { num: i64, den: i64, scale: i64 },
    #[error("layout sidecar: {0}")]
    Layout(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Writes `model` in coordinate format. A layout, when given, adds comment
/// lines naming the instance dimensions.
pub fn export_qubo(model: &QuboModel<i64>, layout: Option<&VariableLayout>) -> String {
    let mut out = String::new();
    if let Some(layout) = layout {
        let _ = writeln!(
            out,
            "# customers {} vehicles {} depots {} route-bits {} slack-bits {}",
            layout.n_customers(),
            layout.n_vehicles(),
            layout.depot_ids.len(),
            layout.route_bits(),
            layout.total_bits - layout.route_bits()
        );
    }
    if let Some(p) = model.penalty {
        let _ = writeln!(out, "# penalty {}", p.weight);
    }
    let offset = Ratio::new(model.offset(), model.scale);
    let _ = writeln!(
        out,
        "qubo {} {} {} {}",
        model.dimension,
        offset.numer(),
        offset.denom(),
        model.scale
    );
    for (p, c) in &model.terms.linear {
        let _ = writeln!(out, "{p} {p} {c}");
    }
    for ((p, q), c) in &model.terms.quadratic {
        let _ = writeln!(out, "{p} {q} {c}");
    }
    out
}

fn int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

/// Parses the coordinate format back into an exact model.
pub fn import_qubo(text: &str) -> Result<QuboModel<i64>, FormatError> {
    let mut header: Option<(usize, i64)> = None;
    let mut penalty = None;
    let mut terms = Polynomial::<i64>::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            if let ["penalty", w] = toks.as_slice() {
                penalty = Some(PenaltyConfig {
                    weight: int(w, line, "penalty")?,
                });
            }
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.first() == Some(&"qubo") {
            if header.is_some() {
                return Err(syntax(line, "duplicate header"));
            }
            let [_, dim, num, den, scale] = toks.as_slice() else {
                return Err(syntax(line, "header needs 4 fields"));
            };
            let dim: usize = int(dim, line, "dimension")?;
            let num: i64 = int(num, line, "offset numerator")?;
            let den: i64 = int(den, line, "offset denominator")?;
            let scale: i64 = int(scale, line, "scale")?;
            if den <= 0 || scale <= 0 {
                return Err(syntax(line, "denominator and scale must be positive"));
            }
            let scaled = num as i128 * scale as i128;
            if scaled % den as i128 != 0 {
                return Err(FormatError::InexactOffset { num, den, scale });
            }
            terms.add_constant((scaled / den as i128) as i64);
            header = Some((dim, scale));
            continue;
        }
        let Some((dim, _)) = header else {
            return Err(FormatError::MissingHeader);
        };
        let [p, q, c] = toks.as_slice() else {
            return Err(syntax(line, "expected `p q c`"));
        };
        let p: usize = int(p, line, "index")?;
        let q: usize = int(q, line, "index")?;
        let c: i64 = int(c, line, "coefficient")?;
        if p >= dim || q >= dim {
            return Err(syntax(line, format!("index out of range for dimension {dim}")));
        }
        if p > q {
            return Err(syntax(line, "quadratic terms need p < q"));
        }
        if p == q {
            terms.add_linear(p, c);
        } else {
            terms.add_quadratic(p, q, c);
        }
    }
    let (dim, scale) = header.ok_or(FormatError::MissingHeader)?;
    let mut model = QuboModel::new(dim, terms).expect("indices checked per line");
    model.scale = scale;
    model.penalty = penalty;
    Ok(model)
}

/// Writes the index → symbol sidecar. The comment header carries enough to
/// rebuild the layout with [`parse_layout`].
pub fn export_layout(layout: &VariableLayout) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# customers {}", layout.customer_ids.join(" "));
    let _ = writeln!(out, "# vehicles {}", layout.vehicle_ids.join(" "));
    let _ = writeln!(out, "# depots {}", layout.depot_ids.join(" "));
    let _ = writeln!(out, "# start {}", layout.start_symbol.as_str());
    let _ = writeln!(out, "# encoding {}", layout.encoding.as_str());
    for (r, reg) in layout.slack_registers.iter().enumerate() {
        let coeffs: Vec<String> = reg.coefficients.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "# register {r} {} bound {} first {} coefficients {}",
            layout.owner_tag(&reg.owner),
            reg.bound,
            reg.first_bit,
            if coeffs.is_empty() { "-".to_string() } else { coeffs.join(",") }
        );
    }
    for bit in 0..layout.total_bits {
        let _ = writeln!(out, "{bit} {}", layout.symbol_name(bit).expect("bit in range"));
    }
    out
}

fn bad(message: impl Into<String>) -> FormatError {
    FormatError::Layout(message.into())
}

fn parse_owner(
    tag: &str,
    customers: &[String],
    vehicles: &[String],
    depots: &[String],
) -> Result<SlackOwner, FormatError> {
    let find = |ids: &[String], id: &str| {
        ids.iter()
            .position(|x| x == id)
            .ok_or_else(|| bad(format!("unknown id `{id}` in register `{tag}`")))
    };
    let (kind, rest) = tag
        .split_once(':')
        .ok_or_else(|| bad(format!("bad register tag `{tag}`")))?;
    match kind {
        "subtour" => {
            let set = rest
                .split(',')
                .map(|id| find(customers, id))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SlackOwner::Subtour(set))
        }
        "vehicle" => Ok(SlackOwner::Vehicle(find(vehicles, rest)?)),
        "depot" => Ok(SlackOwner::Depot(find(depots, rest)?)),
        _ => Err(bad(format!("bad register tag `{tag}`"))),
    }
}

/// Rebuilds a layout from a sidecar and checks every body line against it.
pub fn parse_layout(text: &str) -> Result<VariableLayout, FormatError> {
    let mut customers = None;
    let mut vehicles = None;
    let mut depots = None;
    let mut start = None;
    let mut encoding = None;
    let mut raw_registers = Vec::new();
    let mut body: BTreeMap<usize, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            let ids = || toks[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>();
            match toks.first().copied() {
                Some("customers") => customers = Some(ids()),
                Some("vehicles") => vehicles = Some(ids()),
                Some("depots") => depots = Some(ids()),
                Some("start") => {
                    start = Some(match toks.get(1).copied() {
                        Some("mu") => StartSymbol::Mu,
                        Some("beta") => StartSymbol::Beta,
                        _ => return Err(syntax(line, "start must be mu or beta")),
                    })
                }
                Some("encoding") => {
                    let e: SlackEncoding = toks
                        .get(1)
                        .ok_or_else(|| syntax(line, "missing encoding"))?
                        .parse()
                        .map_err(|e: String| syntax(line, e))?;
                    encoding = Some(e);
                }
                Some("register") => raw_registers.push((line, toks.clone().join(" "))),
                _ => {}
            }
            continue;
        }
        let (bit, name) = trimmed
            .split_once(' ')
            .ok_or_else(|| syntax(line, "expected `<index> <symbol>`"))?;
        let bit: usize = int(bit, line, "index")?;
        if body.insert(bit, name.trim().to_string()).is_some() {
            return Err(syntax(line, format!("duplicate index {bit}")));
        }
    }
    let customers = customers.ok_or_else(|| bad("missing `# customers`"))?;
    let vehicles = vehicles.ok_or_else(|| bad("missing `# vehicles`"))?;
    let depots = depots.ok_or_else(|| bad("missing `# depots`"))?;
    let start = start.ok_or_else(|| bad("missing `# start`"))?;
    let encoding = encoding.ok_or_else(|| bad("missing `# encoding`"))?;
    let mut registers = Vec::new();
    for (line, joined) in raw_registers {
        let toks: Vec<&str> = joined.split(' ').collect();
        let ["register", _, tag, "bound", bound, "first", first, "coefficients", coeffs] =
            toks.as_slice()
        else {
            return Err(syntax(line, "malformed register line"));
        };
        let coefficients = if *coeffs == "-" {
            Vec::new()
        } else {
            coeffs
                .split(',')
                .map(|c| int(c, line, "coefficient"))
                .collect::<Result<Vec<i64>, _>>()?
        };
        registers.push(SlackRegister {
            owner: parse_owner(tag, &customers, &vehicles, &depots)?,
            bound: int(bound, line, "bound")?,
            coefficients,
            first_bit: int(first, line, "first bit")?,
        });
    }
    let layout =
        VariableLayout::from_parts(customers, vehicles, depots, start, encoding, registers);
    let mut expected_first = layout.route_bits();
    for reg in &layout.slack_registers {
        if reg.first_bit != expected_first {
            return Err(bad(format!(
                "register `{}` starts at {}, expected {expected_first}",
                layout.owner_tag(&reg.owner),
                reg.first_bit
            )));
        }
        expected_first += reg.width();
    }
    if body.len() != layout.total_bits {
        return Err(bad(format!(
            "{} symbol lines for {} bits",
            body.len(),
            layout.total_bits
        )));
    }
    for (bit, name) in &body {
        match layout.symbol_name(*bit) {
            Some(expected) if &expected == name => {}
            Some(expected) => {
                return Err(bad(format!("bit {bit} is `{name}`, expected `{expected}`")))
            }
            None => return Err(bad(format!("bit {bit} is out of range"))),
        }
    }
    Ok(layout)
}
