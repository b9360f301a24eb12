//! Schematic SVG of an instance and, optionally, a route plan.

use std::fmt::Write as _;

use thiserror::Error;

use crate::decoder::RoutePlan;
use crate::instance::{Instance, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("instance has no positions to draw")]
    NoPositions,
    #[error("plan refers to unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Frame {
    min: Point,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Point]) -> Self {
        let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Self {
            min: Point::new(min_x, min_y),
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    // SVG y grows downwards
    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            SIZE - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }
}

pub fn render_svg(inst: &Instance, plan: Option<&RoutePlan>) -> Result<String, RenderError> {
    if !inst.has_positions() {
        return Err(RenderError::NoPositions);
    }
    let depot_pos: Vec<Point> = inst.depots().iter().map(|d| d.position.unwrap()).collect();
    let cust_pos: Vec<Point> = inst.customers().iter().map(|c| c.position.unwrap()).collect();
    let all: Vec<Point> = depot_pos.iter().chain(&cust_pos).copied().collect();
    let frame = Frame::fit(&all);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(plan) = plan {
        for (n, (vehicle, route)) in plan.routes.iter().enumerate() {
            let k = inst.vehicle_index(vehicle).ok_or_else(|| RenderError::Unknown {
                kind: "vehicle",
                id: vehicle.clone(),
            })?;
            let home = depot_pos[inst.home_depot(k)];
            let mut pts = vec![frame.map(home)];
            for c in route {
                let i = inst.customer_index(c).ok_or_else(|| RenderError::Unknown {
                    kind: "customer",
                    id: c.clone(),
                })?;
                pts.push(frame.map(cust_pos[i]));
            }
            pts.push(frame.map(home));
            let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline class="route" data-vehicle="{vehicle}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                coords.join(" "),
                PALETTE[n % PALETTE.len()]
            );
        }
    }
    for (d, p) in inst.depots().iter().zip(&depot_pos) {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            out,
            r#"<rect class="depot" x="{:.1}" y="{:.1}" width="12" height="12" fill="black"/>"#,
            x - 6.0,
            y - 6.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            x + 8.0,
            y - 8.0,
            d.id
        );
    }
    for (c, p) in inst.customers().iter().zip(&cust_pos) {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            out,
            r#"<circle class="customer" cx="{x:.1}" cy="{y:.1}" r="5" fill="gray"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{} ({})</text>"#,
            x + 7.0,
            y - 7.0,
            c.id,
            c.demand
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
