//! CSV plot data and minimal SVG renderings.

use std::fmt::Write as _;

use crate::coverage::CoveragePlan;
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point};
use crate::harness::{ComparisonTable, SweepResult};
use crate::model::Trajectory;
use crate::sim::SimulationReport;
use crate::speed::{DiscretizedPath, SpeedSolution};
use crate::waypoints::WaypointPlan;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `(t, x, y)` samples every `dt` seconds, plus the final instant.
pub fn trajectory_csv(traj: &Trajectory, dt: f64) -> Result<String> {
    let samples = traj.time_samples(dt)?;
    to_csv(&["t", "x", "y"], samples.into_iter().map(|(t, p)| vec![t.to_string(), p.x.to_string(), p.y.to_string()]))
}

/// Waypoints with their dwell and outgoing travel times.
pub fn waypoint_schedule_csv(traj: &Trajectory) -> Result<String> {
    let travel = traj.travel_times();
    to_csv(
        &["index", "x", "y", "dwell_s", "travel_s"],
        traj.waypoints().iter().zip(traj.dwell_times()).enumerate().map(|(i, (p, d))| {
            vec![i.to_string(), p.x.to_string(), p.y.to_string(), d.to_string(), opt(travel.get(i).copied())]
        }),
    )
}

/// Reads back the output of [`waypoint_schedule_csv`].
pub fn read_waypoint_schedule(text: &str) -> Result<Trajectory> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let (mut pts, mut dwell, mut travel) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<Option<f64>> {
            let raw = rec.get(c).unwrap_or("").trim();
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("schedule row {i}: column {c} is not a number: {raw:?}")))
        };
        let need = |c: usize| field(c)?.ok_or_else(|| Error::Config(format!("schedule row {i}: column {c} is empty")));
        pts.push(Point::new(need(1)?, need(2)?));
        dwell.push(need(3)?);
        if let Some(t) = field(4)? {
            travel.push(t);
        }
    }
    Trajectory::new(pts, travel, dwell)
}

/// VBS rows followed by GT rows with their assigned cluster.
pub fn coverage_csv(plan: &CoveragePlan, gts: &[Point]) -> Result<String> {
    let assignment = plan.assignment(gts.len());
    let vbs = plan
        .vbs
        .iter()
        .enumerate()
        .map(|(g, v)| vec!["vbs".into(), g.to_string(), v.x.to_string(), v.y.to_string(), g.to_string()]);
    let terminals = gts.iter().enumerate().map(|(k, w)| {
        let cluster = assignment[k].map(|g| g.to_string()).unwrap_or_default();
        vec!["gt".into(), k.to_string(), w.x.to_string(), w.y.to_string(), cluster]
    });
    to_csv(&["kind", "index", "x", "y", "cluster"], vbs.chain(terminals))
}

/// Ordered waypoints; entry and exit points of cluster regions are tagged
/// `s<g>` and `f<g>`.
pub fn waypoints_csv(plan: &WaypointPlan) -> Result<String> {
    to_csv(
        &["order", "x", "y", "tag"],
        plan.waypoints.iter().enumerate().map(|(i, p)| {
            let tags: Vec<String> = plan
                .region_visits
                .iter()
                .flat_map(|v| {
                    let mut t = Vec::new();
                    if v.entry == *p {
                        t.push(format!("s{}", v.cluster));
                    }
                    if v.exit == *p {
                        t.push(format!("f{}", v.cluster));
                    }
                    t
                })
                .collect();
            vec![i.to_string(), p.x.to_string(), p.y.to_string(), tags.join(" ")]
        }),
    )
}

/// Per-step `(j, x, y, τ_j, speed)`; the terminal step has speed 0.
pub fn speed_csv(path: &DiscretizedPath, sol: &SpeedSolution) -> Result<String> {
    to_csv(
        &["j", "x", "y", "tau_s", "speed_mps"],
        path.samples().iter().zip(path.step_lengths()).zip(&sol.leg_times).enumerate().map(|(j, ((q, l), t))| {
            let speed = if *t > 0.0 { l / t } else { 0.0 };
            vec![j.to_string(), q.x.to_string(), q.y.to_string(), t.to_string(), speed.to_string()]
        }),
    )
}

pub fn report_csv(report: &SimulationReport) -> Result<String> {
    to_csv(
        &["gt_index", "p_lb", "empirical", "ci_low", "ci_high", "exact", "connection_slots", "connection_time_s"],
        report.per_gt.iter().map(|g| {
            vec![
                g.gt_index.to_string(),
                g.p_lb.to_string(),
                opt(g.empirical),
                opt(g.wilson_ci.map(|c| c.0)),
                opt(g.wilson_ci.map(|c| c.1)),
                opt(g.exact),
                g.connection_slots.to_string(),
                g.connection_time.to_string(),
            ]
        }),
    )
}

pub fn static_curve_csv(curve: &[(f64, usize)]) -> Result<String> {
    to_csv(&["time_s", "n_successful"], curve.iter().map(|(t, n)| vec![t.to_string(), n.to_string()]))
}

pub fn comparison_csv(table: &ComparisonTable) -> Result<String> {
    to_csv(
        &[
            "realization",
            "scheme",
            "path_length_m",
            "total_time_s",
            "min_p_lb",
            "min_empirical",
            "guard_slots",
            "requirement_met",
            "error",
        ],
        table.rows.iter().map(|r| {
            vec![
                r.realization.to_string(),
                r.scheme.to_string(),
                opt(r.path_length),
                opt(r.total_time),
                opt(r.min_p_lb),
                opt(r.min_empirical),
                r.guard_slots.map(|g| g.to_string()).unwrap_or_default(),
                r.requirement_met.map(|b| b.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn summary_csv(table: &ComparisonTable) -> Result<String> {
    to_csv(
        &["scheme", "mean_time_s", "mean_path_length_m", "n_ok", "n_failed"],
        table.summary.iter().map(|s| {
            vec![
                s.scheme.to_string(),
                opt(s.mean_time),
                opt(s.mean_path_length),
                s.n_ok.to_string(),
                s.n_failed.to_string(),
            ]
        }),
    )
}

pub fn sweep_csv(sweep: &SweepResult) -> Result<String> {
    to_csv(
        &["scheme", "distance_m", "mean_time_s", "n_ok", "n_failed"],
        sweep.points.iter().map(|p| {
            vec![
                p.scheme.to_string(),
                p.distance.to_string(),
                opt(p.mean_time),
                p.n_ok.to_string(),
                p.n_failed.to_string(),
            ]
        }),
    )
}

const SVG_SIZE: f64 = 640.0;
const SVG_MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    min: Point,
    scale_x: f64,
    scale_y: f64,
}

impl Frame {
    fn new(bb: BoundingBox, equal: bool) -> Self {
        let span = SVG_SIZE - 2.0 * SVG_MARGIN;
        let (w, h) = (bb.width().max(1e-9), bb.height().max(1e-9));
        let (sx, sy) = if equal {
            let s = span / w.max(h);
            (s, s)
        } else {
            (span / w, span / h)
        };
        Self { min: bb.min, scale_x: sx, scale_y: sy }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (SVG_MARGIN + (p.x - self.min.x) * self.scale_x, SVG_SIZE - SVG_MARGIN - (p.y - self.min.y) * self.scale_y)
    }

    fn polyline(&self, pts: &[Point], color: &str, width: f64) -> String {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
            coords.join(" ")
        )
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{SVG_MARGIN}\" y=\"24\">{}</text>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// GTs, optional connection disks around VBSs, and the flown path.
pub fn trajectory_svg(title: &str, gts: &[Point], coverage: Option<&CoveragePlan>, traj: &Trajectory) -> String {
    let mut pts: Vec<Point> = gts.to_vec();
    pts.extend_from_slice(traj.waypoints());
    if let Some(c) = coverage {
        for v in &c.vbs {
            pts.push(*v + Point::new(c.radius, c.radius));
            pts.push(*v - Point::new(c.radius, c.radius));
        }
    }
    let bb = BoundingBox::of(&pts).expect("trajectory has a waypoint");
    let f = Frame::new(bb, true);
    let mut out = svg_open(title);
    if let Some(c) = coverage {
        for v in &c.vbs {
            let (x, y) = f.map(*v);
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" fill=\"#1f77b4\" fill-opacity=\"0.08\" stroke=\"#1f77b4\" stroke-opacity=\"0.4\"/>",
                c.radius * f.scale_x
            );
        }
    }
    out.push_str(&f.polyline(traj.waypoints(), PALETTE[1], 1.5));
    for (p, d) in traj.waypoints().iter().zip(traj.dwell_times()) {
        if *d > 0.0 {
            let (x, y) = f.map(*p);
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{}\"/>", PALETTE[1]);
        }
    }
    for w in gts {
        let (x, y) = f.map(*w);
        let _ =
            writeln!(out, "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"5\" height=\"5\" fill=\"black\"/>", x - 2.5, y - 2.5);
    }
    out.push_str("</svg>\n");
    out
}

/// Named `(x, y)` series on shared axes.
pub fn curves_svg(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts: Vec<Point> = series.iter().flat_map(|(_, s)| s.iter().map(|&(x, y)| Point::new(x, y))).collect();
    let mut out = svg_open(title);
    let Some(mut bb) = BoundingBox::of(&pts) else {
        out.push_str("</svg>\n");
        return out;
    };
    bb.min.y = bb.min.y.min(0.0);
    let f = Frame::new(bb, false);
    let (x0, y0) = f.map(bb.min);
    let (x1, y1) = f.map(bb.max);
    let _ = writeln!(out, "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>");
    let _ = writeln!(out, "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{x0:.2}\" y=\"{:.2}\">{}</text>",
        y0 + 16.0,
        escape(&format!("{} = {:.4}", x_label, bb.min.x))
    );
    let _ = writeln!(
        out,
        "<text x=\"{x1:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
        y0 + 16.0,
        escape(&format!("{:.4}", bb.max.x))
    );
    let _ = writeln!(out, "<text x=\"4\" y=\"{y1:.2}\">{}</text>", escape(&format!("{} max {:.4}", y_label, bb.max.y)));
    for (i, (name, s)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let line: Vec<Point> = s.iter().map(|&(x, y)| Point::new(x, y)).collect();
        out.push_str(&f.polyline(&line, color, 1.5));
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{color}\">{}</text>",
            SVG_SIZE - SVG_MARGIN - 160.0,
            40.0 + 14.0 * i as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
