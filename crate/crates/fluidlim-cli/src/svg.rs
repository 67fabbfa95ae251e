//! Minimal self-contained SVG plotting: each coordinate of the trajectory
//! as a step polyline, optionally overlaid with the fluid-limit curves.
//! No external references, no charting stack — the CSV is the contract,
//! this is a convenience view.

use std::fmt::Write as _;
use std::path::Path;

use fluidlim::ode::FluidSolution;
use fluidlim::simulate::Trajectory;

use crate::CliResult;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Frame {
    t_max: f64,
    v_min: f64,
    v_max: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * t / self.t_max.max(f64::MIN_POSITIVE)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.v_max - self.v_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - self.v_min) / span
    }
}

fn polyline(points: &[(f64, f64)], color: &str, dashed: bool, frame: &Frame) -> String {
    let mut pts = String::new();
    for (t, v) in points {
        let _ = write!(pts, "{:.2},{:.2} ", frame.x(*t), frame.y(*v));
    }
    let dash = if dashed { " stroke-dasharray=\"6,4\"" } else { "" };
    format!(
        "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
        pts.trim_end()
    )
}

pub fn write_plot(
    path: &Path,
    traj: &Trajectory,
    overlay: Option<&FluidSolution>,
) -> CliResult<()> {
    let d = traj.dim();
    let t_max = traj.horizon;
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    let mut scan = |v: f64| {
        v_min = v_min.min(v);
        v_max = v_max.max(v);
    };
    for x in &traj.states {
        x.coords().iter().copied().for_each(&mut scan);
    }
    if let Some(sol) = overlay {
        for y in &sol.states {
            y.coords().iter().copied().for_each(&mut scan);
        }
    }
    if !v_min.is_finite() {
        v_min = 0.0;
        v_max = 1.0;
    }
    let frame = Frame { t_max, v_min, v_max };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n  <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">t = 0</text>\n  <text x=\"{}\" y=\"{}\" font-size=\"12\">t = {:.3}</text>\n",
        MARGIN,
        HEIGHT - MARGIN + 16.0,
        WIDTH - MARGIN - 40.0,
        HEIGHT - MARGIN + 16.0,
        t_max
    ));

    // trajectory: right-continuous step plot per coordinate
    for i in 0..d {
        let mut pts = Vec::with_capacity(2 * traj.states.len());
        for (k, (t, x)) in traj.jump_times.iter().zip(&traj.states).enumerate() {
            if k > 0 {
                pts.push((*t, traj.states[k - 1].get(i)));
            }
            pts.push((*t, x.get(i)));
        }
        if let Some(last) = traj.states.last() {
            pts.push((t_max, last.get(i)));
        }
        svg.push_str(&polyline(&pts, PALETTE[i % PALETTE.len()], false, &frame));
    }

    if let Some(sol) = overlay {
        let dim = sol.states[0].dim();
        for i in 0..dim {
            let pts: Vec<(f64, f64)> = sol
                .times
                .iter()
                .zip(&sol.states)
                .map(|(t, y)| (*t, y.get(i)))
                .collect();
            svg.push_str(&polyline(&pts, PALETTE[i % PALETTE.len()], true, &frame));
        }
    }

    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}
