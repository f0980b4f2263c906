use std::fmt::Write;

use crate::analysis::point_cloud_diameter;
use crate::analysis::ConsensusCertificate;
use crate::solver::Trajectory;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
/// Longest polyline drawn; denser grids are thinned by a fixed stride.
const MAX_POINTS: usize = 2000;

/// Static line chart of `ln d(t)` against the certified bound line
/// `ln D0 - gamma (t - 2 tau_bar)`. Nodes with `d(t) = 0` are left out.
pub fn decay_plot_svg(traj: &Trajectory, cert: &ConsensusCertificate) -> String {
    let d = traj.dimension();
    let stride = traj.node_count().div_ceil(MAX_POINTS).max(1);
    let points: Vec<(f64, f64)> = (0..traj.node_count())
        .step_by(stride)
        .filter_map(|k| {
            let dk = point_cloud_diameter(traj.state(k), d);
            (dk > 0.0).then(|| (traj.time(k), dk.ln()))
        })
        .collect();
    let t_end = traj.last_time();
    let bound = |t: f64| cert.d0.ln() - cert.gamma * (t - 2.0 * cert.tau_bar);
    let bound_line = if cert.d0 > 0.0 {
        vec![(0.0, bound(0.0)), (t_end, bound(t_end))]
    } else {
        Vec::new()
    };

    let ys = points.iter().chain(&bound_line).map(|p| p.1);
    let (mut y_lo, mut y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| {
        (a.min(y), b.max(y))
    });
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (-1.0, 1.0);
    }
    if y_hi - y_lo < 1e-12 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let x_hi = if t_end > 0.0 { t_end } else { 1.0 };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |t: f64| MARGIN_LEFT + plot_w * t / x_hi;
    let sy = |y: f64| MARGIN_TOP + plot_h * (y_hi - y) / (y_hi - y_lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let t = x_hi * f;
        let y = y_lo + (y_hi - y_lo) * f;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.3}</text>"#,
            sx(t),
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(y) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">ln d(t)</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    polyline(&mut svg, &points, "steelblue", "", &sx, &sy);
    polyline(
        &mut svg,
        &bound_line,
        "firebrick",
        r#" stroke-dasharray="6 4""#,
        &sx,
        &sy,
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" fill="firebrick">bound, gamma = {}</text>"#,
        MARGIN_LEFT + 10.0,
        MARGIN_TOP + 16.0,
        cert.gamma
    );
    let _ = writeln!(svg, "</svg>");
    svg
}

fn polyline(
    svg: &mut String,
    points: &[(f64, f64)],
    colour: &str,
    extra: &str,
    sx: &dyn Fn(f64) -> f64,
    sy: &dyn Fn(f64) -> f64,
) {
    if points.is_empty() {
        return;
    }
    let mut coords = String::new();
    for (i, &(t, y)) in points.iter().enumerate() {
        if i > 0 {
            coords.push(' ');
        }
        let _ = write!(coords, "{:.2},{:.2}", sx(t), sy(y));
    }
    let _ = writeln!(
        svg,
        r#"<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.5"{extra}/>"#
    );
}
