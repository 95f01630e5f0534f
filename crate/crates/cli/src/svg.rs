//! Hand-rolled SVG emission: a top-down track render with the driven
//! trajectory, and a steering-angle-vs-tick chart. The world is y-down, as
//! is SVG, so world coordinates map straight into the viewBox with no
//! flipping.

use crate::trajectory::TrajectoryRow;
use std::fmt::Write as _;
use symnav::track::Track;

/// Scan overlay for the track render: (tick, per-beam ranges) rows plus the
/// field of view they were taken with (radians). Beams are drawn for a
/// thinned subset of poses.
pub struct ScanOverlay {
    pub fov: f64,
    pub rows: Vec<(u32, Vec<f64>)>,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Track + trajectory render. The viewBox is the track extent padded by 5%
/// of each dimension.
pub fn track_svg(track: &Track, trajectory: &[TrajectoryRow], scans: Option<&ScanOverlay>) -> String {
    let (min, max) = track.extent();
    let span_x = (max.x - min.x).max(1e-9);
    let span_y = (max.y - min.y).max(1e-9);
    let pad_x = 0.05 * span_x;
    let pad_y = 0.05 * span_y;
    let vb = (min.x - pad_x, min.y - pad_y, span_x + 2.0 * pad_x, span_y + 2.0 * pad_y);
    let px_w = 900.0;
    let px_h = (px_w * vb.3 / vb.2).max(1.0);
    let stroke = (track.track_width() * 0.03).max(0.5);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{px_w}\" height=\"{px_h:.0}\">",
        vb.0, vb.1, vb.2, vb.3
    )
    .unwrap();
    writeln!(s, "  <title>{}</title>", xml_escape(track.name())).unwrap();
    writeln!(s, "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#fdfdf8\"/>", vb.0, vb.1, vb.2, vb.3).unwrap();

    for wall in track.walls() {
        writeln!(
            s,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#303030\" stroke-width=\"{stroke}\" stroke-linecap=\"round\"/>",
            wall.a().x, wall.a().y, wall.b().x, wall.b().y
        )
        .unwrap();
    }
    for ob in track.obstacles() {
        // Obstacles are axis-aligned: half_length spans x, half_width y.
        writeln!(
            s,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#8a8a8a\"/>",
            ob.center.x - ob.half_length,
            ob.center.y - ob.half_width,
            2.0 * ob.half_length,
            2.0 * ob.half_width
        )
        .unwrap();
    }

    if let Some(overlay) = scans {
        let stride = (overlay.rows.len() / 12).max(1);
        for (tick, ranges) in overlay.rows.iter().step_by(stride) {
            let Some(pose) = trajectory.iter().find(|r| r.tick == *tick) else { continue };
            let n = ranges.len();
            if n < 2 {
                continue;
            }
            let step = overlay.fov / (n - 1) as f64;
            for (i, r) in ranges.iter().enumerate() {
                let ang = pose.theta - overlay.fov / 2.0 + i as f64 * step;
                writeln!(
                    s,
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#f0a030\" stroke-width=\"{}\" opacity=\"0.45\"/>",
                    pose.x,
                    pose.y,
                    pose.x + r * ang.cos(),
                    pose.y + r * ang.sin(),
                    stroke * 0.25
                )
                .unwrap();
            }
        }
    }

    if !trajectory.is_empty() {
        let mut pts = String::new();
        for row in trajectory {
            write!(pts, "{},{} ", row.x, row.y).unwrap();
        }
        writeln!(
            s,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1860c0\" stroke-width=\"{}\"/>",
            pts.trim_end(),
            stroke * 0.6
        )
        .unwrap();
        let last = trajectory.last().unwrap();
        writeln!(
            s,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#1860c0\"/>",
            last.x,
            last.y,
            stroke * 1.2
        )
        .unwrap();
    }

    let marker_r = track.track_width() * 0.08;
    writeln!(
        s,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{marker_r}\" fill=\"#18a030\"/>",
        track.start().x,
        track.start().y
    )
    .unwrap();
    writeln!(
        s,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{marker_r}\" fill=\"#d02020\"/>",
        track.destination().x,
        track.destination().y
    )
    .unwrap();
    writeln!(
        s,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#d02020\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>",
        track.destination().x,
        track.destination().y,
        track.track_width() / 2.0,
        stroke * 0.4,
        stroke,
        stroke
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// Steering-angle-vs-tick line chart.
pub fn steering_svg(trajectory: &[TrajectoryRow]) -> String {
    const W: f64 = 840.0;
    const H: f64 = 320.0;
    const ML: f64 = 70.0; // left margin for labels
    const MR: f64 = 20.0;
    const MT: f64 = 24.0;
    const MB: f64 = 40.0;
    let plot_w = W - ML - MR;
    let plot_h = H - MT - MB;

    let max_tick = trajectory.last().map_or(1, |r| r.tick).max(1) as f64;
    let amp = trajectory
        .iter()
        .map(|r| r.steer_cmd.abs())
        .fold(0.0f64, f64::max)
        .max(1e-3);

    let x_of = |tick: f64| ML + plot_w * tick / max_tick;
    let y_of = |v: f64| MT + plot_h * (1.0 - (v + amp) / (2.0 * amp));

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" width=\"{W}\" height=\"{H}\">"
    )
    .unwrap();
    s.push_str("  <title>steering command vs tick</title>\n");
    writeln!(s, "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>").unwrap();
    // Frame and zero line.
    writeln!(
        s,
        "  <rect x=\"{ML}\" y=\"{MT}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>"
    )
    .unwrap();
    writeln!(
        s,
        "  <line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b0b0b0\" stroke-width=\"1\" stroke-dasharray=\"4 4\"/>",
        y_of(0.0),
        ML + plot_w,
        y_of(0.0)
    )
    .unwrap();

    if !trajectory.is_empty() {
        let mut pts = String::new();
        for row in trajectory {
            write!(pts, "{},{} ", x_of(row.tick as f64), y_of(row.steer_cmd)).unwrap();
        }
        writeln!(
            s,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1860c0\" stroke-width=\"1.5\"/>",
            pts.trim_end()
        )
        .unwrap();
    }

    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        writeln!(
            s,
            "  <text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"{anchor}\">{text}</text>",
        )
        .unwrap();
    };
    label(&mut s, ML - 6.0, y_of(amp) + 4.0, "end", format!("{amp:.3}"));
    label(&mut s, ML - 6.0, y_of(0.0) + 4.0, "end", "0".into());
    label(&mut s, ML - 6.0, y_of(-amp) + 4.0, "end", format!("{:.3}", -amp));
    label(&mut s, ML, H - 12.0, "start", "0".into());
    label(&mut s, ML + plot_w, H - 12.0, "end", format!("{max_tick:.0}"));
    label(
        &mut s,
        W / 2.0,
        H - 12.0,
        "middle",
        "tick".into(),
    );
    label(&mut s, ML - 6.0, MT - 8.0, "end", "rad".into());
    s.push_str("</svg>\n");
    s
}
