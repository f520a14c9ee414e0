//! Minimal SVG log-log chart: errors, kernel bound, reference slope.

use std::fmt::Write as _;

use bvquad::runner::{ConvergenceReport, NOISE_FLOOR};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, log_n: f64) -> f64 {
        LEFT + (log_n - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, log_e: f64) -> f64 {
        HEIGHT - BOTTOM - (log_e - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn convergence_plot(report: &ConvergenceReport) -> String {
    let floor = NOISE_FLOOR / 100.0;
    let pts: Vec<(f64, f64)> = report
        .samples
        .iter()
        .map(|s| ((s.n as f64).log10(), s.error.max(floor).log10()))
        .collect();
    let bound: Vec<(f64, f64)> = report
        .samples
        .iter()
        .filter(|s| s.bound_kernel > 0.0)
        .map(|s| ((s.n as f64).log10(), s.bound_kernel.max(floor).log10()))
        .collect();
    let xs = pts.iter().map(|p| p.0);
    let ys = pts.iter().chain(&bound).map(|p| p.1);
    let frame = Frame {
        x0: xs.clone().fold(f64::INFINITY, f64::min).floor(),
        x1: xs.fold(f64::NEG_INFINITY, f64::max).ceil().max(1.0),
        y0: ys.clone().fold(f64::INFINITY, f64::min).floor(),
        y1: ys.fold(f64::NEG_INFINITY, f64::max).ceil(),
    };
    let frame = Frame {
        x1: if frame.x1 > frame.x0 { frame.x1 } else { frame.x0 + 1.0 },
        y1: if frame.y1 > frame.y0 { frame.y1 } else { frame.y0 + 1.0 },
        ..frame
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = format!("{} / {} / {}", report.family, report.function, report.weight.label());
    let _ = writeln!(svg, r#"<text x="{LEFT}" y="22">{}</text>"#, escape(&title));

    // axes and decade ticks
    let (bx, by) = (frame.px(frame.x0), frame.py(frame.y0));
    let (ex, ey) = (frame.px(frame.x1), frame.py(frame.y1));
    let _ = writeln!(
        svg,
        r#"<path d="M{bx:.2},{ey:.2} L{bx:.2},{by:.2} L{ex:.2},{by:.2}" stroke="black" fill="none"/>"#
    );
    for k in frame.x0 as i32..=frame.x1 as i32 {
        let x = frame.px(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{by:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"#,
            by + 5.0,
            by + 20.0
        );
    }
    let y_step = ((frame.y1 - frame.y0) / 10.0).ceil().max(1.0) as usize;
    for k in (frame.y0 as i32..=frame.y1 as i32).step_by(y_step) {
        let y = frame.py(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{bx:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"#,
            bx - 5.0,
            bx - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#,
        (bx + ex) / 2.0,
        HEIGHT - 8.0
    );

    if bound.len() > 1 {
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" stroke="#1f77b4" stroke-dasharray="6,4" fill="none"/>"##,
            polyline(&frame, &bound)
        );
    }
    if let (Some(slope), Some(anchor)) = (
        report.expected_slope,
        report.samples.iter().find(|s| s.error >= NOISE_FLOOR),
    ) {
        let x_a = (anchor.n as f64).log10();
        let y_a = anchor.error.log10();
        let y_b = y_a + slope * (frame.x1 - x_a);
        let line = [(x_a, y_a), (frame.x1, y_b.max(frame.y0))];
        let line = if y_b < frame.y0 {
            [line[0], (x_a + (frame.y0 - y_a) / slope, frame.y0)]
        } else {
            line
        };
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" stroke="#7f7f7f" fill="none"/>"##,
            polyline(&frame, &line)
        );
    }
    for &(x, y) in &pts {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#d62728"/>"##,
            frame.px(x),
            frame.py(y)
        );
    }

    let legend_x = ex - 190.0;
    let slope_label = report
        .expected_slope
        .map_or("reference slope: none".to_string(), |s| format!("reference slope {s}"));
    let fitted = report
        .fitted_slope
        .map_or("fitted slope: none".to_string(), |s| format!("fitted slope {s:.3}"));
    for (i, (color, text)) in [
        ("#d62728", "error".to_string()),
        ("#1f77b4", "kernel bound".to_string()),
        ("#7f7f7f", slope_label),
        ("black", fitted),
    ]
    .iter()
    .enumerate()
    {
        let y = TOP + 14.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{legend_x:.2}" y="{:.2}" width="10" height="3" fill="{color}"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
            y - 4.0,
            legend_x + 16.0,
            escape(text)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn polyline(frame: &Frame, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect::<Vec<_>>()
        .join(" ")
}
