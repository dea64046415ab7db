//! Minimal SVG line plots: fixed 800×500 canvas, logarithmic x axis,
//! optional vertical whiskers.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Point {
    pub x: f64,
    pub y: f64,
    pub whisker: Option<(f64, f64)>,
}

pub struct Line {
    pub label: String,
    pub points: Vec<Point>,
}

fn fmt(x: f64) -> String {
    if x == x.round() && x.abs() < 1e9 {
        format!("{}", x as i64)
    } else {
        format!("{x:.3}")
    }
}

pub fn line_plot(title: &str, y_label: &str, lines: &[Line], y_range: Option<(f64, f64)>) -> String {
    let xs: Vec<f64> = lines.iter().flat_map(|l| l.points.iter().map(|p| p.x.max(1.0))).collect();
    let ys: Vec<f64> = lines
        .iter()
        .flat_map(|l| {
            l.points.iter().flat_map(|p| {
                let (lo, hi) = p.whisker.unwrap_or((p.y, p.y));
                [p.y, lo, hi]
            })
        })
        .collect();
    let (mut x0, mut x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    if !x0.is_finite() {
        (x0, x1) = (1.0, 10.0);
    }
    if x1 <= x0 {
        x1 = x0 * 2.0;
    }
    let (mut y0, mut y1) = y_range.unwrap_or_else(|| {
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo.min(0.0), hi)
    });
    if !y0.is_finite() || !y1.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let (lx0, lx1) = (x0.ln(), x1.ln());
    let px = |x: f64| LEFT + (x.max(1.0).ln() - lx0) / (lx1 - lx0) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    // Axes.
    let (ax, ay) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{ax}" y1="{ay}" x2="{}" y2="{ay}" stroke="black"/>"#, WIDTH - RIGHT);
    let _ = writeln!(s, r#"<line x1="{ax}" y1="{TOP}" x2="{ax}" y2="{ay}" stroke="black"/>"#);
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for t in ticks {
        let x = px(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{ay}" x2="{x:.2}" y2="{}" stroke="black"/>"#, ay + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, ay + 20.0, fmt(t));
    }
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{ax}" y2="{y:.2}" stroke="black"/>"#, ax - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ax - 8.0, y + 4.0, fmt(v));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">n (log scale)</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(y_label)
    );
    for (i, line) in lines.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = line.points.iter().map(|p| format!("{:.2},{:.2}", px(p.x), py(p.y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        for p in &line.points {
            let (x, y) = (px(p.x), py(p.y));
            if let Some((lo, hi)) = p.whisker {
                let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#, py(lo), py(hi));
                for w in [lo, hi] {
                    let (a, b, y) = (x - 4.0, x + 4.0, py(w));
                    let _ = writeln!(s, r#"<line x1="{a:.2}" y1="{y:.2}" x2="{b:.2}" y2="{y:.2}" stroke="{color}"/>"#);
                }
            }
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 16.0 * i as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" fill="{color}">{}</text>"#, LEFT + 12.0, ly + 4.0, escape(&line.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let line = Line {
            label: "p <= 1".into(),
            points: vec![
                Point { x: 8.0, y: 0.5, whisker: Some((0.4, 0.6)) },
                Point { x: 64.0, y: 0.7, whisker: Some((0.6, 0.8)) },
            ],
        };
        let svg = line_plot("t", "p", &[line], Some((0.0, 1.0)));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains(r#"width="800""#) && svg.contains("p &lt;= 1"));
        assert_eq!(svg, line_plot("t", "p", &[Line { label: "p <= 1".into(), points: vec![
            Point { x: 8.0, y: 0.5, whisker: Some((0.4, 0.6)) },
            Point { x: 64.0, y: 0.7, whisker: Some((0.6, 0.8)) },
        ] }], Some((0.0, 1.0))));
        // Degenerate inputs still render.
        assert!(line_plot("e", "y", &[], None).contains("</svg>"));
    }
}
