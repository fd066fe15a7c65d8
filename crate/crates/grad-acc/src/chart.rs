use std::fmt::Write as _;

use crate::sweep::SweepReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Accuracy against drop rate, one line per (batch, max level) series.
pub fn sweep_svg(report: &SweepReport) -> String {
    let max_rate = report.rows.iter().map(|r| r.rate).fold(0.0, f64::max).max(1e-9);
    let x = |p: f64| MARGIN + p / max_rate * (WIDTH - 2.0 * MARGIN);
    let y = |a: f64| HEIGHT - MARGIN - a * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-size="12">"#).unwrap();
    writeln!(
        out,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .unwrap();
    for tick in [0.0, 0.5, 1.0] {
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#, MARGIN - 6.0, y(tick) + 4.0).unwrap();
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{max_rate}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 18.0)
        .unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">drop rate</text>"#, WIDTH / 2.0, HEIGHT - 12.0).unwrap();
    writeln!(out, r#"<text x="12" y="{}" transform="rotate(-90 12 {})">accuracy</text>"#, HEIGHT / 2.0, HEIGHT / 2.0)
        .unwrap();

    let mut keys: Vec<(usize, usize)> = report.rows.iter().map(|r| (r.max_level, r.batch)).collect();
    keys.sort();
    keys.dedup();
    for (i, &(max_level, batch)) in keys.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = report
            .series(batch, max_level)
            .iter()
            .map(|r| format!("{:.2},{:.2}", x(r.rate), y(r.estimate.accuracy)))
            .collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, points.join(" ")).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">B={batch} k={max_level}</text>"#,
            WIDTH - MARGIN + 4.0 - 90.0,
            MARGIN + 14.0 * i as f64
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
