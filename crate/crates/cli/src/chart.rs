use std::fmt::Write as _;

use learn::GdTrace;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Column-match fraction of each level against the step count.
pub fn trace_svg(trace: &GdTrace, depth: usize) -> String {
    let steps = trace.rows.last().map_or(1, |r| r.step).max(1) as f64;
    let x = |t: usize| MARGIN + t as f64 / steps * (WIDTH - 2.0 * MARGIN);
    let y = |m: f64| HEIGHT - MARGIN - m * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-size="12">"#).unwrap();
    writeln!(
        out,
        r#"<path d="M{MARGIN} {MARGIN} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .unwrap();
    for tick in [0.0, 0.5, 1.0] {
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#, MARGIN - 6.0, y(tick) + 4.0).unwrap();
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{steps}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 18.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">step</text>"#, WIDTH / 2.0, HEIGHT - 12.0).unwrap();
    writeln!(out, r#"<text x="12" y="{}" transform="rotate(-90 12 {})">column match</text>"#, HEIGHT / 2.0, HEIGHT / 2.0)
        .unwrap();
    for level in 0..depth {
        let color = COLORS[level % COLORS.len()];
        let points: Vec<String> =
            trace.rows.iter().map(|r| format!("{:.2},{:.2}", x(r.step), y(r.matches[level]))).collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, points.join(" ")).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">level {}</text>"#,
            WIDTH - MARGIN - 50.0,
            MARGIN + 14.0 * level as f64,
            level + 1
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
