//! Minimal SVG line charts, emitted directly; CSVs stay the canonical
//! output, these are for eyeballing.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// One polyline per series over a shared integer x-axis. With `log_y` the
/// values are plotted as log10 (clamped at 1e-16).
pub fn line_chart(title: &str, series: &[(String, Vec<f64>)], log_y: bool) -> String {
    let transform = |v: f64| if log_y { v.max(1e-16).log10() } else { v };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut max_len = 0usize;
    for (_, values) in series {
        max_len = max_len.max(values.len());
        for &v in values {
            let t = transform(v);
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let x_at = |i: usize| {
        if max_len <= 1 {
            MARGIN
        } else {
            MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (max_len - 1) as f64
        }
    };
    let y_at = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (transform(v) - lo) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        MARGIN,
        escape(title)
    );
    // Axes.
    let _ = writeln!(
        s,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"#333\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>",
        MARGIN + 4.0,
        hi
    );
    let _ = writeln!(
        s,
        "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>",
        HEIGHT - MARGIN,
        lo
    );
    for (idx, (label, values)) in series.iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_at(i), y_at(v)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.join(" ")
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
            WIDTH - MARGIN + 4.0,
            y_at(*values.last().unwrap()),
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
