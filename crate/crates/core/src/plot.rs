//! Small deterministic SVG charts: training curves and the confusion
//! heatmap. No timestamps or random ids are embedded, so identical inputs
//! give byte-identical files.

use std::fmt::Write as _;

use crate::eval::ConfusionMatrix;
use crate::train::EpochStats;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of one or more series against 1-based epoch numbers.
pub fn line_chart(title: &str, y_label: &str, series: &[(&str, Vec<f64>)]) -> String {
    let n = series.iter().map(|s| s.1.len()).max().unwrap_or(0);
    let finite = series.iter().flat_map(|s| s.1.iter().copied()).filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    lo = lo.min(0.0);
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let x = |i: usize| LEFT + if n > 1 { pw * i as f64 / (n - 1) as f64 } else { pw / 2.0 };
    let y = |v: f64| TOP + ph * (1.0 - (v - lo) / (hi - lo));

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#, TOP + ph);
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.3}</text>"#, LEFT - 6.0, y(v) + 4.0);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#ddd"/>"##, y(v), LEFT + pw);
    }
    let ticks = n.clamp(1, 10);
    for k in 0..ticks {
        let i = if ticks > 1 { k * (n.max(1) - 1) / (ticks - 1) } else { 0 };
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, x(i), TOP + ph + 18.0, i + 1);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">epoch</text>"#, LEFT + pw / 2.0, H - 10.0);
    let _ = writeln!(s, r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#, TOP + ph / 2.0, escape(y_label));
    for (k, (name, vals)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let lx = LEFT + pw - 120.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="{color}" stroke-width="2"/>"#, ly - 4.0, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 26.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

pub fn loss_curve_svg(history: &[EpochStats]) -> String {
    line_chart(
        "Training and validation loss",
        "loss",
        &[
            ("train", history.iter().map(|h| h.train_loss).collect()),
            ("validation", history.iter().map(|h| h.val_loss).collect()),
        ],
    )
}

pub fn accuracy_curve_svg(history: &[EpochStats]) -> String {
    line_chart(
        "Training and validation accuracy",
        "accuracy",
        &[
            ("train", history.iter().map(|h| h.train_accuracy).collect()),
            ("validation", history.iter().map(|h| h.val_accuracy).collect()),
        ],
    )
}

/// 2×2 heatmap, rows = actual, columns = predicted.
pub fn confusion_svg(cm: &ConfusionMatrix) -> String {
    let grid = cm.as_grid();
    let max = grid.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
    let names = ["negative", "positive"];
    let cell = 120.0;
    let (ox, oy) = (140.0, 70.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="420" height="360" viewBox="0 0 420 360" font-family="sans-serif" font-size="13">"#);
    let _ = writeln!(s, r#"<rect width="420" height="360" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="15">Confusion matrix</text>"#, ox + cell);
    for (r, row) in grid.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let t = v as f64 / max;
            // white → dark blue
            let shade = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
            let fill = format!("#{:02x}{:02x}{:02x}", shade(247.0, 8.0), shade(251.0, 48.0), shade(255.0, 107.0));
            let text = if t > 0.5 { "white" } else { "black" };
            let (x, y) = (ox + c as f64 * cell, oy + r as f64 * cell);
            let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="white"/>"#);
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="20" fill="{text}">{v}</text>"#, x + cell / 2.0, y + cell / 2.0 + 7.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ox - 8.0, oy + r as f64 * cell + cell / 2.0 + 4.0, names[r]);
    }
    for (c, name) in names.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{name}</text>"#, ox + c as f64 * cell + cell / 2.0, oy + 2.0 * cell + 20.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">predicted</text>"#, ox + cell, oy + 2.0 * cell + 42.0);
    let _ = writeln!(s, r#"<text x="24" y="{0}" text-anchor="middle" transform="rotate(-90 24 {0})">actual</text>"#, oy + cell);
    s.push_str("</svg>\n");
    s
}
