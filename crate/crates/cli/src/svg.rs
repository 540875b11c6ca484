//! Just enough SVG for sweep curves and field heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// One polyline per named series on shared linear axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (x0, x1) = span(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let (y0, y1) = span(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{left}" y="{}" text-anchor="middle">{x0:.4}</text>"#, bottom + 16.0);
    let _ = writeln!(out, r#"<text x="{right}" y="{}" text-anchor="middle">{x1:.4}</text>"#, bottom + 16.0);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(out, r#"<text x="{}" y="{bottom}" text-anchor="end">{y0:.4}</text>"#, left - 4.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, left - 4.0, top + 4.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for (k, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ =
            writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, coords.join(" "));
        let ly = top + 16.0 * (k as f64 + 1.0);
        let _ =
            writeln!(out, r#"<text x="{}" y="{ly}" text-anchor="end" fill="{color}">{}</text>"#, right, escape(name));
    }
    out.push_str("</svg>\n");
    out
}

/// Polar heatmap: `values[iphi * n_r + ir]` sampled on uniform nodes over
/// r ∈ [0, a], φ ∈ [0, φ0], each node drawn as its surrounding annular cell.
pub fn polar_heatmap(title: &str, a: f64, phi0: f64, n_r: usize, n_phi: usize, values: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = (WIDTH.min(HEIGHT) / 2.0 - MARGIN) / a;
    let (cx, cy) = (WIDTH / 2.0, HEIGHT / 2.0 + 10.0);
    let dr = a / (n_r - 1) as f64;
    let dphi = phi0 / (n_phi - 1) as f64;
    let point = |r: f64, phi: f64| (cx + scale * r * phi.cos(), cy - scale * r * phi.sin());
    for iphi in 0..n_phi {
        for ir in 0..n_r {
            let r_lo = (ir as f64 - 0.5).max(0.0) * dr;
            let r_hi = ((ir as f64 + 0.5) * dr).min(a);
            let p_lo = ((iphi as f64 - 0.5) * dphi).max(0.0);
            let p_hi = ((iphi as f64 + 0.5) * dphi).min(phi0);
            let corners = [point(r_lo, p_lo), point(r_hi, p_lo), point(r_hi, p_hi), point(r_lo, p_hi)];
            let t = if peak > 0.0 { values[iphi * n_r + ir].abs() / peak } else { 0.0 };
            let pts: Vec<String> = corners.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polygon points="{}" fill="{}"/>"#, pts.join(" "), ramp(t));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Blue (0) through white to red (1).
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (s, s, 1.0)
    } else {
        let s = (1.0 - t) / 0.5;
        (1.0, s, s)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8)
}
