//! Static SVG charts written directly as text.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (60.0, 20.0, 40.0, 50.0);
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn header(out: &mut String, w: f64, h: f64, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn legend(out: &mut String, series: &[Series], x: f64, y: f64) {
    for (i, s) in series.iter().enumerate() {
        let yy = y + 16.0 * i as f64;
        let c = PALETTE[i % PALETTE.len()];
        let _ = write!(
            out,
            r#"<line x1="{x}" y1="{yy}" x2="{}" y2="{yy}" stroke="{c}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 18.0,
            x + 24.0,
            yy + 4.0,
            escape(&s.name)
        );
    }
}

/// Cartesian line chart. `y_range` fixes the vertical axis; values outside
/// are clipped to it.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], y_range: Option<(f64, f64)>) -> String {
    let (l, r, t, b) = MARGIN;
    let (x0, x1) = finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = y_range.unwrap_or_else(|| finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1))));
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * (W - l - r);
    let sy = |y: f64| H - b - (y.clamp(y0, y1) - y0) / (y1 - y0) * (H - t - b);

    let mut out = String::new();
    header(&mut out, W, H, title);
    let _ = write!(
        out,
        r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        W - l - r,
        H - t - b
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = write!(
            out,
            r##"<line x1="{px:.2}" y1="{t}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.1}</text>"##,
            H - b,
            H - b + 16.0
        );
        let _ = write!(
            out,
            r##"<line x1="{l}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.1}</text>"##,
            W - r,
            l - 6.0,
            py + 4.0
        );
    }
    let _ = write!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (W + l - r) / 2.0,
        H - 10.0,
        escape(x_label)
    );
    let _ = write!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (H + t - b) / 2.0,
        (H + t - b) / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = write!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    legend(&mut out, series, l + 10.0, t + 14.0);
    out.push_str("</svg>\n");
    out
}

/// Polar chart of `(angle_deg, dB)` series; the radius spans
/// `[floor_db, max_db]`, angle 0° points right.
pub fn polar_plot(title: &str, series: &[Series], floor_db: f64, max_db: f64) -> String {
    let size = 480.0;
    let (cx, cy, radius) = (size / 2.0, size / 2.0 + 12.0, size / 2.0 - 50.0);
    let span = (max_db - floor_db).max(1e-9);
    let pos = |deg: f64, db: f64| {
        let rr = radius * ((db.clamp(floor_db, max_db) - floor_db) / span);
        let a = deg.to_radians();
        (cx + rr * a.cos(), cy - rr * a.sin())
    };
    let mut out = String::new();
    header(&mut out, size, size + 24.0, title);
    for i in 1..=4 {
        let rr = radius * i as f64 / 4.0;
        let label = floor_db + span * i as f64 / 4.0;
        let _ = write!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{rr:.2}" fill="none" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-size="10">{label:.1}</text>"##,
            cx + 3.0,
            cy - rr - 2.0
        );
    }
    for k in 0..12 {
        let (x, y) = pos(30.0 * k as f64, max_db);
        let (tx, ty) = pos(30.0 * k as f64, max_db + span * 0.08);
        let _ = write!(
            out,
            r##"<line x1="{cx}" y1="{cy}" x2="{x:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"##,
            ty + 4.0,
            30 * k
        );
    }
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(a, db)| {
                let (x, y) = pos(a, db);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = write!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    legend(&mut out, series, 12.0, 44.0);
    out.push_str("</svg>\n");
    out
}

fn colormap(f: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let x = f.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let t = x - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + t * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heat map of the front hemisphere seen from boresight. `raster[i][j]`
/// holds dB at `u = -1 + (j + 0.5)·2/n` (horizontal) and
/// `v = 1 - (i + 0.5)·2/n` (vertical); `NaN` cells lie outside the disk.
pub fn hemisphere_heatmap(title: &str, raster: &[Vec<f64>], floor_db: f64, max_db: f64) -> String {
    let n = raster.len().max(1) as f64;
    let size = 440.0;
    let (x0, y0) = (20.0, 36.0);
    let cell = size / n;
    let mut out = String::new();
    header(&mut out, size + 110.0, size + 56.0, title);
    for (i, row) in raster.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let f = (v - floor_db) / (max_db - floor_db).max(1e-9);
            let _ = write!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                x0 + j as f64 * cell,
                y0 + i as f64 * cell,
                cell + 0.05,
                cell + 0.05,
                colormap(f)
            );
        }
    }
    let _ = write!(
        out,
        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#444"/>"##,
        x0 + size / 2.0,
        y0 + size / 2.0,
        size / 2.0
    );
    let bx = x0 + size + 30.0;
    for k in 0..50 {
        let f = 1.0 - k as f64 / 49.0;
        let _ = write!(
            out,
            r#"<rect x="{bx}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            y0 + k as f64 * size / 50.0,
            size / 50.0 + 0.5,
            colormap(f)
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}">{max_db:.1} dB</text><text x="{}" y="{}">{floor_db:.1} dB</text>"#,
        bx + 20.0,
        y0 + 10.0,
        bx + 20.0,
        y0 + size
    );
    out.push_str("</svg>\n");
    out
}
