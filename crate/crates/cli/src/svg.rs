//! Self-contained SVG scatter of eigenvalues, one column per run.

use std::fmt::Write as _;

const HEIGHT: f64 = 420.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const LEFT: f64 = 70.0;
const COLUMN: f64 = 80.0;
const Y_RANGE: f64 = 0.55;

fn y_of(v: f64) -> f64 {
    let plot = HEIGHT - TOP - BOTTOM;
    TOP + (Y_RANGE - v) / (2.0 * Y_RANGE) * plot
}

/// `columns` holds `(label, values)`; horizontal bands mark `|λ| = 1/4` and `1/2`.
pub fn scatter(title: &str, columns: &[(String, Vec<f64>)]) -> String {
    let width = LEFT + COLUMN * columns.len().max(1) as f64 + 20.0;
    let right = width - 20.0;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{HEIGHT}" viewBox="0 0 {width} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect width="{width}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{LEFT}" y="18" font-size="13">{title}</text>"#
    )
    .unwrap();
    for (v, dash) in [
        (0.5, ""),
        (0.25, r#" stroke-dasharray="4 3""#),
        (0.0, r#" stroke-dasharray="1 3""#),
    ] {
        for value in if v == 0.0 { vec![0.0] } else { vec![v, -v] } {
            let y = y_of(value);
            writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#888"{dash}/>"##
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{value}</text>"#,
                LEFT - 6.0,
                y + 4.0
            )
            .unwrap();
        }
    }
    for (i, (label, values)) in columns.iter().enumerate() {
        let x = LEFT + COLUMN * (i as f64 + 0.5);
        for v in values {
            writeln!(
                s,
                r##"<circle cx="{x:.2}" cy="{:.2}" r="1.8" fill="#1f4e99" fill-opacity="0.6"/>"##,
                y_of(*v)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            HEIGHT - BOTTOM + 18.0
        )
        .unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}
