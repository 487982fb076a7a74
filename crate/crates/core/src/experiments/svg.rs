//! Minimal line plots of a reproduced figure over its reference points.

use std::fmt::Write;

use super::figures::{curve_series, figure_reference, FigureRun};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f3a8c", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#555555",
];

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - y / self.y1 * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Our curves as lines, the reference values as hollow markers.
pub fn render_figure_svg(run: &FigureRun) -> String {
    let reference: Vec<_> = figure_reference(run.figure).collect();
    let xs = reference
        .iter()
        .map(|p| if run.figure.sweeps_s() { p.s } else { p.snr_db });
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    let ymax = reference
        .iter()
        .map(|p| p.value)
        .chain(run.rows.iter().map(|r| r.mi_bpcu))
        .filter(|v| v.is_finite())
        .fold(1.0, f64::max);
    let f = Frame {
        x0,
        x1: if x1 > x0 { x1 } else { x0 + 1.0 },
        y1: ymax.ceil(),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        run.figure.title()
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for k in 0..=f.y1 as usize {
        let y = f.py(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{l}" y1="{y:.1}" x2="{r}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{k}</text>"##,
            l - 6.0,
            y + 4.0
        );
    }
    for k in 0..=5 {
        let x = f.x0 + (f.x1 - f.x0) * k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(x),
            b + 16.0,
            (x * 100.0).round() / 100.0
        );
    }
    let xlabel = if run.figure.sweeps_s() {
        "S"
    } else {
        "SNR (dB)"
    };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">bpcu</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let mut legend_y = t + 14.0;
    let mut groups: Vec<(String, f64)> = Vec::new();
    for (curve, row) in run.curves.iter().zip(&run.rows) {
        let key = (
            curve.clone(),
            if run.figure.sweeps_s() {
                0.0
            } else {
                row.s_factor
            },
        );
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (i, (curve, s_factor)) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<_> = curve_series(run, curve)
            .into_iter()
            .zip(
                run.rows
                    .iter()
                    .zip(&run.curves)
                    .filter(|(_, c)| *c == curve)
                    .map(|(r, _)| r.s_factor),
            )
            .filter(|(_, s)| run.figure.sweeps_s() || s == s_factor)
            .map(|(p, _)| p)
            .filter(|(_, y)| y.is_finite())
            .collect();
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", f.px(x), f.py(y)))
            .collect();
        let dash = if curve == "capacity" || curve == "unquantized" {
            r#" stroke-dasharray="5,3""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            path.join(" ")
        );
        for p in reference
            .iter()
            .filter(|p| &p.curve == curve && (run.figure.sweeps_s() || p.s == *s_factor))
        {
            let x = if run.figure.sweeps_s() { p.s } else { p.snr_db };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="none" stroke="{color}"/>"#,
                f.px(x),
                f.py(p.value)
            );
        }
        let label = if run.figure.sweeps_s() {
            curve.clone()
        } else {
            format!("{curve}, S={s_factor}")
        };
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{}" y="{}">{label}</text>"#,
            r - 150.0,
            r - 130.0,
            r - 125.0,
            legend_y + 4.0
        );
        legend_y += 15.0;
    }
    s.push_str("</svg>\n");
    s
}
