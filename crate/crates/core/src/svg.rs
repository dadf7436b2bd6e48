//! Self-contained SVG line plot of a density profile.

use std::fmt::Write as _;

use crate::experiments::HockeyCurve;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD_L: f64 = 60.0;
const PAD_R: f64 = 20.0;
const PAD_T: f64 = 30.0;
const PAD_B: f64 = 50.0;

fn polyline(points: &[(f64, f64)], stroke: &str, dash: Option<&str>) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
    format!(
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
        pts.join(" ")
    )
}

/// `D_ρ` against `ρ`, with `min(ρ, ζ̂)` dashed when `zeta_hat` is given.
pub fn hockey_svg(curve: &HockeyCurve, zeta_hat: Option<f64>) -> String {
    let x_max = curve.rows.last().map_or(curve.params.rho_max, |r| r.rho).max(1e-9);
    let y_max = 1.0;
    let sx = |x: f64| PAD_L + x / x_max * (W - PAD_L - PAD_R);
    let sy = |y: f64| H - PAD_B - y / y_max * (H - PAD_T - PAD_B);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">n={}, lambda={}, mode={}</text>",
        W / 2.0,
        curve.params.n,
        curve.params.lambda,
        curve.params.mode.as_str()
    );

    // Axes and ticks.
    let _ = writeln!(
        out,
        "<path d=\"M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}\" stroke=\"black\" fill=\"none\"/>",
        sx(0.0),
        sy(y_max),
        sx(0.0),
        sy(0.0),
        sx(x_max),
        sy(0.0)
    );
    for i in 0..=5 {
        let x = x_max * i as f64 / 5.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{x:.2}</text>",
            sx(x),
            sy(0.0) + 16.0
        );
        let y = y_max * i as f64 / 5.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{y:.1}</text>",
            sx(0.0) - 6.0,
            sy(y) + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">rho</text>",
        (sx(0.0) + sx(x_max)) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {:.2})\" text-anchor=\"middle\">D</text>",
        (sy(0.0) + sy(y_max)) / 2.0,
        (sy(0.0) + sy(y_max)) / 2.0
    );

    if let Some(z) = zeta_hat {
        let mut pts = vec![(sx(0.0), sy(0.0))];
        if z < x_max {
            pts.push((sx(z), sy(z)));
            pts.push((sx(x_max), sy(z)));
        } else {
            pts.push((sx(x_max), sy(x_max)));
        }
        out.push_str(&polyline(&pts, "#d62728", Some("6,4")));
    }
    let mut pts = vec![(sx(0.0), sy(0.0))];
    pts.extend(curve.rows.iter().map(|r| (sx(r.rho), sy(r.density))));
    out.push_str(&polyline(&pts, "#1f77b4", None));
    out.push_str("</svg>\n");
    out
}
