//! Static SVG line plots, a pure function of the result record.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

/// One polyline with a label.
pub struct Curve<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

/// Render curves into a standalone SVG document.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for curve in curves {
        for &v in curve.x {
            x_min = x_min.min(v);
            x_max = x_max.max(v);
        }
        for &v in curve.y {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_min = 0.0;
        x_max = 1.0;
    }
    if !y_min.is_finite() || y_max <= y_min {
        y_min -= 0.5;
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // Axes.
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{MARGIN}\" stroke=\"black\"/>\n"
    ));
    // Tick labels at the extremes.
    svg.push_str(&format!(
        "  <text x=\"{x0}\" y=\"{}\" text-anchor=\"middle\">{x_min:.4}</text>\n",
        HEIGHT - MARGIN / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_max:.4}</text>\n",
        WIDTH - MARGIN,
        HEIGHT - MARGIN / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{y0}\" text-anchor=\"end\">{y_min:.4}</text>\n",
        MARGIN - 6.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{MARGIN}\" text-anchor=\"end\">{y_max:.4}</text>\n",
        MARGIN - 6.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        WIDTH / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));

    for (index, curve) in curves.iter().enumerate() {
        // Thin dense series rather than emitting hundreds of thousands
        // of points.
        let stride = (curve.x.len() / 4000).max(1);
        let mut path = String::new();
        for (k, (&x, &y)) in curve.x.iter().zip(curve.y.iter()).enumerate() {
            if k % stride != 0 && k != curve.x.len() - 1 {
                continue;
            }
            let (px, py) = to_px(x, y);
            path.push_str(&format!("{px:.2},{py:.2} "));
        }
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            curve.color,
            path.trim_end()
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n",
            WIDTH - MARGIN - 150.0,
            MARGIN + 18.0 * index as f64,
            curve.color,
            curve.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_well_formed_deterministic_svg() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, -0.5, 0.25, -1.0];
        let curve = Curve { label: "sigma_z", color: PALETTE[0], x: &x, y: &y };
        let a = line_plot("test", "t", "sigma_z", &[curve]);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("polyline"));
        let curve = Curve { label: "sigma_z", color: PALETTE[0], x: &x, y: &y };
        let b = line_plot("test", "t", "sigma_z", &[curve]);
        assert_eq!(a, b);
    }
}
