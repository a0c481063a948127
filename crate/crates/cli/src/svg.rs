//! Static SVG plotting: BER-vs-SNR curves on a log y axis, no external
//! renderer. Output is a pure function of the plot description.

/// Stroke style distinguishing simulated, exact, and asymptotic series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
    Dotted,
}

impl LineStyle {
    fn dash(&self) -> &'static str {
        match self {
            LineStyle::Solid => "",
            LineStyle::Dashed => " stroke-dasharray=\"8 4\"",
            LineStyle::Dotted => " stroke-dasharray=\"2 4\"",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: LineStyle,
    pub color: usize,
    pub markers: bool,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// log10 y axis (the BER convention); linear otherwise.
    pub y_log: bool,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

const W: f64 = 840.0;
const H: f64 = 600.0;
const ML: f64 = 78.0;
const MR: f64 = 24.0;
const MT: f64 = 46.0;
const MB: f64 = 58.0;

fn fmt(v: f64) -> String {
    // fixed 2-decimal pixel coordinates keep the output byte-stable
    format!("{v:.2}")
}

/// Renders the plot to an SVG document string.
pub fn render(plot: &Plot) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in &plot.series {
        for &(x, y) in &s.points {
            if y.is_finite() && (!plot.y_log || y > 0.0) && x.is_finite() {
                xs.push(x);
                ys.push(if plot.y_log { y.log10() } else { y });
            }
        }
    }
    let (x_min, x_max) = range_of(&xs, 0.0, 1.0);
    let (mut y_min, mut y_max) = range_of(&ys, 0.0, 1.0);
    if plot.y_log {
        y_min = y_min.floor();
        y_max = y_max.ceil();
        if y_max - y_min < 1.0 {
            y_min = y_max - 1.0;
        }
    }
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
        let py = H - MB - (y - y_min) / (y_max - y_min) * (H - MT - MB);
        (px, py)
    };

    let mut out = String::with_capacity(16 * 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        fmt((ML + W - MR) / 2.0),
        escape(&plot.title)
    ));

    // y grid and tick labels
    let y_ticks: Vec<f64> = if plot.y_log {
        let mut t = Vec::new();
        let mut v = y_min;
        while v <= y_max + 1e-9 {
            t.push(v);
            v += 1.0;
        }
        t
    } else {
        (0..=5)
            .map(|i| y_min + (y_max - y_min) * i as f64 / 5.0)
            .collect()
    };
    for &ty in &y_ticks {
        let (x0, py) = to_px(x_min, ty);
        let (x1, _) = to_px(x_max, ty);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            fmt(x0),
            fmt(py),
            fmt(x1),
            fmt(py)
        ));
        let label = if plot.y_log {
            format!("1e{}", ty as i64)
        } else {
            format!("{ty:.3}")
        };
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt(x0 - 8.0),
            fmt(py + 4.0),
            label
        ));
    }

    // x grid at 5 dB steps when the span allows, else 5 even ticks
    let x_ticks: Vec<f64> = {
        let span = x_max - x_min;
        let step = if span > 45.0 {
            10.0
        } else if span >= 10.0 {
            5.0
        } else {
            (span / 5.0).max(1e-9)
        };
        let mut t = Vec::new();
        let mut v = (x_min / step).ceil() * step;
        while v <= x_max + 1e-9 {
            t.push(v);
            v += step;
        }
        t
    };
    for &tx in &x_ticks {
        let (px, y0) = to_px(tx, y_min);
        let (_, y1) = to_px(tx, y_max);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            fmt(px),
            fmt(y0),
            fmt(px),
            fmt(y1)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            fmt(y0 + 20.0),
            format_tick(tx)
        ));
    }

    // frame
    let (fx0, fy0) = to_px(x_min, y_min);
    let (fx1, fy1) = to_px(x_max, y_max);
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
        fmt(fx0),
        fmt(fy1),
        fmt(fx1 - fx0),
        fmt(fy0 - fy1)
    ));

    // axis labels
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        fmt((ML + W - MR) / 2.0),
        fmt(H - 14.0),
        escape(&plot.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        fmt((MT + H - MB) / 2.0),
        fmt((MT + H - MB) / 2.0),
        escape(&plot.y_label)
    ));

    // series
    for s in &plot.series {
        let color = PALETTE[s.color % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|&&(x, y)| y.is_finite() && (!plot.y_log || y > 0.0) && x.is_finite())
            .map(|&(x, y)| to_px(x, if plot.y_log { y.log10() } else { y }))
            .collect();
        if pts.len() >= 2 {
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{},{}", fmt(x), fmt(y)))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{} points=\"{}\"/>\n",
                color,
                s.style.dash(),
                path.join(" ")
            ));
        }
        if s.markers {
            for &(x, y) in &pts {
                out.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                    fmt(x),
                    fmt(y),
                    color
                ));
            }
        }
    }

    // legend, top right inside the frame
    let lx = W - MR - 250.0;
    let mut ly = MT + 14.0;
    for s in &plot.series {
        let color = PALETTE[s.color % PALETTE.len()];
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.8\"{}/>\n",
            fmt(lx),
            fmt(ly - 4.0),
            fmt(lx + 30.0),
            fmt(ly - 4.0),
            color,
            s.style.dash()
        ));
        if s.markers {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                fmt(lx + 15.0),
                fmt(ly - 4.0),
                color
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt(lx + 38.0),
            fmt(ly),
            escape(&s.label)
        ));
        ly += 18.0;
    }

    out.push_str("</svg>\n");
    out
}

fn format_tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.1}")
    }
}

fn range_of(vals: &[f64], d_min: f64, d_max: f64) -> (f64, f64) {
    if vals.is_empty() {
        return (d_min, d_max);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_plot() -> Plot {
        Plot {
            title: "test".into(),
            x_label: "SNR (dB)".into(),
            y_label: "BER".into(),
            series: vec![
                Series {
                    label: "a (sim)".into(),
                    points: vec![(0.0, 1e-1), (10.0, 1e-3), (20.0, 1e-5)],
                    style: LineStyle::Solid,
                    color: 0,
                    markers: true,
                },
                Series {
                    label: "a (exact)".into(),
                    points: vec![(0.0, 9e-2), (10.0, 1.1e-3), (20.0, 0.9e-5)],
                    style: LineStyle::Dashed,
                    color: 0,
                    markers: false,
                },
            ],
            y_log: true,
        }
    }

    #[test]
    fn render_is_deterministic() {
        let p = sample_plot();
        assert_eq!(render(&p), render(&p));
    }

    #[test]
    fn render_contains_axes_series_and_legend() {
        let svg = render(&sample_plot());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("a (sim)"));
        assert!(svg.contains("1e-5"));
        assert!(svg.contains("SNR (dB)"));
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn zero_and_missing_points_are_dropped_on_log_axis() {
        let mut p = sample_plot();
        p.series[0].points.push((30.0, 0.0));
        p.series[0].points.push((40.0, f64::NAN));
        let svg = render(&p);
        assert!(!svg.contains("NaN"));
    }
}
