//! Minimal SVG line and bar charts. CSV outputs are authoritative; these
//! are quick-look renderings.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn solid(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Labeled vertical markers, e.g. a threshold.
    pub markers: Vec<(String, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<!-- tipping {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        "<path d=\"M{left},{top} L{left},{bottom} L{right},{bottom}\" fill=\"none\" stroke=\"black\"/>"
    );
    for (value, px) in [(x.0, left), (x.1, right)] {
        let _ = writeln!(
            out,
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{value:.3}</text>",
            bottom + 16.0
        );
    }
    for (value, py) in [(y.0, bottom), (y.1, top)] {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{py}\" text-anchor=\"end\">{value:.3}</text>",
            left - 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        (left + right) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

impl LinePlot {
    pub fn render(&self) -> String {
        let x = bounds(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.0))
                .chain(self.markers.iter().map(|m| m.1)),
        );
        let y = bounds(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5, HEIGHT - MARGIN);
        let px = |v: f64| left + (v - x.0) / (x.1 - x.0) * (right - left);
        let py = |v: f64| bottom - (v - y.0) / (y.1 - y.0) * (bottom - top);

        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, &self.x_label, &self.y_label, x, y);
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b)))
                .collect();
            let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>",
                path.join(" ")
            );
            let ly = top + 14.0 * (i as f64 + 1.0);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>",
                right - 140.0,
                right - 115.0
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\">{}</text>",
                right - 110.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        for (label, v) in &self.markers {
            let _ = writeln!(
                out,
                "<line x1=\"{0:.2}\" y1=\"{top}\" x2=\"{0:.2}\" y2=\"{bottom}\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>",
                px(*v)
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{}\">{}</text>",
                px(*v) + 4.0,
                top + 12.0,
                escape(label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    /// Bar label, value, and annotation printed above the bar.
    pub bars: Vec<(String, f64, String)>,
}

impl BarChart {
    pub fn render(&self) -> String {
        let (lo, hi) = bounds(self.bars.iter().map(|b| b.1).chain([0.0]));
        let (lo, hi) = (lo.min(-1.0), hi.max(1.0));
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN / 1.5, HEIGHT - MARGIN);
        let py = |v: f64| bottom - (v - lo) / (hi - lo) * (bottom - top);

        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, "", &self.y_label, (0.0, self.bars.len() as f64), (lo, hi));
        let _ = writeln!(
            out,
            "<line x1=\"{left}\" y1=\"{0:.2}\" x2=\"{right}\" y2=\"{0:.2}\" stroke=\"gray\"/>",
            py(0.0)
        );
        let slot = (right - left) / self.bars.len().max(1) as f64;
        for (i, (label, value, note)) in self.bars.iter().enumerate() {
            let x0 = left + slot * (i as f64 + 0.2);
            let (y0, y1) = (py(value.max(0.0)), py(value.min(0.0)));
            let _ = writeln!(
                out,
                "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                slot * 0.6,
                y1 - y0,
                PALETTE[2]
            );
            let cx = left + slot * (i as f64 + 0.5);
            let _ = writeln!(
                out,
                "<text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                bottom + 30.0,
                escape(label)
            );
            let _ = writeln!(
                out,
                "<text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                y0 - 4.0,
                escape(note)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
