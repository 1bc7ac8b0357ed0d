//! Minimal static SVG output: multi-series line charts and one
//! equirectangular heatmap. Charts are plain renderings of already-written
//! CSV data, never a separate computation.

use std::fmt::Write;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only (no connecting line).
    pub markers_only: bool,
}

pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|&s| s * mag)
        .find(|&s| s >= raw)
        .unwrap_or(mag * 10.0);
    let start = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = start;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

impl LineChart {
    pub fn render(&self) -> String {
        let transform = |y: f64| if self.log_y { y.max(1e-300).log10() } else { y };
        let mut x_min = f64::MAX;
        let mut x_max = f64::MIN;
        let mut y_min = f64::MAX;
        let mut y_max = f64::MIN;
        for s in &self.series {
            for &(x, y) in &s.points {
                if self.log_y && y <= 0.0 {
                    continue;
                }
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(transform(y));
                y_max = y_max.max(transform(y));
            }
        }
        if x_min > x_max {
            x_min = 0.0;
            x_max = 1.0;
            y_min = 0.0;
            y_max = 1.0;
        }
        if y_min == y_max {
            y_min -= 0.5;
            y_max += 0.5;
        }
        if self.log_y {
            y_min = y_min.floor();
            y_max = y_max.ceil();
        }
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min).max(1e-300) * plot_w;
        let sy = |y: f64| MARGIN_T + plot_h - (transform(y) - y_min) / (y_max - y_min) * plot_h;

        let mut out = String::new();
        write!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
        )
        .unwrap();
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        write!(
            out,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
            WIDTH / 2.0,
            xml_escape(&self.title)
        )
        .unwrap();

        // axes
        write!(
            out,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"#333\"/>\n"
        )
        .unwrap();
        for t in nice_ticks(x_min, x_max, 8) {
            let x = sx(t);
            write!(
                out,
                "<line x1=\"{x:.1}\" y1=\"{0:.1}\" x2=\"{x:.1}\" y2=\"{1:.1}\" stroke=\"#333\"/>\n\
                 <text x=\"{x:.1}\" y=\"{2:.1}\" text-anchor=\"middle\">{3}</text>\n",
                MARGIN_T + plot_h,
                MARGIN_T + plot_h + 5.0,
                MARGIN_T + plot_h + 20.0,
                fmt_tick(t)
            )
            .unwrap();
        }
        let y_ticks: Vec<f64> = if self.log_y {
            (y_min as i64..=y_max as i64).map(|e| e as f64).collect()
        } else {
            nice_ticks(y_min, y_max, 6)
        };
        for t in y_ticks {
            let y = MARGIN_T + plot_h - (t - y_min) / (y_max - y_min) * plot_h;
            let label = if self.log_y {
                format!("1e{}", t as i64)
            } else {
                fmt_tick(t)
            };
            write!(
                out,
                "<line x1=\"{0:.1}\" y1=\"{y:.1}\" x2=\"{1:.1}\" y2=\"{y:.1}\" stroke=\"#333\"/>\n\
                 <text x=\"{2:.1}\" y=\"{3:.1}\" text-anchor=\"end\">{label}</text>\n",
                MARGIN_L - 5.0,
                MARGIN_L,
                MARGIN_L - 9.0,
                y + 4.0
            )
            .unwrap();
        }
        write!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 14.0,
            xml_escape(&self.x_label)
        )
        .unwrap();
        write!(
            out,
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            xml_escape(&self.y_label)
        )
        .unwrap();

        // series
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let visible: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|&&(_, y)| !self.log_y || y > 0.0)
                .copied()
                .collect();
            if !s.markers_only && visible.len() > 1 {
                let mut d = String::new();
                for (j, &(x, y)) in visible.iter().enumerate() {
                    write!(d, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, sx(x), sy(y))
                        .unwrap();
                }
                write!(
                    out,
                    "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                    d.trim_end()
                )
                .unwrap();
            } else {
                for &(x, y) in &visible {
                    write!(
                        out,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                        sx(x),
                        sy(y)
                    )
                    .unwrap();
                }
            }
            // legend
            let ly = MARGIN_T + 16.0 + 18.0 * i as f64;
            write!(
                out,
                "<line x1=\"{0}\" y1=\"{ly}\" x2=\"{1}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n\
                 <text x=\"{2}\" y=\"{3}\">{4}</text>\n",
                MARGIN_L + plot_w - 150.0,
                MARGIN_L + plot_w - 126.0,
                MARGIN_L + plot_w - 120.0,
                ly + 4.0,
                xml_escape(&s.label)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Equirectangular heatmap (`phi` across, `theta` down) of values laid out
/// row-major over an `n_theta x n_phi` grid.
pub struct Heatmap {
    pub title: String,
    pub n_theta: usize,
    pub n_phi: usize,
    pub values: Vec<f64>,
}

impl Heatmap {
    pub fn render(&self) -> String {
        let lo = self.values.iter().cloned().fold(f64::MAX, f64::min);
        let hi = self.values.iter().cloned().fold(f64::MIN, f64::max);
        let span = (hi - lo).max(1e-300);
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let cell_w = plot_w / self.n_phi as f64;
        let cell_h = plot_h / self.n_theta as f64;
        let mut out = String::new();
        write!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
        )
        .unwrap();
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        write!(
            out,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
            WIDTH / 2.0,
            xml_escape(&self.title)
        )
        .unwrap();
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                let v = (self.values[i * self.n_phi + j] - lo) / span;
                let (r, g, b) = color_map(v);
                write!(
                    out,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                     fill=\"rgb({r},{g},{b})\"/>\n",
                    MARGIN_L + j as f64 * cell_w,
                    MARGIN_T + i as f64 * cell_h,
                    cell_w + 0.5,
                    cell_h + 0.5,
                )
                .unwrap();
            }
        }
        write!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">phi (0 to 2pi)</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 14.0
        )
        .unwrap();
        write!(
            out,
            "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">theta (0 to pi)</text>\n",
            MARGIN_T + plot_h / 2.0
        )
        .unwrap();
        out.push_str("</svg>\n");
        out
    }
}

/// Dark-blue to yellow two-segment gradient.
fn color_map(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    if t < 0.5 {
        let u = t / 0.5;
        (
            (20.0 + 30.0 * u) as u8,
            (20.0 + 120.0 * u) as u8,
            (90.0 + 110.0 * u) as u8,
        )
    } else {
        let u = (t - 0.5) / 0.5;
        (
            (50.0 + 200.0 * u) as u8,
            (140.0 + 90.0 * u) as u8,
            (200.0 - 150.0 * u) as u8,
        )
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
