//! Small SVG writer for line plots, heatmaps and phase-field sign arrows.

use std::fmt::Write;

use multidiff_core::mf::PhaseField;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;

/// Colors used for `00`, `01`, `10`, `11`.
pub const STRATEGY_COLORS: [&str; 4] = ["#7f7f7f", "#1f77b4", "#ff7f0e", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(out: &mut String, header: &[String], width: f64, height: f64) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    if !header.is_empty() {
        // "--" is not allowed inside XML comments
        let body: Vec<String> = header.iter().map(|l| l.replace("--", "- -")).collect();
        writeln!(out, "<!--\n{}\n-->", body.join("\n")).unwrap();
    }
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    writeln!(out, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#, escape(s)).unwrap();
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0).max(1e-300) * self.width
    }
    fn py(&self, y: f64) -> f64 {
        TOP + (1.0 - (y - self.y0) / (self.y1 - self.y0).max(1e-300)) * self.height
    }

    fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (LEFT, TOP, self.width, self.height);
        writeln!(out, r#"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="black"/>"#).unwrap();
        for x in ticks(self.x0, self.x1) {
            let px = self.px(x);
            writeln!(
                out,
                r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#,
                t + h,
                t + h + 4.0
            )
            .unwrap();
            text(out, px, t + h + 17.0, "middle", &fmt_tick(x));
        }
        for y in ticks(self.y0, self.y1) {
            let py = self.py(y);
            writeln!(out, r#"<line x1="{:.1}" y1="{py:.1}" x2="{l}" y2="{py:.1}" stroke="black"/>"#, l - 4.0).unwrap();
            text(out, l - 7.0, py + 4.0, "end", &fmt_tick(y));
        }
        text(out, l + w / 2.0, t - 14.0, "middle", title);
        text(out, l + w / 2.0, t + h + 38.0, "middle", xlabel);
        writeln!(
            out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            t + h / 2.0,
            t + h / 2.0,
            escape(ylabel)
        )
        .unwrap();
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Symmetric error bars.
    pub err: Option<Vec<f64>>,
    pub color: String,
    pub dashed: bool,
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>, color: &str) -> Self {
        Series { label: label.into(), xs, ys, err: None, color: color.into(), dashed: false, markers: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn points(mut self, err: Option<Vec<f64>>) -> Self {
        self.markers = true;
        self.err = err;
        self
    }
}

/// Horizontal reference line, e.g. a p-dominance threshold.
#[derive(Clone, Debug)]
pub struct Guide {
    pub y: f64,
    pub label: String,
    pub dashed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct LinePlot {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
    pub guides: Vec<Guide>,
    pub y_range: Option<(f64, f64)>,
}

impl LinePlot {
    pub fn new(title: impl Into<String>, xlabel: &str, ylabel: &str) -> Self {
        LinePlot { title: title.into(), xlabel: xlabel.into(), ylabel: ylabel.into(), ..Default::default() }
    }

    pub fn render(&self, header: &[String]) -> String {
        let xs = self.series.iter().flat_map(|s| s.xs.iter().copied());
        let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        let (y0, y1) = self.y_range.unwrap_or_else(|| {
            let ys = self.series.iter().flat_map(|s| {
                s.ys.iter().enumerate().flat_map(move |(i, &y)| {
                    let e = s.err.as_ref().map_or(0.0, |e| e[i]);
                    [y - e, y + e]
                })
            });
            let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
            if !lo.is_finite() || hi <= lo {
                (0.0, 1.0)
            } else {
                (lo, hi)
            }
        });
        let frame = Frame { x0, x1, y0, y1, width: W - LEFT - RIGHT, height: H - TOP - BOTTOM };
        let mut out = String::new();
        open(&mut out, header, W, H);
        frame.axes(&mut out, &self.title, &self.xlabel, &self.ylabel);
        for g in &self.guides {
            if g.y < y0 || g.y > y1 {
                continue;
            }
            let py = frame.py(g.y);
            let dash = if g.dashed { r#" stroke-dasharray="2,3""# } else { "" };
            writeln!(
                out,
                r##"<line x1="{LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#999999"{dash}/>"##,
                LEFT + frame.width
            )
            .unwrap();
            text(&mut out, LEFT + frame.width + 4.0, py + 4.0, "start", &g.label);
        }
        for s in &self.series {
            let pts: Vec<String> =
                s.xs.iter().zip(&s.ys).map(|(&x, &y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y))).collect();
            let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            if s.markers {
                for (i, (&x, &y)) in s.xs.iter().zip(&s.ys).enumerate() {
                    let (px, py) = (frame.px(x), frame.py(y));
                    if let Some(e) = &s.err {
                        writeln!(
                            out,
                            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="{}"/>"#,
                            frame.py(y - e[i]),
                            frame.py(y + e[i]),
                            s.color
                        )
                        .unwrap();
                    }
                    writeln!(out, r#"<circle cx="{px:.1}" cy="{py:.1}" r="2.5" fill="{}"/>"#, s.color).unwrap();
                }
            } else {
                writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                    pts.join(" "),
                    s.color
                )
                .unwrap();
            }
        }
        // legend
        for (i, s) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 16.0 * i as f64;
            let x = LEFT + frame.width + 10.0;
            let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            writeln!(
                out,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"{dash}/>"#,
                x + 18.0,
                s.color
            )
            .unwrap();
            text(&mut out, x + 24.0, y + 4.0, "start", &s.label);
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Colored grid with an optional text label per cell; `values` is row-major over `ys`.
#[derive(Clone, Debug, Default)]
pub struct HeatGrid {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
    pub labels: Vec<String>,
}

fn shade(v: f64) -> String {
    if !v.is_finite() {
        return "#dddddd".into();
    }
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

impl HeatGrid {
    pub fn render(&self, header: &[String]) -> String {
        let (nx, ny) = (self.xs.len().max(1), self.ys.len().max(1));
        let half = |v: &[f64]| if v.len() > 1 { (v[1] - v[0]) / 2.0 } else { 0.5 };
        let (hx, hy) = (half(&self.xs), half(&self.ys));
        let frame = Frame {
            x0: self.xs.first().copied().unwrap_or(0.0) - hx,
            x1: self.xs.last().copied().unwrap_or(1.0) + hx,
            y0: self.ys.first().copied().unwrap_or(0.0) - hy,
            y1: self.ys.last().copied().unwrap_or(1.0) + hy,
            width: W - LEFT - RIGHT,
            height: H - TOP - BOTTOM,
        };
        let (cw, ch) = (frame.width / nx as f64, frame.height / ny as f64);
        let mut out = String::new();
        open(&mut out, header, W, H);
        for (j, _) in self.ys.iter().enumerate() {
            for (i, _) in self.xs.iter().enumerate() {
                let idx = j * self.xs.len() + i;
                let (x, y) = (LEFT + i as f64 * cw, TOP + frame.height - (j + 1) as f64 * ch);
                writeln!(
                    out,
                    r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                    cw + 0.2,
                    ch + 0.2,
                    shade(self.values.get(idx).copied().unwrap_or(f64::NAN))
                )
                .unwrap();
                if let Some(l) = self.labels.get(idx).filter(|l| !l.is_empty()) {
                    let color = if self.values.get(idx).is_some_and(|v| *v > 0.55) { "white" } else { "black" };
                    writeln!(
                        out,
                        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="8" fill="{color}">{}</text>"#,
                        x + cw / 2.0,
                        y + ch / 2.0 + 3.0,
                        escape(l)
                    )
                    .unwrap();
                }
            }
        }
        frame.axes(&mut out, &self.title, &self.xlabel, &self.ylabel);
        let lx = LEFT + frame.width + 20.0;
        for i in 0..=10 {
            let v = i as f64 / 10.0;
            let y = TOP + frame.height - (i + 1) as f64 * 16.0;
            writeln!(out, r#"<rect x="{lx}" y="{y:.1}" width="16" height="16" fill="{}"/>"#, shade(v)).unwrap();
            if i % 5 == 0 {
                text(&mut out, lx + 22.0, y + 12.0, "start", &fmt_tick(v));
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Sign arrows of `(d rho01/dt, d rho10/dt)`; red where `d rho11/dt < 0`.
pub fn phase_quiver(field: &PhaseField, title: &str, path: &[(f64, f64)], header: &[String]) -> String {
    let size = H - TOP - BOTTOM;
    let frame = Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0, width: size, height: size };
    let mut out = String::new();
    open(&mut out, header, LEFT + size + 40.0, H);
    let n = field.resolution;
    // feasible triangle
    let tri = 1.0 - field.rho11;
    writeln!(
        out,
        r##"<polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="#eeeeee"/>"##,
        frame.px(0.0),
        frame.py(0.0),
        frame.px(tri),
        frame.py(0.0),
        frame.px(0.0),
        frame.py(tri)
    )
    .unwrap();
    let stride = (n / 20).max(1);
    let arm = 0.35 * stride as f64 / (n.max(2) - 1) as f64;
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            let p = field.at(i, j);
            if !p.feasible {
                continue;
            }
            let (dx, dy) = (p.signs[0] as f64, p.signs[1] as f64);
            let color = if p.signs[2] < 0 { "#d62728" } else { "#333333" };
            let (x0, y0) = (frame.px(p.rho01), frame.py(p.rho10));
            if dx == 0.0 && dy == 0.0 {
                writeln!(out, r#"<circle cx="{x0:.1}" cy="{y0:.1}" r="1.2" fill="{color}"/>"#).unwrap();
                continue;
            }
            let norm = (dx * dx + dy * dy).sqrt();
            let (x1, y1) = (frame.px(p.rho01 + arm * dx / norm), frame.py(p.rho10 + arm * dy / norm));
            writeln!(out, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y1:.1}" stroke="{color}"/>"#).unwrap();
            writeln!(out, r#"<circle cx="{x1:.1}" cy="{y1:.1}" r="1.4" fill="{color}"/>"#).unwrap();
        }
    }
    if path.len() > 1 {
        let pts: Vec<String> = path.iter().map(|&(x, y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y))).collect();
        writeln!(out, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##, pts.join(" "))
            .unwrap();
        let (x, y) = *path.last().unwrap();
        writeln!(out, r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="#1f77b4"/>"##, frame.px(x), frame.py(y)).unwrap();
    }
    frame.axes(&mut out, title, "rho01", "rho10");
    out.push_str("</svg>\n");
    out
}
