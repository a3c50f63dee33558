//! Minimal deterministic SVG charts: lines and markers on linear axes, with
//! an optional secondary axis on the right.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const LEGEND_ROW: f64 = 16.0;

pub const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#555555"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dash {
    Solid,
    Dashed,
    Dotted,
}

impl Dash {
    /// Solid, dashed, dotted, cycling.
    pub fn nth(i: usize) -> Dash {
        [Dash::Solid, Dash::Dashed, Dash::Dotted][i % 3]
    }

    fn attr(self) -> &'static str {
        match self {
            Dash::Solid => "",
            Dash::Dashed => " stroke-dasharray=\"8 5\"",
            Dash::Dotted => " stroke-dasharray=\"2 4\"",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line(Dash),
    Dots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub mark: Mark,
    pub color: &'static str,
    pub axis: Axis,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>, dash: Dash, color: &'static str) -> Self {
        Series {
            label: label.into(),
            points,
            mark: Mark::Line(dash),
            color,
            axis: Axis::Left,
        }
    }

    pub fn dots(label: impl Into<String>, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Series {
            label: label.into(),
            points,
            mark: Mark::Dots,
            color,
            axis: Axis::Left,
        }
    }

    pub fn on_right(mut self) -> Self {
        self.axis = Axis::Right;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y2_label: String,
    pub series: Vec<Series>,
    /// Lines written as XML comments at the top of the document.
    pub comments: Vec<String>,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub y2_range: Option<(f64, f64)>,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Chart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Chart::default()
        }
    }

    pub fn push(&mut self, s: Series) -> &mut Self {
        self.series.push(s);
        self
    }

    fn extent(&self, pick: impl Fn(&Series) -> bool, coord: impl Fn(&(f64, f64)) -> f64) -> Option<(f64, f64)> {
        let vals = self
            .series
            .iter()
            .filter(|s| pick(s))
            .flat_map(|s| s.points.iter().map(&coord))
            .filter(|v| v.is_finite());
        vals.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self
            .x_range
            .or_else(|| self.extent(|_| true, |p| p.0))
            .map(nice_range)
            .unwrap_or((0.0, 1.0));
        let left = self
            .y_range
            .or_else(|| self.extent(|s| s.axis == Axis::Left, |p| p.1))
            .map(nice_range)
            .unwrap_or((0.0, 1.0));
        let has_right = self.series.iter().any(|s| s.axis == Axis::Right);
        let right = self
            .y2_range
            .or_else(|| self.extent(|s| s.axis == Axis::Right, |p| p.1))
            .map(nice_range)
            .unwrap_or((0.0, 1.0));

        let legend_h = LEGEND_ROW * self.series.len().div_ceil(3) as f64;
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM - legend_h;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64, (lo, hi): (f64, f64)| TOP + plot_h - (y - lo) / (hi - lo) * plot_h;

        let mut o = String::new();
        let _ = writeln!(
            o,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        for c in &self.comments {
            let _ = writeln!(o, "<!-- {} -->", c.replace("--", "- -"));
        }
        let _ = writeln!(o, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            o,
            "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            esc(&self.title)
        );

        // grid and ticks
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                o,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e5e5e5\"/>",
                c(x),
                c(TOP),
                c(x),
                c(TOP + plot_h)
            );
            let _ = writeln!(
                o,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                c(x),
                c(TOP + plot_h + 16.0),
                tick_label(t)
            );
        }
        for t in ticks(left.0, left.1) {
            let y = sy(t, left);
            let _ = writeln!(
                o,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e5e5e5\"/>",
                c(LEFT),
                c(y),
                c(LEFT + plot_w),
                c(y)
            );
            let _ = writeln!(
                o,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
                c(LEFT - 6.0),
                c(y + 4.0),
                tick_label(t)
            );
        }
        if has_right {
            for t in ticks(right.0, right.1) {
                let y = sy(t, right);
                let _ = writeln!(
                    o,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"start\">{}</text>",
                    c(LEFT + plot_w + 6.0),
                    c(y + 4.0),
                    tick_label(t)
                );
            }
        }
        let _ = writeln!(
            o,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            c(LEFT),
            c(TOP),
            c(plot_w),
            c(plot_h)
        );
        if x0 < 0.0 && x1 > 0.0 {
            let _ = writeln!(
                o,
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#999\"/>",
                c(sx(0.0)),
                c(TOP),
                c(TOP + plot_h)
            );
        }
        if left.0 < 0.0 && left.1 > 0.0 {
            let _ = writeln!(
                o,
                "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#999\"/>",
                c(sy(0.0, left)),
                c(LEFT),
                c(LEFT + plot_w)
            );
        }

        // axis labels
        let _ = writeln!(
            o,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            c(LEFT + plot_w / 2.0),
            c(TOP + plot_h + 36.0),
            esc(&self.x_label)
        );
        let mid = c(TOP + plot_h / 2.0);
        let _ = writeln!(
            o,
            "<text x=\"18\" y=\"{mid}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {mid})\">{}</text>",
            esc(&self.y_label)
        );
        if has_right {
            let xr = c(WIDTH - 14.0);
            let _ = writeln!(
                o,
                "<text x=\"{xr}\" y=\"{mid}\" text-anchor=\"middle\" transform=\"rotate(90 {xr} {mid})\">{}</text>",
                esc(&self.y2_label)
            );
        }

        // data, clipped to the plot area
        let _ = writeln!(
            o,
            "<clipPath id=\"plot\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
            c(LEFT),
            c(TOP),
            c(plot_w),
            c(plot_h)
        );
        let _ = writeln!(o, "<g clip-path=\"url(#plot)\">");
        for s in &self.series {
            let range = if s.axis == Axis::Left { left } else { right };
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| (sx(x), sy(y, range)))
                .collect();
            match s.mark {
                Mark::Line(dash) => {
                    let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", c(x), c(y))).collect();
                    let _ = writeln!(
                        o,
                        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{} points=\"{}\"/>",
                        s.color,
                        dash.attr(),
                        d.join(" ")
                    );
                }
                Mark::Dots => {
                    for (x, y) in pts {
                        let _ = writeln!(
                            o,
                            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>",
                            c(x),
                            c(y),
                            s.color
                        );
                    }
                }
            }
        }
        let _ = writeln!(o, "</g>");

        // legend
        let legend_top = TOP + plot_h + 52.0;
        let col_w = plot_w / 3.0;
        for (i, s) in self.series.iter().enumerate() {
            let x = LEFT + (i % 3) as f64 * col_w;
            let y = legend_top + (i / 3) as f64 * LEGEND_ROW;
            match s.mark {
                Mark::Line(dash) => {
                    let _ = writeln!(
                        o,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.8\"{}/>",
                        c(x),
                        c(y - 4.0),
                        c(x + 28.0),
                        c(y - 4.0),
                        s.color,
                        dash.attr()
                    );
                }
                Mark::Dots => {
                    let _ = writeln!(
                        o,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>",
                        c(x + 14.0),
                        c(y - 4.0),
                        s.color
                    );
                }
            }
            let side = if has_right && s.axis == Axis::Right {
                " (right)"
            } else {
                ""
            };
            let _ = writeln!(
                o,
                "<text x=\"{}\" y=\"{}\">{}{side}</text>",
                c(x + 34.0),
                c(y),
                esc(&s.label)
            );
        }
        o.push_str("</svg>\n");
        o
    }
}

/// Coordinates are written with two decimals.
fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 2.5 {
        2.5
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Widen `(lo, hi)` outward to multiples of a round tick step.
pub fn nice_range((lo, hi): (f64, f64)) -> (f64, f64) {
    let (lo, hi) = if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo);
    ((lo / step).floor() * step, (hi / step).ceil() * step)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v.abs() < 1e-12 {
        return "0".into();
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}
