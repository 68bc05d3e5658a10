//! Standalone SVG scatter plots of embeddings.
//!
//! 1D embeddings are drawn against the 1-based compound index, 2D ones as
//! component 1 versus component 2. Positive compounds are red crosses and
//! negative compounds blue asterisks. Every data point is one `<path>` with
//! class `marker` inside the group of its class.

use std::fmt::Write as _;

use crate::dataset::EndpointLabeling;
use crate::embedding::{Embedding, Method};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
pub const POSITIVE_COLOR: &str = "#d62728";
pub const NEGATIVE_COLOR: &str = "#1f4fd6";
/// Half-width of a marker in pixels.
pub const MARKER_SIZE: f64 = 4.0;
const TICKS: usize = 5;

#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Axis {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            lo -= 1.0;
            hi += 1.0;
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn cross(x: f64, y: f64) -> String {
    let s = MARKER_SIZE;
    format!(
        "M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}",
        x - s,
        y - s,
        x + s,
        y + s,
        x - s,
        y + s,
        x + s,
        y - s
    )
}

fn asterisk(x: f64, y: f64) -> String {
    let s = MARKER_SIZE;
    let d = s * std::f64::consts::FRAC_1_SQRT_2;
    format!(
        "M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}",
        x,
        y - s,
        x,
        y + s,
        x - s,
        y,
        x + s,
        y,
        x - d,
        y - d,
        x + d,
        y + d,
        x - d,
        y + d,
        x + d,
        y - d
    )
}

fn title(method: Method, k: usize) -> String {
    let dims = if k == 1 {
        "1 dimension"
    } else {
        "2 dimensions"
    };
    format!("{} ({dims})", method.display_name())
}

/// Renders the scatter plot of a 1D or 2D embedding.
///
/// Panics if the embedding is not 1D or 2D or its length differs from
/// `labels`.
pub fn scatter_svg(embedding: &Embedding, labels: &EndpointLabeling) -> String {
    let k = embedding.dims();
    assert!(k == 1 || k == 2, "scatter_svg: embedding must be 1D or 2D");
    let n = embedding.n_points();
    assert_eq!(n, labels.len(), "scatter_svg: label count mismatch");
    let coords = &embedding.coords;
    let point = |i: usize| -> (f64, f64) {
        if k == 1 {
            ((i + 1) as f64, coords[(i, 0)])
        } else {
            (coords[(i, 0)], coords[(i, 1)])
        }
    };
    let plot_right = WIDTH - MARGIN_RIGHT;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    let xa = Axis::new((0..n).map(|i| point(i).0), MARGIN_LEFT, plot_right);
    let ya = Axis::new((0..n).map(|i| point(i).1), plot_bottom, MARGIN_TOP);
    let method = embedding.method;
    let (x_label, y_label) = if k == 1 {
        (
            "Compound index".to_string(),
            format!("{} component 1", method.display_name()),
        )
    } else {
        (
            format!("{} component 1", method.display_name()),
            format!("{} component 2", method.display_name()),
        )
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (MARGIN_LEFT + plot_right) / 2.0,
        escape(&title(method, k))
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" stroke-width="1" fill="none">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{:.1}" height="{:.1}"/>"#,
        plot_right - MARGIN_LEFT,
        plot_bottom - MARGIN_TOP
    );
    for t in xa.ticks() {
        let x = xa.map(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{plot_bottom}" x2="{x:.2}" y2="{:.1}"/>"#,
            plot_bottom + 5.0
        );
    }
    for t in ya.ticks() {
        let y = ya.map(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}"/>"#,
            MARGIN_LEFT - 5.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="tick-labels" fill="black">"#);
    for t in xa.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            xa.map(t),
            plot_bottom + 18.0,
            tick_label(t)
        );
    }
    for t in ya.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            MARGIN_LEFT - 8.0,
            ya.map(t),
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text class="x-label" x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (MARGIN_LEFT + plot_right) / 2.0,
        HEIGHT - 12.0,
        escape(&x_label)
    );
    let _ = writeln!(
        s,
        r#"<text class="y-label" x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (MARGIN_TOP + plot_bottom) / 2.0,
        (MARGIN_TOP + plot_bottom) / 2.0,
        escape(&y_label)
    );

    // data
    for (positive, shape, color, class) in [
        (true, "cross", POSITIVE_COLOR, "positive"),
        (false, "asterisk", NEGATIVE_COLOR, "negative"),
    ] {
        let _ = writeln!(
            s,
            r#"<g class="markers {class} {shape}" stroke="{color}" stroke-width="1.5" fill="none">"#
        );
        for i in (0..n).filter(|&i| labels.labels()[i] == positive) {
            let (x, y) = point(i);
            let (px, py) = (xa.map(x), ya.map(y));
            let d = if positive {
                cross(px, py)
            } else {
                asterisk(px, py)
            };
            let _ = writeln!(s, r#"<path class="marker" d="{d}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }

    // legend
    let lx = plot_right + 20.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (row, positive) in [true, false].into_iter().enumerate() {
        let y = MARGIN_TOP + 15.0 + 22.0 * row as f64;
        let (d, color) = if positive {
            (cross(lx, y), POSITIVE_COLOR)
        } else {
            (asterisk(lx, y), NEGATIVE_COLOR)
        };
        let _ = writeln!(
            s,
            r#"<path class="legend-marker" d="{d}" stroke="{color}" stroke-width="1.5" fill="none"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" dominant-baseline="middle">{}</text>"#,
            lx + 12.0,
            y,
            escape(labels.class_names().name(positive))
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
