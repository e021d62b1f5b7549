//! SVG drawings of frameworks. Positive stress (cables) is dashed, negative
//! stress (struts) solid, zero stress thin gray. Line frameworks draw their
//! bars as arcs alternating above and below the line.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use rigidline::framework::{Framework, Graph};
use rigidline::scalar::to_f64;
use rigidline::stress::Stress;
use rigidline::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeStyle {
    Positive,
    Negative,
    Zero,
    Neutral,
}

impl EdgeStyle {
    fn class(self) -> &'static str {
        match self {
            EdgeStyle::Positive => "positive",
            EdgeStyle::Negative => "negative",
            EdgeStyle::Zero => "zero",
            EdgeStyle::Neutral => "neutral",
        }
    }

    fn attributes(self) -> &'static str {
        match self {
            EdgeStyle::Positive => r##"stroke="#1f4e9c" stroke-width="1.5" stroke-dasharray="6 4""##,
            EdgeStyle::Negative => r##"stroke="#b22222" stroke-width="2""##,
            EdgeStyle::Zero => r##"stroke="#999999" stroke-width="0.75""##,
            EdgeStyle::Neutral => r##"stroke="#000000" stroke-width="1""##,
        }
    }
}

/// Points, styled edges, and whether to draw on a line.
#[derive(Clone, Debug)]
pub struct Drawing {
    pub on_line: bool,
    pub points: Vec<[f64; 2]>,
    pub edges: Vec<(usize, usize, EdgeStyle)>,
}

fn styles(g: &Graph, stress: Option<&Stress>) -> Vec<(usize, usize, EdgeStyle)> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let style = match stress {
                None => EdgeStyle::Neutral,
                Some(w) => {
                    let v = &w.values()[k];
                    if v.is_zero() {
                        EdgeStyle::Zero
                    } else if v.is_positive() {
                        EdgeStyle::Positive
                    } else {
                        EdgeStyle::Negative
                    }
                }
            };
            (a, b, style)
        })
        .collect()
}

impl Drawing {
    pub fn from_framework(f: &Framework, stress: Option<&Stress>) -> Result<Drawing> {
        if f.dim() > 2 {
            return Err(Error::UnsupportedDimension(f.dim()));
        }
        if let Some(w) = stress {
            w.check(f.graph())?;
        }
        let points = f
            .config()
            .points()
            .iter()
            .map(|p| [p.first().map(to_f64).unwrap_or(0.0), p.get(1).map(to_f64).unwrap_or(0.0)])
            .collect();
        Ok(Drawing { on_line: f.dim() <= 1, points, edges: styles(f.graph(), stress) })
    }

    pub fn planar(points: &[[f64; 2]], g: &Graph, stress: Option<&Stress>) -> Drawing {
        Drawing { on_line: false, points: points.to_vec(), edges: styles(g, stress) }
    }
}

struct Frame {
    min: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    fn fit(points: &[[f64; 2]], on_line: bool) -> Frame {
        let lo = |i: usize| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        let hi = |i: usize| points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
        let (min, max) = if points.is_empty() { ([0.0; 2], [1.0; 2]) } else { ([lo(0), lo(1)], [hi(0), hi(1)]) };
        let span_x = (max[0] - min[0]).max(1e-9);
        let span_y = if on_line { 0.0 } else { (max[1] - min[1]).max(1e-9) };
        let sx = (WIDTH - 2.0 * MARGIN) / span_x;
        let sy = if on_line { f64::INFINITY } else { (HEIGHT - 2.0 * MARGIN) / span_y };
        let scale = sx.min(sy);
        let offset = [
            (WIDTH - scale * span_x) / 2.0,
            if on_line { HEIGHT / 2.0 } else { (HEIGHT - scale * span_y) / 2.0 },
        ];
        Frame { min, scale, offset }
    }

    fn map(&self, p: [f64; 2], on_line: bool) -> (f64, f64) {
        let x = self.offset[0] + (p[0] - self.min[0]) * self.scale;
        let y = if on_line { self.offset[1] } else { HEIGHT - self.offset[1] - (p[1] - self.min[1]) * self.scale };
        (x, y)
    }
}

/// SVG 1.1 text for `d`; identical input gives identical output.
pub fn render_svg(d: &Drawing) -> String {
    let frame = Frame::fit(&d.points, d.on_line);
    let at = |v: usize| frame.map(d.points[v - 1], d.on_line);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if d.on_line {
        let _ = writeln!(
            s,
            r##"<line class="axis" x1="{MARGIN}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            y = HEIGHT / 2.0,
            x2 = WIDTH - MARGIN
        );
    }
    for (k, &(a, b, style)) in d.edges.iter().enumerate() {
        let ((xa, ya), (xb, yb)) = (at(a), at(b));
        let (class, attrs) = (style.class(), style.attributes());
        if d.on_line {
            let (left, right) = if xa <= xb { (xa, xb) } else { (xb, xa) };
            let r = ((right - left) / 2.0).max(1.0);
            // sweeping clockwise from the left point passes above the line
            let sweep = if k % 2 == 0 { 1 } else { 0 };
            let _ = writeln!(
                s,
                r#"<path class="edge {class}" d="M {left:.2} {ya:.2} A {r:.2} {r:.2} 0 0 {sweep} {right:.2} {ya:.2}" fill="none" {attrs}/>"#
            );
        } else {
            let _ = writeln!(
                s,
                r#"<line class="edge {class}" x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}" {attrs}/>"#
            );
        }
    }
    for v in 1..=d.points.len() {
        let (x, y) = at(v);
        let _ = writeln!(s, r##"<circle class="vertex" cx="{x:.2}" cy="{y:.2}" r="4" fill="#000000"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{ty:.2}" font-family="sans-serif" font-size="12">{v}</text>"#,
            tx = x + 5.0,
            ty = y + 16.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rigidline::framework::Configuration;
    use rigidline::gallery::{prism_desargues_2d, stretched_cycle, triangular_positions, ConcurrentLines};

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!(r#"class="edge {class}""#)).count()
    }

    #[test]
    fn stretched_cycle_arcs() {
        let item = stretched_cycle(&triangular_positions(4)).unwrap();
        let svg = render_svg(&Drawing::from_framework(&item.framework, item.stress.as_ref()).unwrap());
        assert_eq!((count(&svg, "positive"), count(&svg, "negative")), (3, 1));
        assert_eq!(svg.matches("<path").count(), 4);
        assert!(svg.contains(" 0 0 1 ") && svg.contains(" 0 0 0 "));
    }

    #[test]
    fn desargues_prism_signs() {
        let item = prism_desargues_2d(&ConcurrentLines::default()).unwrap();
        let svg = render_svg(&Drawing::from_framework(&item.framework, item.stress.as_ref()).unwrap());
        assert_eq!((count(&svg, "positive"), count(&svg, "negative")), (6, 3));
    }

    #[test]
    fn unstressed_edges_are_neutral_and_output_is_deterministic() {
        let item = stretched_cycle(&triangular_positions(5)).unwrap();
        let d = Drawing::from_framework(&item.framework, None).unwrap();
        let svg = render_svg(&d);
        assert_eq!(count(&svg, "neutral"), 5);
        assert_eq!(svg, render_svg(&d));
    }

    #[test]
    fn three_dimensions_rejected() {
        let f = Framework::new(
            Graph::complete(2),
            Configuration::from_i64(3, &[&[0, 0, 0], &[1, 2, 3]]).unwrap(),
        )
        .unwrap();
        assert!(matches!(Drawing::from_framework(&f, None), Err(Error::UnsupportedDimension(3))));
    }
}
