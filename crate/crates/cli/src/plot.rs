//! Deterministic SVG graphs of maps, one square panel per map.

use std::fmt::Write as _;

use zigzag::contour::contour_points;
use zigzag::plmap::{PlMap, PointedMap};
use zigzag::Scalar;

/// Pixels per unit of the map's coordinates.
pub const SCALE: f64 = 100.0;
const MARGIN: f64 = 30.0;
const GAP: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Base,
    /// Drawn in red above the base curve of its panel.
    Overlay,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    pub base_stroke: &'static str,
    pub overlay_stroke: &'static str,
    pub stroke_width: f64,
    pub mark_radius: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle { base_stroke: "#000000", overlay_stroke: "#d62728", stroke_width: 1.5, mark_radius: 2.5 }
    }
}

/// One panel: a base map and any overlays.
#[derive(Clone, Debug)]
pub struct Panel<T: Scalar> {
    pub title: String,
    pub curves: Vec<(PlMap<T>, Role)>,
}

impl<T: Scalar> Panel<T> {
    pub fn single(title: impl Into<String>, f: PlMap<T>) -> Self {
        Panel { title: title.into(), curves: vec![(f, Role::Base)] }
    }

    pub fn with_overlay(mut self, g: PlMap<T>) -> Self {
        self.curves.push((g, Role::Overlay));
        self
    }
}

fn num(v: f64) -> String {
    // Fixed precision keeps the output byte-stable; `-0.000` is folded to `0.000`.
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn plot_svg<T: Scalar>(panels: &[Panel<T>], style: &PlotStyle) -> String {
    let side = 2.0 * SCALE;
    let width = MARGIN * 2.0 + panels.len() as f64 * side + panels.len().saturating_sub(1) as f64 * GAP;
    let height = MARGIN * 2.0 + side;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, "<!-- scale: 1 unit = {} px; each panel shows [-1, 1] x [-1, 1] -->", num(SCALE));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for (k, panel) in panels.iter().enumerate() {
        let ox = MARGIN + k as f64 * (side + GAP);
        let oy = MARGIN;
        let px = |x: &T| ox + (x.approx() + 1.0) * SCALE;
        let py = |y: &T| oy + (1.0 - y.approx()) * SCALE;
        let _ = writeln!(out, r#"<g id="panel-{}">"#, k + 1);
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999999" stroke-width="0.5"/>"##,
            num(ox),
            num(oy),
            num(side),
            num(side)
        );
        let zero = T::zero();
        let _ = writeln!(
            out,
            r##"<path d="M{} {}H{}M{} {}V{}" stroke="#cccccc" stroke-width="0.5"/>"##,
            num(ox),
            num(py(&zero)),
            num(ox + side),
            num(px(&zero)),
            num(oy),
            num(oy + side)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            num(ox + SCALE),
            num(oy - 10.0),
            escape(&panel.title)
        );
        let mut curves: Vec<&(PlMap<T>, Role)> = panel.curves.iter().filter(|c| c.1 == Role::Base).collect();
        curves.extend(panel.curves.iter().filter(|c| c.1 == Role::Overlay));
        for (f, role) in curves {
            let stroke = match role {
                Role::Base => style.base_stroke,
                Role::Overlay => style.overlay_stroke,
            };
            let d: Vec<String> = f
                .points()
                .iter()
                .enumerate()
                .map(|(i, (x, y))| format!("{}{} {}", if i == 0 { "M" } else { "L" }, num(px(x)), num(py(y))))
                .collect();
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
                d.join(""),
                num(style.stroke_width)
            );
        }
        if let Some((base, _)) = panel.curves.iter().find(|c| c.1 == Role::Base) {
            let marks = PointedMap::new(base.clone()).ok().and_then(|p| contour_points(&p).ok());
            for p in marks.iter().flat_map(|c| c.right.iter().chain(c.left.iter()).filter(|p| !p.point.is_zero())) {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                    num(px(&p.point)),
                    num(py(&p.value)),
                    num(style.mark_radius),
                    style.base_stroke
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="8" text-anchor="middle">{}</text>"#,
                    num(px(&p.point)),
                    num(oy + side + 12.0),
                    escape(&p.point.to_string())
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use zigzag::fixtures::*;

    #[test]
    fn identity_is_one_diagonal() {
        let svg = plot_svg(&[Panel::single("ID", id())], &PlotStyle::default());
        assert_eq!(svg.matches("stroke=\"#000000\"").count(), 1);
        assert!(svg.contains(r#"d="M30.000 230.000L230.000 30.000""#));
        assert!(!svg.contains("#d62728"));
    }

    #[test]
    fn overlay_is_drawn_last_and_output_is_stable() {
        let panels = [Panel::single("M", m()).with_overlay(w())];
        let a = plot_svg(&panels, &PlotStyle::default());
        let b = plot_svg(&panels, &PlotStyle::default());
        assert_eq!(a, b);
        assert!(a.find("#d62728").unwrap() > a.find(r##"stroke="#000000""##).unwrap());
        assert!(a.contains(">1/2<"));
    }
}
