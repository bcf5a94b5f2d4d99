//! CSV, SVG and JSON emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use equidist_core::equidistant::{Branch, CssBranch};
use equidist_core::geom::Bounds;
use equidist_core::Vec2;

use crate::error::CliError;

pub const BRANCH_CSV_HEADER: &str = "s,t,x,y,kappa_E,is_cusp,is_inflexion";
pub const CSS_CSV_HEADER: &str = "s,t,x,y,kappa,is_pole";

/// Relative margin around the drawing.
pub const SVG_MARGIN: f64 = 0.05;
const SVG_WIDTH: f64 = 800.0;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn branch_csv(branch: &Branch) -> String {
    let mut out = String::with_capacity(branch.nodes.len() * 160);
    out.push_str(BRANCH_CSV_HEADER);
    out.push('\n');
    for (i, n) in branch.nodes.iter().enumerate() {
        let infl = branch.inflexions.contains(&i);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(n.s),
            num(n.t),
            num(n.position.x),
            num(n.position.y),
            num(n.kappa_e),
            u8::from(n.cusp),
            u8::from(infl)
        );
    }
    out
}

pub fn css_csv(branch: &CssBranch) -> String {
    let mut out = String::with_capacity(branch.nodes.len() * 140);
    out.push_str(CSS_CSV_HEADER);
    out.push('\n');
    for n in &branch.nodes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(n.s),
            num(n.t),
            num(n.point.x),
            num(n.point.y),
            num(n.kappa),
            u8::from(n.pole)
        );
    }
    out
}

/// Everything drawn in one SVG.
#[derive(Clone, Debug, Default)]
pub struct Drawing {
    pub title: String,
    /// The curve, drawn dashed.
    pub curve: Vec<Vec2>,
    pub branches: Vec<Vec<Vec2>>,
    pub cusps: Vec<Vec2>,
    pub inflexions: Vec<Vec2>,
}

impl Drawing {
    pub fn bounds(&self) -> Bounds {
        let all = self.curve.iter().chain(self.branches.iter().flatten()).chain(&self.cusps).chain(&self.inflexions);
        Bounds::of(all.copied().filter(|p| p.is_finite()))
    }
}

fn path_data(points: &[Vec2]) -> String {
    let mut d = String::new();
    let mut pen = false;
    for p in points {
        if !p.is_finite() {
            pen = false;
            continue;
        }
        let _ = write!(d, "{}{:.6},{:.6} ", if pen { 'L' } else { 'M' }, p.x, -p.y);
        pen = true;
    }
    d.trim_end().to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG with the y axis pointing up and a 5% margin around all content.
pub fn svg(drawing: &Drawing) -> String {
    let b = drawing.bounds();
    let (w, h) = if b.is_empty() { (2.0, 2.0) } else { (b.width().max(1e-9), b.height().max(1e-9)) };
    let pad = SVG_MARGIN * w.max(h);
    let (x0, y0) = if b.is_empty() { (-1.0, -1.0) } else { (b.min.x, b.min.y) };
    let (vw, vh) = (w + 2.0 * pad, h + 2.0 * pad);
    let r = 0.006 * vw.max(vh);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="{:.0}" height="{:.0}">"#,
        x0 - pad,
        -(y0 + h) - pad,
        vw,
        vh,
        SVG_WIDTH,
        SVG_WIDTH * vh / vw
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&drawing.title));
    s.push_str(concat!(
        "<style>",
        ".curve{fill:none;stroke:#555;stroke-width:1.5px;stroke-dasharray:6 4;vector-effect:non-scaling-stroke}",
        ".branch{fill:none;stroke:#c0392b;stroke-width:1.5px;vector-effect:non-scaling-stroke}",
        ".cusp{fill:#1f4e9e}",
        ".inflexion{fill:none;stroke:#1e8449;stroke-width:1.5px;vector-effect:non-scaling-stroke}",
        "</style>\n"
    ));
    if !drawing.curve.is_empty() {
        let _ = writeln!(s, r#"<path class="curve" d="{}"/>"#, path_data(&drawing.curve));
    }
    for b in &drawing.branches {
        let _ = writeln!(s, r#"<path class="branch" d="{}"/>"#, path_data(b));
    }
    for p in drawing.cusps.iter().filter(|p| p.is_finite()) {
        let _ = writeln!(s, r#"<circle class="cusp" cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#, p.x, -p.y, r);
    }
    for p in drawing.inflexions.iter().filter(|p| p.is_finite()) {
        let _ = writeln!(s, r#"<circle class="inflexion" cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#, p.x, -p.y, 1.5 * r);
    }
    s.push_str("</svg>\n");
    s
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(path, e))
}

/// `0.3` → `0.3`, `-0.25` → `m0.25`: a λ as it appears in file names.
pub fn lambda_tag(l: f64) -> String {
    let s = format!("{l}");
    match s.strip_prefix('-') {
        Some(rest) => format!("m{rest}"),
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02e23, 5e-324] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn svg_box_has_margin_and_flips_y() {
        let d = Drawing {
            curve: vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0)],
            branches: vec![vec![Vec2::new(1.0, 3.0), Vec2::new(f64::NAN, 0.0)]],
            ..Drawing::default()
        };
        let s = svg(&d);
        assert!(s.contains(r#"viewBox="-0.150000 -3.150000 2.300000 3.300000""#), "{s}");
        assert!(s.contains("M1.000000,-3.000000\""));
    }

    #[test]
    fn tags() {
        assert_eq!(lambda_tag(0.3), "0.3");
        assert_eq!(lambda_tag(-0.3), "m0.3");
    }
}
