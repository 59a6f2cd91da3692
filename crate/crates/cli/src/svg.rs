//! Self-contained SVG scatter plots, number lines and biplots.

use std::fmt::Write;

const PANEL: f64 = 520.0;
const MARGIN: f64 = 48.0;
const LEGEND: f64 = 64.0;
const MARKER: f64 = 3.5;
/// Marker radius, in pixels, of the point farthest from the origin when
/// marker area tracks radius.
const MAX_MARKER: f64 = 8.0;

/// One plot: points in one or two dimensions plus optional decorations.
#[derive(Clone, Debug, Default)]
pub struct Panel {
    pub title: String,
    /// Each point has one or two coordinates.
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// Draws the origin as a cross.
    pub origin_marker: bool,
    /// Dashed circles (or ticks on a number line) at these radii.
    pub rings: Vec<f64>,
    /// Per-point marker radii in pixels; default markers otherwise.
    pub marker_px: Option<Vec<f64>>,
    /// Variable arrows as (name, direction, relative length in `[0, 1]`).
    pub arrows: Vec<(String, [f64; 2], f64)>,
}

/// Marker radii with area proportional to each point's distance from the
/// origin.
pub fn radius_markers(radii: &[f64]) -> Vec<f64> {
    let top = radii.iter().copied().fold(0.0, f64::max);
    radii
        .iter()
        .map(|&r| if top > 0.0 { MAX_MARKER * (r / top).sqrt() } else { MARKER })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `panels` side by side above a legend made of `legend` lines.
pub fn document(panels: &[Panel], legend: &[String]) -> String {
    let width = PANEL * panels.len().max(1) as f64;
    let height = PANEL + LEGEND;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for (k, p) in panels.iter().enumerate() {
        writeln!(out, r#"<g class="panel" transform="translate({},0)">"#, k as f64 * PANEL).unwrap();
        if p.points.first().is_some_and(|r| r.len() == 1) {
            number_line(&mut out, p);
        } else {
            scatter(&mut out, p);
        }
        out.push_str("</g>\n");
    }
    writeln!(out, r#"<g class="legend" transform="translate({MARGIN},{})">"#, PANEL + 8.0).unwrap();
    for (i, line) in legend.iter().enumerate() {
        writeln!(out, r#"<text x="0" y="{}">{}</text>"#, 14.0 * i as f64 + 10.0, escape(line)).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn title(out: &mut String, p: &Panel) {
    writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, PANEL / 2.0, escape(&p.title)).unwrap();
}

fn marker(p: &Panel, i: usize) -> f64 {
    p.marker_px.as_ref().map_or(MARKER, |m| m[i])
}

fn scatter(out: &mut String, p: &Panel) {
    title(out, p);
    let extent = p
        .points
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .chain(p.rings.iter().copied())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.1;
    let half = PANEL / 2.0 - MARGIN;
    let (cx, cy) = (PANEL / 2.0, PANEL / 2.0 + 8.0);
    let sx = |x: f64| cx + x / extent * half;
    let sy = |y: f64| cy - y / extent * half;

    writeln!(out, r##"<g class="axes" stroke="#bbbbbb" stroke-width="0.5"><line x1="{}" y1="{cy}" x2="{}" y2="{cy}"/><line x1="{cx}" y1="{}" x2="{cx}" y2="{}"/></g>"##, cx - half, cx + half, cy - half, cy + half).unwrap();
    for r in &p.rings {
        writeln!(out, r##"<circle class="ring" cx="{cx}" cy="{cy}" r="{:.3}" fill="none" stroke="#888888" stroke-dasharray="4 3"/>"##, r / extent * half).unwrap();
    }
    if p.origin_marker {
        writeln!(out, r##"<g class="origin" stroke="#cc0000" stroke-width="2"><line x1="{}" y1="{cy}" x2="{}" y2="{cy}"/><line x1="{cx}" y1="{}" x2="{cx}" y2="{}"/></g>"##, cx - 7.0, cx + 7.0, cy - 7.0, cy + 7.0).unwrap();
    }
    for (name, dir, len) in &p.arrows {
        let (x, y) = (sx(dir[0] * len * extent / 1.1), sy(dir[1] * len * extent / 1.1));
        writeln!(out, r##"<g class="arrow" stroke="#2255aa"><line x1="{cx}" y1="{cy}" x2="{x:.3}" y2="{y:.3}"/><circle cx="{x:.3}" cy="{y:.3}" r="1.5" fill="#2255aa"/></g><text x="{:.3}" y="{:.3}" fill="#2255aa">{}</text>"##, x + 3.0, y - 3.0, escape(name)).unwrap();
    }
    for (i, pt) in p.points.iter().enumerate() {
        let (x, y) = (sx(pt[0]), sy(pt[1]));
        writeln!(out, r##"<circle class="point" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="#333333" fill-opacity="0.7"/><text x="{:.3}" y="{:.3}">{}</text>"##, marker(p, i), x + 4.0, y - 4.0, escape(&p.labels[i])).unwrap();
    }
}

fn number_line(out: &mut String, p: &Panel) {
    title(out, p);
    let extent = p.points.iter().map(|r| r[0].abs()).chain(p.rings.iter().copied()).fold(0.0, f64::max).max(f64::MIN_POSITIVE) * 1.1;
    let half = PANEL / 2.0 - MARGIN;
    let (cx, cy) = (PANEL / 2.0, PANEL / 2.0);
    let sx = |x: f64| cx + x / extent * half;
    writeln!(out, r##"<line class="axis" x1="{}" y1="{cy}" x2="{}" y2="{cy}" stroke="#555555"/>"##, cx - half, cx + half).unwrap();
    for r in &p.rings {
        for x in [sx(-r), sx(*r)] {
            writeln!(out, r##"<line class="ring" x1="{x:.3}" y1="{}" x2="{x:.3}" y2="{}" stroke="#888888" stroke-dasharray="3 2"/>"##, cy - 12.0, cy + 12.0).unwrap();
        }
    }
    if p.origin_marker {
        writeln!(out, r##"<line class="origin" x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="#cc0000" stroke-width="2"/>"##, cy - 9.0, cy + 9.0).unwrap();
    }
    for (i, pt) in p.points.iter().enumerate() {
        let x = sx(pt[0]);
        // alternate label heights so neighbors stay readable
        let ty = if i % 2 == 0 { cy - 14.0 } else { cy + 22.0 };
        writeln!(out, r##"<circle class="point" cx="{x:.3}" cy="{cy}" r="{:.3}" fill="#333333" fill-opacity="0.7"/><text x="{x:.3}" y="{ty}" text-anchor="middle">{}</text>"##, marker(p, i), escape(&p.labels[i])).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(points: Vec<Vec<f64>>) -> Panel {
        let labels = (1..=points.len()).map(|i| format!("p{i}")).collect();
        Panel { title: "t".into(), points, labels, origin_marker: true, rings: vec![0.5, 1.0], ..Default::default() }
    }

    #[test]
    fn scatter_contents() {
        let p = panel(vec![vec![1.0, 0.0], vec![0.0, -0.5], vec![0.3, 0.3]]);
        let svg = document(&[p], &["gamma: mean".into(), "q: 2".into()]);
        assert_eq!(svg.matches(r#"class="point""#).count(), 3);
        assert_eq!(svg.matches(r#"class="ring""#).count(), 2);
        assert_eq!(svg.matches(r#"class="origin""#).count(), 1);
        assert!(svg.contains(">p3</text>") && svg.contains("gamma: mean"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn number_line_contents() {
        let svg = document(&[panel(vec![vec![-1.0], vec![2.0]])], &[]);
        assert_eq!(svg.matches(r#"class="point""#).count(), 2);
        assert_eq!(svg.matches(r#"class="ring""#).count(), 4);
    }

    #[test]
    fn labels_are_escaped() {
        let mut p = panel(vec![vec![1.0, 1.0]]);
        p.labels = vec!["a<b&c".into()];
        let svg = document(&[p], &[]);
        assert!(svg.contains("a&lt;b&amp;c"));
    }

    #[test]
    fn marker_area_tracks_radius() {
        let m = radius_markers(&[0.0, 0.25, 1.0]);
        assert_eq!(m[0], 0.0);
        assert!((m[1] * m[1] / (m[2] * m[2]) - 0.25).abs() < 1e-12);
        assert_eq!(radius_markers(&[0.0, 0.0]), vec![MARKER, MARKER]);
    }

    #[test]
    fn two_panels_side_by_side() {
        let svg = document(&[panel(vec![vec![1.0, 1.0]]), panel(vec![vec![1.0, 1.0]])], &[]);
        assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
        assert!(svg.contains(r#"width="1040""#));
    }
}
