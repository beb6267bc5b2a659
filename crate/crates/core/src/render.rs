//! Bar-chart rendering: one column per term, height equal to its value.

use std::fmt::Write as _;

use crate::composition::Composition;

const BAR: f64 = 12.0;
const UNIT: f64 = 12.0;
const MARGIN: f64 = 10.0;

/// ASCII bars drawn with `#` above a `-` baseline. Trailing spaces are
/// trimmed from every line.
pub fn render_ascii(c: &Composition) -> String {
    let t = c.terms();
    let height = t.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    for level in (1..=height).rev() {
        let line: String = t.iter().map(|&v| if v >= level { '#' } else { ' ' }).collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str(&"-".repeat(t.len()));
    out.push('\n');
    out
}

/// A standalone SVG document with one `rect` per term (zero-height for
/// zero terms) and a baseline.
pub fn render_svg(c: &Composition) -> String {
    let t = c.terms();
    let height = t.iter().copied().max().unwrap_or(0) as f64;
    let w = 2.0 * MARGIN + BAR * t.len() as f64;
    let h = 2.0 * MARGIN + UNIT * height;
    let base = MARGIN + UNIT * height;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    for (i, &v) in t.iter().enumerate() {
        let x = MARGIN + BAR * i as f64;
        let bh = UNIT * v as f64;
        let _ = writeln!(
            out,
            r##"  <rect class="bar" x="{x}" y="{}" width="{}" height="{bh}" fill="#4a6fa5" stroke="#1f2d3d"/>"##,
            base - bh,
            BAR
        );
    }
    let _ = writeln!(
        out,
        r##"  <line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="#000000"/>"##,
        w - MARGIN
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures::figure1;

    #[test]
    fn ascii_columns() {
        assert_eq!(render_ascii(&"012".parse().unwrap()), "  #\n ##\n---\n");
        assert_eq!(render_ascii(&"0".parse().unwrap()), "-\n");
    }

    #[test]
    fn svg_figure_one() {
        let svg = render_svg(&figure1());
        assert_eq!(svg.matches("class=\"bar\"").count(), 50);
        assert!(svg.contains("height=\"72\" fill"));
        assert!(!svg.contains("height=\"84\" fill"));
        assert_eq!(svg, render_svg(&figure1()));
    }
}
