//! SVG pictures of the tower levels. Coordinates are rounded decimals of the
//! exact values and are for display only.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use tileres::regular::frontier;
use tileres::tower::Tower;
use tileres::{AxisTag, Rational};

const SIZE: f64 = 1000.0;

const HEADER: &str = "<!-- coordinates are decimal approximations of exact rationals and are not authoritative -->";

fn x(v: &Rational) -> f64 {
    v.to_f64() * SIZE
}

/// `y` grows upwards in the cube and downwards in SVG.
fn y(v: &Rational) -> f64 {
    SIZE - v.to_f64() * SIZE
}

fn colour(i: usize) -> String {
    format!("hsl({:.1},60%,72%)", (i as f64 * 137.508) % 360.0)
}

fn open(out: &mut String) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">"
    );
}

/// One picture per level, `level_{k}.svg`.
pub fn render(tower: &Tower) -> Result<Vec<(String, String)>> {
    match tower.dim {
        1 => Ok((0..tower.levels.len()).map(|k| (format!("level_{k}.svg"), intervals(tower, k))).collect()),
        2 => Ok((0..tower.levels.len()).map(|k| (format!("level_{k}.svg"), squares(tower, k))).collect()),
        _ => bail!("render supports d ≤ 2"),
    }
}

fn squares(tower: &Tower, k: usize) -> String {
    let mut out = String::new();
    open(&mut out);
    let _ = writeln!(out, "<g class=\"level\" data-level=\"{k}\">");
    for (i, t) in tower.levels[k].tiles.iter().enumerate() {
        let _ = writeln!(out, "<g class=\"tile\" data-tile=\"{i}\" fill=\"{}\">", colour(i));
        for b in t.cell_boxes() {
            let (x0, x1) = (x(b.lo(0)), x(b.hi(0)));
            let (y0, y1) = (y(b.hi(1)), y(b.lo(1)));
            let _ = writeln!(
                out,
                "<rect x=\"{x0:.3}\" y=\"{y0:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>",
                x1 - x0,
                y1 - y0
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g class=\"frontier\" stroke=\"black\" stroke-width=\"1.5\">\n");
    for t in &tower.levels[k].tiles {
        let fr = frontier(t);
        let arr = fr.arrangement().clone();
        for f in fr.faces() {
            // edges only; vertices lie on edges
            let tags = (f.tag(0), f.tag(1));
            let (a, b) = match tags {
                (AxisTag::Cut(_), AxisTag::Interval(_)) | (AxisTag::Interval(_), AxisTag::Cut(_)) => {
                    (arr.extent(0, f.0[0] as usize), arr.extent(1, f.0[1] as usize))
                }
                _ => continue,
            };
            let _ = writeln!(
                out,
                "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>",
                x(a.0),
                y(b.0),
                x(a.1),
                y(b.1)
            );
        }
    }
    out.push_str("</g>\n</g>\n</svg>\n");
    out
}

/// Levels `0..=k` stacked top to bottom, one row of intervals per level.
fn intervals(tower: &Tower, k: usize) -> String {
    let mut out = String::new();
    open(&mut out);
    let rows = k + 1;
    let h = SIZE / rows as f64;
    let bar = h * 0.6;
    for level in 0..=k {
        let top = level as f64 * h + (h - bar) / 2.0;
        let _ = writeln!(out, "<g class=\"level\" data-level=\"{level}\">");
        for (i, t) in tower.levels[level].tiles.iter().enumerate() {
            let _ = writeln!(out, "<g class=\"tile\" data-tile=\"{i}\" fill=\"{}\">", colour(i));
            for b in t.cell_boxes() {
                let (x0, x1) = (x(b.lo(0)), x(b.hi(0)));
                let _ = writeln!(
                    out,
                    "<rect x=\"{x0:.3}\" y=\"{top:.3}\" width=\"{:.3}\" height=\"{bar:.3}\"/>",
                    x1 - x0
                );
            }
            out.push_str("</g>\n");
        }
        out.push_str("<g class=\"frontier\" stroke=\"black\" stroke-width=\"2\">\n");
        let mut cuts: Vec<Rational> = Vec::new();
        for t in &tower.levels[level].tiles {
            let fr = frontier(t);
            for f in fr.faces() {
                cuts.push(fr.arrangement().coordinate(0, f.0[0] as usize));
            }
        }
        cuts.sort();
        cuts.dedup();
        for c in &cuts {
            let _ = writeln!(
                out,
                "<line x1=\"{0:.3}\" y1=\"{1:.3}\" x2=\"{0:.3}\" y2=\"{2:.3}\"/>",
                x(c),
                top,
                top + bar
            );
        }
        out.push_str("</g>\n</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
