//! SVG figures of partitions and trees.

use std::fmt::Write;

use crate::geometry::{BBox, Point};
use crate::mst::NodeRef;
use crate::odc::OdcPartition;
use crate::overlay::{Arrangement, Label};
use crate::solver::Solution;

const SIZE: f64 = 800.0;

struct Canvas {
    out: String,
    bbox: BBox,
    scale: f64,
}

impl Canvas {
    fn new(bbox: BBox) -> Canvas {
        let w = (bbox.max.x - bbox.min.x).max(1e-12);
        let h = (bbox.max.y - bbox.min.y).max(1e-12);
        let scale = SIZE / w.max(h);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
            w * scale,
            h * scale,
            w * scale,
            h * scale
        );
        Canvas { out, bbox, scale }
    }

    fn xy(&self, p: Point) -> (f64, f64) {
        ((p.x - self.bbox.min.x) * self.scale, (self.bbox.max.y - p.y) * self.scale)
    }

    fn ring_path(&self, ring: &[Point]) -> String {
        let mut d = String::new();
        for (i, p) in ring.iter().enumerate() {
            let (x, y) = self.xy(*p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        d
    }

    fn circle(&mut self, p: Point, r: f64, fill: &str, id: &str) {
        let (x, y) = self.xy(p);
        let _ = writeln!(self.out, r#"<circle id="{id}" cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn colour(seed: usize) -> String {
    let h = (seed as f64 * 137.508) % 360.0;
    format!("hsl({h:.0},55%,80%)")
}

fn label_text(l: &Label) -> String {
    l.iter()
        .map(|s| s.map_or("-".to_string(), |t| t.to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

fn terminals(c: &mut Canvas, ts: &[Point]) {
    for (i, t) in ts.iter().enumerate() {
        c.circle(*t, 4.0, "black", &format!("t{i}"));
    }
}

/// One ODC partition; cells coloured by owner.
pub fn partition_svg(p: &OdcPartition) -> String {
    let mut c = Canvas::new(p.bbox);
    for (idx, cell) in p.cells.iter().enumerate() {
        let d: String = cell.rings.iter().map(|r| c.ring_path(r)).collect::<Vec<_>>().join(" ");
        let (fill, owner) = match cell.owner {
            Some(o) => (colour(o + 1), o.to_string()),
            None => ("white".to_string(), "none".to_string()),
        };
        let _ = writeln!(
            c.out,
            r##"<path id="cell{idx}" data-owner="{owner}" d="{d}" fill="{fill}" fill-rule="evenodd" stroke="#444" stroke-width="0.5"/>"##
        );
    }
    terminals(&mut c, &p.terminals);
    c.finish()
}

/// The overlay; each face carries its 6-slot label.
pub fn overlay_svg(arr: &Arrangement, ts: &[Point]) -> String {
    let mut c = Canvas::new(arr.bbox);
    for (idx, r) in arr.regions.iter().enumerate() {
        let mut d = c.ring_path(&r.outer);
        for h in &r.holes {
            d.push(' ');
            d.push_str(&c.ring_path(h));
        }
        let label = label_text(&r.label);
        let seed = r.label.iter().fold(7usize, |a, s| a.wrapping_mul(31).wrapping_add(s.map_or(0, |t| t + 1)));
        let _ = writeln!(
            c.out,
            r##"<path id="region{idx}" data-label="{label}" d="{d}" fill="{}" fill-rule="evenodd" stroke="#333" stroke-width="0.4"><title>{label}</title></path>"##,
            colour(seed)
        );
    }
    terminals(&mut c, ts);
    c.finish()
}

/// A solution tree: terminals black, Steiner points red.
pub fn solution_svg(sol: &Solution) -> String {
    let all: Vec<Point> = sol.terminals.iter().chain(sol.steiner.iter()).copied().collect();
    let mut bbox = BBox::around(&all).expect("nonempty");
    let pad = 0.05 * (bbox.max - bbox.min).euclid().max(1.0);
    bbox = bbox.inflate(pad);
    let mut c = Canvas::new(bbox);
    let at = |r: NodeRef| match r {
        NodeRef::Terminal(i) => sol.terminals[i],
        NodeRef::Steiner(j) => sol.steiner[j],
    };
    for &(a, b) in &sol.edges {
        let ((x1, y1), (x2, y2)) = (c.xy(at(a)), c.xy(at(b)));
        let _ = writeln!(
            c.out,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#226" stroke-width="2"/>"##
        );
    }
    terminals(&mut c, &sol.terminals);
    for (j, s) in sol.steiner.iter().enumerate() {
        c.circle(*s, 5.0, "crimson", &format!("s{j}"));
    }
    c.finish()
}
