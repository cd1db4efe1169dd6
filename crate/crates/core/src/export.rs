//! Deterministic output: JSON and CSV with every float written to 17
//! significant digits, and static SVG drawings.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::billiards::OrbitRow;
use crate::geometry::{Geometry, Vec3};

/// `d.dddddddddddddddde±x`: round-trips every finite f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

/// Pretty-printed JSON whose floats go through [`fmt_f64`].
pub struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Default for SigFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFormatter::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub const ORBIT_CSV_HEADER: &str = "step,t,theta,chord_length";

pub fn orbit_csv(rows: &[OrbitRow]) -> String {
    let mut s = String::from(ORBIT_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.step,
            fmt_f64(r.t),
            fmt_f64(r.theta),
            fmt_f64(r.chord_length)
        );
    }
    s
}

/// Plane image of an ambient point: identity on E², orthographic view
/// from above on S², Poincaré disk on H².
pub fn project(geometry: Geometry, p: &Vec3) -> [f64; 2] {
    match geometry {
        Geometry::Euclidean | Geometry::Spherical => [p.x, p.y],
        Geometry::Hyperbolic => [p.y / (1.0 + p.x), p.z / (1.0 + p.x)],
    }
}

const VIEW: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// An 800×800 drawing: closed black outlines and open gray polylines, all
/// in ambient coordinates of `geometry`.
pub fn render_svg(geometry: Geometry, black: &[Vec<Vec3>], gray: &[Vec<Vec3>]) -> String {
    let proj = |ps: &[Vec3]| ps.iter().map(|p| project(geometry, p)).collect::<Vec<_>>();
    let black: Vec<_> = black.iter().map(|l| proj(l)).collect();
    let gray: Vec<_> = gray.iter().map(|l| proj(l)).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in black.iter().chain(&gray).flatten() {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if !lo[0].is_finite() {
        (lo, hi) = ([-1.0, -1.0], [1.0, 1.0]);
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (VIEW - 2.0 * MARGIN) / span;
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let pt = |p: &[f64; 2]| {
        format!(
            "{:.3},{:.3}",
            VIEW / 2.0 + (p[0] - cx) * scale,
            VIEW / 2.0 - (p[1] - cy) * scale
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW} {VIEW}" width="{VIEW}" height="{VIEW}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if geometry == Geometry::Hyperbolic {
        let r = scale;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{r:.3}" fill="none" stroke="lightgray" stroke-dasharray="4 4"/>"#,
            VIEW / 2.0 - cx * scale,
            VIEW / 2.0 + cy * scale
        );
    }
    for line in &gray {
        let pts: Vec<String> = line.iter().map(pt).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="gray" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }
    for line in &black {
        let pts: Vec<String> = line.iter().map(pt).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

/// A polygon in black with its `k`-diagonals in gray.
pub fn polygon_svg(vertices: &[[f64; 2]], k: usize) -> String {
    let v: Vec<Vec3> = vertices.iter().map(|p| Vec3::new(p[0], p[1], 0.0)).collect();
    let n = v.len();
    let diagonals: Vec<Vec<Vec3>> = if n == 0 {
        Vec::new()
    } else {
        (0..n).map(|i| vec![v[i], v[(i + k) % n]]).collect()
    };
    render_svg(Geometry::Euclidean, &[v], &diagonals)
}
