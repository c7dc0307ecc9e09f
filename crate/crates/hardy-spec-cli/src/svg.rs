//! Minimal SVG plots of point sets and curves in the complex plane.

use hardy_spec::C64;
use std::fmt::Write;

const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

pub struct Plot {
    re: (f64, f64),
    im: (f64, f64),
    body: String,
}

impl Plot {
    /// Square view of `[re.0, re.1] x [im.0, im.1]`, widened to equal aspect.
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        let (w, h) = (re.1 - re.0, im.1 - im.0);
        let side = w.max(h).max(1e-12);
        let (cx, cy) = ((re.0 + re.1) / 2.0, (im.0 + im.1) / 2.0);
        Self { re: (cx - side / 2.0, cx + side / 2.0), im: (cy - side / 2.0, cy + side / 2.0), body: String::new() }
    }

    fn xy(&self, z: C64) -> (f64, f64) {
        let s = (SIZE - 2.0 * PAD) / (self.re.1 - self.re.0);
        (PAD + (z.re - self.re.0) * s, SIZE - PAD - (z.im - self.im.0) * s)
    }

    pub fn path(&mut self, pts: &[C64], stroke: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (k, &z) in pts.iter().enumerate() {
            let (x, y) = self.xy(z);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { 'M' } else { 'L' });
        }
        let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="1"/>"#, d.trim_end());
    }

    pub fn points(&mut self, pts: &[C64], fill: &str, r: f64) {
        for &z in pts {
            let (x, y) = self.xy(z);
            let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
        }
    }

    pub fn circle(&mut self, center: C64, radius: f64, stroke: &str) {
        let (x, y) = self.xy(center);
        let s = (SIZE - 2.0 * PAD) / (self.re.1 - self.re.0);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="{stroke}" stroke-dasharray="4 3"/>"#,
            radius * s
        );
    }

    pub fn render(&self, hash: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <!-- config_hash={hash} -->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}
