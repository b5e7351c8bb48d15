//! CSV result tables. Every table starts with a `#` comment line carrying
//! the provenance string supplied by the caller.

use std::fmt::Write as _;

use crate::influence::{InfluenceCurve, InfluenceSurfaces};
use crate::scalar::Scalar;

/// Shortest representation that parses back to the same `f64`.
pub fn num<T: Scalar>(x: T) -> String {
    let x = x.as_f64();
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

/// Quotes a field when it contains a delimiter, quote or newline.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct Table {
    buf: String,
}

impl Table {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut buf = String::new();
        if !comment.is_empty() {
            writeln!(buf, "# {comment}").unwrap();
        }
        writeln!(buf, "{}", header.join(",")).unwrap();
        Table { buf }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let line: Vec<String> = cells.into_iter().map(|c| field(c.as_ref())).collect();
        writeln!(self.buf, "{}", line.join(",")).unwrap();
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// `z1,ic` rows of one curve.
pub fn curve_csv<T: Scalar>(comment: &str, curve: &InfluenceCurve<T>) -> String {
    let mut t = Table::new(comment, &["z1", "ic"]);
    for (&x, &y) in curve.z1_grid.iter().zip(&curve.ic_values) {
        t.row([num(x), num(y)]);
    }
    t.finish()
}

/// Long-format `z1,lag,ic` table of the surface at MC level `index`.
pub fn surface_csv<T: Scalar>(comment: &str, surfaces: &InfluenceSurfaces<T>, index: usize) -> String {
    let (_, grid) = &surfaces.by_mc[index];
    let mut t = Table::new(comment, &["z1", "lag", "ic"]);
    for (i, &x) in surfaces.z1.iter().enumerate() {
        for (j, &s) in surfaces.lag.iter().enumerate() {
            t.row([num(x), num(s), num(grid[i][j])]);
        }
    }
    t.finish()
}

/// Long-format `z1,mc,ic` table of the zero-lag surface.
pub fn zero_lag_surface_csv<T: Scalar>(comment: &str, surfaces: &InfluenceSurfaces<T>) -> String {
    let mut t = Table::new(comment, &["z1", "mc", "ic"]);
    for (i, &x) in surfaces.z1.iter().enumerate() {
        for (j, &mc) in surfaces.mc_axis.iter().enumerate() {
            t.row([num(x), num(mc), num(surfaces.zero_lag[i][j])]);
        }
    }
    t.finish()
}
