//! Static SVG choropleths for lattice data.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const CELL: usize = 20;
const LEGEND_WIDTH: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round().clamp(0.0, 255.0) as u8;
        Rgb(mix(self.0, other.0), mix(self.1, other.1), mix(self.2, other.2))
    }

    fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("colour `{s}` is not #rrggbb"));
        let hex = s.strip_prefix('#').filter(|h| h.len() == 6).ok_or_else(bad)?;
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb(channel(0)?, channel(2)?, channel(4)?))
    }
}

/// Linear colour ramp from `low` (minimum value) to `high` (maximum value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub low: Rgb,
    pub high: Rgb,
}

impl Palette {
    pub fn reds() -> Self {
        Palette { low: Rgb(0xff, 0xf5, 0xf0), high: Rgb(0x67, 0x00, 0x0d) }
    }

    /// Dark for low values, light for high values.
    pub fn greys() -> Self {
        Palette { low: Rgb(0x1a, 0x1a, 0x1a), high: Rgb(0xf2, 0xf2, 0xf2) }
    }
}

impl FromStr for Palette {
    type Err = Error;

    /// `reds`, `greys`, or `#rrggbb:#rrggbb`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reds" => Ok(Palette::reds()),
            "greys" | "grays" => Ok(Palette::greys()),
            _ => {
                let (lo, hi) = s
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter(format!("palette `{s}` is not LOW:HIGH")))?;
                Ok(Palette { low: lo.parse()?, high: hi.parse()? })
            }
        }
    }
}

/// Formats `x` with three significant digits.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (2 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding can carry into a new digit (9.995 -> 10.00)
        let rounded: f64 = s.parse().unwrap_or(x);
        let new_mag = rounded.abs().log10().floor() as i32;
        if new_mag != mag && rounded != 0.0 {
            let decimals = (2 - new_mag).max(0) as usize;
            return format!("{rounded:.decimals$}");
        }
        s
    } else {
        format!("{x:.2e}")
    }
}

/// Renders `values` (row-major, top-left first) as a `rows x cols` grid of
/// squares. Colours interpolate linearly over `[min, max]`; a constant field
/// maps to the low colour and gets a single legend label.
pub fn render_lattice_svg<T: Scalar>(
    values: &[T],
    rows: usize,
    cols: usize,
    palette: Palette,
    legend: bool,
) -> Result<String> {
    if rows * cols != values.len() || values.is_empty() {
        return Err(Error::DimensionMismatch { expected: rows * cols, found: values.len() });
    }
    let v: Vec<f64> = values.iter().map(|x| x.as_f64()).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("cannot colour non-finite values".into()));
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let t = |x: f64| if span > 0.0 { (x - lo) / span } else { 0.0 };

    let (gw, gh) = (cols * CELL, rows * CELL);
    let width = gw + if legend { LEGEND_WIDTH } else { 0 };
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{gh}" viewBox="0 0 {width} {gh}">"#
    )
    .unwrap();
    if legend {
        writeln!(
            w,
            r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
            palette.low.hex(),
            if span > 0.0 { palette.high.hex() } else { palette.low.hex() }
        )
        .unwrap();
    }
    writeln!(w, r#"<g id="cells" stroke="none">"#).unwrap();
    for (k, &x) in v.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        writeln!(
            w,
            r#"<rect class="cell" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"><title>{}: {}</title></rect>"#,
            c * CELL,
            r * CELL,
            palette.low.lerp(palette.high, t(x)).hex(),
            k + 1,
            sig3(x)
        )
        .unwrap();
    }
    writeln!(w, "</g>").unwrap();
    if legend {
        let x0 = gw + 10;
        writeln!(w, r#"<g id="legend" font-family="sans-serif" font-size="10">"#).unwrap();
        writeln!(w, r#"<rect class="legend" x="{x0}" y="0" width="12" height="{gh}" fill="url(#ramp)"/>"#).unwrap();
        let ticks: Vec<f64> = if span > 0.0 { (0..5).map(|i| lo + span * i as f64 / 4.0).collect() } else { vec![lo] };
        let denom = (ticks.len().max(2) - 1) as f64;
        for (i, tick) in ticks.iter().enumerate() {
            // highest value at the top
            let y = gh as f64 - (i as f64 / denom) * gh as f64;
            let y = y.clamp(8.0, gh as f64 - 2.0);
            writeln!(w, r#"<text class="tick" x="{}" y="{y:.1}">{}</text>"#, x0 + 16, sig3(*tick)).unwrap();
        }
        writeln!(w, "</g>").unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(s)
}
