//! HSV/RGB conversion and the parametric channel maps.
//!
//! All channel math is done in `f64`; values are quantized to 8 bits only
//! when converting back to [`RgbPixel`]. Hue is treated as a linear
//! coordinate on `[0, 1]`, so maps that are not periodic produce a visible
//! seam at red. That seam is intended.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::num::NonZeroU32;

use crate::error::{Error, Result};

/// An 8-bit RGB pixel with optional alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RgbPixel {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: Option<u8>,
}

impl RgbPixel {
    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b, a: None }
    }

    pub const fn rgba(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self {
            r,
            g,
            b,
            a: Some(a),
        }
    }

    pub const fn channels(&self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Same color with `alpha` attached (or removed).
    pub const fn with_alpha(self, a: Option<u8>) -> Self {
        Self { a, ..self }
    }
}

/// A color in HSV space, every channel in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl HsvPixel {
    pub fn new(h: f64, s: f64, v: f64) -> Result<Self> {
        for c in [h, s, v] {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::ChannelOutOfRange(c));
            }
        }
        Ok(Self { h, s, v })
    }
}

/// Hexcone RGB to HSV. Achromatic pixels get `h = 0, s = 0`; hue lies in `[0, 1)`.
pub fn rgb_to_hsv(p: RgbPixel) -> HsvPixel {
    let (r, g, b) = (i32::from(p.r), i32::from(p.g), i32::from(p.b));
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let v = f64::from(max) / 255.0;
    let delta = max - min;
    if delta == 0 {
        return HsvPixel { h: 0.0, s: 0.0, v };
    }
    let d = f64::from(delta);
    let s = d / f64::from(max);
    let sector = if max == r {
        f64::from(g - b) / d
    } else if max == g {
        2.0 + f64::from(b - r) / d
    } else {
        4.0 + f64::from(r - g) / d
    };
    let mut h = sector / 6.0;
    if h < 0.0 {
        h += 1.0;
    }
    HsvPixel { h, s, v }
}

/// Hexcone HSV to RGB, rounding half away from zero. Hue `1.0` is hue `0.0`.
/// The result carries no alpha.
pub fn hsv_to_rgb(p: HsvPixel) -> RgbPixel {
    let quantize = |c: f64| (c * 255.0).round().clamp(0.0, 255.0) as u8;
    let HsvPixel { h, s, v } = p;
    if s == 0.0 {
        let g = quantize(v);
        return RgbPixel::rgb(g, g, g);
    }
    let h6 = if h >= 1.0 { 0.0 } else { h * 6.0 };
    let sector = (h6.floor() as u8).min(5);
    let f = h6 - f64::from(sector);
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    RgbPixel::rgb(quantize(r), quantize(g), quantize(b))
}

/// Coefficients of `c0 + c1|sin(w1 pi x)| + c2 sin(w2 pi x) + c3 cos(w3 pi x) + c4 x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    coeffs: [f64; 8],
}

impl Harmonic {
    /// Parameters in the order `c0, c1, w1, c2, w2, c3, w3, c4`.
    pub fn new(params: [f64; 8]) -> Result<Self> {
        if params.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMap(
                "harmonic parameters must be finite".into(),
            ));
        }
        Ok(Self { coeffs: params })
    }

    pub fn params(&self) -> [f64; 8] {
        self.coeffs
    }

    fn eval(&self, x: f64) -> f64 {
        let [c0, c1, w1, c2, w2, c3, w3, c4] = self.coeffs;
        c0 + c1 * (w1 * PI * x).sin().abs()
            + c2 * (w2 * PI * x).sin()
            + c3 * (w3 * PI * x).cos()
            + c4 * x
    }
}

/// Polynomial with coefficients in ascending powers, `c0 + c1 x + c2 x^2 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidMap(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMap(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// A map of one HSV channel onto itself.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ChannelMapSpec {
    #[default]
    Identity,
    /// `0.45|sin(sqrt2 * 20 pi x)| + 0.55|sin(20 pi x)|`
    F1,
    /// `0.5(1 + sin(40 pi x))`
    F2,
    /// `4x(1 - x)`
    F3,
    /// `4x(x - 1) + 1`
    F4,
    /// `0.15(1 + cos(40 pi x)) + 0.5x`; its range is `[0, 0.8]`.
    F5,
    /// `n x mod 1`
    ModMultiply(NonZeroU32),
    Harmonic(Harmonic),
    Polynomial(Polynomial),
}

impl ChannelMapSpec {
    pub fn mod_multiply(n: u32) -> Result<Self> {
        NonZeroU32::new(n)
            .map(Self::ModMultiply)
            .ok_or_else(|| Error::InvalidMap("modmul requires n >= 1".into()))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity)
    }

    /// Lower-case family name as used in configuration files.
    pub fn family(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
            Self::F5 => "f5",
            Self::ModMultiply(_) => "modmul",
            Self::Harmonic(_) => "harmonic",
            Self::Polynomial(_) => "poly",
        }
    }

    /// Evaluate the map at `x` in `[0, 1]`. The result is in `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::F1 => {
                0.45 * (SQRT_2 * 20.0 * PI * x).sin().abs() + 0.55 * (20.0 * PI * x).sin().abs()
            }
            Self::F2 => 0.5 * (1.0 + (40.0 * PI * x).sin()),
            Self::F3 => 4.0 * x * (1.0 - x),
            Self::F4 => 4.0 * x * (x - 1.0) + 1.0,
            Self::F5 => 0.15 * (1.0 + (40.0 * PI * x).cos()) + 0.5 * x,
            Self::ModMultiply(n) => (f64::from(n.get()) * x).rem_euclid(1.0),
            Self::Harmonic(m) => clamp_unit(m.eval(x)),
            Self::Polynomial(m) => clamp_unit(m.eval(x)),
        }
    }
}

/// Free-function form of [`ChannelMapSpec::eval`].
pub fn eval_map(m: &ChannelMapSpec, x: f64) -> f64 {
    m.eval(x)
}

fn clamp_unit(y: f64) -> f64 {
    if y.is_nan() {
        0.0
    } else {
        y.clamp(0.0, 1.0)
    }
}

/// One map per HSV channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelMaps {
    pub hue: ChannelMapSpec,
    pub saturation: ChannelMapSpec,
    pub value: ChannelMapSpec,
}

impl ChannelMaps {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Maps only the hue channel.
    pub fn hue(m: ChannelMapSpec) -> Self {
        Self {
            hue: m,
            ..Self::default()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.hue.is_identity() && self.saturation.is_identity() && self.value.is_identity()
    }

    pub fn apply(&self, c: HsvPixel) -> HsvPixel {
        HsvPixel {
            h: self.hue.eval(c.h),
            s: self.saturation.eval(c.s),
            v: self.value.eval(c.v),
        }
    }

    /// Recolor an 8-bit pixel, keeping its alpha. Identity maps return the
    /// pixel untouched.
    pub fn apply_rgb(&self, p: RgbPixel) -> RgbPixel {
        if self.is_identity() {
            return p;
        }
        hsv_to_rgb(self.apply(rgb_to_hsv(p))).with_alpha(p.a)
    }
}

/// Number of rows in a map table.
pub const MAP_TABLE_ROWS: usize = 4096;

/// Tabulate `m` as CSV: header `x,y`, then [`MAP_TABLE_ROWS`] rows with
/// `x = i / 4096`, both columns fixed to nine decimals.
pub fn map_table_csv(m: &ChannelMapSpec) -> String {
    let mut out = String::with_capacity(24 * (MAP_TABLE_ROWS + 1));
    out.push_str("x,y\n");
    for i in 0..MAP_TABLE_ROWS {
        let x = i as f64 / MAP_TABLE_ROWS as f64;
        let _ = writeln!(out, "{:.9},{:.9}", x, m.eval(x));
    }
    out
}
