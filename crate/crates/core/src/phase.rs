//! Fixed-point phases modulo one and the analytic Hadamard-test probabilities.
//!
//! A [`Phase`] stores a fraction of a full turn as a `width`-bit unsigned
//! integer, so doubling and the classical phase corrections are exact integer
//! operations. Only the probability formulas leave the integer domain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default number of fractional bits carried by a phase.
pub const DEFAULT_WIDTH: u32 = 64;

/// Low-order bits every configuration must leave unused.
pub const GUARD_BITS: u32 = 4;

/// A fraction of a full turn, `raw / 2^width`, always in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    raw: u64,
    width: u32,
}

fn check_width(width: u32) -> Result<()> {
    if (1..=64).contains(&width) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(width))
    }
}

fn mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl Phase {
    pub fn new(raw: u64, width: u32) -> Result<Self> {
        check_width(width)?;
        if raw & !mask(width) != 0 {
            return Err(Error::RawOutOfRange { raw, width });
        }
        Ok(Phase { raw, width })
    }

    pub fn zero(width: u32) -> Result<Self> {
        Phase::new(0, width)
    }

    /// Nearest `width`-bit phase to `x mod 1`, ties to even.
    pub fn from_f64(x: f64, width: u32) -> Result<Self> {
        check_width(width)?;
        if !x.is_finite() {
            return Err(Error::PhaseParse(x.to_string()));
        }
        let frac = x.rem_euclid(1.0);
        // Scaling by a power of two is exact; rounding happens only once.
        let scaled = (frac * 2f64.powi(width as i32)).round_ties_even();
        let raw = (scaled as u128 % (1u128 << width)) as u64;
        Ok(Phase { raw, width })
    }

    /// Parses `0.101b` (binary), `28/2^8` (raw over a power of two) or a
    /// decimal fraction in `[0, 1)`.
    pub fn parse(text: &str, width: u32) -> Result<Self> {
        check_width(width)?;
        let s = text.trim();
        let err = || Error::PhaseParse(text.to_string());
        if let Some(body) = s.strip_suffix('b') {
            let digits = body.strip_prefix("0.").ok_or_else(err)?;
            let bits: BitString = digits.parse().map_err(|_| err())?;
            return phase_from_bits(&bits, width);
        }
        if let Some((raw, pow)) = s.split_once("/2^") {
            let raw: u64 = raw.parse().map_err(|_| err())?;
            let src: u32 = pow.parse().map_err(|_| err())?;
            if src > width {
                return Err(Error::InvalidConfig(format!(
                    "phase {text:?} needs {src} bits, width is {width}"
                )));
            }
            return Ok(Phase::new(raw, src)?.widen(width));
        }
        parse_decimal(s, width).ok_or_else(err)
    }

    pub fn raw(&self) -> u64 {
        self.raw
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Value as a double, truncated to 53 significant bits so it stays below 1.
    pub fn value(&self) -> f64 {
        if self.width > 53 {
            (self.raw >> (self.width - 53)) as f64 * 2f64.powi(-53)
        } else {
            self.raw as f64 * 2f64.powi(-(self.width as i32))
        }
    }

    /// `2^k * self mod 1`.
    pub fn double(&self, k: u32) -> Phase {
        let raw = if k >= self.width {
            0
        } else {
            (self.raw << k) & mask(self.width)
        };
        Phase {
            raw,
            width: self.width,
        }
    }

    /// Binary digit at 1-based position `i` (coefficient of `2^-i`).
    pub fn bit(&self, i: u32) -> bool {
        i >= 1 && i <= self.width && (self.raw >> (self.width - i)) & 1 == 1
    }

    /// Leading `len` binary digits (truncation).
    pub fn to_bits(&self, len: usize) -> BitString {
        BitString((1..=len as u32).map(|i| self.bit(i)).collect())
    }

    /// Exact re-expression at a larger width.
    pub fn widen(&self, width: u32) -> Phase {
        debug_assert!(width >= self.width && width <= 64);
        let shift = width - self.width;
        Phase {
            raw: if shift == 64 { 0 } else { self.raw << shift },
            width,
        }
    }

    /// Subtracts `2^-pos` (mod 1); positions past the width are below resolution.
    pub fn sub_unit(&self, pos: u32) -> Phase {
        if pos == 0 || pos > self.width {
            return *self;
        }
        let unit = 1u64 << (self.width - pos);
        Phase {
            raw: self.raw.wrapping_sub(unit) & mask(self.width),
            width: self.width,
        }
    }

    /// `self - other` as a real in `[-1/2, 1/2)`.
    pub fn signed_offset(&self, other: &Phase) -> f64 {
        let w = self.width.max(other.width);
        let (a, b) = (self.widen(w), other.widen(w));
        let d = a.raw.wrapping_sub(b.raw) & mask(w);
        let half = 1u64 << (w - 1);
        let scale = 2f64.powi(-(w as i32));
        if d >= half {
            -(((mask(w) - d) + 1) as f64 * scale)
        } else {
            d as f64 * scale
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.raw, self.width)
    }
}

/// Exact decimal-to-binary conversion by repeated doubling of the digit string.
fn parse_decimal(s: &str, width: u32) -> Option<Phase> {
    let digits = match s.split_once('.') {
        Some((int, frac)) => {
            if !(int.is_empty() || int == "0") {
                return None;
            }
            frac
        }
        None if s == "0" => "",
        None => return None,
    };
    if (digits.is_empty() && !s.starts_with('0')) || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut frac: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
    let double = |frac: &mut Vec<u8>| -> u64 {
        let mut carry = 0;
        for d in frac.iter_mut().rev() {
            let v = *d * 2 + carry;
            *d = v % 10;
            carry = v / 10;
        }
        while frac.last() == Some(&0) {
            frac.pop();
        }
        carry as u64
    };
    let mut raw: u128 = 0;
    for _ in 0..width {
        raw = (raw << 1) | double(&mut frac) as u128;
    }
    let half_bit = double(&mut frac);
    let above_half = !frac.is_empty();
    if half_bit == 1 && (above_half || raw & 1 == 1) {
        raw += 1;
    }
    let raw = (raw % (1u128 << width)) as u64;
    Some(Phase { raw, width })
}

/// Binary fraction digits, most significant first: bit `i` weighs `2^-i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// The `len` low-order bits of `value`, most significant first.
    pub fn from_integer(value: u64, len: usize) -> Self {
        BitString(
            (0..len)
                .rev()
                .map(|i| i < 64 && (value >> i) & 1 == 1)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Digits read as an unsigned integer (the register outcome).
    pub fn to_integer(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn value(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| 2f64.powi(-(i as i32 + 1)))
            .sum()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::PhaseParse(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which Hadamard test is run: the plain one, or the one with `K = diag(1, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestBasis {
    Cosine,
    Sine,
}

pub fn phase_from_bits(bits: &BitString, width: u32) -> Result<Phase> {
    check_width(width)?;
    if bits.len() > width as usize {
        return Err(Error::WidthOverflow {
            len: bits.len(),
            width,
        });
    }
    let raw = bits
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0u64, |acc, (i, _)| acc | 1u64 << (width - 1 - i as u32));
    Ok(Phase { raw, width })
}

pub fn double_k(phi: Phase, k: u32) -> Phase {
    phi.double(k)
}

/// Circular distance `min(|a-b|, 1-|a-b|)`, computed exactly on raw values.
pub fn mod1_distance(a: Phase, b: Phase) -> f64 {
    a.signed_offset(&b).abs()
}

/// `(Pr(0), Pr(1))` for the Hadamard test on phase `phi_k`.
pub fn hadamard_probs(phi_k: Phase, basis: TestBasis) -> (f64, f64) {
    let angle = 2.0 * PI * phi_k.value();
    match basis {
        TestBasis::Cosine => {
            let c = angle.cos();
            ((1.0 + c) / 2.0, (1.0 - c) / 2.0)
        }
        TestBasis::Sine => {
            let s = angle.sin();
            ((1.0 - s) / 2.0, (1.0 + s) / 2.0)
        }
    }
}

/// Removes the phase contributed by already-known lower bits.
///
/// `prior_bits[l-1]` is the bit `l` places below the one being measured; it is
/// cancelled by a controlled `R_{l+1}^{-1}`, i.e. by subtracting `2^-(l+1)`.
pub fn corrected_residual(phi_k: Phase, prior_bits: &BitString) -> Phase {
    prior_bits
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(phi_k, |acc, (i, _)| acc.sub_unit(i as u32 + 2))
}

/// Probability of reading 1 after the final Hadamard on `(|0> + e^{2 pi i r}|1>)/sqrt 2`.
pub fn post_h_prob_one(residual: Phase) -> f64 {
    let s = (PI * residual.value()).sin();
    s * s
}
