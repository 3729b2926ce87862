//! Exact rationals and rigorous rational interval enclosures.
//!
//! Finite quantities (moments, subgroup counts, finite q-products) are bare
//! [`ExactRational`]s. Limits of infinite products and series are
//! [`Enclosure`]s: closed rational intervals `[lo, hi]` guaranteed to contain
//! the real value. Enclosure arithmetic is exact on the endpoints; the only
//! lossy step is [`Enclosure::round_outward`], which moves each endpoint
//! outward to a dyadic rational so long computations keep small numbers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

pub type ExactRational = BigRational;

/// Dyadic precision (in bits) used for outward rounding of intermediate
/// enclosures. 2^-192 is far below every tolerance the library accepts.
pub const WORK_BITS: u32 = 192;

pub fn int(n: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for a signed exponent. Panics on `0^negative`.
pub fn pow_signed(base: &ExactRational, exp: i64) -> ExactRational {
    let mag = exp.unsigned_abs();
    let r = num_traits::pow::pow(base.clone(), mag as usize);
    if exp < 0 {
        r.recip()
    } else {
        r
    }
}

/// `p^exp` for an integer base.
pub fn ipow(p: u64, exp: i64) -> ExactRational {
    pow_signed(&ExactRational::from_integer(BigInt::from(p)), exp)
}

/// Parses `"3"`, `"-2/7"`, a plain decimal such as `"0.25"`, or a decimal
/// with exponent such as `"1e-6"`.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if !s.contains('/') {
        if let Some((m, e)) = s.split_once(['e', 'E']) {
            let e: i64 = e.parse().map_err(|_| bad())?;
            if e.unsigned_abs() > 10_000 {
                return Err(bad());
            }
            return Ok(parse_rational(m)? * ipow(10, e));
        }
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(ExactRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow::pow(BigInt::from(10), fp.len());
        return Ok(ExactRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(ExactRational::from_integer(n))
}

/// Canonical `"num/den"` rendering (denominator always present).
pub fn fraction_string(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn display_rational(x: &ExactRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        fraction_string(x)
    }
}

pub fn to_f64(x: &ExactRational) -> f64 {
    // Scale down very large numerators/denominators before converting.
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            let bits = x.denom().bits().max(x.numer().bits()) as i64 - 900;
            let shift = bits.max(0) as usize;
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// Rounding rule for fixed-point rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    HalfEven,
    /// Toward zero; what a table printed by truncation shows.
    Truncate,
}

/// Rounds `x * 10^digits` to an integer under `mode`.
pub fn round_scaled(x: &ExactRational, digits: u32, mode: RoundingMode) -> BigInt {
    let scale = num_traits::pow::pow(BigInt::from(10), digits as usize);
    let scaled = x * ExactRational::from_integer(scale);
    match mode {
        RoundingMode::Truncate => scaled.trunc().to_integer(),
        RoundingMode::HalfEven => {
            let fl = scaled.floor();
            let frac = &scaled - &fl;
            let half = rat(1, 2);
            let fl = fl.to_integer();
            match frac.cmp(&half) {
                Ordering::Less => fl,
                Ordering::Greater => fl + 1,
                Ordering::Equal => {
                    if fl.is_even() {
                        fl
                    } else {
                        fl + 1
                    }
                }
            }
        }
    }
}

/// Fixed-point decimal string of `x` with exactly `digits` fractional digits.
/// Never uses scientific notation.
pub fn format_fixed(x: &ExactRational, digits: u32, mode: RoundingMode) -> String {
    let n = round_scaled(x, digits, mode);
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    let d = digits as usize;
    if s.len() <= d {
        s = format!("{}{}", "0".repeat(d + 1 - s.len()), s);
    }
    let (ip, fp) = s.split_at(s.len() - d);
    let body = if d == 0 { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// A closed rational interval `[lo, hi]` containing some real value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: ExactRational,
    hi: ExactRational,
}

impl Enclosure {
    pub fn new(lo: ExactRational, hi: ExactRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "enclosure endpoints out of order: [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Zero-width enclosure of an exact value.
    pub fn exact(x: ExactRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::exact(ExactRational::zero())
    }

    pub fn one() -> Self {
        Self::exact(ExactRational::one())
    }

    pub fn lo(&self) -> &ExactRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExactRational {
        &self.hi
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> ExactRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&ExactRational::zero())
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Largest absolute value of a member.
    pub fn magnitude(&self) -> ExactRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// `[lo - r, hi + r]` for `r >= 0`.
    pub fn widen(&self, r: &ExactRational) -> Enclosure {
        debug_assert!(!r.is_negative());
        Enclosure {
            lo: &self.lo - r,
            hi: &self.hi + r,
        }
    }

    /// Extends only the upper endpoint; used to add a nonnegative tail.
    pub fn extend_up(&self, r: &ExactRational) -> Enclosure {
        Enclosure {
            lo: self.lo.clone(),
            hi: &self.hi + r,
        }
    }

    pub fn scale(&self, c: &ExactRational) -> Enclosure {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(domain(format!("division by an enclosure containing 0: {self}")));
        }
        Ok(Enclosure {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn checked_div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, n: u32) -> Enclosure {
        let pw = |x: &ExactRational| num_traits::pow::pow(x.clone(), n as usize);
        if n == 0 {
            return Enclosure::one();
        }
        if n % 2 == 1 || !self.lo.is_negative() {
            return Enclosure {
                lo: pw(&self.lo),
                hi: pw(&self.hi),
            };
        }
        if !self.hi.is_positive() {
            return Enclosure {
                lo: pw(&self.hi),
                hi: pw(&self.lo),
            };
        }
        Enclosure {
            lo: ExactRational::zero(),
            hi: pw(&self.magnitude()),
        }
    }

    /// Moves both endpoints outward onto the grid `2^-bits Z`.
    pub fn round_outward(&self, bits: u32) -> Enclosure {
        let scale = ExactRational::from_integer(BigInt::one() << bits as usize);
        let down = |x: &ExactRational| {
            if x.denom().bits() <= bits as u64 + 1 {
                return x.clone();
            }
            (x * &scale).floor() / &scale
        };
        let up = |x: &ExactRational| {
            if x.denom().bits() <= bits as u64 + 1 {
                return x.clone();
            }
            (x * &scale).ceil() / &scale
        };
        Enclosure {
            lo: down(&self.lo),
            hi: up(&self.hi),
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// `sup |a - b|` over `a` in `self`, `b` in `other`.
    pub fn max_distance(&self, other: &Enclosure) -> ExactRational {
        let a = (&self.hi - &other.lo).abs();
        let b = (&other.hi - &self.lo).abs();
        a.max(b)
    }
}

impl From<ExactRational> for Enclosure {
    fn from(x: ExactRational) -> Self {
        Enclosure::exact(x)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        if !self.lo.is_negative() && !rhs.lo.is_negative() {
            return Enclosure {
                lo: &self.lo * &rhs.lo,
                hi: &self.hi * &rhs.hi,
            };
        }
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().cloned().unwrap();
        let hi = c.iter().max().cloned().unwrap();
        Enclosure { lo, hi }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        &self + &rhs
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: Enclosure) -> Enclosure {
        &self - &rhs
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        &self * &rhs
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Enclosure", 2)?;
        st.serialize_field("lo", &fraction_string(&self.lo))?;
        st.serialize_field("hi", &fraction_string(&self.hi))?;
        st.end()
    }
}

/// Serde adapter writing an [`ExactRational`] as `"num/den"`.
pub fn serialize_rational<S: Serializer>(
    x: &ExactRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(x))
}

/// Result of rendering an enclosure to a fixed number of decimals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundedDecimal {
    /// The common rendering when `certain`, otherwise the rendering of `lo`.
    pub text: String,
    pub certain: bool,
    pub lo_text: String,
    pub hi_text: String,
}

impl fmt::Display for RoundedDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.certain {
            write!(f, "{}", self.text)
        } else {
            write!(f, "{}..{} (ambiguous)", self.lo_text, self.hi_text)
        }
    }
}

/// Rounds both endpoints half-even to `digits` decimals. The result is
/// certain iff they agree, i.e. every member of the enclosure has the same
/// rounding.
pub fn round_decimal(x: &Enclosure, digits: u32) -> RoundedDecimal {
    round_decimal_with(x, digits, RoundingMode::HalfEven)
}

pub fn round_decimal_with(x: &Enclosure, digits: u32, mode: RoundingMode) -> RoundedDecimal {
    let lo_text = format_fixed(x.lo(), digits, mode);
    let hi_text = format_fixed(x.hi(), digits, mode);
    RoundedDecimal {
        text: lo_text.clone(),
        certain: lo_text == hi_text,
        lo_text,
        hi_text,
    }
}
