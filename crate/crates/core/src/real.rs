//! Arbitrary-precision binary floating point on top of `num-bigint`.
//!
//! A [`Real`] is `mantissa · 2^exp` with at most `prec` significant bits.
//! Arithmetic rounds to nearest at the larger operand precision. Elementary
//! functions (`exp`, `sin`, `cos`, `sqrt`) carry internal guard bits, so the
//! result is accurate to within a few units in the last place.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::series::Rat;

/// Bits needed to carry `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 4
}

#[derive(Clone, Debug)]
pub struct Real {
    man: BigInt,
    exp: i64,
    prec: u32,
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real { man: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Real { man: BigInt::from(n), exp: 0, prec }.normalized()
    }

    pub fn from_bigint(n: BigInt, prec: u32) -> Self {
        Real { man: n, exp: 0, prec }.normalized()
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let num = Real { man: r.numer().clone(), exp: 0, prec: prec + 8 };
        let den = Real { man: r.denom().clone(), exp: 0, prec: prec + 8 };
        (num / den).with_prec(prec)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        Real { man: BigInt::from(m) * sign, exp: e, prec }.normalized()
    }

    /// Parses a decimal literal such as `1.4142135624`, `-3`, or `2.5e-3`.
    pub fn parse_decimal(s: &str, prec: u32) -> Option<Self> {
        let s = s.trim();
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
            None => (s, 0),
        };
        let (neg, body) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let e = exp10 - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let r = if e >= 0 {
            Rat::from_integer(n * num_traits::pow(ten, e as usize))
        } else {
            Rat::new(n, num_traits::pow(ten, (-e) as usize))
        };
        Some(Self::from_rat(&r, prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.man.bits();
        if bits > self.prec as u64 {
            let shift = bits - self.prec as u64;
            let neg = self.man.is_negative();
            let mag = self.man.magnitude().clone();
            let half = num_bigint::BigUint::one() << (shift - 1);
            let rounded = (mag + half) >> shift;
            self.man = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, rounded);
            self.exp += shift as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real { man: self.man.abs(), exp: self.exp, prec: self.prec }
    }

    /// `self · 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Real { man: self.man.clone(), exp: self.exp + k, prec: self.prec }
    }

    /// Position of the leading bit: `|self| ∈ [2^(m−1), 2^m)`; `i64::MIN` for zero.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    /// Exact rational value.
    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.man << self.exp as usize)
        } else {
            Rat::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let (m, e) = if bits > 60 {
            let shift = bits - 60;
            ((&self.man >> shift as usize).to_f64().unwrap_or(0.0), self.exp + shift)
        } else {
            (self.man.to_f64().unwrap_or(0.0), self.exp)
        };
        let mut v = m;
        let mut e = e;
        while e > 1000 {
            v *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            v *= 2f64.powi(-1000);
            e += 1000;
        }
        v * 2f64.powi(e as i32)
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let d = Real { man: self.man.clone(), exp: self.exp, prec: u32::MAX }
            .add_exact(&Real { man: -&other.man, exp: other.exp, prec: u32::MAX });
        d.man.sign().cmp(&Sign::NoSign)
    }

    fn add_exact(&self, other: &Self) -> Self {
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Real { man: a + b, exp: e, prec: self.prec.max(other.prec) }
    }

    fn add_ref(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if other.is_zero() {
            return self.clone().with_prec(prec);
        }
        if self.is_zero() {
            return other.clone().with_prec(prec);
        }
        let ta = self.magnitude_bits();
        let tb = other.magnitude_bits();
        let gap = prec as i64 + 4;
        if ta - tb > gap {
            return self.clone().with_prec(prec);
        }
        if tb - ta > gap {
            return other.clone().with_prec(prec);
        }
        // drop bits far below the result's resolution before aligning
        let floor = ta.max(tb) - 2 * prec as i64 - 8;
        let trim = |x: &Real| -> Real {
            if x.exp < floor {
                let s = (floor - x.exp) as usize;
                Real { man: &x.man >> s, exp: floor, prec: x.prec }
            } else {
                x.clone()
            }
        };
        let mut r = trim(self).add_exact(&trim(other));
        r.prec = prec;
        r.normalized()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        Real {
            man: &self.man * &other.man,
            exp: self.exp + other.exp,
            prec: self.prec.max(other.prec),
        }
        .normalized()
    }

    fn div_ref(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let s = (prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64).max(0);
        let q = (&self.man << s as usize) / &other.man;
        Real { man: q, exp: self.exp - other.exp - s, prec }.normalized()
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec).div_ref(self)
    }

    pub fn square(&self) -> Self {
        self.mul_ref(self)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative number");
        if self.is_zero() {
            return self.clone();
        }
        let target = 2 * (self.prec as i64 + 4);
        let mut shift = (target - self.man.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.man << shift as usize;
        Real { man: m.sqrt(), exp: (self.exp - shift) / 2, prec: self.prec }.normalized()
    }

    pub fn pi(prec: u32) -> Self {
        cached_constant(Constant::Pi, prec)
    }

    pub fn ln2(prec: u32) -> Self {
        cached_constant(Constant::Ln2, prec)
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if self.is_zero() {
            return Self::one(prec);
        }
        let x = self.to_f64();
        assert!(x.abs() < 1e12, "exp argument out of range");
        let k = (x / std::f64::consts::LN_2).round() as i64;
        let kbits = 64 - k.unsigned_abs().leading_zeros();
        let work = prec + 24 + kbits;
        let xr = self.clone().with_prec(work + 8);
        let r = if k == 0 {
            xr
        } else {
            &xr - &(&Real::ln2(work + kbits + 8) * &Real::from_int(k, work + kbits + 8))
        }
        .with_prec(work);
        const HALVINGS: i64 = 12;
        let r = r.mul_pow2(-HALVINGS);
        let mut sum = Self::one(work);
        let mut term = Self::one(work);
        let cutoff = -(work as i64) - 4;
        for n in 1..400 {
            term = &(&term * &r) / &Real::from_int(n, work);
            if term.magnitude_bits() < cutoff {
                break;
            }
            sum = &sum + &term;
        }
        for _ in 0..HALVINGS {
            sum = sum.square();
        }
        sum.mul_pow2(k).with_prec(prec)
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let prec = self.prec;
        if self.is_zero() {
            return (Self::zero(prec), Self::one(prec));
        }
        let x = self.to_f64();
        assert!(x.abs() < 1e12, "trig argument out of range");
        let n = (x / std::f64::consts::FRAC_PI_2).round() as i64;
        let nbits = 64 - n.unsigned_abs().leading_zeros();
        let work = prec + 16 + nbits;
        let xr = self.clone().with_prec(work + 8);
        let r = if n == 0 {
            xr
        } else {
            let half_pi = Real::pi(work + nbits + 8).mul_pow2(-1);
            &xr - &(&half_pi * &Real::from_int(n, work + nbits + 8))
        }
        .with_prec(work);
        let r2 = r.square();
        let cutoff = -(work as i64) - 4;
        let mut s = r.clone();
        let mut term = r.clone();
        let mut k = 1i64;
        loop {
            term = &(&term * &r2) / &Real::from_int((2 * k) * (2 * k + 1), work);
            term = -term;
            if term.magnitude_bits() < cutoff {
                break;
            }
            s = &s + &term;
            k += 1;
        }
        let mut c = Self::one(work);
        let mut term = Self::one(work);
        let mut k = 1i64;
        loop {
            term = &(&term * &r2) / &Real::from_int((2 * k - 1) * (2 * k), work);
            term = -term;
            if term.magnitude_bits() < cutoff {
                break;
            }
            c = &c + &term;
            k += 1;
        }
        let (sin, cos) = match n.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        (sin.with_prec(prec), cos.with_prec(prec))
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1));
        }
        let r = self.to_rat();
        let neg = r.is_negative();
        let r = r.abs();
        let approx = self.to_f64().abs();
        let mut d = if approx > 0.0 && approx.is_finite() {
            approx.log10().floor() as i64
        } else {
            // outside f64 range: estimate from the binary exponent
            ((self.magnitude_bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64
        };
        let ten = BigInt::from(10);
        let scaled = |d: i64| -> BigInt {
            let k = digits as i64 - 1 - d;
            let v = if k >= 0 {
                &r * Rat::from_integer(num_traits::pow(ten.clone(), k as usize))
            } else {
                &r / Rat::from_integer(num_traits::pow(ten.clone(), (-k) as usize))
            };
            v.round().to_integer()
        };
        let mut n = scaled(d);
        let limit = num_traits::pow(ten.clone(), digits);
        if n >= limit {
            d += 1;
            n = scaled(d);
        } else if n < num_traits::pow(ten.clone(), digits - 1) {
            d -= 1;
            n = scaled(d);
        }
        let s = n.to_string();
        let (head, tail) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{d}")
        } else {
            format!("{sign}{head}.{tail}e{d}")
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Constant {
    Pi,
    Ln2,
}

fn cached_constant(which: Constant, prec: u32) -> Real {
    static CACHE: OnceLock<Mutex<HashMap<(Constant, u32), Real>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("constant cache poisoned").get(&(which, prec)) {
        return v.clone();
    }
    let v = match which {
        Constant::Pi => compute_pi(prec),
        Constant::Ln2 => compute_ln2(prec),
    };
    cache.lock().expect("constant cache poisoned").insert((which, prec), v.clone());
    v
}

/// Fixed-point `atan(1/x)` scaled by `2^w`.
fn atan_inv(x: u32, w: usize) -> BigInt {
    let one = BigInt::one() << w;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut term = &one / BigInt::from(x);
    let mut sum = term.clone();
    let mut k = 1u64;
    loop {
        term = &term / &x2;
        if term.is_zero() {
            break;
        }
        let t = &term / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

fn compute_pi(prec: u32) -> Real {
    let w = prec as usize + 32;
    let man = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
    Real { man, exp: -(w as i64), prec }.normalized()
}

fn compute_ln2(prec: u32) -> Real {
    // ln 2 = Σ_{k≥1} 1/(k 2^k)
    let w = prec as usize + 32;
    let one = BigInt::one() << w;
    let mut sum = BigInt::zero();
    let mut k = 1usize;
    loop {
        let term = (&one >> k) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    Real { man: sum, exp: -(w as i64), prec }.normalized()
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                self.$inner(rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$inner(&rhs)
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                (&self).$inner(rhs)
            }
        }
    };
}

impl Real {
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&-other)
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { man: -self.man, exp: self.exp, prec: self.prec }
    }
}

impl<'a> Neg for &'a Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { man: -&self.man, exp: self.exp, prec: self.prec }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec as f64) / std::f64::consts::LOG2_10) as usize);
        write!(f, "{}", self.to_sci(digits.max(1)))
    }
}
