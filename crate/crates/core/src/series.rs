//! Truncated Laurent series in `q^{1/2}` with exact rational coefficients.
//!
//! Every series carries a hard knowledge boundary: coefficients are exact for
//! all exponents strictly below `trunc_order`, and nothing is claimed at or
//! above it. Binary operations compute the window that is provably exact and
//! never extrapolate past it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Shorthand for an integer-valued [`Rat`].
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rat::from_integer(s.trim().parse().ok()?)),
    }
}

/// An exponent of `q` stored as twice its value, so `q^{1/2}` is `HalfExp(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfExp(pub i64);

impl HalfExp {
    /// The exponent `n` of `q^n`.
    pub const fn q(n: i64) -> Self {
        HalfExp(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_rat(self) -> Rat {
        ratio(self.0, 2)
    }
}

impl Add for HalfExp {
    type Output = HalfExp;
    fn add(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 + rhs.0)
    }
}

impl Sub for HalfExp {
    type Output = HalfExp;
    fn sub(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 - rhs.0)
    }
}

impl Neg for HalfExp {
    type Output = HalfExp;
    fn neg(self) -> HalfExp {
        HalfExp(-self.0)
    }
}

impl fmt::Display for HalfExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A truncated Laurent series `Σ c_e q^{e/2}`, exact below `trunc_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: BTreeMap<HalfExp, Rat>,
    min_exp: HalfExp,
    trunc_order: HalfExp,
}

impl FormalSeries {
    pub fn zero(trunc_order: HalfExp) -> Self {
        FormalSeries { coeffs: BTreeMap::new(), min_exp: trunc_order, trunc_order }
    }

    pub fn one(trunc_order: HalfExp) -> Self {
        Self::monomial(rat(1), HalfExp(0), trunc_order)
    }

    /// `c · q^{e/2}`; the term is dropped if `e ≥ trunc_order`.
    pub fn monomial(c: Rat, e: HalfExp, trunc_order: HalfExp) -> Self {
        let mut coeffs = BTreeMap::new();
        if e < trunc_order && !c.is_zero() {
            coeffs.insert(e, c);
        }
        FormalSeries { coeffs, min_exp: e.min(trunc_order), trunc_order }
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Pairs at or above
    /// `trunc_order` are discarded; repeated exponents accumulate.
    pub fn from_terms<I>(terms: I, min_exp: HalfExp, trunc_order: HalfExp) -> Result<Self>
    where
        I: IntoIterator<Item = (HalfExp, Rat)>,
    {
        if min_exp > trunc_order {
            return Err(Error::InvalidArgument(format!(
                "min_exp {min_exp} exceeds trunc_order {trunc_order}"
            )));
        }
        let mut coeffs: BTreeMap<HalfExp, Rat> = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc_order {
                continue;
            }
            if e < min_exp {
                if c.is_zero() {
                    continue;
                }
                return Err(Error::InvalidArgument(format!(
                    "term at exponent {e} lies below min_exp {min_exp}"
                )));
            }
            *coeffs.entry(e).or_insert_with(Rat::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(FormalSeries { coeffs, min_exp, trunc_order })
    }

    /// Integer coefficients on the integer-`q` grid, starting at `q^start`.
    pub fn from_q_integers(start: i64, values: &[i64], trunc_order: HalfExp) -> Self {
        let terms = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (HalfExp::q(start + i as i64), rat(v)));
        Self::from_terms(terms, HalfExp::q(start).min(trunc_order), trunc_order)
            .expect("terms are in range by construction")
    }

    pub fn min_exp(&self) -> HalfExp {
        self.min_exp
    }

    pub fn trunc_order(&self) -> HalfExp {
        self.trunc_order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (HalfExp, &Rat)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// The exact coefficient at `e`, or an error if `e` is not below the
    /// truncation order (the value is unknown, not zero).
    pub fn coefficient(&self, e: HalfExp) -> Result<Rat> {
        if e >= self.trunc_order {
            return Err(Error::OutOfRange { exponent: e, trunc_order: self.trunc_order });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero))
    }

    /// Coefficient of `q^n`.
    pub fn coeff_q(&self, n: i64) -> Result<Rat> {
        self.coefficient(HalfExp::q(n))
    }

    /// The first exponent carrying a nonzero coefficient.
    pub fn leading(&self) -> Option<(HalfExp, &Rat)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    /// Raises `min_exp` to the first nonzero exponent. Everything below a
    /// stored coefficient is known exactly, so this loses no information.
    pub fn tighten(mut self) -> Self {
        self.min_exp = match self.coeffs.keys().next() {
            Some(&e) => e,
            None => self.trunc_order,
        };
        self
    }

    /// Forgets everything at or above `order` (no-op if already coarser).
    pub fn truncate(&self, order: HalfExp) -> Self {
        if order >= self.trunc_order {
            return self.clone();
        }
        let coeffs = self.coeffs.range(..order).map(|(e, c)| (*e, c.clone())).collect();
        FormalSeries { coeffs, min_exp: self.min_exp.min(order), trunc_order: order }
    }

    /// Multiplies by `q^{shift/2}`.
    pub fn shift(&self, shift: HalfExp) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
            min_exp: self.min_exp + shift,
            trunc_order: self.trunc_order + shift,
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            let mut z = Self::zero(self.trunc_order);
            z.min_exp = self.min_exp;
            return z;
        }
        FormalSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * s)).collect(),
            min_exp: self.min_exp,
            trunc_order: self.trunc_order,
        }
    }

    pub fn scale_int(&self, s: i64) -> Self {
        self.scale(&rat(s))
    }

    /// Coefficientwise sum on the common exact window.
    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc_order.min(other.trunc_order);
        let mut coeffs: BTreeMap<HalfExp, Rat> =
            self.coeffs.range(..trunc).map(|(e, c)| (*e, c.clone())).collect();
        for (e, c) in other.coeffs.range(..trunc) {
            match coeffs.get_mut(e) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        coeffs.remove(e);
                    }
                }
                None => {
                    coeffs.insert(*e, c.clone());
                }
            }
        }
        let min_exp = self.min_exp.min(other.min_exp).min(trunc);
        FormalSeries { coeffs, min_exp, trunc_order: trunc }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            min_exp: self.min_exp,
            trunc_order: self.trunc_order,
        }
    }

    /// Cauchy product on the half-integer grid.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = (self.trunc_order + other.min_exp).min(other.trunc_order + self.min_exp);
        let min_exp = (self.min_exp + other.min_exp).min(trunc);
        let (a_den, a) = self.integer_terms();
        let (b_den, b) = other.integer_terms();
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e = ea + eb;
                if e >= trunc.0 {
                    break;
                }
                let slot = acc.entry(e).or_insert_with(BigInt::zero);
                *slot += ca * cb;
            }
        }
        let den = a_den * b_den;
        let coeffs = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(e, v)| (HalfExp(e), Rat::new(v, den.clone())))
            .collect();
        FormalSeries { coeffs, min_exp, trunc_order: trunc }
    }

    /// Common denominator and scaled integer numerators, for fast convolution.
    fn integer_terms(&self) -> (BigInt, Vec<(i64, BigInt)>) {
        let den = self.coeffs.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.0, c.numer() * (&den / c.denom())))
            .collect();
        (den, terms)
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Self::one(self.trunc_order - self.min_exp);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    Some(r) => r.mul(&base),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        result.expect("n > 0")
    }

    /// Multiplicative inverse. The coefficient at `min_exp` must be nonzero.
    ///
    /// If `a = c q^m (1 + …)` is known below `T`, the inverse is known below
    /// `T − 2m`.
    pub fn invert(&self) -> Result<Self> {
        let m = self.min_exp;
        let lead = match self.coeffs.get(&m) {
            Some(c) => c.clone(),
            None => {
                return Err(Error::Degenerate(format!(
                    "leading coefficient at exponent {m} is zero"
                )))
            }
        };
        let len = (self.trunc_order.0 - m.0) as usize;
        let a: Vec<Rat> = (0..len)
            .map(|i| self.coeffs.get(&HalfExp(m.0 + i as i64)).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let inv_lead = lead.recip();
        let mut b: Vec<Rat> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                b.push(inv_lead.clone());
                continue;
            }
            let mut s = Rat::zero();
            for k in 1..=n {
                if !a[k].is_zero() && !b[n - k].is_zero() {
                    s += &a[k] * &b[n - k];
                }
            }
            b.push(-(s * &inv_lead));
        }
        let start = -m.0;
        let terms = b.into_iter().enumerate().map(|(i, c)| (HalfExp(start + i as i64), c));
        Self::from_terms(terms, HalfExp(start), HalfExp(start + len as i64))
    }

    /// `self / other` via [`invert`](Self::invert).
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    /// Replaces `q^{1/2}` by `−q^{1/2}`: negates every odd-half-power term.
    pub fn flip_half_powers(&self) -> Self {
        FormalSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, if e.is_integral() { c.clone() } else { -c }))
                .collect(),
            min_exp: self.min_exp,
            trunc_order: self.trunc_order,
        }
    }

    /// First exponent below the common truncation order where the two series
    /// differ, or `None` if they agree on the whole common window.
    pub fn first_difference(&self, other: &Self) -> Option<HalfExp> {
        let diff = self.sub(other);
        diff.leading().map(|(e, _)| e)
    }

    /// Largest absolute coefficient magnitude (0 for the zero series).
    pub fn max_abs(&self) -> Rat {
        self.coeffs.values().map(|c| c.abs()).max().unwrap_or_else(Rat::zero)
    }

    /// Evaluates the exact truncated polynomial at `q^{1/2} = u`.
    pub fn eval_at_sqrt_q(&self, u: &Rat) -> Rat {
        let mut total = Rat::zero();
        for (e, c) in &self.coeffs {
            total += c * pow_rat(u, e.0);
        }
        total
    }
}

/// `u^e` for any integer `e` (u must be nonzero when e < 0).
pub fn pow_rat(u: &Rat, e: i64) -> Rat {
    let base = if e < 0 { u.recip() } else { u.clone() };
    num_traits::pow::pow(base, e.unsigned_abs() as usize)
}

impl<'a> Add for &'a FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: Self) -> FormalSeries {
        FormalSeries::add(self, rhs)
    }
}

impl<'a> Sub for &'a FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: Self) -> FormalSeries {
        FormalSeries::sub(self, rhs)
    }
}

impl<'a> Mul for &'a FormalSeries {
    type Output = FormalSeries;
    fn mul(self, rhs: Self) -> FormalSeries {
        FormalSeries::mul(self, rhs)
    }
}

impl<'a> Neg for &'a FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        FormalSeries::neg(self)
    }
}

fn fmt_power(e: HalfExp) -> String {
    match e.0 {
        0 => String::new(),
        2 => "q".to_string(),
        t if t % 2 == 0 && t > 0 => format!("q^{}", t / 2),
        t if t % 2 == 0 => format!("q^({})", t / 2),
        t => format!("q^({t}/2)"),
    }
}

/// Renders `c₀ + c₁·q^(1/2) + … + O(q^T)` with ascending exponents.
impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let power = fmt_power(*e);
            if power.is_empty() {
                write!(f, "{}", fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{power}")?;
            } else {
                write!(f, "{}·{power}", fmt_rat(&mag))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        let o = match self.trunc_order.0 {
            0 => "1".to_string(),
            _ => fmt_power(self.trunc_order),
        };
        write!(f, " + O({o})")
    }
}
