//! Exact rational polynomials and Sturm root counting.
//!
//! [`sturm_chain`] builds the textbook chain over the rationals. Root counting
//! uses an equivalent chain of primitive integer polynomials (pseudo-remainders
//! with their signs corrected and contents removed), which keeps coefficient
//! growth in check for degrees in the hundreds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::series::{fmt_rat, rat, Rat};

/// `Σ coeffs[i] · uⁱ`, with no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect(),
        )
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rat::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&l.recip()),
            None => a,
        }
    }

    /// `p / gcd(p, p′)`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    /// Divides out `u^v` for the largest such `v`; returns the quotient and `v`.
    pub fn strip_low_power(&self) -> (Self, usize) {
        let v = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (Self::new(self.coeffs[v..].to_vec()), v)
    }

    /// Primitive integer polynomial with the same sign everywhere.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        make_primitive(ints)
    }

    /// SHA-256 of the canonical text form.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    fn canonical_text(&self) -> String {
        self.coeffs.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let m = c.abs();
            match (i, m.is_one()) {
                (0, _) => write!(f, "{}", fmt_rat(&m))?,
                (1, true) => write!(f, "u")?,
                (1, false) => write!(f, "{}·u", fmt_rat(&m))?,
                (_, true) => write!(f, "u^{i}")?,
                (_, false) => write!(f, "{}·u^{i}", fmt_rat(&m))?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Textbook Sturm chain `p, p′, −rem(p, p′), …` ending at the last nonzero
/// remainder (a constant for squarefree `p`, the gcd otherwise).
pub fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    assert!(!p.is_zero(), "Sturm chain of the zero polynomial");
    let mut chain = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
    }
    chain
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn make_primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let g = content(&p);
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Pseudo-remainder `lc(b)^{δ+1} a mod b` with `δ = deg a − deg b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, u32) {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let delta = (a.len() - 1 - db) as u32;
    let mut steps = 0u32;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        steps += 1;
        r.pop();
        r = trim(r);
    }
    // bring the multiplier up to lc(b)^{δ+1}
    let missing = delta + 1 - steps;
    if missing > 0 {
        let f = num_traits::pow(lb.clone(), missing as usize);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    (r, delta + 1)
}

/// Integer polynomials with the same sign pattern as the textbook chain at
/// every point where `p` is nonzero.
///
/// The remainders come from the subresultant sequence, whose divisions are
/// exact, so no content computation is needed after the first two terms.
/// Each element is multiplied by a sign `ε` tracked alongside so that the
/// result is `−rem` up to a positive factor.
fn integer_chain(p: &RatPoly) -> Vec<Vec<BigInt>> {
    let p0 = p.primitive_integer();
    let p1 = p.derivative().primitive_integer();
    let mut chain = vec![p0.clone()];
    if p1.is_empty() {
        return chain;
    }
    chain.push(p1.clone());
    let (mut a, mut b) = (p0, p1);
    let (mut eps_prev, mut eps_cur) = (1i32, 1i32);
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let (r, e) = pseudo_rem(&a, &b);
        if r.is_empty() {
            break;
        }
        let divisor = &g * num_traits::pow(h.clone(), delta as usize);
        let f: Vec<BigInt> = r.into_iter().map(|c| c / &divisor).collect();
        let lb = b.last().expect("nonempty").clone();
        let lead_sign = if lb.is_negative() && e % 2 == 1 { -1 } else { 1 };
        let div_sign = if divisor.is_negative() { -1 } else { 1 };
        let eps_next = -eps_prev * lead_sign * div_sign;
        chain.push(if eps_next < 0 { f.iter().map(|c| -c).collect() } else { f.clone() });
        g = lb;
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => num_traits::pow(g.clone(), d as usize) / num_traits::pow(h, (d - 1) as usize),
        };
        a = std::mem::replace(&mut b, f);
        eps_prev = eps_cur;
        eps_cur = eps_next;
    }
    chain
}

/// Sign of `p(x)` for an integer-coefficient `p` at rational `x`.
fn sign_at(p: &[BigInt], x: &Rat) -> i32 {
    // den^deg · p(num/den) keeps everything integral
    let (num, den) = (x.numer(), x.denom());
    let deg = p.len().saturating_sub(1);
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    let mut terms: Vec<BigInt> = Vec::with_capacity(p.len());
    for _ in 0..p.len() {
        terms.push(den_pow.clone());
        den_pow *= den;
    }
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * num + c * &terms[deg - i];
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn variations(chain: &[Vec<BigInt>], x: &Rat) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = sign_at(p, x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Sign of `p` at `x` (`-1`, `0`, `1`).
pub fn sign_of(p: &RatPoly, x: &Rat) -> i32 {
    let v = p.eval(x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Number of distinct real roots in `(lo, hi)`, erroring if `p` vanishes at
/// either endpoint.
pub fn count_real_roots_strict(p: &RatPoly, lo: &Rat, hi: &Rat) -> Result<usize> {
    if lo >= hi {
        return Err(Error::InvalidArgument(format!("empty interval ({lo}, {hi})")));
    }
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    for x in [lo, hi] {
        if p.eval(x).is_zero() {
            return Err(Error::EndpointRoot(fmt_rat(x)));
        }
    }
    let chain = integer_chain(p);
    Ok(variations(&chain, lo) - variations(&chain, hi))
}

/// Number of distinct real roots in the open interval `(lo, hi)`. Roots at
/// the endpoints are divided out first, so they are not counted.
pub fn count_real_roots(p: &RatPoly, lo: &Rat, hi: &Rat) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let mut q = p.clone();
    for x in [lo, hi] {
        let lin = RatPoly::new(vec![-x.clone(), rat(1)]);
        while q.eval(x).is_zero() {
            q = q.div_rem(&lin).0;
        }
    }
    count_real_roots_strict(&q, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ratio;

    #[test]
    fn textbook_chain() {
        let p = RatPoly::from_ints(&[-1, 0, 1]);
        let chain = sturm_chain(&p);
        assert_eq!(
            chain,
            vec![p.clone(), RatPoly::from_ints(&[0, 2]), RatPoly::from_ints(&[1])]
        );
    }

    #[test]
    fn two_rational_roots() {
        // (u − 1/3)(u − 1/4) = u² − 7/12 u + 1/12
        let p = RatPoly::new(vec![ratio(1, 12), ratio(-7, 12), rat(1)]);
        assert_eq!(count_real_roots(&p, &rat(0), &rat(1)).unwrap(), 2);
        assert_eq!(count_real_roots(&p, &ratio(3, 10), &rat(1)).unwrap(), 1);
    }

    #[test]
    fn no_real_roots() {
        let p = RatPoly::from_ints(&[1, 0, 1]);
        assert_eq!(count_real_roots(&p, &rat(-1000), &rat(1000)).unwrap(), 0);
    }

    #[test]
    fn endpoints_are_excluded() {
        let p = RatPoly::from_ints(&[0, -1, 1]);
        assert_eq!(count_real_roots(&p, &rat(0), &rat(1)).unwrap(), 0);
        assert!(matches!(
            count_real_roots_strict(&p, &ratio(1, 2), &rat(1)),
            Err(Error::EndpointRoot(_))
        ));
        assert!(count_real_roots(&p, &rat(1), &rat(0)).is_err());
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (u − 1/2)³ (u + 2)²
        let a = RatPoly::new(vec![ratio(-1, 2), rat(1)]);
        let b = RatPoly::from_ints(&[2, 1]);
        let p = a.mul(&a).mul(&a).mul(&b).mul(&b);
        assert_eq!(count_real_roots(&p, &rat(-5), &rat(5)).unwrap(), 2);
        assert_eq!(p.squarefree().degree(), Some(2));
    }

    #[test]
    fn integer_chain_agrees_with_textbook() {
        let p = RatPoly::new(vec![ratio(3, 7), rat(-5), ratio(1, 3), rat(4), rat(-2), rat(1)]);
        let textbook = sturm_chain(&p);
        let ints = integer_chain(&p);
        assert_eq!(textbook.len(), ints.len());
        for x in [rat(-3), ratio(-1, 2), rat(0), ratio(2, 5), rat(7)] {
            for (t, i) in textbook.iter().zip(&ints) {
                assert_eq!(sign_of(t, &x), sign_at(i, &x));
            }
        }
    }

    #[test]
    fn strip_and_display() {
        let p = RatPoly::from_ints(&[0, 0, 3, -1]);
        let (q, v) = p.strip_low_power();
        assert_eq!(v, 2);
        assert_eq!(q, RatPoly::from_ints(&[3, -1]));
        assert_eq!(p.to_string(), "-u^3 + 3·u^2");
        assert_eq!(p.hash_hex().len(), 64);
    }
}
