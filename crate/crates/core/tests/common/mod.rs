//! Shared helpers for the integration tests: an independent real-root counter
//! (Descartes' rule of signs with bisection) and random polynomial generators.

#![allow(dead_code)]

use leech24_core::series::{rat, ratio};
use leech24_core::sturm::RatPoly;
use leech24_core::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

type Coeffs = Vec<Rat>;

fn trim(mut c: Coeffs) -> Coeffs {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

/// Scales to coprime integer coefficients; roots are unchanged.
fn primitive(c: Coeffs) -> Coeffs {
    let c = trim(c);
    let mut den = BigInt::one();
    for a in &c {
        den = den.lcm(a.denom());
    }
    let mut num = BigInt::zero();
    for a in &c {
        num = num.gcd(&(a * Rat::from_integer(den.clone())).to_integer());
    }
    if num.is_zero() {
        return c;
    }
    let s = Rat::new(den, num);
    c.into_iter().map(|a| a * &s).collect()
}

fn eval(c: &[Rat], x: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, a| acc * x + a)
}

fn derivative(c: &[Rat]) -> Coeffs {
    c.iter().enumerate().skip(1).map(|(i, a)| a * rat(i as i64)).collect()
}

fn rem(a: &[Rat], b: &[Rat]) -> Coeffs {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let f = &r[k] / &lb;
        for (i, bi) in b.iter().enumerate() {
            r[k - db + i] -= &f * bi;
        }
        r = trim(r);
    }
    trim(r)
}

fn quo(a: &[Rat], b: &[Rat]) -> Coeffs {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![];
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let f = &r[k] / &b[db];
        for (i, bi) in b.iter().enumerate() {
            r[k - db + i] -= &f * bi;
        }
        q[k - db] = f;
    }
    trim(q)
}

fn gcd(a: &[Rat], b: &[Rat]) -> Coeffs {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = primitive(rem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// `p / gcd(p, p')`: the same real roots, each simple.
fn squarefree(c: &[Rat]) -> Coeffs {
    let d = derivative(c);
    if d.is_empty() {
        return c.to_vec();
    }
    let g = gcd(c, &d);
    if g.len() <= 1 {
        c.to_vec()
    } else {
        quo(c, &g)
    }
}

/// Coefficients of `p(lo + (hi − lo)·y)`.
fn to_unit(c: &[Rat], lo: &Rat, hi: &Rat) -> Coeffs {
    let w = hi - lo;
    // Horner with polynomial arithmetic
    let mut acc: Coeffs = vec![];
    for a in c.iter().rev() {
        let mut next = vec![Rat::zero(); acc.len() + 1];
        for (i, v) in acc.iter().enumerate() {
            next[i] += v * lo;
            next[i + 1] += v * &w;
        }
        next[0] += a;
        acc = next;
    }
    trim(acc)
}

/// Sign variations of `(1 + z)^n p(1/(1 + z))`, an upper bound on the number of
/// roots of `p` in `(0, 1)` with the same parity.
fn descartes_unit(c: &[Rat]) -> usize {
    let n = c.len() - 1;
    // reverse, then Taylor shift by 1
    let mut r: Coeffs = c.iter().rev().cloned().collect();
    for i in 0..n {
        for j in (i..n).rev() {
            let t = r[j + 1].clone();
            r[j] += t;
        }
    }
    let signs: Vec<bool> = r.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn count_unit(c: &[Rat], depth: u32) -> usize {
    assert!(depth < 200, "bisection did not terminate");
    if c.len() <= 1 {
        return 0;
    }
    match descartes_unit(c) {
        0 => 0,
        1 => 1,
        _ => {
            let half = ratio(1, 2);
            let mid_root = eval(c, &half).is_zero() as usize;
            let left = primitive(to_unit(c, &Rat::zero(), &half));
            let right = primitive(to_unit(c, &half, &Rat::one()));
            mid_root + count_unit(&left, depth + 1) + count_unit(&right, depth + 1)
        }
    }
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn oracle_count(p: &RatPoly, lo: &Rat, hi: &Rat) -> usize {
    let c = primitive(squarefree(&primitive(p.coeffs().to_vec())));
    count_unit(&primitive(to_unit(&c, lo, hi)), 0)
}

pub fn random_rat<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rat {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Either a dense polynomial with small integer coefficients or a product of
/// linear and quadratic factors with rational roots, some repeated.
pub fn random_poly<R: Rng>(rng: &mut R, max_degree: usize) -> RatPoly {
    if rng.gen_bool(0.5) {
        let d = rng.gen_range(1..=max_degree);
        let mut c: Vec<Rat> = (0..=d).map(|_| rat(rng.gen_range(-20..=20))).collect();
        if c[d].is_zero() {
            c[d] = rat(1);
        }
        RatPoly::new(c)
    } else {
        let mut p = RatPoly::from_ints(&[rng.gen_range(1..=5)]);
        while p.degree().unwrap_or(0) + 2 <= max_degree && rng.gen_bool(0.85) {
            let f = if rng.gen_bool(0.7) {
                RatPoly::new(vec![-random_rat(rng, 12, 8), rat(1)])
            } else {
                // x² + b x + c, roots real or complex
                RatPoly::new(vec![random_rat(rng, 9, 4), random_rat(rng, 9, 4), rat(1)])
            };
            let times = if rng.gen_bool(0.2) { 2 } else { 1 };
            for _ in 0..times {
                if p.degree().unwrap_or(0) + f.degree().unwrap() <= max_degree {
                    p = p.mul(&f);
                }
            }
        }
        p
    }
}

/// A random interval `(lo, hi)` with `lo < hi`.
pub fn random_interval<R: Rng>(rng: &mut R) -> (Rat, Rat) {
    loop {
        let a = random_rat(rng, 16, 6);
        let b = random_rat(rng, 16, 6);
        if a < b {
            return (a, b);
        }
        if b < a {
            return (b, a);
        }
    }
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}
