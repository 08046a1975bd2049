//! Certified coefficient-growth bounds `|a_n| ≤ C·(n+1)^k` and the tail sums
//! they control.
//!
//! Bounds compose under products (`C` multiplies, `k = k_a + k_b + 1`) and
//! sums (`C` adds, `k` is the larger exponent). A [`Bounded`] series carries
//! its bound along through the arithmetic used by the certifier.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{self, ThetaKind};
use crate::series::{fmt_rat, rat, ratio, FormalSeries, HalfExp, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grid {
    /// `n` counts powers of `q`.
    Integer,
    /// `n` counts powers of `q^{1/2}`.
    Half,
}

impl Grid {
    fn step(self) -> i64 {
        match self {
            Grid::Integer => 2,
            Grid::Half => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Grid::Integer => "integer",
            Grid::Half => "half",
        }
    }
}

/// `|coefficient of q^{shift + n·step}| ≤ C·(n+1)^k` for all `n ≥ 0`, and no
/// terms below `shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerBound {
    pub c: Rat,
    pub k: u32,
    pub grid: Grid,
    pub shift: HalfExp,
    /// The bound is claimed only for `n ≥ valid_from`.
    pub valid_from: u64,
}

impl PowerBound {
    pub fn new(c: Rat, k: u32, grid: Grid) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument(format!("bound constant {c} must be positive")));
        }
        Ok(PowerBound { c, k, grid, shift: HalfExp(0), valid_from: 0 })
    }

    /// The same bound read on the half-integer grid. Odd half-steps carry
    /// zero coefficients and `(n+1)^k ≤ (2n+1)^k` covers the even ones.
    pub fn promote(&self) -> Self {
        let valid_from = match self.grid {
            Grid::Integer => 2 * self.valid_from,
            Grid::Half => self.valid_from,
        };
        PowerBound { grid: Grid::Half, valid_from, ..self.clone() }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        if a.grid == b.grid {
            (a.clone(), b.clone())
        } else {
            (a.promote(), b.promote())
        }
    }

    pub fn scale(&self, s: &Rat) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::InvalidArgument("cannot scale a bound by zero".into()));
        }
        Ok(PowerBound { c: &self.c * s.abs(), ..self.clone() })
    }

    /// Bound for the series multiplied by `q^{e/2}`.
    pub fn shifted(&self, e: HalfExp) -> Self {
        PowerBound { shift: self.shift + e, ..self.clone() }
    }

    /// Re-indexes from `d` steps above the current shift (for a series whose
    /// terms below that point are known to vanish): `C ↦ C·(d+1)^k`.
    pub fn advance(&self, d: u32) -> Self {
        let f = num_traits::pow(rat(d as i64 + 1), self.k as usize);
        PowerBound {
            c: &self.c * f,
            shift: self.shift + HalfExp(d as i64 * self.grid.step()),
            ..self.clone()
        }
    }

    /// Bound for `q^{-d·step}` times a series with this bound whose terms
    /// start at least `d` steps above `shift`. The shift is kept, and the
    /// bound is claimed from index `n_min` on, using
    /// `(n+d+1)^k ≤ ((n_min+d+1)/(n_min+1))^k (n+1)^k`.
    pub fn lowered_from(&self, d: u32, n_min: u64) -> Self {
        let f = num_traits::pow(
            Rat::new(BigInt::from(n_min + d as u64 + 1), BigInt::from(n_min + 1)),
            self.k as usize,
        );
        PowerBound {
            c: &self.c * f,
            valid_from: self.valid_from.max(n_min),
            ..self.clone()
        }
    }

    /// `C·(n+1)^k`.
    pub fn at(&self, n: u64) -> Rat {
        &self.c * Rat::from_integer(num_traits::pow(BigInt::from(n + 1), self.k as usize))
    }

    pub fn to_json(&self, name: &str) -> Value {
        json!({
            "name": name,
            "C": fmt_rat(&self.c),
            "k": self.k,
            "grid": self.grid.name(),
            "shift": self.shift.twice(),
            "valid_from": self.valid_from,
        })
    }
}

impl fmt::Display for PowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·(n+1)^{} on the {} grid", fmt_rat(&self.c), self.k, self.grid.name())
    }
}

/// Elementary bounds: `E₂: 24(n+1)²`, `E₄: 240(n+1)⁴`, `E₆: 504(n+1)⁶`, and
/// `24(n+1)²` for each theta fourth power on the half-integer grid.
pub fn base_bound(name: &str) -> Result<PowerBound> {
    match name {
        "E2" => PowerBound::new(rat(24), 2, Grid::Integer),
        "E4" => PowerBound::new(rat(240), 4, Grid::Integer),
        "E6" => PowerBound::new(rat(504), 6, Grid::Integer),
        "Theta4" => PowerBound::new(rat(24), 2, Grid::Half),
        _ => Err(Error::UnknownForm(name.to_string())),
    }
}

/// Product rule. Both factors must be bounded from index 0.
pub fn bound_product(a: &PowerBound, b: &PowerBound) -> PowerBound {
    assert!(a.valid_from == 0 && b.valid_from == 0, "product of partial bounds");
    let (a, b) = PowerBound::aligned(a, b);
    PowerBound {
        c: &a.c * &b.c,
        k: a.k + b.k + 1,
        grid: a.grid,
        shift: a.shift + b.shift,
        valid_from: 0,
    }
}

pub fn bound_sum(a: &PowerBound, b: &PowerBound) -> PowerBound {
    let (a, b) = PowerBound::aligned(a, b);
    PowerBound {
        c: &a.c + &b.c,
        k: a.k.max(b.k),
        grid: a.grid,
        shift: a.shift.min(b.shift),
        valid_from: a.valid_from.max(b.valid_from),
    }
}

pub fn bound_pow(a: &PowerBound, n: u32) -> PowerBound {
    assert!(n >= 1);
    let mut r = a.clone();
    for _ in 1..n {
        r = bound_product(&r, a);
    }
    r
}

/// A certified upper bound `value · q^{monomial}` on the absolute sum of the
/// dropped terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailBound {
    pub value: Rat,
    pub monomial: HalfExp,
}

/// Smallest `N` with `((N+2)/(N+1))^k ≤ 3/2`.
fn ratio_knee(k: u32) -> u64 {
    let limit = ratio(3, 2);
    let mut n = 0u64;
    loop {
        let r = num_traits::pow(Rat::new(BigInt::from(n + 2), BigInt::from(n + 1)), k as usize);
        if r <= limit {
            return n;
        }
        n += 1;
    }
}

/// Certified upper bound on `Σ_{n ≥ n0} C(n+1)^k q0^{n − normalize_at}`.
///
/// Terms up to `N = max(n0, N_k)` are summed exactly; the remainder is bounded
/// by a geometric series with ratio `((N+2)/(N+1))^k q0`.
pub fn tail_bound(b: &PowerBound, n0: u64, q0: &Rat, normalize_at: i64) -> Result<TailBound> {
    if !q0.is_positive() {
        return Err(Error::InvalidArgument(format!("q0 = {q0} must be positive")));
    }
    if *q0 >= Rat::one() {
        return Err(Error::Divergent(fmt_rat(q0)));
    }
    if n0 < b.valid_from {
        return Err(Error::InvalidArgument(format!(
            "bound holds only from n = {}, tail requested from {n0}",
            b.valid_from
        )));
    }
    if (n0 as i64) <= normalize_at {
        return Err(Error::InvalidArgument(format!(
            "n0 = {n0} must exceed the normalisation index {normalize_at}"
        )));
    }
    let term = |n: u64| b.at(n) * crate::series::pow_rat(q0, n as i64 - normalize_at);
    let ratio_at = |n: u64| {
        num_traits::pow(Rat::new(BigInt::from(n + 2), BigInt::from(n + 1)), b.k as usize) * q0
    };
    let mut n_end = n0.max(ratio_knee(b.k));
    let mut rho = ratio_at(n_end);
    while rho >= Rat::one() {
        n_end = n_end * 2 + 1;
        if n_end > 1 << 20 {
            return Err(Error::Divergent(fmt_rat(&rho)));
        }
        rho = ratio_at(n_end);
    }
    let mut sum = Rat::zero();
    for n in n0..=n_end {
        sum += term(n);
    }
    sum += term(n_end + 1) / (Rat::one() - rho);
    let monomial = HalfExp(normalize_at * b.grid.step());
    Ok(TailBound { value: sum, monomial })
}

/// Checks `|coefficient| ≤ C(n+1)^k` on every computed coefficient of `s`.
/// Returns the first violating exponent, if any.
pub fn check_empirical(b: &PowerBound, s: &FormalSeries) -> std::result::Result<(), HalfExp> {
    let step = b.grid.step();
    for (e, c) in s.terms() {
        let off = e.twice() - b.shift.twice();
        if off < 0 || off % step != 0 {
            return Err(e);
        }
        let n = (off / step) as u64;
        if n >= b.valid_from && c.abs() > b.at(n) {
            return Err(e);
        }
    }
    Ok(())
}

/// Smallest power of ten `10^m` with `x ≤ 10^m`, as `(10^m, m)`.
pub fn power_of_ten_ceiling(x: &Rat) -> (Rat, i64) {
    let ten = rat(10);
    let mut m = 0i64;
    let mut p = Rat::one();
    if x.is_zero() {
        return (Rat::zero(), i64::MIN);
    }
    while &p < x {
        p *= &ten;
        m += 1;
    }
    while &(&p / &ten) >= x {
        p /= &ten;
        m -= 1;
    }
    (p, m)
}

/// A series together with a certified bound on its coefficients.
#[derive(Clone, Debug)]
pub struct Bounded {
    pub series: FormalSeries,
    pub bound: PowerBound,
}

impl Bounded {
    pub fn new(series: FormalSeries, bound: PowerBound) -> Self {
        Bounded { series, bound }
    }

    pub fn add(&self, other: &Self) -> Self {
        Bounded::new(self.series.add(&other.series), bound_sum(&self.bound, &other.bound))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Bounded::new(self.series.sub(&other.series), bound_sum(&self.bound, &other.bound))
    }

    pub fn scale(&self, s: &Rat) -> Result<Self> {
        Ok(Bounded::new(self.series.scale(s), self.bound.scale(s)?))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Bounded::new(self.series.mul(&other.series), bound_product(&self.bound, &other.bound))
    }

    pub fn neg(&self) -> Self {
        Bounded::new(self.series.neg(), self.bound.clone())
    }

    pub fn truncate(&self, order: HalfExp) -> Self {
        Bounded::new(self.series.truncate(order), self.bound.clone())
    }
}

/// The composite numerator bounds, each derived from the elementary ones by
/// following the defining formula term by term.
#[derive(Clone, Debug)]
pub struct NumeratorBounds {
    pub delta: PowerBound,
    pub delta2: PowerBound,
    /// `−49E₄³ + 25E₆²`.
    pub a_combo: PowerBound,
    pub phi: PowerBound,
    pub phi1: PowerBound,
    pub phi2: PowerBound,
    pub psi_i: PowerBound,
    pub psi_s: PowerBound,
    pub psi_t: PowerBound,
}

impl NumeratorBounds {
    pub fn derive() -> Self {
        let e2 = base_bound("E2").expect("known");
        let e4 = base_bound("E4").expect("known");
        let e6 = base_bound("E6").expect("known");
        let th = base_bound("Theta4").expect("known");
        let s = |b: PowerBound, c: i64| b.scale(&rat(c)).expect("nonzero");

        let e4_2 = bound_product(&e4, &e4);
        let e4_3 = bound_product(&e4_2, &e4);
        let e6_2 = bound_product(&e6, &e6);
        let delta = bound_sum(&e4_3, &e6_2).scale(&ratio(1, 1728)).expect("nonzero");
        let delta2 = bound_product(&delta, &delta);
        let a_combo = bound_sum(&s(e4_3.clone(), 49), &s(e6_2.clone(), 25));
        let e6e4_2 = bound_product(&e6, &e4_2);
        let e2_2 = bound_product(&e2, &e2);

        let phi = [
            s(bound_product(&e6_2, &e4), 49),
            s(bound_product(&e6e4_2, &e2), 48),
            bound_product(&a_combo, &e2_2),
        ]
        .iter()
        .fold(s(bound_product(&e4_3, &e4), 25), |acc, b| bound_sum(&acc, b));
        let phi1 = bound_sum(&s(e6e4_2, 288), &s(bound_product(&e2, &a_combo), 12));
        let phi2 = s(a_combo.clone(), 36);

        // 7x⁵y² ± 7x⁶y + 2x⁷ with every factor a theta fourth power
        let seven = bound_pow(&th, 7);
        let psi = bound_sum(&bound_sum(&s(seven.clone(), 7), &s(seven.clone(), 7)), &s(seven, 2));

        NumeratorBounds {
            delta,
            delta2,
            a_combo,
            phi,
            phi1,
            phi2,
            psi_i: psi.clone(),
            psi_s: psi.clone(),
            psi_t: psi,
        }
    }

    pub fn table(&self) -> Vec<(&'static str, &PowerBound)> {
        vec![
            ("Delta", &self.delta),
            ("Delta2", &self.delta2),
            ("phi_num", &self.phi),
            ("Phi1_num", &self.phi1),
            ("Phi2_num", &self.phi2),
            ("psiI_num", &self.psi_i),
            ("psiS_num", &self.psi_s),
            ("psiT_num", &self.psi_t),
        ]
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.table().into_iter().map(|(n, b)| b.to_json(n)).collect())
    }
}

/// Checks every composite bound against the computed numerators below
/// `order`; returns the names that fail.
pub fn check_numerator_bounds(order: HalfExp) -> Result<Vec<String>> {
    let nb = NumeratorBounds::derive();
    let num = forms::Numerators::build(order)?;
    let d = forms::delta(order)?;
    let pairs: [(&str, &PowerBound, &FormalSeries); 8] = [
        ("Delta", &nb.delta, &d),
        ("Delta2", &nb.delta2, &num.delta2),
        ("phi_num", &nb.phi, &num.phi),
        ("Phi1_num", &nb.phi1, &num.phi1),
        ("Phi2_num", &nb.phi2, &num.phi2),
        ("psiI_num", &nb.psi_i, &num.psi_i),
        ("psiS_num", &nb.psi_s, &num.psi_s),
        ("psiT_num", &nb.psi_t, &num.psi_t),
    ];
    Ok(pairs
        .iter()
        .filter(|(_, b, s)| check_empirical(b, s).is_err())
        .map(|(n, _, _)| n.to_string())
        .collect())
}

/// The theta bound also covers each individual theta fourth power.
pub fn check_theta_bounds(order: HalfExp) -> Result<bool> {
    let b = base_bound("Theta4")?;
    for kind in [ThetaKind::T00, ThetaKind::T01, ThetaKind::T10] {
        if check_empirical(&b, &forms::theta4(kind, order)?).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}
