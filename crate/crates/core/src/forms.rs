//! Eisenstein series, theta fourth powers, the discriminant and the
//! quasimodular forms built from them.
//!
//! Forms that involve `π` or `i` are stored as a [`PiSeries`], a rational
//! series together with explicit powers of `π` and `i`.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::series::{fmt_rat, rat, ratio, FormalSeries, HalfExp, Rat};

/// `body · π^pi_power · i^i_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiSeries {
    pub body: FormalSeries,
    pub pi_power: i32,
    pub i_power: u8,
}

impl PiSeries {
    pub fn new(body: FormalSeries, pi_power: i32, i_power: i32) -> Self {
        PiSeries { body, pi_power, i_power: i_power.rem_euclid(4) as u8 }
    }

    /// A series with no `π` or `i` factor.
    pub fn plain(body: FormalSeries) -> Self {
        Self::new(body, 0, 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            self.body.mul(&other.body),
            self.pi_power + other.pi_power,
            self.i_power as i32 + other.i_power as i32,
        )
    }

    pub fn truncate(&self, order: HalfExp) -> Self {
        PiSeries { body: self.body.truncate(order), ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.body.terms().map(|(e, c)| json!([e.twice(), fmt_rat(c)])).collect();
        json!({
            "terms": terms,
            "min_exp": self.body.min_exp().twice(),
            "trunc_order": self.body.trunc_order().twice(),
            "pi_power": self.pi_power,
            "i_power": self.i_power,
        })
    }
}

/// `1 + (2/ζ(1−k)) Σ σ_{k−1}(n) qⁿ` for `k ∈ {2, 4, 6}`.
pub fn eisenstein(k: u32, order: HalfExp) -> Result<FormalSeries> {
    let c: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => return Err(Error::UnsupportedWeight(k)),
    };
    positive_order(order)?;
    let n_max = (order.twice() - 1).div_euclid(2);
    let sigma = divisor_sums(k - 1, n_max as usize);
    let mut values = vec![1i64];
    values.extend(sigma[1..].iter().map(|s| c * s));
    Ok(FormalSeries::from_q_integers(0, &values, order))
}

/// `σ_p(n)` for `0 ≤ n ≤ n_max` (with `σ_p(0) = 0`).
fn divisor_sums(p: u32, n_max: usize) -> Vec<i64> {
    let mut s = vec![0i64; n_max + 1];
    for d in 1..=n_max {
        let dp = (d as i64).pow(p);
        for m in (d..=n_max).step_by(d) {
            s[m] += dp;
        }
    }
    s
}

fn positive_order(order: HalfExp) -> Result<()> {
    if order.twice() <= 0 {
        return Err(Error::InvalidArgument(format!("order {order} must be positive")));
    }
    Ok(())
}

/// `Δ = (E₄³ − E₆²)/1728`, tightened so that `min_exp = 1`.
pub fn delta(order: HalfExp) -> Result<FormalSeries> {
    let e4 = eisenstein(4, order)?;
    let e6 = eisenstein(6, order)?;
    Ok(e4.pow(3).sub(&e6.pow(2)).scale(&ratio(1, 1728)).tighten())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    T00,
    T01,
    T10,
}

impl std::str::FromStr for ThetaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(ThetaKind::T00),
            "01" => Ok(ThetaKind::T01),
            "10" => Ok(ThetaKind::T10),
            _ => Err(Error::UnknownForm(format!("theta{s}"))),
        }
    }
}

/// Number of ordered `(x₁,…,x₄) ∈ S⁴` with `Σ xᵢ² = n` for `n ≤ n_max`, where
/// `S` is all integers (`odd = false`) or all odd integers (`odd = true`).
fn four_square_counts(n_max: usize, odd: bool) -> Vec<i64> {
    let mut one = vec![0i64; n_max + 1];
    let mut x = 0usize;
    while x * x <= n_max {
        if !odd || x % 2 == 1 {
            one[x * x] += if x == 0 { 1 } else { 2 };
        }
        x += 1;
    }
    let conv = |a: &[i64], b: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; n_max + 1];
        for (i, &ai) in a.iter().enumerate().filter(|(_, v)| **v != 0) {
            for (j, &bj) in b[..=n_max - i].iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    };
    let two = conv(&one, &one);
    conv(&two, &two)
}

/// Fourth power of a Jacobi theta series on the `q^{1/2}` grid.
pub fn theta4(kind: ThetaKind, order: HalfExp) -> Result<FormalSeries> {
    positive_order(order)?;
    let top = (order.twice() - 1) as usize;
    let terms: Vec<(HalfExp, Rat)> = match kind {
        ThetaKind::T00 | ThetaKind::T01 => {
            let r = four_square_counts(top, false);
            r.iter()
                .enumerate()
                .map(|(m, &c)| {
                    let sign = if kind == ThetaKind::T01 && m % 2 == 1 { -1 } else { 1 };
                    (HalfExp(m as i64), rat(sign * c))
                })
                .collect()
        }
        ThetaKind::T10 => {
            // Θ₁₀⁴ = Σ q^{(x₁²+…+x₄²)/8} over odd xᵢ; the sum is 4m with m odd
            let r = four_square_counts(4 * top, true);
            (0..=top).map(|m| (HalfExp(m as i64), rat(r[4 * m]))).collect()
        }
    };
    FormalSeries::from_terms(terms, HalfExp(0), order)
}

/// Numerators of the forms over `Δ²`, together with `Δ²` itself.
#[derive(Clone, Debug)]
pub struct Numerators {
    pub delta2: FormalSeries,
    /// `Δ² φ`.
    pub phi: FormalSeries,
    /// `Δ² · (π/i) φ₁`.
    pub phi1: FormalSeries,
    /// `Δ² · π² φ₂`.
    pub phi2: FormalSeries,
    pub psi_i: FormalSeries,
    pub psi_s: FormalSeries,
    pub psi_t: FormalSeries,
}

impl Numerators {
    /// All numerators, exact below `order`.
    pub fn build(order: HalfExp) -> Result<Self> {
        positive_order(order)?;
        let e2 = eisenstein(2, order)?;
        let e4 = eisenstein(4, order)?;
        let e6 = eisenstein(6, order)?;
        let d = delta(order)?;
        let (phi, phi1, phi2) = phi_numerators(&e2, &e4, &e6);
        let t00 = theta4(ThetaKind::T00, order)?;
        let t01 = theta4(ThetaKind::T01, order)?;
        let t10 = theta4(ThetaKind::T10, order)?;
        let (psi_i, psi_s, psi_t) = psi_numerators(&t00, &t01, &t10);
        let cut = |s: FormalSeries| s.truncate(order).tighten();
        Ok(Numerators {
            delta2: cut(d.pow(2)),
            phi: cut(phi),
            phi1: cut(phi1),
            phi2: cut(phi2),
            psi_i: cut(psi_i),
            psi_s: cut(psi_s),
            psi_t: cut(psi_t),
        })
    }
}

fn phi_numerators(
    e2: &FormalSeries,
    e4: &FormalSeries,
    e6: &FormalSeries,
) -> (FormalSeries, FormalSeries, FormalSeries) {
    let e4_2 = e4.pow(2);
    let e6_2 = e6.pow(2);
    let a = e4_2.mul(e4).scale_int(-49).add(&e6_2.scale_int(25));
    let e6e4_2 = e6.mul(&e4_2);
    let phi = e4_2
        .pow(2)
        .scale_int(25)
        .sub(&e6_2.mul(e4).scale_int(49))
        .add(&e6e4_2.mul(e2).scale_int(48))
        .add(&a.mul(&e2.pow(2)));
    let phi1 = e6e4_2.scale_int(-288).sub(&e2.mul(&a).scale_int(12));
    let phi2 = a.scale_int(-36);
    (phi, phi1, phi2)
}

fn psi_numerators(
    t00: &FormalSeries,
    t01: &FormalSeries,
    t10: &FormalSeries,
) -> (FormalSeries, FormalSeries, FormalSeries) {
    // 7 x⁵y² ± 7 x⁶y + 2 x⁷ in the fourth powers x, y
    let combo = |x: &FormalSeries, y: &FormalSeries, middle: i64| {
        let x5 = x.pow(5);
        let x6 = x5.mul(x);
        x5.mul(&y.pow(2))
            .scale_int(7)
            .add(&x6.mul(y).scale_int(middle))
            .add(&x6.mul(x).scale_int(2))
    };
    let psi_i = combo(t01, t10, 7);
    let psi_s = combo(t10, t01, 7).neg();
    let psi_t = combo(t00, t10, -7);
    (psi_i, psi_s, psi_t)
}

#[derive(Clone, Debug)]
pub struct PhiFamily {
    pub phi: FormalSeries,
    pub phi1: PiSeries,
    pub phi2: PiSeries,
}

#[derive(Clone, Debug)]
pub struct PsiFamily {
    pub psi_i: FormalSeries,
    pub psi_s: FormalSeries,
    pub psi_t: FormalSeries,
}

/// Working order for numerators so that division by `Δ²` stays exact below
/// `order`.
fn numerator_order(order: HalfExp) -> HalfExp {
    order + HalfExp::q(3)
}

fn over_delta2(num: &FormalSeries, inv_d2: &FormalSeries, order: HalfExp) -> FormalSeries {
    num.clone().tighten().mul(inv_d2).truncate(order)
}

/// `φ`, `φ₁ = (i/π)Φ₁`, `φ₂ = Φ₂/π²`, exact below `order`.
pub fn phi_family(order: HalfExp) -> Result<PhiFamily> {
    positive_order(order)?;
    let n = numerator_order(order);
    let (e2, e4, e6) = (eisenstein(2, n)?, eisenstein(4, n)?, eisenstein(6, n)?);
    let inv = delta(n)?.pow(2).invert()?;
    let (phi, phi1, phi2) = phi_numerators(&e2, &e4, &e6);
    Ok(PhiFamily {
        phi: over_delta2(&phi, &inv, order),
        phi1: PiSeries::new(over_delta2(&phi1, &inv, order), -1, 1),
        phi2: PiSeries::new(over_delta2(&phi2, &inv, order), -2, 0),
    })
}

/// `ψ_I, ψ_S, ψ_T`, exact below `order`.
pub fn psi_family(order: HalfExp) -> Result<PsiFamily> {
    positive_order(order)?;
    let n = numerator_order(order);
    let t00 = theta4(ThetaKind::T00, n)?;
    let t01 = theta4(ThetaKind::T01, n)?;
    let t10 = theta4(ThetaKind::T10, n)?;
    let inv = delta(n)?.pow(2).invert()?;
    let (psi_i, psi_s, psi_t) = psi_numerators(&t00, &t01, &t10);
    Ok(PsiFamily {
        psi_i: over_delta2(&psi_i, &inv, order),
        psi_s: over_delta2(&psi_s, &inv, order),
        psi_t: over_delta2(&psi_t, &inv, order),
    })
}

pub const FORM_NAMES: [&str; 13] = [
    "E2", "E4", "E6", "Delta", "Th00_4", "Th01_4", "Th10_4", "phi", "Phi1", "Phi2", "psiI", "psiS",
    "psiT",
];

/// Every named form at a common truncation order.
#[derive(Clone, Debug)]
pub struct FormCatalog {
    pub order: HalfExp,
    pub entries: BTreeMap<String, PiSeries>,
}

impl FormCatalog {
    pub fn build(order: HalfExp) -> Result<Self> {
        positive_order(order)?;
        let phi = phi_family(order)?;
        let psi = psi_family(order)?;
        let mut entries = BTreeMap::new();
        let mut put = |name: &str, s: PiSeries| {
            entries.insert(name.to_string(), s.truncate(order));
        };
        put("E2", PiSeries::plain(eisenstein(2, order)?));
        put("E4", PiSeries::plain(eisenstein(4, order)?));
        put("E6", PiSeries::plain(eisenstein(6, order)?));
        put("Delta", PiSeries::plain(delta(order)?));
        put("Th00_4", PiSeries::plain(theta4(ThetaKind::T00, order)?));
        put("Th01_4", PiSeries::plain(theta4(ThetaKind::T01, order)?));
        put("Th10_4", PiSeries::plain(theta4(ThetaKind::T10, order)?));
        put("phi", PiSeries::plain(phi.phi));
        put("Phi1", phi.phi1);
        put("Phi2", phi.phi2);
        put("psiI", PiSeries::plain(psi.psi_i));
        put("psiS", PiSeries::plain(psi.psi_s));
        put("psiT", PiSeries::plain(psi.psi_t));
        Ok(FormCatalog { order, entries })
    }

    pub fn get(&self, name: &str) -> Result<&PiSeries> {
        self.entries.get(name).ok_or_else(|| Error::UnknownForm(name.to_string()))
    }

    fn body(&self, name: &str) -> Result<&FormalSeries> {
        Ok(&self.get(name)?.body)
    }

    pub fn to_json(&self) -> Value {
        let forms: serde_json::Map<String, Value> =
            self.entries.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        json!({ "order": self.order.twice(), "forms": forms })
    }

    /// SHA-256 of each form's JSON encoding.
    pub fn hashes(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, v)| (k.clone(), hex::encode(Sha256::digest(v.to_json().to_string().as_bytes()))))
            .collect()
    }

    /// Adds `delta` to the coefficient of `q^{e/2}` in one form.
    pub fn perturb(&mut self, name: &str, e: HalfExp, delta: &Rat) -> Result<()> {
        let order = self.order;
        let entry = self.entries.get_mut(name).ok_or_else(|| Error::UnknownForm(name.to_string()))?;
        if e >= order {
            return Err(Error::OutOfRange { exponent: e, trunc_order: order });
        }
        entry.body = entry.body.add(&FormalSeries::monomial(delta.clone(), e, entry.body.trunc_order()));
        Ok(())
    }
}

/// Checks that each catalog quotient equals its numerator divided by `Δ²`
/// on the whole catalog window. The numerators must reach at least four
/// orders beyond the catalog.
pub fn numerator_consistency(catalog: &FormCatalog, num: &Numerators) -> Result<Vec<IdentityCheck>> {
    let need = catalog.order + HalfExp::q(4);
    if num.delta2.trunc_order() < need {
        return Err(Error::InvalidArgument(format!(
            "numerators known below {} but {need} is needed",
            num.delta2.trunc_order()
        )));
    }
    let inv = num.delta2.invert()?;
    let pairs: [(&'static str, &str, &FormalSeries); 6] = [
        ("phi_over_delta2", "phi", &num.phi),
        ("Phi1_over_delta2", "Phi1", &num.phi1),
        ("Phi2_over_delta2", "Phi2", &num.phi2),
        ("psiI_over_delta2", "psiI", &num.psi_i),
        ("psiS_over_delta2", "psiS", &num.psi_s),
        ("psiT_over_delta2", "psiT", &num.psi_t),
    ];
    let mut out = Vec::new();
    for (label, name, numerator) in pairs {
        let quotient = numerator.mul(&inv);
        let body = catalog.body(name)?;
        debug_assert!(quotient.trunc_order() >= body.trunc_order());
        let first_offending = body.first_difference(&quotient);
        out.push(IdentityCheck { name: label, passed: first_offending.is_none(), first_offending });
    }
    Ok(out)
}

/// `q·d/dq`.
fn q_derivative(s: &FormalSeries) -> FormalSeries {
    let terms = s.terms().map(|(e, c)| (e, c * e.as_rat())).collect::<Vec<_>>();
    FormalSeries::from_terms(terms, s.min_exp(), s.trunc_order()).expect("same support")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First exponent at which the two sides disagree.
    pub first_offending: Option<HalfExp>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the structural identities of the catalog exactly on its window,
/// including Ramanujan's `12·q·dE₂/dq = E₂² − E₄`.
pub fn verify_identities(catalog: &FormCatalog) -> Result<IdentityReport> {
    let e2 = catalog.body("E2")?;
    let e4 = catalog.body("E4")?;
    let e6 = catalog.body("E6")?;
    let d = catalog.body("Delta")?;
    let psi_i = catalog.body("psiI")?;
    let psi_s = catalog.body("psiS")?;
    let psi_t = catalog.body("psiT")?;

    let compare = |name: &'static str, lhs: &FormalSeries, rhs: &FormalSeries| {
        let first_offending = lhs.first_difference(rhs);
        IdentityCheck { name, passed: first_offending.is_none(), first_offending }
    };
    let delta_rhs = e4.pow(3).sub(&e6.pow(2)).scale(&ratio(1, 1728));
    let jacobi_lhs = catalog.body("Th01_4")?.add(catalog.body("Th10_4")?);
    let (phi_num, _, _) = phi_numerators(e2, e4, e6);
    let phi_lhs = catalog.body("phi")?.mul(&d.pow(2));

    Ok(IdentityReport {
        checks: vec![
            compare("delta", d, &delta_rhs),
            compare("jacobi", &jacobi_lhs, catalog.body("Th00_4")?),
            compare("psi_sum", &psi_s.add(psi_t), psi_i),
            compare("phi_numerator", &phi_lhs, &phi_num),
            compare("psi_flip", psi_t, &psi_i.flip_half_powers()),
            compare("ramanujan_e2", &q_derivative(e2).scale_int(12), &e2.pow(2).sub(e4)),
        ],
    })
}

/// True if every coefficient of `s` with exponent in `[from, s.trunc_order)`
/// satisfies `pred`, counting absent coefficients as zero.
pub fn all_coefficients(s: &FormalSeries, from: HalfExp, pred: impl Fn(&Rat) -> bool) -> bool {
    (from.twice()..s.trunc_order().twice())
        .all(|t| s.coefficient(HalfExp(t)).map(|c| pred(&c)).unwrap_or(false))
}

/// True if every integer-exponent coefficient in `[from, trunc)` is negative.
pub fn integer_coefficients_negative(s: &FormalSeries, from: i64) -> bool {
    (from..)
        .map(HalfExp::q)
        .take_while(|e| *e < s.trunc_order())
        .all(|e| s.coefficient(e).map(|c| c.is_negative()).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(s: &FormalSeries, twice: impl IntoIterator<Item = i64>) -> Vec<Rat> {
        twice.into_iter().map(|t| s.coefficient(HalfExp(t)).unwrap()).collect()
    }

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    /// σ by trial division, independent of the sieve.
    fn sigma(p: u32, n: i64) -> i64 {
        (1..=n).filter(|d| n % d == 0).map(|d| d.pow(p)).sum()
    }

    #[test]
    fn eisenstein_against_divisor_sums() {
        let o = HalfExp::q(12);
        for (k, c) in [(2u32, -24i64), (4, 240), (6, -504)] {
            let e = eisenstein(k, o).unwrap();
            assert_eq!(e.coeff_q(0).unwrap(), rat(1));
            for n in 1..12 {
                assert_eq!(e.coeff_q(n).unwrap(), rat(c * sigma(k - 1, n)), "E{k} at q^{n}");
            }
        }
        let e4 = eisenstein(4, o).unwrap();
        assert_eq!(coeffs(&e4, [2, 4]), ints(&[240, 2160]));
        let e2 = eisenstein(2, o).unwrap();
        assert_eq!(coeffs(&e2, [2, 4]), ints(&[-24, -72]));
        assert!(matches!(eisenstein(8, o), Err(Error::UnsupportedWeight(8))));
    }

    #[test]
    fn delta_prefix() {
        let d = delta(HalfExp::q(8)).unwrap();
        assert_eq!(d.coeff_q(0).unwrap(), rat(0));
        assert_eq!(coeffs(&d, [2, 4, 6, 8]), ints(&[1, -24, 252, -1472]));
        assert_eq!(d.min_exp(), HalfExp::q(1));
    }

    #[test]
    fn delta_matches_product_formula() {
        // q Π (1 − qⁿ)²⁴ as an independent oracle
        let t = HalfExp::q(10);
        let mut p = FormalSeries::one(t);
        for n in 1..10 {
            let f = FormalSeries::from_terms(
                [(HalfExp(0), rat(1)), (HalfExp::q(n), rat(-1))],
                HalfExp(0),
                t,
            )
            .unwrap();
            p = p.mul(&f.pow(24));
        }
        let p = p.shift(HalfExp::q(1)).truncate(t);
        assert_eq!(delta(t).unwrap().first_difference(&p), None);
    }

    /// Brute-force four-square count with an optional parity sign.
    fn r4(m: i64, signed: bool) -> i64 {
        let b = (m as f64).sqrt() as i64 + 1;
        let mut total = 0;
        for a in -b..=b {
            for c in -b..=b {
                for d in -b..=b {
                    let rest = m - a * a - c * c - d * d;
                    if rest < 0 {
                        continue;
                    }
                    let e = (rest as f64).sqrt().round() as i64;
                    if e * e == rest {
                        let mult = if e == 0 { 1 } else { 2 };
                        let sign =
                            if signed && (a + c + d + e).rem_euclid(2) == 1 { -1 } else { 1 };
                        total += sign * mult;
                    }
                }
            }
        }
        total
    }

    #[test]
    fn theta_fourth_powers_against_brute_force() {
        let o = HalfExp(16);
        let t00 = theta4(ThetaKind::T00, o).unwrap();
        let t01 = theta4(ThetaKind::T01, o).unwrap();
        for m in 0..16 {
            assert_eq!(t00.coefficient(HalfExp(m)).unwrap(), rat(r4(m, false)));
            assert_eq!(t01.coefficient(HalfExp(m)).unwrap(), rat(r4(m, true)));
        }
        assert_eq!(coeffs(&t00, 0..4), ints(&[1, 8, 24, 32]));
        assert_eq!(coeffs(&t01, 0..4), ints(&[1, -8, 24, -32]));
        let t10 = theta4(ThetaKind::T10, o).unwrap();
        assert_eq!(coeffs(&t10, 0..4), ints(&[0, 16, 0, 64]));
        assert_eq!(t00.sub(&t10).first_difference(&t01), None);
    }

    #[test]
    fn phi_family_pinned() {
        let f = phi_family(HalfExp::q(4)).unwrap();
        assert_eq!(coeffs(&f.phi, [0, 2, 4, 6]), ints(&[0, -3657830400, -314573414400, -13716864000000]));
        assert_eq!(coeffs(&f.phi1.body, [-2, 0, 2]), ints(&[725760, 113218560, 19691320320]));
        assert_eq!((f.phi1.pi_power, f.phi1.i_power), (-1, 1));
        assert_eq!(
            coeffs(&f.phi2.body, [-4, -2, 0, 2]),
            ints(&[864, 2218752, 223140096, 23368117248])
        );
        assert_eq!((f.phi2.pi_power, f.phi2.i_power), (-2, 0));
        assert_eq!(f.phi.trunc_order(), HalfExp::q(4));
    }

    #[test]
    fn psi_family_pinned() {
        let f = psi_family(HalfExp::q(2)).unwrap();
        assert_eq!(
            coeffs(&f.psi_i, [-4, -2, 0, 1, 2, 3]),
            ints(&[2, -464, 172128, -3670016, 47238464, -459276288])
        );
        assert_eq!(coeffs(&f.psi_s, [1, 3]), ints(&[-7340032, -918552576]));
        assert_eq!(coeffs(&f.psi_t, [-4, -2, 0, 1]), ints(&[2, -464, 172128, 3670016]));
    }

    #[test]
    fn catalog_identities_and_fault() {
        let mut cat = FormCatalog::build(HalfExp::q(6)).unwrap();
        let report = verify_identities(&cat).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert_eq!(report.checks.len(), 6);
        for s in cat.entries.values() {
            assert_eq!(s.body.trunc_order(), HalfExp::q(6));
        }

        let psi_s = cat.entries.get_mut("psiS").unwrap();
        let bump = FormalSeries::monomial(rat(1), HalfExp(1), psi_s.body.trunc_order());
        psi_s.body = psi_s.body.add(&bump);
        let report = verify_identities(&cat).unwrap();
        let sum = report.check("psi_sum").unwrap();
        assert!(!sum.passed);
        assert_eq!(sum.first_offending, Some(HalfExp(1)));
        assert!(report.check("jacobi").unwrap().passed);
    }

    #[test]
    fn small_catalog_passes() {
        let cat = FormCatalog::build(HalfExp::q(3)).unwrap();
        assert!(verify_identities(&cat).unwrap().all_passed());
        assert!(matches!(cat.get("nope"), Err(Error::UnknownForm(_))));
    }

    #[test]
    fn catalog_json_shape() {
        let cat = FormCatalog::build(HalfExp::q(2)).unwrap();
        let v = cat.to_json();
        assert_eq!(v["order"], 4);
        assert_eq!(v["forms"]["Phi1"]["pi_power"], -1);
        assert_eq!(v["forms"]["Phi1"]["i_power"], 1);
        assert_eq!(v["forms"]["Delta"]["terms"][0], json!([2, "1"]));
        assert_eq!(v["forms"].as_object().unwrap().len(), FORM_NAMES.len());
    }

    #[test]
    fn observations() {
        let o = HalfExp::q(20);
        let psi = psi_family(o).unwrap();
        for (e, _) in psi.psi_s.terms() {
            assert!(!e.is_integral(), "psiS has an integer-power term at {e}");
        }
        let nonneg = |c: &Rat| !c.is_negative();
        assert!(all_coefficients(&theta4(ThetaKind::T00, o).unwrap(), HalfExp(0), nonneg));
        assert!(all_coefficients(&theta4(ThetaKind::T10, o).unwrap(), HalfExp(0), nonneg));
        let phi = phi_family(o).unwrap().phi;
        assert!(integer_coefficients_negative(&phi, 1));
    }

    #[test]
    fn numerators_consistent_with_quotients() {
        let o = HalfExp::q(8);
        let n = Numerators::build(o).unwrap();
        let f = phi_family(o).unwrap();
        let p = psi_family(o).unwrap();
        assert_eq!(f.phi.mul(&n.delta2).first_difference(&n.phi), None);
        assert_eq!(f.phi1.body.mul(&n.delta2).first_difference(&n.phi1), None);
        assert_eq!(f.phi2.body.mul(&n.delta2).first_difference(&n.phi2), None);
        assert_eq!(p.psi_s.mul(&n.delta2).first_difference(&n.psi_s), None);
        assert_eq!(n.phi.min_exp(), HalfExp::q(3));
    }
}
