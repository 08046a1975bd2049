//! High-precision evaluation of the eigenfunctions `a`, `b`, the auxiliary
//! function `f = (π/113218560)·v_a + (1/(262080π))·v_b` (with `a = i·v_a`,
//! `b = i·v_b`) and its Fourier transform, plus exact special values and a
//! numerical Hankel-transform check of the eigenfunction property.
//!
//! Everything is computed as a function of `s = r²`. Writing
//! `v(s) = ±4 sin²(πs/2)·∫₀^∞ (F(t) − L(t)) e^{−πst} dt + (kernel)`, where `L`
//! is the growing part of the integrand, the integral is split at `t = 1`:
//!
//! * on `[1, ∞)` the remainder `F − L` is a convergent sum of terms
//!   `c·π^p·t^j·e^{−πmt}`, integrated in closed form;
//! * on `(0, 1]` the substitution `t = 1/τ` turns the integrand into a rapidly
//!   decaying function of `τ ∈ [1, ∞)`, integrated by double-exponential
//!   quadrature;
//! * the growing part contributes `∫₁^∞ L(t) e^{−πst} dt`, whose poles at
//!   `s ∈ {0, 2, 4}` are cancelled analytically against the double zeros of
//!   `sin²(πs/2)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{phi_family, psi_family};
use crate::real::{bits_for_digits, Real};
use crate::series::{fmt_rat, pow_rat, rat, ratio, FormalSeries, HalfExp, Rat};

/// `v_a` carries `π/113218560` in `f`, `v_b` carries `1/(262080π)`.
const A_SCALE: i64 = 113_218_560;
const B_SCALE: i64 = 262_080;
const GUARD_DIGITS: u32 = 15;
const MAX_DIGITS: u32 = 200;
const MAX_ORDER: i64 = 220;
/// Half-width, in `s = r²`, of the window around a kernel pole inside which
/// the sinc factor is summed as a power series.
const NEAR_POLE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    A,
    B,
}

impl Which {
    pub const ALL: [Which; 2] = [Which::A, Which::B];

    /// `a = 4i sin²(…)(…)` and `b = −4i sin²(…)(…)`.
    fn sign(self) -> i64 {
        match self {
            Which::A => 1,
            Which::B => -1,
        }
    }

    /// Eigenvalue under the 24-dimensional Fourier transform.
    pub fn eigenvalue(self) -> i64 {
        self.sign()
    }

    pub fn name(self) -> &'static str {
        match self {
            Which::A => "a",
            Which::B => "b",
        }
    }
}

impl FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(Which::A),
            "b" | "B" => Ok(Which::B),
            other => Err(Error::InvalidArgument(format!("expected `a` or `b`, got `{other}`"))),
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `f` or its Fourier transform `f̂`, which flips the sign of the `b` part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FKind {
    F,
    FHat,
}

impl FKind {
    fn b_sign(self) -> i64 {
        match self {
            FKind::F => 1,
            FKind::FHat => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FKind::F => "f",
            FKind::FHat => "fhat",
        }
    }
}

impl FromStr for FKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f" => Ok(FKind::F),
            "fhat" | "f_hat" | "f̂" => Ok(FKind::FHat),
            other => Err(Error::InvalidArgument(format!("expected `f` or `fhat`, got `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rigor {
    Certified,
    Heuristic,
}

impl Rigor {
    pub fn as_str(self) -> &'static str {
        match self {
            Rigor::Certified => "certified",
            Rigor::Heuristic => "heuristic",
        }
    }

    fn join(self, other: Rigor) -> Rigor {
        if self == Rigor::Certified && other == Rigor::Certified {
            Rigor::Certified
        } else {
            Rigor::Heuristic
        }
    }
}

/// A midpoint with an error radius.
#[derive(Clone, Debug)]
pub struct BallValue {
    pub mid: Real,
    pub radius: Real,
    pub rigor: Rigor,
}

impl BallValue {
    pub fn new(mid: Real, radius: Real, rigor: Rigor) -> Self {
        assert!(!radius.is_negative(), "negative radius");
        BallValue { mid, radius, rigor }
    }

    pub fn exact(mid: Real) -> Self {
        let prec = mid.prec();
        BallValue { mid, radius: Real::zero(prec), rigor: Rigor::Certified }
    }

    pub fn contains(&self, x: &Real) -> bool {
        (&self.mid - x).abs() <= self.radius
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        let prec = self.mid.prec() + 16;
        self.contains(&Real::from_rat(x, prec))
    }

    pub fn upper(&self) -> Real {
        &self.mid + &self.radius
    }

    pub fn lower(&self) -> Real {
        &self.mid - &self.radius
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    fn scale(&self, c: &Real) -> Self {
        BallValue { mid: &self.mid * c, radius: &self.radius * &c.abs(), rigor: self.rigor }
    }

    fn add(&self, other: &Self) -> Self {
        BallValue {
            mid: &self.mid + &other.mid,
            radius: &self.radius + &other.radius,
            rigor: self.rigor.join(other.rigor),
        }
    }

    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "mid": self.mid.to_sci(digits),
            "radius": self.radius.to_sci(3),
            "rigor": self.rigor.as_str(),
        })
    }
}

impl fmt::Display for BallValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.mid.prec() as f64) / std::f64::consts::LOG2_10) as usize;
        write!(f, "{} ± {} ({})", self.mid.to_sci(digits.clamp(4, 40)), self.radius.to_sci(3), self.rigor.as_str())
    }
}

/// A value and its derivative with respect to `s = r²`.
#[derive(Clone, Debug)]
pub struct MagicJet {
    pub value: BallValue,
    pub d_ds: BallValue,
}

/// One term `c·π^p·t^j·e^{rate·πt}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTerm {
    pub c: Rat,
    pub pi_power: i32,
    pub t_degree: u32,
    pub rate: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

impl ExpPoly {
    /// The Laplace transform `∫₀^∞ (·) e^{−πst} dt` as partial fractions in `s`.
    pub fn laplace_kernel(&self) -> RationalKernel {
        let mut poles: BTreeMap<(i64, u32, i32), Rat> = BTreeMap::new();
        for t in &self.terms {
            // ∫₀^∞ t^j e^{−π(s−μ)t} dt = j!/(π(s−μ))^{j+1}
            let fact: i64 = (1..=t.t_degree as i64).product();
            let key = (t.rate, t.t_degree + 1, t.pi_power - t.t_degree as i32 - 1);
            *poles.entry(key).or_insert_with(Rat::zero) += &t.c * rat(fact);
        }
        RationalKernel {
            poles: poles
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((at, order, pi_power), coeff)| KernelPole { at, order, coeff, pi_power })
                .collect(),
        }
    }

    /// Evaluates at a real `t` in double precision.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        self.terms
            .iter()
            .map(|x| {
                x.c.to_f64().unwrap_or(f64::NAN)
                    * pi.powi(x.pi_power)
                    * t.powi(x.t_degree as i32)
                    * (x.rate as f64 * pi * t).exp()
            })
            .sum()
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.c.is_negative() { "-" } else if i == 0 { "" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                f.write_str(sign)?;
            }
            write!(f, "{}", fmt_rat(&t.c.abs()))?;
            if t.pi_power != 0 {
                write!(f, "·π^{}", t.pi_power)?;
            }
            match t.t_degree {
                0 => {}
                1 => f.write_str("·t")?,
                j => write!(f, "·t^{j}")?,
            }
            if t.rate != 0 {
                write!(f, "·e^({}πt)", t.rate)?;
            }
        }
        Ok(())
    }
}

/// `coeff·π^pi_power / (s − at)^order` with `s = r²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPole {
    pub at: i64,
    pub order: u32,
    pub coeff: Rat,
    pub pi_power: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalKernel {
    pub poles: Vec<KernelPole>,
}

impl RationalKernel {
    /// The coefficient of `(s − at)^{−order}` as `(rational, π-power)`.
    pub fn laurent(&self, at: i64, order: u32) -> Result<Option<(Rat, i32)>> {
        let hits: Vec<&KernelPole> = self.poles.iter().filter(|p| p.at == at && p.order == order).collect();
        match hits.as_slice() {
            [] => Ok(None),
            [p] => Ok(Some((p.coeff.clone(), p.pi_power))),
            _ => Err(Error::Degenerate(format!("mixed π powers at pole s = {at}"))),
        }
    }

    pub fn eval(&self, s: &Real) -> Real {
        let prec = s.prec();
        let pi = Real::pi(prec);
        let mut acc = Real::zero(prec);
        for p in &self.poles {
            let d = s - &Real::from_int(p.at, prec);
            let term = &(&Real::from_rat(&p.coeff, prec) * &pi.powi(p.pi_power)) / &d.powi(p.order as i32);
            acc = &acc + &term;
        }
        acc
    }
}

impl fmt::Display for RationalKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.poles.iter().enumerate() {
            let sign = if p.coeff.is_negative() { "-" } else if i == 0 { "" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                f.write_str(sign)?;
            }
            let den = if p.at == 0 {
                format!("r^{}", 2 * p.order)
            } else if p.order == 1 {
                format!("(r²-{})", p.at)
            } else {
                format!("(r²-{})^{}", p.at, p.order)
            };
            write!(f, "{}·π^{}/{}", fmt_rat(&p.coeff.abs()), p.pi_power, den)?;
        }
        Ok(())
    }
}

/// The integrand split into its growing part and a decaying remainder.
#[derive(Clone, Debug)]
pub struct IntegrandSeries {
    pub which: Which,
    pub order: HalfExp,
    /// Terms with `rate ≥ 0`: `p(t)` for `a`, `2e^{4πt} − 464e^{2πt} + 172128` for `b`.
    pub lead: ExpPoly,
    /// Terms with `rate ≤ −1`, ordered by decreasing rate.
    pub remainder: ExpPoly,
    /// Ten times the size of the last retained group of terms at `t = 1`.
    pub tail_radius: f64,
}

/// `(series, t-degree, π-power, sign)` whose sum is the integrand
/// `t¹⁰φ(i/t) = t²φ + (t/π)Φ₁ − Φ₂/π²` or `ψ_I(it)`.
type Parts = Vec<(FormalSeries, u32, i32, i64)>;

/// The integrand parts and the series `G` with `∫₀¹ F(t)e^{−πst}dt =
/// ∫₁^∞ τ^{−12} G(iτ) e^{−πs/τ} dτ`: `G = φ` for `a` and `G = −ψ_S` for `b`.
fn family_parts(which: Which, order: HalfExp) -> Result<(Parts, FormalSeries)> {
    Ok(match which {
        Which::A => {
            let fam = phi_family(order)?;
            let parts = vec![(fam.phi.clone(), 2, 0, 1), (fam.phi1.body, 1, -1, 1), (fam.phi2.body, 0, -2, -1)];
            (parts, fam.phi)
        }
        Which::B => {
            let fam = psi_family(order)?;
            (vec![(fam.psi_i, 0, 0, 1)], fam.psi_s.neg())
        }
    })
}

fn split_parts(parts: &Parts) -> (ExpPoly, ExpPoly) {
    let mut lead = Vec::new();
    let mut rem = Vec::new();
    for (series, j, p, sign) in parts {
        for (e, c) in series.terms() {
            let term = ExpTerm { c: c * rat(*sign), pi_power: *p, t_degree: *j, rate: -e.twice() };
            if e.twice() <= 0 {
                lead.push(term);
            } else {
                rem.push(term);
            }
        }
    }
    lead.sort_by(|x, y| (y.rate, y.t_degree).cmp(&(x.rate, x.t_degree)));
    rem.sort_by(|x, y| (y.rate, y.t_degree).cmp(&(x.rate, x.t_degree)));
    (ExpPoly { terms: lead }, ExpPoly { terms: rem })
}

pub fn integrand_series(which: Which, order: HalfExp) -> Result<IntegrandSeries> {
    let (parts, _) = family_parts(which, order)?;
    let (lead, remainder) = split_parts(&parts);
    let tail_radius = match remainder.terms.last() {
        None => 0.0,
        Some(last) => {
            let group = ExpPoly {
                terms: remainder.terms.iter().filter(|t| t.rate == last.rate).cloned().collect(),
            };
            10.0 * group.eval_f64(1.0).abs()
        }
    };
    Ok(IntegrandSeries { which, order, lead, remainder, tail_radius })
}

/// The partial-fraction kernel: `p̃` for `a`, the `b` kernel for `b`.
pub fn magic_kernel(which: Which) -> Result<RationalKernel> {
    Ok(integrand_series(which, HalfExp::q(1))?.lead.laplace_kernel())
}

// ---------------------------------------------------------------------------
// Jets

/// A value and its first derivative.
#[derive(Clone, Debug)]
struct Jet {
    v: Real,
    d: Real,
}

impl Jet {
    fn new(v: Real, d: Real) -> Self {
        Jet { v, d }
    }

    fn constant(v: Real) -> Self {
        let prec = v.prec();
        Jet { v, d: Real::zero(prec) }
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet::new(&self.v + &o.v, &self.d + &o.d)
    }

    fn mul(&self, o: &Jet) -> Jet {
        Jet::new(&self.v * &o.v, &(&self.v * &o.d) + &(&self.d * &o.v))
    }

    fn scale(&self, c: &Real) -> Jet {
        Jet::new(&self.v * c, &self.d * c)
    }

    fn exp(&self) -> Jet {
        let e = self.v.exp();
        let d = &e * &self.d;
        Jet::new(e, d)
    }
}

/// `sin x / x` and its derivative, as a jet in the variable underlying `x`.
fn sinc_jet(x: &Jet, series: bool) -> Jet {
    let prec = x.v.prec();
    let (g, dg) = if series || x.v.is_zero() {
        // Σ (−1)^k x^{2k}/(2k+1)!  and its derivative
        let x2 = x.v.square();
        let mut g = Real::one(prec);
        let mut dg = Real::zero(prec);
        let mut term = Real::one(prec);
        let cutoff = -(prec as i64) - 8;
        for k in 1..200i64 {
            term = -(&(&term * &x2) / &Real::from_int((2 * k) * (2 * k + 1), prec));
            if term.is_zero() || term.magnitude_bits() < cutoff {
                break;
            }
            g = &g + &term;
            // d/dx x^{2k} = 2k x^{2k−1}
            dg = &dg + &(&(&term * &Real::from_int(2 * k, prec)) / &x.v);
        }
        if x.v.is_zero() {
            dg = Real::zero(prec);
        }
        (g, dg)
    } else {
        let (s, c) = x.v.sin_cos();
        let g = &s / &x.v;
        let dg = &(&(&x.v * &c) - &s) / &x.v.square();
        (g, dg)
    };
    let d = &dg * &x.d;
    Jet::new(g, d)
}

/// `∫₁^∞ t^j e^{−λt} dt = e^{−λ} Σ_{k≤j} j!/(j−k)!·λ^{−(k+1)}` for `λ > 0`.
fn upper_moment(j: u32, lambda: &Real, e: &Real) -> Real {
    let prec = lambda.prec();
    let inv = lambda.recip();
    let mut acc = Real::zero(prec);
    let mut pow = inv.clone();
    let mut falling = 1i64;
    for k in 0..=j as i64 {
        acc = &acc + &(&pow * &Real::from_int(falling, prec));
        falling *= j as i64 - k;
        pow = &pow * &inv;
    }
    &acc * e
}

// ---------------------------------------------------------------------------
// Precomputed tables

#[derive(Clone, Debug)]
struct RealTerm {
    coeff: Real,
    rate: i64,
    j: u32,
}

#[derive(Clone, Debug)]
struct Node {
    level: u32,
    inv_tau: Real,
    /// `τ^{−12} G(iτ)·dτ/dt` at the node.
    fw: Real,
}

struct Tables {
    which: Which,
    prec: u32,
    lead: Vec<RealTerm>,
    rem: Vec<RealTerm>,
    nodes: Vec<Node>,
    levels: u32,
}

fn required_order(digits: u32) -> i64 {
    // coefficients grow at most like e^{4π√(2n)} while e^{−2πn} decays
    let need = (digits as f64 + 25.0) * std::f64::consts::LN_10;
    let pi = std::f64::consts::PI;
    (8..MAX_ORDER).find(|&n| 2.0 * pi * n as f64 - 4.0 * pi * (2.0 * n as f64).sqrt() >= need).unwrap_or(MAX_ORDER)
}

fn pi_power(pi: &Real, p: i32) -> Real {
    pi.powi(p)
}

impl Tables {
    fn build(which: Which, digits: u32) -> Result<Tables> {
        let prec = bits_for_digits(digits + GUARD_DIGITS);
        let threshold = 10f64.powi(-(digits as i32) - 8);
        let mut order = required_order(digits);
        loop {
            let (parts, g) = family_parts(which, HalfExp::q(order))?;
            let (lead, rem) = split_parts(&parts);
            let rem_tail = {
                let last = rem.terms.last().map(|t| t.rate).unwrap_or(0);
                let group =
                    ExpPoly { terms: rem.terms.iter().filter(|t| t.rate == last).cloned().collect() };
                10.0 * group.eval_f64(1.0).abs()
            };
            let g_tail = match g.terms().last() {
                Some((e, c)) => {
                    10.0 * Real::from_rat(c, 64).to_f64().abs() * (-std::f64::consts::PI * e.twice() as f64).exp()
                }
                None => 0.0,
            };
            if rem_tail.max(g_tail) > threshold || !rem_tail.is_finite() || !g_tail.is_finite() {
                if order >= MAX_ORDER {
                    return Err(Error::PrecisionUnachievable { requested: digits, available: available_digits(rem_tail.max(g_tail)) });
                }
                order = (order + 20).min(MAX_ORDER);
                continue;
            }
            let pi = Real::pi(prec);
            let to_real = |t: &ExpTerm| RealTerm {
                coeff: &Real::from_rat(&t.c, prec) * &pi_power(&pi, t.pi_power),
                rate: t.rate,
                j: t.t_degree,
            };
            let lead: Vec<RealTerm> = lead.terms.iter().map(to_real).collect();
            if lead.iter().any(|t| t.rate % 2 != 0 || t.j > 1) {
                return Err(Error::Degenerate("growing terms outside the cancellable pattern".into()));
            }
            let rem: Vec<RealTerm> = rem.terms.iter().map(to_real).collect();
            let mut tables = Tables { which, prec, lead, rem, nodes: Vec::new(), levels: 0 };
            tables.build_quadrature(&g, digits)?;
            return Ok(tables);
        }
    }

    fn build_quadrature(&mut self, g: &FormalSeries, digits: u32) -> Result<()> {
        let prec = self.prec;
        let pi = Real::pi(prec);
        let max_m = g.terms().last().map(|(e, _)| e.twice()).unwrap_or(0).max(0) as usize;
        let mut coeffs = vec![Real::zero(prec); max_m + 1];
        for (e, c) in g.terms() {
            coeffs[e.twice() as usize] = Real::from_rat(c, prec);
        }
        let (first_m, first_c) = g
            .terms()
            .next()
            .map(|(e, c)| (e.twice() as f64, Real::from_rat(c, 64).to_f64().abs()))
            .ok_or_else(|| Error::Degenerate("empty quadrature series".into()))?;
        let g1: f64 = g
            .terms()
            .map(|(e, c)| Real::from_rat(c, 64).to_f64().abs() * (-std::f64::consts::PI * e.twice() as f64).exp())
            .sum();
        let budget = (prec as f64 + 30.0) * std::f64::consts::LN_2 + g1.max(1.0).ln();
        let half_pi = std::f64::consts::FRAC_PI_2;
        // t ranges where the weighted integrand exceeds e^{−budget}
        let mut t_lo = 0.0f64;
        while half_pi * t_lo.sinh() + (half_pi * t_lo.cosh()).ln() > -budget {
            t_lo -= 0.125;
        }
        let mut t_hi = 0.0f64;
        loop {
            let x = (half_pi * t_hi.sinh()).exp();
            let log_w = first_c.max(1.0).ln() - std::f64::consts::PI * first_m * (1.0 + x) + x.ln()
                + (half_pi * t_hi.cosh()).ln();
            if log_w < -budget {
                break;
            }
            t_hi += 0.125;
        }
        const BASE: u32 = 2;
        let k_lo = (t_lo * (1 << BASE) as f64).floor() as i64;
        let k_hi = (t_hi * (1 << BASE) as f64).ceil() as i64;
        // node k at refinement `level` sits at t = k·2^{−(level+BASE)}
        let make = |k: i64, level: u32| -> Node {
            let t = Real::from_int(k, prec).mul_pow2(-((level + BASE) as i64));
            let et = t.exp();
            let iet = et.recip();
            let sinh = (&et - &iet).mul_pow2(-1);
            let cosh = (&et + &iet).mul_pow2(-1);
            let half_pi_r = pi.mul_pow2(-1);
            let x = (&half_pi_r * &sinh).exp();
            let tau = &Real::one(prec) + &x;
            let w = &(&half_pi_r * &cosh) * &x;
            let u = (-(&pi * &tau)).exp();
            let mut acc = Real::zero(prec);
            for c in coeffs.iter().rev() {
                acc = &(&acc * &u) + c;
            }
            let inv_tau = tau.recip();
            let fw = &(&acc * &inv_tau.powi(12)) * &w;
            Node { level, inv_tau, fw }
        };
        self.nodes = (k_lo..=k_hi).map(|k| make(k, 0)).collect();
        let probes: Vec<Real> = [0i64, 3, 20].iter().map(|&s| Real::from_int(s, prec)).collect();
        let tol = Real::from_int(10, prec).powi(-(digits as i32) - 8);
        let mut level = 0u32;
        while level < 10 {
            level += 1;
            let scale = 1i64 << level;
            for k in (k_lo * scale)..=(k_hi * scale) {
                if k % 2 != 0 {
                    self.nodes.push(make(k, level));
                }
            }
            self.levels = level;
            let converged = probes.iter().all(|s| {
                let (q, _, dq, _) = self.quadrature(s);
                let mag = q.v.abs();
                let one = Real::one(prec);
                let scale = if mag > one { mag } else { one };
                dq <= &tol * &scale
            });
            if converged {
                return Ok(());
            }
        }
        Err(Error::Quadrature(format!("no convergence for {} after {level} refinements", self.which)))
    }

    /// `Q(s) = ∫₁^∞ τ^{−12} G(iτ) e^{−πs/τ} dτ` as a jet, with the difference
    /// to the next coarser level for the value and the derivative.
    fn quadrature(&self, s: &Real) -> (Jet, Real, Real, Real) {
        let prec = self.prec;
        let pi = Real::pi(prec);
        let neg_pi_s = -(&pi * s);
        let mut fine = Jet::constant(Real::zero(prec));
        let mut coarse = Jet::constant(Real::zero(prec));
        for n in &self.nodes {
            let e = (&neg_pi_s * &n.inv_tau).exp();
            let v = &n.fw * &e;
            let d = -(&(&v * &pi) * &n.inv_tau);
            let term = Jet::new(v, d);
            fine = fine.add(&term);
            if n.level < self.levels {
                coarse = coarse.add(&term);
            }
        }
        let base = 2i64;
        let h_fine = -(self.levels as i64) - base;
        let fine = Jet::new(fine.v.mul_pow2(h_fine), fine.d.mul_pow2(h_fine));
        let coarse = Jet::new(coarse.v.mul_pow2(h_fine + 1), coarse.d.mul_pow2(h_fine + 1));
        let dv = (&fine.v - &coarse.v).abs();
        let dd = (&fine.d - &coarse.d).abs();
        let mag = fine.v.abs();
        (fine, dv, dd, mag)
    }

    /// `v(s)` with `a = i·v` (resp. `b = i·v`), as a jet in `s`.
    fn eval(&self, s: &Real) -> Result<MagicJet> {
        if s.is_negative() {
            return Err(Error::InvalidArgument("r² must be nonnegative".into()));
        }
        let prec = self.prec;
        let s = s.clone().with_prec(prec);
        let pi = Real::pi(prec);

        // growing part, with 4 sin²(πs/2) = 4 sin²(λ/2) and λ = π(s − μ)
        let mut lead = Jet::constant(Real::zero(prec));
        let mut lead_abs = Real::zero(prec);
        for t in &self.lead {
            let shift = &s - &Real::from_int(t.rate, prec);
            let lambda = Jet::new(&pi * &shift, pi.clone());
            let near = shift.to_f64().abs() < NEAR_POLE;
            let half = Jet::new(lambda.v.mul_pow2(-1), lambda.d.mul_pow2(-1));
            let g = sinc_jet(&half, near);
            let e = Jet::new(-&lambda.v, -&lambda.d).exp();
            let poly = if t.j == 0 {
                lambda.clone()
            } else {
                Jet::new(&lambda.v + &Real::one(prec), lambda.d.clone())
            };
            let w = e.mul(&g.mul(&g)).mul(&poly).scale(&t.coeff);
            lead_abs = &lead_abs + &w.v.abs();
            lead = lead.add(&w);
        }

        // 4 sin²(πs/2)
        let (sn, cs) = (&(&pi * &s)).mul_pow2(-1).sin_cos();
        let sin4 = Jet::new(sn.square().mul_pow2(2), (&(&sn * &cs) * &pi).mul_pow2(2));

        let (q, q_err, q_derr, _) = self.quadrature(&s);

        // closed-form remainder on [1, ∞)
        let mut tail = Jet::constant(Real::zero(prec));
        let last_rate = self.rem.last().map(|t| t.rate).unwrap_or(0);
        let mut last_group = Jet::constant(Real::zero(prec));
        for t in &self.rem {
            let lambda = &pi * &(&s - &Real::from_int(t.rate, prec));
            let e = (-&lambda).exp();
            let v = &upper_moment(t.j, &lambda, &e) * &t.coeff;
            let d = -(&(&upper_moment(t.j + 1, &lambda, &e) * &t.coeff) * &pi);
            let term = Jet::new(v, d);
            if t.rate == last_rate {
                last_group = last_group.add(&term);
            }
            tail = tail.add(&term);
        }
        let ten = Real::from_int(10, prec);
        let t_err = &last_group.v.abs() * &ten;
        let t_derr = &last_group.d.abs() * &ten;

        let body = q.add(&tail);
        let sign = Real::from_int(self.which.sign(), prec);
        let v = lead.add(&sin4.mul(&body)).scale(&sign);

        let err = &q_err + &t_err;
        let derr = &q_derr + &t_derr;
        let rounding_scale = &(&lead_abs + &(&sin4.v.abs() * &(&q.v.abs() + &tail.v.abs()))) + &Real::one(prec);
        let ulp = Real::one(prec).mul_pow2(-(prec as i64) + 24);
        let rad_v = &(&sin4.v.abs() * &err) + &(&rounding_scale * &ulp);
        let rad_d = &(&(&sin4.d.abs() * &err) + &(&sin4.v.abs() * &derr))
            + &(&(&rounding_scale * &ulp) * &Real::from_int(64, prec));
        Ok(MagicJet {
            value: BallValue::new(v.v, rad_v, Rigor::Heuristic),
            d_ds: BallValue::new(v.d, rad_d, Rigor::Heuristic),
        })
    }
}

fn available_digits(tail: f64) -> u32 {
    if tail.is_finite() && tail > 0.0 {
        (-tail.log10()).max(0.0) as u32
    } else {
        0
    }
}

type TableCache = Mutex<HashMap<(Which, u32), Arc<Tables>>>;

fn tables(which: Which, digits: u32) -> Result<Arc<Tables>> {
    if digits < 10 {
        return Err(Error::InvalidArgument(format!("at least 10 digits are required, got {digits}")));
    }
    if digits > MAX_DIGITS {
        return Err(Error::PrecisionUnachievable { requested: digits, available: MAX_DIGITS });
    }
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("table cache poisoned");
    if let Some(t) = guard.get(&(which, digits)) {
        return Ok(t.clone());
    }
    let t = Arc::new(Tables::build(which, digits)?);
    guard.insert((which, digits), t.clone());
    Ok(t)
}

/// Working precision in bits for `digits` requested digits.
pub fn working_prec(digits: u32) -> u32 {
    bits_for_digits(digits + GUARD_DIGITS)
}

/// `v(s)` and `dv/ds` where `a(r) = i·v(r²)` (resp. `b`).
pub fn eval_magic_at_square(which: Which, s: &Real, digits: u32) -> Result<MagicJet> {
    tables(which, digits)?.eval(s)
}

/// The imaginary coefficient `v` of `a(r) = i·v` or `b(r) = i·v`.
pub fn eval_magic(which: Which, r: &Real, digits: u32) -> Result<BallValue> {
    let prec = working_prec(digits);
    let r = r.clone().with_prec(prec);
    Ok(eval_magic_at_square(which, &r.square(), digits)?.value)
}

/// `dv/dr` for `a(r) = i·v` or `b(r) = i·v`.
pub fn derivative_magic(which: Which, r: &Real, digits: u32) -> Result<BallValue> {
    let prec = working_prec(digits);
    let r = r.clone().with_prec(prec);
    let jet = eval_magic_at_square(which, &r.square(), digits)?;
    Ok(jet.d_ds.scale(&r.mul_pow2(1)))
}

fn f_coefficients(kind: FKind, prec: u32) -> (Real, Real) {
    let pi = Real::pi(prec);
    let alpha = &pi / &Real::from_int(A_SCALE, prec);
    let beta = &Real::from_int(kind.b_sign(), prec) / &(&pi * &Real::from_int(B_SCALE, prec));
    (alpha, beta)
}

/// `f` (or `f̂`) and its `s`-derivative at `s = r²`.
pub fn eval_f_at_square(kind: FKind, s: &Real, digits: u32) -> Result<MagicJet> {
    let prec = working_prec(digits);
    let va = eval_magic_at_square(Which::A, s, digits)?;
    let vb = eval_magic_at_square(Which::B, s, digits)?;
    let (alpha, beta) = f_coefficients(kind, prec);
    Ok(MagicJet {
        value: va.value.scale(&alpha).add(&vb.value.scale(&beta)),
        d_ds: va.d_ds.scale(&alpha).add(&vb.d_ds.scale(&beta)),
    })
}

pub fn eval_f(kind: FKind, r: &Real, digits: u32) -> Result<BallValue> {
    let prec = working_prec(digits);
    let r = r.clone().with_prec(prec);
    Ok(eval_f_at_square(kind, &r.square(), digits)?.value)
}

/// `d/dr f(r)`, from the analytic `s`-derivative via `d/dr = 2r·d/ds`.
pub fn derivative_f(kind: FKind, r: &Real, digits: u32) -> Result<BallValue> {
    let prec = working_prec(digits);
    let r = r.clone().with_prec(prec);
    let jet = eval_f_at_square(kind, &r.square(), digits)?;
    Ok(jet.d_ds.scale(&r.mul_pow2(1)))
}

/// Both `f` and `f̂` at one radius, sharing the evaluations of `a` and `b`.
#[derive(Clone, Debug)]
pub struct GridRow {
    pub r: Real,
    pub f: BallValue,
    pub fhat: BallValue,
}

impl GridRow {
    pub fn csv_header() -> &'static str {
        "r,f,f_radius,fhat,fhat_radius,rigor"
    }

    pub fn csv_line(&self, digits: usize) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.r.to_sci(digits.min(20)),
            self.f.mid.to_sci(digits),
            self.f.radius.to_sci(3),
            self.fhat.mid.to_sci(digits),
            self.fhat.radius.to_sci(3),
            self.f.rigor.join(self.fhat.rigor).as_str()
        )
    }
}

pub fn grid_row(r: &Real, digits: u32) -> Result<GridRow> {
    let prec = working_prec(digits);
    let r = r.clone().with_prec(prec);
    let s = r.square();
    let va = eval_magic_at_square(Which::A, &s, digits)?.value;
    let vb = eval_magic_at_square(Which::B, &s, digits)?.value;
    let (alpha, beta) = f_coefficients(FKind::F, prec);
    let f = va.scale(&alpha).add(&vb.scale(&beta));
    let fhat = va.scale(&alpha).add(&vb.scale(&-beta));
    Ok(GridRow { r, f, fhat })
}

/// A CSV table of `f` and `f̂` at the given radii.
pub fn grid_csv(rs: &[Real], digits: u32) -> Result<String> {
    let mut out = String::from(GridRow::csv_header());
    out.push('\n');
    for r in rs {
        out.push_str(&grid_row(r, digits)?.csv_line(digits as usize));
        out.push('\n');
    }
    Ok(out)
}

/// Parses a radius written as a decimal, `sqrt(x)`, `√x` or `k*sqrt(x)`.
pub fn parse_radius(text: &str, prec: u32) -> Result<Real> {
    let bad = || Error::InvalidArgument(format!("cannot parse radius `{text}`"));
    let t = text.trim().replace(' ', "");
    let (factor, rest) = match t.split_once('*') {
        Some((k, rest)) => (Real::parse_decimal(k, prec).ok_or_else(bad)?, rest.to_string()),
        None => (Real::one(prec), t.clone()),
    };
    let inner = rest
        .strip_prefix("sqrt(")
        .and_then(|x| x.strip_suffix(')'))
        .map(str::to_string)
        .or_else(|| rest.strip_prefix('√').map(str::to_string));
    let value = match inner {
        Some(x) => {
            let v = Real::parse_decimal(&x, prec).ok_or_else(bad)?;
            if v.is_negative() {
                return Err(bad());
            }
            v.sqrt()
        }
        None => Real::parse_decimal(&rest, prec).ok_or_else(bad)?,
    };
    let r = &factor * &value;
    if r.is_negative() {
        return Err(Error::InvalidArgument(format!("radius must be nonnegative, got `{text}`")));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Exact values

/// `rational · π^pi_power · i^i_power · (√2)^sqrt2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicValue {
    pub rational: Rat,
    pub pi_power: i32,
    /// 0 or 1; `i² = −1` is carried by the sign of `rational`.
    pub i_power: u8,
    pub sqrt2: u8,
}

impl MagicValue {
    pub fn new(rational: Rat, pi_power: i32, i_power: i32, sqrt2: u8) -> Self {
        assert!(sqrt2 <= 1, "√2 factor is 0 or 1");
        if rational.is_zero() {
            return Self::zero();
        }
        // i² = −1 goes into the sign, so the stored power is 0 or 1
        let k = i_power.rem_euclid(4);
        let rational = if k >= 2 { -rational } else { rational };
        MagicValue { rational, pi_power, i_power: (k % 2) as u8, sqrt2 }
    }

    pub fn zero() -> Self {
        MagicValue { rational: Rat::zero(), pi_power: 0, i_power: 0, sqrt2: 0 }
    }

    pub fn rational(r: Rat) -> Self {
        Self::new(r, 0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn mul(&self, o: &MagicValue) -> MagicValue {
        let mut r = &self.rational * &o.rational;
        let both = self.sqrt2 + o.sqrt2;
        if both == 2 {
            r *= rat(2);
        }
        Self::new(r, self.pi_power + o.pi_power, (self.i_power + o.i_power) as i32, both % 2)
    }

    pub fn recip(&self) -> Result<MagicValue> {
        if self.is_zero() {
            return Err(Error::Degenerate("division by zero".into()));
        }
        // 1/√2 = √2/2
        let mut r = self.rational.recip();
        if self.sqrt2 == 1 {
            r /= rat(2);
        }
        Ok(Self::new(r, -self.pi_power, -(self.i_power as i32), self.sqrt2))
    }

    pub fn div(&self, o: &MagicValue) -> Result<MagicValue> {
        Ok(self.mul(&o.recip()?))
    }

    /// Real and imaginary parts.
    pub fn to_real_parts(&self, prec: u32) -> (Real, Real) {
        let mut x = &Real::from_rat(&self.rational, prec) * &Real::pi(prec).powi(self.pi_power);
        if self.sqrt2 == 1 {
            x = &x * &Real::from_int(2, prec).sqrt();
        }
        let zero = Real::zero(prec);
        match self.i_power {
            0 => (x, zero),
            1 => (zero, x),
            2 => (-x, zero),
            _ => (zero, -x),
        }
    }
}

impl fmt::Display for MagicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let r = self.rational.clone();
        let has_i = self.i_power % 2 == 1;
        let num = r.numer().clone();
        let den = r.denom().clone();
        let mut top: Vec<String> = Vec::new();
        let abs_num = num.abs();
        let others = self.sqrt2 == 1 || self.pi_power > 0 || has_i;
        if !(abs_num == num_bigint::BigInt::from(1) && others) {
            top.push(abs_num.to_string());
        }
        if self.sqrt2 == 1 {
            top.push("√2".into());
        }
        match self.pi_power {
            p if p == 1 => top.push("π".into()),
            p if p > 1 => top.push(format!("π^{p}")),
            _ => {}
        }
        if has_i {
            top.push("i".into());
        }
        let mut bottom: Vec<String> = Vec::new();
        if den != num_bigint::BigInt::from(1) {
            bottom.push(den.to_string());
        }
        match self.pi_power {
            -1 => bottom.push("π".into()),
            p if p < -1 => bottom.push(format!("π^{}", -p)),
            _ => {}
        }
        if num.is_negative() {
            f.write_str("-")?;
        }
        f.write_str(&top.join("·"))?;
        match bottom.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", bottom[0]),
            _ => write!(f, "/({})", bottom.join("·")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialValue {
    pub name: String,
    pub value: MagicValue,
}

/// Value of `v` and `dv/ds` at the pole `s = μ`, from
/// `4 sin²(πs/2)·(A₂/(s−μ)² + A₁/(s−μ) + regular) = π²A₂ + π²A₁(s−μ) + O((s−μ)²)`.
fn pole_jet(which: Which, mu: i64) -> Result<(MagicValue, MagicValue)> {
    let kernel = magic_kernel(which)?;
    let sign = rat(which.sign());
    let part = |order: u32| -> Result<MagicValue> {
        Ok(match kernel.laurent(mu, order)? {
            Some((c, p)) => MagicValue::new(c * &sign, p + 2, 0, 0),
            None => MagicValue::zero(),
        })
    };
    Ok((part(2)?, part(1)?))
}

/// `d/dr = 2r·d/ds` at `r = √μ`.
fn two_sqrt(mu: i64) -> MagicValue {
    match mu {
        0 => MagicValue::zero(),
        2 => MagicValue::new(rat(2), 0, 0, 1),
        4 => MagicValue::rational(rat(4)),
        _ => panic!("pole outside {{0, 2, 4}}"),
    }
}

fn sqrt_label(mu: i64) -> &'static str {
    match mu {
        0 => "0",
        2 => "√2",
        4 => "2",
        _ => "?",
    }
}

/// Exact values of `a`, `b` and their derivatives at `r ∈ {0, √2, 2}`.
pub fn special_values() -> Result<Vec<SpecialValue>> {
    let i = MagicValue::new(rat(1), 0, 1, 0);
    let mut out = Vec::new();
    for which in Which::ALL {
        for mu in [0i64, 2, 4] {
            let (v, dv) = pole_jet(which, mu)?;
            out.push(SpecialValue { name: format!("{which}({})", sqrt_label(mu)), value: v.mul(&i) });
            if mu != 0 {
                out.push(SpecialValue {
                    name: format!("{which}'({})", sqrt_label(mu)),
                    value: dv.mul(&two_sqrt(mu)).mul(&i),
                });
            }
        }
    }
    Ok(out)
}

pub fn special_value(name: &str) -> Result<MagicValue> {
    special_values()?
        .into_iter()
        .find(|v| v.name == name)
        .map(|v| v.value)
        .ok_or_else(|| Error::InvalidArgument(format!("no special value named `{name}`")))
}

/// Coefficient of `r²` in `v_a` (resp. `v_b`) at the origin.
pub fn taylor2_magic(which: Which) -> Result<MagicValue> {
    Ok(pole_jet(which, 0)?.1)
}

/// The exact `r²` coefficient of `f` or `f̂` at `r = 0`.
pub fn taylor2_exact(kind: FKind) -> Result<Rat> {
    let alpha = MagicValue::new(ratio(1, A_SCALE), 1, 0, 0);
    let beta = MagicValue::new(ratio(kind.b_sign(), B_SCALE), -1, 0, 0);
    let a = alpha.mul(&taylor2_magic(Which::A)?);
    let b = beta.mul(&taylor2_magic(Which::B)?);
    let mut total = Rat::zero();
    for part in [a, b] {
        if part.is_zero() {
            continue;
        }
        if part.pi_power != 0 || part.sqrt2 != 0 || part.i_power != 0 {
            return Err(Error::Degenerate(format!("r² coefficient part {part} is not rational")));
        }
        total += part.rational;
    }
    Ok(total)
}

pub fn taylor2(kind: FKind) -> Result<BallValue> {
    let prec = working_prec(30);
    let mid = Real::from_rat(&taylor2_exact(kind)?, prec);
    let radius = &mid.abs() * &Real::one(prec).mul_pow2(2 - prec as i64);
    Ok(BallValue::new(mid, radius, Rigor::Certified))
}

/// `f(0)` for either kind, exactly.
pub fn f_at_zero_exact(kind: FKind) -> Result<Rat> {
    let alpha = MagicValue::new(ratio(1, A_SCALE), 1, 0, 0);
    let beta = MagicValue::new(ratio(kind.b_sign(), B_SCALE), -1, 0, 0);
    let (va, _) = pole_jet(Which::A, 0)?;
    let (vb, _) = pole_jet(Which::B, 0)?;
    let total = alpha.mul(&va);
    let other = beta.mul(&vb);
    let mut sum = Rat::zero();
    for part in [total, other] {
        if !part.is_zero() {
            if part.pi_power != 0 || part.sqrt2 != 0 {
                return Err(Error::Degenerate("f(0) is not rational".into()));
            }
            sum += part.rational;
        }
    }
    Ok(sum)
}

impl MagicValue {
    /// Sum of two values of the same shape (or where one side is zero).
    pub fn add(&self, o: &MagicValue) -> Result<MagicValue> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if (self.pi_power, self.sqrt2, self.i_power) != (o.pi_power, o.sqrt2, o.i_power) {
            return Err(Error::Degenerate(format!("cannot add {self} and {o} exactly")));
        }
        Ok(Self::new(&self.rational + &o.rational, self.pi_power, self.i_power as i32, self.sqrt2))
    }
}

/// `f` or `f̂` from the values of `a` and `b`, exactly.
fn combine_f(kind: FKind, a: &MagicValue, b: &MagicValue) -> Result<MagicValue> {
    let minus_i = MagicValue::new(rat(-1), 0, 1, 0);
    let alpha = MagicValue::new(ratio(1, A_SCALE), 1, 0, 0);
    let beta = MagicValue::new(ratio(kind.b_sign(), B_SCALE), -1, 0, 0);
    // a = i·v_a, so v_a = −i·a
    alpha.mul(&minus_i.mul(a)).add(&beta.mul(&minus_i.mul(b)))
}

/// Exact values of `f`, `f̂`, their derivatives and `r²` coefficients, and the
/// values of `a` rescaled by `a(0)`.
pub fn f_special_values() -> Result<Vec<SpecialValue>> {
    let sv = |n: &str| special_value(n);
    let mut out = Vec::new();
    for kind in [FKind::F, FKind::FHat] {
        let k = kind.name();
        for (label, a, b) in [
            ("(0)", "a(0)", "b(0)"),
            ("(√2)", "a(√2)", "b(√2)"),
            ("'(√2)", "a'(√2)", "b'(√2)"),
            ("(2)", "a(2)", "b(2)"),
            ("'(2)", "a'(2)", "b'(2)"),
        ] {
            out.push(SpecialValue { name: format!("{k}{label}"), value: combine_f(kind, &sv(a)?, &sv(b)?)? });
        }
        out.push(SpecialValue { name: format!("{k} r^2 coefficient"), value: MagicValue::rational(taylor2_exact(kind)?) });
    }
    let a0 = sv("a(0)")?;
    for name in ["a(√2)", "a'(√2)", "a'(2)"] {
        out.push(SpecialValue { name: format!("{name}/a(0)"), value: sv(name)?.div(&a0)? });
    }
    let i = MagicValue::new(rat(1), 0, 1, 0);
    out.push(SpecialValue {
        name: "a r^2 coefficient/a(0)".into(),
        value: taylor2_magic(Which::A)?.mul(&i).div(&a0)?,
    });
    Ok(out)
}

/// `π^{12}/12! · (r₀/2)^{24}` exactly.
pub fn density_bound_exact(r0: &Rat) -> MagicValue {
    let fact12: i64 = (1..=12).product();
    let half = r0 / rat(2);
    MagicValue::new(pow_rat(&half, 24) / rat(fact12), 12, 0, 0)
}

/// `π^{12}/12! · (r₀/2)^{24}`, the density bound from an auxiliary function
/// whose sign change happens at `r₀`.
pub fn density_bound(r0: &Real) -> Result<BallValue> {
    if !(r0 > &Real::zero(r0.prec())) {
        return Err(Error::InvalidArgument("r0 must be positive".into()));
    }
    let prec = r0.prec().max(64);
    let fact12: i64 = (1..=12).product();
    let pi = Real::pi(prec);
    let v = &(&pi.powi(12) / &Real::from_int(fact12, prec)) * &r0.clone().with_prec(prec).mul_pow2(-1).powi(24);
    let radius = &v.abs() * &Real::one(prec).mul_pow2(-(prec as i64) + 16);
    Ok(BallValue::new(v, radius, Rigor::Certified))
}

// ---------------------------------------------------------------------------
// Fourier-eigenfunction oracle

/// `J_n(x)` by the ascending series, summed with enough extra bits to absorb
/// the cancellation for large `x`.
pub fn bessel_j(n: u32, x: &Real) -> Real {
    let prec = x.prec();
    if x.is_zero() {
        return if n == 0 { Real::one(prec) } else { Real::zero(prec) };
    }
    let extra = (x.to_f64().abs() * std::f64::consts::LOG2_E).ceil() as u32 + 32;
    let work = prec + extra;
    let x = x.clone().with_prec(work);
    let half = x.mul_pow2(-1);
    let q = -half.square();
    let fact_n: Real = (1..=n as i64).fold(Real::one(work), |acc, k| &acc * &Real::from_int(k, work));
    let mut term = &half.powi(n as i32) / &fact_n;
    let mut sum = term.clone();
    let cutoff = -(work as i64) - 4 + sum.magnitude_bits().min(0);
    let mut k = 1i64;
    loop {
        term = &(&term * &q) / &Real::from_int(k * (k + n as i64), work);
        sum = &sum + &term;
        if (k as f64) > half.to_f64().abs() && (term.is_zero() || term.magnitude_bits() < cutoff) {
            break;
        }
        k += 1;
    }
    sum.with_prec(prec)
}

/// Gauss-Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize, prec: u32) -> Vec<(Real, Real)> {
    let work = prec + 16;
    let one = Real::one(work);
    let legendre = |x: &Real| -> (Real, Real) {
        // P_n(x) and P_{n−1}(x)
        let mut p0 = one.clone();
        let mut p1 = x.clone();
        for k in 2..=n as i64 {
            let a = &(&(&x.clone() * &p1) * &Real::from_int(2 * k - 1, work)) - &(&p0 * &Real::from_int(k - 1, work));
            let p2 = &a / &Real::from_int(k, work);
            p0 = p1;
            p1 = p2;
        }
        (p1, p0)
    };
    let nn = Real::from_int(n as i64, work);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = Real::from_f64(guess, work);
        let mut deriv = one.clone();
        for _ in 0..200 {
            let (pn, pm) = legendre(&x);
            // P'_n = n(x P_n − P_{n−1})/(x² − 1)
            deriv = &(&nn * &(&(&x * &pn) - &pm)) / &(&x.square() - &one);
            let step = &pn / &deriv;
            x = &x - &step;
            if step.is_zero() || step.magnitude_bits() < -(work as i64) + 4 {
                let (pn, pm) = legendre(&x);
                deriv = &(&nn * &(&(&x * &pn) - &pm)) / &(&x.square() - &one);
                break;
            }
        }
        let w = &Real::from_int(2, work) / &(&(&one - &x.square()) * &deriv.square());
        out.push((x.with_prec(prec), w.with_prec(prec)));
    }
    out
}

#[derive(Clone, Debug)]
pub struct OracleSample {
    pub s: f64,
    pub transform: f64,
    pub expected: f64,
    pub residual: f64,
}

const ORACLE_R_MAX: i64 = 12;
const ORACLE_PANELS_PER_UNIT: i64 = 4;
const ORACLE_GL_POINTS: usize = 20;

/// Compares the numerically computed 24-dimensional radial Fourier transform
/// `ĝ(s) = 2π s^{−11} ∫₀^∞ g(r) J₁₁(2πrs) r¹² dr` of `g = v_a` (resp. `v_b`)
/// with `±g(s)`.
pub fn eigenfunction_oracle(which: Which, samples: &[f64], digits: u32) -> Result<Vec<OracleSample>> {
    if samples.iter().any(|&s| !(0.0..=8.0).contains(&s)) {
        return Err(Error::InvalidArgument("oracle samples must lie in [0, 8]".into()));
    }
    let prec = working_prec(digits);
    let pi = Real::pi(prec);
    let gl = gauss_legendre(ORACLE_GL_POINTS, prec);
    let width = Real::one(prec).mul_pow2(-2);
    debug_assert_eq!(ORACLE_PANELS_PER_UNIT, 4);
    let mut nodes: Vec<(Real, Real, Real)> = Vec::new();
    for panel in 0..ORACLE_R_MAX * ORACLE_PANELS_PER_UNIT {
        let left = &Real::from_int(panel, prec) * &width;
        for (x, w) in &gl {
            let r = &left + &(&(&(x + &Real::one(prec)) * &width).mul_pow2(-1));
            let weight = &w.mul_pow2(-1) * &width;
            let g = eval_magic_at_square(which, &r.square(), digits)?.value.mid;
            nodes.push((r, weight, g));
        }
    }
    let mut fact11 = Real::one(prec);
    for k in 2..=11 {
        fact11 = &fact11 * &Real::from_int(k, prec);
    }
    let mut out = Vec::new();
    for &s in samples {
        let sr = Real::from_f64(s, prec);
        let transform = if s == 0.0 {
            // J₁₁(x) ~ (x/2)^{11}/11!
            let mut acc = Real::zero(prec);
            for (r, w, g) in &nodes {
                acc = &acc + &(&(w * g) * &r.powi(23));
            }
            &(&acc * &pi.powi(12).mul_pow2(1)) / &fact11
        } else {
            let mut acc = Real::zero(prec);
            for (r, w, g) in &nodes {
                let j = bessel_j(11, &(&(&pi * &sr) * r).mul_pow2(1));
                acc = &acc + &(&(&(w * g) * &j) * &r.powi(12));
            }
            &(&acc * &pi.mul_pow2(1)) / &sr.powi(11)
        };
        let g_s = eval_magic_at_square(which, &sr.square(), digits)?.value.mid;
        let expected = &g_s * &Real::from_int(which.eigenvalue(), prec);
        let residual = (&transform - &expected).abs().to_f64();
        if !residual.is_finite() {
            return Err(Error::Quadrature(format!("non-finite transform at s = {s}")));
        }
        out.push(OracleSample { s, transform: transform.to_f64(), expected: expected.to_f64(), residual });
    }
    Ok(out)
}

pub fn special_values_json() -> Result<Value> {
    let vals = special_values()?;
    Ok(Value::Array(
        vals.iter().map(|v| json!({ "name": v.name, "value": v.value.to_string() })).collect(),
    ))
}
