//! Reduction of the modular-form inequalities to sign conditions on rational
//! polynomials in `u = q^{1/2}`, and their certification by Sturm's theorem.
//!
//! An expression `Σ t^j π^p S_{j,p}(u)` is turned into a one-sided polynomial
//! bound by replacing, coefficient by coefficient, `π` with a rational bound
//! and `t` with an endpoint of its range, always erring against the inequality.
//! The dropped tail of every series is added back as `±T·u¹²`.
//!
//! Over the whole range `t ≥ 1` the substitution `t ≤ 1/(23u)` is sometimes
//! too lossy; the certifier then splits the `t`-range into pieces with sharper
//! rational enclosures of `t` and `u = e^{−πt}`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bounds::{self, Bounded, NumeratorBounds, PowerBound};
use crate::error::{Error, Result};
use crate::forms::Numerators;
use crate::series::{fmt_rat, pow_rat, rat, ratio, FormalSeries, HalfExp, Rat};
use crate::sturm::{count_real_roots, sign_of, RatPoly};

/// `⌊10¹⁰π⌋/10¹⁰`.
pub fn pi_lower() -> Rat {
    ratio(31415926535, 10_000_000_000)
}

/// `⌈10¹⁰π⌉/10¹⁰`.
pub fn pi_upper() -> Rat {
    ratio(31415926536, 10_000_000_000)
}

/// Which side a rational replacement errs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    ShouldBePositive,
    ShouldBeNegative,
}

impl Sense {
    fn sign(self) -> i32 {
        match self {
            Sense::ShouldBePositive => 1,
            Sense::ShouldBeNegative => -1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Sense::ShouldBePositive => "+",
            Sense::ShouldBeNegative => "-",
        }
    }
}

/// A series term with an optional coefficient bound for its dropped tail.
#[derive(Clone, Debug)]
pub struct TermSeries {
    pub series: FormalSeries,
    pub bound: Option<PowerBound>,
}

/// `Σ t^j π^p S_{j,p}(u)`, keyed by `(j, p)`.
#[derive(Clone, Debug, Default)]
pub struct TPiPoly {
    pub terms: BTreeMap<(u32, i32), TermSeries>,
}

impl TPiPoly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `t^j π^p · s` with a certified bound.
    pub fn push(&mut self, j: u32, p: i32, s: Bounded) {
        self.push_term(j, p, TermSeries { series: s.series, bound: Some(s.bound) });
    }

    /// Adds an exact polynomial term (no tail).
    pub fn push_exact(&mut self, j: u32, p: i32, s: FormalSeries) {
        self.push_term(j, p, TermSeries { series: s, bound: None });
    }

    fn push_term(&mut self, j: u32, p: i32, t: TermSeries) {
        match self.terms.remove(&(j, p)) {
            None => {
                self.terms.insert((j, p), t);
            }
            Some(old) => {
                let bound = match (old.bound, t.bound) {
                    (Some(a), Some(b)) => Some(bounds::bound_sum(&a, &b)),
                    (None, None) => None,
                    _ => panic!("mixing bounded and exact series in one term"),
                };
                self.terms.insert((j, p), TermSeries { series: old.series.add(&t.series), bound });
            }
        }
    }

    pub fn truncate(&self, order: HalfExp) -> Result<Self> {
        let mut out = TPiPoly::new();
        for (key, t) in &self.terms {
            if t.bound.is_some() && t.series.trunc_order() < order {
                return Err(Error::Grid(format!(
                    "term t^{}·π^{} is exact only below {}, not {}",
                    key.0,
                    key.1,
                    t.series.trunc_order(),
                    order
                )));
            }
            out.terms.insert(
                *key,
                TermSeries { series: t.series.truncate(order), bound: t.bound.clone() },
            );
        }
        Ok(out)
    }

    /// Exact value of the retained terms at `(t, u)` with a rational stand-in
    /// for `π`.
    pub fn eval_truncated(&self, t: &Rat, u: &Rat, pi: &Rat) -> Rat {
        self.terms
            .iter()
            .map(|((j, p), s)| {
                pow_rat(t, *j as i64) * pow_rat(pi, *p as i64) * s.series.eval_at_sqrt_q(u)
            })
            .sum()
    }
}

/// Upper bound for `t` on a piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TUpper {
    /// `t ≤ c`.
    Const(Rat),
    /// `t ≤ c/u`.
    OverU(Rat),
}

/// A region `t_lo ≤ t ≤ t_hi`, `u_lo ≤ u ≤ u_hi` that contains every point
/// `(t, e^{−πt})` of a `t`-interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub t_lo: Rat,
    /// `None` for an unbounded interval.
    pub t_end: Option<Rat>,
    pub t_hi: TUpper,
    pub u_lo: Rat,
    pub u_hi: Rat,
}

impl Piece {
    /// `t ∈ [1, ∞)` with `1 ≤ t ≤ 1/(23u)` and `u ∈ (0, 1/23)`.
    pub fn whole_range() -> Self {
        Piece {
            t_lo: rat(1),
            t_end: None,
            t_hi: TUpper::OverU(ratio(1, 23)),
            u_lo: rat(0),
            u_hi: ratio(1, 23),
        }
    }

    /// `t ∈ [a, ∞)` with `t ≤ c/u`, `c ≥ a e^{−πa}`.
    pub fn unbounded(a: &Rat) -> Self {
        let (_, hi) = exp_neg_pi_bounds(a);
        Piece {
            t_lo: a.clone(),
            t_end: None,
            t_hi: TUpper::OverU(round_up(&(a * &hi))),
            u_lo: rat(0),
            u_hi: hi,
        }
    }

    /// `t ∈ [a, b]`.
    pub fn bounded(a: &Rat, b: &Rat) -> Self {
        let (_, hi) = exp_neg_pi_bounds(a);
        let (lo, _) = exp_neg_pi_bounds(b);
        Piece {
            t_lo: a.clone(),
            t_end: Some(b.clone()),
            t_hi: TUpper::Const(b.clone()),
            u_lo: lo,
            u_hi: hi,
        }
    }

    /// Does `(t, u)` satisfy the piece's enclosure?
    pub fn contains(&self, t: &Rat, u: &Rat) -> bool {
        let t_ok = match &self.t_hi {
            TUpper::Const(c) => t <= c,
            TUpper::OverU(c) => t * u <= *c,
        };
        *t >= self.t_lo && t_ok && u > &Rat::zero() && *u >= self.u_lo && *u <= self.u_hi
    }

    fn label(&self) -> String {
        match &self.t_end {
            Some(b) => format!("[{}, {}]", fmt_rat(&self.t_lo), fmt_rat(b)),
            None => format!("[{}, inf)", fmt_rat(&self.t_lo)),
        }
    }
}

const ROUND_DIGITS: usize = 16;

fn round_scale() -> BigInt {
    num_traits::pow(BigInt::from(10), ROUND_DIGITS)
}

fn round_up(x: &Rat) -> Rat {
    let s = round_scale();
    let v = (x * Rat::from_integer(s.clone())).ceil().to_integer();
    Rat::new(v, s)
}

fn round_down(x: &Rat) -> Rat {
    let s = round_scale();
    let v = (x * Rat::from_integer(s.clone())).floor().to_integer();
    Rat::new(v, s)
}

/// Rational enclosure of `e^{−y}` for rational `y ≥ 0`.
pub fn exp_neg_bounds(y: &Rat) -> (Rat, Rat) {
    assert!(!y.is_negative());
    // e^y ∈ [S_K, S_K + y^{K+1}/(K+1)! · 1/(1 − y/(K+2))]
    let tiny = ratio(1, 10).pow(30);
    let mut sum = Rat::one();
    let mut term = Rat::one();
    let mut k = 0i64;
    loop {
        k += 1;
        term = &term * y / rat(k);
        sum += &term;
        if k as f64 > 2.0 * y_f64(y) + 2.0 && term < &tiny * &sum {
            break;
        }
    }
    let next = &term * y / rat(k + 1);
    let rest = next / (Rat::one() - y / rat(k + 2));
    let lower = (&sum + rest).recip();
    let upper = sum.recip();
    (round_down(&lower), round_up(&upper))
}

fn y_f64(y: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    y.to_f64().unwrap_or(f64::MAX)
}

/// Rational enclosure of `e^{−πa}` for rational `a ≥ 0`.
pub fn exp_neg_pi_bounds(a: &Rat) -> (Rat, Rat) {
    let (lo, _) = exp_neg_bounds(&(a * pi_upper()));
    let (_, hi) = exp_neg_bounds(&(a * pi_lower()));
    (lo, hi)
}

/// Output of a reduction: the Laurent polynomial `u^offset · poly(u)`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub poly: RatPoly,
    pub offset: i64,
    /// The injected tail constant `T` (the polynomial carries `∓T·u¹²`).
    pub tail: Rat,
    pub log: Vec<String>,
}

impl Reduction {
    pub fn eval(&self, u: &Rat) -> Rat {
        pow_rat(u, self.offset) * self.poly.eval(u)
    }
}

/// Chooses the per-coefficient replacement of `π^p` and `t^j` that makes
/// `c·t^j·π^p` as small (`Lower`) or as large (`Upper`) as possible, and returns
/// the replaced coefficient together with the power of `u` it picks up.
fn replace_term(
    c: &Rat,
    j: u32,
    p: i32,
    piece: &Piece,
    want: Direction,
    log: &mut BTreeMap<String, usize>,
) -> (Rat, i64) {
    // minimise c·X (X = t^j π^p > 0): take X small iff c > 0
    let small_x = (want == Direction::Lower) == c.is_positive();
    let pi = if (p > 0) == small_x { pi_lower() } else { pi_upper() };
    let mut v = c * pow_rat(&pi, p as i64);
    if p != 0 {
        let which = if pi == pi_lower() { "lower" } else { "upper" };
        *log.entry(format!("pi^{p} <- {which} bound")).or_default() += 1;
    }
    let mut u_shift = 0i64;
    if j > 0 {
        if small_x {
            v *= pow_rat(&piece.t_lo, j as i64);
            *log.entry(format!("t^{j} <- {}", fmt_rat(&piece.t_lo))).or_default() += 1;
        } else {
            match &piece.t_hi {
                TUpper::Const(b) => {
                    v *= pow_rat(b, j as i64);
                    *log.entry(format!("t^{j} <- {}", fmt_rat(b))).or_default() += 1;
                }
                TUpper::OverU(cu) => {
                    v *= pow_rat(cu, j as i64);
                    u_shift = -(j as i64);
                    *log.entry(format!("t^{j} <- ({}/u)^{j}", fmt_rat(cu))).or_default() += 1;
                }
            }
        }
    }
    (v, u_shift)
}

/// Certified bound on the absolute sum of all dropped terms, as a multiple of
/// `u¹²`.
fn piece_tail(expr: &TPiPoly, piece: &Piece, n0: u64) -> Result<Rat> {
    let mut total = Rat::zero();
    for ((j, p), term) in &expr.terms {
        let Some(bound) = &term.bound else { continue };
        let b = bound.promote();
        let pi_max = if *p >= 0 { pow_rat(&pi_upper(), *p as i64) } else { pow_rat(&pi_lower(), *p as i64) };
        let (t_factor, norm) = match &piece.t_hi {
            TUpper::Const(c) => (pow_rat(c, *j as i64), 12),
            TUpper::OverU(c) => (pow_rat(c, *j as i64), 12 + *j as i64),
        };
        let tail = bounds::tail_bound(&b, n0, &piece.u_hi, norm)?;
        total += pi_max * t_factor * tail.value;
    }
    Ok(total)
}

/// Rounds a positive tail up to a power of ten (zero stays zero).
pub fn round_tail(t: &Rat) -> Rat {
    if t.is_zero() {
        return Rat::zero();
    }
    bounds::power_of_ten_ceiling(t).0
}

/// Reduces `expr` on one piece to a one-sided Laurent polynomial in `u`.
pub fn reduce_piece(expr: &TPiPoly, piece: &Piece, sense: Sense, n0: u64) -> Result<Reduction> {
    let bounded = expr.terms.values().filter(|t| t.bound.is_some()).count();
    if bounded != 0 && bounded != expr.terms.len() {
        return Err(Error::InvalidArgument("some terms lack a tail bound".into()));
    }
    let want = match sense {
        Sense::ShouldBePositive => Direction::Lower,
        Sense::ShouldBeNegative => Direction::Upper,
    };
    let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
    let mut log = BTreeMap::new();
    for ((j, p), term) in &expr.terms {
        for (e, c) in term.series.terms() {
            let (v, shift) = replace_term(c, *j, *p, piece, want, &mut log);
            *coeffs.entry(e.twice() + shift).or_insert_with(Rat::zero) += v;
        }
    }
    let tail = if bounded > 0 { round_tail(&piece_tail(expr, piece, n0)?) } else { Rat::zero() };
    if !tail.is_zero() {
        let signed = match want {
            Direction::Lower => -tail.clone(),
            Direction::Upper => tail.clone(),
        };
        *coeffs.entry(12).or_insert_with(Rat::zero) += signed;
        log.insert(format!("tail {} u^12", if want == Direction::Lower { "-" } else { "+" }), 1);
    }
    coeffs.retain(|_, c| !c.is_zero());
    let offset = coeffs.keys().next().copied().unwrap_or(0);
    let top = coeffs.keys().last().copied().unwrap_or(0);
    let mut dense = vec![Rat::zero(); (top - offset + 1) as usize];
    for (e, c) in coeffs {
        dense[(e - offset) as usize] = c;
    }
    let log = log.into_iter().map(|(k, n)| format!("{k} (x{n})")).collect();
    Ok(Reduction { poly: RatPoly::new(dense), offset, tail, log })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    TGe1,
    TLe1,
}

impl BranchKind {
    pub fn label(self) -> &'static str {
        match self {
            BranchKind::TGe1 => "t>=1",
            BranchKind::TLe1 => "t<=1",
        }
    }
}

/// Reduction over the whole range `1 ≤ t ≤ 1/(23u)`, `u ∈ (0, 1/23)`. Both
/// branches are expressed in a variable `t ≥ 1` (the `t ≤ 1` branch after
/// `t ↦ 1/t`), so they share the same region.
pub fn reduce_branch(
    expr: &TPiPoly,
    _branch: BranchKind,
    sense: Sense,
    order: HalfExp,
) -> Result<RatPoly> {
    let expr = expr.truncate(order)?;
    let r = reduce_piece(&expr, &Piece::whole_range(), sense, order.twice() as u64)?;
    let mut coeffs = vec![Rat::zero(); r.offset.max(0) as usize];
    if r.offset < 0 {
        return Err(Error::Grid(format!(
            "reduction has a pole of order {} at u = 0",
            -r.offset
        )));
    }
    coeffs.extend(r.poly.coeffs().iter().cloned());
    Ok(RatPoly::new(coeffs))
}

#[derive(Clone, Debug)]
pub struct PieceResult {
    pub t_interval: String,
    pub u_interval: (Rat, Rat),
    pub degree: usize,
    pub root_count: usize,
    pub sign: i32,
    pub ok: bool,
    pub tail: Rat,
    pub poly_hash: String,
    pub perturbation: Option<String>,
    pub replacements: Vec<String>,
    pub wall_ms: u128,
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub label: String,
    pub sense: Sense,
    /// The pieces that cover `t ≥ 1` (or the first piece that could not be
    /// refined further).
    pub pieces: Vec<PieceResult>,
    /// Attempts that failed and were split into smaller pieces.
    pub refined: Vec<PieceResult>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct CertResult {
    pub lemma_id: String,
    pub order: HalfExp,
    pub branches: Vec<BranchResult>,
    pub ok: bool,
    pub wall_ms: u128,
}

impl CertResult {
    pub fn max_tail(&self) -> Rat {
        self.branches
            .iter()
            .flat_map(|b| b.pieces.iter().chain(&b.refined).map(|p| p.tail.clone()))
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lemma": self.lemma_id,
            "order": self.order.twice(),
            "status": if self.ok { "ok" } else { "failed" },
            "wall_ms": self.wall_ms,
            "branches": self.branches.iter().map(|b| json!({
                "branch": b.label,
                "sense": b.sense.label(),
                "status": if b.ok { "ok" } else { "failed" },
                "pieces": b.pieces.iter().map(PieceResult::to_json).collect::<Vec<_>>(),
                "refined": b.refined.iter().map(PieceResult::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl PieceResult {
    pub fn to_json(&self) -> Value {
        json!({
            "t_interval": self.t_interval,
            "u_interval": [fmt_rat(&self.u_interval.0), fmt_rat(&self.u_interval.1)],
            "degree": self.degree,
            "root_count": self.root_count,
            "sign": self.sign,
            "status": if self.ok { "ok" } else { "failed" },
            "tail": fmt_rat(&self.tail),
            "tail_monomial": "u^12",
            "poly_sha256": self.poly_hash,
            "perturbation": self.perturbation,
            "replacements": self.replacements,
            "wall_ms": self.wall_ms,
        })
    }
}

impl fmt::Display for PieceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = self.tail.to_f64().unwrap_or(f64::INFINITY);
        write!(
            f,
            "t in {}: degree {}, roots {}, sign {:+}, tail {:.0e}, {}",
            self.t_interval,
            self.degree,
            self.root_count,
            self.sign,
            tail,
            if self.ok { "ok" } else { "failed" }
        )
    }
}

impl fmt::Display for CertResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} at order q^{}: {}",
            self.lemma_id,
            self.order,
            if self.ok { "ok" } else { "FAILED" }
        )?;
        for b in &self.branches {
            writeln!(f, "  branch {} (sense {}): {}", b.label, b.sense.label(), if b.ok { "ok" } else { "FAILED" })?;
            for p in &b.refined {
                writeln!(f, "    (refined) {p}")?;
            }
            for p in &b.pieces {
                writeln!(f, "    {p}")?;
            }
        }
        Ok(())
    }
}

/// Certifies sign-constancy of the reduction on one piece.
pub fn certify_piece(expr: &TPiPoly, piece: &Piece, sense: Sense, n0: u64) -> Result<PieceResult> {
    let start = Instant::now();
    let red = reduce_piece(expr, piece, sense, n0)?;
    let (poly, _) = red.poly.strip_low_power();
    let mut lo = piece.u_lo.clone();
    let mut hi = piece.u_hi.clone();
    let eps = ratio(1, 10).pow(20);
    let mut perturbation = None;
    // u_hi = 1/23 of the whole range is never attained, so shrinking is safe;
    // the enclosures of finite pieces are widened instead
    if sign_of(&poly, &hi) == 0 {
        hi = if piece.t_end.is_none() && piece.t_lo == rat(1) { &hi - &eps } else { &hi + &eps };
        perturbation = Some(format!("upper endpoint moved to {}", fmt_rat(&hi)));
    }
    if !lo.is_zero() && sign_of(&poly, &lo) == 0 {
        lo = &lo - &eps;
        perturbation = Some(format!("lower endpoint moved to {}", fmt_rat(&lo)));
    }
    let root_count = if poly.degree().unwrap_or(0) == 0 {
        0
    } else {
        count_real_roots(&poly, &lo, &hi)?
    };
    let mid = (&lo + &hi) / rat(2);
    let sign = sign_of(&poly, &mid);
    let end_signs_ok = sign_of(&poly, &hi) == sense.sign()
        && (lo.is_zero() || sign_of(&poly, &lo) == sense.sign());
    let ok = root_count == 0 && sign == sense.sign() && end_signs_ok;
    Ok(PieceResult {
        t_interval: piece.label(),
        u_interval: (lo, hi),
        degree: poly.degree().unwrap_or(0),
        root_count,
        sign,
        ok,
        tail: red.tail,
        poly_hash: red.poly.hash_hex(),
        perturbation,
        replacements: red.log,
        wall_ms: start.elapsed().as_millis(),
    })
}

const MAX_PIECES: usize = 256;
const MIN_WIDTH_DEN: i64 = 4096;

/// Certifies a branch over `t ≥ 1`, first on the whole range and then, if
/// that fails, on adaptively refined pieces.
pub fn certify_branch(expr: &TPiPoly, label: &str, sense: Sense, order: HalfExp) -> Result<BranchResult> {
    let expr = expr.truncate(order)?;
    let n0 = order.twice() as u64;
    let whole = certify_piece(&expr, &Piece::whole_range(), sense, n0)?;
    if whole.ok {
        return Ok(BranchResult { label: label.into(), sense, pieces: vec![whole], refined: vec![], ok: true });
    }
    let mut refined = vec![whole];
    let mut done: Vec<PieceResult> = Vec::new();
    // work list of (a, Some(b)) bounded or (a, None) unbounded pieces
    let mut queue: Vec<(Rat, Option<Rat>)> = vec![(rat(1), Some(ratio(5, 4))), (ratio(5, 4), None)];
    let mut ok = true;
    while let Some((a, b)) = queue.pop() {
        if done.len() + queue.len() > MAX_PIECES {
            ok = false;
            break;
        }
        let piece = match &b {
            Some(b) => Piece::bounded(&a, b),
            None => Piece::unbounded(&a),
        };
        let r = certify_piece(&expr, &piece, sense, n0)?;
        if r.ok {
            done.push(r);
            continue;
        }
        match b {
            Some(b) if (&b - &a) > ratio(1, MIN_WIDTH_DEN) => {
                refined.push(r);
                let m = (&a + &b) / rat(2);
                queue.push((m.clone(), Some(b)));
                queue.push((a, Some(m)));
            }
            None if a < rat(8) => {
                refined.push(r);
                let next = &a * rat(2);
                queue.push((next.clone(), None));
                queue.push((a, Some(next)));
            }
            _ => {
                done.push(r);
                ok = false;
                break;
            }
        }
    }
    done.sort_by(|x, y| x.u_interval.1.cmp(&y.u_interval.1).reverse());
    Ok(BranchResult { label: label.into(), sense, pieces: done, refined, ok })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    A1,
    A2,
    A3,
}

impl LemmaId {
    pub const ALL: [LemmaId; 3] = [LemmaId::A1, LemmaId::A2, LemmaId::A3];
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LemmaId::A1 => "A1",
            LemmaId::A2 => "A2",
            LemmaId::A3 => "A3",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" | "a1" => Ok(LemmaId::A1),
            "A2" | "a2" => Ok(LemmaId::A2),
            "A3" | "a3" => Ok(LemmaId::A3),
            _ => Err(Error::InvalidArgument(format!("unknown lemma {s}"))),
        }
    }
}

/// Numerators (everything multiplied by `Δ²`) with their certified bounds.
#[derive(Clone, Debug)]
pub struct CertInputs {
    pub order: HalfExp,
    pub phi: Bounded,
    pub phi1: Bounded,
    pub phi2: Bounded,
    pub psi_i: Bounded,
    pub psi_s: Bounded,
    /// `q^{−1}Δ²`.
    pub delta2_over_q: Bounded,
}

impl CertInputs {
    pub fn build(order: HalfExp) -> Result<Self> {
        let n = Numerators::build(order + HalfExp::q(1))?;
        Ok(Self::from_numerators(order, &n))
    }

    pub fn from_numerators(order: HalfExp, n: &Numerators) -> Self {
        let nb = NumeratorBounds::derive();
        let b = |s: &FormalSeries, bound: &PowerBound| Bounded::new(s.clone(), bound.clone());
        // q^{-1}Δ² is only needed from the truncation point on
        let n_min = (order.twice() / 2).max(1) as u64;
        CertInputs {
            order,
            phi: b(&n.phi, &nb.phi),
            phi1: b(&n.phi1, &nb.phi1),
            phi2: b(&n.phi2, &nb.phi2),
            psi_i: b(&n.psi_i, &nb.psi_i),
            psi_s: b(&n.psi_s, &nb.psi_s),
            delta2_over_q: b(&n.delta2.shift(HalfExp::q(-1)), &nb.delta2.lowered_from(1, n_min)),
        }
    }
}

fn sc(b: &Bounded, c: i64) -> Bounded {
    b.scale(&rat(c)).expect("nonzero scale")
}

/// The branch expressions of a lemma, each already multiplied by `Δ²` and
/// written in a variable `t ≥ 1`.
pub fn lemma_branches(id: LemmaId, x: &CertInputs) -> Vec<(BranchKind, TPiPoly, Sense)> {
    // t¹⁰φ(i/t)Δ² = t²·Nφ + (t/π)·NΦ₁ − NΦ₂/π²
    let inverted = |extra: Option<Bounded>| {
        let mut e = TPiPoly::new();
        e.push(2, 0, x.phi.neg());
        e.push(1, -1, x.phi1.neg());
        let mut c0 = x.phi2.clone();
        if let Some(extra) = extra {
            c0 = c0.add(&extra);
        }
        e.push(0, -2, c0);
        e
    };
    match id {
        LemmaId::A1 => {
            let mut ge = TPiPoly::new();
            ge.push(0, 0, x.phi.clone());
            vec![
                (BranchKind::TGe1, ge, Sense::ShouldBeNegative),
                (BranchKind::TLe1, inverted(None), Sense::ShouldBePositive),
            ]
        }
        LemmaId::A2 => {
            let mut ge = TPiPoly::new();
            ge.push(0, 0, x.phi.clone());
            ge.push(0, -2, sc(&x.psi_s, -432));
            vec![
                (BranchKind::TGe1, ge, Sense::ShouldBePositive),
                (BranchKind::TLe1, inverted(Some(sc(&x.psi_i, -432))), Sense::ShouldBeNegative),
            ]
        }
        LemmaId::A3 => {
            // 28304640·(B(t) − t e^{2πt}/39 + 10 e^{2πt}/(117π))·Δ²
            let mut e = TPiPoly::new();
            e.push(2, 1, x.phi.clone());
            e.push(1, 0, x.phi1.sub(&sc(&x.delta2_over_q, 725760)));
            e.push(
                0,
                -1,
                sc(&x.psi_i, 432).sub(&x.phi2).add(&sc(&x.delta2_over_q, 2419200)),
            );
            vec![(BranchKind::TGe1, e, Sense::ShouldBePositive)]
        }
    }
}

pub fn certify_lemma_with(id: LemmaId, inputs: &CertInputs) -> Result<CertResult> {
    let start = Instant::now();
    let mut branches = Vec::new();
    for (kind, expr, sense) in lemma_branches(id, inputs) {
        branches.push(certify_branch(&expr, kind.label(), sense, inputs.order)?);
    }
    let ok = branches.iter().all(|b| b.ok);
    Ok(CertResult {
        lemma_id: id.to_string(),
        order: inputs.order,
        branches,
        ok,
        wall_ms: start.elapsed().as_millis(),
    })
}

pub fn certify_lemma(id: LemmaId, order: HalfExp) -> Result<CertResult> {
    certify_lemma_with(id, &CertInputs::build(order)?)
}

/// `(10 − 3π)(2 − s) + 3 > 0` on `s ∈ (0, 2)`, with `π` replaced by its upper
/// bound (the `π`-coefficient `−3(2 − s)` is negative there).
pub fn certify_fhat_gap() -> Result<CertResult> {
    let start = Instant::now();
    let pi = pi_upper();
    let c0 = rat(23) - rat(6) * &pi;
    let c1 = rat(3) * &pi - rat(10);
    let poly = RatPoly::new(vec![c0, c1]);
    let (lo, hi) = (rat(0), rat(2));
    let roots = count_real_roots(&poly, &lo, &hi)?;
    let sign = sign_of(&poly, &rat(1));
    let ok = roots == 0 && sign == 1 && sign_of(&poly, &lo) == 1 && sign_of(&poly, &hi) == 1;
    let piece = PieceResult {
        t_interval: "s in (0, 2)".into(),
        u_interval: (lo, hi),
        degree: 1,
        root_count: roots,
        sign,
        ok,
        tail: Rat::zero(),
        poly_hash: poly.hash_hex(),
        perturbation: None,
        replacements: vec!["pi^1 <- upper bound (x1)".into()],
        wall_ms: start.elapsed().as_millis(),
    };
    Ok(CertResult {
        lemma_id: "fhat_gap".into(),
        order: HalfExp(0),
        branches: vec![BranchResult {
            label: "0<s<2".into(),
            sense: Sense::ShouldBePositive,
            pieces: vec![piece],
            refined: vec![],
            ok,
        }],
        ok,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_constants() {
        assert!(pi_lower() < pi_upper());
        assert_eq!(pi_upper() - pi_lower(), ratio(1, 10_000_000_000));
    }

    #[test]
    fn exp_enclosures() {
        let (lo, hi) = exp_neg_pi_bounds(&rat(1));
        let e = (-std::f64::consts::PI).exp();
        use num_traits::ToPrimitive;
        assert!(lo.to_f64().unwrap() <= e && e <= hi.to_f64().unwrap());
        assert!(hi < ratio(1, 23));
        assert!(&hi - &lo < ratio(1, 10_000_000_000));
        let (l0, h0) = exp_neg_bounds(&rat(0));
        assert_eq!((l0, h0), (rat(1), rat(1)));
    }

    #[test]
    fn passthrough_without_t_or_pi() {
        let s = FormalSeries::from_terms(
            [(HalfExp(0), rat(3)), (HalfExp(1), rat(-2)), (HalfExp(4), ratio(1, 2))],
            HalfExp(0),
            HalfExp(10),
        )
        .unwrap();
        let mut e = TPiPoly::new();
        e.push_exact(0, 0, s);
        let p = reduce_branch(&e, BranchKind::TGe1, Sense::ShouldBePositive, HalfExp(10)).unwrap();
        assert_eq!(p, RatPoly::new(vec![rat(3), rat(-2), rat(0), rat(0), ratio(1, 2)]));
    }

    #[test]
    fn single_t_over_pi_term() {
        let mut e = TPiPoly::new();
        e.push_exact(1, -1, FormalSeries::monomial(rat(1), HalfExp::q(1), HalfExp(10)));
        let p = reduce_branch(&e, BranchKind::TGe1, Sense::ShouldBePositive, HalfExp(10)).unwrap();
        let expected = RatPoly::new(vec![rat(0), rat(0), ratio(10_000_000_000, 31415926536)]);
        assert_eq!(p, expected);
        // the opposite sense takes t ≤ 1/(23u) and the lower π bound
        let r = reduce_piece(&e, &Piece::whole_range(), Sense::ShouldBeNegative, 10).unwrap();
        assert_eq!(r.offset, 1);
        assert_eq!(r.poly, RatPoly::new(vec![ratio(1, 23) * ratio(10_000_000_000, 31415926535)]));
    }

    #[test]
    fn fhat_gap() {
        let r = certify_fhat_gap().unwrap();
        assert!(r.ok);
        let p = r.branches[0].pieces[0].clone();
        assert_eq!(p.root_count, 0);
        // s = 2 gives exactly 3 and s = 0 gives 23 − 6π > 3
        let pi = pi_upper();
        let at = |s: Rat| (rat(10) - rat(3) * &pi) * (rat(2) - s) + rat(3);
        assert_eq!(at(rat(2)), rat(3));
        assert!(at(rat(0)) > rat(3));
    }

    #[test]
    fn piece_enclosures_contain_the_curve() {
        use num_traits::ToPrimitive;
        for (a, b) in [(ratio(1, 1), ratio(5, 4)), (ratio(5, 4), ratio(3, 2)), (rat(2), rat(4))] {
            let piece = Piece::bounded(&a, &b);
            for k in 0..=10 {
                let t = &a + (&b - &a) * ratio(k, 10);
                let u = (-std::f64::consts::PI * t.to_f64().unwrap()).exp();
                assert!(piece.u_lo.to_f64().unwrap() <= u && u <= piece.u_hi.to_f64().unwrap());
            }
        }
        let piece = Piece::unbounded(&ratio(5, 4));
        if let TUpper::OverU(c) = &piece.t_hi {
            for t in [1.25f64, 1.5, 2.0, 5.0, 20.0] {
                let u = (-std::f64::consts::PI * t).exp();
                assert!(t * u <= c.to_f64().unwrap() * (1.0 + 1e-15));
            }
        } else {
            panic!("unbounded piece must bound t by c/u");
        }
    }

    #[test]
    fn a1_large_t_branch_small_order() {
        let x = CertInputs::build(HalfExp::q(20)).unwrap();
        let branches = lemma_branches(LemmaId::A1, &x);
        let (_, expr, sense) = &branches[0];
        let r = certify_branch(expr, "t>=1", *sense, x.order).unwrap();
        assert!(r.ok, "{r:?}");
    }
}
