//! The machine-readable certificate assembled by `leech24 certify`, and the
//! table printed by `leech24 values`.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{anyhow, Context};
use leech24_core::bounds::{check_numerator_bounds, check_theta_bounds, tail_bound, NumeratorBounds};
use leech24_core::certify::{certify_fhat_gap, certify_lemma_with, CertInputs, CertResult, LemmaId};
use leech24_core::forms::{numerator_consistency, verify_identities, FormCatalog, IdentityCheck, Numerators};
use leech24_core::magic::{self, MagicValue};
use leech24_core::real::Real;
use leech24_core::series::{fmt_rat, pow_rat, ratio};
use leech24_core::{HalfExp, Rat};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest admissible tail of the `φ` numerator at `q = 1/535`.
fn tail_budget() -> Rat {
    pow_rat(&ratio(1, 10), 50)
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    fn from_identity(c: &IdentityCheck) -> Self {
        Check {
            name: c.name.to_string(),
            passed: c.passed,
            detail: c.first_offending.map(|e| format!("first mismatch at exponent {e}")),
        }
    }

    fn to_json(&self) -> Value {
        json!({ "name": self.name, "status": status(self.passed), "detail": self.detail })
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "failed"
    }
}

#[derive(Clone, Debug)]
pub enum LemmaOutcome {
    Done(CertResult),
    Skipped(String),
}

impl LemmaOutcome {
    fn ok(&self) -> bool {
        matches!(self, LemmaOutcome::Done(r) if r.ok)
    }

    fn to_json(&self, id: &str) -> Value {
        match self {
            LemmaOutcome::Done(r) => r.to_json(),
            LemmaOutcome::Skipped(why) => json!({ "lemma": id, "status": "skipped", "reason": why }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub order: HalfExp,
    pub fault: Option<String>,
    pub hashes: BTreeMap<String, String>,
    pub identities: Vec<Check>,
    pub bounds: Value,
    pub bound_checks: Vec<Check>,
    pub tail: Rat,
    pub tail_ok: bool,
    pub lemmas: Vec<(String, LemmaOutcome)>,
    pub special_values: Vec<(String, String)>,
    pub f_values: Vec<(String, String)>,
    pub density: (String, String),
    pub timestamp: String,
    pub wall_ms: u128,
}

/// Parses `NAME:N` into a form name and an exponent `q^N`.
fn parse_fault(spec: &str) -> anyhow::Result<(String, HalfExp)> {
    let (name, n) = spec.split_once(':').ok_or_else(|| anyhow!("fault spec `{spec}` must be FORM:N"))?;
    let n: i64 = n.trim().parse().with_context(|| format!("bad exponent in fault spec `{spec}`"))?;
    Ok((name.trim().to_string(), HalfExp::q(n)))
}

pub fn build(config: &RunConfig, fault: Option<&str>) -> anyhow::Result<CertificateReport> {
    let start = Instant::now();
    let order = config.order;
    let n = (order.twice() / 2) as u64;

    let mut catalog = FormCatalog::build(order)?;
    if let Some(spec) = fault {
        let (name, e) = parse_fault(spec)?;
        catalog.perturb(&name, e, &Rat::from_integer(1.into()))?;
    }
    let numerators = Numerators::build(order + HalfExp::q(1))?;
    let long_numerators = Numerators::build(order + HalfExp::q(4))?;

    let mut identities: Vec<Check> = verify_identities(&catalog)?.checks.iter().map(Check::from_identity).collect();
    identities.extend(numerator_consistency(&catalog, &long_numerators)?.iter().map(Check::from_identity));
    let identities_ok = identities.iter().all(|c| c.passed);

    let nb = NumeratorBounds::derive();
    let failing = check_numerator_bounds(order)?;
    let mut bound_checks: Vec<Check> = nb
        .table()
        .into_iter()
        .map(|(name, b)| Check {
            name: name.to_string(),
            passed: !failing.iter().any(|f| f == name),
            detail: Some(b.to_string()),
        })
        .collect();
    bound_checks.push(Check { name: "Theta4".into(), passed: check_theta_bounds(order)?, detail: None });

    let tail = tail_bound(&nb.phi, n, &ratio(1, 535), 6)?.value;
    let tail_ok = tail < tail_budget();

    let lemmas: Vec<(String, LemmaOutcome)> = if identities_ok {
        let inputs = CertInputs::from_numerators(order, &numerators);
        let mut done: Vec<(String, LemmaOutcome)> = LemmaId::ALL
            .par_iter()
            .map(|id| {
                let outcome = certify_lemma_with(*id, &inputs).map(LemmaOutcome::Done);
                outcome.map(|o| (id.to_string(), o))
            })
            .collect::<Result<_, _>>()?;
        done.push(("fhat_gap".into(), LemmaOutcome::Done(certify_fhat_gap()?)));
        done
    } else {
        let why = "identity or consistency check failed".to_string();
        LemmaId::ALL
            .iter()
            .map(|id| id.to_string())
            .chain(std::iter::once("fhat_gap".to_string()))
            .map(|id| (id, LemmaOutcome::Skipped(why.clone())))
            .collect()
    };

    let special_values = magic::special_values()?.into_iter().map(|v| (v.name, v.value.to_string())).collect();
    let f_values = magic::f_special_values()?.into_iter().map(|v| (v.name, v.value.to_string())).collect();
    let density = density_row(config.digits);

    Ok(CertificateReport {
        order,
        fault: fault.map(str::to_string),
        hashes: catalog.hashes(),
        identities,
        bounds: nb.to_json(),
        bound_checks,
        tail,
        tail_ok,
        lemmas,
        special_values,
        f_values,
        density,
        timestamp: chrono::Utc::now().to_rfc3339(),
        wall_ms: start.elapsed().as_millis(),
    })
}

fn density_row(digits: u32) -> (String, String) {
    let exact = magic::density_bound_exact(&Rat::from_integer(2.into()));
    let prec = magic::working_prec(digits);
    let numeric = magic::density_bound(&Real::from_int(2, prec))
        .map(|b| b.mid.to_sci(digits as usize))
        .unwrap_or_default();
    (exact.to_string(), numeric)
}

impl CertificateReport {
    pub fn identities_ok(&self) -> bool {
        self.identities.iter().all(|c| c.passed)
    }

    pub fn bounds_ok(&self) -> bool {
        self.bound_checks.iter().all(|c| c.passed)
    }

    pub fn lemmas_ok(&self) -> bool {
        self.lemmas.iter().all(|(_, l)| l.ok())
    }

    pub fn ok(&self) -> bool {
        self.identities_ok() && self.bounds_ok() && self.tail_ok && self.lemmas_ok()
    }

    pub fn to_json(&self) -> Value {
        let pairs = |v: &[(String, String)]| -> Value {
            Value::Array(v.iter().map(|(n, x)| json!({ "name": n, "value": x })).collect())
        };
        json!({
            "schema": SCHEMA_VERSION,
            "tool": { "name": "leech24", "version": env!("CARGO_PKG_VERSION") },
            "order": format!("q{}", self.order.twice() / 2),
            "status": status(self.ok()),
            "fault_injection": self.fault,
            "catalog_sha256": self.hashes,
            "identities": self.identities.iter().map(Check::to_json).collect::<Vec<_>>(),
            "numerator_bounds": self.bounds,
            "bound_checks": self.bound_checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "tail": {
                "form": "phi_num",
                "q0": "1/535",
                "value": fmt_rat(&self.tail),
                "value_approx": format!("{:.3e}", rat_to_f64(&self.tail)),
                "budget": "1e-50",
                "status": status(self.tail_ok),
            },
            "lemmas": self.lemmas.iter().map(|(id, l)| l.to_json(id)).collect::<Vec<_>>(),
            "special_values": pairs(&self.special_values),
            "f_values": pairs(&self.f_values),
            "density_bound": { "r0": "2", "value": self.density.0, "numeric": self.density.1 },
            "timestamp": self.timestamp,
            "wall_ms": self.wall_ms,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("certificate at order q{}: {}\n", self.order.twice() / 2, status(self.ok()));
        if let Some(f) = &self.fault {
            s.push_str(&format!("fault injected: {f}\n"));
        }
        s.push_str(&format!(
            "identities: {} of {} ok\n",
            self.identities.iter().filter(|c| c.passed).count(),
            self.identities.len()
        ));
        s.push_str(&format!(
            "coefficient bounds: {} of {} ok\n",
            self.bound_checks.iter().filter(|c| c.passed).count(),
            self.bound_checks.len()
        ));
        s.push_str(&format!("tail at q = 1/535: {:.3e} ({})\n", rat_to_f64(&self.tail), status(self.tail_ok)));
        for (id, l) in &self.lemmas {
            match l {
                LemmaOutcome::Done(r) => s.push_str(&r.to_string()),
                LemmaOutcome::Skipped(why) => s.push_str(&format!("{id}: skipped ({why})\n")),
            }
        }
        s.push_str(&format!("density bound: {} = {}\n", self.density.0, self.density.1));
        s
    }

    /// The failing parts, for standard error.
    pub fn failure_transcript(&self) -> String {
        let mut s = String::new();
        for c in self.identities.iter().chain(&self.bound_checks).filter(|c| !c.passed) {
            s.push_str(&format!("failed: {}", c.name));
            if let Some(d) = &c.detail {
                s.push_str(&format!(" ({d})"));
            }
            s.push('\n');
        }
        if !self.tail_ok {
            s.push_str(&format!("failed: tail {:.3e} exceeds 1e-50\n", rat_to_f64(&self.tail)));
        }
        for (id, l) in &self.lemmas {
            match l {
                LemmaOutcome::Done(r) if !r.ok => s.push_str(&format!("failed: {r}")),
                LemmaOutcome::Skipped(why) => s.push_str(&format!("skipped: {id} ({why})\n")),
                _ => {}
            }
        }
        s
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    let prec = 64;
    Real::from_rat(r, prec).to_f64()
}

#[derive(Clone, Debug)]
pub struct ValueRow {
    pub name: String,
    pub value: String,
    pub provenance: &'static str,
    pub numeric: String,
}

fn numeric(v: &MagicValue, digits: u32) -> String {
    let prec = magic::working_prec(digits);
    let (re, im) = v.to_real_parts(prec);
    let d = digits as usize;
    if im.is_zero() {
        re.to_sci(d)
    } else if re.is_zero() {
        format!("{}·i", im.to_sci(d))
    } else {
        format!("{} + {}·i", re.to_sci(d), im.to_sci(d))
    }
}

pub fn value_rows(digits: u32) -> anyhow::Result<Vec<ValueRow>> {
    let mut rows = Vec::new();
    for v in magic::special_values()?.into_iter().chain(magic::f_special_values()?) {
        rows.push(ValueRow {
            numeric: numeric(&v.value, digits),
            name: v.name,
            value: v.value.to_string(),
            provenance: "exact",
        });
    }
    let (exact, num) = density_row(digits);
    rows.push(ValueRow { name: "density bound (r0 = 2)".into(), value: exact, provenance: "exact", numeric: num });
    Ok(rows)
}
