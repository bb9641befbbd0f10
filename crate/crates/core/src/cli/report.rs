//! Serializable report layout shared by every subcommand, plus CSV and text
//! renderings. Field names are documented in `docs/report-schema.md`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::heights::Valuation;
use crate::zsigmondy::{
    BoundDescriptor, Hypotheses, OrbitRecord, Verdict, Verification, ZsigmondySet,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub exact: String,
    pub decimal: String,
}

impl From<&BigRational> for Rational {
    fn from(r: &BigRational) -> Self {
        let d = r.to_f64().map(|v| format!("{v:.6}")).unwrap_or_else(|| "nan".into());
        Rational { exact: r.to_string(), decimal: d }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub level: usize,
    pub lower: Rational,
    pub upper: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub command: String,
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub g: String,
    pub delta: String,
    pub x: String,
    pub n_max: usize,
    pub method: String,
    pub factor_limit: usize,
    pub theta: u64,
    pub m_phi: Rational,
    pub m_phi_prime: Rational,
    pub zero_coefficients_excluded: bool,
    pub enclosure: Option<Enclosure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesesSection {
    pub all_passed: bool,
    pub overridden: bool,
    pub delta_splits: bool,
    pub checks: Vec<Check>,
}

impl HypothesesSection {
    pub fn new(h: &Hypotheses, overridden: bool) -> Self {
        HypothesesSection {
            all_passed: h.all_passed(),
            overridden,
            delta_splits: h.delta_splits,
            checks: h
                .checks
                .iter()
                .map(|c| Check { name: c.name.to_string(), passed: c.passed, detail: c.detail.clone() })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceValuation {
    pub place: String,
    /// `null` stands for `+inf` (the zero polynomial).
    pub valuation: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub deg_a: Option<usize>,
    pub norm_s_log: Option<u64>,
    pub primitive_part_degree: Option<usize>,
    pub has_primitive: Option<bool>,
    pub valuations_at_s: Vec<PlaceValuation>,
}

impl From<&OrbitRecord> for Record {
    fn from(r: &OrbitRecord) -> Self {
        Record {
            n: r.n,
            a: r.a.to_string(),
            b: r.b.to_string(),
            deg_a: r.deg_a,
            norm_s_log: r.norm_s_log,
            primitive_part_degree: r.primitive_part_degree,
            has_primitive: r.has_primitive,
            valuations_at_s: r
                .valuations_at_s
                .iter()
                .map(|(v, e)| PlaceValuation {
                    place: v.to_string(),
                    valuation: match e {
                        Valuation::Finite(e) => Some(*e),
                        Valuation::Infinity => None,
                    },
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub n: usize,
    pub factors: Vec<(String, u32)>,
    pub new_primes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsigmondySection {
    pub method: String,
    pub upto: usize,
    pub set: Vec<usize>,
    pub set_excluding_a0: Vec<usize>,
    pub variants_differ: bool,
    pub max: Option<usize>,
    pub verdict: String,
    pub partial: bool,
    pub transcript: Vec<Step>,
}

impl ZsigmondySection {
    pub fn new(z: &ZsigmondySet, v: &Verdict, partial: bool) -> Self {
        ZsigmondySection {
            method: z.method.name().to_string(),
            upto: z.upto,
            set: z.members.iter().copied().collect(),
            set_excluding_a0: z.members_excluding_a0.iter().copied().collect(),
            variants_differ: z.members != z.members_excluding_a0,
            max: z.max(),
            verdict: v.label().to_string(),
            partial,
            transcript: z
                .transcript
                .iter()
                .map(|s| Step {
                    n: s.n,
                    factors: s.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
                    new_primes: s.new_primes.iter().map(|p| p.to_string()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSection {
    pub integer_part: String,
    pub radicand: u64,
    pub n: u64,
    pub s_size: usize,
    pub s: Vec<String>,
    pub decimal: String,
    pub n_by_convention: bool,
    pub g_zero: bool,
}

impl BoundSection {
    pub fn new(b: &BoundDescriptor, s: Vec<String>) -> Self {
        BoundSection {
            integer_part: b.integer_part.to_string(),
            radicand: b.radicand,
            n: b.n,
            s_size: b.s_size,
            s,
            decimal: b.decimal(),
            n_by_convention: b.n_by_convention,
            g_zero: b.g_zero,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationEntry {
    pub name: String,
    pub status: String,
    pub detail: String,
}

impl VerificationEntry {
    pub fn new(name: impl Into<String>, v: &Verification) -> Self {
        VerificationEntry { name: name.into(), status: v.status().to_string(), detail: v.detail().to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub version: String,
    pub budget: usize,
    /// First orbit index the degree budget refused.
    pub stopped_at: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub instance: Instance,
    pub hypotheses: HypothesesSection,
    pub records: Vec<Record>,
    pub zsigmondy: Option<ZsigmondySection>,
    pub bound: Option<BoundSection>,
    pub verifications: Vec<VerificationEntry>,
    pub meta: Meta,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

impl Report {
    /// Orbit table, or the verification table for `verify`.
    pub fn to_csv(&self) -> String {
        if self.instance.command == "verify" {
            let mut rows = vec![vec!["name".into(), "status".into(), "detail".into()]];
            rows.extend(self.verifications.iter().map(|v| vec![v.name.clone(), v.status.clone(), v.detail.clone()]));
            return csv_string(rows);
        }
        let mut rows = vec![["n", "deg_a", "norm_s_log", "primitive_part_degree", "has_primitive", "a", "b"]
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()];
        for r in &self.records {
            rows.push(vec![
                r.n.to_string(),
                opt(&r.deg_a),
                opt(&r.norm_s_log),
                opt(&r.primitive_part_degree),
                opt(&r.has_primitive),
                r.a.clone(),
                r.b.clone(),
            ]);
        }
        csv_string(rows)
    }

    pub fn to_text(&self) -> String {
        let i = &self.instance;
        let mut out = format!(
            "instance: q = {} (p = {}, k = {}), g = {}, Δ = {}, x = {}, n_max = {}\n",
            i.q, i.p, i.k, i.g, i.delta, i.x, i.n_max
        );
        out += &format!(
            "constants: M = {}, M' = {}, Θ = {}\n",
            i.m_phi.exact, i.m_phi_prime.exact, i.theta
        );
        if let Some(e) = &i.enclosure {
            out += &format!("ĥ(x) ∈ [{}, {}] (level {})\n", e.lower.exact, e.upper.exact, e.level);
        }
        out += "hypotheses:";
        if self.hypotheses.overridden {
            out += " (overridden)";
        }
        out += "\n";
        for c in &self.hypotheses.checks {
            out += &format!("  {:<18} {}  {}\n", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
        }
        out += "records:\n";
        for r in &self.records {
            let deg = r.deg_a.map(|d| d.to_string()).unwrap_or_else(|| "-inf".into());
            let prim = match r.has_primitive {
                Some(true) => "primitive",
                Some(false) => "no primitive divisor",
                None => "",
            };
            let a = if r.a.len() > 80 { format!("{}...", &r.a[..80]) } else { r.a.clone() };
            out += &format!("  n = {:<3} deg A = {:<8} {:<22} A = {}", r.n, deg, prim, a);
            if r.b != "1" {
                out += &format!("  B = {}", r.b);
            }
            out += "\n";
        }
        if let Some(z) = &self.zsigmondy {
            out += &format!(
                "zsigmondy ({}, n <= {}): {:?}, verdict {}{}\n",
                z.method,
                z.upto,
                z.set,
                z.verdict,
                if z.partial { " (partial)" } else { "" }
            );
            if z.variants_differ {
                out += &format!("  without A_0: {:?}\n", z.set_excluding_a0);
            }
        }
        if let Some(b) = &self.bound {
            out += &format!(
                "bound: {} (C = {}, D = {}, N = {}, |S| = {})\n",
                b.decimal, b.integer_part, b.radicand, b.n, b.s_size
            );
        }
        if !self.verifications.is_empty() {
            out += "verifications:\n";
            for v in &self.verifications {
                out += &format!("  {:<28} {:<12} {}\n", v.name, v.status, v.detail);
            }
        }
        for w in &self.meta.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}
