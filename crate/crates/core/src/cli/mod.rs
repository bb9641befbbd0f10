//! The `zsig` command line: argument and config resolution, and the
//! `orbit`, `zsigmondy`, `verify` and `search` subcommands.
//!
//! Exit codes: 0 success, 1 hypothesis failure, 2 parse or config error,
//! 3 a theorem-level check came out violated.

mod config;
pub mod report;
mod search;

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::drinfeld::{DrinfeldModule, DEFAULT_DEGREE_BUDGET};
use crate::gf::{Field, FieldDescriptor};
use crate::heights::{self, PlaceSet};
use crate::polyring::{Polynomial, RationalFunction};
use crate::zsigmondy::{self as zs, DivisibilitySequence, Method, Verification, ZsigError};

use report::{BoundSection, Enclosure, HypothesesSection, Instance, Meta, Report, VerificationEntry, ZsigmondySection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Environment variable overriding the default degree budget.
pub const BUDGET_ENV: &str = "ZSIG_DEGREE_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] ZsigError),
}

impl From<crate::polyring::PolyError> for CliError {
    fn from(e: crate::polyring::PolyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::gf::GfError> for CliError {
    fn from(e: crate::gf::GfError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::drinfeld::DrinfeldError> for CliError {
    fn from(e: crate::drinfeld::DrinfeldError) -> Self {
        CliError::Compute(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "zsig", version, about = "Orbits, heights and Zsigmondy sets of rank-2 Drinfeld modules over F_q(T)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print A_n, B_n, degrees and S-norms of the orbit of x.
    Orbit(InstanceArgs),
    /// Compute the Zsigmondy set and compare it with the explicit bound.
    Zsigmondy(InstanceArgs),
    /// Run every verification suite on one instance.
    Verify(InstanceArgs),
    /// Scan a grid of (g, Δ, x) for nonempty Zsigmondy sets.
    Search(SearchArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Characteristic of the coefficient field.
    #[arg(long)]
    pub p: Option<u64>,
    /// Extension degree; q = p^k.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// gcd or factor.
    #[arg(long)]
    pub method: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    pub format: Option<String>,
    /// Maximum degree of any orbit term.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Largest n handled by full factorization.
    #[arg(long = "factor-limit")]
    pub factor_limit: Option<usize>,
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    /// Proceed when hypotheses fail; the bound verdict is suppressed.
    #[arg(long = "override-torsion")]
    pub override_torsion: bool,
    /// Also compare Zsigmondy sets over F_{q^N}.
    #[arg(long)]
    pub basechange: bool,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fixed g instead of a degree range.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    /// Degree range of g, "LO-HI" or "D".
    #[arg(long = "g-deg")]
    pub g_deg: Option<String>,
    #[arg(long = "delta-deg")]
    pub delta_deg: Option<String>,
    #[arg(long = "x-deg")]
    pub x_deg: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::Usage(format!("unknown format {other:?} (json, csv, text)"))),
        }
    }
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    match s {
        "gcd" => Ok(Method::Gcd),
        "factor" => Ok(Method::Factor),
        other => Err(CliError::Usage(format!("unknown method {other:?} (gcd, factor)"))),
    }
}

/// Fully resolved settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct Settings {
    pub field: Field,
    pub p: u64,
    pub k: u32,
    pub n_max: usize,
    pub seed: u64,
    pub method: Method,
    pub format: Format,
    pub budget: usize,
    pub factor_limit: usize,
    /// Remaining config-file entries (g, delta, x and grid keys).
    pub extra: BTreeMap<String, String>,
}

/// Flag, then config file, then (for the budget only) environment, then default.
fn resolve_common(c: &CommonArgs, env_budget: Option<&str>) -> Result<Settings, CliError> {
    let mut file = match &c.config {
        Some(path) => config::load(path)?,
        None => BTreeMap::new(),
    };
    fn take<T: std::str::FromStr>(
        flag: Option<T>,
        file: &mut BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        let from_file = match file.remove(key) {
            Some(v) => Some(v.parse::<T>().map_err(|_| CliError::Usage(format!("config: bad value {v:?} for {key}")))?),
            None => None,
        };
        Ok(flag.or(from_file))
    }
    let p = take(c.p, &mut file, "p")?.unwrap_or(3);
    let k = take(c.k, &mut file, "k")?.unwrap_or(1);
    let n_max = take(c.nmax, &mut file, "nmax")?.unwrap_or(4);
    let seed = take(c.seed, &mut file, "seed")?.unwrap_or(0);
    let method = parse_method(&take(c.method.clone(), &mut file, "method")?.unwrap_or_else(|| "gcd".into()))?;
    let format = Format::parse(&take(c.format.clone(), &mut file, "format")?.unwrap_or_else(|| "text".into()))?;
    let factor_limit = take(c.factor_limit, &mut file, "factor_limit")?.unwrap_or(3);
    let env = match env_budget {
        Some(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{BUDGET_ENV}: bad value {v:?}")))?,
        ),
        None => None,
    };
    let budget = take(c.budget, &mut file, "budget")?.or(env).unwrap_or(DEFAULT_DEGREE_BUDGET);
    let field = FieldDescriptor::new(p, k)?;
    Ok(Settings { field, p, k, n_max, seed, method, format, budget, factor_limit, extra: file })
}

/// A single `(φ, x)` instance plus its settings.
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub settings: Settings,
    pub g: Polynomial,
    pub delta: Polynomial,
    pub x: RationalFunction,
    pub override_hypotheses: bool,
    pub basechange: bool,
}

impl InstanceSpec {
    pub fn resolve(a: &InstanceArgs, env_budget: Option<&str>) -> Result<Self, CliError> {
        let mut settings = resolve_common(&a.common, env_budget)?;
        let mut text = |flag: &Option<String>, key: &str| -> String {
            let from_file = settings.extra.remove(key);
            flag.clone().or(from_file).unwrap_or_else(|| "1".into())
        };
        let (g, delta, x) = (text(&a.g, "g"), text(&a.delta, "delta"), text(&a.x, "x"));
        if let Some(key) = settings.extra.keys().next() {
            return Err(CliError::Usage(format!("config: unknown key {key:?}")));
        }
        let f = &settings.field;
        Ok(InstanceSpec {
            g: Polynomial::parse(f, &g)?,
            delta: Polynomial::parse(f, &delta)?,
            x: RationalFunction::parse(f, &x)?,
            settings,
            override_hypotheses: a.override_torsion,
            basechange: a.basechange,
        })
    }

    pub fn module(&self) -> Result<DrinfeldModule, CliError> {
        Ok(DrinfeldModule::rank2(self.g.clone(), self.delta.clone())?)
    }
}

/// Result of one invocation: exit code and the text destined for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first) with the budget
/// environment value `env_budget`.
pub fn run_with_env<I, S>(args: I, env_budget: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli.command, env_budget) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(CliError::Compute(e)) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(BUDGET_ENV).ok();
    run_with_env(args, env.as_deref())
}

fn dispatch(cmd: &Command, env_budget: Option<&str>) -> Result<Outcome, CliError> {
    match cmd {
        Command::Orbit(a) => render(analyze(&InstanceSpec::resolve(a, env_budget)?, Mode::Orbit)?),
        Command::Zsigmondy(a) => render(analyze(&InstanceSpec::resolve(a, env_budget)?, Mode::Zsigmondy)?),
        Command::Verify(a) => render(analyze(&InstanceSpec::resolve(a, env_budget)?, Mode::Verify)?),
        Command::Search(a) => search::run(a, env_budget),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Orbit,
    Zsigmondy,
    Verify,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Orbit => "orbit",
            Mode::Zsigmondy => "zsigmondy",
            Mode::Verify => "verify",
        }
    }
}

/// A built report with its exit code and output format.
pub struct Analysis {
    pub report: Report,
    pub code: i32,
    pub format: Format,
}

fn render(a: Analysis) -> Result<Outcome, CliError> {
    let stdout = match a.format {
        Format::Json => report::to_json(&a.report),
        Format::Csv => a.report.to_csv(),
        Format::Text => a.report.to_text(),
    };
    let stderr = match a.code {
        EXIT_HYPOTHESIS => {
            let failed: Vec<&str> =
                a.report.hypotheses.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            format!("hypotheses failed: {}\n", failed.join(", "))
        }
        EXIT_VIOLATION => "a theorem-level check was violated\n".to_string(),
        _ => String::new(),
    };
    Ok(Outcome { code: a.code, stdout, stderr })
}

fn place_names(s: &PlaceSet) -> Vec<String> {
    s.iter().map(|v| v.to_string()).collect()
}

/// Builds the report for one instance.
pub fn analyze(spec: &InstanceSpec, mode: Mode) -> Result<Analysis, CliError> {
    let st = &spec.settings;
    let m = spec.module()?;
    let s = zs::compute_s(&m, st.seed)?;
    let hyp = zs::check_hypotheses(&m, &spec.x, st.seed, st.budget)?;
    let seq = DivisibilitySequence::compute(&m, &spec.x, st.n_max, st.budget)?;
    let last = seq.last_index();
    let k = m.height_constants();
    let mut warnings = Vec::new();
    if let Some(n) = seq.stopped_at {
        warnings.push(format!("degree budget {} reached: orbit computed only up to n = {}", st.budget, n - 1));
    }
    if k.zero_coefficients_excluded {
        warnings.push("g = 0 is left out of the height-constant maxima".into());
    }
    if spec.x.is_zero() {
        warnings.push("x = 0 is a torsion point; every term vanishes".into());
    }

    let enclosure = if spec.x.is_polynomial() && last > 0 {
        let e = m.enclosure_from_height(heights::height(&seq.terms[last].value), last);
        Some(Enclosure { level: e.level, lower: (&e.lower).into(), upper: (&e.upper).into() })
    } else {
        None
    };
    let instance = Instance {
        command: mode.name().into(),
        p: st.p,
        k: st.k,
        q: m.q(),
        g: spec.g.to_string(),
        delta: spec.delta.to_string(),
        x: spec.x.to_string(),
        n_max: st.n_max,
        method: st.method.name().into(),
        factor_limit: st.factor_limit,
        theta: m.theta(),
        m_phi: (&k.m_phi).into(),
        m_phi_prime: (&k.m_phi_prime).into(),
        zero_coefficients_excluded: k.zero_coefficients_excluded,
        enclosure,
    };
    let records = if seq.terms.iter().any(|t| t.value.is_zero()) {
        // Primitive parts are undefined once a term vanishes.
        seq.terms
            .iter()
            .map(|t| report::Record {
                n: t.n,
                a: t.numerator().to_string(),
                b: t.denominator().to_string(),
                deg_a: t.numerator().deg(),
                norm_s_log: heights::norm_s_log(t.numerator(), &s).ok(),
                primitive_part_degree: None,
                has_primitive: None,
                valuations_at_s: Vec::new(),
            })
            .collect()
    } else {
        zs::orbit_records(&seq, &s)?.iter().map(report::Record::from).collect()
    };
    let bound = zs::theorem_bound(&m, st.seed)?;
    if bound.n_by_convention {
        warnings.push("Δ is constant: N = 1 by the empty-lcm convention".into());
    }
    let hypotheses = HypothesesSection::new(&hyp, spec.override_hypotheses);
    let meta = Meta {
        seed: st.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        budget: st.budget,
        stopped_at: seq.stopped_at,
        warnings,
    };
    let mut report = Report {
        instance,
        hypotheses,
        records,
        zsigmondy: None,
        bound: Some(BoundSection::new(&bound, place_names(&s))),
        verifications: Vec::new(),
        meta,
    };
    if mode == Mode::Orbit {
        report.bound = None;
        return Ok(Analysis { report, code: EXIT_OK, format: st.format });
    }

    let holds = hyp.all_passed();
    if mode == Mode::Zsigmondy && !holds && !spec.override_hypotheses {
        return Ok(Analysis { report, code: EXIT_HYPOTHESIS, format: st.format });
    }
    let has_zero = seq.terms.iter().any(|t| t.value.is_zero());
    let mut verifications: Vec<(String, Verification)> = Vec::new();
    if !has_zero {
        let upto = if st.method == Method::Factor { st.factor_limit.min(last) } else { last };
        let z = zs::zsigmondy_set(&seq, st.method, upto, st.seed)?;
        let verdict = zs::verdict(&z, &bound, holds);
        let partial = seq.is_partial() || upto < st.n_max;
        verifications.push(("zsigmondy_bound".into(), match &verdict {
            zs::Verdict::Consistent { max } => Verification::Verified(format!(
                "max Z = {} within bound {}",
                max.map(|m| m.to_string()).unwrap_or_else(|| "none".into()),
                bound.decimal()
            )),
            zs::Verdict::Exceeds { max } => {
                Verification::Violated(format!("max Z = {max} exceeds bound {}", bound.decimal()))
            }
            zs::Verdict::Suppressed => Verification::Inconclusive("hypotheses do not hold; no claim".into()),
        }));
        let cross = method_agreement(&seq, st.factor_limit.min(last), st.seed)?;
        verifications.push(("method_agreement".into(), cross));
        report.zsigmondy = Some(ZsigmondySection::new(&z, &verdict, partial));
    }
    if mode == Mode::Verify {
        verifications.extend(verify_suite(spec, &m, &seq, &s, &hyp)?);
    }
    let code = if verifications.iter().any(|(_, v)| v.is_violated()) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    };
    report.verifications = verifications.iter().map(|(n, v)| VerificationEntry::new(n.clone(), v)).collect();
    Ok(Analysis { report, code, format: st.format })
}

/// gcd-method and factor-method primitivity agree for `1 <= n <= upto`.
pub fn method_agreement(seq: &DivisibilitySequence, upto: usize, seed: u64) -> Result<Verification, CliError> {
    if upto == 0 {
        return Ok(Verification::Inconclusive("no terms to compare".into()));
    }
    let a = zs::zsigmondy_set(seq, Method::Gcd, upto, seed)?;
    let b = zs::zsigmondy_set(seq, Method::Factor, upto, seed)?;
    for n in 1..=upto {
        let fac = &b.transcript[n - 1];
        let expanded = seq.a(n)?;
        if !expanded.is_constant() {
            let product = fac.factors.iter().fold(Polynomial::constant(expanded.field(), expanded.leading()), |acc, (p, e)| {
                acc.mul(&p.pow(*e as u64))
            });
            if &product != expanded {
                return Ok(Verification::Violated(format!("factorization of A_{n} does not multiply back")));
            }
        }
    }
    Ok(if a.has_primitive == b.has_primitive && a.members_excluding_a0 == b.members_excluding_a0 {
        Verification::Verified(format!("gcd and factor agree for n <= {upto}"))
    } else {
        Verification::Violated(format!(
            "gcd {:?} vs factor {:?} for n <= {upto}",
            a.has_primitive, b.has_primitive
        ))
    })
}

fn verify_suite(
    spec: &InstanceSpec,
    m: &DrinfeldModule,
    seq: &DivisibilitySequence,
    s: &PlaceSet,
    hyp: &zs::Hypotheses,
) -> Result<Vec<(String, Verification)>, CliError> {
    let st = &spec.settings;
    let last = seq.last_index();
    let mut out = Vec::new();

    // Height decomposition on every nonzero orbit value.
    let mut items = Vec::new();
    for t in seq.terms.iter().filter(|t| !t.value.is_zero()) {
        let (lhs, rhs) = heights::height_decomposition_check(&t.value, s).map_err(ZsigError::from)?;
        items.push(if lhs == rhs {
            Verification::Verified(String::new())
        } else {
            Verification::Violated(format!("n = {}: h = {lhs} but decomposition gives {rhs}", t.n))
        });
    }
    out.push(("height_decomposition".into(), Verification::combine(items, "no nonzero terms")));

    // S-norm never exceeds the degree.
    let mut items = Vec::new();
    for t in seq.terms.iter().filter(|t| !t.value.is_zero()) {
        let a = t.numerator();
        let norm = heights::norm_s_log(a, s).map_err(ZsigError::from)?;
        let deg = a.deg().expect("nonzero") as u64;
        items.push(if norm <= deg {
            Verification::Verified(String::new())
        } else {
            Verification::Violated(format!("n = {}: log Nr^S = {norm} > deg = {deg}", t.n))
        });
    }
    out.push(("norm_at_most_degree".into(), Verification::combine(items, "no nonzero terms")));

    if spec.x.is_polynomial() && !spec.x.is_zero() {
        // Divisibility A_{n-1} | A_n.
        let mut items = Vec::new();
        for n in 1..=last {
            let ok = seq.a(n - 1)?.divides(seq.a(n)?).map_err(ZsigError::from)?;
            items.push(if ok {
                Verification::Verified(String::new())
            } else {
                Verification::Violated(format!("A_{} does not divide A_{n}", n - 1))
            });
        }
        out.push(("divisibility".into(), Verification::combine(items, "no terms beyond A_0")));

        // Enclosures at every level intersect and have the predicted width.
        let consts = m.height_constants();
        let encs: Vec<_> =
            (1..=last).map(|n| m.enclosure_from_height(heights::height(&seq.terms[n].value), n)).collect();
        let mut items = Vec::new();
        for (i, e) in encs.iter().enumerate() {
            let theta_n = num_rational::BigRational::from_integer(num_traits::pow(
                num_bigint::BigInt::from(m.theta()),
                e.level,
            ));
            if e.width() != (&consts.m_phi + &consts.m_phi_prime) / theta_n {
                items.push(Verification::Violated(format!("width at level {} is {}", e.level, e.width())));
            }
            for f in &encs[i + 1..] {
                items.push(if e.intersects(f) {
                    Verification::Verified(String::new())
                } else {
                    Verification::Violated(format!("levels {} and {} are disjoint", e.level, f.level))
                });
            }
        }
        out.push(("enclosure_consistency".into(), Verification::combine(items, "fewer than two levels")));
    }

    let has_zero = seq.terms.iter().any(|t| t.value.is_zero());
    if !has_zero && seq.is_polynomial() {
        let places = zs::sample_places(seq, st.factor_limit, st.seed)?;
        let mut items = Vec::new();
        let mut mono = Vec::new();
        for v in &places {
            items.push(zs::verify_apparition_lemma(v, seq)?);
            mono.push(if zs::valuations_monotone(v, seq)? {
                Verification::Verified(String::new())
            } else {
                Verification::Violated(format!("ord_{v}(A_n) decreases"))
            });
        }
        let n_places = places.len();
        let summary = |v: Verification| match v {
            Verification::Verified(_) => Verification::Verified(format!("{n_places} places checked")),
            other => other,
        };
        out.push(("apparition_lemma".into(), summary(Verification::combine(items, "no sample places"))));
        out.push(("valuation_monotonicity".into(), summary(Verification::combine(mono, "no sample places"))));
        out.push(("local_vanishing".into(), zs::verify_local_vanishing(m, seq, s, hyp)?));
    }

    let growth = zs::verify_growth_inequality(m, seq, s, hyp.all_passed() && !has_zero)?;
    if growth.rows.is_empty() {
        out.push(("growth_inequality".into(), growth.overall.clone()));
    } else {
        for r in &growth.rows {
            out.push((format!("growth_inequality[n={}]", r.n), r.outcome.clone()));
        }
    }

    if spec.basechange {
        let v = if spec.x.is_polynomial() {
            let upto = st.factor_limit.min(st.n_max);
            match zs::verify_zsigmondy_equality(m, spec.x.numerator(), upto, st.seed, st.budget) {
                Ok(chk) => {
                    let mut v = chk.verification;
                    if chk.degree > 1 && !chk.distinct_factors {
                        v = match v {
                            Verification::Verified(d) => {
                                Verification::Verified(format!("{d}; Δ has repeated factors over F_{}", chk.extension_cardinality))
                            }
                            other => other,
                        };
                    }
                    v
                }
                Err(ZsigError::Gf(e)) => Verification::Inconclusive(format!("extension field unavailable: {e}")),
                Err(e) => return Err(e.into()),
            }
        } else {
            Verification::Inconclusive("x is not a polynomial".into())
        };
        out.push(("base_change_equality".into(), v));
    }
    Ok(out)
}
