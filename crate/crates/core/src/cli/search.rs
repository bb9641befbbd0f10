//! Grid scan over `(g, Δ, x)` for nonempty Zsigmondy sets.

use serde::{Deserialize, Serialize};

use super::report::{self, Step};
use super::{resolve_common, CliError, Format, Outcome, SearchArgs, Settings, EXIT_OK, EXIT_VIOLATION};
use crate::drinfeld::DrinfeldModule;
use crate::gf::Field;
use crate::polyring::Polynomial;
use crate::zsigmondy::{self as zs, DivisibilitySequence, Method};

/// Refuse grids larger than this many cells.
pub const MAX_CELLS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub g: String,
    pub delta: String,
    pub x: String,
    /// `skipped`, `ok`, `partial` or `hit`.
    pub status: String,
    pub failed_hypotheses: Vec<String>,
    pub upto: usize,
    pub set: Vec<usize>,
    pub verdict: Option<String>,
    /// Factor-method recomputation agrees with the gcd method (hits only).
    pub factor_confirmed: Option<bool>,
    pub evidence: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub skipped: usize,
    pub examined: usize,
    pub partial: usize,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub grid: Grid,
    pub summary: Summary,
    pub cells: Vec<Cell>,
    pub meta: report::Meta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub p: u64,
    pub k: u32,
    pub n_max: usize,
    pub g: String,
    pub delta: String,
    pub x: String,
}

/// Inclusive degree range "LO-HI" or a single degree "D".
fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad degree range {s:?}"));
    match s.split_once('-') {
        Some((lo, hi)) => Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?)),
        None => {
            let d = s.trim().parse().map_err(|_| bad())?;
            Ok((d, d))
        }
    }
}

/// Every polynomial with degree in `[lo, hi]`, by degree then by the
/// base-`q` integer of its coefficient list; zero first when `with_zero`.
fn enumerate(field: &Field, lo: usize, hi: usize, with_zero: bool) -> Result<Vec<Polynomial>, CliError> {
    let q = field.cardinality() as usize;
    let mut out = Vec::new();
    if with_zero && lo == 0 && lo <= hi {
        out.push(Polynomial::zero(field));
    }
    for d in lo..=hi {
        let count = q
            .checked_pow(d as u32 + 1)
            .filter(|c| *c <= MAX_CELLS * q)
            .ok_or_else(|| CliError::Usage(format!("degree range up to {hi} is too large")))?;
        for i in 0..count {
            let mut n = i;
            let coeffs: Vec<u32> = (0..=d)
                .map(|_| {
                    let c = (n % q) as u32;
                    n /= q;
                    c
                })
                .collect();
            if coeffs[d] != 0 {
                out.push(Polynomial::from_raw(field.clone(), coeffs));
            }
        }
    }
    Ok(out)
}

fn axis(
    field: &Field,
    fixed: &Option<String>,
    file_fixed: Option<String>,
    range: &Option<String>,
    file_range: Option<String>,
    default_range: &str,
    with_zero: bool,
) -> Result<(Vec<Polynomial>, String), CliError> {
    if let Some(text) = fixed.clone().or(file_fixed) {
        return Ok((vec![Polynomial::parse(field, &text)?], text));
    }
    let r = range.clone().or(file_range).unwrap_or_else(|| default_range.to_string());
    let (lo, hi) = parse_range(&r)?;
    Ok((enumerate(field, lo, hi, with_zero)?, format!("deg {r}")))
}

fn scan_cell(st: &Settings, g: &Polynomial, delta: &Polynomial, x: &Polynomial) -> Result<Cell, CliError> {
    let mut cell = Cell {
        g: g.to_string(),
        delta: delta.to_string(),
        x: x.to_string(),
        status: "ok".into(),
        failed_hypotheses: Vec::new(),
        upto: 0,
        set: Vec::new(),
        verdict: None,
        factor_confirmed: None,
        evidence: Vec::new(),
    };
    let m = DrinfeldModule::rank2(g.clone(), delta.clone())?;
    let xr = x.clone().into();
    let hyp = zs::check_hypotheses(&m, &xr, st.seed, st.budget)?;
    if !hyp.all_passed() {
        cell.status = "skipped".into();
        cell.failed_hypotheses = hyp.failed().iter().map(|s| s.to_string()).collect();
        return Ok(cell);
    }
    let seq = DivisibilitySequence::compute(&m, &xr, st.n_max, st.budget)?;
    let z = zs::zsigmondy_set(&seq, Method::Gcd, st.n_max, st.seed)?;
    let bound = zs::theorem_bound(&m, st.seed)?;
    cell.upto = z.upto;
    cell.set = z.members.iter().copied().collect();
    cell.verdict = Some(zs::verdict(&z, &bound, true).label().to_string());
    if seq.is_partial() {
        cell.status = "partial".into();
    }
    if !z.members.is_empty() {
        cell.status = "hit".into();
        let f = zs::zsigmondy_set(&seq, Method::Factor, z.upto, st.seed)?;
        cell.factor_confirmed = Some(f.members == z.members);
        cell.evidence = report::ZsigmondySection::new(&f, &zs::Verdict::Suppressed, false).transcript;
    }
    Ok(cell)
}

pub fn run(a: &SearchArgs, env_budget: Option<&str>) -> Result<Outcome, CliError> {
    let mut st = resolve_common(&a.common, env_budget)?;
    let field = st.field.clone();
    let mut extra = std::mem::take(&mut st.extra);
    let (gs, g_text) = axis(&field, &a.g, extra.remove("g"), &a.g_deg, extra.remove("g_deg"), "0-1", true)?;
    let (ds, d_text) =
        axis(&field, &a.delta, extra.remove("delta"), &a.delta_deg, extra.remove("delta_deg"), "0", false)?;
    let (xs, x_text) = axis(&field, &a.x, extra.remove("x"), &a.x_deg, extra.remove("x_deg"), "0-1", false)?;
    if let Some(key) = extra.keys().next() {
        return Err(CliError::Usage(format!("config: unknown key {key:?}")));
    }
    let total = gs.len().saturating_mul(ds.len()).saturating_mul(xs.len());
    if total > MAX_CELLS {
        return Err(CliError::Usage(format!("grid has {total} cells, limit {MAX_CELLS}")));
    }
    let mut cells = Vec::with_capacity(total);
    for d in ds.iter().filter(|d| !d.is_zero()) {
        for g in &gs {
            for x in &xs {
                cells.push(scan_cell(&st, g, d, x)?);
            }
        }
    }
    let count = |s: &str| cells.iter().filter(|c| c.status == s).count();
    let summary = Summary {
        cells: cells.len(),
        skipped: count("skipped"),
        examined: cells.len() - count("skipped"),
        partial: count("partial"),
        hits: count("hit"),
    };
    let violated = cells.iter().any(|c| c.verdict.as_deref() == Some("violated"));
    let report = SearchReport {
        grid: Grid { p: st.p, k: st.k, n_max: st.n_max, g: g_text, delta: d_text, x: x_text },
        summary,
        cells,
        meta: report::Meta {
            seed: st.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            budget: st.budget,
            stopped_at: None,
            warnings: Vec::new(),
        },
    };
    let stdout = match st.format {
        Format::Json => report::to_json(&report),
        Format::Csv => to_csv(&report),
        Format::Text => to_text(&report),
    };
    Ok(Outcome {
        code: if violated { EXIT_VIOLATION } else { EXIT_OK },
        stdout,
        stderr: String::new(),
    })
}

fn to_csv(r: &SearchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["g", "delta", "x", "status", "upto", "set", "verdict", "factor_confirmed"]).expect("write");
    for c in &r.cells {
        let set: Vec<String> = c.set.iter().map(|n| n.to_string()).collect();
        w.write_record([
            c.g.as_str(),
            &c.delta,
            &c.x,
            &c.status,
            &c.upto.to_string(),
            &set.join(" "),
            c.verdict.as_deref().unwrap_or(""),
            &c.factor_confirmed.map(|b| b.to_string()).unwrap_or_default(),
        ])
        .expect("write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn to_text(r: &SearchReport) -> String {
    let s = &r.summary;
    let mut out = format!(
        "grid over F_{}^{}: g {}, Δ {}, x {}, n_max = {}\n{} cells, {} skipped, {} examined, {} partial, {} hits\n",
        r.grid.p, r.grid.k, r.grid.g, r.grid.delta, r.grid.x, r.grid.n_max, s.cells, s.skipped, s.examined, s.partial,
        s.hits
    );
    for c in &r.cells {
        out += &format!("  g = {:<12} Δ = {:<12} x = {:<12} {:<8}", c.g, c.delta, c.x, c.status);
        if c.status == "skipped" {
            out += &format!(" ({})", c.failed_hypotheses.join(", "));
        } else {
            out += &format!(" Z ∩ [1,{}] = {:?}", c.upto, c.set);
        }
        if let Some(f) = c.factor_confirmed {
            out += &format!(" factor check {}", if f { "agrees" } else { "DISAGREES" });
        }
        out += "\n";
    }
    out
}
