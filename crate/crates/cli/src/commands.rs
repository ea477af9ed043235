//! The three commands, producing documents that `output` renders.

use rayon::prelude::*;
use serde::Serialize;
use sobolev_core::families::u_minus_one;
use sobolev_core::report::Check;
use sobolev_core::scalar::render;
use sobolev_core::sobolev::{classical_connection, SobolevForm, SobolevSequence};
use sobolev_core::standard_ops::OrthoSequence;
use sobolev_core::suites::{run_suite, Suite, Target};
use sobolev_core::{Poly, Result};

use crate::args::{ConfigError, Resolved, TableKind};

fn coeffs(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(render).collect()
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct StandardRow {
    pub n: usize,
    pub p_coeffs: Vec<String>,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    pub dsq: String,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct SobolevRow {
    pub n: usize,
    #[serde(rename = "Q_coeffs")]
    pub q_coeffs: Vec<String>,
    #[serde(rename = "Dsq")]
    pub dsq: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct MomentRow {
    pub n: usize,
    pub moment: String,
}

#[derive(Serialize, Debug)]
#[serde(untagged)]
pub enum Rows {
    Standard(Vec<StandardRow>),
    Sobolev(Vec<SobolevRow>),
    Moments(Vec<MomentRow>),
}

#[derive(Serialize, Debug)]
pub struct Table {
    pub command: &'static str,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    pub rows: Rows,
}

/// Runs `f` over `0..=n`, on the thread pool when `parallel`; order is preserved either way.
fn rows<T: Send>(n: usize, parallel: bool, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if parallel {
        (0..=n).into_par_iter().map(f).collect()
    } else {
        (0..=n).map(f).collect()
    }
}

pub fn table(kind: TableKind, run: &Resolved) -> Result<Table> {
    let n = run.n;
    match kind {
        TableKind::Standard => {
            let seq = OrthoSequence::new(run.u.clone());
            // fill the memo once so the rows only read it
            seq.poly(n + 1)?;
            let rows = rows(n, run.parallel, |k| {
                let (b, c) = seq.ttrr(k)?;
                Ok(StandardRow {
                    n: k,
                    p_coeffs: coeffs(&seq.poly(k)?),
                    b: render(&b),
                    c: render(&c),
                    dsq: render(&seq.norm_sq(k)?),
                })
            })?;
            Ok(Table { command: "table standard", source: run.source(), lambda: None, rows: Rows::Standard(rows) })
        }
        TableKind::Sobolev => {
            let form = SobolevForm::new(run.u.clone(), run.lambda.clone())?;
            let seq = SobolevSequence::new(form.clone());
            seq.norm_sq(n)?;
            let conn = match run.spec.as_ref().filter(|s| s.is_classical()) {
                Some(spec) => Some(classical_connection(&form, &u_minus_one(spec)?, n)?),
                None => None,
            };
            let rows = rows(n, run.parallel, |k| {
                Ok(SobolevRow {
                    n: k,
                    q_coeffs: coeffs(&seq.poly(k)?),
                    dsq: render(&seq.norm_sq(k)?),
                    f: conn.as_ref().map(|c| render(&c.f[k])),
                    e: conn.as_ref().map(|c| render(&c.e[k])),
                })
            })?;
            Ok(Table {
                command: "table sobolev",
                source: run.source(),
                lambda: Some(render(&run.lambda)),
                rows: Rows::Sobolev(rows),
            })
        }
    }
}

pub fn moments(run: &Resolved) -> Result<Table> {
    let m = run.u.moments(run.n + 1)?;
    let rows = m.iter().enumerate().map(|(n, v)| MomentRow { n, moment: render(v) }).collect();
    Ok(Table { command: "moments", source: run.source(), lambda: None, rows: Rows::Moments(rows) })
}

#[derive(Serialize, Debug)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<Check>,
    /// Set when the suite could not run to completion (e.g. a breakdown).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub all_checks: Vec<Check>,
}

#[derive(Serialize, Debug)]
pub struct Verification {
    pub source: String,
    pub lambda: String,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn run_one(suite: Suite, target: &Target) -> SuiteResult {
    match run_suite(suite, target) {
        Ok(report) => SuiteResult {
            suite: suite.name(),
            passed: report.passed(),
            checks: report.checks.len(),
            failures: report.failures().cloned().collect(),
            error: None,
            all_checks: report.checks,
        },
        Err(e) => SuiteResult {
            suite: suite.name(),
            passed: false,
            checks: 0,
            failures: Vec::new(),
            error: Some(e.to_string()),
            all_checks: Vec::new(),
        },
    }
}

/// Runs the requested suites; suites that need a named family are skipped under `all`
/// and rejected when asked for by name.
pub fn verify(suites: &[Suite], explicit: bool, run: &Resolved) -> std::result::Result<Verification, ConfigError> {
    let target = Target {
        u: run.u.clone(),
        spec: run.spec.clone(),
        lambda: run.lambda.clone(),
        n: run.n,
        depth: run.depth,
        k_max: run.k_max,
        m_max: run.m_max,
    };
    let chosen: Vec<Suite> = suites.iter().copied().filter(|s| s.applies_to(&target)).collect();
    if explicit && chosen.is_empty() {
        return Err(ConfigError::new(
            "<suite>",
            format!(
                "{} does not apply to {} (it needs {})",
                suites[0],
                run.source(),
                match suites[0] {
                    Suite::Connection => "--family jacobi or --family meixner",
                    _ => "a built-in --family with a closed norm formula",
                }
            ),
        ));
    }
    let results: Vec<SuiteResult> = if run.parallel {
        chosen.par_iter().map(|&s| run_one(s, &target)).collect()
    } else {
        chosen.iter().map(|&s| run_one(s, &target)).collect()
    };
    Ok(Verification {
        source: run.source(),
        lambda: render(&run.lambda),
        passed: results.iter().all(|r| r.passed),
        suites: results,
    })
}
