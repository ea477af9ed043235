//! JSON and CSV rendering. Lists inside a CSV cell are joined with `;`.

use crate::commands::{Rows, Table, Verification};

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    cells.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",")
}

pub fn table_json(t: &Table) -> String {
    serde_json::to_string_pretty(t).expect("tables serialize")
}

pub fn table_csv(t: &Table) -> String {
    let mut lines = Vec::new();
    match &t.rows {
        Rows::Standard(rows) => {
            lines.push("n,p_coeffs,B,C,dsq".to_string());
            for r in rows {
                lines.push(csv_line(&[r.n.to_string(), r.p_coeffs.join(";"), r.b.clone(), r.c.clone(), r.dsq.clone()]));
            }
        }
        Rows::Sobolev(rows) => {
            let classical = rows.first().is_some_and(|r| r.f.is_some());
            lines.push(if classical { "n,Q_coeffs,Dsq,f,e" } else { "n,Q_coeffs,Dsq" }.to_string());
            for r in rows {
                let mut cells = vec![r.n.to_string(), r.q_coeffs.join(";"), r.dsq.clone()];
                if classical {
                    cells.push(r.f.clone().unwrap_or_default());
                    cells.push(r.e.clone().unwrap_or_default());
                }
                lines.push(csv_line(&cells));
            }
        }
        Rows::Moments(rows) => {
            lines.push("n,moment".to_string());
            for r in rows {
                lines.push(csv_line(&[r.n.to_string(), r.moment.clone()]));
            }
        }
    }
    lines.join("\n")
}

pub fn verification_json(v: &Verification) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// One line per check (every check, not only failures), plus error lines for suites
/// that could not complete.
pub fn verification_csv(v: &Verification) -> String {
    let mut lines = vec!["suite,check,passed,detail".to_string()];
    for s in &v.suites {
        for c in &s.all_checks {
            lines.push(csv_line(&[s.suite.to_string(), c.name.clone(), c.passed.to_string(), c.detail.clone()]));
        }
        if let Some(e) = &s.error {
            lines.push(csv_line(&[s.suite.to_string(), "error".into(), "false".into(), e.clone()]));
        }
    }
    lines.join("\n")
}
