//! Fixed-format MPS writer.
//!
//! Columns and rows get eight-character names (`C0000001`, `R0000001`); the
//! readable model names are listed in the leading comment block. All integer
//! columns sit inside one `INTORG`/`INTEND` marker pair and carry explicit
//! bounds, since some readers default marked columns to [0, 1].

use std::fmt::Write;

use super::milp::{MilpModel, Relation, VarKind};

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

/// One data line: fields start at columns 2, 5, 15, 25, 40, 50.
fn line(out: &mut String, f1: &str, f2: &str, entries: &[(&str, String)]) {
    let mut s = format!(" {f1:<2} {f2:<8}");
    for (k, (name, value)) in entries.iter().enumerate() {
        if k == 1 {
            s.push(' ');
        }
        let _ = write!(s, "  {name:<8}  {value:>12}");
    }
    out.push_str(s.trim_end());
    out.push('\n');
}

pub fn export_mps(model: &MilpModel) -> Vec<u8> {
    let n = model.variables.len();
    let mut out = String::new();
    out.push_str("* DCPSP placement model, minimization, money in milli-units\n");
    for (j, v) in model.variables.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", col_name(j), v.name);
    }
    out.push_str("NAME          DCPSP\nROWS\n N  COST\n");
    for (i, c) in model.constraints.iter().enumerate() {
        let kind = match c.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        let _ = writeln!(out, " {kind}  {}", row_name(i));
    }

    let mut by_col: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (i, c) in model.constraints.iter().enumerate() {
        for &(j, a) in &c.terms {
            if a != 0 {
                by_col[j].push((i, a));
            }
        }
    }

    out.push_str("COLUMNS\n");
    let marker = |out: &mut String, tag: &str| {
        let _ = writeln!(out, "    MARKER                 'MARKER'                 '{tag}'");
    };
    let mut in_int = false;
    for j in 0..n {
        let int = model.variables[j].kind != VarKind::Continuous;
        if int != in_int {
            marker(&mut out, if int { "INTORG" } else { "INTEND" });
            in_int = int;
        }
        let mut entries: Vec<(String, String)> = Vec::new();
        if model.objective[j] != 0 || by_col[j].is_empty() {
            entries.push(("COST".into(), model.objective[j].to_string()));
        }
        entries.extend(by_col[j].iter().map(|&(i, a)| (row_name(i), a.to_string())));
        let name = col_name(j);
        for pair in entries.chunks(2) {
            let refs: Vec<(&str, String)> = pair.iter().map(|(r, v)| (r.as_str(), v.clone())).collect();
            line(&mut out, "", &name, &refs);
        }
    }
    if in_int {
        marker(&mut out, "INTEND");
    }

    out.push_str("RHS\n");
    let rhs: Vec<(String, String)> = model
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| c.rhs != 0)
        .map(|(i, c)| (row_name(i), c.rhs.to_string()))
        .collect();
    for pair in rhs.chunks(2) {
        let refs: Vec<(&str, String)> = pair.iter().map(|(r, v)| (r.as_str(), v.clone())).collect();
        line(&mut out, "", "RHS", &refs);
    }

    // Every row is one-sided.
    out.push_str("RANGES\n");

    out.push_str("BOUNDS\n");
    for (j, v) in model.variables.iter().enumerate() {
        let name = col_name(j);
        let bnd = |out: &mut String, kind: &str, value: Option<i64>| match value {
            Some(x) => line(out, kind, "BND", &[(&name, x.to_string())]),
            None => line(out, kind, "BND", &[(&name, String::new())]),
        };
        if v.kind == VarKind::Binary && v.lower == 0 && v.upper == Some(1) {
            bnd(&mut out, "BV", None);
            continue;
        }
        match v.upper {
            Some(u) if u == v.lower => bnd(&mut out, "FX", Some(u)),
            Some(u) => {
                if v.lower != 0 {
                    bnd(&mut out, "LO", Some(v.lower));
                }
                bnd(&mut out, "UP", Some(u));
            }
            None => {
                if v.lower != 0 {
                    bnd(&mut out, "LO", Some(v.lower));
                }
                bnd(&mut out, "PL", None);
            }
        }
    }
    out.push_str("ENDATA\n");
    out.into_bytes()
}
