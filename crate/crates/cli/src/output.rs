//! Report rendering. Every command returns its full output as a string so the
//! bytes written depend only on the inputs.

use std::fmt::Write as _;

use kmzeta::hp::closed_form_value_f64;
use kmzeta::oracles::analytic_class_number;
use kmzeta::siegel::siegel;
use kmzeta::{
    dedekind_sum_b, dedekind_sum_b_reduced, euler_zeta2, reflect_to_minus1, sweep_with, CriterionReport,
    DedekindSumInput, Error, FieldSpec, HpEngine, Rat, Result, SweepEntry, Validity, Witness,
};
use serde::Serialize;

use crate::config::{Format, MRange, RunConfig};
use crate::{Done, Failure, Term};

/// Left-aligned text table with two spaces between columns.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

fn csv_string(headers: &[&str], rows: &[Vec<String>]) -> std::result::Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn json_string<T: Serialize + ?Sized>(value: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize + ?Sized>(
    format: Format,
    headers: &[&str],
    rows: &[Vec<String>],
    value: &T,
) -> std::result::Result<String, Failure> {
    match format {
        Format::Table => Ok(table(headers, rows)),
        Format::Csv => csv_string(headers, rows),
        Format::Json => json_string(value),
    }
}

#[derive(Serialize)]
struct FieldRow {
    m: i64,
    disc: i64,
    validity: Validity,
}

pub fn fields_validate(cfg: &RunConfig, range: &MRange) -> std::result::Result<String, Failure> {
    let fields: Vec<FieldRow> = range
        .0
        .clone()
        .map(|m| cfg.field(m).map(|s| FieldRow { m, disc: s.disc(), validity: s.validity().clone() }))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<String>> = fields
        .iter()
        .map(|f| vec![f.m.to_string(), f.disc.to_string(), f.validity.is_valid().to_string(), f.validity.to_string()])
        .collect();
    render(cfg.format, &["m", "disc", "valid", "validity"], &rows, &fields)
}

pub fn zeta_hp(cfg: &RunConfig, spec: &FieldSpec, term: Term) -> Result<String> {
    let engine = HpEngine::new(spec, cfg.hp_options())?;
    let mut out = format!("m = {}, D = {}\n", spec.m(), spec.disc());
    if term == Term::Total {
        let z = engine.zeta_sum(2)?.scale(&Rat::new(1.into(), 2.into()));
        let _ = writeln!(out, "zeta_K(2,P) = {z}");
        let _ = writeln!(out, "zeta_K(-1,P) = {}", reflect_to_minus1(&z)?);
        let _ = writeln!(out, "approx zeta_K(2,P) = {:.15e}", z.to_f64(spec.disc()));
        return Ok(out);
    }
    let (e1, e2) = engine.units();
    let (name, value) = match term {
        Term::M1 => ("M(2,1,a,a+1)", engine.m_term(2, 1, e1, e2)?),
        Term::M2 => ("M(2,2,a+1,a)", engine.m_term(2, 2, e2, e1)?),
        Term::C1 => ("C(2,1,a,a+1)", engine.c_term(2, 1, e1, e2)?),
        Term::C2 => ("C(2,2,a+1,a)", engine.c_term(2, 2, e2, e1)?),
        Term::Total => unreachable!("handled above"),
    };
    let _ = writeln!(out, "{name} = {value}");
    Ok(out)
}

pub fn zeta_siegel(spec: &FieldSpec, list: bool) -> Result<String> {
    let s = siegel(spec)?;
    let mut out = format!("m = {}, D = {}, |S_1| = {}\n", spec.m(), spec.disc(), s.terms.len());
    if list {
        let rows: Vec<Vec<String>> = s
            .terms
            .iter()
            .map(|t| {
                vec![
                    coords(&t.element.coords),
                    t.element.nu.to_string(),
                    t.ideal.norm.to_string(),
                    t.sigma1.to_string(),
                    t.prime.to_string(),
                    t.ideal.to_string(),
                ]
            })
            .collect();
        out.push_str(&table(&["coords", "nu", "norm", "sigma_1", "prime", "ideal"], &rows));
    }
    let _ = writeln!(out, "sum sigma_1 = {}", s.sigma_sum);
    let _ = writeln!(out, "zeta_K(-1) = {}", s.zeta_minus1);
    Ok(out)
}

pub fn zeta_euler(spec: &FieldSpec, prime_bound: u64) -> Result<String> {
    let e = euler_zeta2(spec, prime_bound)?;
    let mut out = format!("m = {}, D = {}, primes <= {} ({} used)\n", spec.m(), spec.disc(), prime_bound, e.terms_used);
    let _ = writeln!(out, "zeta_K(2) in {}", e.value);
    let _ = writeln!(out, "approx closed form of zeta_K(2,P) = {:.15e}", closed_form_value_f64(spec.m()));
    Ok(out)
}

pub fn classnumber(spec: &FieldSpec, prime_bound: u64, margin: f64) -> Result<String> {
    let h = analytic_class_number(spec, prime_bound, margin)?;
    let mut out = format!("m = {}, D = {}, primes <= {}\n", spec.m(), spec.disc(), prime_bound);
    let _ = writeln!(out, "approx regulator = {:.12}", h.regulator.mid_f64());
    let _ = writeln!(out, "approx h_K = {:.6} (heuristic, margin {margin})", h.estimate.mid_f64());
    let _ = writeln!(out, "h_K = {}", h.rounded);
    Ok(out)
}

pub fn dedekind_sum(cfg: &RunConfig, entries: &[i64], r: &[usize], reduced: bool) -> Result<String> {
    let (Ok(rows), Ok(r)) = (<[i64; 9]>::try_from(entries), <[usize; 3]>::try_from(r)) else {
        return Err(Error::OutOfRange("expected 9 matrix entries and 3 indices".into()));
    };
    let a = [[rows[0], rows[1], rows[2]], [rows[3], rows[4], rows[5]], [rows[6], rows[7], rows[8]]];
    let input = DedekindSumInput::new(a, r);
    let value = if reduced { dedekind_sum_b_reduced(&input)? } else { dedekind_sum_b(&input, cfg.term_budget)? };
    Ok(format!("{value}\n"))
}

fn coords(c: &[i64; 3]) -> String {
    format!("({},{},{})", c[0], c[1], c[2])
}

fn witnesses(ws: &[Witness]) -> String {
    ws.iter().map(|w| coords(&w.coords)).collect::<Vec<_>>().join(";")
}

fn criterion_row(r: &CriterionReport) -> Vec<String> {
    vec![
        r.m.to_string(),
        "true".into(),
        r.all_prime.to_string(),
        r.zeta_partial.to_string(),
        r.zeta_siegel.to_string(),
        witnesses(&r.witnesses),
    ]
}

pub fn criterion(cfg: &RunConfig, range: &MRange) -> std::result::Result<Done, Failure> {
    let entries = sweep_with(range.0.clone(), cfg.field_options());
    let mut code = 0;
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| match e {
            SweepEntry::Checked(r) => criterion_row(r),
            SweepEntry::Skipped { m, .. } => vec![m.to_string(), "false".into(), String::new(), String::new(), String::new(), String::new()],
            SweepEntry::Failed { m, error, resource_exhaustion } => {
                eprintln!("m = {m}: {error}");
                code = code.max(if *resource_exhaustion { 2 } else { 1 });
                vec![m.to_string(), String::new(), String::new(), String::new(), String::new(), format!("error: {error}")]
            }
        })
        .collect();
    let headers = ["m", "valid", "all_prime", "zeta_partial", "zeta_siegel", "witnesses"];
    let text = render(cfg.format, &headers, &rows, &entries)?;
    Ok(Done { text, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_alignment() {
        let t = table(&["m", "value"], &[vec!["10".into(), "x".into()], vec!["4".into(), "-2/3".into()]]);
        assert_eq!(t, "m   value\n10  x\n4   -2/3\n");
    }

    #[test]
    fn csv_quotes_separators() {
        let s = csv_string(&["a", "b"], &[vec!["(1,2,3);(1,4,5)".into(), "-8".into()]]).ok().unwrap();
        assert_eq!(s, "a,b\n\"(1,2,3);(1,4,5)\",-8\n");
    }
}
