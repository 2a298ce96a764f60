use std::process::{Command, Output};

use kmzeta::hp::closed_form_partial_minus1;
use kmzeta::SweepEntry;

fn kmzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmzeta")).args(args).env_remove("KMZETA_PRECISION_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hp_total_at_m4() {
    let o = kmzeta(&["zeta", "hp", "--m", "4", "--term", "total"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("16/3 * pi^6 * D^(-3/2)"), "{s}");
    assert!(s.contains("zeta_K(-1,P) = -2/3"), "{s}");
}

#[test]
fn hp_single_terms() {
    let o = kmzeta(&["zeta", "hp", "--m", "4", "--term", "C1"]);
    assert!(stdout(&o).contains("C(2,1,a,a+1) = 2/45 * pi^6 * D^(-3/2)"));
    let o = kmzeta(&["zeta", "hp", "--m", "4", "--term", "c2"]);
    assert!(stdout(&o).contains("C(2,2,a+1,a) = -2/45 * pi^6 * D^(-3/2)"));
}

#[test]
fn criterion_csv() {
    let o = kmzeta(&["criterion", "--m-range", "4..10", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "m,valid,all_prime,zeta_partial,zeta_siegel,witnesses");
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[1], "4,true,true,-2/3,-2/3,");
    assert!(lines[4].starts_with("7,true,false,-20,-24,"));
}

#[test]
fn criterion_json_round_trips_exactly() {
    let o = kmzeta(&["criterion", "--m-range", "20..26", "--format", "json"]);
    assert!(o.status.success());
    let entries: Vec<SweepEntry> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(entries.len(), 7);
    assert!(matches!(entries.iter().find(|e| e.m() == 24), Some(SweepEntry::Skipped { .. })));
    for r in entries.iter().filter_map(|e| e.report()) {
        assert_eq!(r.zeta_partial, closed_form_partial_minus1(r.m));
        assert!(r.zeta_siegel < r.zeta_partial);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["criterion", "--m-range", "4..16", "--format", "table"];
    assert_eq!(kmzeta(&args).stdout, kmzeta(&args).stdout);
    let args = ["zeta", "siegel", "--m", "9", "--list"];
    assert_eq!(kmzeta(&args).stdout, kmzeta(&args).stdout);
}

#[test]
fn fields_validate_table() {
    let o = kmzeta(&["fields", "validate", "--m-range", "4..12"]);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 10);
    assert!(s.lines().any(|l| l.starts_with("10 ") && l.ends_with("valid (ii)")));
    let o = kmzeta(&["fields", "validate", "--m-range", "24..24"]);
    assert!(stdout(&o).contains("invalid"));
}

#[test]
fn siegel_listing() {
    let s = stdout(&kmzeta(&["zeta", "siegel", "--m", "4", "--list"]));
    assert!(s.contains("|S_1| = 7"));
    assert!(s.contains("sum sigma_1 = 42"));
    assert!(s.contains("zeta_K(-1) = -2/3"));
    assert_eq!(s.lines().filter(|l| l.starts_with("(1,")).count(), 7);
}

#[test]
fn dedekind_sum_evaluators_agree() {
    let direct = kmzeta(&["dedekind-sum", "--matrix", "-2,1,0,1,3,1,0,1,4", "--r", "2,2,2"]);
    let reduced = kmzeta(&["dedekind-sum", "--matrix", "-2,1,0,1,3,1,0,1,4", "--r", "2,2,2", "--reduced"]);
    assert!(direct.status.success());
    assert_eq!(direct.stdout, reduced.stdout);
    assert_eq!(stdout(&kmzeta(&["dedekind-sum", "--matrix", "1,0,0,0,1,0,0,0,1", "--r", "2,2,2"])), "1/216\n");
}

#[test]
fn euler_and_classnumber() {
    let s = stdout(&kmzeta(&["zeta", "euler", "--m", "4", "--prime-bound", "10000"]));
    assert!(s.contains("zeta_K(2) in [1.244"), "{s}");
    let o = kmzeta(&["classnumber", "--m", "7", "--prime-bound", "100000"]);
    assert!(stdout(&o).contains("h_K = 2"));
}

#[test]
fn exit_codes() {
    // invalid m requested directly
    assert_eq!(kmzeta(&["zeta", "siegel", "--m", "24"]).status.code(), Some(1));
    assert_eq!(kmzeta(&["zeta", "hp", "--m", "3"]).status.code(), Some(1));
    // usage errors
    assert_eq!(kmzeta(&["zeta", "hp"]).status.code(), Some(1));
    assert_eq!(kmzeta(&["dedekind-sum", "--matrix", "1,2", "--r", "1,1,1"]).status.code(), Some(1));
    assert_eq!(kmzeta(&["--help"]).status.code(), Some(0));
    // resource exhaustion
    let big = ["dedekind-sum", "--matrix", "50,0,0,0,50,0,0,0,50", "--r", "2,2,2", "--term-budget", "1000"];
    assert_eq!(kmzeta(&big).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_kmzeta"))
        .args(["zeta", "hp", "--m", "4", "--bits", "8"])
        .env("KMZETA_PRECISION_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
