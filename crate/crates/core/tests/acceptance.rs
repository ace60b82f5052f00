//! Acceptance harness. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the lines.

use num_bigint::BigInt;
use num_rational::BigRational;

use scorza::degenerations::{limit_model, Divisor};
use scorza::picard::{self, LedgerRule, Slope};
use scorza::verify::{self, limits, VerifyOptions};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn line(pass: bool, name: &str, detail: &str) -> String {
    format!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" })
}

#[test]
fn tolerances_are_pinned() {
    assert_eq!(limits::QUASI_PERIOD_REL, 1e-9);
    assert_eq!(limits::ODD_AT_ZERO, 1e-12);
    assert_eq!(limits::FINITE_DIFFERENCE_REL, 1e-6);
    assert_eq!(limits::BETA_REL, 1e-8);
    assert_eq!(limits::THETA_NULL_VALUE, 1e-10);
    assert_eq!(limits::THETA_NULL_PROPORTIONALITY, 1e-8);
    assert_eq!(limits::ELLIPTIC_RESIDUAL, 1e-10);
    assert_eq!(limits::RANK_ONE_RATIO, 1e-10);
    assert_eq!(limits::WEIGHT_RUNTIME_SECS, 1.0);
}

#[test]
fn acceptance_criteria() {
    let opts = VerifyOptions::default();
    let checks = verify::criteria(&opts);
    assert_eq!(checks.len(), 10);
    let mut failed = Vec::new();
    for c in &checks {
        println!("{}", line(c.pass, &c.name, &c.detail));
        if !c.pass {
            failed.push(c.name.clone());
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

// Closed forms recomputed here without going through the library's own
// formula helpers.
#[test]
fn closed_forms_against_direct_rationals() {
    let mut bad = Vec::new();
    for g in 3..=50i64 {
        let (w, _) = picard::chern_weight(g as u64).unwrap();
        if w != rat(77 * g - 25, 4) {
            bad.push(format!("weight g={g}"));
        }
        let d = picard::szego_hodge_class(g as u64).unwrap();
        if d.c_lambda != w {
            bad.push(format!("lambda g={g}"));
        }
        if d.c_alpha(0).unwrap().known() != Some(&rat(69 * g - 21, 16)) {
            bad.push(format!("alpha_0 g={g}"));
        }
        match picard::slope(&d) {
            Slope::Finite(s) if s == rat(4, 1) + rat(32 * g - 16, 69 * g - 21) => {}
            other => bad.push(format!("slope g={g}: {other}")),
        }
    }
    println!("{}", line(bad.is_empty(), "closed forms g in 3..=50", &format!("{bad:?}")));
    assert!(bad.is_empty());
}

#[test]
fn arithmetic_genera_by_formula() {
    let mut bad = Vec::new();
    for g in 3..=30u64 {
        let full = 1 + 3 * g * (g - 1);
        for d in Divisor::ALL {
            let want = if d == Divisor::TThetaNull { 1 + 3 * g * (g - 1) / 2 } else { full };
            let idx: Vec<Option<u64>> =
                if d.takes_index() { d.index_range(g).map(Some).collect() } else { vec![None] };
            for i in idx {
                let m = limit_model(d, g, i).unwrap();
                if m.arithmetic_genus() != want as i64 {
                    bad.push(format!("{d} g={g} i={i:?}: {}", m.arithmetic_genus()));
                }
            }
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn tampered_ledger_is_rejected() {
    let (_, mut ledger) = picard::chern_weight(6).unwrap();
    assert!(verify::ledger_replay_check(&ledger).pass);
    let k = ledger.entries.iter().position(|e| e.name == "Sym2 E").unwrap();
    match &mut ledger.entries[k].rule {
        LedgerRule::Linear { constant, .. } => *constant += rat(1, 1),
        LedgerRule::Axiom { .. } => panic!("expected a derived entry"),
    }
    let c = verify::ledger_replay_check(&ledger);
    println!("{}", line(!c.pass, "tampered ledger rejected", &c.detail));
    assert!(!c.pass);
    let report = scorza::report::Report {
        command: "ledger".into(),
        seed: None,
        results: serde_json::Value::Null,
        checks: vec![c],
    };
    assert_ne!(report.exit_code(), 0);
}

#[test]
fn quick_run_passes_and_is_reproducible() {
    let opts = VerifyOptions { quick: true, ..VerifyOptions::default() };
    let a = verify::verify_all(&opts);
    assert!(a.all_pass(), "{}", a.render_text());
    assert_eq!(a.exit_code(), 0);
    let mut b = verify::verify_all(&opts);
    // Runtime figures are the only nondeterministic text.
    let strip = |s: &str| s.split(", runtime").next().unwrap().to_string();
    let mut a = a;
    for c in a.checks.iter_mut().chain(b.checks.iter_mut()) {
        c.detail = strip(&c.detail);
    }
    assert_eq!(a.to_json(), b.to_json());
}
