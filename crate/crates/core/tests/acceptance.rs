//! Acceptance criteria 1–9. Each prints one PASS/FAIL line followed by its
//! individual check records.

use std::time::Instant;

use spaceform::suites::{criterion, SuiteConfig};

fn run(id: u8) {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let res = criterion(id, &cfg).expect("known criterion");
    let secs = start.elapsed().as_secs_f64();
    println!(
        "criterion {id} {}: {} ({secs:.1} s)",
        if res.pass() { "PASS" } else { "FAIL" },
        res.title
    );
    for c in &res.checks {
        println!("    {}", c.summary());
    }
    for n in &res.notes {
        println!("    note: {n}");
    }
    assert!(res.pass(), "criterion {id} failed");
    assert!(secs <= 60.0, "criterion {id} took {secs:.1} s");
}

#[test]
fn criterion_1_veronese() {
    run(1);
}

#[test]
fn criterion_2_clifford_torus() {
    run(2);
}

#[test]
fn criterion_3_det_constancy() {
    run(3);
}

#[test]
fn criterion_4_rotational() {
    run(4);
}

#[test]
fn criterion_5_leaf_space() {
    run(5);
}

#[test]
fn criterion_6_frame_flows() {
    run(6);
}

#[test]
fn criterion_7_generated_family() {
    run(7);
}

#[test]
fn criterion_8_anchor_hypersurfaces() {
    run(8);
}

#[test]
fn criterion_9_crease() {
    run(9);
}
