use std::io::Write;

use hhcert::selftest::{criterion, Outcome};

fn check(id: u32) {
    let o: Outcome = criterion(id);
    // written past the harness capture so the line shows up in every run
    let _ = writeln!(std::io::stderr(), "{}", o.line());
    assert!(o.passed, "criterion {id} failed: {}", o.detail);
    assert!(o.within_limit(), "criterion {id} exceeded its time limit: {:?}", o.elapsed);
}

#[test]
fn criterion_01_contraction_bound() {
    check(1);
}

#[test]
fn criterion_02_closed_form_identities() {
    check(2);
}

#[test]
fn criterion_03_quadrature_consistency() {
    check(3);
}

#[test]
fn criterion_04_product_row_formula() {
    check(4);
}

#[test]
fn criterion_05_face_decay_two() {
    check(5);
}

#[test]
fn criterion_06_face_decay_three_four() {
    check(6);
}

#[test]
fn criterion_07_solid_exhibit() {
    check(7);
}

#[test]
fn criterion_08_one_variable_goldens() {
    check(8);
}

#[test]
fn criterion_09_theorem_direction() {
    check(9);
}

#[test]
fn criterion_10_determinism() {
    check(10);
}

#[test]
fn criterion_11_parser() {
    check(11);
}
