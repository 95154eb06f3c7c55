//! The nine acceptance checks, one printed line each.

use std::sync::OnceLock;

use cblocks::repro::{self, CriterionResult, GenerationRun};

fn generation() -> &'static GenerationRun {
    static RUN: OnceLock<GenerationRun> = OnceLock::new();
    RUN.get_or_init(repro::generation_run)
}

fn report(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.pass, "{}", r.line());
}

#[test]
fn criterion_1_b2_level_two_count() {
    report(repro::criterion_1());
}

#[test]
fn criterion_2_level_one_points() {
    report(repro::criterion_2());
}

#[test]
fn criterion_3_b1_freeness() {
    report(repro::criterion_3());
}

#[test]
fn criterion_4_generation() {
    report(repro::criterion_4(generation()));
}

#[test]
fn criterion_5_relations() {
    report(repro::criterion_5());
}

#[test]
fn criterion_6_b2_binomial() {
    report(repro::criterion_6());
}

#[test]
fn criterion_7_constructive_matches_search() {
    report(repro::criterion_7(generation()));
}

#[test]
fn criterion_8_property_suite() {
    report(repro::criterion_8());
}

#[test]
fn criterion_9_theta_graph() {
    report(repro::criterion_9());
}
