//! Hunting counterexamples to retractivity: escape sequences whose
//! retraction leaves the set.
//!
//! A direction `d` is retractive for `X` when every sequence escaping along
//! `d` can eventually be pulled back by `ρ·d` without leaving `X`. Three
//! classic shapes refute that along specific directions, and the falsifier
//! finds a concrete witness sequence for each:
//!
//! - the epigraph of `s²`, escaping along `(0, 1)` through `(√k, k)`;
//! - the epigraph of `−√s`, escaping along `(1, 0)` through `(k, −√k)`;
//! - the region `x² ≤ |y|`, escaping along `(0, ±1)`.
//!
//! Run with `cargo run --example retractive_falsifier`.

use asymcert::functions::FunctionSpec;
use asymcert::retract::{falsify_set_retraction, FalsifierBudget};
use asymcert::sets::SetSpec;

fn hunt(name: &str, set: &SetSpec, direction: &[f64]) {
    println!("{name}, direction {direction:?}:");
    match falsify_set_retraction(set, direction, &FalsifierBudget::default()) {
        Some(witness) => {
            println!(
                "  REFUTED with retraction length ρ = {} — escape tail:",
                witness.rho
            );
            for ((t, point), (retracted, gap)) in witness
                .scales
                .iter()
                .zip(&witness.points)
                .zip(witness.retracted.iter().zip(&witness.gaps))
            {
                println!(
                    "    t = {t:>12.1}: x(t) = ({:>14.4}, {:>14.4}); x − ρd = ({:>14.4}, {:>14.4}) exits by {gap:.3e}",
                    point[0], point[1], retracted[0], retracted[1]
                );
            }
        }
        None => println!("  no counterexample within budget (evidence of retractivity)"),
    }
    println!();
}

fn main() {
    // Epigraph of s²: {(s, y) : s² ≤ y}. Escaping straight up through the
    // boundary (√k, k), pulling back by ρ·(0,1) drops below the parabola.
    let epi_square = SetSpec::sublevel(
        FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (-1.0, vec![0, 1])]),
        0.0,
    );
    hunt("epigraph of s²", &epi_square, &[0.0, 1.0]);

    // Epigraph of −√s: {(s, y) : −√s ≤ y, s ≥ 0}. The boundary (k, −√k)
    // escapes along (1, 0); retraction exits because the boundary keeps
    // falling.
    let epi_neg_sqrt = SetSpec::sublevel(
        FunctionSpec::parse_expr(2, "-sqrt(x1) - x2").unwrap(),
        0.0,
    );
    hunt("epigraph of −√s", &epi_neg_sqrt, &[1.0, 0.0]);

    // {x² ≤ |y|}: both vertical directions escape through (√k, ±k), and both
    // are refuted.
    let absy = SetSpec::sublevel(
        FunctionSpec::parse_expr(2, "x1^2 - abs(x2)").unwrap(),
        0.0,
    );
    hunt("{x² ≤ |y|}", &absy, &[0.0, 1.0]);
    hunt("{x² ≤ |y|}", &absy, &[0.0, -1.0]);

    // Contrast: polyhedra retract along every recession direction, so the
    // falsifier comes back empty.
    let orthant = SetSpec::polyhedron(
        asymcert::polyhedra::Polyhedron::new(2, &[(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)])
            .unwrap(),
    );
    hunt("the nonnegative orthant", &orthant, &[1.0, 1.0]);
}
