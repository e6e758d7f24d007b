//! The flagship refutation: a bounded-below quartic program whose infimum is
//! not attained, caught by an exact cone-inclusion failure.
//!
//! Minimize `x₁² − 2x₁x₂ + x₃x₄` subject to `x₁² ≤ x₃`, `x₂² ≤ x₄`. The
//! objective is bounded below by −1 on the feasible set, and minimizing
//! sequences run away along the parabolas `x = (t/(1+t²), t, ·, t²)` — the
//! infimum −1 is approached but never reached. The certifier refutes the
//! sufficient existence condition along the escape direction `(0, 0, 1, 0)`
//! with proven-tier cone algebra, then corroborates the refutation with a
//! replayable escape-and-retract witness.
//!
//! Run with `cargo run --example certify_luo_zhang`.

use asymcert::certify::certify;
use asymcert::functions::FunctionSpec;
use asymcert::problem::ProblemSpec;
use asymcert::sets::SetSpec;

fn main() {
    let f = FunctionSpec::poly_from_terms(
        4,
        &[
            (1.0, vec![2, 0, 0, 0]),
            (-2.0, vec![1, 1, 0, 0]),
            (1.0, vec![0, 0, 1, 1]),
        ],
    );
    let g1 = FunctionSpec::poly_from_terms(4, &[(1.0, vec![2, 0, 0, 0]), (-1.0, vec![0, 0, 1, 0])]);
    let g2 = FunctionSpec::poly_from_terms(4, &[(1.0, vec![0, 2, 0, 0]), (-1.0, vec![0, 0, 0, 1])]);
    let problem = ProblemSpec::new(
        4,
        f,
        SetSpec::intersection(vec![SetSpec::sublevel(g1, 0.0), SetSpec::sublevel(g2, 0.0)]),
    );

    let cert = certify(&problem, 42);

    println!("verdict: {}", cert.verdict);
    if let Some(theorem) = cert.theorem_used {
        println!("route: {theorem}");
    }
    println!("decay: [{}] {}", cert.decay.tier, cert.decay.rationale);
    println!("\ncondition trail:");
    for c in &cert.condition_trail {
        println!("  [{}] {} — {}", c.tier, c.statement, c.evidence);
    }
    if let Some(v) = &cert.violation {
        println!("\nviolated along direction {:?} [{}]", v.direction, v.tier);
        println!("  condition: {}", v.condition);
        println!("  detail: {}", v.detail);
        if let Some(w) = &v.witness {
            println!("  witness tail (escape point → retracted point, violation gap):");
            for ((point, retracted), gap) in w.points.iter().zip(&w.retracted).zip(&w.gaps) {
                println!("    {point:?} → {retracted:?}  gap {gap:.3e}");
            }
        }
    }
    println!("\ndiagnostics:");
    for d in &cert.diagnostics {
        println!("  - {d}");
    }
}
