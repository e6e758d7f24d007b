//! Three ways a minimum can be certified to exist, at three strengths.
//!
//! - **Compact sublevels**: `X∞ ∩ 𝒦(f) = {0}` forces bounded sublevel sets;
//!   no asymptotic reasoning is needed beyond the zero test. One bounded
//!   constraint piece settles it no matter how opaque the other pieces are.
//! - **Noncompact but retractive**: the sqrt-cage problem
//!   `min x₁² + x₂ s.t. √|x₁| ≤ x₂` has unbounded sublevel sets and a
//!   nonconvex feasible set, yet every escape direction is ruled out by the
//!   constraint's cone analysis — the minimum at the origin is certified.
//! - **Assertion-conditional**: when the conclusion leans on facts the caller
//!   asserted but the tool could not verify (here: a coercive gauge with
//!   Lipschitz gradient), the verdict caps at `PROVEN_UNDER_ASSERTIONS` —
//!   believable exactly as far as the assertions.
//!
//! Run with `cargo run --example certify_attainment`.

use asymcert::certify::{certify, certify_coercive_g};
use asymcert::functions::{BlackBox, Builtin, FunctionSpec};
use asymcert::polyhedra::Polyhedron;
use asymcert::problem::ProblemSpec;
use asymcert::sets::SetSpec;

fn report(name: &str, problem: &ProblemSpec) {
    let cert = certify(problem, 42);
    println!("{name}");
    println!("  verdict: {}", cert.verdict);
    if let Some(t) = cert.theorem_used {
        println!("  route: {t}");
    }
    if let Some(tier) = cert.trail_tier() {
        println!("  weakest trail evidence: {tier}");
    }
    for c in &cert.condition_trail {
        println!("    [{}] {}", c.tier, c.statement);
    }
    println!();
}

fn main() {
    // Coercive objective over the whole plane: compact sublevels.
    report(
        "‖x‖² over ℝ²",
        &ProblemSpec::new(
            2,
            FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]),
            SetSpec::full_space(2),
        ),
    );

    // The sqrt cage: unbounded, nonconvex, still attained at (0, 0).
    let cage = FunctionSpec::black_box(
        2,
        BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]),
    );
    report(
        "x₁² + x₂ over {√|x₁| ≤ x₂}",
        &ProblemSpec::new(
            2,
            FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 1])]),
            SetSpec::sublevel(cage, 0.0),
        ),
    );

    // A bounded linear program: recession directions of the feasible set all
    // kill the objective's descent, proven by polyhedral algebra alone.
    report(
        "x₁ over {x₁ ≥ 0} ⊂ ℝ²",
        &ProblemSpec::new(
            2,
            FunctionSpec::poly_from_terms(2, &[(1.0, vec![1, 0])]),
            SetSpec::polyhedron(Polyhedron::new(2, &[(vec![-1.0, 0.0], 0.0)]).unwrap()),
        ),
    );

    // A box pins the intersection's asymptotic cone to {0} on its own: the
    // opaque quartic expression next to it cannot dilute the proof, because
    // the intersection sits inside the box no matter what the quartic is.
    let quartic = SetSpec::Sublevel {
        function: FunctionSpec::parse_expr(2, "x1^4 + x2^4").unwrap(),
        level: 10.0,
        asserted_convex: false,
    };
    let boxed = SetSpec::intersection(vec![
        SetSpec::polyhedron(
            Polyhedron::from_box(&[Some(-1.0), Some(-1.0)], &[Some(1.0), Some(1.0)]).unwrap(),
        ),
        quartic,
    ]);
    report(
        "x₁ + x₂ over a box ∩ a black-box quartic sublevel",
        &ProblemSpec::new(
            2,
            FunctionSpec::poly_from_terms(2, &[(1.0, vec![1, 0]), (1.0, vec![0, 1])]),
            boxed,
        ),
    );

    // The coercive-gauge route: the caller asserts ‖x‖² is a coercive gauge
    // with Lipschitz gradient and that the objective decays against it. The
    // gauge facts are assertions and the gradient-growth probe is sampled,
    // so the conclusion is capped at assertion strength.
    let prob = ProblemSpec::new(
        2,
        FunctionSpec::poly_from_terms(2, &[(1.0, vec![0, 1])]),
        SetSpec::polyhedron(Polyhedron::new(2, &[(vec![0.0, -1.0], 0.0)]).unwrap()),
    );
    let gauge = FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]);
    let cert = certify_coercive_g(&prob, &gauge, 42);
    println!("x₂ over {{x₂ ≥ 0}} with asserted coercive gauge ‖x‖²");
    println!("  verdict: {}", cert.verdict);
    if let Some(t) = cert.theorem_used {
        println!("  route: {t}");
    }
    if let Some(tier) = cert.trail_tier() {
        println!("  weakest trail evidence: {tier}");
    }
    for c in &cert.condition_trail {
        println!("    [{}] {}", c.tier, c.statement);
    }
}
