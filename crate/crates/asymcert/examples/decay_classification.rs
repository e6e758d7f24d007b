//! Decay classification: how fast can a function fall toward −∞?
//!
//! The existence argument needs a lower envelope `f(x) ≥ −C(1 + ‖x‖)^p`.
//! The classifier derives the power `p` structurally where it can
//! (polynomial degree, builtin envelopes, convexity), from caller assertions
//! where it must, and by seeded sampling as a last resort — and the tier it
//! reports says which one happened. The regularization path then uses the
//! power `p + 1`, one above the envelope, so the regularized problems are
//! coercive.
//!
//! Run with `cargo run --example decay_classification`.

use asymcert::decay::{classify_decay, DecayAssertions, DecayModel};
use asymcert::functions::{BlackBox, Builtin, FunctionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn classify(name: &str, f: &FunctionSpec, assertions: &DecayAssertions) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cert = classify_decay(f, assertions, &mut rng);
    let model = match cert.model {
        DecayModel::NormPower { power } => format!("f(x) ≥ −C(1 + ‖x‖)^{power}"),
        DecayModel::Unknown => "no envelope derived".to_string(),
    };
    println!("{name}");
    println!("  {model}  [{}]", cert.tier);
    println!("  {}\n", cert.rationale);
}

fn main() {
    let none = DecayAssertions::default();

    classify(
        "quartic polynomial x⁴ − 10x²",
        &FunctionSpec::poly_from_terms(1, &[(1.0, vec![4]), (-10.0, vec![2])]),
        &none,
    );

    classify(
        "builtin −√x (falls strictly slower than linearly)",
        &FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 })),
        &none,
    );

    classify(
        "builtin e^{⟨(1,−1), x⟩} (bounded below by 0)",
        &FunctionSpec::black_box(
            2,
            BlackBox::new(Builtin::ExpLinear {
                coeffs: vec![1.0, -1.0],
            }),
        ),
        &none,
    );

    classify(
        "expression exp(x₁) − x₂, no assertions (sampled fallback)",
        &FunctionSpec::parse_expr(2, "exp(x1) - x2").unwrap(),
        &none,
    );

    classify(
        "the same expression with convexity asserted",
        &FunctionSpec::parse_expr(2, "exp(x1) - x2").unwrap(),
        &DecayAssertions {
            convex: true,
            ..DecayAssertions::default()
        },
    );
}
