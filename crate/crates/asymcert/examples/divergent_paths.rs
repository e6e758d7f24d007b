//! When the infimum is not attained, the regularization path reports it.
//!
//! For problems whose objective decays to its infimum only "at infinity",
//! the iterates of the regularized subproblems march outward as `r ↓ 0`.
//! The path solver watches their norms: sustained growth across the
//! schedule is returned as `DIVERGENT`, together with the normalized escape
//! direction. The f-values along the way still reveal where the objective
//! is headed.
//!
//! Run with `cargo run --example divergent_paths`.

use asymcert::functions::{BlackBox, Builtin, FunctionSpec};
use asymcert::pathsolver::{regularization_path, PathStatus, RegSchedule};
use asymcert::polyhedra::Polyhedron;
use asymcert::problem::ProblemSpec;
use asymcert::report::DIVERGENCE_CAVEAT;
use asymcert::sets::SetSpec;

fn follow(name: &str, problem: &ProblemSpec, schedule: &RegSchedule) {
    println!("{name}");
    let trace = regularization_path(problem, schedule, 7).expect("feasible problem");
    println!("  k     r               f(x_k)          ‖x_k‖");
    let shown = trace.iterates.len();
    for (k, it) in trace.iterates.iter().enumerate() {
        if k < 6 || k + 4 >= shown {
            let norm = it.x.iter().map(|c| c * c).sum::<f64>().sqrt();
            println!("  {k:<5} {:<15.6e} {:<15.6e} {norm:.6e}", it.r, it.f_value);
        } else if k == 6 {
            println!("  ...");
        }
    }
    match &trace.status {
        PathStatus::Divergent { direction } => {
            println!("  DIVERGENT along direction {direction:?}");
        }
        PathStatus::Converged { minimizer, value } => {
            println!("  CONVERGED at {minimizer:?} with value {value:.6}");
        }
        PathStatus::BudgetExhausted => println!("  BUDGET_EXHAUSTED"),
    }
    println!();
}

fn main() {
    // min −√x on [0, ∞): the infimum is −∞; iterates run down the half-line.
    let neg_sqrt = ProblemSpec::new(
        1,
        FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 })),
        SetSpec::polyhedron(Polyhedron::new(1, &[(vec![-1.0], 0.0)]).unwrap()),
    );
    follow(
        "min −√x₁ s.t. x₁ ≥ 0  (infimum −∞)",
        &neg_sqrt,
        &RegSchedule::default(),
    );

    // min e^x on ℝ: the infimum 0 is approached but never attained. The
    // escape is slow (x_r ~ −log(1/r)), so the f-values collapse toward 0
    // while the norms keep climbing.
    let exp_line = ProblemSpec::new(
        1,
        FunctionSpec::black_box(1, BlackBox::new(Builtin::ExpLinear { coeffs: vec![1.0] })),
        SetSpec::full_space(1),
    );
    follow(
        "min e^{x₁} on ℝ  (infimum 0, unattained)",
        &exp_line,
        &RegSchedule::default(),
    );

    println!("note: {DIVERGENCE_CAVEAT}");
}
