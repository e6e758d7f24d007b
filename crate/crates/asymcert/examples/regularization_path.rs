//! Solving constructively: follow the minimizers of `f + r‖x‖^{p+1}` as
//! `r ↓ 0`.
//!
//! Each regularized problem is coercive, so it has a solution; the path of
//! those solutions either settles (three consecutive steps within tolerance
//! — the limit minimizes the original problem) or escapes. This example
//! follows two attained problems: the sqrt cage, whose iterates sit at the
//! origin from the first step, and a box-constrained quadratic whose path
//! walks to the active corner.
//!
//! Run with `cargo run --example regularization_path`.

use asymcert::functions::{BlackBox, Builtin, FunctionSpec};
use asymcert::pathsolver::{regularization_path, PathStatus, RegSchedule};
use asymcert::polyhedra::Polyhedron;
use asymcert::problem::ProblemSpec;
use asymcert::sets::SetSpec;

fn follow(name: &str, problem: &ProblemSpec, schedule: &RegSchedule) {
    println!("{name}");
    println!("  regularizer r·‖x‖^{}", schedule.exponent_p + 1.0);
    let trace = regularization_path(problem, schedule, 7).expect("feasible problem");
    println!("  k     r               f(x_k)          x_k");
    for (k, it) in trace.iterates.iter().enumerate() {
        let coords: Vec<String> = it.x.iter().map(|c| format!("{c:+.6}")).collect();
        println!(
            "  {k:<5} {:<15.6e} {:<15.8} ({})",
            it.r,
            it.f_value,
            coords.join(", ")
        );
    }
    match &trace.status {
        PathStatus::Converged { minimizer, value } => {
            println!("  CONVERGED: x* ≈ {minimizer:?}, f* ≈ {value:.8}\n");
        }
        PathStatus::Divergent { direction } => {
            println!("  DIVERGENT along {direction:?} (evidence of nonexistence)\n");
        }
        PathStatus::BudgetExhausted => println!("  BUDGET_EXHAUSTED\n"),
    }
}

fn main() {
    // The sqrt cage: minimum at the origin, found immediately and held.
    let cage = FunctionSpec::black_box(
        2,
        BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]),
    );
    let sqrt_cage = ProblemSpec::new(
        2,
        FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 1])]),
        SetSpec::sublevel(cage, 0.0),
    );
    follow("min x₁² + x₂ s.t. √|x₁| ≤ x₂", &sqrt_cage, &RegSchedule::for_decay_power(2.0));

    // A convex quadratic over a box: the unconstrained minimizer (1, 2)
    // clips to the corner (1, 1); the path converges there as r ↓ 0.
    let qp = ProblemSpec::new(
        2,
        FunctionSpec::poly_from_terms(
            2,
            &[
                (1.0, vec![2, 0]),
                (1.0, vec![0, 2]),
                (-2.0, vec![1, 0]),
                (-4.0, vec![0, 1]),
            ],
        ),
        SetSpec::polyhedron(
            Polyhedron::from_box(&[Some(0.0), Some(0.0)], &[Some(1.0), Some(1.0)]).unwrap(),
        ),
    );
    follow(
        "min (x₁−1)² + (x₂−2)² − 5 over [0,1]² (expanded form)",
        &qp,
        &RegSchedule::for_decay_power(2.0),
    );
}
