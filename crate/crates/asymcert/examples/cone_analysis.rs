//! Asymptotic cones of feasible sets, and how descriptors grade their own
//! trustworthiness.
//!
//! Every cone in this crate is a [`ConeDescriptor`]: halfspace rows plus
//! optional exact membership oracles, tagged with whether the description is
//! the target cone (`Exact`), a superset (`Outer`, can only refute), or a
//! subset (`Inner`, can only certify), and with the evidence tier behind it.
//! Membership answers are `In`/`Out`/`Unresolved` accordingly — a cone
//! description never claims more than it knows.
//!
//! Run with `cargo run --example cone_analysis`.

use asymcert::asymptotics::ConeDescriptor;
use asymcert::functions::FunctionSpec;
use asymcert::polyhedra::Polyhedron;
use asymcert::sets::SetSpec;

fn describe(desc: &ConeDescriptor) {
    println!("  {}", desc.label);
    println!("    bound: {:?}, tier: {}", desc.bound, desc.tier);
    println!(
        "    {} halfspace rows, {} oracles",
        desc.rows.len(),
        desc.oracles.len()
    );
    match desc.zero_status() {
        Some((true, _)) => println!("    the cone is exactly {{0}} — bounded set"),
        Some((false, Some(member))) => {
            println!("    contains the nonzero direction {member:?}");
        }
        _ => println!("    zero test inconclusive at this bound"),
    }
    for probe in [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]] {
        if probe.len() == desc.dimension {
            println!(
                "    membership of {probe:?}: {:?}",
                desc.membership(&probe, 1e-9)
            );
        }
    }
}

fn main() {
    println!("A box [−1,1]²: compact, so its asymptotic cone is {{0}}.");
    let the_box = SetSpec::polyhedron(
        Polyhedron::from_box(&[Some(-1.0), Some(-1.0)], &[Some(1.0), Some(1.0)]).unwrap(),
    );
    describe(&the_box.asymptotic_cone());

    println!("\nA halfplane x₂ ≥ 0: its own recession cone, exactly.");
    let halfplane =
        SetSpec::polyhedron(Polyhedron::new(2, &[(vec![0.0, -1.0], 0.0)]).unwrap());
    describe(&halfplane.asymptotic_cone());

    println!("\nThe parabolic sublevel set x₁² − x₂ ≤ 0 (the epigraph of s²):");
    println!("escape is only possible upward, and the descriptor proves it.");
    let parabola = SetSpec::sublevel(
        FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (-1.0, vec![0, 1])]),
        0.0,
    );
    describe(&parabola.asymptotic_cone());

    println!("\nAn intersection: the halfplane cut with the parabola.");
    let both = SetSpec::intersection(vec![halfplane, parabola]);
    describe(&both.asymptotic_cone());
}
