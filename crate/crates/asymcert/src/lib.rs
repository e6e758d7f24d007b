//! Existence certificates and constructive solutions for nonconvex minimization.
//!
//! Given a problem `inf { f(x) : x ∈ X }` with `X ⊆ ℝⁿ` closed and `f` lower
//! semicontinuous — but neither convex nor coercive — this crate decides, with an
//! explicit evidence trail, whether an optimal solution is guaranteed to exist,
//! and solves the problem constructively when it does:
//!
//! - **certify**: checks sufficient existence conditions built from asymptotic
//!   (horizon) cones and retractive directions. The verdict is `PROVEN_EXISTS`,
//!   `PROVEN_EXISTS_COMPACT`, `PROVEN_UNDER_ASSERTIONS`, `VIOLATED` (with a
//!   replayable counterexample direction), or `UNKNOWN`. Every condition in the
//!   trail carries an evidence tier: *Proven* (exact cone algebra), *Asserted*
//!   (user-supplied facts), or *Sampled* (numerical probes). Proven verdicts
//!   never rest on sampled evidence.
//! - **solve**: follows the regularization path `x_k ∈ argmin f + r_k‖x‖^{p+1}`
//!   with `r_k ↓ 0`, which converges to a solution exactly when the certified
//!   conditions hold, and otherwise exposes a divergence direction.
//! - **analyze-cones**: reports the asymptotic cone of the feasible set, the
//!   asymptotic cone `𝒦(f) = {d : f_∞(d) ≤ 0}` of the objective, retraction
//!   witnesses, and the decay classification.
//!
//! # Modules
//!
//! | module | contents |
//! |---|---|
//! | [`algebra`] | sparse multivariate polynomials: evaluation, gradients, homogeneous decomposition, convexity checks |
//! | [`asymptotics`] | asymptotic functions `f_∞` (closed form and sampled), cone descriptors, asymptotic cones of sets |
//! | [`polyhedra`] | halfspace systems, extreme rays via double description, lineality spaces, projections |
//! | [`functions`] | function specifications: polynomials, named black-box builtins, expression trees |
//! | [`sets`] | feasible-set specifications and membership |
//! | [`retract`] | retractive cones and randomized falsifiers producing retraction witnesses |
//! | [`decay`] | asymptotically-bounded-decay classification and decay-constant estimation |
//! | [`certify`] | the existence certifier: theorem routing, condition trails, verdicts |
//! | [`pathsolver`] | the regularized inner solver and the regularization path |
//! | [`problem`] | JSON problem files |
//! | [`report`] | deterministic reports for the CLI |
//! | [`cli`] | the `certify` / `solve` / `analyze-cones` entry points |
//!
//! # Example
//!
//! Certify that `min x₁² + x₂ s.t. √|x₁| ≤ x₂` attains its minimum, then solve it:
//!
//! ```
//! use asymcert::certify::{certify, Verdict};
//! use asymcert::functions::{BlackBox, Builtin, FunctionSpec};
//! use asymcert::pathsolver::{regularization_path, PathStatus, RegSchedule};
//! use asymcert::problem::ProblemSpec;
//! use asymcert::sets::SetSpec;
//!
//! let f = FunctionSpec::poly_from_terms(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 1])]);
//! let g = BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]);
//! let problem = ProblemSpec::new(2, f, SetSpec::sublevel(FunctionSpec::black_box(2, g), 0.0));
//!
//! let cert = certify(&problem, 7);
//! assert_eq!(cert.verdict, Verdict::ProvenExists);
//!
//! let trace = regularization_path(&problem, &RegSchedule::for_decay_power(2.0), 7)
//!     .expect("the problem has feasible points");
//! match trace.status {
//!     PathStatus::Converged { minimizer, value } => {
//!         assert!(minimizer.iter().all(|c| c.abs() <= 1e-3));
//!         assert!(value.abs() <= 1e-4);
//!     }
//!     other => panic!("expected convergence, got {other:?}"),
//! }
//! ```

pub mod algebra;
pub mod asymptotics;
pub mod certify;
pub mod cli;
pub mod decay;
pub mod functions;
pub mod pathsolver;
pub mod polyhedra;
pub mod problem;
pub mod report;
pub mod retract;
pub mod sets;

/// Evidence tier attached to every condition record, cone membership answer,
/// and certificate: what kind of argument backs the claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Tier {
    /// Exact finite computation (polyhedral cone algebra, closed-form
    /// asymptotic functions, eigenvalue checks within pinned tolerances).
    Proven,
    /// Follows from a fact the caller asserted but the tool did not verify.
    Asserted,
    /// Backed by seeded numerical sampling; refutable evidence, never a proof.
    Sampled,
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tier::Proven => write!(f, "proven"),
            Tier::Asserted => write!(f, "asserted"),
            Tier::Sampled => write!(f, "sampled"),
        }
    }
}

/// Combine tiers: a conclusion is only as strong as its weakest premise.
#[must_use]
pub fn weakest_tier(tiers: impl IntoIterator<Item = Tier>) -> Tier {
    tiers.into_iter().max().unwrap_or(Tier::Proven)
}

/// Default RNG seed used by the CLI when neither `--seed` nor
/// `ASYMCERT_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;
