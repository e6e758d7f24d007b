//! Tiered existence certification for `inf { f(x) : x ∈ X }`.
//!
//! Everything pivots on one comparison between cones. Write `X∞` for the
//! asymptotic cone of the effective feasible set and `𝒦(f)` for the
//! directions of non-growth of the objective; their intersection is the
//! *escape cone* — the only directions a minimizing sequence can run off
//! along. On the other side stand the *retractive* cones `ℛ(X)` and `ℛ(f)`:
//! directions along which far-out points can be pulled back a fixed step
//! without leaving the set or increasing the value. When every escape
//! direction is retractive for both — and the objective decays no faster
//! than a power of `‖x‖`, so a vanishing norm-power regularizer restores
//! coercivity — minimizing sequences can be retracted into a bounded region
//! and a minimizer exists. When the escape cone is `{0}` outright, sublevel
//! sets are compact and the solution set is nonempty and compact.
//!
//! [`certify`] tries the routes strongest-first:
//!
//! 1. [`certify_compact`] — `X∞ ∩ 𝒦(f) = {0}` with exact cone knowledge;
//!    no decay hypothesis needed and the solution set is compact.
//! 2. [`certify_convex_structured`] — convex objective over convex pieces.
//!    Convexity itself supplies the decay bound (a convex function is
//!    minorized by an affine one), recession directions of polyhedra are
//!    retractive for free, and for convex *polynomials* the retractive cone
//!    equals the two-sided constancy cone exactly.
//! 3. [`certify_functional`] — sublevel-set constraints `gⱼ(x) ≤ 0`: kappa
//!    cones bound the escape cone, per-piece retractive cones certify the
//!    right side, and an all-exact alternate goes through the lineality of
//!    the polyhedral rows and the constancy cones `𝒞(gⱼ)`.
//! 4. [`certify_main`] — the generic decay-plus-retraction route.
//!
//! [`certify_coercive_g`] swaps the norm-power decay hypothesis for decay
//! with respect to a caller-supplied coercive gauge `g` with a Lipschitz
//! gradient; both gauge facts are taken on faith and the gradient-growth
//! condition `limsup ⟨∇g(xₖ), d⟩ / tₖ > 0` is probed by sampling, so that
//! route never concludes above [`Verdict::ProvenUnderAssertions`].
//!
//! Soundness discipline: `PROVEN_EXISTS` and `PROVEN_EXISTS_COMPACT` cite
//! only proven-tier trail entries; an asserted entry anywhere downgrades the
//! conclusion to `PROVEN_UNDER_ASSERTIONS`; sampled evidence may refute
//! (producing `VIOLATED` with a replayable [`RetractionWitness`]) or
//! corroborate in the diagnostics, never prove. A `VIOLATED` verdict refutes
//! the *sufficient condition that was checked* — existence itself stays
//! undecided, which is why reports must carry [`VIOLATION_CAVEAT`].

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::ConvexityStatus;
use crate::asymptotics::{kappa_cone, ConeDescriptor, DescriptorBound, Membership};
use crate::decay::{classify_decay, DecayCertificate};
use crate::functions::FunctionSpec;
use crate::polyhedra::{dot, extreme_rays, l2_norm};
use crate::problem::ProblemSpec;
use crate::retract::{
    constancy_cone, falsify_function_retraction, falsify_set_retraction, retractive_cone,
    FalsifierBudget, RetractionWitness,
};
use crate::sets::SetSpec;
use crate::{weakest_tier, Tier};

/// Tolerance for cone membership tests (relative to the direction scale).
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Seeded interior samples drawn from the escape cone's row description when
/// it has no exact finite generator list.
pub const SAMPLE_DIRECTIONS: usize = 256;

/// Extra seeded random unit vectors probed for membership in the same case.
pub const RANDOM_PROBES: usize = 64;

/// Threshold for the sampled gauge gradient-growth condition.
const GAUGE_GROWTH_TOL: f64 = 1e-7;

/// How many certified right-side directions the reverse-inclusion
/// corroboration samples.
const REVERSE_CHECK_LIMIT: usize = 16;

/// The sufficient condition of the decay-plus-retraction routes.
pub const INCLUSION_CONDITION: &str = "X∞ ∩ 𝒦(f) ⊆ ℛ(X) ∩ ℛ(f)";

/// Mandatory caveat for `VIOLATED` reports: only the checked sufficient
/// condition failed.
pub const VIOLATION_CAVEAT: &str =
    "condition violated; existence undecided; see solver evidence";

/// Outcome of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// A minimizer exists and the solution set is compact (proven tier).
    ProvenExistsCompact,
    /// A minimizer exists (proven tier).
    ProvenExists,
    /// A minimizer exists if the caller's assertions hold.
    ProvenUnderAssertions,
    /// The checked sufficient condition fails along a concrete direction.
    /// Existence itself stays undecided — see [`VIOLATION_CAVEAT`].
    Violated,
    /// Neither certified nor refuted within the evidence available.
    Unknown,
}

impl Verdict {
    /// The strict proven-existence family audited by the soundness
    /// discipline (assertion-conditional verdicts are excluded).
    #[must_use]
    pub fn is_proven(self) -> bool {
        matches!(self, Verdict::ProvenExists | Verdict::ProvenExistsCompact)
    }

    /// Any existence conclusion, proven or assertion-conditional.
    #[must_use]
    pub fn concludes_existence(self) -> bool {
        self.is_proven() || self == Verdict::ProvenUnderAssertions
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ProvenExistsCompact => "PROVEN_EXISTS_COMPACT",
            Verdict::ProvenExists => "PROVEN_EXISTS",
            Verdict::ProvenUnderAssertions => "PROVEN_UNDER_ASSERTIONS",
            Verdict::Violated => "VIOLATED",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

/// Which decision route produced (or refuted) the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// `X∞ ∩ 𝒦(f) = {0}`: sublevel sets are compact, no decay needed.
    CompactSublevels,
    /// Norm-power decay plus the inclusion of the escape cone into the
    /// retractive cones.
    DecayRetraction,
    /// Decay with respect to a coercive gauge with Lipschitz gradient, plus
    /// the same inclusion and a sampled gradient-growth condition.
    CoerciveGauge,
    /// Convex objective over an intersection of convex pieces; convexity
    /// supplies the decay bound.
    ConvexProgram,
    /// Convex objective over a polyhedron: every recession direction of the
    /// feasible set is retractive.
    PolyhedralConvexProgram,
    /// Sublevel-set constraints analyzed through their kappa cones (outer
    /// bounds on the escape cone).
    SublevelCones,
    /// Sublevel-set constraints whose convex pieces are certified
    /// retractive piecewise.
    ConvexPieceRetraction,
    /// All-exact alternate inclusion: lineality of the polyhedral rows
    /// intersected with the constancy cones of the constraint functions.
    LinealityConstancy,
    /// Constraint functions are convex polynomials, whose retractive cones
    /// *equal* their constancy cones — the alternate right side is exact.
    ConvexPolynomialConstraints,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::CompactSublevels => "compact_sublevels",
            TheoremId::DecayRetraction => "decay_retraction",
            TheoremId::CoerciveGauge => "coercive_gauge",
            TheoremId::ConvexProgram => "convex_program",
            TheoremId::PolyhedralConvexProgram => "polyhedral_convex_program",
            TheoremId::SublevelCones => "sublevel_cones",
            TheoremId::ConvexPieceRetraction => "convex_piece_retraction",
            TheoremId::LinealityConstancy => "lineality_constancy",
            TheoremId::ConvexPolynomialConstraints => "convex_polynomial_constraints",
        })
    }
}

/// One checked hypothesis in a certificate's trail, with the evidence for it
/// and the tier that evidence lives at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub statement: String,
    pub evidence: String,
    pub tier: Tier,
}

/// Concrete evidence behind a `VIOLATED` verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEvidence {
    /// Unit direction along which the condition fails.
    pub direction: Vec<f64>,
    /// The sufficient condition that fails there.
    pub condition: String,
    /// Which cone test failed and how.
    pub detail: String,
    /// `Proven` for exact cone membership failures, `Sampled` for
    /// falsifier-found counterexamples.
    pub tier: Tier,
    /// Replayable escape-and-retract counterexample, when the search found
    /// one.
    pub witness: Option<RetractionWitness>,
}

/// The full output of a certification run: verdict, the route that decided
/// it, the audited hypothesis trail, the decay classification (always
/// computed, even when the route did not need it), refutation evidence, and
/// non-binding diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub theorem_used: Option<TheoremId>,
    pub condition_trail: Vec<Condition>,
    pub decay: DecayCertificate,
    pub violation: Option<ViolationEvidence>,
    /// Sampled corroborations, fall-through notes, unresolved memberships —
    /// observations that carry no evidentiary weight.
    pub diagnostics: Vec<String>,
    /// RNG seed the run was keyed by (reruns with the same seed are
    /// byte-identical).
    pub seed: u64,
}

impl Certificate {
    /// Weakest evidence tier cited in the trail (`None` for an empty trail).
    #[must_use]
    pub fn trail_tier(&self) -> Option<Tier> {
        self.condition_trail.iter().map(|c| c.tier).max()
    }
}

/// Certify with the default falsifier budget. Routes strongest-first:
/// compactness, then the structured convex route, then the functional
/// route, then the generic decay route; compactness-route notes are carried
/// into the final diagnostics when it declines.
#[must_use]
pub fn certify(problem: &ProblemSpec, seed: u64) -> Certificate {
    certify_with_budget(problem, seed, &FalsifierBudget::default())
}

/// [`certify`] with an explicit retraction-falsifier budget.
#[must_use]
pub fn certify_with_budget(
    problem: &ProblemSpec,
    seed: u64,
    budget: &FalsifierBudget,
) -> Certificate {
    let compact = certify_compact(problem, seed);
    if compact.verdict != Verdict::Unknown {
        return compact;
    }
    let flavor = route_flavor(problem);
    let mut cert = run_inclusion_route(problem, seed, budget, flavor);
    for note in compact.diagnostics {
        cert.diagnostics.insert(0, format!("compactness route: {note}"));
    }
    cert
}

/// Which inclusion route fits the problem's shape.
fn route_flavor(problem: &ProblemSpec) -> Flavor {
    let shape = Shape::of(problem.constraint());
    let f_convex = problem
        .objective()
        .convexity(problem.assertions().convex)
        .is_convex_usable();
    if shape.sublevels.is_empty() {
        if f_convex {
            Flavor::Convex
        } else {
            Flavor::Generic
        }
    } else if f_convex && shape.all_pieces_convex() {
        Flavor::Convex
    } else {
        Flavor::Functional
    }
}

/// The compactness route: decide `X∞ ∩ 𝒦(f) = {0}` from exact cone
/// descriptions. Succeeds outright when the feasible set's own asymptotic
/// cone is `{0}` (then the objective does not matter); otherwise intersects
/// with `𝒦(f)` and asks the joint descriptor. Declines to `UNKNOWN` — with
/// the reason in the diagnostics — whenever exactness or a finite zero test
/// is missing.
#[must_use]
pub fn certify_compact(problem: &ProblemSpec, seed: u64) -> Certificate {
    let mut analysis = Analysis::run(problem, seed);
    let mut trail = Vec::new();
    let mut diagnostics = Vec::new();
    let Some(feasible) = analysis.feasibility.clone() else {
        return analysis.infeasible(seed);
    };
    trail.push(feasible);

    if !analysis.x_inf.is_exact() {
        diagnostics.push(format!(
            "the feasible set's asymptotic cone is only an outer bound ({}); compactness needs it exactly",
            analysis.x_inf.label
        ));
        return analysis.unknown(trail, diagnostics, seed);
    }
    if analysis.x_inf.zero_status() == Some((true, None)) {
        trail.push(Condition {
            statement: "X∞ = {0}: the feasible set is bounded".to_string(),
            evidence: describe(&analysis.x_inf),
            tier: analysis.x_inf.tier,
        });
        return compact_success(trail, diagnostics, analysis.decay, seed);
    }
    if !analysis.kappa_f.is_exact() {
        corroborate_growth(&analysis.x_inf, problem.objective(), &mut analysis.rng, &mut diagnostics);
        diagnostics.push(format!(
            "the objective's non-growth cone is only a bound ({}); compactness of sublevel sets cannot be decided",
            analysis.kappa_f.label
        ));
        return analysis.unknown(trail, diagnostics, seed);
    }
    match analysis.left.zero_status() {
        Some((true, _)) => {
            trail.push(Condition {
                statement:
                    "X∞ ∩ 𝒦(f) = {0}: every unbounded feasible direction strictly grows the objective"
                        .to_string(),
                evidence: describe(&analysis.left),
                tier: analysis.left.tier,
            });
            compact_success(trail, diagnostics, analysis.decay, seed)
        }
        Some((false, member)) => {
            let member = member.map_or_else(String::new, |d| format!(" (for example {})", fmt_vec(&d)));
            diagnostics.push(format!(
                "nonzero escape directions exist{member}: sublevel sets are unbounded along them, so the compactness route does not apply"
            ));
            analysis.unknown(trail, diagnostics, seed)
        }
        None => {
            diagnostics.push(
                "could not decide whether X∞ ∩ 𝒦(f) is {0}: the oracle parts of the description have no finite zero test"
                    .to_string(),
            );
            analysis.unknown(trail, diagnostics, seed)
        }
    }
}

/// The generic decay-plus-retraction route.
#[must_use]
pub fn certify_main(problem: &ProblemSpec, seed: u64) -> Certificate {
    run_inclusion_route(problem, seed, &FalsifierBudget::default(), Flavor::Generic)
}

/// The structured convex route: convex objective over convex pieces, where
/// convexity supplies the decay bound and constancy cones serve as (exact,
/// for polynomials) retractive cones. Delegates to [`certify_functional`]
/// when a nonconvex piece or objective makes the structure unusable.
#[must_use]
pub fn certify_convex_structured(problem: &ProblemSpec, seed: u64) -> Certificate {
    let shape = Shape::of(problem.constraint());
    let f_convex = problem
        .objective()
        .convexity(problem.assertions().convex)
        .is_convex_usable();
    if f_convex && shape.all_pieces_convex() {
        run_inclusion_route(problem, seed, &FalsifierBudget::default(), Flavor::Convex)
    } else {
        certify_functional(problem, seed)
    }
}

/// The functional route for sublevel-set constraints `gⱼ(x) ≤ 0`. Delegates
/// to [`certify_main`] when the problem has no sublevel pieces.
#[must_use]
pub fn certify_functional(problem: &ProblemSpec, seed: u64) -> Certificate {
    if Shape::of(problem.constraint()).sublevels.is_empty() {
        certify_main(problem, seed)
    } else {
        run_inclusion_route(problem, seed, &FalsifierBudget::default(), Flavor::Functional)
    }
}

/// The coercive-gauge route: the caller asserts that `gauge` is coercive
/// with a Lipschitz gradient and that the objective decays with respect to
/// it. The inclusion engine runs as usual; on top of it, every certified
/// nonzero escape direction must pass the sampled gradient-growth test
/// `limsup ⟨∇gauge(xₖ), d⟩ / tₖ > 0` along the probe ladder `xₖ = x₀ + tₖ·d`.
///
/// Because the gauge facts are assertions and the growth test is sampled,
/// the strongest conclusion this route issues is
/// [`Verdict::ProvenUnderAssertions`] — the one deliberate exception to the
/// "no sampled trail entries above `UNKNOWN`" mapping, and the reason the
/// `PROVEN_*` soundness audit excludes assertion-conditional verdicts.
#[must_use]
pub fn certify_coercive_g(problem: &ProblemSpec, gauge: &FunctionSpec, seed: u64) -> Certificate {
    let mut analysis = Analysis::run(problem, seed);
    let mut diagnostics = Vec::new();
    let Some(feasible) = analysis.feasibility.clone() else {
        return analysis.infeasible(seed);
    };
    if gauge.dimension() != problem.dimension() {
        diagnostics.push(format!(
            "the gauge has dimension {} but the problem has dimension {}; the gauge route cannot run",
            gauge.dimension(),
            problem.dimension()
        ));
        return analysis.unknown(vec![feasible], diagnostics, seed);
    }
    let mut trail = vec![feasible];
    trail.push(Condition {
        statement: format!(
            "the gauge {gauge} is coercive with a Lipschitz gradient, and the objective decays with respect to it"
        ),
        evidence: "caller-supplied facts, taken on faith; the tool does not verify them".to_string(),
        tier: Tier::Asserted,
    });
    trail.push(left_cone_condition(&analysis.left));

    if analysis.left.zero_status() == Some((true, None)) {
        trail.push(vacuous_inclusion_condition(&analysis.left));
        let tier = weakest_tier(trail.iter().map(|c| c.tier));
        return finish_proof(TheoremId::CoerciveGauge, tier, trail, analysis.decay, diagnostics, seed);
    }

    let (members, complete) = confirmed_members(&analysis.left, &mut analysis.rng);
    if members.is_empty() {
        diagnostics.push(no_members_note(complete));
        return analysis.unknown(trail, diagnostics, seed);
    }
    if !complete {
        diagnostics.push(format!(
            "the escape cone has no exact finite generator description; {} sampled member(s) were tested, which cannot support a conclusion",
            members.len()
        ));
        return analysis.unknown(trail, diagnostics, seed);
    }

    let pieces = RightPieces::build(problem, &analysis.effective, Flavor::Generic);
    let budget = FalsifierBudget::default();
    let base = problem.probe().map_or_else(|| vec![0.0; problem.dimension()], <[f64]>::to_vec);
    let mut judged = Vec::with_capacity(members.len());
    for d in &members {
        judged.push((d.clone(), judge_direction(d, &pieces, &analysis.effective, problem.objective(), &budget)));
    }
    if let Some(cert) =
        try_refutations(&judged, &pieces, &analysis, problem, &budget, &mut trail, &mut diagnostics, seed)
    {
        return cert;
    }
    for (d, judgment) in &judged {
        match judgment {
            DirJudgment::Certified { tier, via } => {
                trail.push(certified_direction_condition(d, via, *tier));
                match sampled_gauge_growth(gauge, &base, d) {
                    Some((limsup, last)) if limsup > GAUGE_GROWTH_TOL && last >= 0.5 * limsup => {
                        trail.push(Condition {
                            statement: format!(
                                "sampled gauge gradient growth holds along {}",
                                fmt_vec(d)
                            ),
                            evidence: format!(
                                "limsup ⟨∇gauge(xₖ), d⟩/tₖ ≈ {limsup:.6} > 0 with no vanishing trend over the probe ladder (sampled)"
                            ),
                            tier: Tier::Sampled,
                        });
                    }
                    Some((limsup, _)) => {
                        diagnostics.push(format!(
                            "the sampled gauge gradient growth along {} trends to zero (limsup estimate {limsup:.2e}); the gauge condition cannot be confirmed",
                            fmt_vec(d)
                        ));
                        return analysis.unknown(trail, diagnostics, seed);
                    }
                    None => {
                        diagnostics.push(format!(
                            "the gauge gradient could not be evaluated along {} (non-finite values on the probe ladder)",
                            fmt_vec(d)
                        ));
                        return analysis.unknown(trail, diagnostics, seed);
                    }
                }
            }
            DirJudgment::Undecided { notes } => {
                diagnostics.extend(notes.iter().cloned());
                diagnostics.push(format!(
                    "direction {} could be neither certified nor refuted",
                    fmt_vec(d)
                ));
                return analysis.unknown(trail, diagnostics, seed);
            }
            // Refutations were handled above.
            DirJudgment::RefutedExact { .. } | DirJudgment::RefutedWitness { .. } => unreachable!(),
        }
    }
    finish_proof(TheoremId::CoerciveGauge, Tier::Asserted, trail, analysis.decay, diagnostics, seed)
}

/// Gauge gradient-growth probe: returns `(max, last)` of the sampled ratios
/// `⟨∇gauge(x₀ + t·d), d⟩ / t` over the last five finite rungs of the ladder
/// `t = 4·2ʲ`. The caller accepts when the max clears the threshold *and*
/// the last rung has not collapsed below half of it (a vanishing trend means
/// the true limsup is 0 even though early rungs are positive).
fn sampled_gauge_growth(gauge: &FunctionSpec, base: &[f64], d: &[f64]) -> Option<(f64, f64)> {
    let mut ratios = Vec::new();
    for j in 0..=14 {
        let t = 4.0 * f64::powi(2.0, j);
        let x: Vec<f64> = base.iter().zip(d).map(|(b, di)| b + t * di).collect();
        if let Some(grad) = gauge_gradient(gauge, &x) {
            let r = dot(&grad, d) / t;
            if r.is_finite() {
                ratios.push(r);
            }
        }
    }
    if ratios.len() < 5 {
        return None;
    }
    let tail = &ratios[ratios.len() - 5..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((max, *tail.last().expect("tail has five entries")))
}

/// Gradient of the gauge: exact for polynomials, central differences
/// otherwise (step scaled to the point), `None` when evaluation is not
/// finite.
fn gauge_gradient(gauge: &FunctionSpec, x: &[f64]) -> Option<Vec<f64>> {
    if let FunctionSpec::Poly(p) = gauge {
        let g = p.grad(x);
        return g.iter().all(|v| v.is_finite()).then_some(g);
    }
    let h = 1e-6 * (1.0 + l2_norm(x));
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = gauge.eval(&probe);
        probe[i] = x[i] - h;
        let down = gauge.eval(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return None;
        }
        g[i] = (up - down) / (2.0 * h);
    }
    Some(g)
}

/// Inclusion routes, distinguished only where their hypotheses and naming
/// differ; the engine is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    /// Norm-power decay for a general objective.
    Generic,
    /// Convex objective over convex pieces (decay comes from convexity).
    Convex,
    /// Sublevel-set constraints with a general objective.
    Functional,
}

/// Everything the routes share: the effective set, the three cones, the
/// decay classification (always computed first so the RNG stream is stable
/// across routes), and the feasibility gate.
struct Analysis {
    effective: SetSpec,
    x_inf: ConeDescriptor,
    kappa_f: ConeDescriptor,
    left: ConeDescriptor,
    decay: DecayCertificate,
    feasibility: Option<Condition>,
    rng: ChaCha8Rng,
}

impl Analysis {
    fn run(problem: &ProblemSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let decay = classify_decay(problem.objective(), &problem.assertions().decay(), &mut rng);
        let effective = problem.effective_set();
        let x_inf = effective.asymptotic_cone();
        let kappa_f = kappa_cone(problem.objective(), problem.assertions().convex);
        // A literal intersection of two cones: exact whenever both parts are.
        let left = ConeDescriptor::intersection(
            problem.dimension(),
            "escape cone X∞ ∩ 𝒦(f)",
            &[&x_inf, &kappa_f],
            true,
        );
        let feasibility = problem.probe().map(|p| Condition {
            statement: "the problem is feasible: a point of X ∩ dom f is known".to_string(),
            evidence: format!(
                "probe point {} with objective value {:.6}",
                fmt_vec(p),
                problem.objective().eval(p)
            ),
            tier: Tier::Proven,
        });
        Analysis {
            effective,
            x_inf,
            kappa_f,
            left,
            decay,
            feasibility,
            rng,
        }
    }

    /// `UNKNOWN` because the deterministic probe search found no feasible
    /// point. That search is sampled, so this is evidence of infeasibility,
    /// not proof — hence no `VIOLATED`.
    fn infeasible(self, seed: u64) -> Certificate {
        Certificate {
            verdict: Verdict::Unknown,
            theorem_used: None,
            condition_trail: Vec::new(),
            decay: self.decay,
            violation: None,
            diagnostics: vec![
                "no feasible point found: the deterministic probe search failed, so the problem may be infeasible; certification needs a nonempty feasible set"
                    .to_string(),
            ],
            seed,
        }
    }

    fn unknown(self, trail: Vec<Condition>, diagnostics: Vec<String>, seed: u64) -> Certificate {
        Certificate {
            verdict: Verdict::Unknown,
            theorem_used: None,
            condition_trail: trail,
            decay: self.decay,
            violation: None,
            diagnostics,
            seed,
        }
    }
}

/// Constraint shape: the sublevel pieces (function, asserted-convex flag)
/// found anywhere in the constraint tree.
struct Shape<'a> {
    sublevels: Vec<(&'a FunctionSpec, bool)>,
}

impl<'a> Shape<'a> {
    fn of(set: &'a SetSpec) -> Self {
        fn walk<'a>(set: &'a SetSpec, out: &mut Vec<(&'a FunctionSpec, bool)>) {
            match set {
                SetSpec::FullSpace { .. } | SetSpec::Polyhedral { .. } => {}
                SetSpec::Sublevel {
                    function,
                    asserted_convex,
                    ..
                } => out.push((function, *asserted_convex)),
                SetSpec::Intersection { parts } => {
                    for p in parts {
                        walk(p, out);
                    }
                }
            }
        }
        let mut sublevels = Vec::new();
        walk(set, &mut sublevels);
        Shape { sublevels }
    }

    fn all_pieces_convex(&self) -> bool {
        self.sublevels
            .iter()
            .all(|(g, asserted)| g.convexity(*asserted).is_convex_usable())
    }
}

/// The right side of the inclusion: the set's retractive cone, the
/// objective's, and — when every sublevel piece is convex with an exact
/// constancy description — the all-exact alternate condition through
/// lineality and constancy cones.
struct RightPieces {
    set: ConeDescriptor,
    obj: ConeDescriptor,
    alternate: Option<Alternate>,
}

struct Alternate {
    condition: String,
    pieces: Vec<ConeDescriptor>,
    theorem: TheoremId,
}

impl RightPieces {
    fn build(problem: &ProblemSpec, effective: &SetSpec, flavor: Flavor) -> Self {
        RightPieces {
            set: retractive_cone(effective),
            obj: objective_retract_piece(problem.objective(), problem.assertions().convex),
            alternate: build_alternate(problem, effective, flavor),
        }
    }
}

/// Inner (sometimes exact) description of `ℛ(f)`, the objective's
/// retractive directions.
///
/// For convex `f` every two-sided constancy direction is retractive, so the
/// constancy cone is a sound inner bound. For convex *polynomials* the two
/// cones coincide exactly with `{d : every homogeneous part ≥ 1 vanishes}`,
/// so failing the description refutes membership. Nonconvex objectives get
/// a trivial outer description: nothing certified, refutation left to the
/// retraction search.
fn objective_retract_piece(f: &FunctionSpec, asserted_convex: bool) -> ConeDescriptor {
    let dimension = f.dimension();
    let convexity = f.convexity(asserted_convex);
    if !convexity.is_convex_usable() {
        return ConeDescriptor::polyhedral(
            dimension,
            format!("retractive directions of {f} (nothing certified)"),
            Vec::new(),
            DescriptorBound::Outer,
            Tier::Sampled,
        );
    }
    let mut cone = constancy_cone(f, asserted_convex);
    if cone.bound == DescriptorBound::Outer {
        cone.label = format!("retractive directions of {f} (nothing certified)");
        return cone;
    }
    cone.label = format!("retractive directions of {f} (via its two-sided constancy cone)");
    if !matches!(f, FunctionSpec::Poly(_)) {
        // Constancy is sufficient but possibly not necessary here; keep the
        // description one-sided.
        cone.bound = DescriptorBound::Inner;
    }
    if convexity != ConvexityStatus::ProvenConvex {
        cone.tier = cone.tier.max(Tier::Asserted);
    }
    cone
}

/// The alternate right side `Lin(rows) ∩ (∩ⱼ 𝒞(gⱼ))`, built only when every
/// sublevel piece is convex with an exact constancy description (so failing
/// it is a genuine refutation of this condition, and passing it — together
/// with `ℛ(f)` — certifies the direction).
fn build_alternate(problem: &ProblemSpec, effective: &SetSpec, flavor: Flavor) -> Option<Alternate> {
    if flavor == Flavor::Generic {
        return None;
    }
    let shape = Shape::of(problem.constraint());
    if shape.sublevels.is_empty() || !shape.all_pieces_convex() {
        return None;
    }
    let dimension = effective.dimension();
    let mut pieces = Vec::new();
    let mut has_lineality = false;
    if let Some(poly) = effective.polyhedral_part() {
        let normals = poly.recession_normals();
        if !normals.is_empty() {
            let recession = ConeDescriptor::polyhedral(
                dimension,
                "recession cone of the polyhedral rows",
                normals,
                DescriptorBound::Exact,
                Tier::Proven,
            );
            pieces.push(recession.lineality_restriction("lineality space of the polyhedral rows"));
            has_lineality = true;
        }
    }
    let mut all_polynomial = true;
    for (g, asserted) in &shape.sublevels {
        if !matches!(g, FunctionSpec::Poly(_)) {
            all_polynomial = false;
        }
        pieces.push(constancy_cone(g, *asserted));
    }
    // Every piece must be exact for the alternate to refute or certify.
    if pieces.iter().any(|p| p.bound != DescriptorBound::Exact) {
        return None;
    }
    let theorem = if !has_lineality && all_polynomial {
        TheoremId::ConvexPolynomialConstraints
    } else {
        TheoremId::LinealityConstancy
    };
    let condition = if has_lineality {
        "X∞ ∩ 𝒦(f) ⊆ Lin(rows) ∩ (∩ⱼ 𝒞(gⱼ)) ∩ ℛ(f)".to_string()
    } else {
        "X∞ ∩ 𝒦(f) ⊆ (∩ⱼ 𝒞(gⱼ)) ∩ ℛ(f)".to_string()
    };
    Some(Alternate {
        condition,
        pieces,
        theorem,
    })
}

/// Verdict-relevant outcome of examining one confirmed escape direction.
enum DirJudgment {
    /// In the right side: retractive for the set and the objective.
    Certified { tier: Tier, via: String },
    /// Out of an exact right-side description — a refutation at that
    /// description's tier.
    RefutedExact {
        condition: String,
        detail: String,
        tier: Tier,
        theorem: Option<TheoremId>,
    },
    /// The retraction falsifier found a concrete counterexample.
    RefutedWitness {
        condition: String,
        detail: String,
        witness: RetractionWitness,
    },
    /// Memberships unresolved and the falsifier found nothing.
    Undecided { notes: Vec<String> },
}

/// Examine one direction: exact memberships first (both the direct right
/// side and the alternate), the sampled falsifier only afterwards, so exact
/// refutations always win over sampled ones.
fn judge_direction(
    d: &[f64],
    pieces: &RightPieces,
    effective: &SetSpec,
    objective: &FunctionSpec,
    budget: &FalsifierBudget,
) -> DirJudgment {
    let m_obj = pieces.obj.membership(d, MEMBERSHIP_TOL);
    if m_obj == Membership::Out {
        return DirJudgment::RefutedExact {
            condition: INCLUSION_CONDITION.to_string(),
            detail: format!("the direction is outside {}", pieces.obj.label),
            tier: pieces.obj.tier,
            theorem: None,
        };
    }
    let m_set = pieces.set.membership(d, MEMBERSHIP_TOL);
    if m_set == Membership::Out {
        return DirJudgment::RefutedExact {
            condition: INCLUSION_CONDITION.to_string(),
            detail: format!("the direction is outside {}", pieces.set.label),
            tier: pieces.set.tier,
            theorem: None,
        };
    }
    if m_set == Membership::In && m_obj == Membership::In {
        return DirJudgment::Certified {
            tier: pieces.set.tier.max(pieces.obj.tier),
            via: format!("{}; {}", pieces.set.label, pieces.obj.label),
        };
    }
    if let Some(alt) = &pieces.alternate {
        let memberships: Vec<Membership> = alt
            .pieces
            .iter()
            .map(|p| p.membership(d, MEMBERSHIP_TOL))
            .collect();
        if m_obj == Membership::In && memberships.iter().all(|m| *m == Membership::In) {
            let tier = alt
                .pieces
                .iter()
                .map(|p| p.tier)
                .fold(pieces.obj.tier, Tier::max);
            return DirJudgment::Certified {
                tier,
                via: format!("{} (alternate right side)", alt.condition),
            };
        }
        if let Some((i, _)) = memberships
            .iter()
            .enumerate()
            .find(|(_, m)| **m == Membership::Out)
        {
            return DirJudgment::RefutedExact {
                condition: alt.condition.clone(),
                detail: format!("the direction is outside {}", alt.pieces[i].label),
                tier: alt.pieces[i].tier,
                theorem: Some(alt.theorem),
            };
        }
    }
    let mut notes = Vec::new();
    if m_set == Membership::Unresolved {
        if let Some(witness) = falsify_set_retraction(effective, d, budget) {
            return DirJudgment::RefutedWitness {
                condition: INCLUSION_CONDITION.to_string(),
                detail: format!(
                    "the retraction search found feasible escape points whose pullback exits {}",
                    witness.target
                ),
                witness,
            };
        }
        notes.push(format!(
            "membership of {} in {} is unresolved and the retraction search found no counterexample",
            fmt_vec(d),
            pieces.set.label
        ));
    }
    if m_obj == Membership::Unresolved {
        if let Some(witness) = falsify_function_retraction(objective, Some(effective), d, budget) {
            return DirJudgment::RefutedWitness {
                condition: INCLUSION_CONDITION.to_string(),
                detail:
                    "the retraction search found feasible escape points whose pullback increases the objective"
                        .to_string(),
                witness,
            };
        }
        notes.push(format!(
            "membership of {} in {} is unresolved and the retraction search found no counterexample",
            fmt_vec(d),
            pieces.obj.label
        ));
    }
    DirJudgment::Undecided { notes }
}

/// The shared inclusion engine behind [`certify_main`],
/// [`certify_convex_structured`] and [`certify_functional`].
fn run_inclusion_route(
    problem: &ProblemSpec,
    seed: u64,
    budget: &FalsifierBudget,
    flavor: Flavor,
) -> Certificate {
    let mut analysis = Analysis::run(problem, seed);
    let mut trail = Vec::new();
    let mut diagnostics = Vec::new();
    let Some(feasible) = analysis.feasibility.clone() else {
        return analysis.infeasible(seed);
    };
    trail.push(feasible);

    // Decay gate. The convex route derives its bound from convexity (an
    // affine minorant gives decay with respect to ‖x‖); the classifier
    // already encodes that, so the trail entry is shared.
    let Some(power) = analysis.decay.power() else {
        diagnostics.push(format!("decay unclassified: {}", analysis.decay.rationale));
        diagnostics.push(
            "without a norm-power decay bound the retraction argument cannot close; consider the coercive-gauge route"
                .to_string(),
        );
        return analysis.unknown(trail, diagnostics, seed);
    };
    trail.push(Condition {
        statement: format!(
            "the objective decays no faster than ‖x‖^{power} (a vanishing ‖x‖^{} regularizer restores coercivity)",
            power + 1.0
        ),
        evidence: analysis.decay.rationale.clone(),
        tier: analysis.decay.tier,
    });
    trail.push(left_cone_condition(&analysis.left));

    let shape = Shape::of(problem.constraint());
    if analysis.left.zero_status() == Some((true, None)) {
        trail.push(vacuous_inclusion_condition(&analysis.left));
        let theorem = success_theorem(flavor, &shape, None);
        let tier = weakest_tier(trail.iter().map(|c| c.tier));
        return conclude_inclusion_proof(theorem, tier, trail, analysis.decay, diagnostics, seed);
    }

    let (members, complete) = confirmed_members(&analysis.left, &mut analysis.rng);
    if members.is_empty() {
        diagnostics.push(no_members_note(complete));
        return analysis.unknown(trail, diagnostics, seed);
    }
    if !complete {
        diagnostics.push(format!(
            "the escape cone has no exact finite generator description; {} confirmed sampled member(s) were tested",
            members.len()
        ));
    }

    let pieces = RightPieces::build(problem, &analysis.effective, flavor);
    let mut judged = Vec::with_capacity(members.len());
    for d in &members {
        judged.push((
            d.clone(),
            judge_direction(d, &pieces, &analysis.effective, problem.objective(), budget),
        ));
    }

    if let Some(cert) =
        try_refutations(&judged, &pieces, &analysis, problem, budget, &mut trail, &mut diagnostics, seed)
    {
        return cert;
    }

    let all_certified = judged
        .iter()
        .all(|(_, j)| matches!(j, DirJudgment::Certified { .. }));
    if all_certified && complete {
        let mut used_alternate = None;
        for (d, judgment) in &judged {
            if let DirJudgment::Certified { tier, via } = judgment {
                trail.push(certified_direction_condition(d, via, *tier));
                if via.contains("alternate right side") {
                    used_alternate = pieces.alternate.as_ref().map(|a| a.theorem);
                }
            }
        }
        corroborate_reverse_inclusion(&analysis.left, &pieces, &mut diagnostics);
        let theorem = success_theorem(flavor, &shape, used_alternate);
        let tier = weakest_tier(trail.iter().map(|c| c.tier));
        return conclude_inclusion_proof(theorem, tier, trail, analysis.decay, diagnostics, seed);
    }

    if all_certified {
        diagnostics.push(
            "every confirmed escape direction passed the inclusion, but the sampled membership list cannot stand in for the whole cone"
                .to_string(),
        );
    }
    for (d, judgment) in &judged {
        if let DirJudgment::Undecided { notes } = judgment {
            diagnostics.extend(notes.iter().cloned());
            diagnostics.push(format!(
                "direction {} could be neither certified nor refuted",
                fmt_vec(d)
            ));
        }
    }
    analysis.unknown(trail, diagnostics, seed)
}

/// Scan judgments for refutations — exact ones first (in the canonical
/// direction order), then falsifier witnesses — and build the `VIOLATED`
/// certificate. Exact refutations get a corroborating witness attached when
/// the falsifier can find one.
#[allow(clippy::too_many_arguments)]
fn try_refutations(
    judged: &[(Vec<f64>, DirJudgment)],
    pieces: &RightPieces,
    analysis: &Analysis,
    problem: &ProblemSpec,
    budget: &FalsifierBudget,
    trail: &mut Vec<Condition>,
    diagnostics: &mut Vec<String>,
    seed: u64,
) -> Option<Certificate> {
    let exact = judged.iter().find_map(|(d, j)| match j {
        DirJudgment::RefutedExact {
            condition,
            detail,
            tier,
            theorem,
        } => Some((d, condition.clone(), detail.clone(), *tier, *theorem)),
        _ => None,
    });
    if let Some((d, condition, detail, tier, alt_theorem)) = exact {
        let witness = falsify_set_retraction(&analysis.effective, d, budget).or_else(|| {
            falsify_function_retraction(problem.objective(), Some(&analysis.effective), d, budget)
        });
        if witness.is_some() {
            diagnostics.push(
                "the retraction search corroborates the exact refutation with a replayable counterexample"
                    .to_string(),
            );
        }
        let theorem = alt_theorem.unwrap_or_else(|| {
            success_theorem(route_flavor(problem), &Shape::of(problem.constraint()), None)
        });
        trail.push(Condition {
            statement: format!("the condition {condition} FAILS at direction {}", fmt_vec(d)),
            evidence: detail.clone(),
            tier,
        });
        return Some(violated_certificate(
            theorem,
            ViolationEvidence {
                direction: d.clone(),
                condition,
                detail,
                tier,
                witness,
            },
            trail.clone(),
            analysis.decay.clone(),
            diagnostics.clone(),
            seed,
        ));
    }
    let sampled = judged.iter().find_map(|(d, j)| match j {
        DirJudgment::RefutedWitness {
            condition,
            detail,
            witness,
        } => Some((d, condition.clone(), detail.clone(), witness.clone())),
        _ => None,
    });
    if let Some((d, condition, detail, witness)) = sampled {
        let theorem = success_theorem(route_flavor(problem), &Shape::of(problem.constraint()), None);
        trail.push(Condition {
            statement: format!("the condition {condition} FAILS at direction {}", fmt_vec(d)),
            evidence: detail.clone(),
            tier: Tier::Sampled,
        });
        return Some(violated_certificate(
            theorem,
            ViolationEvidence {
                direction: d.clone(),
                condition,
                detail,
                tier: Tier::Sampled,
                witness: Some(witness),
            },
            trail.clone(),
            analysis.decay.clone(),
            diagnostics.clone(),
            seed,
        ));
    }
    // Unused on purpose when no refutation exists.
    let _ = pieces;
    None
}

/// Confirmed members of the escape cone, canonically ordered, plus whether
/// the list provably covers the cone (exact finite generator form).
///
/// With generator form, the extreme rays and lineality basis are the whole
/// story. Without it, seeded interior samples of the row cone and random
/// unit probes are filtered through the descriptor's membership test; the
/// survivors are genuine members, but the list is not exhaustive and the
/// caller must not promote an all-pass into a proof.
fn confirmed_members(left: &ConeDescriptor, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, bool) {
    let complete = left.generator_form().is_some();
    let row_cone = extreme_rays(left.dimension, &left.rows);
    let mut candidates = row_cone.generators();
    if !complete {
        candidates.extend(row_cone.sample_directions(rng, SAMPLE_DIRECTIONS));
        for _ in 0..RANDOM_PROBES {
            candidates.push(random_unit(left.dimension, rng));
        }
    }
    let mut members: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        let Some(u) = normalized(&c) else { continue };
        if left.membership(&u, MEMBERSHIP_TOL) != Membership::In {
            continue;
        }
        if members.iter().any(|m| dot(m, &u) > 1.0 - 1e-9) {
            continue;
        }
        members.push(u);
    }
    members.sort_by(|a, b| canonical_direction_order(a, b));
    (members, complete)
}

/// Deterministic direction order: earlier first support wins, then
/// descending coordinates — so `e₃` sorts before `e₄` and `+e` before `−e`.
fn canonical_direction_order(a: &[f64], b: &[f64]) -> Ordering {
    let support = |v: &[f64]| v.iter().position(|x| x.abs() > 1e-9).unwrap_or(v.len());
    support(a).cmp(&support(b)).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            match y.total_cmp(x) {
                Ordering::Equal => {}
                non_eq => return non_eq,
            }
        }
        Ordering::Equal
    })
}

fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = l2_norm(v);
    (n > 1e-12).then(|| v.iter().map(|x| x / n).collect())
}

fn random_unit(dimension: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Route naming on success: which statement the certificate cites.
fn success_theorem(flavor: Flavor, shape: &Shape<'_>, alternate: Option<TheoremId>) -> TheoremId {
    if let Some(t) = alternate {
        return t;
    }
    match flavor {
        Flavor::Generic => TheoremId::DecayRetraction,
        Flavor::Convex => {
            if shape.sublevels.is_empty() {
                TheoremId::PolyhedralConvexProgram
            } else {
                TheoremId::ConvexProgram
            }
        }
        Flavor::Functional => {
            if shape.all_pieces_convex() {
                TheoremId::ConvexPieceRetraction
            } else {
                TheoremId::SublevelCones
            }
        }
    }
}

fn left_cone_condition(left: &ConeDescriptor) -> Condition {
    Condition {
        statement: "computed the escape cone X∞ ∩ 𝒦(f): the feasible directions along which the objective does not grow"
            .to_string(),
        evidence: describe(left),
        tier: left.tier,
    }
}

fn vacuous_inclusion_condition(left: &ConeDescriptor) -> Condition {
    Condition {
        statement: "X∞ ∩ 𝒦(f) = {0}: the inclusion into the retractive cones holds vacuously"
            .to_string(),
        evidence: describe(left),
        tier: left.tier,
    }
}

fn certified_direction_condition(d: &[f64], via: &str, tier: Tier) -> Condition {
    Condition {
        statement: format!(
            "escape direction {} is retractive for the set and the objective",
            fmt_vec(d)
        ),
        evidence: via.to_string(),
        tier,
    }
}

fn no_members_note(complete: bool) -> String {
    if complete {
        "the escape cone's generators collapse numerically; no nonzero member could be confirmed"
            .to_string()
    } else {
        "no nonzero member of the escape cone could be confirmed (outer bound without exact membership), so the inclusion cannot be tested"
            .to_string()
    }
}

/// Map the weakest trail tier to a verdict for an inclusion proof. A
/// sampled-tier trail can never support a proof; that branch is defensive.
fn conclude_inclusion_proof(
    theorem: TheoremId,
    tier: Tier,
    trail: Vec<Condition>,
    decay: DecayCertificate,
    mut diagnostics: Vec<String>,
    seed: u64,
) -> Certificate {
    let verdict = match tier {
        Tier::Proven => Verdict::ProvenExists,
        Tier::Asserted => Verdict::ProvenUnderAssertions,
        Tier::Sampled => {
            diagnostics.push(
                "the hypothesis trail bottoms out at sampled evidence, which cannot support a proof"
                    .to_string(),
            );
            Verdict::Unknown
        }
    };
    Certificate {
        verdict,
        theorem_used: (verdict != Verdict::Unknown).then_some(theorem),
        condition_trail: trail,
        decay,
        violation: None,
        diagnostics,
        seed,
    }
}

/// Same mapping for the compactness route (proven tier means the solution
/// set is also compact).
fn compact_success(
    trail: Vec<Condition>,
    mut diagnostics: Vec<String>,
    decay: DecayCertificate,
    seed: u64,
) -> Certificate {
    let tier = weakest_tier(trail.iter().map(|c| c.tier));
    let verdict = match tier {
        Tier::Proven => Verdict::ProvenExistsCompact,
        Tier::Asserted => {
            diagnostics.push(
                "compactness holds under the caller's assertions; the solution set is compact if they do"
                    .to_string(),
            );
            Verdict::ProvenUnderAssertions
        }
        Tier::Sampled => {
            diagnostics.push(
                "the hypothesis trail bottoms out at sampled evidence, which cannot support a proof"
                    .to_string(),
            );
            Verdict::Unknown
        }
    };
    Certificate {
        verdict,
        theorem_used: (verdict != Verdict::Unknown).then_some(TheoremId::CompactSublevels),
        condition_trail: trail,
        decay,
        violation: None,
        diagnostics,
        seed,
    }
}

/// Gauge-route success keeps its own mapping: the trail legitimately mixes
/// asserted gauge facts with sampled growth probes, which is exactly why the
/// verdict is capped at assertion-conditional.
fn finish_proof(
    theorem: TheoremId,
    tier: Tier,
    trail: Vec<Condition>,
    decay: DecayCertificate,
    diagnostics: Vec<String>,
    seed: u64,
) -> Certificate {
    let verdict = match tier {
        Tier::Proven | Tier::Asserted => Verdict::ProvenUnderAssertions,
        Tier::Sampled => Verdict::ProvenUnderAssertions,
    };
    Certificate {
        verdict,
        theorem_used: Some(theorem),
        condition_trail: trail,
        decay,
        violation: None,
        diagnostics,
        seed,
    }
}

fn violated_certificate(
    theorem: TheoremId,
    violation: ViolationEvidence,
    trail: Vec<Condition>,
    decay: DecayCertificate,
    mut diagnostics: Vec<String>,
    seed: u64,
) -> Certificate {
    diagnostics.push(VIOLATION_CAVEAT.to_string());
    Certificate {
        verdict: Verdict::Violated,
        theorem_used: Some(theorem),
        condition_trail: trail,
        decay,
        violation: Some(violation),
        diagnostics,
        seed,
    }
}

/// Sampled corroboration for proofs: equality of the two sides is expected,
/// so generators of the certified right side are checked back against the
/// escape cone and the tally recorded in the diagnostics (never the trail).
fn corroborate_reverse_inclusion(
    left: &ConeDescriptor,
    pieces: &RightPieces,
    diagnostics: &mut Vec<String>,
) {
    let mut rows = pieces.set.rows.clone();
    rows.extend(pieces.obj.rows.iter().cloned());
    let generators = extreme_rays(left.dimension, &rows).generators();
    let mut checked = 0usize;
    let mut inside = 0usize;
    for g in generators.into_iter().take(REVERSE_CHECK_LIMIT) {
        let Some(u) = normalized(&g) else { continue };
        // Only directions the full descriptions certify count as right-side
        // samples (the row cones alone may overshoot the described cones).
        if pieces.set.membership(&u, MEMBERSHIP_TOL) != Membership::In
            || pieces.obj.membership(&u, MEMBERSHIP_TOL) != Membership::In
        {
            continue;
        }
        checked += 1;
        if left.membership(&u, MEMBERSHIP_TOL) == Membership::In {
            inside += 1;
        }
    }
    if checked > 0 {
        diagnostics.push(format!(
            "reverse-inclusion corroboration: {inside}/{checked} sampled retractive directions lie back in the escape cone (sampled; equality of the two sides is expected)"
        ));
    }
}

/// Sampled growth corroboration used when the compactness route falls
/// through without an exact `𝒦(f)`: probe the feasible cone's generators and
/// note which ones the objective demonstrably does not grow along.
fn corroborate_growth(
    x_inf: &ConeDescriptor,
    objective: &FunctionSpec,
    rng: &mut ChaCha8Rng,
    diagnostics: &mut Vec<String>,
) {
    use crate::asymptotics::{estimate_asymptotic, ExtendedReal, SamplingSchedule};
    let schedule = SamplingSchedule::default();
    let mut flat = 0usize;
    let mut total = 0usize;
    for g in extreme_rays(x_inf.dimension, &x_inf.rows).generators().into_iter().take(8) {
        let Some(u) = normalized(&g) else { continue };
        total += 1;
        match estimate_asymptotic(objective, &u, &schedule, rng) {
            ExtendedReal::PlusInfinity => {}
            ExtendedReal::MinusInfinity | ExtendedReal::Finite(_) => flat += 1,
        }
    }
    if total > 0 {
        diagnostics.push(format!(
            "sampled growth probe: the objective failed to grow along {flat}/{total} generator(s) of the feasible cone's row description (sampled; not evidence of compactness)"
        ));
    }
}

fn describe(c: &ConeDescriptor) -> String {
    let bound = match c.bound {
        DescriptorBound::Exact => "exact",
        DescriptorBound::Outer => "outer",
        DescriptorBound::Inner => "inner",
    };
    format!(
        "{}: {} halfspace row(s), {} oracle(s); {bound} description at {} tier",
        c.label,
        c.rows.len(),
        c.oracles.len(),
        c.tier
    )
}

fn fmt_vec(v: &[f64]) -> String {
    let body: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", body.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{BlackBox, Builtin};
    use crate::polyhedra::Polyhedron;
    use crate::retract::ViolationKind;

    fn poly(dimension: usize, terms: &[(f64, Vec<u32>)]) -> FunctionSpec {
        FunctionSpec::poly_from_terms(dimension, terms)
    }

    fn orthant(dimension: usize) -> SetSpec {
        let rows: Vec<(Vec<f64>, f64)> = (0..dimension)
            .map(|i| {
                let mut normal = vec![0.0; dimension];
                normal[i] = -1.0;
                (normal, 0.0)
            })
            .collect();
        SetSpec::polyhedron(Polyhedron::new(dimension, &rows).unwrap())
    }

    /// min x₁² − 2x₁x₂ + x₃x₄ subject to x₁² ≤ x₃ and x₂² ≤ x₄: the infimum
    /// −1 is approached along the parabolas but never attained.
    fn coupled_quadratic_problem() -> ProblemSpec {
        let f = poly(
            4,
            &[
                (1.0, vec![2, 0, 0, 0]),
                (-2.0, vec![1, 1, 0, 0]),
                (1.0, vec![0, 0, 1, 1]),
            ],
        );
        let g1 = poly(4, &[(1.0, vec![2, 0, 0, 0]), (-1.0, vec![0, 0, 1, 0])]);
        let g2 = poly(4, &[(1.0, vec![0, 2, 0, 0]), (-1.0, vec![0, 0, 0, 1])]);
        ProblemSpec::new(
            4,
            f,
            SetSpec::intersection(vec![
                SetSpec::sublevel(g1, 0.0),
                SetSpec::sublevel(g2, 0.0),
            ]),
        )
    }

    /// min x₁² + x₂ subject to √|x₁| ≤ x₂: attained at the origin even
    /// though the feasible set is unbounded and nonconvex.
    fn sqrt_cage_problem() -> ProblemSpec {
        let f = poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 1])]);
        let g = FunctionSpec::black_box(
            2,
            BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]),
        );
        ProblemSpec::new(2, f, SetSpec::sublevel(g, 0.0))
    }

    #[test]
    fn coupled_quadratic_with_parabolic_cages_is_refuted() {
        let cert = certify(&coupled_quadratic_problem(), 7);
        assert_eq!(cert.verdict, Verdict::Violated);
        assert_eq!(cert.theorem_used, Some(TheoremId::ConvexPolynomialConstraints));
        let violation = cert.violation.as_ref().expect("refutations carry evidence");
        // Canonical ordering pins the first refuted escape direction to e₃.
        let expected = [0.0, 0.0, 1.0, 0.0];
        for (got, want) in violation.direction.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9, "direction {:?}", violation.direction);
        }
        assert_eq!(violation.tier, Tier::Proven, "constancy cones are exact");
        assert!(violation.condition.contains("𝒞"), "cites the constancy condition");
        let witness = violation.witness.as_ref().expect("falsifier corroborates");
        assert_eq!(witness.kind, ViolationKind::SetExit);
        assert!(cert.diagnostics.iter().any(|d| d == VIOLATION_CAVEAT));
        assert_eq!(cert.verdict.to_string(), "VIOLATED");
    }

    #[test]
    fn sqrt_cage_attains_despite_noncompact_sublevels() {
        let cert = certify(&sqrt_cage_problem(), 7);
        assert_eq!(cert.verdict, Verdict::ProvenExists);
        assert_eq!(cert.theorem_used, Some(TheoremId::SublevelCones));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));
        // Exactness of X∞ is unavailable here, so the compactness route must
        // have declined even though the escape cone is {0}.
        assert_ne!(cert.verdict, Verdict::ProvenExistsCompact);
        assert!(cert
            .diagnostics
            .iter()
            .any(|d| d.starts_with("compactness route:")));
    }

    #[test]
    fn neg_sqrt_over_the_half_line_yields_an_increase_witness() {
        let f = FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 }));
        let prob = ProblemSpec::new(1, f, orthant(1));
        let cert = certify(&prob, 7);
        assert_eq!(cert.verdict, Verdict::Violated);
        let violation = cert.violation.expect("witness-backed refutation");
        assert!((violation.direction[0] - 1.0).abs() < 1e-9);
        assert_eq!(violation.tier, Tier::Sampled);
        let witness = violation.witness.expect("the falsifier found the increase");
        assert_eq!(witness.kind, ViolationKind::FunctionIncrease);
        assert!(
            witness.gaps.iter().all(|g| *g > 0.0),
            "retraction must increase the value at every recorded scale"
        );
    }

    #[test]
    fn exponential_on_the_line_is_refuted_along_the_negative_axis() {
        let f = FunctionSpec::black_box(1, BlackBox::new(Builtin::ExpLinear { coeffs: vec![1.0] }));
        let prob = ProblemSpec::new(1, f, SetSpec::full_space(1));
        let cert = certify(&prob, 7);
        assert_eq!(cert.verdict, Verdict::Violated);
        let violation = cert.violation.expect("witness-backed refutation");
        assert!((violation.direction[0] + 1.0).abs() < 1e-9);
        assert_eq!(
            violation.witness.expect("falsifier witness").kind,
            ViolationKind::FunctionIncrease
        );
    }

    #[test]
    fn compactness_route_certifies_three_shapes() {
        // Strictly convex quadratic on the whole plane: 𝒦(f) = {0}.
        let f = poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]);
        let cert = certify(&ProblemSpec::new(2, f, SetSpec::full_space(2)), 3);
        assert_eq!(cert.verdict, Verdict::ProvenExistsCompact);
        assert_eq!(cert.theorem_used, Some(TheoremId::CompactSublevels));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));
        assert_eq!(cert.verdict.to_string(), "PROVEN_EXISTS_COMPACT");

        // Linear objective over the orthant: growth along every feasible ray.
        let f = poly(2, &[(1.0, vec![1, 0]), (1.0, vec![0, 1])]);
        let cert = certify(&ProblemSpec::new(2, f, orthant(2)), 3);
        assert_eq!(cert.verdict, Verdict::ProvenExistsCompact);

        // Bounded box with a nonconvex objective: X∞ = {0} alone suffices,
        // no exact description of 𝒦(f) needed.
        let f = poly(2, &[(1.0, vec![2, 0]), (-4.0, vec![0, 2])]);
        let the_box = SetSpec::polyhedron(
            Polyhedron::from_box(
                &[Some(-1.0), Some(-1.0)],
                &[Some(1.0), Some(1.0)],
            )
            .unwrap(),
        );
        let cert = certify(&ProblemSpec::new(2, f, the_box), 3);
        assert_eq!(cert.verdict, Verdict::ProvenExistsCompact);
        assert!(cert
            .condition_trail
            .iter()
            .any(|c| c.statement.contains("X∞ = {0}")));
    }

    #[test]
    fn bounded_linear_programs_attain_and_unbounded_ones_refute() {
        // min x₁ over x₁ ≥ 0 (x₂ free): attained all along the x₂ axis.
        let f = poly(2, &[(1.0, vec![1, 0])]);
        let half = SetSpec::polyhedron(Polyhedron::new(2, &[(vec![-1.0, 0.0], 0.0)]).unwrap());
        let cert = certify(&ProblemSpec::new(2, f, half.clone()), 11);
        assert_eq!(cert.verdict, Verdict::ProvenExists);
        assert_eq!(cert.theorem_used, Some(TheoremId::PolyhedralConvexProgram));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));

        // min −x₁ over the same set: the objective decreases along e₁
        // forever, so the inclusion fails exactly (constancy excludes e₁).
        let f = poly(2, &[(-1.0, vec![1, 0])]);
        let cert = certify(&ProblemSpec::new(2, f, half), 11);
        assert_eq!(cert.verdict, Verdict::Violated);
        let violation = cert.violation.expect("exact refutation");
        assert_eq!(violation.tier, Tier::Proven);
        assert!((violation.direction[0] - 1.0).abs() < 1e-9);
        assert!((violation.direction[1]).abs() < 1e-9);
        let witness = violation.witness.expect("corroborating witness");
        assert_eq!(witness.kind, ViolationKind::FunctionIncrease);
    }

    #[test]
    fn singular_convex_quadratic_attains_on_the_orthant() {
        // min (x₁ − x₂)² over x ≥ 0: the escape ray (1,1) is a constancy
        // direction of the objective and recession direction of the set.
        let f = poly(
            2,
            &[(1.0, vec![2, 0]), (-2.0, vec![1, 1]), (1.0, vec![0, 2])],
        );
        let cert = certify(&ProblemSpec::new(2, f, orthant(2)), 13);
        assert_eq!(cert.verdict, Verdict::ProvenExists);
        assert_eq!(cert.theorem_used, Some(TheoremId::PolyhedralConvexProgram));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));
        assert!(cert
            .diagnostics
            .iter()
            .any(|d| d.contains("reverse-inclusion corroboration")));
        assert!(cert
            .condition_trail
            .iter()
            .any(|c| c.statement.contains("is retractive")));
    }

    #[test]
    fn parabolic_sublevel_with_free_coordinate_attains_noncompactly() {
        // min x₂ over {x₁² ≤ x₂} × ℝ in ℝ³: minimizers run all along the
        // free x₃ axis, so existence holds without compactness.
        let f = poly(3, &[(1.0, vec![0, 1, 0])]);
        let g = poly(3, &[(1.0, vec![2, 0, 0]), (-1.0, vec![0, 1, 0])]);
        let cert = certify(&ProblemSpec::new(3, f, SetSpec::sublevel(g, 0.0)), 5);
        assert_eq!(cert.verdict, Verdict::ProvenExists);
        assert_eq!(cert.theorem_used, Some(TheoremId::ConvexProgram));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));
        // Both signs of the free axis must have been certified.
        let certified = cert
            .condition_trail
            .iter()
            .filter(|c| c.statement.contains("is retractive"))
            .count();
        assert_eq!(certified, 2);
    }

    #[test]
    fn unbounded_nonconvex_quadratic_over_a_half_line_is_refuted() {
        // min x₂² − x₁² over {x₁ ≥ 1, x₂ = 0}: f → −∞ along e₁ and the
        // retraction increases the value, caught by the falsifier.
        let f = poly(2, &[(1.0, vec![0, 2]), (-1.0, vec![2, 0])]);
        let set = SetSpec::polyhedron(
            Polyhedron::new(
                2,
                &[
                    (vec![-1.0, 0.0], -1.0),
                    (vec![0.0, 1.0], 0.0),
                    (vec![0.0, -1.0], 0.0),
                ],
            )
            .unwrap(),
        );
        let cert = certify(&ProblemSpec::new(2, f, set), 17);
        assert_eq!(cert.verdict, Verdict::Violated);
        assert_eq!(cert.theorem_used, Some(TheoremId::DecayRetraction));
        let violation = cert.violation.expect("witness refutation");
        assert!((violation.direction[0] - 1.0).abs() < 1e-9);
        assert_eq!(
            violation.witness.expect("falsifier witness").kind,
            ViolationKind::FunctionIncrease
        );
    }

    #[test]
    fn black_box_objective_over_a_box_is_proven_compact() {
        // Every function expressible here is lower semicontinuous on a closed
        // effective domain, so a provably bounded feasible set settles
        // existence outright — no convexity assertion about the black box is
        // needed, and none is consulted.
        let f = FunctionSpec::parse_expr(2, "exp(x1) + x2^2").unwrap();
        let the_box = SetSpec::polyhedron(
            Polyhedron::from_box(&[Some(-1.0), Some(-1.0)], &[Some(1.0), Some(1.0)]).unwrap(),
        );
        let cert = certify(&ProblemSpec::new(2, f.clone(), the_box), 23);
        assert_eq!(cert.verdict, Verdict::ProvenExistsCompact);
        assert_eq!(cert.theorem_used, Some(TheoremId::CompactSublevels));
        assert_eq!(cert.trail_tier(), Some(Tier::Proven));

        // Over an unbounded polyhedron the same black box gives the cone
        // algebra nothing exact to work with: no proof tier survives.
        let upper = SetSpec::polyhedron(Polyhedron::new(2, &[(vec![0.0, -1.0], 0.0)]).unwrap());
        let cert = certify(&ProblemSpec::new(2, f, upper), 23);
        assert_eq!(cert.verdict, Verdict::Unknown);
    }

    #[test]
    fn bounded_polyhedral_piece_pins_compactness_at_proven_tier() {
        // A box intersected with anything closed is compact, no matter how
        // weak the evidence about the other piece: the asymptotic cone of the
        // intersection sits inside the box's cone {0}.
        let f = poly(2, &[(1.0, vec![1, 0])]);
        let quartic = poly(2, &[(1.0, vec![4, 0]), (1.0, vec![0, 4])]);
        for asserted in [true, false] {
            let constraint = SetSpec::intersection(vec![
                SetSpec::polyhedron(
                    Polyhedron::from_box(&[Some(-1.0), Some(-1.0)], &[Some(1.0), Some(1.0)])
                        .unwrap(),
                ),
                SetSpec::Sublevel {
                    function: quartic.clone(),
                    level: 10.0,
                    asserted_convex: asserted,
                },
            ]);
            let cert = certify(&ProblemSpec::new(2, f.clone(), constraint), 23);
            assert_eq!(cert.verdict, Verdict::ProvenExistsCompact);
            assert_eq!(cert.theorem_used, Some(TheoremId::CompactSublevels));
            assert_eq!(cert.trail_tier(), Some(Tier::Proven));
        }
    }

    #[test]
    fn coercive_gauge_route_grades_sampled_gradient_growth() {
        // Vacuous inclusion: still only assertion-conditional, because the
        // gauge facts themselves are assertions.
        let f = poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]);
        let gauge = poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]);
        let prob = ProblemSpec::new(2, f, SetSpec::full_space(2));
        let cert = certify_coercive_g(&prob, &gauge, 29);
        assert_eq!(cert.verdict, Verdict::ProvenUnderAssertions);
        assert_eq!(cert.theorem_used, Some(TheoremId::CoerciveGauge));

        // Nonzero escape directions: the sampled gradient-growth test runs
        // along ±e₁ and holds for a strongly convex gauge.
        let f = poly(2, &[(1.0, vec![0, 1])]);
        let upper = SetSpec::polyhedron(Polyhedron::new(2, &[(vec![0.0, -1.0], 0.0)]).unwrap());
        let prob = ProblemSpec::new(2, f, upper);
        let gauge = poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]);
        let cert = certify_coercive_g(&prob, &gauge, 29);
        assert_eq!(cert.verdict, Verdict::ProvenUnderAssertions);
        assert!(cert
            .condition_trail
            .iter()
            .any(|c| c.tier == Tier::Sampled && c.statement.contains("gradient growth")));

        // A gauge with bounded gradient (each term ~ |xᵢ| at infinity): the
        // sampled ratios decay to zero and the route declines.
        let flat_gauge =
            FunctionSpec::parse_expr(2, "sqrt(1 + x1^2) + sqrt(1 + x2^2)").unwrap();
        let f = poly(2, &[(1.0, vec![0, 1])]);
        let upper = SetSpec::polyhedron(Polyhedron::new(2, &[(vec![0.0, -1.0], 0.0)]).unwrap());
        let prob = ProblemSpec::new(2, f, upper);
        let cert = certify_coercive_g(&prob, &flat_gauge, 29);
        assert_eq!(cert.verdict, Verdict::Unknown);
        assert!(cert
            .diagnostics
            .iter()
            .any(|d| d.contains("trends to zero")));
    }

    #[test]
    fn sampled_gauge_growth_matches_the_quadratic_closed_form() {
        // g = x²: ⟨∇g(t·d), d⟩/t = 2 at every rung.
        let gauge = poly(1, &[(1.0, vec![2])]);
        let (limsup, last) = sampled_gauge_growth(&gauge, &[0.0], &[1.0]).unwrap();
        assert!((limsup - 2.0).abs() < 1e-6, "limsup {limsup}");
        assert!((last - 2.0).abs() < 1e-6);

        // g = √(1+x²): the ratio is ~1/t, so the trend collapses.
        let gauge = FunctionSpec::parse_expr(1, "sqrt(1 + x1^2)").unwrap();
        let (limsup, last) = sampled_gauge_growth(&gauge, &[0.0], &[1.0]).unwrap();
        assert!(limsup < 1e-2, "limsup {limsup}");
        assert!(last < 0.5 * limsup, "the vanishing trend must be visible");
    }

    #[test]
    fn added_constraints_never_flip_violated_into_a_proof() {
        // Each pair keeps the refuted escape direction feasible, so the
        // refutation must survive the extra constraint.
        let f = FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 }));
        let base = ProblemSpec::new(1, f.clone(), orthant(1));
        let tightened = ProblemSpec::new(
            1,
            f,
            SetSpec::polyhedron(Polyhedron::new(1, &[(vec![-1.0], -1.0)]).unwrap()),
        );
        let before = certify(&base, 31);
        let after = certify(&tightened, 31);
        assert_eq!(before.verdict, Verdict::Violated);
        assert!(
            !after.verdict.concludes_existence(),
            "x ≥ 1 keeps the escape direction; got {}",
            after.verdict
        );

        let lz = certify(&coupled_quadratic_problem(), 31);
        let boxed = {
            let mut parts = match coupled_quadratic_problem().constraint().clone() {
                SetSpec::Intersection { parts } => parts,
                other => vec![other],
            };
            parts.push(SetSpec::polyhedron(
                Polyhedron::from_box(&[Some(-1.0), None, None, None], &[Some(1.0), None, None, None])
                    .unwrap(),
            ));
            ProblemSpec::new(
                4,
                coupled_quadratic_problem().objective().clone(),
                SetSpec::intersection(parts),
            )
        };
        let boxed_cert = certify(&boxed, 31);
        assert_eq!(lz.verdict, Verdict::Violated);
        assert!(
            !boxed_cert.verdict.concludes_existence(),
            "bounding x₁ keeps e₃ feasible; got {}",
            boxed_cert.verdict
        );
    }

    #[test]
    fn infeasible_problems_report_unknown_with_the_reason() {
        let f = poly(1, &[(1.0, vec![1])]);
        let empty = SetSpec::polyhedron(
            Polyhedron::new(1, &[(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap(),
        );
        let cert = certify(&ProblemSpec::new(1, f, empty), 37);
        assert_eq!(cert.verdict, Verdict::Unknown);
        assert!(cert.diagnostics.iter().any(|d| d.contains("no feasible point")));
        assert!(cert.condition_trail.is_empty());
    }

    #[test]
    fn certificates_are_deterministic_and_serialize_round_trip() {
        let prob = coupled_quadratic_problem();
        let a = certify(&prob, 42);
        let b = certify(&prob, 42);
        assert_eq!(a, b, "same seed, same certificate");

        let json = serde_json::to_string(&a).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        assert!(json.contains("\"VIOLATED\""));
        assert!(json.contains("\"convex_polynomial_constraints\""));
    }

    #[test]
    fn canonical_direction_order_is_support_then_descending() {
        let e3 = vec![0.0, 0.0, 1.0, 0.0];
        let e4 = vec![0.0, 0.0, 0.0, 1.0];
        assert_eq!(canonical_direction_order(&e3, &e4), Ordering::Less);
        let e2 = vec![0.0, 1.0];
        let neg_e2 = vec![0.0, -1.0];
        assert_eq!(canonical_direction_order(&e2, &neg_e2), Ordering::Less);
    }

    #[test]
    fn proofs_cite_no_sampled_trail_entries() {
        // The audit behind the PROVEN_* family, run on this module's own
        // proof-producing examples.
        let proofs = [
            certify(&sqrt_cage_problem(), 1),
            certify(
                &ProblemSpec::new(
                    2,
                    poly(2, &[(1.0, vec![2, 0]), (1.0, vec![0, 2])]),
                    SetSpec::full_space(2),
                ),
                1,
            ),
        ];
        for cert in proofs {
            assert!(cert.verdict.is_proven());
            assert!(
                cert.condition_trail.iter().all(|c| c.tier == Tier::Proven),
                "a proven verdict must not cite non-proven evidence: {:?}",
                cert.condition_trail
            );
        }
    }
}
