//! Retractive directions and their falsification.
//!
//! A direction `d ∈ X_∞` is **retractive** for a closed set `X` when every
//! sequence `x_k ∈ X` with `‖x_k‖ → ∞` and `x_k/‖x_k‖ → d/‖d‖` eventually
//! satisfies `x_k − ρd ∈ X` for each fixed `ρ > 0`: escaping along `d` can be
//! walked back without leaving the set. Similarly `d` is retractive for a
//! function when the walk-back does not increase its value. Existence
//! certificates hinge on these properties along the common directions of
//! `X_∞ ∩ 𝒦(f)`, so this module provides both sides of the argument:
//!
//! - **Certified cones.** [`retractive_cone`] describes directions *known*
//!   retractive: every recession direction of a polyhedron (linear slack
//!   grows along the ray, a fixed retraction eventually fits), and for a
//!   closed convex sublevel set the lineality directions of `𝒦(g)` (there
//!   `x − ρd = x + ρ(−d)` stays inside for every `x`, since `−d` is also a
//!   recession direction). These are inner bounds in general:
//!   [`DescriptorBound::Inner`] membership certifies retractivity and never
//!   refutes it. [`constancy_cone`] describes `𝒞(g) = {d : g_∞(d) = g_∞(−d)
//!   = 0}`, the two-sided constancy directions used by the structured convex
//!   existence conditions.
//! - **Falsifiers.** [`falsify_set_retraction`] and
//!   [`falsify_function_retraction`] hunt for a counterexample sequence: a
//!   deterministic family of escape curves `x(t) = t·d + t^α·w` (rays,
//!   transverse offsets, and boundary traces found by bisection) is probed at
//!   geometric scales `t = 2^k`, and each probe's retraction `x − ρd` is
//!   classified against rounding noise. A [`RetractionWitness`] is returned
//!   only when the violation persists through the last five numerically
//!   meaningful scales — transient small-scale violations and noise-level
//!   flickers are ignored, matching the "eventually" in the definition.
//!
//! The falsifiers are exhaustive within their budget and fully deterministic;
//! randomness (if any) lives with the caller choosing candidate directions.

use serde::{Deserialize, Serialize};

use crate::algebra::{certify_convexity, ConvexityStatus};
use crate::asymptotics::{kappa_cone, ConeDescriptor, DescriptorBound, MembershipOracle};
use crate::functions::{FunctionSpec, GapEstimate, NOISE_FACTOR};
use crate::polyhedra::{dot, l2_norm};
use crate::sets::SetSpec;
use crate::Tier;

/// Search budget for the retraction falsifiers. The defaults probe scales
/// `t = 2²…2³²`, retraction lengths `{1, ‖d‖, 10}`, and curve offsets growing
/// like `t⁰` and `t^½` (both keep `x(t)/t → d`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifierBudget {
    /// Smallest scale exponent: probes start at `t = 2^min_scale_exp`.
    pub min_scale_exp: u32,
    /// Largest scale exponent (inclusive).
    pub max_scale_exp: u32,
    /// Retraction lengths to try (the direction's own norm is added).
    pub rho_grid: Vec<f64>,
    /// Offset growth exponents `α` for the curve families (each must be
    /// `< 1` so that `x(t)/t → d`).
    pub curve_alphas: Vec<f64>,
    /// How many transverse offset vectors to derive per direction.
    pub max_transverse: usize,
    /// Bisection steps when tracing a boundary curve.
    pub bisection_iters: u32,
}

impl Default for FalsifierBudget {
    fn default() -> Self {
        FalsifierBudget {
            min_scale_exp: 2,
            max_scale_exp: 32,
            rho_grid: vec![1.0, 10.0],
            curve_alphas: vec![0.0, 0.5],
            max_transverse: 4,
            bisection_iters: 50,
        }
    }
}

/// What a retraction witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The retracted points leave the set.
    SetExit,
    /// The retracted points increase the function value.
    FunctionIncrease,
}

/// A concrete counterexample to retractivity: feasible escape points whose
/// retraction by `rho · direction` persistently exits the set (or increases
/// the function). The recorded tail is the last five numerically meaningful
/// probe scales; `points[i] / scales[i] → direction` by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionWitness {
    /// Unit direction being refuted.
    pub direction: Vec<f64>,
    /// Retraction length.
    pub rho: f64,
    pub kind: ViolationKind,
    /// What the retracted points violate.
    pub target: String,
    /// Probe scales `t` of the recorded tail.
    pub scales: Vec<f64>,
    /// Escape points `x(t)` (feasible within numerical noise).
    pub points: Vec<Vec<f64>>,
    /// The retracted points `x(t) − ρ·d`.
    pub retracted: Vec<Vec<f64>>,
    /// Observed violation magnitudes (set excess or value increase).
    pub gaps: Vec<f64>,
}

/// Directions certified retractive for `X`, as a cone description.
///
/// - Polyhedra (and the whole space): exactly the recession cone.
/// - Sublevel set of a convex function with exactly-known `𝒦(g)`: the
///   lineality directions `{d : ±d ∈ 𝒦(g)}`, an inner bound.
/// - Intersections: the intersection of the pieces' cones (a direction
///   retractive for every piece is retractive for the intersection, taking
///   the largest of the finitely many per-piece thresholds); exact when all
///   pieces are polyhedral.
/// - Anything else contributes no certified directions: a trivial outer
///   description whose membership answers are always `Unresolved`, leaving
///   refutation to the falsifier.
#[must_use]
pub fn retractive_cone(set: &SetSpec) -> ConeDescriptor {
    let dimension = set.dimension();
    match set {
        SetSpec::FullSpace { .. } => {
            ConeDescriptor::full_space(dimension, "retractive directions of the whole space")
        }
        SetSpec::Polyhedral { polyhedron } => ConeDescriptor::polyhedral(
            dimension,
            "retractive directions of the polyhedral constraint (its recession cone)",
            polyhedron.recession_normals(),
            DescriptorBound::Exact,
            Tier::Proven,
        ),
        SetSpec::Sublevel {
            function,
            asserted_convex,
            ..
        } => {
            let convexity = function.convexity(*asserted_convex);
            let kappa = kappa_cone(function, *asserted_convex);
            if convexity.is_convex_usable() && kappa.is_exact() {
                let mut lin = kappa.lineality_restriction(format!(
                    "retractive directions of the sublevel set of {function} \
                     (lineality of its asymptotic cone)"
                ));
                lin.bound = DescriptorBound::Inner;
                if convexity != ConvexityStatus::ProvenConvex {
                    lin.tier = lin.tier.max(Tier::Asserted);
                }
                lin
            } else {
                no_certified_directions(dimension, function)
            }
        }
        SetSpec::Intersection { parts } => {
            let cones: Vec<ConeDescriptor> = parts.iter().map(retractive_cone).collect();
            if cones.iter().any(|c| c.bound == DescriptorBound::Outer) {
                let mut trivial = ConeDescriptor::polyhedral(
                    dimension,
                    "retractive directions of the constraint intersection (nothing certified)",
                    Vec::new(),
                    DescriptorBound::Outer,
                    Tier::Sampled,
                );
                trivial.tier = cones.iter().map(|c| c.tier).fold(Tier::Proven, Tier::max);
                return trivial;
            }
            let refs: Vec<&ConeDescriptor> = cones.iter().collect();
            ConeDescriptor::intersection_inner(
                dimension,
                "retractive directions of the constraint intersection",
                &refs,
                true,
            )
        }
    }
}

fn no_certified_directions(dimension: usize, function: &FunctionSpec) -> ConeDescriptor {
    ConeDescriptor::polyhedral(
        dimension,
        format!("retractive directions of the sublevel set of {function} (nothing certified)"),
        Vec::new(),
        DescriptorBound::Outer,
        Tier::Sampled,
    )
}

/// The two-sided constancy cone `𝒞(g) = {d : g_∞(d) = g_∞(−d) = 0}`.
///
/// - Affine `g`: `{d : ⟨b, d⟩ = 0}`, exactly.
/// - Convex quadratic: `{d : Qd = 0, ⟨b, d⟩ = 0}`, exactly.
/// - Quadratic with a negative eigenvalue: the ray values are `+∞` where
///   `dᵀQd > 0` and `−∞` elsewhere off the origin, so `𝒞 = {0}`, exactly.
/// - Convex polynomial of higher degree: `{d : every homogeneous part of
///   order ≥ 1 vanishes at d}` via [`MembershipOracle::AllPartsVanish`]
///   (at asserted tier when convexity is only asserted).
/// - Builtins: closed-form rows from their asymptotic metadata, exactly.
/// - Anything else: a trivial outer description (always `Unresolved`).
#[must_use]
pub fn constancy_cone(f: &FunctionSpec, asserted_convex: bool) -> ConeDescriptor {
    let dimension = f.dimension();
    let label = format!("two-sided constancy cone of {f}");
    match f {
        FunctionSpec::Poly(p) => {
            let degree = p.degree();
            if degree <= 1 {
                let b = p.linear_coeffs();
                let mut rows = Vec::new();
                if b.iter().any(|v| *v != 0.0) {
                    rows.push(b.iter().map(|v| -v).collect());
                    rows.push(b);
                }
                return ConeDescriptor::polyhedral(
                    dimension,
                    label,
                    rows,
                    DescriptorBound::Exact,
                    Tier::Proven,
                );
            }
            let convexity = certify_convexity(p, asserted_convex);
            if degree == 2 {
                if convexity == ConvexityStatus::ProvenConvex {
                    let mut rows = Vec::new();
                    for row in p.quadratic_matrix() {
                        if row.iter().any(|v| *v != 0.0) {
                            rows.push(row.iter().map(|v| -v).collect());
                            rows.push(row);
                        }
                    }
                    let b = p.linear_coeffs();
                    if b.iter().any(|v| *v != 0.0) {
                        rows.push(b.iter().map(|v| -v).collect());
                        rows.push(b);
                    }
                    return ConeDescriptor::polyhedral(
                        dimension,
                        label,
                        rows,
                        DescriptorBound::Exact,
                        Tier::Proven,
                    );
                }
                return ConeDescriptor::polyhedral(
                    dimension,
                    label,
                    pin_to_origin(dimension),
                    DescriptorBound::Exact,
                    Tier::Proven,
                );
            }
            if convexity.is_convex_usable() {
                let tier = if convexity == ConvexityStatus::ProvenConvex {
                    Tier::Proven
                } else {
                    Tier::Asserted
                };
                return ConeDescriptor {
                    dimension,
                    label,
                    rows: Vec::new(),
                    oracles: vec![MembershipOracle::AllPartsVanish { poly: p.clone() }],
                    bound: DescriptorBound::Exact,
                    tier,
                };
            }
            ConeDescriptor::polyhedral(
                dimension,
                label,
                Vec::new(),
                DescriptorBound::Outer,
                Tier::Sampled,
            )
        }
        FunctionSpec::BlackBox { .. } => match f.builtin_constancy_normals() {
            Some(rows) => ConeDescriptor::polyhedral(
                dimension,
                label,
                rows.into_iter()
                    .filter(|r| r.iter().any(|v| *v != 0.0))
                    .collect(),
                DescriptorBound::Exact,
                Tier::Proven,
            ),
            None => ConeDescriptor::polyhedral(
                dimension,
                label,
                Vec::new(),
                DescriptorBound::Outer,
                Tier::Sampled,
            ),
        },
    }
}

/// Rows pinning a cone to `{0}`.
fn pin_to_origin(dimension: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(2 * dimension);
    for i in 0..dimension {
        let mut e = vec![0.0; dimension];
        e[i] = 1.0;
        rows.push(e.clone());
        e[i] = -1.0;
        rows.push(e);
    }
    rows
}

/// Search for a sequence refuting set-retractivity of `direction` for `set`:
/// feasible points escaping along the direction whose retraction
/// persistently leaves the set. `None` means the budgeted search found no
/// such sequence (evidence of retractivity, not a proof).
#[must_use]
pub fn falsify_set_retraction(
    set: &SetSpec,
    direction: &[f64],
    budget: &FalsifierBudget,
) -> Option<RetractionWitness> {
    let (d, rho_grid) = prepare_direction(direction, budget)?;
    let judge = |x: &[f64], y: &[f64]| -> (IndexClass, f64, String) {
        classify_exit(&piece_gaps(set, x), &piece_gaps(set, y))
    };
    for curve in curve_family(&d, budget) {
        for &rho in &rho_grid {
            if let Some(tail) = sweep(&curve, &d, rho, Some(set), budget, &judge) {
                return Some(tail.into_witness(d.clone(), rho, ViolationKind::SetExit));
            }
        }
    }
    None
}

/// Search for a sequence refuting function-retractivity of `direction` for
/// `f`: points escaping along the direction (feasible for `within`, when
/// given) where the retraction persistently *increases* `f`. Comparisons use
/// the function's sign-faithful value gap, so slow increases are detected
/// long after naive differences round away.
#[must_use]
pub fn falsify_function_retraction(
    f: &FunctionSpec,
    within: Option<&SetSpec>,
    direction: &[f64],
    budget: &FalsifierBudget,
) -> Option<RetractionWitness> {
    let (d, rho_grid) = prepare_direction(direction, budget)?;
    let target = format!("{f}");
    let judge = |x: &[f64], y: &[f64]| -> (IndexClass, f64, String) {
        if !f.finite_at(x) {
            return (IndexClass::Indeterminate, 0.0, target.clone());
        }
        let gap = f.value_gap(y, x);
        (classify_gap(&gap), gap.gap, target.clone())
    };
    for curve in curve_family(&d, budget) {
        for &rho in &rho_grid {
            if let Some(tail) = sweep(&curve, &d, rho, within, budget, &judge) {
                return Some(tail.into_witness(d.clone(), rho, ViolationKind::FunctionIncrease));
            }
        }
    }
    None
}

/// Unit direction plus the retraction grid `{1, ‖direction‖, 10}` (deduped,
/// order preserved). `None` for a zero direction.
fn prepare_direction(direction: &[f64], budget: &FalsifierBudget) -> Option<(Vec<f64>, Vec<f64>)> {
    let norm = l2_norm(direction);
    if !norm.is_finite() || norm < 1e-12 {
        return None;
    }
    let d: Vec<f64> = direction.iter().map(|v| v / norm).collect();
    let mut rho_grid = budget.rho_grid.clone();
    rho_grid.insert(rho_grid.len().min(1), norm);
    rho_grid.retain(|r| r.is_finite() && *r > 0.0);
    let mut seen: Vec<f64> = Vec::new();
    rho_grid.retain(|r| {
        if seen.iter().any(|s| (s - r).abs() <= 1e-12 * s.max(*r)) {
            false
        } else {
            seen.push(*r);
            true
        }
    });
    Some((d, rho_grid))
}

/// Escape-curve shapes. All satisfy `x(t)/t → d` as `t → ∞`.
enum Curve {
    /// `x(t) = t·d`.
    Ray,
    /// `x(t) = t·d + t^α·w`.
    Offset { w: Vec<f64>, alpha: f64 },
    /// `x(t) = t·d + s·t^α·w` with `s ∈ [0, 1]` pushed to the set boundary
    /// by bisection (largest offset that is not reliably outside).
    Boundary { w: Vec<f64>, alpha: f64 },
}

/// Deterministic curve family for a unit direction: the ray first, then
/// signed transverse offsets for each growth exponent, then boundary traces.
fn curve_family(d: &[f64], budget: &FalsifierBudget) -> Vec<Curve> {
    let basis = transverse_basis(d, budget.max_transverse);
    let mut curves = vec![Curve::Ray];
    for kind in 0..2 {
        for w in &basis {
            for sign in [1.0, -1.0] {
                let sw: Vec<f64> = w.iter().map(|v| sign * v).collect();
                for &alpha in &budget.curve_alphas {
                    curves.push(if kind == 0 {
                        Curve::Offset {
                            w: sw.clone(),
                            alpha,
                        }
                    } else {
                        Curve::Boundary {
                            w: sw.clone(),
                            alpha,
                        }
                    });
                }
            }
        }
    }
    curves
}

/// Orthonormal vectors spanning (a prefix of) the complement of `d`,
/// derived from the coordinate axes in order.
fn transverse_basis(d: &[f64], cap: usize) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        if basis.len() >= cap {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let proj = dot(&v, d);
        for (vj, dj) in v.iter_mut().zip(d) {
            *vj -= proj * dj;
        }
        for b in &basis {
            let p = dot(&v, b);
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj -= p * bj;
            }
        }
        let norm = l2_norm(&v);
        if norm > 1e-8 {
            for vj in &mut v {
                *vj /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

impl Curve {
    /// The probe point at scale `t`, or `None` when the curve is not
    /// available there (boundary traces need a feasible base point).
    fn point(&self, t: f64, d: &[f64], set: Option<&SetSpec>, budget: &FalsifierBudget) -> Option<Vec<f64>> {
        let base: Vec<f64> = d.iter().map(|v| t * v).collect();
        match self {
            Curve::Ray => Some(base),
            Curve::Offset { w, alpha } => Some(offset_point(&base, w, t.powf(*alpha), 1.0)),
            Curve::Boundary { w, alpha } => {
                let set = set?;
                let scale = t.powf(*alpha);
                if reliably_outside(set, &base) {
                    return None;
                }
                let full = offset_point(&base, w, scale, 1.0);
                if !reliably_outside(set, &full) {
                    return Some(full);
                }
                let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                for _ in 0..budget.bisection_iters {
                    let mid = 0.5 * (lo + hi);
                    if reliably_outside(set, &offset_point(&base, w, scale, mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(offset_point(&base, w, scale, lo))
            }
        }
    }
}

fn offset_point(base: &[f64], w: &[f64], scale: f64, s: f64) -> Vec<f64> {
    base.iter()
        .zip(w)
        .map(|(b, wi)| b + s * scale * wi)
        .collect()
}

/// Per-probe classification against rounding noise. `Ok` means reliably
/// inside / non-increasing; boundary-level flickers are `Indeterminate` and
/// never count toward (or against) persistence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IndexClass {
    Violation,
    Ok,
    Indeterminate,
}

fn classify_gap(gap: &GapEstimate) -> IndexClass {
    if gap.is_positive() {
        IndexClass::Violation
    } else if gap.gap < -gap.noise {
        IndexClass::Ok
    } else {
        IndexClass::Indeterminate
    }
}

/// Signed constraint excesses of every piece of `set` at `y`, each with its
/// own noise scale and a label naming the piece.
fn piece_gaps(set: &SetSpec, y: &[f64]) -> Vec<(String, GapEstimate)> {
    fn collect(set: &SetSpec, y: &[f64], out: &mut Vec<(String, GapEstimate)>) {
        match set {
            SetSpec::FullSpace { .. } => {}
            SetSpec::Polyhedral { polyhedron } => {
                let mut worst = f64::NEG_INFINITY;
                let mut max_offset = 0.0_f64;
                for h in polyhedron.rows() {
                    worst = worst.max(dot(&h.normal, y) - h.offset);
                    max_offset = max_offset.max(h.offset.abs());
                }
                if worst.is_finite() {
                    out.push((
                        "polyhedral rows".to_string(),
                        GapEstimate {
                            gap: worst,
                            noise: NOISE_FACTOR * (1.0 + l2_norm(y) + max_offset),
                        },
                    ));
                }
            }
            SetSpec::Sublevel {
                function, level, ..
            } => {
                out.push((
                    format!("{function} ≤ {level}"),
                    function.level_excess(y, *level),
                ));
            }
            SetSpec::Intersection { parts } => {
                for p in parts {
                    collect(p, y, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    collect(set, y, &mut out);
    out
}

/// A point is reliably outside when some piece's excess clears its noise.
fn reliably_outside(set: &SetSpec, x: &[f64]) -> bool {
    piece_gaps(set, x)
        .iter()
        .any(|(_, g)| g.is_positive())
}

/// Decide whether the retraction exited the set, comparing each piece's
/// excess *after* retraction against the excess *before* it.
///
/// An exit must be a reliable increase past the base state: the retracted
/// excess has to clear the clamped base excess by more than the joint noise
/// of both evaluations. (Classifying the retracted point on its own would be
/// unsound: a boundary-traced base point carries an excess at its own noise
/// level, and the retracted point — typically of smaller norm, hence smaller
/// noise allowance — would re-read that same residual as a violation.)
fn classify_exit(
    base: &[(String, GapEstimate)],
    retracted: &[(String, GapEstimate)],
) -> (IndexClass, f64, String) {
    debug_assert_eq!(base.len(), retracted.len(), "pieces enumerate identically");
    let mut worst: Option<(&str, f64)> = None;
    let mut all_inside = true;
    for ((label, gx), (_, gy)) in base.iter().zip(retracted) {
        let exited = gy.gap - gx.gap.max(0.0) > gx.noise + gy.noise;
        if exited {
            if worst.is_none_or(|(_, g)| gy.gap > g) {
                worst = Some((label, gy.gap));
            }
        } else if !(gy.gap < -gy.noise) {
            all_inside = false;
        }
    }
    if let Some((label, gap)) = worst {
        return (IndexClass::Violation, gap, label.to_string());
    }
    if all_inside {
        let max_gap = retracted
            .iter()
            .map(|(_, g)| g.gap)
            .fold(f64::NEG_INFINITY, f64::max);
        return (IndexClass::Ok, max_gap, String::new());
    }
    (IndexClass::Indeterminate, 0.0, String::new())
}

/// The recorded tail of a successful sweep.
struct SweepTail {
    target: String,
    scales: Vec<f64>,
    points: Vec<Vec<f64>>,
    retracted: Vec<Vec<f64>>,
    gaps: Vec<f64>,
}

impl SweepTail {
    fn into_witness(self, direction: Vec<f64>, rho: f64, kind: ViolationKind) -> RetractionWitness {
        RetractionWitness {
            direction,
            rho,
            kind,
            target: self.target,
            scales: self.scales,
            points: self.points,
            retracted: self.retracted,
            gaps: self.gaps,
        }
    }
}

/// Number of trailing meaningful probes that must all violate.
const PERSISTENCE_WINDOW: usize = 5;

/// Probe one curve at every scale and decide persistence: collect the
/// numerically meaningful probes (feasible base within noise, determinate
/// class) and succeed only when the last [`PERSISTENCE_WINDOW`] of them all
/// violate.
fn sweep(
    curve: &Curve,
    d: &[f64],
    rho: f64,
    feasibility: Option<&SetSpec>,
    budget: &FalsifierBudget,
    judge: &impl Fn(&[f64], &[f64]) -> (IndexClass, f64, String),
) -> Option<SweepTail> {
    struct Probe {
        scale: f64,
        point: Vec<f64>,
        retracted: Vec<f64>,
        class: IndexClass,
        gap: f64,
        label: String,
    }
    let mut meaningful: Vec<Probe> = Vec::new();
    for k in budget.min_scale_exp..=budget.max_scale_exp {
        let t = f64::from(k).exp2();
        let Some(x) = curve.point(t, d, feasibility, budget) else {
            continue;
        };
        if !x.iter().all(|v| v.is_finite()) {
            continue;
        }
        if let Some(set) = feasibility {
            if reliably_outside(set, &x) {
                continue;
            }
        }
        let y: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi - rho * di).collect();
        let (class, gap, label) = judge(&x, &y);
        if class != IndexClass::Indeterminate {
            meaningful.push(Probe {
                scale: t,
                point: x,
                retracted: y,
                class,
                gap,
                label,
            });
        }
    }
    if meaningful.len() < PERSISTENCE_WINDOW {
        return None;
    }
    let tail = &meaningful[meaningful.len() - PERSISTENCE_WINDOW..];
    if !tail.iter().all(|p| p.class == IndexClass::Violation) {
        return None;
    }
    Some(SweepTail {
        target: tail.last().expect("window is nonempty").label.clone(),
        scales: tail.iter().map(|p| p.scale).collect(),
        points: tail.iter().map(|p| p.point.clone()).collect(),
        retracted: tail.iter().map(|p| p.retracted.clone()).collect(),
        gaps: tail.iter().map(|p| p.gap).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::Membership;
    use crate::functions::{BlackBox, Builtin};
    use crate::polyhedra::Polyhedron;
    use proptest::prelude::*;
    use rand::Rng as _;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly_fn(dim: usize, terms: &[(f64, &[u32])]) -> FunctionSpec {
        FunctionSpec::poly_from_terms(
            dim,
            &terms
                .iter()
                .map(|(c, e)| (*c, e.to_vec()))
                .collect::<Vec<_>>(),
        )
    }

    /// X = {x₁² ≤ x₃, x₂² ≤ x₄}: intersection of two convex quadratic
    /// sublevel sets whose parabolic boundary defeats retraction along e₃.
    fn parabolic_intersection() -> SetSpec {
        SetSpec::intersection(vec![
            SetSpec::sublevel(
                poly_fn(4, &[(1.0, &[2, 0, 0, 0]), (-1.0, &[0, 0, 1, 0])]),
                0.0,
            ),
            SetSpec::sublevel(
                poly_fn(4, &[(1.0, &[0, 2, 0, 0]), (-1.0, &[0, 0, 0, 1])]),
                0.0,
            ),
        ])
    }

    #[test]
    fn polyhedral_retractive_cone_is_recession_cone() {
        let p = Polyhedron::from_box(&[Some(0.0), Some(-1.0)], &[None, Some(1.0)]).unwrap();
        let cone = retractive_cone(&SetSpec::polyhedron(p));
        assert!(cone.is_exact());
        assert_eq!(cone.tier, Tier::Proven);
        assert_eq!(cone.membership(&[1.0, 0.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[1.0, 0.5], 1e-9), Membership::Out);
        assert_eq!(cone.membership(&[-1.0, 0.0], 1e-9), Membership::Out);
    }

    #[test]
    fn convex_sublevel_retractive_cone_is_kappa_lineality() {
        // 𝒦(x₁² − x₃) = {d₁ = 0, d₃ ≥ 0}; its lineality {d₁ = 0, d₃ = 0} is
        // certified retractive (d₂, d₄ stay free), one-sided d₃ > 0 is not.
        let s = SetSpec::sublevel(
            poly_fn(4, &[(1.0, &[2, 0, 0, 0]), (-1.0, &[0, 0, 1, 0])]),
            0.0,
        );
        let cone = retractive_cone(&s);
        assert_eq!(cone.bound, DescriptorBound::Inner);
        assert_eq!(cone.membership(&[0.0, 1.0, 0.0, -2.0], 1e-9), Membership::In);
        assert_eq!(
            cone.membership(&[0.0, 0.0, 1.0, 0.0], 1e-9),
            Membership::Unresolved,
            "an inner bound must not refute"
        );
    }

    #[test]
    fn intersection_retractive_cone_stays_inner() {
        let cone = retractive_cone(&parabolic_intersection());
        assert_eq!(cone.bound, DescriptorBound::Inner);
        // Lineality of X_∞ = {0}: nothing nonzero gets certified…
        assert_eq!(
            cone.membership(&[0.0, 0.0, 1.0, 0.0], 1e-9),
            Membership::Unresolved
        );
        // …and nothing gets refuted either (that is the falsifier's job).
        assert_eq!(
            cone.membership(&[1.0, 1.0, 1.0, 1.0], 1e-9),
            Membership::Unresolved
        );
    }

    #[test]
    fn nonconvex_sublevel_certifies_nothing() {
        let s = SetSpec::sublevel(
            FunctionSpec::black_box(
                2,
                BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]),
            ),
            0.0,
        );
        let cone = retractive_cone(&s);
        assert_eq!(cone.bound, DescriptorBound::Outer);
        assert_eq!(cone.membership(&[1.0, 0.0], 1e-9), Membership::Unresolved);
    }

    #[test]
    fn constancy_cone_of_convex_quadratic_is_gradient_kernel() {
        // g = (x₁ − x₂)² + x₃: 𝒞 = {Qd = 0, ⟨b,d⟩ = 0} = {d₁ = d₂, d₃ = 0}.
        let g = poly_fn(
            3,
            &[
                (1.0, &[2, 0, 0]),
                (-2.0, &[1, 1, 0]),
                (1.0, &[0, 2, 0]),
                (1.0, &[0, 0, 1]),
            ],
        );
        let cone = constancy_cone(&g, false);
        assert!(cone.is_exact());
        assert_eq!(cone.tier, Tier::Proven);
        assert_eq!(cone.membership(&[1.0, 1.0, 0.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[-2.0, -2.0, 0.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[1.0, -1.0, 0.0], 1e-9), Membership::Out);
        assert_eq!(cone.membership(&[1.0, 1.0, 0.5], 1e-9), Membership::Out);
    }

    #[test]
    fn constancy_cone_of_indefinite_quadratic_is_origin() {
        // g = x₁x₂: ray values are ±∞ off the axes and the perturbed liminf
        // is −∞ on them, so no nonzero two-sided constancy direction exists.
        let g = poly_fn(2, &[(1.0, &[1, 1])]);
        let cone = constancy_cone(&g, false);
        assert!(cone.is_exact());
        assert_eq!(cone.zero_status(), Some((true, None)));
        assert_eq!(cone.membership(&[1.0, 0.0], 1e-9), Membership::Out);
    }

    #[test]
    fn constancy_cone_of_convex_quartic_uses_vanishing_parts() {
        // g = x₁⁴ + x₂² over ℝ³ (asserted convex): 𝒞 = {d₁ = d₂ = 0}.
        let g = poly_fn(3, &[(1.0, &[4, 0, 0]), (1.0, &[0, 2, 0])]);
        let cone = constancy_cone(&g, true);
        assert!(cone.is_exact());
        assert_eq!(cone.tier, Tier::Asserted, "degree-4 convexity is asserted");
        assert_eq!(cone.membership(&[0.0, 0.0, 3.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[0.0, 0.0, -3.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[0.1, 0.0, 1.0], 1e-9), Membership::Out);
    }

    #[test]
    fn constancy_cone_of_builtins_uses_metadata() {
        // −√x₁: asymptotic value is the indicator of d₁ ≥ 0, zero both ways
        // only at d₁ = 0.
        let f = FunctionSpec::black_box(2, BlackBox::new(Builtin::NegSqrt { coord: 0 }));
        let cone = constancy_cone(&f, false);
        assert!(cone.is_exact());
        assert_eq!(cone.membership(&[0.0, 5.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[1.0, 0.0], 1e-9), Membership::Out);

        // e^{x₁}: constancy needs ⟨c, d⟩ = 0 both ways.
        let f = FunctionSpec::black_box(
            2,
            BlackBox::new(Builtin::ExpLinear {
                coeffs: vec![1.0, 0.0],
            }),
        );
        let cone = constancy_cone(&f, false);
        assert_eq!(cone.membership(&[0.0, 1.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[-1.0, 0.0], 1e-9), Membership::Out);
    }

    #[test]
    fn ray_witnesses_against_function_retraction() {
        let budget = FalsifierBudget::default();

        // −√x along d = +1: walking back from x = t to t − ρ increases the
        // value by ρ/(√t + √(t−ρ)) — small but persistently positive.
        let f = FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 }));
        let x = SetSpec::polyhedron(Polyhedron::from_box(&[Some(0.0)], &[None]).unwrap());
        let w = falsify_function_retraction(&f, Some(&x), &[1.0], &budget)
            .expect("the square-root tail keeps rising toward +∞ behind it");
        assert_eq!(w.kind, ViolationKind::FunctionIncrease);
        assert!(w.gaps.iter().all(|g| *g > 0.0));
        assert!(w.scales.len() == 5 && w.points.len() == 5);

        // e^{x} along d = −1: the increase survives far past the underflow
        // of the values themselves thanks to the exponent comparison.
        let f = FunctionSpec::black_box(
            1,
            BlackBox::new(Builtin::ExpLinear { coeffs: vec![1.0] }),
        );
        let w = falsify_function_retraction(&f, None, &[-1.0], &budget)
            .expect("e^x is strictly increasing, so every retraction increases it");
        assert_eq!(w.kind, ViolationKind::FunctionIncrease);
        let last = w.scales.last().unwrap();
        assert!(*last >= 2f64.powi(28), "witness persists to the largest scales");

        // The quadratic piece x₁² − x₃ increases when x₃ is walked back.
        let g1 = poly_fn(4, &[(1.0, &[2, 0, 0, 0]), (-1.0, &[0, 0, 1, 0])]);
        let w = falsify_function_retraction(&g1, None, &[0.0, 0.0, 1.0, 0.0], &budget)
            .expect("g₁(t·e₃ − ρ·e₃) = −(t − ρ) > −t");
        assert_eq!(w.kind, ViolationKind::FunctionIncrease);
        for (p, t) in w.points.iter().zip(&w.scales) {
            assert!((p[2] - t).abs() <= 1e-9 * t, "ray points are t·e₃: {p:?}");
        }
    }

    #[test]
    fn parabolic_boundary_yields_set_exit_witness() {
        // Along e₃ the boundary points (√t, 0, t, 0) are feasible, but
        // retracting x₃ by ρ breaks x₁² ≤ x₃ by exactly ρ.
        let set = parabolic_intersection();
        let w = falsify_set_retraction(&set, &[0.0, 0.0, 1.0, 0.0], &FalsifierBudget::default())
            .expect("the parabolic boundary escapes retraction");
        assert_eq!(w.kind, ViolationKind::SetExit);
        assert!(w.target.contains('≤'), "names the violated piece: {}", w.target);
        for ((p, y), t) in w.points.iter().zip(&w.retracted).zip(&w.scales) {
            assert!(
                (p[0] * p[0] - p[2]).abs() <= 1e-6 * t,
                "witness points sit on the parabola: {p:?}"
            );
            assert!((p[2] - t).abs() <= 1e-9 * t);
            assert!(set.contains(p, 1e-9), "escape points are feasible");
            assert!(
                set.violation(y) > 0.0,
                "retracted points are genuinely outside: {y:?}"
            );
        }
        // The direction normalizes and the points align with it.
        let t_last = w.scales.last().unwrap();
        let p_last = w.points.last().unwrap();
        let misalign: f64 = p_last
            .iter()
            .zip(&w.direction)
            .map(|(pi, di)| (pi / t_last - di).abs())
            .fold(0.0, f64::max);
        assert!(misalign < 0.1, "x(t)/t approaches the direction");
    }

    #[test]
    fn epigraph_witnesses_match_known_escape_shapes() {
        let budget = FalsifierBudget::default();

        // epi(s²) = {(s, r) : s² ≤ r} along (0, 1): points (√t, t).
        let epi_sq = SetSpec::sublevel(poly_fn(2, &[(1.0, &[2, 0]), (-1.0, &[0, 1])]), 0.0);
        let w = falsify_set_retraction(&epi_sq, &[0.0, 1.0], &budget)
            .expect("lowering the epigraph of s² exits at the boundary");
        for (p, t) in w.points.iter().zip(&w.scales) {
            assert!((p[0].abs() - t.sqrt()).abs() <= 1e-6 * t.sqrt(), "{p:?}");
            assert!((p[1] - t).abs() <= 1e-9 * t);
        }

        // epi(−√x) along (1, 0): points (t, −√t).
        let epi_neg_sqrt = SetSpec::sublevel(
            FunctionSpec::black_box(
                2,
                BlackBox::new(Builtin::NegSqrt { coord: 0 }).with_linear(vec![0.0, -1.0]),
            ),
            0.0,
        );
        let w = falsify_set_retraction(&epi_neg_sqrt, &[1.0, 0.0], &budget)
            .expect("the deepening square-root valley exits under retraction");
        for (p, t) in w.points.iter().zip(&w.scales) {
            assert!((p[0] - t).abs() <= 1e-9 * t, "{p:?}");
            assert!((p[1] + t.sqrt()).abs() <= 1e-6 * t.sqrt(), "{p:?}");
        }

        // {(x, y) : x² ≤ |y|} along (0, ±1): both vertical escapes fail.
        let abs_set = SetSpec::sublevel(
            FunctionSpec::parse_expr(2, "x1^2 - abs(x2)").unwrap(),
            0.0,
        );
        for dir in [[0.0, 1.0], [0.0, -1.0]] {
            let w = falsify_set_retraction(&abs_set, &dir, &budget)
                .unwrap_or_else(|| panic!("witness for direction {dir:?}"));
            let p = w.points.last().unwrap();
            let t = *w.scales.last().unwrap();
            assert!(
                (p[0].abs() - t.sqrt()).abs() <= 1e-6 * t.sqrt(),
                "escape hugs x = ±√t: {p:?}"
            );
        }
    }

    #[test]
    fn retractive_sets_produce_no_witness() {
        let budget = FalsifierBudget::default();

        // A polyhedron is retractive along every recession direction.
        let p = Polyhedron::new(
            3,
            &[
                (vec![1.0, 1.0, 0.0], 2.0),
                (vec![-1.0, 0.5, 0.0], 1.0),
                (vec![0.0, -1.0, 0.0], 0.0),
                (vec![0.0, 0.0, -1.0], 3.0),
            ],
        )
        .unwrap();
        let set = SetSpec::polyhedron(p.clone());
        let cone = crate::polyhedra::extreme_rays(3, &p.recession_normals());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in cone.sample_directions(&mut rng, 12) {
            assert_eq!(
                falsify_set_retraction(&set, &d, &budget),
                None,
                "false witness along {d:?}"
            );
        }

        // A halfspace sublevel of a convex function, along its lineality.
        let slab = SetSpec::sublevel(poly_fn(2, &[(1.0, &[2, 0]), (1.0, &[1, 0])]), 4.0);
        assert_eq!(falsify_set_retraction(&slab, &[0.0, 1.0], &budget), None);
        assert_eq!(falsify_set_retraction(&slab, &[0.0, -1.0], &budget), None);

        // A linear function is constant along directions orthogonal to its
        // gradient: no increase to find there. Along a strict descent
        // direction, though, walking back *does* increase it — retraction
        // soundness requires flagging exactly that.
        let lin = poly_fn(2, &[(1.0, &[1, 0]), (2.0, &[0, 1])]);
        assert_eq!(
            falsify_function_retraction(&lin, None, &[2.0, -1.0], &budget),
            None
        );
        let w = falsify_function_retraction(&lin, None, &[-1.0, -2.0], &budget)
            .expect("stepping back along descent increases a linear function");
        assert!(w.gaps.iter().all(|g| (g - 5f64.sqrt()).abs() < 1e-6));
    }

    proptest! {
        /// Boxes are retractive along every recession direction: random
        /// partially-unbounded boxes with a feasible origin never yield a
        /// set-exit witness along conic combinations of their free axes.
        #[test]
        fn prop_falsifier_quiet_on_boxes(
            seed in 0u64..500,
            n in 1usize..4,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            let mut free_axes: Vec<(usize, f64)> = Vec::new();
            for i in 0..n {
                match rng.gen_range(0..3) {
                    0 => {
                        lower.push(Some(-rng.gen_range(0.0..3.0)));
                        upper.push(None);
                        free_axes.push((i, 1.0));
                    }
                    1 => {
                        lower.push(None);
                        upper.push(Some(rng.gen_range(0.0..3.0)));
                        free_axes.push((i, -1.0));
                    }
                    _ => {
                        lower.push(Some(-rng.gen_range(0.0..2.0)));
                        upper.push(Some(rng.gen_range(0.0..2.0)));
                    }
                }
            }
            prop_assume!(!free_axes.is_empty());
            let set = SetSpec::polyhedron(Polyhedron::from_box(&lower, &upper).unwrap());
            let mut d = vec![0.0; n];
            for (i, sign) in &free_axes {
                d[*i] = sign * rng.gen_range(0.1..1.0);
            }
            let budget = FalsifierBudget { max_scale_exp: 20, ..FalsifierBudget::default() };
            prop_assert_eq!(falsify_set_retraction(&set, &d, &budget), None);
        }
    }
}
