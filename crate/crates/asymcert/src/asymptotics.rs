//! Asymptotic functions and cone descriptors.
//!
//! The asymptotic function of `f` at a direction `d` is
//!
//! ```text
//! f_∞(d) = liminf_{d' → d, t → ∞} f(t·d') / t ,
//! ```
//!
//! the sharpest positively-homogeneous lower model of `f` at infinity. Its
//! zero cone `𝒦(f) = {d : f_∞(d) ≤ 0}` collects the directions along which
//! `f` does not blow up, and contains the asymptotic cone of every nonempty
//! sublevel set — with equality when `f` is proper, closed, and convex.
//!
//! Three evaluation routes, by decreasing strength:
//!
//! - [`poly_asymptotic`]: the closed form from the homogeneous decomposition
//!   `h = Σ φ_i`. Along `d` the value `h(t·d)/t` is a polynomial in `t` with
//!   leading term `φ_μ(d)·t^{μ−1}`, so the limit is `φ₁(d)` when `μ(d) = 1`,
//!   `±∞` by the sign of `φ_μ(d)` when `μ(d) ≥ 2`, and `0` when every part
//!   vanishes. **For convex `h` this equals `h_∞(d)` exactly.** For nonconvex
//!   `h` the ray limit can overestimate the joint liminf at directions where
//!   the leading parts vanish, so nonconvex answers are never proven-tier.
//! - Builtins carry `f_∞` in closed form (see `FunctionSpec::exact_asymptotic`).
//! - [`estimate_asymptotic`]: a seeded sampling estimator of the liminf along
//!   a geometric scale schedule with shrinking direction perturbations.
//!   Sampled-tier evidence only.
//!
//! A [`ConeDescriptor`] packages what is *known* about a cone: halfspace rows,
//! optional exact nonlinear membership oracles (second-order cones, the exact
//! zero cone of an indefinite quadratic), a containment direction
//! ([`DescriptorBound`]), an evidence [`Tier`], and conversion to generator
//! form when the description is exactly polyhedral. One-sided descriptions
//! stay useful throughout: a violated row of an **outer** bound refutes
//! membership at full strength, while a satisfied **inner** bound certifies
//! it — the two directions matter for different cones (asymptotic cones are
//! approximated from outside, retractive cones from inside).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{certify_convexity, leading_order, ConvexityStatus, Polynomial};
use crate::functions::FunctionSpec;
use crate::polyhedra::{cone_rows_contain, dot, extreme_rays, l2_norm, GeneratorCone};
use crate::Tier;

/// A value in `ℝ ∪ {−∞, +∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedReal {
    MinusInfinity,
    Finite(f64),
    PlusInfinity,
}

impl ExtendedReal {
    #[must_use]
    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Add a finite shift (infinities absorb it).
    #[must_use]
    pub fn add_finite(self, shift: f64) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v + shift),
            other => other,
        }
    }

    /// `value ≤ 0` within an absolute tolerance on the finite case.
    #[must_use]
    pub fn le_zero(self, tol: f64) -> bool {
        match self {
            ExtendedReal::MinusInfinity => true,
            ExtendedReal::Finite(v) => v <= tol,
            ExtendedReal::PlusInfinity => false,
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::MinusInfinity => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// Closed-form directional asymptotic value of a polynomial (see module docs
/// for exactness: equals `h_∞(d)` when `h` is convex).
#[must_use]
pub fn poly_asymptotic(h: &Polynomial, d: &[f64]) -> ExtendedReal {
    let lo = leading_order(h, d);
    match lo.order {
        None => ExtendedReal::Finite(0.0),
        Some(1) => ExtendedReal::Finite(lo.value),
        Some(_) => {
            if lo.value < 0.0 {
                ExtendedReal::MinusInfinity
            } else {
                ExtendedReal::PlusInfinity
            }
        }
    }
}

/// Scale-and-perturbation schedule for [`estimate_asymptotic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSchedule {
    /// First scale `t₀`.
    pub t0: f64,
    /// Geometric growth factor between steps.
    pub growth: f64,
    /// Number of scale steps.
    pub steps: u32,
    /// Random perturbed directions per step (radius shrinks like `1/t`).
    pub perturbations: u32,
}

impl Default for SamplingSchedule {
    fn default() -> Self {
        SamplingSchedule {
            t0: 4.0,
            growth: 2.0,
            steps: 40,
            perturbations: 8,
        }
    }
}

/// Values beyond `±DIVERGENCE_CUTOFF` with a monotone tail classify as `±∞`.
pub const DIVERGENCE_CUTOFF: f64 = 1e8;

/// Sampled estimate of `f_∞(d)`: per-step minima of `f(t·d')/t` over the
/// direction `d` and perturbations `d' = d + u/t`, classified over the tail.
/// The direction is unit-normalized first; `d = 0` returns `0`.
///
/// This is refutable numerical evidence (sampled tier), never exact: the
/// shrinking-radius schedule can miss distant descent valleys of nonconvex
/// functions, and finite scales can misread very slow growth.
#[must_use]
pub fn estimate_asymptotic(
    f: &FunctionSpec,
    d: &[f64],
    schedule: &SamplingSchedule,
    rng: &mut impl Rng,
) -> ExtendedReal {
    let n = f.dimension();
    let norm = l2_norm(d);
    if norm == 0.0 {
        return ExtendedReal::Finite(0.0);
    }
    let base: Vec<f64> = d.iter().map(|v| v / norm).collect();

    let mut step_mins = Vec::with_capacity(schedule.steps as usize);
    let mut t = schedule.t0;
    for _ in 0..schedule.steps {
        let scaled: Vec<f64> = base.iter().map(|v| t * v).collect();
        let mut m = f.eval(&scaled) / t;
        for _ in 0..schedule.perturbations {
            let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let un = l2_norm(&u);
            if un < 1e-12 {
                continue;
            }
            for v in &mut u {
                *v /= un;
            }
            let pert: Vec<f64> = base
                .iter()
                .zip(&u)
                .map(|(b, ui)| t * (b + ui / t))
                .collect();
            let q = f.eval(&pert) / t;
            if q < m {
                m = q;
            }
        }
        step_mins.push(m);
        t *= schedule.growth;
    }

    let steps = step_mins.len();
    let tail_len = (steps / 4).max(1).min(steps);
    let tail = &step_mins[steps - tail_len..];

    // Divergence: the last five step minima beyond the cutoff and monotone.
    if steps >= 5 {
        let last5 = &step_mins[steps - 5..];
        if last5.iter().all(|v| *v > DIVERGENCE_CUTOFF)
            && last5.windows(2).all(|w| w[1] >= w[0])
        {
            return ExtendedReal::PlusInfinity;
        }
        if last5.iter().all(|v| *v < -DIVERGENCE_CUTOFF)
            && last5.windows(2).all(|w| w[1] <= w[0])
        {
            return ExtendedReal::MinusInfinity;
        }
    }
    let finite_min = tail
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    if finite_min.is_finite() {
        ExtendedReal::Finite(finite_min)
    } else {
        // The whole tail evaluated to +∞: the direction leaves every domain
        // neighborhood.
        ExtendedReal::PlusInfinity
    }
}

/// Exact nonlinear membership tests refining a descriptor's rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipOracle {
    /// `{d : ‖d‖ ≤ ⟨w, d⟩}` — a second-order cone.
    Soc { w: Vec<f64> },
    /// `{d : dᵀQd ≤ 0}` — the exact zero cone of a quadratic whose matrix
    /// has a negative eigenvalue. Wherever the form vanishes, perturbing the
    /// direction along a negative eigenvector (or against the gradient `Qd`)
    /// makes it negative, so the liminf of `f(t·d')/t` is `−∞` there and the
    /// linear term of the quadratic never matters.
    QuadraticKappa { q: Vec<Vec<f64>> },
    /// `{d : poly_asymptotic(h, d) ≤ 0}` — exact only when `h` is convex;
    /// attached only under proven or asserted convexity.
    ConvexPolyRecipe { poly: Polynomial },
    /// `{d : every homogeneous part of h of order ≥ 1 vanishes at d}` — the
    /// directions along which a convex polynomial stays constant both ways.
    AllPartsVanish { poly: Polynomial },
    /// `{d : d and −d both belong to the wrapped cone}` — the lineality
    /// restriction of another oracle.
    Symmetrized { inner: Box<MembershipOracle> },
}

impl MembershipOracle {
    fn contains(&self, d: &[f64], tol: f64) -> bool {
        let scale = l2_norm(d).max(1.0);
        match self {
            MembershipOracle::Soc { w } => l2_norm(d) - dot(w, d) <= tol * scale,
            MembershipOracle::QuadraticKappa { q } => {
                let qd: Vec<f64> = q.iter().map(|row| dot(row, d)).collect();
                let form = dot(d, &qd);
                let q_scale: f64 = q
                    .iter()
                    .flat_map(|r| r.iter())
                    .fold(0.0_f64, |m, v| m.max(v.abs()))
                    .max(1e-300);
                form <= tol.max(1e-12) * q_scale * scale * scale
            }
            MembershipOracle::ConvexPolyRecipe { poly } => {
                poly_asymptotic(poly, d).le_zero(tol * scale)
            }
            MembershipOracle::AllPartsVanish { poly } => leading_order(poly, d).order.is_none(),
            MembershipOracle::Symmetrized { inner } => {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                inner.contains(d, tol) && inner.contains(&neg, tol)
            }
        }
    }

    /// `Some(true)`: the oracle cone is exactly `{0}`. `Some(false)`: a
    /// nonzero member exists (returned). `None`: undecided.
    #[allow(clippy::type_complexity)]
    fn zero_status(&self) -> Option<(bool, Option<Vec<f64>>)> {
        match self {
            MembershipOracle::Soc { w } => {
                if l2_norm(w) < 1.0 - 1e-12 {
                    Some((true, None))
                } else {
                    Some((false, Some(w.clone())))
                }
            }
            MembershipOracle::QuadraticKappa { q } => {
                let n = q.len();
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| q[i][j]);
                let scale = q
                    .iter()
                    .flat_map(|r| r.iter())
                    .fold(0.0_f64, |s, v| s.max(v.abs()));
                if scale == 0.0 {
                    // Zero form: the cone {dᵀQd ≤ 0} is everything.
                    let mut e = vec![0.0; n];
                    if n > 0 {
                        e[0] = 1.0;
                    }
                    return Some((n == 0, (n > 0).then_some(e)));
                }
                let eig = m.symmetric_eigen();
                let (mut min_idx, mut min_val) = (0, f64::INFINITY);
                for (i, v) in eig.eigenvalues.iter().enumerate() {
                    if *v < min_val {
                        min_val = *v;
                        min_idx = i;
                    }
                }
                if min_val > 1e-9 * scale {
                    // Positive definite: the form is positive off the origin.
                    return Some((true, None));
                }
                // A minimal eigenvector has dᵀQd = λ_min ≤ 0.
                let v: Vec<f64> = eig.eigenvectors.column(min_idx).iter().copied().collect();
                Some((false, Some(v)))
            }
            MembershipOracle::ConvexPolyRecipe { .. }
            | MembershipOracle::AllPartsVanish { .. }
            | MembershipOracle::Symmetrized { .. } => None,
        }
    }

    /// The same cone restricted to its lineality: `{d : ±d both members}`.
    fn symmetrized(&self) -> MembershipOracle {
        MembershipOracle::Symmetrized {
            inner: Box::new(self.clone()),
        }
    }
}

/// Pointwise membership answer. Which answers are conclusive depends on the
/// descriptor's [`DescriptorBound`]: outer bounds refute (`Out`), inner
/// bounds certify (`In`), exact descriptions do both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Unresolved,
}

/// How the described cone `{d : rows·d ≤ 0} ∩ (oracle cones)` relates to the
/// target cone being talked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorBound {
    /// The description *is* the target cone.
    Exact,
    /// The description contains the target cone (a superset): failing it
    /// refutes membership, passing it proves nothing.
    Outer,
    /// The description is contained in the target cone (a subset): passing
    /// it certifies membership, failing it proves nothing.
    Inner,
}

/// What is known about a cone: halfspace rows plus optional exact oracles,
/// with `bound` recording whether that description is the target cone, a
/// superset of it, or a subset of it. `tier` grades the evidence behind the
/// description itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDescriptor {
    pub dimension: usize,
    /// Human-readable description of what cone this is.
    pub label: String,
    /// Halfspace normals: the described cone satisfies `⟨a,d⟩ ≤ 0`.
    pub rows: Vec<Vec<f64>>,
    pub oracles: Vec<MembershipOracle>,
    pub bound: DescriptorBound,
    pub tier: Tier,
}

impl ConeDescriptor {
    /// A polyhedral description from halfspace rows.
    #[must_use]
    pub fn polyhedral(
        dimension: usize,
        label: impl Into<String>,
        rows: Vec<Vec<f64>>,
        bound: DescriptorBound,
        tier: Tier,
    ) -> Self {
        ConeDescriptor {
            dimension,
            label: label.into(),
            rows,
            oracles: Vec::new(),
            bound,
            tier,
        }
    }

    /// The whole space, exactly.
    #[must_use]
    pub fn full_space(dimension: usize, label: impl Into<String>) -> Self {
        Self::polyhedral(
            dimension,
            label,
            Vec::new(),
            DescriptorBound::Exact,
            Tier::Proven,
        )
    }

    /// Whether the described cone is exactly the target.
    #[must_use]
    pub fn is_exact(&self) -> bool {
        self.bound == DescriptorBound::Exact
    }

    /// Membership of `d` in the *target* cone, within tolerance. Answers are
    /// one-sided according to `bound`; `Unresolved` when the description
    /// cannot decide.
    #[must_use]
    pub fn membership(&self, d: &[f64], tol: f64) -> Membership {
        let described = cone_rows_contain(&self.rows, d, tol)
            && self.oracles.iter().all(|oracle| oracle.contains(d, tol));
        match (described, self.bound) {
            (true, DescriptorBound::Exact | DescriptorBound::Inner) => Membership::In,
            (true, DescriptorBound::Outer) => Membership::Unresolved,
            (false, DescriptorBound::Exact | DescriptorBound::Outer) => Membership::Out,
            (false, DescriptorBound::Inner) => Membership::Unresolved,
        }
    }

    /// Generator form, available when the description is exactly polyhedral.
    #[must_use]
    pub fn generator_form(&self) -> Option<GeneratorCone> {
        (self.is_exact() && self.oracles.is_empty())
            .then(|| extreme_rays(self.dimension, &self.rows))
    }

    /// Decide whether the target cone is exactly `{0}`.
    ///
    /// `Some((true, None))` proves it; `Some((false, Some(d)))` exhibits a
    /// nonzero member; `None` leaves it open. A zero answer from outer rows
    /// alone is still a proof, since the target is contained in the row cone;
    /// an inner bound can only ever exhibit members, never prove zero.
    #[allow(clippy::type_complexity)]
    #[must_use]
    pub fn zero_status(&self) -> Option<(bool, Option<Vec<f64>>)> {
        let row_cone = extreme_rays(self.dimension, &self.rows);
        if self.bound != DescriptorBound::Inner {
            if row_cone.is_zero() {
                return Some((true, None));
            }
            for oracle in &self.oracles {
                if let Some((true, _)) = oracle.zero_status() {
                    return Some((true, None));
                }
            }
        }
        // From here on only a nonzero member certifies anything, and members
        // come from descriptions that imply target membership.
        if self.bound == DescriptorBound::Outer {
            return None;
        }
        for oracle in &self.oracles {
            if let Some((false, Some(member))) = oracle.zero_status() {
                if self.membership(&member, 1e-9) == Membership::In {
                    return Some((false, Some(member)));
                }
            }
        }
        for g in row_cone.generators() {
            if self.membership(&g, 1e-9) == Membership::In {
                return Some((false, Some(g)));
            }
        }
        None
    }

    /// Intersection of descriptions of the asymptotic-cone kind, where each
    /// part is `Exact` or `Outer` for its piece.
    ///
    /// The asymptotic cone of an intersection of nonempty closed sets is
    /// contained in the intersection of their asymptotic cones, with equality
    /// when every piece is convex; `pieces_convex_closed` records whether
    /// that equality applies. The result is `Exact` only when equality holds
    /// and every part is exact, otherwise `Outer`.
    ///
    /// One special case short-circuits: a piece whose cone is exactly `{0}`
    /// pins the whole intersection to `{0}` at that piece's own tier (the
    /// target cone sits inside every exact piece, and `0` belongs to every
    /// cone), so weaker evidence about the other pieces cannot dilute it.
    #[must_use]
    pub fn intersection(
        dimension: usize,
        label: impl Into<String>,
        parts: &[&ConeDescriptor],
        pieces_convex_closed: bool,
    ) -> Self {
        for p in parts {
            if p.bound == DescriptorBound::Exact {
                if let Some((true, _)) = p.zero_status() {
                    let mut rows = Vec::with_capacity(2 * dimension);
                    for i in 0..dimension {
                        let mut e = vec![0.0; dimension];
                        e[i] = 1.0;
                        rows.push(e.clone());
                        e[i] = -1.0;
                        rows.push(e);
                    }
                    return ConeDescriptor::polyhedral(
                        dimension,
                        label,
                        rows,
                        DescriptorBound::Exact,
                        p.tier,
                    );
                }
            }
        }
        let mut combined = Self::combine(dimension, label, parts, DescriptorBound::Outer);
        if pieces_convex_closed && parts.iter().all(|p| p.is_exact()) {
            combined.bound = DescriptorBound::Exact;
        }
        combined
    }

    /// Intersection of descriptions of the retractive kind, where each part
    /// is `Exact` or `Inner` for its piece.
    ///
    /// A direction retractive for every piece is retractive for the
    /// intersection (each piece's retraction threshold is finite, so the max
    /// works for all of them at once), so intersecting inner bounds yields an
    /// inner bound. `exact_when_all_exact` records whether equality holds in
    /// the caller's situation (it does when every piece is polyhedral).
    #[must_use]
    pub fn intersection_inner(
        dimension: usize,
        label: impl Into<String>,
        parts: &[&ConeDescriptor],
        exact_when_all_exact: bool,
    ) -> Self {
        let mut combined = Self::combine(dimension, label, parts, DescriptorBound::Inner);
        if exact_when_all_exact && parts.iter().all(|p| p.is_exact()) {
            combined.bound = DescriptorBound::Exact;
        }
        combined
    }

    fn combine(
        dimension: usize,
        label: impl Into<String>,
        parts: &[&ConeDescriptor],
        bound: DescriptorBound,
    ) -> Self {
        let mut rows = Vec::new();
        let mut oracles = Vec::new();
        let mut tier = Tier::Proven;
        for p in parts {
            assert!(
                p.bound == DescriptorBound::Exact || p.bound == bound,
                "cannot combine a {:?} part into a {:?} intersection",
                p.bound,
                bound
            );
            rows.extend(p.rows.iter().cloned());
            oracles.extend(p.oracles.iter().cloned());
            tier = tier.max(p.tier);
        }
        ConeDescriptor {
            dimension,
            label: label.into(),
            rows,
            oracles,
            bound,
            tier,
        }
    }

    /// The lineality restriction `{d : d ∈ C and −d ∈ C}` of this
    /// description: rows are mirrored, oracles symmetrized. The bound
    /// carries over (the lineality of a subset is a subset of the lineality).
    #[must_use]
    pub fn lineality_restriction(&self, label: impl Into<String>) -> Self {
        let mut rows = Vec::with_capacity(2 * self.rows.len());
        for r in &self.rows {
            rows.push(r.clone());
            rows.push(r.iter().map(|v| -v).collect());
        }
        ConeDescriptor {
            dimension: self.dimension,
            label: label.into(),
            rows,
            oracles: self.oracles.iter().map(MembershipOracle::symmetrized).collect(),
            bound: self.bound,
            tier: self.tier,
        }
    }
}

/// Describe `𝒦(f) = {d : f_∞(d) ≤ 0}` as strongly as the representation of
/// `f` allows. See the module docs for the case analysis; highlights:
///
/// - convex polynomials of degree ≤ 2: exact polyhedral rows
///   (`Qd = 0, ⟨b, d⟩ ≤ 0`) at proven tier;
/// - arbitrary nonconvex quadratics: exact via the
///   [`MembershipOracle::QuadraticKappa`] closed form, still proven tier;
/// - builtins: exact rows, or an exact second-order cone for `‖x‖ − x_c`;
/// - everything else: trivial outer bound at sampled tier (membership is then
///   probed by the estimator, not this descriptor).
#[must_use]
pub fn kappa_cone(f: &FunctionSpec, asserted_convex: bool) -> ConeDescriptor {
    let dimension = f.dimension();
    let label = format!("zero cone of asymptotic growth of {f}");
    match f {
        FunctionSpec::Poly(p) => {
            let degree = p.degree();
            if degree <= 1 {
                let b = p.linear_coeffs();
                let rows = if b.iter().all(|v| *v == 0.0) {
                    Vec::new()
                } else {
                    vec![b]
                };
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
                let q = p.quadratic_matrix();
                let b = p.linear_coeffs();
                if convexity == ConvexityStatus::ProvenConvex {
                    // Q ⪰ 0: dᵀQd = 0 ⟺ Qd = 0, so the cone is polyhedral.
                    let mut rows = Vec::new();
                    for row in &q {
                        if row.iter().any(|v| *v != 0.0) {
                            rows.push(row.clone());
                            rows.push(row.iter().map(|v| -v).collect());
                        }
                    }
                    if b.iter().any(|v| *v != 0.0) {
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
                // Not positive semidefinite: the closed form {dᵀQd ≤ 0}.
                return ConeDescriptor {
                    dimension,
                    label,
                    rows: Vec::new(),
                    oracles: vec![MembershipOracle::QuadraticKappa { q }],
                    bound: DescriptorBound::Exact,
                    tier: Tier::Proven,
                };
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
                    oracles: vec![MembershipOracle::ConvexPolyRecipe { poly: p.clone() }],
                    bound: DescriptorBound::Exact,
                    tier,
                };
            }
            ConeDescriptor {
                dimension,
                label,
                rows: Vec::new(),
                oracles: Vec::new(),
                bound: DescriptorBound::Outer,
                tier: Tier::Sampled,
            }
        }
        FunctionSpec::BlackBox { spec, .. } => {
            if let Some(rows) = f.builtin_kappa_normals() {
                return ConeDescriptor::polyhedral(
                    dimension,
                    label,
                    rows.into_iter()
                        .filter(|r| r.iter().any(|v| *v != 0.0))
                        .collect(),
                    DescriptorBound::Exact,
                    Tier::Proven,
                );
            }
            if let crate::functions::BlackBoxForm::Builtin(
                crate::functions::Builtin::NormMinusCoord { coord },
            ) = &spec.form
            {
                // f_∞(d) = ‖d‖ − d_c + ⟨l, d⟩ ≤ 0 ⟺ ‖d‖ ≤ ⟨e_c − l, d⟩.
                let mut w = vec![0.0; dimension];
                w[*coord] = 1.0;
                for (wi, li) in w.iter_mut().zip(&spec.linear) {
                    *wi -= li;
                }
                let outer_row: Vec<f64> = w.iter().map(|v| -v).collect();
                return ConeDescriptor {
                    dimension,
                    label,
                    rows: vec![outer_row],
                    oracles: vec![MembershipOracle::Soc { w }],
                    bound: DescriptorBound::Exact,
                    tier: Tier::Proven,
                };
            }
            ConeDescriptor {
                dimension,
                label,
                rows: Vec::new(),
                oracles: Vec::new(),
                bound: DescriptorBound::Outer,
                tier: Tier::Sampled,
            }
        }
    }
}
