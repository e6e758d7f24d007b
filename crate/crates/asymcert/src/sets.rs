//! Feasible-set specifications.
//!
//! A [`SetSpec`] describes the constraint set `X` of a problem as a
//! composition of pieces the cone analysis understands:
//!
//! - the whole space;
//! - a polyhedron `{x : Ax ≤ b}` (boxes included);
//! - a sublevel set `{x : g(x) ≤ γ}` of any [`FunctionSpec`];
//! - a finite intersection of the above.
//!
//! Beyond membership and violation measures, the key operation is
//! [`SetSpec::asymptotic_cone`]: the asymptotic (horizon) cone `X_∞`, the set
//! of directions along which `X` recedes. For a nonempty polyhedron this is
//! exactly the homogeneous system `{d : Ad ≤ 0}`. For a nonempty sublevel set
//! it is *contained* in the zero cone `𝒦(g)` of the asymptotic growth of `g`,
//! with equality when `g` is proper, closed, and convex — so the returned
//! descriptor is exact for convex pieces and an outer bound otherwise. For an
//! intersection of nonempty closed sets, `(∩ Xᵢ)_∞ ⊆ ∩ (Xᵢ)_∞`, again with
//! equality in the convex case. All descriptors assume the set is nonempty
//! (emptiness is the certifier's job to detect).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::ConvexityStatus;
use crate::asymptotics::{kappa_cone, ConeDescriptor, DescriptorBound};
use crate::functions::FunctionSpec;
use crate::polyhedra::{l2_norm, Polyhedron};
use crate::Tier;

/// A feasible set built from polyhedra and sublevel sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSpec {
    FullSpace { dimension: usize },
    Polyhedral { polyhedron: Polyhedron },
    Sublevel {
        function: FunctionSpec,
        level: f64,
        /// Caller-asserted convexity of `function` (used at assertion tier).
        asserted_convex: bool,
    },
    Intersection { parts: Vec<SetSpec> },
}

impl SetSpec {
    /// `X = ℝⁿ`.
    #[must_use]
    pub fn full_space(dimension: usize) -> Self {
        SetSpec::FullSpace { dimension }
    }

    /// `X = {x : Ax ≤ b}`.
    #[must_use]
    pub fn polyhedron(polyhedron: Polyhedron) -> Self {
        SetSpec::Polyhedral { polyhedron }
    }

    /// `X = {x : g(x) ≤ level}`.
    #[must_use]
    pub fn sublevel(function: FunctionSpec, level: f64) -> Self {
        SetSpec::Sublevel {
            function,
            level,
            asserted_convex: false,
        }
    }

    /// `X = ∩ parts`. A singleton unwraps to the part itself.
    #[must_use]
    pub fn intersection(mut parts: Vec<SetSpec>) -> Self {
        if parts.len() == 1 {
            parts.pop().expect("length checked")
        } else {
            SetSpec::Intersection { parts }
        }
    }

    #[must_use]
    pub fn dimension(&self) -> usize {
        match self {
            SetSpec::FullSpace { dimension } => *dimension,
            SetSpec::Polyhedral { polyhedron } => polyhedron.dimension(),
            SetSpec::Sublevel { function, .. } => function.dimension(),
            SetSpec::Intersection { parts } => {
                parts.first().map_or(0, SetSpec::dimension)
            }
        }
    }

    /// Worst constraint violation at `x`: 0 inside, `+∞` when a sublevel
    /// function is `+∞` (outside its domain).
    #[must_use]
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            SetSpec::FullSpace { .. } => 0.0,
            SetSpec::Polyhedral { polyhedron } => polyhedron.violation(x),
            SetSpec::Sublevel { function, level, .. } => {
                (function.eval(x) - level).max(0.0)
            }
            SetSpec::Intersection { parts } => parts
                .iter()
                .map(|p| p.violation(x))
                .fold(0.0, f64::max),
        }
    }

    /// Membership within `tol · max(1, ‖x‖)`.
    #[must_use]
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol * l2_norm(x).max(1.0)
    }

    /// Convexity of the set, at the tier the representation supports:
    /// polyhedra are proven convex; a sublevel set inherits convexity from
    /// its function (sublevels of convex functions are convex, but sublevels
    /// of nonconvex functions may still be convex, so the negative case
    /// degrades to `Unknown` rather than `NotConvex`).
    #[must_use]
    pub fn convexity(&self) -> ConvexityStatus {
        match self {
            SetSpec::FullSpace { .. } | SetSpec::Polyhedral { .. } => {
                ConvexityStatus::ProvenConvex
            }
            SetSpec::Sublevel {
                function,
                asserted_convex,
                ..
            } => match function.convexity(*asserted_convex) {
                ConvexityStatus::ProvenConvex => ConvexityStatus::ProvenConvex,
                ConvexityStatus::Asserted => ConvexityStatus::Asserted,
                _ => ConvexityStatus::Unknown,
            },
            SetSpec::Intersection { parts } => {
                let mut status = ConvexityStatus::ProvenConvex;
                for p in parts {
                    status = match (status, p.convexity()) {
                        (ConvexityStatus::ProvenConvex, ConvexityStatus::ProvenConvex) => {
                            ConvexityStatus::ProvenConvex
                        }
                        (s, ConvexityStatus::ProvenConvex) => s,
                        (_, ConvexityStatus::Asserted) => ConvexityStatus::Asserted,
                        _ => return ConvexityStatus::Unknown,
                    };
                }
                status
            }
        }
    }

    /// The asymptotic cone `X_∞` (assuming `X` nonempty): exact for
    /// polyhedra and convex sublevel pieces, an outer bound otherwise.
    #[must_use]
    pub fn asymptotic_cone(&self) -> ConeDescriptor {
        let dimension = self.dimension();
        match self {
            SetSpec::FullSpace { .. } => {
                ConeDescriptor::full_space(dimension, "asymptotic cone of the whole space")
            }
            SetSpec::Polyhedral { polyhedron } => ConeDescriptor::polyhedral(
                dimension,
                "recession cone of the polyhedral constraint",
                polyhedron.recession_normals(),
                DescriptorBound::Exact,
                Tier::Proven,
            ),
            SetSpec::Sublevel {
                function,
                asserted_convex,
                ..
            } => {
                let kappa = kappa_cone(function, *asserted_convex);
                let convexity = function.convexity(*asserted_convex);
                let (bound, tier) = match convexity {
                    ConvexityStatus::ProvenConvex => (kappa.bound, kappa.tier),
                    ConvexityStatus::Asserted => (kappa.bound, kappa.tier.max(Tier::Asserted)),
                    // Nonconvex piece: containment in 𝒦 still holds, so the
                    // rows/oracles stand as an outer bound at their own tier.
                    _ => (DescriptorBound::Outer, kappa.tier),
                };
                let exact = bound == DescriptorBound::Exact;
                ConeDescriptor {
                    dimension,
                    label: format!(
                        "asymptotic cone of the sublevel set of {function}{}",
                        if exact { "" } else { " (outer bound)" }
                    ),
                    rows: kappa.rows,
                    oracles: kappa.oracles,
                    bound,
                    tier,
                }
            }
            SetSpec::Intersection { parts } => {
                let cones: Vec<ConeDescriptor> =
                    parts.iter().map(SetSpec::asymptotic_cone).collect();
                let refs: Vec<&ConeDescriptor> = cones.iter().collect();
                let all_convex = parts
                    .iter()
                    .all(|p| p.convexity().is_convex_usable());
                let mut combined = ConeDescriptor::intersection(
                    dimension,
                    "asymptotic cone of the constraint intersection",
                    &refs,
                    all_convex,
                );
                // A piece whose cone is provably {0} pins the intersection at
                // proven tier without leaning on convexity, so only in the
                // other cases must the tier reflect assertion-strength
                // convexity.
                let pinned_proven = cones.iter().any(|c| {
                    c.is_exact()
                        && c.tier == Tier::Proven
                        && matches!(c.zero_status(), Some((true, _)))
                });
                if !pinned_proven
                    && all_convex
                    && parts
                        .iter()
                        .any(|p| p.convexity() == ConvexityStatus::Asserted)
                {
                    combined.tier = combined.tier.max(Tier::Asserted);
                }
                combined
            }
        }
    }

    /// Search for a feasible point: deterministic candidates (origin,
    /// polyhedral cyclic-projection point) first, then seeded random probes
    /// refined by projecting onto the polyhedral parts.
    #[must_use]
    pub fn probe_point(&self, rng: &mut impl Rng, attempts: usize) -> Option<Vec<f64>> {
        let n = self.dimension();
        let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
        if let Some(p) = self.polyhedral_part() {
            if let Some(x) = p.feasible_point(2000, 1e-10) {
                candidates.push(x);
            }
        }
        for _ in 0..attempts {
            let scale = 10f64.powi(rng.gen_range(-1i32..=2));
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
            let x = match self.polyhedral_part() {
                Some(p) => p.project(&x, 300, 1e-10),
                None => x,
            };
            candidates.push(x);
        }
        candidates.into_iter().find(|x| self.contains(x, 1e-9))
    }

    /// The conjunction of all polyhedral rows in the spec (ignoring sublevel
    /// pieces): useful as a projection target and for recession analysis.
    #[must_use]
    pub fn polyhedral_part(&self) -> Option<Polyhedron> {
        fn collect(spec: &SetSpec, rows: &mut Vec<(Vec<f64>, f64)>) {
            match spec {
                SetSpec::FullSpace { .. } | SetSpec::Sublevel { .. } => {}
                SetSpec::Polyhedral { polyhedron } => {
                    for h in polyhedron.rows() {
                        rows.push((h.normal.clone(), h.offset));
                    }
                }
                SetSpec::Intersection { parts } => {
                    for p in parts {
                        collect(p, rows);
                    }
                }
            }
        }
        let mut rows = Vec::new();
        collect(self, &mut rows);
        (!rows.is_empty())
            .then(|| Polyhedron::new(self.dimension(), &rows).expect("rows are well-formed"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::Membership;
    use crate::functions::{BlackBox, Builtin};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sqrt_constraint() -> SetSpec {
        // {x : √|x₁| − x₂ ≤ 0}
        SetSpec::sublevel(
            FunctionSpec::black_box(
                2,
                BlackBox::new(Builtin::SqrtAbs { coord: 0 }).with_linear(vec![0.0, -1.0]),
            ),
            0.0,
        )
    }

    #[test]
    fn membership_and_violation() {
        let s = sqrt_constraint();
        assert!(s.contains(&[4.0, 2.0], 1e-9));
        assert!(s.contains(&[4.0, 3.0], 1e-9));
        assert!(!s.contains(&[4.0, 1.0], 1e-9));
        assert!((s.violation(&[4.0, 1.0]) - 1.0).abs() < 1e-12);

        let boxed = SetSpec::polyhedron(
            Polyhedron::from_box(&[Some(0.0)], &[None]).unwrap(),
        );
        assert!(boxed.contains(&[5.0], 1e-9));
        assert!(!boxed.contains(&[-1.0], 1e-9));
    }

    #[test]
    fn sublevel_of_nonconvex_function_gives_outer_cone() {
        let s = sqrt_constraint();
        assert_eq!(s.convexity(), ConvexityStatus::Unknown);
        let cone = s.asymptotic_cone();
        assert!(!cone.is_exact(), "nonconvex piece only bounds X_∞ from outside");
        assert_eq!(cone.tier, Tier::Proven, "the bound itself is exact algebra");
        // Outer bound is {d₂ ≥ 0}: refutes downward directions outright.
        assert_eq!(cone.membership(&[0.0, -1.0], 1e-9), Membership::Out);
        assert_eq!(cone.membership(&[1.0, 1.0], 1e-9), Membership::Unresolved);
    }

    #[test]
    fn sublevel_of_convex_builtin_gives_exact_cone() {
        // {x : −√x₁ ≤ 0} over ℝ¹: the set is [0, ∞), cone is d ≥ 0 exactly.
        let s = SetSpec::sublevel(
            FunctionSpec::black_box(1, BlackBox::new(Builtin::NegSqrt { coord: 0 })),
            0.0,
        );
        assert_eq!(s.convexity(), ConvexityStatus::ProvenConvex);
        let cone = s.asymptotic_cone();
        assert!(cone.is_exact());
        assert_eq!(cone.membership(&[1.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[-1.0], 1e-9), Membership::Out);
    }

    #[test]
    fn intersection_cone_of_convex_quadratic_sublevels() {
        // X = {x₁² ≤ x₃, x₂² ≤ x₄} over ℝ⁴: both pieces convex quadratic, so
        // X_∞ = {d₁ = d₂ = 0, d₃ ≥ 0, d₄ ≥ 0} exactly.
        let g1 = FunctionSpec::poly_from_terms(
            4,
            &[(1.0, vec![2, 0, 0, 0]), (-1.0, vec![0, 0, 1, 0])],
        );
        let g2 = FunctionSpec::poly_from_terms(
            4,
            &[(1.0, vec![0, 2, 0, 0]), (-1.0, vec![0, 0, 0, 1])],
        );
        let x = SetSpec::intersection(vec![
            SetSpec::sublevel(g1, 0.0),
            SetSpec::sublevel(g2, 0.0),
        ]);
        assert_eq!(x.convexity(), ConvexityStatus::ProvenConvex);
        let cone = x.asymptotic_cone();
        assert!(cone.is_exact());
        assert_eq!(cone.tier, Tier::Proven);
        let gens = cone.generator_form().expect("exact polyhedral");
        assert!(gens.lineality.is_empty());
        assert_eq!(gens.rays.len(), 2, "rays e₃ and e₄: {:?}", gens.rays);
        assert_eq!(cone.membership(&[0.0, 0.0, 3.0, 5.0], 1e-9), Membership::In);
        assert_eq!(cone.membership(&[1.0, 0.0, 1.0, 0.0], 1e-9), Membership::Out);
    }

    #[test]
    fn probe_point_finds_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sqrt_constraint();
        let x = s.probe_point(&mut rng, 50).expect("origin is feasible");
        assert!(s.contains(&x, 1e-9));

        let shifted = SetSpec::polyhedron(
            Polyhedron::from_box(&[Some(3.0), Some(-1.0)], &[Some(4.0), Some(1.0)]).unwrap(),
        );
        let x = shifted.probe_point(&mut rng, 50).expect("box is nonempty");
        assert!(shifted.contains(&x, 1e-6));

        let empty = SetSpec::polyhedron(
            Polyhedron::new(1, &[(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap(),
        );
        assert!(empty.probe_point(&mut rng, 30).is_none());
    }

    #[test]
    fn polyhedral_part_collects_rows_across_intersections() {
        let s = SetSpec::intersection(vec![
            SetSpec::polyhedron(Polyhedron::from_box(&[Some(0.0), None], &[None, None]).unwrap()),
            sqrt_constraint(),
            SetSpec::polyhedron(
                Polyhedron::new(2, &[(vec![0.0, 1.0], 5.0)]).unwrap(),
            ),
        ]);
        let p = s.polyhedral_part().expect("two polyhedral pieces");
        assert_eq!(p.rows().len(), 2);
        assert!(p.contains(&[1.0, 2.0], 1e-9));
        assert!(!p.contains(&[-1.0, 2.0], 1e-9));
        assert!(!p.contains(&[1.0, 6.0], 1e-9));
    }
}
