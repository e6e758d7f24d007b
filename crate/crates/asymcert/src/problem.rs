//! Problem specifications and their JSON file format.
//!
//! A [`ProblemSpec`] is the minimization problem `inf { f(x) : x ∈ X }`: an
//! objective [`FunctionSpec`], a feasible [`SetSpec`], and caller
//! [`Assertions`] about the objective that the analyzers cannot verify
//! themselves. Construction eagerly searches for a feasibility probe — a
//! point of `X ∩ dom f` — with a fixed internal seed, so every downstream
//! consumer (feasibility gates, solver starts, upper bounds) shares one
//! deterministic witness.
//!
//! [`ProblemFile`] is the on-disk JSON schema. It is deliberately small:
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "objective": { "poly": [ { "coeff": 1.0, "powers": [2, 0] },
//!                            { "coeff": 1.0, "powers": [0, 1] } ] },
//!   "constraints": [
//!     { "func_leq": { "function": { "builtin": { "name": "sqrt_abs", "coord": 0,
//!                                                "linear": [0.0, -1.0] } },
//!                     "level": 0.0 } }
//!   ],
//!   "assertions": { "convex": false },
//!   "overrides": { "seed": 7 }
//! }
//! ```
//!
//! Objectives and constraint functions come in three forms: sparse
//! polynomial terms (`poly`), a named builtin with an optional linear shift
//! (`builtin`), or expression text (`expr`, e.g. `"exp(x1) + x2^2"`).
//! Constraints are linear rows (`<=`, `>=`, or `=`), polynomial
//! inequalities, boxes, or general function sublevels; all linear and box
//! rows merge into a single polyhedron so the cone analysis sees them
//! exactly. The optional `overrides` block carries per-file solver defaults
//! that command-line flags take precedence over.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::decay::DecayAssertions;
use crate::functions::{BlackBox, Builtin, FunctionError, FunctionSpec};
use crate::polyhedra::{PolyhedraError, Polyhedron};
use crate::sets::SetSpec;

/// Seed of the internal probe-point search (independent of user seeds so a
/// problem's stored probe never varies across runs).
const PROBE_SEED: u64 = 0x70b3;

/// Errors from problem construction and file parsing.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("{what} has dimension {got} but the problem dimension is {expected}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("the problem dimension must be positive")]
    ZeroDimension,
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Polyhedra(#[from] PolyhedraError),
}

/// Caller-supplied facts about the objective, taken on faith: everything
/// derived from them is reported at asserted tier. Constraint-side convexity
/// assertions live on the individual sublevel pieces instead
/// (`assert_convex` in [`ConstraintFile::FuncLeq`]).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Assertions {
    /// The objective is convex.
    pub convex: bool,
    /// The optimal value is finite.
    pub finite_min: bool,
    /// The objective's derivative of this order is Lipschitz (`0` means the
    /// function itself is Lipschitz).
    pub lipschitz_order: Option<u32>,
}

impl Assertions {
    /// The same facts in the decay classifier's vocabulary.
    #[must_use]
    pub fn decay(&self) -> DecayAssertions {
        DecayAssertions {
            convex: self.convex,
            lipschitz_derivative_order: self.lipschitz_order,
            finite_infimum: self.finite_min,
        }
    }
}

/// Per-file solver and certifier defaults; command-line flags win over these.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<u32>,
    pub tol: Option<f64>,
    pub max_reg_steps: Option<u32>,
}

/// The minimization problem `inf { f(x) : x ∈ X }` with assertions and a
/// stored feasibility probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    dimension: usize,
    objective: FunctionSpec,
    constraint: SetSpec,
    assertions: Assertions,
    /// A deterministic point of `X ∩ dom f`, when the search found one.
    probe: Option<Vec<f64>>,
}

impl ProblemSpec {
    /// Build a problem with no assertions.
    ///
    /// # Panics
    /// Panics when the objective or constraint dimension disagrees with
    /// `dimension`; use [`ProblemSpec::try_new`] for fallible construction.
    #[must_use]
    pub fn new(dimension: usize, objective: FunctionSpec, constraint: SetSpec) -> Self {
        Self::try_new(dimension, objective, constraint, Assertions::default())
            .expect("consistent problem dimensions")
    }

    /// Fallible variant of [`ProblemSpec::new`], with assertions.
    pub fn try_new(
        dimension: usize,
        objective: FunctionSpec,
        constraint: SetSpec,
        assertions: Assertions,
    ) -> Result<Self, ProblemError> {
        if dimension == 0 {
            return Err(ProblemError::ZeroDimension);
        }
        if objective.dimension() != dimension {
            return Err(ProblemError::DimensionMismatch {
                what: "the objective".to_string(),
                expected: dimension,
                got: objective.dimension(),
            });
        }
        check_set_dimension(&constraint, dimension)?;
        let effective = effective_set(dimension, &objective, &constraint);
        let probe = find_probe(&objective, &effective);
        Ok(ProblemSpec {
            dimension,
            objective,
            constraint,
            assertions,
            probe,
        })
    }

    /// Replace the assertions (the probe does not depend on them).
    #[must_use]
    pub fn with_assertions(mut self, assertions: Assertions) -> Self {
        self.assertions = assertions;
        self
    }

    #[must_use]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[must_use]
    pub fn objective(&self) -> &FunctionSpec {
        &self.objective
    }

    #[must_use]
    pub fn constraint(&self) -> &SetSpec {
        &self.constraint
    }

    #[must_use]
    pub fn assertions(&self) -> &Assertions {
        &self.assertions
    }

    /// The stored feasibility probe: a point of `X ∩ dom f`, or `None` when
    /// the deterministic search found no feasible point (evidence — not
    /// proof — of infeasibility).
    #[must_use]
    pub fn probe(&self) -> Option<&[f64]> {
        self.probe.as_deref()
    }

    /// The constraint set with the objective's domain rows folded in: the
    /// region where the problem actually lives, `{x ∈ X : f(x) < +∞}`.
    /// Cone analysis runs on this set, so implicit domains (such as
    /// `x ≥ 0` for `−√x`) shape the asymptotic cone even when the caller
    /// wrote no explicit constraint.
    #[must_use]
    pub fn effective_set(&self) -> SetSpec {
        effective_set(self.dimension, &self.objective, &self.constraint)
    }
}

fn check_set_dimension(set: &SetSpec, dimension: usize) -> Result<(), ProblemError> {
    let mismatch = |what: &str, got: usize| ProblemError::DimensionMismatch {
        what: what.to_string(),
        expected: dimension,
        got,
    };
    match set {
        SetSpec::FullSpace { dimension: d } => {
            (*d == dimension).then_some(()).ok_or_else(|| mismatch("the full-space constraint", *d))
        }
        SetSpec::Polyhedral { polyhedron } => (polyhedron.dimension() == dimension)
            .then_some(())
            .ok_or_else(|| mismatch("a polyhedral constraint", polyhedron.dimension())),
        SetSpec::Sublevel { function, .. } => (function.dimension() == dimension)
            .then_some(())
            .ok_or_else(|| mismatch("a sublevel constraint", function.dimension())),
        SetSpec::Intersection { parts } => {
            parts.iter().try_for_each(|p| check_set_dimension(p, dimension))
        }
    }
}

/// `X ∩ dom f` as a [`SetSpec`] (the constraint unchanged when `f` is finite
/// on all of `ℝⁿ`).
fn effective_set(dimension: usize, objective: &FunctionSpec, constraint: &SetSpec) -> SetSpec {
    let rows = objective.domain_rows();
    if rows.is_empty() {
        return constraint.clone();
    }
    let domain = Polyhedron::new(dimension, &rows).expect("domain rows match the dimension");
    SetSpec::intersection(vec![constraint.clone(), SetSpec::polyhedron(domain)])
}

/// Deterministic search for a point of the effective set that the objective
/// is finite at: origin, a cyclic-projection point of the polyhedral rows,
/// then seeded random probes projected onto the polyhedral rows.
fn find_probe(objective: &FunctionSpec, effective: &SetSpec) -> Option<Vec<f64>> {
    let n = effective.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let poly = effective.polyhedral_part();
    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
    if let Some(p) = &poly {
        if let Some(x) = p.feasible_point(2000, 1e-10) {
            candidates.push(x);
        }
    }
    for _ in 0..512 {
        let scale = 10f64.powi(rng.gen_range(-1i32..=2));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
        let x = match &poly {
            Some(p) => p.project(&x, 300, 1e-10),
            None => x,
        };
        candidates.push(x);
    }
    candidates
        .into_iter()
        .find(|x| effective.contains(x, 1e-9) && objective.finite_at(x))
}

/// One sparse polynomial term in a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub coeff: f64,
    /// One exponent per coordinate.
    pub powers: Vec<u32>,
}

/// A function in a problem file: polynomial terms, a named builtin with an
/// optional linear shift, or expression text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionFile {
    Poly(Vec<TermFile>),
    Builtin {
        #[serde(flatten)]
        form: Builtin,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        linear: Vec<f64>,
    },
    Expr(String),
}

impl FunctionFile {
    /// Validate against the problem dimension and build the function.
    pub fn build(&self, dimension: usize) -> Result<FunctionSpec, ProblemError> {
        match self {
            FunctionFile::Poly(terms) => {
                let pairs: Vec<(f64, Vec<u32>)> = terms
                    .iter()
                    .map(|t| (t.coeff, t.powers.clone()))
                    .collect();
                Ok(FunctionSpec::try_poly_from_terms(dimension, &pairs)?)
            }
            FunctionFile::Builtin { form, linear } => Ok(FunctionSpec::try_black_box(
                dimension,
                BlackBox {
                    form: crate::functions::BlackBoxForm::Builtin(form.clone()),
                    linear: linear.clone(),
                },
            )?),
            FunctionFile::Expr(text) => Ok(FunctionSpec::parse_expr(dimension, text)?),
        }
    }
}

/// Direction of a linear constraint row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[default]
    #[serde(rename = "<=")]
    Leq,
    #[serde(rename = ">=")]
    Geq,
    #[serde(rename = "=")]
    Eq,
}

/// One constraint in a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFile {
    /// `⟨normal, x⟩ relation offset`.
    Linear {
        normal: Vec<f64>,
        offset: f64,
        #[serde(default)]
        relation: Relation,
    },
    /// `p(x) ≤ level` for a polynomial `p`.
    PolyLeq {
        terms: Vec<TermFile>,
        #[serde(default)]
        level: f64,
    },
    /// Componentwise bounds; `null` leaves a side open, and short vectors
    /// leave trailing coordinates free.
    Box {
        #[serde(default)]
        lower: Vec<Option<f64>>,
        #[serde(default)]
        upper: Vec<Option<f64>>,
    },
    /// `g(x) ≤ level` for any function form.
    FuncLeq {
        function: FunctionFile,
        #[serde(default)]
        level: f64,
        /// Assert that `g` is convex (asserted tier) when the analyzer
        /// cannot prove it.
        #[serde(default)]
        assert_convex: bool,
    },
}

/// The on-disk problem schema; see the module docs for an example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub objective: FunctionFile,
    #[serde(default)]
    pub constraints: Vec<ConstraintFile>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default)]
    pub overrides: Overrides,
}

impl ProblemFile {
    /// Parse JSON text; errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Validate and build the [`ProblemSpec`]. All linear and box rows merge
    /// into one polyhedron; sublevel constraints follow in file order.
    pub fn build(&self) -> Result<ProblemSpec, ProblemError> {
        let n = self.dimension;
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut sublevels: Vec<SetSpec> = Vec::new();
        for c in &self.constraints {
            match c {
                ConstraintFile::Linear {
                    normal,
                    offset,
                    relation,
                } => {
                    let flipped: Vec<f64> = normal.iter().map(|v| -v).collect();
                    match relation {
                        Relation::Leq => rows.push((normal.clone(), *offset)),
                        Relation::Geq => rows.push((flipped, -offset)),
                        Relation::Eq => {
                            rows.push((normal.clone(), *offset));
                            rows.push((flipped, -offset));
                        }
                    }
                }
                ConstraintFile::Box { lower, upper } => {
                    let mut lower = lower.clone();
                    let mut upper = upper.clone();
                    lower.resize(n, None);
                    upper.resize(n, None);
                    for h in Polyhedron::from_box(&lower, &upper)?.rows() {
                        rows.push((h.normal.clone(), h.offset));
                    }
                }
                ConstraintFile::PolyLeq { terms, level } => {
                    let pairs: Vec<(f64, Vec<u32>)> =
                        terms.iter().map(|t| (t.coeff, t.powers.clone())).collect();
                    let p = FunctionSpec::try_poly_from_terms(n, &pairs)?;
                    sublevels.push(SetSpec::sublevel(p, *level));
                }
                ConstraintFile::FuncLeq {
                    function,
                    level,
                    assert_convex,
                } => {
                    sublevels.push(SetSpec::Sublevel {
                        function: function.build(n)?,
                        level: *level,
                        asserted_convex: *assert_convex,
                    });
                }
            }
        }
        let mut parts: Vec<SetSpec> = Vec::new();
        if !rows.is_empty() {
            parts.push(SetSpec::polyhedron(Polyhedron::new(n, &rows)?));
        }
        parts.extend(sublevels);
        let constraint = if parts.is_empty() {
            SetSpec::full_space(n)
        } else {
            SetSpec::intersection(parts)
        };
        ProblemSpec::try_new(n, self.objective.build(n)?, constraint, self.assertions.clone())
    }
}
