//! Function specifications: polynomials, named builtins, expression trees.
//!
//! A [`FunctionSpec`] is the objective or constraint function of a problem in
//! one of three forms, ordered by how much the analysis can prove about them:
//!
//! - **Polynomial**: full structural access (homogeneous parts, convexity by
//!   eigenvalue check for degree ≤ 2, closed-form asymptotic behavior).
//! - **Builtin black box** ([`Builtin`]): a small registry of non-polynomial
//!   shapes — `√|x_c|`, `−√x_c`, `e^{⟨c,x⟩}`, `‖x‖ − x_c`, `e^{−√(x_i·x_j)}` —
//!   each optionally shifted by a linear term `⟨l, x⟩`. Every builtin carries
//!   exact metadata: its convexity, its domain as halfspace rows, its
//!   asymptotic function in closed form, and (where the sublevel geometry is
//!   polyhedral) exact cone rows. Builtins are how non-polynomial problems
//!   still earn proven-tier certificates.
//! - **Expression tree** ([`Expr`]): arbitrary formulas over `+ − · ^k sqrt
//!   sqrtabs abs exp norm`, parsed from text. Expressions evaluate and
//!   differentiate (forward mode) but expose no exact structure, so analysis
//!   over them is sampled-tier only.
//!
//! Values may be `+∞` to encode "outside the domain" (e.g. `−√x` at `x < 0`);
//! `NaN` from a formula is normalized to `+∞` under the same convention.
//!
//! Two numerically-hardened comparison hooks support the falsifiers, which
//! probe function values at points with norms up to `2³²` where naive
//! subtraction loses every significant digit:
//!
//! - [`FunctionSpec::level_excess`] — a sign-faithful surrogate of `f(x) − γ`
//!   (e.g. for `‖x‖ − x_c` the excess is computed from
//!   `Σ_{i≠c} x_i² − 2γx_c − γ²`, which never cancels);
//! - [`FunctionSpec::value_gap`] — a monotone surrogate of `f(x) − f(y)`
//!   (e.g. for `e^{⟨c,x⟩}` values are compared in the exponent).
//!
//! Both return a [`GapEstimate`] carrying the rounding-noise scale of the
//! computation, so callers can classify sign decisions as reliable or
//! indeterminate instead of trusting bare floats.

use serde::{Deserialize, Serialize};

use crate::algebra::{certify_convexity, ConvexityStatus, Polynomial};
use crate::asymptotics::ExtendedReal;
use crate::polyhedra::{dot, l2_norm};

/// Machine epsilon multiple used in rounding-noise estimates.
pub(crate) const NOISE_FACTOR: f64 = 8.0 * f64::EPSILON;

/// Errors from function construction and expression parsing.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FunctionError {
    #[error("coordinate index {coord} out of range for dimension {dimension}")]
    CoordOutOfRange { coord: usize, dimension: usize },
    #[error("coefficient vector has {got} entries but the dimension is {expected}")]
    VectorLenMismatch { expected: usize, got: usize },
    #[error("expression parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// A named black-box shape with exact analysis metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    /// `√|x_c|` — nonconvex, finite everywhere, grows like `√‖x‖`.
    SqrtAbs { coord: usize },
    /// `−√(x_c)` on the domain `x_c ≥ 0` (`+∞` outside) — convex, unbounded
    /// below along `e_c` yet slower than linearly.
    NegSqrt { coord: usize },
    /// `e^{⟨c, x⟩}` — convex, flat toward `⟨c, x⟩ → −∞`.
    ExpLinear { coeffs: Vec<f64> },
    /// `‖x‖₂ − x_c` — convex with a second-order (non-polyhedral) zero cone.
    NormMinusCoord { coord: usize },
    /// `e^{−√(x_i·x_j)}` on the domain `x_i, x_j ≥ 0` — convex, infimum 0 not
    /// attained along the hyperbola `x_i·x_j = const → ∞`.
    ExpNegSqrtProd { coords: [usize; 2] },
}

impl Builtin {
    /// Largest coordinate index the builtin reads.
    fn max_coord(&self) -> usize {
        match self {
            Builtin::SqrtAbs { coord } | Builtin::NegSqrt { coord } | Builtin::NormMinusCoord { coord } => *coord,
            Builtin::ExpLinear { coeffs } => coeffs.len().saturating_sub(1),
            Builtin::ExpNegSqrtProd { coords } => coords[0].max(coords[1]),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Builtin::SqrtAbs { coord } => x[*coord].abs().sqrt(),
            Builtin::NegSqrt { coord } => {
                if x[*coord] >= 0.0 {
                    -x[*coord].sqrt()
                } else {
                    f64::INFINITY
                }
            }
            Builtin::ExpLinear { coeffs } => dot(coeffs, &x[..coeffs.len()]).exp(),
            Builtin::NormMinusCoord { coord } => l2_norm(x) - x[*coord],
            Builtin::ExpNegSqrtProd { coords } => {
                let (u, v) = (x[coords[0]], x[coords[1]]);
                if u >= 0.0 && v >= 0.0 {
                    (-(u * v).sqrt()).exp()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Analytic gradient where it exists; `None` at kinks, domain boundaries,
    /// and overflow.
    fn grad(&self, x: &[f64], dimension: usize) -> Option<Vec<f64>> {
        let mut g = vec![0.0; dimension];
        match self {
            Builtin::SqrtAbs { coord } => {
                let v = x[*coord];
                if v == 0.0 {
                    return None;
                }
                g[*coord] = v.signum() / (2.0 * v.abs().sqrt());
            }
            Builtin::NegSqrt { coord } => {
                let v = x[*coord];
                if v <= 0.0 {
                    return None;
                }
                g[*coord] = -1.0 / (2.0 * v.sqrt());
            }
            Builtin::ExpLinear { coeffs } => {
                let e = dot(coeffs, &x[..coeffs.len()]).exp();
                if !e.is_finite() {
                    return None;
                }
                for (gi, ci) in g.iter_mut().zip(coeffs) {
                    *gi = e * ci;
                }
            }
            Builtin::NormMinusCoord { coord } => {
                let n = l2_norm(x);
                if n == 0.0 {
                    return None;
                }
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi = xi / n;
                }
                g[*coord] -= 1.0;
            }
            Builtin::ExpNegSqrtProd { coords } => {
                let (u, v) = (x[coords[0]], x[coords[1]]);
                if u <= 0.0 || v <= 0.0 {
                    return None;
                }
                let s = (u * v).sqrt();
                let e = (-s).exp();
                g[coords[0]] = -e * v / (2.0 * s);
                g[coords[1]] = -e * u / (2.0 * s);
            }
        }
        Some(g)
    }

    fn convexity(&self) -> ConvexityStatus {
        match self {
            Builtin::SqrtAbs { .. } => ConvexityStatus::NotConvex,
            _ => ConvexityStatus::ProvenConvex,
        }
    }

    /// Halfspace rows `(a, 0)` describing the effective domain; empty when the
    /// builtin is finite on all of `ℝⁿ`.
    fn domain_rows(&self, dimension: usize) -> Vec<(Vec<f64>, f64)> {
        let row = |c: usize| {
            let mut a = vec![0.0; dimension];
            a[c] = -1.0;
            (a, 0.0)
        };
        match self {
            Builtin::NegSqrt { coord } => vec![row(*coord)],
            Builtin::ExpNegSqrtProd { coords } => vec![row(coords[0]), row(coords[1])],
            _ => Vec::new(),
        }
    }

    /// The asymptotic function of the bare builtin (no linear shift) at `d`,
    /// in closed form. All five shapes grow sublinearly inside their domain
    /// cones, so the value is 0 there and `+∞` outside.
    fn asymptotic(&self, d: &[f64]) -> ExtendedReal {
        match self {
            Builtin::SqrtAbs { .. } => ExtendedReal::Finite(0.0),
            Builtin::NegSqrt { coord } => {
                if d[*coord] >= 0.0 {
                    ExtendedReal::Finite(0.0)
                } else {
                    ExtendedReal::PlusInfinity
                }
            }
            Builtin::ExpLinear { coeffs } => {
                if dot(coeffs, &d[..coeffs.len()]) <= 0.0 {
                    ExtendedReal::Finite(0.0)
                } else {
                    ExtendedReal::PlusInfinity
                }
            }
            Builtin::NormMinusCoord { coord } => ExtendedReal::Finite(l2_norm(d) - d[*coord]),
            Builtin::ExpNegSqrtProd { coords } => {
                if d[coords[0]] >= 0.0 && d[coords[1]] >= 0.0 {
                    ExtendedReal::Finite(0.0)
                } else {
                    ExtendedReal::PlusInfinity
                }
            }
        }
    }

    /// Halfspace normals `a` with `{d : ⟨a, d⟩ ≤ 0 ∀a} = {d : f_∞(d) ≤ 0}` for
    /// the bare builtin, when that zero cone is polyhedral. `‖x‖ − x_c` has a
    /// second-order cone instead and returns `None`.
    fn kappa_normals(&self, dimension: usize) -> Option<Vec<Vec<f64>>> {
        let neg_e = |c: usize| {
            let mut a = vec![0.0; dimension];
            a[c] = -1.0;
            a
        };
        match self {
            Builtin::SqrtAbs { .. } => Some(Vec::new()),
            Builtin::NegSqrt { coord } => Some(vec![neg_e(*coord)]),
            Builtin::ExpLinear { coeffs } => {
                let mut a = coeffs.clone();
                a.resize(dimension, 0.0);
                Some(vec![a])
            }
            Builtin::NormMinusCoord { .. } => None,
            Builtin::ExpNegSqrtProd { coords } => {
                Some(vec![neg_e(coords[0]), neg_e(coords[1])])
            }
        }
    }

    /// Halfspace normals whose cone is `{d : f_∞(d) = f_∞(−d) = 0}` for the
    /// bare builtin — the directions along which the function stays bounded
    /// both ways. Always polyhedral (equality rows come in ± pairs).
    fn constancy_normals(&self, dimension: usize) -> Vec<Vec<f64>> {
        let pm_e = |c: usize| {
            let mut a = vec![0.0; dimension];
            a[c] = 1.0;
            let b = a.iter().map(|v| -v).collect::<Vec<f64>>();
            vec![a, b]
        };
        match self {
            Builtin::SqrtAbs { .. } => Vec::new(),
            Builtin::NegSqrt { coord } => pm_e(*coord),
            Builtin::ExpLinear { coeffs } => {
                let mut a = coeffs.clone();
                a.resize(dimension, 0.0);
                let b = a.iter().map(|v| -v).collect::<Vec<f64>>();
                vec![a, b]
            }
            Builtin::NormMinusCoord { .. } => {
                // ‖d‖ = d_c and ‖d‖ = −d_c force d = 0.
                (0..dimension).flat_map(pm_e).collect()
            }
            Builtin::ExpNegSqrtProd { coords } => {
                let mut rows = pm_e(coords[0]);
                rows.extend(pm_e(coords[1]));
                rows
            }
        }
    }
}

/// A builtin or expression body plus an optional linear shift `⟨linear, x⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackBox {
    pub form: BlackBoxForm,
    /// Added linear term; empty means none.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub linear: Vec<f64>,
}

/// The body of a [`BlackBox`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlackBoxForm {
    Builtin(Builtin),
    Expr(Expr),
}

impl BlackBox {
    /// Wrap a builtin with no linear shift.
    #[must_use]
    pub fn new(builtin: Builtin) -> Self {
        BlackBox {
            form: BlackBoxForm::Builtin(builtin),
            linear: Vec::new(),
        }
    }

    /// Wrap an expression tree with no linear shift.
    #[must_use]
    pub fn from_expr(expr: Expr) -> Self {
        BlackBox {
            form: BlackBoxForm::Expr(expr),
            linear: Vec::new(),
        }
    }

    /// Add a linear term `⟨linear, x⟩` to the function value.
    #[must_use]
    pub fn with_linear(mut self, linear: Vec<f64>) -> Self {
        self.linear = linear;
        self
    }

    fn linear_at(&self, x: &[f64]) -> f64 {
        if self.linear.is_empty() {
            0.0
        } else {
            dot(&self.linear, x)
        }
    }
}

/// A function `ℝⁿ → ℝ ∪ {+∞}` in one of the supported representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    Poly(Polynomial),
    BlackBox { dimension: usize, spec: BlackBox },
}

impl FunctionSpec {
    /// Polynomial from `(coefficient, exponents)` pairs.
    ///
    /// # Panics
    /// Panics when a term's exponent vector does not match `dimension`; use
    /// [`FunctionSpec::try_poly_from_terms`] for fallible construction.
    #[must_use]
    pub fn poly_from_terms(dimension: usize, terms: &[(f64, Vec<u32>)]) -> Self {
        Self::try_poly_from_terms(dimension, terms).expect("valid polynomial terms")
    }

    /// Fallible variant of [`FunctionSpec::poly_from_terms`].
    pub fn try_poly_from_terms(
        dimension: usize,
        terms: &[(f64, Vec<u32>)],
    ) -> Result<Self, FunctionError> {
        Ok(FunctionSpec::Poly(Polynomial::from_terms(dimension, terms)?))
    }

    /// Wrap a black box over `ℝⁿ`.
    ///
    /// # Panics
    /// Panics when the box reads coordinates outside the dimension; use
    /// [`FunctionSpec::try_black_box`] for fallible construction.
    #[must_use]
    pub fn black_box(dimension: usize, spec: BlackBox) -> Self {
        Self::try_black_box(dimension, spec).expect("valid black box")
    }

    /// Fallible variant of [`FunctionSpec::black_box`].
    pub fn try_black_box(dimension: usize, spec: BlackBox) -> Result<Self, FunctionError> {
        let max_coord = match &spec.form {
            BlackBoxForm::Builtin(b) => b.max_coord(),
            BlackBoxForm::Expr(e) => e.max_var().unwrap_or(0),
        };
        if max_coord >= dimension {
            return Err(FunctionError::CoordOutOfRange {
                coord: max_coord,
                dimension,
            });
        }
        if let BlackBoxForm::Builtin(Builtin::ExpLinear { coeffs }) = &spec.form {
            if coeffs.len() > dimension {
                return Err(FunctionError::VectorLenMismatch {
                    expected: dimension,
                    got: coeffs.len(),
                });
            }
        }
        if !spec.linear.is_empty() && spec.linear.len() != dimension {
            return Err(FunctionError::VectorLenMismatch {
                expected: dimension,
                got: spec.linear.len(),
            });
        }
        Ok(FunctionSpec::BlackBox { dimension, spec })
    }

    /// Parse an expression like `"sqrt(abs(x1)) - x2"` over `ℝⁿ` (variables
    /// `x1…xn`, operators `+ − * ^int`, functions `sqrt sqrtabs abs exp norm`).
    pub fn parse_expr(dimension: usize, text: &str) -> Result<Self, FunctionError> {
        let expr = Expr::parse(text)?;
        Self::try_black_box(dimension, BlackBox::from_expr(expr))
    }

    #[must_use]
    pub fn dimension(&self) -> usize {
        match self {
            FunctionSpec::Poly(p) => p.dimension(),
            FunctionSpec::BlackBox { dimension, .. } => *dimension,
        }
    }

    /// Evaluate; `+∞` means `x` is outside the effective domain.
    #[must_use]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::Poly(p) => p.eval(x),
            FunctionSpec::BlackBox { spec, .. } => {
                let base = match &spec.form {
                    BlackBoxForm::Builtin(b) => b.eval(x),
                    BlackBoxForm::Expr(e) => e.eval(x),
                };
                let v = base + spec.linear_at(x);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }

    /// Whether `x` lies in the effective domain.
    #[must_use]
    pub fn finite_at(&self, x: &[f64]) -> bool {
        self.eval(x).is_finite()
    }

    /// Analytic (or forward-mode) gradient where defined; `None` at kinks,
    /// outside the domain, or on overflow. Callers needing a gradient
    /// everywhere fall back to finite differences.
    #[must_use]
    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut g = match self {
            FunctionSpec::Poly(p) => p.grad(x),
            FunctionSpec::BlackBox { dimension, spec } => {
                let base = match &spec.form {
                    BlackBoxForm::Builtin(b) => b.grad(x, *dimension)?,
                    BlackBoxForm::Expr(e) => e.eval_grad(x, *dimension)?,
                };
                base
            }
        };
        if let FunctionSpec::BlackBox { spec, .. } = self {
            if !spec.linear.is_empty() {
                for (gi, li) in g.iter_mut().zip(&spec.linear) {
                    *gi += li;
                }
            }
        }
        g.iter().all(|v| v.is_finite()).then_some(g)
    }

    /// Convexity at the strongest tier the representation supports.
    /// `user_asserted` upgrades undecidable cases to assertion strength only.
    #[must_use]
    pub fn convexity(&self, user_asserted: bool) -> ConvexityStatus {
        match self {
            FunctionSpec::Poly(p) => certify_convexity(p, user_asserted),
            FunctionSpec::BlackBox { spec, .. } => match &spec.form {
                // A linear shift never changes convexity.
                BlackBoxForm::Builtin(b) => b.convexity(),
                BlackBoxForm::Expr(_) => {
                    if user_asserted {
                        ConvexityStatus::Asserted
                    } else {
                        ConvexityStatus::Unknown
                    }
                }
            },
        }
    }

    /// Halfspace rows of the effective domain (empty = all of `ℝⁿ`). Exact for
    /// polynomials and builtins; expression domains are not tracked (their
    /// values go `+∞` pointwise instead).
    #[must_use]
    pub fn domain_rows(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            FunctionSpec::Poly(_) => Vec::new(),
            FunctionSpec::BlackBox { dimension, spec } => match &spec.form {
                BlackBoxForm::Builtin(b) => b.domain_rows(*dimension),
                BlackBoxForm::Expr(_) => Vec::new(),
            },
        }
    }

    /// Closed-form asymptotic function value at `d`, when the representation
    /// carries one: builtins only. Polynomials are handled by the homogeneous
    /// decomposition in the asymptotics module, expressions by sampling.
    #[must_use]
    pub fn exact_asymptotic(&self, d: &[f64]) -> Option<ExtendedReal> {
        match self {
            FunctionSpec::BlackBox { spec, .. } => {
                if let BlackBoxForm::Builtin(b) = &spec.form {
                    let base = b.asymptotic(d);
                    let shift = spec.linear_at(d);
                    Some(base.add_finite(shift))
                } else {
                    None
                }
            }
            FunctionSpec::Poly(_) => None,
        }
    }

    /// Exact halfspace normals for `{d : f_∞(d) ≤ 0}` when that cone is
    /// polyhedral and the representation is a builtin. (Convex-polynomial
    /// cones are assembled in the asymptotics module.)
    #[must_use]
    pub fn builtin_kappa_normals(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            FunctionSpec::BlackBox { dimension, spec } => {
                if let BlackBoxForm::Builtin(b) = &spec.form {
                    let mut rows = b.kappa_normals(*dimension)?;
                    if !spec.linear.is_empty() && spec.linear.iter().any(|v| *v != 0.0) {
                        rows.push(spec.linear.clone());
                    }
                    Some(rows)
                } else {
                    None
                }
            }
            FunctionSpec::Poly(_) => None,
        }
    }

    /// Exact halfspace normals whose cone is `{d : f_∞(d) = f_∞(−d) = 0}` for
    /// builtin representations (always polyhedral there).
    #[must_use]
    pub fn builtin_constancy_normals(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            FunctionSpec::BlackBox { dimension, spec } => {
                if let BlackBoxForm::Builtin(b) = &spec.form {
                    let mut rows = b.constancy_normals(*dimension);
                    if !spec.linear.is_empty() && spec.linear.iter().any(|v| *v != 0.0) {
                        rows.push(spec.linear.clone());
                        rows.push(spec.linear.iter().map(|v| -v).collect());
                    }
                    Some(rows)
                } else {
                    None
                }
            }
            FunctionSpec::Poly(_) => None,
        }
    }

    /// Sign-faithful surrogate of `f(x) − γ` with a rounding-noise scale.
    ///
    /// For `‖x‖ − x_c` (no linear shift) the excess is computed from squares
    /// of the other coordinates, avoiding the catastrophic cancellation of
    /// `‖x‖ − x_c` near the cone boundary; for `e^{⟨c,x⟩}` with `γ > 0` the
    /// comparison happens in the exponent. Everything else is the naive
    /// difference with a conservative noise bound.
    #[must_use]
    pub fn level_excess(&self, x: &[f64], gamma: f64) -> GapEstimate {
        if let FunctionSpec::BlackBox { spec, .. } = self {
            if spec.linear.iter().all(|v| *v == 0.0) {
                match &spec.form {
                    BlackBoxForm::Builtin(Builtin::NormMinusCoord { coord }) => {
                        let denom = l2_norm(x) + x[*coord] + gamma;
                        if denom > 0.0 {
                            let mut num = -2.0 * gamma * x[*coord] - gamma * gamma;
                            let mut num_scale = (2.0 * gamma * x[*coord]).abs() + gamma * gamma;
                            for (i, xi) in x.iter().enumerate() {
                                if i != *coord {
                                    num += xi * xi;
                                    num_scale += xi * xi;
                                }
                            }
                            return GapEstimate {
                                gap: num / denom,
                                noise: NOISE_FACTOR * (num_scale / denom + 1e-300),
                            };
                        }
                    }
                    BlackBoxForm::Builtin(Builtin::ExpLinear { coeffs }) if gamma > 0.0 => {
                        // sign(e^s − γ) = sign(s − ln γ); the gap is expressed
                        // exactly as γ·expm1(s − ln γ).
                        let s = dot(coeffs, &x[..coeffs.len()]);
                        let shifted = s - gamma.ln();
                        return GapEstimate {
                            gap: gamma * shifted.exp_m1(),
                            noise: NOISE_FACTOR
                                * gamma
                                * shifted.abs().min(1e3)
                                * (1.0 + s.abs() + gamma.ln().abs()),
                        };
                    }
                    _ => {}
                }
            }
        }
        let v = self.eval(x);
        if v.is_infinite() {
            return GapEstimate {
                gap: f64::INFINITY,
                noise: 0.0,
            };
        }
        GapEstimate {
            gap: v - gamma,
            noise: NOISE_FACTOR * (1.0 + v.abs() + gamma.abs() + l2_norm(x)),
        }
    }

    /// Monotone surrogate of `f(x) − f(y)` with a rounding-noise scale: the
    /// sign (within noise) matches the sign of `f(x) − f(y)`, but the
    /// magnitude may be rescaled (for `e^{⟨c,x⟩}` the gap is measured in the
    /// exponent, where it is representable long after the values underflow).
    #[must_use]
    pub fn value_gap(&self, x: &[f64], y: &[f64]) -> GapEstimate {
        if let FunctionSpec::BlackBox { spec, .. } = self {
            if spec.linear.iter().all(|v| *v == 0.0) {
                if let BlackBoxForm::Builtin(Builtin::ExpLinear { coeffs }) = &spec.form {
                    let sx = dot(coeffs, &x[..coeffs.len()]);
                    let sy = dot(coeffs, &y[..coeffs.len()]);
                    return GapEstimate {
                        gap: sx - sy,
                        noise: NOISE_FACTOR * (1.0 + sx.abs() + sy.abs()),
                    };
                }
                if let BlackBoxForm::Builtin(Builtin::NegSqrt { coord }) = &spec.form {
                    let (u, v) = (x[*coord], y[*coord]);
                    if u >= 0.0 && v >= 0.0 {
                        // −√u + √v = (v − u)/(√u + √v): difference of inputs,
                        // no cancellation of the large square roots.
                        let denom = u.sqrt() + v.sqrt();
                        if denom > 0.0 {
                            return GapEstimate {
                                gap: (v - u) / denom,
                                noise: NOISE_FACTOR * (u.abs() + v.abs()) / denom,
                            };
                        }
                    }
                }
            }
        }
        let (vx, vy) = (self.eval(x), self.eval(y));
        if vx.is_infinite() && vy.is_infinite() {
            return GapEstimate {
                gap: 0.0,
                noise: f64::INFINITY,
            };
        }
        if vx.is_infinite() || vy.is_infinite() {
            return GapEstimate {
                gap: if vx.is_infinite() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                noise: 0.0,
            };
        }
        GapEstimate {
            gap: vx - vy,
            noise: NOISE_FACTOR * (1.0 + vx.abs() + vy.abs()),
        }
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::Poly(p) => write!(f, "{p}"),
            FunctionSpec::BlackBox { spec, .. } => {
                match &spec.form {
                    BlackBoxForm::Builtin(b) => match b {
                        Builtin::SqrtAbs { coord } => write!(f, "sqrt|x{}|", coord + 1)?,
                        Builtin::NegSqrt { coord } => write!(f, "-sqrt(x{})", coord + 1)?,
                        Builtin::ExpLinear { coeffs } => {
                            write!(f, "exp(")?;
                            let mut first = true;
                            for (i, c) in coeffs.iter().enumerate() {
                                if *c == 0.0 {
                                    continue;
                                }
                                if !first {
                                    write!(f, " + ")?;
                                }
                                first = false;
                                if *c == 1.0 {
                                    write!(f, "x{}", i + 1)?;
                                } else {
                                    write!(f, "{c}·x{}", i + 1)?;
                                }
                            }
                            if first {
                                write!(f, "0")?;
                            }
                            write!(f, ")")?;
                        }
                        Builtin::NormMinusCoord { coord } => {
                            write!(f, "|x| - x{}", coord + 1)?;
                        }
                        Builtin::ExpNegSqrtProd { coords } => write!(
                            f,
                            "exp(-sqrt(x{}·x{}))",
                            coords[0] + 1,
                            coords[1] + 1
                        )?,
                    },
                    BlackBoxForm::Expr(_) => write!(f, "<expression>")?,
                }
                for (i, l) in spec.linear.iter().enumerate() {
                    if *l != 0.0 {
                        let sign = if *l < 0.0 { "-" } else { "+" };
                        let mag = l.abs();
                        if mag == 1.0 {
                            write!(f, " {sign} x{}", i + 1)?;
                        } else {
                            write!(f, " {sign} {mag}·x{}", i + 1)?;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// A signed quantity together with the rounding-noise scale of its
/// computation. `|gap| ≤ noise` means the sign is numerically indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub gap: f64,
    pub noise: f64,
}

impl GapEstimate {
    /// The gap is reliably positive.
    #[must_use]
    pub fn is_positive(&self) -> bool {
        self.gap > self.noise
    }

    /// The gap is reliably `≤ 0` (within noise on the boundary side).
    #[must_use]
    pub fn is_nonpositive(&self) -> bool {
        self.gap <= self.noise && self.gap.is_finite()
    }

    /// Neither sign can be trusted.
    #[must_use]
    pub fn is_indeterminate(&self) -> bool {
        !self.gap.is_finite() && !self.noise.is_finite() || self.gap.abs() <= self.noise
    }
}

/// An expression tree over `x1…xn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    /// 0-based variable index (`x1` parses to `Var(0)`).
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Integer power `u^k`, `k ≥ 0`.
    Pow(Box<Expr>, u32),
    /// `√u`; `+∞` for `u < 0`.
    Sqrt(Box<Expr>),
    /// `√|u|`.
    SqrtAbs(Box<Expr>),
    Abs(Box<Expr>),
    Exp(Box<Expr>),
    /// `‖(u₁, …, u_k)‖₂`.
    Norm(Vec<Expr>),
}

impl Expr {
    /// Largest variable index appearing in the tree.
    #[must_use]
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(u) | Expr::Pow(u, _) | Expr::Sqrt(u) | Expr::SqrtAbs(u) | Expr::Abs(u)
            | Expr::Exp(u) => u.max_var(),
            Expr::Norm(items) => items.iter().filter_map(Expr::max_var).max(),
        }
    }

    /// Evaluate; `NaN` (e.g. `sqrt` of a negative) is reported as `+∞` by the
    /// enclosing [`FunctionSpec::eval`].
    #[must_use]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => x[*i],
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Neg(u) => -u.eval(x),
            Expr::Pow(u, k) => u.eval(x).powi(*k as i32),
            Expr::Sqrt(u) => {
                let v = u.eval(x);
                if v < 0.0 {
                    f64::INFINITY
                } else {
                    v.sqrt()
                }
            }
            Expr::SqrtAbs(u) => u.eval(x).abs().sqrt(),
            Expr::Abs(u) => u.eval(x).abs(),
            Expr::Exp(u) => u.eval(x).exp(),
            Expr::Norm(items) => items
                .iter()
                .map(|e| {
                    let v = e.eval(x);
                    v * v
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Forward-mode gradient; `None` at kinks (`abs`/`sqrt`/`norm` at zero),
    /// outside domains, or when anything overflows.
    #[must_use]
    pub fn eval_grad(&self, x: &[f64], dimension: usize) -> Option<Vec<f64>> {
        self.eval_dual(x, dimension).map(|(_, g)| g)
    }

    fn eval_dual(&self, x: &[f64], n: usize) -> Option<(f64, Vec<f64>)> {
        let combine = |a: (f64, Vec<f64>), b: (f64, Vec<f64>), f: fn(f64, f64) -> f64,
                       dfa: f64, dfb: f64| {
            let mut g = vec![0.0; a.1.len()];
            for i in 0..g.len() {
                g[i] = dfa * a.1[i] + dfb * b.1[i];
            }
            (f(a.0, b.0), g)
        };
        let out = match self {
            Expr::Var(i) => {
                let mut g = vec![0.0; n];
                g[*i] = 1.0;
                (x[*i], g)
            }
            Expr::Const(c) => (*c, vec![0.0; n]),
            Expr::Add(a, b) => {
                let (a, b) = (a.eval_dual(x, n)?, b.eval_dual(x, n)?);
                combine(a, b, |u, v| u + v, 1.0, 1.0)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.eval_dual(x, n)?, b.eval_dual(x, n)?);
                combine(a, b, |u, v| u - v, 1.0, -1.0)
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.eval_dual(x, n)?, b.eval_dual(x, n)?);
                let (dfa, dfb) = (b.0, a.0);
                combine(a, b, |u, v| u * v, dfa, dfb)
            }
            Expr::Neg(u) => {
                let (v, g) = u.eval_dual(x, n)?;
                (-v, g.iter().map(|w| -w).collect())
            }
            Expr::Pow(u, k) => {
                let (v, g) = u.eval_dual(x, n)?;
                let dv = f64::from(*k) * v.powi(*k as i32 - 1);
                (v.powi(*k as i32), g.iter().map(|w| dv * w).collect())
            }
            Expr::Sqrt(u) => {
                let (v, g) = u.eval_dual(x, n)?;
                if v <= 0.0 {
                    return None;
                }
                let s = v.sqrt();
                (s, g.iter().map(|w| w / (2.0 * s)).collect())
            }
            Expr::SqrtAbs(u) => {
                let (v, g) = u.eval_dual(x, n)?;
                if v == 0.0 {
                    return None;
                }
                let s = v.abs().sqrt();
                let d = v.signum() / (2.0 * s);
                (s, g.iter().map(|w| d * w).collect())
            }
            Expr::Abs(u) => {
                let (v, g) = u.eval_dual(x, n)?;
                if v == 0.0 {
                    return None;
                }
                (v.abs(), g.iter().map(|w| v.signum() * w).collect())
            }
            Expr::Exp(u) => {
                let (v, g) = u.eval_dual(x, n)?;
                let e = v.exp();
                (e, g.iter().map(|w| e * w).collect())
            }
            Expr::Norm(items) => {
                let duals: Option<Vec<(f64, Vec<f64>)>> =
                    items.iter().map(|e| e.eval_dual(x, n)).collect();
                let duals = duals?;
                let r = duals.iter().map(|(v, _)| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    return None;
                }
                let mut g = vec![0.0; n];
                for (v, gv) in &duals {
                    for i in 0..n {
                        g[i] += (v / r) * gv[i];
                    }
                }
                (r, g)
            }
        };
        (out.0.is_finite() && out.1.iter().all(|v| v.is_finite())).then_some(out)
    }

    /// Parse from text. Grammar (whitespace-insensitive):
    ///
    /// ```text
    /// expr   := term (('+' | '-') term)*
    /// term   := factor ('*' factor)*
    /// factor := atom ('^' uint)?
    /// atom   := number | 'x' uint | '-' atom | '(' expr ')'
    ///         | ('sqrt' | 'sqrtabs' | 'abs' | 'exp') '(' expr ')'
    ///         | 'norm' '(' expr (',' expr)* ')'
    /// ```
    pub fn parse(text: &str) -> Result<Self, FunctionError> {
        let mut p = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(expr)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> FunctionError {
        FunctionError::Parse {
            at: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), FunctionError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, FunctionError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, FunctionError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, FunctionError> {
        let atom = self.atom()?;
        if self.eat(b'^') {
            let k = self.uint()?;
            return Ok(Expr::Pow(Box::new(atom), k));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr, FunctionError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_lowercase() => {
                let word = self.word();
                match word.as_str() {
                    "x" => {
                        let idx = self.uint()?;
                        if idx == 0 {
                            return Err(self.error("variables are 1-based: x1, x2, …"));
                        }
                        Ok(Expr::Var(idx as usize - 1))
                    }
                    "sqrt" | "sqrtabs" | "abs" | "exp" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(match word.as_str() {
                            "sqrt" => Expr::Sqrt(Box::new(e)),
                            "sqrtabs" => Expr::SqrtAbs(Box::new(e)),
                            "abs" => Expr::Abs(Box::new(e)),
                            _ => Expr::Exp(Box::new(e)),
                        })
                    }
                    "norm" => {
                        self.expect(b'(')?;
                        let mut items = vec![self.expr()?];
                        while self.eat(b',') {
                            items.push(self.expr()?);
                        }
                        self.expect(b')')?;
                        Ok(Expr::Norm(items))
                    }
                    other => Err(self.error(&format!("unknown function or symbol '{other}'"))),
                }
            }
            _ => Err(self.error("expected a number, variable, or function")),
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        // Take lowercase letters; stop before a digit so `x12` splits into
        // the symbol `x` and the index `12`.
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn uint(&mut self) -> Result<u32, FunctionError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are UTF-8")
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    fn number(&mut self) -> Result<Expr, FunctionError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit()
                || self.bytes[self.pos] == b'.'
                || ((self.bytes[self.pos] == b'e' || self.bytes[self.pos] == b'E')
                    && self.pos > start)
                || ((self.bytes[self.pos] == b'+' || self.bytes[self.pos] == b'-')
                    && self.pos > start
                    && (self.bytes[self.pos - 1] == b'e' || self.bytes[self.pos - 1] == b'E')))
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("number bytes are UTF-8")
            .parse()
            .map(Expr::Const)
            .map_err(|_| self.error("malformed number"))
    }
}
