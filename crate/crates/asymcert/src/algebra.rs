//! Sparse multivariate polynomial arithmetic.
//!
//! A [`Polynomial`] is a sparse sum of monomials `c · x₁^{e₁} ⋯ xₙ^{eₙ}` over a
//! fixed dimension `n`, stored with exponent vectors as keys in lexicographic
//! order so that iteration, serialization, and hashing are deterministic.
//!
//! Beyond evaluation and gradients, this module provides the two decompositions
//! the asymptotic analysis is built on:
//!
//! - [`homogeneous_decompose`]: `h = φ₀ + φ₁ + ⋯ + φ_p` with `φ_i` homogeneous
//!   of degree `i` (group terms by total degree);
//! - [`leading_order`]: for a direction `d`, the maximal order `μ(d) = max { i ≥ 1 :
//!   φ_i(d) ≠ 0 }`, the quantity that decides whether `h(t·d)/t` diverges and
//!   with which sign.
//!
//! [`certify_convexity`] settles convexity exactly for degree ≤ 2 (constant
//! Hessian, eigenvalue check) and otherwise only records a caller assertion:
//! deciding convexity of higher-degree polynomials is out of scope.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative tolerance for deciding that a homogeneous part vanishes at a
/// direction: `|φ_i(d)| ≤ REL_ZERO_TOL · ‖coeffs(φ_i)‖₁ · max(1, ‖d‖_∞)^i`.
pub const REL_ZERO_TOL: f64 = 1e-9;

/// Relative eigenvalue tolerance for the positive-semidefiniteness check in
/// [`certify_convexity`]: the Hessian passes when its minimal eigenvalue is
/// `≥ −PSD_EIG_TOL · scale` with `scale` the largest absolute Hessian entry.
pub const PSD_EIG_TOL: f64 = 1e-9;

/// A single monomial `coefficient · Π xᵢ^{exponents[i]}`. The coefficient is
/// nonzero by construction; zero terms are dropped when a [`Polynomial`] is
/// assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    /// Total degree `Σ exponents[i]`.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// A sparse polynomial over `ℝⁿ` with terms keyed by exponent vector in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialRepr", into = "PolynomialRepr")]
pub struct Polynomial {
    dimension: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

/// Wire form of [`Polynomial`]: a term list, so JSON keys stay strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolynomialRepr {
    dimension: usize,
    terms: Vec<Monomial>,
}

impl From<Polynomial> for PolynomialRepr {
    fn from(p: Polynomial) -> Self {
        PolynomialRepr {
            dimension: p.dimension,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coefficient)| Monomial {
                    coefficient,
                    exponents,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialRepr> for Polynomial {
    type Error = AlgebraError;

    fn try_from(repr: PolynomialRepr) -> Result<Self, AlgebraError> {
        Polynomial::from_monomials(repr.dimension, repr.terms)
    }
}

/// Errors from polynomial construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("monomial has {got} exponents but the polynomial dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("monomial coefficient must be finite, got {0}")]
    NonFiniteCoefficient(String),
}

impl Polynomial {
    /// The zero polynomial over `ℝⁿ`.
    #[must_use]
    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(coefficient, exponents)` pairs; duplicate exponent vectors
    /// are summed and exact-zero coefficients dropped.
    pub fn from_terms(
        dimension: usize,
        terms: &[(f64, Vec<u32>)],
    ) -> Result<Self, AlgebraError> {
        Self::from_monomials(
            dimension,
            terms.iter().map(|(c, e)| Monomial {
                coefficient: *c,
                exponents: e.clone(),
            }),
        )
    }

    /// Build from monomials; duplicate exponent vectors are summed and
    /// exact-zero coefficients dropped.
    pub fn from_monomials(
        dimension: usize,
        monomials: impl IntoIterator<Item = Monomial>,
    ) -> Result<Self, AlgebraError> {
        let mut terms: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for m in monomials {
            if m.exponents.len() != dimension {
                return Err(AlgebraError::DimensionMismatch {
                    expected: dimension,
                    got: m.exponents.len(),
                });
            }
            if !m.coefficient.is_finite() {
                return Err(AlgebraError::NonFiniteCoefficient(m.coefficient.to_string()));
            }
            *terms.entry(m.exponents).or_insert(0.0) += m.coefficient;
        }
        terms.retain(|_, c| *c != 0.0);
        Ok(Polynomial { dimension, terms })
    }

    /// Number of variables.
    #[must_use]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Total degree: maximum term degree, and 0 for the zero polynomial.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// `true` when no terms remain.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    /// `‖coeffs‖₁`, the scale used by relative zero tests.
    #[must_use]
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Evaluate at `x` (`x.len()` must equal the dimension).
    #[must_use]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut term = *c;
            for (xi, &e) in x.iter().zip(exps.iter()) {
                if e > 0 {
                    term *= xi.powi(e as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Gradient at `x`.
    #[must_use]
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dimension);
        let mut g = vec![0.0; self.dimension];
        for (exps, c) in &self.terms {
            for j in 0..self.dimension {
                let ej = exps[j];
                if ej == 0 {
                    continue;
                }
                let mut term = *c * f64::from(ej);
                for (i, (xi, &e)) in x.iter().zip(exps.iter()).enumerate() {
                    let p = if i == j { e - 1 } else { e };
                    if p > 0 {
                        term *= xi.powi(p as i32);
                    }
                }
                g[j] += term;
            }
        }
        g
    }

    /// The constant part `φ₀` (coefficient of the all-zero exponent vector).
    #[must_use]
    pub fn constant_part(&self) -> f64 {
        self.terms
            .get(&vec![0u32; self.dimension])
            .copied()
            .unwrap_or(0.0)
    }

    /// Coefficient vector `b` of the linear part `φ₁(x) = ⟨b, x⟩`.
    #[must_use]
    pub fn linear_coeffs(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.dimension];
        for (exps, c) in &self.terms {
            if exps.iter().sum::<u32>() == 1 {
                let j = exps.iter().position(|&e| e == 1).expect("degree-1 term");
                b[j] = *c;
            }
        }
        b
    }

    /// Symmetric matrix `Q` with `φ₂(x) = xᵀQx` (quadratic part only; terms of
    /// other degrees are ignored). Entries are row-major `n × n`.
    #[must_use]
    pub fn quadratic_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dimension;
        let mut q = vec![vec![0.0; n]; n];
        for (exps, c) in &self.terms {
            if exps.iter().sum::<u32>() != 2 {
                continue;
            }
            if let Some(i) = exps.iter().position(|&e| e == 2) {
                q[i][i] += *c;
            } else {
                let mut idx = exps.iter().enumerate().filter(|(_, &e)| e == 1);
                let (i, _) = idx.next().expect("two unit exponents");
                let (j, _) = idx.next().expect("two unit exponents");
                q[i][j] += *c / 2.0;
                q[j][i] += *c / 2.0;
            }
        }
        q
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if first {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let has_vars = exps.iter().any(|&e| e > 0);
            if mag != 1.0 || !has_vars {
                write!(f, "{mag}")?;
                if has_vars {
                    write!(f, "·")?;
                }
            }
            let mut first_var = true;
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "·")?;
                }
                first_var = false;
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// One homogeneous component `φ_order` of a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPart {
    pub order: u32,
    pub part: Polynomial,
}

/// Split `h` into homogeneous parts `φ₀, …, φ_p` (one entry per order up to
/// `h.degree()`, zero parts included) with `h = Σ φ_i` exactly: the split just
/// regroups terms by total degree, so reconstruction is termwise exact.
#[must_use]
pub fn homogeneous_decompose(h: &Polynomial) -> Vec<HomogeneousPart> {
    let p = h.degree();
    let mut parts: Vec<HomogeneousPart> = (0..=p)
        .map(|order| HomogeneousPart {
            order,
            part: Polynomial::zero(h.dimension()),
        })
        .collect();
    for (exps, c) in h.terms() {
        let order: u32 = exps.iter().sum();
        parts[order as usize]
            .part
            .terms
            .insert(exps.clone(), c);
    }
    parts
}

/// The leading order of `h` at direction `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingOrder {
    /// `μ(d) = max { i ≥ 1 : φ_i(d) ≠ 0 }`, or `None` when every part of
    /// positive order vanishes at `d` (in particular at `d = 0`).
    pub order: Option<u32>,
    /// `φ_{μ(d)}(d)` when `order` is set, else 0.
    pub value: f64,
}

/// Compute `μ(d)` with the relative vanishing test
/// `|φ_i(d)| ≤ REL_ZERO_TOL · ‖coeffs(φ_i)‖₁ · max(1, ‖d‖_∞)^i`,
/// which makes the answer invariant under positive rescaling of `d` up to the
/// tolerance itself.
#[must_use]
pub fn leading_order(h: &Polynomial, d: &[f64]) -> LeadingOrder {
    let parts = homogeneous_decompose(h);
    let d_inf = d.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for part in parts.iter().rev() {
        if part.order == 0 {
            break;
        }
        let v = part.part.eval(d);
        let tol = REL_ZERO_TOL * part.part.coeff_l1() * d_inf.powi(part.order as i32);
        if v.abs() > tol {
            return LeadingOrder {
                order: Some(part.order),
                value: v,
            };
        }
    }
    LeadingOrder {
        order: None,
        value: 0.0,
    }
}

/// Outcome of a convexity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexityStatus {
    /// Degree ≤ 2 and the Hessian is positive semidefinite within tolerance.
    ProvenConvex,
    /// Degree ≤ 2 and the Hessian has an eigenvalue below `−tol`.
    NotConvex,
    /// Degree ≥ 3 and the caller asserted convexity; taken on faith.
    Asserted,
    /// Degree ≥ 3 with no assertion: undecided (deciding convexity of general
    /// polynomials is out of scope).
    Unknown,
}

impl ConvexityStatus {
    /// Whether the status allows treating the function as convex (possibly at
    /// assertion strength).
    #[must_use]
    pub fn is_convex_usable(self) -> bool {
        matches!(self, ConvexityStatus::ProvenConvex | ConvexityStatus::Asserted)
    }
}

/// Decide convexity of a polynomial. For degree ≤ 2 the Hessian is the
/// constant matrix `2Q`, so convexity reduces to an exact PSD eigenvalue test;
/// for degree ≥ 3 the answer is the caller's assertion or `Unknown`.
#[must_use]
pub fn certify_convexity(h: &Polynomial, user_asserted: bool) -> ConvexityStatus {
    if h.degree() <= 1 {
        return ConvexityStatus::ProvenConvex;
    }
    if h.degree() == 2 {
        let q = h.quadratic_matrix();
        let n = h.dimension();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut scale = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = q[i][j];
                scale = scale.max(q[i][j].abs());
            }
        }
        if scale == 0.0 {
            return ConvexityStatus::ProvenConvex;
        }
        let eigs = m.symmetric_eigenvalues();
        let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        return if min_eig >= -PSD_EIG_TOL * scale {
            ConvexityStatus::ProvenConvex
        } else {
            ConvexityStatus::NotConvex
        };
    }
    if user_asserted {
        ConvexityStatus::Asserted
    } else {
        ConvexityStatus::Unknown
    }
}
