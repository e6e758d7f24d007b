//! Polyhedra in halfspace form and polyhedral cones in generator form.
//!
//! A [`Polyhedron`] is an intersection of halfspaces `⟨aᵢ, x⟩ ≤ bᵢ` with unit
//! normals. It supports membership tests, worst-row violation, feasible-point
//! search by cyclic projection, and Euclidean projection by Dykstra's
//! alternating-projection scheme.
//!
//! The centerpiece is [`extreme_rays`]: a double description pass that converts
//! a homogeneous row system `{d : ⟨aᵢ, d⟩ ≤ 0}` into a [`GeneratorCone`] — an
//! orthonormal basis of the lineality space `{d : Ad = 0}` together with the
//! extreme rays of the pointed quotient, so that the cone equals
//! `span(lineality) + cone(rays)`. Constraints are processed incrementally:
//! while the lineality space still meets a new constraint, one basis vector is
//! sacrificed to shear the rest into the constraint hyperplane; once the
//! constraint is orthogonal to the lineality space, rays are split by sign and
//! adjacent positive/negative pairs are combined on the boundary. Adjacency is
//! the combinatorial test on active-constraint sets, which keeps the output
//! free of redundant rays.
//!
//! Rays are reported as unit vectors orthogonal to the lineality space and
//! sorted lexicographically, so the representation is canonical and runs are
//! reproducible.

use serde::{Deserialize, Serialize};

/// Absolute sign-classification tolerance for unit normals against unit rays.
pub const SIGN_TOL: f64 = 1e-10;

/// Default membership tolerance for polyhedra and cone rows.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// One halfspace `⟨normal, x⟩ ≤ offset` with `‖normal‖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Errors from polyhedron construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyhedraError {
    #[error("halfspace normal has {got} entries but the ambient dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("halfspace data must be finite")]
    NonFiniteData,
}

/// An intersection of halfspaces `⟨aᵢ, x⟩ ≤ bᵢ` over `ℝⁿ`.
///
/// Rows are normalized to unit normals at construction. A zero normal with
/// `b ≥ 0` is dropped as vacuous; a zero normal with `b < 0` is kept as an
/// infeasibility marker (the polyhedron is empty and `contains` always fails).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    dimension: usize,
    rows: Vec<Halfspace>,
}

impl Polyhedron {
    /// Build from `(a, b)` rows meaning `⟨a, x⟩ ≤ b`.
    pub fn new(dimension: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self, PolyhedraError> {
        let mut out = Vec::with_capacity(rows.len());
        for (a, b) in rows {
            if a.len() != dimension {
                return Err(PolyhedraError::DimensionMismatch {
                    expected: dimension,
                    got: a.len(),
                });
            }
            if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return Err(PolyhedraError::NonFiniteData);
            }
            let norm = l2_norm(a);
            if norm == 0.0 {
                if *b < 0.0 {
                    out.push(Halfspace {
                        normal: a.clone(),
                        offset: *b,
                    });
                }
                continue;
            }
            out.push(Halfspace {
                normal: a.iter().map(|v| v / norm).collect(),
                offset: b / norm,
            });
        }
        Ok(Polyhedron {
            dimension,
            rows: out,
        })
    }

    /// The whole space `ℝⁿ` (no rows).
    #[must_use]
    pub fn full_space(dimension: usize) -> Self {
        Polyhedron {
            dimension,
            rows: Vec::new(),
        }
    }

    /// Axis-aligned box with optional bounds per coordinate.
    pub fn from_box(
        lower: &[Option<f64>],
        upper: &[Option<f64>],
    ) -> Result<Self, PolyhedraError> {
        let dimension = lower.len().max(upper.len());
        let mut rows = Vec::new();
        for (i, lo) in lower.iter().enumerate() {
            if let Some(lo) = lo {
                let mut a = vec![0.0; dimension];
                a[i] = -1.0;
                rows.push((a, -lo));
            }
        }
        for (i, hi) in upper.iter().enumerate() {
            if let Some(hi) = hi {
                let mut a = vec![0.0; dimension];
                a[i] = 1.0;
                rows.push((a, *hi));
            }
        }
        Polyhedron::new(dimension, &rows)
    }

    #[must_use]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[must_use]
    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    /// Worst violation `maxᵢ (⟨aᵢ, x⟩ − bᵢ)₊` (0 inside). Normals are unit, so
    /// this is a Euclidean distance-to-halfspace bound per row.
    #[must_use]
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|h| (dot(&h.normal, x) - h.offset).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Membership within tolerance `tol · max(1, ‖x‖)`.
    #[must_use]
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol * l2_norm(x).max(1.0)
    }

    /// Homogeneous versions of the rows: unit normals of `{d : ⟨aᵢ, d⟩ ≤ 0}`,
    /// the recession cone of a nonempty polyhedron.
    #[must_use]
    pub fn recession_normals(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|h| h.normal.clone()).collect()
    }

    /// Search for a feasible point by cyclically projecting onto violated
    /// halfspaces, starting from the origin. Returns `None` when the sweep cap
    /// is exhausted without reaching `violation ≤ tol` (in particular for
    /// empty polyhedra).
    #[must_use]
    pub fn feasible_point(&self, max_sweeps: usize, tol: f64) -> Option<Vec<f64>> {
        let mut x = vec![0.0; self.dimension];
        if self.rows.iter().any(|h| l2_norm(&h.normal) == 0.0) {
            return None;
        }
        for _ in 0..max_sweeps {
            let mut worst = 0.0_f64;
            for h in &self.rows {
                let excess = dot(&h.normal, &x) - h.offset;
                if excess > 0.0 {
                    for (xi, ai) in x.iter_mut().zip(&h.normal) {
                        *xi -= excess * ai;
                    }
                    worst = worst.max(excess);
                }
            }
            if worst <= tol {
                return Some(x);
            }
        }
        None
    }

    /// Euclidean projection onto the polyhedron by Dykstra's algorithm over
    /// the halfspaces. Converges to the exact projection for nonempty
    /// polyhedra; the sweep cap bounds the work.
    #[must_use]
    pub fn project(&self, x0: &[f64], max_sweeps: usize, tol: f64) -> Vec<f64> {
        if self.rows.is_empty() {
            return x0.to_vec();
        }
        let n = self.dimension;
        let mut x = x0.to_vec();
        let mut corrections = vec![vec![0.0; n]; self.rows.len()];
        for _ in 0..max_sweeps {
            let mut shift = 0.0_f64;
            for (h, corr) in self.rows.iter().zip(corrections.iter_mut()) {
                let mut y = vec![0.0; n];
                for i in 0..n {
                    y[i] = x[i] + corr[i];
                }
                let excess = (dot(&h.normal, &y) - h.offset).max(0.0);
                for i in 0..n {
                    let projected = y[i] - excess * h.normal[i];
                    corr[i] = y[i] - projected;
                    shift = shift.max((projected - x[i]).abs());
                    x[i] = projected;
                }
            }
            if shift <= tol && self.violation(&x) <= tol.max(MEMBERSHIP_TOL) {
                break;
            }
        }
        x
    }
}

/// A polyhedral cone in generator form: `span(lineality) + cone(rays)`.
///
/// `lineality` is an orthonormal basis; `rays` are unit vectors orthogonal to
/// the lineality space (extreme rays of the pointed quotient), sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCone {
    pub dimension: usize,
    pub lineality: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

impl GeneratorCone {
    /// Whether the cone is exactly the origin.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.lineality.is_empty() && self.rays.is_empty()
    }

    /// A deterministic finite generator list covering the cone: the rays plus
    /// both signs of each lineality basis vector.
    #[must_use]
    pub fn generators(&self) -> Vec<Vec<f64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|v| -v).collect());
        }
        out
    }

    /// Sample unit directions in the cone: the plain generators first, then
    /// seeded random conic combinations (nonnegative on rays, signed on the
    /// lineality basis). Returns fewer than `count` only for the zero cone.
    #[must_use]
    pub fn sample_directions(&self, rng: &mut impl rand::Rng, count: usize) -> Vec<Vec<f64>> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(count);
        let gens = self.generators();
        for g in gens.iter().take(count) {
            out.push(g.clone());
        }
        while out.len() < count {
            let mut d = vec![0.0; self.dimension];
            for r in &self.rays {
                let w: f64 = rng.gen_range(0.0..1.0);
                for i in 0..self.dimension {
                    d[i] += w * r[i];
                }
            }
            for l in &self.lineality {
                let w: f64 = rng.gen_range(-1.0..1.0);
                for i in 0..self.dimension {
                    d[i] += w * l[i];
                }
            }
            let norm = l2_norm(&d);
            if norm > 1e-9 {
                out.push(d.iter().map(|v| v / norm).collect());
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct RayRec {
    dir: Vec<f64>,
    active: Vec<bool>,
}

/// Compute the generator form of `{d ∈ ℝⁿ : ⟨aᵢ, d⟩ ≤ 0 for all i}` by the
/// incremental double description method. See the module docs for the scheme.
#[must_use]
pub fn extreme_rays(dimension: usize, normals: &[Vec<f64>]) -> GeneratorCone {
    let rows: Vec<Vec<f64>> = normals
        .iter()
        .filter_map(|a| {
            let norm = l2_norm(a);
            (norm > 0.0).then(|| a.iter().map(|v| v / norm).collect())
        })
        .collect();

    // Start from the whole space: lineality = standard basis, no rays.
    let mut lineality: Vec<Vec<f64>> = (0..dimension)
        .map(|i| {
            let mut e = vec![0.0; dimension];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<RayRec> = Vec::new();

    for (k, a) in rows.iter().enumerate() {
        let lineality_hit = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(a, l)))
            .filter(|(_, v)| v.abs() > SIGN_TOL)
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));

        if let Some((istar, cstar)) = lineality_hit {
            // Shear the remaining lineality basis and all rays into the
            // constraint hyperplane; the sacrificed basis vector survives as
            // the single ray escaping on the feasible side.
            let lstar = lineality.remove(istar);
            for l in &mut lineality {
                let c = dot(a, l) / cstar;
                for i in 0..dimension {
                    l[i] -= c * lstar[i];
                }
            }
            for r in &mut rays {
                let c = dot(a, &r.dir) / cstar;
                for i in 0..dimension {
                    r.dir[i] -= c * lstar[i];
                }
                normalize(&mut r.dir);
                // Now exactly on the new hyperplane.
                r.active.push(true);
            }
            let mut dir: Vec<f64> = if cstar > 0.0 {
                lstar.iter().map(|v| -v).collect()
            } else {
                lstar
            };
            normalize(&mut dir);
            // The escaping ray is interior to every earlier constraint's
            // lineality, hence active on all of them but not on this one.
            let mut active = vec![true; k];
            active.push(false);
            rays.push(RayRec { dir, active });
        } else {
            let values: Vec<f64> = rays.iter().map(|r| dot(a, &r.dir)).collect();
            let mut next: Vec<RayRec> = Vec::new();
            for (r, &v) in rays.iter().zip(&values) {
                if v <= SIGN_TOL {
                    let mut keep = r.clone();
                    keep.active.push(v.abs() <= SIGN_TOL);
                    next.push(keep);
                }
            }
            for (ip, rp) in rays.iter().enumerate() {
                if values[ip] <= SIGN_TOL {
                    continue;
                }
                for (im, rm) in rays.iter().enumerate() {
                    if values[im] >= -SIGN_TOL || !adjacent(&rays, ip, im) {
                        continue;
                    }
                    let mut dir = vec![0.0; dimension];
                    for i in 0..dimension {
                        dir[i] = values[ip] * rm.dir[i] - values[im] * rp.dir[i];
                    }
                    if l2_norm(&dir) < 1e-12 {
                        continue;
                    }
                    normalize(&mut dir);
                    if next
                        .iter()
                        .any(|r| vectors_close(&r.dir, &dir, 1e-9))
                    {
                        continue;
                    }
                    let mut active: Vec<bool> = rp
                        .active
                        .iter()
                        .zip(&rm.active)
                        .map(|(x, y)| *x && *y)
                        .collect();
                    active.push(true);
                    next.push(RayRec { dir, active });
                }
            }
            rays = next;
        }
    }

    // Canonical form: orthonormal lineality, rays projected into its
    // orthogonal complement, renormalized, deduplicated, lex-sorted.
    let lineality = orthonormalize(&lineality);
    let mut out_rays: Vec<Vec<f64>> = Vec::new();
    for r in rays {
        let mut d = r.dir;
        for l in &lineality {
            let c = dot(&d, l);
            for i in 0..dimension {
                d[i] -= c * l[i];
            }
        }
        let norm = l2_norm(&d);
        if norm < 1e-9 {
            continue;
        }
        for v in &mut d {
            *v /= norm;
        }
        if !out_rays.iter().any(|o| vectors_close(o, &d, 1e-8)) {
            out_rays.push(d);
        }
    }
    out_rays.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| !o.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    GeneratorCone {
        dimension,
        lineality,
        rays: out_rays,
    }
}

/// Combinatorial adjacency of rays `ip`, `im`: no third ray's active set
/// contains the intersection of theirs.
fn adjacent(rays: &[RayRec], ip: usize, im: usize) -> bool {
    let meet: Vec<bool> = rays[ip]
        .active
        .iter()
        .zip(&rays[im].active)
        .map(|(a, b)| *a && *b)
        .collect();
    for (i, r) in rays.iter().enumerate() {
        if i == ip || i == im {
            continue;
        }
        if meet.iter().zip(&r.active).all(|(m, a)| !*m || *a) {
            return false;
        }
    }
    true
}

/// Membership of `d` in `{x : ⟨aᵢ, x⟩ ≤ 0}` within `tol · max(1, ‖d‖)` per
/// unit-normalized row.
#[must_use]
pub fn cone_rows_contain(normals: &[Vec<f64>], d: &[f64], tol: f64) -> bool {
    let scale = l2_norm(d).max(1.0);
    normals.iter().all(|a| {
        let norm = l2_norm(a);
        norm == 0.0 || dot(a, d) / norm <= tol * scale
    })
}

/// Orthonormal basis of `{d : ⟨aᵢ, d⟩ = 0 for all i}` via singular value
/// decomposition; singular values below `1e-9 · σ_max` count as zero.
#[must_use]
pub fn nullspace(dimension: usize, normals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows: Vec<&Vec<f64>> = normals.iter().filter(|a| l2_norm(a) > 0.0).collect();
    if rows.is_empty() {
        return (0..dimension)
            .map(|i| {
                let mut e = vec![0.0; dimension];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    // Pad with zero rows so the thin SVD still yields a full n×n V factor
    // (otherwise nullspace directions beyond min(m, n) are silently dropped).
    let padded = rows.len().max(dimension);
    let m = nalgebra::DMatrix::from_fn(padded, dimension, |i, j| {
        if i < rows.len() {
            rows[i][j]
        } else {
            0.0
        }
    });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("SVD with V requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = 1e-9 * sigma_max.max(1e-300);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let mut basis = Vec::new();
    for i in rank..v_t.nrows() {
        basis.push(v_t.row(i).iter().copied().collect::<Vec<f64>>());
    }
    // V^T rows beyond the rank already form an orthonormal nullspace basis;
    // fix signs for a canonical, reproducible output.
    for b in &mut basis {
        if let Some(first) = b.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                for v in b.iter_mut() {
                    *v = -*v;
                }
            }
        }
    }
    basis
}

/// Gram–Schmidt with canonical signs; drops near-dependent vectors.
fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            for i in 0..w.len() {
                w[i] -= c * b[i];
            }
        }
        let norm = l2_norm(&w);
        if norm > 1e-9 {
            for x in &mut w {
                *x /= norm;
            }
            if let Some(first) = w.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    for x in &mut w {
                        *x = -*x;
                    }
                }
            }
            basis.push(w);
        }
    }
    basis
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let norm = l2_norm(a);
    if norm > 0.0 {
        for v in a {
            *v /= norm;
        }
    }
}

fn vectors_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
}
