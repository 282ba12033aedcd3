//! Newton polyhedra at infinity and their face lattices.
//!
//! `Γ(f)` is the convex hull of `supp(f)`; the origin is not adjoined. Every
//! face carries a representative inner normal `q` from the relative interior
//! of its normal cone, the support value `d(q, Γ)`, and exact flags for the
//! Newton boundary and for badness. All of it is decided in exact rational
//! arithmetic, with small linear programs over normal cones where a face's
//! property quantifies over normals.

mod fan;
pub(crate) mod hull;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, Constraint};
use crate::poly::{Exponent, Polynomial, VarSet};
use crate::rational::{self, int, Rational};

pub use fan::{common_normal_candidates, normal_cells, NormalCell};
use hull::{Hull, HullFace};

/// Inner facet inequality `⟨normal, κ⟩ ≥ offset`, tight on the facet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    #[serde(with = "rational::serde_rational::vec")]
    pub normal: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub offset: Rational,
}

/// A closed face `Δ` of a Newton polyhedron.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Face {
    pub id: usize,
    pub dim: usize,
    /// Indices into [`NewtonPolyhedron::vertices`].
    pub vertex_ids: Vec<usize>,
    /// `Δ ∩ supp(f)`, sorted.
    pub lattice_points: Vec<Exponent>,
    /// Indices of the facets containing this face (empty for the polyhedron itself).
    pub facet_ids: Vec<usize>,
    /// A normal in the relative interior of the normal cone. `None` only for a
    /// full-dimensional polyhedron viewed as its own face, whose normal cone is `{0}`.
    #[serde(with = "rational::serde_rational::opt_vec")]
    pub rep_normal: Option<Vec<Rational>>,
    #[serde(with = "rational::serde_rational::opt")]
    pub d_value: Option<Rational>,
    pub in_newton_boundary: bool,
    /// A relative-interior normal with negative support value, when in the Newton boundary.
    #[serde(with = "rational::serde_rational::opt_vec")]
    pub boundary_witness: Option<Vec<Rational>>,
    pub span_contains_origin: bool,
    pub is_bad: bool,
    /// Mixed-sign `q` vanishing on the face and positive on every other vertex.
    #[serde(with = "rational::serde_rational::opt_vec")]
    pub bad_witness: Option<Vec<Rational>>,
}

impl Face {
    /// Smallest `J` with `Δ ⊂ ℝ^J`.
    pub fn support_vars(&self) -> VarSet {
        self.lattice_points.iter().fold(VarSet::empty(), |acc, k| acc.union(k.support()))
    }

    pub fn is_vertex(&self) -> bool {
        self.dim == 0
    }
}

/// `Γ(f)` with its full face lattice.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonPolyhedron {
    pub n: usize,
    /// Dimension of the affine span of the support.
    pub dim: usize,
    pub vertices: Vec<Exponent>,
    pub facets: Vec<Facet>,
    /// Sorted by dimension, then by vertex ids; the last face is the polyhedron itself.
    pub faces: Vec<Face>,
    pub support_points: Vec<Exponent>,
    /// Basis of the normal directions orthogonal to the affine span.
    #[serde(skip)]
    pub lineality: Vec<Vec<Rational>>,
    #[serde(skip)]
    hull: Hull,
}

/// `Γ(p)`. Fails on the zero polynomial.
pub fn newton_polyhedron(p: &Polynomial) -> Result<NewtonPolyhedron> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(NewtonPolyhedron::from_points(p.nvars(), &p.support()))
}

/// Whether `Γ(p)` meets every coordinate axis away from the origin.
pub fn is_convenient(p: &Polynomial) -> bool {
    let n = p.nvars();
    let support = p.support();
    (0..n).all(|j| support.iter().any(|k| k[j] > 0 && k.support() == VarSet::from_indices([j])))
}

/// Checks `Γ(p) ∩ ℝ^J = Γ(p|ℝ^J)` by comparing vertex sets exactly.
pub fn restrict_polyhedron_check(p: &Polynomial, set: VarSet) -> Result<bool> {
    let restricted = p.restrict(set)?;
    if restricted.is_constant() {
        return Err(Error::Precondition("restriction to the coordinate subspace is constant".into()));
    }
    let gamma = newton_polyhedron(p)?;
    let gamma_j = newton_polyhedron(&restricted)?;
    // Γ ∩ ℝ^J is the face minimizing the indicator of the coordinates outside J,
    // provided it meets ℝ^J at all (it does: the restriction has a nonzero term).
    let n = p.nvars();
    let q: Vec<Rational> = (0..n).map(|j| if set.contains(j) { int(0) } else { int(1) }).collect();
    let lhs: Vec<Exponent> = if rational::is_zero_vec(&q) {
        gamma.vertices.clone()
    } else {
        if gamma.support_value(&q)? != int(0) {
            return Ok(false);
        }
        let face = gamma.face_of(&q)?;
        face.vertex_ids.iter().map(|&v| gamma.vertices[v].clone()).collect()
    };
    Ok(lhs == gamma_j.vertices)
}

/// Relative-interior description of the normal cone of a face, scaled so that
/// every vertex off the face sits at least 1 above the face.
fn cone_constraints(h: &Hull, face: &HullFace) -> Vec<Constraint> {
    let pts: Vec<Vec<Rational>> = h.vertices.iter().map(|&v| h.points[v].as_rationals()).collect();
    let in_face: Vec<bool> = h.vertices.iter().map(|v| face.vertex_ids.contains(v)).collect();
    let base_idx = in_face.iter().position(|&b| b).expect("faces are nonempty");
    let base = &pts[base_idx];
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if i == base_idx {
            continue;
        }
        let diff: Vec<Rational> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        if in_face[i] {
            out.push(Constraint::eq(diff, int(0)));
        } else {
            out.push(Constraint::ge(diff, int(1)));
        }
    }
    out
}

/// Sum of the primitive normals of the facets through `face`; a lineality
/// direction for a lower-dimensional polytope seen as its own face.
fn rep_normal(h: &Hull, face: &HullFace) -> Option<Vec<Rational>> {
    if face.facet_ids.is_empty() {
        return h.lineality.first().cloned();
    }
    let mut sum = vec![Rational::zero(); h.n];
    for &f in &face.facet_ids {
        for (s, a) in sum.iter_mut().zip(&h.facets[f].normal) {
            *s += a;
        }
    }
    Some(rational::primitive(&sum))
}

impl NewtonPolyhedron {
    /// Hull of arbitrary nonnegative integer points in `ℝⁿ`.
    pub fn from_points(n: usize, points: &[Exponent]) -> NewtonPolyhedron {
        let h = hull::hull(n, points);
        let vertices: Vec<Exponent> = h.vertices.iter().map(|&v| h.points[v].clone()).collect();
        let facets: Vec<Facet> =
            h.facets.iter().map(|f| Facet { normal: f.normal.clone(), offset: f.offset.clone() }).collect();
        let faces: Vec<Face> = h
            .faces
            .iter()
            .enumerate()
            .map(|(id, hf)| Self::build_face(&h, id, hf))
            .collect();
        NewtonPolyhedron {
            n,
            dim: h.dim,
            vertices,
            facets,
            faces,
            support_points: h.points.clone(),
            lineality: h.lineality.clone(),
            hull: h,
        }
    }

    fn build_face(h: &Hull, id: usize, hf: &HullFace) -> Face {
        let vertex_ids: Vec<usize> =
            hf.vertex_ids.iter().map(|v| h.vertices.iter().position(|w| w == v).expect("vertex")).collect();
        let lattice_points: Vec<Exponent> = hf.point_ids.iter().map(|&i| h.points[i].clone()).collect();
        let rep = rep_normal(h, hf);
        let d_value = rep.as_ref().map(|q| min_dot(q, &h.points));
        let cone = cone_constraints(h, hf);
        let base: Vec<Rational> = h.points[hf.vertex_ids[0]].as_rationals();

        let mut boundary = cone.clone();
        boundary.push(Constraint::le(base.clone(), int(-1)));
        let boundary_witness = lp::feasible_point(h.n, &boundary);

        let vpts: Vec<Vec<Rational>> = hf.vertex_ids.iter().map(|&v| h.points[v].as_rationals()).collect();
        let span_contains_origin = hull::affine_span_contains_origin(&vpts);
        // The origin alone is never bad: a bad face must leave the coordinate origin.
        let origin_only = lattice_points.len() == 1 && lattice_points[0].is_zero();
        let bad_witness =
            if span_contains_origin && !origin_only { bad_normal(h.n, &cone, &base) } else { None };

        Face {
            id,
            dim: hf.dim,
            vertex_ids,
            lattice_points,
            facet_ids: hf.facet_ids.clone(),
            rep_normal: rep,
            d_value,
            in_newton_boundary: boundary_witness.is_some(),
            boundary_witness,
            span_contains_origin,
            is_bad: bad_witness.is_some(),
            bad_witness,
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// `d(q, Γ) = min ⟨q, κ⟩`.
    pub fn support_value(&self, q: &[Rational]) -> Result<Rational> {
        self.check_normal(q)?;
        Ok(min_dot(q, &self.vertices))
    }

    /// `Δ(q, Γ)` as a face of the lattice.
    pub fn face_of(&self, q: &[Rational]) -> Result<&Face> {
        self.check_normal(q)?;
        let values: Vec<Rational> = self.support_points.iter().map(|k| rational::dot_u32(q, &k.0)).collect();
        let d = values.iter().min().expect("nonempty support").clone();
        let argmin: Vec<Exponent> =
            self.support_points.iter().zip(&values).filter(|(_, v)| **v == d).map(|(k, _)| k.clone()).collect();
        self.faces
            .iter()
            .find(|f| f.lattice_points == argmin)
            .ok_or_else(|| Error::Inconsistent("argmin set is not a face of the lattice".into()))
    }

    /// Faces of `Γ∞`: realizable as `Δ(q, Γ)` with `d(q, Γ) < 0`.
    pub fn newton_boundary(&self) -> Vec<&Face> {
        self.faces.iter().filter(|f| f.in_newton_boundary).collect()
    }

    pub fn bad_faces(&self) -> Vec<&Face> {
        self.faces.iter().filter(|f| f.is_bad).collect()
    }

    /// The face spanned by everything.
    pub fn full_face(&self) -> &Face {
        self.faces.last().expect("at least one face")
    }

    /// Constraints on `q ∈ ℝⁿ` cutting out the relative interior of the normal
    /// cone of `face` (up to positive scaling).
    pub fn cone_constraints(&self, face: &Face) -> Vec<Constraint> {
        cone_constraints(&self.hull, &self.hull.faces[face.id])
    }

    fn check_normal(&self, q: &[Rational]) -> Result<()> {
        if q.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: q.len() });
        }
        if rational::is_zero_vec(q) {
            return Err(Error::ZeroNormal);
        }
        Ok(())
    }
}

fn min_dot(q: &[Rational], pts: &[Exponent]) -> Rational {
    pts.iter().map(|k| rational::dot_u32(q, &k.0)).min().expect("nonempty point set")
}

/// A mixed-sign `q` in the normal cone interior with `⟨q, ·⟩ = 0` on the face.
fn bad_normal(n: usize, cone: &[Constraint], base: &[Rational]) -> Option<Vec<Rational>> {
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut cons = cone.to_vec();
            cons.push(Constraint::eq(base.to_vec(), int(0)));
            let mut ei = vec![int(0); n];
            ei[i] = int(1);
            cons.push(Constraint::ge(ei, int(1)));
            let mut ej = vec![int(0); n];
            ej[j] = int(1);
            cons.push(Constraint::le(ej, int(-1)));
            if let Some(q) = lp::feasible_point(n, &cons) {
                return Some(rational::primitive(&q));
            }
        }
    }
    None
}

/// Whether `q` certifies `face` as bad: zero on the face, positive on the other
/// vertices, mixed signs. Exact.
pub fn verify_bad_witness(gamma: &NewtonPolyhedron, face: &Face, q: &[Rational]) -> bool {
    let mixed = q.iter().any(Signed::is_positive) && q.iter().any(Signed::is_negative);
    mixed
        && gamma.vertices.iter().enumerate().all(|(i, v)| {
            let val = rational::dot_u32(q, &v.0);
            if face.vertex_ids.contains(&i) {
                val.is_zero()
            } else {
                val.is_positive()
            }
        })
}
