//! Common refinement of normal fans, via the Minkowski sum.

use super::hull::{self, Hull};
use super::{cone_constraints, rep_normal, NewtonPolyhedron};
use crate::lp::Constraint;
use crate::poly::Exponent;
use crate::rational::Rational;

/// One open cell of the common refinement of several normal fans.
#[derive(Debug, Clone)]
pub struct NormalCell {
    /// A representative in the relative interior.
    pub rep: Vec<Rational>,
    /// Linear description of the relative interior, up to positive scaling.
    pub constraints: Vec<Constraint>,
    /// `Δ(q, Γ_i)` for each input polyhedron, as face ids.
    pub faces: Vec<usize>,
    /// The cell is the lineality space of a lower-dimensional sum (minus the origin).
    pub lineality_cell: bool,
}

fn minkowski_sum(polys: &[&NewtonPolyhedron]) -> Hull {
    let n = polys[0].n;
    let mut acc: Vec<Exponent> = polys[0].vertices.clone();
    for p in &polys[1..] {
        let mut sums = Vec::with_capacity(acc.len() * p.vertices.len());
        for a in &acc {
            for b in &p.vertices {
                sums.push(Exponent(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()));
            }
        }
        let h = hull::hull(n, &sums);
        acc = h.vertices.iter().map(|&v| h.points[v].clone()).collect();
    }
    hull::hull(n, &acc)
}

/// Cells of the common refinement of the normal fans of `polys`, excluding
/// the zero cone. The Minkowski sum's fan is exactly that refinement.
pub fn normal_cells(polys: &[&NewtonPolyhedron]) -> Vec<NormalCell> {
    if polys.is_empty() {
        return Vec::new();
    }
    let h = minkowski_sum(polys);
    let mut out = Vec::new();
    for face in &h.faces {
        let Some(rep) = rep_normal(&h, face) else { continue };
        let faces = polys.iter().map(|p| p.face_of(&rep).expect("nonzero normal").id).collect();
        out.push(NormalCell {
            constraints: cone_constraints(&h, face),
            faces,
            lineality_cell: face.facet_ids.is_empty(),
            rep,
        });
    }
    out
}

/// Nonzero normals meeting every cell of the common refinement; a
/// lineality cell contributes both signs of each basis direction.
pub fn common_normal_candidates(polys: &[&NewtonPolyhedron]) -> Vec<Vec<Rational>> {
    if polys.is_empty() {
        return Vec::new();
    }
    let h = minkowski_sum(polys);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for face in &h.faces {
        let reps: Vec<Vec<Rational>> = if face.facet_ids.is_empty() {
            h.lineality.iter().flat_map(|l| [l.clone(), l.iter().map(|x| -x).collect()]).collect()
        } else {
            rep_normal(&h, face).into_iter().collect()
        };
        for r in reps {
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}
