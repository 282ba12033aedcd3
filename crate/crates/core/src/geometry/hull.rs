//! Exact convex hulls of integer point sets in any (small) dimension.
//!
//! The hull is computed inside the affine span of the input, so segments and
//! isolated points in `ℝⁿ` are handled like any other polytope. Facets come
//! from a double-description pass over the cone of valid inequalities; the
//! face lattice is the intersection closure of the facets.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::poly::Exponent;
use crate::rational::{self, Rational};

/// Relative facet `⟨normal, κ⟩ ≥ offset`, written with an ambient normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFacet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

#[derive(Debug, Clone)]
pub struct HullFace {
    pub vertex_ids: Vec<usize>,
    pub facet_ids: Vec<usize>,
    pub point_ids: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub n: usize,
    pub dim: usize,
    /// Deduplicated input points in lexicographic order.
    pub points: Vec<Exponent>,
    /// Indices into `points`.
    pub vertices: Vec<usize>,
    pub facets: Vec<HullFacet>,
    /// Basis of the directions orthogonal to the affine span.
    pub lineality: Vec<Vec<Rational>>,
    /// Sorted by dimension, then by vertex ids; the last entry is the polytope itself.
    pub faces: Vec<HullFace>,
}

/// Row-reduces `rows` in place; returns the pivot columns.
pub(crate) fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub(crate) fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Dimension of the affine span of `pts` (`0` for a single point).
pub(crate) fn affine_dim(pts: &[Vec<Rational>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rational>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    rank(&diffs)
}

/// Whether the origin lies in the affine span of `pts`.
pub(crate) fn affine_span_contains_origin(pts: &[Vec<Rational>]) -> bool {
    let Some(base) = pts.first() else { return false };
    let diffs: Vec<Vec<Rational>> = pts[1..].iter().map(|p| sub(p, base)).collect();
    let mut with_base = diffs.clone();
    with_base.push(base.clone());
    rank(&diffs) == rank(&with_base)
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    rational::dot(a, b)
}

/// Affine span data: pivot coordinates that parametrize the span and the orthogonal directions.
fn span_data(pts: &[Vec<Rational>], n: usize) -> (Vec<usize>, Vec<Vec<Rational>>) {
    let mut diffs: Vec<Vec<Rational>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    if diffs.is_empty() {
        diffs.push(vec![Rational::zero(); n]);
    }
    let pivots = rref(&mut diffs);
    let mut lineality = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut q = vec![Rational::zero(); n];
        q[f] = rational::int(1);
        for (r, &pc) in pivots.iter().enumerate() {
            q[pc] = -diffs[r][f].clone();
        }
        lineality.push(rational::primitive(&q));
    }
    (pivots, lineality)
}

/// Extreme rays of `{y : A y ≥ 0}` for a full-column-rank `A`, by double description.
fn extreme_rays(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = a[0].len();
    // initial basis of d independent rows
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_rows: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut trial = chosen_rows.clone();
        trial.push(row.clone());
        if rank(&trial) > chosen_rows.len() {
            chosen.push(i);
            chosen_rows.push(row.clone());
            if chosen.len() == d {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), d, "constraint matrix must have full column rank");
    // rays are columns of the inverse of the chosen submatrix
    let mut aug: Vec<Vec<Rational>> = chosen_rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..d).map(|j| if i == j { rational::int(1) } else { Rational::zero() }));
            row
        })
        .collect();
    rref(&mut aug);
    let mut rays: Vec<Vec<Rational>> =
        (0..d).map(|j| rational::primitive(&(0..d).map(|i| aug[i][d + j].clone()).collect::<Vec<_>>())).collect();

    let mut processed: Vec<usize> = chosen.clone();
    for (i, row) in a.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| dot(row, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            processed.push(i);
            continue;
        }
        let zero_sets: Vec<BTreeSet<usize>> = rays
            .iter()
            .map(|r| processed.iter().copied().filter(|&k| dot(&a[k], r).is_zero()).collect())
            .collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Vec<Rational>> = (0..rays.len()).filter(|&k| !vals[k].is_negative()).map(|k| rays[k].clone()).collect();
        for &p in &pos {
            for &m in &neg {
                let common: BTreeSet<usize> = zero_sets[p].intersection(&zero_sets[m]).copied().collect();
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != m)
                    .all(|k| !common.is_subset(&zero_sets[k]));
                if !adjacent {
                    continue;
                }
                let new: Vec<Rational> = rays[m]
                    .iter()
                    .zip(&rays[p])
                    .map(|(rm, rp)| &vals[p] * rm - &vals[m] * rp)
                    .collect();
                next.push(rational::primitive(&new));
            }
        }
        rays = next;
        processed.push(i);
    }
    rays.sort();
    rays.dedup();
    rays
}

/// Convex hull of `points` (integer vectors of length `n`). Panics on empty input.
pub fn hull(n: usize, points: &[Exponent]) -> Hull {
    assert!(!points.is_empty(), "hull of an empty point set");
    let mut pts: Vec<Exponent> = points.to_vec();
    pts.sort();
    pts.dedup();
    let rpts: Vec<Vec<Rational>> = pts.iter().map(Exponent::as_rationals).collect();
    let (pivots, lineality) = span_data(&rpts, n);
    let k = pivots.len();

    if k == 0 {
        let face = HullFace { vertex_ids: vec![0], facet_ids: vec![], point_ids: vec![0], dim: 0 };
        return Hull { n, dim: 0, points: pts, vertices: vec![0], facets: vec![], lineality, faces: vec![face] };
    }

    // project onto the pivot coordinates and homogenize: rows (π(p), -1)
    let rows: Vec<Vec<Rational>> = rpts
        .iter()
        .map(|p| {
            let mut r: Vec<Rational> = pivots.iter().map(|&c| p[c].clone()).collect();
            r.push(rational::int(-1));
            r
        })
        .collect();
    let mut facets: Vec<HullFacet> = extreme_rays(&rows)
        .into_iter()
        .filter(|r| !r[..k].iter().all(Zero::is_zero))
        .map(|r| {
            let mut normal = vec![Rational::zero(); n];
            for (&c, a) in pivots.iter().zip(&r[..k]) {
                normal[c] = a.clone();
            }
            HullFacet { normal, offset: r[k].clone() }
        })
        .collect();
    facets.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.offset.cmp(&b.offset)));

    let incidence: Vec<BTreeSet<usize>> = rpts
        .iter()
        .map(|p| (0..facets.len()).filter(|&f| dot(&facets[f].normal, p) == facets[f].offset).collect())
        .collect();
    let vertices: Vec<usize> = (0..pts.len())
        .filter(|&i| (0..pts.len()).all(|j| j == i || !incidence[i].is_subset(&incidence[j])))
        .collect();

    // face lattice as vertex sets, closed under intersection with facets
    let facet_vertex_sets: Vec<Vec<usize>> =
        (0..facets.len()).map(|f| vertices.iter().copied().filter(|&v| incidence[v].contains(&f)).collect()).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    for vs in &facet_vertex_sets {
        if seen.insert(vs.clone()) {
            queue.push_back(vs.clone());
        }
    }
    while let Some(face) = queue.pop_front() {
        for fvs in &facet_vertex_sets {
            let inter: Vec<usize> = face.iter().copied().filter(|v| fvs.contains(v)).collect();
            if !inter.is_empty() && seen.insert(inter.clone()) {
                queue.push_back(inter);
            }
        }
    }
    seen.insert(vertices.clone());

    let mut faces: Vec<HullFace> = seen
        .into_iter()
        .map(|vs| {
            let facet_ids: Vec<usize> =
                (0..facets.len()).filter(|&f| vs.iter().all(|v| facet_vertex_sets[f].contains(v))).collect();
            let point_ids: Vec<usize> = (0..pts.len())
                .filter(|&p| facet_ids.iter().all(|f| incidence[p].contains(f)))
                .collect();
            let vpts: Vec<Vec<Rational>> = vs.iter().map(|&v| rpts[v].clone()).collect();
            HullFace { dim: affine_dim(&vpts), vertex_ids: vs, facet_ids, point_ids }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertex_ids.cmp(&b.vertex_ids)));

    // primitive integer normals; offsets rescaled with them
    for f in facets.iter_mut() {
        let mut v = f.normal.clone();
        v.push(f.offset.clone());
        let p = rational::primitive(&v);
        f.offset = p[n].clone();
        f.normal = p[..n].to_vec();
    }

    Hull { n, dim: k, points: pts, vertices, facets, lineality, faces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn pts(v: &[&[u32]]) -> Vec<Exponent> {
        v.iter().map(|p| Exponent(p.to_vec())).collect()
    }

    #[test]
    fn triangle_with_interior_and_edge_points() {
        let h = hull(2, &pts(&[&[0, 0], &[2, 2], &[2, 0], &[1, 1], &[2, 1], &[1, 0]]));
        assert_eq!(h.dim, 2);
        let verts: Vec<&Exponent> = h.vertices.iter().map(|&i| &h.points[i]).collect();
        assert_eq!(verts, vec![&Exponent(vec![0, 0]), &Exponent(vec![2, 0]), &Exponent(vec![2, 2])]);
        assert_eq!(h.facets.len(), 3);
        // 3 vertices + 3 edges + the triangle
        assert_eq!(h.faces.len(), 7);
        for f in &h.facets {
            for p in &h.points {
                assert!(dot(&f.normal, &p.as_rationals()) >= f.offset);
            }
        }
    }

    #[test]
    fn degenerate_segment_in_plane() {
        let h = hull(2, &pts(&[&[0, 0], &[2, 2], &[1, 1]]));
        assert_eq!(h.dim, 1);
        assert_eq!(h.vertices.len(), 2);
        assert_eq!(h.lineality, vec![vec![int(-1), int(1)]]);
        assert_eq!(h.faces.len(), 3);
    }

    #[test]
    fn single_point() {
        let h = hull(3, &pts(&[&[0, 0, 1]]));
        assert_eq!(h.dim, 0);
        assert_eq!(h.lineality.len(), 3);
        assert_eq!(h.faces.len(), 1);
    }

    #[test]
    fn cube_face_count() {
        let mut v = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    v.push(Exponent(vec![a, b, c]));
                }
            }
        }
        v.push(Exponent(vec![1, 1, 0]));
        let h = hull(3, &v);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        // 8 + 12 + 6 + 1
        assert_eq!(h.faces.len(), 27);
    }

    #[test]
    fn triangle_embedded_in_space() {
        let h = hull(3, &pts(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 1]]));
        assert_eq!(h.dim, 2);
        assert_eq!(h.facets.len(), 3);
        assert_eq!(h.lineality, vec![vec![int(1), int(1), int(2)]]);
        assert!(!affine_span_contains_origin(&h.points.iter().map(Exponent::as_rationals).collect::<Vec<_>>()));
    }

    #[test]
    fn cross_polytope_in_four_dimensions() {
        let mut v = Vec::new();
        for j in 0..4 {
            let mut e = vec![1u32; 4];
            e[j] = 0;
            v.push(Exponent(e.clone()));
            e[j] = 2;
            v.push(Exponent(e));
        }
        v.push(Exponent(vec![1, 1, 1, 1]));
        let h = hull(4, &v);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 16);
    }
}
