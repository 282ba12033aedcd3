//! Non-degeneracy at infinity, the Mangasarian–Fromovitz property at
//! infinity, and the verifier for minimizer-at-infinity certificates.
//!
//! Both definitions quantify over all real points of semialgebraic sets. The
//! polyhedral side is decided exactly; the point searches are multi-start and
//! can miss solutions, so a passing check is `HOLDS_HEURISTIC` unless it is
//! certified analytically. A `FAILS` verdict always carries a witness that has
//! been re-verified in exact arithmetic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{newton_polyhedron, normal_cells, Face, NewtonPolyhedron, NormalCell};
use crate::kkt::KktSystem;
use crate::lp::{self, Constraint};
use crate::numeric::{self, RootSet, SolverConfig};
use crate::poly::{Exponent, Point, Polynomial, VarSet};
use crate::rational::{self, int, Rational};

/// Active-set enumeration is exponential in the number of constraints.
pub const MAX_CONSTRAINTS: usize = 8;

/// `inf f₀(x)` subject to `f_i(x) ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub objective: Polynomial,
    pub constraints: Vec<Polynomial>,
}

impl ProblemInstance {
    pub fn new(objective: Polynomial, constraints: Vec<Polynomial>) -> Result<Self> {
        for (i, f) in std::iter::once(&objective).chain(&constraints).enumerate() {
            if f.var_names() != objective.var_names() {
                return Err(Error::DimensionMismatch { expected: objective.nvars(), got: f.nvars() });
            }
            if f.is_constant() {
                let what = if i == 0 { "objective".to_string() } else { format!("constraint {i}") };
                return Err(Error::ConstantPolynomial(what));
            }
        }
        Ok(ProblemInstance { objective, constraints })
    }

    pub fn unconstrained(objective: Polynomial) -> Result<Self> {
        Self::new(objective, Vec::new())
    }

    pub fn nvars(&self) -> usize {
        self.objective.nvars()
    }

    pub fn var_names(&self) -> &[String] {
        self.objective.var_names()
    }

    /// `f₀, f₁, …, f_p`.
    pub fn polys(&self) -> Vec<&Polynomial> {
        std::iter::once(&self.objective).chain(&self.constraints).collect()
    }
}

/// Certificate data `(J, q, x*, λ*)` for a minimizer at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityCertificate {
    /// Sorted 0-based variable indices.
    pub j: Vec<usize>,
    #[serde(with = "rational::serde_rational::vec")]
    pub q: Vec<Rational>,
    pub x_star: Point,
    /// `λ₀*, λ₁*, …, λ_p*`.
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    HoldsVerified,
    HoldsHeuristic,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::HoldsVerified | Verdict::HoldsHeuristic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsVerified => "HOLDS_VERIFIED",
            Verdict::HoldsHeuristic => "HOLDS_HEURISTIC",
            Verdict::Fails => "FAILS",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// A critical point of a Newton-boundary face polynomial with all coordinates nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateFace {
    pub face_id: usize,
    pub face_points: Vec<Exponent>,
    pub face_polynomial: String,
    pub point: Point,
    pub gradient_norm: f64,
}

/// Data `(J, q, x)` at which no common strict descent direction exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfViolation {
    pub j: Vec<usize>,
    #[serde(with = "rational::serde_rational::vec")]
    pub q: Vec<Rational>,
    pub point: Point,
    /// Indices `i` (0 = objective) whose face polynomial vanishes at the point.
    pub active: Vec<usize>,
    /// Optimal margin of the strict-descent LP for the gradients scaled by `|x_j|`; zero up to tolerance.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertItem {
    #[serde(rename = "well_formed")]
    WellFormed,
    #[serde(rename = "q_sign")]
    NormalSign,
    #[serde(rename = "i")]
    Support,
    #[serde(rename = "ii")]
    Value,
    #[serde(rename = "iii")]
    Stationarity,
    #[serde(rename = "iv")]
    Feasibility,
    #[serde(rename = "v")]
    Multipliers,
}

impl CertItem {
    pub fn label(self) -> &'static str {
        match self {
            CertItem::WellFormed => "well_formed",
            CertItem::NormalSign => "q_sign",
            CertItem::Support => "i",
            CertItem::Value => "ii",
            CertItem::Stationarity => "iii",
            CertItem::Feasibility => "iv",
            CertItem::Multipliers => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemResult {
    pub item: CertItem,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub items: Vec<ItemResult>,
    pub failed_item: Option<CertItem>,
    #[serde(with = "rational::serde_rational::opt")]
    pub d_value: Option<Rational>,
    /// Whether the constraint qualification allowing `λ₀* = 1` holds.
    pub cq_lambda0_one: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    DegenerateFace(DegenerateFace),
    MfViolation(MfViolation),
    Certificate(CertificateCheck),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStatus {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub log: Vec<String>,
}

/// Equality tolerance for "`g(x) = 0`", relative to the largest term.
pub(crate) fn activity_tol(g: &Polynomial, x: &[f64]) -> f64 {
    1e-8 * (1.0 + g.term_scale(x))
}

fn fmt_points(pts: &[Exponent]) -> String {
    let inner: Vec<String> = pts
        .iter()
        .map(|k| format!("({})", k.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", inner.join(" "))
}

fn fmt_set(set: VarSet, names: &[String]) -> String {
    format!("{{{}}}", set.names(names).join(","))
}

fn grad_exact(g: &Polynomial, x: &[Rational]) -> Vec<Rational> {
    g.gradient().iter().map(|d| d.evaluate_exact(x).expect("dimension")).collect()
}

fn grad_f64(g: &Polynomial, x: &[f64]) -> Vec<f64> {
    g.gradient().iter().map(|d| d.evaluate(x).expect("dimension")).collect()
}

/// `|x_j| ∂_j g(x)` where `x_j ≠ 0`, plain `∂_j g(x)` elsewhere.
///
/// On the torus this is the toric gradient, which is small relative to the
/// term scale only near genuine critical points; the plain gradient is also
/// small at points drifting toward a coordinate hyperplane.
fn scaled_grad_exact(g: &Polynomial, x: &[Rational]) -> Vec<Rational> {
    grad_exact(g, x).into_iter().zip(x).map(|(d, xj)| if xj.is_zero() { d } else { d * xj.abs() }).collect()
}

fn scaled_grad_f64(g: &Polynomial, x: &[f64]) -> Vec<f64> {
    grad_f64(g, x).into_iter().zip(x).map(|(d, xj)| if *xj == 0.0 { d } else { d * xj.abs() }).collect()
}

/// Tolerance for a scaled gradient, relative to the largest term.
fn stationarity_tol(scale: f64) -> f64 {
    1e-8 * scale.max(f64::MIN_POSITIVE)
}

/// Critical points of a face polynomial on the torus of the variables it
/// actually involves, lifted with `1` in every other coordinate.
///
/// Both checkers go through this one function so that a face system seen by
/// the non-degeneracy check and by the (MF)∞ check yields identical roots.
pub(crate) fn torus_critical_points(g: &Polynomial, cfg: &SolverConfig) -> Vec<Point> {
    let vars = g.occurring_vars();
    if vars.is_empty() {
        return Vec::new();
    }
    let compressed = g.compress(vars);
    let c = SolverConfig { require_nonzero_coords: true, ..cfg.clone() };
    let rs: RootSet = numeric::solve_system(&compressed.gradient(), &c);
    let idx: Vec<usize> = vars.iter().collect();
    rs.roots
        .into_iter()
        .map(|r| {
            let mut x = vec![1.0; g.nvars()];
            for (k, &j) in idx.iter().enumerate() {
                x[j] = r.point[k];
            }
            Point(x)
        })
        .collect()
}

#[derive(Default)]
struct RootCache(Mutex<HashMap<String, Arc<Vec<Point>>>>);

impl RootCache {
    fn get(&self, g: &Polynomial, cfg: &SolverConfig) -> Arc<Vec<Point>> {
        let key = g.to_string();
        if let Some(v) = self.0.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = Arc::new(torus_critical_points(g, cfg));
        self.0.lock().expect("cache lock").entry(key).or_insert(v).clone()
    }
}

/// Exact re-check of a degenerate-face witness.
pub fn verify_degenerate_face(p: &Polynomial, w: &DegenerateFace) -> std::result::Result<(), String> {
    let gamma = newton_polyhedron(p).map_err(|e| e.to_string())?;
    let face = gamma
        .faces
        .iter()
        .find(|f| f.lattice_points == w.face_points)
        .ok_or("witness face is not a face of the Newton polyhedron")?;
    if !face.in_newton_boundary {
        return Err("witness face is not in the Newton boundary".into());
    }
    if w.point.len() != p.nvars() || w.point.iter().any(|&v| v == 0.0) {
        return Err("witness point must have all coordinates nonzero".into());
    }
    let g = p.face_polynomial(face).map_err(|e| e.to_string())?;
    let xr = w.point.to_rationals().ok_or("non-finite witness point")?;
    let grad = scaled_grad_exact(&g, &xr);
    let tol = stationarity_tol(g.term_scale(&w.point));
    let worst = grad.iter().map(|v| rational::to_f64(&v.abs())).fold(0.0, f64::max);
    if worst > tol {
        return Err(format!("scaled gradient entry {worst:e} exceeds tolerance {tol:e}"));
    }
    Ok(())
}

/// Kouchnirenko non-degeneracy at infinity.
pub fn check_nondegenerate(p: &Polynomial, cfg: &SolverConfig) -> Result<CheckStatus> {
    if p.is_constant() {
        return Err(Error::ConstantPolynomial("objective".into()));
    }
    cfg.validate()?;
    let gamma = newton_polyhedron(p)?;
    let boundary = gamma.newton_boundary();
    let results: Vec<(String, Option<DegenerateFace>, bool)> = boundary
        .par_iter()
        .map(|face| {
            let pts = fmt_points(&face.lattice_points);
            let g = p.face_polynomial(face).expect("own face");
            if face.lattice_points.len() == 1 {
                // a single monomial c·x^κ with κ ≠ 0 has a nonzero partial on the torus
                return (format!("face {} {pts}: monomial, gradient nonvanishing on the torus (exact)", face.id), None, true);
            }
            let roots = torus_critical_points(&g, cfg);
            for x in roots.iter() {
                let w = DegenerateFace {
                    face_id: face.id,
                    face_points: face.lattice_points.clone(),
                    face_polynomial: g.to_string(),
                    gradient_norm: grad_f64(&g, x).iter().map(|v| v * v).sum::<f64>().sqrt(),
                    point: x.clone(),
                };
                if verify_degenerate_face(p, &w).is_ok() {
                    return (format!("face {} {pts}: critical point on the torus at {:?}", face.id, x.0), Some(w), false);
                }
            }
            (format!("face {} {pts}: no critical point found on the torus (multi-start)", face.id), None, false)
        })
        .collect();
    let mut log = Vec::new();
    let mut witness = None;
    let mut all_exact = true;
    for (line, w, exact) in results {
        log.push(line);
        all_exact &= exact;
        if witness.is_none() {
            witness = w;
        }
    }
    let verdict = if witness.is_some() {
        Verdict::Fails
    } else if all_exact {
        Verdict::HoldsVerified
    } else {
        Verdict::HoldsHeuristic
    };
    Ok(CheckStatus { verdict, witness: witness.map(Witness::DegenerateFace), log })
}

/// Sets `I = {i : f_i|ℝ^J nonconstant}`.
fn nonconstant_on(polys: &[&Polynomial], set: VarSet) -> Vec<usize> {
    (0..polys.len()).filter(|&i| !polys[i].is_constant_on(set).expect("nonempty J")).collect()
}

/// Exact re-check of an (MF)∞ violation.
pub fn verify_mf_violation(prob: &ProblemInstance, w: &MfViolation) -> std::result::Result<(), String> {
    let n = prob.nvars();
    let polys = prob.polys();
    if w.j.is_empty() || w.j.iter().any(|&j| j >= n) || w.q.len() != n || w.point.len() != n {
        return Err("malformed witness".into());
    }
    let set = VarSet::from_indices(w.j.iter().copied());
    let gammas: Vec<NewtonPolyhedron> = polys.iter().map(|f| newton_polyhedron(f)).collect::<Result<_>>().map_err(|e| e.to_string())?;
    let d0 = gammas[0].support_value(&w.q).map_err(|e| e.to_string())?;
    if !d0.is_negative() {
        return Err(format!("d(q, Γ(f0)) = {d0} is not negative"));
    }
    if w.point.support() != set {
        return Err("support of the point differs from J".into());
    }
    let xr = w.point.to_rationals().ok_or("non-finite point")?;
    let index = nonconstant_on(&polys, set);
    let mut faces = Vec::new();
    for (i, f) in polys.iter().enumerate() {
        let face = gammas[i].face_of(&w.q).map_err(|e| e.to_string())?;
        if index.contains(&i) && !face.support_vars().is_subset(set) {
            return Err(format!("face of f{i} is not contained in R^J"));
        }
        faces.push(f.face_polynomial(face).map_err(|e| e.to_string())?);
    }
    for (i, g) in faces.iter().enumerate().skip(1) {
        let v = rational::to_f64(&g.evaluate_exact(&xr).expect("dimension"));
        if v > activity_tol(g, &w.point) {
            return Err(format!("face polynomial of f{i} is positive ({v:e})"));
        }
    }
    let active: Vec<usize> = index
        .iter()
        .copied()
        .filter(|&i| rational::to_f64(&faces[i].evaluate_exact(&xr).expect("dimension").abs()) <= activity_tol(&faces[i], &w.point))
        .collect();
    if active.is_empty() {
        return Err("no active face polynomial".into());
    }
    // strict feasibility is invariant under the diagonal scaling
    let grads: Vec<Vec<Rational>> = active.iter().map(|&i| scaled_grad_exact(&faces[i], &xr)).collect();
    let (_, t) = numeric::strict_feasibility_exact(&grads);
    let scale = active.iter().map(|&i| faces[i].term_scale(&w.point)).fold(0.0, f64::max);
    let t = rational::to_f64(&t);
    if t > stationarity_tol(scale) {
        return Err(format!("a strict descent direction exists (margin {t:e})"));
    }
    Ok(())
}

struct MfCase<'a> {
    prob: &'a ProblemInstance,
    set: VarSet,
    q: Vec<Rational>,
    index: Vec<usize>,
    faces: Vec<Polynomial>,
}

impl MfCase<'_> {
    /// Violation test at a candidate point, floats first, then exact re-verification.
    fn violation_at(&self, x: &[f64]) -> Option<MfViolation> {
        let point = Point(x.to_vec());
        if point.support() != self.set {
            return None;
        }
        for g in self.faces.iter().skip(1) {
            if g.evaluate(x).ok()? > activity_tol(g, x) {
                return None;
            }
        }
        let active: Vec<usize> = self
            .index
            .iter()
            .copied()
            .filter(|&i| self.faces[i].evaluate(x).map_or(false, |v| v.abs() <= activity_tol(&self.faces[i], x)))
            .collect();
        if active.is_empty() {
            return None;
        }
        let grads: Vec<Vec<f64>> = active.iter().map(|&i| scaled_grad_f64(&self.faces[i], x)).collect();
        let scale = active.iter().map(|&i| self.faces[i].term_scale(x)).fold(0.0, f64::max);
        let (_, t) = numeric::strict_feasibility_margin(&grads, x.len());
        if t > stationarity_tol(scale) {
            return None;
        }
        let w = MfViolation { j: self.set.iter().collect(), q: self.q.clone(), point, active, margin: t };
        verify_mf_violation(self.prob, &w).is_ok().then_some(w)
    }

    /// Free coordinates of `J` that a torus point was lifted with; tries sign patterns.
    fn lifts(&self, x: &Point, free: VarSet) -> Vec<Vec<f64>> {
        let idx: Vec<usize> = free.iter().collect();
        let patterns = if self.prob.constraints.is_empty() { 1 } else { 1usize << idx.len().min(3) };
        (0..patterns)
            .map(|mask| {
                let mut y: Vec<f64> = (0..x.len()).map(|j| if self.set.contains(j) { x[j] } else { 0.0 }).collect();
                for (b, &j) in idx.iter().enumerate() {
                    y[j] = if b < 3 && mask >> b & 1 == 1 { -1.0 } else { 1.0 };
                }
                y
            })
            .collect()
    }

    fn search(&self, cfg: &SolverConfig, cache: &RootCache) -> (Option<MfViolation>, usize) {
        let mut tried = 0;
        for active in active_subsets(&self.index) {
            tried += 1;
            let found = if active == [0] {
                let g = &self.faces[0];
                let free = VarSet::from_indices(self.set.iter().filter(|&j| !g.occurring_vars().contains(j)));
                cache.get(g, cfg).iter().flat_map(|x| self.lifts(x, free)).find_map(|y| self.violation_at(&y))
            } else {
                let polys: Vec<&Polynomial> = active.iter().map(|&i| &self.faces[i]).collect();
                let sys = KktSystem { fixed: None, multiplied: polys.clone(), vanishing: polys, normalize: true, set: self.set };
                sys.solve(cfg).iter().find_map(|s| self.violation_at(&s.x))
            };
            if found.is_some() {
                return (found, tried);
            }
        }
        (None, tried)
    }
}

/// Nonempty subsets of `index`, by size then lexicographically.
pub(crate) fn active_subsets(index: &[usize]) -> Vec<Vec<usize>> {
    let m = index.len();
    let mut out: Vec<Vec<usize>> = (1..(1u64 << m))
        .map(|mask| (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| index[b]).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The problem's Newton polyhedra and the cells of their common normal fan.
pub(crate) fn fan_data(prob: &ProblemInstance) -> Result<(Vec<NewtonPolyhedron>, Vec<NormalCell>)> {
    let gammas: Vec<NewtonPolyhedron> = prob.polys().iter().map(|f| newton_polyhedron(f)).collect::<Result<_>>()?;
    let refs: Vec<&NewtonPolyhedron> = gammas.iter().collect();
    let cells = normal_cells(&refs);
    Ok((gammas, cells))
}

/// A normal in `cell` satisfying the extra linear conditions, if any.
pub(crate) fn normal_in_cell(n: usize, cell: &NormalCell, extra: Vec<Constraint>) -> Option<Vec<Rational>> {
    let mut cons = cell.constraints.clone();
    cons.extend(extra);
    lp::feasible_point(n, &cons).map(|q| rational::primitive(&q))
}

pub(crate) fn face_of_cell<'a>(gammas: &'a [NewtonPolyhedron], cell: &NormalCell, i: usize) -> &'a Face {
    &gammas[i].faces[cell.faces[i]]
}

/// The Mangasarian–Fromovitz property at infinity.
pub fn check_mf_infinity(prob: &ProblemInstance, cfg: &SolverConfig) -> Result<CheckStatus> {
    cfg.validate()?;
    if prob.constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::InvalidProblem(format!("at most {MAX_CONSTRAINTS} constraints are supported")));
    }
    let n = prob.nvars();
    let names = prob.var_names();
    let polys = prob.polys();
    let (gammas, cells) = fan_data(prob)?;
    let cases: Vec<(VarSet, usize)> = VarSet::nonempty_subsets(n)
        .into_iter()
        .flat_map(|set| (0..cells.len()).map(move |c| (set, c)))
        .collect();
    let cache = RootCache::default();
    let results: Vec<Option<(String, Option<MfViolation>, bool)>> = cases
        .par_iter()
        .map(|&(set, c)| {
            let cell = &cells[c];
            let index = nonconstant_on(&polys, set);
            if index.is_empty() {
                return None;
            }
            let contained = index.iter().all(|&i| face_of_cell(&gammas, cell, i).support_vars().is_subset(set));
            if !contained {
                return None;
            }
            let d0 = face_of_cell(&gammas, cell, 0);
            let base = d0.lattice_points[0].as_rationals();
            let q = normal_in_cell(n, cell, vec![Constraint::le(base, int(-1))])?;
            let faces: Vec<Polynomial> = (0..polys.len())
                .map(|i| polys[i].face_polynomial(face_of_cell(&gammas, cell, i)).expect("own face"))
                .collect();
            let monomial_objective = prob.constraints.is_empty() && faces[0].num_terms() == 1;
            let case = MfCase { prob, set, q, index, faces };
            let (w, tried) = if monomial_objective { (None, 0) } else { case.search(cfg, &cache) };
            let qs: Vec<String> = case.q.iter().map(|v| v.to_string()).collect();
            let line = match &w {
                Some(w) => format!("J={} q=({}): violation at {:?}", fmt_set(set, names), qs.join(","), w.point.0),
                None if monomial_objective => {
                    format!("J={} q=({}): monomial face, gradient nonvanishing on the torus (exact)", fmt_set(set, names), qs.join(","))
                }
                None => format!("J={} q=({}): {tried} active sets searched, no violation found", fmt_set(set, names), qs.join(",")),
            };
            Some((line, w, monomial_objective))
        })
        .collect();
    let mut log = Vec::new();
    let mut witness = None;
    let mut all_exact = true;
    for (line, w, exact) in results.into_iter().flatten() {
        log.push(line);
        all_exact &= exact;
        if witness.is_none() {
            witness = w;
        }
    }
    let verdict = if witness.is_some() {
        Verdict::Fails
    } else if all_exact {
        Verdict::HoldsVerified
    } else {
        Verdict::HoldsHeuristic
    };
    Ok(CheckStatus { verdict, witness: witness.map(Witness::MfViolation), log })
}

/// Translates a degenerate-face witness into an (MF)∞ violation for the unconstrained
/// problem, as in the proof of their equivalence: truncate the point to the
/// smallest `J` containing the face.
pub fn degenerate_face_to_mf(p: &Polynomial, w: &DegenerateFace) -> Result<MfViolation> {
    let gamma = newton_polyhedron(p)?;
    let face = gamma
        .faces
        .iter()
        .find(|f| f.lattice_points == w.face_points)
        .ok_or(Error::FaceMismatch)?;
    let q = face.boundary_witness.clone().ok_or_else(|| Error::Precondition("face is not in the Newton boundary".into()))?;
    let set = face.support_vars();
    let point = Point((0..p.nvars()).map(|j| if set.contains(j) { w.point[j] } else { 0.0 }).collect());
    Ok(MfViolation { j: set.iter().collect(), q, point, active: vec![0], margin: 0.0 })
}

/// Checks items (i)–(v) of a minimizer-at-infinity certificate against `f_star_claim`.
pub fn verify_certificate(prob: &ProblemInstance, cert: &InfinityCertificate, f_star_claim: f64) -> CheckStatus {
    let n = prob.nvars();
    let p = prob.constraints.len();
    let polys = prob.polys();
    let mut items = Vec::new();
    let mut log = Vec::new();
    let fail = |items: Vec<ItemResult>, log: Vec<String>| {
        let failed_item = items.iter().find(|r| !r.ok).map(|r| r.item);
        CheckStatus {
            verdict: Verdict::Fails,
            witness: Some(Witness::Certificate(CertificateCheck { items, failed_item, d_value: None, cq_lambda0_one: None })),
            log,
        }
    };

    let malformed = if cert.j.is_empty() {
        Some("J is empty".to_string())
    } else if cert.j.iter().any(|&j| j >= n) || cert.j.windows(2).any(|w| w[0] >= w[1]) {
        Some("J must be sorted distinct indices below n".to_string())
    } else if cert.q.len() != n || cert.x_star.len() != n {
        Some(format!("q and x* must have length {n}"))
    } else if cert.lambda.len() != p + 1 {
        Some(format!("lambda must have length {}", p + 1))
    } else if cert.x_star.iter().chain(&cert.lambda).any(|v| !v.is_finite()) || f_star_claim.is_nan() {
        Some("non-finite entries".to_string())
    } else if rational::is_zero_vec(&cert.q) {
        Some("q is zero".to_string())
    } else {
        None
    };
    if let Some(msg) = malformed {
        items.push(ItemResult { item: CertItem::WellFormed, ok: false, detail: msg });
        return fail(items, log);
    }
    items.push(ItemResult { item: CertItem::WellFormed, ok: true, detail: "shapes match the problem".into() });

    let set = VarSet::from_indices(cert.j.iter().copied());
    let x = &cert.x_star;
    let min_q = cert.j.iter().map(|&j| cert.q[j].clone()).min().expect("J nonempty");
    items.push(ItemResult {
        item: CertItem::NormalSign,
        ok: min_q.is_negative(),
        detail: format!("min over J of q_j = {min_q}"),
    });

    // (i)
    let support = x.support();
    items.push(ItemResult {
        item: CertItem::Support,
        ok: support == set,
        detail: format!("nonzero coordinates {:?}, J {:?}", support.iter().collect::<Vec<_>>(), cert.j),
    });

    // exact geometry
    let gammas: Vec<NewtonPolyhedron> = match polys.iter().map(|f| newton_polyhedron(f)).collect::<Result<_>>() {
        Ok(g) => g,
        Err(e) => {
            items.push(ItemResult { item: CertItem::WellFormed, ok: false, detail: e.to_string() });
            return fail(items, log);
        }
    };
    let faces: Vec<&Face> = gammas.iter().map(|g| g.face_of(&cert.q).expect("q nonzero")).collect();
    let face_polys: Vec<Polynomial> =
        polys.iter().zip(&faces).map(|(f, face)| f.face_polynomial(face).expect("own face")).collect();
    let d0 = gammas[0].support_value(&cert.q).expect("q nonzero");

    // (ii)
    let value = face_polys[0].evaluate(x).expect("dimension");
    let value_tol = 1e-8 * (1.0 + face_polys[0].term_scale(x).max(f_star_claim.abs()));
    let in_j = faces[0].support_vars().is_subset(set);
    let ok_value = (value - f_star_claim).abs() <= value_tol;
    items.push(ItemResult {
        item: CertItem::Value,
        ok: d0.is_zero() && in_j && ok_value,
        detail: format!(
            "d(q, Γ(f0)) = {d0} (exact), Δ0 ⊂ R^J: {in_j}, f0_Δ0(x*) = {value:e} vs claim {f_star_claim:e}"
        ),
    });

    // (iii)
    let mut sum = vec![0.0; n];
    let mut scale: f64 = 0.0;
    for (lam, g) in cert.lambda.iter().zip(&face_polys) {
        for (s, d) in sum.iter_mut().zip(grad_f64(g, x)) {
            *s += lam * d;
        }
        scale = scale.max(lam.abs() * g.term_scale(x));
    }
    let resid = sum.iter().map(|v| v * v).sum::<f64>().sqrt();
    let stat_tol = 1e-8 * (1.0 + scale);
    items.push(ItemResult {
        item: CertItem::Stationarity,
        ok: resid <= stat_tol,
        detail: format!("|Σ λ_i ∇f_i,Δi(x*)| = {resid:e} (tolerance {stat_tol:e})"),
    });

    // (iv)
    let mut feas_ok = true;
    let mut feas_detail = Vec::new();
    for i in 1..=p {
        let g = &face_polys[i];
        let v = g.evaluate(x).expect("dimension");
        let tol = activity_tol(g, x);
        let ok = v <= tol && (cert.lambda[i] * v).abs() <= tol * (1.0 + cert.lambda[i].abs());
        feas_ok &= ok;
        feas_detail.push(format!("f{i}_Δ(x*) = {v:e}"));
    }
    items.push(ItemResult {
        item: CertItem::Feasibility,
        ok: feas_ok,
        detail: if feas_detail.is_empty() { "no constraints".into() } else { feas_detail.join(", ") },
    });

    // (v)
    let nonneg = cert.lambda.iter().all(|&l| l >= 0.0);
    let nontrivial = cert.lambda.iter().any(|&l| l != 0.0);
    items.push(ItemResult {
        item: CertItem::Multipliers,
        ok: nonneg && nontrivial,
        detail: format!("lambda = {:?}", cert.lambda),
    });

    // constraint qualification for λ₀* = 1
    let cq_grads: Vec<Vec<f64>> = (1..=p)
        .filter(|&i| {
            !polys[i].is_constant_on(set).expect("nonempty J")
                && face_polys[i].evaluate(x).map_or(false, |v| v.abs() <= activity_tol(&face_polys[i], x))
        })
        .map(|i| grad_f64(&face_polys[i], x))
        .collect();
    let cq = numeric::strict_feasibility_margin(&cq_grads, n).0.is_some();
    log.push(format!("constraint qualification for lambda0 = 1: {}", if cq { "holds" } else { "fails" }));

    let failed_item = items.iter().find(|r| !r.ok).map(|r| r.item);
    let verdict = if failed_item.is_some() { Verdict::Fails } else { Verdict::HoldsVerified };
    CheckStatus {
        verdict,
        witness: Some(Witness::Certificate(CertificateCheck { items, failed_item, d_value: Some(d0), cq_lambda0_one: Some(cq) })),
        log,
    }
}
