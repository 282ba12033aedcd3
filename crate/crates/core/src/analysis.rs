//! The infimum of an unconstrained polynomial from critical values and bad
//! faces, attainability under convenience and (MF)∞, and a search for
//! minimizer-at-infinity certificates.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{
    check_mf_infinity, check_nondegenerate, face_of_cell, fan_data, normal_in_cell, verify_certificate, CheckStatus,
    InfinityCertificate, ProblemInstance, Verdict, MAX_CONSTRAINTS,
};
use crate::error::{Error, Result};
use crate::geometry::{is_convenient, newton_polyhedron};
use crate::kkt::KktSystem;
use crate::lp::Constraint;
use crate::numeric::{self, OracleResult, SolverConfig};
use crate::poly::{Exponent, Point, Polynomial, VarSet};
use crate::rational::{int, Rational};

/// A critical value with every sampled point that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValue {
    pub value: f64,
    pub witnesses: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceWitness {
    pub face_id: usize,
    pub face_points: Vec<Exponent>,
    pub point: Point,
}

/// A critical value of some bad-face polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceValue {
    pub value: f64,
    pub witnesses: Vec<FaceWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Attainment {
    Attained,
    NotAttainedLikely,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumptions {
    pub bounded_below_assumed: bool,
    pub nondegeneracy_status: Verdict,
    /// False when non-degeneracy fails and the formula for `f*` need not hold.
    pub sound: bool,
    pub unbounded_suspected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileStep {
    pub radius: f64,
    pub value: f64,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfimumReport {
    /// `min(K₀ ∪ Σ∞)`; absent when both sets are empty.
    pub f_star: Option<f64>,
    /// `min(K₀ ∪ Σ'∞)`.
    pub f_star_prime: Option<f64>,
    pub k0: Vec<CriticalValue>,
    pub sigma_inf: Vec<FaceValue>,
    pub sigma_inf_prime: Vec<FaceValue>,
    pub attainment: Attainment,
    pub oracle_value: f64,
    pub oracle_point: Point,
    pub escape_profile: Vec<ProfileStep>,
    pub assumptions: Assumptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermatWitness {
    pub face_id: usize,
    pub face_points: Vec<Exponent>,
    pub point: Point,
    pub value: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    AttainsByTheorem,
    NoConclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttainabilityReport {
    pub convenient: bool,
    pub mf_status: CheckStatus,
    pub conclusion: Conclusion,
    /// The conclusion rests on a heuristic (MF)∞ verdict.
    pub heuristic_basis: bool,
    /// Best feasible grid value, when a feasible grid point exists.
    pub oracle: Option<OracleResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub estimate: f64,
    pub certificate: Option<InfinityCertificate>,
    /// `f_{0,Δ₀}(x*)` for the returned certificate.
    pub f_star_certified: Option<f64>,
    pub verification: Option<CheckStatus>,
    pub note: Option<String>,
    pub cases_examined: usize,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Sorts by value and merges runs within `tol` of the run's smallest value.
fn merge<W>(mut items: Vec<(f64, W)>, tol: f64) -> Vec<(f64, Vec<W>)> {
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Vec<W>)> = Vec::new();
    for (v, w) in items {
        match out.last_mut() {
            Some((head, ws)) if close(*head, v, tol) => ws.push(w),
            _ => out.push((v, vec![w])),
        }
    }
    out
}

/// Critical points of `g` in the variables it involves, lifted with `1` elsewhere.
fn lifted_critical_points(g: &Polynomial, cfg: &SolverConfig) -> Vec<Point> {
    let vars = g.occurring_vars();
    if vars.is_empty() {
        return Vec::new();
    }
    let eqs: Vec<Polynomial> = g.compress(vars).gradient().into_iter().filter(|d| !d.is_zero()).collect();
    let c = SolverConfig { require_nonzero_coords: false, ..cfg.clone() };
    let idx: Vec<usize> = vars.iter().collect();
    numeric::solve_system(&eqs, &c)
        .roots
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

/// `K₀(p)`: values of `p` at sampled real critical points.
pub fn critical_values(p: &Polynomial, cfg: &SolverConfig) -> Result<Vec<CriticalValue>> {
    if p.is_constant() {
        return Err(Error::ConstantPolynomial("objective".into()));
    }
    cfg.validate()?;
    let eqs: Vec<Polynomial> = p.gradient().into_iter().filter(|d| !d.is_zero()).collect();
    let c = SolverConfig { require_nonzero_coords: false, ..cfg.clone() };
    let items = numeric::solve_system(&eqs, &c)
        .roots
        .into_iter()
        .map(|r| (p.evaluate(&r.point).expect("dimension"), r.point))
        .collect();
    Ok(merge(items, cfg.value_merge_tol).into_iter().map(|(value, witnesses)| CriticalValue { value, witnesses }).collect())
}

/// `Σ∞(p)`, or `Σ'∞(p)` when `nonzero_only`: critical values of bad-face polynomials.
pub fn sigma_infinity(p: &Polynomial, cfg: &SolverConfig, nonzero_only: bool) -> Result<Vec<FaceValue>> {
    let (all, nonzero) = sigma_both(p, cfg)?;
    Ok(if nonzero_only { nonzero } else { all })
}

fn sigma_both(p: &Polynomial, cfg: &SolverConfig) -> Result<(Vec<FaceValue>, Vec<FaceValue>)> {
    if p.is_constant() {
        return Err(Error::ConstantPolynomial("objective".into()));
    }
    cfg.validate()?;
    let gamma = newton_polyhedron(p)?;
    let per_face: Vec<Vec<(f64, FaceWitness, bool)>> = gamma
        .bad_faces()
        .par_iter()
        .map(|face| {
            let g = p.face_polynomial(face).expect("own face");
            let vars = g.occurring_vars();
            lifted_critical_points(&g, cfg)
                .into_iter()
                .map(|x| {
                    let torus = vars.iter().all(|j| x[j].abs() >= cfg.dedupe_radius);
                    let w = FaceWitness { face_id: face.id, face_points: face.lattice_points.clone(), point: x };
                    (g.evaluate(&w.point).expect("dimension"), w, torus)
                })
                .collect()
        })
        .collect();
    let flat: Vec<(f64, FaceWitness, bool)> = per_face.into_iter().flatten().collect();
    let nonzero: Vec<(f64, FaceWitness)> = flat.iter().filter(|t| t.2).map(|t| (t.0, t.1.clone())).collect();
    let all: Vec<(f64, FaceWitness)> = flat.into_iter().map(|t| (t.0, t.1)).collect();
    let wrap = |v: Vec<(f64, FaceWitness)>| -> Vec<FaceValue> {
        merge(v, cfg.value_merge_tol).into_iter().map(|(value, witnesses)| FaceValue { value, witnesses }).collect()
    };
    Ok((wrap(all), wrap(nonzero)))
}

fn min_of(a: &[CriticalValue], b: &[FaceValue]) -> Option<f64> {
    a.iter().map(|c| c.value).chain(b.iter().map(|c| c.value)).reduce(f64::min)
}

/// Values approach `f_star` from above while the minimizers move outward.
fn escapes(profile: &[ProfileStep], f_star: f64) -> bool {
    let decreasing = profile.windows(2).all(|w| w[1].value < w[0].value);
    let above = profile.iter().all(|s| s.value >= f_star - 1e-4);
    let outward = profile
        .iter()
        .all(|s| s.point.iter().map(|v| v.abs()).fold(0.0, f64::max) >= 0.5 * s.radius);
    decreasing && above && outward
}

/// `f* = min(K₀ ∪ Σ∞)` for a polynomial assumed bounded below, with the
/// `Σ'∞` cross-check and an attainment verdict.
pub fn unconstrained_infimum(p: &Polynomial, cfg: &SolverConfig) -> Result<InfimumReport> {
    let ndg = check_nondegenerate(p, cfg)?;
    let k0 = critical_values(p, cfg)?;
    let (sigma_inf, sigma_inf_prime) = sigma_both(p, cfg)?;
    let f_star = min_of(&k0, &sigma_inf);
    let f_star_prime = min_of(&k0, &sigma_inf_prime);
    let sound = ndg.verdict.holds();
    if sound {
        let agree = match (f_star, f_star_prime) {
            (Some(a), Some(b)) => close(a, b, cfg.value_merge_tol),
            (None, None) => true,
            _ => false,
        };
        if !agree {
            return Err(Error::Inconsistent(format!(
                "min(K0 ∪ Σ∞) = {f_star:?} but min(K0 ∪ Σ'∞) = {f_star_prime:?}; rerun with more starts"
            )));
        }
    }
    let escape_profile: Vec<ProfileStep> = numeric::escape_profile(p, &[], cfg)?
        .into_iter()
        .map(|(radius, o)| ProfileStep { radius, value: o.value, point: o.point })
        .collect();
    let best = escape_profile.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("four radii");
    let k0_min = k0.first().map(|c| c.value);
    let attainment = match (f_star, k0_min) {
        (Some(f), Some(k)) if close(f, k, cfg.value_merge_tol) => Attainment::Attained,
        (Some(f), _) if escapes(&escape_profile, f) => Attainment::NotAttainedLikely,
        _ => Attainment::Inconclusive,
    };
    Ok(InfimumReport {
        f_star,
        f_star_prime,
        k0,
        sigma_inf,
        sigma_inf_prime,
        attainment,
        oracle_value: best.value,
        oracle_point: best.point.clone(),
        assumptions: Assumptions {
            bounded_below_assumed: true,
            nondegeneracy_status: ndg.verdict,
            sound,
            unbounded_suspected: best.value < numeric::UNBOUNDED_FLOOR,
        },
        escape_profile,
    })
}

/// A bad face and a torus point where the face polynomial is critical with value `f*`.
pub fn fermat_witness_from(p: &Polynomial, report: &InfimumReport, cfg: &SolverConfig) -> Result<Option<FermatWitness>> {
    if report.attainment != Attainment::NotAttainedLikely {
        return Ok(None);
    }
    let f_star = report.f_star.expect("f* is known when escaping");
    let gamma = newton_polyhedron(p)?;
    let candidates = report.sigma_inf_prime.iter().filter(|v| close(v.value, f_star, cfg.value_merge_tol));
    for fv in candidates {
        for w in &fv.witnesses {
            let face = &gamma.faces[w.face_id];
            let g = p.face_polynomial(face)?;
            let grad: Vec<f64> = g.gradient().iter().map(|d| d.evaluate(&w.point).expect("dimension")).collect();
            let gradient_norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            if face.is_bad && gradient_norm <= cfg.residual_tol && w.point.iter().all(|&v| v != 0.0) {
                return Ok(Some(FermatWitness {
                    face_id: w.face_id,
                    face_points: w.face_points.clone(),
                    point: w.point.clone(),
                    value: g.evaluate(&w.point)?,
                    gradient_norm,
                }));
            }
        }
    }
    Err(Error::Inconsistent(format!("no critical value of a bad face on the torus equals f* = {f_star}")))
}

pub fn fermat_witness(p: &Polynomial, cfg: &SolverConfig) -> Result<Option<FermatWitness>> {
    let report = unconstrained_infimum(p, cfg)?;
    fermat_witness_from(p, &report, cfg)
}

/// Convenience of `f₀` plus (MF)∞ guarantees an optimal solution when the
/// problem is bounded below.
pub fn frank_wolfe(prob: &ProblemInstance, cfg: &SolverConfig) -> Result<AttainabilityReport> {
    let convenient = is_convenient(&prob.objective);
    let mf_status = check_mf_infinity(prob, cfg)?;
    let holds = mf_status.verdict.holds();
    let conclusion = if convenient && holds { Conclusion::AttainsByTheorem } else { Conclusion::NoConclusion };
    let oracle = match numeric::grid_infimum_oracle(&prob.objective, &prob.constraints, cfg) {
        Ok(o) => Some(o),
        Err(Error::NoFeasiblePoint) => None,
        Err(e) => return Err(e),
    };
    Ok(AttainabilityReport {
        convenient,
        heuristic_basis: conclusion == Conclusion::AttainsByTheorem && mf_status.verdict == Verdict::HoldsHeuristic,
        mf_status,
        conclusion,
        oracle,
    })
}

struct Candidate {
    cert: InfinityCertificate,
    value: f64,
}

/// Solutions of the stationarity system on one `(J, q)` case, first with
/// `λ₀ = 1`, then in Fritz–John form.
fn case_candidates(prob: &ProblemInstance, set: VarSet, q: &[Rational], faces: &[Polynomial], cfg: &SolverConfig) -> Vec<Candidate> {
    let p = prob.constraints.len();
    let subsets: Vec<Vec<usize>> = (0..(1u64 << p))
        .map(|mask| (1..=p).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
        .collect();
    let make = |x: Vec<f64>, lambda: Vec<f64>| -> Option<Candidate> {
        for g in &faces[1..] {
            if g.evaluate(&x).ok()? > crate::conditions::activity_tol(g, &x) {
                return None;
            }
        }
        let value = faces[0].evaluate(&x).ok()?;
        let cert = InfinityCertificate { j: set.iter().collect(), q: q.to_vec(), x_star: Point(x), lambda };
        Some(Candidate { cert, value })
    };
    let mut out = Vec::new();
    for fritz_john in [false, true] {
        for active in &subsets {
            let polys: Vec<&Polynomial> = active.iter().map(|&i| &faces[i]).collect();
            let sys = if fritz_john {
                let mut m = vec![&faces[0]];
                m.extend(polys.iter().copied());
                KktSystem { fixed: None, multiplied: m, vanishing: polys, normalize: true, set }
            } else {
                KktSystem { fixed: Some(&faces[0]), multiplied: polys.clone(), vanishing: polys, normalize: false, set }
            };
            for s in sys.solve(cfg) {
                let mut lambda = vec![0.0; p + 1];
                let mut it = s.lambda.into_iter();
                if fritz_john {
                    lambda[0] = it.next().unwrap_or(0.0);
                } else {
                    lambda[0] = 1.0;
                }
                for &i in active {
                    lambda[i] = it.next().unwrap_or(0.0);
                }
                out.extend(make(s.x, lambda));
            }
        }
        if !out.is_empty() {
            break;
        }
    }
    out
}

/// Searches for `(J, q, x*, λ*)` satisfying the conditions for a minimizer at
/// infinity with `f_{0,Δ₀}(x*)` near `f_star_estimate`.
pub fn search_minimizer_at_infinity(prob: &ProblemInstance, f_star_estimate: f64, cfg: &SolverConfig) -> Result<SearchOutcome> {
    if !f_star_estimate.is_finite() {
        return Err(Error::Precondition("the infimum estimate must be finite".into()));
    }
    if prob.constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::InvalidProblem(format!("at most {MAX_CONSTRAINTS} constraints are supported")));
    }
    cfg.validate()?;
    let n = prob.nvars();
    let polys = prob.polys();
    let (gammas, cells) = fan_data(prob)?;
    let value_tol = 1e-2 * (1.0 + f_star_estimate.abs());

    let mut cases: Vec<(VarSet, Vec<Rational>, Vec<Polynomial>)> = Vec::new();
    for set in VarSet::nonempty_subsets(n) {
        for cell in &cells {
            let d0 = face_of_cell(&gammas, cell, 0);
            if !d0.support_vars().is_subset(set) {
                continue;
            }
            let base = d0.lattice_points[0].as_rationals();
            let q = set.iter().find_map(|js| {
                let mut unit = vec![Rational::zero(); n];
                unit[js] = int(1);
                normal_in_cell(n, cell, vec![Constraint::eq(base.clone(), int(0)), Constraint::le(unit, int(-1))])
            });
            if let Some(q) = q {
                let faces =
                    (0..polys.len()).map(|i| polys[i].face_polynomial(face_of_cell(&gammas, cell, i)).expect("own face")).collect();
                cases.push((set, q, faces));
            }
        }
    }

    let found: Vec<Option<(Candidate, CheckStatus)>> = cases
        .par_iter()
        .map(|(set, q, faces)| {
            case_candidates(prob, *set, q, faces, cfg)
                .into_iter()
                .filter(|c| (c.value - f_star_estimate).abs() <= value_tol)
                .find_map(|c| {
                    let status = verify_certificate(prob, &c.cert, c.value);
                    (status.verdict == Verdict::HoldsVerified).then_some((c, status))
                })
        })
        .collect();
    let hit = found.into_iter().flatten().next();
    let note = (cases.is_empty() && f_star_estimate.abs() <= value_tol).then(|| {
        "no normal gives d(q, Γ(f0)) = 0; the estimate is consistent with the alternative f* = 0 (d0 > 0)".to_string()
    });
    debug_assert!(cases.iter().all(|(_, q, _)| q.iter().any(|v| v.is_negative())));
    Ok(match hit {
        Some((c, status)) => SearchOutcome {
            estimate: f_star_estimate,
            f_star_certified: Some(c.value),
            certificate: Some(c.cert),
            verification: Some(status),
            note,
            cases_examined: cases.len(),
        },
        None => SearchOutcome {
            estimate: f_star_estimate,
            certificate: None,
            f_star_certified: None,
            verification: None,
            note,
            cases_examined: cases.len(),
        },
    })
}
