//! Floating-point kernel: multi-start Gauss–Newton root finding, strict
//! feasibility of linear descent systems, and a brute-force grid oracle.
//!
//! All randomness comes from a ChaCha stream seeded by [`SolverConfig::rng_seed`];
//! parallel loops collect in start order, so results do not depend on the
//! number of worker threads.

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Constraint, LpOutcome};
use crate::poly::{FloatPoly, Point, Polynomial};
use crate::rational::{self, int, Rational};

/// Values below this are reported as suspected unboundedness.
pub const UNBOUNDED_FLOOR: f64 = -1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub box_radius: f64,
    pub starts_per_axis: usize,
    pub max_newton_iters: usize,
    pub residual_tol: f64,
    pub dedupe_radius: f64,
    pub value_merge_tol: f64,
    pub rng_seed: u64,
    pub require_nonzero_coords: bool,
    /// Above this many grid starts, seeded uniform starts are used instead.
    pub max_starts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            box_radius: 10.0,
            starts_per_axis: 7,
            max_newton_iters: 100,
            residual_tol: 1e-10,
            dedupe_radius: 1e-6,
            value_merge_tol: 1e-7,
            rng_seed: 0,
            require_nonzero_coords: false,
            max_starts: 4096,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.box_radius, self.residual_tol, self.dedupe_radius, self.value_merge_tol];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidProblem("solver radii and tolerances must be positive and finite".into()));
        }
        if self.starts_per_axis < 2 {
            return Err(Error::InvalidProblem("starts_per_axis must be at least 2".into()));
        }
        if self.max_starts == 0 || self.max_newton_iters == 0 {
            return Err(Error::InvalidProblem("max_starts and max_newton_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Root {
    pub point: Point,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Always false: multi-start search can miss roots.
    pub complete: bool,
}

/// Square or overdetermined polynomial system `F(x) = 0` with its Jacobian, in floats.
pub(crate) struct FloatSystem {
    n: usize,
    eqs: Vec<FloatPoly>,
    jac: Vec<Vec<FloatPoly>>,
}

impl FloatSystem {
    pub(crate) fn new(eqs: &[Polynomial]) -> Self {
        let n = eqs.first().map_or(0, Polynomial::nvars);
        FloatSystem {
            n,
            eqs: eqs.iter().map(Polynomial::to_float).collect(),
            jac: eqs.iter().map(|e| (0..n).map(|j| e.derivative(j).to_float()).collect()).collect(),
        }
    }

    fn residual(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.eqs.len(), self.eqs.iter().map(|e| e.eval(x)))
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.eqs.len(), self.n, |i, j| self.jac[i][j].eval(x))
    }

    /// Damped minimum-norm Gauss–Newton from `x0`; `None` when the start is abandoned.
    fn newton(&self, x0: Vec<f64>, cfg: &SolverConfig) -> Option<Root> {
        let blowup = 1e6 * cfg.box_radius.max(1.0);
        let mut x = DVector::from_vec(x0);
        let mut r = self.residual(x.as_slice());
        let mut rn = r.norm();
        if !rn.is_finite() {
            return None;
        }
        let mut polish = 0;
        for _ in 0..cfg.max_newton_iters {
            if rn <= cfg.residual_tol {
                polish += 1;
                if polish > 3 {
                    break;
                }
            }
            let jm = self.jacobian(x.as_slice());
            let svd = jm.svd(true, true);
            let smax = svd.singular_values.max();
            if !(smax > 0.0) || !smax.is_finite() {
                return (rn <= cfg.residual_tol).then(|| Root { point: Point(x.as_slice().to_vec()), residual: rn });
            }
            let step = svd.solve(&r, smax * 1e-12).ok()?;
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..=30 {
                let cand = &x - &step * alpha;
                let rc = self.residual(cand.as_slice());
                let rcn = rc.norm();
                if rcn.is_finite() && rcn < rn {
                    x = cand;
                    r = rc;
                    rn = rcn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted || x.amax() > blowup {
                break;
            }
        }
        (rn <= cfg.residual_tol).then(|| Root { point: Point(x.as_slice().to_vec()), residual: rn })
    }
}

/// Deterministic starting points: a grid on `[-R, R]ⁿ`, a unit-scale grid,
/// both jittered; seeded uniform samples when the grids would be too large.
pub(crate) fn starting_points(n: usize, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let s = cfg.starts_per_axis;
    let grid_size = (s as f64).powi(n as i32);
    let mut out = Vec::new();
    if 2.0 * grid_size <= cfg.max_starts as f64 {
        for radius in [cfg.box_radius, 2.0] {
            let axis: Vec<f64> = (0..s).map(|i| -radius + 2.0 * radius * i as f64 / (s - 1) as f64).collect();
            for idx in 0..s.pow(n as u32) {
                let mut k = idx;
                let p: Vec<f64> = (0..n)
                    .map(|_| {
                        let v = axis[k % s];
                        k /= s;
                        v + radius * 1e-3 * rng.gen_range(-1.0..1.0)
                    })
                    .collect();
                out.push(p);
            }
        }
    } else {
        for i in 0..cfg.max_starts {
            let radius = if i % 2 == 0 { cfg.box_radius } else { 2.0 };
            out.push((0..n).map(|_| rng.gen_range(-radius..radius)).collect());
        }
    }
    out
}

/// Multi-start roots of a polynomial system (any number of equations).
pub(crate) fn solve_system(eqs: &[Polynomial], cfg: &SolverConfig) -> RootSet {
    if eqs.is_empty() {
        return RootSet { roots: Vec::new(), complete: false };
    }
    let sys = FloatSystem::new(eqs);
    let starts = starting_points(sys.n, cfg);
    let found: Vec<Option<Root>> = starts.into_par_iter().map(|x0| sys.newton(x0, cfg)).collect();
    let mut roots: Vec<Root> = Vec::new();
    for root in found.into_iter().flatten() {
        if cfg.require_nonzero_coords && root.point.iter().any(|v| v.abs() < cfg.dedupe_radius) {
            continue;
        }
        let dup = roots.iter().any(|r| {
            r.point.iter().zip(root.point.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
                <= cfg.dedupe_radius
        });
        if !dup {
            roots.push(root);
        }
    }
    RootSet { roots, complete: false }
}

/// Approximate real roots of `∇p = 0` given as the list of partial derivatives.
pub fn solve_gradient_system(grads: &[Polynomial], cfg: &SolverConfig) -> Result<RootSet> {
    if let Some(g) = grads.iter().find(|g| g.nvars() != grads.len()) {
        return Err(Error::DimensionMismatch { expected: grads.len(), got: g.nvars() });
    }
    Ok(solve_system(grads, cfg))
}

/// Exact strict-descent LP: maximize `t` with `⟨g, v⟩ + t ≤ 0` and `‖v‖∞ ≤ 1`.
///
/// Returns `(v, t_opt)`; by LP duality `t_opt = min ‖Σ λ_i g_i‖₁` over the simplex,
/// so `t_opt = 0` exactly when `0` is a convex combination of the `g_i`.
pub fn strict_feasibility_exact(gs: &[Vec<Rational>]) -> (Vec<Rational>, Rational) {
    let n = gs.first().map_or(0, Vec::len);
    let nv = n + 1;
    let mut cons = Vec::new();
    for g in gs {
        let mut row = g.clone();
        row.push(int(1));
        cons.push(Constraint::le(row, int(0)));
    }
    for j in 0..n {
        let mut e = vec![int(0); nv];
        e[j] = int(1);
        cons.push(Constraint::le(e.clone(), int(1)));
        cons.push(Constraint::ge(e, int(-1)));
    }
    let mut obj = vec![int(0); nv];
    obj[n] = int(1);
    match lp::maximize(nv, &cons, &obj) {
        LpOutcome::Optimal { mut x, value } => {
            x.truncate(n);
            (x, value)
        }
        // v = 0, t = 0 is always feasible and t ≤ ‖g‖₁ bounds the optimum.
        _ => unreachable!("strict-feasibility LP is feasible and bounded"),
    }
}

/// A direction `v` with `⟨g, v⟩ < 0` for every `g`, plus the margin `t_opt`.
///
/// Inputs are rationalized through their shortest decimal form and the LP is
/// solved exactly. An empty list returns the first unit vector of length `n`.
pub fn strict_feasibility_margin(g_list: &[Vec<f64>], n: usize) -> (Option<Vec<f64>>, f64) {
    if g_list.is_empty() {
        let mut v = vec![0.0; n];
        if n > 0 {
            v[0] = 1.0;
        }
        return (Some(v), f64::INFINITY);
    }
    let gs: Option<Vec<Vec<Rational>>> =
        g_list.iter().map(|g| g.iter().map(|&x| rational::from_f64_decimal(x)).collect()).collect();
    let Some(gs) = gs else { return (None, 0.0) };
    let (v, t) = strict_feasibility_exact(&gs);
    let vf: Vec<f64> = v.iter().map(rational::to_f64).collect();
    if t.is_positive() {
        (Some(vf), rational::to_f64(&t))
    } else {
        (None, 0.0)
    }
}

pub fn strict_feasibility(g_list: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = g_list.first().map_or(1, Vec::len);
    strict_feasibility_margin(g_list, n).0
}

/// Result of the grid oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub point: Point,
    pub unbounded_suspected: bool,
}

const FEAS_TOL: f64 = 1e-9;

fn points_per_axis(n: usize, s: usize) -> usize {
    let factor = match n {
        1 => 64,
        2 => 16,
        3 => 8,
        4 => 2,
        _ => 1,
    };
    factor * s + 1
}

struct Objective {
    f: FloatPoly,
    grad: Vec<FloatPoly>,
    cons: Vec<FloatPoly>,
}

impl Objective {
    fn feasible(&self, x: &[f64]) -> bool {
        self.cons.iter().all(|c| c.eval(x) <= FEAS_TOL)
    }

    /// Backtracking gradient descent that rejects infeasible or out-of-box steps.
    fn polish(&self, mut x: Vec<f64>, radius: f64) -> (f64, Vec<f64>) {
        let mut fx = self.f.eval(&x);
        let mut step = radius * 1e-2;
        for _ in 0..200 {
            let g: Vec<f64> = self.grad.iter().map(|d| d.eval(&x)).collect();
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(gn > 0.0) || !gn.is_finite() {
                break;
            }
            let mut improved = false;
            while step > 1e-14 * radius.max(1.0) {
                let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi / gn).collect();
                let inside = cand.iter().all(|v| v.abs() <= radius);
                if inside && self.feasible(&cand) {
                    let fc = self.f.eval(&cand);
                    if fc < fx {
                        x = cand;
                        fx = fc;
                        improved = true;
                        step *= 2.0;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (fx, x)
    }
}

fn grid_min(obj: &Objective, n: usize, s: usize, radius: f64) -> Option<(f64, Vec<f64>)> {
    let m = points_per_axis(n, s);
    let total = m.pow(n as u32);
    let axis: Vec<f64> = (0..m).map(|i| -radius + 2.0 * radius * i as f64 / (m - 1) as f64).collect();
    let point = |idx: usize| -> Vec<f64> {
        let mut k = idx;
        (0..n)
            .map(|_| {
                let v = axis[k % m];
                k /= m;
                v
            })
            .collect()
    };
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = point(idx);
            obj.feasible(&x).then(|| obj.f.eval(&x)).filter(|v| v.is_finite())
        })
        .collect();
    let mut ranked: Vec<(f64, usize)> = values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (v, i))).collect();
    if ranked.is_empty() {
        return None;
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.truncate(8);
    let polished: Vec<(f64, Vec<f64>)> =
        ranked.par_iter().map(|&(_, idx)| obj.polish(point(idx), radius)).collect();
    polished.into_iter().reduce(|best, c| if c.0 < best.0 { c } else { best })
}

fn oracle_at(obj: &Objective, n: usize, s: usize, radius: f64) -> Option<(f64, Vec<f64>)> {
    let own = grid_min(obj, n, s, radius);
    // recursing over coarser grids makes the value monotone in the resolution
    let coarser = if s >= 4 { oracle_at(obj, n, s / 2, radius) } else { None };
    match (own, coarser) {
        (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
        (a, b) => a.or(b),
    }
}

fn objective(p: &Polynomial, constraints: &[Polynomial]) -> Result<Objective> {
    let n = p.nvars();
    if let Some(c) = constraints.iter().find(|c| c.nvars() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: c.nvars() });
    }
    Ok(Objective {
        f: p.to_float(),
        grad: p.gradient().iter().map(Polynomial::to_float).collect(),
        cons: constraints.iter().map(Polynomial::to_float).collect(),
    })
}

/// Minimum of `p` over feasible grid points of `[-R, R]ⁿ`, polished by descent.
pub fn grid_infimum_oracle(p: &Polynomial, constraints: &[Polynomial], cfg: &SolverConfig) -> Result<OracleResult> {
    grid_infimum_oracle_at(p, constraints, cfg, cfg.box_radius)
}

pub fn grid_infimum_oracle_at(
    p: &Polynomial,
    constraints: &[Polynomial],
    cfg: &SolverConfig,
    radius: f64,
) -> Result<OracleResult> {
    let obj = objective(p, constraints)?;
    let (value, x) = oracle_at(&obj, p.nvars(), cfg.starts_per_axis, radius).ok_or(Error::NoFeasiblePoint)?;
    Ok(OracleResult { value, point: Point(x), unbounded_suspected: value < UNBOUNDED_FLOOR })
}

/// Oracle values over the boxes of radius `R, 2R, 4R, 8R`.
pub fn escape_profile(p: &Polynomial, constraints: &[Polynomial], cfg: &SolverConfig) -> Result<Vec<(f64, OracleResult)>> {
    (0..4)
        .map(|k| {
            let r = cfg.box_radius * f64::from(1 << k);
            grid_infimum_oracle_at(p, constraints, cfg, r).map(|o| (r, o))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn names(n: usize) -> Vec<String> {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    }

    fn grads(text: &str, n: usize) -> Vec<Polynomial> {
        parse(text, &names(n)).unwrap().gradient()
    }

    #[test]
    fn escaping_example_has_single_critical_point() {
        let rs = solve_gradient_system(&grads("(x*y - 1)^2 + x^2", 2), &SolverConfig::default()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!(rs.roots[0].point.norm() < 1e-6);
        assert!(!rs.complete);
    }

    #[test]
    fn hyperbola_representatives_with_nonzero_coords() {
        let cfg = SolverConfig { require_nonzero_coords: true, ..SolverConfig::default() };
        let rs = solve_gradient_system(&grads("(x*y - 1)^2", 2), &cfg).unwrap();
        assert!(!rs.roots.is_empty());
        for r in &rs.roots {
            assert!((r.point[0] * r.point[1] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = grads("x^2 + y^2", 2);
        assert!(solve_gradient_system(&g[..1], &SolverConfig::default()).is_err());
    }

    #[test]
    fn strict_feasibility_examples() {
        let v = strict_feasibility(&[vec![1.0, 0.0]]).unwrap();
        assert!(v[0] < 0.0);
        assert!(strict_feasibility(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).is_none());
        let (v, t) = strict_feasibility_margin(&[vec![1.0, 1.0], vec![1.0, -1.0]], 2);
        let v = v.unwrap();
        assert!(v[0] + v[1] < 0.0 && v[0] - v[1] < 0.0);
        assert_eq!(t, 1.0);
        assert_eq!(strict_feasibility(&[]), Some(vec![1.0]));
    }

    #[test]
    fn oracle_examples() {
        let cfg = SolverConfig::default();
        let o = grid_infimum_oracle(&parse("5", &names(2)).unwrap(), &[], &cfg).unwrap();
        assert_eq!(o.value, 5.0);
        let p = parse("x^2 + y^2 + z", &names(3)).unwrap();
        let c = parse("-z", &names(3)).unwrap();
        let o = grid_infimum_oracle(&p, &[c], &cfg).unwrap();
        assert!(o.value.abs() <= 1e-4, "{}", o.value);
        assert!(o.point.norm() < 1e-1);
        let p = parse("(x*y - 1)^2 + x^2", &names(2)).unwrap();
        let cfg50 = SolverConfig { box_radius: 50.0, ..SolverConfig::default() };
        assert!(grid_infimum_oracle(&p, &[], &cfg50).unwrap().value <= 0.01);
    }

    #[test]
    fn oracle_reports_empty_feasible_set() {
        let p = parse("x", &names(1)).unwrap();
        let c = parse("x^2 + 1", &names(1)).unwrap();
        assert_eq!(grid_infimum_oracle(&p, &[c], &SolverConfig::default()), Err(Error::NoFeasiblePoint));
    }
}
