//! Polynomial systems for stationarity with squared multipliers.
//!
//! Unknowns are the coordinates in `J` followed by one `μ_k` per multiplied
//! polynomial, with `λ_k = μ_k²` so nonnegativity needs no inequality.

use crate::numeric::{self, SolverConfig};
use crate::poly::{Exponent, Polynomial, VarSet};
use crate::rational::int;

pub(crate) struct KktSystem<'a> {
    /// Ambient polynomials (all in `n` variables).
    pub fixed: Option<&'a Polynomial>,
    pub multiplied: Vec<&'a Polynomial>,
    pub vanishing: Vec<&'a Polynomial>,
    /// Add `Σ μ_k² = 1`.
    pub normalize: bool,
    pub set: VarSet,
}

pub(crate) struct KktSolution {
    /// Ambient point with zeros outside `J`.
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
}

fn extend(p: &Polynomial, names: &[String]) -> Polynomial {
    let extra = names.len() - p.nvars();
    Polynomial::from_terms(
        names,
        p.terms().map(|(e, c)| {
            let mut v = e.0.clone();
            v.extend(std::iter::repeat(0).take(extra));
            (Exponent(v), c.clone())
        }),
    )
    .expect("extended exponents have the right length")
}

impl KktSystem<'_> {
    fn equations(&self) -> (Vec<Polynomial>, usize) {
        let n = self.fixed.or(self.multiplied.first().copied()).or(self.vanishing.first().copied()).map_or(0, |p| p.nvars());
        let nj = self.set.len();
        let m = self.multiplied.len();
        let mut names: Vec<String> = (0..nj).map(|j| format!("x{j}")).collect();
        names.extend((0..m).map(|k| format!("mu{k}")));
        let weights: Vec<Polynomial> = (0..m).map(|k| Polynomial::var(&names, nj + k).pow(2)).collect();
        let mut eqs = Vec::new();
        for k in 0..n {
            let mut e = Polynomial::zero(&names);
            if let Some(f) = self.fixed {
                e = e.add(&extend(&f.derivative(k).compress(self.set), &names));
            }
            for (w, f) in weights.iter().zip(&self.multiplied) {
                e = e.add(&w.mul(&extend(&f.derivative(k).compress(self.set), &names)));
            }
            if !e.is_zero() {
                eqs.push(e);
            }
        }
        for f in &self.vanishing {
            let e = extend(&f.compress(self.set), &names);
            if !e.is_zero() {
                eqs.push(e);
            }
        }
        if self.normalize && m > 0 {
            let s = weights.iter().fold(Polynomial::zero(&names), |acc, w| acc.add(w));
            eqs.push(s.sub(&Polynomial::constant(&names, int(1))));
        }
        (eqs, n)
    }

    /// Multi-start roots with every `J`-coordinate away from zero.
    pub fn solve(&self, cfg: &SolverConfig) -> Vec<KktSolution> {
        let (eqs, n) = self.equations();
        if eqs.is_empty() {
            return Vec::new();
        }
        let nj = self.set.len();
        let idx: Vec<usize> = self.set.iter().collect();
        let rs = numeric::solve_system(&eqs, cfg);
        rs.roots
            .into_iter()
            .filter(|r| r.point[..nj].iter().all(|v| v.abs() >= cfg.dedupe_radius))
            .map(|r| {
                let mut x = vec![0.0; n];
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = r.point[k];
                }
                let lambda = r.point[nj..].iter().map(|m| m * m).collect();
                KktSolution { x, lambda }
            })
            .collect()
    }
}
