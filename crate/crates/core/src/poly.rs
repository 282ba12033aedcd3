//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Face;
use crate::rational::{self, Rational};

mod parse;

pub use parse::parse;

/// Exponent vector `κ` of a monomial `x^κ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Exponent(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Coordinates with a positive entry.
    pub fn support(&self) -> VarSet {
        VarSet::from_indices(self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, _)| j))
    }

    pub fn as_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&e| rational::int(e as i64)).collect()
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Graded-lexicographic comparison: total degree first, then lexicographic.
    pub fn grlex_cmp(&self, other: &Exponent) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl std::ops::Index<usize> for Exponent {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

/// A subset `J` of the variable indices, stored as a bitmask (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const MAX_VARS: usize = 64;

    pub fn empty() -> Self {
        VarSet(0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices(it: impl IntoIterator<Item = usize>) -> Self {
        VarSet(it.into_iter().fold(0u64, |m, j| m | (1u64 << j)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&j| self.contains(j))
    }

    /// All nonempty subsets of `{0..n}`, ordered by size and then by bitmask.
    pub fn nonempty_subsets(n: usize) -> Vec<VarSet> {
        let mut all: Vec<VarSet> = (1..(1u64 << n)).map(VarSet).collect();
        all.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
        all
    }

    pub fn names(self, var_names: &[String]) -> Vec<String> {
        self.iter().filter_map(|j| var_names.get(j).cloned()).collect()
    }
}

/// Evaluation point in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Coordinates whose value is exactly nonzero.
    pub fn support(&self) -> VarSet {
        VarSet::from_indices(self.0.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(j, _)| j))
    }

    pub fn to_rationals(&self) -> Option<Vec<Rational>> {
        self.0.iter().map(|&x| rational::from_f64_decimal(x)).collect()
    }
}

impl std::ops::Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `f = Σ a_κ x^κ` over a fixed ordered list of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Exponent, Rational>,
    var_names: Vec<String>,
}

impl Polynomial {
    pub fn zero(var_names: &[String]) -> Self {
        assert!(!var_names.is_empty(), "a polynomial needs at least one variable");
        Polynomial { n: var_names.len(), terms: BTreeMap::new(), var_names: var_names.to_vec() }
    }

    pub fn constant(var_names: &[String], c: Rational) -> Self {
        let mut p = Self::zero(var_names);
        p.add_term(Exponent::zero(p.n), c);
        p
    }

    pub fn var(var_names: &[String], j: usize) -> Self {
        let mut p = Self::zero(var_names);
        p.add_term(Exponent::unit(p.n, j), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms(var_names: &[String], terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Result<Self> {
        let mut p = Self::zero(var_names);
        for (e, c) in terms {
            if e.len() != p.n {
                return Err(Error::DimensionMismatch { expected: p.n, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Default variable names `x1..xn`.
    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|j| format!("x{j}")).collect()
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term has a nonzero exponent.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Exponent::is_zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// `supp(f)`, in lexicographic exponent order.
    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    /// Variables that occur in some term.
    pub fn occurring_vars(&self) -> VarSet {
        self.terms.keys().fold(VarSet::empty(), |s, e| s.union(e.support()))
    }

    fn same_ring(&self, other: &Polynomial) {
        assert_eq!(self.n, other.n, "polynomials live in different rings");
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.same_ring(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Self::zero(&self.var_names);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect();
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.same_ring(other);
        let mut out = Self::zero(&self.var_names);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Self::constant(&self.var_names, Rational::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Floating-point value at `x`; coefficients are converted on each call.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.terms.iter().map(|(e, c)| rational::to_f64(c) * monomial_f64(e, x)).sum())
    }

    /// Exact value at a rational point.
    pub fn evaluate_exact(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xj, &k) in x.iter().zip(&e.0) {
                if k > 0 {
                    m *= num_traits::pow(xj.clone(), k as usize);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Largest absolute term value `|a_κ x^κ|` at `x`, used to scale tolerances.
    pub fn term_scale(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| (rational::to_f64(c) * monomial_f64(e, x)).abs())
            .fold(0.0, f64::max)
    }

    pub fn derivative(&self, j: usize) -> Polynomial {
        let mut out = Self::zero(&self.var_names);
        for (e, c) in &self.terms {
            let k = e.0[j];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[j] -= 1;
            out.add_term(d, c * rational::int(k as i64));
        }
        out
    }

    /// `∇p` as `n` exact partial derivatives.
    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.n).map(|j| self.derivative(j)).collect()
    }

    /// `p|_{ℝ^J}`: substitutes `x_j = 0` for every `j ∉ J`; the ambient dimension is kept.
    pub fn restrict(&self, set: VarSet) -> Result<Polynomial> {
        if set.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.filter_terms(|e| e.support().is_subset(set)))
    }

    pub fn is_constant_on(&self, set: VarSet) -> Result<bool> {
        Ok(self.restrict(set)?.is_constant())
    }

    pub fn filter_terms(&self, keep: impl Fn(&Exponent) -> bool) -> Polynomial {
        let mut out = Self::zero(&self.var_names);
        out.terms = self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect();
        out
    }

    /// `f_Δ` for a face of this polynomial's Newton polyhedron.
    pub fn face_polynomial(&self, face: &Face) -> Result<Polynomial> {
        if face.lattice_points.iter().any(|k| k.len() != self.n || !self.terms.contains_key(k)) {
            return Err(Error::FaceMismatch);
        }
        Ok(self.filter_terms(|e| face.lattice_points.binary_search(e).is_ok()))
    }

    /// `(f_{Δ(q)}, d(q))`: the terms minimizing `⟨q,κ⟩` and the minimum. `None` for the zero polynomial.
    pub fn initial_form(&self, q: &[Rational]) -> Option<(Polynomial, Rational)> {
        let values: Vec<Rational> = self.terms.keys().map(|e| rational::dot_u32(q, &e.0)).collect();
        let d = values.iter().min()?.clone();
        let mut out = Self::zero(&self.var_names);
        out.terms = self
            .terms
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v == d)
            .map(|((e, c), _)| (e.clone(), c.clone()))
            .collect();
        Some((out, d))
    }

    /// Re-expresses the polynomial in the variables of `set` only (in increasing index order).
    /// Terms that involve variables outside `set` are dropped.
    pub fn compress(&self, set: VarSet) -> Polynomial {
        let idx: Vec<usize> = set.iter().filter(|&j| j < self.n).collect();
        let names: Vec<String> = idx.iter().map(|&j| self.var_names[j].clone()).collect();
        let mut out = Self::zero(&names);
        for (e, c) in &self.terms {
            if e.support().is_subset(set) {
                out.add_term(Exponent(idx.iter().map(|&j| e.0[j]).collect()), c.clone());
            }
        }
        out
    }

    /// Float snapshot of the terms for repeated evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (rational::to_f64(c), e.0.clone())).collect(),
        }
    }

    /// Canonical text: graded-lexicographic order (highest first), explicit `*` and `^`.
    pub fn format(&self) -> String {
        self.to_string()
    }
}

fn monomial_f64(e: &Exponent, x: &[f64]) -> f64 {
    e.0.iter().zip(x).filter(|(&k, _)| k > 0).map(|(&k, &xj)| xj.powi(k as i32)).product()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Exponent, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.grlex_cmp(a.0));
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(mag.to_string());
            }
            for (j, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.var_names[j].clone()),
                    _ => factors.push(format!("{}^{}", self.var_names[j], k)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Polynomial with `f64` coefficients for inner loops of the numeric solvers.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    n: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl FloatPoly {
    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).filter(|(&k, _)| k > 0).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
