//! Seeded random polynomials shared by the integration tests.
#![allow(dead_code)]

use newton_infinity::poly::{Exponent, Polynomial};
use newton_infinity::rational::int;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn names(n: usize) -> Vec<String> {
    ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
}

fn exponent(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> Exponent {
    let total = rng.gen_range(0..=max_degree);
    let mut e = vec![0u32; n];
    for _ in 0..total {
        e[rng.gen_range(0..n)] += 1;
    }
    Exponent(e)
}

fn coefficient(rng: &mut ChaCha8Rng) -> i64 {
    let c = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

/// Sparse polynomial in `n` variables with total degree at most `max_degree`.
pub fn sparse(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, terms: usize) -> Polynomial {
    loop {
        let p = Polynomial::from_terms(
            &names(n),
            (0..terms).map(|_| (exponent(rng, n, max_degree), int(coefficient(rng)))),
        )
        .expect("valid exponents");
        if !p.is_constant() {
            return p;
        }
    }
}

/// A polynomial of degree at most six; every other one is a sum of squares
/// plus a constant, hence bounded below.
pub fn random_instance(seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    if seed % 2 == 0 {
        let terms = rng.gen_range(2..=5);
        sparse(&mut rng, n, 6, terms)
    } else {
        let squares = rng.gen_range(1..=2);
        let mut p = Polynomial::constant(&names(n), int(rng.gen_range(-2..=2)));
        for _ in 0..squares {
            let terms = rng.gen_range(1..=3);
            p = p.add(&sparse(&mut rng, n, 3, terms).pow(2));
        }
        if p.is_constant() {
            p = p.add(&Polynomial::var(&names(n), 0).pow(2));
        }
        p
    }
}

pub fn is_sum_of_squares_instance(seed: u64) -> bool {
    seed % 2 == 1
}

/// Degenerate-at-infinity instances appended to the random suite.
pub fn degenerate_instances() -> Vec<Polynomial> {
    use newton_infinity::poly::parse;
    vec![
        parse("x^2*(x*y - 1)^2 + 1", &names(2)).unwrap(),
        parse("y^2*(x*y - 1)^2 + x", &names(2)).unwrap(),
        parse("z^2*(x*z - 1)^2 + y^2", &names(3)).unwrap(),
    ]
}
