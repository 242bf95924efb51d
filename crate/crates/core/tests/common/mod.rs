#![allow(dead_code)]

use std::collections::BTreeMap;

use chern_gap::invariants::SweepConfig;
use chern_gap::laurent::{BiLaurentPoly, BundleData, ZUMonomial};
use chern_gap::linalg::Rat;
use num_traits::{One, Zero};

pub fn bundle(j: u32, p: &str) -> BundleData {
    BundleData::new(j, p.parse().expect("valid polynomial")).expect("valid bundle")
}

pub fn sweep_config(j: u32, seed: u64, samples: usize) -> SweepConfig {
    SweepConfig {
        j,
        samples,
        coeff_min: -5,
        coeff_max: 5,
        seed,
        density: 0.5,
    }
}

pub fn random_bundle(j: u32, seed: u64, index: usize) -> BundleData {
    BundleData::new(j, sweep_config(j, seed, index + 1).sample(index)).expect("window sample")
}

/// Rank by dense Gaussian elimination, independent of the library's sparse
/// elimination.
pub fn dense_rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        let pivot_row: Vec<Rat> = rows[rank].iter().map(|v| v / &pivot).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// dim H⁰(ℓ_n) by brute force: all pairs `(a, b)` of polynomials in `z, u`
/// modulo `u^{n+1}` with bounded z-degree whose V-frame image
/// `(z^j a + p b, z^{-j} b)` has no monomial `z^k u^i` with `k > i`.
pub fn naive_h0(bundle: &BundleData, n: u32) -> usize {
    let j = i64::from(bundle.j());
    let kmax = i64::from(n) + 3 * j + 2;
    let mut unknowns = Vec::new();
    for comp in 0..2 {
        for i in 0..=n {
            for k in 0..=kmax {
                unknowns.push((comp, ZUMonomial::new(k, i)));
            }
        }
    }
    let mut equations: BTreeMap<(usize, ZUMonomial), Vec<Rat>> = BTreeMap::new();
    let width = unknowns.len();
    for (col, &(comp, m)) in unknowns.iter().enumerate() {
        let mono = BiLaurentPoly::from_terms([(m, Rat::one())]);
        let (a, b) = if comp == 0 {
            (mono, BiLaurentPoly::zero())
        } else {
            (BiLaurentPoly::zero(), mono)
        };
        let (va, vb) = bundle.to_v_frame(&a, &b);
        for (out, image) in [(0usize, va), (1, vb)] {
            for (t, c) in image.truncate_u(n).terms() {
                if t.k > i64::from(t.i) {
                    equations
                        .entry((out, t))
                        .or_insert_with(|| vec![Rat::zero(); width])[col] += c;
                }
            }
        }
    }
    width - dense_rank(equations.into_values().collect())
}

/// `χ(ℓ_n)` for graded pieces `O(j+i) ⊕ O(i−j)`, `i = 0..n`.
pub fn euler_characteristic(n: u32) -> usize {
    ((n + 1) * (n + 2)) as usize
}
