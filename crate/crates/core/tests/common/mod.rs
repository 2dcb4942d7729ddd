//! Random filtered complexes and dense oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabkit::chain::ChainComplex;
use stabkit::exact::{Field, PrimeField, SparseMatrix};
use stabkit::graded::{Degree, DegreeBox};
use stabkit::spectral::FilteredComplex;

/// Rank over F_p by plain Gaussian elimination on dense rows.
pub fn oracle_rank(p: u64, mut m: Vec<Vec<u64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] % p != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|i| i * m[rank][c] % p == 1).unwrap();
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] % p != 0 {
                let k = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p * p - k * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub struct RandomFiltered {
    pub fc: FilteredComplex<PrimeField>,
    /// Dense differentials keyed by source bidegree, `rows x cols`.
    pub dense: Vec<(Degree, Vec<Vec<u64>>)>,
    pub dims: BTreeMap<Degree, usize>,
}

/// Sum of elementary filtered complexes (single classes and pairs
/// `x -> y` with `filt(y) <= filt(x)`), conjugated by random
/// filtration-preserving unitriangular changes of basis.
pub fn random_filtered(seed: u64, p: u64, n_max: i64, strata: i64) -> RandomFiltered {
    let field = PrimeField::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: BTreeMap<Degree, Vec<i64>> = Default::default();
    let mut pairs: Vec<(Degree, usize, usize)> = Vec::new();
    for n in 0..=n_max {
        for _ in 0..rng.gen_range(0..4) {
            let d = rng.gen_range(0..3);
            let fx = rng.gen_range(-strata + 1..=0);
            if rng.gen_bool(0.6) {
                let fy = rng.gen_range(-strata + 1..=fx);
                let xs = basis.entry(Degree::bi(n, d + 1)).or_default();
                xs.push(fx);
                let xi = xs.len() - 1;
                let ys = basis.entry(Degree::bi(n, d)).or_default();
                ys.push(fy);
                pairs.push((Degree::bi(n, d + 1), xi, ys.len() - 1));
            } else {
                basis.entry(Degree::bi(n, d)).or_default().push(fx);
            }
        }
    }
    // Unitriangular T per spot: T[i][j] may be nonzero when i != j and
    // (filt_i, i) < (filt_j, j).
    let mut t: BTreeMap<Degree, Vec<Vec<u64>>> = Default::default();
    for (deg, filt) in &basis {
        let k = filt.len();
        let mut m = vec![vec![0u64; k]; k];
        for i in 0..k {
            m[i][i] = 1;
            for j in 0..k {
                if i != j && (filt[i], i) < (filt[j], j) && rng.gen_bool(0.5) {
                    m[i][j] = rng.gen_range(0..p);
                }
            }
        }
        t.insert(*deg, m);
    }
    let inverse = |m: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        let dense: Vec<Vec<_>> = m.iter().map(|r| r.iter().map(|&x| field.from_i64(x as i64)).collect()).collect();
        stabkit::exact::invert(&field, &dense).unwrap().to_vec()
    };
    let mul = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        let (r, k, c) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
        (0..r).map(|i| (0..c).map(|j| (0..k).map(|l| a[i][l] * b[l][j] % p).sum::<u64>() % p).collect()).collect()
    };
    let known = DegreeBox::new(n_max, -1, 4);
    let mut cx = ChainComplex::new(field.clone(), known);
    let mut dims = BTreeMap::new();
    for (deg, filt) in &basis {
        cx.add_spot(*deg, filt.iter().enumerate().map(|(i, _)| format!("e{}_{}_{i}", deg.n, deg.d)).collect(), filt.clone());
        dims.insert(*deg, filt.len());
    }
    let mut dense = Vec::new();
    for (deg, filt) in &basis {
        let below = *deg + Degree::bi(0, -1);
        let Some(bf) = basis.get(&below) else { continue };
        let mut d0 = vec![vec![0u64; filt.len()]; bf.len()];
        for (src, xi, yi) in &pairs {
            if src == deg {
                d0[*yi][*xi] = 1;
            }
        }
        // d' = T_below^{-1} d T_source keeps filtrations.
        let d1 = mul(&inverse(&t[&below]), &mul(&d0, &t[deg]));
        let trip = d1
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, x)| **x != 0).map(move |(j, x)| (i, j, *x)))
            .collect::<Vec<_>>();
        let m = SparseMatrix::from_accumulated(field.clone(), bf.len(), filt.len(), trip);
        cx.set_differential(*deg, m).unwrap();
        dense.push((*deg, d1));
    }
    cx.check_square_zero().unwrap();
    RandomFiltered { fc: FilteredComplex::new(cx).unwrap(), dense, dims }
}

impl RandomFiltered {
    pub fn oracle_homology(&self, p: u64, deg: Degree) -> usize {
        let dim = self.dims.get(&deg).copied().unwrap_or(0);
        let rank_of = |src: Degree| self.dense.iter().find(|(d, _)| *d == src).map_or(0, |(_, m)| oracle_rank(p, m.clone()));
        dim - rank_of(deg) - rank_of(deg + Degree::bi(0, 1))
    }
}
