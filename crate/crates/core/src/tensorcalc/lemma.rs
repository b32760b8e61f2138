//! Brute-force rank computations on the space of rank-5 tensors with the
//! symmetries of `nabla R`.
//!
//! Unknowns are parametrised by one direction index and two strictly ordered
//! antisymmetric index pairs, so both antisymmetries hold by construction and
//! only the two cyclic identities are stacked as linear constraints.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::Tensor5;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_RELATIVE_TOLERANCE: f64 = 1e-8;
/// Below this gap the numerical rank is reported as ambiguous.
pub const MIN_RANK_GAP: f64 = 1e4;
const RANDOM_PAIRS: usize = 20;
const POLARIZATION_SEED: u64 = 0x5eed_2300;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRank {
    pub n: usize,
    /// Dimension of the space cut out by the four identities.
    pub dim_sym: usize,
    /// Dimension left after imposing `L(X,X,Z,Z,X) = 0` on the polarizing family.
    pub dim_constrained: usize,
    /// Singular-value gap of each rank decision.
    pub gap_sym: f64,
    pub gap_constrained: f64,
    pub polarizing_pairs: usize,
}

impl LemmaRank {
    pub fn min_gap(&self) -> f64 {
        self.gap_sym.min(self.gap_constrained)
    }
}

/// Maps the reduced unknowns into full components.
struct Parametrization {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Parametrization {
    fn new(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self { n, pairs }
    }

    fn unknowns(&self) -> usize {
        self.n * self.pairs.len() * self.pairs.len()
    }

    fn pair_index(&self, a: usize, b: usize) -> Option<(usize, f64)> {
        if a == b {
            return None;
        }
        let (lo, hi, s) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let p = self.pairs.iter().position(|&q| q == (lo, hi)).unwrap();
        Some((p, s))
    }

    /// Variable index and sign carrying component `L[w, x, y, z, u]`.
    fn var(&self, [w, x, y, z, u]: [usize; 5]) -> Option<(usize, f64)> {
        let (p, s1) = self.pair_index(x, y)?;
        let (q, s2) = self.pair_index(z, u)?;
        let np = self.pairs.len();
        Some(((w * np + p) * np + q, s1 * s2))
    }

    fn accumulate(&self, row: &mut [f64], idx: [usize; 5], coef: f64) {
        if let Some((v, s)) = self.var(idx) {
            row[v] += s * coef;
        }
    }

    fn tensor(&self, coeffs: &[f64]) -> Tensor5 {
        Tensor5::from_fn(self.n, |idx| match self.var(idx) {
            Some((v, s)) => s * coeffs[v],
            None => 0.0,
        })
    }
}

/// Numerical rank and the separation of the singular values around it.
fn rank_with_gap(sv: &[f64]) -> (usize, f64) {
    let mut s: Vec<f64> = sv.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, f64::INFINITY);
    }
    let rank = s.iter().filter(|&&v| v > RANK_RELATIVE_TOLERANCE * smax).count();
    let floor = smax * f64::EPSILON;
    let below = s.get(rank).copied().unwrap_or(0.0).max(floor);
    let gap = if rank == 0 { f64::INFINITY } else { s[rank - 1] / below };
    (rank, gap)
}

/// Null space (columns) of `m`, with the gap of the rank decision.
fn null_space(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let (rank, gap) = rank_with_gap(&sv);
    let smax = sv.iter().fold(0.0f64, |a, b| a.max(*b));
    let null: Vec<usize> = (0..sv.len())
        .filter(|&i| smax == 0.0 || sv[i] <= RANK_RELATIVE_TOLERANCE * smax)
        .collect();
    debug_assert_eq!(null.len(), cols - rank);
    let basis = DMatrix::from_fn(cols, null.len(), |r, c| v_t[(null[c], r)]);
    (basis, gap)
}

fn cyclic_constraints(par: &Parametrization) -> DMatrix<f64> {
    let n = par.n;
    let p = par.unknowns();
    let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for u in 0..n {
                        let mut first = vec![0.0; p];
                        par.accumulate(&mut first, [w, x, y, z, u], 1.0);
                        par.accumulate(&mut first, [w, y, z, x, u], 1.0);
                        par.accumulate(&mut first, [w, z, x, y, u], 1.0);
                        let mut second = vec![0.0; p];
                        par.accumulate(&mut second, [w, x, y, z, u], 1.0);
                        par.accumulate(&mut second, [x, y, w, z, u], 1.0);
                        par.accumulate(&mut second, [y, w, x, z, u], 1.0);
                        for r in [first, second] {
                            if r.iter().any(|&c| c != 0.0) {
                                rows.insert(r.iter().map(|&c| c as i64).collect());
                            }
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<_> = rows.into_iter().collect();
    DMatrix::from_fn(rows.len(), p, |r, c| rows[r][c] as f64)
}

/// Basis of the tensors satisfying the antisymmetries and both cyclic identities.
#[derive(Debug, Clone)]
pub struct SymmetricSpace {
    pub n: usize,
    pub basis: Vec<Tensor5>,
    gap: f64,
}

impl SymmetricSpace {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=4).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "rank check supports 2 <= n <= 4, got {n}"
            )));
        }
        let par = Parametrization::new(n);
        let (null, gap) = null_space(&cyclic_constraints(&par));
        if gap < MIN_RANK_GAP {
            return Err(Error::RankTolerance { gap });
        }
        let basis = (0..null.ncols())
            .map(|c| par.tensor(null.column(c).as_slice()))
            .collect();
        Ok(Self { n, basis, gap })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// A seeded random element.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> Tensor5 {
        let mut t = Tensor5::zeros(self.n);
        for b in &self.basis {
            let c: f64 = StandardNormal.sample(rng);
            t = t.add_scaled(c, b);
        }
        t
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn combo(n: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &(i, s) in terms {
        v[i] += s;
    }
    v
}

/// The fixed basis part of the polarizing family plus seeded Gaussian pairs.
fn polarizing_family(n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for i in 0..n {
        xs.push(unit(n, i));
        zs.push(unit(n, i));
        for j in i + 1..n {
            xs.push(combo(n, &[(i, 1.0), (j, 1.0)]));
            xs.push(combo(n, &[(i, 1.0), (j, -1.0)]));
            zs.push(combo(n, &[(i, 1.0), (j, 1.0)]));
            for k in j + 1..n {
                xs.push(combo(n, &[(i, 1.0), (j, 1.0), (k, 1.0)]));
            }
        }
    }
    let mut pairs: Vec<_> = xs
        .iter()
        .flat_map(|x| zs.iter().map(move |z| (x.clone(), z.clone())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(POLARIZATION_SEED);
    for _ in 0..RANDOM_PAIRS {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        pairs.push((x, z));
    }
    pairs
}

/// Computes the dimension of the `nabla R`-type tensor space for `n` and the
/// dimension remaining after imposing `L(X,X,Z,Z,X) = 0` on a polarizing family.
pub fn lemma23_rank_check(n: usize) -> Result<LemmaRank> {
    let space = SymmetricSpace::new(n)?;
    let pairs = polarizing_family(n);
    let d = space.dim();
    let dim_constrained;
    let gap_constrained;
    if d == 0 {
        dim_constrained = 0;
        gap_constrained = f64::INFINITY;
    } else {
        let mut m = DMatrix::zeros(pairs.len(), d);
        for (r, (x, z)) in pairs.iter().enumerate() {
            let vals: Vec<f64> = space
                .basis
                .iter()
                .map(|b| b.eval([x, x, z, z, x]))
                .collect();
            let scale = x.iter().map(|v| v * v).sum::<f64>().powf(1.5)
                * z.iter().map(|v| v * v).sum::<f64>();
            for (c, v) in vals.into_iter().enumerate() {
                m[(r, c)] = v / scale;
            }
        }
        let (null, gap) = null_space(&m);
        dim_constrained = null.ncols();
        gap_constrained = gap;
    }
    if gap_constrained < MIN_RANK_GAP {
        return Err(Error::RankTolerance {
            gap: gap_constrained,
        });
    }
    Ok(LemmaRank {
        n,
        dim_sym: d,
        dim_constrained,
        gap_sym: space.gap,
        gap_constrained,
        polarizing_pairs: pairs.len(),
    })
}

/// For `L` in the symmetric space: the deviation between
/// `L(X,Y,Z,Z,Y) + 2 L(Y,X,Z,Z,Y)` and the second polarization
/// `[q(X+Y,Z) + q(X-Y,Z) - 2 q(X,Z)] / 2` of `q(X,Z) = L(X,X,Z,Z,X)`.
pub fn polarization_residual(l: &Tensor5, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let q = |v: &[f64]| l.eval([v, v, z, z, v]);
    let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let second = 0.5 * (q(&plus) + q(&minus) - 2.0 * q(x));
    let lhs = l.eval([x, y, z, z, y]) + 2.0 * l.eval([y, x, z, z, y]);
    (lhs - second).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorcalc::symmetry_residuals;

    /// Independent oracle: full n^5 unknowns, all four identities stacked, dense SVD.
    fn brute_force_dim(n: usize) -> usize {
        let total = n.pow(5);
        let idx = |t: [usize; 5]| t.iter().fold(0, |acc, &i| acc * n + i);
        let mut rows = Vec::new();
        for t in crate::tensor::MultiIndex::<5>::new(n) {
            let [w, x, y, z, u] = t;
            let groups: [&[[usize; 5]]; 4] = [
                &[[w, x, y, z, u], [w, y, x, z, u]],
                &[[w, x, y, z, u], [w, x, y, u, z]],
                &[[w, x, y, z, u], [w, y, z, x, u], [w, z, x, y, u]],
                &[[w, x, y, z, u], [x, y, w, z, u], [y, w, x, z, u]],
            ];
            for g in groups {
                let mut r = vec![0.0; total];
                for &c in g {
                    r[idx(c)] += 1.0;
                }
                rows.push(r);
            }
        }
        let m = DMatrix::from_fn(rows.len(), total, |r, c| rows[r][c]);
        let sv = m.svd(false, false).singular_values;
        let smax = sv.max();
        total - sv.iter().filter(|&&s| s > 1e-8 * smax).count()
    }

    #[test]
    fn reduced_dimension_matches_brute_force() {
        for n in [2, 3] {
            assert_eq!(SymmetricSpace::new(n).unwrap().dim(), brute_force_dim(n));
        }
    }

    #[test]
    fn dimension_formula() {
        // n^2 (n^2 - 1)(n + 2) / 24
        for (n, d) in [(2, 2), (3, 15), (4, 60)] {
            assert_eq!(SymmetricSpace::new(n).unwrap().dim(), d);
        }
    }

    #[test]
    fn basis_elements_satisfy_identities() {
        let space = SymmetricSpace::new(3).unwrap();
        for b in &space.basis {
            assert!(symmetry_residuals(b).max() < 1e-12);
        }
    }

    #[test]
    fn constrained_space_is_trivial() {
        for n in [2, 3] {
            let r = lemma23_rank_check(n).unwrap();
            assert_eq!(r.dim_constrained, 0);
            assert!(r.min_gap() >= 1e6);
        }
    }

    #[test]
    fn polarization_identity_on_random_elements() {
        let space = SymmetricSpace::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let l = space.sample(&mut rng);
            let v: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let scale = l.max_abs();
            assert!(polarization_residual(&l, &v[0], &v[1], &v[2]) < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn out_of_range_dimension_is_rejected() {
        assert!(matches!(
            lemma23_rank_check(5),
            Err(Error::InvalidArgument(_))
        ));
    }
}
