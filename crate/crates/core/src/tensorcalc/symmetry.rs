use crate::tensor::{Tensor4, Tensor5};

/// Max-norm residuals of the identities satisfied by `nabla R`, written for
/// `L(W,X,Y,Z,U)`:
/// antisymmetry in `(X,Y)` and in `(Z,U)`, the cyclic sum over `(X,Y,Z)` and
/// the cyclic sum over `(W,X,Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub first_bianchi: f64,
    pub second_bianchi: f64,
}

impl SymmetryResiduals {
    /// Name and value of the largest residual.
    pub fn worst(&self) -> (&'static str, f64) {
        [
            ("antisymmetry (X,Y)", self.antisym_first),
            ("antisymmetry (Z,U)", self.antisym_second),
            ("cyclic (X,Y,Z)", self.first_bianchi),
            ("cyclic (W,X,Y)", self.second_bianchi),
        ]
        .into_iter()
        .fold(("none", 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc })
    }

    pub fn max(&self) -> f64 {
        self.worst().1
    }
}

pub fn symmetry_residuals(t: &Tensor5) -> SymmetryResiduals {
    let mut r = SymmetryResiduals {
        antisym_first: 0.0,
        antisym_second: 0.0,
        first_bianchi: 0.0,
        second_bianchi: 0.0,
    };
    for [w, x, y, z, u] in t.indices() {
        let v = t[[w, x, y, z, u]];
        r.antisym_first = r.antisym_first.max((v + t[[w, y, x, z, u]]).abs());
        r.antisym_second = r.antisym_second.max((v + t[[w, x, y, u, z]]).abs());
        r.first_bianchi = r
            .first_bianchi
            .max((v + t[[w, y, z, x, u]] + t[[w, z, x, y, u]]).abs());
        r.second_bianchi = r
            .second_bianchi
            .max((v + t[[x, y, w, z, u]] + t[[y, w, x, z, u]]).abs());
    }
    r
}

/// Max-norm residuals of the algebraic curvature identities of `R_ijkl`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannResiduals {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
}

impl RiemannResiduals {
    pub fn max(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_second)
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
    }
}

pub fn riemann_residuals(t: &Tensor4) -> RiemannResiduals {
    let mut r = RiemannResiduals {
        antisym_first: 0.0,
        antisym_second: 0.0,
        pair_symmetry: 0.0,
        first_bianchi: 0.0,
    };
    for [i, j, k, l] in t.indices() {
        let v = t[[i, j, k, l]];
        r.antisym_first = r.antisym_first.max((v + t[[j, i, k, l]]).abs());
        r.antisym_second = r.antisym_second.max((v + t[[i, j, l, k]]).abs());
        r.pair_symmetry = r.pair_symmetry.max((v - t[[k, l, i, j]]).abs());
        r.first_bianchi = r
            .first_bianchi
            .max((v + t[[j, k, i, l]] + t[[k, i, j, l]]).abs());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_dense_tensor_breaks_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = Tensor5::from_fn(3, |_| rng.gen_range(-1.0..1.0));
            assert!(symmetry_residuals(&t).max() > 0.1);
        }
    }

    #[test]
    fn zero_tensor_has_zero_residuals() {
        assert_eq!(symmetry_residuals(&Tensor5::zeros(3)).max(), 0.0);
        assert_eq!(riemann_residuals(&Tensor4::zeros(3)).max(), 0.0);
    }
}
