//! Levi-Civita connection, curvature tensor and its covariant derivative.
//!
//! Conventions:
//! - `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]` and `R(X,Y,Z,U) = g(R(X,Y)Z, U)`,
//!   so `R(X,Y,Y,X)` is the sectional curvature of an orthonormal pair.
//! - `Ric_jk = g^{il} R_ijkl`, positive on the round sphere.
//! - `nabla_riem[[m, i, j, k, l]] = (nabla_m R)_ijkl`, differentiation slot first.

mod lemma;
mod model;
mod symmetry;

pub use lemma::{lemma23_rank_check, polarization_residual, LemmaRank, SymmetricSpace};
pub use model::{build_phi, build_pi, build_pi_form, eta_times};
pub use symmetry::{riemann_residuals, symmetry_residuals, RiemannResiduals, SymmetryResiduals};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::{evaluate_metric_jet, ChartPoint, MetricJet, MetricSpec};
use crate::tensor::{OneForm, Tensor3, Tensor4, Tensor5};

/// Christoffel symbols `gamma[[i, j, k]] = Gamma^i_jk` with
/// `dgamma[[i, j, k, m]] = d_m Gamma^i_jk` and
/// `d2gamma[[i, j, k, m, q]] = d_q d_m Gamma^i_jk`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub gamma: Tensor3,
    pub dgamma: Tensor4,
    pub d2gamma: Option<Tensor5>,
}

pub fn christoffel(jet: &MetricJet) -> Result<Christoffel> {
    let n = jet.dim();
    let g_inv = &jet.ginv;
    let dg = &jet.dg;
    let d2g = jet.d2g()?;

    // first kind, lowered index first
    let first = Tensor3::from_fn(n, |[l, j, k]| {
        0.5 * (dg[[l, k, j]] + dg[[j, l, k]] - dg[[j, k, l]])
    });
    let gamma = Tensor3::from_fn(n, |[i, j, k]| {
        (0..n).map(|l| g_inv[(i, l)] * first[[l, j, k]]).sum()
    });

    let dfirst = Tensor4::from_fn(n, |[l, j, k, m]| {
        0.5 * (d2g[[l, k, j, m]] + d2g[[j, l, k, m]] - d2g[[j, k, l, m]])
    });
    let dgamma = Tensor4::from_fn(n, |[i, j, k, m]| {
        let mut s = 0.0;
        for l in 0..n {
            let mut inner = dfirst[[l, j, k, m]];
            for p in 0..n {
                inner -= dg[[l, p, m]] * gamma[[p, j, k]];
            }
            s += g_inv[(i, l)] * inner;
        }
        s
    });

    let d2gamma = match &jet.d3g {
        None => None,
        Some(d3g) => {
            let d2first = Tensor5::from_fn(n, |[l, j, k, m, q]| {
                0.5 * (d3g[[l, k, j, m, q]] + d3g[[j, l, k, m, q]] - d3g[[j, k, l, m, q]])
            });
            Some(Tensor5::from_fn(n, |[i, j, k, m, q]| {
                let mut s = 0.0;
                for l in 0..n {
                    let mut inner = d2first[[l, j, k, m, q]];
                    for p in 0..n {
                        inner -= d2g[[l, p, m, q]] * gamma[[p, j, k]]
                            + dg[[l, p, m]] * dgamma[[p, j, k, q]]
                            + dg[[l, p, q]] * dgamma[[p, j, k, m]];
                    }
                    s += g_inv[(i, l)] * inner;
                }
                s
            }))
        }
    };

    Ok(Christoffel {
        gamma,
        dgamma,
        d2gamma,
    })
}

/// `Q^l_ijk` with `R(d_i, d_j) d_k = Q^l_ijk d_l`, stored as `[[l, i, j, k]]`.
fn curvature_operator(ch: &Christoffel) -> Tensor4 {
    let n = ch.gamma.dim();
    let (gm, dgm) = (&ch.gamma, &ch.dgamma);
    Tensor4::from_fn(n, |[l, i, j, k]| {
        let mut s = dgm[[l, j, k, i]] - dgm[[l, i, k, j]];
        for m in 0..n {
            s += gm[[m, j, k]] * gm[[l, i, m]] - gm[[m, i, k]] * gm[[l, j, m]];
        }
        s
    })
}

fn lower_curvature(q: &Tensor4, g: &DMatrix<f64>) -> Tensor4 {
    let n = q.dim();
    Tensor4::from_fn(n, |[i, j, k, l]| {
        (0..n).map(|m| g[(l, m)] * q[[m, i, j, k]]).sum()
    })
}

/// The (0,4) curvature tensor `R_ijkl`.
pub fn riemann(jet: &MetricJet) -> Result<Tensor4> {
    let ch = christoffel(jet)?;
    Ok(lower_curvature(&curvature_operator(&ch), &jet.g))
}

fn nabla_from_parts(jet: &MetricJet, ch: &Christoffel, q: &Tensor4, riem: &Tensor4) -> Result<Tensor5> {
    let n = jet.dim();
    let d2gm = ch.d2gamma.as_ref().ok_or(Error::JetOrderInsufficient {
        available: jet.order(),
        required: 3,
    })?;
    let (gm, dgm) = (&ch.gamma, &ch.dgamma);

    // d_p Q^l_ijk stored as [[l, i, j, k, p]]
    let dq = Tensor5::from_fn(n, |[l, i, j, k, p]| {
        let mut s = d2gm[[l, j, k, i, p]] - d2gm[[l, i, k, j, p]];
        for m in 0..n {
            s += dgm[[m, j, k, p]] * gm[[l, i, m]] + gm[[m, j, k]] * dgm[[l, i, m, p]]
                - dgm[[m, i, k, p]] * gm[[l, j, m]]
                - gm[[m, i, k]] * dgm[[l, j, m, p]];
        }
        s
    });

    let g = &jet.g;
    let dg = &jet.dg;
    Ok(Tensor5::from_fn(n, |[p, i, j, k, l]| {
        let mut s = 0.0;
        for m in 0..n {
            s += dg[[l, m, p]] * q[[m, i, j, k]] + g[(l, m)] * dq[[m, i, j, k, p]];
        }
        for r in 0..n {
            s -= gm[[r, p, i]] * riem[[r, j, k, l]]
                + gm[[r, p, j]] * riem[[i, r, k, l]]
                + gm[[r, p, k]] * riem[[i, j, r, l]]
                + gm[[r, p, l]] * riem[[i, j, k, r]];
        }
        s
    }))
}

/// The (0,5) tensor `(nabla_m R)_ijkl`. Needs a jet of order 3.
pub fn nabla_riemann(jet: &MetricJet) -> Result<Tensor5> {
    let ch = christoffel(jet)?;
    let q = curvature_operator(&ch);
    let riem = lower_curvature(&q, &jet.g);
    nabla_from_parts(jet, &ch, &q, &riem)
}

/// Ricci tensor and scalar curvature.
pub fn ricci_and_scalar(riem: &Tensor4, jet: &MetricJet) -> (DMatrix<f64>, f64) {
    let n = jet.dim();
    let gi = &jet.ginv;
    let ric = DMatrix::from_fn(n, n, |j, k| {
        let mut s = 0.0;
        for i in 0..n {
            for l in 0..n {
                s += gi[(i, l)] * riem[[i, j, k, l]];
            }
        }
        s
    });
    let tau = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| gi[(j, k)] * ric[(j, k)])
        .sum();
    (ric, tau)
}

/// Default residual bound for applying the contracted Bianchi identity.
pub const BIANCHI_TOLERANCE: f64 = 1e-6;
/// Looser bound for finite-difference jets, whose third derivatives carry
/// truncation and round-off error.
pub const FD_BIANCHI_TOLERANCE: f64 = 1e-2;

/// `d tau` from the contracted second Bianchi identity,
/// `(d tau)_k = 2 g^{aj} g^{il} (nabla_a R)_ijkl`.
///
/// The input must satisfy the identities of `nabla R` within `tolerance`
/// (relative to its largest component); otherwise the contraction is meaningless.
pub fn dtau_from_bianchi(nabla_riem: &Tensor5, jet: &MetricJet, tolerance: f64) -> Result<OneForm> {
    let res = symmetry_residuals(nabla_riem);
    let scale = nabla_riem.max_abs().max(1.0);
    let (identity, worst) = res.worst();
    if worst > tolerance * scale {
        return Err(Error::SymmetryViolation {
            identity,
            residual: worst,
            tolerance: tolerance * scale,
        });
    }
    let n = jet.dim();
    let gi = &jet.ginv;
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for a in 0..n {
            for j in 0..n {
                let gaj = gi[(a, j)];
                if gaj == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for l in 0..n {
                        s += gaj * gi[(i, l)] * nabla_riem[[a, i, j, k, l]];
                    }
                }
            }
        }
        *o = 2.0 * s;
    }
    Ok(OneForm(out))
}

/// `(d tau)_m = g^{jk} g^{il} (nabla_m R)_ijkl`, the direct double trace.
pub fn dtau_trace(nabla_riem: &Tensor5, jet: &MetricJet) -> OneForm {
    let n = jet.dim();
    let gi = &jet.ginv;
    OneForm(
        (0..n)
            .map(|m| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                s += gi[(j, k)] * gi[(i, l)] * nabla_riem[[m, i, j, k, l]];
                            }
                        }
                    }
                }
                s
            })
            .collect(),
    )
}

/// All curvature data at one chart point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub jet: MetricJet,
    pub christoffel: Christoffel,
    pub riem: Tensor4,
    pub nabla_riem: Tensor5,
    pub ricci: DMatrix<f64>,
    pub tau: f64,
    pub dtau: OneForm,
}

impl CurvatureBundle {
    pub fn new(jet: MetricJet) -> Result<Self> {
        Self::with_tolerance(jet, BIANCHI_TOLERANCE)
    }

    /// Evaluates the jet of `spec` at `p`, with the identity tolerance matched
    /// to the jet mode.
    pub fn at(spec: &MetricSpec, p: &ChartPoint) -> Result<Self> {
        let tol = if spec.is_analytic() { BIANCHI_TOLERANCE } else { FD_BIANCHI_TOLERANCE };
        Self::with_tolerance(evaluate_metric_jet(spec, p)?, tol)
    }

    pub fn with_tolerance(jet: MetricJet, bianchi_tolerance: f64) -> Result<Self> {
        let christoffel = christoffel(&jet)?;
        let q = curvature_operator(&christoffel);
        let riem = lower_curvature(&q, &jet.g);
        let nabla_riem = nabla_from_parts(&jet, &christoffel, &q, &riem)?;
        let (ricci, tau) = ricci_and_scalar(&riem, &jet);
        let dtau = dtau_from_bianchi(&nabla_riem, &jet, bianchi_tolerance)?;
        Ok(Self {
            jet,
            christoffel,
            riem,
            nabla_riem,
            ricci,
            tau,
            dtau,
        })
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    /// `|nabla R|_g`.
    pub fn nabla_norm(&self) -> f64 {
        self.nabla_riem.norm(&self.jet.ginv)
    }

    /// `|d tau|_g`.
    pub fn dtau_norm(&self) -> f64 {
        self.dtau.norm(&self.jet.ginv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{evaluate_metric_jet, ChartPoint, JetMode, MetricSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn jet(spec: &MetricSpec, c: &[f64]) -> MetricJet {
        evaluate_metric_jet(spec, &ChartPoint::new(c.to_vec()).unwrap()).unwrap()
    }

    /// Christoffel symbols of `diag(1, sin^2 theta)` by hand.
    #[test]
    fn polar_sphere_christoffel_by_hand() {
        let spec = MetricSpec::sphere_polar(1.0).unwrap();
        let j = jet(&spec, &[FRAC_PI_4, 0.0]);
        let ch = christoffel(&j).unwrap();
        assert_abs_diff_eq!(ch.gamma[[0, 1, 1]], -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ch.gamma[[1, 0, 1]], 1.0, epsilon = 1e-14); // cot(pi/4)
        assert_abs_diff_eq!(ch.gamma[[1, 1, 0]], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ch.gamma[[0, 0, 0]], 0.0, epsilon = 1e-14);
        // d_theta Gamma^theta_phiphi = -cos 2theta = 0 at pi/4
        assert_abs_diff_eq!(ch.dgamma[[0, 1, 1, 0]], 0.0, epsilon = 1e-14);
        // d_theta Gamma^phi_thetaphi = -1/sin^2 = -2
        assert_abs_diff_eq!(ch.dgamma[[1, 0, 1, 0]], -2.0, epsilon = 1e-13);
    }

    #[test]
    fn flat_connection_vanishes() {
        let ch = christoffel(&jet(&MetricSpec::flat(3), &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(ch.gamma.max_abs(), 0.0);
        assert_eq!(ch.dgamma.max_abs(), 0.0);
    }

    #[test]
    fn connection_is_scale_invariant() {
        let j = jet(&MetricSpec::sphere(3, 1.0).unwrap(), &[0.1, 0.3, -0.2]);
        let a = christoffel(&j).unwrap();
        let b = christoffel(&j.scaled(3.7).unwrap()).unwrap();
        assert!(a.gamma.max_diff(&b.gamma) < 1e-14);
        assert!(a.dgamma.max_diff(&b.dgamma) < 1e-13);
    }

    #[test]
    fn polar_sphere_curvature_at_equator() {
        let spec = MetricSpec::sphere_polar(1.0).unwrap();
        let r = riemann(&jet(&spec, &[FRAC_PI_2, 0.3])).unwrap();
        assert_abs_diff_eq!(r[[0, 1, 1, 0]], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[[0, 1, 0, 1]], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_two_sphere_scalar_curvature() {
        let spec = MetricSpec::sphere_polar(1.0).unwrap();
        let j = jet(&spec, &[1.1, 0.3]);
        let (_, tau) = ricci_and_scalar(&riemann(&j).unwrap(), &j);
        assert_abs_diff_eq!(tau, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn sphere_is_constant_curvature_and_locally_symmetric() {
        for (n, rho) in [(2, 0.5), (3, 1.0), (4, 2.0)] {
            let spec = MetricSpec::sphere(n, rho).unwrap();
            let j = jet(&spec, &vec![0.3; n]);
            let b = CurvatureBundle::new(j).unwrap();
            let pi = build_pi(&b.jet);
            assert!(b.riem.max_diff(&pi.scaled(1.0 / (rho * rho))) < 1e-9);
            assert_abs_diff_eq!(b.tau, (n * (n - 1)) as f64 / (rho * rho), epsilon = 1e-9);
            assert!(b.nabla_riem.max_abs() < 1e-9);
            assert!(b.dtau.max_abs() < 1e-9);
        }
    }

    #[test]
    fn scalar_curvature_scales_inversely() {
        let j = jet(&MetricSpec::sphere(3, 1.0).unwrap(), &[0.2, 0.1, 0.0]);
        let (_, tau) = ricci_and_scalar(&riemann(&j).unwrap(), &j);
        let js = j.scaled(4.0).unwrap();
        let (_, tau_s) = ricci_and_scalar(&riemann(&js).unwrap(), &js);
        assert_abs_diff_eq!(tau_s, tau / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn nabla_needs_third_order_jet() {
        let spec = MetricSpec::flat(2).with_mode(JetMode::FiniteDifference { order: 2 });
        let err = nabla_riemann(&jet(&spec, &[0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::JetOrderInsufficient { required: 3, .. }));
    }

    #[test]
    fn bianchi_rejects_non_curvature_input() {
        let j = jet(&MetricSpec::flat(3), &[0.0, 0.0, 0.0]);
        let junk = Tensor5::from_fn(3, |[a, b, c, d, e]| (a + 2 * b + 3 * c + 5 * d + 7 * e) as f64);
        assert!(matches!(
            dtau_from_bianchi(&junk, &j, 1e-9),
            Err(Error::SymmetryViolation { .. })
        ));
    }
}
