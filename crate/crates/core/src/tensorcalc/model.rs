//! Model curvature-type tensors built from the metric and a one-form.

use crate::error::{Error, Result};
use crate::metric::MetricJet;
use crate::tensor::{OneForm, Tensor4, Tensor5};

/// `pi(X,Y,Z,U) = g(Y,Z) g(X,U) - g(X,Z) g(Y,U)`.
pub fn build_pi(jet: &MetricJet) -> Tensor4 {
    let g = &jet.g;
    Tensor4::from_fn(jet.dim(), |[i, j, k, l]| {
        g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)]
    })
}

/// Unit-norm tolerance for `eta` in [`build_phi`].
pub const UNIT_TOLERANCE: f64 = 1e-8;

/// `Phi(X,Y,Z,U) = g(Y,Z) eta(X) eta(U) - g(X,Z) eta(Y) eta(U)
///               + g(X,U) eta(Y) eta(Z) - g(Y,U) eta(X) eta(Z)`.
pub fn build_phi(jet: &MetricJet, eta: &OneForm) -> Result<Tensor4> {
    let norm = eta.norm(&jet.ginv);
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnit { norm });
    }
    let g = &jet.g;
    let e = &eta.0;
    Ok(Tensor4::from_fn(jet.dim(), |[i, j, k, l]| {
        g[(j, k)] * e[i] * e[l] - g[(i, k)] * e[j] * e[l] + g[(i, l)] * e[j] * e[k]
            - g[(j, l)] * e[i] * e[k]
    }))
}

/// The rank-5 pattern
/// `2 w(W) pi(X,Y,Z,U) + w(X) pi(W,Y,Z,U) + w(Y) pi(X,W,Z,U) + w(Z) pi(X,Y,W,U) + w(U) pi(X,Y,Z,W)`.
pub fn build_pi_form(omega: &OneForm, jet: &MetricJet) -> Tensor5 {
    let pi = build_pi(jet);
    let w = &omega.0;
    Tensor5::from_fn(jet.dim(), |[a, x, y, z, u]| {
        2.0 * w[a] * pi[[x, y, z, u]]
            + w[x] * pi[[a, y, z, u]]
            + w[y] * pi[[x, a, z, u]]
            + w[z] * pi[[x, y, a, u]]
            + w[u] * pi[[x, y, z, a]]
    })
}

/// `(eta (x) T)_{i...} = eta_i T_{...}`.
pub fn eta_times(eta: &OneForm, t: &Tensor4) -> Tensor5 {
    let e = &eta.0;
    Tensor5::from_fn(t.dim(), |[i, j, k, p, q]| e[i] * t[[j, k, p, q]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{evaluate_metric_jet, ChartPoint, MetricSpec};
    use crate::tensorcalc::symmetry_residuals;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn flat_jet(n: usize) -> MetricJet {
        evaluate_metric_jet(&MetricSpec::flat(n), &ChartPoint::new(vec![0.0; n]).unwrap()).unwrap()
    }

    #[test]
    fn pi_on_orthonormal_pair() {
        let pi = build_pi(&flat_jet(2));
        let (x, y) = ([1.0, 0.0], [0.0, 1.0]);
        assert_eq!(pi.eval([&x, &y, &y, &x]), 1.0);
        assert_eq!(pi.eval([&x, &x, &y, &x]), 0.0);
        // the defining formula: pi_1221 = +1, pi_1212 = -1
        assert_eq!(pi[[0, 1, 1, 0]], 1.0);
        assert_eq!(pi[[0, 1, 0, 1]], -1.0);
    }

    #[test]
    fn phi_values_on_adapted_frame() {
        let j = flat_jet(3);
        let eta = OneForm(vec![0.0, 0.0, 1.0]);
        let phi = build_phi(&j, &eta).unwrap();
        let (x, y, xi) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert_eq!(phi.eval([&x, &y, &y, &x]), 0.0);
        assert_eq!(phi.eval([&xi, &x, &x, &xi]), 1.0);

        let s = 0.5f64.sqrt();
        let (p, q) = ([s, 0.0, s], [0.0, 1.0, 0.0]);
        let cos2 = eta.apply(&p).powi(2) + eta.apply(&q).powi(2);
        assert_abs_diff_eq!(phi.eval([&p, &q, &q, &p]), cos2, epsilon = 1e-15);
    }

    #[test]
    fn phi_requires_unit_form() {
        let err = build_phi(&flat_jet(2), &OneForm(vec![2.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotUnit { .. }));
    }

    #[test]
    fn pi_form_of_zero_vanishes() {
        assert_eq!(build_pi_form(&OneForm::zeros(3), &flat_jet(3)).max_abs(), 0.0);
    }

    proptest! {
        #[test]
        fn pi_form_has_nabla_r_symmetries(w in prop::collection::vec(-3.0f64..3.0, 4)) {
            let t = build_pi_form(&OneForm(w), &flat_jet(4));
            let r = symmetry_residuals(&t);
            prop_assert!(r.worst().1 < 1e-12);
        }

        #[test]
        fn pi_form_contraction_on_orthonormal_pair(angle in 0.0f64..std::f64::consts::TAU, tilt in 0.0f64..1.5) {
            // eta unit, X and Y orthonormal in R^3
            let j = flat_jet(3);
            let eta = OneForm(vec![tilt.sin(), 0.0, tilt.cos()]);
            let x = [angle.cos(), angle.sin(), 0.0];
            let y = [-angle.sin() * 0.6, angle.cos() * 0.6, 0.8];
            let t = build_pi_form(&eta, &j);
            let v = t.eval([&x, &x, &y, &y, &x]);
            prop_assert!((v - 4.0 * eta.apply(&x)).abs() < 1e-12);
        }
    }
}
