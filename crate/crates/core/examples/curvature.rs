//! Curvature of a round sphere and of a perturbed flat metric.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relcurv::metric::{ChartPoint, MetricSpec, Perturbed};
use relcurv::tensorcalc::{riemann_residuals, symmetry_residuals, CurvatureBundle};

fn main() -> relcurv::Result<()> {
    let p = ChartPoint::new(vec![0.3, -0.2, 0.1])?;
    for rho in [0.5, 1.0, 2.0] {
        let b = CurvatureBundle::at(&MetricSpec::sphere(3, rho)?, &p)?;
        println!(
            "sphere rho={rho}: tau={:.12} (6/rho^2={:.12}) |nabla R|={:.1e}",
            b.tau,
            6.0 / (rho * rho),
            b.nabla_norm()
        );
    }

    let base = MetricSpec::flat(3).field().clone();
    let bumpy = Perturbed::random(base, 0.05, 4, &mut ChaCha8Rng::seed_from_u64(3))?;
    let b = CurvatureBundle::at(&MetricSpec::new(Arc::new(bumpy)), &p)?;
    println!(
        "perturbed flat: tau={:.6e} |d tau|={:.6e} |nabla R|={:.6e}",
        b.tau,
        b.dtau_norm(),
        b.nabla_norm()
    );
    println!(
        "identity residuals: R {:.1e}, nabla R {:.1e}",
        riemann_residuals(&b.riem).max(),
        symmetry_residuals(&b.nabla_riem).max()
    );
    Ok(())
}
