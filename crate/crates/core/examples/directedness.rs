//! Directedness and pointwise constancy of the relative sectional curvature on
//! the cosh hypersurface and on a meridian with constant `a - b`.

use std::sync::Arc;

use relcurv::directed::{constant_relcurv_test, directedness_report};
use relcurv::rotational::{CoshProfile, OdeProfile, ProfileCurve, RotationalChart};

fn show(name: &str, profile: Arc<dyn ProfileCurve>, ts: &[f64]) -> relcurv::Result<()> {
    let chart = RotationalChart::new(profile, 3)?;
    let spec = chart.spec();
    println!("{name}");
    for &t in ts {
        let p = chart.point(&[0.2, -0.3], t)?;
        let r = directedness_report(&p, &spec, 64, 42)?;
        let c = constant_relcurv_test(&p, &spec)?;
        println!(
            "  t={t:+.2} directed={} constant={} k_fit={:.6} k(|d tau|)={:.6} plane spread={:.2e} fit residual={:.2e}",
            r.directed, r.pointwise_constant, c.k_fit, c.k_from_dtau, r.k_spread, c.residual
        );
    }
    Ok(())
}

fn main() -> relcurv::Result<()> {
    show("cosh", Arc::new(CoshProfile), &[0.25, 0.5, 1.0])?;
    let ode = OdeProfile::new(1.0, 0.5, 0.2, (-0.2, 0.2), Default::default())?;
    show("a - b = 1 from r(0)=0.5, r'(0)=0.2", Arc::new(ode), &[-0.15, 0.05, 0.15])
}
