//! Surfaces of revolution: the sectional 1-form is the differential of the
//! Gaussian curvature.

use std::sync::Arc;

use relcurv::distribution::{surface_gauss_curvature, surface_sectional_form};
use relcurv::rotational::CoshProfile;

fn main() -> relcurv::Result<()> {
    for t in [0.0, 0.25, 0.5, 1.0] {
        let s = surface_sectional_form(Arc::new(CoshProfile), t)?;
        println!(
            "t={t:.2} K={:+.8} dK/dt={:+.8} phi_t={:+.8} k=|dK|={:.8}",
            surface_gauss_curvature(&CoshProfile, t)?,
            s.dk.0[1],
            s.phi.0[1],
            s.k_value
        );
    }
    Ok(())
}
