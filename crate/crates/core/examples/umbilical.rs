//! The level sets of the scalar curvature as a totally umbilical distribution.

use std::sync::Arc;

use relcurv::distribution::{
    leaf_gauss_check, remark43_constant_fit, corrected_constant_fit, theorem42_check,
    umbilicity_residual, UnitField,
};
use relcurv::rotational::{turning_radii, CoshProfile, OdeProfile, RotationalChart};

fn main() -> relcurv::Result<()> {
    let chart = RotationalChart::new(Arc::new(CoshProfile), 3)?;
    let spec = chart.spec();
    for field in [UnitField::axial(&chart), UnitField::from_dtau(&spec)] {
        let p = chart.point(&[0.2, 0.1], 0.5)?;
        let u = umbilicity_residual(&field, &p, &spec)?;
        println!(
            "cosh {}: lambda={:.10} umbilic residual {:.1e} involutive residual {:.1e} |theta|={:.1e}",
            field.source(),
            u.lambda_fit,
            u.residual_eq24,
            u.residual_involutive,
            u.theta.max_abs()
        );
    }
    println!("Gauss closure at t=0.5: {:.1e}", leaf_gauss_check(Arc::new(CoshProfile), 3, 0.5)?);

    let profile = Arc::new(OdeProfile::new(1.0, 0.5, 0.2, (-0.2, 0.2), Default::default())?);
    let rep = theorem42_check(profile, 3, 4)?;
    for l in &rep.leaves {
        println!(
            "leaf t={:+.3}: k={:.6} spread {:.1e} |nabla_xi xi| {:.1e}",
            l.t, l.k_mean, l.k_spread, l.geodesic_residual
        );
    }

    let rt = turning_radii(1.0, 1.0)[0];
    let m = Arc::new(OdeProfile::new(1.0, rt, 0.0, (-0.3, 0.3), Default::default())?);
    let ts: Vec<f64> = (0..20).map(|i| -0.28 + 0.56 * i as f64 / 19.0).collect();
    let lit = remark43_constant_fit(m.clone(), 3, 1.0, &ts)?;
    let cor = corrected_constant_fit(m, 3, 1.0, &ts)?;
    println!("constant fit with tau - 3B: relative spread {:.3}", lit.relative_spread);
    println!(
        "constant fit with tau - 6B: relative spread {:.1e}, C = {:.8} (4(n-1)(n+2)A = 40)",
        cor.relative_spread, cor.estimates[0].1
    );
    Ok(())
}
