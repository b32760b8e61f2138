//! Meridians with constant `a - b`: ODE, quadrature and elliptic forms.

use relcurv::rotational::{
    elliptic_case_i, elliptic_case_ii, elliptic_vs_quadrature, meridian_ode, meridian_quadrature,
    ode_vs_quadrature, turning_radii, MeridianProblem,
};

fn main() -> relcurv::Result<()> {
    let rho: f64 = 1.3;
    let sol = meridian_ode(&MeridianProblem::new(1.0 / (rho * rho), rho, 0.0, (-1.0, 1.0)))?;
    let circle = sol
        .samples
        .iter()
        .map(|s| (s.t * s.t + s.r * s.r - rho * rho).abs())
        .fold(0.0, f64::max);
    println!("circle recovery: max |t^2 + r^2 - rho^2| = {circle:.2e}");

    let sol = meridian_ode(&MeridianProblem::new(1.0, 0.5, 0.2, (-0.2, 0.2)))?;
    println!("A = b/r^2 = {:.10} with spread {:.1e}", sol.a_const, sol.a_spread);

    let rt = turning_radii(1.0, 1.0)[0];
    println!("(A, B) = (1, 1): turning radius {rt:.12}");
    for (t, r) in meridian_quadrature(1.0, 1.0, (0.3, rt), 5)? {
        println!("  quadrature t={t:+.10} r={r:.10}");
    }
    println!("  ODE vs quadrature {:.1e}", ode_vs_quadrature(1.0, 1.0, (0.2, rt), 40)?);
    println!("  elliptic vs quadrature {:.1e}", elliptic_vs_quadrature(1.0, 1.0, 40)?);
    let (r, t) = elliptic_case_i(1.0, 1.0, 0.5)?;
    println!("  elliptic point x=0.5: r={r:.10} t={t:+.10}");

    println!("(A, B) = (-1, 2.5): outer branch");
    println!("  elliptic vs quadrature {:.1e}", elliptic_vs_quadrature(-1.0, 2.5, 40)?);
    let (r, t) = elliptic_case_ii(-1.0, 2.5, 0.5)?;
    println!("  elliptic point x=0.5: r={r:.10} t={t:+.10}");
    Ok(())
}
