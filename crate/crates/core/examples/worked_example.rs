//! The two-dimensional worked example: checks the hypotheses, confirms the
//! zero solution is periodic and shows where the certificate breaks down.

use lyapcert::config::example4_config;
use lyapcert::hypothesis::{check_theorem_conditions, spectral_bounds};
use lyapcert::orbits::{find_periodic, multistart_periodic, ShootingOptions};
use lyapcert::system::State;

fn main() -> lyapcert::Result<()> {
    let config = example4_config();
    let sys = config.system(None)?;
    let domain = config.domain_box(None, None, None)?;

    let bounds = spectral_bounds(&sys, &domain, None)?;
    println!(
        "A: [{}, {}], B: [{}, {}]",
        bounds.a_min, bounds.a_max, bounds.b_min, bounds.b_max
    );
    println!("secant of H: [{}, {}]", bounds.h_min, bounds.h_max);
    let report = check_theorem_conditions(&bounds);
    println!("failed hypotheses: {:?}", report.failures());

    let opts = ShootingOptions::for_period(sys.omega);
    let orbit = find_periodic(&sys, &State::zeros(2), &opts)?;
    println!("zero orbit residual {:e}", orbit.residual);

    // states with x1 = 0, y = z = 0 are all equilibria, so the period map
    // is singular along that line
    let multi = multistart_periodic(&sys, 4, 1.0, 0, &opts)?;
    println!(
        "multistart: {}/{} converged",
        multi.converged, multi.attempts
    );
    for reason in &multi.failure_reasons {
        println!("  {reason}");
    }
    Ok(())
}
