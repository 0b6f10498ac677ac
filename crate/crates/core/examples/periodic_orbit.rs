//! Finds the forced periodic solution by shooting, verifies it over two
//! periods and runs a multistart search for other orbits.

use std::f64::consts::PI;

use lyapcert::linalg::{Matrix, SymMatrix};
use lyapcert::orbits::{find_periodic, multistart_periodic, verify_periodic, ShootingOptions};
use lyapcert::system::{Family, Sinusoid, State, SystemDef};

fn main() -> lyapcert::Result<()> {
    let family = Family::LinearConstant {
        f: SymMatrix::scaled_identity(1, 2.0),
        g: SymMatrix::scaled_identity(1, 2.0),
        h: Matrix::from_rows(&[vec![1.0]])?,
        forcing: Sinusoid {
            amplitude: vec![1.0],
            frequency: 1.0,
            phase: 0.0,
        },
    };
    let sys = SystemDef::new(family, None, None, 2.0 * PI)?;
    let opts = ShootingOptions::for_period(sys.omega);

    let orbit = find_periodic(&sys, &State::zeros(1), &opts)?;
    println!("s* = {:?}", orbit.s_star.to_flat());
    println!(
        "residual {:e} after {} Newton steps",
        orbit.residual, orbit.newton_iters
    );
    // the exact orbit is x = (sin t - cos t)/2
    println!("expected x(0) = -0.5, y(0) = 0.5, z(0) = 0.5");

    let check = verify_periodic(&sys, &orbit, 200, &opts)?;
    println!(
        "two-period mismatch {:e} (passed: {})",
        check.max_mismatch, check.passed
    );

    let multi = multistart_periodic(&sys, 8, 2.0, 1, &opts)?;
    println!(
        "multistart: {}/{} converged, {} distinct orbit(s)",
        multi.converged,
        multi.attempts,
        multi.orbits.len()
    );
    Ok(())
}
