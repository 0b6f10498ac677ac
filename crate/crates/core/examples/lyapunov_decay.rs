//! Evaluates the Lyapunov function, its derivative along the flow and the
//! decay constants, then spot-checks the decrease outside the bound radius.

use std::f64::consts::PI;

use lyapcert::hypothesis::{forcing_bound_fit, spectral_bounds, DomainBox};
use lyapcert::linalg::{Matrix, SymMatrix};
use lyapcert::lyapunov::{decay_constants, decrease_spot_check, v_gram_bounds, vdot_decomposition};
use lyapcert::system::{Family, Sinusoid, State, SystemDef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lyapcert::Result<()> {
    let family = Family::LinearConstant {
        f: SymMatrix::scaled_identity(2, 2.001),
        g: SymMatrix::scaled_identity(2, 2.001),
        h: Matrix::from_rows(&[vec![0.05, 0.0], vec![0.0, 0.05]])?,
        forcing: Sinusoid {
            amplitude: vec![0.01, 0.0],
            frequency: 1.0,
            phase: 0.0,
        },
    };
    let two = SymMatrix::scaled_identity(2, 2.0);
    let sys = SystemDef::new(family, Some(two.clone()), Some(two), 2.0 * PI)?;

    let q = v_gram_bounds(&sys.a, &sys.b)?;
    println!("{} |s|^2 <= 2V <= {} |s|^2", q.delta_2, q.delta_3);

    let s = State::new(vec![1.0, -0.5], vec![0.2, 0.3], vec![-0.4, 0.1])?;
    let parts = vdot_decomposition(&sys, 0.0, &s)?;
    println!(
        "V = {}, dV/dt = {} (= -V1 - V2 - V3 + V4 up to {:e})",
        parts.v, parts.vdot_exact, parts.decomposition_residual
    );

    let domain = DomainBox::cube(2, 1.0, 3, 20, 3)?;
    let bounds = spectral_bounds(&sys, &domain, Some(0.004))?;
    let forcing = forcing_bound_fit(&sys, &domain, 32)?;
    let dc = decay_constants(&bounds, &forcing);
    println!(
        "delta_4 = {} (feasible: {})",
        dc.delta_4, dc.delta_4_feasible
    );
    println!(
        "delta_6 = {}, delta_8 = {:?}",
        dc.delta_6_corrected, dc.delta_8_corrected
    );

    let radius = dc.delta_8_corrected.unwrap_or(f64::INFINITY).max(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let check = decrease_spot_check(&sys, dc.delta_6_corrected, radius, 1000, &mut rng)?;
    println!(
        "decrease outside radius {}: {} violations in {} samples",
        check.radius, check.violations, check.samples
    );
    Ok(())
}
