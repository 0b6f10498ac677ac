//! Estimates the ultimate bound from the tails of many trajectories.

use std::f64::consts::PI;

use lyapcert::integrate::IntegratorOptions;
use lyapcert::linalg::{Matrix, SymMatrix};
use lyapcert::orbits::{random_ball_starts, ultimate_bound};
use lyapcert::system::{Family, Sinusoid, SystemDef};

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
    let starts = random_ball_starts(1, 50, 5.0, 2024);
    let est = ultimate_bound(
        &sys,
        &starts,
        80.0,
        0.25,
        &IntegratorOptions::rkf45(1e-10, 1e-8, 2000),
    )?;
    // on the periodic orbit the squared norm is 3/4 - sin(2t)/4, so the sup is 1
    println!("sup of |s|^2 over the tails: {:?}", est.delta_1_est);
    println!(
        "tail growth {:?}, {} diverged",
        est.tail_growth, est.diverged_count
    );
    Ok(())
}
