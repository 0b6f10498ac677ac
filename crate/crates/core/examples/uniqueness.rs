//! Fits the exponential decay rate of the difference between two solutions.

use std::f64::consts::PI;

use lyapcert::integrate::IntegratorOptions;
use lyapcert::linalg::{Matrix, SymMatrix};
use lyapcert::orbits::uniqueness_decay;
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
    let s1 = State::new(vec![1.0], vec![0.0], vec![0.0])?;
    let s2 = State::new(vec![-1.0], vec![0.5], vec![2.0])?;

    let fit = uniqueness_decay(
        &sys,
        &s1,
        &s2,
        40.0,
        0.5,
        400,
        &IntegratorOptions::default(),
    )?;
    println!("window {:?}", fit.fit_window);
    println!(
        "|s1(t) - s2(t)| ~ {:?} exp(-{:?} t), r^2 = {:?}",
        fit.k_fit, fit.delta_fit, fit.r_squared
    );
    println!(
        "rate from V: {:?} (slowest root has real part -0.5)",
        fit.v_delta_fit
    );
    println!("contracting: {}", fit.contracting());
    Ok(())
}
