//! Integrates the third-order oscillator x''' + 2x'' + 2x' + x = cos t and
//! prints the trajectory as CSV.

use std::f64::consts::PI;

use lyapcert::integrate::{integrate, IntegratorOptions};
use lyapcert::linalg::{Matrix, SymMatrix};
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
    let mut opts = IntegratorOptions::rkf45(1e-12, 1e-10, 40);
    opts.record_v = true;
    let trajectory = integrate(&sys, &State::zeros(1), 0.0, 20.0, &opts)?;
    print!("{}", trajectory.to_csv());
    Ok(())
}
