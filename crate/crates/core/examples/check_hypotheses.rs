//! Samples a box, bounds the spectra and evaluates every hypothesis.

use std::f64::consts::PI;

use lyapcert::hypothesis::{check_theorem_conditions, spectral_bounds, DomainBox};
use lyapcert::linalg::{Matrix, SymMatrix};
use lyapcert::system::{Family, Sinusoid, SystemDef};

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
    let domain = DomainBox::cube(2, 1.0, 3, 20, 3)?;
    let bounds = spectral_bounds(&sys, &domain, Some(0.004))?;

    println!("A: [{}, {}]", bounds.a_min, bounds.a_max);
    println!("B: [{}, {}]", bounds.b_min, bounds.b_max);
    println!("secant of H: [{}, {}]", bounds.h_min, bounds.h_max);
    println!(
        "sqrt(eps) = {} (budget {})",
        bounds.sqrt_eps, bounds.sqrt_eps_budget
    );

    let report = check_theorem_conditions(&bounds);
    println!("all hypotheses hold: {}", report.overall);
    for name in report.failures() {
        println!("  failed: {name}");
    }
    Ok(())
}
