//! Eigenvalues of symmetric matrices and the product/sum bounds for a
//! commuting pair.

use lyapcert::linalg::{check_lemma_bounds, commutes, SymMatrix};

fn main() -> lyapcert::Result<()> {
    let q = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]])?;
    let d = SymMatrix::from_rows(&[vec![5.0, -1.0], vec![-1.0, 5.0]])?;
    println!("spectrum of Q: {:?}", q.eigenvalues()?.values);
    println!("spectrum of D: {:?}", d.eigenvalues()?.values);
    println!("Q and D commute: {}", commutes(&q, &d)?);

    let report = check_lemma_bounds(&q, &d)?;
    println!(
        "QD:    {:?} within [{}, {}]: {}",
        report.product_eigenvalues, report.product_lower, report.product_upper, report.product_ok
    );
    println!(
        "Q + D: {:?} within [{}, {}]: {}",
        report.sum_eigenvalues, report.sum_lower, report.sum_upper, report.sum_ok
    );
    Ok(())
}
