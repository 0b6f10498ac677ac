use std::f64::consts::PI;

use lyapcert::hypothesis::{
    check_theorem_conditions, forcing_bound_fit, spectral_bounds, DomainBox,
};
use lyapcert::integrate::{flow_map, integrate, IntegratorOptions};
use lyapcert::linalg::{
    quadratic_form_within_spectrum, sym_eigenvalues, Matrix, SymMatrix, LEMMA_SLACK,
};
use lyapcert::lyapunov::{
    decay_constants, decrease_spot_check, forcing_term, v_gram_matrix, v_value, vdot_decomposition,
};
use lyapcert::orbits::{find_periodic, uniqueness_decay, ShootingOptions};
use lyapcert::system::{
    difference_rhs, secant_operator, DifferenceState, Family, Sinusoid, State, SystemDef,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn sym_matrix(max_n: usize) -> impl Strategy<Value = SymMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0f64, n * n).prop_map(move |v| {
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    d[i * n + j] = 0.5 * (v[i * n + j] + v[j * n + i]);
                }
            }
            SymMatrix::from_row_major(n, d).unwrap()
        })
    })
}

/// Orthogonal matrix from Householder reflections `I − 2vvᵀ/vᵀv`.
fn orthogonal(n: usize, vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for v in vs {
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv < 1e-3 {
            continue;
        }
        for row in q.iter_mut() {
            let d: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            for (r, vi) in row.iter_mut().zip(v) {
                *r -= 2.0 * d / vv * vi;
            }
        }
    }
    q
}

/// Determinant by cofactor expansion.
fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn quadratic_form_lies_within_spectrum(
        m in sym_matrix(5),
        xs in prop::collection::vec(-5.0..5.0f64, 5),
    ) {
        let x = &xs[..m.dim()];
        let scale = 1.0 + m.frobenius() * x.iter().map(|v| v * v).sum::<f64>();
        prop_assert!(quadratic_form_within_spectrum(&m, x, LEMMA_SLACK * scale).unwrap());
    }

    #[test]
    fn eigenvalues_scale_with_the_matrix(m in sym_matrix(5), c in 0.01..100.0f64) {
        let base = sym_eigenvalues(&m).unwrap().values;
        let scaled = sym_eigenvalues(&m.scale(c)).unwrap().values;
        let tol = 1e-12 * c * (1.0 + m.frobenius());
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!((c * a - b).abs() <= tol, "{} vs {}", c * a, b);
        }
    }

    #[test]
    fn spectrum_recovers_trace_and_determinant(m in sym_matrix(5)) {
        let s = sym_eigenvalues(&m).unwrap();
        let trace = m.trace();
        prop_assert!((s.sum() - trace).abs() <= 1e-9 * (1.0 + m.frobenius() * m.dim() as f64));
        let d = det(&m.rows());
        let scale = m.frobenius().max(1.0).powi(m.dim() as i32);
        prop_assert!((s.product() - d).abs() <= 1e-9 * scale, "{} vs {}", s.product(), d);
    }

    #[test]
    fn eigenvalues_of_conjugated_diagonal(
        diag in prop::collection::vec(-20.0..20.0f64, 1..=5),
        vs in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 5), 5),
    ) {
        let n = diag.len();
        let vs: Vec<Vec<f64>> = vs.into_iter().map(|v| v[..n].to_vec()).collect();
        let q = orthogonal(n, &vs);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| q[i][k] * diag[k] * q[j][k]).sum()).collect())
            .collect();
        let m = SymMatrix::from_rows(&rows).unwrap();
        let got = sym_eigenvalues(&m).unwrap().values;
        let mut want = diag.clone();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-10 * 20.0, "{got:?} vs {want:?}");
        }
    }
}

fn linear_family(amp: f64) -> Family {
    Family::LinearConstant {
        f: SymMatrix::from_rows(&[vec![3.0, 0.5], vec![0.5, 2.0]]).unwrap(),
        g: SymMatrix::from_rows(&[vec![2.0, 0.2], vec![0.2, 1.5]]).unwrap(),
        h: Matrix::from_rows(&[vec![0.4, 0.1], vec![-0.1, 0.3]]).unwrap(),
        forcing: Sinusoid {
            amplitude: vec![amp, -0.5 * amp],
            frequency: 1.0,
            phase: 0.3,
        },
    }
}

fn polynomial_family() -> Family {
    Family::DiagonalPolynomial {
        f: vec![[2.0, 0.5, 0.1, 0.2], [3.0, 0.1, 0.3, 0.0]],
        g: vec![[1.0, 0.2, 0.4], [1.5, 0.0, 0.1]],
        h: vec![[0.3, 0.1, 0.05], [0.2, 0.0, 0.1]],
        forcing: Sinusoid {
            amplitude: vec![0.3, 0.1],
            frequency: 1.0,
            phase: 0.0,
        },
    }
}

fn families() -> Vec<SystemDef> {
    let ex4 = Family::Example4 {
        phase: 0.4,
        state_free_forcing: false,
    };
    [linear_family(0.5), ex4, polynomial_family()]
        .into_iter()
        .map(|f| SystemDef::new(f, None, None, 2.0 * PI).unwrap())
        .collect()
}

fn state6() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5..1.5f64, 6)
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn fields_are_symmetric_and_forcing_periodic(v in state6(), t in 0.0..20.0f64) {
        for sys in families() {
            let (x, y, z) = (&v[0..2], &v[2..4], &v[4..6]);
            let f = sys.f(x, y, z);
            let g = sys.g(x, y);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(f.get(i, j), f.get(j, i));
                    prop_assert_eq!(g.get(i, j), g.get(j, i));
                }
            }
            let p0 = sys.p(t, x, y, z);
            let p1 = sys.p(t + sys.omega, x, y, z);
            for (a, b) in p0.iter().zip(&p1) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn secant_maps_difference_to_difference(a in state6(), b in state6()) {
        for sys in families() {
            let (x, y) = (&a[0..2], &b[0..2]);
            let sec = secant_operator(&sys, x, y, 8).unwrap();
            let dx: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            let lhs = sec.matrix.matvec(&dx);
            let (hx, hy) = (sys.h(x), sys.h(y));
            let dh: Vec<f64> = hx.iter().zip(&hy).map(|(p, q)| p - q).collect();
            let err = lhs.iter().zip(&dh).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            let size = dh.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-6 * (1.0 + size), "{err:e}");
        }
    }

    #[test]
    fn v_matches_gram_form(v in state6()) {
        for sys in families() {
            let m = v_gram_matrix(&sys.a, &sys.b).unwrap();
            let quad = 0.5 * v.iter().enumerate()
                .map(|(i, vi)| vi * (0..6).map(|j| m.get(i, j) * v[j]).sum::<f64>())
                .sum::<f64>();
            let got = v_value(&sys.a, &sys.b, &State::from_flat(&v).unwrap()).unwrap();
            prop_assert!((got - quad).abs() <= 1e-12 * quad.abs().max(1e-300));
        }
    }

    #[test]
    fn forcing_component_is_reproduced(v in state6(), t in 0.0..7.0f64) {
        for sys in families() {
            let s = State::from_flat(&v).unwrap();
            let r = vdot_decomposition(&sys, t, &s).unwrap();
            let p = sys.p(t, &s.x, &s.y, &s.z);
            prop_assert_eq!(r.v4, forcing_term(&sys.a, &sys.b, &s, &p));
        }
    }
}

#[test]
fn zero_difference_has_zero_derivative() {
    for sys in families() {
        let d = DifferenceState::between(&State::zeros(2), &State::zeros(2));
        let out = difference_rhs(&sys, &d).unwrap();
        assert!(out
            .psi
            .iter()
            .chain(&out.eta)
            .chain(&out.tau)
            .all(|v| *v == 0.0));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn larger_boxes_widen_the_bounds(r in 0.2..2.0f64, m in 2usize..4) {
        let sys = SystemDef::new(polynomial_family(), None, None, 2.0 * PI).unwrap();
        // grid 2m−1 on the doubled box contains every point of grid m on the box
        let small = DomainBox::cube(2, r, m, 0, 0).unwrap();
        let large = DomainBox::cube(2, 2.0 * r, 2 * m - 1, 0, 0).unwrap();
        let s = spectral_bounds(&sys, &small, None).unwrap();
        let l = spectral_bounds(&sys, &large, None).unwrap();
        prop_assert!(l.a_min <= s.a_min && l.b_min <= s.b_min && l.h_min <= s.h_min);
        prop_assert!(l.a_max >= s.a_max && l.b_max >= s.b_max && l.h_max >= s.h_max);
    }

    #[test]
    fn bounds_bracket_every_sample(r in 0.2..2.0f64, seed in 0u64..1000) {
        let sys = SystemDef::new(polynomial_family(), None, None, 2.0 * PI).unwrap();
        let domain = DomainBox::cube(2, r, 2, 8, seed).unwrap();
        let b = spectral_bounds(&sys, &domain, None).unwrap();
        for p in domain.points() {
            let (x, y, z) = (&p[0..2], &p[2..4], &p[4..6]);
            for e in sym_eigenvalues(&sys.f(x, y, z)).unwrap().values {
                prop_assert!(b.a_min <= e && e <= b.a_max);
            }
            for e in sym_eigenvalues(&sys.g(x, y)).unwrap().values {
                prop_assert!(b.b_min <= e && e <= b.b_max);
            }
        }
    }

    #[test]
    fn passing_systems_decrease_outside_the_radius(
        h in 0.02..0.08f64,
        amp in 0.0..0.02f64,
        seed in 0u64..1000,
    ) {
        let fam = Family::LinearConstant {
            f: SymMatrix::scaled_identity(2, 2.001),
            g: SymMatrix::scaled_identity(2, 2.001),
            h: Matrix::from_rows(&[vec![h, 0.0], vec![0.0, h]]).unwrap(),
            forcing: Sinusoid { amplitude: vec![amp, amp], frequency: 1.0, phase: 0.0 },
        };
        let two = Some(SymMatrix::scaled_identity(2, 2.0));
        let sys = SystemDef::new(fam, two.clone(), two, 2.0 * PI).unwrap();
        let domain = DomainBox::cube(2, 1.0, 2, 4, seed).unwrap();
        let bounds = spectral_bounds(&sys, &domain, Some(0.004)).unwrap();
        prop_assume!(check_theorem_conditions(&bounds).overall);
        let dc = decay_constants(&bounds, &forcing_bound_fit(&sys, &domain, 16).unwrap());
        prop_assume!(dc.delta_6_corrected_positive);
        let radius = dc.delta_8_corrected.unwrap().max(1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let check = decrease_spot_check(&sys, dc.delta_6_corrected, radius, 200, &mut rng).unwrap();
        prop_assert!(check.passed, "{check:?}");
    }
}

#[test]
fn exact_symmetry_means_no_strict_sandwich() {
    let fam = linear_family(0.0);
    let (f, g) = match &fam {
        Family::LinearConstant { f, g, .. } => (f.clone(), g.clone()),
        _ => unreachable!(),
    };
    let sys = SystemDef::new(fam, Some(f), Some(g), 2.0 * PI).unwrap();
    let domain = DomainBox::cube(2, 1.0, 2, 0, 0).unwrap();
    let b = spectral_bounds(&sys, &domain, None).unwrap();
    assert_eq!((b.f_minus_a_min, b.f_minus_a_max), (0.0, 0.0));
    let c = check_theorem_conditions(&b);
    assert!(!c.f_sandwich_strict.passed && c.f_sandwich_nonstrict.passed);
    assert!(!c.g_sandwich_strict.passed && c.g_sandwich_nonstrict.passed);
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn adaptive_and_fixed_step_agree(v in state6()) {
        let s0 = State::from_flat(&v).unwrap();
        let (atol, rtol) = (1e-10, 1e-8);
        for sys in families() {
            let a = integrate(&sys, &s0, 0.0, 50.0, &IntegratorOptions::rkf45(atol, rtol, 50)).unwrap();
            let f = integrate(&sys, &s0, 0.0, 50.0, &IntegratorOptions::rk4(1e-3, 50)).unwrap();
            prop_assume!(a.diverged_at.is_none() && f.diverged_at.is_none());
            for (sa, sf) in a.states.iter().zip(&f.states) {
                let tol = 10.0 * (atol + rtol * sa.norm());
                prop_assert!(sa.sub(sf).norm() <= tol, "{:e}", sa.sub(sf).norm());
            }
        }
    }

    #[test]
    fn unforced_linear_flow_is_reversible(v in state6(), t in 0.5..5.0f64) {
        let sys = SystemDef::new(linear_family(0.0), None, None, 2.0 * PI).unwrap();
        let s0 = State::from_flat(&v).unwrap();
        let opts = IntegratorOptions::rkf45(1e-13, 1e-12, 1);
        let there = flow_map(&sys, &s0, 0.0, t, &opts).unwrap();
        let back = flow_map(&sys, &there, t, -t, &opts).unwrap();
        prop_assert!(back.sub(&s0).norm() <= 1e-7, "{:e}", back.sub(&s0).norm());
    }

    #[test]
    fn converged_orbit_is_a_fixed_point(amp in 0.1..2.0f64, phase in 0.0..6.0f64) {
        let mut fam = linear_family(amp);
        if let Family::LinearConstant { forcing, .. } = &mut fam {
            forcing.phase = phase;
        }
        let sys = SystemDef::new(fam, None, None, 2.0 * PI).unwrap();
        let opts = ShootingOptions::for_period(sys.omega);
        let o = find_periodic(&sys, &State::zeros(2), &opts).unwrap();
        prop_assert!(o.converged && o.residual <= opts.tol);
        let again = flow_map(&sys, &o.s_star, 0.0, sys.omega, &IntegratorOptions::rkf45(1e-13, 1e-12, 1)).unwrap();
        prop_assert!(again.sub(&o.s_star).norm() <= 1e-8);

        // V stays bounded along the orbit over ten periods.
        let mut io = IntegratorOptions::rkf45(1e-10, 1e-9, 400);
        io.record_v = true;
        let tr = integrate(&sys, &o.s_star, 0.0, 10.0 * sys.omega, &io).unwrap();
        let vs = tr.v_series.unwrap();
        let first: f64 = vs[..40].iter().cloned().fold(0.0, f64::max);
        let last: f64 = vs[360..].iter().cloned().fold(0.0, f64::max);
        prop_assert!((last - first).abs() <= 1e-6 * (1.0 + first));
    }

    #[test]
    fn decay_rate_is_stationary(
        v in prop::collection::vec(-1.0..1.0f64, 3),
        w in prop::collection::vec(-1.0..1.0f64, 3),
    ) {
        // scalar x''' + 2x'' + 2x' + x = cos t has a single slowest root pair
        let fam = Family::LinearConstant {
            f: SymMatrix::scaled_identity(1, 2.0),
            g: SymMatrix::scaled_identity(1, 2.0),
            h: Matrix::from_rows(&[vec![1.0]]).unwrap(),
            forcing: Sinusoid { amplitude: vec![1.0], frequency: 1.0, phase: 0.0 },
        };
        let sys = SystemDef::new(fam, None, None, 2.0 * PI).unwrap();
        let (s1, s2) = (State::from_flat(&v).unwrap(), State::from_flat(&w).unwrap());
        prop_assume!(s1.sub(&s2).norm() > 0.1);
        let opts = IntegratorOptions::default();
        // windows [40, 60] and [20, 30] are disjoint and each spans an oscillation period
        let late = uniqueness_decay(&sys, &s1, &s2, 60.0, 1.0 / 3.0, 600, &opts).unwrap();
        let early = uniqueness_decay(&sys, &s1, &s2, 30.0, 1.0 / 3.0, 300, &opts).unwrap();
        prop_assume!(!late.window_shrunk && !early.window_shrunk);
        prop_assume!(late.r_squared.unwrap() >= 0.99 && early.r_squared.unwrap() >= 0.99);
        let (a, b) = (late.delta_fit.unwrap(), early.delta_fit.unwrap());
        prop_assert!((a - b).abs() <= 0.1 * a.abs().max(b.abs()), "{a} vs {b}");
    }
}
