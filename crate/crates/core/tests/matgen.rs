use krylov_sqrt::linalg::vector::{norm2, relative_error};
use krylov_sqrt::linalg::{
    hermitian_eigenvalues, lu_solve, min_symmetric_eig, reference_invsqrt_action, reference_sqrt_action, sigma_max,
    DenseMatrix, LinearOperator, LinearSolver, C64,
};
use krylov_sqrt::matgen::{
    convection_diffusion, perturb_matrix, random_orthogonal, rhs_vector, skew_part, spectrum_matrix, GridConvention,
    PerturbationMode, PerturbationSpec, RhsKind, SpectrumKind, SpectrumSpec, Tridiagonal, POSITIVITY_FLOOR,
};
use krylov_sqrt::mmio::{read_matrix_market, write_matrix_market, write_tridiagonal};
use krylov_sqrt::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() < 1e-14 * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn uniform(n: usize, lo: f64, hi: f64) -> SpectrumSpec {
    SpectrumSpec {
        kind: SpectrumKind::Uniform { lo, hi },
        n,
    }
}

#[test]
fn orthogonal_basics() {
    let q = random_orthogonal(1, 3).unwrap();
    assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-15);

    let q = random_orthogonal(100, 42).unwrap();
    assert!(q.is_real());
    let gram = q.adjoint().matmul(&q).sub(&DenseMatrix::identity(100));
    assert!(gram.frobenius_norm() <= 1e-12 * 100.0);

    let again = random_orthogonal(100, 42).unwrap();
    assert_eq!(q.as_slice(), again.as_slice());
    assert_ne!(q.as_slice(), random_orthogonal(100, 43).unwrap().as_slice());
    assert!(random_orthogonal(0, 1).is_err());
}

#[test]
fn degenerate_uniform_spectrum_is_identity() {
    let s = spectrum_matrix(&uniform(20, 1.0, 1.0), 5).unwrap();
    assert!(s.matrix.sub(&DenseMatrix::identity(20)).frobenius_norm() < 1e-13);
}

#[test]
fn uniform_spectrum_respects_interval() {
    let s = spectrum_matrix(&uniform(500, 1.0, 1000.0), 7).unwrap();
    assert!(s.matrix.is_hermitian(0.0));
    assert!(min_symmetric_eig(&s.matrix).unwrap() >= 1.0 - 1e-9);
    assert!(sigma_max(&s.matrix, 1e-10).unwrap() <= 1000.0 + 1e-6);
    assert!(s.eigs.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn spectrum_round_trip_against_jacobi() {
    let s = spectrum_matrix(&uniform(40, 2.0, 50.0), 9).unwrap();
    let computed = jacobi_eigenvalues(&s.matrix);
    let mut prescribed = s.eigs.clone();
    prescribed.sort_by(f64::total_cmp);
    for (a, b) in computed.iter().zip(&prescribed) {
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }
    // eigenpairs line up column by column
    for j in [0, 17, 39] {
        let q = s.q.col(j);
        let mq = s.matrix.matvec(q);
        let lq: Vec<C64> = q.iter().map(|x| x * s.eigs[j]).collect();
        assert!(relative_error(&mq, &lq) < 1e-12);
    }
}

#[test]
fn clustered_spectrum_split_and_floor() {
    let spec = SpectrumSpec {
        kind: SpectrumKind::Clustered {
            cluster_center: 10.0,
            cluster_std: 1.0,
            cluster_fraction: 0.9,
            outlier_center: 1000.0,
            outlier_std: 100.0,
        },
        n: 200,
    };
    let eigs = spec.sample(11).unwrap();
    assert_eq!(eigs.len(), 200);
    assert!(eigs[..180].iter().all(|&l| (l - 10.0).abs() < 7.0));
    assert!(eigs[180..].iter().all(|&l| (l - 1000.0).abs() < 700.0));

    // a cluster centred on zero must be floored
    let spec = SpectrumSpec {
        kind: SpectrumKind::Clustered {
            cluster_center: 0.0,
            cluster_std: 1.0,
            cluster_fraction: 1.0,
            outlier_center: 0.0,
            outlier_std: 0.0,
        },
        n: 100,
    };
    let eigs = spec.sample(1).unwrap();
    assert!(eigs.iter().all(|&l| l >= POSITIVITY_FLOOR));
    assert!(eigs.contains(&POSITIVITY_FLOOR));

    assert!(uniform(5, 0.0, 1.0).sample(1).is_err());
    assert!(uniform(5, 2.0, 1.0).sample(1).is_err());
}

#[test]
fn skew_part_structure() {
    let k = skew_part(1, 2, 1.0).unwrap();
    assert_eq!(k[(0, 0)], c(0.0));
    let k = skew_part(50, 2, 1.0).unwrap();
    assert!(k.add(&k.transpose()).as_slice().iter().all(|v| *v == c(0.0)));
    let k2 = skew_part(50, 2, 3.0).unwrap();
    assert!(relative_error(k2.as_slice(), &k.scaled(c(3.0)).into_col_major()) < 1e-15);

    let s = spectrum_matrix(&uniform(50, 1.0, 100.0), 4).unwrap();
    let m = s.matrix.add(&k);
    let lmin = s.eigs.last().copied().unwrap();
    assert!((min_symmetric_eig(&m).unwrap() - lmin).abs() <= 1e-10 * 100.0);
}

#[test]
fn convection_diffusion_stencil() {
    let (n, eta) = (50, 0.1);
    let h = 1.0 / n as f64;
    let t = convection_diffusion(n, eta, GridConvention::Full).unwrap();
    assert_eq!(t.n(), 50);
    assert_eq!(convection_diffusion(n, eta, GridConvention::Interior).unwrap().n(), 49);
    for i in 0..n - 1 {
        assert_eq!(t.sub[i], -eta / (h * h) - 1.0 / h);
        assert_eq!(t.sup[i], -eta / (h * h));
    }
    for i in 0..n {
        assert_eq!(t.diag[i], 2.0 * eta / (h * h) + 1.0 / h);
    }
    let dense = t.to_dense();
    for i in 1..n - 1 {
        let s: C64 = dense.row(i).iter().sum();
        assert!(s.norm() <= 1e-9 * t.diag[i]);
    }
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 {
                assert_eq!(dense[(i, j)], c(0.0));
            }
        }
    }
    assert!(!dense.is_hermitian(1e-12));
    assert!(min_symmetric_eig(&dense).unwrap() > 0.0);

    assert!(convection_diffusion(2, 0.1, GridConvention::Full).is_err());
    assert!(convection_diffusion(10, 0.0, GridConvention::Full).is_err());
}

#[test]
fn tridiagonal_operator_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 30;
    let mut draw = |k: usize| (0..k).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>();
    let t = Tridiagonal::new(draw(n - 1), draw(n), draw(n - 1)).unwrap();
    let d = t.to_dense();
    let x: Vec<C64> = draw(n).iter().zip(draw(n)).map(|(&a, b)| C64::new(a, b)).collect();
    let mut y = vec![c(0.0); n];
    t.apply(&x, &mut y);
    assert!(relative_error(&y, &d.matvec(&x)) < 1e-15);
    t.apply_adjoint(&x, &mut y);
    assert!(relative_error(&y, &d.adjoint().matvec(&x)) < 1e-15);

    // random bands need pivoting
    let lu = t.lu().unwrap();
    assert!(relative_error(&lu.solve(&x), &lu_solve(&d, &x).unwrap()) < 1e-10);
    assert!(relative_error(&lu.solve_adjoint(&x), &lu_solve(&d.adjoint(), &x).unwrap()) < 1e-10);

    assert!(Tridiagonal::new(vec![1.0], vec![1.0, 2.0, 3.0], vec![1.0, 1.0]).is_err());
    let singular = Tridiagonal::toeplitz(4, 0.0, 0.0, 0.0).unwrap();
    assert!(matches!(singular.lu(), Err(Error::SingularMatrix { .. })));
}

#[test]
fn symmetrized_oracle_matches_dense_reference() {
    let t = convection_diffusion(60, 0.1, GridConvention::Full).unwrap();
    let b = vec![c(1.0); 60];
    let dense = t.to_dense();
    let fast = t.symmetrizable_fun_action(&b, f64::sqrt).unwrap();
    assert!(relative_error(&fast, &reference_sqrt_action(&dense, &b).unwrap()) < 1e-10);
    let fast = t.symmetrizable_fun_action(&b, |l| 1.0 / l.sqrt()).unwrap();
    assert!(relative_error(&fast, &reference_invsqrt_action(&dense, &b).unwrap()) < 1e-10);

    let bad = Tridiagonal::new(vec![1.0], vec![1.0, 1.0], vec![-1.0]).unwrap();
    assert!(matches!(
        bad.symmetrizable_fun_action(&[c(1.0), c(1.0)], f64::sqrt),
        Err(Error::UnsupportedContext(_))
    ));
}

#[test]
fn perturbation_budget_and_positivity() {
    let s = spectrum_matrix(&uniform(60, 1.0, 100.0), 21).unwrap();
    let m = s.matrix.add(&skew_part(60, 21, 1.0).unwrap());
    let same = perturb_matrix(
        &m,
        &PerturbationSpec {
            eps: 0.0,
            mode: PerturbationMode::HermitianRandom,
        },
        1,
    )
    .unwrap();
    assert_eq!(same.matrix.as_slice(), m.as_slice());

    let norm_m = sigma_max(&m, 1e-12).unwrap();
    for mode in [PerturbationMode::HermitianRandom, PerturbationMode::SkewRandom] {
        let p = perturb_matrix(&m, &PerturbationSpec { eps: 1e-3, mode }, 5).unwrap();
        assert_eq!(p.halvings, 0);
        let diff = p.matrix.sub(&m);
        let measured = sigma_max(&diff, 1e-12).unwrap() / norm_m;
        assert!(measured <= 1e-3 * (1.0 + 1e-6), "{measured}");
        assert!(measured >= 1e-3 * (1.0 - 1e-6), "{measured}");
        assert!(min_symmetric_eig(&p.matrix).unwrap() > 0.0);
        assert!(p.mu2 > 0.0 && p.mu1 > 0.0);
        match mode {
            PerturbationMode::SkewRandom => assert!(diff.add(&diff.transpose()).frobenius_norm() <= 1e-14 * norm_m),
            PerturbationMode::HermitianRandom => assert!(diff.is_hermitian(1e-14 * norm_m)),
        }
    }
}

#[test]
fn perturbation_halves_then_gives_up() {
    // λ_min = 1 against ‖M‖ = 100: ε = 0.02 can fail, a few halvings fix it
    let m = DenseMatrix::from_diagonal(&(0..40).map(|i| c(1.0 + 99.0 * i as f64 / 39.0)).collect::<Vec<_>>());
    let spec = PerturbationSpec {
        eps: 0.05,
        mode: PerturbationMode::HermitianRandom,
    };
    match perturb_matrix(&m, &spec, 3) {
        Ok(p) => {
            assert!(p.eps <= 0.05);
            assert!(min_symmetric_eig(&p.matrix).unwrap() > 0.0);
        }
        Err(e) => panic!("unexpected {e}"),
    }
    let spec = PerturbationSpec {
        eps: 10.0,
        mode: PerturbationMode::HermitianRandom,
    };
    assert!(matches!(
        perturb_matrix(&m, &spec, 3),
        Err(Error::PositivityLost { halvings: 3 })
    ));
}

#[test]
fn right_hand_sides() {
    assert_eq!(rhs_vector(RhsKind::Ones, 3, None).unwrap(), vec![c(1.0); 3]);
    assert!(matches!(
        rhs_vector(RhsKind::EigAverage(2), 3, None),
        Err(Error::UnsupportedContext(_))
    ));
    let s = spectrum_matrix(&uniform(30, 1.0, 10.0), 2).unwrap();
    let top = rhs_vector(RhsKind::EigAverage(1), 30, Some(&s)).unwrap();
    assert!(relative_error(&top, s.q.col(0)) < 1e-15);

    let b = rhs_vector(RhsKind::EigAverage(5), 30, Some(&s)).unwrap();
    assert!((norm2(&b) - 1.0).abs() < 1e-15);
    // projection onto the first five eigenvectors reproduces b
    let mut proj = vec![c(0.0); 30];
    for j in 0..5 {
        let q = s.q.col(j);
        let coef: C64 = q.iter().zip(&b).map(|(qi, bi)| qi.conj() * bi).sum();
        for (p, qi) in proj.iter_mut().zip(q) {
            *p += coef * qi;
        }
    }
    assert!(norm2(&krylov_sqrt::linalg::vector::sub(&b, &proj)) <= 1e-12);
    assert!(rhs_vector(RhsKind::EigAverage(31), 30, Some(&s)).is_err());
}

#[test]
fn matrix_market_round_trip_is_bitwise() {
    let s = spectrum_matrix(&uniform(12, 1.0, 1e6), 8).unwrap();
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &s.matrix).unwrap();
    let back = read_matrix_market(buf.as_slice()).unwrap();
    assert_eq!(back.as_slice(), s.matrix.as_slice());

    let z = DenseMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 / 7.0, -(j as f64) * 1e-300));
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &z).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("%%MatrixMarket matrix array complex general"));
    assert_eq!(read_matrix_market(buf.as_slice()).unwrap().as_slice(), z.as_slice());

    let t = convection_diffusion(9, 0.3, GridConvention::Interior).unwrap();
    let mut buf = Vec::new();
    write_tridiagonal(&mut buf, &t).unwrap();
    assert_eq!(
        read_matrix_market(buf.as_slice()).unwrap().as_slice(),
        t.to_dense().as_slice()
    );
}

#[test]
fn matrix_market_symmetric_variants() {
    let text = "%%MatrixMarket matrix array real skew-symmetric\n3 3\n1\n2\n3\n";
    let k = read_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(k[(1, 0)], c(1.0));
    assert_eq!(k[(0, 1)], c(-1.0));
    assert_eq!(k[(2, 1)], c(3.0));
    assert_eq!(k[(1, 1)], c(0.0));

    let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 2 0\n2 1 1 1\n";
    let h = read_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(h[(0, 1)], C64::new(1.0, -1.0));
    assert!(h.is_hermitian(0.0));

    let text = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n";
    assert_eq!(read_matrix_market(text.as_bytes()).unwrap()[(1, 0)], c(1.0));

    let text = "%%MatrixMarket matrix coordinate integer symmetric\n2 2 1\n1 2 5\n";
    assert!(matches!(
        read_matrix_market(text.as_bytes()),
        Err(Error::Parse { line: 3, .. })
    ));
}

#[test]
fn hermitian_spectrum_of_generated_matrix() {
    let s = spectrum_matrix(&uniform(25, 3.0, 4.0), 13).unwrap();
    let ev = hermitian_eigenvalues(&s.matrix).unwrap();
    let mut pre = s.eigs.clone();
    pre.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(&pre) {
        assert!((a - b).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 1usize..20) {
        let a = spectrum_matrix(&uniform(n, 1.0, 9.0), seed).unwrap();
        let b = spectrum_matrix(&uniform(n, 1.0, 9.0), seed).unwrap();
        prop_assert_eq!(a.matrix.as_slice(), b.matrix.as_slice());
        let (k1, k2) = (skew_part(n, seed, 1.0).unwrap(), skew_part(n, seed, 1.0).unwrap());
        prop_assert_eq!(k1.as_slice(), k2.as_slice());
        prop_assert!(min_symmetric_eig(&a.matrix).unwrap() > 0.0);
    }

    #[test]
    fn convdiff_entries_follow_stencil(n in 3usize..400, eta in 1e-3f64..10.0, i in 0usize..1000) {
        let t = convection_diffusion(n, eta, GridConvention::Interior).unwrap();
        let h = 1.0 / n as f64;
        let i = i % (n - 2);
        prop_assert_eq!(t.sub[i], -eta / (h * h) - 1.0 / h);
        prop_assert_eq!(t.diag[i], 2.0 * eta / (h * h) + 1.0 / h);
        prop_assert_eq!(t.sup[i], -eta / (h * h));
    }
}
