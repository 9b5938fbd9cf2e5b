use dunkl_core::free::heat_kernel;
use dunkl_core::hartree::{free_trajectory, picard_step, DunklTransform, HartreeConfig, Interaction};
use dunkl_core::hermite::kernel_kit;
use dunkl_core::hls::{mhls_check, symmetric_exponents, LineProfile};
use dunkl_core::operators::{density, schatten_norm};
use dunkl_core::strichartz::schatten_rhs;
use dunkl_core::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn basis(kappa: f64, n: usize) -> HermiteBasis {
    let s = DunklStructure::new(vec![kappa]).unwrap();
    HermiteBasis::with_oversampling(&s, n, 2).unwrap()
}

fn matrix(n: usize, seed: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        let k = (i * n + j) % seed.len();
        Complex64::new(seed[k] * (1.0 + i as f64), seed[(k + 1) % seed.len()] - 0.1 * j as f64)
    })
}

fn unitary(n: usize, seed: &[f64]) -> DMatrix<Complex64> {
    matrix(n, seed).qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn heat_kernel_scaling(kappa in 0.0f64..2.0, t in 0.1f64..2.0, lambda in 0.5f64..2.0,
                           x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let s = DunklStructure::new(vec![kappa]).unwrap();
        let a = heat_kernel(&s, t, &[lambda * x], &[lambda * y]).unwrap();
        let b = lambda.powf(-s.d_eff()) * heat_kernel(&s, t / (lambda * lambda), &[x], &[y]).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
    }

    #[test]
    fn kernel_on_imaginary_axis_bounded(kappa in 0.0f64..3.0, x in -20.0f64..20.0, y in -3.0f64..3.0) {
        let e = dunkl_kernel_1d(kappa, Complex64::new(0.0, x), y);
        prop_assert!(e.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn oscillator_kernel_time_reversal(kappa in 0.0f64..2.0, t in 0.05f64..1.5, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let s = DunklStructure::new(vec![kappa]).unwrap();
        let k = kernel_kit(&s, t, &[x], &[y]).unwrap();
        let km = kernel_kit(&s, -t, &[x], &[y]).unwrap();
        prop_assert!((km - k.conj()).norm() <= 1e-12 * k.norm());
    }

    #[test]
    fn coefficient_norm_rearrangement(mut c in prop::collection::vec(-3.0f64..3.0, 1..12), q in 1.0f64..4.0, rot in 0usize..12) {
        let a = schatten_rhs(&c, q);
        let k = rot % c.len();
        c.rotate_left(k);
        c.reverse();
        for v in c.iter_mut().step_by(2) {
            *v = -*v;
        }
        prop_assert!((a - schatten_rhs(&c, q)).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn schatten_unitary_invariance(seed in prop::collection::vec(-1.0f64..1.0, 5..9), p in 1.0f64..6.0) {
        let b = basis(0.5, 5);
        let n = b.len();
        let a = OperatorMatrix::new(b.clone(), matrix(n, &seed));
        let u = unitary(n, &seed[1..]);
        let v = unitary(n, &seed[..seed.len() - 1]);
        let rotated = OperatorMatrix::new(b, &u * a.matrix() * &v);
        let x = schatten_norm(&a, p).unwrap();
        prop_assert!((x - schatten_norm(&rotated, p).unwrap()).abs() <= 1e-10 * x);
    }

    #[test]
    fn schatten_holder(seed in prop::collection::vec(-1.0f64..1.0, 5..9), p in 2.0f64..6.0, q in 2.0f64..6.0) {
        let b = basis(0.0, 5);
        let n = b.len();
        let a = OperatorMatrix::new(b.clone(), matrix(n, &seed));
        let c = OperatorMatrix::new(b.clone(), unitary(n, &seed) * matrix(n, &seed[1..]));
        let r = 1.0 / (1.0 / p + 1.0 / q);
        let lhs = schatten_norm(&a.compose(&c), r).unwrap();
        let rhs = schatten_norm(&a, p).unwrap() * schatten_norm(&c, q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn density_of_positive_operator_is_nonnegative(kappa in 0.0f64..2.0,
                                                   seed in prop::collection::vec(-1.0f64..1.0, 5..9)) {
        let b = basis(kappa, 6);
        let m = matrix(b.len(), &seed);
        let gamma = OperatorMatrix::new(b.clone(), &m * m.adjoint());
        let rho = density(&gamma);
        prop_assert!(rho.iter().all(|r| *r >= -1e-12));
        // total mass is the trace
        let mass = b.grid().integrate_free(&rho);
        prop_assert!((mass - gamma.trace().re).abs() <= 1e-9 * gamma.trace().re);
    }

    #[test]
    fn hls_dilation(lambda in 0.3f64..3.0, r in 1.2f64..1.9, shift in 0.0f64..0.5) {
        let (beta, rs) = symmetric_exponents(2, r);
        let fs = [
            LineProfile::new(0.0, 1.0, move |t| 1.0 + shift * t).unwrap(),
            LineProfile::new(0.0, 1.0, |t| 2.0 - t * t).unwrap(),
        ];
        let base = mhls_check(&fs, &beta, &rs, 20).unwrap();
        let dil: Vec<LineProfile> = fs.iter().map(|p| p.dilate(lambda)).collect();
        let d = mhls_check(&dil, &beta, &rs, 20).unwrap();
        let want = lambda.powf(-2.0 + beta[0][1]);
        prop_assert!((d.lhs / base.lhs / want - 1.0).abs() < 1e-9);
        prop_assert!((d.ratio / base.ratio - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn picard_step_keeps_self_adjointness(a in 0.05f64..0.4, b in 0.05f64..0.4, c in -0.1f64..0.1, g in -2.0f64..2.0) {
        let basis = basis(0.5, 6);
        let f0 = StateVector::basis_function(&basis, 0);
        let f1 = StateVector::basis_function(&basis, 1);
        let off = OperatorMatrix::rank_one(&f0, &f1).scale(Complex64::new(c, 0.3 * c));
        let gamma0 = OperatorMatrix::rank_one(&f0, &f0)
            .scale(Complex64::new(a, 0.0))
            .add(&OperatorMatrix::rank_one(&f1, &f1).scale(Complex64::new(b, 0.0)))
            .add(&off)
            .add(&off.adjoint());
        let cfg = HartreeConfig::new(
            gamma0,
            0.1,
            4,
            Interaction::DunklConvolution { w: Profile::gaussian(1.0, 1.0), coupling: g },
            1.5,
        )
        .unwrap();
        let tr = DunklTransform::for_basis(&basis).unwrap();
        let next = picard_step(&free_trajectory(&cfg), &cfg, &tr);
        for m in &next {
            prop_assert!(m.self_adjoint_defect() < 1e-12);
        }
    }
}
