use indexfiber_core::fiber::{genericity, lift_to_sigma, monic_centered_forms};
use indexfiber_core::index::{
    build_map, holomorphic_index, index_sum_check, spectrum_of, unordered_distance, MultiplicityProfile,
};
use indexfiber_core::matrices::{block_determinant_identity, shifted_determinant_identity, similarity_identity};
use indexfiber_core::psi::{assemble_psi, recover_aux};
use indexfiber_core::scalar::{format_rational, parse_rational};
use indexfiber_core::solver::projective_distance;
use indexfiber_core::index::IndexSpectrum;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = MultiplicityProfile> {
    prop::collection::vec(1usize..=3, 2..=5).prop_map(|mut p| {
        p.sort();
        MultiplicityProfile::new(p).unwrap()
    })
}

fn unit_complex() -> impl Strategy<Value = Complex64> {
    (0.5f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

// Points on a jittered circle so that pairwise separation stays bounded below.
fn separated(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (prop::collection::vec((-0.2f64..0.2, 0.8f64..1.2), n), 0.0f64..std::f64::consts::TAU).prop_map(
        move |(jit, phase)| {
            jit.iter()
                .enumerate()
                .map(|(i, &(dt, r))| {
                    let t = phase + std::f64::consts::TAU * (i as f64 + dt) / n as f64;
                    Complex64::from_polar(r, t)
                })
                .collect()
        },
    )
}

fn map_case() -> impl Strategy<Value = (MultiplicityProfile, Vec<Complex64>, Complex64)> {
    profile().prop_flat_map(|p| {
        let n = p.ell();
        (Just(p), separated(n), unit_complex())
    })
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residues_sum_to_zero((p, zetas, rho) in map_case()) {
        let f = build_map(&p, zetas, rho).unwrap();
        prop_assert!(index_sum_check(&f) < 1e-9);
    }

    #[test]
    fn aux_recovery_inverts_the_index_map((p, zetas, rho) in map_case()) {
        let f = build_map(&p, zetas.clone(), rho).unwrap();
        let spec = spectrum_of(&f).unwrap();
        let aux = recover_aux(&p, &spec, &zetas).unwrap();
        prop_assert!((aux.rho - rho).norm() < 1e-7 * rho.norm());
        for (i, row) in aux.residues.iter().enumerate() {
            let top = holomorphic_index(&f, i, row.len() - 1).unwrap();
            let got = row[row.len() - 1];
            prop_assert!((got - top).norm() < 1e-7 * (1.0 + top.norm()));
        }
    }

    #[test]
    fn spectrum_is_invariant_under_affine_conjugation(
        (p, zetas, rho) in map_case(),
        a in unit_complex(),
        bre in -1.0f64..1.0,
        bim in -1.0f64..1.0,
    ) {
        let b = Complex64::new(bre, bim);
        let d = p.degree() as i32;
        let moved: Vec<_> = zetas.iter().map(|z| a * z + b).collect();
        let f = build_map(&p, zetas, rho).unwrap();
        let g = build_map(&p, moved, rho * a.powi(1 - d)).unwrap();
        let sf = spectrum_of(&f).unwrap();
        let sg = spectrum_of(&g).unwrap();
        let dist = unordered_distance(&sf.unordered(), &sg.unordered()).unwrap();
        let scale = sf.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(dist < 1e-8 * scale);
    }

    #[test]
    fn monic_centered_forms_share_the_spectrum((p, zetas, rho) in map_case()) {
        let base = spectrum_of(&build_map(&p, zetas.clone(), rho).unwrap()).unwrap();
        let forms = monic_centered_forms(&p, &zetas, rho).unwrap();
        prop_assert_eq!(forms.len(), p.degree() - 1);
        let scale = base.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
        for f in &forms {
            prop_assert!(f.is_monic_centered(1e-9));
            let s = spectrum_of(f).unwrap();
            let dist = unordered_distance(&base.unordered(), &s.unordered()).unwrap();
            prop_assert!(dist < 1e-7 * scale);
        }
    }

    #[test]
    fn psi_is_homogeneous(
        (p, zetas, rho) in map_case().prop_filter("needs three points", |c| c.0.ell() >= 3),
        t in unit_complex(),
    ) {
        let spec = spectrum_of(&build_map(&p, zetas, rho).unwrap()).unwrap();
        let psi = assemble_psi(&p, &spec).unwrap();
        let x: Vec<_> = (0..psi.nvars()).map(|j| Complex64::new(0.3 * j as f64 - 0.4, 0.7 - 0.2 * j as f64)).collect();
        let tx: Vec<_> = x.iter().map(|v| v * t).collect();
        let (fx, ftx) = (psi.evaluate(&x).unwrap(), psi.evaluate(&tx).unwrap());
        for ((a, b), deg) in fx.iter().zip(&ftx).zip(psi.degrees()) {
            let want = a * t.powi(deg as i32);
            prop_assert!((b - want).norm() < 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn lift_lands_on_the_weighted_centroid_plane(
        p in profile(),
        pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 5),
    ) {
        let n = p.ell() - 1;
        let z: Vec<_> = pts[..n].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let lifted = lift_to_sigma(&z, &p).unwrap();
        let s: Complex64 = lifted.iter().zip(p.parts()).map(|(w, &d)| w * d as f64).sum();
        prop_assert!(s.norm() < 1e-12 * (1.0 + z.iter().map(|v| v.norm()).sum::<f64>()));
        let shift = lifted[n];
        for (orig, w) in z.iter().zip(&lifted) {
            prop_assert!((orig + shift - w).norm() < 1e-12 * (1.0 + orig.norm()));
        }
    }

    #[test]
    fn projective_distance_ignores_scale(
        v in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..6),
        t in unit_complex(),
    ) {
        let x: Vec<_> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(x.iter().any(|z| z.norm() > 1e-3));
        let y: Vec<_> = x.iter().map(|z| z * t).collect();
        prop_assert!(projective_distance(&x, &y) < 1e-12);
        prop_assert!((projective_distance(&x, &y) - projective_distance(&y, &x)).abs() < 1e-15);
    }

    #[test]
    fn stabilizer_order_is_a_product_of_factorials(m in prop::collection::vec(-2i64..=2, 3..=6)) {
        let parts = vec![1usize; m.len()];
        let mut vals: Vec<i64> = m.clone();
        let last = -vals[..vals.len() - 1].iter().sum::<i64>();
        *vals.last_mut().unwrap() = last;
        let spec = IndexSpectrum::exact(
            MultiplicityProfile::new(parts).unwrap(),
            vals.iter().map(|&v| indexfiber_core::scalar::gaussian_int(v, 0)).collect(),
        ).unwrap();
        let g = genericity(&spec).unwrap();
        let mut sorted = vals.clone();
        sorted.sort();
        let mut want = 1u64;
        let mut run = 1u64;
        for w in sorted.windows(2) {
            if w[0] == w[1] { run += 1; want *= run; } else { run = 1; }
        }
        prop_assert_eq!(g.stabilizer_order, want);
    }

    #[test]
    fn rationals_roundtrip_through_text(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = BigRational::new(BigInt::from(n), BigInt::from(d));
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_determinants_match_vandermonde(
        r_list in prop::collection::vec(1usize..=3, 1..=3),
        alphas in prop::collection::btree_set(-6i64..=6, 3),
    ) {
        let a: Vec<_> = alphas.into_iter().take(r_list.len()).map(rat).collect();
        let (lhs, rhs) = block_determinant_identity(&r_list, &a).unwrap();
        prop_assert_eq!(lhs, rhs);
        let (lhs, rhs) = shifted_determinant_identity(&r_list, &a).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_similarity_holds(n in 1usize..=6, b in 1usize..=6, num in -9i64..=9, den in 1i64..=5) {
        let alpha = BigRational::new(BigInt::from(num), BigInt::from(den));
        prop_assert!(similarity_identity(n, b, &alpha).unwrap());
    }
}
