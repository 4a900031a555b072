use indexfiber_core::fiber::{count_fiber, lift_to_sigma, monic_centered_forms, roundtrip};
use indexfiber_core::index::{build_map, holomorphic_index, spectrum_of, IndexSpectrum, MultiplicityProfile};
use indexfiber_core::psi::{assemble_psi, recover_aux};
use indexfiber_core::scalar::gaussian_int;
use indexfiber_core::solver::{projective_distance, solve, Backend, Classification, SolverConfig};
use indexfiber_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact(parts: &[usize], m: &[(i64, i64)]) -> IndexSpectrum {
    IndexSpectrum::exact(
        MultiplicityProfile::new(parts.to_vec()).unwrap(),
        m.iter().map(|&(a, b)| gaussian_int(a, b)).collect(),
    )
    .unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn sets_match(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|u| b.iter().any(|v| projective_distance(u, v) < tol))
}

#[test]
fn solutions_do_not_depend_on_the_chart() {
    let spec = exact(&[1, 1, 1, 2], &[(2, 1), (-3, 4), (5, 0), (-4, -5)]);
    let psi = assemble_psi(spec.profile(), &spec).unwrap();
    let a = solve(&psi, &SolverConfig { seed: 1, ..Default::default() }).unwrap();
    let b = solve(&psi, &SolverConfig { seed: 2, ..Default::default() }).unwrap();
    let pa: Vec<_> = a.solutions.iter().map(|s| s.coords.clone()).collect();
    let pb: Vec<_> = b.solutions.iter().map(|s| s.coords.clone()).collect();
    assert_eq!(pa.len(), 6);
    assert!(sets_match(&pa, &pb, 1e-7));
}

#[test]
fn companion_and_homotopy_agree_for_three_points() {
    for (parts, m) in [
        (vec![1, 1, 3], vec![(1, 1), (2, -3), (-3, 2)]),
        (vec![2, 2, 2], vec![(4, 0), (-1, 6), (-3, -6)]),
        (vec![1, 2, 3], vec![(7, 1), (-2, 2), (-5, -3)]),
    ] {
        let spec = exact(&parts, &m);
        let psi = assemble_psi(spec.profile(), &spec).unwrap();
        let run = |backend| {
            let out = solve(&psi, &SolverConfig { backend, ..Default::default() }).unwrap();
            out.solutions.iter().map(|s| s.coords.clone()).collect::<Vec<_>>()
        };
        let comp = run(Backend::Companion);
        let homo = run(Backend::Homotopy);
        assert_eq!(comp.len(), spec.profile().degree() - 2);
        assert!(sets_match(&comp, &homo, 1e-7), "{parts:?}");
    }
}

#[test]
fn recovery_succeeds_exactly_at_solutions() {
    let spec = exact(&[1, 1, 1, 1, 1], &[(1, 2), (3, -1), (-2, 5), (7, 1), (-9, -7)]);
    let psi = assemble_psi(spec.profile(), &spec).unwrap();
    let out = solve(&psi, &SolverConfig::default()).unwrap();
    assert_eq!(out.s_count(), 6);
    for s in out.s_points() {
        let mut z = s.coords.clone();
        z.push(c(0.0, 0.0));
        recover_aux(spec.profile(), &spec, &z).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let mut z = random_point(&mut rng, 4);
        z.push(c(0.0, 0.0));
        let err = recover_aux(spec.profile(), &spec, &z).unwrap_err();
        assert!(matches!(err, Error::Inconsistent { .. }), "{err}");
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let spec = exact(&[1, 1, 1, 2], &[(1, 1), (2, -1), (-4, 3), (1, -3)]);
    let psi = assemble_psi(spec.profile(), &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut x = random_point(&mut rng, 3);
        x[2] = c(1.0, 0.0);
        let jac = psi.jacobian(&x, 2).unwrap();
        let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let h = 1e-5 * scale;
        let mut worst: f64 = 0.0;
        let mut size: f64 = 0.0;
        for j in 0..2 {
            let mut p = x.clone();
            let mut m = x.clone();
            p[j] += h;
            m[j] -= h;
            let (fp, fm) = (psi.evaluate(&p).unwrap(), psi.evaluate(&m).unwrap());
            for k in 0..2 {
                worst = worst.max(((fp[k] - fm[k]) / (2.0 * h) - jac[k][j]).norm());
                size = size.max(jac[k][j].norm());
            }
        }
        assert!(worst < 1e-6 * size, "{worst} vs {size}");
    }
}

#[test]
fn euler_relation() {
    let spec = exact(&[1, 1, 1, 1, 2], &[(1, 0), (0, 3), (-2, 1), (4, -1), (-3, -3)]);
    let psi = assemble_psi(spec.profile(), &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_point(&mut rng, 4);
    let (vals, grad) = psi.eval_with_gradient(&x).unwrap();
    for (k, deg) in psi.degrees().into_iter().enumerate() {
        let lhs: Complex64 = x.iter().zip(&grad[k]).map(|(a, b)| a * b).sum();
        assert!((lhs - vals[k] * deg as f64).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}

#[test]
fn lifting_examples() {
    let p = MultiplicityProfile::new(vec![1, 1, 2]).unwrap();
    let root = c(0.0, 2f64.sqrt());
    let lifted = lift_to_sigma(&[root, c(1.0, 0.0)], &p).unwrap();
    let b = (root + 1.0) / 4.0;
    assert!((lifted[0] - (root - b)).norm() < 1e-15);
    assert!((lifted[2] + b).norm() < 1e-15);
    let weighted: Complex64 = lifted.iter().zip(p.parts()).map(|(z, &d)| z * d as f64).sum();
    assert!(weighted.norm() < 1e-12);
}

#[test]
fn scalings_give_the_same_spectrum() {
    let p = MultiplicityProfile::new(vec![1, 2, 2]).unwrap();
    let zetas = vec![c(0.2, 0.1), c(-0.9, 0.4), c(0.5, -0.8)];
    let rho = c(0.3, 1.1);
    let base = spectrum_of(&build_map(&p, zetas.clone(), rho).unwrap()).unwrap();
    let forms = monic_centered_forms(&p, &zetas, rho).unwrap();
    assert_eq!(forms.len(), 4);
    for f in &forms {
        assert!(f.is_monic_centered(1e-12));
        let s = spectrum_of(f).unwrap();
        for i in 0..3 {
            assert!((s.values()[i] - base.values()[i]).norm() < 1e-10);
        }
    }
}

#[test]
fn cubic_representatives_from_closed_form() {
    // profile (1,2), m = (1,-1): the S point is (1 : 0) up to scale, rho = -1/(zeta_1^2 m_1)
    let report = count_fiber(&exact(&[1, 2], &[(1, 0), (-1, 0)]), &SolverConfig::default()).unwrap();
    assert_eq!((report.mp_count, report.mc_count), (1, 2));
    for r in &report.representatives {
        let z = r.map.zetas();
        // simple point has multiplier 1 + (z_1 - z_2)^2 and index 1/(1 - f') = 1
        let f1 = 1.0 + (z[0] - z[1]) * (z[0] - z[1]);
        assert!((1.0 / (1.0 - f1) - 1.0).norm() < 1e-10);
        assert!((z[0] + 2.0 * z[1]).norm() < 1e-12);
    }
}

#[test]
fn generic_counts_obey_the_orbit_identity() {
    for (parts, m) in [
        (vec![1, 1, 1, 1], vec![(1, 0), (3, 0), (5, 0), (-9, 0)]),
        (vec![1, 1, 1, 3], vec![(1, 1), (2, 0), (0, 3), (-3, -4)]),
        (vec![2, 2, 3], vec![(1, 2), (3, -1), (-4, -1)]),
    ] {
        let d: usize = parts.iter().sum();
        let report = count_fiber(&exact(&parts, &m), &SolverConfig::default()).unwrap();
        assert_eq!(report.mc_count * report.genericity.stabilizer_order, (d as u64 - 1) * report.s_count as u64);
        assert_eq!((report.mp_count, report.mc_count), (report.expected_mp, report.expected_mc));
        assert!(report.free_action);
    }
}

#[test]
fn repeated_pairs_reduce_the_count() {
    // (d_1, m_1) = (d_2, m_2): the stabilizer has order two
    let report = count_fiber(&exact(&[1, 1, 1, 1], &[(2, 1), (2, 1), (1, -5), (-5, 3)]), &SolverConfig::default()).unwrap();
    assert!(!report.is_generic());
    assert_eq!(report.genericity.stabilizer_order, 2);
    assert!(report.mc_count < report.expected_mc);
    assert_eq!(report.mc_count * 2, 3 * report.s_count as u64);
}

#[test]
fn roundtrip_four_simple_points() {
    let p = MultiplicityProfile::new(vec![1, 1, 1, 1]).unwrap();
    for seed in 0..10 {
        let out = roundtrip(&p, seed, &SolverConfig::default()).unwrap();
        assert!(out.success, "seed {seed}: {:?} {}", out.error, out.best_distance);
    }
}

#[test]
fn aux_matches_index_oracle_on_random_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for parts in [vec![1, 1, 3], vec![2, 3], vec![1, 2, 2, 2], vec![1, 1, 1, 1, 1]] {
        let p = MultiplicityProfile::new(parts).unwrap();
        let zetas = indexfiber_core::fiber::sample_separated(&mut rng, p.ell(), 1.5, 0.3);
        let rho = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.28));
        let f = build_map(&p, zetas.clone(), rho).unwrap();
        let aux = recover_aux(&p, &spectrum_of(&f).unwrap(), &zetas).unwrap();
        assert!((aux.rho - rho).norm() < 1e-9 * rho.norm());
        for (i, res) in aux.residues.iter().enumerate() {
            for (k, v) in res.iter().enumerate() {
                let want = holomorphic_index(&f, i, k).unwrap();
                assert!((v - want).norm() < 1e-8 * (1.0 + want.norm()));
            }
        }
    }
}

#[test]
fn classification_of_the_split_spectrum() {
    let spec = exact(&[1, 1, 1, 1], &[(1, 0), (-1, 0), (2, 0), (-2, 0)]);
    let report = count_fiber(&spec, &SolverConfig::default()).unwrap();
    let b: Vec<_> = report.solutions.iter().filter(|s| s.classification == Classification::B).collect();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].coincidence_pattern, vec![vec![1, 2], vec![3, 4]]);
    assert_eq!((report.s_count, report.mp_count, report.mc_count), (1, 1, 3));
}
