//! Built-in consistency checks: the exact matrix identities, the residue
//! oracle, and the homogeneity of the psi system.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::fiber::sample_separated;
use crate::index::{
    build_map, contour_index, default_contour_radius, holomorphic_index, index_sum_check, IndexSpectrum,
    MultiplicityProfile, PolynomialMap,
};
use crate::matrices::{
    block_determinant_identity, block_entries, diag_x, diag_x_inverse, kernel_annihilation_check, pascal_block,
    shifted_determinant_identity, shifted_nilpotent_power, similarity_identity,
};
use crate::psi::assemble_psi;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Similarity,
    BlockDeterminant,
    ShiftedDeterminant,
    KernelAnnihilation,
    IndexSum,
    ContourAgreement,
    PsiHomogeneity,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Similarity,
        Check::BlockDeterminant,
        Check::ShiftedDeterminant,
        Check::KernelAnnihilation,
        Check::IndexSum,
        Check::ContourAgreement,
        Check::PsiHomogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Similarity => "similarity",
            Check::BlockDeterminant => "block-determinant",
            Check::ShiftedDeterminant => "shifted-determinant",
            Check::KernelAnnihilation => "kernel-annihilation",
            Check::IndexSum => "index-sum",
            Check::ContourAgreement => "series-vs-contour",
            Check::PsiHomogeneity => "psi-homogeneity",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Random rational tuples per determinant profile.
    pub alpha_tuples: usize,
    pub random_maps: usize,
    pub contour_maps: usize,
    /// Deliberately corrupts one check, to confirm that it can fail.
    pub inject_fault: Option<Check>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 1,
            alpha_tuples: 10,
            random_maps: 200,
            contour_maps: 50,
            inject_fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: Check,
    pub cases: usize,
    pub failures: usize,
    /// Worst observed error for floating checks, zero for exact ones.
    pub worst: f64,
    pub seconds: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Ordered tuples of positive integers summing to `total` with at most `max_len` parts.
pub fn compositions(total: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max_len: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        if prefix.len() == max_len {
            return;
        }
        for first in 1..=left {
            prefix.push(first);
            rec(left - first, max_len, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if total > 0 {
        rec(total, max_len, &mut Vec::new(), &mut out);
    }
    out
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-20i64..=20)), BigInt::from(rng.gen_range(1i64..=9)))
}

/// `n` pairwise distinct random rationals.
pub fn random_distinct_rationals(rng: &mut impl Rng, n: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(n);
    while out.len() < n {
        let a = random_rational(rng);
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

fn fault(options: &SelftestOptions, check: Check) -> bool {
    options.inject_fault == Some(check)
}

fn timed(check: Check, f: impl FnOnce() -> (usize, usize, f64)) -> CheckRow {
    let start = Instant::now();
    let (cases, failures, worst) = f();
    CheckRow {
        check,
        cases,
        failures,
        worst,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn similarity_row(options: &SelftestOptions) -> CheckRow {
    timed(Check::Similarity, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut jobs = Vec::new();
        for n in 1..=8 {
            for b in 1..=8 {
                jobs.push((n, b, BigRational::zero()));
                for _ in 0..options.alpha_tuples.min(10) {
                    jobs.push((n, b, random_rational(&mut rng)));
                }
            }
        }
        let bad = fault(options, Check::Similarity);
        let failures = jobs
            .par_iter()
            .filter(|(n, b, a)| {
                if bad {
                    // conjugate the block taken at a shifted point
                    let shifted = a + BigRational::from_integer(1.into());
                    let lhs = block_entries(n + 1, 1, b + 1, 1, a);
                    let rhs = diag_x::<BigRational>(*n).mul(&pascal_block(*n, *b, &shifted)).mul(&diag_x_inverse(*b));
                    return lhs != rhs;
                }
                !similarity_identity(*n, *b, a).unwrap_or(false)
            })
            .count();
        (jobs.len(), failures, 0.0)
    })
}

fn determinant_row(
    options: &SelftestOptions,
    check: Check,
    identity: fn(&[usize], &[BigRational]) -> Result<(BigRational, BigRational)>,
) -> CheckRow {
    timed(check, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0xd37);
        let mut jobs = Vec::new();
        for r in 1..=8 {
            for comp in compositions(r, 4) {
                for _ in 0..options.alpha_tuples {
                    let alphas = random_distinct_rationals(&mut rng, comp.len());
                    jobs.push((comp.clone(), alphas));
                }
            }
        }
        let bad = fault(options, check);
        let failures = jobs
            .par_iter()
            .filter(|(comp, alphas)| match identity(comp, alphas) {
                Ok((lhs, rhs)) => {
                    let lhs = if bad { lhs + BigRational::from_integer(1.into()) } else { lhs };
                    lhs != rhs
                }
                Err(_) => true,
            })
            .count();
        (jobs.len(), failures, 0.0)
    })
}

pub fn block_determinant_row(options: &SelftestOptions) -> CheckRow {
    determinant_row(options, Check::BlockDeterminant, block_determinant_identity::<BigRational>)
}

pub fn shifted_determinant_row(options: &SelftestOptions) -> CheckRow {
    determinant_row(options, Check::ShiftedDeterminant, shifted_determinant_identity::<BigRational>)
}

/// Every `(l', d')` with `d = l' + sum d' <= 9`, one point allowed at the origin.
pub fn kernel_row(options: &SelftestOptions) -> CheckRow {
    timed(Check::KernelAnnihilation, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x3_10);
        let mut jobs = Vec::new();
        for d in 3..=9 {
            for ell_prime in 2..d {
                for comp in compositions(d - ell_prime, d - ell_prime) {
                    let mut alphas = random_distinct_rationals(&mut rng, comp.len());
                    if rng.gen_bool(0.5) {
                        alphas[0] = BigRational::zero();
                    }
                    jobs.push((ell_prime, comp, alphas));
                }
            }
        }
        let bad = fault(options, Check::KernelAnnihilation);
        let failures = jobs
            .par_iter()
            .filter(|(ell_prime, comp, alphas)| {
                if bad {
                    // the block at a point that is absent from the product
                    let n = ell_prime + comp.iter().sum::<usize>() - 2;
                    let mut left = block_entries(ell_prime - 2, 0, n, 0, &BigRational::zero());
                    for (dp, a) in comp.iter().zip(alphas) {
                        left = left.mul(&shifted_nilpotent_power(n, a, *dp as u32));
                    }
                    let moved = &alphas[0] + BigRational::from_integer(1.into());
                    return !left.mul(&pascal_block(n, comp[0], &moved)).is_zero();
                }
                !kernel_annihilation_check(*ell_prime, comp, alphas).unwrap_or(false)
            })
            .count();
        (jobs.len(), failures, 0.0)
    })
}

/// Random non-decreasing profile of degree `d`.
pub fn random_profile(rng: &mut impl Rng, d: usize) -> MultiplicityProfile {
    let all = MultiplicityProfile::all_of_degree(d);
    all[rng.gen_range(0..all.len())].clone()
}

/// Random map with separated fixed points and `|rho|` in `[0.5, 2]`.
pub fn random_map(rng: &mut impl Rng, profile: &MultiplicityProfile) -> PolynomialMap {
    let zetas = sample_separated(rng, profile.ell(), 1.5, 0.3);
    let rho = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    build_map(profile, zetas, rho).expect("separated points")
}

/// `|sum iota| / max |iota|` over random maps of degree at most 8.
pub fn index_sum_row(options: &SelftestOptions) -> CheckRow {
    timed(Check::IndexSum, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x12);
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        for _ in 0..options.random_maps {
            let d = rng.gen_range(2..=8);
            let profile = random_profile(&mut rng, d);
            let f = random_map(&mut rng, &profile);
            let scale = (0..f.profile().ell())
                .map(|i| holomorphic_index(&f, i, 0).map_or(0.0, |v| v.norm()))
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            let mut err = index_sum_check(&f) / scale;
            if fault(options, Check::IndexSum) {
                err += 1.0;
            }
            worst = worst.max(err);
            if !(err < 1e-10) {
                failures += 1;
            }
        }
        (options.random_maps, failures, worst)
    })
}

/// Series residues against trapezoid contour integrals.
pub fn contour_row(options: &SelftestOptions) -> CheckRow {
    timed(Check::ContourAgreement, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0xc0);
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        for _ in 0..options.contour_maps {
            let d = rng.gen_range(2..=8);
            let profile = random_profile(&mut rng, d);
            let f = random_map(&mut rng, &profile);
            for i in 0..f.profile().ell() {
                let series = holomorphic_index(&f, i, 0).expect("index in range");
                let radius = default_contour_radius(&f, i);
                let contour = contour_index(&f, i, radius, 256).expect("valid radius");
                let mut err = (series - contour).norm() / series.norm().max(1.0);
                if fault(options, Check::ContourAgreement) {
                    err += 1.0;
                }
                worst = worst.max(err);
                if !(err < 1e-8) {
                    failures += 1;
                }
            }
        }
        (options.contour_maps, failures, worst)
    })
}

/// `psi_k(s x) = s^{deg psi_k} psi_k(x)` on random points and spectra.
pub fn homogeneity_row(options: &SelftestOptions) -> CheckRow {
    timed(Check::PsiHomogeneity, || {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x40);
        let mut cases = 0;
        let mut failures = 0;
        let mut worst: f64 = 0.0;
        for d in 3..=8 {
            for profile in MultiplicityProfile::all_of_degree(d).into_iter().filter(|p| p.ell() >= 3) {
                let ell = profile.ell();
                let mut m: Vec<Complex64> = (0..ell - 1)
                    .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                m.push(-m.iter().sum::<Complex64>());
                let spectrum = IndexSpectrum::approximate(profile.clone(), m).expect("sums to zero");
                let psi = assemble_psi(&profile, &spectrum).expect("valid profile");
                let x: Vec<Complex64> =
                    (0..ell - 1).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let s = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
                let sx: Vec<Complex64> = x.iter().map(|z| z * s).collect();
                let base = psi.evaluate(&x).expect("dimension");
                let scaled = psi.evaluate(&sx).expect("dimension");
                for ((b, v), e) in base.iter().zip(&scaled).zip(psi.degrees()) {
                    cases += 1;
                    let mut err = (v - b * s.powu(e)).norm() / v.norm().max(b.norm()).max(1e-300);
                    if fault(options, Check::PsiHomogeneity) {
                        err += 1.0;
                    }
                    worst = worst.max(err);
                    if !(err < 1e-10) {
                        failures += 1;
                    }
                }
            }
        }
        (cases, failures, worst)
    })
}

pub fn run_check(check: Check, options: &SelftestOptions) -> CheckRow {
    match check {
        Check::Similarity => similarity_row(options),
        Check::BlockDeterminant => block_determinant_row(options),
        Check::ShiftedDeterminant => shifted_determinant_row(options),
        Check::KernelAnnihilation => kernel_row(options),
        Check::IndexSum => index_sum_row(options),
        Check::ContourAgreement => contour_row(options),
        Check::PsiHomogeneity => homogeneity_row(options),
    }
}

pub fn run_selftest(options: &SelftestOptions) -> Vec<CheckRow> {
    Check::ALL.iter().map(|&c| run_check(c, options)).collect()
}
