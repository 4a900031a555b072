//! Observed fiber counts against the generic formulas over all profiles up
//! to a given degree.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::fiber::{count_fiber, expected_counts, genericity, FiberReport};
use crate::index::{IndexSpectrum, MultiplicityProfile};
use crate::scalar::{gaussian_int, Gaussian};
use crate::solver::SolverConfig;

/// Random Gaussian-integer spectrum, resampled until it is generic.
pub fn random_generic_spectrum(rng: &mut impl Rng, profile: &MultiplicityProfile) -> IndexSpectrum {
    loop {
        let spectrum = random_spectrum(rng, profile, 9);
        if genericity(&spectrum).map(|g| g.is_generic).unwrap_or(false) {
            return spectrum;
        }
    }
}

fn random_spectrum(rng: &mut impl Rng, profile: &MultiplicityProfile, bound: i64) -> IndexSpectrum {
    let ell = profile.ell();
    let mut m: Vec<Gaussian> = (0..ell - 1)
        .map(|_| gaussian_int(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
        .collect();
    let last = m.iter().fold(gaussian_int(0, 0), |acc, v| acc - v.clone());
    m.push(last);
    IndexSpectrum::exact(profile.clone(), m).expect("sums to zero")
}

/// A spectrum with `m_1 + m_2 = 0` and all other values generic, for `l >= 4`.
pub fn split_spectrum(rng: &mut impl Rng, profile: &MultiplicityProfile) -> Option<IndexSpectrum> {
    let ell = profile.ell();
    if ell < 4 {
        return None;
    }
    loop {
        let head = gaussian_int(rng.gen_range(1..=9), rng.gen_range(-9..=9));
        let rest = random_spectrum(rng, &MultiplicityProfile::new(profile.parts()[2..].to_vec()).ok()?, 9);
        let mut m = vec![head.clone(), -head];
        m.extend(rest.exact_values()?.iter().cloned());
        let spectrum = IndexSpectrum::exact(profile.clone(), m).ok()?;
        let g = genericity(&spectrum).ok()?;
        if g.stabilizer_order == 1 && g.zero_subset_partition_count == 1 {
            return Some(spectrum);
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub profile: MultiplicityProfile,
    pub spectrum: IndexSpectrum,
    pub injected: bool,
    pub expected: (u64, u64),
    pub outcome: std::result::Result<FiberReport, Error>,
    pub seconds: f64,
}

impl SweepRow {
    pub fn observed(&self) -> Option<(u64, u64)> {
        self.outcome.as_ref().ok().map(|r| (r.mp_count, r.mc_count))
    }

    /// Generic rows must hit the formulas; injected rows must fall strictly
    /// below the mc bound and be flagged as non-generic.
    pub fn consistent(&self) -> bool {
        match &self.outcome {
            Ok(r) if self.injected => !r.is_generic() && r.mc_count < self.expected.1,
            Ok(r) => r.is_generic() && (r.mp_count, r.mc_count) == self.expected,
            Err(_) => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub seed: u64,
    pub config: SolverConfig,
    pub inject_non_generic: bool,
}

/// One row per profile with `2 <= l <= d <= d_max`, plus an injected
/// non-generic row for each profile with at least four points when requested.
pub fn sweep(d_max: usize, options: &SweepOptions) -> Vec<SweepRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut rows = Vec::new();
    for d in 2..=d_max {
        for profile in MultiplicityProfile::all_of_degree(d).into_iter().filter(|p| p.ell() >= 2) {
            let expected = expected_counts(d, profile.ell()).expect("valid profile");
            let mut cases = vec![(random_generic_spectrum(&mut rng, &profile), false)];
            if options.inject_non_generic {
                if let Some(s) = split_spectrum(&mut rng, &profile) {
                    cases.push((s, true));
                }
            }
            for (spectrum, injected) in cases {
                let start = Instant::now();
                let outcome = count_fiber(&spectrum, &options.config);
                rows.push(SweepRow {
                    profile: profile.clone(),
                    spectrum,
                    injected,
                    expected,
                    outcome,
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
        }
    }
    rows
}
