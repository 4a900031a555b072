//! Fiber counts and monic centered representatives.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::index::{build_map, spectrum_of, IndexSpectrum, MultiplicityProfile, PolynomialMap};
use crate::psi::{assemble_psi, recover_aux};
use crate::scalar::Gaussian;
use crate::solver::{self, projective_distance, ProjectiveSolution, SolveOutput, SolverConfig};

/// Stored zero-sum partitions beyond this many are only counted.
pub const PARTITION_LIST_LIMIT: usize = 256;
/// Relative tolerance for equality and zero tests on floating spectra.
pub const INEXACT_TOL: f64 = 1e-12;
/// Oracle agreement required of every representative.
pub const ORACLE_TOL: f64 = 1e-7;
/// Relative distance below which two coefficient vectors are the same map.
pub const COEFF_DEDUP_TOL: f64 = 1e-8;
/// Projective matching tolerance for stabilizer orbits.
pub const ORBIT_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct GenericityReport {
    /// Number of permutations preserving every pair `(d_i, m_i)`.
    pub stabilizer_order: u64,
    /// Adjacent transpositions generating the stabilizer, as 0-based images.
    pub stabilizer_generators: Vec<Vec<usize>>,
    /// Partitions of the labels into at least two blocks with zero index
    /// sums (0-based blocks), at most [`PARTITION_LIST_LIMIT`] of them.
    pub zero_subset_partitions: Vec<Vec<Vec<usize>>>,
    pub zero_subset_partition_count: u64,
    pub is_zero_vector: bool,
    pub is_generic: bool,
    /// False when the decisions used a tolerance on floating values.
    pub exact: bool,
}

impl GenericityReport {
    pub fn partitions_truncated(&self) -> bool {
        (self.zero_subset_partitions.len() as u64) < self.zero_subset_partition_count
    }
}

enum Values<'a> {
    Exact(&'a [Gaussian]),
    Float(&'a [Complex64], f64),
}

impl Values<'_> {
    fn of(spectrum: &IndexSpectrum) -> Values<'_> {
        match spectrum.exact_values() {
            Some(ex) => Values::Exact(ex),
            None => {
                let scale = spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
                Values::Float(spectrum.values(), INEXACT_TOL * scale.max(f64::MIN_POSITIVE))
            }
        }
    }

    fn equal(&self, i: usize, j: usize) -> bool {
        match self {
            Values::Exact(m) => m[i] == m[j],
            Values::Float(m, tol) => (m[i] - m[j]).norm() <= *tol,
        }
    }

    fn subset_sum_zero(&self, mask: u64) -> bool {
        let members = (0..64).filter(|i| mask >> i & 1 == 1);
        match self {
            Values::Exact(m) => members.fold(Gaussian::zero(), |acc, i| acc + m[i].clone()).is_zero(),
            Values::Float(m, tol) => members.map(|i| m[i]).sum::<Complex64>().norm() <= *tol,
        }
    }
}

fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Groups of labels with identical `(d_i, m_i)`.
fn pair_classes(spectrum: &IndexSpectrum) -> Vec<Vec<usize>> {
    let vals = Values::of(spectrum);
    let parts = spectrum.profile().parts();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..parts.len() {
        match groups.iter_mut().find(|g| parts[g[0]] == parts[i] && vals.equal(g[0], i)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

fn zero_partitions(ell: usize, zero: &[bool], out: &mut Vec<Vec<Vec<usize>>>, count: &mut u64) {
    fn rec(
        remaining: u64,
        zero: &[bool],
        blocks: &mut Vec<u64>,
        out: &mut Vec<Vec<Vec<usize>>>,
        count: &mut u64,
    ) {
        if remaining == 0 {
            if blocks.len() >= 2 {
                *count += 1;
                if out.len() < PARTITION_LIST_LIMIT {
                    out.push(
                        blocks
                            .iter()
                            .map(|b| (0..64).filter(|i| b >> i & 1 == 1).collect())
                            .collect(),
                    );
                }
            }
            return;
        }
        let low = remaining & remaining.wrapping_neg();
        let rest = remaining ^ low;
        // every sub-mask of `rest`, joined with the lowest remaining label
        let mut sub = rest;
        loop {
            let block = sub | low;
            if zero[block as usize] {
                blocks.push(block);
                rec(remaining ^ block, zero, blocks, out, count);
                blocks.pop();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let full = (1u64 << ell) - 1;
    rec(full, zero, &mut Vec::new(), out, count);
}

/// Stabilizer of the labeled spectrum and its zero-sum partitions.
pub fn genericity(spectrum: &IndexSpectrum) -> Result<GenericityReport> {
    let ell = spectrum.values().len();
    if ell > 16 {
        return Err(Error::arg("zero-sum enumeration supports at most 16 fixed points"));
    }
    let classes = pair_classes(spectrum);
    let stabilizer_order = classes.iter().map(|g| factorial_u64(g.len())).product();
    let mut stabilizer_generators = Vec::new();
    for g in &classes {
        for w in g.windows(2) {
            let mut perm: Vec<usize> = (0..ell).collect();
            perm.swap(w[0], w[1]);
            stabilizer_generators.push(perm);
        }
    }
    let vals = Values::of(spectrum);
    let zero: Vec<bool> = (0..1u64 << ell).map(|mask| mask != 0 && vals.subset_sum_zero(mask)).collect();
    let mut partitions = Vec::new();
    let mut count = 0;
    zero_partitions(ell, &zero, &mut partitions, &mut count);
    let is_zero_vector = spectrum.is_zero_vector();
    Ok(GenericityReport {
        stabilizer_order,
        stabilizer_generators,
        zero_subset_partitions: partitions,
        zero_subset_partition_count: count,
        is_zero_vector,
        is_generic: stabilizer_order == 1 && count == 0,
        exact: spectrum.is_exact(),
    })
}

/// Every element of the stabilizer, as 0-based image vectors, identity first.
fn stabilizer_elements(spectrum: &IndexSpectrum) -> Vec<Vec<usize>> {
    let ell = spectrum.values().len();
    let mut out = vec![(0..ell).collect::<Vec<usize>>()];
    for g in pair_classes(spectrum).into_iter().filter(|g| g.len() > 1) {
        let mut next = Vec::new();
        for perm in &out {
            for arrangement in permutations(&g) {
                let mut p = perm.clone();
                for (&from, &to) in g.iter().zip(&arrangement) {
                    p[from] = to;
                }
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Appends `zeta_l = 0` and translates so that `sum d_i zeta_i = 0`.
pub fn lift_to_sigma(coords: &[Complex64], profile: &MultiplicityProfile) -> Result<Vec<Complex64>> {
    let ell = profile.ell();
    if coords.len() + 1 != ell {
        return Err(Error::arg(format!("expected {} coordinates, got {}", ell - 1, coords.len())));
    }
    let mut full = coords.to_vec();
    full.push(Complex64::new(0.0, 0.0));
    let b = weighted_mean(&full, profile);
    Ok(full.into_iter().map(|z| z - b).collect())
}

fn weighted_mean(zetas: &[Complex64], profile: &MultiplicityProfile) -> Complex64 {
    let total: Complex64 = zetas.iter().zip(profile.parts()).map(|(z, &d)| z * d as f64).sum();
    total / profile.degree() as f64
}

/// The `d - 1` monic centered maps affinely conjugate to
/// `z + rho * prod (z - zeta_i)^{d_i}`, ordered by the argument of the
/// scaling factor.
pub fn monic_centered_forms(
    profile: &MultiplicityProfile,
    zetas: &[Complex64],
    rho: Complex64,
) -> Result<Vec<PolynomialMap>> {
    let d = profile.degree();
    let k = (d - 1) as f64;
    let shifted: Vec<Complex64> = {
        let b = weighted_mean(zetas, profile);
        zetas.iter().map(|z| z - b).collect()
    };
    let base = Complex64::from_polar(rho.norm().powf(1.0 / k), rho.arg() / k);
    let mut scalings: Vec<Complex64> = (0..d - 1)
        .map(|j| base * Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k))
        .collect();
    scalings.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    scalings
        .into_iter()
        .map(|a| {
            let w: Vec<Complex64> = shifted.iter().map(|z| a * z).collect();
            // For d = 2 the identity term contributes to the z coefficient, so
            // centering needs sum d_i w_i = 1 rather than 0.
            let c = if d == 2 { (weighted_mean(&w, profile) * 2.0 - 1.0) / 2.0 } else { Complex64::zero() };
            build_map(profile, w.into_iter().map(|z| z - c).collect(), Complex64::new(1.0, 0.0))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct McRepresentative {
    pub map: PolynomialMap,
    /// Distance between the oracle spectrum of `map` and the target.
    pub oracle_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverDiagnostics {
    pub backend: solver::Backend,
    pub paths_tracked: usize,
    pub paths_failed: usize,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberReport {
    pub spectrum: IndexSpectrum,
    pub genericity: GenericityReport,
    pub mp_count: u64,
    pub mc_count: u64,
    pub expected_mp: u64,
    pub expected_mc: u64,
    pub s_count: usize,
    pub b_count: usize,
    pub representatives: Vec<McRepresentative>,
    pub solutions: Vec<ProjectiveSolution>,
    pub solver: Option<SolverDiagnostics>,
    /// Whether the stabilizer fixes no scaled representative.
    pub free_action: bool,
    pub notes: Vec<String>,
}

impl FiberReport {
    pub fn is_generic(&self) -> bool {
        self.genericity.is_generic
    }

    pub fn max_oracle_distance(&self) -> f64 {
        self.representatives.iter().map(|r| r.oracle_distance).fold(0.0, f64::max)
    }
}

/// `((d-2)!/(d-l)!, (d-1)!/(d-l)!)`, and `(1, 1)` for a single fixed point.
pub fn expected_counts(d: usize, ell: usize) -> Result<(u64, u64)> {
    if ell == 0 || ell > d || d < 2 {
        return Err(Error::arg(format!("need 1 <= l <= d and d >= 2, got d={d}, l={ell}")));
    }
    if ell == 1 {
        return Ok((1, 1));
    }
    let falling = |top: usize| -> u64 { (d - ell + 1..=top).map(|v| v as u64).product() };
    Ok((falling(d - 2), falling(d - 1)))
}

fn coeff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn coeff_scale(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn oracle_distance(map: &PolynomialMap, spectrum: &IndexSpectrum) -> Result<f64> {
    let got = spectrum_of(map)?;
    let scale = spectrum.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
    spectrum
        .unordered_distance(&got.unordered())
        .map(|d| d / scale)
        .ok_or_else(|| Error::VerificationFailure("representative has the wrong multiplicities".into()))
}

fn report_shell(spectrum: &IndexSpectrum, genericity: GenericityReport) -> Result<FiberReport> {
    let profile = spectrum.profile();
    let (expected_mp, expected_mc) = expected_counts(profile.degree(), profile.ell())?;
    Ok(FiberReport {
        spectrum: spectrum.clone(),
        genericity,
        mp_count: 0,
        mc_count: 0,
        expected_mp,
        expected_mc,
        s_count: 0,
        b_count: 0,
        representatives: Vec::new(),
        solutions: Vec::new(),
        solver: None,
        free_action: true,
        notes: Vec::new(),
    })
}

/// Lifts the S-points of a solve to monic centered maps, verifies each with
/// the residue oracle and counts the fibers.
pub fn enumerate_mc(spectrum: &IndexSpectrum, solved: &SolveOutput, genericity: GenericityReport) -> Result<FiberReport> {
    let profile = spectrum.profile().clone();
    let d = profile.degree();
    let mut report = report_shell(spectrum, genericity)?;
    report.solutions = solved.solutions.clone();
    report.s_count = solved.s_count();
    report.b_count = solved.solutions.len() - report.s_count;
    report.solver = Some(SolverDiagnostics {
        backend: solved.backend,
        paths_tracked: solved.paths_tracked,
        paths_failed: solved.paths_failed,
        attempts: solved.attempts,
    });

    let mut sigma = Vec::new();
    let mut reps: Vec<McRepresentative> = Vec::new();
    for sol in solved.s_points() {
        let mut full = sol.coords.clone();
        full.push(Complex64::zero());
        let aux = recover_aux(&profile, spectrum, &full).map_err(|e| {
            Error::VerificationFailure(format!("residue recovery failed at a solution: {e}"))
        })?;
        let lifted = lift_to_sigma(&sol.coords, &profile)?;
        for map in monic_centered_forms(&profile, &lifted, aux.rho)? {
            let dist = oracle_distance(&map, spectrum)?;
            if dist > ORACLE_TOL {
                return Err(Error::VerificationFailure(format!(
                    "representative spectrum is {dist:.3e} away from the target"
                )));
            }
            let dup = reps.iter().any(|r| {
                coeff_distance(r.map.coeffs(), map.coeffs()) <= COEFF_DEDUP_TOL * coeff_scale(map.coeffs())
            });
            if !dup {
                reps.push(McRepresentative { map, oracle_distance: dist });
            }
        }
        sigma.push(lifted);
    }

    // Stabilizer orbits on the sum-zero configurations.
    let group = stabilizer_elements(spectrum);
    let n = sigma.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut free_action = true;
    for i in 0..n {
        for perm in group.iter().skip(1) {
            let moved: Vec<Complex64> = (0..sigma[i].len()).map(|k| sigma[i][perm[k]]).collect();
            for j in 0..n {
                if projective_distance(&moved, &sigma[j]) < ORBIT_TOL {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    for r in &reps {
        let w: Vec<Complex64> = r.map.zetas().to_vec();
        let fixed = group.iter().skip(1).any(|perm| {
            (0..w.len()).all(|k| (w[perm[k]] - w[k]).norm() <= ORBIT_TOL * coeff_scale(&w))
        });
        free_action &= !fixed;
    }
    let mp_count = (0..n).filter(|&i| root(&mut parent, i) == i).count() as u64;
    let mc_count = reps.len() as u64;
    reps.sort_by(|a, b| {
        let ka: Vec<(f64, f64)> = a.map.coeffs().iter().rev().map(|z| (z.re, z.im)).collect();
        let kb: Vec<(f64, f64)> = b.map.coeffs().iter().rev().map(|z| (z.re, z.im)).collect();
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });

    report.mp_count = mp_count;
    report.mc_count = mc_count;
    report.representatives = reps;
    report.free_action = free_action;

    if mp_count > report.expected_mp || mc_count > report.expected_mc {
        return Err(Error::VerificationFailure(format!(
            "counts ({mp_count}, {mc_count}) exceed the bounds ({}, {})",
            report.expected_mp, report.expected_mc
        )));
    }
    let order = report.genericity.stabilizer_order;
    let identity = mc_count * order == (d as u64 - 1) * report.s_count as u64;
    if report.genericity.is_generic {
        if !identity || mp_count != report.expected_mp || mc_count != report.expected_mc {
            return Err(Error::VerificationFailure(format!(
                "generic spectrum gave counts ({mp_count}, {mc_count}) from {} solutions, expected ({}, {})",
                report.s_count, report.expected_mp, report.expected_mc
            )));
        }
    } else {
        report.notes.push("spectrum is not generic; counts are reported as observed".into());
        if !identity {
            report.notes.push(format!(
                "mc_count * stabilizer order = {} differs from (d-1) * #S = {}",
                mc_count * order,
                (d as u64 - 1) * report.s_count as u64
            ));
        }
    }
    if !report.genericity.exact {
        report.notes.push("indices are inexact; genericity decided with a tolerance".into());
    }
    Ok(report)
}

/// Full pipeline from a labeled spectrum to a verified fiber report.
pub fn count_fiber(spectrum: &IndexSpectrum, config: &SolverConfig) -> Result<FiberReport> {
    let profile = spectrum.profile().clone();
    let genericity = genericity(spectrum)?;
    if profile.ell() == 1 {
        let mut report = report_shell(spectrum, genericity)?;
        let d = profile.degree();
        let w = if d == 2 { Complex64::new(0.5, 0.0) } else { Complex64::zero() };
        let map = build_map(&profile, vec![w], Complex64::new(1.0, 0.0))?;
        let dist = oracle_distance(&map, spectrum)?;
        report.representatives = vec![McRepresentative { map, oracle_distance: dist }];
        report.mp_count = 1;
        report.mc_count = 1;
        report.notes.push("a single fixed point determines the map".into());
        return Ok(report);
    }
    if genericity.is_zero_vector {
        let mut report = report_shell(spectrum, genericity)?;
        report.notes.push("all indices vanish, so the fiber is empty".into());
        return Ok(report);
    }
    let psi = assemble_psi(&profile, spectrum)?;
    let solved = solver::solve(&psi, config)?;
    enumerate_mc(spectrum, &solved, genericity)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundtripOutcome {
    pub success: bool,
    pub original: PolynomialMap,
    /// Smallest relative coefficient distance to a recovered representative.
    pub best_distance: f64,
    pub report: Option<FiberReport>,
    pub error: Option<Error>,
}

/// Random configuration with pairwise distances at least `sep` in the disk
/// of radius `radius`.
pub fn sample_separated(rng: &mut impl Rng, n: usize, radius: f64, sep: f64) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = Vec::with_capacity(n);
    while pts.len() < n {
        let z = Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        if pts.iter().all(|p| (p - z).norm() >= sep) {
            pts.push(z);
        }
    }
    pts
}

/// Builds a random map with the given profile, computes its spectrum, runs
/// the pipeline and checks that the map's monic centered form comes back.
pub fn roundtrip(profile: &MultiplicityProfile, seed: u64, config: &SolverConfig) -> Result<RoundtripOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zetas = sample_separated(&mut rng, profile.ell(), 1.5, 0.3);
    let rho = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    let original = monic_centered_forms(profile, &zetas, rho)?.swap_remove(0);
    let spectrum = spectrum_of(&original)?;
    let run_config = SolverConfig { seed: config.seed ^ seed, ..config.clone() };
    match count_fiber(&spectrum, &run_config) {
        Ok(report) => {
            let scale = coeff_scale(original.coeffs());
            let best = report
                .representatives
                .iter()
                .map(|r| coeff_distance(r.map.coeffs(), original.coeffs()) / scale)
                .fold(f64::INFINITY, f64::min);
            Ok(RoundtripOutcome {
                success: best <= 1e-6,
                original,
                best_distance: best,
                report: Some(report),
                error: None,
            })
        }
        Err(e) => Ok(RoundtripOutcome {
            success: false,
            original,
            best_distance: f64::INFINITY,
            report: None,
            error: Some(e),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gaussian_int;

    fn exact(parts: &[usize], m: &[(i64, i64)]) -> IndexSpectrum {
        IndexSpectrum::exact(
            MultiplicityProfile::new(parts.to_vec()).unwrap(),
            m.iter().map(|&(a, b)| gaussian_int(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn expected_count_table() {
        assert_eq!(expected_counts(4, 3).unwrap(), (2, 6));
        assert_eq!(expected_counts(7, 5).unwrap(), (60, 360));
        for d in 2..9 {
            assert_eq!(expected_counts(d, 2).unwrap(), (1, d as u64 - 1));
        }
        assert_eq!(expected_counts(5, 1).unwrap(), (1, 1));
        assert!(expected_counts(3, 4).is_err());
    }

    #[test]
    fn genericity_examples() {
        let g = genericity(&exact(&[1, 1, 2], &[(1, 0), (2, 0), (-3, 0)])).unwrap();
        assert!(g.is_generic);
        assert_eq!(g.stabilizer_order, 1);

        let g = genericity(&exact(&[1, 1, 1, 1], &[(1, 0), (-1, 0), (2, 0), (-2, 0)])).unwrap();
        assert!(!g.is_generic);
        assert_eq!(g.zero_subset_partitions, vec![vec![vec![0, 1], vec![2, 3]]]);

        let g = genericity(&exact(&[1, 1, 1], &[(1, 0), (1, 0), (-2, 0)])).unwrap();
        assert_eq!(g.stabilizer_order, 2);
        assert_eq!(g.stabilizer_generators, vec![vec![1, 0, 2]]);

        let g = genericity(&exact(&[1, 2], &[(0, 0), (0, 0)])).unwrap();
        assert!(g.is_zero_vector);
        assert!(!g.is_generic);
    }

    #[test]
    fn lift_is_weighted_centered() {
        let p = MultiplicityProfile::new(vec![1, 2]).unwrap();
        let z = lift_to_sigma(&[Complex64::new(1.0, 0.0)], &p).unwrap();
        assert!((z[0] - 2.0 / 3.0).norm() < 1e-15);
        assert!((z[1] + 1.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn cubic_with_double_point() {
        let report = count_fiber(&exact(&[1, 2], &[(1, 0), (-1, 0)]), &SolverConfig::default()).unwrap();
        assert_eq!((report.mp_count, report.mc_count), (1, 2));
        for r in &report.representatives {
            assert!(r.map.is_monic_centered(1e-10));
        }
    }

    #[test]
    fn quartic_with_three_points() {
        let report = count_fiber(&exact(&[1, 1, 2], &[(1, 0), (2, 0), (-3, 0)]), &SolverConfig::default()).unwrap();
        assert_eq!((report.mp_count, report.mc_count), (2, 6));
        assert!(report.max_oracle_distance() < 1e-9);
    }

    #[test]
    fn exceptional_cubic() {
        let report = count_fiber(&exact(&[1, 1, 1], &[(1, 0), (1, 0), (-2, 0)]), &SolverConfig::default()).unwrap();
        assert!(!report.is_generic());
        assert_eq!((report.mp_count, report.mc_count), (1, 1));
    }

    #[test]
    fn zero_vector_and_single_point() {
        let report = count_fiber(&exact(&[1, 1, 2], &[(0, 0), (0, 0), (0, 0)]), &SolverConfig::default()).unwrap();
        assert_eq!((report.mp_count, report.mc_count), (0, 0));
        for d in 2..6 {
            let report = count_fiber(&exact(&[d], &[(0, 0)]), &SolverConfig::default()).unwrap();
            assert_eq!((report.mp_count, report.mc_count), (1, 1));
            let map = &report.representatives[0].map;
            assert!(map.is_monic_centered(1e-12));
            assert!(report.representatives[0].oracle_distance < 1e-12);
        }
    }

    #[test]
    fn quadratic_centering() {
        let report = count_fiber(&exact(&[1, 1], &[(3, 1), (-3, -1)]), &SolverConfig::default()).unwrap();
        assert_eq!((report.mp_count, report.mc_count), (1, 1));
        assert!(report.representatives[0].map.is_monic_centered(1e-12));
    }

    #[test]
    fn roundtrip_small_profiles() {
        for parts in [vec![1, 2], vec![1, 1, 2], vec![1, 1, 1, 1]] {
            let p = MultiplicityProfile::new(parts).unwrap();
            let out = roundtrip(&p, 42, &SolverConfig::default()).unwrap();
            assert!(out.success, "{p}: {:?}", out.error);
        }
    }
}
