//! Finding, refining and classifying the projective zeros of a psi system.

mod homotopy;
mod univariate;

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSpectrum;
use crate::psi::{complex_det, PsiSystem};

use homotopy::{Chart, Tracker};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Companion matrix for a single equation, homotopy otherwise.
    #[default]
    Auto,
    Companion,
    Homotopy,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "companion" => Ok(Backend::Companion),
            "homotopy" => Ok(Backend::Homotopy),
            other => Err(Error::arg(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub seed: u64,
    /// Projective distance below which two endpoints are merged.
    pub tol_dedup: f64,
    /// Relative distance below which two fixed points count as coincident.
    pub tol_coincide: f64,
    pub backend: Backend,
    /// Worker threads for path tracking; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Fresh attempts (new chart and gamma) after a failed path.
    pub retries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0x5eed,
            tol_dedup: 1e-8,
            tol_coincide: 1e-7,
            backend: Backend::Auto,
            threads: None,
            retries: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// All of `zeta_1, ..., zeta_{l-1}, 0` are distinct.
    S,
    /// Some coincide.
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveSolution {
    /// Homogeneous coordinates with the largest-modulus entry equal to one.
    pub coords: Vec<Complex64>,
    /// `max_k |psi_k(coords)|`.
    pub residual: f64,
    pub jacobian_det: Complex64,
    /// Coordinate pinned to one for the Jacobian (0-based).
    pub jacobian_chart: usize,
    pub classification: Classification,
    /// Blocks of equal coordinates among `(zeta_1, ..., zeta_{l-1}, 0)`,
    /// 1-based, each block sorted, blocks ordered by first element.
    pub coincidence_pattern: Vec<Vec<usize>>,
    /// Number of raw endpoints merged into this point.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutput {
    pub solutions: Vec<ProjectiveSolution>,
    pub backend: Backend,
    pub paths_tracked: usize,
    pub paths_failed: usize,
    pub attempts: usize,
}

impl SolveOutput {
    pub fn s_points(&self) -> impl Iterator<Item = &ProjectiveSolution> {
        self.solutions.iter().filter(|s| s.classification == Classification::S)
    }

    pub fn s_count(&self) -> usize {
        self.s_points().count()
    }
}

/// Phase-aligned distance between the unit representatives of two projective points.
pub fn projective_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return if nu == nv { 0.0 } else { f64::INFINITY };
    }
    let inner: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    u.iter()
        .zip(v)
        .map(|(a, b)| (a / nu - phase * b / nv).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Scales so that the first coordinate of largest modulus equals one.
pub fn normalize_projective(x: &[Complex64]) -> Vec<Complex64> {
    let mut j = 0;
    for (i, z) in x.iter().enumerate() {
        if z.norm() > x[j].norm() * (1.0 + 1e-12) {
            j = i;
        }
    }
    let p = x[j];
    x.iter().map(|z| z / p).collect()
}

fn largest_index(x: &[Complex64]) -> usize {
    let mut j = 0;
    for (i, z) in x.iter().enumerate() {
        if z.norm() > x[j].norm() {
            j = i;
        }
    }
    j
}

fn max_modulus(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Newton in the chart where the largest coordinate is one. Stops as soon as
/// an update fails to reduce the residual.
pub fn refine(psi: &PsiSystem, x: &[Complex64]) -> (Vec<Complex64>, f64) {
    let mut x = normalize_projective(x);
    let mut res = max_modulus(&psi.evaluate(&x).expect("dimension checked"));
    if psi.is_empty() {
        return (x, 0.0);
    }
    for _ in 0..30 {
        let j = largest_index(&x);
        let (vals, grad) = psi.eval_with_gradient(&x).expect("dimension checked");
        let n = vals.len();
        let jac = DMatrix::from_fn(n, n, |r, c| grad[r][if c < j { c } else { c + 1 }]);
        let rhs = nalgebra::DVector::from_vec(vals);
        let Some(delta) = jac.lu().solve(&rhs) else { break };
        let mut cand = x.clone();
        for (c, d) in delta.iter().enumerate() {
            cand[if c < j { c } else { c + 1 }] -= d;
        }
        let cand = normalize_projective(&cand);
        let cand_res = max_modulus(&psi.evaluate(&cand).expect("dimension checked"));
        if !(cand_res < res) {
            break;
        }
        let small = delta.norm() <= 1e-15 * (1.0 + max_modulus(&x));
        x = cand;
        res = cand_res;
        if small || res == 0.0 {
            break;
        }
    }
    (x, res)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut k = i;
        while self.0[k] != r {
            let next = self.0[k];
            self.0[k] = r;
            k = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

/// Partition of `0..points.len()` by closeness, relative to the diameter.
pub(crate) fn cluster(points: &[Complex64], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut diam: f64 = 0.0;
    for a in points {
        for b in points {
            diam = diam.max((a - b).norm());
        }
    }
    let tol = rel_tol * diam;
    let mut uf = UnionFind::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() <= tol {
                uf.union(i, j);
            }
        }
    }
    uf.groups()
}

fn block_sum_vanishes(spectrum: &IndexSpectrum, block: &[usize]) -> bool {
    match spectrum.exact_values() {
        Some(m) => {
            let s = block.iter().fold(<crate::scalar::Gaussian as num_traits::Zero>::zero(), |acc, &i| acc + m[i].clone());
            num_traits::Zero::is_zero(&s)
        }
        None => {
            let m = spectrum.values();
            let s: Complex64 = block.iter().map(|&i| m[i]).sum();
            s.norm() <= 1e-9 * max_modulus(m).max(f64::MIN_POSITIVE)
        }
    }
}

/// Coincidence pattern of `(coords, 0)` and the resulting class. A
/// coincidence block whose indices do not sum to zero cannot come from a
/// true zero of psi and is reported as [`Error::NumericalAmbiguity`].
pub fn classify(coords: &[Complex64], spectrum: &IndexSpectrum, tol_coincide: f64) -> Result<(Classification, Vec<Vec<usize>>)> {
    let ell = spectrum.values().len();
    if coords.len() + 1 != ell {
        return Err(Error::arg(format!("expected {} coordinates, got {}", ell - 1, coords.len())));
    }
    let mut full = coords.to_vec();
    full.push(Complex64::new(0.0, 0.0));
    let groups = cluster(&full, tol_coincide);
    if groups.len() == ell {
        let pattern = (1..=ell).map(|i| vec![i]).collect();
        return Ok((Classification::S, pattern));
    }
    for block in groups.iter().filter(|b| b.len() > 1) {
        if !block_sum_vanishes(spectrum, block) {
            let shown: Vec<usize> = block.iter().map(|i| i + 1).collect();
            return Err(Error::NumericalAmbiguity(format!(
                "fixed points {shown:?} coincide but their indices do not sum to zero"
            )));
        }
    }
    let pattern = groups.into_iter().map(|b| b.into_iter().map(|i| i + 1).collect()).collect();
    Ok((Classification::B, pattern))
}

fn jacobian_at(psi: &PsiSystem, coords: &[Complex64]) -> (Complex64, usize) {
    let n = coords.len();
    if psi.is_empty() {
        return (Complex64::new(1.0, 0.0), n - 1);
    }
    let chart = if coords[n - 1].norm() >= 1e-6 { n - 1 } else { largest_index(coords) };
    let jac = psi.jacobian(coords, chart).expect("chart coordinate is nonzero");
    (complex_det(&jac), chart)
}

fn canonical_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let key = |z: &Complex64| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
    for (x, y) in a.iter().zip(b) {
        let o = key(x).cmp(&key(y));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Endpoints at a singular zero are only accurate to roughly the square
/// root of the working precision, so they merge at a looser distance.
const SINGULAR_DET: f64 = 1e-6;
const SINGULAR_MERGE: f64 = 1e-5;

fn finalize(psi: &PsiSystem, raw: Vec<Vec<Complex64>>, config: &SolverConfig) -> Result<(Vec<ProjectiveSolution>, usize)> {
    let accept = 1e-10 * (1.0 + psi.max_coeff_modulus());
    let mut rejected = 0;
    let mut refined = Vec::new();
    for x in raw {
        let (x, residual) = refine(psi, &x);
        if residual < accept && x.iter().all(|z| z.is_finite()) {
            let (det, chart) = jacobian_at(psi, &x);
            refined.push((x, residual, det, chart));
        } else {
            rejected += 1;
        }
    }
    let mut merged: Vec<(Vec<Complex64>, f64, Complex64, usize, usize)> = Vec::new();
    for (x, residual, det, chart) in refined {
        let singular = det.norm() < SINGULAR_DET;
        let hit = merged.iter_mut().find(|m| {
            let tol = if singular || m.2.norm() < SINGULAR_DET { SINGULAR_MERGE } else { config.tol_dedup };
            projective_distance(&m.0, &x) < tol
        });
        match hit {
            Some(m) => {
                m.4 += 1;
                if residual < m.1 {
                    *m = (x, residual, det, chart, m.4);
                }
            }
            None => merged.push((x, residual, det, chart, 1)),
        }
    }
    let mut out = Vec::with_capacity(merged.len());
    for (coords, residual, jacobian_det, jacobian_chart, multiplicity) in merged {
        let (classification, coincidence_pattern) = classify(&coords, psi.spectrum(), config.tol_coincide)?;
        out.push(ProjectiveSolution {
            coords,
            residual,
            jacobian_det,
            jacobian_chart,
            classification,
            coincidence_pattern,
            multiplicity,
        });
    }
    out.sort_by(|a, b| canonical_cmp(&a.coords, &b.coords));
    Ok((out, rejected))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

struct Attempt {
    solutions: Vec<ProjectiveSolution>,
    tracked: usize,
    failed: usize,
}

fn companion_attempt(psi: &PsiSystem, rng: &mut ChaCha8Rng, config: &SolverConfig) -> Result<Attempt> {
    let c = [random_unit(rng), random_unit(rng)];
    let norm2 = c[0].norm_sqr() + c[1].norm_sqr();
    let base = [c[0].conj() / norm2, c[1].conj() / norm2];
    let dir = [-c[1], c[0]];
    let coeffs = univariate::restrict_to_line(&psi.polys()[0], base, dir);
    let (roots, lost) = univariate::roots(&coeffs);
    let mut raw: Vec<Vec<Complex64>> = roots.iter().map(|s| vec![base[0] + s * dir[0], base[1] + s * dir[1]]).collect();
    if lost > 0 {
        raw.push(dir.to_vec());
    }
    let tracked = raw.len();
    let (solutions, rejected) = finalize(psi, raw, config)?;
    Ok(Attempt {
        solutions,
        tracked,
        failed: rejected,
    })
}

fn homotopy_attempt(psi: &PsiSystem, rng: &mut ChaCha8Rng, config: &SolverConfig) -> Result<Attempt> {
    let n = psi.nvars();
    let c: Vec<Complex64> = (0..n).map(|_| random_unit(rng)).collect();
    let fill = random_gaussian_vec(rng, n * (n - 1));
    let tracker = Tracker {
        psi,
        chart: Chart::new(&c, &fill),
        gamma: random_unit(rng),
        degrees: psi.degrees(),
    };
    let starts = tracker.start_points();
    let run = || -> Vec<_> { starts.par_iter().map(|s| tracker.track(s)).collect() };
    let ends = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::arg(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let tracked = ends.len();
    let mut failed = ends.iter().filter(|e| e.is_err()).count();
    let raw: Vec<Vec<Complex64>> = ends.into_iter().filter_map(|e| e.ok()).collect();
    let (solutions, rejected) = finalize(psi, raw, config)?;
    failed += rejected;
    // Two paths landing on the same nonsingular zero means one of them jumped.
    failed += solutions
        .iter()
        .filter(|s| s.jacobian_det.norm() >= SINGULAR_DET)
        .map(|s| s.multiplicity - 1)
        .sum::<usize>();
    Ok(Attempt {
        solutions,
        tracked,
        failed,
    })
}

/// All projective zeros of `psi`, refined, deduplicated and classified.
///
/// With a single equation the default backend takes companion-matrix roots on
/// a random line; otherwise it tracks a total-degree homotopy on a random
/// affine chart. A failed path triggers a fresh attempt with new random data,
/// up to `config.retries` times.
pub fn solve(psi: &PsiSystem, config: &SolverConfig) -> Result<SolveOutput> {
    if let Some(&index) = psi.zero_components().first() {
        return Err(Error::IdenticallyZeroPsi { index });
    }
    let ell = psi.profile().ell();
    if ell == 2 {
        let coords = vec![Complex64::new(1.0, 0.0)];
        let (classification, coincidence_pattern) = classify(&coords, psi.spectrum(), config.tol_coincide)?;
        return Ok(SolveOutput {
            solutions: vec![ProjectiveSolution {
                coords,
                residual: 0.0,
                jacobian_det: Complex64::new(1.0, 0.0),
                jacobian_chart: 0,
                classification,
                coincidence_pattern,
                multiplicity: 1,
            }],
            backend: config.backend,
            paths_tracked: 0,
            paths_failed: 0,
            attempts: 1,
        });
    }
    let backend = match (config.backend, ell) {
        (Backend::Auto, 3) | (Backend::Companion, 3) => Backend::Companion,
        (Backend::Companion, _) => {
            return Err(Error::arg("the companion backend needs exactly three fixed points"));
        }
        _ => Backend::Homotopy,
    };
    let mut last = None;
    for attempt in 0..=config.retries {
        let seed = config.seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = match backend {
            Backend::Companion => companion_attempt(psi, &mut rng, config)?,
            _ => homotopy_attempt(psi, &mut rng, config)?,
        };
        if run.failed == 0 {
            return Ok(SolveOutput {
                solutions: run.solutions,
                backend,
                paths_tracked: run.tracked,
                paths_failed: 0,
                attempts: attempt + 1,
            });
        }
        last = Some((run.failed, run.tracked));
    }
    let (failed, total) = last.expect("at least one attempt");
    Err(Error::PathFailure { failed, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiplicityProfile;
    use crate::psi::assemble_psi;
    use crate::scalar::gaussian_int;

    fn exact(parts: &[usize], m: &[(i64, i64)]) -> IndexSpectrum {
        IndexSpectrum::exact(
            MultiplicityProfile::new(parts.to_vec()).unwrap(),
            m.iter().map(|&(a, b)| gaussian_int(a, b)).collect(),
        )
        .unwrap()
    }

    fn run(spec: &IndexSpectrum, backend: Backend) -> SolveOutput {
        let psi = assemble_psi(spec.profile(), spec).unwrap();
        solve(&psi, &SolverConfig { backend, ..Default::default() }).unwrap()
    }

    #[test]
    fn quadratic_case_both_backends() {
        let spec = exact(&[1, 1, 2], &[(1, 0), (2, 0), (-3, 0)]);
        let root = (Complex64::new(0.0, 2f64.sqrt()), Complex64::new(1.0, 0.0));
        for backend in [Backend::Companion, Backend::Homotopy] {
            let out = run(&spec, backend);
            assert_eq!(out.solutions.len(), 2, "{backend:?}");
            for s in &out.solutions {
                assert_eq!(s.classification, Classification::S);
                let z = s.coords[0] / s.coords[1];
                let d = (z - root.0).norm().min((z + root.0).norm());
                assert!(d < 1e-10, "{backend:?}: {z}");
            }
        }
    }

    #[test]
    fn two_point_profile() {
        let out = run(&exact(&[2, 3], &[(1, 1), (-1, -1)]), Backend::Auto);
        assert_eq!(out.solutions.len(), 1);
        assert_eq!(out.s_count(), 1);
        assert_eq!(out.solutions[0].coincidence_pattern, vec![vec![1], vec![2]]);
    }

    #[test]
    fn five_simple_points() {
        let spec = exact(&[1, 1, 1, 1, 1], &[(1, 2), (3, -1), (-2, 5), (7, 1), (-9, -7)]);
        let out = run(&spec, Backend::Auto);
        assert_eq!(out.paths_tracked, 6);
        assert_eq!(out.s_count(), 6);
        for s in out.s_points() {
            assert!(s.jacobian_det.norm() > 1e-8);
        }
    }

    #[test]
    fn non_generic_spectrum_has_boundary_point() {
        let spec = exact(&[1, 1, 1, 1], &[(1, 0), (-1, 0), (2, 0), (-2, 0)]);
        let out = run(&spec, Backend::Auto);
        let b: Vec<_> = out.solutions.iter().filter(|s| s.classification == Classification::B).collect();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].coincidence_pattern, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(out.s_count(), 1);
        let s = out.s_points().next().unwrap();
        let expect = [Complex64::new(-1.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(projective_distance(&s.coords, &expect) < 1e-10);
    }

    #[test]
    fn coincidence_with_nonzero_sum_is_ambiguous() {
        let spec = exact(&[1, 1, 2], &[(1, 0), (2, 0), (-3, 0)]);
        let one = Complex64::new(1.0, 0.0);
        let err = classify(&[one, one], &spec, 1e-7).unwrap_err();
        assert!(matches!(err, Error::NumericalAmbiguity(_)));
    }

    #[test]
    fn identically_zero_component_is_rejected() {
        let spec = exact(&[1, 1, 1], &[(0, 0), (0, 0), (0, 0)]);
        let psi = assemble_psi(spec.profile(), &spec).unwrap();
        assert_eq!(solve(&psi, &SolverConfig::default()).unwrap_err(), Error::IdenticallyZeroPsi { index: 1 });
    }

    #[test]
    fn projective_distance_ignores_scale_and_phase() {
        let u = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3)];
        let k = Complex64::new(-2.0, 0.7);
        let v: Vec<_> = u.iter().map(|z| z * k).collect();
        assert!(projective_distance(&u, &v) < 1e-15);
        assert!(projective_distance(&u, &[u[1], u[0]]) > 0.1);
    }
}
