//! Polynomial maps in fixed-point normal form `f(z) = z + rho * prod (z - zeta_i)^{d_i}`
//! and their holomorphic fixed-point indices.
//!
//! Two independent index computations live here: a truncated power-series
//! residue (exact for exact scalars) and a periodic trapezoid rule on a small
//! circle around the fixed point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Gaussian, Scalar};
use crate::series;

/// Relative distinctness threshold for floating fixed points, against the
/// configuration diameter.
pub const DEFAULT_DISTINCT_TOL: f64 = 1e-9;

/// Weakly increasing fixed-point multiplicities `(d_1, ..., d_l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiplicityProfile {
    parts: Vec<usize>,
}

impl MultiplicityProfile {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::arg("a multiplicity profile needs at least one part"));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::arg("multiplicities must be positive"));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::arg(format!(
                "multiplicities must be weakly increasing, got {parts:?}"
            )));
        }
        let profile = MultiplicityProfile { parts };
        if profile.degree() < 2 {
            return Err(Error::arg("the degree must be at least 2"));
        }
        Ok(profile)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of distinct fixed points.
    pub fn ell(&self) -> usize {
        self.parts.len()
    }

    /// Every profile of total degree `d`, ordered by length then lexicographically.
    pub fn all_of_degree(d: usize) -> Vec<MultiplicityProfile> {
        fn rec(remaining: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                out.push(cur.clone());
                return;
            }
            for p in min..=remaining {
                cur.push(p);
                rec(remaining - p, p, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        if d >= 2 {
            rec(d, 1, &mut Vec::new(), &mut all);
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all.into_iter()
            .map(|parts| MultiplicityProfile { parts })
            .collect()
    }
}

impl TryFrom<Vec<usize>> for MultiplicityProfile {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        MultiplicityProfile::new(parts)
    }
}

impl From<MultiplicityProfile> for Vec<usize> {
    fn from(p: MultiplicityProfile) -> Self {
        p.parts
    }
}

impl std::fmt::Display for MultiplicityProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `f(z) = z + rho * prod (z - zeta_i)^{d_i}` with its dense coefficients
/// (ascending powers, length `d + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialMap<T = Complex64> {
    profile: MultiplicityProfile,
    rho: T,
    zetas: Vec<T>,
    coeffs: Vec<T>,
}

pub fn build_map<T: Scalar>(
    profile: &MultiplicityProfile,
    zetas: Vec<T>,
    rho: T,
) -> Result<PolynomialMap<T>> {
    build_map_with_tolerance(profile, zetas, rho, DEFAULT_DISTINCT_TOL)
}

pub fn build_map_with_tolerance<T: Scalar>(
    profile: &MultiplicityProfile,
    zetas: Vec<T>,
    rho: T,
    distinct_tol: f64,
) -> Result<PolynomialMap<T>> {
    if zetas.len() != profile.ell() {
        return Err(Error::arg(format!(
            "profile {profile} needs {} fixed points, got {}",
            profile.ell(),
            zetas.len()
        )));
    }
    if rho.is_zero() {
        return Err(Error::arg("rho must be non-zero"));
    }
    check_distinct(&zetas, distinct_tol)?;
    let coeffs = expand(profile, &zetas, &rho);
    Ok(PolynomialMap {
        profile: profile.clone(),
        rho,
        zetas,
        coeffs,
    })
}

/// Rejects coincident points: exactly for exact scalars, otherwise relative
/// to the configuration diameter.
pub fn check_distinct<T: Scalar>(zetas: &[T], rel_tol: f64) -> Result<()> {
    let pts: Vec<Complex64> = zetas.iter().map(Scalar::to_c64).collect();
    let diameter = diameter(&pts);
    for i in 0..zetas.len() {
        for j in i + 1..zetas.len() {
            let coincide = if T::EXACT {
                zetas[i] == zetas[j]
            } else {
                (pts[i] - pts[j]).norm() <= rel_tol * diameter.max(f64::MIN_POSITIVE)
            };
            if coincide {
                return Err(Error::DegenerateConfiguration(format!(
                    "fixed points {i} and {j} coincide"
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn diameter(pts: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max((pts[i] - pts[j]).norm());
        }
    }
    best
}

fn expand<T: Scalar>(profile: &MultiplicityProfile, zetas: &[T], rho: &T) -> Vec<T> {
    let d = profile.degree();
    let mut prod = vec![T::one()];
    for (z, &di) in zetas.iter().zip(profile.parts()) {
        for _ in 0..di {
            // multiply by (x - z)
            let mut next = vec![T::zero(); prod.len() + 1];
            for (k, c) in prod.iter().enumerate() {
                next[k + 1] = next[k + 1].clone() + c.clone();
                next[k] = next[k].clone() - c.clone() * z.clone();
            }
            prod = next;
        }
    }
    debug_assert_eq!(prod.len(), d + 1);
    let mut coeffs: Vec<T> = prod.into_iter().map(|c| c * rho.clone()).collect();
    coeffs[1] = coeffs[1].clone() + T::one();
    coeffs
}

impl<T: Scalar> PolynomialMap<T> {
    pub fn profile(&self) -> &MultiplicityProfile {
        &self.profile
    }

    pub fn rho(&self) -> &T {
        &self.rho
    }

    pub fn zetas(&self) -> &[T] {
        &self.zetas
    }

    /// Coefficients of `f`, lowest degree first.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.profile.degree()
    }

    /// `f(z)` by Horner's rule on the dense coefficients.
    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    /// `z - f(z)` from the product form.
    pub fn displacement(&self, z: &T) -> T {
        let prod = self
            .zetas
            .iter()
            .zip(self.profile.parts())
            .fold(T::one(), |acc, (w, &e)| acc * (z.clone() - w.clone()).powu(e as u32));
        -(self.rho.clone() * prod)
    }

    /// Leading coefficient one and vanishing `z^{d-1}` coefficient, up to `tol`.
    pub fn is_monic_centered(&self, tol: f64) -> bool {
        let d = self.degree();
        (self.coeffs[d].clone() - T::one()).modulus() <= tol && self.coeffs[d - 1].modulus() <= tol
    }

    /// Largest deviation between the stored coefficients and a fresh re-expansion,
    /// relative to the coefficient scale.
    pub fn expansion_residual(&self) -> f64 {
        let fresh = expand(&self.profile, &self.zetas, &self.rho);
        let scale = self.coeffs.iter().map(Scalar::modulus).fold(1.0, f64::max);
        fresh
            .iter()
            .zip(&self.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(0.0, f64::max)
            / scale
    }

    fn check_point(&self, i: usize) -> Result<()> {
        if i >= self.profile.ell() {
            return Err(Error::arg(format!(
                "fixed point index {i} out of range for {} points",
                self.profile.ell()
            )));
        }
        Ok(())
    }
}

/// `f'(zeta_i)` (0-based `i`). Exactly one at multiple fixed points.
pub fn multiplier<T: Scalar>(map: &PolynomialMap<T>, i: usize) -> Result<T> {
    map.check_point(i)?;
    if map.profile.parts()[i] >= 2 {
        return Ok(T::one());
    }
    let zi = &map.zetas[i];
    let others = map
        .zetas
        .iter()
        .zip(map.profile.parts())
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold(T::one(), |acc, (_, (w, &e))| {
            acc * (zi.clone() - w.clone()).powu(e as u32)
        });
    Ok(T::one() + map.rho.clone() * others)
}

/// `iota_h(f, zeta_i)`: the residue of `(z - zeta_i)^h / (z - f(z))` at `zeta_i`.
///
/// With `t = z - zeta_i` the integrand is `-t^{h - d_i} / rho * prod_{j != i} (t + zeta_i - zeta_j)^{-d_j}`,
/// so the residue is `-1/rho` times the `t^{d_i - 1 - h}` coefficient of that product.
pub fn holomorphic_index<T: Scalar>(map: &PolynomialMap<T>, i: usize, h: usize) -> Result<T> {
    map.check_point(i)?;
    let di = map.profile.parts()[i];
    if h >= di {
        return Ok(T::zero());
    }
    let len = di - h;
    let zi = &map.zetas[i];
    let mut acc = vec![T::zero(); len];
    acc[0] = T::one();
    for (j, (w, &e)) in map.zetas.iter().zip(map.profile.parts()).enumerate() {
        if j == i {
            continue;
        }
        let factor = series::inverse_power(&(zi.clone() - w.clone()), e as u32, len);
        acc = series::mul_trunc(&acc, &factor, len);
    }
    Ok(-(acc[len - 1].clone() / map.rho.clone()))
}

/// `|sum_i iota(f, zeta_i)|`, which vanishes for every polynomial of degree >= 2.
pub fn index_sum_check<T: Scalar>(map: &PolynomialMap<T>) -> f64 {
    let total = (0..map.profile.ell()).fold(T::zero(), |acc, i| {
        acc + holomorphic_index(map, i, 0).expect("index in range")
    });
    total.modulus()
}

/// Default contour radius: a quarter of the distance to the nearest other fixed point.
pub fn default_contour_radius(map: &PolynomialMap<Complex64>, i: usize) -> f64 {
    nearest_neighbor(map, i).map_or(1.0, |d| 0.25 * d)
}

fn nearest_neighbor(map: &PolynomialMap<Complex64>, i: usize) -> Option<f64> {
    map.zetas
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, w)| (w - map.zetas[i]).norm())
        .min_by(f64::total_cmp)
}

/// Trapezoid approximation of `(1 / 2 pi i) * contour integral of dz / (z - f(z))`
/// over `|z - zeta_i| = radius`.
pub fn contour_index(
    map: &PolynomialMap<Complex64>,
    i: usize,
    radius: f64,
    n_quadrature: usize,
) -> Result<Complex64> {
    map.check_point(i)?;
    if n_quadrature < 64 {
        return Err(Error::arg("contour quadrature needs at least 64 nodes"));
    }
    if !(radius > 0.0) {
        return Err(Error::arg("contour radius must be positive"));
    }
    if let Some(near) = nearest_neighbor(map, i) {
        if radius >= 0.5 * near {
            return Err(Error::arg(format!(
                "contour radius {radius} must stay below half the distance {near} to the nearest fixed point"
            )));
        }
    }
    let center = map.zetas[i];
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n_quadrature {
        let theta = 2.0 * PI * k as f64 / n_quadrature as f64;
        let offset = Complex64::from_polar(radius, theta);
        // dz = i * offset * dtheta, and the 1/(2 pi i) prefactor leaves offset / n
        sum += offset / map.displacement(&(center + offset));
    }
    Ok(sum / n_quadrature as f64)
}

/// Labeled holomorphic indices together with the multiplicity profile.
///
/// Floating values are always present; exact Gaussian-rational values are kept
/// when the spectrum was supplied exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSpectrum {
    profile: MultiplicityProfile,
    values: Vec<Complex64>,
    exact: Option<Vec<Gaussian>>,
}

/// Relative tolerance for the zero-sum test on floating spectra.
pub const SPECTRUM_SUM_TOL: f64 = 1e-8;

impl IndexSpectrum {
    pub fn exact(profile: MultiplicityProfile, values: Vec<Gaussian>) -> Result<Self> {
        if values.len() != profile.ell() {
            return Err(Error::arg(format!(
                "profile {profile} needs {} indices, got {}",
                profile.ell(),
                values.len()
            )));
        }
        let sum = values.iter().cloned().fold(<Gaussian as num_traits::Zero>::zero(), |a, b| a + b);
        if !num_traits::Zero::is_zero(&sum) {
            return Err(Error::arg(format!(
                "indices must sum to zero, got sum {}",
                sum.to_c64()
            )));
        }
        Ok(IndexSpectrum {
            profile,
            values: values.iter().map(Scalar::to_c64).collect(),
            exact: Some(values),
        })
    }

    pub fn approximate(profile: MultiplicityProfile, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != profile.ell() {
            return Err(Error::arg(format!(
                "profile {profile} needs {} indices, got {}",
                profile.ell(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("indices must be finite"));
        }
        let sum: Complex64 = values.iter().sum();
        let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if sum.norm() > SPECTRUM_SUM_TOL * scale {
            return Err(Error::arg(format!("indices must sum to zero, got sum {sum}")));
        }
        Ok(IndexSpectrum {
            profile,
            values,
            exact: None,
        })
    }

    pub fn profile(&self) -> &MultiplicityProfile {
        &self.profile
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn exact_values(&self) -> Option<&[Gaussian]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The unordered collection `{(d_i, m_i)}`, sorted for display and comparison.
    pub fn unordered(&self) -> Vec<(usize, Complex64)> {
        let mut pairs: Vec<(usize, Complex64)> = self
            .profile
            .parts()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .collect();
        pairs.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.re.total_cmp(&b.1.re))
                .then(a.1.im.total_cmp(&b.1.im))
        });
        pairs
    }

    pub fn is_zero_vector(&self) -> bool {
        match &self.exact {
            Some(ex) => ex.iter().all(num_traits::Zero::is_zero),
            None => self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)),
        }
    }

    /// Largest deviation between two unordered collections, after optimally
    /// matching pairs with equal multiplicity. `None` when the multiplicity
    /// multisets differ.
    pub fn unordered_distance(&self, other: &[(usize, Complex64)]) -> Option<f64> {
        unordered_distance(&self.unordered(), other)
    }
}

/// Bottleneck distance between two collections of `(multiplicity, index)` pairs.
pub fn unordered_distance(a: &[(usize, Complex64)], b: &[(usize, Complex64)]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut ma: Vec<usize> = a.iter().map(|p| p.0).collect();
    let mut mb: Vec<usize> = b.iter().map(|p| p.0).collect();
    ma.sort_unstable();
    mb.sort_unstable();
    if ma != mb {
        return None;
    }
    // Greedy matching on sorted candidate pairs; the collections are tiny.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            if pa.0 == pb.0 {
                candidates.push(((pa.1 - pb.1).norm(), i, j));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = 0.0f64;
    let mut matched = 0;
    for (dist, i, j) in candidates {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(dist);
        matched += 1;
    }
    (matched == a.len()).then_some(worst)
}

/// Labeled indices of a map; the assignment that defines the index map on fibers.
pub fn spectrum_of(map: &PolynomialMap<Complex64>) -> Result<IndexSpectrum> {
    let values = (0..map.profile.ell())
        .map(|i| holomorphic_index(map, i, 0))
        .collect::<Result<Vec<_>>>()?;
    IndexSpectrum::approximate(map.profile.clone(), values)
}
