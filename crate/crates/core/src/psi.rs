//! The eliminated homogeneous system `psi_1, ..., psi_{l-2}` in
//! `zeta_1, ..., zeta_{l-1}` (with `zeta_l = 0`), and recovery of `rho` and
//! the higher residues `m_{i,k}` at a solution.
//!
//! With `n = d - 2` the system is the first `l - 2` rows of
//!
//! ```text
//! N^{d_l - 1} * prod_{i<l} (-zeta_i I + N)^{d_i - 1} * X^{-1} * V * (m_1, ..., m_{l-1})^T
//! ```
//!
//! where `N` is the `n x n` shift, `X = diag(1..n)` and `V` has rows
//! `(zeta_1^r, ..., zeta_{l-1}^r)` for `r = 1..n`. `psi_k` is homogeneous of
//! degree `d - l + k`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{check_distinct, IndexSpectrum, MultiplicityProfile, DEFAULT_DISTINCT_TOL};
use crate::matrices::binomial;
use crate::poly::{CompiledPoly, Polynomial};
use crate::scalar::{Gaussian, Scalar};

/// Relative residual above which the stacked residue system counts as inconsistent.
pub const RECOVERY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PsiSystem {
    spectrum: IndexSpectrum,
    exact: Option<Vec<Polynomial<Gaussian>>>,
    polys: Vec<Polynomial<Complex64>>,
    compiled: Vec<CompiledPoly>,
}

/// Builds `psi` over any scalar backend from the labeled indices `m`.
pub fn assemble_polys<T: Scalar>(profile: &MultiplicityProfile, m: &[T]) -> Result<Vec<Polynomial<T>>> {
    let ell = profile.ell();
    if ell < 2 {
        return Err(Error::arg("the psi system needs at least two fixed points"));
    }
    if m.len() != ell {
        return Err(Error::arg(format!("expected {ell} indices, got {}", m.len())));
    }
    if ell == 2 {
        return Ok(Vec::new());
    }
    let d = profile.degree();
    let n = d - 2;
    let nvars = ell - 1;
    let parts = profile.parts();

    // X^{-1} V m
    let mut v: Vec<Polynomial<T>> = (1..=n)
        .map(|r| {
            let inv_r = T::from_ratio(1, r as i64);
            (0..nvars).fold(Polynomial::zero(nvars), |acc, i| {
                acc.add(&Polynomial::monomial(nvars, i, r as u32, m[i].clone() * inv_r.clone()))
            })
        })
        .collect();

    for (i, &di) in parts.iter().enumerate().take(nvars) {
        for _ in 1..di {
            // (-zeta_i I + N) v
            v = (0..n)
                .map(|r| {
                    let scaled = v[r].mul_var(i).scale(&-T::one());
                    match v.get(r + 1) {
                        Some(next) => scaled.add(next),
                        None => scaled,
                    }
                })
                .collect();
        }
    }
    let shift = parts[ell - 1] - 1;
    Ok((0..ell - 2)
        .map(|k| v.get(k + shift).cloned().unwrap_or_else(|| Polynomial::zero(nvars)))
        .collect())
}

pub fn assemble_psi(profile: &MultiplicityProfile, spectrum: &IndexSpectrum) -> Result<PsiSystem> {
    if spectrum.profile() != profile {
        return Err(Error::arg("spectrum belongs to a different profile"));
    }
    let (exact, polys) = match spectrum.exact_values() {
        Some(m) => {
            let exact = assemble_polys(profile, m)?;
            let polys = exact.iter().map(Polynomial::to_c64).collect();
            (Some(exact), polys)
        }
        None => (None, assemble_polys(profile, spectrum.values())?),
    };
    let compiled = polys.iter().map(CompiledPoly::new).collect();
    Ok(PsiSystem {
        spectrum: spectrum.clone(),
        exact,
        polys,
        compiled,
    })
}

impl PsiSystem {
    pub fn profile(&self) -> &MultiplicityProfile {
        self.spectrum.profile()
    }

    pub fn spectrum(&self) -> &IndexSpectrum {
        &self.spectrum
    }

    /// Number of homogeneous coordinates, `l - 1`.
    pub fn nvars(&self) -> usize {
        self.profile().ell() - 1
    }

    /// Number of equations, `l - 2`.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Polynomial<Complex64>] {
        &self.polys
    }

    pub fn exact_polys(&self) -> Option<&[Polynomial<Gaussian>]> {
        self.exact.as_deref()
    }

    /// Nominal degrees `d - l + k`, `k = 1..l-2`.
    pub fn degrees(&self) -> Vec<u32> {
        let d = self.profile().degree();
        let ell = self.profile().ell();
        (1..=self.len()).map(|k| (d - ell + k) as u32).collect()
    }

    /// Product of the degrees: `(d-2)! / (d-l)!`.
    pub fn bezout_number(&self) -> u64 {
        self.degrees().iter().map(|&e| u64::from(e)).product()
    }

    /// 1-based indices `k` of the components that vanish identically.
    pub fn zero_components(&self) -> Vec<usize> {
        let zero = |k: usize| match &self.exact {
            Some(ex) => ex[k].is_zero(),
            None => {
                let scale = self.spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
                self.polys[k].max_coeff_modulus() <= 1e-14 * scale.max(f64::MIN_POSITIVE)
            }
        };
        (0..self.len()).filter(|&k| zero(k)).map(|k| k + 1).collect()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.polys.iter().map(Polynomial::max_coeff_modulus).fold(0.0, f64::max)
    }

    fn check_point(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.nvars() {
            return Err(Error::arg(format!(
                "psi takes {} coordinates, got {}",
                self.nvars(),
                point.len()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(point)?;
        Ok(self.compiled.iter().map(|p| p.eval(point)).collect())
    }

    /// Values and the full `(l-2) x (l-1)` matrix of partial derivatives.
    pub fn eval_with_gradient(&self, point: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>)> {
        self.check_point(point)?;
        Ok(self.compiled.iter().map(|p| p.eval_grad(point)).unzip())
    }

    /// Partial derivatives with respect to every coordinate except `chart`,
    /// after rescaling the point so that coordinate `chart` equals one.
    pub fn jacobian(&self, point: &[Complex64], chart: usize) -> Result<Vec<Vec<Complex64>>> {
        if self.profile().ell() < 3 {
            return Err(Error::arg("the Jacobian needs at least three fixed points"));
        }
        self.check_point(point)?;
        if chart >= self.nvars() {
            return Err(Error::arg(format!("chart index {chart} out of range")));
        }
        let pin = point[chart];
        if pin.norm() == 0.0 {
            return Err(Error::arg("the chart coordinate of the point is zero"));
        }
        let affine: Vec<Complex64> = point.iter().map(|z| z / pin).collect();
        let (_, grad) = self.eval_with_gradient(&affine)?;
        Ok(grad
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .filter(|&(j, _)| j != chart)
                    .map(|(_, v)| v)
                    .collect()
            })
            .collect())
    }

    /// Plain-text dump: a `# psi_k` header per component, then one line per
    /// monomial as `exponents<TAB>re<TAB>im` with comma-separated exponents.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, p) in self.polys.iter().enumerate() {
            let _ = writeln!(out, "# psi_{}", k + 1);
            for (e, c) in p.terms() {
                let exps: Vec<String> = e.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{}\t{:.16e}\t{:.16e}", exps.join(","), c.re, c.im);
            }
        }
        out
    }
}

/// Determinant of a small complex matrix by partial-pivot elimination.
pub fn complex_det(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.lu().determinant()
}

/// Higher residues `(m_i, m_{i,1}, ..., m_{i,d_i-1})` per fixed point and the
/// leading coefficient `rho` they determine.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryResidueVector {
    pub residues: Vec<Vec<Complex64>>,
    pub rho: Complex64,
    /// Relative residual of the least-squares solve.
    pub residual: f64,
}

/// Solves the stacked residue system
/// `sum_i A_d^{d_i}(zeta_i) (m_i, m_{i,1}, ..., m_{i,d_i-1})^T = (0, ..., 0, -1/rho)^T`
/// for the unknown `m_{i,k}` and `1/rho`.
pub fn recover_aux(
    profile: &MultiplicityProfile,
    spectrum: &IndexSpectrum,
    zetas: &[Complex64],
) -> Result<AuxiliaryResidueVector> {
    let ell = profile.ell();
    let d = profile.degree();
    if zetas.len() != ell || spectrum.values().len() != ell {
        return Err(Error::arg(format!("expected {ell} fixed points and indices")));
    }
    if zetas.iter().any(|z| !z.is_finite()) {
        return Err(Error::arg("fixed points must be finite"));
    }
    check_distinct(zetas, DEFAULT_DISTINCT_TOL)?;
    let m = spectrum.values();

    // Affine normalization zeta = a * eta + c keeps the powers bounded. The
    // indices are invariant, iota_k scales by a^k, and rho by a^{1-d}.
    let center: Complex64 = zetas.iter().sum::<Complex64>() / ell as f64;
    let scale = zetas.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let eta: Vec<Complex64> = zetas.iter().map(|z| (z - center) / scale).collect();

    let unknowns = d - ell + 1;
    let mut mat = DMatrix::<Complex64>::zeros(d, unknowns);
    let mut rhs = DVector::<Complex64>::zeros(d);
    let mut col = 0;
    for (i, &di) in profile.parts().iter().enumerate() {
        let mut pw = vec![Complex64::new(1.0, 0.0); d];
        for r in 1..d {
            pw[r] = pw[r - 1] * eta[i];
        }
        for r in 0..d {
            rhs[r] -= m[i] * pw[r];
        }
        for j in 1..di {
            for r in j..d {
                mat[(r, col)] = binomial(r, j) as f64 * pw[r - j];
            }
            col += 1;
        }
    }
    mat[(d - 1, col)] = Complex64::new(1.0, 0.0);

    let qr = mat.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qtb = q.adjoint() * &rhs;
    let x = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::DegenerateConfiguration("rank-deficient residue system".into()))?;
    let resid = (&mat * &x - &rhs).norm();
    let denom = mat.norm() * x.norm() + rhs.norm();
    let residual = if denom > 0.0 { resid / denom } else { 0.0 };
    if residual > RECOVERY_TOL {
        return Err(Error::Inconsistent {
            residual,
            tolerance: RECOVERY_TOL,
        });
    }
    let inv_rho = x[unknowns - 1];
    if inv_rho.norm() <= f64::EPSILON * x.norm() {
        return Err(Error::DegenerateConfiguration("recovered 1/rho vanishes".into()));
    }
    let rho = (1.0 / inv_rho) * Complex64::new(scale, 0.0).powi(1 - d as i32);

    let mut residues = Vec::with_capacity(ell);
    let mut col = 0;
    for (i, &di) in profile.parts().iter().enumerate() {
        let mut v = vec![m[i]];
        for k in 1..di {
            v.push(x[col] * scale.powi(k as i32));
            col += 1;
        }
        residues.push(v);
    }

    // Nonvanishing of the top residue at every fixed point.
    let mscale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (i, (v, &di)) in residues.iter().zip(profile.parts()).enumerate() {
        let ok = if di == 1 {
            match spectrum.exact_values() {
                Some(ex) => !num_traits::Zero::is_zero(&ex[i]),
                None => v[0].norm() > 0.0,
            }
        } else {
            let top = v[di - 1] / scale.powi(di as i32 - 1);
            top.norm() > 1e-10 * mscale.max(f64::MIN_POSITIVE)
        };
        if !ok {
            return Err(Error::VerificationFailure(format!(
                "top residue at fixed point {i} vanishes"
            )));
        }
    }
    Ok(AuxiliaryResidueVector {
        residues,
        rho,
        residual,
    })
}
