//! Univariate roots through the companion matrix, used for the
//! single-equation case.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::poly::Polynomial;

/// Relative size below which a leading coefficient counts as zero.
const LEADING_TOL: f64 = 1e-13;

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn linear_power(c0: Complex64, c1: Complex64, e: u32) -> Vec<Complex64> {
    (0..e).fold(vec![Complex64::new(1.0, 0.0)], |acc, _| mul(&acc, &[c0, c1]))
}

/// Coefficients in `s` (ascending) of `p(base + s * dir)` for a polynomial in
/// two variables.
pub(crate) fn restrict_to_line(p: &Polynomial<Complex64>, base: [Complex64; 2], dir: [Complex64; 2]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for (e, c) in p.terms() {
        let term = mul(&linear_power(base[0], dir[0], e[0]), &linear_power(base[1], dir[1], e[1]));
        if term.len() > out.len() {
            out.resize(term.len(), Complex64::new(0.0, 0.0));
        }
        for (o, t) in out.iter_mut().zip(term) {
            *o += c * t;
        }
    }
    out
}

fn horner(coeffs: &[Complex64], s: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dv = dv * s + v;
        v = v * s + c;
    }
    (v, dv)
}

/// Roots of `sum coeffs[k] s^k` after trimming negligible leading terms.
/// Returns the roots and the number of roots lost at infinity.
pub(crate) fn roots(coeffs: &[Complex64]) -> (Vec<Complex64>, usize) {
    let nominal = coeffs.len().saturating_sub(1);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return (Vec::new(), 0);
    }
    let mut deg = nominal;
    while deg > 0 && coeffs[deg].norm() <= LEADING_TOL * scale {
        deg -= 1;
    }
    let lost = nominal - deg;
    if deg == 0 {
        return (Vec::new(), lost);
    }
    let lead = coeffs[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig: Vec<Complex64> = match Schur::try_new(comp, 1e-15, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..deg).map(|i| t[(i, i)]).collect()
        }
        None => return (Vec::new(), lost),
    };
    let trimmed = &coeffs[..=deg];
    let polished = eig
        .into_iter()
        .map(|mut s| {
            for _ in 0..5 {
                let (v, dv) = horner(trimmed, s);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = v / dv;
                if !step.is_finite() {
                    break;
                }
                s -= step;
            }
            s
        })
        .collect();
    (polished, lost)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cubic_roots() {
        // (s - 1)(s + 2)(s - i)
        let p = mul(&mul(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0), c(1.0, 0.0)]), &[c(0.0, -1.0), c(1.0, 0.0)]);
        let (mut r, lost) = roots(&p);
        assert_eq!(lost, 0);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        let expect = [c(-2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn degree_drop_is_reported() {
        let (r, lost) = roots(&[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(lost, 1);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 2.0).norm() < 1e-14);
    }

    #[test]
    fn restriction_of_binary_form() {
        // x0^2 + 2 x1^2 along (0,1) + s (1,0) is s^2 + 2
        let p = Polynomial::from_terms(2, vec![(vec![2, 0], c(1.0, 0.0)), (vec![0, 2], c(2.0, 0.0))]);
        let q = restrict_to_line(&p, [c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(q, vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }
}
