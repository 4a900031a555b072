//! Truncated power series in one variable `t`, stored as coefficient vectors
//! `[c_0, c_1, ..., c_{n-1}]`.

use crate::scalar::Scalar;

/// Product of two series truncated to `len` coefficients.
pub fn mul_trunc<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Expansion of `(t + c)^(-e)` about `t = 0` to `len` coefficients.
///
/// Uses `(t + c)^(-e) = c^(-e) * sum_k binom(-e, k) (t / c)^k`, generated by
/// the ratio `coef_k / coef_{k-1} = -(e + k - 1) / (k c)`.
pub fn inverse_power<T: Scalar>(c: &T, e: u32, len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(T::one() / c.powu(e));
    for k in 1..len {
        let ratio = T::from_ratio(-(i64::from(e) + k as i64 - 1), k as i64) / c.clone();
        let next = out[k - 1].clone() * ratio;
        out.push(next);
    }
    out
}

/// Expansion of `(t + c)^e` (a polynomial) truncated to `len` coefficients.
pub fn power<T: Scalar>(c: &T, e: u32, len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    if len > 0 {
        out[0] = T::one();
    }
    for _ in 0..e {
        out = mul_trunc(&out, &[c.clone(), T::one()], len);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    #[test]
    fn geometric_series() {
        // 1/(t - 1) = -(1 + t + t^2 + ...)
        let s = inverse_power(&q(-1, 1), 1, 4);
        assert_eq!(s, vec![q(-1, 1); 4]);
    }

    #[test]
    fn inverse_times_power_is_one() {
        let c = q(3, 2);
        let inv = inverse_power(&c, 3, 6);
        let pow = power(&c, 3, 6);
        let prod = mul_trunc(&inv, &pow, 6);
        let mut one = vec![q(0, 1); 6];
        one[0] = q(1, 1);
        assert_eq!(prod, one);
    }

    #[test]
    fn float_inverse_square() {
        // (t + 2)^(-2) = 1/4 - t/4 + 3t^2/16 - ...
        let s = inverse_power(&Complex64::new(2.0, 0.0), 2, 3);
        assert!((s[0].re - 0.25).abs() < 1e-15);
        assert!((s[1].re + 0.25).abs() < 1e-15);
        assert!((s[2].re - 3.0 / 16.0).abs() < 1e-15);
    }
}
