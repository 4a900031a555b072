//! Binomial-Vandermonde blocks and the small structured matrices around them.
//!
//! `A_{n,k}^{b,h}(alpha)` is the `(n-k) x (b-h)` matrix whose `(i, j)` entry
//! (1-based) is `C(i+k-1, j+h-1) * alpha^((i+k)-(j+h))`, i.e. the lower-left
//! block of the Pascal-type matrix `A_n^b(alpha)` with the first `k` rows and
//! first `h` columns removed. Horizontally concatenating such blocks for
//! distinct points gives confluent Vandermonde matrices whose determinants
//! factor completely; the checks in this module confirm those factorizations
//! in exact arithmetic.

use std::ops::{Index, IndexMut};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PASCAL_ROWS: usize = 64;

/// `C(n, k)` from a cached Pascal triangle; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    if k > n {
        return 0;
    }
    assert!(n < PASCAL_ROWS, "binomial table holds rows below {PASCAL_ROWS}");
    let table = TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(PASCAL_ROWS);
        for n in 0..PASCAL_ROWS {
            let mut row = vec![1u64; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    });
    table[n][k]
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Dense row-major matrix over any [`Scalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Builds a matrix from a 0-based entry function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Matrix<T> {
        assert_eq!(self.rows, self.cols);
        (0..e).fold(Matrix::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// Concatenates blocks with equal row counts side by side.
    pub fn hcat(blocks: &[Matrix<T>]) -> Matrix<T> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        assert!(blocks.iter().all(|b| b.rows == rows), "row mismatch in hcat");
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)].clone();
                }
            }
            offset += b.cols;
        }
        out
    }

    /// Determinant by Gaussian elimination; pivots on the largest modulus.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let pivot = (c..n)
                .filter(|&r| !a[(r, c)].is_zero())
                .max_by(|&x, &y| a[(x, c)].modulus().total_cmp(&a[(y, c)].modulus()));
            let Some(p) = pivot else {
                return T::zero();
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pv = a[(c, c)].clone();
            det = det * pv.clone();
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let factor = a[(r, c)].clone() / pv.clone();
                for j in c..n {
                    let delta = factor.clone() * a[(c, j)].clone();
                    a[(r, j)] = a[(r, j)].clone() - delta;
                }
            }
        }
        det
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// The block `A_{n,k}^{b,h}(alpha)` together with its defining parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialBlock<T> {
    pub n: usize,
    pub k: usize,
    pub b: usize,
    pub h: usize,
    pub alpha: T,
    pub entries: Matrix<T>,
}

pub fn binomial_block<T: Scalar>(
    n: usize,
    k: usize,
    b: usize,
    h: usize,
    alpha: T,
) -> Result<BinomialBlock<T>> {
    if n <= k || b <= h {
        return Err(Error::arg(format!(
            "binomial block needs n > k and b > h, got n={n} k={k} b={b} h={h}"
        )));
    }
    let entries = block_entries(n, k, b, h, &alpha);
    Ok(BinomialBlock {
        n,
        k,
        b,
        h,
        alpha,
        entries,
    })
}

/// Entries of `A_{n,k}^{b,h}(alpha)`; an empty matrix when `n <= k` or `b <= h`.
pub fn block_entries<T: Scalar>(n: usize, k: usize, b: usize, h: usize, alpha: &T) -> Matrix<T> {
    let rows = n.saturating_sub(k);
    let cols = b.saturating_sub(h);
    // powers[e] = alpha^e, with 0^0 = 1
    let max_pow = n.saturating_sub(1);
    let mut powers = Vec::with_capacity(max_pow + 1);
    powers.push(T::one());
    for e in 1..=max_pow {
        powers.push(powers[e - 1].clone() * alpha.clone());
    }
    Matrix::from_fn(rows, cols, |i, j| {
        let top = i + k;
        let bottom = j + h;
        if top < bottom {
            T::zero()
        } else {
            T::from_i64(binomial(top, bottom) as i64) * powers[top - bottom].clone()
        }
    })
}

/// `A_n^b(alpha)`.
pub fn pascal_block<T: Scalar>(n: usize, b: usize, alpha: &T) -> Matrix<T> {
    block_entries(n, 0, b, 0, alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompanionKind {
    /// `diag(1, 2, ..., b)`
    X,
    I,
    /// Ones on the superdiagonal.
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompanionDiagNil {
    pub b: usize,
    pub kind: CompanionKind,
}

impl CompanionDiagNil {
    pub fn new(b: usize, kind: CompanionKind) -> Result<Self> {
        if b == 0 {
            return Err(Error::arg("companion matrices need b >= 1"));
        }
        Ok(CompanionDiagNil { b, kind })
    }

    pub fn matrix<T: Scalar>(&self) -> Matrix<T> {
        match self.kind {
            CompanionKind::X => diag_x(self.b),
            CompanionKind::I => Matrix::identity(self.b),
            CompanionKind::N => nilpotent(self.b),
        }
    }

    /// Inverse, when it exists (`N` is never invertible).
    pub fn inverse<T: Scalar>(&self) -> Option<Matrix<T>> {
        match self.kind {
            CompanionKind::X => Some(diag_x_inverse(self.b)),
            CompanionKind::I => Some(Matrix::identity(self.b)),
            CompanionKind::N => None,
        }
    }
}

pub fn diag_x<T: Scalar>(b: usize) -> Matrix<T> {
    Matrix::from_fn(b, b, |i, j| if i == j { T::from_i64(i as i64 + 1) } else { T::zero() })
}

pub fn diag_x_inverse<T: Scalar>(b: usize) -> Matrix<T> {
    Matrix::from_fn(b, b, |i, j| {
        if i == j {
            T::from_ratio(1, i as i64 + 1)
        } else {
            T::zero()
        }
    })
}

pub fn nilpotent<T: Scalar>(b: usize) -> Matrix<T> {
    Matrix::from_fn(b, b, |i, j| if j == i + 1 { T::one() } else { T::zero() })
}

fn check_identity_args<T: Scalar>(r_list: &[usize], alphas: &[T]) -> Result<()> {
    if r_list.is_empty() || r_list.len() != alphas.len() {
        return Err(Error::arg(format!(
            "need equally many block sizes and points, got {} and {}",
            r_list.len(),
            alphas.len()
        )));
    }
    if r_list.iter().any(|&r| r == 0) {
        return Err(Error::arg("block sizes must be positive"));
    }
    for v in 0..alphas.len() {
        for u in v + 1..alphas.len() {
            if alphas[u] == alphas[v] {
                return Err(Error::arg(format!("points {v} and {u} coincide")));
            }
        }
    }
    Ok(())
}

fn vandermonde_product<T: Scalar>(r_list: &[usize], alphas: &[T]) -> T {
    let mut prod = T::one();
    for v in 0..alphas.len() {
        for u in v + 1..alphas.len() {
            let diff = alphas[u].clone() - alphas[v].clone();
            prod = prod * diff.powu((r_list[v] * r_list[u]) as u32);
        }
    }
    prod
}

/// Both sides of `det(A_r^{r_1}(a_1), ..., A_r^{r_l}(a_l)) = prod_{v<u} (a_u - a_v)^{r_v r_u}`.
pub fn block_determinant_identity<T: Scalar>(r_list: &[usize], alphas: &[T]) -> Result<(T, T)> {
    check_identity_args(r_list, alphas)?;
    let r: usize = r_list.iter().sum();
    let blocks: Vec<_> = r_list
        .iter()
        .zip(alphas)
        .map(|(&rv, a)| pascal_block(r, rv, a))
        .collect();
    let lhs = Matrix::hcat(&blocks).det();
    Ok((lhs, vandermonde_product(r_list, alphas)))
}

/// Shifted variant with blocks `A_{r+1,1}^{r_v+1,1}(a_v)`; the right side gains
/// the multinomial factor `r! / (r_1! ... r_l!)`.
pub fn shifted_determinant_identity<T: Scalar>(r_list: &[usize], alphas: &[T]) -> Result<(T, T)> {
    check_identity_args(r_list, alphas)?;
    let r: usize = r_list.iter().sum();
    let blocks: Vec<_> = r_list
        .iter()
        .zip(alphas)
        .map(|(&rv, a)| block_entries(r + 1, 1, rv + 1, 1, a))
        .collect();
    let lhs = Matrix::hcat(&blocks).det();
    let multinomial = r_list
        .iter()
        .fold(factorial(r), |acc, &rv| acc / factorial(rv));
    let multinomial = T::from_i64(i64::try_from(multinomial).expect("multinomial fits in i64"));
    Ok((lhs, multinomial * vandermonde_product(r_list, alphas)))
}

/// `A_{n+1,1}^{b+1,1}(alpha) == X_n A_n^b(alpha) X_b^{-1}`, compared exactly.
pub fn similarity_identity<T: Scalar>(n: usize, b: usize, alpha: &T) -> Result<bool> {
    if n == 0 || b == 0 {
        return Err(Error::arg("similarity identity needs n, b >= 1"));
    }
    let lhs = block_entries(n + 1, 1, b + 1, 1, alpha);
    let rhs = diag_x::<T>(n)
        .mul(&pascal_block(n, b, alpha))
        .mul(&diag_x_inverse(b));
    Ok(lhs == rhs)
}

/// `(-alpha I_n + N_n)^e`.
pub fn shifted_nilpotent_power<T: Scalar>(n: usize, alpha: &T, e: u32) -> Matrix<T> {
    let base = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            -alpha.clone()
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    });
    base.pow(e)
}

/// Products `A_{l'-2}^{d-2}(0) * prod_u (-a_u I + N)^{d'_u} * A_{d-2}^{d'_v}(a_v)`
/// for every `v`. Each one is the zero matrix when the columns of the
/// `A_{d-2}^{d'_v}(a_v)` blocks lie in the kernel of the left factor.
pub fn kernel_annihilation_products<T: Scalar>(
    ell_prime: usize,
    d_primes: &[usize],
    alphas: &[T],
) -> Result<Vec<Matrix<T>>> {
    if ell_prime < 2 || d_primes.is_empty() || d_primes.len() != alphas.len() {
        return Err(Error::arg(
            "kernel check needs l' >= 2 and one multiplicity per point",
        ));
    }
    let d = d_primes.iter().sum::<usize>() + ell_prime;
    let n = d - 2;
    let mut left = block_entries(ell_prime - 2, 0, n, 0, &T::zero());
    for (dp, a) in d_primes.iter().zip(alphas) {
        left = left.mul(&shifted_nilpotent_power(n, a, *dp as u32));
    }
    Ok(d_primes
        .iter()
        .zip(alphas)
        .map(|(&dp, a)| left.mul(&pascal_block(n, dp, a)))
        .collect())
}

pub fn kernel_annihilation_check<T: Scalar>(
    ell_prime: usize,
    d_primes: &[usize],
    alphas: &[T],
) -> Result<bool> {
    Ok(kernel_annihilation_products(ell_prime, d_primes, alphas)?
        .iter()
        .all(Matrix::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gaussian;
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    #[test]
    fn pascal_rows() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }

    #[test]
    fn block_at_one_is_pascal() {
        let blk = binomial_block(4, 0, 2, 0, q(1, 1)).unwrap();
        assert_eq!(blk.entries.column(0), vec![q(1, 1); 4]);
        assert_eq!(blk.entries.column(1), vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1)]);
    }

    #[test]
    fn block_at_zero_is_truncated_identity() {
        for (n, b) in [(3, 3), (5, 2), (2, 4)] {
            let blk = binomial_block(n, 0, b, 0, q(0, 1)).unwrap();
            let expected = Matrix::from_fn(n, b, |i, j| q((i == j) as i64, 1));
            assert_eq!(blk.entries, expected);
        }
    }

    #[test]
    fn shifted_block_small_case() {
        // entries C(i, j) 2^(i-j) for i, j in {1, 2}
        let blk = binomial_block(3, 1, 3, 1, q(2, 1)).unwrap();
        let expected = Matrix::from_rows(vec![vec![q(1, 1), q(0, 1)], vec![q(4, 1), q(1, 1)]]);
        assert_eq!(blk.entries, expected);
        assert!(similarity_identity(2, 2, &q(2, 1)).unwrap());
    }

    #[test]
    fn block_rejects_bad_dimensions() {
        assert!(binomial_block(2, 2, 3, 0, q(1, 1)).is_err());
        assert!(binomial_block(3, 0, 1, 1, q(1, 1)).is_err());
    }

    #[test]
    fn block_vanishes_above_diagonal_band() {
        let blk = binomial_block(6, 1, 5, 2, q(3, 7)).unwrap();
        for i in 0..blk.entries.rows() {
            for j in 0..blk.entries.cols() {
                if i + 1 < j + 2 {
                    assert!(blk.entries[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn companion_matrices() {
        let x = CompanionDiagNil::new(4, CompanionKind::X).unwrap();
        let prod = x.matrix::<BigRational>().mul(&x.inverse().unwrap());
        assert_eq!(prod, Matrix::identity(4));
        let n = CompanionDiagNil::new(4, CompanionKind::N).unwrap();
        assert!(n.matrix::<BigRational>().pow(4).is_zero());
        assert!(!n.matrix::<BigRational>().pow(3).is_zero());
        assert!(n.inverse::<BigRational>().is_none());
        assert!(CompanionDiagNil::new(0, CompanionKind::I).is_err());
    }

    #[test]
    fn determinant_identity_by_hand() {
        let (lhs, rhs) = block_determinant_identity(&[1, 1], &[q(0, 1), q(1, 1)]).unwrap();
        assert_eq!((lhs.clone(), rhs), (q(1, 1), q(1, 1)));
        let (lhs, rhs) = block_determinant_identity(&[1, 2], &[q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(lhs, q(1, 1));
        assert_eq!(rhs, q(1, 1));
    }

    #[test]
    fn shifted_identity_by_hand() {
        let (lhs, rhs) = shifted_determinant_identity(&[1, 1], &[q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(lhs, q(2, 1));
        assert_eq!(rhs, q(2, 1));
        let (lhs, rhs) =
            shifted_determinant_identity(&[1, 1, 1], &[q(0, 1), q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(lhs, q(12, 1));
        assert_eq!(rhs, q(12, 1));
    }

    #[test]
    fn repeated_points_rejected() {
        assert!(block_determinant_identity(&[1, 2], &[q(1, 3), q(1, 3)]).is_err());
        assert!(shifted_determinant_identity(&[1], &[q(1, 3), q(2, 3)]).is_err());
    }

    #[test]
    fn gaussian_points() {
        let alphas = vec![
            Gaussian::new(q(1, 2), q(-1, 3)),
            Gaussian::new(q(2, 1), q(0, 1)),
            Gaussian::new(q(0, 1), q(5, 4)),
        ];
        let (lhs, rhs) = block_determinant_identity(&[2, 1, 2], &alphas).unwrap();
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = shifted_determinant_identity(&[2, 1, 2], &alphas).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn float_block_tracks_exact_block() {
        let exact = binomial_block(12, 0, 7, 0, q(-19, 2)).unwrap().entries;
        let float = binomial_block(12, 0, 7, 0, Complex64::new(-9.5, 0.0)).unwrap().entries;
        for i in 0..12 {
            for j in 0..7 {
                let e = exact[(i, j)].to_c64();
                assert!((float[(i, j)] - e).norm() <= 1e-12 * e.norm().max(1.0));
            }
        }
    }

    #[test]
    fn kernel_products_vanish_for_small_profile() {
        let alphas = [q(1, 2), q(-3, 1), q(0, 1)];
        assert!(kernel_annihilation_check(3, &[1, 1, 2], &alphas).unwrap());
        // a block taken at a point missing from the product is not annihilated
        let n = 1 + 1 + 2 + 3 - 2;
        let left = block_entries(1, 0, n, 0, &q(0, 1))
            .mul(&shifted_nilpotent_power(n, &alphas[0], 1))
            .mul(&shifted_nilpotent_power(n, &alphas[1], 1));
        assert!(!left.mul(&pascal_block(n, 2, &q(5, 7))).is_zero());
    }
}
