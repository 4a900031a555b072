//! Sparse multivariate polynomials keyed by exponent vectors.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The monomial `c * x_i^e`.
    pub fn monomial(nvars: usize, i: usize, e: u32, c: T) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, a.clone() * b.clone());
            }
        }
        out
    }

    /// Multiplication by the variable `x_i`.
    pub fn mul_var(&self, i: usize) -> Self {
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e = e.clone();
            e[i] += 1;
            (e, c.clone())
        });
        Polynomial {
            nvars: self.nvars,
            terms: terms.collect(),
        }
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone() * T::from_i64(i64::from(e[i])));
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The common degree of all terms, if the polynomial is homogeneous and non-zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point dimension");
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(point)
                .fold(c.clone(), |m, (&k, x)| if k == 0 { m } else { m * x.powu(k) });
            acc + mono
        })
    }

    pub fn to_c64(&self) -> Polynomial<Complex64> {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.to_c64()))
                .collect(),
        }
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.terms.values().map(Scalar::modulus).fold(0.0, f64::max)
    }
}

/// A polynomial flattened for repeated floating evaluation together with its gradient.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    max_exp: u32,
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial<Complex64>) -> Self {
        let terms: Vec<(Complex64, Vec<u32>)> =
            p.terms().map(|(e, c)| (*c, e.clone())).collect();
        let max_exp = terms
            .iter()
            .flat_map(|(_, e)| e.iter().copied())
            .max()
            .unwrap_or(0);
        CompiledPoly {
            nvars: p.nvars(),
            max_exp,
            terms,
        }
    }

    fn power_table(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        x.iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(self.max_exp as usize + 1);
                row.push(Complex64::new(1.0, 0.0));
                for k in 1..=self.max_exp as usize {
                    row.push(row[k - 1] * xi);
                }
                row
            })
            .collect()
    }

    /// Value and gradient at `x`.
    pub fn eval_grad(&self, x: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        debug_assert_eq!(x.len(), self.nvars);
        let pw = self.power_table(x);
        let mut value = Complex64::new(0.0, 0.0);
        let mut grad = vec![Complex64::new(0.0, 0.0); self.nvars];
        for (c, e) in &self.terms {
            let mut mono = *c;
            for (i, &k) in e.iter().enumerate() {
                mono *= pw[i][k as usize];
            }
            value += mono;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut part = *c * f64::from(k);
                for (j, &kj) in e.iter().enumerate() {
                    let exp = if j == i { kj - 1 } else { kj };
                    part *= pw[j][exp as usize];
                }
                grad[i] += part;
            }
        }
        (value, grad)
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let pw = self.power_table(x);
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (c, e)| {
            acc + e
                .iter()
                .enumerate()
                .fold(*c, |m, (i, &k)| m * pw[i][k as usize])
        })
    }
}
