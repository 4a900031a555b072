//! Total-degree homotopy on a random affine chart of projective space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::psi::PsiSystem;

const MAX_STEP: f64 = 0.05;
const MIN_STEP: f64 = 1e-13;
const MAX_STEPS: usize = 50_000;
const DIVERGENCE: f64 = 1e8;
const CORRECTOR_TOL: f64 = 1e-9;
const ENDGAME_ITERS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PathError {
    Diverged,
    StepUnderflow,
    TooManySteps,
}

/// The chart `x = base + basis * y`, where the columns of `basis` span the
/// kernel of `x -> sum c_i x_i` and `sum c_i base_i = 1`.
pub(crate) struct Chart {
    pub base: DVector<Complex64>,
    pub basis: DMatrix<Complex64>,
}

impl Chart {
    /// `c` must be nonzero. `fill` supplies the extra columns used to build
    /// an orthonormal complement.
    pub fn new(c: &[Complex64], fill: &[Complex64]) -> Chart {
        let n = c.len();
        let cbar = DVector::from_iterator(n, c.iter().map(|z| z.conj()));
        let base = &cbar / Complex64::new(cbar.norm_squared(), 0.0);
        let mut m = DMatrix::zeros(n, n);
        m.set_column(0, &cbar);
        for j in 1..n {
            for i in 0..n {
                m[(i, j)] = fill[(j - 1) * n + i];
            }
        }
        let q = m.qr().q();
        let basis = q.columns(1, n - 1).into_owned();
        Chart { base, basis }
    }

    pub fn lift(&self, y: &DVector<Complex64>) -> Vec<Complex64> {
        (&self.base + &self.basis * y).iter().copied().collect()
    }
}

pub(crate) struct Tracker<'a> {
    pub psi: &'a PsiSystem,
    pub chart: Chart,
    pub gamma: Complex64,
    pub degrees: Vec<u32>,
}

impl Tracker<'_> {
    fn target(&self, y: &DVector<Complex64>) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let x = self.chart.lift(y);
        let (vals, grad) = self
            .psi
            .eval_with_gradient(&x)
            .expect("chart dimension matches the system");
        let n = vals.len();
        let jx = DMatrix::from_fn(n, x.len(), |i, j| grad[i][j]);
        (DVector::from_vec(vals), jx * &self.chart.basis)
    }

    fn start(&self, y: &DVector<Complex64>) -> (DVector<Complex64>, DVector<Complex64>) {
        let one = Complex64::new(1.0, 0.0);
        let vals = DVector::from_iterator(y.len(), y.iter().zip(&self.degrees).map(|(v, &e)| v.powu(e) - one));
        let diag = DVector::from_iterator(
            y.len(),
            y.iter().zip(&self.degrees).map(|(v, &e)| f64::from(e) * v.powu(e - 1)),
        );
        (vals, diag)
    }

    /// `H`, `dH/dy`, `dH/dt` at `(y, t)`.
    fn homotopy(&self, y: &DVector<Complex64>, t: f64) -> (DVector<Complex64>, DMatrix<Complex64>, DVector<Complex64>) {
        let (f, jf) = self.target(y);
        let (g, jg) = self.start(y);
        let s = self.gamma * (1.0 - t);
        let h = &g * s + &f * Complex64::new(t, 0.0);
        let mut hy = jf * Complex64::new(t, 0.0);
        for i in 0..y.len() {
            hy[(i, i)] += s * jg[i];
        }
        let ht = f - g * self.gamma;
        (h, hy, ht)
    }

    /// Start solutions: all tuples of roots of unity of the given orders.
    pub fn start_points(&self) -> Vec<DVector<Complex64>> {
        let mut out = vec![Vec::new()];
        for &e in &self.degrees {
            let mut next = Vec::with_capacity(out.len() * e as usize);
            for prefix in &out {
                for k in 0..e {
                    let mut p: Vec<Complex64> = prefix.clone();
                    p.push(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(e)));
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(DVector::from_vec).collect()
    }

    /// Tracks one path from `t = 0` to `t = 1` and returns the projective
    /// endpoint after Newton on the target system.
    pub fn track(&self, start: &DVector<Complex64>) -> Result<Vec<Complex64>, PathError> {
        let mut y = start.clone();
        let mut t = 0.0_f64;
        let mut dt = 0.01_f64;
        let mut streak = 0;
        let mut steps = 0;
        while t < 1.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(PathError::TooManySteps);
            }
            let h = dt.min(1.0 - t);
            match self.step(&y, t, h) {
                Some(next) => {
                    y = next;
                    t = if 1.0 - t <= dt { 1.0 } else { t + h };
                    streak += 1;
                    if streak >= 3 {
                        dt = (dt * 2.0).min(MAX_STEP);
                        streak = 0;
                    }
                }
                None => {
                    dt /= 2.0;
                    streak = 0;
                    if dt < MIN_STEP {
                        if t > 0.99 {
                            break;
                        }
                        return Err(PathError::StepUnderflow);
                    }
                }
            }
            if y.norm() > DIVERGENCE {
                return Err(PathError::Diverged);
            }
        }
        for _ in 0..ENDGAME_ITERS {
            let (f, jf) = self.target(&y);
            let Some(delta) = jf.lu().solve(&f) else { break };
            y -= &delta;
            if delta.norm() <= 1e-15 * (1.0 + y.norm()) {
                break;
            }
        }
        if !y.iter().all(|v| v.is_finite()) || y.norm() > DIVERGENCE {
            return Err(PathError::Diverged);
        }
        Ok(self.chart.lift(&y))
    }

    fn step(&self, y: &DVector<Complex64>, t: f64, h: f64) -> Option<DVector<Complex64>> {
        let (_, hy, ht) = self.homotopy(y, t);
        let dy = hy.lu().solve(&(-ht))?;
        let mut z = y + dy * Complex64::new(h, 0.0);
        let t1 = t + h;
        let scale = 1.0 + y.norm();
        for iter in 0..3 {
            let (hv, hy, _) = self.homotopy(&z, t1);
            let delta = hy.lu().solve(&hv)?;
            if iter == 0 && delta.norm() > 0.1 * scale {
                return None;
            }
            z -= &delta;
            if !z.iter().all(|v| v.is_finite()) {
                return None;
            }
            if delta.norm() <= CORRECTOR_TOL * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        None
    }
}
