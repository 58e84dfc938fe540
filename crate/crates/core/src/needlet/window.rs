use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of tabulation nodes for the smooth step.
const TABLE_SIZE: usize = 4096;
const SIMPSON_TOL: f64 = 1e-10;

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Tabulated smooth step ψ(u) = ∫_{−1}^{u} bump / ∫_{−1}^{1} bump on [−1, 1]
/// with monotone cubic Hermite interpolation.
#[derive(Debug)]
struct StepTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
    h: f64,
}

impl StepTable {
    fn build() -> Self {
        let n = TABLE_SIZE;
        let h = 2.0 / (n - 1) as f64;
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let a = -1.0 + (i - 1) as f64 * h;
            let piece = integrate(bump, a, a + h, SIMPSON_TOL / n as f64);
            cumulative[i] = cumulative[i - 1] + piece;
        }
        let total = cumulative[n - 1];
        let values: Vec<f64> = cumulative.iter().map(|v| v / total).collect();
        // exact derivative of the normalised step, then Fritsch–Carlson limiting
        let mut slopes: Vec<f64> = (0..n)
            .map(|i| bump(-1.0 + i as f64 * h) / total)
            .collect();
        for i in 0..n - 1 {
            let secant = (values[i + 1] - values[i]) / h;
            if secant <= 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secant;
            let beta = slopes[i + 1] / secant;
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[i] = tau * alpha * secant;
                slopes[i + 1] = tau * beta * secant;
            }
        }
        Self { values, slopes, h }
    }

    fn eval(&self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let s = (u + 1.0) / self.h;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let t = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }
}

/// The needlet window b(ξ), supported on (1/B, B).
///
/// Built from the standard smooth Littlewood–Paley construction: a low-pass
/// profile φ that equals 1 on [0, 1/B], decreases smoothly to 0 on [1/B, 1]
/// and vanishes beyond, and `b²(ξ) = φ(ξ/B) − φ(ξ)`. The sum over bands
/// telescopes, so Σ_{j≥0} b²(l/B^j) = 1 for every l ≥ 1.
#[derive(Debug, Clone)]
pub struct NeedletWindow {
    b: f64,
    table: Option<Arc<StepTable>>,
}

impl NeedletWindow {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("B must exceed 1, got {b}")));
        }
        Ok(Self {
            b,
            table: Some(Arc::new(StepTable::build())),
        })
    }

    /// A window that vanishes identically.
    pub fn zero(b: f64) -> Self {
        Self { b, table: None }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The low-pass profile φ(t).
    pub fn lowpass_profile(&self, t: f64) -> f64 {
        let Some(table) = &self.table else {
            return 0.0;
        };
        let b = self.b;
        if t <= 1.0 / b {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            let u = 1.0 - 2.0 * b / (b - 1.0) * (t - 1.0 / b);
            table.eval(u)
        }
    }

    /// b²(ξ).
    pub fn eval_sq(&self, xi: f64) -> f64 {
        if self.table.is_none() || xi <= 1.0 / self.b || xi >= self.b {
            return 0.0;
        }
        (self.lowpass_profile(xi / self.b) - self.lowpass_profile(xi)).max(0.0)
    }

    /// b(ξ).
    pub fn eval(&self, xi: f64) -> f64 {
        self.eval_sq(xi).sqrt()
    }

    /// b(l / B^j).
    pub fn band_weight(&self, l: usize, j: usize) -> f64 {
        self.eval(l as f64 / self.b.powi(j as i32))
    }

    /// max_{1 ≤ l ≤ lmax} |Σ_{j≥0} b²(l/B^j) − 1|.
    pub fn partition_error(&self, lmax: usize) -> f64 {
        (1..=lmax)
            .map(|l| {
                let mut s = 0.0;
                let mut j = 0;
                loop {
                    let xi = l as f64 / self.b.powi(j);
                    if xi <= 1.0 / self.b {
                        break;
                    }
                    s += self.eval(xi).powi(2);
                    j += 1;
                }
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
