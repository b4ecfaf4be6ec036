//! Trigonometric (Fourier) calculus on uniformly sampled periodic data.
//!
//! Samples are taken at `theta_j = 2 pi j / N`, `j = 0..N`. Derivatives are
//! with respect to `theta`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::Vec2;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Signed wavenumber of FFT bin `index` for length `n`.
pub fn wavenumber(index: usize, n: usize) -> i64 {
    if index <= n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

/// Forward DFT normalized so that `c_k` are the trigonometric interpolation
/// coefficients: `z(theta) = sum_k c_k e^{i k theta}`.
pub fn coefficients(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    plans(n).forward.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`coefficients`].
pub fn synthesize(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plans(buf.len()).inverse.process(&mut buf);
    buf
}

fn derivative_multiplier(index: usize, n: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let k = wavenumber(index, n);
    // The Nyquist mode has no well-defined odd derivative on a real signal.
    if n.is_multiple_of(2) && index == n / 2 && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, k as f64).powu(order)
}

fn differentiate_complex(samples: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = samples.len();
    let mut coeffs = coefficients(samples);
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c *= derivative_multiplier(idx, n, order);
    }
    synthesize(&coeffs)
}

/// `order`-th derivative of a real periodic sample vector.
pub fn derivative(values: &[f64], order: u32) -> Vec<f64> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    differentiate_complex(&z, order).into_iter().map(|c| c.re).collect()
}

/// `order`-th derivative of a periodic planar point sequence.
pub fn derivative_points(points: &[Vec2], order: u32) -> Vec<Vec2> {
    let z = to_complex(points);
    differentiate_complex(&z, order).into_iter().map(|c| Vec2::new(c.re, c.im)).collect()
}

pub fn to_complex(points: &[Vec2]) -> Vec<Complex64> {
    points.iter().map(|p| Complex64::new(p.x, p.y)).collect()
}

pub fn from_complex(z: &[Complex64]) -> Vec<Vec2> {
    z.iter().map(|c| Vec2::new(c.re, c.im)).collect()
}

/// Multiplies Fourier mode `k` of a point sequence by `factor(k)`.
pub fn filter_points(points: &[Vec2], factor: impl Fn(i64) -> f64) -> Vec<Vec2> {
    let n = points.len();
    let mut coeffs = coefficients(&to_complex(points));
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c *= factor(wavenumber(idx, n));
    }
    from_complex(&synthesize(&coeffs))
}

/// Trigonometric interpolant of a periodic point sequence, evaluable at any
/// parameter value.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    coeffs: Vec<(i64, Complex64)>,
}

impl TrigInterpolant {
    pub fn new(points: &[Vec2]) -> Self {
        let n = points.len();
        let raw = coefficients(&to_complex(points));
        let mut coeffs = Vec::with_capacity(n);
        for (idx, c) in raw.into_iter().enumerate() {
            let k = wavenumber(idx, n);
            if n.is_multiple_of(2) && idx == n / 2 {
                // Split the Nyquist mode symmetrically so the interpolant is real.
                coeffs.push((k, c * 0.5));
                coeffs.push((-k, c * 0.5));
            } else {
                coeffs.push((k, c));
            }
        }
        Self { coeffs }
    }

    /// Position and first derivative at parameter `theta`.
    pub fn eval(&self, theta: f64) -> (Vec2, Vec2) {
        let mut z = Complex64::new(0.0, 0.0);
        let mut dz = Complex64::new(0.0, 0.0);
        for &(k, c) in &self.coeffs {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            z += c * e;
            dz += c * e * Complex64::new(0.0, k as f64);
        }
        (Vec2::new(z.re, z.im), Vec2::new(dz.re, dz.im))
    }

    /// Arclength element integrated from 0 to `theta` by composite Gauss rule.
    pub fn arclength(&self, theta: f64, panels: usize) -> f64 {
        let width = theta / panels as f64;
        (0..panels)
            .map(|p| self.arclength_between(p as f64 * width, (p + 1) as f64 * width))
            .sum()
    }

    /// Arclength between two parameters by one three-point Gauss panel.
    pub fn arclength_between(&self, a: f64, b: f64) -> f64 {
        const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        NODES
            .iter()
            .zip(WEIGHTS)
            .map(|(x, w)| half * w * self.eval(mid + half * x).1.norm())
            .sum()
    }
}

/// Uniform parameter grid `2 pi j / n`.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}
