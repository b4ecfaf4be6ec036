//! Scalar special functions and fixed quadrature rules.

use std::f64::consts::PI;

const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta function for real `s != 1`, including the analytic
/// continuation to `s < 1`, by Euler-Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!((s - 1.0).abs() > 1e-12, "zeta has a pole at s = 1");
    const M: usize = 24;
    let m = M as f64;
    let mut sum: f64 = (1..M).map(|k| (k as f64).powf(-s)).sum();
    sum += m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // Rising factorial s (s+1) ... (s+2j-2) divided by (2j)!.
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = m.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        sum += b / factorial * rising * power;
        let j = j as f64 + 1.0;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        power /= m * m;
    }
    sum
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Fractional mean curvature of a circle of radius `radius` for curves in
/// the plane: `(2 pi / s) Gamma(1 - s) / Gamma(1 - s/2)^2 * radius^{-s}`.
pub fn circle_fractional_curvature(s: f64, radius: f64) -> f64 {
    2.0 * PI / s * gamma(1.0 - s) / gamma(1.0 - 0.5 * s).powi(2) * radius.powf(-s)
}

/// Eigenvalue `mu_k` of `-Delta^{(1+s)/2}` on `cos(k theta)` over the unit
/// circle, from the Fourier transform of the chord power `|2 sin(t/2)|^p`.
pub fn circle_fractional_laplacian_eigenvalue(s: f64, k: u32) -> f64 {
    let p = -2.0 - s;
    let moment = |k: u32| {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        2.0 * PI * sign * gamma(p + 1.0)
            / (gamma(0.5 * p + k as f64 + 1.0) * gamma(0.5 * p - k as f64 + 1.0))
    };
    2.0 * (moment(0) - moment(k))
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(points: usize) -> Self {
        assert!(points > 0);
        let n = points;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_reference_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(0.0) + 0.5).abs() < 1e-14);
        assert!((zeta(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!((zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!((zeta(-1.5) + 0.025_485_201_889_833_04).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let integral = gl.integrate(|x| x.powi(15) - 3.0 * x.powi(4));
        assert!((integral - (1.0 / 16.0 - 3.0 / 5.0)).abs() < 1e-14);
        let odd = GaussLegendre::new(5);
        assert!((odd.integrate(|x| x.powi(9)) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn circle_eigenvalue_one_equals_curvature_coefficient() {
        // Translations lie in the kernel of the Jacobi operator on the circle,
        // so mu_1 = c_s^2 = s * lambda_s.
        for s in [0.25, 0.5, 0.75] {
            let mu1 = circle_fractional_laplacian_eigenvalue(s, 1);
            assert!((mu1 - s * circle_fractional_curvature(s, 1.0)).abs() < 1e-10);
        }
    }
}
