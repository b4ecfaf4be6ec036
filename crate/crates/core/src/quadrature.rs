//! Locally corrected trapezoidal rule for weakly singular periodic integrals.
//!
//! Every nonlocal operator here integrates, for a fixed target node `x_i`,
//! an integrand of the form `F(theta) = |theta - theta_i|^{-p} B(theta)` in
//! the curve parameter, where `p = n + 1 + s` and `B` is smooth with
//! `B(theta_i) = 0`. The punctured trapezoidal sum over `j != i` then has the
//! generalized Euler-Maclaurin error `zeta(p - 2) B''(theta_i) h^{3-p}` to
//! leading order. Modelling `B` near the target by its quadratic Taylor
//! polynomial through the two neighbouring nodes removes that term, which
//! amounts to rescaling the weights of the nodes `i +- 1` by `1 - zeta(p - 2)`.
//! Odd parts of `B` cancel between the symmetric neighbours, which realizes
//! the principal value. The remaining error is `O(h^{5-p})`.

use crate::special::zeta;

/// Spatial dimension of the evolving hypersurface: curves in the plane.
pub const DIM: f64 = 1.0;

/// Exponent `n + 1 + s` of the model kernel `|y - x|^{-(n+1+s)}`.
pub fn kernel_exponent(s: f64) -> f64 {
    DIM + 1.0 + s
}

#[derive(Debug, Clone, Copy)]
pub struct SingularRule {
    exponent: f64,
    neighbour_weight: f64,
}

impl SingularRule {
    pub fn new(exponent: f64) -> Self {
        assert!(
            exponent > 2.0 && exponent < 3.0,
            "corrected rule is derived for exponents in (2, 3)"
        );
        Self { exponent, neighbour_weight: 1.0 - zeta(exponent - 2.0) }
    }

    /// Rule for the model kernel of order `s`.
    pub fn for_order(s: f64) -> Self {
        Self::new(kernel_exponent(s))
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Relative weight of source node `j` for target node `i` on an `n`-node
    /// periodic grid; zero on the diagonal. Always nonnegative.
    #[inline]
    pub fn weight(&self, i: usize, j: usize, n: usize) -> f64 {
        let d = if j >= i { j - i } else { j + n - i };
        match d.min(n - d) {
            0 => 0.0,
            1 => self.neighbour_weight,
            _ => 1.0,
        }
    }

    /// Applies the rule to one row: `h * sum_j w_ij f(j)`.
    pub fn integrate_row(&self, i: usize, n: usize, f: impl Fn(usize) -> f64) -> f64 {
        let h = std::f64::consts::TAU / n as f64;
        let mut acc = 0.0;
        // Opposite-side neighbours are paired before summation.
        for k in 1..=n / 2 {
            let plus = (i + k) % n;
            let minus = (i + n - k) % n;
            let pair = if plus == minus { f(plus) } else { f(plus) + f(minus) };
            acc += self.weight(i, plus, n) * pair;
        }
        h * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{circle_fractional_laplacian_eigenvalue, gamma};
    use std::f64::consts::{PI, TAU};

    fn chord(t: f64) -> f64 {
        (2.0 * (0.5 * t).sin()).abs()
    }

    #[test]
    fn chord_power_integral_converges_at_corrected_rate() {
        // int_0^{2pi} |2 sin(t/2)|^{-s} dt = 2 pi Gamma(1-s) / Gamma(1-s/2)^2
        let s = 0.5;
        let exact = 2.0 * PI * gamma(1.0 - s) / gamma(1.0 - 0.5 * s).powi(2);
        let rule = SingularRule::for_order(s);
        let mut errors = Vec::new();
        for n in [64usize, 128, 256] {
            let approx = rule.integrate_row(0, n, |j| {
                let t = TAU * j as f64 / n as f64;
                chord(t).powf(2.0 - rule.exponent())
            });
            errors.push((approx - exact).abs());
        }
        let order = (errors[0] / errors[2]).log2() / 2.0;
        assert!(order > 2.4, "order {order}, errors {errors:?}");
        assert!(errors[2] < 1e-5);
    }

    #[test]
    fn hypersingular_eigenvalue_matches_closed_form() {
        let s = 0.5;
        let rule = SingularRule::for_order(s);
        let n = 512;
        for k in [1u32, 4] {
            let value = rule.integrate_row(0, n, |j| {
                let t = TAU * j as f64 / n as f64;
                2.0 * ((k as f64 * t).cos() - 1.0) * chord(t).powf(-rule.exponent())
            });
            let mu = circle_fractional_laplacian_eigenvalue(s, k);
            assert!((value + mu).abs() / mu < 5e-5, "k={k}: {value} vs {mu}");
        }
    }

    #[test]
    fn weights_are_positive_over_the_order_range() {
        for s in [0.05, 0.3, 0.6, 0.95] {
            let rule = SingularRule::for_order(s);
            assert!(rule.weight(0, 1, 16) > 1.0);
            assert_eq!(rule.weight(0, 0, 16), 0.0);
            assert_eq!(rule.weight(3, 15, 16), 1.0);
            assert_eq!(rule.weight(0, 15, 16), rule.weight(0, 1, 16));
        }
    }
}
