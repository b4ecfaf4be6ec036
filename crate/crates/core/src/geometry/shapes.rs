//! Built-in initial curves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::{spectral, Vec2};

pub fn circle(n: usize, radius: f64) -> Vec<Vec2> {
    circle_at(n, radius, Vec2::zeros())
}

pub fn circle_at(n: usize, radius: f64, center: Vec2) -> Vec<Vec2> {
    spectral::grid(n)
        .into_iter()
        .map(|t| center + radius * Vec2::new(t.cos(), t.sin()))
        .collect()
}

pub fn ellipse(n: usize, a: f64, b: f64) -> Vec<Vec2> {
    spectral::grid(n).into_iter().map(|t| Vec2::new(a * t.cos(), b * t.sin())).collect()
}

/// Polar graph `r(theta) = radius (1 + amplitude cos(mode theta))`.
pub fn perturbed_circle(n: usize, radius: f64, amplitude: f64, mode: u32) -> Vec<Vec2> {
    polar(n, |t| radius * (1.0 + amplitude * (mode as f64 * t).cos()))
}

/// `C^{1,1}` bump profile `(1 - (theta/width)^2)^2` supported on `|theta| < width`.
pub fn bump(theta: f64, width: f64) -> f64 {
    let t = wrap_angle(theta) / width;
    if t.abs() < 1.0 {
        (1.0 - t * t).powi(2)
    } else {
        0.0
    }
}

/// Unit circle with a `C^{1,1}` radial bump centred at `theta = 0`.
pub fn bump_circle(n: usize, amplitude: f64, width: f64) -> Vec<Vec2> {
    polar(n, |t| 1.0 + amplitude * bump(t, width))
}

fn polar(n: usize, r: impl Fn(f64) -> f64) -> Vec<Vec2> {
    spectral::grid(n).into_iter().map(|t| r(t) * Vec2::new(t.cos(), t.sin())).collect()
}

fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let t = theta.rem_euclid(tau);
    if t > 0.5 * tau {
        t - tau
    } else {
        t
    }
}

/// Initial curve selector used by configuration files.
///
/// Textual forms: `circle[:R]`, `ellipse:A,B`, `perturbed:R,AMP,K`,
/// `bump:AMP,WIDTH`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Perturbed { radius: f64, amplitude: f64, mode: u32 },
    Bump { amplitude: f64, width: f64 },
}

impl Shape {
    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        match *self {
            Shape::Circle { radius } => circle(n, radius),
            Shape::Ellipse { a, b } => ellipse(n, a, b),
            Shape::Perturbed { radius, amplitude, mode } => {
                perturbed_circle(n, radius, amplitude, mode)
            }
            Shape::Bump { amplitude, width } => bump_circle(n, amplitude, width),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("shape `{text}`: {e}")))?
        };
        let bad = || Error::InvalidParameter(format!("shape `{text}`: wrong number of arguments"));
        let shape = match kind.trim() {
            "circle" => match nums.as_slice() {
                [] => Shape::Circle { radius: 1.0 },
                [r] => Shape::Circle { radius: *r },
                _ => return Err(bad()),
            },
            "ellipse" => match nums.as_slice() {
                [a, b] => Shape::Ellipse { a: *a, b: *b },
                _ => return Err(bad()),
            },
            "perturbed" => match nums.as_slice() {
                [r, amp, k] if *k >= 0.0 && k.fract() == 0.0 => {
                    Shape::Perturbed { radius: *r, amplitude: *amp, mode: *k as u32 }
                }
                _ => return Err(bad()),
            },
            "bump" => match nums.as_slice() {
                [amp, w] => Shape::Bump { amplitude: *amp, width: *w },
                _ => return Err(bad()),
            },
            other => return Err(Error::InvalidParameter(format!("unknown shape `{other}`"))),
        };
        Ok(shape)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Circle { radius } => write!(f, "circle:{radius}"),
            Shape::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            Shape::Perturbed { radius, amplitude, mode } => {
                write!(f, "perturbed:{radius},{amplitude},{mode}")
            }
            Shape::Bump { amplitude, width } => write!(f, "bump:{amplitude},{width}"),
        }
    }
}
