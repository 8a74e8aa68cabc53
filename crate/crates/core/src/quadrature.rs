//! One-dimensional quadrature: adaptive Gauss–Kronrod, composite Simpson with
//! interval doubling, and Gauss–Legendre rules.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait Integrand: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T = f64> {
    pub value: T,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    absolute: f64,
}

fn kronrod<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Panel<T> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut absolute = fc.magnitude() * WGK[7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let (l, r) = (f(c - dx), f(c + dx));
        let s = l + r;
        k = k + s * WGK[i];
        absolute += (l.magnitude() + r.magnitude()) * WGK[i];
        if i % 2 == 1 {
            g = g + s * WG[i / 2];
        }
    }
    Panel { a, b, value: k * h, error: (k - g).magnitude() * h.abs(), absolute: absolute * h.abs() }
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<Estimate> {
    integrate_with(f, a, b, rel_tol, 0.0)
}

/// Adaptive Gauss–Kronrod with both relative and absolute tolerances.
///
/// Stops once the summed error estimate is below `max(rel_tol·|I|, abs_tol)`
/// or has reached the rounding level of `∫|f|`.
pub fn integrate_with<T: Integrand>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate<T>> {
    const MAX_PANELS: usize = 4000;
    let mut panels = alloc::vec![kronrod(&f, a, b)];
    loop {
        let mut value = T::default();
        let mut error = 0.0;
        let mut absolute = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            value = value + p.value;
            error += p.error;
            absolute += p.absolute;
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let target = (rel_tol * value.magnitude()).max(abs_tol).max(50.0 * f64::EPSILON * absolute);
        if error <= target {
            return Ok(Estimate { value, error });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature { estimate: value.magnitude(), error });
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Quadrature { estimate: value.magnitude(), error });
        }
        panels.push(kronrod(&f, p.a, mid));
        panels.push(kronrod(&f, mid, p.b));
    }
}

/// `∫_a^∞ f` summed over panels of doubling width starting at `first_width`,
/// stopping once three successive panels add less than the tolerance.
pub fn integrate_to_infinity<T: Integrand>(
    f: impl Fn(f64) -> T,
    a: f64,
    first_width: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate<T>> {
    let mut total = T::default();
    let mut error = 0.0;
    let mut lo = a;
    let mut width = first_width;
    let mut quiet = 0;
    for _ in 0..200 {
        let piece = integrate_with(&f, lo, lo + width, rel_tol, abs_tol * 1e-3)?;
        total = total + piece.value;
        error += piece.error;
        let small = piece.value.magnitude() <= (rel_tol * total.magnitude()).max(abs_tol);
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok(Estimate { value: total, error });
        }
        lo += width;
        width *= 2.0;
    }
    Err(Error::Quadrature { estimate: total.magnitude(), error })
}

/// Composite Simpson rule with `intervals` (even) subintervals.
pub fn simpson<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, intervals: usize) -> T {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}

/// Simpson estimate after doubling the interval count from `start` until two
/// successive estimates agree to `rel_tol`. Returns the value and the final
/// interval count.
pub fn simpson_converged<T: Integrand>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    start: usize,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(T, usize)> {
    let mut n = start.max(2);
    let mut previous = simpson(&f, a, b, n);
    while n < max_intervals {
        n *= 2;
        let current = simpson(&f, a, b, n);
        let change = (current - previous).magnitude();
        if change <= rel_tol * current.magnitude() || change == 0.0 {
            return Ok((current, n));
        }
        previous = current;
    }
    Err(Error::Quadrature { estimate: previous.magnitude(), error: f64::NAN })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}
