//! Discrete Fourier transform on complex buffers.
//!
//! Power-of-two lengths use an iterative radix-2 transform with a precomputed
//! twiddle table; other lengths fall back to the direct O(n²) sum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Sign of the exponent in `Σ x_j e^{± 2πi jk/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `e^{-2πi jk/n}`
    Forward,
    /// `e^{+2πi jk/n}`, unnormalized.
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        }
    }
}

/// Unnormalized in-place DFT.
pub fn transform(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, direction);
    } else {
        direct(data, direction);
    }
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n / 2)
        .map(|k| {
            let theta = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn radix2(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let table = twiddles(n, direction.sign());
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = table[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn direct(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let sign = direction.sign();
    // exact phases via (j*k mod n) keep the fallback as accurate as the radix-2 path
    let table: Vec<Complex64> = (0..n)
        .map(|m| {
            let theta = sign * 2.0 * PI * m as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();
    let input = data.to_vec();
    for (k, out) in data.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, x) in input.iter().enumerate() {
            acc += *x * table[(j * k) % n];
        }
        *out = acc;
    }
}
