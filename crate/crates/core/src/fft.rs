//! Radix-2 complex FFT and its tensor-product extension to row-major
//! n-dimensional arrays.
//!
//! Plans own their twiddle and bit-reversal tables; the work buffers are
//! allocated per call so a plan can be shared between threads.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Transform direction. `Forward` uses the `exp(-i k x)` kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// One-dimensional power-of-two plan.
#[derive(Debug, Clone)]
pub struct Fft1d {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft1d {
    /// Panics unless `len` is a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| {
                let ang = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        Self { len, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized in-place transform.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if dir == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Tensor-product plan for a cube of side `n` in `dim` dimensions.
#[derive(Debug, Clone)]
pub struct FftNd {
    dim: usize,
    plan: Fft1d,
}

impl FftNd {
    pub fn new(dim: usize, n: usize) -> Self {
        Self { dim, plan: Fft1d::new(n) }
    }

    /// Unnormalized in-place transform along every axis.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.plan.len();
        let total = n.pow(self.dim as u32);
        assert_eq!(data.len(), total, "buffer length does not match plan");
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim {
            // stride of `axis` in row-major order (last axis fastest)
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    self.plan.process(&mut line, dir);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}
