//! Radix-2 complex FFT. Grid resolutions are powers of two, so this is the
//! only size the crate needs.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::real;

/// Precomputed twiddles and bit-reversal permutation for one length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    /// # Panics
    /// If `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        // direct sin/cos per entry keeps every twiddle within an ulp
        let twiddles = (0..len / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(real::cos(a), real::sin(a))
            })
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Fft { len, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward transform `X_k = Σ x_n e^{−2πikn/N}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
        let s = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    /// In-place 2-D transform of a row-major `N × N` array.
    pub fn forward_2d(&self, data: &mut [Complex64]) {
        self.run_2d(data, false);
    }

    pub fn inverse_2d(&self, data: &mut [Complex64]) {
        self.run_2d(data, true);
    }

    fn run_2d(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n * n);
        let apply = |row: &mut [Complex64]| {
            if inverse {
                self.inverse(row)
            } else {
                self.forward(row)
            }
        };
        for row in data.chunks_exact_mut(n) {
            apply(row);
        }
        let mut col = alloc::vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                col[j] = data[j * n + i];
            }
            apply(&mut col);
            for j in 0..n {
                data[j * n + i] = col[j];
            }
        }
    }
}
