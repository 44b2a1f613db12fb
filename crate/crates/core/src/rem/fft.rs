//! Radix-2 complex FFT, enough for circulant embedding on power-of-two tori.

use alloc::vec::Vec;
use nalgebra::Complex;

use crate::math;

/// In-place forward DFT (`sum x_k e^{-2 pi i jk/n}`, unnormalized).
/// `buf.len()` must be a power of two.
pub fn fft(buf: &mut [Complex<f64>]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex<f64>> = (0..half)
            .map(|k| {
                let (s, c) = math::sincos(-2.0 * core::f64::consts::PI * k as f64 / len as f64);
                Complex::new(c, s)
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Forward 2-D DFT of a row-major `rows x cols` buffer.
pub fn fft2(buf: &mut [Complex<f64>], rows: usize, cols: usize) {
    for r in 0..rows {
        fft(&mut buf[r * cols..(r + 1) * cols]);
    }
    let mut column = alloc::vec![Complex::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = buf[r * cols + c];
        }
        fft(&mut column);
        for r in 0..rows {
            buf[r * cols + c] = column[r];
        }
    }
}
