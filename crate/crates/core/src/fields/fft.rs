//! In-place iterative radix-2 FFT for power-of-two lengths.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Radix2 {
    len: usize,
    /// `exp(-2 pi i k / len)` for `k < len / 2`.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2 {
    pub(crate) fn new(len: usize) -> Self {
        assert!(len.is_power_of_two() && len >= 2);
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let bitrev = (0..len).map(|j| j.reverse_bits() >> (usize::BITS - bits)).collect();
        Radix2 { len, twiddles, bitrev }
    }

    /// Unnormalised transform; `inverse` flips the sign of the exponent.
    pub(crate) fn process(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len);
        for (j, &r) in self.bitrev.iter().enumerate() {
            if j < r {
                data.swap(j, r);
            }
        }
        let mut size = 2;
        while size <= self.len {
            let half = size / 2;
            let stride = self.len / size;
            for block in data.chunks_exact_mut(size) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            size *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, x)| {
                    let angle = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + *x * Complex64::new(libm::cos(angle), libm::sin(angle))
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for len in [2usize, 8, 32] {
            let input: Vec<Complex64> = (0..len)
                .map(|j| Complex64::new(libm::sin(j as f64 * 1.3) + 0.2, libm::cos(j as f64 * 0.7)))
                .collect();
            let mut fast = input.clone();
            Radix2::new(len).process(&mut fast, false);
            let slow = naive_dft(&input);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12 * len as f64);
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let len = 64;
        let plan = Radix2::new(len);
        let input: Vec<Complex64> =
            (0..len).map(|j| Complex64::new(libm::sqrt(j as f64), -(j as f64) * 0.1)).collect();
        let mut data = input.clone();
        plan.process(&mut data, false);
        plan.process(&mut data, true);
        for (a, b) in data.iter().zip(&input) {
            assert!((a / len as f64 - b).norm() < 1e-13);
        }
    }
}
