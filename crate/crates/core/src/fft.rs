//! Pluggable 3D DFT provider.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// A cubic 3D DFT of side `n` on row-major data.
///
/// `forward` is unnormalised, `inverse` carries the 1/n³ factor, so
/// `inverse(forward(x)) == x` up to round-off. Implementations must be safe
/// to call from several threads at once.
pub trait DftProvider: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn forward(&self, data: &mut [Complex64]);
    fn inverse(&self, data: &mut [Complex64]);
}

/// Default provider: three passes of 1D `rustfft` transforms.
pub struct RustFftProvider {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for RustFftProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RustFftProvider").field("n", &self.n).finish()
    }
}

impl RustFftProvider {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        RustFftProvider {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn lines(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        // Batches of whole planes keep the parallel split deterministic.
        let chunk = n * n;
        let scratch_len = fft.get_inplace_scratch_len();
        data.par_chunks_mut(chunk).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, block| fft.process_with_scratch(block, scratch),
        );
    }

    fn transform(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        let n2 = n * n;
        assert_eq!(data.len(), n2 * n, "DFT buffer has wrong length");

        self.lines(fft, data);

        let mut buf = vec![Complex64::default(); data.len()];
        // axis 1: transpose each i0-plane
        for i0 in 0..n {
            let plane = &data[i0 * n2..(i0 + 1) * n2];
            let out = &mut buf[i0 * n2..(i0 + 1) * n2];
            for i1 in 0..n {
                for i2 in 0..n {
                    out[i2 * n + i1] = plane[i1 * n + i2];
                }
            }
        }
        self.lines(fft, &mut buf);
        for i0 in 0..n {
            let plane = &mut data[i0 * n2..(i0 + 1) * n2];
            let src = &buf[i0 * n2..(i0 + 1) * n2];
            for i1 in 0..n {
                for i2 in 0..n {
                    plane[i1 * n + i2] = src[i2 * n + i1];
                }
            }
        }

        // axis 0
        for i0 in 0..n {
            for i12 in 0..n2 {
                buf[i12 * n + i0] = data[i0 * n2 + i12];
            }
        }
        self.lines(fft, &mut buf);
        for i0 in 0..n {
            for i12 in 0..n2 {
                data[i0 * n2 + i12] = buf[i12 * n + i0];
            }
        }
    }
}

impl DftProvider for RustFftProvider {
    fn n(&self) -> usize {
        self.n
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.transform(&self.fwd, data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.transform(&self.inv, data);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = 8;
        let p = RustFftProvider::new(n);
        let orig: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.1).cos()))
            .collect();
        let mut x = orig.clone();
        p.forward(&mut x);
        p.inverse(&mut x);
        let err = x
            .iter()
            .zip(&orig)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "round trip error {err}");
    }

    #[test]
    fn forward_of_single_mode() {
        // e^{i(x0 + 2 x2)} on n = 4 lands in bin (1, 0, 2) with weight n³.
        let n = 4;
        let p = RustFftProvider::new(n);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut x = vec![Complex64::default(); 64];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ph = h * (a as f64 + 2.0 * c as f64);
                    x[(a * n + b) * n + c] = Complex64::from_polar(1.0, ph);
                }
            }
        }
        p.forward(&mut x);
        for (i, z) in x.iter().enumerate() {
            if i == n * n + 2 {
                assert!((z - Complex64::new(64.0, 0.0)).norm() < 1e-12);
            } else {
                assert!(z.norm() < 1e-12);
            }
        }
    }
}
