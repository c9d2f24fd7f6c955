//! FFT plans and wavenumbers bundled for repeated spectral operations.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::{wavenumbers_for, SpatialGrid};
use crate::scalar::Real;

pub struct Spectral<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    k: Vec<T>,
    scratch: Vec<Complex<T>>,
    inv_n: T,
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: &SpatialGrid<T>) -> Self {
        Self::with_len(grid.len(), grid.dx())
    }

    pub fn with_len(n: usize, dx: T) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            k: wavenumbers_for(n, dx).values().to_vec(),
            scratch: vec![Complex::default(); scratch_len],
            inv_n: T::from_usize_lossy(n).recip(),
        }
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&mut self, buf: &mut [Complex<T>]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalized inverse transform in place; callers scale by [`Self::inv_n`].
    pub fn inverse(&mut self, buf: &mut [Complex<T>]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    pub fn inv_n(&self) -> T {
        self.inv_n
    }

    /// Spectral first derivative `F⁻¹[i k F[ψ]]`.
    pub fn derivative(&mut self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = psi.to_vec();
        self.forward(&mut buf);
        let scale = self.inv_n;
        for (z, &k) in buf.iter_mut().zip(&self.k) {
            *z = Complex::new(-z.im * k, z.re * k) * scale;
        }
        self.inverse(&mut buf);
        buf
    }
}
