//! Norms, currents, scattering coefficients and energy expectation values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::potential::PotentialSpec;
use crate::scalar::Real;
use crate::spectral::Spectral;
use crate::wavepacket::WavefunctionState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    Excellent,
    Good,
    Poor,
}

impl Quality {
    /// `excellent` below 1e-2 total-probability error, `good` below 5e-2.
    pub fn classify(total: f64) -> Self {
        let err = (total - 1.0).abs();
        if err < 1e-2 {
            Quality::Excellent
        } else if err < 5e-2 {
            Quality::Good
        } else {
            Quality::Poor
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub transmission: f64,
    pub reflection: f64,
    pub absorbed: f64,
    pub total: f64,
    pub quality: Quality,
}

/// Where the reflected and transmitted regions end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPartition {
    pub barrier_left: f64,
    pub barrier_right: f64,
    pub absorber_width: f64,
}

impl RegionPartition {
    /// Barrier bounds taken from the potential's support, or the domain
    /// midpoint for a free particle.
    pub fn for_potential<T: Real>(spec: &PotentialSpec, grid: &SpatialGrid<T>, absorber_width: f64) -> Self {
        let (barrier_left, barrier_right) = spec.support().unwrap_or_else(|| {
            let mid = 0.5 * (grid.x_min().as_f64() + grid.x_max().as_f64());
            (mid, mid)
        });
        Self {
            barrier_left,
            barrier_right,
            absorber_width,
        }
    }

    pub fn validate<T: Real>(&self, grid: &SpatialGrid<T>) -> Result<()> {
        let lo = grid.x_min().as_f64() + self.absorber_width;
        let hi = grid.x_max().as_f64() - self.absorber_width;
        if !(self.barrier_left > lo) {
            return Err(Error::config(
                "partition.barrier_left",
                format!("{} must exceed x_min + layer width = {lo}", self.barrier_left),
            ));
        }
        if !(self.barrier_right < hi) {
            return Err(Error::config(
                "partition.barrier_right",
                format!("{} must be below x_max - layer width = {hi}", self.barrier_right),
            ));
        }
        if self.barrier_left > self.barrier_right {
            return Err(Error::config(
                "partition.barrier_left",
                "barrier_left exceeds barrier_right",
            ));
        }
        Ok(())
    }
}

fn sum<T: Real>(it: impl Iterator<Item = T>) -> T {
    it.fold(T::zero(), |a, b| a + b)
}

/// Discrete norm `Σ|ψ_j|² dx`.
pub fn norm<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>) -> T {
    sum(state.densities()) * grid.dx()
}

/// `J_j = Im(ψ_j* ∂ψ_j) / m` with a spectral derivative.
pub fn probability_current<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>, mass: T) -> Vec<T> {
    let mut spectral = Spectral::new(grid);
    let d = spectral.derivative(&state.amplitudes);
    state
        .amplitudes
        .iter()
        .zip(&d)
        .map(|(psi, dpsi)| (psi.conj() * dpsi).im / mass)
        .collect()
}

/// Final-state T and R integrals over the partition. `absorbed` is the
/// probability removed by the boundary mask during the run; without it the
/// absorbed share falls back to `1 - T - R`.
pub fn scattering_coefficients<T: Real>(
    state: &WavefunctionState<T>,
    grid: &SpatialGrid<T>,
    partition: &RegionPartition,
    absorbed: Option<f64>,
) -> Result<ScatteringReport> {
    partition.validate(grid)?;
    let lo = grid.x_min().as_f64() + partition.absorber_width;
    let hi = grid.x_max().as_f64() - partition.absorber_width;
    let dx = grid.dx().as_f64();
    let (mut t, mut r) = (0.0, 0.0);
    for (&x, p) in grid.positions().iter().zip(state.densities()) {
        let (x, p) = (x.as_f64(), p.as_f64());
        if x > partition.barrier_right && x <= hi {
            t += p;
        } else if x >= lo && x < partition.barrier_left {
            r += p;
        }
    }
    let transmission = (t * dx).clamp(0.0, 1.0);
    let reflection = (r * dx).clamp(0.0, 1.0);
    let absorbed = absorbed.unwrap_or(1.0 - transmission - reflection).clamp(0.0, 1.0);
    let total = transmission + reflection + absorbed;
    Ok(ScatteringReport {
        transmission,
        reflection,
        absorbed,
        total,
        quality: Quality::classify(total),
    })
}

/// Probability-weighted mean position, normalized by the current norm.
pub fn center_of_mass<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>) -> Result<T> {
    let w = sum(state.densities());
    if !(w > T::zero()) {
        return Err(Error::Undefined("center of mass of a zero-norm state".into()));
    }
    let m = sum(grid.positions().iter().zip(state.densities()).map(|(&x, p)| x * p));
    Ok(m / w)
}

/// Position standard deviation.
pub fn position_spread<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>) -> Result<T> {
    let mean = center_of_mass(state, grid)?;
    let w = sum(state.densities());
    let v = sum(grid
        .positions()
        .iter()
        .zip(state.densities())
        .map(|(&x, p)| (x - mean) * (x - mean) * p));
    Ok((v / w).sqrt())
}

/// Spectral first moment of the wavenumber distribution.
pub fn mean_wavenumber<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>) -> T {
    let mut spectral = Spectral::new(grid);
    let mut buf = state.amplitudes.clone();
    spectral.forward(&mut buf);
    let w = sum(buf.iter().map(|z| z.norm_sqr()));
    sum(buf.iter().zip(spectral.wavenumbers()).map(|(z, &k)| k * z.norm_sqr())) / w
}

/// `(kinetic, potential)` expectation values with a spectral derivative.
pub fn energies<T: Real>(state: &WavefunctionState<T>, grid: &SpatialGrid<T>, potential: &[T], mass: T) -> (T, T) {
    let mut spectral = Spectral::new(grid);
    energies_with(&mut spectral, state, grid.dx(), potential, mass)
}

pub(crate) fn energies_with<T: Real>(
    spectral: &mut Spectral<T>,
    state: &WavefunctionState<T>,
    dx: T,
    potential: &[T],
    mass: T,
) -> (T, T) {
    let d = spectral.derivative(&state.amplitudes);
    let kinetic = sum(d.iter().map(|z| z.norm_sqr())) * dx / (T::lit(2.0) * mass);
    let pot = sum(potential.iter().zip(state.densities()).map(|(&v, p)| v * p)) * dx;
    (kinetic, pot)
}
