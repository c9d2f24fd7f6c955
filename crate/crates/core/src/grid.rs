//! Uniform spatial grid, its conjugate wavenumber grid, and the unit convention.
//!
//! All quantities use ħ = 1 with the particle mass in units of the electron
//! mass. Lengths, energies and times carry nm / eV / fs labels but no
//! conversion factors are applied anywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic grid on `[x_min, x_max)`; the right endpoint is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid<T> {
    x_min: T,
    x_max: T,
    dx: T,
    positions: Vec<T>,
}

impl<T: Real> SpatialGrid<T> {
    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    /// Conjugate wavenumber grid in discrete-transform ordering.
    pub fn wavenumbers(&self) -> WavenumberGrid<T> {
        wavenumbers(self)
    }
}

/// Builds a grid of `n_points` samples spaced `(x_max - x_min) / n_points`.
pub fn make_grid<T: Real>(x_min: T, x_max: T, n_points: usize) -> Result<SpatialGrid<T>> {
    if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
        return Err(Error::config(
            "grid.x_max",
            format!("domain [{x_min}, {x_max}) is empty or not finite"),
        ));
    }
    if n_points < 8 || !n_points.is_power_of_two() {
        return Err(Error::config(
            "grid.n_points",
            format!("{n_points} is not a power of two >= 8"),
        ));
    }
    let dx = (x_max - x_min) / T::from_usize_lossy(n_points);
    let positions = (0..n_points).map(|j| x_min + T::from_usize_lossy(j) * dx).collect();
    Ok(SpatialGrid {
        x_min,
        x_max,
        dx,
        positions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberGrid<T> {
    k_values: Vec<T>,
}

impl<T: Real> WavenumberGrid<T> {
    pub fn values(&self) -> &[T] {
        &self.k_values
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.k_values.iter().fold(T::zero(), |acc, &k| acc.max(k.abs()))
    }
}

/// `k_j = 2π f(j) / (n dx)` with `f(j) = j` below `n/2` and `j - n` above.
pub fn wavenumbers<T: Real>(grid: &SpatialGrid<T>) -> WavenumberGrid<T> {
    wavenumbers_for(grid.len(), grid.dx())
}

pub(crate) fn wavenumbers_for<T: Real>(n: usize, dx: T) -> WavenumberGrid<T> {
    let scale = T::TAU() / (T::from_usize_lossy(n) * dx);
    let half = n / 2;
    let k_values = (0..n)
        .map(|j| {
            let f = if j < half {
                T::from_usize_lossy(j)
            } else {
                -T::from_usize_lossy(n - j)
            };
            f * scale
        })
        .collect();
    WavenumberGrid { k_values }
}

/// Particle mass in electron masses; ħ is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub mass: f64,
}

impl UnitSystem {
    pub const LENGTH_LABEL: &'static str = "nm";
    pub const ENERGY_LABEL: &'static str = "eV";
    pub const TIME_LABEL: &'static str = "fs";

    pub fn new(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("grid.mass", format!("mass must be positive, got {mass}")));
        }
        Ok(Self { mass })
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { mass: 1.0 }
    }
}
