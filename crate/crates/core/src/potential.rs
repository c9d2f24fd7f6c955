//! Analytic barrier profiles and their sampling onto a grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::scalar::Real;

/// Half-width of the default scattering region around a Gaussian barrier,
/// in units of `sigma_v`.
pub const GAUSSIAN_SUPPORT_SIGMAS: f64 = 2.0;

/// Relative threshold below which tabulated values count as outside the barrier.
const TABULATED_SUPPORT_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Free,
    Rectangular { v0: f64, width: f64, center: f64 },
    Gaussian { v0: f64, sigma_v: f64, center: f64 },
    Sum { members: Vec<PotentialSpec> },
    Tabulated { positions: Vec<f64>, values: Vec<f64> },
}

/// `v0` strictly inside the barrier (`|x - center| < width / 2`), zero elsewhere.
#[inline]
pub fn eval_rectangular<T: Real>(v0: T, width: T, center: T, x: T) -> T {
    if (x - center).abs() < width * T::lit(0.5) {
        v0
    } else {
        T::zero()
    }
}

#[inline]
pub fn eval_gaussian<T: Real>(v0: T, sigma_v: T, center: T, x: T) -> T {
    let u = (x - center) / sigma_v;
    v0 * (-(u * u) * T::lit(0.5)).exp()
}

fn interpolate(positions: &[f64], values: &[f64], x: f64) -> f64 {
    match positions.binary_search_by(|p| p.total_cmp(&x)) {
        Ok(i) => values[i],
        Err(0) => values[0],
        Err(i) if i >= positions.len() => values[positions.len() - 1],
        Err(i) => {
            let (x0, x1) = (positions[i - 1], positions[i]);
            let w = (x - x0) / (x1 - x0);
            values[i - 1] + w * (values[i] - values[i - 1])
        }
    }
}

impl PotentialSpec {
    pub fn eval<T: Real>(&self, x: T) -> T {
        match self {
            PotentialSpec::Free => T::zero(),
            PotentialSpec::Rectangular { v0, width, center } => {
                eval_rectangular(T::lit(*v0), T::lit(*width), T::lit(*center), x)
            }
            PotentialSpec::Gaussian { v0, sigma_v, center } => {
                eval_gaussian(T::lit(*v0), T::lit(*sigma_v), T::lit(*center), x)
            }
            PotentialSpec::Sum { members } => members.iter().fold(T::zero(), |acc, m| acc + m.eval(x)),
            PotentialSpec::Tabulated { positions, values } => T::lit(interpolate(positions, values, x.as_f64())),
        }
    }

    /// Shipped profiles are static; the propagator only re-samples when this
    /// returns true.
    pub fn is_time_dependent(&self) -> bool {
        match self {
            PotentialSpec::Sum { members } => members.iter().any(|m| m.is_time_dependent()),
            _ => false,
        }
    }

    /// Checks parameter invariants. `key` is the config path used in errors.
    pub fn validate(&self, key: &str) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    format!("{key}.{name}"),
                    format!("must be positive, got {v}"),
                ))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    format!("{key}.{name}"),
                    format!("must be non-negative, got {v}"),
                ))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{key}.{name}"), "must be finite"))
            }
        };
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Rectangular { v0, width, center } => {
                nonneg("v0", *v0)?;
                positive("width", *width)?;
                finite("center", *center)
            }
            PotentialSpec::Gaussian { v0, sigma_v, center } => {
                nonneg("v0", *v0)?;
                positive("sigma_v", *sigma_v)?;
                finite("center", *center)
            }
            PotentialSpec::Sum { members } => {
                if members.is_empty() {
                    return Err(Error::config(key, "sum potential has no members"));
                }
                members
                    .iter()
                    .enumerate()
                    .try_for_each(|(i, m)| m.validate(&format!("{key}.{i}")))
            }
            PotentialSpec::Tabulated { positions, values } => {
                if positions.len() < 2 || positions.len() != values.len() {
                    return Err(Error::config(
                        format!("{key}.values"),
                        "tabulated potential needs >= 2 positions and one value per position",
                    ));
                }
                if positions.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::config(
                        format!("{key}.positions"),
                        "positions must be strictly increasing",
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config(format!("{key}.values"), "values must be finite"));
                }
                Ok(())
            }
        }
    }

    /// Checks that a tabulated profile (at any depth) covers every grid point.
    pub fn check_covers<T: Real>(&self, grid: &SpatialGrid<T>, key: &str) -> Result<()> {
        match self {
            PotentialSpec::Tabulated { positions, .. } => {
                let lo = grid.x_min().as_f64();
                let hi = grid.positions().last().map_or(lo, |x| x.as_f64());
                if positions[0] > lo || positions[positions.len() - 1] < hi {
                    Err(Error::config(
                        format!("{key}.positions"),
                        format!(
                            "table [{}, {}] does not cover grid [{lo}, {hi}]",
                            positions[0],
                            positions[positions.len() - 1]
                        ),
                    ))
                } else {
                    Ok(())
                }
            }
            PotentialSpec::Sum { members } => members
                .iter()
                .enumerate()
                .try_for_each(|(i, m)| m.check_covers(grid, &format!("{key}.{i}"))),
            _ => Ok(()),
        }
    }

    /// Spatial extent `[left, right]` treated as "the barrier" when
    /// partitioning the domain into reflected and transmitted regions.
    /// `None` for a free particle.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            PotentialSpec::Free => None,
            PotentialSpec::Rectangular { width, center, .. } => Some((center - width / 2.0, center + width / 2.0)),
            PotentialSpec::Gaussian { sigma_v, center, .. } => {
                let h = GAUSSIAN_SUPPORT_SIGMAS * sigma_v;
                Some((center - h, center + h))
            }
            PotentialSpec::Sum { members } => members
                .iter()
                .filter_map(|m| m.support())
                .reduce(|(l0, r0), (l1, r1)| (l0.min(l1), r0.max(r1))),
            PotentialSpec::Tabulated { positions, values } => {
                let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if peak == 0.0 {
                    return None;
                }
                let cut = TABULATED_SUPPORT_FRACTION * peak;
                let first = values.iter().position(|v| v.abs() >= cut)?;
                let last = values.iter().rposition(|v| v.abs() >= cut)?;
                Some((positions[first], positions[last]))
            }
        }
    }

    /// Location and height of the barrier maximum.
    pub fn peak(&self) -> Option<(f64, f64)> {
        match self {
            PotentialSpec::Free => None,
            PotentialSpec::Rectangular { v0, center, .. } => Some((*center, *v0)),
            PotentialSpec::Gaussian { v0, center, .. } => Some((*center, *v0)),
            PotentialSpec::Tabulated { positions, values } => positions
                .iter()
                .zip(values)
                .map(|(&x, &v)| (x, v))
                .reduce(|a, b| if b.1 > a.1 { b } else { a }),
            PotentialSpec::Sum { .. } => {
                let (lo, hi) = self.scan_extent()?;
                let n = (((hi - lo) / 1e-3).ceil() as usize).clamp(2, 2_000_000);
                (0..=n)
                    .map(|i| {
                        let x = lo + (hi - lo) * i as f64 / n as f64;
                        (x, self.eval::<f64>(x))
                    })
                    .reduce(|a, b| if b.1 > a.1 { b } else { a })
            }
        }
    }

    /// Generous extent outside which the profile is negligible.
    fn scan_extent(&self) -> Option<(f64, f64)> {
        match self {
            PotentialSpec::Gaussian { sigma_v, center, .. } => Some((center - 8.0 * sigma_v, center + 8.0 * sigma_v)),
            PotentialSpec::Sum { members } => members
                .iter()
                .filter_map(|m| m.scan_extent())
                .reduce(|(l0, r0), (l1, r1)| (l0.min(l1), r0.max(r1))),
            PotentialSpec::Tabulated { positions, .. } => Some((positions[0], positions[positions.len() - 1])),
            other => other.support(),
        }
    }
}

/// Evaluates `spec` at every grid point at time `t`.
///
/// `t` is accepted for time-dependent profiles; every shipped variant is static.
pub fn sample_potential<T: Real>(spec: &PotentialSpec, grid: &SpatialGrid<T>, _t: T) -> Result<Vec<T>> {
    spec.check_covers(grid, "potential")?;
    Ok(grid.positions().iter().map(|&x| spec.eval(x)).collect())
}
