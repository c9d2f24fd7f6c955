//! Gaussian minimum-uncertainty initial states.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::propagator::AbsorberSpec;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub x0: f64,
    pub k0: f64,
    pub sigma: f64,
}

/// Complex amplitudes on a grid at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionState<T> {
    pub amplitudes: Vec<Complex<T>>,
    pub time: T,
}

impl<T: Real> WavefunctionState<T> {
    pub fn new(amplitudes: Vec<Complex<T>>, time: T) -> Self {
        Self { amplitudes, time }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn densities(&self) -> impl Iterator<Item = T> + '_ {
        self.amplitudes.iter().map(|z| z.norm_sqr())
    }
}

impl WavepacketSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config(
                "wavepacket.sigma",
                format!("must be positive, got {}", self.sigma),
            ));
        }
        if !self.x0.is_finite() {
            return Err(Error::config("wavepacket.x0", "must be finite"));
        }
        if !self.k0.is_finite() {
            return Err(Error::config("wavepacket.k0", "must be finite"));
        }
        Ok(())
    }

    /// Non-fatal placement and resolution problems for this packet on `grid`.
    pub fn diagnostics<T: Real>(&self, grid: &SpatialGrid<T>, absorber: Option<&AbsorberSpec>) -> Vec<String> {
        let mut out = Vec::new();
        let (lo, hi) = (grid.x_min().as_f64(), grid.x_max().as_f64());
        let dx = grid.dx().as_f64();
        if self.x0 - 4.0 * self.sigma < lo || self.x0 + 4.0 * self.sigma > hi {
            out.push(format!(
                "packet centre {} is within 4 sigma ({}) of the domain edge",
                self.x0,
                4.0 * self.sigma
            ));
        }
        if self.sigma < 10.0 * dx {
            out.push(format!("sigma = {} is below 10 dx = {}", self.sigma, 10.0 * dx));
        }
        let nyquist = std::f64::consts::PI / dx;
        if self.k0.abs() > 0.5 * nyquist {
            out.push(format!(
                "|k0| = {} exceeds half the Nyquist wavenumber {}",
                self.k0.abs(),
                nyquist
            ));
        }
        if let Some(abs) = absorber {
            let overlap = self.probability_outside(lo + abs.layer_width, hi - abs.layer_width);
            if overlap > 1e-6 {
                out.push(format!(
                    "packet places {overlap:.3e} of its probability inside the absorber layers"
                ));
            }
        }
        out
    }

    /// Continuum probability of the initial density outside `[a, b]`.
    fn probability_outside(&self, a: f64, b: f64) -> f64 {
        use statrs::function::erf::erfc;
        // |psi|^2 is normal with standard deviation sigma.
        let s = self.sigma * std::f64::consts::SQRT_2;
        0.5 * erfc((self.x0 - a) / s) + 0.5 * erfc((b - self.x0) / s)
    }
}

/// Samples `(2πσ²)^{-1/4} exp(-(x-x0)²/4σ² + i k0 x)` and rescales to unit
/// discrete norm.
pub fn gaussian_packet<T: Real>(spec: &WavepacketSpec, grid: &SpatialGrid<T>) -> Result<WavefunctionState<T>> {
    spec.validate()?;
    for w in spec.diagnostics(grid, None) {
        log::warn!("{w}");
    }
    let x0 = T::lit(spec.x0);
    let k0 = T::lit(spec.k0);
    let sigma = T::lit(spec.sigma);
    let amp = (T::TAU() * sigma * sigma).powf(T::lit(-0.25));
    let four_var = T::lit(4.0) * sigma * sigma;
    let mut amplitudes: Vec<Complex<T>> = grid
        .positions()
        .iter()
        .map(|&x| {
            let d = x - x0;
            Complex::from_polar(amp * (-(d * d) / four_var).exp(), k0 * x)
        })
        .collect();
    let norm: T = amplitudes.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b) * grid.dx();
    if !(norm > T::zero()) {
        return Err(Error::Undefined(
            "gaussian packet has zero discrete norm on this grid".into(),
        ));
    }
    let scale = norm.sqrt().recip();
    for z in &mut amplitudes {
        *z = *z * scale;
    }
    Ok(WavefunctionState::new(amplitudes, T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::observables::{center_of_mass, mean_wavenumber, norm, position_spread};
    use approx::assert_relative_eq;

    fn case1() -> WavepacketSpec {
        WavepacketSpec {
            x0: -8.0,
            k0: 4.0,
            sigma: 0.8,
        }
    }

    #[test]
    fn unit_discrete_norm() {
        let g = make_grid::<f64>(-30.0, 30.0, 2048).unwrap();
        let s = gaussian_packet(&case1(), &g).unwrap();
        assert!((norm(&s, &g) - 1.0).abs() < 1e-12);
        assert_eq!(s.time, 0.0);
    }

    #[test]
    fn real_centered_packet() {
        let g = make_grid::<f64>(-20.0, 20.0, 1024).unwrap();
        let s = gaussian_packet(
            &WavepacketSpec {
                x0: 0.0,
                k0: 0.0,
                sigma: 1.0,
            },
            &g,
        )
        .unwrap();
        assert!(s.amplitudes.iter().all(|z| z.im == 0.0 && z.re > 0.0));
        assert!(center_of_mass(&s, &g).unwrap().abs() < 1e-12);
        assert!((norm(&s, &g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moments_match_parameters() {
        let g = make_grid::<f64>(-30.0, 30.0, 2048).unwrap();
        for spec in [
            case1(),
            WavepacketSpec {
                x0: -8.0,
                k0: 3.5,
                sigma: 0.6,
            },
        ] {
            let s = gaussian_packet(&spec, &g).unwrap();
            assert!((center_of_mass(&s, &g).unwrap() - spec.x0).abs() <= g.dx() / 2.0);
            assert_relative_eq!(mean_wavenumber(&s, &g), spec.k0, max_relative = 1e-6);
            assert_relative_eq!(position_spread(&s, &g).unwrap(), spec.sigma, max_relative = 1e-2);
        }
    }

    #[test]
    fn diagnostics_flag_problems() {
        let g = make_grid::<f64>(-30.0, 30.0, 2048).unwrap();
        assert!(case1().diagnostics(&g, Some(&AbsorberSpec::default())).is_empty());
        let near_edge = WavepacketSpec {
            x0: -28.0,
            k0: 4.0,
            sigma: 0.8,
        };
        let d = near_edge.diagnostics(&g, Some(&AbsorberSpec::default()));
        assert!(d.iter().any(|m| m.contains("4 sigma")));
        assert!(d.iter().any(|m| m.contains("absorber")));
        let narrow = WavepacketSpec {
            x0: 0.0,
            k0: 80.0,
            sigma: 0.1,
        };
        assert_eq!(narrow.diagnostics(&g, None).len(), 2);
    }

    #[test]
    fn rejects_nonpositive_sigma() {
        let g = make_grid::<f64>(-30.0, 30.0, 64).unwrap();
        let err = gaussian_packet(
            &WavepacketSpec {
                x0: 0.0,
                k0: 0.0,
                sigma: 0.0,
            },
            &g,
        )
        .unwrap_err();
        assert!(err.to_string().contains("wavepacket.sigma"));
    }
}
