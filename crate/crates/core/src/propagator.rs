//! Symmetric split-operator propagation with a boundary mask and optional
//! pure dephasing.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::io::config::SimulationConfig;
use crate::observables::energies_with;
use crate::potential::sample_potential;
use crate::scalar::Real;
use crate::spectral::Spectral;
use crate::wavepacket::{gaussian_packet, WavefunctionState};

/// Seed used when a config or command line does not supply one.
pub const DEFAULT_SEED: u64 = 20_251_015;

/// Frames kept per run when the snapshot stride is left on automatic.
pub const TARGET_FRAMES: usize = 200;

/// Random stream owned by one evolution.
pub type DephasingRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorberSpec {
    pub layer_width: f64,
    pub strength: f64,
}

impl Default for AbsorberSpec {
    fn default() -> Self {
        Self {
            layer_width: 3.0,
            strength: 0.05,
        }
    }
}

impl AbsorberSpec {
    pub fn validate<T: Real>(&self, grid: &SpatialGrid<T>) -> Result<()> {
        if !(self.strength > 0.0 && self.strength < 1.0) {
            return Err(Error::config(
                "absorber.strength",
                format!("{} is outside (0, 1)", self.strength),
            ));
        }
        let half = 0.5 * grid.length().as_f64();
        if !(self.layer_width > 0.0 && self.layer_width < half) {
            return Err(Error::config(
                "absorber.layer_width",
                format!("{} is outside (0, {half})", self.layer_width),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingSpec {
    pub gamma: f64,
    pub seed: u64,
}

impl Default for DephasingSpec {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            seed: DEFAULT_SEED,
        }
    }
}

impl DephasingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::config(
                "dephasing.gamma",
                format!("must be >= 0, got {}", self.gamma),
            ));
        }
        Ok(())
    }

    pub fn is_active(&self) -> bool {
        self.gamma > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSteppingSpec {
    pub dt: f64,
    pub t_final: f64,
    /// `None` keeps about [`TARGET_FRAMES`] frames.
    pub snapshot_stride: Option<usize>,
}

impl TimeSteppingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(
                "stepping.dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::config(
                "stepping.t_final",
                format!("must be >= dt, got {}", self.t_final),
            ));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::config("stepping.snapshot_stride", "must be positive"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn stride(&self) -> usize {
        self.snapshot_stride
            .unwrap_or_else(|| (self.n_steps() / TARGET_FRAMES).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    pub time: T,
    pub amplitudes: Vec<Complex<T>>,
}

/// Scalar diagnostics recorded after every step (and once for the initial state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord<T> {
    pub time: T,
    pub norm: T,
    pub kinetic: T,
    pub potential: T,
    pub center_of_mass: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub x_min: T,
    pub dx: T,
    pub frames: Vec<Frame<T>>,
    pub scalars: Vec<StepRecord<T>>,
    /// Probability removed by the mask over the run.
    pub absorbed: T,
}

impl<T: Real> Trajectory<T> {
    pub fn n_points(&self) -> usize {
        self.frames.first().map_or(0, |f| f.amplitudes.len())
    }

    pub fn final_frame(&self) -> Option<&Frame<T>> {
        self.frames.last()
    }

    pub fn final_state(&self) -> Option<WavefunctionState<T>> {
        self.final_frame()
            .map(|f| WavefunctionState::new(f.amplitudes.clone(), f.time))
    }

    /// Norm lost between the first and last scalar records.
    pub fn norm_loss(&self) -> T {
        match (self.scalars.first(), self.scalars.last()) {
            (Some(a), Some(b)) => a.norm - b.norm,
            _ => T::zero(),
        }
    }
}

/// Boundary mask: 1 in the interior, falling to `1 - s` at the domain edges as
/// `1 - s [1 - cos⁴(π ξ / 2)]`, with ξ the fractional depth into the layer.
pub fn build_mask<T: Real>(absorber: &AbsorberSpec, grid: &SpatialGrid<T>) -> Vec<T> {
    let width = T::lit(absorber.layer_width);
    let s = T::lit(absorber.strength);
    let left = grid.x_min() + width;
    let right = grid.x_max() - width;
    let half_pi = T::FRAC_PI_2();
    grid.positions()
        .iter()
        .map(|&x| {
            let depth = if x < left {
                (left - x) / width
            } else if x > right {
                (x - right) / width
            } else {
                return T::one();
            };
            let c = (half_pi * depth.min(T::one())).cos();
            let c2 = c * c;
            T::one() - s * (T::one() - c2 * c2)
        })
        .collect()
}

/// `exp(-i k² dt / 2m)` on the transform-ordered wavenumbers.
pub fn kinetic_phase<T: Real>(grid: &SpatialGrid<T>, dt: T, mass: T) -> Vec<Complex<T>> {
    let two_m = T::lit(2.0) * mass;
    grid.wavenumbers()
        .values()
        .iter()
        .map(|&k| Complex::from_polar(T::one(), -k * k * dt / two_m))
        .collect()
}

fn half_potential_phase<T: Real>(potential: &[T], dt: T) -> Vec<Complex<T>> {
    let half = dt * T::lit(0.5);
    potential
        .iter()
        .map(|&v| Complex::from_polar(T::one(), -v * half))
        .collect()
}

/// Multiplies each amplitude by `exp(i φ_j)`, `φ_j ~ N(0, 2 γ dt)`.
/// With `gamma == 0` the state is untouched and no numbers are drawn.
pub fn apply_dephasing<T: Real, R: Rng + ?Sized>(state: &mut WavefunctionState<T>, gamma: f64, dt: f64, rng: &mut R) {
    if gamma <= 0.0 {
        return;
    }
    let sd = (2.0 * gamma * dt).sqrt();
    for z in &mut state.amplitudes {
        let phi: f64 = rng.sample(StandardNormal);
        *z = *z * Complex::from_polar(T::one(), T::lit(sd * phi));
    }
}

/// Precomputed step operator for one grid, potential, mask and time step.
pub struct Propagator<T: Real> {
    spectral: Spectral<T>,
    kinetic: Vec<Complex<T>>,
    half_potential: Vec<Complex<T>>,
    mask: Option<Vec<T>>,
    dx: T,
    dt: T,
    mass: T,
}

impl<T: Real> Propagator<T> {
    /// `dt` may be negative for backward propagation.
    pub fn new(grid: &SpatialGrid<T>, potential: &[T], mass: T, mask: Option<Vec<T>>, dt: T) -> Result<Self> {
        let n = grid.len();
        if potential.len() != n || mask.as_ref().is_some_and(|m| m.len() != n) {
            return Err(Error::Contract("potential and mask must match the grid length".into()));
        }
        Ok(Self {
            spectral: Spectral::new(grid),
            kinetic: kinetic_phase(grid, dt, mass),
            half_potential: half_potential_phase(potential, dt),
            mask,
            dx: grid.dx(),
            dt,
            mass,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn kinetic_phase(&self) -> &[Complex<T>] {
        &self.kinetic
    }

    /// Replaces the sampled potential, e.g. for a time-dependent profile.
    pub fn set_potential(&mut self, potential: &[T]) {
        self.half_potential = half_potential_phase(potential, self.dt);
    }

    /// One Strang step `e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}` followed by the
    /// mask. Returns the probability removed by the mask.
    pub fn step(&mut self, state: &mut WavefunctionState<T>) -> T {
        let psi = &mut state.amplitudes;
        for (z, p) in psi.iter_mut().zip(&self.half_potential) {
            *z = *z * p;
        }
        self.spectral.forward(psi);
        for (z, p) in psi.iter_mut().zip(&self.kinetic) {
            *z = *z * p;
        }
        self.spectral.inverse(psi);
        let scale = self.spectral.inv_n();
        for (z, p) in psi.iter_mut().zip(&self.half_potential) {
            *z = *z * p * scale;
        }
        state.time = state.time + self.dt;

        let Some(mask) = &self.mask else {
            return T::zero();
        };
        let mut lost = T::zero();
        for (z, &m) in psi.iter_mut().zip(mask) {
            if m < T::one() {
                let before = z.norm_sqr();
                *z = *z * m;
                lost = lost + (before - z.norm_sqr());
            }
        }
        lost * self.dx
    }

    fn record(&mut self, state: &WavefunctionState<T>, potential: &[T], x: &[T]) -> StepRecord<T> {
        let (kinetic, pot) = energies_with(&mut self.spectral, state, self.dx, potential, self.mass);
        let norm = state.densities().fold(T::zero(), |a, b| a + b) * self.dx;
        let grid_com = {
            let w = state.densities().fold(T::zero(), |a, b| a + b);
            if w > T::zero() {
                x.iter().zip(state.densities()).fold(T::zero(), |a, (&x, p)| a + x * p) / w
            } else {
                T::nan()
            }
        };
        StepRecord {
            time: state.time,
            norm,
            kinetic,
            potential: pot,
            center_of_mass: grid_com,
        }
    }
}

/// Runs a validated configuration to completion.
pub fn evolve<T: Real>(config: &SimulationConfig) -> Result<Trajectory<T>> {
    config.validate()?;
    let grid = config.build_grid::<T>()?;
    let mass = T::lit(config.units.mass);
    let dt = T::lit(config.stepping.dt);
    let n_steps = config.stepping.n_steps();
    let stride = config.stepping.stride();

    for w in config.wavepacket.diagnostics(&grid, config.absorber.as_ref()) {
        log::warn!("{w}");
    }
    let mut state = gaussian_packet(&config.wavepacket, &grid)?;
    let mut potential = sample_potential(&config.potential, &grid, T::zero())?;
    let mask = config.absorber.as_ref().map(|a| build_mask(a, &grid));
    let mut prop = Propagator::new(&grid, &potential, mass, mask, dt)?;

    let dephasing = config.dephasing;
    let mut rng = DephasingRng::seed_from_u64(dephasing.seed);
    let time_dependent = config.potential.is_time_dependent();

    let mut frames = vec![Frame {
        time: state.time,
        amplitudes: state.amplitudes.clone(),
    }];
    let mut scalars = Vec::with_capacity(n_steps + 1);
    scalars.push(prop.record(&state, &potential, grid.positions()));
    let mut absorbed = T::zero();

    for step in 1..=n_steps {
        if time_dependent {
            let t_mid = state.time + dt * T::lit(0.5);
            potential = sample_potential(&config.potential, &grid, t_mid)?;
            prop.set_potential(&potential);
        }
        absorbed = absorbed + prop.step(&mut state);
        apply_dephasing(&mut state, dephasing.gamma, config.stepping.dt, &mut rng);
        state.time = T::from_usize_lossy(step) * dt;

        let record = prop.record(&state, &potential, grid.positions());
        if !record.norm.is_finite() || !record.kinetic.is_finite() {
            return Err(Error::Propagation {
                step,
                message: "non-finite amplitude encountered".into(),
            });
        }
        scalars.push(record);
        if step % stride == 0 || step == n_steps {
            frames.push(Frame {
                time: state.time,
                amplitudes: state.amplitudes.clone(),
            });
        }
    }

    Ok(Trajectory {
        x_min: grid.x_min(),
        dx: grid.dx(),
        frames,
        scalars,
        absorbed,
    })
}
