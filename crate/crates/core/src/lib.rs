//! One-dimensional quantum tunneling with a split-operator spectral solver,
//! plus the statistics used to compare the resulting probability densities.
//!
//! Natural units throughout: ħ = m = 1, lengths labelled nm, energies eV and
//! times fs. The simulation core is generic over [`Real`] (`f32` or `f64`);
//! statistics and persistence work in `f64`.

// `!(x > 0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod io;
pub mod observables;
pub mod phase_space;
pub mod pipeline;
pub mod potential;
pub mod propagator;
pub mod reference;
pub mod scalar;
pub mod spectral;
pub mod stats;
pub mod wavepacket;

pub use error::{Error, Result};
pub use grid::{make_grid, wavenumbers, SpatialGrid, UnitSystem, WavenumberGrid};
pub use io::{load_config, load_trajectory, parse_config, save_trajectory, SimulationConfig};
pub use observables::{
    center_of_mass, energies, mean_wavenumber, norm, position_spread, probability_current, scattering_coefficients,
    Quality, RegionPartition, ScatteringReport,
};
pub use phase_space::{PhasePointSet, PhaseSpaceReport};
pub use pipeline::{analyze_run, compare_runs, scattering_report, RunAnalysis, RunComparison};
pub use potential::{sample_potential, PotentialSpec};
pub use propagator::{
    evolve, AbsorberSpec, DephasingSpec, Frame, Propagator, StepRecord, TimeSteppingSpec, Trajectory,
};
pub use reference::{plane_wave_transmission, wkb_transmission, Method, ReferenceResult, Regime};
pub use scalar::Real;
pub use stats::{ComparisonReport, HistogramSpec, SampleSet, SamplingPolicy, TestResult};
pub use wavepacket::{gaussian_packet, WavefunctionState, WavepacketSpec};

pub type SpatialGridF64 = SpatialGrid<f64>;
pub type SpatialGridF32 = SpatialGrid<f32>;
pub type WavefunctionStateF64 = WavefunctionState<f64>;
pub type WavefunctionStateF32 = WavefunctionState<f32>;
pub type PropagatorF64 = Propagator<f64>;
pub type PropagatorF32 = Propagator<f32>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type TrajectoryF32 = Trajectory<f32>;
