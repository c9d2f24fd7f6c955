//! End-to-end steps shared by the command line and the test suites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::config::SimulationConfig;
use crate::observables::{scattering_coefficients, ScatteringReport};
use crate::phase_space::{phase_space_report, PhaseSpaceReport};
use crate::propagator::Trajectory;
use crate::scalar::Real;
use crate::stats::{
    compare, stratified_sample, summarize, ComparisonReport, DistributionSummary, Provenance, SamplingPolicy,
};

/// T/R from the final frame, A from the mask bookkeeping.
pub fn scattering_report<T: Real>(config: &SimulationConfig, trajectory: &Trajectory<T>) -> Result<ScatteringReport> {
    let grid = config.build_grid::<T>()?;
    let partition = config.partition(&grid)?;
    let state = trajectory
        .final_state()
        .ok_or_else(|| Error::Contract("trajectory has no frames".into()))?;
    let absorbed = config.absorber.map(|_| trajectory.absorbed.as_f64());
    scattering_coefficients(&state, &grid, &partition, absorbed.or(Some(0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAnalysis {
    pub sampling: Provenance,
    pub density: DistributionSummary,
    pub phase_space: PhaseSpaceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    pub sampling_a: Provenance,
    pub sampling_b: Provenance,
    pub comparison: ComparisonReport,
    pub phase_space_a: PhaseSpaceReport,
    pub phase_space_b: PhaseSpaceReport,
}

pub fn analyze_run(
    trajectory: &Trajectory<f64>,
    policy: &SamplingPolicy,
    grid_bins: usize,
    run_id: &str,
) -> Result<RunAnalysis> {
    let sample = stratified_sample(trajectory, policy, run_id)?;
    Ok(RunAnalysis {
        density: summarize(&sample.densities())?,
        phase_space: phase_space_report(&sample.phase_points(), grid_bins)?,
        sampling: sample.provenance,
    })
}

/// Both runs are sampled under the same policy, so a run compared with
/// itself yields identical samples.
pub fn compare_runs(
    a: (&Trajectory<f64>, &str),
    b: (&Trajectory<f64>, &str),
    policy: &SamplingPolicy,
    grid_bins: usize,
) -> Result<RunComparison> {
    let sa = stratified_sample(a.0, policy, a.1)?;
    let sb = stratified_sample(b.0, policy, b.1)?;
    Ok(RunComparison {
        comparison: compare(&sa.densities(), &sb.densities())?,
        phase_space_a: phase_space_report(&sa.phase_points(), grid_bins)?,
        phase_space_b: phase_space_report(&sb.phase_points(), grid_bins)?,
        sampling_a: sa.provenance,
        sampling_b: sb.provenance,
    })
}
