//! Plane-wave and semiclassical transmission references.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OverBarrier,
    SubBarrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PlaneWave,
    Wkb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceResult<T> {
    pub transmission: T,
    pub regime: Regime,
    pub method: Method,
}

/// Initial outward step when bracketing turning points.
const BRACKET_STEP: f64 = 1e-3;
const TURNING_POINT_TOL: f64 = 1e-10;
const QUADRATURE_RTOL: f64 = 1e-8;

/// `sin(u)/u` for real `u`, `sinh(u)/u` for the imaginary branch.
fn sinc<T: Real>(u: T) -> T {
    if u.abs() < T::lit(1e-4) {
        T::one() - u * u / T::lit(6.0)
    } else {
        u.sin() / u
    }
}

fn sinhc<T: Real>(u: T) -> T {
    if u.abs() < T::lit(1e-4) {
        T::one() + u * u / T::lit(6.0)
    } else {
        u.sinh() / u
    }
}

/// Transmission of a plane wave of energy `energy` through a rectangular
/// barrier of height `v0` and width `width`.
///
/// Written as `[1 + m V₀² a² f(qa)² / (2E)]⁻¹` with `f = sinc` above the
/// barrier and `sinhc` below, which reduces to the usual `sin²`/`sinh²` forms
/// and stays continuous through `E = V₀`.
pub fn plane_wave_transmission<T: Real>(energy: T, v0: T, width: T, mass: T) -> Result<ReferenceResult<T>> {
    if !(energy > T::zero()) || !energy.is_finite() {
        return Err(Error::Contract(format!("energy must be positive, got {energy}")));
    }
    if !(width > T::zero()) || !(mass > T::zero()) || v0 < T::zero() {
        return Err(Error::Contract(
            "width and mass must be positive and v0 non-negative".into(),
        ));
    }
    let two = T::lit(2.0);
    let (shape, regime) = if energy >= v0 {
        let q = (two * mass * (energy - v0)).sqrt();
        (sinc(q * width), Regime::OverBarrier)
    } else {
        let kappa = (two * mass * (v0 - energy)).sqrt();
        (sinhc(kappa * width), Regime::SubBarrier)
    };
    let term = mass * v0 * v0 * width * width * shape * shape / (two * energy);
    Ok(ReferenceResult {
        transmission: (T::one() + term).recip(),
        regime,
        method: Method::PlaneWave,
    })
}

/// Semiclassical estimate `exp(-2 ∫ √(2m(V - E)) dx)` between the classical
/// turning points around the barrier maximum. Only defined below the peak.
pub fn wkb_transmission<T: Real>(potential: &PotentialSpec, energy: T, mass: T) -> Result<ReferenceResult<T>> {
    if !(energy > T::zero()) {
        return Err(Error::Contract(format!("energy must be positive, got {energy}")));
    }
    let (x_peak, v_peak) = potential
        .peak()
        .ok_or_else(|| Error::Regime("potential has no barrier".into()))?;
    if energy >= T::lit(v_peak) {
        return Err(Error::Regime(format!(
            "energy {energy} is at or above the barrier maximum {v_peak}; turning points do not exist"
        )));
    }
    let (x1, x2) = turning_points(potential, energy, T::lit(x_peak))?;
    let two_m = T::lit(2.0) * mass;
    let integrand = |x: T| (two_m * (potential.eval(x) - energy)).max(T::zero()).sqrt();
    let action = adaptive_simpson(&integrand, x1, x2, T::lit(QUADRATURE_RTOL));
    Ok(ReferenceResult {
        transmission: (-T::lit(2.0) * action).exp(),
        regime: Regime::SubBarrier,
        method: Method::Wkb,
    })
}

/// Points `x1 < x_peak < x2` with `V(x) = E`, bracketed by walking outward in
/// growing steps and refined by bisection.
pub fn turning_points<T: Real>(potential: &PotentialSpec, energy: T, x_peak: T) -> Result<(T, T)> {
    let above = |x: T| potential.eval(x) > energy;
    let find = |dir: T| -> Result<T> {
        let mut step = T::lit(BRACKET_STEP);
        let mut inside = x_peak;
        let mut outside = x_peak + dir * step;
        let mut walked = 0usize;
        while above(outside) {
            inside = outside;
            walked += 1;
            if walked.is_multiple_of(1000) {
                step = step * T::lit(2.0);
            }
            outside = outside + dir * step;
            if walked > 200_000 || !outside.is_finite() {
                return Err(Error::Regime("no classical turning point found".into()));
            }
        }
        let tol = T::lit(TURNING_POINT_TOL);
        while (outside - inside).abs() > tol {
            let mid = (inside + outside) * T::lit(0.5);
            if above(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok((inside + outside) * T::lit(0.5))
    };
    Ok((find(-T::one())?, find(T::one())?))
}

/// Adaptive Simpson quadrature with a relative tolerance on the total.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, rtol: T) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // Absolute target from a coarse magnitude estimate.
    let scale = whole.abs().max(T::epsilon());
    recurse(f, a, b, fa, fm, fb, whole, rtol * scale, 60)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    recurse(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}
