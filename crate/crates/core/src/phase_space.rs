//! Statistics of sampled amplitudes as points in the (Re ψ, Im ψ) plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{entropy_bits, Provenance};

pub const DEFAULT_GRID_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePointSet {
    pub points: Vec<(f64, f64)>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceReport {
    pub circular_variance: f64,
    pub resultant_length: f64,
    pub pci: f64,
    pub eigenvalues: (f64, f64),
    pub anisotropy: f64,
    pub grid_bins: usize,
    pub entropy_2d_bits: f64,
    pub mutual_information_bits: f64,
    pub hull_area: f64,
}

fn require_nonempty(points: &[(f64, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Contract("phase-space measures need at least one point".into()));
    }
    Ok(())
}

/// Length of the mean unit phasor over nonzero points.
pub fn resultant_length(points: &[(f64, f64)]) -> Result<f64> {
    let (mut c, mut s, mut n) = (0.0, 0.0, 0usize);
    for &(re, im) in points {
        let r = re.hypot(im);
        if r > 0.0 {
            c += re / r;
            s += im / r;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Undefined(
            "every point has zero amplitude; phase is undefined".into(),
        ));
    }
    Ok((c.hypot(s) / n as f64).min(1.0))
}

/// `1 - |mean e^{iθ}|`; zero-amplitude points carry no angle and are skipped.
pub fn circular_variance(points: &[(f64, f64)]) -> Result<f64> {
    Ok(1.0 - resultant_length(points)?)
}

/// `|mean ψ| / mean |ψ|`.
pub fn phase_coherence_index(points: &[(f64, f64)]) -> Result<f64> {
    require_nonempty(points)?;
    let (mut re, mut im, mut modulus) = (0.0, 0.0, 0.0);
    for &(a, b) in points {
        re += a;
        im += b;
        modulus += a.hypot(b);
    }
    if modulus <= 0.0 {
        return Err(Error::Undefined("mean amplitude is zero".into()));
    }
    Ok((re.hypot(im) / modulus).min(1.0))
}

/// Eigenvalues `λ₁ ≥ λ₂` of the population covariance of (re, im).
pub fn covariance_eigenvalues(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    require_nonempty(points)?;
    let n = points.len() as f64;
    let (mr, mi) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mr, mi) = (mr / n, mi / n);
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for &(re, im) in points {
        let (dr, di) = (re - mr, im - mi);
        a += dr * dr;
        b += dr * di;
        c += di * di;
    }
    let (a, b, c) = (a / n, b / n, c / n);
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    Ok((half_trace + disc, (half_trace - disc).max(0.0)))
}

/// `(λ₁ - λ₂) / (λ₁ + λ₂)`.
pub fn anisotropy(points: &[(f64, f64)]) -> Result<f64> {
    let (l1, l2) = covariance_eigenvalues(points)?;
    if l1 + l2 <= 0.0 {
        return Err(Error::Undefined("zero total variance".into()));
    }
    Ok(((l1 - l2) / (l1 + l2)).clamp(0.0, 1.0))
}

fn axis(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn bin(v: f64, (lo, hi): (f64, f64), bins: usize) -> usize {
    (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1)
}

/// Joint probabilities on a `bins × bins` lattice spanning the bounding box,
/// row-major in (re, im).
fn lattice(points: &[(f64, f64)], bins: usize) -> Result<Vec<f64>> {
    if bins < 4 {
        return Err(Error::Contract(format!(
            "lattice needs at least 4 bins per axis, got {bins}"
        )));
    }
    require_nonempty(points)?;
    let rx = axis(points.iter().map(|p| p.0));
    let ry = axis(points.iter().map(|p| p.1));
    let mut counts = vec![0u64; bins * bins];
    for &(re, im) in points {
        counts[bin(re, rx, bins) * bins + bin(im, ry, bins)] += 1;
    }
    let n = points.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

fn marginal_entropies(joint: &[f64], bins: usize) -> (f64, f64) {
    let mut px = vec![0.0; bins];
    let mut py = vec![0.0; bins];
    for i in 0..bins {
        for j in 0..bins {
            px[i] += joint[i * bins + j];
            py[j] += joint[i * bins + j];
        }
    }
    (entropy_bits(&px), entropy_bits(&py))
}

pub fn entropy_2d(points: &[(f64, f64)], grid_bins: usize) -> Result<f64> {
    Ok(entropy_bits(&lattice(points, grid_bins)?))
}

/// `H(re) + H(im) - H(re, im)` on the same lattice.
pub fn mutual_information(points: &[(f64, f64)], grid_bins: usize) -> Result<f64> {
    let joint = lattice(points, grid_bins)?;
    let (hx, hy) = marginal_entropies(&joint, grid_bins);
    Ok((hx + hy - entropy_bits(&joint)).max(0.0))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Hull vertices in counter-clockwise order (Andrew's monotone chain),
/// collinear boundary points dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for &q in &p {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(q);
    }
    let lower_len = hull.len() + 1;
    for &q in p.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(q);
    }
    hull.pop();
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    0.5 * twice.abs()
}

/// Area of the convex hull; 0 for collinear input.
pub fn convex_hull_area(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Contract(format!(
            "hull area needs at least 3 points, got {}",
            points.len()
        )));
    }
    Ok(polygon_area(&convex_hull(points)))
}

pub fn phase_space_report(set: &PhasePointSet, grid_bins: usize) -> Result<PhaseSpaceReport> {
    let p = &set.points;
    let r = resultant_length(p)?;
    let joint = lattice(p, grid_bins)?;
    let (hx, hy) = marginal_entropies(&joint, grid_bins);
    let h = entropy_bits(&joint);
    Ok(PhaseSpaceReport {
        circular_variance: 1.0 - r,
        resultant_length: r,
        pci: phase_coherence_index(p)?,
        eigenvalues: covariance_eigenvalues(p)?,
        anisotropy: anisotropy(p)?,
        grid_bins,
        entropy_2d_bits: h,
        mutual_information_bits: (hx + hy - h).max(0.0),
        hull_area: convex_hull_area(p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn polar(r: f64, t: f64) -> (f64, f64) {
        (r * t.cos(), r * t.sin())
    }

    fn cloud(n: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (rng.random_range(-1.0..1.0) * 0.3 + 0.05, rng.random_range(-0.5..1.0)))
            .collect()
    }

    #[test]
    fn circular_cases() {
        let same: Vec<_> = (1..5).map(|r| polar(r as f64, PI / 3.0)).collect();
        assert!(circular_variance(&same).unwrap().abs() < 1e-15);
        let cross: Vec<_> = (0..4).map(|k| polar(1.0, k as f64 * FRAC_PI_2)).collect();
        assert!((circular_variance(&cross).unwrap() - 1.0).abs() < 1e-15);
        let mut with_zero = same.clone();
        with_zero.push((0.0, 0.0));
        assert_eq!(
            circular_variance(&with_zero).unwrap(),
            circular_variance(&same).unwrap()
        );
        assert!(matches!(circular_variance(&[(0.0, 0.0)]), Err(Error::Undefined(_))));
    }

    #[test]
    fn pci_cases() {
        assert_relative_eq!(phase_coherence_index(&[(0.3, -0.2); 10]).unwrap(), 1.0);
        assert_eq!(phase_coherence_index(&[(0.3, -0.2), (-0.3, 0.2)]).unwrap(), 0.0);
        assert!(matches!(
            phase_coherence_index(&[(0.0, 0.0); 3]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn anisotropy_cases() {
        let line: Vec<_> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert_eq!(anisotropy(&line).unwrap(), 1.0);
        let ring: Vec<_> = (0..1000).map(|k| polar(2.0, 2.0 * PI * k as f64 / 1000.0)).collect();
        assert!(anisotropy(&ring).unwrap() < 1e-2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let random_ring: Vec<_> = (0..100_000)
            .map(|_| polar(1.0, rng.random_range(0.0..2.0 * PI)))
            .collect();
        assert!(anisotropy(&random_ring).unwrap() < 1e-2);
        assert!(matches!(anisotropy(&[(1.0, 1.0); 4]), Err(Error::Undefined(_))));
    }

    #[test]
    fn eigenvalues_match_direct_solution() {
        // cov = [[2, 1], [1, 2]] has eigenvalues 3 and 1.
        let pts = [
            (1.0, 1.0),
            (-1.0, -1.0),
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
        ];
        let (l1, l2) = covariance_eigenvalues(&pts).unwrap();
        let n = 6.0;
        let (a, b, c) = (4.0 / n, 2.0 / n, 4.0 / n);
        assert_relative_eq!(l1 + l2, a + c, epsilon = 1e-15);
        assert_relative_eq!(l1 * l2, a * c - b * b, epsilon = 1e-15);
    }

    #[test]
    fn mutual_information_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let indep: Vec<_> = (0..100_000)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        // The plug-in estimate carries a positive bias of (B-1)^2 / (2 N ln 2)
        // bits, about 0.029 here, so zero is only reached after removing it.
        let bias = 63.0f64.powi(2) / (2.0 * 100_000.0 * std::f64::consts::LN_2);
        let mi = mutual_information(&indep, 64).unwrap();
        assert!((mi - bias).abs() < 0.02, "{mi}");
        assert!(mutual_information(&indep, 16).unwrap() < 0.02);
        let diag: Vec<_> = (0..10_000).map(|_| rng.random::<f64>()).map(|v| (v, v)).collect();
        let joint = lattice(&diag, 64).unwrap();
        let (hx, _) = marginal_entropies(&joint, 64);
        assert_relative_eq!(mutual_information(&diag, 64).unwrap(), hx, epsilon = 1e-12);
        assert!(entropy_2d(&diag, 3).is_err());
    }

    #[test]
    fn mi_bounded_by_marginals() {
        for seed in 0..20 {
            let pts = cloud(500, seed);
            let joint = lattice(&pts, 16).unwrap();
            let (hx, hy) = marginal_entropies(&joint, 16);
            let mi = mutual_information(&pts, 16).unwrap();
            assert!(mi >= 0.0 && mi <= hx.min(hy) + 1e-12);
        }
    }

    #[test]
    fn hull_cases() {
        let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert_eq!(convex_hull_area(&square).unwrap(), 1.0);
        let tri = [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (0.1, 0.1),
            (0.2, 0.3),
            (0.5, 0.5),
            (0.0, 0.5),
        ];
        assert_eq!(convex_hull_area(&tri).unwrap(), 0.5);
        assert_eq!(convex_hull(&tri).len(), 3);
        let line: Vec<_> = (0..5).map(|i| (i as f64, 2.0 * i as f64)).collect();
        assert_eq!(convex_hull_area(&line).unwrap(), 0.0);
        assert!(convex_hull_area(&square[..2]).is_err());
    }

    /// Quarter turns map the bounding-box lattice onto itself, so every
    /// measure is invariant; arbitrary angles are covered for the
    /// lattice-free measures.
    #[test]
    fn global_phase_invariance() {
        let pts = cloud(4000, 1);
        let rotate = |a: f64| -> Vec<(f64, f64)> {
            let (s, c) = a.sin_cos();
            pts.iter().map(|&(x, y)| (c * x - s * y, s * x + c * y)).collect()
        };
        let quarter: Vec<_> = pts.iter().map(|&(x, y)| (-y, x)).collect();
        let r0 = phase_space_report(
            &PhasePointSet {
                points: pts.clone(),
                provenance: prov(),
            },
            32,
        )
        .unwrap();
        let rq = phase_space_report(
            &PhasePointSet {
                points: quarter,
                provenance: prov(),
            },
            32,
        )
        .unwrap();
        assert!((r0.entropy_2d_bits - rq.entropy_2d_bits).abs() < 1e-10);
        assert!((r0.mutual_information_bits - rq.mutual_information_bits).abs() < 1e-10);
        for alpha in [0.3, 1.0, 2.5, -4.0] {
            let q = rotate(alpha);
            assert!((circular_variance(&q).unwrap() - r0.circular_variance).abs() < 1e-10);
            assert!((phase_coherence_index(&q).unwrap() - r0.pci).abs() < 1e-10);
            assert!((anisotropy(&q).unwrap() - r0.anisotropy).abs() < 1e-10);
            assert!((convex_hull_area(&q).unwrap() - r0.hull_area).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_covariance() {
        let pts = cloud(3000, 2);
        let c = 2.0; // power of two keeps lattice edges exact
        let scaled: Vec<_> = pts.iter().map(|&(x, y)| (c * x, c * y)).collect();
        let a = phase_space_report(
            &PhasePointSet {
                points: pts,
                provenance: prov(),
            },
            64,
        )
        .unwrap();
        let b = phase_space_report(
            &PhasePointSet {
                points: scaled,
                provenance: prov(),
            },
            64,
        )
        .unwrap();
        assert!((a.circular_variance - b.circular_variance).abs() < 1e-12);
        assert!((a.pci - b.pci).abs() < 1e-12);
        assert!((a.anisotropy - b.anisotropy).abs() < 1e-12);
        assert_eq!(a.mutual_information_bits, b.mutual_information_bits);
        assert_eq!(b.hull_area, c * c * a.hull_area);
    }

    fn prov() -> Provenance {
        Provenance {
            run_id: "t".into(),
            strata: "none".into(),
            seed: 0,
            density_floor: 0.0,
            requested: 0,
            drawn: 0,
        }
    }
}
