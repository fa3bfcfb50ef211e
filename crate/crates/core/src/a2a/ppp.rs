//! Poisson point process placement and nearest-neighbour tagging.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::domain::{distance, Point, SamplingDomain};
use super::A2aError;

/// One draw of sub-UAV positions around a central UAV.
#[derive(Debug, Clone, PartialEq)]
pub struct PppRealization {
    pub points: Vec<Point>,
    /// Index of the point nearest the central UAV.
    pub tagged_index: usize,
    pub distances: Vec<f64>,
}

impl PppRealization {
    pub fn from_points(points: Vec<Point>, central: &Point) -> Result<Self, A2aError> {
        if points.is_empty() {
            return Err(A2aError::EmptyRealization);
        }
        let distances: Vec<f64> = points.iter().map(|p| distance(p, central)).collect();
        let tagged_index = nearest_index(&distances);
        Ok(PppRealization {
            points,
            tagged_index,
            distances,
        })
    }

    pub fn tagged_distance(&self) -> f64 {
        self.distances[self.tagged_index]
    }
}

fn nearest_index(distances: &[f64]) -> usize {
    let mut best = 0;
    for (i, d) in distances.iter().enumerate() {
        if *d < distances[best] {
            best = i;
        }
    }
    best
}

/// Poisson count with the given mean. Zero mean yields zero.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize, A2aError> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|_| A2aError::Invalid {
        what: "expected point count",
        value: mean,
    })?;
    Ok(dist.sample(rng) as usize)
}

/// Uniform point in the domain.
pub fn uniform_point<R: Rng + ?Sized>(domain: &SamplingDomain, rng: &mut R) -> Point {
    match *domain {
        SamplingDomain::Box(v) => {
            let (lo, hi) = (v.lower(), v.upper());
            [
                lo[0] + (hi[0] - lo[0]) * rng.random::<f64>(),
                lo[1] + (hi[1] - lo[1]) * rng.random::<f64>(),
                lo[2] + (hi[2] - lo[2]) * rng.random::<f64>(),
            ]
        }
        SamplingDomain::Ball { center, radius } => {
            let r = radius * rng.random::<f64>().cbrt();
            let u = unit_vector(rng);
            [
                center[0] + r * u[0],
                center[1] + r * u[1],
                center[2] + r * u[2],
            ]
        }
    }
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Point {
    loop {
        let v: Point = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Exactly `count` uniform points in the domain.
pub fn sample_fixed<R: Rng + ?Sized>(
    domain: &SamplingDomain,
    count: usize,
    rng: &mut R,
) -> Vec<Point> {
    (0..count).map(|_| uniform_point(domain, rng)).collect()
}

/// PPP of the given intensity (per m³) over the domain, tagged to `central`.
pub fn sample_ppp<R: Rng + ?Sized>(
    domain: &SamplingDomain,
    intensity: f64,
    central: &Point,
    rng: &mut R,
) -> Result<PppRealization, A2aError> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(A2aError::Invalid {
            what: "intensity",
            value: intensity,
        });
    }
    let n = poisson_count(intensity * domain.volume(), rng)?;
    PppRealization::from_points(sample_fixed(domain, n, rng), central)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::a2a::domain::AirspaceVolume;
    use crate::rng;

    #[test]
    fn poisson_mean_count() {
        let v = AirspaceVolume::default();
        let dom = SamplingDomain::Box(v);
        let lambda = 20.0 / v.volume();
        let mut r = rng::stream(3, 0);
        let n = 100_000;
        let mut total = 0usize;
        for _ in 0..n {
            total += poisson_count(lambda * dom.volume(), &mut r).unwrap();
        }
        let mean = total as f64 / n as f64;
        let se = (20.0 / n as f64).sqrt();
        assert!((mean - 20.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn realization_is_deterministic_and_inside() {
        let v = AirspaceVolume::default();
        let dom = SamplingDomain::Box(v);
        let lambda = 20.0 / v.volume();
        let a = sample_ppp(&dom, lambda, &v.center(), &mut rng::stream(9, 1)).unwrap();
        let b = sample_ppp(&dom, lambda, &v.center(), &mut rng::stream(9, 1)).unwrap();
        assert_eq!(a, b);
        for (p, d) in a.points.iter().zip(&a.distances) {
            assert!(v.contains(p));
            assert_eq!(*d, distance(p, &v.center()));
        }
        assert!(a.distances.iter().all(|d| *d >= a.tagged_distance()));
    }

    #[test]
    fn empty_realization_is_reported() {
        assert_eq!(
            PppRealization::from_points(Vec::new(), &[0.0; 3]),
            Err(A2aError::EmptyRealization)
        );
        let dom = SamplingDomain::Ball {
            center: [0.0; 3],
            radius: 1.0,
        };
        let mut r = rng::stream(1, 0);
        let empties = (0..200)
            .filter(|_| {
                matches!(
                    sample_ppp(&dom, 1e-6, &[0.0; 3], &mut r),
                    Err(A2aError::EmptyRealization)
                )
            })
            .count();
        assert!(empties > 190);
    }

    #[test]
    fn ball_points_stay_inside() {
        let dom = SamplingDomain::Ball {
            center: [1.0, 2.0, 3.0],
            radius: 10.0,
        };
        let mut r = rng::stream(4, 0);
        for p in sample_fixed(&dom, 1_000, &mut r) {
            assert!(distance(&p, &[1.0, 2.0, 3.0]) <= 10.0);
        }
    }
}
