//! Monte Carlo coverage and mean-SINR engine.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{distance, A2aScenario, AirspaceVolume, Point, SamplingDomain};
use super::nearest::nearest_distance_quantile;
use super::ppp::{poisson_count, sample_fixed, sample_ppp, PppRealization};
use super::sinr::{sinr_with_gains, PowerFading};
use super::A2aError;
use crate::rng::{self, SimRng};
use crate::units::linear_to_db;

/// How the serving sub-UAV and its interferers are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Association {
    /// Box PPP; the point nearest the central UAV serves, the rest interfere.
    #[default]
    Nearest,
    /// Serving distance drawn from the unbounded nearest-neighbour law,
    /// interferers from an independent PPP over the whole box. This is the
    /// model the analytic coverage integral describes.
    Mixed,
}

/// Number of sub-UAVs per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountLaw {
    #[default]
    Poisson,
    /// Exactly this many points, ignoring the scenario density.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub association: Association,
    pub count: CountLaw,
    /// Trials per random stream. Results depend on it, never on threads.
    pub chunk: usize,
    /// Apply Gamma fading; off forces ρ = 1.
    pub fading: bool,
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            association: Association::Nearest,
            count: CountLaw::Poisson,
            chunk: 4_096,
            fading: true,
        }
    }

    pub fn with_association(mut self, association: Association) -> Self {
        self.association = association;
        self
    }

    pub fn with_count(mut self, count: CountLaw) -> Self {
        self.count = count;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum CoverageMethod {
    Analytic { evaluations: usize },
    MonteCarlo { trials: usize, empty: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageResult {
    pub p_cov: f64,
    pub method: CoverageMethod,
    /// `√(p(1−p)/n)` for Monte Carlo, zero for quadrature.
    pub std_error: f64,
}

/// Aggregate of many SINR draws.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SinrSample {
    pub trials: usize,
    /// Trials with no sub-UAV at all.
    pub empty: usize,
    /// Trials with SINR ≥ threshold.
    pub covered: usize,
    /// Mean of SINR in dB over non-empty trials.
    pub mean_sinr_db: f64,
    /// Standard error of `mean_sinr_db`.
    pub sinr_db_std_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    trials: usize,
    empty: usize,
    covered: usize,
    sum_db: f64,
    sum_sq_db: f64,
}

impl Tally {
    fn merge(mut self, o: &Tally) -> Tally {
        self.trials += o.trials;
        self.empty += o.empty;
        self.covered += o.covered;
        self.sum_db += o.sum_db;
        self.sum_sq_db += o.sum_sq_db;
        self
    }
}

/// Serving distance and interferer distances of one trial; `None` when no
/// sub-UAV exists.
fn draw_links(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &McConfig,
    rng: &mut SimRng,
) -> Result<Option<(Vec<f64>, usize)>, A2aError> {
    let domain = SamplingDomain::Box(*vol);
    let central = vol.center();
    let intensity = scen.density.intensity(vol.volume());
    match cfg.association {
        Association::Nearest => {
            let realization = match cfg.count {
                CountLaw::Poisson => sample_ppp(&domain, intensity, &central, rng),
                CountLaw::Fixed(n) => {
                    PppRealization::from_points(sample_fixed(&domain, n, rng), &central)
                }
            };
            match realization {
                Ok(r) => Ok(Some((r.distances, r.tagged_index))),
                Err(A2aError::EmptyRealization) => Ok(None),
                Err(e) => Err(e),
            }
        }
        Association::Mixed => {
            let serving = nearest_distance_quantile(rng.random::<f64>(), intensity)?;
            let n = match cfg.count {
                CountLaw::Poisson => poisson_count(intensity * vol.volume(), rng)?,
                CountLaw::Fixed(n) => n.saturating_sub(1),
            };
            let mut distances = Vec::with_capacity(n + 1);
            distances.push(serving);
            distances.extend(
                sample_fixed(&domain, n, rng)
                    .iter()
                    .map(|p: &Point| distance(p, &central)),
            );
            Ok(Some((distances, 0)))
        }
    }
}

fn run_chunk(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &McConfig,
    fading: &PowerFading,
    stream: u64,
    trials: usize,
) -> Result<Tally, A2aError> {
    let mut rng = rng::stream(cfg.seed, stream);
    let mut t = Tally {
        trials,
        ..Default::default()
    };
    let mut gains = Vec::new();
    for _ in 0..trials {
        let Some((distances, tagged)) = draw_links(scen, vol, cfg, &mut rng)? else {
            t.empty += 1;
            continue;
        };
        gains.clear();
        gains.extend((0..distances.len()).map(|_| fading.sample(&mut rng)));
        let g = sinr_with_gains(&distances, tagged, &gains, scen)?;
        if g >= scen.threshold {
            t.covered += 1;
        }
        let db = linear_to_db(g);
        t.sum_db += db;
        t.sum_sq_db += db * db;
    }
    Ok(t)
}

/// Runs `cfg.trials` independent trials in parallel chunks and reduces them
/// in chunk order.
pub fn simulate(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &McConfig,
) -> Result<SinrSample, A2aError> {
    scen.validate()?;
    if cfg.trials == 0 {
        return Err(A2aError::Invalid {
            what: "trial count",
            value: 0.0,
        });
    }
    let fading = if cfg.fading {
        PowerFading::new(scen.fading_shape)?
    } else {
        PowerFading::None
    };
    let tallies = rng::chunks(cfg.trials, cfg.chunk)
        .into_par_iter()
        .map(|(stream, n)| run_chunk(scen, vol, cfg, &fading, stream, n))
        .collect::<Result<Vec<_>, _>>()?;
    let t = tallies.iter().fold(Tally::default(), Tally::merge);
    let filled = t.trials - t.empty;
    let (mean, se) = if filled == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let m = t.sum_db / filled as f64;
        let var = (t.sum_sq_db / filled as f64 - m * m).max(0.0);
        (m, (var / filled as f64).sqrt())
    };
    Ok(SinrSample {
        trials: t.trials,
        empty: t.empty,
        covered: t.covered,
        mean_sinr_db: mean,
        sinr_db_std_error: se,
    })
}

/// Fraction of trials whose SINR reaches the threshold. Empty trials count
/// as not covered.
pub fn coverage_probability_mc(
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &McConfig,
) -> Result<CoverageResult, A2aError> {
    let s = simulate(scen, vol, cfg)?;
    let n = s.trials as f64;
    let p = s.covered as f64 / n;
    Ok(CoverageResult {
        p_cov: p,
        method: CoverageMethod::MonteCarlo {
            trials: s.trials,
            empty: s.empty,
        },
        std_error: (p * (1.0 - p) / n).sqrt(),
    })
}

/// Mean SINR (dB) per density, each density on its own derived seed.
pub fn averaged_sinr_sweep(
    densities: &[super::domain::Density],
    scen: &A2aScenario,
    vol: &AirspaceVolume,
    cfg: &McConfig,
) -> Result<Vec<SinrSample>, A2aError> {
    if densities.is_empty() {
        return Err(A2aError::Invalid {
            what: "density list length",
            value: 0.0,
        });
    }
    densities
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let s = A2aScenario {
                density: *d,
                ..*scen
            };
            let c = McConfig {
                seed: rng::derive_seed(cfg.seed, i as u64),
                ..*cfg
            };
            simulate(&s, vol, &c)
        })
        .collect()
}

/// Serving distances from `n` PPP draws over `domain` (empty draws skipped).
pub fn tagged_distances(
    domain: &SamplingDomain,
    intensity: f64,
    central: &Point,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, A2aError> {
    let chunked = rng::chunks(n, 4_096)
        .into_par_iter()
        .map(|(stream, k)| {
            let mut r = rng::stream(seed, stream);
            let mut out = Vec::with_capacity(k);
            for _ in 0..k {
                match sample_ppp(domain, intensity, central, &mut r) {
                    Ok(p) => out.push(p.tagged_distance()),
                    Err(A2aError::EmptyRealization) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(chunked.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::a2a::domain::Density;

    fn vol() -> AirspaceVolume {
        AirspaceVolume::default()
    }

    #[test]
    fn threshold_limits() {
        let cfg = McConfig::new(5_000, 1);
        let lo = A2aScenario {
            threshold: 1e-12,
            ..Default::default()
        };
        let hi = A2aScenario {
            threshold: 1e12,
            ..Default::default()
        };
        let p_lo = coverage_probability_mc(&lo, &vol(), &cfg).unwrap();
        let p_hi = coverage_probability_mc(&hi, &vol(), &cfg).unwrap();
        // Only empty airspaces miss at a vanishing threshold.
        let CoverageMethod::MonteCarlo { empty, .. } = p_lo.method else {
            panic!()
        };
        assert_eq!(p_lo.p_cov, 1.0 - empty as f64 / 5_000.0);
        assert_eq!(p_hi.p_cov, 0.0);
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let cfg = McConfig::new(10_000, 77);
        let a = simulate(&A2aScenario::default(), &vol(), &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| simulate(&A2aScenario::default(), &vol(), &cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.mean_sinr_db.to_bits(), b.mean_sinr_db.to_bits());
    }

    #[test]
    fn std_error_formula() {
        let r = coverage_probability_mc(&A2aScenario::default(), &vol(), &McConfig::new(20_000, 3))
            .unwrap();
        assert_eq!(r.std_error, (r.p_cov * (1.0 - r.p_cov) / 20_000.0).sqrt());
    }

    #[test]
    fn sweep_rejects_empty_list() {
        assert!(
            averaged_sinr_sweep(&[], &A2aScenario::default(), &vol(), &McConfig::new(10, 0))
                .is_err()
        );
        let rows = averaged_sinr_sweep(
            &[Density::ExpectedCount(5.0), Density::ExpectedCount(50.0)],
            &A2aScenario::default(),
            &vol(),
            &McConfig::new(4_000, 0),
        )
        .unwrap();
        assert!(rows[0].mean_sinr_db > rows[1].mean_sinr_db);
    }

    #[test]
    fn mixed_association_never_empty() {
        let cfg = McConfig::new(2_000, 5).with_association(Association::Mixed);
        let s = simulate(&A2aScenario::default(), &vol(), &cfg).unwrap();
        assert_eq!(s.empty, 0);
    }
}
