//! Experiment runners. Each returns a table with one row per grid point.

use rayon::prelude::*;
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, FadingSpec, Layer, Trajectory};
use super::table::{log_regression, Table};
use super::HarnessError;
use crate::a2a::{
    averaged_sinr_sweep, coverage_power_derivative, coverage_probability_analytic,
    coverage_probability_mc, A2aScenario, AnalyticConfig, CoverageMethod, Density, McConfig,
};
use crate::a2g::{
    path_loss, A2gEndpoints, A2gLink, A2gLinkBudget, EarthModel, FadingEval, GroundElectrical,
    LinkOptions,
};
use crate::mec::{self, run_stream, synth, PacketFlag};
use crate::rng::{derive_seed, stream};
use crate::units::db_to_linear;

/// Thresholds (dB) and transmit powers (W) of the analytic-vs-MC check.
pub const SELFTEST_GRID: ([f64; 3], [f64; 3]) = ([7.0, 10.0, 14.0], [4.0, 8.0, 16.0]);

const SELFTEST_ABS_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub table: Table,
    /// Structured report printed to stdout.
    pub summary: serde_json::Value,
    /// Overall verdict for experiments that check something.
    pub passed: Option<bool>,
}

fn runtime(kind: ExperimentKind, context: String) -> impl Fn(String) -> HarnessError {
    move |message| HarnessError::Runtime {
        experiment: kind.name(),
        message: format!("{context}: {message}"),
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn finite(kind: ExperimentKind, what: &str, values: &[f64]) -> Result<(), HarnessError> {
    match values.iter().find(|v| !v.is_finite()) {
        None => Ok(()),
        Some(v) => Err(HarnessError::Runtime {
            experiment: kind.name(),
            message: format!("{what} is not finite ({v})"),
        }),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Validates `config` and runs the experiment it names.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let out = match config.experiment {
        ExperimentKind::A2gSweep => a2g_sweep(config),
        ExperimentKind::A2aSinr => a2a_sinr(config),
        ExperimentKind::A2aCoverage => a2a_coverage(config),
        ExperimentKind::Filter => filter(config),
        ExperimentKind::Selftest => selftest(config),
    }?;
    if out.table.rows.is_empty() {
        return Err(HarnessError::EmptyResult);
    }
    Ok(out)
}

fn a2g_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let kind = ExperimentKind::A2gSweep;
    let g = &cfg.a2g;
    let (freq, power) = match g.layer {
        Layer::Low => (g.freq_5g_hz, g.tx_power_low_w),
        Layer::High => (g.freq_adsb_hz, g.tx_power_high_w),
    };
    let earth = EarthModel::new(g.earth_radius_m, g.effective_radius_factor)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let ground = GroundElectrical::new(g.rel_permittivity, g.conductivity_s_m)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let budget = A2gLinkBudget {
        beamwidth_rad: g.beamwidth_rad,
        ..A2gLinkBudget::with_total_gain(power, db_to_linear(g.total_gain_dbi))
    };
    let options = LinkOptions {
        grazing: g.grazing,
        formula: g.formula,
        reflections: true,
    };
    let fading = g.fading.fading();
    let (lo, hi) = cfg.height_range();
    let heights = linspace(lo, hi, g.points);

    struct Point {
        pl: f64,
        fs: f64,
        faded: f64,
        psi: f64,
        range: f64,
        rays: usize,
    }
    let points = heights
        .par_iter()
        .enumerate()
        .map(|(i, &h)| {
            let err = runtime(kind, format!("height {h} m"));
            let endpoints = A2gEndpoints::new(h, g.gs_height_m, g.ground_arc_m, freq)
                .map_err(|e| err(e.to_string()))?;
            let link = A2gLink {
                endpoints,
                earth,
                ground,
                budget,
                options,
            };
            let outcome = link.evaluate().map_err(|e| err(e.to_string()))?;
            let fs = A2gLink {
                options: LinkOptions::free_space(),
                ..link
            }
            .evaluate()
            .map_err(|e| err(e.to_string()))?;
            let faded = if g.fading == FadingSpec::Off {
                outcome.path_loss_db
            } else {
                let mut rng = stream(derive_seed(cfg.seed, i as u64), 0);
                path_loss(
                    &link,
                    fading,
                    FadingEval::Expectation {
                        draws: g.fading_draws,
                    },
                    &mut rng,
                )
                .map_err(|e| err(e.to_string()))?
                .path_loss_db
            };
            Ok(Point {
                pl: outcome.path_loss_db,
                fs: fs.path_loss_db,
                faded,
                psi: outcome.geometry.grazing_angle_psi,
                range: outcome.geometry.los_distance_r1,
                rays: outcome.rays.len(),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let pl: Vec<f64> = points.iter().map(|p| p.pl).collect();
    let faded: Vec<f64> = points.iter().map(|p| p.faded).collect();
    finite(kind, "path loss", &pl)?;
    finite(kind, "faded path loss", &faded)?;
    let fit = log_regression(&heights, &pl).ok_or_else(|| HarnessError::Runtime {
        experiment: kind.name(),
        message: "regression needs at least two distinct heights".into(),
    })?;

    let layer = match g.layer {
        Layer::Low => "low",
        Layer::High => "high",
    };
    let mut table = Table::new(vec![
        "layer",
        "height_m",
        "frequency_hz",
        "slant_range_m",
        "grazing_rad",
        "rays",
        "path_loss_db",
        "free_space_db",
        "faded_path_loss_db",
        "trend_db",
        "fading",
        "draws",
        "seed",
    ]);
    let draws = if g.fading == FadingSpec::Off {
        0
    } else {
        g.fading_draws
    };
    for (h, p) in heights.iter().zip(&points) {
        table.push(vec![
            layer.into(),
            num(*h),
            num(freq),
            num(p.range),
            num(p.psi),
            p.rays.to_string(),
            num(p.pl),
            num(p.fs),
            num(p.faded),
            num(fit.eval(*h)),
            g.fading.to_string(),
            draws.to_string(),
            cfg.seed.to_string(),
        ]);
    }
    let summary = json!({
        "experiment": kind.name(),
        "points": heights.len(),
        "regression": { "alpha_db": fit.alpha, "beta_db_per_decade": fit.beta },
        "fading": g.fading.to_string(),
        "seed": cfg.seed,
    });
    Ok(ExperimentOutput {
        kind,
        table,
        summary,
        passed: None,
    })
}

fn mc_config(cfg: &ExperimentConfig, seed: u64) -> McConfig {
    McConfig::new(cfg.trials, seed).with_association(cfg.a2a.association)
}

fn a2a_sinr(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let kind = ExperimentKind::A2aSinr;
    let vol = cfg.volume()?;
    let scen = cfg.scenario();
    let densities: Vec<Density> = cfg.a2a.densities.iter().map(|d| cfg.density(*d)).collect();
    let samples = averaged_sinr_sweep(&densities, &scen, &vol, &mc_config(cfg, cfg.seed))
        .map_err(|e| runtime(kind, "density sweep".into())(e.to_string()))?;
    let mut table = Table::new(vec![
        "density",
        "expected_count",
        "mean_sinr_db",
        "std_error_db",
        "trials",
        "empty",
        "seed",
        "method",
    ]);
    for (i, (d, s)) in densities.iter().zip(&samples).enumerate() {
        let raw = cfg.a2a.densities[i];
        finite(
            kind,
            &format!("mean SINR at density {raw}"),
            &[s.mean_sinr_db],
        )?;
        table.push(vec![
            num(raw),
            num(d.expected_count(vol.volume())),
            num(s.mean_sinr_db),
            num(s.sinr_db_std_error),
            s.trials.to_string(),
            s.empty.to_string(),
            derive_seed(cfg.seed, i as u64).to_string(),
            "monte-carlo".into(),
        ]);
    }
    let summary = json!({
        "experiment": kind.name(),
        "densities": cfg.a2a.densities,
        "mean_sinr_db": samples.iter().map(|s| s.mean_sinr_db).collect::<Vec<_>>(),
        "trials": cfg.trials,
        "seed": cfg.seed,
    });
    Ok(ExperimentOutput {
        kind,
        table,
        summary,
        passed: None,
    })
}

struct CoveragePoint {
    threshold_db: f64,
    power_w: f64,
    analytic: f64,
    evaluations: usize,
    derivative: Option<f64>,
    mc: f64,
    std_error: f64,
    seed: u64,
}

fn coverage_grid(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    thresholds: &[f64],
    powers: &[f64],
    derivative: bool,
) -> Result<Vec<CoveragePoint>, HarnessError> {
    let vol = cfg.volume()?;
    let base = cfg.scenario();
    let acfg = AnalyticConfig::default();
    let grid: Vec<(f64, f64)> = thresholds
        .iter()
        .flat_map(|t| powers.iter().map(move |p| (*t, *p)))
        .collect();
    grid.par_iter()
        .enumerate()
        .map(|(i, &(t, p))| {
            let err = runtime(kind, format!("theta {t} dB, power {p} W"));
            let scen = A2aScenario {
                threshold: db_to_linear(t),
                tx_power_w: p,
                ..base
            };
            let a = coverage_probability_analytic(&scen, &vol, &acfg)
                .map_err(|e| err(e.to_string()))?;
            let evaluations = match a.method {
                CoverageMethod::Analytic { evaluations } => evaluations,
                _ => 0,
            };
            let d = if derivative {
                Some(
                    coverage_power_derivative(&scen, &vol, &acfg)
                        .map_err(|e| err(e.to_string()))?,
                )
            } else {
                None
            };
            let seed = derive_seed(cfg.seed, i as u64);
            let m = coverage_probability_mc(&scen, &vol, &mc_config(cfg, seed))
                .map_err(|e| err(e.to_string()))?;
            let mut values = vec![a.p_cov, m.p_cov, m.std_error];
            values.extend(d);
            finite(
                kind,
                &format!("coverage at theta {t} dB, power {p} W"),
                &values,
            )?;
            Ok(CoveragePoint {
                threshold_db: t,
                power_w: p,
                analytic: a.p_cov,
                evaluations,
                derivative: d,
                mc: m.p_cov,
                std_error: m.std_error,
                seed,
            })
        })
        .collect()
}

fn a2a_coverage(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let kind = ExperimentKind::A2aCoverage;
    let a = &cfg.a2a;
    let powers = linspace(a.power_min_w, a.power_max_w, a.power_points);
    let points = coverage_grid(cfg, kind, &a.thresholds_db, &powers, true)?;
    let mut table = Table::new(vec![
        "threshold_db",
        "tx_power_w",
        "p_cov_analytic",
        "p_cov_mc",
        "mc_std_error",
        "dp_dpower_per_w",
        "analytic_evaluations",
        "trials",
        "seed",
    ]);
    let mut worst: f64 = 0.0;
    for p in &points {
        worst = worst.max((p.analytic - p.mc).abs());
        table.push(vec![
            num(p.threshold_db),
            num(p.power_w),
            num(p.analytic),
            num(p.mc),
            num(p.std_error),
            num(p.derivative.unwrap_or(f64::NAN)),
            p.evaluations.to_string(),
            cfg.trials.to_string(),
            p.seed.to_string(),
        ]);
    }
    let summary = json!({
        "experiment": kind.name(),
        "points": points.len(),
        "max_abs_analytic_mc_gap": worst,
        "trials": cfg.trials,
        "seed": cfg.seed,
    });
    Ok(ExperimentOutput {
        kind,
        table,
        summary,
        passed: None,
    })
}

fn selftest(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let kind = ExperimentKind::Selftest;
    let (thresholds, powers) = SELFTEST_GRID;
    let points = coverage_grid(cfg, kind, &thresholds, &powers, false)?;
    let mut table = Table::new(vec![
        "threshold_db",
        "tx_power_w",
        "p_cov_analytic",
        "p_cov_mc",
        "mc_std_error",
        "tolerance",
        "pass",
        "trials",
        "seed",
    ]);
    let mut all = true;
    for p in &points {
        let tol = SELFTEST_ABS_TOL.max(3.0 * p.std_error);
        let pass = (p.analytic - p.mc).abs() <= tol;
        all &= pass;
        table.push(vec![
            num(p.threshold_db),
            num(p.power_w),
            num(p.analytic),
            num(p.mc),
            num(p.std_error),
            num(tol),
            pass.to_string(),
            cfg.trials.to_string(),
            p.seed.to_string(),
        ]);
    }
    let summary = json!({
        "experiment": kind.name(),
        "points": points.len(),
        "passed": all,
        "trials": cfg.trials,
        "seed": cfg.seed,
    });
    Ok(ExperimentOutput {
        kind,
        table,
        summary,
        passed: Some(all),
    })
}

fn filter(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let kind = ExperimentKind::Filter;
    let f = &cfg.filter;
    let (packets, source) = match &f.input {
        Some(path) => {
            let file =
                std::fs::File::open(path).map_err(|e| HarnessError::Io(format!("{path}: {e}")))?;
            let p = mec::read_packets(file).map_err(|e| HarnessError::Runtime {
                experiment: kind.name(),
                message: format!("{path}: {e}"),
            })?;
            (p, path.clone())
        }
        None => {
            let n = f.packets;
            let p = match f.trajectory {
                Trajectory::Hover => synth::hover_settle(n),
                Trajectory::Line => synth::straight_line(n, 10.0),
                Trajectory::Gap => synth::gap_trajectory(n + 5, 10.0, n / 2, 5),
            };
            let name = match f.trajectory {
                Trajectory::Hover => "hover",
                Trajectory::Line => "line",
                Trajectory::Gap => "gap",
            };
            (p, name.to_string())
        }
    };
    let report = run_stream(&packets, &f.filter_config()).map_err(|e| HarnessError::Runtime {
        experiment: kind.name(),
        message: e.to_string(),
    })?;
    let mut table = Table::new(vec![
        "source_id",
        "seq",
        "time_s",
        "lon_deg",
        "lat_deg",
        "alt_m",
        "flag",
    ]);
    for p in &report.packets {
        table.push(vec![
            p.source_id.clone(),
            p.seq.to_string(),
            p.time_s.map(num).unwrap_or_default(),
            num(p.lon_deg),
            num(p.lat_deg),
            num(p.alt_m),
            match p.flag {
                PacketFlag::Recv => "recv",
                PacketFlag::Supp => "supp",
            }
            .into(),
        ]);
    }
    let s = report.summary;
    let summary = json!({
        "experiment": kind.name(),
        "input": source,
        "mode": f.mode,
        "total": s.total,
        "accepted": s.accepted,
        "abandoned": s.abandoned,
        "supplemented": s.supplemented,
        "reduction_ratio": s.reduction_ratio,
    });
    Ok(ExperimentOutput {
        kind,
        table,
        summary,
        passed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            experiment: kind,
            trials: 2_000,
            seed: 3,
            ..Default::default()
        };
        c.a2g.points = 12;
        c.a2a.power_points = 3;
        c.a2a.thresholds_db = vec![7.0];
        c.a2a.densities = vec![10.0, 30.0];
        c.filter.packets = 60;
        c
    }

    #[test]
    fn linspace_hits_ends() {
        let v = linspace(1_000.0, 5_000.0, 100);
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 1_000.0);
        assert_eq!(v[99], 5_000.0);
    }

    #[test]
    fn sweep_rows_and_trend() {
        let out = run_experiment(&small(ExperimentKind::A2gSweep)).unwrap();
        assert_eq!(out.table.rows.len(), 12);
        assert!(
            out.summary["regression"]["beta_db_per_decade"]
                .as_f64()
                .unwrap()
                > 0.0
        );
        let pl = out.table.numbers("path_loss_db").unwrap();
        let faded = out.table.numbers("faded_path_loss_db").unwrap();
        assert_eq!(pl, faded);
    }

    #[test]
    fn every_experiment_is_deterministic() {
        for kind in [
            ExperimentKind::A2gSweep,
            ExperimentKind::A2aSinr,
            ExperimentKind::A2aCoverage,
            ExperimentKind::Filter,
        ] {
            let mut c = small(kind);
            c.a2g.fading = FadingSpec::Rice { k_db: 10.0 };
            let a = run_experiment(&c).unwrap();
            let b = run_experiment(&c).unwrap();
            assert_eq!(a.table, b.table, "{kind:?}");
            assert!(!a.table.rows.is_empty());
        }
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut c = small(ExperimentKind::A2aCoverage);
        c.a2a.pathloss_exp = 5.5;
        assert!(matches!(run_experiment(&c), Err(HarnessError::Config(_))));
    }

    #[test]
    fn filter_reports_supplements_on_gap() {
        let mut c = small(ExperimentKind::Filter);
        c.filter.trajectory = Trajectory::Gap;
        let out = run_experiment(&c).unwrap();
        assert!(
            out.summary["supplemented"].as_u64().unwrap() >= 1,
            "{}",
            out.summary
        );
        assert_eq!(
            out.table.rows.len(),
            60 + out.summary["supplemented"].as_u64().unwrap() as usize
        );
    }
}
