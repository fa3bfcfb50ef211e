//! Deterministic adaptive Simpson quadrature, in one dimension and nested
//! over axis-aligned boxes.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("evaluation budget of {budget} exhausted before the tolerance was met")]
    BudgetExhausted { budget: usize },
    #[error("subdivision depth {depth} reached near x = {at} without meeting the tolerance")]
    DepthExhausted { depth: u32, at: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Target error relative to the magnitude of the integral.
    pub rel_tol: f64,
    /// Absolute error floor; zero means purely relative.
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Levels every panel is bisected before a tolerance check may stop it.
    pub min_depth: u32,
    /// Intervals narrower than this fraction of the range are not split.
    pub min_width: f64,
    /// Integrand evaluations allowed per one-dimensional integral.
    pub max_evals: usize,
    /// Equal panels the interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_depth: 48,
            min_depth: 3,
            min_width: 1e-12,
            max_evals: 1_000_000,
            initial_panels: 4,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Integral estimate with the number of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub evaluations: usize,
}

struct Adaptive<F> {
    f: F,
    evals: usize,
    cfg: QuadConfig,
    /// Narrowest interval worth splitting.
    floor: f64,
}

impl<F> Adaptive<F>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    fn eval(&mut self, x: f64) -> Result<f64, QuadratureError> {
        if self.evals >= self.cfg.max_evals {
            return Err(QuadratureError::BudgetExhausted {
                budget: self.cfg.max_evals,
            });
        }
        self.evals += 1;
        let y = (self.f)(x)?;
        if !y.is_finite() {
            return Err(QuadratureError::NonFinite { at: x });
        }
        Ok(y)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64, QuadratureError> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= self.cfg.min_depth && delta.abs() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        // Below resolution the integrand's own noise (for example from a
        // nested quadrature) dominates and further splitting cannot help.
        if (b - a).abs() <= self.floor.max(16.0 * f64::EPSILON * a.abs().max(b.abs())) {
            return Ok(left + right);
        }
        if depth >= self.cfg.max_depth {
            return Err(QuadratureError::DepthExhausted { depth, at: m });
        }
        let l = self.refine(a, fa, lm, flm, m, fm, left, 0.5 * eps, depth + 1)?;
        let r = self.refine(m, fm, rm, frm, b, fb, right, 0.5 * eps, depth + 1)?;
        Ok(l + r)
    }
}

/// Integrates a fallible integrand over `[a, b]`. Errors raised by the
/// integrand (for example from a nested quadrature) propagate unchanged.
pub fn try_integrate<F>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Quadrature, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            evaluations: 0,
        });
    }
    let panels = cfg.initial_panels.max(1);
    let mut q = Adaptive {
        f,
        evals: 0,
        cfg: *cfg,
        floor: cfg.min_width * (b - a).abs(),
    };
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(2 * panels + 1);
    for i in 0..=2 * panels {
        let x = if i == 2 * panels {
            b
        } else {
            a + 0.5 * h * i as f64
        };
        nodes.push((x, q.eval(x)?));
    }
    let simpson = |i: usize| {
        let (x0, f0) = nodes[2 * i];
        let (_, f1) = nodes[2 * i + 1];
        let (x2, f2) = nodes[2 * i + 2];
        (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)
    };
    let coarse: f64 = (0..panels).map(simpson).sum();
    let sweep = |q: &mut Adaptive<F>, scale: f64| -> Result<f64, QuadratureError> {
        let eps = (cfg.rel_tol * scale.abs()).max(cfg.abs_tol) / panels as f64;
        let mut total = 0.0;
        for i in 0..panels {
            let (x0, f0) = nodes[2 * i];
            let (x1, f1) = nodes[2 * i + 1];
            let (x2, f2) = nodes[2 * i + 2];
            total += q.refine(x0, f0, x1, f1, x2, f2, simpson(i), eps, 1)?;
        }
        Ok(total)
    };
    let mut total = sweep(&mut q, coarse)?;
    // A coarse estimate that overshoots a narrow peak sets the tolerance far
    // too loose; redo the pass against the refined magnitude.
    if total.abs() < 0.5 * coarse.abs() && cfg.rel_tol * total.abs() > cfg.abs_tol {
        total = sweep(&mut q, total)?;
    }
    Ok(Quadrature {
        value: total,
        evaluations: q.evals,
    })
}

pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Quadrature, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, cfg)
}

/// Nested adaptive Simpson over the box `x × y × z`, innermost axis `z`.
/// The evaluation count is the total number of integrand calls.
pub fn integrate_box<F>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    z: (f64, f64),
    cfg: &QuadConfig,
) -> Result<Quadrature, QuadratureError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let mut evaluations = 0usize;
    let outer = try_integrate(
        |xv| {
            let q = try_integrate(
                |yv| {
                    let inner = integrate(|zv| f(xv, yv, zv), z.0, z.1, cfg)?;
                    evaluations += inner.evaluations;
                    Ok(inner.value)
                },
                y.0,
                y.1,
                cfg,
            )?;
            Ok(q.value)
        },
        x.0,
        x.1,
        cfg,
    )?;
    Ok(Quadrature {
        value: outer.value,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, &QuadConfig::default()).unwrap();
        assert!((q.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn sine_to_tolerance() {
        let q = integrate(f64::sin, 0.0, 5.0 * PI, &QuadConfig::with_rel_tol(1e-10)).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn peaked_integrand() {
        // Lorentzian of width 1e-3 centred off-grid.
        let w = 1e-3;
        let f = |x: f64| w / PI / ((x - 0.3137) * (x - 0.3137) + w * w);
        let exact = ((1.0 - 0.3137) / w).atan() / PI + (0.3137 / w).atan() / PI;
        let q = integrate(f, 0.0, 1.0, &QuadConfig::with_rel_tol(1e-8)).unwrap();
        assert!((q.value - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let cfg = QuadConfig::default();
        let fwd = integrate(|x| x.exp(), 0.0, 1.0, &cfg).unwrap().value;
        let rev = integrate(|x| x.exp(), 1.0, 0.0, &cfg).unwrap().value;
        assert!((fwd + rev).abs() < 1e-12);
        assert_eq!(integrate(|x| x, 2.0, 2.0, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn zero_integrand_converges() {
        let q = integrate(|_| 0.0, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn narrow_peak_at_endpoint_meets_relative_tolerance() {
        let c: f64 = 1e-10;
        let exact = c.sqrt() * (2_250.0 / c.sqrt()).atan();
        let q = integrate(
            |z| c / (c + z * z),
            0.0,
            2_250.0,
            &QuadConfig::with_rel_tol(1e-8),
        )
        .unwrap();
        assert!(
            (q.value - exact).abs() < 1e-7 * exact,
            "{} vs {exact}",
            q.value
        );
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            max_evals: 50,
            ..Default::default()
        };
        let err = integrate(|x| (1.0 / (x + 1e-6)).sin(), 0.0, 1.0, &cfg).unwrap_err();
        assert_eq!(err, QuadratureError::BudgetExhausted { budget: 50 });
    }

    #[test]
    fn non_finite_is_reported() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, &QuadConfig::default()).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn box_volume_and_moment() {
        let cfg = QuadConfig::with_rel_tol(1e-9);
        let v = integrate_box(|_, _, _| 1.0, (-1.0, 1.0), (0.0, 2.0), (0.0, 3.0), &cfg).unwrap();
        assert!((v.value - 12.0).abs() < 1e-10);
        // ∫∫∫ (x² + y² + z²) over the unit cube = 1.
        let m = integrate_box(
            |x, y, z| x * x + y * y + z * z,
            (0.0, 1.0),
            (0.0, 1.0),
            (0.0, 1.0),
            &cfg,
        )
        .unwrap();
        assert!((m.value - 1.0).abs() < 1e-10);
        assert!(m.evaluations > 0);
    }
}
