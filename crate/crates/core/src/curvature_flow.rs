//! Curve-shortening flow on the flat torus.
//!
//! Steps are semi-implicit in the vertex positions: the arclength Laplacian is
//! assembled from the current edge lengths and the new positions solve
//! `(I - dt L) x' = x` on the periodic polygon. Lengths never increase under
//! this scheme and each coordinate obeys a discrete maximum principle.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curves::{swept_area, DiscreteCurve};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    /// `dt = step_safety * (min edge)^2`.
    pub step_safety: f64,
    pub resample_every: usize,
    pub max_time: f64,
    pub convergence_phase_spread: f64,
    /// Edges shorter than this fraction of the mean edge force a resample;
    /// the run is singular once the mean edge itself falls below this
    /// fraction of its initial value.
    pub min_edge_fraction: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            step_safety: 1.0,
            resample_every: 25,
            max_time: 20.0,
            convergence_phase_spread: 1e-3,
            min_edge_fraction: 0.05,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step_safety > 0.0
            && self.step_safety <= 1.0
            && self.resample_every >= 1
            && self.max_time > 0.0
            && self.convergence_phase_spread > 0.0
            && self.min_edge_fraction > 0.0
            && self.min_edge_fraction < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FlowSample {
    pub time: f64,
    pub length: f64,
    pub phase_mean: f64,
    pub phase_spread: f64,
    pub moment_norm: f64,
    pub cumulative_flux: f64,
}

/// Per-step record of a flow run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FlowDiagnostics {
    pub samples: Vec<FlowSample>,
}

pub const CSV_HEADER: &str = "time,length,phase_mean,phase_spread,moment_norm,cumulative_flux";

impl FlowDiagnostics {
    fn push(&mut self, s: FlowSample) {
        debug_assert!(self.samples.last().is_none_or(|l| l.time < s.time));
        self.samples.push(s);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.time, s.length, s.phase_mean, s.phase_spread, s.moment_norm, s.cumulative_flux
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    ConvergedToLine,
    Singular,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct FlowResult<T> {
    pub status: FlowStatus,
    pub final_curve: DiscreteCurve<T>,
    pub line_class: Option<[i64; 2]>,
    pub diagnostics: FlowDiagnostics,
    pub steps: usize,
    pub warnings: Vec<String>,
}

/// Phase reference for diagnostics: the average phase when the curve is
/// gradeable, otherwise the arclength mean of the lift.
fn phase_reference<T: Real>(curve: &DiscreteCurve<T>) -> T {
    curve.average_phase().unwrap_or_else(|_| {
        let lengths = curve.edge_lengths();
        let total: T = lengths.iter().copied().sum();
        curve
            .theta_lift()
            .iter()
            .zip(&lengths)
            .map(|(&t, &l)| t * l)
            .sum::<T>()
            / total
    })
}

fn sample<T: Real>(curve: &DiscreteCurve<T>, time: f64, flux: f64) -> FlowSample {
    let phi = phase_reference(curve);
    let moment: T = curve
        .theta_lift()
        .iter()
        .zip(curve.edge_lengths())
        .map(|(&t, l)| {
            let s = (t - phi).sin();
            s * s * l
        })
        .sum();
    FlowSample {
        time,
        length: curve.length().to_f64_lossy(),
        phase_mean: phi.to_f64_lossy(),
        phase_spread: curve.phase_spread().to_f64_lossy(),
        moment_norm: moment.to_f64_lossy(),
        cumulative_flux: flux,
    }
}

/// `max_k |theta_k - phi|` against the diagnostic phase reference.
pub fn phase_deviation<T: Real>(curve: &DiscreteCurve<T>) -> T {
    let phi = phase_reference(curve);
    curve
        .theta_lift()
        .iter()
        .fold(T::zero(), |acc, &t| acc.max((t - phi).abs()))
}

/// Largest step the configuration admits for `curve`.
pub fn stable_step<T: Real>(curve: &DiscreteCurve<T>, config: &FlowConfig) -> T {
    let h = curve
        .edge_lengths()
        .into_iter()
        .fold(T::infinity(), |a, b| a.min(b));
    T::lit(config.step_safety) * h * h
}

fn check_mesh<T: Real>(curve: &DiscreteCurve<T>, config: &FlowConfig) -> Result<Vec<T>> {
    let lengths = curve.edge_lengths();
    let mean = lengths.iter().copied().sum::<T>() / T::of_int(lengths.len() as i64);
    let guard = mean * T::lit(config.min_edge_fraction);
    if let Some((edge, &l)) = lengths.iter().enumerate().find(|(_, &l)| l < guard) {
        return Err(Error::ResampleRequired {
            edge,
            length: l.to_f64_lossy(),
            guard: guard.to_f64_lossy(),
        });
    }
    Ok(lengths)
}

fn check_step<T: Real>(curve: &DiscreteCurve<T>, dt: T, config: &FlowConfig) -> Result<()> {
    let bound = stable_step(curve, config);
    if !(dt > T::zero()) || dt > bound * (T::one() + T::tol(1e-12)) {
        return Err(Error::StepTooLarge {
            dt: dt.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Coefficients `(a_i, c_i)` of `L x_i = a_i (x_{i-1} - x_i) + c_i (x_{i+1} - x_i)`.
fn laplacian_weights<T: Real>(lengths: &[T]) -> (Vec<T>, Vec<T>) {
    let n = lengths.len();
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let hp = lengths[(i + n - 1) % n];
            let h = lengths[i];
            let w = two / (hp + h);
            (w / hp, w / h)
        })
        .unzip()
}

fn rebuild<T: Real>(old: &DiscreteCurve<T>, vertices: Vec<Vec2<T>>) -> Result<DiscreteCurve<T>> {
    Ok(DiscreteCurve::with_lift_near(
        vertices,
        old.closure(),
        *old.geometry(),
        old.theta_lift()[0],
    )?
    .with_holonomy(old.holonomy()))
}

/// One semi-implicit step of size `dt`.
pub fn mcf_step<T: Real>(
    curve: &DiscreteCurve<T>,
    dt: T,
    config: &FlowConfig,
) -> Result<DiscreteCurve<T>> {
    let lengths = check_mesh(curve, config)?;
    check_step(curve, dt, config)?;
    let n = curve.len();
    let (a, c) = laplacian_weights(&lengths);
    let tau = curve.translation();
    let lower: Vec<T> = a.iter().map(|&x| -dt * x).collect();
    let upper: Vec<T> = c.iter().map(|&x| -dt * x).collect();
    let diag: Vec<T> = (0..n).map(|i| T::one() + dt * (a[i] + c[i])).collect();
    let mut rhs: Vec<Vec2<T>> = curve.vertices().to_vec();
    rhs[0] -= tau * (dt * a[0]);
    rhs[n - 1] += tau * (dt * c[n - 1]);
    let xs: Vec<T> = rhs.iter().map(|v| v.x).collect();
    let ys: Vec<T> = rhs.iter().map(|v| v.y).collect();
    let xs = solve_cyclic(&lower, &diag, &upper, &xs);
    let ys = solve_cyclic(&lower, &diag, &upper, &ys);
    let vertices = xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect();
    rebuild(curve, vertices)
}

/// Forward Euler step; stable only for `dt` below about half the squared
/// minimum edge.
pub fn mcf_step_explicit<T: Real>(
    curve: &DiscreteCurve<T>,
    dt: T,
    config: &FlowConfig,
) -> Result<DiscreteCurve<T>> {
    let lengths = check_mesh(curve, config)?;
    check_step(curve, dt, config)?;
    let (a, c) = laplacian_weights(&lengths);
    let vertices = (0..curve.len())
        .map(|i| {
            let k = i as i64;
            let x = curve.vertex(k);
            let lap = (curve.vertex(k - 1) - x) * a[i] + (curve.vertex(k + 1) - x) * c[i];
            x + lap * dt
        })
        .collect();
    rebuild(curve, vertices)
}

/// Solves the cyclic tridiagonal system with sub-diagonal `lower`
/// (`lower[0]` couples row 0 to the last unknown), diagonal `diag` and
/// super-diagonal `upper` (`upper[n-1]` couples the last row to unknown 0).
pub fn solve_cyclic<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    // Sherman-Morrison on the tridiagonal part.
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - alpha * beta / gamma;
    let x = solve_tridiagonal(lower, &bb, upper, rhs);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(lower, &bb, upper, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (T::one() + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(&xi, &zi)| xi - fact * zi).collect()
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut cp = vec![T::zero(); n];
    let mut dp = vec![T::zero(); n];
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * cp[i - 1];
        cp[i] = if i + 1 < n { upper[i] / m } else { T::zero() };
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    x
}

fn converged<T: Real>(curve: &DiscreteCurve<T>, s: &FlowSample, config: &FlowConfig) -> bool {
    let tol = config.convergence_phase_spread;
    curve.closure() != [0, 0]
        && curve.maslov() == 0
        && s.phase_spread < tol
        && s.moment_norm < tol * tol * s.length
}

/// Runs the flow to convergence, singularity or timeout.
pub fn run_flow<T: Real>(curve: &DiscreteCurve<T>, config: &FlowConfig) -> Result<FlowResult<T>> {
    run_flow_observed(curve, config, |_, _| {})
}

/// As [`run_flow`], calling `observe(time, curve)` on the initial curve and
/// after every accepted step.
pub fn run_flow_observed<T: Real, F>(
    curve: &DiscreteCurve<T>,
    config: &FlowConfig,
    mut observe: F,
) -> Result<FlowResult<T>>
where
    F: FnMut(f64, &DiscreteCurve<T>),
{
    config.validate()?;
    let mut warnings = Vec::new();
    if !curve.is_embedded() {
        warnings.push("initial curve is not embedded".to_string());
    }
    let gradeable = curve.maslov() == 0;
    if !gradeable {
        warnings.push(format!("Maslov index {} is nonzero", curve.maslov()));
    }
    let n = curve.len();
    let initial_mean = curve.length() / T::of_int(n as i64);
    let collapse = initial_mean * T::lit(config.min_edge_fraction);

    let mut cur = curve.clone();
    let mut diagnostics = FlowDiagnostics::default();
    let mut time = 0.0f64;
    let mut flux = 0.0f64;
    let mut steps = 0usize;
    let mut excursion_warned = false;
    let mut check_excursion = |c: &DiscreteCurve<T>, t: f64, w: &mut Vec<String>| {
        if gradeable && !excursion_warned && phase_deviation(c) >= T::FRAC_PI_2() {
            excursion_warned = true;
            w.push(format!("phase deviates from the average by pi/2 or more at t = {t}"));
        }
    };

    let first = sample(&cur, time, flux);
    diagnostics.push(first);
    observe(time, &cur);
    check_excursion(&cur, time, &mut warnings);

    let finish = |status, cur: DiscreteCurve<T>, diagnostics, steps, warnings| {
        let line_class = (status == FlowStatus::ConvergedToLine).then(|| cur.closure());
        Ok(FlowResult {
            status,
            final_curve: cur,
            line_class,
            diagnostics,
            steps,
            warnings,
        })
    };
    if converged(&cur, &first, config) {
        return finish(FlowStatus::ConvergedToLine, cur, diagnostics, steps, warnings);
    }

    loop {
        if time >= config.max_time {
            return finish(FlowStatus::Timeout, cur, diagnostics, steps, warnings);
        }
        let mut next_curve = if steps > 0 && steps % config.resample_every == 0 {
            match cur.resample(n) {
                Ok(c) => c,
                Err(_) => return finish(FlowStatus::Singular, cur, diagnostics, steps, warnings),
            }
        } else {
            cur.clone()
        };
        if next_curve.length() / T::of_int(n as i64) < collapse {
            return finish(FlowStatus::Singular, cur, diagnostics, steps, warnings);
        }
        let remaining = T::lit(config.max_time - time);
        let dt = stable_step(&next_curve, config).min(remaining);
        let stepped = match mcf_step(&next_curve, dt, config) {
            Err(Error::ResampleRequired { .. }) => next_curve.resample(n).and_then(|r| {
                next_curve = r;
                let dt = stable_step(&next_curve, config).min(remaining);
                mcf_step(&next_curve, dt, config).map(|c| (c, dt))
            }),
            other => other.map(|c| (c, dt)),
        };
        let (stepped, dt) = match stepped {
            Ok(c) => c,
            Err(_) => return finish(FlowStatus::Singular, cur, diagnostics, steps, warnings),
        };
        flux += swept_area(&cur, &stepped)?.to_f64_lossy();
        time += dt.to_f64_lossy();
        steps += 1;
        cur = stepped;
        let s = sample(&cur, time, flux);
        diagnostics.push(s);
        observe(time, &cur);
        check_excursion(&cur, time, &mut warnings);
        if converged(&cur, &s, config) {
            return finish(FlowStatus::ConvergedToLine, cur, diagnostics, steps, warnings);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use crate::torus_cy::TorusCY;
    use std::f64::consts::TAU;

    fn g() -> TorusCY<f64> {
        TorusCY::standard()
    }

    fn cfg() -> FlowConfig {
        FlowConfig::default()
    }

    #[test]
    fn straight_line_is_fixed() {
        let c = shapes::straight_line([1, 0], 32, Vec2::new(0.0, 0.25), g()).unwrap();
        let dt = stable_step(&c, &cfg());
        let d = mcf_step(&c, dt, &cfg()).unwrap();
        for (a, b) in c.vertices().iter().zip(d.vertices()) {
            assert!((*a - *b).norm() < 1e-15);
        }
        assert_eq!(d.closure(), [1, 0]);
    }

    #[test]
    fn exact_line_converges_immediately() {
        let c = shapes::straight_line([1, 1], 16, Vec2::zero(), g()).unwrap();
        let r = run_flow(&c, &cfg()).unwrap();
        assert_eq!(r.status, FlowStatus::ConvergedToLine);
        assert_eq!(r.steps, 0);
        assert_eq!(r.line_class, Some([1, 1]));
        assert_eq!(r.diagnostics.samples.len(), 1);
        assert_eq!(r.diagnostics.samples[0].time, 0.0);
    }

    /// Fourier coefficient of `sin(2 pi m x)` in the vertical offsets.
    fn sine_amplitude(c: &DiscreteCurve<f64>, m: f64) -> f64 {
        let n = c.len() as f64;
        c.vertices()
            .iter()
            .map(|v| v.y * (TAU * m * v.x).sin())
            .sum::<f64>()
            * 2.0
            / n
    }

    #[test]
    fn sine_mode_decays_like_heat_equation() {
        let (n, m, a) = (128, 3.0, 1e-5);
        let c = shapes::sinusoidal_line([1, 0], n, a, 3, g()).unwrap();
        let dt = stable_step(&c, &cfg());
        let d = mcf_step(&c, dt, &cfg()).unwrap();
        let k = TAU * m;
        let ratio = sine_amplitude(&d, m) / sine_amplitude(&c, m);
        // Linearized oracle: y_t = y_xx, implicit Euler on the mode. The
        // second difference sees the symbol (2 - 2 cos kh) / h^2 instead of k^2.
        let h = 1.0 / n as f64;
        let symbol = (2.0 - 2.0 * (k * h).cos()) / (h * h);
        assert!((ratio - 1.0 / (1.0 + symbol * dt)).abs() < 1e-8);
        let continuum = 1.0 / (1.0 + k * k * dt);
        assert!((ratio - continuum).abs() < 5e-3 * k * k * dt, "{ratio} vs {continuum}");
        assert!((ratio - (1.0 - k * k * dt)).abs() < 1.5 * (k * k * dt).powi(2));
    }

    #[test]
    fn circle_radius_squared_shrinks_at_rate_two() {
        let r0 = 0.3;
        let mut c = shapes::regular_polygon(Vec2::new(0.5, 0.5), r0, 256, g()).unwrap();
        let mean_r2 = |c: &DiscreteCurve<f64>| {
            let ctr = c.vertices().iter().fold(Vec2::zero(), |a, &v| a + v) * (1.0 / c.len() as f64);
            c.vertices().iter().map(|&v| (v - ctr).norm().powi(2)).sum::<f64>() / c.len() as f64
        };
        let start = mean_r2(&c);
        let mut t = 0.0;
        while t < 0.01 {
            let dt = stable_step(&c, &cfg()).min(0.01 - t);
            c = mcf_step(&c, dt, &cfg()).unwrap();
            t += dt;
        }
        let rate = (start - mean_r2(&c)) / t;
        assert!((rate - 2.0).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn contractible_circle_is_singular() {
        let c = shapes::regular_polygon(Vec2::new(0.5, 0.5), 0.2, 64, g()).unwrap();
        let r = run_flow(&c, &cfg()).unwrap();
        assert_eq!(r.status, FlowStatus::Singular);
        assert_eq!(r.line_class, None);
        let t = r.diagnostics.samples.last().unwrap().time;
        assert!(t < 0.02 * 1.05 && t > 0.02 * 0.9, "extinction at {t}");
    }

    #[test]
    fn timeout() {
        let c = shapes::sinusoidal_line([1, 0], 64, 0.05, 1, g()).unwrap();
        let config = FlowConfig {
            max_time: 1e-3,
            ..cfg()
        };
        let r = run_flow(&c, &config).unwrap();
        assert_eq!(r.status, FlowStatus::Timeout);
        assert!((r.diagnostics.samples.last().unwrap().time - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn step_guards() {
        let c = shapes::sinusoidal_line([1, 0], 64, 0.05, 1, g()).unwrap();
        let dt = stable_step(&c, &cfg());
        assert!(matches!(
            mcf_step(&c, 2.0 * dt, &cfg()),
            Err(Error::StepTooLarge { .. })
        ));
        let mut v = c.vertices().to_vec();
        v[10] = v[9].lerp(v[10], 0.01);
        let bad = DiscreteCurve::new(v, [1, 0], g()).unwrap();
        assert!(matches!(
            mcf_step(&bad, 1e-9, &cfg()),
            Err(Error::ResampleRequired { edge: 9, .. })
        ));
        let broken = FlowConfig {
            step_safety: 1.5,
            ..cfg()
        };
        assert!(run_flow(&c, &broken).is_err());
    }

    #[test]
    fn explicit_and_implicit_agree_to_first_order() {
        let c = shapes::sinusoidal_line([1, 1], 64, 0.05, 2, g()).unwrap();
        let dt = 0.1 * stable_step(&c, &cfg());
        let a = mcf_step(&c, dt, &cfg()).unwrap();
        let b = mcf_step_explicit(&c, dt, &cfg()).unwrap();
        let moved = c
            .vertices()
            .iter()
            .zip(a.vertices())
            .fold(0.0f64, |m, (x, y)| m.max((*x - *y).norm()));
        let gap = a
            .vertices()
            .iter()
            .zip(b.vertices())
            .fold(0.0f64, |m, (x, y)| m.max((*x - *y).norm()));
        assert!(moved > 0.0);
        assert!(gap < 0.05 * moved, "gap {gap} moved {moved}");
    }

    /// Dense Gaussian elimination as an independent check of the cyclic solver.
    fn dense_solve(m: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
        let n = b.len();
        for i in 0..n {
            let p = (i..n).max_by(|&r, &s| m[r][i].abs().total_cmp(&m[s][i].abs())).unwrap();
            m.swap(i, p);
            b.swap(i, p);
            for r in i + 1..n {
                let f = m[r][i] / m[i][i];
                for c in i..n {
                    m[r][c] -= f * m[i][c];
                }
                b[r] -= f * b[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|c| m[i][c] * x[c]).sum();
            x[i] = (b[i] - s) / m[i][i];
        }
        x
    }

    #[test]
    fn cyclic_solver_matches_dense() {
        for n in [3usize, 4, 7, 20] {
            let lower: Vec<f64> = (0..n).map(|i| -0.3 - 0.01 * i as f64).collect();
            let upper: Vec<f64> = (0..n).map(|i| -0.2 + 0.02 * i as f64).collect();
            let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.1 * i as f64).collect();
            let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.5).collect();
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                m[i][i] += diag[i];
                m[i][(i + n - 1) % n] += lower[i];
                m[i][(i + 1) % n] += upper[i];
            }
            let want = dense_solve(&mut m, &mut rhs.clone());
            let got = solve_cyclic(&lower, &diag, &upper, &rhs);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let c = shapes::sinusoidal_line([1, 0], 32, 0.02, 1, g()).unwrap();
        let config = FlowConfig {
            max_time: 1e-3,
            ..cfg()
        };
        let r = run_flow(&c, &config).unwrap();
        let csv = r.diagnostics.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), r.diagnostics.samples.len());
        let times: Vec<f64> = r.diagnostics.samples.iter().map(|s| s.time).collect();
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn runs_in_single_precision() {
        let c = shapes::sinusoidal_line([1, 0], 32, 0.05f32, 1, TorusCY::standard()).unwrap();
        let config = FlowConfig {
            convergence_phase_spread: 1e-2,
            ..cfg()
        };
        let r = run_flow(&c, &config).unwrap();
        assert_eq!(r.status, FlowStatus::ConvergedToLine);
        assert!((r.final_curve.length() - 1.0).abs() < 1e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn one_step_invariants(seed in 0u64..100_000, p in 1i64..3, q in -2i64..3, frac in 0.05f64..1.0) {
                let c = shapes::perturbed_line([p, q], 96, 0.05, 3, seed, g()).unwrap();
                let dt = frac * stable_step(&c, &cfg());
                let d = mcf_step(&c, dt, &cfg()).unwrap();
                prop_assert_eq!(d.closure(), c.closure());
                prop_assert!(d.length() <= c.length() + 1e-12);
                prop_assert!(phase_deviation(&d) <= phase_deviation(&c) + 1e-6);
                prop_assert_eq!(d.average_phase().unwrap(), c.average_phase().unwrap());
            }

            #[test]
            fn length_decreases_for_large_steps(seed in 0u64..100_000, scale in 1.0f64..1e4) {
                // Unconditional: the step bound is for accuracy, not stability.
                let c = shapes::perturbed_line([1, 0], 64, 0.05, 3, seed, g()).unwrap();
                let mut loose = cfg();
                loose.step_safety = 1.0;
                let dt = stable_step(&c, &loose);
                let lengths = c.edge_lengths();
                let (a, cc) = laplacian_weights(&lengths);
                let n = c.len();
                let big = dt * scale;
                let lower: Vec<f64> = a.iter().map(|&x| -big * x).collect();
                let upper: Vec<f64> = cc.iter().map(|&x| -big * x).collect();
                let diag: Vec<f64> = (0..n).map(|i| 1.0 + big * (a[i] + cc[i])).collect();
                let tau = c.translation();
                let mut rhs = c.vertices().to_vec();
                rhs[0] -= tau * (big * a[0]);
                rhs[n - 1] += tau * (big * cc[n - 1]);
                let xs = solve_cyclic(&lower, &diag, &upper, &rhs.iter().map(|v| v.x).collect::<Vec<_>>());
                let ys = solve_cyclic(&lower, &diag, &upper, &rhs.iter().map(|v| v.y).collect::<Vec<_>>());
                let v: Vec<Vec2<f64>> = xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect();
                let new_len: f64 = (0..n).map(|i| {
                    let next = if i + 1 < n { v[i + 1] } else { v[0] + tau };
                    (next - v[i]).norm()
                }).sum();
                prop_assert!(new_len <= c.length() + 1e-12);
            }
        }
    }
}
