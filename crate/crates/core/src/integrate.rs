//! Fixed-step RK4 and adaptive Dormand-Prince 4(5) with dense output.

use crate::diagnostics::EnergyBreakdown;
use crate::dynamics::{ModalState, Model};
use crate::error::{invalid, Error, Result};

/// A first-order system `y' = F(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Adaptive45,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "adaptive45" | "dp45" => Ok(Method::Adaptive45),
            other => Err(format!("unknown method `{other}` (expected rk4 or adaptive45)")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Adaptive45 => "adaptive45",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for the adaptive method.
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub sample_every: f64,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            rtol: 1e-8,
            atol: 1e-10,
            t_end,
            sample_every: dt,
        }
    }

    pub fn adaptive(rtol: f64, atol: f64, t_end: f64, sample_every: f64) -> Self {
        Self {
            method: Method::Adaptive45,
            dt: sample_every.min(t_end) * 0.1,
            rtol,
            atol,
            t_end,
            sample_every,
        }
    }

    pub fn with_sampling(mut self, sample_every: f64) -> Self {
        self.sample_every = sample_every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("integrator.dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(invalid(
                "integrator.t_end",
                format!("must be positive, got {}", self.t_end),
            ));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(invalid("integrator.rtol", "tolerances must be positive"));
        }
        if self.method == Method::Rk4 && !(self.sample_every >= self.dt * (1.0 - 1e-12)) {
            return Err(invalid("integrator.sample_every", "must be at least dt"));
        }
        if !(self.sample_every.is_finite() && self.sample_every > 0.0) {
            return Err(invalid("integrator.sample_every", "must be positive"));
        }
        Ok(())
    }
}

/// Samples of a flat state vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Accepted steps (RK4: total steps).
    pub steps: usize,
    pub rejected: usize,
}

fn check_finite(y: &[f64], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

fn rk4_step<S: OdeSystem>(sys: &mut S, t: f64, h: f64, y: &mut [f64], w: &mut Rk4Work) {
    let n = y.len();
    sys.rhs(t, y, &mut w.k1);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * h * w.k1[i];
    }
    sys.rhs(t + 0.5 * h, &w.tmp, &mut w.k2);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * h * w.k2[i];
    }
    sys.rhs(t + 0.5 * h, &w.tmp, &mut w.k3);
    for i in 0..n {
        w.tmp[i] = y[i] + h * w.k3[i];
    }
    sys.rhs(t + h, &w.tmp, &mut w.k4);
    for i in 0..n {
        y[i] += h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    }
}

/// Number of RK4 steps and the step actually used: `dt` is shrunk so that an
/// integer number of steps lands on `t_end`.
pub fn rk4_steps(dt: f64, t_end: f64) -> (usize, f64) {
    let n = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}

/// Classical RK4 on `[0, t_end]`, sampling every `round(sample_every / h)` steps.
pub fn solve_rk4<S: OdeSystem>(sys: &mut S, y0: &[f64], dt: f64, t_end: f64, sample_every: f64) -> Result<Samples> {
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    check_finite(y0, 0.0)?;
    let (n, h) = rk4_steps(dt, t_end);
    let stride = ((sample_every / h).round() as usize).max(1);
    let mut out = Samples::default();
    let mut y = y0.to_vec();
    let mut work = Rk4Work::new(y.len());
    out.times.push(0.0);
    out.states.push(y.clone());
    for i in 0..n {
        let t = i as f64 * h;
        rk4_step(sys, t, h, &mut y, &mut work);
        let t_new = (i + 1) as f64 * h;
        check_finite(&y, t_new)?;
        if (i + 1) % stride == 0 || i + 1 == n {
            out.times.push(if i + 1 == n { t_end } else { t_new });
            out.states.push(y.clone());
        }
    }
    out.steps = n;
    Ok(out)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const PI_ALPHA: f64 = 0.7 / 5.0;
const PI_BETA: f64 = 0.4 / 5.0;

/// Cubic Hermite interpolant on `[t0, t0 + h]`.
fn hermite(y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64], h: f64, s: f64, out: &mut [f64]) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

/// Adaptive Dormand-Prince 4(5) with PI step control, halving on rejection and
/// uniform dense-output sampling at multiples of `sample_every`.
pub fn solve_adaptive<S: OdeSystem>(sys: &mut S, y0: &[f64], cfg: &IntegratorConfig) -> Result<Samples> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: n,
            got: y0.len(),
        });
    }
    check_finite(y0, 0.0)?;
    let t_end = cfg.t_end;
    let n_samples = ((t_end / cfg.sample_every) * (1.0 - 1e-12)).ceil() as usize;
    let sample_time = |k: usize| {
        if k >= n_samples {
            t_end
        } else {
            k as f64 * cfg.sample_every
        }
    };

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut dense = vec![0.0; n];
    let mut out = Samples::default();
    out.times.push(0.0);
    out.states.push(y.clone());
    let mut next = 1usize;

    let mut t = 0.0;
    let mut h = cfg.dt.min(t_end);
    let mut err_prev: f64 = 1.0;
    sys.rhs(t, &y, &mut k[0]);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        if h < 1e-14 * t_end {
            return Err(Error::StepUnderflow { t, h });
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (r, a) in A[s].iter().enumerate().take(s) {
                    acc += h * a * k[r][i];
                }
                tmp[i] = acc;
            }
            sys.rhs(t + C[s] * h, &tmp, &mut k[s]);
        }
        // Stage 7 is evaluated at the fifth-order solution.
        y_new.copy_from_slice(&tmp);
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (r, c) in E.iter().enumerate() {
                e += c * k[r][i];
            }
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            let r = h * e / scale;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();
        if !err.is_finite() {
            h *= 0.5;
            out.rejected += 1;
            continue;
        }
        if err <= 1.0 {
            let t_new = if t_end - (t + h) < 1e-14 * t_end { t_end } else { t + h };
            check_finite(&y_new, t_new)?;
            while next <= n_samples && sample_time(next) <= t_new {
                let ts = sample_time(next);
                let s = ((ts - t) / h).clamp(0.0, 1.0);
                if ts == t_new {
                    dense.copy_from_slice(&y_new);
                } else {
                    hermite(&y, &k[0], &y_new, &k[6], h, s, &mut dense);
                }
                out.times.push(ts);
                out.states.push(dense.clone());
                next += 1;
            }
            let e = err.max(1e-10);
            let factor = (SAFETY * e.powf(-PI_ALPHA) * err_prev.powf(PI_BETA)).clamp(MIN_FACTOR, MAX_FACTOR);
            err_prev = e;
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            out.steps += 1;
            h *= factor;
        } else {
            h *= 0.5;
            out.rejected += 1;
        }
    }
    Ok(out)
}

/// Solves according to `cfg`.
pub fn solve<S: OdeSystem>(sys: &mut S, y0: &[f64], cfg: &IntegratorConfig) -> Result<Samples> {
    cfg.validate()?;
    match cfg.method {
        Method::Rk4 => solve_rk4(sys, y0, cfg.dt, cfg.t_end, cfg.sample_every),
        Method::Adaptive45 => solve_adaptive(sys, y0, cfg),
    }
}

/// Time-sampled modal states, optionally with energy channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModalState>,
    pub diagnostics: Vec<EnergyBreakdown>,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&ModalState> {
        self.states.last()
    }
}

/// Integrates the modal system from `y0` over `[0, cfg.t_end]`.
pub fn integrate(y0: &ModalState, model: &mut Model, cfg: &IntegratorConfig) -> Result<Trajectory> {
    y0.check(model.basis())?;
    let (nw, nt) = (model.basis().n_w(), model.basis().n_t());
    let raw = solve(model, &y0.to_vec(), cfg)?;
    let states = raw
        .times
        .iter()
        .zip(&raw.states)
        .map(|(&t, y)| ModalState::from_slice(y0.t + t, y, nw, nt))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: raw.times.iter().map(|t| y0.t + t).collect(),
        states,
        diagnostics: Vec::new(),
        steps: raw.steps,
        rejected: raw.rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `y'' = -w^2 y` as a first-order system.
    struct Oscillator(f64);

    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -self.0 * self.0 * y[0];
        }
    }

    struct Blowup;

    impl OdeSystem for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn rk4_oscillator_accuracy() {
        let mut sys = Oscillator(2.0);
        let out = solve_rk4(&mut sys, &[1.0, 0.0], 1e-3, 5.0, 0.5).unwrap();
        assert_eq!(out.times.len(), 11);
        let last = out.states.last().unwrap();
        assert!((last[0] - (10.0f64).cos()).abs() < 1e-9);
        assert!((last[1] + 2.0 * (10.0f64).sin()).abs() < 1e-9);
        for w in out.times.windows(2) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_order_four() {
        let mut sys = Oscillator(3.0);
        let exact = (3.0f64 * 2.0).cos();
        let err = |dt: f64, sys: &mut Oscillator| {
            let o = solve_rk4(sys, &[1.0, 0.0], dt, 2.0, 2.0).unwrap();
            (o.states.last().unwrap()[0] - exact).abs()
        };
        let ratio = err(0.02, &mut sys) / err(0.01, &mut sys);
        assert!((14.0..18.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn rk4_step_count_lands_on_end() {
        let (n, h) = rk4_steps(0.3, 1.0);
        assert_eq!(n, 4);
        assert!((h - 0.25).abs() < 1e-15);
        let (n, h) = rk4_steps(1e-3, 10.0);
        assert_eq!(n, 10_000);
        assert!((h - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn adaptive_meets_tolerance() {
        let mut sys = Oscillator(2.0);
        let cfg = IntegratorConfig::adaptive(1e-10, 1e-12, 10.0, 0.25);
        let out = solve(&mut sys, &[1.0, 0.0], &cfg).unwrap();
        assert_eq!(out.times.len(), 41);
        for (t, y) in out.times.iter().zip(&out.states) {
            assert!((y[0] - (2.0 * t).cos()).abs() < 1e-7, "t = {t}");
        }
        assert_eq!(*out.times.last().unwrap(), 10.0);
    }

    #[test]
    fn adaptive_dense_output_between_steps() {
        let mut sys = Oscillator(1.0);
        let cfg = IntegratorConfig::adaptive(1e-9, 1e-12, 3.0, 0.01);
        let out = solve(&mut sys, &[0.0, 1.0], &cfg).unwrap();
        assert!(out.steps < out.times.len());
        let worst = out
            .times
            .iter()
            .zip(&out.states)
            .map(|(t, y)| (y[0] - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn blowup_is_reported() {
        let mut sys = Blowup;
        let err = solve_rk4(&mut sys, &[1.0], 0.1, 2.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { t } if t > 0.9 && t <= 2.0), "{err:?}");
        let cfg = IntegratorConfig::adaptive(1e-8, 1e-10, 2.0, 0.1);
        let err = solve(&mut sys, &[1.0], &cfg).unwrap_err();
        assert!(
            matches!(err, Error::StepUnderflow { .. } | Error::NonFinite { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.0, 1.0).validate().is_err());
        assert!(IntegratorConfig::rk4(0.1, -1.0).validate().is_err());
        assert!(IntegratorConfig::rk4(0.1, 1.0).with_sampling(0.01).validate().is_err());
        assert!(IntegratorConfig::rk4(0.1, 1.0).validate().is_ok());
        assert_eq!("rk4".parse::<Method>().unwrap(), Method::Rk4);
        assert!("euler".parse::<Method>().is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let mut sys = Oscillator(1.0);
        assert!(solve_rk4(&mut sys, &[1.0], 0.1, 1.0, 0.1).is_err());
    }
}
