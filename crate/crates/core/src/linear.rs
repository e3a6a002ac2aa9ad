//! Decoupled linear system: characteristic roots, stability class and the
//! closed-form modal solution.
//!
//! Dividing the vertical equation by `M` gives
//! `w'' + mu' w' + K_j w = -beta' Upsilon th' - eta' th + g_j` and
//! `(l^2/3) th'' + zeta' th' + T_j th = 0` with primes denoting division by
//! `M`, `K_j = D k^4 / M` and `T_j = (eps k^4 + kappa k^2) / M`. The
//! nondimensional formulas (`M = D = 1`) then carry over with
//! `k^4 -> K_j`:
//!
//! ```text
//! omega_j = sqrt(4 K_j - mu'^2)
//! gamma_j = sqrt(4 l^2 T_j / 3 - zeta'^2)
//! w_j(t)  = e^{-mu' t/2} [c1 sin(omega t/2) + c2 cos(omega t/2)] + g_j / K_j
//!         + e^{-a t} [A sin(b t) + B cos(b t)],   a = 3 zeta'/(2 l^2), b = 3 gamma/(2 l^2)
//! ```

use crate::dynamics::{ModalState, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::Basis;
use num_complex::Complex64;

/// Relative tolerance of the resonance test.
pub const RESONANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stability {
    ExponentiallyStable,
    OverdampedBranch,
    LyapunovStable,
    Unstable,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::ExponentiallyStable => "exponentially_stable",
            Stability::LyapunovStable => "lyapunov_stable",
            Stability::Unstable => "unstable",
            Stability::OverdampedBranch => "overdamped_branch",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Roots of `a x^2 + b x + c`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        // Avoid cancellation in the smaller root.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let r1 = q / a;
        let r2 = c / q;
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Coefficients `(a, b, c)` of the vertical and torsional factors for mode `j`.
pub fn characteristic_factors(j: usize, params: &ModelParams) -> ([f64; 3], [f64; 3]) {
    let k = j as f64 * std::f64::consts::PI / params.length;
    let k2 = k * k;
    let vertical = [params.mass, params.mu(), params.bending * k2 * k2];
    let torsional = [
        params.torsional_inertia(),
        params.zeta,
        params.eps * k2 * k2 + params.kappa * k2,
    ];
    (vertical, torsional)
}

/// Four roots of the factored characteristic quartic of mode `j`:
/// torsional pair first, then the vertical pair.
pub fn characteristic_roots(j: usize, params: &ModelParams) -> [Complex64; 4] {
    let (v, t) = characteristic_factors(j, params);
    let [t1, t2] = quadratic_roots(t[0], t[1], t[2]);
    let [v1, v2] = quadratic_roots(v[0], v[1], v[2]);
    [t1, t2, v1, v2]
}

fn classify_pair(coeffs: [f64; 3], roots: [Complex64; 2]) -> Stability {
    let scale = roots
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let max_re = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re > 1e-14 * scale {
        Stability::Unstable
    } else if max_re >= -1e-14 * scale {
        Stability::LyapunovStable
    } else if coeffs[1] * coeffs[1] - 4.0 * coeffs[0] * coeffs[2] >= 0.0 {
        Stability::OverdampedBranch
    } else {
        Stability::ExponentiallyStable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub j: usize,
    pub roots: [Complex64; 4],
    pub max_real: f64,
    pub classification: Stability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub modes: Vec<ModeSpectrum>,
    /// Largest real part over all retained roots.
    pub abscissa: f64,
    pub classification: Stability,
}

pub fn mode_spectrum(j: usize, params: &ModelParams) -> ModeSpectrum {
    let (v, t) = characteristic_factors(j, params);
    let roots = characteristic_roots(j, params);
    let max_real = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    let classification = classify_pair(t, [roots[0], roots[1]]).max(classify_pair(v, [roots[2], roots[3]]));
    ModeSpectrum {
        j,
        roots,
        max_real,
        classification,
    }
}

/// Spectrum of modes `1..=n`.
pub fn spectrum(params: &ModelParams, n: usize) -> SpectrumReport {
    let modes: Vec<ModeSpectrum> = (1..=n).map(|j| mode_spectrum(j, params)).collect();
    let abscissa = modes.iter().map(|m| m.max_real).fold(f64::NEG_INFINITY, f64::max);
    let classification = modes
        .iter()
        .map(|m| m.classification)
        .max()
        .unwrap_or(Stability::ExponentiallyStable);
    SpectrumReport {
        modes,
        abscissa,
        classification,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRate {
    pub rate: f64,
    pub classification: Stability,
}

/// Exponential decay rate of the linear system: minus the spectral abscissa of mode 1.
/// Under the underdamped hypotheses this is `min(mu/(2M), 3 zeta/(2 M l^2))`.
pub fn decay_rate(params: &ModelParams) -> DecayRate {
    let m = mode_spectrum(1, params);
    let rate = if m.classification == Stability::LyapunovStable {
        0.0
    } else {
        (-m.max_real).max(0.0)
    };
    DecayRate {
        rate,
        classification: m.classification,
    }
}

/// e^{-a t} [s sin(b t) + c cos(b t)] with its first two derivatives.
fn damped(a: f64, b: f64, s: f64, c: f64, t: f64) -> [f64; 3] {
    let e = (-a * t).exp();
    let (sn, cs) = (b * t).sin_cos();
    // d/dt maps (s, c) to (-a s - b c, -a c + b s).
    let (s1, c1) = (-a * s - b * c, -a * c + b * s);
    let (s2, c2) = (-a * s1 - b * c1, -a * c1 + b * s1);
    [e * (s * sn + c * cs), e * (s1 * sn + c1 * cs), e * (s2 * sn + c2 * cs)]
}

/// Closed-form coefficients of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub j: usize,
    /// `omega_j`; the vertical oscillation runs at `omega_j / 2`.
    pub omega: f64,
    /// `gamma_j`; the torsional oscillation runs at `3 gamma_j / (2 l^2)`.
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub static_term: f64,
    /// Sine coefficient of `theta_j`, `(2 l^2 th1/3 + zeta' th0) / gamma`.
    pub theta_sin: f64,
    pub theta_cos: f64,
    pub has_vertical: bool,
    pub has_torsion: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub n_w: usize,
    pub n_t: usize,
    /// `mu' / 2`.
    pub vertical_rate: f64,
    /// `3 zeta' / (2 l^2)`.
    pub torsional_rate: f64,
    pub ell: f64,
    pub modes: Vec<ModeSolution>,
    pub classification: Stability,
}

/// Scaled coefficients of the per-mass system.
struct Scaled {
    mu: f64,
    zeta: f64,
    beta_ups: f64,
    eta: f64,
    ell: f64,
}

impl Scaled {
    fn new(p: &ModelParams) -> Self {
        Self {
            mu: p.mu() / p.mass,
            zeta: p.zeta / p.mass,
            beta_ups: p.beta * p.upsilon / p.mass,
            eta: p.eta() / p.mass,
            ell: p.ell,
        }
    }
}

fn stiffness(params: &ModelParams, basis: &Basis, j: usize) -> (f64, f64) {
    let k = basis.wavenumber(j);
    let k2 = k * k;
    (
        params.bending * k2 * k2 / params.mass,
        (params.eps * k2 * k2 + params.kappa * k2) / params.mass,
    )
}

/// Closed-form solution of the linear modal system (`b = c = S = P = 0`).
///
/// Zero damping is admitted (the undamped limit of the same formulas); the
/// overdamped branch and the resonant case are rejected.
pub fn closed_form(y0: &ModalState, params: &ModelParams, basis: &Basis) -> Result<LinearSolution> {
    params.validate()?;
    y0.check(basis)?;
    let s = Scaled::new(params);
    let l2 = s.ell * s.ell;
    let (kw1, kt1) = stiffness(params, basis, 1);
    if !(s.mu < 2.0 * kw1.sqrt()) {
        return Err(Error::OverdampedBranch(format!(
            "vertical damping mu/M = {} must be below 2 sqrt(D/M) (pi/L)^2 = {}",
            s.mu,
            2.0 * kw1.sqrt()
        )));
    }
    let zeta_max = (4.0 * l2 * kt1 / 3.0).sqrt();
    if !(s.zeta < zeta_max) {
        return Err(Error::OverdampedBranch(format!(
            "torsional damping zeta/M = {} must be below {}",
            s.zeta, zeta_max
        )));
    }
    let n = basis.n_max();
    let mut modes = Vec::with_capacity(n);
    for j in 1..=n {
        let (kw, kt) = stiffness(params, basis, j);
        let has_vertical = j <= basis.n_w();
        let has_torsion = j <= basis.n_t();
        let omega = (4.0 * kw - s.mu * s.mu).sqrt();
        let gamma = (4.0 * l2 * kt / 3.0 - s.zeta * s.zeta).sqrt();
        let (th0, th1) = if has_torsion {
            (y0.th[j - 1], y0.thdot[j - 1])
        } else {
            (0.0, 0.0)
        };
        let theta_sin = (2.0 * l2 * th1 / 3.0 + s.zeta * th0) / gamma;

        let (mut a, mut b, mut c1, mut c2, mut static_term) = (0.0, 0.0, 0.0, 0.0, 0.0);
        if has_vertical {
            static_term = basis.constant_projection(params.gravity, j) / kw;
            if has_torsion && (th0 != 0.0 || th1 != 0.0) {
                let lhs = (s.zeta - l2 * s.mu / 3.0).abs();
                let rhs = RESONANCE_TOL * s.zeta.max(l2 * s.mu / 3.0);
                let fl = 3.0 * gamma / l2;
                if lhs <= rhs && (omega - fl).abs() <= RESONANCE_TOL * omega.max(fl) {
                    return Err(Error::ResonantCase { mode: j });
                }
                let (aa, bb) = particular(&s, kw, gamma, th0, th1);
                a = aa;
                b = bb;
            }
            let (w0, w1) = (y0.w[j - 1], y0.wdot[j - 1]);
            c2 = w0 - b - static_term;
            c1 = (2.0 * w1 * l2 + w0 * s.mu * l2 - 3.0 * a * gamma + b * (3.0 * s.zeta - s.mu * l2)
                - static_term * s.mu * l2)
                / (omega * l2);
        }
        modes.push(ModeSolution {
            j,
            omega,
            gamma,
            a,
            b,
            c1,
            c2,
            static_term,
            theta_sin: if has_torsion { theta_sin } else { 0.0 },
            theta_cos: th0,
            has_vertical,
            has_torsion,
        });
    }
    let classification = spectrum(params, n).classification;
    Ok(LinearSolution {
        n_w: basis.n_w(),
        n_t: basis.n_t(),
        vertical_rate: 0.5 * s.mu,
        torsional_rate: 1.5 * s.zeta / l2,
        ell: s.ell,
        modes,
        classification,
    })
}

/// Particular-solution coefficients `(A_j, B_j)`.
fn particular(s: &Scaled, kw: f64, gamma: f64, th0: f64, th1: f64) -> (f64, f64) {
    let l2 = s.ell * s.ell;
    let (mu, zeta, bu, eta) = (s.mu, s.zeta, s.beta_ups, s.eta);
    let g2 = gamma * gamma;
    let p = 4.0 * kw * l2 * l2 - 9.0 * g2 - 6.0 * l2 * zeta * mu + 9.0 * zeta * zeta;
    let q = l2 * mu - 3.0 * zeta;
    let den = p * p + 36.0 * g2 * q * q;
    let lead = (4.0 * kw * l2 * l2 + 9.0 * g2 + 6.0 * l2 * zeta * mu + 9.0 * zeta * zeta).powi(2)
        + 36.0 * g2 * (l2 * mu + 3.0 * zeta).powi(2);
    if den < 1e-8 * lead {
        log::warn!("near-resonant mode: particular-solution denominator {den:.3e} vs {lead:.3e}");
    }
    let m = 3.0 * zeta * th0 + 2.0 * l2 * th1;
    let a = 2.0 * l2 / (3.0 * gamma * den)
        * (p * (9.0 * th0 * (g2 + zeta * zeta) * bu + 6.0 * l2 * th1 * zeta * bu - 2.0 * l2 * m * eta)
            + 18.0 * g2 * (-q) * (m * bu - 3.0 * th0 * zeta * bu + 2.0 * l2 * th0 * eta));
    let b = 2.0 * l2 / den
        * (p * (-m * bu + 3.0 * th0 * zeta * bu - 2.0 * l2 * th0 * eta)
            + (-q) * (18.0 * th0 * (g2 + zeta * zeta) * bu + 12.0 * l2 * th1 * zeta * bu - 4.0 * l2 * m * eta));
    (a, b)
}

impl LinearSolution {
    /// Modal positions, velocities and accelerations at time `t`.
    pub fn eval_full(&self, t: f64) -> (ModalState, Vec<f64>, Vec<f64>) {
        let mut st = ModalState {
            t,
            w: vec![0.0; self.n_w],
            wdot: vec![0.0; self.n_w],
            th: vec![0.0; self.n_t],
            thdot: vec![0.0; self.n_t],
        };
        let mut wdd = vec![0.0; self.n_w];
        let mut thdd = vec![0.0; self.n_t];
        let l2 = self.ell * self.ell;
        for m in &self.modes {
            let i = m.j - 1;
            let tf = 1.5 * m.gamma / l2;
            if m.has_vertical {
                let h = damped(self.vertical_rate, 0.5 * m.omega, m.c1, m.c2, t);
                let p = damped(self.torsional_rate, tf, m.a, m.b, t);
                st.w[i] = h[0] + p[0] + m.static_term;
                st.wdot[i] = h[1] + p[1];
                wdd[i] = h[2] + p[2];
            }
            if m.has_torsion {
                let th = damped(self.torsional_rate, tf, m.theta_sin, m.theta_cos, t);
                st.th[i] = th[0];
                st.thdot[i] = th[1];
                thdd[i] = th[2];
            }
        }
        (st, wdd, thdd)
    }

    pub fn eval(&self, t: f64) -> ModalState {
        self.eval_full(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn factor_residual(c: [f64; 3], r: Complex64) -> f64 {
        let v = c[0] * r * r + c[1] * r + c[2];
        v.norm() / (c[0] * r.norm_sqr() + c[1].abs() * r.norm() + c[2].abs())
    }

    fn damped_params() -> ModelParams {
        ModelParams {
            eps: 1.0,
            kappa: 0.5,
            ell: 1.0,
            delta: 0.1,
            zeta: 0.2,
            beta: 0.3,
            upsilon: 0.5,
            wind_speed: 2.0,
            gravity: 0.4,
            ..ModelParams::default()
        }
    }

    #[test]
    fn undamped_vertical_pair() {
        let p = ModelParams::default();
        for j in 1..5 {
            let r = characteristic_roots(j, &p);
            let jj = (j * j) as f64;
            assert!(r[2].re.abs() < 1e-15 && (r[2].im - jj).abs() < 1e-12);
            assert!(r[3].re.abs() < 1e-15 && (r[3].im + jj).abs() < 1e-12);
        }
        assert_eq!(decay_rate(&p).rate, 0.0);
        assert_eq!(decay_rate(&p).classification, Stability::LyapunovStable);
    }

    #[test]
    fn undamped_torsion_pair_unit() {
        let p = ModelParams {
            ell: 3f64.sqrt(),
            ..ModelParams::default()
        };
        let r = characteristic_roots(1, &p);
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_satisfy_factors() {
        let p = damped_params();
        for j in 1..=10 {
            let (v, t) = characteristic_factors(j, &p);
            let r = characteristic_roots(j, &p);
            assert!(factor_residual(t, r[0]) < 1e-12);
            assert!(factor_residual(t, r[1]) < 1e-12);
            assert!(factor_residual(v, r[2]) < 1e-12);
            assert!(factor_residual(v, r[3]) < 1e-12);
        }
        // Overdamped real roots too.
        let heavy = ModelParams { delta: 5.0, ..p };
        let (v, _) = characteristic_factors(1, &heavy);
        let r = characteristic_roots(1, &heavy);
        assert_eq!(r[2].im, 0.0);
        assert!(factor_residual(v, r[2]) < 1e-12 && factor_residual(v, r[3]) < 1e-12);
        assert_eq!(mode_spectrum(1, &heavy).classification, Stability::OverdampedBranch);
    }

    #[test]
    fn decay_rate_formula() {
        // mu = 0.2 with 3 zeta / (2 l^2) = 0.3: rate mu/2.
        let p = ModelParams {
            delta: 0.2,
            zeta: 0.2,
            ..ModelParams::default()
        };
        let d = decay_rate(&p);
        assert!((d.rate - 0.1).abs() < 1e-14);
        assert_eq!(d.classification, Stability::ExponentiallyStable);
        let q = ModelParams { zeta: 0.0, ..p };
        assert_eq!(decay_rate(&q).rate, 0.0);
        assert_eq!(decay_rate(&q).classification, Stability::LyapunovStable);
    }

    fn state(basis: &Basis, seed: u64) -> ModalState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = ModalState::zeros(basis);
        for v in
            s.w.iter_mut()
                .chain(s.wdot.iter_mut())
                .chain(s.th.iter_mut())
                .chain(s.thdot.iter_mut())
        {
            *v = rng.gen_range(-1.0..1.0);
        }
        s
    }

    #[test]
    fn initial_data_reproduced() {
        let p = damped_params();
        let basis = Basis::nondimensional(5, 3).unwrap();
        let y0 = state(&basis, 3);
        let sol = closed_form(&y0, &p, &basis).unwrap();
        let at0 = sol.eval(0.0);
        for (a, b) in at0.to_vec().iter().zip(y0.to_vec()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn solution_satisfies_modal_odes() {
        let p = damped_params();
        let basis = Basis::nondimensional(4, 4).unwrap();
        let y0 = state(&basis, 8);
        let sol = closed_form(&y0, &p, &basis).unwrap();
        for step in 0..200 {
            let t = 0.05 * step as f64;
            let (s, wdd, thdd) = sol.eval_full(t);
            for j in 0..4 {
                let k = (j + 1) as f64;
                let g = basis.constant_projection(p.gravity, j + 1);
                let r = wdd[j]
                    + p.mu() * s.wdot[j]
                    + k.powi(4) * s.w[j]
                    + p.beta * p.upsilon * s.thdot[j]
                    + p.eta() * s.th[j]
                    - g;
                assert!(r.abs() < 1e-10, "w residual {r} at t = {t}");
                let rt = p.ell * p.ell / 3.0 * thdd[j]
                    + p.zeta * s.thdot[j]
                    + (p.eps * k.powi(4) + p.kappa * k * k) * s.th[j];
                assert!(rt.abs() < 1e-10, "theta residual {rt}");
            }
        }
    }

    #[test]
    fn homogeneous_theta_gives_no_particular_part() {
        let p = damped_params();
        let basis = Basis::nondimensional(3, 3).unwrap();
        let mut y0 = state(&basis, 1);
        y0.th.iter_mut().for_each(|v| *v = 0.0);
        y0.thdot.iter_mut().for_each(|v| *v = 0.0);
        let sol = closed_form(&y0, &p, &basis).unwrap();
        for m in &sol.modes {
            assert_eq!((m.a, m.b), (0.0, 0.0));
        }
        let late = sol.eval(200.0);
        for j in 0..3 {
            assert!((late.w[j] - sol.modes[j].static_term).abs() < 1e-6);
        }
        assert!((sol.modes[0].static_term - 0.4 * (2.0 * PI).sqrt() * 2.0 / PI).abs() < 1e-12);
        assert_eq!(sol.modes[1].static_term, 0.0);
    }

    #[test]
    fn overdamped_and_resonant_rejected() {
        let basis = Basis::nondimensional(2, 2).unwrap();
        let y0 = state(&basis, 2);
        let heavy = ModelParams {
            delta: 2.5,
            ..damped_params()
        };
        assert!(matches!(
            closed_form(&y0, &heavy, &basis),
            Err(Error::OverdampedBranch(_))
        ));
        let stiff = ModelParams {
            zeta: 5.0,
            ..damped_params()
        };
        assert!(matches!(
            closed_form(&y0, &stiff, &basis),
            Err(Error::OverdampedBranch(_))
        ));
        // zeta = l^2 mu / 3 and omega_1 = 3 gamma_1 / l^2 with l = 1, kappa = 0:
        // omega^2 = 4 - mu^2, gamma^2 = 4 eps/3 - zeta^2 → eps = (4 - mu^2 + 9 zeta^2)/12.
        let mu: f64 = 0.3;
        let zeta = mu / 3.0;
        let res = ModelParams {
            delta: 0.0,
            beta: mu,
            zeta,
            eps: (4.0 - mu * mu + 9.0 * zeta * zeta) / 12.0,
            kappa: 0.0,
            ell: 1.0,
            upsilon: 0.2,
            wind_speed: 1.0,
            ..ModelParams::default()
        };
        assert!(matches!(
            closed_form(&y0, &res, &basis),
            Err(Error::ResonantCase { mode: 1 })
        ));
    }

    #[test]
    fn undamped_torsion_formula() {
        let p = ModelParams {
            eps: 2.0,
            kappa: 0.7,
            ell: 1.3,
            ..ModelParams::default()
        };
        let basis = Basis::nondimensional(1, 3).unwrap();
        let mut y0 = ModalState::zeros(&basis);
        y0.th = vec![0.2, -0.1, 0.05];
        y0.thdot = vec![0.3, 0.0, -0.4];
        let sol = closed_form(&y0, &p, &basis).unwrap();
        for j in 1..=3 {
            let k = j as f64;
            let g = 3f64.sqrt() * k / p.ell * (p.eps * k * k + p.kappa).sqrt();
            let t = 1.7;
            let oracle = y0.thdot[j - 1] / g * (g * t).sin() + y0.th[j - 1] * (g * t).cos();
            assert!((sol.eval(t).th[j - 1] - oracle).abs() < 1e-12);
        }
    }
}
