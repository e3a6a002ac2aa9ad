//! Energies, the energy identity, the Lyapunov functional and randomized
//! checks of the cable and interpolation inequalities.

use crate::cable::CableGeometry;
use crate::dynamics::{ModalState, Model, ModelParams};
use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::spectral::{eval_modal, Basis, QuadratureGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Energy channels of one state. Dimensional weights are included, so with
/// `M = D = 1` these are the nondimensional functionals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub kinetic_w: f64,
    pub bending: f64,
    pub kinetic_th: f64,
    pub warping: f64,
    pub torsion: f64,
    pub stretch: f64,
    pub prestress: f64,
    pub load: f64,
    pub cable: f64,
    /// Quadratic energy `E`.
    pub e: f64,
    /// `E + stretch + cable`.
    pub e_plus: f64,
    /// Full energy `E_+ + prestress + load`.
    pub e_full: f64,
}

/// Quadratic energy of `(w, w_t; theta, theta_t)`.
pub fn quadratic_energy(params: &ModelParams, basis: &Basis, s: &ModalState) -> f64 {
    let p = params;
    0.5 * p.mass * basis.norm0_sq(&s.wdot)
        + 0.5 * p.bending * basis.norm2_sq(&s.w)
        + p.torsional_inertia() * 0.5 * basis.norm0_sq(&s.thdot)
        + 0.5 * p.eps * basis.norm2_sq(&s.th)
        + 0.5 * p.kappa * basis.norm1_sq(&s.th)
}

/// `Pi(w + l theta) + Pi(w - l theta)`.
pub fn cable_energy(
    w: &[f64],
    th: &[f64],
    ell: f64,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if geometry.is_inactive() {
        return Ok(0.0);
    }
    let wx = eval_modal(w, basis, grid, 1)?;
    let tx = eval_modal(th, basis, grid, 1)?;
    let up: Vec<f64> = wx.iter().zip(&tx).map(|(a, b)| a + ell * b).collect();
    let um: Vec<f64> = wx.iter().zip(&tx).map(|(a, b)| a - ell * b).collect();
    Ok(geometry.pi_nodal(&up) + geometry.pi_nodal(&um))
}

pub fn energies(state: &ModalState, model: &Model) -> Result<EnergyBreakdown> {
    let basis = model.basis();
    state.check(basis)?;
    let p = model.params();
    let h1 = basis.norm1_sq(&state.w);
    let mut b = EnergyBreakdown {
        kinetic_w: 0.5 * p.mass * basis.norm0_sq(&state.wdot),
        bending: 0.5 * p.bending * basis.norm2_sq(&state.w),
        kinetic_th: p.torsional_inertia() * 0.5 * basis.norm0_sq(&state.thdot),
        warping: 0.5 * p.eps * basis.norm2_sq(&state.th),
        torsion: 0.5 * p.kappa * basis.norm1_sq(&state.th),
        stretch: 0.25 * p.stretching * h1 * h1,
        prestress: -0.5 * p.prestress * h1,
        load: -model.load().iter().zip(&state.w).map(|(g, w)| g * w).sum::<f64>(),
        cable: cable_energy(&state.w, &state.th, p.ell, model.geometry(), basis, model.grid())?,
        ..Default::default()
    };
    b.e = b.kinetic_w + b.bending + b.kinetic_th + b.warping + b.torsion;
    b.e_plus = b.e + b.stretch + b.cable;
    b.e_full = b.e_plus + b.prestress + b.load;
    Ok(b)
}

/// Fills `traj.diagnostics` with the energy channels of every sample.
pub fn annotate(traj: &mut Trajectory, model: &Model) -> Result<()> {
    traj.diagnostics = traj.states.iter().map(|s| energies(s, model)).collect::<Result<_>>()?;
    Ok(())
}

/// Instantaneous dissipated power
/// `mu |w_t|^2 + zeta |th_t|^2 + beta Upsilon (th_t, w_t) + eta (th, w_t)`.
pub fn dissipation(state: &ModalState, params: &ModelParams, basis: &Basis) -> f64 {
    params.mu() * basis.norm0_sq(&state.wdot)
        + params.zeta * basis.norm0_sq(&state.thdot)
        + params.beta * params.upsilon * basis.inner0(&state.thdot, &state.wdot)
        + params.eta() * basis.inner0(&state.th, &state.wdot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub times: Vec<f64>,
    /// `E(t) - E(0) + int_0^t power`.
    pub residual: Vec<f64>,
    /// `max |R| / max(|E(0)|, 1)`.
    pub max_relative: f64,
}

/// Energy identity residual with time integrals by the composite trapezoid rule.
pub fn energy_identity_residual(traj: &Trajectory, model: &Model) -> Result<IdentityResidual> {
    if traj.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: traj.len(),
        });
    }
    let full: Vec<f64> = if traj.diagnostics.len() == traj.len() {
        traj.diagnostics.iter().map(|d| d.e_full).collect()
    } else {
        traj.states
            .iter()
            .map(|s| energies(s, model).map(|e| e.e_full))
            .collect::<Result<_>>()?
    };
    let power: Vec<f64> = traj
        .states
        .iter()
        .map(|s| dissipation(s, model.params(), model.basis()))
        .collect();
    let mut residual = Vec::with_capacity(traj.len());
    let mut acc = 0.0;
    residual.push(0.0);
    for i in 1..traj.len() {
        acc += 0.5 * (traj.times[i] - traj.times[i - 1]) * (power[i] + power[i - 1]);
        residual.push(full[i] - full[0] + acc);
    }
    let scale = full[0].abs().max(1.0);
    let max_relative = residual.iter().fold(0.0f64, |m, r| m.max(r.abs())) / scale;
    Ok(IdentityResidual {
        times: traj.times.clone(),
        residual,
        max_relative,
    })
}

/// `V = Efull + nu (w_t, w) + nu mu/2 |w|^2 + nu (th_t, th) + nu zeta/2 |th|^2
///  + beta Upsilon (th_t, w) + eta (th, w)`.
pub fn lyapunov_value(state: &ModalState, model: &Model, nu: f64) -> Result<f64> {
    let e = energies(state, model)?;
    Ok(e.e_full + lyapunov_cross_terms(state, model.params(), model.basis(), nu))
}

fn lyapunov_cross_terms(s: &ModalState, p: &ModelParams, basis: &Basis, nu: f64) -> f64 {
    nu * basis.inner0(&s.wdot, &s.w)
        + 0.5 * nu * p.mu() * basis.norm0_sq(&s.w)
        + nu * basis.inner0(&s.thdot, &s.th)
        + 0.5 * nu * p.zeta * basis.norm0_sq(&s.th)
        + p.beta * p.upsilon * basis.inner0(&s.thdot, &s.w)
        + p.eta() * basis.inner0(&s.th, &s.w)
}

/// Explicit constants of `c0 E_+ - c2 <= V <= c1 E_+ + c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovBounds {
    pub nu: f64,
    pub c0: f64,
    pub c1: f64,
    /// Offset of the lower bound.
    pub c2_lower: f64,
    /// Offset of the upper bound.
    pub c2_upper: f64,
    /// `max(c2_lower, c2_upper)`.
    pub c2: f64,
}

/// Constants of the two-sided Lyapunov bound for the nondimensional model
/// (`M = D = 1`, `S > 0`, `mu, zeta > 0`). Every Young splitting is carried
/// out with the smallest eigenvalues `(pi/L)^4`, `(pi/L)^2`, and the cable
/// energy enters through its lower bound `-2 c int xi0^2`.
pub fn lyapunov_bounds(model: &Model, nu: f64) -> Result<LyapunovBounds> {
    let p = model.params();
    if p.mass != 1.0 || p.bending != 1.0 {
        return Err(Error::Unsupported("Lyapunov bounds are derived for M = D = 1".into()));
    }
    if !(p.stretching > 0.0) {
        return Err(Error::Unsupported("Lyapunov bounds need S > 0".into()));
    }
    let mu = p.mu();
    if !(mu > 0.0 && p.zeta > 0.0) {
        return Err(Error::Unsupported("Lyapunov bounds need mu, zeta > 0".into()));
    }
    if !(nu > 0.0) {
        return Err(crate::error::invalid("nu", "must be positive"));
    }
    let basis = model.basis();
    let lam2 = basis.wavenumber(1).powi(4);
    let lam1 = basis.wavenumber(1).powi(2);
    let lam_th = p.eps * lam2 + p.kappa * lam1;
    let l2 = p.ell * p.ell;
    let g_sq = basis.norm0_sq(model.load());
    let bu = p.beta * p.upsilon;
    let s = p.stretching;
    let k = bu.powi(4) * p.zeta * p.zeta / (2.0 * s * nu.powi(3) * lam1 * lam1)
        + p.eta().powi(4) / (2.0 * s * nu.powi(3) * lam_th * lam_th * lam1 * lam1);
    let cxi = 2.0 * model.geometry().c() * model.geometry().int_xi0_sq();
    let c0 = [1.0 - nu / mu, 1.0 - nu, 1.0 - 6.0 * nu / (p.zeta * l2), 1.0 - 2.0 * nu]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let c1 = [
        1.0 + nu / mu,
        1.0 + nu + 2.0 * nu * mu / lam2,
        1.0 + 6.0 * nu / (p.zeta * l2),
        1.0 + nu + 2.0 * nu * p.zeta / lam_th,
        1.0 + 2.0 * nu,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let m_low = p.prestress.powi(2) / (4.0 * s * nu) + g_sq / (2.0 * nu * lam2) + k;
    let m_up = g_sq / (2.0 * nu * lam2) + k;
    let c2_lower = m_low + (1.0 - c0).max(0.0) * cxi;
    let c2_upper = m_up + (c1 - 1.0) * cxi;
    Ok(LyapunovBounds {
        nu,
        c0,
        c1,
        c2_lower,
        c2_upper,
        c2: c2_lower.max(c2_upper),
    })
}

/// Largest `nu` for which the lower constant `c0` of [`lyapunov_bounds`] is
/// positive: `min(mu, 1/2, zeta l^2 / 6)`.
pub fn lyapunov_nu_max(params: &ModelParams) -> f64 {
    params.mu().min(0.5).min(params.zeta * params.ell * params.ell / 6.0)
}

/// Offset `P^2/(4 S nu) + |g|_0^2/(4 nu)` of the two-sided bound between the
/// full and positive energies, with `|g|_0^2 = g^2 L`.
pub fn energy_offset(params: &ModelParams, nu: f64) -> f64 {
    params.prestress.powi(2) / (4.0 * params.stretching * nu) + params.gravity.powi(2) * params.length / (4.0 * nu)
}

/// Rigorous counterpart of [`energy_offset`] for `M = D = 1`: the load term
/// is split with `(pi/L)^4` and the possibly negative cable energy is bounded
/// by `2 c int xi0^2`.
pub fn energy_offset_rigorous(model: &Model, nu: f64) -> f64 {
    let p = model.params();
    let lam2 = model.basis().wavenumber(1).powi(4);
    let g_sq = model.basis().norm0_sq(model.load());
    let cxi = 2.0 * model.geometry().c() * model.geometry().int_xi0_sq();
    p.prestress.powi(2) / (4.0 * p.stretching * nu) + g_sq / (2.0 * nu * lam2) + nu * cxi
}

/// Lyapunov parameter window.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovParams {
    pub nu: f64,
    pub nubar: f64,
    /// `nu^2 l^2 / (3 beta^2)` at the chosen `nu`.
    pub epsbar: f64,
    /// `l^2 nubar^2 / (3 beta^2)`.
    pub eps_threshold: f64,
    pub admissible: bool,
    pub reason: Option<String>,
}

/// `nubar = min{1/2, mu/(mu+1), zeta/(zeta+2), mu, zeta/2}` and the warping
/// threshold; the chosen `nu` is `nubar / 2`.
pub fn absorbing_params(params: &ModelParams) -> LyapunovParams {
    let mu = params.mu();
    let zeta = params.zeta;
    if !(mu > 0.0 && zeta > 0.0) {
        return LyapunovParams {
            nu: 0.0,
            nubar: 0.0,
            epsbar: 0.0,
            eps_threshold: 0.0,
            admissible: false,
            reason: Some(format!("damping must be positive (mu = {mu}, zeta = {zeta})")),
        };
    }
    let nubar = [0.5, mu / (mu + 1.0), zeta / (zeta + 2.0), mu, zeta / 2.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let nu = 0.5 * nubar;
    let l2 = params.ell * params.ell;
    let b2 = params.beta * params.beta;
    let (epsbar, eps_threshold) = if b2 == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (nu * nu * l2 / (3.0 * b2), l2 * nubar * nubar / (3.0 * b2))
    };
    let admissible = params.eps < eps_threshold;
    let reason = (!admissible).then(|| format!("eps = {} is not below {}", params.eps, eps_threshold));
    LyapunovParams {
        nu,
        nubar,
        epsbar,
        eps_threshold,
        admissible,
        reason,
    }
}

/// Random modal vector with `|c_j| ~ j^-3`, rescaled to `|u|_2 = target`.
pub fn random_modal<R: Rng>(rng: &mut R, basis: &Basis, n: usize, target: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n).map(|j| rng.gen_range(-1.0..1.0) / (j as f64).powi(3)).collect();
    let norm = basis.norm2_sq(&v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|c| *c *= target / norm);
    }
    v
}

/// Random state whose configuration lies in an `H^2` ball of radius `radius`
/// and whose velocities have `L^2` norm at most `radius`.
pub fn random_state<R: Rng>(rng: &mut R, basis: &Basis, radius: f64) -> ModalState {
    let mut r = || radius * rng.gen_range(0.0..1.0f64).sqrt();
    let (rw, rt, rwd, rtd) = (r(), r(), r(), r());
    let scale0 = |v: Vec<f64>, target: f64| -> Vec<f64> {
        let n = basis.norm0_sq(&v).sqrt();
        if n > 0.0 {
            v.into_iter().map(|c| c * target / n).collect()
        } else {
            v
        }
    };
    let w = random_modal(rng, basis, basis.n_w(), rw / 2f64.sqrt());
    let th = random_modal(rng, basis, basis.n_t(), rt / 2f64.sqrt());
    let wd = random_modal(rng, basis, basis.n_w(), 1.0);
    let td = random_modal(rng, basis, basis.n_t(), 1.0);
    ModalState {
        t: 0.0,
        w,
        wdot: scale0(wd, rwd),
        th,
        thdot: scale0(td, rtd),
    }
}

/// Generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Outcome of one inequality over the sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckStat {
    pub name: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen (positive when every sample holds).
    pub worst_slack: f64,
}

impl CheckStat {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            evaluated: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        let tol = 1e-11 * lhs.abs().max(rhs.abs()).max(1.0);
        self.evaluated += 1;
        if !(slack >= -tol) {
            self.violations += 1;
        }
        if slack < self.worst_slack || slack.is_nan() {
            self.worst_slack = slack;
        }
    }

    fn merge(mut self, other: &CheckStat) -> Self {
        self.evaluated += other.evaluated;
        self.violations += other.violations;
        if other.worst_slack < self.worst_slack || other.worst_slack.is_nan() {
            self.worst_slack = other.worst_slack;
        }
        self
    }
}

pub const LEMMA_CHECKS: [&str; 10] = [
    "arc_length_lipschitz",
    "pi_lipschitz",
    "h_weak",
    "h_l2",
    "pi_lower_bound",
    "interpolation",
    "spectral_0_2",
    "spectral_0_1",
    "spectral_1_2",
    "variational",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub samples: usize,
    pub radius: f64,
    pub seed: u64,
    pub checks: Vec<CheckStat>,
    /// Largest `|w|_1^2 - gamma (|w|_2^2 + |w|_1^4)` over the samples, clipped at 0.
    pub interpolation_constant: f64,
    /// Closed-form upper bound `(1 - gamma (pi/L)^2)^2 / (4 gamma)` for the same constant.
    pub interpolation_bound: f64,
    pub gamma: f64,
}

impl LemmaReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum::<usize>()
            + usize::from(self.interpolation_constant > self.interpolation_bound * (1.0 + 1e-12))
    }

    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("samples: {}\n", self.samples));
        out.push_str(&format!("radius: {}\n", self.radius));
        out.push_str(&format!("seed: {}\n", self.seed));
        for c in &self.checks {
            out.push_str(&format!("{}.evaluated: {}\n", c.name, c.evaluated));
            out.push_str(&format!("{}.violations: {}\n", c.name, c.violations));
            if c.evaluated > 0 {
                out.push_str(&format!("{}.worst_slack: {:.6e}\n", c.name, c.worst_slack));
            }
        }
        out.push_str(&format!("interpolation.gamma: {}\n", self.gamma));
        out.push_str(&format!(
            "interpolation.required_constant: {:.6e}\n",
            self.interpolation_constant
        ));
        out.push_str(&format!("interpolation.bound: {:.6e}\n", self.interpolation_bound));
        out.push_str(&format!("violations: {}\n", self.violations()));
        out
    }
}

/// Lipschitz constant of `Pi` on `{|u|_2 <= R}`:
/// `b sqrt(L) (L/pi) R + c max xi0`.
pub fn pi_lipschitz_constant(geometry: &CableGeometry, basis: &Basis, radius: f64) -> f64 {
    let l = basis.length();
    geometry.b() * l.sqrt() * radius / basis.wavenumber(1) + geometry.c() * geometry.max_xi0()
}

fn sample_checks(
    index: u64,
    seed: u64,
    radius: f64,
    gamma: f64,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
) -> Result<(Vec<CheckStat>, f64)> {
    let mut rng = sample_rng(seed, index);
    let n = basis.n_w();
    let mut stats: Vec<CheckStat> = LEMMA_CHECKS.iter().map(|n| CheckStat::new(n)).collect();
    let rv = radius * rng.gen_range(0.0..1.0f64).sqrt();
    let rz = radius * rng.gen_range(0.0..1.0f64).sqrt();
    let v = random_modal(&mut rng, basis, n, rv);
    let z = random_modal(&mut rng, basis, n, rz);
    let phi = random_modal(&mut rng, basis, n, 1.0);

    let vx = eval_modal(&v, basis, grid, 1)?;
    let zx = eval_modal(&z, basis, grid, 1)?;
    let diff_l1 = grid.l1_norm(&vx.iter().zip(&zx).map(|(a, b)| a - b).collect::<Vec<_>>());
    let lv = geometry.arc_length_nodal(&vx);
    let lz = geometry.arc_length_nodal(&zx);
    stats[0].record((lv - lz).abs(), diff_l1);

    let pv = geometry.pi_nodal(&vx);
    let pz = geometry.pi_nodal(&zx);
    let lip = pi_lipschitz_constant(geometry, basis, radius);
    stats[1].record((pv - pz).abs(), lip * diff_l1);

    let k = geometry.bound_constants();
    let mut h = vec![0.0; vx.len()];
    geometry.h_nodal_into(&vx, &mut h);
    let pairing: f64 = grid
        .weights()
        .iter()
        .zip(&h)
        .zip(&vx)
        .map(|((w, h), u)| w * h * u)
        .sum();
    let vx_l1 = grid.l1_norm(&vx);
    stats[2].record(pairing, -pv + k.weak_linear * vx_l1 + k.weak_const);
    stats[3].record(grid.l2_norm_sq(&h), k.l2_linear * vx_l1 * vx_l1 + k.l2_const);
    stats[4].record(-pv, geometry.c() * geometry.int_xi0_sq());

    let n0 = basis.norm0_sq(&v).sqrt();
    let n1 = basis.norm1_sq(&v).sqrt();
    let n2 = basis.norm2_sq(&v).sqrt();
    stats[5].record(n1 * n1, n0 * n2);
    // The spectral inequalities hold with unit constants for the first eigenvalue 1 (L = pi);
    // for general L they are scaled by powers of pi/L.
    let k1 = basis.wavenumber(1);
    stats[6].record(n0 * k1 * k1, n2);
    stats[7].record(n0 * k1, n1);
    stats[8].record(n1 * k1, n2);

    // d/dtau Pi(v + tau phi) = -(h(v), phi_x)_0.
    let phix = eval_modal(&phi, basis, grid, 1)?;
    let tau = 1e-5;
    let shifted = |s: f64| -> Vec<f64> { vx.iter().zip(&phix).map(|(a, b)| a + s * b).collect() };
    let dpi = (geometry.pi_nodal(&shifted(tau)) - geometry.pi_nodal(&shifted(-tau))) / (2.0 * tau);
    let weak: f64 = -grid
        .weights()
        .iter()
        .zip(&h)
        .zip(&phix)
        .map(|((w, h), p)| w * h * p)
        .sum::<f64>();
    let scale = weak
        .abs()
        .max(dpi.abs())
        .max(1e-8 * (geometry.b() + geometry.c()).max(1.0));
    stats[9].record((dpi - weak).abs(), 1e-4 * scale);

    let required = n1 * n1 - gamma * (n2 * n2 + n1.powi(4));
    Ok((stats, required.max(0.0)))
}

/// Randomized check of the cable, Lipschitz, interpolation and spectral
/// inequalities on `samples` states in the `H^2` ball of radius `radius`.
/// Samples run in parallel; sample `i` draws from stream `i` of `seed`.
pub fn lemma_suite(
    samples: usize,
    radius: f64,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
    seed: u64,
) -> Result<LemmaReport> {
    let gamma = 0.1;
    let per_sample: Vec<(Vec<CheckStat>, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample_checks(i, seed, radius, gamma, geometry, basis, grid))
        .collect::<Result<_>>()?;
    let mut checks: Vec<CheckStat> = LEMMA_CHECKS.iter().map(|n| CheckStat::new(n)).collect();
    let mut required = 0.0f64;
    for (stats, req) in &per_sample {
        for (acc, s) in checks.iter_mut().zip(stats) {
            *acc = acc.clone().merge(s);
        }
        required = required.max(*req);
    }
    let lam1 = basis.wavenumber(1).powi(2);
    Ok(LemmaReport {
        samples,
        radius,
        seed,
        checks,
        interpolation_constant: required,
        interpolation_bound: (1.0 - gamma * lam1).max(0.0).powi(2) / (4.0 * gamma),
        gamma,
    })
}

/// `E_{W,Theta}(t)` of the difference of two trajectories on the same sampling grid.
pub fn difference_energy(a: &Trajectory, b: &Trajectory, params: &ModelParams, basis: &Basis) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "trajectory samples",
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut out = Vec::with_capacity(a.len());
    for (i, (sa, sb)) in a.states.iter().zip(&b.states).enumerate() {
        if (a.times[i] - b.times[i]).abs() > 1e-12 * a.times[i].abs().max(1.0) {
            return Err(Error::Unsupported(format!(
                "sampling grids differ at sample {i}: {} vs {}",
                a.times[i], b.times[i]
            )));
        }
        sa.check(basis)?;
        sb.check(basis)?;
        let d = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
        let diff = ModalState {
            t: sa.t,
            w: d(&sa.w, &sb.w),
            wdot: d(&sa.wdot, &sb.wdot),
            th: d(&sa.th, &sb.th),
            thdot: d(&sa.thdot, &sb.thdot),
        };
        out.push(quadratic_energy(params, basis, &diff));
    }
    Ok(out)
}

/// Least-squares slope of `ln(values)` against `times` (non-positive values skipped).
pub fn log_slope(times: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use crate::spectral::make_grid;

    fn model(params: ModelParams, cable: Option<(f64, f64, f64)>, nw: usize, nt: usize) -> Model {
        let basis = Basis::new(params.length, nw, nt).unwrap();
        let grid = make_grid(&basis);
        let geom = match cable {
            Some((a, b, c)) => CableGeometry::new(a, 1.0, b, c, &grid).unwrap(),
            None => CableGeometry::inactive(&grid),
        };
        Model::new(params, geom, basis, grid).unwrap()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let p = ModelParams {
            stretching: 1.0,
            prestress: 0.5,
            gravity: 1.0,
            ..ModelParams::default()
        };
        let m = model(p, Some((0.5, 2.0, 1.0)), 4, 3);
        let e = energies(&ModalState::zeros(m.basis()), &m).unwrap();
        assert_eq!(e, EnergyBreakdown::default());
    }

    #[test]
    fn single_mode_energy() {
        let m = model(ModelParams::default(), None, 4, 2);
        let mut s = ModalState::zeros(m.basis());
        s.w[2] = 0.3;
        s.wdot[2] = -0.5;
        let e = energies(&s, &m).unwrap();
        assert!((e.e - (0.25 / 2.0 + 81.0 * 0.09 / 2.0)).abs() < 1e-13);
        assert_eq!(e.e, e.e_full);
    }

    #[test]
    fn channels_reconstruct_and_bending_matches_quadrature() {
        let p = ModelParams {
            stretching: 1.2,
            prestress: 0.4,
            gravity: 0.9,
            kappa: 0.3,
            ell: 0.8,
            ..ModelParams::default()
        };
        let m = model(p, Some((0.4, 3.0, 2.0)), 5, 3);
        let mut rng = sample_rng(3, 0);
        for _ in 0..20 {
            let s = random_state(&mut rng, m.basis(), 3.0);
            let e = energies(&s, &m).unwrap();
            assert!((e.e_full - (e.e_plus + e.prestress + e.load)).abs() <= 1e-12 * e.e_full.abs().max(1.0));
            assert!((e.e - (e.kinetic_w + e.bending + e.kinetic_th + e.warping + e.torsion)).abs() < 1e-12);
            let wxx = eval_modal(&s.w, m.basis(), m.grid(), 2).unwrap();
            let oracle = 0.5 * m.grid().l2_norm_sq(&wxx);
            assert!((e.bending - oracle).abs() <= 1e-9 * oracle.max(1.0));
            assert!(e.e >= 0.0);
            assert!(e.e_plus >= -2.0 * 2.0 * m.geometry().int_xi0_sq());
        }
    }

    #[test]
    fn identity_residual_needs_samples() {
        let m = model(ModelParams::default(), None, 2, 2);
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![ModalState::zeros(m.basis()); 2],
            diagnostics: vec![],
            steps: 1,
            rejected: 0,
        };
        assert!(matches!(
            energy_identity_residual(&traj, &m),
            Err(Error::TooFewSamples { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn damped_identity_residual_small() {
        let p = ModelParams {
            delta: 0.1,
            zeta: 0.05,
            beta: 0.02,
            upsilon: 0.5,
            wind_speed: 1.0,
            stretching: 0.5,
            ..ModelParams::default()
        };
        let mut m = model(p, Some((0.3, 2.0, 1.0)), 4, 3);
        let mut rng = sample_rng(1, 0);
        let y0 = random_state(&mut rng, m.basis(), 1.0);
        let traj = integrate(&y0, &mut m, &IntegratorConfig::rk4(1e-3, 2.0)).unwrap();
        let r = energy_identity_residual(&traj, &m).unwrap();
        assert!(r.max_relative < 1e-6, "{}", r.max_relative);
    }

    #[test]
    fn lyapunov_limits() {
        let p = ModelParams {
            delta: 0.3,
            zeta: 0.4,
            stretching: 1.0,
            ..ModelParams::default()
        };
        let m = model(p, Some((0.3, 2.0, 1.0)), 4, 3);
        assert_eq!(lyapunov_value(&ModalState::zeros(m.basis()), &m, 0.1).unwrap(), 0.0);
        let mut rng = sample_rng(2, 0);
        let s = random_state(&mut rng, m.basis(), 2.0);
        let e = energies(&s, &m).unwrap().e_full;
        assert!((lyapunov_value(&s, &m, 1e-12).unwrap() - e).abs() < 1e-10);
    }

    #[test]
    fn lyapunov_bounds_hold_on_samples() {
        let p = ModelParams {
            delta: 0.5,
            zeta: 0.8,
            beta: 0.3,
            upsilon: 0.4,
            wind_speed: 2.0,
            stretching: 1.5,
            prestress: 0.6,
            gravity: 0.7,
            kappa: 0.2,
            ..ModelParams::default()
        };
        let m = model(p, Some((0.3, 2.0, 1.0)), 5, 3);
        let nu = lyapunov_nu_max(&p).min(absorbing_params(&p).nubar) * 0.5;
        let b = lyapunov_bounds(&m, nu).unwrap();
        assert!(b.c0 > 0.0 && b.c1 > 1.0);
        for i in 0..200 {
            let mut rng = sample_rng(17, i);
            let s = random_state(&mut rng, m.basis(), 5.0);
            let v = lyapunov_value(&s, &m, nu).unwrap();
            let ep = energies(&s, &m).unwrap().e_plus;
            assert!(v >= b.c0 * ep - b.c2 - 1e-9, "lower at {i}");
            assert!(v <= b.c1 * ep + b.c2 + 1e-9, "upper at {i}");
        }
        assert!(lyapunov_bounds(&m.with_params(ModelParams { stretching: 0.0, ..p }).unwrap(), nu).is_err());
    }

    #[test]
    fn absorbing_params_examples() {
        let p = ModelParams {
            delta: 0.0,
            beta: 1.0,
            zeta: 1.0,
            ell: 1.0,
            eps: 0.01,
            ..ModelParams::default()
        };
        let l = absorbing_params(&p);
        assert!((l.nubar - 1.0 / 3.0).abs() < 1e-15);
        assert!((l.eps_threshold - 1.0 / 27.0).abs() < 1e-15);
        assert!(l.admissible);
        assert!(!absorbing_params(&ModelParams { eps: 0.1, ..p }).admissible);

        let tiny = absorbing_params(&ModelParams {
            delta: 1.0,
            beta: 0.0,
            ..p
        });
        assert!(tiny.eps_threshold.is_infinite() && tiny.admissible);

        let tnb = absorbing_params(&ModelParams {
            delta: 0.0,
            beta: 1e-2,
            zeta: 0.01,
            ..p
        });
        // zeta/(zeta + 2) = 0.01/2.01 is the binding entry, just below zeta/2.
        assert!((tnb.nubar - 0.01 / 2.01).abs() < 1e-15);

        let undamped = absorbing_params(&ModelParams::default());
        assert!(!undamped.admissible && undamped.reason.is_some());
    }

    #[test]
    fn lemma_suite_empty_and_small() {
        let basis = Basis::nondimensional(6, 3).unwrap();
        let grid = make_grid(&basis);
        let geom = CableGeometry::new(0.5, 1.0, 20.0, 1.0, &grid).unwrap();
        let empty = lemma_suite(0, 5.0, &geom, &basis, &grid, 1).unwrap();
        assert_eq!(empty.violations(), 0);
        assert!(empty.checks.iter().all(|c| c.evaluated == 0));
        let r = lemma_suite(64, 5.0, &geom, &basis, &grid, 1).unwrap();
        assert_eq!(r.violations(), 0, "{}", r.to_text());
        assert!(r.to_text().contains("h_weak.violations: 0"));
        let again = lemma_suite(64, 5.0, &geom, &basis, &grid, 1).unwrap();
        assert_eq!(r, again);
        assert!((r.interpolation_bound - 2.025).abs() < 1e-12);
    }

    #[test]
    fn difference_energy_of_identical_runs() {
        let mut m = model(
            ModelParams {
                delta: 0.1,
                ..ModelParams::default()
            },
            None,
            3,
            2,
        );
        let mut rng = sample_rng(4, 0);
        let y0 = random_state(&mut rng, m.basis(), 1.0);
        let t = integrate(&y0, &mut m, &IntegratorConfig::rk4(1e-2, 1.0)).unwrap();
        let d = difference_energy(&t, &t, m.params(), m.basis()).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
        let short = Trajectory {
            times: t.times[..3].to_vec(),
            states: t.states[..3].to_vec(),
            ..t.clone()
        };
        assert!(difference_energy(&t, &short, m.params(), m.basis()).is_err());
    }

    #[test]
    fn log_slope_recovers_rate() {
        let t: Vec<f64> = (0..100).map(|i| 0.1 * i as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        assert!((log_slope(&t, &v).unwrap() + 0.7).abs() < 1e-12);
        assert!(log_slope(&[1.0], &[1.0]).is_none());
    }
}
