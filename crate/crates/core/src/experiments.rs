//! Tacoma Narrows preset, the four wind scenarios, envelope ratios and
//! wind-parameter sweeps.

use crate::cable::{CableGeometry, PhysicalCable};
use crate::diagnostics::{self, lyapunov_bounds, random_state, sample_rng};
use crate::dynamics::{ModalState, Model, ModelParams};
use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorConfig, Method, Trajectory};
use crate::spectral::{make_grid, Basis, QuadratureGrid};
use rand::Rng;
use rayon::prelude::*;

/// Mechanical data of the Tacoma Narrows bridge (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TnbTable {
    /// Young modulus of the deck (Pa).
    pub young_deck: f64,
    /// Young modulus of the cables (Pa).
    pub young_cable: f64,
    /// Shear modulus of the deck (Pa).
    pub shear: f64,
    pub length: f64,
    pub half_width: f64,
    pub sag: f64,
    /// Moment of inertia of the deck section (m^4).
    pub inertia: f64,
    /// Torsional constant (m^4).
    pub torsion_const: f64,
    /// Warping constant (m^6).
    pub warping_const: f64,
    /// Deck section area (m^2).
    pub area: f64,
    /// Cable section area (m^2).
    pub cable_area: f64,
    pub mass: f64,
    /// Horizontal cable tension (N).
    pub tension: f64,
    /// Cable length (m).
    pub cable_length: f64,
    pub gravity: f64,
}

impl Default for TnbTable {
    fn default() -> Self {
        Self {
            young_deck: 210_000e6,
            young_cable: 185_000e6,
            shear: 81_000e6,
            length: 853.44,
            half_width: 6.0,
            sag: 70.71,
            inertia: 0.154,
            torsion_const: 6.07e-6,
            warping_const: 5.44,
            area: 1.85,
            cable_area: 0.1228,
            mass: 7198.0,
            tension: 45_413e3,
            cable_length: 868.815,
            gravity: 9.8,
        }
    }
}

/// Longest hanger used by the preset. It only shifts the cable rest shape,
/// which enters the model through `s_x`.
pub const TNB_HANGER: f64 = 1.0;

impl TnbTable {
    /// `H = M g L^2 / (16 f)`.
    pub fn derived_tension(&self) -> f64 {
        self.mass * self.gravity * self.length.powi(2) / (16.0 * self.sag)
    }

    /// `a = M g / (2 H)` with the tabulated tension.
    pub fn cable_a(&self) -> f64 {
        self.mass * self.gravity / (2.0 * self.tension)
    }

    /// Sag `a L^2 / 8` of the rest shape.
    pub fn derived_sag(&self) -> f64 {
        self.cable_a() * self.length.powi(2) / 8.0
    }

    /// `S = A E / (2 L)`.
    pub fn stretching(&self) -> f64 {
        self.area * self.young_deck / (2.0 * self.length)
    }

    pub fn physical_cable(&self, tabulated_length: bool) -> PhysicalCable {
        PhysicalCable {
            mass: self.mass,
            gravity: self.gravity,
            tension: self.tension,
            area: self.cable_area,
            young: self.young_cable,
            tabulated_length: tabulated_length.then_some(self.cable_length),
            s0: TNB_HANGER,
        }
    }

    /// Structural parameters with all damping, wind, prestress and stretching off.
    pub fn params(&self) -> ModelParams {
        ModelParams {
            mass: self.mass,
            bending: self.young_deck * self.inertia,
            eps: self.young_deck * self.warping_const,
            kappa: self.shear * self.torsion_const,
            ell: self.half_width,
            delta: 0.0,
            zeta: 0.0,
            beta: 0.0,
            upsilon: self.half_width,
            wind_speed: 0.0,
            prestress: 0.0,
            stretching: 0.0,
            gravity: self.gravity,
            length: self.length,
        }
    }
}

/// A ready-to-run model.
#[derive(Debug, Clone)]
pub struct Preset {
    pub params: ModelParams,
    pub geometry: CableGeometry,
    pub basis: Basis,
    pub grid: QuadratureGrid,
}

impl Preset {
    pub fn model(&self) -> Result<Model> {
        Model::new(self.params, self.geometry.clone(), self.basis, self.grid.clone())
    }
}

/// TNB preset with `n_w = 10`, `n_t = 4`: `D = E I`, `eps = E J`, `kappa = G K`,
/// `a = M g/(2H)`, `b = A_c E_c / L0` (tabulated `L0`), `c = H`.
pub fn tnb_preset() -> Preset {
    tnb_preset_with(&TnbTable::default(), 10, 4).expect("tabulated TNB data are valid")
}

pub fn tnb_preset_with(table: &TnbTable, n_w: usize, n_t: usize) -> Result<Preset> {
    let basis = Basis::new(table.length, n_w, n_t)?;
    let grid = make_grid(&basis);
    let geometry = CableGeometry::from_physical(&table.physical_cable(true), &grid)?;
    Ok(Preset {
        params: table.params(),
        geometry,
        basis,
        grid,
    })
}

/// A named, fully specified run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub geometry: CableGeometry,
    pub basis: Basis,
    pub grid: QuadratureGrid,
    pub initial: ModalState,
    pub integrator: IntegratorConfig,
    /// Output column names (`th_1`, `w_9`, ...).
    pub outputs: Vec<String>,
}

impl Scenario {
    pub fn model(&self) -> Result<Model> {
        Model::new(self.params, self.geometry.clone(), self.basis, self.grid.clone())
    }

    pub fn run(&self) -> Result<Trajectory> {
        let mut model = self.model()?;
        integrate(&self.initial, &mut model, &self.integrator)
    }
}

/// Initial data exciting vertical mode 9 with displayed amplitude 3 m and all
/// other displayed positions and velocities at `1e-3` of it. Displayed
/// amplitudes are converted to modal coefficients by `sqrt(L/2)`.
pub fn tnb_initial(basis: &Basis) -> ModalState {
    let big = 3.0;
    let small = 1e-3 * big;
    let m = |v: f64| basis.modal_from_displayed(v);
    let mut s = ModalState::zeros(basis);
    for j in 0..basis.n_w() {
        s.w[j] = m(if j + 1 == 9 { big } else { small });
        s.wdot[j] = m(small);
    }
    for j in 0..basis.n_t() {
        s.th[j] = m(small);
        s.thdot[j] = m(small);
    }
    s
}

/// Step of `1/points` of the shortest period of the diagonal linearization of
/// `model` at `y0`. Diagonal stiffnesses come from central differences of the
/// acceleration in each position coordinate, so cable and stretching
/// stiffness are included on top of `omega_{n_w}` and `gamma_{n_t}`.
pub fn auto_dt(model: &mut Model, y0: &ModalState, points: f64) -> Result<f64> {
    y0.check(model.basis())?;
    let (nw, nt) = (model.basis().n_w(), model.basis().n_t());
    let y = y0.to_vec();
    let positions: Vec<(usize, usize)> = (0..nw)
        .map(|i| (i, nw + i))
        .chain((0..nt).map(|i| (2 * nw + i, 2 * nw + nt + i)))
        .collect();
    let mut omega_max = 0.0f64;
    for (q, a) in positions {
        let h = 1e-6 * y[q].abs().max(1e-3);
        let mut yp = y.clone();
        let mut ym = y.clone();
        yp[q] += h;
        ym[q] -= h;
        let fp = model.rhs(&ModalState::from_slice(0.0, &yp, nw, nt)?)?.to_vec();
        let fm = model.rhs(&ModalState::from_slice(0.0, &ym, nw, nt)?)?.to_vec();
        let k = -(fp[a] - fm[a]) / (2.0 * h);
        omega_max = omega_max.max(k.max(0.0).sqrt());
    }
    if omega_max == 0.0 {
        return Err(Error::Unsupported("auto step: no positive stiffness".into()));
    }
    Ok(2.0 * std::f64::consts::PI / omega_max / points)
}

pub const TNB_HORIZON: f64 = 120.0;
pub const TNB_BETA: f64 = 1e-2;
pub const TNB_WIND: f64 = 30.0;
pub const TNB_DAMPING: f64 = 0.01;

/// Figure scenarios (i)-(iv) on the TNB preset, `Upsilon = l`, horizon 120 s:
/// (i) no damping, no stretching, no wind; (ii) wind `beta = 1e-2`, `U = 30`;
/// (iii) as (ii) with `S = A E / (2L)`; (iv) as (iii) with `delta = zeta = 0.01`.
pub fn figure_scenarios() -> Result<Vec<Scenario>> {
    let table = TnbTable::default();
    let preset = tnb_preset_with(&table, 10, 4)?;
    let base = preset.params;
    let windy = ModelParams {
        beta: TNB_BETA,
        wind_speed: TNB_WIND,
        ..base
    };
    let stretched = ModelParams {
        stretching: table.stretching(),
        ..windy
    };
    let damped = ModelParams {
        delta: TNB_DAMPING,
        zeta: TNB_DAMPING,
        ..stretched
    };
    let cases = [("fig3", base), ("fig4", windy), ("fig5", stretched), ("fig6", damped)];
    let initial = tnb_initial(&preset.basis);
    let outputs: Vec<String> = (1..=preset.basis.n_t()).map(|j| format!("th_{j}")).collect();
    cases
        .iter()
        .map(|(name, params)| {
            let mut model = Model::new(*params, preset.geometry.clone(), preset.basis, preset.grid.clone())?;
            let dt = auto_dt(&mut model, &initial, 200.0)?;
            Ok(Scenario {
                name: (*name).to_string(),
                params: *params,
                geometry: preset.geometry.clone(),
                basis: preset.basis,
                grid: preset.grid.clone(),
                initial: initial.clone(),
                integrator: IntegratorConfig {
                    method: Method::Rk4,
                    dt,
                    rtol: 1e-8,
                    atol: 1e-10,
                    t_end: TNB_HORIZON,
                    sample_every: dt,
                },
                outputs: outputs.clone(),
            })
        })
        .collect()
}

/// Position channel of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    W(usize),
    Theta(usize),
}

/// `max |channel|` over samples with `t0 <= t <= t1`.
pub fn envelope(traj: &Trajectory, channel: Channel, t0: f64, t1: f64) -> f64 {
    traj.times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= t0 - 1e-9 && **t <= t1 + 1e-9)
        .map(|(_, s)| match channel {
            Channel::W(j) => s.w[j - 1].abs(),
            Channel::Theta(j) => s.th[j - 1].abs(),
        })
        .fold(0.0, f64::max)
}

/// Late over early envelope: `max |.|` on `[T - window, T]` over `max |.|` on `[0, window]`.
pub fn envelope_ratio(traj: &Trajectory, channel: Channel, window: f64) -> f64 {
    let t_end = traj.times.last().copied().unwrap_or(0.0);
    let t_start = traj.times.first().copied().unwrap_or(0.0);
    envelope(traj, channel, t_end - window, t_end) / envelope(traj, channel, t_start, t_start + window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepClass {
    Decay,
    Neutral,
    Growth,
    Failed,
}

impl SweepClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepClass::Decay => "decay",
            SweepClass::Neutral => "neutral",
            SweepClass::Growth => "growth",
            SweepClass::Failed => "failed",
        }
    }
}

/// Classification boundaries on the `theta_2` envelope ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub decay_below: f64,
    pub growth_above: f64,
    /// Width of the early and late windows (s).
    pub window: f64,
    pub mode: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            decay_below: 0.5,
            growth_above: 2.0,
            window: 20.0,
            mode: 2,
        }
    }
}

impl Thresholds {
    pub fn classify(&self, ratio: f64) -> SweepClass {
        if !ratio.is_finite() {
            SweepClass::Failed
        } else if ratio < self.decay_below {
            SweepClass::Decay
        } else if ratio > self.growth_above {
            SweepClass::Growth
        } else {
            SweepClass::Neutral
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub wind_speed: f64,
    pub ratio: f64,
    pub class: SweepClass,
    pub error: Option<String>,
}

/// Removes repeated grid values (exact equality), keeping first occurrences.
pub fn dedup_grid(values: &[f64], name: &str) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if out.contains(&v) {
            log::warn!("duplicate {name} grid value {v} ignored");
        } else {
            out.push(v);
        }
    }
    out
}

/// Envelope-ratio classification for every `(beta, U)` cell, rows in
/// `beta`-major order. Cells run in parallel; failed cells are marked.
pub fn wind_sweep(
    beta_grid: &[f64],
    wind_grid: &[f64],
    base: &Scenario,
    thresholds: &Thresholds,
) -> Result<Vec<SweepRow>> {
    if beta_grid.is_empty() {
        return Err(Error::EmptyGrid("beta"));
    }
    if wind_grid.is_empty() {
        return Err(Error::EmptyGrid("U"));
    }
    let betas = dedup_grid(beta_grid, "beta");
    let winds = dedup_grid(wind_grid, "U");
    for &b in &betas {
        if b != 0.0 && !(1e-5..=1e-2).contains(&b) {
            log::warn!("beta = {b} outside the range [1e-5, 1e-2]");
        }
    }
    for &u in &winds {
        if u.abs() > 30.0 {
            log::warn!("|U| = {} exceeds 30 m/s", u.abs());
        }
    }
    let cells: Vec<(f64, f64)> = betas.iter().flat_map(|&b| winds.iter().map(move |&u| (b, u))).collect();
    Ok(cells
        .par_iter()
        .map(|&(beta, wind_speed)| {
            let scenario = Scenario {
                params: ModelParams {
                    beta,
                    wind_speed,
                    ..base.params
                },
                ..base.clone()
            };
            match scenario.run() {
                Ok(traj) => {
                    let ratio = envelope_ratio(&traj, Channel::Theta(thresholds.mode), thresholds.window);
                    SweepRow {
                        beta,
                        wind_speed,
                        ratio,
                        class: thresholds.classify(ratio),
                        error: None,
                    }
                }
                Err(e) => SweepRow {
                    beta,
                    wind_speed,
                    ratio: f64::NAN,
                    class: SweepClass::Failed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Late-time energy bound evidence for the damped nondimensional model.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingEvidence {
    pub initial_energy: Vec<f64>,
    /// `sup E_+` over the late window of each run.
    pub late_sup: Vec<f64>,
    /// Radius implied by the Lyapunov sandwich once `V <= c2_upper`:
    /// `(c2_lower + c2_upper) / c0`.
    pub bound: f64,
}

/// Runs `runs` random initial data with `E_+(0)` up to `max_energy` over
/// `[0, t_end]` and records `sup E_+` on `[t_late, t_end]`.
pub fn absorbing_evidence(
    model: &Model,
    nu: f64,
    runs: usize,
    max_energy: f64,
    t_late: f64,
    cfg: &IntegratorConfig,
    seed: u64,
) -> Result<AbsorbingEvidence> {
    let bounds = lyapunov_bounds(model, nu)?;
    let results: Vec<(f64, f64)> = (0..runs as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = sample_rng(seed, i);
            let target = max_energy * rng.gen_range(0.1..1.0f64);
            let mut y0 = random_state(&mut rng, model.basis(), 1.0);
            // Scale the state until E_+(0) reaches the target (E_+ grows monotonically with the scale here).
            let e_at = |s: &ModalState| diagnostics::energies(s, model).map(|e| e.e_plus);
            let scale_state = |s: &ModalState, k: f64| ModalState {
                t: 0.0,
                w: s.w.iter().map(|v| k * v).collect(),
                wdot: s.wdot.iter().map(|v| k * v).collect(),
                th: s.th.iter().map(|v| k * v).collect(),
                thdot: s.thdot.iter().map(|v| k * v).collect(),
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            while e_at(&scale_state(&y0, hi))? < target {
                lo = hi;
                hi *= 2.0;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if e_at(&scale_state(&y0, mid))? < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            y0 = scale_state(&y0, hi);
            let e0 = e_at(&y0)?;
            let mut m = model.clone();
            let traj = integrate(&y0, &mut m, cfg)?;
            let mut late = f64::NEG_INFINITY;
            for (t, s) in traj.times.iter().zip(&traj.states) {
                if *t >= t_late {
                    late = late.max(e_at(s)?);
                }
            }
            Ok((e0, late))
        })
        .collect::<Result<_>>()?;
    Ok(AbsorbingEvidence {
        initial_energy: results.iter().map(|r| r.0).collect(),
        late_sup: results.iter().map(|r| r.1).collect(),
        bound: (bounds.c2_lower + bounds.c2_upper) / bounds.c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_consistency() {
        let t = TnbTable::default();
        assert!((t.derived_tension() / t.tension - 1.0).abs() < 1e-3);
        assert!((t.derived_sag() / t.sag - 1.0).abs() < 1e-3);
        let p = tnb_preset();
        assert!((p.geometry.rest_length() - 868.815).abs() < 0.05);
        assert_eq!(p.basis.n_w(), 10);
        assert_eq!(p.basis.n_t(), 4);
        assert!((p.params.bending - 210_000e6 * 0.154).abs() < 1.0);
        assert!((t.stretching() - 1.85 * 210_000e6 / (2.0 * 853.44)).abs() < 1e-3);
        assert!((p.geometry.b() - 0.1228 * 185_000e6 / 868.815).abs() < 1e-6);
    }

    #[test]
    fn initial_data_conversion() {
        let p = tnb_preset();
        let s = tnb_initial(&p.basis);
        let scale = (853.44f64 / 2.0).sqrt();
        assert!((s.w[8] - 3.0 * scale).abs() < 1e-12);
        assert!((s.w[0] - 3e-3 * scale).abs() < 1e-15);
        assert!((p.basis.displayed_from_modal(s.th[3]) - 3e-3).abs() < 1e-15);
    }

    #[test]
    fn tnb_rest_is_equilibrium() {
        let p = tnb_preset();
        let mut m = p.model().unwrap();
        let d = m.rhs(&ModalState::zeros(&p.basis)).unwrap();
        // The tabulated tension balances the weight through a = Mg/(2H).
        assert!(d.wdot.iter().all(|v| v.abs() < 1e-9), "{:?}", d.wdot);
    }

    #[test]
    fn scenarios_are_distinct() {
        let s = figure_scenarios().unwrap();
        assert_eq!(s.len(), 4);
        let names: Vec<&str> = s.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["fig3", "fig4", "fig5", "fig6"]);
        assert_eq!(s[0].params.beta, 0.0);
        assert_eq!(s[1].params.eta(), 0.3);
        assert!(s[2].params.stretching > 0.0);
        assert_eq!(s[3].params.mu(), 0.02);
        for sc in &s {
            assert_eq!(sc.params.upsilon, sc.params.ell);
            assert!(sc.integrator.dt > 1e-4 && sc.integrator.dt < 0.1);
        }
    }

    #[test]
    fn thresholds_classify() {
        let t = Thresholds::default();
        assert_eq!(t.classify(0.1), SweepClass::Decay);
        assert_eq!(t.classify(1.0), SweepClass::Neutral);
        assert_eq!(t.classify(2.0), SweepClass::Neutral);
        assert_eq!(t.classify(2.5), SweepClass::Growth);
        assert_eq!(t.classify(f64::NAN), SweepClass::Failed);
    }

    #[test]
    fn dedup_keeps_order() {
        assert_eq!(dedup_grid(&[1.0, 2.0, 1.0, 3.0, 2.0], "x"), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn empty_sweep_rejected() {
        let s = &figure_scenarios().unwrap()[0];
        assert!(matches!(
            wind_sweep(&[], &[1.0], s, &Thresholds::default()),
            Err(Error::EmptyGrid("beta"))
        ));
        assert!(matches!(
            wind_sweep(&[1.0], &[], s, &Thresholds::default()),
            Err(Error::EmptyGrid("U"))
        ));
    }
}
