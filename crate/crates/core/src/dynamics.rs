//! Modal right-hand side of the fish-bone system.
//!
//! For vertical modes `j = 1..n_w` and torsional modes `j = 1..n_t`, with
//! `k = j pi / L`:
//!
//! ```text
//! M w_j''          = -mu w_j' - D k^4 w_j - [S |w|_1^2 - P] k^2 w_j
//!                    - beta Upsilon theta_j' - eta theta_j + (f, e_j')_0 + M g_j
//! (M l^2/3) th_j'' = -zeta th_j' - (eps k^4 + kappa k^2) th_j + (fbar, e_j')_0
//! ```
//!
//! where `mu = delta + beta`, `eta = beta U` and `g_j` is the projection of
//! the constant load onto `e_j`. Torsional coefficients beyond `n_t` are zero.

use crate::cable::{cable_load_into, CableGeometry, CableScratch};
use crate::error::{invalid, Error, Result};
use crate::integrate::OdeSystem;
use crate::spectral::{Basis, QuadratureGrid};

/// Coefficients of the model. `mu` and `eta` are derived, see [`ModelParams::mu`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Mass per unit length `M`.
    pub mass: f64,
    /// Bending stiffness `D = E I`.
    pub bending: f64,
    /// Warping stiffness `eps = E J`.
    pub eps: f64,
    /// Torsional stiffness `kappa = G K`.
    pub kappa: f64,
    /// Deck half-width.
    pub ell: f64,
    /// Structural vertical damping.
    pub delta: f64,
    /// Torsional damping.
    pub zeta: f64,
    /// Piston-theory flow coefficient.
    pub beta: f64,
    /// Chord offset of the pressure resultant, `|Upsilon| <= ell`.
    pub upsilon: f64,
    /// Freestream speed.
    pub wind_speed: f64,
    /// Prestress.
    pub prestress: f64,
    /// Stretching strength.
    pub stretching: f64,
    /// Vertical load per unit mass.
    pub gravity: f64,
    /// Span.
    pub length: f64,
}

impl Default for ModelParams {
    /// Nondimensional unit model on `(0, pi)` with every coupling switched off.
    fn default() -> Self {
        Self {
            mass: 1.0,
            bending: 1.0,
            eps: 1.0,
            kappa: 0.0,
            ell: 1.0,
            delta: 0.0,
            zeta: 0.0,
            beta: 0.0,
            upsilon: 0.0,
            wind_speed: 0.0,
            prestress: 0.0,
            stretching: 0.0,
            gravity: 0.0,
            length: std::f64::consts::PI,
        }
    }
}

impl ModelParams {
    /// Total vertical damping `delta + beta`.
    pub fn mu(&self) -> f64 {
        self.delta + self.beta
    }

    /// Wind stiffness `beta U`.
    pub fn eta(&self) -> f64 {
        self.beta * self.wind_speed
    }

    /// Torsional inertia `M l^2 / 3`.
    pub fn torsional_inertia(&self) -> f64 {
        self.mass * self.ell * self.ell / 3.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("model.M", self.mass),
            ("model.D", self.bending),
            ("model.eps", self.eps),
            ("model.ell", self.ell),
            ("model.L", self.length),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("model.kappa", self.kappa),
            ("model.delta", self.delta),
            ("model.zeta", self.zeta),
            ("model.beta", self.beta),
            ("model.P", self.prestress),
            ("model.S", self.stretching),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        for (name, v) in [
            ("model.Upsilon", self.upsilon),
            ("model.U", self.wind_speed),
            ("model.g", self.gravity),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if self.upsilon.abs() > self.ell {
            return Err(invalid(
                "model.Upsilon",
                format!("|Upsilon| = {} exceeds the half-width {}", self.upsilon.abs(), self.ell),
            ));
        }
        Ok(())
    }
}

/// Truncated modal state `(w, w_t; theta, theta_t)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub t: f64,
    pub w: Vec<f64>,
    pub wdot: Vec<f64>,
    pub th: Vec<f64>,
    pub thdot: Vec<f64>,
}

impl ModalState {
    pub fn zeros(basis: &Basis) -> Self {
        Self {
            t: 0.0,
            w: vec![0.0; basis.n_w()],
            wdot: vec![0.0; basis.n_w()],
            th: vec![0.0; basis.n_t()],
            thdot: vec![0.0; basis.n_t()],
        }
    }

    pub fn n_w(&self) -> usize {
        self.w.len()
    }

    pub fn n_t(&self) -> usize {
        self.th.len()
    }

    /// Flat layout `[w, wdot, th, thdot]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * (self.n_w() + self.n_t()));
        y.extend_from_slice(&self.w);
        y.extend_from_slice(&self.wdot);
        y.extend_from_slice(&self.th);
        y.extend_from_slice(&self.thdot);
        y
    }

    pub fn from_slice(t: f64, y: &[f64], n_w: usize, n_t: usize) -> Result<Self> {
        let n = 2 * (n_w + n_t);
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                what: "flat state",
                expected: n,
                got: y.len(),
            });
        }
        let (w, rest) = y.split_at(n_w);
        let (wdot, rest) = rest.split_at(n_w);
        let (th, thdot) = rest.split_at(n_t);
        Ok(Self {
            t,
            w: w.to_vec(),
            wdot: wdot.to_vec(),
            th: th.to_vec(),
            thdot: thdot.to_vec(),
        })
    }

    pub fn check(&self, basis: &Basis) -> Result<()> {
        let dims = [
            ("w", self.w.len(), basis.n_w()),
            ("wdot", self.wdot.len(), basis.n_w()),
            ("th", self.th.len(), basis.n_t()),
            ("thdot", self.thdot.len(), basis.n_t()),
        ];
        for (what, got, expected) in dims {
            if got != expected {
                return Err(Error::DimensionMismatch { what, expected, got });
            }
        }
        if !self.to_vec().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { t: self.t });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.w
            .iter()
            .chain(&self.wdot)
            .chain(&self.th)
            .chain(&self.thdot)
            .all(|v| v.is_finite())
    }
}

/// The assembled modal system: parameters, cable, basis and cached mode data.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    geometry: CableGeometry,
    basis: Basis,
    grid: QuadratureGrid,
    k2: Vec<f64>,
    k4: Vec<f64>,
    load: Vec<f64>,
    scratch: CableScratch,
    cable_v: Vec<f64>,
    cable_t: Vec<f64>,
}

impl Model {
    pub fn new(params: ModelParams, geometry: CableGeometry, basis: Basis, grid: QuadratureGrid) -> Result<Self> {
        params.validate()?;
        if (params.length - basis.length()).abs() > 1e-12 * params.length {
            return Err(invalid(
                "model.L",
                format!("span {} differs from the basis span {}", params.length, basis.length()),
            ));
        }
        if grid.n_modes() < basis.n_max() || (grid.length() - basis.length()).abs() > 1e-12 * basis.length() {
            return Err(invalid("basis", "quadrature grid was not built for this basis"));
        }
        if geometry.slope().len() != grid.len() {
            return Err(Error::DimensionMismatch {
                what: "cable geometry vs grid",
                expected: grid.len(),
                got: geometry.slope().len(),
            });
        }
        let n = basis.n_max();
        let k2 = (1..=n).map(|j| basis.wavenumber(j).powi(2)).collect::<Vec<_>>();
        let k4 = k2.iter().map(|k| k * k).collect();
        let load = (1..=basis.n_w())
            .map(|j| params.mass * basis.constant_projection(params.gravity, j))
            .collect();
        let scratch = CableScratch::new(grid.len());
        Ok(Self {
            params,
            geometry,
            cable_v: vec![0.0; basis.n_w()],
            cable_t: vec![0.0; basis.n_t()],
            basis,
            grid,
            k2,
            k4,
            load,
            scratch,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn geometry(&self) -> &CableGeometry {
        &self.geometry
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `(M g, e_j)_0` for the vertical modes.
    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// Same model with a different parameter set (cable and basis shared).
    pub fn with_params(&self, params: ModelParams) -> Result<Self> {
        Self::new(params, self.geometry.clone(), self.basis, self.grid.clone())
    }

    /// Time derivative of `state`.
    pub fn rhs(&mut self, state: &ModalState) -> Result<ModalState> {
        state.check(&self.basis)?;
        let y = state.to_vec();
        let mut dy = vec![0.0; y.len()];
        self.eval_into(&y, &mut dy);
        ModalState::from_slice(state.t, &dy, self.basis.n_w(), self.basis.n_t())
    }

    fn eval_into(&mut self, y: &[f64], dy: &mut [f64]) {
        let nw = self.basis.n_w();
        let nt = self.basis.n_t();
        let (w, rest) = y.split_at(nw);
        let (wd, rest) = rest.split_at(nw);
        let (th, thd) = rest.split_at(nt);
        let p = &self.params;
        let mu = p.mu();
        let eta = p.eta();
        let coupling = p.beta * p.upsilon;

        if self.geometry.is_inactive() {
            self.cable_v.iter_mut().for_each(|v| *v = 0.0);
            self.cable_t.iter_mut().for_each(|v| *v = 0.0);
        } else {
            cable_load_into(
                w,
                th,
                p.ell,
                &self.geometry,
                &self.grid,
                &mut self.scratch,
                &mut self.cable_v,
                &mut self.cable_t,
            );
        }

        let stretch = if p.stretching != 0.0 || p.prestress != 0.0 {
            let h1: f64 = w.iter().zip(&self.k2).map(|(v, k)| k * v * v).sum();
            p.stretching * h1 - p.prestress
        } else {
            0.0
        };

        let (dw, rest) = dy.split_at_mut(nw);
        let (dwd, rest) = rest.split_at_mut(nw);
        let (dth, dthd) = rest.split_at_mut(nt);
        dw.copy_from_slice(wd);
        dth.copy_from_slice(thd);
        let inv_m = 1.0 / p.mass;
        for j in 0..nw {
            let (t, td) = if j < nt { (th[j], thd[j]) } else { (0.0, 0.0) };
            let force =
                -mu * wd[j] - p.bending * self.k4[j] * w[j] - stretch * self.k2[j] * w[j] - coupling * td - eta * t
                    + self.cable_v[j]
                    + self.load[j];
            dwd[j] = force * inv_m;
        }
        let inv_i = 1.0 / p.torsional_inertia();
        for j in 0..nt {
            let force = -p.zeta * thd[j] - (p.eps * self.k4[j] + p.kappa * self.k2[j]) * th[j] + self.cable_t[j];
            dthd[j] = force * inv_i;
        }
    }
}

impl OdeSystem for Model {
    fn dim(&self) -> usize {
        2 * (self.basis.n_w() + self.basis.n_t())
    }

    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.eval_into(y, dy);
    }
}

/// Free function form of [`Model::rhs`].
pub fn rhs(
    state: &ModalState,
    params: &ModelParams,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
) -> Result<ModalState> {
    Model::new(*params, geometry.clone(), *basis, grid.clone())?.rhs(state)
}

/// First-order piston pressure `-beta (w_t + Y theta_t) - eta theta` at `(x, Y)`.
pub fn piston_pressure(state: &ModalState, params: &ModelParams, basis: &Basis, x: f64, chord: f64) -> Result<f64> {
    if !(0.0..=basis.length()).contains(&x) {
        return Err(Error::OutOfDomain(format!("x = {x} not in [0, {}]", basis.length())));
    }
    if chord.abs() > params.ell || !chord.is_finite() {
        return Err(Error::OutOfDomain(format!(
            "|Y| = {} exceeds half-width {}",
            chord.abs(),
            params.ell
        )));
    }
    state.check(basis)?;
    let eval = |c: &[f64]| -> Result<f64> {
        let mut s = 0.0;
        for (i, v) in c.iter().enumerate() {
            s += v * basis.mode(i + 1, x, 0)?;
        }
        Ok(s)
    };
    let wt = eval(&state.wdot)?;
    let tht = eval(&state.thdot)?;
    let th = eval(&state.th)?;
    Ok(-params.beta * (wt + chord * tht) - params.eta() * th)
}
