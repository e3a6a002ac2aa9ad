//! Cable-hanger nonlinearity for two parabolic cables with rigid hangers.
//!
//! Cable rest shape is `s(x) = -(a/2) x^2 + (a L / 2) x + s0`. For a
//! displacement `u` seen by one cable,
//!
//! ```text
//! Xi(u)  = sqrt(1 + (u_x + s_x)^2)          xi0 = Xi(0)
//! L(u)   = int Xi(u)                        L0  = L(0)
//! h(u)   = [b (L0 - L(u)) - c xi0] (u_x + s_x) / Xi(u)
//! Pi(u)  = b/2 (L(u) - L0)^2 + c int xi0 (Xi(u) - xi0)
//! ```
//!
//! The deck couples to the cables through `u = w + l theta` and
//! `u = w - l theta`. Every integral, including `L0`, is evaluated on the
//! shared quadrature grid so that `-(h(u), phi_x)_0` is the exact
//! directional derivative of the discrete `Pi`.

use crate::error::{invalid, Error, Result};
use crate::spectral::{Basis, QuadratureGrid};

/// Physical inputs from which `a`, `b`, `c` are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalCable {
    /// Deck mass per unit length (kg/m).
    pub mass: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
    /// Horizontal cable tension `H` (N).
    pub tension: f64,
    /// Cable section area `A_c` (m^2).
    pub area: f64,
    /// Cable Young modulus `E_c` (Pa).
    pub young: f64,
    /// Tabulated cable length; when absent the computed rest length is used.
    pub tabulated_length: Option<f64>,
    /// Longest hanger `s0` (m).
    pub s0: f64,
}

#[derive(Debug, Clone)]
pub struct CableGeometry {
    a: f64,
    s0: f64,
    b: f64,
    c: f64,
    length: f64,
    sx: Vec<f64>,
    xi0: Vec<f64>,
    rest_length: f64,
    int_abs_sx: f64,
    int_xi0_sq: f64,
    max_xi0: f64,
    weights: Vec<f64>,
}

impl CableGeometry {
    pub fn new(a: f64, s0: f64, b: f64, c: f64, grid: &QuadratureGrid) -> Result<Self> {
        Self::with_options(a, s0, b, c, grid, false)
    }

    /// Like [`CableGeometry::new`], optionally admitting the straight cable `a = 0`.
    pub fn with_options(a: f64, s0: f64, b: f64, c: f64, grid: &QuadratureGrid, allow_straight: bool) -> Result<Self> {
        let a_ok = if allow_straight { a >= 0.0 } else { a > 0.0 };
        if !(a.is_finite() && a_ok) {
            return Err(invalid(
                "cable.a",
                format!("tension parameter must be positive, got {a}"),
            ));
        }
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(invalid("cable.s0", format!("hanger length must be positive, got {s0}")));
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(invalid("cable.b", format!("must be non-negative, got {b}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(invalid("cable.c", format!("must be non-negative, got {c}")));
        }
        let length = grid.length();
        let sx: Vec<f64> = grid.nodes().iter().map(|&x| -a * x + 0.5 * a * length).collect();
        let xi0: Vec<f64> = sx.iter().map(|v| (1.0 + v * v).sqrt()).collect();
        let rest_length = grid.integrate(&xi0);
        let int_abs_sx = grid.l1_norm(&sx);
        let int_xi0_sq = grid.l2_norm_sq(&xi0);
        let max_xi0 = (1.0 + (0.5 * a * length).powi(2)).sqrt();
        Ok(Self {
            a,
            s0,
            b,
            c,
            length,
            sx,
            xi0,
            rest_length,
            int_abs_sx,
            int_xi0_sq,
            max_xi0,
            weights: grid.weights().to_vec(),
        })
    }

    /// Cable-free geometry (`b = c = 0`, straight rest shape).
    pub fn inactive(grid: &QuadratureGrid) -> Self {
        Self::with_options(0.0, 1.0, 0.0, 0.0, grid, true).expect("inactive cable is valid")
    }

    /// `a = Mg/(2H)`, `b = A_c E_c / L0`, `c = H`.
    pub fn from_physical(p: &PhysicalCable, grid: &QuadratureGrid) -> Result<Self> {
        if !(p.tension > 0.0) {
            return Err(invalid("physical.H", "cable tension must be positive"));
        }
        let a = p.mass * p.gravity / (2.0 * p.tension);
        let probe = Self::new(a, p.s0, 0.0, p.tension, grid)?;
        let len = p.tabulated_length.unwrap_or(probe.rest_length);
        if !(len > 0.0) {
            return Err(invalid("physical.L0", "cable length must be positive"));
        }
        let b = p.area * p.young / len;
        Self::new(a, p.s0, b, p.tension, grid)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Whether the cable terms vanish identically.
    pub fn is_inactive(&self) -> bool {
        self.b == 0.0 && self.c == 0.0
    }

    /// Rest shape `s(x)`.
    pub fn rest_shape(&self, x: f64) -> f64 {
        -0.5 * self.a * x * x + 0.5 * self.a * self.length * x + self.s0
    }

    /// Sag `s(L/2) - s0 = a L^2 / 8`.
    pub fn sag(&self) -> f64 {
        self.rest_shape(0.5 * self.length) - self.s0
    }

    pub fn slope(&self) -> &[f64] {
        &self.sx
    }

    pub fn xi0(&self) -> &[f64] {
        &self.xi0
    }

    /// Rest length `L0` on the grid.
    pub fn rest_length(&self) -> f64 {
        self.rest_length
    }

    pub fn int_abs_slope(&self) -> f64 {
        self.int_abs_sx
    }

    pub fn int_xi0_sq(&self) -> f64 {
        self.int_xi0_sq
    }

    pub fn max_xi0(&self) -> f64 {
        self.max_xi0
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.sx.len() {
            return Err(Error::DimensionMismatch {
                what: "nodal values vs cable grid",
                expected: self.sx.len(),
                got: n,
            });
        }
        Ok(())
    }

    fn integrate(&self, v: impl Iterator<Item = f64>) -> f64 {
        self.weights.iter().zip(v).map(|(w, v)| w * v).sum()
    }

    /// `L(u)` from nodal `u_x`.
    pub(crate) fn arc_length_nodal(&self, ux: &[f64]) -> f64 {
        self.integrate(ux.iter().zip(&self.sx).map(|(u, s)| (1.0 + (u + s) * (u + s)).sqrt()))
    }

    /// Two-pass `h(u)`: global `L(u)` first, then the nodal force.
    pub(crate) fn h_nodal_into(&self, ux: &[f64], out: &mut [f64]) {
        let stretch = self.b * (self.rest_length - self.arc_length_nodal(ux));
        #[cfg(feature = "mutant-h-sign")]
        let sign = -1.0;
        #[cfg(not(feature = "mutant-h-sign"))]
        let sign = 1.0;
        for (((o, u), s), xi0) in out.iter_mut().zip(ux).zip(&self.sx).zip(&self.xi0) {
            let slope = u + s;
            *o = sign * (stretch - self.c * xi0) * slope / (1.0 + slope * slope).sqrt();
        }
    }

    pub(crate) fn pi_nodal(&self, ux: &[f64]) -> f64 {
        let dl = self.arc_length_nodal(ux) - self.rest_length;
        let bend = self.integrate(
            ux.iter()
                .zip(&self.sx)
                .zip(&self.xi0)
                .map(|((u, s), xi0)| xi0 * ((1.0 + (u + s) * (u + s)).sqrt() - xi0)),
        );
        0.5 * self.b * dl * dl + self.c * bend
    }

    /// Explicit constants of the cable bounds:
    /// `(h(u), u_x) <= -Pi(u) + C_c ||u_x||_L1 + Cbar_c` and
    /// `||h(u)||_0^2 <= c_c ||u_x||_L1^2 + cbar_c`.
    pub fn bound_constants(&self) -> CableConstants {
        let span = self.length + self.int_abs_sx;
        CableConstants {
            weak_linear: self.b * span,
            weak_const: self.c * self.max_xi0 * span + self.b * self.rest_length.powi(2),
            l2_linear: 2.0 * self.b * self.b * self.length,
            l2_const: 2.0 * self.c * self.c * self.int_xi0_sq,
        }
    }
}

/// Constants `C_c`, `Cbar_c`, `c_c`, `cbar_c` of the cable force bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableConstants {
    pub weak_linear: f64,
    pub weak_const: f64,
    pub l2_linear: f64,
    pub l2_const: f64,
}

fn slope_of(u: &[f64], basis: &Basis, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    crate::spectral::eval_modal(u, basis, grid, 1)
}

/// Nodal `Xi(u)` from nodal `u_x`.
pub fn big_xi(ux: &[f64], geometry: &CableGeometry) -> Result<Vec<f64>> {
    geometry.check(ux.len())?;
    Ok(ux
        .iter()
        .zip(geometry.slope())
        .map(|(u, s)| (1.0 + (u + s) * (u + s)).sqrt())
        .collect())
}

/// Cable length `L(u)` for a modal displacement.
pub fn arc_length(u: &[f64], geometry: &CableGeometry, basis: &Basis, grid: &QuadratureGrid) -> Result<f64> {
    let ux = slope_of(u, basis, grid)?;
    geometry.check(ux.len())?;
    Ok(geometry.arc_length_nodal(&ux))
}

/// Nodal cable force `h(u)`.
pub fn h_of(u: &[f64], geometry: &CableGeometry, basis: &Basis, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    let ux = slope_of(u, basis, grid)?;
    geometry.check(ux.len())?;
    let mut out = vec![0.0; ux.len()];
    geometry.h_nodal_into(&ux, &mut out);
    Ok(out)
}

/// Cable energy `Pi(u)`.
pub fn pi_energy(u: &[f64], geometry: &CableGeometry, basis: &Basis, grid: &QuadratureGrid) -> Result<f64> {
    let ux = slope_of(u, basis, grid)?;
    geometry.check(ux.len())?;
    Ok(geometry.pi_nodal(&ux))
}

/// `w + sign * ell * theta` as a modal vector over the longer of the two.
pub fn combine(w: &[f64], theta: &[f64], ell: f64, sign: f64) -> Vec<f64> {
    let n = w.len().max(theta.len());
    (0..n)
        .map(|i| w.get(i).copied().unwrap_or(0.0) + sign * ell * theta.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Nodal `f = h(w + l theta) + h(w - l theta)` and `fbar = l [h(w + l theta) - h(w - l theta)]`.
pub fn f_pair(
    w: &[f64],
    theta: &[f64],
    ell: f64,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let hp = h_of(&combine(w, theta, ell, 1.0), geometry, basis, grid)?;
    let hm = h_of(&combine(w, theta, ell, -1.0), geometry, basis, grid)?;
    let f = hp.iter().zip(&hm).map(|(p, m)| p + m).collect();
    let fbar = hp.iter().zip(&hm).map(|(p, m)| ell * (p - m)).collect();
    Ok((f, fbar))
}

/// Reusable buffers for the cable load assembly inside the right-hand side.
#[derive(Debug, Clone)]
pub(crate) struct CableScratch {
    wx: Vec<f64>,
    tx: Vec<f64>,
    up: Vec<f64>,
    um: Vec<f64>,
    hp: Vec<f64>,
    hm: Vec<f64>,
}

impl CableScratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            wx: vec![0.0; n],
            tx: vec![0.0; n],
            up: vec![0.0; n],
            um: vec![0.0; n],
            hp: vec![0.0; n],
            hm: vec![0.0; n],
        }
    }
}

/// `(f, e_j')_0` into `vert` and `(fbar, e_j')_0` into `tors`.
pub(crate) fn cable_load_into(
    w: &[f64],
    theta: &[f64],
    ell: f64,
    geometry: &CableGeometry,
    grid: &QuadratureGrid,
    scratch: &mut CableScratch,
    vert: &mut [f64],
    tors: &mut [f64],
) {
    grid.synthesize_into(w, 1, &mut scratch.wx);
    grid.synthesize_into(theta, 1, &mut scratch.tx);
    for i in 0..scratch.wx.len() {
        scratch.up[i] = scratch.wx[i] + ell * scratch.tx[i];
        scratch.um[i] = scratch.wx[i] - ell * scratch.tx[i];
    }
    geometry.h_nodal_into(&scratch.up, &mut scratch.hp);
    geometry.h_nodal_into(&scratch.um, &mut scratch.hm);
    // Reuse the slope buffers for f and fbar.
    for i in 0..scratch.wx.len() {
        scratch.wx[i] = scratch.hp[i] + scratch.hm[i];
        scratch.tx[i] = ell * (scratch.hp[i] - scratch.hm[i]);
    }
    grid.project_into(&scratch.wx, 1, vert);
    grid.project_into(&scratch.tx, 1, tors);
}

/// Galerkin cable loads `((f, e_j')_0)_{j <= n_w}` and `((fbar, e_j')_0)_{j <= n_t}`.
pub fn cable_rhs_projection(
    w: &[f64],
    theta: &[f64],
    ell: f64,
    geometry: &CableGeometry,
    basis: &Basis,
    grid: &QuadratureGrid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if w.len() != basis.n_w() {
        return Err(Error::DimensionMismatch {
            what: "vertical coefficients",
            expected: basis.n_w(),
            got: w.len(),
        });
    }
    if theta.len() != basis.n_t() {
        return Err(Error::DimensionMismatch {
            what: "torsional coefficients",
            expected: basis.n_t(),
            got: theta.len(),
        });
    }
    geometry.check(grid.len())?;
    let mut vert = vec![0.0; basis.n_w()];
    let mut tors = vec![0.0; basis.n_t()];
    if geometry.is_inactive() {
        return Ok((vert, tors));
    }
    let mut scratch = CableScratch::new(grid.len());
    cable_load_into(w, theta, ell, geometry, grid, &mut scratch, &mut vert, &mut tors);
    Ok((vert, tors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, project_derivative};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn setup(n: usize) -> (Basis, QuadratureGrid, CableGeometry) {
        let basis = Basis::nondimensional(n, n).unwrap();
        let grid = make_grid(&basis);
        let geom = CableGeometry::new(0.4, 1.0, 3.0, 2.0, &grid).unwrap();
        (basis, grid, geom)
    }

    fn random_modal(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
        (1..=n)
            .map(|j| scale * rng.gen_range(-1.0..1.0) / (j as f64).powi(3))
            .collect()
    }

    #[test]
    fn rest_state_quantities() {
        let (basis, grid, geom) = setup(4);
        let zero = vec![0.0; 4];
        let xi = big_xi(&vec![0.0; grid.len()], &geom).unwrap();
        assert_eq!(xi, geom.xi0().to_vec());
        assert!(geom.xi0().iter().all(|&v| v >= 1.0));
        assert_eq!(arc_length(&zero, &geom, &basis, &grid).unwrap(), geom.rest_length());
        assert!(geom.rest_length() >= PI);
        assert_eq!(pi_energy(&zero, &geom, &basis, &grid).unwrap(), 0.0);
        assert!((geom.sag() - 0.4 * PI * PI / 8.0).abs() < 1e-14);
        assert!((geom.rest_shape(0.0) - 1.0).abs() < 1e-15);
        assert!((geom.rest_shape(PI) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn straight_cable_needs_flag() {
        let basis = Basis::nondimensional(2, 2).unwrap();
        let grid = make_grid(&basis);
        assert!(CableGeometry::new(0.0, 1.0, 1.0, 1.0, &grid).is_err());
        let g = CableGeometry::with_options(0.0, 1.0, 1.0, 1.0, &grid, true).unwrap();
        let xi = big_xi(&vec![0.0; grid.len()], &g).unwrap();
        assert!(xi.iter().all(|&v| v == 1.0));
        assert_eq!(g.rest_length(), grid.integrate(&vec![1.0; grid.len()]));
    }

    #[test]
    fn arc_length_single_mode_matches_adaptive_quadrature() {
        let (basis, grid, geom) = setup(3);
        let u = [0.1, 0.0, 0.0];
        let got = arc_length(&u, &geom, &basis, &grid).unwrap();
        let norm = (2.0 / PI).sqrt();
        let integrand = |x: f64| {
            let slope = 0.1 * norm * x.cos() + (-0.4 * x + 0.2 * PI);
            (1.0 + slope * slope).sqrt()
        };
        let oracle = adaptive_simpson(&integrand, 0.0, PI, 1e-13, 40);
        assert!((got - oracle).abs() / oracle < 1e-8, "{got} vs {oracle}");
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (l, r) = (simpson(f, a, m), simpson(f, m, b));
            if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
            }
        }
        rec(f, a, b, simpson(f, a, b), tol, depth)
    }

    #[test]
    fn no_cable_no_force() {
        let basis = Basis::nondimensional(4, 3).unwrap();
        let grid = make_grid(&basis);
        let geom = CableGeometry::new(0.4, 1.0, 0.0, 0.0, &grid).unwrap();
        let w = [0.3, -0.1, 0.05, 0.02];
        let th = [0.1, 0.2, -0.1];
        let h = h_of(&w, &geom, &basis, &grid).unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
        let (f, fb) = f_pair(&w, &th, 0.7, &geom, &basis, &grid).unwrap();
        assert!(f.iter().chain(&fb).all(|&v| v == 0.0));
        let (pv, pt) = cable_rhs_projection(&w, &th, 0.7, &geom, &basis, &grid).unwrap();
        assert!(pv.iter().chain(&pt).all(|&v| v == 0.0));
    }

    #[test]
    fn zero_torsion_gives_symmetric_pair() {
        let (basis, grid, geom) = setup(4);
        let w = [0.3, -0.1, 0.05, 0.02];
        let (f, fb) = f_pair(&w, &[0.0; 4], 0.7, &geom, &basis, &grid).unwrap();
        let h = h_of(&w, &geom, &basis, &grid).unwrap();
        for i in 0..f.len() {
            assert_eq!(f[i], 2.0 * h[i]);
            assert_eq!(fb[i], 0.0);
        }
    }

    #[test]
    fn pure_torsion_pair_from_direct_evaluation() {
        let (basis, grid, geom) = setup(4);
        let th = [0.0, 0.2, 0.0, -0.05];
        let ell = 0.8;
        let (f, fb) = f_pair(&[0.0; 4], &th, ell, &geom, &basis, &grid).unwrap();
        let plus: Vec<f64> = th.iter().map(|t| ell * t).collect();
        let minus: Vec<f64> = th.iter().map(|t| -ell * t).collect();
        let hp = h_of(&plus, &geom, &basis, &grid).unwrap();
        let hm = h_of(&minus, &geom, &basis, &grid).unwrap();
        for i in 0..f.len() {
            assert!((f[i] - (hp[i] + hm[i])).abs() < 1e-14);
            assert!((fb[i] - ell * (hp[i] - hm[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn static_load_equals_rest_force_projection() {
        let (basis, grid, geom) = setup(5);
        let (pv, pt) = cable_rhs_projection(&[0.0; 5], &[0.0; 5], 0.9, &geom, &basis, &grid).unwrap();
        // h(0) = -c s_x / sqrt(1 + s_x^2) * xi0 = -c s_x, independently of the force routine.
        let rest: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| -2.0 * 2.0 * (-0.4 * x + 0.2 * PI))
            .collect();
        let oracle = project_derivative(&rest, &grid, 5).unwrap();
        for j in 0..5 {
            assert!((pv[j] - oracle[j]).abs() < 1e-12, "{j}");
            assert_eq!(pt[j], 0.0);
        }
        assert!(pv[0].abs() > 1e-3);
        // Parabolic cable: -2c int (-a) e_j = projection of the constant -2ca.
        for j in 0..5 {
            assert!((pv[j] - basis.constant_projection(-2.0 * 2.0 * 0.4, j + 1)).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_converges_under_refinement() {
        let (basis, grid, geom) = setup(6);
        let fine_grid = QuadratureGrid::with_panels(&basis, 10 * grid.panels());
        let fine_geom = CableGeometry::new(0.4, 1.0, 3.0, 2.0, &fine_grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let w = random_modal(&mut rng, 6, 2.0);
            let th = random_modal(&mut rng, 6, 1.0);
            let (a, b) = cable_rhs_projection(&w, &th, 0.8, &geom, &basis, &grid).unwrap();
            let (fa, fb) = cable_rhs_projection(&w, &th, 0.8, &fine_geom, &basis, &fine_grid).unwrap();
            let scale = fa.iter().chain(&fb).fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.iter().chain(&b).zip(fa.iter().chain(&fb)) {
                assert!((x - y).abs() <= 1e-6 * scale, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn pi_is_variational_potential_of_h() {
        let (basis, grid, geom) = setup(5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u = random_modal(&mut rng, 5, 3.0);
            let phi = random_modal(&mut rng, 5, 1.0);
            let tau = 1e-5;
            let shifted = |s: f64| -> Vec<f64> { u.iter().zip(&phi).map(|(a, b)| a + s * b).collect() };
            let dpi = (pi_energy(&shifted(tau), &geom, &basis, &grid).unwrap()
                - pi_energy(&shifted(-tau), &geom, &basis, &grid).unwrap())
                / (2.0 * tau);
            let h = h_of(&u, &geom, &basis, &grid).unwrap();
            let phix = crate::spectral::eval_modal(&phi, &basis, &grid, 1).unwrap();
            let pairing: f64 = grid
                .weights()
                .iter()
                .zip(&h)
                .zip(&phix)
                .map(|((w, h), p)| w * h * p)
                .sum();
            assert!(
                (dpi + pairing).abs() <= 1e-4 * pairing.abs().max(1e-8),
                "{dpi} vs {}",
                -pairing
            );
        }
    }

    #[test]
    fn force_bounds_pointwise() {
        let (basis, grid, geom) = setup(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = random_modal(&mut rng, 5, 20.0);
            let ux = crate::spectral::eval_modal(&u, &basis, &grid, 1).unwrap();
            let xi = big_xi(&ux, &geom).unwrap();
            for ((x, du), s) in xi.iter().zip(&ux).zip(geom.slope()) {
                assert!(*x >= 1.0);
                assert!(1.0 / x <= 1.0);
                assert!((du + s).abs() / x <= 1.0);
            }
        }
    }

    #[test]
    fn split_recovers_each_cable_force() {
        let (basis, grid, geom) = setup(4);
        let w = [0.4, 0.1, -0.2, 0.05];
        let th = [0.2, -0.3, 0.1, 0.0];
        let ell = 1.3;
        let (f, fb) = f_pair(&w, &th, ell, &geom, &basis, &grid).unwrap();
        let hp = h_of(&combine(&w, &th, ell, 1.0), &geom, &basis, &grid).unwrap();
        let hm = h_of(&combine(&w, &th, ell, -1.0), &geom, &basis, &grid).unwrap();
        for i in 0..f.len() {
            assert!(((f[i] + fb[i] / ell) / 2.0 - hp[i]).abs() < 1e-12);
            assert!(((f[i] - fb[i] / ell) / 2.0 - hm[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn physical_derivation() {
        let basis = Basis::new(853.44, 10, 4).unwrap();
        let grid = make_grid(&basis);
        let phys = PhysicalCable {
            mass: 7198.0,
            gravity: 9.8,
            tension: 45_413e3,
            area: 0.1228,
            young: 185_000e6,
            tabulated_length: Some(868.815),
            s0: 1.0,
        };
        let g = CableGeometry::from_physical(&phys, &grid).unwrap();
        assert!((g.a() - 7198.0 * 9.8 / (2.0 * 45_413e3)).abs() < 1e-18);
        assert!((g.b() - 0.1228 * 185_000e6 / 868.815).abs() < 1e-6);
        assert_eq!(g.c(), 45_413e3);
        let computed = CableGeometry::from_physical(
            &PhysicalCable {
                tabulated_length: None,
                ..phys
            },
            &grid,
        )
        .unwrap();
        assert!((computed.b() - 0.1228 * 185_000e6 / computed.rest_length()).abs() < 1e-6);
    }
}
