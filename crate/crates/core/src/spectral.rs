//! Sine-mode Galerkin basis on `(0, L)` with hinged ends.
//!
//! Mode `k` is `e_k(x) = sqrt(2/L) sin(k pi x / L)`; the modes are
//! orthonormal in `L^2(0, L)` and diagonalize every elasticity operator of
//! the model, so `||e_k||_1 = k pi / L` and `||e_k||_2 = (k pi / L)^2`.
//!
//! Integrals against non-polynomial integrands (the cable terms involve
//! square roots) are evaluated on a composite 5-point Gauss-Legendre grid.
//! The grid also caches the mode shapes and their first two derivatives at
//! every node, which is what the right-hand side assembly iterates over.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Gauss points per panel of the composite rule.
pub const POINTS_PER_PANEL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    length: f64,
    n_w: usize,
    n_t: usize,
}

impl Basis {
    pub fn new(length: f64, n_w: usize, n_t: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid("L", format!("span must be positive, got {length}")));
        }
        if n_w == 0 {
            return Err(invalid("n_w", "need at least one vertical mode"));
        }
        if n_t == 0 {
            return Err(invalid("n_t", "need at least one torsional mode"));
        }
        Ok(Self { length, n_w, n_t })
    }

    /// Nondimensional span `L = pi`.
    pub fn nondimensional(n_w: usize, n_t: usize) -> Result<Self> {
        Self::new(PI, n_w, n_t)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_w(&self) -> usize {
        self.n_w
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Largest retained mode index across both fields.
    pub fn n_max(&self) -> usize {
        self.n_w.max(self.n_t)
    }

    /// Common prefix of the vertical and torsional expansions.
    pub fn n_common(&self) -> usize {
        self.n_w.min(self.n_t)
    }

    /// `j pi / L` for the 1-based mode `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        j as f64 * PI / self.length
    }

    pub fn normalization(&self) -> f64 {
        (2.0 / self.length).sqrt()
    }

    /// Value of `d^deriv e_j / dx^deriv` at `x`.
    pub fn mode(&self, j: usize, x: f64, deriv: usize) -> Result<f64> {
        let k = self.wavenumber(j);
        let n = self.normalization();
        match deriv {
            0 => Ok(n * (k * x).sin()),
            1 => Ok(n * k * (k * x).cos()),
            2 => Ok(-n * k * k * (k * x).sin()),
            d => Err(Error::InvalidDerivative(d)),
        }
    }

    /// Displayed amplitude `sqrt(2/L) c` of a modal coefficient `c`.
    pub fn displayed_from_modal(&self, coeff: f64) -> f64 {
        self.normalization() * coeff
    }

    pub fn modal_from_displayed(&self, amplitude: f64) -> f64 {
        amplitude / self.normalization()
    }

    /// Projection `(g, e_j)_0` of a constant load `g`.
    pub fn constant_projection(&self, g: f64, j: usize) -> f64 {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        g * (2.0 * self.length).sqrt() * (1.0 - sign) / (j as f64 * PI)
    }

    /// `||c||_0^2 = sum c_j^2`.
    pub fn norm0_sq(&self, coeffs: &[f64]) -> f64 {
        coeffs.iter().map(|c| c * c).sum()
    }

    /// `||c||_1^2 = sum (j pi / L)^2 c_j^2`.
    pub fn norm1_sq(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.wavenumber(i + 1);
                k * k * c * c
            })
            .sum()
    }

    /// `||c||_2^2 = sum (j pi / L)^4 c_j^2`.
    pub fn norm2_sq(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k2 = self.wavenumber(i + 1).powi(2);
                k2 * k2 * c * c
            })
            .sum()
    }

    /// `(u, v)_0` over the common prefix of the two coefficient vectors.
    pub fn inner0(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `(u, v)_1` over the common prefix.
    pub fn inner1(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .zip(v)
            .enumerate()
            .map(|(i, (a, b))| self.wavenumber(i + 1).powi(2) * a * b)
            .sum()
    }

    /// `(u, v)_2` over the common prefix.
    pub fn inner2(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .zip(v)
            .enumerate()
            .map(|(i, (a, b))| self.wavenumber(i + 1).powi(4) * a * b)
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for k in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * k - 1) as f64 * z * p2 - (k - 1) as f64 * p3) / k as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre grid on `(0, L)` with cached mode tables.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
    length: f64,
    n_modes: usize,
    // Row-major (mode, node) tables for derivative orders 0, 1, 2.
    tables: [Vec<f64>; 3],
}

impl QuadratureGrid {
    /// Grid with an explicit panel count (used for refinement oracles).
    pub fn with_panels(basis: &Basis, panels: usize) -> Self {
        let panels = panels.max(1);
        let (gx, gw) = gauss_legendre(POINTS_PER_PANEL);
        let h = basis.length() / panels as f64;
        let mut nodes = Vec::with_capacity(panels * POINTS_PER_PANEL);
        let mut weights = Vec::with_capacity(panels * POINTS_PER_PANEL);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        let n_modes = basis.n_max();
        let m = nodes.len();
        let mut tables = [vec![0.0; n_modes * m], vec![0.0; n_modes * m], vec![0.0; n_modes * m]];
        let norm = basis.normalization();
        for j in 1..=n_modes {
            let k = basis.wavenumber(j);
            let row = (j - 1) * m;
            for (i, &x) in nodes.iter().enumerate() {
                let (s, c) = (k * x).sin_cos();
                tables[0][row + i] = norm * s;
                tables[1][row + i] = norm * k * c;
                tables[2][row + i] = -norm * k * k * s;
            }
        }
        Self {
            nodes,
            weights,
            panels,
            length: basis.length(),
            n_modes,
            tables,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of modes with cached tables.
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Nodal values of `d^deriv e_j`; `j` is 1-based.
    pub fn shape(&self, j: usize, deriv: usize) -> &[f64] {
        let m = self.nodes.len();
        &self.tables[deriv][(j - 1) * m..j * m]
    }

    /// Quadrature of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `int |v|` by quadrature.
    pub fn l1_norm(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v.abs()).sum()
    }

    /// `int v^2` by quadrature.
    pub fn l2_norm_sq(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v * v).sum()
    }

    /// Accumulates `sum_j coeffs_j d^deriv e_j` into `out` (no allocation).
    pub(crate) fn synthesize_into(&self, coeffs: &[f64], deriv: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(self.shape(i + 1, deriv)) {
                *o += c * s;
            }
        }
    }

    /// `(values, d^deriv e_j)_0` for `j = 1..=n`, written to `out`.
    pub(crate) fn project_into(&self, values: &[f64], deriv: usize, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self
                .shape(j + 1, deriv)
                .iter()
                .zip(&self.weights)
                .zip(values)
                .map(|((s, w), v)| s * w * v)
                .sum();
        }
    }
}

/// Composite grid with `max(64, 8 max(n_w, n_t))` panels.
pub fn make_grid(basis: &Basis) -> QuadratureGrid {
    QuadratureGrid::with_panels(basis, default_panels(basis))
}

pub fn default_panels(basis: &Basis) -> usize {
    64usize.max(8 * basis.n_max())
}

/// Nodal values of `sum_j coeffs_j (d/dx)^deriv e_j`.
pub fn eval_modal(coeffs: &[f64], basis: &Basis, grid: &QuadratureGrid, deriv: usize) -> Result<Vec<f64>> {
    if deriv > 2 {
        return Err(Error::InvalidDerivative(deriv));
    }
    let cap = basis.n_max().min(grid.n_modes());
    if coeffs.len() > cap {
        return Err(Error::DimensionMismatch {
            what: "modal coefficients exceed basis",
            expected: cap,
            got: coeffs.len(),
        });
    }
    let mut out = vec![0.0; grid.len()];
    grid.synthesize_into(coeffs, deriv, &mut out);
    Ok(out)
}

/// Galerkin projection `(v, e_j)_0` for `j = 1..=n`.
pub fn project(values: &[f64], basis: &Basis, grid: &QuadratureGrid, n: usize) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "nodal values vs grid",
            expected: grid.len(),
            got: values.len(),
        });
    }
    let cap = basis.n_max().min(grid.n_modes());
    if n > cap {
        return Err(Error::DimensionMismatch {
            what: "projection count exceeds basis",
            expected: cap,
            got: n,
        });
    }
    let mut out = vec![0.0; n];
    grid.project_into(values, 0, &mut out);
    Ok(out)
}

/// Projection against mode derivatives, `(v, e_j')_0`, for `j = 1..=n`.
pub fn project_derivative(values: &[f64], grid: &QuadratureGrid, n: usize) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "nodal values vs grid",
            expected: grid.len(),
            got: values.len(),
        });
    }
    if n > grid.n_modes() {
        return Err(Error::DimensionMismatch {
            what: "projection count exceeds basis",
            expected: grid.n_modes(),
            got: n,
        });
    }
    let mut out = vec![0.0; n];
    grid.project_into(values, 1, &mut out);
    Ok(out)
}
