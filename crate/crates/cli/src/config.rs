//! Flat `section.key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys, repeated keys
//! and unparsable values are errors naming the key. Derivable quantities
//! accept the token `derive`, which applies the structural formulas to the
//! `table.*` data. [`SimConfig::manifest`] writes every key as a resolved
//! literal so a run can be repeated exactly.

use crate::CliError;
use fishbone::cable::CableGeometry;
use fishbone::dynamics::{ModalState, Model, ModelParams};
use fishbone::experiments::{auto_dt, Thresholds, TnbTable};
use fishbone::integrate::{IntegratorConfig, Method};
use fishbone::spectral::{make_grid, Basis, QuadratureGrid};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const DERIVE: &str = "derive";

/// Literal value or a request for the derived formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivable {
    Literal(f64),
    Derive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Literal(f64),
    /// 1/200 of the shortest linearized period at the initial state.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    W,
    Wdot,
    Th,
    Thdot,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::W, Field::Wdot, Field::Th, Field::Thdot];

    pub fn name(&self) -> &'static str {
        match self {
            Field::W => "w",
            Field::Wdot => "wdot",
            Field::Th => "th",
            Field::Thdot => "thdot",
        }
    }

    fn parse(s: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == s)
    }

    fn is_vertical(&self) -> bool {
        matches!(self, Field::W | Field::Wdot)
    }
}

/// Initial-condition entry; `mode = None` broadcasts to every mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialEntry {
    pub field: Field,
    pub mode: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub seed: u64,
    pub table: TnbTable,
    pub mass: f64,
    pub bending: Derivable,
    pub eps: Derivable,
    pub kappa: Derivable,
    pub ell: f64,
    pub delta: f64,
    pub zeta: f64,
    pub beta: f64,
    pub upsilon: f64,
    pub wind_speed: f64,
    pub prestress: f64,
    pub stretching: Derivable,
    pub gravity: f64,
    pub cable_active: bool,
    pub cable_a: Derivable,
    pub cable_s0: f64,
    pub cable_b: Derivable,
    pub cable_c: Derivable,
    pub length: f64,
    pub n_w: usize,
    pub n_t: usize,
    pub method: Method,
    pub dt: Step,
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    /// Initial data in displayed amplitudes (`sqrt(2/L)` times modal) when true.
    pub displayed: bool,
    pub initial: Vec<InitialEntry>,
    pub directory: String,
    pub every: f64,
    /// `None` means every channel.
    pub channels: Option<Vec<String>>,
    pub sweep_beta: Vec<f64>,
    pub sweep_wind: Vec<f64>,
    pub thresholds: Thresholds,
    pub linearize: bool,
    pub linear_csv: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        let t = Thresholds::default();
        Self {
            name: "run".into(),
            seed: 0,
            table: TnbTable::default(),
            mass: m.mass,
            bending: Derivable::Literal(m.bending),
            eps: Derivable::Literal(m.eps),
            kappa: Derivable::Literal(m.kappa),
            ell: m.ell,
            delta: m.delta,
            zeta: m.zeta,
            beta: m.beta,
            upsilon: m.upsilon,
            wind_speed: m.wind_speed,
            prestress: m.prestress,
            stretching: Derivable::Literal(m.stretching),
            gravity: m.gravity,
            cable_active: false,
            cable_a: Derivable::Literal(0.5),
            cable_s0: 1.0,
            cable_b: Derivable::Literal(1.0),
            cable_c: Derivable::Literal(1.0),
            length: m.length,
            n_w: 4,
            n_t: 4,
            method: Method::Rk4,
            dt: Step::Literal(1e-3),
            rtol: 1e-8,
            atol: 1e-10,
            t_end: 10.0,
            displayed: false,
            initial: Vec::new(),
            directory: "out".into(),
            every: 0.01,
            channels: None,
            sweep_beta: Vec::new(),
            sweep_wind: Vec::new(),
            thresholds: t,
            linearize: false,
            linear_csv: false,
        }
    }
}

/// Everything needed to run, with all tokens resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: SimConfig,
    pub params: ModelParams,
    pub geometry: CableGeometry,
    pub basis: Basis,
    pub grid: QuadratureGrid,
    pub initial: ModalState,
    pub integrator: IntegratorConfig,
}

impl Resolved {
    pub fn model(&self) -> Result<Model, CliError> {
        Model::new(self.params, self.geometry.clone(), self.basis, self.grid.clone()).map_err(CliError::from_param)
    }
}

fn err(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

fn num(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| err(key, format!("expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(err(key, "must be finite"));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse()
        .map_err(|_| err(key, format!("expected a non-negative integer, got `{v}`")))
}

fn flag(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(key, format!("expected true or false, got `{v}`"))),
    }
}

fn derivable(key: &str, v: &str) -> Result<Derivable, CliError> {
    if v == DERIVE {
        Ok(Derivable::Derive)
    } else {
        num(key, v).map(Derivable::Literal)
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| num(key, s.trim())).collect()
}

/// `key -> (value, line)` pairs of a config text, rejecting repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (String, usize)>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        if let Some((_, first)) = out.get(&k) {
            return Err(err(&k, format!("repeated on lines {first} and {}", i + 1)));
        }
        out.insert(k, (v, i + 1));
    }
    Ok(out)
}

impl SimConfig {
    /// Parses a config text. `run.preset = NAME` loads a named preset first
    /// and the remaining keys override it.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut pairs = parse_pairs(text)?;
        let mut cfg = match pairs.remove("run.preset") {
            Some((name, _)) => {
                let base = crate::presets::preset(&name)
                    .ok_or_else(|| err("run.preset", format!("unknown preset `{name}`")))?;
                Self::parse(&base)?
            }
            None => Self::default(),
        };
        let mut initial = Vec::new();
        for (k, (v, _)) in &pairs {
            if let Some(rest) = k.strip_prefix("initial.") {
                if rest != "units" {
                    initial.push(parse_initial(k, rest, v)?);
                    continue;
                }
            }
            cfg.set(k, v)?;
        }
        if !initial.is_empty() {
            // File entries replace preset entries for the same field and mode; a
            // broadcast replaces every preset entry of its field.
            cfg.initial.retain(|e| {
                !initial
                    .iter()
                    .any(|n: &InitialEntry| n.field == e.field && (n.mode.is_none() || n.mode == e.mode))
            });
            cfg.initial.extend(initial);
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        let t = &mut self.table;
        match key {
            "run.name" => self.name = v.to_string(),
            "run.seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| err(key, format!("expected an integer, got `{v}`")))?
            }
            "run.version" => {
                if v != env!("CARGO_PKG_VERSION") {
                    log::warn!("config written by version {v}, running {}", env!("CARGO_PKG_VERSION"));
                }
            }
            "table.E" => t.young_deck = num(key, v)?,
            "table.Ec" => t.young_cable = num(key, v)?,
            "table.G" => t.shear = num(key, v)?,
            "table.f" => t.sag = num(key, v)?,
            "table.I" => t.inertia = num(key, v)?,
            "table.K" => t.torsion_const = num(key, v)?,
            "table.J" => t.warping_const = num(key, v)?,
            "table.A" => t.area = num(key, v)?,
            "table.Ac" => t.cable_area = num(key, v)?,
            "table.H" => t.tension = num(key, v)?,
            "table.L0" => t.cable_length = num(key, v)?,
            "model.M" => self.mass = num(key, v)?,
            "model.D" => self.bending = derivable(key, v)?,
            "model.eps" => self.eps = derivable(key, v)?,
            "model.kappa" => self.kappa = derivable(key, v)?,
            "model.ell" => self.ell = num(key, v)?,
            "model.delta" => self.delta = num(key, v)?,
            "model.zeta" => self.zeta = num(key, v)?,
            "model.beta" => self.beta = num(key, v)?,
            "model.Upsilon" => self.upsilon = num(key, v)?,
            "model.U" => self.wind_speed = num(key, v)?,
            "model.P" => self.prestress = num(key, v)?,
            "model.S" => self.stretching = derivable(key, v)?,
            "model.g" => self.gravity = num(key, v)?,
            "cable.active" => self.cable_active = flag(key, v)?,
            "cable.a" => self.cable_a = derivable(key, v)?,
            "cable.s0" => self.cable_s0 = num(key, v)?,
            "cable.b" => self.cable_b = derivable(key, v)?,
            "cable.c" => self.cable_c = derivable(key, v)?,
            "basis.L" => self.length = num(key, v)?,
            "basis.n_w" => self.n_w = count(key, v)?,
            "basis.n_t" => self.n_t = count(key, v)?,
            "integrator.method" => self.method = v.parse().map_err(|e| err(key, e))?,
            "integrator.dt" => {
                self.dt = if v == "auto" {
                    Step::Auto
                } else {
                    Step::Literal(num(key, v)?)
                }
            }
            "integrator.rtol" => self.rtol = num(key, v)?,
            "integrator.atol" => self.atol = num(key, v)?,
            "integrator.t_end" => self.t_end = num(key, v)?,
            "initial.units" => {
                self.displayed = match v {
                    "displayed" => true,
                    "modal" => false,
                    _ => return Err(err(key, format!("expected displayed or modal, got `{v}`"))),
                }
            }
            "output.directory" => self.directory = v.to_string(),
            "output.every" => self.every = num(key, v)?,
            "output.channels" => {
                self.channels = if v == "all" {
                    None
                } else {
                    Some(v.split(',').map(|s| s.trim().to_string()).collect())
                }
            }
            "sweep.beta" => self.sweep_beta = list(key, v)?,
            "sweep.U" => self.sweep_wind = list(key, v)?,
            "sweep.decay_below" => self.thresholds.decay_below = num(key, v)?,
            "sweep.growth_above" => self.thresholds.growth_above = num(key, v)?,
            "sweep.window" => self.thresholds.window = num(key, v)?,
            "sweep.mode" => self.thresholds.mode = count(key, v)?,
            "linear.linearize" => self.linearize = flag(key, v)?,
            "linear.csv" => self.linear_csv = flag(key, v)?,
            _ => return Err(err(key, "unknown key")),
        }
        Ok(())
    }

    fn check(&self) -> Result<(), CliError> {
        if self.n_w == 0 {
            return Err(err("basis.n_w", "must be at least 1"));
        }
        if self.n_t == 0 {
            return Err(err("basis.n_t", "must be at least 1"));
        }
        for e in &self.initial {
            let n = if e.field.is_vertical() { self.n_w } else { self.n_t };
            if let Some(j) = e.mode {
                if j == 0 || j > n {
                    return Err(err(
                        &format!("initial.{}.{j}", e.field.name()),
                        format!("mode outside 1..={n}"),
                    ));
                }
            }
        }
        if let Some(ch) = &self.channels {
            let all = self.channel_names();
            for c in ch {
                if !all.contains(c) {
                    return Err(err("output.channels", format!("unknown channel `{c}`")));
                }
            }
        }
        if self.thresholds.mode == 0 || self.thresholds.mode > self.n_t {
            return Err(err("sweep.mode", format!("mode outside 1..={}", self.n_t)));
        }
        if !(self.thresholds.decay_below <= self.thresholds.growth_above) {
            return Err(err("sweep.decay_below", "must not exceed sweep.growth_above"));
        }
        Ok(())
    }

    /// Every trajectory column after `t`, in file order.
    pub fn channel_names(&self) -> Vec<String> {
        Field::ALL
            .iter()
            .flat_map(|f| {
                let n = if f.is_vertical() { self.n_w } else { self.n_t };
                (1..=n).map(move |j| format!("{}_{j}", f.name()))
            })
            .collect()
    }

    /// Columns written to the trajectory CSV.
    pub fn selected_channels(&self) -> Vec<String> {
        let all = self.channel_names();
        match &self.channels {
            None => all,
            Some(sel) => all.into_iter().filter(|c| sel.contains(c)).collect(),
        }
    }

    fn physical_table(&self) -> TnbTable {
        TnbTable {
            mass: self.mass,
            gravity: self.gravity,
            length: self.length,
            half_width: self.ell,
            ..self.table
        }
    }

    fn value(d: Derivable, derived: impl FnOnce() -> f64) -> f64 {
        match d {
            Derivable::Literal(v) => v,
            Derivable::Derive => derived(),
        }
    }

    /// Applies `derive` tokens, builds the basis, cable, initial state and
    /// integrator, and replaces `dt = auto` by its value.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let t = self.physical_table();
        let params = ModelParams {
            mass: self.mass,
            bending: Self::value(self.bending, || t.young_deck * t.inertia),
            eps: Self::value(self.eps, || t.young_deck * t.warping_const),
            kappa: Self::value(self.kappa, || t.shear * t.torsion_const),
            ell: self.ell,
            delta: self.delta,
            zeta: self.zeta,
            beta: self.beta,
            upsilon: self.upsilon,
            wind_speed: self.wind_speed,
            prestress: self.prestress,
            stretching: Self::value(self.stretching, || t.stretching()),
            gravity: self.gravity,
            length: self.length,
        };
        params.validate().map_err(CliError::from_param)?;
        let basis = Basis::new(self.length, self.n_w, self.n_t).map_err(CliError::from_param)?;
        let grid = make_grid(&basis);
        let (a, b, c) = (
            Self::value(self.cable_a, || t.cable_a()),
            Self::value(self.cable_b, || t.cable_area * t.young_cable / t.cable_length),
            Self::value(self.cable_c, || t.tension),
        );
        let geometry = if self.cable_active {
            CableGeometry::new(a, self.cable_s0, b, c, &grid).map_err(CliError::from_param)?
        } else {
            CableGeometry::inactive(&grid)
        };
        let initial = self.initial_state(&basis);
        let mut config = self.clone();
        config.bending = Derivable::Literal(params.bending);
        config.eps = Derivable::Literal(params.eps);
        config.kappa = Derivable::Literal(params.kappa);
        config.stretching = Derivable::Literal(params.stretching);
        config.cable_a = Derivable::Literal(a);
        config.cable_b = Derivable::Literal(b);
        config.cable_c = Derivable::Literal(c);
        let dt = match self.dt {
            Step::Literal(v) => v,
            Step::Auto => {
                let mut model =
                    Model::new(params, geometry.clone(), basis, grid.clone()).map_err(CliError::from_param)?;
                auto_dt(&mut model, &initial, 200.0).map_err(|e| err("integrator.dt", e))?
            }
        };
        config.dt = Step::Literal(dt);
        config.displayed = false;
        config.initial = expand_initial(&initial);
        let integrator = IntegratorConfig {
            method: self.method,
            dt,
            rtol: self.rtol,
            atol: self.atol,
            t_end: self.t_end,
            sample_every: self.every,
        };
        integrator.validate().map_err(CliError::from_param)?;
        Ok(Resolved {
            config,
            params,
            geometry,
            basis,
            grid,
            initial,
            integrator,
        })
    }

    fn initial_state(&self, basis: &Basis) -> ModalState {
        let mut s = ModalState::zeros(basis);
        let scale = |v: f64| {
            if self.displayed {
                basis.modal_from_displayed(v)
            } else {
                v
            }
        };
        // Broadcast entries first, then per-mode entries.
        let ordered = self
            .initial
            .iter()
            .filter(|e| e.mode.is_none())
            .chain(self.initial.iter().filter(|e| e.mode.is_some()));
        for e in ordered {
            let target = match e.field {
                Field::W => &mut s.w,
                Field::Wdot => &mut s.wdot,
                Field::Th => &mut s.th,
                Field::Thdot => &mut s.thdot,
            };
            match e.mode {
                None => target.iter_mut().for_each(|x| *x = scale(e.value)),
                Some(j) => target[j - 1] = scale(e.value),
            }
        }
        s
    }

    /// Config text with every key, in a fixed order. Derivable keys print
    /// `derive` unless resolved; floats use the shortest round-trip form.
    pub fn manifest(&self) -> String {
        let d = |v: Derivable| match v {
            Derivable::Literal(x) => format!("{x:?}"),
            Derivable::Derive => DERIVE.to_string(),
        };
        let t = &self.table;
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("run.name", self.name.clone());
        kv("run.seed", self.seed.to_string());
        kv("run.version", env!("CARGO_PKG_VERSION").to_string());
        for (k, v) in [
            ("table.E", t.young_deck),
            ("table.Ec", t.young_cable),
            ("table.G", t.shear),
            ("table.f", t.sag),
            ("table.I", t.inertia),
            ("table.K", t.torsion_const),
            ("table.J", t.warping_const),
            ("table.A", t.area),
            ("table.Ac", t.cable_area),
            ("table.H", t.tension),
            ("table.L0", t.cable_length),
            ("model.M", self.mass),
        ] {
            kv(k, format!("{v:?}"));
        }
        kv("model.D", d(self.bending));
        kv("model.eps", d(self.eps));
        kv("model.kappa", d(self.kappa));
        for (k, v) in [
            ("model.ell", self.ell),
            ("model.delta", self.delta),
            ("model.zeta", self.zeta),
            ("model.beta", self.beta),
            ("model.Upsilon", self.upsilon),
            ("model.U", self.wind_speed),
            ("model.P", self.prestress),
        ] {
            kv(k, format!("{v:?}"));
        }
        kv("model.S", d(self.stretching));
        kv("model.g", format!("{:?}", self.gravity));
        kv("cable.active", self.cable_active.to_string());
        kv("cable.a", d(self.cable_a));
        kv("cable.s0", format!("{:?}", self.cable_s0));
        kv("cable.b", d(self.cable_b));
        kv("cable.c", d(self.cable_c));
        kv("basis.L", format!("{:?}", self.length));
        kv("basis.n_w", self.n_w.to_string());
        kv("basis.n_t", self.n_t.to_string());
        kv("integrator.method", self.method.to_string());
        kv(
            "integrator.dt",
            match self.dt {
                Step::Literal(v) => format!("{v:?}"),
                Step::Auto => "auto".into(),
            },
        );
        kv("integrator.rtol", format!("{:?}", self.rtol));
        kv("integrator.atol", format!("{:?}", self.atol));
        kv("integrator.t_end", format!("{:?}", self.t_end));
        kv(
            "initial.units",
            (if self.displayed { "displayed" } else { "modal" }).into(),
        );
        let mut entries = self.initial.clone();
        entries.sort_by_key(|a| (a.field, a.mode));
        for e in entries {
            let mode = e.mode.map_or("all".to_string(), |j| j.to_string());
            kv(&format!("initial.{}.{mode}", e.field.name()), format!("{:?}", e.value));
        }
        kv("output.directory", self.directory.clone());
        kv("output.every", format!("{:?}", self.every));
        kv(
            "output.channels",
            self.channels.as_ref().map_or("all".to_string(), |c| c.join(", ")),
        );
        kv("sweep.beta", list(&self.sweep_beta));
        kv("sweep.U", list(&self.sweep_wind));
        kv("sweep.decay_below", format!("{:?}", self.thresholds.decay_below));
        kv("sweep.growth_above", format!("{:?}", self.thresholds.growth_above));
        kv("sweep.window", format!("{:?}", self.thresholds.window));
        kv("sweep.mode", self.thresholds.mode.to_string());
        kv("linear.linearize", self.linearize.to_string());
        kv("linear.csv", self.linear_csv.to_string());
        out
    }
}

fn parse_initial(key: &str, rest: &str, v: &str) -> Result<InitialEntry, CliError> {
    let (f, m) = rest
        .split_once('.')
        .ok_or_else(|| err(key, "expected initial.<w|wdot|th|thdot>.<all|mode>"))?;
    let field = Field::parse(f).ok_or_else(|| err(key, "unknown key"))?;
    let mode = if m == "all" {
        None
    } else {
        Some(m.parse::<usize>().map_err(|_| err(key, "unknown key"))?)
    };
    Ok(InitialEntry {
        field,
        mode,
        value: num(key, v)?,
    })
}

/// Per-mode modal entries reproducing `s` exactly.
fn expand_initial(s: &ModalState) -> Vec<InitialEntry> {
    let mut out = Vec::new();
    for (field, v) in [
        (Field::W, &s.w),
        (Field::Wdot, &s.wdot),
        (Field::Th, &s.th),
        (Field::Thdot, &s.thdot),
    ] {
        for (j, x) in v.iter().enumerate() {
            if *x != 0.0 {
                out.push(InitialEntry {
                    field,
                    mode: Some(j + 1),
                    value: *x,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = SimConfig::parse("").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.params, ModelParams::default());
        assert!(r.geometry.is_inactive());
        assert!(r.initial.to_vec().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unknown_and_repeated_keys() {
        let e = SimConfig::parse("modle.M = 1\n").unwrap_err();
        assert!(e.to_string().contains("modle.M"), "{e}");
        let e = SimConfig::parse("model.M = 1\nmodel.M = 2\n").unwrap_err();
        assert!(e.to_string().contains("model.M"));
        let e = SimConfig::parse("model.M = heavy\n").unwrap_err();
        assert!(e.to_string().contains("model.M"));
        assert!(SimConfig::parse("initial.q.1 = 1\n").is_err());
        assert!(SimConfig::parse("basis.n_w = 2\ninitial.w.3 = 1\n").is_err());
        assert!(SimConfig::parse("output.channels = w_1, z_2\n").is_err());
        assert!(SimConfig::parse("model.M = 1\n").is_ok());
    }

    #[test]
    fn derive_tokens() {
        let text = "model.M = 7198\nmodel.g = 9.8\nbasis.L = 853.44\nmodel.ell = 6\nmodel.D = derive\nmodel.eps = derive\n\
                    model.kappa = derive\nmodel.S = derive\ncable.active = true\ncable.a = derive\ncable.b = derive\ncable.c = derive\n";
        let r = SimConfig::parse(text).unwrap().resolve().unwrap();
        let t = TnbTable::default();
        assert_eq!(r.params.bending, t.young_deck * t.inertia);
        assert_eq!(r.params.stretching, t.stretching());
        assert_eq!(r.geometry.a(), t.cable_a());
        assert_eq!(r.geometry.c(), t.tension);
        assert!(r.config.manifest().lines().all(|l| !l.ends_with(DERIVE)));
    }

    #[test]
    fn broadcast_then_override() {
        let cfg = SimConfig::parse("basis.n_w = 3\ninitial.w.2 = 5\ninitial.w.all = 1\n").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.initial.w, vec![1.0, 5.0, 1.0]);
    }

    #[test]
    fn manifest_round_trip() {
        let text = "basis.n_w = 3\nbasis.n_t = 2\ninitial.units = displayed\ninitial.th.all = 0.3\nmodel.U = -1e-7\n\
                    integrator.dt = auto\nsweep.beta = 1e-3, 2e-3\n";
        let r = SimConfig::parse(text).unwrap().resolve().unwrap();
        let again = SimConfig::parse(&r.config.manifest()).unwrap().resolve().unwrap();
        assert_eq!(again.config, r.config);
        assert_eq!(again.initial, r.initial);
        assert_eq!(again.integrator, r.integrator);
        assert_eq!(again.config.manifest(), r.config.manifest());
    }
}
