//! Named config texts printed by `fishbone preset NAME`.

pub const NAMES: [&str; 6] = ["unit", "tnb", "fig3", "fig4", "fig5", "fig6"];

const UNIT: &str = "\
# Nondimensional unit model on (0, pi) with a small cable.
run.name = unit
model.M = 1
model.D = 1
model.eps = 0.5
model.kappa = 0.3
model.ell = 1
model.delta = 0.1
model.zeta = 0.1
model.Upsilon = 1
model.S = 1
model.P = 0.5
cable.active = true
cable.a = 0.4
cable.s0 = 1
cable.b = 3
cable.c = 2
basis.L = 3.141592653589793
basis.n_w = 6
basis.n_t = 4
integrator.method = rk4
integrator.dt = 1e-3
integrator.t_end = 10
initial.units = modal
initial.w.1 = 0.5
initial.th.1 = 0.2
output.every = 0.01
";

const TNB: &str = "\
# Tacoma Narrows bridge, SI units. Structural constants are derived from the table.
run.name = tnb
table.E = 210000e6
table.Ec = 185000e6
table.G = 81000e6
table.f = 70.71
table.I = 0.154
table.K = 6.07e-6
table.J = 5.44
table.A = 1.85
table.Ac = 0.1228
table.H = 45413e3
table.L0 = 868.815
model.M = 7198
model.D = derive
model.eps = derive
model.kappa = derive
model.ell = 6
model.delta = 0
model.zeta = 0
model.beta = 0
model.Upsilon = 6
model.U = 0
model.P = 0
model.S = 0
model.g = 9.8
cable.active = true
cable.a = derive
cable.s0 = 1
cable.b = derive
cable.c = derive
basis.L = 853.44
basis.n_w = 10
basis.n_t = 4
integrator.method = rk4
integrator.dt = auto
integrator.t_end = 120
initial.units = displayed
initial.w.all = 3e-3
initial.w.9 = 3
initial.wdot.all = 3e-3
initial.th.all = 3e-3
initial.thdot.all = 3e-3
output.every = 0.01
output.channels = all
";

pub fn preset(name: &str) -> Option<String> {
    let tnb = |extra: &str| format!("run.preset = tnb\n{extra}");
    Some(match name {
        "unit" => UNIT.to_string(),
        "tnb" => TNB.to_string(),
        "fig3" => tnb("# Scenario (i): no damping, stretching or wind.\nrun.name = fig3\n"),
        "fig4" => tnb("# Scenario (ii): wind only.\nrun.name = fig4\nmodel.beta = 1e-2\nmodel.U = 30\n"),
        "fig5" => tnb("# Scenario (iii): wind and stretching.\nrun.name = fig5\nmodel.beta = 1e-2\nmodel.U = 30\nmodel.S = derive\n"),
        "fig6" => tnb(
            "# Scenario (iv): wind, stretching and damping.\nrun.name = fig6\nmodel.beta = 1e-2\nmodel.U = 30\nmodel.S = derive\nmodel.delta = 0.01\nmodel.zeta = 0.01\n",
        ),
        _ => return None,
    })
}
