//! CSV writers. Numbers use `{:.16e}` (17 significant digits), Unix newlines.

use fishbone::dynamics::ModalState;
use fishbone::experiments::SweepRow;
use std::fmt::Write as _;

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let cells: Vec<String> = values.into_iter().map(fmt_num).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Value of a channel such as `w_3` or `thdot_1`.
pub fn channel_value(s: &ModalState, name: &str) -> f64 {
    let (field, j) = name.rsplit_once('_').expect("validated channel name");
    let j: usize = j.parse().expect("validated channel index");
    let v = match field {
        "w" => &s.w,
        "wdot" => &s.wdot,
        "th" => &s.th,
        _ => &s.thdot,
    };
    v[j - 1]
}

pub fn trajectory_csv(times: &[f64], states: &[ModalState], channels: &[String]) -> String {
    let mut out = String::from("t");
    for c in channels {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (t, s) in times.iter().zip(states) {
        row(
            &mut out,
            std::iter::once(*t).chain(channels.iter().map(|c| channel_value(s, c))),
        );
    }
    out
}

/// Columns `t,E,Eplus,Efull,residual`.
pub fn energy_csv(times: &[f64], e: &[f64], e_plus: &[f64], e_full: &[f64], residual: &[f64]) -> String {
    let mut out = String::from("t,E,Eplus,Efull,residual\n");
    for i in 0..times.len() {
        row(&mut out, [times[i], e[i], e_plus[i], e_full[i], residual[i]]);
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("beta,U,ratio,class,error\n");
    for r in rows {
        let msg = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.beta),
            fmt_num(r.wind_speed),
            fmt_num(r.ratio),
            r.class.as_str(),
            msg
        );
    }
    out
}
