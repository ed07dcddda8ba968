//! Fixed-step RK4 integration of the (optionally controlled) SIS dynamics
//! `ẋ = -(Δ + U_i) x + (I - X) B x`.

use std::io::{self, Write};

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{NetworkModel, Node};

/// Excursions outside `[0, 1]` up to this size are clamped; larger ones
/// are reported as errors.
pub const CLAMP_TOL: f64 = 1e-9;

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 50.0;
pub const DEFAULT_X0: f64 = 0.5;
pub const DEFAULT_STEADY_TOL: f64 = 1e-9;
pub const DEFAULT_TIME_CAP: f64 = 1e5;

/// A constant curing boost applied to one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Control {
    pub node: Node,
    pub input: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub control: Option<Control>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Writes `t,x1,...,xn` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|k| format!("x{k}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let row: Vec<String> = std::iter::once(*t)
                .chain(x.iter().copied())
                .map(format_significant)
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Plain decimal notation with 12 significant digits.
pub fn format_significant(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (DIGITS - 1 - magnitude).clamp(0, 340) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn check_control(model: &NetworkModel, control: Option<Control>) -> Result<Option<(usize, f64)>> {
    control
        .map(|c| {
            let i = c.node.check(model.n())?;
            if !c.input.is_finite() || c.input < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "control input must be finite and nonnegative, got {}",
                    c.input
                )));
            }
            Ok((i, c.input))
        })
        .transpose()
}

fn check_state(model: &NetworkModel, x: &[f64]) -> Result<()> {
    if x.len() != model.n() {
        return Err(Error::Dimension(format!(
            "state has {} entries, expected {}",
            x.len(),
            model.n()
        )));
    }
    match x
        .iter()
        .enumerate()
        .find(|(_, &v)| !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v))
    {
        Some((index, &value)) => Err(Error::StateOutOfRange {
            index: index + 1,
            value,
        }),
        None => Ok(()),
    }
}

fn field(model: &NetworkModel, x: &DVector<f64>, control: Option<(usize, f64)>) -> DVector<f64> {
    let bx = model.beta() * x;
    let mut dx = DVector::from_fn(model.n(), |k, _| -model.delta()[k] * x[k] + (1.0 - x[k]) * bx[k]);
    if let Some((i, u)) = control {
        dx[i] -= u * x[i];
    }
    dx
}

/// `-(Δ + U_i) x + (I - X) B x`.
pub fn vector_field(model: &NetworkModel, x: &[f64], control: Option<Control>) -> Result<Vec<f64>> {
    check_state(model, x)?;
    let control = check_control(model, control)?;
    Ok(field(model, &DVector::from_column_slice(x), control)
        .iter()
        .copied()
        .collect())
}

/// Integration settings. `every` is the storage stride in steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub dt: f64,
    pub t_end: f64,
    pub every: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            every: 1,
        }
    }
}

fn rk4_step(
    model: &NetworkModel,
    x: &DVector<f64>,
    control: Option<(usize, f64)>,
    dt: f64,
) -> DVector<f64> {
    let k1 = field(model, x, control);
    let k2 = field(model, &(x + &k1 * (0.5 * dt)), control);
    let k3 = field(model, &(x + &k2 * (0.5 * dt)), control);
    let k4 = field(model, &(x + &k3 * dt), control);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

fn clamp_state(x: &mut DVector<f64>, time: f64) -> Result<()> {
    for (k, v) in x.iter_mut().enumerate() {
        if *v < -CLAMP_TOL || *v > 1.0 + CLAMP_TOL || v.is_nan() {
            return Err(Error::Overshoot {
                time,
                index: k + 1,
                value: *v,
            });
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

fn check_step(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")))
    }
}

/// Classical RK4 with a fixed step; the first and last states are always
/// stored, intermediate ones every `params.every` steps.
pub fn simulate(
    model: &NetworkModel,
    x0: &[f64],
    control: Option<Control>,
    params: SimParams,
) -> Result<Trajectory> {
    let SimParams { dt, t_end, every } = params;
    check_step(dt)?;
    if t_end.is_nan() || t_end < dt {
        return Err(Error::InvalidParameter(format!(
            "t_end must be at least dt, got t_end={t_end}, dt={dt}"
        )));
    }
    if every == 0 {
        return Err(Error::InvalidParameter("storage stride must be at least 1".into()));
    }
    check_state(model, x0)?;
    let ctrl = check_control(model, control)?;

    let steps = (t_end / dt).round() as usize;
    let mut x = DVector::from_column_slice(x0);
    clamp_state(&mut x, 0.0)?;
    let mut times = vec![0.0];
    let mut states = vec![x.iter().copied().collect::<Vec<_>>()];
    for k in 1..=steps {
        let t = k as f64 * dt;
        x = rk4_step(model, &x, ctrl, dt);
        clamp_state(&mut x, t)?;
        if k % every == 0 || k == steps {
            times.push(t);
            states.push(x.iter().copied().collect());
        }
    }
    Ok(Trajectory {
        times,
        states,
        control,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub state: Vec<f64>,
    pub elapsed: f64,
}

/// Integrates until `‖dx/dt‖∞ < tol`, failing once `time_cap` is passed.
pub fn steady_state(
    model: &NetworkModel,
    x0: &[f64],
    control: Option<Control>,
    dt: f64,
    tol: f64,
    time_cap: f64,
) -> Result<SteadyState> {
    check_step(dt)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    check_state(model, x0)?;
    let ctrl = check_control(model, control)?;

    let mut x = DVector::from_column_slice(x0);
    clamp_state(&mut x, 0.0)?;
    let mut step = 0u64;
    loop {
        let t = step as f64 * dt;
        let rate = field(model, &x, ctrl).amax();
        if rate < tol {
            return Ok(SteadyState {
                state: x.iter().copied().collect(),
                elapsed: t,
            });
        }
        if t >= time_cap {
            return Err(Error::SteadyStateTimeout { time_cap, rate });
        }
        step += 1;
        x = rk4_step(model, &x, ctrl, dt);
        clamp_state(&mut x, step as f64 * dt)?;
    }
}
