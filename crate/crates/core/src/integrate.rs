//! Classical RK4 advancement with CFL step control and fixed-cadence
//! diagnostics.
//!
//! Diagnostics are sampled at the times `k·sample_every·dt_max` and at
//! `t_end`; steps are shortened so that every sample time is hit exactly.
//! Runs that share `dt_max` and `sample_every` are therefore comparable
//! sample by sample, whatever their CFL history.

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, Dealias, EpState};
use crate::error::{Error, Result};
use crate::spectral::{self, VelocityField};

/// Upper end of the admissible dispersion interval `[0, α₀]`.
pub const ALPHA_MAX: f64 = 1.0;

const SPEED_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    pub alpha: f64,
    pub s: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub blowup_factor: f64,
    pub sample_every: usize,
}

impl SimParams {
    /// Defaults for dimension `d`: `s = 2.5` for `d ≥ 2`, `2.0` for `d = 1`.
    pub fn defaults_for(dim: usize) -> Self {
        Self {
            alpha: 0.0,
            s: if dim >= 2 { 2.5 } else { 2.0 },
            t_end: 1.0,
            cfl: 0.3,
            dt_max: 1e-2,
            blowup_factor: 10.0,
            sample_every: 10,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::param(m));
        if !(self.alpha.is_finite() && (0.0..=ALPHA_MAX).contains(&self.alpha)) {
            return bad(format!("alpha must lie in [0, {ALPHA_MAX}], got {}", self.alpha));
        }
        let threshold = 1.0 + dim as f64 / 2.0;
        if !(self.s.is_finite() && self.s > threshold) {
            return bad(format!("s must exceed 1 + d/2 = {threshold}, got {}", self.s));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return bad(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if !(self.blowup_factor.is_finite() && self.blowup_factor > 1.0) {
            return bad(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        Ok(())
    }

    /// Spacing of diagnostic sample times.
    pub fn sample_interval(&self) -> f64 {
        self.sample_every as f64 * self.dt_max
    }
}

/// One diagnostic sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub hs_norm: f64,
    pub l2_energy: f64,
    pub kinetic_energy_alpha: f64,
    pub linf_grad: f64,
    pub dt_used: f64,
}

impl DiagnosticsRow {
    pub const COLUMNS: [&'static str; 6] =
        ["t", "hs_norm", "l2_energy", "kinetic_energy_alpha", "linf_grad", "dt_used"];

    pub fn values(&self) -> [f64; 6] {
        [self.t, self.hs_norm, self.l2_energy, self.kinetic_energy_alpha, self.linf_grad, self.dt_used]
    }

    pub fn measure(u: &VelocityField, t: f64, s: f64, alpha: f64, dt_used: f64) -> Self {
        Self {
            t,
            hs_norm: spectral::sobolev_norm(u, s),
            l2_energy: dynamics::energy_l2(u),
            kinetic_energy_alpha: dynamics::energy_kinetic(u, alpha),
            linf_grad: spectral::linf_grad(u),
            dt_used,
        }
    }
}

/// A time-derivative `du/dt = F(u)`.
pub trait RightHandSide: Sync {
    fn evaluate(&self, u: &VelocityField) -> Result<VelocityField>;

    /// Dispersion parameter reported in diagnostics.
    fn alpha(&self) -> f64 {
        0.0
    }
}

/// Which system to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// EP_α with the given dispersion parameter.
    EpAlpha { alpha: f64, dealias: Dealias },
    /// The zero-dispersion system EP₀.
    Ep0,
}

impl Model {
    pub fn ep_alpha(alpha: f64) -> Self {
        Model::EpAlpha { alpha, dealias: Dealias::TwoThirds }
    }
}

impl RightHandSide for Model {
    fn evaluate(&self, u: &VelocityField) -> Result<VelocityField> {
        match *self {
            Model::EpAlpha { alpha, dealias } => {
                let state = EpState { u: u.clone(), t: 0.0, alpha };
                dynamics::rhs_ep_alpha(&state, dealias)
            }
            Model::Ep0 => Ok(dynamics::rhs_ep0(u)),
        }
    }

    fn alpha(&self) -> f64 {
        match *self {
            Model::EpAlpha { alpha, .. } => alpha,
            Model::Ep0 => 0.0,
        }
    }
}

/// Adapts a closure into a [`RightHandSide`].
pub struct FnRhs<F>(pub F);

impl<F> RightHandSide for FnRhs<F>
where
    F: Fn(&VelocityField) -> VelocityField + Sync,
{
    fn evaluate(&self, u: &VelocityField) -> Result<VelocityField> {
        Ok((self.0)(u))
    }
}

/// Abnormal termination: non-finite values or norm growth beyond the guard.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub t: f64,
    pub reason: String,
    pub last_state: EpState,
    pub trajectory: Vec<DiagnosticsRow>,
    pub snapshots: Vec<EpState>,
}

fn blow_up(state: &EpState, reason: String) -> Error {
    Error::BlowUp(Box::new(BlowUp {
        t: state.t,
        reason,
        last_state: state.clone(),
        trajectory: Vec::new(),
        snapshots: Vec::new(),
    }))
}

fn finite_or_blowup(stage: VelocityField, state: &EpState, which: &str) -> Result<VelocityField> {
    if stage.is_finite() {
        Ok(stage)
    } else {
        Err(blow_up(state, format!("non-finite value in RK stage {which}")))
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn step_rk4(state: &EpState, dt: f64, rhs: &dyn RightHandSide) -> Result<EpState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    let u = &state.u;
    let k1 = finite_or_blowup(rhs.evaluate(u)?, state, "1")?;
    let mut tmp = u.clone();
    tmp.axpy_in_place(0.5 * dt, &k1);
    let k2 = finite_or_blowup(rhs.evaluate(&tmp)?, state, "2")?;
    let mut tmp = u.clone();
    tmp.axpy_in_place(0.5 * dt, &k2);
    let k3 = finite_or_blowup(rhs.evaluate(&tmp)?, state, "3")?;
    let mut tmp = u.clone();
    tmp.axpy_in_place(dt, &k3);
    let k4 = finite_or_blowup(rhs.evaluate(&tmp)?, state, "4")?;

    let mut next = u.clone();
    next.axpy_in_place(dt / 6.0, &k1);
    next.axpy_in_place(dt / 3.0, &k2);
    next.axpy_in_place(dt / 3.0, &k3);
    next.axpy_in_place(dt / 6.0, &k4);
    if !next.is_finite() {
        return Err(blow_up(state, "non-finite value after RK update".into()));
    }
    Ok(EpState { u: next, t: state.t + dt, alpha: state.alpha })
}

/// Result of a completed integration.
#[derive(Debug, Clone)]
pub struct Run {
    pub trajectory: Vec<DiagnosticsRow>,
    pub final_state: EpState,
    /// States at every diagnostic sample time, when requested.
    pub snapshots: Vec<EpState>,
}

/// Integration switches that do not change the numerics.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub keep_snapshots: bool,
}

/// Integrates `u0` under `model` up to `params.t_end`. `params.alpha` is
/// ignored; the dispersion parameter comes from `model`.
pub fn integrate(
    u0: &VelocityField,
    params: &SimParams,
    model: &dyn RightHandSide,
    options: RunOptions,
) -> Result<Run> {
    params.validate(u0.dim())?;
    let alpha = model.alpha();
    let s = params.s;
    let interval = params.sample_interval();
    let dx = u0.grid().spacing();
    let hs0 = spectral::sobolev_norm(u0, s);
    let guard = params.blowup_factor * hs0;

    let mut state = EpState::new(u0.clone(), 0.0, alpha)?;
    let mut trajectory = vec![DiagnosticsRow::measure(u0, 0.0, s, alpha, 0.0)];
    let mut snapshots = Vec::new();
    if options.keep_snapshots {
        snapshots.push(state.clone());
    }

    let fail = |err: Error, trajectory: &[DiagnosticsRow], snapshots: &[EpState]| match err {
        Error::BlowUp(mut b) => {
            b.trajectory = trajectory.to_vec();
            b.snapshots = snapshots.to_vec();
            Error::BlowUp(b)
        }
        other => other,
    };

    let mut sample_index: u64 = 1;
    loop {
        let target = (sample_index as f64 * interval).min(params.t_end);
        let mut last_dt = 0.0;
        while state.t < target {
            let speed = spectral::linf_norm(&state.u).max(SPEED_FLOOR);
            let bound = params.dt_max.min(params.cfl * dx / speed);
            let remaining = target - state.t;
            let steps = ((remaining / bound) - 1e-9).ceil().max(1.0);
            let dt = remaining / steps;
            let landing = steps <= 1.0;
            state = step_rk4(&state, dt, model).map_err(|e| fail(e, &trajectory, &snapshots))?;
            if landing {
                state.t = target;
            }
            last_dt = dt;
            if hs0 > 0.0 {
                let hs = spectral::sobolev_norm(&state.u, s);
                if hs > guard {
                    let err = blow_up(
                        &state,
                        format!("H^s norm {hs:.6e} exceeds {:.1}x initial norm", params.blowup_factor),
                    );
                    return Err(fail(err, &trajectory, &snapshots));
                }
            }
        }
        trajectory.push(DiagnosticsRow::measure(&state.u, state.t, s, alpha, last_dt));
        if options.keep_snapshots {
            snapshots.push(state.clone());
        }
        if target >= params.t_end {
            break;
        }
        sample_index += 1;
    }
    Ok(Run { trajectory, final_state: state, snapshots })
}

/// First time `‖u‖_{Hˢ}` reaches twice its initial value, linearly
/// interpolated between the bracketing samples.
pub fn doubling_time(trajectory: &[DiagnosticsRow]) -> Option<f64> {
    let first = trajectory.first()?;
    if first.hs_norm <= 0.0 {
        return None;
    }
    let level = 2.0 * first.hs_norm;
    trajectory.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.hs_norm < level && b.hs_norm >= level {
            let frac = (level - a.hs_norm) / (b.hs_norm - a.hs_norm);
            Some(a.t + frac * (b.t - a.t))
        } else {
            None
        }
    })
}
