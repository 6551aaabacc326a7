//! Three-stage strong-stability-preserving Runge-Kutta time marching.

use thiserror::Error;

/// Linear-combination interface the integrator needs from a solution vector.
pub trait State: Clone {
    fn scale(&mut self, a: f64);
    /// `self += a * other`.
    fn axpy(&mut self, a: f64, other: &Self);
    fn all_finite(&self) -> bool;
}

impl State for f64 {
    fn scale(&mut self, a: f64) {
        *self *= a;
    }
    fn axpy(&mut self, a: f64, other: &Self) {
        *self += a * other;
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl State for Vec<f64> {
    fn scale(&mut self, a: f64) {
        for v in self.iter_mut() {
            *v *= a;
        }
    }
    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (v, o) in self.iter_mut().zip(other) {
            *v += a * o;
        }
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Error)]
pub enum StepError<E> {
    #[error("spatial operator failed in stage {stage}: {source}")]
    Operator { stage: u8, source: E },
    #[error("non-finite state after stage {stage}")]
    NonFinite { stage: u8 },
}

#[derive(Debug, Error)]
pub enum AdvanceError<E> {
    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        source: StepError<E>,
    },
    #[error("exceeded max_steps = {max} at t = {time}")]
    MaxSteps { max: usize, time: f64 },
    #[error("non-positive time step {dt} at t = {time}")]
    InvalidDt { dt: f64, time: f64 },
}

/// One SSP-RK3 step:
///
/// ```text
/// u*   = u + dt L(u)
/// u**  = 3/4 u + 1/4 u* + 1/4 dt L(u*)
/// u^n1 = 1/3 u + 2/3 u** + 2/3 dt L(u**)
/// ```
pub fn ssp_rk3_step<S: State, E>(
    u: &S,
    dt: f64,
    mut l: impl FnMut(&S) -> Result<S, E>,
) -> Result<S, StepError<E>> {
    let k = l(u).map_err(|source| StepError::Operator { stage: 1, source })?;
    let mut u1 = u.clone();
    u1.axpy(dt, &k);
    if !u1.all_finite() {
        return Err(StepError::NonFinite { stage: 1 });
    }

    let k = l(&u1).map_err(|source| StepError::Operator { stage: 2, source })?;
    let mut u2 = u.clone();
    u2.scale(0.75);
    u2.axpy(0.25, &u1);
    u2.axpy(0.25 * dt, &k);
    if !u2.all_finite() {
        return Err(StepError::NonFinite { stage: 2 });
    }

    let k = l(&u2).map_err(|source| StepError::Operator { stage: 3, source })?;
    let mut out = u.clone();
    out.scale(1.0 / 3.0);
    out.axpy(2.0 / 3.0, &u2);
    out.axpy(2.0 / 3.0 * dt, &k);
    if !out.all_finite() {
        return Err(StepError::NonFinite { stage: 3 });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct TimeLoopConfig {
    pub t_end: f64,
    pub max_steps: usize,
}

impl TimeLoopConfig {
    pub fn new(t_end: f64) -> Self {
        Self { t_end, max_steps: 100_000_000 }
    }
}

/// March `state` to `t_end`, clipping the final step to land exactly on it.
/// `dt_of` supplies the nominal step for the current state (CFL rule).
/// Returns the final state and the number of steps taken.
pub fn advance_to<S: State, E>(
    state: S,
    config: &TimeLoopConfig,
    mut dt_of: impl FnMut(&S) -> f64,
    mut l: impl FnMut(&S) -> Result<S, E>,
) -> Result<(S, usize), AdvanceError<E>> {
    let mut u = state;
    let mut t = 0.0;
    let mut steps = 0usize;
    let t_end = config.t_end;
    while t < t_end && (t_end - t) > 1e-14 * t_end.max(1.0) {
        if steps >= config.max_steps {
            return Err(AdvanceError::MaxSteps { max: config.max_steps, time: t });
        }
        let mut dt = dt_of(&u);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(AdvanceError::InvalidDt { dt, time: t });
        }
        if t + dt >= t_end {
            dt = t_end - t;
        }
        u = ssp_rk3_step(&u, dt, &mut l)
            .map_err(|source| AdvanceError::Step { step: steps, time: t, source })?;
        t += dt;
        steps += 1;
    }
    Ok((u, steps))
}
