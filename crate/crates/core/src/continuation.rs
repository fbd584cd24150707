//! Two-level global continuation: solve the local existence time from the
//! norm equation T^{1/2}[1 + D̃_T] = ε/2, repeat windows with the fixed
//! increment under the doubling guard and the log-weighted stop rule, then
//! chain stages with the increment re-solved from the reached state.

use crate::error::{CoreError, Result};
use crate::evolution::{solve_interval, CoupledState, Trajectory};
use crate::norms::d_tilde_from_potential;
use serde::Serialize;

/// Solver for T with |T^{1/2}[1 + D̃_T(0)] − ε/2| ≤ 1e−6·ε.
///
/// The map T ↦ D̃_T(0) is only quasi-monotone, so g(T) = T^{1/2}[1+D̃_T(0)]
/// − ε/2 may have several sign changes; a coarse dyadic scan locates the
/// largest T in (0, 1] with g ≤ 0 on its left, then bisection refines it.
pub fn solve_t(epsilon: f64, mut d_tilde: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(CoreError::Parameter("epsilon must be positive".into()));
    }
    let target = epsilon / 2.0;
    let g = |t: f64, d: &mut dyn FnMut(f64) -> Result<f64>| -> Result<f64> {
        Ok(t.sqrt() * (1.0 + d(t)?) - target)
    };
    // Dyadic scan down from T = 1.
    let mut hi = 1.0f64;
    let mut g_hi = g(hi, &mut d_tilde)?;
    if g_hi <= 0.0 {
        // Largest admissible T is the endpoint itself.
        return Ok(hi);
    }
    let mut lo = hi;
    let mut found = false;
    for _ in 0..60 {
        lo = hi / 2.0;
        let g_lo = g(lo, &mut d_tilde)?;
        if g_lo <= 0.0 {
            found = true;
            break;
        }
        hi = lo;
        g_hi = g_lo;
    }
    let _ = g_hi;
    if !found {
        return Err(CoreError::NoAdmissibleTime(format!(
            "T^(1/2)[1+D̃_T(0)] stays above ε/2 = {target} down to T = {lo:.3e}"
        )));
    }
    // Bisection on [lo, hi] for the sign change; tolerance on the residual.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid, &mut d_tilde)?;
        if gm.abs() <= 1e-6 * epsilon {
            return Ok(mid);
        }
        if gm <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let res = g(t, &mut d_tilde)?;
    if res.abs() <= 1e-6 * epsilon {
        Ok(t)
    } else {
        Err(CoreError::NoAdmissibleTime(format!(
            "bisection stalled at T = {t:.6e} with residual {res:.3e}"
        )))
    }
}

/// D̃_T(0) of a coupled state as a function of T, for the T-solver.
pub fn d_tilde_of_state(state: &CoupledState) -> impl FnMut(f64) -> Result<f64> + '_ {
    let j = state.current();
    move |t| d_tilde_from_potential(&state.pot, &j, t)
}

/// Fitted growth constant: C_fit = [sup_t D̃_T(t) − D̃_T(0)] / (T^{1/2}·log(1/T)).
pub fn growth_certificate(traj: &Trajectory, t_param: f64) -> Result<GrowthFit> {
    if !(t_param > 0.0 && t_param < 1.0) {
        return Err(CoreError::Parameter(
            "growth certificate needs 0 < T < 1 (log factor positive)".into(),
        ));
    }
    let series = traj.d_tilde_series(t_param)?;
    let series: Vec<(f64, f64)> = series
        .into_iter()
        .filter(|(t, _)| *t <= traj.diagnostics[0].time + t_param + 1e-12)
        .collect();
    let d0 = series.first().map(|(_, v)| *v).unwrap_or(0.0);
    let sup = series.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let denom = t_param.sqrt() * (1.0 / t_param).ln();
    Ok(GrowthFit { t_param, d_start: d0, d_sup: sup, c_fit: (sup - d0).max(0.0) / denom })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthFit {
    pub t_param: f64,
    pub d_start: f64,
    pub d_sup: f64,
    pub c_fit: f64,
}

/// Per-stage record of the first iteration.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Stage start time S_{j−1}.
    pub s_start: f64,
    /// Local increment T_j solved from the norm equation.
    pub t_increment: f64,
    /// Residual of the defining equation at T_j.
    pub t_residual: f64,
    /// Windows completed.
    pub n_windows: usize,
    /// Δ_j = n_j·T_j.
    pub delta: f64,
    pub d_start: f64,
    pub d_end: f64,
    /// Fitted growth constant from the first window.
    pub c_fit: f64,
    /// Whether D̃_T stayed ≤ 2·D̃_T(start) throughout.
    pub doubling_ok: bool,
    /// Whether D̃_T(Δ) ≤ 3·D̃_T(start).
    pub tripling_ok: bool,
    /// Whether the stop rule (rather than the cap or t_max) ended the stage.
    pub stopped_by_rule: bool,
}

/// Scheduler bookkeeping across stages.
#[derive(Debug, Clone, Serialize)]
pub struct SchedulerState {
    pub epsilon: f64,
    pub stages: Vec<StageRecord>,
    /// Bridging comparisons D̃_{T_{j+1}}(S_j) ≤ 3C·D̃_{T_j}(S_{j−1}).
    pub bridging: Vec<BridgeRecord>,
    pub s_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeRecord {
    pub stage: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// Which of the two cases applied (T_{j+1} ≤ T_j or not).
    pub shrinking_increment: bool,
}

#[derive(Debug, Clone)]
pub struct RunParams {
    /// Steps per window: dt = T_j / steps_per_window.
    pub steps_per_window: usize,
    /// Cap on windows per stage (the stop rule may never fire for tiny data).
    pub max_windows: usize,
    /// Cap on stages.
    pub max_stages: usize,
    /// Total time horizon.
    pub t_max: f64,
    /// Monotonicity constant used in the bridging comparison.
    pub c_magic: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            steps_per_window: 16,
            max_windows: 32,
            max_stages: 4,
            t_max: 1.0,
            c_magic: 4.0,
        }
    }
}

/// Outcome of one stage of the first iteration plus the reached state.
pub struct StageOutcome {
    pub record: StageRecord,
    pub state: CoupledState,
}

/// One stage: solve T from the state, march windows of length T while
/// D̃_T ≤ 2·D̃_T(start), stop at the first n with
/// n·C·T^{1/2}·log(1/T) > D̃_T(start) (C refreshed from the first window),
/// and record Δ = nT with the doubling/tripling verdicts.
pub fn first_iteration(
    state: &CoupledState,
    epsilon: f64,
    params: &RunParams,
    stage_idx: usize,
) -> Result<StageOutcome> {
    let d_fn = d_tilde_of_state(state);
    let t_inc = solve_t(epsilon, d_fn)?;
    let mut d_fn = d_tilde_of_state(state);
    let d_start = d_fn(t_inc)?;
    let t_residual = (t_inc.sqrt() * (1.0 + d_start) - epsilon / 2.0).abs();
    drop(d_fn);

    let dt = t_inc / params.steps_per_window.max(1) as f64;
    let log_factor = if t_inc < 1.0 { (1.0 / t_inc).ln() } else { 0.0 };

    let mut current = state.clone();
    let mut n_windows = 0usize;
    let mut c_fit = 0.0f64;
    let mut doubling_ok = true;
    let mut stopped_by_rule = false;
    let s_start = state.time();

    while n_windows < params.max_windows {
        if current.time() + t_inc > s_start + params.t_max + 1e-12 {
            break;
        }
        let traj = solve_interval(&current, t_inc, dt, 1)?;
        if n_windows == 0 {
            c_fit = growth_certificate(&traj, t_inc.min(0.999_999))?.c_fit;
        }
        current = traj.final_state().clone();
        n_windows += 1;
        let j = current.current();
        let d_now = d_tilde_from_potential(&current.pot, &j, t_inc)?;
        if d_now > 2.0 * d_start && d_start > 0.0 {
            doubling_ok = false;
            break;
        }
        if (n_windows as f64) * c_fit * t_inc.sqrt() * log_factor > d_start {
            stopped_by_rule = true;
            break;
        }
    }

    let j = current.current();
    let d_end = d_tilde_from_potential(&current.pot, &j, t_inc)?;
    let tripling_ok = d_start == 0.0 || d_end <= 3.0 * d_start;
    Ok(StageOutcome {
        record: StageRecord {
            stage: stage_idx,
            s_start,
            t_increment: t_inc,
            t_residual,
            n_windows,
            delta: n_windows as f64 * t_inc,
            d_start,
            d_end,
            c_fit,
            doubling_ok,
            tripling_ok,
            stopped_by_rule,
        },
        state: current,
    })
}

/// Chains stages, re-solving T from the reached data, and emits the
/// bridging comparisons of consecutive stages.
pub fn global_schedule(
    initial: &CoupledState,
    epsilon: f64,
    params: &RunParams,
) -> Result<SchedulerState> {
    if !params.t_max.is_finite() {
        return Err(CoreError::Parameter("t_max must be finite".into()));
    }
    let mut stages = Vec::new();
    let mut bridging = Vec::new();
    let mut state = initial.clone();
    for j in 1..=params.max_stages {
        let out = first_iteration(&state, epsilon, params, j)?;
        state = out.state;
        let rec = out.record;
        if let Some(prev) = stages.last() {
            let prev: &StageRecord = prev;
            // D̃ at the new stage start measured with the NEW increment.
            let lhs = {
                let cur = state.current();
                d_tilde_from_potential(&state.pot, &cur, rec.t_increment)?
            };
            let rhs = 3.0 * params.c_magic * prev.d_start.max(0.0);
            bridging.push(BridgeRecord {
                stage: j,
                lhs,
                rhs,
                ok: lhs <= rhs || prev.d_start == 0.0,
                shrinking_increment: rec.t_increment <= prev.t_increment,
            });
        }
        let done = state.time() >= initial.time() + params.t_max - 1e-12
            || rec.n_windows == 0;
        stages.push(rec);
        if done {
            break;
        }
    }
    Ok(SchedulerState {
        epsilon,
        s_final: state.time(),
        stages,
        bridging,
    })
}

impl SchedulerState {
    /// min over stages of Δ_j·(j+1): the harmonic-divergence signature.
    pub fn delta_trend_floor(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.delta * (s.stage as f64 + 1.0))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_tripling_ok(&self) -> bool {
        self.stages.iter().all(|s| s.tripling_ok)
    }

    pub fn all_bridging_ok(&self) -> bool {
        self.bridging.iter().all(|b| b.ok)
    }

    pub fn max_t_residual_ratio(&self, epsilon: f64) -> f64 {
        self.stages
            .iter()
            .map(|s| s.t_residual / epsilon)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, DataSpec, FieldSpec, Profile};
    use crate::grid::Grid2D;

    #[test]
    fn solve_t_zero_and_constant_norm() {
        // D̃ ≡ 0 → T = ε²/4, up to the residual tolerance 1e−6·ε.
        let eps = 0.1;
        let t = solve_t(eps, |_| Ok(0.0)).unwrap();
        assert!((t.sqrt() - eps / 2.0).abs() <= 1e-6 * eps);
        assert!((t - eps * eps / 4.0).abs() < 1e-5 * (eps * eps / 4.0));
        // Constant D: T = (ε/2)²/(1+D)².
        let d = 3.0;
        let t = solve_t(eps, |_| Ok(d)).unwrap();
        let expect = (eps / 2.0 / (1.0 + d)).powi(2);
        assert!((t.sqrt() * (1.0 + d) - eps / 2.0).abs() <= 1e-6 * eps);
        assert!((t - expect).abs() < 1e-4 * expect);
        // ε so large that T = 1 qualifies.
        let t = solve_t(10.0, |_| Ok(0.5)).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        // Data too large for any T: g > 0 on the whole scan range.
        let err = solve_t(1e-12, |t| Ok(1.0 / t));
        assert!(err.is_err());
    }

    #[test]
    fn solve_t_residual_small_on_synthetic_norm() {
        // A non-trivial quasi-monotone profile.
        let eps = 0.2;
        let f = |t: f64| Ok(2.0 + 0.5 * (8.0 * t).sin().abs() + t.sqrt());
        let t = solve_t(eps, f).unwrap();
        let d = 2.0 + 0.5 * (8.0 * t).sin().abs() + t.sqrt();
        let res = (t.sqrt() * (1.0 + d) - eps / 2.0).abs();
        assert!(res <= 1e-6 * eps, "res {res}");
    }

    fn moderate_state() -> CoupledState {
        let grid = Grid2D::new(32, 2.0 * std::f64::consts::PI * 4.0).unwrap();
        let spec = DataSpec {
            seed: 42,
            psi: FieldSpec { amplitude: 0.15, profile: Profile::Gaussian { width: 2.0, center: None } },
            e_df: FieldSpec {
                amplitude: 0.3,
                profile: Profile::Gaussian { width: 2.5, center: Some([10.0, 14.0]) },
            },
            b3: FieldSpec {
                amplitude: 0.3,
                profile: Profile::Gaussian { width: 2.2, center: Some([14.0, 9.0]) },
            },
        };
        let d = generate(grid, &spec).unwrap();
        CoupledState::from_data(&d, 1.0).unwrap()
    }

    #[test]
    fn zero_data_single_capped_stage() {
        let grid = Grid2D::new(16, 2.0 * std::f64::consts::PI * 4.0).unwrap();
        let d = generate(grid, &DataSpec::zero(1)).unwrap();
        let state = CoupledState::from_data(&d, 1.0).unwrap();
        let params = RunParams {
            steps_per_window: 4,
            max_windows: 5,
            max_stages: 3,
            t_max: 1e9,
            c_magic: 4.0,
        };
        let sched = global_schedule(&state, 0.1, &params).unwrap();
        // With D̃ ≡ 0 the stop rule never fires; the cap ends each stage,
        // and T = ε²/4 exactly.
        assert!(sched.stages.iter().all(|s| s.n_windows == 5));
        assert!((sched.stages[0].t_increment - 0.0025).abs() < 1e-7);
        assert!(sched.all_tripling_ok());
        // zero data: growth certificate is exactly zero
        assert!(sched.stages[0].c_fit == 0.0);
    }

    #[test]
    fn moderate_data_stages_progress() {
        let state = moderate_state();
        let params = RunParams {
            steps_per_window: 8,
            max_windows: 6,
            max_stages: 3,
            t_max: 10.0,
            c_magic: 4.0,
        };
        let sched = global_schedule(&state, 0.1, &params).unwrap();
        assert!(sched.stages.len() >= 2, "stages: {}", sched.stages.len());
        // S_j strictly increasing and consistent bookkeeping.
        let mut s = 0.0;
        for rec in &sched.stages {
            assert!((rec.s_start - s).abs() < 1e-9);
            assert!(rec.delta > 0.0);
            assert!(rec.t_residual <= 1e-6 * 0.1);
            s += rec.delta;
        }
        assert!((sched.s_final - s).abs() < 1e-9);
        assert!(sched.all_tripling_ok());
        assert!(sched.all_bridging_ok());
        assert!(sched.delta_trend_floor() > 0.0);
    }

    #[test]
    fn growth_certificate_zero_run_and_error_cases() {
        let grid = Grid2D::new(16, 2.0 * std::f64::consts::PI * 4.0).unwrap();
        let d = generate(grid, &DataSpec::zero(2)).unwrap();
        let state = CoupledState::from_data(&d, 1.0).unwrap();
        let traj = solve_interval(&state, 0.1, 0.025, 1).unwrap();
        let fit = growth_certificate(&traj, 0.1).unwrap();
        assert!(fit.c_fit == 0.0);
        assert!(growth_certificate(&traj, 1.0).is_err());
    }
}
