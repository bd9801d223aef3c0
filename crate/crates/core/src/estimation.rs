//! Recovering `Γ_L`, `Γ_T` and `Ω` from a sampled Bloch-form trajectory.
//!
//! The trajectory must come from a Bloch-form matrix with `z` along the real
//! eigenvector, so that `M_z` relaxes as a single exponential towards
//! `M_z(∞)` and `M_x + i M_y` spirals in with rate `Γ_T` and angular speed `Ω`.
//! Every channel is fitted by weighted linear regression on a logarithm (or on
//! the unwrapped phase), with weights equal to the squared envelope. That is
//! exact on noiseless data and keeps samples near the noise floor from
//! dominating the slope.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::spectrum::{triangle_check_gammas, TriangleVerdict};
use crate::tolerance::Tolerances;

pub const MIN_SAMPLES: usize = 16;
/// Fraction of samples at the end of the trajectory averaged for `M_z(∞)`.
pub const TAIL_FRACTION: f64 = 0.05;
const TAIL_REFINEMENTS: usize = 3;
/// Consecutive unwrapped phase steps larger than this mean the rotation is
/// undersampled.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;
/// A large phase step where the envelope has decayed below this fraction of
/// its peak is read as noise, not undersampling: the phase series ends there.
pub const PHASE_NOISE_FRACTION: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    InsufficientData(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "status", content = "reason")]
pub enum ChannelStatus {
    Fitted,
    /// No departure from equilibrium above the envelope floor; rate reported as 0.
    Flat,
    Unfit(String),
}

impl ChannelStatus {
    pub fn is_usable(&self) -> bool {
        !matches!(self, ChannelStatus::Unfit(_))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ChannelResiduals {
    pub longitudinal: f64,
    pub transverse: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelStatuses {
    pub longitudinal: ChannelStatus,
    pub transverse: ChannelStatus,
    pub phase: ChannelStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub gamma_l: f64,
    pub gamma_t: f64,
    pub omega: f64,
    pub mz_infinity: f64,
    /// RMS of the model residual per channel, in the channel's own units.
    pub residuals: ChannelResiduals,
    pub status: ChannelStatuses,
}

struct LineFit {
    slope: f64,
    intercept: f64,
}

/// Weighted least-squares line through `(x, y)`.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    let wmax = w.iter().fold(0.0f64, |m, v| m.max(*v));
    let w: Vec<f64> = w.iter().map(|v| v / wmax).collect();
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((xi, yi), wi) in x.iter().zip(y).zip(&w) {
        sxy += wi * (xi - xm) * (yi - ym);
        sxx += wi * (xi - xm) * (xi - xm);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    LineFit {
        slope,
        intercept: ym - slope * xm,
    }
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

struct ExpFit {
    rate: f64,
    /// Signed amplitude at `t = 0`.
    amplitude: f64,
    status: ChannelStatus,
}

/// Fits `|dev| = c·exp(-rate·t)` on the samples whose `|dev|` exceeds `floor`.
fn fit_decay(t: &[f64], dev: &[f64], floor: f64) -> ExpFit {
    let usable: Vec<usize> = (0..t.len()).filter(|&i| dev[i].abs() > floor).collect();
    if usable.is_empty() {
        return ExpFit {
            rate: 0.0,
            amplitude: 0.0,
            status: ChannelStatus::Flat,
        };
    }
    if usable.len() < MIN_SAMPLES {
        return ExpFit {
            rate: 0.0,
            amplitude: 0.0,
            status: ChannelStatus::Unfit(format!(
                "only {} samples above the envelope floor",
                usable.len()
            )),
        };
    }
    let x: Vec<f64> = usable.iter().map(|&i| t[i]).collect();
    let y: Vec<f64> = usable.iter().map(|&i| dev[i].abs().ln()).collect();
    let w: Vec<f64> = usable.iter().map(|&i| dev[i] * dev[i]).collect();
    let line = weighted_line(&x, &y, &w);
    let sign = dev[usable[0]].signum();
    ExpFit {
        rate: -line.slope,
        amplitude: sign * line.intercept.exp(),
        status: ChannelStatus::Fitted,
    }
}

/// Fits the longitudinal, transverse and phase channels of `traj`.
///
/// `M_z(∞)` is `mz_infinity` when given. Otherwise it starts as the mean of
/// the final 5% of samples and is corrected a few times by subtracting the
/// fitted exponential's average over that window.
pub fn fit_bloch(traj: &Trajectory, mz_infinity: Option<f64>, tol: &Tolerances) -> Result<FitResult, EstimationError> {
    let n = traj.len();
    if n < MIN_SAMPLES {
        return Err(EstimationError::InsufficientData(n));
    }
    let t = traj.times();
    let states = traj.states();
    let floor = tol.fit_envelope_floor;

    // longitudinal
    let z: Vec<f64> = states.iter().map(|m| m.0[2]).collect();
    let tail = ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, n);
    let tail_range = n - tail..n;
    let tail_mean = z[tail_range.clone()].iter().sum::<f64>() / tail as f64;
    let mut z_inf = mz_infinity.unwrap_or(tail_mean);
    let deviations = |z_inf: f64| -> Vec<f64> { z.iter().map(|v| v - z_inf).collect() };
    let mut long = fit_decay(t, &deviations(z_inf), floor);
    if mz_infinity.is_none() {
        for _ in 0..TAIL_REFINEMENTS {
            if long.status != ChannelStatus::Fitted || long.rate <= 0.0 {
                break;
            }
            let excess = t[tail_range.clone()]
                .iter()
                .map(|ti| long.amplitude * (-long.rate * ti).exp())
                .sum::<f64>()
                / tail as f64;
            let candidate = tail_mean - excess;
            if !candidate.is_finite() {
                break;
            }
            z_inf = candidate;
            long = fit_decay(t, &deviations(z_inf), floor);
        }
    }
    let long_resid = match long.status {
        ChannelStatus::Unfit(_) => 0.0,
        _ => rms(t
            .iter()
            .zip(&z)
            .map(|(ti, zi)| zi - (z_inf + long.amplitude * (-long.rate * ti).exp()))),
    };

    // transverse
    let r: Vec<f64> = states.iter().map(|m| m.0[0].hypot(m.0[1])).collect();
    let mut trans = fit_decay(t, &r, floor);
    if trans.status == ChannelStatus::Flat {
        trans.status = ChannelStatus::Unfit("no transverse signal above the envelope floor".into());
    }
    let trans_resid = match trans.status {
        ChannelStatus::Fitted => rms(t
            .iter()
            .zip(&r)
            .map(|(ti, ri)| ri - trans.amplitude * (-trans.rate * ti).exp())),
        _ => 0.0,
    };

    // phase
    let (omega, phase_status, phase_resid) = if trans.status == ChannelStatus::Fitted {
        fit_phase(t, states.iter().map(|m| (m.0[0], m.0[1])).collect(), floor)
    } else {
        (0.0, ChannelStatus::Unfit("transverse channel unfit".into()), 0.0)
    };

    Ok(FitResult {
        gamma_l: long.rate,
        gamma_t: trans.rate,
        omega,
        mz_infinity: z_inf,
        residuals: ChannelResiduals {
            longitudinal: long_resid,
            transverse: trans_resid,
            phase: phase_resid,
        },
        status: ChannelStatuses {
            longitudinal: long.status,
            transverse: trans.status,
            phase: phase_status,
        },
    })
}

fn fit_phase(t: &[f64], xy: Vec<(f64, f64)>, floor: f64) -> (f64, ChannelStatus, f64) {
    use std::f64::consts::{PI, TAU};
    let r: Vec<f64> = xy.iter().map(|(x, y)| x.hypot(*y)).collect();
    let peak = r.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut usable: Vec<usize> = (0..t.len()).filter(|&i| r[i] > floor).collect();
    if usable.len() < MIN_SAMPLES {
        return (0.0, ChannelStatus::Unfit("too few samples with transverse signal".into()), 0.0);
    }
    let mut phase = Vec::with_capacity(usable.len());
    let mut prev_raw = xy[usable[0]].1.atan2(xy[usable[0]].0);
    phase.push(prev_raw);
    for (n, &i) in usable.iter().enumerate().skip(1) {
        let raw = xy[i].1.atan2(xy[i].0);
        // fold the step into (-π, π]
        let mut step = (raw - prev_raw).rem_euclid(TAU);
        if step > PI {
            step -= TAU;
        }
        if step.abs() > MAX_PHASE_STEP && r[i].min(r[usable[n - 1]]) < PHASE_NOISE_FRACTION * peak {
            usable.truncate(n);
            break;
        }
        if step.abs() > MAX_PHASE_STEP {
            return (
                0.0,
                ChannelStatus::Unfit(format!(
                    "phase step of {step:.3} rad at t = {}: rotation undersampled",
                    t[i]
                )),
                0.0,
            );
        }
        phase.push(phase.last().copied().unwrap_or(0.0) + step);
        prev_raw = raw;
    }
    if usable.len() < MIN_SAMPLES {
        return (0.0, ChannelStatus::Unfit("too few samples before the phase becomes noise".into()), 0.0);
    }
    let x: Vec<f64> = usable.iter().map(|&i| t[i]).collect();
    let w: Vec<f64> = usable.iter().map(|&i| r[i] * r[i]).collect();
    let line = weighted_line(&x, &phase, &w);
    let resid = rms(x.iter().zip(&phase).map(|(xi, p)| p - (line.intercept + line.slope * xi)));
    (line.slope, ChannelStatus::Fitted, resid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum FittedTriangle {
    Verdict(TriangleVerdict),
    NotApplicable { reason: String },
}

impl FittedTriangle {
    pub fn holds(&self) -> Option<bool> {
        match self {
            FittedTriangle::Verdict(v) => Some(v.holds),
            FittedTriangle::NotApplicable { .. } => None,
        }
    }
}

/// Triangle relations on `Γ = (Γ_T, Γ_T, Γ_L)`; the only nontrivial one is
/// `2Γ_T >= Γ_L`, i.e. `2 T_L >= T_T`.
pub fn fitted_triangle_check(fr: &FitResult, tol: &Tolerances) -> FittedTriangle {
    for (name, status, resid) in [
        ("longitudinal", &fr.status.longitudinal, fr.residuals.longitudinal),
        ("transverse", &fr.status.transverse, fr.residuals.transverse),
    ] {
        if let ChannelStatus::Unfit(why) = status {
            return FittedTriangle::NotApplicable {
                reason: format!("{name} channel unfit: {why}"),
            };
        }
        if resid > tol.fit_residual {
            return FittedTriangle::NotApplicable {
                reason: format!("{name} residual {resid:e} exceeds {:e}", tol.fit_residual),
            };
        }
    }
    FittedTriangle::Verdict(triangle_check_gammas(
        &[fr.gamma_t, fr.gamma_t, fr.gamma_l],
        tol.triangle,
    ))
}
