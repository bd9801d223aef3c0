//! Time evolution of the Bloch vector under `dM/dt = -A·M + b`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::generator::{BlochAffine, BlochVector};
use crate::numerics::{cross3, dot3, expm, norm3, solve3_with, NumericsError, Vec3};
use crate::spectrum::RelaxationSpectrum;
use crate::tolerance::Tolerances;

pub const DEFAULT_SAMPLES: usize = 512;
pub const MAX_T_MAX: f64 = 1e4;
pub const CSV_HEADER: &str = "t,mx,my,mz,min_eig_rho";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("trajectory CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// Sampled Bloch-vector history with the smallest density-matrix eigenvalue
/// at every sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<BlochVector>,
    min_eig_rho: Vec<f64>,
}

impl Trajectory {
    /// Fails unless `times` is strictly increasing and as long as `states`.
    pub fn new(times: Vec<f64>, states: Vec<BlochVector>) -> Result<Self, DynamicsError> {
        if times.len() != states.len() {
            return Err(DynamicsError::InvalidInput(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        check_increasing(&times)?;
        let min_eig_rho = states.iter().map(|m| m.min_eig_rho()).collect();
        Ok(Self {
            times,
            states,
            min_eig_rho,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[BlochVector] {
        &self.states
    }

    pub fn min_eig_rho(&self) -> &[f64] {
        &self.min_eig_rho
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, BlochVector)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    /// Smallest `min_eig_rho` over all samples.
    pub fn worst_min_eig_rho(&self) -> f64 {
        self.min_eig_rho.iter().fold(f64::INFINITY, |m, x| m.min(*x))
    }

    /// `t,mx,my,mz,min_eig_rho`, one row per sample, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for ((t, m), e) in self.times.iter().zip(&self.states).zip(&self.min_eig_rho) {
            let [x, y, z] = m.0;
            let _ = writeln!(out, "{t:.16e},{x:.16e},{y:.16e},{z:.16e},{e:.16e}");
        }
        out
    }

    /// Parses the [`Trajectory::to_csv`] format. The `min_eig_rho` column is
    /// recomputed from the states.
    pub fn from_csv(text: &str) -> Result<Self, DynamicsError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(DynamicsError::Csv {
            line: 1,
            reason: "empty input".into(),
        })?;
        if header.trim() != CSV_HEADER {
            return Err(DynamicsError::Csv {
                line: 1,
                reason: format!("expected header `{CSV_HEADER}`"),
            });
        }
        let mut times = Vec::new();
        let mut states = Vec::new();
        for (idx, line) in lines {
            let bad = |reason: String| DynamicsError::Csv {
                line: idx + 1,
                reason,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(bad(format!("expected 5 columns, found {}", fields.len())));
            }
            let mut row = [0.0; 5];
            for (k, f) in fields.iter().enumerate() {
                row[k] = f
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("column {} is not a finite number", k + 1)))?;
            }
            if let Some(prev) = times.last() {
                if row[0] <= *prev {
                    return Err(bad("times must be strictly increasing".into()));
                }
            }
            times.push(row[0]);
            states.push(BlochVector([row[1], row[2], row[3]]));
        }
        Self::new(times, states)
    }
}

fn check_increasing(times: &[f64]) -> Result<(), DynamicsError> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(DynamicsError::InvalidInput("sample times must be finite".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::InvalidInput(
            "sample times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyStateKind {
    Unique,
    /// `A` singular and `b` in its range: a line, plane or space of fixed points.
    Continuum,
    /// `A` singular and `b` outside its range: no fixed point.
    Unreachable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    /// Zero unless `exists`.
    pub m: BlochVector,
    pub exists: bool,
    pub kind: SteadyStateKind,
}

/// Unique solution of `A·m = b`, if there is one.
pub fn steady_state(ba: &BlochAffine, tol: &Tolerances) -> SteadyState {
    if let Ok(m) = solve3_with(&ba.a_matrix, &ba.b, tol.singular) {
        return SteadyState {
            m: BlochVector(m),
            exists: true,
            kind: SteadyStateKind::Unique,
        };
    }
    let kind = if b_in_range(ba) {
        SteadyStateKind::Continuum
    } else {
        SteadyStateKind::Unreachable
    };
    SteadyState {
        m: BlochVector([0.0; 3]),
        exists: false,
        kind,
    }
}

/// Whether `b` lies in the column space of a singular `A`, by the residual of
/// projecting `b` onto that space.
fn b_in_range(ba: &BlochAffine) -> bool {
    let at = ba.a_matrix.transpose();
    let cols = at.rows();
    let scale = ba.a_matrix.max_abs();
    let b = &ba.b;
    let b_norm = norm3(b);
    let eps = 1e-10;
    if b_norm == 0.0 {
        return true;
    }
    let (w, w_norm) = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| cross3(&cols[i], &cols[j]))
        .into_iter()
        .map(|w| (w, norm3(&w)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or(([0.0; 3], 0.0));
    if w_norm > eps * scale * scale {
        // rank 2: range is the plane orthogonal to w
        return dot3(&w, b).abs() / w_norm <= eps * b_norm.max(1.0);
    }
    let (u, u_norm) = cols
        .iter()
        .map(|c| (*c, norm3(c)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or(([0.0; 3], 0.0));
    if u_norm > eps * scale.max(f64::MIN_POSITIVE) {
        let along = dot3(&u, b) / (u_norm * u_norm);
        let resid: Vec3 = [0, 1, 2].map(|k| b[k] - along * u[k]);
        return norm3(&resid) <= eps * b_norm.max(1.0);
    }
    b_norm <= eps
}

/// `[[-A, b], [0, 0]]`, the generator of `(M, 1)`.
pub fn augmented_generator(ba: &BlochAffine) -> [[f64; 4]; 4] {
    let a = ba.a_matrix.rows();
    let mut g = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = -a[i][j];
        }
        g[i][3] = ba.b[i];
    }
    g
}

/// Exact solution at each requested time from `exp(t·G)` applied to `(m0, 1)`.
/// Singular `A` needs no special handling.
pub fn evolve(ba: &BlochAffine, m0: &BlochVector, times: &[f64]) -> Result<Trajectory, DynamicsError> {
    check_increasing(times)?;
    if times.first().is_some_and(|t| *t < 0.0) {
        return Err(DynamicsError::InvalidInput("sample times must start at t >= 0".into()));
    }
    if m0.0.iter().any(|x| !x.is_finite()) {
        return Err(DynamicsError::InvalidInput("initial state must be finite".into()));
    }
    let g = augmented_generator(ba);
    let start = [m0.0[0], m0.0[1], m0.0[2], 1.0];
    let states = times
        .iter()
        .map(|&t| {
            let e = expm(&g, t)?;
            Ok(BlochVector([0, 1, 2].map(|i| (0..4).map(|j| e[i][j] * start[j]).sum())))
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    Trajectory::new(times.to_vec(), states)
}

/// Classic fixed-step fourth-order Runge–Kutta from `t = 0` to `t_max`,
/// sampled at every step. Global error is `O(step⁴)`.
pub fn evolve_rk4(ba: &BlochAffine, m0: &BlochVector, t_max: f64, step: f64) -> Result<Trajectory, DynamicsError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(DynamicsError::InvalidInput(format!("step must be positive, got {step}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(DynamicsError::InvalidInput(format!("t_max must be non-negative, got {t_max}")));
    }
    let n = (t_max / step).round() as usize;
    let f = |m: &Vec3| ba.derivative(m);
    let axpy = |m: &Vec3, k: &Vec3, s: f64| -> Vec3 { [0, 1, 2].map(|i| m[i] + s * k[i]) };
    let mut m = m0.0;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(BlochVector(m));
    for i in 1..=n {
        let k1 = f(&m);
        let k2 = f(&axpy(&m, &k1, step / 2.0));
        let k3 = f(&axpy(&m, &k2, step / 2.0));
        let k4 = f(&axpy(&m, &k3, step));
        m = [0, 1, 2].map(|c| m[c] + step / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
        times.push(i as f64 * step);
        states.push(BlochVector(m));
    }
    Trajectory::new(times, states)
}

/// `10 / min positive Γ`, capped at [`MAX_T_MAX`]; the cap when no rate is positive.
pub fn default_t_max(rs: &RelaxationSpectrum) -> f64 {
    let min_pos = rs
        .gammas
        .iter()
        .copied()
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min_pos.is_infinite() {
        return MAX_T_MAX;
    }
    (10.0 / min_pos).min(MAX_T_MAX)
}

/// `n` uniform points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}
