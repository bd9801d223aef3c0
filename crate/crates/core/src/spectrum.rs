//! Inverse relaxation times and the triangle relations they obey.
//!
//! The rates `Γ_i` are the real parts of the eigenvalues of the Bloch matrix
//! `A`. For a completely positive generator they satisfy
//! `Γ_i + Γ_j >= Γ_k >= 0` for every permutation. Two independent routes
//! check the nontrivial inequality:
//!
//! * the characteristic polynomial `f(λ) = det(λ - A)` evaluated at `tr A / 2`,
//!   with a closed form in the parameters when `delta = 0`;
//! * an orthogonal change of axes that puts a real eigenvector on `z`, after
//!   which the eigenvalues have the closed form of [`appendix_eigenvalues`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{BlochAffine, GeneratorSpec};
use crate::numerics::{cross3, dot3, eig3_real_with, norm3, Mat3R, NumericsError, Vec3, C64};
use crate::tolerance::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("closed-form f(tr A/2) needs delta = 0; use the rotated-axis route instead")]
    DeltaNonzero,
    #[error("rotated matrix lacks zeros at (1,3),(2,3): {e13:e}, {e23:e} exceed {tol:e}")]
    PatternViolation { e13: f64, e23: f64, tol: f64 },
    #[error("invalid Bloch parameters: {0}")]
    InvalidBlochParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// One real eigenvalue and a conjugate pair.
    ComplexPair,
    /// Three real eigenvalues, `A` diagonalizable.
    ThreeReal,
    /// A repeated real eigenvalue with a missing eigenvector.
    DegenerateReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RelaxationSpectrum {
    /// Sorted by real part, descending; ties by larger `|Im|`, then the
    /// solver's order (`+iω` before `-iω`).
    #[serde(serialize_with = "crate::report::serialize_complex3")]
    pub eigenvalues: [C64; 3],
    /// `Γ_i = Re λ_i`, in the same order.
    pub gammas: Vec3,
    pub omega: f64,
    pub case_tag: CaseTag,
}

impl RelaxationSpectrum {
    /// The real eigenvalue of a [`CaseTag::ComplexPair`] spectrum.
    pub fn real_eigenvalue(&self) -> Option<f64> {
        (self.case_tag == CaseTag::ComplexPair)
            .then(|| self.eigenvalues.iter().find(|z| z.im == 0.0).map(|z| z.re))
            .flatten()
    }

    /// Real part of the conjugate pair of a [`CaseTag::ComplexPair`] spectrum.
    pub fn pair_real_part(&self) -> Option<f64> {
        (self.case_tag == CaseTag::ComplexPair)
            .then(|| self.eigenvalues.iter().find(|z| z.im != 0.0).map(|z| z.re))
            .flatten()
    }
}

pub fn relaxation_spectrum(
    ba: &BlochAffine,
    tol: &Tolerances,
) -> Result<RelaxationSpectrum, SpectrumError> {
    let a = &ba.a_matrix;
    let roots = eig3_real_with(a, tol.cubic_degenerate)?;
    let mut eigenvalues = roots.roots;
    // stable: equal keys keep the solver's order
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.abs().total_cmp(&x.im.abs())));

    let case_tag = if roots.real_count == 1 {
        CaseTag::ComplexPair
    } else if roots.degenerate && is_defective(a, &roots.real_parts(), tol.defective) {
        CaseTag::DegenerateReal
    } else {
        CaseTag::ThreeReal
    };
    let omega = match case_tag {
        CaseTag::ComplexPair => eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        _ => 0.0,
    };
    Ok(RelaxationSpectrum {
        eigenvalues,
        gammas: eigenvalues.map(|z| z.re),
        omega,
        case_tag,
    })
}

/// Whether the closest pair (or triple) of real eigenvalues lacks a full
/// eigenspace: rank of `A - λI` above `3 - multiplicity`.
fn is_defective(a: &Mat3R, real: &Vec3, tol: f64) -> bool {
    let scale = a.norm_frobenius().max(f64::MIN_POSITIVE);
    let spread = real.iter().fold(f64::MIN, |m, x| m.max(*x)) - real.iter().fold(f64::MAX, |m, x| m.min(*x));
    let shifted = |lambda: f64| *a - Mat3R::identity().scale(lambda);
    if spread <= tol * scale {
        let lambda = real.iter().sum::<f64>() / 3.0;
        return shifted(lambda).max_abs() > tol * scale;
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let (i, j) = pairs
        .into_iter()
        .min_by(|&(a0, a1), &(b0, b1)| (real[a0] - real[a1]).abs().total_cmp(&(real[b0] - real[b1]).abs()))
        .unwrap_or((0, 1));
    let m = shifted((real[i] + real[j]) / 2.0);
    let r = m.rows();
    let rank2 = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(p, q)| norm3(&cross3(&r[p], &r[q])))
        .fold(0.0, f64::max);
    rank2 > tol * scale * scale
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangleVerdict {
    /// `slacks[i] = Γ_j + Γ_k - Γ_i`.
    pub slacks: Vec3,
    pub min_gamma: f64,
    pub holds: bool,
}

impl TriangleVerdict {
    /// `min(slacks, min_gamma)`.
    pub fn worst(&self) -> f64 {
        self.slacks.iter().fold(self.min_gamma, |m, s| m.min(*s))
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().fold(f64::INFINITY, |m, s| m.min(*s))
    }
}

pub fn triangle_check(rs: &RelaxationSpectrum, tol: f64) -> TriangleVerdict {
    triangle_check_gammas(&rs.gammas, tol)
}

pub fn triangle_check_gammas(g: &Vec3, tol: f64) -> TriangleVerdict {
    let slacks = [0, 1, 2].map(|i| g[(i + 1) % 3] + g[(i + 2) % 3] - g[i]);
    let min_gamma = g.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    let worst = slacks.iter().fold(min_gamma, |m, s| m.min(*s));
    TriangleVerdict {
        slacks,
        min_gamma,
        holds: worst >= -tol,
    }
}

/// `det(λI - A)` by cofactor expansion.
pub fn char_poly_at(ba: &BlochAffine, lambda: f64) -> f64 {
    (Mat3R::identity().scale(lambda) - ba.a_matrix).det()
}

/// `f(tr A / 2)` in closed form for `delta = 0`:
/// `(1/8)[(γ1+γ2-γ3)(γ2+γ3-γ1)(γ3+γ1-γ2) + 4h3²(γ1+γ2-γ3) + 4h1²(γ2+γ3-γ1) + 4h2²(γ3+γ1-γ2)]`.
///
/// `tr A/2 - A` is `diag(γ2+γ3-γ1, γ3+γ1-γ2, γ1+γ2-γ3)/2` plus an antisymmetric
/// part built from `h`, and `det(D + K) = d1·d2·d3 + d1·k1² + d2·k2² + d3·k3²`.
pub fn f_half_trace_closed(spec: &GeneratorSpec) -> Result<f64, SpectrumError> {
    if spec.has_delta() {
        return Err(SpectrumError::DeltaNonzero);
    }
    let [g1, g2, g3] = spec.gamma;
    let [h1, h2, h3] = spec.h;
    let c3 = g1 + g2 - g3;
    let c1 = g2 + g3 - g1;
    let c2 = g3 + g1 - g2;
    Ok((c3 * c1 * c2 + 4.0 * (h3 * h3 * c3 + h1 * h1 * c1 + h2 * h2 * c2)) / 8.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisRotation {
    /// Orthogonal, determinant +1; rows are the new axes.
    pub rotation: Mat3R,
    /// `R·A·Rᵀ`, with (1,3) and (2,3) entries at rounding level.
    pub rotated: Mat3R,
    /// Real eigenvalue whose eigenvector became the new z-axis.
    pub axis_eigenvalue: f64,
}

/// Rotates axes so that a real eigenvector of `A` lies along `z`.
///
/// The eigenvalue is the unique real one for a complex-pair spectrum and the
/// largest otherwise. Its eigenvector is the largest cross product of two rows
/// of `A - λI`, with the sign fixed so the first non-negligible component is
/// positive.
pub fn rotate_to_real_axis(ba: &BlochAffine, tol: &Tolerances) -> Result<AxisRotation, SpectrumError> {
    let roots = eig3_real_with(&ba.a_matrix, tol.cubic_degenerate)?;
    let lambda = if roots.real_count == 1 {
        roots.roots[0].re
    } else {
        roots.real_parts().iter().fold(f64::MIN, |m, x| m.max(*x))
    };
    let v = real_eigenvector(&ba.a_matrix, lambda);

    let k = (0..3)
        .min_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
        .unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let along = dot3(&axis, &v);
    let e1 = normalize([0, 1, 2].map(|i| axis[i] - along * v[i]));
    let e2 = cross3(&v, &e1);
    let rotation = Mat3R([e1, e2, v]);
    let rotated = rotation * ba.a_matrix * rotation.transpose();
    Ok(AxisRotation {
        rotation,
        rotated,
        axis_eigenvalue: lambda,
    })
}

fn normalize(v: Vec3) -> Vec3 {
    let n = norm3(&v);
    v.map(|x| x / n)
}

fn real_eigenvector(a: &Mat3R, lambda: f64) -> Vec3 {
    let m = *a - Mat3R::identity().scale(lambda);
    let r = m.rows();
    let scale = a.max_abs().max(lambda.abs()).max(f64::MIN_POSITIVE);
    let best = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| cross3(&r[i], &r[j]))
        .into_iter()
        .max_by(|x, y| norm3(x).total_cmp(&norm3(y)))
        .unwrap_or([0.0; 3]);
    let v = if norm3(&best) > 1e-10 * scale * scale {
        normalize(best)
    } else {
        // rank <= 1: anything orthogonal to the dominant row is an eigenvector
        let row = r
            .iter()
            .copied()
            .max_by(|x, y| norm3(x).total_cmp(&norm3(y)))
            .unwrap_or([0.0; 3]);
        if norm3(&row) <= 1e-10 * scale {
            [0.0, 0.0, 1.0]
        } else {
            let k = (0..3)
                .min_by(|&i, &j| row[i].abs().total_cmp(&row[j].abs()))
                .unwrap_or(0);
            let mut axis = [0.0; 3];
            axis[k] = 1.0;
            normalize(cross3(&row, &axis))
        }
    };
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        v.map(|x| -x)
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendixCase {
    /// `(γ1-γ2)² - 4(h3² - δ3²) < 0`: complex pair.
    A,
    /// Non-negative discriminant: three real eigenvalues.
    B,
}

/// Parameters read off a matrix in rotated form and its closed-form spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixSpectrum {
    /// `γ3`, then `(γ1+γ2)/2 ± (1/2)√((γ1-γ2)² - 4(h3² - δ3²))`.
    pub eigenvalues: [C64; 3],
    pub case: AppendixCase,
    /// Case (a): `((γ1+γ2)/2, (γ1+γ2)/2, γ3)`; case (b): `(Γ+, Γ-, γ3)`.
    pub gammas: Vec3,
    pub gamma: Vec3,
    pub h3: f64,
    pub delta3: f64,
    pub discriminant: f64,
}

/// Closed-form eigenvalues of a Bloch matrix whose (1,3) and (2,3) entries
/// vanish. The (1,2)/(2,1) entries are `-δ3 + h3` and `-δ3 - h3`.
pub fn appendix_eigenvalues(rotated: &Mat3R, tol: f64) -> Result<AppendixSpectrum, SpectrumError> {
    let r = rotated.rows();
    let bound = tol * rotated.max_abs().max(1.0);
    let (e13, e23) = (r[0][2].abs(), r[1][2].abs());
    if !(e13 <= bound && e23 <= bound) {
        return Err(SpectrumError::PatternViolation { e13, e23, tol: bound });
    }
    let gamma = [r[0][0], r[1][1], r[2][2]];
    let h3 = (r[0][1] - r[1][0]) / 2.0;
    let delta3 = -(r[0][1] + r[1][0]) / 2.0;
    let discriminant = (gamma[0] - gamma[1]).powi(2) - 4.0 * (h3 * h3 - delta3 * delta3);
    let half_sum = (gamma[0] + gamma[1]) / 2.0;
    let (eigenvalues, case, gammas) = if discriminant < 0.0 {
        let w = 0.5 * (-discriminant).sqrt();
        (
            [
                C64::new(gamma[2], 0.0),
                C64::new(half_sum, w),
                C64::new(half_sum, -w),
            ],
            AppendixCase::A,
            [half_sum, half_sum, gamma[2]],
        )
    } else {
        let w = 0.5 * discriminant.sqrt();
        (
            [
                C64::new(gamma[2], 0.0),
                C64::new(half_sum + w, 0.0),
                C64::new(half_sum - w, 0.0),
            ],
            AppendixCase::B,
            [half_sum + w, half_sum - w, gamma[2]],
        )
    };
    Ok(AppendixSpectrum {
        eigenvalues,
        case,
        gammas,
        gamma,
        h3,
        delta3,
        discriminant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateRoute {
    MainText,
    Appendix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificateReport {
    /// `det(tr A/2 - A)`.
    pub f_at_half_trace_det: f64,
    /// Closed form; only for `delta = 0`.
    pub f_at_half_trace_closed: Option<f64>,
    pub route: CertificateRoute,
    pub rotated_matrix: Option<Mat3R>,
    /// Rate assignment from the rotated closed form (appendix route only).
    pub appendix_gammas: Option<Vec3>,
    pub appendix_case: Option<AppendixCase>,
}

/// `f(tr A/2)` by determinant, plus the closed form when `delta = 0` or the
/// rotated closed-form spectrum otherwise.
pub fn certificate(spec: &GeneratorSpec, ba: &BlochAffine, tol: &Tolerances) -> Result<CertificateReport, SpectrumError> {
    let f_det = char_poly_at(ba, ba.a_matrix.trace() / 2.0);
    if !spec.has_delta() {
        return Ok(CertificateReport {
            f_at_half_trace_det: f_det,
            f_at_half_trace_closed: Some(f_half_trace_closed(spec)?),
            route: CertificateRoute::MainText,
            rotated_matrix: None,
            appendix_gammas: None,
            appendix_case: None,
        });
    }
    let rot = rotate_to_real_axis(ba, tol)?;
    let app = appendix_eigenvalues(&rot.rotated, tol.rotation_zero)?;
    Ok(CertificateReport {
        f_at_half_trace_det: f_det,
        f_at_half_trace_closed: None,
        route: CertificateRoute::Appendix,
        rotated_matrix: Some(rot.rotated),
        appendix_gammas: Some(app.gammas),
        appendix_case: Some(app.case),
    })
}

/// Parameters of the standard Bloch equation with longitudinal and transverse
/// relaxation times, precession frequency `omega` about `z` and drive `k`.
/// Infinite times mean no relaxation in that channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochParams {
    #[serde(rename = "tL")]
    pub t_l: f64,
    #[serde(rename = "tT")]
    pub t_t: f64,
    pub omega: f64,
    pub k: f64,
}

impl BlochParams {
    pub fn gamma_l(&self) -> f64 {
        1.0 / self.t_l
    }

    pub fn gamma_t(&self) -> f64 {
        1.0 / self.t_t
    }

    /// `2 T_L >= T_T >= 0`, i.e. `Γ_L <= 2 Γ_T` with both rates non-negative.
    pub fn satisfies_relaxation_bound(&self, tol: f64) -> bool {
        let (gl, gt) = (self.gamma_l(), self.gamma_t());
        gl >= -tol && gt >= -tol && 2.0 * gt - gl >= -tol
    }
}

/// `γ = (1/T_T, 1/T_T, 1/T_L)`, `h = (0, 0, Ω)`, `a = (0, 0, 2k)`, `δ = 0`.
pub fn bloch_to_spec(p: &BlochParams) -> Result<GeneratorSpec, SpectrumError> {
    let positive = |x: f64| x > 0.0 && !x.is_nan();
    if !positive(p.t_l) || !positive(p.t_t) {
        return Err(SpectrumError::InvalidBlochParams(format!(
            "relaxation times must be positive, got tL = {}, tT = {}",
            p.t_l, p.t_t
        )));
    }
    if !p.omega.is_finite() || !p.k.is_finite() {
        return Err(SpectrumError::InvalidBlochParams("omega and k must be finite".into()));
    }
    let gt = 1.0 / p.t_t;
    Ok(GeneratorSpec::new(
        [0.0, 0.0, p.omega],
        [gt, gt, 1.0 / p.t_l],
        [0.0, 0.0, 2.0 * p.k],
        [0.0; 3],
    ))
}

/// Recognizes the [`bloch_to_spec`] pattern within `tol` (absolute).
pub fn spec_is_bloch(spec: &GeneratorSpec, tol: f64) -> Option<BlochParams> {
    let small = |x: f64| x.abs() <= tol;
    let [g1, g2, g3] = spec.gamma;
    let pattern = small(g1 - g2)
        && small(spec.h[0])
        && small(spec.h[1])
        && small(spec.a[0])
        && small(spec.a[1])
        && spec.delta.iter().all(|&d| small(d))
        && g1 >= 0.0
        && g3 >= 0.0;
    pattern.then(|| BlochParams {
        t_l: 1.0 / g3,
        t_t: 1.0 / g1,
        omega: spec.h[2],
        k: spec.a[2] / 2.0,
    })
}
