//! Qubit Lindblad generators in the operator basis `F_i = σ_i / 2`.
//!
//! A generator has three equivalent descriptions:
//!
//! * the twelve real parameters of [`GeneratorSpec`] (`h`, `gamma`, `a`, `delta`),
//! * the Kossakowski matrix `C` of the dissipator together with `H = Σ h_i F_i`,
//! * the affine Bloch system `dM/dt = -A·M + b` on `M_i = tr(ρ F_i)`.
//!
//! Complete positivity of the generated semigroup is `C ⪰ 0`. Nothing here
//! enforces it; [`check_cp`] reports it.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::numerics::{adjugate3, is_psd3, Mat2C, Mat3H, Mat3R, Vec3, C64, I};
use crate::tolerance::Tolerances;

/// Parameters of a qubit generator, all in units of 1/time.
///
/// `gamma`, `a`, `delta` fill the Kossakowski matrix:
///
/// ```text
///     | γ2+γ3-γ1     2δ3 - i a3   2δ2 + i a2 |
/// C = | 2δ3 + i a3   γ3+γ1-γ2     2δ1 - i a1 |
///     | 2δ2 - i a2   2δ1 + i a1   γ1+γ2-γ3   |
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub h: Vec3,
    pub gamma: Vec3,
    pub a: Vec3,
    #[serde(default)]
    pub delta: Vec3,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("generator spec must be a JSON object")]
    NotAnObject,
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("unknown field `{0}`")]
    Unknown(String),
    #[error("field `{field}`: {reason}")]
    BadField { field: String, reason: String },
}

const FIELDS: [&str; 4] = ["h", "gamma", "a", "delta"];

impl GeneratorSpec {
    pub fn new(h: Vec3, gamma: Vec3, a: Vec3, delta: Vec3) -> Self {
        Self { h, gamma, a, delta }
    }

    /// A pure dissipator with the given `gamma` and nothing else.
    pub fn from_gamma(gamma: Vec3) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.h, self.gamma, self.a, self.delta]
            .iter()
            .flatten()
            .all(|x| x.is_finite())
    }

    pub fn has_delta(&self) -> bool {
        self.delta != [0.0; 3]
    }

    /// Strict parser for the JSON form
    /// `{"h":[..], "gamma":[..], "a":[..], "delta":[..]}`; `delta` may be
    /// omitted. Errors name the offending field.
    pub fn from_json_str(text: &str) -> Result<Self, SpecError> {
        let value: Value = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, SpecError> {
        let obj = value.as_object().ok_or(SpecError::NotAnObject)?;
        if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(SpecError::Unknown(k.clone()));
        }
        let triple = |name: &'static str| -> Result<Option<Vec3>, SpecError> {
            let Some(v) = obj.get(name) else {
                return Ok(None);
            };
            let bad = |reason: String| SpecError::BadField {
                field: name.to_string(),
                reason,
            };
            let arr = v
                .as_array()
                .ok_or_else(|| bad("expected an array of 3 numbers".into()))?;
            if arr.len() != 3 {
                return Err(bad(format!("expected 3 entries, found {}", arr.len())));
            }
            let mut out = [0.0; 3];
            for (k, item) in arr.iter().enumerate() {
                let x = item
                    .as_f64()
                    .ok_or_else(|| bad(format!("entry {k} is not a number")))?;
                if !x.is_finite() {
                    return Err(bad(format!("entry {k} is not finite")));
                }
                out[k] = x;
            }
            Ok(Some(out))
        };
        Ok(Self {
            h: triple("h")?.ok_or(SpecError::Missing("h"))?,
            gamma: triple("gamma")?.ok_or(SpecError::Missing("gamma"))?,
            a: triple("a")?.ok_or(SpecError::Missing("a"))?,
            delta: triple("delta")?.unwrap_or([0.0; 3]),
        })
    }
}

/// Dissipative part of a spec: everything except `h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DissipatorParams {
    pub gamma: Vec3,
    pub a: Vec3,
    pub delta: Vec3,
}

impl DissipatorParams {
    pub fn with_hamiltonian(self, h: Vec3) -> GeneratorSpec {
        GeneratorSpec {
            h,
            gamma: self.gamma,
            a: self.a,
            delta: self.delta,
        }
    }
}

pub fn kossakowski_matrix(spec: &GeneratorSpec) -> Mat3H {
    let [g1, g2, g3] = spec.gamma;
    let [a1, a2, a3] = spec.a;
    let [d1, d2, d3] = spec.delta;
    Mat3H::from_parts(
        [g2 + g3 - g1, g3 + g1 - g2, g1 + g2 - g3],
        [
            C64::new(2.0 * d3, -a3),
            C64::new(2.0 * d2, a2),
            C64::new(2.0 * d1, -a1),
        ],
    )
}

/// Inverse of [`kossakowski_matrix`] on the dissipative parameters.
pub fn spec_from_kossakowski(c: &Mat3H) -> DissipatorParams {
    let [c11, c22, c33] = c.diagonal();
    let [c12, c13, c23] = c.upper();
    DissipatorParams {
        gamma: [(c22 + c33) / 2.0, (c33 + c11) / 2.0, (c11 + c22) / 2.0],
        a: [-c23.im, c13.im, -c12.im],
        delta: [c23.re / 2.0, c13.re / 2.0, c12.re / 2.0],
    }
}

/// `dM/dt = -A·M + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochAffine {
    pub a_matrix: Mat3R,
    pub b: Vec3,
}

impl BlochAffine {
    pub fn new(a_matrix: Mat3R, b: Vec3) -> Self {
        Self { a_matrix, b }
    }

    /// `-A·m + b`.
    pub fn derivative(&self, m: &Vec3) -> Vec3 {
        let am = self.a_matrix.mul_vec(m);
        [0, 1, 2].map(|i| self.b[i] - am[i])
    }
}

pub fn bloch_affine(spec: &GeneratorSpec) -> BlochAffine {
    let [g1, g2, g3] = spec.gamma;
    let [h1, h2, h3] = spec.h;
    let [d1, d2, d3] = spec.delta;
    let a_matrix = Mat3R([
        [g1, -d3 + h3, -d2 - h2],
        [-d3 - h3, g2, -d1 + h1],
        [-d2 + h2, -d1 - h1, g3],
    ]);
    BlochAffine {
        a_matrix,
        b: spec.a.map(|x| x / 2.0),
    }
}

/// The operator basis `F_i = σ_i / 2`.
pub fn basis() -> [Mat2C; 3] {
    let z = C64::new(0.0, 0.0);
    let half = C64::new(0.5, 0.0);
    [
        Mat2C([[z, half], [half, z]]),
        Mat2C([[z, -I * 0.5], [I * 0.5, z]]),
        Mat2C([[half, z], [z, -half]]),
    ]
}

/// `H = Σ h_i F_i`.
pub fn hamiltonian(spec: &GeneratorSpec) -> Mat2C {
    let f = basis();
    (0..3).fold(Mat2C::zero(), |acc, i| {
        acc + f[i].scale(C64::new(spec.h[i], 0.0))
    })
}

/// `-i[H, x]`.
pub fn hamiltonian_part(spec: &GeneratorSpec, x: &Mat2C) -> Mat2C {
    hamiltonian(spec).commutator(x).scale(-I)
}

/// `½ Σ C_ij ([F_i, x F_j†] + [F_i x, F_j†])`.
pub fn dissipator_part(spec: &GeneratorSpec, x: &Mat2C) -> Mat2C {
    let c = kossakowski_matrix(spec);
    let f = basis();
    let mut out = Mat2C::zero();
    for i in 0..3 {
        for j in 0..3 {
            let cij = c.get(i, j);
            if cij == C64::new(0.0, 0.0) {
                continue;
            }
            let fj_dag = f[j].adjoint();
            let term = f[i].commutator(&(*x * fj_dag)) + (f[i] * *x).commutator(&fj_dag);
            out = out + term.scale(cij * 0.5);
        }
    }
    out
}

/// The full generator applied to `ρ`.
pub fn apply_generator(spec: &GeneratorSpec, rho: &DensityMatrix) -> Mat2C {
    apply_generator_to(spec, rho.as_matrix())
}

/// The generator extended linearly to any 2×2 matrix.
pub fn apply_generator_to(spec: &GeneratorSpec, x: &Mat2C) -> Mat2C {
    hamiltonian_part(spec, x) + dissipator_part(spec, x)
}

/// Hermitian, unit-trace 2×2 matrix. Positivity is not enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2C);

impl DensityMatrix {
    /// Accepts `m` when it is Hermitian and has unit trace to within `tol`.
    pub fn try_new(m: Mat2C, tol: f64) -> Option<Self> {
        let tr = m.trace();
        if m.hermiticity_defect() > tol || (tr - C64::new(1.0, 0.0)).norm() > tol {
            return None;
        }
        Some(Self(m))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2C::identity().scale(C64::new(0.5, 0.0)))
    }

    pub fn as_matrix(&self) -> &Mat2C {
        &self.0
    }

    /// Smallest eigenvalue, `1/2 - |M|`.
    pub fn min_eigenvalue(&self) -> f64 {
        rho_to_bloch(self).min_eig_rho()
    }
}

/// Polarization vector `M_i = tr(ρ F_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector(pub Vec3);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        crate::numerics::norm3(&self.0)
    }

    /// Physical states have `|M| <= 1/2`.
    pub fn is_physical(&self) -> bool {
        self.norm() <= 0.5
    }

    /// Smallest eigenvalue of the matching density matrix.
    pub fn min_eig_rho(&self) -> f64 {
        0.5 - self.norm()
    }
}

/// `(tr(X F_1), tr(X F_2), tr(X F_3))`, real parts. For Hermitian `X` these are exact.
pub fn bloch_coordinates(x: &Mat2C) -> Vec3 {
    basis().map(|f| (*x * f).trace().re)
}

pub fn rho_to_bloch(rho: &DensityMatrix) -> BlochVector {
    BlochVector(bloch_coordinates(&rho.0))
}

/// `ρ = I/2 + Σ M_i σ_i`.
pub fn bloch_to_rho(m: &BlochVector) -> DensityMatrix {
    let [x, y, z] = m.0;
    DensityMatrix(Mat2C([
        [C64::new(0.5 + z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(0.5 - z, 0.0)],
    ]))
}

/// Complete-positivity verdict with the necessary conditions reported separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_eig_c: f64,
    /// Eigenvalues of C, ascending.
    pub eigenvalues_c: Vec3,
    /// `γ_i + γ_j >= γ_k >= 0` for every permutation.
    pub gamma_triangle_holds: bool,
    /// Diagonal of `adj C`; entry `i` equals `γ_i² - (γ_j - γ_k)² - 4δ_i² - a_i²`.
    pub adjugate_diagonal: Vec3,
    pub adjugate_condition_holds: bool,
    /// Absolute eigenvalue tolerance actually applied.
    pub tolerance: f64,
}

/// `C ⪰ 0` within `tol.cp · max(1, ‖C‖_F)`.
pub fn check_cp(spec: &GeneratorSpec, tol: &Tolerances) -> CpVerdict {
    let c = kossakowski_matrix(spec);
    let scale = c.norm_frobenius().max(1.0);
    let eff = tol.cp * scale;
    let report = is_psd3(&c, eff).unwrap_or(crate::numerics::PsdReport {
        is_psd: false,
        min_eigenvalue: f64::NAN,
        eigenvalues: [f64::NAN; 3],
    });
    let g = spec.gamma;
    let gamma_triangle_holds = (0..3).all(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        g[i] + g[j] - g[k] >= -eff && g[k] >= -eff
    });
    let adjugate_diagonal = adjugate3(&c).diagonal();
    let adjugate_condition_holds = adjugate_diagonal.iter().all(|&d| d >= -eff * scale);
    CpVerdict {
        is_cp: report.is_psd,
        min_eig_c: report.min_eigenvalue,
        eigenvalues_c: report.eigenvalues,
        gamma_triangle_holds,
        adjugate_diagonal,
        adjugate_condition_holds,
        tolerance: eff,
    }
}

/// `γ_i² - (γ_j - γ_k)² - 4δ_i² - a_i²` for each cyclic `(i, j, k)`.
pub fn adjugate_condition_closed(spec: &GeneratorSpec) -> Vec3 {
    let (g, d, a) = (spec.gamma, spec.delta, spec.a);
    [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] * g[i] - (g[j] - g[k]).powi(2) - 4.0 * d[i] * d[i] - a[i] * a[i]
    })
}

/// Matrix of a linear map on 2×2 matrices in the coordinates
/// `(tr X, tr X F_1, tr X F_2, tr X F_3)`, i.e. acting on `(1, M)` for states.
pub fn superoperator_matrix(map: impl Fn(&Mat2C) -> Mat2C) -> [[f64; 4]; 4] {
    let f = basis();
    let coords = |x: &Mat2C| -> [f64; 4] {
        let m = bloch_coordinates(x);
        [x.trace().re, m[0], m[1], m[2]]
    };
    // Dual basis of the coordinates: I/2 ↦ (1,0,0,0), σ_k = 2F_k ↦ e_k.
    let inputs = [
        Mat2C::identity().scale(C64::new(0.5, 0.0)),
        f[0].scale(C64::new(2.0, 0.0)),
        f[1].scale(C64::new(2.0, 0.0)),
        f[2].scale(C64::new(2.0, 0.0)),
    ];
    let mut out = [[0.0; 4]; 4];
    for (col, x) in inputs.iter().enumerate() {
        let c = coords(&map(x));
        for row in 0..4 {
            out[row][col] = c[row];
        }
    }
    out
}

/// Frobenius norm of `[Ĥ, D̂]` with both maps written as 4×4 affine matrices
/// on `(1, M)`. Zero exactly when the Hamiltonian and dissipative parts commute.
pub fn commutation_defect(spec: &GeneratorSpec) -> f64 {
    let lh = superoperator_matrix(|x| hamiltonian_part(spec, x));
    let ld = superoperator_matrix(|x| dissipator_part(spec, x));
    let hd = crate::numerics::matmul(&lh, &ld);
    let dh = crate::numerics::matmul(&ld, &lh);
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            sum += (hd[i][j] - dh[i][j]).powi(2);
        }
    }
    sum.sqrt()
}
