//! Fixed-size dense kernels: 2×2 complex, 3×3 real and Hermitian, and
//! matrix exponentials up to 4×4.

mod matrix;

use std::f64::consts::PI;

use thiserror::Error;

use crate::tolerance::Tolerances;

pub use matrix::{cross3, dot3, matmul, norm3, Mat2C, Mat3H, Mat3R, Vec3, C64};
pub(crate) use matrix::I;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("singular matrix: |det| = {det:e} is at or below the threshold {threshold:e}")]
    Singular { det: f64, threshold: f64 },
    #[error("matrix exponential out of range (||t*m|| = {norm:e})")]
    Overflow { norm: f64 },
}

/// Eigenvalues of a real 3×3 matrix.
///
/// `discriminant` is the Cardano quantity `(q/2)² + (p/3)³` of the depressed
/// characteristic cubic `t³ + p·t + q`: positive for one real root and a
/// conjugate pair, negative for three distinct real roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicRoots {
    /// The real root first, then the pair `(re + i·ω, re − i·ω)`; or three real
    /// roots in descending order.
    pub roots: [C64; 3],
    pub real_count: u8,
    pub discriminant: f64,
    /// `|discriminant|` fell inside the degeneracy band; the roots were
    /// reported as real with a repeated value.
    pub degenerate: bool,
}

impl CubicRoots {
    pub fn real_parts(&self) -> Vec3 {
        self.roots.map(|z| z.re)
    }
}

/// [`eig3_real_with`] at the default degeneracy band.
pub fn eig3_real(m: &Mat3R) -> Result<CubicRoots, NumericsError> {
    eig3_real_with(m, Tolerances::default().cubic_degenerate)
}

/// Eigenvalues of `m` from its characteristic cubic. Cardano's formula covers
/// the one-real-root case and the trigonometric form the three-real-root
/// case; `|discriminant| <= degenerate_tol * scale^6` counts as repeated real.
pub fn eig3_real_with(m: &Mat3R, degenerate_tol: f64) -> Result<CubicRoots, NumericsError> {
    if !m.is_finite() {
        return Err(NumericsError::NonFinite("eig3_real input"));
    }
    let shift = m.trace() / 3.0;
    let centered = *m - Mat3R::identity().scale(shift);
    let p = centered.principal_minor_sum();
    let q = -centered.det();
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = (p.abs() / 3.0).sqrt().max((q.abs() / 2.0).cbrt());

    let real = |x: f64| C64::new(x, 0.0);
    if scale == 0.0 {
        return Ok(CubicRoots {
            roots: [real(shift); 3],
            real_count: 3,
            discriminant: 0.0,
            degenerate: true,
        });
    }

    let band = degenerate_tol * scale.powi(6);
    if disc > 0.0 {
        let (t_real, pair_re, omega) = cardano_one_real(p, q, disc);
        let r = t_real + shift;
        let re = pair_re + shift;
        if disc <= band {
            let mut roots = [real(r), real(re), real(re)];
            sort_desc(&mut roots);
            refine_real(m, &mut roots);
            return Ok(CubicRoots {
                roots,
                real_count: 3,
                discriminant: disc,
                degenerate: true,
            });
        }
        let (r, re, omega) = match deflate(m, r) {
            Some((r, block)) => {
                let (mid, d) = block_eigen(&block);
                (r, mid, if d < 0.0 { (-d).sqrt() } else { omega })
            }
            None => (r, re, omega),
        };
        return Ok(CubicRoots {
            roots: [real(r), C64::new(re, omega), C64::new(re, -omega)],
            real_count: 1,
            discriminant: disc,
            degenerate: false,
        });
    }

    let t = trig_three_real(p, q);
    let mut roots = t.map(|x| real(x + shift));
    sort_desc(&mut roots);
    refine_real(m, &mut roots);
    Ok(CubicRoots {
        roots,
        real_count: 3,
        discriminant: disc,
        degenerate: -disc <= band,
    })
}

/// Real root, pair real part, and pair imaginary magnitude of `t³ + p t + q`
/// when the Cardano discriminant is positive.
fn cardano_one_real(p: f64, q: f64, disc: f64) -> (f64, f64, f64) {
    // Pick the cube-root branch that adds magnitudes so `u` never cancels.
    let sign = if q >= 0.0 { 1.0 } else { -1.0 };
    let u = -sign * (q.abs() / 2.0 + disc.sqrt()).cbrt();
    let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
    let t_real = u + v;
    let omega = 0.5 * 3f64.sqrt() * (u - v).abs();
    (t_real, -t_real / 2.0, omega)
}

fn trig_three_real(p: f64, q: f64) -> [f64; 3] {
    if p >= 0.0 {
        // Only reachable through rounding when every root is (nearly) zero.
        let t = -q.cbrt();
        return [t, t, t];
    }
    let r = (-p / 3.0).sqrt();
    let cos3 = ((-q / 2.0) / (r * r * r)).clamp(-1.0, 1.0);
    let phi = cos3.acos() / 3.0;
    let t0 = 2.0 * r * phi.cos();
    let t2 = 2.0 * r * (phi + 2.0 * PI / 3.0).cos();
    [t0, -t0 - t2, t2]
}

/// Polishes three real roots (descending) by deflating on the most isolated
/// one: with `v` its unit eigenvector and `Q` an orthonormal basis of `v⊥`,
/// `Qᵀ·m·Q` carries the other two eigenvalues. The cubic loses half the digits
/// near a double root; the 2×2 block does not.
fn refine_real(m: &Mat3R, roots: &mut [C64; 3]) {
    let x = roots.map(|z| z.re);
    let isolated = |i: usize| (0..3).filter(|&j| j != i).map(|j| (x[i] - x[j]).abs()).fold(f64::INFINITY, f64::min);
    let anchor = (0..3).max_by(|&a, &b| isolated(a).total_cmp(&isolated(b))).unwrap_or(0);
    let Some((lambda, block)) = deflate(m, x[anchor]) else {
        return;
    };
    let (mid, d) = block_eigen(&block);
    let half = d.max(0.0).sqrt();
    let mut refined = [lambda, mid + half, mid - half].map(|v| C64::new(v, 0.0));
    sort_desc(&mut refined);
    *roots = refined;
}

/// Rayleigh quotient of the eigenvector for `lambda` and the 2×2 compression
/// of `m` onto its orthogonal complement; `None` when `m - lambda·I` has rank
/// below two (repeated root, no isolated eigenvector).
fn deflate(m: &Mat3R, lambda: f64) -> Option<(f64, [[f64; 2]; 2])> {
    let shifted = *m - Mat3R::identity().scale(lambda);
    let r = shifted.rows();
    let v = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| cross3(&r[i], &r[j]))
        .into_iter()
        .max_by(|a, b| norm3(a).total_cmp(&norm3(b)))?;
    let vn = norm3(&v);
    let fro = shifted.norm_frobenius();
    if !(vn > 64.0 * f64::EPSILON * fro * fro) {
        return None;
    }
    let v = v.map(|c| c / vn);
    // the coordinate axis least aligned with v seeds the complement
    let k = (0..3).min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let q1 = cross3(&v, &e);
    let q1 = q1.map(|c| c / norm3(&q1));
    let q2 = cross3(&v, &q1);
    let form = |a: &Vec3, b: &Vec3| dot3(a, &m.mul_vec(b));
    Some((
        form(&v, &v),
        [[form(&q1, &q1), form(&q1, &q2)], [form(&q2, &q1), form(&q2, &q2)]],
    ))
}

/// Mean of the diagonal and `((b00 - b11)/2)² + b01·b10`: eigenvalues are
/// `mean ± sqrt(d)`.
fn block_eigen(b: &[[f64; 2]; 2]) -> (f64, f64) {
    let half_gap = (b[0][0] - b[1][1]) / 2.0;
    ((b[0][0] + b[1][1]) / 2.0, half_gap * half_gap + b[0][1] * b[1][0])
}

fn sort_desc(roots: &mut [C64; 3]) {
    roots.sort_by(|a, b| b.re.total_cmp(&a.re));
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Ascending.
    pub eigenvalues: Vec3,
}

/// `true` iff the smallest eigenvalue of `c` is at least `-tol`.
pub fn is_psd3(c: &Mat3H, tol: f64) -> Result<PsdReport, NumericsError> {
    if !c.is_finite() {
        return Err(NumericsError::NonFinite("is_psd3 input"));
    }
    let eigenvalues = hermitian_eigenvalues(c);
    Ok(PsdReport {
        is_psd: eigenvalues[0] >= -tol,
        min_eigenvalue: eigenvalues[0],
        eigenvalues,
    })
}

/// Ascending eigenvalues of a Hermitian 3×3 matrix.
///
/// The characteristic cubic has real coefficients and three real roots, solved
/// in trigonometric form. The extreme root with the wider gap to its neighbour
/// is then refined by a Rayleigh quotient on its cross-product eigenvector,
/// and the other two are read off the 2×2 compression onto the orthogonal
/// complement. This keeps repeated eigenvalues accurate to rounding, where the
/// cubic alone only gives about half the digits.
pub fn hermitian_eigenvalues(c: &Mat3H) -> Vec3 {
    let mean = c.trace() / 3.0;
    let centered = c.shifted(mean);
    let fro2 = centered.norm_frobenius().powi(2);
    if fro2 == 0.0 {
        return [mean; 3];
    }
    let p = -fro2 / 2.0;
    let q = -centered.det();
    let t = trig_three_real(p, q);
    let (hi, mid, lo) = (t[0], t[1], t[2]);
    let coarse = [lo + mean, mid + mean, hi + mean];

    let simple = if hi - mid >= mid - lo { hi } else { lo } + mean;
    let Some(v) = hermitian_null_vector(c, simple) else {
        return coarse;
    };
    let rayleigh = quad_form(c, &v, &v).re;

    let e = {
        let k = (0..3)
            .min_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
            .unwrap_or(0);
        let mut e = [C64::new(0.0, 0.0); 3];
        e[k] = C64::new(1.0, 0.0);
        e
    };
    let overlap = cdot(&v, &e);
    let u1 = normalize_c(&[0, 1, 2].map(|k| e[k] - v[k] * overlap));
    let u2 = normalize_c(&ccross(&v.map(|z| z.conj()), &u1.map(|z| z.conj())));
    let a = quad_form(c, &u1, &u1).re;
    let d = quad_form(c, &u2, &u2).re;
    let b = quad_form(c, &u1, &u2);
    let half_sum = (a + d) / 2.0;
    let radius = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let mut out = [rayleigh, half_sum - radius, half_sum + radius];
    out.sort_by(f64::total_cmp);
    out
}

/// Unit vector spanning the kernel of `c - λI`, from the largest cross
/// product of its rows. `None` when the rank is below two.
fn hermitian_null_vector(c: &Mat3H, lambda: f64) -> Option<[C64; 3]> {
    let mut rows = *c.rows();
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |a, z| a.max(z.norm()))
        .max(lambda.abs());
    let best = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| ccross(&rows[i], &rows[j]))
        .into_iter()
        .max_by(|a, b| cnorm(a).total_cmp(&cnorm(b)))?;
    if cnorm(&best) <= 1e-10 * scale * scale {
        return None;
    }
    Some(normalize_c(&best))
}

/// Bilinear cross product (no conjugation).
fn ccross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Sesquilinear inner product `⟨a, b⟩ = a†b`.
fn cdot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    (0..3).map(|k| a[k].conj() * b[k]).sum()
}

fn cnorm(a: &[C64; 3]) -> f64 {
    cdot(a, a).re.sqrt()
}

fn normalize_c(a: &[C64; 3]) -> [C64; 3] {
    let n = cnorm(a);
    a.map(|z| z / n)
}

/// `x† C y`.
fn quad_form(c: &Mat3H, x: &[C64; 3], y: &[C64; 3]) -> C64 {
    let rows = c.rows();
    let cy: [C64; 3] = [0, 1, 2].map(|i| (0..3).map(|j| rows[i][j] * y[j]).sum());
    cdot(x, &cy)
}

/// Classical adjugate (transposed cofactor matrix). Hermitian input gives a
/// Hermitian adjugate.
pub fn adjugate3(c: &Mat3H) -> Mat3H {
    let m = c.rows();
    // cofactor(i, j) = (-1)^(i+j) · minor with row i and column j removed
    let cofactor = |i: usize, j: usize| -> C64 {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let s: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    // adj[i][j] = cofactor(j, i)
    Mat3H::from_parts(
        [cofactor(0, 0).re, cofactor(1, 1).re, cofactor(2, 2).re],
        [cofactor(1, 0), cofactor(2, 0), cofactor(2, 1)],
    )
}

const TAYLOR_DEGREE: u32 = 12;
const SCALED_NORM_TARGET: f64 = 0.5;
const MAX_SQUARINGS: i32 = 1024;

/// `exp(t·m)` by scaling and squaring around a degree-12 Taylor polynomial.
/// The scaled matrix has infinity norm at most 0.5, which puts the truncation
/// error below 2e-14 before squaring.
pub fn expm<const N: usize>(m: &[[f64; N]; N], t: f64) -> Result<[[f64; N]; N], NumericsError> {
    if !t.is_finite() || m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite("expm input"));
    }
    let mut x = m.map(|row| row.map(|v| v * t));
    let norm = x
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm.is_finite() {
        return Err(NumericsError::Overflow { norm });
    }
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(NumericsError::Overflow { norm });
    }
    let factor = 0.5f64.powi(squarings);
    x = x.map(|row| row.map(|v| v * factor));

    let mut identity = [[0.0; N]; N];
    for (i, row) in identity.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    // Horner: I + X/1 (I + X/2 (I + ... (I + X/12)))
    let mut acc = identity;
    for k in (1..=TAYLOR_DEGREE).rev() {
        let xa = matmul(&x, &acc);
        let inv_k = 1.0 / k as f64;
        for i in 0..N {
            for j in 0..N {
                acc[i][j] = identity[i][j] + xa[i][j] * inv_k;
            }
        }
    }
    for _ in 0..squarings {
        acc = matmul(&acc, &acc);
    }
    if acc.iter().flatten().any(|v| !v.is_finite()) {
        return Err(NumericsError::Overflow { norm });
    }
    Ok(acc)
}

/// `exp(t·m)` for a [`Mat3R`].
pub fn expm3(m: &Mat3R, t: f64) -> Result<Mat3R, NumericsError> {
    expm(&m.0, t).map(Mat3R)
}

/// [`solve3_with`] at the default singularity threshold.
pub fn solve3(m: &Mat3R, rhs: &Vec3) -> Result<Vec3, NumericsError> {
    solve3_with(m, rhs, Tolerances::default().singular)
}

/// Solves `m·x = rhs` by Gaussian elimination with partial pivoting.
/// Rejects `|det m| <= singular_tol * (max row norm)^3`.
pub fn solve3_with(m: &Mat3R, rhs: &Vec3, singular_tol: f64) -> Result<Vec3, NumericsError> {
    if !m.is_finite() || rhs.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite("solve3 input"));
    }
    let det = m.det();
    let threshold = singular_tol * m.max_row_norm().powi(3);
    if det.abs() <= threshold {
        return Err(NumericsError::Singular { det, threshold });
    }
    let mut a = m.0;
    let mut b = *rhs;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn amplitude_damping_c() -> Mat3H {
        Mat3H::from_parts([1.0, 1.0, 0.0], [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn eig3_diagonal() {
        let r = eig3_real(&Mat3R::diag([1.0, 2.0, 3.0])).unwrap();
        assert_eq!(r.real_count, 3);
        for (got, want) in r.roots.iter().zip([3.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-12);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn eig3_bloch_matrix() {
        // T_T = 1, T_L = 2, Ω = 3
        let a = Mat3R([[1.0, -3.0, 0.0], [3.0, 1.0, 0.0], [0.0, 0.0, 0.5]]);
        let r = eig3_real(&a).unwrap();
        assert_eq!(r.real_count, 1);
        assert_abs_diff_eq!(r.roots[0].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.roots[1].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.roots[1].im, 3.0, epsilon = 1e-12);
        assert_eq!(r.roots[1].re.to_bits(), r.roots[2].re.to_bits());
        assert_eq!(r.roots[1].im, -r.roots[2].im);
    }

    #[test]
    fn eig3_repeated_root_is_real() {
        let r = eig3_real(&Mat3R::diag([0.5, 0.5, 1.0])).unwrap();
        assert_eq!(r.real_count, 3);
        assert!(r.degenerate);
        let re = r.real_parts();
        assert_abs_diff_eq!(re[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(re[2], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(re[1] + re[2], 1.0, epsilon = 1e-12);
        assert!(r.roots.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn eig3_zero_matrix() {
        let r = eig3_real(&Mat3R::zero()).unwrap();
        assert_eq!(r.roots, [c(0.0, 0.0); 3]);
        assert_eq!(r.real_count, 3);
    }

    #[test]
    fn eig3_rejects_nan() {
        let mut m = Mat3R::identity();
        m.0[1][2] = f64::NAN;
        assert!(matches!(eig3_real(&m), Err(NumericsError::NonFinite(_))));
    }

    #[test]
    fn psd_identity() {
        let r = is_psd3(&Mat3H::identity(), 1e-12).unwrap();
        assert!(r.is_psd);
        assert_abs_diff_eq!(r.min_eigenvalue, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn psd_negative_diagonal_entry() {
        let m = Mat3H::from_parts([1.0, 1.0, -0.8], [c(0.0, 0.0); 3]);
        let r = is_psd3(&m, 1e-12).unwrap();
        assert!(!r.is_psd);
        assert!(r.min_eigenvalue <= -0.8 + 1e-14);
    }

    #[test]
    fn psd_amplitude_damping_rank_one() {
        let r = is_psd3(&amplitude_damping_c(), 1e-12).unwrap();
        assert!(r.is_psd);
        assert_abs_diff_eq!(r.min_eigenvalue, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.eigenvalues[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.eigenvalues[2], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(adjugate3(&Mat3H::identity()), Mat3H::identity());
        let d = adjugate3(&Mat3H::from_parts([1.0, 2.0, 3.0], [c(0.0, 0.0); 3]));
        assert_eq!(d.diagonal(), [6.0, 3.0, 2.0]);
        let z = adjugate3(&amplitude_damping_c());
        assert!(z.rows().iter().flatten().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn adjugate_identity_on_complex_input() {
        let m = Mat3H::from_parts([2.0, -1.0, 0.5], [c(0.3, -0.7), c(1.1, 0.2), c(-0.4, 0.9)]);
        let prod = m.mul_full(&adjugate3(&m));
        let det = m.det();
        for (i, row) in prod.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let want = if i == j { det } else { 0.0 };
                assert_abs_diff_eq!(z.re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn expm_zero_and_diagonal() {
        let z = expm(&[[0.0; 3]; 3], 7.0).unwrap();
        assert_eq!(z, Mat3R::identity().0);
        let d = expm3(&Mat3R::diag([-1.0, -2.0, -3.0]), 1.0).unwrap();
        for (k, want) in [(-1.0f64).exp(), (-2.0f64).exp(), (-3.0f64).exp()]
            .into_iter()
            .enumerate()
        {
            assert_abs_diff_eq!(d.0[k][k], want, epsilon = 1e-15);
        }
    }

    /// Truncated Taylor series, summed term by term with no scaling.
    fn taylor_oracle(m: &[[f64; 3]; 3], terms: usize) -> [[f64; 3]; 3] {
        let mut out = Mat3R::identity().0;
        let mut term = Mat3R::identity().0;
        for k in 1..terms {
            term = matmul(&term, m).map(|r| r.map(|v| v / k as f64));
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += term[i][j];
                }
            }
        }
        out
    }

    #[test]
    fn expm_rotation_block_matches_taylor() {
        let m = [[0.0, -3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let got = expm(&m, 1.0).unwrap();
        // 30 terms leave 3^30/30! ≈ 8e-19 of truncation error
        let want = taylor_oracle(&m, 30);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(got[i][j], want[i][j], epsilon = 1e-13);
            }
        }
        assert_abs_diff_eq!(got[0][0], 3f64.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(got[1][0], 3f64.sin(), epsilon = 1e-13);
    }

    #[test]
    fn expm_overflow_is_an_error() {
        let m = [[1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(expm(&m, 1e4), Err(NumericsError::Overflow { .. })));
    }

    #[test]
    fn solve3_examples() {
        assert_eq!(solve3(&Mat3R::identity(), &[1.0, 2.0, 3.0]).unwrap(), [1.0, 2.0, 3.0]);
        let x = solve3(&Mat3R::diag([0.5, 0.5, 1.0]), &[0.0, 0.0, -0.5]).unwrap();
        assert_eq!(x, [0.0, 0.0, -0.5]);
        let err = solve3(&Mat3R::diag([0.5, 0.5, 0.0]), &[0.0, 0.0, 1.0]);
        assert!(matches!(err, Err(NumericsError::Singular { .. })));
    }
}
