//! Randomized harness: sample generators, run every verdict, aggregate.
//!
//! Randomness comes from ChaCha8 seeded with `seed` via `seed_from_u64`; sample
//! `i` draws from stream `i` of that generator (`set_stream(i)`), so a report
//! depends only on `(mode, n, seed)` and not on thread scheduling. Draw order
//! within a sample: for [`ScanMode::CpOnly`] the 9 complex entries of `B`
//! row-major (real then imaginary part, standard normal), the scale factor,
//! then `h₁, h₂, h₃`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generator::{bloch_affine, check_cp, spec_from_kossakowski, GeneratorSpec};
use crate::numerics::{Mat3H, C64};
use crate::spectrum::{bloch_to_spec, char_poly_at, f_half_trace_closed, relaxation_spectrum, triangle_check, BlochParams};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ScanMode {
    /// Gram-matrix Kossakowski matrices: always completely positive.
    #[value(name = "cp")]
    CpOnly,
    /// `γ` uniform in `[0, 1]³`, `a = δ = 0`: CP only by accident.
    #[value(name = "free-gamma")]
    FreeGamma,
    /// Random standard Bloch parameters, not constrained to be CP.
    #[value(name = "bloch")]
    BlochOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub n_samples: u64,
    pub n_cp_confirmed: u64,
    pub n_triangle_violations: u64,
    /// Smallest of all slacks and rates over the corpus.
    pub worst_slack: f64,
    pub seed: u64,
    pub mode: ScanMode,
    /// CP samples whose rates violate the triangle relations.
    pub n_theorem_breaches: u64,
    /// Samples whose spectrum could not be computed.
    pub n_spectrum_failures: u64,
    /// `δ = 0` samples on which the half-trace certificate was evaluated.
    pub n_certificate_checked: u64,
    /// Of those, samples where the certificate's sign disagrees with the
    /// triangle verdict, or the closed form disagrees with the determinant.
    pub n_certificate_incoherent: u64,
}

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform_h<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    [0; 3].map(|_| rng.random_range(-2.0..=2.0))
}

/// `C = s·BB†` with `B` complex Gaussian and `s ~ U[0.1, 2]`; `h ~ U[-2, 2]³`.
pub fn sample_cp_spec<R: Rng + ?Sized>(rng: &mut R) -> GeneratorSpec {
    let mut b = [[C64::new(0.0, 0.0); 3]; 3];
    for row in &mut b {
        for z in row.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = C64::new(re, im);
        }
    }
    let scale = rng.random_range(0.1..=2.0);
    let c = Mat3H::gram(&b).scale(scale);
    spec_from_kossakowski(&c).with_hamiltonian(uniform_h(rng))
}

/// `γ = (ε, ε, 1)` with `ε ~ U(0, 0.4)`, `h = (0, 0, h₃)` with `h₃ ~ U[-2, 2]`,
/// `a = δ = 0`. `C₃₃ = 2ε - 1 < 0`, so never CP, and
/// `f(tr A/2) = (2ε - 1)(1 + 4h₃²)/8 < 0`, so the rates always violate the
/// triangle relations.
pub fn sample_violating_spec<R: Rng + ?Sized>(rng: &mut R) -> GeneratorSpec {
    let mut eps = rng.random_range(0.0..0.4);
    if eps == 0.0 {
        eps = f64::EPSILON;
    }
    let h3 = rng.random_range(-2.0..=2.0);
    GeneratorSpec::new([0.0, 0.0, h3], [eps, eps, 1.0], [0.0; 3], [0.0; 3])
}

pub fn sample_free_gamma_spec<R: Rng + ?Sized>(rng: &mut R) -> GeneratorSpec {
    let gamma = [0; 3].map(|_| rng.random_range(0.0..=1.0));
    GeneratorSpec::new(uniform_h(rng), gamma, [0.0; 3], [0.0; 3])
}

/// `T_L, T_T` log-uniform in `[0.1, 10]`, `Ω ~ U[-5, 5]`, `k ~ U[-1, 1]`.
pub fn sample_bloch_params<R: Rng + ?Sized>(rng: &mut R) -> BlochParams {
    let log_time = |rng: &mut R| 10f64.powf(rng.random_range(-1.0..=1.0));
    let t_l = log_time(rng);
    let t_t = log_time(rng);
    BlochParams {
        t_l,
        t_t,
        omega: rng.random_range(-5.0..=5.0),
        k: rng.random_range(-1.0..=1.0),
    }
}

pub fn sample_spec<R: Rng + ?Sized>(mode: ScanMode, rng: &mut R) -> GeneratorSpec {
    match mode {
        ScanMode::CpOnly => sample_cp_spec(rng),
        ScanMode::FreeGamma => sample_free_gamma_spec(rng),
        ScanMode::BlochOnly => {
            bloch_to_spec(&sample_bloch_params(rng)).expect("sampled times are positive and finite")
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    cp: u64,
    violations: u64,
    breaches: u64,
    failures: u64,
    cert_checked: u64,
    cert_incoherent: u64,
    worst: Option<f64>,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            cp: self.cp + o.cp,
            violations: self.violations + o.violations,
            breaches: self.breaches + o.breaches,
            failures: self.failures + o.failures,
            cert_checked: self.cert_checked + o.cert_checked,
            cert_incoherent: self.cert_incoherent + o.cert_incoherent,
            worst: match (self.worst, o.worst) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

fn evaluate(spec: &GeneratorSpec, tol: &Tolerances) -> Tally {
    let mut t = Tally::default();
    let cp = check_cp(spec, tol).is_cp;
    t.cp = cp as u64;
    let ba = bloch_affine(spec);
    let Ok(rs) = relaxation_spectrum(&ba, tol) else {
        t.failures = 1;
        return t;
    };
    let verdict = triangle_check(&rs, tol.triangle);
    t.worst = Some(verdict.worst());
    if !verdict.holds {
        t.violations = 1;
        t.breaches = cp as u64;
    }
    if !spec.has_delta() {
        if let Ok(closed) = f_half_trace_closed(spec) {
            t.cert_checked = 1;
            let det = char_poly_at(&ba, ba.a_matrix.trace() / 2.0);
            let scale = ba.a_matrix.norm_frobenius().max(1.0);
            let identity_ok = (closed - det).abs() <= 1e-10 * det.abs().max(1.0);
            // With non-negative rates, f(tr A/2) is a positive multiple of the
            // smallest slack; compare signs only outside both tolerance bands.
            let slack = verdict.min_slack();
            let sign_ok = verdict.min_gamma < -tol.triangle
                || slack.abs() <= tol.triangle * scale
                || closed.abs() <= tol.triangle * scale.powi(3)
                || (slack > 0.0) == (closed > 0.0);
            t.cert_incoherent = (!(identity_ok && sign_ok)) as u64;
        }
    }
    t
}

/// Evaluates `n` samples in parallel; the result is independent of the thread count.
pub fn run_scan(mode: ScanMode, n: u64, seed: u64, tol: &Tolerances) -> ScanReport {
    let tally = (0..n)
        .into_par_iter()
        .map(|i| evaluate(&sample_spec(mode, &mut sample_rng(seed, i)), tol))
        .reduce(Tally::default, Tally::merge);
    ScanReport {
        n_samples: n,
        n_cp_confirmed: tally.cp,
        n_triangle_violations: tally.violations,
        worst_slack: tally.worst.unwrap_or(f64::NAN),
        seed,
        mode,
        n_theorem_breaches: tally.breaches,
        n_spectrum_failures: tally.failures,
        n_certificate_checked: tally.cert_checked,
        n_certificate_incoherent: tally.cert_incoherent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::triangle_check_gammas;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_cp_spec(&mut sample_rng(42, 0));
        let b = sample_cp_spec(&mut sample_rng(42, 0));
        let c = sample_cp_spec(&mut sample_rng(42, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cp_samples_are_cp() {
        let tol = Tolerances::default();
        for i in 0..200 {
            let spec = sample_cp_spec(&mut sample_rng(3, i));
            assert!(check_cp(&spec, &tol).is_cp);
        }
    }

    #[test]
    fn violating_samples_violate() {
        let tol = Tolerances::default();
        for i in 0..200 {
            let spec = sample_violating_spec(&mut sample_rng(5, i));
            assert!(!check_cp(&spec, &tol).is_cp);
            let rs = relaxation_spectrum(&bloch_affine(&spec), &tol).unwrap();
            assert!(!triangle_check(&rs, tol.triangle).holds, "{spec:?}");
        }
    }

    #[test]
    fn violating_family_diagonal_example() {
        let v = triangle_check_gammas(&[1.0, 0.1, 0.1], 1e-9);
        assert!((v.slacks[0] + 0.8).abs() < 1e-15 && !v.holds);
    }

    #[test]
    fn scan_is_deterministic() {
        let tol = Tolerances::default();
        for mode in [ScanMode::CpOnly, ScanMode::FreeGamma, ScanMode::BlochOnly] {
            assert_eq!(run_scan(mode, 500, 9, &tol), run_scan(mode, 500, 9, &tol));
        }
    }

    #[test]
    fn single_sample_counts() {
        let r = run_scan(ScanMode::FreeGamma, 1, 0, &Tolerances::default());
        assert_eq!(r.n_samples, 1);
        assert!(r.n_cp_confirmed <= 1 && r.n_triangle_violations <= 1);
    }

    #[test]
    fn cp_scan_has_no_violations() {
        let r = run_scan(ScanMode::CpOnly, 2000, 1, &Tolerances::default());
        assert_eq!(r.n_cp_confirmed, 2000);
        assert_eq!(r.n_triangle_violations, 0);
        assert!(r.worst_slack >= -1e-9);
    }

    #[test]
    fn free_gamma_scan_finds_violations() {
        let r = run_scan(ScanMode::FreeGamma, 10_000, 1, &Tolerances::default());
        assert!(r.n_triangle_violations > 0);
        assert_eq!(r.n_theorem_breaches, 0);
        assert_eq!(r.n_certificate_checked, 10_000);
        assert_eq!(r.n_certificate_incoherent, 0, "{r:?}");
    }
}
