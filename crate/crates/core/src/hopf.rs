//! The quotient of `Tot°B` (nonzero vectors) by `ρ_q(m, b) = (m, q b)`,
//! checked equivariantly on the cover.
//!
//! `Ω̃ = Ω_hor + ∂∂_J log Ψ = Ω_hor + 2Ω_ver/Ψ − ∂Ψ ∧ ∂_JΨ / Ψ²`.

use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::exterior::Form;
use crate::fields::{Dolbeault, DolbeaultD, FormField, Function, PartialJ, ScalarField, StructureField};
use crate::hermitian::{canonical_form, del_residual, omega_to_metric, HermitianError, MetricField};
use crate::jet::Real;
use crate::linalg::Mat;
use crate::pointwise::{complexify_mat, hermitian_value, q_positive_check, ExteriorElement};
use crate::report::{least, relative, worst, Record, Tolerances, VerificationReport};
use crate::total_space::{MetricPart, TotalSpaceChart};

/// Points with `Ψ` below this are treated as lying on the zero section.
pub const MIN_PSI: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum HopfError {
    #[error("scale q must be real with |q| not in {{0, 1}}, got {0}")]
    InvalidScale(f64),
    #[error("point lies on the zero section (Ψ = {0:e})")]
    ZeroSection(f64),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
}

#[derive(Clone, Debug)]
pub struct HopfData {
    chart: TotalSpaceChart,
    q: f64,
}

/// `log Ψ`.
#[derive(Clone, Copy, Debug)]
struct LogPsi<'a>(&'a TotalSpaceChart);

impl ScalarField for LogPsi<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Complex<R> {
        Complex::new(self.0.psi_field().eval(x).re.ln(), R::zero())
    }
}

/// `Ω_hor + ∂∂_J log Ψ`, differentiating `log Ψ` directly.
#[derive(Clone, Copy, Debug)]
pub struct OmegaTildeDirect<'a>(pub &'a TotalSpaceChart);

/// `Ω_hor + 2Ω_ver/Ψ − ∂Ψ ∧ ∂_JΨ / Ψ²`.
#[derive(Clone, Copy, Debug)]
pub struct OmegaTilde<'a>(pub &'a TotalSpaceChart);

fn omega_part<R: Real>(t: &TotalSpaceChart, x: &[R], part: MetricPart) -> Form<Complex<R>> {
    canonical_form(&t.metric_field(part).metric(x), &t.structure(x))
}

impl FormField for OmegaTildeDirect<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let log_psi = Function(LogPsi(self.0));
        let dj = PartialJ { inner: &log_psi, structure: self.0 };
        let ddj = DolbeaultD::new(&dj, self.0, Dolbeault::Holomorphic).eval(x);
        omega_part(self.0, x, MetricPart::Horizontal).add(&ddj)
    }
}

impl FormField for OmegaTilde<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Form<Complex<R>> {
        let t = self.0;
        let psi = Function(t.psi_field());
        let value = t.psi_field().eval(x).re;
        let del = DolbeaultD::new(&psi, t, Dolbeault::Holomorphic).eval(x);
        let del_j = PartialJ { inner: &psi, structure: t }.eval(x);
        let two_over = Complex::new(R::from_f64(2.0) / value, R::zero());
        let inv_sq = Complex::new(-R::one() / (value * value), R::zero());
        omega_part(t, x, MetricPart::Horizontal)
            .add(&omega_part(t, x, MetricPart::Vertical).scale(two_over))
            .add(&del.wedge(&del_j).scale(inv_sq))
    }
}

impl HopfData {
    pub fn new(chart: TotalSpaceChart, q: f64) -> Result<Self, HopfError> {
        if !q.is_finite() || q == 0.0 || q.abs() == 1.0 {
            return Err(HopfError::InvalidScale(q));
        }
        Ok(Self { chart, q })
    }

    pub fn chart(&self) -> &TotalSpaceChart {
        &self.chart
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn psi(&self, x: &[f64]) -> Result<f64, HopfError> {
        let v = self.chart.psi_field().eval(x).re;
        if v < MIN_PSI {
            return Err(HopfError::ZeroSection(v));
        }
        Ok(v)
    }

    /// `(m, λ b)`.
    pub fn scaled(&self, x: &[f64], lambda: f64) -> Vec<f64> {
        let nb = self.chart.base_dim();
        x.iter().enumerate().map(|(i, &v)| if i < nb { v } else { lambda * v }).collect()
    }

    pub fn rho(&self, x: &[f64]) -> Vec<f64> {
        self.scaled(x, self.q)
    }

    /// Differential of `b ↦ λ b`.
    pub fn scaling_differential(&self, lambda: f64) -> Mat<f64> {
        let nb = self.chart.base_dim();
        let d = self.chart.dim();
        Mat::from_fn(d, d, |r, c| if r != c { 0.0 } else if r < nb { 1.0 } else { lambda })
    }

    pub fn omega_tilde(&self, x: &[f64]) -> Result<ExteriorElement, HopfError> {
        self.psi(x)?;
        Ok(OmegaTilde(&self.chart).eval(x))
    }

    pub fn omega_tilde_direct(&self, x: &[f64]) -> Result<ExteriorElement, HopfError> {
        self.psi(x)?;
        Ok(OmegaTildeDirect(&self.chart).eval(x))
    }

    /// `(ρ_λ^* Ω̃)(x) − Ω̃(x)`, relative.
    pub fn scaling_residual(&self, x: &[f64], lambda: f64) -> Result<f64, HopfError> {
        let here = self.omega_tilde(x)?;
        let there = self.omega_tilde(&self.scaled(x, lambda))?;
        let pulled = there.automorphism(&complexify_mat(&self.scaling_differential(lambda)));
        Ok(relative(pulled.distance(&here), here.max_norm()))
    }

    /// The metric of `Ω̃`, failing unless `Ω̃` is strictly q-positive.
    pub fn metric(&self, x: &[f64]) -> Result<Mat<f64>, HopfError> {
        Ok(omega_to_metric(&self.omega_tilde(x)?, &self.chart.structure(x))?)
    }
}

/// Base uniform in `[−1, 1]^{4n}`, fiber with `log|b|` uniform in
/// `[−log|q|, 0)` and uniform direction: one fundamental domain of `ρ_q`.
pub fn fundamental_domain_points(h: &HopfData, count: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let (nb, d) = (h.chart.base_dim(), h.chart.dim());
    let span = h.q.abs().ln();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x: Vec<f64> = (0..nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dir: Vec<f64> = (nb..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let radius = (-span * rng.gen::<f64>()).exp();
        x.extend(dir.iter().map(|v| radius * v / norm));
        if norm > 0.0 && radius * radius >= MIN_PSI {
            out.push(x);
        }
    }
    out
}

fn apply(m: &Mat<f64>, v: &[Complex64]) -> Vec<Complex64> {
    complexify_mat(m).mul_vec(v)
}

/// `(X − √−1 Î X)/2`.
fn one_zero(i: &Mat<f64>, x: &[f64]) -> Vec<Complex64> {
    let ix = i.mul_vec(x);
    x.iter().zip(ix).map(|(&a, b)| Complex64::new(0.5 * a, -0.5 * b)).collect()
}

fn nan_on_err<T>(r: Result<T, HopfError>, f: impl FnOnce(T) -> f64) -> f64 {
    r.map(f).unwrap_or(f64::NAN)
}

/// `log Ψ(ρ_q x) − log Ψ(x) = 2 log|q|`, the log identity, `ρ_q`- and
/// scaling invariance, compatibility of `ρ_q` with `L̂`, and `∂Ω̃ = 0`.
pub fn rho_invariance_check(h: &HopfData, points: &[Vec<f64>], seed: u64, tol: &Tolerances) -> VerificationReport {
    let t = &h.chart;
    let rows: Vec<[f64; 6]> = points
        .par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let shift = nan_on_err(h.psi(x), |p| {
                let moved = t.psi_field().eval(&h.rho(x)).re;
                (moved.ln() - p.ln() - 2.0 * h.q.abs().ln()).abs()
            });
            let log_identity = nan_on_err(h.omega_tilde(x), |split| {
                let direct = OmegaTildeDirect(t).eval(x);
                relative(direct.distance(&split), split.max_norm())
            });
            let rho = nan_on_err(h.scaling_residual(x, h.q), |r| r);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let lambda = sign * rng.gen_range(0.25f64..4.0);
            let homogeneity = nan_on_err(h.scaling_residual(x, lambda), |r| r);
            let d = h.scaling_differential(h.q);
            let (s0, s1) = (t.structure(x), t.structure(&h.rho(x)));
            let commutes = [(&s0.i, &s1.i), (&s0.j, &s1.j), (&s0.k, &s1.k)]
                .into_iter()
                .map(|(a, b)| (&(&d * a) - &(b * &d)).max_abs())
                .fold(0.0, f64::max);
            let del = del_residual(&OmegaTilde(t), t, x);
            [shift, log_identity, rho, homogeneity, commutes, del]
        })
        .collect();
    let name = t.bundle().name();
    let n = points.len();
    let col = |c: usize| worst(rows.iter().map(|r| r[c]));
    VerificationReport::new(
        "hopf",
        vec![
            Record::residual(&format!("hopf.{name}.log_psi_shift"), "log Ψ(qb) − log Ψ(b) = 2 log|q|", n, col(0), tol.algebra),
            Record::residual(
                &format!("hopf.{name}.log_identity"),
                "∂∂_J log Ψ = ∂∂_JΨ/Ψ − ∂Ψ∧∂_JΨ/Ψ²",
                n,
                col(1),
                tol.second_order,
            ),
            Record::residual(&format!("hopf.{name}.rho_invariance"), "ρ_q^* Ω̃ = Ω̃", n, col(2), tol.second_order),
            Record::residual(&format!("hopf.{name}.homogeneity"), "ρ_λ^* Ω̃ = Ω̃ for random real λ", n, col(3), tol.second_order),
            Record::residual(&format!("hopf.{name}.rho_commutes_structure"), "dρ_q ∘ L̂ = L̂ ∘ dρ_q", n, col(4), tol.algebra),
            Record::residual(&format!("hopf.{name}.del_omega_tilde"), "∂Ω̃ = 0", n, col(5), tol.second_order),
        ],
    )
}

/// Per-point results of the three positivity sub-checks.
#[derive(Clone, Copy, Debug)]
struct Positivity {
    matrix_margin: f64,
    cauchy_slack: f64,
    probe_margin: f64,
    radial_slack: f64,
    orthogonality: f64,
    horizontal_margin: f64,
}

fn positivity_at(h: &HopfData, x: &[f64], probes: usize, seed: u64) -> Result<Positivity, HopfError> {
    let t = &h.chart;
    let psi = h.psi(x)?;
    let omega = h.omega_tilde(x)?;
    let s = t.structure(x);
    let matrix_margin = q_positive_check(&s, &omega, true).map(|q| q.margin).unwrap_or(f64::NAN);
    let omega_ver = omega_part(t, x, MetricPart::Vertical);
    let omega_hor = omega_part(t, x, MetricPart::Horizontal);
    let split = t.split(x);
    let (nb, d) = (t.base_dim(), t.dim());
    let scale = 1.0 + omega.max_norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radial = vec![0.0; d];
    radial[nb..].copy_from_slice(&x[nb..]);
    let mut vertical_probes = vec![radial];
    for _ in 0..probes {
        let mut v = vec![0.0; d];
        for c in v.iter_mut().skip(nb) {
            *c = rng.sample(StandardNormal);
        }
        vertical_probes.push(v);
    }
    let mut cauchy_slack = f64::INFINITY;
    let mut probe_margin = f64::INFINITY;
    let mut radial_slack = 0.0;
    for (idx, v) in vertical_probes.iter().enumerate() {
        let z = one_zero(&s.i, v);
        let hz = hermitian_value(&s, &omega_ver, &z).re;
        let value = hermitian_value(&s, &omega, &z).re;
        let slack = (value - hz / psi) / (hz / psi);
        if idx == 0 {
            radial_slack = slack.abs();
        }
        cauchy_slack = cauchy_slack.min(slack);
        probe_margin = probe_margin.min(value / scale);
    }

    let hor: Vec<Vec<Complex64>> = (0..nb)
        .map(|c| one_zero(&s.i, &(0..d).map(|r| split.horizontal[(r, c)]).collect::<Vec<_>>()))
        .collect();
    let ver: Vec<Vec<Complex64>> = (0..d - nb)
        .map(|c| one_zero(&s.i, &(0..d).map(|r| split.vertical[(r, c)]).collect::<Vec<_>>()))
        .collect();
    let mut orthogonality = 0.0f64;
    let omega2 = omega.grade(2);
    for a in &hor {
        for b in &ver {
            let jb = apply(&s.j, &b.iter().map(|c| c.conj()).collect::<Vec<_>>());
            orthogonality = orthogonality.max(omega2.eval(&[a, &jb]).norm());
        }
    }
    let mut horizontal_margin = f64::INFINITY;
    for a in &hor {
        let full = hermitian_value(&s, &omega, a).re;
        let base = hermitian_value(&s, &omega_hor, a).re;
        orthogonality = orthogonality.max((full - base).abs());
        horizontal_margin = horizontal_margin.min(full / scale);
    }
    Ok(Positivity {
        matrix_margin,
        cauchy_slack,
        probe_margin,
        radial_slack,
        orthogonality: relative(orthogonality, omega.max_norm()),
        horizontal_margin,
    })
}

/// Strict q-positivity of `Ω̃` three ways: the full Hermitian matrix, the
/// vertical Cauchy bound `Ω̃(x, Ĵx̄) ≥ (x,x)_H/Ψ` on random probes (plus the
/// radial probe, where it is an equality), and horizontal/vertical
/// orthogonality with `Ω̃ = Ω_hor` on horizontal vectors.
pub fn strict_qpos_check(h: &HopfData, points: &[Vec<f64>], probes: usize, seed: u64, tol: &Tolerances) -> VerificationReport {
    let rows: Vec<Option<Positivity>> = points
        .par_iter()
        .enumerate()
        .map(|(idx, x)| positivity_at(h, x, probes, seed.wrapping_add(idx as u64)).ok())
        .collect();
    let name = h.chart.bundle().name();
    let n = points.len();
    let get = |f: fn(&Positivity) -> f64| rows.iter().map(move |r| r.as_ref().map(f).unwrap_or(f64::NAN));
    let bound = tol.second_order;
    let disagreements = rows
        .iter()
        .filter(|r| match r {
            None => false,
            Some(p) => {
                let a = p.matrix_margin > 0.0;
                let b = p.probe_margin > 0.0 && p.cauchy_slack >= -bound;
                let c = p.orthogonality <= bound && p.horizontal_margin > 0.0;
                !(a == b && b == c)
            }
        })
        .count();
    let cauchy_violation = worst(get(|p| (-p.cauchy_slack).max(0.0)));
    VerificationReport::new(
        "hopf",
        vec![
            Record::residual(&format!("hopf.{name}.strict_q_positive"), "Ω̃ strictly q-positive (matrix)", n, 0.0, tol.positivity)
                .with_margin(least(get(|p| p.matrix_margin))),
            Record::residual(&format!("hopf.{name}.cauchy_bound"), "Ω̃(x, Ĵx̄) ≥ (x,x)_H/Ψ on vertical probes", n, cauchy_violation, bound)
                .with_margin(least(get(|p| p.probe_margin))),
            Record::residual(&format!("hopf.{name}.cauchy_radial_tight"), "equality on the radial probe", n, worst(get(|p| p.radial_slack)), bound),
            Record::residual(&format!("hopf.{name}.hor_ver_orthogonal"), "Ω̃(hor, Ĵ ver̄) = 0, Ω̃ = Ω_hor on hor", n, worst(get(|p| p.orthogonality)), bound)
                .with_margin(least(get(|p| p.horizontal_margin))),
            Record::residual(&format!("hopf.{name}.positivity_agree"), "matrix ⟺ probes ⟺ orthogonal split", n, disagreements as f64, 0.0),
        ],
    )
}

/// `Ω̃` gives a positive metric whose vertical block scales like `1/Ψ`
/// along `b ↦ εb`.
pub fn metric_reconstruction_check(h: &HopfData, points: &[Vec<f64>], tol: &Tolerances) -> VerificationReport {
    let t = &h.chart;
    let (nb, d) = (t.base_dim(), t.dim());
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| {
            let reference = match h.metric(x) {
                Ok(g) => g.block(nb, nb, d - nb, d - nb),
                Err(_) => return (f64::NAN, f64::NAN),
            };
            let mut blowup = 0.0f64;
            let mut least_eig = f64::INFINITY;
            for eps in [0.5, 0.1, 0.01] {
                match h.metric(&h.scaled(x, eps)) {
                    Ok(g) => {
                        let v = g.block(nb, nb, d - nb, d - nb).scale(eps * eps);
                        blowup = blowup.max(relative((&v - &reference).max_abs(), reference.max_abs()));
                        let e = g.to_nalgebra().symmetric_eigen().eigenvalues.min();
                        least_eig = least_eig.min(e / (1.0 + g.max_abs()));
                    }
                    Err(_) => return (f64::NAN, f64::NAN),
                }
            }
            (blowup, least_eig)
        })
        .collect();
    let name = t.bundle().name();
    VerificationReport::new(
        "hopf",
        vec![Record::residual(
            &format!("hopf.{name}.metric_blowup"),
            "g̃ positive, vertical block ~ 1/Ψ as b → 0",
            points.len(),
            worst(rows.iter().map(|r| r.0)),
            tol.second_order,
        )
        .with_margin(least(rows.iter().map(|r| r.1)))],
    )
}

/// `Ω̃` restricted to a pair of `(1,0)`-vectors, exposed for examples.
pub fn omega_tilde_hermitian(h: &HopfData, x: &[f64], z: &[Complex64]) -> Result<f64, HopfError> {
    let s = h.chart.structure(x);
    Ok(hermitian_value(&s, &h.omega_tilde(x)?, z).re)
}

/// `(X − √−1 ÎX)/2` at a point.
pub fn holomorphic_part(h: &HopfData, x: &[f64], v: &[f64]) -> Vec<Complex64> {
    one_zero(&h.chart.structure(x).i, v)
}

/// `(x, x)_H = Ω_ver(x, Ĵx̄)`.
pub fn vertical_norm(h: &HopfData, x: &[f64], z: &[Complex64]) -> f64 {
    let s = h.chart.structure(x);
    hermitian_value(&s, &omega_part(&h.chart, x, MetricPart::Vertical), z).re
}
