//! Scenario configuration and the named verification suites driven by the CLI.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bundle::{bianchi_check, h_hyperholomorphic_check, hyperholomorphic_check, BundleError, ConnectionData};
use crate::exterior::{binomial, monomials, Form};
use crate::fields::{
    ladder_down, quaternionic_d_plus, Dolbeault, DolbeaultD, ExteriorD, FlatStructure, FormField, Function, LadderDown,
    PartialJ, PolyForm, Polynomial,
};
use crate::hermitian::{canonical_form, hermitian_triple, metric_to_omega, omega_to_metric, random_qh_metric};
use crate::linalg::Mat;
use crate::hopf::{fundamental_domain_points, metric_reconstruction_check, rho_invariance_check, strict_qpos_check, HopfData};
use crate::pointwise::{
    flat_big_omega, flat_omega_i, lowering, q_positive_check, q_real_residual, raising_r, top_weight_dimension_formula,
    type_component, weight_decompose, weight_h, xi_bar_form, xi_form, ExteriorElement, Hypercomplex, WeightProjectors,
};
use crate::report::{least, relative, worst, ConfigEcho, Record, Tolerances, VerificationReport};
use crate::total_space::{verify_ddbar_psi, verify_tot_hkt, TotalSpaceChart};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("unknown suite {0:?}; known: algebra, bicomplex, qpos, bundle, totspace, hopf, all")]
    UnknownSuite(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Bicomplex,
    Qpos,
    Bundle,
    Totspace,
    Hopf,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Algebra, Suite::Bicomplex, Suite::Qpos, Suite::Bundle, Suite::Totspace, Suite::Hopf];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Bicomplex => "bicomplex",
            Suite::Qpos => "qpos",
            Suite::Bundle => "bundle",
            Suite::Totspace => "totspace",
            Suite::Hopf => "hopf",
            Suite::All => "all",
        }
    }

    fn salt(self) -> u64 {
        Suite::EACH.iter().position(|&s| s == self).unwrap_or(6) as u64 + 1
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.into()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// Quaternionic dimension of the base.
    pub n: usize,
    pub bundle: String,
    pub q: f64,
    pub samples: usize,
    pub probes: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 1,
            bundle: "bpst".into(),
            q: 2.0,
            samples: 20,
            probes: 16,
            seed: 42,
            tolerances: Tolerances::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field, reason: &str| Err(ConfigError::Invalid { field, reason: reason.into() });
        if self.n == 0 {
            return invalid("n", "must be at least 1");
        }
        // Forms are indexed by u32 bitmasks, so the total space must fit in 32 real dimensions.
        if self.n > 4 {
            return invalid("n", "at most 4 is supported");
        }
        if self.samples == 0 {
            return invalid("samples", "must be at least 1");
        }
        if !self.q.is_finite() || self.q == 0.0 || self.q.abs() == 1.0 {
            return invalid("q", "must be real with |q| not in {0, 1}");
        }
        let t = &self.tolerances;
        for (field, v) in [
            ("tol-algebra", t.algebra),
            ("tol-sl2", t.sl2),
            ("tol-bicomplex", t.bicomplex),
            ("tol-second-order", t.second_order),
            ("tol-positivity", t.positivity),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(field, "must be a finite non-negative number");
            }
        }
        let bundle = ConnectionData::from_name(&self.bundle, self.n)?;
        if 4 * (self.n + bundle.k()) > 32 {
            return invalid("n", "total space exceeds 32 real dimensions");
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            n: self.n,
            bundle: self.bundle.clone(),
            q: self.q,
            samples: self.samples,
            probes: self.probes,
            seed: self.seed,
            tolerances: self.tolerances,
        }
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ suite.salt())
    }

    fn connection(&self) -> Result<ConnectionData, ConfigError> {
        Ok(ConnectionData::from_name(&self.bundle, self.n)?)
    }
}

/// Runs one suite (or all of them) and attaches the config echo.
pub fn run_suite(config: &ScenarioConfig, suite: Suite) -> Result<VerificationReport, ConfigError> {
    config.validate()?;
    let report = match suite {
        Suite::Algebra => algebra_suite(config),
        Suite::Bicomplex => bicomplex_suite(config),
        Suite::Qpos => qpos_suite(config),
        Suite::Bundle => bundle_suite(config)?,
        Suite::Totspace => totspace_suite(config)?,
        Suite::Hopf => hopf_suite(config)?,
        Suite::All => {
            let parts = Suite::EACH.into_iter().map(|s| run_suite(config, s)).collect::<Result<Vec<_>, _>>()?;
            VerificationReport::merge("all", parts)
        }
    };
    Ok(report.with_config(config.echo()))
}

fn uniform_point(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn sl2_residual(n: usize) -> f64 {
    let s = Hypercomplex::flat(n);
    let dim = 4 * n;
    let two = Complex64::new(2.0, 0.0);
    (0..=dim)
        .into_par_iter()
        .map(|p| {
            let mut r = 0.0f64;
            for m in monomials(dim, p) {
                let e = Form::monomial(dim, m, Complex64::new(1.0, 0.0));
                let (re, le, he) = (raising_r(&s, &e), lowering(&s, &e), weight_h(&s, &e));
                let h_r = weight_h(&s, &re).sub(&raising_r(&s, &he));
                let h_l = weight_h(&s, &le).sub(&lowering(&s, &he));
                let r_l = raising_r(&s, &le).sub(&lowering(&s, &re));
                r = r.max(h_r.distance(&re.scale(two))).max(h_l.distance(&le.scale(-two))).max(r_l.distance(&he));
            }
            r
        })
        .reduce(|| 0.0, f64::max)
}

/// Invariant `(1,1)`-forms and `(1,1)`-parts of weight-2 forms, as spanning sets.
fn split_11_basis(n: usize) -> (Vec<ExteriorElement>, Vec<ExteriorElement>) {
    let s = Hypercomplex::flat(n);
    let proj = WeightProjectors::flat(n, 2);
    let mut inv = Vec::new();
    let mut rest = Vec::new();
    for a in 0..2 * n {
        for b in 0..2 * n {
            let e = xi_form(n, a).wedge(&xi_bar_form(n, b));
            inv.push(proj.project(&e, 0));
            rest.push(type_component(&proj.project(&e, 2), &s.i, 1, 1));
        }
    }
    (inv, rest)
}

fn combination(basis: &[ExteriorElement], dim: usize, rng: &mut impl Rng) -> ExteriorElement {
    basis.iter().fold(Form::zero(dim), |acc, f| acc.add(&f.scale(random_complex(rng))))
}

/// Rank defect of `𝓡` on `Λ^{d−q,q}₊ → Λ^{d−q+1,q−1}₊`, `1 ≤ q ≤ d`, compared
/// with `dim Λ^{p,q}₊ = C(2n, p+q)`.
fn rank_deficiency(n: usize) -> usize {
    let s = Hypercomplex::flat(n);
    let dim = 4 * n;
    let mut missing = 0;
    for d in 1..=(2 * n).min(3) {
        let proj = WeightProjectors::flat(n, d);
        let basis = monomials(dim, d);
        let rank = |fs: &[ExteriorElement]| DMatrix::from_fn(basis.len(), fs.len(), |r, c| fs[c].coeff(basis[r])).rank(1e-9);
        let expected = binomial(2 * n, d);
        for q in 1..=d {
            let source: Vec<ExteriorElement> = basis
                .iter()
                .map(|&m| type_component(&proj.project(&Form::monomial(dim, m, Complex64::new(1.0, 0.0)), d), &s.i, d - q, q))
                .collect();
            let images: Vec<ExteriorElement> = source.iter().map(|e| raising_r(&s, e)).collect();
            missing += expected.abs_diff(rank(&source)) + expected.abs_diff(rank(&images));
        }
    }
    missing
}

/// sl(2) relations, weight dimensions, `𝓡(ω_I) = Ω`, and the invariance
/// criterion for `(1,1)`-forms. Runs on `ℍ` and `ℍ²`.
pub fn algebra_suite(config: &ScenarioConfig) -> VerificationReport {
    let tol = &config.tolerances;
    let mut rng = config.rng(Suite::Algebra);
    let ns = [1usize, 2];
    let sl2 = worst(ns.iter().map(|&n| sl2_residual(n)));
    let dims = worst(ns.iter().flat_map(|&n| {
        (0..=2 * n).map(move |p| {
            WeightProjectors::flat(n, p).weight_dimension(p).abs_diff(top_weight_dimension_formula(n, p)) as f64
        })
    }));

    let mut r_omega = worst(ns.iter().map(|&n| {
        let s = Hypercomplex::flat(n);
        raising_r(&s, &flat_omega_i(n)).distance(&flat_big_omega(n))
    }));
    for _ in 0..config.samples {
        let n = ns[rng.gen_range(0..2)];
        let s = Hypercomplex::flat(n);
        let g = random_qh_metric(&s, &mut rng);
        let [wi, _, _] = hermitian_triple(&g, &s);
        let omega = canonical_form(&g, &s);
        r_omega = r_omega.max(relative(raising_r(&s, &wi).distance(&omega), omega.max_norm()));
    }

    let triple_weight = worst(ns.iter().flat_map(|&n| {
        let s = Hypercomplex::flat(n);
        hermitian_triple(&Mat::identity(4 * n), &s).map(|w| {
            weight_decompose(&s, &w)
                .map(|d| d.components.iter().filter(|(k, _)| *k != 2).map(|(_, c)| c.max_norm()).fold(0.0, f64::max))
                .unwrap_or(f64::NAN)
        })
    }));

    let count = config.samples.max(100);
    let mut inv_residual = 0.0f64;
    let mut mixed_margin = f64::INFINITY;
    for idx in 0..count {
        let n = ns[idx % 2];
        let s = Hypercomplex::flat(n);
        let (inv, rest) = split_11_basis(n);
        let a = combination(&inv, 4 * n, &mut rng);
        let b = combination(&rest, 4 * n, &mut rng);
        let ra = raising_r(&s, &a).max_norm();
        let off = weight_decompose(&s, &a)
            .map(|d| d.components.iter().filter(|(k, _)| *k != 0).map(|(_, c)| c.max_norm()).fold(0.0, f64::max))
            .unwrap_or(f64::NAN);
        inv_residual = inv_residual.max(relative(ra.max(off), a.max_norm()));
        let mixed = a.add(&b);
        let rm = raising_r(&s, &mixed).max_norm();
        mixed_margin = mixed_margin.min(rm / (1.0 + b.max_norm()) - tol.algebra);
    }
    let rank = ns.iter().map(|&n| rank_deficiency(n)).sum::<usize>() as f64;

    VerificationReport::new(
        "algebra",
        vec![
            Record::residual("algebra.sl2_triple", "[H,𝓡] = 2𝓡, [H,𝓡̄'] = −2𝓡̄', [𝓡,𝓡̄'] = H on Λ*(ℍⁿ)", 2, sl2, tol.sl2),
            Record::residual("algebra.weight_dimensions", "dim Λ^p₊ = (p+1)·C(2n,p)", 2, dims, 0.0),
            Record::residual("algebra.r_omega_i", "𝓡(ω_I) = Ω", config.samples + 2, r_omega, tol.sl2),
            Record::residual("algebra.hermitian_triple_weight_two", "ω_I, ω_J, ω_K of weight 2", 2, triple_weight, tol.algebra),
            Record::residual("algebra.invariant_11_killed_by_r", "(1,1) SU(2)-invariant ⟹ 𝓡η = 0", count, inv_residual, tol.algebra),
            Record::residual("algebra.noninvariant_11_not_killed", "𝓡η = 0 ⟹ η SU(2)-invariant", count, 0.0, tol.algebra)
                .with_margin(mixed_margin),
            Record::residual("algebra.r_isomorphism", "𝓡: Λ^{p,q}₊ ≅ Λ^{p+1,q−1}₊ (rank deficit)", 2, rank, 0.0),
        ],
    )
}

#[derive(Clone, Copy, Default)]
struct BicomplexRow {
    dolbeault: f64,
    del_squared: f64,
    del_j_squared: f64,
    anticommute: f64,
    ddj_r: f64,
    ladder_prime: f64,
    ladder_double_prime: f64,
}

fn bicomplex_row(n: usize, psi: &Polynomial, theta: &PolyForm, theta_degree: usize, q: usize, x: &[f64]) -> BicomplexRow {
    let flat = FlatStructure::new(n);
    let s = Hypercomplex::flat(n);
    let f = Function(psi);

    let dbar = DolbeaultD::new(&f, &flat, Dolbeault::Antiholomorphic);
    let d_f = DolbeaultD::new(&f, &flat, Dolbeault::Holomorphic);
    let ddbar = DolbeaultD::new(&dbar, &flat, Dolbeault::Holomorphic).eval(x);
    let dbar_d = DolbeaultD::new(&d_f, &flat, Dolbeault::Antiholomorphic).eval(x);
    let dbar_dbar = DolbeaultD::new(&dbar, &flat, Dolbeault::Antiholomorphic).eval(x);
    let dd_f = DolbeaultD::new(&d_f, &flat, Dolbeault::Holomorphic).eval(x);
    let d_squared = ExteriorD(ExteriorD(&f)).eval(x);
    let scale2 = ddbar.max_norm();
    let dolbeault = relative(
        ddbar.add(&dbar_d).max_norm().max(dbar_dbar.max_norm()).max(dd_f.max_norm()).max(d_squared.max_norm()),
        scale2,
    );

    // ∂² = 0, ∂_J² = 0, ∂∂_J + ∂_J∂ = 0 on ψ and on the holomorphic 1-form θ.
    let (mut del_squared, mut del_j_squared, mut anticommute) = (0.0f64, 0.0f64, 0.0f64);
    let mut check = |g: &dyn FormFieldDyn| {
        let a = g.del_del(&flat, x);
        let b = g.dj_dj(&flat, x);
        let (c1, c2) = g.anti(&flat, x);
        let sc = c1.max_norm().max(c2.max_norm()).max(a.1).max(b.1);
        del_squared = del_squared.max(relative(a.0, sc));
        del_j_squared = del_j_squared.max(relative(b.0, sc));
        anticommute = anticommute.max(relative(c1.add(&c2).max_norm(), sc));
    };
    check(&f);
    check(theta);

    let dj = PartialJ { inner: &f, structure: &flat };
    let ddj = DolbeaultD::new(&dj, &flat, Dolbeault::Holomorphic).eval(x);
    let r = raising_r(&s, &ddbar.scale(Complex64::i()));
    let ddj_r = relative(ddj.distance(&r), ddj.max_norm());

    // Ladder: d′₊ ι_{p,q} = ι_{p+1,q} ∂ and d″₊ ι_{p,q} = (q+1) ι_{p,q+1} ∂_J.
    let p = theta_degree - q;
    let lifted = LadderDown { inner: theta, n, p, q };
    let (ladder_prime, ladder_double_prime) = match quaternionic_d_plus(&lifted, n, x) {
        Ok((d1, d2)) => {
            let del_theta = DolbeaultD::new(theta, &flat, Dolbeault::Holomorphic).eval(x);
            let dj_theta = PartialJ { inner: theta, structure: &flat }.eval(x);
            let e1 = ladder_down(&s, &del_theta, p + 1, q);
            let e2 = ladder_down(&s, &dj_theta, p, q + 1).scale(Complex64::new((q + 1) as f64, 0.0));
            (relative(d1.distance(&e1), e1.max_norm()), relative(d2.distance(&e2), e2.max_norm()))
        }
        Err(_) => (f64::NAN, f64::NAN),
    };

    BicomplexRow { dolbeault, del_squared, del_j_squared, anticommute, ddj_r, ladder_prime, ladder_double_prime }
}

/// Second-order compositions of `∂` and `∂_J` on a flat chart.
trait FormFieldDyn {
    fn del_del(&self, flat: &FlatStructure, x: &[f64]) -> (f64, f64);
    fn dj_dj(&self, flat: &FlatStructure, x: &[f64]) -> (f64, f64);
    fn anti(&self, flat: &FlatStructure, x: &[f64]) -> (ExteriorElement, ExteriorElement);
}

impl<F: FormField> FormFieldDyn for F {
    fn del_del(&self, flat: &FlatStructure, x: &[f64]) -> (f64, f64) {
        let d = DolbeaultD::new(self, flat, Dolbeault::Holomorphic);
        (DolbeaultD::new(&d, flat, Dolbeault::Holomorphic).eval(x).max_norm(), d.eval(x).max_norm())
    }
    fn dj_dj(&self, flat: &FlatStructure, x: &[f64]) -> (f64, f64) {
        let d = PartialJ { inner: self, structure: flat };
        (PartialJ { inner: &d, structure: flat }.eval(x).max_norm(), d.eval(x).max_norm())
    }
    fn anti(&self, flat: &FlatStructure, x: &[f64]) -> (ExteriorElement, ExteriorElement) {
        let d = DolbeaultD::new(self, flat, Dolbeault::Holomorphic);
        let dj = PartialJ { inner: self, structure: flat };
        (
            DolbeaultD::new(&dj, flat, Dolbeault::Holomorphic).eval(x),
            PartialJ { inner: &d, structure: flat }.eval(x),
        )
    }
}

/// Bicomplex identities and the `d₊` ladder correspondence on `ℍⁿ` with
/// random polynomial fields.
pub fn bicomplex_suite(config: &ScenarioConfig) -> VerificationReport {
    let tol = &config.tolerances;
    let n = config.n;
    let mut rng = config.rng(Suite::Bicomplex);
    let count = config.samples;
    let cases: Vec<(Polynomial, PolyForm, usize, usize, Vec<f64>)> = (0..count)
        .map(|idx| {
            let psi = Polynomial::random(4 * n, 4, 6, &mut rng);
            // Total degree ≤ 2 after d₊: θ of degree 0 or 1, every q ≤ deg θ.
            let (deg, q) = [(0, 0), (1, 0), (1, 1)][idx % 3];
            let theta = PolyForm::random_holomorphic(n, deg, 3, &mut rng);
            let x = uniform_point(&mut rng, 4 * n);
            (psi, theta, deg, q, x)
        })
        .collect();
    let rows: Vec<BicomplexRow> =
        cases.par_iter().map(|(psi, theta, deg, q, x)| bicomplex_row(n, psi, theta, *deg, *q, x)).collect();
    let col = |f: fn(&BicomplexRow) -> f64| worst(rows.iter().map(f));
    VerificationReport::new(
        "bicomplex",
        vec![
            Record::residual("bicomplex.dolbeault", "d² = ∂² = ∂̄² = ∂∂̄ + ∂̄∂ = 0", count, col(|r| r.dolbeault), tol.bicomplex),
            Record::residual("bicomplex.del_squared", "∂² = 0", count, col(|r| r.del_squared), tol.bicomplex),
            Record::residual("bicomplex.del_j_squared", "∂_J² = 0", count, col(|r| r.del_j_squared), tol.bicomplex),
            Record::residual("bicomplex.anticommute", "∂∂_J + ∂_J∂ = 0", count, col(|r| r.anticommute), tol.bicomplex),
            Record::residual("bicomplex.ddj_is_r_ddbar", "∂∂_Jψ = 𝓡(√−1∂∂̄ψ)", count, col(|r| r.ddj_r), tol.bicomplex),
            Record::residual("bicomplex.ladder_d_prime", "d′₊ ι_{p,q} = ι_{p+1,q} ∂", count, col(|r| r.ladder_prime), tol.second_order),
            Record::residual(
                "bicomplex.ladder_d_double_prime",
                "d″₊ ι_{p,q} = (q+1) ι_{p,q+1} ∂_J",
                count,
                col(|r| r.ladder_double_prime),
                tol.second_order,
            ),
        ],
    )
}

/// Metric ↔ `Ω` round trips on random strictly q-positive forms on `ℍ`,
/// `ℍ²` and `ℍⁿ`, plus rejection of an indefinite form.
pub fn qpos_suite(config: &ScenarioConfig) -> VerificationReport {
    let tol = &config.tolerances;
    let mut rng = config.rng(Suite::Qpos);
    let mut ns = vec![1usize, 2];
    if config.n > 2 {
        ns.push(config.n);
    }
    let count = config.samples.max(50);
    // (metric round trip, Ω round trip, q-real, margin) per sample; NaN marks a rejected metric.
    let rows: Vec<[f64; 4]> = ns
        .iter()
        .flat_map(|&n| {
            let s = Hypercomplex::flat(n);
            (0..count).map(|_| random_qh_metric(&s, &mut rng)).collect::<Vec<_>>().into_iter().map(move |g| (n, g))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, g)| {
            let s = Hypercomplex::flat(n);
            let round_trip = metric_to_omega(&g, &s).and_then(|o| {
                let g2 = omega_to_metric(&o, &s)?;
                Ok((metric_to_omega(&g2, &s)?, g2, o))
            });
            let Ok((omega2, g2, omega)) = round_trip else {
                return [f64::NAN; 4];
            };
            [
                relative((&g2 - &g).max_abs(), g.max_abs()),
                relative(omega2.distance(&omega), omega.max_norm()),
                relative(q_real_residual(&s, &omega).unwrap_or(f64::NAN), omega.max_norm()),
                q_positive_check(&s, &omega, true).map(|q| q.margin).unwrap_or(f64::NAN),
            ]
        })
        .collect();
    let col = |i: usize| worst(rows.iter().map(|r| r[i]));
    let (metric_rt, omega_rt, q_real) = (col(0), col(1), col(2));
    let margin = least(rows.iter().map(|r| r[3]));
    // ξ_0∧ξ_1 − ξ_2∧ξ_3 is q-real but indefinite and must be rejected.
    let s2 = Hypercomplex::flat(2);
    let indefinite = xi_form(2, 0).wedge(&xi_form(2, 1)).sub(&xi_form(2, 2).wedge(&xi_form(2, 3)));
    let accepted = omega_to_metric(&indefinite, &s2).is_ok() as usize as f64;
    let total = count * ns.len();
    VerificationReport::new(
        "qpos",
        vec![
            Record::residual("qpos.metric_round_trip", "g ↦ Ω ↦ g", total, metric_rt, tol.algebra),
            Record::residual("qpos.omega_round_trip", "Ω ↦ g ↦ Ω", total, omega_rt, tol.algebra),
            Record::residual("qpos.q_real", "J(Ω̄) = Ω", total, q_real, tol.algebra),
            Record::residual("qpos.strict_q_positive", "Ω(x, Jx̄) > 0", total, 0.0, tol.positivity).with_margin(margin),
            Record::residual("qpos.rejects_indefinite", "indefinite q-real form rejected", 1, accepted, 0.0),
        ],
    )
}

fn bundle_points(config: &ScenarioConfig, dim: usize, suite: Suite) -> Vec<Vec<f64>> {
    let mut rng = config.rng(suite);
    (0..config.samples).map(|_| uniform_point(&mut rng, dim)).collect()
}

pub fn bundle_suite(config: &ScenarioConfig) -> Result<VerificationReport, ConfigError> {
    let c = config.connection()?;
    let pts = bundle_points(config, c.base_dim(), Suite::Bundle);
    let tol = config.tolerances.bicomplex;
    Ok(VerificationReport::merge(
        "bundle",
        vec![hyperholomorphic_check(&c, &pts, tol), h_hyperholomorphic_check(&c, &pts, tol), bianchi_check(&c, &pts, tol)],
    ))
}

pub fn totspace_suite(config: &ScenarioConfig) -> Result<VerificationReport, ConfigError> {
    let t = TotalSpaceChart::new(config.connection()?);
    let pts = bundle_points(config, t.dim(), Suite::Totspace);
    Ok(VerificationReport::merge(
        "totspace",
        vec![verify_ddbar_psi(&t, &pts, config.tolerances.second_order), verify_tot_hkt(&t, &pts, &config.tolerances)],
    ))
}

pub fn hopf_suite(config: &ScenarioConfig) -> Result<VerificationReport, ConfigError> {
    let h = HopfData::new(TotalSpaceChart::new(config.connection()?), config.q)
        .map_err(|e| ConfigError::Invalid { field: "q", reason: e.to_string() })?;
    let mut rng = config.rng(Suite::Hopf);
    let pts = fundamental_domain_points(&h, config.samples, &mut rng);
    let seed = rng.gen();
    let tol = &config.tolerances;
    Ok(VerificationReport::merge(
        "hopf",
        vec![
            rho_invariance_check(&h, &pts, seed, tol),
            strict_qpos_check(&h, &pts, config.probes, seed.wrapping_add(1), tol),
            metric_reconstruction_check(&h, &pts, tol),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(bundle: &str) -> ScenarioConfig {
        ScenarioConfig { bundle: bundle.into(), samples: 3, probes: 4, ..Default::default() }
    }

    #[test]
    fn validation_names_the_field() {
        let bad = |f: fn(&mut ScenarioConfig)| {
            let mut c = ScenarioConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(|c| c.n = 0), ConfigError::Invalid { field: "n", .. }));
        assert!(matches!(bad(|c| c.samples = 0), ConfigError::Invalid { field: "samples", .. }));
        assert!(matches!(bad(|c| c.q = 1.0), ConfigError::Invalid { field: "q", .. }));
        assert!(matches!(bad(|c| c.q = -1.0), ConfigError::Invalid { field: "q", .. }));
        assert!(matches!(bad(|c| c.q = 0.0), ConfigError::Invalid { field: "q", .. }));
        assert!(matches!(bad(|c| c.bundle = "nope".into()), ConfigError::Bundle(_)));
        assert!(matches!(bad(|c| c.tolerances.sl2 = f64::NAN), ConfigError::Invalid { field: "tol-sl2", .. }));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn flat_all_passes_and_is_deterministic() {
        let c = small("flat");
        let a = run_suite(&c, Suite::All).unwrap();
        assert!(a.pass, "{}", a.to_text());
        let b = run_suite(&c, Suite::All).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn nonholo_demo_bundle_suite_fails() {
        let r = run_suite(&small("nonholo-demo"), Suite::Bundle).unwrap();
        assert!(!r.pass);
    }
}
