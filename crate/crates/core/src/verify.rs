//! Randomised verification suites. Every trial draws from its own seeded stream, so a report
//! depends only on the configuration.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jb::{
    base_geodesic, chart_ext, connect_residual, connect_type1, equivalent_elements,
    extended_tangent_basis, fiber_sample, jb_spectral, neher_residuals, odd_power_residual,
};
use crate::linalg::{identity, unit, ComplexMatrix, SuperOperator, Tolerance};
use crate::manifold::{
    check_hermitian_connection, check_metric_compatibility, geodesic, phi, phi_closed_form,
    phi_restricted_inverse, riemann_metric, sample_tangent, torsion, BasePoint, VectorField,
};
use crate::peirce::{peirce_projections, verify_peirce_rules, PeirceIndex};
use crate::random::Sampler;
use crate::spectral::{
    signature, spectral_resolution, support, vandermonde_projections, ComponentSignature,
};
use crate::triple::{
    box_op, check_jb_axioms, inner_derivation, is_cstar_derivation, is_triple_derivation, Tripotent,
};

type M = ComplexMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// Worst observed value of one property against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub bound: Bound,
    pub threshold: f64,
    /// Largest (`AtMost`) or smallest (`AtLeast`) value seen; absent without samples.
    pub worst: Option<f64>,
    pub samples: usize,
    /// Samples where the computation itself failed; any error fails the check.
    pub errors: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Peirce,
    Spectral,
    Derivations,
    Manifold,
    Metric,
    Jb,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Axioms,
        Suite::Peirce,
        Suite::Spectral,
        Suite::Derivations,
        Suite::Manifold,
        Suite::Metric,
        Suite::Jb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Peirce => "peirce",
            Suite::Spectral => "spectral",
            Suite::Derivations => "derivations",
            Suite::Manifold => "manifold",
            Suite::Metric => "metric",
            Suite::Jb => "jb",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Suite::Axioms => 1,
            Suite::Peirce => 2,
            Suite::Spectral => 3,
            Suite::Derivations => 4,
            Suite::Manifold => 5,
            Suite::Metric => 6,
            Suite::Jb => 7,
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse_list(name: &str) -> Option<Vec<Suite>> {
        if name == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name)
            .map(|s| vec![s])
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    /// Largest matrix dimension sampled.
    pub dim: usize,
    pub tol: Tolerance<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            dim: 4,
            tol: Tolerance::default(),
        }
    }
}

struct Acc {
    name: &'static str,
    bound: Bound,
    threshold: f64,
    worst: Option<f64>,
    samples: usize,
    errors: usize,
    first_error: Option<String>,
}

impl Acc {
    fn at_most(name: &'static str, threshold: f64) -> Self {
        Self::new(name, Bound::AtMost, threshold)
    }

    fn at_least(name: &'static str, threshold: f64) -> Self {
        Self::new(name, Bound::AtLeast, threshold)
    }

    fn new(name: &'static str, bound: Bound, threshold: f64) -> Self {
        Self {
            name,
            bound,
            threshold,
            worst: None,
            samples: 0,
            errors: 0,
            first_error: None,
        }
    }

    fn fail(&mut self, message: String) {
        self.errors += 1;
        self.first_error.get_or_insert(message);
    }

    fn record(&mut self, value: Result<f64>) {
        match value {
            Ok(x) if x.is_nan() => self.fail("residual is NaN".into()),
            Ok(x) => {
                self.samples += 1;
                self.worst = Some(match (self.worst, self.bound) {
                    (None, _) => x,
                    (Some(w), Bound::AtMost) => w.max(x),
                    (Some(w), Bound::AtLeast) => w.min(x),
                });
            }
            Err(e) => self.fail(e.to_string()),
        }
    }

    fn finish(self) -> CheckReport {
        let within = match (self.worst, self.bound) {
            (None, _) => true,
            (Some(w), Bound::AtMost) => w <= self.threshold,
            (Some(w), Bound::AtLeast) => w >= self.threshold,
        };
        CheckReport {
            name: self.name.to_string(),
            bound: self.bound,
            threshold: self.threshold,
            worst: self.worst,
            samples: self.samples,
            errors: self.errors,
            passed: within && self.errors == 0,
            first_error: self.first_error,
        }
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> SuiteReport {
    let mut warnings = Vec::new();
    if cfg.trials == 0 {
        warnings.push("no trials requested; every check passes vacuously".to_string());
    }
    let dim = cfg.dim.max(1);
    if dim != cfg.dim {
        warnings.push("dimension raised to 1".to_string());
    }
    let ctx = Ctx {
        cfg,
        dim,
        stream: suite.stream(),
    };
    let accs = match suite {
        Suite::Axioms => axioms(&ctx),
        Suite::Peirce => peirce(&ctx),
        Suite::Spectral => spectral(&ctx),
        Suite::Derivations => derivations(&ctx, &mut warnings),
        Suite::Manifold => manifold(&ctx),
        Suite::Metric => metric(&ctx),
        Suite::Jb => jb(&ctx),
    };
    let checks: Vec<CheckReport> = accs.into_iter().map(Acc::finish).collect();
    SuiteReport {
        suite: suite.name().to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        dim: cfg.dim,
        passed: checks.iter().all(|c| c.passed),
        checks,
        warnings,
    }
}

pub fn run_suites(suites: &[Suite], cfg: &SuiteConfig) -> Vec<SuiteReport> {
    suites.iter().map(|&s| run_suite(s, cfg)).collect()
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    dim: usize,
    stream: u64,
}

impl Ctx<'_> {
    fn sampler(&self, trial: usize) -> Sampler {
        Sampler::for_trial(self.cfg.seed, self.stream, trial as u64)
    }

    fn tol(&self) -> &Tolerance<f64> {
        &self.cfg.tol
    }

    fn trials(&self) -> std::ops::Range<usize> {
        0..self.cfg.trials
    }

    /// Dimension in `2..=max(dim, 2)`.
    fn geometric_dim(&self, s: &mut Sampler) -> usize {
        2 + s.index(self.dim.max(2) - 1)
    }
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Normal element with `n ≤ 3` spectral values and total rank below `dim`, so `Z_½(supp a) ≠ 0`.
fn normal_point(s: &mut Sampler, dim: usize) -> M {
    let n = 1 + s.index(3.min(dim - 1));
    let ranks = s.ranks(n, dim - 1);
    let complex = s.index(2) == 1;
    let values: Vec<Complex<f64>> = s.spectrum(n, complex);
    let spec: Vec<(Complex<f64>, usize)> = values.into_iter().zip(ranks).collect();
    s.normal_element(dim, &spec)
}

/// Element of a random component of `p × q` matrices.
fn rectangular_point(s: &mut Sampler, p: usize, q: usize) -> (M, Vec<(f64, usize)>) {
    let m = p.min(q);
    let n = 1 + s.index(m.min(3));
    let ranks = s.ranks(n, m);
    let values: Vec<f64> = s.singular_spectrum(n);
    let spec: Vec<(f64, usize)> = values.into_iter().zip(ranks).collect();
    (s.rectangular_element(p, q, &spec), spec)
}

fn polynomial_field(s: &mut Sampler, dim: usize, tol: &Tolerance<f64>) -> VectorField<f64> {
    let w = || -> [M; 4] { Default::default() };
    let mut coefficients = w();
    for coefficient in coefficients.iter_mut() {
        *coefficient = s.ginibre::<f64>(dim, dim) * c(0.5, 0.0);
    }
    VectorField::polynomial(coefficients, *tol)
}

/// `max |λ_k − μ_k|` for signatures with equal length and ranks in canonical order.
fn signature_distance(a: &ComponentSignature<f64>, b: &ComponentSignature<f64>) -> Result<f64> {
    if a.ranks != b.ranks {
        return Err(Error::DifferentComponents);
    }
    Ok(a.lambda
        .iter()
        .zip(&b.lambda)
        .fold(0.0, |w, (x, y)| w.max((x - y).norm())))
}

fn conjugate_by(u: &M, z: &M) -> M {
    u * z * u.adjoint()
}

fn axioms(ctx: &Ctx<'_>) -> Vec<Acc> {
    let mut linearity = Acc::at_most("axiom1_linearity", 1e-9);
    let mut commutator = Acc::at_most("axiom2_commutator", 1e-9);
    let mut hermitian = Acc::at_most("axiom3_hermitian", 1e-9);
    let mut spectrum = Acc::at_least("axiom3_min_eigenvalue", -1e-9);
    let mut norm = Acc::at_most("axiom4_norm", 1e-9);
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let n = 1 + s.index(ctx.dim);
        let m: [M; 4] = [
            s.ginibre(n, n),
            s.ginibre(n, n),
            s.ginibre(n, n),
            s.ginibre(n, n),
        ];
        match check_jb_axioms(&m[0], &m[1], &m[2], &m[3]) {
            Ok(r) => {
                linearity.record(Ok(r.linearity));
                commutator.record(Ok(r.commutator));
                hermitian.record(Ok(r.hermitian));
                spectrum.record(Ok(r.min_eigenvalue));
                norm.record(Ok(r.norm));
            }
            Err(e) => {
                for acc in [
                    &mut linearity,
                    &mut commutator,
                    &mut hermitian,
                    &mut spectrum,
                    &mut norm,
                ] {
                    acc.record(Err(e.clone()));
                }
            }
        }
    }
    vec![linearity, commutator, hermitian, spectrum, norm]
}

struct PeirceResiduals {
    sum: f64,
    idempotence: f64,
    annihilation: f64,
    eigenvalue: f64,
    rules: f64,
    one_box_zero: f64,
}

fn peirce_trial(s: &mut Sampler, dim: usize, tol: &Tolerance<f64>) -> Result<PeirceResiduals> {
    let p = 1 + s.index(dim);
    let q = 1 + s.index(dim);
    let r = 1 + s.index(p.min(q));
    let e = Tripotent::new(s.partial_isometry::<f64>(p, q, r), tol)?;
    let d = peirce_projections(&e)?;
    let sum =
        d.p1.add(&d.p12)?
            .add(&d.p0)?
            .sub(&SuperOperator::identity((p, q)))?
            .kernel_norm();
    let b = box_op(e.matrix(), e.matrix())?;
    let mut idempotence: f64 = 0.0;
    let mut annihilation: f64 = 0.0;
    let mut eigenvalue: f64 = 0.0;
    for i in PeirceIndex::ALL {
        let pi = d.projection(i);
        idempotence = idempotence.max(pi.compose(pi)?.sub(pi)?.kernel_norm());
        eigenvalue = eigenvalue.max(
            b.compose(pi)?
                .sub(&pi.scale(c(i.value(), 0.0)))?
                .kernel_norm(),
        );
        for j in PeirceIndex::ALL {
            if i != j {
                annihilation = annihilation.max(pi.compose(d.projection(j))?.kernel_norm());
            }
        }
    }
    let rules = verify_peirce_rules(&e, s, 2, tol)?;
    let worst_rule = rules.rules.iter().fold(0.0f64, |w, (_, r)| w.max(*r));
    Ok(PeirceResiduals {
        sum,
        idempotence,
        annihilation,
        eigenvalue,
        rules: worst_rule,
        one_box_zero: rules.one_box_zero,
    })
}

fn peirce(ctx: &Ctx<'_>) -> Vec<Acc> {
    let mut accs = vec![
        Acc::at_most("peirce_sum_identity", 1e-9),
        Acc::at_most("peirce_idempotence", 1e-9),
        Acc::at_most("peirce_annihilation", 1e-9),
        Acc::at_most("peirce_eigenvalue_relation", 1e-9),
        Acc::at_most("peirce_multiplication_rules", 1e-9),
        Acc::at_most("peirce_one_box_zero", 1e-9),
    ];
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        match peirce_trial(&mut s, ctx.dim, ctx.tol()) {
            Ok(r) => {
                let values = [
                    r.sum,
                    r.idempotence,
                    r.annihilation,
                    r.eigenvalue,
                    r.rules,
                    r.one_box_zero,
                ];
                for (acc, v) in accs.iter_mut().zip(values) {
                    acc.record(Ok(v));
                }
            }
            Err(e) => accs.iter_mut().for_each(|acc| acc.record(Err(e.clone()))),
        }
    }
    accs
}

fn spectral(ctx: &Ctx<'_>) -> Vec<Acc> {
    let tol = ctx.tol();
    let mut roundtrip = Acc::at_most("spectral_roundtrip", 1e-9);
    let mut vandermonde = Acc::at_most("vandermonde_vs_eigenprojections", 1e-8);
    let mut algebraic = Acc::at_most("algebraicity", 1e-8);
    let mut covariance = Acc::at_most("support_covariance", 1e-9);
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let d = 1 + s.index(ctx.dim);
        let n = 1 + s.index(d.min(4));
        let ranks = s.ranks(n, d);
        let complex = s.index(2) == 1;
        let values: Vec<Complex<f64>> = s.spectrum(n, complex);
        let spec: Vec<(Complex<f64>, usize)> = values.into_iter().zip(ranks).collect();
        let a: M = s.normal_element(d, &spec);
        let u: M = s.haar_unitary(d);

        let res = spectral_resolution(&a, tol);
        roundtrip.record(
            res.as_ref()
                .map(|r| (r.reconstruct() - &a).norm())
                .map_err(Clone::clone),
        );
        vandermonde.record(res.clone().and_then(|r| {
            let vp = vandermonde_projections(&a, &r.values, tol)?;
            Ok(vp
                .iter()
                .zip(&r.projections)
                .fold(0.0f64, |w, (x, y)| w.max((x - y).norm())))
        }));
        algebraic.record(res.and_then(|r| r.algebraic_residual(&a)));
        covariance.record((|| {
            let h = SuperOperator::sandwich(&u, &u.adjoint());
            let h_inv = SuperOperator::sandwich(&u.adjoint(), &u);
            let moved = Tripotent::new(support(&conjugate_by(&u, &a), tol)?.projection, tol)?;
            let original = Tripotent::new(support(&a, tol)?.projection, tol)?;
            let dm = peirce_projections(&moved)?;
            let d0 = peirce_projections(&original)?;
            let mut worst: f64 = 0.0;
            for k in PeirceIndex::ALL {
                let transported = h.compose(d0.projection(k))?.compose(&h_inv)?;
                worst = worst.max(dm.projection(k).sub(&transported)?.kernel_norm());
            }
            Ok(worst)
        })());
    }
    vec![roundtrip, vandermonde, algebraic, covariance]
}

fn derivations(ctx: &Ctx<'_>, warnings: &mut Vec<String>) -> Vec<Acc> {
    let tol = ctx.tol();
    let mut selfadjoint = Acc::at_most("leibniz_selfadjoint", 1e-10);
    let mut generic = Acc::at_least("leibniz_non_selfadjoint", 1e-4);
    let mut triple = Acc::at_most("triple_derivation", 1e-9);
    let mut skipped = 0;
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let d = ctx.geometric_dim(&mut s);
        let a = normal_point(&mut s, d);
        let samples: Vec<M> = (0..4).map(|_| s.ginibre(d, d)).collect();
        let base = match BasePoint::normal(&a, tol) {
            Ok(b) => b,
            Err(e) => {
                for acc in [&mut selfadjoint, &mut generic, &mut triple] {
                    acc.record(Err(e.clone()));
                }
                continue;
            }
        };
        let leibniz = |u: &M| -> Result<(f64, f64)> {
            let delta = inner_derivation(base.support(), u)?;
            let l = is_cstar_derivation(&delta.op, &samples, tol)?.worst_residual;
            let tr = is_triple_derivation(&delta.op, &samples, tol)?.worst_residual;
            Ok((l, tr))
        };
        let u_sa = sample_tangent(&base, &mut s, true);
        match leibniz(&u_sa) {
            Ok((l, tr)) => {
                selfadjoint.record(Ok(l));
                triple.record(Ok(tr));
            }
            Err(e) => selfadjoint.record(Err(e)),
        }
        let mut u = sample_tangent(&base, &mut s, false);
        let mut tries = 0;
        while (&u - u.adjoint()).norm() < 0.1 && tries < 10 {
            u = sample_tangent(&base, &mut s, false);
            tries += 1;
        }
        if (&u - u.adjoint()).norm() < 0.1 {
            skipped += 1;
            continue;
        }
        match leibniz(&u) {
            Ok((l, tr)) => {
                generic.record(Ok(l));
                triple.record(Ok(tr));
            }
            Err(e) => generic.record(Err(e)),
        }
    }
    if skipped > 0 {
        warnings.push(format!(
            "{skipped} trials found no tangent vector with ‖u − u*‖ ≥ 0.1"
        ));
    }
    vec![selfadjoint, generic, triple]
}

/// `−½ Σ λ_k u_k`.
fn velocity_closed_form(base: &BasePoint<f64>, u: &M) -> M {
    let (p, q) = base.shape();
    base.decompose(u)
        .iter()
        .zip(base.values())
        .fold(DMatrix::zeros(p, q), |acc, (uk, l)| {
            acc + uk * (*l * c(-0.5, 0.0))
        })
}

/// Number of sampled times at which `signature(γ(t))` differs from `signature(a)`.
fn signature_mismatches(a: &M, u: &M, tol: &Tolerance<f64>) -> Result<f64> {
    let g = geodesic(a, u, tol)?;
    let sa = signature(a, tol)?;
    let mut count = 0usize;
    for t in [-2.0, -1.0, 0.5, 1.0, 2.0] {
        let same = signature(&g.point(t)?, tol)
            .ok()
            .and_then(|sg| signature_distance(&sa, &sg).ok())
            .is_some_and(|d| d <= tol.cluster_radius());
        count += (!same) as usize;
    }
    Ok(count as f64)
}

fn manifold(ctx: &Ctx<'_>) -> Vec<Acc> {
    let tol = ctx.tol();
    let h = 1e-4;
    let mut closed = Acc::at_most("phi_closed_form", 1e-10);
    let mut inverse = Acc::at_most("phi_inverse_roundtrip", 1e-10);
    let mut origin = Acc::at_most("geodesic_origin", 0.0);
    let mut velocity = Acc::at_most("geodesic_velocity", 10.0 * h * h);
    let mut residual = Acc::at_most("geodesic_residual", 1e-6);
    let mut sig = Acc::at_most("geodesic_signature", 0.0);
    let mut sig_sa = Acc::at_most("geodesic_signature_selfadjoint", 0.0);
    let mut rotation = Acc::at_most("geodesic_closed_form", 1e-9);
    let mut tors = Acc::at_most("torsion", 1e-4);
    let mut tors_single = Acc::at_most("torsion_single_value", 1e-4);

    if ctx.cfg.trials > 0 {
        rotation.record((|| {
            let a = unit::<f64>(2, 2, 0, 0);
            let u = unit::<f64>(2, 2, 0, 1) + unit::<f64>(2, 2, 1, 0);
            let g = geodesic(&a, &u, tol)?;
            Ok((g.point(std::f64::consts::PI)? - unit::<f64>(2, 2, 1, 1)).norm())
        })());
    }

    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let d = ctx.geometric_dim(&mut s);
        let a = normal_point(&mut s, d);
        let base = match BasePoint::normal(&a, tol) {
            Ok(b) => b,
            Err(e) => {
                closed.record(Err(e));
                continue;
            }
        };
        let v_parts: Vec<M> = base
            .tripotents()
            .iter()
            .map(|e| {
                let hm: M = s.hermitian(d);
                e * hm * e
            })
            .collect();
        let v = v_parts.iter().fold(M::zeros(d, d), |acc, x| acc + x);
        let u = sample_tangent(&base, &mut s, false);
        let x = &v * c(0.0, 1.0) + &u;
        closed.record(
            phi(&a, &x, tol).map(|direct| (direct - phi_closed_form(&base, &v_parts, &u)).norm()),
        );

        let y = sample_tangent(&base, &mut s, false) * c(2.0, 0.0);
        inverse.record((|| {
            let x = phi_restricted_inverse(&a, &y, tol)?;
            Ok((phi(&a, &x, tol)? - &y).norm())
        })());

        match geodesic(&a, &u, tol) {
            Ok(g) => {
                origin.record(g.point(0.0).map(|p| (p - &a).norm()));
                velocity.record((|| {
                    let fd = (g.point(h)? - g.point(-h)?) / c(2.0 * h, 0.0);
                    Ok((fd - velocity_closed_form(&base, &u)).norm())
                })());
                residual.record((|| {
                    let mut worst: f64 = 0.0;
                    for k in 0..=8 {
                        worst = worst.max(g.residual(-2.0 + 0.5 * k as f64, h)?);
                    }
                    Ok(worst)
                })());
            }
            Err(e) => origin.record(Err(e)),
        }
        sig.record(signature_mismatches(&a, &u, tol));
        let u_sa = sample_tangent(&base, &mut s, true);
        sig_sa.record(signature_mismatches(&a, &u_sa, tol));

        let dim_fields = d.min(4);
        let b = normal_point(&mut s, dim_fields);
        let fx = polynomial_field(&mut s, dim_fields, tol);
        let fy = polynomial_field(&mut s, dim_fields, tol);
        tors.record(torsion(&fx, &fy, &b, tol).map(|z| z.norm()));

        let complex = s.index(2) == 1;
        let lambda = s.spectrum::<f64>(1, complex)[0];
        let r = 1 + s.index(dim_fields - 1);
        let single: M = s.normal_element(dim_fields, &[(lambda, r)]);
        tors_single.record(torsion(&fx, &fy, &single, tol).map(|z| z.norm()));
    }
    vec![
        closed,
        inverse,
        origin,
        velocity,
        residual,
        sig,
        sig_sa,
        rotation,
        tors,
        tors_single,
    ]
}

fn metric(ctx: &Ctx<'_>) -> Vec<Acc> {
    let tol = ctx.tol();
    let mut compat = Acc::at_most("metric_compatibility", 1e-4);
    let mut hermitian = Acc::at_most("hermitian_connection", 1e-8);
    let mut positive = Acc::at_least("metric_positivity", 0.0);
    let mut symmetric = Acc::at_most("metric_hermitian_symmetry", 1e-12);
    let mut inv_geodesic = Acc::at_most("invariance_geodesic", 1e-9);
    let mut inv_metric = Acc::at_most("invariance_metric", 1e-9);
    let mut inv_signature = Acc::at_most("invariance_signature", 1e-9);
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let d = ctx.geometric_dim(&mut s).min(4);
        let a = normal_point(&mut s, d);
        let fx = polynomial_field(&mut s, d, tol);
        let fy = polynomial_field(&mut s, d, tol);
        let fw = polynomial_field(&mut s, d, tol);
        compat.record(check_metric_compatibility(&fx, &fy, &fw, &a, tol));
        hermitian.record(check_hermitian_connection(&fx, &fy, &a, tol));

        let d = ctx.geometric_dim(&mut s);
        let a = normal_point(&mut s, d);
        let base = match BasePoint::normal(&a, tol) {
            Ok(b) => b,
            Err(e) => {
                positive.record(Err(e));
                continue;
            }
        };
        let u = sample_tangent(&base, &mut s, false);
        let v = sample_tangent(&base, &mut s, false);
        positive.record(riemann_metric(&a, &u, &u, tol).map(|(_, g)| g));
        symmetric.record((|| {
            let (uv, _) = riemann_metric(&a, &u, &v, tol)?;
            let (vu, _) = riemann_metric(&a, &v, &u, tol)?;
            Ok((uv - vu.conj()).norm())
        })());

        let w: M = s.haar_unitary(d);
        let (ua, uu, uv) = (
            conjugate_by(&w, &a),
            conjugate_by(&w, &u),
            conjugate_by(&w, &v),
        );
        inv_geodesic.record((|| {
            let g1 = geodesic(&a, &u, tol)?;
            let g2 = geodesic(&ua, &uu, tol)?;
            let mut worst: f64 = 0.0;
            for t in [-1.5, 0.7, 2.0] {
                worst = worst.max((conjugate_by(&w, &g1.point(t)?) - g2.point(t)?).norm());
            }
            Ok(worst)
        })());
        inv_metric.record((|| {
            let (g1, _) = riemann_metric(&a, &u, &v, tol)?;
            let (g2, _) = riemann_metric(&ua, &uu, &uv, tol)?;
            Ok((g1 - g2).norm())
        })());
        inv_signature.record((|| {
            signature_distance(&signature(&a, tol)?, &signature(&ua, tol)?)
        })());
    }
    vec![
        compat,
        hermitian,
        positive,
        symmetric,
        inv_geodesic,
        inv_metric,
        inv_signature,
    ]
}

/// Second tripotent for a Neher comparison: equivalent, unrelated, nearby or phase-rotated.
fn neher_partner(
    s: &mut Sampler,
    e: &M,
    rank: usize,
    kind: usize,
    tol: &Tolerance<f64>,
) -> Result<M> {
    let (p, q) = e.shape();
    Ok(match kind % 4 {
        0 => {
            let w: M = s.haar_unitary(rank);
            jb_spectral(e, tol)?.from_peirce_one_coordinates(0, &w)
        }
        1 => s.partial_isometry(p, q, rank),
        2 => {
            let eps = s.uniform(0.0, 0.05);
            let gp: M = s.ginibre(p, p);
            let gq: M = s.ginibre(q, q);
            let small = |g: M| crate::linalg::mat_exp(&((&g - g.adjoint()) * c(eps, 0.0)));
            small(gp)? * e * small(gq)?
        }
        _ => e * Complex::from_polar(1.0, s.uniform(0.0, std::f64::consts::TAU)),
    })
}

fn jb(ctx: &Ctx<'_>) -> Vec<Acc> {
    let tol = ctx.tol();
    let mut roundtrip = Acc::at_most("jb_roundtrip", 1e-9);
    let mut orthogonality = Acc::at_most("jb_orthogonality", 1e-9);
    let mut odd = Acc::at_most("odd_power", 1e-8);
    let mut connect = Acc::at_most("connect_type1", 1e-9);
    let mut neher = Acc::at_most("neher_disagreements", 0.0);
    let mut phase = Acc::at_most("fiber_moves_stay_equivalent", 0.0);
    let mut half = Acc::at_most("half_moves_break_equivalence", 0.0);
    let mut factorization = Acc::at_most("fiber_factorization", 1e-8);
    let mut circle = Acc::at_most("fiber_unit_circle", 1e-8);
    let mut base_res = Acc::at_most("base_geodesic_residual", 1e-6);
    let i = c(0.0, 1.0);
    for t in ctx.trials() {
        let mut s = ctx.sampler(t);
        let p = 1 + s.index(ctx.dim);
        let q = 1 + s.index(ctx.dim);

        let a: M = s.ginibre(p, q);
        match jb_spectral(&a, tol) {
            Ok(r) => {
                roundtrip.record(Ok((r.reconstruct() - &a).norm()));
                orthogonality.record(Ok(r.orthogonality_residual()));
                odd.record(
                    (0..=3).try_fold(0.0f64, |w, l| Ok(w.max(odd_power_residual(&a, &r, l)?))),
                );
            }
            Err(e) => roundtrip.record(Err(e)),
        }

        let (a, spec) = rectangular_point(&mut s, p, q);
        let b: M = s.rectangular_element(p, q, &spec);
        connect.record(connect_type1(&a, &b, tol).map(|(u, v)| {
            let unitary = (u.adjoint() * &u - identity::<f64>(q))
                .norm()
                .max((v.adjoint() * &v - identity::<f64>(p)).norm());
            connect_residual(&a, &b, &u, &v).max(unitary)
        }));

        for pair in 0..2 {
            neher.record((|| {
                let r = 1 + s.index(p.min(q));
                let e: M = s.partial_isometry(p, q, r);
                let f = neher_partner(&mut s, &e, r, 2 * t + pair, tol)?;
                let check = neher_residuals(&Tripotent::new(e, tol)?, &Tripotent::new(f, tol)?)?;
                let bound = tol.bound(1.0);
                Ok(
                    ((check.box_residual <= bound) != (check.peirce_residual <= bound)) as usize
                        as f64,
                )
            })());
        }

        let fiber = (|| -> Result<(f64, f64, f64, Option<f64>)> {
            let basis = extended_tangent_basis(&a, tol)?;
            let res = basis.resolution();
            let v = (0..res.len()).fold(M::zeros(p, q), |acc, k| {
                let hm: M = s.hermitian(res.ranks[k]);
                acc + res.from_peirce_one_coordinates(k, &hm)
            });
            let time = s.uniform(-5.0, 5.0);
            let sample = fiber_sample(&a, &v, time, tol)?;
            let stays = equivalent_elements(&a, &sample.point, tol)?
                && equivalent_elements(&a, &chart_ext(&a, &(&v * i), tol)?, tol)?;
            let breaks = if basis.half.is_empty() {
                None
            } else {
                let u = basis
                    .half
                    .iter()
                    .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
                let u = &u * c(0.2 / u.norm(), 0.0);
                let moved = chart_ext(&a, &(&u + &v * i), tol)?;
                Some((equivalent_elements(&a, &moved, tol)?) as usize as f64)
            };
            Ok((
                (!stays) as usize as f64,
                sample.factorization_residual,
                sample
                    .unit_circle_residual
                    .max(sample.jordan_unit_residual)
                    .max(sample.membership_residual),
                breaks,
            ))
        })();
        match fiber {
            Ok((stay, fact, unit_circle, breaks)) => {
                phase.record(Ok(stay));
                factorization.record(Ok(fact));
                circle.record(Ok(unit_circle));
                if let Some(b) = breaks {
                    half.record(Ok(b));
                }
            }
            Err(e) => phase.record(Err(e)),
        }

        base_res.record((|| {
            let basis = extended_tangent_basis(&a, tol)?;
            if basis.half.is_empty() {
                return Ok(0.0);
            }
            let u = basis
                .half
                .iter()
                .fold(M::zeros(p, q), |acc, w| acc + w * c(s.gaussian(), 0.0));
            let g = base_geodesic(&a, &u, tol)?;
            let mut worst: f64 = 0.0;
            for k in 0..=4 {
                worst = worst.max(g.residual(-2.0 + k as f64, 1e-4)?);
            }
            Ok(worst)
        })());
    }
    vec![
        roundtrip,
        orthogonality,
        odd,
        connect,
        neher,
        phase,
        half,
        factorization,
        circle,
        base_res,
    ]
}
