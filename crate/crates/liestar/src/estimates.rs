//! Randomized verification harness for the continuity estimates of the
//! star products and for holomorphy in ħ.
//!
//! Every inequality is checked one-sidedly soundly: the left side is a
//! certified upper bound (interval upper), the right side a lower bound
//! obtained from truncated partial sums, so a reported pass cannot be an
//! artifact of truncation.

use crate::arith::{rat_i64, GaussianRational, Rational, Scalar};
use crate::error::LiestarError;
use crate::lie::{fixtures as lie_fixtures, LieAlgebra};
use crate::observable::Observable;
use crate::repfun::{
    fixtures as rep_fixtures, GroupElement, OrbitModule, RepFunction, SeminormOptions,
};
use crate::sym::{Monomial, SymPoly};
use crate::linalg::QMat;
use num_complex::Complex64;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Inequalities from the continuity theory, one variant per spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    /// p_{R′,c′}(ξ ⋆_𝔤 η) ≤ p_{R′,c̃′}(ξ)·p_{R′,c̃′}(η) with c̃′ = 32(ħ+1)c′.
    GuttProduct,
    /// (q_{R,c}⊗p_{R′,c′})((1⊗ξ)⋆(φ⊗1)) ≤ 2·p_{R′,d′}(ξ)·q_{R,2c}(φ),
    /// d′ = max{2ħ, c′}.
    MixedProduct,
    /// (q_{R,c}⊗p_{R′,c′})(P⋆Q) ≤ 2·(q⊗p)_{d}(P)·(q⊗p)_{d}(Q) with the
    /// composed weight d.
    FullProduct,
    /// p_{R′,c′}(v ∨ w) ≤ p_{R′,2^{R′}c′}(v)·p_{R′,2^{R′}c′}(w).
    SymProduct,
    /// q_{R,c}(φψ) ≤ q_{R,2^Rc}(φ)·q_{R,2^Rc}(ψ).
    EntireMultiplication,
    /// q_{R,c}(L_{X_ξ}φ) ≤ ‖ξ‖_∞·q_{R,c+1}(φ).
    EntireDifferentiation,
    /// q_{R,c}(φ∘r_{exp ξ}) ≤ q_{R,c+‖ξ‖_∞}(φ).
    Translation,
    /// q_{R,c}(Φ*φ) ≤ q_{R,cnD}(φ) for a morphism with tangent-map supnorm D.
    Pullback,
    /// Maj_{φψ}(c) ≤ Maj_φ(c)·Maj_ψ(c).
    Leibniz,
    /// q_{R,c}(φ) ≤ Δ·‖φ‖·Σ_k k!^{R−1}(cΨn)^k for representative functions.
    RepEntire,
}

impl EstimateKind {
    pub fn all() -> [EstimateKind; 10] {
        use EstimateKind::*;
        [
            GuttProduct,
            MixedProduct,
            FullProduct,
            SymProduct,
            EntireMultiplication,
            EntireDifferentiation,
            Translation,
            Pullback,
            Leibniz,
            RepEntire,
        ]
    }

    pub fn name(&self) -> &'static str {
        use EstimateKind::*;
        match self {
            GuttProduct => "gutt_product",
            MixedProduct => "mixed_product",
            FullProduct => "full_product",
            SymProduct => "sym_product",
            EntireMultiplication => "entire_multiplication",
            EntireDifferentiation => "entire_differentiation",
            Translation => "translation",
            Pullback => "pullback",
            Leibniz => "leibniz",
            RepEntire => "rep_entire",
        }
    }
}

/// One parameter point of the verification grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub r: f64,
    pub rp: f64,
    pub c: f64,
    pub cp: f64,
    pub hbar: f64,
}

/// An inequality together with a parameter point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EstimateSpec {
    pub kind: EstimateKind,
    pub point: GridPoint,
}

impl EstimateSpec {
    /// Parameter preconditions under which the paper states the estimate.
    pub fn applicable(&self) -> bool {
        let p = &self.point;
        match self.kind {
            EstimateKind::GuttProduct => p.rp >= 1.0 && p.cp >= 1.0,
            EstimateKind::MixedProduct => p.r + p.rp >= 1.0 && p.c >= 1.0 && p.cp >= 1.0,
            EstimateKind::FullProduct => {
                p.r >= 0.0 && p.rp >= 1.0 && p.c >= 1.0 && p.cp >= 1.0
            }
            EstimateKind::SymProduct => p.rp >= 0.0,
            EstimateKind::EntireMultiplication
            | EstimateKind::EntireDifferentiation
            | EstimateKind::Translation
            | EstimateKind::Pullback => p.r >= 0.0,
            EstimateKind::Leibniz => true,
            EstimateKind::RepEntire => p.r < 1.0,
        }
    }

    /// The parameters the inequality actually depends on, for grid
    /// deduplication.
    pub fn dedupe_key(&self) -> String {
        let p = &self.point;
        match self.kind {
            EstimateKind::GuttProduct | EstimateKind::SymProduct => {
                format!("{};{};{}", p.rp, p.cp, p.hbar)
            }
            EstimateKind::MixedProduct | EstimateKind::FullProduct => {
                format!("{};{};{};{};{}", p.r, p.rp, p.c, p.cp, p.hbar)
            }
            EstimateKind::Leibniz => format!("{};{}", p.c, p.hbar),
            _ => format!("{};{};{}", p.r, p.c, p.hbar),
        }
    }

    /// Human-readable right-hand-side constants.
    pub fn constants(&self) -> String {
        let p = &self.point;
        match self.kind {
            EstimateKind::GuttProduct => {
                format!("ctilde' = 32(hbar+1)c' = {}", 32.0 * (p.hbar + 1.0) * p.cp)
            }
            EstimateKind::MixedProduct => {
                format!("d' = max(2 hbar, c') = {}", (2.0 * p.hbar).max(p.cp))
            }
            EstimateKind::FullProduct => format!("d = {}", composed_d(p)),
            _ => String::new(),
        }
    }
}

/// Composed weight for the full continuity estimate: the function side
/// contributes 2^{R+1}c through the pointwise-product and mixed steps, the
/// momentum side 32(ħ+1)·2^{R′}c′ through the Gutt step, and the mixed
/// step needs at least 2ħ.
pub fn composed_d(p: &GridPoint) -> f64 {
    let momentum = 32.0 * (p.hbar + 1.0) * 2f64.powf(p.rp) * p.cp;
    let function = 2f64.powf(p.r + 1.0) * p.c;
    momentum.max(function).max(2.0 * p.hbar).max(1.0)
}

/// Rounding allowance for deciding LHS ≤ RHS from directed f64 bounds:
/// genuine equality cases (e.g. products of constants) would otherwise be
/// undecidable. The allowance is ten orders of magnitude below the slack
/// in every verified constant.
fn passes(lhs_upper: f64, rhs_lower: f64) -> bool {
    lhs_upper <= rhs_lower + 1e-8 * (lhs_upper.abs() + rhs_lower.abs()) + 1e-300
}

/// Result of one randomized trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub description: String,
    pub lhs_upper: f64,
    pub rhs_lower: f64,
    pub pass: bool,
    pub margin: f64,
}

/// Aggregate over all trials of one spec at one parameter point.
#[derive(Clone, Debug, Serialize)]
pub struct AggregateReport {
    pub name: String,
    pub constants: String,
    pub point: GridPoint,
    pub trials: usize,
    pub failures: usize,
    pub uncertified: usize,
    /// Trials decided only through the rounding allowance.
    pub borderline: usize,
    pub pass: bool,
    pub worst_margin: f64,
    pub median_ratio: f64,
    pub counterexample: Option<TrialReport>,
}

/// Shape constraints for randomized instances.
#[derive(Clone, Copy, Debug)]
pub struct Profile {
    pub max_algebra_dim: usize,
    pub max_sym_degree: usize,
    pub max_terms: usize,
    /// Restrict coefficient functions to nilpotent orbit modules, needed
    /// for certified seminorms at R ≥ 1.
    pub nilpotent_only: bool,
}

impl Profile {
    pub fn desk() -> Self {
        Profile {
            max_algebra_dim: 4,
            max_sym_degree: 3,
            max_terms: 2,
            nilpotent_only: false,
        }
    }

    pub fn small(nilpotent_only: bool) -> Self {
        Profile {
            max_algebra_dim: 3,
            max_sym_degree: 2,
            max_terms: 1,
            nilpotent_only,
        }
    }
}

/// A reproducible random fixture set.
pub struct Instance {
    pub algebra: Arc<LieAlgebra>,
    pub rep_functions: Vec<RepFunction>,
    pub sym_polys: Vec<SymPoly>,
    pub observables: Vec<Observable>,
}

fn rand_rat(rng: &mut StdRng) -> Rational {
    rat_i64(rng.gen_range(-2..=2), rng.gen_range(1..=2))
}

fn rand_nonzero_rat(rng: &mut StdRng) -> Rational {
    let mut q = rand_rat(rng);
    while num_traits::Zero::is_zero(&q) {
        q = rand_rat(rng);
    }
    q
}

fn rand_scalar(rng: &mut StdRng) -> Scalar {
    Scalar::constant(GaussianRational::new(rand_rat(rng), rand_rat(rng)))
}

fn nilpotent_abelian_module(rng: &mut StdRng, n: usize) -> Arc<OrbitModule> {
    // Commuting nilpotent generators: rational multiples of E₁₂.
    let gens = (0..n)
        .map(|_| {
            let mut g = QMat::zeros(2, 2);
            g.set(0, 1, GaussianRational::from_rational(rand_rat(rng)));
            g
        })
        .collect();
    Arc::new(OrbitModule::new(gens))
}

fn diagonal_abelian_module(rng: &mut StdRng, n: usize) -> Arc<OrbitModule> {
    let gens = (0..n)
        .map(|_| {
            let mut g = QMat::zeros(2, 2);
            g.set(0, 0, GaussianRational::from_rational(rat_i64(rng.gen_range(-1..=1), 2)));
            g.set(1, 1, GaussianRational::from_rational(rat_i64(rng.gen_range(-1..=1), 2)));
            g
        })
        .collect();
    Arc::new(OrbitModule::new(gens))
}

/// Pick an algebra and a matching orbit-module pool.
fn algebra_and_modules(profile: &Profile, rng: &mut StdRng) -> (Arc<LieAlgebra>, Vec<Arc<OrbitModule>>) {
    if profile.nilpotent_only {
        // Heisenberg or abelian with nilpotent generator matrices.
        match rng.gen_range(0..3) {
            0 => {
                let alg = lie_fixtures::heisenberg();
                (alg, vec![rep_fixtures::heisenberg_module()])
            }
            1 => {
                let alg = lie_fixtures::abelian(2);
                let m = nilpotent_abelian_module(rng, 2);
                (alg, vec![m])
            }
            _ => {
                let alg = lie_fixtures::heisenberg4();
                // Heisenberg module padded with a vanishing fourth generator.
                let base = rep_fixtures::heisenberg_module();
                let mut gens: Vec<QMat> = (0..3).map(|i| base.gen(i).clone()).collect();
                gens.push(QMat::zeros(3, 3));
                (alg, vec![Arc::new(OrbitModule::new(gens))])
            }
        }
    } else {
        let pick = rng.gen_range(0..5).min(profile.max_algebra_dim.max(2));
        match pick {
            0 => {
                let alg = lie_fixtures::abelian(rng.gen_range(1..=2));
                let n = alg.dim();
                let m = if rng.gen_bool(0.5) {
                    diagonal_abelian_module(rng, n)
                } else {
                    nilpotent_abelian_module(rng, n)
                };
                (alg, vec![m])
            }
            1 => {
                let alg = lie_fixtures::heisenberg();
                (
                    alg,
                    vec![rep_fixtures::heisenberg_module()],
                )
            }
            2 => {
                let alg = lie_fixtures::so3();
                (alg, vec![rep_fixtures::su2_module()])
            }
            3 => {
                let alg = lie_fixtures::affine2();
                (alg, vec![rep_fixtures::affine2_module()])
            }
            _ => {
                if profile.max_algebra_dim >= 4 {
                    let alg = lie_fixtures::so3_plus_r();
                    let base = rep_fixtures::su2_module();
                    let mut gens: Vec<QMat> = (0..3).map(|i| base.gen(i).clone()).collect();
                    let mut central = QMat::zeros(2, 2);
                    let lam = GaussianRational::new(Rational::zero(), rat_i64(1, 2));
                    central.set(0, 0, lam.clone());
                    central.set(1, 1, lam);
                    gens.push(central);
                    (alg, vec![Arc::new(OrbitModule::new(gens))])
                } else {
                    let alg = lie_fixtures::so3();
                    (alg, vec![rep_fixtures::su2_module()])
                }
            }
        }
    }
}

fn random_rep(rng: &mut StdRng, modules: &[Arc<OrbitModule>]) -> RepFunction {
    let module = modules[rng.gen_range(0..modules.len())].clone();
    let m = module.dim();
    loop {
        let v: Vec<Scalar> = (0..m).map(|_| rand_scalar(rng)).collect();
        let delta: Vec<Scalar> = (0..m).map(|_| rand_scalar(rng)).collect();
        if v.iter().all(|s| s.is_zero()) || delta.iter().all(|s| s.is_zero()) {
            continue;
        }
        return RepFunction::new(module, v, delta);
    }
}

fn random_monomial(rng: &mut StdRng, dim: usize, max_deg: usize) -> Monomial {
    let d = rng.gen_range(0..=max_deg);
    Monomial::from_indices((0..d).map(|_| rng.gen_range(0..dim)).collect())
}

fn random_sympoly(rng: &mut StdRng, dim: usize, max_deg: usize, terms: usize) -> SymPoly {
    let mut p = SymPoly::zero(dim);
    for _ in 0..terms {
        p.add_term(random_monomial(rng, dim, max_deg), &rand_scalar(rng));
    }
    if p.is_zero() {
        p.add_term(Monomial::unit(), &Scalar::one());
    }
    p
}

/// Deterministic fixture generator; identical seeds give identical
/// instances.
pub fn random_instance(profile: &Profile, seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let (algebra, modules) = algebra_and_modules(profile, &mut rng);
    let n = algebra.dim();
    let rep_functions: Vec<RepFunction> =
        (0..3).map(|_| random_rep(&mut rng, &modules)).collect();
    let sym_polys: Vec<SymPoly> = (0..3)
        .map(|_| random_sympoly(&mut rng, n, profile.max_sym_degree, 2))
        .collect();
    let observables: Vec<Observable> = (0..2)
        .map(|_| {
            let mut o = Observable::zero(algebra.clone());
            for _ in 0..rng.gen_range(1..=profile.max_terms) {
                o.add_term(
                    random_monomial(&mut rng, n, profile.max_sym_degree),
                    random_rep(&mut rng, &modules),
                );
            }
            o
        })
        .collect();
    Instance {
        algebra,
        rep_functions,
        sym_polys,
        observables,
    }
}

fn suite_opts() -> SeminormOptions {
    SeminormOptions {
        node_budget: 40_000,
        max_exact_degree: 18,
        degree_cap: 400,
        abs_tol: 1e-12,
        rel_tol: 1e-12,
    }
}

/// Robust q lower bound: certified interval when available, truncated
/// partial sums otherwise.
fn q_lower(phi: &RepFunction, r: f64, c: f64, hbar: Complex64) -> f64 {
    let num = phi.to_numeric(hbar);
    match num.seminorm_q_opts(r, c, &suite_opts()) {
        Ok(iv) => iv.lower,
        Err(_) => num.seminorm_q_lower(r, c, 150),
    }
}

fn cross_upper(
    o: &Observable,
    r: f64,
    c: f64,
    rp: f64,
    cp: f64,
    hbar: Complex64,
) -> Result<f64, LiestarError> {
    let mut acc = 0.0;
    for (m, phi) in o.terms() {
        let q = phi.to_numeric(hbar).seminorm_q_opts(r, c, &suite_opts())?;
        let w = crate::sym::factorial_pow_f64(m.degree(), rp) * cp.powi(m.degree() as i32);
        acc += q.upper * w * (1.0 + 1e-14);
    }
    Ok(acc)
}

fn cross_lower(o: &Observable, r: f64, c: f64, rp: f64, cp: f64, hbar: Complex64) -> f64 {
    let mut acc = 0.0;
    for (m, phi) in o.terms() {
        let q = q_lower(phi, r, c, hbar);
        let w = crate::sym::factorial_pow_f64(m.degree(), rp) * cp.powi(m.degree() as i32);
        acc += q * w;
    }
    acc.min(1e290)
}

struct TrialOutcome {
    lhs_upper: f64,
    rhs_lower: f64,
    description: String,
    uncertified: bool,
}

fn run_trial(spec: &EstimateSpec, seed: u64) -> Result<TrialOutcome, LiestarError> {
    let p = spec.point;
    let hb = Complex64::new(p.hbar, 0.0);
    let nil = p.r >= 1.0 || (spec.kind == EstimateKind::MixedProduct && p.r + p.rp > 1.0 && p.r >= 1.0);
    match spec.kind {
        EstimateKind::GuttProduct => {
            let inst = random_instance(&Profile::desk(), seed);
            let xi = &inst.sym_polys[0];
            let eta = &inst.sym_polys[1];
            let prod = crate::pbw::gutt_star(&inst.algebra, xi, eta);
            let lhs = prod.seminorm_p(p.rp, p.cp, hb)? * (1.0 + 1e-11);
            let ct = 32.0 * (p.hbar + 1.0) * p.cp;
            let rhs = xi.seminorm_p(p.rp, ct, hb)? * eta.seminorm_p(p.rp, ct, hb)?
                * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: format!("{} deg {:?}x{:?}", inst.algebra.name(), xi.degree(), eta.degree()),
                uncertified: false,
            })
        }
        EstimateKind::SymProduct => {
            let inst = random_instance(&Profile::desk(), seed);
            let v = &inst.sym_polys[0];
            let w = &inst.sym_polys[1];
            let prod = v.sym_multiply(w)?;
            let lhs = prod.seminorm_p(p.rp, p.cp, hb)? * (1.0 + 1e-11);
            let cw = 2f64.powf(p.rp) * p.cp;
            let rhs = v.seminorm_p(p.rp, cw, hb)? * w.seminorm_p(p.rp, cw, hb)? * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: inst.algebra.name().to_string(),
                uncertified: false,
            })
        }
        EstimateKind::MixedProduct => {
            let inst = random_instance(&Profile::small(nil), seed);
            let xi = &inst.sym_polys[0];
            let phi = &inst.rep_functions[0];
            let f = Observable::from_sympoly(inst.algebra.clone(), xi);
            let g = Observable::pi_lift(inst.algebra.clone(), phi.clone());
            let prod = f.star_std(&g)?;
            let lhs = cross_upper(&prod, p.r, p.c, p.rp, p.cp, hb)?;
            let dprime = (2.0 * p.hbar).max(p.cp);
            let rhs = 2.0
                * xi.seminorm_p(p.rp, dprime, hb)?
                * q_lower(phi, p.r, 2.0 * p.c, hb)
                * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: format!("{} deg {:?}", inst.algebra.name(), xi.degree()),
                uncertified: false,
            })
        }
        EstimateKind::FullProduct => {
            let inst = random_instance(&Profile::small(nil), seed);
            let fo = &inst.observables[0];
            let go = &inst.observables[1];
            let prod = fo.star_std(go)?;
            let lhs = cross_upper(&prod, p.r, p.c, p.rp, p.cp, hb)?;
            let d = composed_d(&p);
            let rhs = 2.0
                * cross_lower(fo, p.r, d, p.rp, d, hb)
                * cross_lower(go, p.r, d, p.rp, d, hb)
                * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: format!(
                    "{} terms {}x{}",
                    inst.algebra.name(),
                    fo.num_terms(),
                    go.num_terms()
                ),
                uncertified: false,
            })
        }
        EstimateKind::EntireMultiplication | EstimateKind::Leibniz => {
            let inst = random_instance(&Profile::small(nil), seed);
            let phi = &inst.rep_functions[0];
            let psi = &inst.rep_functions[1];
            let prod = phi.multiply(psi);
            let (r, factor) = if spec.kind == EstimateKind::Leibniz {
                (0.0, 1.0)
            } else {
                (p.r, 2f64.powf(p.r))
            };
            let lhs = prod
                .to_numeric(hb)
                .seminorm_q_opts(r, p.c, &suite_opts())?
                .upper;
            let rhs = q_lower(phi, r, factor * p.c, hb) * q_lower(psi, r, factor * p.c, hb)
                * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: inst.algebra.name().to_string(),
                uncertified: false,
            })
        }
        EstimateKind::EntireDifferentiation => {
            let inst = random_instance(&Profile::small(nil), seed);
            let phi = &inst.rep_functions[0];
            let mut rng = StdRng::seed_from_u64(seed ^ 0xD1FF);
            let xi: Vec<Rational> = (0..inst.algebra.dim())
                .map(|_| rand_nonzero_rat(&mut rng))
                .collect();
            let xin = xi
                .iter()
                .map(|q| num_traits::ToPrimitive::to_f64(q).unwrap().abs())
                .fold(0.0, f64::max);
            let d = phi.lie_derive(&xi)?;
            let lhs = d.to_numeric(hb).seminorm_q_opts(p.r, p.c, &suite_opts())?.upper;
            let rhs = xin * q_lower(phi, p.r, p.c + 1.0, hb) * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: inst.algebra.name().to_string(),
                uncertified: false,
            })
        }
        EstimateKind::Translation => {
            let inst = random_instance(&Profile::small(nil), seed);
            let phi = &inst.rep_functions[0];
            let mut rng = StdRng::seed_from_u64(seed ^ 0x7A55);
            let xi: Vec<f64> = (0..inst.algebra.dim())
                .map(|_| (rng.gen_range(-8..=8i32) as f64) / 8.0)
                .collect();
            let xin = xi.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let tr = phi.right_translate(&GroupElement::ExpCoords(xi), hb)?;
            let lhs = tr.seminorm_q_opts(p.r, p.c, &suite_opts())?.upper * (1.0 + 1e-9);
            let rhs = q_lower(phi, p.r, p.c + xin, hb) * (1.0 - 1e-9);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: inst.algebra.name().to_string(),
                uncertified: false,
            })
        }
        EstimateKind::Pullback => {
            let inst = random_instance(&Profile::small(nil), seed);
            let phi = &inst.rep_functions[0];
            let mut rng = StdRng::seed_from_u64(seed ^ 0x9C2B);
            let t = random_automorphism(&inst.algebra, &mut rng);
            let n = inst.algebra.dim();
            let dsup = t
                .iter()
                .flatten()
                .map(|q| num_traits::ToPrimitive::to_f64(q).unwrap().abs())
                .fold(0.0, f64::max);
            let pulled = phi.morphism_pullback(&t, &inst.algebra, &inst.algebra)?;
            let lhs = pulled
                .to_numeric(hb)
                .seminorm_q_opts(p.r, p.c, &suite_opts())?
                .upper;
            let rhs = q_lower(phi, p.r, p.c * n as f64 * dsup, hb) * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: format!("{} D={}", inst.algebra.name(), dsup),
                uncertified: false,
            })
        }
        EstimateKind::RepEntire => {
            let inst = random_instance(&Profile::small(false), seed);
            let phi = &inst.rep_functions[0];
            let num = phi.to_numeric(hb);
            let lhs = num.seminorm_q_opts(p.r, p.c, &suite_opts())?.upper;
            let n = inst.algebra.dim() as f64;
            let psi_norm: f64 = num.gens.iter().map(|g| g.l1_norm()).fold(0.0, f64::max);
            let delta: f64 = num.delta.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let vnorm: f64 = num.v.iter().map(|z| z.norm()).sum();
            let x = p.c * psi_norm * n;
            let mut series = 0.0;
            let mut ln_t = 0.0;
            for k in 0..=300 {
                if k > 0 {
                    ln_t += (p.r - 1.0) * (k as f64).ln() + x.max(1e-300).ln();
                }
                let t = ln_t.exp();
                series += t;
                if k > 8 && t < 1e-16 * series {
                    break;
                }
            }
            let rhs = delta * vnorm * series * (1.0 - 1e-11);
            Ok(TrialOutcome {
                lhs_upper: lhs,
                rhs_lower: rhs,
                description: format!("{} Psi={:.3}", inst.algebra.name(), psi_norm),
                uncertified: false,
            })
        }
    }
}

/// Random Lie algebra automorphism (as tangent map rows) for the stock
/// fixtures.
fn random_automorphism(alg: &LieAlgebra, rng: &mut StdRng) -> Vec<Vec<Rational>> {
    let n = alg.dim();
    let zero = || Rational::from_integer(0.into());
    let mut t: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| zero()).collect()).collect();
    if alg.is_abelian() {
        // Any invertible matrix; take diagonal with random nonzero entries.
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = rand_nonzero_rat(rng);
        }
    } else if alg.name() == "heisenberg" {
        // (e₁, e₂, e₃) ↦ (a e₁, b e₂, ab e₃).
        let a = rand_nonzero_rat(rng);
        let b = rand_nonzero_rat(rng);
        t[0][0] = a.clone();
        t[1][1] = b.clone();
        t[2][2] = a * b;
    } else if alg.name() == "so3" {
        // Even signed permutations preserve the ε-tensor.
        let perms: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
        let perm = perms[rng.gen_range(0..3)];
        let s0: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let s1: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let signs = [s0, s1, s0 * s1];
        for i in 0..3 {
            t[perm[i]][i] = rat_i64(signs[i], 1);
        }
    } else if alg.name() == "affine2" {
        // e₁ ↦ e₁ + s e₂, e₂ ↦ u e₂.
        t[0][0] = Rational::from_integer(1.into());
        t[1][0] = rand_rat(rng);
        t[1][1] = rand_nonzero_rat(rng);
    } else {
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = Rational::from_integer(1.into());
        }
    }
    t
}

/// Run a spec for `trials` seeds; a genuine counterexample is preserved in
/// the report.
pub fn verify_estimate(spec: &EstimateSpec, trials: usize, seed: u64) -> AggregateReport {
    let outcomes: Vec<(u64, Result<TrialOutcome, LiestarError>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(t.wrapping_mul(0xBF58_476D_1CE4_E5B9));
            (s, run_trial(spec, s))
        })
        .collect();
    let mut failures = 0usize;
    let mut uncertified = 0usize;
    let mut borderline = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut ratios: Vec<f64> = Vec::with_capacity(trials);
    let mut counterexample = None;
    for (s, out) in outcomes {
        match out {
            Ok(o) => {
                let pass = passes(o.lhs_upper, o.rhs_lower);
                if pass && o.lhs_upper > o.rhs_lower {
                    borderline += 1;
                }
                let margin = o.rhs_lower - o.lhs_upper;
                if margin < worst_margin {
                    worst_margin = margin;
                }
                if o.rhs_lower > 0.0 {
                    ratios.push(o.lhs_upper / o.rhs_lower);
                }
                if !pass && counterexample.is_none() {
                    counterexample = Some(TrialReport {
                        seed: s,
                        description: o.description.clone(),
                        lhs_upper: o.lhs_upper,
                        rhs_lower: o.rhs_lower,
                        pass,
                        margin,
                    });
                }
                if !pass {
                    failures += 1;
                }
                if o.uncertified {
                    uncertified += 1;
                }
            }
            Err(_) => {
                uncertified += 1;
            }
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_ratio = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios[ratios.len() / 2]
    };
    AggregateReport {
        name: spec.kind.name().to_string(),
        constants: spec.constants(),
        point: spec.point,
        trials,
        failures,
        uncertified,
        borderline,
        pass: failures == 0 && uncertified == 0,
        worst_margin,
        median_ratio,
        counterexample,
    }
}

/// The verification grid from the estimate suite: (R, R′) pairs, ħ values
/// and weights.
pub fn default_grid() -> Vec<GridPoint> {
    let mut out = Vec::new();
    for (r, rp) in [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0), (0.0, 2.0), (0.5, 1.5)] {
        for hbar in [0.1, 1.0, 2.0] {
            for c in [1.0, 2.0] {
                for cp in [1.0, 2.0] {
                    out.push(GridPoint { r, rp, c, cp, hbar });
                }
            }
        }
    }
    out
}

/// Run every estimate over its applicable, deduplicated grid points.
pub fn run_suite(trials: usize, seed: u64) -> Vec<AggregateReport> {
    let mut reports = Vec::new();
    for kind in EstimateKind::all() {
        let mut seen = BTreeSet::new();
        for point in default_grid() {
            let spec = EstimateSpec { kind, point };
            if !spec.applicable() || !seen.insert(spec.dedupe_key()) {
                continue;
            }
            reports.push(verify_estimate(&spec, trials, seed));
        }
    }
    reports
}

/// Holomorphy of the star product in ħ: polynomial dependence with the
/// expected degree bounds, order-by-order agreement with the permutation
/// formula, and consistency of numeric evaluation with coefficient sums.
#[derive(Clone, Debug, Serialize)]
pub struct HolomorphyReport {
    pub hbar_degree: usize,
    pub total_degree: usize,
    pub degree_bound_ok: bool,
    pub degree_drop_ok: bool,
    pub coefficients_match: bool,
    pub evaluation_ok: bool,
}

impl HolomorphyReport {
    pub fn is_pass(&self) -> bool {
        self.degree_bound_ok && self.degree_drop_ok && self.coefficients_match && self.evaluation_ok
    }
}

pub fn holomorphy_check(
    f: &Observable,
    g: &Observable,
    hbar_samples: &[f64],
) -> Result<HolomorphyReport, LiestarError> {
    let prod = f.star_std(g)?;
    let literal = f.star_std_permutation_sum(g)?;
    let coefficients_match = prod.equals(&literal);
    let total_degree = f.sym_degree().unwrap_or(0) + g.sym_degree().unwrap_or(0);
    let hbar_degree = prod.hbar_degree().unwrap_or(0);
    let degree_bound_ok = hbar_degree <= total_degree;
    // For pure-degree inputs the ħ^r part must drop the symmetric degree by
    // exactly r; mixed inputs only satisfy the bound.
    let pure = f.num_terms() == 1 && g.num_terms() == 1 && f.hbar_degree().unwrap_or(0) == 0
        && g.hbar_degree().unwrap_or(0) == 0;
    let mut degree_drop_ok = true;
    if pure {
        for r in 0..=hbar_degree {
            let part = prod.hbar_coefficient(r);
            for (m, _) in part.terms() {
                if m.degree() + r != total_degree {
                    degree_drop_ok = false;
                }
            }
        }
    }
    // Numeric evaluation: Σ_r ħ^r·eval(C_r) agrees with eval at ħ.
    let mut evaluation_ok = true;
    let n = f.algebra().dim();
    let gpt = GroupElement::ExpCoords(vec![0.3; n]);
    let eta: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * i as f64).collect();
    for &h in hbar_samples {
        let hb = Complex64::new(h, 0.0);
        let direct = prod.evaluate(&gpt, &eta, hb)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for r in 0..=hbar_degree {
            let cr = prod.hbar_coefficient(r);
            sum += cr.evaluate(&gpt, &eta, hb)? * h.powi(r as i32);
        }
        if (direct - sum).norm() > 1e-9 * (1.0 + direct.norm()) {
            evaluation_ok = false;
        }
    }
    Ok(HolomorphyReport {
        hbar_degree,
        total_degree,
        degree_bound_ok,
        degree_drop_ok,
        coefficients_match,
        evaluation_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instance_is_deterministic_and_valid() {
        for seed in 0..40 {
            let a = random_instance(&Profile::desk(), seed);
            let b = random_instance(&Profile::desk(), seed);
            assert_eq!(a.algebra.name(), b.algebra.name());
            assert!(a.algebra.validate().is_pass());
            for (x, y) in a.sym_polys.iter().zip(&b.sym_polys) {
                assert_eq!(x, y);
            }
            for phi in &a.rep_functions {
                assert!(phi.module.validate(&a.algebra).is_ok());
            }
        }
    }

    #[test]
    fn gutt_estimate_smoke() {
        let spec = EstimateSpec {
            kind: EstimateKind::GuttProduct,
            point: GridPoint {
                r: 0.0,
                rp: 1.0,
                c: 1.0,
                cp: 1.0,
                hbar: 1.0,
            },
        };
        let rep = verify_estimate(&spec, 60, 7);
        assert!(rep.pass, "{:?}", rep.counterexample);
        assert!(rep.constants.contains("64"));
    }

    #[test]
    fn mixed_estimate_smoke() {
        let spec = EstimateSpec {
            kind: EstimateKind::MixedProduct,
            point: GridPoint {
                r: 0.5,
                rp: 1.0,
                c: 1.0,
                cp: 1.0,
                hbar: 1.0,
            },
        };
        let rep = verify_estimate(&spec, 40, 3);
        assert!(rep.pass, "{:?}", rep.counterexample);
    }

    #[test]
    fn full_estimate_smoke() {
        let spec = EstimateSpec {
            kind: EstimateKind::FullProduct,
            point: GridPoint {
                r: 0.0,
                rp: 1.0,
                c: 1.0,
                cp: 1.0,
                hbar: 0.1,
            },
        };
        let rep = verify_estimate(&spec, 25, 11);
        assert!(rep.pass, "{:?}", rep.counterexample);
    }

    #[test]
    fn pointwise_kinds_smoke() {
        for kind in [
            EstimateKind::SymProduct,
            EstimateKind::EntireMultiplication,
            EstimateKind::EntireDifferentiation,
            EstimateKind::Translation,
            EstimateKind::Pullback,
            EstimateKind::Leibniz,
            EstimateKind::RepEntire,
        ] {
            let spec = EstimateSpec {
                kind,
                point: GridPoint {
                    r: 0.5,
                    rp: 1.0,
                    c: 1.0,
                    cp: 1.0,
                    hbar: 1.0,
                },
            };
            let rep = verify_estimate(&spec, 30, 19);
            assert!(rep.pass, "{} {:?}", kind.name(), rep.counterexample);
        }
    }

    #[test]
    fn nilpotent_grid_point() {
        // R = 1 requires the nilpotent fixture pool.
        for kind in [
            EstimateKind::MixedProduct,
            EstimateKind::EntireMultiplication,
            EstimateKind::EntireDifferentiation,
        ] {
            let spec = EstimateSpec {
                kind,
                point: GridPoint {
                    r: 1.0,
                    rp: 1.0,
                    c: 2.0,
                    cp: 2.0,
                    hbar: 2.0,
                },
            };
            let rep = verify_estimate(&spec, 25, 23);
            assert!(rep.pass, "{} {:?}", kind.name(), rep.counterexample);
        }
    }

    #[test]
    fn holomorphy_smoke() {
        let inst = random_instance(&Profile::small(false), 5);
        let rep = holomorphy_check(&inst.observables[0], &inst.observables[1], &[0.3, 1.0])
            .unwrap();
        assert!(rep.is_pass(), "{:?}", rep);
        // Pure-degree fixture checks the exact degree drop.
        let alg = crate::lie::fixtures::so3();
        let phi = crate::repfun::fixtures::su2_coefficient();
        let f = Observable::from_term(
            alg.clone(),
            Monomial::from_indices(vec![0, 1]),
            phi.clone(),
        );
        let g = Observable::from_term(alg.clone(), Monomial::from_indices(vec![2, 2]), phi);
        let rep = holomorphy_check(&f, &g, &[0.5]).unwrap();
        assert!(rep.is_pass(), "{:?}", rep);
        assert_eq!(rep.total_degree, 4);
    }
}
