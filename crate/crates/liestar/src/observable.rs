//! The polynomial observable algebra on T*G: canonical sums of symmetric
//! monomials with representative-function coefficients, carrying the
//! standard-ordered, κ-ordered and Weyl star products, the degree-lowering
//! Laplacian and Neumaier operators, and the standard-ordered quantization
//! map.
//!
//! Everything here is exact: coefficients of observables are ħ-polynomial
//! representative functions and all identities close without tolerance.

use crate::arith::{binomial, factorial, GaussianRational, Rational, Scalar};
use crate::error::LiestarError;
use crate::lie::{invert_rational_matrix, LieAlgebra};
use crate::pbw::Pbw;
use crate::repfun::{GroupElement, RepFunction, SeminormInterval};
use crate::sym::{Monomial, SymPoly};
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Element of Pol(T*G) in canonical form: one representative function per
/// symmetric monomial.
#[derive(Clone, Debug)]
pub struct Observable {
    algebra: Arc<LieAlgebra>,
    terms: BTreeMap<Monomial, RepFunction>,
}

impl Observable {
    pub fn zero(algebra: Arc<LieAlgebra>) -> Self {
        Self {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    /// π*φ = φ ⊗ 1.
    pub fn pi_lift(algebra: Arc<LieAlgebra>, phi: RepFunction) -> Self {
        let mut o = Self::zero(algebra);
        o.add_term(Monomial::unit(), phi);
        o
    }

    /// 1 ⊗ P for a momentum polynomial P.
    pub fn from_sympoly(algebra: Arc<LieAlgebra>, p: &SymPoly) -> Self {
        let n = algebra.dim();
        assert_eq!(p.dim(), n);
        let mut o = Self::zero(algebra);
        for (m, c) in p.terms() {
            o.add_term(m.clone(), RepFunction::constant(n, c.clone()));
        }
        o
    }

    /// φ ⊗ m for a single monomial.
    pub fn from_term(algebra: Arc<LieAlgebra>, m: Monomial, phi: RepFunction) -> Self {
        let mut o = Self::zero(algebra);
        o.add_term(m, phi);
        o
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RepFunction)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Top symmetric degree, `None` when there are no stored terms.
    pub fn sym_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Monomial, phi: RepFunction) {
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(phi);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&phi);
                *o.get_mut() = s;
            }
        }
    }

    pub fn add(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.check_algebra(other)?;
        let mut out = self.clone();
        for (m, phi) in &other.terms {
            out.add_term(m.clone(), phi.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Observable {
        Observable {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, phi)| (m.clone(), phi.scale(s)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.add(&other.scale(&Scalar::from_i64(-1)))
    }

    /// Complex conjugation, fixing ħ.
    pub fn conj(&self) -> Observable {
        Observable {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, phi)| (m.clone(), phi.conj()))
                .collect(),
        }
    }

    /// Canonical form: cyclic-submodule reduction of every coefficient and
    /// removal of vanishing ones.
    pub fn canonicalize(&self) -> Observable {
        let mut terms = BTreeMap::new();
        for (m, phi) in &self.terms {
            let red = phi.reduce();
            let zero =
                red.v.iter().all(|s| s.is_zero()) || red.delta.iter().all(|s| s.is_zero());
            if !zero {
                terms.insert(m.clone(), red);
            }
        }
        Observable {
            algebra: self.algebra.clone(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|phi| phi.is_zero())
    }

    pub fn equals(&self, other: &Observable) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    fn check_algebra(&self, other: &Observable) -> Result<(), LiestarError> {
        if *self.algebra != *other.algebra {
            return Err(LiestarError::AlgebraMismatch);
        }
        Ok(())
    }

    /// Standard-ordered star product, bilinear extension of
    ///
    ///   (φ⊗ξ₁∨…∨ξ_k) ⋆ (ψ⊗η)
    ///     = Σ_p (ħ/i)^p/(p!(k−p)!) Σ_{σ∈S_k}
    ///         φ·(L_{ξ_{σ(1)}}⋯L_{ξ_{σ(p)}}ψ) ⊗ (ξ_{σ(p+1)}∨…∨ξ_{σ(k)}) ⋆_𝔤 η.
    ///
    /// The permutation sum collapses to multiset combinatorics: for each
    /// sub-multiset t of size p the weight is ∏_i C(m_i, t_i) times the
    /// average of the derivative words over the distinct arrangements of t.
    pub fn star_std(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.check_algebra(other)?;
        let pbw = Pbw::new(&self.algebra);
        let mut out = ObservableBuilder::new(self.algebra.clone());
        for (m_f, phi) in &self.terms {
            let mults = m_f.multiplicities();
            let k = m_f.degree();
            for (m_g, psi) in &other.terms {
                // One shared tensor module per term pair; the derivative
                // words only change the coordinate vector, so all
                // contributions merge without direct sums.
                let pair = TensorPair::new(phi, psi);
                for p in 0..=k {
                    for t in submultisets(&mults, p) {
                        let count: Rational = Rational::from_integer(
                            t.iter()
                                .zip(multiplicity_of(&mults, &t))
                                .map(|(&(_, ti), mi)| binomial(mi, ti))
                                .product(),
                        );
                        let u = average_word_vector(psi, &t);
                        let rep = pair.with_right_vector(&u);
                        let weight = Scalar::hbar_over_i()
                            .pow(p)
                            .scale_rational(&count);
                        let rest = m_f
                            .remove_multiset(&t)
                            .expect("sub-multiset is contained");
                        let gutt = pbw.gutt_star_monomials(&rest, m_g);
                        for (mono, s) in gutt.terms() {
                            out.push(mono.clone(), rep.scale(&(&weight * s)));
                        }
                    }
                }
            }
        }
        Ok(out.finish())
    }

    /// Literal permutation-sum implementation of the same formula, used as
    /// an independent route for cross-validation at small degrees.
    pub fn star_std_permutation_sum(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.check_algebra(other)?;
        let pbw = Pbw::new(&self.algebra);
        let mut out = ObservableBuilder::new(self.algebra.clone());
        for (m_f, phi) in &self.terms {
            let idx = m_f.indices().to_vec();
            let k = idx.len();
            for (m_g, psi) in &other.terms {
                // All k! slot permutations, not just distinct words.
                let all_perms = all_permutations(k);
                let pair = TensorPair::new(phi, psi);
                for p in 0..=k {
                    let norm = (&factorial(p) * &factorial(k - p)).recip();
                    for sigma in &all_perms {
                        let word: Vec<usize> = sigma[..p].iter().map(|&s| idx[s]).collect();
                        let mut u = psi.v.clone();
                        for &i in word.iter().rev() {
                            u = crate::linalg::matvec_scalar(psi.module.gen(i), &u);
                        }
                        let rep = pair.with_right_vector(&u);
                        let weight = Scalar::hbar_over_i().pow(p).scale_rational(&norm);
                        let rest = Monomial::from_indices(
                            sigma[p..].iter().map(|&s| idx[s]).collect(),
                        );
                        let gutt = pbw.gutt_star_monomials(&rest, m_g);
                        for (mono, s) in gutt.terms() {
                            out.push(mono.clone(), rep.scale(&(&weight * s)));
                        }
                    }
                }
            }
        }
        Ok(out.finish())
    }

    /// Pointwise (undeformed) product.
    pub fn pointwise_product(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.check_algebra(other)?;
        let mut out = ObservableBuilder::new(self.algebra.clone());
        for (m1, phi) in &self.terms {
            for (m2, psi) in &other.terms {
                out.push(m1.merge(m2), phi.multiply(psi));
            }
        }
        Ok(out.finish())
    }

    /// Degree-lowering Laplacian Δ(φ⊗ξ₁∨…∨ξ_k) = Σ_ℓ L_{X_{ξ_ℓ}}φ ⊗ ξ₁∨…ℓ̂…∨ξ_k.
    pub fn laplace(&self) -> Observable {
        let mut out = ObservableBuilder::new(self.algebra.clone());
        for (m, phi) in &self.terms {
            for (i, mult) in m.multiplicities() {
                let rest = m.remove_one(i).expect("index present");
                let d = phi
                    .lie_derive_basis(i)
                    .scale(&Scalar::from_i64(mult as i64));
                out.push(rest, d);
            }
        }
        out.finish()
    }

    pub fn laplace_power(&self, l: usize) -> Observable {
        let mut out = self.clone();
        for _ in 0..l {
            out = out.laplace();
        }
        out
    }

    /// Insertion of the modular one-form into the momentum factor:
    /// L_{α^ver}(φ⊗ξ₁∨…∨ξ_k) = φ ⊗ Σ_ℓ α(ξ_ℓ)·ξ₁∨…ℓ̂…∨ξ_k.
    pub fn vertical_modular_derivative(&self) -> Observable {
        let alpha = self.algebra.modular_form();
        let mut out = ObservableBuilder::new(self.algebra.clone());
        for (m, phi) in &self.terms {
            for (i, mult) in m.multiplicities() {
                if alpha.components[i].is_zero() {
                    continue;
                }
                let rest = m.remove_one(i).expect("index present");
                let w = &alpha.components[i] * Rational::from_integer(mult.into());
                out.push(rest, phi.scale(&Scalar::from_rational(w)));
            }
        }
        out.finish()
    }

    /// exp(t·L_{α^ver}); the series terminates since the insertion lowers
    /// the symmetric degree.
    pub fn exp_vertical_modular(&self, t: &Scalar) -> Observable {
        let mut out = ObservableBuilder::new(self.algebra.clone());
        let mut term = self.clone();
        let mut l = 0usize;
        loop {
            let coef = t.pow(l).scale_rational(&factorial(l).recip());
            for (m, phi) in &term.terms {
                out.push(m.clone(), phi.scale(&coef));
            }
            if term.terms.is_empty() || self.sym_degree().map_or(true, |d| l >= d) {
                break;
            }
            term = term.vertical_modular_derivative();
            l += 1;
        }
        out.finish()
    }

    /// The Neumaier operator N_κ = exp(−iκħΔ) as a terminating sum.
    pub fn neumaier(&self, kappa: &Rational) -> Observable {
        let mut out = ObservableBuilder::new(self.algebra.clone());
        let top = self.sym_degree().unwrap_or(0);
        // −iκħ
        let z = Scalar::hbar().scale(&GaussianRational::new(Rational::zero(), -kappa.clone()));
        let mut power = self.clone();
        for l in 0..=top {
            let coef = z.pow(l).scale_rational(&factorial(l).recip());
            for (m, phi) in &power.terms {
                out.push(m.clone(), phi.scale(&coef));
            }
            if l < top {
                power = power.laplace();
            }
        }
        out.finish()
    }

    /// κ-ordered star product P ⋆_κ Q = N_{−κ}((N_κ P) ⋆_std (N_κ Q)).
    pub fn star_kappa(&self, other: &Observable, kappa: &Rational) -> Result<Observable, LiestarError> {
        let nk_self = self.neumaier(kappa);
        let nk_other = other.neumaier(kappa);
        let prod = nk_self.star_std(&nk_other)?;
        Ok(prod.neumaier(&-kappa.clone()))
    }

    /// Weyl star product (κ = ½).
    pub fn star_weyl(&self, other: &Observable) -> Result<Observable, LiestarError> {
        self.star_kappa(other, &crate::arith::rat_i64(1, 2))
    }

    /// Retain only the coefficient of ħ^r everywhere; for ħ-free inputs
    /// F ⋆ G = Σ_r ħ^r C_r(F, G) and this extracts C_r of the product.
    pub fn hbar_coefficient(&self, r: usize) -> Observable {
        Observable {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, phi)| (m.clone(), rep_hbar_coefficient(phi, r)))
                .collect(),
        }
        .canonicalize()
    }

    /// Largest ħ power with a nonvanishing coefficient.
    pub fn hbar_degree(&self) -> Option<usize> {
        let mut top: Option<usize> = None;
        for phi in self.terms.values() {
            let f = push_hbar_to_v(phi);
            for s in &f.v {
                if let Some(d) = s.degree() {
                    // Only count powers whose coefficient function survives.
                    for r in 0..=d {
                        if top.map_or(true, |t| r > t)
                            && !rep_hbar_coefficient(phi, r).is_zero()
                        {
                            top = Some(r);
                        }
                    }
                }
            }
        }
        top
    }

    /// Bidifferential coefficient C_r(F, G) of the standard-ordered product.
    pub fn extract_cr(&self, other: &Observable, r: usize) -> Result<Observable, LiestarError> {
        Ok(self.star_std(other)?.hbar_coefficient(r))
    }

    /// Poisson bracket normalized so that {1⊗ξ, φ⊗1} = (L_{X_ξ}φ)⊗1:
    /// {F, G} = i·(C₁(F,G) − C₁(G,F)).
    pub fn poisson_bracket(&self, other: &Observable) -> Result<Observable, LiestarError> {
        let c1 = self.extract_cr(other, 1)?;
        let c1r = other.extract_cr(self, 1)?;
        Ok(c1
            .sub(&c1r)?
            .scale(&Scalar::constant(GaussianRational::i()))
            .canonicalize())
    }

    /// ι*: restriction to the zero section (unit-monomial coefficient).
    pub fn iota_restrict(&self) -> RepFunction {
        self.terms
            .get(&Monomial::unit())
            .cloned()
            .unwrap_or_else(|| RepFunction::zero(self.algebra.dim()))
    }

    /// Standard-ordered quantization map through the star product:
    /// ρ_std(F)φ = ι*(F ⋆_std π*φ).
    pub fn std_quantize_via_star(&self, phi: &RepFunction) -> Result<RepFunction, LiestarError> {
        let lifted = Observable::pi_lift(self.algebra.clone(), phi.clone());
        Ok(self.star_std(&lifted)?.iota_restrict())
    }

    /// Standard-ordered quantization map evaluated termwise:
    /// ρ_std(ψ⊗ξ₁∨…∨ξ_k)φ = ψ·(ħ/i)^k·(1/k!)Σ_σ L_{ξ_{σ(1)}}⋯L_{ξ_{σ(k)}}φ.
    pub fn std_quantize_explicit(&self, phi: &RepFunction) -> Result<RepFunction, LiestarError> {
        let mut out = RepFunction::zero(self.algebra.dim());
        for (m, psi) in &self.terms {
            let t = m.multiplicities();
            let avg = average_word_derivative(phi, &t);
            let term = psi
                .multiply(&avg)
                .scale(&Scalar::hbar_over_i().pow(m.degree()));
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Pullback along the point transformation of a covering map with
    /// invertible tangent map `t` (rows index the codomain algebra).
    pub fn point_transform(
        &self,
        t: &[Vec<Rational>],
        domain: Arc<LieAlgebra>,
    ) -> Result<Observable, LiestarError> {
        let n_g = domain.dim();
        let n_h = self.algebra.dim();
        if t.len() != n_h || t.iter().any(|r| r.len() != n_g) || n_g != n_h {
            return Err(LiestarError::DimensionMismatch {
                expected: n_h,
                got: t.len(),
            });
        }
        let tinv = invert_rational_matrix(t).ok_or(LiestarError::SingularMatrix)?;
        let mut out = ObservableBuilder::new(domain.clone());
        for (m, phi) in &self.terms {
            let pulled = phi.morphism_pullback(t, &domain, &self.algebra)?;
            // Transform the momentum monomial slot by slot with T⁻¹.
            let mut poly = SymPoly::unit(n_g);
            for &j in m.indices() {
                let mut slot = SymPoly::zero(n_g);
                for (a, row) in tinv.iter().enumerate() {
                    if !row[j].is_zero() {
                        slot.add_term(Monomial::basis(a), &Scalar::from_rational(row[j].clone()));
                    }
                }
                poly = poly.sym_multiply(&slot)?;
            }
            for (mono, s) in poly.terms() {
                out.push(mono.clone(), pulled.scale(s));
            }
        }
        Ok(out.finish())
    }

    /// χ(g, η) = Σ_m φ_m(g)·η^m at a numeric phase-space point.
    pub fn evaluate(
        &self,
        g: &GroupElement,
        eta: &[f64],
        hbar: Complex64,
    ) -> Result<Complex64, LiestarError> {
        if eta.len() != self.algebra.dim() {
            return Err(LiestarError::DimensionMismatch {
                expected: self.algebra.dim(),
                got: eta.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, phi) in &self.terms {
            let mut w = 1.0;
            for &i in m.indices() {
                w *= eta[i];
            }
            if w != 0.0 {
                acc += phi.to_numeric(hbar).evaluate_point(g)? * w;
            }
        }
        Ok(acc)
    }

    /// Cross seminorm (q_{R,c} ⊗ p_{R′,c′})(F) = Σ_m q_{R,c}(φ_m)·(deg m)!^{R′}·c′^{deg m},
    /// computable termwise on the canonical decomposition.
    pub fn seminorm_cross(
        &self,
        r: f64,
        c: f64,
        rp: f64,
        cp: f64,
        hbar: Complex64,
    ) -> Result<SeminormInterval, LiestarError> {
        if c < 0.0 || cp < 0.0 {
            return Err(LiestarError::NegativeWeight(c.min(cp)));
        }
        let mut acc = SeminormInterval::point(0.0);
        for (m, phi) in &self.terms {
            let q = phi.seminorm_q(r, c, hbar)?;
            let w = crate::sym::factorial_pow_f64(m.degree(), rp) * cp.powi(m.degree() as i32);
            acc = acc.add(&q.scale(w));
        }
        Ok(acc)
    }

    /// Lower bound of the cross seminorm by partial sums (no certification
    /// required); used on the dominating side of inequality checks.
    pub fn seminorm_cross_lower(&self, r: f64, c: f64, rp: f64, cp: f64, hbar: Complex64) -> f64 {
        let mut acc = 0.0;
        for (m, phi) in &self.terms {
            let q = phi.to_numeric(hbar).seminorm_q_lower(r, c, 120);
            let w = crate::sym::factorial_pow_f64(m.degree(), rp) * cp.powi(m.degree() as i32);
            acc += q * w;
        }
        acc.min(1e290)
    }
}

/// Accumulator for observables under construction. Contributions are kept
/// as per-monomial lists, merging immediately only when the module pointer
/// and covector coincide; the final direct sum and reduction happen once
/// per monomial.
struct ObservableBuilder {
    algebra: Arc<LieAlgebra>,
    terms: BTreeMap<Monomial, Vec<RepFunction>>,
}

impl ObservableBuilder {
    fn new(algebra: Arc<LieAlgebra>) -> Self {
        Self {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    fn push(&mut self, m: Monomial, rep: RepFunction) {
        let bucket = self.terms.entry(m).or_default();
        for existing in bucket.iter_mut() {
            if Arc::ptr_eq(&existing.module, &rep.module) && existing.delta == rep.delta {
                let v = existing
                    .v
                    .iter()
                    .zip(&rep.v)
                    .map(|(a, b)| a + b)
                    .collect();
                *existing = RepFunction::new(rep.module.clone(), v, rep.delta.clone());
                return;
            }
        }
        bucket.push(rep);
    }

    fn finish(self) -> Observable {
        let mut terms = BTreeMap::new();
        for (m, bucket) in self.terms {
            let red = RepFunction::direct_sum_many(&bucket).reduce();
            let zero =
                red.v.iter().all(|s| s.is_zero()) || red.delta.iter().all(|s| s.is_zero());
            if !zero {
                terms.insert(m, red);
            }
        }
        Observable {
            algebra: self.algebra,
            terms,
        }
    }
}

/// Precomputed tensor module for a pair of coefficient functions, so that
/// repeated products against the same pair share one module.
struct TensorPair {
    module: Arc<crate::repfun::OrbitModule>,
    left_v: Vec<Scalar>,
    delta: Vec<Scalar>,
}

impl TensorPair {
    fn new(phi: &RepFunction, psi: &RepFunction) -> Self {
        let prototype = phi.multiply(psi);
        Self {
            module: prototype.module.clone(),
            left_v: phi.v.clone(),
            delta: prototype.delta.clone(),
        }
    }

    /// φ ⊗ (ψ-module vector u) as a function on the shared tensor module.
    fn with_right_vector(&self, u: &[Scalar]) -> RepFunction {
        let mut v = Vec::with_capacity(self.left_v.len() * u.len());
        for a in &self.left_v {
            for b in u {
                v.push(a * b);
            }
        }
        RepFunction::new(self.module.clone(), v, self.delta.clone())
    }
}

/// Average of the vectors A_{w₁}⋯A_{w_p}·v over the distinct arrangements
/// w of the multiset t, inside φ's module.
fn average_word_vector(phi: &RepFunction, t: &[(usize, usize)]) -> Vec<Scalar> {
    let mut word: Vec<usize> = Vec::new();
    for &(i, cnt) in t {
        word.extend(std::iter::repeat(i).take(cnt));
    }
    if word.is_empty() {
        return phi.v.clone();
    }
    let mut acc: Option<Vec<Scalar>> = None;
    let mut count = 0usize;
    loop {
        let mut u = phi.v.clone();
        for &i in word.iter().rev() {
            u = crate::linalg::matvec_scalar(phi.module.gen(i), &u);
        }
        acc = Some(match acc {
            None => u,
            Some(a) => a.iter().zip(&u).map(|(x, y)| x + y).collect(),
        });
        count += 1;
        if !crate::pbw::next_permutation(&mut word) {
            break;
        }
    }
    let inv = Scalar::from_rational(crate::arith::rat_i64(1, count as i64));
    acc.unwrap().iter().map(|x| x * &inv).collect()
}

/// Average of L_{w₁}⋯L_{w_p}φ over the distinct arrangements w of the
/// multiset t, computed inside φ's module.
fn average_word_derivative(phi: &RepFunction, t: &[(usize, usize)]) -> RepFunction {
    let mut word: Vec<usize> = Vec::new();
    for &(i, cnt) in t {
        word.extend(std::iter::repeat(i).take(cnt));
    }
    if word.is_empty() {
        return phi.clone();
    }
    let mut acc: Option<RepFunction> = None;
    let mut count = 0usize;
    loop {
        let mut chi = phi.clone();
        for &i in word.iter().rev() {
            chi = chi.lie_derive_basis(i);
        }
        acc = Some(match acc {
            None => chi,
            Some(a) => a.add(&chi),
        });
        count += 1;
        if !crate::pbw::next_permutation(&mut word) {
            break;
        }
    }
    acc.unwrap()
        .scale(&Scalar::from_rational(crate::arith::rat_i64(1, count as i64)))
}

/// All sub-multisets of size p of a multiset given as (index, multiplicity)
/// pairs; each result lists (index, chosen count) with chosen count ≥ 1.
fn submultisets(mults: &[(usize, usize)], p: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        mults: &[(usize, usize)],
        pos: usize,
        remaining: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        if pos >= mults.len() {
            return;
        }
        let (idx, avail) = mults[pos];
        for take in (0..=avail.min(remaining)).rev() {
            if take > 0 {
                current.push((idx, take));
            }
            rec(mults, pos + 1, remaining - take, current, out);
            if take > 0 {
                current.pop();
            }
        }
    }
    rec(mults, 0, p, &mut current, &mut out);
    out
}

fn multiplicity_of<'a>(
    mults: &'a [(usize, usize)],
    t: &'a [(usize, usize)],
) -> impl Iterator<Item = usize> + 'a {
    t.iter().map(move |&(i, _)| {
        mults
            .iter()
            .find(|&&(j, _)| j == i)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    })
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out = vec![perm.clone()];
    while crate::pbw::next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}

/// Move every power of ħ from the covector into the coordinate vector via
/// a direct sum over the covector's ħ-layers.
fn push_hbar_to_v(phi: &RepFunction) -> RepFunction {
    let ddeg = phi.delta.iter().filter_map(|s| s.degree()).max();
    match ddeg {
        None => phi.clone(),
        Some(0) => phi.clone(),
        Some(d) => {
            let mut acc: Option<RepFunction> = None;
            for b in 0..=d {
                let delta_b: Vec<Scalar> = phi
                    .delta
                    .iter()
                    .map(|s| Scalar::constant(s.coeff(b)))
                    .collect();
                if delta_b.iter().all(|s| s.is_zero()) {
                    continue;
                }
                let v_b: Vec<Scalar> = phi.v.iter().map(|s| s.shift(b)).collect();
                let part = RepFunction::new(phi.module.clone(), v_b, delta_b);
                acc = Some(match acc {
                    None => part,
                    Some(a) => a.add(&part),
                });
            }
            acc.unwrap_or_else(|| RepFunction::zero(phi.module.num_gens()))
        }
    }
}

/// ħ^r coefficient of a representative function, as a function again.
fn rep_hbar_coefficient(phi: &RepFunction, r: usize) -> RepFunction {
    let f = push_hbar_to_v(phi);
    RepFunction::new(
        f.module.clone(),
        f.v.iter().map(|s| Scalar::constant(s.coeff(r))).collect(),
        f.delta.clone(),
    )
}
