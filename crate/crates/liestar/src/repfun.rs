//! Representative functions on the group as finite-dimensional orbit
//! modules, with exact Lie-Taylor data and certified seminorm intervals.
//!
//! A function is stored as φ(g) = δ·π(g)·v where the module records the
//! generator matrices A_i of the Lie derivatives L_{X_{e_i}}. Iterated
//! derivatives at the unit are then exact matrix products:
//! (L_{X_{α₁}}⋯L_{X_{α_k}}φ)(e) = δ·A_{α₁}⋯A_{α_k}·v.
//!
//! Coordinate vectors carry ħ-polynomial entries so that observables can
//! scale their coefficient functions by powers of ħ without leaving the
//! exact layer.

use crate::arith::{GaussianRational, Rational, Scalar};
use crate::error::LiestarError;
use crate::lie::LieAlgebra;
use crate::linalg::{expm, matvec_scalar, CMat, Coeff, Mat, QMat, RowSpace};
use num_complex::Complex64;
use num_traits::Zero;
use std::sync::Arc;

/// Finite-dimensional module carrying a representative function: the
/// generator A_i realizes the Lie derivative along the i-th left-invariant
/// frame field.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitModule {
    dim: usize,
    gens: Vec<QMat>,
}

impl OrbitModule {
    pub fn new(gens: Vec<QMat>) -> Self {
        let dim = gens.first().map_or(0, |g| g.rows);
        assert!(gens.iter().all(|g| g.rows == dim && g.cols == dim));
        Self { dim, gens }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen(&self, i: usize) -> &QMat {
        &self.gens[i]
    }

    /// Check A_iA_j − A_jA_i = Σ_k c^k_{ij} A_k exactly for all i < j.
    pub fn validate(&self, alg: &LieAlgebra) -> Result<(), LiestarError> {
        if self.gens.len() != alg.dim() {
            return Err(LiestarError::DimensionMismatch {
                expected: alg.dim(),
                got: self.gens.len(),
            });
        }
        for i in 0..alg.dim() {
            for j in (i + 1)..alg.dim() {
                let mut comm = self.gens[i]
                    .matmul(&self.gens[j])
                    .add_mat(&self.gens[j].matmul(&self.gens[i]).neg());
                for (k, q) in alg.bracket_basis(i, j) {
                    let c = GaussianRational::from_rational(-q);
                    comm = comm.add_mat(&self.gens[k].scale(&c));
                }
                if !comm.is_zero() {
                    return Err(LiestarError::ModuleCommutation(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Description of a group element for numeric evaluation.
#[derive(Clone, Debug)]
pub enum GroupElement {
    /// g = exp(Σ x_i e_i); π(g) is the matrix exponential of Σ x_i A_i.
    ExpCoords(Vec<f64>),
    /// A user-supplied numeric matrix π(g) of the module dimension.
    Matrix(CMat),
}

/// Representative function δ·π(·)·v with ħ-polynomial coordinates.
#[derive(Clone, Debug)]
pub struct RepFunction {
    pub module: Arc<OrbitModule>,
    pub v: Vec<Scalar>,
    pub delta: Vec<Scalar>,
}

/// Certified enclosure of a seminorm value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormInterval {
    pub lower: f64,
    pub upper: f64,
    /// Degree up to which terms were summed exactly.
    pub truncation: usize,
}

impl SeminormInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn point(x: f64) -> Self {
        SeminormInterval {
            lower: x,
            upper: x,
            truncation: 0,
        }
    }

    pub fn add(&self, o: &SeminormInterval) -> SeminormInterval {
        SeminormInterval {
            lower: self.lower + o.lower,
            upper: self.upper + o.upper,
            truncation: self.truncation.max(o.truncation),
        }
    }

    pub fn scale(&self, c: f64) -> SeminormInterval {
        assert!(c >= 0.0);
        SeminormInterval {
            lower: self.lower * c * (1.0 - 1e-14),
            upper: self.upper * c * (1.0 + 1e-14),
            truncation: self.truncation,
        }
    }

    pub fn mul(&self, o: &SeminormInterval) -> SeminormInterval {
        SeminormInterval {
            lower: self.lower * o.lower * (1.0 - 1e-14),
            upper: self.upper * o.upper * (1.0 + 1e-14),
            truncation: self.truncation.max(o.truncation),
        }
    }
}

impl RepFunction {
    pub fn new(module: Arc<OrbitModule>, v: Vec<Scalar>, delta: Vec<Scalar>) -> Self {
        assert_eq!(v.len(), module.dim());
        assert_eq!(delta.len(), module.dim());
        Self { module, v, delta }
    }

    /// Constant function with value `c` (valid over any algebra dimension).
    pub fn constant(n_gens: usize, c: Scalar) -> Self {
        let module = Arc::new(OrbitModule::new(vec![QMat::zeros(1, 1); n_gens]));
        Self::new(module, vec![c], vec![Scalar::one()])
    }

    pub fn zero(n_gens: usize) -> Self {
        Self::constant(n_gens, Scalar::zero())
    }

    /// φ(e) = δ·v.
    pub fn value_at_identity(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for (d, x) in self.delta.iter().zip(&self.v) {
            acc = &acc + &(d * x);
        }
        acc
    }

    /// δ·A_{w₁}⋯A_{w_k}·v as an exact ħ-polynomial.
    pub fn word_value(&self, word: &[usize]) -> Scalar {
        let mut x = self.v.clone();
        for &i in word.iter().rev() {
            x = matvec_scalar(self.module.gen(i), &x);
        }
        let mut acc = Scalar::zero();
        for (d, xi) in self.delta.iter().zip(&x) {
            acc = &acc + &(d * xi);
        }
        acc
    }

    /// Lie derivative along ξ = Σ ξ_i e_i: v ↦ (Σ ξ_i A_i)·v.
    pub fn lie_derive(&self, xi: &[Rational]) -> Result<RepFunction, LiestarError> {
        if xi.len() != self.module.num_gens() {
            return Err(LiestarError::DimensionMismatch {
                expected: self.module.num_gens(),
                got: xi.len(),
            });
        }
        let mut out = vec![Scalar::zero(); self.module.dim()];
        for (i, q) in xi.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let w = matvec_scalar(self.module.gen(i), &self.v);
            for (o, wi) in out.iter_mut().zip(&w) {
                *o = &*o + &wi.scale_rational(q);
            }
        }
        Ok(Self::new(self.module.clone(), out, self.delta.clone()))
    }

    /// Lie derivative along the i-th basis frame.
    pub fn lie_derive_basis(&self, i: usize) -> RepFunction {
        let v = matvec_scalar(self.module.gen(i), &self.v);
        Self::new(self.module.clone(), v, self.delta.clone())
    }

    pub fn scale(&self, s: &Scalar) -> RepFunction {
        Self::new(
            self.module.clone(),
            self.v.iter().map(|x| x * s).collect(),
            self.delta.clone(),
        )
    }

    /// Pointwise product via the tensor module A_i⊗I + I⊗B_i.
    pub fn multiply(&self, other: &RepFunction) -> RepFunction {
        let (m1, m2) = (self.module.dim(), other.module.dim());
        let id1 = QMat::identity(m1);
        let id2 = QMat::identity(m2);
        let gens: Vec<QMat> = (0..self.module.num_gens())
            .map(|i| {
                self.module
                    .gen(i)
                    .kron(&id2)
                    .add_mat(&id1.kron(other.module.gen(i)))
            })
            .collect();
        let mut v = Vec::with_capacity(m1 * m2);
        for a in &self.v {
            for b in &other.v {
                v.push(a * b);
            }
        }
        let mut delta = Vec::with_capacity(m1 * m2);
        for a in &self.delta {
            for b in &other.delta {
                delta.push(a * b);
            }
        }
        Self::new(Arc::new(OrbitModule::new(gens)), v, delta)
    }

    /// Sum. When both summands live on the same module with the same
    /// covector the coordinate vectors are added; otherwise a direct sum
    /// of modules is formed.
    pub fn add(&self, other: &RepFunction) -> RepFunction {
        if Arc::ptr_eq(&self.module, &other.module) && self.delta == other.delta {
            let v = self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| a + b)
                .collect();
            return Self::new(self.module.clone(), v, self.delta.clone());
        }
        let (m1, m2) = (self.module.dim(), other.module.dim());
        let gens: Vec<QMat> = (0..self.module.num_gens())
            .map(|i| {
                let mut g = QMat::zeros(m1 + m2, m1 + m2);
                for r in 0..m1 {
                    for c in 0..m1 {
                        g.set(r, c, self.module.gen(i).get(r, c).clone());
                    }
                }
                for r in 0..m2 {
                    for c in 0..m2 {
                        g.set(m1 + r, m1 + c, other.module.gen(i).get(r, c).clone());
                    }
                }
                g
            })
            .collect();
        let mut v = self.v.clone();
        v.extend(other.v.iter().cloned());
        let mut delta = self.delta.clone();
        delta.extend(other.delta.iter().cloned());
        Self::new(Arc::new(OrbitModule::new(gens)), v, delta)
    }

    pub fn sub(&self, other: &RepFunction) -> RepFunction {
        self.add(&other.scale(&Scalar::from_i64(-1)))
    }

    /// Sum of many functions through one block-diagonal module, avoiding
    /// the quadratic growth of repeated pairwise direct sums.
    pub fn direct_sum_many(parts: &[RepFunction]) -> RepFunction {
        assert!(!parts.is_empty());
        if parts.len() == 1 {
            return parts[0].clone();
        }
        let n_gens = parts[0].module.num_gens();
        let total: usize = parts.iter().map(|p| p.module.dim()).sum();
        let gens: Vec<QMat> = (0..n_gens)
            .map(|i| {
                let mut g = QMat::zeros(total, total);
                let mut off = 0;
                for p in parts {
                    let m = p.module.dim();
                    for r in 0..m {
                        for c in 0..m {
                            let a = p.module.gen(i).get(r, c);
                            if !Coeff::is_zero(a) {
                                g.set(off + r, off + c, a.clone());
                            }
                        }
                    }
                    off += m;
                }
                g
            })
            .collect();
        let mut v = Vec::with_capacity(total);
        let mut delta = Vec::with_capacity(total);
        for p in parts {
            v.extend(p.v.iter().cloned());
            delta.extend(p.delta.iter().cloned());
        }
        Self::new(Arc::new(OrbitModule::new(gens)), v, delta)
    }

    /// Pointwise complex conjugate; ħ is treated as a real variable.
    pub fn conj(&self) -> RepFunction {
        let gens = (0..self.module.num_gens())
            .map(|i| self.module.gen(i).conj())
            .collect();
        Self::new(
            Arc::new(OrbitModule::new(gens)),
            self.v.iter().map(|x| x.conj()).collect(),
            self.delta.iter().map(|x| x.conj()).collect(),
        )
    }

    /// Pullback along group inversion: the contragredient module with
    /// generators −A_iᵀ, vector δᵀ and covector vᵀ. Requires the ħ-degree
    /// of δ and v to permit the swap (always true here since both carry
    /// arbitrary ħ-polynomials).
    pub fn inversion_pullback(&self) -> RepFunction {
        let gens = (0..self.module.num_gens())
            .map(|i| self.module.gen(i).transpose().neg())
            .collect();
        Self::new(
            Arc::new(OrbitModule::new(gens)),
            self.delta.clone(),
            self.v.clone(),
        )
    }

    /// Pullback along a Lie group morphism with tangent map `t` (rows index
    /// the codomain algebra 𝔥, columns the domain algebra 𝔤): the module
    /// keeps its space, the generators become A′_i = Σ_j t[j][i] A_j.
    pub fn morphism_pullback(
        &self,
        t: &[Vec<Rational>],
        domain: &LieAlgebra,
        codomain: &LieAlgebra,
    ) -> Result<RepFunction, LiestarError> {
        check_lie_morphism(t, domain, codomain)?;
        let n_g = domain.dim();
        let gens: Vec<QMat> = (0..n_g)
            .map(|i| {
                let mut acc = QMat::zeros(self.module.dim(), self.module.dim());
                for (j, row) in t.iter().enumerate() {
                    if !row[i].is_zero() {
                        acc = acc.add_mat(
                            &self
                                .module
                                .gen(j)
                                .scale(&GaussianRational::from_rational(row[i].clone())),
                        );
                    }
                }
                acc
            })
            .collect();
        Ok(Self::new(
            Arc::new(OrbitModule::new(gens)),
            self.v.clone(),
            self.delta.clone(),
        ))
    }

    /// Restrict to the cyclic submodule generated by the coordinate vector
    /// under the generators. Preserves every quantity δ·A_α·v and every
    /// evaluation, while often shrinking the module dimension.
    pub fn reduce(&self) -> RepFunction {
        let m = self.module.dim();
        let hdeg = self.v.iter().filter_map(|s| s.degree()).max();
        let Some(hdeg) = hdeg else {
            return RepFunction::zero(self.module.num_gens());
        };
        let mut space = RowSpace::new(m);
        let mut work: Vec<Vec<GaussianRational>> = Vec::new();
        for d in 0..=hdeg {
            let seed: Vec<GaussianRational> = self.v.iter().map(|s| s.coeff(d)).collect();
            work.push(seed);
        }
        while let Some(w) = work.pop() {
            if space.insert(&w) {
                for i in 0..self.module.num_gens() {
                    let gw: Vec<GaussianRational> = (0..m)
                        .map(|r| {
                            let mut acc = GaussianRational::zero();
                            for c in 0..m {
                                let a = self.module.gen(i).get(r, c);
                                if !Coeff::is_zero(a) {
                                    acc = &acc + &(a * &w[c]);
                                }
                            }
                            acc
                        })
                        .collect();
                    work.push(gw);
                }
            }
        }
        let r = space.rank();
        if r == 0 {
            return RepFunction::zero(self.module.num_gens());
        }
        if r == m {
            return self.clone();
        }
        // New generators: coordinates of A_i · basis_s in the basis.
        let gens: Vec<QMat> = (0..self.module.num_gens())
            .map(|i| {
                let mut g = QMat::zeros(r, r);
                for (s, b) in space.basis().iter().enumerate() {
                    let gb: Vec<GaussianRational> = (0..m)
                        .map(|row| {
                            let mut acc = GaussianRational::zero();
                            for c in 0..m {
                                let a = self.module.gen(i).get(row, c);
                                if !Coeff::is_zero(a) {
                                    acc = &acc + &(a * &b[c]);
                                }
                            }
                            acc
                        })
                        .collect();
                    let coords = space
                        .coordinates(&gb)
                        .expect("closure guarantees invariance");
                    for (row, c) in coords.into_iter().enumerate() {
                        g.set(row, s, c);
                    }
                }
                g
            })
            .collect();
        // Coordinates of each ħ-layer of v.
        let mut v_coords: Vec<Vec<GaussianRational>> = Vec::with_capacity(hdeg + 1);
        for d in 0..=hdeg {
            let layer: Vec<GaussianRational> = self.v.iter().map(|s| s.coeff(d)).collect();
            v_coords.push(space.coordinates(&layer).expect("seed in span"));
        }
        let v: Vec<Scalar> = (0..r)
            .map(|s| Scalar::from_coeffs((0..=hdeg).map(|d| v_coords[d][s].clone()).collect()))
            .collect();
        // Restricted covector: δ′_s = δ·basis_s.
        let delta: Vec<Scalar> = space
            .basis()
            .iter()
            .map(|b| {
                let mut acc = Scalar::zero();
                for (dj, bj) in self.delta.iter().zip(b) {
                    if !Coeff::is_zero(bj) {
                        acc = &acc + &dj.scale(bj);
                    }
                }
                acc
            })
            .collect();
        Self::new(Arc::new(OrbitModule::new(gens)), v, delta)
    }

    /// Exact zero test: after cyclic reduction the function vanishes iff
    /// the restricted covector does.
    pub fn is_zero(&self) -> bool {
        let red = self.reduce();
        red.v.iter().all(|s| s.is_zero()) || red.delta.iter().all(|s| s.is_zero())
    }

    pub fn equals(&self, other: &RepFunction) -> bool {
        self.sub(other).is_zero()
    }

    /// Numeric view at a fixed value of ħ.
    pub fn to_numeric(&self, hbar: Complex64) -> NumericRepFunction {
        NumericRepFunction {
            gens: (0..self.module.num_gens())
                .map(|i| self.module.gen(i).to_complex())
                .collect(),
            v: self.v.iter().map(|s| s.eval_complex(hbar)).collect(),
            delta: self.delta.iter().map(|s| s.eval_complex(hbar)).collect(),
        }
    }

    pub fn taylor_coeff(&self, k: usize, hbar: Complex64) -> f64 {
        self.to_numeric(hbar).taylor_coeff(k)
    }

    pub fn seminorm_q(
        &self,
        r: f64,
        c: f64,
        hbar: Complex64,
    ) -> Result<SeminormInterval, LiestarError> {
        self.to_numeric(hbar).seminorm_q(r, c)
    }

    pub fn norm_finite_order(
        &self,
        r: f64,
        eps: f64,
        hbar: Complex64,
    ) -> Result<SeminormInterval, LiestarError> {
        self.to_numeric(hbar).norm_finite_order(r, eps)
    }

    pub fn evaluate_point(
        &self,
        g: &GroupElement,
        hbar: Complex64,
    ) -> Result<Complex64, LiestarError> {
        self.to_numeric(hbar).evaluate_point(g)
    }

    /// Pullback along right translation by `g`: v ↦ π(g)·v, numerically.
    pub fn right_translate(
        &self,
        g: &GroupElement,
        hbar: Complex64,
    ) -> Result<NumericRepFunction, LiestarError> {
        self.to_numeric(hbar).right_translate(g)
    }
}

fn check_lie_morphism(
    t: &[Vec<Rational>],
    domain: &LieAlgebra,
    codomain: &LieAlgebra,
) -> Result<(), LiestarError> {
    let (n_g, n_h) = (domain.dim(), codomain.dim());
    if t.len() != n_h || t.iter().any(|row| row.len() != n_g) {
        return Err(LiestarError::DimensionMismatch {
            expected: n_h,
            got: t.len(),
        });
    }
    for i in 0..n_g {
        for j in (i + 1)..n_g {
            // T[e_i, e_j]_G as a vector in 𝔥.
            let mut lhs = vec![Rational::zero(); n_h];
            for (k, q) in domain.bracket_basis(i, j) {
                for (a, row) in t.iter().enumerate() {
                    lhs[a] += &row[k] * &q;
                }
            }
            let ti: Vec<Rational> = t.iter().map(|row| row[i].clone()).collect();
            let tj: Vec<Rational> = t.iter().map(|row| row[j].clone()).collect();
            let rhs = codomain.bracket(&ti, &tj)?;
            if lhs != rhs {
                return Err(LiestarError::NotLieMorphism(i, j));
            }
        }
    }
    Ok(())
}

/// Representative function with numeric (Complex64) data, produced by
/// substituting ħ or by group translations.
#[derive(Clone, Debug)]
pub struct NumericRepFunction {
    pub gens: Vec<CMat>,
    pub v: Vec<Complex64>,
    pub delta: Vec<Complex64>,
}

/// Tuning knobs for the certified seminorm evaluation.
#[derive(Clone, Copy, Debug)]
pub struct SeminormOptions {
    /// Budget for exact tuple enumeration, in visited nodes.
    pub node_budget: usize,
    /// Cap on the exactly enumerated degree.
    pub max_exact_degree: usize,
    /// Hard cap on majorant recursion depth.
    pub degree_cap: usize,
    /// Stop once the certified tail is below max(abs_tol, rel_tol·partial).
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for SeminormOptions {
    fn default() -> Self {
        Self {
            node_budget: 600_000,
            max_exact_degree: 24,
            degree_cap: 400,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
        }
    }
}

impl NumericRepFunction {
    fn dim(&self) -> usize {
        self.v.len()
    }

    fn pair(&self, w: &[Complex64]) -> Complex64 {
        self.delta.iter().zip(w).map(|(d, x)| d * x).sum()
    }

    /// S_k = Σ_{α ∈ N_n^k} |δ·A_α·v| for k = 0..=kmax by depth-first
    /// enumeration.
    fn tuple_sums(&self, kmax: usize) -> Vec<f64> {
        let mut out = vec![0.0; kmax + 1];
        let mut stack: Vec<(usize, Vec<Complex64>)> = vec![(0, self.v.clone())];
        while let Some((depth, w)) = stack.pop() {
            out[depth] += self.pair(&w).norm();
            if depth < kmax {
                for g in &self.gens {
                    stack.push((depth + 1, g.matvec(&w)));
                }
            }
        }
        out
    }

    /// c_k(φ) = S_k / k!.
    pub fn taylor_coeff(&self, k: usize) -> f64 {
        let s = self.tuple_sums(k);
        s[k] / crate::sym::factorial_pow_f64(k, 1.0)
    }

    pub fn seminorm_q(&self, r: f64, c: f64) -> Result<SeminormInterval, LiestarError> {
        self.seminorm_q_opts(r, c, &SeminormOptions::default())
    }

    /// Certified interval for q_{R,c} = Σ_k k!^{R−1} c^k S_k.
    ///
    /// Exactly enumerated degrees contribute to both bounds. Above the
    /// enumeration budget the entrywise majorant chain u_{k+1} = B·u_k with
    /// B = Σ_i |A_i| gives upper terms S_k ≤ |δ|ᵀ·u_k, and |δ·(Σ_i A_i)^k·v|
    /// gives lower terms. Once (k+2)^{R−1}·c·‖B‖₁ < 1 the remaining tail is
    /// closed by a geometric bound; a module with nilpotent majorant
    /// terminates exactly.
    pub fn seminorm_q_opts(
        &self,
        r: f64,
        c: f64,
        opts: &SeminormOptions,
    ) -> Result<SeminormInterval, LiestarError> {
        if c < 0.0 {
            return Err(LiestarError::NegativeWeight(c));
        }
        let m = self.dim();
        let n = self.gens.len();
        let k_exact = exact_depth(n, m, opts);
        let s = self.tuple_sums(k_exact);

        let mut lower = 0.0;
        let mut upper = 0.0;
        let mut ln_weight = 0.0; // ln(k!^{R−1} c^k)
        for (k, sk) in s.iter().enumerate() {
            if k > 0 {
                ln_weight += (r - 1.0) * (k as f64).ln() + safe_ln(c);
            }
            let slack = 1e-13 * ((k + 1) * m) as f64 + 1e-14;
            let term = ln_weight.exp() * sk;
            lower += term * (1.0 - slack);
            upper += term * (1.0 + slack);
        }
        if c == 0.0 {
            return Ok(SeminormInterval {
                lower,
                upper,
                truncation: k_exact,
            });
        }

        // Majorant chain above the exact range.
        let b = self.majorant_matrix();
        let b_norm = b.l1_norm() * (1.0 + 1e-13);
        let d_abs: Vec<f64> = self.delta.iter().map(|z| z.norm()).collect();
        let mut u: Vec<f64> = self.v.iter().map(|z| z.norm()).collect();
        let csum: CMat = {
            let mut acc = CMat::zeros(m, m);
            for g in &self.gens {
                acc = acc.add_mat(g);
            }
            acc
        };
        let mut w = self.v.clone();
        for _ in 0..=k_exact {
            u = b.matvec(&u);
            w = csum.matvec(&w);
        }
        // u now corresponds to degree k_exact+1.
        let mut k = k_exact + 1;
        let mut ln_w = ln_weight;
        loop {
            if u.iter().all(|&x| x == 0.0) {
                // Nilpotent majorant: the series is a finite sum.
                return Ok(SeminormInterval {
                    lower,
                    upper,
                    truncation: k - 1,
                });
            }
            if k > opts.degree_cap {
                return Err(LiestarError::NoCertifiedBound { r, degree: k });
            }
            ln_w += (r - 1.0) * (k as f64).ln() + safe_ln(c);
            let slack = 1e-12 * (k as f64 + 1.0);
            let upper_term: f64 = d_abs
                .iter()
                .zip(&u)
                .map(|(d, x)| d * x)
                .sum::<f64>()
                * ln_w.exp();
            let lower_term = self.pair(&w).norm() * ln_w.exp();
            upper += upper_term * (1.0 + slack);
            lower += lower_term.min(upper_term) * (1.0 - slack);
            // Geometric closure when the term ratio has dropped below one.
            let ratio = ((k + 1) as f64).powf(r - 1.0) * c * b_norm;
            if ratio < 1.0 {
                let next = upper_term * ratio / (1.0 - ratio);
                if next < opts.abs_tol.max(opts.rel_tol * lower) || k >= opts.degree_cap {
                    upper += next * (1.0 + 1e-12);
                    return Ok(SeminormInterval {
                        lower,
                        upper,
                        truncation: k,
                    });
                }
            }
            u = b.matvec(&u);
            w = csum.matvec(&w);
            k += 1;
        }
    }

    /// Lower bound by partial sums only (no tail certification); always
    /// succeeds. Values are clamped to avoid float overflow.
    pub fn seminorm_q_lower(&self, r: f64, c: f64, max_degree: usize) -> f64 {
        let m = self.dim();
        let n = self.gens.len();
        let opts = SeminormOptions::default();
        let k_exact = exact_depth(n, m, &opts).min(max_degree);
        let s = self.tuple_sums(k_exact);
        let mut lower = 0.0_f64;
        let mut ln_weight = 0.0;
        for (k, sk) in s.iter().enumerate() {
            if k > 0 {
                ln_weight += (r - 1.0) * (k as f64).ln() + safe_ln(c);
            }
            let slack = 1e-13 * ((k + 1) * m) as f64 + 1e-14;
            lower += ln_weight.exp() * sk * (1.0 - slack);
        }
        // Extend with the coarse lower bound |δ·(ΣA_i)^k·v|.
        let csum: CMat = {
            let mut acc = CMat::zeros(m, m);
            for g in &self.gens {
                acc = acc.add_mat(g);
            }
            acc
        };
        let mut w = self.v.clone();
        for _ in 0..=k_exact {
            w = csum.matvec(&w);
        }
        let mut ln_w = ln_weight;
        for k in (k_exact + 1)..=max_degree {
            ln_w += (r - 1.0) * (k as f64).ln() + safe_ln(c);
            let t = self.pair(&w).norm() * ln_w.exp();
            if t.is_finite() {
                lower += t * (1.0 - 1e-11);
            }
            w = csum.matvec(&w);
            if !w.iter().all(|z| z.norm().is_finite()) {
                break;
            }
        }
        lower.min(1e290)
    }

    fn majorant_matrix(&self) -> Mat<f64> {
        let m = self.dim();
        let mut b = Mat::<f64>::zeros(m, m);
        for g in &self.gens {
            b = b.add_mat(&g.abs_entries());
        }
        b
    }

    /// ‖φ‖_{R,ε} = sup_{t≥0} Maj_φ(t)·exp(−ε t^{1/R}) by certified grid
    /// search; the sup of the entire-majorant weighted by the stretched
    /// exponential is attained on the positive real axis since all series
    /// coefficients are nonnegative.
    pub fn norm_finite_order(&self, r: f64, eps: f64) -> Result<SeminormInterval, LiestarError> {
        assert!(r > 0.0 && eps > 0.0);
        let m = self.dim();
        let n = self.gens.len();
        let opts = SeminormOptions::default();
        let k_exact = exact_depth(n, m, &opts);
        let s = self.tuple_sums(k_exact);
        // Per-degree data for Maj(t) = Σ S_k t^k / k!: exact coefficients,
        // then majorant uppers and |δC^k v| lowers.
        let b = self.majorant_matrix();
        let b_norm = b.l1_norm() * (1.0 + 1e-13) + 1e-300;
        let csum: CMat = {
            let mut acc = CMat::zeros(m, m);
            for g in &self.gens {
                acc = acc.add_mat(g);
            }
            acc
        };
        let kmax = opts.degree_cap;
        let mut upper_coeff = vec![0.0; kmax + 1];
        let mut lower_coeff = vec![0.0; kmax + 1];
        for (k, sk) in s.iter().enumerate() {
            let slack = 1e-13 * ((k + 1) * m) as f64 + 1e-14;
            upper_coeff[k] = sk * (1.0 + slack);
            lower_coeff[k] = sk * (1.0 - slack);
        }
        let d_abs: Vec<f64> = self.delta.iter().map(|z| z.norm()).collect();
        let mut u: Vec<f64> = self.v.iter().map(|z| z.norm()).collect();
        let mut w = self.v.clone();
        for _ in 0..=k_exact {
            u = b.matvec(&u);
            w = csum.matvec(&w);
        }
        for k in (k_exact + 1)..=kmax {
            let su: f64 = d_abs.iter().zip(&u).map(|(d, x)| d * x).sum();
            let sl = self.pair(&w).norm();
            upper_coeff[k] = su * (1.0 + 1e-11);
            lower_coeff[k] = sl.min(su) * (1.0 - 1e-11);
            u = b.matvec(&u);
            w = csum.matvec(&w);
        }
        // Beyond kmax use the scalar bound S_k ≤ ‖δ‖_∞ ‖v‖₁ ‖B‖₁^k, giving
        // Maj tail ≤ M₀ Σ_{k>kmax} (b_norm t)^k/k!, and cap the search at a
        // T where the global envelope M₀·exp(b_norm·t − ε t^{1/R}) has
        // started decreasing.
        let m0 = d_abs.iter().cloned().fold(0.0, f64::max)
            * self.v.iter().map(|z| z.norm()).sum::<f64>()
            + 1e-300;
        let mut t_end = 1.0_f64;
        loop {
            let decreasing = b_norm < (eps / r) * t_end.powf(1.0 / r - 1.0);
            let env = m0.ln() + b_norm * t_end - eps * t_end.powf(1.0 / r);
            if decreasing && env < -60.0 {
                break;
            }
            t_end *= 2.0;
            if t_end > 1e12 {
                return Err(LiestarError::NoCertifiedBound { r, degree: kmax });
            }
        }
        let tail_sup = m0 * (b_norm * t_end - eps * t_end.powf(1.0 / r)).exp();

        let maj_upper = |t: f64| -> Result<f64, LiestarError> {
            let mut acc = 0.0;
            let mut ln_w = 0.0;
            for (k, uc) in upper_coeff.iter().enumerate() {
                if k > 0 {
                    ln_w += safe_ln(t) - (k as f64).ln();
                }
                acc += uc * ln_w.exp();
            }
            // Scalar tail of the exponential series.
            let x = b_norm * t;
            let k0 = kmax + 1;
            if x > 0.0 {
                let ratio = x / (k0 as f64 + 1.0);
                if ratio >= 1.0 {
                    return Err(LiestarError::NoCertifiedBound { r, degree: k0 });
                }
                let ln_t0 = (k0 as f64) * x.ln() - crate::sym::ln_factorial(k0);
                acc += m0 * ln_t0.exp() / (1.0 - ratio);
            }
            Ok(acc * (1.0 + 1e-11))
        };
        let maj_lower = |t: f64| -> f64 {
            let mut acc = 0.0;
            let mut ln_w = 0.0;
            for (k, lc) in lower_coeff.iter().enumerate() {
                if k > 0 {
                    ln_w += safe_ln(t) - (k as f64).ln();
                }
                acc += lc * ln_w.exp();
            }
            acc * (1.0 - 1e-11)
        };

        let cells = 4096;
        let mut best_lower: f64 = 0.0;
        let mut best_upper: f64 = tail_sup;
        for i in 0..cells {
            let a = t_end * i as f64 / cells as f64;
            let bpt = t_end * (i + 1) as f64 / cells as f64;
            let mid = 0.5 * (a + bpt);
            let fl = maj_lower(mid) * (-eps * mid.powf(1.0 / r)).exp();
            best_lower = best_lower.max(fl);
            let fu = maj_upper(bpt)? * (-eps * a.powf(1.0 / r)).exp();
            best_upper = best_upper.max(fu);
        }
        // Include the endpoint t = 0 (value = S_0 bounds).
        best_lower = best_lower.max(lower_coeff[0]);
        best_upper = best_upper.max(upper_coeff[0]);
        Ok(SeminormInterval {
            lower: best_lower,
            upper: best_upper,
            truncation: kmax,
        })
    }

    /// π(g) for a group element description.
    pub fn group_matrix(&self, g: &GroupElement) -> Result<CMat, LiestarError> {
        match g {
            GroupElement::Matrix(m) => {
                if m.rows != self.dim() || m.cols != self.dim() {
                    return Err(LiestarError::DimensionMismatch {
                        expected: self.dim(),
                        got: m.rows,
                    });
                }
                Ok(m.clone())
            }
            GroupElement::ExpCoords(x) => {
                if x.len() != self.gens.len() {
                    return Err(LiestarError::DimensionMismatch {
                        expected: self.gens.len(),
                        got: x.len(),
                    });
                }
                let mut acc = CMat::zeros(self.dim(), self.dim());
                for (xi, g) in x.iter().zip(&self.gens) {
                    acc = acc.add_mat(&g.scale(&Complex64::new(*xi, 0.0)));
                }
                Ok(expm(&acc))
            }
        }
    }

    pub fn evaluate_point(&self, g: &GroupElement) -> Result<Complex64, LiestarError> {
        let pg = self.group_matrix(g)?;
        Ok(self.pair(&pg.matvec(&self.v)))
    }

    /// Partial Lie-Taylor sum Σ_{k≤K} (1/k!)·δ·(Σ x_i A_i)^k·v.
    pub fn taylor_partial_sum(&self, x: &[f64], kmax: usize) -> Complex64 {
        let mut acc = CMat::zeros(self.dim(), self.dim());
        for (xi, g) in x.iter().zip(&self.gens) {
            acc = acc.add_mat(&g.scale(&Complex64::new(*xi, 0.0)));
        }
        let mut w = self.v.clone();
        let mut total = self.pair(&w);
        for k in 1..=kmax {
            w = acc.matvec(&w);
            for z in w.iter_mut() {
                *z /= k as f64;
            }
            total += self.pair(&w);
        }
        total
    }

    pub fn right_translate(&self, g: &GroupElement) -> Result<NumericRepFunction, LiestarError> {
        let pg = self.group_matrix(g)?;
        Ok(NumericRepFunction {
            gens: self.gens.clone(),
            v: pg.matvec(&self.v),
            delta: self.delta.clone(),
        })
    }
}

fn exact_depth(n: usize, _m: usize, opts: &SeminormOptions) -> usize {
    let mut nodes: usize = 1;
    let mut k = 0;
    let mut layer: usize = 1;
    while k < opts.max_exact_degree {
        let next = layer.saturating_mul(n.max(1));
        if nodes.saturating_add(next) > opts.node_budget {
            break;
        }
        nodes += next;
        layer = next;
        k += 1;
    }
    k
}

fn safe_ln(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// Stock orbit modules matching the algebras in [`crate::lie::fixtures`].
pub mod fixtures {
    use super::*;
    use crate::arith::{rat, rat_i64};

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_rational(rat_i64(n, d))
    }

    fn qi(n: i64, d: i64) -> GaussianRational {
        GaussianRational::new(rat(0), rat_i64(n, d))
    }

    fn ones(m: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); m];
        v[0] = Scalar::one();
        v
    }

    /// exp on (ℝ, +): one-dimensional orbit with A₁ = (1).
    pub fn exp_module() -> RepFunction {
        let a = QMat::from_rows(vec![vec![GaussianRational::one()]]);
        RepFunction::new(
            Arc::new(OrbitModule::new(vec![a])),
            vec![Scalar::one()],
            vec![Scalar::one()],
        )
    }

    /// e^{ikθ} on the circle: A₁ = (ik).
    pub fn circle(k: i64) -> RepFunction {
        let a = QMat::from_rows(vec![vec![qi(k, 1)]]);
        RepFunction::new(
            Arc::new(OrbitModule::new(vec![a])),
            vec![Scalar::one()],
            vec![Scalar::one()],
        )
    }

    /// Standard nilpotent 3×3 module for the Heisenberg algebra:
    /// A₁ = E₁₂, A₂ = E₂₃, A₃ = E₁₃.
    pub fn heisenberg_module() -> Arc<OrbitModule> {
        let mut a1 = QMat::zeros(3, 3);
        a1.set(0, 1, GaussianRational::one());
        let mut a2 = QMat::zeros(3, 3);
        a2.set(1, 2, GaussianRational::one());
        let mut a3 = QMat::zeros(3, 3);
        a3.set(0, 2, GaussianRational::one());
        Arc::new(OrbitModule::new(vec![a1, a2, a3]))
    }

    /// su(2) defining representation of so(3): A_j = −(i/2)σ_j.
    pub fn su2_module() -> Arc<OrbitModule> {
        let a1 = QMat::from_rows(vec![
            vec![GaussianRational::zero(), qi(-1, 2)],
            vec![qi(-1, 2), GaussianRational::zero()],
        ]);
        let a2 = QMat::from_rows(vec![
            vec![GaussianRational::zero(), q(-1, 2)],
            vec![q(1, 2), GaussianRational::zero()],
        ]);
        let a3 = QMat::from_rows(vec![
            vec![qi(-1, 2), GaussianRational::zero()],
            vec![GaussianRational::zero(), qi(1, 2)],
        ]);
        Arc::new(OrbitModule::new(vec![a1, a2, a3]))
    }

    /// Adjoint module of any algebra: A_i = ad(e_i).
    pub fn adjoint_module(alg: &LieAlgebra) -> Arc<OrbitModule> {
        let n = alg.dim();
        let gens = (0..n)
            .map(|i| {
                let mut g = QMat::zeros(n, n);
                for j in 0..n {
                    for k in 0..n {
                        let c = alg.c(i, j, k);
                        if !c.is_zero() {
                            g.set(k, j, GaussianRational::from_rational(c));
                        }
                    }
                }
                g
            })
            .collect();
        Arc::new(OrbitModule::new(gens))
    }

    /// Two-dimensional module for the affine algebra [e₂,e₁] = e₂:
    /// A₁ = diag(0,1), A₂ = E₁₂.
    pub fn affine2_module() -> Arc<OrbitModule> {
        let mut a1 = QMat::zeros(2, 2);
        a1.set(1, 1, GaussianRational::one());
        let mut a2 = QMat::zeros(2, 2);
        a2.set(0, 1, GaussianRational::one());
        Arc::new(OrbitModule::new(vec![a1, a2]))
    }

    /// π₁₁ of the su(2) defining representation.
    pub fn su2_coefficient() -> RepFunction {
        RepFunction::new(su2_module(), ones(2), ones(2))
    }

    pub fn heisenberg_function() -> RepFunction {
        let v = vec![Scalar::zero(), Scalar::zero(), Scalar::one()];
        let delta = vec![Scalar::one(), Scalar::one(), Scalar::one()];
        RepFunction::new(heisenberg_module(), v, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::arith::{rat, rat_i64};
    use crate::lie::fixtures as lie_fixtures;

    const HB: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn validate_modules() {
        assert!(exp_module()
            .module
            .validate(&lie_fixtures::abelian(1))
            .is_ok());
        assert!(circle(3).module.validate(&lie_fixtures::abelian(1)).is_ok());
        assert!(heisenberg_module()
            .validate(&lie_fixtures::heisenberg())
            .is_ok());
        assert!(su2_module().validate(&lie_fixtures::so3()).is_ok());
        assert!(affine2_module().validate(&lie_fixtures::affine2()).is_ok());
        for alg in lie_fixtures::all() {
            assert!(adjoint_module(&alg).validate(&alg).is_ok(), "{}", alg.name());
        }
        // Negating one generator of a nonabelian module breaks the bracket.
        let good = su2_module();
        let bad = OrbitModule::new(vec![
            good.gen(0).neg(),
            good.gen(1).clone(),
            good.gen(2).clone(),
        ]);
        assert!(matches!(
            bad.validate(&lie_fixtures::so3()),
            Err(LiestarError::ModuleCommutation(..))
        ));
    }

    #[test]
    fn lie_derive_examples() {
        let e = exp_module();
        let d = e.lie_derive(&[rat(1)]).unwrap();
        assert!(d.equals(&e)); // eigenvector with eigenvalue 1
        let c = circle(2);
        let dc = c.lie_derive(&[rat(1)]).unwrap();
        let expected = c.scale(&Scalar::constant(GaussianRational::new(rat(0), rat(2))));
        assert!(dc.equals(&expected)); // multiplied by 2i
        let z = e.lie_derive(&[rat(0)]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn multiply_exp_exp() {
        let e = exp_module();
        let p = e.multiply(&e);
        // c₁ = 2 and generally c_k = 2^k/k! (the function is e^{2x}).
        assert!((p.taylor_coeff(1, HB) - 2.0).abs() < 1e-12);
        assert!((p.taylor_coeff(4, HB) - 16.0 / 24.0).abs() < 1e-12);
        // φ·1 = φ up to module embedding.
        let one = RepFunction::constant(1, Scalar::one());
        let q = e.multiply(&one);
        assert!(q.equals(&e));
        // Leibniz: Maj_{φψ}(1) ≤ Maj_φ(1)·Maj_ψ(1).
        let lhs = p.seminorm_q(0.0, 1.0, HB).unwrap();
        let rhs = e.seminorm_q(0.0, 1.0, HB).unwrap();
        assert!(lhs.lower <= rhs.upper * rhs.upper * (1.0 + 1e-12));
    }

    #[test]
    fn seminorm_q_exp_contains_e() {
        let e = exp_module();
        let q = e.seminorm_q(0.0, 1.0, HB).unwrap();
        let target = std::f64::consts::E;
        assert!(q.lower <= target && target <= q.upper);
        assert!(q.width() < 1e-9, "width = {}", q.width());
    }

    #[test]
    fn seminorm_q_at_zero_weight() {
        let c = circle(5);
        let q = c.seminorm_q(0.7, 0.0, HB).unwrap();
        assert!((q.lower - 1.0).abs() < 1e-12 && (q.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seminorm_q_circle_is_exp_c() {
        // c_k(e^{iθ}) = 1/k!, so q_{0,c} = e^c.
        let c = circle(1);
        for cc in [0.5, 1.0, 2.0] {
            let q = c.seminorm_q(0.0, cc, HB).unwrap();
            let target = cc.exp();
            assert!(q.lower <= target && target <= q.upper);
            assert!(q.width() < 1e-8);
        }
    }

    #[test]
    fn seminorm_q_divergence_detected() {
        // R ≥ 1 with a non-nilpotent module cannot be certified.
        let e = exp_module();
        assert!(matches!(
            e.seminorm_q(1.5, 1.0, HB),
            Err(LiestarError::NoCertifiedBound { .. })
        ));
        // R = 1 with c·‖B‖ < 1 is geometric and certifiable.
        assert!(e.seminorm_q(1.0, 0.5, HB).is_ok());
        // Nilpotent modules are certifiable for every R.
        let h = heisenberg_function();
        assert!(h.seminorm_q(3.0, 2.0, HB).is_ok());
    }

    #[test]
    fn norm_finite_order_const_is_one() {
        let one = RepFunction::constant(1, Scalar::one());
        let n = one.norm_finite_order(0.5, 1.0, HB).unwrap();
        assert!(n.lower <= 1.0 + 1e-9 && n.upper >= 1.0 - 1e-9);
        assert!(n.upper <= 1.0 + 1e-6);
    }

    #[test]
    fn norm_finite_order_exp_vs_taylor() {
        // ‖φ‖_{R,ε} ≤ q_{R,(R/ε)^R}(φ) for R = ½, ε = 1.
        let e = exp_module();
        let norm = e.norm_finite_order(0.5, 1.0, HB).unwrap();
        let q = e.seminorm_q(0.5, 0.5f64.sqrt(), HB).unwrap();
        assert!(norm.upper.is_finite());
        assert!(norm.lower <= q.upper * (1.0 + 1e-9));
        // And the reverse comparison q_{R,c} ≤ ‖·‖_{R,ε}/(1 − c(eε/R)^R)
        // for c(eε/R)^R < 1: take c = 0.1.
        let cfac = 0.1 * (std::f64::consts::E * 1.0 / 0.5f64).powf(0.5);
        assert!(cfac < 1.0);
        let q2 = e.seminorm_q(0.5, 0.1, HB).unwrap();
        assert!(q2.lower <= norm.upper / (1.0 - cfac) * (1.0 + 1e-9));
    }

    #[test]
    fn evaluate_and_taylor_partial() {
        let e = exp_module();
        let v = e
            .evaluate_point(&GroupElement::ExpCoords(vec![1.0]), HB)
            .unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-10);
        let v0 = e
            .evaluate_point(&GroupElement::ExpCoords(vec![0.0]), HB)
            .unwrap();
        assert!((v0.re - 1.0).abs() < 1e-14);
        // su(2) coefficient: Taylor partial sums against the matrix
        // exponential.
        let phi = su2_coefficient();
        let num = phi.to_numeric(HB);
        for x in [[0.3, -0.7, 0.5], [1.0, 1.0, -1.0], [0.0, 0.0, 1.0]] {
            let direct = num.evaluate_point(&GroupElement::ExpCoords(x.to_vec())).unwrap();
            let partial = num.taylor_partial_sum(&x, 30);
            assert!((direct - partial).norm() < 1e-6);
        }
    }

    #[test]
    fn right_translate_examples() {
        let e = exp_module();
        let id = e
            .right_translate(&GroupElement::ExpCoords(vec![0.0]), HB)
            .unwrap();
        assert!((id.taylor_coeff(3) - e.taylor_coeff(3, HB)).abs() < 1e-12);
        // Translating exp by t scales every c_k by e^t.
        let t = 0.8;
        let tr = e
            .right_translate(&GroupElement::ExpCoords(vec![t]), HB)
            .unwrap();
        for k in 0..6 {
            let expected = e.taylor_coeff(k, HB) * t.exp();
            assert!((tr.taylor_coeff(k) - expected).abs() < 1e-10);
        }
        // Translation estimate: q_{0,c}(φ∘r_g) ≤ Maj_φ(c + ‖ξ‖_∞).
        let lhs = tr.seminorm_q(0.0, 1.0).unwrap();
        let rhs = e.seminorm_q(0.0, 1.0 + t, HB).unwrap();
        assert!(lhs.lower <= rhs.upper * (1.0 + 1e-9));
    }

    #[test]
    fn inversion_pullback_exact_ck() {
        // c_k(φ∘inv) = c_k(φ): term by term, δ′·A′_α·v′ = (−1)^k δ·A_rev(α)·v.
        let m = su2_module();
        let phi = RepFunction::new(
            m,
            vec![Scalar::from_i64(2), Scalar::from_rational(rat_i64(1, 3))],
            vec![Scalar::one(), Scalar::from_i64(-1)],
        );
        let inv = phi.inversion_pullback();
        let n = 3usize;
        for k in 0..=5 {
            let mut tuples = vec![vec![]];
            for _ in 0..k {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t: Vec<usize>| {
                        (0..n).map(move |i| {
                            let mut s = t.clone();
                            s.push(i);
                            s
                        })
                    })
                    .collect();
            }
            for t in tuples {
                let mut rev = t.clone();
                rev.reverse();
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(
                    inv.word_value(&t),
                    phi.word_value(&rev).scale(&GaussianRational::from_i64(sign))
                );
            }
        }
        for k in 0..=6 {
            assert!((inv.taylor_coeff(k, HB) - phi.taylor_coeff(k, HB)).abs() < 1e-10);
        }
    }

    #[test]
    fn morphism_pullback_examples() {
        let g1 = lie_fixtures::abelian(1);
        let e = exp_module();
        // Identity morphism.
        let id = e
            .morphism_pullback(&[vec![rat(1)]], &g1, &g1)
            .unwrap();
        assert!(id.equals(&e));
        // Zero morphism: constant function φ(e).
        let z = e
            .morphism_pullback(&[vec![rat(0)]], &g1, &g1)
            .unwrap();
        assert!((z.taylor_coeff(0, HB) - 1.0).abs() < 1e-14);
        assert!(z.taylor_coeff(1, HB).abs() < 1e-14);
        // Scaling t ↦ 2t multiplies c_k by 2^k.
        let s = e
            .morphism_pullback(&[vec![rat(2)]], &g1, &g1)
            .unwrap();
        for k in 0..6 {
            let expected = e.taylor_coeff(k, HB) * 2f64.powi(k as i32);
            assert!((s.taylor_coeff(k, HB) - expected).abs() < 1e-10);
        }
        // A non-morphism is rejected: map heisenberg to abelian³ by the
        // identity matrix.
        let h = lie_fixtures::heisenberg();
        let a3 = lie_fixtures::abelian(3);
        let idm: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
            .collect();
        let phi = heisenberg_function();
        assert!(matches!(
            phi.morphism_pullback(&idm, &h, &a3),
            Err(LiestarError::NotLieMorphism(..))
        ));
    }

    #[test]
    fn per_tuple_representative_estimate() {
        // q_α(φ) ≤ Δ·Ψ^k·‖φ‖ for every tuple α, with ℓ¹ norms.
        let phi = su2_coefficient();
        let num = phi.to_numeric(HB);
        let psi: f64 = num.gens.iter().map(|g| g.l1_norm()).fold(0.0, f64::max);
        let delta: f64 = num.delta.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let vnorm: f64 = num.v.iter().map(|z| z.norm()).sum();
        let n = 3usize;
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..4 {
            tuples = tuples
                .into_iter()
                .flat_map(|t: Vec<usize>| {
                    (0..n).map(move |i| {
                        let mut s = t.clone();
                        s.push(i);
                        s
                    })
                })
                .collect();
        }
        for t in tuples {
            let val = phi.word_value(&t).eval_complex(HB).norm();
            let bound = delta * psi.powi(t.len() as i32) * vnorm;
            assert!(val <= bound * (1.0 + 1e-9), "tuple {:?}", t);
        }
    }

    #[test]
    fn differentiation_estimates_per_degree() {
        // c_k(L_ξ φ) ≤ ‖ξ‖_∞ (k+1) c_{k+1}(φ) and
        // q_{R,c}(L_ξ φ) ≤ ‖ξ‖_∞ q_{R,c+1}(φ).
        let phi = su2_coefficient();
        let xi = vec![rat(1), rat_i64(-1, 2), rat(2)];
        let xin = 2.0;
        let d = phi.lie_derive(&xi).unwrap();
        for k in 0..6 {
            let lhs = d.taylor_coeff(k, HB);
            let rhs = xin * (k + 1) as f64 * phi.taylor_coeff(k + 1, HB);
            assert!(lhs <= rhs * (1.0 + 1e-9), "k = {}", k);
        }
        let lhs = d.seminorm_q(0.5, 1.0, HB).unwrap();
        let rhs = phi.seminorm_q(0.5, 2.0, HB).unwrap();
        assert!(lhs.lower <= xin * rhs.upper * (1.0 + 1e-9));
    }

    #[test]
    fn reduce_shrinks_tensor_squares() {
        let e = exp_module();
        let p = e.multiply(&e).multiply(&e); // 1-dim orbit in an 1×1×1 tensor
        let r = p.reduce();
        assert_eq!(r.module.dim(), 1);
        assert!(r.equals(&p));
        // Heisenberg coefficient times itself: reduction keeps values.
        let h = heisenberg_function();
        let hh = h.multiply(&h);
        let red = hh.reduce();
        assert!(red.module.dim() <= hh.module.dim());
        for word in [vec![], vec![0], vec![1, 0], vec![2, 1, 0]] {
            assert_eq!(red.word_value(&word), hh.word_value(&word));
        }
    }

    #[test]
    fn zero_detection() {
        let e = exp_module();
        assert!(!e.is_zero());
        assert!(e.sub(&e).is_zero());
        let z = RepFunction::zero(1);
        assert!(z.is_zero());
        // δ orthogonal to the orbit of v.
        let m = Arc::new(OrbitModule::new(vec![QMat::zeros(2, 2)]));
        let f = RepFunction::new(
            m,
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        );
        assert!(f.is_zero());
    }
}
