//! Sparse symmetric algebra Sym(𝔤)⊗ℂ over a fixed basis, with the
//! R′-seminorm family and momentum evaluation.
//!
//! Monomials are kept in canonical sorted form, so commutativity of ∨ is
//! structural. Within a fixed degree, seminorms of basis monomials are 1 for
//! the ℓ¹ tensor-power norm, which makes the weighted seminorms a plain sum
//! over stored terms.

use crate::arith::{factorial, GaussianRational, Rational, Scalar};
use crate::error::LiestarError;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;

/// Commutative basis monomial: nondecreasing sequence of 0-based basis
/// indices. The empty sequence is the unit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(vec![])
    }

    pub fn basis(i: usize) -> Self {
        Monomial(vec![i])
    }

    /// Canonicalize an arbitrary index sequence by sorting.
    pub fn from_indices(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        Monomial(idx)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Merge two sorted index sequences.
    pub fn merge(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x <= y {
                        out.push(x);
                        a.next();
                    } else {
                        out.push(y);
                        b.next();
                    }
                }
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// Multiplicity of each distinct index, in increasing index order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, m)) if *j == i => *m += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    /// Remove one occurrence of index `i`; `None` if absent.
    pub fn remove_one(&self, i: usize) -> Option<Monomial> {
        let pos = self.0.iter().position(|&j| j == i)?;
        let mut idx = self.0.clone();
        idx.remove(pos);
        Some(Monomial(idx))
    }

    /// Remove a sub-multiset given as (index, count) pairs; `None` if not
    /// contained.
    pub fn remove_multiset(&self, sub: &[(usize, usize)]) -> Option<Monomial> {
        let mut idx = self.0.clone();
        for &(i, cnt) in sub {
            for _ in 0..cnt {
                let pos = idx.iter().position(|&j| j == i)?;
                idx.remove(pos);
            }
        }
        Some(Monomial(idx))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("e{}", i + 1)).collect();
        write!(f, "{}", parts.join("∨"))
    }
}

/// Element of Sym(𝔤)⊗ℂ: sparse map from monomials to ħ-polynomial scalars.
#[derive(Clone, PartialEq)]
pub struct SymPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SymPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(dim: usize) -> Self {
        Self::monomial(dim, Monomial::unit(), Scalar::one())
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, Monomial::basis(i), Scalar::one())
    }

    pub fn monomial(dim: usize, m: Monomial, coef: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            assert!(m.indices().iter().all(|&i| i < dim));
            terms.insert(m, coef);
        }
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Top symmetric degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Monomial, coef: &Scalar) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + coef;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SymPoly) -> Result<SymPoly, LiestarError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> SymPoly {
        SymPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> SymPoly {
        if s.is_zero() {
            return SymPoly::zero(self.dim);
        }
        SymPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Symmetric tensor product ∨ (bilinear merge of index sequences).
    pub fn sym_multiply(&self, other: &SymPoly) -> Result<SymPoly, LiestarError> {
        self.check_dim(other)?;
        let mut out = SymPoly::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.merge(m2), &(c1 * c2));
            }
        }
        Ok(out)
    }

    /// Keep only the ħ^r part of every coefficient (as a constant).
    pub fn hbar_coefficient(&self, r: usize) -> SymPoly {
        let mut out = SymPoly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &Scalar::constant(c.coeff(r)));
        }
        out
    }

    /// Largest ħ power appearing in any coefficient.
    pub fn hbar_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.degree()).max()
    }

    pub fn conj(&self) -> SymPoly {
        SymPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// R′-weighted ℓ¹ seminorm p_{R′,c} = Σ_k k!^{R′} c^k p^k at a numeric ħ.
    ///
    /// The k-fold projective tensor power of the basis ℓ¹-norm assigns 1 to
    /// every basis monomial, so p^k is the plain coefficient ℓ¹ sum in
    /// degree k.
    pub fn seminorm_p(&self, rp: f64, c: f64, hbar: Complex64) -> Result<f64, LiestarError> {
        if c < 0.0 {
            return Err(LiestarError::NegativeWeight(c));
        }
        let mut total = 0.0;
        for (m, coef) in &self.terms {
            let k = m.degree();
            let weight = factorial_pow_f64(k, rp) * c.powi(k as i32);
            total += weight * coef.eval_complex(hbar).norm();
        }
        Ok(total)
    }

    /// Evaluation character δ_η at a numeric point of 𝔤*.
    pub fn eval_momentum(&self, eta: &[f64], hbar: Complex64) -> Result<Complex64, LiestarError> {
        if eta.len() != self.dim {
            return Err(LiestarError::DimensionMismatch {
                expected: self.dim,
                got: eta.len(),
            });
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, coef) in &self.terms {
            let mut p = 1.0;
            for &i in m.indices() {
                p *= eta[i];
            }
            total += coef.eval_complex(hbar) * p;
        }
        Ok(total)
    }

    /// Exact evaluation character with rational momentum; the result is a
    /// polynomial in ħ.
    pub fn eval_momentum_exact(&self, eta: &[Rational]) -> Result<Scalar, LiestarError> {
        if eta.len() != self.dim {
            return Err(LiestarError::DimensionMismatch {
                expected: self.dim,
                got: eta.len(),
            });
        }
        let mut total = Scalar::zero();
        for (m, coef) in &self.terms {
            let mut p = Rational::from_integer(1.into());
            for &i in m.indices() {
                p *= &eta[i];
            }
            total = &total + &coef.scale(&GaussianRational::from_rational(p));
        }
        Ok(total)
    }

    fn check_dim(&self, other: &SymPoly) -> Result<(), LiestarError> {
        if self.dim != other.dim {
            return Err(LiestarError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("[{:?}]·{:?}", c, m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// k!^r as f64.
pub fn factorial_pow_f64(k: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    factorial(k).to_f64().map_or(f64::INFINITY, |x| x.powf(r))
}

/// ln(k!).
pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn e(dim: usize, i: usize) -> SymPoly {
        SymPoly::basis(dim, i)
    }

    #[test]
    fn sym_multiply_merges_sorted() {
        let p = e(3, 0).sym_multiply(&e(3, 1)).unwrap();
        assert_eq!(p.coeff(&Monomial::from_indices(vec![0, 1])), Scalar::one());
        // unit
        let q = SymPoly::unit(3).sym_multiply(&p).unwrap();
        assert_eq!(q, p);
        // bilinearity: (e₁+e₂)∨e₁ = e₁∨e₁ + e₁∨e₂
        let s = e(3, 0).add(&e(3, 1)).unwrap().sym_multiply(&e(3, 0)).unwrap();
        assert_eq!(s.coeff(&Monomial::from_indices(vec![0, 0])), Scalar::one());
        assert_eq!(s.coeff(&Monomial::from_indices(vec![0, 1])), Scalar::one());
    }

    #[test]
    fn seminorm_p_examples() {
        let h = Complex64::new(1.0, 0.0);
        // p_{1,1}(e₁∨e₂) = 2!·1²·1 = 2
        let p = e(2, 0).sym_multiply(&e(2, 1)).unwrap();
        assert_eq!(p.seminorm_p(1.0, 1.0, h).unwrap(), 2.0);
        // p_{R′,c}(1) = 1
        assert_eq!(SymPoly::unit(2).seminorm_p(3.5, 17.0, h).unwrap(), 1.0);
        // p_{0,2}(e₁ + e₁∨e₁) = 2 + 4 = 6
        let q = e(2, 0)
            .add(&e(2, 0).sym_multiply(&e(2, 0)).unwrap())
            .unwrap();
        assert_eq!(q.seminorm_p(0.0, 2.0, h).unwrap(), 6.0);
        assert!(q.seminorm_p(0.0, -1.0, h).is_err());
    }

    #[test]
    fn eval_momentum_examples() {
        let h = Complex64::new(0.0, 0.0);
        let p = e(2, 0).sym_multiply(&e(2, 1)).unwrap();
        let v = p.eval_momentum(&[2.0, 3.0], h).unwrap();
        assert_eq!(v.re, 6.0);
        // δ₀ picks out the unit coefficient
        let q = SymPoly::unit(2).add(&p).unwrap();
        assert_eq!(q.eval_momentum(&[0.0, 0.0], h).unwrap().re, 1.0);
    }

    #[test]
    fn eval_momentum_exact_is_character() {
        let eta = vec![rat(2), rat(-3)];
        let p = e(2, 0)
            .add(&e(2, 1).scale(&Scalar::hbar()))
            .unwrap();
        let q = e(2, 1).sym_multiply(&e(2, 1)).unwrap();
        let lhs = p
            .sym_multiply(&q)
            .unwrap()
            .eval_momentum_exact(&eta)
            .unwrap();
        let rhs = &p.eval_momentum_exact(&eta).unwrap() * &q.eval_momentum_exact(&eta).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(
            SymPoly::unit(2).eval_momentum_exact(&eta).unwrap(),
            Scalar::one()
        );
    }
}
