//! Poincaré–Birkhoff–Witt normal ordering in the z-scaled enveloping
//! algebra and the Lie algebra star product ⋆_𝔤 it induces on Sym(𝔤).
//!
//! The deformed relation is e_a e_b = e_b e_a + z·[e_a, e_b] with z = ħ/i,
//! so first-order commutators of the star product reproduce (ħ/i)·[·,·].

use crate::arith::Scalar;
use crate::lie::LieAlgebra;
use crate::sym::{Monomial, SymPoly};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

type Word = Vec<usize>;

/// Element of the enveloping algebra in the PBW basis of nondecreasing
/// words, with ħ-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PbwElement {
    dim: usize,
    terms: BTreeMap<Word, Scalar>,
}

impl PbwElement {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    fn add_term(&mut self, w: Word, coef: &Scalar) {
        if coef.is_zero() {
            return;
        }
        debug_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        match self.terms.entry(w) {
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

    fn add_scaled(&mut self, other: &PbwElement, coef: &Scalar) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), &(c * coef));
        }
    }

    pub fn sub(&self, other: &PbwElement) -> PbwElement {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_i64(-1));
        out
    }
}

/// Normal-ordering context for one Lie algebra; caches word rewrites,
/// monomial symmetrizations and monomial star products.
pub struct Pbw<'a> {
    alg: &'a LieAlgebra,
    cache: RefCell<HashMap<Word, PbwElement>>,
    sym_cache: RefCell<HashMap<Word, PbwElement>>,
    gutt_cache: RefCell<HashMap<(Word, Word), SymPoly>>,
}

impl<'a> Pbw<'a> {
    pub fn new(alg: &'a LieAlgebra) -> Self {
        Self {
            alg,
            cache: RefCell::new(HashMap::new()),
            sym_cache: RefCell::new(HashMap::new()),
            gutt_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.alg
    }

    /// Rewrite an arbitrary word into the PBW basis. Each swap of an
    /// out-of-order pair produces a correction term of lower degree, so the
    /// rewriting terminates.
    pub fn normalize_word(&self, word: &[usize]) -> PbwElement {
        if let Some(hit) = self.cache.borrow().get(word) {
            return hit.clone();
        }
        let out = match word.windows(2).position(|p| p[0] > p[1]) {
            None => {
                let mut out = PbwElement::zero(self.alg.dim());
                out.add_term(word.to_vec(), &Scalar::one());
                out
            }
            Some(t) => {
                let (a, b) = (word[t], word[t + 1]);
                let mut swapped = word.to_vec();
                swapped.swap(t, t + 1);
                let mut out = self.normalize_word(&swapped);
                let z = Scalar::hbar_over_i();
                for (k, q) in self.alg.bracket_basis(a, b) {
                    let mut contracted = Vec::with_capacity(word.len() - 1);
                    contracted.extend_from_slice(&word[..t]);
                    contracted.push(k);
                    contracted.extend_from_slice(&word[t + 2..]);
                    let norm = self.normalize_word(&contracted);
                    out.add_scaled(&norm, &z.scale_rational(&q));
                }
                out
            }
        };
        self.cache.borrow_mut().insert(word.to_vec(), out.clone());
        out
    }

    pub fn normalize(&self, word: &[usize], coef: &Scalar) -> PbwElement {
        let mut out = PbwElement::zero(self.alg.dim());
        out.add_scaled(&self.normalize_word(word), coef);
        out
    }

    /// PBW symmetrization σ of a single monomial: the average of the
    /// normalized words over all distinct arrangements.
    pub fn symmetrize_monomial(&self, m: &Monomial) -> PbwElement {
        if let Some(hit) = self.sym_cache.borrow().get(m.indices()) {
            return hit.clone();
        }
        let mut word = m.indices().to_vec();
        let mut out = PbwElement::zero(self.alg.dim());
        let mut count: usize = 0;
        loop {
            out.add_scaled(&self.normalize_word(&word), &Scalar::one());
            count += 1;
            if !next_permutation(&mut word) {
                break;
            }
        }
        let inv = Scalar::from_rational(crate::arith::rat_i64(1, count as i64));
        let mut scaled = PbwElement::zero(self.alg.dim());
        scaled.add_scaled(&out, &inv);
        self.sym_cache
            .borrow_mut()
            .insert(m.indices().to_vec(), scaled.clone());
        scaled
    }

    /// Cached ⋆_𝔤 product of two basis monomials.
    pub fn gutt_star_monomials(&self, a: &Monomial, b: &Monomial) -> SymPoly {
        let key = (a.indices().to_vec(), b.indices().to_vec());
        if let Some(hit) = self.gutt_cache.borrow().get(&key) {
            return hit.clone();
        }
        let out = self.unsymmetrize(
            &self.multiply(&self.symmetrize_monomial(a), &self.symmetrize_monomial(b)),
        );
        self.gutt_cache.borrow_mut().insert(key, out.clone());
        out
    }

    pub fn symmetrize(&self, p: &SymPoly) -> PbwElement {
        let mut out = PbwElement::zero(self.alg.dim());
        for (m, c) in p.terms() {
            out.add_scaled(&self.symmetrize_monomial(m), c);
        }
        out
    }

    /// Invert σ by downward degree induction: σ(monomial) is the matching
    /// word plus strictly lower-degree corrections.
    pub fn unsymmetrize(&self, u: &PbwElement) -> SymPoly {
        let mut out = SymPoly::zero(self.alg.dim());
        let mut work = u.clone();
        while let Some(d) = work.degree() {
            let mut top = SymPoly::zero(self.alg.dim());
            for (w, c) in work.terms() {
                if w.len() == d {
                    top.add_term(Monomial::from_indices(w.clone()), c);
                }
            }
            work = work.sub(&self.symmetrize(&top));
            debug_assert!(work.degree().map_or(true, |d2| d2 < d),
                "unsymmetrize failed to cancel the top degree");
            assert!(
                work.terms().all(|(w, _)| w.len() < d),
                "internal inconsistency in unsymmetrize"
            );
            out = out.add(&top).expect("same dimension");
        }
        out
    }

    /// Product in the enveloping algebra: concatenate and normal order.
    pub fn multiply(&self, u: &PbwElement, v: &PbwElement) -> PbwElement {
        let mut out = PbwElement::zero(self.alg.dim());
        for (wu, cu) in &u.terms {
            for (wv, cv) in &v.terms {
                let mut w = wu.clone();
                w.extend_from_slice(wv);
                out.add_scaled(&self.normalize_word(&w), &(cu * cv));
            }
        }
        out
    }

    /// The Lie algebra star product ⋆_𝔤 transported through σ, expanded
    /// bilinearly over the cached monomial products.
    pub fn gutt_star(&self, p: &SymPoly, q: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero(self.alg.dim());
        for (ma, ca) in p.terms() {
            for (mb, cb) in q.terms() {
                let prod = self.gutt_star_monomials(ma, mb);
                out = out
                    .add(&prod.scale(&(ca * cb)))
                    .expect("same dimension");
            }
        }
        out
    }
}

/// Convenience wrapper building a fresh context.
pub fn gutt_star(alg: &LieAlgebra, p: &SymPoly, q: &SymPoly) -> SymPoly {
    Pbw::new(alg).gutt_star(p, q)
}

/// Lexicographic next permutation; enumerates distinct multiset
/// permutations when started from the sorted word.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_i64, GaussianRational};
    use crate::lie::fixtures;
    use crate::sym::Monomial;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn hbar_times(q: (i64, i64)) -> Scalar {
        // (q.0/q.1)·iħ
        Scalar::hbar().scale(&GaussianRational::new(
            crate::arith::rat(0),
            rat_i64(q.0, q.1),
        ))
    }

    #[test]
    fn normalize_single_swap_oracle() {
        // e₂e₁ = e₁e₂ − z[e₁,e₂] = e₁e₂ + iħ·e₃ on the Heisenberg algebra.
        let h = fixtures::heisenberg();
        let pbw = Pbw::new(&h);
        let n = pbw.normalize_word(&[1, 0]);
        let mut expected = PbwElement::zero(3);
        expected.add_term(vec![0, 1], &Scalar::one());
        expected.add_term(vec![2], &hbar_times((1, 1)));
        assert_eq!(n, expected);
    }

    #[test]
    fn normalize_sorted_identity() {
        let h = fixtures::heisenberg();
        let pbw = Pbw::new(&h);
        let n = pbw.normalize_word(&[0, 1, 2]);
        assert_eq!(n.terms().count(), 1);
        let a = fixtures::abelian(3);
        let pbw = Pbw::new(&a);
        let n = pbw.normalize_word(&[2, 0, 1]);
        let mut expected = PbwElement::zero(3);
        expected.add_term(vec![0, 1, 2], &Scalar::one());
        assert_eq!(n, expected);
    }

    #[test]
    fn symmetrize_two_letter_oracle() {
        // σ(e₁∨e₂) = ½(e₁e₂ + e₂e₁) = e₁e₂ − (z/2)e₃ = e₁e₂ + (iħ/2)e₃.
        let h = fixtures::heisenberg();
        let pbw = Pbw::new(&h);
        let s = pbw.symmetrize_monomial(&Monomial::from_indices(vec![0, 1]));
        let mut expected = PbwElement::zero(3);
        expected.add_term(vec![0, 1], &Scalar::one());
        expected.add_term(vec![2], &hbar_times((1, 2)));
        assert_eq!(s, expected);
        // σ(e₁) is the one-letter word.
        let s = pbw.symmetrize_monomial(&Monomial::basis(0));
        assert_eq!(s.terms().count(), 1);
    }

    fn random_sympoly(rng: &mut StdRng, dim: usize, max_deg: usize, terms: usize) -> SymPoly {
        let mut p = SymPoly::zero(dim);
        for _ in 0..terms {
            let d = rng.gen_range(0..=max_deg);
            let idx: Vec<usize> = (0..d).map(|_| rng.gen_range(0..dim)).collect();
            let c = Scalar::from_coeffs(vec![
                GaussianRational::new(
                    rat_i64(rng.gen_range(-3..=3), rng.gen_range(1..=2)),
                    rat_i64(rng.gen_range(-2..=2), 1),
                ),
                GaussianRational::new(rat_i64(rng.gen_range(-2..=2), 1), crate::arith::rat(0)),
            ]);
            p.add_term(Monomial::from_indices(idx), &c);
        }
        p
    }

    #[test]
    fn unsymmetrize_round_trip() {
        let mut rng = StdRng::seed_from_u64(7);
        for alg in [fixtures::heisenberg(), fixtures::so3(), fixtures::affine2()] {
            let pbw = Pbw::new(&alg);
            for _ in 0..20 {
                let p = random_sympoly(&mut rng, alg.dim(), 5, 4);
                let back = pbw.unsymmetrize(&pbw.symmetrize(&p));
                assert_eq!(back, p, "round trip failed on {}", alg.name());
            }
        }
    }

    #[test]
    fn gutt_star_abelian_is_sym_multiply() {
        let a = fixtures::abelian(3);
        let mut rng = StdRng::seed_from_u64(11);
        let pbw = Pbw::new(&a);
        for _ in 0..10 {
            let p = random_sympoly(&mut rng, 3, 4, 3);
            let q = random_sympoly(&mut rng, 3, 4, 3);
            assert_eq!(pbw.gutt_star(&p, &q), p.sym_multiply(&q).unwrap());
        }
    }

    #[test]
    fn gutt_star_heisenberg_oracles() {
        let h = fixtures::heisenberg();
        let pbw = Pbw::new(&h);
        let e1 = SymPoly::basis(3, 0);
        let e2 = SymPoly::basis(3, 1);
        // e₁ ⋆ e₂ = e₁∨e₂ + (z/2)e₃ = e₁∨e₂ − (iħ/2)e₃
        let prod = pbw.gutt_star(&e1, &e2);
        let mut expected = SymPoly::zero(3);
        expected.add_term(Monomial::from_indices(vec![0, 1]), &Scalar::one());
        expected.add_term(Monomial::basis(2), &hbar_times((-1, 2)));
        assert_eq!(prod, expected);
        // e₁ ⋆ e₂ − e₂ ⋆ e₁ = −iħ e₃
        let comm = prod.add(&pbw.gutt_star(&e2, &e1).neg()).unwrap();
        let mut expected = SymPoly::zero(3);
        expected.add_term(Monomial::basis(2), &hbar_times((-1, 1)));
        assert_eq!(comm, expected);
    }

    #[test]
    fn gutt_star_associative_random() {
        let mut rng = StdRng::seed_from_u64(23);
        for alg in [
            fixtures::heisenberg(),
            fixtures::so3(),
            fixtures::affine2(),
            fixtures::heisenberg4(),
        ] {
            let pbw = Pbw::new(&alg);
            for _ in 0..8 {
                let p = random_sympoly(&mut rng, alg.dim(), 3, 2);
                let q = random_sympoly(&mut rng, alg.dim(), 3, 2);
                let s = random_sympoly(&mut rng, alg.dim(), 3, 2);
                let left = pbw.gutt_star(&pbw.gutt_star(&p, &q), &s);
                let right = pbw.gutt_star(&p, &pbw.gutt_star(&q, &s));
                assert_eq!(left, right, "associativity failed on {}", alg.name());
            }
        }
    }

    #[test]
    fn gutt_star_homogeneity_and_classical_limit() {
        // The ħ^r part of a deg-k by deg-l product is homogeneous of degree
        // k+l−r, and ħ⁰ recovers ∨.
        let alg = fixtures::so3();
        let pbw = Pbw::new(&alg);
        let p = SymPoly::monomial(3, Monomial::from_indices(vec![0, 1, 1]), Scalar::one());
        let q = SymPoly::monomial(3, Monomial::from_indices(vec![0, 2]), Scalar::one());
        let prod = pbw.gutt_star(&p, &q);
        for r in 0..=prod.hbar_degree().unwrap() {
            let part = prod.hbar_coefficient(r);
            for (m, _) in part.terms() {
                assert_eq!(m.degree(), 3 + 2 - r);
            }
        }
        assert_eq!(prod.hbar_coefficient(0), p.sym_multiply(&q).unwrap());
    }

    #[test]
    fn gutt_first_order_commutator_is_poisson() {
        // ħ¹ part of P⋆Q − Q⋆P equals (1/i)·{P,Q}_lin for linear P, Q.
        let alg = fixtures::so3();
        let pbw = Pbw::new(&alg);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let x: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            let y: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            let mut p = SymPoly::zero(3);
            let mut q = SymPoly::zero(3);
            for i in 0..3 {
                p.add_term(Monomial::basis(i), &Scalar::from_i64(x[i]));
                q.add_term(Monomial::basis(i), &Scalar::from_i64(y[i]));
            }
            let comm = pbw.gutt_star(&p, &q).add(&pbw.gutt_star(&q, &p).neg()).unwrap();
            let xr: Vec<_> = x.iter().map(|&v| crate::arith::rat(v)).collect();
            let yr: Vec<_> = y.iter().map(|&v| crate::arith::rat(v)).collect();
            let br = alg.bracket(&xr, &yr).unwrap();
            // (1/i)·bracket
            let mut expected = SymPoly::zero(3);
            for (i, b) in br.iter().enumerate() {
                expected.add_term(
                    Monomial::basis(i),
                    &Scalar::constant(GaussianRational::new(crate::arith::rat(0), -b.clone())),
                );
            }
            assert_eq!(comm.hbar_coefficient(1), expected);
        }
    }
}
