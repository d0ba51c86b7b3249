//! Noncommutative higher Leibniz rules for iterated derivations, verified
//! exactly on a commutative polynomial test algebra.
//!
//! The test ring is the full polynomial ring in `s` variables over the
//! exact scalars, reusing [`SymPoly`] over an abelian index set; inputs are
//! degree-bounded so every identity closes in finitely many exact terms.

use crate::sym::SymPoly;
use crate::arith::Scalar;

/// Polynomial-coefficient derivation D = Σ_j p_j ∂_j.
#[derive(Clone, Debug)]
pub struct Derivation {
    /// Coefficient polynomial of ∂_j for each variable j.
    pub coefficients: Vec<SymPoly>,
}

/// ∂_j of a polynomial.
pub fn partial(f: &SymPoly, j: usize) -> SymPoly {
    let mut out = SymPoly::zero(f.dim());
    for (m, c) in f.terms() {
        let mult = m.indices().iter().filter(|&&i| i == j).count();
        if mult == 0 {
            continue;
        }
        let rest = m.remove_one(j).expect("index present");
        out.add_term(rest, &c.scale_rational(&crate::arith::rat(mult as i64)));
    }
    out
}

impl Derivation {
    pub fn apply(&self, f: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero(f.dim());
        for (j, p) in self.coefficients.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            out = out
                .add(&p.sym_multiply(&partial(f, j)).expect("same ring"))
                .expect("same ring");
        }
        out
    }
}

/// Apply D_{w_last}⋯D_{w_first} reading the slice left to right as the
/// application order (w[0] acts first).
fn apply_sequence(derivs: &[Derivation], order: &[usize], f: &SymPoly) -> SymPoly {
    let mut out = f.clone();
    for &i in order {
        out = derivs[i].apply(&out);
    }
    out
}

/// All (p, n−p) shuffles as (first_block, second_block) index lists; each
/// block is strictly increasing.
pub fn shuffles(n: usize, p: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut choice: Vec<usize> = (0..p).collect();
    loop {
        let complement: Vec<usize> = (0..n).filter(|i| !choice.contains(i)).collect();
        out.push((choice.clone(), complement));
        // Next lexicographic p-subset of {0..n}.
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if choice[i] != i + n - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        choice[i] += 1;
        for j in (i + 1)..p {
            choice[j] = choice[j - 1] + 1;
        }
    }
}

/// Outcome of checking the two higher Leibniz identities.
#[derive(Clone, Debug, PartialEq)]
pub struct LeibnizReport {
    pub shuffle_ok: bool,
    pub symmetrized_ok: bool,
}

impl LeibnizReport {
    pub fn is_pass(&self) -> bool {
        self.shuffle_ok && self.symmetrized_ok
    }
}

/// Verify, exactly, the shuffle form
///
///   D_n⋯D_1(ab) = Σ_p Σ_{σ∈Sh(p,n−p)} (D_{σ(n)}⋯D_{σ(p+1)}a)(D_{σ(p)}⋯D_{σ(1)}b)
///
/// and its symmetrization with binomial weights.
pub fn higher_leibniz_check(derivs: &[Derivation], a: &SymPoly, b: &SymPoly) -> LeibnizReport {
    let n = derivs.len();
    let ab = a.sym_multiply(b).expect("same ring");
    // Left side: D_1 acts first.
    let order: Vec<usize> = (0..n).collect();
    let lhs = apply_sequence(derivs, &order, &ab);
    let mut rhs = SymPoly::zero(a.dim());
    for p in 0..=n {
        for (first, second) in shuffles(n, p) {
            // first block σ(1..p) acts on b (σ(1) first), second block on a.
            let tb = apply_sequence(derivs, &first, b);
            let ta = apply_sequence(derivs, &second, a);
            rhs = rhs.add(&ta.sym_multiply(&tb).expect("ring")).expect("ring");
        }
    }
    let shuffle_ok = lhs == rhs;

    // Symmetrized form over all permutations.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut lhs_sym = SymPoly::zero(a.dim());
    let mut rhs_sym = SymPoly::zero(a.dim());
    loop {
        lhs_sym = lhs_sym
            .add(&apply_sequence(derivs, &perm, &ab))
            .expect("ring");
        for p in 0..=n {
            let weight = Scalar::from_rational(crate::arith::Rational::from_integer(
                crate::arith::binomial(n, p),
            ));
            let tb = apply_sequence(derivs, &perm[..p], b);
            let ta = apply_sequence(derivs, &perm[p..], a);
            rhs_sym = rhs_sym
                .add(&ta.sym_multiply(&tb).expect("ring").scale(&weight))
                .expect("ring");
        }
        if !crate::pbw::next_permutation(&mut perm) {
            break;
        }
    }
    let symmetrized_ok = lhs_sym == rhs_sym;
    LeibnizReport {
        shuffle_ok,
        symmetrized_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_i64, GaussianRational, Scalar};
    use crate::sym::Monomial;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_poly(rng: &mut StdRng, vars: usize, max_deg: usize) -> SymPoly {
        let mut p = SymPoly::zero(vars);
        for _ in 0..3 {
            let d = rng.gen_range(0..=max_deg);
            let idx: Vec<usize> = (0..d).map(|_| rng.gen_range(0..vars)).collect();
            let c = Scalar::constant(GaussianRational::new(
                rat_i64(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
                rat_i64(rng.gen_range(-2..=2), 1),
            ));
            p.add_term(Monomial::from_indices(idx), &c);
        }
        p
    }

    fn random_derivation(rng: &mut StdRng, vars: usize) -> Derivation {
        Derivation {
            coefficients: (0..vars).map(|_| random_poly(rng, vars, 2)).collect(),
        }
    }

    #[test]
    fn ordinary_leibniz() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_poly(&mut rng, 2, 3);
        let b = random_poly(&mut rng, 2, 3);
        let d = random_derivation(&mut rng, 2);
        let lhs = d.apply(&a.sym_multiply(&b).unwrap());
        let rhs = d
            .apply(&a)
            .sym_multiply(&b)
            .unwrap()
            .add(&a.sym_multiply(&d.apply(&b)).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        let rep = higher_leibniz_check(&[d], &a, &b);
        assert!(rep.is_pass());
    }

    #[test]
    fn two_derivations_enumerated() {
        // D₂D₁(ab) = D₂D₁a·b + D₁a·D₂b + D₂a·D₁b + a·D₂D₁b.
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_poly(&mut rng, 2, 3);
        let b = random_poly(&mut rng, 2, 3);
        let d1 = random_derivation(&mut rng, 2);
        let d2 = random_derivation(&mut rng, 2);
        let lhs = d2.apply(&d1.apply(&a.sym_multiply(&b).unwrap()));
        let mul = |x: &SymPoly, y: &SymPoly| x.sym_multiply(y).unwrap();
        let rhs = mul(&d2.apply(&d1.apply(&a)), &b)
            .add(&mul(&d1.apply(&a), &d2.apply(&b)))
            .unwrap()
            .add(&mul(&d2.apply(&a), &d1.apply(&b)))
            .unwrap()
            .add(&mul(&a, &d2.apply(&d1.apply(&b))))
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(higher_leibniz_check(&[d1, d2], &a, &b).is_pass());
    }

    #[test]
    fn four_random_derivations() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..3 {
            let a = random_poly(&mut rng, 2, 3);
            let b = random_poly(&mut rng, 2, 3);
            let ds: Vec<Derivation> = (0..4).map(|_| random_derivation(&mut rng, 2)).collect();
            assert!(higher_leibniz_check(&ds, &a, &b).is_pass());
        }
    }

    #[test]
    fn shuffle_count_is_binomial() {
        assert_eq!(shuffles(5, 2).len(), 10);
        assert_eq!(shuffles(4, 0).len(), 1);
        assert_eq!(shuffles(4, 4).len(), 1);
        for (first, second) in shuffles(6, 3) {
            assert!(first.windows(2).all(|w| w[0] < w[1]));
            assert!(second.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
