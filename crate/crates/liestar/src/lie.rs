//! Finite-dimensional real Lie algebras given by rational structure
//! constants, together with the modular one-form.
//!
//! Basis indices are 0-based internally; the JSON interchange format is
//! 1-based (see [`crate::io`]).

use crate::arith::{rat_i64, Rational};
use crate::error::LiestarError;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Lie algebra as a sparse table of structure constants c^k_{ij} with
/// [e_i, e_j] = Σ_k c^k_{ij} e_k.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    /// Sparse map (i, j, k) → c^k_{ij}. Stores raw data; antisymmetry and
    /// Jacobi are enforced by [`LieAlgebra::validate`], not by construction.
    c: BTreeMap<(usize, usize, usize), Rational>,
    name: String,
}

/// Outcome of validating a structure-constant table.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationReport {
    Pass,
    /// c^k_{ij} ≠ −c^k_{ji}; the witness is (i, j, k).
    AntisymmetryViolation(usize, usize, usize),
    /// Jacobi sum for (i, j, k) fails in component l.
    JacobiViolation(usize, usize, usize, usize),
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

impl LieAlgebra {
    pub fn new(dim: usize, entries: Vec<(usize, usize, usize, Rational)>) -> Self {
        let mut c = BTreeMap::new();
        for (i, j, k, q) in entries {
            assert!(i < dim && j < dim && k < dim, "structure constant index out of range");
            if !q.is_zero() {
                c.insert((i, j, k), q);
            }
        }
        Self {
            dim,
            c,
            name: String::new(),
        }
    }

    /// Build from the brackets [e_i, e_j] with i < j; the antisymmetric
    /// partners are filled in automatically.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, Rational)]) -> Self {
        let mut entries = Vec::new();
        for (i, j, k, q) in brackets {
            entries.push((*i, *j, *k, q.clone()));
            entries.push((*j, *i, *k, -q.clone()));
        }
        Self::new(dim, entries)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// c^k_{ij}, zero if absent.
    pub fn c(&self, i: usize, j: usize, k: usize) -> Rational {
        self.c.get(&(i, j, k)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Rational)> {
        self.c.iter()
    }

    /// Nonzero structure constants with first index pair (i, j).
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        self.c
            .range((i, j, 0)..=(i, j, self.dim))
            .map(|(&(_, _, k), q)| (k, q.clone()))
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.c.is_empty()
    }

    /// Check antisymmetry and the Jacobi identity, reporting the first
    /// violated witness.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c(i, j, k) != -self.c(j, i, k) {
                        return ValidationReport::AntisymmetryViolation(i, j, k);
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let mut sum = Rational::zero();
                        for m in 0..n {
                            sum += self.c(i, j, m) * self.c(m, k, l)
                                + self.c(j, k, m) * self.c(m, i, l)
                                + self.c(k, i, m) * self.c(m, j, l);
                        }
                        if !sum.is_zero() {
                            return ValidationReport::JacobiViolation(i, j, k, l);
                        }
                    }
                }
            }
        }
        ValidationReport::Pass
    }

    /// [x, y]_k = Σ_{ij} x_i y_j c^k_{ij}.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, LiestarError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(LiestarError::DimensionMismatch {
                expected: self.dim,
                got: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        let mut out = vec![Rational::zero(); self.dim];
        for (&(i, j, k), q) in &self.c {
            let f = &x[i] * &y[j];
            if !f.is_zero() {
                out[k] += f * q;
            }
        }
        Ok(out)
    }

    /// Matrix of ad_x in the chosen basis: (ad_x)^k_j = Σ_i x_i c^k_{ij}.
    pub fn ad_matrix(&self, x: &[Rational]) -> Result<Vec<Vec<Rational>>, LiestarError> {
        if x.len() != self.dim {
            return Err(LiestarError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut m = vec![vec![Rational::zero(); self.dim]; self.dim];
        for (&(i, j, k), q) in &self.c {
            if !x[i].is_zero() {
                m[k][j] += &x[i] * q;
            }
        }
        Ok(m)
    }

    /// Modular one-form α_k = ½ Σ_i c^i_{ik}; vanishes iff unimodular.
    pub fn modular_form(&self) -> ModularForm {
        let components = (0..self.dim)
            .map(|k| {
                let mut sum = Rational::zero();
                for i in 0..self.dim {
                    sum += self.c(i, k, i);
                }
                sum * rat_i64(1, 2)
            })
            .collect();
        ModularForm { components }
    }

    /// Transport the structure constants through an invertible change of
    /// basis f_a = Σ_i t[i][a] e_i (t column-major in the new index).
    pub fn change_basis(&self, t: &[Vec<Rational>]) -> Result<LieAlgebra, LiestarError> {
        let n = self.dim;
        let tinv = invert_rational_matrix(t).ok_or(LiestarError::SingularMatrix)?;
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                // [f_a, f_b] in the old basis.
                let fa: Vec<Rational> = (0..n).map(|i| t[i][a].clone()).collect();
                let fb: Vec<Rational> = (0..n).map(|i| t[i][b].clone()).collect();
                let br = self.bracket(&fa, &fb)?;
                for c in 0..n {
                    let mut coef = Rational::zero();
                    for k in 0..n {
                        coef += &tinv[c][k] * &br[k];
                    }
                    if !coef.is_zero() {
                        entries.push((a, b, c, coef));
                    }
                }
            }
        }
        Ok(LieAlgebra::new(n, entries).with_name(&format!("{}'", self.name)))
    }
}

/// The modular one-form α with α(e_k) = −½ tr(ad_{e_k}).
#[derive(Clone, Debug, PartialEq)]
pub struct ModularForm {
    pub components: Vec<Rational>,
}

impl ModularForm {
    pub fn is_unimodular(&self) -> bool {
        self.components.iter().all(|q| q.is_zero())
    }
}

/// Exact inverse by Gauss-Jordan elimination; `None` if singular.
pub fn invert_rational_matrix(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let s = &a[col][j] * &f;
                    a[r][j] = &a[r][j] - &s;
                    let s = &inv[col][j] * &f;
                    inv[r][j] = &inv[r][j] - &s;
                }
            }
        }
    }
    Some(inv)
}

/// Stock algebras used as fixtures throughout the crate and its tests.
pub mod fixtures {
    use super::*;

    pub fn abelian(dim: usize) -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::new(dim, vec![]).with_name(&format!("abelian{}", dim)))
    }

    /// Heisenberg algebra: [e₁, e₂] = e₃.
    pub fn heisenberg() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(3, &[(0, 1, 2, rat_i64(1, 1))]).with_name("heisenberg"),
        )
    }

    /// so(3): c^k_{ij} = ε_{ijk}.
    pub fn so3() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(
                3,
                &[
                    (0, 1, 2, rat_i64(1, 1)),
                    (1, 2, 0, rat_i64(1, 1)),
                    (2, 0, 1, rat_i64(1, 1)),
                ],
            )
            .with_name("so3"),
        )
    }

    /// Non-unimodular 2-dimensional algebra with [e₂, e₁] = e₂, i.e.
    /// c²₂₁ = 1, so that α₁ = ½.
    pub fn affine2() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(2, &[(1, 0, 1, rat_i64(1, 1))]).with_name("affine2"),
        )
    }

    /// The same algebra with the opposite orientation, [e₁, e₂] = e₂;
    /// here α₁ = −½.
    pub fn affine2_opposite() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(2, &[(0, 1, 1, rat_i64(1, 1))]).with_name("affine2op"),
        )
    }

    /// Heisenberg ⊕ ℝ, a 4-dimensional nilpotent algebra.
    pub fn heisenberg4() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(4, &[(0, 1, 2, rat_i64(1, 1))]).with_name("heisenberg4"),
        )
    }

    /// so(3) ⊕ ℝ.
    pub fn so3_plus_r() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(
                4,
                &[
                    (0, 1, 2, rat_i64(1, 1)),
                    (1, 2, 0, rat_i64(1, 1)),
                    (2, 0, 1, rat_i64(1, 1)),
                ],
            )
            .with_name("so3+r"),
        )
    }

    /// Non-unimodular 3-dimensional algebra affine2 ⊕ ℝ.
    pub fn affine3() -> Arc<LieAlgebra> {
        Arc::new(
            LieAlgebra::from_brackets(3, &[(1, 0, 1, rat_i64(1, 1))]).with_name("affine3"),
        )
    }

    pub fn all() -> Vec<Arc<LieAlgebra>> {
        vec![
            abelian(1),
            abelian(2),
            abelian(3),
            heisenberg(),
            so3(),
            affine2(),
            affine2_opposite(),
            affine3(),
            heisenberg4(),
            so3_plus_r(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::arith::rat;

    #[test]
    fn fixtures_validate() {
        for alg in fixtures::all() {
            assert!(alg.validate().is_pass(), "{} failed validation", alg.name());
        }
    }

    #[test]
    fn antisymmetry_violation_detected() {
        // c³₁₂ = 1 without the partner c³₂₁ = −1.
        let bad = LieAlgebra::new(3, vec![(0, 1, 2, rat(1))]);
        assert_eq!(bad.validate(), ValidationReport::AntisymmetryViolation(0, 1, 2));
    }

    #[test]
    fn jacobi_violation_detected() {
        // [e₁,e₂] = e₃, [e₁,e₃] = e₂, [e₂,e₃] = e₂ violates Jacobi.
        let bad = LieAlgebra::from_brackets(
            3,
            &[(0, 1, 2, rat(1)), (0, 2, 1, rat(1)), (1, 2, 1, rat(1))],
        );
        assert!(matches!(bad.validate(), ValidationReport::JacobiViolation(..)));
    }

    fn basis(dim: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        v[i] = rat(1);
        v
    }

    #[test]
    fn bracket_heisenberg() {
        let h = heisenberg();
        let e1 = basis(3, 0);
        let e2 = basis(3, 1);
        assert_eq!(h.bracket(&e1, &e2).unwrap(), basis(3, 2));
        assert_eq!(h.bracket(&e1, &e1).unwrap(), vec![Rational::zero(); 3]);
    }

    #[test]
    fn bracket_so3_cyclic() {
        let a = so3();
        assert_eq!(a.bracket(&basis(3, 1), &basis(3, 2)).unwrap(), basis(3, 0));
    }

    #[test]
    fn bracket_length_mismatch() {
        let h = heisenberg();
        assert!(h.bracket(&basis(2, 0), &basis(3, 0)).is_err());
    }

    #[test]
    fn ad_matrix_entries() {
        let h = heisenberg();
        let m = h.ad_matrix(&basis(3, 0)).unwrap();
        assert_eq!(m[2][1], rat(1));
        let total: Rational = m.iter().flatten().cloned().sum();
        assert_eq!(total, rat(1));

        let a = so3();
        let m = a.ad_matrix(&basis(3, 2)).unwrap();
        // (ad e₃)²₁ = ε₃₁₂ = 1 and (ad e₃)¹₂ = ε₃₂₁ = −1.
        assert_eq!(m[1][0], rat(1));
        assert_eq!(m[0][1], rat(-1));

        let ab = abelian(3);
        let m = ab.ad_matrix(&basis(3, 1)).unwrap();
        assert!(m.iter().flatten().all(|q| q.is_zero()));
    }

    #[test]
    fn jacobi_on_basis_triples() {
        for alg in fixtures::all() {
            let n = alg.dim();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ei = basis(n, i);
                        let ej = basis(n, j);
                        let ek = basis(n, k);
                        let t1 = alg.bracket(&alg.bracket(&ei, &ej).unwrap(), &ek).unwrap();
                        let t2 = alg.bracket(&alg.bracket(&ej, &ek).unwrap(), &ei).unwrap();
                        let t3 = alg.bracket(&alg.bracket(&ek, &ei).unwrap(), &ej).unwrap();
                        for l in 0..n {
                            assert!((&t1[l] + &t2[l] + &t3[l]).is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn modular_form_values() {
        assert!(heisenberg().modular_form().is_unimodular());
        assert!(abelian(4).modular_form().is_unimodular());
        assert!(so3().modular_form().is_unimodular());
        // [e₂, e₁] = e₂: α₁ = ½ Σ_i c^i_{i1} = ½ c²₂₁ = ½.
        let aff = affine2();
        let alpha = aff.modular_form();
        assert_eq!(alpha.components, vec![rat_i64(1, 2), rat(0)]);
        // Opposite orientation flips the sign.
        let alpha = affine2_opposite().modular_form();
        assert_eq!(alpha.components, vec![rat_i64(-1, 2), rat(0)]);
    }

    #[test]
    fn modular_form_is_minus_half_trace_ad() {
        for alg in fixtures::all() {
            let alpha = alg.modular_form();
            for k in 0..alg.dim() {
                let m = alg.ad_matrix(&basis(alg.dim(), k)).unwrap();
                let tr: Rational = (0..alg.dim()).map(|i| m[i][i].clone()).sum();
                assert_eq!(alpha.components[k], tr * rat_i64(-1, 2), "{} k={}", alg.name(), k);
            }
        }
    }

    #[test]
    fn change_basis_preserves_validity() {
        let t = vec![
            vec![rat(1), rat(1), rat(0)],
            vec![rat(0), rat(1), rat(2)],
            vec![rat(0), rat(0), rat(1)],
        ];
        let h = heisenberg().change_basis(&t).unwrap();
        assert!(h.validate().is_pass());
        assert!(!h.is_abelian());
    }
}
