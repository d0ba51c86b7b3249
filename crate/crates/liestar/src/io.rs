//! JSON interchange formats for algebras, momentum polynomials,
//! representative functions and observables.
//!
//! All numeric payloads are strings of exact rationals ("p/q"), so files
//! round-trip bit-exactly and never pick up binary-float drift. Indices
//! are 1-based on disk and 0-based in memory.

use crate::arith::{parse_rational, rational_string, GaussianRational, Scalar};
use crate::error::LiestarError;
use crate::lie::LieAlgebra;
use crate::linalg::QMat;
use crate::observable::Observable;
use crate::repfun::{OrbitModule, RepFunction};
use crate::sym::{Monomial, SymPoly};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type ComplexStr = (String, String);

fn complex_to_json(z: &GaussianRational) -> ComplexStr {
    (rational_string(&z.re), rational_string(&z.im))
}

fn complex_from_json(z: &ComplexStr) -> Result<GaussianRational, LiestarError> {
    let re = parse_rational(&z.0)
        .ok_or_else(|| LiestarError::Parse(format!("bad rational {:?}", z.0)))?;
    let im = parse_rational(&z.1)
        .ok_or_else(|| LiestarError::Parse(format!("bad rational {:?}", z.1)))?;
    Ok(GaussianRational::new(re, im))
}

fn scalar_to_json(s: &Scalar) -> Vec<ComplexStr> {
    s.coeffs().iter().map(complex_to_json).collect()
}

fn scalar_from_json(v: &[ComplexStr]) -> Result<Scalar, LiestarError> {
    Ok(Scalar::from_coeffs(
        v.iter().map(complex_from_json).collect::<Result<_, _>>()?,
    ))
}

/// `{"dim": n, "c": [[i, j, k, "p/q"], ...]}` with 1-based indices.
#[derive(Serialize, Deserialize)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub c: Vec<(usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
}

impl LieAlgebraJson {
    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        Self {
            dim: alg.dim(),
            c: alg
                .entries()
                .map(|(&(i, j, k), q)| (i + 1, j + 1, k + 1, rational_string(q)))
                .collect(),
            name: alg.name().to_string(),
        }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra, LiestarError> {
        let mut entries = Vec::new();
        for (i, j, k, q) in &self.c {
            if *i == 0 || *j == 0 || *k == 0 || *i > self.dim || *j > self.dim || *k > self.dim {
                return Err(LiestarError::Parse(format!(
                    "structure constant index ({}, {}, {}) out of 1..={}",
                    i, j, k, self.dim
                )));
            }
            let v = parse_rational(q)
                .ok_or_else(|| LiestarError::Parse(format!("bad rational {:?}", q)))?;
            entries.push((i - 1, j - 1, k - 1, v));
        }
        Ok(LieAlgebra::new(self.dim, entries).with_name(&self.name))
    }
}

/// `{"dim": n, "terms": [{"mono": [1,2], "coef": [["re","im"], ...]}]}`
/// with coefficients as ascending ħ powers.
#[derive(Serialize, Deserialize)]
pub struct SymPolyJson {
    pub dim: usize,
    pub terms: Vec<SymTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct SymTermJson {
    pub mono: Vec<usize>,
    pub coef: Vec<ComplexStr>,
}

impl SymPolyJson {
    pub fn from_sympoly(p: &SymPoly) -> Self {
        Self {
            dim: p.dim(),
            terms: p
                .terms()
                .map(|(m, c)| SymTermJson {
                    mono: m.indices().iter().map(|i| i + 1).collect(),
                    coef: scalar_to_json(c),
                })
                .collect(),
        }
    }

    pub fn to_sympoly(&self) -> Result<SymPoly, LiestarError> {
        let mut p = SymPoly::zero(self.dim);
        for t in &self.terms {
            let idx = one_based(&t.mono, self.dim)?;
            p.add_term(Monomial::from_indices(idx), &scalar_from_json(&t.coef)?);
        }
        Ok(p)
    }
}

fn one_based(idx: &[usize], dim: usize) -> Result<Vec<usize>, LiestarError> {
    idx.iter()
        .map(|&i| {
            if i == 0 || i > dim {
                Err(LiestarError::Parse(format!(
                    "index {} out of 1..={}",
                    i, dim
                )))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// `{"dim": m, "generators": [...], "v": [...], "delta": [...]}` with the
/// generators as m×m matrices of complex rationals and the coordinate
/// entries as ħ-coefficient lists.
#[derive(Serialize, Deserialize)]
pub struct RepFunctionJson {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<ComplexStr>>>,
    pub v: Vec<Vec<ComplexStr>>,
    pub delta: Vec<Vec<ComplexStr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<EvaluatorJson>,
}

#[derive(Serialize, Deserialize)]
pub struct EvaluatorJson {
    pub r#type: String,
}

impl RepFunctionJson {
    pub fn from_repfun(f: &RepFunction) -> Self {
        let m = f.module.dim();
        let generators = (0..f.module.num_gens())
            .map(|i| {
                (0..m)
                    .map(|r| {
                        (0..m)
                            .map(|c| complex_to_json(f.module.gen(i).get(r, c)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            dim: m,
            generators,
            v: f.v.iter().map(scalar_to_json).collect(),
            delta: f.delta.iter().map(scalar_to_json).collect(),
            evaluator: Some(EvaluatorJson {
                r#type: "matrix_exp".to_string(),
            }),
        }
    }

    pub fn to_repfun(&self) -> Result<RepFunction, LiestarError> {
        let m = self.dim;
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g.len() != m || g.iter().any(|row| row.len() != m) {
                return Err(LiestarError::Parse("generator is not m×m".to_string()));
            }
            let mut mat = QMat::zeros(m, m);
            for (r, row) in g.iter().enumerate() {
                for (c, z) in row.iter().enumerate() {
                    mat.set(r, c, complex_from_json(z)?);
                }
            }
            gens.push(mat);
        }
        if self.v.len() != m || self.delta.len() != m {
            return Err(LiestarError::Parse(
                "coordinate vector length mismatch".to_string(),
            ));
        }
        let v = self
            .v
            .iter()
            .map(|s| scalar_from_json(s))
            .collect::<Result<_, _>>()?;
        let delta = self
            .delta
            .iter()
            .map(|s| scalar_from_json(s))
            .collect::<Result<_, _>>()?;
        Ok(RepFunction::new(Arc::new(OrbitModule::new(gens)), v, delta))
    }
}

/// `{"terms": [{"mono": [...], "fun": <rep function>}]}`.
#[derive(Serialize, Deserialize)]
pub struct ObservableJson {
    pub terms: Vec<ObservableTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ObservableTermJson {
    pub mono: Vec<usize>,
    pub fun: RepFunctionJson,
}

impl ObservableJson {
    pub fn from_observable(o: &Observable) -> Self {
        Self {
            terms: o
                .terms()
                .map(|(m, f)| ObservableTermJson {
                    mono: m.indices().iter().map(|i| i + 1).collect(),
                    fun: RepFunctionJson::from_repfun(f),
                })
                .collect(),
        }
    }

    pub fn to_observable(&self, algebra: Arc<LieAlgebra>) -> Result<Observable, LiestarError> {
        let mut o = Observable::zero(algebra.clone());
        for t in &self.terms {
            let idx = one_based(&t.mono, algebra.dim())?;
            let f = t.fun.to_repfun()?;
            if f.module.num_gens() != algebra.dim() {
                return Err(LiestarError::Parse(
                    "generator count does not match the algebra dimension".to_string(),
                ));
            }
            o.add_term(Monomial::from_indices(idx), f);
        }
        Ok(o)
    }
}

/// Canonical serialization: pretty JSON with a trailing newline; key order
/// follows the struct declarations, so output is byte-stable.
pub fn to_canonical_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialization cannot fail");
    s.push('\n');
    s
}

pub fn parse_json<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T, LiestarError> {
    serde_json::from_str(s).map_err(|e| LiestarError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_i64;
    use crate::lie::fixtures as lf;
    use crate::repfun::fixtures as rf;

    #[test]
    fn algebra_round_trip() {
        for alg in lf::all() {
            let json = to_canonical_json(&LieAlgebraJson::from_algebra(&alg));
            let parsed: LieAlgebraJson = parse_json(&json).unwrap();
            let back = parsed.to_algebra().unwrap();
            assert_eq!(back, *alg.as_ref());
            // Byte stability.
            let again = to_canonical_json(&LieAlgebraJson::from_algebra(&back));
            assert_eq!(json, again);
        }
    }

    #[test]
    fn sympoly_round_trip() {
        let mut p = SymPoly::zero(3);
        p.add_term(
            Monomial::from_indices(vec![0, 2]),
            &Scalar::from_coeffs(vec![
                GaussianRational::new(rat_i64(1, 2), rat_i64(-1, 3)),
                GaussianRational::new(rat_i64(0, 1), rat_i64(2, 1)),
            ]),
        );
        p.add_term(Monomial::unit(), &Scalar::one());
        let json = to_canonical_json(&SymPolyJson::from_sympoly(&p));
        let back = parse_json::<SymPolyJson>(&json).unwrap().to_sympoly().unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn repfun_and_observable_round_trip() {
        let phi = rf::su2_coefficient();
        let json = to_canonical_json(&RepFunctionJson::from_repfun(&phi));
        let back = parse_json::<RepFunctionJson>(&json).unwrap().to_repfun().unwrap();
        assert!(back.equals(&phi));

        let alg = lf::so3();
        let mut o = Observable::from_term(alg.clone(), Monomial::from_indices(vec![0, 1]), phi);
        o.add_term(Monomial::unit(), rf::su2_coefficient().lie_derive_basis(2));
        let json = to_canonical_json(&ObservableJson::from_observable(&o));
        let back = parse_json::<ObservableJson>(&json)
            .unwrap()
            .to_observable(alg)
            .unwrap();
        assert!(back.equals(&o));
        let again = to_canonical_json(&ObservableJson::from_observable(&back));
        assert_eq!(json, again);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(parse_json::<LieAlgebraJson>("{\"dim\": 2, \"c\": [[1, 2, 3, \"1\"]]}")
            .unwrap()
            .to_algebra()
            .is_err());
        assert!(parse_json::<LieAlgebraJson>("{\"dim\": 2, \"c\": [[0, 1, 1, \"1\"]]}")
            .unwrap()
            .to_algebra()
            .is_err());
        assert!(
            parse_json::<LieAlgebraJson>("{\"dim\": 2, \"c\": [[1, 2, 2, \"1/0\"]]}")
                .unwrap()
                .to_algebra()
                .is_err()
        );
    }
}
