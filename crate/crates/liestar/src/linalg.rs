//! Small dense matrices over the exact Gaussian-rational field and over
//! Complex64, shared by the orbit-module machinery.

use crate::arith::{GaussianRational, Scalar};
use num_complex::Complex64;

/// Coefficient field interface for matrix entries.
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn abs_f64(&self) -> f64;
}

impl Coeff for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn abs_f64(&self) -> f64 {
        GaussianRational::abs_f64(self)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Coeff> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out: Mat<T> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).add(&a.mul(rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc = acc.add(&a.mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Row covector times matrix.
    pub fn vecmat(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = T::zero();
                for i in 0..self.rows {
                    if !v[i].is_zero() {
                        acc = acc.add(&v[i].mul(self.get(i, j)));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add_mat(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn neg(&self) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn conj(&self) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Kronecker product.
    pub fn kron(&self, rhs: &Mat<T>) -> Mat<T> {
        let mut out = Mat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.set(i * rhs.rows + k, j * rhs.cols + l, a.mul(rhs.get(k, l)));
                    }
                }
            }
        }
        out
    }

    /// Induced ℓ¹ operator norm (max column abs sum).
    pub fn l1_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs_f64()).sum())
            .fold(0.0, f64::max)
    }

    /// Entrywise absolute values.
    pub fn abs_entries(&self) -> Mat<f64> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.abs_f64()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

pub type QMat = Mat<GaussianRational>;
pub type CMat = Mat<Complex64>;

impl QMat {
    pub fn to_complex(&self) -> CMat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.to_complex64()).collect(),
        }
    }
}

/// Matrix times a vector of ħ-polynomials (module action on exact
/// coefficient vectors).
pub fn matvec_scalar(m: &QMat, v: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(m.cols, v.len());
    (0..m.rows)
        .map(|i| {
            let mut acc = Scalar::zero();
            for j in 0..m.cols {
                let a = m.get(i, j);
                if !Coeff::is_zero(a) {
                    acc = &acc + &v[j].scale(a);
                }
            }
            acc
        })
        .collect()
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &CMat) -> CMat {
    assert_eq!(a.rows, a.cols);
    let norm = a.l1_norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / 2f64.powi(s as i32), 0.0);
    let b = a.scale(&scale);
    let mut acc = CMat::identity(a.rows);
    let mut term = CMat::identity(a.rows);
    for k in 1..80 {
        term = term.matmul(&b).scale(&Complex64::new(1.0 / k as f64, 0.0));
        acc = acc.add_mat(&term);
        if term.l1_norm() < 1e-20 * acc.l1_norm().max(1.0) {
            break;
        }
    }
    for _ in 0..s {
        acc = acc.matmul(&acc);
    }
    acc
}

/// Reduced row echelon basis over the Gaussian rationals, used for exact
/// invariant-subspace computations.
pub struct RowSpace {
    cols: usize,
    rows: Vec<Vec<GaussianRational>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<GaussianRational>] {
        &self.rows
    }

    /// Reduce `v` against the basis; returns the residual and the
    /// coordinates with respect to the stored rows.
    pub fn reduce(&self, v: &[GaussianRational]) -> (Vec<GaussianRational>, Vec<GaussianRational>) {
        assert_eq!(v.len(), self.cols);
        let mut res = v.to_vec();
        let mut coords = vec![GaussianRational::zero(); self.rows.len()];
        for (r, &p) in self.pivots.iter().enumerate() {
            let f = res[p].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let s = &f * &self.rows[r][j];
                res[j] = &res[j] - &s;
            }
            coords[r] = f;
        }
        (res, coords)
    }

    /// Insert a vector, extending the basis if it is independent.
    pub fn insert(&mut self, v: &[GaussianRational]) -> bool {
        let (mut res, _) = self.reduce(v);
        let Some(p) = res.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = res[p].clone();
        for x in res.iter_mut() {
            *x = &*x / &inv;
        }
        // Eliminate the new pivot from existing rows.
        for r in 0..self.rows.len() {
            let f = self.rows[r][p].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let s = &f * &res[j];
                self.rows[r][j] = &self.rows[r][j] - &s;
            }
        }
        self.rows.push(res);
        self.pivots.push(p);
        true
    }

    /// Coordinates of `v` in the basis; `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        let (res, coords) = self.reduce(v);
        if res.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_i64};

    #[test]
    fn expm_rotation() {
        // exp(t·J) with J = [[0,−1],[1,0]] is a rotation matrix.
        let mut j = CMat::zeros(2, 2);
        j.set(0, 1, Complex64::new(-1.0, 0.0));
        j.set(1, 0, Complex64::new(1.0, 0.0));
        let t = 0.7;
        let e = expm(&j.scale(&Complex64::new(t, 0.0)));
        assert!((e.get(0, 0).re - t.cos()).abs() < 1e-12);
        assert!((e.get(1, 0).re - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn expm_nilpotent() {
        let mut n = CMat::zeros(3, 3);
        n.set(0, 1, Complex64::new(2.0, 0.0));
        n.set(1, 2, Complex64::new(3.0, 0.0));
        let e = expm(&n);
        assert!((e.get(0, 2).re - 3.0).abs() < 1e-12); // 2·3/2
    }

    #[test]
    fn rowspace_rank_and_coordinates() {
        let g = |a: i64, b: i64, c: i64| {
            vec![
                GaussianRational::from_rational(rat(a)),
                GaussianRational::from_rational(rat(b)),
                GaussianRational::from_rational(rat(c)),
            ]
        };
        let mut rs = RowSpace::new(3);
        assert!(rs.insert(&g(1, 2, 3)));
        assert!(rs.insert(&g(0, 1, 1)));
        assert!(!rs.insert(&g(1, 3, 4)));
        assert_eq!(rs.rank(), 2);
        let coords = rs.coordinates(&g(2, 5, 7)).unwrap();
        // Verify the reconstruction.
        let mut rec = vec![GaussianRational::zero(); 3];
        for (r, c) in coords.iter().enumerate() {
            for j in 0..3 {
                rec[j] = &rec[j] + &(c * &rs.basis()[r][j]);
            }
        }
        assert_eq!(rec, g(2, 5, 7));
        assert!(rs.coordinates(&g(0, 0, 1)).is_none());
    }

    #[test]
    fn kron_and_l1() {
        let a = QMat::from_rows(vec![
            vec![
                GaussianRational::from_rational(rat(1)),
                GaussianRational::from_rational(rat_i64(-1, 2)),
            ],
            vec![
                GaussianRational::from_rational(rat(0)),
                GaussianRational::from_rational(rat(2)),
            ],
        ]);
        let id = QMat::identity(2);
        let k = a.kron(&id);
        assert_eq!(k.rows, 4);
        assert_eq!(*k.get(2, 2), GaussianRational::from_rational(rat(2)));
        assert!((a.l1_norm() - 2.5).abs() < 1e-15);
    }
}
