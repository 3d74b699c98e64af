//! Finite-dimensional state vectors, the Hermitian inner product, and the
//! small dense matrices used by the adiabatic oracle.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for algebraic identities on the built-in states.
pub const NORM_TOL: f64 = 1e-12;

/// Column of `N >= 1` finite complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyState);
        }
        if let Some(index) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.amps.iter().map(|z| z * c).collect())
    }

    pub fn try_add(&self, other: &StateVector) -> Result<Self> {
        check_same_len(self, other)?;
        Self::new(self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect())
    }

    pub fn try_sub(&self, other: &StateVector) -> Result<Self> {
        check_same_len(self, other)?;
        Self::new(self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = norm(self);
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_same_len(self, other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

fn check_same_len(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), actual: b.len() });
    }
    Ok(())
}

/// `<a|b> = sum_k conj(a_k) b_k`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    check_same_len(a, b)?;
    Ok(dot(&a.amps, &b.amps))
}

/// Unchecked inner product on raw slices of equal length.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &StateVector) -> f64 {
    a.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_normalized(a: &StateVector, tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    (norm(a) - 1.0).abs() <= tol
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `c |a><b|`
    pub fn outer(a: &StateVector, b: &StateVector, c: Complex64) -> Result<Self> {
        check_same_len(a, b)?;
        let n = a.len();
        let mut data = Vec::with_capacity(n * n);
        for x in a.as_slice() {
            for y in b.as_slice() {
                data.push(c * x * y.conj());
            }
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max_{ij} |H_ij - conj(H_ji)|`
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: v.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        self.mul_into(v.as_slice(), &mut out);
        StateVector::new(out)
    }

    pub(crate) fn mul_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(v).map(|(h, x)| h * x).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sv(amps: &[Complex64]) -> StateVector {
        StateVector::new(amps.to_vec()).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let e0 = sv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e1 = sv(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(inner_product(&e0, &e1).unwrap(), c(0.0, 0.0));

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = sv(&[c(r, 0.0), c(r, 0.0)]);
        let ip = inner_product(&plus, &plus).unwrap();
        assert!((ip - c(1.0, 0.0)).norm() < 1e-15);

        let i0 = sv(&[c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(inner_product(&i0, &e0).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn inner_product_length_mismatch() {
        let a = sv(&[c(1.0, 0.0)]);
        let b = sv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(inner_product(&a, &b), Err(Error::Dimension { expected: 1, actual: 2 }));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&StateVector::from_real(&[1.0, 0.0]).unwrap()), 1.0);
        assert!((norm(&sv(&[c(0.6, 0.0), c(0.0, 0.8)])) - 1.0).abs() < 1e-15);
        assert_eq!(norm(&StateVector::from_real(&[2.0, 0.0, 0.0]).unwrap()), 2.0);
    }

    #[test]
    fn is_normalized_examples() {
        assert!(is_normalized(&StateVector::from_real(&[1.0, 0.0]).unwrap(), 1e-12));
        assert!(!is_normalized(&StateVector::from_real(&[1.1, 0.0]).unwrap(), 1e-12));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(StateVector::new(vec![]), Err(Error::EmptyState));
        assert_eq!(StateVector::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]), Err(Error::NonFinite { index: 1 }));
    }

    #[test]
    fn outer_product_matrix() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = sv(&[c(r, 0.0), c(0.0, r)]);
        let p = ComplexMatrix::outer(&v, &v, c(-1.0, 0.0)).unwrap();
        assert!(p.hermiticity_defect() < 1e-15);
        assert!((p.trace() - c(-1.0, 0.0)).norm() < 1e-15);
        let pv = p.apply(&v).unwrap();
        assert!(pv.max_abs_diff(&v.scaled(c(-1.0, 0.0)).unwrap()).unwrap() < 1e-15);
    }

    fn arb_vec(n: usize) -> impl Strategy<Value = StateVector> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n)
            .prop_map(|v| StateVector::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    fn arb_pair() -> impl Strategy<Value = (StateVector, StateVector)> {
        (1usize..5).prop_flat_map(|n| (arb_vec(n), arb_vec(n)))
    }

    proptest! {
        #[test]
        fn inner_product_is_conjugate_symmetric((a, b) in arb_pair()) {
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        }

        #[test]
        fn norm_is_absolutely_homogeneous(a in arb_vec(3), re in -3.0..3.0f64, im in -3.0..3.0f64) {
            let s = c(re, im);
            let lhs = norm(&a.scaled(s).unwrap());
            prop_assert!((lhs - s.norm() * norm(&a)).abs() <= 1e-12 * (1.0 + lhs));
        }

        #[test]
        fn triangle_inequality((a, b) in arb_pair()) {
            let sum = a.try_add(&b).unwrap();
            prop_assert!(norm(&sum) <= norm(&a) + norm(&b) + 1e-12);
        }
    }
}
