//! Dense univariate polynomials over the exact coefficient field `ℚ(√d)`.
//!
//! Coefficients are stored in ascending order with no trailing zeros; the
//! zero polynomial has an empty coefficient vector. All arithmetic is exact.

use crate::scalar::{rat, BigComplex, QFElement, Rational};

#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<QFElement>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<QFElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: QFElement) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(QFElement::one())
    }

    /// `c · z^k`.
    pub fn monomial(k: usize, c: QFElement) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![QFElement::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// `z − a`.
    pub fn linear_from_root(a: &QFElement) -> Self {
        Poly { coeffs: vec![a.neg(), QFElement::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[QFElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> QFElement {
        self.coeffs.get(k).cloned().unwrap_or_else(QFElement::zero)
    }

    pub fn leading(&self) -> Option<&QFElement> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add(&rhs.coeff(k)));
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![QFElement::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &QFElement) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul(&QFElement::from_i64(k as i64)))
            .collect();
        Self::new(coeffs)
    }

    /// Divides by the leading coefficient; identity on the zero polynomial.
    pub fn into_monic(self) -> Self {
        match self.leading() {
            None => self,
            Some(lc) => {
                let inv = lc.inv();
                Poly { coeffs: self.coeffs.iter().map(|c| c.mul(&inv)).collect() }
            }
        }
    }

    pub fn eval(&self, z: &QFElement) -> QFElement {
        let mut acc = QFElement::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Horner evaluation with coefficients embedded at the precision of `z`.
    pub fn eval_big(&self, z: &BigComplex) -> BigComplex {
        let prec = z.precision_bits();
        let mut acc = BigComplex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&c.embed(prec));
        }
        acc
    }

    pub fn eval_c64(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        self.eval_big(&BigComplex::with_f64(53, z.re, z.im)).to_c64()
    }

    /// `∏ (z − r_k)`.
    pub fn from_roots(roots: &[QFElement]) -> Self {
        let mut p = Self::one();
        for r in roots {
            p = p.mul(&Self::linear_from_root(r));
        }
        p
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})z^{k}")?;
            }
        }
        Ok(())
    }
}

/// Integer-coefficient polynomial shorthand (ascending coefficients).
pub fn poly_i64(coeffs: &[i64]) -> Poly {
    Poly::new(coeffs.iter().map(|&c| QFElement::from_i64(c)).collect())
}

/// Polynomial with the given rational coefficients (ascending).
pub fn poly_rat(coeffs: &[Rational]) -> Poly {
    Poly::new(coeffs.iter().map(|c| QFElement::from_rational(c.clone())).collect())
}

/// Rational-coefficient helper: `coeffs[(p, q)]` ascending.
pub fn poly_pq(coeffs: &[(i64, i64)]) -> Poly {
    Poly::new(
        coeffs
            .iter()
            .map(|&(p, q)| QFElement::from_rational(rat(p, q)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> QFElement {
        QFElement::from_i64(v)
    }

    #[test]
    fn arithmetic_basics() {
        let p = poly_i64(&[1, 2, 1]); // (1+z)^2
        let lin = Poly::linear_from_root(&q(-1)); // z + 1
        assert_eq!(lin.mul(&lin), p);
        assert_eq!(p.deg(), Some(2));
        assert_eq!(p.derivative(), poly_i64(&[2, 2]));
        assert_eq!(p.eval(&q(2)), q(9));
    }

    #[test]
    fn monic_normalization() {
        let p = poly_i64(&[2, 0, 4]);
        let m = p.into_monic();
        assert_eq!(m, poly_pq(&[(1, 2), (0, 1), (1, 1)]));
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::new(vec![q(1), q(0), q(0)]);
        assert_eq!(p.deg(), Some(0));
        let z = Poly::new(vec![q(0)]);
        assert!(z.is_zero());
    }

    #[test]
    fn eval_big_matches_exact() {
        let p = poly_pq(&[(1, 3), (0, 1), (1, 1)]);
        let z = BigComplex::with_f64(128, 0.5, 0.25);
        let got = p.eval_big(&z).to_c64();
        let want = num_complex::Complex64::new(0.5, 0.25).powi(2)
            + num_complex::Complex64::new(1.0 / 3.0, 0.0);
        assert!((got - want).norm() < 1e-15);
    }
}
