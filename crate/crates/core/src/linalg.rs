//! Exact nullspace computation by fraction-free (Bareiss) elimination over
//! `ℚ(√d)`, plus a big-float QR nullspace for inexact inputs.
//!
//! The Padé/Hermite–Padé systems are Hankel-like and exponentially
//! ill-conditioned in the degree, so rank decisions are made exactly: rows
//! are cleared to quadratic integers `a + b√d` and eliminated with exact
//! divisions only. The float path exists for inexact input series and makes
//! its rank decisions against an explicit threshold.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{BigComplex, QFElement, Rational};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,
    #[error("mixed quadratic fields inside one matrix")]
    MixedFields,
    #[error("empty matrix")]
    Empty,
}

/// Result of an exact elimination: rank and a basis of the right nullspace.
pub struct Nullspace {
    pub rank: usize,
    pub basis: Vec<Vec<QFElement>>,
}

/// Quadratic integer `a + b√d`; `d` is carried externally.
#[derive(Clone)]
struct QInt {
    a: BigInt,
    b: BigInt,
}

impl QInt {
    fn zero() -> Self {
        QInt { a: BigInt::zero(), b: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn mul(&self, o: &Self, d: i64) -> Self {
        QInt {
            a: &self.a * &o.a + (&self.b * &o.b) * d,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        QInt { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    /// Exact division; the quotient is guaranteed to lie in `ℤ[√d]` at every
    /// Bareiss step (the entries are minors of the integer-cleared matrix).
    fn exact_div(&self, o: &Self, d: i64) -> Self {
        if o.b.is_zero() {
            return QInt { a: exact_div_int(&self.a, &o.a), b: exact_div_int(&self.b, &o.a) };
        }
        let norm = &o.a * &o.a - (&o.b * &o.b) * d;
        let conj = QInt { a: o.a.clone(), b: -o.b.clone() };
        let num = self.mul(&conj, d);
        QInt { a: exact_div_int(&num.a, &norm), b: exact_div_int(&num.b, &norm) }
    }

    fn bits(&self) -> u64 {
        self.a.bits().max(self.b.bits())
    }
}

fn exact_div_int(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "non-exact division in fraction-free elimination");
    q
}

fn field_of_matrix(rows: &[Vec<QFElement>]) -> Result<i64, LinalgError> {
    let mut d = 0i64;
    for row in rows {
        for e in row {
            match (d, e.d()) {
                (_, 0) => {}
                (0, ed) => d = ed,
                (x, y) if x == y => {}
                _ => return Err(LinalgError::MixedFields),
            }
        }
    }
    Ok(d)
}

/// Clears denominators row by row (row scaling leaves rank and nullspace
/// unchanged) and returns the integer matrix.
fn clear_rows(rows: &[Vec<QFElement>]) -> Vec<Vec<QInt>> {
    rows.iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for e in row {
                lcm = lcm.lcm(e.re().denom());
                lcm = lcm.lcm(e.im_coeff().denom());
            }
            row.iter()
                .map(|e| QInt {
                    a: e.re().numer() * (&lcm / e.re().denom()),
                    b: e.im_coeff().numer() * (&lcm / e.im_coeff().denom()),
                })
                .collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination with row pivoting; returns the row
/// echelon form (entries are minors of the cleared matrix), the pivot
/// columns, and the attained rank.
fn bareiss(mut m: Vec<Vec<QInt>>, d: i64) -> (Vec<Vec<QInt>>, Vec<usize>) {
    let nrows = m.len();
    let ncols = m[0].len();
    let mut pivot_cols = Vec::new();
    let mut prev = QInt { a: BigInt::one(), b: BigInt::zero() };
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Smallest nonzero entry as pivot keeps intermediate growth down.
        let pivot_row = (r..nrows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].bits());
        let Some(p) = pivot_row else { continue };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = m[r][c].mul(&m[i][j], d).sub(&m[i][c].mul(&m[r][j], d));
                m[i][j] = t.exact_div(&prev, d);
            }
            m[i][c] = QInt::zero();
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }
    (m, pivot_cols)
}

/// Rank and right-nullspace basis of a matrix over `ℚ(√d)` (or `ℚ`), exact.
pub fn nullspace_exact(rows: &[Vec<QFElement>]) -> Result<Nullspace, LinalgError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(LinalgError::Empty);
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(LinalgError::RaggedMatrix);
    }
    let d = field_of_matrix(rows)?;
    let (ech, pivot_cols) = bareiss(clear_rows(rows), d);
    let rank = pivot_cols.len();

    // Back-substitution over the field: one basis vector per free column.
    let to_field = |q: &QInt| -> QFElement {
        QFElement::new(
            d,
            Rational::from_integer(q.a.clone()),
            Rational::from_integer(q.b.clone()),
        )
        .expect("entries were built in a valid field")
    };
    let pivot_set: std::collections::HashSet<usize> = pivot_cols.iter().copied().collect();
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();

    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut x = vec![QFElement::zero(); ncols];
        x[fc] = QFElement::one();
        for (i, &pc) in pivot_cols.iter().enumerate().rev() {
            // Row i: m[i][pc]·x[pc] + Σ_{j>pc} m[i][j]·x[j] = 0.
            let mut s = QFElement::zero();
            for j in pc + 1..ncols {
                if !ech[i][j].is_zero() && !x[j].is_zero() {
                    s = s.add(&to_field(&ech[i][j]).mul(&x[j]));
                }
            }
            x[pc] = s.neg().div(&to_field(&ech[i][pc]));
        }
        basis.push(x);
    }
    Ok(Nullspace { rank, basis })
}

/// Right-nullspace basis of an `m×n` big-float matrix via Householder QR of
/// the conjugate transpose; singular directions are split off at
/// `tol = 2^(−prec/2)·‖A‖_max`.
pub fn nullspace_bigfloat(rows: &[Vec<BigComplex>], precision_bits: u32) -> Nullspace2 {
    let m = rows.len();
    let n = rows[0].len();
    // Columns of `at` are the conjugated rows of A.
    let mut at: Vec<Vec<BigComplex>> = (0..n)
        .map(|j| (0..m).map(|i| rows[i][j].conj()).collect())
        .collect();
    let mut q: Vec<Vec<BigComplex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigComplex::one(precision_bits)
                    } else {
                        BigComplex::zero(precision_bits)
                    }
                })
                .collect()
        })
        .collect();

    let norm_max = rows
        .iter()
        .flatten()
        .map(|z| z.abs_f64())
        .fold(0.0f64, f64::max);
    let tol = norm_max * 2f64.powi(-(precision_bits as i32) / 2);

    let col_norm = |a: &Vec<Vec<BigComplex>>, k: usize, from: usize| -> f64 {
        (from..n).map(|i| a[i][k].abs_f64().powi(2)).sum::<f64>().sqrt()
    };

    let mut rank = 0;
    for k in 0..m {
        if rank == n {
            break;
        }
        let nrm = col_norm(&at, k, rank);
        if nrm <= tol {
            continue;
        }
        // Householder vector v = x + e^{iθ}‖x‖ e_rank acting on rows rank..n.
        // All reflector data is computed at full precision; f64 is only used
        // for the rank decision above.
        let mut nrm2_big = rug::Float::with_val(precision_bits, 0);
        for i in rank..n {
            nrm2_big += at[i][k].re().clone().square() + at[i][k].im().clone().square();
        }
        let nrm_big = nrm2_big.sqrt();
        let x0 = at[rank][k].clone();
        let phase = if x0.abs_f64() == 0.0 {
            BigComplex::one(precision_bits)
        } else {
            x0.div(&BigComplex::from_floats(x0.abs(), rug::Float::with_val(precision_bits, 0)))
        };
        let alpha = phase.mul(&BigComplex::from_floats(
            nrm_big,
            rug::Float::with_val(precision_bits, 0),
        ));
        let mut v: Vec<BigComplex> = (0..n)
            .map(|i| if i < rank { BigComplex::zero(precision_bits) } else { at[i][k].clone() })
            .collect();
        v[rank] = v[rank].add(&alpha);
        let mut vnorm2 = rug::Float::with_val(precision_bits, 0);
        for z in &v {
            vnorm2 += z.re().clone().square() + z.im().clone().square();
        }
        if vnorm2.is_zero() {
            continue;
        }
        let two_over = BigComplex::from_floats(
            rug::Float::with_val(precision_bits, 2.0 / &vnorm2),
            rug::Float::with_val(precision_bits, 0),
        );
        let apply = |target: &mut Vec<Vec<BigComplex>>, col: usize| {
            let mut dot = BigComplex::zero(precision_bits);
            for i in rank..n {
                dot = dot.add(&v[i].conj().mul(&target[i][col]));
            }
            let coeff = dot.mul(&two_over);
            for i in rank..n {
                target[i][col] = target[i][col].sub(&v[i].mul(&coeff));
            }
        };
        for col in k..m {
            apply(&mut at, col);
        }
        for col in 0..n {
            apply(&mut q, col);
        }
        rank += 1;
    }

    // Null vectors: rows k ≥ rank of Q* (columns of Q beyond the rank), i.e.
    // conjugated rows of the accumulated reflector product.
    let mut basis = Vec::new();
    for k in rank..n {
        basis.push((0..n).map(|i| q[k][i].conj()).collect::<Vec<_>>());
    }
    Nullspace2 { rank, basis, tol }
}

/// Float nullspace result; `tol` records the rank threshold actually used.
pub struct Nullspace2 {
    pub rank: usize,
    pub basis: Vec<Vec<BigComplex>>,
    pub tol: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(v: i64) -> QFElement {
        QFElement::from_int(v)
    }

    #[test]
    fn simple_rational_nullspace() {
        // x + 2y + 3z = 0; 2x + 4y + 7z = 0 → z = 0, x = −2y.
        let rows = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(7)],
        ];
        let ns = nullspace_exact(&rows).unwrap();
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.basis.len(), 1);
        let v = &ns.basis[0];
        // Check A·v = 0 exactly.
        for row in &rows {
            let mut s = QFElement::zero();
            for (a, x) in row.iter().zip(v) {
                s = s.add(&a.mul(x));
            }
            assert!(s.is_zero());
        }
        assert!(!v[1].is_zero());
        assert!(v[2].is_zero());
    }

    #[test]
    fn quadratic_field_nullspace() {
        let w = QFElement::sqrt_d(-3).unwrap();
        // (1+ω)x + 4y = 0 has nullspace spanned by (4, −(1+ω)).
        let rows = vec![vec![QFElement::one().add(&w), q(4)]];
        let ns = nullspace_exact(&rows).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.len(), 1);
        let v = &ns.basis[0];
        let resid = QFElement::one().add(&w).mul(&v[0]).add(&q(4).mul(&v[1]));
        assert!(resid.is_zero());
    }

    #[test]
    fn rank_deficient_reports_two_dim_nullspace() {
        let rows = vec![
            vec![q(1), q(1), q(1)],
            vec![q(2), q(2), q(2)],
        ];
        let ns = nullspace_exact(&rows).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.len(), 2);
    }

    #[test]
    fn fractional_entries_cleared() {
        let rows = vec![vec![
            QFElement::from_rational(rat(1, 2)),
            QFElement::from_rational(rat(1, 3)),
        ]];
        let ns = nullspace_exact(&rows).unwrap();
        let v = &ns.basis[0];
        let s = rows[0][0].mul(&v[0]).add(&rows[0][1].mul(&v[1]));
        assert!(s.is_zero());
    }

    #[test]
    fn bigfloat_qr_nullspace() {
        let prec = 128;
        let rows: Vec<Vec<BigComplex>> = vec![
            vec![
                BigComplex::with_f64(prec, 1.0, 0.0),
                BigComplex::with_f64(prec, 2.0, 0.0),
                BigComplex::with_f64(prec, 3.0, 0.0),
            ],
            vec![
                BigComplex::with_f64(prec, 0.0, 1.0),
                BigComplex::with_f64(prec, 0.0, 2.0),
                BigComplex::with_f64(prec, 1.0, 0.0),
            ],
        ];
        let ns = nullspace_bigfloat(&rows, prec);
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.basis.len(), 1);
        let v = &ns.basis[0];
        for row in &rows {
            let mut s = BigComplex::zero(prec);
            for (a, x) in row.iter().zip(v) {
                s = s.add(&a.mul(x));
            }
            assert!(s.abs_f64() < 1e-30, "residual {}", s.abs_f64());
        }
    }
}
