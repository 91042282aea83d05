//! Diagonal Padé and type-I Hermite–Padé solvers.
//!
//! Padé: nontrivial `P_{n,0}, P_{n,1}` of degree ≤ n with
//! `T_n = P_{n,0} + P_{n,1}·f = O(z^{−n−1})` — a (2n+1)×(2n+2) linear
//! system on the coefficients. Hermite–Padé: `Q_{n,0}, Q_{n,1}, Q_{n,2}` of
//! degree ≤ n with `R̃_n = Q_{n,0} + Q_{n,1}f + Q_{n,2}f² = O(z^{−2n−2})` —
//! a (3n+2)×(3n+3) system. Both are solved by exact fraction-free
//! elimination; the Hankel blocks are exponentially ill-conditioned in `n`,
//! so rank decisions are never made in floating point on the exact path. A
//! big-float QR fallback handles inexact input series.

use thiserror::Error;

use crate::linalg::{nullspace_bigfloat, nullspace_exact, LinalgError};
use crate::poly::Poly;
use crate::scalar::{BigComplex, QFElement};
use crate::series::{LaurentSeries, TailSeries};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("series order {got} too short: need at least {need}")]
    SeriesTooShort { got: usize, need: usize },
    #[error("input series is identically zero")]
    ZeroInput,
    #[error("solver produced an empty nullspace (inconsistent system)")]
    EmptyNullspace,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How the returned polynomials were scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Highest-index polynomial (P_{n,1} or Q_{n,2}) is monic of degree n.
    MonicLast,
    /// Degenerate index: scaled so the largest coefficient has unit size.
    UnitMaxCoeff,
}

#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    /// Dimension of the nullspace minus one; zero at normal indices.
    pub rank_defect: usize,
    /// Additional nullspace vectors at degenerate indices (as polynomial
    /// tuples), never silently resolved away.
    pub extra_solutions: Vec<Vec<Poly>>,
    /// Max residual coefficient magnitude (exactly zero on the exact path).
    pub residual_bound: f64,
    /// Float precision used, `None` for exact arithmetic.
    pub precision_used: Option<u32>,
}

/// A solved Padé or Hermite–Padé index: the polynomial tuple, the remainder
/// expansion actually achieved, and solver diagnostics.
#[derive(Debug, Clone)]
pub struct HPSolution {
    pub degree: usize,
    /// `[P_{n,0}, P_{n,1}]` or `[Q_{n,0}, Q_{n,1}, Q_{n,2}]`.
    pub polys: Vec<Poly>,
    pub remainder: LaurentSeries,
    pub normalization: Normalization,
    pub diagnostics: SolveDiagnostics,
}

impl HPSolution {
    pub fn q(&self, j: usize) -> &Poly {
        &self.polys[j]
    }

    /// Contractual leading order of the remainder: n+1 for Padé, 2n+2 for
    /// Hermite–Padé.
    pub fn required_remainder_order(&self) -> usize {
        if self.polys.len() == 2 {
            self.degree + 1
        } else {
            2 * self.degree + 2
        }
    }
}

fn check_not_zero(s: &LaurentSeries) -> Result<(), ApproxError> {
    if s.coeffs().iter().all(|c| c.is_zero()) {
        return Err(ApproxError::ZeroInput);
    }
    Ok(())
}

/// Scale a solution tuple: monic highest polynomial at normal indices,
/// unit-max-coefficient otherwise (exact size comparison via field norm).
fn normalize_tuple(polys: &mut [Poly], normal: bool) -> Normalization {
    let last = polys.last().unwrap();
    if normal {
        let lc = last.leading().cloned().expect("normal index has nonzero last poly");
        let inv = lc.inv();
        for p in polys.iter_mut() {
            *p = p.scale(&inv);
        }
        Normalization::MonicLast
    } else {
        let mut best: Option<QFElement> = None;
        for p in polys.iter() {
            for c in p.coeffs() {
                if c.is_zero() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => c.norm() > b.norm(),
                };
                if better {
                    best = Some(c.clone());
                }
            }
        }
        if let Some(b) = best {
            let inv = b.inv();
            for p in polys.iter_mut() {
                *p = p.scale(&inv);
            }
        }
        Normalization::UnitMaxCoeff
    }
}

/// Assembles the remainder `Σ_j Q_j f^j` and checks the order contract.
fn assemble_remainder(
    polys: &[Poly],
    powers: &[LaurentSeries],
    min_order: usize,
) -> LaurentSeries {
    let depth = powers.iter().map(|s| s.order()).min().unwrap();
    let deg = polys
        .iter()
        .filter_map(|p| p.deg())
        .max()
        .unwrap_or(0) as i64;
    let mut acc = TailSeries::from_poly(&polys[0], -(depth as i64) + deg);
    for (p, s) in polys.iter().skip(1).zip(powers) {
        acc = acc.add(&TailSeries::from_laurent(s).mul_poly(p));
    }
    // Positive powers cancel by construction of Q₀; the solved conditions
    // kill everything above the contractual order.
    let bottom = acc.bottom();
    let mut coeffs = Vec::with_capacity((-bottom).max(0) as usize + 1);
    for k in 0..=(-bottom) {
        let c = acc.coeff(-k);
        debug_assert!(
            k >= min_order as i64 || c.is_zero(),
            "remainder order contract violated at z^-{k}"
        );
        coeffs.push(c);
    }
    LaurentSeries::new(coeffs)
}

/// Diagonal Padé polynomials of degree `n` from the expansion of `f`.
///
/// Requires the series to order ≥ 2n+2. Returns the monic-`P_{n,1}`
/// normalized solution at normal indices; degenerate indices are reported
/// through the diagnostics (`rank_defect > 0`), not resolved.
pub fn pade_solve(
    series_f: &LaurentSeries,
    n: usize,
) -> Result<HPSolution, ApproxError> {
    check_not_zero(series_f)?;
    let need = 2 * n + 2;
    if series_f.order() < need {
        return Err(ApproxError::SeriesTooShort { got: series_f.order(), need });
    }

    // Rows s = 1..n: Σ_i q_i c_{i+s} = 0 (coefficients of z^{−s} in P₁·f
    // after P₀ has absorbed the polynomial part).
    let rows: Vec<Vec<QFElement>> = (1..=n)
        .map(|s| (0..=n).map(|i| series_f.coeff(i + s)).collect())
        .collect();
    let (q_vecs, defect) = if n == 0 {
        (vec![vec![QFElement::one()]], 0)
    } else {
        let ns = nullspace_exact(&rows)?;
        if ns.basis.is_empty() {
            return Err(ApproxError::EmptyNullspace);
        }
        (ns.basis, n + 1 - ns.rank - 1)
    };

    let build = |q: &[QFElement]| -> Vec<Poly> {
        let p1 = Poly::new(q.to_vec());
        // p_m = −[P₁·f]_m for m = 0..n.
        let p0 = Poly::new(
            (0..=n)
                .map(|m| {
                    let mut s = QFElement::zero();
                    for i in m..=n {
                        s = s.add(&p1.coeff(i).mul(&series_f.coeff(i - m)));
                    }
                    s.neg()
                })
                .collect(),
        );
        vec![p0, p1]
    };

    let mut polys = build(&q_vecs[0]);
    let extra: Vec<Vec<Poly>> = q_vecs[1..].iter().map(|q| build(q)).collect();
    let remainder_raw = assemble_remainder(&polys, std::slice::from_ref(series_f), n + 1);
    let normal = defect == 0
        && polys[1].deg() == Some(n)
        && !remainder_raw.coeff(n + 1).is_zero();
    let norm = normalize_tuple(&mut polys, normal);
    let remainder = assemble_remainder(&polys, std::slice::from_ref(series_f), n + 1);

    Ok(HPSolution {
        degree: n,
        polys,
        remainder,
        normalization: norm,
        diagnostics: SolveDiagnostics {
            rank_defect: defect,
            extra_solutions: extra,
            residual_bound: 0.0,
            precision_used: None,
        },
    })
}

/// Type-I Hermite–Padé polynomials for `1, f, f²` of degree `n`.
///
/// Requires both series to order ≥ 4n+4 (headroom for downstream remainder
/// checks). Monic `Q_{n,2}` at normal indices.
pub fn hp_solve(
    series_f: &LaurentSeries,
    series_f2: &LaurentSeries,
    n: usize,
) -> Result<HPSolution, ApproxError> {
    check_not_zero(series_f)?;
    check_not_zero(series_f2)?;
    let need = 4 * n + 4;
    let got = series_f.order().min(series_f2.order());
    if got < need {
        return Err(ApproxError::SeriesTooShort { got, need });
    }

    // Rows s = 1..2n+1: Σ_i w1_i c¹_{i+s} + Σ_i w2_i c²_{i+s} = 0.
    let rows: Vec<Vec<QFElement>> = (1..=2 * n + 1)
        .map(|s| {
            let mut row = Vec::with_capacity(2 * n + 2);
            for i in 0..=n {
                row.push(series_f.coeff(i + s));
            }
            for i in 0..=n {
                row.push(series_f2.coeff(i + s));
            }
            row
        })
        .collect();
    let ns = nullspace_exact(&rows)?;
    if ns.basis.is_empty() {
        return Err(ApproxError::EmptyNullspace);
    }
    let defect = ns.basis.len() - 1;

    let build = |w: &[QFElement]| -> Vec<Poly> {
        let q1 = Poly::new(w[..=n].to_vec());
        let q2 = Poly::new(w[n + 1..].to_vec());
        let q0 = Poly::new(
            (0..=n)
                .map(|m| {
                    let mut s = QFElement::zero();
                    for i in m..=n {
                        s = s.add(&q1.coeff(i).mul(&series_f.coeff(i - m)));
                        s = s.add(&q2.coeff(i).mul(&series_f2.coeff(i - m)));
                    }
                    s.neg()
                })
                .collect(),
        );
        vec![q0, q1, q2]
    };

    let mut polys = build(&ns.basis[0]);
    let extra: Vec<Vec<Poly>> = ns.basis[1..].iter().map(|w| build(w)).collect();
    let powers = [series_f.clone(), series_f2.clone()];
    let remainder_raw = assemble_remainder(&polys, &powers, 2 * n + 2);
    let normal = defect == 0
        && polys[2].deg() == Some(n)
        && !remainder_raw.coeff(2 * n + 2).is_zero();
    let norm = normalize_tuple(&mut polys, normal);
    let remainder = assemble_remainder(&polys, &powers, 2 * n + 2);

    Ok(HPSolution {
        degree: n,
        polys,
        remainder,
        normalization: norm,
        diagnostics: SolveDiagnostics {
            rank_defect: defect,
            extra_solutions: extra,
            residual_bound: 0.0,
            precision_used: None,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalityReport {
    pub normal: bool,
    pub defect: usize,
}

/// An index is normal when the nullspace is one-dimensional, the designated
/// monic polynomial has full degree `n`, and the remainder's leading
/// coefficient at the contractual order is nonzero.
pub fn normality_check(sol: &HPSolution) -> NormalityReport {
    let defect = sol.diagnostics.rank_defect;
    let full_degree = sol.polys.last().and_then(|p| p.deg()) == Some(sol.degree);
    let lead_nonzero = !sol.remainder.coeff(sol.required_remainder_order()).is_zero();
    NormalityReport { normal: defect == 0 && full_degree && lead_nonzero, defect }
}

/// Float-path Hermite–Padé solve for inexact input series: QR nullspace
/// with precision escalation. Doubles the working precision until the
/// residual coefficients are below `2^{−prec/2}·‖matrix‖` or the cap is
/// reached.
pub struct FloatSolution {
    pub degree: usize,
    pub polys: Vec<Vec<BigComplex>>,
    pub residual_bound: f64,
    pub precision_used: u32,
    pub rank_defect: usize,
}

pub fn hp_solve_float(
    series_f: &[BigComplex],
    series_f2: &[BigComplex],
    n: usize,
    start_bits: u32,
    cap_bits: u32,
) -> Result<FloatSolution, ApproxError> {
    let need = 3 * n + 2;
    if series_f.len() <= need || series_f2.len() <= need {
        return Err(ApproxError::SeriesTooShort {
            got: series_f.len().min(series_f2.len()).saturating_sub(1),
            need,
        });
    }
    let mut prec = start_bits.max(53);
    loop {
        let rows: Vec<Vec<BigComplex>> = (1..=2 * n + 1)
            .map(|s| {
                let mut row = Vec::with_capacity(2 * n + 2);
                for i in 0..=n {
                    row.push(series_f[i + s].clone());
                }
                for i in 0..=n {
                    row.push(series_f2[i + s].clone());
                }
                row
            })
            .collect();
        let ns = nullspace_bigfloat(&rows, prec);
        if ns.basis.is_empty() {
            return Err(ApproxError::EmptyNullspace);
        }
        let w = &ns.basis[0];
        let norm_max = rows.iter().flatten().map(|z| z.abs_f64()).fold(0.0f64, f64::max);
        let mut residual: f64 = 0.0;
        for row in &rows {
            let mut acc = BigComplex::zero(prec);
            for (a, x) in row.iter().zip(w) {
                acc = acc.add(&a.mul(x));
            }
            residual = residual.max(acc.abs_f64());
        }
        let target = norm_max * 2f64.powi(-(prec as i32) / 2);
        if residual <= target || prec >= cap_bits {
            let q1 = w[..=n].to_vec();
            let q2 = w[n + 1..].to_vec();
            let q0: Vec<BigComplex> = (0..=n)
                .map(|m| {
                    let mut s = BigComplex::zero(prec);
                    for i in m..=n {
                        s = s.add(&q1[i].mul(&series_f[i - m]));
                        s = s.add(&q2[i].mul(&series_f2[i - m]));
                    }
                    s.neg()
                })
                .collect();
            let defect = (2 * n + 2).saturating_sub(ns.rank).saturating_sub(1);
            return Ok(FloatSolution {
                degree: n,
                polys: vec![q0, q1, q2],
                residual_bound: residual,
                precision_used: prec,
                rank_defect: defect,
            });
        }
        prec = (prec * 2).min(cap_bits);
    }
}
