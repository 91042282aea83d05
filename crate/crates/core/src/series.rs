//! Laurent expansion of `f(z) = ∏ (z − a_j)^{α_j}` at infinity, powers of
//! `f`, path-explicit analytic continuation, and boundary sums `f⁺ + f⁻` on
//! cut arcs.
//!
//! The expansion is driven by the first-order equation `A·f′ = B·f` with
//! `A = ∏(z − a_j)` and `B = A·Σ α_j/(z − a_j)`: one pass, exact over the
//! coefficient field, O(p) work per coefficient. The branch of `f` is fixed
//! by `f(∞) = 1`; every continuation is along an explicit polyline, so the
//! `f⁺`/`f⁻` side conventions on cuts are reproducible.

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::Poly;
use crate::scalar::{BigComplex, QFElement, Rational};

/// Paths must keep this fraction of the configuration diameter away from
/// every branch point; closer approaches are errors, not silent precision
/// loss.
pub const PATH_CLEARANCE_FACTOR: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("invalid branch configuration: {0}")]
    InvalidConfig(String),
    #[error("exponents must satisfy α_j ∉ {{0, ±1/2}} + ℤ for the Hermite–Padé pipeline")]
    HpInadmissible,
    #[error("series inversion requires a nonzero constant term")]
    InversionOfZeroLead,
    #[error("power {0} not supported (only -1 and 2)")]
    UnsupportedPower(i32),
    #[error("path approaches a branch point: distance {dist:.3e}, required {required:.3e}")]
    PathTooClose { dist: f64, required: f64 },
    #[error("path must start in the base region near ∞ (|z₀| > {required:.3e}, got {got:.3e})")]
    BadBasePoint { got: f64, required: f64 },
    #[error("point lies too close to an arc endpoint")]
    EndpointEvaluation,
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// The branch points `a_j` and exponents `α_j` defining
/// `f(z) = ∏ (z − a_j)^{α_j}` with `Σ α_j = 0` and `f(∞) = 1`.
#[derive(Clone, Debug)]
pub struct BranchConfig {
    points: Vec<QFElement>,
    exponents: Vec<Rational>,
}

impl BranchConfig {
    pub fn new(points: Vec<QFElement>, exponents: Vec<Rational>) -> Result<Self, SeriesError> {
        if points.len() < 2 || points.len() != exponents.len() {
            return Err(SeriesError::InvalidConfig(
                "need p ≥ 2 points with one exponent each".into(),
            ));
        }
        for (i, a) in points.iter().enumerate() {
            for b in points.iter().skip(i + 1) {
                if a == b {
                    return Err(SeriesError::InvalidConfig("branch points must be distinct".into()));
                }
            }
        }
        let sum: Rational = exponents.iter().cloned().sum();
        if !sum.is_zero() {
            return Err(SeriesError::InvalidConfig("exponents must sum to zero".into()));
        }
        if exponents.iter().any(|a| a.denom().is_one()) {
            return Err(SeriesError::InvalidConfig("integer exponents are degenerate".into()));
        }
        Ok(BranchConfig { points, exponents })
    }

    /// Two-point configuration `f = ((z−1)/(z+1))^α`.
    pub fn two_point(alpha: Rational) -> Result<Self, SeriesError> {
        Self::new(
            vec![QFElement::from_int(1), QFElement::from_int(-1)],
            vec![alpha.clone(), -alpha],
        )
    }

    /// Cube roots of unity `{1, ω, ω²}` over `ℚ(√−3)`.
    pub fn cube_roots(exponents: [Rational; 3]) -> Result<Self, SeriesError> {
        let half = crate::scalar::rat(1, 2);
        let w1 = QFElement::new(-3, -half.clone(), half.clone()).unwrap();
        let w2 = QFElement::new(-3, -half.clone(), -half).unwrap();
        Self::new(vec![QFElement::from_int(1), w1, w2], exponents.to_vec())
    }

    /// The configuration of `f = (1 − z²)^{1/3} (1 − i√3·z)^{−2/3}` written
    /// in `∏(z − a_j)^{α_j}` form: points `{1, −1, −√−3/3}` with exponents
    /// `{1/3, 1/3, −2/3}`.
    pub fn fig4() -> Self {
        let third = crate::scalar::rat(1, 3);
        let a3 = QFElement::new(-3, Rational::zero(), -third.clone()).unwrap();
        Self::new(
            vec![QFElement::from_int(1), QFElement::from_int(-1), a3],
            vec![third.clone(), third.clone(), crate::scalar::rat(-2, 3)],
        )
        .unwrap()
    }

    pub fn points(&self) -> &[QFElement] {
        &self.points
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn p(&self) -> usize {
        self.points.len()
    }

    /// Additional non-degeneracy needed by the `1, f, f²` system: all
    /// `2α_j ∉ ℤ`.
    pub fn require_hp_admissible(&self) -> Result<(), SeriesError> {
        for a in &self.exponents {
            let doubled = a * crate::scalar::rat(2, 1);
            if doubled.denom().is_one() {
                return Err(SeriesError::HpInadmissible);
            }
        }
        Ok(())
    }

    /// `A(z) = ∏ (z − a_j)`.
    pub fn a_poly(&self) -> Poly {
        Poly::from_roots(&self.points)
    }

    /// `B(z) = A(z)·f′/f = Σ_j α_j ∏_{k≠j} (z − a_k)`; degree ≤ p−2 since
    /// the exponents sum to zero.
    pub fn b_poly(&self) -> Poly {
        let mut b = Poly::zero();
        for (j, alpha) in self.exponents.iter().enumerate() {
            let others: Vec<QFElement> = self
                .points
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, a)| a.clone())
                .collect();
            b = b.add(&Poly::from_roots(&others).scale(&QFElement::from_rational(alpha.clone())));
        }
        b
    }

    /// Doubled-exponent configuration defining `f²`.
    pub fn squared(&self) -> Result<Self, SeriesError> {
        Self::new(
            self.points.clone(),
            self.exponents.iter().map(|a| a * crate::scalar::rat(2, 1)).collect(),
        )
    }

    pub fn points_c64(&self) -> Vec<Complex64> {
        self.points.iter().map(|a| a.embed(53).to_c64()).collect()
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.points_c64();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in pts.iter().skip(i + 1) {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn max_abs_point(&self) -> f64 {
        self.points_c64().iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Truncated expansion `Σ_{k=0}^{N} c_k z^{−k}` at infinity.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries {
    coeffs: Vec<QFElement>,
}

impl LaurentSeries {
    pub fn new(coeffs: Vec<QFElement>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        LaurentSeries { coeffs }
    }

    /// Truncation order N (the deepest retained power is `z^{−N}`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[QFElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> QFElement {
        self.coeffs.get(k).cloned().unwrap_or_else(QFElement::zero)
    }

    pub fn truncated(&self, order: usize) -> Self {
        let end = (order + 1).min(self.coeffs.len());
        LaurentSeries { coeffs: self.coeffs[..end].to_vec() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeff(k).add(&rhs.coeff(k))).collect();
        LaurentSeries { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeff(k).sub(&rhs.coeff(k))).collect();
        LaurentSeries { coeffs }
    }

    pub fn scale(&self, s: &QFElement) -> Self {
        LaurentSeries { coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect() }
    }

    /// Cauchy product truncated to the smaller operand order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut out = vec![QFElement::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        LaurentSeries { coeffs: out }
    }

    /// Series inverse `1/self`, requiring `c_0 ≠ 0`.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::InversionOfZeroLead);
        }
        let inv0 = self.coeffs[0].inv();
        let mut out = vec![QFElement::zero(); self.coeffs.len()];
        out[0] = inv0.clone();
        for k in 1..self.coeffs.len() {
            let mut s = QFElement::zero();
            for j in 0..k {
                s = s.add(&out[j].mul(&self.coeff(k - j)));
            }
            out[k] = s.neg().mul(&inv0);
        }
        Ok(LaurentSeries { coeffs: out })
    }

    /// Index of the first nonzero coefficient (leading order in `1/z`).
    pub fn leading_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

}

impl std::fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LaurentSeries[N={}](", self.order())?;
        for (k, c) in self.coeffs.iter().take(6).enumerate() {
            write!(f, "{}{c}·z^-{k}", if k > 0 { " + " } else { "" })?;
        }
        if self.coeffs.len() > 6 {
            write!(f, " + …")?;
        }
        write!(f, ")")
    }
}

/// Truncated expansion at infinity with a general leading power:
/// `Σ_{k=0}^{len−1} coeffs[k] · z^{top−k}`. Used wherever polynomial and
/// decaying parts mix (e.g. `P·f` as input to differential-equation
/// recovery).
#[derive(Clone, PartialEq)]
pub struct TailSeries {
    pub top: i64,
    pub coeffs: Vec<QFElement>,
}

impl TailSeries {
    /// Deepest retained power.
    pub fn bottom(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    pub fn coeff(&self, power: i64) -> QFElement {
        if power > self.top || power < self.bottom() {
            QFElement::zero()
        } else {
            self.coeffs[(self.top - power) as usize].clone()
        }
    }

    /// Polynomials are exact, so they extend with zeros to any depth.
    pub fn from_poly(p: &Poly, bottom: i64) -> Self {
        let top = p.deg().map(|d| d as i64).unwrap_or(0).max(bottom);
        let mut coeffs = Vec::with_capacity((top - bottom + 1) as usize);
        for k in (bottom..=top).rev() {
            coeffs.push(if k >= 0 { p.coeff(k as usize) } else { QFElement::zero() });
        }
        TailSeries { top, coeffs }
    }

    pub fn from_laurent(s: &LaurentSeries) -> Self {
        TailSeries { top: 0, coeffs: s.coeffs().to_vec() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let top = self.top.max(rhs.top);
        let bottom = self.bottom().max(rhs.bottom());
        let coeffs = (bottom..=top)
            .rev()
            .map(|k| self.coeff(k).add(&rhs.coeff(k)))
            .collect();
        TailSeries { top, coeffs }
    }

    pub fn scale(&self, s: &QFElement) -> Self {
        TailSeries { top: self.top, coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn neg(&self) -> Self {
        TailSeries { top: self.top, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    /// Product with a polynomial; the truncation depth is preserved
    /// (coefficients below `self.bottom() + deg` would need unknown data, so
    /// the result is cut at `self.bottom() + deg`... they are dropped).
    pub fn mul_poly(&self, p: &Poly) -> Self {
        let Some(d) = p.deg() else {
            return TailSeries { top: self.top, coeffs: vec![QFElement::zero(); self.coeffs.len()] };
        };
        let d = d as i64;
        let top = self.top + d;
        // Valid down to self.bottom() + d: below that the product would need
        // series coefficients beyond the stored truncation.
        let bottom = self.bottom() + d;
        let mut coeffs = vec![QFElement::zero(); (top - bottom + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power_c = self.top - i as i64;
            for k in 0..=d {
                let pc = p.coeff(k as usize);
                if pc.is_zero() {
                    continue;
                }
                let power = power_c + k;
                if power >= bottom {
                    let idx = (top - power) as usize;
                    coeffs[idx] = coeffs[idx].add(&c.mul(&pc));
                }
            }
        }
        TailSeries { top, coeffs }
    }

    /// Termwise derivative; exact on the retained window.
    pub fn derivative(&self) -> Self {
        let top = self.top - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&QFElement::from_i64(self.top - i as i64)))
            .collect();
        TailSeries { top, coeffs }
    }

    pub fn is_zero_through(&self, bottom: i64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| self.top - (i as i64) < bottom || c.is_zero())
    }

    pub fn truncate_bottom(&self, bottom: i64) -> Self {
        let keep = ((self.top - bottom + 1).max(0) as usize).min(self.coeffs.len());
        TailSeries { top: self.top, coeffs: self.coeffs[..keep].to_vec() }
    }
}

impl std::fmt::Debug for TailSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TailSeries[{}..{}]", self.top, self.bottom())
    }
}

/// Expands `f` to order `N` via the `A·f′ = B·f` recurrence; exact, with
/// `c_0 = 1`.
pub fn expand_f(cfg: &BranchConfig, n: usize) -> Result<LaurentSeries, SeriesError> {
    if n < 1 {
        return Err(SeriesError::InvalidConfig("series order must be ≥ 1".into()));
    }
    let a = cfg.a_poly();
    let b = cfg.b_poly();
    let p = cfg.p();
    let mut c = Vec::with_capacity(n + 1);
    c.push(QFElement::one());
    for s in 1..=n {
        let s_i = s as i64;
        let mut acc = QFElement::zero();
        // Σ_{i<p} (p−i−s)·A_i·c_{s−(p−i)}
        for i in 0..p {
            let k = s_i - (p as i64 - i as i64);
            if k < 0 || k >= s_i {
                continue;
            }
            let factor = QFElement::from_i64(p as i64 - i as i64 - s_i);
            let ai = a.coeff(i);
            if ai.is_zero() {
                continue;
            }
            acc = acc.add(&factor.mul(&ai).mul(&c[k as usize]));
        }
        // − Σ_i B_i·c_{s−(p−1−i)}
        for i in 0..p.saturating_sub(1) {
            let k = s_i - (p as i64 - 1 - i as i64);
            if k < 0 || k >= s_i {
                continue;
            }
            let bi = b.coeff(i);
            if bi.is_zero() {
                continue;
            }
            acc = acc.sub(&bi.mul(&c[k as usize]));
        }
        c.push(acc.mul(&QFElement::from_rational(crate::scalar::rat(1, s_i))));
    }
    Ok(LaurentSeries::new(c))
}

/// Residual of the defining relation `A·f′ − B·f` on a candidate series;
/// identically zero (through the available order) for a correct expansion.
pub fn ode_residual(cfg: &BranchConfig, s: &LaurentSeries) -> TailSeries {
    let tail = TailSeries::from_laurent(s);
    let lhs = tail.derivative().mul_poly(&cfg.a_poly());
    let rhs = tail.mul_poly(&cfg.b_poly());
    lhs.add(&rhs.neg())
}

/// Reciprocal (`j = −1`) or square (`j = 2`) of a truncated series.
pub fn expand_power(s: &LaurentSeries, j: i32) -> Result<LaurentSeries, SeriesError> {
    match j {
        -1 => s.recip(),
        2 => Ok(s.mul(s)),
        other => Err(SeriesError::UnsupportedPower(other)),
    }
}

fn dist_point_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Analytic continuation of the normalized branch (`f → 1` at ∞) along a
/// polyline. The first point must lie in the base region `|z| > max|a_j|`;
/// every segment must respect the clearance policy. The value at the final
/// point is returned at the minimum precision of the path points.
pub fn eval_f(cfg: &BranchConfig, path: &[BigComplex]) -> Result<BigComplex, SeriesError> {
    assert!(path.len() >= 1, "path needs at least a base point");
    let prec = path.iter().map(|z| z.precision_bits()).min().unwrap();
    let pts = cfg.points_c64();
    let clearance = PATH_CLEARANCE_FACTOR * cfg.diameter();

    let z0 = path[0].to_c64();
    let max_abs = cfg.max_abs_point();
    if z0.norm() <= 1.05 * max_abs {
        return Err(SeriesError::BadBasePoint { got: z0.norm(), required: 1.05 * max_abs });
    }
    for w in path.windows(2) {
        let (a, b) = (w[0].to_c64(), w[1].to_c64());
        for &bp in &pts {
            let dist = dist_point_segment(bp, a, b);
            if dist < clearance {
                return Err(SeriesError::PathTooClose { dist, required: clearance });
            }
        }
    }

    let a_big: Vec<BigComplex> = cfg.points.iter().map(|a| a.embed(prec)).collect();
    // ℓ_j = log(1 − a_j/z₀): principal values pick the normalized branch
    // because Σ α_j · log z₀ drops out exactly.
    let mut logs: Vec<BigComplex> = a_big
        .iter()
        .map(|a| BigComplex::one(prec).sub(&a.div(&path[0])).ln())
        .collect();

    for w in path.windows(2) {
        let (a, b) = (w[0].clone(), w[1].clone());
        let (ac, bc) = (a.to_c64(), b.to_c64());
        let seg_min = pts
            .iter()
            .map(|&bp| dist_point_segment(bp, ac, bc))
            .fold(f64::INFINITY, f64::min);
        let steps = (((bc - ac).norm() / (0.45 * seg_min)).ceil() as usize).max(1);
        let mut prev = a.clone();
        for s in 1..=steps {
            let t = BigComplex::with_f64(prec, s as f64 / steps as f64, 0.0);
            let cur = a.add(&b.sub(&a).mul(&t));
            for (j, aj) in a_big.iter().enumerate() {
                let ratio = cur.sub(aj).div(&prev.sub(aj));
                logs[j] = logs[j].add(&ratio.ln());
            }
            prev = cur;
        }
    }

    let mut exponent = BigComplex::zero(prec);
    for (alpha, l) in cfg.exponents.iter().zip(&logs) {
        let af = BigComplex::from_rationals(prec, alpha, &Rational::zero());
        exponent = exponent.add(&af.mul(l));
    }
    Ok(exponent.exp())
}

/// Convenience wrapper lifting an f64 polyline to `precision_bits`.
pub fn eval_f_polyline(
    cfg: &BranchConfig,
    path: &[Complex64],
    precision_bits: u32,
) -> Result<BigComplex, SeriesError> {
    let lifted: Vec<BigComplex> = path
        .iter()
        .map(|z| BigComplex::with_f64(precision_bits, z.re, z.im))
        .collect();
    eval_f(cfg, &lifted)
}

/// An oriented cut arc: polyline from a branch point (`points[0]`) toward
/// the far endpoint (the Chebotarev point `v` for p = 3, the opposite
/// branch point for p = 2).
#[derive(Clone, Debug)]
pub struct CutArc {
    pub points: Vec<Complex64>,
}

impl CutArc {
    pub fn segment(from: Complex64, to: Complex64, n: usize) -> Self {
        let points = (0..=n)
            .map(|k| from + (to - from) * (k as f64 / n as f64))
            .collect();
        CutArc { points }
    }

    fn nearest_index(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, p) in self.points.iter().enumerate() {
            let d = (z - p).norm();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }

    fn tangent_at(&self, k: usize) -> Complex64 {
        let n = self.points.len();
        let (a, b) = if k + 1 < n {
            (self.points[k], self.points[k + 1])
        } else {
            (self.points[k - 1], self.points[k])
        };
        let t = b - a;
        t / t.norm()
    }
}

/// Which side of the oriented arc a continuation approaches from: `Plus` is
/// the left side while walking from the branch point toward the far end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Builds a continuation path from the base region to `target`, walking
/// along the arc at a small offset on the given side. `target` is typically
/// on the arc (boundary values) or adjacent to it (ratio probes). With
/// `cross` the walk happens on the opposite side and crosses the arc once
/// on the final hop, reaching the second branch.
fn side_path(
    cfg: &BranchConfig,
    arc: &CutArc,
    target: Complex64,
    side: Side,
    cross: bool,
) -> Result<Vec<Complex64>, SeriesError> {
    let diam = cfg.diameter();
    let h = 0.04 * diam;
    let k_target = arc.nearest_index(target);

    // Skip the portion of the arc too close to the branch-point end.
    let a0 = arc.points[0];
    let mut k_start = None;
    for (k, p) in arc.points.iter().enumerate() {
        if (p - a0).norm() >= (3.0 * h).max(0.05 * diam) {
            k_start = Some(k);
            break;
        }
    }
    let k_start = k_start.ok_or(SeriesError::EndpointEvaluation)?;
    if k_target < k_start {
        return Err(SeriesError::EndpointEvaluation);
    }

    let walk_side = if cross { -side.sign() } else { side.sign() };
    let mut path = Vec::new();
    // Entry from far outside along the outward continuation of the arc.
    let u = a0 - arc.points[k_start];
    let u = u / u.norm();
    let r_out = 3.0 * (cfg.max_abs_point() + diam) + 3.0;
    path.push(a0 + u * r_out);
    for k in k_start..=k_target {
        let n_hat = arc.tangent_at(k) * Complex64::new(0.0, 1.0);
        path.push(arc.points[k] + n_hat * (walk_side * h));
    }
    path.push(target);
    Ok(path)
}

/// `f⁺(ζ) + f⁻(ζ)` for ζ interior to a cut arc, by two continuations
/// approaching ζ from the two sides.
pub fn boundary_sum(
    cfg: &BranchConfig,
    arc: &CutArc,
    zeta: Complex64,
    precision_bits: u32,
) -> Result<BigComplex, SeriesError> {
    let plus = side_path(cfg, arc, zeta, Side::Plus, false)?;
    let minus = side_path(cfg, arc, zeta, Side::Minus, false)?;
    let fp = eval_f_polyline(cfg, &plus, precision_bits)?;
    let fm = eval_f_polyline(cfg, &minus, precision_bits)?;
    Ok(fp.add(&fm))
}

/// One-sided boundary value (used by tests that need `f⁺` and `f⁻`
/// separately).
pub fn boundary_value(
    cfg: &BranchConfig,
    arc: &CutArc,
    zeta: Complex64,
    side: Side,
    precision_bits: u32,
) -> Result<BigComplex, SeriesError> {
    let path = side_path(cfg, arc, zeta, side, false)?;
    eval_f_polyline(cfg, &path, precision_bits)
}

/// Analytic continuation of `f_j = f⁺ + f⁻` off the arc into the adjacent
/// domain: the branch reached without crossing plus the branch reached by
/// crossing the arc exactly once.
pub fn boundary_sum_continued(
    cfg: &BranchConfig,
    arc: &CutArc,
    z: Complex64,
    precision_bits: u32,
) -> Result<BigComplex, SeriesError> {
    let k = arc.nearest_index(z);
    let n_hat = arc.tangent_at(k) * Complex64::new(0.0, 1.0);
    let rel = z - arc.points[k];
    let side = if rel.re * n_hat.re + rel.im * n_hat.im >= 0.0 { Side::Plus } else { Side::Minus };
    let direct = side_path(cfg, arc, z, side, false)?;
    let crossed = side_path(cfg, arc, z, side, true)?;
    let fd = eval_f_polyline(cfg, &direct, precision_bits)?;
    let fc = eval_f_polyline(cfg, &crossed, precision_bits)?;
    Ok(fd.add(&fc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn quarter_cfg() -> BranchConfig {
        BranchConfig::two_point(rat(1, 4)).unwrap()
    }

    /// Independent oracle: multiply truncated binomial series
    /// `∏ (1 − a_j/z)^{α_j}` coefficient by coefficient.
    pub fn binomial_oracle(cfg: &BranchConfig, n: usize) -> LaurentSeries {
        let mut prod = LaurentSeries::new(
            std::iter::once(QFElement::one())
                .chain(std::iter::repeat(QFElement::zero()).take(n))
                .collect::<Vec<_>>(),
        );
        for (a, alpha) in cfg.points().iter().zip(cfg.exponents()) {
            // (1 + x)^α with x = −a/z: coefficients binom(α, m)·(−a)^m.
            let mut coeffs = Vec::with_capacity(n + 1);
            let mut binom = QFElement::one();
            let mut pow = QFElement::one();
            coeffs.push(QFElement::one());
            for m in 1..=n {
                // binom(α, m) = binom(α, m−1)·(α − m + 1)/m.
                let num = QFElement::from_rational(alpha - rat(m as i64 - 1, 1));
                binom = binom.mul(&num).mul(&QFElement::from_rational(rat(1, m as i64)));
                pow = pow.mul(&a.negated());
                coeffs.push(binom.mul(&pow));
            }
            prod = prod.mul(&LaurentSeries::new(coeffs));
        }
        prod
    }

    #[test]
    fn expand_f_matches_binomial_oracle_p2() {
        let cfg = quarter_cfg();
        let s = expand_f(&cfg, 12).unwrap();
        assert_eq!(s.coeff(0), QFElement::one());
        assert_eq!(s.coeff(1), QFElement::from_rational(rat(-1, 2)));
        assert_eq!(s.coeff(2), QFElement::from_rational(rat(1, 8)));
        let oracle = binomial_oracle(&cfg, 12);
        for k in 0..=12 {
            assert_eq!(s.coeff(k), oracle.coeff(k), "coefficient {k}");
        }
    }

    #[test]
    fn expand_f_matches_binomial_oracle_cube_roots() {
        let cfg = BranchConfig::cube_roots([rat(1, 3), rat(1, 3), rat(-2, 3)]).unwrap();
        let s = expand_f(&cfg, 10).unwrap();
        let oracle = binomial_oracle(&cfg, 10);
        for k in 0..=10 {
            assert_eq!(s.coeff(k), oracle.coeff(k), "coefficient {k}");
        }
    }

    #[test]
    fn defining_recurrence_residual_vanishes() {
        let cfg = BranchConfig::fig4();
        let s = expand_f(&cfg, 20).unwrap();
        let r = ode_residual(&cfg, &s);
        // Derivative and polynomial products are exact down to bottom+deg;
        // everything retained must vanish.
        assert!(r.is_zero_through(r.bottom()), "A·f′ − B·f ≠ 0: {r:?}");
    }

    #[test]
    fn powers_and_reciprocal() {
        let cfg = quarter_cfg();
        let s = expand_f(&cfg, 16).unwrap();
        let inv = expand_power(&s, -1).unwrap();
        let prod = inv.mul(&s);
        assert_eq!(prod.coeff(0), QFElement::one());
        for k in 1..=16 {
            assert!(prod.coeff(k).is_zero(), "1/f·f coefficient {k}");
        }
        // (f²)₁ = 2c₁ = −1 for α = 1/4.
        let sq = expand_power(&s, 2).unwrap();
        assert_eq!(sq.coeff(1), QFElement::from_rational(rat(-1, 1)));
        // f² as a series equals the doubled-exponent expansion, all orders.
        let sq_direct = expand_f(&cfg.squared().unwrap(), 16).unwrap();
        for k in 0..=16 {
            assert_eq!(sq.coeff(k), sq_direct.coeff(k), "f² coefficient {k}");
        }
        assert!(matches!(expand_power(&s, 3), Err(SeriesError::UnsupportedPower(3))));
    }

    #[test]
    fn eval_f_at_two_on_real_axis() {
        // ((2−1)/(2+1))^{1/4} = 3^{−1/4}.
        let cfg = quarter_cfg();
        let path = [Complex64::new(10.0, 0.0), Complex64::new(2.0, 0.0)];
        let v = eval_f_polyline(&cfg, &path, 128).unwrap();
        let expected = 3f64.powf(-0.25);
        assert!((v.re().to_f64() - expected).abs() < 1e-15);
        assert!(v.im().to_f64().abs() < 1e-25);
    }

    #[test]
    fn eval_f_far_point_is_one() {
        let cfg = BranchConfig::fig4();
        let path = [Complex64::new(1e7, 1e7)];
        let v = eval_f_polyline(&cfg, &path, 128).unwrap();
        assert!((v.to_c64() - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn monodromy_around_one_branch_point() {
        let cfg = quarter_cfg();
        // Loop around a₁ = 1 once, counterclockwise, then compare.
        let base = Complex64::new(4.0, 0.0);
        let mut path = vec![base];
        let center = Complex64::new(1.0, 0.0);
        let r = 0.5;
        path.push(center + Complex64::new(r, 0.0));
        for k in 1..=24 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 24.0;
            path.push(center + Complex64::from_polar(r, th));
        }
        path.push(base);
        let looped = eval_f_polyline(&cfg, &path, 128).unwrap();
        let plain = eval_f_polyline(&cfg, &[base], 128).unwrap();
        let ratio = looped.div(&plain).to_c64();
        let expected = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.25);
        assert!((ratio - expected).norm() < 1e-12, "monodromy ratio {ratio}");
    }

    #[test]
    fn homotopic_paths_agree() {
        let cfg = BranchConfig::fig4();
        let target = Complex64::new(0.4, 0.9);
        let p1 = [Complex64::new(8.0, 2.0), Complex64::new(3.0, 3.0), target];
        let p2 = [
            Complex64::new(8.0, 2.0),
            Complex64::new(6.0, 5.0),
            Complex64::new(1.0, 4.0),
            target,
        ];
        let a = eval_f_polyline(&cfg, &p1, 192).unwrap();
        let b = eval_f_polyline(&cfg, &p2, 192).unwrap();
        assert!(a.sub(&b).abs_f64() < 1e-40, "paths disagree: {}", a.sub(&b).abs_f64());
    }

    #[test]
    fn clearance_violation_is_an_error() {
        let cfg = quarter_cfg();
        let path = [Complex64::new(10.0, 0.0), Complex64::new(1.0 + 1e-6, 1e-9)];
        match eval_f_polyline(&cfg, &path, 64) {
            Err(SeriesError::PathTooClose { .. }) => {}
            other => panic!("expected clearance error, got {other:?}"),
        }
    }

    #[test]
    fn boundary_sum_at_segment_midpoint() {
        // f±(0) = e^{±iπα} on S = [−1, 1], so f⁺+f⁻ = 2cos(πα).
        let cfg = quarter_cfg();
        let arc = CutArc::segment(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), 64);
        let s = boundary_sum(&cfg, &arc, Complex64::new(0.0, 0.0), 128).unwrap();
        let expected = 2.0 * (std::f64::consts::PI / 4.0).cos();
        assert!((s.re().to_f64() - expected).abs() < 1e-20);
        assert!(s.im().to_f64().abs() < 1e-20);
    }

    #[test]
    fn boundary_sum_general_point_closed_form() {
        // f±(x) = e^{±iπα}((1−x)/(1+x))^α on (−1,1): the sum matches
        // 2cos(πα)·((1−x)/(1+x))^{1/4} to quadrature precision at 128 bits.
        let cfg = quarter_cfg();
        let arc = CutArc::segment(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), 64);
        for x in [-0.62, -0.3, 0.11, 0.47, 0.73] {
            let s = boundary_sum(&cfg, &arc, Complex64::new(x, 0.0), 160).unwrap();
            let magnitude = ((1.0 - x) / (1.0 + x)).powf(0.25);
            let expected = 2.0 * (std::f64::consts::PI / 4.0).cos() * magnitude;
            assert!(
                (s.re().to_f64() - expected).abs() < 1e-20,
                "x = {x}: {} vs {expected}",
                s.re().to_f64()
            );
            assert!(s.im().to_f64().abs() < 1e-20);
        }
    }

    #[test]
    fn boundary_sum_alpha_to_zero_limit() {
        // α → 0 gives f ≡ 1 and the sum → 2 at any interior point; the
        // deviation is O(α).
        let cfg = BranchConfig::two_point(rat(1, 1_000_000)).unwrap();
        let arc = CutArc::segment(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), 64);
        let s = boundary_sum(&cfg, &arc, Complex64::new(0.2, 0.0), 96).unwrap();
        assert!((s.re().to_f64() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn boundary_sum_is_continuous_along_arc() {
        let cfg = quarter_cfg();
        let arc = CutArc::segment(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), 64);
        let step = 1e-3;
        let a = boundary_sum(&cfg, &arc, Complex64::new(0.3, 0.0), 96).unwrap();
        let b = boundary_sum(&cfg, &arc, Complex64::new(0.3 + step, 0.0), 96).unwrap();
        assert!(a.sub(&b).abs_f64() < 10.0 * step);
    }

    #[test]
    fn endpoint_evaluation_rejected() {
        let cfg = quarter_cfg();
        let arc = CutArc::segment(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), 64);
        assert!(matches!(
            boundary_sum(&cfg, &arc, Complex64::new(0.999, 0.0), 96),
            Err(SeriesError::EndpointEvaluation)
        ));
    }

    #[test]
    fn config_validation() {
        assert!(BranchConfig::new(
            vec![QFElement::from_int(1), QFElement::from_int(-1)],
            vec![rat(1, 2), rat(-1, 2)],
        )
        .is_ok());
        // Integer exponents rejected.
        assert!(BranchConfig::new(
            vec![QFElement::from_int(1), QFElement::from_int(-1)],
            vec![rat(1, 1), rat(-1, 1)],
        )
        .is_err());
        // Exponent sum must vanish.
        assert!(BranchConfig::new(
            vec![QFElement::from_int(1), QFElement::from_int(-1)],
            vec![rat(1, 4), rat(1, 4)],
        )
        .is_err());
        // ±1/2 passes general validation but not the HP gate.
        let half = BranchConfig::two_point(rat(1, 2)).unwrap();
        assert!(matches!(half.require_hp_admissible(), Err(SeriesError::HpInadmissible)));
        assert!(BranchConfig::two_point(rat(1, 4)).unwrap().require_hp_admissible().is_ok());
    }
}
