//! The mixed continuous/discrete orthogonality measure: weight on the unit
//! circle, normalisation constant, residue masses at the geometric support
//! points, contour quadrature with node doubling, q-integrals and adaptive
//! bilateral sums.
//!
//! The measure of a parameter tuple (a, b, c, d; t) has a continuous part
//! K·Δ(x) on the unit circle and discrete masses K·Res_{x=s} Δ(x)/x at the
//! points s = t d q^k and s = a q^k that lie outside the unit circle.
//! Residues are computed by analytic factor removal in log space: each
//! q-Pochhammer or theta factor of Δ is scanned for vanishing factors, which
//! are replaced by their derivatives, so that the result stays finite at
//! arbitrarily deep support points where the raw products overflow.
//!
//! When (td)² lands on an integer power of q, each support point collides
//! with a pole of the second theta factor; the two limiting residues are
//! equal and the correct mass is half the merged residue.  [`DiscreteMass`]
//! exposes both numbers: `residue` is what a small-circle contour around the
//! point measures, `mass` is the weight the measure actually carries.

use crate::families::AWParams;
use crate::qcore::{mul_series, qpoch, qpoch_sym, theta, QBase, QError, QResult, SeriesResult};
use num_complex::Complex64;
use std::collections::BTreeMap;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameter tuple of a measure.  Unlike [`AWParams`] this carries no
/// admissibility invariants: the degenerate tuples behind the q-Bessel-level
/// orthogonality relations (for example td = −1) are deliberately allowed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeasureParams {
    pub q: QBase,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub t: f64,
}

impl MeasureParams {
    pub fn from_aw(p: &AWParams) -> Self {
        MeasureParams {
            q: p.q(),
            a: p.a(),
            b: p.b(),
            c: p.c(),
            d: p.d(),
            t: p.t(),
        }
    }

    pub fn new_unchecked(q: QBase, a: f64, b: f64, cc: f64, d: f64, t: f64) -> Self {
        MeasureParams { q, a, b, c: cc, d, t }
    }

    #[inline]
    pub fn td(&self) -> f64 {
        self.t * self.d
    }
}

/// Weight Δ(x) = (x^{±2}, qx^{±1}/d; q)_∞ / [θ(tdx^{±1}) (ax^{±1}, bx^{±1}, cx^{±1}; q)_∞].
pub fn weight_delta(p: &MeasureParams, x: Complex64) -> QResult<SeriesResult> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("weight requires x != 0".into()));
    }
    let q = p.q;
    let num = mul_series(
        mul_series(qpoch(x * x, q, None), qpoch((x * x).inv(), q, None)),
        qpoch_sym(c(q.q() / p.d), x, q)?,
    );
    let td = c(p.td());
    let mut den = mul_series(theta(td * x, q)?, theta(td / x, q)?);
    for coeff in [p.a, p.b, p.c] {
        den = mul_series(den, qpoch_sym(c(coeff), x, q)?);
    }
    if den.value.norm() == 0.0 {
        return Err(QError::Pole(format!("weight has a pole at x = {x}")));
    }
    crate::qcore::div_series(num, den)
}

/// Normalisation constant
/// K = (q a b c d t²)^{−1/2} (ab, ac, bc, qa/d, q; q)_∞ (θ(qt)θ(adt)θ(bdt)θ(cdt))^{1/2}.
pub fn const_k(p: &MeasureParams) -> QResult<f64> {
    let q = p.q;
    let qq = q.q();
    let pref2 = qq * p.a * p.b * p.c * p.d * p.t * p.t;
    if pref2 <= 0.0 {
        return Err(QError::Domain("nonpositive scaling under the square root".into()));
    }
    let mut prod = 1.0;
    for v in [p.a * p.b, p.a * p.c, p.b * p.c, qq * p.a / p.d, qq] {
        prod *= qpoch(c(v), q, None).value.re;
    }
    let mut radicand = 1.0;
    for v in [
        qq * p.t,
        p.a * p.d * p.t,
        p.b * p.d * p.t,
        p.c * p.d * p.t,
    ] {
        radicand *= theta(c(v), q)?.value.re;
    }
    if radicand <= 0.0 {
        return Err(QError::Domain(format!(
            "nonpositive theta product {radicand} under the square root"
        )));
    }
    Ok(pref2.powf(-0.5) * prod * radicand.sqrt())
}

/// One point of the discrete support with its merged residue and the mass
/// the measure carries there (half the residue at a theta-degeneracy).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiscreteMass {
    pub point: f64,
    pub residue: f64,
    pub mass: f64,
    /// Net pole order of Δ at the point (0 for a removable/regular point).
    pub order: i32,
}

/// Variable substitution applied to a product family (c·φ(x); q)_∞.
#[derive(Debug, Clone, Copy)]
enum Var {
    X,
    Ix,
    X2,
    Ix2,
}

impl Var {
    fn phi(self, s: f64) -> f64 {
        match self {
            Var::X => s,
            Var::Ix => 1.0 / s,
            Var::X2 => s * s,
            Var::Ix2 => 1.0 / (s * s),
        }
    }

    fn dphi(self, s: f64) -> f64 {
        match self {
            Var::X => 1.0,
            Var::Ix => -1.0 / (s * s),
            Var::X2 => 2.0 * s,
            Var::Ix2 => -2.0 / (s * s * s),
        }
    }
}

/// The factor families of Δ, numerator then denominator; the first four
/// denominator entries together form the two theta factors θ(tdx^{±1}).
#[allow(clippy::type_complexity)]
fn family_lists(p: &MeasureParams) -> (Vec<(Var, f64)>, Vec<(Var, f64)>) {
    let qq = p.q.q();
    let td = p.td();
    let num = vec![
        (Var::X2, 1.0),
        (Var::Ix2, 1.0),
        (Var::X, qq / p.d),
        (Var::Ix, qq / p.d),
    ];
    let mut den = vec![
        (Var::X, td),
        (Var::Ix, qq / td),
        (Var::Ix, td),
        (Var::X, qq / td),
    ];
    for coeff in [p.a, p.b, p.c] {
        den.push((Var::X, coeff));
        den.push((Var::Ix, coeff));
    }
    (num, den)
}

struct FamilyLog {
    logmag: f64,
    sign: f64,
    /// Derivative factors −c q^m φ'(s), one per vanishing product factor.
    zeros: Vec<f64>,
}

/// Log-magnitude/sign evaluation of (c·φ(s); q)_∞ with vanishing factors
/// split out and replaced by their derivatives.
fn eval_family_log(var: Var, coeff: f64, s: f64, q: f64) -> FamilyLog {
    let mut out = FamilyLog {
        logmag: 0.0,
        sign: 1.0,
        zeros: Vec::new(),
    };
    let mut base = coeff * var.phi(s);
    let mut qm = 1.0;
    let mut m = 0;
    while base.abs() > 1e-18 && m <= 600 {
        let f = 1.0 - base;
        if f.abs() < 1e-10 * (1.0 + base.abs()) {
            out.zeros.push(-coeff * qm * var.dphi(s));
        } else {
            out.logmag += f.abs().ln();
            if f < 0.0 {
                out.sign = -out.sign;
            }
        }
        base *= q;
        qm *= q;
        m += 1;
    }
    out
}

/// Residue of Δ(x)/x at a real support point s, by analytic factor removal.
///
/// A point where no denominator factor vanishes is not a pole and yields a
/// genericity error; a net pole order above one does too.  A point where
/// numerator zeros cancel all denominator zeros is regular and gets mass 0.
pub fn residue_mass(p: &MeasureParams, s: f64) -> QResult<DiscreteMass> {
    if s == 0.0 || !s.is_finite() {
        return Err(QError::Domain("support point must be finite and nonzero".into()));
    }
    let qq = p.q.q();
    let (num, den) = family_lists(p);
    let mut logmag = 0.0;
    let mut sign = 1.0;
    let mut num_zeros: Vec<f64> = Vec::new();
    let mut den_zeros: Vec<f64> = Vec::new();
    let mut theta_zero_count = 0usize;
    for &(var, coeff) in &num {
        let fl = eval_family_log(var, coeff, s, qq);
        logmag += fl.logmag;
        sign *= fl.sign;
        num_zeros.extend(fl.zeros);
    }
    for (i, &(var, coeff)) in den.iter().enumerate() {
        let fl = eval_family_log(var, coeff, s, qq);
        logmag -= fl.logmag;
        sign *= fl.sign;
        if i < 4 {
            theta_zero_count += fl.zeros.len();
        }
        den_zeros.extend(fl.zeros);
    }
    if den_zeros.is_empty() {
        return Err(QError::Genericity(format!(
            "x = {s} is not a pole of the weight"
        )));
    }
    let order = den_zeros.len() as i32 - num_zeros.len() as i32;
    if order <= 0 {
        return Ok(DiscreteMass {
            point: s,
            residue: 0.0,
            mass: 0.0,
            order: order.max(0),
        });
    }
    if order > 1 {
        return Err(QError::Genericity(format!(
            "weight has a pole of order {order} at x = {s}"
        )));
    }
    for z in &num_zeros {
        logmag += z.abs().ln();
        if *z < 0.0 {
            sign = -sign;
        }
    }
    for z in &den_zeros {
        logmag -= z.abs().ln();
        if *z < 0.0 {
            sign = -sign;
        }
    }
    logmag -= s.abs().ln();
    if s < 0.0 {
        sign = -sign;
    }
    let residue = sign * logmag.exp();
    // A collision of both theta factors at the same point merges two equal
    // limiting residues; the measure carries half of the merged value.
    let mass = if theta_zero_count >= 2 {
        residue / 2.0
    } else {
        residue
    };
    Ok(DiscreteMass {
        point: s,
        residue,
        mass,
        order,
    })
}

/// Discrete support of the measure within the line index window
/// [k_min, k_max]: the points t d q^k and a q^k outside the closed unit
/// disc, keyed by k (q-Bessel-level grids index masses by k).
pub fn discrete_support(
    p: &MeasureParams,
    k_min: i32,
    k_max: i32,
) -> QResult<BTreeMap<i32, DiscreteMass>> {
    let qq = p.q.q();
    let td = p.td();
    let mut out = BTreeMap::new();
    for k in k_min..=k_max {
        let s = td * qq.powi(k);
        if s.abs() > 1.0 {
            let m = residue_mass(p, s)?;
            if m.order > 0 {
                out.insert(k, m);
            }
        }
    }
    Ok(out)
}

/// Points a q^k, k ≥ 0, above 1 (a finite set).
pub fn support_plus(p: &MeasureParams) -> QResult<Vec<DiscreteMass>> {
    let qq = p.q.q();
    let mut out = Vec::new();
    let mut s = p.a;
    while s > 1.0 {
        out.push(residue_mass(p, s)?);
        s *= qq;
    }
    Ok(out)
}

/// Contour part of the integral at a fixed node count: the midpoint rule for
/// (K/4πi)∮ f(x)Δ(x) dx/x over the unit circle, without the K factor.
pub fn contour_part(
    p: &MeasureParams,
    f: &dyn Fn(Complex64) -> QResult<Complex64>,
    nodes: usize,
) -> QResult<Complex64> {
    let mut tot = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64;
        let x = Complex64::from_polar(1.0, th);
        tot += f(x)? * weight_delta(p, x)?.value;
    }
    Ok(tot / (2.0 * nodes as f64))
}

/// Controls for [`integrate_nu`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub tol: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Deepest discrete index examined below the outermost support point.
    pub max_depth: i32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: 1e-12,
            min_nodes: 64,
            max_nodes: 4096,
            max_depth: 200,
        }
    }
}

/// Integrate a symmetric function against the measure: contour part with
/// node doubling until two successive estimates agree, plus the discrete
/// masses, truncated adaptively once the term magnitudes stay negligible.
pub fn integrate_nu(
    p: &MeasureParams,
    f: &dyn Fn(Complex64) -> QResult<Complex64>,
    cfg: &QuadratureConfig,
) -> QResult<Complex64> {
    integrate_nu_indexed(p, f, &|_, s| f(c(s)), cfg)
}

/// Variant of [`integrate_nu`] that receives the discrete-line index k along
/// with the support point t d q^k, so callers can supply precomputed
/// recurrence-based values on the lattice while the contour still uses the
/// plain closure.
pub fn integrate_nu_indexed(
    p: &MeasureParams,
    f: &dyn Fn(Complex64) -> QResult<Complex64>,
    f_line: &dyn Fn(i32, f64) -> QResult<Complex64>,
    cfg: &QuadratureConfig,
) -> QResult<Complex64> {
    let k = const_k(p)?;

    let mut nodes = cfg.min_nodes;
    let mut est = contour_part(p, f, nodes)?;
    let mut converged = false;
    while nodes < cfg.max_nodes {
        nodes *= 2;
        let next = contour_part(p, f, nodes)?;
        let diff = (next - est).norm();
        est = next;
        if diff < cfg.tol * (1.0 + est.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(QError::Quadrature(format!(
            "contour estimates still moving at {nodes} nodes"
        )));
    }
    let mut total = est * k;

    // negative-line support points outside the unit circle, walked outward
    let qq = p.q.q();
    let td = p.td();
    let mut k_top = 0i32;
    while (td * qq.powi(k_top + 1)).abs() > 1.0 {
        k_top += 1;
    }
    let mut small_streak = 0usize;
    let mut kk = k_top;
    while kk > k_top - cfg.max_depth {
        let s = td * qq.powi(kk);
        if s.abs() > 1.0 {
            let m = residue_mass(p, s)?;
            if m.order > 0 {
                let term = f_line(kk, s)? * (k * m.mass);
                total += term;
                if term.norm() < cfg.tol * (1.0 + total.norm()) {
                    small_streak += 1;
                    if small_streak >= 3 {
                        break;
                    }
                } else {
                    small_streak = 0;
                }
            }
        }
        kk -= 1;
    }
    if small_streak < 3 {
        return Err(QError::Divergence(
            "discrete tail of the measure did not become negligible".into(),
        ));
    }
    for m in support_plus(p)? {
        total += f(c(m.point))? * (k * m.mass);
    }
    Ok(total)
}

/// A function sampled on the mixed q-grid {−q^k : k ≥ 0} ∪ {z q^k : k ∈ ℤ},
/// with finitely many stored (hence nonzero) values.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub z: f64,
    /// Values at −q^k for k = 0, 1, … (index = k).
    pub unilateral: Vec<Complex64>,
    /// Values at z q^k keyed by k.
    pub bilateral: BTreeMap<i32, Complex64>,
}

/// q-integral of a grid function:
/// (1−q) Σ_{k≥0} f(−q^k) q^k + (1−q) z Σ_{k∈ℤ} f(z q^k) q^k.
pub fn q_integral(g: &GridFunction, q: QBase) -> Complex64 {
    let qq = q.q();
    let mut total = Complex64::new(0.0, 0.0);
    let mut w = 1.0;
    for v in &g.unilateral {
        total += v * w;
        w *= qq;
    }
    for (&k, v) in &g.bilateral {
        total += v * (g.z * qq.powi(k));
    }
    total * (1.0 - qq)
}

/// Adaptive q-integral of a function given as a closure on the grid.
pub fn q_integral_fn(
    f: &dyn Fn(f64) -> QResult<Complex64>,
    z: f64,
    q: QBase,
    tol: f64,
) -> QResult<SeriesResult> {
    let qq = q.q();
    let mut total = Complex64::new(0.0, 0.0);
    let mut w = 1.0;
    let mut small = 0usize;
    let mut terms = 0usize;
    for k in 0..500 {
        let term = f(-qq.powi(k))? * w;
        total += term;
        terms += 1;
        w *= qq;
        if term.norm() < tol * (1.0 + total.norm()) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    if small < 3 {
        return Err(QError::Divergence(
            "unilateral q-integral tail did not decay".into(),
        ));
    }
    let bil = bilateral_sum(&|k| Ok(f(z * qq.powi(k as i32))? * qq.powi(k as i32)), tol)?;
    total += bil.value * z;
    Ok(SeriesResult {
        value: total * (1.0 - qq),
        abs_error: bil.abs_error * z.abs() * (1.0 - qq),
        terms: terms + bil.terms,
        converged: true,
    })
}

/// Adaptive bilateral sum Σ_{k∈ℤ} terms(k): each direction is truncated once
/// three consecutive terms are negligible against the partial sum; growing
/// tails raise a divergence error.
pub fn bilateral_sum(
    terms: &dyn Fn(i64) -> QResult<Complex64>,
    tol: f64,
) -> QResult<SeriesResult> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    let mut max_term: f64 = 0.0;
    for direction in [1i64, -1i64] {
        let mut k = if direction > 0 { 0 } else { -1 };
        let mut small = 0usize;
        let mut prev_norm = f64::INFINITY;
        let mut grow = 0usize;
        let mut steps = 0usize;
        loop {
            let term = terms(k)?;
            total += term;
            count += 1;
            steps += 1;
            max_term = max_term.max(term.norm());
            let n = term.norm();
            if n < tol * (1.0 + total.norm()) {
                small += 1;
                // explore a minimum window so isolated nonzero terms beyond
                // a run of zeros are not missed
                if small >= 3 && steps >= 8 {
                    break;
                }
            } else {
                small = 0;
            }
            if n > prev_norm * (1.0 + 1e-12) && n > 1.0 {
                grow += 1;
                if grow > 40 {
                    return Err(QError::Divergence(format!(
                        "bilateral terms growing near k = {k}"
                    )));
                }
            } else {
                grow = 0;
            }
            prev_norm = n;
            k += direction;
            if k.unsigned_abs() > 600 {
                return Err(QError::Divergence(
                    "bilateral sum not converged after 600 terms per side".into(),
                ));
            }
        }
    }
    Ok(SeriesResult {
        value: total,
        abs_error: max_term * 1e-16 * count as f64,
        terms: count,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::little_qbessel;

    fn q05() -> QBase {
        QBase::new(0.5).unwrap()
    }

    fn standard() -> MeasureParams {
        MeasureParams::new_unchecked(q05(), 0.9, 0.3, 0.3, 2.0, -1.0)
    }

    fn nondegenerate() -> MeasureParams {
        MeasureParams::new_unchecked(q05(), 0.85, 0.35, 0.25, 2.2, -1.3)
    }

    #[test]
    fn weight_is_inversion_symmetric() {
        let p = standard();
        for &x in &[
            Complex64::new(0.9, 0.3),
            Complex64::from_polar(1.0, 1.1),
            Complex64::new(-0.4, 0.7),
        ] {
            let v1 = weight_delta(&p, x).unwrap().value;
            let v2 = weight_delta(&p, x.inv()).unwrap().value;
            assert!((v1 - v2).norm() < 1e-13 * (1.0 + v1.norm()));
        }
    }

    #[test]
    fn weight_real_nonnegative_on_circle() {
        let p = standard();
        for j in 0..24 {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 24.0;
            let v = weight_delta(&p, Complex64::from_polar(1.0, th))
                .unwrap()
                .value;
            assert!(v.im.abs() < 1e-12 * (1.0 + v.re.abs()));
            assert!(v.re >= -1e-12);
        }
    }

    #[test]
    fn weight_frozen_value() {
        let p = standard();
        let x = Complex64::from_polar(0.9, 0.3);
        let v = weight_delta(&p, x).unwrap().value;
        let want = Complex64::new(0.04744938356732413, 0.019635786252435852);
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn const_k_frozen_values() {
        assert!((const_k(&standard()).unwrap() - 24.78793455841068).abs() < 1e-10);
        assert!((const_k(&nondegenerate()).unwrap() - 27.41102477236087).abs() < 1e-10);
        let p190 = MeasureParams::new_unchecked(q05(), 0.6, 0.3, 0.5, 1.0, -1.0);
        assert!((const_k(&p190).unwrap() - 27.431790076290905).abs() < 1e-10);
    }

    #[test]
    fn const_k_continuous_in_t() {
        let mut p = standard();
        let k0 = const_k(&p).unwrap();
        p.t *= 1.0 + 1e-6;
        let k1 = const_k(&p).unwrap();
        assert!((k1 - k0).abs() < 1e-4 * k0);
    }

    #[test]
    fn residue_frozen_values_degenerate() {
        // (td)² = q^{-2} here, so the masses are half the merged residues
        let p = standard();
        let cases = [
            (-2, -8.0, 1.3437940889057323),
            (-1, -4.0, 0.47423085436799406),
            (0, -2.0, 0.15485379322541115),
        ];
        for &(_, s, res) in &cases {
            let m = residue_mass(&p, s).unwrap();
            assert!((m.residue - res).abs() < 1e-12 * res.abs(), "s = {s}");
            assert!((m.mass - res / 2.0).abs() < 1e-12 * res.abs());
            assert_eq!(m.order, 1);
        }
    }

    #[test]
    fn residue_frozen_values_generic() {
        let p = nondegenerate();
        let td = p.td();
        let cases = [
            (-1, 0.1216421058728803),
            (0, 0.042672050491134837),
            (1, 0.010771987277992884),
        ];
        for &(k, res) in &cases {
            let m = residue_mass(&p, td * 0.5f64.powi(k)).unwrap();
            assert!((m.residue - res).abs() < 1e-12 * res.abs(), "k = {k}");
            assert_eq!(m.mass, m.residue);
        }
    }

    #[test]
    fn residue_regular_point_has_zero_mass() {
        // td = -1 on this tuple: the point -1 is a full theta collision that
        // the squared numerator factor cancels entirely
        let p190 = MeasureParams::new_unchecked(q05(), 0.6, 0.3, 0.5, 1.0, -1.0);
        let m = residue_mass(&p190, -1.0).unwrap();
        assert_eq!(m.mass, 0.0);
        assert_eq!(m.order, 0);
        let m = residue_mass(&p190, -2.0).unwrap();
        assert!((m.residue - 1.8508917011612813).abs() < 1e-12 * m.residue.abs());
        assert!((m.mass - m.residue / 2.0).abs() < 1e-15 * m.residue.abs());
    }

    #[test]
    fn residue_off_support_is_error() {
        let p = standard();
        assert!(matches!(
            residue_mass(&p, -3.17),
            Err(QError::Genericity(_))
        ));
    }

    #[test]
    fn residue_matches_contour_oracle() {
        // Small-circle quadrature around the pole measures the merged residue.
        let p = standard();
        for &s in &[-2.0, -4.0] {
            let m = residue_mass(&p, s).unwrap();
            let r = 0.25;
            let n = 512;
            let mut tot = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                let dx = Complex64::from_polar(r, th);
                let x = Complex64::new(s, 0.0) + dx;
                tot += weight_delta(&p, x).unwrap().value / x * dx;
            }
            let oracle = (tot / n as f64).re;
            assert!(
                (oracle - m.residue).abs() < 1e-9 * m.residue.abs(),
                "s = {s}: {oracle} vs {}",
                m.residue
            );
        }
    }

    #[test]
    fn support_sets() {
        let p = nondegenerate();
        let s = discrete_support(&p, -10, 10).unwrap();
        // |td q^k| > 1 for k <= 1 on this tuple
        assert!(s.contains_key(&1));
        assert!(!s.contains_key(&2));
        assert!(s.contains_key(&-10));
        // all retained masses positive here
        for m in s.values() {
            assert!(m.mass > 0.0);
        }
        // a < 1: no support on the positive line
        assert!(support_plus(&p).unwrap().is_empty());
        let p15 = MeasureParams::new_unchecked(q05(), 1.5, 0.3, 0.3, 4.0, -1.0);
        assert_eq!(support_plus(&p15).unwrap().len(), 1);
    }

    #[test]
    fn integrate_nu_zero_function() {
        let p = nondegenerate();
        let v = integrate_nu(&p, &|_| Ok(Complex64::new(0.0, 0.0)), &Default::default()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integrate_nu_frozen_value() {
        let p = nondegenerate();
        let f = |x: Complex64| {
            let y = x + x.inv();
            Ok((y * y + 10.0).inv().powi(2))
        };
        let v = integrate_nu(&p, &f, &Default::default()).unwrap();
        assert!(v.im.abs() < 1e-12);
        assert!(
            (v.re - 0.01800643654327733).abs() < 1e-10,
            "got {}",
            v.re
        );
        assert!(v.re > 0.0);
    }

    #[test]
    fn contour_estimates_converge_geometrically() {
        let p = standard();
        let f = |_x: Complex64| Ok(Complex64::new(1.0, 0.0));
        let reference = contour_part(&p, &f, 4096).unwrap();
        let mut errors = Vec::new();
        for nodes in [64usize, 128, 256, 512] {
            let est = contour_part(&p, &f, nodes).unwrap();
            errors.push((est - reference).norm());
        }
        assert!(errors[0] > errors[1] && errors[1] > errors[2] && errors[2] > errors[3]);
    }

    #[test]
    fn q_integral_indicators() {
        let q = q05();
        let zero = GridFunction {
            z: 0.7,
            unilateral: vec![],
            bilateral: BTreeMap::new(),
        };
        assert_eq!(q_integral(&zero, q), Complex64::new(0.0, 0.0));
        let at_minus_one = GridFunction {
            z: 0.7,
            unilateral: vec![Complex64::new(1.0, 0.0)],
            bilateral: BTreeMap::new(),
        };
        assert_eq!(q_integral(&at_minus_one, q), Complex64::new(0.5, 0.0));
        let mut b = BTreeMap::new();
        b.insert(0, Complex64::new(1.0, 0.0));
        let at_z = GridFunction {
            z: 0.7,
            unilateral: vec![],
            bilateral: b,
        };
        assert!((q_integral(&at_z, q) - Complex64::new(0.35, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn q_integral_fn_matches_grid() {
        let q = q05();
        let f = |x: f64| Ok(Complex64::new((-x * x).exp(), 0.0));
        let v = q_integral_fn(&f, 0.7, q, 1e-14).unwrap();
        // same sum, explicitly truncated
        let mut total = 0.0;
        for k in 0..60 {
            let x: f64 = -0.5f64.powi(k);
            total += (-x * x).exp() * 0.5f64.powi(k);
        }
        for k in -60..60 {
            let x: f64 = 0.7 * 0.5f64.powi(k);
            total += 0.7 * (-x * x).exp() * 0.5f64.powi(k);
        }
        total *= 0.5;
        assert!((v.value.re - total).abs() < 1e-16 + 1e-12 * total.abs());
    }

    #[test]
    fn bilateral_sum_basics() {
        let zero = bilateral_sum(&|_| Ok(Complex64::new(0.0, 0.0)), 1e-14).unwrap();
        assert_eq!(zero.value, Complex64::new(0.0, 0.0));
        let single = bilateral_sum(
            &|k| {
                Ok(if k == 3 {
                    Complex64::new(2.5, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                })
            },
            1e-14,
        )
        .unwrap();
        assert_eq!(single.value, Complex64::new(2.5, 0.0));
        assert!(matches!(
            bilateral_sum(&|k| Ok(Complex64::new(2.0f64.powi(k as i32), 0.0)), 1e-14),
            Err(QError::Divergence(_))
        ));
    }

    #[test]
    fn bilateral_qbessel_diagonal() {
        // Σ_k a^k j_1(q^k)² = (q;q)_∞²/(a;q)_∞² for the self-dual kernel
        let q = q05();
        let a = 0.3;
        let f = |k: i64| {
            let j = little_qbessel(q, a, c(1.0), c(0.5f64.powi(k as i32)))?;
            // deep on the geometric line the series is pure cancellation
            // noise; the error estimate flags that and the true term is
            // far below any tolerance anyway
            if j.abs_error > j.value.norm() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(j.value * j.value * a.powi(k as i32))
        };
        let v = bilateral_sum(&f, 1e-15).unwrap().value;
        let want = (qpoch(c(0.5), q, None).value.re / qpoch(c(a), q, None).value.re).powi(2);
        assert!((v.re - want).abs() < 1e-9 * want, "{} vs {want}", v.re);
    }
}
