//! The six function families of the transform scheme and their polynomial
//! and coefficient reductions.
//!
//! Three levels, each with a "geometric" and a "spectral" variable:
//! - Askey-Wilson functions (four parameters a,b,c,d plus a scaling t),
//! - big q-Jacobi functions (three parameters a,b,c) and big q-Bessel
//!   functions (one parameter a),
//! - little q-Jacobi functions (two parameters a,b) and little q-Bessel
//!   functions (one parameter a).
//!
//! Each validated parameter struct has a `_raw` evaluation companion that
//! skips parameter admissibility checks; the raw entry points are used by the
//! limit-transition scans, which deliberately evaluate at scaled parameter
//! values outside the admissible region.

use crate::hyperseries::{rphis, w87, PhiSpec, DEFAULT_MAX_TERMS};
use crate::qcore::{div_series, mul_series, qpoch, QBase, QError, QResult, SeriesResult};
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A point of the spectral variable; nonzero, and identified with its
/// inverse wherever the evaluated family is invariant under inversion.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct SpectralPoint {
    gamma: Complex64,
}

impl SpectralPoint {
    pub fn new(gamma: Complex64) -> QResult<Self> {
        if gamma.norm() == 0.0 || !gamma.is_finite() {
            return Err(QError::InvalidParams(
                "spectral point must be finite and nonzero".into(),
            ));
        }
        Ok(SpectralPoint { gamma })
    }

    pub fn real(gamma: f64) -> QResult<Self> {
        SpectralPoint::new(Complex64::new(gamma, 0.0))
    }

    #[inline]
    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// The inverted point 1/γ.
    pub fn inv(&self) -> Self {
        SpectralPoint {
            gamma: self.gamma.inv(),
        }
    }
}

impl TryFrom<Complex64> for SpectralPoint {
    type Error = QError;
    fn try_from(v: Complex64) -> QResult<Self> {
        SpectralPoint::new(v)
    }
}

impl From<SpectralPoint> for Complex64 {
    fn from(p: SpectralPoint) -> Complex64 {
        p.gamma
    }
}

/// Parameters (a, b, c, d; t) of the Askey-Wilson level.
///
/// Admissibility: 0 < b ≤ a, 0 < c ≤ a, a < d/q, bd ≥ q, cd ≥ q,
/// ab < 1, ac < 1, and t < 0.  In addition the dual parameter d̃ = ad/ã
/// must exceed q, so that for every nonzero spectral point at least one of
/// the two series representations (at γ or at 1/γ) converges.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "AWParamsRaw", into = "AWParamsRaw")]
pub struct AWParams {
    q: QBase,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    t: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct AWParamsRaw {
    q: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    t: f64,
}

impl TryFrom<AWParamsRaw> for AWParams {
    type Error = QError;
    fn try_from(r: AWParamsRaw) -> QResult<Self> {
        AWParams::new(QBase::new(r.q)?, r.a, r.b, r.c, r.d, r.t)
    }
}

impl From<AWParams> for AWParamsRaw {
    fn from(p: AWParams) -> AWParamsRaw {
        AWParamsRaw {
            q: p.q.q(),
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
            t: p.t,
        }
    }
}

impl AWParams {
    pub fn new(q: QBase, a: f64, b: f64, c: f64, d: f64, t: f64) -> QResult<Self> {
        let qq = q.q();
        let check = |cond: bool, msg: &str| -> QResult<()> {
            if cond {
                Ok(())
            } else {
                Err(QError::InvalidParams(msg.to_string()))
            }
        };
        check(b > 0.0 && b <= a, "require 0 < b <= a")?;
        check(c > 0.0 && c <= a, "require 0 < c <= a")?;
        check(a < d / qq, "require a < d/q")?;
        check(b * d >= qq && c * d >= qq, "require bd >= q and cd >= q")?;
        check(a * b < 1.0 && a * c < 1.0, "require ab < 1 and ac < 1")?;
        check(t < 0.0, "require t < 0")?;
        let p = AWParams { q, a, b, c, d, t };
        let dual = p.dual();
        check(
            dual.dt() > qq,
            "require a*d/sqrt(abcd/q) > q so the two series regions cover all spectral points",
        )?;
        Ok(p)
    }

    pub fn q(&self) -> QBase {
        self.q
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn t(&self) -> f64 {
        self.t
    }

    /// The dual parameter tuple (ã, b̃, c̃, d̃; t̃).
    pub fn dual(&self) -> DualAWParams {
        let at = (self.a * self.b * self.c * self.d / self.q.q()).sqrt();
        DualAWParams {
            q: self.q,
            at,
            bt: self.a * self.b / at,
            ct: self.a * self.c / at,
            dt: self.a * self.d / at,
            tt: 1.0 / (self.q.q() * self.a * self.d * self.t),
        }
    }
}

/// Dual Askey-Wilson parameters ã = sqrt(abcd/q), b̃ = ab/ã, c̃ = ac/ã,
/// d̃ = ad/ã, t̃ = 1/(q a d t).  Duality exchanges the geometric and
/// spectral variables, so the dual tuple is itself an admissible parameter
/// set whenever the primal one is.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DualAWParams {
    q: QBase,
    at: f64,
    bt: f64,
    ct: f64,
    dt: f64,
    tt: f64,
}

impl DualAWParams {
    pub fn q(&self) -> QBase {
        self.q
    }
    pub fn at(&self) -> f64 {
        self.at
    }
    pub fn bt(&self) -> f64 {
        self.bt
    }
    pub fn ct(&self) -> f64 {
        self.ct
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn tt(&self) -> f64 {
        self.tt
    }

    /// Reinterpret the dual tuple as a validated primal parameter set.
    pub fn as_params(&self) -> QResult<AWParams> {
        AWParams::new(self.q, self.at, self.bt, self.ct, self.dt, self.tt)
    }
}

/// Parameters (a, b, c; z) of the big q-Jacobi level.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "BigParamsRaw", into = "BigParamsRaw")]
pub struct BigParams {
    q: QBase,
    a: f64,
    b: f64,
    c: f64,
    z: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct BigParamsRaw {
    q: f64,
    a: f64,
    b: f64,
    c: f64,
    z: f64,
}

impl TryFrom<BigParamsRaw> for BigParams {
    type Error = QError;
    fn try_from(r: BigParamsRaw) -> QResult<Self> {
        BigParams::new(QBase::new(r.q)?, r.a, r.b, r.c, r.z)
    }
}

impl From<BigParams> for BigParamsRaw {
    fn from(p: BigParams) -> BigParamsRaw {
        BigParamsRaw {
            q: p.q.q(),
            a: p.a,
            b: p.b,
            c: p.c,
            z: p.z,
        }
    }
}

impl BigParams {
    pub fn new(q: QBase, a: f64, b: f64, c: f64, z: f64) -> QResult<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(QError::InvalidParams("require a, b, c > 0".into()));
        }
        if !(a >= b && a >= c) {
            return Err(QError::InvalidParams("require a >= b and a >= c".into()));
        }
        if !(a * b < 1.0 && a * c < 1.0 && b * c < 1.0) {
            return Err(QError::InvalidParams(
                "require ab < 1, ac < 1 and bc < 1".into(),
            ));
        }
        if !(z > 0.0) {
            return Err(QError::InvalidParams("require z > 0".into()));
        }
        Ok(BigParams { q, a, b, c, z })
    }

    pub fn q(&self) -> QBase {
        self.q
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn z(&self) -> f64 {
        self.z
    }
}

/// Parameters (a, b; y) of the little q-Jacobi level.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "LittleParamsRaw", into = "LittleParamsRaw")]
pub struct LittleParams {
    q: QBase,
    a: f64,
    b: f64,
    y: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct LittleParamsRaw {
    q: f64,
    a: f64,
    b: f64,
    y: f64,
}

impl TryFrom<LittleParamsRaw> for LittleParams {
    type Error = QError;
    fn try_from(r: LittleParamsRaw) -> QResult<Self> {
        LittleParams::new(QBase::new(r.q)?, r.a, r.b, r.y)
    }
}

impl From<LittleParams> for LittleParamsRaw {
    fn from(p: LittleParams) -> LittleParamsRaw {
        LittleParamsRaw {
            q: p.q.q(),
            a: p.a,
            b: p.b,
            y: p.y,
        }
    }
}

impl LittleParams {
    pub fn new(q: QBase, a: f64, b: f64, y: f64) -> QResult<Self> {
        if !(a > b && b > 0.0) {
            return Err(QError::InvalidParams("require a > b > 0".into()));
        }
        if !(a * b < 1.0) {
            return Err(QError::InvalidParams("require ab < 1".into()));
        }
        if !(y > 0.0) {
            return Err(QError::InvalidParams("require y > 0".into()));
        }
        Ok(LittleParams { q, a, b, y })
    }

    pub fn q(&self) -> QBase {
        self.q
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Askey-Wilson function φ_γ(x; a; b, c; d | q): a q-Pochhammer prefactor
/// times a very-well-poised ₈W₇ sum.  When the ₈W₇ argument q/(d̃γ) leaves
/// the unit disc the evaluation switches to the inverted spectral point 1/γ,
/// under which the function is invariant.
pub fn aw_function(p: &AWParams, gamma: SpectralPoint, x: Complex64) -> QResult<SeriesResult> {
    aw_function_raw(p.q, p.a, p.b, p.c, p.d, gamma.gamma(), x)
}

/// Unvalidated Askey-Wilson evaluation used by limit scans and internal
/// symmetry checks; callers are responsible for parameter sanity.
pub fn aw_function_raw(
    q: QBase,
    a: f64,
    b: f64,
    c64: f64,
    d: f64,
    gamma: Complex64,
    x: Complex64,
) -> QResult<SeriesResult> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("geometric point x must be nonzero".into()));
    }
    if gamma.norm() == 0.0 {
        return Err(QError::Domain("spectral point must be nonzero".into()));
    }
    let qq = q.q();
    let at = (a * b * c64 * d / qq).sqrt();
    let bt = a * b / at;
    let ct = a * c64 / at;
    let dt = a * d / at;

    // The function is invariant under γ → 1/γ; try each representative whose
    // series argument lies in the unit disc, falling back to the other one
    // when a removable pole of the very-well-poised sum is hit.
    let mut last = QError::Continuation(format!(
        "spectral point {gamma} lies outside both series regions (|q/(d~ g)| >= 1 either way)"
    ));
    for g in [gamma, gamma.inv()] {
        if (qq / (dt * g.norm())) >= 1.0 {
            continue;
        }
        match aw_series_at(q, a, d, at, bt, ct, dt, g, x) {
            Ok(r) => return Ok(r),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// One spectral representative of the Askey-Wilson sum; fails with a pole
/// error when the series representation degenerates at the requested point.
#[allow(clippy::too_many_arguments)]
fn aw_series_at(
    q: QBase,
    a: f64,
    d: f64,
    at: f64,
    bt: f64,
    ct: f64,
    dt: f64,
    g: Complex64,
    x: Complex64,
) -> QResult<SeriesResult> {
    let qq = q.q();
    let num = mul_series(
        qpoch(c(qq * a / dt) * x * g, q, None),
        qpoch(c(qq * a / dt) * g / x, q, None),
    );
    let mut den = qpoch(c(at * bt * ct) * g, q, None);
    for f in [
        c(qq / dt) * g,
        c(qq * at / dt),
        c(qq / d) * x,
        c(qq / d) / x,
    ] {
        den = mul_series(den, qpoch(f, q, None));
    }
    if den.value.norm() == 0.0 {
        return Err(QError::Pole(
            "prefactor denominator vanishes at the requested point".into(),
        ));
    }
    let pref = div_series(num, den)?;
    let w = w87(
        c(at * bt * ct / qq) * g,
        [c(a) * x, c(a) / x, c(at) * g, c(bt) * g, c(ct) * g],
        q,
        c(qq / dt) / g,
        DEFAULT_MAX_TERMS,
        1e-15,
    )?;
    Ok(mul_series(pref, w))
}

/// Askey-Wilson q-Bessel function J_γ(x; a; b | q) = ₂φ₁(ax, a/x; ab; q, −qγ/a).
pub fn aw_qbessel(
    q: QBase,
    a: f64,
    b: f64,
    gamma: Complex64,
    x: Complex64,
) -> QResult<SeriesResult> {
    if !(a > b && b > 0.0 && a * b < 1.0) {
        return Err(QError::InvalidParams("require a > b > 0 and ab < 1".into()));
    }
    if x.norm() == 0.0 {
        return Err(QError::Domain("geometric point x must be nonzero".into()));
    }
    let z = -c(q.q() / a) * gamma;
    let terminating = is_neg_q_power(c(a) * x, q) || is_neg_q_power(c(a) / x, q);
    if z.norm() >= 1.0 && !terminating {
        return Err(QError::Divergence(format!(
            "series argument |q gamma/a| = {:.3} >= 1 and no terminating parameter",
            z.norm()
        )));
    }
    rphis(&PhiSpec::new(
        vec![c(a) * x, c(a) / x],
        vec![c(a * b)],
        q,
        z,
    ))
}

/// True when v = q^{-n} for some n >= 0, i.e. the series parameter
/// terminates the sum.
fn is_neg_q_power(v: Complex64, q: QBase) -> bool {
    if v.im.abs() > 1e-13 * (1.0 + v.norm()) || v.re < 1.0 - 1e-13 {
        return false;
    }
    let mut w = v.re;
    for _ in 0..2000 {
        if (w - 1.0).abs() < 1e-12 * (1.0 + w) {
            return true;
        }
        if w < 1.0 {
            return false;
        }
        w *= q.q();
    }
    false
}

/// Big q-Jacobi function φ_γ(x; a; b, c; q) = ₃φ₂(aγ, a/γ, −1/x; ab, ac; q, −bcx).
/// The direct series needs |bcx| < 1; outside that disc the value is reached
/// by recurrence along the q-line of x (see the difference-operator module).
pub fn big_jacobi(p: &BigParams, gamma: SpectralPoint, x: Complex64) -> QResult<SeriesResult> {
    big_jacobi_raw(p.q, p.a, p.b, p.c, gamma.gamma(), x)
}

/// Unvalidated big q-Jacobi series evaluation.
pub fn big_jacobi_raw(
    q: QBase,
    a: f64,
    b: f64,
    c64: f64,
    gamma: Complex64,
    x: Complex64,
) -> QResult<SeriesResult> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("geometric point x must be nonzero".into()));
    }
    if gamma.norm() == 0.0 {
        return Err(QError::Domain("spectral point must be nonzero".into()));
    }
    let z = -c(b * c64) * x;
    let terminating = is_neg_q_power(c(a) * gamma, q)
        || is_neg_q_power(c(a) / gamma, q)
        || is_neg_q_power(-x.inv(), q);
    if z.norm() >= 1.0 && !terminating {
        return Err(QError::Continuation(format!(
            "series argument |bcx| = {:.3} >= 1; evaluate by recurrence along the q-line",
            z.norm()
        )));
    }
    rphis(&PhiSpec::new(
        vec![c(a) * gamma, c(a) / gamma, -x.inv()],
        vec![c(a * b), c(a * c64)],
        q,
        z,
    ))
}

/// Big q-Bessel function J_γ(x; a; q) = ₁φ₁(−1/x; a; q, aγx); entire in γx.
pub fn big_qbessel(q: QBase, a: f64, gamma: Complex64, x: Complex64) -> QResult<SeriesResult> {
    if !(0.0 < a && a < 1.0) {
        return Err(QError::InvalidParams("require 0 < a < 1".into()));
    }
    if x.norm() == 0.0 {
        return Err(QError::Domain("geometric point x must be nonzero".into()));
    }
    rphis(&PhiSpec::new(
        vec![-x.inv()],
        vec![c(a)],
        q,
        c(a) * gamma * x,
    ))
}

/// Little q-Jacobi function φ_γ(x; a, b; q) = ₂φ₁(aγ, a/γ; ab; q, −bx).
/// The direct series needs |bx| < 1; outside that disc use the q-line
/// recurrence.
pub fn little_jacobi(p: &LittleParams, gamma: SpectralPoint, x: Complex64) -> QResult<SeriesResult> {
    little_jacobi_raw(p.q, p.a, p.b, gamma.gamma(), x)
}

/// Unvalidated little q-Jacobi series evaluation.
pub fn little_jacobi_raw(
    q: QBase,
    a: f64,
    b: f64,
    gamma: Complex64,
    x: Complex64,
) -> QResult<SeriesResult> {
    if gamma.norm() == 0.0 {
        return Err(QError::Domain("spectral point must be nonzero".into()));
    }
    let z = -c(b) * x;
    let terminating = is_neg_q_power(c(a) * gamma, q) || is_neg_q_power(c(a) / gamma, q);
    if z.norm() >= 1.0 && !terminating {
        return Err(QError::Continuation(format!(
            "series argument |bx| = {:.3} >= 1; evaluate by recurrence along the q-line",
            z.norm()
        )));
    }
    rphis(&PhiSpec::new(
        vec![c(a) * gamma, c(a) / gamma],
        vec![c(a * b)],
        q,
        z,
    ))
}

/// Little q-Bessel function j_γ(x; a; q) = ₁φ₁(0; a; q, qγx); entire, and
/// exactly symmetric under exchanging γ and x.
pub fn little_qbessel(q: QBase, a: f64, gamma: Complex64, x: Complex64) -> QResult<SeriesResult> {
    if !(0.0 < a && a < 1.0) {
        return Err(QError::InvalidParams("require 0 < a < 1".into()));
    }
    rphis(&PhiSpec::new(
        vec![c(0.0)],
        vec![c(a)],
        q,
        c(q.q()) * gamma * x,
    ))
}

/// Terminating polynomial reduction of the big q-Jacobi function at the
/// geometric points x = −q^k: a degree-k polynomial in (γ + 1/γ)/2,
/// evaluated as a (k+1)-term ₃φ₂ sum in the inverted base 1/q.
pub fn cdqh_poly(p: &BigParams, gamma: SpectralPoint, k: u32) -> QResult<SeriesResult> {
    let g = gamma.gamma();
    let (a, b, cc) = (p.a, p.b, p.c);
    let qinv = 1.0 / p.q.q();
    // numerator parameter q^k in base 1/q terminates the sum at k+1 terms
    let spec = PhiSpec::new_inverse_base(
        vec![c(p.q.q().powi(k as i32)), g / a, (c(a) * g).inv()],
        vec![c(1.0 / (a * b)), c(1.0 / (a * cc))],
        p.q,
        c(qinv),
    );
    let r = rphis(&spec)?;
    debug_assert_eq!(r.terms, k as usize + 1);
    Ok(r)
}

/// q-Bessel coefficient: the big q-Bessel function pinned to the spectral
/// hyperbola x = q^{p+1}/(aγ), as a ₁φ₁ in the geometric index p.
pub fn qbessel_coeff(q: QBase, a: f64, gamma: Complex64, p_idx: i32) -> QResult<SeriesResult> {
    if gamma.norm() == 0.0 {
        return Err(QError::Domain("spectral point must be nonzero".into()));
    }
    if !(0.0 < a && a < 1.0) {
        return Err(QError::InvalidParams("require 0 < a < 1".into()));
    }
    let qq = q.q();
    rphis(&PhiSpec::new(
        vec![-c(a * qq.powi(-1 - p_idx)) * gamma],
        vec![c(a)],
        q,
        c(qq.powi(p_idx + 1)),
    ))
}

/// Alternative ₁φ₁ representation of [`qbessel_coeff`], valid for p ≥ 0:
/// (q^{p+1};q)_∞/(a;q)_∞ · ₁φ₁(−γ; q^{p+1}; q, a).  The two representations
/// agree wherever both are defined.
pub fn qbessel_coeff_alt(q: QBase, a: f64, gamma: Complex64, p_idx: u32) -> QResult<SeriesResult> {
    if gamma.norm() == 0.0 {
        return Err(QError::Domain("spectral point must be nonzero".into()));
    }
    if !(0.0 < a && a < 1.0) {
        return Err(QError::InvalidParams("require 0 < a < 1".into()));
    }
    let qq = q.q();
    let qp1 = qq.powi(p_idx as i32 + 1);
    let pref = div_series(qpoch(c(qp1), q, None), qpoch(c(a), q, None))?;
    let s = rphis(&PhiSpec::new(vec![-gamma], vec![c(qp1)], q, c(a)))?;
    Ok(mul_series(pref, s))
}
