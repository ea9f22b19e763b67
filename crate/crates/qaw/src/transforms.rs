//! The three integral-transform pairs of the scheme and their orthogonality
//! checkers.
//!
//! Each level couples a kernel family with a contour-plus-masses measure:
//! the top level integrates against the full measure on both sides, the big
//! level pairs a q-integral with a spectral measure, and the little level
//! pairs a weighted bilateral sum with a spectral measure.  Kernels evaluated
//! deep on the discrete lattices are minimal solutions of the associated
//! three-term relations, so the direct series (which loses all digits there)
//! is replaced by normalized recurrence values anchored at trusted indices.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::difference_ops::{continue_on_qline, miller_line, Direction, OperatorSpec};
use crate::families::{
    aw_function_raw, aw_qbessel, big_jacobi_raw, big_qbessel, little_jacobi_raw, little_qbessel,
    AWParams, BigParams, LittleParams,
};
use crate::measures::{
    bilateral_sum, const_k, integrate_nu, integrate_nu_indexed, residue_mass, GridFunction,
    MeasureParams, QuadratureConfig,
};
use crate::qcore::{div_series, mul_series, qpoch, qpoch_sym, theta, QBase, QError, QResult,
    SeriesResult};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Relative error below which a direct series evaluation is accepted without
/// switching to a recurrence-based evaluation.
const KERNEL_TRUST: f64 = 1e-8;

/// Relative error demanded of the two direct anchor values that normalize a
/// recurrence-based kernel evaluation.
const ANCHOR_TRUST: f64 = 1e-10;

/// How far down a spectral ray the anchor search walks before giving up.
const ANCHOR_SEARCH: i32 = 60;

/// The transform level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Level {
    AW,
    Big,
    Little,
}

/// The constants tying a transform pair together: the scalar prefactor of
/// the inversion formula and the spectral-side measure.
#[derive(Debug, Clone)]
pub struct TransformConstants {
    pub level: Level,
    pub c: f64,
    pub dual_measure: MeasureParams,
}

impl TransformConstants {
    /// Top level: no scalar prefactor; the spectral measure is the same
    /// four-parameter family at the dual parameter tuple.
    pub fn aw(p: &AWParams) -> Self {
        let d = p.dual();
        TransformConstants {
            level: Level::AW,
            c: 1.0,
            dual_measure: MeasureParams::new_unchecked(
                d.q(),
                d.at(),
                d.bt(),
                d.ct(),
                d.dt(),
                d.tt(),
            ),
        }
    }

    /// Big level: spectral measure at (a; b, c; q/abc) with t = −1/z, and
    /// C = θ(−abz)θ(−acz)θ(−bcz)(ab, ac;q)_∞² / ((1−q) z θ(−qz) K).
    pub fn big(p: &BigParams) -> QResult<Self> {
        let q = p.q();
        let (a, b, cc, z) = (p.a(), p.b(), p.c(), p.z());
        let abc = a * b * cc;
        let dual = MeasureParams::new_unchecked(q, a, b, cc, q.q() / abc, -1.0 / z);
        let k = const_k(&dual)?;
        let num = theta(c(-a * b * z), q)?.value.re
            * theta(c(-a * cc * z), q)?.value.re
            * theta(c(-b * cc * z), q)?.value.re
            * (qpoch(c(a * b), q, None).value.re * qpoch(c(a * cc), q, None).value.re).powi(2);
        let den = (1.0 - q.q()) * z * theta(c(-q.q() * z), q)?.value.re * k;
        if den == 0.0 {
            return Err(QError::Pole("inversion prefactor denominator vanishes".into()));
        }
        Ok(TransformConstants {
            level: Level::Big,
            c: num / den,
            dual_measure: dual,
        })
    }

    /// Little level: spectral measure at (a; b, aby; q/aby) with t = −1, and
    /// C = (ab;q)_∞² θ(−by)² / K.
    pub fn little(p: &LittleParams) -> QResult<Self> {
        let q = p.q();
        let (a, b, y) = (p.a(), p.b(), p.y());
        let aby = a * b * y;
        let dual = MeasureParams::new_unchecked(q, a, b, aby, q.q() / aby, -1.0);
        let k = const_k(&dual)?;
        let num =
            qpoch(c(a * b), q, None).value.re.powi(2) * theta(c(-b * y), q)?.value.re.powi(2);
        Ok(TransformConstants {
            level: Level::Little,
            c: num / k,
            dual_measure: dual,
        })
    }
}

/// Value at the ray origin γ of an eigenfunction of `op` whose direct series
/// is only trustworthy deeper along the ray γ q^j.  The eigenfunction is the
/// minimal solution toward large |γ|, so the value is recovered by a
/// normalized recurrence anchored at the first pair of trusted indices.
fn miller_ray(
    op: &OperatorSpec,
    spectral: Complex64,
    gamma: Complex64,
    direct: &dyn Fn(i32) -> QResult<SeriesResult>,
) -> QResult<Complex64> {
    let mut j_ref = None;
    for j in 1..=ANCHOR_SEARCH {
        let ok = |r: &QResult<SeriesResult>| {
            matches!(r, Ok(v) if v.rel_error() <= ANCHOR_TRUST)
        };
        if ok(&direct(j)) && ok(&direct(j + 1)) {
            j_ref = Some(j);
            break;
        }
    }
    let j_ref = j_ref.ok_or_else(|| {
        QError::Continuation("no trusted anchor pair found along the spectral ray".into())
    })?;
    let line = miller_line(op, spectral, gamma, 0, j_ref + 1, j_ref, |j| {
        direct(j).map(|r| r.value)
    })?;
    Ok(line[&0])
}

/// Top-level kernel φ_γ(x), robust on the real spectral lattice: the direct
/// series (with its γ → 1/γ fallback) is used where its error estimate is
/// small, and a normalized recurrence along the ray γ q^j otherwise.
pub fn aw_kernel(p: &AWParams, gamma: Complex64, x: Complex64) -> QResult<Complex64> {
    let direct = aw_function_raw(p.q(), p.a(), p.b(), p.c(), p.d(), gamma, x);
    match direct {
        Ok(r) if r.rel_error() <= KERNEL_TRUST => return Ok(r.value),
        Ok(r) if gamma.im != 0.0 => return Ok(r.value),
        Err(e) if gamma.im != 0.0 => return Err(e),
        _ => {}
    }
    let d = p.dual();
    let op = OperatorSpec::AW {
        q: p.q(),
        a: d.at(),
        b: d.bt(),
        c: d.ct(),
        d: d.dt(),
    };
    miller_ray(&op, x, gamma, &|j| {
        aw_function_raw(
            p.q(),
            p.a(),
            p.b(),
            p.c(),
            p.d(),
            gamma * c(p.q().q().powi(j)),
            x,
        )
    })
}

/// Big-level kernel φ_γ(x), robust both beyond the geometric series disc
/// (recurrence along the q-line of x) and deep on the real spectral lattice
/// (normalized recurrence along the ray of γ).
pub fn big_kernel(p: &BigParams, gamma: Complex64, x: f64) -> QResult<Complex64> {
    let geo = |g: Complex64| big_kernel_geometric(p, g, x);
    match geo(gamma) {
        Ok(r) if r.rel_error() <= KERNEL_TRUST => return Ok(r.value),
        Ok(r) if gamma.im != 0.0 => return Ok(r.value),
        Err(e) if gamma.im != 0.0 => return Err(e),
        _ => {}
    }
    let op = OperatorSpec::DualBigJacobi {
        q: p.q(),
        a: p.a(),
        b: p.b(),
        c: p.c(),
    };
    miller_ray(&op, c(x), gamma, &|j| geo(gamma * c(p.q().q().powi(j))))
}

/// Direct big-level series, extended past |bcx| ≥ 1 by the three-term
/// relation along the q-line of x.
fn big_kernel_geometric(p: &BigParams, gamma: Complex64, x: f64) -> QResult<SeriesResult> {
    let q = p.q();
    let (a, b, cc) = (p.a(), p.b(), p.c());
    let disc = b * cc * x.abs();
    if disc < 0.999 {
        return big_jacobi_raw(q, a, b, cc, gamma, c(x));
    }
    let qq = q.q();
    let steps = ((0.5 / disc).ln() / qq.ln()).ceil() as usize;
    let x0 = x * qq.powi(steps as i32);
    let f0 = big_jacobi_raw(q, a, b, cc, gamma, c(x0))?;
    let f1 = big_jacobi_raw(q, a, b, cc, gamma, c(x0 * qq))?;
    let op = OperatorSpec::BigJacobi { q, a, b, c: cc };
    let vals = continue_on_qline(&op, gamma, c(x0), (f0.value, f1.value), Direction::Up, steps)?;
    let err = (f0.abs_error + f1.abs_error) * 10.0_f64.powi(steps as i32 / 4 + 1);
    Ok(SeriesResult {
        value: vals[steps - 1],
        abs_error: err,
        terms: f0.terms + f1.terms + steps,
        converged: true,
    })
}

/// Little-level kernel φ_γ(y q^k), robust past the geometric disc and deep
/// on the real spectral lattice.  As a function of γ the kernel is an
/// eigenfunction of the two-parameter reflection-symmetric operator with
/// eigenvalue a·b·y·q^{k−1}, which drives the recurrence fallback.
pub fn little_kernel(p: &LittleParams, gamma: Complex64, k: i32) -> QResult<Complex64> {
    let geo = |g: Complex64| little_kernel_geometric(p, g, k);
    match geo(gamma) {
        Ok(r) if r.rel_error() <= KERNEL_TRUST => return Ok(r.value),
        Ok(r) if gamma.im != 0.0 => return Ok(r.value),
        Err(e) if gamma.im != 0.0 => return Err(e),
        _ => {}
    }
    let op = OperatorSpec::AWBessel {
        q: p.q(),
        a: p.a(),
        b: p.b(),
    };
    let lambda_point = c(p.a() * p.b() * p.y() * p.q().q().powi(k - 1));
    miller_ray(&op, lambda_point, gamma, &|j| {
        geo(gamma * c(p.q().q().powi(j)))
    })
}

/// Direct little-level series, extended past |b y q^k| ≥ 1 by the
/// three-term relation along the q-line of the geometric variable.
fn little_kernel_geometric(p: &LittleParams, gamma: Complex64, k: i32) -> QResult<SeriesResult> {
    let q = p.q();
    let (a, b, y) = (p.a(), p.b(), p.y());
    let qq = q.q();
    let x = y * qq.powi(k);
    if (b * x).abs() < 0.999 {
        return little_jacobi_raw(q, a, b, gamma, c(x));
    }
    let steps = ((0.5 / (b * x).abs()).ln() / qq.ln()).ceil() as usize;
    let x0 = x * qq.powi(steps as i32);
    let f0 = little_jacobi_raw(q, a, b, gamma, c(x0))?;
    let f1 = little_jacobi_raw(q, a, b, gamma, c(x0 * qq))?;
    let op = OperatorSpec::LittleJacobi { q, a, b };
    let vals = continue_on_qline(&op, gamma, c(x0), (f0.value, f1.value), Direction::Up, steps)?;
    let err = (f0.abs_error + f1.abs_error) * 10.0_f64.powi(steps as i32 / 4 + 1);
    Ok(SeriesResult {
        value: vals[steps - 1],
        abs_error: err,
        terms: f0.terms + f1.terms + steps,
        converged: true,
    })
}

/// Weight attached to index k in the little-level forward sum:
/// a^{2k} (−q^{1−k}/(ay);q)_∞ / (−q^{1−k}/(by);q)_∞.
pub fn little_weight(p: &LittleParams, k: i32) -> QResult<f64> {
    let q = p.q();
    let qq = q.q();
    let num = qpoch(c(-qq.powi(1 - k) / (p.a() * p.y())), q, None);
    let den = qpoch(c(-qq.powi(1 - k) / (p.b() * p.y())), q, None);
    Ok(p.a().powi(2 * k) * div_series(num, den)?.value.re)
}

/// Weight of the big-level forward q-integral:
/// (−qx, −bcx;q)_∞ / (−abx, −acx;q)_∞.
pub fn big_weight(p: &BigParams, x: f64) -> QResult<f64> {
    let q = p.q();
    let num = mul_series(
        qpoch(c(-q.q() * x), q, None),
        qpoch(c(-p.b() * p.c() * x), q, None),
    );
    let den = mul_series(
        qpoch(c(-p.a() * p.b() * x), q, None),
        qpoch(c(-p.a() * p.c() * x), q, None),
    );
    Ok(div_series(num, den)?.value.re)
}

/// Forward top-level transform of a function supported on finitely many
/// points of the discrete support, keyed by lattice index k (point t d q^k):
/// û(γ) = K Σ_k u_k · mass_k · φ_γ(t d q^k).
pub fn aw_forward(
    p: &AWParams,
    u: &BTreeMap<i32, Complex64>,
    gamma: Complex64,
) -> QResult<Complex64> {
    let pm = MeasureParams::from_aw(p);
    let k_const = const_k(&pm)?;
    let qq = p.q().q();
    let td = p.t() * p.d();
    let mut total = Complex64::new(0.0, 0.0);
    for (&k, &uk) in u {
        let s = td * qq.powi(k);
        let m = residue_mass(&pm, s)?;
        if m.order == 0 {
            return Err(QError::InvalidParams(format!(
                "support index {k} carries no discrete mass"
            )));
        }
        total += uk * c(k_const * m.mass) * aw_kernel(p, gamma, c(s))?;
    }
    Ok(total)
}

/// Inverse top-level transform at the geometric point x: the spectral
/// integral of û(γ)·φ_γ(x) against the dual-parameter measure.  This is the
/// forward transform at the dual tuple, which is the self-duality of the
/// pair.
pub fn aw_inverse(
    p: &AWParams,
    u_hat: &dyn Fn(Complex64) -> QResult<Complex64>,
    x: Complex64,
    cfg: &QuadratureConfig,
) -> QResult<Complex64> {
    let tc = TransformConstants::aw(p);
    integrate_nu(
        &tc.dual_measure,
        &|gamma| Ok(u_hat(gamma)? * aw_kernel(p, gamma, x)?),
        cfg,
    )
}

/// Norms of a finitely supported u and of its forward transform:
/// (∫ |û|² dν̃, K Σ_k |u_k|² mass_k).  Equality is the Parseval identity.
pub fn aw_parseval(
    p: &AWParams,
    u: &BTreeMap<i32, Complex64>,
    cfg: &QuadratureConfig,
) -> QResult<(f64, f64)> {
    let tc = TransformConstants::aw(p);
    let lhs = integrate_nu(
        &tc.dual_measure,
        &|gamma| {
            let v = aw_forward(p, u, gamma)?;
            Ok(c(v.norm_sqr()))
        },
        cfg,
    )?;
    let pm = MeasureParams::from_aw(p);
    let k_const = const_k(&pm)?;
    let qq = p.q().q();
    let td = p.t() * p.d();
    let mut rhs = 0.0;
    for (&k, &uk) in u {
        let m = residue_mass(&pm, td * qq.powi(k))?;
        rhs += uk.norm_sqr() * k_const * m.mass;
    }
    Ok((lhs.re, rhs))
}

/// Forward big-level transform of a grid function:
/// û(γ) = q-integral of u(x)·φ_γ(x)·(weight).
pub fn big_forward(p: &BigParams, u: &GridFunction, gamma: Complex64) -> QResult<Complex64> {
    let q = p.q();
    let qq = q.q();
    let mut total = Complex64::new(0.0, 0.0);
    for (k, v) in u.unilateral.iter().enumerate() {
        if v.norm() == 0.0 {
            continue;
        }
        let x = -qq.powi(k as i32);
        total += v * c(big_weight(p, x)? * qq.powi(k as i32)) * big_kernel(p, gamma, x)?;
    }
    for (&k, v) in &u.bilateral {
        if v.norm() == 0.0 {
            continue;
        }
        let x = u.z * qq.powi(k);
        total += v * c(big_weight(p, x)? * u.z * qq.powi(k)) * big_kernel(p, gamma, x)?;
    }
    Ok(total * (1.0 - qq))
}

/// Inverse big-level transform at the grid point x:
/// u(x) = C ∫ û(γ) φ_γ(x) (abc γ^{±1};q)_∞^{-1} dν(γ).
pub fn big_inverse(
    p: &BigParams,
    u_hat: &dyn Fn(Complex64) -> QResult<Complex64>,
    x: f64,
    cfg: &QuadratureConfig,
) -> QResult<Complex64> {
    let tc = TransformConstants::big(p)?;
    let abc = p.a() * p.b() * p.c();
    let v = integrate_nu(
        &tc.dual_measure,
        &|gamma| {
            let pair = qpoch_sym(c(abc), gamma, p.q())?;
            if pair.value.norm() == 0.0 {
                return Err(QError::Pole("spectral weight pole in the inversion".into()));
            }
            Ok(u_hat(gamma)? * big_kernel(p, gamma, x)? / pair.value)
        },
        cfg,
    )?;
    Ok(v * tc.c)
}

/// Forward little-level transform of a finitely supported sequence:
/// û(γ) = Σ_k u(k) φ_γ(y q^k) · weight(k).
pub fn little_forward(
    p: &LittleParams,
    u: &BTreeMap<i32, Complex64>,
    gamma: Complex64,
) -> QResult<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (&k, &uk) in u {
        if uk.norm() == 0.0 {
            continue;
        }
        total += uk * c(little_weight(p, k)?) * little_kernel(p, gamma, k)?;
    }
    Ok(total)
}

/// Inverse little-level transform at sequence index k:
/// u(k) = C ∫ û(γ) φ_γ(y q^k) dν(γ).
pub fn little_inverse(
    p: &LittleParams,
    u_hat: &dyn Fn(Complex64) -> QResult<Complex64>,
    k: i32,
    cfg: &QuadratureConfig,
) -> QResult<Complex64> {
    let tc = TransformConstants::little(p)?;
    let v = integrate_nu(
        &tc.dual_measure,
        &|gamma| Ok(u_hat(gamma)? * little_kernel(p, gamma, k)?),
        cfg,
    )?;
    Ok(v * tc.c)
}

/// Which orthogonal family a Gram matrix is requested for.
#[derive(Debug, Clone, Copy)]
pub enum OrthoSpec {
    /// Two-parameter kernels J_{γ q^k} under the contour-plus-masses measure
    /// at (a; b, qγ; 1/γ) with t = −1.
    AWBessel { q: QBase, a: f64, b: f64, gamma: f64 },
    /// One-parameter kernels J_{γ q^k} under the q-integral with weight
    /// (−qx;q)_∞/(−ax;q)_∞ on the grid reaching q/(aγ).
    BigBessel { q: QBase, a: f64, gamma: f64 },
    /// One-parameter kernels j_{q^n} under the bilateral sum with weight a^k.
    LittleBessel { q: QBase, a: f64 },
}

/// A computed Gram matrix together with its closed-form diagonal and the
/// worst deviations found.
#[derive(Debug, Clone)]
pub struct OrthoResult {
    pub indices: Vec<i32>,
    pub gram: Vec<Vec<f64>>,
    pub diagonal: Vec<f64>,
    /// max |G_kl| / sqrt(G_kk G_ll) over k ≠ l
    pub max_offdiag: f64,
    /// max |G_kk − diagonal_k| / diagonal_k
    pub max_diag_err: f64,
}

/// Spectrally continued two-parameter q-Bessel kernel: the direct series
/// needs |qγ/a| < 1; for larger spectral points the value is reached through
/// the three-term relation in the combined variable qγ/(ab), on which the
/// kernel is a two-parameter eigenfunction with spectral point x.
pub fn aw_qbessel_kernel(
    q: QBase,
    a: f64,
    b: f64,
    gamma: Complex64,
    x: Complex64,
) -> QResult<Complex64> {
    let qq = q.q();
    if (qq / a) * gamma.norm() < 0.999 {
        return Ok(aw_qbessel(q, a, b, gamma, x)?.value);
    }
    let steps = ((0.5 * a / (qq * gamma.norm())).ln() / qq.ln()).ceil() as usize;
    let g0 = gamma * c(qq.powi(steps as i32));
    let f0 = aw_qbessel(q, a, b, g0, x)?;
    let f1 = aw_qbessel(q, a, b, g0 * qq, x)?;
    let x_line = c(qq / (a * b)) * g0;
    let op = OperatorSpec::LittleJacobi { q, a, b };
    let vals = continue_on_qline(&op, x, x_line, (f0.value, f1.value), Direction::Up, steps)?;
    Ok(vals[steps - 1])
}

/// Depth of the discrete lattice window used by the two-parameter Gram.
const GRAM_DEPTH: i32 = 45;

/// Lattice index above which the direct q-Bessel series is trusted on the
/// line x_j = −q^j.
const GRAM_J_REF: i32 = -5;

/// Gram matrix of the requested kernel family under its measure, with the
/// closed-form diagonal for comparison.
pub fn orthogonality_matrix(spec: &OrthoSpec, indices: &[i32]) -> QResult<OrthoResult> {
    let n = indices.len();
    let mut gram = vec![vec![0.0; n]; n];
    let mut diagonal = vec![0.0; n];
    match *spec {
        OrthoSpec::AWBessel { q, a, b, gamma } => {
            let pm = MeasureParams::new_unchecked(q, a, b, q.q() * gamma, 1.0 / gamma, -1.0);
            let k_const = const_k(&pm)?;
            let qq = q.q();
            // kernel values on the discrete line, one normalized recurrence
            // per index; the direct series below GRAM_J_REF is pure noise
            let mut lines: Vec<BTreeMap<i32, Complex64>> = Vec::with_capacity(n);
            for &k in indices {
                let gk = c(gamma * qq.powi(k));
                let op = OperatorSpec::AWBessel { q, a, b };
                lines.push(miller_line(
                    &op,
                    gk,
                    c(-1.0),
                    -GRAM_DEPTH,
                    -1,
                    GRAM_J_REF,
                    |j| aw_qbessel_kernel(q, a, b, gk, c(-qq.powi(j))),
                )?);
            }
            let cfg = QuadratureConfig {
                max_depth: GRAM_DEPTH - 2,
                ..QuadratureConfig::default()
            };
            for (i, &k) in indices.iter().enumerate() {
                for (j, &_l) in indices.iter().enumerate() {
                    if j < i {
                        gram[i][j] = gram[j][i];
                        continue;
                    }
                    let gi = c(gamma * qq.powi(k));
                    let gj = c(gamma * qq.powi(indices[j]));
                    let v = integrate_nu_indexed(
                        &pm,
                        &|x| {
                            Ok(aw_qbessel_kernel(q, a, b, gi, x)?
                                * aw_qbessel_kernel(q, a, b, gj, x)?)
                        },
                        &|idx, _s| Ok(lines[i][&idx] * lines[j][&idx]),
                        &cfg,
                    )?;
                    gram[i][j] = v.re;
                }
                let scale = k_const
                    / (qpoch(c(a * b), q, None).value.re * theta(c(-a / gamma), q)?.value.re)
                        .powi(2);
                let ratio = div_series(
                    qpoch(c(-a * qq.powi(-k) / gamma), q, None),
                    qpoch(c(-b * qq.powi(-k) / gamma), q, None),
                )?;
                diagonal[i] = a.powi(-2 * k) * ratio.value.re * scale;
            }
        }
        OrthoSpec::BigBessel { q, a, gamma } => {
            let qq = q.q();
            let z = qq / (a * gamma);
            for (i, &k) in indices.iter().enumerate() {
                for (j, &l) in indices.iter().enumerate() {
                    if j < i {
                        gram[i][j] = gram[j][i];
                        continue;
                    }
                    gram[i][j] = big_bessel_gram_entry(q, a, gamma, z, k, l)?;
                }
                let pref = (1.0 - qq) * qpoch(c(qq), q, None).value.re.powi(2)
                    * theta(c(-a * gamma), q)?.value.re
                    / (qpoch(c(a), q, None).value.re.powi(2) * theta(c(-gamma), q)?.value.re);
                diagonal[i] =
                    pref * a.powi(-k) * qpoch(c(-qq.powi(k) * gamma), q, None).value.re;
            }
        }
        OrthoSpec::LittleBessel { q, a } => {
            let qq = q.q();
            for (i, &nn) in indices.iter().enumerate() {
                for (j, &mm) in indices.iter().enumerate() {
                    if j < i {
                        gram[i][j] = gram[j][i];
                        continue;
                    }
                    let gn = c(qq.powi(nn));
                    let gm = c(qq.powi(mm));
                    let s = bilateral_sum(
                        &|k| {
                            let x = c(qq.powi(k as i32));
                            let jn = noise_gated(little_qbessel(q, a, gn, x)?);
                            let jm = noise_gated(little_qbessel(q, a, gm, x)?);
                            Ok(c(a.powi(k as i32)) * jn * jm)
                        },
                        1e-14,
                    )?;
                    gram[i][j] = s.value.re;
                }
                diagonal[i] = a.powi(-nn) * qpoch(c(qq), q, None).value.re.powi(2)
                    / qpoch(c(a), q, None).value.re.powi(2);
            }
        }
    }
    let mut max_offdiag: f64 = 0.0;
    let mut max_diag_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                max_diag_err = max_diag_err.max((gram[i][i] - diagonal[i]).abs() / diagonal[i]);
            } else {
                max_offdiag =
                    max_offdiag.max(gram[i][j].abs() / (gram[i][i] * gram[j][j]).sqrt());
            }
        }
    }
    Ok(OrthoResult {
        indices: indices.to_vec(),
        gram,
        diagonal,
        max_offdiag,
        max_diag_err,
    })
}

/// A heavily cancelling series value whose error estimate exceeds its
/// magnitude carries no usable digits; treat it as zero.
fn noise_gated(r: SeriesResult) -> Complex64 {
    if r.abs_error > r.value.norm() {
        Complex64::new(0.0, 0.0)
    } else {
        r.value
    }
}

/// Pair of one-parameter kernel values at a shared point, with joint noise
/// gating: when either series has lost all its digits to cancellation the
/// product carries no information and both factors are dropped.
fn gated_pair(a: &SeriesResult, b: &SeriesResult) -> Complex64 {
    if a.abs_error > a.value.norm() || b.abs_error > b.value.norm() {
        Complex64::new(0.0, 0.0)
    } else {
        a.value * b.value
    }
}

fn big_bessel_gram_entry(q: QBase, a: f64, gamma: f64, z: f64, k: i32, l: i32) -> QResult<f64> {
    let qq = q.q();
    let weight = |x: f64| -> QResult<f64> {
        Ok(div_series(qpoch(c(-qq * x), q, None), qpoch(c(-a * x), q, None))?
            .value
            .re)
    };
    let gk = c(gamma * qq.powi(k));
    let gl = c(gamma * qq.powi(l));
    let mut tot = 0.0;
    // unilateral branch x = −q^m
    for m in 0..200 {
        let x = -qq.powi(m);
        let jk = big_qbessel(q, a, gk, c(x))?;
        let jl = big_qbessel(q, a, gl, c(x))?;
        let term = (gated_pair(&jk, &jl) * c(weight(x)?)).re * qq.powi(m);
        tot += term;
        if term.abs() < 1e-18 * (1.0 + tot.abs()) && m > 8 {
            break;
        }
    }
    // bilateral branch x = z q^j, downward half
    for j in 0..200 {
        let x = z * qq.powi(j);
        let jk = big_qbessel(q, a, gk, c(x))?;
        let jl = big_qbessel(q, a, gl, c(x))?;
        let term = z * (gated_pair(&jk, &jl) * c(weight(x)?)).re * qq.powi(j);
        tot += term;
        if term.abs() < 1e-18 * (1.0 + tot.abs()) && j > 8 {
            break;
        }
    }
    // bilateral branch, upward half; deep points rely on the gating since
    // the series cancels catastrophically there while the true kernel decay
    // drives the terms to zero
    for j in (-60..=-1).rev() {
        let x = z * qq.powi(j);
        let jk = big_qbessel(q, a, gk, c(x))?;
        let jl = big_qbessel(q, a, gl, c(x))?;
        let term = z * (gated_pair(&jk, &jl) * c(weight(x)?)).re * qq.powi(j);
        tot += term;
        if term.abs() < 1e-18 * (1.0 + tot.abs()) && j < -8 {
            break;
        }
    }
    Ok((1.0 - qq) * tot)
}
