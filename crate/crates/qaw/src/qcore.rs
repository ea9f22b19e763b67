//! Elementary q-kernels: q-shifted factorials, the renormalised Jacobi theta
//! function, and the ± product shorthand.
//!
//! All evaluators return a [`SeriesResult`] carrying the value together with
//! an absolute-error estimate, so that downstream code can detect when a
//! heavily cancelling series has lost too many digits and must switch to a
//! recurrence-based evaluation instead.

use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold below which an individual product factor is treated as
/// an exact zero (the argument sits on a lattice point such as a = q^{-k}).
const ZERO_TOL: f64 = 1e-12;

/// Truncation threshold for infinite products: stop once |a q^k| has decayed
/// below this times (1 + |a|).
const PRODUCT_TAIL_TOL: f64 = 1e-17;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum QError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("series diverged: {0}")]
    Divergence(String),
    #[error("continuation unavailable: {0}")]
    Continuation(String),
    #[error("non-generic parameters: {0}")]
    Genericity(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("recurrence instability: {0}")]
    Instability(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type QResult<T> = Result<T, QError>;

/// The base of all q-series in a computation; guaranteed to lie in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QBase {
    q: f64,
}

impl QBase {
    pub fn new(q: f64) -> QResult<Self> {
        if q.is_finite() && 0.0 < q && q < 1.0 {
            Ok(QBase { q })
        } else {
            Err(QError::InvalidParams(format!(
                "base q must satisfy 0 < q < 1, got {q}"
            )))
        }
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }
}

/// A numerically evaluated series or product: the value, an absolute error
/// estimate, the number of terms/factors consumed, and whether the
/// truncation rule was satisfied.
#[derive(Debug, Clone, Copy)]
pub struct SeriesResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub terms: usize,
    pub converged: bool,
}

impl SeriesResult {
    pub fn exact(value: Complex64) -> Self {
        SeriesResult {
            value,
            abs_error: 0.0,
            terms: 1,
            converged: true,
        }
    }

    /// Relative error estimate, guarded against division by zero.
    pub fn rel_error(&self) -> f64 {
        if self.value.norm() > 0.0 {
            self.abs_error / self.value.norm()
        } else if self.abs_error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// q-shifted factorial (a;q)_n.  `n = None` requests the convergent infinite
/// product.  Factors that vanish to within [`ZERO_TOL`] produce an exact zero
/// result, which the residue machinery relies on for pole detection.
pub fn qpoch(a: Complex64, q: QBase, n: Option<u32>) -> SeriesResult {
    let q = q.q();
    match n {
        Some(n) => {
            let mut value = Complex64::new(1.0, 0.0);
            let mut arg = a;
            for _ in 0..n {
                let factor = Complex64::new(1.0, 0.0) - arg;
                if factor.norm() < ZERO_TOL * (1.0 + arg.norm()) {
                    return SeriesResult {
                        value: Complex64::new(0.0, 0.0),
                        abs_error: 0.0,
                        terms: n.max(1) as usize,
                        converged: true,
                    };
                }
                value *= factor;
                arg *= q;
            }
            SeriesResult {
                value,
                abs_error: value.norm() * 1e-16 * (n as f64),
                terms: n.max(1) as usize,
                converged: true,
            }
        }
        None => {
            let mut value = Complex64::new(1.0, 0.0);
            let mut arg = a;
            let mut k = 0usize;
            let threshold = PRODUCT_TAIL_TOL * (1.0 + a.norm());
            while arg.norm() >= threshold {
                let factor = Complex64::new(1.0, 0.0) - arg;
                if factor.norm() < ZERO_TOL * (1.0 + arg.norm()) {
                    return SeriesResult {
                        value: Complex64::new(0.0, 0.0),
                        abs_error: 0.0,
                        terms: k + 1,
                        converged: true,
                    };
                }
                value *= factor;
                arg *= q;
                k += 1;
                if k > 4000 {
                    break;
                }
            }
            // Remaining tail: |log Π (1-aq^j)| ≤ Σ |a| q^j / (1-q).
            let tail = arg.norm() / (1.0 - q);
            SeriesResult {
                value,
                abs_error: value.norm() * (tail + 1e-16 * k as f64),
                terms: k.max(1),
                converged: true,
            }
        }
    }
}

/// Renormalised Jacobi theta function θ(x) = (x;q)_∞ (q/x;q)_∞.
/// Vanishes exactly when x lies on the lattice q^j, j ∈ ℤ.
pub fn theta(x: Complex64, q: QBase) -> QResult<SeriesResult> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("theta(0) is undefined".into()));
    }
    let p1 = qpoch(x, q, None);
    let p2 = qpoch(Complex64::new(q.q(), 0.0) / x, q, None);
    Ok(mul_series(p1, p2))
}

/// ± product shorthand (c x^{±1};q)_∞ = (cx;q)_∞ (c/x;q)_∞.
pub fn qpoch_sym(c: Complex64, x: Complex64, q: QBase) -> QResult<SeriesResult> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("qpoch_sym requires x != 0".into()));
    }
    let p1 = qpoch(c * x, q, None);
    let p2 = qpoch(c / x, q, None);
    Ok(mul_series(p1, p2))
}

/// Combine two series results multiplicatively with first-order error
/// propagation.
pub fn mul_series(a: SeriesResult, b: SeriesResult) -> SeriesResult {
    SeriesResult {
        value: a.value * b.value,
        abs_error: a.abs_error * b.value.norm() + b.abs_error * a.value.norm(),
        terms: a.terms + b.terms,
        converged: a.converged && b.converged,
    }
}

/// Divide two series results with first-order error propagation.  An exactly
/// zero denominator is a pole error.
pub fn div_series(a: SeriesResult, b: SeriesResult) -> QResult<SeriesResult> {
    let bn = b.value.norm();
    if bn == 0.0 {
        return Err(QError::Pole(
            "division by an exactly vanishing product".into(),
        ));
    }
    let value = a.value / b.value;
    Ok(SeriesResult {
        value,
        abs_error: a.abs_error / bn + b.abs_error * value.norm() / bn,
        terms: a.terms + b.terms,
        converged: a.converged && b.converged,
    })
}
