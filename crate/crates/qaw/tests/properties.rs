//! Property-based invariants over randomized inputs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;

use qaw::families::{aw_qbessel, little_jacobi_raw, little_qbessel};
use qaw::qcore::{qpoch, qpoch_sym, theta, QBase};
use qaw::report::{VerificationRecord, VerificationReport};
use qaw::transforms::{orthogonality_matrix, OrthoSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

proptest! {
    /// (a;q)_{n+1} = (1 − a)(aq;q)_n.
    #[test]
    fn qpoch_recurrence(
        q in 0.05f64..0.9,
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
        n in 0u32..25,
    ) {
        let qb = QBase::new(q).unwrap();
        let a = Complex64::new(re, im);
        let lhs = qpoch(a, qb, Some(n + 1)).value;
        let rhs = (1.0 - a) * qpoch(a * q, qb, Some(n)).value;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    /// (a;q)_∞ = (1 − a)(aq;q)_∞.
    #[test]
    fn qpoch_infinite_recurrence(
        q in 0.05f64..0.9,
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
    ) {
        let qb = QBase::new(q).unwrap();
        let a = Complex64::new(re, im);
        let lhs = qpoch(a, qb, None).value;
        let rhs = (1.0 - a) * qpoch(a * q, qb, None).value;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    /// θ(x) = θ(q/x) and the inversion rule θ(1/x) = θ(x)/(−x).
    #[test]
    fn theta_symmetries(q in 0.05f64..0.9, re in 0.2f64..2.0, im in -0.8f64..0.8) {
        let qb = QBase::new(q).unwrap();
        let x = Complex64::new(re, im);
        let t1 = theta(x, qb).unwrap().value;
        let t2 = theta(c(q) / x, qb).unwrap().value;
        prop_assert!((t1 - t2).norm() <= 1e-11 * (1.0 + t1.norm()));
        let t3 = theta(x.inv(), qb).unwrap().value;
        prop_assert!((t3 - t1 / (-x)).norm() <= 1e-11 * (1.0 + t3.norm()));
    }

    /// The symmetrized product is invariant under x → 1/x.
    #[test]
    fn qpoch_sym_inversion(
        q in 0.05f64..0.9,
        cc in 0.1f64..0.9,
        re in 0.3f64..1.8,
        im in -0.5f64..0.5,
    ) {
        let qb = QBase::new(q).unwrap();
        let x = Complex64::new(re, im);
        let v1 = qpoch_sym(c(cc), x, qb).unwrap().value;
        let v2 = qpoch_sym(c(cc), x.inv(), qb).unwrap().value;
        prop_assert!((v1 - v2).norm() <= 1e-11 * (1.0 + v1.norm()));
    }

    /// The little q-Bessel kernel is symmetric in its two arguments.
    #[test]
    fn little_qbessel_self_duality(
        a in 0.1f64..0.9,
        g in 0.2f64..1.8,
        x in 0.2f64..1.8,
    ) {
        let qb = QBase::new(0.5).unwrap();
        let v1 = little_qbessel(qb, a, c(g), c(x)).unwrap().value;
        let v2 = little_qbessel(qb, a, c(x), c(g)).unwrap().value;
        prop_assert!((v1 - v2).norm() <= 1e-13 * (1.0 + v1.norm()));
    }

    /// The little q-Jacobi function at spectral point qγ/(ab) coincides with
    /// the two-parameter Bessel-type kernel.
    #[test]
    fn little_jacobi_matches_bessel_kernel(
        a in 0.3f64..0.8,
        bfrac in 0.1f64..0.7,
        gfrac in 0.1f64..0.95,
        x in 0.2f64..1.4,
    ) {
        let qb = QBase::new(0.5).unwrap();
        let b = bfrac * a;
        // Keep qγ/a < 1 so the direct series for both sides converges.
        let g = gfrac * 2.0 * a;
        let v1 = little_jacobi_raw(qb, a, b, c(x), c(0.5 * g / (a * b))).unwrap().value;
        let v2 = aw_qbessel(qb, a, b, c(g), c(x)).unwrap().value;
        prop_assert!((v1 - v2).norm() <= 1e-12 * (1.0 + v1.norm()));
    }

    /// Gram diagonals are strictly positive real numbers.
    #[test]
    fn gram_diagonals_positive(a in 0.15f64..0.6) {
        let qb = QBase::new(0.5).unwrap();
        let r = orthogonality_matrix(
            &OrthoSpec::LittleBessel { q: qb, a },
            &[0, 1, 2],
        ).unwrap();
        for (i, row) in r.gram.iter().enumerate() {
            prop_assert!(row[i] > 0.0);
            prop_assert!(r.diagonal[i] > 0.0);
        }
    }

    /// `pass` always equals `metric <= threshold`, and both serializations
    /// survive a JSON round trip.
    #[test]
    fn report_pass_and_roundtrip(
        metric in prop::num::f64::NORMAL.prop_map(f64::abs),
        threshold in prop::num::f64::NORMAL.prop_map(f64::abs),
        p1 in -10.0f64..10.0,
        id in "[a-z][a-z0-9-]{0,12}",
    ) {
        let mut params = BTreeMap::new();
        params.insert("p1".to_string(), p1);
        let rec = VerificationRecord::new(id, "some-check", params, metric, threshold, 3);
        prop_assert_eq!(rec.pass, metric <= threshold);
        let mut rep = VerificationReport::new();
        rep.push(rec);
        let back = VerificationReport::from_json(&rep.to_json()).unwrap();
        prop_assert_eq!(back, rep.clone());
        // CSV stays rectangular: every line has the same field count.
        let csv = rep.to_csv();
        let counts: Vec<usize> = csv.lines().map(|l| l.split(',').count()).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] == w[1]));
    }
}
