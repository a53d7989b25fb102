//! Power series identities checked candidate by candidate:
//! `Delta(Lambda_1) = Lambda_1`, `Delta(Lambda_inf) = Lambda_inf'`,
//! `delta(Lambda_inf) = Lambda_inf`, `delta(Lambda_1) = Lambda_1'`.

use kdiam_core::invariants::{
    in_approximate, in_diametral, power_series_membership, PowerSeriesSet,
};
use kdiam_core::seq::parse;
use kdiam_core::verify::{default_battery, DEFAULT_EXPONENTS};
use kdiam_core::{Config, ExponentSequence, KotheMatrix, Outcome, Resolution, Verdict};

type Test = fn(&KotheMatrix, &kdiam_core::Seq, Resolution) -> kdiam_core::Result<Verdict>;

fn disagreements(finite: bool, test: Test, set: PowerSeriesSet) -> Vec<String> {
    let cfg = Config::default();
    let r = cfg.resolution;
    let mut out = Vec::new();
    for a in DEFAULT_EXPONENTS {
        let alpha = ExponentSequence::new(parse(a).unwrap(), 2 * r.n + 2).unwrap();
        let m = if finite {
            KotheMatrix::power_series_finite(alpha.clone())
        } else {
            KotheMatrix::power_series_infinite(alpha.clone())
        };
        let mut decided = 0;
        for b in default_battery() {
            let t = b.candidate(alpha.seq());
            let left = test(&m, &t, r).unwrap().outcome;
            let right = power_series_membership(set, alpha.seq(), &t, r)
                .unwrap()
                .outcome;
            if left.is_decided() && right.is_decided() {
                decided += 1;
                if left != right {
                    out.push(format!("{a}: {} ({left:?} vs {right:?})", b.label));
                }
            }
        }
        assert!(decided >= 10, "{a}: only {decided} candidates decided");
    }
    out
}

#[test]
fn diametral_dimension_of_finite_type() {
    let bad = disagreements(true, in_diametral, PowerSeriesSet::Lambda1);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn diametral_dimension_of_infinite_type() {
    let bad = disagreements(false, in_diametral, PowerSeriesSet::LambdaInfDual);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn approximate_diametral_dimension_of_infinite_type() {
    let bad = disagreements(false, in_approximate, PowerSeriesSet::LambdaInf);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn approximate_diametral_dimension_of_finite_type() {
    let bad = disagreements(true, in_approximate, PowerSeriesSet::Lambda1Dual);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn constant_one_on_finite_type() {
    let cfg = Config::default();
    let r = cfg.resolution;
    let alpha = ExponentSequence::new(parse("n").unwrap(), 2 * r.n + 2).unwrap();
    let m = KotheMatrix::power_series_finite(alpha);
    let one = parse("1").unwrap();
    assert_eq!(in_diametral(&m, &one, r).unwrap().outcome, Outcome::Holds);
    assert_eq!(in_approximate(&m, &one, r).unwrap().outcome, Outcome::Fails);
}
