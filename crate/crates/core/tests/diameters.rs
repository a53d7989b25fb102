use kdiam_core::diameters::{diameters_between_grades, oracle_diameters_coordinate};
use kdiam_core::seq::parse;
use kdiam_core::space::scale_exponents;
use kdiam_core::{ExponentSequence, KotheMatrix, Seq};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const N: u64 = 256;

fn alpha(text: &str) -> ExponentSequence {
    ExponentSequence::new(parse(text).unwrap(), 2 * N + 2).unwrap()
}

fn spaces() -> Vec<(String, KotheMatrix)> {
    let mut out = Vec::new();
    for a in ["n", "poly(2)", "n*log(n+1)", "pow(log(n+1),2)"] {
        out.push((
            format!("Lambda_1({a})"),
            KotheMatrix::power_series_finite(alpha(a)),
        ));
        out.push((
            format!("Lambda_inf({a})"),
            KotheMatrix::power_series_infinite(alpha(a)),
        ));
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn sorted_diameters_match_exhaustive_oracle() {
    for (label, m) in spaces() {
        for q in 2..=4 {
            for p in 1..q {
                let fast = diameters_between_grades(&m, p, q, 16).unwrap();
                let slow = oracle_diameters_coordinate(&m, p, q, 12, 4).unwrap();
                assert_eq!(
                    &fast.log_values[..5],
                    &slow.log_values[..],
                    "{label} p={p} q={q}"
                );
            }
        }
    }
}

#[test]
fn interleave_matches_oracle() {
    let m = KotheMatrix::interleave(
        KotheMatrix::power_series_finite(alpha("n")),
        KotheMatrix::power_series_infinite(alpha("n")),
    );
    let fast = diameters_between_grades(&m, 1, 3, 8).unwrap();
    let slow = oracle_diameters_coordinate(&m, 1, 3, 12, 4).unwrap();
    assert_eq!(&fast.log_values[..5], &slow.log_values[..]);
}

#[test]
fn diameters_are_non_increasing_and_start_at_one() {
    for (label, m) in spaces() {
        let d = diameters_between_grades(&m, 1, 3, N).unwrap().log_f64();
        assert!(d[0].abs() < 1e-12, "{label}: d_0 = {}", d[0].exp());
        assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{label}");
    }
}

#[test]
fn scaling_alpha_scales_epsilon() {
    let base = alpha("n*log(n+1)");
    let c = BigRational::new(BigInt::from(3), BigInt::from(2));
    let scaled = scale_exponents(&base, &c).unwrap();
    for (m, ms) in [
        (
            KotheMatrix::power_series_finite(base.clone()),
            KotheMatrix::power_series_finite(scaled.clone()),
        ),
        (
            KotheMatrix::power_series_infinite(base.clone()),
            KotheMatrix::power_series_infinite(scaled.clone()),
        ),
    ] {
        let a = diameters_between_grades(&m, 2, 5, 64).unwrap().log_f64();
        let b = diameters_between_grades(&ms, 2, 5, 64).unwrap().log_f64();
        for (x, y) in a.iter().zip(&b) {
            assert!(close(1.5 * x, *y), "{x} vs {y}");
        }
    }
}

fn table_from(rows: &[Vec<u8>]) -> KotheMatrix {
    // Grade k has a_j(k) = exp(c_1 + ... + c_k) on the section and
    // exp(10 k j) beyond it, where every ratio is far below the section's.
    let grades = (0..rows[0].len())
        .map(|k| {
            let prefix = rows
                .iter()
                .map(|r| {
                    BigRational::from_integer(r[..=k].iter().map(|c| *c as i64).sum::<i64>().into())
                })
                .collect();
            Seq::exp(Seq::table(
                prefix,
                Some(Seq::scale(
                    BigRational::from_integer((10 * (k as i64 + 1)).into()),
                    Seq::identity(),
                )),
            ))
        })
        .collect();
    KotheMatrix::table(grades).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn table_diameters_match_oracle(rows in prop::collection::vec(prop::collection::vec(0u8..5, 3), 12)) {
        let m = table_from(&rows);
        let fast = diameters_between_grades(&m, 1, 3, 11).unwrap();
        let slow = oracle_diameters_coordinate(&m, 1, 3, 12, 4).unwrap();
        prop_assert_eq!(&fast.log_values[..5], &slow.log_values[..]);
    }
}
