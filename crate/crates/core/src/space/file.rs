//! TOML space definition files.
//!
//! ```toml
//! label = "Lambda_1(n)"
//! type = "lambda1"          # lambda1 | lambdainf | graded | table | interleave
//! alpha = "n"               # lambda1, lambdainf, graded
//! f = "2*k + 1"             # graded only, over the grade k
//! grades = ["1", "exp(1)"]  # table only, a_n(k) per grade
//! maxGrade = 12
//! [first]                   # interleave only, nested definitions
//! [second]
//! ```

use toml::{Table, Value};

use super::{GradeFunction, KotheMatrix, MatrixKind, DEFAULT_MAX_GRADE};
use crate::error::{KdiamError, Result};
use crate::seq::{parse, ExponentSequence, Index, Seq};
use crate::verdict::Grade;

pub const SPACE_SCHEMA_VERSION: i64 = 1;

#[derive(Clone, Debug)]
pub struct SpaceFile {
    pub label: String,
    pub matrix: KotheMatrix,
}

fn perr(message: impl Into<String>) -> KdiamError {
    KdiamError::Parse {
        location: 0,
        message: message.into(),
    }
}

/// Parses a space file; exponent sequences are validated on `[0, check_to]`.
pub fn parse_space_file(text: &str, check_to: Index) -> Result<SpaceFile> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| KdiamError::Parse {
            location: e.span().map(|s| s.start).unwrap_or(0),
            message: e.message().to_string(),
        })?;
    if let Some(v) = table.get("schema_version") {
        if v.as_integer() != Some(SPACE_SCHEMA_VERSION) {
            return Err(perr(format!("unsupported schema_version {v}")));
        }
    }
    let matrix = matrix_from_table(&table, check_to)?;
    let label = match table.get("label") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(perr("'label' must be a string")),
        None => matrix.describe(),
    };
    Ok(SpaceFile { label, matrix })
}

fn seq_key(t: &Table, key: &str) -> Result<Seq> {
    match t.get(key) {
        Some(Value::String(s)) => parse(s).map_err(|e| match e {
            KdiamError::Parse { location, message } => KdiamError::Parse {
                location,
                message: format!("in '{key}': {message}"),
            },
            other => other,
        }),
        Some(_) => Err(perr(format!("'{key}' must be a string"))),
        None => Err(perr(format!("missing key '{key}'"))),
    }
}

fn max_grade_key(t: &Table) -> Result<Option<Grade>> {
    match t.get("maxGrade") {
        None => Ok(None),
        Some(Value::Integer(k)) if *k >= 1 && *k <= 1 << 16 => Ok(Some(*k as Grade)),
        Some(v) => Err(perr(format!("invalid maxGrade {v}"))),
    }
}

fn matrix_from_table(t: &Table, check_to: Index) -> Result<KotheMatrix> {
    let kind = match t.get("type") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(perr("'type' must be a string")),
        None => return Err(perr("missing key 'type'")),
    };
    let max_grade = max_grade_key(t)?;
    let m = match kind {
        "lambda1" | "lambdainf" | "graded" => {
            let alpha = ExponentSequence::new(seq_key(t, "alpha")?, check_to)?;
            let f = match kind {
                "lambda1" => GradeFunction::FiniteType,
                "lambdainf" => GradeFunction::InfiniteType,
                _ => grade_function(seq_key(t, "f")?),
            };
            KotheMatrix::graded(alpha, f, max_grade.unwrap_or(DEFAULT_MAX_GRADE))?
        }
        "table" => {
            let grades = match t.get("grades") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => parse(s),
                        _ => Err(perr("'grades' entries must be strings")),
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => return Err(perr("table needs a 'grades' array")),
            };
            let m = KotheMatrix::table(grades)?;
            match max_grade {
                Some(k) => m.with_max_grade(k)?,
                None => m,
            }
        }
        "interleave" => {
            let sub = |key: &str| match t.get(key) {
                Some(Value::Table(inner)) => matrix_from_table(inner, check_to / 2),
                _ => Err(perr(format!("interleave needs a [{key}] table"))),
            };
            let m = KotheMatrix::interleave(sub("first")?, sub("second")?);
            match max_grade {
                Some(k) => m.with_max_grade(k)?,
                None => m,
            }
        }
        other => return Err(perr(format!("unknown space type '{other}'"))),
    };
    Ok(m)
}

/// `-poly(-1)` and `k` written out map back to the closed forms.
fn grade_function(f: Seq) -> GradeFunction {
    if f == parse("-poly(-1)").unwrap() {
        GradeFunction::FiniteType
    } else if f == Seq::identity() {
        GradeFunction::InfiniteType
    } else {
        GradeFunction::Custom(f)
    }
}

fn matrix_to_table(m: &KotheMatrix) -> Result<Table> {
    let mut t = Table::new();
    match m.kind() {
        MatrixKind::Graded { alpha, f } => {
            let ty = match f {
                GradeFunction::FiniteType => "lambda1",
                GradeFunction::InfiniteType => "lambdainf",
                GradeFunction::Custom(_) => "graded",
            };
            t.insert("type".into(), ty.into());
            t.insert("alpha".into(), printable(alpha.seq())?.into());
            if let GradeFunction::Custom(s) = f {
                t.insert("f".into(), printable(s)?.into());
            }
        }
        MatrixKind::Table { grades } => {
            t.insert("type".into(), "table".into());
            let items = grades
                .iter()
                .map(|g| printable(g).map(Value::String))
                .collect::<Result<Vec<_>>>()?;
            t.insert("grades".into(), Value::Array(items));
        }
        MatrixKind::Interleave(a, b) => {
            t.insert("type".into(), "interleave".into());
            t.insert("first".into(), Value::Table(matrix_to_table(a)?));
            t.insert("second".into(), Value::Table(matrix_to_table(b)?));
        }
    }
    t.insert("maxGrade".into(), Value::Integer(m.max_grade() as i64));
    Ok(t)
}

fn printable(s: &Seq) -> Result<String> {
    if matches!(s, Seq::Samples(_)) {
        return Err(KdiamError::Argument(
            "computed sample sequences have no textual form".into(),
        ));
    }
    Ok(s.to_string())
}

pub fn space_to_toml(label: &str, m: &KotheMatrix) -> Result<String> {
    let mut t = matrix_to_table(m)?;
    t.insert(
        "schema_version".into(),
        Value::Integer(SPACE_SCHEMA_VERSION),
    );
    t.insert("label".into(), label.into());
    toml::to_string(&t).map_err(|e| KdiamError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_power_series() {
        let f =
            parse_space_file("type = \"lambda1\"\nalpha = \"n\"\nlabel = \"L1\"\n", 256).unwrap();
        assert_eq!(f.label, "L1");
        assert_eq!(f.matrix.max_grade(), 12);
        assert!(matches!(
            f.matrix.graded_parts().unwrap().1,
            GradeFunction::FiniteType
        ));
    }

    #[test]
    fn malformed_f_rejected_with_grade() {
        let text = "type = \"graded\"\nalpha = \"n\"\nf = \"max(k, 3)\"\nmaxGrade = 5\n";
        match parse_space_file(text, 256) {
            Err(KdiamError::InvalidMatrix { grade, .. }) => assert_eq!(grade, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        assert!(parse_space_file("type = ", 64).unwrap_err().is_parse());
        assert!(parse_space_file("type = \"lambda1\"\nalpha = \"foo\"", 64)
            .unwrap_err()
            .is_parse());
        assert!(parse_space_file("type = \"nope\"", 64)
            .unwrap_err()
            .is_parse());
    }

    #[test]
    fn export_round_trip() {
        let src = r#"
label = "mix"
type = "interleave"
[first]
type = "lambda1"
alpha = "n"
[second]
type = "graded"
alpha = "n * log(n + 1)"
f = "2*k + 1"
maxGrade = 7
"#;
        let a = parse_space_file(src, 256).unwrap();
        let text = space_to_toml(&a.label, &a.matrix).unwrap();
        let b = parse_space_file(&text, 256).unwrap();
        assert_eq!(a.label, b.label);
        assert_eq!(a.matrix.max_grade(), 7);
        for k in 1..=7 {
            for n in [0u64, 1, 5, 100] {
                assert_eq!(
                    a.matrix.log_weight(k, n).unwrap(),
                    b.matrix.log_weight(k, n).unwrap()
                );
            }
        }
    }
}
