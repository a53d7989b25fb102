use std::fmt;

use serde_json::{json, Map, Value};

use crate::seq::{Index, Mode};

pub type Grade = u32;

/// Quantifier truncation: indices `n <= n` and grades `<= kmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub n: Index,
    pub kmax: Grade,
}

impl Resolution {
    pub fn new(n: Index, kmax: Grade) -> Resolution {
        Resolution { n, kmax }
    }

    /// Grade horizon for existential witness searches on graded matrices.
    pub fn horizon(&self) -> Grade {
        16 * self.kmax
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n, "kmax": self.kmax })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Fails,
    Undetermined,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Undetermined => "undetermined",
        }
    }

    pub fn is_decided(self) -> bool {
        self != Outcome::Undetermined
    }

    pub fn from_bool(b: bool) -> Outcome {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }

    /// `Some(true)` for holds, `Some(false)` for fails.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Outcome::Holds => Some(true),
            Outcome::Fails => Some(false),
            Outcome::Undetermined => None,
        }
    }

    pub fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Fails, _) | (_, Outcome::Fails) => Outcome::Fails,
            (Outcome::Holds, Outcome::Holds) => Outcome::Holds,
            _ => Outcome::Undetermined,
        }
    }

    pub fn not(self) -> Outcome {
        match self {
            Outcome::Holds => Outcome::Fails,
            Outcome::Fails => Outcome::Holds,
            Outcome::Undetermined => Outcome::Undetermined,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered key/value record naming the grades, indices or constants that
/// decided a quantifier.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witness {
    pub fields: Vec<(String, String)>,
}

impl Witness {
    pub fn new() -> Witness {
        Witness::default()
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Witness {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.fields {
            m.insert(k.clone(), Value::String(v.clone()));
        }
        Value::Object(m)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witnesses: Vec<Witness>,
    pub resolution: Resolution,
    pub note: Option<String>,
    /// `Exact` when decided by exponent arithmetic rather than sampling.
    pub mode: Mode,
}

impl Verdict {
    pub fn new(outcome: Outcome, resolution: Resolution) -> Verdict {
        Verdict {
            outcome,
            witnesses: Vec::new(),
            resolution,
            note: None,
            mode: Mode::Estimated,
        }
    }

    pub fn holds(resolution: Resolution, witnesses: Vec<Witness>) -> Verdict {
        Verdict {
            outcome: Outcome::Holds,
            witnesses,
            resolution,
            note: None,
            mode: Mode::Estimated,
        }
    }

    pub fn fails(resolution: Resolution, witness: Witness) -> Verdict {
        Verdict {
            outcome: Outcome::Fails,
            witnesses: vec![witness],
            resolution,
            note: None,
            mode: Mode::Estimated,
        }
    }

    pub fn undetermined(resolution: Resolution, note: impl Into<String>) -> Verdict {
        Verdict {
            outcome: Outcome::Undetermined,
            witnesses: Vec::new(),
            resolution,
            note: Some(note.into()),
            mode: Mode::Estimated,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = Some(note.into());
        self
    }

    pub fn exact(mut self) -> Verdict {
        self.mode = Mode::Exact;
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "mode": self.mode.as_str(),
            "outcome": self.outcome.as_str(),
            "witnesses": self.witnesses.iter().map(Witness::to_json).collect::<Vec<_>>(),
            "resolution": self.resolution.to_json(),
        });
        if let Some(n) = &self.note {
            v["note"] = Value::String(n.clone());
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_valued_and() {
        use Outcome::*;
        assert_eq!(Holds.and(Holds), Holds);
        assert_eq!(Holds.and(Undetermined), Undetermined);
        assert_eq!(Undetermined.and(Fails), Fails);
        assert_eq!(Undetermined.not(), Undetermined);
    }

    #[test]
    fn witness_json_keeps_order() {
        let w = Witness::new().with("p", 3).with("q", 6);
        assert_eq!(w.to_string(), "p=3, q=6");
        assert_eq!(w.get("q"), Some("6"));
        assert_eq!(w.to_json()["p"], "3");
    }
}
