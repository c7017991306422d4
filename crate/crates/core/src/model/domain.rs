use std::fmt;
use std::sync::Arc;

/// An enumerated type: an ordered list of distinct constant names.
///
/// Two enum types are the same type iff their constant lists are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumType {
    names: Vec<String>,
}

impl EnumType {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, String> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err("enum domain needs at least one constant".into());
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(format!("duplicate enum constant `{n}`"));
            }
        }
        Ok(EnumType { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn name(&self, index: u32) -> &str {
        &self.names[index as usize]
    }
}

/// Finite, nonempty domain of a state or input variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    /// Inclusive integer range.
    Int {
        lo: i64,
        hi: i64,
    },
    Enum(Arc<EnumType>),
}

impl Domain {
    pub fn int(lo: i64, hi: i64) -> Result<Self, String> {
        if lo > hi {
            Err(format!("empty domain {lo}..{hi}"))
        } else {
            Ok(Domain::Int { lo, hi })
        }
    }

    /// Number of values in the domain.
    pub fn size(&self) -> u64 {
        match self {
            Domain::Bool => 2,
            Domain::Int { lo, hi } => (hi - lo) as u64 + 1,
            Domain::Enum(e) => e.len() as u64,
        }
    }

    /// The `idx`-th value in canonical order (false < true, ascending ints, declaration order).
    pub fn value_at(&self, idx: u64) -> Value {
        match self {
            Domain::Bool => Value::Bool(idx != 0),
            Domain::Int { lo, .. } => Value::Int(lo + idx as i64),
            Domain::Enum(_) => Value::Sym(idx as u32),
        }
    }

    /// Inverse of [`Domain::value_at`]; `None` if the value does not belong to the domain.
    pub fn index_of(&self, v: Value) -> Option<u64> {
        match (self, v) {
            (Domain::Bool, Value::Bool(b)) => Some(b as u64),
            (Domain::Int { lo, hi }, Value::Int(x)) if x >= *lo && x <= *hi => Some((x - lo) as u64),
            (Domain::Enum(e), Value::Sym(s)) if (s as usize) < e.len() => Some(s as u64),
            _ => None,
        }
    }

    pub fn contains(&self, v: Value) -> bool {
        self.index_of(v).is_some()
    }

    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        (0..self.size()).map(move |i| self.value_at(i))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Domain::Bool => Sort::Bool,
            Domain::Int { lo, hi } => Sort::Int { lo: *lo, hi: *hi },
            Domain::Enum(e) => Sort::Enum(e.clone()),
        }
    }

    pub fn format_value(&self, v: Value) -> String {
        match (self, v) {
            (Domain::Enum(e), Value::Sym(s)) if (s as usize) < e.len() => e.name(s).to_string(),
            _ => v.to_string(),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("bool"),
            Domain::Int { lo, hi } => write!(f, "{lo}..{hi}"),
            Domain::Enum(e) => write!(f, "{{{}}}", e.names().join(", ")),
        }
    }
}

/// Runtime value. Enum values are indices into their [`EnumType`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Sym(u32),
}

impl Value {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "#{s}"),
        }
    }
}

/// Static sort of an expression. Integer sorts carry the interval of values
/// the expression can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int { lo: i64, hi: i64 },
    Enum(Arc<EnumType>),
}

impl Sort {
    pub fn same_kind(&self, other: &Sort) -> bool {
        match (self, other) {
            (Sort::Bool, Sort::Bool) => true,
            (Sort::Int { .. }, Sort::Int { .. }) => true,
            (Sort::Enum(a), Sort::Enum(b)) => a == b,
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Sort::Bool => "bool".into(),
            Sort::Int { lo, hi } => format!("int {lo}..{hi}"),
            Sort::Enum(e) => format!("enum {{{}}}", e.names().join(", ")),
        }
    }
}
