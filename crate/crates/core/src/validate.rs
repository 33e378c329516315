//! Field-level invariant checks shared by the model types and the CLI.

use std::fmt;

use serde::Serialize;

/// One violated invariant, naming the owning type and field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub owner: &'static str,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}: {}", self.owner, self.field, self.message)
    }
}

/// Types whose invariants can be listed without failing fast.
pub trait Validate {
    fn violations(&self) -> Vec<Violation>;

    fn validate(&self) -> crate::Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(v))
        }
    }
}

/// Small builder used by `Validate` impls.
pub(crate) struct Checker {
    owner: &'static str,
    out: Vec<Violation>,
}

impl Checker {
    pub(crate) fn new(owner: &'static str) -> Self {
        Self { owner, out: Vec::new() }
    }

    pub(crate) fn check(&mut self, ok: bool, field: &'static str, msg: impl FnOnce() -> String) {
        if !ok {
            self.out.push(Violation {
                owner: self.owner,
                field,
                message: msg(),
            });
        }
    }

    pub(crate) fn finite(&mut self, value: f64, field: &'static str) -> bool {
        let ok = value.is_finite();
        self.check(ok, field, || format!("must be finite, got {value}"));
        ok
    }

    pub(crate) fn finish(self) -> Vec<Violation> {
        self.out
    }
}
