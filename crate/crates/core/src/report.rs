use serde::Serialize;

/// A largeness requirement checked against concrete inputs. `holds` is
/// computed with the requirement's own relation between `lhs` and `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Condition {
    pub fn at_least(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Condition { name, holds: lhs >= rhs, lhs, rhs }
    }

    pub fn greater(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Condition { name, holds: lhs > rhs, lhs, rhs }
    }
}

pub fn all_hold(conds: &[Condition]) -> bool {
    conds.iter().all(|c| c.holds)
}

pub fn first_violation(conds: &[Condition]) -> Option<&'static str> {
    conds.iter().find(|c| !c.holds).map(|c| c.name)
}

/// One bound evaluated at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: &'static str,
    /// Value of log M (bits) or of a second-order coefficient.
    pub value: f64,
    pub first_order: f64,
    pub second_order: f64,
    /// κ₁ for achievability, κ₂ for the converse.
    pub residual: f64,
    pub conditions: Vec<Condition>,
}

impl BoundReport {
    pub fn feasible(&self) -> bool {
        all_hold(&self.conditions)
    }
}
