//! Verification outcomes, witnesses, and the check budget shared by every verifier.

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Counts constraint-row checks and stops verification once the limit is hit.
///
/// Verifiers never fall back to sampling: running out of budget is an error.
#[derive(Debug, Clone)]
pub struct ConstraintBudget {
    max_checks: u64,
    elapsed: u64,
}

impl ConstraintBudget {
    pub fn new(max_checks: u64) -> Self {
        ConstraintBudget {
            max_checks,
            elapsed: 0,
        }
    }

    pub fn elapsed(&self) -> u64 {
        self.elapsed
    }

    pub fn max_checks(&self) -> u64 {
        self.max_checks
    }

    pub fn charge(&mut self, checks: u64) -> Result<()> {
        self.elapsed = self.elapsed.saturating_add(checks);
        if self.elapsed > self.max_checks {
            return Err(Error::BudgetExceeded {
                needed: self.elapsed,
                limit: self.max_checks,
            });
        }
        Ok(())
    }

    /// Fails early when a known lower bound on the work already exceeds the limit.
    pub fn require(&self, at_least: u64) -> Result<()> {
        let needed = self.elapsed.saturating_add(at_least);
        if needed > self.max_checks {
            return Err(Error::BudgetExceeded {
                needed,
                limit: self.max_checks,
            });
        }
        Ok(())
    }
}

impl Default for ConstraintBudget {
    fn default() -> Self {
        ConstraintBudget::new(DEFAULT_BUDGET)
    }
}

/// A concrete counterexample to the property being verified.
///
/// Item and column indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A normalized message whose codeword is too light.
    LightCodeword {
        message: Vec<u32>,
        weight: usize,
        required: usize,
    },
    /// A set of column pairs not hit (often enough) by any row.
    Pairs { pairs: Vec<(usize, usize)>, hits: usize },
    /// A d-subset not separated (often enough).
    Subset { items: Vec<usize>, hits: usize },
    /// Items that must be 1 and items that must be 0 in some test.
    Split { ones: Vec<usize>, zeros: Vec<usize> },
    /// Disjoint classes that no function separates.
    Classes(Vec<Vec<usize>>),
}

fn join(items: &[usize]) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::LightCodeword {
                message,
                weight,
                required,
            } => {
                let m: Vec<usize> = message.iter().map(|&x| x as usize).collect();
                write!(
                    f,
                    "message=({}) weight={weight} required={required}",
                    join(&m)
                )
            }
            Witness::Pairs { pairs, hits } => {
                let p: Vec<String> = pairs.iter().map(|(a, b)| format!("{{{a},{b}}}")).collect();
                write!(f, "pairs=[{}] hits={hits}", p.join(","))
            }
            Witness::Subset { items, hits } => write!(f, "subset={{{}}} hits={hits}", join(items)),
            Witness::Split { ones, zeros } => {
                write!(f, "ones={{{}}} zeros={{{}}}", join(ones), join(zeros))
            }
            Witness::Classes(cs) => {
                let c: Vec<String> = cs.iter().map(|c| format!("{{{}}}", join(c))).collect();
                write!(f, "classes={}", c.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds { checks: u64 },
    Violated { witness: Witness, checks: u64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn checks(&self) -> u64 {
        match self {
            Verdict::Holds { checks } | Verdict::Violated { checks, .. } => *checks,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds { .. } => None,
            Verdict::Violated { witness, .. } => Some(witness),
        }
    }
}
