//! Language-neutral sparse linear program container.

use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

/// One constraint row: sparse coefficients, relation, right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program over nonnegative variables.
///
/// All variables have lower bound 0 and no upper bound; `fixings` pins
/// selected variables to a constant value. The reported optimum is
/// `objective · x + objective_offset` under `sense`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<(usize, f64)>,
    pub objective_offset: f64,
    pub rows: Vec<Row>,
    pub fixings: Vec<(usize, f64)>,
}

impl LinearProgram {
    /// Check the container invariants: indices in range, finite entries,
    /// at least one row.
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidProgram("no rows".into()));
        }
        if !self.objective_offset.is_finite() {
            return Err(Error::InvalidProgram("objective offset not finite".into()));
        }
        for &(j, v) in &self.objective {
            if j >= self.num_vars {
                return Err(Error::InvalidProgram(format!(
                    "objective references variable {j} >= num_vars {}",
                    self.num_vars
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidProgram(format!(
                    "objective coefficient for variable {j} not finite"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidProgram(format!("row {i} rhs not finite")));
            }
            for &(j, v) in &row.coeffs {
                if j >= self.num_vars {
                    return Err(Error::InvalidProgram(format!(
                        "row {i} references variable {j} >= num_vars {}",
                        self.num_vars
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidProgram(format!(
                        "row {i} coefficient for variable {j} not finite"
                    )));
                }
            }
        }
        for &(j, v) in &self.fixings {
            if j >= self.num_vars {
                return Err(Error::InvalidProgram(format!(
                    "fixing references variable {j} >= num_vars {}",
                    self.num_vars
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidProgram(format!(
                    "fixing of variable {j} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }

    /// Nonzero count over rows and objective; governs the exact solver cap.
    pub fn nonzero_count(&self) -> usize {
        self.objective.len() + self.rows.iter().map(|r| r.coeffs.len()).sum::<usize>()
    }

    /// Dump in CPLEX LP text format with 17 significant digits, for
    /// cross-checks against external solvers.
    pub fn write_lp_format(&self, w: &mut impl Write) -> io::Result<()> {
        fn num(v: f64) -> String {
            format!("{v:.16e}")
        }
        fn term(j: usize, v: f64, first: bool) -> String {
            let sign = if v < 0.0 {
                "- "
            } else if first {
                ""
            } else {
                "+ "
            };
            format!("{sign}{} x{j}", num(v.abs()))
        }

        writeln!(
            w,
            "{}",
            match self.sense {
                Sense::Minimize => "Minimize",
                Sense::Maximize => "Maximize",
            }
        )?;
        write!(w, " obj:")?;
        let mut first = true;
        for &(j, v) in &self.objective {
            write!(w, " {}", term(j, v, first))?;
            first = false;
        }
        if self.objective_offset != 0.0 || first {
            let v = self.objective_offset;
            if v < 0.0 {
                write!(w, " - {}", num(-v))?;
            } else if first {
                write!(w, " {}", num(v))?;
            } else {
                write!(w, " + {}", num(v))?;
            }
        }
        writeln!(w)?;
        writeln!(w, "Subject To")?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, " r{i}:")?;
            let mut first = true;
            for &(j, v) in &row.coeffs {
                write!(w, " {}", term(j, v, first))?;
                first = false;
            }
            if first {
                write!(w, " 0 x0")?;
            }
            let rel = match row.relation {
                Relation::Eq => "=",
                Relation::Le => "<=",
            };
            writeln!(w, " {rel} {}", num(row.rhs))?;
        }
        writeln!(w, "Bounds")?;
        for &(j, v) in &self.fixings {
            writeln!(w, " x{j} = {}", num(v))?;
        }
        writeln!(w, "End")?;
        Ok(())
    }
}
