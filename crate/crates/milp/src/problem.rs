use std::fmt::Write as _;

use crate::error::MilpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn lp_token(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization problem over continuous and binary variables with linear rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpProblem {
    pub name: String,
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
    /// Constant added to every objective value.
    pub objective_offset: f64,
}

impl MilpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> usize {
        self.vars.push(Variable { name: name.into(), kind, lower, upper, cost });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> usize {
        self.add_var(name, VarKind::Binary, 0.0, 1.0, cost)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.add_var(name, VarKind::Continuous, lower, upper, cost)
    }

    /// Appends a row. Repeated variable indices are merged and zero coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for (j, a) in terms {
            if j >= self.vars.len() {
                return Err(MilpError::UnknownVariable { row: name, var: j });
            }
            if !a.is_finite() {
                return Err(MilpError::NonFinite(name));
            }
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(entry) => entry.1 += a,
                None => merged.push((j, a)),
            }
        }
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite(name));
        }
        merged.retain(|&(_, a)| a != 0.0);
        merged.sort_by_key(|&(j, _)| j);
        self.rows.push(Constraint { name, terms: merged, sense, rhs });
        Ok(self.rows.len() - 1)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn var(&self, j: usize) -> &Variable {
        &self.vars[j]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(j, _)| j)
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.vars[j].lower = lower;
        self.vars[j].upper = upper;
    }

    pub fn set_kind(&mut self, j: usize, kind: VarKind) {
        self.vars[j].kind = kind;
    }

    pub fn set_rhs(&mut self, row: usize, rhs: f64) {
        self.rows[row].rhs = rhs;
    }

    /// Checks the structural invariants: declared variables, finite data, binaries inside [0, 1].
    pub fn validate(&self) -> Result<(), MilpError> {
        for v in &self.vars {
            let bad = v.lower > v.upper
                || v.lower.is_nan()
                || v.upper.is_nan()
                || v.lower == f64::INFINITY
                || v.upper == f64::NEG_INFINITY
                || (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0));
            if bad {
                return Err(MilpError::InvalidBounds { name: v.name.clone(), lower: v.lower, upper: v.upper });
            }
            if !v.cost.is_finite() {
                return Err(MilpError::NonFinite(v.name.clone()));
            }
        }
        for r in &self.rows {
            for &(j, a) in &r.terms {
                if j >= self.vars.len() {
                    return Err(MilpError::UnknownVariable { row: r.name.clone(), var: j });
                }
                if !a.is_finite() {
                    return Err(MilpError::NonFinite(r.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset + self.vars.iter().zip(x).map(|(v, xi)| v.cost * xi).sum::<f64>()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = self
            .vars
            .iter()
            .zip(x)
            .map(|(v, &xi)| (v.lower - xi).max(xi - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Renders the problem in CPLEX LP file layout.
    ///
    /// Sections appear in the order `Minimize`, `Subject To`, `Bounds`,
    /// `Binaries`, `End`. Names are sanitized to the LP character set, and
    /// long rows are wrapped every eight terms. Variables with the default
    /// bounds `[0, +inf)` and binaries with `[0, 1]` are omitted from `Bounds`.
    /// A nonzero objective offset is written as a leading comment line.
    pub fn to_lp_string(&self) -> String {
        let names: Vec<String> = self.vars.iter().map(|v| sanitize(&v.name)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "\\ Problem: {}", sanitize(&self.name));
        if self.objective_offset != 0.0 {
            let _ = writeln!(out, "\\ Objective offset: {}", self.objective_offset);
        }
        out.push_str("Minimize\n obj:");
        let obj_terms: Vec<(usize, f64)> =
            self.vars.iter().enumerate().filter(|(_, v)| v.cost != 0.0).map(|(j, v)| (j, v.cost)).collect();
        write_terms(&mut out, &obj_terms, &names);
        out.push('\n');
        out.push_str("Subject To\n");
        for r in &self.rows {
            let _ = write!(out, " {}:", sanitize(&r.name));
            write_terms(&mut out, &r.terms, &names);
            let _ = writeln!(out, " {} {}", r.sense.lp_token(), r.rhs);
        }
        out.push_str("Bounds\n");
        for (v, name) in self.vars.iter().zip(&names) {
            let default = match v.kind {
                VarKind::Binary => v.lower == 0.0 && v.upper == 1.0,
                VarKind::Continuous => v.lower == 0.0 && v.upper == f64::INFINITY,
            };
            if default {
                continue;
            }
            let line = if v.lower == v.upper {
                format!(" {name} = {}", v.lower)
            } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                format!(" {name} free")
            } else if v.lower == f64::NEG_INFINITY {
                format!(" -inf <= {name} <= {}", v.upper)
            } else if v.upper == f64::INFINITY {
                format!(" {name} >= {}", v.lower)
            } else {
                format!(" {} <= {name} <= {}", v.lower, v.upper)
            };
            out.push_str(&line);
            out.push('\n');
        }
        let bins: Vec<&String> =
            self.vars.iter().zip(&names).filter(|(v, _)| v.kind == VarKind::Binary).map(|(_, n)| n).collect();
        if !bins.is_empty() {
            out.push_str("Binaries\n");
            for chunk in bins.chunks(8) {
                out.push(' ');
                out.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
                out.push('\n');
            }
        }
        out.push_str("End\n");
        out
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (i, &(j, a)) in terms.iter().enumerate() {
        if i > 0 && i % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if a < 0.0 { '-' } else { '+' };
        if i == 0 && a >= 0.0 {
            let _ = write!(out, " {} {}", a, names[j]);
        } else {
            let _ = write!(out, " {sign} {} {}", a.abs(), names[j]);
        }
    }
}

fn sanitize(name: &str) -> String {
    const EXTRA: &str = "!\"#$%&()/,.;?@_`'{}|~";
    let mut s: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() || EXTRA.contains(c) { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') || s.starts_with(['e', 'E']) {
        s.insert(0, '_');
    }
    s.truncate(255);
    s
}
