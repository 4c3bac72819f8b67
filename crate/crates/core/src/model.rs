//! Discrete graphical models: validation, the GM text format, potential
//! rescaling and log scores.
//!
//! Factor tables are indexed in mixed radix with the lowest-index scope
//! variable varying fastest, so entry `k - 1` of a table belongs to
//! configuration index `k` (see [`crate::nmrf::config_index`]).

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::nmrf::{config_index, decode_config};
use crate::text::{parse_error, Tokens};

/// Default additive offset used by [`rescale_potentials`].
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<usize>, table: Vec<f64>) -> Self {
        Factor { scope, table }
    }

    /// Table entry selected by a full assignment.
    pub fn value_at(&self, cards: &[usize], assignment: &Assignment) -> f64 {
        let settings: Vec<usize> = self.scope.iter().map(|&v| assignment.0[v]).collect();
        let k = config_index(&self.scope, cards, &settings).expect("assignment was validated");
        self.table[k - 1]
    }
}

/// A setting of every variable of a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct GraphicalModel {
    cardinalities: Vec<usize>,
    factors: Vec<Factor>,
}

impl GraphicalModel {
    /// Validates the model and merges factors with identical scopes by
    /// entrywise product (the first occurrence keeps its position).
    pub fn new(cardinalities: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::InvalidModel("model needs at least one variable".into()));
        }
        if let Some(i) = cardinalities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidModel(format!("variable {i} has cardinality 0")));
        }
        let mut merged: Vec<Factor> = Vec::with_capacity(factors.len());
        for (fi, factor) in factors.into_iter().enumerate() {
            validate_factor(fi, &factor, &cardinalities).map_err(Error::InvalidModel)?;
            match merged.iter_mut().find(|f| f.scope == factor.scope) {
                Some(existing) => {
                    for (a, b) in existing.table.iter_mut().zip(&factor.table) {
                        *a *= b;
                    }
                }
                None => merged.push(factor),
            }
        }
        Ok(GraphicalModel {
            cardinalities,
            factors: merged,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of joint assignments, saturating at `u64::MAX`.
    pub fn state_count(&self) -> u64 {
        self.cardinalities
            .iter()
            .fold(1u64, |acc, &c| acc.saturating_mul(c as u64))
    }

    pub fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.0.len() != self.cardinalities.len() {
            return Err(Error::InvalidAssignment(format!(
                "expected {} values, got {}",
                self.cardinalities.len(),
                a.0.len()
            )));
        }
        for (i, (&v, &c)) in a.0.iter().zip(&self.cardinalities).enumerate() {
            if v >= c {
                return Err(Error::InvalidAssignment(format!(
                    "variable {i} has value {v} but cardinality {c}"
                )));
            }
        }
        Ok(())
    }

    /// Serialize in the GM text format. Values use the shortest decimal
    /// representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("GM 1\n");
        let _ = writeln!(out, "vars {}", self.cardinalities.len());
        let cards: Vec<String> = self.cardinalities.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "cards {}", cards.join(" "));
        let _ = writeln!(out, "factors {}", self.factors.len());
        for f in &self.factors {
            let scope: Vec<String> = f.scope.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "factor {} {}", f.scope.len(), scope.join(" "));
            let values: Vec<String> = f.table.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "values {}", values.join(" "));
        }
        out
    }
}

fn validate_factor(index: usize, f: &Factor, cards: &[usize]) -> std::result::Result<(), String> {
    for w in f.scope.windows(2) {
        if w[0] >= w[1] {
            return Err(format!("factor {index}: non-increasing scope {:?}", f.scope));
        }
    }
    if let Some(&v) = f.scope.iter().find(|&&v| v >= cards.len()) {
        return Err(format!("factor {index}: scope out of range (variable {v})"));
    }
    let expected = scope_size(&f.scope, cards);
    if f.table.len() != expected {
        return Err(format!(
            "factor {index}: wrong table length {} (expected {expected})",
            f.table.len()
        ));
    }
    if let Some(&v) = f.table.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(format!("factor {index}: nonpositive entry {v}"));
    }
    Ok(())
}

/// Number of joint configurations of a scope.
pub fn scope_size(scope: &[usize], cards: &[usize]) -> usize {
    scope.iter().map(|&v| cards[v]).product()
}

/// Parse the GM text format.
pub fn parse_model(text: &str) -> Result<GraphicalModel> {
    let mut toks = Tokens::new(text);
    toks.keyword("GM")?;
    let (version, line) = toks.parse::<u32>("format version")?;
    if version != 1 {
        return Err(parse_error(
            line,
            format!("malformed header: unsupported version {version}"),
        ));
    }
    toks.keyword("vars")?;
    let (n, line) = toks.parse::<usize>("variable count")?;
    if n == 0 {
        return Err(parse_error(line, "malformed header: vars must be at least 1"));
    }
    toks.keyword("cards")?;
    let mut cards = Vec::with_capacity(n);
    for _ in 0..n {
        let (c, line) = toks.parse::<usize>("cardinality")?;
        if c == 0 {
            return Err(parse_error(line, "cardinality must be at least 1"));
        }
        cards.push(c);
    }
    toks.keyword("factors")?;
    let (m, _) = toks.parse::<usize>("factor count")?;
    let mut factors = Vec::with_capacity(m);
    for _ in 0..m {
        let header_line = toks.keyword("factor")?;
        let (size, _) = toks.parse::<usize>("scope size")?;
        let mut scope = Vec::with_capacity(size);
        for _ in 0..size {
            let (v, line) = toks.parse::<usize>("variable index")?;
            if v >= n {
                return Err(parse_error(line, format!("scope out of range: variable {v} >= {n}")));
            }
            if scope.last().is_some_and(|&prev| prev >= v) {
                return Err(parse_error(line, format!("non-increasing scope at variable {v}")));
            }
            scope.push(v);
        }
        let expected = scope_size(&scope, &cards);
        let values_line = toks.keyword("values")?;
        let mut table = Vec::with_capacity(expected);
        while table.len() < expected {
            match toks.peek() {
                Some(t) if t.text == "factor" => break,
                None => break,
                _ => {}
            }
            let (v, line) = toks.parse::<f64>("table value")?;
            if !(v.is_finite() && v > 0.0) {
                return Err(parse_error(line, format!("nonpositive entry {v}")));
            }
            table.push(v);
        }
        if table.len() != expected {
            return Err(parse_error(
                values_line,
                format!("wrong table length {} (expected {expected})", table.len()),
            ));
        }
        if let Some(t) = toks.peek() {
            if t.text.parse::<f64>().is_ok() {
                return Err(parse_error(
                    t.line,
                    format!("wrong table length: more than {expected} values for factor at line {header_line}"),
                ));
            }
        }
        factors.push(Factor::new(scope, table));
    }
    toks.expect_end()?;
    GraphicalModel::new(cards, factors)
}

/// `psi <- psi / min(psi) + epsilon`, applied per table.
pub fn rescale_potentials(m: &GraphicalModel, epsilon: f64) -> Result<GraphicalModel> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let factors = m
        .factors
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            if let Some(&v) = f.table.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidModel(format!("factor {fi}: nonpositive entry {v}")));
            }
            let min = f.table.iter().copied().fold(f64::INFINITY, f64::min);
            let table = f.table.iter().map(|&v| v / min + epsilon).collect();
            Ok(Factor::new(f.scope.clone(), table))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphicalModel {
        cardinalities: m.cardinalities.clone(),
        factors,
    })
}

/// `sum_c log psi_c(X_c)`, i.e. `log p(X) + log Z`.
pub fn model_log_score(m: &GraphicalModel, a: &Assignment) -> Result<f64> {
    m.check_assignment(a)?;
    Ok(m.factors.iter().map(|f| f.value_at(&m.cardinalities, a).ln()).sum())
}

/// Iterate all assignments in mixed-radix order, variable 0 fastest.
pub fn assignments(cards: &[usize]) -> impl Iterator<Item = Assignment> + '_ {
    let total: usize = cards.iter().product();
    (0..total).map(move |mut idx| {
        let values = cards
            .iter()
            .map(|&c| {
                let v = idx % c;
                idx /= c;
                v
            })
            .collect();
        Assignment(values)
    })
}

/// Settings of a scope decoded from a configuration index, keyed by variable.
pub fn scope_settings(scope: &[usize], cards: &[usize], k: usize) -> Vec<(usize, usize)> {
    let settings = decode_config(scope, cards, k).expect("configuration index in range");
    scope.iter().copied().zip(settings).collect()
}

/// Random model with `n` variables of cardinality in `2..=max_card`.
///
/// Factors: one per consecutive pair `(i, i+1)` with probability
/// `pair_prob`, plus up to `extra` random scopes of size 1..=3. Every
/// variable is covered by at least one factor. Tables are uniform on
/// `(0.05, 1]`.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, max_card: usize, extra: usize) -> GraphicalModel {
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=max_card.max(2))).collect();
    let mut scopes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n.saturating_sub(1) {
        if rng.random_bool(0.6) {
            scopes.push(vec![i, i + 1]);
        }
    }
    for _ in 0..extra {
        let size = rng.random_range(1..=3usize.min(n));
        let mut scope: Vec<usize> = Vec::with_capacity(size);
        while scope.len() < size {
            let v = rng.random_range(0..n);
            if !scope.contains(&v) {
                scope.push(v);
            }
        }
        scope.sort_unstable();
        scopes.push(scope);
    }
    for v in 0..n {
        if !scopes.iter().any(|s| s.contains(&v)) {
            scopes.push(vec![v]);
        }
    }
    let factors = scopes
        .into_iter()
        .map(|scope| {
            let k = scope_size(&scope, &cards);
            let table = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
            Factor::new(scope, table)
        })
        .collect();
    GraphicalModel::new(cards, factors).expect("generated model is valid")
}

/// Random tree-structured pairwise model on `n` variables: variable `i > 0`
/// attaches to a uniformly chosen earlier variable.
pub fn random_tree_model<R: Rng>(rng: &mut R, n: usize, max_card: usize) -> GraphicalModel {
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=max_card.max(2))).collect();
    let factors = (1..n)
        .map(|i| {
            let parent = rng.random_range(0..i);
            let scope = vec![parent, i];
            let k = scope_size(&scope, &cards);
            let table = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
            Factor::new(scope, table)
        })
        .collect();
    GraphicalModel::new(cards, factors).expect("generated model is valid")
}
