//! Finite groups given by explicit multiplication tables.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rep::{Irrep, RepError};
use crate::scalar::Real;

/// Serialized group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub order: usize,
    pub elements: Vec<String>,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed group description: {0}")]
    Malformed(String),
    #[error("NotLatinSquare: {axis} {index} is not a permutation of 0..{order}")]
    NotLatinSquare { axis: Axis, index: usize, order: usize },
    #[error("NoIdentity: element {candidate} fails the identity law at {witness}")]
    NoIdentity { candidate: usize, witness: usize },
    #[error("NonAssociative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
}

impl GroupError {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupError::Malformed(_) => "MalformedInput",
            GroupError::NotLatinSquare { .. } => "NotLatinSquare",
            GroupError::NoIdentity { .. } => "NoIdentity",
            GroupError::NonAssociative { .. } => "NonAssociative",
        }
    }
}

/// A validated finite group. Elements are identified by index; labels are
/// cosmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table. `table[g][h]` is the index of `g*h`.
    pub fn from_table(
        name: impl Into<String>,
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Self, GroupError> {
        let n = labels.len();
        if n == 0 {
            return Err(GroupError::Malformed("group has no elements".into()));
        }
        if table.len() != n {
            return Err(GroupError::Malformed(format!(
                "table has {} rows, expected {n}",
                table.len()
            )));
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Malformed(format!(
                    "table row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(GroupError::Malformed(format!(
                    "table row {r} contains out-of-range index {bad}"
                )));
            }
        }
        if identity >= n {
            return Err(GroupError::Malformed(format!(
                "identity index {identity} out of range"
            )));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(GroupError::Malformed("element labels are not unique".into()));
        }

        for (r, row) in table.iter().enumerate() {
            if !is_permutation(row.iter().copied(), n) {
                return Err(GroupError::NotLatinSquare { axis: Axis::Row, index: r, order: n });
            }
        }
        for c in 0..n {
            if !is_permutation(table.iter().map(|row| row[c]), n) {
                return Err(GroupError::NotLatinSquare { axis: Axis::Column, index: c, order: n });
            }
        }
        if let Some(w) = (0..n).find(|&g| table[identity][g] != g || table[g][identity] != g) {
            return Err(GroupError::NoIdentity { candidate: identity, witness: w });
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NonAssociative { a, b, c });
                    }
                }
            }
        }
        // Latin rows guarantee exactly one solution of g*h = e per g.
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).expect("latin row"))
            .collect();
        Ok(Self { name: name.into(), labels, table, identity, inverses })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self, GroupError> {
        if spec.order != spec.elements.len() {
            return Err(GroupError::Malformed(format!(
                "order {} disagrees with {} element labels",
                spec.order,
                spec.elements.len()
            )));
        }
        Self::from_table(spec.name.clone(), spec.elements.clone(), spec.table.clone(), spec.identity)
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        let spec: GroupSpec =
            serde_json::from_str(text).map_err(|e| GroupError::Malformed(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            name: self.name.clone(),
            order: self.order(),
            elements: self.labels.clone(),
            identity: self.identity,
            table: self.table.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    /// `h g h^-1`
    #[inline]
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Product of a word of elements, left to right.
    pub fn product(&self, word: &[usize]) -> usize {
        word.iter().fold(self.identity, |acc, &g| self.mul(acc, g))
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        set.contains(&self.identity)
            && set.iter().all(|&a| {
                set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b)))
            })
    }

    pub fn is_normal_subgroup(&self, subset: &[usize]) -> bool {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        self.is_subgroup(subset)
            && set
                .iter()
                .all(|&a| self.elements().all(|h| set.contains(&self.conjugate(a, h))))
    }

    pub fn conjugacy_structure(&self) -> ConjugacyStructure {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let orbit: BTreeSet<usize> = self.elements().map(|h| self.conjugate(g, h)).collect();
            let id = classes.len();
            for &x in &orbit {
                class_of[x] = id;
            }
            classes.push(orbit.into_iter().collect::<Vec<_>>());
        }
        let center = self
            .elements()
            .filter(|&g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
            .collect();
        ConjugacyStructure { classes, center, class_of }
    }

    /// `C = { h : D(hf) = D(fh) for all f }` for the given irrep.
    pub fn centralizing_subgroup<T: Real>(&self, irrep: &Irrep<T>) -> Result<Vec<usize>, RepError> {
        irrep.check(self)?;
        let tol = T::validation_tol();
        Ok(self
            .elements()
            .filter(|&h| {
                self.elements().all(|f| {
                    let lhs = irrep.matrix(self.mul(h, f));
                    let rhs = irrep.matrix(self.mul(f, h));
                    crate::linalg::max_abs_diff(lhs, rhs) < tol
                })
            })
            .collect())
    }
}

fn is_permutation(it: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in it {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
        count += 1;
    }
    count == n
}

/// Conjugacy classes and center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyStructure {
    pub classes: Vec<Vec<usize>>,
    pub center: Vec<usize>,
    pub class_of: Vec<usize>,
}

impl ConjugacyStructure {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}
