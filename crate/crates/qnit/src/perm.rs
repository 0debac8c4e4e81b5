//! Permutations of the state set `{1, ..., N}` and cycle-notation parsing.
//!
//! Relabeling the product states by a permutation is exactly the column
//! permutation that generates new nit-operator sets, so permutations show up
//! both as enumeration machinery and as user input (in cycle notation such
//! as `(1)(2,5,6,7,3,9,8,4)`).

use std::fmt;

use crate::error::{Error, Result};
use crate::partitions::StateIndex;

/// A bijection on the 1-based state set `{1, ..., N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// `images[i - 1]` is the image of state `i`.
    images: Vec<StateIndex>,
}

impl Permutation {
    /// The identity permutation on `n` states.
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as StateIndex).collect(),
        }
    }

    /// Builds a permutation from its image list (`images[i - 1]` = image of
    /// state `i`), rejecting anything that is not a bijection on `1..=N`.
    pub fn from_images(images: Vec<StateIndex>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img < 1 || img as usize > n {
                return Err(Error::InvalidParameter(format!(
                    "permutation image {img} out of range 1..={n}"
                )));
            }
            if seen[img as usize - 1] {
                return Err(Error::InvalidParameter(format!(
                    "permutation image {img} repeated; not a bijection"
                )));
            }
            seen[img as usize - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Parses parenthesized cycle notation over `1..=n`.
    ///
    /// Fixed points may be written as singleton cycles or omitted entirely;
    /// whitespace around numbers, commas and cycles is ignored. The empty
    /// string denotes the identity.
    pub fn from_cycles(text: &str, n: usize) -> Result<Self> {
        let mut images: Vec<StateIndex> = (1..=n as StateIndex).collect();
        let mut used = vec![false; n];

        let mut rest = text.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(Error::CycleNotation(format!("expected '(' at \"{rest}\"")));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::CycleNotation("unbalanced '(': missing ')'".into()))?;
            let body = &rest[1..close];
            rest = rest[close + 1..].trim_start();

            let mut cycle = Vec::new();
            for item in body.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    return Err(Error::CycleNotation(format!(
                        "empty element in cycle \"({body})\""
                    )));
                }
                let value: StateIndex = item
                    .parse()
                    .map_err(|_| Error::CycleNotation(format!("\"{item}\" is not an integer")))?;
                if value < 1 || value as usize > n {
                    return Err(Error::CycleNotation(format!(
                        "element {value} out of range 1..={n}"
                    )));
                }
                if used[value as usize - 1] {
                    return Err(Error::CycleNotation(format!(
                        "element {value} appears twice"
                    )));
                }
                used[value as usize - 1] = true;
                cycle.push(value);
            }
            for (pos, &v) in cycle.iter().enumerate() {
                let next = cycle[(pos + 1) % cycle.len()];
                images[v as usize - 1] = next;
            }
        }
        Ok(Permutation { images })
    }

    /// Number of states acted on.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    /// True when acting on zero states (never produced by the constructors
    /// used in practice, but kept for completeness).
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of state `s`.
    ///
    /// # Panics
    /// Panics if `s` is outside `1..=len()`.
    pub fn apply(&self, s: StateIndex) -> StateIndex {
        self.images[s as usize - 1]
    }

    /// The raw image list (`images[i - 1]` = image of state `i`).
    pub fn images(&self) -> &[StateIndex] {
        &self.images
    }

    /// Cycle decomposition, each cycle starting at its smallest element,
    /// cycles ordered by smallest element. Fixed points are kept as
    /// singleton cycles, matching the customary written form.
    pub fn cycles(&self) -> Vec<Vec<StateIndex>> {
        let n = self.images.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n as StateIndex {
            if visited[start as usize - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !visited[cur as usize - 1] {
                visited[cur as usize - 1] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            cycles.push(cycle);
        }
        cycles
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
