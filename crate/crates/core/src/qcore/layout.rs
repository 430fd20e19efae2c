use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Who a tensor factor belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    Alice,
    Bob,
    /// Travels between the parties; the current holder is tracked by the protocol.
    Message,
    /// Bob's data-bit registers.
    BobInput,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub dim: usize,
    pub owner: Owner,
}

impl Factor {
    pub fn new(name: impl Into<String>, dim: usize, owner: Owner) -> Self {
        Factor { name: name.into(), dim, owner }
    }
}

/// Ordered tensor factors. Factor order is tensor order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    factors: Vec<Factor>,
}

/// Maps every basis index of a full space onto the (subsystem, rest) pair of
/// indices for a chosen set of factors.
#[derive(Clone, Debug)]
pub struct Bipartition {
    pub sub: Vec<usize>,
    pub rest: Vec<usize>,
    pub sub_dim: usize,
    pub rest_dim: usize,
}

impl RegisterLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Layout("layout has no factors".into()));
        }
        let mut seen = HashSet::new();
        for f in &factors {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::Layout(format!("duplicate factor name {:?}", f.name)));
            }
            if f.dim < 2 {
                return Err(Error::Layout(format!(
                    "factor {:?} has dimension {}; factors need dimension >= 2",
                    f.name, f.dim
                )));
            }
        }
        Ok(RegisterLayout { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn names(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::Layout(format!("no factor named {name:?}")))
    }

    /// Positions of the named factors, sorted into layout order.
    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut idx = names
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        let before = idx.len();
        idx.dedup();
        if idx.len() != before {
            return Err(Error::Layout("factor listed twice".into()));
        }
        Ok(idx)
    }

    pub fn indices_where(&self, pred: impl Fn(&Factor) -> bool) -> Vec<usize> {
        (0..self.factors.len()).filter(|&i| pred(&self.factors[i])).collect()
    }

    pub fn names_at(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.factors[i].name.clone()).collect()
    }

    pub fn dim_of(&self, idx: &[usize]) -> usize {
        idx.iter().map(|&i| self.factors[i].dim).product()
    }

    /// Layout restricted to the given factor positions (kept in order).
    pub fn restrict(&self, idx: &[usize]) -> Result<RegisterLayout> {
        RegisterLayout::new(idx.iter().map(|&i| self.factors[i].clone()).collect())
    }

    /// Basis index → per-factor digits, leftmost factor most significant.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = index % f.dim;
            index /= f.dim;
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&d, f)| acc * f.dim + d)
    }

    /// Index maps for splitting the space into `idx` (must be sorted, in
    /// layout order) and the remaining factors.
    pub fn bipartition(&self, idx: &[usize]) -> Bipartition {
        let total = self.total_dim();
        let in_sub: Vec<bool> = (0..self.len()).map(|k| idx.contains(&k)).collect();
        let mut sub = Vec::with_capacity(total);
        let mut rest = Vec::with_capacity(total);
        for i in 0..total {
            let d = self.digits(i);
            let (mut s, mut r) = (0, 0);
            for (k, f) in self.factors.iter().enumerate() {
                if in_sub[k] {
                    s = s * f.dim + d[k];
                } else {
                    r = r * f.dim + d[k];
                }
            }
            sub.push(s);
            rest.push(r);
        }
        Bipartition { sub, rest, sub_dim: self.dim_of(idx), rest_dim: total / self.dim_of(idx) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubits(n: usize) -> RegisterLayout {
        RegisterLayout::new((0..n).map(|k| Factor::new(format!("q{k}"), 2, Owner::Alice)).collect())
            .unwrap()
    }

    #[test]
    fn rejects_duplicates_and_trivial_dims() {
        let dup = vec![Factor::new("a", 2, Owner::Alice), Factor::new("a", 3, Owner::Bob)];
        assert!(matches!(RegisterLayout::new(dup), Err(Error::Layout(_))));
        let one = vec![Factor::new("a", 1, Owner::Alice)];
        assert!(matches!(RegisterLayout::new(one), Err(Error::Layout(_))));
    }

    #[test]
    fn digits_are_big_endian() {
        let l = RegisterLayout::new(vec![
            Factor::new("a", 3, Owner::Alice),
            Factor::new("b", 2, Owner::Bob),
        ])
        .unwrap();
        assert_eq!(l.digits(5), vec![2, 1]);
        assert_eq!(l.flat_index(&[1, 0]), 2);
        for i in 0..6 {
            assert_eq!(l.flat_index(&l.digits(i)), i);
        }
    }

    #[test]
    fn bipartition_of_middle_factor() {
        let l = qubits(3);
        let b = l.bipartition(&[1]);
        // |q0 q1 q2> = |1 0 1> is index 5; middle digit 0, rest digits (1,1) = 3.
        assert_eq!(b.sub[5], 0);
        assert_eq!(b.rest[5], 3);
        assert_eq!(b.sub_dim, 2);
        assert_eq!(b.rest_dim, 4);
    }
}
