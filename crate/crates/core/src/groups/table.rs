use std::collections::HashMap;

use crate::error::{Error, Result};

/// A finite group given by its full multiplication table.
///
/// Elements are the indices `0..order`; `names` carries the human-facing label
/// of every index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    identity: u32,
    names: Vec<String>,
}

/// Triples beyond this count are sampled rather than enumerated when checking
/// associativity of a table.
pub(crate) const EXHAUSTIVE_TRIPLES: usize = 2_000_000;

impl CayleyTable {
    /// Validates a raw table: square shape, entries in range, every row and
    /// column a bijection, a two-sided identity, inverses, associativity.
    pub fn new(names: Vec<String>, rows: Vec<Vec<usize>>, identity: Option<usize>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::GroupAxiom("empty element list".into()));
        }
        if rows.len() != n {
            return Err(Error::GroupAxiom(format!(
                "table has {} rows but {} elements",
                rows.len(),
                n
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::GroupAxiom(format!("row {} has length {} (not square)", names[i], row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n {
                    return Err(Error::GroupAxiom(format!("entry {x} out of range in row {}", names[i])));
                }
                if seen[x] {
                    return Err(Error::GroupAxiom(format!("row {} not a bijection", names[i])));
                }
                seen[x] = true;
                table.push(x as u32);
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for i in 0..n {
                let x = table[i * n + j] as usize;
                if seen[x] {
                    return Err(Error::GroupAxiom(format!(
                        "row {} not a bijection: it repeats an earlier row in column {}",
                        names[i], names[j]
                    )));
                }
                seen[x] = true;
            }
        }
        let is_identity = |e: usize| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x);
        let identity = match identity {
            Some(e) if e < n && is_identity(e) => e,
            Some(e) => {
                return Err(Error::GroupAxiom(format!(
                    "designated identity {} is not a two-sided identity",
                    names.get(e).cloned().unwrap_or_else(|| e.to_string())
                )))
            }
            None => (0..n)
                .find(|&e| is_identity(e))
                .ok_or_else(|| Error::GroupAxiom("no identity row/column".into()))?,
        };
        let mut inverse = vec![0u32; n];
        for a in 0..n {
            // rows are bijections, so a right inverse exists; it must also be a left inverse
            let b = (0..n).find(|&b| table[a * n + b] as usize == identity).unwrap();
            if table[b * n + a] as usize != identity {
                return Err(Error::GroupAxiom(format!("element {} has no two-sided inverse", names[a])));
            }
            inverse[a] = b as u32;
        }
        let t = CayleyTable {
            order: n,
            table,
            inverse,
            identity: identity as u32,
            names,
        };
        t.check_associativity()?;
        Ok(t)
    }

    /// Table of the group generated by permutations `gens` of `0..degree`,
    /// with composition `(p*q)(x) = p(q(x))`. Returns the table and the list
    /// of permutations in index order (index 0 is the identity).
    pub(crate) fn closure(degree: usize, gens: &[Vec<u32>]) -> (Self, Vec<Vec<u32>>, Vec<Vec<usize>>) {
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut perms = vec![id.clone()];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut head = 0;
        while head < perms.len() {
            for (gi, g) in gens.iter().enumerate() {
                let p = compose(&perms[head], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), perms.len());
                    let mut w = words[head].clone();
                    w.push(gi);
                    words.push(w);
                    perms.push(p);
                }
            }
            head += 1;
        }
        let n = perms.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &perms {
            for b in &perms {
                table.push(index[&compose(a, b)] as u32);
            }
        }
        let mut inverse = vec![0u32; n];
        for (i, p) in perms.iter().enumerate() {
            let mut inv = vec![0u32; degree];
            for (x, &y) in p.iter().enumerate() {
                inv[y as usize] = x as u32;
            }
            inverse[i] = index[&inv] as u32;
        }
        let t = CayleyTable {
            order: n,
            table,
            inverse,
            identity: 0,
            names: (0..n).map(|i| i.to_string()).collect(),
        };
        (t, perms, words)
    }

    pub(crate) fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.order);
        self.names = names;
        self
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order;
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            let ab_c = self.mul(self.mul(a as u32, b as u32), c as u32);
            let a_bc = self.mul(a as u32, self.mul(b as u32, c as u32));
            if ab_c != a_bc {
                return Err(Error::GroupAxiom(format!(
                    "associativity fails at ({}, {}, {})",
                    self.names[a], self.names[b], self.names[c]
                )));
            }
            Ok(())
        };
        if n.saturating_mul(n).saturating_mul(n) <= EXHAUSTIVE_TRIPLES {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            // deterministic pseudo-random triples
            let mut x: u64 = 0x9E37_79B9_7F4A_7C15;
            for _ in 0..20_000 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let a = (x % n as u64) as usize;
                let b = ((x >> 21) % n as u64) as usize;
                let c = ((x >> 42) % n as u64) as usize;
                check(a, b, c)?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self, a: u32) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of_name(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|s| s == name).map(|i| i as u32)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order as u32;
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Rows of the table as index lists.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.order)
            .map(|r| r.iter().map(|&x| x as usize).collect())
            .collect()
    }
}

pub(crate) fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    q.iter().map(|&x| p[x as usize]).collect()
}
