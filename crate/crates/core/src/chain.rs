//! Chains of the unnormalized bar complex `C_k(G; Q)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::groups::{Element, Group, Homomorphism};
use crate::rational::{self, Q};

/// A basis tuple `(g_1, …, g_k)`.
pub type Tuple = Vec<Element>;

/// A finitely supported rational combination of `k`-tuples.
///
/// No stored coefficient is zero, and terms are kept in lexicographic tuple
/// order so that every derived artifact is deterministic.
#[derive(Clone, PartialEq)]
pub struct Chain {
    group: Group,
    degree: usize,
    terms: BTreeMap<Tuple, Q>,
}

impl Chain {
    pub fn zero(group: &Group, degree: usize) -> Chain {
        Chain {
            group: group.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The basis chain `1·t`.
    pub fn basis(group: &Group, tuple: Tuple) -> Chain {
        let mut c = Chain::zero(group, tuple.len());
        c.add_term(tuple, rational::one());
        c
    }

    /// Validated constructor: every tuple must have length `degree` and
    /// consist of elements of `group`.
    pub fn from_terms<I>(group: &Group, degree: usize, terms: I) -> Result<Chain>
    where
        I: IntoIterator<Item = (Tuple, Q)>,
    {
        let mut c = Chain::zero(group, degree);
        for (t, q) in terms {
            if t.len() != degree {
                return Err(Error::Degree(format!("tuple of length {} in a degree-{degree} chain", t.len())));
            }
            if let Some(bad) = t.iter().find(|x| !group.contains(x)) {
                return Err(Error::NotAMember {
                    element: format!("{bad:?}"),
                    group: group.label(),
                });
            }
            c.add_term(t, q);
        }
        Ok(c)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tuple, &Q)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Tuple> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &[Element]) -> Q {
        self.terms.get(t).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `q·t`, combining with an existing term and dropping zeros.
    pub fn add_term(&mut self, t: Tuple, q: Q) {
        debug_assert_eq!(t.len(), self.degree);
        if q.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn check_compatible(&self, other: &Chain) -> Result<()> {
        if self.group != other.group {
            return Err(Error::OracleMismatch(format!(
                "chains over {} and {}",
                self.group.label(),
                other.group.label()
            )));
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "chains of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// `self += q·other`.
    pub fn add_scaled(&mut self, other: &Chain, q: &Q) -> Result<()> {
        self.check_compatible(other)?;
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * q);
        }
        Ok(())
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        out.add_scaled(other, &rational::one())?;
        Ok(out)
    }

    pub fn minus(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        out.add_scaled(other, &-rational::one())?;
        Ok(out)
    }

    pub fn scale(&self, q: &Q) -> Chain {
        let mut out = Chain::zero(&self.group, self.degree);
        if !q.is_zero() {
            for (t, c) in &self.terms {
                out.terms.insert(t.clone(), c * q);
            }
        }
        out
    }

    pub fn neg(&self) -> Chain {
        self.scale(&-rational::one())
    }

    /// `Σ |coefficients|`.
    pub fn l1_norm(&self) -> Q {
        self.terms.values().fold(Q::zero(), |acc, c| acc + c.abs())
    }

    /// The bar boundary
    /// `(g_1,…,g_k) ↦ (g_2,…,g_k) + Σ_{j=1}^{k-1} (-1)^j (…, g_j g_{j+1}, …) + (-1)^k (g_1,…,g_{k-1})`.
    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::Degree("boundary of a degree-0 chain".into()));
        }
        let mut out = Chain::zero(&self.group, self.degree - 1);
        for (t, c) in &self.terms {
            for (face, sign) in faces(&self.group, t) {
                out.add_term(face, if sign > 0 { c.clone() } else { -c.clone() });
            }
        }
        Ok(out)
    }

    /// Pushforward along a homomorphism, applied entrywise to tuples.
    pub fn push(&self, h: &Homomorphism) -> Result<Chain> {
        if *h.source() != self.group {
            return Err(Error::OracleMismatch(format!(
                "pushing a chain over {} along a map from {}",
                self.group.label(),
                h.source().label()
            )));
        }
        let mut out = Chain::zero(h.target(), self.degree);
        for (t, c) in &self.terms {
            out.add_term(t.iter().map(|x| h.apply(x)).collect(), c.clone());
        }
        Ok(out)
    }

    /// Same tuples and coefficients, reinterpreted over an equal oracle.
    pub fn rebase(&self, group: &Group) -> Result<Chain> {
        if *group != self.group {
            return Err(Error::OracleMismatch("rebase onto a different group".into()));
        }
        Ok(Chain {
            group: group.clone(),
            degree: self.degree,
            terms: self.terms.clone(),
        })
    }

    /// Random chain with up to `max_terms` terms and integer coefficients in
    /// `[-3, 3]`; infinite groups draw entries of word length ≤ `radius`.
    pub fn random<R: Rng + ?Sized>(group: &Group, degree: usize, max_terms: usize, radius: usize, rng: &mut R) -> Chain {
        let mut c = Chain::zero(group, degree);
        let n = rng.gen_range(1..=max_terms.max(1));
        for _ in 0..n {
            let t: Tuple = (0..degree).map(|_| group.random_element(rng, radius)).collect();
            let q = rng.gen_range(-3i64..=3);
            c.add_term(t, rational::q(q));
        }
        c
    }

    pub fn display(&self) -> String {
        self.to_string()
    }
}

/// The `k+1` signed faces of a basis tuple.
pub fn faces(group: &Group, t: &[Element]) -> Vec<(Tuple, i32)> {
    let k = t.len();
    let mut out = Vec::with_capacity(k + 1);
    out.push((t[1..].to_vec(), 1));
    for j in 1..k {
        let mut f = Vec::with_capacity(k - 1);
        f.extend_from_slice(&t[..j - 1]);
        f.push(group.mul(&t[j - 1], &t[j]));
        f.extend_from_slice(&t[j + 1..]);
        out.push((f, if j % 2 == 0 { 1 } else { -1 }));
    }
    out.push((t[..k - 1].to_vec(), if k % 2 == 0 { 1 } else { -1 }));
    out
}

pub fn tuple_name(group: &Group, t: &[Element]) -> String {
    format!("({})", t.iter().map(|x| group.name_of(x)).collect::<Vec<_>>().join(","))
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let name = tuple_name(&self.group, t);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == rational::one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}·{name}", rational::render(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chain[deg {}]({})", self.degree, self)
    }
}
