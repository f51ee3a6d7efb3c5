//! Cochains `C^k(G; Q) = Hom(C_k, Q)` and the Kronecker pairing.
//!
//! A cochain is either an explicit finitely supported table or a lazy
//! function of the tuple. Lazy cochains exist because the interesting
//! cocycles on infinite groups (and products of cochains on large finite
//! ones) are not finitely supported; all they are ever asked for is their
//! value on the support of some chain.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::chain::{faces, Chain, Tuple};
use crate::error::{Error, Result};
use crate::groups::{Element, Group, Homomorphism};
use crate::homology::all_tuples;
use crate::rational::{self, Q};

/// Largest number of tuples a cochain is materialized over.
pub const MATERIALIZE_CAP: u128 = 100_000;

type Eval = Arc<dyn Fn(&[Element]) -> Q + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Table(BTreeMap<Tuple, Q>),
    Lazy(Eval),
}

#[derive(Clone)]
pub struct Cochain {
    group: Group,
    degree: usize,
    repr: Repr,
}

impl Cochain {
    /// Explicit table; tuples not listed evaluate to zero.
    pub fn from_table<I>(group: &Group, degree: usize, values: I) -> Result<Cochain>
    where
        I: IntoIterator<Item = (Tuple, Q)>,
    {
        let mut map = BTreeMap::new();
        for (t, v) in values {
            if t.len() != degree {
                return Err(Error::Degree(format!("tuple of length {} in a degree-{degree} cochain", t.len())));
            }
            if let Some(bad) = t.iter().find(|x| !group.contains(x)) {
                return Err(Error::NotAMember {
                    element: format!("{bad:?}"),
                    group: group.label(),
                });
            }
            if !v.is_zero() {
                map.insert(t, v);
            }
        }
        Ok(Cochain {
            group: group.clone(),
            degree,
            repr: Repr::Table(map),
        })
    }

    pub fn from_fn<F>(group: &Group, degree: usize, f: F) -> Cochain
    where
        F: Fn(&[Element]) -> Q + Send + Sync + 'static,
    {
        Cochain {
            group: group.clone(),
            degree,
            repr: Repr::Lazy(Arc::new(f)),
        }
    }

    pub fn zero(group: &Group, degree: usize) -> Cochain {
        Cochain {
            group: group.clone(),
            degree,
            repr: Repr::Table(BTreeMap::new()),
        }
    }

    /// Random table on a finite group with integer values in `[-3, 3]`.
    pub fn random_table<R: Rng + ?Sized>(group: &Group, degree: usize, rng: &mut R) -> Result<Cochain> {
        let tuples = all_tuples(group, degree, MATERIALIZE_CAP)?;
        let values = tuples.into_iter().map(|t| (t, rational::q(rng.gen_range(-3i64..=3))));
        Cochain::from_table(group, degree, values)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.repr, Repr::Lazy(_))
    }

    pub fn eval(&self, t: &[Element]) -> Q {
        debug_assert_eq!(t.len(), self.degree);
        match &self.repr {
            Repr::Table(m) => m.get(t).cloned().unwrap_or_else(Q::zero),
            Repr::Lazy(f) => f(t),
        }
    }

    /// `⟨f, c⟩ = Σ c_t f(t)`.
    pub fn pair(&self, c: &Chain) -> Result<Q> {
        if *c.group() != self.group {
            return Err(Error::OracleMismatch(format!(
                "pairing a cochain over {} with a chain over {}",
                self.group.label(),
                c.group().label()
            )));
        }
        if c.degree() != self.degree {
            return Err(Error::Degree(format!(
                "pairing a degree-{} cochain with a degree-{} chain",
                self.degree,
                c.degree()
            )));
        }
        Ok(c.terms().fold(Q::zero(), |acc, (t, q)| acc + q * self.eval(t)))
    }

    /// `δf = f ∘ ∂`. Tables over small finite groups stay tables; everything
    /// else becomes lazy.
    pub fn coboundary(&self) -> Cochain {
        let group = self.group.clone();
        let f = self.clone();
        let lazy = Cochain::from_fn(&self.group, self.degree + 1, move |t| {
            faces(&group, t).into_iter().fold(Q::zero(), |acc, (face, s)| {
                let v = f.eval(&face);
                if s > 0 {
                    acc + v
                } else {
                    acc - v
                }
            })
        });
        if !self.is_lazy() {
            if let Ok(m) = lazy.materialize() {
                return m;
            }
        }
        lazy
    }

    /// Tabulates the cochain over all of `G^k`. Only finite groups under
    /// the size cap qualify.
    pub fn materialize(&self) -> Result<Cochain> {
        if !self.group.is_finite() {
            return Err(Error::NotFinite(format!(
                "cannot tabulate a cochain over {}; evaluate it on chains instead",
                self.group.label()
            )));
        }
        let tuples = all_tuples(&self.group, self.degree, MATERIALIZE_CAP)?;
        let values: Vec<(Tuple, Q)> = tuples.into_iter().map(|t| {
            let v = self.eval(&t);
            (t, v)
        }).collect();
        Cochain::from_table(&self.group, self.degree, values)
    }

    /// Whether the cochain vanishes on every tuple (finite groups only).
    pub fn is_zero(&self) -> Result<bool> {
        match &self.repr {
            Repr::Table(m) => Ok(m.is_empty()),
            Repr::Lazy(_) => Ok(match self.materialize()?.repr {
                Repr::Table(m) => m.is_empty(),
                Repr::Lazy(_) => unreachable!(),
            }),
        }
    }

    /// `sup |f(t)|` over all tuples. Tables report the largest stored value;
    /// lazy cochains need a finite group.
    pub fn sup_norm(&self) -> Result<Q> {
        match &self.repr {
            Repr::Table(m) => Ok(m.values().map(|v| v.abs()).max().unwrap_or_else(Q::zero)),
            Repr::Lazy(_) => self.materialize()?.sup_norm(),
        }
    }

    /// `max |f(t)|` over the support of `c`; a lower bound for the sup-norm.
    pub fn sup_on(&self, c: &Chain) -> Q {
        c.support().map(|t| self.eval(t).abs()).max().unwrap_or_else(Q::zero)
    }

    /// `h^* f = f ∘ h`, for `h: K → G`.
    pub fn pullback(&self, h: &Homomorphism) -> Result<Cochain> {
        if *h.target() != self.group {
            return Err(Error::OracleMismatch("pullback along a map with the wrong target".into()));
        }
        let f = self.clone();
        let h2 = h.clone();
        Ok(Cochain::from_fn(h.source(), self.degree, move |t| {
            let image: Tuple = t.iter().map(|x| h2.apply(x)).collect();
            f.eval(&image)
        }))
    }

    pub fn plus(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, rational::one())
    }

    pub fn minus(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, -rational::one())
    }

    fn combine(&self, other: &Cochain, s: Q) -> Result<Cochain> {
        if self.group != other.group || self.degree != other.degree {
            return Err(Error::OracleMismatch("adding cochains of different shape".into()));
        }
        if let (Repr::Table(a), Repr::Table(b)) = (&self.repr, &other.repr) {
            let mut m = a.clone();
            for (t, v) in b {
                let e = m.entry(t.clone()).or_insert_with(Q::zero);
                *e += v * &s;
            }
            return Cochain::from_table(&self.group, self.degree, m);
        }
        let (f, g) = (self.clone(), other.clone());
        Ok(Cochain::from_fn(&self.group, self.degree, move |t| f.eval(t) + &s * g.eval(t)))
    }

    pub fn scale(&self, q: &Q) -> Cochain {
        let f = self.clone();
        let q = q.clone();
        match &self.repr {
            Repr::Table(m) => Cochain::from_table(&self.group, self.degree, m.iter().map(|(t, v)| (t.clone(), v * &q)))
                .expect("scaling keeps a valid table"),
            Repr::Lazy(_) => Cochain::from_fn(&self.group, self.degree, move |t| &q * f.eval(t)),
        }
    }

    /// The stored table, if there is one.
    pub fn table(&self) -> Option<&BTreeMap<Tuple, Q>> {
        match &self.repr {
            Repr::Table(m) => Some(m),
            Repr::Lazy(_) => None,
        }
    }
}

/// The Kronecker pairing `⟨f, c⟩`.
pub fn kronecker(f: &Cochain, c: &Chain) -> Result<Q> {
    f.pair(c)
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Table(m) => write!(f, "Cochain[deg {}; {} values]", self.degree, m.len()),
            Repr::Lazy(_) => write!(f, "Cochain[deg {}; lazy]", self.degree),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use rand::SeedableRng;

    #[test]
    fn coboundary_is_adjoint_to_boundary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Group::symmetric(3);
        for k in 0..3 {
            let f = Cochain::random_table(&g, k, &mut rng).unwrap();
            let df = f.coboundary();
            assert!(!df.is_lazy());
            for _ in 0..20 {
                let c = Chain::random(&g, k + 1, 5, 0, &mut rng);
                assert_eq!(df.pair(&c).unwrap(), f.pair(&c.boundary().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn coboundary_squares_to_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let g = Group::symmetric(3);
        for k in 0..2 {
            let f = Cochain::random_table(&g, k, &mut rng).unwrap();
            assert!(f.coboundary().coboundary().is_zero().unwrap());
        }
    }

    #[test]
    fn lazy_cochains_on_free_groups() {
        // f(w) = exponent sum of a: a homomorphism F_2 -> Z, hence a 1-cocycle
        let g = Group::free(2);
        let f = Cochain::from_fn(&g, 1, |t| {
            q(t[0].word().iter().map(|&l| match l {
                1 => 1,
                -1 => -1,
                _ => 0,
            }).sum())
        });
        let df = f.coboundary();
        assert!(df.is_lazy());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let c = Chain::random(&g, 2, 4, 3, &mut rng);
            assert_eq!(df.pair(&c).unwrap(), q(0));
        }
        assert!(f.materialize().is_err());
        assert!(f.sup_norm().is_err());
    }

    #[test]
    fn pairing_checks_degree_and_group() {
        let g = Group::cyclic(2);
        let f = Cochain::zero(&g, 1);
        assert!(f.pair(&Chain::zero(&g, 2)).is_err());
        assert!(f.pair(&Chain::zero(&Group::cyclic(3), 1)).is_err());
    }
}
