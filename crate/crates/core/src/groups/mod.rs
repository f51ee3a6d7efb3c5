//! Group oracles: finite tables, permutation groups, free groups, direct and
//! free products, and semidirect products with an explicit automorphism
//! action.
//!
//! A [`Group`] is an immutable, cheaply clonable handle. Elements are plain
//! [`Element`] values whose meaning is fixed by the group they were produced
//! in; the group never mutates after construction.

mod hom;
mod spec;
mod table;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

pub use hom::{HomSpec, Homomorphism};
pub use spec::{AutomorphismSpec, GroupSpec, ProductOp, TableEntry};
pub use table::CayleyTable;

use table::{compose, EXHAUSTIVE_TRIPLES};

/// An element handle.
///
/// * `Index`: position in a finite table (finite and permutation backends),
/// * `Word`: fully reduced free-group word; letter `i+1` is generator `i`,
///   `-(i+1)` its inverse,
/// * `Tuple`: components of a direct product, or `(base, acting)` for a
///   semidirect product,
/// * `Syllables`: free-product normal form: alternating factors, every
///   syllable nontrivial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Index(u32),
    Word(Vec<i32>),
    Tuple(Vec<Element>),
    Syllables(Vec<(u32, Element)>),
}

impl Element {
    pub fn index(&self) -> u32 {
        match self {
            Element::Index(i) => *i,
            other => panic!("expected a table element, got {other:?}"),
        }
    }

    pub fn word(&self) -> &[i32] {
        match self {
            Element::Word(w) => w,
            other => panic!("expected a free-group word, got {other:?}"),
        }
    }

    pub fn components(&self) -> &[Element] {
        match self {
            Element::Tuple(c) => c,
            other => panic!("expected a product element, got {other:?}"),
        }
    }

    pub fn syllables(&self) -> &[(u32, Element)] {
        match self {
            Element::Syllables(s) => s,
            other => panic!("expected a free-product element, got {other:?}"),
        }
    }

    pub fn pair(a: Element, b: Element) -> Element {
        Element::Tuple(vec![a, b])
    }
}

#[derive(Debug, PartialEq)]
enum Backend {
    Table(CayleyTable),
    Perm {
        degree: usize,
        perms: Vec<Vec<u32>>,
        table: CayleyTable,
    },
    Free {
        rank: usize,
    },
    Direct(Vec<Group>),
    FreeProduct(Vec<Group>),
    Semidirect {
        base: Group,
        /// acting group; its element `k` acts on base indices by `automorphisms[k]`
        acting: CayleyTable,
        automorphisms: Vec<Vec<u32>>,
        generator_names: Vec<String>,
    },
}

struct Inner {
    backend: Backend,
    spec: GroupSpec,
    identity: Element,
    elements: Option<Vec<Element>>,
    index: Option<HashMap<Element, usize>>,
}

/// A group oracle.
#[derive(Clone)]
pub struct Group {
    inner: Arc<Inner>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.backend == other.inner.backend
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.label())
    }
}

impl Group {
    fn build(backend: Backend, spec: GroupSpec) -> Group {
        let identity = match &backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => Element::Index(t.identity()),
            Backend::Free { .. } => Element::Word(vec![]),
            Backend::Direct(fs) => Element::Tuple(fs.iter().map(|g| g.identity()).collect()),
            Backend::FreeProduct(_) => Element::Syllables(vec![]),
            Backend::Semidirect { base, acting, .. } => {
                Element::pair(base.identity(), Element::Index(acting.identity()))
            }
        };
        let elements: Option<Vec<Element>> = match &backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => {
                Some((0..t.order() as u32).map(Element::Index).collect())
            }
            Backend::Free { rank } => (*rank == 0).then(|| vec![Element::Word(vec![])]),
            Backend::Direct(fs) => {
                let mut acc: Option<Vec<Vec<Element>>> = Some(vec![vec![]]);
                for g in fs {
                    acc = match (acc, g.elements()) {
                        (Some(prefixes), Some(es)) => Some(
                            prefixes
                                .iter()
                                .flat_map(|p| {
                                    es.iter().map(move |e| {
                                        let mut v = p.clone();
                                        v.push(e.clone());
                                        v
                                    })
                                })
                                .collect(),
                        ),
                        _ => None,
                    };
                }
                acc.map(|v| v.into_iter().map(Element::Tuple).collect())
            }
            Backend::FreeProduct(fs) => {
                let nontrivial: Vec<usize> = (0..fs.len()).filter(|&i| fs[i].order() != Some(1)).collect();
                match nontrivial.as_slice() {
                    [] => Some(vec![Element::Syllables(vec![])]),
                    [only] => fs[*only].elements().map(|es| {
                        es.iter()
                            .map(|e| {
                                if fs[*only].is_identity(e) {
                                    Element::Syllables(vec![])
                                } else {
                                    Element::Syllables(vec![(*only as u32, e.clone())])
                                }
                            })
                            .collect()
                    }),
                    _ => None,
                }
            }
            Backend::Semidirect { base, acting, .. } => {
                let bs = base.elements().expect("semidirect base is finite");
                Some(
                    bs.iter()
                        .flat_map(|n| {
                            (0..acting.order() as u32).map(move |k| Element::pair(n.clone(), Element::Index(k)))
                        })
                        .collect(),
                )
            }
        };
        let index = match (&backend, &elements) {
            (Backend::Table(_) | Backend::Perm { .. }, _) => None,
            (_, Some(es)) => Some(es.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()),
            _ => None,
        };
        Group {
            inner: Arc::new(Inner {
                backend,
                spec,
                identity,
                elements,
                index,
            }),
        }
    }

    /// Builds an oracle from a description record and runs the axiom
    /// self-check on it.
    pub fn from_spec(spec: &GroupSpec) -> Result<Group> {
        let g = match spec {
            GroupSpec::Finite {
                elements,
                table,
                identity,
            } => {
                let lookup = |e: &TableEntry| -> Result<usize> {
                    match e {
                        TableEntry::Index(i) => Ok(*i),
                        TableEntry::Name(s) => elements
                            .iter()
                            .position(|x| x == s)
                            .ok_or_else(|| Error::GroupAxiom(format!("table entry {s:?} is not an element name"))),
                    }
                };
                let mut uniq = HashSet::new();
                for e in elements {
                    if !uniq.insert(e) {
                        return Err(Error::GroupAxiom(format!("duplicate element name {e:?}")));
                    }
                }
                let rows = table
                    .iter()
                    .map(|r| r.iter().map(lookup).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let id = match identity {
                    Some(name) => Some(
                        elements
                            .iter()
                            .position(|x| x == name)
                            .ok_or_else(|| Error::GroupAxiom(format!("identity {name:?} is not an element")))?,
                    ),
                    None => None,
                };
                let t = CayleyTable::new(elements.clone(), rows, id)?;
                Group::build(Backend::Table(t), spec.clone())
            }
            GroupSpec::Perm { degree, generators } => {
                let mut gens = Vec::new();
                for (i, g) in generators.iter().enumerate() {
                    if g.len() != *degree {
                        return Err(Error::GroupAxiom(format!(
                            "generator {i} has {} images, degree is {degree}",
                            g.len()
                        )));
                    }
                    let mut seen = vec![false; *degree];
                    for &x in g {
                        if x < 0 || x as usize >= *degree || seen[x as usize] {
                            return Err(Error::GroupAxiom(format!("generator {i} is not a permutation")));
                        }
                        seen[x as usize] = true;
                    }
                    gens.push(g.iter().map(|&x| x as u32).collect::<Vec<u32>>());
                }
                let (table, perms, _) = CayleyTable::closure(*degree, &gens);
                let names = perms.iter().map(|p| cycle_notation(p)).collect();
                Group::build(
                    Backend::Perm {
                        degree: *degree,
                        perms,
                        table: table.with_names(names),
                    },
                    spec.clone(),
                )
            }
            GroupSpec::Free { rank } => {
                if *rank < 0 {
                    return Err(Error::GroupAxiom(format!("negative free rank {rank}")));
                }
                Group::build(Backend::Free { rank: *rank as usize }, spec.clone())
            }
            GroupSpec::Product { op, factors } => {
                if factors.is_empty() {
                    return Err(Error::GroupAxiom("product with no factors".into()));
                }
                let fs = factors.iter().map(Group::from_spec).collect::<Result<Vec<_>>>()?;
                match op {
                    ProductOp::Direct => Group::build(Backend::Direct(fs), spec.clone()),
                    ProductOp::Free => Group::build(Backend::FreeProduct(fs), spec.clone()),
                }
            }
            GroupSpec::Semidirect { base, action } => {
                let base = Group::from_spec(base)?;
                let mut autos = Vec::new();
                let mut names = Vec::new();
                for a in action {
                    autos.push(base.automorphism_from_names(&a.images, &a.name)?);
                    names.push(a.name.clone());
                }
                Group::semidirect_checked(base, autos, names, spec.clone())?
            }
        };
        g.check_axioms()?;
        Ok(g)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.inner.spec
    }

    /// `Z/n` as a finite table with elements named `0..n-1`.
    pub fn cyclic(n: usize) -> Group {
        assert!(n >= 1);
        let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| TableEntry::Index((a + b) % n)).collect())
            .collect();
        Group::from_spec(&GroupSpec::Finite {
            elements,
            table,
            identity: None,
        })
        .expect("cyclic table is a group")
    }

    pub fn trivial() -> Group {
        Group::cyclic(1)
    }

    /// Symmetric group on `n` points, as a permutation group generated by a
    /// transposition and an `n`-cycle.
    pub fn symmetric(n: usize) -> Group {
        assert!(n >= 1);
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Vec<i64> = (0..n as i64).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n as i64).map(|i| (i + 1) % n as i64).collect());
        }
        Group::from_spec(&GroupSpec::Perm { degree: n, generators: gens }).expect("symmetric group")
    }

    pub fn free(rank: usize) -> Group {
        Group::build(Backend::Free { rank }, GroupSpec::Free { rank: rank as i64 })
    }

    pub fn direct(factors: Vec<Group>) -> Group {
        let spec = GroupSpec::Product {
            op: ProductOp::Direct,
            factors: factors.iter().map(|g| g.spec().clone()).collect(),
        };
        Group::build(Backend::Direct(factors), spec)
    }

    pub fn free_product(factors: Vec<Group>) -> Group {
        let spec = GroupSpec::Product {
            op: ProductOp::Free,
            factors: factors.iter().map(|g| g.spec().clone()).collect(),
        };
        Group::build(Backend::FreeProduct(factors), spec)
    }

    /// `base ⋊ A` where `A` is the group of automorphisms of the finite
    /// `base` generated by `automorphisms` (each a permutation of the base
    /// enumeration). Multiplication is `(n, a)(m, b) = (n·a(m), ab)`.
    pub fn semidirect(base: Group, automorphisms: Vec<(String, Vec<u32>)>) -> Result<Group> {
        let elements = base
            .elements()
            .ok_or_else(|| Error::NotFinite("semidirect base must be finite".into()))?
            .to_vec();
        let action = automorphisms
            .iter()
            .map(|(name, perm)| AutomorphismSpec {
                name: name.clone(),
                images: perm
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (base.name_of(&elements[i]), base.name_of(&elements[j as usize])))
                    .collect(),
            })
            .collect();
        let spec = GroupSpec::Semidirect {
            base: Box::new(base.spec().clone()),
            action,
        };
        let (names, perms): (Vec<_>, Vec<_>) = automorphisms.into_iter().unzip();
        Group::semidirect_checked(base, perms, names, spec)
    }

    fn semidirect_checked(base: Group, autos: Vec<Vec<u32>>, names: Vec<String>, spec: GroupSpec) -> Result<Group> {
        let bs = base
            .elements()
            .ok_or_else(|| Error::NotFinite("semidirect base must be finite".into()))?;
        let n = bs.len();
        for (a, name) in autos.iter().zip(&names) {
            if a.len() != n {
                return Err(Error::GroupAxiom(format!("automorphism {name} has wrong length")));
            }
            let mut seen = vec![false; n];
            for &x in a {
                if x as usize >= n || seen[x as usize] {
                    return Err(Error::GroupAxiom(format!("automorphism {name} is not a bijection")));
                }
                seen[x as usize] = true;
            }
            for i in 0..n {
                for j in 0..n {
                    let ij = base.index_of(&base.mul(&bs[i], &bs[j])).unwrap();
                    let lhs = a[ij] as usize;
                    let rhs = base
                        .index_of(&base.mul(&bs[a[i] as usize], &bs[a[j] as usize]))
                        .unwrap();
                    if lhs != rhs {
                        return Err(Error::GroupAxiom(format!(
                            "action {name} is not a homomorphism at ({}, {})",
                            base.name_of(&bs[i]),
                            base.name_of(&bs[j])
                        )));
                    }
                }
            }
        }
        let (acting, perms, words) = CayleyTable::closure(n, &autos);
        let acting_names = words
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(".")
                }
            })
            .collect();
        Ok(Group::build(
            Backend::Semidirect {
                base,
                acting: acting.with_names(acting_names),
                automorphisms: perms,
                generator_names: names,
            },
            spec,
        ))
    }

    fn automorphism_from_names(&self, images: &std::collections::BTreeMap<String, String>, name: &str) -> Result<Vec<u32>> {
        let es = self
            .elements()
            .ok_or_else(|| Error::NotFinite("semidirect base must be finite".into()))?;
        let mut perm = Vec::with_capacity(es.len());
        for e in es {
            let key = self.name_of(e);
            let img = images
                .get(&key)
                .ok_or_else(|| Error::GroupAxiom(format!("automorphism {name} has no image for {key}")))?;
            let y = self.parse_element(img)?;
            perm.push(self.index_of(&y).unwrap() as u32);
        }
        Ok(perm)
    }

    /// Short human label for diagnostics.
    pub fn label(&self) -> String {
        match &self.inner.backend {
            Backend::Table(t) => format!("finite of order {}", t.order()),
            Backend::Perm { degree, table, .. } => format!("perm degree {degree} order {}", table.order()),
            Backend::Free { rank } => format!("F_{rank}"),
            Backend::Direct(fs) => fs.iter().map(|g| g.label()).collect::<Vec<_>>().join(" x "),
            Backend::FreeProduct(fs) => fs.iter().map(|g| g.label()).collect::<Vec<_>>().join(" * "),
            Backend::Semidirect { base, acting, .. } => format!("({}) x| A{}", base.label(), acting.order()),
        }
    }

    pub fn identity(&self) -> Element {
        self.inner.identity.clone()
    }

    pub fn is_identity(&self, a: &Element) -> bool {
        *a == self.inner.identity
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match &self.inner.backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => Element::Index(t.mul(a.index(), b.index())),
            Backend::Free { .. } => {
                let mut w = a.word().to_vec();
                for &x in b.word() {
                    push_letter(&mut w, x);
                }
                Element::Word(w)
            }
            Backend::Direct(fs) => Element::Tuple(
                fs.iter()
                    .zip(a.components().iter().zip(b.components()))
                    .map(|(g, (x, y))| g.mul(x, y))
                    .collect(),
            ),
            Backend::FreeProduct(fs) => {
                let mut s = a.syllables().to_vec();
                for (f, x) in b.syllables() {
                    push_syllable(fs, &mut s, *f, x.clone());
                }
                Element::Syllables(s)
            }
            Backend::Semidirect {
                base,
                acting,
                automorphisms,
                ..
            } => {
                let (n1, k1) = (&a.components()[0], a.components()[1].index());
                let (n2, k2) = (&b.components()[0], b.components()[1].index());
                let moved = base.act(&automorphisms[k1 as usize], n2);
                Element::pair(base.mul(n1, &moved), Element::Index(acting.mul(k1, k2)))
            }
        }
    }

    fn act(&self, perm: &[u32], n: &Element) -> Element {
        let es = self.elements().unwrap();
        es[perm[self.index_of(n).unwrap()] as usize].clone()
    }

    pub fn inv(&self, a: &Element) -> Element {
        match &self.inner.backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => Element::Index(t.inv(a.index())),
            Backend::Free { .. } => Element::Word(a.word().iter().rev().map(|&x| -x).collect()),
            Backend::Direct(fs) => Element::Tuple(fs.iter().zip(a.components()).map(|(g, x)| g.inv(x)).collect()),
            Backend::FreeProduct(fs) => Element::Syllables(
                a.syllables()
                    .iter()
                    .rev()
                    .map(|(f, x)| (*f, fs[*f as usize].inv(x)))
                    .collect(),
            ),
            Backend::Semidirect {
                base,
                acting,
                automorphisms,
                ..
            } => {
                let (n, k) = (&a.components()[0], a.components()[1].index());
                let kinv = acting.inv(k);
                let ninv = base.inv(n);
                Element::pair(base.act(&automorphisms[kinv as usize], &ninv), Element::Index(kinv))
            }
        }
    }

    pub fn eq(&self, a: &Element, b: &Element) -> bool {
        a == b
    }

    /// Conjugation `a^h = h·a·h⁻¹`.
    pub fn conj(&self, a: &Element, h: &Element) -> Element {
        self.mul(&self.mul(h, a), &self.inv(h))
    }

    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        self.mul(&self.mul(a, b), &self.mul(&self.inv(a), &self.inv(b)))
    }

    /// Membership test: the element has the shape and normal form this
    /// oracle produces.
    pub fn contains(&self, a: &Element) -> bool {
        match (&self.inner.backend, a) {
            (Backend::Table(t) | Backend::Perm { table: t, .. }, Element::Index(i)) => (*i as usize) < t.order(),
            (Backend::Free { rank }, Element::Word(w)) => {
                w.iter().all(|&x| x != 0 && x.unsigned_abs() as usize <= *rank) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Backend::Direct(fs), Element::Tuple(c)) => {
                c.len() == fs.len() && fs.iter().zip(c).all(|(g, x)| g.contains(x))
            }
            (Backend::FreeProduct(fs), Element::Syllables(s)) => {
                s.iter()
                    .all(|(f, x)| (*f as usize) < fs.len() && fs[*f as usize].contains(x) && !fs[*f as usize].is_identity(x))
                    && s.windows(2).all(|p| p[0].0 != p[1].0)
            }
            (Backend::Semidirect { base, acting, .. }, Element::Tuple(c)) => {
                c.len() == 2
                    && base.contains(&c[0])
                    && matches!(c[1], Element::Index(k) if (k as usize) < acting.order())
            }
            _ => false,
        }
    }

    fn check_member(&self, a: &Element) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::NotAMember {
                element: format!("{a:?}"),
                group: self.label(),
            })
        }
    }

    /// `mul` with membership validation of both arguments.
    pub fn try_mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(self.mul(a, b))
    }

    pub fn try_inv(&self, a: &Element) -> Result<Element> {
        self.check_member(a)?;
        Ok(self.inv(a))
    }

    pub fn order(&self) -> Option<usize> {
        self.inner.elements.as_ref().map(|e| e.len())
    }

    pub fn is_finite(&self) -> bool {
        self.inner.elements.is_some()
    }

    /// All elements in index order, for finite groups.
    pub fn elements(&self) -> Option<&[Element]> {
        self.inner.elements.as_deref()
    }

    pub fn index_of(&self, a: &Element) -> Option<usize> {
        match &self.inner.backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => match a {
                Element::Index(i) if (*i as usize) < t.order() => Some(*i as usize),
                _ => None,
            },
            _ => self.inner.index.as_ref().and_then(|m| m.get(a).copied()),
        }
    }

    pub fn is_abelian(&self) -> Option<bool> {
        match &self.inner.backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => Some(t.is_abelian()),
            Backend::Free { rank } => Some(*rank <= 1),
            Backend::Direct(fs) => fs.iter().map(|g| g.is_abelian()).try_fold(true, |acc, x| x.map(|b| acc && b)),
            _ => {
                let es = self.elements()?;
                Some(es.iter().all(|a| es.iter().all(|b| self.mul(a, b) == self.mul(b, a))))
            }
        }
    }

    /// Factors of a direct product.
    pub fn direct_factors(&self) -> Option<&[Group]> {
        match &self.inner.backend {
            Backend::Direct(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn free_rank(&self) -> Option<usize> {
        match &self.inner.backend {
            Backend::Free { rank } => Some(*rank),
            _ => None,
        }
    }

    /// Base group of a semidirect product.
    pub fn semidirect_base(&self) -> Option<&Group> {
        match &self.inner.backend {
            Backend::Semidirect { base, .. } => Some(base),
            _ => None,
        }
    }

    /// The acting-group element of a semidirect product named by its word in
    /// the action generators (`"1"` is the identity).
    pub fn acting_element(&self, word: &str) -> Option<Element> {
        match &self.inner.backend {
            Backend::Semidirect { base, acting, .. } => acting
                .index_of_name(word)
                .map(|k| Element::pair(base.identity(), Element::Index(k))),
            _ => None,
        }
    }

    /// A generating set.
    pub fn generators(&self) -> Vec<Element> {
        match &self.inner.backend {
            Backend::Table(t) => (0..t.order() as u32)
                .filter(|&i| i != t.identity())
                .map(Element::Index)
                .collect(),
            Backend::Perm { perms, table, .. } => {
                let GroupSpec::Perm { generators, .. } = &self.inner.spec else {
                    unreachable!()
                };
                generators
                    .iter()
                    .map(|g| {
                        let p: Vec<u32> = g.iter().map(|&x| x as u32).collect();
                        Element::Index(perms.iter().position(|q| *q == p).unwrap() as u32)
                    })
                    .filter(|e| e.index() != table.identity())
                    .collect()
            }
            Backend::Free { rank } => (1..=*rank as i32).map(|i| Element::Word(vec![i])).collect(),
            Backend::Direct(fs) => {
                let mut out = Vec::new();
                for (i, g) in fs.iter().enumerate() {
                    for x in g.generators() {
                        let mut c: Vec<Element> = fs.iter().map(|h| h.identity()).collect();
                        c[i] = x;
                        out.push(Element::Tuple(c));
                    }
                }
                out
            }
            Backend::FreeProduct(fs) => fs
                .iter()
                .enumerate()
                .flat_map(|(i, g)| g.generators().into_iter().map(move |x| Element::Syllables(vec![(i as u32, x)])))
                .collect(),
            Backend::Semidirect {
                base,
                acting,
                generator_names,
                ..
            } => {
                let mut out: Vec<Element> = base
                    .generators()
                    .into_iter()
                    .map(|n| Element::pair(n, Element::Index(acting.identity())))
                    .collect();
                for name in generator_names {
                    let k = acting.index_of_name(name).unwrap();
                    if k != acting.identity() {
                        out.push(Element::pair(base.identity(), Element::Index(k)));
                    }
                }
                out
            }
        }
    }

    /// Random element; infinite backends draw words of length at most `radius`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: usize) -> Element {
        if let Some(es) = self.elements() {
            return es[rng.gen_range(0..es.len())].clone();
        }
        match &self.inner.backend {
            Backend::Free { rank } => {
                let len = rng.gen_range(0..=radius);
                let mut w = Vec::new();
                while w.len() < len {
                    let g = rng.gen_range(1..=*rank as i32);
                    let x = if rng.gen_bool(0.5) { g } else { -g };
                    push_letter(&mut w, x);
                }
                Element::Word(w)
            }
            Backend::Direct(fs) => Element::Tuple(fs.iter().map(|g| g.random_element(rng, radius)).collect()),
            Backend::FreeProduct(fs) => {
                let mut s = Vec::new();
                let count = rng.gen_range(0..=radius);
                for _ in 0..count {
                    let f = rng.gen_range(0..fs.len());
                    let x = fs[f].random_element(rng, radius);
                    if !fs[f].is_identity(&x) {
                        push_syllable(fs, &mut s, f as u32, x);
                    }
                }
                Element::Syllables(s)
            }
            _ => unreachable!("finite backends handled above"),
        }
    }

    /// Elements of word length at most `radius` (all elements, for finite groups).
    pub fn ball(&self, radius: usize) -> Vec<Element> {
        if let Some(es) = self.elements() {
            return es.to_vec();
        }
        match &self.inner.backend {
            Backend::Free { rank } => {
                let mut out = vec![Element::Word(vec![])];
                let mut frontier: Vec<Vec<i32>> = vec![vec![]];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for g in 1..=*rank as i32 {
                            for x in [g, -g] {
                                if w.last() != Some(&-x) {
                                    let mut v = w.clone();
                                    v.push(x);
                                    next.push(v);
                                }
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(Element::Word));
                    frontier = next;
                }
                out
            }
            Backend::Direct(fs) => {
                let mut acc: Vec<Vec<Element>> = vec![vec![]];
                for g in fs {
                    let b = g.ball(radius);
                    acc = acc
                        .iter()
                        .flat_map(|p| {
                            b.iter().map(move |e| {
                                let mut v = p.clone();
                                v.push(e.clone());
                                v
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(Element::Tuple).collect()
            }
            Backend::FreeProduct(fs) => {
                let balls: Vec<Vec<Element>> = fs
                    .iter()
                    .map(|g| g.ball(radius).into_iter().filter(|x| !g.is_identity(x)).collect())
                    .collect();
                let mut out = vec![Element::Syllables(vec![])];
                let mut frontier: Vec<Vec<(u32, Element)>> = vec![vec![]];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for s in &frontier {
                        for (f, b) in balls.iter().enumerate() {
                            if s.last().map(|l| l.0) == Some(f as u32) {
                                continue;
                            }
                            for x in b {
                                let mut v = s.clone();
                                v.push((f as u32, x.clone()));
                                next.push(v);
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(Element::Syllables));
                    frontier = next;
                }
                out
            }
            _ => unreachable!(),
        }
    }

    /// Human-facing element name; inverse of [`Group::parse_element`].
    pub fn name_of(&self, a: &Element) -> String {
        match &self.inner.backend {
            Backend::Table(t) | Backend::Perm { table: t, .. } => t.name(a.index()).to_string(),
            Backend::Free { rank } => word_name(a.word(), *rank),
            Backend::Direct(fs) => format!(
                "({})",
                fs.iter()
                    .zip(a.components())
                    .map(|(g, x)| g.name_of(x))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Backend::FreeProduct(fs) => {
                let s = a.syllables();
                if s.is_empty() {
                    "1".into()
                } else {
                    s.iter()
                        .map(|(f, x)| format!("{f}:{}", fs[*f as usize].name_of(x)))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            }
            Backend::Semidirect { base, acting, .. } => {
                let c = a.components();
                format!("({};{})", base.name_of(&c[0]), acting.name(c[1].index()))
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        let bad = || Error::Parse(format!("{s:?} is not an element of {}", self.label()));
        match &self.inner.backend {
            Backend::Table(t) => t.index_of_name(s).map(Element::Index).ok_or_else(bad),
            Backend::Perm { degree, perms, .. } => {
                let p = parse_cycles(s, *degree).ok_or_else(bad)?;
                perms
                    .iter()
                    .position(|q| *q == p)
                    .map(|i| Element::Index(i as u32))
                    .ok_or_else(bad)
            }
            Backend::Free { rank } => parse_word(s, *rank).map(Element::Word).ok_or_else(bad),
            Backend::Direct(fs) => {
                let inner = strip_parens(s).ok_or_else(bad)?;
                let parts = split_top(inner, ',');
                if parts.len() != fs.len() {
                    return Err(bad());
                }
                Ok(Element::Tuple(
                    fs.iter().zip(parts).map(|(g, p)| g.parse_element(p)).collect::<Result<_>>()?,
                ))
            }
            Backend::FreeProduct(fs) => {
                if s == "1" || s == "e" || s.is_empty() {
                    return Ok(Element::Syllables(vec![]));
                }
                let mut acc = Vec::new();
                for part in split_top(s, '*') {
                    let (f, x) = part.split_once(':').ok_or_else(bad)?;
                    let f: usize = f.trim().parse().map_err(|_| bad())?;
                    if f >= fs.len() {
                        return Err(bad());
                    }
                    let x = fs[f].parse_element(x)?;
                    if !fs[f].is_identity(&x) {
                        push_syllable(fs, &mut acc, f as u32, x);
                    }
                }
                Ok(Element::Syllables(acc))
            }
            Backend::Semidirect { base, acting, .. } => {
                let inner = strip_parens(s).ok_or_else(bad)?;
                let parts = split_top(inner, ';');
                if parts.len() != 2 {
                    return Err(bad());
                }
                let n = base.parse_element(parts[0])?;
                let k = acting.index_of_name(parts[1].trim()).ok_or_else(bad)?;
                Ok(Element::pair(n, Element::Index(k)))
            }
        }
    }

    /// Checks identity, inverse and associativity laws: exhaustively on
    /// finite groups with at most `EXHAUSTIVE_TRIPLES` triples, on seeded
    /// random triples otherwise.
    pub fn check_axioms(&self) -> Result<()> {
        let check = |a: &Element, b: &Element, c: &Element| -> Result<()> {
            if self.mul(&self.mul(a, b), c) != self.mul(a, &self.mul(b, c)) {
                return Err(Error::GroupAxiom(format!(
                    "associativity fails at ({}, {}, {})",
                    self.name_of(a),
                    self.name_of(b),
                    self.name_of(c)
                )));
            }
            Ok(())
        };
        let unit = |a: &Element| -> Result<()> {
            let e = self.identity();
            if self.mul(a, &e) != *a || self.mul(&e, a) != *a {
                return Err(Error::GroupAxiom(format!("identity law fails at {}", self.name_of(a))));
            }
            let ai = self.inv(a);
            if !self.is_identity(&self.mul(a, &ai)) || !self.is_identity(&self.mul(&ai, a)) {
                return Err(Error::GroupAxiom(format!("inverse law fails at {}", self.name_of(a))));
            }
            if self.inv(&ai) != *a {
                return Err(Error::GroupAxiom(format!("inv(inv(a)) != a at {}", self.name_of(a))));
            }
            Ok(())
        };
        match self.elements() {
            Some(es) if es.len().saturating_pow(3) <= EXHAUSTIVE_TRIPLES => {
                for a in es {
                    unit(a)?;
                    for b in es {
                        for c in es {
                            check(a, b, c)?;
                        }
                    }
                }
            }
            _ => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
                for _ in 0..2000 {
                    let a = self.random_element(&mut rng, 6);
                    let b = self.random_element(&mut rng, 6);
                    let c = self.random_element(&mut rng, 6);
                    unit(&a)?;
                    check(&a, &b, &c)?;
                }
            }
        }
        Ok(())
    }
}

fn push_letter(w: &mut Vec<i32>, x: i32) {
    if w.last() == Some(&-x) {
        w.pop();
    } else {
        w.push(x);
    }
}

fn push_syllable(fs: &[Group], s: &mut Vec<(u32, Element)>, f: u32, x: Element) {
    match s.last() {
        Some((lf, lx)) if *lf == f => {
            let y = fs[f as usize].mul(lx, &x);
            s.pop();
            if !fs[f as usize].is_identity(&y) {
                s.push((f, y));
            }
        }
        _ => s.push((f, x)),
    }
}

fn word_name(w: &[i32], rank: usize) -> String {
    if w.is_empty() {
        return "1".into();
    }
    if rank <= 26 {
        w.iter()
            .map(|&x| {
                let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
                if x > 0 {
                    c
                } else {
                    c.to_ascii_uppercase()
                }
            })
            .collect()
    } else {
        w.iter()
            .map(|&x| {
                if x > 0 {
                    format!("x{}", x - 1)
                } else {
                    format!("X{}", -x - 1)
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn parse_word(s: &str, rank: usize) -> Option<Vec<i32>> {
    if s.is_empty() || s == "1" || s == "e" {
        return Some(vec![]);
    }
    let mut w = Vec::new();
    if rank <= 26 {
        for c in s.chars() {
            let (g, sign) = if c.is_ascii_lowercase() {
                (c as u8 - b'a', 1)
            } else if c.is_ascii_uppercase() {
                (c as u8 - b'A', -1)
            } else {
                return None;
            };
            if g as usize >= rank {
                return None;
            }
            push_letter(&mut w, sign * (g as i32 + 1));
        }
    } else {
        for tok in s.split('.') {
            let (sign, rest) = match tok.as_bytes().first()? {
                b'x' => (1, &tok[1..]),
                b'X' => (-1, &tok[1..]),
                _ => return None,
            };
            let g: usize = rest.parse().ok()?;
            if g >= rank {
                return None;
            }
            push_letter(&mut w, sign * (g as i32 + 1));
        }
    }
    Some(w)
}

fn cycle_notation(p: &[u32]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut x = p[start] as usize;
        while x != start {
            seen[x] = true;
            cyc.push(x);
            x = p[x] as usize;
        }
        out.push('(');
        out.push_str(&cyc.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

fn parse_cycles(s: &str, degree: usize) -> Option<Vec<u32>> {
    let mut p: Vec<u32> = (0..degree as u32).collect();
    let s = s.trim();
    if s == "()" || s == "id" {
        return Some(p);
    }
    let mut rest = s;
    // cycles are composed right to left, like the permutation product
    let mut cycles = Vec::new();
    while !rest.is_empty() {
        let body_end = rest.find(')')?;
        if !rest.starts_with('(') {
            return None;
        }
        let pts: Vec<usize> = rest[1..body_end]
            .split_whitespace()
            .map(|t| t.parse().ok())
            .collect::<Option<_>>()?;
        if pts.iter().any(|&x| x >= degree) {
            return None;
        }
        cycles.push(pts);
        rest = rest[body_end + 1..].trim_start();
    }
    for cyc in cycles.iter().rev() {
        let mut c: Vec<u32> = (0..degree as u32).collect();
        for i in 0..cyc.len() {
            c[cyc[i]] = cyc[(i + 1) % cyc.len()] as u32;
        }
        p = compose(&c, &p);
    }
    Some(p)
}

fn strip_parens(s: &str) -> Option<&str> {
    s.strip_prefix('(')?.strip_suffix(')')
}

/// Splits on `sep` at bracket depth zero.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
