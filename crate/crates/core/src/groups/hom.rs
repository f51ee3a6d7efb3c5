use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{Element, Group};
use crate::error::{Error, Result};

/// A group homomorphism between two oracles.
#[derive(Clone)]
pub struct Homomorphism {
    source: Group,
    target: Group,
    map: Arc<HomMap>,
}

enum HomMap {
    Identity,
    Trivial,
    /// image of every source element, by source index
    Table(Vec<Element>),
    /// image of every free generator
    FreeImages(Vec<Element>),
    /// `x ↦ (h_1 x, …, h_n x)` into a direct product
    Into(Vec<Homomorphism>),
    /// componentwise map between direct products
    Product(Vec<Homomorphism>),
    Projection(usize),
    Inclusion(usize),
    /// `x ↦ k·x·k⁻¹`
    Conjugation(Element),
    /// `second ∘ first`
    Compose(Homomorphism, Homomorphism),
    Func(Arc<dyn Fn(&Element) -> Element + Send + Sync>),
}

/// Homomorphism description record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum HomSpec {
    Identity,
    Trivial,
    /// full element table, for finite sources
    Table { images: BTreeMap<String, String> },
    /// images of the source generators, in generator order
    Generators { images: Vec<String> },
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hom({} -> {})", self.source.label(), self.target.label())
    }
}

impl Homomorphism {
    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    fn new(source: Group, target: Group, map: HomMap) -> Self {
        Homomorphism {
            source,
            target,
            map: Arc::new(map),
        }
    }

    pub fn identity(g: &Group) -> Self {
        Self::new(g.clone(), g.clone(), HomMap::Identity)
    }

    pub fn trivial(source: &Group, target: &Group) -> Self {
        Self::new(source.clone(), target.clone(), HomMap::Trivial)
    }

    /// Homomorphism from a finite source given by the image of every element
    /// (in source index order). The law is verified exhaustively.
    pub fn from_table(source: &Group, target: &Group, images: Vec<Element>) -> Result<Self> {
        let n = source
            .order()
            .ok_or_else(|| Error::NotFinite("table homomorphisms need a finite source".into()))?;
        if images.len() != n {
            return Err(Error::HomLaw(format!("table has {} images for {n} elements", images.len())));
        }
        for y in &images {
            if !target.contains(y) {
                return Err(Error::NotAMember {
                    element: format!("{y:?}"),
                    group: target.label(),
                });
            }
        }
        let h = Self::new(source.clone(), target.clone(), HomMap::Table(images));
        h.verify_law()?;
        Ok(h)
    }

    /// Homomorphism determined by images of the source generators (see
    /// [`Group::generators`]). Free sources take any images; finite sources
    /// are extended along words and then checked exhaustively, reporting a
    /// witness pair when the images do not define a homomorphism.
    pub fn from_generator_images(source: &Group, target: &Group, images: Vec<Element>) -> Result<Self> {
        let gens = source.generators();
        if gens.len() != images.len() {
            return Err(Error::HomLaw(format!(
                "{} generator images given, source has {} generators",
                images.len(),
                gens.len()
            )));
        }
        for y in &images {
            if !target.contains(y) {
                return Err(Error::NotAMember {
                    element: format!("{y:?}"),
                    group: target.label(),
                });
            }
        }
        if source.free_rank().is_some() {
            return Ok(Self::new(source.clone(), target.clone(), HomMap::FreeImages(images)));
        }
        let es = source
            .elements()
            .ok_or_else(|| Error::NotFinite("generator images need a free or finite source".into()))?;
        let mut img: Vec<Option<Element>> = vec![None; es.len()];
        let e = source.index_of(&source.identity()).unwrap();
        img[e] = Some(target.identity());
        let mut queue = vec![e];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for (g, gy) in gens.iter().zip(&images) {
                let y = source.index_of(&source.mul(&es[x], g)).unwrap();
                if img[y].is_none() {
                    img[y] = Some(target.mul(img[x].as_ref().unwrap(), gy));
                    queue.push(y);
                }
            }
        }
        let images = img
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::HomLaw("generators do not generate the source".into()))?;
        let h = Self::new(source.clone(), target.clone(), HomMap::Table(images));
        h.verify_law()?;
        Ok(h)
    }

    /// Homomorphism given by a closure; the law is verified (exhaustively on
    /// small finite sources, by sampling otherwise).
    pub fn from_fn<F>(source: &Group, target: &Group, f: F) -> Result<Self>
    where
        F: Fn(&Element) -> Element + Send + Sync + 'static,
    {
        let h = Self::new(source.clone(), target.clone(), HomMap::Func(Arc::new(f)));
        h.verify_law()?;
        Ok(h)
    }

    /// Image of every source element in enumeration order (finite sources).
    pub fn images(&self) -> Option<Vec<Element>> {
        Some(self.source.elements()?.iter().map(|x| self.apply(x)).collect())
    }

    /// Builds a homomorphism from a description record.
    pub fn from_spec(spec: &HomSpec, source: &Group, target: &Group) -> Result<Self> {
        match spec {
            HomSpec::Identity => {
                if source != target {
                    return Err(Error::OracleMismatch("identity map needs equal source and target".into()));
                }
                Ok(Self::identity(source))
            }
            HomSpec::Trivial => Ok(Self::trivial(source, target)),
            HomSpec::Table { images } => {
                let es = source
                    .elements()
                    .ok_or_else(|| Error::NotFinite("table homomorphisms need a finite source".into()))?;
                let imgs = es
                    .iter()
                    .map(|x| {
                        let name = source.name_of(x);
                        let y = images
                            .get(&name)
                            .ok_or_else(|| Error::HomLaw(format!("no image given for {name}")))?;
                        target.parse_element(y)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_table(source, target, imgs)
            }
            HomSpec::Generators { images } => {
                let imgs = images.iter().map(|y| target.parse_element(y)).collect::<Result<Vec<_>>>()?;
                Self::from_generator_images(source, target, imgs)
            }
        }
    }

    /// Diagonal `G → G × G`.
    pub fn diagonal(g: &Group) -> Self {
        let id = Self::identity(g);
        Self::into_product(vec![id.clone(), id])
    }

    /// The diagonal with a caller-supplied copy of `G × G`, so that chains
    /// pushed along it live over that exact oracle.
    pub fn diagonal_into(g: &Group, product: &Group) -> Result<Self> {
        Self::diagonal(g).with_groups(g, product)
    }

    /// The same map with source and target replaced by equal oracles.
    pub fn with_groups(&self, source: &Group, target: &Group) -> Result<Self> {
        if *source != self.source || *target != self.target {
            return Err(Error::OracleMismatch(format!(
                "{source:?} -> {target:?} does not match {self:?}"
            )));
        }
        Ok(Homomorphism {
            source: source.clone(),
            target: target.clone(),
            map: self.map.clone(),
        })
    }

    /// `x ↦ (h_1 x, …, h_n x)`; all maps must share a source.
    pub fn into_product(maps: Vec<Homomorphism>) -> Self {
        let source = maps[0].source.clone();
        assert!(maps.iter().all(|h| h.source == source), "into_product needs a common source");
        let target = Group::direct(maps.iter().map(|h| h.target.clone()).collect());
        Self::new(source, target, HomMap::Into(maps))
    }

    /// Componentwise product `h_1 × … × h_n`.
    pub fn product(maps: Vec<Homomorphism>) -> Self {
        let source = Group::direct(maps.iter().map(|h| h.source.clone()).collect());
        let target = Group::direct(maps.iter().map(|h| h.target.clone()).collect());
        Self::new(source, target, HomMap::Product(maps))
    }

    pub fn projection(product: &Group, i: usize) -> Result<Self> {
        let fs = product
            .direct_factors()
            .ok_or_else(|| Error::OracleMismatch("projection needs a direct product".into()))?;
        let target = fs
            .get(i)
            .ok_or_else(|| Error::OracleMismatch(format!("no factor {i}")))?
            .clone();
        Ok(Self::new(product.clone(), target, HomMap::Projection(i)))
    }

    pub fn inclusion(product: &Group, i: usize) -> Result<Self> {
        let fs = product
            .direct_factors()
            .ok_or_else(|| Error::OracleMismatch("inclusion needs a direct product".into()))?;
        let source = fs
            .get(i)
            .ok_or_else(|| Error::OracleMismatch(format!("no factor {i}")))?
            .clone();
        Ok(Self::new(source, product.clone(), HomMap::Inclusion(i)))
    }

    /// Conjugation `γ_k(g) = k·g·k⁻¹`; with `inverse` set, `γ_{k⁻¹}`.
    pub fn conjugation(g: &Group, k: &Element, inverse: bool) -> Result<Self> {
        let k = if inverse { g.try_inv(k)? } else { g.try_mul(k, &g.identity())? };
        Ok(Self::new(g.clone(), g.clone(), HomMap::Conjugation(k)))
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &Homomorphism) -> Result<Self> {
        if self.target != second.source {
            return Err(Error::OracleMismatch(format!(
                "cannot compose {self:?} with {second:?}"
            )));
        }
        Ok(Self::new(
            self.source.clone(),
            second.target.clone(),
            HomMap::Compose(self.clone(), second.clone()),
        ))
    }

    pub fn apply(&self, x: &Element) -> Element {
        match &*self.map {
            HomMap::Identity => x.clone(),
            HomMap::Trivial => self.target.identity(),
            HomMap::Table(images) => images[self.source.index_of(x).expect("element of the source")].clone(),
            HomMap::FreeImages(images) => {
                let mut acc = self.target.identity();
                for &l in x.word() {
                    let y = &images[l.unsigned_abs() as usize - 1];
                    acc = if l > 0 {
                        self.target.mul(&acc, y)
                    } else {
                        self.target.mul(&acc, &self.target.inv(y))
                    };
                }
                acc
            }
            HomMap::Into(maps) => Element::Tuple(maps.iter().map(|h| h.apply(x)).collect()),
            HomMap::Product(maps) => {
                Element::Tuple(maps.iter().zip(x.components()).map(|(h, c)| h.apply(c)).collect())
            }
            HomMap::Projection(i) => x.components()[*i].clone(),
            HomMap::Inclusion(i) => {
                let fs = self.target.direct_factors().unwrap();
                let mut c: Vec<Element> = fs.iter().map(|g| g.identity()).collect();
                c[*i] = x.clone();
                Element::Tuple(c)
            }
            HomMap::Conjugation(k) => self.source.conj(x, k),
            HomMap::Compose(first, second) => second.apply(&first.apply(x)),
            HomMap::Func(f) => f(x),
        }
    }

    pub fn try_apply(&self, x: &Element) -> Result<Element> {
        if !self.source.contains(x) {
            return Err(Error::NotAMember {
                element: format!("{x:?}"),
                group: self.source.label(),
            });
        }
        Ok(self.apply(x))
    }

    /// Checks `h(ab) = h(a)h(b)` exhaustively on finite sources and on 10⁴
    /// seeded random pairs otherwise; also `h(e) = e`.
    pub fn verify_law(&self) -> Result<()> {
        if !self.target.is_identity(&self.apply(&self.source.identity())) {
            return Err(Error::HomLaw("identity is not mapped to identity".into()));
        }
        let check = |a: &Element, b: &Element| -> Result<()> {
            let lhs = self.apply(&self.source.mul(a, b));
            let rhs = self.target.mul(&self.apply(a), &self.apply(b));
            if lhs != rhs {
                return Err(Error::HomLaw(format!(
                    "h(ab) != h(a)h(b) for witness pair ({}, {})",
                    self.source.name_of(a),
                    self.source.name_of(b)
                )));
            }
            Ok(())
        };
        match self.source.elements() {
            Some(es) if es.len() <= 2000 => {
                for a in es {
                    for b in es {
                        check(a, b)?;
                    }
                }
            }
            _ => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xb0b);
                for _ in 0..10_000 {
                    let a = self.source.random_element(&mut rng, 6);
                    let b = self.source.random_element(&mut rng, 6);
                    check(&a, &b)?;
                }
            }
        }
        Ok(())
    }

    /// Whether the map is injective (finite sources only).
    pub fn is_injective(&self) -> Option<bool> {
        let es = self.source.elements()?;
        let mut seen = std::collections::HashSet::new();
        Some(es.iter().all(|x| seen.insert(self.apply(x))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_then_projection_is_identity() {
        let g = Group::cyclic(2);
        let diag = Homomorphism::diagonal(&g);
        let t = Element::Index(1);
        assert_eq!(diag.apply(&t), Element::pair(t.clone(), t.clone()));
        let p = Homomorphism::projection(diag.target(), 0).unwrap();
        let back = diag.then(&p).unwrap();
        for x in g.elements().unwrap() {
            assert_eq!(back.apply(x), *x);
        }
        diag.verify_law().unwrap();
    }

    #[test]
    fn free_to_z2_kills_xy() {
        let f = Group::free(2);
        let z2 = Group::cyclic(2);
        let t = Element::Index(1);
        let h = Homomorphism::from_generator_images(&f, &z2, vec![t.clone(), t]).unwrap();
        h.verify_law().unwrap();
        assert!(z2.is_identity(&h.apply(&f.parse_element("ab").unwrap())));
        assert_eq!(h.apply(&f.parse_element("aab").unwrap()), Element::Index(1));
    }

    #[test]
    fn bad_generator_images_report_a_witness() {
        // Z/3 -> Z/2 sending the generator to t is not a homomorphism
        let z3 = Group::cyclic(3);
        let z2 = Group::cyclic(2);
        let err = Homomorphism::from_generator_images(&z3, &z2, vec![Element::Index(1), Element::Index(1)])
            .unwrap_err();
        assert!(err.to_string().contains("witness pair"), "{err}");
    }

    #[test]
    fn s3_perm_and_table_backends_are_isomorphic() {
        let perm = Group::symmetric(3);
        let spec: super::super::GroupSpec = serde_json::from_str(
            r#"{"type":"finite","elements":["e","a","b","ab","ba","aba"],
                "table":[["e","a","b","ab","ba","aba"],
                         ["a","e","ab","b","aba","ba"],
                         ["b","ba","e","aba","a","ab"],
                         ["ab","aba","a","ba","e","b"],
                         ["ba","b","aba","e","ab","a"],
                         ["aba","ab","ba","a","b","e"]]}"#,
        )
        .unwrap();
        let table = Group::from_spec(&spec).unwrap();
        // perm generators are (0 1) and (0 1 2) = (0 1)(1 2)
        let a = table.parse_element("a").unwrap();
        let ab = table.parse_element("ab").unwrap();
        let iso = Homomorphism::from_generator_images(&perm, &table, vec![a, ab]).unwrap();
        assert_eq!(iso.is_injective(), Some(true));
        let t01 = perm.parse_element("(0 1)").unwrap();
        let t12 = perm.parse_element("(1 2)").unwrap();
        let prod = perm.mul(&t01, &t12);
        assert_eq!(iso.apply(&prod), table.mul(&iso.apply(&t01), &iso.apply(&t12)));
        assert_eq!(perm.name_of(&prod).len(), "(0 1 2)".len());
    }

    #[test]
    fn conjugation_in_abelian_groups_is_trivial() {
        let g = Group::cyclic(5);
        let k = Element::Index(3);
        let c = Homomorphism::conjugation(&g, &k, false).unwrap();
        for x in g.elements().unwrap() {
            assert_eq!(c.apply(x), *x);
        }
    }

    #[test]
    fn conjugations_compose() {
        let g = Group::symmetric(3);
        let es = g.elements().unwrap().to_vec();
        for k in &es {
            for d in &es {
                let gk = Homomorphism::conjugation(&g, k, false).unwrap();
                let gd = Homomorphism::conjugation(&g, d, false).unwrap();
                let gkd = Homomorphism::conjugation(&g, &g.mul(k, d), false).unwrap();
                let comp = gd.then(&gk).unwrap();
                for x in &es {
                    assert_eq!(comp.apply(x), gkd.apply(x));
                }
            }
        }
    }

    #[test]
    fn conjugation_permutes_transpositions_of_s3() {
        let g = Group::symmetric(3);
        let transpositions: Vec<Element> = ["(0 1)", "(1 2)", "(0 2)"]
            .iter()
            .map(|s| g.parse_element(s).unwrap())
            .collect();
        for k in g.elements().unwrap() {
            let c = Homomorphism::conjugation(&g, k, false).unwrap();
            let mut imgs: Vec<Element> = transpositions.iter().map(|t| c.apply(t)).collect();
            imgs.sort();
            let mut orig = transpositions.clone();
            orig.sort();
            assert_eq!(imgs, orig);
        }
    }

    #[test]
    fn hom_spec_from_json() {
        let f = Group::free(2);
        let z2 = Group::cyclic(2);
        let spec: HomSpec = serde_json::from_str(r#"{"type":"generators","images":["1","1"]}"#).unwrap();
        let h = Homomorphism::from_spec(&spec, &f, &z2).unwrap();
        assert_eq!(h.apply(&f.parse_element("a").unwrap()), Element::Index(1));
    }
}
