//! Mitoses `i: G ↪ M` and everything built on them.
//!
//! Conjugation is written exponentially, `g^h = h·g·h⁻¹`. A mitosis comes
//! with witnesses `s, d ∈ M` such that
//!
//! 1. `M` is generated by `i(G) ∪ {s, d}`,
//! 2. `i(g)^d = i(g)·i(g)^s` for all `g`,
//! 3. `[i(g'), i(g)^s] = 1` for all `g, g'`.

mod pipeline;
mod theta;
mod tower;

pub use pipeline::{dmap, run_batch, sample_boundaries, Pipeline, PipelineConfig, PipelineRun, PIPELINE_METHOD};
pub use theta::{HomotopyTheta, Orientation};
pub use tower::{constant_c, e_bound, n_sequence, tower, ConstantTower, TowerRow};

use std::collections::HashSet;

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::groups::{Element, Group, Homomorphism};

#[derive(Clone, Debug)]
pub struct MitosisData {
    pub ambient: Group,
    pub group: Group,
    pub injection: Homomorphism,
    pub s: Element,
    pub d: Element,
}

/// Outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// How many instances were examined.
    pub checked: usize,
    pub exhaustive: bool,
    pub witness: Option<String>,
}

impl Verdict {
    fn pass(checked: usize, exhaustive: bool) -> Self {
        Verdict {
            holds: true,
            checked,
            exhaustive,
            witness: None,
        }
    }

    fn fail(checked: usize, exhaustive: bool, witness: String) -> Self {
        Verdict {
            holds: false,
            checked,
            exhaustive,
            witness: Some(witness),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MitosisReport {
    pub injective: Verdict,
    pub generation: Verdict,
    pub conjugation: Verdict,
    pub commuting: Verdict,
}

impl MitosisReport {
    pub fn passed(&self) -> bool {
        self.injective.holds && self.generation.holds && self.conjugation.holds && self.commuting.holds
    }

    pub fn failures(&self) -> Vec<String> {
        [
            ("injectivity", &self.injective),
            ("axiom 1 (generation)", &self.generation),
            ("axiom 2 (i(g)^d = i(g) i(g)^s)", &self.conjugation),
            ("axiom 3 ([i(g'), i(g)^s] = 1)", &self.commuting),
        ]
        .iter()
        .filter(|(_, v)| !v.holds)
        .map(|(n, v)| format!("{n} fails at {}", v.witness.as_deref().unwrap_or("?")))
        .collect()
    }
}

/// The elements of `G` the axioms are checked on: all of them when `G` is
/// finite, otherwise the ball of radius 2 plus 200 seeded random words.
fn test_elements(g: &Group) -> (Vec<Element>, bool) {
    if let Some(es) = g.elements() {
        return (es.to_vec(), true);
    }
    let mut out = g.ball(2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        out.push(g.random_element(&mut rng, 6));
    }
    (out, false)
}

pub fn verify_mitosis(m: &MitosisData) -> Result<MitosisReport> {
    let (g, amb, i) = (&m.group, &m.ambient, &m.injection);
    if i.source() != g || i.target() != amb {
        return Err(Error::OracleMismatch("injection does not go from the group to the ambient group".into()));
    }
    for (name, w) in [("s", &m.s), ("d", &m.d)] {
        if !amb.contains(w) {
            return Err(Error::NotAMember {
                element: format!("witness {name}"),
                group: amb.label(),
            });
        }
    }
    let (elems, exhaustive) = test_elements(g);
    let images: Vec<Element> = elems.iter().map(|x| i.apply(x)).collect();

    let injective = {
        let mut seen = std::collections::HashMap::new();
        let mut v = Verdict::pass(elems.len(), exhaustive);
        for (x, y) in elems.iter().zip(&images) {
            if let Some(prev) = seen.insert(y.clone(), x.clone()) {
                if prev != *x {
                    v = Verdict::fail(
                        elems.len(),
                        exhaustive,
                        format!("i({}) = i({})", g.name_of(&prev), g.name_of(x)),
                    );
                    break;
                }
            }
        }
        v
    };

    let generation = match amb.order() {
        Some(n) => {
            let mut gens: Vec<Element> = g.generators().iter().map(|x| i.apply(x)).collect();
            gens.push(m.s.clone());
            gens.push(m.d.clone());
            let mut seen: HashSet<Element> = HashSet::new();
            let mut queue = vec![amb.identity()];
            seen.insert(amb.identity());
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head].clone();
                head += 1;
                for y in &gens {
                    let z = amb.mul(&x, y);
                    if seen.insert(z.clone()) {
                        queue.push(z);
                    }
                }
            }
            if seen.len() == n {
                Verdict::pass(n, true)
            } else {
                Verdict::fail(n, true, format!("the generated subgroup has order {} of {n}", seen.len()))
            }
        }
        // generation cannot be decided by closure; nothing is claimed
        None => Verdict::pass(0, false),
    };

    let mut conjugation = Verdict::pass(elems.len(), exhaustive);
    for (x, y) in elems.iter().zip(&images) {
        let lhs = amb.conj(y, &m.d);
        let rhs = amb.mul(y, &amb.conj(y, &m.s));
        if lhs != rhs {
            conjugation = Verdict::fail(elems.len(), exhaustive, format!("g = {}", g.name_of(x)));
            break;
        }
    }

    let mut commuting = Verdict::pass(elems.len() * elems.len(), exhaustive);
    let conj_s: Vec<Element> = images.iter().map(|y| amb.conj(y, &m.s)).collect();
    'outer: for (x1, y1) in elems.iter().zip(&images) {
        for (x2, ys) in elems.iter().zip(&conj_s) {
            if !amb.is_identity(&amb.commutator(y1, ys)) {
                commuting = Verdict::fail(
                    elems.len() * elems.len(),
                    exhaustive,
                    format!("(g', g) = ({}, {})", g.name_of(x1), g.name_of(x2)),
                );
                break 'outer;
            }
        }
    }

    Ok(MitosisReport {
        injective,
        generation,
        conjugation,
        commuting,
    })
}

/// `M = (G × G) ⋊ ⟨φ, ψ⟩` with `φ(a, b) = (a, ab)` and `ψ(a, b) = (b, a)`,
/// `i(g) = (g, e)`, `s = ψ`, `d = φ`. Needs `G` finite and abelian.
pub fn mitosis_of_finite_abelian(g: &Group) -> Result<MitosisData> {
    let es = g
        .elements()
        .ok_or_else(|| Error::NotFinite("the mitosis builder needs a finite group".into()))?
        .to_vec();
    for a in &es {
        for b in &es {
            if g.mul(a, b) != g.mul(b, a) {
                return Err(Error::Mitosis(format!(
                    "group is not abelian: {} and {} do not commute",
                    g.name_of(a),
                    g.name_of(b)
                )));
            }
        }
    }
    let base = Group::direct(vec![g.clone(), g.clone()]);
    let bs = base.elements().expect("finite base").to_vec();
    let index = |x: &Element| base.index_of(x).expect("base element") as u32;
    let phi: Vec<u32> = bs
        .iter()
        .map(|x| {
            let (a, b) = (&x.components()[0], &x.components()[1]);
            index(&Element::pair(a.clone(), g.mul(a, b)))
        })
        .collect();
    let psi: Vec<u32> = bs
        .iter()
        .map(|x| index(&Element::pair(x.components()[1].clone(), x.components()[0].clone())))
        .collect();
    let m = Group::semidirect(base.clone(), vec![("phi".into(), phi), ("psi".into(), psi)])?;
    let one = m.identity().components()[1].clone();
    let images = es
        .iter()
        .map(|x| Element::pair(Element::pair(x.clone(), g.identity()), one.clone()))
        .collect();
    let injection = Homomorphism::from_table(g, &m, images)?;
    let s = m.acting_element("psi").expect("psi acts");
    let d = m.acting_element("phi").expect("phi acts");
    let data = MitosisData {
        ambient: m,
        group: g.clone(),
        injection,
        s,
        d,
    };
    let report = verify_mitosis(&data)?;
    if !report.passed() {
        return Err(Error::Mitosis(report.failures().join("; ")));
    }
    Ok(data)
}

/// `μ: G × G → M, (g', g) ↦ i(g')·i(g)^s`, over the given copy of `G × G`.
///
/// Refused unless axiom 3 holds, since that is what makes `μ` a
/// homomorphism. The identities `μ∘Δ = γ_d∘i`, `μ∘i_1 = i` and
/// `μ∘i_2 = γ_s∘i` are checked before returning.
pub fn mu_hom(m: &MitosisData, product: &Group) -> Result<Homomorphism> {
    let report = verify_mitosis(m)?;
    if !report.commuting.holds {
        return Err(Error::Mitosis(format!(
            "axiom 3 fails at {}; μ would not be a homomorphism",
            report.commuting.witness.unwrap_or_default()
        )));
    }
    let expected = Group::direct(vec![m.group.clone(), m.group.clone()]);
    if *product != expected {
        return Err(Error::OracleMismatch("μ needs G × G as its source".into()));
    }
    let (amb, i, s) = (m.ambient.clone(), m.injection.clone(), m.s.clone());
    let mu = Homomorphism::from_fn(product, &m.ambient, move |x| {
        let c = x.components();
        amb.mul(&i.apply(&c[0]), &amb.conj(&i.apply(&c[1]), &s))
    })?;
    let (elems, _) = test_elements(&m.group);
    let amb = &m.ambient;
    let e = m.group.identity();
    for x in &elems {
        let ix = m.injection.apply(x);
        let checks = [
            ("μ∘Δ = γ_d∘i", Element::pair(x.clone(), x.clone()), amb.conj(&ix, &m.d)),
            ("μ∘i_1 = i", Element::pair(x.clone(), e.clone()), ix.clone()),
            ("μ∘i_2 = γ_s∘i", Element::pair(e.clone(), x.clone()), amb.conj(&ix, &m.s)),
        ];
        for (name, arg, want) in checks {
            if mu.apply(&arg) != want {
                return Err(Error::Mitosis(format!("{name} fails at g = {}", m.group.name_of(x))));
            }
        }
    }
    Ok(mu)
}
