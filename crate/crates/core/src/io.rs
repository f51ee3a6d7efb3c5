//! File formats and certificate records.
//!
//! Everything is JSON. Rationals are `p/q` strings and group elements are
//! written by name, resolved against the group they belong to. Certificates
//! embed the description of every group they mention so that
//! [`verify_certificate`] needs nothing but the file: it recomputes
//! boundaries, norms and constants exactly and never solves an LP.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Tuple};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::fill::{FillCertificate, KappaValue, UbcConstant};
use crate::groups::{Group, GroupSpec, HomSpec, Homomorphism};
use crate::mitosis::{constant_c, e_bound, n_sequence, ConstantTower, MitosisData, PipelineRun, TowerRow};
use crate::rational::{self, Q};

pub const TOOL: &str = "l1bar";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serde adapter storing a rational as its `p/q` string.
pub mod q_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{self, Q};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::render(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a `u128` as a decimal string, since buffered
/// (flattened or tagged) JSON values cannot hold 128-bit integers.
pub mod u128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub coeff: String,
    pub tuple: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainRecord {
    pub value: String,
    pub tuple: Vec<String>,
}

fn tuple_names(g: &Group, t: &Tuple) -> Vec<String> {
    t.iter().map(|x| g.name_of(x)).collect()
}

fn parse_tuple(g: &Group, names: &[String]) -> Result<Tuple> {
    names.iter().map(|n| g.parse_element(n)).collect()
}

pub fn chain_to_records(c: &Chain) -> Vec<ChainRecord> {
    c.terms()
        .map(|(t, v)| ChainRecord {
            coeff: rational::render(v),
            tuple: tuple_names(c.group(), t),
        })
        .collect()
}

/// Reads a chain; `degree` is needed for an empty record list and checked
/// against the records otherwise.
pub fn chain_from_records(g: &Group, degree: Option<usize>, records: &[ChainRecord]) -> Result<Chain> {
    let k = match (degree, records.first()) {
        (Some(k), _) => k,
        (None, Some(r)) => r.tuple.len(),
        (None, None) => return Err(Error::Parse("empty chain without a degree".into())),
    };
    let terms = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = parse_tuple(g, &r.tuple).map_err(|e| Error::Parse(format!("record {i}: {e}")))?;
            let v = rational::parse(&r.coeff).map_err(|e| Error::Parse(format!("record {i}: {e}")))?;
            Ok((t, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Chain::from_terms(g, k, terms)
}

/// Only tabulated cochains can be written; lazy ones are materialized.
pub fn cochain_to_records(f: &Cochain) -> Result<Vec<CochainRecord>> {
    let table = match f.table() {
        Some(t) => t.clone(),
        None => f.materialize()?.table().cloned().unwrap_or_default(),
    };
    Ok(table
        .iter()
        .map(|(t, v)| CochainRecord {
            value: rational::render(v),
            tuple: tuple_names(f.group(), t),
        })
        .collect())
}

pub fn cochain_from_records(g: &Group, degree: Option<usize>, records: &[CochainRecord]) -> Result<Cochain> {
    let k = match (degree, records.first()) {
        (Some(k), _) => k,
        (None, Some(r)) => r.tuple.len(),
        (None, None) => return Err(Error::Parse("empty cochain without a degree".into())),
    };
    let values = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = parse_tuple(g, &r.tuple).map_err(|e| Error::Parse(format!("record {i}: {e}")))?;
            let v = rational::parse(&r.value).map_err(|e| Error::Parse(format!("record {i}: {e}")))?;
            Ok((t, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Cochain::from_table(g, k, values)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// A `.grp` file holds one [`GroupSpec`] record.
pub fn load_group(path: &Path) -> Result<Group> {
    let spec: GroupSpec = read_json(path)?;
    Group::from_spec(&spec).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub fn load_chain(path: &Path, g: &Group, degree: Option<usize>) -> Result<Chain> {
    let records: Vec<ChainRecord> = read_json(path)?;
    chain_from_records(g, degree, &records).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub fn load_cochain(path: &Path, g: &Group, degree: Option<usize>) -> Result<Cochain> {
    let records: Vec<CochainRecord> = read_json(path)?;
    cochain_from_records(g, degree, &records).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

/// Either a path to a `.grp` file, relative to the referring file, or an
/// inline description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(PathBuf),
    Inline(GroupSpec),
}

impl GroupRef {
    pub fn load(&self, base: &Path) -> Result<Group> {
        match self {
            GroupRef::Path(p) => load_group(&base.join(p)),
            GroupRef::Inline(s) => Group::from_spec(s),
        }
    }
}

/// A mitosis as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitosisFile {
    pub group: GroupRef,
    pub ambient: GroupRef,
    pub injection: HomSpec,
    pub s: String,
    pub d: String,
}

impl MitosisFile {
    /// Inline record of `m`; the injection is tabulated, so `G` must be finite.
    pub fn from_data(m: &MitosisData) -> Result<Self> {
        let es = m
            .group
            .elements()
            .ok_or_else(|| Error::NotFinite("only mitoses of finite groups can be written".into()))?;
        let images = es
            .iter()
            .map(|x| (m.group.name_of(x), m.ambient.name_of(&m.injection.apply(x))))
            .collect();
        Ok(MitosisFile {
            group: GroupRef::Inline(m.group.spec().clone()),
            ambient: GroupRef::Inline(m.ambient.spec().clone()),
            injection: HomSpec::Table { images },
            s: m.ambient.name_of(&m.s),
            d: m.ambient.name_of(&m.d),
        })
    }

    pub fn resolve(&self, base: &Path) -> Result<MitosisData> {
        let group = self.group.load(base)?;
        let ambient = self.ambient.load(base)?;
        let injection = Homomorphism::from_spec(&self.injection, &group, &ambient)?;
        Ok(MitosisData {
            s: ambient.parse_element(&self.s)?,
            d: ambient.parse_element(&self.d)?,
            group,
            ambient,
            injection,
        })
    }

    pub fn load(path: &Path) -> Result<MitosisData> {
        let file: MitosisFile = read_json(path)?;
        file.resolve(path.parent().unwrap_or(Path::new(".")))
    }
}

fn default_samples() -> usize {
    100
}

fn default_terms() -> usize {
    4
}

/// Configuration of a pipeline batch.
///
/// ```json
/// {"degree": 2, "h": "z2.grp", "h_prime": "z2.grp", "k": "z2.grp", "g": "z2.grp",
///  "phi": {"type": "identity"}, "phi_prime": {"type": "identity"}, "psi": {"type": "identity"},
///  "samples": 100, "seed": 0}
/// ```
///
/// Without `mitosis` the builder mitosis of `g` is used; without `chains`
/// the batch consists of `samples` random boundaries `∂c` with `c` of
/// degree `degree + 1` and at most `max_terms` terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineFile {
    pub degree: usize,
    pub h: GroupRef,
    pub h_prime: GroupRef,
    pub k: GroupRef,
    pub g: GroupRef,
    pub phi: HomSpec,
    pub phi_prime: HomSpec,
    pub psi: HomSpec,
    #[serde(default)]
    pub mitosis: Option<PathBuf>,
    #[serde(default)]
    pub chains: Option<PathBuf>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_terms")]
    pub max_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillRecord {
    pub degree: usize,
    pub z: Vec<ChainRecord>,
    pub c: Vec<ChainRecord>,
    pub ratio: String,
    pub support: String,
    pub method: String,
}

impl FillRecord {
    pub fn new(cert: &FillCertificate) -> Self {
        FillRecord {
            degree: cert.boundary.degree(),
            z: chain_to_records(&cert.boundary),
            c: chain_to_records(&cert.primitive),
            ratio: rational::render(&cert.ratio),
            support: cert.support.clone(),
            method: cert.method.clone(),
        }
    }

    pub fn resolve(&self, g: &Group) -> Result<FillCertificate> {
        Ok(FillCertificate {
            boundary: chain_from_records(g, Some(self.degree), &self.z)?,
            primitive: chain_from_records(g, Some(self.degree + 1), &self.c)?,
            ratio: rational::parse(&self.ratio)?,
            support: self.support.clone(),
            method: self.method.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub z: Vec<ChainRecord>,
    /// `∂c' = (i∘f)_* z` over the ambient group.
    pub fill: FillRecord,
    /// `‖c'‖₁ / ‖z‖₁`.
    pub ratio: String,
    pub kappa: String,
    pub xi: String,
    pub bound: String,
}

/// The inputs of `constant_c` that a pipeline batch was checked against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerInputs {
    pub q: usize,
    pub kappa: String,
    pub xi: String,
    pub theta_bound: usize,
    pub aw_bound: usize,
    pub d_bound: usize,
    pub shuffle_bound: String,
    pub e_bound: String,
    pub constant: String,
}

impl TowerInputs {
    pub fn new(q: usize, kappa: &Q, xi: &Q) -> Self {
        TowerInputs {
            q,
            kappa: rational::render(kappa),
            xi: rational::render(xi),
            theta_bound: q + 1,
            aw_bound: q + 1,
            d_bound: q + 3,
            shuffle_bound: rational::binomial(q + 1, (q + 1) / 2).to_string(),
            e_bound: rational::render(&e_bound(q, kappa)),
            constant: rational::render(&constant_c(q, kappa, xi)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Fill {
        group: GroupSpec,
        #[serde(flatten)]
        fill: FillRecord,
    },
    Kappa {
        group: GroupSpec,
        degree: usize,
        exact: bool,
        lower: String,
        upper: String,
        method: String,
        certificates: Vec<FillRecord>,
        upper_witnesses: Vec<FillRecord>,
    },
    Pipeline {
        source: GroupSpec,
        ambient: GroupSpec,
        degree: usize,
        /// `i∘f` on every element occurring in the batch.
        map: BTreeMap<String, String>,
        runs: Vec<PipelineRecord>,
        tower: TowerInputs,
    },
    Tower {
        xi: Vec<String>,
        rows: Vec<TowerRow>,
    },
}

/// What is written to disk: a [`Certificate`] stamped with the tool version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub body: Certificate,
}

impl CertificateFile {
    pub fn new(body: Certificate) -> Self {
        CertificateFile {
            tool: TOOL.into(),
            version: VERSION.into(),
            body,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }
}

impl Certificate {
    pub fn fill(cert: &FillCertificate) -> Self {
        Certificate::Fill {
            group: cert.boundary.group().spec().clone(),
            fill: FillRecord::new(cert),
        }
    }

    pub fn kappa(k: &UbcConstant) -> Self {
        Certificate::Kappa {
            group: k.group.spec().clone(),
            degree: k.degree,
            exact: matches!(k.value, KappaValue::Exact(_)),
            lower: rational::render(k.lower()),
            upper: rational::render(k.upper()),
            method: k.method.tag().into(),
            certificates: k.certificates.iter().map(FillRecord::new).collect(),
            upper_witnesses: k.upper_witnesses.iter().map(FillRecord::new).collect(),
        }
    }

    /// A batch of runs of one pipeline; `push` is `i∘f`.
    pub fn pipeline(push: &Homomorphism, degree: usize, runs: &[PipelineRun]) -> Self {
        let (h, m) = (push.source(), push.target());
        let mut map = BTreeMap::new();
        for r in runs {
            for (t, _) in r.z.terms() {
                for x in t {
                    map.entry(h.name_of(x)).or_insert_with(|| m.name_of(&push.apply(x)));
                }
            }
        }
        let kappa = runs.iter().map(|r| r.kappa.clone()).max().unwrap_or_else(Q::zero);
        let xi = runs.iter().map(|r| r.xi.clone()).max().unwrap_or_else(Q::zero);
        Certificate::Pipeline {
            source: h.spec().clone(),
            ambient: m.spec().clone(),
            degree,
            map,
            runs: runs
                .iter()
                .map(|r| PipelineRecord {
                    z: chain_to_records(&r.z),
                    fill: FillRecord::new(&r.certificate),
                    ratio: rational::render(&r.ratio),
                    kappa: rational::render(&r.kappa),
                    xi: rational::render(&r.xi),
                    bound: rational::render(&r.bound),
                })
                .collect(),
            tower: TowerInputs::new(degree, &kappa, &xi),
        }
    }

    pub fn tower(t: &ConstantTower) -> Self {
        Certificate::Tower {
            xi: t.rows.iter().skip(1).map(|r| rational::render(&r.xi)).collect(),
            rows: t.rows.clone(),
        }
    }
}

fn mismatch(what: &str, stated: &Q, recomputed: &Q) -> Error {
    Error::Certificate(format!(
        "{what} mismatch: stated {}, recomputed {}",
        rational::render(stated),
        rational::render(recomputed)
    ))
}

fn check_eq(what: &str, stated: &Q, recomputed: &Q) -> Result<()> {
    if stated != recomputed {
        return Err(mismatch(what, stated, recomputed));
    }
    Ok(())
}

/// Re-checks a certificate exactly and returns a one-line summary.
pub fn verify_certificate(file: &CertificateFile) -> Result<String> {
    match &file.body {
        Certificate::Fill { group, fill } => {
            let g = Group::from_spec(group)?;
            let cert = fill.resolve(&g)?;
            cert.verify()?;
            Ok(format!(
                "fill certificate ok: degree {}, ratio {}",
                fill.degree,
                rational::render(&cert.ratio)
            ))
        }
        Certificate::Kappa {
            group,
            degree,
            exact,
            lower,
            upper,
            certificates,
            upper_witnesses,
            ..
        } => {
            let g = Group::from_spec(group)?;
            let (lower, upper) = (rational::parse(lower)?, rational::parse(upper)?);
            let mut best = Q::zero();
            for r in certificates {
                let c = r.resolve(&g)?;
                c.verify()?;
                if c.boundary.degree() != *degree {
                    return Err(Error::Certificate("filling of the wrong degree".into()));
                }
                if *exact && c.boundary.l1_norm() != rational::one() {
                    return Err(Error::Certificate("vertex certificate is not normalized".into()));
                }
                best = best.max(c.ratio);
            }
            check_eq("lower bound", &lower, &best)?;
            if *exact {
                check_eq("kappa", &upper, &lower)?;
            } else {
                let mut top = Q::zero();
                for r in upper_witnesses {
                    let c = r.resolve(&g)?;
                    c.verify()?;
                    top = top.max(c.primitive.l1_norm());
                }
                check_eq("upper bound", &upper, &top)?;
                if upper < lower {
                    return Err(Error::Certificate("upper bound below lower bound".into()));
                }
            }
            Ok(format!(
                "kappa certificate ok: {} vertex fillings, kappa in [{}, {}]",
                certificates.len(),
                rational::render(&lower),
                rational::render(&upper)
            ))
        }
        Certificate::Pipeline {
            source,
            ambient,
            degree,
            map,
            runs,
            tower,
        } => {
            let h = Group::from_spec(source)?;
            let m = Group::from_spec(ambient)?;
            let image = |x: &crate::groups::Element| -> Result<crate::groups::Element> {
                let name = h.name_of(x);
                let y = map
                    .get(&name)
                    .ok_or_else(|| Error::Certificate(format!("no image recorded for {name}")))?;
                m.parse_element(y)
            };
            let mut kappa = Q::zero();
            let mut xi = Q::zero();
            for (n, r) in runs.iter().enumerate() {
                let z = chain_from_records(&h, Some(*degree), &r.z)?;
                let cert = r.fill.resolve(&m)?;
                let mut y = Chain::zero(&m, *degree);
                for (t, v) in z.terms() {
                    y.add_term(t.iter().map(&image).collect::<Result<_>>()?, v.clone());
                }
                if y != cert.boundary {
                    return Err(Error::Certificate(format!("run {n}: boundary mismatch with the pushed chain")));
                }
                cert.verify().map_err(|e| Error::Certificate(format!("run {n}: {e}")))?;
                let ratio = crate::fill::ratio(&cert.primitive, &z)?;
                check_eq("run ratio", &rational::parse(&r.ratio)?, &ratio)?;
                let (k, x) = (rational::parse(&r.kappa)?, rational::parse(&r.xi)?);
                let bound = constant_c(*degree, &k, &x);
                check_eq("run bound", &rational::parse(&r.bound)?, &bound)?;
                if ratio > bound {
                    return Err(Error::Certificate(format!("run {n}: ratio exceeds the constant")));
                }
                kappa = kappa.max(k);
                xi = xi.max(x);
            }
            if *tower != TowerInputs::new(*degree, &kappa, &xi) {
                return Err(Error::Certificate("tower inputs mismatch".into()));
            }
            Ok(format!(
                "pipeline certificate ok: {} runs, constant {}",
                runs.len(),
                tower.constant
            ))
        }
        Certificate::Tower { xi, rows } => {
            let xis = xi.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
            let expected = crate::mitosis::tower(xis.len(), |q| xis[q - 1].clone());
            if expected.rows.len() != rows.len() {
                return Err(Error::Certificate("tower has the wrong number of rows".into()));
            }
            for (a, b) in rows.iter().zip(&expected.rows) {
                check_row(a, b)?;
            }
            Ok(format!("tower certificate ok: {} degrees", rows.len() - 1))
        }
    }
}

fn check_row(stated: &TowerRow, expected: &TowerRow) -> Result<()> {
    if stated.n != n_sequence(stated.q) || stated.q != expected.q {
        return Err(Error::Certificate(format!("row {}: n mismatch", stated.q)));
    }
    check_eq(&format!("row {} kappa", stated.q), &stated.kappa, &expected.kappa)?;
    check_eq(&format!("row {} E bound", stated.q), &stated.e_bound, &expected.e_bound)?;
    if stated != expected {
        return Err(Error::Certificate(format!("row {} mismatch", stated.q)));
    }
    Ok(())
}
