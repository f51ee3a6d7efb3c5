//! l1-minimal fillings, boundary membership and uniform boundary condition
//! constants, all by exact linear programming.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{faces, Chain, Tuple};
use crate::error::{Error, Result};
use crate::groups::{Group, Homomorphism};
use crate::homology::{all_tuples, basis_size, BoundaryMatrix, DEFAULT_SIZE_CAP};
use crate::lp::{solve, LpOutcome, LpProblem, Relation};
use crate::rational::{self, Q};

/// Which `(q+1)`-tuples a filling may use.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportPolicy {
    /// All of `G^{q+1}` (finite groups, subject to the size cap).
    Full { cap: u128 },
    /// Exactly these tuples.
    Explicit(BTreeSet<Tuple>),
    /// Tuples with a face in the support of `z` whose remaining entry has
    /// word length at most `radius`; the radius doubles on infeasibility
    /// until it would exceed `max_radius`.
    Ball { radius: usize, max_radius: usize },
}

impl SupportPolicy {
    pub fn full() -> Self {
        SupportPolicy::Full { cap: DEFAULT_SIZE_CAP }
    }

    pub fn ball() -> Self {
        SupportPolicy::Ball {
            radius: 3,
            max_radius: 24,
        }
    }

    /// Full support on finite groups, growing balls otherwise.
    pub fn auto(group: &Group) -> Self {
        if group.is_finite() {
            SupportPolicy::full()
        } else {
            SupportPolicy::ball()
        }
    }
}

/// A primitive `c` of `z` together with the exact ratio `‖c‖₁ / ‖z‖₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct FillCertificate {
    pub boundary: Chain,
    pub primitive: Chain,
    pub ratio: Q,
    /// `full`, `explicit:<n>` or `radius:<L>`.
    pub support: String,
    pub method: String,
}

pub const LP_METHOD: &str = "exact-simplex";

impl FillCertificate {
    fn zero(z: &Chain, support: String) -> FillCertificate {
        FillCertificate {
            boundary: z.clone(),
            primitive: Chain::zero(z.group(), z.degree() + 1),
            ratio: Q::zero(),
            support,
            method: LP_METHOD.into(),
        }
    }

    /// Re-checks `∂c = z` and the stated ratio, with no optimization.
    pub fn verify(&self) -> Result<()> {
        if self.primitive.degree() != self.boundary.degree() + 1 {
            return Err(Error::Certificate("primitive has the wrong degree".into()));
        }
        if self.primitive.group() != self.boundary.group() {
            return Err(Error::Certificate("primitive and boundary live over different groups".into()));
        }
        if self.primitive.boundary()? != self.boundary {
            return Err(Error::Certificate("boundary mismatch".into()));
        }
        let expected = ratio(&self.primitive, &self.boundary)?;
        if expected != self.ratio {
            return Err(Error::Certificate(format!(
                "ratio mismatch: stated {}, recomputed {}",
                rational::render(&self.ratio),
                rational::render(&expected)
            )));
        }
        Ok(())
    }
}

/// `‖c‖₁ / ‖z‖₁`, and 0 for `z = 0 = c`.
pub fn ratio(c: &Chain, z: &Chain) -> Result<Q> {
    if z.is_zero() {
        if c.is_zero() {
            Ok(Q::zero())
        } else {
            Err(Error::Certificate("nonzero primitive of the zero chain".into()))
        }
    } else {
        Ok(c.l1_norm() / z.l1_norm())
    }
}

/// Minimizes `‖c‖₁` subject to `∂c = z` over the support given by `policy`.
pub fn fill_min(z: &Chain, policy: &SupportPolicy) -> Result<FillCertificate> {
    let describe = match policy {
        SupportPolicy::Full { .. } => "full".to_string(),
        SupportPolicy::Explicit(s) => format!("explicit:{}", s.len()),
        SupportPolicy::Ball { radius, .. } => format!("radius:{radius}"),
    };
    if z.is_zero() {
        return Ok(FillCertificate::zero(z, describe));
    }
    if z.degree() == 0 {
        // ∂_1 = 0, so the only degree-0 boundary is 0
        return Err(Error::NotABoundary);
    }
    let g = z.group();
    let q = z.degree();
    match policy {
        SupportPolicy::Full { cap } => {
            let tuples = all_tuples(g, q + 1, *cap)?;
            let c = fill_over(z, tuples.iter())?.ok_or(Error::NotABoundary)?;
            certify(z, c, describe)
        }
        SupportPolicy::Explicit(set) => {
            if let Some(t) = set.iter().find(|t| t.len() != q + 1) {
                return Err(Error::Degree(format!("support tuple of length {} for degree {}", t.len(), q + 1)));
            }
            if let Some(bad) = set.iter().flatten().find(|x| !g.contains(x)) {
                return Err(Error::NotAMember {
                    element: format!("{bad:?}"),
                    group: g.label(),
                });
            }
            let c = fill_over(z, set.iter())?.ok_or(Error::NotABoundary)?;
            certify(z, c, describe)
        }
        SupportPolicy::Ball { radius, max_radius } => {
            let mut r = (*radius).max(1);
            loop {
                let cands = neighborhood(z, r);
                if let Some(c) = fill_over(z, cands.iter())? {
                    return certify(z, c, format!("radius:{r}"));
                }
                if r >= *max_radius {
                    return Err(Error::SupportExhausted(r));
                }
                r = (2 * r).min(*max_radius);
            }
        }
    }
}

fn certify(z: &Chain, c: Chain, support: String) -> Result<FillCertificate> {
    if c.boundary()? != *z {
        return Err(Error::Lp("solver returned a non-primitive".into()));
    }
    let ratio = ratio(&c, z)?;
    Ok(FillCertificate {
        boundary: z.clone(),
        primitive: c,
        ratio,
        support,
        method: LP_METHOD.into(),
    })
}

/// `(q+1)`-tuples having a face in `supp z`, with the inserted entry drawn
/// from the word-length ball of radius `r`.
pub fn neighborhood(z: &Chain, r: usize) -> BTreeSet<Tuple> {
    let g = z.group();
    let ball = g.ball(r);
    let mut out = BTreeSet::new();
    for s in z.support() {
        for x in &ball {
            let mut t = vec![x.clone()];
            t.extend_from_slice(s);
            out.insert(t);
            let mut t = s.clone();
            t.push(x.clone());
            out.insert(t);
            let xi = g.inv(x);
            for j in 0..s.len() {
                let mut t = s[..j].to_vec();
                t.push(x.clone());
                t.push(g.mul(&xi, &s[j]));
                t.extend_from_slice(&s[j + 1..]);
                out.insert(t);
            }
        }
    }
    out
}

/// The l1-minimal `c` supported on `tuples` with `∂c = z`, if any.
fn fill_over<'a, I>(z: &Chain, tuples: I) -> Result<Option<Chain>>
where
    I: Iterator<Item = &'a Tuple>,
{
    let g = z.group();
    let mut row_of: HashMap<Tuple, usize> = HashMap::new();
    let mut rhs: Vec<Q> = Vec::new();
    for (t, v) in z.terms() {
        row_of.insert(t.clone(), rhs.len());
        rhs.push(v.clone());
    }
    let mut cols: Vec<(Tuple, Vec<(usize, Q)>)> = Vec::new();
    for t in tuples {
        let mut col: BTreeMap<usize, i64> = BTreeMap::new();
        for (face, s) in faces(g, t) {
            let next = rhs.len();
            let i = *row_of.entry(face).or_insert_with(|| next);
            if i == next {
                rhs.push(Q::zero());
            }
            *col.entry(i).or_insert(0) += s as i64;
        }
        let col: Vec<(usize, Q)> = col.into_iter().filter(|(_, v)| *v != 0).map(|(i, v)| (i, rational::q(v))).collect();
        if !col.is_empty() {
            cols.push((t.clone(), col));
        }
    }
    // presolve: a column that is alone in a row with zero right-hand side
    // must vanish; dropping it can isolate further columns
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); rhs.len()];
    for (j, (_, col)) in cols.iter().enumerate() {
        for (i, _) in col {
            touching[*i].push(j);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut count: Vec<usize> = touching.iter().map(|t| t.len()).collect();
    let mut queue: Vec<usize> = (0..rhs.len()).filter(|&i| count[i] == 1 && rhs[i].is_zero()).collect();
    while let Some(i) = queue.pop() {
        if count[i] != 1 {
            continue;
        }
        let Some(&j) = touching[i].iter().find(|&&j| alive[j]) else {
            continue;
        };
        alive[j] = false;
        for (r, _) in &cols[j].1 {
            count[*r] -= 1;
            if count[*r] == 1 && rhs[*r].is_zero() {
                queue.push(*r);
            }
        }
    }
    // a row of z that no column reaches can never be matched
    if (0..rhs.len()).any(|i| count[i] == 0 && !rhs[i].is_zero()) {
        return Ok(None);
    }
    let cols: Vec<(Tuple, Vec<(usize, Q)>)> =
        cols.into_iter().zip(alive).filter(|(_, a)| *a).map(|(c, _)| c).collect();
    let n = cols.len();
    let mut lp = LpProblem::new(2 * n);
    lp.objective = vec![rational::one(); 2 * n];
    let mut rows: Vec<Vec<(usize, Q)>> = vec![Vec::new(); rhs.len()];
    for (j, (_, col)) in cols.iter().enumerate() {
        for (i, v) in col {
            rows[*i].push((j, v.clone()));
            rows[*i].push((n + j, -v.clone()));
        }
    }
    for (row, b) in rows.into_iter().zip(rhs) {
        if row.is_empty() {
            continue;
        }
        lp.constrain(row, Relation::Eq, b);
    }
    match solve(&lp)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Lp("l1 objective cannot be unbounded".into())),
        LpOutcome::Optimal(sol) => {
            let mut c = Chain::zero(g, z.degree() + 1);
            for (j, (t, _)) in cols.iter().enumerate() {
                let v = &sol.x[j] - &sol.x[n + j];
                c.add_term(t.clone(), v);
            }
            Ok(Some(c))
        }
    }
}

/// Whether `z` bounds over the given support. A degree-0 chain is a
/// boundary only if it is zero.
pub fn is_boundary(z: &Chain, policy: &SupportPolicy) -> Result<bool> {
    match fill_min(z, policy) {
        Ok(_) => Ok(true),
        Err(Error::NotABoundary) | Err(Error::SupportExhausted(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KappaValue {
    Exact(Q),
    Bounds { lower: Q, upper: Q },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaMethod {
    VertexEnumeration,
    Sampled,
}

impl KappaMethod {
    pub fn tag(self) -> &'static str {
        match self {
            KappaMethod::VertexEnumeration => "vertex-enumeration",
            KappaMethod::Sampled => "sampled",
        }
    }
}

/// A `(q, κ)`-UBC constant of a finite group.
#[derive(Clone, Debug)]
pub struct UbcConstant {
    pub group: Group,
    pub degree: usize,
    pub value: KappaValue,
    pub method: KappaMethod,
    /// Fillings attaining the lower end: one per vertex in exact mode, the
    /// best sample otherwise.
    pub certificates: Vec<FillCertificate>,
    /// In bounds mode, fillings of the projected unit vectors that witness
    /// the upper bound.
    pub upper_witnesses: Vec<FillCertificate>,
}

impl UbcConstant {
    pub fn lower(&self) -> &Q {
        match &self.value {
            KappaValue::Exact(k) => k,
            KappaValue::Bounds { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> &Q {
        match &self.value {
            KappaValue::Exact(k) => k,
            KappaValue::Bounds { upper, .. } => upper,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KappaOptions {
    /// Largest `|G|^q` handled by exact vertex enumeration.
    pub vertex_cap: usize,
    /// Largest number of row subsets examined during vertex enumeration.
    pub subset_budget: u128,
    pub size_cap: u128,
    pub samples: usize,
    pub seed: u64,
}

impl Default for KappaOptions {
    fn default() -> Self {
        KappaOptions {
            vertex_cap: 24,
            subset_budget: 200_000,
            size_cap: DEFAULT_SIZE_CAP,
            samples: 200,
            seed: 0,
        }
    }
}

/// `κ = max fill_min(v)` over the vertices `v` of `{z ∈ im ∂_{q+1} : ‖z‖₁ ≤ 1}`.
///
/// The vertices of an l1-ball sliced by a subspace `L` are the normalized
/// vectors of `L` with minimal support, so they are found by solving
/// `dim L - 1` coordinate constraints on a basis of `L`. Past the caps the
/// result is a pair of certified bounds instead.
pub fn ubc_kappa_exact(g: &Group, q: usize, opts: &KappaOptions) -> Result<UbcConstant> {
    if q == 0 {
        return Err(Error::Degree("UBC constants start in degree 1".into()));
    }
    basis_size(g, q + 1, opts.size_cap)?;
    let m = BoundaryMatrix::new(g, q + 1, opts.size_cap)?;
    let n = m.rows.len();
    let mut cols: Vec<Vec<Q>> = vec![vec![Q::zero(); n]; m.cols.len()];
    for &(i, j, v) in &m.entries {
        cols[j][i] = rational::q(v);
    }
    let basis = independent_columns(&cols);
    let r = basis.len();
    let exact = |k: Q, certs| UbcConstant {
        group: g.clone(),
        degree: q,
        value: KappaValue::Exact(k),
        method: KappaMethod::VertexEnumeration,
        certificates: certs,
        upper_witnesses: Vec::new(),
    };
    if r == 0 {
        return Ok(exact(Q::zero(), Vec::new()));
    }
    let subsets = rational::binomial(n, r - 1);
    if n <= opts.vertex_cap && subsets <= opts.subset_budget {
        let vertices = circuits(&basis, n);
        let mut kappa = Q::zero();
        let mut certs = Vec::with_capacity(vertices.len());
        for v in vertices {
            let z = Chain::from_terms(
                g,
                q,
                v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (m.rows[i].clone(), x.clone())),
            )?;
            let cert = fill_min(&z, &SupportPolicy::Full { cap: opts.size_cap })?;
            if cert.ratio > kappa {
                kappa = cert.ratio.clone();
            }
            certs.push(cert);
        }
        return Ok(exact(kappa, certs));
    }

    // bounds: any z in L is Σ z_i P e_i with P the orthogonal projection
    // onto L, so filling every P e_i bounds κ by the largest filling norm
    let (lower, best) = kappa_sampled(g, q, opts.samples, opts.seed, opts.size_cap)?;
    let mut upper = Q::zero();
    let mut witnesses = Vec::new();
    for y in projected_units(&basis, n) {
        let z = Chain::from_terms(
            g,
            q,
            y.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (m.rows[i].clone(), x.clone())),
        )?;
        let cert = fill_min(&z, &SupportPolicy::Full { cap: opts.size_cap })?;
        let norm = cert.primitive.l1_norm();
        if norm > upper {
            upper = norm;
        }
        witnesses.push(cert);
    }
    if upper < lower {
        return Err(Error::Lp("upper bound below a sampled ratio".into()));
    }
    Ok(UbcConstant {
        group: g.clone(),
        degree: q,
        value: KappaValue::Bounds { lower, upper },
        method: KappaMethod::Sampled,
        certificates: best.into_iter().collect(),
        upper_witnesses: witnesses,
    })
}

/// Largest filling ratio over `samples` random boundaries `∂c`, with the
/// certificate that attains it.
pub fn kappa_sampled(g: &Group, q: usize, samples: usize, seed: u64, cap: u128) -> Result<(Q, Option<FillCertificate>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<FillCertificate> = None;
    let policy = SupportPolicy::Full { cap };
    for _ in 0..samples {
        let terms = rng.gen_range(1..=4);
        let c = Chain::random(g, q + 1, terms, 0, &mut rng);
        let z = c.boundary()?;
        if z.is_zero() {
            continue;
        }
        let cert = fill_min(&z, &policy)?;
        if best.as_ref().map_or(true, |b| cert.ratio > b.ratio) {
            best = Some(cert);
        }
    }
    Ok((best.as_ref().map_or_else(Q::zero, |b| b.ratio.clone()), best))
}

/// A maximal independent subset of the given vectors, in input order.
fn independent_columns(cols: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut echelon: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut kept = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for (p, e) in &echelon {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (a, b) in v.iter_mut().zip(e) {
                    if !b.is_zero() {
                        *a -= &f * b;
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = rational::one() / v[p].clone();
            for a in v.iter_mut() {
                *a *= &inv;
            }
            for (_, e) in echelon.iter_mut() {
                if !e[p].is_zero() {
                    let f = e[p].clone();
                    for (a, b) in e.iter_mut().zip(&v) {
                        if !b.is_zero() {
                            *a -= &f * b;
                        }
                    }
                }
            }
            echelon.push((p, v));
            kept.push(c.clone());
        }
    }
    kept
}

/// Kernel vector of an `(r-1) × r` matrix of rank `r-1`.
fn kernel_vector(rows: &[Vec<Q>], r: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = rational::one() / m[row][col].clone();
        for a in m[row].iter_mut() {
            *a *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pr = m[row].clone();
                for (a, b) in m[i].iter_mut().zip(&pr) {
                    *a -= &f * b;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() + 1 != r {
        return None;
    }
    let free = (0..r).find(|c| !pivots.contains(c))?;
    let mut y = vec![Q::zero(); r];
    y[free] = rational::one();
    for (i, &p) in pivots.iter().enumerate() {
        y[p] = -m[i][free].clone();
    }
    Some(y)
}

/// The support-minimal vectors of the span of `basis` (vectors of length
/// `n`), normalized to l1-norm one with a positive leading entry.
fn circuits(basis: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let r = basis.len();
    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut subset: Vec<usize> = (0..r - 1).collect();
    loop {
        let rows: Vec<Vec<Q>> = subset.iter().map(|&i| basis.iter().map(|b| b[i].clone()).collect()).collect();
        if let Some(y) = kernel_vector(&rows, r) {
            let mut v = vec![Q::zero(); n];
            for (coef, b) in y.iter().zip(basis) {
                if coef.is_zero() {
                    continue;
                }
                for (a, x) in v.iter_mut().zip(b) {
                    if !x.is_zero() {
                        *a += coef * x;
                    }
                }
            }
            let norm = v.iter().fold(Q::zero(), |acc, x| acc + x.abs());
            if !norm.is_zero() {
                let lead = v.iter().find(|x| !x.is_zero()).unwrap().clone();
                let scale = if lead.is_negative() { -norm } else { norm };
                found.insert(v.into_iter().map(|x| x / &scale).collect());
            }
        }
        // next (r-1)-subset of 0..n in lexicographic order
        let k = subset.len();
        let Some(i) = (0..k).rev().find(|&i| subset[i] != i + n - k) else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
        if k == 0 {
            break;
        }
    }
    found.into_iter().collect()
}

/// `P e_i` for every unit vector, `P` the orthogonal projection onto the
/// span of `basis`.
fn projected_units(basis: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let r = basis.len();
    // Gram matrix inverse by Gauss-Jordan
    let mut aug: Vec<Vec<Q>> = (0..r)
        .map(|i| {
            let mut row: Vec<Q> = (0..r)
                .map(|j| basis[i].iter().zip(&basis[j]).fold(Q::zero(), |acc, (a, b)| acc + a * b))
                .collect();
            row.extend((0..r).map(|j| if i == j { rational::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..r {
        let p = (col..r).find(|&i| !aug[i][col].is_zero()).expect("independent basis");
        aug.swap(col, p);
        let inv = rational::one() / aug[col][col].clone();
        for a in aug[col].iter_mut() {
            *a *= &inv;
        }
        for i in 0..r {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                let pr = aug[col].clone();
                for (a, b) in aug[i].iter_mut().zip(&pr) {
                    *a -= &f * b;
                }
            }
        }
    }
    let ginv: Vec<Vec<Q>> = aug.into_iter().map(|row| row[r..].to_vec()).collect();
    (0..n)
        .map(|i| {
            // P e_i = Σ_a basis_a (G⁻¹ Bᵀ e_i)_a
            let bt: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
            let coef: Vec<Q> = (0..r)
                .map(|a| ginv[a].iter().zip(&bt).fold(Q::zero(), |acc, (x, y)| acc + x * y))
                .collect();
            let mut v = vec![Q::zero(); n];
            for (c, b) in coef.iter().zip(basis) {
                if c.is_zero() {
                    continue;
                }
                for (a, x) in v.iter_mut().zip(b) {
                    *a += c * x;
                }
            }
            v
        })
        .collect()
}

/// Per-instance section data for a homomorphism.
#[derive(Clone, Debug)]
pub struct SectionBatch {
    pub certificates: Vec<FillCertificate>,
    /// `‖c‖₁ / ‖z‖₁` measured against the source chain.
    pub ratios: Vec<Q>,
    pub kappa: Q,
}

/// Fills `h_* z` for each boundary `z` of the source.
pub fn section_on(zs: &[Chain], h: &Homomorphism, policy: &SupportPolicy) -> Result<SectionBatch> {
    let mut out = SectionBatch {
        certificates: Vec::new(),
        ratios: Vec::new(),
        kappa: Q::zero(),
    };
    let source_policy = SupportPolicy::auto(h.source());
    for z in zs {
        if !is_boundary(z, &source_policy)? {
            return Err(Error::NotABoundary);
        }
        let cert = fill_min(&z.push(h)?, policy)?;
        let r = if z.is_zero() {
            Q::zero()
        } else {
            cert.primitive.l1_norm() / z.l1_norm()
        };
        if r > out.kappa {
            out.kappa = r.clone();
        }
        out.ratios.push(r);
        out.certificates.push(cert);
    }
    Ok(out)
}

/// A linear section of `h_*` on boundaries, built lazily.
///
/// Every chain it is applied to is reduced against a growing echelon basis;
/// each basis vector carries one LP filling of its image, and the value on
/// a chain is the same linear combination of those fillings. So `S` is an
/// honest linear map on the span of everything seen so far, and `kappa`
/// records the largest observed `‖S v‖₁ / ‖v‖₁`.
#[derive(Clone, Debug)]
pub struct LinearSection {
    hom: Homomorphism,
    policy: SupportPolicy,
    rows: BTreeMap<usize, Vec<SectionRow>>,
    kappa: Q,
    applications: usize,
}

#[derive(Clone, Debug)]
struct SectionRow {
    pivot: Tuple,
    row: Chain,
    fill: Chain,
}

impl LinearSection {
    pub fn new(hom: &Homomorphism, policy: SupportPolicy) -> Self {
        LinearSection {
            hom: hom.clone(),
            policy,
            rows: BTreeMap::new(),
            kappa: Q::zero(),
            applications: 0,
        }
    }

    pub fn hom(&self) -> &Homomorphism {
        &self.hom
    }

    pub fn kappa(&self) -> &Q {
        &self.kappa
    }

    pub fn applications(&self) -> usize {
        self.applications
    }

    /// Number of basis vectors held in degree `q`.
    pub fn rank(&self, q: usize) -> usize {
        self.rows.get(&q).map_or(0, |r| r.len())
    }

    /// `S(v)` with `∂ S(v) = h_* v`; `v` must be a boundary.
    pub fn apply(&mut self, v: &Chain) -> Result<Chain> {
        if v.group() != self.hom.source() {
            return Err(Error::OracleMismatch("section applied to a chain over the wrong group".into()));
        }
        let q = v.degree();
        let target = self.hom.target().clone();
        if v.is_zero() {
            return Ok(Chain::zero(&target, q + 1));
        }
        if q == 0 {
            return Err(Error::NotABoundary);
        }
        let mut residual = v.clone();
        for r in self.rows.get(&q).into_iter().flatten() {
            let a = residual.coeff(&r.pivot);
            if !a.is_zero() {
                residual.add_scaled(&r.row, &-a)?;
            }
        }
        if let Some((p, lead)) = residual.terms().next().map(|(t, c)| (t.clone(), c.clone())) {
            let row = residual.scale(&(rational::one() / lead));
            let fill = fill_min(&row.push(&self.hom)?, &self.policy)?.primitive;
            let rows = self.rows.entry(q).or_default();
            for r in rows.iter_mut() {
                let b = r.row.coeff(&p);
                if !b.is_zero() {
                    r.row.add_scaled(&row, &-b.clone())?;
                    r.fill.add_scaled(&fill, &-b)?;
                }
            }
            rows.push(SectionRow { pivot: p, row, fill });
        }
        let mut out = Chain::zero(&target, q + 1);
        for r in &self.rows[&q] {
            let a = v.coeff(&r.pivot);
            if !a.is_zero() {
                out.add_scaled(&r.fill, &a)?;
            }
        }
        if out.boundary()? != v.push(&self.hom)? {
            return Err(Error::Pipeline("section value is not a primitive".into()));
        }
        let ratio = out.l1_norm() / v.l1_norm();
        if ratio > self.kappa {
            self.kappa = ratio;
        }
        self.applications += 1;
        Ok(out)
    }
}
