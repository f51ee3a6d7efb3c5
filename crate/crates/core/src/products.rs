//! Cross products, the Alexander-Whitney map and cup products.
//!
//! The homological cross product is the Eilenberg-Zilber shuffle map: for a
//! `(p, q)`-shuffle the first factor advances on the positions of the first
//! block and contributes the identity elsewhere, and the sign is the parity
//! of the shuffle permutation.

use num_traits::Zero;

use crate::chain::{Chain, Tuple};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::fill::{fill_min, FillCertificate, SupportPolicy};
use crate::groups::{Element, Group, Homomorphism};
use crate::rational::{self, Q};
use crate::tensor::TensorChain;

/// A `(p, q)`-shuffle: `first[i]` says whether position `i` is taken by the
/// first factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shuffle {
    pub first: Vec<bool>,
    pub sign: i32,
}

/// All `binom(p+q, p)` shuffles in lexicographic order of `first` (with
/// `true < false`, so the identity shuffle comes first).
pub fn shuffles(p: usize, q: usize) -> Vec<Shuffle> {
    fn go(p: usize, q: usize, cur: &mut Vec<bool>, inv: usize, out: &mut Vec<Shuffle>) {
        if p == 0 && q == 0 {
            out.push(Shuffle {
                first: cur.clone(),
                sign: if inv % 2 == 0 { 1 } else { -1 },
            });
            return;
        }
        if p > 0 {
            // every second-factor position already placed precedes this one
            let before = cur.iter().filter(|b| !**b).count();
            cur.push(true);
            go(p - 1, q, cur, inv + before, out);
            cur.pop();
        }
        if q > 0 {
            cur.push(false);
            go(p, q - 1, cur, inv, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(p, q, &mut Vec::with_capacity(p + q), 0, &mut out);
    out
}

fn two_factors(product: &Group) -> Result<(Group, Group)> {
    match product.direct_factors() {
        Some([g, h]) => Ok((g.clone(), h.clone())),
        _ => Err(Error::OracleMismatch(format!(
            "{} is not a direct product of two factors",
            product.label()
        ))),
    }
}

/// `G × H` for the cross product of chains over `G` and `H`.
pub fn product_group(g: &Group, h: &Group) -> Group {
    Group::direct(vec![g.clone(), h.clone()])
}

fn cross_tuples(g: &Group, h: &Group, a: &[Element], b: &[Element], out: &mut Vec<(Tuple, i32)>) {
    for sh in shuffles(a.len(), b.len()) {
        let (mut i, mut j) = (0, 0);
        let mut t = Vec::with_capacity(sh.first.len());
        for &f in &sh.first {
            if f {
                t.push(Element::pair(a[i].clone(), h.identity()));
                i += 1;
            } else {
                t.push(Element::pair(g.identity(), b[j].clone()));
                j += 1;
            }
        }
        out.push((t, sh.sign));
    }
}

/// `a × b` over `product`, which must be `G × H` for the groups of `a`, `b`.
pub fn cross_chain_in(a: &Chain, b: &Chain, product: &Group) -> Result<Chain> {
    let (g, h) = two_factors(product)?;
    if g != *a.group() || h != *b.group() {
        return Err(Error::OracleMismatch("cross product into the wrong product group".into()));
    }
    let mut out = Chain::zero(product, a.degree() + b.degree());
    let mut buf = Vec::new();
    for (s, p) in a.terms() {
        for (t, q) in b.terms() {
            buf.clear();
            cross_tuples(&g, &h, s, t, &mut buf);
            let c = p * q;
            for (u, sign) in buf.drain(..) {
                out.add_term(u, if sign > 0 { c.clone() } else { -c.clone() });
            }
        }
    }
    Ok(out)
}

pub fn cross_chain(a: &Chain, b: &Chain) -> Chain {
    let product = product_group(a.group(), b.group());
    cross_chain_in(a, b, &product).expect("fresh product group")
}

/// The cross product applied to a tensor chain, `B(Σ s ⊗ t) = Σ s × t`.
pub fn cross_tensor(x: &TensorChain, product: &Group) -> Result<Chain> {
    let (g, h) = two_factors(product)?;
    if g != *x.left() || h != *x.right() {
        return Err(Error::OracleMismatch("cross product into the wrong product group".into()));
    }
    let mut out = Chain::zero(product, x.degree());
    let mut buf = Vec::new();
    for ((s, t), c) in x.terms() {
        buf.clear();
        cross_tuples(&g, &h, s, t, &mut buf);
        for (u, sign) in buf.drain(..) {
            out.add_term(u, if sign > 0 { c.clone() } else { -c.clone() });
        }
    }
    Ok(out)
}

/// Alexander-Whitney: `((g_1,h_1),…,(g_q,h_q)) ↦ Σ_j (g_1,…,g_j) ⊗ (h_{j+1},…,h_q)`.
pub fn aw(c: &Chain) -> Result<TensorChain> {
    let (g, h) = two_factors(c.group())?;
    let q = c.degree();
    let mut out = TensorChain::zero(&g, &h, q);
    for (t, v) in c.terms() {
        let gs: Vec<Element> = t.iter().map(|x| x.components()[0].clone()).collect();
        let hs: Vec<Element> = t.iter().map(|x| x.components()[1].clone()).collect();
        for j in 0..=q {
            out.add_term(gs[..j].to_vec(), hs[j..].to_vec(), v.clone());
        }
    }
    Ok(out)
}

/// Drops every tuple with an identity entry (the normalized quotient).
pub fn normalize(c: &Chain) -> Chain {
    let g = c.group();
    let kept = c
        .terms()
        .filter(|(t, _)| !t.iter().any(|x| g.is_identity(x)))
        .map(|(t, v)| (t.clone(), v.clone()));
    let mut out = Chain::zero(g, c.degree());
    for (t, v) in kept {
        out.add_term(t, v);
    }
    out
}

/// `(f × g)((a_1,b_1),…,(a_{p+q},b_{p+q})) = (-1)^{pq} f(a_1,…,a_p) g(b_{p+1},…,b_{p+q})`.
pub fn cross_cochain_in(f: &Cochain, g: &Cochain, product: &Group) -> Result<Cochain> {
    let (gl, gr) = two_factors(product)?;
    if gl != *f.group() || gr != *g.group() {
        return Err(Error::OracleMismatch("cochain cross product into the wrong product group".into()));
    }
    let (p, q) = (f.degree(), g.degree());
    let sign = rational::sign(p * q);
    let (f, g) = (f.clone(), g.clone());
    Ok(Cochain::from_fn(product, p + q, move |t| {
        let a: Vec<Element> = t[..p].iter().map(|x| x.components()[0].clone()).collect();
        let fa = f.eval(&a);
        if fa.is_zero() {
            return fa;
        }
        let b: Vec<Element> = t[p..].iter().map(|x| x.components()[1].clone()).collect();
        &sign * fa * g.eval(&b)
    }))
}

pub fn cross_cochain(f: &Cochain, g: &Cochain) -> Cochain {
    let product = product_group(f.group(), g.group());
    cross_cochain_in(f, g, &product).expect("fresh product group")
}

/// `f ∪ g = Δ^*(f × g)`, i.e. `(-1)^{pq} f(g_1,…,g_p) g(g_{p+1},…,g_{p+q})`.
///
/// With `δ` the plain adjoint of `∂`, this product satisfies
/// `δ(f ∪ g) = (-1)^q δf ∪ g + f ∪ δg`.
pub fn cup(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    if f.group() != g.group() {
        return Err(Error::OracleMismatch("cup product of cochains on different groups".into()));
    }
    let (p, q) = (f.degree(), g.degree());
    let sign = rational::sign(p * q);
    let (f2, g2) = (f.clone(), g.clone());
    let lazy = Cochain::from_fn(f.group(), p + q, move |t| {
        let fa = f2.eval(&t[..p]);
        if fa.is_zero() {
            return fa;
        }
        &sign * fa * g2.eval(&t[p..])
    });
    if f.is_lazy() || g.is_lazy() {
        return Ok(lazy);
    }
    Ok(lazy.materialize().unwrap_or(lazy))
}

/// Both sides of `⟨f × g, c × d⟩ = (-1)^{pq} ⟨f, c⟩ ⟨g, d⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairReport {
    pub p: usize,
    pub q: usize,
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
}

/// Checks the pairing compatibility of cross products for cocycles `f`, `g`
/// and cycles `c`, `d`. Cycles are always checked; cocycles are checked
/// whenever the group is finite and small enough to tabulate `δf`.
pub fn pair_compat_check(f: &Cochain, g: &Cochain, c: &Chain, d: &Chain) -> Result<PairReport> {
    for (name, x) in [("c", c), ("d", d)] {
        if x.degree() > 0 && !x.boundary()?.is_zero() {
            return Err(Error::Degree(format!("{name} is not a cycle")));
        }
    }
    for (name, x) in [("f", f), ("g", g)] {
        if x.group().is_finite() {
            if let Ok(false) = x.coboundary().is_zero() {
                return Err(Error::Degree(format!("{name} is not a cocycle")));
            }
        }
    }
    let product = product_group(c.group(), d.group());
    let fg = cross_cochain_in(f, g, &product)?;
    let cd = cross_chain_in(c, d, &product)?;
    let lhs = fg.pair(&cd)?;
    let rhs = rational::sign(f.degree() * g.degree()) * f.pair(c)? * g.pair(d)?;
    Ok(PairReport {
        p: f.degree(),
        q: g.degree(),
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// A filling `ξ` of `(B∘A - id)(Δ_* z)` over `G × G`, with the ratio
/// `‖ξ‖₁ / ‖z‖₁` used as the empirical norm of the homotopy.
#[derive(Clone, Debug)]
pub struct XiFill {
    pub certificate: FillCertificate,
    pub ratio: Q,
}

impl XiFill {
    pub fn xi(&self) -> &Chain {
        &self.certificate.primitive
    }
}

pub fn xi_fill(z: &Chain, product: &Group, policy: &SupportPolicy) -> Result<XiFill> {
    let diag = Homomorphism::diagonal_into(z.group(), product)?;
    let dz = z.push(&diag)?;
    let target = cross_tensor(&aw(&dz)?, product)?.minus(&dz)?;
    let certificate = fill_min(&target, policy)?;
    let ratio = if z.is_zero() {
        Q::zero()
    } else {
        certificate.primitive.l1_norm() / z.l1_norm()
    };
    Ok(XiFill { certificate, ratio })
}
