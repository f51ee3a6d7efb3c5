//! The conjugation homotopy
//! `Θ(g_1,…,g_q) = Σ_{j=1}^{q+1} (-1)^j (g_1,…,g_{j-1}, m, m⁻¹g_j m, …, m⁻¹g_q m)`.
//!
//! Expanding `∂Θ + Θ∂` gives `id - C_*(x ↦ m⁻¹xm)`, i.e. the homotopy ends
//! at conjugation by `m⁻¹` in the `x^h = hxh⁻¹` convention. To get a
//! homotopy from the identity to `γ_k` one therefore puts `m = k⁻¹` into
//! the formula; [`Orientation`] makes that choice explicit, and every
//! instance checks the identity on a few basis chains when it is built.

use crate::chain::{Chain, Tuple};
use crate::error::{Error, Result};
use crate::groups::{Element, Group, Homomorphism};
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `m = k`: the homotopy connects the identity with `γ_{k⁻¹}`.
    Literal,
    /// `m = k⁻¹`: the homotopy connects the identity with `γ_k`.
    Inverted,
}

#[derive(Clone, Debug)]
pub struct HomotopyTheta {
    group: Group,
    k: Element,
    orientation: Orientation,
    m: Element,
    m_inv: Element,
    gamma: Homomorphism,
}

impl HomotopyTheta {
    pub fn new(group: &Group, k: &Element, orientation: Orientation) -> Result<Self> {
        let kinv = group.try_inv(k)?;
        let (m, gamma) = match orientation {
            Orientation::Literal => (k.clone(), Homomorphism::conjugation(group, k, true)?),
            Orientation::Inverted => (kinv, Homomorphism::conjugation(group, k, false)?),
        };
        let theta = HomotopyTheta {
            group: group.clone(),
            k: k.clone(),
            orientation,
            m_inv: group.inv(&m),
            m,
            gamma,
        };
        theta.self_test()?;
        Ok(theta)
    }

    /// A homotopy with `∂Θ + Θ∂ = id - C_*(γ_k)`.
    pub fn towards(group: &Group, k: &Element) -> Result<Self> {
        Self::new(group, k, Orientation::Inverted)
    }

    pub fn k(&self) -> &Element {
        &self.k
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The conjugation `γ` with `∂Θ + Θ∂ = id - C_*(γ)`.
    pub fn conjugation(&self) -> &Homomorphism {
        &self.gamma
    }

    pub fn apply(&self, c: &Chain) -> Result<Chain> {
        if *c.group() != self.group {
            return Err(Error::OracleMismatch("Θ applied to a chain over another group".into()));
        }
        let g = &self.group;
        let q = c.degree();
        let mut out = Chain::zero(g, q + 1);
        for (t, v) in c.terms() {
            let conj: Tuple = t.iter().map(|x| g.mul(&g.mul(&self.m_inv, x), &self.m)).collect();
            for j in 1..=q + 1 {
                let mut u = Vec::with_capacity(q + 1);
                u.extend_from_slice(&t[..j - 1]);
                u.push(self.m.clone());
                u.extend_from_slice(&conj[j - 1..]);
                out.add_term(u, rational::sign(j) * v);
            }
        }
        Ok(out)
    }

    /// Whether `∂Θc + Θ∂c = c - γ_* c` holds for `c`.
    pub fn check_identity(&self, c: &Chain) -> Result<bool> {
        let mut lhs = self.apply(c)?.boundary()?;
        if c.degree() > 0 {
            lhs = lhs.plus(&self.apply(&c.boundary()?)?)?;
        }
        let rhs = c.minus(&c.push(&self.gamma)?.rebase(&self.group)?)?;
        Ok(lhs == rhs)
    }

    fn self_test(&self) -> Result<()> {
        let g = &self.group;
        let mut probes = g.generators();
        probes.push(self.k.clone());
        probes.truncate(4);
        let mut chains = vec![Chain::basis(g, vec![])];
        for a in &probes {
            chains.push(Chain::basis(g, vec![a.clone()]));
            for b in &probes {
                chains.push(Chain::basis(g, vec![a.clone(), b.clone()]));
            }
        }
        for c in &chains {
            if !self.check_identity(c)? {
                return Err(Error::Pipeline(format!(
                    "conjugation homotopy orientation mismatch on {c}"
                )));
            }
        }
        Ok(())
    }
}
