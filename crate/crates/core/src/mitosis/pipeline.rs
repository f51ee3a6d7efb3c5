//! Explicit bounded primitives through a mitosis.
//!
//! Given `H --φ--> H' --φ'--> K --ψ--> G --i--> M` with `i` a mitosis and
//! a boundary `z` over `H`, the pipeline produces `c'` over `M` with
//! `∂c' = (i∘f)_* z`, `f = ψ∘φ'∘φ`, whose norm is controlled by the
//! section constants of `φ` and `ψ`:
//!
//! ```text
//! D(z) = A(Δz) - z⊗() - ()⊗z
//! E    = (ψφ'⊗ψφ')(S⊗S)(id⊗∂)x + (T⊗ψ)(φ'⊗φ')U,   U = (φ⊗φ)x - ∂(S⊗S)(id⊗∂)x
//! E'   = B(E(D z)) - (f×f)_* ξ,                     ∂ξ = (B∘A - id)(Δz)
//! c'   = Θ(γ_d (i∘f)_* z) - μ_* E'
//! ```
//!
//! `S` and `T` are linear sections of `φ` and `ψ`, `Θ` the homotopy from
//! the identity to `γ_k` with `k = s·d⁻¹`, so that `γ_k∘γ_d = γ_s`.

use num_traits::Zero;

use super::theta::HomotopyTheta;
use super::tower::{constant_c, e_bound};
use super::{mu_hom, MitosisData};
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::fill::{is_boundary, FillCertificate, LinearSection, SupportPolicy};
use crate::groups::{Group, Homomorphism};
use crate::products::{aw, cross_tensor, product_group, xi_fill};
use crate::rational::Q;
use crate::tensor::TensorChain;

pub const PIPELINE_METHOD: &str = "mitosis-pipeline";

/// `D(z) = A(Δz) - z⊗() - ()⊗z`, with `Δ` landing in `hh = H × H`.
pub fn dmap(z: &Chain, hh: &Group) -> Result<TensorChain> {
    let h = z.group();
    let diag = Homomorphism::diagonal_into(h, hh)?;
    let mut x = aw(&z.push(&diag)?)?;
    let unit = Chain::basis(h, vec![]);
    x = x.minus(&TensorChain::elementary(z, &unit))?;
    x = x.minus(&TensorChain::elementary(&unit, z))?;
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub degree: usize,
    pub phi: Homomorphism,
    pub phi_prime: Homomorphism,
    pub psi: Homomorphism,
    pub mitosis: MitosisData,
    /// Support policy for every filling; `None` picks per group.
    pub policy: Option<SupportPolicy>,
}

impl PipelineConfig {
    /// Every map the identity on `g`, followed by the given mitosis of `g`.
    pub fn identities(g: &Group, degree: usize, mitosis: MitosisData) -> Self {
        let id = Homomorphism::identity(g);
        PipelineConfig {
            degree,
            phi: id.clone(),
            phi_prime: id.clone(),
            psi: id,
            mitosis,
            policy: None,
        }
    }

    /// `f = ψ∘φ'∘φ`.
    pub fn f(&self) -> Result<Homomorphism> {
        self.phi.then(&self.phi_prime)?.then(&self.psi)
    }

    fn policy_for(&self, g: &Group) -> SupportPolicy {
        self.policy.clone().unwrap_or_else(|| SupportPolicy::auto(g))
    }
}

/// One pipeline application.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    /// `∂c' = (i∘f)_* z` over `M`.
    pub certificate: FillCertificate,
    pub z: Chain,
    /// `‖c'‖₁ / ‖z‖₁`.
    pub ratio: Q,
    /// Largest section ratio seen so far.
    pub kappa: Q,
    /// Largest `‖ξ‖₁ / ‖z‖₁` seen so far.
    pub xi: Q,
    /// `constant_c(q, kappa, xi)`.
    pub bound: Q,
    pub d_norm: Q,
    pub e_norm: Q,
}

pub struct Pipeline {
    cfg: PipelineConfig,
    f: Homomorphism,
    hh: Group,
    gg: Group,
    ff: Homomorphism,
    phi2: Homomorphism,
    phi_prime2: Homomorphism,
    psi2: Homomorphism,
    after_phi: Homomorphism,
    s_section: LinearSection,
    t_section: LinearSection,
    theta: HomotopyTheta,
    gamma_d: Homomorphism,
    mu: Homomorphism,
    push_z: Homomorphism,
    xi_max: Q,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        if cfg.degree < 1 {
            return Err(Error::Degree("the pipeline needs degree at least 1".into()));
        }
        let f = cfg.f()?;
        let m = &cfg.mitosis;
        if *cfg.psi.target() != m.group {
            return Err(Error::OracleMismatch("ψ does not land in the group of the mitosis".into()));
        }
        let h = cfg.phi.source().clone();
        let g = m.group.clone();
        let hh = product_group(&h, &h);
        let gg = product_group(&g, &g);
        let ff = Homomorphism::product(vec![f.clone(), f.clone()]).with_groups(&hh, &gg)?;
        let mu = mu_hom(m, &gg)?;
        let amb = &m.ambient;
        let k = amb.mul(&m.s, &amb.inv(&m.d));
        let theta = HomotopyTheta::towards(amb, &k)?;
        let gamma_d = Homomorphism::conjugation(amb, &m.d, false)?;
        let push_z = f.then(&m.injection)?;
        let s_section = LinearSection::new(&cfg.phi, cfg.policy_for(cfg.phi.target()));
        let t_section = LinearSection::new(&cfg.psi, cfg.policy_for(cfg.psi.target()));
        Ok(Pipeline {
            phi2: cfg.phi.clone(),
            phi_prime2: cfg.phi_prime.clone(),
            psi2: cfg.psi.clone(),
            after_phi: cfg.phi_prime.then(&cfg.psi)?,
            f,
            hh,
            gg,
            ff,
            s_section,
            t_section,
            theta,
            gamma_d,
            mu,
            push_z,
            xi_max: Q::zero(),
            cfg,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn f(&self) -> &Homomorphism {
        &self.f
    }

    /// `i∘f: H → M`.
    pub fn push_map(&self) -> &Homomorphism {
        &self.push_z
    }

    /// The larger of the two observed section constants.
    pub fn kappa(&self) -> Q {
        self.s_section.kappa().clone().max(self.t_section.kappa().clone())
    }

    pub fn xi(&self) -> &Q {
        &self.xi_max
    }

    /// `E(x)` for a boundary `x` in intermediate bidegrees, checking every
    /// intermediate membership claim and `∂E(x) = (f⊗f)x`.
    pub fn emap(&mut self, x: &TensorChain) -> Result<TensorChain> {
        let q = x.degree();
        let (h, g) = (self.cfg.phi.source().clone(), self.cfg.mitosis.group.clone());
        if *x.left() != h || *x.right() != h {
            return Err(Error::OracleMismatch("E applied to a tensor over the wrong groups".into()));
        }
        if x.is_zero() {
            return Ok(TensorChain::zero(&g, &g, q + 1));
        }
        if let Some(p) = x.bidegrees().into_iter().find(|&p| p == 0 || p == q) {
            return Err(Error::Pipeline(format!("E needs intermediate bidegrees, found ({p}, {})", q - p)));
        }
        if !x.boundary()?.is_zero() {
            return Err(Error::Pipeline("E applied to a tensor that is not a cycle".into()));
        }
        let h1 = self.cfg.phi.target().clone();
        let k = self.cfg.phi_prime.target().clone();

        // P' = (S⊗S)(id⊗∂)x over H'⊗H'
        let w = x.d_right();
        let s = &mut self.s_section;
        let p = w
            .map_right(&h1, 1, |c| s.apply(c))?
            .map_left(&h1, 1, |c| s.apply(c))?;

        let u = x.push(&self.phi2, &self.phi2)?.minus(&p.boundary()?)?;
        if !u.d_right().is_zero() {
            return Err(Error::Pipeline("(id⊗∂)U ≠ 0".into()));
        }
        if !u.d_left().is_zero() {
            return Err(Error::Pipeline("(∂⊗id)U ≠ 0".into()));
        }
        let v = u.push(&self.phi_prime2, &self.phi_prime2)?;
        let policy = self.cfg.policy_for(&k);
        for (t, slice) in v.left_slices().into_iter().chain(v.right_slices()) {
            if slice.degree() > 0 && !is_boundary(&slice, &policy)? {
                return Err(Error::Pipeline(format!(
                    "φ'-pushed slice at {} is not a boundary",
                    crate::chain::tuple_name(&k, &t)
                )));
            }
        }
        let t_sec = &mut self.t_section;
        let psi = &self.psi2;
        let qq = v
            .map_right(&g, 0, |c| c.push(psi))?
            .map_left(&g, 1, |c| t_sec.apply(c))?;
        let e = p.push(&self.after_phi, &self.after_phi)?.plus(&qq)?;

        if e.boundary()? != x.push(&self.f, &self.f)? {
            return Err(Error::Pipeline("∂E(x) ≠ (f⊗f)x".into()));
        }
        let bound = e_bound(q, &self.kappa()) * x.l1_norm();
        if e.l1_norm() > bound {
            return Err(Error::Pipeline(format!(
                "‖E(x)‖₁ = {} exceeds the bound {}",
                crate::rational::render(&e.l1_norm()),
                crate::rational::render(&bound)
            )));
        }
        Ok(e)
    }

    /// `c'` for one boundary `z` of the configured degree over `H`.
    pub fn run(&mut self, z: &Chain) -> Result<PipelineRun> {
        let q = self.cfg.degree;
        let h = self.cfg.phi.source().clone();
        let amb = self.cfg.mitosis.ambient.clone();
        if *z.group() != h || z.degree() != q {
            return Err(Error::OracleMismatch(format!("the pipeline takes degree-{q} chains over {}", h.label())));
        }
        let y = z.push(&self.push_z)?;
        if z.is_zero() {
            return Ok(PipelineRun {
                certificate: FillCertificate {
                    boundary: y.clone(),
                    primitive: Chain::zero(&amb, q + 1),
                    ratio: Q::zero(),
                    support: "pipeline".into(),
                    method: PIPELINE_METHOD.into(),
                },
                z: z.clone(),
                ratio: Q::zero(),
                kappa: self.kappa(),
                xi: self.xi_max.clone(),
                bound: constant_c(q, &self.kappa(), &self.xi_max),
                d_norm: Q::zero(),
                e_norm: Q::zero(),
            });
        }
        if !is_boundary(z, &self.cfg.policy_for(&h))? {
            return Err(Error::NotABoundary);
        }
        let x = dmap(z, &self.hh)?;
        let e = self.emap(&x)?;
        let xi = xi_fill(z, &self.hh, &self.cfg.policy_for(&self.hh))?;
        if xi.ratio > self.xi_max {
            self.xi_max = xi.ratio.clone();
        }
        let e_prime = cross_tensor(&e, &self.gg)?.minus(&xi.xi().push(&self.ff)?.rebase(&self.gg)?)?;
        let conj = y.push(&self.gamma_d)?.rebase(&amb)?;
        let c = drop_cycle_tuples(&self.theta.apply(&conj)?.minus(&e_prime.push(&self.mu)?.rebase(&amb)?)?)?;
        if c.boundary()? != y {
            return Err(Error::Pipeline("∂c' ≠ (i∘f)_* z".into()));
        }
        let ratio = c.l1_norm() / z.l1_norm();
        let kappa = self.kappa();
        let bound = constant_c(q, &kappa, &self.xi_max);
        if ratio > bound {
            return Err(Error::Pipeline(format!(
                "ratio {} exceeds constant_c = {}",
                crate::rational::render(&ratio),
                crate::rational::render(&bound)
            )));
        }
        let cert_ratio = crate::fill::ratio(&c, &y)?;
        Ok(PipelineRun {
            certificate: FillCertificate {
                boundary: y,
                primitive: c,
                ratio: cert_ratio,
                support: "pipeline".into(),
                method: PIPELINE_METHOD.into(),
            },
            z: z.clone(),
            ratio,
            kappa,
            xi: self.xi_max.clone(),
            bound,
            d_norm: x.l1_norm(),
            e_norm: e.l1_norm(),
        })
    }
}

/// Removes every basis tuple whose own boundary vanishes, such as
/// `(e,e,e)`: they change the norm and nothing else.
fn drop_cycle_tuples(c: &Chain) -> Result<Chain> {
    let mut out = Chain::zero(c.group(), c.degree());
    for (t, v) in c.terms() {
        if !Chain::basis(c.group(), t.clone()).boundary()?.is_zero() {
            out.add_term(t.clone(), v.clone());
        }
    }
    Ok(out)
}

/// `n` seeded random boundaries `∂c` of degree `degree`, skipping zeros.
pub fn sample_boundaries(g: &Group, degree: usize, n: usize, max_terms: usize, seed: u64) -> Result<Vec<Chain>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 100 * (n + 1) {
            return Err(Error::Pipeline("could not sample nonzero boundaries".into()));
        }
        let z = Chain::random(g, degree + 1, max_terms.max(1), 2, &mut rng).boundary()?;
        if !z.is_zero() {
            out.push(z);
        }
    }
    Ok(out)
}

/// Runs every chain of a batch in input order.
pub fn run_batch(pipeline: &mut Pipeline, zs: &[Chain]) -> Result<Vec<PipelineRun>> {
    zs.iter().map(|z| pipeline.run(z)).collect()
}
