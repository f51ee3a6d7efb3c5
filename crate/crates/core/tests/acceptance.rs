//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the output.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l1bar::fill::{fill_min, kappa_sampled, ubc_kappa_exact, KappaOptions, KappaValue, SupportPolicy};
use l1bar::homology::{all_tuples, betti, DEFAULT_SIZE_CAP};
use l1bar::io::{verify_certificate, Certificate, CertificateFile, ChainRecord, FillRecord};
use l1bar::mitosis::{
    constant_c, dmap, mitosis_of_finite_abelian, mu_hom, n_sequence, sample_boundaries, tower, verify_mitosis,
    HomotopyTheta, Pipeline, PipelineConfig, PipelineRun,
};
use l1bar::products::{aw, cross_chain, cross_tensor, pair_compat_check, product_group};
use l1bar::rational::{self, frac, q, Q};
use l1bar::{Chain, Cochain, Element, Group, TensorChain};

// pinned limits
const C1_RUNTIME: Duration = Duration::from_secs(10);
const C1_FREE_SAMPLES: usize = 1000;
const C2_RUNTIME: Duration = Duration::from_secs(60);
const C3_SAMPLES: usize = 1000;
const C4_SAMPLE_SEEDS: u64 = 5;
const C6_SAMPLES: usize = 1000;
const C7_SAMPLES: usize = 100;
const C7_RUNTIME: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for g in [Group::cyclic(2), Group::cyclic(3), Group::symmetric(3)] {
        for k in 1..=4 {
            for t in all_tuples(&g, k, DEFAULT_SIZE_CAP).map_err(e)? {
                let c = Chain::basis(&g, t);
                let b = c.boundary().map_err(e)?;
                ensure(b.l1_norm() <= q(k as i64 + 1) * c.l1_norm(), || format!("‖∂‖ bound fails on {c}"))?;
                if k >= 2 {
                    ensure(b.boundary().map_err(e)?.is_zero(), || format!("∂∂ ≠ 0 on {c}"))?;
                }
                checked += 1;
            }
        }
    }
    let f2 = Group::free(2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..C1_FREE_SAMPLES {
        let k = 1 + i % 5;
        let c = Chain::random(&f2, k, 6, 4, &mut rng);
        let b = c.boundary().map_err(e)?;
        ensure(b.l1_norm() <= q(k as i64 + 1) * c.l1_norm(), || format!("‖∂‖ bound fails on {c}"))?;
        if k >= 2 {
            ensure(b.boundary().map_err(e)?.is_zero(), || format!("∂∂ ≠ 0 on {c}"))?;
        }
    }
    let t = start.elapsed();
    ensure(t < C1_RUNTIME, || format!("took {t:?}"))?;
    Ok(format!(
        "{checked} basis tuples of Z/2, Z/3, S_3 and {C1_FREE_SAMPLES} free-group chains; {:.1?} < {C1_RUNTIME:?}",
        t
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut seen = Vec::new();
    for (name, g) in [
        ("Z/2", Group::cyclic(2)),
        ("Z/3", Group::cyclic(3)),
        ("Z/4", Group::cyclic(4)),
        ("S_3", Group::symmetric(3)),
    ] {
        let top = if g.order().unwrap() <= 3 { 3 } else { 2 };
        for k in 1..=top {
            let b = betti(&g, k, DEFAULT_SIZE_CAP).map_err(e)?;
            ensure(b == 0, || format!("betti({name}, {k}) = {b}"))?;
            seen.push(format!("{name}:{k}"));
        }
    }
    let t = start.elapsed();
    ensure(t < C2_RUNTIME, || format!("took {t:?}"))?;
    Ok(format!("betti = 0 at {}; {:.1?} < {C2_RUNTIME:?}", seen.join(" "), t))
}

fn random_cycle(g: &Group, p: usize, rng: &mut ChaCha8Rng) -> Result<Chain, String> {
    match p {
        0 => Ok(Chain::random(g, 0, 1, 0, rng)),
        1 => Ok(Chain::random(g, 1, 3, 0, rng)),
        _ => Chain::random(g, p + 1, 3, 0, rng).boundary().map_err(e),
    }
}

fn random_cocycle(g: &Group, p: usize, rng: &mut ChaCha8Rng) -> Result<Cochain, String> {
    if p == 0 {
        let v = q(rng.gen_range(-3..=3));
        return Cochain::from_table(g, 0, vec![(vec![], v)]).map_err(e);
    }
    let h = Cochain::random_table(g, p - 1, rng).map_err(e)?;
    h.coboundary().materialize().map_err(e)
}

fn criterion_3() -> Outcome {
    let g = Group::cyclic(3);
    let h = Group::symmetric(3);
    let gh = product_group(&g, &h);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..C3_SAMPLES {
        let (p, r) = (i % 3, (i / 3) % 3);
        let a = Chain::random(&g, p, 3, 0, &mut rng);
        let b = Chain::random(&h, r, 3, 0, &mut rng);
        let x = cross_chain(&a, &b);
        // Leibniz, with ∂ zero on degree 0
        if p + r > 0 {
            let d = |c: &Chain| -> Result<Chain, String> {
                if c.degree() == 0 {
                    Ok(Chain::zero(c.group(), 0))
                } else {
                    c.boundary().map_err(e)
                }
            };
            let lhs = x.boundary().map_err(e)?;
            let mut rhs = Chain::zero(&gh, p + r - 1);
            if p > 0 {
                rhs = rhs.plus(&cross_chain(&d(&a)?, &b).rebase(&gh).map_err(e)?).map_err(e)?;
            }
            if r > 0 {
                let term = cross_chain(&a, &d(&b)?).rebase(&gh).map_err(e)?;
                rhs.add_scaled(&term, &rational::sign(p)).map_err(e)?;
            }
            ensure(lhs == rhs.rebase(x.group()).map_err(e)?, || format!("Leibniz fails for {a} × {b}"))?;
            // AW is a chain map
            ensure(
                aw(&x).map_err(e)?.boundary().map_err(e)? == aw(&lhs).map_err(e)?,
                || format!("∂A ≠ A∂ on {x}"),
            )?;
        }
        // A∘B = id after normalizing, on a random tensor
        let mut t = TensorChain::elementary(&a, &b);
        let a2 = Chain::random(&g, p, 2, 0, &mut rng);
        let b2 = Chain::random(&h, r, 2, 0, &mut rng);
        t = t.plus(&TensorChain::elementary(&a2, &b2)).map_err(e)?;
        let back = aw(&cross_tensor(&t, x.group()).map_err(e)?).map_err(e)?;
        ensure(back.normalize() == t.normalize(), || format!("normalize A B ≠ normalize on {t}"))?;
    }
    let (g2, h2) = (Group::cyclic(2), Group::cyclic(3));
    let mut zero_sided = 0;
    for i in 0..C3_SAMPLES {
        let (p, r) = (i % 3, (i / 3) % 3);
        let f = random_cocycle(&g2, p, &mut rng)?;
        let k = random_cocycle(&h2, r, &mut rng)?;
        let c = random_cycle(&g2, p, &mut rng)?;
        let d = random_cycle(&h2, r, &mut rng)?;
        let rep = pair_compat_check(&f, &k, &c, &d).map_err(e)?;
        ensure(rep.holds, || format!("pairing fails in bidegree ({p}, {r}): {} vs {}", rep.lhs, rep.rhs))?;
        if rep.lhs.is_zero() {
            zero_sided += 1;
        }
    }
    Ok(format!(
        "{C3_SAMPLES} cross/AW samples over Z/3 × S_3; {C3_SAMPLES} pairings over Z/2 × Z/3 \
         ({} with nonzero value)",
        C3_SAMPLES - zero_sided
    ))
}

fn criterion_4() -> Outcome {
    let g = Group::cyclic(2);
    let (ee, t) = (Element::Index(0), Element::Index(1));
    let z = Chain::from_terms(&g, 1, vec![(vec![t.clone()], q(2)), (vec![ee], q(-1))]).map_err(e)?;
    let cert = fill_min(&z, &SupportPolicy::full()).map_err(e)?;
    ensure(cert.primitive.l1_norm() == q(1), || format!("optimum {}", cert.primitive.l1_norm()))?;
    ensure(cert.primitive == Chain::basis(&g, vec![t.clone(), t]), || format!("primitive {}", cert.primitive))?;
    ensure(cert.ratio == frac(1, 3), || "ratio".into())?;
    cert.verify().map_err(e)?;
    let mut kappas = Vec::new();
    for (name, g) in [("Z/2", Group::cyclic(2)), ("Z/3", Group::cyclic(3))] {
        let k = ubc_kappa_exact(&g, 1, &KappaOptions::default()).map_err(e)?;
        let KappaValue::Exact(kv) = k.value.clone() else {
            return Err(format!("{name}: no exact value"));
        };
        if name == "Z/2" {
            ensure(kv == q(1), || format!("κ(Z/2, 1) = {kv}"))?;
        }
        for seed in 0..C4_SAMPLE_SEEDS {
            let (lower, _) = kappa_sampled(&g, 1, 50, seed, DEFAULT_SIZE_CAP).map_err(e)?;
            ensure(lower <= kv, || format!("{name}: sampled {lower} > exact {kv}"))?;
        }
        kappas.push(format!("κ({name}, 1) = {}", rational::render(&kv)));
    }
    Ok(format!("fill(2(t) - (e)) = (t,t) of norm 1; {}; sampled bounds below", kappas.join(", ")))
}

fn criterion_5() -> Outcome {
    let z2 = Group::cyclic(2);
    let mut orders = Vec::new();
    for (name, g) in [
        ("Z/2", z2.clone()),
        ("Z/3", Group::cyclic(3)),
        ("Z/4", Group::cyclic(4)),
        ("Z/2×Z/2", Group::direct(vec![z2.clone(), z2])),
    ] {
        let m = mitosis_of_finite_abelian(&g).map_err(e)?;
        let rep = verify_mitosis(&m).map_err(e)?;
        ensure(rep.passed(), || format!("{name}: {:?}", rep.failures()))?;
        ensure(
            rep.conjugation.exhaustive && rep.commuting.exhaustive && rep.generation.exhaustive,
            || format!("{name}: not exhaustive"),
        )?;
        let order = m.ambient.order().unwrap();
        if name == "Z/2" {
            ensure(order == 24, || format!("|M| = {order}"))?;
        }
        let gg = product_group(&g, &g);
        let mu = mu_hom(&m, &gg).map_err(e)?;
        for x in g.elements().unwrap() {
            let lhs = mu.apply(&Element::pair(x.clone(), x.clone()));
            let rhs = m.ambient.conj(&m.injection.apply(x), &m.d);
            ensure(lhs == rhs, || format!("{name}: μΔ ≠ γ_d i"))?;
        }
        orders.push(format!("{name} → |M| = {order}"));
    }
    Ok(format!("{}; all axioms and μ∘Δ = γ_d∘i exhaustive", orders.join(", ")))
}

fn criterion_6() -> Outcome {
    let s3 = Group::symmetric(3);
    let k3 = s3.parse_element("(0 1 2)").map_err(e)?;
    let m = mitosis_of_finite_abelian(&Group::cyclic(2)).map_err(e)?;
    let amb = m.ambient.clone();
    let km = amb.mul(&m.s, &amb.inv(&m.d));
    let cases = [
        (s3.clone(), HomotopyTheta::towards(&s3, &k3).map_err(e)?),
        (amb.clone(), HomotopyTheta::towards(&amb, &km).map_err(e)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (g, theta) in &cases {
        for i in 0..C6_SAMPLES {
            let k = i % 5;
            let c = Chain::random(g, k, 4, 0, &mut rng);
            ensure(theta.check_identity(&c).map_err(e)?, || format!("∂Θ + Θ∂ ≠ id - γ on {c}"))?;
            let th = theta.apply(&c).map_err(e)?;
            ensure(th.l1_norm() <= q(k as i64 + 1) * c.l1_norm(), || format!("‖Θ‖ bound fails on {c}"))?;
        }
    }
    Ok(format!(
        "{} chains in degrees 0..4 over S_3 and the order-{} ambient group",
        2 * C6_SAMPLES,
        amb.order().unwrap()
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let g = Group::cyclic(2);
    let m = mitosis_of_finite_abelian(&g).map_err(e)?;
    let mut p = Pipeline::new(PipelineConfig::identities(&g, 2, m)).map_err(e)?;
    let zs = sample_boundaries(&g, 2, C7_SAMPLES, 4, 7).map_err(e)?;
    let hh = product_group(&g, &g);
    let f = p.f().clone();
    let mut runs: Vec<PipelineRun> = Vec::new();
    for z in &zs {
        let x = dmap(z, &hh).map_err(e)?;
        // emap raises on any failed membership check
        let ex = p.emap(&x).map_err(e)?;
        ensure(ex.boundary().map_err(e)? == x.push(&f, &f).map_err(e)?, || "∂E(D z) ≠ (f⊗f) D z".into())?;
        let run = p.run(z).map_err(e)?;
        ensure(
            run.certificate.primitive.boundary().map_err(e)? == z.push(p.push_map()).map_err(e)?,
            || format!("∂c' ≠ (i∘f)_* z for z = {z}"),
        )?;
        runs.push(run);
    }
    let kappa = p.kappa();
    let xi = p.xi().clone();
    let bound = constant_c(2, &kappa, &xi);
    let worst = runs.iter().map(|r| r.ratio.clone()).max().unwrap_or_else(Q::zero);
    ensure(runs.iter().all(|r| r.ratio <= bound), || "a ratio exceeds the batch constant".into())?;
    let t = start.elapsed();
    ensure(t < C7_RUNTIME, || format!("took {t:?}"))?;
    Ok(format!(
        "{} boundaries, max ratio {} ≤ constant_c(2, κ = {}, ξ = {}) = {}; {:.1?} < {C7_RUNTIME:?}",
        runs.len(),
        rational::render(&worst),
        rational::render(&kappa),
        rational::render(&xi),
        rational::render(&bound),
        t
    ))
}

/// Every way of changing exactly one coefficient of a record list.
fn tamper_each(records: &[ChainRecord]) -> Vec<Vec<ChainRecord>> {
    (0..records.len())
        .map(|i| {
            let mut r = records.to_vec();
            let v = rational::parse(&r[i].coeff).unwrap() + q(1);
            r[i].coeff = rational::render(&v);
            r
        })
        .collect()
}

fn fill_tamperings(f: &FillRecord) -> Vec<FillRecord> {
    let mut out = Vec::new();
    for c in tamper_each(&f.c) {
        out.push(FillRecord { c, ..f.clone() });
    }
    for z in tamper_each(&f.z) {
        out.push(FillRecord { z, ..f.clone() });
    }
    let mut r = f.clone();
    r.ratio = rational::render(&(rational::parse(&f.ratio).unwrap() - frac(1, 1_000_000)));
    out.push(r);
    out
}

fn criterion_8() -> Outcome {
    let t = tower(3, |_| Q::zero());
    let ns: Vec<u128> = t.rows.iter().map(|r| r.n).collect();
    ensure(ns == vec![1, 4, 13, 40], || format!("n = {ns:?}"))?;
    ensure((0..4).all(|q| n_sequence(q) == ns[q]), || "n_sequence disagrees".into())?;
    for xi in [Q::zero(), frac(5, 2), q(7)] {
        let t = tower(1, |_| xi.clone());
        ensure(t.rows[1].kappa == q(2) + &xi, || format!("κ_1 ≠ 2 + ξ at ξ = {xi}"))?;
    }

    // one artifact of every kind
    let z2 = Group::cyclic(2);
    let tt = Element::Index(1);
    let z = Chain::basis(&z2, vec![tt.clone(), tt.clone(), tt.clone()]).boundary().map_err(e)?;
    let fill = fill_min(&z, &SupportPolicy::full()).map_err(e)?;
    let kappa = ubc_kappa_exact(&Group::cyclic(3), 1, &KappaOptions::default()).map_err(e)?;
    let m = mitosis_of_finite_abelian(&z2).map_err(e)?;
    let mut p = Pipeline::new(PipelineConfig::identities(&z2, 2, m)).map_err(e)?;
    let runs = sample_boundaries(&z2, 2, 3, 3, 8)
        .map_err(e)?
        .iter()
        .map(|z| p.run(z))
        .collect::<l1bar::Result<Vec<_>>>()
        .map_err(e)?;
    let artifacts = vec![
        Certificate::fill(&fill),
        Certificate::kappa(&kappa),
        Certificate::pipeline(p.push_map(), 2, &runs),
        Certificate::tower(&tower(3, |q| frac(q as i64, 3))),
    ];
    let mut rejected = 0usize;
    for body in artifacts {
        let file = CertificateFile::new(body);
        let back: CertificateFile = serde_json::from_str(&file.to_json()).map_err(e)?;
        ensure(back == file, || "serialization does not round-trip".into())?;
        verify_certificate(&back).map_err(|err| format!("round trip rejected: {err}"))?;
        let variants: Vec<Certificate> = match &file.body {
            Certificate::Fill { group, fill } => fill_tamperings(fill)
                .into_iter()
                .map(|f| Certificate::Fill { group: group.clone(), fill: f })
                .collect(),
            Certificate::Kappa { certificates, .. } => (0..certificates.len())
                .flat_map(|i| {
                    fill_tamperings(&certificates[i]).into_iter().map(move |f| (i, f))
                })
                .map(|(i, f)| {
                    let mut b = file.body.clone();
                    if let Certificate::Kappa { certificates, .. } = &mut b {
                        certificates[i] = f;
                    }
                    b
                })
                .collect(),
            Certificate::Pipeline { runs, .. } => (0..runs.len())
                .flat_map(|i| {
                    let mut vs: Vec<_> = fill_tamperings(&runs[i].fill).into_iter().map(|f| (i, Some(f), None)).collect();
                    vs.extend(tamper_each(&runs[i].z).into_iter().map(|z| (i, None, Some(z))));
                    vs.into_iter()
                })
                .map(|(i, f, z)| {
                    let mut b = file.body.clone();
                    if let Certificate::Pipeline { runs, .. } = &mut b {
                        if let Some(f) = f {
                            runs[i].fill = f;
                        }
                        if let Some(z) = z {
                            runs[i].z = z;
                        }
                    }
                    b
                })
                .collect(),
            Certificate::Tower { rows, .. } => (0..rows.len())
                .map(|i| {
                    let mut b = file.body.clone();
                    if let Certificate::Tower { rows, .. } = &mut b {
                        rows[i].kappa += q(1);
                    }
                    b
                })
                .collect(),
        };
        for v in variants {
            let bad = CertificateFile::new(v);
            ensure(verify_certificate(&bad).is_err(), || format!("tampered certificate accepted:\n{}", bad.to_json()))?;
            rejected += 1;
        }
    }
    Ok(format!(
        "n = 1, 4, 13, 40; κ_1 = 2 + ξ_1; fill, kappa, pipeline and tower certificates round-trip; \
         {rejected} single-coefficient tamperings rejected"
    ))
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that matches nothing here skips the suite.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("chain axioms", criterion_1),
        ("rational acyclicity of finite groups", criterion_2),
        ("cross products, AW and pairings", criterion_3),
        ("LP engine", criterion_4),
        ("mitosis builder", criterion_5),
        ("conjugation homotopy", criterion_6),
        ("mitosis pipeline", criterion_7),
        ("constant tower and certificates", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{t:.1?}] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{t:.1?}] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
