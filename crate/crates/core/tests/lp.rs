use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l1bar::fill::{fill_min, is_boundary, kappa_sampled, section_on, ubc_kappa_exact, KappaOptions, SupportPolicy};
use l1bar::groups::Homomorphism;
use l1bar::homology::{rank, BoundaryMatrix};
use l1bar::lp::{solve, LpProblem, Relation};
use l1bar::rational::q;
use l1bar::{Chain, Group, Q};

const CAP: u128 = 100_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feasible, bounded `min c·x, Ax = b, x ≥ 0`: positive costs and `b = A x₀`.
fn random_system(m: usize, n: usize, rg: &mut ChaCha8Rng) -> (Vec<Vec<Q>>, Vec<Q>, Vec<Q>) {
    let a: Vec<Vec<Q>> = (0..m).map(|_| (0..n).map(|_| q(rg.gen_range(-3..=3))).collect()).collect();
    let x0: Vec<Q> = (0..n).map(|_| q(rg.gen_range(0..=2))).collect();
    let b = a.iter().map(|row| row.iter().zip(&x0).map(|(x, y)| x * y).sum()).collect();
    let c = (0..n).map(|_| q(rg.gen_range(1..=5))).collect();
    (a, b, c)
}

/// Solves a square system, `None` if singular.
fn gauss(mut m: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        b.swap(col, p);
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[col][col];
                for j in col..n {
                    let v = &f * &m[col][j];
                    m[i][j] -= v;
                }
                let v = &f * &b[col];
                b[i] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum cost over every basic feasible solution.
fn brute_force(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> Option<Q> {
    let m = a.len();
    let mut best: Option<Q> = None;
    for basis in subsets(c.len(), m) {
        let sq = a.iter().map(|row| basis.iter().map(|&j| row[j].clone()).collect()).collect();
        let Some(x) = gauss(sq, b.to_vec()) else { continue };
        if x.iter().any(|v| v.is_negative()) {
            continue;
        }
        let cost: Q = basis.iter().zip(&x).map(|(&j, v)| &c[j] * v).sum();
        if best.as_ref().map_or(true, |b| cost < *b) {
            best = Some(cost);
        }
    }
    best
}

#[test]
fn simplex_matches_basic_feasible_enumeration() {
    let mut rg = rng(7);
    for (m, n) in [(3, 6), (4, 8), (5, 10), (6, 12)] {
        for _ in 0..8 {
            let (a, b, c) = random_system(m, n, &mut rg);
            let lp = LpProblem::standard_form(&a, &b, &c).unwrap();
            let got = solve(&lp).unwrap().optimal().expect("feasible and bounded").value;
            assert_eq!(Some(got), brute_force(&a, &b, &c), "{m}x{n}");
        }
    }
}

// C(40, 20) bases are out of reach, so at full size the optimum is certified
// by an exactly checked dual solution instead.
#[test]
fn twenty_by_forty_optimum_has_a_matching_dual() {
    let mut rg = rng(11);
    for _ in 0..3 {
        let (a, b, c) = random_system(20, 40, &mut rg);
        let primal = solve(&LpProblem::standard_form(&a, &b, &c).unwrap()).unwrap().optimal().unwrap();
        for (row, rhs) in a.iter().zip(&b) {
            let lhs: Q = row.iter().zip(&primal.x).map(|(x, y)| x * y).sum();
            assert_eq!(&lhs, rhs);
        }
        assert!(primal.x.iter().all(|v| !v.is_negative()));

        // max b·y s.t. Aᵀy ≤ c, with y = y⁺ - y⁻
        let m = a.len();
        let mut dual = LpProblem::new(2 * m);
        for i in 0..m {
            dual.objective[i] = -b[i].clone();
            dual.objective[m + i] = b[i].clone();
        }
        for j in 0..c.len() {
            let mut row = Vec::new();
            for i in 0..m {
                row.push((i, a[i][j].clone()));
                row.push((m + i, -a[i][j].clone()));
            }
            dual.constrain(row, Relation::Le, c[j].clone());
        }
        let d = solve(&dual).unwrap().optimal().unwrap();
        let y: Vec<Q> = (0..m).map(|i| &d.x[i] - &d.x[m + i]).collect();
        for j in 0..c.len() {
            let s: Q = (0..m).map(|i| &a[i][j] * &y[i]).sum();
            assert!(s <= c[j]);
        }
        let by: Q = b.iter().zip(&y).map(|(x, y)| x * y).sum();
        assert_eq!(by, primal.value);
    }
}

#[test]
fn is_boundary_agrees_with_rank() {
    let g = Group::cyclic(3);
    let mut rg = rng(3);
    for k in 1..=2 {
        let m = BoundaryMatrix::new(&g, k + 1, CAP).unwrap();
        let dense = m.dense();
        let r = rank(dense.clone());
        let (mut yes, mut no) = (0, 0);
        for trial in 0..60 {
            // half the trials are genuine boundaries, half arbitrary chains
            let z = if trial % 2 == 0 {
                Chain::random(&g, k + 1, 3, 0, &mut rg).boundary().unwrap()
            } else {
                Chain::random(&g, k, 3, 0, &mut rg)
            };
            let mut aug = dense.clone();
            for (row, t) in aug.iter_mut().zip(&m.rows) {
                let v = z.coeff(t);
                assert!(v.is_integer());
                row.push(v.to_integer());
            }
            let oracle = rank(aug) == r;
            assert_eq!(is_boundary(&z, &SupportPolicy::full()).unwrap(), oracle, "{}", z.display());
            if oracle {
                yes += 1;
            } else {
                no += 1;
            }
        }
        // ∂₁ = 0 and H₁ vanishes rationally, so every 1-chain bounds
        assert!(yes > 0 && (no > 0) == (k > 1));
    }
    let e = Chain::basis(&g, vec![g.identity()]);
    assert!(!is_boundary(&Chain::basis(&g, vec![]), &SupportPolicy::full()).unwrap());
    assert!(is_boundary(&Chain::zero(&g, 0), &SupportPolicy::full()).unwrap());
    assert!(is_boundary(&e, &SupportPolicy::full()).unwrap());
}

#[test]
fn no_random_primitive_beats_the_optimum() {
    let mut rg = rng(5);
    for (g, k) in [(Group::cyclic(3), 1), (Group::symmetric(3), 1), (Group::cyclic(2), 2)] {
        for _ in 0..3 {
            let z = Chain::random(&g, k + 1, 3, 0, &mut rg).boundary().unwrap();
            if z.is_zero() {
                continue;
            }
            let cert = fill_min(&z, &SupportPolicy::full()).unwrap();
            cert.verify().unwrap();
            let best = cert.primitive.l1_norm();
            // every primitive is the optimum plus a cycle
            for _ in 0..1000 {
                let w = Chain::random(&g, k + 2, 2, 0, &mut rg).boundary().unwrap();
                let t = q(rg.gen_range(-4..=4)) / q(rg.gen_range(1..=4));
                let other = cert.primitive.plus(&w.scale(&t)).unwrap();
                assert_eq!(other.boundary().unwrap(), z);
                assert!(other.l1_norm() >= best);
            }
        }
    }
}

#[test]
fn kappa_of_z3_is_reached_by_sampling() {
    let g = Group::cyclic(3);
    let kappa = ubc_kappa_exact(&g, 1, &KappaOptions::default()).unwrap();
    let (sampled, cert) = kappa_sampled(&g, 1, 1000, 0, CAP).unwrap();
    cert.unwrap().verify().unwrap();
    assert_eq!(kappa.upper(), &sampled);
}

#[test]
fn sections_on_the_identity_stay_under_kappa() {
    let g = Group::cyclic(3);
    let kappa = ubc_kappa_exact(&g, 1, &KappaOptions::default()).unwrap();
    let mut rg = rng(9);
    let zs: Vec<Chain> = (0..40).map(|_| Chain::random(&g, 2, 3, 0, &mut rg).boundary().unwrap()).collect();
    let batch = section_on(&zs, &Homomorphism::identity(&g), &SupportPolicy::full()).unwrap();
    assert!(batch.ratios.iter().all(|r| r <= kappa.upper()));
    assert!(&batch.kappa <= kappa.upper());

    let zero = section_on(&[Chain::zero(&g, 1)], &Homomorphism::identity(&g), &SupportPolicy::full()).unwrap();
    assert!(zero.certificates[0].primitive.is_zero());
    assert_eq!(zero.ratios[0], Q::zero());
}

#[test]
fn sections_of_the_trivial_map_fill_identity_tuples() {
    let g = Group::symmetric(3);
    let h = Group::cyclic(2);
    let triv = Homomorphism::trivial(&g, &h);
    let mut rg = rng(13);
    for k in 1..=2 {
        let zs: Vec<Chain> = (0..10).map(|_| Chain::random(&g, k + 1, 3, 0, &mut rg).boundary().unwrap()).collect();
        let batch = section_on(&zs, &triv, &SupportPolicy::full()).unwrap();
        for (z, cert) in zs.iter().zip(&batch.certificates) {
            cert.verify().unwrap();
            let pushed = z.push(&triv).unwrap();
            assert!(pushed.support().all(|t| t.iter().all(|x| *x == h.identity())));
            assert_eq!(cert.boundary, pushed);
        }
    }
    // a chain that is not a boundary in the source is rejected
    let bad = Chain::basis(&g, vec![g.identity(), g.identity()]);
    assert!(section_on(&[bad], &triv, &SupportPolicy::full()).is_err());
}
