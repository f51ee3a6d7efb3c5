//! Norm constants of the mitosis argument and their tower over degrees.

use serde::{Deserialize, Serialize};

use crate::rational::{self, Q};

/// Bound on the explicit primitive map `E` in degree `q` for sections of
/// norm at most `κ`: `κ + 2(q+1)κ²(1 + (q+1)κ + (q+1)²κ²)`.
pub fn e_bound(q: usize, kappa: &Q) -> Q {
    let q1 = rational::q(q as i64 + 1);
    let k2 = kappa * kappa;
    let inner = rational::one() + &q1 * kappa + &q1 * &q1 * &k2;
    kappa + rational::q(2) * &q1 * k2 * inner
}

/// `(q+1) + binom(q+1, ⌊(q+1)/2⌋)·e_bound(q, κ)·(q+3) + ξ`: the homotopy
/// `Θ`, then the cross product, `E` and `D` (`‖D‖ ≤ ‖A‖ + 2 = q+3`), then
/// the filling of the Alexander-Whitney defect.
pub fn constant_c(q: usize, kappa: &Q, xi: &Q) -> Q {
    let shuffle = rational::from_u128(rational::binomial(q + 1, (q + 1) / 2));
    rational::q(q as i64 + 1) + shuffle * e_bound(q, kappa) * rational::q(q as i64 + 3) + xi
}

/// `n_0 = 1`, `n_q = 3 n_{q-1} + 1`.
pub fn n_sequence(q: usize) -> u128 {
    (0..q).fold(1u128, |n, _| 3 * n + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerRow {
    pub q: usize,
    #[serde(with = "crate::io::u128_string")]
    pub n: u128,
    #[serde(with = "crate::io::q_string")]
    pub kappa: Q,
    #[serde(with = "crate::io::q_string")]
    pub kappa_prev: Q,
    #[serde(with = "crate::io::q_string")]
    pub xi: Q,
    pub theta_bound: usize,
    pub aw_bound: usize,
    #[serde(with = "crate::io::u128_string")]
    pub shuffle_bound: u128,
    #[serde(with = "crate::io::q_string")]
    pub e_bound: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantTower {
    pub rows: Vec<TowerRow>,
}

/// `κ_0 = 0` and `κ_q = constant_c(q, κ_{q-1}, ξ_q)` for `q = 1..=q_max`.
pub fn tower<F: Fn(usize) -> Q>(q_max: usize, xi: F) -> ConstantTower {
    let mut rows = vec![TowerRow {
        q: 0,
        n: 1,
        kappa: Q::from_integer(0.into()),
        kappa_prev: Q::from_integer(0.into()),
        xi: Q::from_integer(0.into()),
        theta_bound: 1,
        aw_bound: 1,
        shuffle_bound: 1,
        e_bound: Q::from_integer(0.into()),
    }];
    for q in 1..=q_max {
        let prev = rows[q - 1].kappa.clone();
        let x = xi(q);
        rows.push(TowerRow {
            q,
            n: n_sequence(q),
            kappa: constant_c(q, &prev, &x),
            e_bound: e_bound(q, &prev),
            kappa_prev: prev,
            xi: x,
            theta_bound: q + 1,
            aw_bound: q + 1,
            shuffle_bound: rational::binomial(q + 1, (q + 1) / 2),
        });
    }
    ConstantTower { rows }
}
