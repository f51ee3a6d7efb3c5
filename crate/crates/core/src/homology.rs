//! Boundary matrices over finite groups and exact rational Betti numbers.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chain::{faces, Tuple};
use crate::error::{Error, Result};
use crate::groups::Group;

/// Default cap on `|G|^k` for anything that enumerates the tuple basis.
pub const DEFAULT_SIZE_CAP: u128 = 100_000;

/// `|G|^k`, refusing infinite groups and anything beyond `cap`.
pub fn basis_size(group: &Group, k: usize, cap: u128) -> Result<u128> {
    let n = group
        .order()
        .ok_or_else(|| Error::NotFinite(format!("{} has no finite tuple basis", group.label())))?;
    let mut size: u128 = 1;
    for _ in 0..k {
        size = size.saturating_mul(n as u128);
    }
    if size > cap {
        return Err(Error::TooLarge {
            what: format!("C_{k}({})", group.label()),
            dimension: size,
            cap,
        });
    }
    Ok(size)
}

/// All of `G^k` in lexicographic order of element indices.
pub fn all_tuples(group: &Group, k: usize, cap: u128) -> Result<Vec<Tuple>> {
    basis_size(group, k, cap)?;
    let elems = group.elements().expect("finite group");
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for t in &out {
            for x in elems {
                let mut u = t.clone();
                u.push(x.clone());
                next.push(u);
            }
        }
        out = next;
    }
    Ok(out)
}

/// The matrix of `∂_k : C_k → C_{k-1}` in the lexicographic tuple bases.
/// Rows index `G^{k-1}`, columns index `G^k`.
pub struct BoundaryMatrix {
    pub degree: usize,
    pub rows: Vec<Tuple>,
    pub cols: Vec<Tuple>,
    /// `(row, col, value)`, sorted by column then row, zeros omitted.
    pub entries: Vec<(usize, usize, i64)>,
}

impl BoundaryMatrix {
    pub fn new(group: &Group, k: usize, cap: u128) -> Result<BoundaryMatrix> {
        if k == 0 {
            return Err(Error::Degree("there is no boundary out of degree 0".into()));
        }
        let cols = all_tuples(group, k, cap)?;
        let rows = all_tuples(group, k - 1, cap)?;
        let row_index: HashMap<&Tuple, usize> = rows.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut entries = Vec::new();
        for (j, t) in cols.iter().enumerate() {
            let mut col: Vec<(usize, i64)> = Vec::new();
            for (face, s) in faces(group, t) {
                let i = row_index[&face];
                match col.iter_mut().find(|(r, _)| *r == i) {
                    Some(e) => e.1 += s as i64,
                    None => col.push((i, s as i64)),
                }
            }
            col.retain(|&(_, v)| v != 0);
            col.sort_unstable();
            entries.extend(col.into_iter().map(|(i, v)| (i, j, v)));
        }
        Ok(BoundaryMatrix { degree: k, rows, cols, entries })
    }

    /// Plain-text sparse triplets: a `rows cols nnz` header, then one
    /// `row col value` line per nonzero.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows.len(), self.cols.len(), self.entries.len());
        for (i, j, v) in &self.entries {
            let _ = writeln!(s, "{i} {j} {v}");
        }
        s
    }

    pub fn dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols.len()]; self.rows.len()];
        for &(i, j, v) in &self.entries {
            m[i][j] = BigInt::from(v);
        }
        m
    }

    pub fn rank(&self) -> usize {
        rank(self.dense())
    }
}

/// Rank over `Q` of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// `dim H_k(G; Q) = |G|^k - rank ∂_k - rank ∂_{k+1}`.
pub fn betti(group: &Group, k: usize, cap: u128) -> Result<usize> {
    basis_size(group, k + 1, cap)?;
    let dim = basis_size(group, k, cap)? as usize;
    let rank_out = if k == 0 { 0 } else { BoundaryMatrix::new(group, k, cap)?.rank() };
    let rank_in = BoundaryMatrix::new(group, k + 1, cap)?.rank();
    Ok(dim - rank_out - rank_in)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn bareiss_rank() {
        assert_eq!(rank(int_matrix(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(int_matrix(&[&[0, 1, 2], &[1, 0, 3], &[1, 1, 5]])), 2);
        assert_eq!(rank(int_matrix(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(int_matrix(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]])), 3);
    }

    #[test]
    fn z2_degree_two_matrix() {
        let g = Group::cyclic(2);
        let m = BoundaryMatrix::new(&g, 2, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.cols.len(), 4);
        // columns (e,e), (e,t), (t,e), (t,t)
        assert_eq!(m.entries, vec![(0, 0, 1), (0, 1, 1), (0, 2, 1), (0, 3, -1), (1, 3, 2)]);
        assert!(m.to_triplets().starts_with("2 4 5\n"));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn betti_numbers_of_small_groups() {
        assert_eq!(betti(&Group::cyclic(2), 0, DEFAULT_SIZE_CAP).unwrap(), 1);
        assert_eq!(betti(&Group::cyclic(2), 1, DEFAULT_SIZE_CAP).unwrap(), 0);
        assert_eq!(betti(&Group::trivial(), 2, DEFAULT_SIZE_CAP).unwrap(), 0);
    }

    #[test]
    fn caps_and_infinite_groups() {
        assert!(matches!(
            betti(&Group::symmetric(3), 6, DEFAULT_SIZE_CAP),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(betti(&Group::free(1), 1, DEFAULT_SIZE_CAP), Err(Error::NotFinite(_))));
    }
}
