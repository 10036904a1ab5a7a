//! Exact Gaussian elimination over a [`Field`].
//!
//! [`Echelon`] keeps sparse rows in echelon form keyed by their leading
//! (largest) column. Reducing a vector against it yields the unique normal
//! form supported on non-pivot columns, which is what ideal membership and
//! witness reporting rely on.

use std::collections::BTreeMap;

use crate::field::Field;

pub type SparseVec<F> = BTreeMap<usize, F>;

/// `v -= c * row`, dropping cancelled entries.
pub fn axpy<F: Field>(v: &mut SparseVec<F>, c: &F, row: &SparseVec<F>) {
    for (k, x) in row {
        let t = c.mul_ref(x);
        match v.get_mut(k) {
            Some(slot) => {
                *slot -= &t;
                if slot.is_zero() {
                    v.remove(k);
                }
            }
            None => {
                v.insert(*k, -t);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Echelon<F> {
    pivots: BTreeMap<usize, SparseVec<F>>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Self {
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVec<F>)> {
        self.pivots.iter().map(|(k, r)| (*k, r))
    }

    /// Normal form of `v`: no surviving column is a pivot column.
    pub fn reduce(&self, mut v: SparseVec<F>) -> SparseVec<F> {
        let mut cursor: Option<usize> = None;
        loop {
            let next = match cursor {
                None => v.keys().next_back().copied(),
                Some(c) => v.range(..c).next_back().map(|(k, _)| *k),
            };
            let Some(col) = next else { break };
            if let Some(row) = self.pivots.get(&col) {
                let c = v[&col].clone();
                axpy(&mut v, &c, row);
            }
            cursor = Some(col);
        }
        v
    }

    /// Adds `v` to the span. Returns true when the rank grew.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        let mut r = self.reduce(v);
        let Some((&lead, lc)) = r.iter().next_back() else {
            return false;
        };
        let inv = lc.inv().expect("nonzero leading coefficient");
        for x in r.values_mut() {
            *x *= &inv;
        }
        self.pivots.insert(lead, r);
        true
    }

    pub fn contains(&self, v: SparseVec<F>) -> bool {
        self.reduce(v).is_empty()
    }
}

pub fn rank<F: Field>(rows: Vec<SparseVec<F>>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Inverse of an `n × n` matrix given as sparse rows; `None` when singular.
pub fn invert<F: Field>(n: usize, rows: Vec<(usize, SparseVec<F>)>) -> Option<Vec<SparseVec<F>>> {
    let mut a = vec![vec![F::zero(); 2 * n]; n];
    for (r, row) in rows {
        for (c, v) in row {
            a[r][c] = v;
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[n + i] = F::one();
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let c = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &c.mul_ref(p);
                }
            }
        }
    }
    Some(
        a.into_iter()
            .map(|row| {
                row.into_iter()
                    .skip(n)
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect(),
    )
}
