//! Sparse linear operators on tensor powers `V^{⊗k}` of an `N`-dimensional space.
//!
//! An operator of arity `k` is an `N^k × N^k` matrix whose rows and columns
//! are indexed by words `(a_1, …, a_k)`; the flat index of a word is
//! `Σ a_i N^{k-i}`, so the first tensor slot is the most significant digit.
//! Slots are numbered from 1 in the public API.
//!
//! Entries are generic: plain field elements give [`SparseOp`], while
//! noncommutative polynomials give operator-valued matrices of algebra
//! elements (see [`crate::ncalgebra::OpPoly`]).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::linalg;
use crate::qfield::QRat;

/// Entry type of an [`Operator`]: a ring that is an algebra over `Self::Scalar`.
///
/// Multiplication need not be commutative; scalars are central.
pub trait Entry: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Scalar: Field;

    fn zero_entry() -> Self;
    fn is_zero_entry(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_entry(&self, other: &Self) -> Self;
    fn scale(&self, c: &Self::Scalar) -> Self;
    fn from_scalar(c: Self::Scalar) -> Self;

    fn neg_entry(&self) -> Self {
        self.scale(&Self::Scalar::from_i64(-1))
    }
}

macro_rules! scalar_entry {
    ($t:ty) => {
        impl Entry for $t {
            type Scalar = $t;
            fn zero_entry() -> Self {
                <$t as Field>::zero()
            }
            fn is_zero_entry(&self) -> bool {
                <$t as Field>::is_zero(self)
            }
            fn add_assign_ref(&mut self, other: &Self) {
                *self += other;
            }
            fn mul_entry(&self, other: &Self) -> Self {
                self.mul_ref(other)
            }
            fn scale(&self, c: &Self) -> Self {
                self.mul_ref(c)
            }
            fn from_scalar(c: Self) -> Self {
                c
            }
        }
    };
}

scalar_entry!(QRat);
scalar_entry!(Rational);

type Row<E> = BTreeMap<usize, E>;

/// A sparse operator on `V^{⊗arity}` with entries of type `E`.
#[derive(Clone, PartialEq)]
pub struct Operator<E> {
    dim: usize,
    arity: usize,
    rows: BTreeMap<usize, Row<E>>,
}

/// Operator with field entries.
pub type SparseOp<F> = Operator<F>;

fn upow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Flat index to word, first slot most significant.
pub fn word_of(index: usize, dim: usize, arity: usize) -> Vec<usize> {
    let mut w = vec![0; arity];
    let mut x = index;
    for slot in (0..arity).rev() {
        w[slot] = x % dim;
        x /= dim;
    }
    w
}

/// Word to flat index, first slot most significant.
pub fn index_of(word: &[usize], dim: usize) -> usize {
    word.iter().fold(0, |acc, &a| acc * dim + a)
}

impl<E: Entry> Operator<E> {
    pub fn zero(dim: usize, arity: usize) -> Self {
        Self {
            dim,
            arity,
            rows: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize, arity: usize) -> Self {
        let mut op = Self::zero(dim, arity);
        for i in 0..op.size() {
            op.set(i, i, E::from_scalar(E::Scalar::one()));
        }
        op
    }

    /// Builds an operator from `(row, col, value)` triples on flat indices, summing repeats.
    pub fn from_entries<I>(dim: usize, arity: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, E)>,
    {
        let mut op = Self::zero(dim, arity);
        for (r, c, v) in entries {
            op.add_at(r, c, &v);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Side length `N^arity` of the matrix.
    pub fn size(&self) -> usize {
        upow(self.dim, self.arity)
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&E> {
        self.rows.get(&row).and_then(|r| r.get(&col))
    }

    /// Entry by row and column words.
    pub fn get_word(&self, row: &[usize], col: &[usize]) -> Option<&E> {
        self.get(index_of(row, self.dim), index_of(col, self.dim))
    }

    pub fn set(&mut self, row: usize, col: usize, v: E) {
        if v.is_zero_entry() {
            if let Some(r) = self.rows.get_mut(&row) {
                r.remove(&col);
                if r.is_empty() {
                    self.rows.remove(&row);
                }
            }
        } else {
            self.rows.entry(row).or_default().insert(col, v);
        }
    }

    pub fn add_at(&mut self, row: usize, col: usize, v: &E) {
        if v.is_zero_entry() {
            return;
        }
        let r = self.rows.entry(row).or_default();
        match r.get_mut(&col) {
            Some(slot) => {
                slot.add_assign_ref(v);
                if slot.is_zero_entry() {
                    r.remove(&col);
                    if r.is_empty() {
                        self.rows.remove(&row);
                    }
                }
            }
            None => {
                r.insert(col, v.clone());
            }
        }
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.rows
            .iter()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (*r, *c, v)))
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &E)> {
        self.rows.get(&r).into_iter().flat_map(|row| row.iter().map(|(c, v)| (*c, v)))
    }

    fn check_same_shape<G: Entry>(&self, other: &Operator<G>) -> Result<()> {
        if self.dim != other.dim || self.arity != other.arity {
            return Err(Error::Shape(format!(
                "(dim {}, arity {}) vs (dim {}, arity {})",
                self.dim, self.arity, other.dim, other.arity
            )));
        }
        Ok(())
    }

    /// Matrix product `self · other`, preserving left-to-right entry order.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = Self::zero(self.dim, self.arity);
        for (r, row) in &self.rows {
            let mut acc: Row<E> = BTreeMap::new();
            for (j, a) in row {
                if let Some(brow) = other.rows.get(j) {
                    for (c, b) in brow {
                        let t = a.mul_entry(b);
                        match acc.get_mut(c) {
                            Some(slot) => slot.add_assign_ref(&t),
                            None => {
                                acc.insert(*c, t);
                            }
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero_entry());
            if !acc.is_empty() {
                out.rows.insert(*r, acc);
            }
        }
        Ok(out)
    }

    /// Product of a chain of operators, left to right.
    pub fn product<'a, I>(dim: usize, arity: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
        E: 'a,
    {
        let mut acc: Option<Self> = None;
        for op in ops {
            acc = Some(match acc {
                None => op.clone(),
                Some(a) => a.compose(op)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Self::identity(dim, arity)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_at(r, c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg_entry())
    }

    pub fn scale(&self, c: &E::Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim, self.arity);
        }
        self.map(|v| v.scale(c))
    }

    /// Applies `f` to every stored entry, dropping results that vanish.
    pub fn map<G: Entry, M: Fn(&E) -> G>(&self, f: M) -> Operator<G> {
        let mut out = Operator::zero(self.dim, self.arity);
        for (r, c, v) in self.entries() {
            out.set(r, c, f(v));
        }
        out
    }

    /// Fallible variant of [`Operator::map`].
    pub fn try_map<G: Entry, Er, M: Fn(&E) -> Result<G, Er>>(&self, f: M) -> Result<Operator<G>, Er> {
        let mut out = Operator::zero(self.dim, self.arity);
        for (r, c, v) in self.entries() {
            out.set(r, c, f(v)?);
        }
        Ok(out)
    }

    /// Places this operator on slots `pos..pos+arity-1` of `V^{⊗total}`,
    /// tensored with the identity on every other slot.
    pub fn embed_at(&self, pos: usize, total: usize) -> Result<Self> {
        if pos == 0 || pos + self.arity > total + 1 {
            return Err(Error::Position { pos, arity: total });
        }
        let n = self.dim;
        let left = upow(n, pos - 1);
        let right = upow(n, total + 1 - pos - self.arity);
        let mid = self.size();
        let mut out = Self::zero(n, total);
        for (r, c, v) in self.entries() {
            for l in 0..left {
                for rt in 0..right {
                    let row = (l * mid + r) * right + rt;
                    let col = (l * mid + c) * right + rt;
                    out.rows.entry(row).or_default().insert(col, v.clone());
                }
            }
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other`, with `self` on the leading slots.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!("dim {} vs dim {}", self.dim, other.dim)));
        }
        let so = other.size();
        let mut out = Self::zero(self.dim, self.arity + other.arity);
        for (r1, c1, v1) in self.entries() {
            for (r2, c2, v2) in other.entries() {
                out.set(r1 * so + r2, c1 * so + c2, v1.mul_entry(v2));
            }
        }
        Ok(out)
    }

    /// Traces over `slots` (1-based). With `weight = Some(D)` each traced slot
    /// carries a factor of the arity-1 operator `D` on the left, giving the
    /// quantum trace `Tr(D X)`; `None` is the ordinary partial trace.
    /// Remaining slots keep their relative order.
    pub fn partial_trace(&self, weight: Option<&SparseOp<E::Scalar>>, slots: &[usize]) -> Result<Self> {
        let mut traced = vec![false; self.arity];
        for &s in slots {
            if s == 0 || s > self.arity || traced[s - 1] {
                return Err(Error::Slot {
                    slots: slots.to_vec(),
                    arity: self.arity,
                });
            }
            traced[s - 1] = true;
        }
        if let Some(d) = weight {
            if d.arity != 1 || d.dim != self.dim {
                return Err(Error::Shape("trace weight must be an arity-1 operator of equal dim".into()));
            }
        }
        let n = self.dim;
        let out_arity = self.arity - slots.len();
        let mut out = Self::zero(n, out_arity);
        for (r, c, v) in self.entries() {
            let rw = word_of(r, n, self.arity);
            let cw = word_of(c, n, self.arity);
            let mut w = E::Scalar::one();
            let mut live = true;
            for s in 0..self.arity {
                if !traced[s] {
                    continue;
                }
                match weight {
                    Some(d) => match d.get(cw[s], rw[s]) {
                        Some(x) => w *= x,
                        None => {
                            live = false;
                            break;
                        }
                    },
                    None => {
                        if rw[s] != cw[s] {
                            live = false;
                            break;
                        }
                    }
                }
            }
            if !live {
                continue;
            }
            let (mut ro, mut co) = (0, 0);
            for s in 0..self.arity {
                if !traced[s] {
                    ro = ro * n + rw[s];
                    co = co * n + cw[s];
                }
            }
            out.add_at(ro, co, &v.scale(&w));
        }
        Ok(out)
    }

    /// For arity 0 operators: the single scalar entry.
    pub fn scalar_value(&self) -> E {
        self.get(0, 0).cloned().unwrap_or_else(E::zero_entry)
    }

    /// Multiplies by a field-valued operator on the left: `a · self`.
    pub fn left_mul(&self, a: &SparseOp<E::Scalar>) -> Result<Self> {
        if a.dim != self.dim || a.arity != self.arity {
            return Err(Error::Shape("left factor shape mismatch".into()));
        }
        let mut out = Self::zero(self.dim, self.arity);
        for (r, row) in &a.rows {
            let mut acc: Row<E> = BTreeMap::new();
            for (j, s) in row {
                if let Some(xrow) = self.rows.get(j) {
                    for (c, x) in xrow {
                        let t = x.scale(s);
                        match acc.get_mut(c) {
                            Some(slot) => slot.add_assign_ref(&t),
                            None => {
                                acc.insert(*c, t);
                            }
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero_entry());
            if !acc.is_empty() {
                out.rows.insert(*r, acc);
            }
        }
        Ok(out)
    }

    /// Multiplies by a field-valued operator on the right: `self · a`.
    pub fn right_mul(&self, a: &SparseOp<E::Scalar>) -> Result<Self> {
        if a.dim != self.dim || a.arity != self.arity {
            return Err(Error::Shape("right factor shape mismatch".into()));
        }
        let mut out = Self::zero(self.dim, self.arity);
        for (r, row) in &self.rows {
            let mut acc: Row<E> = BTreeMap::new();
            for (j, x) in row {
                for (c, s) in a.row(*j) {
                    let t = x.scale(s);
                    match acc.get_mut(&c) {
                        Some(slot) => slot.add_assign_ref(&t),
                        None => {
                            acc.insert(c, t);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero_entry());
            if !acc.is_empty() {
                out.rows.insert(*r, acc);
            }
        }
        Ok(out)
    }

    /// First entry (row-major) where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        let diff = self.sub(other).ok()?;
        let first = diff.entries().next().map(|(r, c, _)| (r, c));
        first
    }
}

impl<F: Field> Operator<F> {
    /// Lifts a field-valued operator into any entry type over the same field.
    pub fn lift<E: Entry<Scalar = F>>(&self) -> Operator<E> {
        self.map(|v| E::from_scalar(v.clone()))
    }

    pub fn scalar_identity(dim: usize, arity: usize, c: F) -> Self {
        Self::identity(dim, arity).scale(&c)
    }

    /// The flip operator `P` on `V ⊗ V`: `P^{ab}_{cd} = δ^a_d δ^b_c`.
    pub fn permutation(dim: usize) -> Self {
        let mut op = Self::zero(dim, 2);
        for a in 0..dim {
            for b in 0..dim {
                op.set(a * dim + b, b * dim + a, F::one());
            }
        }
        op
    }

    /// Arity-1 operator with the given diagonal.
    pub fn diagonal(dim: usize, diag: &[F]) -> Self {
        let mut op = Self::zero(dim, 1);
        for (i, v) in diag.iter().enumerate() {
            op.set(i, i, v.clone());
        }
        op
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let n = self.size();
        let mut m = vec![vec![F::zero(); n]; n];
        for (r, c, v) in self.entries() {
            m[r][c] = v.clone();
        }
        m
    }

    /// Rank over the coefficient field by exact elimination.
    pub fn rank_exact(&self) -> usize {
        let rows: Vec<BTreeMap<usize, F>> = self.rows.values().cloned().collect();
        linalg::rank(rows)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.size();
        let inv = linalg::invert(n, self.rows.iter().map(|(r, row)| (*r, row.clone())).collect())
            .ok_or(Error::NotInvertible)?;
        let mut out = Self::zero(self.dim, self.arity);
        for (r, row) in inv.into_iter().enumerate() {
            for (c, v) in row {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.dim, self.arity);
        for (r, c, v) in self.entries() {
            out.set(c, r, v.clone());
        }
        out
    }
}

/// Embeds an arity-2 operator on slots `(i, i+1)` of `V^{⊗k}`.
pub fn embed<E: Entry>(op: &Operator<E>, i: usize, k: usize) -> Result<Operator<E>> {
    if op.arity() != 2 || i == 0 || i + 1 > k {
        return Err(Error::Position { pos: i, arity: k });
    }
    op.embed_at(i, k)
}

/// Ordered product `X_i X_{i+1} … X_k` of slot embeddings inside arity `total`.
pub fn chain<E: Entry>(op: &Operator<E>, i: usize, k: usize, total: usize) -> Result<Operator<E>> {
    if i == 0 || i > k || k + 1 > total {
        return Err(Error::Position { pos: k, arity: total });
    }
    let factors = (i..=k).map(|j| embed(op, j, total)).collect::<Result<Vec<_>>>()?;
    Operator::product(op.dim(), total, factors.iter())
}

/// Quantum partial trace `Tr_{slots}(D X)` with `D` inserted in every traced slot.
pub fn partial_qtrace<E: Entry>(x: &Operator<E>, d: &SparseOp<E::Scalar>, slots: &[usize]) -> Result<Operator<E>> {
    x.partial_trace(Some(d), slots)
}

impl<E: Entry> fmt::Debug for Operator<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator(dim {}, arity {}, nnz {})", self.dim, self.arity, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(
                f,
                "  {:?} {:?} {:?}",
                word_of(r, self.dim, self.arity),
                word_of(c, self.dim, self.arity),
                v
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::standard_r;

    type Op = SparseOp<QRat>;

    #[test]
    fn embed_of_identity_and_permutation() {
        let p = Op::permutation(2);
        assert_eq!(embed(&p, 1, 2).unwrap(), p);
        let id2 = Op::identity(2, 2);
        for k in 2..5 {
            for i in 1..k {
                assert_eq!(embed(&id2, i, k).unwrap(), Op::identity(2, k));
            }
        }
        assert!(matches!(embed(&p, 0, 3), Err(Error::Position { .. })));
        assert!(matches!(embed(&p, 3, 3), Err(Error::Position { .. })));
    }

    #[test]
    fn braid_relation_for_standard_r() {
        let r = standard_r(2);
        let r1 = embed(&r, 1, 3).unwrap();
        let r2 = embed(&r, 2, 3).unwrap();
        let lhs = r1.compose(&r2).unwrap().compose(&r1).unwrap();
        let rhs = r2.compose(&r1).unwrap().compose(&r2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_examples() {
        let p = Op::permutation(3);
        assert_eq!(p.compose(&p).unwrap(), Op::identity(3, 2));
        let r = standard_r(2);
        assert_eq!(r.compose(&Op::identity(2, 2)).unwrap(), r);
        let hecke = Op::identity(2, 2)
            .add(&r.scale(&(&QRat::q() - &QRat::q_pow(-1))))
            .unwrap();
        assert_eq!(r.compose(&r).unwrap(), hecke);
        assert!(matches!(r.compose(&Op::identity(2, 1)), Err(Error::Shape(_))));
    }

    #[test]
    fn chain_of_flips_is_cyclic_shift() {
        let p = Op::permutation(2);
        assert_eq!(chain(&p, 2, 2, 3).unwrap(), embed(&p, 2, 3).unwrap());
        let c = chain(&p, 1, 2, 3).unwrap();
        // P_1 P_2 sends e_(a,b,c) to e_(c,a,b)
        for idx in 0..8 {
            let w = word_of(idx, 2, 3);
            // column idx has its unique nonzero at the image row
            let image: Vec<usize> = c.entries().filter(|(_, col, _)| *col == idx).map(|(r, _, _)| r).collect();
            assert_eq!(image.len(), 1);
            assert_eq!(word_of(image[0], 2, 3), vec![w[2], w[0], w[1]]);
        }
    }

    #[test]
    fn chain_moves_slot_one_to_last() {
        // F_{1→k-1}^{-1} X_1 F_{1→k-1} = X_k for F = P
        let p = Op::permutation(2);
        let x = Op::from_entries(2, 1, [(0, 1, QRat::from_int(3)), (1, 1, QRat::q())]);
        for k in 2..5 {
            let ch = chain(&p, 1, k - 1, k).unwrap();
            let conj = ch.inverse().unwrap().compose(&x.embed_at(1, k).unwrap()).unwrap().compose(&ch).unwrap();
            assert_eq!(conj, x.embed_at(k, k).unwrap());
        }
    }

    #[test]
    fn partial_trace_examples() {
        let id1 = Op::identity(2, 1);
        let t = id1.partial_trace(Some(&id1), &[1]).unwrap();
        assert_eq!(t.arity(), 0);
        assert_eq!(t.scalar_value(), QRat::from_int(2));
        let p = Op::permutation(3);
        assert_eq!(p.partial_trace(None, &[2]).unwrap(), Op::identity(3, 1));
        assert!(matches!(p.partial_trace(None, &[3]), Err(Error::Slot { .. })));
        assert!(matches!(p.partial_trace(None, &[1, 1]), Err(Error::Slot { .. })));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Op::identity(2, 2).rank_exact(), 4);
        assert_eq!(Op::zero(2, 2).rank_exact(), 0);
        assert_eq!(Op::permutation(3).rank_exact(), 9);
    }

    #[test]
    fn inverse_round_trip() {
        let r = standard_r(3);
        let ri = r.inverse().unwrap();
        assert_eq!(r.compose(&ri).unwrap(), Op::identity(3, 2));
        assert!(matches!(Op::zero(2, 1).inverse(), Err(Error::NotInvertible)));
    }

    #[test]
    fn locality_of_embeddings() {
        let r = standard_r(2);
        let a = embed(&r, 1, 4).unwrap();
        let b = embed(&r, 3, 4).unwrap();
        assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
    }
}
