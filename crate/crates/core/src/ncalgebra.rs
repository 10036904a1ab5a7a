//! The algebra generated by the entries `M^i_j` of a quantum matrix.
//!
//! Elements of the free algebra are [`NCPoly`] values; matrices of them are
//! [`OpPoly`] operators. [`QuantumMatrixAlgebra`] ties a validated pair to
//! its generator matrix, the conjugated copies `M_k̄`, the quadratic defining
//! relations, and the homogeneous components of the two-sided ideal they
//! generate. Membership in a component is decided by exact elimination over
//! the span of all monomial shifts of the relations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Echelon, SparseVec};
use crate::rmatrix::ValidatedPair;
use crate::symfun::{CharKind, PowerKind};
use crate::tensor::{chain, embed, word_of, Entry, Operator, SparseOp};

/// The generator `M^row_col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub row: u8,
    pub col: u8,
}

impl Generator {
    pub fn new(row: usize, col: usize) -> Self {
        Self {
            row: row as u8,
            col: col as u8,
        }
    }

    fn index(self, dim: usize) -> usize {
        self.row as usize * dim + self.col as usize
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M[{},{}]", self.row, self.col)
    }
}

/// A word in the generators, ordered degree-lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<Generator>);

impl Monomial {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Column index among degree-`d` words over `dim^2` generators.
    fn index(&self, dim: usize) -> usize {
        let g = dim * dim;
        self.0.iter().fold(0, |acc, x| acc * g + x.index(dim))
    }

    fn from_index(mut index: usize, degree: usize, dim: usize) -> Self {
        let g = dim * dim;
        let mut v = vec![Generator::new(0, 0); degree];
        for slot in (0..degree).rev() {
            let x = index % g;
            v[slot] = Generator::new(x / dim, x % dim);
            index /= g;
        }
        Self(v)
    }

    /// Every word of the given degree over `dim^2` generators, in order.
    pub fn all(degree: usize, dim: usize) -> impl Iterator<Item = Monomial> {
        let count = (dim * dim).pow(degree as u32);
        (0..count).map(move |i| Monomial::from_index(i, degree, dim))
    }
}

impl From<Vec<Generator>> for Monomial {
    fn from(v: Vec<Generator>) -> Self {
        Self(v)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A noncommutative polynomial in the generators with coefficients in `F`.
#[derive(Clone, PartialEq, Eq)]
pub struct NCPoly<F> {
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Default for NCPoly<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> NCPoly<F> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        Self::term(c, Monomial::unit())
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn generator(row: usize, col: usize) -> Self {
        Self::term(F::one(), Monomial(vec![Generator::new(row, col)]))
    }

    pub fn term(c: F, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&F> {
        self.terms.get(m)
    }

    /// Highest degree present; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Component of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Distinct degrees present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(Monomial::degree).collect();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg_ref());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.concat(mb), &ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul_ref(c))).collect(),
        }
    }

    /// Whether `self = c * other` for some nonzero scalar `c`.
    pub fn is_proportional(&self, other: &Self) -> bool {
        let (Some((m, a)), Some(b)) = (self.terms.iter().next(), other.terms.values().next()) else {
            return self.is_zero() && other.is_zero();
        };
        match (other.terms.get(m), b.inv()) {
            (Some(bm), Some(_)) => match bm.inv() {
                Some(inv) => *self == other.scale(&a.mul_ref(&inv)),
                None => false,
            },
            _ => false,
        }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn map_coeffs<G: Field, M: Fn(&F) -> G>(&self, f: M) -> NCPoly<G> {
        let mut out = NCPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn try_map_coeffs<G: Field, E, M: Fn(&F) -> std::result::Result<G, E>>(
        &self,
        f: M,
    ) -> std::result::Result<NCPoly<G>, E> {
        let mut out = NCPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c)?);
        }
        Ok(out)
    }

    fn to_vec(&self, dim: usize) -> SparseVec<F> {
        self.terms.iter().map(|(m, c)| (m.index(dim), c.clone())).collect()
    }

    fn from_vec(v: &SparseVec<F>, degree: usize, dim: usize) -> Self {
        Self {
            terms: v
                .iter()
                .map(|(i, c)| (Monomial::from_index(*i, degree, dim), c.clone()))
                .collect(),
        }
    }
}

impl<F: Field> Entry for NCPoly<F> {
    type Scalar = F;

    fn zero_entry() -> Self {
        Self::zero()
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }
    fn mul_entry(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale(&self, c: &F) -> Self {
        NCPoly::scale(self, c)
    }
    fn from_scalar(c: F) -> Self {
        Self::constant(c)
    }
}

/// Renders in the coefficient grammar with `M[i,j]` letters, highest monomial first.
impl<F: Field> fmt::Display for NCPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.degree() == 0 {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for NCPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPoly({self})")
    }
}

/// Operator on `V^{⊗k}` whose entries are algebra elements.
pub type OpPoly<F> = Operator<NCPoly<F>>;

/// The arity-1 matrix of generators, entry `(i, j)` equal to `M^i_j`.
pub fn generators<F: Field>(dim: usize) -> OpPoly<F> {
    let mut m = OpPoly::zero(dim, 1);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, NCPoly::generator(i, j));
        }
    }
    m
}

/// `M_{k̄}` inside `V^{⊗total}`: `M_{1̄} = M_1`, `M_{k̄+1} = F_k M_{k̄} F_k^{-1}`.
pub fn mbar<F: Field>(m: &OpPoly<F>, k: usize, f: &SparseOp<F>, total: usize) -> Result<OpPoly<F>> {
    if k == 0 || k > total {
        return Err(Error::Position { pos: k, arity: total });
    }
    let f_inv = f.inverse()?;
    let mut cur = m.embed_at(1, total)?;
    for j in 1..k {
        cur = cur.left_mul(&embed(f, j, total)?)?.right_mul(&embed(&f_inv, j, total)?)?;
    }
    Ok(cur)
}

/// Drops everything but the degree-`d` part of each entry (diagnostic helper).
pub fn entries_of_degree<F: Field>(op: &OpPoly<F>, d: usize) -> OpPoly<F> {
    op.map(|p| p.homogeneous_part(d))
}

/// One entry of `R_1 M_{1̄} M_{2̄} - M_{1̄} M_{2̄} R^{FF}_1`, keyed by its
/// row word `(i, j)` and column word `(k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<F: Field> {
    pub row: [usize; 2],
    pub col: [usize; 2],
    pub poly: NCPoly<F>,
}

/// The echelonized span of all shifts of the relations into degree `d`.
#[derive(Clone, Debug)]
pub struct IdealBasis<F: Field> {
    degree: usize,
    dim: usize,
    echelon: Echelon<F>,
}

impl<F: Field> IdealBasis<F> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Dimension of the ideal component.
    pub fn dimension(&self) -> usize {
        self.echelon.rank()
    }

    /// Dimension of the ambient space of degree-`d` words.
    pub fn ambient_dimension(&self) -> usize {
        (self.dim * self.dim).pow(self.degree as u32)
    }

    /// Normal form of a homogeneous polynomial of this degree.
    pub fn reduce(&self, p: &NCPoly<F>) -> NCPoly<F> {
        let v = self.echelon.reduce(p.homogeneous_part(self.degree).to_vec(self.dim));
        let mut out = NCPoly::from_vec(&v, self.degree, self.dim);
        for (m, c) in p.terms() {
            if m.degree() != self.degree {
                out.add_term(m.clone(), c);
            }
        }
        out
    }
}

/// Builds the degree-`d` component spanned by `w_l · r · w_r` for every
/// relation `r` and words with `|w_l| + deg r + |w_r| = d`.
pub fn ideal_component<F: Field>(rels: &[NCPoly<F>], dim: usize, d: usize) -> IdealBasis<F> {
    let mut echelon = Echelon::new();
    let g = dim * dim;
    for r in rels {
        for e in r.degrees() {
            if e > d {
                continue;
            }
            let part = r.homogeneous_part(e);
            let pad = d - e;
            for left in 0..=pad {
                let right = pad - left;
                for lw in 0..g.pow(left as u32) {
                    let lm = Monomial::from_index(lw, left, dim);
                    for rw in 0..g.pow(right as u32) {
                        let rm = Monomial::from_index(rw, right, dim);
                        let v: SparseVec<F> = part
                            .terms()
                            .map(|(m, c)| (lm.concat(m).concat(&rm).index(dim), c.clone()))
                            .collect();
                        echelon.insert(v);
                    }
                }
            }
        }
    }
    IdealBasis {
        degree: d,
        dim,
        echelon,
    }
}

/// Exact membership of `p` in the component `basis`; the residual is the
/// normal form (zero iff member).
pub fn membership<F: Field>(p: &NCPoly<F>, basis: &IdealBasis<F>) -> (bool, NCPoly<F>) {
    if p.terms().any(|(m, _)| m.degree() != basis.degree) {
        let residual = basis.reduce(p);
        return (false, residual);
    }
    let residual = basis.reduce(p);
    (residual.is_zero(), residual)
}

/// The two-sided ideal generated by a fixed list of relations, with its
/// homogeneous components built on demand and cached.
pub struct Ideal<F: Field> {
    dim: usize,
    relations: Vec<NCPoly<F>>,
    components: Mutex<BTreeMap<usize, Arc<IdealBasis<F>>>>,
}

impl<F: Field> Ideal<F> {
    pub fn new(dim: usize, relations: Vec<NCPoly<F>>) -> Self {
        Self {
            dim,
            relations,
            components: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn relations(&self) -> &[NCPoly<F>] {
        &self.relations
    }

    pub fn component(&self, d: usize) -> Arc<IdealBasis<F>> {
        if let Some(c) = self.components.lock().unwrap().get(&d) {
            return c.clone();
        }
        let built = Arc::new(ideal_component(&self.relations, self.dim, d));
        self.components.lock().unwrap().entry(d).or_insert(built).clone()
    }

    /// Normal form of an arbitrary polynomial, degree by degree.
    pub fn reduce(&self, p: &NCPoly<F>) -> NCPoly<F> {
        let mut out = NCPoly::zero();
        for d in p.degrees() {
            let part = p.homogeneous_part(d);
            let reduced = if d < 2 { part } else { self.component(d).reduce(&part) };
            out.add_assign_ref(&reduced);
        }
        out
    }

    pub fn contains(&self, p: &NCPoly<F>) -> bool {
        self.reduce(p).is_zero()
    }
}

/// First entry of an operator whose algebra element is not in the ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub label: String,
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    pub residual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at row {:?} col {:?}: residual {}", self.label, self.row, self.col, self.residual)
    }
}

impl std::error::Error for Mismatch {}

/// Compares two operator-valued matrices entry by entry, either literally
/// (`ideal = None`, free algebra) or modulo the ideal.
pub fn compare_ops<F: Field>(
    label: &str,
    lhs: &OpPoly<F>,
    rhs: &OpPoly<F>,
    ideal: Option<&Ideal<F>>,
) -> std::result::Result<(), Mismatch> {
    let diff = lhs.sub(rhs).map_err(|e| Mismatch {
        label: label.to_string(),
        row: vec![],
        col: vec![],
        residual: e.to_string(),
    })?;
    check_op_zero(label, &diff, ideal)
}

/// Every entry of `diff` vanishes (literally, or modulo the ideal).
pub fn check_op_zero<F: Field>(label: &str, diff: &OpPoly<F>, ideal: Option<&Ideal<F>>) -> std::result::Result<(), Mismatch> {
    for (r, c, p) in diff.entries() {
        let residual = match ideal {
            Some(i) => i.reduce(p),
            None => p.clone(),
        };
        if !residual.is_zero() {
            return Err(Mismatch {
                label: label.to_string(),
                row: word_of(r, diff.dim(), diff.arity()),
                col: word_of(c, diff.dim(), diff.arity()),
                residual: residual.to_string(),
            });
        }
    }
    Ok(())
}

/// Which relations to keep; the default keeps all of them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationFilter {
    /// Relations dropped by `(row word, col word)`.
    pub drop: Vec<([usize; 2], [usize; 2])>,
}

impl RelationFilter {
    fn keeps(&self, row: [usize; 2], col: [usize; 2]) -> bool {
        !self.drop.iter().any(|(r, c)| *r == row && *c == col)
    }
}

type Cache<T> = Mutex<BTreeMap<usize, Arc<T>>>;
type KeyedCache<K, T> = Mutex<BTreeMap<(K, usize), Arc<T>>>;

/// The algebra `M(R, F)` for a validated pair: the free algebra on the
/// entries of `M` modulo `R_1 M_{1̄} M_{2̄} = M_{1̄} M_{2̄} R^{FF}_1`.
pub struct QuantumMatrixAlgebra<F: Field> {
    pub(crate) pair: ValidatedPair<F>,
    pub(crate) m: OpPoly<F>,
    relations: Vec<Relation<F>>,
    ideal: Ideal<F>,
    mbars: Cache<OpPoly<F>>,
    mprods: Cache<OpPoly<F>>,
    filter: RelationFilter,
    pub(crate) chars: KeyedCache<CharKind, NCPoly<F>>,
    pub(crate) powers: KeyedCache<PowerKind, OpPoly<F>>,
}

impl<F: Field> QuantumMatrixAlgebra<F> {
    pub fn new(pair: ValidatedPair<F>) -> Result<Self> {
        Self::with_filter(pair, &RelationFilter::default())
    }

    /// Builds the algebra keeping only the relations admitted by `filter`.
    pub fn with_filter(pair: ValidatedPair<F>, filter: &RelationFilter) -> Result<Self> {
        let dim = pair.dim();
        let m = generators(dim);
        let mut alg = Self {
            pair,
            m,
            relations: Vec::new(),
            ideal: Ideal::new(dim, Vec::new()),
            mbars: Mutex::new(BTreeMap::new()),
            mprods: Mutex::new(BTreeMap::new()),
            filter: filter.clone(),
            chars: Mutex::new(BTreeMap::new()),
            powers: Mutex::new(BTreeMap::new()),
        };
        let relations: Vec<Relation<F>> = alg
            .relation_matrix()?
            .entries()
            .map(|(r, c, p)| Relation {
                row: [r / dim, r % dim],
                col: [c / dim, c % dim],
                poly: p.clone(),
            })
            .filter(|rel| filter.keeps(rel.row, rel.col))
            .collect();
        alg.ideal = Ideal::new(dim, relations.iter().map(|r| r.poly.clone()).collect());
        alg.relations = relations;
        Ok(alg)
    }

    /// The same algebra with the Hecke parameter replaced by `q`.
    pub fn with_parameter(&self, q: F) -> Result<Self> {
        Self::with_filter(self.pair.with_parameter(q)?, &self.filter)
    }

    pub fn filter(&self) -> &RelationFilter {
        &self.filter
    }

    pub fn pair(&self) -> &ValidatedPair<F> {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn height(&self) -> usize {
        self.pair.height()
    }

    pub fn generator_matrix(&self) -> &OpPoly<F> {
        &self.m
    }

    pub fn relations(&self) -> &[Relation<F>] {
        &self.relations
    }

    pub fn ideal(&self) -> &Ideal<F> {
        &self.ideal
    }

    /// `R_1 M_{1̄} M_{2̄} - M_{1̄} M_{2̄} R^{FF}_1` as an arity-2 matrix.
    pub fn relation_matrix(&self) -> Result<OpPoly<F>> {
        let mm = self.mprod(2)?;
        let lhs = mm.left_mul(self.pair.r())?;
        let rhs = mm.right_mul(self.pair.r_ff())?;
        lhs.sub(&rhs)
    }

    /// `M_{k̄}` on its natural arity `k`.
    pub fn mbar(&self, k: usize) -> Result<Arc<OpPoly<F>>> {
        if k == 0 {
            return Err(Error::Position { pos: 0, arity: 0 });
        }
        if let Some(x) = self.mbars.lock().unwrap().get(&k) {
            return Ok(x.clone());
        }
        let value = if k == 1 {
            self.m.clone()
        } else {
            let prev = self.mbar(k - 1)?.embed_at(1, k)?;
            let f = embed(self.pair.f(), k - 1, k)?;
            let fi = embed(self.pair.f_inv(), k - 1, k)?;
            prev.left_mul(&f)?.right_mul(&fi)?
        };
        Ok(self.mbars.lock().unwrap().entry(k).or_insert(Arc::new(value)).clone())
    }

    /// `M_{k̄}` embedded in `V^{⊗total}`.
    pub fn mbar_in(&self, k: usize, total: usize) -> Result<OpPoly<F>> {
        self.mbar(k)?.embed_at(1, total)
    }

    /// `M_{1̄} M_{2̄} … M_{k̄}` on arity `k`.
    pub fn mprod(&self, k: usize) -> Result<Arc<OpPoly<F>>> {
        if k == 0 {
            return Err(Error::Position { pos: 0, arity: 0 });
        }
        if let Some(x) = self.mprods.lock().unwrap().get(&k) {
            return Ok(x.clone());
        }
        let value = if k == 1 {
            self.m.clone()
        } else {
            self.mprod(k - 1)?.embed_at(1, k)?.compose(&*self.mbar(k)?)?
        };
        Ok(self.mprods.lock().unwrap().entry(k).or_insert(Arc::new(value)).clone())
    }

    /// `M_{ī} M_{ī+1} … M_{j̄}` inside arity `total`.
    pub fn mbar_range(&self, i: usize, j: usize, total: usize) -> Result<OpPoly<F>> {
        if i == 1 {
            return self.mprod(j)?.embed_at(1, total);
        }
        let mut acc = self.mbar_in(i, total)?;
        for k in i + 1..=j {
            acc = acc.compose(&self.mbar_in(k, total)?)?;
        }
        Ok(acc)
    }

    /// `(l1)`, `(l1a)` and `(l2)` as literal free-algebra identities for
    /// every admissible slot choice with total arity up to `kmax + 1`.
    pub fn check_lemma_a(&self, kmax: usize) -> Result<std::result::Result<(), Mismatch>> {
        let (r, f) = (self.pair.r(), self.pair.f());
        for total in 2..=kmax + 1 {
            let mbars: Vec<OpPoly<F>> = (1..=total).map(|k| self.mbar_in(k, total)).collect::<Result<_>>()?;
            for i in 1..total {
                let fi = embed(f, i, total)?;
                let ri = embed(r, i, total)?;
                for (k, mk) in mbars.iter().enumerate().map(|(x, m)| (x + 1, m)) {
                    if k == i || k == i + 1 {
                        continue;
                    }
                    for (name, op) in [("F", &fi), ("R", &ri)] {
                        let lhs = mk.left_mul(op)?;
                        let rhs = mk.right_mul(op)?;
                        if let Err(e) = compare_ops(&format!("{name}_{i} M_{k} = M_{k} {name}_{i} (arity {total})"), &lhs, &rhs, None) {
                            return Ok(Err(e));
                        }
                    }
                }
                for k in i..total {
                    let fch = chain(f, i, k, total)?;
                    let lhs = self.mbar_range(i, k, total)?.left_mul(&fch)?;
                    let rhs = self.mbar_range(i + 1, k + 1, total)?.right_mul(&fch)?;
                    if let Err(e) = compare_ops(&format!("F_{{{i}->{k}}} shift identity (arity {total})"), &lhs, &rhs, None) {
                        return Ok(Err(e));
                    }
                }
            }
        }
        Ok(Ok(()))
    }

    /// `α(Y) = Tr_F(1..k)(Y M_{1̄} … M_{k̄})` for `Y` of arity `k`.
    pub fn alpha(&self, y: &SparseOp<F>) -> Result<NCPoly<F>> {
        let k = y.arity();
        let slots: Vec<usize> = (1..=k).collect();
        Ok(self
            .mprod(k)?
            .left_mul(y)?
            .partial_trace(Some(self.pair.d()), &slots)?
            .scalar_value())
    }

    /// `(l4)`: `Tr_F(i..i+k-1)(Y^{(i,k)} M_{ī} … M_{ī+k-1}) = I_{1..i-1} α(Y)` in the free algebra.
    pub fn check_lemma_b(&self, y: &SparseOp<F>, i: usize) -> Result<std::result::Result<(), Mismatch>> {
        let k = y.arity();
        if i == 0 || k == 0 {
            return Err(Error::Position { pos: i, arity: k });
        }
        let total = i + k - 1;
        let yi = y.embed_at(i, total)?;
        let slots: Vec<usize> = (i..=total).collect();
        let lhs = self
            .mbar_range(i, total, total)?
            .left_mul(&yi)?
            .partial_trace(Some(self.pair.d()), &slots)?;
        let alpha = self.alpha(y)?;
        let rhs = OpPoly::identity(self.dim(), i - 1).map(|p| p.mul(&alpha));
        Ok(compare_ops(&format!("quantum trace shift i={i} k={k}"), &lhs, &rhs, None))
    }

    /// `(l3)`: `R_k M_{k̄} M_{k̄+1} - M_{k̄} M_{k̄+1} R^{FF}_k` lies in the ideal, `1 <= k <= kmax`.
    pub fn check_lemma_c(&self, kmax: usize) -> Result<std::result::Result<(), Mismatch>> {
        for k in 1..=kmax {
            let total = k + 1;
            let mm = self.mbar_range(k, k + 1, total)?;
            let lhs = mm.left_mul(&embed(self.pair.r(), k, total)?)?;
            let rhs = mm.right_mul(&embed(self.pair.r_ff(), k, total)?)?;
            if let Err(e) = compare_ops(&format!("R_{k} M_{k} M_{} relation", k + 1), &lhs, &rhs, Some(&self.ideal)) {
                return Ok(Err(e));
            }
        }
        Ok(Ok(()))
    }
}

/// A commutative polynomial: exponent vector over generators, as a sorted word.
pub type CommPoly<F> = BTreeMap<Vec<Generator>, F>;

/// Forgets the order of letters in every monomial.
pub fn abelianize<F: Field>(p: &NCPoly<F>) -> CommPoly<F> {
    let mut out: CommPoly<F> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = m.letters().to_vec();
        key.sort();
        let slot = out.entry(key.clone()).or_insert_with(F::zero);
        *slot += c;
        if slot.is_zero() {
            out.remove(&key);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_rational, Rational};
    use crate::qfield::QRat;
    use crate::rmatrix::{builtin, Family};

    fn alg(family: Family) -> QuantumMatrixAlgebra<QRat> {
        QuantumMatrixAlgebra::new(builtin(family, 2).unwrap().validate(3).unwrap()).unwrap()
    }

    fn g(i: usize, j: usize) -> NCPoly<QRat> {
        NCPoly::generator(i, j)
    }

    #[test]
    fn generator_matrix_and_product() {
        let m = generators::<QRat>(3);
        assert_eq!(m.nnz(), 9);
        let e = m.get(0, 0).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.coeff(&Monomial(vec![Generator::new(0, 0)])), Some(&QRat::one()));
        let m2 = generators::<QRat>(2);
        let sq = m2.compose(&m2).unwrap();
        let expect = g(0, 0).mul(&g(0, 1)).add(&g(0, 1).mul(&g(1, 1)));
        assert_eq!(sq.get(0, 1).unwrap(), &expect);
    }

    #[test]
    fn monomial_order_is_deglex() {
        let a = Monomial(vec![Generator::new(1, 1)]);
        let b = Monomial(vec![Generator::new(0, 0), Generator::new(0, 0)]);
        assert!(a < b);
        let c = Monomial(vec![Generator::new(0, 1), Generator::new(0, 0)]);
        assert!(b < c);
        let all: Vec<Monomial> = Monomial::all(2, 2).collect();
        assert_eq!(all.len(), 16);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mbar_for_flip_is_slot_copy() {
        let a = alg(Family::RttStandard);
        let m = generators::<QRat>(2);
        for total in 1..4 {
            for k in 1..=total {
                assert_eq!(a.mbar_in(k, total).unwrap(), m.embed_at(k, total).unwrap());
                assert_eq!(
                    mbar(&m, k, a.pair().f(), total).unwrap(),
                    m.embed_at(k, total).unwrap()
                );
            }
        }
    }

    #[test]
    fn mbar_for_re_pair_has_two_slot_support() {
        let a = alg(Family::ReStandard);
        let r = a.pair().r().clone();
        let m2 = a.mbar(2).unwrap();
        let expect = generators::<QRat>(2).embed_at(1, 2).unwrap().left_mul(&r).unwrap().right_mul(&r.inverse().unwrap()).unwrap();
        assert_eq!(*m2, expect);
        assert_ne!(*m2, generators::<QRat>(2).embed_at(2, 2).unwrap());
        assert!(m2.entries().all(|(_, _, p)| p.degree() == Some(1) && p.is_homogeneous()));
    }

    #[test]
    fn rtt_relations_match_classical_presentation() {
        // R T1 T2 = T1 T2 R entry by entry
        let a = alg(Family::RttStandard);
        let r = a.pair().r();
        let t1 = generators::<QRat>(2).embed_at(1, 2).unwrap();
        let t2 = generators::<QRat>(2).embed_at(2, 2).unwrap();
        let tt = t1.compose(&t2).unwrap();
        let expect = tt.left_mul(r).unwrap().sub(&tt.right_mul(r).unwrap()).unwrap();
        assert_eq!(a.relation_matrix().unwrap(), expect);
        assert!(a.relations().iter().all(|r| r.poly.is_homogeneous() && r.poly.degree() == Some(2)));
    }

    #[test]
    fn re_relations_match_reflection_equation() {
        // R1 M1 R1 M1 = M1 R1 M1 R1
        let a = alg(Family::ReStandard);
        let r = a.pair().r();
        let m1 = generators::<QRat>(2).embed_at(1, 2).unwrap();
        let lhs = m1.left_mul(r).unwrap().right_mul(r).unwrap().compose(&m1).unwrap();
        let rhs = m1.right_mul(r).unwrap().compose(&m1).unwrap().right_mul(r).unwrap();
        let re = lhs.sub(&rhs).unwrap();
        // the defining matrix equals the RE form multiplied by R^{-1} on the right
        let ours = a.relation_matrix().unwrap().right_mul(r).unwrap();
        assert_eq!(ours, re);
    }

    #[test]
    fn classical_relations_are_commutators() {
        let one = parse_rational("1").unwrap();
        let pair = builtin(Family::RttClassical, 2).unwrap().at(&one).unwrap().validate(3).unwrap();
        let a = QuantumMatrixAlgebra::new(pair).unwrap();
        for rel in a.relations() {
            assert!(abelianize(&rel.poly).is_empty(), "{}", rel.poly);
            assert_eq!(rel.poly.len(), 2);
        }
        let basis = a.ideal().component(2);
        // 16 words, 10 commutative monomials: 6 independent commutators
        assert_eq!(basis.dimension(), 6);
    }

    #[test]
    fn ideal_membership_basics() {
        let a = alg(Family::RttStandard);
        let basis = a.ideal().component(2);
        for rel in a.relations() {
            assert!(membership(&rel.poly, &basis).0);
        }
        let (ok, residual) = membership(&g(0, 0), &basis);
        assert!(!ok);
        assert_eq!(residual, g(0, 0));
        assert!(membership(&NCPoly::zero(), &basis).0);
        let r1 = &a.relations()[0].poly;
        let r2 = &a.relations()[1].poly;
        assert!(membership(&r1.add(&r2.scale(&QRat::q())), &basis).0);
        let (ok, residual) = membership(&g(0, 1).mul(&g(1, 0)), &basis);
        assert!(!ok);
        assert!(!residual.is_zero());
    }

    #[test]
    fn rtt_degree_two_dimension_matches_classical_count() {
        let a = alg(Family::RttStandard);
        let basis = a.ideal().component(2);
        let relation_rank = crate::linalg::rank(
            a.relations().iter().map(|r| r.poly.to_vec(2)).collect(),
        );
        assert_eq!(basis.dimension(), relation_rank);
        assert_eq!(basis.dimension(), 6);
    }

    #[test]
    fn ideal_component_is_two_sided() {
        let a = alg(Family::ReStandard);
        let c2 = a.ideal().component(2);
        let c3 = a.ideal().component(3);
        for (pivot, row) in c2.echelon.rows() {
            let _ = pivot;
            let p = NCPoly::from_vec(row, 2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    assert!(membership(&g(i, j).mul(&p), &c3).0);
                    assert!(membership(&p.mul(&g(i, j)), &c3).0);
                }
            }
        }
    }

    #[test]
    fn lemma_a_holds_for_builtins() {
        for family in [Family::RttStandard, Family::ReStandard] {
            let a = alg(family);
            assert_eq!(a.check_lemma_a(2).unwrap(), Ok(()), "{family}");
        }
    }

    #[test]
    fn lemma_b_examples() {
        for family in [Family::RttStandard, Family::ReStandard] {
            let a = alg(family);
            let id1 = SparseOp::identity(2, 1);
            assert_eq!(a.check_lemma_b(&id1, 1).unwrap(), Ok(()));
            assert_eq!(a.check_lemma_b(&id1, 2).unwrap(), Ok(()));
            let r = a.pair().r().clone();
            assert_eq!(a.check_lemma_b(&r, 2).unwrap(), Ok(()), "{family}");
        }
    }

    #[test]
    fn lemma_c_examples() {
        for family in [Family::RttStandard, Family::ReStandard] {
            let a = alg(family);
            assert_eq!(a.check_lemma_c(2).unwrap(), Ok(()), "{family}");
        }
    }

    #[test]
    fn dropping_relations_shrinks_the_ideal() {
        let pair = builtin(Family::RttStandard, 2).unwrap().validate(3).unwrap();
        let full = QuantumMatrixAlgebra::new(pair.clone()).unwrap();
        let rel = full.relations()[0].clone();
        let filter = RelationFilter {
            drop: vec![(rel.row, rel.col)],
        };
        let cut = QuantumMatrixAlgebra::with_filter(pair, &filter).unwrap();
        assert_eq!(cut.relations().len() + 1, full.relations().len());
        let _ = cut.ideal().component(2).dimension();
    }

    #[test]
    fn proportional_polys() {
        let p = g(0, 1).mul(&g(1, 0)).sub(&g(1, 1));
        assert!(p.is_proportional(&p.scale(&QRat::q())));
        assert!(!p.is_proportional(&p.add(&g(0, 0))));
        assert!(!p.is_proportional(&NCPoly::zero()));
        assert!(NCPoly::<QRat>::zero().is_proportional(&NCPoly::zero()));
    }

    #[test]
    fn abelianize_forgets_order() {
        let p: NCPoly<Rational> = NCPoly::generator(0, 1)
            .mul(&NCPoly::generator(1, 0))
            .sub(&NCPoly::generator(1, 0).mul(&NCPoly::generator(0, 1)));
        assert!(abelianize(&p).is_empty());
    }
}
