//! Power sums, elementary and complete symmetric elements, and the matching
//! matrix powers of the generator matrix.
//!
//! Every value is a free-algebra representative; reduction modulo the
//! ideal happens only inside the identity checks.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{q_number, Field};
use crate::ncalgebra::{check_op_zero, Mismatch, NCPoly, OpPoly, QuantumMatrixAlgebra};
use crate::rmatrix::ProjectorTower;
use crate::tensor::{chain, embed, word_of, Entry, Operator, SparseOp};

/// Which family a characteristic element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CharKind {
    /// `s_k`, weighted by `R_{1→k-1}`.
    PowerSum,
    /// `σ_k`, weighted by `A^(k)`.
    Elementary,
    /// `τ_k`, weighted by `S^(k)`.
    Complete,
}

impl CharKind {
    pub fn symbol(self) -> &'static str {
        match self {
            CharKind::PowerSum => "s",
            CharKind::Elementary => "sigma",
            CharKind::Complete => "tau",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "s" => Some(CharKind::PowerSum),
            "sigma" => Some(CharKind::Elementary),
            "tau" => Some(CharKind::Complete),
            _ => None,
        }
    }
}

impl fmt::Display for CharKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An element of the characteristic subalgebra, homogeneous of degree `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharElement<F: Field> {
    pub kind: CharKind,
    pub k: usize,
    pub value: NCPoly<F>,
}

/// Which matrix power: ordinary `M^{k̄}`, wedge `M^{∧k}`, symmetric `M^{Sk}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PowerKind {
    Ordinary,
    Wedge,
    Symmetric,
}

impl PowerKind {
    pub fn char_kind(self) -> CharKind {
        match self {
            PowerKind::Ordinary => CharKind::PowerSum,
            PowerKind::Wedge => CharKind::Elementary,
            PowerKind::Symmetric => CharKind::Complete,
        }
    }
}

/// An arity-1 matrix whose entries are homogeneous of degree `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPower<F: Field> {
    pub kind: PowerKind,
    pub k: usize,
    pub value: OpPoly<F>,
}

impl<F: Field> QuantumMatrixAlgebra<F> {
    /// `A^(k)` or `S^(k)`, extending the validated towers when needed.
    pub fn projector(&self, kind: CharKind, k: usize) -> Result<SparseOp<F>> {
        let (r, q) = (self.pair.r(), self.pair.q());
        let tower = match kind {
            CharKind::Elementary => self.pair.antisymmetrizers(),
            CharKind::Complete => self.pair.symmetrizers(),
            CharKind::PowerSum => return self.weight(kind, k),
        };
        if let Some(p) = tower.level(k) {
            return Ok(p.clone());
        }
        let longer = match kind {
            CharKind::Elementary => ProjectorTower::antisymmetrizers(r, q, k)?,
            _ => ProjectorTower::symmetrizers(r, q, k)?,
        };
        Ok(longer.level(k).expect("tower built to level k").clone())
    }

    /// The arity-`k` operator contracted against `M_{1̄} … M_{k̄}`.
    pub fn weight(&self, kind: CharKind, k: usize) -> Result<SparseOp<F>> {
        match kind {
            CharKind::PowerSum if k < 2 => Ok(SparseOp::identity(self.dim(), k)),
            CharKind::PowerSum => chain(self.pair.r(), 1, k - 1, k),
            _ => self.projector(kind, k),
        }
    }

    /// `s_k`, `σ_k` or `τ_k`; the degree-0 element is `1`.
    pub fn char_element(&self, kind: CharKind, k: usize) -> Result<CharElement<F>> {
        if let Some(v) = self.chars.lock().unwrap().get(&(kind, k)) {
            return Ok(CharElement { kind, k, value: (**v).clone() });
        }
        let value = if k == 0 {
            NCPoly::one()
        } else {
            self.alpha(&self.weight(kind, k)?)?
        };
        self.chars.lock().unwrap().insert((kind, k), Arc::new(value.clone()));
        Ok(CharElement { kind, k, value })
    }

    pub fn power_sum(&self, k: usize) -> Result<CharElement<F>> {
        self.char_element(CharKind::PowerSum, k)
    }

    pub fn elementary(&self, k: usize) -> Result<CharElement<F>> {
        self.char_element(CharKind::Elementary, k)
    }

    pub fn complete(&self, k: usize) -> Result<CharElement<F>> {
        self.char_element(CharKind::Complete, k)
    }

    /// The contraction of the matching characteristic element with slot 1 left open.
    pub fn power(&self, kind: PowerKind, k: usize) -> Result<MatrixPower<F>> {
        if k == 0 {
            return Err(Error::Position { pos: 0, arity: 0 });
        }
        if let Some(v) = self.powers.lock().unwrap().get(&(kind, k)) {
            return Ok(MatrixPower { kind, k, value: (**v).clone() });
        }
        let w = self.weight(kind.char_kind(), k)?;
        let slots: Vec<usize> = (2..=k).collect();
        let value = self.mprod(k)?.left_mul(&w)?.partial_trace(Some(self.pair.d()), &slots)?;
        self.powers.lock().unwrap().insert((kind, k), Arc::new(value.clone()));
        Ok(MatrixPower { kind, k, value })
    }

    pub fn matrix_power(&self, k: usize) -> Result<MatrixPower<F>> {
        self.power(PowerKind::Ordinary, k)
    }

    pub fn wedge_power(&self, k: usize) -> Result<MatrixPower<F>> {
        self.power(PowerKind::Wedge, k)
    }

    pub fn sym_power(&self, k: usize) -> Result<MatrixPower<F>> {
        self.power(PowerKind::Symmetric, k)
    }

    /// `M^{0̄} = q^{-n} n_q Tr_{(2..n)}(A^(n)) D^{-1}` with the ordinary partial trace.
    pub fn zeroth_power(&self) -> Result<MatrixPower<F>> {
        let value = zeroth_power_op(self.pair.r(), self.pair.d(), self.pair.q(), self.height())?;
        Ok(MatrixPower {
            kind: PowerKind::Ordinary,
            k: 0,
            value: value.lift(),
        })
    }

    /// `M^{k̄}` for `k >= 1` and `M^{0̄}` for `k = 0`.
    pub fn matrix_power_or_zeroth(&self, k: usize) -> Result<OpPoly<F>> {
        if k == 0 {
            Ok(self.zeroth_power()?.value)
        } else {
            Ok(self.matrix_power(k)?.value)
        }
    }

    /// `U = R_{i→i+k-1} … R_{2→k+1} R_{1→k}` on arity `i + k`.
    pub fn shift_conjugator(&self, i: usize, k: usize) -> Result<SparseOp<F>> {
        shift_conjugator(self.pair.r(), i, k)
    }

    /// Checks `Y^(k) = U^{-1} Y^{(i+1,k)} U` for `Y` of arity `k` and
    /// `Z^{(k+1,i)} = U^{-1} Z^{(i)} U` for `Z` of arity `i`.
    pub fn check_shift(&self, y: &SparseOp<F>, z: &SparseOp<F>) -> Result<std::result::Result<(), Mismatch>> {
        check_shift(self.pair.r(), y, z)
    }
}

/// `q^{-n} n_q Tr_{(2..n)}(A^(n)) D^{-1}` computed from the raw data.
pub fn zeroth_power_op<F: Field>(r: &SparseOp<F>, d: &SparseOp<F>, q: &F, n: usize) -> Result<SparseOp<F>> {
    if n == 0 {
        return Err(Error::Position { pos: 0, arity: 0 });
    }
    let d_inv = d.inverse().map_err(|_| Error::DNotInvertible)?;
    let tower = ProjectorTower::antisymmetrizers(r, q, n)?;
    let an = tower.level(n).expect("tower built to level n");
    let slots: Vec<usize> = (2..=n).collect();
    let traced = an.partial_trace(None, &slots)?;
    let qinv = q.inv().ok_or(Error::QNumberZero { k: 0 })?;
    let factor = qinv.powi(n as i32).expect("q nonzero").mul_ref(&q_number(q, n));
    traced.compose(&d_inv).map(|x| x.scale(&factor))
}

/// `U = R_{i→i+k-1} … R_{2→k+1} R_{1→k}` on arity `i + k`.
pub fn shift_conjugator<F: Field>(r: &SparseOp<F>, i: usize, k: usize) -> Result<SparseOp<F>> {
    if i == 0 || k == 0 {
        return Err(Error::Position { pos: i.min(k), arity: i + k });
    }
    let total = i + k;
    let mut u = SparseOp::identity(r.dim(), total);
    for j in 1..=i {
        u = chain(r, j, j + k - 1, total)?.compose(&u)?;
    }
    Ok(u)
}

/// The two shift identities for `Y` (arity `k`) and `Z` (arity `i`).
pub fn check_shift<F: Field>(r: &SparseOp<F>, y: &SparseOp<F>, z: &SparseOp<F>) -> Result<std::result::Result<(), Mismatch>> {
    let (k, i) = (y.arity(), z.arity());
    let total = i + k;
    let u = shift_conjugator(r, i, k)?;
    let u_inv = u.inverse()?;
    let conj = |x: SparseOp<F>| -> Result<SparseOp<F>> { u_inv.compose(&x)?.compose(&u) };
    let y_lhs = y.embed_at(1, total)?;
    let y_rhs = conj(y.embed_at(i + 1, total)?)?;
    if let Some(m) = operator_mismatch(&format!("Y shift i={i} k={k}"), &y_lhs, &y_rhs) {
        return Ok(Err(m));
    }
    let z_lhs = z.embed_at(k + 1, total)?;
    let z_rhs = conj(z.embed_at(1, total)?)?;
    if let Some(m) = operator_mismatch(&format!("Z shift i={i} k={k}"), &z_lhs, &z_rhs) {
        return Ok(Err(m));
    }
    Ok(Ok(()))
}

/// The first differing entry of two scalar operators.
pub fn operator_mismatch<F: Field>(label: &str, a: &SparseOp<F>, b: &SparseOp<F>) -> Option<Mismatch> {
    let (r, c) = a.first_difference(b)?;
    let zero = F::zero();
    let diff = a.get(r, c).unwrap_or(&zero).clone() - b.get(r, c).unwrap_or(&zero).clone();
    Some(Mismatch {
        label: label.to_string(),
        row: word_of(r, a.dim(), a.arity()),
        col: word_of(c, a.dim(), a.arity()),
        residual: diff.to_string(),
    })
}

/// Operators of arity `k` built as polynomials in `R_1 … R_{k-1}` together
/// with the projectors, used as test inputs for the shift identities.
pub fn r_polynomials<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Vec<(String, SparseOp<F>)>> {
    let r = alg.pair().r();
    let mut out = vec![("I".to_string(), SparseOp::identity(alg.dim(), k))];
    for j in 1..k {
        out.push((format!("R_{j}"), embed(r, j, k)?));
    }
    if k >= 2 {
        out.push((format!("R_{{1->{}}}", k - 1), chain(r, 1, k - 1, k)?));
        let mix = embed(r, k - 1, k)?.compose(&embed(r, 1, k)?)?.add(&SparseOp::identity(alg.dim(), k))?;
        out.push(("R_last R_1 + I".to_string(), mix));
    }
    out.push((format!("A^({k})"), alg.projector(CharKind::Elementary, k)?));
    out.push((format!("S^({k})"), alg.projector(CharKind::Complete, k)?));
    Ok(out)
}

/// Every entry of `op` vanishes modulo the ideal.
pub fn vanishes_mod_ideal<F: Field>(alg: &QuantumMatrixAlgebra<F>, label: &str, op: &OpPoly<F>) -> std::result::Result<(), Mismatch> {
    check_op_zero(label, op, Some(alg.ideal()))
}

/// `c * p` for a scalar and an algebra element, as the arity-1 identity times `p`.
pub fn scalar_times_identity<F: Field>(dim: usize, p: &NCPoly<F>) -> OpPoly<F> {
    Operator::<NCPoly<F>>::identity(dim, 1).map(|x| x.mul(p))
}

/// Multiplies every entry of `op` on the right by `p`.
pub fn times_element<F: Field>(op: &OpPoly<F>, p: &NCPoly<F>) -> OpPoly<F> {
    op.map(|x| x.mul(p))
}

impl<F: Field> fmt::Display for CharElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{} = {}", self.kind, self.k, self.value)
    }
}

impl<F: Field> MatrixPower<F> {
    pub fn entry(&self, i: usize, j: usize) -> NCPoly<F> {
        self.value.get(i, j).cloned().unwrap_or_else(NCPoly::zero_entry)
    }
}
