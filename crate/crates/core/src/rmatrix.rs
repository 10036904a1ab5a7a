//! R-matrix pairs and the structural checks that certify them.
//!
//! A pair `(R, F)` of operators on `V ⊗ V` is usable once it passes the
//! preflight pipeline: both braid relations, the two mixed compatibility
//! relations, the Hecke condition for `R`, closedness of `F` (existence of the
//! skew inverse `Ψ` and the trace matrix `D`), the three `D` properties, the
//! twist relations and a finite height for the antisymmetrizer tower.
//! [`RMatrixPair::validate`] runs all of them and yields a [`ValidatedPair`].

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, EvalError, Result};
use crate::field::{q_number, Field, Rational};
use crate::qfield::QRat;
use crate::tensor::{embed, word_of, SparseOp};

/// The standard Drinfeld–Jimbo braid matrix for `GL_q(N)`:
/// `R^{ii}_{ii} = q`, `R^{ij}_{ji} = 1` for `i != j`, `R^{ij}_{ij} = q - q^{-1}` for `i < j`.
pub fn standard_r(n: usize) -> SparseOp<QRat> {
    let q = QRat::q();
    let lambda = &q - &QRat::q_pow(-1);
    let mut r = SparseOp::zero(n, 2);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            if i == j {
                r.set(row, row, q.clone());
            } else {
                r.set(row, j * n + i, QRat::one());
                if i < j {
                    r.set(row, row, lambda.clone());
                }
            }
        }
    }
    r
}

/// Built-in pair families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `(R, P)`: the RTT algebra.
    RttStandard,
    /// `(R, R)`: the reflection equation algebra.
    ReStandard,
    /// `(P, P)`: commuting matrix entries; Hecke only at `q = 1`.
    RttClassical,
    /// `(R, R^{-1})`.
    InverseTwistStandard,
    /// User-supplied matrices.
    Custom,
}

impl Family {
    pub const BUILTIN: [Family; 4] = [
        Family::RttStandard,
        Family::ReStandard,
        Family::RttClassical,
        Family::InverseTwistStandard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RttStandard => "rtt-standard",
            Family::ReStandard => "re-standard",
            Family::RttClassical => "rtt-classical",
            Family::InverseTwistStandard => "inverse-twist-standard",
            Family::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::BUILTIN
            .into_iter()
            .chain([Family::Custom])
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn description(self) -> &'static str {
        match self {
            Family::RttStandard => "standard GL_q(N) R-matrix with F = P (RTT algebra)",
            Family::ReStandard => "standard GL_q(N) R-matrix with F = R (reflection equation algebra)",
            Family::RttClassical => "R = F = P, run with q specialized to 1 (commutative matrix algebra)",
            Family::InverseTwistStandard => "standard GL_q(N) R-matrix with F = R^{-1}",
            Family::Custom => "R and F read from matrix files",
        }
    }

    /// The `q` value the family must be specialized at, if any.
    pub fn required_q(self) -> Option<Rational> {
        match self {
            Family::RttClassical => Some(<Rational as Field>::one()),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constructs a built-in pair over the formal field Q(q).
pub fn builtin(family: Family, n: usize) -> Result<RMatrixPair<QRat>> {
    if n < 2 {
        return Err(Error::Input(format!("dimension N must be at least 2, got {n}")));
    }
    let r = standard_r(n);
    let p = SparseOp::permutation(n);
    let (r, f) = match family {
        Family::RttStandard => (r, p),
        Family::ReStandard => (r.clone(), r),
        Family::RttClassical => (p.clone(), p),
        Family::InverseTwistStandard => {
            let ri = r.inverse()?;
            (r, ri)
        }
        Family::Custom => {
            return Err(Error::Input("the custom family is read from matrix files".into()));
        }
    };
    Ok(RMatrixPair::new(r, f, QRat::q()))
}

/// An unvalidated pair `(R, F)` over `F`, with the value of `q` in that field.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrixPair<F: Field> {
    pub r: SparseOp<F>,
    pub f: SparseOp<F>,
    pub q: F,
}

impl<F: Field> RMatrixPair<F> {
    pub fn new(r: SparseOp<F>, f: SparseOp<F>, q: F) -> Self {
        Self { r, f, q }
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }
}

impl RMatrixPair<QRat> {
    /// Specializes `q` to the rational `x`.
    pub fn at(&self, x: &BigRational) -> Result<RMatrixPair<Rational>, EvalError> {
        Ok(RMatrixPair {
            r: self.r.try_map(|v| v.eval_at(x))?,
            f: self.f.try_map(|v| v.eval_at(x))?,
            q: x.clone(),
        })
    }

    /// Applies `q -> -q^{-1}` to every entry (and to `q`).
    pub fn reflect(&self) -> Self {
        Self {
            r: self.r.map(QRat::reflect),
            f: self.f.map(QRat::reflect),
            q: self.q.reflect(),
        }
    }
}

/// `X_1 X_2 X_1 = X_2 X_1 X_2` on `V^{⊗3}`.
pub fn check_ybe<F: Field>(x: &SparseOp<F>) -> bool {
    braid_sides(x).is_some_and(|(l, r)| l == r)
}

fn braid_sides<F: Field>(x: &SparseOp<F>) -> Option<(SparseOp<F>, SparseOp<F>)> {
    let x1 = embed(x, 1, 3).ok()?;
    let x2 = embed(x, 2, 3).ok()?;
    let lhs = x1.compose(&x2).ok()?.compose(&x1).ok()?;
    let rhs = x2.compose(&x1).ok()?.compose(&x2).ok()?;
    Some((lhs, rhs))
}

/// `R_1 F_2 F_1 = F_2 F_1 R_2` and `F_1 F_2 R_1 = R_2 F_1 F_2`.
pub fn check_compatible<F: Field>(r: &SparseOp<F>, f: &SparseOp<F>) -> bool {
    compatibility_failure(r, f).is_none()
}

fn compatibility_failure<F: Field>(r: &SparseOp<F>, f: &SparseOp<F>) -> Option<String> {
    if r.dim() != f.dim() || r.arity() != 2 || f.arity() != 2 {
        return Some("shape mismatch".into());
    }
    let e = |x: &SparseOp<F>, i| embed(x, i, 3).expect("arity 2");
    let (r1, r2, f1, f2) = (e(r, 1), e(r, 2), e(f, 1), e(f, 2));
    let prod = |xs: &[&SparseOp<F>]| SparseOp::product(r.dim(), 3, xs.iter().copied()).expect("shapes agree");
    let first_l = prod(&[&r1, &f2, &f1]);
    let first_r = prod(&[&f2, &f1, &r2]);
    if let Some((row, col)) = first_l.first_difference(&first_r) {
        return Some(format!("R1 F2 F1 != F2 F1 R2 at {}", witness_words(r.dim(), 3, row, col)));
    }
    let second_l = prod(&[&f1, &f2, &r1]);
    let second_r = prod(&[&r2, &f1, &f2]);
    if let Some((row, col)) = second_l.first_difference(&second_r) {
        return Some(format!("F1 F2 R1 != R2 F1 F2 at {}", witness_words(r.dim(), 3, row, col)));
    }
    None
}

fn witness_words(dim: usize, arity: usize, row: usize, col: usize) -> String {
    format!("row {:?} col {:?}", word_of(row, dim, arity), word_of(col, dim, arity))
}

/// `R^2 = I + (q - q^{-1}) R`.
pub fn check_hecke<F: Field>(r: &SparseOp<F>, q: &F) -> bool {
    let Some(qinv) = q.inv() else { return false };
    let lambda = q.clone() - qinv;
    let Ok(sq) = r.compose(r) else { return false };
    let rhs = SparseOp::identity(r.dim(), 2)
        .add(&r.scale(&lambda))
        .expect("shapes agree");
    sq == rhs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerKind {
    Antisymmetrizer,
    Symmetrizer,
}

/// `A^{(1)}, A^{(2)}, …` (or the `S` tower); level `k` acts on `V^{⊗k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorTower<F: Field> {
    pub kind: TowerKind,
    levels: Vec<SparseOp<F>>,
}

impl<F: Field> ProjectorTower<F> {
    /// Level `k >= 1`, if computed.
    pub fn level(&self, k: usize) -> Option<&SparseOp<F>> {
        k.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[SparseOp<F>] {
        &self.levels
    }

    /// Runs the recursion
    /// `T^{(k)} = c_k T^{(k-1)} (a_k I + b_k R_{k-1}) T^{(k-1)}`
    /// with the scalars `(a_k, b_k, c_k)` supplied per level.
    pub fn with_scalars<S>(kind: TowerKind, r: &SparseOp<F>, kmax: usize, scalars: S) -> Result<Self>
    where
        S: Fn(usize) -> Result<(F, F, F)>,
    {
        let n = r.dim();
        let mut levels = vec![SparseOp::identity(n, 1)];
        for k in 2..=kmax {
            let (a, b, c) = scalars(k)?;
            let prev = levels[k - 2].embed_at(1, k)?;
            let mid = SparseOp::scalar_identity(n, k, a).add(&embed(r, k - 1, k)?.scale(&b))?;
            let next = prev.compose(&mid)?.compose(&prev)?.scale(&c);
            levels.push(next);
        }
        Ok(Self { kind, levels })
    }

    /// q-antisymmetrizers `A^{(k)} = (1/k_q) A^{(k-1)} (q^{k-1} - (k-1)_q R_{k-1}) A^{(k-1)}`.
    pub fn antisymmetrizers(r: &SparseOp<F>, q: &F, kmax: usize) -> Result<Self> {
        Self::with_scalars(TowerKind::Antisymmetrizer, r, kmax, |k| {
            let kq = q_number(q, k).inv().ok_or(Error::QNumberZero { k })?;
            let lead = q.powi(k as i32 - 1).ok_or(Error::QNumberZero { k })?;
            Ok((lead, q_number(q, k - 1).neg_ref(), kq))
        })
    }

    /// q-symmetrizers `S^{(k)} = (1/k_q) S^{(k-1)} (q^{1-k} + (k-1)_q R_{k-1}) S^{(k-1)}`.
    pub fn symmetrizers(r: &SparseOp<F>, q: &F, kmax: usize) -> Result<Self> {
        Self::with_scalars(TowerKind::Symmetrizer, r, kmax, |k| {
            let kq = q_number(q, k).inv().ok_or(Error::QNumberZero { k })?;
            let lead = q.powi(1 - k as i32).ok_or(Error::QNumberZero { k })?;
            Ok((lead, q_number(q, k - 1), kq))
        })
    }

    /// Extends the tower by one level with the recursion of its kind.
    pub fn extend_to(&mut self, r: &SparseOp<F>, q: &F, kmax: usize) -> Result<()> {
        if kmax <= self.levels.len() {
            return Ok(());
        }
        let full = match self.kind {
            TowerKind::Antisymmetrizer => Self::antisymmetrizers(r, q, kmax)?,
            TowerKind::Symmetrizer => Self::symmetrizers(r, q, kmax)?,
        };
        self.levels = full.levels;
        Ok(())
    }
}

pub fn antisymmetrizers<F: Field>(r: &SparseOp<F>, q: &F, kmax: usize) -> Result<ProjectorTower<F>> {
    ProjectorTower::antisymmetrizers(r, q, kmax)
}

pub fn symmetrizers<F: Field>(r: &SparseOp<F>, q: &F, kmax: usize) -> Result<ProjectorTower<F>> {
    ProjectorTower::symmetrizers(r, q, kmax)
}

/// The A-tower built from reflected recursion scalars; equals the S-tower.
pub fn reflected_antisymmetrizers(r: &SparseOp<QRat>, kmax: usize) -> Result<ProjectorTower<QRat>> {
    let q = QRat::q();
    ProjectorTower::with_scalars(TowerKind::Antisymmetrizer, r, kmax, |k| {
        let kq = q_number(&q, k).inv().ok_or(Error::QNumberZero { k })?;
        let lead = q.powi(k as i32 - 1).unwrap();
        Ok((lead.reflect(), q_number(&q, k - 1).neg_ref().reflect(), kq.reflect()))
    })
}

/// Smallest `n <= nmax` with `A^{(n+1)} = 0` and `rank A^{(n)} = 1`, with the
/// A-tower computed through level `n + 1`.
pub fn height<F: Field>(r: &SparseOp<F>, q: &F, nmax: usize) -> Result<(usize, ProjectorTower<F>)> {
    let mut tower = ProjectorTower::antisymmetrizers(r, q, 1)?;
    for n in 1..=nmax {
        tower.extend_to(r, q, n + 1)?;
        if tower.level(n + 1).unwrap().is_zero() {
            let rank = tower.level(n).unwrap().rank_exact();
            if rank == 1 {
                return Ok((n, tower));
            }
            return Err(Error::NotEvenHecke {
                nmax,
                reason: format!("A^({}) vanishes but rank A^({n}) = {rank}", n + 1),
            });
        }
    }
    Err(Error::NotEvenHecke {
        nmax,
        reason: format!("A^({}) is nonzero", nmax + 1),
    })
}

/// Skew inverse `Ψ` with `Ψ^{af}_{cg} F^{gb}_{fd} = δ^a_d δ^b_c`, and `D^a_b = Ψ^{ac}_{bc}`.
pub fn skew_inverse<F: Field>(f: &SparseOp<F>) -> Result<(SparseOp<F>, SparseOp<F>)> {
    let n = f.dim();
    if f.arity() != 2 {
        return Err(Error::Shape("skew inverse needs an arity-2 operator".into()));
    }
    f.inverse()?;
    // reshuffled[(f,g),(d,b)] = F[(g,b),(f,d)]
    let mut reshuffled = SparseOp::zero(n, 2);
    for (row, col, v) in f.entries() {
        let (g, b) = (row / n, row % n);
        let (fi, d) = (col / n, col % n);
        reshuffled.set(fi * n + g, d * n + b, v.clone());
    }
    let inv = reshuffled.inverse().map_err(|_| Error::NotClosed {
        rank: reshuffled.rank_exact(),
        size: n * n,
    })?;
    // Ψ^{af}_{cg} = inv[(a,c),(f,g)]
    let mut psi = SparseOp::zero(n, 2);
    for (row, col, v) in inv.entries() {
        let (a, c) = (row / n, row % n);
        let (fi, g) = (col / n, col % n);
        psi.set(a * n + fi, c * n + g, v.clone());
    }
    let mut d = SparseOp::zero(n, 1);
    for (row, col, v) in psi.entries() {
        let (a, c1) = (row / n, row % n);
        let (b, c2) = (col / n, col % n);
        if c1 == c2 {
            d.add_at(a, b, v);
        }
    }
    Ok((psi, d))
}

/// `R^F = F R F^{-1}`.
pub fn twist<F: Field>(r: &SparseOp<F>, f: &SparseOp<F>) -> Result<SparseOp<F>> {
    let fi = f.inverse()?;
    f.compose(r)?.compose(&fi)
}

/// Outcome of one named structural check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreflightCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreflightReport {
    pub checks: Vec<PreflightCheck>,
}

impl PreflightReport {
    fn record(&mut self, name: &'static str, failure: Option<String>) -> bool {
        let passed = failure.is_none();
        self.checks.push(PreflightCheck {
            name,
            passed,
            detail: failure,
        });
        passed
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&PreflightCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Verifies `Tr_F(2) F_1 = I_1`, `F_1 D_1 D_2 = D_1 D_2 F_1`, and
/// `Tr_F(2)(F_1^{±1} X_1 F_1^{∓1}) = I_1 Tr_F X` on every elementary `X`.
/// Returns the first failing property with a witness.
pub fn d_property_failure<F: Field>(f: &SparseOp<F>, d: &SparseOp<F>) -> Result<Option<(&'static str, String)>> {
    let n = f.dim();
    let id1 = SparseOp::identity(n, 1);
    let t = f.partial_trace(Some(d), &[2])?;
    if let Some((r, c)) = t.first_difference(&id1) {
        return Ok(Some(("d-trace-f", format!("Tr_F(2) F_1 differs from I at ({r},{c})"))));
    }
    let dd = d.tensor(d)?;
    if let Some((r, c)) = f.compose(&dd)?.first_difference(&dd.compose(f)?) {
        return Ok(Some(("d-commutes-f", format!("F D1 D2 != D1 D2 F at {}", witness_words(n, 2, r, c)))));
    }
    let fi = f.inverse()?;
    for i in 0..n {
        for j in 0..n {
            let x = SparseOp::from_entries(n, 1, [(i, j, F::one())]);
            let x1 = x.embed_at(1, 2)?;
            let expect = SparseOp::scalar_identity(n, 1, d.get(j, i).cloned().unwrap_or_else(F::zero));
            for (sign, (a, b)) in [("+", (f, &fi)), ("-", (&fi, f))] {
                let lhs = a.compose(&x1)?.compose(b)?.partial_trace(Some(d), &[2])?;
                if lhs != expect {
                    return Ok(Some((
                        "d-conjugation-invariance",
                        format!("fails for X = E[{i},{j}] with exponent sign {sign}"),
                    )));
                }
            }
        }
    }
    Ok(None)
}

pub fn check_d_properties<F: Field>(f: &SparseOp<F>, d: &SparseOp<F>) -> bool {
    matches!(d_property_failure(f, d), Ok(None))
}

/// `R^{FF}_1 D_1 D_2 = D_1 D_2 R_1`.
pub fn check_twist_square<F: Field>(r: &SparseOp<F>, f: &SparseOp<F>, d: &SparseOp<F>) -> bool {
    let Ok(rff) = twist(r, f).and_then(|rf| twist(&rf, f)) else {
        return false;
    };
    let Ok(dd) = d.tensor(d) else { return false };
    matches!((rff.compose(&dd), dd.compose(r)), (Ok(a), Ok(b)) if a == b)
}

/// A pair that passed every preflight check, with all derived data.
#[derive(Clone, Debug)]
pub struct ValidatedPair<F: Field> {
    pub(crate) pair: RMatrixPair<F>,
    pub(crate) r_inv: SparseOp<F>,
    pub(crate) f_inv: SparseOp<F>,
    pub(crate) r_ff: SparseOp<F>,
    pub(crate) psi: SparseOp<F>,
    pub(crate) d: SparseOp<F>,
    pub(crate) height: usize,
    pub(crate) a_tower: ProjectorTower<F>,
    pub(crate) s_tower: ProjectorTower<F>,
    pub(crate) report: PreflightReport,
}

/// A pair rejected by preflight, with the checks that ran.
#[derive(Debug)]
pub struct ValidationFailure {
    pub report: PreflightReport,
    pub error: Error,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for ValidationFailure {}

impl<F: Field> RMatrixPair<F> {
    /// Runs the preflight pipeline. `nmax` bounds the height search.
    pub fn validate(self, nmax: usize) -> std::result::Result<ValidatedPair<F>, ValidationFailure> {
        let mut report = PreflightReport::default();
        macro_rules! bail {
            ($e:expr) => {
                return Err(ValidationFailure { report, error: $e })
            };
        }
        macro_rules! gate {
            ($name:expr, $failure:expr) => {
                if !report.record($name, $failure) {
                    let msg = format!("{} failed: {}", $name, report.checks.last().unwrap().detail.clone().unwrap_or_default());
                    bail!(Error::Validation(msg));
                }
            };
        }
        let (r, f, q) = (&self.r, &self.f, &self.q);
        if r.arity() != 2 || f.arity() != 2 || r.dim() != f.dim() {
            bail!(Error::Shape("R and F must be arity-2 operators of equal dimension".into()));
        }
        let n = r.dim();
        let ybe_failure = |x: &SparseOp<F>, label: &str| {
            braid_sides(x).and_then(|(lhs, rhs)| {
                lhs.first_difference(&rhs)
                    .map(|(row, col)| format!("{label}1 {label}2 {label}1 != {label}2 {label}1 {label}2 at {}", witness_words(n, 3, row, col)))
            })
        };
        gate!("ybe-r", ybe_failure(r, "R"));
        gate!("ybe-f", ybe_failure(f, "F"));
        gate!("compatibility", compatibility_failure(r, f));
        let hecke = (!check_hecke(r, q)).then(|| format!("R^2 != I + (q - q^-1) R with q = {q}"));
        gate!("hecke", hecke);
        let f_inv = match f.inverse() {
            Ok(x) => x,
            Err(_) => {
                report.record("closedness", Some("F is singular".into()));
                bail!(Error::NotInvertible);
            }
        };
        let (psi, d) = match skew_inverse(f) {
            Ok(x) => x,
            Err(e) => {
                report.record("closedness", Some(e.to_string()));
                bail!(e);
            }
        };
        report.record("closedness", None);
        let dfail = match d_property_failure(f, &d) {
            Ok(x) => x,
            Err(e) => bail!(e),
        };
        for name in ["d-trace-f", "d-commutes-f", "d-conjugation-invariance"] {
            let failure = dfail.as_ref().filter(|(n, _)| *n == name).map(|(_, w)| w.clone());
            gate!(name, failure);
        }
        let rf = match twist(r, f) {
            Ok(x) => x,
            Err(e) => bail!(e),
        };
        gate!("twist-ybe", (!check_ybe(&rf)).then(|| "R^F violates the braid relation".to_string()));
        gate!("twist-compatible", compatibility_failure(&rf, f));
        let r_ff = match twist(&rf, f) {
            Ok(x) => x,
            Err(e) => bail!(e),
        };
        gate!(
            "twist-square",
            (!check_twist_square(r, f, &d)).then(|| "R^FF_1 D_1 D_2 != D_1 D_2 R_1".to_string())
        );
        let (height, a_tower) = match height(r, q, nmax) {
            Ok(x) => {
                report.record("height", None);
                x
            }
            Err(e) => {
                report.record("height", Some(e.to_string()));
                bail!(e);
            }
        };
        let s_tower = match ProjectorTower::symmetrizers(r, q, height + 1) {
            Ok(x) => x,
            Err(e) => bail!(e),
        };
        let r_inv = match r.inverse() {
            Ok(x) => x,
            Err(e) => bail!(e),
        };
        Ok(ValidatedPair {
            pair: self,
            r_inv,
            f_inv,
            r_ff,
            psi,
            d,
            height,
            a_tower,
            s_tower,
            report,
        })
    }
}

impl<F: Field> ValidatedPair<F> {
    pub fn dim(&self) -> usize {
        self.pair.dim()
    }
    pub fn pair(&self) -> &RMatrixPair<F> {
        &self.pair
    }
    pub fn r(&self) -> &SparseOp<F> {
        &self.pair.r
    }
    pub fn f(&self) -> &SparseOp<F> {
        &self.pair.f
    }
    pub fn q(&self) -> &F {
        &self.pair.q
    }
    pub fn r_inv(&self) -> &SparseOp<F> {
        &self.r_inv
    }
    pub fn f_inv(&self) -> &SparseOp<F> {
        &self.f_inv
    }
    /// The twist square `R^{FF}`.
    pub fn r_ff(&self) -> &SparseOp<F> {
        &self.r_ff
    }
    pub fn psi(&self) -> &SparseOp<F> {
        &self.psi
    }
    pub fn d(&self) -> &SparseOp<F> {
        &self.d
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn report(&self) -> &PreflightReport {
        &self.report
    }
    pub fn antisymmetrizers(&self) -> &ProjectorTower<F> {
        &self.a_tower
    }
    pub fn symmetrizers(&self) -> &ProjectorTower<F> {
        &self.s_tower
    }

    /// Makes sure both towers reach level `k`.
    pub fn ensure_towers(&mut self, k: usize) -> Result<()> {
        let (r, q) = (&self.pair.r, &self.pair.q);
        self.a_tower.extend_to(r, q, k)?;
        self.s_tower.extend_to(r, q, k)
    }

    /// The same pair read with another Hecke parameter `q`, which must also
    /// satisfy the Hecke relation. The towers are rebuilt to their current
    /// length for the new parameter; the height is kept.
    pub fn with_parameter(&self, q: F) -> Result<Self> {
        let r = &self.pair.r;
        if !check_hecke(r, &q) {
            return Err(Error::Validation(format!("R^2 != I + (q - q^-1) R with q = {q}")));
        }
        let a_tower = ProjectorTower::antisymmetrizers(r, &q, self.a_tower.len())?;
        let s_tower = ProjectorTower::symmetrizers(r, &q, self.s_tower.len())?;
        let mut out = self.clone();
        out.pair.q = q;
        out.a_tower = a_tower;
        out.s_tower = s_tower;
        Ok(out)
    }

    /// Replaces `D` without revalidating. Only for negative controls.
    #[doc(hidden)]
    pub fn with_corrupted_d(mut self, d: SparseOp<F>) -> Self {
        self.d = d;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_rational;

    type Op = SparseOp<QRat>;

    #[test]
    fn ybe_examples() {
        assert!(check_ybe(&Op::permutation(2)));
        assert!(check_ybe(&standard_r(2)));
        assert!(check_ybe(&standard_r(3)));
        // diagonal X gives X1^2 X2 vs X1 X2^2: only constant diagonals qualify
        let diag = Op::from_entries(2, 2, (0..4).map(|i| (i, i, QRat::from_int(i as i64 + 1))));
        assert!(!check_ybe(&diag));
        assert!(check_ybe(&Op::scalar_identity(2, 2, QRat::from_int(7))));
        // a generic dense rational matrix breaks the braid relation
        let generic = Op::from_entries(
            2,
            2,
            (0..16).map(|i| (i / 4, i % 4, QRat::from_int([3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3][i]))),
        );
        assert!(!check_ybe(&generic));
    }

    #[test]
    fn compatibility_examples() {
        let r = standard_r(2);
        let p = Op::permutation(2);
        assert!(check_compatible(&r, &p));
        assert!(check_compatible(&r, &r));
        assert!(check_compatible(&r, &r.inverse().unwrap()));
        assert!(check_compatible(&standard_r(3), &Op::permutation(3)));
    }

    #[test]
    fn hecke_examples() {
        let q = QRat::q();
        assert!(check_hecke(&standard_r(2), &q));
        assert!(check_hecke(&standard_r(3), &q));
        assert!(!check_hecke(&Op::permutation(2), &q));
        // q and -q^-1 are the two Hecke eigenvalues, so q*I passes while 2*I does not
        assert!(check_hecke(&Op::scalar_identity(2, 2, q.clone()), &q));
        assert!(!check_hecke(&Op::scalar_identity(2, 2, QRat::from_int(2)), &q));
        let one = parse_rational("1").unwrap();
        let p = SparseOp::<Rational>::permutation(2);
        assert!(check_hecke(&p, &one));
    }

    #[test]
    fn second_levels_of_towers() {
        let r = standard_r(2);
        let q = QRat::q();
        let a = antisymmetrizers(&r, &q, 3).unwrap();
        let s = symmetrizers(&r, &q, 3).unwrap();
        assert_eq!(a.level(1).unwrap(), &Op::identity(2, 1));
        assert_eq!(s.level(1).unwrap(), &Op::identity(2, 1));
        let two = qnum2();
        let expect_a = Op::scalar_identity(2, 2, q.clone()).sub(&r).unwrap().scale(&two.inv().unwrap());
        assert_eq!(a.level(2).unwrap(), &expect_a);
        let expect_s = Op::scalar_identity(2, 2, QRat::q_pow(-1)).add(&r).unwrap().scale(&two.inv().unwrap());
        assert_eq!(s.level(2).unwrap(), &expect_s);
        assert_eq!(a.level(2).unwrap().add(s.level(2).unwrap()).unwrap(), Op::identity(2, 2));
        assert!(a.level(3).unwrap().is_zero());
        assert_eq!(a.level(2).unwrap().rank_exact(), 1);
    }

    fn qnum2() -> QRat {
        &QRat::q() + &QRat::q_pow(-1)
    }

    #[test]
    fn classical_antisymmetrizer_at_q_one() {
        let one = parse_rational("1").unwrap();
        let p = SparseOp::<Rational>::permutation(2);
        let a = antisymmetrizers(&p, &one, 2).unwrap();
        let half = parse_rational("1/2").unwrap();
        let expect = SparseOp::identity(2, 2).sub(&p).unwrap().scale(&half);
        assert_eq!(a.level(2).unwrap(), &expect);
    }

    #[test]
    fn heights_of_standard_matrices() {
        let q = QRat::q();
        assert_eq!(height(&standard_r(2), &q, 3).unwrap().0, 2);
        assert_eq!(height(&standard_r(3), &q, 4).unwrap().0, 3);
        assert!(matches!(height(&standard_r(2), &q, 1), Err(Error::NotEvenHecke { .. })));
    }

    #[test]
    fn skew_inverse_of_flip() {
        let p = Op::permutation(3);
        let (psi, d) = skew_inverse(&p).unwrap();
        assert_eq!(psi, p);
        assert_eq!(d, Op::identity(3, 1));
    }

    #[test]
    fn skew_inverse_of_standard_r_gives_trace_identity() {
        let r = standard_r(2);
        let (_, d) = skew_inverse(&r).unwrap();
        // D is diagonal and satisfies Tr_F(2) F_1 = I
        assert!(d.entries().all(|(i, j, _)| i == j));
        assert_eq!(r.partial_trace(Some(&d), &[2]).unwrap(), Op::identity(2, 1));
        assert!(check_d_properties(&r, &d));
    }

    #[test]
    fn singular_reshuffle_is_not_closed() {
        // F = diag(1,1,1,1) is invertible but its (a,c)-reshuffle has rank 1
        let f = Op::identity(2, 2);
        assert!(matches!(skew_inverse(&f), Err(Error::NotClosed { rank: 1, size: 4 })));
        assert!(matches!(skew_inverse(&Op::zero(2, 2)), Err(Error::NotInvertible)));
    }

    #[test]
    fn corrupted_d_is_detected() {
        let p = Op::permutation(2);
        let d = Op::identity(2, 1);
        assert!(check_d_properties(&p, &d));
        let mut bad = d.clone();
        bad.set(0, 0, QRat::from_int(2));
        let failure = d_property_failure(&p, &bad).unwrap();
        assert_eq!(failure.unwrap().0, "d-trace-f");
    }

    #[test]
    fn twist_examples() {
        let r = standard_r(2);
        let p = Op::permutation(2);
        assert_eq!(twist(&r, &p).unwrap(), p.compose(&r).unwrap().compose(&p).unwrap());
        assert_eq!(twist(&r, &r).unwrap(), r);
        for f in [p.clone(), r.clone(), r.inverse().unwrap()] {
            let rf = twist(&r, &f).unwrap();
            assert!(check_ybe(&rf));
            assert!(check_compatible(&rf, &f));
            let (_, d) = skew_inverse(&f).unwrap();
            assert!(check_twist_square(&r, &f, &d));
        }
    }

    #[test]
    fn reflected_recursion_gives_symmetrizers() {
        let r = standard_r(2);
        let s = symmetrizers(&r, &QRat::q(), 4).unwrap();
        assert_eq!(reflected_antisymmetrizers(&r, 4).unwrap().levels(), s.levels());
    }

    #[test]
    fn builtin_validation() {
        for family in [Family::RttStandard, Family::ReStandard, Family::InverseTwistStandard] {
            let v = builtin(family, 2).unwrap().validate(3).unwrap();
            assert_eq!(v.height(), 2, "{family}");
            assert!(v.report().all_passed());
        }
        let classical = builtin(Family::RttClassical, 2).unwrap();
        let err = classical.clone().validate(3).unwrap_err();
        assert_eq!(err.report.first_failure().unwrap().name, "hecke");
        let at_one = classical.at(&parse_rational("1").unwrap()).unwrap().validate(3).unwrap();
        assert_eq!(at_one.d(), &SparseOp::identity(2, 1));
        assert_eq!(at_one.height(), 2);
        assert!(matches!(Family::parse("nope"), Err(Error::UnknownFamily(_))));
    }
}
