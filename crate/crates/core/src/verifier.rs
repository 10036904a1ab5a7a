//! The identity checks and the suite runner that turns them into a report.
//!
//! Each check reduces a difference of free-algebra representatives modulo
//! the ideal and reports the first surviving entry. Exact mode works over
//! `Q(q)`, or over `Q` when `q` is pinned to a rational; fast mode repeats
//! the whole pipeline at several seeded random integer points.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{q_number, Field, Rational};
use crate::ncalgebra::{check_op_zero, Mismatch, NCPoly, OpPoly, QuantumMatrixAlgebra, RelationFilter};
use crate::parse::read_matrix;
use crate::qfield::QRat;
use crate::rmatrix::{builtin, Family, PreflightReport, RMatrixPair};
use crate::symfun::{r_polynomials, times_element, CharKind, PowerKind};
use crate::tensor::SparseOp;

/// `Ok(())` on success, otherwise the first entry that does not vanish.
pub type Outcome = std::result::Result<(), Mismatch>;

fn sign<F: Field>(e: usize) -> F {
    if e.is_multiple_of(2) {
        F::one()
    } else {
        F::from_i64(-1)
    }
}

fn qpow<F: Field>(q: &F, e: i64) -> F {
    q.powi(e as i32).expect("q is nonzero")
}

fn scalar_outcome<F: Field>(alg: &QuantumMatrixAlgebra<F>, label: &str, p: &NCPoly<F>) -> Outcome {
    let residual = alg.ideal().reduce(p);
    if residual.is_zero() {
        Ok(())
    } else {
        Err(Mismatch {
            label: label.to_string(),
            row: vec![],
            col: vec![],
            residual: residual.to_string(),
        })
    }
}

fn char_value<F: Field>(alg: &QuantumMatrixAlgebra<F>, kind: CharKind, k: usize) -> Result<NCPoly<F>> {
    Ok(alg.char_element(kind, k)?.value)
}

fn power_value<F: Field>(alg: &QuantumMatrixAlgebra<F>, kind: PowerKind, k: usize) -> Result<OpPoly<F>> {
    Ok(alg.power(kind, k)?.value)
}

/// `(-1)^{k-1} k_q M^{∧k} - Σ_{i<k} (-q)^i M^{k-ī} σ_i`, or with `sym` set
/// `k_q M^{Sk} - Σ_{i<k} q^{-i} M^{k-ī} τ_i`.
pub fn chn_difference<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize, sym: bool) -> Result<OpPoly<F>> {
    let q = alg.pair().q();
    let kq = q_number(q, k);
    let (lhs, char_kind) = if sym {
        (power_value(alg, PowerKind::Symmetric, k)?.scale(&kq), CharKind::Complete)
    } else {
        let c = sign::<F>(k - 1).mul_ref(&kq);
        (power_value(alg, PowerKind::Wedge, k)?.scale(&c), CharKind::Elementary)
    };
    let mut diff = lhs;
    for i in 0..k {
        let coeff = if sym {
            qpow(q, -(i as i64))
        } else {
            qpow(&q.neg_ref(), i as i64)
        };
        let term = times_element(&power_value(alg, PowerKind::Ordinary, k - i)?, &char_value(alg, char_kind, i)?);
        diff = diff.sub(&term.scale(&coeff))?;
    }
    Ok(diff)
}

/// Wedge-power identity of degree `k` modulo the ideal.
pub fn check_chn<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Outcome> {
    Ok(check_op_zero(&format!("wedge identity k={k}"), &chn_difference(alg, k, false)?, Some(alg.ideal())))
}

/// Symmetric-power identity of degree `k` modulo the ideal.
pub fn check_chn_sym<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Outcome> {
    Ok(check_op_zero(&format!("symmetric identity k={k}"), &chn_difference(alg, k, true)?, Some(alg.ideal())))
}

/// The wedge identity computed with parameter `-q^{-1}` (in `reflected`)
/// coincides with the symmetric identity at `q`, representative by representative.
pub fn check_chn_reflect<F: Field>(
    alg: &QuantumMatrixAlgebra<F>,
    reflected: &QuantumMatrixAlgebra<F>,
    k: usize,
) -> Result<Outcome> {
    let a = chn_difference(reflected, k, false)?;
    let b = chn_difference(alg, k, true)?;
    Ok(check_op_zero(&format!("reflected wedge identity vs symmetric identity k={k}"), &a.sub(&b)?, None))
}

/// Both Newton relations of degree `k`.
pub fn check_newton<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Outcome> {
    let q = alg.pair().q();
    let kq = q_number(q, k);
    let s = |j| char_value(alg, CharKind::PowerSum, j);
    let sigma = |j| char_value(alg, CharKind::Elementary, j);
    let tau = |j| char_value(alg, CharKind::Complete, j);
    let mut e = sigma(k)?.scale(&sign::<F>(k - 1).mul_ref(&kq));
    let mut h = tau(k)?.scale(&kq);
    for i in 0..k {
        e = e.sub(&s(k - i)?.mul(&sigma(i)?).scale(&qpow(&q.neg_ref(), i as i64)));
        h = h.sub(&s(k - i)?.mul(&tau(i)?).scale(&qpow(q, -(i as i64))));
    }
    if let Err(m) = scalar_outcome(alg, &format!("Newton relation for sigma k={k}"), &e) {
        return Ok(Err(m));
    }
    Ok(scalar_outcome(alg, &format!("Newton relation for tau k={k}"), &h))
}

/// `Σ_{i=0}^{k} (-1)^i τ_{k-i} σ_i` vanishes modulo the ideal.
pub fn check_wronski<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Outcome> {
    let mut acc = NCPoly::zero();
    for i in 0..=k {
        let t = char_value(alg, CharKind::Complete, k - i)?.mul(&char_value(alg, CharKind::Elementary, i)?);
        acc = acc.add(&t.scale(&sign(i)));
    }
    Ok(scalar_outcome(alg, &format!("Wronski relation k={k}"), &acc))
}

/// `Σ_{i=0}^{n} (-q)^i M^{n-ī} σ_i` with the normalized `M^{0̄}`.
pub fn cayley_hamilton_sum<F: Field>(alg: &QuantumMatrixAlgebra<F>) -> Result<OpPoly<F>> {
    let n = alg.height();
    let mq = alg.pair().q().neg_ref();
    let mut acc = OpPoly::zero(alg.dim(), 1);
    for i in 0..=n {
        let m = alg.matrix_power_or_zeroth(n - i)?;
        let t = times_element(&m, &char_value(alg, CharKind::Elementary, i)?);
        acc = acc.add(&t.scale(&qpow(&mq, i as i64)))?;
    }
    Ok(acc)
}

pub fn check_cayley_hamilton<F: Field>(alg: &QuantumMatrixAlgebra<F>) -> Result<Outcome> {
    let n = alg.height();
    Ok(check_op_zero(&format!("Cayley-Hamilton identity n={n}"), &cayley_hamilton_sum(alg)?, Some(alg.ideal())))
}

/// Both expansions of `M^{k̄}` through wedge and symmetric powers.
pub fn check_inverse_chn<F: Field>(alg: &QuantumMatrixAlgebra<F>, k: usize) -> Result<Outcome> {
    let q = alg.pair().q();
    let mk = power_value(alg, PowerKind::Ordinary, k)?;
    let mut via_wedge = mk.clone();
    let mut via_sym = mk;
    for i in 1..=k {
        let iq = q_number(q, i);
        let cw = sign::<F>(i + 1).mul_ref(&qpow(q, (k - i) as i64)).mul_ref(&iq);
        let tw = times_element(&power_value(alg, PowerKind::Wedge, i)?, &char_value(alg, CharKind::Complete, k - i)?);
        via_wedge = via_wedge.sub(&tw.scale(&cw))?;
        let cs = sign::<F>(k - i).mul_ref(&qpow(q, i as i64 - k as i64)).mul_ref(&iq);
        let ts = times_element(&power_value(alg, PowerKind::Symmetric, i)?, &char_value(alg, CharKind::Elementary, k - i)?);
        via_sym = via_sym.sub(&ts.scale(&cs))?;
    }
    if let Err(m) = check_op_zero(&format!("power through wedge powers k={k}"), &via_wedge, Some(alg.ideal())) {
        return Ok(Err(m));
    }
    Ok(check_op_zero(&format!("power through symmetric powers k={k}"), &via_sym, Some(alg.ideal())))
}

/// `[α_a, β_b]` vanishes modulo the ideal.
pub fn check_commutativity<F: Field>(
    alg: &QuantumMatrixAlgebra<F>,
    a: (CharKind, usize),
    b: (CharKind, usize),
) -> Result<Outcome> {
    let x = char_value(alg, a.0, a.1)?;
    let y = char_value(alg, b.0, b.1)?;
    Ok(scalar_outcome(alg, &format!("[{}{}, {}{}]", a.0, a.1, b.0, b.1), &x.commutator(&y)))
}

/// Runs the trace-shift identity for every `Y` built from `R` and every
/// split `i + k - 1 = total <= max_total`.
pub fn check_lemma_b_all<F: Field>(alg: &QuantumMatrixAlgebra<F>, max_total: usize) -> Result<Outcome> {
    for total in 1..=max_total {
        for k in 1..=total {
            let i = total - k + 1;
            for (label, y) in r_polynomials(alg, k)? {
                if let Err(mut m) = alg.check_lemma_b(&y, i)? {
                    m.label = format!("{} with Y = {label}", m.label);
                    return Ok(Err(m));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// The slot-shift conjugation for `i + k <= max_total`.
pub fn check_shift_all<F: Field>(alg: &QuantumMatrixAlgebra<F>, max_total: usize) -> Result<Outcome> {
    let dim = alg.dim();
    for total in 2..=max_total {
        for k in 1..total {
            let i = total - k;
            for (label, y) in r_polynomials(alg, k)? {
                if let Err(mut m) = alg.check_shift(&y, &SparseOp::identity(dim, i))? {
                    m.label = format!("{} with Y = {label}", m.label);
                    return Ok(Err(m));
                }
            }
            for (label, z) in r_polynomials(alg, i)? {
                if let Err(mut m) = alg.check_shift(&SparseOp::identity(dim, k), &z)? {
                    m.label = format!("{} with Z = {label}", m.label);
                    return Ok(Err(m));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// A selectable group of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Preflight,
    Lemma,
    Shift,
    Chn,
    ChnSym,
    Newton,
    Wronski,
    CayleyHamilton,
    InverseChn,
    Commutativity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Preflight,
        CheckKind::Lemma,
        CheckKind::Shift,
        CheckKind::Chn,
        CheckKind::ChnSym,
        CheckKind::Newton,
        CheckKind::Wronski,
        CheckKind::CayleyHamilton,
        CheckKind::InverseChn,
        CheckKind::Commutativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Preflight => "preflight",
            CheckKind::Lemma => "lemma",
            CheckKind::Shift => "shift",
            CheckKind::Chn => "chn",
            CheckKind::ChnSym => "chn-sym",
            CheckKind::Newton => "newton",
            CheckKind::Wronski => "wronski",
            CheckKind::CayleyHamilton => "cayley-hamilton",
            CheckKind::InverseChn => "inverse-chn",
            CheckKind::Commutativity => "commutativity",
        }
    }

    /// Parses a comma-separated list; `all` selects everything. The result
    /// is deduplicated and sorted into execution order.
    pub fn parse_list(s: &str) -> Result<Vec<CheckKind>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok == "all" {
                out.extend(CheckKind::ALL);
                continue;
            }
            out.push(tok.parse()?);
        }
        if out.is_empty() {
            return Err(Error::Input("empty check list".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Fast,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Fast => "fast",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "fast" => Ok(Mode::Fast),
            _ => Err(Error::Input(format!("unknown mode {s:?}"))),
        }
    }
}

/// Where the pair comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum PairSource {
    Family(Family),
    Files { r: PathBuf, f: PathBuf },
    Explicit { label: String, pair: RMatrixPair<QRat> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub source: PairSource,
    pub n: usize,
    /// Highest degree checked; defaults to the height.
    pub kmax: Option<usize>,
    pub checks: Vec<CheckKind>,
    pub mode: Mode,
    pub seed: u64,
    /// Number of sample points in fast mode.
    pub samples: usize,
    /// Pins `q` to a rational; exact rational arithmetic throughout.
    pub q: Option<Rational>,
    /// Record wall-clock times; off by default so reports are reproducible.
    pub timings: bool,
    /// Relations removed before building the ideal, by `(row word, col word)`.
    pub dropped_relations: Vec<([usize; 2], [usize; 2])>,
}

impl SuiteConfig {
    pub fn family(family: Family, n: usize) -> Self {
        Self {
            source: PairSource::Family(family),
            n,
            kmax: None,
            checks: CheckKind::ALL.to_vec(),
            mode: Mode::Exact,
            seed: 0,
            samples: 5,
            q: None,
            timings: false,
            dropped_relations: Vec::new(),
        }
    }

    fn relation_filter(&self) -> RelationFilter {
        RelationFilter {
            drop: self.dropped_relations.clone(),
        }
    }
}

/// One concrete check in the plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckInstance {
    LemmaA { kmax: usize },
    LemmaB { max_total: usize },
    LemmaC { kmax: usize },
    Shift { max_total: usize },
    Chn { k: usize },
    ChnSym { k: usize },
    Newton { k: usize },
    Wronski { k: usize },
    CayleyHamilton,
    InverseChn { k: usize },
    Commutativity { a: (CharKind, usize), b: (CharKind, usize) },
}

impl CheckInstance {
    pub fn name(&self) -> String {
        match self {
            CheckInstance::LemmaA { .. } => "lemma-a".into(),
            CheckInstance::LemmaB { .. } => "lemma-b".into(),
            CheckInstance::LemmaC { .. } => "lemma-c".into(),
            CheckInstance::Shift { .. } => "shift".into(),
            CheckInstance::Chn { k } => format!("chn[k={k}]"),
            CheckInstance::ChnSym { k } => format!("chn-sym[k={k}]"),
            CheckInstance::Newton { k } => format!("newton[k={k}]"),
            CheckInstance::Wronski { k } => format!("wronski[k={k}]"),
            CheckInstance::CayleyHamilton => "cayley-hamilton".into(),
            CheckInstance::InverseChn { k } => format!("inverse-chn[k={k}]"),
            CheckInstance::Commutativity { a, b } => format!("commutativity[{}{},{}{}]", a.0, a.1, b.0, b.1),
        }
    }
}

/// The ordered list of concrete checks for the selected groups.
pub fn plan(checks: &[CheckKind], kmax: usize, height: usize) -> Vec<CheckInstance> {
    let mut out = Vec::new();
    let mut sorted = checks.to_vec();
    sorted.sort();
    sorted.dedup();
    for c in sorted {
        match c {
            CheckKind::Preflight => {}
            CheckKind::Lemma => {
                out.push(CheckInstance::LemmaA { kmax });
                out.push(CheckInstance::LemmaB { max_total: kmax + 1 });
                out.push(CheckInstance::LemmaC { kmax });
            }
            CheckKind::Shift => out.push(CheckInstance::Shift { max_total: kmax + 1 }),
            CheckKind::Chn => out.extend((1..=kmax).map(|k| CheckInstance::Chn { k })),
            CheckKind::ChnSym => out.extend((1..=kmax).map(|k| CheckInstance::ChnSym { k })),
            CheckKind::Newton => out.extend((1..=kmax).map(|k| CheckInstance::Newton { k })),
            CheckKind::Wronski => out.extend((1..=kmax).map(|k| CheckInstance::Wronski { k })),
            CheckKind::CayleyHamilton => out.push(CheckInstance::CayleyHamilton),
            CheckKind::InverseChn => out.extend((1..=kmax.min(height)).map(|k| CheckInstance::InverseChn { k })),
            CheckKind::Commutativity => {
                let bound = kmax.min(height) + 1;
                let kinds = [CharKind::PowerSum, CharKind::Elementary, CharKind::Complete];
                let elems: Vec<(CharKind, usize)> = (1..bound)
                    .flat_map(|k| kinds.into_iter().map(move |c| (c, k)))
                    .collect();
                for (x, a) in elems.iter().enumerate() {
                    for b in &elems[x + 1..] {
                        if a.1 + b.1 <= bound {
                            out.push(CheckInstance::Commutativity { a: *a, b: *b });
                        }
                    }
                }
            }
        }
    }
    out
}

/// An algebra plus the lazily built copy with parameter `-q^{-1}`.
pub struct CheckContext<F: Field> {
    pub alg: QuantumMatrixAlgebra<F>,
    reflected: OnceLock<QuantumMatrixAlgebra<F>>,
}

impl<F: Field> CheckContext<F> {
    pub fn new(alg: QuantumMatrixAlgebra<F>) -> Self {
        Self {
            alg,
            reflected: OnceLock::new(),
        }
    }

    fn reflected(&self) -> Result<&QuantumMatrixAlgebra<F>> {
        if let Some(r) = self.reflected.get() {
            return Ok(r);
        }
        let q = self.alg.pair().q();
        let q_ref = q.inv().ok_or(Error::QNumberZero { k: 0 })?.neg_ref();
        let built = self.alg.with_parameter(q_ref)?;
        Ok(self.reflected.get_or_init(|| built))
    }

    /// Runs one planned check.
    pub fn run(&self, check: &CheckInstance) -> Result<Outcome> {
        let alg = &self.alg;
        match *check {
            CheckInstance::LemmaA { kmax } => alg.check_lemma_a(kmax),
            CheckInstance::LemmaB { max_total } => check_lemma_b_all(alg, max_total),
            CheckInstance::LemmaC { kmax } => alg.check_lemma_c(kmax),
            CheckInstance::Shift { max_total } => check_shift_all(alg, max_total),
            CheckInstance::Chn { k } => check_chn(alg, k),
            CheckInstance::ChnSym { k } => match check_chn_sym(alg, k)? {
                Ok(()) => check_chn_reflect(alg, self.reflected()?, k),
                fail => Ok(fail),
            },
            CheckInstance::Newton { k } => check_newton(alg, k),
            CheckInstance::Wronski { k } => check_wronski(alg, k),
            CheckInstance::CayleyHamilton => check_cayley_hamilton(alg),
            CheckInstance::InverseChn { k } => check_inverse_chn(alg, k),
            CheckInstance::Commutativity { a, b } => check_commutativity(alg, a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub label: String,
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    pub residual: String,
    pub q: Option<String>,
}

impl Witness {
    fn from_mismatch(m: Mismatch, q: Option<String>) -> Self {
        Self {
            label: m.label,
            row: m.row,
            col: m.col,
            residual: m.residual,
            q,
        }
    }

    fn from_error(e: &Error, q: Option<String>) -> Self {
        Self {
            label: format!("error: {e}"),
            row: vec![],
            col: vec![],
            residual: String::new(),
            q,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultMode {
    Exact,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub mode: ResultMode,
    pub status: Status,
    pub witness: Option<Witness>,
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub pair: String,
    pub r_matrix: Option<String>,
    pub f_matrix: Option<String>,
    pub n: usize,
    pub kmax: Option<usize>,
    pub mode: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub q: Option<String>,
    pub checks: Vec<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped_relations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreflightEntry {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreflightEcho {
    pub status: &'static str,
    pub height: Option<usize>,
    pub checks: Vec<PreflightEntry>,
    pub error: Option<String>,
}

impl PreflightEcho {
    fn new(report: &PreflightReport, height: Option<usize>, error: Option<String>) -> Self {
        Self {
            status: if error.is_none() { "pass" } else { "fail" },
            height,
            checks: report
                .checks
                .iter()
                .map(|c| PreflightEntry {
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect(),
            error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Aggregate {
    pub status: &'static str,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub sampled_q: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub preflight: PreflightEcho,
    pub checks: Vec<CheckResult>,
    pub aggregate: Aggregate,
}

impl Report {
    /// `0` all pass, `1` a check failed or errored, `2` the pair was rejected.
    pub fn exit_code(&self) -> i32 {
        match self.aggregate.status {
            "pass" => 0,
            "validation-error" => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn result(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn load_pair(config: &SuiteConfig) -> Result<(String, RMatrixPair<QRat>)> {
    let (label, pair) = match &config.source {
        PairSource::Family(f) => (f.name().to_string(), builtin(*f, config.n)?),
        PairSource::Files { r, f } => {
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
            };
            let rm = read_matrix(&read(r)?)?;
            let fm = read_matrix(&read(f)?)?;
            (Family::Custom.name().to_string(), RMatrixPair::new(rm, fm, QRat::q()))
        }
        PairSource::Explicit { label, pair } => (label.clone(), pair.clone()),
    };
    if pair.r.dim() != config.n || pair.f.dim() != config.n {
        return Err(Error::Input(format!(
            "matrix dimensions R={} F={} do not match n={}",
            pair.r.dim(),
            pair.f.dim(),
            config.n
        )));
    }
    Ok((label, pair))
}

fn pinned_q(config: &SuiteConfig) -> Option<Rational> {
    if let Some(q) = &config.q {
        return Some(q.clone());
    }
    match config.source {
        PairSource::Family(f) => f.required_q(),
        _ => None,
    }
}

fn echo(config: &SuiteConfig, label: String) -> ConfigEcho {
    let (r_matrix, f_matrix) = match &config.source {
        PairSource::Files { r, f } => (Some(r.display().to_string()), Some(f.display().to_string())),
        _ => (None, None),
    };
    ConfigEcho {
        pair: label,
        r_matrix,
        f_matrix,
        n: config.n,
        kmax: config.kmax,
        mode: config.mode.name(),
        seed: config.seed,
        samples: config.samples,
        q: pinned_q(config).map(|x| x.to_string()),
        checks: config.checks.iter().map(|c| c.name()).collect(),
        dropped_relations: config
            .dropped_relations
            .iter()
            .map(|(r, c)| format!("{} {} {} {}", r[0], r[1], c[0], c[1]))
            .collect(),
    }
}

/// Validates `pair`; on success returns the algebra and the preflight echo.
fn build<F: Field>(
    pair: RMatrixPair<F>,
    filter: &RelationFilter,
) -> std::result::Result<(QuantumMatrixAlgebra<F>, PreflightEcho), PreflightEcho> {
    let nmax = pair.dim() + 1;
    match pair.validate(nmax) {
        Ok(v) => {
            let echo = PreflightEcho::new(v.report(), Some(v.height()), None);
            match QuantumMatrixAlgebra::with_filter(v, filter) {
                Ok(alg) => Ok((alg, echo)),
                Err(e) => Err(PreflightEcho {
                    status: "fail",
                    error: Some(e.to_string()),
                    ..echo
                }),
            }
        }
        Err(fail) => Err(PreflightEcho::new(&fail.report, None, Some(fail.error.to_string()))),
    }
}

fn timed<T>(timings: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let start = Instant::now();
    let out = f();
    (out, timings.then(|| start.elapsed().as_millis() as u64))
}

fn exact_result<F: Field>(ctx: &CheckContext<F>, check: &CheckInstance, timings: bool) -> CheckResult {
    let (out, elapsed_ms) = timed(timings, || ctx.run(check));
    let (status, witness) = match out {
        Ok(Ok(())) => (Status::Pass, None),
        Ok(Err(m)) => (Status::Fail, Some(Witness::from_mismatch(m, None))),
        Err(e) => (Status::Error, Some(Witness::from_error(&e, None))),
    };
    CheckResult {
        name: check.name(),
        mode: ResultMode::Exact,
        status,
        witness,
        elapsed_ms,
    }
}

/// Draws `count` distinct integer points in `2..=100` at which the pair
/// specializes and validates. Points are drawn from ChaCha8 seeded with `seed`.
pub fn sample_points(
    pair: &RMatrixPair<QRat>,
    filter: &RelationFilter,
    count: usize,
    seed: u64,
) -> Result<Vec<(Rational, CheckContext<Rational>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        if tried.len() == 99 {
            return Err(Error::Input(format!("only {} admissible sample points in 2..=100", out.len())));
        }
        let x: i64 = rng.gen_range(2..=100);
        if !tried.insert(x) {
            continue;
        }
        let xr = Rational::from_i64(x);
        let Ok(special) = pair.at(&xr) else { continue };
        if let Ok((alg, _)) = build(special, filter) {
            out.push((xr, CheckContext::new(alg)));
        }
    }
    Ok(out)
}

fn fast_result(points: &[(Rational, CheckContext<Rational>)], check: &CheckInstance, timings: bool) -> CheckResult {
    let (out, elapsed_ms) = timed(timings, || {
        for (x, ctx) in points {
            match ctx.run(check) {
                Ok(Ok(())) => {}
                Ok(Err(m)) => return (Status::Fail, Some(Witness::from_mismatch(m, Some(x.to_string())))),
                Err(e) => return (Status::Error, Some(Witness::from_error(&e, Some(x.to_string())))),
            }
        }
        (Status::Pass, None)
    });
    CheckResult {
        name: check.name(),
        mode: ResultMode::Probabilistic,
        status: out.0,
        witness: out.1,
        elapsed_ms,
    }
}

fn aggregate(checks: &[CheckResult], sampled_q: Option<Vec<String>>) -> Aggregate {
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    let (passed, failed, errors) = (count(Status::Pass), count(Status::Fail), count(Status::Error));
    Aggregate {
        status: if failed + errors == 0 { "pass" } else { "fail" },
        total: checks.len(),
        passed,
        failed,
        errors,
        sampled_q,
    }
}

fn rejected(config_echo: ConfigEcho, preflight: PreflightEcho) -> Report {
    Report {
        config: config_echo,
        preflight,
        checks: vec![],
        aggregate: Aggregate {
            status: "validation-error",
            total: 0,
            passed: 0,
            failed: 0,
            errors: 0,
            sampled_q: None,
        },
    }
}

fn run_exact<F: Field>(config: &SuiteConfig, label: String, pair: RMatrixPair<F>) -> Report {
    let config_echo = echo(config, label);
    let (alg, preflight) = match build(pair, &config.relation_filter()) {
        Ok(x) => x,
        Err(pf) => return rejected(config_echo, pf),
    };
    let kmax = config.kmax.unwrap_or(alg.height());
    let ctx = CheckContext::new(alg);
    let checks: Vec<CheckResult> = plan(&config.checks, kmax, ctx.alg.height())
        .iter()
        .map(|c| exact_result(&ctx, c, config.timings))
        .collect();
    let aggregate = aggregate(&checks, None);
    Report {
        config: config_echo,
        preflight,
        checks,
        aggregate,
    }
}

fn run_fast(config: &SuiteConfig, label: String, pair: RMatrixPair<QRat>) -> Result<Report> {
    let config_echo = echo(config, label);
    let filter = config.relation_filter();
    let (alg, preflight) = match build(pair.clone(), &filter) {
        Ok(x) => x,
        Err(pf) => return Ok(rejected(config_echo, pf)),
    };
    let height = alg.height();
    let kmax = config.kmax.unwrap_or(height);
    drop(alg);
    let points = sample_points(&pair, &filter, config.samples.max(1), config.seed)?;
    let checks: Vec<CheckResult> = plan(&config.checks, kmax, height)
        .iter()
        .map(|c| fast_result(&points, c, config.timings))
        .collect();
    let sampled = points.iter().map(|(x, _)| x.to_string()).collect();
    let aggregate = aggregate(&checks, Some(sampled));
    Ok(Report {
        config: config_echo,
        preflight,
        checks,
        aggregate,
    })
}

/// Loads and validates the pair, runs the planned checks in order, and
/// assembles the report. Input problems are errors; a rejected pair yields
/// a report with status `validation-error`.
pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    if config.kmax == Some(0) {
        return Err(Error::Input("kmax must be at least 1".into()));
    }
    if config.n < 2 {
        return Err(Error::Input("n must be at least 2".into()));
    }
    let (label, pair) = load_pair(config)?;
    match (config.mode, pinned_q(config)) {
        (Mode::Fast, Some(_)) => Err(Error::Input("fast mode samples q and cannot be combined with a fixed q".into())),
        (Mode::Fast, None) => run_fast(config, label, pair),
        (Mode::Exact, Some(x)) => {
            let special = pair.at(&x)?;
            Ok(run_exact(config, label, special))
        }
        (Mode::Exact, None) => Ok(run_exact(config, label, pair)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_rational;

    fn ctx(family: Family) -> CheckContext<QRat> {
        let pair = builtin(family, 2).unwrap().validate(3).unwrap();
        CheckContext::new(QuantumMatrixAlgebra::new(pair).unwrap())
    }

    #[test]
    fn degree_one_identities_hold_before_reduction() {
        let c = ctx(Family::ReStandard);
        assert!(chn_difference(&c.alg, 1, false).unwrap().is_zero());
        assert!(chn_difference(&c.alg, 1, true).unwrap().is_zero());
    }

    #[test]
    fn degree_two_identities() {
        for family in [Family::RttStandard, Family::ReStandard] {
            let c = ctx(family);
            for check in [
                CheckInstance::Chn { k: 2 },
                CheckInstance::ChnSym { k: 2 },
                CheckInstance::Newton { k: 2 },
                CheckInstance::Wronski { k: 2 },
                CheckInstance::CayleyHamilton,
                CheckInstance::InverseChn { k: 2 },
            ] {
                assert_eq!(c.run(&check).unwrap(), Ok(()), "{family} {}", check.name());
            }
        }
    }

    #[test]
    fn plan_order_and_names() {
        let p = plan(&CheckKind::ALL, 2, 2);
        let names: Vec<String> = p.iter().map(CheckInstance::name).collect();
        assert_eq!(names[0], "lemma-a");
        assert!(names.contains(&"commutativity[s1,sigma2]".to_string()));
        assert!(!names.iter().any(|n| n == "inverse-chn[k=3]"));
        let p3 = plan(&[CheckKind::Newton, CheckKind::InverseChn], 3, 2);
        assert_eq!(p3.len(), 5);
    }

    #[test]
    fn check_list_parsing() {
        assert_eq!(CheckKind::parse_list("all").unwrap(), CheckKind::ALL.to_vec());
        assert_eq!(
            CheckKind::parse_list("newton, chn,newton").unwrap(),
            vec![CheckKind::Chn, CheckKind::Newton]
        );
        assert!(CheckKind::parse_list("nope").is_err());
        assert!(CheckKind::parse_list("").is_err());
    }

    #[test]
    fn classical_suite_passes() {
        let mut config = SuiteConfig::family(Family::RttClassical, 2);
        config.checks = vec![CheckKind::Chn, CheckKind::Newton, CheckKind::CayleyHamilton];
        let report = run_suite(&config).unwrap();
        assert_eq!(report.config.q.as_deref(), Some("1"));
        assert_eq!(report.exit_code(), 0, "{}", report.to_json());
    }

    #[test]
    fn fast_mode_with_pinned_q_is_rejected() {
        let mut config = SuiteConfig::family(Family::RttStandard, 2);
        config.mode = Mode::Fast;
        config.q = Some(parse_rational("3").unwrap());
        assert!(matches!(run_suite(&config), Err(Error::Input(_))));
    }
}
