//! Finite left braces given by an additive shape and a lambda map.
//!
//! Elements are mixed-radix coordinate vectors. The canonical index of an
//! element is `Σ c_j · Π_{k>j} m_k`, most significant coordinate first;
//! serialized lambda tables depend on this ordering.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{BraceError, Result};
use crate::report::{Check, Mode, Report, VerifyConfig};

pub type Element = Vec<u64>;

/// The additive group `Z/m_1 × ⋯ × Z/m_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AdditiveShape {
    moduli: Vec<u64>,
}

impl TryFrom<Vec<u64>> for AdditiveShape {
    type Error = BraceError;
    fn try_from(moduli: Vec<u64>) -> Result<Self> {
        AdditiveShape::new(moduli)
    }
}

impl From<AdditiveShape> for Vec<u64> {
    fn from(s: AdditiveShape) -> Self {
        s.moduli
    }
}

impl fmt::Display for AdditiveShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.moduli)
    }
}

impl AdditiveShape {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(BraceError::InvalidParameter(format!("cyclic factor of order {m} in additive shape")));
        }
        Ok(Self { moduli })
    }

    pub fn uniform(m: u64, d: usize) -> Result<Self> {
        Self::new(vec![m; d])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    /// The group order, or `None` when it does not fit in `usize`.
    pub fn order(&self) -> Option<usize> {
        self.moduli.iter().try_fold(1usize, |acc, &m| acc.checked_mul(usize::try_from(m).ok()?))
    }

    pub fn order_big(&self) -> BigUint {
        self.moduli.iter().fold(BigUint::from(1u8), |acc, &m| acc * m)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        Self { moduli }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.moduli.len() && x.iter().zip(&self.moduli).all(|(&c, &m)| c < m)
    }

    pub fn check(&self, x: &[u64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(BraceError::ShapeMismatch(format!("{x:?} is not an element of {self}")))
        }
    }

    pub fn zero(&self) -> Element {
        vec![0; self.moduli.len()]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| {
                let s = x + y;
                if s >= m {
                    s - m
                } else {
                    s
                }
            })
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        a.iter().zip(&self.moduli).map(|(&x, &m)| if x == 0 { 0 } else { m - x }).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Element {
        self.add(a, &self.neg(b))
    }

    /// `k·a`.
    pub fn scale(&self, k: u64, a: &[u64]) -> Element {
        a.iter().zip(&self.moduli).map(|(&x, &m)| ((x as u128 * k as u128) % m as u128) as u64).collect()
    }

    /// The standard generators `e_j`.
    pub fn generators(&self) -> Vec<Element> {
        (0..self.dim())
            .map(|j| {
                let mut e = self.zero();
                e[j] = 1;
                e
            })
            .collect()
    }

    pub fn additive_order(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.moduli).fold(1u64, |acc, (&x, &m)| {
            let o = m / num_integer::gcd(x, m);
            num_integer::lcm(acc, o)
        })
    }

    #[inline]
    pub fn rank(&self, a: &[u64]) -> usize {
        a.iter().zip(&self.moduli).fold(0usize, |acc, (&c, &m)| acc * m as usize + c as usize)
    }

    #[inline]
    pub fn unrank(&self, mut idx: usize) -> Element {
        let mut out = vec![0; self.moduli.len()];
        for (c, &m) in out.iter_mut().zip(&self.moduli).rev() {
            *c = (idx % m as usize) as u64;
            idx /= m as usize;
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        self.moduli.iter().map(|&m| rng.random_range(0..m)).collect()
    }

    /// Every element in index order. Only for small shapes.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let n = self.order().expect("shape order fits in usize");
        (0..n).map(move |i| self.unrank(i))
    }
}

/// A finite left brace: `(B,+)` together with `λ: (B,·) → Aut(B,+)`, where
/// `a·b = a + λ_a(b)`.
pub trait LeftBrace: Send + Sync {
    fn shape(&self) -> &AdditiveShape;

    fn lambda(&self, a: &[u64], b: &[u64]) -> Element;

    /// `λ_a⁻¹(b)`. The default walks the cycle of `b` under `λ_a`.
    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        let mut prev = b.to_vec();
        loop {
            let next = self.lambda(a, &prev);
            if next == b {
                return prev;
            }
            prev = next;
        }
    }

    /// Construction name and parameters, recorded in exported files.
    fn provenance(&self) -> Value {
        json!({ "construction": "unspecified" })
    }

    fn zero(&self) -> Element {
        self.shape().zero()
    }

    fn order(&self) -> Option<usize> {
        self.shape().order()
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Element {
        self.shape().add(a, b)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Element {
        self.shape().add(a, &self.lambda(a, b))
    }

    /// The multiplicative inverse `λ_a⁻¹(−a)`.
    fn inv(&self, a: &[u64]) -> Element {
        self.lambda_inv(a, &self.shape().neg(a))
    }

    fn try_mul(&self, a: &[u64], b: &[u64]) -> Result<Element> {
        self.shape().check(a)?;
        self.shape().check(b)?;
        Ok(self.mul(a, b))
    }

    fn try_inv(&self, a: &[u64]) -> Result<Element> {
        self.shape().check(a)?;
        Ok(self.inv(a))
    }
}

impl<T: LeftBrace + ?Sized> LeftBrace for Arc<T> {
    fn shape(&self) -> &AdditiveShape {
        (**self).shape()
    }
    fn lambda(&self, a: &[u64], b: &[u64]) -> Element {
        (**self).lambda(a, b)
    }
    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        (**self).lambda_inv(a, b)
    }
    fn provenance(&self) -> Value {
        (**self).provenance()
    }
}

pub type SharedBrace = Arc<dyn LeftBrace>;

/// The brace with `λ_a = id`, so multiplication is addition.
#[derive(Clone, Debug)]
pub struct TrivialBrace {
    shape: AdditiveShape,
}

impl TrivialBrace {
    pub fn new(shape: AdditiveShape) -> Self {
        Self { shape }
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Ok(Self::new(AdditiveShape::new(vec![m])?))
    }
}

impl LeftBrace for TrivialBrace {
    fn shape(&self) -> &AdditiveShape {
        &self.shape
    }
    fn lambda(&self, _a: &[u64], b: &[u64]) -> Element {
        b.to_vec()
    }
    fn lambda_inv(&self, _a: &[u64], b: &[u64]) -> Element {
        b.to_vec()
    }
    fn provenance(&self) -> Value {
        json!({ "construction": "trivial", "shape": self.shape.moduli })
    }
}

type LambdaFn = dyn Fn(&[u64], &[u64]) -> Element + Send + Sync;

/// A brace whose lambda is an arbitrary stored rule.
#[derive(Clone)]
pub struct FormulaBrace {
    shape: AdditiveShape,
    lambda: Arc<LambdaFn>,
    lambda_inv: Option<Arc<LambdaFn>>,
    provenance: Value,
}

impl fmt::Debug for FormulaBrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormulaBrace").field("shape", &self.shape).field("provenance", &self.provenance).finish()
    }
}

impl FormulaBrace {
    pub fn new(
        shape: AdditiveShape,
        lambda: impl Fn(&[u64], &[u64]) -> Element + Send + Sync + 'static,
        provenance: Value,
    ) -> Self {
        Self { shape, lambda: Arc::new(lambda), lambda_inv: None, provenance }
    }

    pub fn with_inverse(mut self, lambda_inv: impl Fn(&[u64], &[u64]) -> Element + Send + Sync + 'static) -> Self {
        self.lambda_inv = Some(Arc::new(lambda_inv));
        self
    }

    /// Wraps another brace; useful to hide a table behind the rule interface.
    pub fn wrap(inner: SharedBrace) -> Self {
        let shape = inner.shape().clone();
        let provenance = json!({ "construction": "wrapped", "inner": inner.provenance() });
        let fwd = inner.clone();
        Self::new(shape, move |a, b| fwd.lambda(a, b), provenance).with_inverse(move |a, b| inner.lambda_inv(a, b))
    }
}

impl LeftBrace for FormulaBrace {
    fn shape(&self) -> &AdditiveShape {
        &self.shape
    }
    fn lambda(&self, a: &[u64], b: &[u64]) -> Element {
        (self.lambda)(a, b)
    }
    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        match &self.lambda_inv {
            Some(inv) => inv(a, b),
            None => {
                let mut prev = b.to_vec();
                loop {
                    let next = (self.lambda)(a, &prev);
                    if next == b {
                        return prev;
                    }
                    prev = next;
                }
            }
        }
    }
    fn provenance(&self) -> Value {
        self.provenance.clone()
    }
}

/// Precomputed index arithmetic for `(B,+)`.
#[derive(Clone, Debug)]
pub(crate) struct IndexArith {
    shape: AdditiveShape,
    order: usize,
    digits: Vec<u64>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    gens: Vec<u32>,
}

const ADD_TABLE_LIMIT: usize = 2048;

impl IndexArith {
    fn new(shape: &AdditiveShape, order: usize) -> Self {
        let d = shape.dim();
        let mut digits = Vec::with_capacity(order * d);
        for i in 0..order {
            digits.extend(shape.unrank(i));
        }
        let neg = (0..order).map(|i| shape.rank(&shape.neg(&digits[i * d..(i + 1) * d])) as u32).collect();
        let gens = shape.generators().iter().map(|e| shape.rank(e) as u32).collect();
        let mut arith = Self { shape: shape.clone(), order, digits, add: None, neg, gens };
        if order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    table[a * order + b] = arith.add_slow(a as u32, b as u32);
                }
            }
            arith.add = Some(table);
        }
        arith
    }

    #[inline]
    fn coords(&self, i: u32) -> &[u64] {
        let d = self.shape.dim();
        &self.digits[i as usize * d..(i as usize + 1) * d]
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let mut acc = 0usize;
        for ((&x, &y), &m) in self.coords(a).iter().zip(self.coords(b)).zip(self.shape.moduli()) {
            let s = x + y;
            acc = acc * m as usize + if s >= m { s - m } else { s } as usize;
        }
        acc as u32
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        match &self.add {
            Some(t) => t[a as usize * self.order + b as usize],
            None => self.add_slow(a, b),
        }
    }
}

/// A brace stored as an `order × order` lambda index table.
#[derive(Clone, Debug)]
pub struct TableBrace {
    order: usize,
    lambda: Vec<u32>,
    lambda_inv: Vec<u32>,
    arith: IndexArith,
    provenance: Value,
}

/// On-disk form of a [`TableBrace`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableBraceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub shape: AdditiveShape,
    pub lambda: Vec<Vec<u32>>,
    #[serde(default)]
    pub provenance: Value,
}

impl TableBrace {
    /// Builds from a row-major table. Rows must be permutations and row 0 the
    /// identity; the brace axioms are not checked here.
    pub fn from_table(shape: AdditiveShape, lambda: Vec<u32>, provenance: Value) -> Result<Self> {
        let order = shape.order().filter(|&o| o <= u32::MAX as usize).ok_or_else(|| {
            BraceError::InvalidTable(format!("shape {shape} is too large for a table"))
        })?;
        if lambda.len() != order * order {
            return Err(BraceError::InvalidTable(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                lambda.len()
            )));
        }
        let mut lambda_inv = vec![0u32; order * order];
        let mut seen = vec![false; order];
        for a in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            let row = &lambda[a * order..(a + 1) * order];
            for (b, &img) in row.iter().enumerate() {
                if img as usize >= order || seen[img as usize] {
                    return Err(BraceError::InvalidTable(format!("row {a} is not a permutation")));
                }
                seen[img as usize] = true;
                lambda_inv[a * order + img as usize] = b as u32;
            }
        }
        if order > 0 && lambda[..order].iter().enumerate().any(|(b, &img)| img as usize != b) {
            return Err(BraceError::InvalidTable("row 0 is not the identity".into()));
        }
        let arith = IndexArith::new(&shape, order);
        Ok(Self { order, lambda, lambda_inv, arith, provenance })
    }

    pub fn from_rows(shape: AdditiveShape, rows: Vec<Vec<u32>>, provenance: Value) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(BraceError::InvalidTable("lambda table is not square".into()));
        }
        Self::from_table(shape, rows.into_iter().flatten().collect(), provenance)
    }

    pub fn from_file(file: TableBraceFile) -> Result<Self> {
        Self::from_rows(file.shape, file.lambda, file.provenance)
    }

    pub fn to_file(&self) -> TableBraceFile {
        TableBraceFile {
            format: Some(crate::FORMAT.to_string()),
            shape: self.arith.shape.clone(),
            lambda: self.rows(),
            provenance: self.provenance.clone(),
        }
    }

    /// Tabulates any brace within `cfg.cap` and re-verifies the axioms.
    pub fn tabulate(b: &dyn LeftBrace, cfg: &VerifyConfig) -> Result<Self> {
        let table = Self::tabulate_unverified(b, cfg)?;
        let report = table.verify_axioms(cfg);
        if let Some(fail) = report.first_failure() {
            return Err(BraceError::ValidationFailed(format!("{} fails ({:?})", fail.name, fail.witness)));
        }
        Ok(table)
    }

    /// Tabulates without the axiom pass; rows must still be permutations.
    pub fn tabulate_unverified(b: &dyn LeftBrace, cfg: &VerifyConfig) -> Result<Self> {
        let shape = b.shape().clone();
        let order = check_cap(&shape, cfg.cap)?;
        let lambda = raw_table(b, order);
        Self::from_table(shape, lambda, b.provenance())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shape(&self) -> &AdditiveShape {
        &self.arith.shape
    }

    pub fn table(&self) -> &[u32] {
        &self.lambda
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.lambda.chunks(self.order.max(1)).take(self.order).map(<[u32]>::to_vec).collect()
    }

    pub fn row(&self, a: u32) -> &[u32] {
        &self.lambda[a as usize * self.order..(a as usize + 1) * self.order]
    }

    pub fn set_provenance(&mut self, provenance: Value) {
        self.provenance = provenance;
    }

    pub fn element(&self, i: u32) -> Element {
        self.arith.coords(i).to_vec()
    }

    pub fn index(&self, a: &[u64]) -> u32 {
        self.arith.shape.rank(a) as u32
    }

    pub fn elements_of(&self, set: &[u32]) -> Vec<Element> {
        set.iter().map(|&i| self.element(i)).collect()
    }

    /// Indices of the standard generators `e_j`.
    pub fn generator_indices(&self) -> &[u32] {
        &self.arith.gens
    }

    #[inline]
    pub fn lambda_idx(&self, a: u32, b: u32) -> u32 {
        self.lambda[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn lambda_inv_idx(&self, a: u32, b: u32) -> u32 {
        self.lambda_inv[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        self.arith.add(a, b)
    }

    #[inline]
    pub fn neg_idx(&self, a: u32) -> u32 {
        self.arith.neg[a as usize]
    }

    #[inline]
    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    #[inline]
    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.lambda_idx(a, b))
    }

    #[inline]
    pub fn inv_idx(&self, a: u32) -> u32 {
        self.lambda_inv_idx(a, self.neg_idx(a))
    }

    pub fn additive_order_idx(&self, a: u32) -> u64 {
        self.arith.shape.additive_order(self.arith.coords(a))
    }

    /// Exhaustive axiom checks on the table. Additivity and the homomorphism
    /// law are compared on the standard generators, which is exact once each
    /// row is additive. Associativity is exhaustive within the triple budget
    /// and sampled beyond it.
    pub fn verify_axioms(&self, cfg: &VerifyConfig) -> Report {
        let n = self.order as u32;
        let gens = self.arith.gens.clone();
        let mut report = Report::new();

        let zero_row = (0..n).find(|&b| self.lambda_idx(0, b) != b).map(|b| vec![self.element(0), self.element(b)]);
        report.push(Check::from_witness("lambda_zero_identity", Mode::Exhaustive, zero_row));

        let additive = find_first(n, |a| {
            for b in 0..n {
                for &e in &gens {
                    let lhs = self.lambda_idx(a, self.add_idx(b, e));
                    let rhs = self.add_idx(self.lambda_idx(a, b), self.lambda_idx(a, e));
                    if lhs != rhs {
                        return Some(vec![a, b, e]);
                    }
                }
            }
            None
        });
        report.push(Check::from_witness("additive", Mode::Exhaustive, additive.map(|w| self.elements_of(&w))));

        // rows are permutations by construction
        report.push(Check::pass("bijective", Mode::Exhaustive));

        let hom = find_first(n, |a| {
            for b in 0..n {
                let ab = self.mul_idx(a, b);
                for &e in &gens {
                    if self.lambda_idx(ab, e) != self.lambda_idx(a, self.lambda_idx(b, e)) {
                        return Some(vec![a, b, e]);
                    }
                }
            }
            None
        });
        report.push(Check::from_witness("lambda_homomorphism", Mode::Exhaustive, hom.map(|w| self.elements_of(&w))));

        report.push(self.associativity(cfg));

        let inverses = (0..n).find(|&a| {
            let x = self.inv_idx(a);
            self.mul_idx(a, x) != 0 || self.mul_idx(x, a) != 0
        });
        report.push(Check::from_witness(
            "two_sided_inverses",
            Mode::Exhaustive,
            inverses.map(|a| vec![self.element(a), self.element(self.inv_idx(a))]),
        ));
        report
    }

    fn associativity(&self, cfg: &VerifyConfig) -> Check {
        let n = self.order as u64;
        let assoc = |a: u32, b: u32, c: u32| {
            self.mul_idx(self.mul_idx(a, b), c) == self.mul_idx(a, self.mul_idx(b, c))
        };
        if n.saturating_pow(3) <= cfg.triple_budget {
            let w = find_first(n as u32, |a| {
                for b in 0..n as u32 {
                    for c in 0..n as u32 {
                        if !assoc(a, b, c) {
                            return Some(vec![a, b, c]);
                        }
                    }
                }
                None
            });
            Check::from_witness("associative", Mode::Exhaustive, w.map(|w| self.elements_of(&w)))
        } else {
            let mut rng = cfg.rng(STREAM_ASSOC);
            let mut witness = None;
            for _ in 0..cfg.samples {
                let (a, b, c) = (rng.random_range(0..n) as u32, rng.random_range(0..n) as u32, rng.random_range(0..n) as u32);
                if !assoc(a, b, c) {
                    witness = Some(self.elements_of(&[a, b, c]));
                    break;
                }
            }
            Check::from_witness("associative", Mode::Sampled { samples: cfg.samples, seed: cfg.seed }, witness)
        }
    }
}

fn find_first<T>(n: u32, f: impl Fn(u32) -> Option<T>) -> Option<T> {
    (0..n).find_map(f)
}

pub(crate) fn check_cap(shape: &AdditiveShape, cap: usize) -> Result<usize> {
    match shape.order() {
        Some(o) if o <= cap => Ok(o),
        _ => Err(BraceError::CapExceeded { order: shape.order_big().to_string(), cap }),
    }
}

fn raw_table(b: &dyn LeftBrace, order: usize) -> Vec<u32> {
    let shape = b.shape();
    let elems: Vec<Element> = (0..order).map(|i| shape.unrank(i)).collect();
    let mut lambda = Vec::with_capacity(order * order);
    for a in &elems {
        for x in &elems {
            lambda.push(shape.rank(&b.lambda(a, x)) as u32);
        }
    }
    lambda
}

impl LeftBrace for TableBrace {
    fn shape(&self) -> &AdditiveShape {
        &self.arith.shape
    }
    fn lambda(&self, a: &[u64], b: &[u64]) -> Element {
        self.element(self.lambda_idx(self.index(a), self.index(b)))
    }
    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        self.element(self.lambda_inv_idx(self.index(a), self.index(b)))
    }
    fn provenance(&self) -> Value {
        self.provenance.clone()
    }
}

const STREAM_ADDITIVE: u64 = 1;
const STREAM_BIJECTIVE: u64 = 2;
const STREAM_HOM: u64 = 3;
const STREAM_ASSOC: u64 = 4;
const STREAM_INVERSE: u64 = 5;
const STREAM_ZERO: u64 = 6;

/// Checks the brace axioms: exhaustively through a table when the order is
/// within `cfg.cap`, otherwise on `cfg.samples` seeded random tuples.
pub fn verify_brace_axioms(b: &dyn LeftBrace, cfg: &VerifyConfig) -> Report {
    match b.order() {
        Some(order) if order <= cfg.cap => {
            let lambda = raw_table(b, order);
            match TableBrace::from_table(b.shape().clone(), lambda.clone(), Value::Null) {
                Ok(t) => t.verify_axioms(cfg),
                Err(_) => non_bijective_report(b.shape(), &lambda, order),
            }
        }
        _ => verify_sampled(b, cfg),
    }
}

fn non_bijective_report(shape: &AdditiveShape, lambda: &[u32], order: usize) -> Report {
    let mut report = Report::new();
    let zero_ok = (0..order).all(|b| lambda[b] as usize == b);
    report.push(Check::from_witness("lambda_zero_identity", Mode::Exhaustive, (!zero_ok).then(|| vec![shape.zero()])));
    let mut witness = None;
    'rows: for a in 0..order {
        let mut first = vec![usize::MAX; order];
        for b in 0..order {
            let img = lambda[a * order + b] as usize;
            if first[img] != usize::MAX {
                witness = Some(vec![shape.unrank(a), shape.unrank(first[img]), shape.unrank(b)]);
                break 'rows;
            }
            first[img] = b;
        }
    }
    report.push(Check::from_witness("bijective", Mode::Exhaustive, witness));
    report
}

/// Seeded random checks of every axiom; used above the exhaustive cap.
pub fn verify_sampled(b: &dyn LeftBrace, cfg: &VerifyConfig) -> Report {
    let shape = b.shape();
    let mode = Mode::Sampled { samples: cfg.samples, seed: cfg.seed };
    let mut report = Report::new();

    let run = |stream: u64, arity: usize, test: &dyn Fn(&[Element]) -> bool| {
        let mut rng = cfg.rng(stream);
        for _ in 0..cfg.samples {
            let xs: Vec<Element> = (0..arity).map(|_| shape.random(&mut rng)).collect();
            if !test(&xs) {
                return Some(xs);
            }
        }
        None
    };

    let zero = shape.zero();
    report.push(Check::from_witness("lambda_zero_identity", mode.clone(), run(STREAM_ZERO, 1, &|x| b.lambda(&zero, &x[0]) == x[0])));
    report.push(Check::from_witness(
        "additive",
        mode.clone(),
        run(STREAM_ADDITIVE, 3, &|x| b.lambda(&x[0], &shape.add(&x[1], &x[2])) == shape.add(&b.lambda(&x[0], &x[1]), &b.lambda(&x[0], &x[2]))),
    ));
    report.push(Check::from_witness(
        "bijective",
        mode.clone(),
        run(STREAM_BIJECTIVE, 2, &|x| {
            b.lambda(&x[0], &b.lambda_inv(&x[0], &x[1])) == x[1] && b.lambda_inv(&x[0], &b.lambda(&x[0], &x[1])) == x[1]
        }),
    ));
    report.push(Check::from_witness(
        "lambda_homomorphism",
        mode.clone(),
        run(STREAM_HOM, 3, &|x| b.lambda(&b.mul(&x[0], &x[1]), &x[2]) == b.lambda(&x[0], &b.lambda(&x[1], &x[2]))),
    ));
    report.push(Check::from_witness(
        "associative",
        mode.clone(),
        run(STREAM_ASSOC, 3, &|x| b.mul(&b.mul(&x[0], &x[1]), &x[2]) == b.mul(&x[0], &b.mul(&x[1], &x[2]))),
    ));
    report.push(Check::from_witness(
        "two_sided_inverses",
        mode,
        run(STREAM_INVERSE, 1, &|x| {
            let y = b.inv(&x[0]);
            b.mul(&x[0], &y) == zero && b.mul(&y, &x[0]) == zero
        }),
    ));
    report
}
