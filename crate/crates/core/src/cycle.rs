//! Cyclic families of braces `H_1 ⋈ ⋯ ⋈ H_s` where `H_{k+1}` acts on `H_k`
//! and `H_1` acts on `H_s`, realised with companion-matrix blocks.
//!
//! Factors are 0-based in the API; JSON specs and check names are 1-based.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::brace::{AdditiveShape, Element, LeftBrace, SharedBrace};
use crate::error::{BraceError, Result};
use crate::hegedus::{HegedusBrace, HegedusSpec};
use crate::matched::{validate_commuting_actions, Action, IteratedActionsSpec, IteratedProduct, MatchedPairSpec};
use crate::report::{Check, Mode, Report, VerifyConfig};
use crate::residue::{
    binomial, block_diag, block_perm_f, companion_d, dot, gram_e, increment, is_prime, Modulus, QuadraticForm,
    ResidueMatrix,
};
use crate::sweep::{check_over, stream_id, Domain};

/// Exhaustive limit for the twisted-form identity over `(Z/2)^n`.
const TWIST_BUDGET: u64 = 1_000_000;

fn one() -> usize {
    1
}

fn is_one(x: &usize) -> bool {
    *x == 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    pub p: u64,
    pub r: u32,
    pub rprime: u32,
    /// Extra copies of the whole block structure (`c_i` and `Q_i` become
    /// orthogonal sums of this many identical pieces).
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSpec {
    pub s: usize,
    pub primes: Vec<PrimeSpec>,
    /// `"c_i"` (1-based) to matrix rows replacing the default `C_i`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, Vec<Vec<i64>>>,
}

impl CycleSpec {
    /// From `(p_i, r_i, r'_i)` triples.
    pub fn new(primes: &[(u64, u32, u32)]) -> Result<Self> {
        let spec = Self {
            s: primes.len(),
            primes: primes.iter().map(|&(p, r, rprime)| PrimeSpec { p, r, rprime, replicas: 1 }).collect(),
            overrides: BTreeMap::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_replicas(mut self, i: usize, replicas: usize) -> Result<Self> {
        self.primes[i].replicas = replicas;
        self.validate()?;
        Ok(self)
    }

    pub fn with_c_override(mut self, i: usize, rows: Vec<Vec<i64>>) -> Self {
        self.overrides.insert(format!("c_{}", i + 1), rows);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BraceError::InvalidParameter(msg));
        if self.s < 2 {
            return bad(format!("s must be at least 2, got {}", self.s));
        }
        if self.primes.len() != self.s {
            return bad(format!("expected {} primes, got {}", self.s, self.primes.len()));
        }
        for (i, ps) in self.primes.iter().enumerate() {
            if !is_prime(ps.p) {
                return Err(BraceError::NotPrime(ps.p));
            }
            if ps.r == 0 || ps.rprime > ps.r {
                return bad(format!("factor {}: need 0 <= r' <= r and r >= 1", i + 1));
            }
            if ps.replicas == 0 {
                return bad(format!("factor {}: replicas must be positive", i + 1));
            }
            if self.primes[..i].iter().any(|q| q.p == ps.p) {
                return bad(format!("prime {} repeated", ps.p));
            }
            if i + 1 < self.s && ps.p == 2 {
                return bad("only the last prime may be 2".into());
            }
            if ps.p == 2 && ps.r != 1 {
                return bad("when the last prime is 2 its exponent must be 1".into());
            }
            Modulus::new(ps.p, ps.r)?;
        }
        for key in self.overrides.keys() {
            let ok = key
                .strip_prefix("c_")
                .and_then(|k| k.parse::<usize>().ok())
                .is_some_and(|k| (1..=self.s).contains(&k));
            if !ok {
                return bad(format!("unknown override {key:?}"));
            }
        }
        Ok(())
    }

    pub fn modulus(&self, i: usize) -> Modulus {
        let ps = &self.primes[i];
        Modulus::new(ps.p, ps.r).expect("validated")
    }

    /// `n_i = p_{i+1}^{r_{i+1}}`, cyclically.
    pub fn n(&self, i: usize) -> usize {
        self.modulus((i + 1) % self.s).m() as usize
    }

    /// Number of companion blocks in `c_i`.
    pub fn block_count(&self, i: usize) -> usize {
        let ps = &self.primes[i];
        ps.p.pow(ps.rprime) as usize * ps.replicas
    }

    /// Dimension of the additive group of `H_i`.
    pub fn dim(&self, i: usize) -> usize {
        self.block_count(i) * (self.n(i) - 1) + 1
    }

    pub fn order(&self) -> BigUint {
        (0..self.s).map(|i| BigUint::from(self.modulus(i).m()).pow(self.dim(i) as u32)).product()
    }
}

/// The matrices behind factor `i`.
#[derive(Clone, Debug)]
pub struct CycleBlocks {
    pub modulus: Modulus,
    pub n: usize,
    pub d: ResidueMatrix,
    pub e: ResidueMatrix,
    pub c: ResidueMatrix,
    pub b: ResidueMatrix,
    pub f: ResidueMatrix,
    pub form: QuadraticForm,
    /// Linear twist with `Q(c x) = Q(x) + v·x`; zero unless the prime is 2.
    pub v: Vec<u64>,
    pub block_dim: usize,
    pub blocks: usize,
}

fn fail(msg: String) -> BraceError {
    BraceError::ValidationFailed(msg)
}

pub fn build_blocks(spec: &CycleSpec, i: usize) -> Result<CycleBlocks> {
    spec.validate()?;
    let md = spec.modulus(i);
    let ps = &spec.primes[i];
    let n = spec.n(i);
    let blocks = spec.block_count(i);
    let block_dim = n - 1;
    let d = companion_d(n, md)?;
    let e = gram_e(n, md)?;
    let b = block_diag(&e, blocks)?;
    let f = block_perm_f(block_dim * ps.replicas, ps.p.pow(ps.rprime) as usize, md)?;
    let default_c = block_diag(&d, blocks)?;
    let tag = i + 1;

    if d.transpose().mul(&e)?.mul(&d)? != e {
        return Err(fail(format!("factor {tag}: D^t E D != E")));
    }
    if f.transpose().mul(&b)?.mul(&f)? != b {
        return Err(fail(format!("factor {tag}: F^t B F != B")));
    }
    if !e.is_invertible() {
        return Err(BraceError::Singular(md.m()));
    }

    let (form, default_v) = if ps.p == 2 {
        let base = QuadraticForm::sum_pairs(n, md)?;
        let mut v = vec![0u64; block_dim];
        v[block_dim - 1] = binomial(block_dim as u64, 2) % 2;
        (base.replicate(blocks)?, v.repeat(blocks))
    } else {
        (QuadraticForm::from_gram(&b)?, vec![0; blocks * block_dim])
    };
    if !form.is_nondegenerate() {
        return Err(BraceError::DegenerateForm);
    }

    let c = match spec.overrides.get(&format!("c_{tag}")) {
        Some(rows) => ResidueMatrix::from_rows(md, rows)?,
        None => default_c,
    };
    if c.dim() != blocks * block_dim {
        return Err(BraceError::DimensionMismatch { expected: blocks * block_dim, actual: c.dim() });
    }
    if !c.is_invertible() {
        return Err(BraceError::Singular(md.m()));
    }
    if c.mul(&f)? != f.mul(&c)? {
        return Err(fail(format!("factor {tag}: c does not commute with f")));
    }
    let ord_c = c.multiplicative_order(n as u64 + 1)?;
    let overridden = spec.overrides.contains_key(&format!("c_{tag}"));
    if (overridden && !(n as u64).is_multiple_of(ord_c)) || (!overridden && ord_c != n as u64) {
        return Err(fail(format!("factor {tag}: c has order {ord_c}, expected n = {n}")));
    }
    let ord_f = f.multiplicative_order(md.m() + 1)?;
    if ord_f != ps.p.pow(ps.rprime) {
        return Err(fail(format!("factor {tag}: f has order {ord_f}")));
    }
    if !form.is_preserved_by(&f) {
        return Err(fail(format!("factor {tag}: f is not orthogonal")));
    }
    let last = i + 1 == spec.s;
    let v = if form.is_preserved_by(&c) {
        vec![0; blocks * block_dim]
    } else if last && form.is_twisted_by(&c, &default_v)? {
        default_v
    } else {
        return Err(fail(format!("factor {tag}: c is not orthogonal for Q")));
    };
    Ok(CycleBlocks { modulus: md, n, d, e, c, b, f, form, v, block_dim, blocks })
}

/// `H_i = H(p_i^{r_i}, dim − 1, Q_i, F_i)`.
pub fn build_h(spec: &CycleSpec, i: usize) -> Result<HegedusBrace> {
    factor_from_blocks(&build_blocks(spec, i)?)
}

fn factor_from_blocks(blocks: &CycleBlocks) -> Result<HegedusBrace> {
    Ok(HegedusBrace::new(HegedusSpec::new(blocks.form.clone(), blocks.f.clone())?))
}

/// `α^{(k+1,k)}` and `α^{(1,s)}`; every other action is the identity.
pub fn build_actions(blocks: &[CycleBlocks], factors: &[Arc<HegedusBrace>]) -> IteratedActionsSpec {
    let s = factors.len();
    let braces: Vec<SharedBrace> = factors.iter().map(|h| h.clone() as SharedBrace).collect();
    let mut spec = IteratedActionsSpec::new(braces);
    for k in 0..s {
        let from = (k + 1) % s;
        let bl = &blocks[k];
        let n = bl.n;
        let dim = bl.c.dim();
        let md = bl.modulus;
        let powers = Arc::new(bl.c.powers(n as u64));
        let actor = factors[from].clone();
        let label = format!("c{}^q{}", k + 1, from + 1);
        let action = if bl.v.iter().all(|&x| x == 0) {
            let (p2, a2) = (powers.clone(), actor.clone());
            Action::rule(
                label,
                move |a, x| {
                    let q = actor.q_of(a) as usize % n;
                    let mut y = powers[q].apply(&x[..dim]);
                    y.push(x[dim]);
                    y
                },
                move |a, x| {
                    let q = a2.q_of(a) as usize % n;
                    let mut y = p2[(n - q) % n].apply(&x[..dim]);
                    y.push(x[dim]);
                    y
                },
            )
        } else {
            // w_q = v·(Id + c + ⋯ + c^{q−1})
            let mut w = Vec::with_capacity(n);
            let mut acc = ResidueMatrix::zero(md, dim);
            for q in 0..n {
                w.push(acc.transpose().apply(&bl.v));
                acc = acc.add(&powers[q]).expect("same shape");
            }
            let w = Arc::new(w);
            let (p2, a2, w2) = (powers.clone(), actor.clone(), w.clone());
            Action::rule(
                label,
                move |a, x| {
                    let q = actor.q_of(a) as usize % n;
                    let mut y = powers[q].apply(&x[..dim]);
                    y.push(md.add(x[dim], dot(&md, &w[q], &x[..dim])));
                    y
                },
                move |a, x| {
                    let q = a2.q_of(a) as usize % n;
                    let mut y = p2[(n - q) % n].apply(&x[..dim]);
                    let back = dot(&md, &w2[q], &y);
                    y.push(md.sub(x[dim], back));
                    y
                },
            )
        };
        spec.set_action(from, k, action);
    }
    spec
}

/// A constructed cyclic brace together with its ingredients.
#[derive(Clone)]
pub struct CycleBrace {
    spec: CycleSpec,
    blocks: Vec<CycleBlocks>,
    factors: Vec<Arc<HegedusBrace>>,
    product: IteratedProduct,
}

/// Builds all blocks, factors and actions, and checks the commuting-action
/// conditions that make the iterated product well defined.
pub fn build_cycle_brace(spec: &CycleSpec, cfg: &VerifyConfig) -> Result<CycleBrace> {
    let cb = build_cycle_brace_unchecked(spec)?;
    let report = validate_commuting_actions(cb.product.spec(), cfg);
    if let Some(f) = report.first_failure() {
        return Err(fail(format!("{} fails at {:?}", f.name, f.witness)));
    }
    Ok(cb)
}

pub fn build_cycle_brace_unchecked(spec: &CycleSpec) -> Result<CycleBrace> {
    spec.validate()?;
    let blocks = (0..spec.s).map(|i| build_blocks(spec, i)).collect::<Result<Vec<_>>>()?;
    let factors = blocks.iter().map(|b| factor_from_blocks(b).map(Arc::new)).collect::<Result<Vec<_>>>()?;
    for (i, h) in factors.iter().enumerate() {
        if h.spec().r_prime() != spec.primes[i].rprime {
            return Err(fail(format!("factor {}: f has r' = {}", i + 1, h.spec().r_prime())));
        }
    }
    let product = IteratedProduct::new_unchecked(build_actions(&blocks, &factors));
    Ok(CycleBrace { spec: spec.clone(), blocks, factors, product })
}

impl CycleBrace {
    pub fn spec(&self) -> &CycleSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &[CycleBlocks] {
        &self.blocks
    }

    pub fn factors(&self) -> &[Arc<HegedusBrace>] {
        &self.factors
    }

    pub fn product(&self) -> &IteratedProduct {
        &self.product
    }

    pub fn actions(&self) -> &IteratedActionsSpec {
        self.product.spec()
    }

    /// The same factors with every action replaced by the identity.
    pub fn direct_product(&self) -> IteratedProduct {
        let braces = self.factors.iter().map(|h| h.clone() as SharedBrace).collect();
        IteratedProduct::new_unchecked(IteratedActionsSpec::new(braces))
    }

    /// `φ_i(x) = q_i(x_i)` on product elements.
    pub fn phi(&self, x: &[u64], i: usize) -> u64 {
        self.factors[i].q_of(self.product.part(x, i))
    }

    pub fn simplicity_criterion(&self) -> bool {
        simplicity_criterion(&self.blocks)
    }
}

impl LeftBrace for CycleBrace {
    fn shape(&self) -> &AdditiveShape {
        self.product.shape()
    }

    fn lambda(&self, a: &[u64], b: &[u64]) -> Element {
        self.product.lambda(a, b)
    }

    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        self.product.lambda_inv(a, b)
    }

    fn provenance(&self) -> Value {
        json!({ "construction": "cycle", "spec": self.spec })
    }
}

/// Whether `det(c_i − Id)` is a unit for every factor.
pub fn simplicity_criterion(blocks: &[CycleBlocks]) -> bool {
    blocks.iter().all(|b| {
        let id = ResidueMatrix::identity(b.modulus, b.c.dim());
        let det = b.c.sub(&id).expect("same shape").det();
        b.modulus.is_unit(det)
    })
}

/// `φ_i(x·y) = φ_i(x) + φ_i(y)` on the product.
pub fn phi_hom_check(cb: &CycleBrace, i: usize, cfg: &VerifyConfig) -> Check {
    let shape = cb.shape();
    let md = cb.blocks[i].modulus;
    let name = format!("phi_hom({})", i + 1);
    check_over(&name, &[Domain::All(shape), Domain::All(shape)], cfg, stream_id(&name), |t| {
        cb.phi(&cb.mul(&t[0], &t[1]), i) == md.add(cb.phi(&t[0], i), cb.phi(&t[1], i))
    })
}

/// `q_i(α^{(j,i)}_a(x)) = q_i(x)` for every nontrivial action.
pub fn q_invariance_checks(cb: &CycleBrace, cfg: &VerifyConfig) -> Report {
    let s = cb.spec.s;
    let mut report = Report::new();
    for i in 0..s {
        for j in 0..s {
            let act = cb.actions().action(j, i);
            if i == j || act.is_identity() {
                continue;
            }
            let name = format!("q_invariant({},{})", j + 1, i + 1);
            let (hj, hi) = (&cb.factors[j], &cb.factors[i]);
            report.push(check_over(&name, &[Domain::All(hj.shape()), Domain::All(hi.shape())], cfg, stream_id(&name), |t| {
                hi.q_of(&act.apply(&t[0], &t[1])) == hi.q_of(&t[1])
            }));
        }
    }
    report
}

/// `Q_s(c_s x) = Q_s(x) + v_s·x`, exhaustively when the space has at most
/// a million vectors and by coefficients otherwise.
pub fn twisted_form_check(blocks: &CycleBlocks, cfg: &VerifyConfig) -> Check {
    let name = "twisted_form";
    let md = blocks.modulus;
    let n = blocks.c.dim();
    let holds = |x: &[u64]| {
        blocks.form.eval_raw(&blocks.c.apply(x)) == md.add(blocks.form.eval_raw(x), dot(&md, &blocks.v, x))
    };
    match md.m().checked_pow(n as u32).filter(|&t| t <= TWIST_BUDGET) {
        Some(total) => {
            let mut x = vec![0u64; n];
            for _ in 0..total {
                if !holds(&x) {
                    return Check::fail(name, Mode::Exhaustive, vec![x]);
                }
                increment(&mut x, md.m());
            }
            Check::pass(name, Mode::Exhaustive)
        }
        None => {
            let ok = blocks.form.is_twisted_by(&blocks.c, &blocks.v).unwrap_or(false);
            let mut rng = cfg.rng(stream_id(name));
            let mode = Mode::Sampled { samples: cfg.samples, seed: cfg.seed };
            for _ in 0..cfg.samples {
                let x: Vec<u64> = (0..n).map(|_| rng.random_range(0..md.m())).collect();
                if !holds(&x) {
                    return Check::fail(name, mode, vec![x]);
                }
            }
            Check::from_witness(name, mode, None).with_detail(if ok { "coefficients agree" } else { "coefficients differ" })
        }
    }
}

/// Every structural check of the construction: the commuting-action
/// conditions, `q`-invariance, the `φ_i` homomorphisms and the twisted form
/// of the last factor.
pub fn structural_checks(cb: &CycleBrace, cfg: &VerifyConfig) -> Report {
    let mut report = validate_commuting_actions(cb.actions(), cfg);
    report.extend(q_invariance_checks(cb, cfg));
    for i in 0..cb.spec.s {
        report.push(phi_hom_check(cb, i, cfg));
    }
    report.push(twisted_form_check(&cb.blocks[cb.spec.s - 1], cfg));
    report
}

/// `Q(D x) = Q(x) + C(n−1, 2)·x_{n−1}² − (n−1)·Σ_{i<n−1} x_i x_{n−1}` over the
/// integers for `Q = Σ_{i<j} x_i x_j`, checked on `{−2, …, 2}^{n−1}`, which
/// contains every `e_i` and `e_i + e_j`.
pub fn companion_form_identity(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let d = n - 1;
    let q = |x: &[i128]| -> i128 {
        let mut acc = 0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                acc += x[i] * x[j];
            }
        }
        acc
    };
    let mut x = vec![-2i128; d];
    loop {
        let last = x[d - 1];
        let dx: Vec<i128> = (0..d).map(|i| if i == 0 { -last } else { x[i - 1] - last }).collect();
        let rest: i128 = x[..d - 1].iter().sum();
        let n1 = (n - 1) as i128;
        let rhs = q(&x) + n1 * (n1 - 1) / 2 * last * last - n1 * rest * last;
        if q(&dx) != rhs {
            return false;
        }
        let mut k = d;
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            x[k] += 1;
            if x[k] <= 2 {
                break;
            }
            x[k] = -2;
        }
    }
}

/// Permutation of the companion blocks of one factor, extended by the
/// identity to the whole product.
#[derive(Clone, Debug)]
pub struct PsiSigma {
    factor: usize,
    offset: usize,
    block_dim: usize,
    /// `powers[k][j]` is the source block of target block `j` under `ψ^k`.
    powers: Vec<Vec<usize>>,
}

impl PsiSigma {
    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn order(&self) -> u64 {
        self.powers.len() as u64
    }

    /// `ψ^k(x)`.
    pub fn apply_power(&self, x: &[u64], k: u64) -> Element {
        let perm = &self.powers[(k % self.order()) as usize];
        let mut out = x.to_vec();
        let bd = self.block_dim;
        for (j, &src) in perm.iter().enumerate() {
            let (to, from) = (self.offset + j * bd, self.offset + src * bd);
            out[to..to + bd].copy_from_slice(&x[from..from + bd]);
        }
        out
    }

    pub fn apply(&self, x: &[u64]) -> Element {
        self.apply_power(x, 1)
    }
}

/// `ψ_σ` on factor `i`: block `j` of `x_i` becomes block `σ(j)` of the input.
///
/// Requires the block permutation to commute with `f_i` and `c_i`, to
/// preserve `Q_i`, and to fix `v_i`; these are the properties the automorphism
/// argument uses.
pub fn psi_sigma(cb: &CycleBrace, i: usize, sigma: &[usize]) -> Result<PsiSigma> {
    let bl = &cb.blocks[i];
    let m = bl.blocks;
    let mut seen = vec![false; m];
    if sigma.len() != m || sigma.iter().any(|&k| k >= m || std::mem::replace(&mut seen[k], true)) {
        return Err(BraceError::Precondition(format!("sigma must be a permutation of the {m} blocks of factor {}", i + 1)));
    }
    let dim = bl.c.dim();
    let mut p = ResidueMatrix::zero(bl.modulus, dim);
    for (j, &src) in sigma.iter().enumerate() {
        for t in 0..bl.block_dim {
            p.set(j * bl.block_dim + t, src * bl.block_dim + t, 1);
        }
    }
    let commutes = |a: &ResidueMatrix| p.mul(a).ok() == a.mul(&p).ok();
    if !commutes(&bl.f) || !commutes(&bl.c) {
        return Err(BraceError::Precondition(format!("block permutation does not commute with f and c of factor {}", i + 1)));
    }
    if !bl.form.is_preserved_by(&p) {
        return Err(BraceError::Precondition("block permutation does not preserve Q".into()));
    }
    if p.transpose().apply(&bl.v) != bl.v {
        return Err(BraceError::Precondition("block permutation moves v".into()));
    }
    let mut powers = vec![(0..m).collect::<Vec<usize>>()];
    loop {
        let last = powers.last().expect("nonempty");
        let next: Vec<usize> = last.iter().map(|&k| sigma[k]).collect();
        if next.iter().enumerate().all(|(j, &k)| j == k) {
            break;
        }
        powers.push(next);
    }
    Ok(PsiSigma { factor: i, offset: cb.product.axis_offset(i), block_dim: bl.block_dim, powers })
}

/// `ψ(λ_x(e)) = λ_{ψ(x)}(ψ(e))`; with `ψ` additive this makes it a brace
/// automorphism.
pub fn verify_psi(cb: &CycleBrace, psi: &PsiSigma, cfg: &VerifyConfig) -> Check {
    let shape = cb.shape();
    let name = format!("psi_automorphism({})", psi.factor + 1);
    check_over(&name, &[Domain::All(shape), Domain::Gens(shape)], cfg, stream_id(&name), |t| {
        psi.apply(&cb.lambda(&t[0], &t[1])) == cb.lambda(&psi.apply(&t[0]), &psi.apply(&t[1]))
    })
}

/// `ψ` on one cyclic brace, raised to `q_driver` of a factor of the other.
#[derive(Clone, Debug)]
pub struct PsiLink {
    pub psi: PsiSigma,
    /// Factor of the acting brace whose `q` is the exponent.
    pub driver: usize,
}

/// The matched pair `(A, B, α, β)` with `α_y = ψ_A^{φ(y)}` and
/// `β_x = ψ_B^{φ(x)}`.
pub fn matched_of_two(a: Arc<CycleBrace>, b: Arc<CycleBrace>, alpha: PsiLink, beta: PsiLink) -> Result<MatchedPairSpec> {
    let exponent_ok = |psi: &PsiSigma, driver: &CycleBrace, k: usize| {
        k < driver.spec.s && driver.blocks[k].modulus.m().is_multiple_of(psi.order())
    };
    if !exponent_ok(&alpha.psi, &b, alpha.driver) || !exponent_ok(&beta.psi, &a, beta.driver) {
        return Err(BraceError::Precondition("the order of psi must divide the modulus of its driving factor".into()));
    }
    let act = |psi: PsiSigma, driver: Arc<CycleBrace>, k: usize, label: String| {
        let (psi2, driver2) = (psi.clone(), driver.clone());
        Action::rule(
            label,
            move |y, x| psi.apply_power(x, driver.phi(y, k)),
            move |y, x| {
                let o = psi2.order();
                psi2.apply_power(x, o - driver2.phi(y, k) % o)
            },
        )
    };
    let label_a = format!("psi{}^q{}", alpha.psi.factor + 1, alpha.driver + 1);
    let label_b = format!("psi{}^q{}", beta.psi.factor + 1, beta.driver + 1);
    let alpha_act = act(alpha.psi, b.clone(), alpha.driver, label_a);
    let beta_act = act(beta.psi, a.clone(), beta.driver, label_b);
    Ok(MatchedPairSpec::new(a as SharedBrace, b as SharedBrace, alpha_act, beta_act))
}

/// A cyclic permutation `j ↦ j+1 mod m` of `m` blocks.
pub fn cyclic_sigma(m: usize) -> Vec<usize> {
    (0..m).map(|j| (j + 1) % m).collect()
}
