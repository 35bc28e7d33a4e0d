//! Matched products of two braces, iterated matched products of left ideals,
//! Sylow decomposition, and the graph of nontrivial actions.
//!
//! Composition is always "apply the rightmost map first". Iterated products
//! index factors from 0 internally; check names and graph vertices are
//! 1-based.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::brace::{AdditiveShape, Element, LeftBrace, SharedBrace, TableBrace};
use crate::error::{BraceError, Result};
use crate::filters::prime_factors;
use crate::ideals::is_brace_isomorphism;
use crate::report::{Check, Mode, Report, VerifyConfig};
use crate::sweep::{check_over, stream_id, Domain};

type ActFn = dyn Fn(&[u64], &[u64]) -> Element + Send + Sync;

/// A map from a multiplicative group into additive automorphisms of a
/// target brace, evaluated as `(actor, target) ↦ α_actor(target)`.
#[derive(Clone)]
pub struct Action {
    kind: ActionKind,
    label: String,
}

#[derive(Clone)]
enum ActionKind {
    Identity,
    Rule { fwd: Arc<ActFn>, inv: Arc<ActFn> },
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Action({})", self.label)
    }
}

impl Action {
    pub fn identity() -> Self {
        Self { kind: ActionKind::Identity, label: "identity".into() }
    }

    pub fn rule(
        label: impl Into<String>,
        fwd: impl Fn(&[u64], &[u64]) -> Element + Send + Sync + 'static,
        inv: impl Fn(&[u64], &[u64]) -> Element + Send + Sync + 'static,
    ) -> Self {
        Self { kind: ActionKind::Rule { fwd: Arc::new(fwd), inv: Arc::new(inv) }, label: label.into() }
    }

    /// From a table indexed `[actor][target]` by canonical ranks. Each row
    /// must be a permutation.
    pub fn from_table(actor: &AdditiveShape, target: &AdditiveShape, table: Vec<u32>) -> Result<Self> {
        let na = actor.order().ok_or_else(|| BraceError::InvalidTable("actor shape too large".into()))?;
        let nt = target.order().ok_or_else(|| BraceError::InvalidTable("target shape too large".into()))?;
        if table.len() != na * nt {
            return Err(BraceError::InvalidTable(format!("action table needs {} entries, got {}", na * nt, table.len())));
        }
        let mut inv = vec![0u32; na * nt];
        for a in 0..na {
            let mut seen = vec![false; nt];
            for x in 0..nt {
                let y = table[a * nt + x] as usize;
                if y >= nt || seen[y] {
                    return Err(BraceError::InvalidTable(format!("action row {a} is not a permutation")));
                }
                seen[y] = true;
                inv[a * nt + y] = x as u32;
            }
        }
        let table = Arc::new(table);
        let inv = Arc::new(inv);
        let (sa, st) = (actor.clone(), target.clone());
        let (sa2, st2) = (actor.clone(), target.clone());
        Ok(Self::rule(
            "table",
            move |a, x| st.unrank(table[sa.rank(a) * nt + st.rank(x)] as usize),
            move |a, x| st2.unrank(inv[sa2.rank(a) * nt + st2.rank(x)] as usize),
        ))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, ActionKind::Identity)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn apply(&self, actor: &[u64], x: &[u64]) -> Element {
        match &self.kind {
            ActionKind::Identity => x.to_vec(),
            ActionKind::Rule { fwd, .. } => fwd(actor, x),
        }
    }

    #[inline]
    pub fn apply_inv(&self, actor: &[u64], x: &[u64]) -> Element {
        match &self.kind {
            ActionKind::Identity => x.to_vec(),
            ActionKind::Rule { inv, .. } => inv(actor, x),
        }
    }
}

/// Checks that `act` is a homomorphism from `(actor,·)` into `Aut(target,+)`.
fn action_checks(name: &str, actor: &dyn LeftBrace, target: &AdditiveShape, act: &Action, cfg: &VerifyConfig) -> Vec<Check> {
    let names = [format!("{name} additive"), format!("{name} bijective"), format!("{name} homomorphism")];
    if act.is_identity() {
        return names.into_iter().map(|n| Check::pass(n, Mode::Exhaustive)).collect();
    }
    let sa = actor.shape();
    let [n_add, n_bij, n_hom] = names;
    let add = check_over(&n_add, &[Domain::All(sa), Domain::All(target), Domain::Gens(target)], cfg, stream_id(&n_add), |t| {
        act.apply(&t[0], &target.add(&t[1], &t[2])) == target.add(&act.apply(&t[0], &t[1]), &act.apply(&t[0], &t[2]))
    });
    let bij = check_over(&n_bij, &[Domain::All(sa), Domain::All(target)], cfg, stream_id(&n_bij), |t| {
        act.apply_inv(&t[0], &act.apply(&t[0], &t[1])) == t[1] && act.apply(&t[0], &act.apply_inv(&t[0], &t[1])) == t[1]
    });
    let hom = check_over(&n_hom, &[Domain::All(sa), Domain::All(sa), Domain::Gens(target)], cfg, stream_id(&n_hom), |t| {
        act.apply(&actor.mul(&t[0], &t[1]), &t[2]) == act.apply(&t[0], &act.apply(&t[1], &t[2]))
    });
    vec![add, bij, hom]
}

/// Two braces `G`, `H` with `α: (H,·) → Aut(G,+)` and `β: (G,·) → Aut(H,+)`.
#[derive(Clone)]
pub struct MatchedPairSpec {
    pub g: SharedBrace,
    pub h: SharedBrace,
    pub alpha: Action,
    pub beta: Action,
}

impl MatchedPairSpec {
    pub fn new(g: SharedBrace, h: SharedBrace, alpha: Action, beta: Action) -> Self {
        Self { g, h, alpha, beta }
    }

    pub fn direct(g: SharedBrace, h: SharedBrace) -> Self {
        Self::new(g, h, Action::identity(), Action::identity())
    }

    /// `(H, G, β, α)`.
    pub fn swapped(&self) -> Self {
        Self::new(self.h.clone(), self.g.clone(), self.beta.clone(), self.alpha.clone())
    }
}

/// Homomorphism checks for both actions plus the two compatibility laws
///
/// ```text
/// λ_a ∘ α_b = α_{β_a(b)} ∘ λ_{α⁻¹_{β_a(b)}(a)}
/// λ_b ∘ β_a = β_{α_b(a)} ∘ λ_{β⁻¹_{α_b(a)}(b)}
/// ```
///
/// compared on generators, since both sides are additive.
pub fn validate_matched_pair(spec: &MatchedPairSpec, cfg: &VerifyConfig) -> Report {
    let (g, h) = (&spec.g, &spec.h);
    let (sg, sh) = (g.shape(), h.shape());
    let (alpha, beta) = (&spec.alpha, &spec.beta);
    let mut report = Report::new();
    for c in action_checks("alpha", h.as_ref(), sg, alpha, cfg) {
        report.push(c);
    }
    for c in action_checks("beta", g.as_ref(), sh, beta, cfg) {
        report.push(c);
    }
    report.push(check_over("MP1", &[Domain::All(sg), Domain::All(sh), Domain::Gens(sg)], cfg, stream_id("MP1"), |t| {
        let (a, b, e) = (&t[0], &t[1], &t[2]);
        let bb = beta.apply(a, b);
        g.lambda(a, &alpha.apply(b, e)) == alpha.apply(&bb, &g.lambda(&alpha.apply_inv(&bb, a), e))
    }));
    report.push(check_over("MP2", &[Domain::All(sh), Domain::All(sg), Domain::Gens(sh)], cfg, stream_id("MP2"), |t| {
        let (b, a, e) = (&t[0], &t[1], &t[2]);
        let aa = alpha.apply(b, a);
        h.lambda(b, &beta.apply(a, e)) == beta.apply(&aa, &h.lambda(&beta.apply_inv(&aa, b), e))
    }));
    report
}

/// `G ⋈ H` with `λ_(a,b)(a',b') = (α_b λ_{α_b⁻¹(a)}(a'), β_a λ_{β_a⁻¹(b)}(b'))`.
#[derive(Clone)]
pub struct MatchedProduct {
    spec: MatchedPairSpec,
    shape: AdditiveShape,
    split: usize,
}

impl MatchedProduct {
    /// Builds without validating the pair.
    pub fn new_unchecked(spec: MatchedPairSpec) -> Self {
        let shape = spec.g.shape().concat(spec.h.shape());
        let split = spec.g.shape().dim();
        Self { spec, shape, split }
    }

    pub fn spec(&self) -> &MatchedPairSpec {
        &self.spec
    }

    pub fn split_element<'a>(&self, x: &'a [u64]) -> (&'a [u64], &'a [u64]) {
        x.split_at(self.split)
    }
}

/// Validates the pair and builds `G ⋈ H`.
pub fn matched_product(spec: MatchedPairSpec, cfg: &VerifyConfig) -> Result<MatchedProduct> {
    let report = validate_matched_pair(&spec, cfg);
    if let Some(fail) = report.first_failure() {
        return Err(BraceError::ValidationFailed(format!("{} fails at {:?}", fail.name, fail.witness)));
    }
    Ok(MatchedProduct::new_unchecked(spec))
}

impl LeftBrace for MatchedProduct {
    fn shape(&self) -> &AdditiveShape {
        &self.shape
    }

    fn lambda(&self, x: &[u64], y: &[u64]) -> Element {
        let (a, b) = x.split_at(self.split);
        let (a2, b2) = y.split_at(self.split);
        let s = &self.spec;
        let mut out = s.alpha.apply(b, &s.g.lambda(&s.alpha.apply_inv(b, a), a2));
        out.extend(s.beta.apply(a, &s.h.lambda(&s.beta.apply_inv(a, b), b2)));
        out
    }

    fn lambda_inv(&self, x: &[u64], y: &[u64]) -> Element {
        let (a, b) = x.split_at(self.split);
        let (a2, b2) = y.split_at(self.split);
        let s = &self.spec;
        let mut out = s.g.lambda_inv(&s.alpha.apply_inv(b, a), &s.alpha.apply_inv(b, a2));
        out.extend(s.h.lambda_inv(&s.beta.apply_inv(a, b), &s.beta.apply_inv(a, b2)));
        out
    }

    fn provenance(&self) -> Value {
        json!({
            "construction": "matched",
            "left": self.spec.g.provenance(),
            "right": self.spec.h.provenance(),
            "alpha": self.spec.alpha.label(),
            "beta": self.spec.beta.label(),
        })
    }
}

/// Factors `B_1, …, B_n` and actions `α^{(j,i)}: (B_j,·) → Aut(B_i,+)`,
/// identity unless set.
#[derive(Clone)]
pub struct IteratedActionsSpec {
    braces: Vec<SharedBrace>,
    actions: Vec<Vec<Action>>,
}

impl IteratedActionsSpec {
    pub fn new(braces: Vec<SharedBrace>) -> Self {
        let n = braces.len();
        Self { braces, actions: vec![vec![Action::identity(); n]; n] }
    }

    pub fn from_pair(spec: &MatchedPairSpec) -> Self {
        let mut it = Self::new(vec![spec.g.clone(), spec.h.clone()]);
        it.set_action(1, 0, spec.alpha.clone());
        it.set_action(0, 1, spec.beta.clone());
        it
    }

    /// Sets `α^{(from,to)}` (0-based).
    pub fn set_action(&mut self, from: usize, to: usize, action: Action) {
        assert_ne!(from, to, "an action needs two distinct factors");
        self.actions[from][to] = action;
    }

    pub fn with_action(mut self, from: usize, to: usize, action: Action) -> Self {
        self.set_action(from, to, action);
        self
    }

    pub fn action(&self, from: usize, to: usize) -> &Action {
        &self.actions[from][to]
    }

    pub fn braces(&self) -> &[SharedBrace] {
        &self.braces
    }

    pub fn len(&self) -> usize {
        self.braces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.braces.is_empty()
    }

    /// The same data with factors reordered: factor `k` of the result is
    /// factor `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let braces = perm.iter().map(|&k| self.braces[k].clone()).collect();
        let actions = perm.iter().map(|&j| perm.iter().map(|&i| self.actions[j][i].clone()).collect()).collect();
        Self { braces, actions }
    }
}

/// Action checks for every ordered pair plus the laws
///
/// ```text
/// IM1: λ^{(i)}_a ∘ α^{(j,i)}_{(α^{(i,j)}_a)⁻¹(b)} = α^{(j,i)}_b ∘ λ^{(i)}_{(α^{(j,i)}_b)⁻¹(a)}
/// IM2: α^{(k,i)}_c ∘ α^{(j,i)}_{(α^{(k,j)}_c)⁻¹(b)} = α^{(j,i)}_b ∘ α^{(k,i)}_{(α^{(j,k)}_b)⁻¹(c)}
/// ```
pub fn validate_iterated(spec: &IteratedActionsSpec, cfg: &VerifyConfig) -> Report {
    let n = spec.len();
    let b = &spec.braces;
    let mut report = Report::new();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let name = format!("alpha({},{})", j + 1, i + 1);
                for c in action_checks(&name, b[j].as_ref(), b[i].shape(), &spec.actions[j][i], cfg) {
                    report.push(c);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (aji, aij) = (&spec.actions[j][i], &spec.actions[i][j]);
            let name = format!("IM1(i={},j={})", i + 1, j + 1);
            let (si, sj) = (b[i].shape(), b[j].shape());
            report.push(check_over(&name, &[Domain::All(si), Domain::All(sj), Domain::Gens(si)], cfg, stream_id(&name), |t| {
                let (a, bb, e) = (&t[0], &t[1], &t[2]);
                let lhs = b[i].lambda(a, &aji.apply(&aij.apply_inv(a, bb), e));
                let rhs = aji.apply(bb, &b[i].lambda(&aji.apply_inv(bb, a), e));
                lhs == rhs
            }));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || i == k || j == k {
                    continue;
                }
                let a = &spec.actions;
                let name = format!("IM2(i={},j={},k={})", i + 1, j + 1, k + 1);
                let doms = [Domain::All(b[j].shape()), Domain::All(b[k].shape()), Domain::Gens(b[i].shape())];
                report.push(check_over(&name, &doms, cfg, stream_id(&name), |t| {
                    let (bj, ck, e) = (&t[0], &t[1], &t[2]);
                    let lhs = a[k][i].apply(ck, &a[j][i].apply(&a[k][j].apply_inv(ck, bj), e));
                    let rhs = a[j][i].apply(bj, &a[k][i].apply(&a[j][k].apply_inv(bj, ck), e));
                    lhs == rhs
                }));
            }
        }
    }
    report
}

/// The iterated matched product `B_1 ⋈ ⋯ ⋈ B_n` of left ideals.
///
/// With `ã_1 = a_1` and `ã_k = (α^{(k-1,k)}_{ã_{k-1}})⁻¹ ⋯ (α^{(1,k)}_{ã_1})⁻¹(a_k)`,
/// the `i`-th component of `λ_a(b)` is `M_1 ⋯ M_n(b_i)` where
/// `M_k = α^{(k,i)}_{ã_k}` for `k ≠ i` and `M_i = λ^{(i)}_{ã_i}`.
#[derive(Clone)]
pub struct IteratedProduct {
    spec: IteratedActionsSpec,
    shape: AdditiveShape,
    offsets: Vec<usize>,
}

impl IteratedProduct {
    pub fn new_unchecked(spec: IteratedActionsSpec) -> Self {
        let mut shape = AdditiveShape::new(vec![]).expect("empty shape");
        let mut offsets = vec![0];
        for b in &spec.braces {
            shape = shape.concat(b.shape());
            offsets.push(shape.dim());
        }
        Self { spec, shape, offsets }
    }

    pub fn spec(&self) -> &IteratedActionsSpec {
        &self.spec
    }

    pub fn part<'a>(&self, x: &'a [u64], i: usize) -> &'a [u64] {
        &x[self.offsets[i]..self.offsets[i + 1]]
    }

    /// First coordinate of factor `i`.
    pub fn axis_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Embeds `x ∈ B_i` on axis `i`.
    pub fn axis_element(&self, i: usize, x: &[u64]) -> Element {
        let mut out = self.shape.zero();
        out[self.offsets[i]..self.offsets[i + 1]].copy_from_slice(x);
        out
    }

    /// The elements of axis `i` as a set of product ranks.
    pub fn axis_indices(&self, i: usize) -> Vec<u32> {
        let mut out: Vec<u32> =
            self.spec.braces[i].shape().elements().map(|x| self.shape.rank(&self.axis_element(i, &x)) as u32).collect();
        out.sort_unstable();
        out
    }

    fn tilde(&self, a: &[u64]) -> Vec<Element> {
        let n = self.spec.len();
        let mut tilde: Vec<Element> = Vec::with_capacity(n);
        for k in 0..n {
            let mut t = self.part(a, k).to_vec();
            for (j, tj) in tilde.iter().enumerate() {
                t = self.spec.actions[j][k].apply_inv(tj, &t);
            }
            tilde.push(t);
        }
        tilde
    }
}

/// Validates the actions and builds the product.
pub fn iterated_matched_product(spec: IteratedActionsSpec, cfg: &VerifyConfig) -> Result<IteratedProduct> {
    if spec.len() < 2 {
        return Err(BraceError::InvalidParameter("an iterated product needs at least two factors".into()));
    }
    let report = validate_iterated(&spec, cfg);
    if let Some(fail) = report.first_failure() {
        return Err(BraceError::ValidationFailed(format!("{} fails at {:?}", fail.name, fail.witness)));
    }
    Ok(IteratedProduct::new_unchecked(spec))
}

impl LeftBrace for IteratedProduct {
    fn shape(&self) -> &AdditiveShape {
        &self.shape
    }

    fn lambda(&self, a: &[u64], b: &[u64]) -> Element {
        let n = self.spec.len();
        let tilde = self.tilde(a);
        let mut out = Vec::with_capacity(b.len());
        for i in 0..n {
            let mut v = self.part(b, i).to_vec();
            for k in (0..n).rev() {
                v = if k == i {
                    self.spec.braces[i].lambda(&tilde[i], &v)
                } else {
                    self.spec.actions[k][i].apply(&tilde[k], &v)
                };
            }
            out.extend(v);
        }
        out
    }

    fn lambda_inv(&self, a: &[u64], b: &[u64]) -> Element {
        let n = self.spec.len();
        let tilde = self.tilde(a);
        let mut out = Vec::with_capacity(b.len());
        for i in 0..n {
            let mut v = self.part(b, i).to_vec();
            for k in 0..n {
                v = if k == i {
                    self.spec.braces[i].lambda_inv(&tilde[i], &v)
                } else {
                    self.spec.actions[k][i].apply_inv(&tilde[k], &v)
                };
            }
            out.extend(v);
        }
        out
    }

    fn provenance(&self) -> Value {
        let mut actions = Vec::new();
        for (j, row) in self.spec.actions.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                if i != j && !a.is_identity() {
                    actions.push(json!({ "from": j + 1, "to": i + 1, "map": a.label() }));
                }
            }
        }
        json!({
            "construction": "iterated",
            "factors": self.spec.braces.iter().map(|b| b.provenance()).collect::<Vec<_>>(),
            "actions": actions,
        })
    }
}

/// Checks that every `α^{(j,i)}_{a}` is a brace automorphism of `B_i` and
///
/// ```text
/// (i)  α^{(i,j)}_{α^{(k,i)}_{a_k}(a_i)} = α^{(i,j)}_{a_i}      (i ≠ j, i ≠ k)
/// (ii) α^{(j,i)}_{a_j} α^{(k,i)}_{a_k} = α^{(k,i)}_{a_k} α^{(j,i)}_{a_j}   (i, j, k distinct)
/// ```
///
/// which together imply the iterated-product laws.
pub fn validate_commuting_actions(spec: &IteratedActionsSpec, cfg: &VerifyConfig) -> Report {
    let n = spec.len();
    let b = &spec.braces;
    let a = &spec.actions;
    let mut report = Report::new();
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let name = format!("alpha({},{})", j + 1, i + 1);
            for c in action_checks(&name, b[j].as_ref(), b[i].shape(), &a[j][i], cfg) {
                report.push(c);
            }
            let name = format!("alpha({},{}) brace automorphism", j + 1, i + 1);
            let act = &a[j][i];
            if act.is_identity() {
                report.push(Check::pass(name, Mode::Exhaustive));
                continue;
            }
            let doms = [Domain::All(b[j].shape()), Domain::All(b[i].shape()), Domain::Gens(b[i].shape())];
            report.push(check_over(&name, &doms, cfg, stream_id(&name), |t| {
                act.apply(&t[0], &b[i].lambda(&t[1], &t[2])) == b[i].lambda(&act.apply(&t[0], &t[1]), &act.apply(&t[0], &t[2]))
            }));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || i == k {
                    continue;
                }
                let name = format!("invariance(i={},j={},k={})", i + 1, j + 1, k + 1);
                let (aij, aki) = (&a[i][j], &a[k][i]);
                if aij.is_identity() || aki.is_identity() {
                    report.push(Check::pass(name, Mode::Exhaustive));
                    continue;
                }
                let doms = [Domain::All(b[k].shape()), Domain::All(b[i].shape()), Domain::Gens(b[j].shape())];
                report.push(check_over(&name, &doms, cfg, stream_id(&name), |t| {
                    aij.apply(&aki.apply(&t[0], &t[1]), &t[2]) == aij.apply(&t[1], &t[2])
                }));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                if i == j || i == k {
                    continue;
                }
                let name = format!("commuting(i={},j={},k={})", i + 1, j + 1, k + 1);
                let (aji, aki) = (&a[j][i], &a[k][i]);
                if aji.is_identity() || aki.is_identity() {
                    report.push(Check::pass(name, Mode::Exhaustive));
                    continue;
                }
                let doms = [Domain::All(b[j].shape()), Domain::All(b[k].shape()), Domain::Gens(b[i].shape())];
                report.push(check_over(&name, &doms, cfg, stream_id(&name), |t| {
                    aji.apply(&t[0], &aki.apply(&t[1], &t[2])) == aki.apply(&t[1], &aji.apply(&t[0], &t[2]))
                }));
            }
        }
    }
    report
}

/// Builds the iterated product after checking the commuting-action
/// conditions.
pub fn iterated_from_commuting_actions(spec: IteratedActionsSpec, cfg: &VerifyConfig) -> Result<IteratedProduct> {
    if spec.len() < 2 {
        return Err(BraceError::InvalidParameter("an iterated product needs at least two factors".into()));
    }
    let report = validate_commuting_actions(&spec, cfg);
    if let Some(fail) = report.first_failure() {
        return Err(BraceError::ValidationFailed(format!("{} fails at {:?}", fail.name, fail.witness)));
    }
    Ok(IteratedProduct::new_unchecked(spec))
}

/// A Sylow component of a tabulated brace and its embedding.
#[derive(Clone, Debug)]
pub struct SylowComponent {
    pub prime: u64,
    pub brace: TableBrace,
    /// `(coordinate of the parent, scale)`: component coordinate `k` maps to
    /// parent coordinate `slots[k].0` multiplied by `slots[k].1`.
    pub slots: Vec<(usize, u64)>,
}

impl SylowComponent {
    fn embed_into(&self, c: &[u64], parent: &AdditiveShape, acc: &mut [u64]) {
        for (&v, &(j, scale)) in c.iter().zip(&self.slots) {
            let m = parent.moduli()[j];
            acc[j] = (acc[j] + v * scale) % m;
        }
    }

    fn project(&self, x: &[u64]) -> Element {
        self.slots.iter().map(|&(j, scale)| x[j] / scale).collect()
    }
}

pub struct Decomposition {
    pub components: Vec<SylowComponent>,
    /// The rebuilt product as a table (the component itself for one prime).
    pub product: TableBrace,
    /// `η(a_1, …, a_n) = a_1 + ⋯ + a_n` as product rank ↦ parent rank.
    pub eta: Vec<u32>,
    pub eta_check: bool,
    pub validation: Report,
}

fn sylow_slots(shape: &AdditiveShape, p: u64) -> Vec<(usize, u64, u64)> {
    shape
        .moduli()
        .iter()
        .enumerate()
        .filter_map(|(j, &m)| {
            let mut q = 1u64;
            let mut rest = m;
            while rest % p == 0 {
                rest /= p;
                q *= p;
            }
            (q > 1).then_some((j, q, m / q))
        })
        .collect()
}

/// Splits `(B,+)` into Sylow components, rebuilds the iterated matched
/// product from the restricted lambda map, and checks that `η` is a brace
/// isomorphism back onto `B`.
pub fn decompose_and_rebuild(t: &TableBrace, cfg: &VerifyConfig) -> Result<Decomposition> {
    let parent = t.shape().clone();
    let primes: Vec<u64> = prime_factors(t.order() as u64).into_iter().map(|(p, _)| p).collect();
    let mut components = Vec::new();
    for &p in &primes {
        let slots3 = sylow_slots(&parent, p);
        let shape = AdditiveShape::new(slots3.iter().map(|s| s.1).collect())?;
        let slots: Vec<(usize, u64)> = slots3.iter().map(|s| (s.0, s.2)).collect();
        let mut comp = SylowComponent {
            prime: p,
            brace: TableBrace::tabulate_unverified(&crate::brace::TrivialBrace::new(shape.clone()), cfg)?,
            slots,
        };
        let order = shape.order().expect("component within cap");
        let embedded: Vec<u32> = (0..order)
            .map(|i| {
                let mut x = parent.zero();
                comp.embed_into(&shape.unrank(i), &parent, &mut x);
                t.index(&x)
            })
            .collect();
        let mut table = Vec::with_capacity(order * order);
        for &u in &embedded {
            for &v in &embedded {
                table.push(shape.rank(&comp.project(&t.element(t.lambda_idx(u, v)))) as u32);
            }
        }
        comp.brace = TableBrace::from_table(shape, table, json!({ "construction": "sylow", "prime": p }))?;
        components.push(comp);
    }

    let n = components.len();
    let mut validation = Report::new();
    let product = if n == 1 {
        components[0].brace.clone()
    } else {
        let braces: Vec<SharedBrace> = components.iter().map(|c| Arc::new(c.brace.clone()) as SharedBrace).collect();
        let mut spec = IteratedActionsSpec::new(braces);
        for j in 0..n {
            for i in 0..n {
                if i == j {
                    continue;
                }
                let (cj, ci) = (&components[j], &components[i]);
                let (sj, si) = (cj.brace.shape(), ci.brace.shape());
                let mut table = Vec::with_capacity(cj.brace.order() * ci.brace.order());
                for a in sj.elements() {
                    let mut xa = parent.zero();
                    cj.embed_into(&a, &parent, &mut xa);
                    let ia = t.index(&xa);
                    for x in si.elements() {
                        let mut xx = parent.zero();
                        ci.embed_into(&x, &parent, &mut xx);
                        let img = t.element(t.lambda_idx(ia, t.index(&xx)));
                        table.push(si.rank(&ci.project(&img)) as u32);
                    }
                }
                spec.set_action(j, i, Action::from_table(sj, si, table)?);
            }
        }
        validation = validate_iterated(&spec, cfg);
        TableBrace::tabulate_unverified(&IteratedProduct::new_unchecked(spec), cfg)?
    };

    let eta: Vec<u32> = (0..product.order() as u32)
        .map(|idx| {
            let x = product.element(idx);
            let mut acc = parent.zero();
            let mut off = 0;
            for c in &components {
                let d = c.slots.len();
                c.embed_into(&x[off..off + d], &parent, &mut acc);
                off += d;
            }
            t.index(&acc)
        })
        .collect();
    let eta_check = validation.passed() && is_brace_isomorphism(&product, t, &eta);
    Ok(Decomposition { components, product, eta, eta_check, validation })
}

/// Directed graph on factors `1..=vertices` with an edge `(j, i)` whenever
/// `α^{(j,i)}` is nontrivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CycleMode {
    /// Strong connectivity: a closed walk through every vertex.
    #[default]
    WalkCycle,
    /// A directed Hamiltonian cycle.
    StrictCycle,
}

impl ActionGraph {
    fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == v).map(|e| e.1)
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertices + 1];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        (1..=self.vertices).all(|v| self.reachable_from(v)[1..].iter().all(|&x| x))
    }

    /// A directed cycle through every vertex, starting at vertex 1.
    pub fn hamiltonian_cycle(&self) -> Option<Vec<usize>> {
        if self.vertices == 0 {
            return None;
        }
        if self.vertices == 1 {
            return Some(vec![1]);
        }
        let mut path = vec![1];
        let mut used = vec![false; self.vertices + 1];
        used[1] = true;
        self.extend_path(&mut path, &mut used).then_some(path)
    }

    fn extend_path(&self, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let last = *path.last().expect("nonempty");
        if path.len() == self.vertices {
            return self.edges.contains(&(last, 1));
        }
        let next: Vec<usize> = self.successors(last).filter(|&w| !used[w]).collect();
        for w in next {
            used[w] = true;
            path.push(w);
            if self.extend_path(path, used) {
                return true;
            }
            path.pop();
            used[w] = false;
        }
        false
    }

    pub fn has_full_cycle(&self, mode: CycleMode) -> bool {
        match mode {
            CycleMode::WalkCycle => self.is_strongly_connected(),
            CycleMode::StrictCycle => self.hamiltonian_cycle().is_some(),
        }
    }
}

/// Whether `α_a ≠ id` for some actor `a`; exhaustive over actors within the
/// triple budget, otherwise on sampled actors.
pub fn action_is_nontrivial(actor: &AdditiveShape, target: &AdditiveShape, act: &Action, cfg: &VerifyConfig) -> bool {
    if act.is_identity() {
        return false;
    }
    let gens = target.generators();
    let moves = |a: &[u64]| gens.iter().any(|e| act.apply(a, e) != *e);
    match actor.order() {
        Some(o) if (o as u64).saturating_mul(gens.len() as u64) <= cfg.triple_budget => actor.elements().any(|a| moves(&a)),
        _ => {
            let mut rng = cfg.rng(stream_id("nontrivial"));
            (0..cfg.samples).any(|_| moves(&actor.random(&mut rng)))
        }
    }
}

pub fn action_graph(spec: &IteratedActionsSpec, cfg: &VerifyConfig) -> ActionGraph {
    let n = spec.len();
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i != j && action_is_nontrivial(spec.braces[j].shape(), spec.braces[i].shape(), &spec.actions[j][i], cfg) {
                edges.push((j + 1, i + 1));
            }
        }
    }
    ActionGraph { vertices: n, edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GraphVerdict {
    Simple,
    NotSimple { reason: String },
    Inapplicable { reason: String },
}

/// Simplicity from the graph of actions.
///
/// Without a full cycle the union of factors reachable from a vertex that
/// misses some factor is a proper ideal, so the verdict is `NotSimple`
/// regardless of the factors. A full cycle gives `Simple` only when the
/// factor orders are pairwise coprime and every factor is certified simple
/// (`factor_simple[i] == Some(true)`); otherwise the verdict is
/// `Inapplicable`.
pub fn graph_verdict(
    spec: &IteratedActionsSpec,
    factor_simple: &[Option<bool>],
    mode: CycleMode,
    cfg: &VerifyConfig,
) -> GraphVerdict {
    let graph = action_graph(spec, cfg);
    if !graph.is_strongly_connected() {
        return GraphVerdict::NotSimple { reason: "graph of actions has no full cycle".into() };
    }
    let orders: Vec<_> = spec.braces.iter().map(|b| b.shape().order_big()).collect();
    for x in 0..orders.len() {
        for y in x + 1..orders.len() {
            if orders[x].gcd(&orders[y]) != 1u8.into() {
                return GraphVerdict::Inapplicable { reason: format!("factors {} and {} have orders that are not coprime", x + 1, y + 1) };
            }
        }
    }
    if let Some(i) = (0..spec.len()).find(|&i| factor_simple.get(i).copied().flatten() != Some(true)) {
        return GraphVerdict::Inapplicable { reason: format!("factor {} is not certified simple", i + 1) };
    }
    if graph.has_full_cycle(mode) {
        GraphVerdict::Simple
    } else {
        GraphVerdict::NotSimple { reason: "graph of actions has no Hamiltonian cycle".into() }
    }
}

/// Random element helper for tests and sampled callers.
pub fn random_element<R: Rng + ?Sized>(b: &dyn LeftBrace, rng: &mut R) -> Element {
    b.shape().random(rng)
}
