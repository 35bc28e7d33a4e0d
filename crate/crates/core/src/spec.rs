//! JSON build specifications: one tagged object per construction, nesting
//! for the factors of products.

use std::sync::Arc;

use crate::cycle::{build_cycle_brace_unchecked, CycleSpec};
use crate::hegedus::{build_hegedus, HegedusSpec};
use crate::matched::{
    validate_commuting_actions, validate_iterated, validate_matched_pair, Action, IteratedActionsSpec, IteratedProduct,
    MatchedPairSpec, MatchedProduct,
};
use crate::brace::{AdditiveShape, LeftBrace, SharedBrace, TableBrace, TrivialBrace};
use crate::error::{BraceError, Result};
use crate::report::{Check, Mode, Report, VerifyConfig};
use crate::residue::{Modulus, QuadraticForm, ResidueMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuildSpec {
    Trivial {
        shape: AdditiveShape,
    },
    Table {
        shape: AdditiveShape,
        lambda: Vec<Vec<u32>>,
        #[serde(default)]
        provenance: Value,
    },
    Hegedus {
        p: u64,
        r: u32,
        n: usize,
        #[serde(rename = "Q")]
        q: FormJson,
        /// Identity when omitted.
        #[serde(default)]
        f: Option<Vec<Vec<i64>>>,
        /// Cross-checked against the order of `f` when given.
        #[serde(default)]
        rprime: Option<u32>,
    },
    Matched {
        g: Box<BuildSpec>,
        h: Box<BuildSpec>,
        /// `alpha[b][x]`: rank of `α_b(x)` in `G`, for `b` in `H`.
        #[serde(default)]
        alpha: Option<Vec<Vec<u32>>>,
        /// `beta[a][y]`: rank of `β_a(y)` in `H`, for `a` in `G`.
        #[serde(default)]
        beta: Option<Vec<Vec<u32>>>,
    },
    Iterated {
        factors: Vec<BuildSpec>,
        #[serde(default)]
        actions: Vec<ActionJson>,
    },
    Cycle(CycleSpec),
}

/// Upper-triangular coefficients `U` of `Q(x) = x U xᵗ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub coefficients: Vec<Vec<i64>>,
}

/// `α^{(from,to)}` with 1-based factor indices; `table[a][x]` is the rank
/// of `α_a(x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionJson {
    pub from: usize,
    pub to: usize,
    pub table: Vec<Vec<u32>>,
}

pub struct Built {
    pub brace: SharedBrace,
    /// Validation of the construction's hypotheses.
    pub certificate: Report,
    /// Factors and actions, for products.
    pub actions: Option<IteratedActionsSpec>,
}

impl BuildSpec {
    /// Parses a spec, accepting and checking an optional top-level `format`.
    pub fn from_value(mut value: Value) -> std::result::Result<Self, String> {
        if let Some(obj) = value.as_object_mut() {
            if let Some(format) = obj.remove("format") {
                if format != crate::FORMAT {
                    return Err(format!("unsupported format {format}, expected {:?}", crate::FORMAT));
                }
            }
        }
        serde_json::from_value(value).map_err(|e| e.to_string())
    }
}

fn prefixed(report: Report, prefix: &str) -> Report {
    let mut out = Report::new();
    for mut c in report.checks {
        c.name = format!("{prefix}{}", c.name);
        out.push(c);
    }
    out
}

fn action_from_rows(actor: &AdditiveShape, target: &AdditiveShape, rows: &[Vec<u32>]) -> Result<Action> {
    let nt = target.order().unwrap_or(0);
    if rows.len() != actor.order().unwrap_or(0) || rows.iter().any(|r| r.len() != nt) {
        return Err(BraceError::InvalidTable(format!("action table must be {} x {nt}", actor.order().unwrap_or(0))));
    }
    Action::from_table(actor, target, rows.concat())
}

pub fn build(spec: &BuildSpec, cfg: &VerifyConfig) -> Result<Built> {
    match spec {
        BuildSpec::Trivial { shape } => Ok(Built {
            brace: Arc::new(TrivialBrace::new(shape.clone())),
            certificate: Report::new(),
            actions: None,
        }),
        BuildSpec::Table { shape, lambda, provenance } => {
            let t = TableBrace::from_rows(shape.clone(), lambda.clone(), provenance.clone())?;
            let certificate = t.verify_axioms(cfg);
            Ok(Built { brace: Arc::new(t), certificate, actions: None })
        }
        BuildSpec::Hegedus { p, r, n, q, f, rprime } => {
            let md = Modulus::new(*p, *r)?;
            let check_dim = |rows: &[Vec<i64>]| {
                if rows.len() != *n || rows.iter().any(|row| row.len() != *n) {
                    Err(BraceError::DimensionMismatch { expected: *n, actual: rows.len() })
                } else {
                    Ok(())
                }
            };
            check_dim(&q.coefficients)?;
            let form = QuadraticForm::new(ResidueMatrix::from_rows(md, &q.coefficients)?)?;
            let f = match f {
                Some(rows) => {
                    check_dim(rows)?;
                    ResidueMatrix::from_rows(md, rows)?
                }
                None => ResidueMatrix::identity(md, *n),
            };
            let spec = HegedusSpec::new(form, f)?;
            if let Some(rp) = rprime {
                if *rp != spec.r_prime() {
                    return Err(BraceError::InvalidParameter(format!(
                        "rprime {rp} given but f has order {}^{}",
                        p,
                        spec.r_prime()
                    )));
                }
            }
            Ok(Built { brace: Arc::new(build_hegedus(spec)), certificate: Report::new(), actions: None })
        }
        BuildSpec::Matched { g, h, alpha, beta } => {
            let (g, h) = (build(g, cfg)?, build(h, cfg)?);
            let alpha = match alpha {
                Some(rows) => action_from_rows(h.brace.shape(), g.brace.shape(), rows)?,
                None => Action::identity(),
            };
            let beta = match beta {
                Some(rows) => action_from_rows(g.brace.shape(), h.brace.shape(), rows)?,
                None => Action::identity(),
            };
            let pair = MatchedPairSpec::new(g.brace.clone(), h.brace.clone(), alpha, beta);
            let mut certificate = prefixed(g.certificate, "G: ");
            certificate.extend(prefixed(h.certificate, "H: "));
            certificate.extend(validate_matched_pair(&pair, cfg));
            let actions = IteratedActionsSpec::from_pair(&pair);
            Ok(Built { brace: Arc::new(MatchedProduct::new_unchecked(pair)), certificate, actions: Some(actions) })
        }
        BuildSpec::Iterated { factors, actions } => {
            if factors.len() < 2 {
                return Err(BraceError::InvalidParameter("an iterated product needs at least two factors".into()));
            }
            let mut certificate = Report::new();
            let mut braces = Vec::new();
            for (k, f) in factors.iter().enumerate() {
                let b = build(f, cfg)?;
                certificate.extend(prefixed(b.certificate, &format!("factor {}: ", k + 1)));
                braces.push(b.brace);
            }
            let mut it = IteratedActionsSpec::new(braces);
            for a in actions {
                let n = factors.len();
                if a.from == a.to || !(1..=n).contains(&a.from) || !(1..=n).contains(&a.to) {
                    return Err(BraceError::InvalidParameter(format!("action ({}, {}) out of range", a.from, a.to)));
                }
                let (j, i) = (a.from - 1, a.to - 1);
                let act = action_from_rows(it.braces()[j].shape(), it.braces()[i].shape(), &a.table)?;
                it.set_action(j, i, act);
            }
            certificate.extend(validate_iterated(&it, cfg));
            Ok(Built { brace: Arc::new(IteratedProduct::new_unchecked(it.clone())), certificate, actions: Some(it) })
        }
        BuildSpec::Cycle(spec) => {
            let cb = build_cycle_brace_unchecked(spec)?;
            let mut certificate = validate_commuting_actions(cb.actions(), cfg);
            certificate.push(
                Check::pass("blocks", Mode::Exhaustive).with_detail("matrix identities verified during construction"),
            );
            let actions = cb.actions().clone();
            Ok(Built { brace: Arc::new(cb), certificate, actions: Some(actions) })
        }
    }
}
