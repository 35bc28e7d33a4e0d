//! Exhaustive-or-sampled loops over products of element sets.

use crate::brace::{AdditiveShape, Element};
use crate::report::{Check, Mode, VerifyConfig};

/// One factor of the domain a check quantifies over.
#[derive(Clone, Copy)]
pub(crate) enum Domain<'a> {
    /// Every element.
    All(&'a AdditiveShape),
    /// The standard generators; sampled runs draw arbitrary elements instead.
    Gens(&'a AdditiveShape),
}

impl Domain<'_> {
    fn size(&self) -> Option<u64> {
        match self {
            Domain::All(s) => s.order().map(|o| o as u64),
            Domain::Gens(s) => Some(s.dim() as u64),
        }
    }

    fn shape(&self) -> &AdditiveShape {
        match self {
            Domain::All(s) | Domain::Gens(s) => s,
        }
    }

    fn nth(&self, i: u64) -> Element {
        match self {
            Domain::All(s) => s.unrank(i as usize),
            Domain::Gens(s) => {
                let mut e = s.zero();
                e[i as usize] = 1;
                e
            }
        }
    }
}

/// Runs `test` on every tuple when the domain size is within the triple
/// budget, else on `cfg.samples` random tuples drawn from stream `stream`.
pub(crate) fn check_over(
    name: impl Into<String>,
    domains: &[Domain<'_>],
    cfg: &VerifyConfig,
    stream: u64,
    test: impl Fn(&[Element]) -> bool,
) -> Check {
    let total = domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.size()?));
    match total {
        Some(total) if total <= cfg.triple_budget => {
            let sizes: Vec<u64> = domains.iter().map(|d| d.size().expect("sized")).collect();
            if sizes.contains(&0) {
                return Check::pass(name, Mode::Exhaustive);
            }
            let mut idx = vec![0u64; domains.len()];
            let mut tuple: Vec<Element> = domains.iter().map(|d| d.nth(0)).collect();
            loop {
                if !test(&tuple) {
                    return Check::fail(name, Mode::Exhaustive, tuple);
                }
                // odometer, last factor fastest
                let mut k = domains.len();
                loop {
                    if k == 0 {
                        return Check::pass(name, Mode::Exhaustive);
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < sizes[k] {
                        tuple[k] = domains[k].nth(idx[k]);
                        break;
                    }
                    idx[k] = 0;
                    tuple[k] = domains[k].nth(0);
                }
            }
        }
        _ => {
            let mut rng = cfg.rng(stream);
            let mode = Mode::Sampled { samples: cfg.samples, seed: cfg.seed };
            for _ in 0..cfg.samples {
                let tuple: Vec<Element> = domains.iter().map(|d| d.shape().random(&mut rng)).collect();
                if !test(&tuple) {
                    return Check::fail(name, mode, tuple);
                }
            }
            Check::pass(name, mode)
        }
    }
}

/// A stable stream id for a named check.
pub(crate) fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}
