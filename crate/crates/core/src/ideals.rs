//! Socle, ideals, left ideals and simplicity on tabulated braces.
//!
//! Sets of elements are sorted vectors of canonical indices.

use serde::{Deserialize, Serialize};

use crate::brace::TableBrace;
use crate::report::{Check, Mode, VerifyConfig};

/// `{a : λ_a = id}`.
pub fn socle(t: &TableBrace) -> Vec<u32> {
    (0..t.order() as u32).filter(|&a| t.row(a).iter().enumerate().all(|(i, &x)| x as usize == i)).collect()
}

/// Size of the image of `λ`, i.e. the number of distinct lambda rows.
pub fn lambda_image_size(t: &TableBrace) -> usize {
    let mut rows: Vec<&[u32]> = (0..t.order() as u32).map(|a| t.row(a)).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.len()
}

struct Closure<'a> {
    t: &'a TableBrace,
    member: Vec<bool>,
    members: Vec<u32>,
    queue: Vec<u32>,
}

impl<'a> Closure<'a> {
    fn new(t: &'a TableBrace) -> Self {
        let mut member = vec![false; t.order()];
        if !member.is_empty() {
            member[0] = true;
        }
        Self { t, member, members: vec![0], queue: Vec::new() }
    }

    /// Replaces the current additive subgroup `H` by `H + <x>`.
    fn insert(&mut self, x: u32) {
        if self.member[x as usize] {
            return;
        }
        let base = self.members.clone();
        let mut k = x;
        while !self.member[k as usize] {
            for &h in &base {
                let y = self.t.add_idx(h, k);
                if !self.member[y as usize] {
                    self.member[y as usize] = true;
                    self.members.push(y);
                    self.queue.push(y);
                }
            }
            k = self.t.add_idx(k, x);
        }
    }

    /// Runs to completion, or stops early once an element of `stop` is
    /// absorbed; returns whether it stopped early.
    fn run(&mut self, stop: &[bool]) -> bool {
        let n = self.t.order() as u32;
        let mut next = 0;
        while next < self.queue.len() {
            let x = self.queue[next];
            next += 1;
            if stop[x as usize] {
                return true;
            }
            for g in 0..n {
                self.insert(self.t.lambda_idx(g, x));
            }
            for c in 0..n {
                self.insert(self.t.sub_idx(self.t.lambda_idx(x, c), c));
            }
        }
        self.members.iter().any(|&m| stop[m as usize])
    }

    fn into_sorted(mut self) -> Vec<u32> {
        self.members.sort_unstable();
        self.members
    }
}

/// The least ideal containing `seeds`.
///
/// Grows an additive subgroup closed under every `λ_g` and under
/// `x ↦ λ_x(c) − c`; such a subgroup is exactly an ideal, so the result is
/// also closed under products, inverses and conjugation.
pub fn ideal_closure(t: &TableBrace, seeds: &[u32]) -> Vec<u32> {
    let mut cl = Closure::new(t);
    for &s in seeds {
        cl.insert(s);
    }
    cl.run(&vec![false; t.order()]);
    cl.into_sorted()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityCertificate {
    pub simple: bool,
    /// A proper nonzero ideal when the brace is not simple.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ideal: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

/// Decides simplicity by closing every nonzero element.
///
/// Elements whose closure was already all of `B` are remembered; a later
/// closure that absorbs one of them is all of `B` too.
pub fn is_simple(t: &TableBrace) -> SimplicityCertificate {
    let n = t.order();
    if n <= 1 {
        return SimplicityCertificate { simple: false, ideal: None, reason: Some("zero brace".into()) };
    }
    let mut generates = vec![false; n];
    for a in 1..n as u32 {
        if generates[a as usize] {
            continue;
        }
        let mut cl = Closure::new(t);
        cl.insert(a);
        let full = cl.run(&generates) || cl.members.len() == n;
        if full {
            generates[a as usize] = true;
        } else {
            return SimplicityCertificate { simple: false, ideal: Some(cl.into_sorted()), reason: None };
        }
    }
    SimplicityCertificate { simple: true, ideal: None, reason: None }
}

fn as_mask(t: &TableBrace, set: &[u32]) -> Option<Vec<bool>> {
    let mut mask = vec![false; t.order()];
    for &s in set {
        *mask.get_mut(s as usize)? = true;
    }
    Some(mask)
}

/// A multiplicative subgroup invariant under every `λ_g`.
pub fn is_left_ideal(t: &TableBrace, set: &[u32]) -> bool {
    let Some(mask) = as_mask(t, set) else { return false };
    if !mask.first().copied().unwrap_or(false) {
        return false;
    }
    let n = t.order() as u32;
    let closed_mul = set.iter().all(|&a| set.iter().all(|&b| mask[t.mul_idx(a, b) as usize]));
    let closed_inv = set.iter().all(|&a| mask[t.inv_idx(a) as usize]);
    let invariant = set.iter().all(|&a| (0..n).all(|g| mask[t.lambda_idx(g, a) as usize]));
    closed_mul && closed_inv && invariant
}

/// A left ideal that is normal in `(B,·)`.
pub fn is_ideal(t: &TableBrace, set: &[u32]) -> bool {
    if !is_left_ideal(t, set) {
        return false;
    }
    let mask = as_mask(t, set).expect("checked above");
    let n = t.order() as u32;
    set.iter().all(|&a| (0..n).all(|g| mask[t.mul_idx(t.mul_idx(t.inv_idx(g), a), g) as usize]))
}

/// For each prime `p` dividing the order, the elements of `p`-power additive
/// order.
pub fn sylow_left_ideals(t: &TableBrace) -> Vec<(u64, Vec<u32>)> {
    crate::filters::prime_factors(t.order() as u64)
        .into_iter()
        .map(|(p, _)| {
            let set = (0..t.order() as u32).filter(|&a| is_power_of(t.additive_order_idx(a), p)).collect();
            (p, set)
        })
        .collect()
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// Whether `map` (indexed by elements of `b1`) is a brace isomorphism onto `b2`.
///
/// Additivity and `λ`-compatibility are compared on generators, which is
/// exact for maps between finite abelian groups once bijectivity holds.
pub fn is_brace_isomorphism(b1: &TableBrace, b2: &TableBrace, map: &[u32]) -> bool {
    let n = b1.order();
    if n != b2.order() || map.len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &y in map {
        if y as usize >= n || hit[y as usize] {
            return false;
        }
        hit[y as usize] = true;
    }
    let m = |x: u32| map[x as usize];
    let gens = b1.generator_indices();
    let additive = (0..n as u32).all(|a| gens.iter().all(|&e| m(b1.add_idx(a, e)) == b2.add_idx(m(a), m(e))));
    if !additive {
        return false;
    }
    (0..n as u32).all(|a| gens.iter().all(|&e| m(b1.lambda_idx(a, e)) == b2.lambda_idx(m(a), m(e))))
}

/// Whether `(a+b)·c + c = a·c + b·c` for all triples.
pub fn is_two_sided(t: &TableBrace, cfg: &VerifyConfig) -> Check {
    let n = t.order() as u64;
    let test = |a: u32, b: u32, c: u32| {
        t.add_idx(t.mul_idx(t.add_idx(a, b), c), c) == t.add_idx(t.mul_idx(a, c), t.mul_idx(b, c))
    };
    if n.saturating_pow(3) <= cfg.triple_budget {
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                for c in 0..n as u32 {
                    if !test(a, b, c) {
                        return Check::fail("two_sided", Mode::Exhaustive, t.elements_of(&[a, b, c]));
                    }
                }
            }
        }
        Check::pass("two_sided", Mode::Exhaustive)
    } else {
        use rand::Rng;
        let mut rng = cfg.rng(7);
        for _ in 0..cfg.samples {
            let (a, b, c) = (rng.random_range(0..n) as u32, rng.random_range(0..n) as u32, rng.random_range(0..n) as u32);
            if !test(a, b, c) {
                return Check::fail("two_sided", Mode::Sampled { samples: cfg.samples, seed: cfg.seed }, t.elements_of(&[a, b, c]));
            }
        }
        Check::pass("two_sided", Mode::Sampled { samples: cfg.samples, seed: cfg.seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brace::{AdditiveShape, TrivialBrace};

    fn trivial(m: &[u64]) -> TableBrace {
        TableBrace::tabulate(&TrivialBrace::new(AdditiveShape::new(m.to_vec()).unwrap()), &VerifyConfig::default()).unwrap()
    }

    #[test]
    fn trivial_socle_is_everything() {
        let t = trivial(&[2, 3]);
        assert_eq!(socle(&t).len(), 6);
        assert!(is_ideal(&t, &socle(&t)));
    }

    #[test]
    fn closure_of_nothing_is_zero() {
        assert_eq!(ideal_closure(&trivial(&[5]), &[]), vec![0]);
    }

    #[test]
    fn prime_trivial_braces_are_simple() {
        for p in [2u64, 3, 5, 7] {
            let t = trivial(&[p]);
            assert!(is_simple(&t).simple);
            for a in 1..p as u32 {
                assert_eq!(ideal_closure(&t, &[a]).len(), p as usize);
            }
        }
    }

    #[test]
    fn z4_is_not_simple() {
        let cert = is_simple(&trivial(&[4]));
        assert!(!cert.simple);
        assert_eq!(cert.ideal, Some(vec![0, 2]));
    }

    #[test]
    fn zero_brace_is_not_simple() {
        let t = TableBrace::from_rows(AdditiveShape::new(vec![]).unwrap(), vec![vec![0]], serde_json::Value::Null).unwrap();
        assert!(!is_simple(&t).simple);
    }

    #[test]
    fn trivial_product_sylows() {
        let t = trivial(&[2, 3]);
        let sylow = sylow_left_ideals(&t);
        assert_eq!(sylow.len(), 2);
        assert_eq!(t.elements_of(&sylow[0].1), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(t.elements_of(&sylow[1].1), vec![vec![0, 0], vec![0, 1], vec![0, 2]]);
        for (_, s) in &sylow {
            assert!(is_left_ideal(&t, s));
        }
    }

    #[test]
    fn whole_and_zero_are_ideals() {
        let t = trivial(&[4, 2]);
        let all: Vec<u32> = (0..8).collect();
        assert!(is_left_ideal(&t, &all) && is_ideal(&t, &all));
        assert!(is_left_ideal(&t, &[0]) && is_ideal(&t, &[0]));
        assert!(!is_left_ideal(&t, &[1]));
        assert!(is_left_ideal(&t, &[0, 1]));
        assert!(!is_left_ideal(&t, &[0, 2]));
    }

    #[test]
    fn identity_is_isomorphism() {
        let t = trivial(&[2, 2]);
        assert!(is_brace_isomorphism(&t, &t, &[0, 1, 2, 3]));
        assert!(is_brace_isomorphism(&t, &t, &[0, 2, 1, 3]));
        assert!(!is_brace_isomorphism(&t, &t, &[0, 1, 1, 3]));
        assert!(!is_brace_isomorphism(&t, &t, &[1, 0, 2, 3]));
        assert!(is_two_sided(&t, &VerifyConfig::default()).passed);
    }
}
