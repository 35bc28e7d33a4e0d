//! Set-theoretic solutions `r(x, y) = (f_x(y), g_y(x))` of the Yang–Baxter
//! equation on `{0, …, n−1}`.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::brace::{LeftBrace, TableBrace};
use crate::error::{BraceError, Result};
use crate::report::{Check, Mode, Report, VerifyConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSolution {
    n: usize,
    /// `f[x*n + y] = f_x(y)`.
    f: Vec<u32>,
    /// `g[y*n + x] = g_y(x)`.
    g: Vec<u32>,
    provenance: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub n: usize,
    pub f: Vec<Vec<u32>>,
    pub g: Vec<Vec<u32>>,
    #[serde(default)]
    pub provenance: Value,
}

impl SetSolution {
    pub fn from_tables(n: usize, f: Vec<u32>, g: Vec<u32>, provenance: Value) -> Result<Self> {
        if f.len() != n * n || g.len() != n * n {
            return Err(BraceError::InvalidTable(format!("solution tables need {} entries", n * n)));
        }
        if f.iter().chain(&g).any(|&v| v as usize >= n) {
            return Err(BraceError::InvalidTable("solution entry out of range".into()));
        }
        Ok(Self { n, f, g, provenance })
    }

    pub fn from_file(file: SolutionFile) -> Result<Self> {
        let rows_ok = |rows: &[Vec<u32>]| rows.len() == file.n && rows.iter().all(|r| r.len() == file.n);
        if !rows_ok(&file.f) || !rows_ok(&file.g) {
            return Err(BraceError::InvalidTable(format!("solution tables must be {0}x{0}", file.n)));
        }
        Self::from_tables(file.n, file.f.concat(), file.g.concat(), file.provenance)
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            format: Some(crate::FORMAT.to_string()),
            n: self.n,
            f: self.f.chunks(self.n.max(1)).map(|c| c.to_vec()).collect(),
            g: self.g.chunks(self.n.max(1)).map(|c| c.to_vec()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// `r(x, y) = (y, x)`.
    pub fn flip(n: usize) -> Self {
        let row: Vec<u32> = (0..n as u32).collect();
        let f = row.repeat(n);
        Self { n, f: f.clone(), g: f, provenance: serde_json::json!({ "construction": "flip" }) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn f(&self, x: u32, y: u32) -> u32 {
        self.f[x as usize * self.n + y as usize]
    }

    pub fn g(&self, y: u32, x: u32) -> u32 {
        self.g[y as usize * self.n + x as usize]
    }

    pub fn r(&self, x: u32, y: u32) -> (u32, u32) {
        (self.f(x, y), self.g(y, x))
    }

    pub fn provenance(&self) -> &Value {
        &self.provenance
    }

    pub fn f_row(&self, x: u32) -> &[u32] {
        &self.f[x as usize * self.n..(x as usize + 1) * self.n]
    }

    /// Overwrites one entry of `f`, for building corrupted controls.
    pub fn set_f(&mut self, x: u32, y: u32, value: u32) {
        self.f[x as usize * self.n + y as usize] = value;
    }
}

/// `f_a = λ_a` and `g_b(a) = λ⁻¹_{λ_a(b)}(a)`.
pub fn canonical_solution(t: &TableBrace, cfg: &VerifyConfig) -> Result<SetSolution> {
    let n = t.order();
    if n > cfg.cap {
        return Err(BraceError::CapExceeded { order: n.to_string(), cap: cfg.cap });
    }
    let f = t.table().to_vec();
    let mut g = vec![0u32; n * n];
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            g[b as usize * n + a as usize] = t.lambda_inv_idx(t.lambda_idx(a, b), a);
        }
    }
    let provenance = serde_json::json!({ "construction": "canonical", "brace": t.provenance() });
    Ok(SetSolution { n, f, g, provenance })
}

/// `r₁₂ r₂₃ r₁₂ = r₂₃ r₁₂ r₂₃` on `X³`, exhaustive within the triple budget.
pub fn verify_ybe(sol: &SetSolution, cfg: &VerifyConfig) -> Check {
    let n = sol.n as u64;
    let test = |x: u32, y: u32, z: u32| {
        let r12 = |(a, b, c): (u32, u32, u32)| {
            let (p, q) = sol.r(a, b);
            (p, q, c)
        };
        let r23 = |(a, b, c): (u32, u32, u32)| {
            let (p, q) = sol.r(b, c);
            (a, p, q)
        };
        r12(r23(r12((x, y, z)))) == r23(r12(r23((x, y, z))))
    };
    let witness = |x: u32, y: u32, z: u32| vec![vec![x as u64], vec![y as u64], vec![z as u64]];
    if n.saturating_pow(3) <= cfg.triple_budget {
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                for z in 0..n as u32 {
                    if !test(x, y, z) {
                        return Check::fail("ybe", Mode::Exhaustive, witness(x, y, z));
                    }
                }
            }
        }
        Check::pass("ybe", Mode::Exhaustive)
    } else {
        let mode = Mode::Sampled { samples: cfg.samples, seed: cfg.seed };
        let mut rng = cfg.rng(11);
        for _ in 0..cfg.samples {
            let (x, y, z) = (rng.random_range(0..n) as u32, rng.random_range(0..n) as u32, rng.random_range(0..n) as u32);
            if !test(x, y, z) {
                return Check::fail("ybe", mode, witness(x, y, z));
            }
        }
        Check::pass("ybe", mode)
    }
}

/// `r² = id`.
pub fn verify_involutive(sol: &SetSolution) -> Check {
    for x in 0..sol.n as u32 {
        for y in 0..sol.n as u32 {
            let (p, q) = sol.r(x, y);
            if sol.r(p, q) != (x, y) {
                return Check::fail("involutive", Mode::Exhaustive, vec![vec![x as u64], vec![y as u64]]);
            }
        }
    }
    Check::pass("involutive", Mode::Exhaustive)
}

/// Every `f_x` and every `g_x` is a bijection.
pub fn verify_nondegenerate(sol: &SetSolution) -> Check {
    let n = sol.n;
    let is_perm = |row: &[u32]| {
        let mut seen = vec![false; n];
        row.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    };
    for x in 0..n {
        if !is_perm(&sol.f[x * n..(x + 1) * n]) || !is_perm(&sol.g[x * n..(x + 1) * n]) {
            return Check::fail("nondegenerate", Mode::Exhaustive, vec![vec![x as u64]]);
        }
    }
    Check::pass("nondegenerate", Mode::Exhaustive)
}

pub fn verify_solution(sol: &SetSolution, cfg: &VerifyConfig) -> Report {
    let mut report = Report::new();
    report.push(verify_ybe(sol, cfg));
    report.push(verify_involutive(sol));
    report.push(verify_nondegenerate(sol));
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    /// Number of distinct maps `f_x`.
    pub generators: usize,
}

/// The group generated by the `f_x`, closed breadth-first; fails once more
/// than `limit` permutations have been found.
pub fn permutation_group(sol: &SetSolution, limit: usize) -> Result<GroupSummary> {
    let n = sol.n;
    let mut gens: Vec<Vec<u32>> = Vec::new();
    let mut seen_gens = HashSet::new();
    for x in 0..n as u32 {
        let row = sol.f_row(x).to_vec();
        if seen_gens.insert(row.clone()) {
            gens.push(row);
        }
    }
    let identity: Vec<u32> = (0..n as u32).collect();
    let mut group = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for gen in &gens {
            let q: Vec<u32> = p.iter().map(|&i| gen[i as usize]).collect();
            if group.insert(q.clone()) {
                if group.len() > limit {
                    return Err(BraceError::CapExceeded { order: format!(">{limit}"), cap: limit });
                }
                queue.push_back(q);
            }
        }
    }
    Ok(GroupSummary { order: group.len(), generators: gens.len() })
}
