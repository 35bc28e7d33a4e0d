//! Exact vectors, square matrices and quadratic forms over `Z/(p^r)`.
//!
//! Vectors act as columns: a matrix `M` sends `x` to `M·x`. A quadratic form
//! is stored as an upper-triangular coefficient matrix `U` with
//! `Q(x) = Σ_{i≤j} U[i][j]·x_i·x_j`; its bilinear form has matrix `U + Uᵗ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{BraceError, Result};

/// Largest supported `p^r`; keeps every product of two residues inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Binomial coefficient over `u64` (small arguments only).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The ring `Z/(p^r)` with `p` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawModulus", into = "RawModulus")]
pub struct Modulus {
    p: u64,
    r: u32,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct RawModulus {
    p: u64,
    r: u32,
}

impl TryFrom<RawModulus> for Modulus {
    type Error = BraceError;
    fn try_from(raw: RawModulus) -> Result<Self> {
        Modulus::new(raw.p, raw.r)
    }
}

impl From<Modulus> for RawModulus {
    fn from(m: Modulus) -> Self {
        RawModulus { p: m.p, r: m.r }
    }
}

impl Modulus {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(BraceError::NotPrime(p));
        }
        if r == 0 {
            return Err(BraceError::InvalidParameter("exponent r must be at least 1".into()));
        }
        let m = p
            .checked_pow(r)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| BraceError::InvalidParameter(format!("{p}^{r} is too large")))?;
        Ok(Self { p, r, m })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.m
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let e = i128::from(a as i64).extended_gcd(&i128::from(self.m as i64));
        Some(self.reduce(e.x))
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 1 {
            write!(f, "Z/{}", self.p)
        } else {
            write!(f, "Z/({}^{})", self.p, self.r)
        }
    }
}

fn check_same(a: &Modulus, b: &Modulus) -> Result<()> {
    if a != b {
        return Err(BraceError::ModulusMismatch { left: a.m, right: b.m });
    }
    Ok(())
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(BraceError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// A vector of residues, every coordinate reduced into `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueVector {
    modulus: Modulus,
    coords: Vec<u64>,
}

impl ResidueVector {
    pub fn new(modulus: Modulus, coords: impl IntoIterator<Item = i64>) -> Self {
        let coords = coords.into_iter().map(|c| modulus.reduce(c as i128)).collect();
        Self { modulus, coords }
    }

    pub fn from_residues(modulus: Modulus, coords: Vec<u64>) -> Self {
        let coords = coords.into_iter().map(|c| c % modulus.m).collect();
        Self { modulus, coords }
    }

    pub fn zero(modulus: Modulus, n: usize) -> Self {
        Self { modulus, coords: vec![0; n] }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.coords
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(&self.modulus, &other.modulus)?;
        check_dim(self.dim(), other.dim())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| self.modulus.add(a, b)).collect();
        Ok(Self { modulus: self.modulus, coords })
    }

    pub fn dot(&self, other: &Self) -> Result<u64> {
        check_same(&self.modulus, &other.modulus)?;
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.modulus, &self.coords, &other.coords))
    }
}

#[inline]
pub(crate) fn dot(modulus: &Modulus, a: &[u64], b: &[u64]) -> u64 {
    let mut acc: u128 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc += (x as u128) * (y as u128);
    }
    (acc % modulus.m as u128) as u64
}

/// A square matrix over `Z/(p^r)`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    modulus: Modulus,
    n: usize,
    entries: Vec<u64>,
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueMatrix[{}]{:?}", self.modulus, self.to_rows())
    }
}

impl ResidueMatrix {
    pub fn from_rows<R: AsRef<[i64]>>(modulus: Modulus, rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            check_dim(n, row.len())?;
            entries.extend(row.iter().map(|&c| modulus.reduce(c as i128)));
        }
        Ok(Self { modulus, n, entries })
    }

    /// Builds from rows of residues; entries must already lie in `[0, m)`.
    pub fn from_residue_rows(modulus: Modulus, rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            for &c in row {
                if c >= modulus.m {
                    return Err(BraceError::InvalidParameter(format!("entry {c} is not reduced mod {}", modulus.m)));
                }
                entries.push(c);
            }
        }
        Ok(Self { modulus, n, entries })
    }

    pub fn identity(modulus: Modulus, n: usize) -> Self {
        let mut m = Self::zero(modulus, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % modulus.m;
        }
        m
    }

    pub fn zero(modulus: Modulus, n: usize) -> Self {
        Self { modulus, n, entries: vec![0; n * n] }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.entries[i * self.n + j] = self.modulus.reduce(value as i128);
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(<[u64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u64::from(i == j) % self.modulus.m))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zero(self.modulus, n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| self.modulus.add(a, b)).collect();
        Ok(Self { modulus: self.modulus, n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| self.modulus.sub(a, b)).collect();
        Ok(Self { modulus: self.modulus, n: self.n, entries })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        check_same(&self.modulus, &other.modulus)?;
        check_dim(self.n, other.n)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut out = Self::zero(self.modulus, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += (self.entries[i * n + k] as u128) * (other.entries[k * n + j] as u128);
                }
                out.entries[i * n + j] = (acc % self.modulus.m as u128) as u64;
            }
        }
        Ok(out)
    }

    /// `M·x` for a column vector given as raw residues.
    #[inline]
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.n);
        self.entries.chunks(self.n.max(1)).take(self.n).map(|row| dot(&self.modulus, row, x)).collect()
    }

    pub fn apply_vector(&self, x: &ResidueVector) -> Result<ResidueVector> {
        check_same(&self.modulus, &x.modulus)?;
        check_dim(self.n, x.dim())?;
        Ok(ResidueVector { modulus: self.modulus, coords: self.apply(&x.coords) })
    }

    /// `Mᵉ` by square-and-multiply; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut result = Self::identity(self.modulus, self.n);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(result)
    }

    /// Gauss–Jordan inverse using unit pivots only, scanning rows top-down.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let md = self.modulus;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(md, n).entries;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&row| md.is_unit(a[row * n + col]))
                .ok_or(BraceError::Singular(md.m))?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let scale = md.inv(a[col * n + col]).expect("pivot is a unit");
            for j in 0..n {
                a[col * n + j] = md.mul(a[col * n + j], scale);
                inv[col * n + j] = md.mul(inv[col * n + j], scale);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[row * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a[row * n + j] = md.sub(a[row * n + j], md.mul(factor, a[col * n + j]));
                    inv[row * n + j] = md.sub(inv[row * n + j], md.mul(factor, inv[col * n + j]));
                }
            }
        }
        Ok(Self { modulus: md, n, entries: inv })
    }

    /// Determinant computed by fraction-free elimination over the integers,
    /// then reduced mod `m`.
    pub fn det(&self) -> u64 {
        let n = self.n;
        if n == 0 {
            return 1 % self.modulus.m;
        }
        let mut a: Vec<BigInt> = self.entries.iter().map(|&x| BigInt::from(x)).collect();
        let mut sign_negative = false;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&row| !a[row * n + k].is_zero()) {
                    Some(row) => {
                        for j in 0..n {
                            a.swap(row * n + j, k * n + j);
                        }
                        sign_negative = !sign_negative;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        let mut d = a[n * n - 1].clone();
        if sign_negative {
            d = -d;
        }
        let m = BigInt::from(self.modulus.m);
        let mut r = d.mod_floor(&m);
        if r.is_negative() {
            r += m;
        }
        r.to_u64().expect("reduced determinant fits")
    }

    pub fn is_invertible(&self) -> bool {
        self.modulus.is_unit(self.det())
    }

    /// Smallest `k ≥ 1` with `Mᵏ = Id`, searching up to `limit`.
    pub fn multiplicative_order(&self, limit: u64) -> Result<u64> {
        if !self.is_invertible() {
            return Err(BraceError::Singular(self.modulus.m));
        }
        let mut acc = self.clone();
        for k in 1..=limit {
            if acc.is_identity() {
                return Ok(k);
            }
            acc = acc.mul(self)?;
        }
        Err(BraceError::InvalidParameter(format!("matrix order exceeds {limit}")))
    }

    /// `[Id, M, M², …, M^{k-1}]`.
    pub fn powers(&self, k: u64) -> Vec<Self> {
        let mut out = Vec::with_capacity(k as usize);
        let mut acc = Self::identity(self.modulus, self.n);
        for _ in 0..k {
            out.push(acc.clone());
            acc = acc.mul(self).expect("same shape");
        }
        out
    }

    /// Sub-block of size `size` starting at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        let mut out = Self::zero(self.modulus, size);
        for i in 0..size {
            for j in 0..size {
                out.entries[i * size + j] = self.get(row + i, col + j);
            }
        }
        out
    }
}

/// Companion matrix of `1 + x + … + x^{n-1}`: `(n-1)×(n-1)`, ones on the
/// subdiagonal, last column `-1`. It has multiplicative order `n`.
pub fn companion_d(n: usize, modulus: Modulus) -> Result<ResidueMatrix> {
    if n < 2 {
        return Err(BraceError::InvalidParameter(format!("companion matrix needs n >= 2, got {n}")));
    }
    let d = n - 1;
    let mut m = ResidueMatrix::zero(modulus, d);
    for i in 1..d {
        m.set(i, i - 1, 1);
    }
    for i in 0..d {
        m.set(i, d - 1, -1);
    }
    Ok(m)
}

/// The Gram matrix `E` invariant under [`companion_d`]: diagonal `n-1`,
/// off-diagonal `-1`. Closed form, so even moduli work.
pub fn gram_e(n: usize, modulus: Modulus) -> Result<ResidueMatrix> {
    if n < 2 {
        return Err(BraceError::InvalidParameter(format!("gram matrix needs n >= 2, got {n}")));
    }
    let d = n - 1;
    let mut m = ResidueMatrix::zero(modulus, d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, if i == j { (n - 1) as i64 } else { -1 });
        }
    }
    Ok(m)
}

/// `k` diagonal copies of `block`.
pub fn block_diag(block: &ResidueMatrix, k: usize) -> Result<ResidueMatrix> {
    if k < 1 {
        return Err(BraceError::InvalidParameter("block count must be at least 1".into()));
    }
    let b = block.n;
    let n = b * k;
    let mut out = ResidueMatrix::zero(block.modulus, n);
    for t in 0..k {
        for i in 0..b {
            for j in 0..b {
                out.entries[(t * b + i) * n + t * b + j] = block.get(i, j);
            }
        }
    }
    Ok(out)
}

/// Block cyclic shift with identity blocks: block row 0 holds `J` in the last
/// block column, block row `t ≥ 1` holds `J` in block column `t-1`.
pub fn block_perm_f(block_dim: usize, k: usize, modulus: Modulus) -> Result<ResidueMatrix> {
    if k < 1 {
        return Err(BraceError::InvalidParameter("block count must be at least 1".into()));
    }
    let n = block_dim * k;
    let mut out = ResidueMatrix::zero(modulus, n);
    for t in 0..k {
        let src = (t + k - 1) % k;
        for i in 0..block_dim {
            out.entries[(t * block_dim + i) * n + src * block_dim + i] = 1 % modulus.m;
        }
    }
    Ok(out)
}

/// `Q(x) = x·U·xᵗ` with `U` upper triangular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    u: ResidueMatrix,
}

impl QuadraticForm {
    pub fn new(u: ResidueMatrix) -> Result<Self> {
        for i in 0..u.n {
            for j in 0..i {
                if u.get(i, j) != 0 {
                    return Err(BraceError::InvalidParameter(format!(
                        "coefficient matrix must be upper triangular (entry {i},{j} is nonzero)"
                    )));
                }
            }
        }
        Ok(Self { u })
    }

    pub fn zero(modulus: Modulus, n: usize) -> Self {
        Self { u: ResidueMatrix::zero(modulus, n) }
    }

    /// `Σ_{i<j} x_i·x_j` on `(Z/m)^{n-1}`.
    pub fn sum_pairs(n: usize, modulus: Modulus) -> Result<Self> {
        if n < 1 {
            return Err(BraceError::InvalidParameter("n must be at least 1".into()));
        }
        let d = n - 1;
        let mut u = ResidueMatrix::zero(modulus, d);
        for i in 0..d {
            for j in i + 1..d {
                u.set(i, j, 1);
            }
        }
        Ok(Self { u })
    }

    /// A form whose bilinear matrix `U + Uᵗ` equals the symmetric matrix `b`.
    ///
    /// The diagonal is halved; for `p = 2` each diagonal entry must be even
    /// and its integer half in `[0, m/2)` is used.
    pub fn from_gram(b: &ResidueMatrix) -> Result<Self> {
        let md = b.modulus;
        let n = b.n;
        if b.transpose() != *b {
            return Err(BraceError::InvalidParameter("gram matrix must be symmetric".into()));
        }
        let mut u = ResidueMatrix::zero(md, n);
        for i in 0..n {
            let d = b.get(i, i);
            let half = if md.p == 2 {
                if !d.is_multiple_of(2) {
                    return Err(BraceError::OddDiagonal(i));
                }
                d / 2
            } else {
                md.mul(d, md.inv(2).expect("2 is a unit for odd p"))
            };
            u.entries[i * n + i] = half;
            for j in i + 1..n {
                u.entries[i * n + j] = b.get(i, j);
            }
        }
        Ok(Self { u })
    }

    /// Orthogonal sum of `k` copies of this form.
    pub fn replicate(&self, k: usize) -> Result<Self> {
        Ok(Self { u: block_diag(&self.u, k)? })
    }

    pub fn modulus(&self) -> Modulus {
        self.u.modulus
    }

    pub fn dim(&self) -> usize {
        self.u.n
    }

    pub fn coefficients(&self) -> &ResidueMatrix {
        &self.u
    }

    #[inline]
    pub fn eval_raw(&self, x: &[u64]) -> u64 {
        let n = self.u.n;
        let md = &self.u.modulus;
        let mut acc: u128 = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row: u128 = 0;
            for j in i..n {
                row += (self.u.entries[i * n + j] as u128) * (x[j] as u128);
            }
            acc += (row % md.m as u128) * x[i] as u128;
        }
        (acc % md.m as u128) as u64
    }

    pub fn eval(&self, x: &ResidueVector) -> Result<u64> {
        check_same(&self.u.modulus, &x.modulus)?;
        check_dim(self.u.n, x.dim())?;
        Ok(self.eval_raw(&x.coords))
    }

    /// `b(x, y) = Q(x+y) - Q(x) - Q(y)`.
    pub fn bilinear_raw(&self, x: &[u64], y: &[u64]) -> u64 {
        let md = &self.u.modulus;
        let s: Vec<u64> = x.iter().zip(y).map(|(&a, &b)| md.add(a, b)).collect();
        md.sub(md.sub(self.eval_raw(&s), self.eval_raw(x)), self.eval_raw(y))
    }

    pub fn bilinear(&self, x: &ResidueVector, y: &ResidueVector) -> Result<u64> {
        check_same(&self.u.modulus, &x.modulus)?;
        check_same(&self.u.modulus, &y.modulus)?;
        check_dim(self.u.n, x.dim())?;
        check_dim(self.u.n, y.dim())?;
        Ok(self.bilinear_raw(&x.coords, &y.coords))
    }

    /// `U + Uᵗ`.
    pub fn bilinear_matrix(&self) -> ResidueMatrix {
        self.u.add(&self.u.transpose()).expect("same shape")
    }

    /// `x·(U+Uᵗ)·yᵗ`, the matrix route to [`Self::bilinear`].
    pub fn bilinear_by_matrix(&self, x: &ResidueVector, y: &ResidueVector) -> Result<u64> {
        let by = self.bilinear_matrix().apply_vector(y)?;
        x.dot(&by)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.bilinear_matrix().is_invertible()
    }

    /// Whether `Q(f(x)) = Q(x)` for all `x`.
    ///
    /// Compares coefficients of `fᵗUf` and `U` as quadratic forms. A
    /// homogeneous quadratic form over `Z/m` is determined by its values on
    /// `e_i` and `e_i + e_j`, so this is exact for every modulus.
    pub fn is_preserved_by(&self, f: &ResidueMatrix) -> bool {
        if f.modulus != self.u.modulus || f.n != self.u.n {
            return false;
        }
        let moved = f.transpose().mul(&self.u).and_then(|t| t.mul(f)).expect("same shape");
        self.same_form_as_gram_like(&moved)
    }

    /// Whether `x ↦ xᵗ·A·x` equals `Q` as a form (A need not be triangular).
    fn same_form_as_gram_like(&self, a: &ResidueMatrix) -> bool {
        let md = &self.u.modulus;
        let n = self.u.n;
        for i in 0..n {
            if a.get(i, i) != self.u.get(i, i) {
                return false;
            }
            for j in i + 1..n {
                if md.add(a.get(i, j), a.get(j, i)) != self.u.get(i, j) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `Q(c(x)) = Q(x) + v·x` for all `x`. A nonzero linear term is
    /// a quadratic function only when `x² = x`, i.e. over `Z/2`.
    pub fn is_twisted_by(&self, c: &ResidueMatrix, v: &[u64]) -> Result<bool> {
        let n = self.u.n;
        check_dim(n, v.len())?;
        if c.modulus != self.u.modulus || c.n != n {
            return Ok(false);
        }
        if v.iter().all(|&x| x == 0) {
            return Ok(self.is_preserved_by(c));
        }
        if self.u.modulus.m != 2 {
            return Err(BraceError::InvalidParameter("a linear twist needs modulus 2".into()));
        }
        let mut shifted = self.u.clone();
        for (i, &vi) in v.iter().enumerate() {
            shifted.entries[i * n + i] = (shifted.entries[i * n + i] + vi) % 2;
        }
        let moved = c.transpose().mul(&self.u).and_then(|t| t.mul(c))?;
        Ok(Self { u: shifted }.same_form_as_gram_like(&moved))
    }

    /// Exhaustive check of `Q∘f = Q` over all `m^n` vectors; `None` when
    /// that exceeds `budget`.
    pub fn is_preserved_exhaustively(&self, f: &ResidueMatrix, budget: u64) -> Option<bool> {
        let md = self.u.modulus;
        let n = self.u.n;
        let total = md.m.checked_pow(n as u32).filter(|&t| t <= budget)?;
        let mut x = vec![0u64; n];
        for _ in 0..total {
            if self.eval_raw(&f.apply(&x)) != self.eval_raw(&x) {
                return Some(false);
            }
            increment(&mut x, md.m);
        }
        Some(true)
    }
}

/// Advances a little-endian odometer over `[0, m)^n`.
pub(crate) fn increment(x: &mut [u64], m: u64) {
    for c in x.iter_mut().rev() {
        *c += 1;
        if *c < m {
            return;
        }
        *c = 0;
    }
}
