//! Braces on `(Z/p^r)^{n+1}` built from a quadratic form `Q` and an
//! orthogonal `f` of `p`-power order.
//!
//! Writing elements as `(x, μ)` and `q(x, μ) = μ − Q(x)`,
//!
//! ```text
//! λ_(x,μ)(y, μ') = (f^q(y), μ' + b(x, f^q(y)))
//! ```
//!
//! where `b` is the bilinear form of `Q`.

use serde_json::{json, Value};

use crate::brace::{AdditiveShape, Element, LeftBrace};
use crate::error::{BraceError, Result};
use crate::residue::{dot, increment, Modulus, QuadraticForm, ResidueMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HegedusSpec {
    q: QuadraticForm,
    f: ResidueMatrix,
    r_prime: u32,
}

impl HegedusSpec {
    /// Validates `f` and derives `r'` from its order.
    pub fn new(q: QuadraticForm, f: ResidueMatrix) -> Result<Self> {
        let md = q.modulus();
        if f.modulus() != md {
            return Err(BraceError::ModulusMismatch { left: md.m(), right: f.modulus().m() });
        }
        if f.dim() != q.dim() {
            return Err(BraceError::DimensionMismatch { expected: q.dim(), actual: f.dim() });
        }
        if q.dim() == 0 {
            return Err(BraceError::InvalidParameter("n must be positive".into()));
        }
        if !f.is_invertible() {
            return Err(BraceError::Singular(md.m()));
        }
        if !q.is_preserved_by(&f) {
            return Err(BraceError::NotOrthogonal);
        }
        let r_prime = p_power_order(&f)?;
        Ok(Self { q, f, r_prime })
    }

    /// `H(p^r, n, Q, id)`.
    pub fn with_identity(q: QuadraticForm) -> Result<Self> {
        let f = ResidueMatrix::identity(q.modulus(), q.dim());
        Self::new(q, f)
    }

    pub fn modulus(&self) -> Modulus {
        self.q.modulus()
    }

    pub fn n(&self) -> usize {
        self.q.dim()
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.q
    }

    pub fn f(&self) -> &ResidueMatrix {
        &self.f
    }

    pub fn r_prime(&self) -> u32 {
        self.r_prime
    }

    pub fn f_order(&self) -> u64 {
        self.modulus().p().pow(self.r_prime)
    }

    pub fn shape(&self) -> AdditiveShape {
        AdditiveShape::uniform(self.modulus().m(), self.n() + 1).expect("modulus is at least 2")
    }

    /// `μ − Q(x)`.
    pub fn q_value(&self, x: &[u64], mu: u64) -> Result<u64> {
        if x.len() != self.n() {
            return Err(BraceError::DimensionMismatch { expected: self.n(), actual: x.len() });
        }
        let md = self.modulus();
        Ok(md.sub(mu % md.m(), self.q.eval_raw(x)))
    }

    /// `{(0, μ) : μ ∈ p^{r'}·Z/p^r}`, valid for non-degenerate `Q`.
    pub fn predicted_socle(&self) -> Result<Vec<Element>> {
        if !self.q.is_nondegenerate() {
            return Err(BraceError::DegenerateForm);
        }
        let md = self.modulus();
        let step = md.p().pow(self.r_prime);
        Ok((0..md.m())
            .step_by(step as usize)
            .map(|mu| {
                let mut e = vec![0; self.n()];
                e.push(mu);
                e
            })
            .collect())
    }

    pub fn provenance(&self) -> Value {
        let md = self.modulus();
        json!({
            "construction": "hegedus",
            "p": md.p(),
            "r": md.r(),
            "n": self.n(),
            "U": self.q.coefficients().to_rows(),
            "f": self.f.to_rows(),
            "rprime": self.r_prime,
        })
    }
}

/// `r'` with `ord(f) = p^{r'} ≤ p^r`.
fn p_power_order(f: &ResidueMatrix) -> Result<u32> {
    let md = f.modulus();
    let mut acc = f.clone();
    for e in 0..=md.r() {
        if acc.is_identity() {
            return Ok(e);
        }
        acc = acc.pow(md.p() as i64)?;
    }
    let order = f.multiplicative_order(1 << 20).unwrap_or(0);
    Err(BraceError::BadOrder { order, p: md.p(), bound: md.m() })
}

#[derive(Clone, Debug)]
pub struct HegedusBrace {
    spec: HegedusSpec,
    shape: AdditiveShape,
    powers: Vec<ResidueMatrix>,
    gram: ResidueMatrix,
}

impl HegedusBrace {
    pub fn new(spec: HegedusSpec) -> Self {
        let shape = spec.shape();
        let powers = spec.f.powers(spec.f_order());
        let gram = spec.q.bilinear_matrix();
        Self { spec, shape, powers, gram }
    }

    pub fn spec(&self) -> &HegedusSpec {
        &self.spec
    }

    /// `q` of an element `(x, μ)` of this brace.
    #[inline]
    pub fn q_of(&self, a: &[u64]) -> u64 {
        let n = self.spec.n();
        self.spec.modulus().sub(a[n], self.spec.q.eval_raw(&a[..n]))
    }

    #[inline]
    fn power(&self, q: u64) -> &ResidueMatrix {
        &self.powers[(q % self.powers.len() as u64) as usize]
    }

    #[inline]
    fn b(&self, x: &[u64], y: &[u64]) -> u64 {
        dot(&self.spec.modulus(), x, &self.gram.apply(y))
    }

    /// The socle computed from the lambda map by checking generators.
    pub fn socle_by_generators(&self) -> Result<Vec<Element>> {
        let md = self.spec.modulus();
        let dim = self.spec.n() + 1;
        let total = md.m().checked_pow(dim as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| BraceError::CapExceeded {
            order: self.shape.order_big().to_string(),
            cap: 1 << 24,
        })?;
        let gens = self.shape.generators();
        let mut out = Vec::new();
        let mut a = vec![0u64; dim];
        for _ in 0..total {
            if gens.iter().all(|e| self.lambda(&a, e) == *e) {
                out.push(a.clone());
            }
            increment(&mut a, md.m());
        }
        Ok(out)
    }
}

impl LeftBrace for HegedusBrace {
    fn shape(&self) -> &AdditiveShape {
        &self.shape
    }

    fn lambda(&self, a: &[u64], c: &[u64]) -> Element {
        let n = self.spec.n();
        let md = self.spec.modulus();
        let x = &a[..n];
        let mut out = self.power(self.q_of(a)).apply(&c[..n]);
        let mu = md.add(c[n], self.b(x, &out));
        out.push(mu);
        out
    }

    fn lambda_inv(&self, a: &[u64], c: &[u64]) -> Element {
        let n = self.spec.n();
        let md = self.spec.modulus();
        let k = self.powers.len() as u64;
        let q = self.q_of(a) % k;
        let z = &c[..n];
        let mut out = self.power(k - q).apply(z);
        out.push(md.sub(c[n], self.b(&a[..n], z)));
        out
    }

    fn provenance(&self) -> Value {
        self.spec.provenance()
    }
}

pub fn build_hegedus(spec: HegedusSpec) -> HegedusBrace {
    HegedusBrace::new(spec)
}

/// Every upper-triangular coefficient matrix on `(Z/m)^n`, in odometer order.
pub fn all_forms(modulus: Modulus, n: usize) -> Result<Vec<QuadraticForm>> {
    let slots = n * (n + 1) / 2;
    let total = modulus.m().checked_pow(slots as u32).filter(|&t| t <= 1_000_000).ok_or_else(|| {
        BraceError::InvalidParameter(format!("too many forms over {modulus} in dimension {n}"))
    })?;
    let mut coeffs = vec![0u64; slots];
    let mut out = Vec::with_capacity(total as usize);
    for _ in 0..total {
        let mut u = ResidueMatrix::zero(modulus, n);
        let mut it = coeffs.iter();
        for i in 0..n {
            for j in i..n {
                u.set(i, j, *it.next().expect("slot count") as i64);
            }
        }
        out.push(QuadraticForm::new(u)?);
        increment(&mut coeffs, modulus.m());
    }
    Ok(out)
}

/// Brute-force search for every `f` preserving `Q` whose order is a power
/// of `p` not exceeding `p^r`. Limited to `m^{n²} ≤ 10^6` candidates.
pub fn orthogonal_p_elements(q: &QuadraticForm) -> Result<Vec<ResidueMatrix>> {
    let md = q.modulus();
    let n = q.dim();
    let total = md.m().checked_pow((n * n) as u32).filter(|&t| t <= 1_000_000).ok_or_else(|| {
        BraceError::InvalidParameter(format!("search space over {md} in dimension {n} is too large"))
    })?;
    let mut entries = vec![0u64; n * n];
    let mut out = Vec::new();
    for _ in 0..total {
        let rows: Vec<Vec<u64>> = entries.chunks(n).map(<[u64]>::to_vec).collect();
        let f = ResidueMatrix::from_residue_rows(md, &rows)?;
        if q.is_preserved_by(&f) && f.is_invertible() && p_power_order(&f).is_ok() {
            out.push(f);
        }
        increment(&mut entries, md.m());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brace::verify_brace_axioms;
    use crate::report::VerifyConfig;

    fn z(p: u64, r: u32) -> Modulus {
        Modulus::new(p, r).unwrap()
    }

    fn xy_over_2() -> HegedusBrace {
        let q = QuadraticForm::sum_pairs(3, z(2, 1)).unwrap();
        build_hegedus(HegedusSpec::with_identity(q).unwrap())
    }

    /// Direct evaluation of the lambda formula with `b` from its definition.
    fn lambda_oracle(spec: &HegedusSpec, a: &[u64], c: &[u64]) -> Vec<u64> {
        let n = spec.n();
        let md = spec.modulus();
        let q = spec.q_value(&a[..n], a[n]).unwrap();
        let fy = spec.f().pow(q as i64).unwrap().apply(&c[..n]);
        let mut out = fy.clone();
        out.push(md.add(c[n], spec.form().bilinear_raw(&a[..n], &fy)));
        out
    }

    #[test]
    fn q_value_examples() {
        let b = xy_over_2();
        assert_eq!(b.spec().q_value(&[0, 0], 1).unwrap(), 1);
        assert_eq!(b.spec().q_value(&[1, 0], 0).unwrap(), 0);
        assert_eq!(b.spec().q_value(&[1, 1], 0).unwrap(), 1);
        assert!(b.spec().q_value(&[1], 0).is_err());
    }

    #[test]
    fn product_example() {
        let b = xy_over_2();
        assert_eq!(b.mul(&[1, 0, 0], &[0, 1, 0]), vec![1, 1, 1]);
        assert_eq!(b.lambda(&[1, 0, 0], &[0, 1, 0]), vec![0, 1, 1]);
    }

    #[test]
    fn identity_f_collapses() {
        let b = xy_over_2();
        for a in b.shape().elements() {
            for c in b.shape().elements() {
                let bxy = b.spec().form().bilinear_raw(&a[..2], &c[..2]);
                assert_eq!(b.lambda(&a, &c), vec![c[0], c[1], (c[2] + bxy) % 2]);
            }
        }
    }

    #[test]
    fn order_eight_brace() {
        let b = xy_over_2();
        assert!(verify_brace_axioms(&b, &VerifyConfig::default()).passed());
        assert_eq!(b.socle_by_generators().unwrap(), vec![vec![0, 0, 0], vec![0, 0, 1]]);
        assert_eq!(b.spec().predicted_socle().unwrap(), vec![vec![0, 0, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn q_is_additive_along_products() {
        let b = xy_over_2();
        for a in b.shape().elements() {
            for c in b.shape().elements() {
                assert_eq!(b.q_of(&b.mul(&a, &c)), (b.q_of(&a) + b.q_of(&c)) % 2);
            }
        }
    }

    #[test]
    fn rejects_bad_f() {
        let md = z(5, 1);
        let q = QuadraticForm::from_gram(&ResidueMatrix::from_rows(md, &[[2, 0], [0, 2]]).unwrap()).unwrap();
        let shear = ResidueMatrix::from_rows(md, &[[1, 1], [0, 1]]).unwrap();
        assert_eq!(HegedusSpec::new(q.clone(), shear), Err(BraceError::NotOrthogonal));
        // -Id preserves Σx² but has order 2, not a power of 5
        let neg = ResidueMatrix::from_rows(md, &[[4, 0], [0, 4]]).unwrap();
        assert!(matches!(HegedusSpec::new(q, neg), Err(BraceError::BadOrder { order: 2, p: 5, .. })));
    }

    #[test]
    fn order_three_f_over_z3() {
        let md = z(3, 1);
        let q = QuadraticForm::from_gram(&ResidueMatrix::from_rows(md, &[[2, 1], [1, 2]]).unwrap()).unwrap();
        let fs = orthogonal_p_elements(&q).unwrap();
        let order_three: Vec<_> = fs.into_iter().filter(|f| !f.is_identity()).collect();
        assert!(!order_three.is_empty());
        for f in order_three {
            let spec = HegedusSpec::new(q.clone(), f).unwrap();
            assert_eq!(spec.r_prime(), 1);
            let b = build_hegedus(spec);
            let report = verify_brace_axioms(&b, &VerifyConfig::default());
            assert!(report.passed() && report.is_exhaustive());
            for a in b.shape().elements() {
                for c in b.shape().elements() {
                    assert_eq!(b.lambda(&a, &c), lambda_oracle(b.spec(), &a, &c));
                    assert_eq!(b.lambda_inv(&a, &b.lambda(&a, &c)), c);
                }
            }
        }
    }

    #[test]
    fn socle_predictions() {
        let md = z(3, 2);
        let q = QuadraticForm::from_gram(&ResidueMatrix::from_rows(md, &[[2]]).unwrap()).unwrap();
        // over Z/9 the form x² has orthogonal group {±1}; r'=0 only
        assert_eq!(HegedusSpec::with_identity(q.clone()).unwrap().predicted_socle().unwrap().len(), 9);
        let qq = QuadraticForm::from_gram(&ResidueMatrix::from_rows(md, &[[0, 1], [1, 0]]).unwrap()).unwrap();
        let f = ResidueMatrix::from_rows(md, &[[4, 0], [0, 7]]).unwrap();
        let spec = HegedusSpec::new(qq, f).unwrap();
        assert_eq!(spec.r_prime(), 1);
        assert_eq!(spec.predicted_socle().unwrap(), vec![vec![0, 0, 0], vec![0, 0, 3], vec![0, 0, 6]]);
        let b = build_hegedus(spec);
        assert_eq!(b.socle_by_generators().unwrap(), b.spec().predicted_socle().unwrap());
        let degenerate = HegedusSpec::with_identity(QuadraticForm::zero(md, 1)).unwrap();
        assert_eq!(degenerate.predicted_socle(), Err(BraceError::DegenerateForm));
    }

    #[test]
    fn full_order_gives_zero_socle() {
        let md = z(3, 1);
        let q = QuadraticForm::new(ResidueMatrix::from_rows(md, &[[0, 1, 0], [0, 0, 0], [0, 0, 1]]).unwrap()).unwrap();
        assert_eq!(HegedusSpec::with_identity(q.clone()).unwrap().predicted_socle().unwrap().len(), 3);
        let nontrivial: Vec<_> = orthogonal_p_elements(&q).unwrap().into_iter().filter(|f| !f.is_identity()).collect();
        assert!(!nontrivial.is_empty());
        for f in nontrivial {
            let spec = HegedusSpec::new(q.clone(), f).unwrap();
            assert_eq!(spec.predicted_socle().unwrap(), vec![vec![0, 0, 0, 0]]);
            assert_eq!(build_hegedus(spec).socle_by_generators().unwrap(), vec![vec![0, 0, 0, 0]]);
        }
    }
}
