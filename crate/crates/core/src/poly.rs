//! Sparse multivariate polynomials keyed by exponent vectors.
//!
//! The same storage backs differential operators (`Σ c_α D^α`), their
//! Fourier symbols (`Σ c_α (ix)^α`) and symbol norms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coefficient whose magnitude is at most this fraction of the summed
/// magnitudes of its contributions is treated as cancelled.
pub const COEFF_EPS: f64 = 1e-14;

/// Exponent vector `α = (α₁, …, α_d)` of a monomial or partial derivative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidParameter(
                "multi-index must have dimension >= 1".into(),
            ));
        }
        Ok(MultiIndex(exponents))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        MultiIndex(vec![0; dim])
    }

    /// Unit index `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_even(&self) -> bool {
        self.order() % 2 == 0
    }

    /// Monomial `x^α`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }

    /// Derivative index with `axis` lowered by one, with the multiplicity factor.
    pub fn lower(&self, axis: usize) -> Option<(MultiIndex, u32)> {
        let a = self.0[axis];
        if a == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[axis] -= 1;
        Some((MultiIndex(e), a))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Coefficient ring for [`SparsePoly`].
pub trait Coeff:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn from_real(v: f64) -> Self;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn from_real(v: f64) -> Self {
        v
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
}

/// Finite sum `Σ c_α x^α` in canonical form: no zero coefficients, all
/// indices of one dimension, lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<C> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> SparsePoly<C> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        SparsePoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn monomial(alpha: MultiIndex, c: C) -> Self {
        Self::accumulate(alpha.dim(), [(alpha, c)])
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let terms: Vec<(MultiIndex, C)> = terms.into_iter().collect();
        if let Some((alpha, _)) = terms.iter().find(|(a, _)| a.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: alpha.dim(),
            });
        }
        Ok(Self::accumulate(dim, terms))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).copied().unwrap_or_else(C::zero)
    }

    /// Highest total degree present (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Terms of exactly total degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        SparsePoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() == k)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&MultiIndex, C) -> D) -> SparsePoly<D> {
        SparsePoly::accumulate(
            self.dim,
            self.terms.iter().map(|(a, &c)| (a.clone(), f(a, c))),
        )
    }

    pub fn scale(&self, s: C) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::accumulate(
            self.dim,
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|(a, &c)| (a.clone(), c)),
        ))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let products = self.terms.iter().flat_map(|(a, &ca)| {
            other.terms.iter().map(move |(b, &cb)| (a + b, ca * cb))
        });
        Ok(Self::accumulate(self.dim, products))
    }

    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis out of range");
        let lowered = self.terms.iter().filter_map(|(a, &c)| {
            a.lower(axis)
                .map(|(lowered, mult)| (lowered, c * C::from_real(mult as f64)))
        });
        Self::accumulate(self.dim, lowered)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Sums contributions per index, dropping exact zeros and cancellation
    /// residue (`|Σ c| ≤ COEFF_EPS · Σ |c|`). Small coefficients that did not
    /// arise from cancellation are kept whatever their size.
    fn accumulate<I>(dim: usize, contributions: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut acc: BTreeMap<MultiIndex, (C, f64)> = BTreeMap::new();
        for (alpha, c) in contributions {
            let slot = acc.entry(alpha).or_insert((C::zero(), 0.0));
            slot.0 = slot.0 + c;
            slot.1 += c.magnitude();
        }
        let terms = acc
            .into_iter()
            .filter(|(_, (c, mag))| c.magnitude() != 0.0 && c.magnitude() > COEFF_EPS * mag)
            .map(|(a, (c, _))| (a, c))
            .collect();
        SparsePoly { dim, terms }
    }
}

impl SparsePoly<f64> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms.iter().map(|(a, &c)| c * a.monomial(x)).sum()
    }

    /// Coefficient-wise comparison with a relative tolerance on each term.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| {
            let (a, b) = (self.coeff(k), other.coeff(k));
            (a - b).abs() <= rel * a.abs().max(b.abs())
        })
    }
}

/// Flattened form of a real polynomial for repeated evaluation: per-axis
/// power tables replace the per-term `powi` calls.
#[derive(Clone, Debug)]
pub struct PolyEvaluator {
    dim: usize,
    stride: usize,
    exps: Vec<u32>,
    coeffs: Vec<f64>,
}

impl PolyEvaluator {
    pub fn new(p: &SparsePoly<f64>) -> Self {
        let stride = p
            .terms
            .keys()
            .flat_map(|a| a.exponents().iter().copied())
            .max()
            .unwrap_or(0) as usize
            + 1;
        let mut exps = Vec::with_capacity(p.len() * p.dim);
        let mut coeffs = Vec::with_capacity(p.len());
        for (a, &c) in &p.terms {
            exps.extend_from_slice(a.exponents());
            coeffs.push(c);
        }
        PolyEvaluator {
            dim: p.dim,
            stride,
            exps,
            coeffs,
        }
    }

    /// Evaluates at `x`, using `powers` as scratch space.
    pub fn eval_with(&self, x: &[f64], powers: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        powers.resize(self.dim * self.stride, 0.0);
        for (axis, &xi) in x.iter().enumerate() {
            let row = &mut powers[axis * self.stride..(axis + 1) * self.stride];
            let mut v = 1.0;
            for slot in row.iter_mut() {
                *slot = v;
                v *= xi;
            }
        }
        self.coeffs
            .iter()
            .zip(self.exps.chunks_exact(self.dim.max(1)))
            .map(|(&c, e)| {
                e.iter()
                    .enumerate()
                    .fold(c, |acc, (axis, &k)| acc * powers[axis * self.stride + k as usize])
            })
            .sum()
    }
}

impl SparsePoly<Complex64> {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms.iter().map(|(a, &c)| c * a.monomial(x)).sum()
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|_, c| c.conj())
    }
}

/// JSON form shared by operators and symbol norms:
/// `{"dim": d, "terms": [{"alpha": [..], "coeff": c}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermsRepr {
    pub dim: usize,
    pub terms: Vec<TermRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRepr {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

impl From<&SparsePoly<f64>> for TermsRepr {
    fn from(p: &SparsePoly<f64>) -> Self {
        TermsRepr {
            dim: p.dim,
            terms: p
                .terms
                .iter()
                .map(|(a, &c)| TermRepr {
                    alpha: a.0.clone(),
                    coeff: c,
                })
                .collect(),
        }
    }
}

impl TryFrom<TermsRepr> for SparsePoly<f64> {
    type Error = Error;

    fn try_from(r: TermsRepr) -> Result<Self> {
        if r.dim == 0 {
            return Err(Error::InvalidParameter("dim must be >= 1".into()));
        }
        if let Some(t) = r.terms.iter().find(|t| !t.coeff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite coefficient at alpha {:?}",
                t.alpha
            )));
        }
        let terms = r
            .terms
            .into_iter()
            .map(|t| Ok((MultiIndex::new(t.alpha)?, t.coeff)))
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::from_terms(r.dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn canonical_form_drops_cancelled_terms() {
        let p = SparsePoly::from_terms(1, [(mi(&[1]), 2.0), (mi(&[1]), -2.0), (mi(&[0]), 1.0)])
            .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&mi(&[0])), 1.0);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let err = SparsePoly::from_terms(2, [(mi(&[1]), 1.0)]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn product_and_partial() {
        // (1 + x)(1 - x) = 1 - x²
        let a = SparsePoly::from_terms(1, [(mi(&[0]), 1.0), (mi(&[1]), 1.0)]).unwrap();
        let b = SparsePoly::from_terms(1, [(mi(&[0]), 1.0), (mi(&[1]), -1.0)]).unwrap();
        let p = a.try_mul(&b).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&mi(&[2])), -1.0);
        assert_eq!(p.partial(0).coeff(&mi(&[1])), -2.0);
        assert_eq!(p.eval(&[3.0]), -8.0);
    }

    #[test]
    fn terms_are_sorted_lexicographically() {
        let p = SparsePoly::from_terms(
            2,
            [(mi(&[0, 2]), 1.0), (mi(&[2, 0]), 1.0), (mi(&[1, 1]), 3.0)],
        )
        .unwrap();
        let repr = TermsRepr::from(&p);
        let alphas: Vec<_> = repr.terms.iter().map(|t| t.alpha.clone()).collect();
        assert_eq!(alphas, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
