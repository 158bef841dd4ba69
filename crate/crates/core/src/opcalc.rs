//! Constant-coefficient differential operators `P = Σ c_α D^α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, SparsePoly, TermsRepr};

/// A real, constant-coefficient differential operator on `ℝ^d`.
///
/// Immutable once built. Terms are kept in canonical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermsRepr", into = "TermsRepr")]
pub struct DiffOperator(SparsePoly<f64>);

impl DiffOperator {
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        Ok(DiffOperator(SparsePoly::from_terms(dim, terms)?))
    }

    pub fn zero(dim: usize) -> Self {
        DiffOperator(SparsePoly::zero(dim))
    }

    /// `c·I`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        DiffOperator(SparsePoly::constant(dim, c))
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// `∂/∂x_axis`.
    pub fn partial(dim: usize, axis: usize) -> Self {
        DiffOperator(SparsePoly::monomial(MultiIndex::unit(dim, axis), 1.0))
    }

    /// `Δ = Σ_k ∂²/∂x_k²`.
    pub fn laplacian(dim: usize) -> Self {
        let terms = (0..dim).map(|k| {
            let mut e = vec![0; dim];
            e[k] = 2;
            (MultiIndex::new(e).expect("dim >= 1"), 1.0)
        });
        Self::from_terms(dim, terms).expect("consistent dimension")
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Order `m = max |α|`.
    pub fn order(&self) -> u32 {
        self.0.degree()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.0.coeff(alpha)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.0.terms().map(|(a, &c)| (a, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        DiffOperator(self.0.scale(s))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(DiffOperator(self.0.try_add(&other.0)?))
    }

    /// `op^k` under composition; `op^0 = I`.
    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = compose(&acc, self).expect("same dimension");
        }
        acc
    }

    /// Polynomial whose coefficients are those of the operator, `x^α ↔ D^α`.
    pub fn as_poly(&self) -> &SparsePoly<f64> {
        &self.0
    }

    /// Term-wise comparison with a relative tolerance.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        self.0.approx_eq(&other.0, rel)
    }
}

impl From<DiffOperator> for TermsRepr {
    fn from(op: DiffOperator) -> Self {
        TermsRepr::from(&op.0)
    }
}

impl TryFrom<TermsRepr> for DiffOperator {
    type Error = Error;

    fn try_from(r: TermsRepr) -> Result<Self> {
        Ok(DiffOperator(SparsePoly::try_from(r)?))
    }
}

/// Distributional adjoint `P* = Σ (−1)^{|α|} c_α D^α`.
pub fn adjoint(op: &DiffOperator) -> DiffOperator {
    DiffOperator(
        op.0.map_coeffs(|a, c| if a.is_even() { c } else { -c }),
    )
}

/// `a ∘ b = Σ a_α b_β D^{α+β}`.
pub fn compose(a: &DiffOperator, b: &DiffOperator) -> Result<DiffOperator> {
    Ok(DiffOperator(a.0.try_mul(&b.0)?))
}

/// A finite vector operator `P = (P₁, …, P_n)ᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct VectorOperator {
    dim: usize,
    components: Vec<DiffOperator>,
}

impl VectorOperator {
    pub fn new(components: Vec<DiffOperator>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyOperator)?;
        let dim = first.dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(VectorOperator { dim, components })
    }

    /// Gradient `∇ = (∂₁, …, ∂_d)ᵀ`.
    pub fn gradient(dim: usize) -> Self {
        Self::new((0..dim).map(|k| DiffOperator::partial(dim, k)).collect())
            .expect("dim >= 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[DiffOperator] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Stacks `other` below `self`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Self::new(components)
    }

    /// Applies `op ∘ ·` to every component.
    pub fn precompose(&self, op: &DiffOperator) -> Result<Self> {
        Self::new(
            self.components
                .iter()
                .map(|c| compose(op, c))
                .collect::<Result<_>>()?,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        VectorOperator {
            dim: self.dim,
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }
}

/// `L = P*ᵀP = Σ_j P_j* P_j`.
pub fn gram_operator(vp: &VectorOperator) -> Result<DiffOperator> {
    vp.components
        .iter()
        .try_fold(DiffOperator::zero(vp.dim), |acc, p| {
            acc.try_add(&compose(&adjoint(p), p)?)
        })
}

/// Operator JSON accepts a single operator object or an array of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum VectorRepr {
    Many(Vec<DiffOperator>),
    One(DiffOperator),
}

impl From<VectorOperator> for VectorRepr {
    fn from(v: VectorOperator) -> Self {
        VectorRepr::Many(v.components)
    }
}

impl TryFrom<VectorRepr> for VectorOperator {
    type Error = Error;

    fn try_from(r: VectorRepr) -> Result<Self> {
        match r {
            VectorRepr::Many(v) => VectorOperator::new(v),
            VectorRepr::One(op) => VectorOperator::new(vec![op]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn ddx() -> DiffOperator {
        DiffOperator::partial(1, 0)
    }

    #[test]
    fn adjoint_of_derivative_flips_sign() {
        let a = adjoint(&ddx());
        assert_eq!(a.coeff(&mi(&[1])), -1.0);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn adjoint_fixes_order_zero_and_even_terms() {
        let s = DiffOperator::scalar(1, 0.7);
        assert_eq!(adjoint(&s), s);
        let lap = DiffOperator::laplacian(2);
        assert_eq!(adjoint(&lap), lap);
    }

    #[test]
    fn compose_examples() {
        let d2 = compose(&ddx(), &ddx()).unwrap();
        assert_eq!(d2.coeff(&mi(&[2])), 1.0);
        let m = compose(&adjoint(&ddx()), &ddx()).unwrap();
        assert_eq!(m.coeff(&mi(&[2])), -1.0);
        let p = DiffOperator::from_terms(2, [(mi(&[1, 2]), 3.0), (mi(&[0, 0]), -1.5)]).unwrap();
        assert_eq!(compose(&DiffOperator::identity(2), &p).unwrap(), p);
    }

    #[test]
    fn compose_rejects_dimension_mismatch() {
        let err = compose(&ddx(), &DiffOperator::laplacian(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, got: 2 }));
    }

    #[test]
    fn gram_of_sobolev_spline_operator() {
        let sigma = 1.7;
        let vp = VectorOperator::new(vec![ddx(), DiffOperator::scalar(1, sigma)]).unwrap();
        let l = gram_operator(&vp).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.coeff(&mi(&[2])), -1.0);
        assert!((l.coeff(&mi(&[0])) - sigma * sigma).abs() < 1e-15);
    }

    #[test]
    fn gram_of_scalar_operator() {
        let vp = VectorOperator::new(vec![DiffOperator::scalar(3, 2.0)]).unwrap();
        assert_eq!(gram_operator(&vp).unwrap(), DiffOperator::scalar(3, 4.0));
    }

    #[test]
    fn empty_vector_operator_is_rejected() {
        assert!(matches!(
            VectorOperator::new(vec![]),
            Err(Error::EmptyOperator)
        ));
    }

    #[test]
    fn json_roundtrip_and_single_object_form() {
        let op = DiffOperator::from_terms(2, [(mi(&[0, 2]), 1.0), (mi(&[2, 0]), 1.0)]).unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"terms":[{"alpha":[0,2],"coeff":1.0},{"alpha":[2,0],"coeff":1.0}]}"#
        );
        let back: DiffOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        let vp: VectorOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(vp.len(), 1);
        let vp: VectorOperator = serde_json::from_str(&format!("[{s},{s}]")).unwrap();
        assert_eq!(vp.len(), 2);
    }

    #[test]
    fn json_rejects_inconsistent_alpha() {
        let s = r#"{"dim":2,"terms":[{"alpha":[1],"coeff":1.0}]}"#;
        assert!(serde_json::from_str::<DiffOperator>(s).is_err());
    }
}
