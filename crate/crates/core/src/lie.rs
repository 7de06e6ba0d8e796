//! `gl_n` and `sl_n` in the matrix-unit realisation.
//!
//! Lie elements are plain `n×n` matrices. Indices in the public API are
//! 1-based, matching the usual `e_ij` notation.

use crate::error::{Error, Result};
use crate::scalar::linalg::inverse;
use crate::scalar::{int, Polynomial, QMatrix, Rational};
use crate::tensor::Tensor2;

pub type LieElement = QMatrix;

/// A root of `sl_n` or a Cartan slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootLabel {
    /// `(i, j)` with `i < j`.
    Pos(usize, usize),
    /// `(i, j)` with `i > j`.
    Neg(usize, usize),
    /// `1 ≤ i ≤ n-1`.
    Cartan(usize),
}

impl RootLabel {
    pub fn validate(self, n: usize) -> Result<Self> {
        let ok = match self {
            RootLabel::Pos(i, j) => 1 <= i && i < j && j <= n,
            RootLabel::Neg(i, j) => 1 <= j && j < i && i <= n,
            RootLabel::Cartan(i) => 1 <= i && i < n,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Dimension(format!("{self:?} is not a label for n = {n}")))
        }
    }

    /// Root pair `(i, j)` for a root label.
    pub fn pair(self) -> Option<(usize, usize)> {
        match self {
            RootLabel::Pos(i, j) | RootLabel::Neg(i, j) => Some((i, j)),
            RootLabel::Cartan(_) => None,
        }
    }

    pub fn from_pair(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "diagonal pair is not a root");
        if i < j {
            RootLabel::Pos(i, j)
        } else {
            RootLabel::Neg(i, j)
        }
    }

    pub fn negate(self) -> Self {
        match self {
            RootLabel::Pos(i, j) => RootLabel::Neg(j, i),
            RootLabel::Neg(i, j) => RootLabel::Pos(j, i),
            c => c,
        }
    }
}

/// Matrix unit `e_ij` (1-based).
pub fn unit(n: usize, i: usize, j: usize) -> LieElement {
    let mut m = QMatrix::zeros(n, n);
    m[(i - 1, j - 1)] = int(1);
    m
}

pub fn identity(n: usize) -> LieElement {
    QMatrix::identity(n)
}

pub fn bracket(x: &LieElement, y: &LieElement) -> LieElement {
    x.commutator(y)
}

/// `tr(XY)` without forming the product.
pub fn trace_form(x: &LieElement, y: &LieElement) -> Rational {
    let n = x.rows();
    let mut acc = int(0);
    for i in 0..n {
        for j in 0..n {
            let a = &x[(i, j)];
            if a != &int(0) {
                acc += a * &y[(j, i)];
            }
        }
    }
    acc
}

pub fn is_traceless(x: &LieElement) -> bool {
    x.trace() == int(0)
}

/// `Φ₊` as pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn positive_roots(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
        }
    }
    out
}

pub fn is_positive(root: (usize, usize)) -> bool {
    root.0 < root.1
}

pub fn is_negative(root: (usize, usize)) -> bool {
    root.0 > root.1
}

/// `h_i = e_ii - e_{i+1,i+1}`.
pub fn standard_cartan(n: usize) -> Vec<LieElement> {
    (1..n).map(|i| unit(n, i, i).sub(&unit(n, i + 1, i + 1))).collect()
}

pub fn gram(basis: &[LieElement]) -> QMatrix {
    QMatrix::from_fn(basis.len(), basis.len(), |i, j| trace_form(&basis[i], &basis[j]))
}

/// Dual basis with respect to the trace form: `tr(B*_i B_j) = δ_ij`.
pub fn dual_basis(basis: &[LieElement]) -> Result<Vec<LieElement>> {
    let Some(first) = basis.first() else {
        return Ok(Vec::new());
    };
    let n = first.rows();
    let g = gram(basis);
    let ginv = inverse(&g).map_err(|_| Error::DegenerateBasis)?;
    // B*_i = Σ_j (G⁻¹)_ij B_j; symmetric G makes the index order immaterial.
    Ok((0..basis.len())
        .map(|i| {
            let mut acc = QMatrix::zeros(n, n);
            for (j, b) in basis.iter().enumerate() {
                let c = &ginv[(i, j)];
                if c != &int(0) {
                    acc = acc.add(&b.scale(c));
                }
            }
            acc
        })
        .collect())
}

/// `{e_α}_{α∈Φ₊} ∪ {h_i} ∪ {e_{-α}}_{α∈Φ₊}` with a chosen Cartan part.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedBasis {
    n: usize,
    items: Vec<(RootLabel, LieElement)>,
}

impl OrderedBasis {
    pub fn new(n: usize, cartan: Vec<LieElement>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension("n must be at least 2".into()));
        }
        if cartan.len() != n - 1 || cartan.iter().any(|h| h.rows() != n || !is_traceless(h)) {
            return Err(Error::Dimension(format!("need {} traceless diagonal matrices", n - 1)));
        }
        let pos = positive_roots(n);
        let mut items = Vec::with_capacity(n * n - 1);
        for &(i, j) in &pos {
            items.push((RootLabel::Pos(i, j), unit(n, i, j)));
        }
        for (k, h) in cartan.into_iter().enumerate() {
            items.push((RootLabel::Cartan(k + 1), h));
        }
        for &(i, j) in &pos {
            items.push((RootLabel::Neg(j, i), unit(n, j, i)));
        }
        let b = OrderedBasis { n, items };
        if crate::scalar::rank(&gram(&b.elements())) != n * n - 1 {
            return Err(Error::DegenerateBasis);
        }
        Ok(b)
    }

    pub fn standard(n: usize) -> Self {
        Self::new(n, standard_cartan(n)).expect("standard Cartan basis is nondegenerate")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(RootLabel, LieElement)] {
        &self.items
    }

    pub fn labels(&self) -> Vec<RootLabel> {
        self.items.iter().map(|(l, _)| *l).collect()
    }

    pub fn elements(&self) -> Vec<LieElement> {
        self.items.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn dual(&self) -> Vec<LieElement> {
        dual_basis(&self.elements()).expect("checked nondegenerate at construction")
    }

    /// Coordinates of a traceless matrix in this basis.
    pub fn coordinates(&self, x: &LieElement) -> Vec<Rational> {
        self.dual().iter().map(|d| trace_form(d, x)).collect()
    }
}

/// `γ = Σ g_β ⊗ g*_β` over the standard basis.
pub fn casimir(n: usize) -> Tensor2 {
    casimir_in(&OrderedBasis::standard(n))
}

/// `γ` computed from an arbitrary ordered basis.
pub fn casimir_in(basis: &OrderedBasis) -> Tensor2 {
    let mut t = Tensor2::zero(basis.n());
    for ((_, g), gd) in basis.items().iter().zip(basis.dual()) {
        t.add_outer(&Polynomial::one(), g, &gd);
    }
    t
}

/// `γ₀ = Σ h_i ⊗ h*_i`, the Cartan summand of `γ`.
pub fn cartan_casimir(n: usize) -> Tensor2 {
    let h = standard_cartan(n);
    let hd = dual_basis(&h).expect("Cartan part of the trace form is nondegenerate");
    let mut t = Tensor2::zero(n);
    for (a, b) in h.iter().zip(&hd) {
        t.add_outer(&Polynomial::one(), a, b);
    }
    t
}

/// `a ∧ b = a⊗b − b⊗a`.
pub fn wedge(a: &LieElement, b: &LieElement) -> Tensor2 {
    let mut t = Tensor2::zero(a.rows());
    t.add_outer(&Polynomial::one(), a, b);
    t.add_outer(&Polynomial::int(-1), b, a);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn sl2_relations() {
        let (e, f) = (unit(2, 1, 2), unit(2, 2, 1));
        let h = unit(2, 1, 1).sub(&unit(2, 2, 2));
        assert_eq!(bracket(&e, &f), h);
        assert!(bracket(&e, &e).is_zero());
        assert_eq!(bracket(&unit(3, 1, 2), &unit(3, 2, 3)), unit(3, 1, 3));
        assert_eq!(trace_form(&e, &f), int(1));
        assert_eq!(trace_form(&h, &h), int(2));
    }

    #[test]
    fn dual_of_off_diagonal_pair() {
        let b = vec![unit(2, 1, 2), unit(2, 2, 1)];
        let d = dual_basis(&b).unwrap();
        assert_eq!(d, vec![unit(2, 2, 1), unit(2, 1, 2)]);
        assert_eq!(dual_basis(&d).unwrap(), b);
    }

    #[test]
    fn degenerate_basis_rejected() {
        let b = vec![unit(2, 1, 2), unit(2, 1, 2)];
        assert_eq!(dual_basis(&b), Err(Error::DegenerateBasis));
    }

    #[test]
    fn wedge_antisymmetry() {
        let (e, f) = (unit(2, 1, 2), unit(2, 2, 1));
        assert!(wedge(&e, &e).is_zero());
        assert!(wedge(&e, &f).add(&wedge(&f, &e)).is_zero());
    }

    #[test]
    fn cartan_casimir_sl2() {
        let h = unit(2, 1, 1).sub(&unit(2, 2, 2));
        let mut expect = Tensor2::zero(2);
        expect.add_outer(&Polynomial::constant(rat(1, 2)), &h, &h);
        assert_eq!(cartan_casimir(2), expect);
    }
}
