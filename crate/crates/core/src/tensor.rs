//! Sparse tensors over `gl_n` with polynomial coefficients, the canonical
//! quasi-trigonometric form, and the exact checks run on it.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::lie::{casimir, positive_roots, unit, wedge};
use crate::scalar::linalg::{inverse, rank};
use crate::scalar::{int, rat, PMatrix, Polynomial, QMatrix, Rational, Var};

/// Matrix unit `e_ij` as a 1-based index pair.
pub type Unit = (u8, u8);

/// `Σ coeff · e_{u1} ⊗ … ⊗ e_{uL}` with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorPoly<const L: usize> {
    n: usize,
    terms: BTreeMap<[Unit; L], Polynomial>,
}

pub type Tensor2 = TensorPoly<2>;
pub type Tensor3 = TensorPoly<3>;

impl<const L: usize> TensorPoly<L> {
    pub fn zero(n: usize) -> Self {
        TensorPoly { n, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Unit; L], &Polynomial)> {
        self.terms.iter()
    }

    pub fn get(&self, key: &[Unit; L]) -> Polynomial {
        self.terms.get(key).cloned().unwrap_or_else(Polynomial::zero)
    }

    pub fn add_term(&mut self, key: [Unit; L], coef: Polynomial) {
        if coef.is_zero() {
            return;
        }
        debug_assert!(key.iter().all(|&(i, j)| i >= 1 && j >= 1 && i as usize <= self.n && j as usize <= self.n));
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += coef;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coef);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n, "rank mismatch");
        for (k, c) in &other.terms {
            self.add_term(*k, c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &Polynomial) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    pub fn substitute(&self, bindings: &[(Var, Polynomial)]) -> Self {
        self.map_coeffs(|c| c.substitute(bindings))
    }

    pub fn rename(&self, map: &[(Var, Var)]) -> Self {
        self.map_coeffs(|c| c.rename(map))
    }

    /// Coefficients evaluated at rational points; all variables must be bound.
    pub fn eval(&self, values: &[(Var, Rational)]) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(*k, Polynomial::constant(c.eval(values)?));
        }
        Ok(out)
    }

    /// Permutes legs: leg `i` of the result is leg `perm[i]` of `self`.
    pub fn permute_legs(&self, perm: [usize; L]) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            let mut nk = *k;
            for (i, &p) in perm.iter().enumerate() {
                nk[i] = k[p];
            }
            out.add_term(nk, c.clone());
        }
        out
    }

    /// Applies a linear map to every leg.
    pub fn map_legs(&self, f: impl Fn(&QMatrix) -> QMatrix) -> Self {
        let n = self.n;
        let mut cache: HashMap<Unit, Vec<(Unit, Rational)>> = HashMap::new();
        let mut image = |u: Unit| -> Vec<(Unit, Rational)> {
            cache
                .entry(u)
                .or_insert_with(|| {
                    let m = f(&unit(n, u.0 as usize, u.1 as usize));
                    m.entries()
                        .filter(|(_, v)| **v != int(0))
                        .map(|((i, j), v)| ((i as u8 + 1, j as u8 + 1), v.clone()))
                        .collect()
                })
                .clone()
        };
        let mut out = Self::zero(n);
        for (k, c) in &self.terms {
            let mut partial: Vec<(Vec<Unit>, Rational)> = vec![(Vec::new(), int(1))];
            for u in k {
                let img = image(*u);
                partial = partial
                    .iter()
                    .flat_map(|(ks, s)| {
                        img.iter().map(move |(v, t)| {
                            let mut nk = ks.clone();
                            nk.push(*v);
                            (nk, s * t)
                        })
                    })
                    .collect();
            }
            for (ks, s) in partial {
                let key: [Unit; L] = ks.try_into().expect("leg count");
                out.add_term(key, c.scale(&s));
            }
        }
        out
    }
}

impl Tensor2 {
    /// Adds `coef · a ⊗ b`.
    pub fn add_outer(&mut self, coef: &Polynomial, a: &QMatrix, b: &QMatrix) {
        for ((i, j), va) in a.entries() {
            if *va == int(0) {
                continue;
            }
            for ((k, l), vb) in b.entries() {
                if *vb == int(0) {
                    continue;
                }
                let key = [(i as u8 + 1, j as u8 + 1), (k as u8 + 1, l as u8 + 1)];
                self.add_term(key, coef.scale(&(va * vb)));
            }
        }
    }

    /// Adds `a ⊗ b` for matrices with polynomial entries.
    pub fn add_outer_poly(&mut self, a: &PMatrix, b: &PMatrix) {
        for ((i, j), va) in a.entries() {
            if va.is_zero() {
                continue;
            }
            for ((k, l), vb) in b.entries() {
                if vb.is_zero() {
                    continue;
                }
                let key = [(i as u8 + 1, j as u8 + 1), (k as u8 + 1, l as u8 + 1)];
                self.add_term(key, va * vb);
            }
        }
    }

    pub fn outer(a: &QMatrix, b: &QMatrix) -> Self {
        let mut t = Tensor2::zero(a.rows());
        t.add_outer(&Polynomial::one(), a, b);
        t
    }

    /// Leg swap `a⊗b ↦ b⊗a`, coefficients untouched.
    pub fn swap(&self) -> Self {
        self.permute_legs([1, 0])
    }

    /// `t(x, y) ↦ t^{21}(y, x)`.
    pub fn flip(&self) -> Self {
        self.swap().rename(&[(Var::X, Var::Y), (Var::Y, Var::X)])
    }

    /// `n²×n²` coefficient matrix; rows index the first leg.
    pub fn coefficient_matrix(&self) -> Result<QMatrix> {
        let n = self.n;
        let mut m = QMatrix::zeros(n * n, n * n);
        for ([(i, j), (k, l)], c) in &self.terms {
            let v = c
                .constant_value()
                .ok_or_else(|| Error::Internal("coefficient matrix of a non-constant tensor".into()))?;
            m[((*i as usize - 1) * n + *j as usize - 1, (*k as usize - 1) * n + *l as usize - 1)] = v;
        }
        Ok(m)
    }

    /// `Σ c · tr(x · a) · b` for terms `c · a ⊗ b`.
    pub fn contract_first(&self, x: &QMatrix) -> PMatrix {
        let n = self.n;
        let mut out = PMatrix::zeros(n, n);
        for ([(i, j), (k, l)], c) in &self.terms {
            let w = &x[(*j as usize - 1, *i as usize - 1)];
            if *w != int(0) {
                let e = &mut out[(*k as usize - 1, *l as usize - 1)];
                *e += c.scale(w);
            }
        }
        out
    }
}

/// Product of two 2-leg tensors embedded in the triple tensor power.
/// `la` and `lb` name the legs each factor occupies; they share exactly one.
fn embedded_product(a: &Tensor2, la: [usize; 2], b: &Tensor2, lb: [usize; 2]) -> Tensor3 {
    let n = a.n();
    let shared = *la.iter().find(|l| lb.contains(l)).expect("embeddings share a leg");
    let pa = la.iter().position(|&l| l == shared).unwrap();
    let pb = lb.iter().position(|&l| l == shared).unwrap();
    let mut by_row: Vec<Vec<(&[Unit; 2], &Polynomial)>> = vec![Vec::new(); n + 1];
    for (k, c) in b.terms() {
        by_row[k[pb].0 as usize].push((k, c));
    }
    let mut out = Tensor3::zero(n);
    for (ka, ca) in a.terms() {
        let (ri, rj) = ka[pa];
        for (kb, cb) in &by_row[rj as usize] {
            let mut key = [(0u8, 0u8); 3];
            key[la[0]] = ka[0];
            key[la[1]] = ka[1];
            key[lb[1 - pb]] = kb[1 - pb];
            key[shared] = (ri, kb[pb].1);
            out.add_term(key, ca * *cb);
        }
    }
    out
}

fn embedded_commutator(a: &Tensor2, la: [usize; 2], b: &Tensor2, lb: [usize; 2]) -> Tensor3 {
    embedded_product(a, la, b, lb).sub(&embedded_product(b, lb, a, la))
}

/// `r(x, y) = x/(y−x)·γ + p(x, y)`, storing only `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiTrigR {
    n: usize,
    p: Tensor2,
}

impl QuasiTrigR {
    pub fn new(p: Tensor2) -> Self {
        QuasiTrigR { n: p.n(), p }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &Tensor2 {
        &self.p
    }

    pub fn into_p(self) -> Tensor2 {
        self.p
    }

    /// `N(a, b) = a·γ + (b − a)·p(a, b)`, so that `r(a, b) = N / (b − a)`.
    pub fn numerator(&self, a: Var, b: Var) -> Tensor2 {
        let pa = Polynomial::var(a);
        let pb = Polynomial::var(b);
        let gamma = casimir(self.n).scale(&pa);
        let p = self.p.substitute(&[(Var::X, pa.clone()), (Var::Y, pb.clone())]);
        gamma.add(&p.scale(&(&pb - &pa)))
    }

    /// Rational value `r(x0, y0)`.
    pub fn value_at(&self, x0: &Rational, y0: &Rational) -> Result<Tensor2> {
        if x0 == y0 {
            return Err(Error::Pole);
        }
        let s = x0 / (y0 - x0);
        let p = self.p.eval(&[(Var::X, x0.clone()), (Var::Y, y0.clone())])?;
        Ok(casimir(self.n).scale_rational(&s).add(&p))
    }
}

pub fn r_standard(n: usize) -> QuasiTrigR {
    let mut p = casimir(n);
    for (i, j) in positive_roots(n) {
        p.add_assign(&wedge(&unit(n, i, j), &unit(n, j, i)));
    }
    QuasiTrigR::new(p.scale_rational(&rat(1, 2)))
}

/// Numerator of the CYBE over `(x2−x1)(x3−x1)(x3−x2)`, in `x1, x2, x3`.
pub fn cybe_residual(r: &QuasiTrigR) -> Tensor3 {
    let n12 = r.numerator(Var::X1, Var::X2);
    let n13 = r.numerator(Var::X1, Var::X3);
    let n23 = r.numerator(Var::X2, Var::X3);
    let d = |a: Var, b: Var| &Polynomial::var(b) - &Polynomial::var(a);
    let t1 = embedded_commutator(&n12, [0, 1], &n13, [0, 2]).scale(&d(Var::X2, Var::X3));
    let t2 = embedded_commutator(&n13, [0, 2], &n23, [1, 2]).scale(&d(Var::X1, Var::X2));
    let t3 = embedded_commutator(&n12, [0, 1], &n23, [1, 2]).scale(&d(Var::X1, Var::X3));
    t1.add(&t2).add(&t3)
}

/// `p(x, y) + p^{21}(y, x) = γ`.
pub fn check_skew(r: &QuasiTrigR) -> bool {
    r.p.add(&r.p.flip()) == casimir(r.n)
}

/// Rank test of `r(x0, y0)` viewed as a map `sl_n* → sl_n`.
pub fn nondegenerate_at(r: &QuasiTrigR, x0: &Rational, y0: &Rational) -> Result<bool> {
    let v = r.value_at(x0, y0)?;
    Ok(rank(&v.coefficient_matrix()?) == r.n * r.n - 1)
}

/// `δ_r(P) = [P(x1)⊗1 + 1⊗P(x2), r(x1, x2)]` for `P = Σ z^k P_k`.
pub fn cobracket(r: &QuasiTrigR, p: &[(u16, QMatrix)]) -> Result<Tensor2> {
    let n = r.n;
    let num = r.numerator(Var::X1, Var::X2);
    let mut acc = Tensor2::zero(n);
    for ([u, v], c) in num.terms() {
        let eu = unit(n, u.0 as usize, u.1 as usize);
        let ev = unit(n, v.0 as usize, v.1 as usize);
        for (k, pk) in p {
            let x1k = c * &Polynomial::monomial(int(1), &[(Var::X1, *k)]);
            let x2k = c * &Polynomial::monomial(int(1), &[(Var::X2, *k)]);
            acc.add_outer(&x1k, &pk.commutator(&eu), &ev);
            acc.add_outer(&x2k, &eu, &pk.commutator(&ev));
        }
    }
    let mut out = Tensor2::zero(n);
    for (key, c) in acc.terms() {
        let q = c.div_by_difference(Var::X1, Var::X2).ok_or(Error::CobracketNotPolynomial)?;
        out.add_term(*key, q);
    }
    Ok(out)
}

/// `Alt((δ⊗id)∘δ)(P)`; vanishes when `δ` satisfies co-Jacobi.
pub fn co_jacobi(r: &QuasiTrigR, p: &[(u16, QMatrix)]) -> Result<Tensor3> {
    let n = r.n;
    let first = cobracket(r, p)?.rename(&[(Var::X2, Var::X3)]);
    let mut cache: HashMap<(u16, Unit), Tensor2> = HashMap::new();
    let mut t = Tensor3::zero(n);
    for ([u, v], c) in first.terms() {
        for (m, coef) in c.terms() {
            let a = m.exp(Var::X1);
            let inner = match cache.get(&(a, *u)) {
                Some(t) => t.clone(),
                None => {
                    let d = cobracket(r, &[(a, unit(n, u.0 as usize, u.1 as usize))])?;
                    cache.insert((a, *u), d.clone());
                    d
                }
            };
            let rest = Polynomial::monomial(coef.clone(), &[(Var::X3, m.exp(Var::X3))]);
            for ([u1, u2], d) in inner.terms() {
                t.add_term([*u1, *u2, *v], d * &rest);
            }
        }
    }
    let cyc =
        |s: &Tensor3| s.permute_legs([2, 0, 1]).rename(&[(Var::X1, Var::X2), (Var::X2, Var::X3), (Var::X3, Var::X1)]);
    let t1 = cyc(&t);
    let t2 = cyc(&t1);
    Ok(t.add(&t1).add(&t2))
}

/// `(Ad_g ⊗ Ad_g) r`; only `p` changes since `γ` is invariant.
pub fn gauge_constant(r: &QuasiTrigR, g: &QMatrix) -> Result<QuasiTrigR> {
    let gi = inverse(g)?;
    Ok(QuasiTrigR::new(r.p.map_legs(|m| g.mul(m).mul(&gi))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_sl2_is_a_solution() {
        let r = r_standard(2);
        assert!(check_skew(&r));
        assert!(cybe_residual(&r).is_zero());
        assert!(nondegenerate_at(&r, &int(1), &int(2)).unwrap());
        assert_eq!(nondegenerate_at(&r, &int(1), &int(1)), Err(Error::Pole));
    }

    #[test]
    fn perturbed_standard_fails() {
        let mut p = r_standard(2).into_p();
        p.add_term([(1, 2), (1, 2)], Polynomial::one());
        let r = QuasiTrigR::new(p);
        assert!(!check_skew(&r));
        assert!(!cybe_residual(&r).is_zero());
    }

    #[test]
    fn permute_legs_round_trip() {
        let mut t = Tensor3::zero(2);
        t.add_term([(1, 2), (2, 1), (1, 1)], Polynomial::var(Var::X1));
        let back = t.permute_legs([2, 0, 1]).permute_legs([1, 2, 0]);
        assert_eq!(back, t);
    }
}
