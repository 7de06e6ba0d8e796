//! The loop double `𝔇 = 𝔤((z⁻¹)) × 𝔤` in a finite `z`-degree window.
//!
//! An element `(F, f)` keeps the Laurent coefficients of `F` for degrees in
//! `[lo, hi]` together with the finite component `f`. A Lagrangian-order
//! candidate is a finite window basis plus a tail rule
//! `z^{≤t}𝔤⟦z⁻¹⟧ × {0} ⊆ W`; the tail is never materialised beyond the slice
//! that falls inside the window.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sharp, BlockShape};
use crate::lie::{self, positive_roots, unit, OrderedBasis, RootLabel};
use crate::roots::{cartan_shift_basis, exit_times, ShiftData};
use crate::scalar::linalg::{kernel, rank, rref, solve_unique_multi};
use crate::scalar::{int, rat, rational, Polynomial, QMatrix, Rational, Var};
use crate::tensor::{r_standard, QuasiTrigR, Tensor2};

/// Default working window.
pub const DEFAULT_WINDOW: (i32, i32) = (-3, 3);

fn is_zero_q(r: &Rational) -> bool {
    *r == int(0)
}

/// `(F, f)` truncated to `F`-degrees `lo..=hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedLoopPair {
    n: usize,
    lo: i32,
    hi: i32,
    big: Vec<QMatrix>,
    small: QMatrix,
}

impl WindowedLoopPair {
    pub fn zero(n: usize, (lo, hi): (i32, i32)) -> Self {
        assert!(lo <= 0 && 0 <= hi, "window must contain degree 0");
        WindowedLoopPair {
            n,
            lo,
            hi,
            big: vec![QMatrix::zeros(n, n); (hi - lo + 1) as usize],
            small: QMatrix::zeros(n, n),
        }
    }

    /// `(z^k X, 0)`.
    pub fn loop_monomial(window: (i32, i32), k: i32, x: &QMatrix) -> Result<Self> {
        let mut w = Self::zero(x.rows(), window);
        w.set_big(k, x.clone())?;
        Ok(w)
    }

    /// `(0, x)`.
    pub fn finite(window: (i32, i32), x: &QMatrix) -> Self {
        let mut w = Self::zero(x.rows(), window);
        w.small = x.clone();
        w
    }

    /// `(P(z), P(0))` for `P = Σ z^k coeffs[k]`.
    pub fn jmath(window: (i32, i32), coeffs: &[QMatrix]) -> Result<Self> {
        let n = coeffs.first().map_or(0, |m| m.rows());
        let mut w = Self::zero(n, window);
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            w.set_big(k as i32, c.clone())?;
        }
        if let Some(c0) = coeffs.first() {
            w.small = c0.clone();
        }
        Ok(w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn in_window(&self, k: i32) -> bool {
        self.lo <= k && k <= self.hi
    }

    /// Coefficient of `z^k` in `F` (zero outside the window).
    pub fn big(&self, k: i32) -> QMatrix {
        if self.in_window(k) {
            self.big[(k - self.lo) as usize].clone()
        } else {
            QMatrix::zeros(self.n, self.n)
        }
    }

    fn big_ref(&self, k: i32) -> &QMatrix {
        &self.big[(k - self.lo) as usize]
    }

    pub fn set_big(&mut self, k: i32, x: QMatrix) -> Result<()> {
        if !self.in_window(k) {
            return Err(Error::WindowTooNarrow(format!("degree {k} outside [{}, {}]", self.lo, self.hi)));
        }
        self.big[(k - self.lo) as usize] = x;
        Ok(())
    }

    pub fn small(&self) -> &QMatrix {
        &self.small
    }

    pub fn set_small(&mut self, x: QMatrix) {
        self.small = x;
    }

    /// Degrees carrying a nonzero coefficient of `F`.
    pub fn support(&self) -> Vec<i32> {
        (self.lo..=self.hi).filter(|&k| !self.big_ref(k).is_zero()).collect()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.support().last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.small.is_zero() && self.big.iter().all(|m| m.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        WindowedLoopPair {
            n: self.n,
            lo: self.lo,
            hi: self.hi,
            big: self.big.iter().zip(&other.big).map(|(a, b)| a.add(b)).collect(),
            small: self.small.add(&other.small),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        WindowedLoopPair {
            n: self.n,
            lo: self.lo,
            hi: self.hi,
            big: self.big.iter().map(|m| m.scale(s)).collect(),
            small: self.small.scale(s),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!((self.n, self.lo, self.hi), (other.n, other.lo, other.hi), "incompatible windows");
    }

    /// Flat `gl_n` coordinates: `F` degrees `lo..=hi`, then `f`.
    pub fn coords(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity((self.big.len() + 1) * self.n * self.n);
        for m in self.big.iter().chain(std::iter::once(&self.small)) {
            for (_, e) in m.entries() {
                v.push(e.clone());
            }
        }
        v
    }

    pub fn from_coords(n: usize, window: (i32, i32), v: &[Rational]) -> Self {
        let mut w = Self::zero(n, window);
        let nn = n * n;
        assert_eq!(v.len(), (w.big.len() + 1) * nn, "coordinate length");
        let to_m = |chunk: &[Rational]| QMatrix::from_fn(n, n, |i, j| chunk[i * n + j].clone());
        for (s, m) in w.big.iter_mut().enumerate() {
            *m = to_m(&v[s * nn..(s + 1) * nn]);
        }
        let off = w.big.len() * nn;
        w.small = to_m(&v[off..off + nn]);
        w
    }

    /// Bracket `([F₁, F₂], [f₁, f₂])`. Components of degree `≤ drop_upto`
    /// are discarded; any other component outside the window is an error.
    pub fn bracket(&self, other: &Self, drop_upto: Option<i32>) -> Result<Self> {
        self.check_compatible(other);
        let mut out = Self::zero(self.n, (self.lo, self.hi));
        let mut acc: BTreeMap<i32, QMatrix> = BTreeMap::new();
        for i in self.support() {
            for j in other.support() {
                let c = self.big_ref(i).commutator(other.big_ref(j));
                if c.is_zero() {
                    continue;
                }
                let e = acc.entry(i + j).or_insert_with(|| QMatrix::zeros(self.n, self.n));
                *e = e.add(&c);
            }
        }
        for (k, m) in acc {
            if m.is_zero() || drop_upto.is_some_and(|t| k <= t) {
                continue;
            }
            out.set_big(k, m)?;
        }
        out.small = self.small.commutator(&other.small);
        Ok(out)
    }
}

/// `res₀ Tr(F₁F₂) dz/z − tr(f₁f₂)`.
pub fn loop_pairing(a: &WindowedLoopPair, b: &WindowedLoopPair) -> Result<Rational> {
    if a.n != b.n {
        return Err(Error::Dimension("pairing of different ranks".into()));
    }
    let mut acc = int(0);
    for k in a.support() {
        if !b.in_window(-k) {
            return Err(Error::WindowTooNarrow(format!("degree {k} pairs against degree {} outside window", -k)));
        }
        acc += lie::trace_form(a.big_ref(k), b.big_ref(-k));
    }
    for k in b.support() {
        if !a.in_window(-k) {
            return Err(Error::WindowTooNarrow(format!("degree {k} pairs against degree {} outside window", -k)));
        }
    }
    acc -= lie::trace_form(&a.small, &b.small);
    Ok(acc)
}

/// Finitely presented Lagrangian-order candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpec {
    pub name: String,
    pub n: usize,
    pub window: (i32, i32),
    pub basis: Vec<WindowedLoopPair>,
    /// `z^{≤t}𝔤⟦z⁻¹⟧ × {0} ⊆ W` when present.
    pub tail_degree: Option<i32>,
}

impl OrderSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if lo > 0 || hi < 0 {
            return Err(Error::WindowTooNarrow(format!("window [{lo}, {hi}] must contain 0")));
        }
        for (i, b) in self.basis.iter().enumerate() {
            if b.n != self.n || b.window() != self.window {
                return Err(Error::Dimension(format!("basis element {i} has the wrong rank or window")));
            }
            if !lie::is_traceless(&b.small) || b.big.iter().any(|m| !lie::is_traceless(m)) {
                return Err(Error::Dimension(format!("basis element {i} is not traceless")));
            }
        }
        if let Some(t) = self.tail_degree {
            if t >= 0 {
                return Err(Error::Dimension(format!("tail degree {t} must be negative")));
            }
        }
        let m = coords_matrix(self.n, self.window, &self.basis);
        if rank(&m) != self.basis.len() {
            return Err(Error::Dimension("window basis is linearly dependent".into()));
        }
        Ok(())
    }

    /// Tail generators `(z^k e, 0)` with `lo ≤ k ≤ t`.
    pub fn tail_slice(&self) -> Vec<WindowedLoopPair> {
        let Some(t) = self.tail_degree else {
            return Vec::new();
        };
        let sl = OrderedBasis::standard(self.n).elements();
        let mut out = Vec::new();
        for k in self.window.0..=t.min(self.window.1) {
            for g in &sl {
                out.push(WindowedLoopPair::loop_monomial(self.window, k, g).unwrap());
            }
        }
        out
    }

    fn basis_with_tail(&self) -> Vec<WindowedLoopPair> {
        let mut v = self.basis.clone();
        v.extend(self.tail_slice());
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m2s = |m: &QMatrix| -> Vec<Vec<String>> {
            (0..m.rows()).map(|i| m.row(i).iter().map(rational::render).collect()).collect()
        };
        let basis: Vec<PairJson> = self
            .basis
            .iter()
            .map(|b| PairJson {
                big: b.support().into_iter().map(|k| (k.to_string(), m2s(b.big_ref(k)))).collect(),
                small: m2s(&b.small),
            })
            .collect();
        serde_json::to_value(OrderSpecJson {
            name: self.name.clone(),
            n: self.n,
            window: [self.window.0, self.window.1],
            tail_degree: self.tail_degree,
            basis,
        })
        .expect("serialisable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: OrderSpecJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("order spec: {e}")))?;
        let window = (raw.window[0], raw.window[1]);
        if window.0 > 0 || window.1 < 0 {
            return Err(Error::WindowTooNarrow(format!("window {:?} must contain 0", raw.window)));
        }
        let n = raw.n;
        let parse_m = |rows: &Vec<Vec<String>>| -> Result<QMatrix> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Dimension(format!("expected a {n}×{n} matrix")));
            }
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            QMatrix::from_rows(parsed)
        };
        let mut basis = Vec::with_capacity(raw.basis.len());
        for b in &raw.basis {
            let mut w = WindowedLoopPair::zero(n, window);
            for (k, rows) in &b.big {
                let k: i32 = k.parse().map_err(|_| Error::Parse(format!("bad degree `{k}`")))?;
                w.set_big(k, parse_m(rows)?)?;
            }
            w.small = parse_m(&b.small)?;
            basis.push(w);
        }
        let spec = OrderSpec { name: raw.name, n, window, basis, tail_degree: raw.tail_degree };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    #[serde(rename = "F", default)]
    big: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(rename = "f")]
    small: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct OrderSpecJson {
    name: String,
    n: usize,
    window: [i32; 2],
    tail_degree: Option<i32>,
    basis: Vec<PairJson>,
}

fn coords_matrix(n: usize, window: (i32, i32), vs: &[WindowedLoopPair]) -> QMatrix {
    let rows = ((window.1 - window.0 + 2) as usize) * n * n;
    let cols: Vec<Vec<Rational>> = vs.iter().map(|v| v.coords()).collect();
    QMatrix::from_cols(rows, &cols).expect("uniform coordinates")
}

/// Triangular pieces of the standard decomposition.
fn strictly_upper(n: usize) -> Vec<QMatrix> {
    positive_roots(n).into_iter().map(|(i, j)| unit(n, i, j)).collect()
}

fn strictly_lower(n: usize) -> Vec<QMatrix> {
    positive_roots(n).into_iter().map(|(i, j)| unit(n, j, i)).collect()
}

fn require_window(window: (i32, i32), need: i32) -> Result<()> {
    if window.0 > -need || window.1 < need {
        return Err(Error::WindowTooNarrow(format!(
            "window [{}, {}] must contain [-{need}, {need}]",
            window.0, window.1
        )));
    }
    Ok(())
}

/// `W_∘ = z⁻¹𝔤⟦z⁻¹⟧×{0} + 𝔫₋×{0} + {0}×𝔫₊ + Δ_𝔥`.
pub fn order_w_std(n: usize, window: (i32, i32)) -> Result<OrderSpec> {
    require_window(window, 1)?;
    let mut basis = Vec::new();
    for m in strictly_lower(n) {
        basis.push(WindowedLoopPair::loop_monomial(window, 0, &m)?);
    }
    for m in strictly_upper(n) {
        basis.push(WindowedLoopPair::finite(window, &m));
    }
    for h in lie::standard_cartan(n) {
        let mut w = WindowedLoopPair::loop_monomial(window, 0, &h)?;
        w.small = h.scale(&int(-1));
        basis.push(w);
    }
    for g in OrderedBasis::standard(n).elements() {
        basis.push(WindowedLoopPair::loop_monomial(window, -1, &g)?);
    }
    Ok(OrderSpec { name: "W_std".into(), n, window, basis, tail_degree: Some(-2) })
}

/// Traceless basis of `𝔟_(c,d) = [[A, 0], [C, D]]`.
pub fn b_cd_basis(shape: BlockShape) -> Vec<QMatrix> {
    let (c, n) = (shape.c(), shape.n());
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && !(i <= c && j > c) {
                out.push(unit(n, i, j));
            }
        }
    }
    out.extend(lie::standard_cartan(n));
    out
}

/// Basis of `𝔫_(c,d) = [[0, 0], [C, 0]]`.
pub fn n_cd_basis(shape: BlockShape) -> Vec<QMatrix> {
    let (c, n) = (shape.c(), shape.n());
    let mut out = Vec::new();
    for i in c + 1..=n {
        for j in 1..=c {
            out.push(unit(n, i, j));
        }
    }
    out
}

/// `([[A, z⁻¹B], [zC, D]], X^♯)`.
pub fn twisted_lift(shape: BlockShape, window: (i32, i32), x: &QMatrix) -> Result<WindowedLoopPair> {
    let (c, n) = (shape.c(), shape.n());
    let mut w = WindowedLoopPair::zero(n, window);
    let mut parts = [QMatrix::zeros(n, n), QMatrix::zeros(n, n), QMatrix::zeros(n, n)];
    for i in 0..n {
        for j in 0..n {
            let slot = match (i < c, j < c) {
                (true, false) => 0,
                (false, true) => 2,
                _ => 1,
            };
            parts[slot][(i, j)] = x[(i, j)].clone();
        }
    }
    for (k, m) in parts.into_iter().enumerate() {
        if !m.is_zero() {
            w.set_big(k as i32 - 1, m)?;
        }
    }
    w.small = sharp(shape, x);
    Ok(w)
}

/// `W_(c,d) = (z⁻²𝔤⟦z⁻¹⟧ + z⁻¹𝔟 + 𝔫) × {0} + Δ̃_(c,d)`.
pub fn order_w_cd(s: &ShiftData, window: (i32, i32)) -> Result<OrderSpec> {
    require_window(window, 2)?;
    let shape = BlockShape::from(*s);
    let n = s.n();
    let sl = OrderedBasis::standard(n).elements();
    let mut basis = Vec::new();
    for g in &sl {
        basis.push(WindowedLoopPair::loop_monomial(window, -2, g)?);
    }
    for b in b_cd_basis(shape) {
        basis.push(WindowedLoopPair::loop_monomial(window, -1, &b)?);
    }
    for m in n_cd_basis(shape) {
        basis.push(WindowedLoopPair::loop_monomial(window, 0, &m)?);
    }
    for g in &sl {
        basis.push(twisted_lift(shape, window, g)?);
    }
    Ok(OrderSpec { name: format!("W_({},{})", s.c(), s.d()), n, window, basis, tail_degree: Some(-3) })
}

/// Pairwise isotropy of window basis and tail slice, plus the degree rule
/// that makes deeper tail pairings vanish.
pub fn check_isotropic(w: &OrderSpec) -> Result<bool> {
    w.validate()?;
    if let Some(t) = w.tail_degree {
        if w.basis.iter().any(|b| b.max_degree().is_some_and(|k| k >= -t)) {
            return Ok(false);
        }
    }
    let all = w.basis_with_tail();
    for i in 0..all.len() {
        for j in i..all.len() {
            if !is_zero_q(&loop_pairing(&all[i], &all[j])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// 𝔓 generators `(z^k g, δ_{k0} g)` for `0 ≤ k ≤ hi`.
pub fn p_window(basis: &OrderedBasis, window: (i32, i32)) -> Vec<(i32, RootLabel, WindowedLoopPair)> {
    let mut out = Vec::new();
    for k in 0..=window.1 {
        for (label, g) in basis.items() {
            let mut coeffs = vec![QMatrix::zeros(basis.n(), basis.n()); k as usize + 1];
            coeffs[k as usize] = g.clone();
            out.push((k, *label, WindowedLoopPair::jmath(window, &coeffs).unwrap()));
        }
    }
    out
}

fn transversal_matrix(w: &OrderSpec, basis: &OrderedBasis) -> (QMatrix, usize) {
    let mut cols = w.basis_with_tail();
    let nw = cols.len();
    cols.extend(p_window(basis, w.window).into_iter().map(|(_, _, g)| g));
    (coords_matrix(w.n, w.window, &cols), nw)
}

/// `𝔇 = 𝔓 ∔ W` within the window: the combined columns form a basis of the
/// windowed coordinate space of `sl_n`-valued pairs.
pub fn check_transversal(w: &OrderSpec) -> Result<bool> {
    w.validate()?;
    let (m, _) = transversal_matrix(w, &OrderedBasis::standard(w.n));
    let slots = (w.window.1 - w.window.0 + 2) as usize;
    let dim = slots * (w.n * w.n - 1);
    Ok(m.cols() == dim && rank(&m) == dim)
}

/// Bracket closure of the window basis and of tail generators against it,
/// modulo the tail. Certifies only what the window can see.
pub fn check_bracket_closed(w: &OrderSpec) -> Result<bool> {
    w.validate()?;
    let t = w.tail_degree;
    let reduce = |v: &WindowedLoopPair| -> WindowedLoopPair {
        let mut r = v.clone();
        if let Some(t) = t {
            for k in r.lo..=t.min(r.hi) {
                r.big[(k - r.lo) as usize] = QMatrix::zeros(r.n, r.n);
            }
        }
        r
    };
    let reduced: Vec<WindowedLoopPair> = w.basis.iter().map(reduce).collect();
    let nonzero: Vec<WindowedLoopPair> = reduced.into_iter().filter(|r| !r.is_zero()).collect();
    let ann = if nonzero.is_empty() { None } else { Some(kernel(&coords_matrix(w.n, w.window, &nonzero).transpose())) };
    let in_span = |v: &WindowedLoopPair| -> bool {
        if v.is_zero() {
            return true;
        }
        let Some(ann) = &ann else { return false };
        let c = v.coords();
        let support: Vec<usize> = (0..c.len()).filter(|&i| !is_zero_q(&c[i])).collect();
        ann.iter().all(|a| is_zero_q(&support.iter().fold(int(0), |acc, &i| acc + &a[i] * &c[i])))
    };
    for i in 0..w.basis.len() {
        for j in i + 1..w.basis.len() {
            let b = w.basis[i].bracket(&w.basis[j], t)?;
            if !in_span(&reduce(&b)) {
                return Ok(false);
            }
        }
    }
    if let Some(t) = t {
        let maxdeg = w.basis.iter().filter_map(|b| b.max_degree()).max().unwrap_or(0);
        let sl = OrderedBasis::standard(w.n).elements();
        for k in (w.window.0.max(t - maxdeg + 1))..=t {
            for g in &sl {
                let z = WindowedLoopPair::loop_monomial(w.window, k, g)?;
                for b in &w.basis {
                    if !in_span(&reduce(&z.bracket(b, Some(t))?)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Dual of `g_(k,β)` inside the standard order `W_∘`.
pub fn w_circ(basis: &OrderedBasis, window: (i32, i32), k: i32, label: RootLabel) -> Result<WindowedLoopPair> {
    let idx = basis
        .labels()
        .iter()
        .position(|l| *l == label)
        .ok_or_else(|| Error::Dimension(format!("{label:?} not in basis")))?;
    let n = basis.n();
    if k >= 1 {
        let dual = &basis.dual()[idx];
        return WindowedLoopPair::loop_monomial(window, -k, dual);
    }
    Ok(match label {
        RootLabel::Pos(i, j) => WindowedLoopPair::loop_monomial(window, 0, &unit(n, j, i))?,
        RootLabel::Neg(i, j) => WindowedLoopPair::finite(window, &unit(n, j, i).scale(&int(-1))),
        RootLabel::Cartan(_) => {
            // h* taken among the Cartan duals only
            let cartan: Vec<QMatrix> = basis
                .items()
                .iter()
                .filter(|(l, _)| matches!(l, RootLabel::Cartan(_)))
                .map(|(_, m)| m.clone())
                .collect();
            let pos = basis.labels()[..idx].iter().filter(|l| matches!(l, RootLabel::Cartan(_))).count();
            let hd = lie::dual_basis(&cartan)?[pos].scale(&rat(1, 2));
            let mut w = WindowedLoopPair::loop_monomial(window, 0, &hd)?;
            w.small = hd.scale(&int(-1));
            w
        }
    })
}

/// `w_(k,β) ∈ W` dual to `g_(k,β)`, split as `w° = w − p` with `p ∈ 𝔓`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement {
    pub k: i32,
    pub label: RootLabel,
    pub w: WindowedLoopPair,
    /// Coefficients of `p(z)`, degree `0..=hi`.
    pub p: Vec<QMatrix>,
}

impl DualElement {
    pub fn p_poly(&self, var: Var) -> crate::scalar::PMatrix {
        let n = self.w.n();
        let mut m = crate::scalar::PMatrix::zeros(n, n);
        for (k, c) in self.p.iter().enumerate() {
            let zk = Polynomial::monomial(int(1), &[(var, k as u16)]);
            m = m.add(&c.map(|v| zk.scale(v)));
        }
        m
    }
}

/// Degrees `k` for which the dual element can differ from `w°`.
fn relevant_degrees(w: &OrderSpec) -> Result<Vec<i32>> {
    let t = w
        .tail_degree
        .ok_or_else(|| Error::TransversalityViolated("no tail: duals are not finitely determined".into()))?;
    let kmax = -t - 1;
    if -kmax < w.window.0 {
        return Err(Error::WindowTooNarrow(format!("need degree {} in window", -kmax)));
    }
    Ok((0..=kmax).collect())
}

/// All dual elements for degrees that are not absorbed by the tail.
pub fn dual_elements(w: &OrderSpec, basis: &OrderedBasis) -> Result<Vec<DualElement>> {
    w.validate()?;
    let (m, nw) = transversal_matrix(w, basis);
    let slots = (w.window.1 - w.window.0 + 2) as usize;
    if m.cols() != slots * (w.n * w.n - 1) {
        return Err(Error::TransversalityViolated(format!(
            "{} columns for a {}-dimensional window",
            m.cols(),
            slots * (w.n * w.n - 1)
        )));
    }
    let degrees = relevant_degrees(w)?;
    let mut targets = Vec::new();
    for &k in &degrees {
        for label in basis.labels() {
            targets.push((k, label, w_circ(basis, w.window, k, label)?));
        }
    }
    let rhs: Vec<Vec<Rational>> = targets.iter().map(|(_, _, t)| t.coords()).collect();
    let sols = solve_unique_multi(&m, &rhs).map_err(|e| match e {
        Error::Singular => Error::TransversalityViolated("W and 𝔓 intersect inside the window".into()),
        Error::Internal(msg) => Error::WindowTooNarrow(msg),
        other => other,
    })?;
    let all_cols = w.basis_with_tail();
    let pgens = p_window(basis, w.window);
    let mut out = Vec::with_capacity(targets.len());
    for ((k, label, _), sol) in targets.into_iter().zip(sols) {
        let mut wv = WindowedLoopPair::zero(w.n, w.window);
        for (a, col) in sol[..nw].iter().zip(&all_cols) {
            if !is_zero_q(a) {
                wv = wv.add(&col.scale(a));
            }
        }
        let mut p = vec![QMatrix::zeros(w.n, w.n); w.window.1 as usize + 1];
        for (c, (deg, _, g)) in sol[nw..].iter().zip(&pgens) {
            if !is_zero_q(c) {
                // w° = w + Σ c·g, so p = −Σ c·g
                let gm = g.big(*deg).scale(&-c.clone());
                p[*deg as usize] = p[*deg as usize].add(&gm);
            }
        }
        for (k2, l2, g) in &pgens {
            if !g.in_window(-*k2) {
                continue;
            }
            let expect = if (*k2, *l2) == (k, label) { int(1) } else { int(0) };
            if loop_pairing(g, &wv)? != expect {
                return Err(Error::Internal(format!("duality fails for ({k}, {label:?}) against ({k2}, {l2:?})")));
            }
        }
        out.push(DualElement { k, label, w: wv, p });
    }
    Ok(out)
}

/// One dual element; degrees below the tail return `(w°, 0)` directly.
pub fn dual_basis_element(w: &OrderSpec, basis: &OrderedBasis, k: i32, label: RootLabel) -> Result<DualElement> {
    if let Some(t) = w.tail_degree {
        if -k <= t {
            let wc = w_circ(basis, w.window, k, label)?;
            return Ok(DualElement { k, label, w: wc, p: vec![QMatrix::zeros(w.n, w.n); w.window.1 as usize + 1] });
        }
    }
    dual_elements(w, basis)?
        .into_iter()
        .find(|d| d.k == k && d.label == label)
        .ok_or_else(|| Error::Dimension(format!("no dual element for ({k}, {label:?})")))
}

/// `r_W = r_st + Σ x^k g_β ⊗ p_(k,β)(y)`.
pub fn r_from_order(w: &OrderSpec) -> Result<QuasiTrigR> {
    if !check_isotropic(w)? {
        return Err(Error::TransversalityViolated(format!("{} is not isotropic", w.name)));
    }
    if !check_transversal(w)? {
        return Err(Error::TransversalityViolated(format!("{} is not transversal to 𝔓", w.name)));
    }
    let basis = OrderedBasis::standard(w.n);
    r_from_duals(w.n, &basis, &dual_elements(w, &basis)?)
}

fn r_from_duals(n: usize, basis: &OrderedBasis, duals: &[DualElement]) -> Result<QuasiTrigR> {
    let mut p = r_standard(n).into_p();
    for d in duals {
        let idx = basis.labels().iter().position(|l| *l == d.label).unwrap();
        let g = basis.items()[idx].1.map(|v| Polynomial::constant(v.clone()));
        let xk = Polynomial::monomial(int(1), &[(Var::X, d.k as u16)]);
        let mut t = Tensor2::zero(n);
        t.add_outer_poly(&g.map(|v| v * &xk), &d.p_poly(Var::Y));
        p.add_assign(&t);
    }
    Ok(QuasiTrigR::new(p))
}

/// Closed-form `p_(k,β)` for `W_(c,d)` in the basis with Cartan part `h_i = q*_i`,
/// keyed by `(k, label)`; absent keys mean `p = 0`.
pub fn claims_table(s: &ShiftData) -> BTreeMap<(i32, RootLabel), Vec<QMatrix>> {
    let n = s.n();
    let e = |r: (usize, usize)| unit(n, r.0, r.1);
    let mut out = BTreeMap::new();
    for (i, j) in positive_roots(n) {
        let ex = exit_times(s, RootLabel::Pos(i, j)).unwrap();
        let p = ex.p.unwrap();
        let mut c0 = QMatrix::zeros(n, n);
        for k in 1..p {
            c0 = c0.sub(&e(s.tau_pow((i, j), k)));
        }
        let c1 = e(s.tau_pow((i, j), p)).scale(&int(-1));
        out.insert((0, RootLabel::Neg(j, i)), vec![c0, c1]);
        if let Some(q) = ex.q {
            let mut c = QMatrix::zeros(n, n);
            for k in 1..=q {
                c = c.add(&e(s.kappa_pow((i, j), k)));
            }
            out.insert((1, RootLabel::Neg(j, i)), vec![c]);
        }
        let t = exit_times(s, RootLabel::Neg(j, i)).unwrap().t.unwrap();
        if t > 0 {
            let mut c = QMatrix::zeros(n, n);
            for k in 1..=t {
                c = c.add(&e(s.kappa_pow((j, i), k)));
            }
            out.insert((0, RootLabel::Pos(i, j)), vec![c]);
        }
    }
    for (i, f) in cartan_shift_basis(s).f.into_iter().enumerate() {
        if !f.is_zero() {
            out.insert((0, RootLabel::Cartan(i + 1)), vec![f]);
        }
    }
    out
}

/// Basis of `sl_n` whose Cartan part is `q*_i`.
pub fn shift_basis(s: &ShiftData) -> OrderedBasis {
    OrderedBasis::new(s.n(), cartan_shift_basis(s).q_dual).expect("q* is a Cartan basis")
}

/// Compares solved dual elements of `W_(c,d)` with [`claims_table`].
/// Returns the keys where they differ.
pub fn claims_mismatches(s: &ShiftData, window: (i32, i32)) -> Result<Vec<(i32, RootLabel)>> {
    let w = order_w_cd(s, window)?;
    let basis = shift_basis(s);
    let table = claims_table(s);
    let mut bad = Vec::new();
    for d in dual_elements(&w, &basis)? {
        let mut expect = table.get(&(d.k, d.label)).cloned().unwrap_or_default();
        expect.resize(d.p.len(), QMatrix::zeros(s.n(), s.n()));
        if expect != d.p {
            bad.push((d.k, d.label));
        }
    }
    Ok(bad)
}

/// A finite family of pairs in `𝔤 × 𝔤`, kept linearly independent.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePairSubspace {
    pub n: usize,
    pub basis: Vec<(QMatrix, QMatrix)>,
}

fn pair_coords((a, b): &(QMatrix, QMatrix)) -> Vec<Rational> {
    a.entries().chain(b.entries()).map(|(_, v)| v.clone()).collect()
}

fn pair_matrix(n: usize, v: &[(QMatrix, QMatrix)]) -> QMatrix {
    let cols: Vec<Vec<Rational>> = v.iter().map(pair_coords).collect();
    QMatrix::from_cols(2 * n * n, &cols).unwrap()
}

/// `tr(a₁a₂) − tr(b₁b₂)`.
pub fn pair_form(x: &(QMatrix, QMatrix), y: &(QMatrix, QMatrix)) -> Rational {
    lie::trace_form(&x.0, &y.0) - lie::trace_form(&x.1, &y.1)
}

impl FinitePairSubspace {
    /// Keeps a maximal independent subfamily of `gens`.
    pub fn spanned_by(n: usize, gens: Vec<(QMatrix, QMatrix)>) -> Self {
        if gens.is_empty() {
            return FinitePairSubspace { n, basis: gens };
        }
        let (_, pivots) = rref(&pair_matrix(n, &gens));
        let basis = pivots.into_iter().map(|p| gens[p].clone()).collect();
        FinitePairSubspace { n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn same_span(&self, other: &Self) -> bool {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        let r = if all.is_empty() { 0 } else { rank(&pair_matrix(self.n, &all)) };
        r == self.dim() && r == other.dim()
    }

    pub fn intersection_dim(&self, other: &Self) -> usize {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        if all.is_empty() {
            return 0;
        }
        all.len() - rank(&pair_matrix(self.n, &all))
    }

    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| is_zero_q(&pair_form(a, b))))
    }

    pub fn is_lagrangian(&self) -> bool {
        self.is_isotropic() && self.dim() == self.n * self.n - 1
    }

    pub fn is_subalgebra(&self) -> bool {
        if self.basis.is_empty() {
            return true;
        }
        // Membership is tested against the annihilator of the span.
        let ann = kernel(&pair_matrix(self.n, &self.basis).transpose());
        let inside = |v: &[Rational]| {
            let support: Vec<(usize, &Rational)> = v.iter().enumerate().filter(|(_, x)| !is_zero_q(x)).collect();
            ann.iter().all(|w| {
                let dot = support.iter().fold(int(0), |acc, (i, x)| acc + &w[*i] * *x);
                is_zero_q(&dot)
            })
        };
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..].iter().all(|b| inside(&pair_coords(&(a.0.commutator(&b.0), a.1.commutator(&b.1)))))
        })
    }
}

/// `Δ_(c,d) = {(X, X^♯)}`.
pub fn twisted_diagonal(shape: BlockShape) -> FinitePairSubspace {
    let n = shape.n();
    let gens = OrderedBasis::standard(n).elements().into_iter().map(|x| {
        let s = sharp(shape, &x);
        (x, s)
    });
    FinitePairSubspace::spanned_by(n, gens.collect())
}

/// `{(X, X)}`, used as a negative control.
pub fn plain_diagonal(n: usize) -> FinitePairSubspace {
    let gens = OrderedBasis::standard(n).elements().into_iter().map(|x| (x.clone(), x));
    FinitePairSubspace::spanned_by(n, gens.collect())
}

/// `∇_(c,d) = {([[A,0],[C′,D]], [[A,0],[C″,D]])}`.
pub fn nabla(shape: BlockShape) -> FinitePairSubspace {
    let n = shape.n();
    let mut gens = Vec::new();
    for b in b_cd_basis(shape) {
        if n_cd_basis(shape).contains(&b) {
            continue;
        }
        gens.push((b.clone(), b));
    }
    for m in n_cd_basis(shape) {
        gens.push((m.clone(), QMatrix::zeros(n, n)));
        gens.push((QMatrix::zeros(n, n), m));
    }
    FinitePairSubspace::spanned_by(n, gens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NablaDeltaReport {
    pub intersection_dim: usize,
    pub decomposition_ok: bool,
    pub both_lagrangian: bool,
    pub both_subalgebras: bool,
}

pub fn nabla_delta_check(s: &ShiftData) -> NablaDeltaReport {
    let shape = BlockShape::from(*s);
    let d = twisted_diagonal(shape);
    let nb = nabla(shape);
    let inter = d.intersection_dim(&nb);
    let full = 2 * (s.n() * s.n() - 1);
    NablaDeltaReport {
        intersection_dim: inter,
        decomposition_ok: inter == 0 && d.dim() + nb.dim() == full,
        both_lagrangian: d.is_lagrangian() && nb.is_lagrangian(),
        both_subalgebras: d.is_subalgebra() && nb.is_subalgebra(),
    }
}

/// `Ad_T⁻¹(F)` for `T = diag(I_c, z I_d)`: `B` blocks move up one degree,
/// `C` blocks down one. Returned as a degree → matrix map.
fn ad_t_inverse(shape: BlockShape, v: &WindowedLoopPair) -> BTreeMap<i32, QMatrix> {
    let (c, n) = (shape.c(), shape.n());
    let mut out: BTreeMap<i32, QMatrix> = BTreeMap::new();
    for k in v.support() {
        let m = v.big_ref(k);
        for ((i, j), x) in m.entries() {
            if is_zero_q(x) {
                continue;
            }
            let shift = match (i < c, j < c) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            };
            let e = out.entry(k + shift).or_insert_with(|| QMatrix::zeros(n, n));
            e[(i, j)] = x.clone();
        }
    }
    out
}

/// `ι(F, f) = (Ad_T⁻¹(F)(0), f)` for `(F, f) ∈ 𝔒_(c,d)`.
pub fn iota(shape: BlockShape, v: &WindowedLoopPair) -> Result<(QMatrix, QMatrix)> {
    let m = ad_t_inverse(shape, v);
    if let Some((k, _)) = m.iter().find(|(k, x)| **k > 0 && !x.is_zero()) {
        return Err(Error::NotInsideO(format!("component of degree {k} after Ad_T⁻¹")));
    }
    let zero = QMatrix::zeros(v.n(), v.n());
    Ok((m.get(&0).cloned().unwrap_or(zero), v.small.clone()))
}

/// `ι(W / 𝔒^⊥) ⊂ 𝔤 × 𝔤`.
pub fn reduce_order(w: &OrderSpec, s: &ShiftData) -> Result<FinitePairSubspace> {
    w.validate()?;
    let shape = BlockShape::from(*s);
    if !check_o_perp(s) {
        return Err(Error::Internal("𝔒^⊥ does not match its block description".into()));
    }
    let mut gens = Vec::new();
    for b in w.basis_with_tail() {
        let img = iota(shape, &b)?;
        if !(img.0.is_zero() && img.1.is_zero()) {
            gens.push(img);
        }
    }
    Ok(FinitePairSubspace::spanned_by(w.n, gens))
}

/// `Ad_T(z⁻¹𝔤⟦z⁻¹⟧) = z⁻²𝔤⟦z⁻¹⟧ + z⁻¹𝔟 + 𝔫` compared modulo `z^{≤−3}`.
pub fn check_o_perp(s: &ShiftData) -> bool {
    let shape = BlockShape::from(*s);
    let n = s.n();
    let window = (-4, 1);
    let keep = |v: &WindowedLoopPair| -> Vec<Rational> {
        (-2..=0).flat_map(|k| v.big(k).entries().map(|(_, x)| x.clone()).collect::<Vec<_>>()).collect()
    };
    let mut lhs = Vec::new();
    for k in -3..=-1 {
        for g in OrderedBasis::standard(n).elements() {
            let mut v = WindowedLoopPair::zero(n, window);
            for ((i, j), x) in g.entries() {
                if is_zero_q(x) {
                    continue;
                }
                let shift = match (i < shape.c(), j < shape.c()) {
                    (true, false) => -1,
                    (false, true) => 1,
                    _ => 0,
                };
                let mut m = v.big(k + shift);
                m[(i, j)] = x.clone();
                v.set_big(k + shift, m).unwrap();
            }
            lhs.push(keep(&v));
        }
    }
    let mut rhs = Vec::new();
    for g in OrderedBasis::standard(n).elements() {
        rhs.push(keep(&WindowedLoopPair::loop_monomial(window, -2, &g).unwrap()));
    }
    for b in b_cd_basis(shape) {
        rhs.push(keep(&WindowedLoopPair::loop_monomial(window, -1, &b).unwrap()));
    }
    for m in n_cd_basis(shape) {
        rhs.push(keep(&WindowedLoopPair::loop_monomial(window, 0, &m).unwrap()));
    }
    let rows = 3 * n * n;
    let rl = rank(&QMatrix::from_cols(rows, &lhs).unwrap());
    let rr = rank(&QMatrix::from_cols(rows, &rhs).unwrap());
    let mut both = lhs;
    both.extend(rhs);
    rl == rr && rank(&QMatrix::from_cols(rows, &both).unwrap()) == rl
}

/// `𝔓_(c,d) = 𝔓 ∩ 𝔒_(c,d)` inside the window, as pairs `(F, f)`.
pub fn p_cd(s: &ShiftData, window: (i32, i32)) -> Vec<WindowedLoopPair> {
    let shape = BlockShape::from(*s);
    let gens: Vec<WindowedLoopPair> =
        p_window(&OrderedBasis::standard(s.n()), window).into_iter().map(|(_, _, g)| g).collect();
    // rows: positive-degree coefficients of Ad_T⁻¹
    let n = s.n();
    let maxk = window.1 + 1;
    let rows = (maxk as usize) * n * n;
    let cols: Vec<Vec<Rational>> = gens
        .iter()
        .map(|g| {
            let m = ad_t_inverse(shape, g);
            let mut v = vec![int(0); rows];
            for (k, x) in m {
                if k <= 0 {
                    continue;
                }
                for ((i, j), e) in x.entries() {
                    v[(k as usize - 1) * n * n + i * n + j] = e.clone();
                }
            }
            v
        })
        .collect();
    let a = QMatrix::from_cols(rows, &cols).unwrap();
    kernel(&a)
        .into_iter()
        .map(|kv| {
            let mut acc = WindowedLoopPair::zero(n, window);
            for (c, g) in kv.iter().zip(&gens) {
                if !is_zero_q(c) {
                    acc = acc.add(&g.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// Image of `𝔓_(c,d)` under `ι`.
pub fn p_cd_image(s: &ShiftData, window: (i32, i32)) -> Result<FinitePairSubspace> {
    let shape = BlockShape::from(*s);
    let mut gens = Vec::new();
    for v in p_cd(s, window) {
        gens.push(iota(shape, &v)?);
    }
    Ok(FinitePairSubspace::spanned_by(s.n(), gens))
}

/// `{(X, X) | X ∈ 𝔟} + z𝔫 × {0}` as windowed pairs.
pub fn p_cd_described(s: &ShiftData, window: (i32, i32)) -> Result<Vec<WindowedLoopPair>> {
    let shape = BlockShape::from(*s);
    let mut out = Vec::new();
    for b in b_cd_basis(shape) {
        let mut v = WindowedLoopPair::loop_monomial(window, 0, &b)?;
        v.small = b;
        out.push(v);
    }
    for m in n_cd_basis(shape) {
        out.push(WindowedLoopPair::loop_monomial(window, 1, &m)?);
    }
    Ok(out)
}

/// Rank-based equality of two windowed spans.
pub fn same_windowed_span(n: usize, window: (i32, i32), a: &[WindowedLoopPair], b: &[WindowedLoopPair]) -> bool {
    let ra = rank(&coords_matrix(n, window, a));
    let rb = rank(&coords_matrix(n, window, b));
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    ra == rb && rank(&coords_matrix(n, window, &all)) == ra
}
