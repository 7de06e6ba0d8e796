//! Gluing matrices, the block-swap involution and the residue/evaluation
//! pipeline on the space of sections `Sol`.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lie::{self, positive_roots, unit, OrderedBasis, RootLabel};
use crate::roots::{cartan_shift_basis, decompose_nabla, exit_times, ShiftData};
use crate::scalar::linalg::{solve_exact, unit_pivot_kernel, Solution};
use crate::scalar::{int, Matrix, PMatrix, Polynomial, QMatrix, Ring, Var};
use crate::tensor::{QuasiTrigR, Tensor2};

/// Block sizes `(c, d)` with `gcd(c, d) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockShape {
    c: usize,
    d: usize,
}

impl BlockShape {
    pub fn new(c: usize, d: usize) -> Result<Self> {
        if c == 0 || d == 0 {
            return Err(Error::InvalidShift(format!("block sizes ({c}, {d}) must be positive")));
        }
        if c.gcd(&d) != 1 {
            return Err(Error::InvalidShift(format!("gcd({c}, {d}) != 1")));
        }
        Ok(BlockShape { c, d })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.c + self.d
    }
}

impl From<ShiftData> for BlockShape {
    fn from(s: ShiftData) -> Self {
        BlockShape { c: s.c(), d: s.d() }
    }
}

/// `[[0, I_c], [I_d, 0]]`.
pub fn make_k_closed(shape: BlockShape) -> QMatrix {
    let (c, d, n) = (shape.c, shape.d, shape.n());
    let mut k = QMatrix::zeros(n, n);
    for i in 0..c {
        k[(i, d + i)] = Ring::one();
    }
    for i in 0..d {
        k[(c + i, i)] = Ring::one();
    }
    k
}

/// Blow-up recursion from `K_(1,1)`, following the Euclidean algorithm.
pub fn make_k_recursive(shape: BlockShape) -> QMatrix {
    let (c, d) = (shape.c, shape.d);
    if c == 1 && d == 1 {
        return QMatrix::from_rows(vec![vec![Ring::zero(), Ring::one()], vec![Ring::one(), Ring::zero()]]).unwrap();
    }
    if c > d {
        // K_(c'+d, d) from K_(c', d): rows/cols split as (c', d) ↦ (c', d, d)
        let inner = make_k_recursive(BlockShape { c: c - d, d });
        let cp = c - d;
        let n = c + d;
        let mut k = QMatrix::zeros(n, n);
        // [[K1, K2, 0], [0, 0, I_d], [K3, K4, 0]]
        k.set_block(0, 0, &inner.block(0, 0, cp, cp + d));
        for i in 0..d {
            k[(cp + i, cp + d + i)] = Ring::one();
        }
        k.set_block(cp + d, 0, &inner.block(cp, 0, d, cp + d));
        k
    } else {
        // K_(c, d'+c) from K_(c, d')
        let inner = make_k_recursive(BlockShape { c, d: d - c });
        let dp = d - c;
        let n = c + d;
        let mut k = QMatrix::zeros(n, n);
        // [[0, 0, I_c], [K3, K4, 0], [K1, K2, 0]]
        for i in 0..c {
            k[(i, c + dp + i)] = Ring::one();
        }
        k.set_block(c, 0, &inner.block(c, 0, dp, c + dp));
        k.set_block(c + dp, 0, &inner.block(0, 0, c, c + dp));
        k
    }
}

/// `K_(c,d)`, computed both ways and cross-checked.
pub fn make_k(shape: BlockShape) -> Result<QMatrix> {
    let closed = make_k_closed(shape);
    if make_k_recursive(shape) != closed {
        return Err(Error::Internal(format!("K recursion disagrees with closed form for {shape:?}")));
    }
    Ok(closed)
}

/// `J_(c,d) = K⁻¹ = [[0, I_d], [I_c, 0]]`.
pub fn make_j(shape: BlockShape) -> QMatrix {
    make_k_closed(shape).transpose()
}

/// `[[A, B], [C, D]] ↦ [[D, C], [B, A]]` with `A` of size `c×c`.
pub fn sharp<T: Ring>(shape: BlockShape, x: &Matrix<T>) -> Matrix<T> {
    let (c, d) = (shape.c, shape.d);
    let n = c + d;
    let mut out = Matrix::zeros(n, n);
    out.set_block(0, 0, &x.block(c, c, d, d));
    out.set_block(0, d, &x.block(c, 0, d, c));
    out.set_block(d, 0, &x.block(0, c, c, d));
    out.set_block(d, d, &x.block(0, 0, c, c));
    out
}

fn constant(m: &QMatrix) -> PMatrix {
    m.map(|v| Polynomial::constant(v.clone()))
}

fn times(p: &Polynomial, m: &PMatrix) -> PMatrix {
    m.map(|v| v * p)
}

/// Coefficient of `z^k`, entrywise.
fn z_coeff(f: &PMatrix, k: u16) -> PMatrix {
    f.map(|v| v.coeff_of(Var::Z, k))
}

/// `F₀` and `F_∞` of a member `F(z)` of the `Sol` shape.
pub fn gluing_parts(shape: BlockShape, f: &PMatrix) -> (PMatrix, PMatrix) {
    let (c, n) = (shape.c, shape.n());
    let f0 = z_coeff(f, 0);
    let mut finf = PMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = match (i < c, j < c) {
                (true, false) => 0,
                (false, true) => 2,
                _ => 1,
            };
            finf[(i, j)] = f[(i, j)].coeff_of(Var::Z, k);
        }
    }
    (f0, finf)
}

/// Degree profile of `Sol`, tracelessness and `F₀ = −x·F_∞^♯`, all as
/// polynomial identities in `x`.
pub fn is_sol_member(shape: BlockShape, f: &PMatrix) -> bool {
    let c = shape.c;
    let shape_ok = f.entries().all(|((i, j), v)| {
        let max = match (i < c, j < c) {
            (true, false) => 0,
            (false, true) => 2,
            _ => 1,
        };
        v.degree_in(Var::Z).is_none_or(|d| d <= max)
    });
    let (f0, finf) = gluing_parts(shape, f);
    let x = Polynomial::var(Var::X);
    shape_ok && f.trace().is_zero() && f0.add(&times(&x, &sharp(shape, &finf))).is_zero()
}

/// `Sol((c,d), x)` with a basis over `ℚ[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolSpace {
    pub shape: BlockShape,
    pub basis: Vec<PMatrix>,
}

/// Coefficient slot of the `Sol` ansatz: `(row, col, z-degree)`.
fn sol_slots(shape: BlockShape) -> Vec<(usize, usize, u16)> {
    let (c, n) = (shape.c, shape.n());
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let degs: &[u16] = match (i < c, j < c) {
                (true, false) => &[0],
                (false, true) => &[0, 1, 2],
                _ => &[0, 1],
            };
            out.extend(degs.iter().map(|&k| (i, j, k)));
        }
    }
    out
}

pub fn sol_space(shape: BlockShape) -> Result<SolSpace> {
    let (c, n) = (shape.c, shape.n());
    let slots = sol_slots(shape);
    let index: BTreeMap<(usize, usize, u16), usize> = slots.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    let x = Polynomial::var(Var::X);
    // F_∞ entry (i, j) as a slot
    let inf_slot = |i: usize, j: usize| -> usize {
        let k = match (i < c, j < c) {
            (true, false) => 0,
            (false, true) => 2,
            _ => 1,
        };
        index[&(i, j, k)]
    };
    let mut rows: Vec<Vec<Polynomial>> = Vec::new();
    // trace of F_∞ first so that the trace of F₀ reduces to zero
    let mut tr_inf = vec![Polynomial::zero(); slots.len()];
    for i in 0..n {
        tr_inf[index[&(i, i, 1)]] = Polynomial::one();
    }
    rows.push(tr_inf);
    // sharp(F_∞)[i][j] = F_∞[σ(i)][σ(j)] with σ the block rotation
    let sigma = |i: usize| if i < shape.d { c + i } else { i - shape.d };
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Polynomial::zero(); slots.len()];
            row[index[&(i, j, 0)]] += Polynomial::one();
            row[inf_slot(sigma(i), sigma(j))] += &x;
            rows.push(row);
        }
    }
    let mut tr0 = vec![Polynomial::zero(); slots.len()];
    for i in 0..n {
        tr0[index[&(i, i, 0)]] = Polynomial::one();
    }
    rows.push(tr0);
    let a = PMatrix::from_rows(rows)?;
    let kernel = unit_pivot_kernel(&a)?;
    if kernel.len() != n * n - 1 {
        return Err(Error::Internal(format!("Sol has dimension {} instead of {}", kernel.len(), n * n - 1)));
    }
    let z = |k: u16| Polynomial::monomial(int(1), &[(Var::Z, k)]);
    let basis: Vec<PMatrix> = kernel
        .into_iter()
        .map(|v| {
            let mut f = PMatrix::zeros(n, n);
            for (&(i, j, k), p) in slots.iter().zip(&v) {
                if !p.is_zero() {
                    f[(i, j)] += &(p * &z(k));
                }
            }
            f
        })
        .collect();
    if let Some(bad) = basis.iter().position(|f| !is_sol_member(shape, f)) {
        return Err(Error::Internal(format!("Sol basis member {bad} violates the gluing constraint")));
    }
    Ok(SolSpace { shape, basis })
}

impl SolSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// A matrix with polynomial entries over an explicit common divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct Cleared {
    pub numerator: PMatrix,
    pub divisor: Polynomial,
}

/// `F(x)/x`, carried as `(F(x), x)`.
pub fn res_map(f: &PMatrix) -> Cleared {
    let x = Polynomial::var(Var::X);
    Cleared { numerator: f.map(|v| v.substitute(&[(Var::Z, x.clone())])), divisor: x }
}

/// `F(y)/(y−x)`, carried as `(F(y), y−x)`.
pub fn ev_map(f: &PMatrix) -> Cleared {
    let y = Polynomial::var(Var::Y);
    Cleared { numerator: f.map(|v| v.substitute(&[(Var::Z, y.clone())])), divisor: &y - &Polynomial::var(Var::X) }
}

/// `F(x)/x` divided out exactly.
pub fn res_exact(f: &PMatrix) -> Result<PMatrix> {
    let r = res_map(f);
    let mut out = PMatrix::zeros(r.numerator.rows(), r.numerator.cols());
    for ((i, j), v) in r.numerator.entries() {
        out[(i, j)] = v
            .div_by_var(Var::X)
            .ok_or_else(|| Error::Internal(format!("F(x) entry ({i}, {j}) is not divisible by x")))?;
    }
    Ok(out)
}

fn upper_right(shape: BlockShape, x: &QMatrix) -> QMatrix {
    let mut m = QMatrix::zeros(shape.n(), shape.n());
    m.set_block(0, shape.c, &x.block(0, shape.c, shape.c, shape.d));
    m
}

/// `(A, Z, C, D)` blocks of a `∇` decomposition, as full-size matrices
/// supported in the respective block.
struct Blocks {
    a: QMatrix,
    z: QMatrix,
    cc: QMatrix,
    d: QMatrix,
}

fn nabla_blocks(s: &ShiftData, x: &QMatrix) -> Result<Blocks> {
    let shape = BlockShape::from(*s);
    let (c, n) = (shape.c, shape.n());
    let (y1, y2) = decompose_nabla(s, x)?;
    let pick = |m: &QMatrix, top: bool, left: bool| {
        QMatrix::from_fn(n, n, |i, j| if (i < c) == top && (j < c) == left { m[(i, j)].clone() } else { int(0) })
    };
    Ok(Blocks {
        a: pick(&y1, true, true),
        z: pick(&y1, false, true),
        cc: pick(&y2, false, true),
        d: pick(&y1, false, false),
    })
}

/// `(A′, C′, D′)` with `[[A′, 0], [C′, D′]] = κ([[A′, N], [0, D′]])`, the
/// condition that cancels the `x`-linear part of the residue.
fn b_block_correction(s: &ShiftData, nmat: &QMatrix) -> Result<(QMatrix, QMatrix, QMatrix)> {
    let shape = BlockShape::from(*s);
    let (c, n) = (shape.c, shape.n());
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| !(i < c && j >= c)).collect();
    // u ↦ Y″(u) − κ(diag-blocks of u)
    let cols: Vec<Vec<crate::scalar::Rational>> = slots
        .iter()
        .map(|&(i, j)| {
            let mut m = QMatrix::zeros(n, n);
            m[(i, j)] = int(1);
            let diag = if (i < c) == (j < c) { sharp(shape, &m) } else { QMatrix::zeros(n, n) };
            let mut col: Vec<_> = m.sub(&diag).entries().map(|(_, v)| v.clone()).collect();
            // trace row: the identity would otherwise lie in the kernel
            col.push(if i == j { int(1) } else { int(0) });
            col
        })
        .collect();
    let a = QMatrix::from_cols(n * n + 1, &cols)?;
    let mut rhs: Vec<_> = sharp(shape, nmat).entries().map(|(_, v)| v.clone()).collect();
    rhs.push(int(0));
    let u = match solve_exact(&a, &rhs)? {
        Solution::Unique(u) => u,
        _ => return Err(Error::Internal("B-block correction is not uniquely determined".into())),
    };
    let (mut a1, mut c1, mut d1) = (QMatrix::zeros(n, n), QMatrix::zeros(n, n), QMatrix::zeros(n, n));
    for (&(i, j), v) in slots.iter().zip(u) {
        match (i < c, j < c) {
            (true, true) => a1[(i, j)] = v,
            (false, false) => d1[(i, j)] = v,
            _ => c1[(i, j)] = v,
        }
    }
    Ok((a1, c1, d1))
}

/// Closed-form preimage of `X` under the residue map.
pub fn res_inverse_explicit(s: &ShiftData, x: &QMatrix) -> Result<PMatrix> {
    let shape = BlockShape::from(*s);
    if !lie::is_traceless(x) {
        return Err(Error::Dimension("res⁻¹ expects a traceless matrix".into()));
    }
    let main = nabla_blocks(s, x)?;
    let nmat = upper_right(shape, x);
    let (a1, c1, d1) = b_block_correction(s, &nmat)?;
    let xp = Polynomial::var(Var::X);
    let zp = Polynomial::var(Var::Z);
    let z2 = &zp * &zp;
    let lin = |m0: &QMatrix, m1: &QMatrix| constant(m0).add(&times(&xp, &constant(m1)));
    // F_∞ = [[A + xA′, xN], [C, D + xD′]]
    let finf = lin(&main.a, &a1).add(&times(&xp, &constant(&nmat))).add(&constant(&main.cc)).add(&lin(&main.d, &d1));
    let mut f = times(&-&xp, &sharp(shape, &finf));
    let zpart = lin(&main.a, &a1).add(&lin(&main.z, &c1.sub(&main.cc))).add(&lin(&main.d, &d1));
    f = f.add(&times(&zp, &zpart));
    f = f.add(&times(&z2, &constant(&main.cc)));
    if !is_sol_member(shape, &f) {
        return Err(Error::Internal("explicit preimage is not in Sol".into()));
    }
    if res_exact(&f)? != constant(x) {
        return Err(Error::Internal("explicit preimage has the wrong residue".into()));
    }
    Ok(f)
}

/// Preimage of `X` under the residue map by solving over a `Sol` basis with
/// polynomial coefficients in `x`.
pub fn res_inverse_solved(sol: &SolSpace, x: &QMatrix) -> Result<PMatrix> {
    let n = sol.shape.n();
    let residues: Vec<PMatrix> = sol.basis.iter().map(res_exact).collect::<Result<_>>()?;
    let deg_res = residues.iter().flat_map(|m| m.entries().filter_map(|(_, v)| v.degree_in(Var::X))).max().unwrap_or(0);
    for ansatz in [2u16, 4, 8] {
        let top = (ansatz + deg_res) as usize;
        // equations: entry (i, j), power x^m; unknowns: λ_{b,k}
        let nunk = residues.len() * (ansatz as usize + 1);
        let neq = n * n * (top + 1);
        let mut a = QMatrix::zeros(neq, nunk);
        for (b, r) in residues.iter().enumerate() {
            for ((i, j), v) in r.entries() {
                for (mono, coef) in v.terms() {
                    let m = mono.exp(Var::X) as usize;
                    for k in 0..=ansatz as usize {
                        a[((i * n + j) * (top + 1) + m + k, b * (ansatz as usize + 1) + k)] += coef;
                    }
                }
            }
        }
        let mut rhs = vec![int(0); neq];
        for ((i, j), v) in x.entries() {
            rhs[(i * n + j) * (top + 1)] = v.clone();
        }
        let lam = match solve_exact(&a, &rhs)? {
            Solution::Unique(v) => v,
            Solution::Underdetermined { particular, .. } => particular,
            Solution::Inconsistent { .. } => continue,
        };
        let mut f = PMatrix::zeros(n, n);
        for (b, basis_f) in sol.basis.iter().enumerate() {
            let mut l = Polynomial::zero();
            for k in 0..=ansatz {
                let coef = &lam[b * (ansatz as usize + 1) + k as usize];
                l += Polynomial::monomial(coef.clone(), &[(Var::X, k)]);
            }
            if !l.is_zero() {
                f = f.add(&times(&l, basis_f));
            }
        }
        return Ok(f);
    }
    Err(Error::Internal("no polynomial preimage of low degree".into()))
}

/// Assembles `Σ g*_β ⊗ F_β(y)` and extracts the polynomial part
/// `p = [Σ g*_β ⊗ F_β(y) − xγ]/(y−x)`.
pub fn geometric_r(s: &ShiftData) -> Result<QuasiTrigR> {
    let n = s.n();
    let basis = OrderedBasis::standard(n);
    let mut num = Tensor2::zero(n);
    for ((_, g), gd) in basis.items().iter().zip(basis.dual()) {
        let f = res_inverse_explicit(s, g)?;
        num.add_outer_poly(&constant(&gd), &ev_map(&f).numerator);
    }
    let x = Polynomial::var(Var::X);
    let num = num.sub(&lie::casimir(n).scale(&x));
    let mut p = Tensor2::zero(n);
    for (key, coef) in num.terms() {
        let q = coef
            .div_by_difference(Var::X, Var::Y)
            .ok_or_else(|| Error::NotQuasiTrigonometric(format!("coefficient of {key:?} is not divisible by y - x")))?;
        p.add_term(*key, q);
    }
    Ok(QuasiTrigR::new(p))
}

/// Closed forms of `r♯_{x,y}(g_β)` in the basis `{e_α} ∪ {q_i} ∪ {e_β}`,
/// as numerators over `y − x`.
pub fn rsharp_closed_table(s: &ShiftData) -> BTreeMap<RootLabel, PMatrix> {
    let n = s.n();
    let xp = Polynomial::var(Var::X);
    let yp = Polynomial::var(Var::Y);
    let ymx = &yp - &xp;
    let e = |r: (usize, usize)| constant(&unit(n, r.0, r.1));
    let mut out = BTreeMap::new();
    for alpha in positive_roots(n) {
        let p = exit_times(s, RootLabel::Pos(alpha.0, alpha.1)).unwrap().p.unwrap();
        let mut tail = PMatrix::zeros(n, n);
        for l in 1..p {
            tail = tail.sub(&e(s.tau_pow(alpha, l)));
        }
        tail = tail.sub(&times(&yp, &e(s.tau_pow(alpha, p))));
        let ka = s.kappa(alpha);
        if lie::is_negative(ka) {
            // the whole run κ(α), κ²(α), … inside Φ₋
            let t = exit_times(s, RootLabel::Neg(ka.0, ka.1)).unwrap().t.unwrap();
            for l in 1..=t + 1 {
                tail = tail.add(&times(&xp, &e(s.kappa_pow(alpha, l))));
            }
        }
        out.insert(RootLabel::Pos(alpha.0, alpha.1), times(&xp, &e(alpha)).add(&times(&ymx, &tail)));
        let beta = (alpha.1, alpha.0);
        let t = exit_times(s, RootLabel::Neg(beta.0, beta.1)).unwrap().t.unwrap();
        let mut tail = PMatrix::zeros(n, n);
        for l in 1..=t {
            tail = tail.add(&e(s.kappa_pow(beta, l)));
        }
        out.insert(RootLabel::Neg(beta.0, beta.1), times(&yp, &e(beta)).add(&times(&ymx, &tail)));
    }
    let cb = cartan_shift_basis(s);
    for (i, (q, w)) in cb.q.iter().zip(&cb.w).enumerate() {
        let v = times(&xp, &constant(q)).add(&times(&ymx, &constant(&s.tau_elem(w))));
        out.insert(RootLabel::Cartan(i + 1), v);
    }
    out
}

/// `F_β(y)` from the explicit residue inverse, keyed like [`rsharp_closed_table`].
pub fn rsharp_generic(s: &ShiftData) -> Result<BTreeMap<RootLabel, PMatrix>> {
    let n = s.n();
    let cb = cartan_shift_basis(s);
    let mut out = BTreeMap::new();
    for alpha in positive_roots(n) {
        for label in [RootLabel::Pos(alpha.0, alpha.1), RootLabel::Neg(alpha.1, alpha.0)] {
            let (i, j) = label.pair().unwrap();
            out.insert(label, ev_map(&res_inverse_explicit(s, &unit(n, i, j))?).numerator);
        }
    }
    for (i, q) in cb.q.iter().enumerate() {
        out.insert(RootLabel::Cartan(i + 1), ev_map(&res_inverse_explicit(s, q)?).numerator);
    }
    Ok(out)
}

/// Labels where the closed table and the generic pipeline disagree.
pub fn rsharp_mismatches(s: &ShiftData) -> Result<Vec<RootLabel>> {
    let table = rsharp_closed_table(s);
    let generic = rsharp_generic(s)?;
    Ok(generic.into_iter().filter(|(l, v)| table.get(l) != Some(v)).map(|(l, _)| l).collect())
}
