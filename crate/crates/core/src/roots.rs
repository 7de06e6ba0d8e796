//! Shift-permutation combinatorics on the roots of `sl_n` and the closed
//! formula for `r_c`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lie::{self, dual_basis, is_negative, is_positive, positive_roots, unit, wedge, LieElement, RootLabel};
use crate::scalar::linalg::{solve_exact, Solution};
use crate::scalar::{int, rat, Polynomial, QMatrix, Rational, Var};
use crate::tensor::{r_standard, QuasiTrigR, Tensor2};

/// `(n, c)` with `gcd(n, c) = 1`; `d = n - c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftData {
    n: usize,
    c: usize,
}

impl ShiftData {
    pub fn new(n: usize, c: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidShift(format!("n = {n} must be at least 2")));
        }
        if c == 0 || c >= n {
            return Err(Error::InvalidShift(format!("c = {c} must satisfy 1 <= c < n = {n}")));
        }
        if n.gcd(&c) != 1 {
            return Err(Error::InvalidShift(format!("gcd({n}, {c}) = {} != 1", n.gcd(&c))));
        }
        Ok(ShiftData { n, c })
    }

    /// Every valid `(n, c)` with `lo <= n <= hi`.
    pub fn all_coprime(lo: usize, hi: usize) -> Vec<ShiftData> {
        (lo.max(2)..=hi).flat_map(|n| (1..n).filter_map(move |c| ShiftData::new(n, c).ok())).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn d(&self) -> usize {
        self.n - self.c
    }

    /// `τ` on a single index.
    pub fn shift(&self, i: usize, k: usize) -> usize {
        (i - 1 + k * self.c) % self.n + 1
    }

    pub fn tau(&self, root: (usize, usize)) -> (usize, usize) {
        self.tau_pow(root, 1)
    }

    pub fn tau_pow(&self, (i, j): (usize, usize), k: usize) -> (usize, usize) {
        (self.shift(i, k), self.shift(j, k))
    }

    /// `κ = τ⁻¹`, a shift by `d`.
    pub fn kappa(&self, root: (usize, usize)) -> (usize, usize) {
        self.kappa_pow(root, 1)
    }

    pub fn kappa_pow(&self, root: (usize, usize), k: usize) -> (usize, usize) {
        self.tau_pow(root, k * (self.n - 1))
    }

    /// `τ(X)` with `τ(e_ij) = e_{τ(i), τ(j)}`.
    pub fn tau_elem(&self, x: &QMatrix) -> QMatrix {
        self.permute(x, 1)
    }

    pub fn kappa_elem(&self, x: &QMatrix) -> QMatrix {
        self.permute(x, self.n - 1)
    }

    fn permute(&self, x: &QMatrix, k: usize) -> QMatrix {
        let n = self.n;
        let mut out = QMatrix::zeros(n, n);
        for i in 1..=n {
            for j in 1..=n {
                out[(self.shift(i, k) - 1, self.shift(j, k) - 1)] = x[(i - 1, j - 1)].clone();
            }
        }
        out
    }
}

/// Exit data of a root under the shift permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitTimes {
    /// First `k ≥ 1` with `τ^k(α) ∉ Φ₊` (positive roots only).
    pub p: Option<usize>,
    /// Length of the run `κ(α), κ²(α), … ∈ Φ₋` for positive `α` with `κ(α) ∈ Φ₋`.
    pub q: Option<usize>,
    /// Same run length for negative roots (possibly zero).
    pub t: Option<usize>,
}

fn kappa_run(s: &ShiftData, root: (usize, usize)) -> usize {
    let mut k = 0;
    while k < s.n && is_negative(s.kappa_pow(root, k + 1)) {
        k += 1;
    }
    k
}

pub fn exit_times(s: &ShiftData, alpha: RootLabel) -> Result<ExitTimes> {
    alpha.validate(s.n)?;
    Ok(match alpha {
        RootLabel::Pos(i, j) => {
            let p = (1..=s.n).find(|&k| !is_positive(s.tau_pow((i, j), k)));
            let run = kappa_run(s, (i, j));
            ExitTimes { p, q: (run > 0).then_some(run), t: None }
        }
        RootLabel::Neg(i, j) => ExitTimes { p: None, q: None, t: Some(kappa_run(s, (i, j))) },
        RootLabel::Cartan(_) => ExitTimes { p: None, q: None, t: None },
    })
}

fn p_of(s: &ShiftData, alpha: (usize, usize)) -> usize {
    exit_times(s, RootLabel::Pos(alpha.0, alpha.1)).unwrap().p.expect("τ has finite order")
}

fn t_of(s: &ShiftData, beta: (usize, usize)) -> usize {
    kappa_run(s, beta)
}

/// The `c`-dependent Cartan data built from `u = e_11`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanShiftBasis {
    pub q: Vec<LieElement>,
    pub w: Vec<LieElement>,
    pub f: Vec<LieElement>,
    pub q_dual: Vec<LieElement>,
}

pub fn cartan_shift_basis(s: &ShiftData) -> CartanShiftBasis {
    let n = s.n;
    let ident_n = QMatrix::identity(n).scale(&rat(1, n as i64));
    let tu = |k: usize| {
        let i = s.shift(1, k);
        unit(n, i, i)
    };
    let mut q = Vec::with_capacity(n - 1);
    let mut w = Vec::with_capacity(n - 1);
    let mut f = Vec::with_capacity(n - 1);
    for i in 1..n {
        q.push(tu(i).sub(&tu(i - 1)));
        w.push(tu(i - 1).sub(&ident_n));
        f.push(tu(i).add(&tu(i - 1)).scale(&rat(1, 2)).sub(&ident_n));
    }
    let q_dual = dual_basis(&q).expect("q_i span the Cartan subalgebra");
    let b = CartanShiftBasis { q, w, f, q_dual };
    debug_assert!(b.check_identities(s));
    b
}

impl CartanShiftBasis {
    /// `½(q_i, −q_i) = (τ(w_i), w_i) − (f_i, f_i)`, tracelessness, and
    /// `⟨(q*_i, q*_i), (τ(w_j), w_j)⟩ = δ_ij` for the pairing `tr(ac) − tr(bd)`.
    pub fn check_identities(&self, s: &ShiftData) -> bool {
        let half = rat(1, 2);
        let all_traceless = [&self.q, &self.w, &self.f, &self.q_dual].iter().all(|v| v.iter().all(lie::is_traceless));
        let split = (0..self.q.len()).all(|i| {
            let tw = s.tau_elem(&self.w[i]);
            self.q[i].scale(&half) == tw.sub(&self.f[i])
                && self.q[i].scale(&(-half.clone())) == self.w[i].sub(&self.f[i])
        });
        let pairing = (0..self.q.len()).all(|i| {
            (0..self.q.len()).all(|j| {
                let tw = s.tau_elem(&self.w[j]);
                let v = lie::trace_form(&self.q_dual[i], &tw) - lie::trace_form(&self.q_dual[i], &self.w[j]);
                v == if i == j { int(1) } else { int(0) }
            })
        });
        all_traceless && split && pairing
    }
}

fn e(n: usize, r: (usize, usize)) -> QMatrix {
    unit(n, r.0, r.1)
}

/// `u_c` of the closed formula.
pub fn u_part(s: &ShiftData) -> Tensor2 {
    let n = s.n;
    let x = Polynomial::var(Var::X);
    let y = Polynomial::var(Var::Y);
    let mut t = Tensor2::zero(n);
    for alpha in positive_roots(n) {
        let neg = (alpha.1, alpha.0);
        let p = p_of(s, alpha);
        for k in 1..p {
            t.add_assign(&wedge(&e(n, s.tau_pow(alpha, k)), &e(n, neg)));
        }
        let last = s.tau_pow(alpha, p);
        t.add_outer(&x, &e(n, last), &e(n, neg));
        t.add_outer(&-&y, &e(n, neg), &e(n, last));
    }
    t
}

/// `t_c = Σ q*_i ⊗ f_i`.
pub fn cartan_part(s: &ShiftData) -> Tensor2 {
    let b = cartan_shift_basis(s);
    let mut t = Tensor2::zero(s.n);
    for (qd, f) in b.q_dual.iter().zip(&b.f) {
        t.add_outer(&Polynomial::one(), qd, f);
    }
    t
}

/// `r_c = r_st + u_c + t_c`.
pub fn build_rc(s: &ShiftData) -> QuasiTrigR {
    let p = r_standard(s.n).into_p().add(&u_part(s)).add(&cartan_part(s));
    QuasiTrigR::new(p)
}

/// `(Y′, Y″)` with equal diagonal blocks and vanishing upper-right blocks.
pub type NablaPair = (QMatrix, QMatrix);

/// True when `(a, b)` lies in `∇`: same `A`, `D` blocks, zero `B` blocks.
pub fn in_nabla(s: &ShiftData, a: &QMatrix, b: &QMatrix) -> bool {
    let (n, c) = (s.n, s.c);
    for i in 0..n {
        for j in 0..n {
            let upper_right = i < c && j >= c;
            let diag_block = (i < c) == (j < c);
            if upper_right && (a[(i, j)] != int(0) || b[(i, j)] != int(0)) {
                return false;
            }
            if diag_block && a[(i, j)] != b[(i, j)] {
                return false;
            }
        }
    }
    lie::is_traceless(a) && lie::is_traceless(b)
}

/// `X = Y′ − κ(Y″)` by the per-basis closed formulas.
pub fn decompose_nabla_closed(s: &ShiftData, x: &QMatrix) -> Result<NablaPair> {
    let n = s.n;
    if !lie::is_traceless(x) {
        return Err(Error::Dimension("decompose_nabla expects a traceless matrix".into()));
    }
    let basis = cartan_shift_basis(s);
    let mut y1 = QMatrix::zeros(n, n);
    let mut y2 = QMatrix::zeros(n, n);
    let mut diag = QMatrix::zeros(n, n);
    for i in 1..=n {
        for j in 1..=n {
            let v = &x[(i - 1, j - 1)];
            if *v == int(0) {
                continue;
            }
            if i == j {
                diag[(i - 1, i - 1)] = v.clone();
                continue;
            }
            if i < j {
                let p = p_of(s, (i, j));
                for l in 1..=p {
                    let m = e(n, s.tau_pow((i, j), l)).scale(&-v.clone());
                    if l < p {
                        y1 = y1.add(&m);
                    }
                    y2 = y2.add(&m);
                }
            } else {
                let t = t_of(s, (i, j));
                for l in 0..=t {
                    let m = e(n, s.kappa_pow((i, j), l)).scale(v);
                    y1 = y1.add(&m);
                    if l < t {
                        y2 = y2.add(&m);
                    }
                }
            }
        }
    }
    for (qd, w) in basis.q_dual.iter().zip(&basis.w) {
        let coef = lie::trace_form(qd, &diag);
        if coef != int(0) {
            let tw = s.tau_elem(w).scale(&coef);
            y1 = y1.add(&tw);
            y2 = y2.add(&tw);
        }
    }
    Ok((y1, y2))
}

/// `X = Y′ − κ(Y″)` by an exact linear solve over the `∇` coordinates.
pub fn decompose_nabla_solve(s: &ShiftData, x: &QMatrix) -> Result<NablaPair> {
    let (n, c) = (s.n, s.c);
    // unknowns: shared diagonal-block entries, then C′ entries, then C″ entries
    let diag_pos: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| (i < c) == (j < c)).collect();
    let lower_pos: Vec<(usize, usize)> = (c..n).flat_map(|i| (0..c).map(move |j| (i, j))).collect();
    let nd = diag_pos.len();
    let nl = lower_pos.len();
    let cols = nd + 2 * nl;
    let mut a = QMatrix::zeros(n * n + 1, cols);
    let row = |i: usize, j: usize| i * n + j;
    let kinv = |i: usize| s.shift(i + 1, n - 1) - 1;
    for (k, &(i, j)) in diag_pos.iter().enumerate() {
        a[(row(i, j), k)] += int(1);
        a[(row(kinv(i), kinv(j)), k)] -= int(1);
        if i == j {
            a[(n * n, k)] = int(1);
        }
    }
    for (k, &(i, j)) in lower_pos.iter().enumerate() {
        a[(row(i, j), nd + k)] += int(1);
        a[(row(kinv(i), kinv(j)), nd + nl + k)] -= int(1);
    }
    let mut b: Vec<Rational> = (0..n * n).map(|k| x[(k / n, k % n)].clone()).collect();
    b.push(int(0));
    let sol = match solve_exact(&a, &b)? {
        Solution::Unique(v) => v,
        other => return Err(Error::Internal(format!("nabla decomposition not unique: {other:?}"))),
    };
    let mut y1 = QMatrix::zeros(n, n);
    let mut y2 = QMatrix::zeros(n, n);
    for (k, &(i, j)) in diag_pos.iter().enumerate() {
        y1[(i, j)] = sol[k].clone();
        y2[(i, j)] = sol[k].clone();
    }
    for (k, &(i, j)) in lower_pos.iter().enumerate() {
        y1[(i, j)] = sol[nd + k].clone();
        y2[(i, j)] = sol[nd + nl + k].clone();
    }
    Ok((y1, y2))
}

/// Both decompositions, asserted equal.
pub fn decompose_nabla(s: &ShiftData, x: &QMatrix) -> Result<NablaPair> {
    let closed = decompose_nabla_closed(s, x)?;
    let solved = decompose_nabla_solve(s, x)?;
    if closed != solved {
        return Err(Error::Internal(format!(
            "closed and solved nabla decompositions differ for {x:?}: {closed:?} vs {solved:?}"
        )));
    }
    Ok(solved)
}
