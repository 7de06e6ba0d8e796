//! Experimental builder for the Belavin–Drinfeld-type quasi-trigonometric
//! ansatz on the extended Dynkin diagram of type `A_{n−1}^{(1)}`.
//!
//! Nodes are numbered `0..n`, node `0` being the affine simple root
//! `α₀ = δ − (ε₁ − ε_n)` and node `i ≥ 1` being `α_i = ε_i − ε_{i+1}`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lie::{cartan_casimir, positive_roots, standard_cartan, unit};
use crate::roots::ShiftData;
use crate::scalar::linalg::{solve_exact, Solution};
use crate::scalar::{int, Polynomial, QMatrix, Rational, Var};
use crate::tensor::{r_standard, QuasiTrigR, Tensor2};

/// `(Γ₁, Γ₂, τ)` on the extended diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdData {
    pub n: usize,
    pub gamma1: BTreeSet<usize>,
    pub gamma2: BTreeSet<usize>,
    pub tau: BTreeMap<usize, usize>,
}

#[derive(Deserialize)]
struct BdJson {
    n: usize,
    gamma1: Vec<String>,
    gamma2: Vec<String>,
    tau: Vec<(String, String)>,
}

fn parse_node(s: &str, n: usize) -> Result<usize> {
    let k = s
        .strip_prefix('a')
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("node `{s}` is not of the form a<k>")))?;
    if k >= n {
        return Err(Error::InvalidBdData(format!("node `{s}` does not exist for n = {n}")));
    }
    Ok(k)
}

/// `(α_a, α_b)` for the affine Cartan matrix of type `A_{n−1}^{(1)}`.
pub fn node_pairing(n: usize, a: usize, b: usize) -> i64 {
    let eps = |k: usize| -> Vec<i64> {
        let mut v = vec![0i64; n];
        if k == 0 {
            v[n - 1] += 1;
            v[0] -= 1;
        } else {
            v[k - 1] += 1;
            v[k] -= 1;
        }
        v
    };
    eps(a).iter().zip(eps(b)).map(|(x, y)| x * y).sum()
}

impl BdData {
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: BdJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("BD data: {e}")))?;
        if raw.n < 2 {
            return Err(Error::InvalidBdData("n must be at least 2".into()));
        }
        let n = raw.n;
        let gamma1 = raw.gamma1.iter().map(|s| parse_node(s, n)).collect::<Result<BTreeSet<_>>>()?;
        let gamma2 = raw.gamma2.iter().map(|s| parse_node(s, n)).collect::<Result<BTreeSet<_>>>()?;
        let mut tau = BTreeMap::new();
        for (a, b) in &raw.tau {
            if tau.insert(parse_node(a, n)?, parse_node(b, n)?).is_some() {
                return Err(Error::InvalidBdData(format!("τ is assigned twice on `{a}`")));
            }
        }
        let d = BdData { n, gamma1, gamma2, tau };
        d.validate()?;
        Ok(d)
    }

    /// Checks every admissibility condition, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.gamma1.contains(&0) {
            return Err(Error::InvalidBdData("Γ1 must not contain the affine simple root a0".into()));
        }
        let dom: BTreeSet<usize> = self.tau.keys().copied().collect();
        if dom != self.gamma1 {
            return Err(Error::InvalidBdData("τ must be defined exactly on Γ1".into()));
        }
        let img: BTreeSet<usize> = self.tau.values().copied().collect();
        if img.len() != self.tau.len() || img != self.gamma2 {
            return Err(Error::InvalidBdData("τ must be a bijection from Γ1 onto Γ2".into()));
        }
        for (&a, &ta) in &self.tau {
            for (&b, &tb) in &self.tau {
                if node_pairing(n, a, b) != node_pairing(n, ta, tb) {
                    return Err(Error::InvalidBdData(format!("τ does not preserve the pairing of a{a} and a{b}")));
                }
            }
        }
        for &a in &self.gamma1 {
            let mut cur = a;
            let mut steps = 0;
            while let Some(&next) = self.tau.get(&cur) {
                cur = next;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidBdData(format!("τ is not nilpotent: the orbit of a{a} stays in Γ1")));
                }
            }
        }
        Ok(())
    }

    /// The shift data `τ(α_i) = α_{i+c mod n}` on `Γ₁ = {α₁, …, α_{n−1}}`.
    pub fn from_shift(s: &ShiftData) -> Self {
        let n = s.n();
        let tau: BTreeMap<usize, usize> = (1..n).map(|i| (i, (i + s.c()) % n)).collect();
        BdData { n, gamma1: (1..n).collect(), gamma2: tau.values().copied().collect(), tau }
    }
}

/// A root supported on a proper arc of the affine cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Arc {
    start: usize,
    len: usize,
}

impl Arc {
    fn nodes(self, n: usize) -> impl Iterator<Item = usize> {
        (0..self.len).map(move |k| (self.start + k) % n)
    }

    fn is_affine(self, n: usize) -> bool {
        self.nodes(n).any(|k| k == 0)
    }

    /// Root pair `(i, j)`: positive for finite arcs, negative (after removing
    /// `δ`) for arcs through node `0`.
    fn pair(self, n: usize) -> (usize, usize) {
        let fix = |k: usize| if k == 0 { n } else { k };
        (fix(self.start), fix((self.start + self.len) % n))
    }

    fn from_nodes(n: usize, nodes: &BTreeSet<usize>) -> Option<Arc> {
        let len = nodes.len();
        if len == 0 || len >= n {
            return None;
        }
        let start = nodes.iter().copied().find(|&k| !nodes.contains(&((k + n - 1) % n)))?;
        let arc = Arc { start, len };
        (arc.nodes(n).collect::<BTreeSet<_>>() == *nodes).then_some(arc)
    }
}

/// Root vector of a simple node, dropping the loop factor of `α₀`.
fn node_vector(n: usize, k: usize) -> QMatrix {
    if k == 0 {
        unit(n, n, 1)
    } else {
        unit(n, k, k + 1)
    }
}

/// Sign `s` with `θ(e_α) = s·e_{τα}`, where `θ` extends `τ` multiplicatively
/// and root vectors of arcs are iterated brackets taken along the arc.
fn image_sign(n: usize, cur: Arc, next: Arc, tau: &BTreeMap<usize, usize>) -> i64 {
    let mut m: Option<QMatrix> = None;
    for k in cur.nodes(n) {
        let v = node_vector(n, tau[&k]);
        m = Some(match m {
            None => v,
            Some(a) => a.mul(&v).sub(&v.mul(&a)),
        });
    }
    let m = m.expect("arcs are nonempty");
    let (a, b) = next.pair(n);
    if m == unit(n, a, b) {
        1
    } else {
        debug_assert_eq!(m, unit(n, a, b).scale(&int(-1)));
        -1
    }
}

/// The ansatz together with the data used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureOutput {
    pub r: QuasiTrigR,
    pub r0: Tensor2,
    /// Dimension of the affine space of admissible `r₀`.
    pub r0_solution_dim: usize,
}

/// Diagonal coordinates of `Σ c·a ⊗ b` after applying a root functional on a leg.
fn apply_root(n: usize, node: usize, h: &QMatrix) -> Rational {
    if node == 0 {
        h[(n - 1, n - 1)].clone() - h[(0, 0)].clone()
    } else {
        h[(node - 1, node - 1)].clone() - h[(node, node)].clone()
    }
}

/// `(α ⊗ 1 + 1 ⊗ β)` on a Cartan tensor given as `(coef, a, b)` triples.
fn contract(n: usize, alpha: usize, beta: usize, terms: &[(Rational, QMatrix, QMatrix)]) -> Vec<Rational> {
    let mut out = QMatrix::zeros(n, n);
    for (c, a, b) in terms {
        let l = apply_root(n, alpha, a) * c;
        let r = apply_root(n, beta, b) * c;
        out = out.add(&b.scale(&l)).add(&a.scale(&r));
    }
    (0..n).map(|i| out[(i, i)].clone()).collect()
}

const MAX_SEARCH_VARS: usize = 16;

/// Admissible `r₀ ∈ 𝔥 ∧ 𝔥` in the basis `h_i ∧ h_j`, `i < j`, with the
/// smallest support (ties broken by the order of the basis).
fn solve_r0(d: &BdData) -> Result<(Vec<Rational>, usize)> {
    let n = d.n;
    let h = standard_cartan(n);
    let pairs: Vec<(usize, usize)> = (0..h.len()).tuple_combinations().collect();
    let mut gamma0: Vec<(Rational, QMatrix, QMatrix)> = Vec::new();
    for (key, c) in cartan_casimir(n).terms() {
        let (a, b) = (unit(n, key[0].0 as usize, key[0].1 as usize), unit(n, key[1].0 as usize, key[1].1 as usize));
        gamma0.push((c.constant_value().expect("constant Casimir").clone() * crate::scalar::rat(1, 2), a, b));
    }
    let rows = d.tau.len() * n;
    let mut a = QMatrix::zeros(rows, pairs.len());
    let mut rhs = Vec::with_capacity(rows);
    for (blk, (&al, &ta)) in d.tau.iter().enumerate() {
        for (col, &(i, j)) in pairs.iter().enumerate() {
            let w = [(int(1), h[i].clone(), h[j].clone()), (int(-1), h[j].clone(), h[i].clone())];
            for (r, v) in contract(n, al, ta, &w).into_iter().enumerate() {
                a[(blk * n + r, col)] = v;
            }
        }
        rhs.extend(contract(n, al, ta, &gamma0).into_iter().map(|v| -v));
    }
    let (particular, kernel_dim) = match solve_exact(&a, &rhs)? {
        Solution::Unique(v) => return Ok((v, 0)),
        Solution::Underdetermined { particular, kernel } => (particular, kernel.len()),
        Solution::Inconsistent { .. } => {
            return Err(Error::NoAdmissibleR0("the constraint on r₀ has no solution in 𝔥 ∧ 𝔥".into()))
        }
    };
    if pairs.len() > MAX_SEARCH_VARS {
        return Ok((particular, kernel_dim));
    }
    for size in 0..=pairs.len() {
        for support in (0..pairs.len()).combinations(size) {
            let sub = QMatrix::from_fn(rows, size, |r, c| a[(r, support[c])].clone());
            let v = match solve_exact(&sub, &rhs)? {
                Solution::Unique(v) => v,
                Solution::Underdetermined { particular, .. } => particular,
                Solution::Inconsistent { .. } => continue,
            };
            let mut full = vec![int(0); pairs.len()];
            for (k, val) in support.into_iter().zip(v) {
                full[k] = val;
            }
            return Ok((full, kernel_dim));
        }
    }
    unreachable!("the full support was found consistent above")
}

/// `r = r_st + r₀ + Σ_{α ∈ Span Γ₁⁺} Σ_k θ^k(e_α) ∧ e_{−α}` with affine roots
/// decorated by `x` on the left leg and `y` on the right leg. `θ` is the
/// extension of `τ` to a Lie algebra map, so orientation-reversing `τ` picks up
/// signs on composite roots.
pub fn bd_conjecture_r(d: &BdData, r0: Option<&Tensor2>) -> Result<ConjectureOutput> {
    d.validate()?;
    let n = d.n;
    let (r0, dim) = match r0 {
        Some(t) => (t.clone(), 0),
        None => {
            let (coef, dim) = solve_r0(d)?;
            let h = standard_cartan(n);
            let mut t = Tensor2::zero(n);
            for ((i, j), c) in (0..h.len()).tuple_combinations().zip(coef) {
                if c != int(0) {
                    let cp = Polynomial::constant(c);
                    t.add_outer(&cp, &h[i], &h[j]);
                    t.add_outer(&-&cp, &h[j], &h[i]);
                }
            }
            (t, dim)
        }
    };
    let x = Polynomial::var(Var::X);
    let y = Polynomial::var(Var::Y);
    let mut p = r_standard(n).into_p().add(&r0);
    for (i, j) in positive_roots(n) {
        let alpha = Arc { start: i, len: j - i };
        if !alpha.nodes(n).all(|k| d.gamma1.contains(&k)) {
            continue;
        }
        let neg = unit(n, j, i);
        let mut cur = alpha;
        let mut sign = 1;
        loop {
            let image: BTreeSet<usize> = cur.nodes(n).map(|k| d.tau[&k]).collect();
            let next = Arc::from_nodes(n, &image)
                .ok_or_else(|| Error::InvalidBdData(format!("τ maps the root {:?} to a non-root", cur.pair(n))))?;
            sign *= image_sign(n, cur, next, &d.tau);
            let (a, b) = next.pair(n);
            let e = unit(n, a, b);
            let s = Polynomial::int(sign);
            if next.is_affine(n) {
                p.add_outer(&(&s * &x), &e, &neg);
                p.add_outer(&-&(&s * &y), &neg, &e);
            } else {
                p.add_outer(&s, &e, &neg);
                p.add_outer(&-&s, &neg, &e);
            }
            if !next.nodes(n).all(|k| d.gamma1.contains(&k)) {
                break;
            }
            cur = next;
        }
    }
    Ok(ConjectureOutput { r: QuasiTrigR::new(p), r0, r0_solution_dim: dim })
}
