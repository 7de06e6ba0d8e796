//! Helpers shared by the integration tests.
#![allow(dead_code)]

use qtrig_core::lie::unit;
use qtrig_core::scalar::{int, rat, Polynomial, QMatrix, Rational, Var};
use qtrig_core::tensor::{QuasiTrigR, Tensor2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn poly(s: &str) -> Polynomial {
    Polynomial::parse(s).expect("valid polynomial literal")
}

pub fn e(n: usize, i: usize, j: usize) -> QMatrix {
    unit(n, i, j)
}

/// Random traceless matrix with small integer entries.
pub fn random_sl(rng: &mut StdRng, n: usize) -> QMatrix {
    let v: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-3..=3)).collect();
    let mut m = QMatrix::from_fn(n, n, |i, j| int(v[i * n + j]));
    let t = m.trace();
    m[(n - 1, n - 1)] = &m[(n - 1, n - 1)] - &t;
    m
}

/// `Σ coef·a⊗b` from matrix units given as `(coef, (i,j), (k,l))`.
pub type Term<'a> = (&'a str, (usize, usize), (usize, usize));

pub fn tensor(n: usize, terms: &[Term]) -> Tensor2 {
    let mut t = Tensor2::zero(n);
    for (c, a, b) in terms {
        t.add_outer(&poly(c), &unit(n, a.0, a.1), &unit(n, b.0, b.1));
    }
    t
}

/// Canonical part `p = (N − x·γ)/(y − x)` of an r-matrix written as `N/(y − x)`.
pub fn from_numerator(numerator: &Tensor2, gamma: &Tensor2) -> Tensor2 {
    let shifted = numerator.sub(&gamma.scale(&poly("x")));
    let mut p = Tensor2::zero(numerator.n());
    for (k, c) in shifted.terms() {
        let q = c.div_by_difference(Var::X, Var::Y).expect("numerator minus x*casimir is divisible by y - x");
        p.add_term(*k, q);
    }
    p
}

/// `½ h⊗h + e⊗f + f⊗e`, written out by hand.
pub fn sl2_casimir_by_hand() -> Tensor2 {
    tensor(
        2,
        &[
            ("1/2", (1, 1), (1, 1)),
            ("-1/2", (1, 1), (2, 2)),
            ("-1/2", (2, 2), (1, 1)),
            ("1/2", (2, 2), (2, 2)),
            ("1", (1, 2), (2, 1)),
            ("1", (2, 1), (1, 2)),
        ],
    )
}

/// The n = 2 solution as a numerator over `y − x`. `hh` is the coefficient
/// of `h⊗h`; the `(x − y) f⊗f` term is included when `with_ff` holds.
pub fn sl2_trigonometric_numerator(hh: &str, with_ff: bool) -> Tensor2 {
    let h = QMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            int(0)
        } else if i == 0 {
            int(1)
        } else {
            int(-1)
        }
    });
    let mut n = tensor(2, &[("y", (1, 2), (2, 1)), ("x", (2, 1), (1, 2))]);
    n.add_outer(&poly(hh), &h, &h);
    if with_ff {
        n.add_outer(&poly("-x^2 + 2*x*y - y^2"), &e(2, 2, 1), &e(2, 2, 1));
    }
    n
}

/// Number of nonzero components of `[r12,r13] + [r13,r23] + [r12,r23]` at
/// `(x1, x2, x3)`, where `r(a, b) = numerator(a, b)/(b − a)`. Computed by dense
/// expansion in `gl_n^{⊗3}`, independently of the symbolic residual.
pub fn cybe_defect_at(numerator: &Tensor2, pts: [Rational; 3]) -> usize {
    let n = numerator.n();
    let value = |a: &Rational, b: &Rational| -> Vec<(QMatrix, QMatrix, Rational)> {
        let t = numerator.eval(&[(Var::X, a.clone()), (Var::Y, b.clone())]).expect("numerator is in x, y");
        let s = int(1) / (b - a);
        t.terms()
            .map(|(k, c)| {
                let l = unit(n, k[0].0 as usize, k[0].1 as usize);
                let r = unit(n, k[1].0 as usize, k[1].1 as usize);
                (l, r, c.constant_value().expect("evaluated") * &s)
            })
            .collect()
    };
    let (r12, r13, r23) = (value(&pts[0], &pts[1]), value(&pts[0], &pts[2]), value(&pts[1], &pts[2]));
    let m = n * n;
    let mut acc = vec![int(0); m * m * m];
    let mut push = |legs: [QMatrix; 3], c: Rational| {
        for a in 0..m {
            let va = &legs[0][(a / n, a % n)];
            if *va == int(0) {
                continue;
            }
            for b in 0..m {
                let vb = &legs[1][(b / n, b % n)];
                if *vb == int(0) {
                    continue;
                }
                for d in 0..m {
                    let vd = &legs[2][(d / n, d % n)];
                    if *vd != int(0) {
                        acc[(a * m + b) * m + d] += &c * &(va * &(vb * vd));
                    }
                }
            }
        }
    };
    for (a, b, c) in &r12 {
        for (p, q, s) in &r13 {
            push([a.commutator(p), b.clone(), q.clone()], c * s);
        }
        for (p, q, s) in &r23 {
            push([a.clone(), b.commutator(p), q.clone()], c * s);
        }
    }
    for (a, b, c) in &r13 {
        for (p, q, s) in &r23 {
            push([a.clone(), p.clone(), b.commutator(q)], c * s);
        }
    }
    acc.iter().filter(|v| **v != int(0)).count()
}

/// Numerator `x·γ + (y − x)·p` of a canonical r-matrix.
pub fn numerator_of(r: &QuasiTrigR) -> Tensor2 {
    r.numerator(Var::X, Var::Y)
}

pub fn sample_points() -> [[Rational; 3]; 3] {
    [[int(1), int(2), int(4)], [rat(1, 2), int(3), int(-2)], [int(-1), rat(5, 3), int(7)]]
}
