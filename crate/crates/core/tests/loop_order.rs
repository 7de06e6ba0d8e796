mod common;

use common::{e, random_sl, rng};
use proptest::prelude::*;
use qtrig_core::geometry::BlockShape;
use qtrig_core::lie::{OrderedBasis, RootLabel};
use qtrig_core::loop_order::{
    b_cd_basis, check_bracket_closed, check_isotropic, check_o_perp, check_transversal, claims_mismatches,
    dual_basis_element, dual_elements, iota, loop_pairing, n_cd_basis, nabla, nabla_delta_check, order_w_cd,
    order_w_std, p_cd, p_cd_described, p_cd_image, pair_form, plain_diagonal, r_from_order, reduce_order,
    same_windowed_span, twisted_diagonal, twisted_lift, FinitePairSubspace, OrderSpec, WindowedLoopPair,
    DEFAULT_WINDOW,
};
use qtrig_core::roots::{build_rc, ShiftData};
use qtrig_core::scalar::{int, QMatrix};
use qtrig_core::tensor::r_standard;
use qtrig_core::Error;

const W: (i32, i32) = DEFAULT_WINDOW;

fn h2() -> QMatrix {
    QMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            int(0)
        } else if i == 0 {
            int(1)
        } else {
            int(-1)
        }
    })
}

fn mono(k: i32, x: &QMatrix) -> WindowedLoopPair {
    WindowedLoopPair::loop_monomial(W, k, x).unwrap()
}

fn pair(f: &QMatrix, g: &QMatrix) -> WindowedLoopPair {
    mono(0, f).add(&WindowedLoopPair::finite(W, g))
}

/// True when `v` lies in the span of the window basis plus the tail slice.
fn in_order(w: &OrderSpec, v: &WindowedLoopPair) -> bool {
    let mut span: Vec<WindowedLoopPair> = w.basis.clone();
    span.extend(w.tail_slice());
    let mut more = span.clone();
    more.push(v.clone());
    same_windowed_span(w.n, w.window, &span, &more)
}

#[test]
fn pairing_examples() {
    let a = mono(1, &e(2, 1, 2));
    let b = mono(-1, &e(2, 2, 1));
    assert_eq!(loop_pairing(&a, &b).unwrap(), int(1));
    let h = WindowedLoopPair::finite(W, &h2());
    assert_eq!(loop_pairing(&h, &h).unwrap(), int(-2));
    assert_eq!(loop_pairing(&mono(1, &e(2, 1, 2)), &mono(1, &e(2, 2, 1))).unwrap(), int(0));
}

#[test]
fn pairing_rejects_narrow_windows() {
    let a = WindowedLoopPair::loop_monomial((-1, 3), 3, &e(2, 1, 2)).unwrap();
    let b = WindowedLoopPair::loop_monomial((-1, 3), -1, &e(2, 2, 1)).unwrap();
    assert!(matches!(loop_pairing(&a, &b), Err(Error::WindowTooNarrow(_))));
}

#[test]
fn standard_order_contents() {
    let w = order_w_std(2, W).unwrap();
    let (e12, e21, h) = (e(2, 1, 2), e(2, 2, 1), h2());
    assert!(in_order(&w, &mono(0, &e21)));
    assert!(in_order(&w, &WindowedLoopPair::finite(W, &e12)));
    assert!(in_order(&w, &pair(&h, &h.scale(&int(-1)))));
    for b in [&e12, &e21, &h] {
        assert!(in_order(&w, &mono(-1, b)));
    }
    assert!(!in_order(&w, &mono(0, &e12)));
    assert!(!in_order(&w, &pair(&h, &h)));
}

#[test]
fn standard_order_axioms() {
    for n in 2..=4 {
        let w = order_w_std(n, W).unwrap();
        assert!(check_isotropic(&w).unwrap());
        assert!(check_transversal(&w).unwrap());
        assert!(check_bracket_closed(&w).unwrap());
    }
    assert!(check_transversal(&order_w_std(2, (-2, 2)).unwrap()).unwrap());
}

#[test]
fn adjoining_e_breaks_isotropy() {
    let mut w = order_w_std(2, W).unwrap();
    w.basis.push(mono(0, &e(2, 1, 2)));
    assert!(!check_isotropic(&w).unwrap());
}

#[test]
fn polynomial_part_is_not_transversal_to_itself() {
    let basis = OrderedBasis::standard(2);
    let mut gens = Vec::new();
    for k in 0..=W.1 {
        for x in basis.elements() {
            let mut coeffs = vec![QMatrix::zeros(2, 2); k as usize + 1];
            coeffs[k as usize] = x;
            gens.push(WindowedLoopPair::jmath(W, &coeffs).unwrap());
        }
    }
    let w = OrderSpec { name: "P".into(), n: 2, window: W, basis: gens, tail_degree: None };
    assert!(!check_transversal(&w).unwrap());
}

#[test]
fn standard_order_gives_standard_solution() {
    for n in 2..=3 {
        assert_eq!(r_from_order(&order_w_std(n, W).unwrap()).unwrap(), r_standard(n));
    }
}

#[test]
fn standard_order_dual_elements() {
    let w = order_w_std(3, W).unwrap();
    let basis = OrderedBasis::standard(3);
    for (label, _) in basis.items() {
        if matches!(label, RootLabel::Pos(..)) {
            let d = dual_basis_element(&w, &basis, 0, *label).unwrap();
            assert!(d.p.iter().all(QMatrix::is_zero), "{label:?}");
        }
        let deep = dual_basis_element(&w, &basis, 2, *label).unwrap();
        assert!(deep.p.iter().all(QMatrix::is_zero));
    }
}

#[test]
fn shift_order_dual_element_for_sl2() {
    let s = ShiftData::new(2, 1).unwrap();
    let w = order_w_cd(&s, W).unwrap();
    let d = dual_basis_element(&w, &OrderedBasis::standard(2), 0, RootLabel::Neg(2, 1)).unwrap();
    // p(z) = −z·e21
    let nonzero: Vec<usize> = (0..d.p.len()).filter(|&k| !d.p[k].is_zero()).collect();
    assert_eq!(nonzero, vec![1]);
    assert_eq!(d.p[1], e(2, 2, 1).scale(&int(-1)));
}

#[test]
fn dual_elements_are_dual() {
    for s in ShiftData::all_coprime(2, 3) {
        let w = order_w_cd(&s, W).unwrap();
        let basis = OrderedBasis::standard(s.n());
        let duals = dual_elements(&w, &basis).unwrap();
        for d in &duals {
            assert!(in_order(&w, &d.w));
            for (k, label, x) in qtrig_core::loop_order::p_window(&basis, W) {
                let expected = int((k == d.k && label == d.label) as i64);
                assert_eq!(loop_pairing(&x, &d.w).unwrap(), expected);
            }
        }
    }
}

#[test]
fn shift_orders_reproduce_built_solutions() {
    for s in ShiftData::all_coprime(2, 4) {
        let w = order_w_cd(&s, W).unwrap();
        assert!(check_isotropic(&w).unwrap());
        assert!(check_transversal(&w).unwrap());
        assert_eq!(r_from_order(&w).unwrap(), build_rc(&s));
        assert!(claims_mismatches(&s, W).unwrap().is_empty());
    }
}

#[test]
fn twisted_lift_for_sl2() {
    let shape = BlockShape::new(1, 1).unwrap();
    let (e12, e21, h) = (e(2, 1, 2), e(2, 2, 1), h2());
    assert_eq!(twisted_lift(shape, W, &e12).unwrap(), mono(-1, &e12).add(&WindowedLoopPair::finite(W, &e21)));
    assert_eq!(twisted_lift(shape, W, &e21).unwrap(), mono(1, &e21).add(&WindowedLoopPair::finite(W, &e12)));
    assert_eq!(twisted_lift(shape, W, &h).unwrap(), pair(&h, &h.scale(&int(-1))));
}

#[test]
fn borel_and_nilpotent_parts_for_sl2() {
    let shape = BlockShape::new(1, 1).unwrap();
    let b = b_cd_basis(shape);
    let nil = n_cd_basis(shape);
    assert_eq!(b.len(), 2);
    assert_eq!(nil, vec![e(2, 2, 1)]);
    for m in &b {
        assert_eq!(m[(0, 1)], int(0));
        assert_eq!(m.trace(), int(0));
    }
}

#[test]
fn shift_order_basis_size() {
    for s in ShiftData::all_coprime(2, 5) {
        let shape = BlockShape::from(s);
        let g = s.n() * s.n() - 1;
        let w = order_w_cd(&s, W).unwrap();
        assert_eq!(w.basis.len(), 2 * g + b_cd_basis(shape).len() + n_cd_basis(shape).len());
        assert_eq!(w.tail_degree, Some(-3));
    }
}

#[test]
fn order_spec_json_round_trip() {
    let w = order_w_cd(&ShiftData::new(3, 2).unwrap(), W).unwrap();
    let back = OrderSpec::from_json(&w.to_json()).unwrap();
    assert_eq!(back.basis, w.basis);
    assert_eq!((back.n, back.window, back.tail_degree), (w.n, w.window, w.tail_degree));
    assert!(OrderSpec::from_json(&serde_json::json!({"name": "x"})).is_err());
}

#[test]
fn lagrangian_decomposition() {
    for s in ShiftData::all_coprime(2, 6) {
        let rep = nabla_delta_check(&s);
        assert_eq!(rep.intersection_dim, 0);
        assert!(rep.decomposition_ok && rep.both_lagrangian && rep.both_subalgebras);
    }
}

fn subalgebra_by_rank(s: &FinitePairSubspace) -> bool {
    s.basis.iter().all(|a| {
        s.basis.iter().all(|b| {
            let mut more = s.basis.clone();
            more.push((a.0.commutator(&b.0), a.1.commutator(&b.1)));
            FinitePairSubspace::spanned_by(s.n, more).dim() == s.dim()
        })
    })
}

#[test]
fn subalgebra_test_agrees_with_rank_oracle() {
    let z = QMatrix::zeros(3, 3);
    let mut pool = Vec::new();
    for (i, j) in [(1, 2), (2, 1), (1, 3), (3, 2)] {
        pool.push((e(3, i, j), z.clone()));
        pool.push((z.clone(), e(3, i, j)));
    }
    let h = e(3, 1, 1).sub(&e(3, 2, 2));
    pool.push((h.clone(), h));
    let mut seen = [0, 0];
    for mask in 0u32..(1 << pool.len()) {
        let gens = pool.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, g)| g.clone()).collect();
        let s = FinitePairSubspace::spanned_by(3, gens);
        let expected = subalgebra_by_rank(&s);
        assert_eq!(s.is_subalgebra(), expected, "mask {mask:b}");
        seen[expected as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

#[test]
fn removing_a_generator_can_break_bracket_closure() {
    let w = order_w_std(2, W).unwrap();
    assert!(check_bracket_closed(&w).unwrap());
    let mut broken = 0;
    for k in 0..w.basis.len() {
        let mut v = w.clone();
        v.basis.remove(k);
        let pair_closed = (0..v.basis.len()).all(|i| {
            (i + 1..v.basis.len()).all(|j| in_order(&v, &v.basis[i].bracket(&v.basis[j], v.tail_degree).unwrap()))
        });
        let closed = check_bracket_closed(&v).unwrap();
        if !pair_closed {
            assert!(!closed, "removal {k}");
            broken += 1;
        }
    }
    assert!(broken > 0);
}

#[test]
fn plain_diagonal_meets_nabla() {
    let shape = BlockShape::new(1, 1).unwrap();
    assert!(plain_diagonal(2).intersection_dim(&nabla(shape)) > 0);
    assert_eq!(twisted_diagonal(shape).intersection_dim(&nabla(shape)), 0);
}

#[test]
fn reduction_to_finite_pairs() {
    for s in ShiftData::all_coprime(2, 4) {
        let shape = BlockShape::from(s);
        let w = order_w_cd(&s, W).unwrap();
        assert!(reduce_order(&w, &s).unwrap().same_span(&twisted_diagonal(shape)));
        assert!(p_cd_image(&s, W).unwrap().same_span(&nabla(shape)));
        assert!(same_windowed_span(s.n(), W, &p_cd(&s, W), &p_cd_described(&s, W).unwrap()));
        assert!(check_o_perp(&s));
    }
}

#[test]
fn upper_right_block_in_degree_zero_is_outside_o() {
    let s = ShiftData::new(3, 1).unwrap();
    let mut w = order_w_std(3, W).unwrap();
    assert!(reduce_order(&w, &s).is_ok());
    w.basis.push(WindowedLoopPair::loop_monomial(W, 0, &e(3, 1, 2)).unwrap());
    assert!(matches!(reduce_order(&w, &s), Err(Error::NotInsideO(_))));
}

#[test]
fn iota_is_an_isometry() {
    for s in ShiftData::all_coprime(2, 4) {
        let shape = BlockShape::from(s);
        let mut vs = order_w_cd(&s, W).unwrap().basis;
        vs.extend(p_cd(&s, W));
        let images: Vec<_> = vs.iter().map(|v| iota(shape, v).unwrap()).collect();
        for (a, ia) in vs.iter().zip(&images) {
            for (b, ib) in vs.iter().zip(&images) {
                assert_eq!(pair_form(ia, ib), loop_pairing(a, b).unwrap());
            }
        }
    }
}

#[test]
fn polynomial_part_is_isotropic_for_random_elements() {
    let mut r = rng(7);
    for n in 2..=3 {
        for _ in 0..10 {
            let p: Vec<QMatrix> = (0..3).map(|_| random_sl(&mut r, n)).collect();
            let q: Vec<QMatrix> = (0..3).map(|_| random_sl(&mut r, n)).collect();
            let a = WindowedLoopPair::jmath(W, &p).unwrap();
            let b = WindowedLoopPair::jmath(W, &q).unwrap();
            assert_eq!(loop_pairing(&a, &b).unwrap(), int(0));
        }
    }
}

proptest! {
    #[test]
    fn pairing_is_symmetric(v in prop::collection::vec(-3i64..=3, 2 * 4 * 7 + 4)) {
        let coords: Vec<_> = v.into_iter().map(int).collect();
        let (a, b) = coords.split_at(4 * 7 + 2);
        let a = WindowedLoopPair::from_coords(2, W, &pad(a));
        let b = WindowedLoopPair::from_coords(2, W, &pad(b));
        prop_assert_eq!(loop_pairing(&a, &b).unwrap(), loop_pairing(&b, &a).unwrap());
    }
}

fn pad(v: &[qtrig_core::scalar::Rational]) -> Vec<qtrig_core::scalar::Rational> {
    let len = WindowedLoopPair::zero(2, W).coords().len();
    let mut out = v.to_vec();
    out.resize(len, int(0));
    out
}
