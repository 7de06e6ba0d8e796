mod common;

use common::{
    cybe_defect_at, e, from_numerator, numerator_of, sample_points, sl2_casimir_by_hand, sl2_trigonometric_numerator,
    tensor,
};
use qtrig_core::geometry::{make_j, sharp, BlockShape};
use qtrig_core::lie::casimir;
use qtrig_core::roots::{build_rc, ShiftData};
use qtrig_core::scalar::{int, QMatrix, Var};
use qtrig_core::tensor::{
    check_skew, co_jacobi, cobracket, cybe_residual, gauge_constant, nondegenerate_at, r_standard, QuasiTrigR, Tensor2,
};
use qtrig_core::Error;

#[test]
fn standard_sl2_matches_closed_form() {
    // ¼(y+x)/(y−x)·h⊗h + y/(y−x)·e⊗f + x/(y−x)·f⊗e
    let p = from_numerator(&sl2_trigonometric_numerator("1/4*y + 1/4*x", false), &sl2_casimir_by_hand());
    assert_eq!(r_standard(2).p(), &p);
    let expected = tensor(
        2,
        &[("1/4", (1, 1), (1, 1)), ("-1/4", (1, 1), (2, 2)), ("-1/4", (2, 2), (1, 1)), ("1/4", (2, 2), (2, 2))],
    );
    assert_eq!(p, expected.add(&tensor(2, &[("1", (1, 2), (2, 1))])));
}

#[test]
fn sl2_display_with_half_cartan_coefficient_is_not_a_solution() {
    let half = sl2_trigonometric_numerator("1/2*y + 1/2*x", false);
    let quarter = sl2_trigonometric_numerator("1/4*y + 1/4*x", false);
    for pt in sample_points() {
        assert!(cybe_defect_at(&half, pt.clone()) > 0);
        assert_eq!(cybe_defect_at(&quarter, pt), 0);
    }
}

#[test]
fn pointwise_oracle_agrees_with_residual() {
    let perturbed = QuasiTrigR::new(r_standard(2).p().add(&tensor(2, &[("1", (1, 2), (1, 2))])));
    let cases = [
        (r_standard(2), true),
        (r_standard(3), true),
        (build_rc(&ShiftData::new(2, 1).unwrap()), true),
        (build_rc(&ShiftData::new(3, 1).unwrap()), true),
        (perturbed, false),
    ];
    for (r, solves) in cases {
        assert_eq!(cybe_residual(&r).is_zero(), solves);
        let pointwise = sample_points().iter().all(|pt| cybe_defect_at(&numerator_of(&r), pt.clone()) == 0);
        assert_eq!(pointwise, solves);
    }
}

#[test]
fn residual_uses_spectral_variables() {
    let bad = QuasiTrigR::new(r_standard(2).p().add(&tensor(2, &[("1", (1, 2), (1, 2))])));
    let res = cybe_residual(&bad);
    let vars: std::collections::BTreeSet<Var> = res.terms().flat_map(|(_, c)| c.variables()).collect();
    assert!(vars.iter().all(|v| matches!(v, Var::X1 | Var::X2 | Var::X3)));
}

#[test]
fn skewness() {
    for n in 2..=4 {
        assert!(check_skew(&r_standard(n)));
    }
    let bad = QuasiTrigR::new(r_standard(2).p().add(&tensor(2, &[("1", (1, 2), (1, 2))])));
    assert!(!check_skew(&bad));
    assert!(check_skew(&build_rc(&ShiftData::new(3, 1).unwrap())));
}

#[test]
fn nondegeneracy() {
    assert!(nondegenerate_at(&r_standard(2), &int(1), &int(2)).unwrap());
    let rc = build_rc(&ShiftData::new(3, 1).unwrap());
    for (x0, y0) in [(int(1), int(2)), (int(2), int(5)), (int(-1), int(3))] {
        assert!(nondegenerate_at(&rc, &x0, &y0).unwrap());
    }
    assert_eq!(nondegenerate_at(&rc, &int(1), &int(1)), Err(Error::Pole));
}

#[test]
fn degenerate_tensor_has_low_rank() {
    // x/(y−x)γ + p with p = −x/(y−x)γ at the point (1,2) is the zero tensor.
    let p = casimir(2).scale_rational(&int(-1));
    assert!(!nondegenerate_at(&QuasiTrigR::new(p), &int(1), &int(2)).unwrap());
}

#[test]
fn cobracket_of_constant_cartan_element() {
    let h = QMatrix::from_fn(2, 2, |i, j| if i == j { int(1 - 2 * i as i64) } else { int(0) });
    let d = cobracket(&r_standard(2), &[(0, h.clone())]).unwrap();
    assert!(d.terms().all(|(_, c)| c.total_degree().unwrap_or(0) == 0));
    assert!(co_jacobi(&r_standard(2), &[(0, h)]).unwrap().is_zero());
}

#[test]
fn cobracket_of_linear_element() {
    let d = cobracket(&r_standard(2), &[(1, e(2, 1, 2))]).unwrap();
    assert!(!d.is_zero());
    assert!(d.terms().all(|(_, c)| c.total_degree().unwrap() <= 2));
    assert!(d.terms().all(|(_, c)| c.variables().iter().all(|v| matches!(v, Var::X1 | Var::X2))));
}

#[test]
fn constant_gauges() {
    let r = build_rc(&ShiftData::new(3, 1).unwrap());
    assert_eq!(gauge_constant(&r, &QMatrix::identity(3)).unwrap(), r);

    let shape = BlockShape::new(1, 2).unwrap();
    let g = gauge_constant(&r, &make_j(shape)).unwrap();
    let mut expected = Tensor2::zero(3);
    for (k, c) in r.p().terms() {
        let a = sharp(shape, &e(3, k[0].0 as usize, k[0].1 as usize));
        let b = sharp(shape, &e(3, k[1].0 as usize, k[1].1 as usize));
        expected.add_outer(c, &a, &b);
    }
    assert_eq!(g.p(), &expected);
    assert!(cybe_residual(&g).is_zero());
    assert!(check_skew(&g));

    let upper = QMatrix::from_rows(vec![
        vec![int(1), int(2), int(0)],
        vec![int(0), int(1), int(-1)],
        vec![int(0), int(0), int(1)],
    ])
    .unwrap();
    let g = gauge_constant(&r, &upper).unwrap();
    assert!(cybe_residual(&g).is_zero());
    assert!(check_skew(&g));

    let singular = QMatrix::zeros(3, 3);
    assert!(gauge_constant(&r, &singular).is_err());
}
