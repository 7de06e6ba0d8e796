use qtrig_core::render::{group, render_latex, render_text, RDocument, BD_LABELS, SHIFT_LABELS};
use qtrig_core::roots::{build_rc, cartan_part, u_part, ShiftData};
use qtrig_core::tensor::r_standard;
use qtrig_core::Error;

fn doc(n: usize, c: usize) -> RDocument {
    RDocument::new(n, Some(c), build_rc(&ShiftData::new(n, c).unwrap()))
}

#[test]
fn json_round_trip_is_a_fixed_point() {
    for s in ShiftData::all_coprime(2, 5) {
        let d = doc(s.n(), s.c());
        let once = d.to_json_string();
        let back = RDocument::parse(&once).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json_string(), once);
    }
    let plain = RDocument::new(3, None, r_standard(3));
    assert_eq!(RDocument::parse(&plain.to_json_string()).unwrap(), plain);
}

#[test]
fn sl2_document() {
    let json = doc(2, 1).to_json_string();
    assert!(json.contains(r#""singular": "x/(y-x)*casimir""#));
    assert!(json.contains(r#"{"left":[2,1],"right":[2,1],"coeff":"x - y"}"#));
    assert!(json.contains(r#"{"left":[1,1],"right":[1,1],"coeff":"1/4"}"#));
}

#[test]
fn grouping_recovers_the_two_parts() {
    for s in ShiftData::all_coprime(2, 5) {
        let g = group(&build_rc(&s));
        assert_eq!(g.off_cartan, u_part(&s));
        assert_eq!(g.cartan, cartan_part(&s));
    }
}

#[test]
fn text_uses_wedges_for_constant_antisymmetric_pairs() {
    let text = render_text(&doc(3, 1), SHIFT_LABELS);
    assert!(text.starts_with("sl_3 with c = 1\n"));
    assert!(text.contains("u_c = -e21 ^ e23 + (x - y)*e21 (x) e31"), "{text}");
    assert!(text.contains("x*e31 (x) e32 - y*e32 (x) e31"));
    assert!(text.contains("t_c = -1/6*e11 ^ e22 + 1/6*e11 ^ e33 - 1/6*e22 ^ e33"));
    let std = render_text(&RDocument::new(2, None, r_standard(2)), BD_LABELS);
    assert!(std.contains("u = 0\nr_0 = 0\n"));
}

#[test]
fn latex_output() {
    let tex = render_latex(&doc(3, 2), SHIFT_LABELS);
    assert!(tex.starts_with("\\begin{align*}\n") && tex.ends_with("\\end{align*}\n"));
    assert!(tex.contains("u_c(x,y) &= "));
    assert!(tex.contains("\\left(x - y\\right) e_{31} \\otimes e_{32}"), "{tex}");
    assert!(tex.contains("\\frac{1}{6} e_{11} \\wedge e_{22}"));
    assert!(render_latex(&doc(2, 1), BD_LABELS).contains("r_\\circ &= 0."));
}

#[test]
fn malformed_documents() {
    let good = doc(2, 1).to_json_string();
    let cases = [
        good.replace("qtr-1", "qtr-9"),
        good.replace("x/(y-x)*casimir", "casimir"),
        good.replace("[2,1],\"coeff\":\"x - y\"", "[3,1],\"coeff\":\"x - y\""),
        good.replace("\"x - y\"", "\"x - w\""),
        "{".to_string(),
        r#"{"schema":"qtr-1","n":2}"#.to_string(),
    ];
    for bad in cases {
        assert!(matches!(RDocument::parse(&bad), Err(Error::Parse(_))), "{bad}");
    }
}
