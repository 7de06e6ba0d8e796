//! Verification cells run by `qtrig verify`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use qtrig_core::geometry::{
    make_k, res_inverse_explicit, res_inverse_solved, rsharp_mismatches, sol_space, BlockShape,
};
use qtrig_core::lie::OrderedBasis;
use qtrig_core::loop_order::{
    check_bracket_closed, check_isotropic, check_transversal, claims_mismatches, nabla, nabla_delta_check, order_w_cd,
    p_cd_image, r_from_order, reduce_order, twisted_diagonal,
};
use qtrig_core::roots::{build_rc, decompose_nabla, ShiftData};
use qtrig_core::scalar::int;
use qtrig_core::tensor::{check_skew, cybe_residual, nondegenerate_at, QuasiTrigR};
use qtrig_core::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Cybe,
    Skew,
    Order,
    Geometry,
    Nabla,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Cybe, Suite::Skew, Suite::Order, Suite::Geometry, Suite::Nabla];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Cybe => "cybe",
            Suite::Skew => "skew",
            Suite::Order => "order",
            Suite::Geometry => "geometry",
            Suite::Nabla => "nabla",
        };
        f.write_str(s)
    }
}

/// One line of a report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub n: usize,
    pub c: usize,
    pub suite: Suite,
    pub check: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub witness: Option<String>,
}

/// A named check whose failure carries a witness.
type Check = (&'static str, std::result::Result<(), String>);

fn expect(name: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Check {
    (name, if ok { Ok(()) } else { Err(witness()) })
}

fn lift(name: &'static str, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| (name, Err(e.to_string())))
}

fn first_difference(a: &QuasiTrigR, b: &QuasiTrigR) -> String {
    let d = a.p().sub(b.p());
    let first = d
        .terms()
        .next()
        .map(|(k, v)| format!("differs at e{}{} ⊗ e{}{} by {}", k[0].0, k[0].1, k[1].0, k[1].1, v.render()));
    first.unwrap_or_else(|| "no difference".into())
}

fn cybe_checks(s: &ShiftData) -> Vec<Check> {
    let res = cybe_residual(&build_rc(s));
    vec![expect("residual = 0", res.is_zero(), || {
        let (k, v) = res.terms().next().expect("nonzero residual has a term");
        format!(
            "{} nonzero terms, first e{}{} ⊗ e{}{} ⊗ e{}{} with coefficient {}",
            res.len(),
            k[0].0,
            k[0].1,
            k[1].0,
            k[1].1,
            k[2].0,
            k[2].1,
            v.render()
        )
    })]
}

fn skew_checks(s: &ShiftData) -> Vec<Check> {
    let r = build_rc(s);
    let mut out = vec![expect("skew-symmetric", check_skew(&r), || "p + p^21(y,x) != casimir".into())];
    for (x0, y0) in [(1, 2), (2, 5), (-1, 3)] {
        let name = match x0 {
            1 => "nondegenerate at (1,2)",
            2 => "nondegenerate at (2,5)",
            _ => "nondegenerate at (-1,3)",
        };
        out.push(lift(
            name,
            nondegenerate_at(&r, &int(x0), &int(y0)).map(|ok| expect(name, ok, || "rank below n^2 - 1".into())),
        ));
    }
    out
}

fn order_checks(s: &ShiftData, window: (i32, i32)) -> Vec<Check> {
    let w = match order_w_cd(s, window) {
        Ok(w) => w,
        Err(e) => return vec![("build W_(c,d)", Err(e.to_string()))],
    };
    let shape = BlockShape::from(*s);
    let bool_check = |name: &'static str, r: Result<bool>| {
        lift(name, r.map(|ok| expect(name, ok, || "check returned false".into())))
    };
    vec![
        bool_check("isotropic", check_isotropic(&w)),
        bool_check("transversal", check_transversal(&w)),
        bool_check("bracket-closed (window)", check_bracket_closed(&w)),
        lift(
            "r_from_order = build_rc",
            r_from_order(&w).map(|r| {
                let rc = build_rc(s);
                expect("r_from_order = build_rc", r == rc, || first_difference(&r, &rc))
            }),
        ),
        lift(
            "dual elements match closed table",
            claims_mismatches(s, window).map(|bad| {
                expect("dual elements match closed table", bad.is_empty(), || format!("mismatch at {bad:?}"))
            }),
        ),
        lift(
            "reduce_order = twisted diagonal",
            reduce_order(&w, s).map(|red| {
                expect("reduce_order = twisted diagonal", red.same_span(&twisted_diagonal(shape)), || {
                    format!("reduced dimension {}", red.dim())
                })
            }),
        ),
        lift(
            "image of P_(c,d) = nabla",
            p_cd_image(s, window).map(|img| {
                expect("image of P_(c,d) = nabla", img.same_span(&nabla(shape)), || {
                    format!("image dimension {}", img.dim())
                })
            }),
        ),
    ]
}

fn geometry_checks(s: &ShiftData) -> Vec<Check> {
    let shape = BlockShape::from(*s);
    let n = s.n();
    let mut out = vec![lift("K recursion = closed form", make_k(shape).map(|_| ("K recursion = closed form", Ok(()))))];
    let sol = match sol_space(shape) {
        Ok(sol) => sol,
        Err(e) => {
            out.push(("Sol dimension", Err(e.to_string())));
            return out;
        }
    };
    out.push(expect("Sol dimension", sol.dim() == n * n - 1, || format!("dimension {}", sol.dim())));
    let agree = OrderedBasis::standard(n).elements().into_iter().try_fold(true, |acc, g| -> Result<bool> {
        Ok(acc && res_inverse_explicit(s, &g)? == res_inverse_solved(&sol, &g)?)
    });
    out.push(lift(
        "explicit res^-1 = solved res^-1",
        agree.map(|ok| expect("explicit res^-1 = solved res^-1", ok, || "preimages differ".into())),
    ));
    out.push(lift(
        "geometric_r = build_rc",
        qtrig_core::geometry::geometric_r(s).map(|r| {
            let rc = build_rc(s);
            expect("geometric_r = build_rc", r == rc, || first_difference(&r, &rc))
        }),
    ));
    out.push(lift(
        "r# table = ev∘res^-1",
        rsharp_mismatches(s).map(|bad| expect("r# table = ev∘res^-1", bad.is_empty(), || format!("{bad:?}"))),
    ));
    out
}

fn nabla_checks(s: &ShiftData) -> Vec<Check> {
    let rep = nabla_delta_check(s);
    let decomp = OrderedBasis::standard(s.n()).elements().iter().try_for_each(|g| decompose_nabla(s, g).map(|_| ()));
    vec![
        expect("intersection = 0", rep.intersection_dim == 0, || format!("dimension {}", rep.intersection_dim)),
        expect("Lagrangian decomposition", rep.decomposition_ok && rep.both_lagrangian, || format!("{rep:?}")),
        expect("both subalgebras", rep.both_subalgebras, || format!("{rep:?}")),
        lift(
            "closed decomposition = solved decomposition",
            decomp.map(|_| ("closed decomposition = solved decomposition", Ok(()))),
        ),
    ]
}

/// Runs one `(n, c, suite)` cell.
pub fn run_cell(s: ShiftData, suite: Suite, window: (i32, i32)) -> Vec<Outcome> {
    let start = Instant::now();
    let checks = match suite {
        Suite::Cybe => cybe_checks(&s),
        Suite::Skew => skew_checks(&s),
        Suite::Order => order_checks(&s, window),
        Suite::Geometry => geometry_checks(&s),
        Suite::Nabla => nabla_checks(&s),
    };
    let seconds = start.elapsed().as_secs_f64();
    checks
        .into_iter()
        .map(|(check, r)| Outcome { n: s.n(), c: s.c(), suite, check, pass: r.is_ok(), seconds, witness: r.err() })
        .collect()
}

/// `a..b` or a single integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: FromStr + Copy + PartialOrd> FromStr for IntRange<T> {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<T>().map_err(|_| format!("`{v}` is not an integer"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok(IntRange { lo, hi })
    }
}

pub fn outcome_json(o: &Outcome) -> serde_json::Value {
    serde_json::json!({
        "n": o.n,
        "c": o.c,
        "suite": o.suite.to_string(),
        "check": o.check,
        "pass": o.pass,
        "seconds": o.seconds,
        "witness": o.witness,
    })
}

pub fn outcome_line(o: &Outcome) -> String {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let mut line = format!("n={} c={} {:<8} {:<36} {verdict} {:.3}s", o.n, o.c, o.suite, o.check, o.seconds);
    if let Some(w) = &o.witness {
        line.push_str(&format!("\n    witness: {w}"));
    }
    line
}
