//! Output documents: the `qtr-1` JSON schema, LaTeX and plain text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{int, rational, Polynomial, Rational};
use crate::tensor::{r_standard, QuasiTrigR, Tensor2};

pub const SCHEMA: &str = "qtr-1";
pub const SINGULAR: &str = "x/(y-x)*casimir";

/// An r-matrix in canonical form, tagged with the shift it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct RDocument {
    pub n: usize,
    pub c: Option<usize>,
    pub r: QuasiTrigR,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    left: [u8; 2],
    right: [u8; 2],
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct DocJson {
    schema: String,
    n: usize,
    c: Option<usize>,
    singular: String,
    poly: Vec<TermJson>,
}

impl RDocument {
    pub fn new(n: usize, c: Option<usize>, r: QuasiTrigR) -> Self {
        RDocument { n, c, r }
    }

    fn doc(&self) -> DocJson {
        let poly = self
            .r
            .p()
            .terms()
            .map(|(k, v)| TermJson { left: [k[0].0, k[0].1], right: [k[1].0, k[1].1], coeff: v.render() })
            .collect();
        DocJson { schema: SCHEMA.into(), n: self.n, c: self.c, singular: SINGULAR.into(), poly }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.doc()).expect("serialisable")
    }

    /// Canonical text form: header fields, then one term per line.
    pub fn to_json_string(&self) -> String {
        let doc = self.doc();
        let v = self.to_json();
        let terms: Vec<String> =
            doc.poly.iter().map(|t| format!("    {}", serde_json::to_string(t).expect("serialisable"))).collect();
        format!(
            "{{\n  \"schema\": {},\n  \"n\": {},\n  \"c\": {},\n  \"singular\": {},\n  \"poly\": [\n{}\n  ]\n}}\n",
            v["schema"],
            v["n"],
            v["c"],
            v["singular"],
            terms.join(",\n")
        )
        .replace("[\n\n  ]", "[]")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: DocJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("document: {e}")))?;
        if raw.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema `{}`", raw.schema)));
        }
        if raw.singular != SINGULAR {
            return Err(Error::Parse(format!("unsupported singular part `{}`", raw.singular)));
        }
        let n = raw.n;
        let ok = |i: u8| (1..=n).contains(&(i as usize));
        let mut p = Tensor2::zero(n);
        for t in raw.poly {
            if !t.left.iter().chain(&t.right).all(|&i| ok(i)) {
                return Err(Error::Parse(format!("index out of range in {:?} ⊗ {:?}", t.left, t.right)));
            }
            let coeff = Polynomial::parse(&t.coeff)?;
            p.add_term([(t.left[0], t.left[1]), (t.right[0], t.right[1])], coeff);
        }
        Ok(RDocument { n, c: raw.c, r: QuasiTrigR::new(p) })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("JSON: {e}")))?;
        Self::from_json(&v)
    }
}

/// `p − p_st`, split into its Cartan ⊗ Cartan part and the rest.
pub struct Grouped {
    pub off_cartan: Tensor2,
    pub cartan: Tensor2,
}

pub fn group(r: &QuasiTrigR) -> Grouped {
    let rest = r.p().sub(r_standard(r.n()).p());
    let mut off_cartan = Tensor2::zero(r.n());
    let mut cartan = Tensor2::zero(r.n());
    for (k, v) in rest.terms() {
        let diag = k[0].0 == k[0].1 && k[1].0 == k[1].1;
        let target = if diag { &mut cartan } else { &mut off_cartan };
        target.add_term(*k, v.clone());
    }
    Grouped { off_cartan, cartan }
}

/// A tensor term list where `c·a⊗b − c·b⊗a` with constant `c` is merged
/// into `c·a∧b`.
enum Piece {
    Wedge(Polynomial, (u8, u8), (u8, u8)),
    Tensor(Polynomial, (u8, u8), (u8, u8)),
}

fn pieces(t: &Tensor2) -> Vec<Piece> {
    let mut out = Vec::new();
    for (k, v) in t.terms() {
        let (a, b) = (k[0], k[1]);
        let mirror = t.get(&[b, a]);
        if a != b && v.is_constant() && mirror == -v {
            if a < b {
                out.push(Piece::Wedge(v.clone(), a, b));
            }
            continue;
        }
        out.push(Piece::Tensor(v.clone(), a, b));
    }
    out
}

fn needs_parens(p: &Polynomial) -> bool {
    p.len() > 1
}

fn join_signed(items: Vec<(bool, String)>) -> String {
    if items.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in items.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => s.push_str(&body),
            (0, true) => s.push_str(&format!("-{body}")),
            (_, false) => s.push_str(&format!(" + {body}")),
            (_, true) => s.push_str(&format!(" - {body}")),
        }
    }
    s
}

/// Splits a coefficient into a sign and a printable magnitude.
fn signed(p: &Polynomial, paren: (&str, &str)) -> (bool, Option<String>) {
    if let Some(c) = p.constant_value() {
        let neg = c < int(0);
        let mag = rational::abs(&c);
        return (neg, (mag != int(1)).then(|| rational::render(&mag)));
    }
    if needs_parens(p) {
        return (false, Some(format!("{}{}{}", paren.0, p.render(), paren.1)));
    }
    let neg = p.terms().next().is_some_and(|(_, c)| *c < int(0));
    let body = if neg { (-p).render() } else { p.render() };
    (neg, Some(body))
}

fn text_unit((i, j): (u8, u8)) -> String {
    format!("e{i}{j}")
}

fn text_terms(t: &Tensor2) -> String {
    let items = pieces(t)
        .into_iter()
        .map(|pc| {
            let (coef, body) = match pc {
                Piece::Wedge(c, a, b) => (c, format!("{} ^ {}", text_unit(a), text_unit(b))),
                Piece::Tensor(c, a, b) => (c, format!("{} (x) {}", text_unit(a), text_unit(b))),
            };
            let (neg, mag) = signed(&coef, ("(", ")"));
            (neg, mag.map_or(body.clone(), |m| format!("{m}*{body}")))
        })
        .collect();
    join_signed(items)
}

fn latex_unit((i, j): (u8, u8)) -> String {
    format!("e_{{{i}{j}}}")
}

fn latex_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_poly(p: &Polynomial) -> String {
    let mut items = Vec::new();
    for (m, c) in p.terms().rev() {
        let vars = Polynomial::from_terms(vec![(*m, int(1))]).render();
        let mag = rational::abs(c);
        let body = match (vars.as_str(), mag == int(1)) {
            ("1", _) => latex_rational(&mag),
            (v, true) => v.replace('*', " "),
            (v, false) => format!("{} {}", latex_rational(&mag), v.replace('*', " ")),
        };
        items.push((*c < int(0), body));
    }
    join_signed(items)
}

fn latex_terms(t: &Tensor2) -> String {
    let items = pieces(t)
        .into_iter()
        .map(|pc| {
            let (coef, body) = match pc {
                Piece::Wedge(c, a, b) => (c, format!("{} \\wedge {}", latex_unit(a), latex_unit(b))),
                Piece::Tensor(c, a, b) => (c, format!("{} \\otimes {}", latex_unit(a), latex_unit(b))),
            };
            if let Some(c) = coef.constant_value() {
                let mag = rational::abs(&c);
                let pre = if mag == int(1) { String::new() } else { format!("{} ", latex_rational(&mag)) };
                (c < int(0), format!("{pre}{body}"))
            } else if coef.len() > 1 {
                (false, format!("\\left({}\\right) {body}", latex_poly(&coef)))
            } else {
                let neg = coef.terms().next().is_some_and(|(_, c)| *c < int(0));
                let mag = if neg { -&coef } else { coef.clone() };
                (neg, format!("{} {body}", latex_poly(&mag)))
            }
        })
        .collect();
    join_signed(items)
}

/// Names of the two non-standard summands in a rendering.
#[derive(Debug, Clone, Copy)]
pub struct Labels {
    pub off_cartan: &'static str,
    pub cartan: &'static str,
}

pub const SHIFT_LABELS: Labels = Labels { off_cartan: "u_c", cartan: "t_c" };
pub const BD_LABELS: Labels = Labels { off_cartan: "u", cartan: "r_0" };

pub fn render_text(doc: &RDocument, labels: Labels) -> String {
    let g = group(&doc.r);
    let head = match doc.c {
        Some(c) => format!("sl_{} with c = {c}", doc.n),
        None => format!("sl_{}", doc.n),
    };
    format!(
        "{head}\nr(x,y) = r_st(x,y) + {u} + {t}\nr_st(x,y) = 1/2*(y+x)/(y-x)*casimir + 1/2*sum_{{a>0}} e_a ^ e_-a\n{u} = {}\n{t} = {}\n",
        text_terms(&g.off_cartan),
        text_terms(&g.cartan),
        u = labels.off_cartan,
        t = labels.cartan,
    )
}

pub fn render_latex(doc: &RDocument, labels: Labels) -> String {
    let g = group(&doc.r);
    let tex = |s: &str| s.replace("u_c", "u_c(x,y)").replace("r_0", "r_\\circ");
    format!(
        "\\begin{{align*}}\nr(x,y) &= r_{{\\mathsf{{st}}}}(x,y) + {u} + {t},\\\\\nr_{{\\mathsf{{st}}}}(x,y) &= \\frac{{1}}{{2}}\\frac{{y+x}}{{y-x}}\\gamma + \\frac{{1}}{{2}}\\sum_{{\\alpha\\in\\Phi_+}} e_\\alpha \\wedge e_{{-\\alpha}},\\\\\n{u} &= {},\\\\\n{t} &= {}.\n\\end{{align*}}\n",
        latex_terms(&g.off_cartan),
        latex_terms(&g.cartan),
        u = tex(labels.off_cartan),
        t = tex(labels.cartan),
    )
}
