//! Machine-readable output documents and their text rendering.
//!
//! Every document the CLI emits is defined here as a serde struct with a
//! canonical JSON form (see [`crate::config::canonical_json`]) and a plain
//! text rendering. Scalars appear in the textual grammar of
//! [`crate::padic::PadicNumber`]: `0`, `O(p^N)`, or `u * p^v (mod p^N)`.

use serde::{Deserialize, Serialize};

use crate::criterion::{ColemanFamily, Provenance, TermWitness, Verdict, VerdictKind};
use crate::cyclotomic::CycloElement;
use crate::iwasawa::IwasawaSeries;
use crate::logmat::{IndexTuple, LogMatrix};
use crate::matrix::Matrix;

/// A series as an emitted coefficient list.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesDoc {
    pub coefficients: Vec<String>,
    pub exact: bool,
}

impl SeriesDoc {
    pub fn from_series(s: &IwasawaSeries) -> Self {
        SeriesDoc {
            coefficients: s.coeffs().iter().map(|c| c.to_string()).collect(),
            exact: s.is_exact(),
        }
    }
}

/// A cyclotomic element as an emitted coefficient list in the eps power
/// basis, with the level and the element precision attached.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CycloDoc {
    pub level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
    pub coefficients: Vec<String>,
}

impl CycloDoc {
    pub fn from_element(x: &CycloElement) -> Self {
        CycloDoc {
            level: x.level(),
            precision: x.precision(),
            coefficients: x.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixBlockDoc<T> {
    pub label: String,
    pub rows: Vec<Vec<T>>,
}

fn matrix_doc<T, U>(m: &Matrix<T>, f: impl Fn(&T) -> U) -> Vec<Vec<U>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(&f).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolicHnDoc {
    pub n: u32,
    pub blocks: Vec<MatrixBlockDoc<SeriesDoc>>,
}

/// Output of `build-h`: the symbolic H_{v,n} for each requested n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildHDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub matrices: Vec<SymbolicHnDoc>,
}

impl BuildHDoc {
    pub fn new(p: u64, precision: u32, matrices: Vec<(u32, LogMatrix<IwasawaSeries>)>) -> Self {
        BuildHDoc {
            command: "build-h".into(),
            p,
            precision,
            matrices: matrices
                .into_iter()
                .map(|(n, m)| SymbolicHnDoc {
                    n,
                    blocks: m
                        .blocks
                        .iter()
                        .map(|b| MatrixBlockDoc {
                            label: b.label.clone(),
                            rows: matrix_doc(&b.matrix, SeriesDoc::from_series),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvaluatedHnDoc {
    pub n: u32,
    pub blocks: Vec<MatrixBlockDoc<CycloDoc>>,
}

/// Output of `eval`: H_{v,n}(eps_n) for each requested n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub matrices: Vec<EvaluatedHnDoc>,
}

impl EvalDoc {
    pub fn new(p: u64, precision: u32, matrices: Vec<(u32, LogMatrix<CycloElement>)>) -> Self {
        EvalDoc {
            command: "eval".into(),
            p,
            precision,
            matrices: matrices
                .into_iter()
                .map(|(n, m)| EvaluatedHnDoc {
                    n,
                    blocks: m
                        .blocks
                        .iter()
                        .map(|b| MatrixBlockDoc {
                            label: b.label.clone(),
                            rows: matrix_doc(&b.matrix, CycloDoc::from_element),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorEntryDoc {
    pub tuple: IndexTuple,
    pub valuation: String,
    pub value: CycloDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorsRowDoc {
    pub n: u32,
    pub row_tuple: IndexTuple,
    pub minors: Vec<MinorEntryDoc>,
}

/// Output of `minors`: the (I_0, J)-minors of H_n(eps_n) over all J.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorsDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub rows: Vec<MinorsRowDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeySumRowDoc {
    pub n: u32,
    pub sum: CycloDoc,
    /// One entry per tuple with a nonzero Coleman series: minor valuation,
    /// Coleman valuation, and their sum.
    pub terms: Vec<TermWitness>,
    pub verdict: Verdict,
}

/// Output of `key-sum`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeySumDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub provenance: Provenance,
    pub missing_tuples: Vec<IndexTuple>,
    pub rows: Vec<KeySumRowDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyRowDoc {
    pub n: u32,
    pub key_sum: Verdict,
    pub dominance: Verdict,
}

/// Output of `certify`: per-level verdicts plus the effective threshold
/// certificate. `overall` is one of `certified`, `partially-verified`,
/// `indeterminate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub provenance: Provenance,
    pub missing_tuples: Vec<IndexTuple>,
    pub rows: Vec<CertifyRowDoc>,
    pub certificate: Verdict,
    pub overall: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeierstrassCheckDoc {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeierstrassFamilyDoc {
    pub tuple: IndexTuple,
    pub mu: u32,
    pub lambda: u32,
    pub certified: bool,
    pub checks: Vec<WeierstrassCheckDoc>,
}

/// Output of `weierstrass`: mu/lambda per tuple and the evaluation-valuation
/// identity checked at each requested level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeierstrassDoc {
    pub command: String,
    pub p: u64,
    pub precision: u32,
    pub provenance: Provenance,
    pub families: Vec<WeierstrassFamilyDoc>,
}

fn verdict_line(v: &Verdict) -> String {
    let kind = match v.kind {
        VerdictKind::NonzeroAtN => "nonzero-at-n",
        VerdictKind::ZeroAtN => "zero-at-n",
        VerdictKind::Indeterminate => "indeterminate",
        VerdictKind::CertifiedForAllLargeN => "certified-for-all-large-n",
    };
    let mut line = kind.to_string();
    if let Some(val) = &v.sum_valuation {
        line.push_str(&format!("  sum valuation {val}"));
    }
    if let Some(w) = &v.dominant {
        line.push_str(&format!(
            "  dominant J = {} (total {})",
            w.tuple, w.total_valuation
        ));
    }
    if let Some(w) = &v.runner_up {
        line.push_str(&format!(
            "  runner-up J = {} (total {})",
            w.tuple, w.total_valuation
        ));
    }
    if let Some(n0) = v.threshold_n0 {
        line.push_str(&format!("  N0 = {n0}"));
    }
    if let Some(d) = &v.diagnostic {
        line.push_str(&format!("  [{d}]"));
    }
    line
}

fn provenance_line(p: &Provenance) -> String {
    match p {
        Provenance::UserSupplied => "user-supplied".into(),
        Provenance::Synthetic { seed } => format!("synthetic (seed {seed})"),
    }
}

/// Plain-text rendering for human consumption.
pub trait TextRender {
    fn to_text(&self) -> String;
}

impl TextRender for BuildHDoc {
    fn to_text(&self) -> String {
        let mut out = format!("build-h  p = {}  precision = {}\n", self.p, self.precision);
        for m in &self.matrices {
            out.push_str(&format!("H_(v,{}):\n", m.n));
            for b in &m.blocks {
                out.push_str(&format!("  block {}:\n", b.label));
                for row in &b.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|s| format!("[{}]", s.coefficients.join(", ")))
                        .collect();
                    out.push_str(&format!("    {}\n", cells.join("  ")));
                }
            }
        }
        out
    }
}

impl TextRender for EvalDoc {
    fn to_text(&self) -> String {
        let mut out = format!("eval  p = {}  precision = {}\n", self.p, self.precision);
        for m in &self.matrices {
            out.push_str(&format!("H_(v,{})(eps_{}):\n", m.n, m.n));
            for b in &m.blocks {
                out.push_str(&format!("  block {}:\n", b.label));
                for row in &b.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| format!("[{}]", c.coefficients.join(", ")))
                        .collect();
                    out.push_str(&format!("    {}\n", cells.join("  ")));
                }
            }
        }
        out
    }
}

impl TextRender for MinorsDoc {
    fn to_text(&self) -> String {
        let mut out = format!("minors  p = {}  precision = {}\n", self.p, self.precision);
        for row in &self.rows {
            out.push_str(&format!("n = {}  rows I_0 = {}\n", row.n, row.row_tuple));
            for m in &row.minors {
                out.push_str(&format!("  J = {}  valuation {}\n", m.tuple, m.valuation));
            }
        }
        out
    }
}

impl TextRender for KeySumDoc {
    fn to_text(&self) -> String {
        let mut out = format!(
            "key-sum  p = {}  precision = {}  coleman: {}\n",
            self.p,
            self.precision,
            provenance_line(&self.provenance)
        );
        if !self.missing_tuples.is_empty() {
            let names: Vec<String> = self.missing_tuples.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!(
                "warning: tuples treated as the zero series: {}\n",
                names.join(", ")
            ));
        }
        for row in &self.rows {
            out.push_str(&format!("n = {}: {}\n", row.n, verdict_line(&row.verdict)));
            for t in &row.terms {
                out.push_str(&format!(
                    "    J = {}: minor {}  coleman {}  total {}\n",
                    t.tuple, t.minor_valuation, t.coleman_valuation, t.total_valuation
                ));
            }
        }
        out
    }
}

impl TextRender for CertifyDoc {
    fn to_text(&self) -> String {
        let mut out = format!(
            "certify  p = {}  precision = {}  coleman: {}\n",
            self.p,
            self.precision,
            provenance_line(&self.provenance)
        );
        if !self.missing_tuples.is_empty() {
            let names: Vec<String> = self.missing_tuples.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!(
                "warning: tuples treated as the zero series: {}\n",
                names.join(", ")
            ));
        }
        for row in &self.rows {
            out.push_str(&format!("n = {}:\n", row.n));
            out.push_str(&format!("  direct:    {}\n", verdict_line(&row.key_sum)));
            out.push_str(&format!("  dominance: {}\n", verdict_line(&row.dominance)));
        }
        out.push_str(&format!(
            "certificate: {}\n",
            verdict_line(&self.certificate)
        ));
        out.push_str(&format!("overall: {}\n", self.overall));
        out
    }
}

impl TextRender for WeierstrassDoc {
    fn to_text(&self) -> String {
        let mut out = format!(
            "weierstrass  p = {}  precision = {}  coleman: {}\n",
            self.p,
            self.precision,
            provenance_line(&self.provenance)
        );
        for fam in &self.families {
            out.push_str(&format!(
                "col_{}  mu = {}  lambda = {}  certified = {}\n",
                fam.tuple, fam.mu, fam.lambda, fam.certified
            ));
            for c in &fam.checks {
                match (&c.observed, &c.predicted, c.matches) {
                    (Some(o), Some(pr), Some(m)) => {
                        out.push_str(&format!(
                            "  n = {}: observed {o}  predicted {pr}  {}\n",
                            c.n,
                            if m { "ok" } else { "MISMATCH" }
                        ));
                    }
                    _ => {
                        out.push_str(&format!(
                            "  n = {}: {}\n",
                            c.n,
                            c.note.as_deref().unwrap_or("skipped")
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Summary values echoed by `key-sum` and `certify` builders.
pub fn family_summary(coleman: &ColemanFamily) -> (Provenance, Vec<IndexTuple>) {
    (coleman.provenance().clone(), coleman.missing().to_vec())
}
