//! JSON and CSV file formats used by the command-line tool.
//!
//! All files carry `f64` values. Infinite costs are written as the string
//! `"inf"`, infinite potentials as `"-inf"`; everything else is a plain JSON
//! number. Each `*File` type converts to and from its domain counterpart.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::approximation::{ConvergenceReport, ConvergenceRow, DistributionSpec};
use crate::error::{Error, Result};
use crate::measures::{CostMatrix, CostSpec, DiscreteMeasure, ExtendedReal, Point, TorusShift};
use crate::monotonicity::{MonotonicityCertificate, SupportSet};
use crate::potentials::{PotentialPair, PotentialValue};
use crate::scalar::Scalar;
use crate::solver::{SolveResult, TransportPlan};
use crate::torus::{TorusReport, Which};

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(value) + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A cost entry: a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostValue(pub f64);

impl Serialize for CostValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for CostValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumOrWord::deserialize(d)? {
            NumOrWord::Num(v) => Ok(CostValue(v)),
            NumOrWord::Word(w) if w == "inf" => Ok(CostValue(f64::INFINITY)),
            NumOrWord::Word(w) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {w:?}"))),
        }
    }
}

impl From<ExtendedReal<f64>> for CostValue {
    fn from(c: ExtendedReal<f64>) -> Self {
        CostValue(c.to_f64())
    }
}

impl CostValue {
    pub fn to_extended(self) -> Result<ExtendedReal<f64>> {
        if self.0 == f64::INFINITY {
            Ok(ExtendedReal::PositiveInfinity)
        } else {
            ExtendedReal::finite(self.0)
        }
    }
}

/// A potential entry: a number or `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEntry(pub f64);

impl Serialize for PotentialEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PotentialEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumOrWord::deserialize(d)? {
            NumOrWord::Num(v) => Ok(PotentialEntry(v)),
            NumOrWord::Word(w) if w == "-inf" => Ok(PotentialEntry(f64::NEG_INFINITY)),
            NumOrWord::Word(w) => Err(serde::de::Error::custom(format!("expected a number or \"-inf\", got {w:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrWord {
    Num(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Coords(Vec<f64>),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub points: Vec<PointRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl MeasureFile {
    pub fn to_measure(&self) -> Result<DiscreteMeasure<f64>> {
        let points = self
            .points
            .iter()
            .map(|p| match p {
                PointRepr::Coords(c) => Point::new(c.clone()),
                PointRepr::Scalar(x) => Point::scalar(*x),
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.weights {
            Some(w) => DiscreteMeasure::new(points, w.clone()),
            None => DiscreteMeasure::uniform(points),
        }
    }

    pub fn from_measure(m: &DiscreteMeasure<f64>) -> Self {
        MeasureFile {
            points: m.points().iter().map(|p| PointRepr::Coords(p.coords().to_vec())).collect(),
            weights: Some(m.weights().to_vec()),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn one_step() -> i64 {
    1
}

fn infinite() -> CostValue {
    CostValue(f64::INFINITY)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CostFile {
    Sqeuclidean,
    Pnorm {
        p: f64,
    },
    Matrix {
        #[serde(alias = "rows")]
        matrix: Vec<Vec<CostValue>>,
    },
    Torus {
        n: usize,
        #[serde(default = "one_step")]
        shift: i64,
        #[serde(default = "one")]
        diag: f64,
        #[serde(default = "two")]
        shift_cost: f64,
        #[serde(default = "infinite")]
        off: CostValue,
    },
}

impl CostFile {
    pub fn to_spec(&self) -> Result<CostSpec<f64>> {
        let spec = match self {
            CostFile::Sqeuclidean => CostSpec::SquaredEuclidean,
            CostFile::Pnorm { p } => CostSpec::PNorm(*p),
            CostFile::Matrix { matrix } => {
                let rows = matrix
                    .iter()
                    .map(|r| r.iter().map(|c| c.to_extended()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                CostSpec::ExplicitMatrix(CostMatrix::from_rows(rows)?)
            }
            CostFile::Torus { n, shift, diag, shift_cost, off } => {
                CostSpec::torus(*n, *shift, *diag, *shift_cost, off.to_extended()?)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &CostSpec<f64>) -> Self {
        match spec {
            CostSpec::SquaredEuclidean => CostFile::Sqeuclidean,
            CostSpec::PNorm(p) => CostFile::Pnorm { p: *p },
            CostSpec::ExplicitMatrix(m) => CostFile::Matrix {
                matrix: m.rows().map(|r| r.iter().map(|&c| c.into()).collect()).collect(),
            },
            CostSpec::TorusShift(TorusShift { size, shift_steps, diag_cost, shift_cost, off_value }) => CostFile::Torus {
                n: *size,
                shift: *shift_steps,
                diag: *diag_cost,
                shift_cost: *shift_cost,
                off: (*off_value).into(),
            },
        }
    }
}

/// Plan file; `cost` and `method` are present when the plan came from a solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub entries: Vec<(usize, usize, f64)>,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl PlanFile {
    pub fn from_plan(plan: &TransportPlan<f64>) -> Self {
        PlanFile { entries: plan.entries().to_vec(), n: plan.n_rows(), m: plan.n_cols(), cost: None, method: None }
    }

    pub fn from_result(res: &SolveResult<f64>) -> Self {
        PlanFile { cost: Some(res.cost.into()), method: Some(res.method.to_string()), ..Self::from_plan(&res.plan) }
    }

    pub fn to_plan(&self) -> Result<TransportPlan<f64>> {
        TransportPlan::new(self.entries.clone(), self.n, self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportFile {
    pub pairs: Vec<(usize, usize)>,
}

impl SupportFile {
    pub fn to_support(&self) -> SupportSet {
        SupportSet::new(self.pairs.clone())
    }

    pub fn from_support(gamma: &SupportSet) -> Self {
        SupportFile { pairs: gamma.pairs().to_vec() }
    }
}

/// Either a plan or a bare support, told apart by their keys.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PlanOrSupport {
    Plan(PlanFile),
    Support(SupportFile),
}

impl PlanOrSupport {
    pub fn support(&self) -> Result<SupportSet> {
        match self {
            PlanOrSupport::Plan(p) => Ok(p.to_plan()?.support()),
            PlanOrSupport::Support(s) => Ok(s.to_support()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum CertificateFile {
    Monotone {
        tol: f64,
    },
    Violated {
        cycle: Vec<usize>,
        improvement: f64,
        /// The support pairs along the cycle, in cycle order.
        #[serde(default)]
        pairs: Vec<(usize, usize)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

impl CertificateFile {
    pub fn new<T: Scalar>(cert: &MonotonicityCertificate<T>, gamma: &SupportSet, tol: f64) -> Self {
        match cert {
            MonotonicityCertificate::Monotone { tolerance } => CertificateFile::Monotone { tol: tolerance.to_f64_lossy() },
            MonotonicityCertificate::Violated(v) => CertificateFile::Violated {
                cycle: v.cycle.clone(),
                improvement: v.improvement.to_f64_lossy(),
                pairs: v.pairs(gamma),
                tol: Some(tol),
            },
        }
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self, CertificateFile::Monotone { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialsFile {
    pub phi: Vec<PotentialEntry>,
    pub psi: Vec<PotentialEntry>,
    pub contact: Vec<(usize, usize)>,
    pub tol: f64,
    /// `J(φ, ψ)` against the marginals the pair was built for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_value: Option<PotentialEntry>,
    /// Plan cost minus `dual_value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl PotentialsFile {
    pub fn from_pair<T: Scalar>(pp: &PotentialPair<T>) -> Self {
        let conv = |v: &[PotentialValue<T>]| v.iter().map(|p| PotentialEntry(p.to_f64())).collect();
        PotentialsFile {
            phi: conv(&pp.phi),
            psi: conv(&pp.psi),
            contact: pp.contact.pairs().to_vec(),
            tol: pp.tol.to_f64_lossy(),
            dual_value: None,
            gap: None,
        }
    }

    pub fn to_pair(&self) -> Result<PotentialPair<f64>> {
        let conv = |v: &[PotentialEntry]| {
            v.iter()
                .map(|e| match e.0 {
                    x if x == f64::NEG_INFINITY => Ok(PotentialValue::NegativeInfinity),
                    x if x.is_finite() => Ok(PotentialValue::Finite(x)),
                    x => Err(Error::Parse(format!("invalid potential value {x}"))),
                })
                .collect::<Result<Vec<_>>>()
        };
        Ok(PotentialPair { phi: conv(&self.phi)?, psi: conv(&self.psi)?, contact: SupportSet::new(self.contact.clone()), tol: self.tol })
    }
}

/// Output of the torus demo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusFile {
    pub n: usize,
    pub which: String,
    pub plan_cost: CostValue,
    pub certificate: CertificateFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potentials: Option<PotentialsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_value: Option<PotentialEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
}

impl TorusFile {
    pub fn from_report<T: Scalar>(report: &TorusReport<T>, gamma: &SupportSet, tol: f64) -> Self {
        TorusFile {
            n: report.size,
            which: report.which.to_string(),
            plan_cost: CostValue(report.plan_cost.to_f64()),
            certificate: CertificateFile::new(&report.certificate, gamma, tol),
            potentials: report.potentials.as_ref().map(PotentialsFile::from_pair),
            dual_value: report.dual_value.map(|d| PotentialEntry(d.to_f64())),
            feasible: report.feasible,
        }
    }

    pub fn which(&self) -> Result<Which> {
        self.which.parse()
    }
}

fn one_dim() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionFile {
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default = "one_dim")]
        dim: usize,
    },
    PointCloud {
        points: Vec<PointRepr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    GridTorus {
        n: usize,
    },
}

impl DistributionFile {
    pub fn to_spec(&self) -> Result<DistributionSpec> {
        let spec = match self {
            DistributionFile::Uniform { lo, hi, dim } => DistributionSpec::Uniform { lo: *lo, hi: *hi, dim: *dim },
            DistributionFile::PointCloud { points, weights } => {
                DistributionSpec::PointCloud(MeasureFile { points: points.clone(), weights: weights.clone() }.to_measure()?)
            }
            DistributionFile::GridTorus { n } => DistributionSpec::GridTorus(*n),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxConfig {
    pub mu: DistributionFile,
    pub nu: DistributionFile,
    pub cost: CostFile,
    pub schedule: Vec<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Write `n,cost,dual_gap,wall_ms` rows followed by `# reference=..` (when
/// known) and `# seed=..` comment lines.
pub fn write_report_csv<W: Write>(report: &ConvergenceReport, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Parse(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "cost", "dual_gap", "wall_ms"]).map_err(io)?;
    for r in &report.rows {
        w.write_record([r.n.to_string(), r.cost.to_string(), r.dual_gap.to_string(), r.wall_ms.to_string()])
            .map_err(io)?;
    }
    let mut out = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    let mut trailer = String::new();
    if let Some(r) = report.reference {
        trailer += &format!("# reference={r}\n");
    }
    trailer += &format!("# seed={}\n", report.seed);
    out.write_all(trailer.as_bytes()).map_err(|e| Error::Parse(e.to_string()))
}

pub fn report_csv_string(report: &ConvergenceReport) -> String {
    let mut buf = Vec::new();
    write_report_csv(report, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_report_csv<R: Read>(mut input: R) -> Result<ConvergenceReport> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| Error::Parse(e.to_string()))?;
    let (mut reference, mut seed) = (None, 0);
    let mut body = String::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            let (key, value) = c.trim().split_once('=').ok_or_else(|| Error::Parse(format!("bad comment line {line:?}")))?;
            let bad = |_| Error::Parse(format!("bad value in {line:?}"));
            match key.trim() {
                "reference" => reference = Some(value.trim().parse::<f64>().map_err(bad)?),
                "seed" => seed = value.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad seed in {line:?}")))?,
                _ => {}
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header != vec!["n", "cost", "dual_gap", "wall_ms"] {
        return Err(Error::Parse(format!("unexpected csv header {header:?}")));
    }
    let rows = rdr
        .deserialize::<ConvergenceRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(ConvergenceReport { rows, reference, seed })
}
