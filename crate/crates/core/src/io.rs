//! File formats: problem instances, polynomial files, and serde helpers that
//! keep every rational and big integer exact as a string.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::effectivity::{EffectivityReport, ProblemInstance};
use crate::error::{Error, Result};
use crate::numfield::{IntPolynomial, RealAlgebraic};
use crate::polyops::{BivarPoly, MultiIndex};
use crate::positivity::PositivityReport;
use crate::rat::{fmt_rat, parse_rat, Rat};
use crate::search::SearchHit;
use crate::siegel::DimensionReport;

/// `Rat` as `"p/q"` (or `"p"` for integers).
pub mod rat_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::rat::{fmt_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// `Option<Rat>` as an optional `"p/q"` string.
pub mod opt_rat_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::rat::{fmt_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&fmt_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rat(&s).map_err(D::Error::custom))
            .transpose()
    }
}

/// `BigInt` as a decimal string.
pub mod big_str {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(D::Error::custom)
    }
}

/// `Vec<BigInt>` as an array of decimal strings.
pub mod big_vec_str {
    use num_bigint::BigInt;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&n.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.trim().parse().map_err(D::Error::custom))
            .collect()
    }
}

/// An integer written either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLiteral {
    Small(i64),
    Big(String),
}

impl IntLiteral {
    fn value(&self) -> Result<BigInt> {
        match self {
            IntLiteral::Small(n) => Ok(BigInt::from(*n)),
            IntLiteral::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad integer {s:?}"))),
        }
    }

    fn from_big(n: &BigInt) -> Self {
        match i64::try_from(n) {
            Ok(v) => IntLiteral::Small(v),
            Err(_) => IntLiteral::Big(n.to_string()),
        }
    }
}

/// A real algebraic number as its minimal polynomial (ascending integer
/// coefficients) and an isolating interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraicLiteral {
    pub minpoly: Vec<IntLiteral>,
    pub interval: [String; 2],
}

impl AlgebraicLiteral {
    pub fn to_number(&self) -> Result<RealAlgebraic> {
        let coeffs = self
            .minpoly
            .iter()
            .map(IntLiteral::value)
            .collect::<Result<Vec<_>>>()?;
        let p = IntPolynomial::new(coeffs);
        let lo = parse_rat(&self.interval[0])?;
        let hi = parse_rat(&self.interval[1])?;
        RealAlgebraic::new(&p, lo, hi)
    }

    pub fn from_number(a: &RealAlgebraic) -> Self {
        AlgebraicLiteral {
            minpoly: a
                .minpoly()
                .coeffs()
                .iter()
                .map(IntLiteral::from_big)
                .collect(),
            interval: [fmt_rat(a.lo()), fmt_rat(a.hi())],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub alpha1: AlgebraicLiteral,
    pub alpha2: AlgebraicLiteral,
    pub curve_degree: u32,
    pub delta: String,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("instance file: {e}")))
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(
            self.alpha1.to_number()?,
            self.alpha2.to_number()?,
            self.curve_degree,
            parse_rat(&self.delta)?,
        )
    }

    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceFile {
            alpha1: AlgebraicLiteral::from_number(&inst.alpha1),
            alpha2: AlgebraicLiteral::from_number(&inst.alpha2),
            curve_degree: inst.m,
            delta: fmt_rat(&inst.delta),
        }
    }
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text)?.to_instance()
}

/// `{"k": 4, "terms": [[j1, j2, "coeff"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub k: u32,
    pub terms: Vec<(u32, u32, String)>,
}

impl PolyFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("polynomial file: {e}")))
    }

    pub fn to_poly(&self) -> Result<BivarPoly> {
        let terms = self
            .terms
            .iter()
            .map(|(j1, j2, c)| Ok((MultiIndex::new(*j1, *j2), parse_rat(c)?)))
            .collect::<Result<Vec<_>>>()?;
        BivarPoly::from_terms(self.k, terms)
    }

    pub fn from_poly(p: &BivarPoly) -> Self {
        PolyFile {
            k: p.k(),
            terms: p.terms().map(|(j, c)| (j.j1, j.j2, fmt_rat(c))).collect(),
        }
    }
}

pub const FORMAT_VERSION: u32 = 1;

/// Configuration in effect when a report was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConfigEcho {
    pub m0_cap: Option<u64>,
    pub refine_cap: u64,
    #[serde(with = "rat_str")]
    pub slack: Rat,
    pub max_k: u32,
}

/// Result of the `index` subcommand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IndexReport {
    pub k: u32,
    pub weights: [u32; 2],
    pub point: String,
    /// Exact rational, or `"inf"` for the zero polynomial.
    pub index: String,
    pub witness: Option<MultiIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum Payload {
    Constant(Box<EffectivityReport>),
    Dims(Vec<DimensionReport>),
    Search(Vec<SearchHit>),
    Index(IndexReport),
    Positivity(Box<PositivityReport>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub format_version: u32,
    pub config: ConfigEcho,
    pub payload: Payload,
}

impl ReportFile {
    pub fn new(config: ConfigEcho, payload: Payload) -> Self {
        ReportFile {
            tool: "effdio".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format_version: FORMAT_VERSION,
            config,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("report file: {e}")))
    }
}
