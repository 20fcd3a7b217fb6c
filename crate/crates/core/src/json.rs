//! JSON wire formats.
//!
//! Conventions: complex scalars are `[re, im]` pairs; matrices are row-major
//! lists of rows; an element lists one matrix per block; channel matrices
//! act on vectorized elements (blocks in order, column-stacked within a
//! block). Decimal round-trip keeps full f64 precision.

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Element, FaithfulState, C64, Mat, DEFAULT_FLOOR};
use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::retrodiction::{PhaseRule, Strategy, UnitaryAssignment};

pub const SCHEMA_VERSION: &str = "1";

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub algebra: AlgebraJson,
    pub blocks: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub element: ElementJson,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<String>,
    pub source: AlgebraJson,
    pub target: AlgebraJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
    /// Alternative input form for full matrix algebras; converted on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
}

/// A (state, channel) instance, the input of `recover`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub state: StateJson,
    pub channel: ChannelJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseRuleJson {
    pub rank_gain: f64,
    pub eigenvalue_gain: f64,
    pub probe_gain: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryOverrideJson {
    pub state: ElementJson,
    pub unitary: ElementJson,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct UnitariesJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<PhaseRuleJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub explicit: Vec<UnitaryOverrideJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyJson {
    Petz,
    Rotated {
        t: f64,
    },
    Averaged {
        measure: Measure,
    },
    Sth {
        #[serde(default)]
        unitaries: UnitariesJson,
    },
    Bayes,
    Ss,
    Discard,
    Convex {
        terms: Vec<ConvexTermJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexTermJson {
    pub weight: f64,
    pub strategy: StrategyJson,
}

fn matrix_to_json(m: &Mat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &MatrixJson) -> Result<Mat> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidParameter("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl From<&Algebra> for AlgebraJson {
    fn from(a: &Algebra) -> Self {
        AlgebraJson {
            blocks: a.block_dims().to_vec(),
        }
    }
}

impl TryFrom<&AlgebraJson> for Algebra {
    type Error = Error;
    fn try_from(j: &AlgebraJson) -> Result<Algebra> {
        Algebra::new(j.blocks.clone())
    }
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        ElementJson {
            algebra: e.algebra().into(),
            blocks: e.blocks().iter().map(matrix_to_json).collect(),
        }
    }
}

impl TryFrom<&ElementJson> for Element {
    type Error = Error;
    fn try_from(j: &ElementJson) -> Result<Element> {
        let algebra = Algebra::try_from(&j.algebra)?;
        let blocks = j
            .blocks
            .iter()
            .map(|b| matrix_from_json(b))
            .collect::<Result<Vec<_>>>()?;
        Element::new(algebra, blocks)
    }
}

impl From<&FaithfulState> for StateJson {
    fn from(s: &FaithfulState) -> Self {
        StateJson {
            element: s.element().into(),
            floor: s.floor(),
        }
    }
}

impl TryFrom<&StateJson> for FaithfulState {
    type Error = Error;
    fn try_from(j: &StateJson) -> Result<FaithfulState> {
        FaithfulState::new(Element::try_from(&j.element)?, j.floor)
    }
}

impl From<&Channel> for ChannelJson {
    fn from(c: &Channel) -> Self {
        ChannelJson {
            schema_version: Some(SCHEMA_VERSION.to_string()),
            source: c.source().into(),
            target: c.target().into(),
            matrix: Some(matrix_to_json(c.matrix())),
            kraus: None,
        }
    }
}

impl TryFrom<&ChannelJson> for Channel {
    type Error = Error;
    fn try_from(j: &ChannelJson) -> Result<Channel> {
        let source = Algebra::try_from(&j.source)?;
        let target = Algebra::try_from(&j.target)?;
        match (&j.matrix, &j.kraus) {
            (Some(m), _) => Channel::new(source, target, matrix_from_json(m)?),
            (None, Some(ops)) => {
                let kraus = ops
                    .iter()
                    .map(|k| matrix_from_json(k))
                    .collect::<Result<Vec<_>>>()?;
                Channel::from_kraus(&source, &target, &kraus)
            }
            (None, None) => Err(Error::InvalidParameter(
                "channel needs a matrix or a kraus list".into(),
            )),
        }
    }
}

impl From<&UnitaryAssignment> for UnitariesJson {
    fn from(u: &UnitaryAssignment) -> Self {
        UnitariesJson {
            rule: Some(PhaseRuleJson {
                rank_gain: u.rule.rank_gain,
                eigenvalue_gain: u.rule.eigenvalue_gain,
                probe_gain: u.rule.probe_gain,
            }),
            explicit: u
                .explicit
                .iter()
                .map(|(s, v)| UnitaryOverrideJson {
                    state: s.into(),
                    unitary: v.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&UnitariesJson> for UnitaryAssignment {
    type Error = Error;
    fn try_from(j: &UnitariesJson) -> Result<UnitaryAssignment> {
        let rule = match &j.rule {
            Some(r) => PhaseRule {
                rank_gain: r.rank_gain,
                eigenvalue_gain: r.eigenvalue_gain,
                probe_gain: r.probe_gain,
            },
            None => PhaseRule::nontrivial(),
        };
        let explicit = j
            .explicit
            .iter()
            .map(|o| Ok((Element::try_from(&o.state)?, Element::try_from(&o.unitary)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitaryAssignment { explicit, rule })
    }
}

impl From<&Strategy> for StrategyJson {
    fn from(s: &Strategy) -> Self {
        match s {
            Strategy::Petz => StrategyJson::Petz,
            Strategy::RotatedPetz(t) => StrategyJson::Rotated { t: *t },
            Strategy::AveragedPetz(m) => StrategyJson::Averaged { measure: m.clone() },
            Strategy::Sth(u) => StrategyJson::Sth {
                unitaries: u.into(),
            },
            Strategy::Bayes => StrategyJson::Bayes,
            Strategy::SuraceScandiClassical => StrategyJson::Ss,
            Strategy::DiscardPrepare => StrategyJson::Discard,
            Strategy::Convex(terms) => StrategyJson::Convex {
                terms: terms
                    .iter()
                    .map(|(w, s)| ConvexTermJson {
                        weight: *w,
                        strategy: s.into(),
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<&StrategyJson> for Strategy {
    type Error = Error;
    fn try_from(j: &StrategyJson) -> Result<Strategy> {
        Ok(match j {
            StrategyJson::Petz => Strategy::Petz,
            StrategyJson::Rotated { t } => Strategy::RotatedPetz(*t),
            StrategyJson::Averaged { measure } => {
                measure.validate()?;
                Strategy::AveragedPetz(measure.clone())
            }
            StrategyJson::Sth { unitaries } => Strategy::Sth(UnitaryAssignment::try_from(unitaries)?),
            StrategyJson::Bayes => Strategy::Bayes,
            StrategyJson::Ss => Strategy::SuraceScandiClassical,
            StrategyJson::Discard => Strategy::DiscardPrepare,
            StrategyJson::Convex { terms } => Strategy::Convex(
                terms
                    .iter()
                    .map(|t| Ok((t.weight, Strategy::try_from(&t.strategy)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        })
    }
}

/// Parse a strategy from a JSON string.
pub fn strategy_from_json(s: &str) -> Result<Strategy> {
    let j: StrategyJson = serde_json::from_str(s)
        .map_err(|e| Error::InvalidParameter(format!("strategy JSON: {e}")))?;
    Strategy::try_from(&j)
}

/// JSON schema documents for every wire format, keyed by name.
pub fn schemas() -> serde_json::Value {
    let complex = serde_json::json!({
        "type": "array", "items": {"type": "number"},
        "minItems": 2, "maxItems": 2,
        "description": "complex scalar as [re, im]"
    });
    let matrix = serde_json::json!({
        "type": "array",
        "items": {"type": "array", "items": {"$ref": "#/definitions/complex"}},
        "description": "row-major complex matrix"
    });
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "definitions": {
            "complex": complex,
            "matrix": matrix,
            "algebra": {
                "type": "object",
                "required": ["blocks"],
                "properties": {"blocks": {"type": "array", "items": {"type": "integer", "minimum": 1}}},
                "description": "direct sum of matrix blocks, ordered"
            },
            "element": {
                "type": "object",
                "required": ["algebra", "blocks"],
                "properties": {
                    "algebra": {"$ref": "#/definitions/algebra"},
                    "blocks": {"type": "array", "items": {"$ref": "#/definitions/matrix"}}
                }
            },
            "state": {
                "type": "object",
                "required": ["element"],
                "properties": {
                    "element": {"$ref": "#/definitions/element"},
                    "floor": {"type": "number", "exclusiveMinimum": 0}
                }
            },
            "channel": {
                "type": "object",
                "required": ["source", "target"],
                "properties": {
                    "schema_version": {"type": "string"},
                    "source": {"$ref": "#/definitions/algebra"},
                    "target": {"$ref": "#/definitions/algebra"},
                    "matrix": {"$ref": "#/definitions/matrix"},
                    "kraus": {"type": "array", "items": {"$ref": "#/definitions/matrix"}}
                },
                "description": "matrix acts on vectorized elements: blocks in order, columns stacked within a block; kraus accepted on input for full matrix algebras"
            },
            "instance": {
                "type": "object",
                "required": ["state", "channel"],
                "properties": {
                    "state": {"$ref": "#/definitions/state"},
                    "channel": {"$ref": "#/definitions/channel"}
                }
            },
            "measure": {
                "oneOf": [
                    {"type": "object", "required": ["kind", "t"], "properties": {"kind": {"const": "dirac"}, "t": {"type": "number"}}},
                    {"type": "object", "required": ["kind", "points"], "properties": {"kind": {"const": "discrete_convex"}, "points": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}}},
                    {"type": "object", "required": ["kind"], "properties": {"kind": {"const": "jrsww"}, "order": {"type": "integer", "minimum": 8}}}
                ]
            },
            "strategy": {
                "oneOf": [
                    {"type": "object", "properties": {"kind": {"const": "petz"}}},
                    {"type": "object", "required": ["t"], "properties": {"kind": {"const": "rotated"}, "t": {"type": "number"}}},
                    {"type": "object", "required": ["measure"], "properties": {"kind": {"const": "averaged"}, "measure": {"$ref": "#/definitions/measure"}}},
                    {"type": "object", "properties": {"kind": {"const": "sth"}, "unitaries": {"type": "object"}}},
                    {"type": "object", "properties": {"kind": {"const": "bayes"}}},
                    {"type": "object", "properties": {"kind": {"const": "ss"}}},
                    {"type": "object", "properties": {"kind": {"const": "discard"}}},
                    {"type": "object", "required": ["terms"], "properties": {"kind": {"const": "convex"}, "terms": {"type": "array"}}}
                ]
            }
        }
    })
}
