//! The repo-wide JSON interchange format.
//!
//! Every instance file is a single versioned JSON document with a `kind`
//! discriminant. Rationals are decimal strings `"p/q"` in canonical reduced
//! form; cell maps are flat arrays in lexicographic cell order (first axis
//! most significant). Serialization is canonical: field order is fixed and
//! re-serializing a parsed document reproduces it byte for byte.

use crate::error::{Error, Result};
use crate::geometry::{ArbitrarySplitting, Hyperplane};
use crate::model::{AxisCut, ColorId, Cuboid, DiscreteNecklace, GridColoring, Splitting};
use crate::rat::Rat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const FORMAT_VERSION: u32 = 1;

/// A top-level instance document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Document {
    #[serde(rename = "discrete")]
    Discrete {
        version: u32,
        d: usize,
        k: u32,
        q: u32,
        sides: Vec<u32>,
        cells: Vec<u32>,
    },
    #[serde(rename = "grid")]
    Grid {
        version: u32,
        d: usize,
        k: u32,
        breakpoints: Vec<Vec<Rat>>,
        cells: Vec<u32>,
    },
    #[serde(rename = "splitting")]
    Splitting {
        version: u32,
        d: usize,
        q: u32,
        box_lo: Vec<Rat>,
        box_hi: Vec<Rat>,
        cuts: Vec<CutRecord>,
        labels: Vec<u32>,
    },
    #[serde(rename = "arbitrary-splitting")]
    Arbitrary {
        version: u32,
        d: usize,
        q: u32,
        box_lo: Vec<Rat>,
        box_hi: Vec<Rat>,
        /// Canonical normalized coefficients: first nonzero entry is one.
        hyperplanes: Vec<HyperplaneRecord>,
        /// Cell labels keyed by sign vector, e.g. `"+-"`.
        labels: Vec<CellLabel>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutRecord {
    pub axis: usize,
    pub coordinate: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneRecord {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellLabel {
    pub signs: String,
    pub part: u32,
}

impl Document {
    pub fn from_discrete(n: &DiscreteNecklace) -> Self {
        Document::Discrete {
            version: FORMAT_VERSION,
            d: n.dim(),
            k: n.k(),
            q: n.q(),
            sides: n.sides().to_vec(),
            cells: n.cells().iter().map(|c| c.0).collect(),
        }
    }

    pub fn from_grid(g: &GridColoring) -> Self {
        Document::Grid {
            version: FORMAT_VERSION,
            d: g.dim(),
            k: g.k(),
            breakpoints: g.breakpoints().to_vec(),
            cells: g.cells().iter().map(|c| c.0).collect(),
        }
    }

    pub fn from_splitting(s: &Splitting) -> Self {
        Document::Splitting {
            version: FORMAT_VERSION,
            d: s.region().dim(),
            q: s.q(),
            box_lo: s.region().lo.clone(),
            box_hi: s.region().hi.clone(),
            cuts: s
                .cuts()
                .into_iter()
                .map(|c| CutRecord { axis: c.axis, coordinate: c.coordinate })
                .collect(),
            labels: s.labels().to_vec(),
        }
    }

    pub fn from_arbitrary(s: &ArbitrarySplitting) -> Self {
        Document::Arbitrary {
            version: FORMAT_VERSION,
            d: s.region.dim(),
            q: s.q,
            box_lo: s.region.lo.clone(),
            box_hi: s.region.hi.clone(),
            hyperplanes: s
                .hyperplanes
                .iter()
                .map(|h| HyperplaneRecord { normal: h.normal().to_vec(), offset: h.offset().clone() })
                .collect(),
            labels: s
                .labels
                .iter()
                .map(|(signs, &part)| CellLabel {
                    signs: signs.iter().map(|&s| if s { '+' } else { '-' }).collect(),
                    part,
                })
                .collect(),
        }
    }

    /// Canonical serialization: compact JSON plus a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("document serialization is total");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Document> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("malformed document: {e}")))?;
        let version = match &doc {
            Document::Discrete { version, .. }
            | Document::Grid { version, .. }
            | Document::Splitting { version, .. }
            | Document::Arbitrary { version, .. } => *version,
        };
        if version != FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        Ok(doc)
    }

    pub fn into_discrete(self) -> Result<DiscreteNecklace> {
        match self {
            Document::Discrete { d, k, q, sides, cells, .. } => {
                if sides.len() != d {
                    return Err(Error::Input("sides arity disagrees with d".into()));
                }
                DiscreteNecklace::new(sides, cells.into_iter().map(ColorId).collect(), k, q)
            }
            _ => Err(Error::Input("expected a discrete document".into())),
        }
    }

    pub fn into_grid(self) -> Result<GridColoring> {
        match self {
            Document::Grid { d, k, breakpoints, cells, .. } => {
                if breakpoints.len() != d {
                    return Err(Error::Input("breakpoints arity disagrees with d".into()));
                }
                GridColoring::new(breakpoints, cells.into_iter().map(ColorId).collect(), k)
            }
            _ => Err(Error::Input("expected a grid document".into())),
        }
    }

    pub fn into_splitting(self) -> Result<Splitting> {
        match self {
            Document::Splitting { d, q, box_lo, box_hi, cuts, labels, .. } => {
                if box_lo.len() != d || box_hi.len() != d {
                    return Err(Error::Input("box arity disagrees with d".into()));
                }
                let region = Cuboid::new(box_lo, box_hi)?;
                let cuts = cuts
                    .into_iter()
                    .map(|c| AxisCut::new(c.axis, c.coordinate))
                    .collect();
                Splitting::new(region, cuts, labels, q)
            }
            _ => Err(Error::Input("expected a splitting document".into())),
        }
    }

    pub fn into_arbitrary(self) -> Result<ArbitrarySplitting> {
        match self {
            Document::Arbitrary { d, q, box_lo, box_hi, hyperplanes, labels, .. } => {
                if box_lo.len() != d || box_hi.len() != d {
                    return Err(Error::Input("box arity disagrees with d".into()));
                }
                let region = Cuboid::new(box_lo, box_hi)?;
                let hyperplanes: Vec<Hyperplane> = hyperplanes
                    .into_iter()
                    .map(|h| Hyperplane::new(h.normal, h.offset))
                    .collect::<Result<_>>()?;
                let mut label_map = BTreeMap::new();
                for l in labels {
                    let signs: Vec<bool> = l
                        .signs
                        .chars()
                        .map(|c| match c {
                            '+' => Ok(true),
                            '-' => Ok(false),
                            other => Err(Error::Input(format!("bad sign char {other:?}"))),
                        })
                        .collect::<Result<_>>()?;
                    label_map.insert(signs, l.part);
                }
                ArbitrarySplitting::new(region, hyperplanes, label_map, q)
            }
            _ => Err(Error::Input("expected an arbitrary-splitting document".into())),
        }
    }
}
