//! JSON records for varieties and subspaces.

use serde::{Deserialize, Serialize};

use ffharm_core::variety::{AffineSubspace, Variety};
use ffharm_core::FiniteField;

/// A field element as typed on the command line: the integer for prime
/// fields, otherwise `:`-joined digits, lowest first.
pub fn element_string(field: &FiniteField, a: u32) -> String {
    if field.degree() == 1 {
        a.to_string()
    } else {
        field.digits(a).iter().map(u32::to_string).collect::<Vec<_>>().join(":")
    }
}

/// Parses `1,-1,1` or `1:2,0:1`.
pub fn parse_coefficients(field: &FiniteField, text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(|raw| {
            let s = raw.trim();
            if s.contains(':') {
                let digits: Vec<u32> = s
                    .split(':')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad digit in coefficient {s:?}")))
                    .collect::<Result<_, _>>()?;
                field.from_digits(&digits).map_err(|e| e.to_string())
            } else {
                s.parse::<i64>().map(|v| field.from_int(v)).map_err(|_| format!("bad coefficient {s:?}"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyRecord {
    pub q: u32,
    pub d: usize,
    pub coefficients: Vec<String>,
    pub point_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u32>>>,
}

impl VarietyRecord {
    pub fn new(v: &Variety, with_points: bool) -> Self {
        let f = v.field();
        let grid = v.grid();
        Self {
            q: f.order(),
            d: v.dim(),
            coefficients: v.form().diag().unwrap_or(&[]).iter().map(|&a| element_string(f, a)).collect(),
            point_count: v.cardinality() as u64,
            points: with_points.then(|| v.points().iter().map(|&i| grid.coords(i as usize)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub kind: String,
    pub dim: usize,
    pub offset: Vec<u32>,
    pub basis: Vec<Vec<u32>>,
    pub verified: bool,
}

impl SubspaceRecord {
    pub fn new(kind: &str, h: &AffineSubspace, verified: bool) -> Self {
        Self { kind: kind.to_string(), dim: h.dim(), offset: h.offset.clone(), basis: h.basis.clone(), verified }
    }
}
