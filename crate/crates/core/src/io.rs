//! Line-oriented text format for a space and an optional self-map.
//!
//! ```text
//! # comments and blank lines are ignored
//! 3            <- point count n
//! 1 2          <- d(0,1) d(0,2)
//! 1            <- d(1,2)
//! 0 0 0        <- image table T(0) .. T(n-1), optional
//! ```
//!
//! Distances are written as `p/q` or integers. The JSON form is the serde
//! encoding of [`Instance`].

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::metric::{FiniteMetricSpace, MetricError, SelfMap};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub space: FiniteMetricSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<SelfMap>,
}

impl Instance {
    pub fn new(space: FiniteMetricSpace, map: Option<SelfMap>) -> Self {
        Instance { space, map }
    }

    pub fn to_text(&self) -> String {
        let n = self.space.len();
        let mut out = format!("{n}\n");
        for i in 0..n.saturating_sub(1) {
            let row: Vec<String> = ((i + 1)..n).map(|j| rational::format(self.space.d(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        if let Some(map) = &self.map {
            let row: Vec<String> = map.image().iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Instance, FormatError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line, header) = lines.next().ok_or_else(|| FormatError::Truncated("missing point count".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| FormatError::Parse { line, message: format!("expected point count, found `{header}`") })?;
        if n == 0 {
            return Err(FormatError::Parse { line, message: "point count must be positive".into() });
        }

        let mut dist = vec![vec![Rational::zero(); n]; n];
        for i in 0..n - 1 {
            let (line, row) =
                lines.next().ok_or_else(|| FormatError::Truncated(format!("missing distance row {i}")))?;
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != n - 1 - i {
                return Err(FormatError::Parse {
                    line,
                    message: format!("distance row {i} needs {} entries, found {}", n - 1 - i, cells.len()),
                });
            }
            for (offset, cell) in cells.iter().enumerate() {
                let j = i + 1 + offset;
                let value = rational::parse(cell).map_err(|e| FormatError::Parse { line, message: e.to_string() })?;
                dist[i][j] = value.clone();
                dist[j][i] = value;
            }
        }
        let space = FiniteMetricSpace::new(dist)?;

        let map = match lines.next() {
            None => None,
            Some((line, row)) => {
                let image = row
                    .split_whitespace()
                    .map(|c| {
                        c.parse::<usize>()
                            .map_err(|_| FormatError::Parse { line, message: format!("bad image entry `{c}`") })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let map = SelfMap::for_space(image, &space)
                    .map_err(|e| FormatError::Parse { line, message: e.to_string() })?;
                Some(map)
            }
        };
        if let Some((line, extra)) = lines.next() {
            return Err(FormatError::Parse { line, message: format!("trailing content `{extra}`") });
        }
        Ok(Instance { space, map })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn parse_json(text: &str) -> Result<Instance, FormatError> {
        let inst: Instance = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        if let Some(map) = &inst.map {
            if map.len() != inst.space.len() {
                return Err(MetricError::MapSize { got: map.len(), n: inst.space.len() }.into());
            }
        }
        Ok(inst)
    }

    /// JSON if the first non-blank character is `{`, text otherwise.
    pub fn parse_any(text: &str) -> Result<Instance, FormatError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}
