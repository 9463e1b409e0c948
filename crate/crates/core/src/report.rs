//! Machine- and human-readable output for the CLI: exact rationals are
//! rendered as reduced fraction strings, never decimals.

use serde::{Deserialize, Serialize};

use crate::cone::SurgeryResult;
use crate::gradings::Rational;

pub fn rational_string(r: Rational) -> String {
    if r.denom() == &1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: i64,
    pub spinc: String,
    pub delta: String,
    pub width: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedEntry {
    pub bottom: String,
    pub length: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub delta: u32,
    pub width: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub n: i64,
    pub i: i64,
    pub towers: Vec<String>,
    pub reduced: Vec<ReducedEntry>,
    pub meta: Meta,
}

impl ResultEntry {
    pub fn from_surgery(res: &SurgeryResult) -> ResultEntry {
        ResultEntry {
            n: res.n,
            i: res.i,
            towers: res.module.towers().into_iter().map(rational_string).collect(),
            reduced: res
                .module
                .reduced()
                .into_iter()
                .map(|(bottom, length)| ReducedEntry { bottom: rational_string(bottom), length })
                .collect(),
            meta: Meta { delta: res.delta_used, width: res.width },
        }
    }

    /// One-line summary, e.g. `spinc 0: tower bottom -2; reduced: 2x[-2,len 1], 2x[0,len 1]`.
    pub fn text_line(&self) -> String {
        let towers = match self.towers.len() {
            0 => "no towers".to_string(),
            1 => format!("tower bottom {}", self.towers[0]),
            _ => format!("towers bottom {}", self.towers.join(", ")),
        };
        let mut groups: Vec<(String, u32, usize)> = Vec::new();
        for e in &self.reduced {
            match groups.last_mut() {
                Some(g) if g.0 == e.bottom && g.1 == e.length => g.2 += 1,
                _ => groups.push((e.bottom.clone(), e.length, 1)),
            }
        }
        let reduced = if groups.is_empty() {
            "none".to_string()
        } else {
            groups
                .iter()
                .map(|(b, l, m)| format!("{m}x[{b},len {l}]"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("spinc {}: {towers}; reduced: {reduced}", self.i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub command: String,
    pub params: Params,
    pub results: Vec<ResultEntry>,
    pub version: String,
}

impl Report {
    pub fn new(input: String, command: &str, params: Params, results: Vec<ResultEntry>) -> Report {
        Report {
            input,
            command: command.to_string(),
            params,
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (n = {})\n", self.input, self.params.n);
        for r in &self.results {
            out.push_str(&r.text_line());
            out.push('\n');
        }
        out
    }
}
