//! Line-oriented strategy lists:
//!
//! ```text
//! # comment
//! eigen n=0
//! super p=0.9082482904638631 alpha=0 k=0,2
//! gibbs d=1
//! ```

use std::collections::BTreeMap;
use std::fmt;

use mfi_core::basis::MAX_EIGEN_INDEX;
use mfi_core::transactional::StrategyKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

pub fn parse_strategies(text: &str) -> Result<Vec<StrategyKind>, ParseError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| parse_line(body).map_err(|message| ParseError { line: i + 1, message }))
        })
        .collect()
}

fn parse_line(body: &str) -> Result<StrategyKind, String> {
    let mut tokens = body.split_whitespace();
    let kind = tokens.next().unwrap_or_default();
    let mut fields = BTreeMap::new();
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| format!("expected key=value, found '{tok}'"))?;
        if fields.insert(key, value).is_some() {
            return Err(format!("duplicate key '{key}'"));
        }
    }
    let allowed: &[&str] = match kind {
        "eigen" => &["n"],
        "super" => &["p", "alpha", "k"],
        "gibbs" => &["d"],
        other => return Err(format!("unknown strategy '{other}' (expected eigen, super or gibbs)")),
    };
    if let Some(extra) = fields.keys().find(|k| !allowed.contains(k)) {
        return Err(format!("unknown key '{extra}' for {kind}"));
    }
    let get = |key: &str| fields.get(key).copied().ok_or_else(|| format!("{kind} needs {key}="));
    let strategy = match kind {
        "eigen" => {
            let n = int(get("n")?, "n")?;
            if n > MAX_EIGEN_INDEX {
                return Err(format!("n={n} exceeds {MAX_EIGEN_INDEX}"));
            }
            StrategyKind::Eigenstate { n }
        }
        "super" => {
            let (a, b) = get("k")?.split_once(',').ok_or("k must be two indices like k=0,2")?;
            StrategyKind::Superposition {
                p: float(get("p")?, "p")?,
                alpha: float(get("alpha")?, "alpha")?,
                k_low: int(a, "k")?,
                k_high: int(b, "k")?,
            }
        }
        _ => StrategyKind::Gibbs { d: float(get("d")?, "d")? },
    };
    strategy.validate().map_err(|e| e.to_string())?;
    Ok(strategy)
}

fn int(s: &str, key: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("{key} must be a non-negative integer, found '{s}'"))
}

fn float(s: &str, key: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{key} must be a finite number, found '{s}'")),
    }
}
