//! Query-string parsing for the view endpoints.
//!
//! Filters can be given as repeated shorthand parameters
//!
//! ```text
//! meta=answerability:unanswerable
//! score=rouge_l:0.5:1            score=model-b:rouge_l:0.5:1
//! agreement=split,majority       agreement=win_rate:unanimous
//! models=model-a,model-b
//! ```
//!
//! or as one `filter` parameter holding a JSON array of predicates. Both
//! forms may be combined; all predicates are ANDed.

use std::collections::BTreeSet;
use std::str::FromStr;

use ragscope_core::analysis::Predicate;
use ragscope_core::stats::AgreementLevel;

use crate::error::ApiError;

/// Raw query pairs, with repeated keys kept in order.
#[derive(Debug, Clone, Default)]
pub struct Query(Vec<(String, String)>);

impl Query {
    pub fn parse(raw: Option<&str>) -> Self {
        Query(
            url::form_urlencoded::parse(raw.unwrap_or("").as_bytes())
                .map(|(k, v)| (k.into_owned(), v.into_owned()))
                .collect(),
        )
    }

    pub fn all<'a>(&'a self, key: &str) -> impl Iterator<Item = &'a str> + 'a {
        let key = key.to_string();
        self.0
            .iter()
            .filter(move |(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Last value of `key`, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.all(key).last()
    }

    pub fn require(&self, key: &str) -> Result<&str, ApiError> {
        self.get(key)
            .ok_or_else(|| ApiError::bad_request(format!("missing query parameter '{key}'")))
    }

    pub fn number<T: FromStr>(&self, key: &str) -> Result<Option<T>, ApiError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    ApiError::bad_request(format!("'{key}' must be a number, got '{v}'"))
                })
            })
            .transpose()
    }

    pub fn predicates(&self) -> Result<Vec<Predicate>, ApiError> {
        let mut out = Vec::new();
        for raw in self.all("filter") {
            let mut ps: Vec<Predicate> = serde_json::from_str(raw)
                .map_err(|e| ApiError::bad_request(format!("malformed filter: {e}")))?;
            out.append(&mut ps);
        }
        for raw in self.all("meta") {
            let (key, value) = raw.split_once(':').ok_or_else(|| {
                ApiError::bad_request(format!("meta filter '{raw}' must be key:value"))
            })?;
            out.push(Predicate::Metadata {
                key: key.to_string(),
                value: value.to_string(),
            });
        }
        for raw in self.all("score") {
            out.push(parse_score(raw)?);
        }
        for raw in self.all("agreement") {
            out.push(parse_agreement(raw)?);
        }
        for raw in self.all("models") {
            out.push(Predicate::Models {
                model_ids: split_list(raw).map(String::from).collect(),
            });
        }
        Ok(out)
    }
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_score(raw: &str) -> Result<Predicate, ApiError> {
    let bad =
        || ApiError::bad_request(format!("score filter '{raw}' must be [model:]metric:lo:hi"));
    let parts: Vec<&str> = raw.split(':').collect();
    let (model_id, metric_id, lo, hi) = match parts.as_slice() {
        [metric, lo, hi] => (None, *metric, *lo, *hi),
        [model, metric, lo, hi] => (Some(model.to_string()), *metric, *lo, *hi),
        _ => return Err(bad()),
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    Ok(Predicate::Score {
        model_id,
        metric_id: metric_id.to_string(),
        lo,
        hi,
    })
}

fn parse_agreement(raw: &str) -> Result<Predicate, ApiError> {
    let (metric_id, levels) = match raw.split_once(':') {
        Some((m, l)) => (Some(m.to_string()), l),
        None => (None, raw),
    };
    let levels = split_list(levels)
        .map(|l| {
            AgreementLevel::parse(l)
                .ok_or_else(|| ApiError::bad_request(format!("unknown agreement level '{l}'")))
        })
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Predicate::Agreement { metric_id, levels })
}
