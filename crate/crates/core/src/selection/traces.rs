//! Evaluation traces: per-epoch errors of every trained model instance on
//! every data split.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
    Synthetic,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Val, Split::Test, Split::Synthetic];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Split::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("expected one of train|val|test|synthetic, found `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainedOn {
    Full,
    Subset,
}

impl TrainedOn {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrainedOn::Full => "full",
            TrainedOn::Subset => "subset",
        }
    }
}

impl fmt::Display for TrainedOn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrainedOn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(TrainedOn::Full),
            "subset" => Ok(TrainedOn::Subset),
            other => Err(format!("expected one of full|subset, found `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub arch_id: String,
    pub run_id: u64,
    pub epoch: u64,
    pub split: Split,
    pub trained_on: TrainedOn,
    pub error: f64,
}

/// Identifies one error curve: a model instance on one split.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    pub arch_id: String,
    pub trained_on: TrainedOn,
    pub run_id: u64,
    pub split: Split,
}

/// A validated, immutable set of evaluation records.
///
/// Every (arch, run, trained_on, split) curve covers epochs `0..len` with no
/// gaps and no duplicates, and every error is finite and in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTraceSet {
    records: Vec<EvalRecord>,
    metadata: BTreeMap<String, String>,
    curves: BTreeMap<CurveKey, Vec<f64>>,
}

impl EvalTraceSet {
    pub fn new(records: Vec<EvalRecord>, metadata: BTreeMap<String, String>) -> Result<Self> {
        Self::with_locations(records, metadata, |i| format!("record {i}"))
    }

    /// Validates `records`, naming offending records through `locate`.
    pub fn with_locations(
        records: Vec<EvalRecord>,
        metadata: BTreeMap<String, String>,
        locate: impl Fn(usize) -> String,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput("trace set has no records".into()));
        }
        let mut slots: BTreeMap<CurveKey, Vec<Option<usize>>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if !r.error.is_finite() || !(0.0..=1.0).contains(&r.error) {
                return Err(Error::schema(
                    locate(i),
                    "error",
                    format!("expected a finite error in [0, 1], found {}", r.error),
                ));
            }
            if r.arch_id.is_empty() {
                return Err(Error::schema(locate(i), "arch_id", "expected a non-empty id"));
            }
            let key = CurveKey {
                arch_id: r.arch_id.clone(),
                trained_on: r.trained_on,
                run_id: r.run_id,
                split: r.split,
            };
            let slot = slots.entry(key).or_default();
            let e = usize::try_from(r.epoch).map_err(|_| {
                Error::schema(locate(i), "epoch", format!("epoch {} too large", r.epoch))
            })?;
            if slot.len() <= e {
                slot.resize(e + 1, None);
            }
            if let Some(prev) = slot[e] {
                return Err(Error::schema(
                    locate(i),
                    "arch_id,run_id,epoch,split,trained_on",
                    format!(
                        "duplicate of {} (arch {}, run {}, epoch {}, split {}, trained_on {})",
                        locate(prev),
                        r.arch_id,
                        r.run_id,
                        r.epoch,
                        r.split,
                        r.trained_on
                    ),
                ));
            }
            slot[e] = Some(i);
        }
        let mut curves = BTreeMap::new();
        for (key, slot) in slots {
            if let Some(missing) = slot.iter().position(Option::is_none) {
                let last = slot.iter().rev().flatten().next().copied().unwrap_or(0);
                return Err(Error::schema(
                    locate(last),
                    "epoch",
                    format!(
                        "epochs for arch {}, run {}, split {}, trained_on {} must be contiguous from 0; epoch {missing} is missing",
                        key.arch_id, key.run_id, key.split, key.trained_on
                    ),
                ));
            }
            let errors = slot.into_iter().flatten().map(|i| records[i].error).collect();
            curves.insert(key, errors);
        }
        Ok(EvalTraceSet {
            records,
            metadata,
            curves,
        })
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// All curves in (arch, trained_on, run, split) order.
    pub fn curves(&self) -> impl Iterator<Item = (&CurveKey, &[f64])> {
        self.curves.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn curve(&self, arch_id: &str, trained_on: TrainedOn, run_id: u64, split: Split) -> Option<&[f64]> {
        self.curves
            .get(&CurveKey {
                arch_id: arch_id.to_owned(),
                trained_on,
                run_id,
                split,
            })
            .map(Vec::as_slice)
    }

    /// Architecture ids in lexicographic order.
    pub fn archs(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for k in self.curves.keys() {
            if out.last() != Some(&k.arch_id.as_str()) {
                out.push(&k.arch_id);
            }
        }
        out
    }

    /// Runs of `arch_id` trained on `trained_on` that report `split`, ascending.
    pub fn runs(&self, arch_id: &str, trained_on: TrainedOn, split: Split) -> Vec<u64> {
        self.curves
            .keys()
            .filter(|k| k.arch_id == arch_id && k.trained_on == trained_on && k.split == split)
            .map(|k| k.run_id)
            .collect()
    }

    /// Errors on every split present for the model instance at `epoch`.
    pub fn errors_at(&self, arch_id: &str, trained_on: TrainedOn, run_id: u64, epoch: usize) -> BTreeMap<Split, f64> {
        Split::ALL
            .into_iter()
            .filter_map(|s| {
                self.curve(arch_id, trained_on, run_id, s)
                    .and_then(|c| c.get(epoch))
                    .map(|&e| (s, e))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rec(arch: &str, run: u64, epoch: u64, split: Split, err: f64) -> EvalRecord {
        EvalRecord {
            arch_id: arch.into(),
            run_id: run,
            epoch,
            split,
            trained_on: TrainedOn::Full,
            error: err,
        }
    }

    #[test]
    fn builds_curves() {
        let t = EvalTraceSet::new(
            vec![
                rec("a", 0, 1, Split::Test, 0.2),
                rec("a", 0, 0, Split::Test, 0.3),
                rec("b", 0, 0, Split::Synthetic, 0.4),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(t.curve("a", TrainedOn::Full, 0, Split::Test), Some(&[0.3, 0.2][..]));
        assert_eq!(t.archs(), vec!["a", "b"]);
    }

    #[test]
    fn rejects_gap_duplicate_range_and_empty() {
        let gap = EvalTraceSet::new(
            vec![rec("a", 0, 0, Split::Test, 0.2), rec("a", 0, 2, Split::Test, 0.2)],
            BTreeMap::new(),
        );
        assert!(matches!(gap, Err(Error::Schema(_))));
        let dup = EvalTraceSet::new(
            vec![rec("a", 0, 0, Split::Test, 0.2), rec("a", 0, 0, Split::Test, 0.3)],
            BTreeMap::new(),
        )
        .unwrap_err();
        let msg = dup.to_string();
        assert!(msg.contains("record 1") && msg.contains("record 0"), "{msg}");
        let range = EvalTraceSet::new(vec![rec("a", 0, 0, Split::Test, 1.2)], BTreeMap::new());
        assert!(matches!(range, Err(Error::Schema(_))));
        assert!(matches!(
            EvalTraceSet::new(vec![], BTreeMap::new()),
            Err(Error::EmptyInput(_))
        ));
    }
}
