//! Verdicts on source/follow-up pairs and fault-detection-rate aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adapters::{Sentiment, Tone, ToneReport};
use crate::corpus::{Generator, Record, TestPair};
use crate::error::Result;
use crate::mr::MrId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    ToneMismatch,
    SentimentMismatch,
    None,
    /// A response was missing or failed; the pair is not counted.
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub pair_id: String,
    pub mr: MrId,
    pub generator: Generator,
    pub tone_src: Option<Tone>,
    pub tone_fup: Option<Tone>,
    pub sentiment_src: Option<Sentiment>,
    pub sentiment_fup: Option<Sentiment>,
    pub violated: bool,
    pub reason: Reason,
}

impl Verdict {
    pub fn excluded(&self) -> bool {
        self.reason == Reason::Excluded
    }
}

impl Record for Verdict {
    fn record_id(&self) -> &str {
        &self.pair_id
    }
}

/// Decides whether the pair breaches its relation. Missing reports exclude
/// the pair.
pub fn check_pair(pair: &TestPair, src: Option<&ToneReport>, fup: Option<&ToneReport>) -> Verdict {
    let (reason, violated) = match (src, fup) {
        (Some(s), Some(f)) => {
            if pair.relation.requires_tone_equal && s.tone != f.tone {
                (Reason::ToneMismatch, true)
            } else if pair.relation.requires_sentiment_equal && s.sentiment != f.sentiment {
                (Reason::SentimentMismatch, true)
            } else {
                (Reason::None, false)
            }
        }
        _ => (Reason::Excluded, false),
    };
    Verdict {
        pair_id: pair.pair_id.clone(),
        mr: pair.mr,
        generator: pair.source.generator,
        tone_src: src.map(|r| r.tone),
        tone_fup: fup.map(|r| r.tone),
        sentiment_src: src.map(|r| r.sentiment),
        sentiment_fup: fup.map(|r| r.sentiment),
        violated,
        reason,
    }
}

pub const ALL: &str = "*";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrRow {
    pub mr: String,
    pub generator: String,
    pub fault_pairs: usize,
    pub total_pairs: usize,
    pub fdr: f64,
    pub excluded_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrReport {
    /// Overall, per MR, per generator, then per MR and generator.
    pub rows: Vec<FdrRow>,
    pub b_total: usize,
    pub excluded_pairs: usize,
    /// Relations left out of the `*` rows.
    pub excluded_mrs: Vec<MrId>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    fault: usize,
    total: usize,
    excluded: usize,
}

/// Groups verdicts by MR, generator and both. Relations in `exclude_mrs`
/// still get their own rows but are left out of aggregated rows.
pub fn aggregate(verdicts: &[Verdict], exclude_mrs: &[MrId]) -> FdrReport {
    let mut groups: BTreeMap<(u8, String, String), Tally> = BTreeMap::new();
    let mut b_total = 0;
    let mut excluded_pairs = 0;
    for v in verdicts {
        let mr = v.mr.as_str().to_string();
        let generator = v.generator.as_str().to_string();
        let in_totals = !exclude_mrs.contains(&v.mr);
        let mut keys = vec![(1, mr.clone(), ALL.to_string()), (3, mr, generator.clone())];
        if in_totals {
            keys.push((0, ALL.into(), ALL.into()));
            keys.push((2, ALL.into(), generator));
        }
        for k in keys {
            let t = groups.entry(k).or_default();
            if v.excluded() {
                t.excluded += 1;
            } else {
                t.total += 1;
                t.fault += usize::from(v.violated);
            }
        }
        if in_totals {
            if v.excluded() {
                excluded_pairs += 1;
            } else {
                b_total += usize::from(v.violated);
            }
        }
    }
    let rows = groups
        .into_iter()
        .map(|((_, mr, generator), t)| FdrRow {
            mr,
            generator,
            fault_pairs: t.fault,
            total_pairs: t.total,
            fdr: if t.total == 0 { 0.0 } else { t.fault as f64 / t.total as f64 },
            excluded_pairs: t.excluded,
        })
        .collect();
    FdrReport {
        rows,
        b_total,
        excluded_pairs,
        excluded_mrs: exclude_mrs.to_vec(),
    }
}

impl FdrReport {
    pub fn row(&self, mr: &str, generator: &str) -> Option<&FdrRow> {
        self.rows.iter().find(|r| r.mr == mr && r.generator == generator)
    }

    /// `mr,generator,fault_pairs,total_pairs,fdr`; groups without executed
    /// pairs are omitted.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["mr", "generator", "fault_pairs", "total_pairs", "fdr"])?;
        for r in self.rows.iter().filter(|r| r.total_pairs > 0) {
            w.write_record([
                r.mr.clone(),
                r.generator.clone(),
                r.fault_pairs.to_string(),
                r.total_pairs.to_string(),
                format!("{:.6}", r.fdr),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }

    /// One row per MR, one FDR column per generator, for bar charts.
    pub fn to_by_mr_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["mr".to_string()];
        header.extend(Generator::ALL.iter().map(|g| g.as_str().to_string()));
        w.write_record(&header)?;
        let mrs: BTreeSet<&str> = self
            .rows
            .iter()
            .filter(|r| r.mr != ALL)
            .map(|r| r.mr.as_str())
            .collect();
        for mr in mrs {
            let mut rec = vec![mr.to_string()];
            for g in Generator::ALL {
                rec.push(match self.row(mr, g.as_str()) {
                    Some(r) if r.total_pairs > 0 => format!("{:.6}", r.fdr),
                    _ => String::new(),
                });
            }
            w.write_record(&rec)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<5} {:<9} {:>7} {:>7} {:>8} {:>8}",
            "MR", "generator", "faults", "pairs", "FDR", "excluded"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<5} {:<9} {:>7} {:>7} {:>8.4} {:>8}",
                r.mr, r.generator, r.fault_pairs, r.total_pairs, r.fdr, r.excluded_pairs
            );
        }
        let _ = writeln!(s, "B_total = {}; excluded pairs = {}", self.b_total, self.excluded_pairs);
        if !self.excluded_mrs.is_empty() {
            let names: Vec<_> = self.excluded_mrs.iter().map(|m| m.as_str()).collect();
            let _ = writeln!(s, "left out of * rows: {}", names.join(", "));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("fdr.csv"), self.to_csv()?)?;
        std::fs::write(dir.join("fdr_by_mr.csv"), self.to_by_mr_csv()?)?;
        std::fs::write(dir.join("fdr_table.txt"), self.to_table())?;
        std::fs::write(dir.join("fdr.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
