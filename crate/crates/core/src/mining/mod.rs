//! Sequence databases built from plan corpora, and mining of maximal
//! frequent contiguous action sequences.
//!
//! Support is counted per sequence: a pattern occurring twice in one plan
//! counts once. Occurrences must be contiguous (no gaps), and maximality
//! is with respect to contiguous containment.

pub mod patterns;
pub mod spmf;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::plan::Plan;

pub type ItemId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("empty plan corpus")]
    EmptyCorpus,
    #[error("plan `{0}` is empty")]
    EmptyPlan(String),
    #[error("sequence {sequence} uses item {item} which is not in the dictionary")]
    UnknownItem { sequence: usize, item: ItemId },
    #[error("{labels} labels for {sequences} sequences")]
    LabelCount { labels: usize, sequences: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("minsup must lie in (0, 1], got {0}")]
    MinSupport(f64),
    #[error("max pattern length must be positive")]
    MaxLength,
}

/// Bijection between action signatures and item ids `1..=k`, numbered in
/// lexicographic signature order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionDictionary {
    signatures: Vec<String>,
    index: HashMap<String, ItemId>,
}

impl ActionDictionary {
    pub fn from_signatures<I, S>(signatures: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut sigs: Vec<String> = signatures.into_iter().map(Into::into).collect();
        sigs.sort();
        sigs.dedup();
        let index = sigs.iter().enumerate().map(|(i, s)| (s.clone(), i as ItemId + 1)).collect();
        ActionDictionary { signatures: sigs, index }
    }

    pub fn id(&self, signature: &str) -> Option<ItemId> {
        self.index.get(signature).copied()
    }

    pub fn signature(&self, id: ItemId) -> Option<&str> {
        let i = (id as usize).checked_sub(1)?;
        self.signatures.get(i).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    /// `(id, signature)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (ItemId, &str)> {
        self.signatures.iter().enumerate().map(|(i, s)| (i as ItemId + 1, s.as_str()))
    }

    pub fn decode(&self, items: &[ItemId]) -> Option<Vec<String>> {
        items.iter().map(|&i| self.signature(i).map(str::to_string)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDatabase {
    pub sequences: Vec<Vec<ItemId>>,
    pub dictionary: ActionDictionary,
    /// Where each sequence came from, usually a plan file name.
    pub labels: Vec<String>,
}

impl SequenceDatabase {
    /// Checks the database invariants before wrapping the parts.
    pub fn new(
        sequences: Vec<Vec<ItemId>>,
        dictionary: ActionDictionary,
        labels: Vec<String>,
    ) -> Result<Self, CorpusError> {
        if labels.len() != sequences.len() {
            return Err(CorpusError::LabelCount { labels: labels.len(), sequences: sequences.len() });
        }
        for (i, seq) in sequences.iter().enumerate() {
            if seq.is_empty() {
                return Err(CorpusError::EmptyPlan(labels[i].clone()));
            }
            if let Some(&item) = seq.iter().find(|&&it| dictionary.signature(it).is_none()) {
                return Err(CorpusError::UnknownItem { sequence: i, item });
            }
        }
        Ok(SequenceDatabase { sequences, dictionary, labels })
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// Encodes a plan corpus. Labels default to `plan-<i>` when not given.
pub fn build_sequence_db(plans: &[Plan]) -> Result<SequenceDatabase, CorpusError> {
    let labels = (0..plans.len()).map(|i| format!("plan-{i}")).collect();
    build_labelled_sequence_db(plans, labels)
}

pub fn build_labelled_sequence_db(plans: &[Plan], labels: Vec<String>) -> Result<SequenceDatabase, CorpusError> {
    if plans.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if labels.len() != plans.len() {
        return Err(CorpusError::LabelCount { labels: labels.len(), sequences: plans.len() });
    }
    if let Some(i) = plans.iter().position(Plan::is_empty) {
        return Err(CorpusError::EmptyPlan(labels[i].clone()));
    }
    let dictionary = ActionDictionary::from_signatures(plans.iter().flat_map(|p| p.steps.iter().cloned()));
    let sequences = plans
        .iter()
        .map(|p| p.steps.iter().map(|s| dictionary.id(s).expect("dictionary covers corpus")).collect())
        .collect();
    Ok(SequenceDatabase { sequences, dictionary, labels })
}

/// Number of sequences containing `items` as a contiguous run.
pub fn support_of(db: &SequenceDatabase, items: &[ItemId]) -> usize {
    if items.is_empty() {
        return db.len();
    }
    db.sequences.iter().filter(|s| s.windows(items.len()).any(|w| w == items)).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningConfig {
    pub minsup: f64,
    pub max_length: Option<usize>,
}

impl MiningConfig {
    pub fn new(minsup: f64) -> Result<Self, ConfigError> {
        Self::with_max_length(minsup, None)
    }

    pub fn with_max_length(minsup: f64, max_length: Option<usize>) -> Result<Self, ConfigError> {
        if !(minsup > 0.0 && minsup <= 1.0) {
            return Err(ConfigError::MinSupport(minsup));
        }
        if max_length == Some(0) {
            return Err(ConfigError::MaxLength);
        }
        Ok(MiningConfig { minsup, max_length })
    }

    /// `ceil(minsup × n)`, at least 1. A small tolerance keeps values like
    /// `0.07 × 100` from rounding up to 8.
    pub fn threshold(&self, n: usize) -> usize {
        let raw = self.minsup * n as f64;
        ((raw - 1e-9).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub items: Vec<ItemId>,
    pub support: usize,
}

/// Occurrence of a pattern: sequence index and position of its last item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Occurrence {
    seq: u32,
    end: u32,
}

fn distinct_sequences(occ: &[Occurrence]) -> usize {
    let mut count = 0;
    let mut last = None;
    for o in occ {
        if last != Some(o.seq) {
            count += 1;
            last = Some(o.seq);
        }
    }
    count
}

struct Miner<'a> {
    db: &'a SequenceDatabase,
    threshold: usize,
    max_length: usize,
    out: Vec<Pattern>,
}

impl Miner<'_> {
    /// Frequent one-item right extensions of a pattern, by item id.
    fn extensions(&self, occ: &[Occurrence]) -> BTreeMap<ItemId, Vec<Occurrence>> {
        let mut ext: BTreeMap<ItemId, Vec<Occurrence>> = BTreeMap::new();
        for o in occ {
            let seq = &self.db.sequences[o.seq as usize];
            if let Some(&next) = seq.get(o.end as usize + 1) {
                ext.entry(next).or_default().push(Occurrence { seq: o.seq, end: o.end + 1 });
            }
        }
        ext.retain(|_, v| distinct_sequences(v) >= self.threshold);
        ext
    }

    fn has_frequent_left_extension(&self, len: usize, occ: &[Occurrence]) -> bool {
        let mut before: BTreeMap<ItemId, Vec<u32>> = BTreeMap::new();
        for o in occ {
            let start = o.end as usize + 1 - len;
            if start > 0 {
                let prev = self.db.sequences[o.seq as usize][start - 1];
                let seqs = before.entry(prev).or_default();
                if seqs.last() != Some(&o.seq) {
                    seqs.push(o.seq);
                }
            }
        }
        before.values().any(|s| s.len() >= self.threshold)
    }

    fn grow(&mut self, prefix: &mut Vec<ItemId>, occ: Vec<Occurrence>) {
        let extensions = if prefix.len() < self.max_length { self.extensions(&occ) } else { BTreeMap::new() };
        if extensions.is_empty() {
            let at_cap = prefix.len() >= self.max_length;
            if at_cap || !self.has_frequent_left_extension(prefix.len(), &occ) {
                self.out.push(Pattern { items: prefix.clone(), support: distinct_sequences(&occ) });
            }
            return;
        }
        for (item, next) in extensions {
            prefix.push(item);
            self.grow(prefix, next);
            prefix.pop();
        }
    }
}

/// Mines every maximal frequent contiguous pattern.
///
/// Patterns are grown depth-first by right extension over vertical
/// occurrence lists. A pattern with no frequent right extension is
/// reported when no single item before it is frequent either; any longer
/// frequent superstring would have to contain such a one-item extension.
/// Output is sorted by item sequence.
pub fn mine_maximal(db: &SequenceDatabase, cfg: &MiningConfig) -> Vec<Pattern> {
    let threshold = cfg.threshold(db.len());
    if threshold > db.len() {
        return Vec::new();
    }
    let mut roots: BTreeMap<ItemId, Vec<Occurrence>> = BTreeMap::new();
    for (si, seq) in db.sequences.iter().enumerate() {
        for (pos, &item) in seq.iter().enumerate() {
            roots.entry(item).or_default().push(Occurrence { seq: si as u32, end: pos as u32 });
        }
    }
    let mut miner = Miner { db, threshold, max_length: cfg.max_length.unwrap_or(usize::MAX), out: Vec::new() };
    let mut prefix = Vec::new();
    for (item, occ) in roots {
        if distinct_sequences(&occ) >= threshold {
            prefix.push(item);
            miner.grow(&mut prefix, occ);
            prefix.pop();
        }
    }
    let mut out = miner.out;
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(seqs: &[&[ItemId]]) -> SequenceDatabase {
        let max = seqs.iter().flat_map(|s| s.iter()).copied().max().unwrap_or(0);
        let dict = ActionDictionary::from_signatures((1..=max).map(|i| format!("a{i:03}")));
        let labels = (0..seqs.len()).map(|i| i.to_string()).collect();
        SequenceDatabase::new(seqs.iter().map(|s| s.to_vec()).collect(), dict, labels).unwrap()
    }

    fn plan(steps: &[&str]) -> Plan {
        Plan::new(steps.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn builds_dictionary_in_signature_order() {
        let d = build_sequence_db(&[plan(&["p", "q"]), plan(&["p", "r"])]).unwrap();
        assert_eq!(d.dictionary.iter().collect::<Vec<_>>(), [(1, "p"), (2, "q"), (3, "r")]);
        assert_eq!(d.sequences, vec![vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn single_plan_corpus() {
        assert_eq!(build_sequence_db(&[plan(&["x"])]).unwrap().len(), 1);
    }

    #[test]
    fn rejects_empty_corpus_and_empty_plans() {
        assert_eq!(build_sequence_db(&[]), Err(CorpusError::EmptyCorpus));
        assert_eq!(build_sequence_db(&[plan(&["x"]), plan(&[])]), Err(CorpusError::EmptyPlan("plan-1".into())));
    }

    #[test]
    fn support_is_contiguous_and_ordered() {
        let d = db(&[&[1, 2], &[1, 3]]);
        assert_eq!(support_of(&d, &[1]), 2);
        assert_eq!(support_of(&d, &[1, 3]), 1);
        assert_eq!(support_of(&d, &[2, 1]), 0);
    }

    #[test]
    fn repeated_occurrences_count_once() {
        let d = db(&[&[1, 2, 1, 2], &[2]]);
        assert_eq!(support_of(&d, &[1, 2]), 1);
        assert_eq!(support_of(&d, &[2]), 2);
    }

    #[test]
    fn maximal_patterns_example() {
        let d = db(&[&[1, 2, 3], &[1, 2, 4], &[1, 2, 3]]);
        let two_thirds = MiningConfig::new(2.0 / 3.0).unwrap();
        assert_eq!(mine_maximal(&d, &two_thirds), vec![Pattern { items: vec![1, 2, 3], support: 2 }]);
        let all = MiningConfig::new(1.0).unwrap();
        assert_eq!(mine_maximal(&d, &all), vec![Pattern { items: vec![1, 2], support: 3 }]);
    }

    #[test]
    fn left_extension_blocks_maximality() {
        // [2,3] has no right extension but [1,2,3] is frequent.
        let d = db(&[&[1, 2, 3], &[1, 2, 3]]);
        let cfg = MiningConfig::new(1.0).unwrap();
        assert_eq!(mine_maximal(&d, &cfg), vec![Pattern { items: vec![1, 2, 3], support: 2 }]);
    }

    #[test]
    fn max_length_caps_patterns() {
        let d = db(&[&[1, 2, 3], &[1, 2, 3]]);
        let cfg = MiningConfig::with_max_length(1.0, Some(2)).unwrap();
        let got = mine_maximal(&d, &cfg);
        assert_eq!(got, vec![Pattern { items: vec![1, 2], support: 2 }, Pattern { items: vec![2, 3], support: 2 }]);
    }

    #[test]
    fn threshold_uses_ceiling_without_float_noise() {
        assert_eq!(MiningConfig::new(0.07).unwrap().threshold(100), 7);
        assert_eq!(MiningConfig::new(0.01).unwrap().threshold(50), 1);
        assert_eq!(MiningConfig::new(2.0 / 3.0).unwrap().threshold(3), 2);
        assert_eq!(MiningConfig::new(0.31).unwrap().threshold(100), 31);
        assert_eq!(MiningConfig::new(1e-9).unwrap().threshold(10), 1);
    }

    #[test]
    fn config_validation() {
        assert!(MiningConfig::new(0.0).is_err());
        assert!(MiningConfig::new(1.5).is_err());
        assert!(MiningConfig::new(f64::NAN).is_err());
        assert!(MiningConfig::with_max_length(0.5, Some(0)).is_err());
    }

    #[test]
    fn nothing_frequent_gives_empty_result() {
        let d = db(&[&[1], &[2], &[3]]);
        assert!(mine_maximal(&d, &MiningConfig::new(0.5).unwrap()).is_empty());
    }
}
