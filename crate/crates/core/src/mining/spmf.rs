//! SPMF sequence files and the dictionary sidecar.
//!
//! One sequence per line: each item is followed by ` -1 ` and the line
//! ends with `-2`, e.g. `1 -1 2 -1 -2`. Every itemset holds exactly one
//! action. The sidecar lists `id<TAB>signature` per line.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ActionDictionary, CorpusError, ItemId, SequenceDatabase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpmfError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn malformed(line: usize, message: impl Into<String>) -> SpmfError {
    SpmfError::Malformed { line, message: message.into() }
}

pub fn encode_sequences(sequences: &[Vec<ItemId>]) -> String {
    let mut out = String::new();
    for seq in sequences {
        for item in seq {
            let _ = write!(out, "{item} -1 ");
        }
        out.push_str("-2\n");
    }
    out
}

/// Lines that are blank or start with `#`, `%` or `@` are skipped.
pub fn decode_sequences(text: &str) -> Result<Vec<Vec<ItemId>>, SpmfError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(['#', '%', '@']) {
            continue;
        }
        let mut seq = Vec::new();
        let mut pending: Option<ItemId> = None;
        let mut terminated = false;
        for tok in line.split_whitespace() {
            if terminated {
                return Err(malformed(line_no, format!("unexpected `{tok}` after -2")));
            }
            let value: i64 = tok.parse().map_err(|_| malformed(line_no, format!("`{tok}` is not an integer")))?;
            match value {
                -1 => match pending.take() {
                    Some(item) => seq.push(item),
                    None => return Err(malformed(line_no, "-1 without a preceding item")),
                },
                -2 => {
                    if pending.is_some() {
                        return Err(malformed(line_no, "item not closed by -1 before -2"));
                    }
                    terminated = true;
                }
                v if v > 0 && v <= ItemId::MAX as i64 => {
                    if pending.is_some() {
                        return Err(malformed(line_no, "itemsets must hold a single item"));
                    }
                    pending = Some(v as ItemId);
                }
                v => return Err(malformed(line_no, format!("invalid item {v}"))),
            }
        }
        if !terminated {
            return Err(malformed(line_no, "sequence not terminated by -2"));
        }
        if seq.is_empty() {
            return Err(malformed(line_no, "empty sequence"));
        }
        out.push(seq);
    }
    Ok(out)
}

pub fn encode_dictionary(dict: &ActionDictionary) -> String {
    let mut out = String::new();
    for (id, sig) in dict.iter() {
        let _ = writeln!(out, "{id}\t{sig}");
    }
    out
}

/// Ids must run densely from 1 in lexicographic signature order.
pub fn decode_dictionary(text: &str) -> Result<ActionDictionary, SpmfError> {
    let mut sigs: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (id, sig) = raw.split_once('\t').ok_or_else(|| malformed(line_no, "expected `id<TAB>signature`"))?;
        let id: usize = id.trim().parse().map_err(|_| malformed(line_no, format!("bad id `{id}`")))?;
        if id != sigs.len() + 1 {
            return Err(malformed(line_no, format!("expected id {}, found {id}", sigs.len() + 1)));
        }
        let sig = sig.trim();
        if sig.is_empty() {
            return Err(malformed(line_no, "empty signature"));
        }
        if sigs.last().is_some_and(|prev| prev.as_str() >= sig) {
            return Err(malformed(line_no, "signatures must be unique and in lexicographic order"));
        }
        sigs.push(sig.to_string());
    }
    Ok(ActionDictionary::from_signatures(sigs))
}

impl SequenceDatabase {
    /// Returns `(sequence file, dictionary file)` contents.
    pub fn to_spmf(&self) -> (String, String) {
        (encode_sequences(&self.sequences), encode_dictionary(&self.dictionary))
    }

    /// Labels are not stored in SPMF files; decoded sequences are labelled `seq-<i>`.
    pub fn from_spmf(sequences: &str, dictionary: &str) -> Result<Self, SpmfError> {
        let sequences = decode_sequences(sequences)?;
        let dictionary = decode_dictionary(dictionary)?;
        let labels = (0..sequences.len()).map(|i| format!("seq-{i}")).collect();
        Ok(SequenceDatabase::new(sequences, dictionary, labels)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_vector_is_byte_exact() {
        assert_eq!(encode_sequences(&[vec![1, 2]]), "1 -1 2 -1 -2\n");
    }

    #[test]
    fn double_terminator_is_rejected() {
        let err = decode_sequences("1 -1 -2\n1 -1 -2 -2\n").unwrap_err();
        assert!(matches!(err, SpmfError::Malformed { line: 2, .. }), "{err}");
    }

    #[test]
    fn other_malformed_lines() {
        for bad in ["1 -1", "1 -2", "-1 -2", "-2", "1 2 -1 -2", "0 -1 -2", "x -1 -2"] {
            assert!(decode_sequences(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(decode_sequences("# c\n@CONVERTED\n\n3 -1 -2\n").unwrap(), vec![vec![3]]);
    }

    #[test]
    fn dictionary_must_be_dense_and_sorted() {
        assert!(decode_dictionary("1\ta\n3\tb\n").is_err());
        assert!(decode_dictionary("1\tb\n2\ta\n").is_err());
        assert!(decode_dictionary("1 a\n").is_err());
        let d = decode_dictionary("1\tpick-up a\n2\tstack a b\n").unwrap();
        assert_eq!(d.id("stack a b"), Some(2));
    }

    #[test]
    fn database_items_must_be_in_dictionary() {
        assert!(SequenceDatabase::from_spmf("1 -1 5 -1 -2\n", "1\ta\n").is_err());
    }

    proptest! {
        #[test]
        fn sequence_round_trip(seqs in prop::collection::vec(prop::collection::vec(1u32..50, 1..10), 0..12)) {
            let text = encode_sequences(&seqs);
            prop_assert_eq!(decode_sequences(&text).unwrap(), seqs.clone());
            prop_assert_eq!(encode_sequences(&decode_sequences(&text).unwrap()), text);
        }
    }
}
