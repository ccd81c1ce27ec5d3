//! Resumable census state, stored as JSON.
//!
//! One record per finished length plus, for the length in progress, the
//! last finished work unit (`cursor_sigma`, the suffix at its root) and the
//! counts accumulated so far.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::{Node, Tally};
use super::{classify, CensusRow, SPLIT_DEPTH};
use crate::error::{Error, Result};
use crate::sigma::TraceType;

pub const CHECKPOINT_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialTally {
    pub types: u64,
    pub perm_total: u64,
    pub first_witness_skipped: u64,
    pub exact_checks: u64,
    pub ets: Vec<TraceType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: String,
    pub split_depth: u32,
    pub completed_lengths: Vec<CensusRow>,
    pub current_length: Option<usize>,
    pub cursor_sigma: Option<TraceType>,
    pub partial: Option<PartialTally>,
}

impl Default for Checkpoint {
    fn default() -> Self {
        Checkpoint::new()
    }
}

impl Checkpoint {
    pub fn new() -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION.to_string(),
            split_depth: SPLIT_DEPTH,
            completed_lengths: Vec::new(),
            current_length: None,
            cursor_sigma: None,
            partial: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {:?}",
                ckpt.version
            )));
        }
        if ckpt.current_length.is_some() != ckpt.partial.is_some()
            || ckpt.partial.is_some() != ckpt.cursor_sigma.is_some()
        {
            return Err(Error::Checkpoint("incomplete in-progress record".into()));
        }
        Ok(ckpt)
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn completed(&self, length: usize) -> Option<&CensusRow> {
        self.completed_lengths.iter().find(|r| r.length == length)
    }

    pub fn complete(&mut self, row: CensusRow) {
        self.completed_lengths.retain(|r| r.length != row.length);
        self.completed_lengths.push(row);
        self.completed_lengths.sort_by_key(|r| r.length);
        self.current_length = None;
        self.cursor_sigma = None;
        self.partial = None;
    }

    pub(super) fn set_partial(&mut self, length: usize, last_done: &Node, tally: &Tally) {
        self.current_length = Some(length);
        self.cursor_sigma = Some(last_done.sigma());
        self.partial = Some(PartialTally {
            types: tally.types,
            perm_total: tally.perm_total,
            first_witness_skipped: tally.first_witness_skipped,
            exact_checks: tally.exact_checks,
            ets: tally.ets.iter().map(|c| c.sigma.clone()).collect(),
        });
    }

    /// Accumulated counts and the index of the first unfinished work unit.
    pub(super) fn resume_point(&self, length: usize, roots: &[Node]) -> Result<(Tally, usize)> {
        let (Some(cur), Some(cursor), Some(partial)) =
            (self.current_length, &self.cursor_sigma, &self.partial)
        else {
            return Ok((Tally::default(), 0));
        };
        if cur != length {
            return Ok((Tally::default(), 0));
        }
        let idx = roots
            .iter()
            .position(|r| r.sigma() == *cursor)
            .ok_or_else(|| Error::Checkpoint(format!("cursor {cursor:?} is not a work unit")))?;
        let ets = partial
            .ets
            .iter()
            .map(classify)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Checkpoint(format!("stored type: {e}")))?;
        let tally = Tally {
            types: partial.types,
            perm_total: partial.perm_total,
            first_witness_skipped: partial.first_witness_skipped,
            exact_checks: partial.exact_checks,
            ets,
        };
        Ok((tally, idx + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census, census_with, CensusOptions};
    use crate::par::Exec;

    #[test]
    fn corrupt_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(Error::Checkpoint(_))));
        fs::write(&path, r#"{"version":"v0","split_depth":12,"completed_lengths":[],"current_length":null,"cursor_sigma":null,"partial":null}"#).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(Error::Checkpoint(_))));
    }

    #[test]
    fn interrupted_run_resumes_to_same_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        let expected = census(15, 18, Exec::Sequential).unwrap();

        // Run length 15 only, then fake an interruption midway through 16.
        let opts = CensusOptions {
            exec: Exec::Sequential,
            checkpoint: Some(path.clone()),
            chunk: Some(7),
        };
        census_with(15, 15, &opts).unwrap();
        let tables = super::super::kernel::Tables::new();
        let roots = super::super::kernel::frontier(SPLIT_DEPTH, &tables);
        let mut tally = Tally::default();
        for root in &roots[..40] {
            super::super::kernel::walk(root, 15, &tables, &mut tally).unwrap();
        }
        let mut ck = Checkpoint::load(&path).unwrap();
        ck.set_partial(16, &roots[39], &tally);
        ck.save(&path).unwrap();

        let resumed = census_with(15, 18, &opts).unwrap();
        assert_eq!(resumed, expected);
        let done = Checkpoint::load(&path).unwrap();
        assert_eq!(done.completed_lengths.len(), 4);
        assert_eq!(done.current_length, None);
    }
}
