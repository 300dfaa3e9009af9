//! Leakage audit: every fitting call registers the row identifiers it
//! consumed; before final evaluation the log is checked against the
//! held-out test identifiers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AuditLog {
    entries: Vec<AuditEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditEntry {
    pub stage: String,
    pub n_rows: usize,
    /// Identifiers (sample paths/ids) consumed by the fitting call.
    ids: BTreeSet<String>,
}

impl AuditLog {
    pub fn record_fit(&mut self, stage: &str, ids: &[String]) {
        self.entries.push(AuditEntry {
            stage: stage.to_string(),
            n_rows: ids.len(),
            ids: ids.iter().cloned().collect(),
        });
    }

    pub fn n_fitting_calls(&self) -> usize {
        self.entries.len()
    }

    /// Error naming the offending stage if any fitting call saw a test
    /// identifier.
    pub fn assert_no_leakage(&self, test_ids: &[String]) -> Result<(), PipelineError> {
        let test: BTreeSet<&String> = test_ids.iter().collect();
        for e in &self.entries {
            if let Some(id) = e.ids.iter().find(|id| test.contains(id)) {
                return Err(PipelineError::LeakageDetected(format!(
                    "stage {:?} consumed test row {:?}",
                    e.stage, id
                )));
            }
        }
        Ok(())
    }
}
