use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Tallied outcomes for one measurement setting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountsTable {
    pub setting: String,
    pub outcomes: BTreeMap<String, u64>,
}

impl CountsTable {
    pub fn new(setting: &str) -> Self {
        Self {
            setting: setting.to_owned(),
            outcomes: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, outcome: &str, n: u64) {
        *self.outcomes.entry(outcome.to_owned()).or_insert(0) += n;
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.outcomes.get(outcome).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.outcomes.values().sum()
    }

    /// Fraction of shots with this outcome; errors on an empty table.
    pub fn frequency(&self, outcome: &str) -> Result<f64> {
        let n = self.total();
        if n == 0 {
            return Err(Error::Estimator(format!("setting `{}` has no counts", self.setting)));
        }
        Ok(self.count(outcome) as f64 / n as f64)
    }

    /// Merges another table of the same setting.
    pub fn merge(&mut self, other: &CountsTable) {
        for (k, v) in &other.outcomes {
            self.add(k, *v);
        }
    }
}

/// Writes `setting,outcome,count` rows with a header.
pub fn write_counts_csv<W: Write>(mut w: W, tables: &[CountsTable]) -> Result<()> {
    writeln!(w, "setting,outcome,count")?;
    for t in tables {
        for (k, v) in &t.outcomes {
            writeln!(w, "{},{},{}", t.setting, k, v)?;
        }
    }
    Ok(())
}

/// Reads tables back from `setting,outcome,count` rows, in first-seen order.
pub fn read_counts_csv<R: BufRead>(r: R) -> Result<Vec<CountsTable>> {
    let mut tables: Vec<CountsTable> = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.rsplitn(3, ',').collect();
        if parts.len() != 3 {
            return Err(Error::Estimator(format!("counts line {}: expected 3 fields", n + 1)));
        }
        let (count, outcome, setting) = (parts[0], parts[1], parts[2]);
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::Estimator(format!("counts line {}: bad count `{count}`", n + 1)))?;
        match tables.iter_mut().find(|t| t.setting == setting) {
            Some(t) => t.add(outcome, count),
            None => {
                let mut t = CountsTable::new(setting);
                t.add(outcome, count);
                tables.push(t);
            }
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut a = CountsTable::new("mw 1.5 0 all");
        a.add("00", 7);
        a.add("11", 3);
        let mut b = CountsTable::new("Z,Z");
        b.add("0H", 1);
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &[a.clone(), b.clone()]).unwrap();
        let back = read_counts_csv(&buf[..]).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn empty_table_has_no_frequency() {
        assert!(CountsTable::new("x").frequency("0").is_err());
    }
}
