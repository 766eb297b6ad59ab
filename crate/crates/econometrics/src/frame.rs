//! A small column store for estimation inputs.

use std::collections::HashMap;
use std::io::Read;

use holdup_tariff::FirmYearPanel;

use crate::error::{EconError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    /// Missing cells are NaN.
    Num(Vec<f64>),
    /// Missing cells are empty strings.
    Text(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Num(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frame {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Frame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Adds or replaces a column.
    pub fn insert(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if !self.columns.is_empty() && column.len() != self.nrows() {
            return Err(EconError::BadColumn {
                column: name,
                reason: format!("{} rows, frame has {}", column.len(), self.nrows()),
            });
        }
        match self.names.iter().position(|n| *n == name) {
            Some(i) => self.columns[i] = column,
            None => {
                self.names.push(name);
                self.columns.push(column);
            }
        }
        Ok(())
    }

    pub fn with_num(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        self.insert(name, Column::Num(values))?;
        Ok(self)
    }

    pub fn with_text<S: ToString>(mut self, name: &str, values: &[S]) -> Result<Self> {
        self.insert(name, Column::Text(values.iter().map(ToString::to_string).collect()))?;
        Ok(self)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| EconError::UnknownColumn(name.to_string()))
    }

    pub fn num(&self, name: &str) -> Result<&[f64]> {
        match self.column(name)? {
            Column::Num(v) => Ok(v),
            Column::Text(_) => Err(EconError::BadColumn {
                column: name.to_string(),
                reason: "expected numbers".into(),
            }),
        }
    }

    /// Dense level ids in order of first appearance; `None` marks a
    /// missing cell.
    pub fn levels(&self, name: &str) -> Result<Vec<Option<usize>>> {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut id = |key: String| {
            let next = seen.len();
            *seen.entry(key).or_insert(next)
        };
        Ok(match self.column(name)? {
            Column::Num(v) => v
                .iter()
                .map(|x| (!x.is_nan()).then(|| id(x.to_bits().to_string())))
                .collect(),
            Column::Text(v) => v.iter().map(|s| (!s.is_empty()).then(|| id(s.clone()))).collect(),
        })
    }

    /// Columns whose nonempty cells all parse as numbers are numeric.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        // `#` lines carry provenance in files this workspace writes.
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (col, cell) in raw.iter_mut().zip(rec.iter()) {
                col.push(cell.trim().to_string());
            }
        }
        let mut frame = Frame::new();
        for (name, cells) in names.into_iter().zip(raw) {
            let parsed: Option<Vec<f64>> = cells
                .iter()
                .map(|c| if c.is_empty() { Some(f64::NAN) } else { c.parse().ok() })
                .collect();
            let column = match parsed {
                Some(v) => Column::Num(v),
                None => Column::Text(cells),
            };
            frame.insert(name, column)?;
        }
        Ok(frame)
    }

    pub fn from_panel(panel: &FirmYearPanel) -> Result<Self> {
        Self::read_csv(panel.to_csv().as_bytes())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| match c {
                Column::Num(v) => Column::Num(rows.iter().map(|&i| v[i]).collect()),
                Column::Text(v) => Column::Text(rows.iter().map(|&i| v[i].clone()).collect()),
            })
            .collect();
        Self {
            names: self.names.clone(),
            columns,
        }
    }
}
