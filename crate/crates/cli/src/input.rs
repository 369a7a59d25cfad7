use std::path::Path;

use bridgex_core::{Dataset, Matrix};

use crate::error::CliError;

/// Raw covariates and response read from a CSV file.
#[derive(Debug)]
pub struct Table {
    /// Covariate names in column order, response excluded.
    pub columns: Vec<String>,
    pub data: Dataset<f64>,
}

impl Table {
    pub fn index_of(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Usage(format!("no covariate column named {name:?}")))
    }
}

/// Reads `path`, taking `response` as the response column and every other
/// column as a numeric covariate. When `order` is given the covariates are
/// arranged to match it.
pub fn load(path: &Path, response: &str, order: Option<&[String]>) -> Result<Table, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let y_col = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| CliError::Usage(format!("no column named {response:?}")))?;
    let mut x_cols: Vec<usize> = (0..headers.len()).filter(|&j| j != y_col).collect();
    if let Some(order) = order {
        let mut picked = Vec::with_capacity(order.len());
        for name in order {
            let j = x_cols
                .iter()
                .copied()
                .find(|&j| &headers[j] == name)
                .ok_or_else(|| {
                    CliError::Data(format!("{}: missing column {name:?}", path.display()))
                })?;
            picked.push(j);
        }
        if picked.len() != x_cols.len() {
            return Err(CliError::Data(format!(
                "{}: expected {} covariate columns, found {}",
                path.display(),
                picked.len(),
                x_cols.len()
            )));
        }
        x_cols = picked;
    }

    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); x_cols.len()];
    let mut y = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let field = |j: usize| -> Result<f64, CliError> {
            record[j].parse::<f64>().map_err(|_| {
                CliError::Data(format!(
                    "{}: row {}, column {:?}: not a number: {:?}",
                    path.display(),
                    line + 2,
                    headers[j],
                    &record[j]
                ))
            })
        };
        y.push(field(y_col)?);
        for (c, &j) in cols.iter_mut().zip(&x_cols) {
            c.push(field(j)?);
        }
    }
    if y.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    if x_cols.is_empty() {
        return Err(CliError::Data(format!("{}: no covariate columns", path.display())));
    }
    let x = Matrix::from_columns(&cols)?;
    Ok(Table {
        columns: x_cols.iter().map(|&j| headers[j].clone()).collect(),
        data: Dataset::new(x, y)?,
    })
}
