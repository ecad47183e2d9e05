//! The `embed` subcommand: read raw vectors from CSV, push each through
//! the configured embedding, write the unit vectors back out with one
//! extra column.

use crate::csvio::{read_float_rows, write_float_rows};
use crate::CliError;
use revmap::embeddings::{embed, EmbeddingConfig};
use revmap::projections::Alpha;

/// Embed every row of `input_csv`; each n-column row becomes an
/// (n+1)-column unit vector.
pub fn embed_csv(alpha: Alpha<f64>, scale_m: f64, input_csv: &str) -> Result<String, CliError> {
    let rows = read_float_rows(input_csv)?;
    if rows.is_empty() {
        return Err(CliError::Config("no input vectors".into()));
    }
    let cfg = EmbeddingConfig::new(alpha, scale_m)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let embedded: Result<Vec<Vec<f64>>, CliError> = rows
        .iter()
        .map(|row| {
            embed(&cfg, row)
                .map(|e| e.coords)
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .collect();
    Ok(write_float_rows(&embedded?))
}
