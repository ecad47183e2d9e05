//! Minimal CSV helpers. All values are plain numbers or bare words —
//! no quoting or escaping is ever needed — and floats are written with
//! Rust's shortest round-trip formatting so re-parsing reproduces the
//! in-memory tables exactly.

use crate::CliError;

/// Parse rows of floats; every row must have the same width. An
/// optional non-numeric first line is treated as a header and skipped.
pub fn read_float_rows(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if lineno == 0 => continue, // header
            Err(e) => {
                return Err(CliError::Config(format!("line {}: {e}", lineno + 1)));
            }
        }
    }
    if let Some(w) = rows.first().map(Vec::len) {
        if let Some(bad) = rows.iter().position(|r| r.len() != w) {
            return Err(CliError::Config(format!(
                "row {} has {} columns, expected {w}",
                bad + 1,
                rows[bad].len()
            )));
        }
    }
    Ok(rows)
}

/// Write rows of floats, full double precision.
pub fn write_float_rows(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One row of a loss-history CSV
/// (`embedding,alpha,M,model_kind,repeat,iteration,loss`).
#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub embedding: String,
    pub alpha: String,
    pub scale_m: String,
    pub model_kind: String,
    pub repeat: usize,
    pub iteration: usize,
    pub loss: f64,
}

impl LossRow {
    /// Grouping key identifying one plotted configuration.
    pub fn config_key(&self) -> String {
        let alpha = if self.alpha.is_empty() { "-" } else { &self.alpha };
        format!("{} {} M={} {}", self.embedding, alpha, self.scale_m, self.model_kind)
    }
}

pub const LOSS_HEADER: &str = "embedding,alpha,M,model_kind,repeat,iteration,loss";

/// Parse a loss-history CSV emitted by the `run` subcommand.
pub fn read_loss_csv(text: &str) -> Result<Vec<LossRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == LOSS_HEADER => {}
        _ => return Err(CliError::Config(format!("expected header `{LOSS_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(CliError::Config(format!(
                "line {}: expected 7 columns, got {}",
                lineno + 2,
                cols.len()
            )));
        }
        let bad = |what: &str| CliError::Config(format!("line {}: bad {what}", lineno + 2));
        rows.push(LossRow {
            embedding: cols[0].to_string(),
            alpha: cols[1].to_string(),
            scale_m: cols[2].to_string(),
            model_kind: cols[3].to_string(),
            repeat: cols[4].parse().map_err(|_| bad("repeat"))?,
            iteration: cols[5].parse().map_err(|_| bad("iteration"))?,
            loss: cols[6].parse().map_err(|_| bad("loss"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rows_round_trip_exactly() {
        let rows = vec![
            vec![0.1, -2.5e-17, 3.0f64.sqrt(), f64::MIN_POSITIVE],
            vec![1.0 / 3.0, std::f64::consts::PI, -0.0, 255.0],
        ];
        let text = write_float_rows(&rows);
        let back = read_float_rows(&text).unwrap();
        assert_eq!(rows, back);
        // bit-exact, not just equal (distinguishes -0.0 from 0.0)
        for (a, b) in rows.iter().flatten().zip(back.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn header_skipped_and_widths_enforced() {
        let rows = read_float_rows("x,y\n1,2\n3,4\n").unwrap();
        assert_eq!(rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(read_float_rows("1,2\n3\n").is_err());
        assert!(read_float_rows("1,2\nzzz,4\n").is_err());
    }

    #[test]
    fn loss_csv_round_trip() {
        let text = format!(
            "{LOSS_HEADER}\nreverse,-1.5,800,equivariant,0,1,0.693\nreverse,-1.5,800,equivariant,0,2,0.605\n"
        );
        let rows = read_loss_csv(&text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].config_key(), "reverse -1.5 M=800 equivariant");
        assert_eq!(rows[1].loss, 0.605);
        assert!(read_loss_csv("nope\n").is_err());
    }
}
