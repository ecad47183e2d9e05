//! Flat `key = value` experiment configs. Blank lines and `#` comments
//! are skipped; the `row` key repeats, one per experiment cell; every
//! other key is single-valued and unknown keys are rejected.

use crate::CliError;
use revmap::data::DataSource;
use revmap::optimize::Method;
use revmap::projections::Alpha;
use revmap::training::EmbeddingChoice;

/// One experiment cell: an embedding plus its scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub embedding: EmbeddingChoice,
    pub scale_m: f64,
}

/// Parsed `run` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: SourceKind,
    pub data_dir: Option<String>,
    pub count: usize,
    pub test_fraction: f64,
    pub repeats: usize,
    pub budget: usize,
    pub method: Method,
    pub seed: u64,
    pub qubits: usize,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    FashionMnist,
    Synthetic,
}

impl RunConfig {
    pub fn data_source(&self, data_dir: &std::path::Path) -> DataSource {
        match self.source {
            SourceKind::FashionMnist => DataSource::FashionMnist(data_dir.to_path_buf()),
            SourceKind::Synthetic => DataSource::Synthetic(self.seed),
        }
    }
}

/// Parse an alpha spelled as a projection name, a number, or `-inf`.
pub fn parse_alpha(s: &str) -> Result<Alpha<f64>, CliError> {
    match s {
        "gnomonic" => Ok(Alpha::gnomonic()),
        "stereographic" => Ok(Alpha::stereographic()),
        "twilight" => Ok(Alpha::twilight()),
        "orthographic" | "-inf" => Ok(Alpha::orthographic()),
        other => {
            let v: f64 = other
                .parse()
                .map_err(|_| CliError::Config(format!("bad alpha value `{other}`")))?;
            Alpha::finite(v).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn parse_row(value: &str) -> Result<Row, CliError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    match parts.as_slice() {
        ["amplitude"] => Ok(Row { embedding: EmbeddingChoice::Amplitude, scale_m: 1.0 }),
        ["reverse", alpha, m] => {
            let scale_m: f64 = m
                .parse()
                .map_err(|_| CliError::Config(format!("bad scale M `{m}`")))?;
            if !(scale_m > 0.0) {
                return Err(CliError::Config(format!("scale M must be positive, got {m}")));
            }
            Ok(Row { embedding: EmbeddingChoice::Reverse(parse_alpha(alpha)?), scale_m })
        }
        _ => Err(CliError::Config(format!(
            "bad row `{value}`: expected `amplitude` or `reverse <alpha> <M>`"
        ))),
    }
}

/// Parse config text. All keys optional except at least one `row`.
pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig {
        source: SourceKind::FashionMnist,
        data_dir: None,
        count: 260,
        test_fraction: 0.3,
        repeats: 10,
        budget: 200,
        method: Method::NelderMead,
        seed: 1,
        qubits: 8,
        rows: Vec::new(),
    };
    let mut seen: Vec<&str> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key != "row" {
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let bad = |what: &str| CliError::Config(format!("line {}: bad {what} `{value}`", lineno + 1));
        match key {
            "source" => {
                cfg.source = match value {
                    "fashion_mnist" => SourceKind::FashionMnist,
                    "synthetic" => SourceKind::Synthetic,
                    _ => return Err(bad("source")),
                };
                seen.push("source");
            }
            "data_dir" => {
                cfg.data_dir = Some(value.to_string());
                seen.push("data_dir");
            }
            "count" => {
                cfg.count = value.parse().map_err(|_| bad("count"))?;
                seen.push("count");
            }
            "test_fraction" => {
                cfg.test_fraction = value.parse().map_err(|_| bad("test_fraction"))?;
                seen.push("test_fraction");
            }
            "repeats" => {
                cfg.repeats = value.parse().map_err(|_| bad("repeats"))?;
                seen.push("repeats");
            }
            "budget" => {
                cfg.budget = value.parse().map_err(|_| bad("budget"))?;
                seen.push("budget");
            }
            "method" => {
                cfg.method = Method::parse(value).ok_or_else(|| bad("method"))?;
                seen.push("method");
            }
            "seed" => {
                cfg.seed = value.parse().map_err(|_| bad("seed"))?;
                seen.push("seed");
            }
            "qubits" => {
                cfg.qubits = value.parse().map_err(|_| bad("qubits"))?;
                seen.push("qubits");
            }
            "row" => cfg.rows.push(parse_row(value)?),
            other => {
                return Err(CliError::Config(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    if cfg.rows.is_empty() {
        return Err(CliError::Config("config has no `row` entries".into()));
    }
    if !(0.0..1.0).contains(&cfg.test_fraction) {
        return Err(CliError::Config(format!(
            "test_fraction must lie in [0, 1), got {}",
            cfg.test_fraction
        )));
    }
    if cfg.repeats == 0 {
        return Err(CliError::Config("repeats must be at least 1".into()));
    }
    Ok(cfg)
}

/// Load and parse a config file; a missing file is a config error.
pub fn load_run_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_run_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo
source = synthetic
count = 40
test_fraction = 0.25
repeats = 2
budget = 60
method = spsa
seed = 9
row = amplitude
row = reverse twilight 800
row = reverse -inf 2500
row = reverse -1 2000
";

    #[test]
    fn parses_full_config() {
        let cfg = parse_run_config(SAMPLE).unwrap();
        assert_eq!(cfg.source, SourceKind::Synthetic);
        assert_eq!(cfg.count, 40);
        assert_eq!(cfg.repeats, 2);
        assert_eq!(cfg.method, Method::Spsa);
        assert_eq!(cfg.rows.len(), 4);
        assert_eq!(cfg.rows[0].embedding, EmbeddingChoice::Amplitude);
        assert_eq!(
            cfg.rows[2].embedding,
            EmbeddingChoice::Reverse(Alpha::orthographic())
        );
        assert_eq!(cfg.rows[3].embedding, EmbeddingChoice::Reverse(Alpha::stereographic()));
        assert_eq!(cfg.rows[1].scale_m, 800.0);
    }

    #[test]
    fn rejects_unknown_key() {
        let err = parse_run_config("rows = 3\nrow = amplitude\n").unwrap_err();
        assert!(err.message().contains("unknown key `rows`"));
    }

    #[test]
    fn rejects_duplicate_key() {
        let err = parse_run_config("count = 3\ncount = 4\nrow = amplitude\n").unwrap_err();
        assert!(err.message().contains("duplicate key"));
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(parse_run_config("row = reverse\n").is_err());
        assert!(parse_run_config("row = reverse twilight\n").is_err());
        assert!(parse_run_config("row = reverse twilight -5\n").is_err());
        assert!(parse_run_config("row = reverse 1.5 800\n").is_err());
        assert!(parse_run_config("").is_err());
    }

    #[test]
    fn alpha_spellings() {
        assert_eq!(parse_alpha("twilight").unwrap(), Alpha::twilight());
        assert_eq!(parse_alpha("-inf").unwrap(), Alpha::orthographic());
        assert_eq!(parse_alpha("-2.5").unwrap(), Alpha::finite(-2.5).unwrap());
        assert!(parse_alpha("1.0").is_err());
        assert!(parse_alpha("sideways").is_err());
    }

    #[test]
    fn missing_file_is_config_error() {
        let err = load_run_config(std::path::Path::new("/nonexistent/x.cfg")).unwrap_err();
        assert_eq!(err.exit_code(), crate::ExitCode::UsageOrConfig);
    }
}
