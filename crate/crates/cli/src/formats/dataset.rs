//! Dataset CSV with a one-line `#` header carrying the generative
//! metadata, then plain columns: inputs, and either output values or a
//! final integer label column.

use std::fmt::Write as _;
use std::path::Path;

use rankscope_core::datagen::{Dataset, DatasetMeta, Targets};
use rankscope_core::linalg::Matrix;

use crate::error::{CliError, CliResult};

const MAGIC: &str = "# rankscope-dataset v1";

pub fn to_csv(d: &Dataset) -> String {
    let mut s = String::new();
    let kind = match &d.targets {
        Targets::Values(_) => "values".to_string(),
        Targets::Labels { classes, .. } => format!("labels classes={classes}"),
    };
    let _ = write!(s, "{MAGIC} kind={kind} d_in={} d_out={} n={}", d.d_in(), d.d_out(), d.n());
    if let Some(l) = d.meta.latent_dim {
        let _ = write!(s, " latent_dim={l}");
    }
    if let Some(k) = d.meta.true_rank {
        let _ = write!(s, " true_rank={k}");
    }
    if let Some(seed) = d.meta.seed {
        let _ = write!(s, " seed={seed}");
    }
    if let Some(bx) = &d.meta.domain_box {
        let parts: Vec<String> = bx.iter().map(|(lo, hi)| format!("{lo}:{hi}")).collect();
        let _ = write!(s, " box={}", parts.join(";"));
    }
    s.push('\n');
    for i in 0..d.d_in() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "x{i}");
    }
    match &d.targets {
        Targets::Values(y) => {
            for i in 0..y.rows() {
                let _ = write!(s, ",y{i}");
            }
        }
        Targets::Labels { .. } => s.push_str(",label"),
    }
    s.push('\n');
    for j in 0..d.n() {
        for i in 0..d.d_in() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", d.x.get(i, j));
        }
        match &d.targets {
            Targets::Values(y) => {
                for i in 0..y.rows() {
                    let _ = write!(s, ",{}", y.get(i, j));
                }
            }
            Targets::Labels { labels, .. } => {
                let _ = write!(s, ",{}", labels[j]);
            }
        }
        s.push('\n');
    }
    s
}

pub fn from_csv(text: &str) -> CliResult<Dataset> {
    let bad = |msg: String| CliError::Config(format!("dataset csv: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    if !header.starts_with(MAGIC) {
        return Err(bad(format!("missing `{MAGIC}` header")));
    }
    let mut kind_values = true;
    let mut classes = 0usize;
    let mut d_in = None;
    let mut d_out = None;
    let mut n = None;
    let mut meta = DatasetMeta::default();
    for token in header[MAGIC.len()..].split_whitespace() {
        let (key, value) =
            token.split_once('=').ok_or_else(|| bad(format!("bad meta token `{token}`")))?;
        match key {
            "kind" => kind_values = value == "values",
            "classes" => classes = value.parse().map_err(|_| bad("bad classes".into()))?,
            "d_in" => d_in = Some(value.parse().map_err(|_| bad("bad d_in".into()))?),
            "d_out" => d_out = Some(value.parse().map_err(|_| bad("bad d_out".into()))?),
            "n" => n = Some(value.parse().map_err(|_| bad("bad n".into()))?),
            "latent_dim" => meta.latent_dim = Some(value.parse().map_err(|_| bad("bad latent_dim".into()))?),
            "true_rank" => meta.true_rank = Some(value.parse().map_err(|_| bad("bad true_rank".into()))?),
            "seed" => meta.seed = Some(value.parse().map_err(|_| bad("bad seed".into()))?),
            "box" => {
                let pairs: CliResult<Vec<(f64, f64)>> = value
                    .split(';')
                    .map(|p| {
                        let (lo, hi) =
                            p.split_once(':').ok_or_else(|| bad(format!("bad box pair `{p}`")))?;
                        Ok((
                            lo.parse().map_err(|_| bad("bad box number".into()))?,
                            hi.parse().map_err(|_| bad("bad box number".into()))?,
                        ))
                    })
                    .collect();
                meta.domain_box = Some(pairs?);
            }
            _ => return Err(bad(format!("unknown meta key `{key}`"))),
        }
    }
    let d_in = d_in.ok_or_else(|| bad("missing d_in".into()))?;
    let d_out = d_out.ok_or_else(|| bad("missing d_out".into()))?;
    let n = n.ok_or_else(|| bad("missing n".into()))?;
    if d_in == 0 || n == 0 {
        return Err(bad("d_in and n must be positive".into()));
    }
    let _column_header = lines.next().ok_or_else(|| bad("missing column header".into()))?;

    let mut x = Matrix::zeros(d_in, n);
    let mut values = if kind_values { Some(Matrix::zeros(d_out, n)) } else { None };
    let mut labels = Vec::new();
    let mut rows = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        if rows >= n {
            return Err(bad(format!("more than {n} data rows")));
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = d_in + if kind_values { d_out } else { 1 };
        if fields.len() != expected {
            return Err(bad(format!("row {}: expected {expected} fields, got {}", rows + 1, fields.len())));
        }
        for i in 0..d_in {
            let v: f64 = fields[i].parse().map_err(|_| bad(format!("row {}: bad number", rows + 1)))?;
            x.set(i, rows, v);
        }
        if let Some(y) = values.as_mut() {
            for i in 0..d_out {
                let v: f64 = fields[d_in + i]
                    .parse()
                    .map_err(|_| bad(format!("row {}: bad number", rows + 1)))?;
                y.set(i, rows, v);
            }
        } else {
            let label: usize = fields[d_in]
                .parse()
                .map_err(|_| bad(format!("row {}: bad label", rows + 1)))?;
            if label == 0 || label > classes {
                return Err(bad(format!("row {}: label {label} outside 1..={classes}", rows + 1)));
            }
            labels.push(label);
        }
        rows += 1;
    }
    if rows != n {
        return Err(bad(format!("expected {n} rows, got {rows}")));
    }
    let targets = match values {
        Some(y) => Targets::Values(y),
        None => Targets::Labels { labels, classes },
    };
    Ok(Dataset { x, targets, meta })
}

pub fn save(d: &Dataset, path: &Path) -> CliResult<()> {
    crate::formats::write_atomic(path, to_csv(d).as_bytes())
}

pub fn load(path: &Path) -> CliResult<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankscope_core::datagen;

    #[test]
    fn values_round_trip_exactly() {
        let d = datagen::synth_lowrank(6, 4, 3, 2, 25, 16, 7).unwrap();
        let csv = to_csv(&d);
        let back = from_csv(&csv).unwrap();
        assert_eq!(back, d);
        assert_eq!(to_csv(&back), csv);
    }

    #[test]
    fn labels_round_trip_exactly() {
        let d = datagen::s_shape_classes(4, 25, 0.05, 3).unwrap();
        let back = from_csv(&to_csv(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_missing_header_and_bad_rows() {
        assert!(from_csv("x0,y0\n1,2\n").is_err());
        let d = datagen::s_shape_classes(2, 3, 0.0, 0).unwrap();
        let csv = to_csv(&d);
        let truncated: String = csv.lines().take(4).collect::<Vec<_>>().join("\n");
        assert!(from_csv(&truncated).is_err());
    }
}
