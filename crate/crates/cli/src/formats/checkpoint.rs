//! Versioned text checkpoints (`rankscope-net v1`): widths, leaky slope,
//! and per-layer weight/bias arrays at 17 significant digits, so a
//! round-trip reproduces the parameters bit for bit. Unknown versions are
//! rejected.

use std::fmt::Write as _;
use std::path::Path;

use rankscope_core::linalg::Matrix;
use rankscope_core::NetworkParams;

use crate::error::{CliError, CliResult};
use crate::formats::full_precision;

const MAGIC: &str = "rankscope-net v1";

pub fn to_text(p: &NetworkParams) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let widths: Vec<String> = p.widths().iter().map(|w| w.to_string()).collect();
    let _ = writeln!(s, "widths {}", widths.join(" "));
    let _ = writeln!(s, "leaky_slope {}", full_precision(p.leaky_slope()));
    for l in 0..p.depth() {
        let w = p.weight(l);
        let _ = writeln!(s, "layer {}", l + 1);
        let _ = writeln!(s, "weight {} {}", w.rows(), w.cols());
        for i in 0..w.rows() {
            let row: Vec<String> = w.row(i).iter().map(|&v| full_precision(v)).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        let _ = writeln!(s, "bias {}", p.bias(l).len());
        let bias: Vec<String> = p.bias(l).iter().map(|&v| full_precision(v)).collect();
        let _ = writeln!(s, "{}", bias.join(" "));
    }
    s
}

pub fn from_text(text: &str) -> CliResult<NetworkParams> {
    let bad = |msg: String| CliError::Config(format!("checkpoint: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    if header != MAGIC {
        return Err(bad(format!("unknown version `{header}` (expected `{MAGIC}`)")));
    }
    let widths_line = lines.next().ok_or_else(|| bad("missing widths".into()))?;
    let widths: Vec<usize> = widths_line
        .strip_prefix("widths ")
        .ok_or_else(|| bad("missing widths".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(format!("bad width `{t}`"))))
        .collect::<CliResult<_>>()?;
    if widths.len() < 2 {
        return Err(bad("need at least two widths".into()));
    }
    let slope_line = lines.next().ok_or_else(|| bad("missing leaky_slope".into()))?;
    let leaky_slope: f64 = slope_line
        .strip_prefix("leaky_slope ")
        .ok_or_else(|| bad("missing leaky_slope".into()))?
        .parse()
        .map_err(|_| bad("bad leaky_slope".into()))?;

    let depth = widths.len() - 1;
    let mut weights = Vec::with_capacity(depth);
    let mut biases = Vec::with_capacity(depth);
    for l in 0..depth {
        let expect = format!("layer {}", l + 1);
        let got = lines.next().ok_or_else(|| bad(format!("missing `{expect}`")))?;
        if got != expect {
            return Err(bad(format!("expected `{expect}`, got `{got}`")));
        }
        let wline = lines.next().ok_or_else(|| bad("missing weight header".into()))?;
        let dims: Vec<usize> = wline
            .strip_prefix("weight ")
            .ok_or_else(|| bad("missing weight header".into()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad weight dim `{t}`"))))
            .collect::<CliResult<_>>()?;
        if dims.len() != 2 || dims[0] != widths[l + 1] || dims[1] != widths[l] {
            return Err(bad(format!("layer {} weight shape mismatch", l + 1)));
        }
        let mut data = Vec::with_capacity(dims[0] * dims[1]);
        for _ in 0..dims[0] {
            let row = lines.next().ok_or_else(|| bad("truncated weight rows".into()))?;
            let before = data.len();
            for t in row.split_whitespace() {
                data.push(t.parse::<f64>().map_err(|_| bad(format!("bad number `{t}`")))?);
            }
            if data.len() - before != dims[1] {
                return Err(bad(format!("layer {} weight row length", l + 1)));
            }
        }
        weights.push(
            Matrix::new(dims[0], dims[1], data)
                .map_err(|e| bad(format!("layer {}: {e}", l + 1)))?,
        );
        let bline = lines.next().ok_or_else(|| bad("missing bias header".into()))?;
        let blen: usize = bline
            .strip_prefix("bias ")
            .ok_or_else(|| bad("missing bias header".into()))?
            .parse()
            .map_err(|_| bad("bad bias length".into()))?;
        if blen != widths[l + 1] {
            return Err(bad(format!("layer {} bias length mismatch", l + 1)));
        }
        let brow = lines.next().ok_or_else(|| bad("truncated bias".into()))?;
        let bias: Vec<f64> = brow
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad number `{t}`"))))
            .collect::<CliResult<_>>()?;
        if bias.len() != blen {
            return Err(bad(format!("layer {} bias row length", l + 1)));
        }
        biases.push(bias);
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(bad("trailing content".into()));
    }
    NetworkParams::new(weights, biases, leaky_slope).map_err(|e| bad(e.to_string()))
}

pub fn save(p: &NetworkParams, path: &Path) -> CliResult<()> {
    crate::formats::write_atomic(path, to_text(p).as_bytes())
}

pub fn load(path: &Path) -> CliResult<NetworkParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    from_text(&text)
}
