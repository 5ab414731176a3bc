//! Spot-check harness for the loss functions: reads a CSV of
//! `kind,p_or_x,y,expected` rows and verifies each against the library.
//!
//! Kinds: `focal` (p, label in {0,1}), `smoothl1` (x, y), `crossentropy`
//! (probability of the true class under a one-hot truth; y is ignored).
//! All use the default parameters (alpha 0.25, gamma 2.0, beta 1/9).

use std::path::Path;

use kitti_eval::losses::{
    cross_entropy, focal_loss, smooth_l1, FocalParams, ProbPolicy, SmoothL1Params,
};

use crate::{CliError, CliResult};

const TOLERANCE: f64 = 1e-9;

fn evaluate_row(kind: &str, a: f64, b: f64) -> Result<f64, String> {
    match kind {
        "focal" => {
            let positive = if b == 0.0 {
                false
            } else if b == 1.0 {
                true
            } else {
                return Err(format!("focal label must be 0 or 1, got {b}"));
            };
            focal_loss(a, positive, &FocalParams::default(), ProbPolicy::Strict)
                .map_err(|e| e.to_string())
        }
        "smoothl1" => Ok(smooth_l1(a, b, &SmoothL1Params::default())),
        "crossentropy" => {
            cross_entropy(&[a, 1.0 - a], &[1.0, 0.0], ProbPolicy::Strict).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown kind {other:?}")),
    }
}

pub fn cmd_loss_check(input: &Path) -> CliResult {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(CliError::Usage(format!(
                "line {line_no}: expected 4 fields (kind,p_or_x,y,expected), got {}",
                fields.len()
            )));
        }
        let parse = |s: &str, name: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|_| CliError::Usage(format!("line {line_no}: bad {name} {s:?}")))
        };
        let a = parse(fields[1], "p_or_x")?;
        let b = parse(fields[2], "y")?;
        let expected = parse(fields[3], "expected")?;
        let actual = evaluate_row(fields[0], a, b)
            .map_err(|m| CliError::Usage(format!("line {line_no}: {m}")))?;
        checked += 1;
        if (actual - expected).abs() <= TOLERANCE {
            println!("line {line_no}: {} ok ({actual:.12})", fields[0]);
        } else {
            println!(
                "line {line_no}: {} MISMATCH expected {expected:.12}, got {actual:.12}",
                fields[0]
            );
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        Err(CliError::Eval(format!("{mismatches} of {checked} rows mismatched")))
    } else {
        println!("{checked} rows ok");
        Ok(())
    }
}
