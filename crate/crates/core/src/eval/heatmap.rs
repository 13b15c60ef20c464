use std::path::Path;

use crate::error::{Error, Result};
use crate::immigrate::WeightMatrix;

/// Six significant digits, fixed notation; zero is written as "0".
pub fn format_significant(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let scale = 10f64.powi(5 - magnitude);
    let rounded = (v * scale).round() / scale;
    format!("{rounded:.decimals$}")
}

/// CSV with a header row and a leading name column.
pub fn export_heatmap(w: &WeightMatrix, feature_names: &[String], path: &Path) -> Result<()> {
    if feature_names.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            actual: feature_names.len(),
        });
    }
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut out = csv::Writer::from_writer(file);
    let mut header = vec![String::new()];
    header.extend(feature_names.iter().cloned());
    out.write_record(&header)?;
    for (i, name) in feature_names.iter().enumerate() {
        let mut record = vec![name.clone()];
        record.extend((0..w.dim()).map(|j| format_significant(w.get(i, j))));
        out.write_record(&record)?;
    }
    out.flush().map_err(io)?;
    Ok(())
}
