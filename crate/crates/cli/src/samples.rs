//! Sampled-function CSV input: a header row, then abscissa and ordinate columns.

use std::path::Path;

use fracvel::SampledFunction64;

use crate::{CliError, CliResult};

pub fn load_samples(path: &Path) -> CliResult<SampledFunction64> {
    let shown = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::usage(format!("{shown}: {e}")))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| CliError::usage(format!("{shown}: {e}")))?;
        if rec.len() < 2 {
            return Err(CliError::usage(format!(
                "{shown}: row {row} has fewer than two columns"
            )));
        }
        let field = |j: usize| -> CliResult<f64> {
            rec[j]
                .parse()
                .map_err(|_| CliError::usage(format!("{shown}: row {row}: `{}` is not a number", &rec[j])))
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    SampledFunction64::new(xs, ys).map_err(|e| CliError::usage(format!("{shown}: {e}")))
}
