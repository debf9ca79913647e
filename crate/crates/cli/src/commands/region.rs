use extremal_core::spectral::{classify_point, RegionPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub label: String,
    pub bezoutian_rank: usize,
}

impl From<&RegionPoint> for RegionRecord {
    fn from(p: &RegionPoint) -> Self {
        Self { c2: p.c[0], c3: p.c[1], c4: p.c[2], label: p.label.as_str().to_owned(), bezoutian_rank: p.bezoutian_rank }
    }
}

/// Labels every grid point, in grid order.
pub fn region(config: &RunConfig) -> CliResult<Vec<RegionPoint>> {
    let grid = config.region.as_ref().ok_or_else(|| CliError::config("missing `region`"))?.grid();
    Ok((0..grid.len()).into_par_iter().map(|i| classify_point(grid.point(i))).collect())
}

pub fn to_csv(points: &[RegionPoint]) -> CliResult<Vec<u8>> {
    output::csv(
        &["c2", "c3", "c4", "label", "bezoutian_rank"],
        points.iter().map(|p| {
            vec![
                p.c[0].to_string(),
                p.c[1].to_string(),
                p.c[2].to_string(),
                p.label.as_str().to_owned(),
                p.bezoutian_rank.to_string(),
            ]
        }),
    )
}
