//! `cost-model`: emit the analytical cost table for a parameter grid, one
//! row per (federated algorithm, K, d) with the ratio against its
//! centralized counterpart.

use std::path::PathBuf;

use vfcb::costs::{compute_ops, relative_cost, CostParams};
use vfcb::fedsim::Algorithm;

use crate::error::{CliError, CliResult};
use crate::out::{fmt_f64, CsvWriter};

pub fn run(
    horizon: u64,
    participants: u64,
    arm_grid: Vec<u64>,
    dim_grid: Vec<u64>,
    out_dir: PathBuf,
) -> CliResult<()> {
    if horizon == 0 || participants == 0 {
        return Err(CliError::flag("--t and --m must be positive"));
    }
    if arm_grid.is_empty() || dim_grid.is_empty() || arm_grid.contains(&0) || dim_grid.contains(&0)
    {
        return Err(CliError::flag("--k and --d need positive entries"));
    }

    let mut csv = CsvWriter::create(
        &out_dir.join("cost.csv"),
        &[
            "alg", "t", "k", "m", "d", "stage1", "stage2", "stage3", "total_ops", "total_bytes",
            "relative_cost",
        ],
    )?;
    let pairs = [
        (Algorithm::VfUcb, Algorithm::LinUcb, "vfucb"),
        (Algorithm::VfTs, Algorithm::LinTs, "vfts"),
    ];
    let mut rows = 0usize;
    for (fed, central, name) in pairs {
        for &k in &arm_grid {
            for &d in &dim_grid {
                let p = CostParams::new(horizon, k, participants, d);
                let breakdown = compute_ops(fed, &p)?;
                let ratio = relative_cost(fed, central, &p)?;
                csv.row(&[
                    name.to_string(),
                    horizon.to_string(),
                    k.to_string(),
                    participants.to_string(),
                    d.to_string(),
                    breakdown.stage_mask_init.to_string(),
                    breakdown.stage_selection.to_string(),
                    breakdown.stage_update.to_string(),
                    breakdown.total_ops.to_string(),
                    breakdown.comm_bytes.to_string(),
                    fmt_f64(ratio),
                ])?;
                rows += 1;
            }
        }
    }
    let path = csv.finish()?;
    println!("cost-model: {rows} rows -> {}", path.display());
    Ok(())
}
