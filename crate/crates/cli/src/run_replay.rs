//! `run-replay`: evaluate policies against an ingested log cache with the
//! unbiased replay evaluator and report CTR relative to the random
//! baseline.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vfcb::envs::{
    random_baseline_ctr, replay_evaluate, LinTsPolicy, LinUcbPolicy, PartialPolicy, RandomPolicy,
    ReplayLog, ReplayOutcome, ReplayPolicy,
};
use vfcb::hashing::{cell_seed, stream_seed};
use vfcb::numerics::Rng;

use crate::error::{CliError, CliResult};
use crate::out::{fmt_f64, CsvWriter};
use crate::spec::{PolicyName, ReplayCell, ReplaySpec};

const BASELINE_SEEDS: usize = 5;

pub fn run(log_path: &Path, spec_path: &Path, out_dir: PathBuf) -> CliResult<()> {
    let spec = ReplaySpec::load(spec_path)?;
    let mut reader = BufReader::new(
        File::open(log_path)
            .map_err(|e| CliError::log(format!("cannot open {}: {e}", log_path.display())))?,
    );
    let log = vfcb::io::read_replay_log(&mut reader)?;
    let arms = log.arms().len();

    // The relative-CTR denominator: the same evaluator run with a
    // uniform-random policy, averaged over a fixed seed set.
    let baseline_seeds: Vec<u64> = (0..BASELINE_SEEDS)
        .map(|i| stream_seed(spec.base_seed, &format!("replay-baseline-{i}")))
        .collect();
    let baseline = random_baseline_ctr(&log, &baseline_seeds)?;

    let jobs: Vec<(usize, usize)> = spec
        .cells
        .iter()
        .enumerate()
        .flat_map(|(cell_idx, cell)| {
            let reps = if cell.policy.is_stochastic() {
                spec.repetitions
            } else {
                1
            };
            (0..reps).map(move |rep| (cell_idx, rep))
        })
        .collect();

    let evaluate = |&(cell_idx, rep): &(usize, usize)| -> CliResult<(usize, usize, u64, ReplayOutcome)> {
        let cell = &spec.cells[cell_idx];
        let seed = cell_seed(spec.base_seed, cell_idx, rep);
        let mut policy = build_policy(cell, &log, seed)?;
        let outcome = replay_evaluate(policy.as_mut(), &log).map_err(|e| {
            CliError::eval(format!(
                "cell '{}' repetition {rep}: {e} (replay credits a policy only when its choice matches the logged action)",
                cell.id
            ))
        })?;
        Ok((cell_idx, rep, seed, outcome))
    };
    let results: Vec<(usize, usize, u64, ReplayOutcome)> =
        jobs.par_iter().map(evaluate).collect::<CliResult<Vec<_>>>()?;

    let mut csv = CsvWriter::create(
        &out_dir.join("ctr.csv"),
        &[
            "cell",
            "policy",
            "partial_ratio",
            "repetition",
            "seed",
            "events",
            "credited",
            "ctr",
            "relative_ctr",
        ],
    )?;
    for (cell_idx, rep, seed, outcome) in &results {
        let cell = &spec.cells[*cell_idx];
        csv.row(&[
            cell.id.clone(),
            policy_name(cell.policy).to_string(),
            fmt_f64(cell.partial_ratio),
            rep.to_string(),
            seed.to_string(),
            outcome.events.to_string(),
            outcome.credited.to_string(),
            fmt_f64(outcome.ctr),
            fmt_f64(outcome.ctr / baseline),
        ])?;
    }
    csv.finish()?;

    let mut summary = CsvWriter::create(
        &out_dir.join("ctr_summary.csv"),
        &[
            "cell",
            "policy",
            "partial_ratio",
            "repetitions",
            "baseline_ctr",
            "mean_ctr",
            "mean_relative_ctr",
        ],
    )?;
    for (cell_idx, cell) in spec.cells.iter().enumerate() {
        let outcomes: Vec<&ReplayOutcome> = results
            .iter()
            .filter(|(c, ..)| *c == cell_idx)
            .map(|(_, _, _, o)| o)
            .collect();
        let mean_ctr = outcomes.iter().map(|o| o.ctr).sum::<f64>() / outcomes.len() as f64;
        summary.row(&[
            cell.id.clone(),
            policy_name(cell.policy).to_string(),
            fmt_f64(cell.partial_ratio),
            outcomes.len().to_string(),
            fmt_f64(baseline),
            fmt_f64(mean_ctr),
            fmt_f64(mean_ctr / baseline),
        ])?;
    }
    summary.finish()?;

    println!(
        "run-replay: {} entries, {arms} arms, baseline CTR {:.4} -> {}",
        log.entries.len(),
        baseline,
        out_dir.display()
    );
    Ok(())
}

fn policy_name(policy: PolicyName) -> &'static str {
    match policy {
        PolicyName::Random => "random",
        PolicyName::Linucb => "linucb",
        PolicyName::Lints => "lints",
        PolicyName::PartialLinucb => "partial-linucb",
        PolicyName::PartialLints => "partial-lints",
    }
}

fn build_policy(
    cell: &ReplayCell,
    log: &ReplayLog,
    seed: u64,
) -> CliResult<Box<dyn ReplayPolicy>> {
    let dim = log.context_dim();
    let policy: Box<dyn ReplayPolicy> = match cell.policy {
        PolicyName::Random => Box::new(RandomPolicy::new(seed)),
        PolicyName::Linucb => Box::new(LinUcbPolicy::new(dim, cell.lambda, cell.beta)?),
        PolicyName::Lints => Box::new(LinTsPolicy::new(dim, cell.lambda, cell.v, seed)?),
        PolicyName::PartialLinucb | PolicyName::PartialLints => {
            // Each repetition holds a different random subset of the user
            // features (a vertical slice of the context grid).
            let mut rng = Rng::seed_from_u64(stream_seed(seed, "partial-partition"));
            let coords = PartialPolicy::<LinUcbPolicy>::user_feature_coords(
                log.user_dim,
                log.item_dim,
                cell.partial_ratio,
                &mut rng,
            )?;
            if cell.policy == PolicyName::PartialLinucb {
                let inner = LinUcbPolicy::new(coords.len(), cell.lambda, cell.beta)?;
                Box::new(PartialPolicy::new(coords, inner)?)
            } else {
                let inner = LinTsPolicy::new(coords.len(), cell.lambda, cell.v, seed)?;
                Box::new(PartialPolicy::new(coords, inner)?)
            }
        }
    };
    Ok(policy)
}
