//! `verify`: user-facing smoke test over the protocol's invariant suites.
//! Prints one PASS/FAIL line per suite and exits nonzero on any failure.
//! `--inject-fault` flips one mask entry before a losslessness run to
//! demonstrate that the check actually bites; that run is expected to FAIL
//! and names the first diverging round.

use vfcb::costs::{comm_elements, CostParams};
use vfcb::envs::SyntheticEnv;
use vfcb::fedsim::{
    run_centralized, run_vfts, run_vfucb, run_vfucb_with_mask, Algorithm, RunConfig,
};
use vfcb::hashing::stream_seed;
use vfcb::numerics::{random_orthogonal, Rng};
use vfcb::o3m::{privacy_witness, DimPartition};
use vfcb::tolerances;

use crate::error::CliResult;

struct SuiteReport {
    name: &'static str,
    passed: bool,
}

fn report(reports: &mut Vec<SuiteReport>, name: &'static str, result: Result<String, String>) {
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    reports.push(SuiteReport { name, passed });
}

/// Returns the process exit code.
pub fn run(witness_count: usize, inject_fault: bool) -> CliResult<i32> {
    let mut reports = Vec::new();

    report(&mut reports, "orthogonality", orthogonality_suite());
    report(
        &mut reports,
        "losslessness-vfucb",
        vfucb_suite(inject_fault),
    );
    report(&mut reports, "losslessness-vfts-coupled", vfts_suite());
    report(&mut reports, "estimator-rotation", rotation_suite());
    report(&mut reports, "ledger-closed-form", ledger_suite());
    report(
        &mut reports,
        "privacy-witness",
        witness_suite(witness_count),
    );

    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        println!("verify: all {} suites passed", reports.len());
        Ok(0)
    } else {
        println!("verify: {} of {} suites failed: {}", failed.len(), reports.len(), failed.join(", "));
        Ok(1)
    }
}

fn orthogonality_suite() -> Result<String, String> {
    let mut rng = Rng::seed_from_u64(1);
    let mut max_gap: f64 = 0.0;
    for case in 0..25u64 {
        let dim = 1 + rng.below(128) as usize;
        let q = random_orthogonal(dim, &mut rng)
            .map_err(|e| format!("generation failed at case {case}: {e}"))?;
        let gap = q.transpose().matmul(&q).unwrap().max_abs_diff_identity();
        max_gap = max_gap.max(gap);
        if gap > tolerances::ORTHOGONALITY {
            return Err(format!("|Q^T Q - I| = {gap:.2e} at case {case} (d={dim})"));
        }
        let x = rng.standard_normal_vector(dim);
        let qx = q.matvec(&x).unwrap();
        if (qx.norm2() - x.norm2()).abs() > tolerances::NORM_PRESERVATION_REL * x.norm2() {
            return Err(format!("norm not preserved at case {case} (d={dim})"));
        }
    }
    Ok(format!(
        "25 random masks (d <= 128): max |Q^T Q - I| = {max_gap:.2e}"
    ))
}

fn vfucb_suite(inject_fault: bool) -> Result<String, String> {
    let (dim, arms, horizon) = (16, 5, 80);
    for seed in [0u64, 1, 2] {
        let cfg = RunConfig::new(Algorithm::VfUcb, horizon, arms, dim)
            .with_partition(DimPartition::even(dim, 4).unwrap())
            .with_seed(seed);
        let mut central_cfg = cfg.clone();
        central_cfg.algorithm = Algorithm::LinUcb;

        let fed = if inject_fault {
            let mut mask_rng = Rng::seed_from_u64(stream_seed(seed, "o3m-mask"));
            let mut mask = random_orthogonal(dim, &mut mask_rng).map_err(|e| e.to_string())?;
            mask.set(0, 0, -mask.get(0, 0)); // one flipped entry
            run_vfucb_with_mask(&cfg, &mut SyntheticEnv::new(dim, arms, seed), mask)
        } else {
            run_vfucb(&cfg, &mut SyntheticEnv::new(dim, arms, seed))
        }
        .map_err(|e| e.to_string())?;
        let central = run_centralized(&central_cfg, &mut SyntheticEnv::new(dim, arms, seed))
            .map_err(|e| e.to_string())?;

        if let Some(round) = fed
            .arm_sequence()
            .iter()
            .zip(central.arm_sequence())
            .position(|(a, b)| *a != b)
        {
            return Err(format!(
                "arm sequences diverge at round {round} (seed {seed}{})",
                if inject_fault {
                    "; expected under --inject-fault"
                } else {
                    ""
                }
            ));
        }
    }
    if inject_fault {
        // A corrupted mask that still matches everywhere would mean the
        // check has no teeth.
        return Err("injected fault produced no divergence".into());
    }
    Ok(format!(
        "3 seeds, {horizon} rounds at d={dim}: masked and centralized arm sequences identical"
    ))
}

fn vfts_suite() -> Result<String, String> {
    let (dim, arms, horizon) = (12, 4, 60);
    for seed in [0u64, 1] {
        let mut cfg = RunConfig::new(Algorithm::VfTs, horizon, arms, dim)
            .with_partition(DimPartition::even(dim, 3).unwrap())
            .with_seed(seed);
        cfg.coupled_ts = true;
        cfg.v = 0.05;
        let mut central_cfg = cfg.clone();
        central_cfg.algorithm = Algorithm::LinTs;
        let fed =
            run_vfts(&cfg, &mut SyntheticEnv::new(dim, arms, seed)).map_err(|e| e.to_string())?;
        let central = run_centralized(&central_cfg, &mut SyntheticEnv::new(dim, arms, seed))
            .map_err(|e| e.to_string())?;
        if let Some(round) = fed
            .arm_sequence()
            .iter()
            .zip(central.arm_sequence())
            .position(|(a, b)| *a != b)
        {
            return Err(format!("coupled runs diverge at round {round} (seed {seed})"));
        }
    }
    Ok(format!(
        "2 seeds, {horizon} rounds at d={dim}: coupled sampler reproduces centralized decisions"
    ))
}

fn rotation_suite() -> Result<String, String> {
    let (dim, arms, horizon) = (12, 4, 60);
    let mut cfg = RunConfig::new(Algorithm::VfUcb, horizon, arms, dim)
        .with_partition(DimPartition::even(dim, 3).unwrap())
        .with_seed(4);
    cfg.record_theta = true;
    let mut central_cfg = cfg.clone();
    central_cfg.algorithm = Algorithm::LinUcb;
    let fed = run_vfucb(&cfg, &mut SyntheticEnv::new(dim, arms, 4)).map_err(|e| e.to_string())?;
    let central = run_centralized(&central_cfg, &mut SyntheticEnv::new(dim, arms, 4))
        .map_err(|e| e.to_string())?;
    let q = fed.mask.as_ref().expect("federated run has a mask");
    let mut max_gap: f64 = 0.0;
    for (t, (masked_theta, theta)) in fed
        .theta_trace
        .as_ref()
        .unwrap()
        .iter()
        .zip(central.theta_trace.as_ref().unwrap())
        .enumerate()
    {
        let gap = masked_theta
            .max_abs_diff(&q.matvec(theta).unwrap())
            .unwrap();
        max_gap = max_gap.max(gap);
        if gap > tolerances::LOSSLESS_REL {
            return Err(format!("estimator rotation off by {gap:.2e} at round {t}"));
        }
    }
    Ok(format!(
        "{horizon} rounds: masked estimator equals rotated centralized estimator (max gap {max_gap:.2e})"
    ))
}

fn ledger_suite() -> Result<String, String> {
    let mut rng = Rng::seed_from_u64(3);
    for case in 0..50u64 {
        let participants = 1 + rng.below(5) as usize;
        let dim = participants + rng.below(24) as usize;
        let arms = 1 + rng.below(6) as usize;
        let horizon = 1 + rng.below(40) as usize;
        let cfg = RunConfig::new(Algorithm::VfUcb, horizon, arms, dim)
            .with_partition(DimPartition::even(dim, participants).unwrap())
            .with_seed(rng.next_u64());
        let out = run_vfucb(&cfg, &mut SyntheticEnv::new(dim, arms, case))
            .map_err(|e| e.to_string())?;
        let model = comm_elements(&CostParams::new(
            horizon as u64,
            arms as u64,
            participants as u64,
            dim as u64,
        ))
        .map_err(|e| e.to_string())?;
        if out.ledger.o3m_elements() != model {
            return Err(format!(
                "ledger {} != model {model} at T={horizon} K={arms} M={participants} d={dim}",
                out.ledger.o3m_elements()
            ));
        }
    }
    Ok("50 random configs: ledger elements equal d^2 + T*K*M*d exactly".into())
}

fn witness_suite(count: usize) -> Result<String, String> {
    let mut rng = Rng::seed_from_u64(5);
    let dims = [2usize, 8, 32];
    for case in 0..count {
        let dim = dims[case % dims.len()];
        let q1 = random_orthogonal(dim, &mut rng).map_err(|e| e.to_string())?;
        let x1 = rng.standard_normal_vector(dim);
        let (q2, x2) = privacy_witness(&q1, &x1, &mut rng).map_err(|e| e.to_string())?;
        let gap = q1
            .matvec(&x1)
            .unwrap()
            .max_abs_diff(&q2.matvec(&x2).unwrap())
            .unwrap();
        if gap > tolerances::WITNESS {
            return Err(format!("witness {case} (d={dim}) off by {gap:.2e}"));
        }
        if x2.max_abs_diff(&x1).unwrap() <= tolerances::WITNESS_DISTINCT {
            return Err(format!("witness {case} (d={dim}) did not move the raw data"));
        }
    }
    Ok(format!(
        "{count} privacy witnesses verified across d in {{2, 8, 32}}"
    ))
}
