//! Logged-data ingestion and unbiased offline (replay) evaluation.
//!
//! Ingestion consumes tab-separated rows in the display-advertising layout:
//! a binary response, 13 integer user columns, 26 categorical columns. The
//! 26 categoricals are feature-hashed (seeded FNV-1a, reduced modulo the
//! bucket count) into `n_hash_values` encoded values, which a Cantor
//! pairing folds into a single item label. Rows carrying one of the
//! `top_labels` most frequent labels survive; everything numeric is min-max
//! scaled to `[0, 1]` over the surviving rows (missing integers count as
//! zero), user columns additionally multiplied by per-feature scaling
//! factors, and the hash-encoded values themselves become the item
//! features.
//!
//! Evaluation streams the log: each entry presents one candidate context
//! per label (user features crossed with that label's item features via
//! outer addition); the policy is credited — and updated — only when its
//! choice matches the logged label. Click-through rate is credited clicks
//! over credited events.

use std::collections::BTreeMap;
use std::io::BufRead;

use super::EnvError;
use crate::bandit::{
    select_arm, ts_scores, ucb_scores, BanditState, ContextSet, TsParams, UcbParams,
};
use crate::hashing::fnv1a64;
use crate::numerics::{Rng, Vector};

/// One ingested interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayLogEntry {
    pub user: Vector,
    pub item: Vector,
    pub label: u64,
    /// Binary response, stored as 0.0 / 1.0.
    pub reward: f64,
}

/// An ingested log plus its feature dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayLog {
    pub user_dim: usize,
    pub item_dim: usize,
    pub entries: Vec<ReplayLogEntry>,
}

impl ReplayLog {
    /// The arm set this log induces: distinct labels in ascending order,
    /// each with its item-feature vector (identical for every entry sharing
    /// a label, since the label determines the hash values).
    pub fn arms(&self) -> Vec<(u64, Vector)> {
        let mut by_label: BTreeMap<u64, Vector> = BTreeMap::new();
        for e in &self.entries {
            by_label.entry(e.label).or_insert_with(|| e.item.clone());
        }
        by_label.into_iter().collect()
    }

    /// The full context dimension evaluation presents to a policy.
    pub fn context_dim(&self) -> usize {
        self.user_dim * self.item_dim
    }
}

/// Number of user (integer) columns in the expected row layout.
pub const USER_COLUMNS: usize = 13;
/// Number of categorical columns in the expected row layout.
pub const CATEGORICAL_COLUMNS: usize = 26;

/// Knobs of the ingestion pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    /// Hash-encoded values derived from the categorical columns.
    pub n_hash_values: usize,
    /// Modulus for each hash-encoded value (2..=32768 so the pairing stays
    /// inside 64 bits).
    pub hash_buckets: u64,
    /// How many of the most frequent labels to keep.
    pub top_labels: usize,
    /// Seed folded into the categorical hash.
    pub hash_seed: u64,
    /// Per-user-feature multipliers applied after min-max scaling; empty
    /// means all ones.
    pub user_scaling: Vec<f64>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            n_hash_values: 3,
            hash_buckets: 100,
            top_labels: 40,
            hash_seed: 0,
            user_scaling: Vec::new(),
        }
    }
}

impl IngestConfig {
    fn validate(&self) -> Result<(), EnvError> {
        if self.n_hash_values == 0 {
            return Err(EnvError::InvalidConfig {
                what: "n_hash_values must be positive",
            });
        }
        if self.hash_buckets < 2 || self.hash_buckets > 32768 {
            return Err(EnvError::InvalidConfig {
                what: "hash_buckets must lie in 2..=32768",
            });
        }
        if self.top_labels == 0 {
            return Err(EnvError::InvalidConfig {
                what: "top_labels must be positive",
            });
        }
        if !self.user_scaling.is_empty() && self.user_scaling.len() != USER_COLUMNS {
            return Err(EnvError::InvalidConfig {
                what: "user_scaling must have one factor per user column",
            });
        }
        Ok(())
    }
}

/// Ingestion counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub rows_read: u64,
    pub rows_malformed: u64,
    pub rows_dropped_by_label: u64,
    /// The retained labels, ascending.
    pub labels_kept: Vec<u64>,
}

struct ParsedRow {
    reward: f64,
    user_raw: [f64; USER_COLUMNS],
    label: u64,
    hashes: Vec<u64>,
}

/// Cantor pairing, the standard bijection from pairs to naturals.
fn cantor_pair(a: u64, b: u64) -> Option<u64> {
    let s = a.checked_add(b)?;
    let t = s.checked_mul(s.checked_add(1)?)? / 2;
    t.checked_add(b)
}

/// Fold a sequence of hash values into one label, pairing left to right.
fn pair_hashes(hashes: &[u64]) -> Option<u64> {
    let mut acc = hashes[0];
    for &h in &hashes[1..] {
        acc = cantor_pair(acc, h)?;
    }
    Some(acc)
}

fn parse_row(line: &str, cfg: &IngestConfig) -> Option<Result<ParsedRow, EnvError>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 1 + USER_COLUMNS + CATEGORICAL_COLUMNS {
        return None;
    }
    let reward = match fields[0] {
        "0" => 0.0,
        "1" => 1.0,
        _ => return None,
    };
    let mut user_raw = [0.0f64; USER_COLUMNS];
    for (i, field) in fields[1..=USER_COLUMNS].iter().enumerate() {
        if field.is_empty() {
            user_raw[i] = 0.0; // missing integer counts as zero
        } else {
            match field.trim().parse::<i64>() {
                Ok(v) => user_raw[i] = v as f64,
                Err(_) => return None,
            }
        }
    }
    // One buffer of (column index, value) pairs feeds every hash seed.
    let mut buf = Vec::with_capacity(256);
    for (i, field) in fields[1 + USER_COLUMNS..].iter().enumerate() {
        buf.push(i as u8);
        buf.extend_from_slice(field.as_bytes());
        buf.push(0x1f);
    }
    let hashes: Vec<u64> = (0..cfg.n_hash_values)
        .map(|j| fnv1a64(cfg.hash_seed ^ (j as u64), &buf) % cfg.hash_buckets)
        .collect();
    let label = match pair_hashes(&hashes) {
        Some(l) => l,
        None => return Some(Err(EnvError::LabelOverflow)),
    };
    Some(Ok(ParsedRow {
        reward,
        user_raw,
        label,
        hashes,
    }))
}

/// Min-max scale a column in place: the minimum maps to 0, the maximum to
/// 1, a constant column to 0.
pub fn min_max_scale_column(values: &mut [f64]) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    let span = hi - lo;
    for v in values.iter_mut() {
        *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
    }
}

/// Run the ingestion pipeline over tab-separated rows.
///
/// Malformed rows (wrong column count, non-binary response, unparseable
/// integer) are skipped and counted. The output preserves input order for
/// the retained rows and is independent of it otherwise: label selection
/// breaks frequency ties toward the smaller label value, and scaling ranges
/// are order-free aggregates of the retained rows.
pub fn ingest_log<R: BufRead>(
    reader: R,
    cfg: &IngestConfig,
) -> Result<(ReplayLog, IngestStats), EnvError> {
    cfg.validate()?;
    let mut stats = IngestStats::default();
    let mut parsed: Vec<ParsedRow> = Vec::new();
    let mut frequency: BTreeMap<u64, u64> = BTreeMap::new();
    for line in reader.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        stats.rows_read += 1;
        match parse_row(&line, cfg) {
            None => stats.rows_malformed += 1,
            Some(Err(e)) => return Err(e),
            Some(Ok(row)) => {
                *frequency.entry(row.label).or_insert(0) += 1;
                parsed.push(row);
            }
        }
    }

    // Most frequent labels first; ties go to the smaller label value. The
    // BTreeMap iteration already yields ascending labels, so a stable sort
    // by descending count finishes the job.
    let mut ranked: Vec<(u64, u64)> = frequency.into_iter().collect();
    ranked.sort_by_key(|&(_, count)| std::cmp::Reverse(count));
    let kept: Vec<u64> = {
        let mut kept: Vec<u64> = ranked
            .iter()
            .take(cfg.top_labels)
            .map(|&(label, _)| label)
            .collect();
        kept.sort_unstable();
        kept
    };

    let mut retained: Vec<ParsedRow> = Vec::new();
    for row in parsed {
        if kept.binary_search(&row.label).is_ok() {
            retained.push(row);
        } else {
            stats.rows_dropped_by_label += 1;
        }
    }
    if retained.is_empty() {
        return Err(EnvError::EmptyIngest);
    }
    stats.labels_kept = kept;

    // Column-wise min-max over the retained corpus, user and item alike.
    let mut user_cols: Vec<Vec<f64>> = (0..USER_COLUMNS)
        .map(|i| retained.iter().map(|r| r.user_raw[i]).collect())
        .collect();
    for col in &mut user_cols {
        min_max_scale_column(col);
    }
    let mut item_cols: Vec<Vec<f64>> = (0..cfg.n_hash_values)
        .map(|j| retained.iter().map(|r| r.hashes[j] as f64).collect())
        .collect();
    for col in &mut item_cols {
        min_max_scale_column(col);
    }

    let scaling = |i: usize| -> f64 {
        if cfg.user_scaling.is_empty() {
            1.0
        } else {
            cfg.user_scaling[i]
        }
    };
    let entries: Vec<ReplayLogEntry> = retained
        .iter()
        .enumerate()
        .map(|(row_idx, row)| ReplayLogEntry {
            user: Vector::from_fn(USER_COLUMNS, |i| user_cols[i][row_idx] * scaling(i)),
            item: Vector::from_fn(cfg.n_hash_values, |j| item_cols[j][row_idx]),
            label: row.label,
            reward: row.reward,
        })
        .collect();

    Ok((
        ReplayLog {
            user_dim: USER_COLUMNS,
            item_dim: cfg.n_hash_values,
            entries,
        },
        stats,
    ))
}

/// Outer addition of user and item features: entry `(i, j)` is
/// `user[i] + item[j]`, flattened row-major into a vector of length
/// `user.dim() * item.dim()`.
pub fn build_context(user: &Vector, item: &Vector) -> Vector {
    let (du, di) = (user.dim(), item.dim());
    Vector::from_fn(du * di, |k| user.get(k / di) + item.get(k % di))
}

/// A policy under replay evaluation: choose an arm from the per-label
/// candidate contexts; receive an update only when credited.
pub trait ReplayPolicy {
    fn choose(&mut self, contexts: &ContextSet) -> Result<usize, EnvError>;
    fn update(&mut self, context: &Vector, reward: f64) -> Result<(), EnvError>;
}

/// Uniform-random choice, never learns. This is the logging policy the
/// evaluator's unbiasedness assumes, and the baseline for relative CTR.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Rng::seed_from_u64(seed),
        }
    }
}

impl ReplayPolicy for RandomPolicy {
    fn choose(&mut self, contexts: &ContextSet) -> Result<usize, EnvError> {
        Ok(self.rng.below(contexts.arms() as u64) as usize)
    }

    fn update(&mut self, _context: &Vector, _reward: f64) -> Result<(), EnvError> {
        Ok(())
    }
}

/// LinUCB as a replay policy.
#[derive(Debug, Clone)]
pub struct LinUcbPolicy {
    state: BanditState,
    params: UcbParams,
}

impl LinUcbPolicy {
    pub fn new(dim: usize, lambda: f64, beta: f64) -> Result<Self, EnvError> {
        Ok(Self {
            state: BanditState::new(dim, lambda)?,
            params: UcbParams::new(beta)?,
        })
    }
}

impl ReplayPolicy for LinUcbPolicy {
    fn choose(&mut self, contexts: &ContextSet) -> Result<usize, EnvError> {
        Ok(select_arm(&ucb_scores(&self.state, &self.params, contexts)?)?)
    }

    fn update(&mut self, context: &Vector, reward: f64) -> Result<(), EnvError> {
        Ok(self.state.update(context, reward)?)
    }
}

/// LinTS as a replay policy.
#[derive(Debug, Clone)]
pub struct LinTsPolicy {
    state: BanditState,
    params: TsParams,
    rng: Rng,
}

impl LinTsPolicy {
    pub fn new(dim: usize, lambda: f64, v: f64, seed: u64) -> Result<Self, EnvError> {
        Ok(Self {
            state: BanditState::new(dim, lambda)?,
            params: TsParams::new(v)?,
            rng: Rng::seed_from_u64(seed),
        })
    }
}

impl ReplayPolicy for LinTsPolicy {
    fn choose(&mut self, contexts: &ContextSet) -> Result<usize, EnvError> {
        let (scores, _) = ts_scores(&self.state, &self.params, contexts, &mut self.rng)?;
        Ok(select_arm(&scores)?)
    }

    fn update(&mut self, context: &Vector, reward: f64) -> Result<(), EnvError> {
        Ok(self.state.update(context, reward)?)
    }
}

/// Restrict an inner policy to a coordinate subset of every context.
#[derive(Debug, Clone)]
pub struct PartialPolicy<P> {
    coords: Vec<usize>,
    inner: P,
}

impl<P: ReplayPolicy> PartialPolicy<P> {
    pub fn new(coords: Vec<usize>, inner: P) -> Result<Self, EnvError> {
        if coords.is_empty() {
            return Err(EnvError::InvalidConfig {
                what: "partial coordinate set is empty",
            });
        }
        Ok(Self { coords, inner })
    }

    /// Sample `ceil(ratio * dim)` distinct coordinates, ascending.
    pub fn random_coords(dim: usize, ratio: f64, rng: &mut Rng) -> Result<Vec<usize>, EnvError> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(EnvError::InvalidConfig {
                what: "partial ratio outside (0, 1]",
            });
        }
        let keep = ((ratio * dim as f64).ceil() as usize).clamp(1, dim);
        // Partial Fisher-Yates over the index range.
        let mut pool: Vec<usize> = (0..dim).collect();
        for i in 0..keep {
            let j = i + rng.below((dim - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut coords = pool[..keep].to_vec();
        coords.sort_unstable();
        Ok(coords)
    }

    /// The first `ceil(ratio * dim)` coordinates.
    pub fn prefix_coords(dim: usize, ratio: f64) -> Result<Vec<usize>, EnvError> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(EnvError::InvalidConfig {
                what: "partial ratio outside (0, 1]",
            });
        }
        let keep = ((ratio * dim as f64).ceil() as usize).clamp(1, dim);
        Ok((0..keep).collect())
    }

    /// Coordinates of an outer-addition context visible to a policy that
    /// holds only `ceil(ratio * user_dim)` randomly chosen user features
    /// (item features are always visible): all entries `(i, j)` whose user
    /// row `i` is in the sampled subset.
    ///
    /// Dropping whole user rows is how vertically partitioned data actually
    /// shrinks — and unlike a scattered coordinate subset, it genuinely
    /// removes information: scattered entries of `user[i] + item[j]` are
    /// linear combinations of kept ones whenever every row and column stays
    /// represented.
    pub fn user_feature_coords(
        user_dim: usize,
        item_dim: usize,
        ratio: f64,
        rng: &mut Rng,
    ) -> Result<Vec<usize>, EnvError> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(EnvError::InvalidConfig {
                what: "partial ratio outside (0, 1]",
            });
        }
        let keep = ((ratio * user_dim as f64).ceil() as usize).clamp(1, user_dim);
        let mut rows: Vec<usize> = (0..user_dim).collect();
        for i in 0..keep {
            let j = i + rng.below((user_dim - i) as u64) as usize;
            rows.swap(i, j);
        }
        let mut rows = rows[..keep].to_vec();
        rows.sort_unstable();
        let mut coords = Vec::with_capacity(keep * item_dim);
        for row in rows {
            for j in 0..item_dim {
                coords.push(row * item_dim + j);
            }
        }
        Ok(coords)
    }
}

impl<P: ReplayPolicy> ReplayPolicy for PartialPolicy<P> {
    fn choose(&mut self, contexts: &ContextSet) -> Result<usize, EnvError> {
        let sliced = contexts.map(|x| Ok(x.gather(&self.coords)?))?;
        self.inner.choose(&sliced)
    }

    fn update(&mut self, context: &Vector, reward: f64) -> Result<(), EnvError> {
        self.inner.update(&context.gather(&self.coords)?, reward)
    }
}

/// Replay evaluation outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayOutcome {
    /// Log entries streamed.
    pub events: u64,
    /// Entries where the policy matched the logged label.
    pub credited: u64,
    /// Credited clicks.
    pub clicks: f64,
    /// `clicks / credited`.
    pub ctr: f64,
}

/// Stream the log through a policy, crediting and updating only on matches.
pub fn replay_evaluate(
    policy: &mut dyn ReplayPolicy,
    log: &ReplayLog,
) -> Result<ReplayOutcome, EnvError> {
    if log.entries.is_empty() {
        return Err(EnvError::EmptyLog);
    }
    let arms = log.arms();
    let mut credited = 0u64;
    let mut clicks = 0.0f64;
    for entry in &log.entries {
        let contexts = ContextSet::new(
            arms.iter()
                .map(|(_, item)| build_context(&entry.user, item))
                .collect(),
        )?;
        let chosen = policy.choose(&contexts)?;
        if arms[chosen].0 == entry.label {
            credited += 1;
            clicks += entry.reward;
            policy.update(contexts.context(chosen), entry.reward)?;
        }
    }
    if credited == 0 {
        return Err(EnvError::NoCreditedEvents);
    }
    Ok(ReplayOutcome {
        events: log.entries.len() as u64,
        credited,
        clicks,
        ctr: clicks / credited as f64,
    })
}

/// Mean CTR of the uniform-random policy over the given seeds; the
/// denominator of relative CTR.
pub fn random_baseline_ctr(log: &ReplayLog, seeds: &[u64]) -> Result<f64, EnvError> {
    if seeds.is_empty() {
        return Err(EnvError::InvalidConfig {
            what: "baseline needs at least one seed",
        });
    }
    let mut total = 0.0;
    for &seed in seeds {
        total += replay_evaluate(&mut RandomPolicy::new(seed), log)?.ctr;
    }
    Ok(total / seeds.len() as f64)
}

/// Shape of a generated validation log with a known linear click model.
#[derive(Debug, Clone)]
pub struct PlantedLogConfig {
    pub entries: usize,
    pub user_dim: usize,
    pub item_dim: usize,
    pub labels: usize,
    pub seed: u64,
    /// Average click probability; the hidden parameter's row/column sums
    /// are pinned so this holds without an intercept.
    pub base_rate: f64,
    /// Norm of the user main-effect weights (equal magnitudes, random
    /// signs). User effects shift every arm equally, so this is nuisance a
    /// policy must model out — the lever that separates partial-information
    /// policies from full ones.
    pub user_effect: f64,
    /// Norm of the item weights; this is the arm-ranking signal.
    pub item_effect: f64,
}

impl Default for PlantedLogConfig {
    fn default() -> Self {
        Self {
            entries: 20_000,
            user_dim: USER_COLUMNS,
            item_dim: 3,
            labels: 40,
            seed: 0,
            base_rate: 0.5,
            user_effect: 1.0,
            item_effect: 0.35,
        }
    }
}

/// Generate a replay log from a planted linear model: features uniform in
/// `[0, 1]`, logging policy uniform over the labels, and click probability
/// `clamp(x . theta, 0.02, 0.98)` for a hidden `theta` over the
/// outer-addition coordinates (returned alongside the log).
///
/// `theta` is intercept-free on purpose — the bandit fits `x . w` with no
/// constant term, so the planted model must be realizable that way. It is
/// assembled from user weights `R` (equal-magnitude random signs scaled to
/// `user_effect`, shifted so they sum to `base_rate`) and item weights `C`
/// (random direction scaled to `item_effect`, shifted likewise) via
/// `theta[(i, j)] = R[i]/item_dim + C[j]/user_dim - base_rate/dim`, which
/// makes `x . theta = u . R + item . C` exactly: user features move every
/// arm's probability equally (pure nuisance), item features carry the
/// ranking signal, and the mean click rate sits at `base_rate` because the
/// features average one half.
pub fn planted_log(cfg: &PlantedLogConfig) -> Result<(ReplayLog, Vector), EnvError> {
    if cfg.entries == 0 || cfg.user_dim == 0 || cfg.item_dim == 0 || cfg.labels == 0 {
        return Err(EnvError::InvalidConfig {
            what: "planted log dimensions must be positive",
        });
    }
    if !(cfg.base_rate > 0.0 && cfg.base_rate < 1.0) {
        return Err(EnvError::InvalidConfig {
            what: "base_rate must lie strictly inside (0, 1)",
        });
    }
    let mut rng = Rng::seed_from_u64(cfg.seed);
    let (du, di) = (cfg.user_dim, cfg.item_dim);
    let dim = du * di;

    let per_user = cfg.user_effect / (du as f64).sqrt();
    let w_user = Vector::from_fn(du, |_| if rng.uniform() < 0.5 { -per_user } else { per_user });
    let mut w_item = rng.standard_normal_vector(di);
    w_item.normalize()?;
    let w_item = w_item.scale(cfg.item_effect);

    let user_shift = (cfg.base_rate - w_user.iter().sum::<f64>()) / du as f64;
    let item_shift = (cfg.base_rate - w_item.iter().sum::<f64>()) / di as f64;
    let row_weights = Vector::from_fn(du, |i| w_user.get(i) + user_shift);
    let col_weights = Vector::from_fn(di, |j| w_item.get(j) + item_shift);
    let theta = Vector::from_fn(dim, |k| {
        row_weights.get(k / di) / di as f64 + col_weights.get(k % di) / du as f64
            - cfg.base_rate / dim as f64
    });

    let items: Vec<Vector> = (0..cfg.labels)
        .map(|_| Vector::from_fn(di, |_| rng.uniform()))
        .collect();

    let mut entries = Vec::with_capacity(cfg.entries);
    for _ in 0..cfg.entries {
        let user = Vector::from_fn(du, |_| rng.uniform());
        let label = rng.below(cfg.labels as u64);
        let x = build_context(&user, &items[label as usize]);
        let p = x.dot(&theta)?.clamp(0.02, 0.98);
        let reward = f64::from(rng.uniform() < p);
        entries.push(ReplayLogEntry {
            user,
            item: items[label as usize].clone(),
            label,
            reward,
        });
    }
    Ok((
        ReplayLog {
            user_dim: cfg.user_dim,
            item_dim: cfg.item_dim,
            entries,
        },
        theta,
    ))
}
