//! Exhaustive catalogues of nit sets and the relabelings connecting them.
//!
//! Every valid nit set induces a bijection between states and
//! block-choice tuples, so any two valid nit sets with the same shape are
//! connected by a relabeling of states. Sweeping all `(n^k)!` state
//! permutations of the canonical set therefore reaches the complete
//! catalogue; [`brute_force_nit_sets`] cross-checks this from the other
//! direction by filtering every combination of balanced partitions.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::partitions::{canonical_nit_set, NitParams, NitSet, Partition, StateIndex};
use crate::perm::Permutation;

/// Default ceiling on the number of candidates a sweep may visit.
pub const DEFAULT_BUDGET: u64 = 40_000_000;

/// Tuning for the exhaustive sweeps.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Maximum number of candidates to visit; sweeps that would exceed it
    /// refuse up front instead of running forever.
    pub budget: u64,
    /// Worker threads to shard the sweep across (`0` and `1` both mean
    /// single-threaded).
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            budget: DEFAULT_BUDGET,
            jobs: std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1),
        }
    }
}

/// `n!` as a `u128`, or `None` when it overflows (first at `n = 35`).
pub fn factorial(n: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 2..=n as u128 {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

/// Lexicographic successor of a permutation given as its image list;
/// returns `false` (leaving the slice descending) when none exists.
pub(crate) fn next_permutation(a: &mut [StateIndex]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Permutation of `1..=n` at 0-based lexicographic `rank`, via the
/// factorial number system.
fn unrank_permutation(mut rank: u128, n: usize) -> Vec<StateIndex> {
    let mut pool: Vec<StateIndex> = (1..=n as StateIndex).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i as u32).expect("factorial of a sweepable size fits in u128");
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

/// Scratch buffers for [`family_key`], reused across sweep iterations.
struct KeyScratch {
    /// Raw block colors of the permuted states, one row being rebuilt.
    colored: Vec<u8>,
    /// First-appearance relabeling of colors (`u8::MAX` = unseen).
    relabel: Vec<u8>,
    /// One normalized color row per partition, sorted before use.
    rows: Vec<Vec<u8>>,
}

impl KeyScratch {
    fn new(n_states: usize, n_blocks: usize, n_partitions: usize) -> Self {
        KeyScratch {
            colored: vec![0; n_states],
            relabel: vec![u8::MAX; n_blocks],
            rows: vec![vec![0; n_states]; n_partitions],
        }
    }
}

/// Order- and label-independent fingerprint of the family obtained by
/// relabeling states through `images`: for each partition, the block
/// index of every state normalized by first appearance, the per-partition
/// rows sorted and concatenated. Two relabelings produce the same key iff
/// they produce the same family of partitions.
fn family_key(
    memberships: &[Vec<u8>],
    images: &[StateIndex],
    scratch: &mut KeyScratch,
    key: &mut Vec<u8>,
) {
    for (j, membership) in memberships.iter().enumerate() {
        for (&image, &color) in images.iter().zip(membership) {
            scratch.colored[image as usize - 1] = color;
        }
        scratch.relabel.fill(u8::MAX);
        let mut next = 0u8;
        let row = &mut scratch.rows[j];
        for (slot, &color) in row.iter_mut().zip(&scratch.colored) {
            let c = color as usize;
            if scratch.relabel[c] == u8::MAX {
                scratch.relabel[c] = next;
                next += 1;
            }
            *slot = scratch.relabel[c];
        }
    }
    scratch.rows.sort_unstable();
    key.clear();
    for row in &scratch.rows {
        key.extend_from_slice(row);
    }
}

/// Rebuilds the nit set encoded by a [`family_key`] fingerprint.
fn nit_set_from_key(params: NitParams, key: &[u8]) -> NitSet {
    let n_states = params.state_count();
    let n = params.n() as usize;
    let partitions = key
        .chunks_exact(n_states)
        .map(|row| {
            let mut blocks: Vec<Vec<StateIndex>> = vec![Vec::new(); n];
            for (s0, &color) in row.iter().enumerate() {
                blocks[color as usize].push((s0 + 1) as StateIndex);
            }
            Partition { blocks }
        })
        .collect();
    NitSet { params, partitions }
}

/// Block-membership rows (`rows[j][s0]` = 0-based block of state `s0 + 1`
/// in partition `j`) for a family whose partitions each exactly cover the
/// state set.
fn membership_rows(set: &NitSet) -> Result<Vec<Vec<u8>>> {
    let n_states = set.params.state_count();
    set.partitions
        .iter()
        .map(|p| {
            let m = p.membership(n_states)?;
            Ok(m.into_iter().map(|b| b as u8).collect())
        })
        .collect()
}

/// Checks the sweep size `(n^k)!` against the budget and returns it.
fn sweep_total(params: NitParams, budget: u64, what: &str) -> Result<u64> {
    let required = factorial(params.state_count() as u32);
    match required {
        Some(total) if total <= budget as u128 => Ok(total as u64),
        _ => Err(Error::BudgetExceeded {
            what: what.to_string(),
            required,
            budget,
        }),
    }
}

/// Splits `0..total` into at most `jobs` contiguous chunks.
fn shards(total: u64, jobs: usize) -> Vec<(u64, u64)> {
    let jobs = jobs.max(1).min(total.max(1) as usize).max(1);
    let chunk = total / jobs as u64;
    let rem = total % jobs as u64;
    (0..jobs as u64)
        .map(|i| {
            let start = i * chunk + i.min(rem);
            let len = chunk + u64::from(i < rem);
            (start, len)
        })
        .filter(|&(_, len)| len > 0)
        .collect()
}

/// Runs `visit` over every permutation of `1..=n_states` in the rank
/// range, reusing one image buffer.
fn sweep_range<F: FnMut(&[StateIndex])>(start: u64, len: u64, n_states: usize, mut visit: F) {
    let mut images = unrank_permutation(start as u128, n_states);
    for step in 0..len {
        visit(&images);
        if step + 1 < len {
            let advanced = next_permutation(&mut images);
            debug_assert!(advanced, "rank arithmetic stays within n!");
        }
    }
}

/// Lists every valid nit set for the given shape, in canonical form and
/// sorted. The sweep applies all `(n^k)!` state relabelings to the
/// canonical set and deduplicates; it refuses (with the required size)
/// when `(n^k)!` exceeds the budget.
pub fn enumerate_nit_sets(params: NitParams, opts: &SweepOptions) -> Result<Vec<NitSet>> {
    let total = sweep_total(params, opts.budget, "nit-set enumeration sweep")?;
    let n_states = params.state_count();
    let n = params.n() as usize;
    let k = params.k() as usize;
    let memberships = membership_rows(&canonical_nit_set(params))?;

    let run_shard = |start: u64, len: u64| -> HashSet<Vec<u8>> {
        let mut scratch = KeyScratch::new(n_states, n, k);
        let mut key = Vec::with_capacity(k * n_states);
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        sweep_range(start, len, n_states, |images| {
            family_key(&memberships, images, &mut scratch, &mut key);
            if !seen.contains(key.as_slice()) {
                seen.insert(key.clone());
            }
        });
        seen
    };

    let plan = shards(total, opts.jobs);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    if plan.len() == 1 {
        seen = run_shard(plan[0].0, plan[0].1);
    } else {
        let results = std::thread::scope(|scope| {
            let handles: Vec<_> = plan
                .iter()
                .map(|&(start, len)| scope.spawn(move || run_shard(start, len)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect::<Vec<_>>()
        });
        for shard in results {
            seen.extend(shard);
        }
    }

    let mut sets: Vec<NitSet> = seen
        .iter()
        .map(|key| nit_set_from_key(params, key).canonicalize())
        .collect();
    sets.sort();
    Ok(sets)
}

/// Number of balanced partitions of `n^k` states into `n` blocks of
/// `n^(k-1)`: `(n^k)! / ((n^(k-1))!^n · n!)`.
fn balanced_partition_count(params: NitParams) -> Option<u128> {
    let n_states = params.state_count() as u32;
    let block = params.block_size() as u32;
    let numer = factorial(n_states)?;
    let denom = factorial(block)?
        .checked_pow(params.n())?
        .checked_mul(factorial(params.n())?)?;
    Some(numer / denom)
}

/// All balanced partitions of `1..=n_states` into `n_blocks` blocks of
/// `block_size`, each in canonical form. States are placed in increasing
/// order and a new block may only open for the smallest unplaced state,
/// so every partition appears exactly once with blocks led by ascending
/// minima.
fn balanced_partitions(n_states: usize, n_blocks: usize, block_size: usize) -> Vec<Partition> {
    fn place(
        next: StateIndex,
        n_states: usize,
        n_blocks: usize,
        block_size: usize,
        blocks: &mut Vec<Vec<StateIndex>>,
        out: &mut Vec<Partition>,
    ) {
        if next as usize > n_states {
            out.push(Partition {
                blocks: blocks.clone(),
            });
            return;
        }
        for i in 0..blocks.len() {
            if blocks[i].len() < block_size {
                blocks[i].push(next);
                place(next + 1, n_states, n_blocks, block_size, blocks, out);
                blocks[i].pop();
            }
        }
        if blocks.len() < n_blocks {
            blocks.push(vec![next]);
            place(next + 1, n_states, n_blocks, block_size, blocks, out);
            blocks.pop();
        }
    }

    let mut out = Vec::new();
    let mut blocks = Vec::with_capacity(n_blocks);
    place(1, n_states, n_blocks, block_size, &mut blocks, &mut out);
    out
}

/// Independent catalogue of the same sets as [`enumerate_nit_sets`], built
/// the opposite way: generate every balanced partition, test every
/// combination of `k` of them for the separation properties, and keep the
/// families that pass. Refuses when the number of combinations to test
/// (bounded by `partitions^k`) exceeds the budget.
pub fn brute_force_nit_sets(params: NitParams, opts: &SweepOptions) -> Result<Vec<NitSet>> {
    let candidates = balanced_partition_count(params).and_then(|p| p.checked_pow(params.k()));
    match candidates {
        Some(c) if c <= opts.budget as u128 => {}
        required => {
            return Err(Error::BudgetExceeded {
                what: "balanced-partition combination scan".to_string(),
                required,
                budget: opts.budget,
            });
        }
    }

    let n_states = params.state_count();
    let n = params.n() as usize;
    let k = params.k() as usize;
    let partitions = balanced_partitions(n_states, n, params.block_size());
    let memberships: Vec<Vec<u8>> = partitions
        .iter()
        .map(|p| {
            p.membership(n_states)
                .expect("generated partitions cover the state set")
                .into_iter()
                .map(|b| b as u8)
                .collect()
        })
        .collect();

    let p_total = partitions.len();
    let mut out = Vec::new();
    if p_total < k {
        return Ok(out);
    }

    // Odometer over strictly increasing index combinations; repeats are
    // impossible in a valid family for k >= 2 (a block meets itself in
    // more than one state), and for k = 1 there is a single candidate.
    let mut idx: Vec<usize> = (0..k).collect();
    let mut counts = vec![0u32; n_states];
    let mut combined = vec![0usize; n_states];
    loop {
        counts.fill(0);
        combined.fill(0);
        for &pi in &idx {
            for (acc, &color) in combined.iter_mut().zip(&memberships[pi]) {
                *acc = *acc * n + color as usize;
            }
        }
        for &c in &combined {
            counts[c] += 1;
        }
        if counts.iter().all(|&c| c == 1) {
            out.push(
                NitSet {
                    params,
                    partitions: idx.iter().map(|&pi| partitions[pi].clone()).collect(),
                }
                .canonicalize(),
            );
        }

        let mut j = k;
        while j > 0 && idx[j - 1] == p_total - (k - j) - 1 {
            j -= 1;
        }
        if j == 0 {
            break;
        }
        idx[j - 1] += 1;
        for l in j..k {
            idx[l] = idx[l - 1] + 1;
        }
    }

    out.sort();
    out.dedup();
    Ok(out)
}

/// All state relabelings carrying `source` onto `target` (as unordered,
/// unlabeled families), sorted by image list. Both families must have the
/// same shape and consist of genuine partitions of the state set. The
/// result is empty iff the families are not relabelings of one another;
/// for `source == target` it is the symmetry group of the family.
pub fn find_mapping_permutations(
    source: &NitSet,
    target: &NitSet,
    opts: &SweepOptions,
) -> Result<Vec<Permutation>> {
    if source.params != target.params {
        return Err(Error::InvalidParameter(
            "source and target nit sets have different shapes".into(),
        ));
    }
    let params = source.params;
    let total = sweep_total(params, opts.budget, "relabeling search sweep")?;
    let n_states = params.state_count();
    let n = params.n() as usize;

    let source_rows = membership_rows(source)?;
    let target_rows = membership_rows(target)?;
    if source_rows.len() != target_rows.len() {
        return Ok(Vec::new());
    }
    let k = source_rows.len();

    let target_key = {
        let identity: Vec<StateIndex> = (1..=n_states as StateIndex).collect();
        let mut scratch = KeyScratch::new(n_states, n, k);
        let mut key = Vec::with_capacity(k * n_states);
        family_key(&target_rows, &identity, &mut scratch, &mut key);
        key
    };

    let source_rows = &source_rows;
    let target_key = &target_key;
    let run_shard = move |start: u64, len: u64| -> Vec<Vec<StateIndex>> {
        let mut scratch = KeyScratch::new(n_states, n, k);
        let mut key = Vec::with_capacity(k * n_states);
        let mut matches = Vec::new();
        sweep_range(start, len, n_states, |images| {
            family_key(source_rows, images, &mut scratch, &mut key);
            if key == *target_key {
                matches.push(images.to_vec());
            }
        });
        matches
    };

    let plan = shards(total, opts.jobs);
    let mut matches: Vec<Vec<StateIndex>> = Vec::new();
    if plan.len() == 1 {
        matches = run_shard(plan[0].0, plan[0].1);
    } else {
        let results = std::thread::scope(|scope| {
            let handles: Vec<_> = plan
                .iter()
                .map(|&(start, len)| scope.spawn(move || run_shard(start, len)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect::<Vec<_>>()
        });
        for shard in results {
            matches.extend(shard);
        }
    }

    matches.sort();
    matches.into_iter().map(Permutation::from_images).collect()
}
