use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{stable_hash, InstructionInstance, Phase};

/// Stable partition into (phase1, phase2), preserving order within each.
pub fn split_phases(
    instances: Vec<InstructionInstance>,
) -> (Vec<InstructionInstance>, Vec<InstructionInstance>) {
    instances.into_iter().partition(|i| i.phase == Phase::Phase1)
}

/// Apportions `target` across strata of the given sizes by the largest
/// remainder method. Remainder ties go to the earlier stratum.
///
/// The result sums to `min(target, total)` and each share is within one of
/// its exact proportional quota.
pub fn largest_remainder(counts: &[u64], target: u64) -> Vec<u64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let target = target.min(total) as u128;
    let total = total as u128;
    let mut shares: Vec<u64> = Vec::with_capacity(counts.len());
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(counts.len());
    for (i, &c) in counts.iter().enumerate() {
        let scaled = target * c as u128;
        shares.push((scaled / total) as u64);
        remainders.push((scaled % total, i));
    }
    let assigned: u128 = shares.iter().map(|&s| s as u128).sum();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take((target - assigned) as usize) {
        shares[i] += 1;
    }
    shares
}

/// Selects `min(target, n)` instances by seeded sampling without
/// replacement, stratified by source with largest-remainder shares.
/// Selected instances keep their input order.
pub fn subsample_to_target(
    instances: Vec<InstructionInstance>,
    target: u64,
    seed: u64,
) -> Vec<InstructionInstance> {
    if target as usize >= instances.len() {
        return instances;
    }
    let mut positions: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, inst) in instances.iter().enumerate() {
        positions.entry(inst.source.as_str()).or_default().push(i);
    }
    let counts: Vec<u64> = positions.values().map(|v| v.len() as u64).collect();
    let shares = largest_remainder(&counts, target);

    let mut keep = vec![false; instances.len()];
    for ((source, pos), share) in positions.iter().zip(shares) {
        let mut rng = ChaCha8Rng::seed_from_u64(stable_hash(seed, source, ""));
        for j in rand::seq::index::sample(&mut rng, pos.len(), share as usize) {
            keep[pos[j]] = true;
        }
    }
    instances
        .into_iter()
        .zip(keep)
        .filter_map(|(inst, k)| k.then_some(inst))
        .collect()
}
