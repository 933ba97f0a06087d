//! Fitness-indexed population storage.
//!
//! A [`Population`] is a capacity-bounded multiset of individuals. Genomes are
//! opaque to everything outside the problem binding; all selection and
//! deletion schemes operate on the genome-erased [`FitnessIndex`], which keeps
//! the members ordered by fitness and (optionally) histogrammed into fixed
//! bins over the problem's fitness bounds.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::Rng;
use rand::RngCore;

/// Handle to one population member. Slots are reused after deletion, so a
/// handle is only meaningful while its member is alive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemberId(pub u32);

/// Total order on finite fitness values, used as the index key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FitnessKey(pub f64);

impl Eq for FitnessKey {}

impl PartialOrd for FitnessKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FitnessKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn key(fitness: f64) -> FitnessKey {
    assert!(fitness.is_finite(), "fitness must be finite: {fitness}");
    // normalize -0.0 so it shares a bucket with +0.0
    FitnessKey(fitness + 0.0)
}

/// Fixed equal-width binning of a fitness interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinConfig {
    pub lo: f64,
    pub hi: f64,
    pub nbins: usize,
}

impl BinConfig {
    pub fn new(bounds: (f64, f64), nbins: usize) -> Self {
        assert!(bounds.0 < bounds.1, "bin bounds must satisfy lo < hi");
        assert!(nbins >= 1, "need at least one bin");
        BinConfig {
            lo: bounds.0,
            hi: bounds.1,
            nbins,
        }
    }

    pub fn index_of(&self, fitness: f64) -> usize {
        fitness_level_index(fitness, (self.lo, self.hi), self.nbins)
    }
}

/// Maps a fitness value to its equal-width bin, clamping values outside the
/// bounds to the nearest edge bin. The upper bound maps to the last bin.
pub fn fitness_level_index(fitness: f64, bounds: (f64, f64), nbins: usize) -> usize {
    let (lo, hi) = bounds;
    assert!(lo < hi, "bounds must satisfy lo < hi");
    assert!(nbins >= 1, "need at least one bin");
    let raw = ((fitness - lo) / (hi - lo) * nbins as f64).floor();
    if raw < 0.0 {
        0
    } else {
        (raw as usize).min(nbins - 1)
    }
}

#[derive(Debug, Clone, Copy)]
struct MemberMeta {
    fitness: f64,
    pos_in_live: u32,
    pos_in_bucket: u32,
    bin: u32,
    pos_in_bin: u32,
    alive: bool,
}

/// Genome-erased view of a population: per-member fitness, a sorted
/// value-to-members map, a dense member list for uniform draws, and the
/// optional bin histogram. Selection and deletion schemes see only this.
#[derive(Debug, Clone, Default)]
pub struct FitnessIndex {
    meta: Vec<MemberMeta>,
    live: Vec<MemberId>,
    buckets: BTreeMap<FitnessKey, Vec<MemberId>>,
    bins: Option<BinTable>,
}

#[derive(Debug, Clone)]
struct BinTable {
    config: BinConfig,
    members: Vec<Vec<MemberId>>,
}

impl FitnessIndex {
    fn new(bins: Option<BinConfig>) -> Self {
        FitnessIndex {
            meta: Vec::new(),
            live: Vec::new(),
            buckets: BTreeMap::new(),
            bins: bins.map(|config| BinTable {
                members: vec![Vec::new(); config.nbins],
                config,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn fitness_of(&self, id: MemberId) -> f64 {
        let m = &self.meta[id.0 as usize];
        debug_assert!(m.alive);
        m.fitness
    }

    pub fn f_min(&self) -> Option<f64> {
        self.buckets.keys().next().map(|k| k.0)
    }

    pub fn f_max(&self) -> Option<f64> {
        self.buckets.keys().next_back().map(|k| k.0)
    }

    /// Mean fitness gap of a uniform population, `(f_max - f_min) / (|P| - 1)`.
    /// Degenerate populations (single member or single fitness value) get 1.0,
    /// which yields the same uniform selection under any positive value.
    pub fn effective_epsilon(&self) -> f64 {
        match (self.f_min(), self.f_max()) {
            (Some(lo), Some(hi)) if self.len() >= 2 && hi > lo => {
                (hi - lo) / (self.len() as f64 - 1.0)
            }
            _ => 1.0,
        }
    }

    pub fn uniform_member(&self, rng: &mut dyn RngCore) -> MemberId {
        assert!(!self.live.is_empty(), "population is empty");
        self.live[rng.gen_range(0..self.live.len())]
    }

    pub fn members(&self) -> &[MemberId] {
        &self.live
    }

    /// Distinct fitness values in ascending order.
    pub fn distinct_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.buckets.keys().map(|k| k.0)
    }

    pub fn distinct_value_count(&self) -> usize {
        self.buckets.len()
    }

    /// Members whose fitness equals `value` exactly.
    pub fn members_at(&self, value: f64) -> &[MemberId] {
        self.buckets
            .get(&key(value))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Member sequence in fitness order (ties in insertion-bucket order).
    pub fn sorted_members(&self) -> impl Iterator<Item = MemberId> + '_ {
        self.buckets.values().flat_map(|v| v.iter().copied())
    }

    /// Uniform choice among the members whose fitness is nearest to `target`,
    /// including both values when two distinct values are exactly equidistant.
    pub fn nearest_member(&self, target: f64, rng: &mut dyn RngCore) -> MemberId {
        assert!(!self.is_empty(), "population is empty");
        let below = self
            .buckets
            .range(..=key(target))
            .next_back()
            .map(|(k, v)| (k.0, v));
        let above = self
            .buckets
            .range(key(target)..)
            .next()
            .map(|(k, v)| (k.0, v));
        match (below, above) {
            (Some((lo, lo_members)), Some((hi, hi_members))) => {
                if lo == hi {
                    return lo_members[rng.gen_range(0..lo_members.len())];
                }
                let d_lo = target - lo;
                let d_hi = hi - target;
                if d_lo < d_hi {
                    lo_members[rng.gen_range(0..lo_members.len())]
                } else if d_hi < d_lo {
                    hi_members[rng.gen_range(0..hi_members.len())]
                } else {
                    let total = lo_members.len() + hi_members.len();
                    let pick = rng.gen_range(0..total);
                    if pick < lo_members.len() {
                        lo_members[pick]
                    } else {
                        hi_members[pick - lo_members.len()]
                    }
                }
            }
            (Some((_, members)), None) | (None, Some((_, members))) => {
                members[rng.gen_range(0..members.len())]
            }
            (None, None) => unreachable!("nonempty index has at least one bucket"),
        }
    }

    pub fn bin_config(&self) -> Option<BinConfig> {
        self.bins.as_ref().map(|b| b.config)
    }

    /// Occupancy count per bin. Panics when the index was built without bins.
    pub fn bin_counts(&self) -> Vec<usize> {
        let table = self.bins.as_ref().expect("population has no bin histogram");
        table.members.iter().map(|m| m.len()).collect()
    }

    pub fn bin_members(&self, bin: usize) -> &[MemberId] {
        let table = self.bins.as_ref().expect("population has no bin histogram");
        &table.members[bin]
    }

    fn insert(&mut self, id: MemberId, fitness: f64) {
        let slot = id.0 as usize;
        if slot >= self.meta.len() {
            self.meta.resize(
                slot + 1,
                MemberMeta {
                    fitness: 0.0,
                    pos_in_live: 0,
                    pos_in_bucket: 0,
                    bin: 0,
                    pos_in_bin: 0,
                    alive: false,
                },
            );
        }
        assert!(!self.meta[slot].alive, "member slot already alive");
        let pos_in_live = self.live.len() as u32;
        self.live.push(id);
        let bucket = self.buckets.entry(key(fitness)).or_default();
        let pos_in_bucket = bucket.len() as u32;
        bucket.push(id);
        let (bin, pos_in_bin) = match &mut self.bins {
            Some(table) => {
                let b = table.config.index_of(fitness);
                table.members[b].push(id);
                (b as u32, (table.members[b].len() - 1) as u32)
            }
            None => (0, 0),
        };
        self.meta[slot] = MemberMeta {
            fitness,
            pos_in_live,
            pos_in_bucket,
            bin,
            pos_in_bin,
            alive: true,
        };
    }

    fn remove(&mut self, id: MemberId) -> f64 {
        let slot = id.0 as usize;
        let meta = self.meta[slot];
        assert!(meta.alive, "removing a dead member");
        self.meta[slot].alive = false;

        let last = *self.live.last().unwrap();
        self.live.swap_remove(meta.pos_in_live as usize);
        if last != id {
            self.meta[last.0 as usize].pos_in_live = meta.pos_in_live;
        }

        let k = key(meta.fitness);
        let bucket = self.buckets.get_mut(&k).unwrap();
        let last = *bucket.last().unwrap();
        bucket.swap_remove(meta.pos_in_bucket as usize);
        if last != id {
            self.meta[last.0 as usize].pos_in_bucket = meta.pos_in_bucket;
        }
        if bucket.is_empty() {
            self.buckets.remove(&k);
        }

        if let Some(table) = &mut self.bins {
            let members = &mut table.members[meta.bin as usize];
            let last = *members.last().unwrap();
            members.swap_remove(meta.pos_in_bin as usize);
            if last != id {
                self.meta[last.0 as usize].pos_in_bin = meta.pos_in_bin;
            }
        }
        meta.fitness
    }
}

/// One stored individual: an opaque genome plus its cached fitness. Fitness is
/// evaluated exactly once, when the individual is created.
#[derive(Debug, Clone)]
pub struct Individual<G> {
    pub genome: G,
    pub fitness: f64,
}

/// Capacity-bounded multiset of individuals with a fitness index.
///
/// The capacity is advisory here: the steady-state engine inserts the child
/// before deleting, so the population transiently holds `capacity + 1`
/// members within a cycle.
#[derive(Debug, Clone)]
pub struct Population<G> {
    genomes: Vec<Option<G>>,
    free: Vec<u32>,
    index: FitnessIndex,
    capacity: Option<usize>,
}

impl<G> Population<G> {
    pub fn new(capacity: Option<usize>, bins: Option<BinConfig>) -> Self {
        if let Some(c) = capacity {
            assert!(c >= 1, "capacity must be positive");
        }
        Population {
            genomes: Vec::new(),
            free: Vec::new(),
            index: FitnessIndex::new(bins),
            capacity,
        }
    }

    pub fn unbounded() -> Self {
        Population::new(None, None)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn index(&self) -> &FitnessIndex {
        &self.index
    }

    pub fn genome(&self, id: MemberId) -> &G {
        self.genomes[id.0 as usize]
            .as_ref()
            .expect("member is dead")
    }

    pub fn fitness(&self, id: MemberId) -> f64 {
        self.index.fitness_of(id)
    }

    pub fn insert(&mut self, genome: G, fitness: f64) -> MemberId {
        if let Some(c) = self.capacity {
            assert!(self.len() < c + 1, "population over transient capacity");
        }
        let id = match self.free.pop() {
            Some(slot) => {
                self.genomes[slot as usize] = Some(genome);
                MemberId(slot)
            }
            None => {
                self.genomes.push(Some(genome));
                MemberId((self.genomes.len() - 1) as u32)
            }
        };
        self.index.insert(id, fitness);
        id
    }

    pub fn remove(&mut self, id: MemberId) -> Individual<G> {
        let fitness = self.index.remove(id);
        let genome = self.genomes[id.0 as usize].take().expect("member is dead");
        self.free.push(id.0);
        Individual { genome, fitness }
    }

    pub fn iter(&self) -> impl Iterator<Item = (MemberId, &G, f64)> + '_ {
        self.index.members().iter().map(move |&id| {
            (
                id,
                self.genomes[id.0 as usize].as_ref().unwrap(),
                self.index.fitness_of(id),
            )
        })
    }

    /// Full structural consistency check against a rebuilt index; test support.
    pub fn check_consistency(&self) -> Result<(), String> {
        let idx = &self.index;
        let mut seen = 0usize;
        for (k, bucket) in &idx.buckets {
            for (pos, &id) in bucket.iter().enumerate() {
                let m = &idx.meta[id.0 as usize];
                if !m.alive {
                    return Err(format!("dead member {id:?} in bucket"));
                }
                if key(m.fitness) != *k {
                    return Err(format!("member {id:?} in wrong bucket"));
                }
                if m.pos_in_bucket as usize != pos {
                    return Err(format!("member {id:?} bucket position stale"));
                }
                if self.genomes[id.0 as usize].is_none() {
                    return Err(format!("member {id:?} missing genome"));
                }
                seen += 1;
            }
        }
        if seen != idx.live.len() {
            return Err(format!(
                "bucket total {seen} != live count {}",
                idx.live.len()
            ));
        }
        for (pos, &id) in idx.live.iter().enumerate() {
            if idx.meta[id.0 as usize].pos_in_live as usize != pos {
                return Err(format!("member {id:?} live position stale"));
            }
        }
        let sorted: Vec<f64> = idx.sorted_members().map(|id| idx.fitness_of(id)).collect();
        if sorted.windows(2).any(|w| w[0] > w[1]) {
            return Err("fitness order violated".to_string());
        }
        if let Some(table) = &idx.bins {
            let mut total = 0usize;
            for (b, members) in table.members.iter().enumerate() {
                for (pos, &id) in members.iter().enumerate() {
                    let m = &idx.meta[id.0 as usize];
                    if table.config.index_of(m.fitness) != b {
                        return Err(format!("member {id:?} in wrong bin"));
                    }
                    if m.pos_in_bin as usize != pos {
                        return Err(format!("member {id:?} bin position stale"));
                    }
                    total += 1;
                }
            }
            if total != idx.live.len() {
                return Err("bin histogram does not sum to population size".to_string());
            }
        }
        Ok(())
    }
}
