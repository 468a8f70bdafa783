//! Classical sorting-network generation and verification.
//!
//! A [`ComparatorSchedule`] is a fixed, data-oblivious schedule of
//! compare-and-swap operations grouped into wire-disjoint rounds. Every
//! comparator is ascending: the pair `(i, j)` with `i < j` puts the minimum
//! on wire `i`. Network families are registered behind the
//! [`NetworkFamily`] trait and selected by name at runtime.

use serde::{Deserialize, Serialize};

use crate::comparator;
use crate::sim::ResourceTally;

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("unsupported sorting network family '{0}'")]
    UnknownFamily(String),
    #[error("num_wires must be at least 1")]
    NoWires,
    #[error("zero-one verification capped at 24 wires, got {0}")]
    TooManyWires(usize),
}

/// A sorting network: rounds of wire-disjoint ascending comparators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparatorSchedule {
    pub family: String,
    pub num_wires: usize,
    pub rounds: Vec<Vec<(usize, usize)>>,
}

impl ComparatorSchedule {
    pub fn comparator_count(&self) -> usize {
        self.rounds.iter().map(|r| r.len()).sum()
    }

    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    /// Flat comparator list in application order.
    pub fn comparators(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rounds.iter().flatten().copied()
    }

    /// Structural invariant: pairs within a round touch disjoint wires and
    /// every pair is ascending (i < j) and in range.
    pub fn is_well_formed(&self) -> bool {
        self.rounds.iter().all(|round| {
            let mut seen = std::collections::HashSet::new();
            round.iter().all(|&(i, j)| {
                i < j && j < self.num_wires && seen.insert(i) && seen.insert(j)
            })
        })
    }

    /// Sort an array in place following the schedule.
    pub fn sort<T: Ord + Copy>(&self, values: &mut [T]) {
        assert_eq!(values.len(), self.num_wires);
        for (i, j) in self.comparators() {
            if values[i] > values[j] {
                values.swap(i, j);
            }
        }
    }
}

/// A generator for one family of sorting networks.
pub trait NetworkFamily: Sync {
    fn name(&self) -> &'static str;

    /// Comparators in application order, for `n` a supported size.
    /// Implementations may assume `n >= 1`.
    fn comparators(&self, n: usize) -> Vec<(usize, usize)>;

    /// Whether the family construction requires padding to a power of two.
    fn needs_power_of_two(&self) -> bool {
        false
    }
}

struct Bitonic;
struct OddEvenMergesort;
struct Insertion;

impl NetworkFamily for Bitonic {
    fn name(&self) -> &'static str {
        "bitonic"
    }

    fn needs_power_of_two(&self) -> bool {
        true
    }

    fn comparators(&self, n: usize) -> Vec<(usize, usize)> {
        // Classic bitonic construction with directed comparators, then
        // standardized (Knuth 5.3.4) so every comparator is ascending.
        debug_assert!(n.is_power_of_two());
        let mut directed = Vec::new();
        let mut k = 2;
        while k <= n {
            let mut j = k / 2;
            while j >= 1 {
                for i in 0..n {
                    let l = i ^ j;
                    if l > i {
                        if i & k == 0 {
                            directed.push((i, l)); // ascending: min to i
                        } else {
                            directed.push((l, i)); // descending: min to l's slot
                        }
                    }
                }
                j /= 2;
            }
            k *= 2;
        }
        standardize(directed)
    }
}

impl NetworkFamily for OddEvenMergesort {
    fn name(&self) -> &'static str {
        "odd-even-mergesort"
    }

    fn needs_power_of_two(&self) -> bool {
        true
    }

    fn comparators(&self, n: usize) -> Vec<(usize, usize)> {
        // Batcher's odd-even mergesort; already ascending everywhere.
        debug_assert!(n.is_power_of_two());
        let mut out = Vec::new();
        let mut p = 1;
        while p < n {
            let mut k = p;
            while k >= 1 {
                let mut j = k % p;
                while j + k < n {
                    for i in 0..(n - j - k) {
                        if (i + j) / (p * 2) == (i + j + k) / (p * 2) {
                            out.push((i + j, i + j + k));
                        }
                    }
                    j += 2 * k;
                }
                k /= 2;
            }
            p *= 2;
        }
        out
    }
}

impl NetworkFamily for Insertion {
    fn name(&self) -> &'static str {
        "insertion"
    }

    fn comparators(&self, n: usize) -> Vec<(usize, usize)> {
        // Slow n(n-1)/2 baseline, kept as a differential-testing oracle.
        let mut out = Vec::new();
        for i in 1..n {
            for j in (0..i).rev() {
                out.push((j, j + 1));
            }
        }
        out
    }
}

/// Knuth standardization: rewrite descending comparators `(a, b)` with
/// `a > b` as ascending ones by exchanging the two wire labels in all
/// later comparators. Preserves sorting behavior, size, and depth.
fn standardize(directed: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut seq = directed;
    for t in 0..seq.len() {
        let (a, b) = seq[t];
        if a > b {
            seq[t] = (b, a);
            for s in seq.iter_mut().skip(t + 1) {
                let relabel = |w: usize| {
                    if w == a {
                        b
                    } else if w == b {
                        a
                    } else {
                        w
                    }
                };
                *s = (relabel(s.0), relabel(s.1));
            }
        }
    }
    seq
}

/// Greedy layering of a comparator sequence into wire-disjoint rounds.
fn layer_rounds(num_wires: usize, seq: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut last_round = vec![0usize; num_wires];
    let mut rounds: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(i, j) in seq {
        let round = last_round[i].max(last_round[j]);
        if round == rounds.len() {
            rounds.push(Vec::new());
        }
        rounds[round].push((i, j));
        last_round[i] = round + 1;
        last_round[j] = round + 1;
    }
    rounds
}

static FAMILIES: &[&dyn NetworkFamily] = &[&Bitonic, &OddEvenMergesort, &Insertion];

pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name()).collect()
}

pub fn lookup_family(name: &str) -> Result<&'static dyn NetworkFamily, NetworkError> {
    FAMILIES
        .iter()
        .copied()
        .find(|f| f.name() == name)
        .ok_or_else(|| NetworkError::UnknownFamily(name.to_string()))
}

/// Generate a sorting network for `num_wires` inputs.
///
/// Families that require power-of-two sizes are padded with virtual +∞
/// wires above the real ones; comparators touching padding wires are
/// dropped from the emitted schedule.
pub fn generate(family: &str, num_wires: usize) -> Result<ComparatorSchedule, NetworkError> {
    let fam = lookup_family(family)?;
    if num_wires == 0 {
        return Err(NetworkError::NoWires);
    }
    let padded = if fam.needs_power_of_two() {
        num_wires.next_power_of_two()
    } else {
        num_wires
    };
    let seq: Vec<(usize, usize)> = fam
        .comparators(padded)
        .into_iter()
        .filter(|&(i, j)| i < num_wires && j < num_wires)
        .collect();
    Ok(ComparatorSchedule {
        family: fam.name().to_string(),
        num_wires,
        rounds: layer_rounds(num_wires, &seq),
    })
}

/// 0-1 principle check: the network sorts iff it sorts all 2^n binary
/// strings. Exhaustive, capped at 24 wires.
pub fn verify_zero_one(schedule: &ComparatorSchedule) -> Result<bool, NetworkError> {
    let n = schedule.num_wires;
    if n > 24 {
        return Err(NetworkError::TooManyWires(n));
    }
    let mut buf = vec![0u8; n];
    for input in 0..(1usize << n) {
        for (w, slot) in buf.iter_mut().enumerate() {
            *slot = ((input >> w) & 1) as u8;
        }
        schedule.sort(&mut buf);
        if buf.windows(2).any(|w| w[0] > w[1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Best known optimized 20-input network, for comparison in reports:
/// depth 11 with 92 comparators.
pub const OPTIMIZED_20_INPUT_DEPTH: usize = 11;
pub const OPTIMIZED_20_INPUT_COMPARATORS: usize = 92;

/// Quantum resource projection for executing a schedule on registers of
/// `element_width` bits per wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub family: String,
    pub num_wires: usize,
    pub element_width: usize,
    pub comparator_count: usize,
    pub round_depth: usize,
    pub per_comparator: ResourceTally,
    pub total_t_count: u64,
    pub total_toffoli_count: u64,
    pub total_clifford_count: u64,
    /// Reference point: optimized 20-input networks reach depth 11 with
    /// 92 comparators.
    pub optimized_20_input_reference: (usize, usize),
}

/// Tally the full quantum comparator at width `element_width` and multiply
/// by the schedule's comparator count.
pub fn resource_summary(schedule: &ComparatorSchedule, element_width: usize) -> ResourceSummary {
    assert!(element_width >= 1);
    let bundle = comparator::build_full_comparator(element_width);
    let per = bundle.full_comparator.resource_tally;
    let n = schedule.comparator_count() as u64;
    ResourceSummary {
        family: schedule.family.clone(),
        num_wires: schedule.num_wires,
        element_width,
        comparator_count: schedule.comparator_count(),
        round_depth: schedule.depth(),
        per_comparator: per,
        total_t_count: per.t * n,
        total_toffoli_count: per.toffoli * n,
        total_clifford_count: per.clifford * n,
        optimized_20_input_reference: (OPTIMIZED_20_INPUT_DEPTH, OPTIMIZED_20_INPUT_COMPARATORS),
    }
}
