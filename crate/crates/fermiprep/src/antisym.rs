//! Antisymmetrization of a sorted, repetition-free target register.
//!
//! The four-step pipeline: (1) prepare a uniform `seed` superposition,
//! (2) sort it with a reversible sorting network, recording each comparator
//! decision in `record`, (3) measure away seeds with repeated entries,
//! (4) run the network in reverse on the sorted `target`, consuming
//! `record` and applying a phase per swap. Simulation is staged: steps 1–3
//! act on seed ⊗ record ⊗ flag only; after the collision measurement the
//! record factor is extracted (it is a product state) and step 4 runs on
//! record ⊗ target.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::comparator;
use crate::network::ComparatorSchedule;
use crate::sim::{
    extract_bits, insert_bits, GateOp, Register, RegisterLayout, ResourceTally, SimError,
    Statevector, MAX_QUBITS,
};

#[derive(Debug, thiserror::Error)]
pub enum AntisymError {
    #[error("f_eta must be a power of two, got {0}")]
    FNotPowerOfTwo(usize),
    #[error("f_eta = {0} is below eta^2 = {1}")]
    FTooSmall(usize, usize),
    #[error("target values must be strictly ascending and below {0}")]
    BadTargetValues(usize),
    #[error("network has {0} wires but eta is {1}")]
    WireMismatch(usize, usize),
    #[error("staged simulation needs {0} qubits, over the cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("no success after {0} attempts")]
    AttemptLimit(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One antisymmetrization problem instance.
#[derive(Debug, Clone)]
pub struct AntisymJob {
    pub eta: usize,
    pub n_orbitals: usize,
    pub f_eta: usize,
    pub network: ComparatorSchedule,
    pub target_values: Vec<usize>,
    pub attempt_limit: usize,
}

impl AntisymJob {
    pub fn new(
        eta: usize,
        n_orbitals: usize,
        f_eta: usize,
        network: ComparatorSchedule,
        target_values: Vec<usize>,
    ) -> Result<Self, AntisymError> {
        let job = AntisymJob {
            eta,
            n_orbitals,
            f_eta,
            network,
            target_values,
            attempt_limit: 16,
        };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<(), AntisymError> {
        if !self.f_eta.is_power_of_two() {
            return Err(AntisymError::FNotPowerOfTwo(self.f_eta));
        }
        if self.f_eta < self.eta * self.eta {
            return Err(AntisymError::FTooSmall(self.f_eta, self.eta * self.eta));
        }
        if self.network.num_wires != self.eta {
            return Err(AntisymError::WireMismatch(self.network.num_wires, self.eta));
        }
        let ascending = self
            .target_values
            .windows(2)
            .all(|w| w[0] < w[1]);
        if self.target_values.len() != self.eta
            || !ascending
            || self.target_values.iter().any(|&v| v >= self.n_orbitals)
        {
            return Err(AntisymError::BadTargetValues(self.n_orbitals));
        }
        Ok(())
    }

    pub fn seed_element_width(&self) -> usize {
        self.f_eta.trailing_zeros() as usize
    }

    pub fn target_element_width(&self) -> usize {
        (self.n_orbitals as f64).log2().ceil() as usize
    }
}

/// Resource projection for the sort and reverse-sort stages, assembled
/// from the quantum comparator circuits at the two element widths.
#[derive(Debug, Clone, Serialize)]
pub struct AntisymResources {
    pub comparator_count_sort: usize,
    pub comparator_count_reverse: usize,
    pub seed_element_width: usize,
    pub target_element_width: usize,
    pub per_comparator_seed: ResourceTally,
    pub per_comparator_target: ResourceTally,
    pub total_t_count: u64,
    pub total_toffoli_count: u64,
}

#[derive(Debug)]
pub struct AntisymResult {
    /// State over the `target` register only.
    pub state: Statevector,
    pub success: bool,
    /// Exact Born probability of the repetition-free outcome per attempt.
    pub success_probability: f64,
    pub attempts: usize,
    pub resources: AntisymResources,
}

/// Step 1: uniform superposition over all f^η seed strings.
pub fn prepare_seed(eta: usize, f_eta: usize) -> Result<Statevector, AntisymError> {
    if !f_eta.is_power_of_two() {
        return Err(AntisymError::FNotPowerOfTwo(f_eta));
    }
    let width = f_eta.trailing_zeros() as usize;
    let layout = RegisterLayout::packed(&[("seed", width, eta)]);
    let n = layout.total_span();
    if n > MAX_QUBITS {
        return Err(AntisymError::TooManyQubits(n));
    }
    let mut state = Statevector::zero(n)?.with_layout(layout)?;
    for q in 0..n {
        state.apply(&GateOp::h(q))?;
    }
    Ok(state)
}

fn element_range(reg: &Register, p: usize) -> std::ops::Range<usize> {
    reg.element_qubits(p)
}

/// Apply one ascending comparator on elements (i, j) of `reg`, XORing the
/// swap decision into `record_qubit`. Pure basis permutation.
fn apply_comparator(state: &mut Statevector, reg: &Register, i: usize, j: usize, record_qubit: usize) {
    let ri = element_range(reg, i);
    let rj = element_range(reg, j);
    state.map_basis(|idx| {
        let a = extract_bits(idx, ri.clone());
        let b = extract_bits(idx, rj.clone());
        if a > b {
            let mut out = insert_bits(idx, ri.clone(), b);
            out = insert_bits(out, rj.clone(), a);
            out ^= 1usize << record_qubit;
            (out, C64::new(1.0, 0.0))
        } else {
            (idx, C64::new(1.0, 0.0))
        }
    });
}

/// Inverse comparator on `target` with the step-4 phase: controlled on the
/// record qubit, swap elements (i, j) and apply −1; then uncompute the
/// record bit from the post-swap ordering.
fn apply_reverse_comparator(
    state: &mut Statevector,
    reg: &Register,
    i: usize,
    j: usize,
    record_qubit: usize,
) {
    let ri = element_range(reg, i);
    let rj = element_range(reg, j);
    state.map_basis(|idx| {
        let swapped = (idx >> record_qubit) & 1 == 1;
        let mut out = idx;
        let mut phase = C64::new(1.0, 0.0);
        if swapped {
            let a = extract_bits(out, ri.clone());
            let b = extract_bits(out, rj.clone());
            out = insert_bits(out, ri.clone(), b);
            out = insert_bits(out, rj.clone(), a);
            phase = C64::new(-1.0, 0.0);
        }
        let a = extract_bits(out, ri.clone());
        let b = extract_bits(out, rj.clone());
        if a > b {
            out ^= 1usize << record_qubit;
        }
        (out, phase)
    });
}

/// Step 2: sort the seed register along the network, one record qubit per
/// comparator. The state's layout must contain `seed` and `record`.
pub fn sort_seed(state: &mut Statevector, network: &ComparatorSchedule) -> Result<(), AntisymError> {
    let seed = state.layout().get("seed")?.clone();
    let record = state.layout().get("record")?.clone();
    for (t, (i, j)) in network.comparators().enumerate() {
        let rq = record.element_qubits(t).start;
        apply_comparator(state, &seed, i, j, rq);
    }
    Ok(())
}

#[derive(Debug)]
pub struct CollisionOutcome {
    pub success: bool,
    /// Exact probability of the repetition-free outcome.
    pub probability: f64,
    pub state: Statevector,
}

/// Step 3: flag any adjacent equal pair in the sorted seed, then measure
/// the flag. The layout must contain `seed` and `flag`.
pub fn delete_collisions(
    state: &mut Statevector,
    rng_seed: u64,
) -> Result<CollisionOutcome, AntisymError> {
    let seed = state.layout().get("seed")?.clone();
    let flag = state.layout().get("flag")?.clone();
    let fq = flag.qubits().start;
    let eta = seed.element_count;
    state.map_basis(|idx| {
        let repeated = (0..eta.saturating_sub(1)).any(|p| {
            extract_bits(idx, element_range(&seed, p))
                == extract_bits(idx, element_range(&seed, p + 1))
        });
        if repeated {
            (idx ^ (1usize << fq), C64::new(1.0, 0.0))
        } else {
            (idx, C64::new(1.0, 0.0))
        }
    });
    let success_prob = state.outcome_probability("flag", 0)?;
    let (outcome, post, _) = state.measure_register("flag", rng_seed)?;
    Ok(CollisionOutcome {
        success: outcome == 0,
        probability: success_prob,
        state: post,
    })
}

/// Step 4: run the network in reverse on `target`, driven by the record
/// factor extracted after step 3. Returns the state over `target` alone,
/// with the record register verified all-zeros and sliced away.
pub fn reverse_sort_on_target(
    record_amps: &[C64],
    job: &AntisymJob,
) -> Result<Statevector, AntisymError> {
    let ascending = job.target_values.windows(2).all(|w| w[0] < w[1]);
    if !ascending {
        return Err(AntisymError::BadTargetValues(job.n_orbitals));
    }
    let w = job.target_element_width();
    let comparators: Vec<(usize, usize)> = job.network.comparators().collect();
    let c = comparators.len();
    assert_eq!(record_amps.len(), 1usize << c);
    let layout = RegisterLayout::packed(&[("record", 1, c.max(1)), ("target", w, job.eta)]);
    let n = layout.total_span();
    if n > MAX_QUBITS {
        return Err(AntisymError::TooManyQubits(n));
    }
    let record_reg = layout.get("record")?.clone();
    let target_reg = layout.get("target")?.clone();

    // Build record ⊗ |r_1 ⋯ r_η⟩.
    let mut target_index = 0usize;
    for (p, &v) in job.target_values.iter().enumerate() {
        target_index = insert_bits(target_index, target_reg.element_qubits(p), v);
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << n];
    // `record_amps` is indexed in raw qubit order over the record span.
    let record_start = record_reg.qubits().start;
    for (rv, amp) in record_amps.iter().enumerate() {
        amps[target_index | (rv << record_start)] = *amp;
    }
    let mut state = Statevector::from_amplitudes(n, amps)?.with_layout(layout)?;

    for (t, &(i, j)) in comparators.iter().enumerate().rev() {
        let rq = record_reg.element_qubits(t).start;
        apply_reverse_comparator(&mut state, &target_reg, i, j, rq);
    }

    // Record must have disentangled to |0…0⟩.
    let leftover = 1.0 - state.outcome_probability("record", 0)?;
    if leftover > 1e-10 {
        return Err(AntisymError::Sim(SimError::Invalid(format!(
            "record register failed to uncompute (residual mass {leftover:.3e})"
        ))));
    }
    Ok(state.extract_register("target", 1e-10)?)
}

fn resources_for(job: &AntisymJob) -> AntisymResources {
    let c = job.network.comparator_count();
    let seed_bundle = comparator::build_full_comparator(job.seed_element_width().max(1));
    let target_bundle = comparator::build_full_comparator(job.target_element_width().max(1));
    let per_seed = seed_bundle.full_comparator.resource_tally;
    let per_target = target_bundle.full_comparator.resource_tally;
    AntisymResources {
        comparator_count_sort: c,
        comparator_count_reverse: c,
        seed_element_width: job.seed_element_width(),
        target_element_width: job.target_element_width(),
        per_comparator_seed: per_seed,
        per_comparator_target: per_target,
        total_t_count: per_seed.t * c as u64 + per_target.t * c as u64,
        total_toffoli_count: per_seed.toffoli * c as u64 + per_target.toffoli * c as u64,
    }
}

/// Full staged pipeline with collision-rejection retries.
pub fn antisymmetrize(job: &AntisymJob, rng_seed: u64) -> Result<AntisymResult, AntisymError> {
    job.validate()?;
    let resources = resources_for(job);
    let w = job.target_element_width();

    if job.eta == 1 {
        let layout = RegisterLayout::packed(&[("target", w, 1)]);
        let mut idx = 0usize;
        idx = insert_bits(idx, layout.get("target").unwrap().element_qubits(0), job.target_values[0]);
        let state = Statevector::basis(w, idx)?.with_layout(layout)?;
        return Ok(AntisymResult {
            state,
            success: true,
            success_probability: 1.0,
            attempts: 1,
            resources,
        });
    }

    let c = job.network.comparator_count();
    let wf = job.seed_element_width();
    let stage1_layout =
        RegisterLayout::packed(&[("seed", wf, job.eta), ("record", 1, c), ("flag", 1, 1)]);
    let n1 = stage1_layout.total_span();
    if n1 > MAX_QUBITS {
        return Err(AntisymError::TooManyQubits(n1));
    }

    for attempt in 0..job.attempt_limit {
        let mut state = Statevector::zero(n1)?.with_layout(stage1_layout.clone())?;
        let seed_reg = state.layout().get("seed")?.clone();
        for q in seed_reg.qubits() {
            state.apply(&GateOp::h(q))?;
        }
        sort_seed(&mut state, &job.network)?;
        let outcome = delete_collisions(&mut state, rng_seed.wrapping_add(attempt as u64))?;
        if !outcome.success {
            continue;
        }
        let success_probability = outcome.probability;
        // The collision-free seed ⊗ record state is a product across the
        // (seed, flag) vs record cut, so the record factor is exact.
        let record_amps = outcome.state.factor_on(&["record"])?;
        let mut state = reverse_sort_on_target(&record_amps, job)?;
        canonicalize_global_phase(&mut state, &job.target_values)?;
        return Ok(AntisymResult {
            state,
            success: true,
            success_probability,
            attempts: attempt + 1,
            resources,
        });
    }
    Err(AntisymError::AttemptLimit(job.attempt_limit))
}

/// Fix the free global phase: the amplitude of the identity (ascending)
/// ordering is made positive real.
fn canonicalize_global_phase(
    state: &mut Statevector,
    ascending_values: &[usize],
) -> Result<(), AntisymError> {
    let reg = state.layout().get("target")?.clone();
    let mut idx = 0usize;
    for (p, &v) in ascending_values.iter().enumerate() {
        idx = insert_bits(idx, reg.element_qubits(p), v);
    }
    let amp = state.amplitudes()[idx];
    if amp.norm() < 1e-15 {
        return Err(AntisymError::Sim(SimError::Invalid(
            "identity-permutation amplitude vanished".into(),
        )));
    }
    let phase = amp / amp.norm();
    let correction = phase.conj();
    let amps: Vec<C64> = state.amplitudes().iter().map(|a| a * correction).collect();
    *state = Statevector::from_amplitudes(state.num_qubits(), amps)?
        .with_layout(state.layout().clone())?;
    Ok(())
}

/// Check exchange antisymmetry: every adjacent-slot transposition flips the
/// amplitude's sign, and amplitudes with repeated values vanish.
pub fn verify_antisymmetry(state: &Statevector, tolerance: f64) -> Result<bool, AntisymError> {
    let reg = state
        .layout()
        .get("target")
        .or_else(|_| state.layout().get("input"))?
        .clone();
    let eta = reg.element_count;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let values: Vec<usize> = (0..eta)
            .map(|p| extract_bits(idx, reg.element_qubits(p)))
            .collect();
        let mut sorted = values.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            if amp.norm() > tolerance {
                return Ok(false);
            }
            continue;
        }
        for p in 0..eta.saturating_sub(1) {
            let mut swapped_idx = idx;
            swapped_idx = insert_bits(swapped_idx, reg.element_qubits(p), values[p + 1]);
            swapped_idx = insert_bits(swapped_idx, reg.element_qubits(p + 1), values[p]);
            let other = state.amplitudes()[swapped_idx];
            if (other + amp).norm() > tolerance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Directly constructed Σ_σ sign(σ) |σ(r)⟩ / √(η!) over a `target` layout,
/// independent of the sorting machinery. Identity ordering carries +1.
pub fn reference_antisymmetric_state(
    eta: usize,
    n_orbitals: usize,
    values: &[usize],
) -> Result<Statevector, AntisymError> {
    assert_eq!(values.len(), eta);
    let w = (n_orbitals as f64).log2().ceil() as usize;
    let layout = RegisterLayout::packed(&[("target", w, eta)]);
    let reg = layout.get("target")?.clone();
    let n = layout.total_span();
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << n];
    let mut perm: Vec<usize> = (0..eta).collect();
    let norm = 1.0 / factorial(eta).sqrt();
    permute_with_parity(&mut perm, 0, &mut |perm, parity| {
        let mut idx = 0usize;
        for (p, &src) in perm.iter().enumerate() {
            idx = insert_bits(idx, reg.element_qubits(p), values[src]);
        }
        let sign = if parity { -1.0 } else { 1.0 };
        amps[idx] = C64::new(sign * norm, 0.0);
    });
    Ok(Statevector::from_amplitudes(n, amps)?.with_layout(layout)?)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Enumerate permutations with their parity (odd = true).
fn permute_with_parity(
    perm: &mut Vec<usize>,
    swaps_so_far: usize,
    visit: &mut impl FnMut(&[usize], bool),
) {
    fn helper(perm: &mut Vec<usize>, k: usize, parity: bool, visit: &mut impl FnMut(&[usize], bool)) {
        if k == perm.len() {
            visit(perm, parity);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            helper(perm, k + 1, parity ^ (i != k), visit);
            perm.swap(k, i);
        }
    }
    helper(perm, 0, swaps_so_far % 2 == 1, visit);
}

/// Exact per-attempt failure probability: P(some adjacent pair of the
/// sorted seed collides) = 1 − f(f−1)⋯(f−η+1)/f^η.
pub fn exact_collision_probability(eta: usize, f_eta: usize) -> f64 {
    let f = f_eta as f64;
    let mut no_rep = 1.0;
    for k in 0..eta {
        no_rep *= (f - k as f64) / f;
    }
    1.0 - no_rep
}

/// The analytic bound η(η−1)/(2f).
pub fn collision_probability_bound(eta: usize, f_eta: usize) -> f64 {
    (eta * (eta - 1)) as f64 / (2.0 * f_eta as f64)
}
