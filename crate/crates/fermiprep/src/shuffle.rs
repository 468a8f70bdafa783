//! Antisymmetrization by the quantum Fisher-Yates shuffle.
//!
//! Registers (top to bottom): `choice` (η qubits, unary), `index`
//! (η elements of ⌈log₂η⌉ bits, initialized to 0,…,η−1), `input`
//! (η elements of ⌈log₂N⌉ bits, ascending values). η−1 Fisher-Yates
//! blocks build the uniform superposition of permutations with a −1 phase
//! per executed swap; a final detangle pass resets `index` using
//! comparison oracles and controlled decrements. Serves as an independent
//! second implementation against the sort-based pipeline.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::comparator::{build_comparison_oracle_on, oracle_scratch_count, OracleVariant};
use crate::sim::{
    extract_bits, insert_bits, Circuit, Control, GateOp, Register, RegisterLayout, ResourceTally,
    SimError, Statevector, MAX_QUBITS,
};

#[derive(Debug, thiserror::Error)]
pub enum ShuffleError {
    #[error("input values must be strictly ascending and below {0}")]
    BadInputValues(usize),
    #[error("simulation needs {0} qubits, over the cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One shuffle problem instance.
#[derive(Debug, Clone)]
pub struct ShuffleJob {
    pub eta: usize,
    pub n_orbitals: usize,
    pub input_values: Vec<usize>,
}

impl ShuffleJob {
    pub fn new(eta: usize, n_orbitals: usize, input_values: Vec<usize>) -> Result<Self, ShuffleError> {
        let job = ShuffleJob { eta, n_orbitals, input_values };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), ShuffleError> {
        let ascending = self.input_values.windows(2).all(|w| w[0] < w[1]);
        if self.input_values.len() != self.eta
            || self.eta == 0
            || !ascending
            || self.input_values.iter().any(|&v| v >= self.n_orbitals)
        {
            return Err(ShuffleError::BadInputValues(self.n_orbitals));
        }
        Ok(())
    }

    /// ⌈log₂η⌉, floored at 1 so the register stays well formed.
    pub fn index_width(&self) -> usize {
        ((self.eta as f64).log2().ceil() as usize).max(1)
    }

    pub fn input_width(&self) -> usize {
        ((self.n_orbitals as f64).log2().ceil() as usize).max(1)
    }
}

/// Wire assignments for one job: the three registers plus an ancilla pool
/// (dedicated `anc` qubits first, then the choice qubits, which are free
/// outside the FY blocks and during detangle).
#[derive(Debug, Clone)]
pub struct ShuffleWires {
    pub layout: RegisterLayout,
    pub choice: Register,
    pub index: Register,
    pub input: Register,
    pub pool: Vec<usize>,
}

impl ShuffleWires {
    pub fn for_job(job: &ShuffleJob) -> Result<ShuffleWires, ShuffleError> {
        let u = job.index_width();
        let w = job.input_width();
        // Detangle needs one oracle result qubit plus sequential-oracle
        // scratch; whatever the choice qubits cannot cover becomes `anc`.
        let pool_need = 1 + oracle_scratch_count(w, OracleVariant::Sequential);
        let anc = pool_need.saturating_sub(job.eta);
        let mut specs: Vec<(&str, usize, usize)> = vec![
            ("choice", 1, job.eta),
            ("index", u, job.eta),
            ("input", w, job.eta),
        ];
        if anc > 0 {
            specs.push(("anc", 1, anc));
        }
        let layout = RegisterLayout::packed(&specs);
        let choice = layout.get("choice")?.clone();
        let index = layout.get("index")?.clone();
        let input = layout.get("input")?.clone();
        let mut pool: Vec<usize> = Vec::new();
        if anc > 0 {
            pool.extend(layout.get("anc")?.qubits());
        }
        pool.extend((0..job.eta).map(|l| choice.element_qubits(l).start));
        Ok(ShuffleWires { layout, choice, index, input, pool })
    }

    pub fn choice_qubit(&self, l: usize) -> usize {
        self.choice.element_qubits(l).start
    }

    fn element_bits(reg: &Register, p: usize) -> Vec<usize> {
        reg.element_qubits(p).collect()
    }
}

/// Angle for R_ℓ: |0⟩ → (|0⟩ + √ℓ|1⟩)/√(ℓ+1).
pub fn rotation_angle(l: usize) -> f64 {
    (l as f64 / (l + 1) as f64).sqrt().asin()
}

/// Map choice from all-zeros to the unary W_k = Σ_{ℓ=0}^{k} |ℓ⟩/√(k+1):
/// the R-cascade in the alternative (prefix) unary encoding, then the CNOT
/// translation layer. The translation must run ℓ = 1..k ascending; the
/// descending order leaves prefix states untranslated.
pub fn prepare_choice(k: usize, wires: &ShuffleWires) -> Circuit {
    assert!(k >= 1);
    let cq = |l: usize| wires.choice_qubit(l);
    let mut ops = vec![GateOp::x(cq(0)), GateOp::rotation(cq(1), rotation_angle(k))];
    for l in 1..k {
        ops.push(GateOp::controlled_rotation(cq(l), cq(l + 1), rotation_angle(k - l)));
    }
    for l in 1..=k {
        ops.push(GateOp::cnot(cq(l), cq(l - 1)));
    }
    Circuit::new(ops)
}

/// For each c < k, controlled on choice qubit c, swap elements c and k of
/// the target register bitwise. The c = k branch is the identity and emits
/// no gates.
pub fn selected_swap(k: usize, target: &Register, wires: &ShuffleWires) -> Circuit {
    let mut ops = Vec::new();
    for c in 0..k {
        let a = ShuffleWires::element_bits(target, c);
        let b = ShuffleWires::element_bits(target, k);
        for (qa, qb) in a.into_iter().zip(b) {
            ops.push(GateOp::fredkin(wires.choice_qubit(c), qa, qb));
        }
    }
    Circuit::new(ops)
}

/// Phase −1 iff choice encodes ℓ < k, i.e. a nontrivial swap was executed.
/// A Z on each choice qubit 0..k−1 realizes the controlled phase by
/// kickback; the unary |k⟩ branch has those qubits clear.
pub fn conditional_phase(k: usize, wires: &ShuffleWires) -> Circuit {
    Circuit::new((0..k).map(|l| GateOp::z(wires.choice_qubit(l))).collect())
}

/// Return choice to all-zeros: for every position ℓ, flip choice[ℓ] if
/// index[ℓ] equals k. The control sequence is the binary encoding of k.
pub fn reset_choice(k: usize, wires: &ShuffleWires) -> Circuit {
    let u = wires.index.element_width;
    let mut ops = Vec::new();
    for l in 0..wires.choice.element_count {
        let bits = ShuffleWires::element_bits(&wires.index, l);
        let controls: Vec<Control> = (0..u)
            .map(|j| {
                if (k >> j) & 1 == 1 {
                    Control::on(bits[j])
                } else {
                    Control::off(bits[j])
                }
            })
            .collect();
        ops.push(GateOp::mcx(controls, wires.choice_qubit(l)));
    }
    Circuit::new(ops)
}

/// Decrement `target` (LSB first) by one mod 2^w when `control` is set.
/// Borrow chain: anc[n] = control ∧ ¬target[0] ∧ ⋯ ∧ ¬target[n], computed
/// up front, consumed top-down with interleaved uncomputation so each
/// ancilla is released before the bit below it flips. 2(w−1) Toffolis.
pub fn build_decrement_on(target: &[usize], control: usize, ancillas: &[usize]) -> Circuit {
    let w = target.len();
    assert!(w >= 1);
    if w == 1 {
        return Circuit::new(vec![GateOp::cnot(control, target[0])]);
    }
    assert!(ancillas.len() >= w - 1);
    let chain_in = |n: usize| if n == 0 { control } else { ancillas[n - 1] };
    let mut ops = Vec::new();
    for n in 0..w - 1 {
        ops.push(GateOp::mcx(
            vec![Control::on(chain_in(n)), Control::off(target[n])],
            ancillas[n],
        ));
    }
    for n in (1..w).rev() {
        ops.push(GateOp::cnot(ancillas[n - 1], target[n]));
        ops.push(
            GateOp::mcx(
                vec![Control::on(chain_in(n - 1)), Control::off(target[n - 1])],
                ancillas[n - 1],
            )
            .as_uncompute(),
        );
    }
    ops.push(GateOp::cnot(control, target[0]));
    Circuit::new(ops)
}

/// Standalone decrement for a `width`-bit register: target on qubits
/// 0..width (LSB first), control on qubit `width`, ancillas above.
pub fn build_decrement(width: usize) -> Circuit {
    let target: Vec<usize> = (0..width).collect();
    let ancillas: Vec<usize> = (width + 1..2 * width).collect();
    build_decrement_on(&target, width, &ancillas)
}

/// Disentangle index from input: for every ordered pair (ℓ, k), compare
/// input[ℓ] > input[k] into an oracle qubit, decrement index[ℓ] on it,
/// then uncompute the oracle. Undoes index[ℓ] = rank of input[ℓ].
pub fn detangle(wires: &ShuffleWires) -> Circuit {
    let eta = wires.input.element_count;
    let u = wires.index.element_width;
    let w = wires.input.element_width;
    let q = wires.pool[0];
    let scratch: Vec<usize> =
        wires.pool[1..1 + oracle_scratch_count(w, OracleVariant::Sequential)].to_vec();
    // The sequential oracle restores its scratch, so those wires double as
    // the decrement's borrow-chain ancillas.
    let dec_anc: Vec<usize> = scratch[..u.saturating_sub(1)].to_vec();
    let mut circuit = Circuit::empty();
    for l in 0..eta {
        let a = ShuffleWires::element_bits(&wires.input, l);
        let idx_bits = ShuffleWires::element_bits(&wires.index, l);
        for k in 0..eta {
            if k == l {
                continue;
            }
            let b = ShuffleWires::element_bits(&wires.input, k);
            let oracle = build_comparison_oracle_on(&a, &b, q, &scratch, OracleVariant::Sequential);
            circuit.extend(&oracle);
            circuit.extend(&build_decrement_on(&idx_bits, q, &dec_anc));
            circuit.extend(&Circuit::new(
                oracle.ops.iter().map(|op| op.clone().as_uncompute()).collect(),
            ));
        }
    }
    circuit
}

/// X gates loading index with 0,…,η−1 and input with the job's values.
pub fn init_registers(job: &ShuffleJob, wires: &ShuffleWires) -> Circuit {
    let mut ops = Vec::new();
    for l in 0..job.eta {
        for (j, bit) in wires.index.element_qubits(l).enumerate() {
            if (l >> j) & 1 == 1 {
                ops.push(GateOp::x(bit));
            }
        }
        for (j, bit) in wires.input.element_qubits(l).enumerate() {
            if (job.input_values[l] >> j) & 1 == 1 {
                ops.push(GateOp::x(bit));
            }
        }
    }
    Circuit::new(ops)
}

/// Elementary-gate count: single-qubit gates with up to two controls count
/// as one; wider multi-controlled-X gates count as their V-chain Toffolis.
pub fn elementary_count(circuit: &Circuit) -> u64 {
    circuit
        .ops
        .iter()
        .map(|op| {
            let c = op.controls.len();
            if c <= 2 {
                1
            } else {
                (2 * (c - 1) - 1) as u64
            }
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockTally {
    pub label: String,
    pub gates: u64,
    pub tally: ResourceTally,
}

#[derive(Debug)]
pub struct ShuffleResult {
    /// State over the `input` register only.
    pub state: Statevector,
    pub per_block: Vec<BlockTally>,
    pub total_gates: u64,
    pub resources: ResourceTally,
    /// Largest off-zero mass seen on choice/index at any checkpoint.
    pub max_register_residual: f64,
}

fn block_segments(job: &ShuffleJob, wires: &ShuffleWires) -> Vec<(String, Circuit)> {
    let mut segments = vec![("init".to_string(), init_registers(job, wires))];
    for k in 1..job.eta {
        let mut block = prepare_choice(k, wires);
        block.extend(&selected_swap(k, &wires.index, wires));
        block.extend(&selected_swap(k, &wires.input, wires));
        block.extend(&conditional_phase(k, wires));
        block.extend(&reset_choice(k, wires));
        segments.push((format!("fy_{k}"), block));
    }
    segments.push(("detangle".to_string(), detangle(wires)));
    segments
}

/// Total elementary gate count of the assembled pipeline, built without
/// simulating (no qubit cap applies).
pub fn total_gate_count(eta: usize, n_orbitals: usize) -> u64 {
    let values: Vec<usize> = (0..eta).collect();
    let job = ShuffleJob { eta, n_orbitals, input_values: values };
    let wires = ShuffleWires::for_job(&job).expect("layout construction is infallible here");
    block_segments(&job, &wires)
        .iter()
        .map(|(_, c)| elementary_count(c))
        .sum()
}

/// Probability mass on basis states where `name` is not all-zeros, summed
/// directly so an exactly-clean register reports exactly 0.0.
fn exact_register_residual(state: &Statevector, name: &str) -> f64 {
    let span = state.layout().get(name).unwrap().qubits();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| extract_bits(*idx, span.clone()) != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Full pipeline: init, η−1 FY blocks, detangle. Choice is asserted to
/// have support exactly on all-zeros after every block, and index after
/// detangle; all gates are permutations or phases on the ancilla branch,
/// so the residuals are exact zeros, not just small.
pub fn shuffle_antisymmetrize(job: &ShuffleJob, _rng_seed: u64) -> Result<ShuffleResult, ShuffleError> {
    job.validate()?;
    let w = job.input_width();
    if job.eta == 1 {
        let layout = RegisterLayout::packed(&[("input", w, 1)]);
        let idx = insert_bits(0, layout.get("input")?.element_qubits(0), job.input_values[0]);
        let state = Statevector::basis(w, idx)?.with_layout(layout)?;
        return Ok(ShuffleResult {
            state,
            per_block: Vec::new(),
            total_gates: 0,
            resources: ResourceTally::default(),
            max_register_residual: 0.0,
        });
    }
    let wires = ShuffleWires::for_job(job)?;
    let n = wires.layout.total_span();
    if n > MAX_QUBITS {
        return Err(ShuffleError::TooManyQubits(n));
    }
    let mut state = Statevector::zero(n)?.with_layout(wires.layout.clone())?;
    let mut per_block = Vec::new();
    let mut resources = ResourceTally::default();
    let mut total_gates = 0;
    let mut max_residual = 0.0f64;
    for (label, segment) in block_segments(job, &wires) {
        state.run(&segment)?;
        if label.starts_with("fy_") {
            let residual = exact_register_residual(&state, "choice");
            max_residual = max_residual.max(residual);
            if residual != 0.0 {
                return Err(ShuffleError::Sim(SimError::Invalid(format!(
                    "choice register not reset after {label} (residual mass {residual:.3e})"
                ))));
            }
        }
        total_gates += elementary_count(&segment);
        resources.add(&segment.resource_tally);
        per_block.push(BlockTally {
            label,
            gates: elementary_count(&segment),
            tally: segment.resource_tally,
        });
    }
    for name in ["choice", "index"] {
        let residual = exact_register_residual(&state, name);
        max_residual = max_residual.max(residual);
        if residual != 0.0 {
            return Err(ShuffleError::Sim(SimError::Invalid(format!(
                "{name} register not reset after detangle (residual mass {residual:.3e})"
            ))));
        }
    }
    let mut input_state = state.extract_register("input", 0.0)?;
    canonicalize(&mut input_state, &job.input_values)?;
    Ok(ShuffleResult {
        state: input_state,
        per_block,
        total_gates,
        resources,
        max_register_residual: max_residual,
    })
}

/// Make the identity-ordering amplitude positive real (it already is by
/// the phase rule; this pins the convention against rounding).
fn canonicalize(state: &mut Statevector, values: &[usize]) -> Result<(), ShuffleError> {
    let reg = state.layout().get("input")?.clone();
    let mut idx = 0usize;
    for (p, &v) in values.iter().enumerate() {
        idx = insert_bits(idx, reg.element_qubits(p), v);
    }
    let amp = state.amplitudes()[idx];
    if amp.norm() < 1e-15 {
        return Err(ShuffleError::Sim(SimError::Invalid(
            "identity-ordering amplitude vanished".into(),
        )));
    }
    let correction = (amp / amp.norm()).conj();
    let amps: Vec<C64> = state.amplitudes().iter().map(|a| a * correction).collect();
    *state = Statevector::from_amplitudes(state.num_qubits(), amps)?
        .with_layout(state.layout().clone())?;
    Ok(())
}

/// Least-squares exponent a of gate count = c · s^a · log₂N over the grid,
/// with size variable s = √(η(η−1)): the pipeline enumerates ordered
/// pairs, and the geometric pair mean removes the finite-size −1 offset
/// that would otherwise dominate the log-slope at η ≤ 4.
pub fn scaling_fit_exponent(etas: &[usize], orbital_counts: &[usize]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &eta in etas {
        for &n in orbital_counts {
            let g = total_gate_count(eta, n) as f64;
            let w = (n as f64).log2();
            xs.push(((eta * (eta - 1)) as f64).sqrt().ln());
            ys.push((g / w).ln());
        }
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let var: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    cov / var
}
