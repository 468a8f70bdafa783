//! Exact dense statevector simulator and gate vocabulary.
//!
//! Every circuit in this crate runs on [`Statevector`], a flat array of
//! `2^n` complex amplitudes. Qubit 0 is the least significant bit of the
//! basis-state index. Named registers are described by a [`RegisterLayout`];
//! within a register, element 0 occupies the most significant qubits of the
//! register's span.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub type C64 = Complex64;

/// Hard cap on simulated qubits (2^26 amplitudes ≈ 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Norm drift allowed after unitary application.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("qubit index {0} out of range for {1}-qubit state")]
    QubitOutOfRange(usize, usize),
    #[error("gate controls and targets overlap on qubit {0}")]
    OverlappingWires(usize),
    #[error("{0} qubits exceeds the simulation cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("no register named '{0}' in layout")]
    UnknownRegister(String),
    #[error("register layout invalid: {0}")]
    BadLayout(String),
    #[error("projector gates are not allowed inside a circuit; use measure_register")]
    ProjectorInCircuit,
    #[error("projection removed all probability mass (state corrupted)")]
    ZeroProbabilityMass,
    #[error("{0}")]
    Invalid(String),
}

pub type SimResult<T> = Result<T, SimError>;

/// A named, contiguous block of qubits holding `element_count` integers of
/// `element_width` bits each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub element_width: usize,
    pub element_count: usize,
}

impl Register {
    pub fn span(&self) -> usize {
        self.element_width * self.element_count
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.span()
    }

    /// Qubit range of element `p`. Element 0 sits at the top of the span.
    pub fn element_qubits(&self, p: usize) -> std::ops::Range<usize> {
        assert!(p < self.element_count);
        let lo = self.start + (self.element_count - 1 - p) * self.element_width;
        lo..lo + self.element_width
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> SimResult<Self> {
        let layout = RegisterLayout { registers };
        layout.validate()?;
        Ok(layout)
    }

    /// Convenience constructor from `(name, width, count)` triples packed
    /// contiguously from qubit 0 upward.
    pub fn packed(specs: &[(&str, usize, usize)]) -> Self {
        let mut registers = Vec::new();
        let mut start = 0;
        for &(name, width, count) in specs {
            registers.push(Register {
                name: name.to_string(),
                start,
                element_width: width,
                element_count: count,
            });
            start += width * count;
        }
        RegisterLayout { registers }
    }

    fn validate(&self) -> SimResult<()> {
        let mut seen: Vec<std::ops::Range<usize>> = Vec::new();
        for r in &self.registers {
            if r.element_width == 0 || r.element_count == 0 {
                return Err(SimError::BadLayout(format!(
                    "register '{}' has zero width or count",
                    r.name
                )));
            }
            for s in &seen {
                if r.qubits().start < s.end && s.start < r.qubits().end {
                    return Err(SimError::BadLayout(format!(
                        "register '{}' overlaps another register",
                        r.name
                    )));
                }
            }
            seen.push(r.qubits());
        }
        Ok(())
    }

    pub fn total_span(&self) -> usize {
        self.registers.iter().map(|r| r.qubits().end).max().unwrap_or(0)
    }

    pub fn get(&self, name: &str) -> SimResult<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| SimError::UnknownRegister(name.to_string()))
    }
}

/// Control qubit with polarity (`value = false` means control-on-0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, value: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X { target: usize },
    H { target: usize },
    Swap { a: usize, b: usize },
    /// Real rotation [[cos θ, −sin θ], [sin θ, cos θ]].
    Rotation { target: usize, angle: f64 },
    /// diag(1, e^{iθ}).
    Phase { target: usize, angle: f64 },
    /// Z-basis projector onto `value`. Forbidden inside circuits.
    Projector { target: usize, value: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    #[serde(default)]
    pub controls: Vec<Control>,
    /// Marks the measurement-assisted uncompute half of a Toffoli/Fredkin
    /// pair; such gates contribute zero to the T tally.
    #[serde(default)]
    pub uncompute: bool,
}

impl GateOp {
    pub fn x(target: usize) -> Self {
        Self::bare(GateKind::X { target })
    }

    pub fn h(target: usize) -> Self {
        Self::bare(GateKind::H { target })
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::with_controls(GateKind::X { target }, vec![Control::on(control)])
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::with_controls(
            GateKind::X { target },
            vec![Control::on(c1), Control::on(c2)],
        )
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        Self::with_controls(GateKind::X { target }, controls)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::bare(GateKind::Swap { a, b })
    }

    pub fn fredkin(control: usize, a: usize, b: usize) -> Self {
        Self::with_controls(GateKind::Swap { a, b }, vec![Control::on(control)])
    }

    pub fn phase(target: usize, angle: f64) -> Self {
        Self::bare(GateKind::Phase { target, angle })
    }

    pub fn z(target: usize) -> Self {
        Self::phase(target, PI)
    }

    pub fn t(target: usize) -> Self {
        Self::phase(target, PI / 4.0)
    }

    pub fn controlled_phase(control: usize, target: usize, angle: f64) -> Self {
        Self::with_controls(GateKind::Phase { target, angle }, vec![Control::on(control)])
    }

    pub fn rotation(target: usize, angle: f64) -> Self {
        Self::bare(GateKind::Rotation { target, angle })
    }

    pub fn controlled_rotation(control: usize, target: usize, angle: f64) -> Self {
        Self::with_controls(
            GateKind::Rotation { target, angle },
            vec![Control::on(control)],
        )
    }

    pub fn projector(target: usize, value: bool) -> Self {
        Self::bare(GateKind::Projector { target, value })
    }

    fn bare(kind: GateKind) -> Self {
        GateOp { kind, controls: Vec::new(), uncompute: false }
    }

    pub fn with_controls(kind: GateKind, controls: Vec<Control>) -> Self {
        GateOp { kind, controls, uncompute: false }
    }

    pub fn as_uncompute(mut self) -> Self {
        self.uncompute = true;
        self
    }

    pub fn targets(&self) -> Vec<usize> {
        match self.kind {
            GateKind::X { target }
            | GateKind::H { target }
            | GateKind::Rotation { target, .. }
            | GateKind::Phase { target, .. }
            | GateKind::Projector { target, .. } => vec![target],
            GateKind::Swap { a, b } => vec![a, b],
        }
    }

    /// All qubits touched by the gate (targets and controls).
    pub fn wires(&self) -> Vec<usize> {
        let mut w = self.targets();
        w.extend(self.controls.iter().map(|c| c.qubit));
        w
    }

    pub fn is_projector(&self) -> bool {
        matches!(self.kind, GateKind::Projector { .. })
    }

    pub fn validate(&self, num_qubits: usize) -> SimResult<()> {
        let targets = self.targets();
        for &q in self.wires().iter() {
            if q >= num_qubits {
                return Err(SimError::QubitOutOfRange(q, num_qubits));
            }
        }
        for c in &self.controls {
            if targets.contains(&c.qubit) {
                return Err(SimError::OverlappingWires(c.qubit));
            }
        }
        if let GateKind::Swap { a, b } = self.kind {
            if a == b {
                return Err(SimError::OverlappingWires(a));
            }
        }
        let mut ctrl_qubits: Vec<usize> = self.controls.iter().map(|c| c.qubit).collect();
        ctrl_qubits.sort_unstable();
        ctrl_qubits.dedup();
        if ctrl_qubits.len() != self.controls.len() {
            return Err(SimError::Invalid("duplicate control qubit".into()));
        }
        Ok(())
    }

    /// Exact inverse gate. Panics on projectors, which have no inverse.
    pub fn inverse(&self) -> GateOp {
        let kind = match self.kind {
            GateKind::Rotation { target, angle } => GateKind::Rotation { target, angle: -angle },
            GateKind::Phase { target, angle } => GateKind::Phase { target, angle: -angle },
            GateKind::Projector { .. } => panic!("projector has no inverse"),
            ref k => k.clone(),
        };
        GateOp { kind, controls: self.controls.clone(), uncompute: self.uncompute }
    }
}

/// Fault-tolerant resource class of a single gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceClass {
    Clifford,
    T,
    Toffoli,
    Rotation,
}

fn angle_is_multiple_of(angle: f64, unit: f64) -> bool {
    let r = angle / unit;
    (r - r.round()).abs() < 1e-12
}

impl GateOp {
    /// Resource class, together with the logical Toffoli-equivalent count
    /// and T-gate cost under the 4-T Fredkin / 7-T Toffoli convention.
    /// Uncompute-tagged Toffoli-class gates cost 0 T (measurement-assisted).
    pub fn resource_cost(&self) -> (ResourceClass, u64, u64) {
        let nc = self.controls.len() as u64;
        match self.kind {
            GateKind::Projector { .. } => (ResourceClass::Clifford, 0, 0),
            GateKind::Rotation { .. } => (ResourceClass::Rotation, 0, 0),
            GateKind::H { .. } => {
                if nc == 0 {
                    (ResourceClass::Clifford, 0, 0)
                } else {
                    (ResourceClass::Rotation, 0, 0)
                }
            }
            GateKind::X { .. } => match nc {
                0 | 1 => (ResourceClass::Clifford, 0, 0),
                k => {
                    // k-controlled X compiles to k-1 Toffolis.
                    let tof = k - 1;
                    let t = if self.uncompute { 0 } else { 7 * tof };
                    (ResourceClass::Toffoli, tof, t)
                }
            },
            GateKind::Swap { .. } => match nc {
                0 => (ResourceClass::Clifford, 0, 0),
                k => {
                    // Fredkin: 4 T with a stored ancilla, 0 to uncompute.
                    let tof = k;
                    let t = if self.uncompute { 0 } else { 4 * tof };
                    (ResourceClass::Toffoli, tof, t)
                }
            },
            GateKind::Phase { angle, .. } => {
                if angle_is_multiple_of(angle, PI / 2.0) {
                    match nc {
                        0 | 1 => (ResourceClass::Clifford, 0, 0),
                        k => {
                            let tof = k - 1;
                            let t = if self.uncompute { 0 } else { 7 * tof };
                            (ResourceClass::Toffoli, tof, t)
                        }
                    }
                } else if nc == 0 && angle_is_multiple_of(angle, PI / 4.0) {
                    (ResourceClass::T, 0, 1)
                } else {
                    (ResourceClass::Rotation, 0, 0)
                }
            }
        }
    }
}

/// Gate counts by resource class plus greedy round depth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceTally {
    pub clifford: u64,
    pub t: u64,
    pub toffoli: u64,
    pub rotation: u64,
    pub depth_rounds: u64,
}

impl ResourceTally {
    pub fn from_ops(ops: &[GateOp]) -> Self {
        let mut tally = ResourceTally::default();
        // Greedy layering: a gate joins the earliest round after the last
        // round touching any of its wires.
        let mut last_round: std::collections::HashMap<usize, u64> = Default::default();
        for op in ops {
            let (class, tof, t) = op.resource_cost();
            match class {
                ResourceClass::Clifford => tally.clifford += 1,
                ResourceClass::T => {}
                ResourceClass::Toffoli => {}
                ResourceClass::Rotation => tally.rotation += 1,
            }
            tally.t += t;
            tally.toffoli += tof;
            let round = op
                .wires()
                .iter()
                .map(|q| last_round.get(q).copied().unwrap_or(0))
                .max()
                .unwrap_or(0)
                + 1;
            for q in op.wires() {
                last_round.insert(q, round);
            }
            tally.depth_rounds = tally.depth_rounds.max(round);
        }
        tally
    }

    pub fn add(&mut self, other: &ResourceTally) {
        self.clifford += other.clifford;
        self.t += other.t;
        self.toffoli += other.toffoli;
        self.rotation += other.rotation;
        self.depth_rounds += other.depth_rounds;
    }
}

/// Ordered gate list with a cached resource tally.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub ops: Vec<GateOp>,
    pub resource_tally: ResourceTally,
}

impl Circuit {
    pub fn new(ops: Vec<GateOp>) -> Self {
        let resource_tally = ResourceTally::from_ops(&ops);
        Circuit { ops, resource_tally }
    }

    pub fn empty() -> Self {
        Circuit::default()
    }

    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
        self.resource_tally = ResourceTally::from_ops(&self.ops);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.ops.extend(other.ops.iter().cloned());
        self.resource_tally = ResourceTally::from_ops(&self.ops);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn inverse(&self) -> Circuit {
        Circuit::new(self.ops.iter().rev().map(|op| op.inverse()).collect())
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.iter().flat_map(|op| op.wires()).max()
    }
}

impl FromIterator<GateOp> for Circuit {
    fn from_iter<T: IntoIterator<Item = GateOp>>(iter: T) -> Self {
        Circuit::new(iter.into_iter().collect())
    }
}

/// Dense complex statevector over `num_qubits` qubits.
#[derive(Debug, Clone)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<C64>,
    layout: RegisterLayout,
}

impl Statevector {
    /// All-zeros computational basis state.
    pub fn zero(num_qubits: usize) -> SimResult<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> SimResult<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(SimError::Invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps, layout: RegisterLayout::default() })
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> SimResult<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(num_qubits));
        }
        if amps.len() != 1usize << num_qubits {
            return Err(SimError::Invalid(format!(
                "amplitude array length {} does not match 2^{num_qubits}",
                amps.len()
            )));
        }
        Ok(Statevector { num_qubits, amps, layout: RegisterLayout::default() })
    }

    pub fn with_layout(mut self, layout: RegisterLayout) -> SimResult<Self> {
        layout.validate()?;
        if layout.total_span() > self.num_qubits {
            return Err(SimError::BadLayout("layout exceeds qubit count".into()));
        }
        self.layout = layout;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Value of register `name` in basis state `index`.
    pub fn register_value(&self, name: &str, index: usize) -> SimResult<usize> {
        let reg = self.layout.get(name)?;
        Ok(extract_bits(index, reg.qubits()))
    }

    /// Value of element `p` of register `name` in basis state `index`.
    pub fn element_value(&self, name: &str, p: usize, index: usize) -> SimResult<usize> {
        let reg = self.layout.get(name)?;
        Ok(extract_bits(index, reg.element_qubits(p)))
    }

    /// Apply a classical reversible map on basis states with an attached
    /// phase. `f` must be a bijection on `0..2^n`.
    pub fn map_basis(&mut self, f: impl Fn(usize) -> (usize, C64)) {
        let dim = self.amps.len();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (i, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (j, phase) = f(i);
            debug_assert!(out[j].norm_sqr() == 0.0, "map_basis image collision");
            out[j] = amp * phase;
        }
        self.amps = out;
    }

    fn controls_satisfied(index: usize, controls: &[Control]) -> bool {
        controls
            .iter()
            .all(|c| ((index >> c.qubit) & 1 == 1) == c.value)
    }

    /// Apply a single gate in place.
    pub fn apply(&mut self, op: &GateOp) -> SimResult<()> {
        op.validate(self.num_qubits)?;
        let dim = self.amps.len();
        match op.kind {
            GateKind::X { target } => {
                let bit = 1usize << target;
                for i in 0..dim {
                    if i & bit == 0 && Self::controls_satisfied(i, &op.controls) {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            GateKind::H { target } => {
                let bit = 1usize << target;
                for i in 0..dim {
                    if i & bit == 0 && Self::controls_satisfied(i, &op.controls) {
                        let a = self.amps[i];
                        let b = self.amps[i | bit];
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            GateKind::Swap { a, b } => {
                let (lo, hi) = (a.min(b), a.max(b));
                let (blo, bhi) = (1usize << lo, 1usize << hi);
                for i in 0..dim {
                    // Visit each index with bit lo set, bit hi clear.
                    if i & blo != 0 && i & bhi == 0 && Self::controls_satisfied(i, &op.controls) {
                        self.amps.swap(i, (i & !blo) | bhi);
                    }
                }
            }
            GateKind::Rotation { target, angle } => {
                let bit = 1usize << target;
                let (s, c) = angle.sin_cos();
                for i in 0..dim {
                    if i & bit == 0 && Self::controls_satisfied(i, &op.controls) {
                        let a = self.amps[i];
                        let b = self.amps[i | bit];
                        self.amps[i] = a * c - b * s;
                        self.amps[i | bit] = a * s + b * c;
                    }
                }
            }
            GateKind::Phase { target, angle } => {
                let bit = 1usize << target;
                let ph = C64::from_polar(1.0, angle);
                for i in 0..dim {
                    if i & bit != 0 && Self::controls_satisfied(i, &op.controls) {
                        self.amps[i] *= ph;
                    }
                }
            }
            GateKind::Projector { target, value } => {
                let bit = 1usize << target;
                let mut mass = 0.0;
                for i in 0..dim {
                    let keep = ((i & bit != 0) == value) && Self::controls_satisfied(i, &op.controls);
                    if keep {
                        mass += self.amps[i].norm_sqr();
                    } else {
                        self.amps[i] = C64::new(0.0, 0.0);
                    }
                }
                if mass < 1e-15 {
                    return Err(SimError::ZeroProbabilityMass);
                }
                let scale = 1.0 / mass.sqrt();
                for a in self.amps.iter_mut() {
                    *a *= scale;
                }
            }
        }
        Ok(())
    }

    /// Sequentially apply all gates of a circuit. Projectors are rejected.
    pub fn run(&mut self, circuit: &Circuit) -> SimResult<()> {
        if circuit.ops.iter().any(|op| op.is_projector()) {
            return Err(SimError::ProjectorInCircuit);
        }
        for op in &circuit.ops {
            self.apply(op)?;
        }
        Ok(())
    }

    /// Born-rule measurement of a whole register with a seeded generator.
    /// Returns the sampled outcome, the renormalized post-state, and the
    /// exact probability of that outcome.
    pub fn measure_register(
        &self,
        register: &str,
        rng_seed: u64,
    ) -> SimResult<(usize, Statevector, f64)> {
        let reg = self.layout.get(register)?.clone();
        let span = reg.qubits();
        let num_outcomes = 1usize << (span.end - span.start);
        let mut probs = vec![0.0f64; num_outcomes];
        for (i, amp) in self.amps.iter().enumerate() {
            probs[extract_bits(i, span.clone())] += amp.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        if total < 1e-15 {
            return Err(SimError::ZeroProbabilityMass);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| SimError::Invalid(format!("measurement weights: {e}")))?;
        let outcome = dist.sample(&mut rng);
        let prob = probs[outcome];
        let mut post = self.clone();
        let scale = 1.0 / prob.sqrt();
        for (i, amp) in post.amps.iter_mut().enumerate() {
            if extract_bits(i, span.clone()) == outcome {
                *amp *= scale;
            } else {
                *amp = C64::new(0.0, 0.0);
            }
        }
        Ok((outcome, post, prob))
    }

    /// Exact Born probability of `outcome` for a register, without sampling.
    pub fn outcome_probability(&self, register: &str, outcome: usize) -> SimResult<f64> {
        let reg = self.layout.get(register)?;
        let span = reg.qubits();
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| extract_bits(*i, span.clone()) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Number of Schmidt coefficients above `tolerance` for the bipartition
    /// (named registers) vs (everything else).
    pub fn schmidt_rank_across(&self, registers: &[&str], tolerance: f64) -> SimResult<usize> {
        let mut subset: Vec<usize> = Vec::new();
        for name in registers {
            subset.extend(self.layout.get(name)?.qubits());
        }
        subset.sort_unstable();
        subset.dedup();
        if subset.is_empty() || subset.len() >= self.num_qubits {
            return Err(SimError::Invalid(
                "schmidt cut must be a nonempty proper subset".into(),
            ));
        }
        let rest: Vec<usize> = (0..self.num_qubits).filter(|q| !subset.contains(q)).collect();
        let rows = 1usize << subset.len();
        let cols = 1usize << rest.len();
        let mut m = nalgebra::DMatrix::<C64>::zeros(rows, cols);
        for (i, amp) in self.amps.iter().enumerate() {
            let r = gather_bits(i, &subset);
            let c = gather_bits(i, &rest);
            m[(r, c)] = *amp;
        }
        let svd = m.svd(false, false);
        Ok(svd.singular_values.iter().filter(|s| **s > tolerance).count())
    }

    /// Amplitudes of the reduced factor on `registers`, sliced at the basis
    /// state of the complement with the largest probability. Only meaningful
    /// when the cut is a product state (Schmidt rank 1).
    pub fn factor_on(&self, registers: &[&str]) -> SimResult<Vec<C64>> {
        let mut subset: Vec<usize> = Vec::new();
        for name in registers {
            subset.extend(self.layout.get(name)?.qubits());
        }
        subset.sort_unstable();
        subset.dedup();
        let rest: Vec<usize> = (0..self.num_qubits).filter(|q| !subset.contains(q)).collect();
        let rows = 1usize << subset.len();
        let mut best_col = 0usize;
        let mut best_mass = -1.0;
        let mut col_mass: std::collections::HashMap<usize, f64> = Default::default();
        for (i, amp) in self.amps.iter().enumerate() {
            *col_mass.entry(gather_bits(i, &rest)).or_insert(0.0) += amp.norm_sqr();
        }
        for (c, mass) in col_mass {
            if mass > best_mass {
                best_mass = mass;
                best_col = c;
            }
        }
        let mut factor = vec![C64::new(0.0, 0.0); rows];
        for (i, amp) in self.amps.iter().enumerate() {
            if gather_bits(i, &rest) == best_col {
                factor[gather_bits(i, &subset)] = *amp;
            }
        }
        let norm: f64 = factor.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(SimError::ZeroProbabilityMass);
        }
        for a in factor.iter_mut() {
            *a /= norm;
        }
        Ok(factor)
    }

    /// Sub-state of a single register, requiring every other register to
    /// carry support only on all-zeros (residual mass below `tolerance`).
    /// The result is renormalized with the register moved to qubit 0.
    pub fn extract_register(&self, name: &str, tolerance: f64) -> SimResult<Statevector> {
        let reg = self.layout.get(name)?.clone();
        let span = reg.qubits();
        let width = span.end - span.start;
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << width];
        let mut residual = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let val = extract_bits(idx, span.clone());
            if idx == insert_bits(0, span.clone(), val) {
                amps[val] = *amp;
            } else {
                residual += amp.norm_sqr();
            }
        }
        if residual > tolerance {
            return Err(SimError::Invalid(format!(
                "register {name} is not separable from all-zeros context (residual mass {residual:.3e})"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(SimError::ZeroProbabilityMass);
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        let layout = RegisterLayout::new(vec![Register {
            name: reg.name.clone(),
            start: 0,
            element_width: reg.element_width,
            element_count: reg.element_count,
        }])?;
        Statevector::from_amplitudes(width, amps)?.with_layout(layout)
    }
}

/// Evaluate a purely classical reversible circuit (X / Swap with controls;
/// phases ignored) on a single basis state. Lets wide reversible circuits
/// be checked without allocating 2^n amplitudes.
pub fn classical_eval(circuit: &Circuit, mut index: usize) -> SimResult<usize> {
    for op in &circuit.ops {
        let fired = op
            .controls
            .iter()
            .all(|c| ((index >> c.qubit) & 1 == 1) == c.value);
        if !fired {
            continue;
        }
        match op.kind {
            GateKind::X { target } => index ^= 1usize << target,
            GateKind::Swap { a, b } => {
                let (ba, bb) = ((index >> a) & 1, (index >> b) & 1);
                if ba != bb {
                    index ^= (1usize << a) | (1usize << b);
                }
            }
            GateKind::Phase { .. } => {}
            _ => {
                return Err(SimError::Invalid(format!(
                    "gate {:?} is not classical",
                    op.kind
                )))
            }
        }
    }
    Ok(index)
}

/// Read a contiguous qubit range of a basis index as an integer.
pub fn extract_bits(index: usize, range: std::ops::Range<usize>) -> usize {
    (index >> range.start) & ((1usize << (range.end - range.start)) - 1)
}

/// Write `value` into a contiguous qubit range of a basis index.
pub fn insert_bits(index: usize, range: std::ops::Range<usize>, value: usize) -> usize {
    let mask = ((1usize << (range.end - range.start)) - 1) << range.start;
    (index & !mask) | ((value << range.start) & mask)
}

fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    let mut out = 0;
    for (pos, &q) in qubits.iter().enumerate() {
        out |= ((index >> q) & 1) << pos;
    }
    out
}

/// |⟨a|b⟩|² for two amplitude arrays of equal length.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr()
}
