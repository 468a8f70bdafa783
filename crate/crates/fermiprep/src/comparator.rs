//! Reversible comparison oracles and full quantum comparators.
//!
//! The comparison oracle computes `q ^= [A > B]` for two d-bit registers,
//! restoring A, B, and all scratch ancillas. The parallel variant merges
//! bit pairs with Compare2 blocks for O(log d) depth and a T-count of
//! 8d + O(1) under the 4-T Fredkin convention. The full comparator chains
//! the oracle with a fan-out-parallelized controlled register swap, mapping
//! basis states (A, B, 0) to (min, max, [A > B]).

use crate::sim::{Circuit, Control, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OracleVariant {
    /// Bit-by-bit scan from the most significant bit, O(d) depth.
    Sequential,
    /// Compare2 merge tree, O(log d) depth.
    Parallel,
}

/// Comparison oracle with its wire assignments.
#[derive(Debug, Clone)]
pub struct ComparisonOracle {
    pub circuit: Circuit,
    pub num_qubits: usize,
    /// A register wires, least significant first.
    pub a: Vec<usize>,
    /// B register wires, least significant first.
    pub b: Vec<usize>,
    /// Output qubit receiving `q ^= [A > B]`.
    pub q: usize,
    /// Scratch wires; restored to their input values.
    pub scratch: Vec<usize>,
    pub variant: OracleVariant,
}

/// Oracle + swap circuits over a shared wire space.
#[derive(Debug, Clone)]
pub struct ComparatorCircuitBundle {
    pub oracle_circuit: Circuit,
    pub swap_circuit: Circuit,
    pub full_comparator: Circuit,
    pub num_qubits: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Record qubit left holding [A > B].
    pub record: usize,
    pub ancilla_count: usize,
    pub variant: OracleVariant,
}

/// Compare2: reduce a pair of 2-bit integers to a pair of single bits
/// preserving sign(x − y). Wires: [x0, x1, y0, y1, t]; outputs land on
/// x0 and y0; x1, y1, t are temps kept for later uncomputation.
#[derive(Debug, Clone)]
pub struct Compare2Circuit {
    pub circuit: Circuit,
    pub x_out: usize,
    pub y_out: usize,
    pub temps: Vec<usize>,
}

pub fn build_compare2() -> Compare2Circuit {
    let (x0, x1, y0, y1, t) = (0, 1, 2, 3, 4);
    Compare2Circuit {
        circuit: compare2_ops(x0, x1, y0, y1, t).into_iter().collect(),
        x_out: x0,
        y_out: y0,
        temps: vec![x1, y1, t],
    }
}

/// Compare2 gate sequence on explicit wires. `t` holds x1 ⊕ y1 afterward;
/// the Fredkins route the deciding bit pair onto (x0, y0).
fn compare2_ops(x0: usize, x1: usize, y0: usize, y1: usize, t: usize) -> Vec<GateOp> {
    vec![
        GateOp::cnot(x1, t),
        GateOp::cnot(y1, t),
        GateOp::fredkin(t, x0, x1),
        GateOp::fredkin(t, y0, y1),
    ]
}

/// Flag circuit from the final comparison bit pair (a, b): sets exactly one
/// of equal / ascending / descending. Wires: [a, b, eq, asc, desc].
pub fn build_compare_finish() -> Circuit {
    let (a, b, eq, asc, desc) = (0, 1, 2, 3, 4);
    Circuit::new(vec![
        GateOp::x(eq),
        GateOp::cnot(a, eq),
        GateOp::cnot(b, eq),
        GateOp::mcx(vec![Control::off(a), Control::on(b)], asc),
        GateOp::mcx(vec![Control::on(a), Control::off(b)], desc),
    ])
}

/// Comparison oracle on a standard wire layout:
/// A = 0..d, B = d..2d, q = 2d, scratch above.
pub fn build_comparison_oracle(d: usize, variant: OracleVariant) -> ComparisonOracle {
    assert!(d >= 1);
    let a: Vec<usize> = (0..d).collect();
    let b: Vec<usize> = (d..2 * d).collect();
    let q = 2 * d;
    let scratch_base = 2 * d + 1;
    let scratch_count = oracle_scratch_count(d, variant);
    let scratch: Vec<usize> = (scratch_base..scratch_base + scratch_count).collect();
    let circuit = build_comparison_oracle_on(&a, &b, q, &scratch, variant);
    ComparisonOracle {
        circuit,
        num_qubits: scratch_base + scratch_count,
        a,
        b,
        q,
        scratch,
        variant,
    }
}

/// Scratch wires needed by [`build_comparison_oracle_on`] for width `d`.
pub fn oracle_scratch_count(d: usize, variant: OracleVariant) -> usize {
    match variant {
        OracleVariant::Sequential => 2 * d,
        OracleVariant::Parallel => {
            let dp = d.next_power_of_two();
            // Zero pads for A and B up to dp bits, plus one t per Compare2.
            2 * (dp - d) + (dp - 1)
        }
    }
}

/// Comparison oracle on caller-chosen wires. `a` and `b` are LSB-first;
/// scratch must hold [`oracle_scratch_count`] zero-initialized wires and is
/// restored. The computed result is copied to `q`, then everything else is
/// uncomputed.
pub fn build_comparison_oracle_on(
    a: &[usize],
    b: &[usize],
    q: usize,
    scratch: &[usize],
    variant: OracleVariant,
) -> Circuit {
    let d = a.len();
    assert_eq!(d, b.len());
    assert!(d >= 1);
    assert!(scratch.len() >= oracle_scratch_count(d, variant));
    match variant {
        OracleVariant::Sequential => sequential_oracle(a, b, q, scratch),
        OracleVariant::Parallel => parallel_oracle(a, b, q, scratch),
    }
}

fn sequential_oracle(a: &[usize], b: &[usize], q: usize, scratch: &[usize]) -> Circuit {
    let d = a.len();
    let gt = &scratch[0..d]; // gt[i]: A > B decided within the top i+1 bits
    let lt = &scratch[d..2 * d];
    let mut compute: Vec<GateOp> = Vec::new();
    // Scan from the most significant bit down.
    let msb = d - 1;
    compute.push(GateOp::mcx(
        vec![Control::on(a[msb]), Control::off(b[msb])],
        gt[0],
    ));
    compute.push(GateOp::mcx(
        vec![Control::off(a[msb]), Control::on(b[msb])],
        lt[0],
    ));
    for lvl in 1..d {
        let bit = d - 1 - lvl;
        compute.push(GateOp::cnot(gt[lvl - 1], gt[lvl]));
        compute.push(GateOp::mcx(
            vec![
                Control::off(gt[lvl - 1]),
                Control::off(lt[lvl - 1]),
                Control::on(a[bit]),
                Control::off(b[bit]),
            ],
            gt[lvl],
        ));
        compute.push(GateOp::cnot(lt[lvl - 1], lt[lvl]));
        compute.push(GateOp::mcx(
            vec![
                Control::off(gt[lvl - 1]),
                Control::off(lt[lvl - 1]),
                Control::off(a[bit]),
                Control::on(b[bit]),
            ],
            lt[lvl],
        ));
    }
    let mut ops = compute.clone();
    ops.push(GateOp::cnot(gt[d - 1], q));
    ops.extend(compute.iter().rev().map(|op| op.inverse().as_uncompute()));
    Circuit::new(ops)
}

fn parallel_oracle(a: &[usize], b: &[usize], q: usize, scratch: &[usize]) -> Circuit {
    let d = a.len();
    let dp = d.next_power_of_two();
    let mut scratch_iter = scratch.iter().copied();
    // Pad to a power of two with zero-initialized most significant bits.
    let mut xa: Vec<usize> = a.to_vec();
    let mut xb: Vec<usize> = b.to_vec();
    for _ in d..dp {
        xa.push(scratch_iter.next().expect("pad scratch"));
    }
    for _ in d..dp {
        xb.push(scratch_iter.next().expect("pad scratch"));
    }
    let mut compute: Vec<GateOp> = Vec::new();
    while xa.len() > 1 {
        let mut next_a = Vec::with_capacity(xa.len() / 2);
        let mut next_b = Vec::with_capacity(xa.len() / 2);
        for i in 0..xa.len() / 2 {
            let t = scratch_iter.next().expect("t scratch");
            compute.extend(compare2_ops(xa[2 * i], xa[2 * i + 1], xb[2 * i], xb[2 * i + 1], t));
            next_a.push(xa[2 * i]);
            next_b.push(xb[2 * i]);
        }
        xa = next_a;
        xb = next_b;
    }
    let mut ops = compute.clone();
    ops.push(GateOp::mcx(
        vec![Control::on(xa[0]), Control::off(xb[0])],
        q,
    ));
    ops.extend(compute.iter().rev().map(|op| op.inverse().as_uncompute()));
    Circuit::new(ops)
}

/// Controlled swap of two d-bit registers with its wire assignments.
#[derive(Debug, Clone)]
pub struct ControlledSwap {
    pub circuit: Circuit,
    pub num_qubits: usize,
    pub control: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub ancillas: Vec<usize>,
}

/// Swap registers A and B iff the control qubit is 1. With `fanout` the
/// control is copied to d−1 ancillas by a CNOT tree so all Fredkins run in
/// parallel (O(log d) depth); without, the Fredkins share one control.
pub fn build_controlled_register_swap(d: usize, fanout: bool) -> ControlledSwap {
    assert!(d >= 1);
    let control = 0;
    let a: Vec<usize> = (1..=d).collect();
    let b: Vec<usize> = (d + 1..=2 * d).collect();
    let ancillas: Vec<usize> = if fanout {
        (2 * d + 1..3 * d).collect()
    } else {
        Vec::new()
    };
    let circuit = build_controlled_register_swap_on(control, &a, &b, &ancillas, fanout);
    ControlledSwap {
        circuit,
        num_qubits: 2 * d + 1 + ancillas.len(),
        control,
        a,
        b,
        ancillas,
    }
}

pub fn build_controlled_register_swap_on(
    control: usize,
    a: &[usize],
    b: &[usize],
    ancillas: &[usize],
    fanout: bool,
) -> Circuit {
    let d = a.len();
    assert_eq!(d, b.len());
    let mut ops: Vec<GateOp> = Vec::new();
    if fanout && d > 1 {
        assert!(ancillas.len() >= d - 1);
        // Doubling CNOT tree: each round every live copy seeds a new one.
        let mut copies = vec![control];
        let mut tree: Vec<GateOp> = Vec::new();
        while copies.len() < d {
            let take = copies.len().min(d - copies.len());
            let used = copies.len() - 1;
            for k in 0..take {
                tree.push(GateOp::cnot(copies[k], ancillas[used + k]));
                copies.push(ancillas[used + k]);
            }
        }
        ops.extend(tree.iter().cloned());
        for k in 0..d {
            ops.push(GateOp::fredkin(copies[k], a[k], b[k]));
        }
        ops.extend(tree.iter().rev().map(|op| op.inverse().as_uncompute()));
    } else {
        for k in 0..d {
            ops.push(GateOp::fredkin(control, a[k], b[k]));
        }
    }
    Circuit::new(ops)
}

/// Oracle followed by a fan-out controlled swap: (A, B, 0) → (min, max,
/// [A > B]) with all scratch restored.
pub fn build_full_comparator(d: usize) -> ComparatorCircuitBundle {
    assert!(d >= 1);
    let variant = OracleVariant::Parallel;
    let a: Vec<usize> = (0..d).collect();
    let b: Vec<usize> = (d..2 * d).collect();
    let record = 2 * d;
    let oracle_scratch: Vec<usize> =
        (2 * d + 1..2 * d + 1 + oracle_scratch_count(d, variant)).collect();
    let fan_base = 2 * d + 1 + oracle_scratch.len();
    let fan: Vec<usize> = (fan_base..fan_base + d.saturating_sub(1)).collect();
    let oracle_circuit = build_comparison_oracle_on(&a, &b, record, &oracle_scratch, variant);
    let swap_circuit = build_controlled_register_swap_on(record, &a, &b, &fan, true);
    let mut full = oracle_circuit.clone();
    full.extend(&swap_circuit);
    let num_qubits = fan_base + fan.len();
    ComparatorCircuitBundle {
        oracle_circuit,
        swap_circuit,
        full_comparator: full,
        num_qubits,
        a,
        b,
        record,
        ancilla_count: oracle_scratch.len() + fan.len(),
        variant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Statevector;

    /// Run a circuit on the basis state with the given wire values. Small
    /// circuits go through the statevector; wide ones through the classical
    /// evaluator (these circuits are all classical reversible).
    fn run_basis(circuit: &Circuit, num_qubits: usize, bits: &[(usize, usize)]) -> usize {
        let mut index = 0usize;
        for &(wire, val) in bits {
            index |= (val & 1) << wire;
        }
        if num_qubits > 20 {
            return crate::sim::classical_eval(circuit, index).unwrap();
        }
        let mut s = Statevector::basis(num_qubits, index).unwrap();
        s.run(circuit).unwrap();
        let out = s
            .amplitudes()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
            .unwrap();
        assert!(out.1.norm_sqr() > 1.0 - 1e-9, "state not a basis state");
        out.0
    }

    fn set_register(bits: &mut Vec<(usize, usize)>, wires: &[usize], value: usize) {
        for (k, &w) in wires.iter().enumerate() {
            bits.push((w, (value >> k) & 1));
        }
    }

    fn oracle_output(oracle: &ComparisonOracle, av: usize, bv: usize) -> (usize, usize, usize) {
        let mut bits = Vec::new();
        set_register(&mut bits, &oracle.a, av);
        set_register(&mut bits, &oracle.b, bv);
        let out = run_basis(&oracle.circuit, oracle.num_qubits, &bits);
        let read = |wires: &[usize]| -> usize {
            wires.iter().enumerate().map(|(k, &w)| ((out >> w) & 1) << k).sum()
        };
        (read(&oracle.a), read(&oracle.b), (out >> oracle.q) & 1)
    }

    #[test]
    fn compare2_truth_table() {
        let c2 = build_compare2();
        for x in 0..4usize {
            for y in 0..4usize {
                let bits = vec![
                    (0, x & 1),
                    (1, (x >> 1) & 1),
                    (2, y & 1),
                    (3, (y >> 1) & 1),
                ];
                let out = run_basis(&c2.circuit, 5, &bits);
                let xp = (out >> c2.x_out) & 1;
                let yp = (out >> c2.y_out) & 1;
                assert_eq!(
                    (xp as i64 - yp as i64).signum(),
                    (x as i64 - y as i64).signum(),
                    "x={x} y={y}"
                );
            }
        }
    }

    #[test]
    fn compare_finish_flags() {
        let c = build_compare_finish();
        for (a, b, expect) in [(0, 0, "eq"), (0, 1, "asc"), (1, 0, "desc"), (1, 1, "eq")] {
            let out = run_basis(&c, 5, &[(0, a), (1, b)]);
            let eq = (out >> 2) & 1;
            let asc = (out >> 3) & 1;
            let desc = (out >> 4) & 1;
            assert_eq!(eq + asc + desc, 1, "exactly one flag for ({a},{b})");
            let got = if eq == 1 { "eq" } else if asc == 1 { "asc" } else { "desc" };
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn oracle_nine_bit_example() {
        // 9-bit comparison of 21 vs 14.
        let oracle = build_comparison_oracle(9, OracleVariant::Parallel);
        let (a, b, q) = oracle_output(&oracle, 21, 14);
        assert_eq!((a, b, q), (21, 14, 1));
    }

    #[test]
    fn oracle_equal_inputs() {
        for variant in [OracleVariant::Sequential, OracleVariant::Parallel] {
            let oracle = build_comparison_oracle(3, variant);
            let (a, b, q) = oracle_output(&oracle, 5, 5);
            assert_eq!((a, b, q), (5, 5, 0));
        }
    }

    #[test]
    fn oracle_exhaustive_small_widths() {
        for variant in [OracleVariant::Sequential, OracleVariant::Parallel] {
            for d in 1..=4usize {
                let oracle = build_comparison_oracle(d, variant);
                for av in 0..(1usize << d) {
                    for bv in 0..(1usize << d) {
                        let (a, b, q) = oracle_output(&oracle, av, bv);
                        assert_eq!(
                            (a, b, q),
                            (av, bv, (av > bv) as usize),
                            "d={d} {variant:?} A={av} B={bv}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_randomized_restoration_d8() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for variant in [OracleVariant::Sequential, OracleVariant::Parallel] {
            let oracle = build_comparison_oracle(8, variant);
            for _ in 0..200 {
                let av = rng.gen_range(0..256usize);
                let bv = rng.gen_range(0..256usize);
                let (a, b, q) = oracle_output(&oracle, av, bv);
                assert_eq!((a, b, q), (av, bv, (av > bv) as usize));
            }
        }
    }

    #[test]
    fn controlled_swap_semantics() {
        let sw = build_controlled_register_swap(3, true);
        let read = |out: usize, wires: &[usize]| -> usize {
            wires.iter().enumerate().map(|(k, &w)| ((out >> w) & 1) << k).sum()
        };
        let mut bits = vec![(sw.control, 1)];
        set_register(&mut bits, &sw.a, 5);
        set_register(&mut bits, &sw.b, 2);
        let out = run_basis(&sw.circuit, sw.num_qubits, &bits);
        assert_eq!((read(out, &sw.a), read(out, &sw.b)), (2, 5));
        for &anc in &sw.ancillas {
            assert_eq!((out >> anc) & 1, 0);
        }
        // Control off: unchanged.
        let mut bits = vec![(sw.control, 0)];
        set_register(&mut bits, &sw.a, 5);
        set_register(&mut bits, &sw.b, 2);
        let out = run_basis(&sw.circuit, sw.num_qubits, &bits);
        assert_eq!((read(out, &sw.a), read(out, &sw.b)), (5, 2));
    }

    #[test]
    fn swap_variants_agree_d4() {
        let fan = build_controlled_register_swap(4, true);
        let seq = build_controlled_register_swap(4, false);
        for ctrl in 0..2usize {
            for av in 0..16usize {
                for bv in 0..16usize {
                    let read = |sw: &ControlledSwap| -> (usize, usize) {
                        let mut bits = vec![(sw.control, ctrl)];
                        set_register(&mut bits, &sw.a, av);
                        set_register(&mut bits, &sw.b, bv);
                        let out = run_basis(&sw.circuit, sw.num_qubits, &bits);
                        let rd = |wires: &[usize]| -> usize {
                            wires.iter().enumerate().map(|(k, &w)| ((out >> w) & 1) << k).sum()
                        };
                        (rd(&sw.a), rd(&sw.b))
                    };
                    assert_eq!(read(&fan), read(&seq));
                }
            }
        }
    }

    #[test]
    fn full_comparator_exhaustive_d2() {
        let bundle = build_full_comparator(2);
        for av in 0..4usize {
            for bv in 0..4usize {
                let mut bits = Vec::new();
                set_register(&mut bits, &bundle.a, av);
                set_register(&mut bits, &bundle.b, bv);
                let out = run_basis(&bundle.full_comparator, bundle.num_qubits, &bits);
                let rd = |wires: &[usize]| -> usize {
                    wires.iter().enumerate().map(|(k, &w)| ((out >> w) & 1) << k).sum()
                };
                assert_eq!(rd(&bundle.a), av.min(bv), "A={av} B={bv}");
                assert_eq!(rd(&bundle.b), av.max(bv), "A={av} B={bv}");
                assert_eq!((out >> bundle.record) & 1, (av > bv) as usize);
            }
        }
    }

    #[test]
    fn full_comparator_reversible() {
        let bundle = build_full_comparator(2);
        let inverse = bundle.full_comparator.inverse();
        let mut s = Statevector::zero(bundle.num_qubits).unwrap();
        // Random-ish superposition over A and B.
        for w in bundle.a.iter().chain(bundle.b.iter()) {
            s.apply(&GateOp::h(*w)).unwrap();
        }
        let before = s.amplitudes().to_vec();
        s.run(&bundle.full_comparator).unwrap();
        s.run(&inverse).unwrap();
        for (x, y) in s.amplitudes().iter().zip(before.iter()) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn parallel_t_count_is_8d_minus_1() {
        for d in [2usize, 4, 8, 16] {
            let oracle = build_comparison_oracle(d, OracleVariant::Parallel);
            assert_eq!(oracle.circuit.resource_tally.t, 8 * d as u64 - 1);
        }
    }

    #[test]
    fn parallel_t_count_fits_slope_8() {
        let ds = [2f64, 4.0, 8.0, 16.0];
        let ts: Vec<f64> = ds
            .iter()
            .map(|&d| {
                build_comparison_oracle(d as usize, OracleVariant::Parallel)
                    .circuit
                    .resource_tally
                    .t as f64
            })
            .collect();
        let slope = linear_slope(&ds, &ts);
        assert!((slope - 8.0).abs() < 0.5, "slope {slope}");
    }

    #[test]
    fn parallel_depth_is_logarithmic() {
        // Depth must fit a·log2(d) + b over d ∈ {2,4,8,16,32}.
        let ds = [2usize, 4, 8, 16, 32];
        let depths: Vec<f64> = ds
            .iter()
            .map(|&d| {
                build_comparison_oracle(d, OracleVariant::Parallel)
                    .circuit
                    .resource_tally
                    .depth_rounds as f64
            })
            .collect();
        let logs: Vec<f64> = ds.iter().map(|&d| (d as f64).log2()).collect();
        let slope = linear_slope(&logs, &depths);
        let intercept = mean(&depths) - slope * mean(&logs);
        for (l, d) in logs.iter().zip(depths.iter()) {
            let fit = slope * l + intercept;
            assert!(
                (fit - d).abs() < 0.35 * d.max(1.0),
                "depth {d} poorly fit by {fit} at log2 d = {l}"
            );
        }
        // Sub-linear growth: doubling d must not double the depth.
        for w in depths.windows(2) {
            assert!(w[1] < 1.8 * w[0]);
        }
    }

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let mx = mean(xs);
        let my = mean(ys);
        let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }
}
