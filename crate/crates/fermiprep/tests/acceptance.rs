//! Acceptance gate: one criterion per test, each printing a single
//! PASS/FAIL line with the measured quantity.

use fermiprep::antisym::{
    antisymmetrize, collision_probability_bound, delete_collisions, exact_collision_probability,
    reference_antisymmetric_state, sort_seed, AntisymJob,
};
use fermiprep::comparator::{build_comparison_oracle, OracleVariant};
use fermiprep::network::{generate, verify_zero_one};
use fermiprep::phase::{
    aggregate_runs, chi_squared_p_value, end_to_end_ground_state, iterative_phase_estimation,
    naive_analytic_cost, recover_energy, rejection_analytic_cost, water_stretched, CostModelParams,
    CVector,
};
use fermiprep::qubitize::{
    build_qubiterate, error_propagation, pauli_matrix, random_unitary, spectral_check,
    unitary_eigenpairs, LcuHamiltonian,
};
use fermiprep::shuffle::{scaling_fit_exponent, shuffle_antisymmetrize, ShuffleJob};
use fermiprep::sim::{fidelity, GateOp, RegisterLayout, Statevector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

fn report(criterion: usize, name: &str, pass: bool, detail: String) {
    println!(
        "acceptance {criterion:2} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn ascending_subsets(n: usize, eta: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=(n - left) {
            cur.push(v);
            rec(v + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, eta, &mut Vec::new(), &mut out);
    out
}

fn xz_half() -> LcuHamiltonian {
    LcuHamiltonian::new(
        vec![0.5, 0.5],
        vec![pauli_matrix("X").unwrap(), pauli_matrix("Z").unwrap()],
    )
    .unwrap()
}

#[test]
fn criterion_01_antisym_fidelity() {
    let mut worst = 1.0f64;
    let mut cases = 0;
    for eta in 1..=3usize {
        let f = (eta * eta).max(2).next_power_of_two();
        for n in [4usize, 8] {
            for values in ascending_subsets(n, eta) {
                let network = generate("bitonic", eta).unwrap();
                let job = AntisymJob::new(eta, n, f, network, values.clone()).unwrap();
                let out = antisymmetrize(&job, 42).unwrap();
                let reference = reference_antisymmetric_state(eta, n, &values).unwrap();
                let fid = fidelity(out.state.amplitudes(), reference.amplitudes());
                worst = worst.min(fid);
                cases += 1;
            }
        }
    }
    report(
        1,
        "antisym-fidelity",
        worst >= 1.0 - 1e-10,
        format!("{cases} cases, worst fidelity deficit {:.3e}", 1.0 - worst),
    );
}

#[test]
fn criterion_02_collision_bound() {
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_bound = f64::NEG_INFINITY;
    for eta in 2..=5usize {
        for f in [eta * eta, 2 * eta * eta, 4 * eta * eta] {
            let f = f.next_power_of_two();
            let exact = exact_collision_probability(eta, f);
            let bound = collision_probability_bound(eta, f);
            max_excess = max_excess.max(exact - bound);
            max_bound = max_bound.max(bound);
        }
    }
    report(
        2,
        "collision-bound",
        max_excess <= 1e-12 && max_bound < 0.5 + 1e-12,
        format!("max exact-bound {max_excess:.3e}, max bound {max_bound:.6}"),
    );
}

#[test]
fn criterion_03_seed_record_product() {
    let mut max_rank = 0;
    for eta in 2..=3usize {
        let f = (eta * eta).next_power_of_two();
        let w = (f as f64).log2() as usize;
        let network = generate("bitonic", eta).unwrap();
        let c = network.comparator_count();
        let layout = RegisterLayout::packed(&[("seed", w, eta), ("record", 1, c), ("flag", 1, 1)]);
        let seed_reg = layout.get("seed").unwrap().clone();
        let mut s = Statevector::zero(layout.total_span())
            .unwrap()
            .with_layout(layout)
            .unwrap();
        for q in seed_reg.qubits() {
            s.apply(&GateOp::h(q)).unwrap();
        }
        sort_seed(&mut s, &network).unwrap();
        let mut out = delete_collisions(&mut s, 3).unwrap();
        let mut tries = 0;
        while !out.success && tries < 16 {
            tries += 1;
            out = delete_collisions(&mut s, 3 + tries).unwrap();
        }
        assert!(out.success);
        let rank = out.state.schmidt_rank_across(&["seed", "flag"], 1e-10).unwrap();
        max_rank = max_rank.max(rank);
    }
    report(
        3,
        "seed-record-product",
        max_rank == 1,
        format!("max Schmidt rank {max_rank} across seed/record cut"),
    );
}

#[test]
fn criterion_04_comparator_t_slope() {
    let widths = [2usize, 4, 8, 16];
    let counts: Vec<f64> = widths
        .iter()
        .map(|&d| build_comparison_oracle(d, OracleVariant::Parallel).circuit.resource_tally.t as f64)
        .collect();
    let n = widths.len() as f64;
    let sx: f64 = widths.iter().map(|&d| d as f64).sum();
    let sy: f64 = counts.iter().sum();
    let sxx: f64 = widths.iter().map(|&d| (d * d) as f64).sum();
    let sxy: f64 = widths.iter().zip(&counts).map(|(&d, &t)| d as f64 * t).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    report(
        4,
        "comparator-t-slope",
        (slope - 8.0).abs() <= 0.5,
        format!("T-counts {counts:?} over d={widths:?}, slope {slope:.4}"),
    );
}

#[test]
fn criterion_05_network_zero_one() {
    let mut all_ok = true;
    for family in ["bitonic", "odd-even-mergesort"] {
        for wires in 2..=12usize {
            let schedule = generate(family, wires).unwrap();
            all_ok &= verify_zero_one(&schedule).unwrap();
        }
    }
    let b8 = generate("bitonic", 8).unwrap();
    let shape_ok = b8.comparator_count() == 24 && b8.depth() == 6;
    report(
        5,
        "network-zero-one",
        all_ok && shape_ok,
        format!(
            "0-1 verified up to 12 wires: {all_ok}; bitonic-8 {} comparators / {} rounds",
            b8.comparator_count(),
            b8.depth()
        ),
    );
}

#[test]
fn criterion_06_shuffle_equivalence() {
    let mut worst = 1.0f64;
    let mut max_residual = 0.0f64;
    let mut cases = 0;
    for eta in 1..=3usize {
        for n in [4usize, 8] {
            for values in ascending_subsets(n, eta) {
                let job = ShuffleJob::new(eta, n, values.clone()).unwrap();
                let out = shuffle_antisymmetrize(&job, 7).unwrap();
                let f = (eta * eta).max(2).next_power_of_two();
                let network = generate("bitonic", eta).unwrap();
                let ajob = AntisymJob::new(eta, n, f, network, values.clone()).unwrap();
                let aout = antisymmetrize(&ajob, 7).unwrap();
                worst = worst.min(fidelity(out.state.amplitudes(), aout.state.amplitudes()));
                max_residual = max_residual.max(out.max_register_residual);
                cases += 1;
            }
        }
    }
    let exponent = scaling_fit_exponent(&[2, 3, 4], &[8, 8, 8]);
    let pass = worst >= 1.0 - 1e-10 && max_residual < 1e-12 && (1.8..=2.2).contains(&exponent);
    report(
        6,
        "shuffle-equivalence",
        pass,
        format!(
            "{cases} cases, worst fidelity deficit {:.3e}, max register residual {max_residual:.1e}, scaling exponent {exponent:.3}",
            1.0 - worst
        ),
    );
}

#[test]
fn criterion_07_qubitization_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut max_err = 0.0f64;
    for _ in 0..50 {
        let dim = if rng.gen::<bool>() { 2 } else { 4 };
        let nterms = rng.gen_range(1..=4usize);
        let coefficients: Vec<f64> = (0..nterms).map(|_| rng.gen_range(0.1..1.0)).collect();
        let terms: Vec<_> = (0..nterms).map(|_| random_unitary(dim, &mut rng)).collect();
        let lcu = LcuHamiltonian::new(coefficients, terms).unwrap();
        let rep = spectral_check(&lcu).unwrap();
        max_err = max_err.max(rep.max_abs_error);
    }
    report(
        7,
        "qubitization-spectrum",
        max_err < 1e-9,
        format!("50 random LCUs, max eigenvalue recovery error {max_err:.3e}"),
    );
}

#[test]
fn criterion_08_phase_estimation_pipeline() {
    let lcu = xz_half();
    let initial = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let params = CostModelParams {
        alpha0: 0.854,
        e0: -FRAC_1_SQRT_2,
        e1: FRAC_1_SQRT_2,
        e_star: FRAC_1_SQRT_2,
        e0_bound: -0.5,
        epsilon_f: 0.01,
        use_amplitude_amplification: false,
        e1_bound: None,
    };
    let run = end_to_end_ground_state(&lcu, &initial, &params, 10, 23).unwrap();
    let resolution = TAU * 1.0 / 1024.0;
    let energy_err = (run.energy_estimate + FRAC_1_SQRT_2).abs();

    // Born-rule collapse statistics over the two energy sectors.
    let q = build_qubiterate(&lcu).unwrap();
    let mut embedded = CVector::zeros(4);
    embedded[0] = C64::new(1.0, 0.0);
    let mut expected = [0.0f64; 2];
    for (ev, vec) in unitary_eigenpairs(&q.w) {
        expected[usize::from(recover_energy(ev.arg(), q.lambda) > 0.0)] +=
            vec.dotc(&embedded).norm_sqr();
    }
    let samples = 2000u64;
    let mut observed = [0u64; 2];
    for seed in 0..samples {
        let (phase, _) = iterative_phase_estimation(&q.w, &embedded, 8, 5000 + seed);
        observed[usize::from(recover_energy(phase, q.lambda) > 0.0)] += 1;
    }
    let expected_counts: Vec<f64> = expected.iter().map(|p| p * samples as f64).collect();
    let p = chi_squared_p_value(&observed, &expected_counts);

    report(
        8,
        "phase-estimation-pipeline",
        energy_err <= resolution && p > 0.001,
        format!(
            "energy error {energy_err:.3e} vs bin {resolution:.3e}; Born chi^2 p = {p:.4} over {samples} samples"
        ),
    );
}

#[test]
fn criterion_09_rejection_cost() {
    let (model, params) = water_stretched();
    let trials = 10_000;
    let rejection = aggregate_runs(&model, &params, trials, 31, false).unwrap();
    let naive = aggregate_runs(&model, &params, trials, 32, true).unwrap();
    let r_ok = (rejection.mean_cost - rejection_analytic_cost(&params)).abs()
        <= 3.0 * rejection.std_err;
    let n_ok = (naive.mean_cost - naive_analytic_cost(&params)).abs() <= 3.0 * naive.std_err;
    let speedup = naive_analytic_cost(&params) / rejection_analytic_cost(&params);
    let s_ok = (7.0..=9.3).contains(&speedup);
    report(
        9,
        "rejection-cost",
        r_ok && n_ok && s_ok,
        format!(
            "rejection {:.1} +- {:.1} (analytic {:.1}), naive {:.1} +- {:.1} (analytic {:.1}), speedup {speedup:.2}",
            rejection.mean_cost,
            rejection.std_err,
            rejection_analytic_cost(&params),
            naive.mean_cost,
            naive.std_err,
            naive_analytic_cost(&params)
        ),
    );
}

#[test]
fn criterion_10_error_propagation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sigma = 1e-3;
    let h = 1e-6;
    let mut max_rel = 0.0f64;
    for _ in 0..20 {
        let theta: f64 = rng.gen_range(-1.4..1.4);
        let lambda: f64 = rng.gen_range(0.5..5.0);
        let energy = lambda * theta.sin();
        let analytic = error_propagation(sigma, energy, lambda).unwrap();
        let fd = (lambda * (theta + h).sin() - lambda * (theta - h).sin()).abs() / (2.0 * h) * sigma;
        max_rel = max_rel.max((analytic - fd).abs() / fd);
    }
    report(
        10,
        "error-propagation",
        max_rel < 1e-6,
        format!("20 sampled (theta, lambda) points, max relative error {max_rel:.3e}"),
    );
}
