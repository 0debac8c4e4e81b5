//! Release gate: the ten headline guarantees of the toolkit, one test
//! each. Every test prints a single verdict line
//! (`acceptance criterion NN (name): pass|FAIL`) so a log scan shows the
//! whole gate at a glance; a FAIL also fails the test itself.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use qnit::enumerate::{
    brute_force_nit_sets, enumerate_nit_sets, find_mapping_permutations, SweepOptions,
};
use qnit::inverse::{build_w_basis, conjugated_nit_operators, verify_separation};
use qnit::operators::{
    binary_projectors, context_operator, decode_outcome, first_primes, nit_operators_for,
    PrimeAssignment,
};
use qnit::partitions::{canonical_nit_set, nit_set_from_blocks, NitParams, NitSet, StateIndex};
use qnit::perm::Permutation;
use qnit::spectra::{
    block_representative_state, classify_nit_set_eigenstates, single_factor_ranks, StateVector,
    SCHMIDT_TOL,
};
use qnit::urn::{look, run_session, urn_from_nit_set, Lens, LensMode, LookResult};

fn criterion<F: FnOnce() + UnwindSafe>(number: usize, name: &str, check: F) {
    let outcome = catch_unwind(check);
    let verdict = if outcome.is_ok() { "pass" } else { "FAIL" };
    println!("acceptance criterion {number:02} ({name}): {verdict}");
    if let Err(panic) = outcome {
        resume_unwind(panic);
    }
}

fn params(n: u32, k: u32) -> NitParams {
    NitParams::new(n, k).unwrap()
}

fn pair(first: [[StateIndex; 3]; 3], second: [[StateIndex; 3]; 3]) -> NitSet {
    nit_set_from_blocks(
        3,
        2,
        vec![
            first.iter().map(|b| b.to_vec()).collect(),
            second.iter().map(|b| b.to_vec()).collect(),
        ],
    )
    .unwrap()
}

/// Uniform shuffle driven by a seeded, platform-independent generator.
fn random_permutation(rng: &mut ChaCha8Rng, n_states: u32) -> Permutation {
    let mut images: Vec<StateIndex> = (1..=n_states).collect();
    for i in (1..images.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        images.swap(i, j);
    }
    Permutation::from_images(images).unwrap()
}

fn shuffled_primes(rng: &mut ChaCha8Rng, count: usize) -> Vec<u64> {
    let mut pool = first_primes(40);
    for i in (1..pool.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

#[test]
fn acceptance_01_enumeration_count() {
    criterion(1, "two-trit catalogue count via the CLI", || {
        let started = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_qnit"))
            .args(["enumerate", "--n", "3", "--k", "2", "--count-only"])
            .output()
            .expect("binary runs");
        let elapsed = started.elapsed();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), "5040\n");
        assert!(
            elapsed < Duration::from_secs(60),
            "full sweep took {elapsed:?}, budget is 60 s"
        );
    });
}

#[test]
fn acceptance_02_oracle_agreement() {
    criterion(2, "sweep and combination-filter oracles agree", || {
        let options = SweepOptions::default();
        for (n, k, expected) in [(2, 2, Some(3)), (2, 3, None), (3, 2, Some(5040))] {
            let shape = params(n, k);
            let swept = enumerate_nit_sets(shape, &options).unwrap();
            let filtered = brute_force_nit_sets(shape, &options).unwrap();
            assert_eq!(swept, filtered, "catalogues differ for ({n},{k})");
            if let Some(count) = expected {
                assert_eq!(swept.len(), count, "catalogue size for ({n},{k})");
            }
        }
    });
}

#[test]
fn acceptance_03_worked_example_membership() {
    criterion(3, "worked-example families are in the catalogue", || {
        let displayed = [
            pair(
                [[1, 2, 3], [4, 6, 8], [5, 7, 9]],
                [[1, 4, 5], [2, 6, 7], [3, 8, 9]],
            ),
            pair(
                [[1, 2, 3], [4, 6, 9], [5, 7, 8]],
                [[1, 4, 5], [2, 6, 7], [3, 8, 9]],
            ),
            pair(
                [[1, 5, 9], [2, 6, 7], [3, 4, 8]],
                [[1, 6, 8], [2, 4, 9], [3, 5, 7]],
            ),
            pair(
                [[1, 6, 9], [2, 5, 7], [3, 4, 8]],
                [[1, 7, 8], [2, 4, 9], [3, 5, 6]],
            ),
            pair(
                [[1, 6, 9], [2, 5, 8], [3, 4, 7]],
                [[1, 7, 8], [2, 4, 9], [3, 5, 6]],
            ),
        ];
        let catalogue = enumerate_nit_sets(params(3, 2), &SweepOptions::default()).unwrap();
        for (i, family) in displayed.iter().enumerate() {
            assert!(family.is_valid(), "family {} fails validation", i + 1);
            assert!(
                catalogue.binary_search(&family.canonicalize()).is_ok(),
                "family {} missing from the catalogue",
                i + 1
            );
        }
    });
}

#[test]
fn acceptance_04_orbit_stabilizer_consistency() {
    criterion(4, "stabilizer sizes divide the relabeling group", || {
        let options = SweepOptions::default();
        let trit = canonical_nit_set(params(3, 2));
        let trit_stabilizer = find_mapping_permutations(&trit, &trit, &options).unwrap();
        assert_eq!(trit_stabilizer.len(), 72);
        assert_eq!(72u64 * 5040, 362_880, "72 x 5040 = 9!");

        let bit = canonical_nit_set(params(2, 2));
        let bit_stabilizer = find_mapping_permutations(&bit, &bit, &options).unwrap();
        assert_eq!(bit_stabilizer.len(), 8);
        assert_eq!(8u64 * 3, 24, "8 x 3 = 4!");
    });
}

#[test]
fn acceptance_05_w_basis_separation_demo() {
    criterion(5, "W-basis observables separate the basis", || {
        let started = Instant::now();
        let basis = build_w_basis();
        let shape = params(2, 3);
        let operators = nit_operators_for(
            &canonical_nit_set(shape),
            &PrimeAssignment::default_for(shape),
        )
        .unwrap();

        let conjugated = conjugated_nit_operators(&basis, &operators).unwrap();
        let first = &conjugated[0];
        let rounded: Vec<i64> = first
            .diagonal()
            .iter()
            .map(|z| z.re.round() as i64)
            .collect();
        assert_eq!(rounded, vec![2, 2, 2, 2, 3, 3, 3, 3]);
        assert!(first.max_off_diagonal() < 1e-10);

        let report = verify_separation(&basis, &operators).unwrap();
        assert!(report.eigenvector_check.pass);
        assert!(report.eigenvector_check.max_deviation < 1e-10);
        assert!(report.commutation_check.pass);
        assert!(report.commutation_check.max_deviation < 1e-10);
        assert!(report.eigenvalue_check.pass);
        assert!(report.eigenvalue_check.max_integer_defect < 1e-6);
        let mut values = report.eigenvalue_check.values.clone();
        values.sort_unstable();
        assert_eq!(values, vec![110, 130, 154, 165, 182, 195, 231, 273]);
        assert!(report.decode_check.pass);
        assert!(report.all_pass());

        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(1),
            "demo took {elapsed:?}, budget is 1 s"
        );
    });
}

#[test]
fn acceptance_06_context_decode_round_trip() {
    criterion(6, "randomized prime contexts decode exactly", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for (n, k) in [(2, 2), (3, 2), (2, 3)] {
            let shape = params(n, k);
            let set = canonical_nit_set(shape);
            for _ in 0..20 {
                let primes = shuffled_primes(&mut rng, (n * k) as usize);
                let rows: Vec<Vec<u64>> = primes.chunks(n as usize).map(<[u64]>::to_vec).collect();
                let assignment = PrimeAssignment::new(rows).unwrap();
                let context =
                    context_operator(&nit_operators_for(&set, &assignment).unwrap()).unwrap();
                for state in 1..=shape.state_count() as StateIndex {
                    let value = context.entries[state as usize - 1];
                    let outcome = decode_outcome(value, &assignment).unwrap();
                    let mut expected = Vec::with_capacity(k as usize);
                    for j in 1..=k {
                        expected.push(shape.digit(state, j) + 1);
                    }
                    assert_eq!(outcome, expected, "state {state} under ({n},{k})");
                }
            }
        }
    });
}

#[test]
fn acceptance_07_entanglement_classification() {
    criterion(7, "eigenstate ranks split product from entangled", || {
        let product_reports =
            classify_nit_set_eigenstates(&canonical_nit_set(params(3, 2)), SCHMIDT_TOL).unwrap();
        assert_eq!(product_reports.len(), 6);
        for report in &product_reports {
            assert!(report.product, "canonical block {report:?} must be product");
            assert_eq!(report.schmidt_ranks, vec![1, 1]);
        }

        let diagonal_family = pair(
            [[1, 5, 9], [2, 6, 7], [3, 4, 8]],
            [[1, 6, 8], [2, 4, 9], [3, 5, 7]],
        );
        let entangled_reports =
            classify_nit_set_eigenstates(&diagonal_family, SCHMIDT_TOL).unwrap();
        assert_eq!(entangled_reports.len(), 6);
        for report in &entangled_reports {
            assert!(!report.product);
            assert_eq!(report.schmidt_ranks, vec![3, 3]);
        }

        let psi = block_representative_state(&[1, 5, 9], 9).unwrap();
        let amp = 1.0 / 3f64.sqrt();
        for (i, value) in psi.amplitudes().iter().enumerate() {
            let expected = if i % 4 == 0 { amp } else { 0.0 };
            assert!(
                (value.re - expected).abs() < 1e-12 && value.im.abs() < 1e-12,
                "amplitude {i} off: {value}"
            );
        }

        let w_amplitudes: Vec<_> = [0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]
            .iter()
            .map(|&x| qnit::Complex64::new(x * amp, 0.0))
            .collect();
        let w = StateVector::new(w_amplitudes).unwrap();
        let ranks = single_factor_ranks(&w, &[2, 2, 2], SCHMIDT_TOL).unwrap();
        assert_eq!(
            ranks,
            vec![2, 2, 2],
            "W state entangled across each particle"
        );
    });
}

#[test]
fn acceptance_08_binary_projectors() {
    criterion(8, "two-outcome observables become exact projectors", || {
        let projectors = binary_projectors(&canonical_nit_set(params(2, 3))).unwrap();
        assert_eq!(projectors.len(), 3);
        for projector in &projectors {
            assert_eq!(projector.block_values, vec![1, 0]);
            for &entry in &projector.entries {
                assert_eq!(entry * entry, entry, "0/1 diagonal is exactly idempotent");
            }
        }
        let refusal = binary_projectors(&canonical_nit_set(params(3, 2)));
        let message = refusal.unwrap_err().to_string();
        assert!(
            message.contains("binary"),
            "refusal must cite the two-outcome restriction: {message}"
        );
    });
}

#[test]
fn acceptance_09_urn_semantics() {
    criterion(9, "urn lenses mirror operator decoding", || {
        let set = canonical_nit_set(params(3, 2));
        let colors = vec!["blue".to_string(), "yellow".to_string()];
        let glyphs = vec!["A".to_string(), "B".to_string(), "C".to_string()];
        let urn = urn_from_nit_set(&set, &colors, &glyphs).unwrap();

        let assignment = PrimeAssignment::default_for(params(3, 2));
        let context = context_operator(&nit_operators_for(&set, &assignment).unwrap()).unwrap();
        for state in 1..=9u32 {
            let outcome = decode_outcome(context.entries[state as usize - 1], &assignment).unwrap();
            for (j, color) in colors.iter().enumerate() {
                let lens = Lens {
                    color: color.clone(),
                    mode: LensMode::Monospectral,
                };
                assert_eq!(
                    look(state, &urn, &lens).unwrap(),
                    LookResult::Symbol(glyphs[outcome[j] - 1].clone()),
                    "state {state}, color {color}"
                );
            }
        }

        let foreign_mono = Lens {
            color: "green".to_string(),
            mode: LensMode::Monospectral,
        };
        let tally = run_session(&urn, &foreign_mono, 10_000, 1234).unwrap();
        assert_eq!(tally.results.len(), 1);
        assert_eq!(tally.results[0].kind, "no_answer");
        assert_eq!(tally.results[0].count, 10_000);

        let foreign_broad = Lens {
            color: "green".to_string(),
            mode: LensMode::Broadened,
        };
        let tally = run_session(&urn, &foreign_broad, 10_000, 1234).unwrap();
        let mut total = 0;
        for entry in &tally.results {
            assert_eq!(entry.kind, "symbol_set");
            assert_eq!(entry.glyphs.len(), 2);
            total += entry.count;
        }
        assert_eq!(total, 10_000);

        let replay = run_session(&urn, &foreign_broad, 10_000, 1234).unwrap();
        assert_eq!(
            serde_json::to_string(&tally).unwrap(),
            serde_json::to_string(&replay).unwrap(),
            "identical seeds give identical tallies"
        );
    });
}

#[test]
fn acceptance_10_relabeling_closure() {
    criterion(10, "random relabelings never leave the catalogue", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc105e);
        for (n, k) in [(3u32, 2u32), (2, 3)] {
            let shape = params(n, k);
            let set = canonical_nit_set(shape);
            for trial in 0..1000 {
                let p = random_permutation(&mut rng, shape.state_count() as u32);
                let relabeled = set.apply_state_permutation(&p).unwrap();
                assert!(
                    relabeled.is_valid(),
                    "trial {trial} for ({n},{k}) produced an invalid family"
                );
            }
        }
    });
}
