use entcont::linalg::{kron, tensor, tensor_power, CMatrix};
use entcont::measures::{ec_upper, ed_lower, eof_2x2, log_negativity};
use entcont::random::{ginibre_state, random_isometry, random_separable_state, rng_from_seed};
use entcont::states::werner;
use entcont::DensityMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Kraus operators of a random channel on a `d`-level system with `k` outcomes.
fn random_kraus(d: usize, k: usize, seed: u64) -> Vec<CMatrix> {
    let v = random_isometry(d * k, d, &mut rng_from_seed(seed));
    (0..k).map(|i| v.rows(i * d, d).into_owned()).collect()
}

fn apply_local(rho: &DensityMatrix, kraus: &[CMatrix], on_a: bool) -> DensityMatrix {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let mut out = DMatrix::<Complex64>::zeros(da * db, da * db);
    for k in kraus {
        let full = if on_a { kron(k, &CMatrix::identity(db, db)) } else { kron(&CMatrix::identity(da, da), k) };
        out += &full * rho.matrix() * full.adjoint();
    }
    DensityMatrix::new(da, db, out).expect("channel output is a state")
}

#[test]
fn one_sided_channels_do_not_increase_entanglement() {
    let mut rng = rng_from_seed(2024);
    for i in 0..200u64 {
        let rho = ginibre_state(2, 2, &mut rng);
        let kraus = random_kraus(2, 1 + (i as usize % 3), 10_000 + i);
        let out = apply_local(&rho, &kraus, i % 2 == 0);
        let (ln_in, ln_out) = (log_negativity(&rho).value, log_negativity(&out).value);
        assert!(ln_out <= ln_in + 1e-9, "sample {i}: log-negativity {ln_in} -> {ln_out}");
        let (e_in, e_out) = (eof_2x2(&rho).unwrap().value, eof_2x2(&out).unwrap().value);
        assert!(e_out <= e_in + 1e-9, "sample {i}: eof {e_in} -> {e_out}");
    }
}

#[test]
fn log_negativity_is_additive_on_copies() {
    let mut rng = rng_from_seed(77);
    let rho = ginibre_state(2, 2, &mut rng);
    let rho = entcont::linalg::mix(&rho, &werner(1.0).unwrap(), 0.6).unwrap();
    let single = log_negativity(&rho).value;
    assert!(single > 0.0);
    for n in 1..=4u32 {
        let many = log_negativity(&tensor_power(&rho, n).unwrap()).value;
        assert!((many - n as f64 * single).abs() < 1e-8, "n = {n}: {many} vs {}", n as f64 * single);
    }
    let other = werner(0.8).unwrap();
    let pair = log_negativity(&tensor(&rho, &other).unwrap()).value;
    assert!((pair - single - log_negativity(&other).value).abs() < 1e-9);
}

#[test]
fn surrogates_are_ordered() {
    let mut rng = rng_from_seed(5);
    for _ in 0..200 {
        let rho = ginibre_state(2, 2, &mut rng);
        let (lo, hi) = (ed_lower(&rho).value, ec_upper(&rho).value);
        assert!(lo <= hi + 1e-9, "{lo} > {hi}");
    }
    for p in [0.4, 0.6, 0.8, 0.95, 1.0] {
        let rho = werner(p).unwrap();
        assert!(ed_lower(&rho).value <= ec_upper(&rho).value + 1e-9);
    }
}

#[test]
fn separable_states_have_no_negativity() {
    let mut rng = rng_from_seed(9);
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..20 {
            let rho = random_separable_state(da, db, 4, &mut rng);
            assert_eq!(log_negativity(&rho).value, 0.0);
            assert_eq!(ed_lower(&rho).value, 0.0);
        }
    }
}
