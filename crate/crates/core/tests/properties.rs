mod common;

use maxdiv::diversity::{diversity, diversity_profile, Distribution, Order};
use maxdiv::io::{emit_abundances, emit_graph, emit_matrix, emit_metric, parse_abundances, parse_graph, parse_matrix, parse_metric};
use maxdiv::linalg::{is_positive_definite, is_positive_semidefinite, max_min_weighting, solve_weighting_space};
use maxdiv::maximizer::{check_invariant, normalize_weighting};
use maxdiv::oracle::{dense_solve, quadratic_form};
use maxdiv::SimilarityMatrix;
use proptest::prelude::*;

use common::*;

fn dense_orders() -> Vec<Order> {
    [0.0, 0.1, 0.25, 0.5, 0.9, 0.999, 1.0, 1.001, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0, 200.0, f64::INFINITY]
        .into_iter()
        .map(|q| Order::new(q).unwrap())
        .collect()
}

fn transpose(z: &SimilarityMatrix) -> SimilarityMatrix {
    let n = z.n();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| z.get(j, i)).collect()).collect();
    SimilarityMatrix::from_rows(&rows).unwrap()
}

/// Cosine similarities of random nonnegative vectors: unit diagonal,
/// entries in [0, 1], positive semidefinite.
fn random_gram(seed: u64, n: usize, dim: usize) -> SimilarityMatrix {
    use rand::Rng;
    let mut r = rng(seed);
    let vs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| if r.random_bool(0.3) { 0.0 } else { r.random::<f64>() }).collect())
        .collect();
    let norm = |v: &Vec<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rows: Vec<Vec<f64>> = vs
        .iter()
        .map(|a| {
            vs.iter()
                .map(|b| {
                    let (na, nb) = (norm(a), norm(b));
                    if std::ptr::eq(a, b) {
                        1.0
                    } else if na == 0.0 || nb == 0.0 {
                        0.0
                    } else {
                        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
                    }
                })
                .collect()
        })
        .collect();
    SimilarityMatrix::from_rows(&rows).unwrap().symmetrized(1e-12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn profiles_never_increase(seed in any::<u64>(), n in 1usize..8, sparsity in 0.0f64..0.6) {
        let mut r = rng(seed);
        let z = random_general(&mut r, n);
        let p = random_distribution(&mut r, n, sparsity);
        let profile = diversity_profile(&z, &p, &dense_orders()).unwrap();
        for w in profile.values.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", profile.values);
        }
        let first = profile.values[0];
        let last = *profile.values.last().unwrap();
        if check_invariant(&z, &p).unwrap() {
            prop_assert!(profile.spread() <= 1e-9 * first);
        } else {
            prop_assert!(last < first);
        }
    }

    #[test]
    fn absent_species_change_nothing(seed in any::<u64>(), n in 2usize..8) {
        let mut r = rng(seed);
        let z = random_general(&mut r, n);
        let p = random_distribution(&mut r, n, 0.4);
        // any B containing the support
        let keep: Vec<usize> = (0..n).filter(|&i| p.probs()[i] > 0.0 || (seed >> (i % 64)) & 1 == 1).collect();
        let sub = z.submatrix(&keep).unwrap();
        let restricted = p.restrict(&keep).unwrap();
        for q in dense_orders() {
            prop_assert_eq!(diversity(&z, &p, q).unwrap(), diversity(&sub, &restricted, q).unwrap());
        }
        let back = restricted.extend_by_zero(&keep, n).unwrap();
        prop_assert_eq!(back.probs(), p.probs());
    }

    #[test]
    fn naive_uniform_is_effective_number(n in 1usize..40, q in prop_oneof![0.0f64..20.0, Just(f64::INFINITY)]) {
        let d = diversity(&SimilarityMatrix::identity(n), &Distribution::uniform(n), Order::new(q).unwrap()).unwrap();
        prop_assert!((d - n as f64).abs() <= 1e-12 * n as f64);
    }

    #[test]
    fn diversity_between_one_and_species_count(seed in any::<u64>(), n in 1usize..9) {
        use rand::Rng;
        let mut r = rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { r.random::<f64>() }).collect())
            .collect();
        let z = SimilarityMatrix::from_rows(&rows).unwrap();
        let p = random_distribution(&mut r, n, 0.3);
        for q in dense_orders() {
            let d = diversity(&z, &p, q).unwrap();
            prop_assert!((1.0 - 1e-12..=n as f64 * (1.0 + 1e-12)).contains(&d), "D = {} at q = {}", d, q);
        }
    }

    #[test]
    fn special_orders_are_limits(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let z = random_general(&mut r, n);
        let p = random_distribution(&mut r, n, 0.3);
        let at = |q: f64| diversity(&z, &p, Order::new(q).unwrap()).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        prop_assert!(rel(at(1.0 - 1e-7), at(1.0)) < 1e-5);
        prop_assert!(rel(at(1.0 + 1e-7), at(1.0)) < 1e-5);
        prop_assert!(rel(at(1e-9), at(0.0)) < 1e-6);
        prop_assert!(rel(at(1e8), at(f64::INFINITY)) < 1e-6);
    }

    #[test]
    fn weighting_and_coweighting_have_equal_sums(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let z = random_general(&mut r, n);
        let all: Vec<usize> = (0..n).collect();
        let w = solve_weighting_space(&z, &all).unwrap();
        let v = solve_weighting_space(&transpose(&z), &all).unwrap();
        if let (Some(a), Some(b)) = (w.magnitude, v.magnitude) {
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{} vs {}", a, b);
        }
        // independent partial-pivoting solve
        if w.kernel_dimension() == 0 {
            if let Some(x) = dense_solve(&z.rows(), &vec![1.0; n]) {
                prop_assert!(max_abs_diff(&x, w.particular.as_ref().unwrap()) <= 1e-8 * x.iter().fold(1.0f64, |m, v| m.max(v.abs())));
            }
        }
    }

    #[test]
    fn normalized_weightings_are_invariant(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let z = random_symmetric(&mut r, n);
        let all: Vec<usize> = (0..n).collect();
        let ws = solve_weighting_space(&z, &all).unwrap().with_nonnegative_representative().unwrap();
        if let Some(w) = ws.nonnegative_representative.as_ref() {
            let p = normalize_weighting(w, &all, n).unwrap();
            prop_assert!(check_invariant(&z, &p).unwrap());
            let magnitude: f64 = w.iter().sum();
            for q in [Order::ZERO, Order::ONE, Order::INFINITY] {
                prop_assert!((diversity(&z, &p, q).unwrap() - magnitude).abs() <= 1e-9 * magnitude);
            }
        }
    }

    #[test]
    fn semidefinite_magnitude_is_variational(seed in any::<u64>(), n in 1usize..7, dim in 1usize..6) {
        use rand::Rng;
        let z = random_gram(seed, n, dim);
        prop_assume!(is_positive_semidefinite(&z));
        let all: Vec<usize> = (0..n).collect();
        let ws = solve_weighting_space(&z, &all).unwrap();
        let Some(mag) = ws.magnitude else { return Ok(()) };
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let form = quadratic_form(&z, &x);
            if form > 1e-6 {
                let s: f64 = x.iter().sum();
                prop_assert!(s * s / form <= mag * (1.0 + 1e-8) + 1e-9);
            }
        }
        // principal submatrices never exceed the whole
        for mask in 1u32..(1 << n) - 1 {
            let b: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if let Some(sub) = solve_weighting_space(&z, &b).unwrap().magnitude {
                prop_assert!(sub <= mag * (1.0 + 1e-8) + 1e-9, "{:?}: {} > {}", b, sub, mag);
            }
        }
    }

    #[test]
    fn ultrametric_and_dominant_matrices_are_definite_with_positive_weighting(seed in any::<u64>(), n in 1usize..11) {
        let mut r = rng(seed);
        for z in [random_ultrametric(&mut r, n), random_diagonally_dominant(&mut r, n)] {
            prop_assert!(is_positive_definite(&z));
            let ws = solve_weighting_space(&z, &(0..n).collect::<Vec<_>>()).unwrap();
            let (_, floor) = max_min_weighting(&ws).unwrap().unwrap();
            prop_assert!(floor > 0.0);
            prop_assert!(ws.particular.unwrap().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let z = random_symmetric(&mut r, n);
        prop_assert_eq!(parse_matrix(&emit_matrix(&z)).unwrap(), z);
        let g = random_reflexive(&mut r, n);
        prop_assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
        let d = random_planar_metric(&mut r, n);
        prop_assert_eq!(parse_metric(&emit_metric(&d)).unwrap(), d);
        let p = random_distribution(&mut r, n, 0.3);
        if (p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12 {
            prop_assert_eq!(parse_abundances(&emit_abundances(&p), n).unwrap(), p);
        }
    }
}
