use galign_core::experiment::overlap;
use galign_core::models::{sample_correlated_wigner, sample_wigner};
use galign_core::rng::rng_from_seed;
use galign_core::spectral::*;
use galign_core::{Permutation, SymMatrix};

const TOL: f64 = DEFAULT_EIG_TOL;

fn residual(a: &SymMatrix, e: &LeadingEig) -> f64 {
    let mut av = vec![0.0; a.n()];
    a.matvec(&e.vector, &mut av);
    av.iter()
        .zip(&e.vector)
        .map(|(x, v)| (x - e.value * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn check_eigenpair(a: &SymMatrix, e: &LeadingEig) {
    let norm: f64 = e.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() <= 1e-12);
    let r = residual(a, e);
    assert!(r <= TOL * 1.01, "residual {r}");
    let mut av = vec![0.0; a.n()];
    a.matvec(&e.vector, &mut av);
    let rayleigh: f64 = av.iter().zip(&e.vector).map(|(x, v)| x * v).sum();
    assert!((rayleigh - e.value).abs() <= TOL);
    let big = e.vector.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    assert!(big > 0.0);
}

#[test]
fn wigner_edge_near_two() {
    let a = sample_wigner(2000, &mut rng_from_seed(3));
    let e = leading_eigenvector(&a, TOL).unwrap();
    assert!((1.9..=2.1).contains(&e.value), "{}", e.value);
    check_eigenpair(&a, &e);
    assert!(!e.degenerate);
}

#[test]
fn top_eigenvalue_against_dense_solver() {
    for seed in 0..5 {
        let a = sample_wigner(60, &mut rng_from_seed(seed));
        let e = leading_eigenvector(&a, TOL).unwrap();
        let dense = nalgebra::DMatrix::from_row_slice(60, 60, a.as_slice());
        let eig = nalgebra::SymmetricEigen::new(dense);
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(|x, y| y.total_cmp(x));
        assert!((e.value - values[0]).abs() < 1e-9);
        assert!((e.gap - (values[0] - values[1])).abs() < 1e-6);
        check_eigenpair(&a, &e);
    }
}

#[test]
fn noiseless_pairs_are_recovered() {
    for seed in 0..3 {
        let pair = sample_correlated_wigner(500, 0.0, seed).unwrap();
        let r = eig1_align(&pair.a1, &pair.a2, TOL).unwrap();
        assert_eq!(overlap(r.permutation.as_slice(), &pair.truth).unwrap(), 1.0);
        check_eigenpair(&pair.a1, &r.eig1);
        check_eigenpair(&pair.a2, &r.eig2);
    }
}

#[test]
fn eigenvector_sign_does_not_matter() {
    for seed in 0..4 {
        let pair = sample_correlated_wigner(300, 1e-4, seed).unwrap();
        let r = eig1_align(&pair.a1, &pair.a2, TOL).unwrap();
        let flipped: Vec<f64> = r.eig2.vector.iter().map(|x| -x).collect();
        let (pi, reversed) = eig1_select(&pair.a1, &pair.a2, &r.eig1.vector, &flipped).unwrap();
        assert_eq!(pi, r.permutation);
        assert_ne!(reversed, r.reversed);
    }
}

#[test]
fn relabelling_commutes_with_alignment() {
    for seed in 0..3 {
        let pair = sample_correlated_wigner(200, 1e-3, seed).unwrap();
        let base = eig1_align(&pair.a1, &pair.a2, TOL).unwrap().permutation;
        let rho = Permutation::random(200, &mut rng_from_seed(100 + seed));
        let scrambled = pair.a2.permuted(&rho).unwrap();
        let moved = eig1_align(&pair.a1, &scrambled, TOL).unwrap().permutation;
        assert_eq!(moved, rho.compose(&base));
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn small_instances_against_exhaustive_search() {
    let all = permutations(6);
    assert_eq!(all.len(), 720);
    for (seed, sigma) in [(1, 0.0), (2, 0.05), (3, 0.3), (4, 1.0)] {
        let pair = sample_correlated_wigner(6, sigma, seed).unwrap();
        let r = eig1_align(&pair.a1, &pair.a2, TOL).unwrap();
        let (plus, minus) = eig1_candidates(&r.eig1.vector, &r.eig2.vector).unwrap();
        let chosen = quadratic_objective(&pair.a1, &pair.a2, &r.permutation).unwrap();
        let other = if r.reversed { &plus } else { &minus };
        assert!(chosen >= quadratic_objective(&pair.a1, &pair.a2, other).unwrap());
        let best = all
            .iter()
            .map(|p| quadratic_objective(&pair.a1, &pair.a2, &Permutation::new(p.clone()).unwrap()).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best >= chosen - 1e-12);
        if sigma == 0.0 {
            // the truth attains the global maximum, and EIG1 finds it
            let at_truth = quadratic_objective(&pair.a1, &pair.a2, &pair.truth).unwrap();
            assert!((best - at_truth).abs() < 1e-12);
            assert!((chosen - best).abs() < 1e-12);
        }
    }
}

#[test]
fn objective_by_direct_double_sum() {
    let pair = sample_correlated_wigner(9, 0.2, 8).unwrap();
    let pi = Permutation::random(9, &mut rng_from_seed(2));
    let mut direct = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            direct += pair.a1.get(i, j) * pair.a2.get(pi.apply(i), pi.apply(j));
        }
    }
    assert!((quadratic_objective(&pair.a1, &pair.a2, &pi).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn overlap_brackets_at_moderate_size() {
    let n = 1000;
    let mean = |sigma: f64| {
        (0..3)
            .map(|seed| {
                let pair = sample_correlated_wigner(n, sigma, 40 + seed).unwrap();
                let r = eig1_align(&pair.a1, &pair.a2, TOL).unwrap();
                overlap(r.permutation.as_slice(), &pair.truth).unwrap()
            })
            .sum::<f64>()
            / 3.0
    };
    assert!(mean(1e-5) >= 0.9);
    assert!(mean(1e-1) <= 0.1);
}

#[test]
fn perturbation_scale() {
    let n = 1000;
    let clean = sample_correlated_wigner(n, 0.0, 9).unwrap();
    let s0 = perturbation_stats(&clean.a1, &clean.a2_aligned(), 0.0, TOL).unwrap();
    assert!(s0.s_magnitude < 1e-8 && (s0.alignment - 1.0).abs() < 1e-12);

    let sigmas = [1e-4, 1e-3, 1e-2];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &sigma in &sigmas {
        let pair = sample_correlated_wigner(n, sigma, 9).unwrap();
        let st = perturbation_stats(&pair.a1, &pair.a2_aligned(), sigma, TOL).unwrap();
        assert!((0.0..=1.0).contains(&st.alignment));
        let ratio = st.s_magnitude / (sigma * (n as f64).powf(1.0 / 6.0));
        assert!((0.2..=5.0).contains(&ratio), "sigma {sigma}: ratio {ratio}");
        xs.push(sigma.ln());
        ys.push(st.s_magnitude.ln());
    }
    let mx = xs.iter().sum::<f64>() / 3.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((0.8..=1.2).contains(&slope), "slope {slope}");
}

#[test]
fn rejects_bad_input() {
    assert!(leading_eigenvector(&SymMatrix::zeros(1), TOL).is_err());
    let a = SymMatrix::zeros(3);
    let b = SymMatrix::zeros(4);
    assert!(eig1_align(&a, &b, TOL).is_err());
    assert!(quadratic_objective(&a, &a, &Permutation::identity(4)).is_err());
}
