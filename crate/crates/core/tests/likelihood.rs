use galign_core::likelihood::{
    kl_monte_carlo, ln_poisson_pmf, log_likelihood_ratio, log_likelihood_ratio_flagged, null_likelihood_mean,
    one_sided_test, s_star_scan, sample_log_ratios, LikelihoodParams, SharedLikelihood, DEFAULT_DEGREE_CAP,
};
use galign_core::models::{sample_correlated_tree_pair, sample_independent_tree_pair};
use galign_core::rng::rng_from_seed;
use galign_core::tree_enum::tree_from_code;
use galign_core::RootedTree;

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

fn pois(mean: f64, k: usize) -> f64 {
    ln_poisson_pmf(mean, k).exp()
}

/// Independent-law probability of an ordered tree truncated at `depth`.
fn null_prob(t: &RootedTree, v: usize, depth: usize, lambda: f64) -> f64 {
    if depth == 0 {
        return 1.0;
    }
    let kids = t.children(v);
    pois(lambda, kids.len()) * kids.iter().map(|&c| null_prob(t, c, depth - 1, lambda)).product::<f64>()
}

/// Correlated-law probability of an ordered pair, straight from the
/// generative description: `k` shared children first, private children
/// after, then a uniform shuffle of each child list.
fn joint_prob(t: &RootedTree, v: usize, tp: &RootedTree, w: usize, depth: usize, lambda: f64, s: f64) -> f64 {
    if depth == 0 {
        return 1.0;
    }
    let (a, b) = (t.children(v), tp.children(w));
    let (c, cp) = (a.len(), b.len());
    let pa = permutations(c);
    let pb = permutations(cp);
    let norm = (pa.len() * pb.len()) as f64;
    let mut total = 0.0;
    for k in 0..=c.min(cp) {
        let weight = pois(lambda * s, k) * pois(lambda * (1.0 - s), c - k) * pois(lambda * (1.0 - s), cp - k);
        if weight == 0.0 {
            continue;
        }
        let mut sum = 0.0;
        for x in &pa {
            for y in &pb {
                let mut prod = 1.0;
                for u in 0..k {
                    prod *= joint_prob(t, a[x[u]], tp, b[y[u]], depth - 1, lambda, s);
                }
                for &u in &x[k..] {
                    prod *= null_prob(t, a[u], depth - 1, lambda);
                }
                for &u in &y[k..] {
                    prod *= null_prob(tp, b[u], depth - 1, lambda);
                }
                sum += prod;
            }
        }
        total += weight * sum / norm;
    }
    total
}

fn oracle_log_ratio(t: &RootedTree, tp: &RootedTree, d: usize, lambda: f64, s: f64) -> f64 {
    (joint_prob(t, 0, tp, 0, d, lambda, s) / (null_prob(t, 0, d, lambda) * null_prob(tp, 0, d, lambda))).ln()
}

fn max_children(t: &RootedTree) -> usize {
    (0..t.len()).map(|v| t.children(v).len()).max().unwrap_or(0)
}

#[test]
fn base_cases() {
    let p = LikelihoodParams::new(2.5, 0.4, 0).unwrap();
    let t = tree_from_code("((())())").unwrap();
    assert_eq!(log_likelihood_ratio(&t, &t, &p).unwrap(), 0.0);
    let bare = RootedTree::root(1);
    let p1 = LikelihoodParams::new(2.5, 0.4, 1).unwrap();
    assert!((log_likelihood_ratio(&bare, &bare, &p1).unwrap() - 1.0).abs() < 1e-14);
    let p0 = LikelihoodParams::new(2.5, 0.0, 3).unwrap();
    let u = tree_from_code("(()(()()))").unwrap();
    assert_eq!(log_likelihood_ratio(&t, &u, &p0).unwrap(), 0.0);
    // only the depth-d truncations matter
    assert_eq!(
        log_likelihood_ratio(&t, &u, &p1).unwrap(),
        log_likelihood_ratio(&t.truncated(1), &u.truncated(1), &p1).unwrap()
    );
}

#[test]
fn matches_generative_oracle_on_random_pairs() {
    let mut rng = rng_from_seed(11);
    let mut checked = 0;
    for &(lambda, s, d) in &[(1.0, 0.6, 2), (1.2, 0.8, 3), (0.8, 0.3, 3), (1.5, 1.0, 2)] {
        let p = LikelihoodParams::new(lambda, s, d).unwrap();
        let mut tries = 0;
        while tries < 40 {
            let pair = if tries % 2 == 0 {
                sample_correlated_tree_pair(lambda, s, d, &mut rng).unwrap()
            } else {
                sample_independent_tree_pair(lambda, d, &mut rng).unwrap()
            };
            if max_children(&pair.t) > 4 || max_children(&pair.tprime) > 4 {
                continue;
            }
            tries += 1;
            let ours = log_likelihood_ratio(&pair.t, &pair.tprime, &p).unwrap();
            let oracle = oracle_log_ratio(&pair.t, &pair.tprime, d, lambda, s);
            if oracle == f64::NEG_INFINITY {
                assert_eq!(ours, f64::NEG_INFINITY);
            } else {
                assert!((ours - oracle).abs() < 1e-10, "lambda={lambda} s={s} d={d}: {ours} vs {oracle}");
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 160);
}

#[test]
fn symmetric_and_shuffle_invariant() {
    let mut rng = rng_from_seed(5);
    let p = LikelihoodParams::new(2.0, 0.7, 3).unwrap();
    for _ in 0..50 {
        let pair = sample_correlated_tree_pair(2.0, 0.7, 3, &mut rng).unwrap();
        let l = log_likelihood_ratio(&pair.t, &pair.tprime, &p).unwrap();
        let r = log_likelihood_ratio(&pair.tprime, &pair.t, &p).unwrap();
        assert!((l - r).abs() <= 1e-12 * l.abs().max(1.0));
        let shuffled = pair.t.shuffled(&mut rng);
        assert_eq!(log_likelihood_ratio(&shuffled, &pair.tprime, &p).unwrap(), l);
    }
}

/// All depth-2 trees with at most `max_vertices` vertices, as ordered trees.
fn depth_two_trees(max_vertices: usize) -> Vec<RootedTree> {
    fn rec(budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for deg in 0..budget {
            if 1 + deg <= budget {
                prefix.push(deg);
                rec(budget - 1 - deg, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut seqs = Vec::new();
    rec(max_vertices - 1, &mut Vec::new(), &mut seqs);
    seqs.into_iter()
        .map(|degs| {
            let mut t = RootedTree::root(2);
            for d in degs {
                let c = t.push_child(0);
                for _ in 0..d {
                    t.push_child(c);
                }
            }
            t
        })
        .collect()
}

#[test]
fn kl_matches_truncated_exact_sum() {
    let (lambda, s, d) = (0.5, 0.9, 2);
    let trees = depth_two_trees(6);
    let mut kl = 0.0;
    let mut mass = 0.0;
    let p = LikelihoodParams::new(lambda, s, d).unwrap();
    for t in &trees {
        for tp in &trees {
            let joint = joint_prob(t, 0, tp, 0, d, lambda, s);
            let ours = log_likelihood_ratio(t, tp, &p).unwrap();
            mass += joint;
            if joint > 0.0 {
                kl += joint * ours;
            }
        }
    }
    let tail = 1.0 - mass;
    assert!(tail < 1e-2, "tail mass {tail}");
    let est = kl_monte_carlo(&p, 20_000, 99).unwrap();
    // the tail holds larger trees, whose log ratios stay below 6 here
    let slack = 3.0 * est.stderr + 6.0 * tail;
    assert!((est.mean - kl).abs() <= slack, "mc {} exact {kl} slack {slack}", est.mean);
}

#[test]
fn kl_zero_without_correlation_and_monotone_in_depth() {
    let zero = kl_monte_carlo(&LikelihoodParams::new(2.0, 0.0, 3).unwrap(), 500, 1).unwrap();
    assert!(zero.mean.abs() <= 3.0 * zero.stderr + 1e-15);
    let mut prev: Option<(f64, f64)> = None;
    for d in 1..=3 {
        let est = kl_monte_carlo(&LikelihoodParams::new(1.5, 0.8, d).unwrap(), 4000, 7).unwrap();
        if let Some((m, se)) = prev {
            assert!(est.mean >= m - 3.0 * (se * se + est.stderr * est.stderr).sqrt());
        }
        prev = Some((est.mean, est.stderr));
    }
}

#[test]
fn normalization_under_independent_law() {
    for d in 1..=2 {
        let p = LikelihoodParams::new(2.0, 0.5, d).unwrap();
        let est = null_likelihood_mean(&p, 20_000, 3).unwrap();
        assert!((est.mean - 1.0).abs() <= 3.0 * est.stderr, "d={d}: {est:?}");
    }
}

#[test]
fn truncation_is_compatible_across_depths() {
    // E[L_{d-1}(truncations)] under the depth-d law equals E[L_{d-1}] under the depth-(d-1) law
    let (lambda, s, d) = (1.5, 0.7, 3);
    let p = LikelihoodParams::new(lambda, s, d - 1).unwrap();
    let mut rng = rng_from_seed(21);
    let n = 4000;
    let truncated: Vec<f64> = (0..n)
        .map(|_| {
            let pair = sample_correlated_tree_pair(lambda, s, d, &mut rng).unwrap();
            log_likelihood_ratio(&pair.t.truncated(d - 1), &pair.tprime.truncated(d - 1), &p).unwrap()
        })
        .collect();
    let (direct, _) = sample_log_ratios(&p, n, 22, true, DEFAULT_DEGREE_CAP).unwrap();
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, var / v.len() as f64)
    };
    let (m1, v1) = stats(&truncated);
    let (m2, v2) = stats(&direct);
    assert!((m1 - m2).abs() <= 4.0 * (v1 + v2).sqrt(), "{m1} vs {m2}");
}

fn acceptance_counts(tau: f64, draws: usize) -> (usize, usize) {
    let p = LikelihoodParams::new(4.0, 0.95, 3).unwrap();
    let mut rng = rng_from_seed(8);
    let mut hits_corr = 0usize;
    let mut hits_null = 0usize;
    for _ in 0..draws {
        let c = sample_correlated_tree_pair(4.0, 0.95, 3, &mut rng).unwrap();
        hits_corr += one_sided_test(&c.t, &c.tprime, &p, tau).unwrap() as usize;
        let i = sample_independent_tree_pair(4.0, 3, &mut rng).unwrap();
        hits_null += one_sided_test(&i.t, &i.tprime, &p, tau).unwrap() as usize;
    }
    (hits_corr, hits_null)
}

#[test]
fn one_sided_test_separates_laws() {
    // tau (lambda s)^d with tau = 1 is about 55 here, far above typical
    // log ratios at depth 3, so neither law passes; a smaller tau shows the
    // separation
    let (corr, null) = acceptance_counts(1.0, 2000);
    assert_eq!((corr, null), (0, 0));
    let (corr, null) = acceptance_counts(0.1, 10_000);
    assert!(corr >= 1000 && corr as f64 >= 5.0 * null.max(1) as f64, "{corr} vs {null}");

    let t = tree_from_code("(()())").unwrap();
    let d0 = LikelihoodParams::new(4.0, 0.5, 2).unwrap().with_depth(0);
    let t0 = RootedTree::root(0);
    assert!(one_sided_test(&t0, &t0, &d0, 0.0).unwrap());
    assert!(!one_sided_test(&t0, &t0, &d0, 0.5).unwrap());
    let p2 = LikelihoodParams::new(4.0, 0.5, 2).unwrap();
    assert!(one_sided_test(&t, &t0, &p2, -1e9).unwrap());
    let none = LikelihoodParams::new(4.0, 0.0, 2).unwrap();
    assert!(one_sided_test(&t, &t, &none, 1.0).is_err());
}

#[test]
fn cap_flags_wide_pairs() {
    // twenty children with distinct subtrees on each side
    let mut t = RootedTree::root(2);
    for deg in 0..20 {
        let c = t.push_child(0);
        for _ in 0..deg {
            t.push_child(c);
        }
    }
    let p = LikelihoodParams::new(10.0, 0.5, 2).unwrap();
    let capped = log_likelihood_ratio_flagged(&t, &t, &p, DEFAULT_DEGREE_CAP).unwrap();
    assert!(capped.capped && capped.log_ratio.is_finite());
    let exact = log_likelihood_ratio_flagged(&t, &t, &p, 22).unwrap();
    assert!(!exact.capped);
}

#[test]
fn shared_evaluator_reuses_classes() {
    let p = LikelihoodParams::new(1.5, 0.6, 3).unwrap();
    let shared = SharedLikelihood::new(p, DEFAULT_DEGREE_CAP).unwrap();
    let mut rng = rng_from_seed(2);
    let pairs: Vec<_> = (0..20).map(|_| sample_correlated_tree_pair(1.5, 0.6, 3, &mut rng).unwrap()).collect();
    let first: Vec<f64> = pairs.iter().map(|q| shared.evaluate(&q.t, &q.tprime).log_ratio).collect();
    let size = shared.memo_len();
    for (q, &v) in pairs.iter().zip(&first) {
        assert_eq!(shared.evaluate(&q.t, &q.tprime).log_ratio, v);
        let fresh = log_likelihood_ratio(&q.t, &q.tprime, &p).unwrap();
        assert!((fresh - v).abs() <= 1e-12 * v.abs().max(1.0));
    }
    assert_eq!(shared.memo_len(), size);
}

#[test]
fn scan_shape_and_null_column() {
    let scan = s_star_scan(2.0, &[1, 2], &[0.0, 0.5, 0.9], 200, 4).unwrap();
    assert_eq!(scan.rows.len(), 6);
    for row in scan.rows.iter().filter(|r| r.s == 0.0) {
        assert!(row.estimate.mean.abs() <= 3.0 * row.estimate.stderr + 1e-15);
    }
    assert!(s_star_scan(2.0, &[], &[0.5], 200, 4).is_err());
}
