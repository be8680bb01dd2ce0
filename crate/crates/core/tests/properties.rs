use irl_core::analysis::{d_g, d_qstar, decompose_reward, lipschitz_bound, rho_g, transport_reward};
use irl_core::concentration::{kl_categorical, l1, perturbed_uniform};
use irl_core::experiments::{
    perturb_mdp, random_deterministic_policy, random_distribution, random_mdp, random_reward,
    random_stochastic_policy, rng_for,
};
use irl_core::hausdorff::{hausdorff, Method};
use irl_core::mdp::{
    advantage, evaluate_policy, greedy_policy, is_feasible, optimal_values, Dims, MdpR, PolicyTable, Restriction,
    RewardTable,
};
use irl_core::polytope::{build_polytope, RewardPolytope};
use irl_core::sampling::{build_empirical, GenerativeOracle, SampleDataset};
use irl_core::usirl::{
    lower_bound_tau, run_us_irl, upper_bound_tau, ConfidenceConfig, Variant,
};
use irl_core::vertex::enumerate_vertices;
use proptest::prelude::*;
use rand::Rng;

fn dims() -> impl Strategy<Value = Dims> {
    (1usize..=3, 1usize..=3, 1usize..=4).prop_map(|(s, a, h)| Dims::new(s, a, h))
}

/// Problems with at most `cap` reward coordinates.
fn small_dims(cap: usize) -> impl Strategy<Value = Dims> {
    (1usize..=3, 1usize..=2, 1usize..=3)
        .prop_map(|(s, a, h)| Dims::new(s, a, h))
        .prop_filter("few coordinates", move |d| d.len() <= cap)
}

fn problem(d: Dims, seed: u64, stochastic: bool) -> (MdpR, PolicyTable) {
    let mut rng = rng_for(seed);
    let m = random_mdp(&mut rng, d, false).unwrap();
    let pi = if stochastic && d.a >= 2 {
        random_stochastic_policy(&mut rng, d, 0.3).unwrap()
    } else {
        random_deterministic_policy(&mut rng, d).unwrap()
    };
    (m, pi)
}

fn polytope(m: &MdpR, pi: &PolicyTable) -> RewardPolytope {
    build_polytope(m, pi, Restriction::None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bellman_residuals_vanish(d in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_mdp(&mut rng, d, false).unwrap();
        let pi = random_deterministic_policy(&mut rng, d).unwrap();
        let r = random_reward(&mut rng, d).unwrap();
        let ev = evaluate_policy(&m, &pi, &r).unwrap();
        let opt = optimal_values(&m, &r).unwrap();
        prop_assert!(ev.bellman_residual(&m, r.values()) <= 1e-10);
        prop_assert!(opt.bellman_residual(&m, r.values()) <= 1e-10);
        for h in 0..d.h {
            for s in 0..d.s {
                let cap = (d.h - h) as f64 + 1e-12;
                prop_assert!(ev.v(h, s).abs() <= cap && opt.v(h, s).abs() <= cap);
                prop_assert!(ev.v(h, s) <= opt.v(h, s) + 1e-10);
            }
        }
    }

    #[test]
    fn greedy_policy_is_optimal(d in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_mdp(&mut rng, d, false).unwrap();
        let r = random_reward(&mut rng, d).unwrap();
        let opt = optimal_values(&m, &r).unwrap();
        let g = greedy_policy(&opt);
        let adv = advantage(&m, &g, &r).unwrap();
        prop_assert!(adv.iter().all(|&x| x <= 1e-10));
        let ev = evaluate_policy(&m, &g, &r).unwrap();
        for h in 0..d.h {
            for s in 0..d.s {
                prop_assert!((ev.v(h, s) - opt.v(h, s)).abs() <= 1e-10);
            }
        }
        prop_assert!(is_feasible(&m, &g, &r, 1e-10).unwrap().feasible);
    }

    #[test]
    fn expert_weighted_advantage_is_zero(d in dims(), seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_mdp(&mut rng, d, false).unwrap();
        let pi = if d.a >= 2 { random_stochastic_policy(&mut rng, d, 0.3).unwrap() } else { random_deterministic_policy(&mut rng, d).unwrap() };
        let r = random_reward(&mut rng, d).unwrap();
        let adv = advantage(&m, &pi, &r).unwrap();
        for h in 0..d.h {
            for s in 0..d.s {
                let w: f64 = (0..d.a).map(|a| pi.prob(h, s, a) * adv[d.idx(h, s, a)]).sum();
                prop_assert!(w.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn single_stage_qstar_distance_is_dg(s in 1usize..=4, a in 1usize..=4, seed in any::<u64>()) {
        let d = Dims::new(s, a, 1);
        let mut rng = rng_for(seed);
        let m = random_mdp(&mut rng, d, false).unwrap();
        let r = random_reward(&mut rng, d).unwrap();
        let r2 = random_reward(&mut rng, d).unwrap();
        prop_assert!((d_qstar(&r, &r2, &m).unwrap() - d_g(&r, &r2).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn pinsker_holds(k in 2usize..=8, seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let p = random_distribution(&mut rng, k, true);
        let q = random_distribution(&mut rng, k, false);
        let kl = kl_categorical(&p, &q).unwrap();
        prop_assert!(kl >= 0.0);
        prop_assert!(l1(&p, &q) <= (2.0 * kl).sqrt() + 1e-12);
    }

    #[test]
    fn perturbed_uniform_kl_bounded(half in 1usize..=6, eps in 0.0f64..=0.5, seed in any::<u64>()) {
        let mut v: Vec<i8> = (0..2 * half).map(|i| if i < half { 1 } else { -1 }).collect();
        let mut rng = rng_for(seed);
        for i in (1..v.len()).rev() {
            v.swap(i, rng.gen_range(0..=i));
        }
        let (p, q) = perturbed_uniform(&v, eps);
        prop_assert!(kl_categorical(&p, &q).unwrap() <= 2.0 * eps * eps + 1e-15);
        prop_assert!(kl_categorical(&q, &p).unwrap() <= 2.0 * eps * eps + 1e-15);
    }

    #[test]
    fn empirical_estimates_are_stochastic(d in dims(), hom in any::<bool>(), seed in any::<u64>(), rounds in 0usize..4) {
        let (m, pi) = problem(d, seed, true);
        let mut oracle = GenerativeOracle::new(m, pi, seed).unwrap();
        let mut data = SampleDataset::new(d);
        let mut rng = rng_for(seed ^ 1);
        for _ in 0..rounds * d.len() {
            let (s, a, h) = (rng.gen_range(0..d.s), rng.gen_range(0..d.a), rng.gen_range(0..d.h));
            data.collect(&mut oracle, s, a, h).unwrap();
        }
        prop_assert_eq!(data.total(), (rounds * d.len()) as u64);
        prop_assert_eq!(data.visits.iter().sum::<u64>(), data.total());
        prop_assert_eq!(data.transitions.iter().sum::<u64>(), data.total());
        let (mh, ph) = build_empirical(&data, hom).unwrap();
        prop_assert_eq!(mh.is_homogeneous(), hom);
        for h in 0..d.h {
            for s in 0..d.s {
                prop_assert!((ph.dist(h, s).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                for a in 0..d.a {
                    let row = mh.row(h, s, a);
                    prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                    prop_assert!(row.iter().all(|&x| x >= 0.0));
                    // Observed expert actions are always in the estimated support.
                    if data.expert[d.idx(h, s, a)] > 0 {
                        prop_assert!(ph.supports(h, s, a));
                    }
                }
            }
        }
    }

    #[test]
    fn transport_stays_feasible_and_close(d in small_dims(12), seed in any::<u64>(), scale in 0.0f64..=1.0) {
        let (m, pi) = problem(d, seed, true);
        let mut rng = rng_for(seed ^ 2);
        let m2 = perturb_mdp(&mut rng, &m, scale).unwrap();
        let pi2 = if rng.gen_bool(0.5) { pi.clone() } else { random_deterministic_policy(&mut rng, d).unwrap() };
        // A feasible source reward: any point of the feasible set.
        let p = polytope(&m, &pi);
        let c: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = p.maximize(&c).unwrap().expect("feasible set is non-empty");
        let r = RewardTable::new(d, x.iter().map(|v| v.clamp(-1.0, 1.0)).collect(), Restriction::None).unwrap();
        let dec = decompose_reward(&m, &pi, &r);
        prop_assume!(dec.is_ok());
        let rebuilt = dec.unwrap().reconstruct(&m, &pi, 1.0);
        prop_assert!(rebuilt.iter().zip(r.values()).all(|(a, b)| (a - b).abs() <= 1e-9));
        let t = transport_reward(&r, (&m, &pi), (&m2, &pi2)).unwrap();
        prop_assert!(t.reward.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        prop_assert!(is_feasible(&m2, &pi2, &t.reward, 1e-9).unwrap().feasible);
        prop_assert!(d_g(&r, &t.reward).unwrap() <= lipschitz_bound(t.epsilon) + 1e-9);
        // With matching supports only the kernel term moves the reward, and
        // that term is bounded by the problem distance.
        let same_support = (0..d.len()).all(|i| {
            let (h, s, a) = d.unflatten(i);
            pi.supports(h, s, a) == pi2.supports(h, s, a)
        });
        if same_support {
            let rho = rho_g(&m, &pi, &m2, &pi2).unwrap().value;
            prop_assert!(t.epsilon <= rho + 1e-9);
            prop_assert!(d_g(&r, &t.reward).unwrap() <= lipschitz_bound(rho) + 1e-9);
        }
    }
}

/// A support change can move the transported reward further than the
/// problem-distance bound, since the advantage magnitude reaches
/// `2 (H - h + 1)`; the feasible sets themselves stay within it.
#[test]
fn support_change_transport_overshoots_but_sets_do_not() {
    let d = Dims::new(1, 2, 1);
    let m = MdpR::new(d, vec![1.0, 1.0], false).unwrap();
    let pi = PolicyTable::stationary(d, &[0]).unwrap();
    let pi2 = PolicyTable::stationary(d, &[1]).unwrap();
    let r = RewardTable::new(d, vec![1.0, -1.0], Restriction::None).unwrap();
    let t = transport_reward(&r, (&m, &pi), (&m, &pi2)).unwrap();
    let rho = rho_g(&m, &pi, &m, &pi2).unwrap().value;
    assert_eq!(rho, 1.0);
    assert!((t.epsilon - 2.0).abs() < 1e-12);
    assert!((d_g(&r, &t.reward).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    let h = hausdorff(&polytope(&m, &pi), &polytope(&m, &pi2), Method::default()).unwrap();
    assert!(h.value <= lipschitz_bound(rho) + 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hausdorff_symmetric_and_zero_on_self(d in small_dims(8), seed in any::<u64>()) {
        let (m, pi) = problem(d, seed, true);
        let mut rng = rng_for(seed ^ 3);
        let m2 = perturb_mdp(&mut rng, &m, 0.5).unwrap();
        let p = polytope(&m, &pi);
        let q = polytope(&m2, &pi);
        let pq = hausdorff(&p, &q, Method::default()).unwrap();
        let qp = hausdorff(&q, &p, Method::default()).unwrap();
        prop_assert!((pq.value - qp.value).abs() <= 1e-9);
        prop_assert!((pq.forward.value - qp.backward.value).abs() <= 1e-9);
        prop_assert!(hausdorff(&p, &p, Method::default()).unwrap().value <= 1e-9);
    }

    #[test]
    fn hausdorff_triangle_inequality(d in small_dims(8), seed in any::<u64>()) {
        let (m, pi) = problem(d, seed, false);
        let mut rng = rng_for(seed ^ 4);
        let m2 = perturb_mdp(&mut rng, &m, 0.5).unwrap();
        let m3 = perturb_mdp(&mut rng, &m, 0.5).unwrap();
        let pi3 = random_deterministic_policy(&mut rng, d).unwrap();
        let a = polytope(&m, &pi);
        let b = polytope(&m2, &pi);
        let c = polytope(&m3, &pi3);
        let h = |x: &RewardPolytope, y: &RewardPolytope| hausdorff(x, y, Method::default()).unwrap().value;
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-9);
    }

    #[test]
    fn randomized_never_exceeds_exact(d in small_dims(8), seed in any::<u64>()) {
        let (m, pi) = problem(d, seed, true);
        let mut rng = rng_for(seed ^ 5);
        let m2 = perturb_mdp(&mut rng, &m, 1.0).unwrap();
        let pi2 = random_deterministic_policy(&mut rng, d).unwrap();
        let p = polytope(&m, &pi);
        let q = polytope(&m2, &pi2);
        let exact = hausdorff(&p, &q, Method::default()).unwrap().value;
        let lower = hausdorff(&p, &q, Method::Randomized { samples: 16, seed }).unwrap().value;
        prop_assert!(lower <= exact + 1e-9);
    }

    #[test]
    fn vertices_lie_in_the_polytope(d in small_dims(10), seed in any::<u64>()) {
        let (m, pi) = problem(d, seed, true);
        let p = polytope(&m, &pi);
        let vs = enumerate_vertices(&p, 12).unwrap();
        prop_assert!(!vs.is_empty());
        for v in &vs {
            prop_assert!(p.contains(v, 1e-7));
        }
        // Every LP optimum is matched by some enumerated vertex.
        let mut rng = rng_for(seed ^ 6);
        let c: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let best = p.maximize(&c).unwrap().unwrap();
        let dot = |x: &[f64]| x.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
        let top = vs.iter().map(|v| dot(v)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((top - dot(&best)).abs() <= 1e-7);
    }

    #[test]
    fn stopping_rule_is_tight(s in 1usize..=3, a in 1usize..=2, h in 1usize..=3, eps in 0.8f64..3.0, seed in any::<u64>(), variant in 0usize..4) {
        let d = Dims::new(s, a, h);
        let variant = Variant::ALL[variant];
        let mut rng = rng_for(seed);
        let m = random_mdp(&mut rng, d, variant.homogeneous()).unwrap();
        let pi = if variant.known_policy() || a < 2 {
            random_deterministic_policy(&mut rng, d).unwrap()
        } else {
            random_stochastic_policy(&mut rng, d, 0.4).unwrap()
        };
        let mut cfg = ConfidenceConfig::new(eps, 0.1, variant);
        if !variant.known_policy() {
            cfg = cfg.with_pi_min(0.4);
        }
        let mut oracle = GenerativeOracle::new(m, pi, seed).unwrap();
        let trace = run_us_irl(&mut oracle, &cfg).unwrap();
        prop_assert!(!trace.capped);
        prop_assert!(trace.final_eps() <= eps);
        let n = trace.eps_rounds.len();
        prop_assert!(n >= 1);
        if n >= 2 {
            prop_assert!(trace.eps_rounds[n - 2] > eps);
        }
        prop_assert_eq!(trace.tau, trace.rounds * d.len() as u64);
        prop_assert_eq!(oracle.queries(), trace.tau);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lower_bounds_below_upper_bounds_in_range(
        s in 9usize..=20, a in 2usize..=6, h in 12usize..=30,
        eps in 0.05f64..=0.5, delta in 0.001f64..=0.03, pi_min in 0.05f64..=0.5, variant in 0usize..4,
    ) {
        let d = Dims::new(s, a, h);
        let variant = Variant::ALL[variant];
        let pm = (!variant.known_policy()).then_some(pi_min);
        let lower = lower_bound_tau(d, eps, delta, variant, pm).unwrap();
        let upper = upper_bound_tau(d, eps, delta, variant, pm).unwrap();
        prop_assert!(lower.in_range);
        prop_assert!(lower.value <= upper);
    }
}
