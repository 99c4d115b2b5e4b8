use std::sync::Arc;

use multidiff_core::games::{CoordinationParams, UtilityParams};
use multidiff_core::net::generate_er;
use multidiff_core::sim::*;
use multidiff_core::trajectory::uniform_times;
use multidiff_core::{Model, Network, Strategy};

fn coord(a: f64, b: f64, delta: f64) -> Model {
    Model::Coordination(CoordinationParams::new(a, b, 1.0, delta).unwrap())
}

// Payoffs recomputed from the raw neighbor lists.
fn audit_payoffs(net: &Network, i: usize, model: &Model) -> [f64; 4] {
    let mut n = [0.0f64; 4];
    for &j in net.neighbors(i) {
        n[net.strategies[j].index()] += 1.0;
    }
    let k = n.iter().sum::<f64>();
    match model {
        Model::Coordination(p) => [
            0.0,
            p.a * (n[1] + n[3]) - p.c * k,
            p.b * (n[2] + n[3]) - p.c * k,
            p.a * n[1] + p.b * n[2] + (p.a + p.b + p.delta) * n[3] - 2.0 * p.c * k,
        ],
        Model::Utility(p) => {
            let u01 = p.alpha_a - 0.5 + p.gamma * (n[1] + n[3]);
            let u10 = p.alpha_b - 0.5 + p.gamma * (n[2] + n[3]);
            let u11 = p.alpha_a + p.alpha_b - 1.0 + p.beta / 2.0 + p.gamma * (n[1] + n[2] + 2.0 * n[3]);
            if u01.max(u10).max(u11) <= 0.0 {
                [0.0, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY]
            } else {
                [f64::NEG_INFINITY, u01, u10, u11]
            }
        }
    }
}

#[test]
fn converged_state_is_a_nash_equilibrium() {
    // dyadic parameters so the audit's arithmetic is exact
    let models = [
        coord(4.0, 4.0, 2.0),
        coord(6.0, 4.0, -2.0),
        Model::Utility(UtilityParams::new(0.375, 0.25, 0.25, 0.0).unwrap()),
    ];
    for (r, model) in models.into_iter().enumerate() {
        let mut rng = stream_rng(21, r as u64);
        let mut net = generate_er(2000, 3.0, &mut rng).unwrap();
        seed_assign(&mut net, &[0.9, 0.05, 0.05, 0.0], &mut rng).unwrap();
        let cfg = SimConfig::new(model, [0.9, 0.05, 0.05, 0.0], 200.0, vec![0.0, 200.0], 0);
        let res = run_simulation_with_rng(&mut net, &cfg, &mut rng, "er").unwrap();
        assert!(res.converged);
        for i in 0..net.n_nodes() {
            if net.degree(i) == 0 {
                continue;
            }
            let v = audit_payoffs(&net, i, &model);
            let best = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(v[net.strategies[i].index()], best, "node {i} under {model:?}");
        }
    }
}

#[test]
fn isolated_players_keep_their_seed() {
    let mut net = Network::from_edges(6, [(0, 1), (1, 2)]);
    net.strategies = vec![Strategy::S00, Strategy::S00, Strategy::S00, Strategy::S01, Strategy::S10, Strategy::S11];
    let cfg = SimConfig::new(coord(4.0, 4.0, 0.0), [1.0, 0.0, 0.0, 0.0], 50.0, vec![50.0], 3);
    let res = run_simulation(&mut net, &cfg).unwrap();
    assert_eq!(&res.final_state[3..], &[Strategy::S01, Strategy::S10, Strategy::S11]);
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    let spec = NetworkSpec::ErdosRenyi { n: 800, z: 4.0 };
    let cfg = SimConfig::new(coord(4.0, 4.0, -2.0), [0.96, 0.02, 0.02, 0.0], 60.0, uniform_times(60.0, 5.0), 99);
    let a = run_ensemble(&spec, &cfg, 12).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_ensemble(&spec, &cfg, 12)).unwrap();
    assert_eq!(a, b);
    let single = run_member(&spec, &cfg, 5).unwrap();
    assert_eq!(single.final_shares(), a.terminal[5]);
    let other = run_ensemble(&spec, &SimConfig { rng_seed: 100, ..cfg }, 12).unwrap();
    assert_ne!(a.deltas, other.deltas);
}

#[test]
fn trajectory_bookkeeping() {
    let spec = NetworkSpec::ErdosRenyi { n: 1000, z: 2.5 };
    let times = uniform_times(40.0, 0.5);
    let cfg = SimConfig::new(coord(4.0, 4.0, 0.0), [0.96, 0.02, 0.02, 0.0], 40.0, times.clone(), 5);
    for run in 0..4 {
        let res = run_member(&spec, &cfg, run).unwrap();
        assert_eq!(res.trajectory.times, times);
        assert_eq!(res.trajectory.shares[0], [0.96, 0.02, 0.02, 0.0]);
        for s in &res.trajectory.shares {
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for v in s {
                assert!((v * 1000.0 - (v * 1000.0).round()).abs() < 1e-9);
            }
        }
        assert_eq!(*res.trajectory.last().unwrap(), res.final_shares());
        assert!(res.steps <= 4000);
    }
}

#[test]
fn fixed_network_is_shared_across_runs() {
    let net = generate_er(600, 3.0, &mut stream_rng(1, 0)).unwrap();
    let spec = NetworkSpec::Fixed(Arc::new(net.clone()));
    let cfg = SimConfig::new(coord(6.0, 4.0, 0.0), [0.8, 0.1, 0.1, 0.0], 30.0, vec![0.0, 30.0], 8);
    let runs = run_ensemble_members(&spec, &cfg, 3).unwrap();
    assert_eq!(runs.len(), 3);
    for r in &runs {
        assert_eq!(r.final_state.len(), net.n_nodes());
    }
}

#[test]
fn mirrored_parameters_mirror_the_ensemble() {
    let spec = NetworkSpec::ErdosRenyi { n: 1000, z: 2.5 };
    let model = coord(6.0, 4.0, 0.0);
    let cfg = SimConfig::new(model, [0.96, 0.03, 0.01, 0.0], 50.0, vec![0.0, 50.0], 17);
    let a = run_ensemble(&spec, &cfg, 60).unwrap();
    let mirrored = SimConfig { model: model.swap_ab(), seed_fractions: [0.96, 0.01, 0.03, 0.0], rng_seed: 18, ..cfg };
    let b = run_ensemble(&spec, &mirrored, 60).unwrap();
    let (ma, mb) = (a.mean.last().unwrap(), b.mean.last().unwrap());
    let (sa, sb) = (a.std.last().unwrap(), b.std.last().unwrap());
    for (x, y) in [(1, 2), (2, 1), (3, 3), (0, 0)] {
        let se = ((sa[x] * sa[x] + sb[y] * sb[y]) / 60.0).sqrt();
        assert!((ma[x] - mb[y]).abs() <= 4.0 * se + 0.01, "{x}: {} vs {}", ma[x], mb[y]);
    }
}

#[test]
fn summary_files_have_expected_columns() {
    let spec = NetworkSpec::Regular { n: 400, z: 4 };
    let cfg = SimConfig::new(coord(4.0, 4.0, -2.0), [0.96, 0.02, 0.02, 0.0], 20.0, uniform_times(20.0, 10.0), 2);
    let s = run_ensemble(&spec, &cfg, 4).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf, &["model=coordination".to_string()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# model=coordination");
    assert_eq!(lines[1], "t,mean00,mean01,mean10,mean11,std00,std01,std10,std11");
    assert_eq!(lines.len(), 2 + 3);
    let mut buf = Vec::new();
    s.write_histogram_csv(&mut buf, &[]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("delta_bin,count"));
    assert_eq!(text.lines().count(), 1 + HISTOGRAM_BINS);
    assert_eq!(s.histogram.iter().sum::<usize>(), 4);
}
