//! Exit criteria. Each test prints one `PASS`/`FAIL` line and then asserts.

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::Path;

use multidiff_cli::presets::{reproduce, PresetOptions};
use multidiff_core::ame::{init_ame, AmeSystem};
use multidiff_core::combin;
use multidiff_core::games::{CoordinationParams, UtilityParams};
use multidiff_core::mf::{phase_field, MfState, MfSystem, RegularMf};
use multidiff_core::net::{truncated_poisson, DEFAULT_COVERAGE};
use multidiff_core::ode::Integrator;
use multidiff_core::sim::{
    run_ensemble, run_ensemble_members, stream_rng, symmetry_sweep, NetworkSpec, SimConfig, SweepParam, SweepTable,
};
use multidiff_core::trajectory::uniform_times;
use multidiff_core::{DegreeDistribution, Model, NeighborProfile, Network, Strategy};
use num_rational::Ratio;

type Q = Ratio<i64>;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn coord(a: f64, b: f64, delta: f64) -> Model {
    Model::Coordination(CoordinationParams::new(a, b, 1.0, delta).unwrap())
}

fn util(alpha_a: f64, alpha_b: f64, beta: f64) -> Model {
    Model::Utility(UtilityParams::new(alpha_a, alpha_b, 0.2, beta).unwrap())
}

fn seeds(r: f64) -> [f64; 4] {
    [1.0 - 2.0 * r, r, r, 0.0]
}

#[test]
fn criterion_01_conservation_and_symmetry() {
    let times = uniform_times(50.0, 1.0);
    let mut worst_norm = 0.0f64;
    let mut worst_sym = 0.0f64;
    let cases = [(coord(4.0, 4.0, 0.0), seeds(0.01)), (util(0.4, 0.4, 0.0), seeds(0.02))];
    let dds = [DegreeDistribution::point_mass(4), truncated_poisson(4.0, DEFAULT_COVERAGE).unwrap()];
    for (model, init) in cases {
        for dd in &dds {
            let degrees: Vec<usize> = (0..=dd.k_max).filter(|&k| dd.q(k) > 0.0).collect();
            let sys = AmeSystem::new(dd, model);
            let (tr, states) = sys.solve_with_snapshots(&init_ame(dd, init).unwrap(), 50.0, &times, &times).unwrap();
            for st in &states {
                for &k in &degrees {
                    worst_norm = worst_norm.max((st.degree_total(k) - 1.0).abs());
                }
            }
            for r in &tr.shares {
                worst_sym = worst_sym.max((r[1] - r[2]).abs());
                worst_norm = worst_norm.max((r.iter().sum::<f64>() - 1.0).abs());
            }

            let mf = MfSystem::new(dd, model);
            let (tr, states) = mf.solve_with_states(&MfState::init(dd, init).unwrap(), 50.0, &times).unwrap();
            for st in &states {
                for &k in &degrees {
                    worst_norm = worst_norm.max((st.rho[k].iter().sum::<f64>() - 1.0).abs());
                }
            }
            for r in &tr.shares {
                worst_sym = worst_sym.max((r[1] - r[2]).abs());
            }
        }
    }
    let ok = worst_norm < 1e-8 && worst_sym < 1e-8;
    report(
        1,
        "conservation-symmetry",
        ok,
        format!("max normalization error {worst_norm:e}, max |rho01-rho10| {worst_sym:e}"),
    );
    assert!(ok);
}

/// Sign of a rational.
fn sgn(q: Q) -> i32 {
    if q > Q::from_integer(0) {
        1
    } else if q < Q::from_integer(0) {
        -1
    } else {
        0
    }
}

/// Argmax set from pairwise comparison signs `cmp[s][t] = sign(v_s - v_t)`.
fn argmax_from_pairs(cmp: &[[i32; 4]; 4]) -> Vec<Strategy> {
    Strategy::ALL.into_iter().filter(|s| (0..4).all(|t| cmp[s.index()][t] >= 0)).collect()
}

fn antisymmetric(pairs: &[(usize, usize, i32)]) -> [[i32; 4]; 4] {
    let mut cmp = [[0; 4]; 4];
    for &(s, t, v) in pairs {
        cmp[s][t] = v;
        cmp[t][s] = -v;
    }
    cmp
}

/// Fractional threshold rules for the coordination game; all inputs in sixteenths.
fn coordination_oracle(a: Q, b: Q, c: Q, delta: Q, m: &NeighborProfile) -> Vec<Strategy> {
    let [_, m01, m10, m11] = m.counts().map(|v| Q::from_integer(v as i64));
    let k = Q::from_integer(m.degree() as i64);
    if m.degree() == 0 {
        return Strategy::ALL.to_vec();
    }
    let one = Q::from_integer(1);
    let pairs = [
        (1, 0, sgn((m01 + m11) / k - c / a)),
        (2, 0, sgn((m10 + m11) / k - c / b)),
        (3, 1, sgn(m10 / k + (one + delta / b) * m11 / k - c / b)),
        (3, 2, sgn(m01 / k + (one + delta / a) * m11 / k - c / a)),
        (1, 2, sgn(a * m01 - b * m10 + (a - b) * m11)),
        (3, 0, sgn(-Q::from_integer(2) * c * k + a * m01 + b * m10 + (a + b + delta) * m11)),
    ];
    argmax_from_pairs(&antisymmetric(&pairs))
}

/// Absolute threshold rules for the utility model, with the all-non-positive rule.
fn utility_oracle(alpha_a: Q, alpha_b: Q, gamma: Q, beta: Q, m: &NeighborProfile) -> Vec<Strategy> {
    let [_, m01, m10, m11] = m.counts().map(|v| Q::from_integer(v as i64));
    let half = Q::new(1, 2);
    let pairs = [
        (1, 0, sgn(m01 + m11 - (half - alpha_a) / gamma)),
        (2, 0, sgn(m10 + m11 - (half - alpha_b) / gamma)),
        (3, 1, sgn(m10 + m11 - (half - alpha_b - beta / 2) / gamma)),
        (3, 2, sgn(m01 + m11 - (half - alpha_a - beta / 2) / gamma)),
        (1, 2, sgn(alpha_a - alpha_b + gamma * (m01 - m10))),
        (3, 0, sgn(alpha_a + alpha_b - 1 + beta / 2 + gamma * (m01 + m10 + m11 * 2))),
    ];
    let best = argmax_from_pairs(&antisymmetric(&pairs));
    if best.contains(&Strategy::S00) {
        vec![Strategy::S00]
    } else {
        best
    }
}

fn sixteenths(v: i64) -> (Q, f64) {
    (Q::new(v, 16), v as f64 / 16.0)
}

#[test]
fn criterion_02_threshold_oracle() {
    let profiles: Vec<NeighborProfile> = (0..=10).flat_map(combin::enumerate).collect();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();

    let payoffs = [16, 20, 32, 56, 64, 96];
    let costs = [8, 16, 24];
    let deltas = [-32, -16, -4, 0, 4, 16, 32];
    for &a in &payoffs {
        for &b in &payoffs {
            for &c in &costs {
                for &d in &deltas {
                    let ((aq, af), (bq, bf), (cq, cf), (dq, df)) =
                        (sixteenths(a), sixteenths(b), sixteenths(c), sixteenths(d));
                    let Ok(p) = CoordinationParams::new(af, bf, cf, df) else { continue };
                    let model = Model::Coordination(p);
                    for m in &profiles {
                        let want = coordination_oracle(aq, bq, cq, dq, m);
                        let got: Vec<Strategy> = model.best_response(m).iter().collect();
                        checked += 1;
                        if want != got {
                            mismatches.push(format!("coordination a={af} b={bf} c={cf} delta={df} m={:?}", m.counts()));
                        }
                    }
                }
            }
        }
    }

    let alphas = [0, 4, 6, 7, 8];
    let gammas = [1, 2, 4, 8];
    let betas = [-16, -8, -4, 0, 2, 4];
    for &aa in &alphas {
        for &ab in &alphas {
            for &g in &gammas {
                for &be in &betas {
                    let ((aaq, aaf), (abq, abf), (gq, gf), (bq, bf)) =
                        (sixteenths(aa), sixteenths(ab), sixteenths(g), sixteenths(be));
                    let Ok(p) = UtilityParams::new(aaf, abf, gf, bf) else { continue };
                    let model = Model::Utility(p);
                    for m in &profiles {
                        let want = utility_oracle(aaq, abq, gq, bq, m);
                        let got: Vec<Strategy> = model.best_response(m).iter().collect();
                        checked += 1;
                        if want != got {
                            mismatches.push(format!(
                                "utility alphaA={aaf} alphaB={abf} gamma={gf} beta={bf} m={:?}",
                                m.counts()
                            ));
                        }
                    }
                }
            }
        }
    }
    let ok = mismatches.is_empty() && checked > 100_000;
    report(2, "threshold-oracle", ok, format!("{checked} profile/parameter pairs, {} mismatches", mismatches.len()));
    for m in mismatches.iter().take(10) {
        println!("    mismatch: {m}");
    }
    assert!(ok);
}

#[test]
fn criterion_03_saddle_converges_to_both() {
    let model = coord(4.0, 4.0, 0.0);
    let dd = DegreeDistribution::point_mass(4);
    let mf = MfSystem::new(&dd, model).solve(&MfState::init(&dd, seeds(0.01)).unwrap(), 50.0, &[50.0]).unwrap();
    let ame = AmeSystem::new(&dd, model).solve(&init_ame(&dd, seeds(0.01)).unwrap(), 50.0, &[50.0]).unwrap();
    let (m11, a11) = (mf.last().unwrap()[3], ame.last().unwrap()[3]);
    let ok = m11 > 0.99 && a11 > 0.99;
    report(3, "mf-saddle", ok, format!("MF rho11(50) = {m11:.9}, AME rho11(50) = {a11:.9}"));
    assert!(ok);
}

fn coordination_config(delta: f64, horizon: f64) -> SimConfig {
    SimConfig::new(coord(4.0, 4.0, delta), seeds(0.01), horizon, vec![0.0, horizon], 1)
}

/// Largest connected component of `net` as a membership mask.
fn giant_mask(net: &Network) -> Vec<bool> {
    let n = net.n_nodes();
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        comp[start] = id;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for &j in net.neighbors(i) {
                if comp[j] == usize::MAX {
                    comp[j] = id;
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    let giant = (0..sizes.len()).max_by_key(|&c| sizes[c]).unwrap_or(0);
    comp.into_iter().map(|c| c == giant).collect()
}

#[test]
fn criterion_04_complements_keep_symmetry() {
    let spec = NetworkSpec::ErdosRenyi { n: 3000, z: 4.0 };
    let cfg = coordination_config(2.0, 100.0);
    let runs = run_ensemble_members(&spec, &cfg, 100).unwrap();
    let count = |state: &[Strategy], s: Strategy, mask: Option<&[bool]>| {
        state.iter().enumerate().filter(|&(i, &x)| x == s && mask.is_none_or(|m| m[i])).count()
    };
    let equal = runs
        .iter()
        .filter(|r| count(&r.final_state, Strategy::S01, None) == count(&r.final_state, Strategy::S10, None))
        .count();
    // the network of run i is the first draw of its stream
    let equal_giant = runs
        .iter()
        .enumerate()
        .filter(|(i, r)| {
            let net = spec.build(&mut stream_rng(cfg.rng_seed, *i as u64)).unwrap();
            let mask = giant_mask(&net);
            count(&r.final_state, Strategy::S01, Some(&mask)) == count(&r.final_state, Strategy::S10, Some(&mask))
        })
        .count();
    let ok = equal >= 99;
    report(
        4,
        "complements-symmetric",
        ok,
        format!("{equal}/100 runs with equal 01/10 counts; {equal_giant}/100 equal within the largest component"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_substitutes_break_symmetry() {
    let summary =
        run_ensemble(&NetworkSpec::ErdosRenyi { n: 3000, z: 4.0 }, &coordination_config(-2.0, 100.0), 100).unwrap();
    let dominated = summary.fraction_dominated(0.9);
    let ok = summary.std_delta > 0.8 && dominated >= 0.7;
    report(
        5,
        "substitutes-break-symmetry",
        ok,
        format!("std = {:.4}, dominated fraction = {dominated:.2}", summary.std_delta),
    );
    assert!(ok);
}

#[test]
fn criterion_06_ame_tracks_simulation() {
    let times = uniform_times(50.0, 1.0);
    let dd = truncated_poisson(2.5, DEFAULT_COVERAGE).unwrap();
    let spec = NetworkSpec::ErdosRenyi { n: 3000, z: 2.5 };
    let mut gaps = Vec::new();
    for delta in [0.0, 2.0] {
        let model = coord(4.0, 4.0, delta);
        let ame = AmeSystem::new(&dd, model).solve(&init_ame(&dd, seeds(0.02)).unwrap(), 50.0, &times).unwrap();
        let cfg = SimConfig::new(model, seeds(0.02), 50.0, times.clone(), 1);
        let sim = run_ensemble(&spec, &cfg, 100).unwrap();
        assert_eq!(sim.times, ame.times);
        let gap = ame
            .shares
            .iter()
            .zip(&sim.mean)
            .flat_map(|(a, m)| (0..4).map(move |s| (a[s] - m[s]).abs()))
            .fold(0.0f64, f64::max);
        gaps.push((delta, gap));
    }
    let ok = gaps.iter().all(|&(_, g)| g <= 0.05);
    let detail = gaps.iter().map(|(d, g)| format!("delta={d}: {g:.4}")).collect::<Vec<_>>().join(", ");
    report(6, "ame-tracks-simulation", ok, format!("max |AME - sim mean| {detail}"));
    assert!(ok);
}

#[test]
fn criterion_07_utility_phase_structure() {
    let z = 4;
    let slice_at_one = |model: &Model| {
        let mut y = seeds(0.02).to_vec();
        Integrator::default().integrate(&RegularMf::new(z, model), 0.0, &mut y, &[1.0], |_, _| {}).unwrap();
        y[3]
    };
    let mut lines = Vec::new();
    let mut ok = true;

    let sub = util(0.4, 0.4, -1.0);
    let neutral = util(0.4, 0.4, 0.0);
    let slices = |m: &Model| vec![0.0, slice_at_one(m), 0.25, 0.5];
    for slice in slices(&sub) {
        let field = phase_field(&sub, z, slice, 101).unwrap();
        let max = field.feasible().map(|p| p.derivs[2]).fold(f64::NEG_INFINITY, f64::max);
        ok &= max <= 1e-12;
        lines.push(format!("beta=-1 slice {slice:.4}: max d11 {max:e}"));
    }
    for slice in slices(&neutral) {
        let field = phase_field(&neutral, z, slice, 101).unwrap();
        let min = field
            .feasible()
            .filter(|p| p.rho01 > 0.0 && p.rho10 > 0.0 && p.rho01 + p.rho10 + slice < 1.0 - 1e-12)
            .map(|p| p.derivs[2])
            .fold(f64::INFINITY, f64::min);
        ok &= min > 0.0;
        lines.push(format!("beta=0 slice {slice:.4}: min interior d11 {min:e}"));
    }
    report(7, "utility-phase-structure", ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn criterion_08_utility_dominant_switch() {
    let model = util(0.4, 0.3, 0.0);
    let at = |z: f64| {
        let dd = truncated_poisson(z, DEFAULT_COVERAGE).unwrap();
        *AmeSystem::new(&dd, model).solve(&init_ame(&dd, seeds(0.02)).unwrap(), 50.0, &[50.0]).unwrap().last().unwrap()
    };
    let (r2, r4) = (at(2.0), at(4.0));
    let ok = r2[1] > 0.5 && r4[3] > 0.5;
    report(8, "utility-dominant-switch", ok, format!("z=2 rho01 = {:.4}, z=4 rho11 = {:.4}", r2[1], r4[3]));
    assert!(ok);
}

/// Non-increasing, with at most one rise that stays within two combined standard errors.
fn monotone_within_noise(t: &SweepTable) -> (bool, String) {
    let mut rises = Vec::new();
    for w in t.rows.windows(2) {
        let (lo, hi) = (&w[0].1, &w[1].1);
        if hi.std_delta > lo.std_delta {
            let se = (lo.std_delta_error().powi(2) + hi.std_delta_error().powi(2)).sqrt();
            rises.push((hi.std_delta - lo.std_delta, 2.0 * se));
        }
    }
    let ok = rises.is_empty() || (rises.len() == 1 && rises[0].0 <= rises[0].1);
    let stds = t.rows.iter().map(|(v, s)| format!("{v}:{:.4}", s.std_delta)).collect::<Vec<_>>().join(" ");
    (ok, format!("{stds}; rises {rises:?}"))
}

#[test]
fn criterion_09_substitutability_monotonicity() {
    let spec = NetworkSpec::ErdosRenyi { n: 3000, z: 4.0 };
    let by_delta =
        symmetry_sweep(&spec, &coordination_config(0.0, 100.0), SweepParam::Delta, &[-2.0, -1.0, 0.0, 1.0, 2.0], 100)
            .unwrap();
    let ucfg = SimConfig::new(util(0.4, 0.4, 0.0), seeds(0.02), 100.0, vec![0.0, 100.0], 1);
    let by_beta = symmetry_sweep(&spec, &ucfg, SweepParam::Beta, &[-1.0, -0.5, 0.0, 0.1], 100).unwrap();
    let (ok_d, det_d) = monotone_within_noise(&by_delta);
    let (ok_b, det_b) = monotone_within_noise(&by_beta);
    let ok = ok_d && ok_b;
    report(9, "substitutability-monotonicity", ok, format!("delta [{det_d}], beta [{det_b}]"));
    assert!(ok);
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn criterion_10_presets_are_deterministic() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (preset, runs) in [("fig4", None), ("fig6", Some(20)), ("fig9", None)] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for d in [&d1, &d2] {
            let mut opts = PresetOptions::new(d.path(), 7);
            opts.runs = runs;
            reproduce(preset, opts).unwrap();
        }
        let (a, b) = (csv_files(d1.path()), csv_files(d2.path()));
        let same = !a.is_empty() && a == b;
        ok &= same;
        lines.push(format!("{preset}: {} csv files {}", a.len(), if same { "identical" } else { "differ" }));
    }
    report(10, "determinism", ok, lines.join("; "));
    assert!(ok);
}
