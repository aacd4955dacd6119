//! Acceptance suite: one test per headline guarantee, each at its stated
//! tolerance. Every test prints a single `ACCEPTANCE PASS` line on success
//! (visible under `--nocapture`); a failure is an ordinary assert.

mod common;

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slm::backend::master_round;
use slm::bench::{self, random_search, rsw, simulated_annealing, SaSchedule};
use slm::engine::{run, EngineConfig};
use slm::grid::{Cell, DyadicPoint, Label, SearchDomain};
use slm::harness::{build_config, cmd_bench, cmd_compare, truncate3, CliOverrides, SpeedupRow};
use slm::labeling::{label_vertex, Incumbent, LabelContext, LabelingStrategy, Sense};
use slm::registry::{ClusterTables, EvalStore, ScratchEvaluator};
use slm::ExecutionBackend;

use common::brute_force_label;

fn generations(n: u32) -> EngineConfig {
    EngineConfig { max_generations: n, ..EngineConfig::default() }
}

#[test]
fn criterion_01_bowl_contracts_to_the_known_basin() {
    let f = bench::f1();

    let r3 = run(f.objective.clone(), f.domain.clone(), generations(3), ExecutionBackend::Serial)
        .unwrap();
    assert!(r3.wall_time_s < 1.0, "three generations took {}s", r3.wall_time_s);
    let hit = r3.final_cells.iter().any(|cell| {
        cell.vertices().iter().any(|v| {
            let c = f.domain.coords(v);
            c[0].abs() < 1e-12 && (c[1] - 0.5).abs() < 1e-12
        })
    });
    assert!(hit, "frontier corner set misses (0, 0.5)");

    let r6 = run(f.objective.clone(), f.domain.clone(), generations(6), ExecutionBackend::Serial)
        .unwrap();
    assert!(r6.wall_time_s < 1.0, "six generations took {}s", r6.wall_time_s);
    let b = &r6.best.coords;
    assert!(b[0].abs() <= 0.0625, "best x1 = {}", b[0]);
    assert!((b[1] - 0.4).abs() <= 0.0625, "best x2 = {}", b[1]);

    println!(
        "ACCEPTANCE PASS: criterion 1: bowl frontier holds (0, 0.5) at 3 generations; \
         best vertex ({}, {}) within 0.0625 of (0, 0.4) at 6",
        b[0], b[1]
    );
}

#[test]
fn criterion_02_needle_is_found_within_eleven_generations() {
    let f = bench::easom();
    assert_eq!(f.default_generations, 11);
    let r = run(f.objective.clone(), f.domain.clone(), generations(11), ExecutionBackend::Serial)
        .unwrap();
    assert!(r.wall_time_s < 1.0, "run took {}s", r.wall_time_s);
    let b = &r.best.coords;
    let pi = std::f64::consts::PI;
    assert!((b[0] - pi).abs() <= 0.2, "best x1 = {}", b[0]);
    assert!((b[1] - pi).abs() <= 0.2, "best x2 = {}", b[1]);
    println!(
        "ACCEPTANCE PASS: criterion 2: needle best vertex ({}, {}) within 0.2 of (pi, pi)",
        b[0], b[1]
    );
}

#[test]
fn criterion_03_valley_floor_is_reached_in_four_generations() {
    let f = bench::dejong_f2();
    assert_eq!(f.default_generations, 4);
    let r = run(f.objective.clone(), f.domain.clone(), generations(4), ExecutionBackend::Serial)
        .unwrap();
    assert!(r.wall_time_s < 1.0, "run took {}s", r.wall_time_s);
    let b = &r.best.coords;
    assert!((b[0] - 1.0).abs() <= 0.05, "best x1 = {}", b[0]);
    assert!((b[1] - 1.0).abs() <= 0.05, "best x2 = {}", b[1]);
    println!(
        "ACCEPTANCE PASS: criterion 3: valley best vertex ({}, {}) within 0.05 of (1, 1)",
        b[0], b[1]
    );
}

#[test]
fn criterion_04_foxholes_spot_value_and_local_minimum_certificate() {
    let f = bench::dejong_f5();
    let spot = f.objective.value(&[-32.0, -32.0]);
    assert!((spot - 0.998004).abs() <= 1e-4, "f(-32, -32) = {spot}");

    // Run length chosen so the final generation selects complete cells;
    // longer runs wander onto the surrounding plateau via fallbacks.
    let r = run(f.objective.clone(), f.domain.clone(), generations(5), ExecutionBackend::Serial)
        .unwrap();
    let last = r.generations.last().unwrap();
    assert!(!last.fallback, "final generation fell back instead of completing");

    // Some surviving complete cell must hold its best corner as a
    // zero-displacement fixed point: label 0 with the proposed move equal
    // to the corner itself, a grid-local minimum.
    let witnessed = last.survivors.iter().any(|cell| {
        let corners = cell.vertices();
        let best = last
            .records
            .iter()
            .filter(|rec| corners.contains(&rec.point))
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("surviving cell has labeled corners");
        best.label == Label(0) && best.mutated.as_ref() == Some(&best.point)
    });
    assert!(witnessed, "no surviving cell is anchored by a zero-displacement best corner");

    println!(
        "ACCEPTANCE PASS: criterion 4: f5(-32, -32) = {spot} within 1e-4 of 0.998004; \
         a surviving complete cell holds a grid-local minimum"
    );
}

#[test]
fn criterion_05_labels_match_brute_force_on_a_thousand_random_triples() {
    let f1 = |x: &[f64]| x[0] * x[0] + (x[1] - 0.4) * (x[1] - 0.4);
    let easom = |x: &[f64]| {
        let d = (x[0] - std::f64::consts::PI).powi(2) + (x[1] - std::f64::consts::PI).powi(2);
        -x[0].cos() * x[1].cos() * (-d).exp()
    };
    let rosen = |x: &[f64]| {
        let t = x[0] * x[0] - x[1];
        100.0 * t * t + (1.0 - x[0]) * (1.0 - x[0])
    };
    let fns: [(&(dyn Fn(&[f64]) -> f64 + Sync), SearchDomain); 3] = [
        (&f1, SearchDomain::cube(2, -2.0, 2.0).unwrap()),
        (&easom, SearchDomain::cube(2, -100.0, 100.0).unwrap()),
        (&rosen, SearchDomain::cube(2, -2.048, 2.048).unwrap()),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(1789);
    let mut agreements = 0u32;
    for trial in 0..1000 {
        let (f, domain) = &fns[rng.gen_range(0..3)];
        let level = rng.gen_range(1..=8u32);
        let k: Vec<u64> = (0..2).map(|_| rng.gen_range(0..=1u64 << level)).collect();
        let incumbent = if rng.gen_bool(0.5) {
            let ik: Vec<u64> = (0..2).map(|_| rng.gen_range(0..=1u64 << level)).collect();
            let p = DyadicPoint::new(level, ik);
            let coords = domain.coords(&p);
            let value = f(&coords);
            Some(Incumbent { point: p, coords, value })
        } else {
            None
        };

        let adapter = |x: &[f64]| f(x);
        let scratch = ScratchEvaluator::new(&adapter, domain);
        let ctx = LabelContext {
            objective: &adapter,
            domain,
            sense: Sense::Min,
            strategy: LabelingStrategy::BestNeighbor,
            incumbent: incumbent.as_ref(),
            fd_fallback: true,
            fd_step_rel: 1e-4,
        };
        let v = DyadicPoint::new(level, k.clone());
        let out = label_vertex(&ctx, &scratch, &v, level).unwrap();

        let (label, best_coords) = brute_force_label(
            f,
            domain,
            Sense::Min,
            incumbent.as_ref().map(|i| i.coords.as_slice()),
            level,
            &k,
        );
        assert_eq!(out.label.0, label, "trial {trial}: level {level}, k {k:?}");
        let got = domain.coords(out.mutated.as_ref().unwrap());
        assert_eq!(got, best_coords, "trial {trial}: mutation target");
        agreements += 1;
    }
    assert_eq!(agreements, 1000);
    println!("ACCEPTANCE PASS: criterion 5: 1000/1000 labels agree with brute-force enumeration");
}

#[test]
fn criterion_06_children_share_all_but_one_corner_and_tables_stay_consistent() {
    for n in 1..=4usize {
        let children = Cell::initial(n).subdivide(52).unwrap();
        assert_eq!(children.len(), 1 << n);
        let corner_sets: Vec<BTreeSet<DyadicPoint>> =
            children.iter().map(|c| c.vertices().into_iter().collect()).collect();
        for (i, mine) in corner_sets.iter().enumerate() {
            let shared = mine
                .iter()
                .filter(|p| {
                    corner_sets.iter().enumerate().any(|(j, s)| j != i && s.contains(*p))
                })
                .count();
            assert_eq!(shared, (1 << n) - 1, "dimension {n}, child {i}");
        }
    }

    let domain = SearchDomain::cube(2, 0.0, 1.0).unwrap();
    let mut tables = ClusterTables::new(domain);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10_000 {
        let level = rng.gen_range(0..=8u32);
        let side = 1u64 << level;
        let anchor: Vec<u64> = (0..2).map(|_| rng.gen_range(0..side)).collect();
        tables.register_cell(&Cell::new(level, anchor));
    }
    // Every point a cell lists must list that cell back, and vice versa.
    let cell_count = tables.cell_count() as u64;
    let mut all_points: BTreeSet<DyadicPoint> = BTreeSet::new();
    for id in 1..=cell_count {
        let pts = tables.points_of(id).expect("registered id resolves");
        for p in pts {
            assert!(tables.cells_of(p).unwrap().contains(&id), "cell {id} not listed back");
            all_points.insert(p.clone());
        }
    }
    assert_eq!(all_points.len(), tables.point_count());
    for p in &all_points {
        for id in tables.cells_of(p).unwrap() {
            assert!(tables.points_of(*id).unwrap().contains(p), "point not listed back");
        }
    }

    println!(
        "ACCEPTANCE PASS: criterion 6: each child shares 2^n - 1 corners for n in 1..=4; \
         tables bidirectionally consistent over 10000 registrations \
         ({} cells, {} points)",
        tables.cell_count(),
        tables.point_count()
    );
}

#[test]
fn criterion_07_shared_corners_are_evaluated_once_in_clustered_mode() {
    let f = bench::f1();
    let siblings = Cell::initial(2).subdivide(52).unwrap();
    let ctx = LabelContext {
        objective: f.objective.as_ref(),
        domain: &f.domain,
        sense: Sense::Min,
        strategy: LabelingStrategy::BestNeighbor,
        incumbent: None,
        fd_fallback: true,
        fd_step_rel: 1e-4,
    };

    // Clustered: the shared store computes each distinct point exactly once.
    let store = EvalStore::new(f.objective.clone(), f.domain.clone());
    let labeled =
        master_round(&siblings, &ctx, &ExecutionBackend::Clustered { workers: 2 }, &store)
            .unwrap();
    let slots: usize = labeled.iter().map(|l| l.outcomes.len()).sum();
    assert_eq!(slots, 16, "4 sibling cells, 4 corner slots each");
    let corners: BTreeSet<DyadicPoint> =
        labeled.iter().flat_map(|l| l.outcomes.iter().map(|o| o.point.clone())).collect();
    assert_eq!(corners.len(), 9, "distinct corners among the 16 slots");
    for c in &corners {
        assert!(store.peek(c).is_some(), "corner missing from the shared store");
    }
    assert_eq!(store.unique_evaluations(), store.objective_calls(), "no repeat work");

    // Parallel: per-cell scratch work, shared store untouched.
    let store_p = EvalStore::new(f.objective.clone(), f.domain.clone());
    let labeled_p =
        master_round(&siblings, &ctx, &ExecutionBackend::Parallel { workers: 2 }, &store_p)
            .unwrap();
    let slots_p: usize = labeled_p.iter().map(|l| l.outcomes.len()).sum();
    assert_eq!(slots_p, 16);
    assert_eq!(store_p.len(), 0, "parallel rounds bypass the shared store");
    assert!(labeled_p.iter().map(|l| l.objective_calls).sum::<u64>() > 16);

    // The engine reports the same economy, and an independent registry over
    // the same active cells reproduces its count.
    let clustered = run(
        f.objective.clone(),
        f.domain.clone(),
        generations(2),
        ExecutionBackend::Clustered { workers: 2 },
    )
    .unwrap();
    let parallel = run(
        f.objective.clone(),
        f.domain.clone(),
        generations(2),
        ExecutionBackend::Parallel { workers: 2 },
    )
    .unwrap();
    assert_eq!(clustered.generations[1].cells, 4);
    assert_eq!(clustered.generations[1].distinct_vertices, 9);
    assert_eq!(parallel.generations[1].vertex_slots, 16);
    assert_eq!(clustered.evaluations, 9);
    assert_eq!(parallel.evaluations, 4 + 16);

    let mut tables = ClusterTables::new(f.domain.clone());
    tables.register_cell(&Cell::initial(2));
    for c in &siblings {
        tables.register_cell(c);
    }
    assert_eq!(clustered.evaluations, tables.point_count() as u64);

    println!(
        "ACCEPTANCE PASS: criterion 7: one generation over 4 siblings costs 9 distinct \
         points clustered vs 16 slots parallel; engine count equals registry count"
    );
}

#[test]
fn criterion_08_worker_count_never_changes_the_search() {
    for f in [bench::f1(), bench::easom(), bench::dejong_f2()] {
        let cfg = generations(f.default_generations);
        let serial =
            run(f.objective.clone(), f.domain.clone(), cfg.clone(), ExecutionBackend::Serial)
                .unwrap();
        for kind in ["parallel", "clustered"] {
            let mut counters: Option<(u64, u64, u64)> = None;
            for p in [1usize, 2, 4, 8] {
                let backend = match kind {
                    "parallel" => ExecutionBackend::Parallel { workers: p },
                    _ => ExecutionBackend::Clustered { workers: p },
                };
                let r = run(f.objective.clone(), f.domain.clone(), cfg.clone(), backend).unwrap();
                assert!(
                    r.search_equal(&serial),
                    "{}: {kind} with {p} workers diverged from serial",
                    f.name
                );
                let c = (r.evaluations, r.unique_points, r.objective_calls);
                match &counters {
                    None => counters = Some(c),
                    Some(first) => assert_eq!(
                        c, *first,
                        "{}: {kind} work counters drift with worker count",
                        f.name
                    ),
                }
            }
        }
    }
    println!(
        "ACCEPTANCE PASS: criterion 8: identical search and stable counters for \
         1, 2, 4, 8 workers, parallel and clustered, on all three suite functions"
    );
}

#[test]
fn criterion_09_injected_delay_shows_parallel_speedup_and_exact_column_arithmetic() {
    let cli = CliOverrides {
        function: Some("f1".into()),
        generations: Some(3),
        delay_ms: Some(10),
        trials: Some(1),
        sweep: Some("1,4".into()),
        backend: Some("parallel".into()),
        workers: Some(1),
        seed: Some(0),
        ..CliOverrides::default()
    };
    let cfg = build_config(&cli).unwrap();
    let (rows, _warnings) = cmd_bench(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].np, rows[1].np), (1, 4));
    assert!(rows[1].speedup >= 2.0, "speedup at 4 workers was {}", rows[1].speedup);

    // Every derived column recomputes from the printed times to 3 decimals.
    for r in &rows {
        assert_eq!(r.lb_time, truncate3(rows[0].time / r.np as f64));
        assert_eq!(r.speedup, truncate3(rows[0].time / r.time));
        assert_eq!(r.efficiency, truncate3(rows[0].time / r.time / r.np as f64));
    }

    let fixture = SpeedupRow::derive("parallel", 2, 40.485, 28.245);
    assert_eq!(fixture.time, 28.245);
    assert_eq!(fixture.lb_time, 20.242);
    assert_eq!(fixture.speedup, 1.433);
    assert_eq!(fixture.efficiency, 0.716);

    println!(
        "ACCEPTANCE PASS: criterion 9: speedup(4) = {} with a 10 ms delay; \
         derived columns exact; reference times (40.485, 28.245) give (1.433, 0.716, 20.242)",
        rows[1].speedup
    );
}

#[test]
fn criterion_10_baselines_are_reproducible_and_random_search_finds_the_basin() {
    let cli = CliOverrides {
        function: Some("f1".into()),
        workers: Some(1),
        seed: Some(42),
        ..CliOverrides::default()
    };
    let cfg = build_config(&cli).unwrap();
    let rows = cmd_compare(&cfg).unwrap();
    let algos: Vec<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(algos, ["SLM", "RS", "RSW", "SA"]);

    let f = bench::f1();
    for seed in [0u64, 1, 2] {
        let rs = random_search(f.objective.as_ref(), &f.domain, 100_000, seed, Sense::Min)
            .unwrap();
        assert!(rs.best_value <= 0.01, "seed {seed}: best value {}", rs.best_value);
    }

    for seed in [0u64, 7, 99] {
        let sa = simulated_annealing(
            f.objective.as_ref(),
            &f.domain,
            150,
            seed,
            SaSchedule::default(),
            Sense::Min,
        )
        .unwrap();
        for w in sa.best_trace.windows(2) {
            assert!(w[1] <= w[0], "seed {seed}: best-so-far rose from {} to {}", w[0], w[1]);
        }
    }

    // Bit-level reproducibility: the same seed replays the same run.
    let bits = |r: &bench::BaselineRun| {
        (
            r.best_value.to_bits(),
            r.best_point.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            r.best_trace.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            r.evaluations,
        )
    };
    let twice = |seed: u64| {
        let rs = random_search(f.objective.as_ref(), &f.domain, 1000, seed, Sense::Min).unwrap();
        let w =
            rsw(f.objective.as_ref(), &f.domain, 500, seed, &[1.0, 1.0], 0.1, Sense::Min).unwrap();
        let sa = simulated_annealing(
            f.objective.as_ref(),
            &f.domain,
            150,
            seed,
            SaSchedule::default(),
            Sense::Min,
        )
        .unwrap();
        (bits(&rs), bits(&w), bits(&sa))
    };
    assert_eq!(twice(5), twice(5));
    assert_eq!(twice(11), twice(11));

    println!(
        "ACCEPTANCE PASS: criterion 10: SLM/RS/RSW/SA rows emitted; random search at 1e5 \
         reaches 0.01 on three seeds; annealing trace monotone; baselines bit-stable per seed"
    );
}
