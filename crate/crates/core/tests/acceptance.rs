//! Acceptance gate. Runs each criterion in sequence, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itfs::cli::synth;
use itfs::oracle::{oracle_cmi, oracle_mi, oracle_score, oracle_select};
use itfs::{
    columnar_transform, compute_redundancies, compute_relevances, entropy, get_histograms, init_criteria, select,
    sparse_columnar_transform, sparse_histograms, ColumnStore, ContingencyCube, CriterionKind, Engine, FeatureId,
    LogBase, RowDataset, SelectConfig, SelectionResult, SparseDataset, SparseRow, Value,
};

const ORACLE_SCORE_TOL: f64 = 1e-10;
const MI_TOL: f64 = 1e-12;
const INCREMENTAL_TOL: f64 = 1e-10;
const ORACLE_BUDGET: Duration = Duration::from_secs(5 * 60);
const SCALING_BUDGET: Duration = Duration::from_secs(10 * 60);
const MAX_DOUBLING_RATIO: f64 = 3.0;
const MAX_PARALLEL_FRACTION: f64 = 0.6;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Mixture of independent columns and noisy copies of the class or an
/// earlier feature, so selections have non-trivial structure.
fn random_dataset(rng: &mut ChaCha8Rng, n: usize, m: usize, cards: std::ops::RangeInclusive<u32>) -> RowDataset {
    let card: Vec<u32> = (0..=n).map(|_| rng.random_range(cards.clone())).collect();
    let parent: Vec<Option<usize>> = (0..n)
        .map(|k| {
            if rng.random_bool(0.3) {
                Some(if k == 0 || rng.random_bool(0.5) {
                    n
                } else {
                    rng.random_range(0..k)
                })
            } else {
                None
            }
        })
        .collect();
    let mut values = vec![0; m * (n + 1)];
    for row in values.chunks_exact_mut(n + 1) {
        row[n] = rng.random_range(0..card[n]);
        for k in 0..n {
            row[k] = match parent[k] {
                Some(p) if rng.random_bool(0.7) => row[p] % card[k],
                _ => rng.random_range(0..card[k]),
            };
        }
    }
    RowDataset::from_flat(values, n + 1, n).unwrap()
}

fn store(data: &RowDataset, workers: usize, npart: usize) -> (Engine, ColumnStore) {
    let engine = Engine::new(workers).unwrap();
    let store = columnar_transform(&engine, data, 2 * workers, npart).unwrap();
    (engine, store)
}

fn run(engine: &Engine, store: &ColumnStore, kind: CriterionKind, ns: usize, base: LogBase) -> SelectionResult {
    let mut config = SelectConfig::new(kind, ns);
    config.base = base;
    select(engine, store, &config).unwrap().result
}

fn test_datasets(seed: u64, count: usize) -> Vec<RowDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(5..=60);
            let m = rng.random_range(50..=2000);
            random_dataset(&mut rng, n, m, 2..=8)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for (d, data) in test_datasets(1, 50).iter().enumerate() {
        let (engine, st) = store(data, 2, 4);
        let n = data.n();
        for kind in CriterionKind::ALL {
            for ns in [1, 3, n] {
                let got = run(&engine, &st, kind, ns, LogBase::Nats);
                let want = oracle_select(data, kind, ns, None).unwrap();
                ensure(got.features() == want.features(), || {
                    format!(
                        "dataset {d} {kind} ns={ns}: {:?} vs oracle {:?}",
                        got.features(),
                        want.features()
                    )
                })?;
                for (g, w) in got.selected.iter().zip(&want.selected) {
                    ensure((g.score - w.score).abs() <= ORACLE_SCORE_TOL, || {
                        format!(
                            "dataset {d} {kind} ns={ns} feature {}: {} vs {}",
                            g.feature, g.score, w.score
                        )
                    })?;
                }
                runs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ORACLE_BUDGET, || {
        format!("took {elapsed:?}, budget {ORACLE_BUDGET:?}")
    })?;
    Ok(format!(
        "{runs} selections match the oracle in {:.1}s",
        elapsed.as_secs_f64()
    ))
}

/// `(I(a;b), I(a;b|c))` through relevance and redundancy passes over the
/// three-column dataset `[a, b, c]` with `c` as class.
fn pipeline_mi_cmi(a: &[Value], b: &[Value], c: &[Value]) -> (f64, f64) {
    let values = a.iter().zip(b).zip(c).flat_map(|((&x, &y), &z)| [x, y, z]).collect();
    let data = RowDataset::from_flat(values, 3, 2).unwrap();
    let (engine, st) = store(&data, 2, 3);
    let rel = compute_relevances(&engine, &st, LogBase::Nats).unwrap();
    let red = compute_redundancies(&engine, &st, &rel, 1, &[false, true, true], LogBase::Nats).unwrap();
    let pair = red[&0];
    (pair.mi, pair.cmi)
}

fn mi_cmi_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for t in 0..500 {
        let m = rng.random_range(1..=400);
        let cards: Vec<u32> = (0..3).map(|_| rng.random_range(1..=8)).collect();
        let cols: Vec<Vec<Value>> = cards
            .iter()
            .map(|&k| (0..m).map(|_| rng.random_range(0..k)).collect())
            .collect();
        let (mi, cmi) = pipeline_mi_cmi(&cols[0], &cols[1], &cols[2]);
        let (omi, ocmi) = (
            oracle_mi(&cols[0], &cols[1]).unwrap(),
            oracle_cmi(&cols[0], &cols[1], &cols[2]).unwrap(),
        );
        worst = worst.max((mi - omi).abs()).max((cmi - ocmi).abs());
        ensure((mi - omi).abs() <= MI_TOL && (cmi - ocmi).abs() <= MI_TOL, || {
            format!("triple {t}: mi {mi} vs {omi}, cmi {cmi} vs {ocmi}")
        })?;
    }

    // I(A;A) = H(A)
    let a: Vec<Value> = (0..300).map(|_| rng.random_range(0..5)).collect();
    let y: Vec<Value> = (0..300).map(|_| rng.random_range(0..3)).collect();
    let (mi, _) = pipeline_mi_cmi(&a, &a, &y);
    let h = entropy(&a).unwrap();
    ensure((mi - h).abs() <= MI_TOL, || format!("I(A;A) = {mi}, H(A) = {h}"))?;

    // XOR over a balanced enumeration
    let (mut xa, mut xb, mut xc) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..25 {
        for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            xa.push(p);
            xb.push(q);
            xc.push(p ^ q);
        }
    }
    let (mi, cmi) = pipeline_mi_cmi(&xa, &xb, &xc);
    ensure(
        mi.abs() <= MI_TOL && (cmi - std::f64::consts::LN_2).abs() <= MI_TOL,
        || format!("xor: mi {mi}, cmi {cmi}"),
    )?;

    // constant conditioning
    let b: Vec<Value> = a
        .iter()
        .map(|&v| {
            if rng.random_bool(0.8) {
                v % 3
            } else {
                rng.random_range(0..3)
            }
        })
        .collect();
    let (mi, cmi) = pipeline_mi_cmi(&a, &b, &vec![0; a.len()]);
    ensure((mi - cmi).abs() <= MI_TOL, || format!("constant c: mi {mi}, cmi {cmi}"))?;

    Ok(format!(
        "500 triples within {MI_TOL:e} (worst {worst:.2e}); closed forms hold"
    ))
}

fn bit_key(r: &SelectionResult) -> Vec<(FeatureId, u64)> {
    r.selected.iter().map(|s| (s.feature, s.score.to_bits())).collect()
}

fn partition_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut configs = 0;
    for d in 0..6 {
        let n = rng.random_range(5..=40);
        let m = rng.random_range(50..=1500);
        let data = random_dataset(&mut rng, n, m, 2..=8);
        let ns = n.min(8);
        let mut reference: BTreeMap<CriterionKind, Vec<(FeatureId, u64)>> = BTreeMap::new();
        for npart in [1, 2, 7, 2 * (n + 1)] {
            for workers in [1, 2, 8] {
                let (engine, st) = store(&data, workers, npart);
                for kind in CriterionKind::ALL {
                    let key = bit_key(&run(&engine, &st, kind, ns, LogBase::Nats));
                    let want = reference.entry(kind).or_insert_with(|| key.clone());
                    ensure(*want == key, || {
                        format!("dataset {d} {kind} npart={npart} workers={workers} differs")
                    })?;
                }
                configs += 1;
            }
        }
    }
    Ok(format!(
        "{configs} npart/worker configurations bit-identical across all criteria"
    ))
}

fn random_sparse(rng: &mut ChaCha8Rng, density: f64) -> SparseDataset {
    let n = rng.random_range(5..=60);
    let m = rng.random_range(200..=1500);
    let card: Vec<u32> = (0..n).map(|_| rng.random_range(2..=8)).collect();
    let class_card = rng.random_range(2..=4);
    let rows = (0..m)
        .map(|index| SparseRow {
            index,
            entries: (0..n)
                .filter_map(|f| {
                    if rng.random_bool(density) {
                        Some((f as FeatureId, rng.random_range(1..card[f])))
                    } else {
                        None
                    }
                })
                .collect(),
        })
        .collect();
    let class = (0..m).map(|_| rng.random_range(0..class_card)).collect();
    SparseDataset { n, rows, class }
}

fn cubes_for(engine: &Engine, st: &ColumnStore, paired: FeatureId) -> BTreeMap<FeatureId, ContingencyCube> {
    let class = st.class_index() as FeatureId;
    let ycol = engine.broadcast(class, st.lookup(class).unwrap(), st.block_lens());
    let (jcol, cond) = if paired == class {
        (ycol.clone(), None)
    } else {
        (
            engine.broadcast(paired, st.lookup(paired).unwrap(), st.block_lens()),
            Some(&ycol),
        )
    };
    let mut skip = vec![false; st.ncols()];
    skip[class as usize] = true;
    match st.layout() {
        itfs::Layout::Dense => get_histograms(engine, st, &jcol, cond, &skip).unwrap(),
        itfs::Layout::Sparse => sparse_histograms(engine, st, &jcol, cond, &skip).unwrap(),
    }
}

fn sparse_dense_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cubes = 0;
    for d in 0..20 {
        let density = [0.005, 0.05, 0.5][d % 3];
        let sparse = random_sparse(&mut rng, density);
        let dense = sparse.densify().unwrap();
        let engine = Engine::new(2).unwrap();
        let sp = sparse_columnar_transform(&engine, &sparse, 4, 5).unwrap();
        let de = columnar_transform(&engine, &dense, 4, 5).unwrap();

        let n = sparse.n as FeatureId;
        let mut paired = vec![n, 0, n / 2, n - 1];
        paired.dedup();
        for p in paired {
            let (a, b) = (cubes_for(&engine, &sp, p), cubes_for(&engine, &de, p));
            ensure(a == b, || {
                format!("dataset {d} (density {density}) cubes paired with {p} differ")
            })?;
            cubes += a.len();
        }
        for kind in CriterionKind::ALL {
            let ns = sparse.n.min(10);
            let (a, b) = (
                run(&engine, &sp, kind, ns, LogBase::Nats),
                run(&engine, &de, kind, ns, LogBase::Nats),
            );
            ensure(a == b, || {
                format!(
                    "dataset {d} (density {density}) {kind}: {:?} vs {:?}",
                    a.features(),
                    b.features()
                )
            })?;
        }
    }
    Ok(format!(
        "{cubes} cubes integer-identical; selections equal on 20 datasets"
    ))
}

fn criterion_structure() -> Outcome {
    let datasets = test_datasets(5, 20);
    for (d, data) in datasets.iter().enumerate() {
        let (engine, st) = store(data, 2, 4);
        let n = data.n();
        let cmim = run(&engine, &st, CriterionKind::Cmim, n, LogBase::Nats);
        let iff = run(&engine, &st, CriterionKind::If, n, LogBase::Nats);
        ensure(cmim.features() == iff.features(), || {
            format!("dataset {d}: CMIM and IF differ")
        })?;

        let rel = compute_relevances(&engine, &st, LogBase::Nats).unwrap().values;
        let mut by_relevance: Vec<(FeatureId, f64)> = rel.iter().map(|(&k, &v)| (k, v)).collect();
        by_relevance.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let order: Vec<FeatureId> = by_relevance.iter().map(|p| p.0).collect();
        ensure(
            run(&engine, &st, CriterionKind::Mim, n, LogBase::Nats).features() == order,
            || format!("dataset {d}: MIM is not descending relevance"),
        )?;

        let top = order[0];
        for kind in CriterionKind::ALL {
            let (first, _) = init_criteria(&rel, kind, None).unwrap().best_candidate().unwrap();
            let picked = run(&engine, &st, kind, 1, LogBase::Nats).features()[0];
            ensure(first == top && picked == top, || {
                format!("dataset {d} {kind}: initial argmax {first}/{picked}, relevance argmax {top}")
            })?;
        }
    }
    Ok("CMIM = IF, MIM = relevance order, shared initial argmax on 20 datasets".into())
}

fn log_base_invariance() -> Outcome {
    let mut compared = 0;
    for (d, data) in test_datasets(6, 20).iter().enumerate() {
        let (engine, st) = store(data, 2, 4);
        for kind in CriterionKind::ALL {
            let nats = run(&engine, &st, kind, data.n(), LogBase::Nats);
            let bits = run(&engine, &st, kind, data.n(), LogBase::Bits);
            ensure(nats.features() == bits.features(), || {
                format!("dataset {d} {kind}: ln and log2 orders differ")
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} full selection sequences identical under ln and log2"
    ))
}

fn timed_run(data: &RowDataset, workers: usize) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let start = Instant::now();
        let (engine, st) = store(data, workers, 2 * workers);
        let r = run(&engine, &st, CriterionKind::Mrmr, 10, LogBase::Nats);
        assert_eq!(r.len(), 10);
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

fn scaling_smoke() -> Outcome {
    let start = Instant::now();
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut times = Vec::new();
    let mut largest = None;
    for m in [100_000, 200_000, 400_000] {
        let data = synth::generate(7, m, 100, 4, 1.0);
        times.push(timed_run(&data, 1));
        largest = Some(data);
    }
    let data = largest.unwrap();
    let parallel = timed_run(&data, 8);
    drop(data);
    let elapsed = start.elapsed();

    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let detail = format!(
        "1 worker: {:.2}s {:.2}s {:.2}s (ratios {:.2} {:.2}); 8 workers at m=4e5: {:.2}s ({:.2}x of 1 worker, {cores} cores visible)",
        times[0],
        times[1],
        times[2],
        ratios[0],
        ratios[1],
        parallel,
        parallel / times[2],
    );
    ensure(ratios.iter().all(|&r| r <= MAX_DOUBLING_RATIO), || {
        format!("super-linear growth: {detail}")
    })?;
    ensure(parallel <= MAX_PARALLEL_FRACTION * times[2], || {
        format!("insufficient speedup: {detail}")
    })?;
    ensure(elapsed < SCALING_BUDGET, || {
        format!("took {elapsed:?}, budget {SCALING_BUDGET:?}")
    })?;
    Ok(detail)
}

fn incremental_updates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data = random_dataset(&mut rng, 12, 30, 2..=4);
    let y = data.class_column();
    let cols: Vec<Vec<Value>> = (0..data.n()).map(|k| data.column(k)).collect();
    let (engine, st) = store(&data, 2, 3);
    let rel = compute_relevances(&engine, &st, LogBase::Nats).unwrap();
    let mut checked = 0;

    for kind in CriterionKind::ALL {
        let mut acc = init_criteria(&rel.values, kind, None).unwrap();
        let mut skip = vec![false; st.ncols()];
        skip[st.class_index()] = true;
        let mut selected: Vec<usize> = Vec::new();
        for step in 1..=10 {
            let (best, _) = acc.best_candidate().unwrap();
            acc.mark_selected(best).unwrap();
            skip[best as usize] = true;
            selected.push(best as usize);
            let red = compute_redundancies(&engine, &st, &rel, best, &skip, LogBase::Nats).unwrap();
            acc.update(&red).unwrap();

            for (k, score) in acc.live_scores() {
                let xk = &cols[k as usize];
                let terms: Vec<(f64, f64)> = selected
                    .iter()
                    .map(|&j| (oracle_mi(&cols[j], xk).unwrap(), oracle_cmi(&cols[j], xk, &y).unwrap()))
                    .collect();
                let want = oracle_score(kind, acc.beta(), oracle_mi(xk, &y).unwrap(), &terms);
                ensure((score - want).abs() <= INCREMENTAL_TOL, || {
                    format!("{kind} step {step} candidate {k}: incremental {score} vs scratch {want}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} candidate scores match from-scratch evaluation"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("MI/CMI correctness", mi_cmi_correctness),
        ("partition and worker invariance", partition_invariance),
        ("sparse equals dense", sparse_dense_equivalence),
        ("criterion structure", criterion_structure),
        ("log-base invariance", log_base_invariance),
        ("scaling smoke", scaling_smoke),
        ("incremental updates", incremental_updates),
    ];
    let only: Option<usize> = std::env::var("ITFS_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
