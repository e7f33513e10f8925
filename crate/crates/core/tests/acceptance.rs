//! Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p deltaconf --test acceptance -- --nocapture` to see
//! the report.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use deltaconf::hex::{check_hex_valid, count_bends, hex_area, ortho_to_hex, resolve_overlaps};
use deltaconf::ortho::{layout_upward_ortho, ortho_area, root_at_leaf};
use deltaconf::radial::{layout_radial_trident, trident_ratio_bound, DEFAULT_RATIO};
use deltaconf::render::{build_drawing, check_smoothness, parse_svg, LayoutRef};
use deltaconf::tree::{build_delta_tree, semantics};
use deltaconf::{
    apply_sequence_forward, eliminate, gen_dh_random, gen_gnp, graph_equals,
    is_distance_hereditary_oracle, max_dh_subgraph_bruteforce, DeltaTree, EliminationSequence,
    ExtensionWeights, Graph, HexLayout, RenderOptions,
};

const SIZES: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];
const SEEDS: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tree_of(g: &Graph) -> DeltaTree {
    build_delta_tree(g, &eliminate(g).unwrap()).unwrap()
}

fn corpus() -> Vec<Graph> {
    (0..1000u64)
        .map(|seed| {
            gen_dh_random(
                2 + (seed as usize * 37) % 127,
                seed,
                ExtensionWeights::UNIFORM,
            )
            .unwrap()
            .0
        })
        .collect()
}

fn all_graphs(n: u32) -> Vec<Graph> {
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let mut g = Graph::with_vertices(0..n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v).unwrap();
                }
            }
            g
        })
        .collect()
}

fn criterion_1(corpus: &[Graph]) -> Outcome {
    let start = Instant::now();
    let ok = corpus
        .iter()
        .filter(|g| graph_equals(&semantics(&tree_of(g)).unwrap(), g))
        .count();
    let elapsed = start.elapsed();
    outcome(
        ok == corpus.len() && elapsed < Duration::from_secs(30),
        format!(
            "{ok}/{} trees reproduce their graph in {:.2?}",
            corpus.len(),
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut graphs: Vec<Graph> = (1..=5).flat_map(all_graphs).collect();
    let exhaustive = graphs.len();
    graphs.extend((0..500u64).map(|seed| gen_gnp(6 + (seed % 3) as usize, 0.5, seed).unwrap()));
    let disagreements = graphs
        .iter()
        .filter(|g| eliminate(g).is_ok() != is_distance_hereditary_oracle(g).unwrap())
        .count();
    let accepted = graphs.iter().filter(|g| eliminate(g).is_ok()).count();
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements over {exhaustive} exhaustive + 500 random graphs ({accepted} accepted)"),
    )
}

fn criterion_3(corpus: &[Graph]) -> Outcome {
    let mut bad_leaves = 0;
    let mut bad_junctions = 0;
    let mut bad_degree = 0;
    let mut n_minus_2 = 0;
    for g in corpus {
        let t = tree_of(g);
        let n = g.vertex_count();
        bad_leaves += usize::from(t.leaf_count() != n);
        bad_junctions += usize::from(t.junction_count() != n - 1);
        n_minus_2 += usize::from(t.junction_count() == n - 2);
        let adj = t.adjacency();
        bad_degree += t.junction_ids().filter(|&j| adj[j].len() != 3).count();
    }
    outcome(
        bad_leaves + bad_junctions + bad_degree == 0,
        format!(
            "leaf-count violations {bad_leaves}, junction-count (n-1) violations {bad_junctions}, \
             degree violations {bad_degree}; {n_minus_2}/{} trees have n-2 junctions",
            corpus.len()
        ),
    )
}

const EIGHTEEN_VERTEX_SEQUENCE: &str = "\
17 merged into 16 false
16 merged into 15 false
15 cut from 3
14 cut from 2
13 merged into 5 false
12 merged into 6 false
10 merged into 8 false
11 merged into 7 false
9 cut from 8
8 merged into 7 false
7 cut from 6
6 merged into 0 false
5 cut from 0
4 merged into 1 false
3 cut from 1
2 merged into 1 false
K2: 0 1
";

fn criterion_4(corpus: &[Graph]) -> Outcome {
    let wrong = corpus
        .iter()
        .filter(|g| eliminate(g).unwrap().steps.len() != g.vertex_count() - 2)
        .count();
    let printed: EliminationSequence = EIGHTEEN_VERTEX_SEQUENCE.parse().unwrap();
    let g = apply_sequence_forward(&printed).unwrap();
    let recomputed = eliminate(&g).map(|s| s.steps.len());
    let example_ok = printed.steps.len() == 16 && g.vertex_count() == 18 && recomputed == Ok(16);
    outcome(
        wrong == 0 && example_ok,
        format!(
            "{wrong} length mismatches over {} graphs; printed example: {} steps, {} vertices, re-eliminated in {:?} steps",
            corpus.len(),
            printed.steps.len(),
            g.vertex_count(),
            recomputed
        ),
    )
}

struct Instance {
    n: usize,
    seq: EliminationSequence,
    ortho_area: i64,
    hex: HexLayout,
}

fn pipeline_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in SIZES {
        for seed in 0..SEEDS {
            let (g, _) = gen_dh_random(n, seed, ExtensionWeights::UNIFORM).unwrap();
            let seq = eliminate(&g).unwrap();
            let t = build_delta_tree(&g, &seq).unwrap();
            let ortho = layout_upward_ortho(&root_at_leaf(&t, None).unwrap());
            let hex = resolve_overlaps(&ortho_to_hex(&ortho)).unwrap();
            out.push(Instance {
                n,
                seq,
                ortho_area: ortho_area(&ortho),
                hex,
            });
        }
    }
    out
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn criterion_5(instances: &[Instance]) -> Outcome {
    let norm = |i: &Instance, a: i64| a as f64 / (i.n as f64 * (i.n as f64).log2());
    let ortho: Vec<f64> = instances.iter().map(|i| norm(i, i.ortho_area)).collect();
    let hex: Vec<f64> = instances
        .iter()
        .map(|i| norm(i, hex_area(&i.hex).unwrap()))
        .collect();
    let (so, sh) = (spread(&ortho), spread(&hex));
    outcome(
        so <= 4.0 && sh <= 4.0,
        format!(
            "area/(n log n): ortho {:.3}..{:.3} (spread {so:.2}), hex {:.3}..{:.3} (spread {sh:.2})",
            ortho.iter().copied().fold(f64::MAX, f64::min),
            ortho.iter().copied().fold(f64::MIN, f64::max),
            hex.iter().copied().fold(f64::MAX, f64::min),
            hex.iter().copied().fold(f64::MIN, f64::max),
        ),
    )
}

fn timed_pipeline(seqs: &[&EliminationSequence]) -> Duration {
    (0..3)
        .map(|_| {
            let start = Instant::now();
            for seq in seqs {
                let t = DeltaTree::from_sequence(seq).unwrap();
                let ortho = layout_upward_ortho(&root_at_leaf(&t, None).unwrap());
                std::hint::black_box(resolve_overlaps(&ortho_to_hex(&ortho)).unwrap());
            }
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn criterion_6(instances: &[Instance]) -> Outcome {
    let over = instances
        .iter()
        .filter(|i| i.hex.descriptor_fields() > 6 * i.n)
        .count();
    let worst_fields = instances
        .iter()
        .map(|i| i.hex.descriptor_fields() as f64 / i.n as f64)
        .fold(0.0, f64::max);
    let times: Vec<Duration> = SIZES
        .iter()
        .map(|&n| {
            timed_pipeline(
                &instances
                    .iter()
                    .filter(|i| i.n == n)
                    .map(|i| &i.seq)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    outcome(
        over == 0 && worst_ratio <= 3.0,
        format!(
            "descriptor fields ≤ {worst_fields:.2}·n ({over} over 6n); doubling ratios {:?}",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_7(instances: &[Instance]) -> Outcome {
    let invalid = instances
        .iter()
        .filter(|i| !check_hex_valid(&i.hex).is_empty())
        .count();
    outcome(
        invalid == 0,
        format!("{invalid}/{} hex layouts with violations", instances.len()),
    )
}

fn criterion_8(instances: &[Instance]) -> Outcome {
    let points: Vec<(f64, f64)> = SIZES
        .iter()
        .map(|&n| {
            let worst = instances
                .iter()
                .filter(|i| i.n == n)
                .map(|i| count_bends(&i.hex).unwrap().max_per_edge)
                .max()
                .unwrap();
            ((n as f64).ln(), (worst.max(1) as f64).ln())
        })
        .collect();
    let k = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.0).sum::<f64>() / k,
        points.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let maxima: Vec<i64> = points.iter().map(|p| p.1.exp().round() as i64).collect();
    outcome(
        slope <= 0.7,
        format!("max bends per edge {maxima:?}, log-log exponent {slope:.3}"),
    )
}

fn criterion_9() -> Outcome {
    let c5 = Graph::cycle(5);
    let four = max_dh_subgraph_bruteforce(&c5, 4).unwrap();
    let five = max_dh_subgraph_bruteforce(&c5, 5).unwrap();
    let subset_ok = four.as_ref().is_some_and(|s| {
        s.len() == 4 && is_distance_hereditary_oracle(&c5.induced_subgraph(s)).unwrap()
    });
    let mut checked = 0;
    let mut broken = 0;
    for seed in 0..50u64 {
        let (g, _) =
            gen_dh_random(2 + (seed % 7) as usize, seed, ExtensionWeights::UNIFORM).unwrap();
        assert!(is_distance_hereditary_oracle(&g).unwrap());
        let vs: Vec<u32> = g.vertices().collect();
        for mask in 1u32..1 << vs.len() {
            let keep: BTreeSet<u32> = vs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let sub = g.induced_subgraph(&keep);
            if keep.len() >= 2 && sub.is_connected() {
                checked += 1;
                broken += usize::from(!is_distance_hereditary_oracle(&sub).unwrap());
            }
        }
    }
    outcome(
        subset_ok && five.is_none() && broken == 0,
        format!(
            "C5 k=4 -> {four:?}, k=5 -> {five:?}; {broken} of {checked} connected induced subgraphs rejected"
        ),
    )
}

fn svg_clean(t: &DeltaTree, layout: LayoutRef<'_>) -> Result<(), String> {
    let opts = RenderOptions {
        labels: true,
        ..RenderOptions::default()
    };
    let svg = build_drawing(t, layout, &opts)
        .map_err(|e| e.to_string())?
        .to_svg(&opts);
    let d = parse_svg(&svg).map_err(|e| e.to_string())?;
    if !d.crossings().is_empty() {
        return Err(format!("{} crossings", d.crossings().len()));
    }
    if !check_smoothness(&d.smoothness_paths(), 5.0) {
        return Err("sharp turn".into());
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();
    for (name, g) in [
        ("K5", Graph::complete(5)),
        ("K3,3", Graph::complete_bipartite(3, 3)),
    ] {
        let t = tree_of(&g);
        let ortho = layout_upward_ortho(&root_at_leaf(&t, None).unwrap());
        let hex = resolve_overlaps(&ortho_to_hex(&ortho)).unwrap();
        for (kind, layout) in [
            ("ortho", LayoutRef::from(&ortho)),
            ("hex", LayoutRef::from(&hex)),
        ] {
            if let Err(e) = svg_clean(&t, layout) {
                failures.push(format!("{name}/{kind}: {e}"));
            }
        }
    }
    let k96 = DeltaTree::full_balanced(5);
    let ratio_ok = DEFAULT_RATIO < trident_ratio_bound();
    let radial = layout_radial_trident(&k96, DEFAULT_RATIO).unwrap();
    let complete = graph_equals(&semantics(&k96).unwrap(), &Graph::complete(96));
    if let Err(e) = svg_clean(&k96, (&radial).into()) {
        failures.push(format!("K96/radial: {e}"));
    }
    outcome(
        failures.is_empty() && ratio_ok && complete && k96.leaf_count() == 96,
        format!(
            "K5, K3,3 (ortho, hex) and K96 (radial, ratio {DEFAULT_RATIO} < {:.5}, semantics = K96: {complete}); failures {failures:?}",
            trident_ratio_bound()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let corpus = corpus();
    let instances = pipeline_instances();
    let results = [
        criterion_1(&corpus),
        criterion_2(),
        criterion_3(&corpus),
        criterion_4(&corpus),
        criterion_5(&instances),
        criterion_6(&instances),
        criterion_7(&instances),
        criterion_8(&instances),
        criterion_9(),
        criterion_10(),
    ];
    for (i, r) in results.iter().enumerate() {
        println!(
            "criterion {:>2}: {}  {}",
            i + 1,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.pass)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
