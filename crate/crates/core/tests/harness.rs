use std::fs;
use std::path::Path;

use neuroevo::engine::{Encoding, EvolutionConfig, StopReason};
use neuroevo::fitness::Measure;
use neuroevo::genome::{GeneListGenome, Genome, MatrixGenome, NeuronRole};
use neuroevo::harness::{
    checkpoint_path, evaluate_genome, exit_code, inspect, load_dataset, parity, parse_csv, plot_metrics,
    read_checkpoint, read_metrics, render_svg, run_evolve, split_dataset, xor, CsvColumns, InspectReport,
    MetricsRow, RunConfig, BEST_GENOME_FILE, CONFIG_SNAPSHOT_FILE, METRICS_FILE, METRICS_HEADER,
    SCHEMA_VERSION,
};
use neuroevo::rng::seeded;
use neuroevo::Error;

const COLS: CsvColumns = CsvColumns { inputs: 2, outputs: 1, has_header: false };

fn write_config(dir: &Path, evolution: EvolutionConfig, checkpoint_every: usize) -> std::path::PathBuf {
    let cfg = RunConfig {
        schema_version: SCHEMA_VERSION,
        dataset: "xor".into(),
        columns: None,
        normalize: Default::default(),
        output_dir: "out".into(),
        checkpoint_every,
        evolution,
    };
    let path = dir.join("run.json");
    fs::write(&path, cfg.to_json().unwrap()).unwrap();
    path
}

fn xor_genelist(max_generations: usize) -> EvolutionConfig {
    let mut c = EvolutionConfig::new(Encoding::Genelist, 50, max_generations, 42);
    c.stop.target_error = Some(0.01);
    c
}

#[test]
fn builtin_datasets() {
    let x = xor();
    assert_eq!(x.len(), 4);
    assert_eq!(x.input_width(), 2);
    assert_eq!(x.target_width(), 1);

    let p = parity(3).unwrap();
    assert_eq!(p.len(), 8);
    for (bits, t) in p.inputs.iter().zip(&p.targets) {
        let ones = bits.iter().filter(|&&b| b == 1.0).count();
        assert_eq!(t[0], (ones % 2) as f64);
    }
    assert!(matches!(parity(17), Err(Error::Data(_))));
    assert!(matches!(load_dataset("parity:40", None, 0), Err(Error::Data(_))));
    assert_eq!(load_dataset("parity:3", None, 0).unwrap(), p);
}

#[test]
fn csv_parse_errors_name_row_and_column() {
    let text = "0,0,0\n0,1,1\n1,x,1\n";
    match parse_csv(text.as_bytes(), COLS) {
        Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 2)),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let with_header = "a,b,t\n0,0,0\n1,1,oops\n";
    let cols = CsvColumns { has_header: true, ..COLS };
    match parse_csv(with_header.as_bytes(), cols) {
        Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 3)),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn csv_round_trip_and_split() {
    let mut text = String::new();
    for k in 0..20 {
        text.push_str(&format!("{},{},{}\n", k as f64 * 0.1, -(k as f64), k % 2));
    }
    let d = parse_csv(text.as_bytes(), COLS).unwrap();
    assert_eq!(d.len(), 20);
    assert_eq!(d.inputs[3], vec![0.30000000000000004, -3.0]);

    let s = split_dataset(d, 7).unwrap();
    let split = s.split.clone().unwrap();
    assert_eq!(split.train.len(), 16);
    assert_eq!(split.validation.len(), 4);
    let mut all: Vec<usize> = split.train.iter().chain(&split.validation).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..20).collect::<Vec<_>>());
}

#[test]
fn population_of_one_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), EvolutionConfig::new(Encoding::Matrix, 1, 10, 0), 10);
    let Err(Error::Config(v)) = run_evolve(&path, None) else { panic!("expected a config error") };
    assert!(v.contains(&"population_size must be ≥ 2".to_string()));
}

#[test]
fn evolve_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), xor_genelist(200), 5);
    let summary = run_evolve(&path, None).unwrap();
    assert_eq!(summary.reason, StopReason::TargetReached);
    assert_eq!(exit_code(summary.reason), 0);
    assert!(summary.best_error < 0.01);

    let out = dir.path().join("out");
    let metrics = fs::read_to_string(out.join(METRICS_FILE)).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some(METRICS_HEADER));
    let rows = read_metrics(&out.join(METRICS_FILE)).unwrap();
    assert_eq!(rows.len(), summary.generations + 1);
    assert!(rows.windows(2).all(|w| w[1].best <= w[0].best));

    let snapshot = RunConfig::load(&out.join(CONFIG_SNAPSHOT_FILE)).unwrap();
    assert_eq!(snapshot.evolution, xor_genelist(200));

    let genome: Genome = serde_json::from_str(&fs::read_to_string(out.join(BEST_GENOME_FILE)).unwrap()).unwrap();
    let report = evaluate_genome(&genome, &xor(), Measure::Sqe).unwrap();
    assert!((report.error - summary.best_error).abs() < 1e-12);

    let last = read_checkpoint(&checkpoint_path(&out, summary.generations)).unwrap();
    assert_eq!(last.generation, summary.generations);
}

#[test]
fn resume_reproduces_remaining_generations() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = EvolutionConfig::new(Encoding::Bitstring, 10, 40, 5);
    c.stop.stagnation_window = 100;
    let path = write_config(dir.path(), c, 10);
    let summary = run_evolve(&path, None).unwrap();
    assert_eq!(summary.reason, StopReason::MaxGenerations);
    assert_eq!(exit_code(summary.reason), 2);
    let out = dir.path().join("out");
    let full = fs::read_to_string(out.join(METRICS_FILE)).unwrap();
    let best = fs::read_to_string(out.join(BEST_GENOME_FILE)).unwrap();

    let cp = checkpoint_path(&out, 20);
    let resumed = run_evolve(&path, Some(&cp)).unwrap();
    assert_eq!(resumed.generations, 40);
    assert_eq!(fs::read_to_string(out.join(METRICS_FILE)).unwrap(), full);
    assert_eq!(fs::read_to_string(out.join(BEST_GENOME_FILE)).unwrap(), best);
}

#[test]
fn resume_rejects_a_different_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = EvolutionConfig::new(Encoding::Bitstring, 6, 10, 5);
    let path = write_config(dir.path(), c.clone(), 5);
    run_evolve(&path, None).unwrap();
    let cp = checkpoint_path(&dir.path().join("out"), 5);
    let mut other = c;
    other.seed = 6;
    write_config(dir.path(), other, 5);
    assert!(run_evolve(&path, Some(&cp)).is_err());
}

#[test]
fn inspect_minimal_gene_list() {
    let g = Genome::Genelist(GeneListGenome::minimal(2, 1, &mut seeded(0)));
    let r = InspectReport::of(&g).unwrap();
    assert_eq!(r.neurons.len(), 3);
    assert_eq!(r.connections.len(), 2);
    assert!(r.text().contains("genelist"));
    let dot = r.dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 2);
}

#[test]
fn inspect_marks_pruned_hidden_neurons() {
    let mut m = MatrixGenome::empty(2, 2, 1);
    m.hidden_exists = vec![1, 1];
    m.connect(0, 2, 0.5);
    m.connect(2, 4, 0.5);
    // hidden 3 has no path from an input and none to the output
    let r = InspectReport::of(&Genome::Matrix(m.clone())).unwrap();
    let hidden: Vec<_> = r.neurons.iter().filter(|n| n.role == NeuronRole::Hidden).collect();
    assert_eq!(hidden.len(), 2);
    assert!(hidden.iter().any(|n| n.id == 3 && !n.active));
    assert!(hidden.iter().any(|n| n.id == 2 && n.active));
    assert_eq!(r.connections.len(), m.connection_count());
    assert!(r.dot().contains("dashed"));
}

#[test]
fn inspect_reads_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let g = Genome::Genelist(GeneListGenome::minimal(3, 2, &mut seeded(1)));
    let path = dir.path().join("g.json");
    fs::write(&path, serde_json::to_string(&g).unwrap()).unwrap();
    let r = inspect(&path).unwrap();
    assert_eq!(r.connections.len(), 6);
    assert!(inspect(&dir.path().join("missing.json")).is_err());
}

#[test]
fn svg_plot_structure() {
    let rows: Vec<MetricsRow> = (0..10)
        .map(|g| {
            let best = 1.0 / (g as f64 + 1.0);
            MetricsRow { generation: g as f64, best, mean: best * 1.5, worst: best * 2.0 }
        })
        .collect();
    let svg = render_svg(&rows).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    for class in ["best", "mean", "worst"] {
        assert!(svg.contains(&format!("class=\"{class}\"")));
    }
    assert!(svg.contains("data-min=\"0\"") && svg.contains("data-max=\"9\""));
    assert!(svg.contains("data-max=\"2\""));

    let single = render_svg(&rows[..1]).unwrap();
    assert!(single.contains("<circle"));
    assert!(render_svg(&[]).is_err());
}

#[test]
fn plot_metrics_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let metrics = dir.path().join("m.csv");
    fs::write(&metrics, format!("{METRICS_HEADER}\n0,0.5,0.6,0.7,1,3\n1,0.4,0.5,0.7,1,3\n")).unwrap();
    let svg = dir.path().join("m.svg");
    plot_metrics(&metrics, &svg).unwrap();
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 3);

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, format!("{METRICS_HEADER}\n")).unwrap();
    assert!(matches!(plot_metrics(&empty, &svg), Err(Error::Data(_))));
}

#[test]
fn eval_rejects_mismatched_shapes() {
    let g = Genome::Genelist(GeneListGenome::minimal(5, 1, &mut seeded(0)));
    assert!(matches!(evaluate_genome(&g, &xor(), Measure::Sqe), Err(Error::Dimension { .. })));
}
