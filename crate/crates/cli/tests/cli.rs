use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn neuroevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neuroevo")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const XOR: &str = r#"{
  "schema_version": 1,
  "dataset": "xor",
  "output_dir": "out",
  "checkpoint_every": 5,
  "evolution": {
    "encoding": "genelist",
    "population_size": 50,
    "max_generations": 200,
    "seed": 42,
    "stop": { "target_error": 0.01 }
  }
}"#;

#[test]
fn evolve_then_inspect_eval_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), XOR);
    let run = neuroevo(&["evolve", "--config", &config]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert!(stdout(&run).contains("TargetReached"));

    let out = dir.path().join("out");
    let genome = out.join("best_genome.json");
    let genome = genome.to_str().unwrap();

    let inspect = neuroevo(&["inspect", "--genome", genome]);
    assert_eq!(inspect.status.code(), Some(0), "{}", stderr(&inspect));
    let text = stdout(&inspect);
    assert!(text.contains("genelist"));
    assert!(text.contains("digraph"));

    let dot = dir.path().join("g.dot");
    let inspect = neuroevo(&["inspect", "--genome", genome, "--dot", dot.to_str().unwrap()]);
    assert_eq!(inspect.status.code(), Some(0));
    assert!(!stdout(&inspect).contains("digraph"));
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    let eval = neuroevo(&["eval", "--genome", genome, "--dataset", "xor"]);
    assert_eq!(eval.status.code(), Some(0), "{}", stderr(&eval));
    let text = stdout(&eval);
    assert_eq!(text.matches(" -> ").count(), 4);
    let error: f64 = text.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(error < 0.01);

    let svg = dir.path().join("m.svg");
    let metrics = out.join("metrics.csv");
    let plot = neuroevo(&["plot-metrics", "--in", metrics.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(plot.status.code(), Some(0), "{}", stderr(&plot));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn population_of_one_exits_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &XOR.replace("\"population_size\": 50", "\"population_size\": 1"));
    let run = neuroevo(&["evolve", "--config", &config]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("population_size must be ≥ 2"));
}

#[test]
fn budget_exhaustion_exits_two_and_resume_matches() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
      "schema_version": 1,
      "dataset": "xor",
      "output_dir": "out",
      "checkpoint_every": 10,
      "evolution": {
        "encoding": "bitstring",
        "population_size": 10,
        "max_generations": 30,
        "seed": 3,
        "stop": { "stagnation_window": 100 }
      }
    }"#;
    let config = write_config(dir.path(), body);
    let run = neuroevo(&["evolve", "--config", &config]);
    assert_eq!(run.status.code(), Some(2), "{}", stderr(&run));
    let out = dir.path().join("out");
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();

    let cp = out.join("checkpoints").join("gen_000010.json");
    let resumed = neuroevo(&["evolve", "--config", &config, "--resume", cp.to_str().unwrap()]);
    assert_eq!(resumed.status.code(), Some(2), "{}", stderr(&resumed));
    assert_eq!(fs::read_to_string(out.join("metrics.csv")).unwrap(), metrics);
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let run = neuroevo(&["inspect", "--genome", missing.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).starts_with("error:"));

    let run = neuroevo(&["eval", "--genome", "g.json", "--dataset", "x.csv", "--inputs", "2"]);
    assert_eq!(run.status.code(), Some(1));
}
