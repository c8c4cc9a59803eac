//! End-to-end tests driving the `dal` binary.

use std::path::Path;
use std::process::{Command, Output};

fn dal(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dal"))
        .args(args)
        .current_dir(dir)
        .env("DAL_OUT_ROOT", dir.join("out-root"))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_CONFIG: &str = r#"
[data]
source = "rosenbrock"
samples = 150
dim = 5
seed = 3

[network]
hidden = [8, 4]
dropout = 0.3
leakiness = 0.01
l2 = 1e-5

[train]
epochs_base = 40
epochs_retrain = 10
batch_size = 16
warm_start = true
learning_rate = 1e-3
beta1 = 0.9
beta2 = 0.999
epsilon = 1e-8
standardize_targets = true

[mc]
runs = 5
dropout = 0.5

[experiment]
strategies = ["mcdue", "random"]
replicates = 2
samples_per_step = 5
budget = 40
seed = 11
"#;

#[test]
fn gen_rosenbrock_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dal(
        &[
            "gen-rosenbrock",
            "--samples",
            "30",
            "--dim",
            "3",
            "--seed",
            "1",
            "--out",
            "rosen.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("rosen.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,target");
    assert_eq!(lines.count(), 30);
}

#[test]
fn run_produces_record_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.toml"), SMALL_CONFIG).unwrap();

    let out = dal(
        &["run", "--config", "exp.toml", "--out", "one"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let one = dir.path().join("one");
    for artifact in [
        "manifest.json",
        "config.json",
        "metrics.csv",
        "selections.csv",
        "timings.csv",
        "ratio_random_vs_mcdue_rmse.csv",
        "ratio_random_vs_mcdue_rmse.svg",
    ] {
        assert!(one.join(artifact).exists(), "missing {artifact}");
    }
    assert!(one.join("checkpoints/mcdue_r0.json").exists());
    assert!(one.join("checkpoints/random_r1.json").exists());
    assert!(stdout(&out).contains("final rmse mean"));

    // labeled sizes: 30 initial (0.2 * 150), then 5 per step to 40
    let metrics = std::fs::read_to_string(one.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("strategy,replicate,iteration,labeled_size,rmse,mae,maxae\n"));
    assert!(metrics.contains("mcdue,0,0,30,"));
    assert!(metrics.contains("mcdue,0,2,40,"));

    let out2 = dal(
        &["run", "--config", "exp.toml", "--out", "two"],
        dir.path(),
    );
    assert!(out2.status.success(), "{}", stderr(&out2));
    let two = dir.path().join("two");
    for file in ["metrics.csv", "selections.csv"] {
        let a = std::fs::read(one.join(file)).unwrap();
        let b = std::fs::read(two.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
}

#[test]
fn run_with_missing_dataset_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[data]
source = "csv"
path = "no-such-file.csv"
target = "y"

[experiment]
strategies = ["random"]
samples_per_step = 5
budget = 40
"#;
    std::fs::write(dir.path().join("exp.toml"), config).unwrap();
    let out = dal(&["run", "--config", "exp.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no-such-file.csv"));
}

#[test]
fn run_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        SMALL_CONFIG.replace("[mc]", "[mc]\nbogus_knob = 1"),
    )
    .unwrap();
    let out = dal(&["run", "--config", "exp.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus_knob"));
}

fn write_checkpoint(dir: &Path, dropout: f64) -> std::path::PathBuf {
    use dal_core::nn::{save_checkpoint, Network, NetworkSpec};
    let spec = NetworkSpec {
        input_dim: 3,
        hidden_sizes: vec![6, 3],
        output_dim: 1,
        leakiness: 0.01,
        dropout_prob: dropout,
        l2_coeff: 1e-5,
    };
    let net = Network::init(spec, 9).unwrap();
    let path = dir.join("net.json");
    save_checkpoint(&path, &net, None, false).unwrap();
    path
}

#[test]
fn diagnose_prints_pearson_and_enforces_min_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_checkpoint(dir.path(), 0.5);
    let gen = dal(
        &["gen-rosenbrock", "--samples", "60", "--dim", "3", "--out", "eval.csv"],
        dir.path(),
    );
    assert!(gen.status.success());

    let out = dal(
        &[
            "diagnose",
            "--checkpoint",
            "net.json",
            "--data",
            "eval.csv",
            "--target",
            "target",
            "-t",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("pearson_r = ") || text.contains("correlation undefined"),
        "unexpected output: {text}"
    );
    assert!(dir.path().join("diagnostic.csv").exists());
    assert!(dir.path().join("diagnostic.svg").exists());

    let too_few = dal(
        &[
            "diagnose",
            "--checkpoint",
            "net.json",
            "--data",
            "eval.csv",
            "--target",
            "target",
            "-t",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(too_few.status.code(), Some(2));
}

#[test]
fn diagnose_zero_dropout_network_reports_undefined_correlation() {
    let dir = tempfile::tempdir().unwrap();
    write_checkpoint(dir.path(), 0.0);
    let gen = dal(
        &["gen-rosenbrock", "--samples", "40", "--dim", "3", "--out", "eval.csv"],
        dir.path(),
    );
    assert!(gen.status.success());
    // no --dropout flag: the checkpoint's zero dropout applies, every MC std
    // is exactly zero
    let out = dal(
        &[
            "diagnose",
            "--checkpoint",
            "net.json",
            "--data",
            "eval.csv",
            "--target",
            "target",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("correlation undefined"));
}

#[test]
fn profile_reproduces_the_hand_example() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("q.csv"),
        "problem,algorithm,error\np1,a1,1.0\np1,a2,2.0\np2,a1,2.0\np2,a2,2.0\n",
    )
    .unwrap();
    let out = dal(&["profile", "q.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("a1: auc 1.0000"), "{text}");

    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next().unwrap(), "tau,a1,a2");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "1"); // a1 is best everywhere
    assert_eq!(first[2], "0.5"); // a2 ties on one of two problems
    let last: Vec<&str> = profile.lines().last().unwrap().split(',').collect();
    assert_eq!(last[1], "1");
    assert_eq!(last[2], "1"); // within factor 2 everywhere
    assert!(dir.path().join("profile_auc.csv").exists());
    assert!(dir.path().join("profile.svg").exists());
}

#[test]
fn profile_rejects_mismatched_algorithm_sets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("a.csv"),
        "problem,algorithm,error\np1,alpha,1.0\np1,beta,2.0\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("b.csv"),
        "problem,algorithm,error\np2,alpha,1.0\np2,gamma,2.0\n",
    )
    .unwrap();
    let out = dal(&["profile", "a.csv", "b.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("inconsistent algorithm sets"), "{err}");
    assert!(err.contains("beta") && err.contains("gamma"));
}

#[test]
fn profile_consumes_run_directories() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.toml"), SMALL_CONFIG).unwrap();
    let run = dal(&["run", "--config", "exp.toml", "--out", "rec"], dir.path());
    assert!(run.status.success(), "{}", stderr(&run));
    let out = dal(&["profile", "rec", "--metric", "mae"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("mcdue: auc"));
    assert!(text.contains("random: auc"));
}
