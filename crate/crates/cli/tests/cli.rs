use std::fs;
use std::path::Path;
use std::process::Command;

use spde_inverse::{Potential, Sampler};
use spde_inverse_cli::bundle::{
    CONFIG_FILE, ENSEMBLE_FILE, METRICS_FILE, PSI_EXTENDED_FILE, PSI_FILE, RECONSTRUCTION_FILE,
};
use spde_inverse_cli::csvio::read_table;
use spde_inverse_cli::{emit_plot_data, run_pipeline, CliError, ExperimentConfig, PotentialPreset};
use tempfile::tempdir;

fn small() -> ExperimentConfig {
    ExperimentConfig {
        m: 20,
        n: 64,
        paths: 500,
        ..ExperimentConfig::default()
    }
}

#[test]
fn written_config_reparses_to_same_run_config() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("q.csv"), "t,q\n0,0\n0.5,1\n1,0.5\n").unwrap();
    let text = "a = 1.5\nT = 1\nM = 30\nN = 64\nu0 = eigen1\npotential = csv:q.csv\nP = 10\nepsilon = 0.05\n\
                method = cutoff\nxi_max = 25\nbase_seed = 7\nsampler = exact\nthreads = 4\n";
    let path = dir.path().join("run.txt");
    fs::write(&path, text).unwrap();
    let first = ExperimentConfig::load(&path).unwrap();
    assert_eq!(
        first.potential,
        PotentialPreset::Csv(dir.path().join("q.csv"))
    );

    let copy = dir.path().join("sub");
    fs::create_dir(&copy).unwrap();
    fs::write(copy.join("run.txt"), first.to_config_string(true)).unwrap();
    let second = ExperimentConfig::load(&copy.join("run.txt")).unwrap();
    assert_eq!(second, first);
    assert_eq!(second.run_config().unwrap(), first.run_config().unwrap());
    assert_eq!(second.sampler, Sampler::ExactExponential);
}

#[test]
fn example_presets() {
    let q2 = PotentialPreset::Example2.to_potential().unwrap();
    let want = [0.0, 4.0 * (0.3f64).sqrt(), 0.0];
    for (t, w) in [0.2, 0.5, 0.8].into_iter().zip(want) {
        assert!(
            (q2.eval(t) - w).abs() < 1e-12,
            "example2({t}) = {}",
            q2.eval(t)
        );
    }
    let q3 = PotentialPreset::Example3.to_potential().unwrap();
    let got: Vec<f64> = [0.0, 0.2, 0.3, 0.5, 0.6, 0.8, 0.9, 1.0]
        .iter()
        .map(|&t| q3.eval(t))
        .collect();
    assert_eq!(got, [0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 0.0, 0.0]);
    let q1 = PotentialPreset::Example1.to_potential().unwrap();
    assert_eq!(q1, Potential::Sine { amplitude: 1.0 });
}

#[test]
fn noiseless_single_path_with_zero_potential_recovers_zero() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        potential: PotentialPreset::Constant(0.0),
        paths: 1,
        epsilon: 0.0,
        ..ExperimentConfig::default()
    };
    let m = run_pipeline(&cfg, dir.path()).unwrap();
    assert_eq!(m.discarded_paths, 0);
    let rec = read_table(&dir.path().join(RECONSTRUCTION_FILE)).unwrap();
    for q2 in rec.column("q2_rec").unwrap() {
        assert!(q2.abs() < 1e-8, "q2 = {q2}");
    }
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    run_pipeline(&small(), a.path()).unwrap();
    run_pipeline(&small(), b.path()).unwrap();
    assert_eq!(read_dir_bytes(a.path()), read_dir_bytes(b.path()));
}

#[test]
fn emitted_files_exist_and_parse() {
    let dir = tempdir().unwrap();
    let cfg = small();
    run_pipeline(&cfg, dir.path()).unwrap();
    for name in [PSI_FILE, PSI_EXTENDED_FILE, RECONSTRUCTION_FILE] {
        let table = read_table(&dir.path().join(name)).unwrap();
        assert!(!table.rows.is_empty(), "{name}");
    }
    let rec = read_table(&dir.path().join(RECONSTRUCTION_FILE)).unwrap();
    assert_eq!(rec.header, ["t", "q2_true", "q2_rec"]);
    assert_eq!(rec.rows.len(), cfg.n + 1);
    let ext = read_table(&dir.path().join(PSI_EXTENDED_FILE)).unwrap();
    assert_eq!(ext.rows.len(), 3 * cfg.n);

    let text = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["rel_l2_error_trimmed", "rel_l2_error_full", "negative_mass"] {
        assert!(json[key].as_f64().unwrap() >= 0.0, "{key}");
    }
    assert_eq!(json["paths"], 500);
    assert_eq!(json["discarded_paths"], 0);
    assert_eq!(json["parameters"]["N"], 64);
    assert_eq!(json["parameters"]["potential"], "example1");

    let keys: Vec<&str> = json
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    let mut in_file = keys.clone();
    in_file.sort_by_key(|k| pos(k));
    assert_eq!(in_file[0], "rel_l2_error_trimmed");
}

#[test]
fn emit_reproduces_pipeline_outputs() {
    let dir = tempdir().unwrap();
    let metrics = run_pipeline(&small(), dir.path()).unwrap();
    let before = read_dir_bytes(dir.path());
    fs::remove_file(dir.path().join(METRICS_FILE)).unwrap();
    fs::remove_file(dir.path().join(PSI_FILE)).unwrap();
    assert_eq!(emit_plot_data(dir.path()).unwrap(), metrics);
    assert_eq!(read_dir_bytes(dir.path()), before);
}

#[test]
fn emit_without_bundle_fails() {
    let dir = tempdir().unwrap();
    assert!(matches!(
        emit_plot_data(dir.path()),
        Err(CliError::MissingBundle(_))
    ));
    run_pipeline(&small(), dir.path()).unwrap();
    fs::remove_file(dir.path().join(ENSEMBLE_FILE)).unwrap();
    assert!(matches!(
        emit_plot_data(dir.path()),
        Err(CliError::MissingBundle(_))
    ));
}

#[test]
fn config_txt_omits_threads() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        threads: 3,
        ..small()
    };
    run_pipeline(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join(CONFIG_FILE)).unwrap();
    assert!(!text.contains("threads"));
}

#[test]
fn degenerate_ensemble_reports_discards() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        potential: PotentialPreset::Constant(40.0),
        m: 10,
        n: 16,
        paths: 50,
        ..ExperimentConfig::default()
    };
    let err = run_pipeline(&cfg, dir.path()).unwrap_err();
    assert!(err.to_string().contains("all 50 paths discarded"), "{err}");
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spde-inverse"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.txt");
    fs::write(&cfg, small().to_config_string(true)).unwrap();
    let out = dir.path().join("bundle");
    let status = binary()
        .arg("pipeline")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join(METRICS_FILE).is_file());
    assert!(binary().arg("emit").arg(&out).status().unwrap().success());

    let missing = binary()
        .arg("emit")
        .arg(dir.path().join("none"))
        .output()
        .unwrap();
    assert!(!missing.status.success());

    fs::write(&cfg, small().to_config_string(true) + "colour = red\n").unwrap();
    let bad = binary().arg("pipeline").arg(&cfg).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("colour"));

    let rates = dir.path().join("rates.csv");
    let cfg_text = ExperimentConfig {
        m: 10,
        n: 16,
        paths: 20,
        ..small()
    }
    .to_config_string(true);
    fs::write(&cfg, cfg_text).unwrap();
    assert!(binary()
        .args(["convergence", "spde"])
        .arg(&cfg)
        .arg("--out")
        .arg(&rates)
        .status()
        .unwrap()
        .success());
    let mut reader = csv::Reader::from_path(&rates).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["study", "M", "N", "h", "tau", "error", "fitted_order"]
    );
    assert_eq!(reader.records().count(), 4);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["example1.txt", "example2.txt", "example3.txt"] {
        let cfg = ExperimentConfig::load(&dir.join(name)).unwrap();
        cfg.run_config().unwrap();
    }
}
