use std::path::Path;
use std::process::Command;

use rifslab::config::parse_config;
use rifslab::corpus;
use rifslab::render::parse_ppm;
use rifslab::run::{execute, execute_task};
use rifslab::{resolve_budget, run, ConfigError, RunError, RunOptions};

fn quiet(dir: &Path) -> RunOptions {
    RunOptions {
        out_dir: dir.to_path_buf(),
        verbose: false,
        ..Default::default()
    }
}

fn bundled(name: &str) -> rifslab::ExperimentConfig {
    parse_config(corpus::lookup(name).unwrap()).unwrap()
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn quantity(bytes: &[u8], name: &str) -> f64 {
    csv_rows(bytes)
        .into_iter()
        .find(|r| r[0] == name)
        .unwrap_or_else(|| panic!("no row {name}"))[1]
        .parse()
        .unwrap()
}

/// A small config with one task spliced in.
fn with_task(task: &str) -> String {
    format!(
        r#"{{
  "version": 1, "name": "t",
  "ambient": {{ "lo": [0], "hi": [1] }},
  "systems": [
    {{ "label": "c", "grid": {{ "m": 1, "n": 3, "cells": [[0, 0], [0, 2]] }} }},
    {{ "label": "i", "grid": {{ "m": 1, "n": 3, "cells": [[0, 0], [0, 1], [0, 2]] }} }}
  ],
  "omega": {{ "prefix": [2], "cycle": [1, 2] }},
  "tasks": [ {task} ]
}}"#
    )
}

#[test]
fn bundled_cantor_has_two_systems() {
    assert_eq!(bundled("cantor").rifs.len(), 2);
}

#[test]
fn malformed_json_is_a_parse_error_with_position() {
    let text = "{\n  \"version\": 1,\n  \"name\": \n}";
    match parse_config(text) {
        Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_fields_name_their_location() {
    let text = with_task(r#"{ "task": "dim", "msc_dpeth": 3 }"#);
    let e = parse_config(&text).unwrap_err();
    assert!(matches!(e, ConfigError::Schema { .. }), "{e}");
    let msg = e.to_string();
    assert!(
        msg.contains("tasks[0]") && msg.contains("msc_dpeth"),
        "{msg}"
    );
}

#[test]
fn bad_weights_are_a_semantic_error() {
    let text = with_task(r#"{ "task": "sample", "weights": [0.5, 0.6], "horizon": 10 }"#);
    let e = parse_config(&text).unwrap_err();
    assert!(matches!(e, ConfigError::Semantic { .. }), "{e}");
    assert!(e.to_string().contains("weights sum 1.1"), "{e}");
}

#[test]
fn empty_cycle_is_a_schema_error() {
    let text = with_task(r#"{ "task": "dim" }"#).replace(r#""cycle": [1, 2]"#, r#""cycle": []"#);
    let e = parse_config(&text).unwrap_err();
    assert!(matches!(e, ConfigError::Schema { .. }), "{e}");
    assert!(e.to_string().contains("cycle must be non-empty"), "{e}");
}

#[test]
fn symbols_must_name_a_system() {
    let text = with_task(r#"{ "task": "dim" }"#).replace(r#""cycle": [1, 2]"#, r#""cycle": [3]"#);
    assert!(matches!(
        parse_config(&text),
        Err(ConfigError::Semantic { .. })
    ));
}

#[test]
fn expressions_are_accepted_for_reals() {
    let text = with_task(r#"{ "task": "dim", "growth": { "h": "log(2)/log(6)", "p": "1/2" } }"#);
    let cfg = parse_config(&text).unwrap();
    let out = execute_task(&cfg, 0, &quiet(Path::new("."))).unwrap();
    assert!((quantity(&out.bytes, "growth_h") - 2f64.ln() / 6f64.ln()).abs() < 1e-11);
}

#[test]
fn curve_has_101_rows_and_dips_near_two_minus_root_two() {
    let cfg = bundled("carpet_affine");
    let i = cfg
        .tasks()
        .iter()
        .position(|t| t.kind() == "curve")
        .unwrap();
    let out = execute_task(&cfg, i, &quiet(Path::new("."))).unwrap();
    let rows = csv_rows(&out.bytes);
    assert_eq!(rows.len(), 101);
    assert!(out.bytes.starts_with(b"p1,p2,dim\n"));
    let best = rows
        .iter()
        .min_by(|a, b| {
            a[2].parse::<f64>()
                .unwrap()
                .total_cmp(&b[2].parse().unwrap())
        })
        .unwrap();
    assert!((best[0].parse::<f64>().unwrap() - 0.5858).abs() <= 0.01);
}

#[test]
fn cantor_dim_reports_log2_over_log3() {
    let cfg = bundled("cantor");
    let out = execute_task(&cfg, 0, &quiet(Path::new("."))).unwrap();
    let oracle = rifslab_core::similarity_dimension(&[1.0 / 3.0, 1.0 / 3.0])
        .unwrap()
        .value;
    assert!((quantity(&out.bytes, "omega_dimension") - oracle).abs() < 1e-9);
}

#[test]
fn square_cantor_render_is_stable() {
    let cfg = parse_config(&with_task(
        r#"{ "task": "render", "width": 256, "height": 256, "target_error": 0.001 }"#,
    ))
    .unwrap();
    let a = execute(&cfg, &quiet(Path::new("."))).unwrap();
    let b = execute(&cfg, &quiet(Path::new("."))).unwrap();
    assert_eq!(a, b);
    let (w, h, px) = parse_ppm(&a[0].bytes).unwrap();
    assert_eq!((w, h), (256, 256));
    assert!(a[0].bytes.starts_with(b"P6\n256 256\n255\n"));
    assert!(px.contains(&0));
}

#[test]
fn zero_width_render_is_a_usage_error() {
    let cfg = parse_config(&with_task(
        r#"{ "task": "render", "width": 0, "height": 4, "target_error": 0.1 }"#,
    ))
    .unwrap();
    match execute(&cfg, &quiet(Path::new("."))) {
        Err(
            e @ RunError::Task {
                source: rifslab_core::Error::Usage(_),
                ..
            },
        ) => assert_eq!(e.exit_code(), 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn splice_with_large_epsilon_is_the_tail() {
    let task = r#"{ "task": "splice-demo", "epsilon": 1, "tail": { "cycle": [1] }, "max_depth": 3, "gauge": { "power": 1 } }"#;
    let cfg = parse_config(&with_task(task)).unwrap();
    let out = execute(&cfg, &quiet(Path::new("."))).unwrap();
    let rows = csv_rows(&out[0].bytes);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][1], "(1)");
    assert_eq!(
        rows.iter().map(|r| r[3].as_str()).collect::<Vec<_>>(),
        ["1", "2", "3"]
    );
}

#[test]
fn splicing_in_the_shifted_sequence_returns_omega() {
    // ω = 2(1.2); after k = 3 symbols the remainder is (1.2).
    let task = r#"{ "task": "splice-demo", "epsilon": 0.125, "tail": { "cycle": [1, 2] }, "max_depth": 4, "gauge": { "power": 1 } }"#;
    let cfg = parse_config(&with_task(task)).unwrap();
    let out = execute(&cfg, &quiet(Path::new("."))).unwrap();
    let rows = csv_rows(&out[0].bytes);
    assert_eq!(rows[0][0], "3");
    assert_eq!(rows[0][2], "0");
}

#[test]
fn budget_precedence() {
    assert_eq!(resolve_budget(Some(5), Some("7")), Ok(5));
    assert_eq!(resolve_budget(None, Some("7")), Ok(7));
    assert_eq!(
        resolve_budget(None, None),
        Ok(rifslab_core::model::DEFAULT_BUDGET)
    );
    assert!(resolve_budget(None, Some("lots")).is_err());
}

#[test]
fn outputs_are_written_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let written = run(&bundled("cantor"), &quiet(dir.path())).unwrap();
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["boxdim.csv", "cantor.ppm", "dim.csv", "measure.csv"]
    );
    assert_eq!(written.len(), 4);
    let csv = std::fs::read(dir.path().join("dim.csv")).unwrap();
    assert!(!csv.contains(&b'\r'));
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rifslab"));
    c.env_remove("RIFSLAB_BUDGET");
    c
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        with_task(r#"{ "task": "boxdim", "ladder": { "base": 3, "from": 2, "to": 7 } }"#),
    )
    .unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, with_task(r#"{ "task": "dim", "bogus": 1 }"#)).unwrap();

    let ok = bin().args(["validate"]).arg(&good).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let invalid = bin().args(["validate"]).arg(&bad).output().unwrap();
    assert_eq!(invalid.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("schema error"));

    let out = dir.path().join("out");
    let tight = bin()
        .args(["run", "--quiet", "--budget", "8", "--out"])
        .arg(&out)
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(tight.status.code(), Some(2));
    assert!(!out.join("boxdim.csv").exists());

    let env = bin()
        .env("RIFSLAB_BUDGET", "8")
        .args(["run", "--quiet", "--out"])
        .arg(&out)
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));

    // The output directory cannot be created under a regular file.
    let blocked = good.join("sub");
    let io = bin()
        .args(["run", "--quiet", "--out"])
        .arg(&blocked)
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(3));

    let missing = bin()
        .args(["validate", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let fine = bin()
        .args(["run", "--quiet", "--out"])
        .arg(&out)
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(fine.status.code(), Some(0));
    assert!(out.join("boxdim.csv").exists());
}

#[test]
fn corpus_listing() {
    let list = bin().args(["corpus", "list"]).output().unwrap();
    assert!(list.status.success());
    let text = String::from_utf8(list.stdout).unwrap();
    for name in corpus::names() {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let show = bin().args(["corpus", "show", "cookie"]).output().unwrap();
    assert_eq!(show.stdout, corpus::lookup("cookie").unwrap().as_bytes());
}

/// Every map of every system scales axis `axis` by exactly `ratio`.
fn axis_ratio_is(cfg: &rifslab::ExperimentConfig, axis: usize, ratio: f64, maps: usize) {
    for sys in cfg.rifs.systems() {
        assert_eq!(sys.len(), maps, "{}", sys.label());
        for f in sys.maps() {
            let a = f.as_affine().expect("grid maps are affine");
            assert_eq!(a.m[axis][axis], ratio, "{}", sys.label());
            assert_eq!(a.m[axis][1 - axis], 0.0);
        }
    }
}

fn hull_of_constant(cfg: &rifslab::ExperimentConfig, symbol: u16) -> rifslab_core::Bbox {
    let omega = rifslab_core::OmegaSeq::constant(symbol).unwrap();
    rifslab_core::model::attractor_hull(&cfg.rifs, &omega).unwrap()
}

#[test]
fn hausdorff_example_shape() {
    let cfg = bundled("hausdorff_example");
    axis_ratio_is(&cfg, 1, 0.25, 4);
    let hull = hull_of_constant(&cfg, 2);
    assert!(
        hull.lo[0].abs() < 1e-12 && hull.hi[0].abs() < 1e-12,
        "{hull:?}"
    );
    assert!(hull.lo[1].abs() < 1e-12 && (hull.hi[1] - 1.0).abs() < 1e-12);
}

#[test]
fn packing_example_shape() {
    let cfg = bundled("packing_example");
    axis_ratio_is(&cfg, 0, 0.5, 2);
    let hull = hull_of_constant(&cfg, 2);
    assert!(
        hull.lo[1].abs() < 1e-12 && hull.hi[1].abs() < 1e-12,
        "{hull:?}"
    );
    assert!(hull.lo[0].abs() < 1e-12 && (hull.hi[0] - 1.0).abs() < 1e-12);
}
