use std::f64::consts::PI;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use bvc3d::bvc::ModelName;
use bvc3d::config::{Overrides, RunConfig};
use bvc3d::experiment::{self, ANALYSIS_DIR, TRACE_FILE};
use bvc3d::recording::{read_trace, TraceHeader, TraceSample, TraceWriter};
use bvc3d::Error;
use proptest::prelude::*;

fn short(model: ModelName, env: u8, seed: u64) -> RunConfig {
    let o = Overrides {
        model: Some(model),
        env: Some(env),
        seed: Some(seed),
        exploration_steps: Some(400),
        sampling_steps: Some(1200),
    };
    RunConfig::resolve(None, &o).unwrap()
}

fn full_pipeline(config: &RunConfig, dir: &Path) {
    experiment::run_trial(config, dir, &mut |_| {}).unwrap();
    let a = experiment::analyze(&dir.join(TRACE_FILE), config).unwrap();
    experiment::write_analysis(&a, &dir.join(ANALYSIS_DIR)).unwrap();
    experiment::render_analysis(&dir.join(ANALYSIS_DIR), &dir.join("render")).unwrap();
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for model in [ModelName::Model2d, ModelName::Model3d02] {
        let c = short(model, 3, 17);
        let (a, b) = (tmp.path().join(format!("{model}-a")), tmp.path().join(format!("{model}-b")));
        full_pipeline(&c, &a);
        full_pipeline(&c, &b);
        let (ta, tb) = (tree(&a), tree(&b));
        assert!(ta.contains_key("trace.txt") && ta.contains_key("render/sai.ppm") && ta.contains_key("analysis/sai.txt"));
        assert_eq!(ta, tb, "{model}");
        let other = tmp.path().join(format!("{model}-c"));
        full_pipeline(&short(model, 3, 18), &other);
        assert_ne!(tree(&other)["trace.txt"], ta["trace.txt"]);
    }
}

#[test]
fn outputs_carry_the_config_digest() {
    let tmp = tempfile::tempdir().unwrap();
    let c = short(ModelName::Model2d, 1, 3);
    full_pipeline(&c, tmp.path());
    let d = c.digest();
    for (name, bytes) in tree(tmp.path()) {
        if name.ends_with("network.bin") {
            continue;
        }
        let text = String::from_utf8_lossy(&bytes[..bytes.len().min(200)]).to_string();
        assert!(text.contains(&d), "{name} lacks the digest");
    }
    assert_eq!(experiment::load_trial_config(tmp.path()).unwrap(), c);
}

#[test]
fn analyze_refuses_a_different_config() {
    let tmp = tempfile::tempdir().unwrap();
    let c = short(ModelName::Model2d, 2, 5);
    experiment::run_trial(&c, tmp.path(), &mut |_| {}).unwrap();
    let mut other = c.clone();
    other.pcn.gamma_pp = 0.31;
    let err = experiment::analyze(&tmp.path().join(TRACE_FILE), &other).err().unwrap();
    assert!(matches!(err, Error::DigestMismatch { .. }), "{err}");
    assert!(err.is_config());
}

#[test]
fn trace_has_one_sample_per_sampling_step() {
    let tmp = tempfile::tempdir().unwrap();
    let c = short(ModelName::Model3dThreeLayer, 4, 2);
    experiment::run_trial(&c, tmp.path(), &mut |_| {}).unwrap();
    let reader = read_trace(tmp.path().join(TRACE_FILE), Some(&c.digest())).unwrap();
    assert_eq!(reader.header().samples, 1200);
    let samples = reader.collect_samples().unwrap();
    assert_eq!(samples.len(), 1200);
    assert!(samples.iter().enumerate().all(|(i, s)| s.step == i as u64));
    assert!(samples.iter().all(|s| s.x.abs() < 5.0 && s.y.abs() < 5.0));
}

fn header(n: usize) -> TraceHeader {
    TraceHeader {
        model: "3d02".into(),
        tilt_deg: 45.0,
        n_p: 250,
        n_b: 960,
        seed: 9,
        digest: "abc123".into(),
        samples: n,
    }
}

#[test]
fn truncated_traces_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("t.txt");
    let mut w = TraceWriter::create(&path, &header(3)).unwrap();
    for s in 0..3 {
        w.append(&TraceSample::from_rates(s, 0.5, -0.5, 0.1, &[0.2; 250])).unwrap();
    }
    w.finish().unwrap();
    let full = fs::read(&path).unwrap();
    let cut = &full[..full.len() - 10];
    fs::write(&path, cut).unwrap();
    let result = read_trace(&path, None).and_then(|r| r.collect_samples());
    assert!(matches!(result, Err(Error::TraceTruncated { .. })), "{result:?}");

    let mut w = TraceWriter::create(&path, &header(3)).unwrap();
    w.append(&TraceSample::from_rates(0, 0.0, 0.0, 0.0, &[0.2; 250])).unwrap();
    assert!(matches!(w.finish(), Err(Error::SampleCount { .. })));
}

#[test]
fn full_sampling_trace_stays_under_budget() {
    // 15% of the cells above the floor in every sample
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("t.txt");
    let rates: Vec<f64> = (0..250).map(|i| if i % 7 == 0 { 0.123456789 + i as f64 * 1e-3 } else { 0.0 }).collect();
    assert_eq!(TraceSample::from_rates(0, 0.0, 0.0, 0.0, &rates).activations.len(), 36);
    assert!(TraceSample::from_rates(0, 0.0, 0.0, 0.0, &[0.0; 250]).activations.is_empty());
    let mut w = TraceWriter::create(&path, &header(30_000)).unwrap();
    for s in 0..30_000 {
        w.append(&TraceSample::from_rates(s, -4.987654321, 3.123456789, -2.9, &rates)).unwrap();
    }
    w.finish().unwrap();
    assert!(fs::metadata(&path).unwrap().len() < 100 * 1024 * 1024);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn traces_round_trip(
        rows in prop::collection::vec(
            (-5.0f64..5.0, -5.0f64..5.0, -PI..PI, prop::collection::vec(0.0f64..1.0, 250)),
            1..40,
        )
    ) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("t.txt");
        let samples: Vec<TraceSample> = rows
            .iter()
            .enumerate()
            .map(|(i, (x, y, h, r))| TraceSample::from_rates(i as u64, *x, *y, *h, r))
            .collect();
        let mut w = TraceWriter::create(&path, &header(samples.len())).unwrap();
        for s in &samples {
            w.append(s).unwrap();
        }
        w.finish().unwrap();
        let reader = read_trace(&path, Some("abc123")).unwrap();
        prop_assert_eq!(reader.header(), &header(samples.len()));
        prop_assert_eq!(reader.collect_samples().unwrap(), samples);
        let mismatch = matches!(read_trace(&path, Some("abd")), Err(Error::DigestMismatch { .. }));
        prop_assert!(mismatch);
    }
}
