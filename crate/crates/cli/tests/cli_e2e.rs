use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use proptest::prelude::*;
use zerocert::operators::ParamValue;
use zerocert_cli::output::to_json;
use zerocert_cli::{run, BodySpec, CertificateFile, Command, OperatorSpec, Payload, ProblemConfig};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn load(name: &str) -> ProblemConfig {
    ProblemConfig::load(&config_path(name)).unwrap()
}

fn zerocert(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_zerocert")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn assert_round_trip(file: &CertificateFile) {
    let text = file.to_json().unwrap();
    let back = CertificateFile::from_json(&text).unwrap();
    assert_eq!(&back, file);
    assert_eq!(back.to_json().unwrap(), text);
}

#[test]
fn delta_examples() {
    let seg = run(Command::Delta, &load("unit_segment.toml")).unwrap();
    let square = run(Command::Delta, &load("unit_square.toml")).unwrap();
    let point = run(Command::Delta, &load("singleton.toml")).unwrap();
    let bracket = |o: &zerocert_cli::Outcome| match &o.file.result {
        Payload::Delta(d) => (d.bounds.lower, d.bounds.upper, d.self_checks.iter().map(|c| c.deviation).fold(0.0, f64::max)),
        other => panic!("unexpected payload {other:?}"),
    };
    let (lo, hi, dev) = bracket(&seg);
    assert_eq!((lo, hi), (0.25, 0.25));
    assert!(dev < 1e-12);
    let (lo, hi, dev) = bracket(&square);
    assert!((lo - 0.5).abs() < 1e-6 && (hi - 0.5).abs() < 1e-6 && dev < 1e-6);
    assert_eq!(bracket(&point).0, 0.0);
    assert_eq!(bracket(&point).1, 0.0);
    for o in [&seg, &square, &point] {
        assert_eq!(o.exit_code, 0);
        assert_round_trip(&o.file);
    }
    assert_eq!(seg.csv.header[..3], ["resolution", "lower", "upper"]);
}

#[test]
fn certify_examples() {
    let circle = run(Command::Certify, &load("circle.toml")).unwrap();
    let Payload::NearZero(cert) = &circle.file.result else { panic!("{:?}", circle.file.result) };
    let pi = std::f64::consts::PI;
    assert!((cert.claimed_bound - pi * pi / 8.0).abs() < 1e-9);
    assert!(cert.validation.grid_min <= cert.claimed_bound);
    assert_eq!(circle.exit_code, 0);

    let identity = run(Command::Certify, &load("identity.toml")).unwrap();
    let Payload::NearZero(cert) = &identity.file.result else { panic!() };
    assert_eq!(cert.l, 0.0);
    assert!(cert.claimed_bound <= 1e-9);

    let none = run(Command::Certify, &load("translation.toml")).unwrap();
    assert_eq!(none.exit_code, 2);
    assert_eq!(none.file.status, "no-certificate");
    assert!(matches!(none.file.result, Payload::NoCertificate(_)));
    for o in [&circle, &identity, &none] {
        assert_round_trip(&o.file);
    }
}

#[test]
fn search_examples() {
    let ex = run(Command::Search, &load("example11.toml")).unwrap();
    let Payload::Search(r) = &ex.file.result else { panic!() };
    assert!(r.best.as_ref().unwrap().delta_upper < 0.01);
    assert_eq!(ex.csv.rows.len(), r.trace.len());
    assert_eq!(ex.csv.header, ["rank", "kind", "delta_upper", "residual", "generators"]);
    let empty = run(Command::Search, &load("translation.toml")).unwrap();
    assert_eq!((empty.exit_code, empty.file.status.as_str()), (2, "empty"));
    for o in [&ex, &empty] {
        assert_round_trip(&o.file);
    }
}

#[test]
fn example11_table_and_csv() {
    let config = ProblemConfig { n_max: Some(10), ..ProblemConfig::default() };
    let o = run(Command::Example11, &config).unwrap();
    let Payload::Example11(t) = &o.file.result else { panic!() };
    assert_eq!(t.rows.len(), 10);
    assert!(t.rows.iter().all(|r| r.beta_sq_minus_alpha_sq == 0.75));
    let text = String::from_utf8(o.csv.to_bytes().unwrap()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,alpha,beta,phi_alpha_x,phi_alpha_y,phi_beta_x,phi_beta_y,beta_sq_minus_alpha_sq,delta_exact,membership_residual"
    );
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,1.0000000000000000e0,"));
    assert!(lines.iter().skip(1).all(|l| l.split(',').nth(7) == Some("7.5000000000000000e-1")));
    assert_round_trip(&o.file);
}

#[test]
fn gap_examples() {
    let circle = run(Command::Gap, &load("circle.toml")).unwrap();
    let Payload::Gap(g) = &circle.file.result else { panic!() };
    assert!(g.gap.holds);
    assert!((g.gap.lhs - 1.0).abs() < 1e-9);
    assert!((g.gap.rhs - 1.2337).abs() < 1e-4);
    let affine = run(Command::Gap, &load("affine.toml")).unwrap();
    let Payload::Gap(g) = &affine.file.result else { panic!() };
    assert_eq!((g.gap.lhs, g.gap.rhs), (0.0, 0.0));
    let wrong = run(Command::Gap, &load("square_map_wrong_l.toml")).unwrap();
    let Payload::Gap(g) = &wrong.file.result else { panic!() };
    assert!(g.mechanism.violations > 0);
    assert_eq!(wrong.exit_code, 2);
    for o in [&circle, &affine, &wrong] {
        assert_round_trip(&o.file);
    }
}

#[test]
fn exit_codes_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let csv = dir.path().join("table.csv");
    let seg = config_path("unit_segment.toml");
    let (code, stdout, _) = zerocert(&[
        "delta",
        "--config",
        seg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--resolution",
        "12",
        "--tol",
        "hull=1e-7",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("delta bracket: [0.25000000000000000, 0.25000000000000000]"));
    let file = CertificateFile::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.command, "delta");
    assert_eq!(file.config.resolution, 12);
    assert_eq!(file.config.tolerances.get("hull"), Some(&1e-7));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("resolution,lower,upper,"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);

    let t = config_path("translation.toml");
    let (code, stdout, _) = zerocert(&["certify", "--config", t.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stdout.contains("status: no-certificate"));
    assert_eq!(zerocert(&["search", "--config", t.to_str().unwrap(), "--quiet"]).0, 2);
    let w = config_path("square_map_wrong_l.toml");
    assert_eq!(zerocert(&["gap", "--config", w.to_str().unwrap(), "--quiet"]).0, 2);

    let (code, stdout, _) = zerocert(&["example11", "--n-max", "2", "--quiet"]);
    assert_eq!((code, stdout.as_str()), (0, ""));

    assert_eq!(zerocert(&["delta", "--config", "/nonexistent.toml"]).0, 1);
    assert_eq!(zerocert(&["delta", "--config", seg.to_str().unwrap(), "--tol", "nonsense=1"]).0, 1);
    assert_eq!(zerocert(&["delta", "--config", seg.to_str().unwrap(), "--resolution", "0"]).0, 1);
    assert_eq!(zerocert(&["delta", "--bogus"]).0, 1);
    assert_eq!(zerocert(&["delta"]).0, 1);
    assert_eq!(zerocert(&["--help"]).0, 0);
}

#[test]
fn gap_needs_a_lipschitz_constant() {
    let mut config = load("example11.toml");
    config.resolution = 4;
    assert!(run(Command::Gap, &config).is_err());
    config.l_override = Some(1.0);
    let o = run(Command::Gap, &config).unwrap();
    let Payload::Gap(g) = &o.file.result else { panic!() };
    assert_eq!(g.l, 1.0);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

fn body_spec() -> impl Strategy<Value = BodySpec> {
    let pt = || prop::collection::vec(finite(), 2);
    prop_oneof![
        (pt(), pt()).prop_map(|(a, b)| BodySpec::Segment { a, b }),
        prop::collection::vec(pt(), 1..5).prop_map(|vertices| BodySpec::Polytope { vertices }),
        (pt(), finite()).prop_map(|(center, radius)| BodySpec::Ball { center, radius }),
        (pt(), pt()).prop_map(|(lo, hi)| BodySpec::Box { lo, hi }),
        pt().prop_map(|point| BodySpec::Singleton { point }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Configs survive TOML and JSON bit for bit (values are not validated
    /// here, only the encoding).
    #[test]
    fn config_round_trips(
        resolution in 1usize..1000,
        seed in any::<u64>(),
        l in prop::option::of(finite()),
        x in finite(),
        v in prop::collection::vec(finite(), 0..4),
        region in prop::option::of(body_spec()),
        body in prop::option::of(body_spec()),
        tol in finite(),
    ) {
        let mut params = BTreeMap::new();
        params.insert("s".to_string(), ParamValue::Scalar(x));
        params.insert("v".to_string(), ParamValue::Vector(v));
        let config = ProblemConfig {
            resolution,
            seed,
            l_override: l,
            budget: Some(5),
            n_max: None,
            trials: Some(3),
            operator: Some(OperatorSpec { name: "affine".into(), params }),
            region,
            body,
            tolerances: [("hull".to_string(), tol)].into_iter().collect(),
        };
        let text = config.to_toml().unwrap();
        let back: ProblemConfig = toml::from_str(&text).unwrap();
        prop_assert_eq!(&back, &config);
        let json = to_json(&config).unwrap();
        let back: ProblemConfig = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &config);
    }
}
