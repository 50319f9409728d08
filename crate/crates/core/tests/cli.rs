use std::path::PathBuf;

use bgg_workbench::cli::run;
use bgg_workbench::format::{self, WorkbenchFile};
use bgg_workbench::linalg::Field;
use bgg_workbench::models::{generate, ModelSpec};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bggw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn bggw(args: &[&str]) -> (i32, String) {
    run(std::iter::once("bggw").chain(args.iter().copied()))
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn write_model(spec: ModelSpec, dual: bool, name: &str) -> String {
    let m = generate(&spec, Field::Rationals).unwrap();
    let path = scratch(name);
    std::fs::write(&path, format::emodule_to_string(if dual { &m.q } else { &m.p })).unwrap();
    path.display().to_string()
}

#[test]
fn regularity_of_product_dual() {
    let q = write_model(ModelSpec::CurveTimesP1(2), true, "ctp1.json");
    let (code, out) = bggw(&["regularity", &q]);
    assert_eq!((code, out.trim()), (0, "m = 1 (both routes agree; T=8, imax=8)"));
    let (code, out) = bggw(&["regularity", &q, "--route", "def", "--imax", "4"]);
    assert_eq!((code, out.trim()), (0, "m = 1 (route def; imax=4)"));
}

#[test]
fn criterion_on_two_by_two_example() {
    let (code, out) = bggw(&["ss", "criterion", &data("two_by_two.json"), "-r", "1"]);
    assert_eq!(code, 1);
    assert!(out.contains("x=(t,1), dx=(0,t^2)"), "{out}");
    let (code, _) = bggw(&["ss", "criterion", &data("two_by_two.json"), "-r", "2"]);
    assert_eq!(code, 0);
}

#[test]
fn theorem_a_on_e() {
    let e = write_model(ModelSpec::Abelian(1), true, "e.json");
    let (code, out) = bggw(&["verify-theorem-a", &e]);
    assert_eq!((code, out.trim()), (0, "reg = 0; Betti splits into 1 linear strand"));
    let qc = write_model(ModelSpec::Curve(2), true, "qc.json");
    let (code, out) = bggw(&["verify-theorem-a", "0", &qc]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bggw(&["betti", "m.json", "--imax", "2", "--nope"]).0, 2);
    assert_eq!(bggw(&["frobnicate"]).0, 2);
    assert_eq!(bggw(&["model", "abelian", "--dim", "7"]).0, 2);
    assert_eq!(bggw(&["model", "curve"]).0, 2);
    assert_eq!(bggw(&["regularity", "/nonexistent.json"]).0, 2);
}

#[test]
fn model_output_round_trips() {
    let path = scratch("abelian3.json");
    let p = path.display().to_string();
    let (code, _) = bggw(&["model", "abelian", "--dim", "3", "--out", &p]);
    assert_eq!(code, 0);
    let m = format::load_emodule(&path, None).unwrap();
    assert_eq!(m, generate(&ModelSpec::Abelian(3), Field::Rationals).unwrap().p.trimmed());
    let (code, out) = bggw(&["validate", &p]);
    assert_eq!(code, 0);
    assert!(out.ends_with("valid\n"), "{out}");
}

#[test]
fn invalid_module_is_refuted() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        r#"{"schema":"emodule/1","field":"Q","q":2,
            "components":[{"degree":1,"dim":1},{"degree":0,"dim":1},{"degree":-1,"dim":1}],
            "action":[{"var":"e1","degree":1,"matrix":[["1"]]},{"var":"e1","degree":0,"matrix":[["1"]]}]}"#,
    )
    .unwrap();
    let p = path.display().to_string();
    let (code, out) = bggw(&["validate", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("e1 e1 + e1 e1 != 0 on degree 1"), "{out}");
    assert_eq!(bggw(&["betti", &p, "--imax", "2"]).0, 1);
}

#[test]
fn syntax_error_reports_position() {
    let path = scratch("broken.json");
    std::fs::write(&path, "{\n  \"schema\": \"rcomplex/1\",\n  oops\n}").unwrap();
    let (code, out) = bggw(&["ss", "validate", &path.display().to_string()]);
    assert_eq!(code, 2);
    assert!(out.contains("line 3"), "{out}");
}

#[test]
fn betti_csv_and_field_switch() {
    let q = write_model(ModelSpec::Curve(2), true, "qc_csv.json");
    let (code, out) = bggw(&["betti", &q, "--imax", "2", "--format", "csv", "--field", "fp:101"]);
    assert_eq!(code, 0);
    assert_eq!(out, "i,t,beta\n0,0,2\n1,-1,3\n2,-2,4\n");
}

#[test]
fn spectral_sequence_commands() {
    let k = data("two_by_two.json");
    let (code, out) = bggw(&["ss", "pages", &k, "--max-page", "3", "--pmax", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("r,p,q,dim\n"));
    assert!(out.contains("3,0,0,0\n") && out.contains("3,0,1,1\n"), "{out}");
    let (code, out) = bggw(&["ss", "pages", &k, "--max-page", "3", "--pmax", "2", "--precision", "4"]);
    assert_eq!(code, 2, "{out}");
    assert_eq!(bggw(&["ss", "degeneration", &k, "-r", "2"]).0, 1);
    assert_eq!(bggw(&["ss", "degeneration", &k, "-r", "3"]).0, 0);
    assert_eq!(bggw(&["ss", "e1-check", &k]).0, 0);
    let (code, out) = bggw(&["ss", "induce", &k]);
    assert_eq!(code, 0);
    match format::parse_str(&out, None).unwrap() {
        WorkbenchFile::EModule(p) => assert_eq!((p.dim(0), p.dim(1)), (1, 1)),
        _ => panic!("{out}"),
    }
    let sum = scratch("sum.json");
    let (code, _) = bggw(&["ss", "sum", &k, &k, "--out", &sum.display().to_string()]);
    assert_eq!(code, 0);
    assert_eq!(format::load_rcomplex(&sum, None).unwrap().ranks(), &[4, 4]);
}
