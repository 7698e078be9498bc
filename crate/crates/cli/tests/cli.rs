use std::process::{Command, Output};

fn drf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn construct_phf_to_file_reports_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.drf");
    let o = drf(&["construct", "phf", "--n", "100", "--q", "17", "--d", "3", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SIZE 67\nFORMULA 67 "));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("DRF 1\nkind phf\nn 100\nq 17\nd 3\nm 67\nbody\n"));
    assert_eq!(text.lines().count(), 7 + 67);

    let v = drf(&["verify", path.to_str().unwrap(), "--oracle"]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    assert!(stdout(&v).starts_with("VERIFIED kind=phf checks="));
    assert!(stdout(&v).contains("ORACLE holds=true constraints=161700"));
}

#[test]
fn without_output_the_document_goes_to_stdout() {
    let o = drf(&["construct", "code", "--q", "2", "--h", "2", "--n", "1"]);
    // h = 2 is outside both regimes for q = 2
    assert_eq!(o.status.code(), Some(2));
    let o = drf(&["construct", "code", "--q", "16", "--h", "2", "--n", "15"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("DRF 1\nkind code\nn 15\nq 16\nm 11\nk 1\n"));
    assert!(stdout(&o).contains("modulus 1,0,0,1,1\n"));
    assert!(stderr(&o).starts_with("SIZE 11\nFORMULA 11 "));
}

#[test]
fn precondition_failures_exit_2_and_name_the_condition() {
    let o = drf(&["construct", "phf", "--n", "10", "--q", "7", "--d", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d(d-1)/2 + 2"));
    let o = drf(&["construct", "hitting", "--n", "10", "--d", "9", "--q", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drf(&["construct", "hitting", "--n", "50", "--d", "5", "--q", "49", "--eps", "1/10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drf(&["construct", "cff", "--n", "20", "--w", "0", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = drf(&["construct", "phf", "--n", "10", "--q", "7", "--d", "2", "--dense", "1/0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn construct_cff_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.drf");
    let o = drf(&["construct", "cff", "--n", "20", "--w", "1", "--r", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SIZE 945\nFORMULA 945 "));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.drf");
    let o = drf(&["construct", "shf", "--n", "15", "--q", "5", "--ds", "1,2", "-o", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(drf(&["verify", good.to_str().unwrap()]).status.code(), Some(0));

    let text = std::fs::read_to_string(&good).unwrap();
    let truncated = dir.path().join("truncated.drf");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let o = drf(&["verify", truncated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = drf(&["verify", good.to_str().unwrap(), "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let missing = dir.path().join("missing.drf");
    assert_eq!(drf(&["verify", missing.to_str().unwrap()]).status.code(), Some(2));

    let bad = dir.path().join("bad.drf");
    std::fs::write(&bad, "DRF 1\nkind phf\nn 4\nq 2\nd 2\nm 1\nbody\n0 0 0 0\n").unwrap();
    let o = drf(&["verify", bad.to_str().unwrap(), "--oracle"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("WITNESS subset={0,1} hits=0"));
    assert!(stdout(&o).contains("ORACLE holds=false"));
}

#[test]
fn bounds_reports() {
    let o = drf(&["bounds", "phf", "--n", "100", "--q", "17", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("[exact]") && s.contains("[asymptotic, constants omitted]"));

    let o = drf(&["bounds", "dense-phf", "--q", "100", "--d", "2", "--eps", "1/200"]);
    assert!(stdout(&o).contains("INFEASIBLE"));

    let o = drf(&["bounds", "shf", "--n", "16", "--q", "2", "--ds", "1,1"]);
    assert!(stdout(&o).contains("BOUND shf_lower = 3.000000 [exact]"));

    let o = drf(&["bounds", "shf", "--n", "2", "--q", "2", "--ds", "1,1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = drf(&["bounds", "cff", "--n", "20", "--w", "30", "--r", "31"]);
    assert_eq!(o.status.code(), Some(2));

    let o = drf(&["bounds", "entropy", "--q", "4", "--p", "3/4"]);
    assert!(stdout(&o).contains("BOUND entropy = 1.000000 [exact]"));

    let o = drf(&["bounds", "g", "--q", "3", "--d", "3"]);
    assert!(stdout(&o).contains("BOUND g = 2/9 [exact]"));
}

#[test]
fn small_alphabet_and_small_d_variants_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("s.drf", vec!["construct", "shf", "--n", "10", "--q", "2", "--ds", "1,2", "--small-alphabet"]),
        ("p.drf", vec!["construct", "phf", "--n", "16", "--q", "2", "--d", "2", "--small-d"]),
        ("h.drf", vec!["construct", "hitting", "--n", "12", "--d", "2", "--q", "25", "--eps", "1/2"]),
    ] {
        let path = dir.path().join(name);
        let mut args = args.clone();
        let p = path.to_str().unwrap().to_string();
        args.extend(["-o", &p]);
        let o = drf(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let v = drf(&["verify", &p, "--oracle"]);
        assert_eq!(v.status.code(), Some(0), "{args:?}: {}", stdout(&v));
    }
}
