use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjred")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn files() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
    write("path.g", "graph 3\ne 0 1\ne 1 2\n");
    write("edge.g", "graph 3\ne 0 1\n");
    write("edge2.g", "graph 3\ne 1 2\n");
    write("swap.m", "map 0 2\nmap 2 0\n");
    write("perm.m", "map 0 1\nmap 1 0\nmap 2 3\nmap 3 4\nmap 4 2\nmap 7 12\nmap 12 7\n");
    write("two.o", "order finite 2\nrank 0 1\nrank 1 0\n");
    write("q.o", "order catalog Q\n");
    write("bad.g", "graph 3\ne 0 1\ne 1 0\n");
    dir
}

#[test]
fn rado_examples() {
    let dir = files();
    let o = run(&["rado", "adj", "2", "5"], dir.path());
    assert_eq!((stdout(&o).as_str(), o.status.code()), ("true\n", Some(0)));
    let o = run(&["rado", "adj", "5", "2"], dir.path());
    assert_eq!(stdout(&o), "true\n");
    let o = run(&["rado", "adj", "1", "5"], dir.path());
    assert_eq!(stdout(&o), "false\n");
    let o = run(&["rado", "witness", "0,1", "2"], dir.path());
    assert_eq!((stdout(&o).as_str(), o.status.code()), ("11\n", Some(0)));
    let o = run(&["rado", "witness", "-", "-"], dir.path());
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn delta_queries() {
    let dir = files();
    let o = run(&["delta", "adj", "path.g", "0,0", "0,1"], dir.path());
    assert_eq!(stdout(&o), "true\n");
    let o = run(&["delta", "adj", "path.g", "0,0", "0,2"], dir.path());
    assert_eq!(stdout(&o), "false\n");
    let o = run(&["delta", "witness", "path.g", "0,0,1,1", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let w = stdout(&o);
    let (row, col) = w.trim().split_once(',').unwrap();
    let (row, col): (usize, u64) = (row.parse().unwrap(), col.parse().unwrap());
    // Check the reported vertex against the queried adjacencies.
    let adj = |a: &str| stdout(&run(&["delta", "adj", "path.g", a, &format!("{row},{col}")], dir.path()));
    assert_eq!(adj("0,0"), "true\n");
    assert_eq!(adj("1,1"), "true\n");
    assert_eq!(adj("0,1"), "false\n");
}

#[test]
fn conjugate_verdicts() {
    let dir = files();
    let o = run(&["conjugate", "path.g", "edge.g", "--depth", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("verdict not-conjugate"));
    let o = run(&["conjugate", "edge.g", "edge2.g", "--depth", "20"], dir.path());
    let out = stdout(&o);
    assert_eq!(out.lines().last(), Some("verdict conjugate"));
    assert!(out.lines().rev().skip(1).all(|l| l.starts_with("map ")));
    let o = run(&["conjugate", "edge.g", "edge2.g", "--iso", "swap.m", "--depth", "20"], dir.path());
    assert_eq!(stdout(&o).lines().last(), Some("verdict conjugate"));
    let o = run(&["conjugate", "edge.g", "edge2.g", "--budget", "0"], dir.path());
    assert_eq!(stdout(&o).lines().last(), Some("verdict exhausted"));
}

#[test]
fn order_commands() {
    let dir = files();
    let o = run(&["orbitals", "two.o", "--depth", "4"], dir.path());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.starts_with("orbital ")));
    let o = run(&["orbitals", "q.o", "--depth", "5"], dir.path());
    assert!(stdout(&o).lines().all(|l| l.ends_with(" fixed")));
    let o = run(&["reduce", "order", "q.o", "--depth", "5"], dir.path());
    assert_eq!(stdout(&o), "map 0 0\nmap 1 1\nmap 2 2\nmap 3 3\nmap 4 4\n");
}

#[test]
fn cycle_types() {
    let dir = files();
    let o = run(&["cycletype", "perm.m", "--prefix", "10"], dir.path());
    assert_eq!(stdout(&o), "cycles 1:4 2:1 3:1 open 1\n");
    let o = run(&["cycletype", "perm.m", "--prefix", "20"], dir.path());
    assert_eq!(stdout(&o), "cycles 1:13 2:2 3:1 open 0\n");
}

#[test]
fn errors_and_usage() {
    let dir = files();
    let o = run(&["rado", "witness", "1", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error OverlappingSets: "));
    let o = run(&["delta", "adj", "bad.g", "0,0", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error DuplicateEdge: line 3"));
    let o = run(&["reduce", "order", "path.g"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["rado", "adj", "2", "5", "--depth", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["delta", "adj", "path.g", "0,0,1", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("conjred conjugate <xfile> <yfile> [--iso <mapfile>]"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = files();
    let cases: &[&[&str]] = &[
        &["rado", "witness", "3,9", "4"],
        &["reduce", "graph", "path.g", "--depth", "12"],
        &["conjugate", "edge.g", "edge2.g", "--depth", "20"],
        &["orbitals", "two.o", "--depth", "30"],
        &["cycletype", "perm.m"],
    ];
    for args in cases {
        let (a, b) = (run(args, dir.path()), run(args, dir.path()));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
        assert!(!a.stdout.contains(&b'\r'));
    }
}
