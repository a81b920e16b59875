use std::path::PathBuf;
use std::process::{Command, Output};

fn copl(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_copl"));
    cmd.args(args).env_remove("COPL_TRACE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn copl")
}

/// Writes `source` to a fresh file under the target temp dir.
fn program(name: &str, source: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.cop"));
    std::fs::write(&path, source).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const OBJECTS: &str = r#"
concept Counter
  object {
    double n;
    double bump() { n = n + 1; return n; }
  }
Counter c = new Counter();
c.bump();
print("n=" + c.bump());
"#;

#[test]
fn run_prints_program_output_only() {
    let file = program("objects", OBJECTS);
    let o = copl(&["run", &file], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "n=2.0\n");
    assert_eq!(stderr(&o), "");
}

#[test]
fn trace_goes_to_stderr() {
    let file = program("traced", OBJECTS);
    let o = copl(&["run", "--trace", &file], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n=2.0\n");
    let err = stderr(&o);
    assert!(err.lines().any(|l| l == "OBJ-ENTER Counter.bump"), "{err}");
    assert!(err.lines().all(|l| !l.starts_with("n=")));
}

#[test]
fn trace_from_environment() {
    let file = program("env_traced", OBJECTS);
    let o = copl(&["run", &file], &[("COPL_TRACE", "1")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("META Counter"));
    let o = copl(&["run", &file], &[("COPL_TRACE", "0")]);
    assert_eq!(stderr(&o), "");
}

#[test]
fn trace_dump_prints_trace_to_stdout() {
    let file = program("dump", OBJECTS);
    let o = copl(&["trace-dump", &file], &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("META Counter\n"), "{out}");
    assert!(!out.contains("n="));
}

#[test]
fn runtime_error_exits_1() {
    let file = program("runtime", "concept A object { double x; }\nA a;\nprint(\"before\");\nprint(a.x);\n");
    let o = copl(&["run", &file], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "before\n");
    let err = stderr(&o);
    assert!(err.starts_with("error[NullReference]: "), "{err}");
    assert!(err.contains(&format!(" at {file}:4:")), "{err}");
}

#[test]
fn parse_error_exits_2() {
    let file = program("broken", "concept A object { double x }\n");
    let o = copl(&["run", &file], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "");
    assert!(stderr(&o).starts_with("error[ParseError]: "), "{}", stderr(&o));
}

#[test]
fn check_reports_cycles() {
    let file = program("cycle", "concept X in Y\nconcept Y in X\n");
    let o = copl(&["check", &file], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[CycleDetected]: "), "{}", stderr(&o));

    let file = program("fine", OBJECTS);
    let o = copl(&["check", &file], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "", "check must not run the program");
}

#[test]
fn max_steps_exhausts_fuel() {
    let file = program(
        "explode",
        "double f(double n) { if (n == 0) return 1; return f(n - 1) + f(n - 1); }\nprint(f(40));\n",
    );
    let o = copl(&["run", "--max-steps", "1000", &file], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[FuelExhausted]: "), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(copl(&[], &[]).status.code(), Some(64));
    assert_eq!(copl(&["frobnicate"], &[]).status.code(), Some(64));
    assert_eq!(copl(&["run", "--max-steps", "0", "x.cop"], &[]).status.code(), Some(64));
    let o = copl(&["run", "/nonexistent/missing.cop"], &[]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).starts_with("error[Usage]: "));
}

#[test]
fn help_exits_0() {
    let o = copl(&["--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trace-dump"));
}
