//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::cell::Cell;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use copl_core::refops::{self, RefOpError, RefView};
use copl_core::runtime::{ComplexReference, ReferenceSegment, Value};
use copl_core::{compile, run_source, Analyzed, Config, ConceptId, ConceptTable, Interpreter, RuntimeErrorKind};
use indexmap::IndexMap;
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<(), String>;

fn main() -> ExitCode {
    let ordering = OrderingLog::default();
    let results = [
        ("AC1 golden output for the reference programs", ac1_golden()),
        ("AC2 reference-algebra laws on random hierarchies", ac2_algebra(&ordering)),
        ("AC3 super accesses reuse the context stack", ac3_context_stack()),
        ("AC4 empty reference classes behave like classes", ac4_oop()),
        ("AC5 stale references fail after delete", ac5_lifecycle()),
        ("AC6 context > declared >= actual ordering", ac6_ordering(&ordering)),
    ];
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn corpus(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(format!("{name}.cop"));
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn lines(s: &[&str]) -> String {
    s.iter().map(|l| format!("{l}\n")).collect()
}

// ---- AC1 -------------------------------------------------------------------

fn ac1_golden() -> Check {
    let expected: [(&str, String); 8] = [
        ("reference_method", lines(&["=== Account::getBalance reference method"])),
        (
            "dual_methods",
            lines(&[
                "=> Account::getBalance reference method",
                "-> Account::getBalance object method",
                "<- Account::getBalance object method",
                "<= Account::getBalance reference method",
            ]),
        ),
        (
            "nested_spaces",
            lines(&[
                "=> A: enter space",
                "  => B: enter space",
                "    => C: enter space",
                "    <= C: exit space",
                "  <= B: exit space",
                "<= A: exit space",
            ]),
        ),
        (
            "nested_services",
            lines(&[
                "   -> C: enter service",
                "   -> B: enter service",
                "-> A: enter service",
                "<- A: exit service",
                "  <- B: exit service",
                "   <- C: exit service",
            ]),
        ),
        (
            "spaces_and_services",
            lines(&[
                "=> A: enter space",
                " => B: enter space",
                "  => C: enter space",
                "   -> C: enter service",
                "    -> B: enter service",
                "     -> A: enter service",
                "      <- A: exit service",
                "       <- B: exit service",
                "        <- C: exit service",
                "         <= C: exit space",
                "          <= B: exit space",
                "           <= A: exit space",
            ]),
        ),
        (
            "lifecycle_messages",
            lines(&[
                "=> Account: Create reference",
                "-> Account: Create object",
                "<- Account: Create object",
                "<= Account: Create reference",
                "=> Account: Delete reference",
                "-> Account: Delete object",
                "<- Account: Delete object",
                "<= Account: Delete reference",
            ]),
        ),
        ("savings_balance", lines(&["10.0", "20.0"])),
        ("resolution_nesting", String::new()),
    ];
    for (name, want) in &expected {
        let start = Instant::now();
        let out = run_source(&corpus(name), Config::default()).map_err(|d| format!("{name}: {d}"))?;
        if start.elapsed() >= Duration::from_secs(1) {
            return Err(format!("{name} took {:?}", start.elapsed()));
        }
        if let Some(e) = out.error {
            return Err(format!("{name}: {e}"));
        }
        if *name == "resolution_nesting" {
            check_resolution_nesting(&out.stdout, &out.trace)?;
        } else if out.stdout != *want {
            return Err(format!("{name}: expected {want:?}, got {:?}", out.stdout));
        }
    }
    Ok(())
}

/// Each access prints the Account resolution around the SavingsAccount one,
/// and the trace nests the two continuations the same way.
fn check_resolution_nesting(stdout: &str, trace: &str) -> Check {
    let resolve: Vec<&str> = stdout.lines().filter(|l| l.contains("Resolve")).collect();
    let one = ["=> Account: Resolve", "=> SavingsAccount: Resolve", "<=SavingsAccount: Resolve", "<= Account: Resolve"];
    if resolve.is_empty() || resolve.chunks(4).any(|c| c != one) {
        return Err(format!("resolution_nesting resolve order: {resolve:?}"));
    }
    let mut depth: Vec<&str> = vec![];
    let mut nested = false;
    for l in trace.lines() {
        if let Some(m) = l.strip_prefix("REF-ENTER ").filter(|m| m.ends_with(".continue")) {
            if m == "SavingsAccount.continue" && depth.last() == Some(&"Account.continue") {
                nested = true;
            }
            depth.push(m);
        } else if let Some(m) = l.strip_prefix("REF-EXIT ").filter(|m| m.ends_with(".continue")) {
            if depth.pop() != Some(m) {
                return Err("resolution_nesting trace: unbalanced continuations".into());
            }
        }
    }
    if nested && depth.is_empty() {
        Ok(())
    } else {
        Err("resolution_nesting trace: SavingsAccount continuation not nested in Account".into())
    }
}

// ---- AC2 / AC6 ---------------------------------------------------------------

/// References seen by the property suite, for the ordering criterion.
#[derive(Default)]
struct OrderingLog {
    observed: Cell<u64>,
    violations: Cell<u64>,
}

impl OrderingLog {
    /// `declared` is the concept a slot for `r` would be typed with.
    fn observe(&self, table: &ConceptTable, declared: ConceptId, r: &ComplexReference) {
        if r.is_empty() {
            return;
        }
        self.observed.set(self.observed.get() + 1);
        if !RefView::of(declared, r).ordering_holds(table, true) {
            self.violations.set(self.violations.get() + 1);
        }
    }
}

/// A linear hierarchy K1 > K2 > ... > Kd under Root; each concept has one
/// reference field. `ids[0]` is Root.
fn chain_table(depth: usize) -> (ConceptTable, Vec<ConceptId>) {
    let mut src = String::new();
    for i in 1..=depth {
        let parent = if i == 1 { String::new() } else { format!(" in K{}", i - 1) };
        src.push_str(&format!("concept K{i}{parent} reference {{ double v; }}\n"));
    }
    let table = compile(&src).expect("generated hierarchy").table;
    let mut ids = vec![ConceptId::ROOT];
    ids.extend((1..=depth).map(|i| table.id(&format!("K{i}")).unwrap()));
    (table, ids)
}

fn segment(c: ConceptId, v: u8) -> ReferenceSegment {
    let mut fields = IndexMap::new();
    fields.insert("v".to_string(), Some(Value::Double(f64::from(v))));
    ReferenceSegment { concept: c, fields }
}

/// Reference over concepts `ids[from+1..=to]` with the given field values.
fn reference(ids: &[ConceptId], from: usize, to: usize, values: &[u8]) -> ComplexReference {
    let segments = (from + 1..=to).map(|i| segment(ids[i], values[i])).collect();
    ComplexReference { context: ids[from], primitive: None, segments }
}

/// Depth index of every segment, independent of the table.
fn indices(ids: &[ConceptId], r: &ComplexReference) -> Vec<usize> {
    r.segments.iter().map(|s| ids.iter().position(|c| *c == s.concept).unwrap()).collect()
}

#[derive(Debug, Clone)]
struct Case {
    depth: usize,
    a: (usize, usize),
    b: (usize, usize),
    a_values: Vec<u8>,
    b_values: Vec<u8>,
    implicit_values: Vec<u8>,
    l: usize,
    r: usize,
    declared: usize,
}

fn span(depth: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..depth).prop_flat_map(move |from| (Just(from), from + 1..=depth))
}

fn case() -> impl Strategy<Value = Case> {
    (1usize..=6).prop_flat_map(|depth| {
        let values = || proptest::collection::vec(0u8..4, depth + 1);
        (span(depth), span(depth), values(), values(), values(), 0..=depth, 0..=depth, 0..=depth).prop_map(
            move |(a, b, a_values, b_values, implicit_values, l, r, declared)| Case {
                depth,
                a,
                b,
                a_values,
                b_values,
                implicit_values,
                l,
                r,
                declared,
            },
        )
    })
}

fn law(ok: bool, what: &str, case: &Case) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what} failed for {case:?}")))
    }
}

fn check_laws(case: &Case, log: &OrderingLog) -> Result<(), TestCaseError> {
    let (table, ids) = chain_table(case.depth);
    let a = reference(&ids, case.a.0, case.a.1, &case.a_values);
    let b = reference(&ids, case.b.0, case.b.1, &case.b_values);
    let implicit = reference(&ids, 0, case.depth, &case.implicit_values);
    let (ac, ai) = case.a;
    let declared = case.declared.clamp(ac + 1, ai);
    log.observe(&table, ids[declared], &a);
    log.observe(&table, ids[case.b.1], &b);

    // Identity casts.
    law(refops::left_cast(&table, a.context, &a, None).ok() == Some(a.clone()), "identity left cast", case)?;
    law(refops::right_cast(&table, &a, a.instance_of()).ok() == Some(a.clone()), "identity right cast", case)?;

    // Left cast to any ancestor of instanceof(a).
    let l = case.l.min(ai);
    let cast = refops::left_cast(&table, ids[l], &a, Some(&implicit)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    law(refops::contextof(&cast) == ids[l], "contextof(L:a) = L", case)?;
    law(refops::length(&cast) == table.depth(ids[ai]) - table.depth(ids[l]), "length(L:a) = length(L, instanceof(a))", case)?;
    let mut expected: Vec<ReferenceSegment> = vec![];
    for i in l + 1..=ai {
        let values = if i <= ac { &case.implicit_values } else { &case.a_values };
        expected.push(segment(ids[i], values[i]));
    }
    law(cast.segments == expected, "left cast segment values", case)?;
    if l < ai {
        law(refops::instanceof(&cast) == ids[ai], "instanceof preserved by left cast", case)?;
    }
    log.observe(&table, ids[ai], &cast);

    // Right cast to any concept at or below contextof(a).
    let r = case.r.max(ac);
    let cast = refops::right_cast(&table, &a, ids[r]).map_err(|e| TestCaseError::fail(e.to_string()))?;
    law(refops::instanceof(&cast) == ids[r], "instanceof(a:R) = R", case)?;
    law(refops::contextof(&cast) == ids[ac], "contextof preserved by right cast", case)?;
    law(indices(&ids, &cast) == (ac + 1..=r).collect::<Vec<_>>(), "right cast segments", case)?;
    for (k, s) in cast.segments.iter().enumerate() {
        let i = ac + 1 + k;
        let want = if i <= ai { segment(ids[i], case.a_values[i]) } else { ReferenceSegment::unset(&table, ids[i]) };
        law(*s == want, "right cast keeps values and adds unset segments", case)?;
    }
    log.observe(&table, ids[r], &cast);

    // Idempotence.
    law(refops::intersect(&table, &a, &a).ok() == Some(a.clone()), "intersect(a, a) = a", case)?;
    law(refops::union(&table, &a, &a).ok() == Some(a.clone()), "union(a, a) = a", case)?;

    // Set oracle over concept depths.
    let sa: Vec<usize> = (ac + 1..=ai).collect();
    let sb: Vec<usize> = (case.b.0 + 1..=case.b.1).collect();
    let common: Vec<usize> = sa.iter().copied().filter(|i| sb.contains(i)).collect();
    let got = refops::intersect(&table, &a, &b).map_err(|e| TestCaseError::fail(e.to_string()))?;
    law(indices(&ids, &got) == common, "intersect matches set oracle", case)?;
    law(got.segments.iter().all(|s| a.segments.contains(s)), "intersect takes values from a", case)?;
    log.observe(&table, got.instance_of(), &got);

    let mut all: Vec<usize> = sa.iter().chain(&sb).copied().collect();
    all.sort_unstable();
    all.dedup();
    let contiguous = all.windows(2).all(|w| w[1] == w[0] + 1);
    match refops::union(&table, &a, &b) {
        Ok(u) => {
            law(contiguous, "union accepted a gapped result", case)?;
            law(indices(&ids, &u) == all, "union matches set oracle", case)?;
            for s in &u.segments {
                let i = indices(&ids, &ComplexReference { context: ids[0], primitive: None, segments: vec![s.clone()] })[0];
                let want = if sb.contains(&i) { case.b_values[i] } else { case.a_values[i] };
                law(*s == segment(ids[i], want), "union values from b on overlap", case)?;
            }
            log.observe(&table, u.instance_of(), &u);
        }
        Err(RefOpError::IllFormedResult(_)) => law(!contiguous, "union rejected a contiguous result", case)?,
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }

    // Assignment.
    let assigned = refops::assign(&a, &b);
    if common.is_empty() {
        law(assigned == a, "assign with empty intersection is identity", case)?;
    }
    for (k, s) in assigned.segments.iter().enumerate() {
        let i = ac + 1 + k;
        let want = if sb.contains(&i) { case.b_values[i] } else { case.a_values[i] };
        law(*s == segment(ids[i], want), "assign copies exactly the common segments", case)?;
    }

    // Concatenation where instanceof(a) and contextof(b) are related.
    if table.related(a.instance_of(), b.context) && table.is_ancestor_or_self(a.context, b.instance_of()) {
        let c = refops::concat(&table, &a, &b).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let composed = refops::assign(&refops::right_cast(&table, &a, b.instance_of()).unwrap(), &b);
        law(c == composed, "concat = right cast then assign", case)?;
        law(c.context == a.context && c.instance_of() == b.instance_of(), "concat endpoints", case)?;
        log.observe(&table, c.instance_of(), &c);
    }
    Ok(())
}

fn ac2_algebra(log: &OrderingLog) -> Check {
    let mut runner = TestRunner::new(PtConfig { cases: 1000, failure_persistence: None, ..PtConfig::default() });
    runner.run(&case(), |c| check_laws(&c, log)).map_err(|e| e.to_string())
}

fn ac6_ordering(log: &OrderingLog) -> Check {
    if log.observed.get() < 1000 {
        return Err(format!("only {} references observed", log.observed.get()));
    }
    if log.violations.get() > 0 {
        return Err(format!("{} of {} property-suite references violate the ordering", log.violations.get(), log.observed.get()));
    }
    // References stored into typed slots by the interpreter.
    let mut checked = 0;
    for name in ["resolution_nesting", "main_account_reuse", "savings_balance", "context_blocks", "oop_shapes"] {
        let out = run_source(&corpus(name), Config::default()).map_err(|d| d.to_string())?;
        if out.stats.ordering_violations > 0 {
            return Err(format!("{name}: {} ordering violations", out.stats.ordering_violations));
        }
        checked += out.stats.references_checked;
    }
    if checked == 0 {
        return Err("interpreter checked no references".into());
    }
    Ok(())
}

// ---- AC3 -------------------------------------------------------------------

/// Three segments: A and C have custom identity, B inherits A's. C's object
/// method reads and calls into its parents `k` times.
fn super_program(k: usize) -> String {
    let mut body = String::new();
    for i in 0..k {
        if i % 2 == 0 {
            body.push_str("      total = total + super.limit;\n");
        } else {
            body.push_str("      total = total + super.bonus();\n");
        }
    }
    format!(
        r#"static Map map = new Map();
static double counter = 0;
String next() {{ counter = counter + 1; return "N" + counter; }}

concept A
  reference {{
    String no;
    void create() {{ this.no = next(); Root o.create(); map.add(no, o); }}
    void continue() {{ Root o = map.get(this.no); o.continue(); }}
  }}
  object {{ double limit = 2; Map kids = new Map(); }}

concept B in A
  object {{ double bonus() {{ return 1; }} }}

concept C in B
  reference {{
    String no;
    void create() {{ this.no = next(); Root o.create(); super.kids.add(no, o); }}
    void continue() {{ Root o = super.kids.get(this.no); o.continue(); }}
  }}
  object {{
    double work() {{
      double total = 0;
{body}      return total;
    }}
  }}

C c.create();
"#
    )
}

fn ac3_context_stack() -> Check {
    for k in [1usize, 10, 100] {
        let analyzed = compile(&super_program(k)).map_err(|d| d.to_string())?;
        let mut out = Vec::new();
        let mut interp = Interpreter::new(&analyzed, &mut out, None, Config::default());
        interp.run().map_err(|e| e.to_string())?;
        let Some(Value::Ref(c)) = interp.variable("c").cloned() else {
            return Err("c is not a reference".into());
        };
        interp.reset_stats();
        let total = interp.invoke(&c, "work", vec![]).map_err(|e| e.to_string())?;
        let expected_total = (k.div_ceil(2) * 2 + k / 2) as f64;
        if total != Value::Double(expected_total) {
            return Err(format!("k={k}: work returned {total:?}"));
        }
        let stats = interp.stats();
        if stats.continuations != refops::length(&c) as u64 {
            return Err(format!("k={k}: {} continuations for a reference of length {}", stats.continuations, c.len()));
        }
        if stats.continuations_by_concept.values().any(|&n| n != 1) {
            return Err(format!("k={k}: {:?}", stats.continuations_by_concept));
        }
    }
    Ok(())
}

// ---- AC4 -------------------------------------------------------------------

const OOP: &str = r#"
concept Shape
  object {
    double sides;
    void create() { print("create Shape"); }
    void delete() { print("delete Shape"); }
    String describe() { return "shape"; }
    String kind() { return "generic " + describe(); }
  }
concept Polygon in Shape
  object {
    void create() { print("create Polygon"); sides = 3; }
    void delete() { print("delete Polygon"); }
    String describe() { return "polygon/" + sides; }
  }
concept Square in Polygon
  object {
    void create() { print("create Square"); sides = 4; }
    void delete() { print("delete Square"); }
    String describe() { return "square/" + super.describe(); }
  }

Shape s = new Square();
print(s.kind());
s.delete();
"#;

fn ac4_oop() -> Check {
    let out = run_source(OOP, Config::default()).map_err(|d| d.to_string())?;
    if let Some(e) = out.error {
        return Err(e.to_string());
    }
    let stdout = lines(&[
        "create Shape",
        "create Polygon",
        "create Square",
        "generic square/polygon/4.0",
        "delete Square",
        "delete Polygon",
        "delete Shape",
    ]);
    let trace = lines(&[
        "META Shape",
        "OBJ-ENTER Shape.create",
        "OBJ-EXIT Shape.create",
        "META Polygon",
        "OBJ-ENTER Polygon.create",
        "OBJ-EXIT Polygon.create",
        "META Square",
        "OBJ-ENTER Square.create",
        "OBJ-EXIT Square.create",
        "META Shape",
        "META Polygon",
        "META Square",
        "OBJ-ENTER Shape.kind",
        "OBJ-ENTER Square.describe",
        "OBJ-ENTER Polygon.describe",
        "OBJ-EXIT Polygon.describe",
        "OBJ-EXIT Square.describe",
        "OBJ-EXIT Shape.kind",
        "META Shape",
        "META Polygon",
        "META Square",
        "OBJ-ENTER Square.delete",
        "OBJ-EXIT Square.delete",
        "OBJ-ENTER Polygon.delete",
        "OBJ-EXIT Polygon.delete",
        "OBJ-ENTER Shape.delete",
        "OBJ-EXIT Shape.delete",
    ]);
    if out.stdout != stdout {
        return Err(format!("stdout {:?}", out.stdout));
    }
    if out.trace != trace {
        return Err(format!("trace {:?}", out.trace));
    }
    if out.allocations != 1 {
        return Err(format!("{} handles allocated for one object", out.allocations));
    }
    Ok(())
}

// ---- AC5 -------------------------------------------------------------------

const LIFECYCLE: &str = r#"
static Map map = new Map();
static double counter = 0;
String next() { counter = counter + 1; return "N" + counter; }

concept Account
  reference {
    String no;
    void create() { this.no = next(); Root o.create(); map.add(no, o); }
    void continue() { Root o = map.get(this.no); o.continue(); }
    void delete() { Root o = map.get(this.no); o.delete(); map.remove(no); }
  }
  object {
    double balance;
    Map subs = new Map();
    double touch() { balance = balance + 1; return balance; }
  }

concept Savings in Account
  reference {
    String part;
    void create() { this.part = next(); Root o.create(); super.subs.add(part, o); }
    void continue() { Root o = super.subs.get(this.part); o.continue(); }
  }
  object { double touch() { return super.touch() + 100; } }

concept Plain
  object { double n; double touch() { n = n + 1; return n; } }

concept Part in Plain
  object { double touch() { return super.touch() + 10; } }
"#;

fn ac5_lifecycle() -> Check {
    let analyzed: Analyzed = compile(LIFECYCLE).map_err(|d| d.to_string())?;
    let kinds = ["Account", "Savings", "Plain", "Part"];
    let mut stale_uses = 0;
    for seed in 0..100u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut interp = Interpreter::new(&analyzed, &mut out, None, Config::default());
        interp.run().map_err(|e| e.to_string())?;
        let mut refs: Vec<(ComplexReference, bool)> = vec![];
        for _ in 0..30 {
            match rng.gen_range(0..4) {
                0 => {
                    let kind = kinds[rng.gen_range(0..kinds.len())];
                    let r = interp.create(kind, vec![]).map_err(|e| format!("seed {seed}: create {kind}: {e}"))?;
                    refs.push((r, true));
                }
                _ if refs.is_empty() => {}
                1 => {
                    let i = rng.gen_range(0..refs.len());
                    let (r, live) = refs[i].clone();
                    let result = interp.delete(&r);
                    match (live, result) {
                        (true, Ok(())) => refs[i].1 = false,
                        (true, Err(e)) => return Err(format!("seed {seed}: delete of a live reference: {e}")),
                        (false, Ok(())) => return Err(format!("seed {seed}: second delete succeeded")),
                        (false, Err(e)) => {
                            stale_uses += 1;
                            expect_stale(seed, &e.kind)?;
                        }
                    }
                }
                _ => {
                    let i = rng.gen_range(0..refs.len());
                    let (r, live) = refs[i].clone();
                    match (live, interp.invoke(&r, "touch", vec![])) {
                        (true, Ok(Value::Double(_))) => {}
                        (true, other) => return Err(format!("seed {seed}: live use gave {other:?}")),
                        (false, Ok(v)) => return Err(format!("seed {seed}: stale use returned {v:?}")),
                        (false, Err(e)) => {
                            stale_uses += 1;
                            expect_stale(seed, &e.kind)?;
                        }
                    }
                }
            }
        }
        // Every deleted reference must still be unusable at the end.
        for (r, live) in &refs {
            if !live {
                stale_uses += 1;
                let e = interp.invoke(r, "touch", vec![]).err().ok_or(format!("seed {seed}: stale use succeeded"))?;
                expect_stale(seed, &e.kind)?;
            }
        }
    }
    if stale_uses == 0 {
        return Err("no stale use was exercised".into());
    }
    Ok(())
}

fn expect_stale(seed: u64, kind: &RuntimeErrorKind) -> Check {
    match kind {
        RuntimeErrorKind::DanglingHandle(_) | RuntimeErrorKind::ResolutionFailed { .. } => Ok(()),
        other => Err(format!("seed {seed}: stale access failed with {} instead", other.code())),
    }
}
