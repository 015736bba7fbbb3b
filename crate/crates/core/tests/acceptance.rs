//! Acceptance criteria 1 to 10. Prints one line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::bracket::bracket;
use common::isomorphic;
use reidemeister::codec::{parse_certificate, serialize_certificate};
use reidemeister::diagram::{Port, TangleDiagram};
use reidemeister::moves::{
    basis_with, build_triangle, sole_triangle, Flag, Letter, MoveName, R2Direction,
    TriangleCode,
};
use reidemeister::search::{derive, verify_certificate, Certificate, SearchBounds};
use reidemeister::theorem::{self, ImplicationGraph};
use reidemeister::theta::{digon_signs, enumerate_theta_configs, factor_via_theta, config_for_pair, move_ends, theta_relation, ThetaConfig};

/// Bridge certificate length found by the search, frozen.
const BRIDGE_GOLDEN_LENGTH: usize = 3;

const LIMIT_1: Duration = Duration::from_secs(1);
const LIMIT_5: Duration = Duration::from_secs(10);
const LIMIT_7: Duration = Duration::from_secs(60);
const LIMIT_8: Duration = Duration::from_secs(120);

/// The encoding table: letter, ↑ arrows (top, middle, bottom).
const TABLE: [(char, &str); 8] = [
    ('a', "→↗↖"),
    ('b', "→↖↗"),
    ('c', "→↙↖"),
    ('d', "→↘↗"),
    ('A', "→↘↙"),
    ('B', "→↗↘"),
    ('C', "→↖↙"),
    ('D', "→↙↘"),
];

fn reverse_arrow(c: char) -> char {
    match c {
        '→' => '←',
        '←' => '→',
        '↗' => '↙',
        '↙' => '↗',
        '↖' => '↘',
        '↘' => '↖',
        other => other,
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_reidemeister")
}

fn criterion_1() -> Check {
    let out = Command::new(binary()).arg("triangles").output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), "triangles exited non-zero")?;
    let text = String::from_utf8_lossy(&out.stdout);
    let blocks = text.lines().filter(|l| l.starts_with("# ")).count();
    ensure(blocks == 16, format!("{blocks} blocks"))?;
    for code in TriangleCode::all() {
        let d = build_triangle(code);
        let site = sole_triangle(&d).ok_or(format!("{code}: no triangle"))?;
        ensure(site.code == code, format!("classify(build({code})) = {}", site.code))?;
        let (_, up) = TABLE.iter().find(|(l, _)| *l == code.letter.as_char()).unwrap();
        let want: String = match code.flag {
            Flag::Up => up.to_string(),
            Flag::Down => up.chars().map(reverse_arrow).collect(),
        };
        ensure(code.arrow_string().replace(' ', "") == want, format!("{code}: arrows {}", code.arrow_string()))?;
    }
    Ok("16 blocks; classify∘build = id; ↓ rows are arrow reversals".into())
}

fn criterion_2() -> Check {
    for code in TriangleCode::all() {
        let l = code.letter.as_char();
        let swapped = if l.is_ascii_lowercase() { l.to_ascii_uppercase() } else { l.to_ascii_lowercase() };
        let flag = if "bdBD".contains(l) { code.flag.flip() } else { code.flag };
        let want = TriangleCode::new(Letter::from_char(swapped).unwrap(), flag);
        let m = build_triangle(code).mirror();
        let got = sole_triangle(&m).map(|s| s.code);
        ensure(got == Some(want), format!("mirror of {code}: got {got:?}, rule says {want}"))?;
    }
    Ok("16/16 match the mirror rule".into())
}

/// Over at both transversal crossings, or under at both. The transversal
/// is the strand entering at leg 1.
fn transversal_consistent(c: &ThetaConfig) -> bool {
    let strands = c.tangle.strands().unwrap();
    let t = strands.iter().find(|s| s.from_leg == 1).unwrap();
    let levels: BTreeSet<bool> = t
        .edges
        .iter()
        .filter_map(|&e| match c.tangle.edges()[e].to {
            Port::Slot(_, s) => Some(s % 2 == 1),
            Port::Leg(_) => None,
        })
        .collect();
    let crossings = t.edges.len() - 1;
    crossings == 2 && levels.len() == 1
}

fn criterion_3() -> Check {
    let configs = enumerate_theta_configs().map_err(|e| e.to_string())?;
    ensure(configs.len() == 16, format!("{} configurations", configs.len()))?;
    for c in &configs {
        let [s, t] = digon_signs(c);
        ensure(s != t, format!("{}: digon signs equal", c.params))?;
        ensure(transversal_consistent(c), format!("{}: inconsistent transversal", c.params))?;
    }
    let good: Vec<&ThetaConfig> = configs
        .iter()
        .filter(|c| c.upper_code().flag == Flag::Up && c.lower_code().flag == Flag::Down)
        .collect();
    let opposite = configs.iter().filter(|c| c.upper_code().flag != c.lower_code().flag).count();
    ensure(
        good.len() == 16,
        format!(
            "16 consistent configurations, but upper ↑ / lower ↓ holds for {} of 16 \
             ({} have opposite flags with the upper triangle ↓; {} have equal flags)",
            good.len(),
            opposite,
            16 - opposite
        ),
    )?;
    Ok("16 consistent configurations with upper ↑, lower ↓".into())
}

fn criterion_4() -> Check {
    let configs = enumerate_theta_configs().map_err(|e| e.to_string())?;
    let r = theta_relation(&configs);
    let missing: Vec<_> = r.iter().filter(|(x, y)| !r.contains(&(*y, *x))).collect();
    ensure(missing.is_empty(), format!("asymmetric pairs {missing:?}"))?;
    Ok(format!("{} ordered pairs, symmetric", r.len()))
}

fn criterion_5(certs: &mut Vec<Certificate>) -> Check {
    let configs = enumerate_theta_configs().map_err(|e| e.to_string())?;
    let r = theta_relation(&configs);
    for &(x, y) in &r {
        let t = config_for_pair(&configs, x, y).unwrap();
        let c = factor_via_theta(t, x).map_err(|e| e.to_string())?;
        ensure(c.len() == 3, format!("({x},{y}): length {}", c.len()))?;
        let kinds = (c.steps[0].name, c.steps[1].name.r3_letter(), c.steps[2].name);
        ensure(
            matches!(kinds.0, MoveName::R2(_, R2Direction::Expand))
                && kinds.1 == Some(y)
                && matches!(kinds.2, MoveName::R2(_, R2Direction::Reduce)),
            format!("({x},{y}): step kinds {:?}", kinds),
        )?;
        ensure(c.basis == basis_with(&[y]), format!("({x},{y}): basis"))?;
        verify_certificate(&c).map_err(|e| format!("({x},{y}): {e}"))?;
        let (s, g) = move_ends(x);
        ensure(sole_triangle(&s).map(|t| t.code) == Some(TriangleCode::up(x)), "source code")?;
        ensure(sole_triangle(&g).map(|t| t.code) == Some(TriangleCode::down(x)), "target code")?;
        let found = derive(&s, &g, &basis_with(&[y]), SearchBounds::for_start(&s).with_max_crossings(5))
            .map_err(|e| format!("({x},{y}) search: {e}"))?;
        ensure(found.len() <= 3, format!("({x},{y}) search length {}", found.len()))?;
        certs.push(c);
        certs.push(found);
    }
    Ok(format!("{} pairs: length 3 certificates verified; search ≤ 3", r.len()))
}

fn criterion_6() -> Check {
    let configs = enumerate_theta_configs().map_err(|e| e.to_string())?;
    let lemmas = theorem::lemma_suite(&configs).map_err(|e| e.to_string())?;
    let classes = theorem::equivalence_classes(&theorem::lemma_edges(&lemmas));
    let lower: BTreeSet<Letter> = "abcd".chars().filter_map(Letter::from_char).collect();
    let upper: BTreeSet<Letter> = "ABCD".chars().filter_map(Letter::from_char).collect();
    ensure(classes == vec![lower, upper], format!("classes {classes:?}"))?;
    Ok("{a,b,c,d} {A,B,C,D}".into())
}

fn criterion_7(certs: &mut Vec<Certificate>) -> Check {
    let (s, g) = move_ends(Letter::c);
    let a_to_c = derive(&s, &g, &basis_with(&[Letter::A]), SearchBounds::for_start(&s).with_max_crossings(7))
        .map_err(|e| e.to_string())?;
    verify_certificate(&a_to_c).map_err(|e| format!("A ⇒ c: {e}"))?;
    let m = a_to_c.mirrored();
    ensure(m.basis == basis_with(&[Letter::a]), "mirrored basis is not {R2, a}")?;
    verify_certificate(&m).map_err(|e| format!("a ⇒ C: {e}"))?;
    ensure(
        sole_triangle(&m.start).map(|t| t.code) == Some(TriangleCode::up(Letter::C))
            && sole_triangle(m.end()).map(|t| t.code) == Some(TriangleCode::down(Letter::C)),
        "mirrored certificate does not run C↑ → C↓",
    )?;
    ensure(a_to_c.len() == m.len(), "lengths differ")?;
    ensure(
        a_to_c.len() == BRIDGE_GOLDEN_LENGTH,
        format!("length {} differs from golden {BRIDGE_GOLDEN_LENGTH}", a_to_c.len()),
    )?;
    let len = a_to_c.len();
    certs.push(a_to_c);
    certs.push(m);
    Ok(format!("A ⇒ c and a ⇒ C, length {len} each"))
}

fn criterion_8(certs: &mut Vec<Certificate>) -> Check {
    let o = theorem::run(&Letter::ALL).map_err(|e| e.to_string())?;
    let graph: &ImplicationGraph = &o.graph;
    ensure(graph.is_strongly_connected(), "implication graph not strongly connected")?;
    ensure(o.derivations.len() == 56, format!("{} derivations", o.derivations.len()))?;
    for d in &o.derivations {
        let c = &d.certificate;
        ensure(c.basis == basis_with(&[d.basis]), format!("{} ⇒ {}: basis", d.basis, d.target))?;
        verify_certificate(c).map_err(|e| format!("{} ⇒ {}: {e}", d.basis, d.target))?;
        let start = sole_triangle(&c.start).map(|t| t.code);
        let end = sole_triangle(c.end()).map(|t| t.code);
        ensure(
            start == Some(TriangleCode::up(d.target)) && end == Some(TriangleCode::down(d.target)),
            format!("{} ⇒ {}: runs {start:?} → {end:?}", d.basis, d.target),
        )?;
        ensure(c.steps.iter().all(|s| s.name.r3_letter().is_none_or(|l| l == d.basis)), "foreign R3 move")?;
    }
    let per_basis: BTreeMap<Letter, usize> = o.derivations.iter().fold(BTreeMap::new(), |mut m, d| {
        *m.entry(d.basis).or_default() += 1;
        m
    });
    ensure(per_basis.values().all(|&n| n == 7) && per_basis.len() == 8, "not 7 per basis")?;
    let longest = o.derivations.iter().map(|d| d.certificate.len()).max().unwrap_or(0);
    certs.extend(o.derivations.into_iter().map(|d| d.certificate));
    Ok(format!("56 certificates verified (longest {longest} steps); graph strongly connected"))
}

fn criterion_9(certs: &[Certificate], artifacts: &Path) -> Check {
    let mut small: Vec<TangleDiagram> = Vec::new();
    let mut steps = 0;
    for c in certs {
        let first = &c.start;
        let b0 = bracket(first);
        for d in c.diagrams() {
            ensure(d.is_valid(), "invalid diagram in a certificate")?;
            ensure(d.writhe() == first.writhe(), "writhe changed")?;
            ensure(d.strand_pairing() == first.strand_pairing(), "strand pairing changed")?;
            ensure(d.leg_signature() == first.leg_signature(), "leg signature changed")?;
            ensure(bracket(d) == b0, "bracket changed")?;
            if d.crossing_count() <= 4 {
                small.push(d.clone());
            }
        }
        steps += c.len();
    }
    small.sort();
    small.dedup();
    let renamed: Vec<TangleDiagram> = small
        .iter()
        .map(|d| common::relabel(d, &d.crossings().iter().rev().map(|c| c + 100).collect::<Vec<_>>()))
        .collect();
    small.extend(renamed);
    for (i, x) in small.iter().enumerate() {
        for y in &small[i + 1..] {
            let same = x.canonical_code().unwrap() == y.canonical_code().unwrap();
            ensure(same == isomorphic(x, y), "canonical code disagrees with isomorphism oracle")?;
        }
    }
    let mut files = 0;
    for path in cert_files(artifacts) {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let c = parse_certificate(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(serialize_certificate(&c) == text, format!("{} does not round-trip", path.display()))?;
        files += 1;
    }
    ensure(files > 0, "no artifacts")?;
    Ok(format!(
        "{steps} move applications preserve invariants; {} small diagrams match oracle; {files} artifacts round-trip",
        small.len()
    ))
}

fn cert_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = std::fs::read_dir(&dir) else { continue };
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "cert") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn run_report(dir: &Path) -> Result<(), String> {
    let status = Command::new(binary())
        .args(["report", "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), format!("report exited {:?}", status.status.code()))
}

fn criterion_10(first: &Path) -> Check {
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_report(second.path())?;
    let (a, b) = (tree(first), tree(second.path()));
    ensure(!a.is_empty(), "empty output tree")?;
    let differing: Vec<_> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    ensure(a.len() == b.len() && differing.is_empty(), format!("trees differ: {differing:?}"))?;
    Ok(format!("{} files byte-identical across two runs", a.len()))
}

fn main() {
    let out = tempfile::tempdir().expect("temp dir");
    let mut certs = Vec::new();
    let mut results: Vec<(usize, &str, Check, Duration, Option<Duration>)> = Vec::new();
    let mut run = |n: usize, name: &'static str, limit: Option<Duration>, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let r = f();
        results.push((n, name, r, t.elapsed(), limit));
    };
    run(1, "encoding table", Some(LIMIT_1), &mut criterion_1);
    run(2, "mirror rule", Some(LIMIT_1), &mut criterion_2);
    run(3, "sixteen Θ-configurations", Some(LIMIT_1), &mut criterion_3);
    run(4, "Θ-relation symmetry", Some(LIMIT_1), &mut criterion_4);
    run(5, "lemma certificates", Some(LIMIT_5), &mut || criterion_5(&mut certs));
    run(6, "equivalence classes", Some(LIMIT_1), &mut criterion_6);
    run(7, "bridge A ⇒ c, a ⇒ C", Some(LIMIT_7), &mut || criterion_7(&mut certs));
    run(8, "main theorem, 8 bases", Some(LIMIT_8), &mut || criterion_8(&mut certs));
    let report_ok = run_report(out.path());
    run(9, "property suites", None, &mut || {
        report_ok.clone()?;
        criterion_9(&certs, out.path())
    });
    run(10, "determinism", None, &mut || {
        report_ok.clone()?;
        criterion_10(out.path())
    });

    let mut failed = 0;
    for (n, name, r, took, limit) in &results {
        let slow = limit.is_some_and(|l| *took > l);
        let ms = took.as_millis();
        let (verdict, detail) = match r {
            Ok(d) if !slow => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; took {ms} ms, limit {} ms", limit.unwrap().as_millis())),
            Err(e) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {n:>2} [PRIMARY] {name:<26} {verdict} ({ms} ms) {detail}");
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
