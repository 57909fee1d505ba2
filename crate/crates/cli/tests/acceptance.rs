//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use amalgam_cli::{load_path, run, Command, LoadedSpec, Options};
use amalgam_core::ktheory::{divisibility_chain, is_unimodular};
use amalgam_core::snf::{matmul, transpose, IntMatrix};
use amalgam_core::{
    build_a_gamma, character_table, f2_example, factor_type, irreducible, kms, perron_check, random_walk,
    smith_normal_form, solve, verify_relations, verify_stationarity, CyclotomicNumber, FiniteGroup,
    GaugeWeights, DEFAULT_BALL_BUDGET, DEFAULT_MAX_ORDER,
};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = Result<String, String>;

fn spec(name: &str) -> LoadedSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name);
    load_path(&path, DEFAULT_MAX_ORDER).expect("bundled spec loads")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Outcome {
    let sl2z = json!([[0, 0, 1, 0], [0, 0, 0, 1], [2, 0, 0, 0], [0, 2, 0, 0]]);
    let s4 = json!([
        [0, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 2],
        [1, 0, 1, 0, 0, 0],
        [0, 1, 1, 0, 0, 0],
        [1, 1, 2, 0, 0, 0]
    ]);
    let mut times = Vec::new();
    for (file, golden) in [("sl2z.spec", sl2z), ("s4s4.spec", s4)] {
        let doc = spec(file);
        let start = Instant::now();
        let out = run(Command::Invariants, &doc, &Options::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(out.report.data["a_gamma"]["entries"] == golden, format!("{file}: A_Γ differs"))?;
        ensure(elapsed < Duration::from_secs(2), format!("{file}: {elapsed:?}"))?;
        times.push(format!("{elapsed:.2?}"));
    }
    Ok(format!("both matrices exact, runtimes {}", times.join(" / ")))
}

fn c2() -> Outcome {
    let expect = [("sl2z.spec", "0", "0"), ("s4s4.spec", "Z ⊕ Z/4", "Z")];
    for (file, k0, k1) in expect {
        let out = run(Command::Invariants, &spec(file), &Options::default()).map_err(|e| e.to_string())?;
        ensure(out.report.data["k0"] == k0 && out.report.data["k1"] == k1, format!("{file}: {} / {}", out.report.data["k0"], out.report.data["k1"]))?;
    }
    Ok("SL(2,Z): K0 = 0, K1 = 0; S4*S4: K0 = Z ⊕ Z/4, K1 = Z".into())
}

fn c3() -> Outcome {
    let mut groups: Vec<(String, FiniteGroup)> =
        (1..=12).map(|n| (format!("Z{n}"), FiniteGroup::cyclic(n).unwrap())).collect();
    groups.push(("S3".into(), FiniteGroup::symmetric(3).unwrap()));
    groups.push(("S4".into(), FiniteGroup::symmetric(4).unwrap()));
    groups.push(("D4".into(), FiniteGroup::dihedral(4).unwrap()));
    groups.push(("Q8".into(), FiniteGroup::quaternion8()));
    for (name, g) in &groups {
        let t = character_table(g).map_err(|e| format!("{name}: {e}"))?;
        t.verify().map_err(|e| format!("{name}: {e}"))?;
    }
    // columns 1, τ, σ
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let t = character_table(&s3).unwrap();
    let cols = ["()", "(1 2)", "(1 2 3)"].map(|l| s3.find(l).unwrap());
    let mut rows: Vec<Vec<CyclotomicNumber>> =
        (0..t.len()).map(|k| cols.iter().map(|&x| t.value(k, x).clone()).collect()).collect();
    let mut printed: Vec<Vec<CyclotomicNumber>> = [[1, 1, 1], [1, -1, 1], [2, 0, -1]]
        .iter()
        .map(|r| r.iter().map(|&v| CyclotomicNumber::from_integer(v, 1)).collect())
        .collect();
    rows.sort();
    printed.sort();
    ensure(rows == printed, "S3 table differs from the printed one")?;
    Ok(format!("{} tables orthogonal; S3 matches", groups.len()))
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..500 {
        let (r, c) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let m: IntMatrix = (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.random_range(-5..=5))).collect()).collect();
        let s = smith_normal_form(&m);
        ensure(matmul(&matmul(&s.u, &m), &s.v) == s.d_matrix(), format!("trial {trial}: UMV ≠ D"))?;
        ensure(is_unimodular(&s.u) && is_unimodular(&s.v), format!("trial {trial}: not unimodular"))?;
        ensure(divisibility_chain(&s.diagonal), format!("trial {trial}: chain broken"))?;
        let t = smith_normal_form(&transpose(&m));
        ensure(t.invariant_factors() == s.invariant_factors(), format!("trial {trial}: transpose disagrees"))?;
    }
    Ok("500 random matrices".into())
}

fn c5() -> Outcome {
    let s4 = run(Command::Invariants, &spec("s4s4.spec"), &Options::default()).map_err(|e| e.to_string())?;
    ensure(s4.report.data["simple"] == true && s4.report.data["irreducible"] == true, "S4*S4 not simple/irreducible")?;
    let sl = run(Command::Invariants, &spec("sl2z.spec"), &Options::default()).map_err(|e| e.to_string())?;
    let d = &sl.report.data;
    ensure(d["simple"] == false, "SL(2,Z) reported simple")?;
    ensure(d["ideals"]["classes"].as_array().map(Vec::len) == Some(2), "class count")?;
    ensure(d["ideals"]["hasse"].as_array().is_some_and(Vec::is_empty), "classes comparable")?;
    ensure(d["ideals"]["count"] == 4, format!("hereditary subsets {}", d["ideals"]["count"]))?;
    Ok("S4*S4 simple and irreducible; SL(2,Z) 2 incomparable classes, 4 hereditary subsets".into())
}

fn c6() -> Outcome {
    let sl = spec("sl2z.spec");
    let s4 = spec("s4s4.spec");
    let z2 = spec("z2z2z2.spec");
    let a = solve(&sl.spec, &GaugeWeights::uniform(2)).map_err(|e| e.to_string())?;
    let b = solve(&s4.spec, &GaugeWeights::uniform(2)).map_err(|e| e.to_string())?;
    let c = solve(&z2.spec, &GaugeWeights::uniform(3)).map_err(|e| e.to_string())?;
    for s in [&a, &b, &c] {
        ensure(s.residual <= kms::BETA_TOLERANCE, format!("residual {:e}", s.residual))?;
    }
    ensure((a.decay[0] - 0.5f64.sqrt()).abs() <= 1e-10, format!("SL(2,Z) e^-β = {}", a.decay[0]))?;
    ensure((b.decay[0] - 1.0 / 3.0).abs() <= 1e-12, format!("S4 e^-β = {}", b.decay[0]))?;
    let l = factor_type(&s4.spec, &GaugeWeights::uniform(2));
    ensure(l == Some(num::rational::Ratio::new(1, 9)), format!("S4 factor type {l:?}"))?;
    // |I| = 3, [G:H] = 2
    let l3 = factor_type(&z2.spec, &GaugeWeights::uniform(3));
    ensure(l3 == Some(num::rational::Ratio::new(1, 2)), format!("Z2*Z2*Z2 factor type {l3:?}"))?;
    ensure((c.decay[0] - 0.5).abs() <= 1e-12, "Z2*Z2*Z2 temperature")?;
    Ok(format!("e^-β = {:.12} / {:.12}; III_1/9; III_1/2", a.decay[0], b.decay[0]))
}

fn c7() -> Outcome {
    let mut worst: f64 = 0.0;
    let start = Instant::now();
    for file in ["sl2z.spec", "s4s4.spec"] {
        let doc = spec(file);
        let sol = solve(&doc.spec, &GaugeWeights::uniform(2)).map_err(|e| e.to_string())?;
        let r = verify_stationarity(&doc.spec, &sol, 3, 1e-10).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("{file}: residual {:e}", r.max_residual))?;
        worst = worst.max(r.max_residual);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("{elapsed:?}"))?;
    Ok(format!("max residual {worst:e}, {elapsed:.2?}"))
}

fn c8() -> Outcome {
    let mut notes = Vec::new();
    for file in ["sl2z.spec", "s4s4.spec"] {
        let doc = spec(file);
        let options = Options { trials: Some(100_000), seed: Some(0), ..Options::default() };
        let first = run(Command::Simulate, &doc, &options).map_err(|e| e.to_string())?;
        let second = run(Command::Simulate, &doc, &options).map_err(|e| e.to_string())?;
        ensure(first.report.passed, format!("{file}: {}", first.text))?;
        ensure(first.report.to_machine() == second.report.to_machine(), format!("{file}: reruns differ"))?;
        notes.push(format!("{file} max |z| {:.2}", first.report.checks[0].value.as_f64().unwrap_or(f64::NAN)));
    }
    // the core sampler too
    let doc = spec("s4s4.spec");
    let sol = solve(&doc.spec, &GaugeWeights::uniform(2)).unwrap();
    ensure(
        random_walk(&doc.spec, &sol, 1000, 32, 7).unwrap() == random_walk(&doc.spec, &sol, 1000, 32, 7).unwrap(),
        "sampler not deterministic",
    )?;
    Ok(notes.join(", "))
}

fn c9() -> Outcome {
    let s4 = spec("s4s4.spec");
    let sol = solve(&s4.spec, &GaugeWeights::uniform(2)).unwrap();
    let table = character_table(s4.spec.subgroup()).unwrap();
    let a = build_a_gamma(&s4.spec, &table).unwrap();
    ensure(irreducible(&a), "S4*S4 A_Γ reducible")?;
    let p = perron_check(&sol, &a, table.degrees()).map_err(|e| e.to_string())?;
    ensure((p.radius - 1.0).abs() <= 1e-9 && p.positive, format!("radius {}", p.radius))?;
    let sl = spec("sl2z.spec");
    let a2 = build_a_gamma(&sl.spec, &character_table(sl.spec.subgroup()).unwrap()).unwrap();
    let (root, _) = kms::perron_root(&a2.to_f64()).map_err(|e| e.to_string())?;
    ensure((root - 2f64.sqrt()).abs() <= 1e-9, format!("SL(2,Z) Perron root {root}"))?;
    Ok(format!("ρ(B) = {:.12}, Perron root of SL(2,Z) A_Γ = {root:.12}", p.radius))
}

fn c10() -> Outcome {
    for (file, l) in [("sl2z.spec", 5), ("s4s4.spec", 3)] {
        let doc = spec(file);
        let r = verify_relations(&doc.spec, l, DEFAULT_BALL_BUDGET).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{file}: {:?}", r.checks))?;
        ensure(r.unit_defect_rank == doc.spec.subgroup().order(), format!("{file}: defect rank {}", r.unit_defect_rank))?;
    }
    let ex = f2_example(4, DEFAULT_BALL_BUDGET).map_err(|e| e.to_string())?;
    let printed = vec![vec![1, 0, 1, 1], vec![0, 1, 1, 1], vec![1, 1, 1, 0], vec![1, 1, 0, 1]];
    ensure(ex.matrix == printed, format!("free group matrix {:?}", ex.matrix))?;
    ensure(ex.ck_residual == 0 && ex.shells_match && ex.report.passed(), "free group relations")?;
    Ok("SL(2,Z) L=5 and S4*S4 L=3 exact; free group matrix reproduced".into())
}

fn c11() -> Outcome {
    let mut notes = Vec::new();
    for (file, radius) in [("sl2z.spec", 4), ("s4s4.spec", 3)] {
        let doc = spec(file);
        let start = Instant::now();
        let delta = doc.spec.hyperbolicity_delta(radius, DEFAULT_BALL_BUDGET).map_err(|e| e.to_string())?;
        ensure(delta == 0.into(), format!("{file}: δ = {delta}"))?;
        let tree = doc.spec.serre_tree(radius, DEFAULT_BALL_BUDGET).map_err(|e| e.to_string())?;
        ensure(tree.is_tree(), format!("{file}: tree check failed"))?;
        notes.push(format!("{file} δ = 0 ({:.2?}), tree of {} vertices", start.elapsed(), tree.vertices.len()));
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("golden A_Γ", c1),
        ("golden K-groups", c2),
        ("character tables", c3),
        ("Smith normal form suite", c4),
        ("simplicity and ideals", c5),
        ("KMS temperature", c6),
        ("exact stationarity", c7),
        ("Monte Carlo boundary measure", c8),
        ("Perron consistency", c9),
        ("Fock relations", c10),
        ("hyperbolicity and tree", c11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
