//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use newton_infinity::analysis::{
    frank_wolfe, search_minimizer_at_infinity, unconstrained_infimum, Attainment, Conclusion,
};
use newton_infinity::cli::{self, Overrides, ProblemFile};
use newton_infinity::conditions::{
    check_mf_infinity, check_nondegenerate, degenerate_face_to_mf, verify_certificate, verify_degenerate_face,
    verify_mf_violation, CertItem, CheckStatus, ProblemInstance, Verdict, Witness,
};
use newton_infinity::geometry::{is_convenient, newton_polyhedron, restrict_polyhedron_check};
use newton_infinity::numeric::SolverConfig;
use newton_infinity::poly::{parse, Exponent, Point, Polynomial, VarSet};
use newton_infinity::rational::{int, to_f64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{degenerate_instances, is_sum_of_squares_instance, names, random_instance};

const SUITE: u64 = 60;

type Check = Result<String, String>;

fn escaping() -> Polynomial {
    parse("(x*y - 1)^2 + x^2", &names(2)).unwrap()
}

fn half_space() -> ProblemInstance {
    ProblemInstance::new(parse("x^2 + y^2 + z", &names(3)).unwrap(), vec![parse("-z", &names(3)).unwrap()]).unwrap()
}

fn within(limit: Duration, started: Instant) -> Check {
    let t = started.elapsed();
    if t <= limit {
        Ok(format!("{:.2}s", t.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exps(v: &[[u32; 2]]) -> Vec<Exponent> {
    v.iter().map(|e| Exponent(e.to_vec())).collect()
}

fn criterion_1() -> Check {
    let started = Instant::now();
    let file = ProblemFile::from_json(r#"{"variables":["x","y"],"objective":"(x*y - 1)^2 + x^2"}"#).unwrap();
    let out = cli::run(cli::Command::Newton, &file, &Overrides::default(), None);
    ensure(out.exit_code == 0, || format!("exit code {}", out.exit_code))?;
    let gamma = newton_polyhedron(&escaping()).unwrap();
    let mut vertices = gamma.vertices.clone();
    vertices.sort();
    ensure(vertices == exps(&[[0, 0], [2, 0], [2, 2]]), || format!("vertices {vertices:?}"))?;
    let poly = &out.report["payload"]["polyhedra"][0];
    let bad: Vec<u64> = poly["bad_faces"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    ensure(bad.len() == 1, || format!("{} bad faces", bad.len()))?;
    let face = &gamma.faces[bad[0] as usize];
    let mut verts: Vec<Exponent> = face.vertex_ids.iter().map(|&i| gamma.vertices[i].clone()).collect();
    verts.sort();
    ensure(verts == exps(&[[0, 0], [2, 2]]), || format!("bad face {verts:?}"))?;
    let reported: Vec<Vec<u64>> = poly["polyhedron"]["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect())
        .collect();
    ensure(reported.len() == 3, || format!("report lists {} vertices", reported.len()))?;
    within(Duration::from_secs(1), started).map(|t| format!("vertices (0,0) (2,0) (2,2), bad face O-A, {t}"))
}

fn values<T>(v: &[T], f: impl Fn(&T) -> f64) -> Vec<f64> {
    v.iter().map(f).collect()
}

fn near(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6)
}

fn criterion_2() -> Check {
    let started = Instant::now();
    let file = ProblemFile::from_json(r#"{"variables":["x","y"],"objective":"(x*y - 1)^2 + x^2"}"#).unwrap();
    let out = cli::run(cli::Command::Infimum, &file, &Overrides::default(), None);
    ensure(out.exit_code == 0, || format!("exit code {}", out.exit_code))?;
    let r = unconstrained_infimum(&escaping(), &SolverConfig::default()).map_err(|e| e.to_string())?;
    let k0 = values(&r.k0, |c| c.value);
    let s = values(&r.sigma_inf, |c| c.value);
    let sp = values(&r.sigma_inf_prime, |c| c.value);
    ensure(near(&k0, &[1.0]), || format!("K0 {k0:?}"))?;
    ensure(near(&s, &[0.0, 1.0]), || format!("Sigma {s:?}"))?;
    ensure(near(&sp, &[0.0]), || format!("Sigma' {sp:?}"))?;
    let f = r.f_star.ok_or("no f*")?;
    ensure(f.abs() <= 1e-6, || format!("f* = {f}"))?;
    ensure(r.attainment == Attainment::NotAttainedLikely, || format!("attainment {:?}", r.attainment))?;
    ensure((-1e-4..=1e-2).contains(&r.oracle_value), || format!("oracle {}", r.oracle_value))?;
    let rep = &out.report["payload"]["report"];
    ensure(rep["attainment"] == "NOT_ATTAINED_LIKELY", || "CLI attainment differs".into())?;
    within(Duration::from_secs(30), started)
        .map(|t| format!("K0={k0:.3?} Sigma={s:.3?} Sigma'={sp:.3?} f*={f:.1e} oracle={:.2e}, {t}", r.oracle_value))
}

fn criterion_3() -> Check {
    let started = Instant::now();
    let r = frank_wolfe(&half_space(), &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.convenient, || "not convenient".into())?;
    ensure(r.conclusion == Conclusion::AttainsByTheorem, || format!("{:?}", r.conclusion))?;
    let o = r.oracle.ok_or("no feasible grid point")?;
    ensure(o.value <= 1e-4, || format!("oracle value {}", o.value))?;
    ensure(o.point.norm() <= 1e-2, || format!("oracle point {:?}", o.point.0))?;
    within(Duration::from_secs(30), started)
        .map(|t| format!("convenient, ATTAINS_BY_THEOREM, oracle {:.1e} at |x|={:.1e}, {t}", o.value, o.point.norm()))
}

fn fails_reverifies(p: &Polynomial, ndg: &CheckStatus, mf: &CheckStatus) -> Result<(), String> {
    let prob = ProblemInstance::unconstrained(p.clone()).unwrap();
    if let Some(Witness::DegenerateFace(w)) = &ndg.witness {
        verify_degenerate_face(p, w).map_err(|e| format!("{p}: ndg witness: {e}"))?;
        let translated = degenerate_face_to_mf(p, w).map_err(|e| e.to_string())?;
        verify_mf_violation(&prob, &translated).map_err(|e| format!("{p}: translated witness: {e}"))?;
    }
    if let Some(Witness::MfViolation(w)) = &mf.witness {
        verify_mf_violation(&prob, w).map_err(|e| format!("{p}: mf witness: {e}"))?;
    }
    Ok(())
}

fn criterion_4(suite: &[(u64, Polynomial, CheckStatus)]) -> Check {
    let started = Instant::now();
    let cfg = SolverConfig::default();
    let mut fails = 0;
    let extra: Vec<(Polynomial, CheckStatus)> = degenerate_instances()
        .into_iter()
        .map(|p| {
            let s = check_nondegenerate(&p, &cfg).unwrap();
            (p, s)
        })
        .collect();
    let all = suite.iter().map(|(_, p, s)| (p, s)).chain(extra.iter().map(|(p, s)| (p, s)));
    let mut count = 0;
    for (p, ndg) in all {
        count += 1;
        let mf = check_mf_infinity(&ProblemInstance::unconstrained(p.clone()).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let disagree = (ndg.verdict == Verdict::Fails && mf.verdict.holds())
            || (mf.verdict == Verdict::Fails && ndg.verdict.holds());
        ensure(!disagree, || format!("{p}: ndg {:?}, mf {:?}", ndg.verdict, mf.verdict))?;
        fails += usize::from(ndg.verdict == Verdict::Fails);
        fails_reverifies(p, ndg, &mf)?;
    }
    ensure(count >= 50, || format!("only {count} instances"))?;
    within(Duration::from_secs(600), started)
        .map(|t| format!("{count} instances ({} seeded), {fails} FAILS, all witnesses re-verified, {t}", suite.len()))
}

/// Random faces carrying a normal, with a random point.
fn triples(seed: u64, count: usize) -> Vec<(Polynomial, Vec<f64>, i64, Polynomial, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        let p = random_instance(1000 + k);
        k += 1;
        let gamma = newton_polyhedron(&p).unwrap();
        let faces: Vec<_> = gamma.faces.iter().filter(|f| f.rep_normal.is_some()).collect();
        let face = faces[rng.gen_range(0..faces.len())];
        let q: Vec<f64> = face.rep_normal.as_ref().unwrap().iter().map(to_f64).collect();
        let d = to_f64(face.d_value.as_ref().unwrap()) as i64;
        let g = p.face_polynomial(face).unwrap();
        let x: Vec<f64> = (0..p.nvars()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        out.push((p, q, d, g, x));
    }
    out
}

fn criterion_5() -> Check {
    let mut worst: f64 = 0.0;
    for (p, q, d, g, x) in triples(5, 200) {
        let grad: Vec<f64> = g.gradient().iter().map(|h| h.evaluate(&x).unwrap()).collect();
        let lhs: f64 = (0..x.len()).map(|j| q[j] * x[j] * grad[j]).sum();
        let v = g.evaluate(&x).unwrap();
        let err = (lhs - d as f64 * v).abs() / (1.0 + v.abs());
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("{p} at {x:?}: relative error {err:e}"))?;
    }
    Ok(format!("200 triples, worst {worst:.1e}"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for (p, q, d, g, x) in triples(66, 200) {
        let t: f64 = rng.gen_range(0.1..=2.0);
        let scaled: Vec<f64> = x.iter().zip(&q).map(|(xj, qj)| t.powf(*qj) * xj).collect();
        let lhs = g.evaluate(&scaled).unwrap();
        let rhs = t.powi(d as i32) * g.evaluate(&x).unwrap();
        let scale = t.powi(d as i32).abs() * g.term_scale(&x);
        let err = (lhs - rhs).abs() / (1.0 + scale.max(rhs.abs()));
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("{p} t={t}: relative error {err:e}"))?;
    }
    Ok(format!("200 samples, worst {worst:.1e}"))
}

fn criterion_7() -> Check {
    let mut checked = 0;
    let mut convenient = 0;
    for seed in 0..200 {
        let p = random_instance(2000 + seed);
        for set in VarSet::nonempty_subsets(p.nvars()) {
            if p.is_constant_on(set).unwrap() {
                continue;
            }
            let ok = restrict_polyhedron_check(&p, set).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{p} on {:?}", set.iter().collect::<Vec<_>>()))?;
            checked += 1;
        }
        if is_convenient(&p) {
            convenient += 1;
            let bad = newton_polyhedron(&p).unwrap().bad_faces().len();
            ensure(bad == 0, || format!("convenient {p} has {bad} bad faces"))?;
        }
    }
    Ok(format!("{checked} restrictions, {convenient} convenient polynomials without bad faces"))
}

fn criterion_8(suite: &[(u64, Polynomial, CheckStatus)]) -> Check {
    let cfg = SolverConfig::default();
    let mut checked = 0;
    for (seed, p, ndg) in suite {
        if !ndg.verdict.holds() || !is_sum_of_squares_instance(*seed) {
            continue;
        }
        let r = unconstrained_infimum(p, &cfg).map_err(|e| format!("{p}: {e}"))?;
        let (Some(a), Some(b)) = (r.f_star, r.f_star_prime) else {
            return Err(format!("{p}: no candidate values"));
        };
        ensure((a - b).abs() <= 1e-6, || format!("{p}: {a} vs {b}"))?;
        ensure(r.oracle_value >= a - 1e-4, || format!("{p}: oracle {} undercuts f* = {a}", r.oracle_value))?;
        checked += 1;
    }
    ensure(checked > 0, || "no HOLDS instances".into())?;
    Ok(format!("{checked} bounded-below HOLDS instances agree"))
}

fn failed_item(s: &CheckStatus) -> Option<CertItem> {
    match &s.witness {
        Some(Witness::Certificate(c)) => c.failed_item,
        _ => None,
    }
}

fn criterion_9() -> Check {
    let cfg = SolverConfig::default();
    let prob = ProblemInstance::unconstrained(escaping()).unwrap();
    let s = search_minimizer_at_infinity(&prob, 0.0, &cfg).map_err(|e| e.to_string())?;
    let cert = s.certificate.ok_or("no certificate found")?;
    let f = s.f_star_certified.unwrap();
    let status = verify_certificate(&prob, &cert, f);
    ensure(status.verdict == Verdict::HoldsVerified, || format!("{status:?}"))?;
    let Some(Witness::Certificate(c)) = &status.witness else { return Err("no item list".into()) };
    ensure(c.d_value.as_ref().map_or(false, |d| *d == int(0)), || "d(q) is not exactly 0".into())?;

    let mut bad = cert.clone();
    bad.lambda[0] = -bad.lambda[0];
    let r = failed_item(&verify_certificate(&prob, &bad, f));
    ensure(r == Some(CertItem::Multipliers), || format!("lambda sign: {r:?}"))?;
    let mut bad = cert.clone();
    bad.x_star = Point(vec![0.0, bad.x_star[1]]);
    let r = failed_item(&verify_certificate(&prob, &bad, f));
    ensure(r == Some(CertItem::Support), || format!("x* coordinate: {r:?}"))?;
    let mut bad = cert.clone();
    bad.q = vec![int(1), int(-2)];
    let r = failed_item(&verify_certificate(&prob, &bad, f));
    ensure(r == Some(CertItem::Value), || format!("q: {r:?}"))?;
    Ok(format!(
        "J={:?} q=({},{}) x*=({:.3},{:.3}) verified; corruptions fail items v, i, ii",
        cert.j, cert.q[0], cert.q[1], cert.x_star[0], cert.x_star[1]
    ))
}

fn analyze_twice(file: &str) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_newton-infinity");
    let run = || -> Result<Value, String> {
        let out = Command::new(bin)
            .args(["analyze", "--input", file, "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())?;
        let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        v.as_object_mut().ok_or("not an object")?.remove("timings");
        Ok(v)
    };
    let a = serde_json::to_string(&run()?).unwrap();
    let b = serde_json::to_string(&run()?).unwrap();
    ensure(a == b, || format!("{file}: reports differ"))
}

fn criterion_10() -> Check {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems/");
    analyze_twice(&format!("{root}escaping.json"))?;
    analyze_twice(&format!("{root}half_space.json"))?;
    Ok("analyze reports identical modulo timings for both examples".into())
}

fn main() {
    let cfg = SolverConfig::default();
    let suite: Vec<(u64, Polynomial, CheckStatus)> = (0..SUITE)
        .map(|seed| {
            let p = random_instance(seed);
            let s = check_nondegenerate(&p, &cfg).unwrap();
            (seed, p, s)
        })
        .collect();
    let results: Vec<(usize, Check)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4(&suite)),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8(&suite)),
        (9, criterion_9()),
        (10, criterion_10()),
    ];
    let mut failed = 0;
    for (k, r) in &results {
        match r {
            Ok(detail) => println!("criterion {k:>2}: PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {detail}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
