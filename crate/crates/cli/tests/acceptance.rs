#[path = "../../core/tests/props/mod.rs"]
mod props;

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;

use detool_core::depoly::{detect_homogeneous_sum, make_homogeneous, star_combined};
use detool_core::multiindex::MultiIndex;
use detool_core::operator::DeOp;
use detool_core::parser::Source;
use detool_core::rational::{q, qr};
use detool_core::*;

type Check = std::result::Result<String, String>;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn system(name: &str) -> DiscreteSystem {
    parse_system(&std::fs::read_to_string(fixture(&format!("{name}.sys"))).unwrap()).unwrap()
}

fn ensure(ok: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn detool(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_detool"))
        .args(args)
        .env_remove("DETOOL_SEED")
        .output()
        .unwrap();
    (
        o.status.code(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
    )
}

fn json_tail(s: &str) -> std::result::Result<Value, String> {
    let i = s.find('{').ok_or("no JSON on stdout")?;
    serde_json::from_str(&s[i..]).map_err(|e| e.to_string())
}

fn rules(pairs: &[(&str, Q)]) -> RuleSet {
    pairs
        .iter()
        .map(|(k, v)| (k.parse().unwrap(), v.clone()))
        .collect()
}

fn op(d: &[u32], e: &[u32]) -> DeOp {
    DeOp::new(d.into(), e.into())
}

fn mixed_square() -> std::result::Result<Factorization, String> {
    let text = std::fs::read_to_string(fixture("mixed_square.sys")).unwrap();
    match parse_source(&text).map_err(|e| e.to_string())? {
        Source::Polynomial { poly, .. } => fdel_algorithm(&poly).map_err(|e| e.to_string()),
        _ => Err("fixture is not a bare polynomial".into()),
    }
}

fn criterion1() -> Check {
    let f = mixed_square()?;
    let terms: Vec<String> = f.terms.iter().map(|t| t.render()).collect();
    ensure(
        terms
            == [
                "d0^2 * (w_1_0 d0 + d1)",
                "d0 e0 * [w_2_0 d0 + d1, s_2_0 e0 + e1]",
                "-s_2_0 d0 e0 * [w_3_0 d0 + d1, e0]",
                "-w_2_0 d0 e0 * [d0, s_4_0 e0 + e1]",
            ],
        format!("terms {terms:?}"),
    )?;
    let r = f.remainder.render();
    ensure(
        r == "-2 w_1_0 d0 d1 - w_1_0^2 d0^2 + (-w_2_0 s_2_0 + w_2_0 s_4_0 + w_3_0 s_2_0) d0 e0",
        format!("remainder {r}"),
    )?;
    ensure(f.reconstruct() == f.source, "reconstruction")?;
    let (code, out) = detool(&["factorize", &fixture("mixed_square.sys"), "--text"]);
    ensure(code == Some(0) && out.contains(&terms[1]), "CLI factorize")?;
    Ok("four terms and remainder exact".into())
}

fn criterion2() -> Check {
    let u = rules(&[
        ("w_1_0", q(1)),
        ("w_2_0", q(-1)),
        ("w_3_0", q(2)),
        ("s_2_0", q(-1)),
        ("s_4_0", qr(1, 2)),
    ]);
    let f = evaluate(&mixed_square()?, &u);
    let terms: Vec<String> = f.terms.iter().map(|t| t.render()).collect();
    ensure(
        terms
            == [
                "d0^2 * (d0 + d1)",
                "d0 e0 * [-d0 + d1, -e0 + e1]",
                "d0 e0 * [2 d0 + d1, e0]",
                "d0 e0 * [d0, 1/2 e0 + e1]",
            ],
        format!("terms {terms:?}"),
    )?;
    let r = f.remainder.to_rational().ok_or("remainder not ground")?;
    ensure(
        r.render() == "-2 d0 d1 - d0^2 - 7/2 d0 e0",
        format!("remainder {}", r.render()),
    )?;
    ensure(
        r.coeff(&op(&[0], &[0])) == Some(&qr(-7, 2)),
        "d0 e0 coefficient",
    )?;
    ensure(
        f.reconstruct().to_rational() == f.source.to_rational(),
        "reconstruction",
    )?;
    Ok("term-for-term; d0 e0 remainder coefficient is -7/2".into())
}

fn proportional(ls: &LinearSystem, l: &[Q], m: &[(u32, Q)]) -> bool {
    let mut mm = LinearPoly::zero(Kind::Eps);
    for (d, c) in m {
        mm.add_coeff(*d, c.clone());
    }
    LinearSystem::new(LinearPoly::from_coeffs(Kind::Delta, l.to_vec()), mm)
        .is_ok_and(|t| ls.same_up_to_scale(&t))
}

fn criterion3() -> Check {
    let r =
        linearize(&system("quadratic"), &LinearizeOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.algorithm == Algorithm::NoCross, "algorithm")?;
    let sol = r
        .solutions
        .iter()
        .find(|s| proportional(&s.system, &[q(2), q(1)], &[(1, q(1)), (2, q(-3))]))
        .ok_or("no solution proportional to (2 d0 + d1, e1 - 3 e2)")?;
    let hat = sol.hat.render();
    let hat_b = sol.hat_b.as_ref().map(|h| h.render()).unwrap_or_default();
    ensure(hat == "5 d1^2 + d0 d1", format!("A hat {hat}"))?;
    let b_hat = hat_b.replace('e', "d");
    let kappa2 = &sol.kappa * &sol.kappa;
    let scaled = sol.hat.scale(&kappa2).render();
    ensure(
        b_hat == scaled,
        format!("B hat {hat_b} is not kappa^2 times A hat"),
    )?;
    let third = qr(-1, 3);
    let core = [
        ("w_1_1", q(2)),
        ("w_2_0", q(2)),
        ("w_3_0", q(2)),
        ("s_1_2", third.clone()),
        ("s_2_1", third.clone()),
        ("s_4_1", third.clone()),
    ];
    for tail in [q(0), third.clone()] {
        let found = sol.rule_sets.iter().any(|u| {
            core.iter()
                .chain([("s_3_0", tail.clone())].iter())
                .all(|(k, v)| u.get(&k.parse().unwrap()) == Some(v))
        });
        ensure(found, format!("rule set with s_3_0 = {tail} missing"))?;
    }
    ensure(sol.certificate.passed(), "certificate")?;
    Ok(format!(
        "{} with both rule sets; B hat = {hat_b} (kappa = {})",
        sol.system.render(),
        sol.kappa
    ))
}

fn criterion4() -> Check {
    let s = system("with_linear");
    let r = linearize(&s, &LinearizeOptions::default()).map_err(|e| e.to_string())?;
    let sol = r
        .solutions
        .iter()
        .find(|x| proportional(&x.system, &[q(1), qr(1, 2)], &[(1, q(1))]))
        .ok_or("no solution proportional to y(t) + 1/2 y(t-1) = u(t-1)")?;
    let (al, _, _) = s.a.decompose_linear();
    let (_, bl, _) = s.b.decompose_linear();
    ensure(
        linear_divide(&al, &sol.system.l).is_ok(),
        "L does not divide A_l",
    )?;
    ensure(
        linear_divide(&bl, &sol.system.m).is_ok(),
        "M does not divide B_l",
    )?;
    Ok(format!("{}; L | A_l and M | B_l", sol.system.render()))
}

fn criterion5() -> Check {
    let s = system("cross");
    let r = linearize(&s, &LinearizeOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.algorithm == Algorithm::Cross, "algorithm")?;
    let sol = r
        .solutions
        .iter()
        .find(|x| proportional(&x.system, &[q(6), q(-5), q(1)], &[(1, q(1)), (2, q(2))]))
        .ok_or("no solution proportional to 6y(t) - 5y(t-1) + y(t-2) = u(t-1) + 2u(t-2)")?;
    ensure(
        sol.lambda == Some(q(1)) && sol.mu == Some(q(1)),
        "lambda, mu",
    )?;
    let expected = [
        (MultiIndex::from([0]), q(1)),
        (MultiIndex::from([1]), q(-1)),
        (MultiIndex::from([1, 2]), q(1)),
    ];
    let mut t = DePoly::zero();
    for (theta, a) in &expected {
        t.add_assign(&make_homogeneous(theta, &q(1), &q(1)).scale(a));
    }
    let hom = detect_homogeneous_sum(&t).ok_or("groups not detected")?;
    ensure(hom.groups == expected, format!("groups {:?}", hom.groups))?;
    ensure(hom.hat() == sol.hat, format!("A hat {}", sol.hat.render()))?;
    ensure(sol.hat.is_proper(), "A hat not proper")?;
    let lm = sol.l.to_depoly().add(&sol.m.to_depoly());
    ensure(
        star_combined(&sol.hat, &lm) == s.underline(),
        "A hat * (L + M) differs",
    )?;
    ensure(sol.certificate.passed(), "certificate")?;
    Ok(format!(
        "{}; A hat = {}",
        sol.system.render(),
        sol.hat.render()
    ))
}

fn criterion6() -> Check {
    let mut notes = Vec::new();
    for (name, horizon) in [
        ("quadratic", "300"),
        ("with_linear", "300"),
        ("cross", "1000"),
    ] {
        let (code, out) = detool(&[
            "verify",
            &fixture(&format!("{name}.sys")),
            "--linear",
            &fixture(&format!("{name}_lin.sys")),
            "--trials",
            "20",
            "--horizon",
            horizon,
            "--seed",
            "7",
        ]);
        let v = json_tail(&out)?;
        ensure(
            code == Some(0) && v["verdict"] == "PASS" && v["trials"] == 20,
            format!("{name}: exit {code:?}, {v}"),
        )?;
        notes.push(format!("{name}@{horizon}"));
    }
    Ok(format!("20 trials PASS for {}", notes.join(", ")))
}

fn criterion7() -> Check {
    let mut failed = Vec::new();
    let results = props::all();
    for (name, r) in &results {
        if let Err(e) = r {
            failed.push(format!("{name}: {e}"));
        }
    }
    let (whole, parts) = props::non_distributive_witness();
    if whole == parts {
        failed.push("non-distributivity witness".into());
    }
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok(format!(
        "{} properties x {} cases; witness {whole} != {parts}",
        results.len(),
        props::CASES
    ))
}

fn criterion8() -> Check {
    let (code, out) = detool(&["linearize", &fixture("unsat.sys")]);
    ensure(code == Some(2), format!("unsat exit {code:?}"))?;
    let v = json_tail(&out)?;
    let diag = v["diagnostics"]
        .as_array()
        .and_then(|d| {
            d.iter()
                .filter_map(|x| x.as_str())
                .find(|x| x.contains("unsatisfiable"))
                .map(str::to_owned)
        })
        .ok_or("no unsatisfiable equation in diagnostics")?;
    let (code, out) = detool(&[
        "verify",
        &fixture("quadratic.sys"),
        "--linear",
        &fixture("quadratic_perturbed_lin.sys"),
    ]);
    ensure(code == Some(2), format!("perturbed exit {code:?}"))?;
    let c = json_tail(&out)?;
    let d = &c["divergence"];
    ensure(
        c["verdict"] == "FAIL" && d["t"] == 2 && d["y"] != d["y_star"],
        format!("certificate {c}"),
    )?;
    Ok(format!(
        "MethodFails ({diag}); perturbed FAIL at t = 2, y = {}, y* = {}",
        d["y"], d["y_star"]
    ))
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Check, Duration); 8] = [
        (criterion1, Duration::from_secs(1)),
        (criterion2, Duration::from_secs(1)),
        (criterion3, Duration::from_secs(10)),
        (criterion4, Duration::from_secs(10)),
        (criterion5, Duration::from_secs(30)),
        (criterion6, Duration::from_secs(60)),
        (criterion7, Duration::from_secs(120)),
        (criterion8, Duration::from_secs(10)),
    ];
    let mut all = true;
    for (n, (check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        let took = start.elapsed();
        let r = match r {
            Ok(m) if took > *budget => Err(format!("{m}; took {took:.2?}, budget {budget:?}")),
            other => other,
        };
        match r {
            Ok(m) => println!("criterion {}: PASS ({took:.2?}) {m}", n + 1),
            Err(m) => {
                all = false;
                println!("criterion {}: FAIL ({took:.2?}) {m}", n + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
