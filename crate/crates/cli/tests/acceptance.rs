//! End-to-end acceptance checks on the bundled fixtures. Prints one line per
//! criterion and fails if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use gdfractal::spec::{parse_spec, Parameters, Problem};
use gdfractal::{run, Command, RunOptions};
use gdfractal_core::classify::{
    check_admissible, check_condition_iii, check_theorem_t2_conditions, classify_vertex, extract_standard_ifs,
    sample_admissibility, Check, ClassifyOptions, GapMembership, Outcome, Route, T2Result,
};
use gdfractal_core::construct::{solve_lengths, verify_separation, GdIfs, ParamPoint, SeparationStatus};
use gdfractal_core::digraph::Path;
use gdfractal_core::exactnum::primes::primes_up_to;
use gdfractal_core::exactnum::{
    membership, power_product, Cone, ConeIntersection, Generator, Monomial, MonomialSum, Rational,
};
use gdfractal_core::gaps::{
    detect_geometric_ratios, gap_lengths_truncated, gaps_bruteforce, hausdorff_distance, level_approx,
    DEFAULT_MAX_INTERVALS,
};

type Outcome_ = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn problem(name: &str) -> Problem {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_spec(&std::fs::read(path).unwrap()).unwrap()
}

fn built(name: &str) -> (Problem, GdIfs) {
    let p = problem(name);
    let f = p.build().unwrap();
    (p, f)
}

fn point(p: &Problem) -> ParamPoint {
    match &p.parameters {
        Parameters::Point(x) => x.clone(),
        other => panic!("{other:?}"),
    }
}

fn lam() -> Monomial {
    Monomial::abstract_generator("lam")
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn r(x: &MonomialSum) -> Rational {
    x.as_rational().expect("rational value")
}

fn middle_thirds(m: usize) -> Vec<(Rational, Rational)> {
    let mut v = vec![(q(0, 1), q(1, 1))];
    for _ in 0..m {
        v = v
            .into_iter()
            .flat_map(|(a, b)| {
                let third = (&b - &a) / q(3, 1);
                [(a.clone(), &a + &third), (&b - &third, b)]
            })
            .collect();
    }
    v
}

fn c1() -> Outcome_ {
    let start = Instant::now();
    let (p, f) = built("cantor.json");
    let l = solve_lengths(&point(&p)).map_err(|e| e.to_string())?;
    ensure(l == vec![MonomialSum::from_integer(1)], format!("l = {}", l[0]))?;
    for m in 1..=6 {
        let got: Vec<(Rational, Rational)> =
            level_approx(&f, 0, m, DEFAULT_MAX_INTERVALS).unwrap().intervals.iter().map(|(a, b)| (r(a), r(b))).collect();
        ensure(got == middle_thirds(m), format!("level {m} differs"))?;
    }
    within(start, Duration::from_millis(100))?;
    Ok("l = 1; levels 1..6 are the middle-thirds intervals".into())
}

fn c2() -> Outcome_ {
    let start = Instant::now();
    let (p, f) = built("example47.json");
    let l = solve_lengths(&point(&p)).map_err(|e| e.to_string())?;
    let l1 = MonomialSum::scaled_monomial(q(25, 2), &lam());
    let l2 = MonomialSum::scaled_monomial(q(63, 4), &lam());
    ensure(l == vec![l1.clone(), l2.clone()], format!("l = ({}, {})", l[0], l[1]))?;
    // substitution into l_1 = ξ_1 + l_1/2 + l_2/3 and l_2 = ξ_2 + l_1/5 + l_2/7
    let xi1 = MonomialSum::from_monomial(&lam());
    let xi2 = MonomialSum::scaled_monomial(q(11, 1), &lam());
    ensure(xi1 + l1.scale(&q(1, 2)) + l2.scale(&q(1, 3)) == l1, "first length equation")?;
    ensure(xi2 + l1.scale(&q(1, 5)) + l2.scale(&q(1, 7)) == l2, "second length equation")?;
    // with λ := 1 the lengths are the rationals 25/2 and 63/4
    let mut one = point(&p);
    one.gaps = vec![vec![Some(Monomial::one())], vec![Some(Monomial::ratio(11, 1))]];
    let lr = solve_lengths(&one).map_err(|e| e.to_string())?;
    ensure(lr.iter().map(r).collect::<Vec<_>>() == vec![q(25, 2), q(63, 4)], "λ := 1 lengths")?;

    let sep = verify_separation(&f).map_err(|e| e.to_string())?;
    ensure(sep.status == SeparationStatus::Cssc, format!("separation {}", sep.status.as_str()))?;
    ensure(f.lambda(0) == vec![lam()], "Λ₁")?;
    ensure(f.lambda(1) == vec![lam().mul(&Monomial::ratio(11, 1))], "Λ₂")?;
    for u in 0..2 {
        let v = classify_vertex(&f, u, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(v.outcome == Outcome::NotCoscSelfSimilar, format!("vertex {} outcome {}", u + 1, v.outcome.as_str()))?;
        ensure(v.certificate.route == Some(Route::Lemma44), "route")?;
        for name in ["i'", "ii'", "iii"] {
            ensure(v.certificate.condition(name).is_some_and(|c| c.holds), format!("condition {name}"))?;
        }
        ensure(v.certificate.replay(), "certificate replay")?;
    }
    within(start, Duration::from_secs(1))?;
    Ok("l = (25/2·lam, 63/4·lam), CSSC, both vertices NotCoscSelfSimilar, route Lemma4.4".into())
}

fn c3() -> Outcome_ {
    let start = Instant::now();
    let (_, f) = built("example43.json");
    let sep = verify_separation(&f).map_err(|e| e.to_string())?;
    ensure(sep.status == SeparationStatus::CoscOnly, format!("separation {}", sep.status.as_str()))?;
    ensure(f.gaps[2][0].is_zero(), "first gap of vertex 3 is zero")?;
    let pi = Monomial::abstract_generator("pi");
    let p5 = Monomial::ratio(11, 1);
    ensure(f.lambda(0) == vec![lam()], "Λ₁")?;
    ensure(f.lambda(1) == vec![lam().mul(&p5)], "Λ₂")?;
    ensure(f.lambda(2) == vec![lam().mul(&pi)], "Λ₃")?;
    let v = classify_vertex(&f, 2, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::NotCoscSelfSimilar, v.outcome.as_str())?;
    let c = &v.certificate;
    ensure(c.route == Some(Route::Lemma41), "route")?;
    ensure(c.circuit == Some(Path::new(vec![0])), "L = e1(1)")?;
    ensure(c.v == Some(0), "v = 1")?;
    let ci = c.condition("i").ok_or("condition i missing")?;
    ensure(
        ci.holds && matches!(ci.checks[0], Check::ConeIntersection { answer: ConeIntersection::Empty, .. }),
        "condition i certified empty",
    )?;
    let table = check_condition_iii(&f).map_err(|e| e.to_string())?;
    let mut expected = vec![
        Some(p5.inv()),
        Some(pi.inv()),
        Some(p5.clone()),
        Some(p5.div(&pi)),
        None,
        Some(pi.clone()),
        Some(pi.div(&p5)),
    ];
    expected.sort();
    ensure(table.distinct() == expected, format!("quotients {:?}", table.distinct()))?;
    ensure(c.replay(), "certificate replay")?;
    within(start, Duration::from_secs(1))?;
    Ok("COSC-only; route Lemma4.1 with L = e1(1), v = 1; 7 quotient values".into())
}

fn c4() -> Outcome_ {
    let (_, f) = built("fig2.json");
    let v = classify_vertex(&f, 2, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    let Outcome::SelfSimilar(ifs) = &v.outcome else {
        return Err(format!("outcome {}", v.outcome.as_str()));
    };
    ensure(ifs.maps.len() == 2, format!("{} maps", ifs.maps.len()))?;
    ensure(ifs.circuits == vec![Path::new(vec![5]), Path::new(vec![6])], "maps are the loops at 3")?;
    ensure(extract_standard_ifs(&f, 2).map_err(|e| e.to_string())? == *ifs, "extraction")?;
    let rho = q(1, 2);
    let l3 = r(&f.length(2));
    let mut worst = String::new();
    for m in 2..=6 {
        let a = level_approx(&f, 2, m, DEFAULT_MAX_INTERVALS).map_err(|e| e.to_string())?;
        let b = ifs.level_approx(&f.hulls[2], m, &f.numeric).map_err(|e| e.to_string())?;
        let d = hausdorff_distance(&a, &b, &f.numeric, 128).map_err(|e| e.to_string())?;
        let bound = num_traits::Pow::pow(&rho, m as u32) * &l3;
        ensure(d.hi <= bound, format!("m = {m}: distance above bound"))?;
        worst = format!("m=6 distance <= {}", d.hi);
    }
    Ok(format!("2 maps; {worst}"))
}

fn c5() -> Outcome_ {
    let mut checked = 0;
    for name in ["cantor.json", "example47.json"] {
        let (_, f) = built(name);
        for u in 0..f.graph.vertex_count() {
            let cat = gap_lengths_truncated(&f, u, 6, DEFAULT_MAX_INTERVALS).map_err(|e| e.to_string())?;
            for m in 1..=6 {
                let mut brute = gaps_bruteforce(&f, u, m, DEFAULT_MAX_INTERVALS).map_err(|e| e.to_string())?.lengths();
                brute.sort();
                ensure(brute == cat.slice_below(m), format!("{name} vertex {} m = {m}", u + 1))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (fixture, vertex, m) cases equal"))
}

fn c6() -> Outcome_ {
    let base = point(&problem("example47.json"));
    let with_lambda = |l: Monomial| {
        let mut p = base.clone();
        p.gaps = vec![vec![Some(l.clone())], vec![Some(l.mul(&Monomial::ratio(11, 1)))]];
        p
    };
    ensure(check_admissible(&base).admissible, "λ abstract should be admissible")?;
    let one = check_admissible(&with_lambda(Monomial::one()));
    let zero = q(0, 1);
    let e5 = vec![zero.clone(), zero.clone(), zero.clone(), zero.clone(), q(1, 1), zero.clone()];
    ensure(!one.admissible && one.witness.as_ref().map(|w| &w.0) == Some(&e5), "λ = 1 witness picks x5")?;
    let root = Monomial::power_of(Generator::Prime(11), q(-1, 2));
    let p = with_lambda(root);
    let a = check_admissible(&p);
    let (plus, minus) = a.witness.clone().ok_or("λ = 11^(-1/2) should not be admissible")?;
    let e56 = vec![zero.clone(), zero.clone(), zero.clone(), zero.clone(), q(1, 1), q(1, 1)];
    ensure(plus == e56 && minus.iter().all(|x| *x == zero), "witness x5·x6")?;
    let entries: Vec<Monomial> = p.entries().into_iter().flatten().collect();
    ensure(power_product(&entries, &plus) == Monomial::one(), "x5·x6 = 1")?;
    Ok("abstract: yes; λ=1: no (x5); λ=11^(-1/2): no (x5·x6 = 1)".into())
}

fn c7() -> Outcome_ {
    let (_, f) = built("t2_equalgap.json");
    let unit = (MonomialSum::zero(), MonomialSum::from_integer(1));
    ensure(f.hulls.iter().all(|h| *h == unit), "hulls are [0, 1]")?;
    let fifth = MonomialSum::from_rational(q(1, 5));
    ensure(f.gaps.iter().flatten().all(|g| *g == fifth), "gaps are 1/5")?;
    match check_theorem_t2_conditions(&f, 0).map_err(|e| e.to_string())? {
        T2Result::Holds { memberships, .. } => {
            ensure(memberships == vec![GapMembership { j: 1, m: 1, n: 1 }], format!("{memberships:?}"))?
        }
        T2Result::Fails { reason } => return Err(reason),
    }
    let v = classify_vertex(&f, 0, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::NotSelfSimilar, v.outcome.as_str())?;
    Ok("hulls [0,1], gaps 1/5, m2 = n2 = 1, NotSelfSimilar".into())
}

fn c8() -> Outcome_ {
    let (_, f) = built("example47.json");
    let cat = gap_lengths_truncated(&f, 0, 8, DEFAULT_MAX_INTERVALS).map_err(|e| e.to_string())?;
    let a_l = vec![Monomial::ratio(1, 7)];
    let theta1 = lam().mul(&Monomial::ratio(11, 3));
    let r1 = detect_geometric_ratios(&cat, &theta1, 3, &f.numeric).map_err(|e| e.to_string())?;
    ensure(r1.contains(&Monomial::ratio(1, 7)), format!("ratios at 11/3·lam: {r1:?}"))?;
    ensure(membership(&Monomial::ratio(1, 7), &a_l, Cone::QPlusStar).is_yes(), "1/7 in cone")?;
    let r2 = detect_geometric_ratios(&cat, &lam(), 3, &f.numeric).map_err(|e| e.to_string())?;
    let exceptions: Vec<String> = r2
        .iter()
        .filter(|x| membership(x, &a_l, Cone::QPlusStar).is_yes())
        .map(Monomial::to_string)
        .collect();
    ensure(exceptions.is_empty(), format!("inside cone: {exceptions:?}"))?;
    Ok(format!("1/7 found at 11/3·lam; {} ratios at lam, 0 exceptions", r2.len()))
}

fn c9() -> Outcome_ {
    let start = Instant::now();
    let (p, _) = built("cantor.json");
    let rep = sample_admissibility(&p.graph, 1000, 42, &primes_up_to(1000), 1000).map_err(|e| e.to_string())?;
    ensure(rep.fraction >= 0.99, format!("fraction {}", rep.fraction))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("{} of {} admissible", rep.admissible, rep.samples))
}

fn c10() -> Outcome_ {
    let commands = [Command::Validate, Command::Construct, Command::Classify, Command::Gaps, Command::Render, Command::Extract];
    let fixtures = ["cantor.json", "example47.json", "example43.json", "fig2.json", "t2_equalgap.json"];
    let mut n = 0;
    for name in fixtures {
        let bytes = std::fs::read(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        for cmd in commands {
            let a = run(cmd, &bytes, &RunOptions::default());
            let b = run(cmd, &bytes, &RunOptions::default());
            ensure(a == b, format!("{cmd:?} on {name} differs"))?;
            n += 1;
        }
    }
    Ok(format!("{n} reports byte-identical across two runs"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome_); 10] = [
        ("Cantor reconstruction", c1),
        ("two-vertex system end-to-end", c2),
        ("three-vertex system end-to-end", c3),
        ("loop extraction", c4),
        ("gap oracle equivalence", c5),
        ("admissibility triple", c6),
        ("equal-gap instance", c7),
        ("dichotomy breach", c8),
        ("admissibility sampling", c9),
        ("determinism", c10),
    ];
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let line = match f() {
            Ok(note) => format!("criterion {:>2} PASS  {name}: {note}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL  {name}: {why}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
