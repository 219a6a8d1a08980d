use super::*;
use crate::construct::{build_equal_gap_family, build_gdifs, ParamPoint};
use crate::digraph::Digraph;
use crate::exactnum::{parse_decimal, ConeIntersection, Membership, NumericContext, Sign, SignedMonomial};
use crate::gaps::{hausdorff_distance, level_approx};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn pos(n: u64, d: u64) -> SignedMonomial {
    SignedMonomial::positive(Monomial::ratio(n, d))
}

fn lam() -> Monomial {
    Monomial::abstract_generator("lam")
}

fn pi() -> Monomial {
    Monomial::abstract_generator("pi")
}

fn ctx() -> NumericContext {
    let mut c = NumericContext::default();
    c.set_approx("lam", q(1, 1));
    c.set_approx("pi", parse_decimal("3.14159265358979").unwrap());
    c
}

fn two_vertex_point(l: Monomial) -> ParamPoint {
    let g = Digraph::numbered(2, &[(1, 1), (1, 2), (2, 1), (2, 2)]).unwrap();
    let gaps = vec![vec![Some(l.clone())], vec![Some(l.mul(&Monomial::ratio(11, 1)))]];
    ParamPoint::new(g, vec![pos(1, 2), pos(1, 3), pos(1, 5), pos(1, 7)], gaps).unwrap()
}

fn two_vertex() -> GdIfs {
    build_gdifs(&two_vertex_point(lam()), &ctx()).unwrap()
}

fn three_vertex() -> GdIfs {
    let g = Digraph::numbered(3, &[(1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 1), (3, 3)]).unwrap();
    let ratios = vec![pos(1, 2), pos(1, 3), pos(1, 5), pos(1, 7), pos(1, 3), pos(1, 5), pos(1, 7)];
    let gaps = vec![
        vec![Some(lam())],
        vec![Some(lam().mul(&Monomial::ratio(11, 1)))],
        vec![None, Some(pi().mul(&lam()))],
    ];
    build_gdifs(&ParamPoint::new(g, ratios, gaps).unwrap(), &ctx()).unwrap()
}

fn funnel() -> GdIfs {
    let g = Digraph::numbered(3, &[(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 3), (3, 3)]).unwrap();
    let ratios = vec![pos(1, 3), pos(1, 4), pos(1, 5), pos(1, 2), pos(1, 3), pos(1, 4), pos(1, 2)];
    let gaps = vec![
        vec![Some(Monomial::ratio(1, 5)), Some(Monomial::ratio(1, 7))],
        vec![Some(Monomial::ratio(1, 3))],
        vec![Some(Monomial::ratio(1, 4))],
    ];
    build_gdifs(&ParamPoint::new(g, ratios, gaps).unwrap(), &ctx()).unwrap()
}

fn equal_gap() -> GdIfs {
    let g = Digraph::numbered(2, &[(1, 2), (1, 2), (2, 2), (2, 1)]).unwrap();
    let mags = vec![
        vec![Monomial::ratio(1, 2), Monomial::ratio(3, 10)],
        vec![Monomial::ratio(2, 5), Monomial::ratio(2, 5)],
    ];
    let signs = vec![vec![Sign::Positive; 2]; 2];
    build_equal_gap_family(&g, &q(1, 5), &mags, &signs, &NumericContext::default()).unwrap()
}

fn one_vertex(ratios: &[(u64, u64)], gaps: &[(u64, u64)]) -> GdIfs {
    let g = Digraph::numbered(1, &vec![(1, 1); ratios.len()]).unwrap();
    let r = ratios.iter().map(|&(a, b)| pos(a, b)).collect();
    let x = vec![gaps.iter().map(|&(a, b)| Some(Monomial::ratio(a, b))).collect()];
    build_gdifs(&ParamPoint::new(g, r, x).unwrap(), &NumericContext::default()).unwrap()
}

#[test]
fn admissibility_examples() {
    let a = check_admissible(&two_vertex_point(lam()));
    assert!(a.admissible && !a.outside_p1());

    let b = check_admissible(&two_vertex_point(Monomial::one()));
    assert!(!b.admissible);
    let (plus, minus) = b.witness.unwrap();
    assert_eq!(plus, vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1), q(0, 1)]);
    assert!(minus.iter().all(|x| *x == q(0, 1)));

    let root = Monomial::power_of(crate::exactnum::Generator::Prime(11), q(-1, 2));
    let c = check_admissible(&two_vertex_point(root));
    assert!(!c.admissible);
    let (plus, minus) = c.witness.unwrap();
    assert_eq!(plus, vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1), q(1, 1)]);
    assert!(minus.iter().all(|x| *x == q(0, 1)));
}

#[test]
fn zero_gaps_are_excluded() {
    let g = Digraph::numbered(3, &[(1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 1), (3, 3)]).unwrap();
    let ratios = vec![pos(1, 2), pos(1, 3), pos(1, 5), pos(1, 7), pos(1, 3), pos(1, 5), pos(1, 7)];
    let gaps = vec![vec![Some(lam())], vec![Some(lam().mul(&Monomial::ratio(11, 1)))], vec![None, Some(pi())]];
    let a = check_admissible(&ParamPoint::new(g, ratios, gaps).unwrap());
    assert_eq!(a.excluded, vec![9]);
    assert!(a.outside_p1());
    // repeated ratios make the entries dependent
    assert!(!a.admissible);
}

#[test]
fn condition_i_examples() {
    let f = three_vertex();
    let l = Path::new(vec![0]);
    assert_eq!(
        split_ratios(&f, &l),
        (vec![Monomial::ratio(1, 2)], vec![Monomial::ratio(1, 3), Monomial::ratio(1, 5), Monomial::ratio(1, 7)])
    );
    let r = check_condition_i(&f, &l);
    assert!(r.holds);

    let h = one_vertex(&[(1, 4), (1, 2)], &[(1, 10)]);
    let r = check_condition_i(&h, &Path::new(vec![0]));
    assert!(!r.holds);
    match &r.checks[0] {
        Check::ConeIntersection { answer: ConeIntersection::Witness { p, q: qq }, .. } => {
            assert_eq!(p, &vec![q(1, 1)]);
            assert_eq!(qq, &vec![q(2, 1)]);
        }
        other => panic!("{other:?}"),
    }
    assert!(check_condition_i(&h, &Path::new(vec![0, 1])).holds);
}

#[test]
fn condition_iprime_examples() {
    assert!(check_condition_iprime(&two_vertex()).holds);
    assert!(!check_condition_iprime(&one_vertex(&[(1, 3), (1, 3)], &[(1, 10)])).holds);
    let r = check_condition_iprime(&one_vertex(&[(1, 2), (1, 4), (1, 8)], &[(1, 100), (1, 100)]));
    assert!(!r.holds);
    match &r.checks[1] {
        Check::Membership { answer: Membership::Yes { witness }, .. } => {
            assert_eq!(witness, &vec![q(2, 1), q(-1, 1), q(0, 1)]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn condition_ii_examples() {
    assert!(check_condition_ii(&three_vertex(), 2, 0));
    assert!(check_condition_ii(&two_vertex(), 0, 1));
    // vertex 1 has a single child, so its gap row is empty
    let g = Digraph::numbered(2, &[(1, 2), (2, 2), (2, 2)]).unwrap();
    let p = ParamPoint::new(g, vec![pos(1, 2), pos(1, 3), pos(1, 3)], vec![vec![], vec![Some(Monomial::ratio(1, 3))]])
        .unwrap();
    let f = build_gdifs(&p, &NumericContext::default()).unwrap();
    assert!(!check_condition_ii(&f, 1, 0));
    assert!(check_condition_ii(&f, 1, 1));
}

#[test]
fn condition_iii_examples() {
    let t = check_condition_iii(&two_vertex()).unwrap();
    assert!(t.holds);
    let eleven = Monomial::ratio(11, 1);
    assert_eq!(t.distinct(), vec![Some(Monomial::ratio(1, 11)), Some(eleven.clone())].into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());

    let t = check_condition_iii(&three_vertex()).unwrap();
    assert!(t.holds);
    let d = t.distinct();
    assert_eq!(d.len(), 7);
    let expect = [
        Some(Monomial::ratio(1, 11)),
        Some(pi().inv()),
        Some(eleven.clone()),
        Some(eleven.div(&pi())),
        Some(pi()),
        Some(pi().div(&eleven)),
        None,
    ];
    for e in &expect {
        assert!(d.contains(e), "{e:?}");
    }

    let t = check_condition_iii(&one_vertex(&[(1, 2), (1, 5), (1, 7)], &[(1, 1), (1, 2)])).unwrap();
    assert!(!t.holds);
    let bad = &t.entries[t.failing.unwrap()];
    let w = t.checks[bad.check.unwrap()].clone();
    match w {
        Check::Membership { answer: Membership::Yes { witness }, .. } => assert_eq!(witness.len(), 3),
        other => panic!("{other:?}"),
    }
    let half = t.entries.iter().find(|e| e.quotient == Some(Monomial::ratio(1, 2))).unwrap();
    match &t.checks[half.check.unwrap()] {
        Check::Membership { answer: Membership::Yes { witness }, .. } => {
            assert_eq!(witness, &vec![q(1, 1), q(0, 1), q(0, 1)])
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn theorem_t2_conditions() {
    let f = equal_gap();
    match check_theorem_t2_conditions(&f, 0).unwrap() {
        T2Result::Holds { memberships, checks } => {
            assert_eq!(memberships, vec![GapMembership { j: 1, m: 1, n: 1 }]);
            assert_eq!(checks.len(), 2);
            assert!(checks.iter().all(Check::replay));
        }
        other => panic!("{other:?}"),
    }
    assert!(!check_theorem_t2_conditions(&f, 1).unwrap().holds());
    assert_eq!(check_theorem_t2_conditions(&two_vertex(), 0), Err(ClassifyError::NotEqualGapFamily));

    let mut wide = one_vertex(&[(1, 10), (1, 10), (1, 10)], &[(1, 2), (1, 2)]);
    wide.equal_gap = Some(q(1, 2));
    match check_theorem_t2_conditions(&wide, 0).unwrap() {
        T2Result::Fails { reason } => assert!(reason.contains("delta")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn extraction() {
    let f = funnel();
    let ifs = extract_standard_ifs(&f, 2).unwrap();
    assert_eq!(ifs.maps.len(), 2);
    assert_eq!(ifs.maps[0], f.maps[5]);
    assert_eq!(ifs.maps[1], f.maps[6]);
    assert_eq!(extract_standard_ifs(&two_vertex(), 0), Err(ClassifyError::CircuitAvoidsU("1".into())));

    let c = one_vertex(&[(1, 3), (1, 3)], &[(1, 3)]);
    let ifs = extract_standard_ifs(&c, 0).unwrap();
    assert_eq!(ifs.maps, c.maps);
}

#[test]
fn extracted_ifs_matches_levels() {
    let f = funnel();
    let ifs = extract_standard_ifs(&f, 2).unwrap();
    let l3 = f.length(2).as_rational().unwrap();
    for m in 1..=4 {
        let a = level_approx(&f, 2, m, DEFAULT_MAX_INTERVALS).unwrap();
        let b = ifs.level_approx(&f.hulls[2], m, &f.numeric).unwrap();
        let d = hausdorff_distance(&a, &b, &f.numeric, 128).unwrap();
        let bound = num_traits::Pow::pow(q(1, 2), m as u32) * &l3;
        assert!(d.hi <= bound, "m={m}");
    }
}

#[test]
fn classify_two_vertex() {
    let f = two_vertex();
    for (u, l_edge, v, path_edge) in [(0, 3, 1, 1), (1, 0, 0, 2)] {
        let verdict = classify_vertex(&f, u, &ClassifyOptions::default()).unwrap();
        assert_eq!(verdict.outcome, Outcome::NotCoscSelfSimilar);
        let c = &verdict.certificate;
        assert_eq!(c.route, Some(Route::Lemma44));
        assert_eq!(c.circuit, Some(Path::new(vec![l_edge])));
        assert_eq!(c.v, Some(v));
        assert_eq!(c.connecting_path, Some(Path::new(vec![path_edge])));
        for name in ["i'", "ii'", "iii"] {
            assert!(c.condition(name).unwrap().holds, "{name}");
        }
        assert_eq!(c.assumptions, vec!["lam".to_string()]);
        assert!(c.replay());
        let b = c.breach.as_ref().unwrap();
        assert!(b.consistent());
        assert_eq!(b.search_depth, Some(6));
    }
    let b = classify_vertex(&f, 0, &ClassifyOptions::default()).unwrap().certificate.breach.unwrap();
    assert_eq!(b.theta1, lam().mul(&Monomial::ratio(11, 3)));
    assert_eq!(b.ratio_l, Monomial::ratio(1, 7));
    assert_eq!(b.theta2, lam());
}

#[test]
fn classify_three_vertex() {
    let v = classify_vertex(&three_vertex(), 2, &ClassifyOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::NotCoscSelfSimilar);
    let c = &v.certificate;
    assert_eq!(c.route, Some(Route::Lemma41));
    assert_eq!(c.circuit, Some(Path::new(vec![0])));
    assert_eq!(c.v, Some(0));
    let ci = c.condition("i").unwrap();
    assert!(ci.holds);
    assert!(matches!(ci.checks[0], Check::ConeIntersection { answer: ConeIntersection::Empty, .. }));
    assert_eq!(c.assumptions, vec!["lam".to_string(), "pi".to_string()]);
    assert!(c.replay());
    assert!(c.breach.as_ref().unwrap().consistent());
}

#[test]
fn classify_funnel_and_equal_gap() {
    let v = classify_vertex(&funnel(), 2, &ClassifyOptions::default()).unwrap();
    match &v.outcome {
        Outcome::SelfSimilar(ifs) => assert_eq!(ifs.maps.len(), 2),
        other => panic!("{other:?}"),
    }
    assert_eq!(v.certificate.route, Some(Route::Thm51));

    let v = classify_vertex(&equal_gap(), 0, &ClassifyOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::NotSelfSimilar);
    assert_eq!(v.certificate.route, Some(Route::Thm49));
    assert!(v.certificate.replay());
}

#[test]
fn inconclusive_keeps_failure_table() {
    // rational gaps whose quotients are powers of the ratios
    let g = Digraph::numbered(2, &[(1, 1), (1, 2), (2, 1), (2, 2)]).unwrap();
    let gaps = vec![vec![Some(Monomial::ratio(1, 4))], vec![Some(Monomial::ratio(1, 8))]];
    let p = ParamPoint::new(g, vec![pos(1, 2), pos(1, 3), pos(1, 5), pos(1, 7)], gaps).unwrap();
    let f = build_gdifs(&p, &NumericContext::default()).unwrap();
    let v = classify_vertex(&f, 0, &ClassifyOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Inconclusive);
    assert_eq!(v.certificate.failures.len(), 1);
    assert!(!v.certificate.failures[0].condition_iii);
    assert!(v.certificate.replay());
}

#[test]
fn separation_precondition() {
    let g = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
    let maps = vec![
        Similarity { ratio: pos(1, 2), translation: MonomialSum::zero() },
        Similarity { ratio: pos(1, 2), translation: MonomialSum::from_rational(q(1, 4)) },
    ];
    let f = GdIfs::from_explicit_maps(g, maps, vec![(MonomialSum::zero(), MonomialSum::from_integer(1))]);
    assert!(matches!(
        classify_vertex(&f, 0, &ClassifyOptions::default()),
        Err(ClassifyError::SeparationUnverified(_))
    ));
}

#[test]
fn tampered_certificate_fails_replay() {
    let mut c = classify_vertex(&two_vertex(), 0, &ClassifyOptions::default()).unwrap().certificate;
    let rec = c.conditions.iter_mut().find(|r| r.name == "i'").unwrap();
    if let Check::Membership { answer, .. } = &mut rec.checks[1] {
        *answer = Membership::Yes { witness: vec![q(1, 1); 4] };
    }
    assert!(!c.replay());
}

#[test]
fn sampling() {
    let cantor = Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap();
    let r = sample_admissibility(&cantor, 0, 1, &[2, 3], 10).unwrap();
    assert_eq!((r.samples, r.fraction), (0, 1.0));
    let pool = crate::exactnum::primes::primes_up_to(1000);
    let r = sample_admissibility(&cantor, 200, 42, &pool, 1000).unwrap();
    assert!(r.fraction >= 0.95, "{r:?}");
    assert_eq!(r, sample_admissibility(&cantor, 200, 42, &pool, 1000).unwrap());
    let r = sample_admissibility(&cantor, 100, 7, &[2], 1000).unwrap();
    assert_eq!(r.admissible, 0);
    assert!(sample_admissibility(&cantor, 5, 7, &[], 1000).is_err());
}
