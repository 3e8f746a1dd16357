//! Acceptance gate: one test per criterion, all exact (no tolerances).
//!
//! Each test prints a single `criterion NN PASS` line on success; a failed
//! assertion fails the test, so the cargo summary carries one pass/fail line
//! per criterion either way.

use realchern::algebra::{Mod2Poly, Poly, Ring};
use realchern::conjugation::{SpaceModel, UPoly};
use realchern::equivariant::{rank_reconciliation, twisted_group, EquivClass, TwistedGroup};
use realchern::splitting::SplittingOracle;
use realchern::steenrod::wu_action;
use realchern::workspace::{LoadOptions, Workspace};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

fn catalogue() -> Workspace {
    realchern::workspace::standard_catalogue(&LoadOptions::default()).expect("catalogue loads")
}

fn load_single(text: &str) -> Workspace {
    let mut ws = Workspace::new();
    ws.load_str("inline.defs", text, &LoadOptions::default())
        .expect("inline definitions load");
    ws
}

/// Run the CLI binary, returning (exit code, stdout).
fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_realchern"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
    )
}

/// Re-express a polynomial in a ring with identically-named generators.
fn transport(p: &Mod2Poly, target: &Ring) -> Mod2Poly {
    let source = p.ring();
    let terms = p.terms().map(|(m, c)| {
        let mut exps = vec![0u16; target.generators().len()];
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = &source.generators()[i].name;
            let j = target
                .gen_index(name)
                .unwrap_or_else(|| panic!("target ring lacks generator {}", name));
            exps[j] = e;
        }
        (realchern::algebra::Monomial::from_exps(target, exps), *c)
    });
    Poly::from_terms(target, terms.collect::<Vec<_>>())
}

#[test]
fn criterion_01_hopf_example_groups() {
    let start = Instant::now();
    let ws = catalogue();
    let s2 = ws.space("S2").expect("S2 shipped");
    let s4 = ws.space("S4").expect("S4 shipped");
    let g2 = twisted_group(s2, 2, 0).expect("group computes");
    assert_eq!(
        g2,
        TwistedGroup { free_rank: 0, two_torsion: 1 },
        "H^2(S2; Z(0)) must be Z/2"
    );
    assert_eq!(g2.to_string(), "Z/2");
    let g4 = twisted_group(s4, 4, 0).expect("group computes");
    assert_eq!(
        g4,
        TwistedGroup { free_rank: 1, two_torsion: 1 },
        "H^4(S4; Z(0)) must be Z + Z/2"
    );
    assert_eq!(g4.to_string(), "Z + Z/2");
    assert!(start.elapsed().as_secs_f64() < 1.0, "must finish within 1 s");
    println!("criterion 01 PASS: sphere groups Z/2 and Z + Z/2");
}

#[test]
fn criterion_02_point_groups_match_group_cohomology() {
    let ws = catalogue();
    let point = ws.space("point").expect("point shipped");
    for k in 0..=12u32 {
        let untwisted = twisted_group(point, k, 0).expect("group computes");
        let expected = match k {
            0 => TwistedGroup { free_rank: 1, two_torsion: 0 },
            _ if k % 2 == 0 => TwistedGroup { free_rank: 0, two_torsion: 1 },
            _ => TwistedGroup::trivial(),
        };
        assert_eq!(untwisted, expected, "H^{}(point; Z(0))", k);
        let twisted = twisted_group(point, k, 1).expect("group computes");
        let expected = if k % 2 == 1 {
            TwistedGroup { free_rank: 0, two_torsion: 1 }
        } else {
            TwistedGroup::trivial()
        };
        assert_eq!(twisted, expected, "H^{}(point; Z(1))", k);
    }
    println!("criterion 02 PASS: point groups alternate Z, 0, Z/2, ... and 0, Z/2, ...");
}

#[test]
fn criterion_03_bu_rank_reconciliation_to_degree_12() {
    let start = Instant::now();
    let ws = load_single(
        "space BU4_12 {
           truncate 12;
           generator c1 : 2; generator c2 : 4; generator c3 : 6; generator c4 : 8;
           fixed {
             generator w1 : 1; generator w2 : 2; generator w3 : 3; generator w4 : 4;
           }
           kappa c1 -> w1; kappa c2 -> w2; kappa c3 -> w3; kappa c4 -> w4;
         }",
    );
    let space = ws.space("BU4_12").expect("truncation loads");
    let report = rank_reconciliation(space, 12).expect("reconciliation runs");
    assert_eq!(report.rows.len(), 26, "13 degrees x 2 twists");
    for row in &report.rows {
        assert!(
            row.matched(),
            "degree {} twist {}: group {} vs free {} torsion {}",
            row.degree,
            row.twist,
            row.group,
            row.monomial_free,
            row.monomial_torsion
        );
    }
    assert_eq!(report.mismatches(), 0);
    assert!(start.elapsed().as_secs_f64() < 10.0, "must finish within 10 s");
    println!("criterion 03 PASS: 26 group shapes match monomial counts, zero mismatches");
}

#[test]
fn criterion_04_restriction_matches_square_sum_two_ways() {
    let ws = catalogue();
    let taut = ws.bundle("taut4").expect("taut4 shipped");
    let space = taut.base();
    let fixed = space.fixed_ring();
    let wu = space.fixed_sq().expect("ladder ring has squares");
    let oracle = SplittingOracle::new(4, 1, 8);
    for n in 0..=4u32 {
        let restricted = taut.restrict_chern(n).expect("restriction computes");
        let cap = restricted.cap();
        let w_n = if n == 0 {
            Poly::one(fixed)
        } else {
            taut.sw_fixed_class(n)
        };
        let mut by_wu = UPoly::zero(fixed, cap);
        let mut by_oracle = UPoly::zero(fixed, cap);
        for i in 0..=n {
            let rule_based = wu.sq(i, &w_n);
            let split_based = transport(&oracle.sq(i, &w_n).expect("oracle in range"), fixed);
            assert_eq!(
                rule_based, split_based,
                "Sq^{} of w_{}: rule and splitting disagree",
                i, n
            );
            by_wu = by_wu.add_ref(&UPoly::term(&rule_based, n - i, cap));
            by_oracle = by_oracle.add_ref(&UPoly::term(&split_based, n - i, cap));
        }
        assert_eq!(restricted, by_wu, "restriction of c_{} vs square sum", n);
        assert_eq!(restricted, by_oracle);
    }
    println!("criterion 04 PASS: restrict(c_n) = sum Sq^i(w_n) u^(n-i), squares cross-checked");
}

#[test]
fn criterion_05_axiom_suite_passes_with_exit_zero() {
    let (code, stdout) = run_cli(&["verify", "axioms"]);
    assert_eq!(code, 0, "axiom suite must exit 0\n{}", stdout);
    assert!(!stdout.contains("FAIL"), "no failing check:\n{}", stdout);
    let maps: Vec<&str> = stdout.lines().filter(|l| l.starts_with("AXIOM II ")).collect();
    assert!(maps.len() >= 3, "at least 3 pullback maps, got {}", maps.len());
    let pairs: Vec<&str> = stdout.lines().filter(|l| l.starts_with("AXIOM III ")).collect();
    assert!(pairs.len() >= 5, "at least 5 bundle pairs, got {}", pairs.len());
    let hopf: Vec<&str> = stdout.lines().filter(|l| l.starts_with("AXIOM IV'")).collect();
    assert_eq!(hopf.len(), 1);
    assert!(
        hopf[0].contains("PASS") && hopf[0].contains("1 + h"),
        "normalization on the Hopf bundle: {}",
        hopf[0]
    );
    println!("criterion 05 PASS: axioms I-III and IV' hold on the shipped catalogue");
}

#[test]
fn criterion_06_conjugation_equation_leading_term() {
    let ws = catalogue();
    let mut checked = 0usize;
    for (name, space) in ws.spaces() {
        let ring = space.mod2_ring().clone();
        let top = 12.min(space.degree_cap());
        let mut degree = 0;
        while degree <= top {
            for mono in ring.monomial_basis(degree) {
                let class = Poly::monomial(&ring, mono.clone());
                let report = space
                    .conjugation_equation_check(&class)
                    .expect("equation computes");
                assert!(
                    report.pass,
                    "{}: leading term of restrict(sigma {}) is {} but kappa gives {}",
                    name,
                    mono.display(&ring),
                    report.leading,
                    report.expected
                );
                checked += 1;
            }
            degree += 2;
        }
    }
    assert!(checked >= 50, "catalogue covers enough classes: {}", checked);
    println!(
        "criterion 06 PASS: kappa(x) u^m leads the restriction on {} basis classes",
        checked
    );
}

#[test]
fn criterion_07_steenrod_rule_agrees_with_splitting_oracle() {
    let start = Instant::now();
    let oracle = SplittingOracle::new(4, 1, 20);
    let ring = oracle.ring().clone();
    let action = wu_action(&ring).expect("ladder ring");
    let mut checked = 0usize;
    for degree in 0..=10u32 {
        for mono in ring.monomial_basis(degree) {
            let p = Poly::monomial(&ring, mono.clone());
            for i in 0..=10u32 {
                let by_rule = action.sq(i, &p);
                let by_split = oracle.sq(i, &p).expect("within oracle cap");
                assert_eq!(
                    by_rule,
                    by_split,
                    "Sq^{} of {} disagrees",
                    i,
                    mono.display(&ring)
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000, "covered {} queries", checked);
    assert!(start.elapsed().as_secs_f64() < 30.0, "must finish within 30 s");
    println!(
        "criterion 07 PASS: rule-based and splitting-principle squares agree on {} queries",
        checked
    );
}

#[test]
fn criterion_08_wu_roundtrip_transfer_and_sw_numbers() {
    let mut text = String::new();
    for n in 1..=8u32 {
        text.push_str(&format!(
            "space cp{n}_s {{
               truncate {cap};
               generator h : 2;
               relation h^{top};
               fixed {{ generator t : 1; relation t^{top}; }}
               kappa h -> t;
             }}
             manifold cp{n} {{
               space cp{n}_s;
               dimension {cap};
               total_sw = (1 + h)^{top};
               fixed_total_sw = (1 + t)^{top};
               fundamental h^{n};
               fixed_fundamental t^{n};
             }}\n",
            n = n,
            cap = 2 * n,
            top = n + 1,
        ));
    }
    let ws = load_single(&text);
    for n in 1..=8u32 {
        let m = ws.manifold(&format!("cp{}", n)).expect("manifold loads");
        for side in [realchern::manifolds::Side::M, realchern::manifolds::Side::N] {
            let v = m.wu_classes(side).expect("wu classes compute");
            let action = match side {
                realchern::manifolds::Side::M => m.space().even_sq(),
                realchern::manifolds::Side::N => m.space().fixed_sq(),
            }
            .expect("squares resolve");
            assert_eq!(
                action.total_sq(&v),
                *m.total_sw(side),
                "Sq(v) = w fails on cp{}/{}",
                n,
                side
            );
        }
        for check in m.kappa_transfer_check().expect("transfer computes") {
            assert!(check.pass, "{}: {}", check.subject, check.detail);
        }
    }

    let cp2 = ws.manifold("cp2").expect("cp2 loads");
    let even: BTreeMap<Vec<u32>, bool> = [
        (vec![4], true),
        (vec![3, 1], false),
        (vec![2, 2], true),
        (vec![2, 1, 1], false),
        (vec![1, 1, 1, 1], false),
    ]
    .into_iter()
    .collect();
    assert_eq!(cp2.sw_numbers(realchern::manifolds::Side::M), even);
    let fixed: BTreeMap<Vec<u32>, bool> =
        [(vec![2], true), (vec![1, 1], true)].into_iter().collect();
    assert_eq!(cp2.sw_numbers(realchern::manifolds::Side::N), fixed);
    println!("criterion 08 PASS: Sq(v) = w and kappa transfer on cp1..cp8; cp2 numbers exact");
}

fn random_class(space: &Arc<SpaceModel>, rng: &mut ChaCha8Rng) -> EquivClass {
    let cap = space.degree_cap();
    let int_ring = space.integral_ring();
    let mod2 = space.mod2_ring();
    let mut integral = Poly::zero(int_ring);
    for _ in 0..5 {
        let degree = rng.gen_range(0..=cap);
        let basis = int_ring.monomial_basis(degree);
        if basis.is_empty() {
            continue;
        }
        let mono = basis[rng.gen_range(0..basis.len())].clone();
        let coeff: i32 = rng.gen_range(-4..=4);
        let term = Poly::monomial(int_ring, mono)
            .mul_ref(&Poly::constant(int_ring, BigInt::from(coeff)));
        integral = integral.add_ref(&term);
    }
    let mut class = EquivClass::sigma_tilde(space, &integral).expect("integral class");
    for _ in 0..4 {
        let k = rng.gen_range(1..=(cap / 2).max(1));
        if 2 * k > cap {
            continue;
        }
        let degree = rng.gen_range(0..=cap - 2 * k);
        let basis = mod2.monomial_basis(degree);
        if basis.is_empty() {
            continue;
        }
        let mono = basis[rng.gen_range(0..basis.len())].clone();
        let bump = Poly::monomial(mod2, mono);
        class.set_component(k, class.component(k).add_ref(&bump));
    }
    class
}

#[test]
fn criterion_09_integral_lift_is_inverse_to_forget_and_reduce() {
    let ws = catalogue();
    for (name, space) in ws.spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for trial in 0..1000 {
            let class = random_class(space, &mut rng);
            let lifted =
                EquivClass::integral_lift(space, &class.forget(), &class.reduce_equiv_mod2())
                    .expect("compatible pair lifts");
            assert_eq!(lifted, class, "{} trial {}", name, trial);
        }

        // The canonical section is the unique lift of the mod-2 section on
        // every basis monomial: it reduces to the monomial at u^0, it
        // rebuilds from its own image pair, and disturbing any torsion
        // component changes the pair.
        let int_ring = space.integral_ring();
        let mod2 = space.mod2_ring();
        let cap = space.degree_cap();
        for degree in (0..=cap).step_by(2) {
            for mono in int_ring.monomial_basis(degree) {
                let x = Poly::monomial(int_ring, mono.clone());
                let section = EquivClass::sigma_tilde(space, &x).expect("section applies");
                assert_eq!(section.forget(), x);
                let reduction = section.reduce_equiv_mod2();
                let mirrored = realchern::algebra::Monomial::from_exps(mod2, mono.exps().to_vec());
                assert_eq!(
                    reduction,
                    UPoly::term(&Poly::monomial(mod2, mirrored), 0, cap),
                    "{}: section of a monomial reduces to the monomial",
                    name
                );
                let rebuilt = EquivClass::integral_lift(space, &x, &reduction)
                    .expect("section pair lifts");
                assert_eq!(rebuilt, section);
                for k in 1..=cap / 2 {
                    for bump in mod2.monomial_basis(cap - 2 * k) {
                        let mut other = section.clone();
                        other.set_component(k, Poly::monomial(mod2, bump));
                        if other == section {
                            continue;
                        }
                        assert_ne!(
                            other.reduce_equiv_mod2(),
                            reduction,
                            "{}: distinct classes share an image pair",
                            name
                        );
                    }
                }
            }
        }
    }
    println!("criterion 09 PASS: lift o (forget, reduce) = id on 10 x 1000 random classes");
}

#[test]
fn criterion_10_corrupted_data_fails_with_exit_one() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/corrupted.defs");

    let (code, stdout) = run_cli(&["--workspace", data, "verify", "axioms"]);
    assert_eq!(code, 1, "incompatible fixed classes must fail verification");
    assert!(
        stdout.contains("bundle-compat") && stdout.contains("FAIL"),
        "compatibility failure is reported:\n{}",
        stdout
    );

    let (code, stdout) = run_cli(&["--workspace", data, "verify", "wu"]);
    assert_eq!(code, 1, "corrupted fixed total class must fail verification");
    assert!(
        stdout.contains("kappa-transfer") && stdout.contains("FAIL"),
        "transfer failure is reported:\n{}",
        stdout
    );

    let (code, _) = run_cli(&["--workspace", data, "chern", "hopf", "1"]);
    assert_eq!(code, 1, "restriction route disagreement must fail");

    println!("criterion 10 PASS: corrupted compatibility and fixed classes exit 1");
}
