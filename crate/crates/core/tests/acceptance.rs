//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ekl_core::ekl::{compose_maps, ekl_degree, EklResult, MapSpec};
use ekl_core::gw::{gw_equal, gw_product, gw_sum, hilbert_symbol, GWClass, Place};
use ekl_core::quotmap::{build_d_odd_partial, build_sn_full, build_type_a_partial, build_type_bc_full, QuotientSpec};
use ekl_core::scalar::{factor_with_bound, BaseField, PrimeField, Rational, Rationals, SquareClass, DEFAULT_FACTOR_BOUND};
use ekl_core::weyl::{
    ap_formula_type_a, ap_report, compute_ap_enumerated, enumeration_budget, CartanType, ParabolicSpec, RootSystem,
};

type Outcome = Result<String, String>;

const Q: BaseField = BaseField::Rationals;

struct Suite {
    failures: usize,
    jacobian_checks: Vec<(String, bool)>,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, limit: Duration, body: impl FnOnce(&mut Self) -> Outcome) {
        let start = Instant::now();
        let outcome = body(self);
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {id} {title}: {detail} ({elapsed:.2?})"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {id} {title}: {detail} ({elapsed:.2?})");
            }
        }
    }

    fn degree(&mut self, q: &QuotientSpec<Rationals>) -> Result<EklResult<Rationals>, String> {
        let r = ekl_degree(q.map()).map_err(|e| format!("{}: {e}", q.family()))?;
        self.jacobian_checks.push((q.family().to_string(), r.socle.jacobian_relation(&Rationals) == Some(true)));
        Ok(r)
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(a: &GWClass, b: &GWClass) -> bool {
    gw_equal(a, b).unwrap_or(false)
}

fn type_a_case(s: &mut Suite, blocks: &[usize], plus: usize, minus: usize) -> Outcome {
    let q = build_type_a_partial(&Rationals, blocks).map_err(|e| e.to_string())?;
    let r = s.degree(&q)?;
    let want = GWClass::units(Q, plus, minus);
    ensure(r.dimension() as u64 == q.expected_degree(), || format!("{blocks:?}: dimension {}", r.dimension()))?;
    ensure(same(&r.gw_class, &want), || format!("{blocks:?}: got {}, want {want}", r.gw_class))?;
    ensure(q.expected_gw().matches(&r.gw_class).is_some(), || format!("{blocks:?}: prediction mismatch"))?;
    Ok(format!("{blocks:?} -> {}", r.gw_class))
}

fn maximal_parabolics(t: CartanType) -> impl Iterator<Item = ParabolicSpec> {
    (1..=t.rank).map(move |v| ParabolicSpec::remove(t.rank, [v]).expect("valid node"))
}

fn ty(s: &str) -> CartanType {
    s.parse().expect("valid type")
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn parse_map(vars: &[&str], comps: &[String]) -> MapSpec<Rationals> {
    let comps: Vec<&str> = comps.iter().map(String::as_str).collect();
    MapSpec::parse(Rationals, vars, &comps).expect("generated map parses")
}

fn nonzero(rng: &mut ChaCha8Rng) -> i64 {
    [1, -1, 2, -3, 5][rng.gen_range(0..5)]
}

/// A unimodular linear map after a triangular one; the origin is the only zero.
fn random_two_var(rng: &mut ChaCha8Rng) -> MapSpec<Rationals> {
    let (a, b) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let (c1, c2) = (nonzero(rng), nonzero(rng));
    let (c3, c4): (i64, i64) = (rng.gen_range(-1..=1), rng.gen_range(-1..=1));
    let t = parse_map(&["x", "y"], &[format!("({c1})*x^{a}"), format!("({c2})*y^{b} + ({c3})*x + ({c4})*x*y")]);
    let l = loop {
        let v: Vec<i64> = (0..4).map(|_| rng.gen_range(-1..=1)).collect();
        if (v[0] * v[3] - v[1] * v[2]).abs() == 1 {
            break v;
        }
    };
    let lin = parse_map(
        &["x", "y"],
        &[format!("({})*x + ({})*y", l[0], l[1]), format!("({})*x + ({})*y", l[2], l[3])],
    );
    compose_maps(&lin, &t).expect("same ring")
}

fn random_one_var(rng: &mut ChaCha8Rng) -> MapSpec<Rationals> {
    let (a, c) = (rng.gen_range(1..=3), nonzero(rng));
    parse_map(&["x"], &[format!("({c})*x^{a}")])
}

fn class(f: &MapSpec<Rationals>) -> Result<GWClass, String> {
    ekl_degree(f).map(|r| r.gw_class).map_err(|e| format!("{e} for {:?}", f.to_file().components))
}

fn places_of(r: &Rational, into: &mut BTreeSet<u64>) {
    for n in [r.numer(), r.denom()] {
        let n: BigUint = n.magnitude().clone();
        let factors = factor_with_bound(&n, DEFAULT_FACTOR_BOUND).expect("small integers factor");
        into.extend(factors.into_iter().map(|(p, _)| p));
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = loop {
        let v = rng.gen_range(-2000..=2000);
        if v != 0 {
            break v;
        }
    };
    Rational::new(num, rng.gen_range(1..=60)).expect("nonzero denominator")
}

fn main() {
    let mut s = Suite { failures: 0, jacobian_checks: Vec::new() };
    let minute = Duration::from_secs(60);

    s.run("1", "S2 quotient (x+y, xy)", Duration::from_secs(1), |s| {
        let q = build_type_a_partial(&Rationals, &[1, 1]).map_err(|e| e.to_string())?;
        let r = s.degree(&q)?;
        ensure(same(&r.gw_class, &GWClass::hyperbolic(Q)), || format!("got {}", r.gw_class))?;
        Ok(format!("{}", r.gw_class))
    });

    s.run("2", "full symmetric quotients n = 3, 4", minute, |s| {
        let mut out = Vec::new();
        for (n, h) in [(3, 3), (4, 12)] {
            let q = build_sn_full(&Rationals, n).map_err(|e| e.to_string())?;
            let r = s.degree(&q)?;
            ensure(r.dimension() == 2 * h, || format!("n = {n}: dimension {}", r.dimension()))?;
            ensure(same(&r.gw_class, &GWClass::units(Q, h, h)), || format!("n = {n}: got {}", r.gw_class))?;
            out.push(format!("n = {n} -> {}", r.gw_class));
        }
        Ok(out.join("; "))
    });

    let five_min = Duration::from_secs(300);
    for (id, blocks, plus, minus) in
        [("3a", vec![2, 2], 4, 2), ("3b", vec![2, 1], 2, 1), ("3c", vec![3, 1], 2, 2), ("3d", vec![2, 2, 1], 16, 14)]
    {
        s.run(id, "type A partial quotient", five_min, |s| type_a_case(s, &blocks, plus, minus));
    }

    s.run("4", "B2 full quotient (x^2+y^2, x^2y^2)", Duration::from_secs(10), |s| {
        let q = build_type_bc_full(&Rationals, 2).map_err(|e| e.to_string())?;
        let r = s.degree(&q)?;
        ensure(same(&r.gw_class, &GWClass::units(Q, 4, 4)), || format!("got {}", r.gw_class))?;
        Ok(format!("{}", r.gw_class))
    });

    s.run("5", "D5/D4 quotient shape", Duration::from_secs(600), |s| {
        let q = build_d_odd_partial(&Rationals, 2).map_err(|e| e.to_string())?;
        let r = s.degree(&q)?;
        let c = &r.gw_class;
        ensure(c.rank == 10, || format!("rank {}", c.rank))?;
        ensure(c.discriminant == SquareClass::one(), || format!("discriminant {}", c.discriminant))?;
        ensure(c.signature.map(i64::abs) == Some(2), || format!("signature {:?}", c.signature))?;
        let alpha = q.expected_gw().matches(c).ok_or_else(|| format!("{c} is not 4H + 2<alpha>"))?;
        Ok(format!("{c}; alpha = {alpha}, signature {}", c.signature.unwrap_or(0)))
    });

    s.run("6a", "E6 maximal parabolics by enumeration", Duration::from_secs(120), |_| {
        let rs = RootSystem::new(ty("E6")).map_err(|e| e.to_string())?;
        let want = [3, 0, 0, 0, 0, 3];
        let mut got = Vec::new();
        for (p, w) in maximal_parabolics(ty("E6")).zip(want) {
            let a = compute_ap_enumerated(&rs, &p, enumeration_budget(), true).map_err(|e| e.to_string())?;
            ensure(a == w, || format!("remove {:?}: a_P = {a}, want {w}", p))?;
            got.push(a);
        }
        let p = ParabolicSpec::remove(6, [1, 6]).map_err(|e| e.to_string())?;
        let a = compute_ap_enumerated(&rs, &p, enumeration_budget(), true).map_err(|e| e.to_string())?;
        ensure(a == 6, || format!("remove 1,6: a_P = {a}"))?;
        Ok(format!("maximal {got:?}, remove 1,6 -> {a}"))
    });

    s.run("6b", "D5 > D4 and D7 > D6 by enumeration", five_min, |_| {
        let mut out = Vec::new();
        for t in ["D5", "D7"] {
            let t = ty(t);
            let rs = RootSystem::new(t).map_err(|e| e.to_string())?;
            let p = ParabolicSpec::remove(t.rank, [t.rank]).map_err(|e| e.to_string())?;
            let rep = ap_report(&rs, &p, enumeration_budget(), true).map_err(|e| e.to_string())?;
            ensure(!rep.shortcut && rep.a_p == 2, || format!("{t}: a_P = {}", rep.a_p))?;
            out.push(format!("{t} -> {}", rep.a_p));
        }
        Ok(out.join(", "))
    });

    s.run("6c", "central shortcut with enumeration cross-check", five_min, |_| {
        let shortcut_types = ["B2", "B3", "B4", "B5", "C3", "C4", "C5", "D4", "D6", "D8", "F4", "G2", "E7", "E8"];
        let enumerated = ["B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2"];
        let mut count = 0;
        for name in shortcut_types {
            let rs = RootSystem::new(ty(name)).map_err(|e| e.to_string())?;
            for p in maximal_parabolics(ty(name)) {
                let rep = ap_report(&rs, &p, enumeration_budget(), false).map_err(|e| e.to_string())?;
                ensure(rep.shortcut && rep.a_p == 0, || format!("{name} {:?}: {rep}", p.kept_nodes()))?;
                if enumerated.contains(&name) {
                    let a = compute_ap_enumerated(&rs, &p, enumeration_budget(), false).map_err(|e| e.to_string())?;
                    ensure(a == 0, || format!("{name} {:?}: enumerated a_P = {a}", p.kept_nodes()))?;
                    count += 1;
                }
            }
        }
        Ok(format!("{} types by shortcut, {count} parabolics cross-checked", shortcut_types.len()))
    });

    s.run("7", "type A formula equals enumeration", minute, |_| {
        let mut cases = 0;
        for n in 2..=6 {
            for blocks in compositions(n).into_iter().filter(|b| b.len() >= 2) {
                let (t, p) = ParabolicSpec::type_a_blocks(&blocks).map_err(|e| e.to_string())?;
                let rs = RootSystem::new(t).map_err(|e| e.to_string())?;
                let a = compute_ap_enumerated(&rs, &p, enumeration_budget(), false).map_err(|e| e.to_string())?;
                let f = ap_formula_type_a(&blocks);
                ensure(a as u64 == f, || format!("{blocks:?}: formula {f}, enumeration {a}"))?;
                cases += 1;
            }
        }
        Ok(format!("{cases} proper compositions of n = 2..6 agree"))
    });

    s.run("8a", "J = dim * E on every quotient map", minute, |s| {
        let bad: Vec<&String> = s.jacobian_checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
        ensure(!s.jacobian_checks.is_empty(), || "no quotient maps computed".into())?;
        ensure(bad.is_empty(), || format!("fails for {bad:?}"))?;
        Ok(format!("{} maps", s.jacobian_checks.len()))
    });

    s.run("8b", "multiplicativity under composition", Duration::from_secs(120), |_| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x8b);
        let mut maps = 0;
        for i in 0..100 {
            let (f, g) = if i % 2 == 0 {
                (random_two_var(&mut rng), random_two_var(&mut rng))
            } else {
                (random_one_var(&mut rng), random_one_var(&mut rng))
            };
            let fg = compose_maps(&f, &g).map_err(|e| e.to_string())?;
            let want = gw_product(&class(&f)?, &class(&g)?).map_err(|e| e.to_string())?;
            let got = class(&fg)?;
            ensure(same(&got, &want), || format!("{:?}: {got} vs {want}", fg.to_file().components))?;
            maps += 3;
        }
        Ok(format!("100 pairs, {maps} maps"))
    });

    s.run("8c", "unipotent invariance", Duration::from_secs(120), |_| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x8c);
        for _ in 0..20 {
            let (f, g) = (random_two_var(&mut rng), random_two_var(&mut rng));
            let t: i64 = loop {
                let v = rng.gen_range(-4..=4);
                if v != 0 {
                    break v;
                }
            };
            let l = parse_map(&["x", "y"], &[format!("x + ({t})*y"), "y".to_string()]);
            let with = compose_maps(&compose_maps(&f, &l).map_err(|e| e.to_string())?, &g).map_err(|e| e.to_string())?;
            let without = compose_maps(&f, &g).map_err(|e| e.to_string())?;
            let (a, b) = (class(&with)?, class(&without)?);
            ensure(same(&a, &b), || format!("{a} vs {b}"))?;
        }
        Ok("20 triples".into())
    });

    s.run("8d", "Hilbert reciprocity", Duration::from_secs(120), |_| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x8d);
        for _ in 0..200 {
            let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
            let mut primes = BTreeSet::from([2]);
            places_of(&a, &mut primes);
            places_of(&b, &mut primes);
            let mut product = hilbert_symbol(&a, &b, Place::Infinity).map_err(|e| e.to_string())?;
            for p in primes {
                product *= hilbert_symbol(&a, &b, Place::Prime(p)).map_err(|e| e.to_string())?;
            }
            ensure(product == 1, || format!("({a}, {b}): product {product}"))?;
        }
        Ok("200 pairs".into())
    });

    s.run("8e", "hyperbolic absorption", Duration::from_secs(120), |_| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x8e);
        let h = GWClass::hyperbolic(Q);
        for _ in 0..100 {
            let a = SquareClass::of_integer(rng.gen_range(1..=5000) * if rng.gen_bool(0.5) { 1 } else { -1 })
                .map_err(|e| e.to_string())?;
            let one = GWClass::from_diagonal(Q, vec![a.clone()]).map_err(|e| e.to_string())?;
            let pair = GWClass::from_diagonal(Q, vec![a.clone(), a.negate()]).map_err(|e| e.to_string())?;
            ensure(same(&pair, &h), || format!("<{a}> + <-{a}> is not H"))?;
            let prod = gw_product(&one, &h).map_err(|e| e.to_string())?;
            ensure(same(&prod, &h), || format!("<{a}> * H is not H"))?;
            let sum = gw_sum(&one, &h).map_err(|e| e.to_string())?;
            ensure(
                same(&sum, &GWClass::from_diagonal(Q, vec![a.clone(), a.clone(), a.negate()]).map_err(|e| e.to_string())?),
                || format!("<{a}> + H"),
            )?;
        }
        Ok("100 square classes".into())
    });

    s.run("9", "blocks (2,2) over F5", Duration::from_secs(30), |_| {
        let f5 = PrimeField::new(5).map_err(|e| e.to_string())?;
        let q = build_type_a_partial(&f5, &[2, 2]).map_err(|e| e.to_string())?;
        let r = ekl_degree(q.map()).map_err(|e| e.to_string())?;
        ensure(r.gram.size() == 6 && r.gw_class.rank == 6, || format!("rank {}", r.gw_class.rank))?;
        Ok(format!("rank 6, nondegenerate, {}", r.gw_class))
    });

    if s.failures > 0 {
        println!("{} criteria failed", s.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
