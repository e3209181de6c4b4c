//! Acceptance criteria, one report line each. Exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use lcakit::arith::{Int, Rat};
use lcakit::haar::Ladder;
use lcakit::homological::ext1_count;
use lcakit::nenashev::{haar_image, haar_relation_sides, relation_from_3x3, replay, swindle_file, Computed, DiagramFile};
use lcakit::{
    build_m_alpha, check_det_square, check_exact, check_modulus_multiplicativity, cyclic_cohomology, modulus,
    product_formula_check, splits_algebraically, ExactSequenceSpec, ExactVerdict, FgAbelian, LcaMorphism,
    LcaObject, PositiveRational,
};
use num_traits::{One, Signed};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn positive(x: Rat) -> PositiveRational {
    PositiveRational::new(x).expect("oracle values are positive")
}

fn criterion_1() -> Outcome {
    let mut r = rng(1);
    for _ in 0..200 {
        let a = nonzero_rational(&mut r, 1000);
        let real = modulus(&LcaMorphism::scalar(&LcaObject::real(1), &a).unwrap()).map_err(|e| e.to_string())?;
        ensure(real == positive(a.abs()), || format!("R, alpha = {a}: got {real}"))?;
        for p in PRIMES {
            let got = modulus(&LcaMorphism::scalar(&LcaObject::qp(p, 1), &a).unwrap()).map_err(|e| e.to_string())?;
            ensure(got == positive(p_abs(&a, p)), || format!("Qp({p}), alpha = {a}: got {got}"))?;
        }
    }
    let (mut compact, mut discrete) = (0, 0);
    while compact < 200 || discrete < 200 {
        let g = random_object(&mut r);
        let pr = g.predicates();
        if !(pr.is_compact || pr.is_discrete) || g.is_zero() {
            continue;
        }
        compact += usize::from(pr.is_compact);
        discrete += usize::from(pr.is_discrete);
        let f = random_automorphism(&mut r, &g, true).f;
        let m = modulus(&f).map_err(|e| format!("{f}: {e}"))?;
        ensure(m.is_one(), || format!("{f}: modulus {m}"))?;
    }
    Ok(format!("800 scalar moduli, {compact} compact and {discrete} discrete automorphisms"))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    for _ in 0..1000 {
        let x = nonzero_rational(&mut r, 1_000_000);
        ensure(product_formula_check(&x), || format!("fails at {x}"))?;
    }
    let primes: Vec<u64> = (2..=100u64).filter(|n| (2..*n).all(|d| n % d != 0)).collect();
    for &p in &primes {
        ensure(product_formula_check(&q(p as i64, 1)), || format!("fails at prime {p}"))?;
    }
    Ok(format!("1000 random rationals and {} primes", primes.len()))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    for _ in 0..1000 {
        let g = random_object(&mut r);
        let d = g.dual();
        ensure(d.dual() == g, || format!("dual(dual({g})) = {}", d.dual()))?;
        let (pg, pd) = (g.predicates(), d.predicates());
        ensure(pd.is_nss == pg.is_compactly_generated && pd.is_compactly_generated == pg.is_nss, || {
            format!("cg/nss exchange fails on {g}")
        })?;
        ensure(pd.is_compact == pg.is_discrete && pd.is_discrete == pg.is_compact, || {
            format!("compact/discrete exchange fails on {g}")
        })?;
    }
    Ok("1000 random objects".into())
}

fn seq(a: &str, b: &str) -> ExactSequenceSpec {
    ExactSequenceSpec::new(a.parse().unwrap(), b.parse().unwrap())
}

/// `Z ↪ R ↠ T` with entries `(a, b)`: exact iff both are `±1`.
fn real_line(a: &Rat, b: &Rat) -> ExactSequenceSpec {
    seq(&format!("[Z -> R] {{ (Z,R): {a} }}"), &format!("[R -> T] {{ (R,T): {b} }}"))
}

fn criterion_4() -> Outcome {
    let mut fixtures = vec![real_line(&q(1, 1), &q(1, 1))];
    for p in PRIMES {
        fixtures.push(seq(&format!("[Zp({p}) -> Qp({p})] {{ (Zp,Qp): 1 }}"), &format!("[Qp({p}) -> Pr({p})] {{ (Qp,Pr): 1 }}")));
    }
    for m in 1..=20 {
        let quot = if m == 1 { "0".to_string() } else { format!("Z/{m}") };
        let epic = if m == 1 { "[Z -> 0] {}".to_string() } else { format!("[Z -> {quot}] {{ (Z,F): 1 }}") };
        fixtures.push(seq(&format!("[Z -> Z] {{ (Z,Z): {m} }}"), &epic));
    }
    for s in &fixtures {
        let v = check_exact(s).map_err(|e| e.to_string())?;
        ensure(v == ExactVerdict::Exact, || format!("{} >-> {} ->> {}: {v}", s.sub, s.mid, s.quot))?;
    }
    let mut r = rng(4);
    let mut mutants = 0;
    while mutants < 50 {
        let (s, oracle_exact) = match r.gen_range(0..3) {
            0 => {
                let c = q(r.gen_range(-6..=6), r.gen_range(1..=3));
                let monic_side = r.gen_bool(0.5);
                if c == q(0, 1) {
                    continue;
                }
                let s = if monic_side { real_line(&c, &q(1, 1)) } else { real_line(&q(1, 1), &c) };
                (s, c.abs().is_one())
            }
            1 => {
                let p = PRIMES[r.gen_range(0..PRIMES.len())];
                let c = nonzero_rational(&mut r, 50);
                let monic_side = r.gen_bool(0.5);
                let (a, b) = if monic_side { (c.clone(), q(1, 1)) } else { (q(1, 1), c.clone()) };
                let s = seq(
                    &format!("[Zp({p}) -> Qp({p})] {{ (Zp,Qp): {a} }}"),
                    &format!("[Qp({p}) -> Pr({p})] {{ (Qp,Pr): {b} }}"),
                );
                (s, p_abs(&c, p).is_one())
            }
            _ => {
                let m = r.gen_range(2..=20i64);
                if r.gen_bool(0.5) {
                    let m2 = m + r.gen_range(-3..=3);
                    if m2 == 0 {
                        continue;
                    }
                    let s = seq(&format!("[Z -> Z] {{ (Z,Z): {m2} }}"), &format!("[Z -> Z/{m}] {{ (Z,F): 1 }}"));
                    (s, m2.abs() == m)
                } else {
                    let u = r.gen_range(0..m);
                    let s = seq(&format!("[Z -> Z] {{ (Z,Z): {m} }}"), &format!("[Z -> Z/{m}] {{ (Z,F): {u} }}"));
                    (s, num_integer::gcd(u, m) == 1)
                }
            }
        };
        if oracle_exact {
            continue;
        }
        mutants += 1;
        let v = check_exact(&s).map_err(|e| e.to_string())?;
        ensure(v == ExactVerdict::NotExact, || format!("mutant {} / {}: {v}", s.monic, s.epic))?;
    }
    Ok(format!("{} fixtures exact, {mutants} mutants not exact", fixtures.len()))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    for _ in 0..100 {
        let l = random_ladder(&mut r);
        let ladder = Ladder { seq: l.seq, f: l.f, g: l.g, h: l.h };
        let ok = check_modulus_multiplicativity(&ladder).map_err(|e| format!("{}: {e}", ladder.g))?;
        ensure(ok, || format!("multiplicativity fails for g = {}", ladder.g))?;
    }
    for _ in 0..100 {
        let (i, j) = random_filtration(&mut r);
        let ok = check_det_square(i.source(), i.target(), j.target(), (&i, &j)).map_err(|e| format!("{i} / {j}: {e}"))?;
        ensure(ok, || format!("square fails for {i} / {j}"))?;
    }
    Ok("100 ladders and 100 filtrations".into())
}

fn closed_form(n: usize, k: usize) -> FgAbelian {
    match k {
        0 => FgAbelian::free(1),
        k if k % 2 == 1 => FgAbelian::zero(),
        _ => FgAbelian::cyclic(&Int::from(n)),
    }
}

fn criterion_6() -> Outcome {
    for n in 2..=12 {
        for k in 0..=10 {
            let h = cyclic_cohomology(n, k).map_err(|e| e.to_string())?;
            ensure(h == closed_form(n, k), || format!("H^{k}(C_{n}) = {h}"))?;
        }
    }
    for n in 2..=8 {
        let c = ext1_count(n).map_err(|e| e.to_string())?;
        ensure(c == Int::from(n), || format!("n = {n}: {c} classes"))?;
    }
    Ok("H^k(C_n) for n <= 12, k <= 10; Ext1 classes for n <= 8".into())
}

fn criterion_7() -> Outcome {
    let mut cases = 0;
    for n in 2..=8i64 {
        for alpha in -n..2 * n {
            let e = build_m_alpha(n as usize, &Int::from(alpha)).map_err(|e| e.to_string())?;
            let splits = splits_algebraically(&e);
            ensure(splits == (alpha % n == 0), || format!("n = {n}, alpha = {alpha}: splits = {splits}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} pairs (n, alpha)"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    for _ in 0..20 {
        let phi = random_gl2(&mut r);
        let file: DiagramFile = swindle_file(&phi).parse().map_err(|e: lcakit::LcaError| e.to_string())?;
        let (rels, targets) = replay(&file).map_err(|e| format!("{phi:?}: {e}"))?;
        let lattice: Vec<_> = rels.iter().map(|r| r.relation.clone()).collect();
        let (_, expr, red) = &targets[0];
        ensure(!expr.is_zero(), || format!("{phi:?}: the class of X_R is already trivial"))?;
        ensure(red.is_zero(), || format!("{phi:?}: reduces to {}", red.normal_form))?;
        ensure(red.verify(expr, &lattice), || format!("{phi:?}: certificate does not verify"))?;
    }
    Ok("20 automorphisms of the regular Z[C2] lattice".into())
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut store = Vec::new();
    for _ in 0..20 {
        let file: DiagramFile = swindle_file(&random_gl2(&mut r)).parse().unwrap();
        store.extend(file.all_computed_relations().map_err(|e| e.to_string())?);
    }
    for _ in 0..60 {
        let d = ladder_diagram(&random_ladder(&mut r));
        store.push(relation_from_3x3(&Computed, &d).map_err(|e| e.to_string())?);
        store.push(relation_from_3x3(&Computed, &transpose(&d)).map_err(|e| e.to_string())?);
    }
    let mut nontrivial = 0;
    for rel in &store {
        let (rows, cols) = haar_relation_sides(rel).map_err(|e| e.to_string())?;
        ensure(rows == cols, || format!("{} = {} fails: {rows} vs {cols}", rel.lhs, rel.rhs))?;
        let moved = rel.diagram.rows.iter().chain(&rel.diagram.cols).map(haar_image).collect::<Result<Vec<_>, _>>();
        nontrivial += usize::from(moved.map_err(|e| e.to_string())?.iter().any(|m| !m.is_one()));
    }
    Ok(format!("{} relations, {nontrivial} involving a generator with nontrivial image", store.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("modulus table", criterion_1),
        ("product formula", criterion_2),
        ("duality", criterion_3),
        ("exactness fixtures", criterion_4),
        ("determinant functor axioms", criterion_5),
        ("cyclic cohomology", criterion_6),
        ("M_alpha splitting", criterion_7),
        ("swindle replay", criterion_8),
        ("Haar image of relations", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail}; {ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
