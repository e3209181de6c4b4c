//! Named scenarios replaying worked examples, each a list of expected/got checks.

use std::fmt;
use std::thread;

use lcakit::arith::{int, rat, Rat};
use lcakit::haar::Ladder;
use lcakit::homological::{ext1_count, dihedral_h2};
use lcakit::module::LcaModule;
use lcakit::nenashev::{class_of_automorphism, haar_image, haar_relation_sides, replay, swindle_file, Computed, DiagramFile};
use lcakit::{
    build_m_alpha, check_det_square, check_exact, check_modulus_multiplicativity, classify_proj_inj, compact_part,
    cyclic_cohomology, decompose_cg_discrete, det_square_factors, dses_generator, module_dual, modulus,
    product_formula_check, splits_algebraically, validate_module, validate_order, ExactSequenceSpec, Kind,
    LcaMorphism, LcaObject, Order, Result,
};

pub struct Check {
    pub name: &'static str,
    pub expected: String,
    pub got: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.got
    }
}

pub struct DemoScenario {
    pub id: &'static str,
    pub description: &'static str,
    pub script: fn() -> Vec<Check>,
}

fn check<T: fmt::Display>(name: &'static str, expected: &str, got: Result<T>) -> Check {
    let got = match got {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    };
    Check { name, expected: expected.to_string(), got }
}

fn obj(s: &str) -> LcaObject {
    s.parse().expect("scenario object")
}

fn mor(s: &str) -> LcaMorphism {
    s.parse().expect("scenario morphism")
}

fn scalar(g: &str, q: Rat) -> Result<LcaMorphism> {
    LcaMorphism::scalar(&obj(g), &q)
}

fn seq(monic: &str, epic: &str) -> ExactSequenceSpec {
    ExactSequenceSpec::new(mor(monic), mor(epic))
}

fn ladder(s: ExactSequenceSpec, q: Rat) -> Result<bool> {
    let f = LcaMorphism::scalar(&s.sub, &q)?;
    let g = LcaMorphism::scalar(&s.mid, &q)?;
    let h = LcaMorphism::scalar(&s.quot, &q)?;
    check_modulus_multiplicativity(&Ladder { seq: s, f, g, h })
}

fn real_lattice() -> ExactSequenceSpec {
    seq("[Z -> R] { (Z,R): 1 }", "[R -> T] { (R,T): 1 }")
}

fn padic_line(p: u64) -> ExactSequenceSpec {
    seq(&format!("[Zp({p}) -> Qp({p})] {{ (Zp,Qp): 1 }}"), &format!("[Qp({p}) -> Pr({p})] {{ (Qp,Pr): 1 }}"))
}

fn ex_det_a1() -> Vec<Check> {
    vec![
        check("minus-one-on-R", "1", scalar("R", rat(-1, 1)).and_then(|f| modulus(&f))),
        check("two-on-R", "2", scalar("R", rat(2, 1)).and_then(|f| modulus(&f))),
        check("minus-one-on-T", "1", scalar("T", rat(-1, 1)).and_then(|f| modulus(&f))),
        check("Z-R-T-exact", "Exact", check_exact(&real_lattice())),
        check("ladder-minus-one", "true", ladder(real_lattice(), rat(-1, 1))),
    ]
}

fn ex_det_a2() -> Vec<Check> {
    vec![
        check("Zp-Qp-Pr-exact", "Exact", check_exact(&padic_line(5))),
        check("p-on-Qp", "1/5", scalar("Qp(5)", rat(5, 1)).and_then(|f| modulus(&f))),
        check("unit-on-Zp", "1", scalar("Zp(5)", rat(6, 1)).and_then(|f| modulus(&f))),
        check("unit-on-Qp", "1", scalar("Qp(5)", rat(6, 1)).and_then(|f| modulus(&f))),
        check("ladder-one-plus-p", "true", ladder(padic_line(5), rat(6, 1))),
    ]
}

fn example_a1() -> Vec<Check> {
    let r = obj("R");
    let gen = |q: i64| {
        let f = LcaMorphism::scalar(&r, &rat(q, 1))?;
        let d = class_of_automorphism(&Computed, &r, &f)?;
        Ok::<_, lcakit::LcaError>((dses_generator(&Computed, &d)?, haar_image(&d)?))
    };
    let qp = obj("Qp(3)");
    let unit = LcaMorphism::scalar(&qp, &rat(4, 1))
        .and_then(|f| class_of_automorphism(&Computed, &qp, &f))
        .and_then(|d| haar_image(&d));
    vec![
        check("identity-is-zero", "0", gen(1).map(|(g, _)| g)),
        check("two-is-nonzero", "true", gen(2).map(|(g, _)| !g.is_zero())),
        check("two-haar-image", "2", gen(2).map(|(_, h)| h)),
        check("p-adic-unit-haar-image", "1", unit),
    ]
}

fn nenashev_lrr() -> Vec<Check> {
    let file: Result<DiagramFile> = swindle_file(&[[2, 1], [1, 1]]).parse();
    let replayed = file.as_ref().map_err(Clone::clone).and_then(replay);
    let rel = |i: usize| replayed.as_ref().map(|(r, _)| r[i].display.clone()).map_err(Clone::clone);
    let target = replayed.as_ref().map(|(rels, t)| {
        let lattice: Vec<_> = rels.iter().map(|r| r.relation.clone()).collect();
        (t[0].2.normal_form.to_string(), t[0].2.verify(&t[0].1, &lattice))
    });
    let haar = file.as_ref().map_err(Clone::clone).and_then(|f| {
        let rels = f.all_computed_relations()?;
        let mut all = true;
        for r in &rels {
            let (a, b) = haar_relation_sides(r)?;
            all &= a == b;
        }
        Ok(format!("{} relations, identities hold: {all}", rels.len()))
    });
    vec![
        check("lrr1", "t + x - xr = 0", rel(0)),
        check("lrr2", "x = 0", rel(1)),
        check("lrr3", "t = 0", rel(2)),
        check("reduce-xr", "0", target.clone().map(|t| t.0).map_err(Clone::clone)),
        check("certificate", "true", target.map(|t| t.1).map_err(Clone::clone)),
        check("haar-image", "1 relations, identities hold: true", haar),
    ]
}

fn m_alpha() -> Vec<Check> {
    let split = |n: usize, a: i64| build_m_alpha(n, &int(a)).map(|e| splits_algebraically(&e));
    let e = build_m_alpha(4, &int(1));
    vec![
        check("H2-C4", "Z/4", cyclic_cohomology(4, 2)),
        check("H2-C5", "Z/5", cyclic_cohomology(5, 2)),
        check("H3-C5", "0", cyclic_cohomology(5, 3)),
        check("sub", "R^3 + T", e.as_ref().map(|e| e.sub_shape()).map_err(Clone::clone)),
        check("middle", "R^3 + Z + T", e.as_ref().map(|e| e.mid_shape()).map_err(Clone::clone)),
        check("quotient", "Z", e.as_ref().map(|e| e.quot_shape()).map_err(Clone::clone)),
        check("ext1-classes", "4", ext1_count(4)),
        check("alpha-0-splits", "true", split(4, 0)),
        check("alpha-1-splits", "false", split(4, 1)),
        check("alpha-2-splits", "false", split(4, 2)),
        check("alpha-4-splits", "true", split(4, 4)),
        check("H2-D3", "Z/2", dihedral_h2(3)),
    ]
}

fn product_formula() -> Vec<Check> {
    let report = lcakit::adele::product_formula_report(&rat(6, 5)).map(|r| r.trim_end().replace('\n', "; "));
    vec![
        check("six-fifths", "|6/5|_inf = 6/5; |6/5|_2 = 1/2; |6/5|_3 = 1/3; |6/5|_5 = 5; product = 1", report),
        check("prime-97", "true", Ok(product_formula_check(&rat(97, 1)))),
        check("negative", "true", Ok(product_formula_check(&rat(-12, 35)))),
    ]
}

fn gamma3_order() -> Vec<Check> {
    let g = Order::gamma3();
    let report = validate_order(&g);
    let modules = |kind: Kind| -> Result<String> {
        let m = LcaModule::regular(&g, kind)?;
        let d = module_dual(&m);
        Ok(format!(
            "{} / {} / {}",
            validate_module(&m)?.is_none(),
            validate_module(&d)?.is_none(),
            module_dual(&d) == m
        ))
    };
    vec![
        check("valid", "true", Ok(report.is_valid())),
        check("commutative", "false", Ok(g.is_commutative())),
        check("opposite-valid", "true", Ok(validate_order(&g.opposite()).is_valid())),
        check("regular-Z", "true / true / true", modules(Kind::Z)),
        check("regular-R", "true / true / true", modules(Kind::R)),
        check("regular-Zp5", "true / true / true", modules(Kind::zp(5))),
        check("dual-numbers-semisimple", "false", Ok(validate_order(&Order::dual_numbers()).is_semisimple())),
    ]
}

fn duality() -> Vec<Check> {
    let g = obj("R^2 + Z + T + Z/4 + Zp(3)^2 + Qp(5)");
    let (p, pd) = (g.predicates(), g.dual().predicates());
    vec![
        check("dual", "R^2 + Z + T + Z/4 + Pr(3)^2 + Qp(5)", Ok(g.dual())),
        check("double-dual", "true", Ok(g.dual().dual() == g)),
        check("cg-to-nss", "true", Ok(p.is_compactly_generated == pd.is_nss)),
        check("compact-to-discrete", "true", Ok(obj("T^2 + Zp(2)").dual().predicates().is_discrete)),
    ]
}

fn decomposition() -> Vec<Check> {
    let shape = |s: ExactSequenceSpec| format!("{} >-> {} ->> {}", s.sub, s.mid, s.quot);
    let cg = decompose_cg_discrete(&obj("R + Z + Qp(2) + Zp(3)"));
    vec![
        check("cg-discrete", "R + Z + Zp(2) + Zp(3) >-> R + Z + Qp(2) + Zp(3) ->> Pr(2)", Ok(shape(cg.clone()))),
        check("cg-discrete-exact", "Exact", check_exact(&cg)),
        check("compact-part", "T + Z/6 >-> R + Z^2 + T + Z/6 ->> R + Z^2", compact_part(&obj("R + Z^2 + T + Z/6")).map(shape)),
        check(
            "not-cg",
            "error: object is not compactly generated",
            compact_part(&obj("Qp(2)")).map(shape),
        ),
    ]
}

fn projectives() -> Vec<Check> {
    let z = Order::integers();
    let triv = |s: &str| LcaModule::trivial(&z, obj(s), &[int(1)]);
    vec![
        check("R^2 + Z^3", "Projective", Ok(classify_proj_inj(&triv("R^2 + Z^3")))),
        check("R + T^2", "Injective", Ok(classify_proj_inj(&triv("R + T^2")))),
        check("R^2", "Both", Ok(classify_proj_inj(&triv("R^2")))),
        check("T + Z", "Neither", Ok(classify_proj_inj(&triv("T + Z")))),
    ]
}

fn det_square() -> Vec<Check> {
    let i = mor("[Z -> Z] { (Z,Z): 2 }");
    let j = mor("[Z -> R] { (Z,R): 1 }");
    let factors = det_square_factors(&i, &j).map(|f| f.map(|x| x.to_string()).join(", "));
    vec![
        check("factors", "2, 1/2, 1, 1", factors),
        check("square-holds", "true", check_det_square(&obj("Z"), &obj("Z"), &obj("R"), (&i, &j))),
    ]
}

static REGISTRY: &[DemoScenario] = &[
    DemoScenario { id: "ex-detA1", description: "moduli and ladders on Z >-> R ->> T", script: ex_det_a1 },
    DemoScenario { id: "ex-detA2", description: "moduli and ladders on Zp >-> Qp ->> Qp/Zp", script: ex_det_a2 },
    DemoScenario { id: "example-A1", description: "the generator of an automorphism", script: example_a1 },
    DemoScenario { id: "nenashev-lrr", description: "swindle relations kill the class of X_R", script: nenashev_lrr },
    DemoScenario { id: "m-alpha", description: "cyclic cohomology and the non-split extension", script: m_alpha },
    DemoScenario { id: "product-formula", description: "local factors of a rational multiply to 1", script: product_formula },
    DemoScenario { id: "gamma3-order", description: "the order Gamma3 and its regular modules", script: gamma3_order },
    DemoScenario { id: "duality", description: "Pontryagin duality exchanges predicates", script: duality },
    DemoScenario { id: "decomposition", description: "compactly generated and compact parts", script: decomposition },
    DemoScenario { id: "projectives", description: "projective and injective shapes", script: projectives },
    DemoScenario { id: "det-square", description: "measure factors around a filtration", script: det_square },
];

pub fn registry() -> &'static [DemoScenario] {
    REGISTRY
}

pub fn find(id: &str) -> Option<&'static DemoScenario> {
    REGISTRY.iter().find(|s| s.id == id)
}

pub struct DemoReport {
    pub results: Vec<(&'static str, Vec<Check>)>,
}

impl DemoReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|(_, cs)| cs.iter().all(Check::passed))
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut passed, mut total) = (0, 0);
        for (id, checks) in &self.results {
            for c in checks {
                total += 1;
                passed += usize::from(c.passed());
                let v = if c.passed() { "PASS" } else { "FAIL" };
                writeln!(f, "{id}/{}\t{}\t{}\t{v}", c.name, c.expected, c.got)?;
            }
        }
        writeln!(f, "# {passed}/{total} checks passed")
    }
}

/// Runs scenarios on separate threads and keeps the registry order.
pub fn run_scenarios(scenarios: &[&DemoScenario]) -> DemoReport {
    let results = thread::scope(|s| {
        let handles: Vec<_> = scenarios.iter().map(|sc| s.spawn(move || (sc.id, (sc.script)()))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario panicked")).collect()
    });
    DemoReport { results }
}
