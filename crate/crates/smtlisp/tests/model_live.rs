mod common;

use common::{cvc5, p, z3};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use smtlisp::core::model::HostValue;
use smtlisp::core::sexpr::{parse_one, SExpr};
use smtlisp::Session;

fn int(n: i64) -> HostValue {
    HostValue::Int(BigInt::from(n))
}

#[test]
fn sqrt_two_is_approximate() {
    let mut s = z3();
    s.assert_str("(x :real)", "(and (= (* x x) 2) (> x 0))").unwrap();
    assert!(s.check_sat().unwrap().is_sat());
    let model = s.model().unwrap();
    let v = model.get("x").unwrap();
    assert!(v.is_approximate());
    let HostValue::Approx(r) = v else { panic!("{v:?}") };
    assert!((r * r - 2.0).abs() < 1e-9);
}

#[test]
fn exact_rationals_stay_exact() {
    let mut s = z3();
    s.assert_str("(x :real)", "(= (* 3 x) 1)").unwrap();
    assert!(s.check_sat().unwrap().is_sat());
    let v = s.eval(&p("x")).unwrap();
    assert!(!v.is_approximate());
    assert_eq!(v.to_sexpr().to_string(), "1/3");
}

fn function_workload(s: &mut Session) {
    s.declare(&p("(f (:fn (:int :int) :int))")).unwrap();
    for (a, b, v) in [(1, 2, 10), (3, 4, 7), (0, 0, 5)] {
        s.assert_term(None, &p(&format!("(= (f {a} {b}) {v})"))).unwrap();
    }
    s.assert_str("", "(> (f 5 5) 100)").unwrap();
    assert!(s.check_sat().unwrap().is_sat());
}

fn check_table_agrees(s: &mut Session) {
    let model = s.model().unwrap();
    let HostValue::Function(table) = model.get("f").unwrap() else { panic!() };
    for (args, v) in [((1, 2), 10), ((3, 4), 7), ((0, 0), 5)] {
        assert_eq!(table.apply(&[int(args.0), int(args.1)]), &int(v));
    }
    let mut rng = StdRng::seed_from_u64(7);
    let mut probes: Vec<(i64, i64)> =
        table.entries.iter().map(|(k, _)| (k[0].as_i64().unwrap(), k[1].as_i64().unwrap())).collect();
    probes.extend((0..3).map(|_| (rng.random_range(-50..50), rng.random_range(-50..50))));
    let forms: Vec<SExpr> = probes.iter().map(|(a, b)| p(&format!("(f {a} {b})"))).collect();
    let values = s.eval_all(&forms).unwrap();
    for ((a, b), v) in probes.iter().zip(values) {
        assert_eq!(table.apply(&[int(*a), int(*b)]), &v, "f({a}, {b})");
    }
}

#[test]
fn function_tables_on_z3() {
    let mut s = z3();
    function_workload(&mut s);
    check_table_agrees(&mut s);
}

#[test]
fn function_tables_on_cvc5() {
    let Some(mut s) = cvc5() else { return };
    function_workload(&mut s);
    check_table_agrees(&mut s);
}

#[test]
fn single_argument_rendering() {
    let mut s = z3();
    s.assert_str("(f (:fn (:int) :int))", "(and (= (f 1) 10) (= (f 2) 0) (= (f 3) 0))").unwrap();
    assert!(s.check_sat().unwrap().is_sat());
    let model = s.model().unwrap();
    let HostValue::Function(table) = model.get("f").unwrap() else { panic!() };
    assert_eq!(table.apply(&[int(1)]), &int(10));
    assert_eq!(table.apply(&[int(2)]), &int(0));
    let text = s.model_as_assignment().unwrap().to_string();
    assert!(text.starts_with("((f (") && text.contains("((1) 10)") && text.ends_with("(:default 0))))"), "{text}");
}

#[test]
fn decode_and_eval_agree() {
    for mut s in std::iter::once(z3()).chain(cvc5()) {
        s.assert_str(
            "(b :bool i :int r :real t :string v (:bv 8) q (:seq :int))",
            "(and b (< i (- 3)) (= (* 2 r) 3) (= t \"h\u{e9}llo\") (= v #x2a) (= (seq.len q) 2) (= (seq.at q 0) (seq.unit 4)))",
        )
        .unwrap();
        assert!(s.check_sat().unwrap().is_sat());
        let model = s.model().unwrap();
        for name in ["b", "i", "r", "t", "v", "q"] {
            let decoded = model.get(name).unwrap_or_else(|| panic!("{name} missing"));
            assert_eq!(&s.eval(&SExpr::sym(name)).unwrap(), decoded, "{name}");
        }
        assert_eq!(model.get("t"), Some(&HostValue::Text("h\u{e9}llo".into())));
        assert_eq!(model.get("r").unwrap().to_sexpr().to_string(), "1.5");
        let HostValue::Sequence(q) = model.get("q").unwrap() else { panic!() };
        assert_eq!(q[0], int(4));
        assert_eq!(q.len(), 2);
        s.close();
    }
}

#[test]
fn datatypes_round_trip() {
    let mut s = z3();
    let labels: Vec<SExpr> = (1..=9).map(SExpr::int).collect();
    s.register_enum(":square", &labels).unwrap();
    s.register_tuple(":person", &[("age".into(), p(":int")), ("name".into(), p(":string"))]).unwrap();
    s.assert_str("(c :square d :square who :person)", "(and (= c 5) (distinct c d) (= d (ite true 2 3)))").unwrap();
    s.assert_str("", "(and (= (PERSON.age who) 4) (= (PERSON.name who) \"bob\"))").unwrap();
    assert!(s.check_sat().unwrap().is_sat());
    let model = s.model().unwrap();
    assert_eq!(model.get("c"), Some(&HostValue::EnumMember { sort: "SQUARE".into(), label: SExpr::int(5) }));
    assert_eq!(model.get("d"), Some(&HostValue::EnumMember { sort: "SQUARE".into(), label: SExpr::int(2) }));
    assert_eq!(model.get("who").unwrap().to_sexpr().to_string(), "(PERSON (age 4) (name \"bob\"))");
}

#[test]
fn captured_model_text_reparses() {
    let mut s = z3();
    s.assert_str("(x :bool y :int f (:fn (:int) :int) t :string)", "(and x (>= y 5) (= (f y) 3) (= t \"a\"\"b\"))")
        .unwrap();
    assert!(s.check_sat().unwrap().is_sat());
    let raw = s.get_model().unwrap();
    let text = s.last_response_text().unwrap();
    let reparsed = parse_one(&text).unwrap();
    assert_eq!(reparsed, raw);
    assert_eq!(parse_one(&reparsed.to_string()).unwrap(), reparsed);
}
