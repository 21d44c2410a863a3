use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use smtlisp_core::model::{decode_model, HostValue};
use smtlisp_core::scope::EnvStack;
use smtlisp_core::sexpr::{parse, parse_one, SExpr};
use smtlisp_core::sort::SortRegistry;

fn atom() -> impl Strategy<Value = SExpr> {
    prop_oneof![
        "[a-zA-Z0-9~!@$%^&*_+=<>.?/: ();\"\u{e9}\u{2603}-]{0,8}".prop_map(SExpr::Symbol),
        any::<i128>().prop_map(|n| SExpr::Int(BigInt::from(n))),
        (any::<i64>(), 1u64..1_000_000).prop_map(|(n, d)| SExpr::rational(n, d).unwrap()),
        "[0-9]{1,6}\\.[0-9]{1,6}".prop_map(|t| SExpr::decimal(t).unwrap()),
        any::<String>().prop_map(SExpr::String),
        (1u32..=80, any::<u128>()).prop_map(|(w, v)| {
            let value = BigUint::from(v) % (BigUint::from(1u8) << w);
            SExpr::bitvec(w, value).unwrap()
        }),
    ]
}

fn sexpr() -> impl Strategy<Value = SExpr> {
    atom().prop_recursive(4, 64, 6, |inner| prop::collection::vec(inner, 0..6).prop_map(SExpr::List))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(e in sexpr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_one(&text).unwrap(), e);
    }

    #[test]
    fn several_forms_in_one_text(forms in prop::collection::vec(sexpr(), 0..5)) {
        let text: Vec<String> = forms.iter().map(ToString::to_string).collect();
        prop_assert_eq!(parse(&text.join("\n")).unwrap(), forms);
    }
}

const Z3_MODEL: &str = include_str!("fixtures/z3_model.smt2");

#[test]
fn captured_z3_model_reparses() {
    let raw = parse_one(Z3_MODEL).unwrap();
    let printed = raw.to_string();
    let again = parse_one(&printed).unwrap();
    assert_eq!(again, raw);
    assert_eq!(again.to_string(), printed);
}

#[test]
fn captured_z3_model_decodes() {
    let mut reg = SortRegistry::new();
    reg.register_enum(":square", &[SExpr::int(1), SExpr::int(2), SExpr::int(3)]).unwrap();
    reg.register_tuple(
        ":person",
        &[("age".into(), parse_one(":int").unwrap()), ("name".into(), parse_one(":string").unwrap())],
    )
    .unwrap();
    let mut env = EnvStack::new();
    let specs =
        "(x :bool y :int r :real t :string q (:seq :int) v (:bv 8) c :square who :person f (:fn (:int :int) :int))";
    env.merge_inline_specifiers(&parse_one(specs).unwrap(), &reg).unwrap();
    let model = decode_model(&parse_one(Z3_MODEL).unwrap(), &reg, &env).unwrap();
    assert_eq!(
        model.render_assignment().to_string(),
        "((x true) (y 5) (r 1.4142135623730951) (t \"a\"\"b\u{2603}\") (q (1 2)) (v #b00011111) (c 3) \
         (who (PERSON (age 4) (name \"\"))) (f (((3 4) 7) (:default 10))))"
    );
    assert!(model.get("r").is_some_and(HostValue::is_approximate));
}
