use std::fs;
use std::path::PathBuf;

use hopf_cyclic::catalog::{cyclic_group_algebra, sweedler};
use hopf_cyclic::Scalar;
use hopf_cyclic_cli::fixtures::shipped;
use hopf_cyclic_cli::model::Model;
use hopf_cyclic_cli::spec::{parse_syntax, ItemKind, Op};
use hopf_cyclic_cli::{parse_spec, permute_bases, print_spec, SpecError};
use proptest::prelude::*;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn shipped_files_are_current() {
    for (name, text) in shipped() {
        let on_disk = fs::read_to_string(fixture_dir().join(name)).unwrap_or_default();
        assert_eq!(on_disk, text, "{name} is stale; regenerate with `hopf-cyclic fixtures --dir crates/cli/fixtures`");
    }
}

#[test]
fn shipped_files_round_trip() {
    for (name, text) in shipped() {
        let spec = parse_spec(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = print_spec(&spec);
        assert_eq!(parse_spec(&printed).unwrap(), spec, "{name}");
        assert_eq!(print_spec(&parse_spec(&printed).unwrap()), printed, "{name}");
    }
}

#[test]
fn shipped_hopf_algebras_resolve_to_the_catalog() {
    let get = |file: &str, hopf: &str| {
        let (_, text) = shipped().into_iter().find(|(n, _)| *n == file).unwrap();
        let m = Model::resolve(&parse_spec(&text).unwrap()).unwrap();
        (*m.hopf(hopf).unwrap().clone()).clone()
    };
    assert_eq!(get("kz3.spec", "kz3"), cyclic_group_algebra(3));
    assert_eq!(get("h4.spec", "h4"), sweedler());
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("hopf k\nbasis 1\nmul 1 1 = 1\nunit = 1\ncomul 1 = 1|1\n", 1, "missing `end`"),
        ("algebra a\nbasis x\nmul x x = y\nunit = x\nend\n", 3, "unresolved"),
        ("algebra a\nbasis x\nmul x x = x|x\nunit = x\nend\n", 3, "dimension"),
        ("params max_degree=4\nparams max_degree=5\n", 2, "duplicate"),
        ("frobnicate x\n", 1, "unknown item"),
        ("params max_degree=four\n", 1, ""),
    ];
    for (text, line, needle) in cases {
        let e = parse_spec(text).unwrap_err();
        assert_eq!(e.line(), line, "{text:?}: {e}");
        assert!(e.to_string().to_lowercase().contains(needle), "{e}");
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let (_, text) = shipped().into_iter().find(|(n, _)| *n == "kz2.spec").unwrap();
    let noisy: String = text.lines().map(|l| format!("{l}   # note\n\n")).collect();
    assert_eq!(parse_spec(&noisy).unwrap(), parse_spec(&text).unwrap());
}

#[test]
fn permuting_bases_keeps_the_structure() {
    for (name, text) in shipped() {
        let spec = parse_spec(&text).unwrap();
        let p = permute_bases(&spec, 7);
        let a = Model::resolve(&spec).unwrap();
        let b = Model::resolve(&p).unwrap();
        for ((n1, h1), (n2, h2)) in a.hopfs.iter().zip(&b.hopfs) {
            assert_eq!(n1, n2);
            assert_eq!(h1.dim(), h2.dim(), "{name}");
            let mut l1 = h1.space().labels().to_vec();
            let mut l2 = h2.space().labels().to_vec();
            l1.sort();
            l2.sort();
            assert_eq!(l1, l2, "{name}");
        }
    }
}

#[test]
fn unresolved_context_reference() {
    let (_, text) = shipped().into_iter().find(|(n, _)| *n == "kz3.spec").unwrap();
    let bad = text.replace("module=rot", "module=spin");
    let e = parse_spec(&bad).unwrap_err();
    assert!(matches!(e, SpecError::UnresolvedName { ref name, .. } if name == "spin"), "{e}");
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..9)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| Scalar::from_frac(n, d))
}

proptest! {
    #[test]
    fn trace_values_round_trip(values in proptest::collection::vec(proptest::option::of(scalar()), 3)) {
        let mut text = String::from("algebra a\nbasis x y z\nmul x x = x\nmul y y = y\nmul z z = z\nunit = x + y + z\nend\n\ntrace t algebra=a\n");
        for (l, v) in ["x", "y", "z"].iter().zip(&values) {
            if let Some(v) = v {
                text.push_str(&format!("value {l} = {v}\n"));
            }
        }
        text.push_str("end\n");
        let spec = parse_spec(&text).unwrap();
        let again = parse_spec(&print_spec(&spec)).unwrap();
        prop_assert_eq!(&again, &spec);
        let m = Model::resolve(&again).unwrap();
        let tr = &m.trace("t").unwrap().values;
        for (k, v) in values.iter().enumerate() {
            prop_assert_eq!(tr.get(k), v.clone().unwrap_or_else(Scalar::zero));
        }
    }

    #[test]
    fn printed_rhs_reads_back(coefs in proptest::collection::vec(scalar(), 1..5)) {
        // a sigma line with arbitrary signed rational coefficients on kz2
        let labels = ["e", "g"];
        let mut rhs = String::new();
        for (k, c) in coefs.iter().enumerate() {
            let sign = match (k, c.is_negative()) {
                (_, true) => " -",
                (0, false) => "",
                (_, false) => " +",
            };
            let abs = if c.is_negative() { -c.clone() } else { c.clone() };
            rhs.push_str(&format!("{sign} {abs}*{}", labels[k % 2]));
        }
        let text = format!("pair p hopf=h\nsigma ={rhs}\nend\n");
        let spec = parse_syntax(&text).unwrap();
        let item = spec.items.iter().find(|i| i.kind == ItemKind::Pair).unwrap();
        let Op::Sigma(terms) = &item.body[0].op else { panic!() };
        prop_assert_eq!(terms.len(), coefs.len());
        for (t, c) in terms.iter().zip(&coefs) {
            prop_assert_eq!(&t.coef, c);
        }
        prop_assert_eq!(parse_syntax(&print_spec(&spec)).unwrap(), spec);
    }
}
