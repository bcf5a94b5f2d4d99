use std::collections::BTreeSet;

use equidist_core::fixtures;
use equidist_core::gluing::{expected_pair_count, Closure};
use equidist_core::{CurveAnalysis, GlueingScheme, LambdaClass, Settings};

fn analysis(f: &fixtures::Fixture) -> CurveAnalysis {
    CurveAnalysis::new(f.curve.clone(), Settings::with_samples(4096)).unwrap()
}

fn generic_fixtures() -> Vec<fixtures::Fixture> {
    fixtures::all().into_iter().filter(|f| !f.curve.is_centrally_symmetric()).collect()
}

#[test]
fn rewalking_from_any_step_gives_the_same_scheme() {
    for f in generic_fixtures() {
        let an = analysis(&f);
        for class in [LambdaClass::Half, LambdaClass::Generic] {
            for sc in an.schemes(class).unwrap() {
                for &step in &sc.steps {
                    let again = GlueingScheme::maximal_from(&an.structure, class, step).unwrap();
                    assert_eq!(again, sc, "{} {class:?}", f.name);
                }
            }
        }
    }
}

#[test]
fn every_pair_of_arcs_is_used_once() {
    for f in generic_fixtures() {
        let an = analysis(&f);
        for class in [LambdaClass::Half, LambdaClass::Generic] {
            let mut seen = BTreeSet::new();
            for sc in an.schemes(class).unwrap() {
                let twisted = sc.closure == Some(Closure::Twisted);
                for s in &sc.steps {
                    let id = match class {
                        LambdaClass::Half => (s.top.min(s.bottom), s.top.max(s.bottom)),
                        LambdaClass::Generic => (s.top, s.bottom),
                    };
                    assert!(seen.insert(id) || twisted, "{} {class:?} reuses {id:?}", f.name);
                }
            }
            assert_eq!(seen.len(), expected_pair_count(&an.structure, class), "{} {class:?}", f.name);
        }
    }
}

#[test]
fn rosette_scheme_counts() {
    for (n, name) in [(2usize, "c2"), (3, "c3"), (4, "c4")] {
        let an = analysis(&fixtures::by_name(name).unwrap());
        assert_eq!(an.schemes(LambdaClass::Half).unwrap().len(), n, "{name}");
        assert_eq!(an.schemes(LambdaClass::Generic).unwrap().len(), 2 * n - 1, "{name}");
    }
}

#[test]
fn oval_has_one_scheme_per_class() {
    for name in ["perturbed-ellipse", "three-lobed"] {
        let an = analysis(&fixtures::by_name(name).unwrap());
        let half = an.schemes(LambdaClass::Half).unwrap();
        assert_eq!(half.len(), 1);
        assert_eq!(half[0].to_string(), "p0-p1 / p1-p0");
        assert_eq!(half[0].closure, Some(Closure::Twisted));
        assert_eq!(an.schemes(LambdaClass::Generic).unwrap().len(), 1);
    }
}

#[test]
fn inflexions_give_on_shell_schemes() {
    for name in ["w1", "w2", "eight-inflexions"] {
        let an = analysis(&fixtures::by_name(name).unwrap());
        let infl = an.structure.inflexion_points().len();
        let onshell = an.schemes(LambdaClass::Half).unwrap().iter().filter(|s| s.closure == Some(Closure::OnShell)).count();
        assert_eq!(2 * onshell, infl, "{name}");
        assert!(an.schemes(LambdaClass::Generic).unwrap().iter().all(|s| s.closure == Some(Closure::Cycle)));
    }
}

#[test]
fn schemes_are_sorted_and_canonical() {
    for f in generic_fixtures() {
        let an = analysis(&f);
        for class in [LambdaClass::Half, LambdaClass::Generic] {
            let a = an.schemes(class).unwrap();
            let b = an.schemes(class).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|s| s.is_maximal() && s.columns.len() == s.steps.len() + 1));
        }
    }
}
