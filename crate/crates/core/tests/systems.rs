use zigzag::fixtures::{ex4, w_p, z_p};
use zigzag::systems::{check_same_contour_chain, check_zigzag_free, rewire, ChainVerdict, OrientationClass, SystemPrefix};

#[test]
fn rewiring_the_three_map_example_removes_its_negative_departures() {
    let p = SystemPrefix::new(ex4().to_vec()).unwrap();
    assert!(check_same_contour_chain(&p).holds());
    let before = check_zigzag_free(&p);
    assert_eq!(before.per_map[2].class(), OrientationClass::Both);
    let r = rewire(&p).unwrap();
    assert!(r.certificates_pass());
    assert_eq!(r.rewired.len(), 1);
    assert_eq!(r.steps[0].orientations.class(), OrientationClass::PositiveOnly);
    let [f1, f2, _] = ex4();
    let (t1, s_tilde) = r.factors()[0];
    assert_eq!(t1.compose(s_tilde).unwrap(), f1.compose(&f2).unwrap());
}

#[test]
fn rewire_refuses_a_broken_chain() {
    let p = SystemPrefix::new(vec![w_p(), z_p(), w_p()]).unwrap();
    assert_eq!(check_same_contour_chain(&p), ChainVerdict::FailsAt(1));
    assert!(matches!(rewire(&p), Err(zigzag::Error::Hypothesis(m)) if m.contains('1')));
}
