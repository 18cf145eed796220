use orlicz_core::growth::{check, check_delta_square, Condition};
use orlicz_core::{Verdict, WeightSequence};

const J: usize = 256;

fn g(s: f64) -> WeightSequence {
    WeightSequence::gevrey(s, J).unwrap()
}

fn q(q: f64) -> WeightSequence {
    WeightSequence::qgevrey(q, 2.0, J).unwrap()
}

fn holds(m: &WeightSequence, c: Condition) -> bool {
    let r = check(m, c);
    r.verdict == Verdict::Holds && r.replay(m) != Some(false)
}

#[test]
fn delta2_survives_product_and_convolution() {
    let (a, b) = (q(2.0), q(3.0));
    assert!(holds(&a, Condition::Delta2) && holds(&b, Condition::Delta2));
    assert!(holds(&a.product(&b).unwrap(), Condition::Delta2));
    assert!(holds(&a.convolve(&b).unwrap(), Condition::Delta2));
}

#[test]
fn nabla2_survives_product_and_convolution() {
    for (a, b) in [(q(2.0), q(3.0)), (g(1.0), g(2.0)), (g(0.5), q(2.0))] {
        assert!(holds(&a, Condition::Nabla2) && holds(&b, Condition::Nabla2));
        assert!(
            holds(&a.product(&b).unwrap(), Condition::Nabla2),
            "{}",
            a.label()
        );
        assert!(
            holds(&a.convolve(&b).unwrap(), Condition::Nabla2),
            "{}",
            a.label()
        );
    }
}

#[test]
fn delta3_survives_convolution() {
    let (a, b) = (g(1.0), g(2.0));
    assert!(holds(&a, Condition::Delta3) && holds(&b, Condition::Delta3));
    assert!(holds(&a.convolve(&b).unwrap(), Condition::Delta3));
}

#[test]
fn delta_square_of_a_product() {
    let a = WeightSequence::gevrey(1.0, 1024).unwrap();
    let r = check_delta_square(&a.product(&a).unwrap());
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(r.witnesses["A"], 2.0);
}
