use bslattice::exactnum::{PrimeSignature, Rational};
use bslattice::isometry::*;
use bslattice::tree::BallAffineMap;
use proptest::prelude::*;

fn frac() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..30).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

fn unit(n: u64) -> impl Strategy<Value = Rational> {
    (prop::sample::select(vec![1i64, -1, 7, -7, 11, 13, -17, 19]), prop::sample::select(vec![1i64, 7, 11, 13]))
        .prop_filter("coprime to n", move |(p, q)| {
            num_integer::Integer::gcd(p, &(n as i64)) == 1 && num_integer::Integer::gcd(q, &(n as i64)) == 1
        })
        .prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

fn isometry(n: u64, eps_choices: Vec<i8>) -> impl Strategy<Value = ArithmeticIsometry> {
    (prop::sample::select(eps_choices), -4i64..=4, frac(), unit(n), frac()).prop_map(move |(eps, h, alpha, u, beta)| {
        let sig = PrimeSignature::new(n).unwrap();
        let u = sig.pow(h) * u;
        ArithmeticIsometry::from_parts(&sig, eps, h, alpha, u, beta).unwrap()
    })
}

fn elliptic(n: u64) -> impl Strategy<Value = ArithmeticIsometry> {
    (frac(), frac()).prop_map(move |(alpha, beta)| {
        let sig = PrimeSignature::new(n).unwrap();
        ArithmeticIsometry::new(1, alpha, BallAffineMap::translation(&sig, beta)).unwrap()
    })
}

fn base() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 6])
}

proptest! {
    #[test]
    fn td_equivariance((f, g) in base().prop_flat_map(|n| (elliptic(n), isometry(n, vec![1])))) {
        let conj = f.conjugate_by(&g);
        let scale = g.signature().pow(g.h());
        prop_assert_eq!(conj.td().unwrap(), scale * f.td().unwrap());
    }

    #[test]
    fn height_and_orientation_are_homomorphisms((f, g) in base().prop_flat_map(|n| (isometry(n, vec![1, -1]), isometry(n, vec![1, -1])))) {
        let fg = f.compose(&g);
        prop_assert_eq!(fg.h(), f.h() + g.h());
        prop_assert_eq!(fg.eps(), f.eps() * g.eps());
        prop_assert_eq!(f.inverse().h(), -f.h());
        prop_assert!(f.compose(&f.inverse()).is_identity());
    }

    #[test]
    fn composition_is_associative((f, g, k) in base().prop_flat_map(|n| (isometry(n, vec![1, -1]), isometry(n, vec![1, -1]), isometry(n, vec![1, -1])))) {
        prop_assert_eq!(f.compose(&g).compose(&k), f.compose(&g.compose(&k)));
    }

    #[test]
    fn real_action_matches_composition((f, g) in base().prop_flat_map(|n| (isometry(n, vec![1, -1]), isometry(n, vec![1, -1]))), t in frac()) {
        prop_assert_eq!(f.compose(&g).apply_real(&t), f.apply_real(&g.apply_real(&t)));
    }

    #[test]
    fn decompose_round_trip(f in base().prop_flat_map(|n| isometry(n, vec![1]))) {
        let (x, k) = f.decompose().unwrap();
        prop_assert!(k.alpha().is_zero());
        prop_assert_eq!(ArithmeticIsometry::translation(f.signature(), x).compose(&k), f);
    }

    #[test]
    fn semidirect_rule((f, g) in base().prop_flat_map(|n| (isometry(n, vec![1]), isometry(n, vec![1])))) {
        let (x, k) = f.decompose().unwrap();
        let (x2, k2) = g.decompose().unwrap();
        let (x3, k3) = f.compose(&g).decompose().unwrap();
        prop_assert_eq!(x3, x + f.signature().pow(k.h()) * x2);
        prop_assert_eq!(k3, k.compose(&k2));
    }

    #[test]
    fn autgn_is_an_automorphism(
        (f, g, t) in base().prop_flat_map(|n| (isometry(n, vec![1]), isometry(n, vec![1]), isometry(n, vec![1]))),
        r in frac().prop_filter("nonzero", |r| !r.is_zero()),
    ) {
        let tree = ArithmeticIsometry::pure_tree(t.tree().clone());
        let phi = AutGn::new(r, tree).unwrap();
        let lhs = apply_autgn(&phi, &f.compose(&g)).unwrap();
        let rhs = apply_autgn(&phi, &f).unwrap().compose(&apply_autgn(&phi, &g).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(apply_autgn(&phi, &f.inverse()).unwrap(), apply_autgn(&phi, &f).unwrap().inverse());
    }

    #[test]
    fn autgn_then_composes((f, t1, t2) in base().prop_flat_map(|n| (isometry(n, vec![1]), isometry(n, vec![1]), isometry(n, vec![1]))),
                            r1 in frac().prop_filter("nonzero", |r| !r.is_zero()),
                            r2 in frac().prop_filter("nonzero", |r| !r.is_zero())) {
        let p1 = AutGn::new(r1, ArithmeticIsometry::pure_tree(t1.tree().clone())).unwrap();
        let p2 = AutGn::new(r2, ArithmeticIsometry::pure_tree(t2.tree().clone())).unwrap();
        let stepwise = apply_autgn(&p2, &apply_autgn(&p1, &f).unwrap()).unwrap();
        prop_assert_eq!(apply_autgn(&p1.then(&p2), &f).unwrap(), stepwise);
    }

    #[test]
    fn wire_round_trip(f in base().prop_flat_map(|n| isometry(n, vec![1, -1]))) {
        let json = serde_json::to_string(&f.to_wire()).unwrap();
        let back: IsometryJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(ArithmeticIsometry::from_wire(f.signature(), &back).unwrap(), f);
    }
}

#[test]
fn operation_examples() {
    let s = PrimeSignature::new(2).unwrap();
    let q = |t: &str| t.parse::<Rational>().unwrap();
    let a = ArithmeticIsometry::standard_a(&s, q("1"));
    let b = ArithmeticIsometry::standard_b_power(&s, 1);
    assert_eq!(a.conjugate_by(&b).td().unwrap(), q("2"));
    assert_eq!(a.td().unwrap(), q("1"));
    assert!(matches!(b.td(), Err(IsometryError::NotElliptic { h: 1 })));
    assert_eq!(a.classify_type(), IsometryType::Elliptic);
    assert_eq!(b.classify_type(), IsometryType::Hyperbolic);
    let refl = ArithmeticIsometry::new(-1, q("0"), BallAffineMap::identity(&s)).unwrap();
    assert!(matches!(refl.td(), Err(IsometryError::Reflection)));
    assert!(ArithmeticIsometry::from_parts(&s, 1, 1, q("0"), q("3"), q("0")).is_err());
    let f = apply_autgn(&AutGn::scaling(&s, q("3")).unwrap(), &a).unwrap();
    assert_eq!(f.td().unwrap(), q("3"));
}
