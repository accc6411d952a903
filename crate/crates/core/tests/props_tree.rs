use bslattice::exactnum::{PrimeSignature, Rational, TruncatedNAdic};
use bslattice::isometry::ArithmeticIsometry;
use bslattice::lab::enumerate_hk;
use bslattice::lattice::{conjugate_spec, make_phi, straighten};
use bslattice::tree::*;
use num_bigint::BigInt;
use proptest::prelude::*;

fn sig(n: u64) -> PrimeSignature {
    PrimeSignature::new(n).unwrap()
}

/// Compatible level permutations built from per-vertex child shuffles drawn
/// from `seed`.
fn random_lpa(n: u64, depth: u32, seed: &[u32]) -> LevelPermAutomorphism {
    let mut levels: Vec<Vec<u32>> = Vec::new();
    let mut pick = seed.iter().cycle();
    for i in 0..depth {
        let width = n.pow(i) as usize;
        let lower: Vec<u32> = if i == 0 { vec![0] } else { levels[i as usize - 1].clone() };
        let mut sigma = vec![0u32; width * n as usize];
        for y in 0..width {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            for t in (1..perm.len()).rev() {
                let r = *pick.next().unwrap() as usize % (t + 1);
                perm.swap(t, r);
            }
            for t in 0..n as usize {
                sigma[y + width * t] = lower[y] + width as u32 * perm[t];
            }
        }
        levels.push(sigma);
    }
    LevelPermAutomorphism::new(n, levels).unwrap()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-500i64..500, 1i64..40).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

proptest! {
    #[test]
    fn lpa_closure_random(n in 2u64..=5, depth in 1u32..=4, s1 in prop::collection::vec(any::<u32>(), 1..64), s2 in prop::collection::vec(any::<u32>(), 1..64)) {
        let f = random_lpa(n, depth, &s1);
        let g = random_lpa(n, depth, &s2);
        for h in [f.compose(&g), f.inverse(), g.power(-3)] {
            prop_assert!(h.is_compatible());
            prop_assert!(LevelPermAutomorphism::new(n, h.levels().to_vec()).is_ok());
        }
        prop_assert!(f.compose(&f.inverse()).is_identity());
    }

    #[test]
    fn ball_relation(n in 2u64..=7, num in -1000i64..1000, den_exp in 0u32..4, l in 1i64..=3) {
        prop_assume!(num != 0);
        let s = sig(n);
        let beta = Rational::from(num) / s.pow(den_exp as i64);
        let a = BallAffineMap::translation(&s, beta);
        let b = BallAffineMap::standard_b_power(&s, l);
        let lhs = b.compose(&a).compose(&b.inverse());
        prop_assert_eq!(lhs, a.power(s.pow_int(l as u32).try_into().unwrap()));
    }

    #[test]
    fn levelwise_relation(n in 2u64..=6, eta in 0u64..1_000_000, l in 1u32..=2) {
        let depth = match n { 2 | 3 => 8, 4 => 6, _ => 5 };
        let s = sig(n);
        let modulus = s.pow_int(depth);
        let a = build_aeta(&TruncatedNAdic::new(BigInt::from(eta) % modulus, depth, &s).unwrap()).unwrap();
        prop_assert_eq!(relation_failure_power(&a, l), None);
        let eta_back = extract_eta(&a).unwrap();
        prop_assert_eq!(eta_back.residue(), &(BigInt::from(eta) % s.pow_int(depth)));
    }

    #[test]
    fn act_respects_parent(n in 2u64..=6, u_exp in -2i64..=2, unit in prop::sample::select(vec![1i64, -1, 7, -11, 13]), beta in rational(), h in -4i64..4, c in rational()) {
        let s = sig(n);
        prop_assume!(num_integer::Integer::gcd(&(n as i64), &unit) == 1);
        let beta = Rational::from(beta.numer().clone()) / s.pow(3);
        let c = Rational::from(c.numer().clone()) / s.pow(2);
        let f = BallAffineMap::new(&s, s.pow(u_exp) * Rational::from(unit), beta).unwrap();
        let v = TreeVertex::new(&s, h, &c);
        prop_assert_eq!(f.act(&v).parent(), f.act(&v.parent()));
        prop_assert_eq!(f.act(&v).h(), v.h() + f.h());
        prop_assert_eq!(f.inverse().act(&f.act(&v)), v);
    }

    #[test]
    fn straightened_maps_intertwine(n in 2u64..=4, unit in prop::sample::select(vec![1i64, -1, 5, 7, -13]), t in -50i64..50, alpha in rational()) {
        let s = sig(n);
        prop_assume!(num_integer::Integer::gcd(&(n as i64), &unit) == 1);
        let std = make_phi(n, 1, &Rational::one(), 1).unwrap();
        let g = ArithmeticIsometry::from_parts(&s, 1, 0, alpha, Rational::from(unit), Rational::from(t)).unwrap();
        let spec = conjugate_spec(&g, &std).unwrap();
        let map = straighten(&spec, 3, 2).unwrap();
        let a = BallAffineMap::standard_a(&s);
        let b = BallAffineMap::standard_b_power(&s, 1);
        let (bad_a, checked_a) = map.intertwining_defects(spec.img_a().tree(), &a);
        let (bad_b, checked_b) = map.intertwining_defects(spec.img_b().tree(), &b);
        prop_assert_eq!((bad_a, bad_b), (0, 0));
        prop_assert!(checked_a > 0 && checked_b > 0);
    }
}

#[test]
fn lpa_closure_exhaustive_binary() {
    for depth in 1..=3 {
        let h = enumerate_hk(2, depth).unwrap();
        for f in h.elements() {
            assert!(f.inverse().is_compatible());
            for g in h.elements() {
                let fg = f.compose(g);
                assert!(LevelPermAutomorphism::new(2, fg.levels().to_vec()).is_ok());
            }
        }
    }
}

#[test]
fn centralizer_of_a_is_the_aeta_family() {
    let s = sig(2);
    for depth in 1..=3u32 {
        let h = enumerate_hk(2, depth).unwrap();
        let a = build_aeta(&TruncatedNAdic::new(BigInt::from(1), depth, &s).unwrap()).unwrap();
        let commuting: Vec<_> = h.elements().iter().filter(|g| g.commutes_with(&a)).collect();
        assert_eq!(commuting.len(), 1 << depth);
        for g in commuting {
            let eta = extract_eta(g).unwrap();
            assert_eq!(&build_aeta(&eta).unwrap(), g);
        }
    }
}

#[test]
fn operation_examples() {
    let s = sig(2);
    let q = |t: &str| t.parse::<Rational>().unwrap();
    let v = TreeVertex::new(&s, 1, &q("3"));
    assert_eq!(v.c(), &q("1"));
    assert_eq!(v.parent(), TreeVertex::new(&s, 0, &q("0")));
    let a = BallAffineMap::standard_a(&s);
    assert_eq!(a.act(&TreeVertex::new(&s, 2, &q("0"))), TreeVertex::new(&s, 2, &q("1")));
    assert!(a.fixes(&TreeVertex::root(2)).unwrap());
    assert!(a.fixes(&TreeVertex::new(&s, -1, &q("0"))).unwrap());
    assert!(!a.fixes(&TreeVertex::new(&s, 1, &q("0"))).unwrap());
    let b = BallAffineMap::standard_b_power(&s, 1);
    assert_eq!(b.act(&TreeVertex::root(2)).h(), 1);
    assert_eq!(b.axis_point().unwrap(), q("0"));
    let swap = LevelPermAutomorphism::new(2, vec![vec![1, 0], vec![1, 0, 3, 2]]).unwrap();
    assert!(swap.is_compatible());
    assert!(LevelPermAutomorphism::new(2, vec![vec![1, 0], vec![0, 1, 2, 3]]).is_err());
    let dot = dot_subtree(&TreeVertex::root(2), 2, Some(&a)).unwrap();
    assert!(dot.starts_with("digraph"));
}
