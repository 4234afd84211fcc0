//! Randomized structural properties of the exact group calculus.

use proptest::prelude::*;

use walshlab::nilgroup::{commutator, inv, lcs, member, mul, GroupElement};
use walshlab::poly::Poly;
use walshlab::polymap::PolyMap;
use walshlab::systems::{self, System};
use walshlab::{GroupModel, Int, Rat};

fn ut4(seed: [i64; 6]) -> GroupElement {
    let [a, b, c, d, e, f] = seed;
    let i = |x: i64| Int::from(x);
    GroupElement::ut(
        4,
        vec![
            vec![i(1), i(a), i(d), i(f)],
            vec![i(0), i(1), i(b), i(e)],
            vec![i(0), i(0), i(1), i(c)],
            vec![i(0), i(0), i(0), i(1)],
        ],
    )
    .unwrap()
}

fn entry6() -> impl Strategy<Value = [i64; 6]> {
    prop::array::uniform6(-9i64..=9)
}

proptest! {
    #[test]
    fn ut4_associative(x in entry6(), y in entry6(), z in entry6()) {
        let (g, h, k) = (ut4(x), ut4(y), ut4(z));
        let lhs = mul(&mul(&g, &h).unwrap(), &k).unwrap();
        let rhs = mul(&g, &mul(&h, &k).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ut4_inverse_involution(x in entry6()) {
        let g = ut4(x);
        prop_assert_eq!(inv(&inv(&g)), g.clone());
        prop_assert!(mul(&g, &inv(&g)).unwrap().is_identity());
        prop_assert!(mul(&inv(&g), &g).unwrap().is_identity());
    }

    #[test]
    fn lcs_commutator_descends(x in entry6(), y in entry6()) {
        // [G_i, G_j] <= G_{i+j} for the lower central series
        let pf = lcs(4);
        let (g, h) = (ut4(x), ut4(y));
        let c = commutator(&g, &h).unwrap();
        prop_assert!(member(&c, &pf, 2).unwrap());
        let c2 = commutator(&c, &ut4(y)).unwrap();
        prop_assert!(member(&c2, &pf, 3).unwrap());
    }

    #[test]
    fn cheat_normalize_idempotent(coeffs in prop::collection::vec(-3i64..=3, 4)) {
        let model = GroupModel::Zr(1);
        let mut maps = vec![PolyMap::identity(model, 3)];
        for (k, &c) in coeffs.iter().enumerate() {
            let p = Poly::var(0).scale(&Rat::from_integer(Int::from(c)));
            let (i, j) = if k % 2 == 0 { (0, 1) } else { (1, 2) };
            maps.push(PolyMap::elementary(model, 3, i, j, p).unwrap());
        }
        let s = System::new(maps).unwrap();
        let once = systems::cheat_normalize(&s).unwrap();
        let twice = systems::cheat_normalize(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn certified_product_closure(a in -2i64..=2, b in -2i64..=2, d1 in 1u32..=2, d2 in 1u32..=2) {
        // quick single-model closure sample complementing the acceptance corpus
        let model = GroupModel::Zr(1);
        let p = Poly::var(0).pow(d1).scale(&Rat::from_integer(Int::from(a)));
        let q = Poly::var(0).pow(d2).scale(&Rat::from_integer(Int::from(b)));
        let g = PolyMap::elementary(model, 3, 0, 2, p).unwrap();
        let h = PolyMap::elementary(model, 3, 1, 2, q).unwrap();
        let pf = walshlab::nilgroup::refine_scalar(&lcs(3), 2).unwrap();
        let prod = g.pointwise_mul(&h).unwrap();
        let cap = prod.default_depth_cap(&pf);
        prop_assert!(prod.is_polynomial(&pf, cap).unwrap().is_certified());
    }
}
