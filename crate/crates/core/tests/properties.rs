use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use shintani::arith::modint::ModRing;
use shintani::arith::{abel_limit, flat, sharp, CycloValue, Rational, RationalFunctionU};
use shintani::cones::quadratic_field;
use shintani::field::FieldElement;
use shintani::padic::{padic_exp, padic_log, Padic};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn cyclo(order: u32, coeffs: &[i64]) -> CycloValue {
    let poly: Vec<Rational> = coeffs.iter().map(|&c| rat(c, 1)).collect();
    CycloValue::from_poly(order, &poly)
}

fn order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![1u32, 3, 4, 5, 8, 12])
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..10, 1..8)
}

proptest! {
    #[test]
    fn cyclotomic_ring_axioms(m in order(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (cyclo(m, &a), cyclo(m, &b), cyclo(m, &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), CycloValue::one(m));
        }
    }

    #[test]
    fn embedding_is_a_ring_map(m in prop::sample::select(vec![3u32, 4, 5]), k in 2u32..4, a in coeffs(), b in coeffs()) {
        let (a, b) = (cyclo(m, &a), cyclo(m, &b));
        let t = m * k;
        prop_assert_eq!((&a * &b).embed(t), &a.embed(t) * &b.embed(t));
        prop_assert_eq!((&a + &b).embed(t), &a.embed(t) + &b.embed(t));
    }

    #[test]
    fn barrett_matches_wide_remainder(m in 2u64..(1u64 << 40), a in any::<u64>(), b in any::<u64>()) {
        let ring = ModRing::new(m);
        let (a, b) = (a % m, b % m);
        prop_assert_eq!(ring.mul(a, b) as u128, a as u128 * b as u128 % m as u128);
        prop_assert_eq!(ring.add(a, b), ((a as u128 + b as u128) % m as u128) as u64);
        if let Some(inv) = ring.inv(a) {
            prop_assert_eq!(ring.mul(a, inv), 1 % m);
        }
    }

    #[test]
    fn flat_and_sharp(a in -10_000i64..10_000, h in 1u64..500) {
        let f = flat(a, h);
        let s = sharp(a, h);
        prop_assert!(f < h && s >= 1 && s <= h);
        prop_assert_eq!((a - f as i64).rem_euclid(h as i64), 0);
        prop_assert_eq!((a - s as i64).rem_euclid(h as i64), 0);
        prop_assert_eq!(s == h, f == 0);
    }

    #[test]
    fn quadratic_norm_is_multiplicative(d in prop::sample::select(vec![2u64, 3, 5, 13]),
                                        a in (-20i64..20, -20i64..20), b in (-20i64..20, -20i64..20)) {
        let field = quadratic_field(d).unwrap();
        let x = FieldElement::from_ints(&[a.0, a.1]);
        let y = FieldElement::from_ints(&[b.0, b.1]);
        let xy = field.mul(&x, &y);
        prop_assert_eq!(field.norm(&xy), field.norm(&x) * field.norm(&y));
        prop_assert_eq!(field.trace(&field.conjugate(&x).unwrap()), field.trace(&x));
        if !y.is_zero() {
            prop_assert_eq!(field.mul(&field.div(&x, &y).unwrap(), &y), x);
        }
    }

    #[test]
    fn padic_field_operations_match_rationals(p in prop::sample::select(vec![2u64, 3, 5, 7]),
                                              a in (-500i64..500, 1i64..60), b in (-500i64..500, 1i64..60)) {
        let digits = 10;
        let (ra, rb) = (rat(a.0, a.1), rat(b.0, b.1));
        let lift = |r: &Rational| Padic::from_rational(p, r, digits);
        prop_assume!(lift(&ra).is_ok() && lift(&rb).is_ok());
        let (pa, pb) = (lift(&ra).unwrap(), lift(&rb).unwrap());
        let sum = pa.add(&pb);
        let prod = pa.mul(&pb);
        prop_assert!(sum.agrees_mod(&lift(&(&ra + &rb)).unwrap(), sum.abs_precision()));
        prop_assert!(prod.agrees_mod(&lift(&(&ra * &rb)).unwrap(), prod.abs_precision()));
        if !pb.is_zero() {
            let q = pa.div(&pb).unwrap();
            prop_assert!(q.mul(&pb).agrees_mod(&pa, q.mul(&pb).abs_precision().min(pa.abs_precision())));
        }
    }

    #[test]
    fn exp_inverts_log_on_principal_units(p in prop::sample::select(vec![3u64, 5, 7]), t in 0u64..10_000) {
        let digits = 8;
        // 1 + p·t is a principal unit
        let u = Padic::from_int(p, 1 + (p * t) as i64, digits).unwrap();
        let back = padic_exp(&padic_log(&u).unwrap()).unwrap();
        prop_assert!(back.agrees_mod(&u, back.abs_precision()));
        prop_assert!(back.abs_precision() >= 5);
    }

    #[test]
    fn abel_limit_cancels_common_zeros(num in prop::collection::vec(-9i64..10, 1..5),
                                       den in prop::collection::vec(-9i64..10, 1..5), j in 0usize..3) {
        let sum = |c: &[i64]| c.iter().sum::<i64>();
        prop_assume!(sum(&den) != 0);
        // f = (1 - u)^j N(u) / ((1 - u)^j D(u)), regular at 1 with value N(1)/D(1)
        let lift = |c: &[i64]| -> Vec<CycloValue> {
            let mut p: Vec<CycloValue> = c.iter().map(|&x| CycloValue::from_int(x)).collect();
            for _ in 0..j {
                let mut q = vec![CycloValue::zero(1); p.len() + 1];
                for (i, a) in p.iter().enumerate() {
                    q[i] = &q[i] + a;
                    q[i + 1] = &q[i + 1] - a;
                }
                p = q;
            }
            p
        };
        let f = RationalFunctionU::new(lift(&num), lift(&den)).unwrap();
        let limit = abel_limit(&f).unwrap();
        prop_assert_eq!(limit, CycloValue::from_rational(rat(sum(&num), sum(&den)), 1));
    }
}

#[test]
fn abel_limit_reports_poles() {
    let f = RationalFunctionU::from_rational_coeffs(&[Rational::one()], &[Rational::one(), -Rational::one()]).unwrap();
    assert!(abel_limit(&f).is_err());
}
