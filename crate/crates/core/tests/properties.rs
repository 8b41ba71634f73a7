use proptest::prelude::*;
use qduality_core::duality::{a_sum, b_sum, IndexSubset};
use qduality_core::field::{sample_parameter_point, FP61_MODULUS};
use qduality_core::qseries::qpochhammer;
use qduality_core::{Field, FieldSpec, Fp, ParameterPoint, Rational};

fn rational_point(n: usize, depth: u32, seed: u64) -> ParameterPoint<Rational> {
    sample_parameter_point(n, depth, seed, FieldSpec::Rational).unwrap()
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=60)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| Rational::new(a, b))
}

fn base_q() -> impl Strategy<Value = Rational> {
    nonzero_rational().prop_filter("q not +-1", |q| *q != Rational::from_int(1) && *q != Rational::from_int(-1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pochhammer_cocycle(a in nonzero_rational(), q in base_q(), d in -4i64..=4, e in -4i64..=4) {
        let lhs = qpochhammer(&a, &q, d + e);
        let rhs = qpochhammer(&a, &q, d)
            .and_then(|x| Ok(x.mul(&qpochhammer(&a.mul(&q.pow(d)?), &q, e)?)));
        if let (Ok(l), Ok(r)) = (lhs, rhs) {
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn pochhammer_inversion(a in nonzero_rational(), q in base_q(), d in 0i64..=5) {
        // (a;q)_{-d} = 1 / (a q^{-d}; q)_d
        let shifted = a.mul(&q.pow(-d).unwrap());
        if let (Ok(neg), Ok(pos)) = (qpochhammer(&a, &q, -d), qpochhammer(&shifted, &q, d)) {
            prop_assert_eq!(neg.mul(&pos), Rational::from_int(1));
        }
    }

    #[test]
    fn relabeling_symmetry(seed in any::<u64>(), perm_seed in any::<u64>(), d in 0u32..=3, l in -1i64..=1) {
        let n = 4;
        let p = rational_point(n, d + 1, seed);
        let subset = IndexSubset::leading(n, 2).unwrap();
        // a permutation from the seed
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for k in (1..n).rev() {
            perm.swap(k, (s % (k as u64 + 1)) as usize);
            s /= k as u64 + 1;
        }
        let moved = p.permuted(&perm);
        let image: Vec<usize> = (0..n).filter(|&k| subset.contains(perm[k])).collect();
        let moved_subset = IndexSubset::new(n, &image).unwrap();
        prop_assert_eq!(a_sum(&moved, &moved_subset, d, l).unwrap(), a_sum(&p, &subset, d, l).unwrap());
        prop_assert_eq!(
            b_sum(&moved, &moved_subset.complement(), d, -l).unwrap(),
            b_sum(&p, &subset.complement(), d, -l).unwrap()
        );
    }

    #[test]
    fn rational_and_prime_field_agree(seed in any::<u64>(), d in 0u32..=3, l in -2i64..=2) {
        let p = rational_point(4, d + 1, seed);
        let reduce = |v: &Rational| v.reduce_mod(FP61_MODULUS);
        let (Some(q), Some(x)) = (reduce(p.q()), p.x().iter().map(reduce).collect::<Option<Vec<Fp>>>()) else {
            return Ok(());
        };
        let Ok(pf) = ParameterPoint::new(q, x, d + 1) else {
            return Ok(());
        };
        let subset = IndexSubset::new(4, &[0, 2]).unwrap();
        let exact = a_sum(&p, &subset, d, l).unwrap();
        if let (Some(expected), Ok(got)) = (reduce(&exact), a_sum(&pf, &subset, d, l)) {
            prop_assert_eq!(expected, got);
        }
    }

    #[test]
    fn duality_in_fp61(seed in any::<u64>(), d in 0u32..=3, r in 1usize..=3, shift in 0i64..=2) {
        let n = 4;
        let l = 1 - r as i64 + shift.min(n as i64 - 2);
        let p: ParameterPoint<Fp> = sample_parameter_point(n, d + 1, seed, FieldSpec::fp61()).unwrap();
        let subset = IndexSubset::leading(n, r).unwrap();
        prop_assert_eq!(
            a_sum(&p, &subset, d, l).unwrap(),
            b_sum(&p, &subset.complement(), d, -l).unwrap()
        );
    }
}
