use proptest::prelude::*;
use sigma_core::invariants::{coefficient_scale, mu_with_thresholds, ZERO_TOLERANCE};
use sigma_core::lattice::in_fundamental_domain;
use sigma_core::{
    classify, extend_series, invert_j, j_invariant, pq_of_series, reduce_tau, synthesize, Complex,
    Family, ProjectiveValue, TauPoint, TruncatedOddSeries, TruncatedSeries, UnimodularMap,
};

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex::new(a, b))
}

fn series(len: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(complex(2.0), len).prop_map(|v| TruncatedSeries::new(v).unwrap())
}

fn odd_series() -> impl Strategy<Value = TruncatedOddSeries> {
    (complex(1.0), prop::collection::vec(complex(0.5), 3)).prop_map(|(a1, rest)| {
        let a1 = if a1.norm() < 0.2 {
            a1 + Complex::new(1.0, 0.0)
        } else {
            a1
        };
        let mut v = vec![a1];
        v.extend(rest);
        TruncatedOddSeries::new(v).unwrap()
    })
}

fn close(a: Complex, b: Complex, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

fn mu_of(s: &TruncatedOddSeries) -> ProjectiveValue {
    let d = pq_of_series(s).unwrap();
    let a1 = s.coeff(1).norm();
    let sc = coefficient_scale(s);
    mu_with_thresholds(
        d.p,
        d.q,
        ZERO_TOLERANCE * a1.powi(2) * sc.powi(4),
        ZERO_TOLERANCE * a1.powi(3) * sc.powi(6),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiply_commutes(a in series(8), b in series(8)) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        for k in 0..8 {
            prop_assert!(close(ab.coeff(k), ba.coeff(k), 1e-14));
        }
    }

    #[test]
    fn multiply_associates(a in series(7), b in series(7), c in series(7)) {
        let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        for k in 0..7 {
            prop_assert!(close(l.coeff(k), r.coeff(k), 1e-12));
        }
    }

    #[test]
    fn twist_then_untwist(s in odd_series(), alpha in complex(1.0), beta in complex(1.0)) {
        let back = s.gauss_twist(alpha, beta).gauss_twist(-alpha, -beta);
        for n in (1..=7).step_by(2) {
            prop_assert!(close(back.coeff(n), s.coeff(n), 1e-12));
        }
    }

    #[test]
    fn argument_scalings_compose(s in odd_series(), a in complex(1.5), b in complex(1.5)) {
        let l = s.scale_argument(a).scale_argument(b);
        let r = s.scale_argument(a * b);
        for n in (1..=7).step_by(2) {
            prop_assert!(close(l.coeff(n), r.coeff(n), 1e-12));
        }
    }

    #[test]
    fn mu_is_gauge_invariant(s in odd_series(), a in complex(1.0), alpha in complex(0.5), beta in complex(0.5)) {
        prop_assume!(a.norm() > 0.3);
        let t = s.scale_argument(a).gauss_twist(alpha, beta);
        match (mu_of(&s), mu_of(&t)) {
            (ProjectiveValue::Finite(m1), ProjectiveValue::Finite(m2)) => {
                prop_assert!(close(m1, m2, 1e-7), "{m1} vs {m2}");
            }
            (x, y) => prop_assert!(x.same_tag(&y), "{x:?} vs {y:?}"),
        }
    }

    #[test]
    fn reduce_tau_lands_in_domain(x in -0.5f64..0.5, y in 0.9f64..3.0, a in -3i64..=3, b in -3i64..=3, c in -3i64..=3) {
        // build a unimodular map from a word in T and S
        let mut m = UnimodularMap::IDENTITY;
        for k in [a, b, c] {
            m = m.compose(&UnimodularMap::translation(k)).compose(&UnimodularMap::S);
        }
        let tau = TauPoint::from_parts(x, y).unwrap();
        let moved = m.apply_tau(tau).unwrap();
        prop_assume!(moved.value().im > 1e-3);
        let (r, g) = reduce_tau(moved);
        prop_assert!(in_fundamental_domain(r));
        prop_assert!((g.apply(moved.value()) - r.value()).norm() < 1e-9);
        let (r0, _) = reduce_tau(tau);
        prop_assert!((r.value() - r0.value()).norm() < 1e-8, "{} vs {}", r.value(), r0.value());
    }

    #[test]
    fn extension_is_idempotent(s in odd_series()) {
        let direct = extend_series(&s, 15).unwrap();
        let staged = extend_series(&extend_series(&s, 11).unwrap(), 15).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn nonlinear_d_matches_pointwise(s in odd_series(), z in complex(0.3)) {
        let [f, f1, f2, f3] = s.jet3(z);
        let direct = f * f * f * f3 - f * f * f1 * f2 * 3.0 + f * f1 * f1 * f1 * 2.0;
        // the truncated operator agrees with the pointwise one through z^7
        let series = s.nonlinear_d().eval(z);
        prop_assert!((direct - series).norm() <= 1e2 * z.norm().powi(9) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invert_j_inverts(x in -0.5f64..0.5, y in 0.87f64..2.5) {
        let tau = TauPoint::from_parts(x, y).unwrap();
        prop_assume!(in_fundamental_domain(tau));
        let j = j_invariant(tau).unwrap();
        let back = invert_j(j).unwrap();
        let j2 = j_invariant(back).unwrap();
        prop_assert!(close(j, j2, 1e-8), "{j} vs {j2}");
    }

    #[test]
    fn trig_members_classify(a in complex(1.5), alpha in complex(0.5), beta in complex(0.5)) {
        prop_assume!(a.norm() > 0.3);
        let fam = Family::Trigonometric { a, alpha, beta };
        let s = synthesize(&fam, 9).unwrap();
        let c = classify(&s).unwrap();
        prop_assert_eq!(c.family.tag(), "trig");
        let back = synthesize(&c.family, 9).unwrap();
        for n in (1..=9).step_by(2) {
            prop_assert!(close(back.coeff(n), s.coeff(n), 1e-8));
        }
    }
}
