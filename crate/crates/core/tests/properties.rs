use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scorza::degenerations::{genus_table, limit_model, Divisor};
use scorza::jets::{beta_from_derivatives, polarize, rank_defect, scorza_quartic, QuarticForm, SymTensor4};
use scorza::picard::{self, fold_index, format_rational, parse_rational};
use scorza::szego::SzegoContext;
use scorza::theta::{even_characteristics, quasi_period_factor, theta, Parity, Tolerance};
use scorza::verify::{random_characteristic, random_period_matrix, random_point, random_rational_jet};

type Q = BigRational;

fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn rational_vec(g: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-20i64..=20, 1i64..=7), g).prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

fn rational_quartic(g: usize) -> impl Strategy<Value = QuarticForm<Q>> {
    prop::collection::vec(-9i64..=9, 35).prop_map(move |raw| {
        let mut k = 0;
        let coeffs = SymTensor4::from_fn(g, |_| {
            k += 1;
            rat(raw[k % raw.len()], 1 + (k as i64 % 3))
        });
        QuarticForm { coeffs }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quartic_entries_are_symmetric(f in rational_quartic(3)) {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = f.get(i, j, k, l);
                        prop_assert_eq!(&v, &f.get(j, i, l, k));
                        prop_assert_eq!(&v, &f.get(l, k, i, j));
                        prop_assert_eq!(&v, &f.get(i, k, j, l));
                    }
                }
            }
        }
    }

    #[test]
    fn polarization_is_symmetric_and_bilinear(
        f in rational_quartic(3),
        x in rational_vec(3),
        y in rational_vec(3),
        w in rational_vec(3),
        s in -5i64..=5,
    ) {
        let s = rat(s, 2);
        let m = polarize(&f, &x, &y).unwrap();
        prop_assert_eq!(&m, &polarize(&f, &y, &x).unwrap());
        let xw: Vec<Q> = x.iter().zip(&w).map(|(a, b)| a * &s + b).collect();
        let lhs = polarize(&f, &xw, &y).unwrap();
        let mw = polarize(&f, &w, &y).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                prop_assert_eq!(lhs.get(k, l), m.get(k, l) * &s + mw.get(k, l));
            }
        }
    }

    #[test]
    fn diagonal_polar_contracts_to_the_form(f in rational_quartic(3), x in rational_vec(3)) {
        let m = polarize(&f, &x, &x).unwrap();
        let mut acc = Q::zero();
        for k in 0..3 {
            for l in 0..3 {
                acc += m.get(k, l) * &x[k] * &x[l];
            }
        }
        prop_assert_eq!(acc, f.evaluate([&x, &x, &x, &x]));
    }

    #[test]
    fn quartic_routes_agree_exactly(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = random_rational_jet(&mut rng, g);
        let poly = scorza_quartic(&j);
        let beta = beta_from_derivatives(g, j.theta0.clone(), |a, b| j.theta2.get(a, b), |[a, b, c, d]| j.theta4.get(a, b, c, d));
        prop_assert_eq!(&poly, &beta);
    }

    #[test]
    fn quartic_scales_quadratically(seed in any::<u64>(), s in 1i64..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = random_rational_jet(&mut rng, 2);
        let s = rat(s, 3);
        let scaled = scorza_quartic(&j.scale(&s));
        let want = scorza_quartic(&j).coeffs.scale(&(&s * &s));
        prop_assert_eq!(scaled.coeffs, want);
    }

    #[test]
    fn fourth_powers_polarize_to_rank_one(re in prop::collection::vec(-3.0f64..3.0, 3), im in prop::collection::vec(-3.0f64..3.0, 3)) {
        let l: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        prop_assume!(l.iter().map(|v| v.norm()).fold(0.0, f64::max) > 0.1);
        let x = [Complex64::new(1.0, 0.3), Complex64::new(-0.4, 0.2), Complex64::new(0.7, -1.1)];
        let y = [Complex64::new(0.2, 0.9), Complex64::new(1.3, 0.0), Complex64::new(-0.5, -0.6)];
        let lx: Complex64 = l.iter().zip(&x).map(|(a, b)| a * b).sum();
        let ly: Complex64 = l.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assume!(lx.norm() * ly.norm() > 1e-3);
        let m = polarize(&QuarticForm::fourth_power(&l), &x, &y).unwrap();
        let (rank, ratio) = rank_defect(&m, &Tolerance::default());
        prop_assert_eq!(rank, 1);
        prop_assert!(ratio < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quasi_periodicity(seed in any::<u64>(), g in 1usize..=2, m in prop::collection::vec(-1i64..=1, 2), n in prop::collection::vec(-1i64..=1, 2)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_period_matrix(&mut rng, g);
        let z = random_point(&mut rng, &p);
        let c = random_characteristic(&mut rng, g);
        let t = Tolerance::default();
        let (m, n) = (&m[..g], &n[..g]);
        let on = p.apply_integer(n);
        let shifted: Vec<Complex64> = (0..g).map(|i| z[i] + m[i] as f64 + on[i]).collect();
        let f = quasi_period_factor(&p, &c, &z, m, n).unwrap();
        let lhs = theta(&p, &shifted, &c, &t).unwrap();
        let rhs = f * theta(&p, &z, &c, &t).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1e-6 * f.norm()));
    }

    #[test]
    fn parity_under_negation(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_period_matrix(&mut rng, g);
        let z = random_point(&mut rng, &p);
        let c = random_characteristic(&mut rng, g);
        let t = Tolerance::default();
        let neg: Vec<Complex64> = z.iter().map(|v| -v).collect();
        let a = theta(&p, &z, &c, &t).unwrap();
        let b = theta(&p, &neg, &c, &t).unwrap();
        let want = if c.parity() == Parity::Even { a } else { -a };
        prop_assert!((b - want).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn szego_kernel_is_even(seed in any::<u64>(), k in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_period_matrix(&mut rng, 2);
        let u = random_point(&mut rng, &p);
        let c = even_characteristics(2)[k].clone();
        let ctx = match SzegoContext::new(p, c, &Tolerance::default()) {
            Ok(ctx) => ctx,
            Err(_) => return Ok(()),
        };
        let neg: Vec<Complex64> = u.iter().map(|v| -v).collect();
        let a = ctx.szego(&u).unwrap();
        let b = ctx.szego(&neg).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let x = rat(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
}

proptest! {
    #[test]
    fn boundary_indices_fold(g in 3u64..60, i in 0u64..60) {
        prop_assume!(i <= g);
        let a = fold_index(g, i).unwrap();
        prop_assert_eq!(a, fold_index(g, g - i).unwrap());
        prop_assert!(a as u64 <= g / 2);
    }

    #[test]
    fn limit_models_have_expected_genus(g in 3u64..=30, pick in 0usize..6, i in 0u64..30) {
        let d = Divisor::ALL[pick];
        let idx = if d.takes_index() {
            let r = d.index_range(g);
            prop_assume!(!r.is_empty());
            Some(r.start() + i % (r.end() - r.start() + 1))
        } else {
            None
        };
        let m = limit_model(d, g, idx).unwrap();
        prop_assert_eq!(m.arithmetic_genus(), d.expected_arithmetic_genus(g));
        let full = 1 + 3 * g as i64 * (g as i64 - 1);
        if d != Divisor::TThetaNull {
            prop_assert_eq!(m.arithmetic_genus(), full);
        }
    }

    #[test]
    fn genus_table_is_consistent(g in 3u64..=60) {
        let t = genus_table(g).unwrap();
        for (name, ok) in t.consistency_checks() {
            prop_assert!(ok, "{} at g={}", name, g);
        }
    }

    #[test]
    fn class_meets_test_curves(g in 3u64..=40) {
        let d = picard::szego_hodge_class(g).unwrap();
        for (name, want, got) in picard::test_curve_residuals(&d, picard::G0BetaReading::Zero).unwrap() {
            prop_assert_eq!(want, got, "{}", name);
        }
        let (w, ledger) = picard::chern_weight(g).unwrap();
        prop_assert!(ledger.replays_cleanly());
        prop_assert_eq!(w, rat(77 * g as i64 - 25, 4));
        prop_assert!(!d.c_lambda.is_zero() && d.c_lambda > Q::one());
    }
}
