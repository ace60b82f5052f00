//! Values computed independently at 40 digits (plain lattice sums over
//! |n| <= 30, mpmath) and frozen here.

use num_complex::Complex64;

use scorza::jets::{scorza_quartic, theta_jet};
use scorza::oracle::ExtendedTheta;
use scorza::szego::elliptic_scorza_offset;
use scorza::theta::{quasi_period_factor, theta, theta_deriv, MultiIndex, PeriodMatrix, ThetaCharacteristic, Tolerance};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ch(s: &str) -> ThetaCharacteristic {
    s.parse().unwrap()
}

fn tau_i() -> PeriodMatrix {
    PeriodMatrix::new(vec![vec![c(0.0, 1.0)]]).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

const THETA3_I: f64 = 1.086_434_811_213_308;
const THETA3_I_D2: f64 = -3.413_135_621_511_942;
const THETA3_I_D4: f64 = 134.875_637_882_338_06;

#[test]
fn genus_one_theta_constants() {
    let p = tau_i();
    let t = Tolerance::default();
    let z = [c(0.0, 0.0)];
    let cases = [
        ("0;0", [THETA3_I, THETA3_I_D2, THETA3_I_D4]),
        ("1;0", [0.913_579_138_156_116_8, -9.151_119_843_194_361, 102.261_328_004_803_47]),
        ("0;1", [0.913_579_138_156_116_8, 3.410_932_825_386_058, -134.527_786_260_918_34]),
    ];
    for (s, want) in cases {
        for (order, w) in [0usize, 2, 4].into_iter().zip(want) {
            let mu = MultiIndex::new(&vec![0; order]);
            let got = theta_deriv(&p, &z, &ch(s), &mu, &t).unwrap();
            assert!(rel(got, c(w, 0.0)) < 1e-12, "{s} order {order}: {got}");
        }
    }
    let odd = theta_deriv(&p, &z, &ch("1;1"), &MultiIndex::new(&[0]), &t).unwrap();
    assert!(rel(odd, c(-2.848_694_603_987_787, 0.0)) < 1e-12);
}

#[test]
fn extended_oracle_agrees_with_reference() {
    let mut ext = ExtendedTheta::new(40);
    let got = ext.theta(&tau_i(), &[c(0.0, 0.0)], &ch("0;0"));
    assert!(rel(got, c(THETA3_I, 0.0)) < 1e-15);
    let got = ext.theta(&tau_i(), &[c(0.3, 0.2)], &ch("0;0"));
    assert!(rel(got, c(0.949_244_469_410_580_8, -0.132_682_156_381_781_87)) < 1e-15);
}

#[test]
fn genus_two_values() {
    let p = PeriodMatrix::new(vec![vec![c(0.1, 1.2), c(0.3, 0.4)], vec![c(0.3, 0.4), c(-0.2, 1.5)]]).unwrap();
    let z = [c(0.25, -0.1), c(-0.3, 0.2)];
    let t = Tolerance::default();
    let cases = [
        ("0,0;0,0", c(1.003_641_251_413_993, 0.074_202_157_598_469_96), c(0.218_014_430_924_472_28, 0.640_055_386_715_392_1)),
        ("1,0;0,1", c(0.540_490_939_828_441_7, 0.160_932_478_433_663_24), c(-0.414_530_443_028_350_7, -1.119_274_600_532_243_6)),
        ("1,1;1,1", c(0.044_984_917_846_896_4, 0.408_017_579_417_978_8), c(2.841_928_847_692_172_7, 5.110_299_068_995_503_5)),
    ];
    for (s, value, mixed) in cases {
        let v = theta(&p, &z, &ch(s), &t).unwrap();
        let d = theta_deriv(&p, &z, &ch(s), &MultiIndex::new(&[0, 1]), &t).unwrap();
        assert!(rel(v, value) < 1e-11, "{s}: {v}");
        assert!(rel(d, mixed) < 1e-11, "{s}: {d}");
    }
}

#[test]
fn genus_one_quartic_from_constants() {
    let j = theta_jet(&tau_i(), &ch("0;0"), &Tolerance::default()).unwrap();
    let q = scorza_quartic(&j);
    let want = 3.0 * THETA3_I_D2 * THETA3_I_D2 - THETA3_I * THETA3_I_D4;
    assert!(rel(q.get(0, 0, 0, 0), c(want, 0.0)) < 1e-10);
}

#[test]
fn quasi_period_ratio() {
    let p = tau_i();
    let t = Tolerance::default();
    let z = [c(0.3, 0.2)];
    let f = quasi_period_factor(&p, &ch("0;0"), &z, &[0], &[1]).unwrap();
    let shifted = [z[0] + c(0.0, 1.0)];
    let ratio = theta(&p, &shifted, &ch("0;0"), &t).unwrap() / theta(&p, &z, &ch("0;0"), &t).unwrap();
    assert!(rel(f, ratio) < 1e-9);
}

#[test]
fn theta3_zero_at_half_period() {
    let pt = elliptic_scorza_offset(c(0.0, 1.0), &ch("0;0"), &Tolerance::default()).unwrap();
    assert!((pt.zero_w - c(0.5, 0.5)).norm() < 1e-10);
    assert!(pt.residual < 1e-10);
}
