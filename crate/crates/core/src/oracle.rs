//! Extended-precision reference evaluation of theta functions.
//!
//! Independent of [`crate::theta`]: sums a plain box of lattice points in
//! software floating point (default 40 significant digits, overridable with the
//! `SCORZA_PRECISION` environment variable), building each summand from its
//! neighbours by multiplicative updates so only `g + 1 + g^2` exponentials
//! are taken per evaluation. Used for finite-difference checks of analytic
//! derivatives and for frozen reference values.

use std::collections::HashMap;
use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

use crate::theta::{MultiIndex, PeriodMatrix, ThetaCharacteristic};

const RM: RoundingMode = RoundingMode::ToEven;

/// Environment variable holding the working precision in decimal digits.
pub const PRECISION_ENV: &str = "SCORZA_PRECISION";
pub const DEFAULT_DIGITS: usize = 40;

#[derive(Clone, Debug)]
struct BigC {
    re: BigFloat,
    im: BigFloat,
}

impl BigC {
    fn from_c64(z: Complex64, p: usize) -> Self {
        BigC { re: BigFloat::from_f64(z.re, p), im: BigFloat::from_f64(z.im, p) }
    }

    fn zero(p: usize) -> Self {
        BigC { re: BigFloat::from_f64(0.0, p), im: BigFloat::from_f64(0.0, p) }
    }

    fn add(&self, o: &BigC, p: usize) -> BigC {
        BigC { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }

    fn mul(&self, o: &BigC, p: usize) -> BigC {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        BigC { re, im }
    }

    fn scale(&self, s: &BigFloat, p: usize) -> BigC {
        BigC { re: self.re.mul(s, p, RM), im: self.im.mul(s, p, RM) }
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(big_to_f64(&self.re), big_to_f64(&self.im))
    }
}

fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // The decimal rendering is exact enough to round correctly to f64 for
    // every precision we use.
    x.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

/// Theta evaluator at extended precision.
pub struct ExtendedTheta {
    prec: usize,
    digits: usize,
    consts: Consts,
}

impl ExtendedTheta {
    pub fn new(digits: usize) -> Self {
        let digits = digits.max(20);
        let prec = ((digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 16).div_ceil(64) * 64;
        ExtendedTheta { prec, digits, consts: Consts::new().expect("constant cache") }
    }

    /// Precision from `SCORZA_PRECISION` (decimal digits), else the default.
    pub fn from_env() -> Self {
        let digits = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .unwrap_or(DEFAULT_DIGITS);
        Self::new(digits)
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    fn exp_i(&mut self, phase: &BigC) -> BigC {
        // exp(i * phase) = exp(-Im phase) (cos Re phase + i sin Re phase)
        let p = self.prec;
        let mag = phase.im.neg().exp(p, RM, &mut self.consts);
        let c = phase.re.cos(p, RM, &mut self.consts);
        let s = phase.re.sin(p, RM, &mut self.consts);
        BigC { re: mag.mul(&c, p, RM), im: mag.mul(&s, p, RM) }
    }

    fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.prec, RM)
    }

    /// Derivatives of `theta[c]` at the point `z + h * offset`, summed over
    /// a box of lattice points large enough for the working precision.
    fn sum_big(
        &mut self,
        period: &PeriodMatrix,
        z: &[Complex64],
        h: f64,
        offset: &[i64],
        c: &ThetaCharacteristic,
        mus: &[MultiIndex],
    ) -> Vec<BigC> {
        let p = self.prec;
        let g = period.genus();
        let eps = c.eps();
        let del = c.del();
        let pi = self.pi();
        let two_pi = pi.mul(&BigFloat::from_f64(2.0, p), p, RM);

        // Box around the Gaussian center.
        let shifted: Vec<Complex64> =
            (0..g).map(|k| z[k] + Complex64::new(h * offset[k] as f64, 0.0)).collect();
        let center = gaussian_center(period, &shifted, &eps);
        let tail = self.digits as f64 * std::f64::consts::LN_10 + 40.0;
        let half_width = (tail / (PI * period.lambda_min())).sqrt() + 2.0;
        let lo: Vec<i64> = center.iter().map(|c| (c - half_width).floor() as i64).collect();
        let hi: Vec<i64> = center.iter().map(|c| (c + half_width).ceil() as i64).collect();

        // Big-float inputs; z + h*offset is formed exactly at working precision.
        let big_h = BigFloat::from_f64(h, p);
        let zb: Vec<BigC> = (0..g)
            .map(|k| {
                let base = BigC::from_c64(z[k], p);
                let step = big_h.mul(&BigFloat::from_f64(offset[k] as f64, p), p, RM);
                BigC { re: base.re.add(&step, p, RM), im: base.im }
            })
            .collect();
        let omega: Vec<BigC> = (0..g * g)
            .map(|idx| BigC::from_c64(period.entry(idx / g, idx % g), p))
            .collect();
        let xs_of = |n: &[i64]| -> Vec<BigFloat> {
            (0..g).map(|k| BigFloat::from_f64(n[k] as f64 + eps[k], p)).collect()
        };

        // Phase at the corner: pi x^T Omega x + 2 pi x^T (z + del), as a complex number
        // to be fed to exp(i * .).
        let x0 = xs_of(&lo);
        let zd: Vec<BigC> = (0..g)
            .map(|k| BigC { re: zb[k].re.add(&BigFloat::from_f64(del[k], p), p, RM), im: zb[k].im.clone() })
            .collect();
        let omega_x = |x: &[BigFloat], j: usize| -> BigC {
            let mut acc = BigC::zero(p);
            for k in 0..g {
                acc = acc.add(&omega[j * g + k].scale(&x[k], p), p);
            }
            acc
        };
        let mut quad = BigC::zero(p);
        let mut lin = BigC::zero(p);
        for j in 0..g {
            quad = quad.add(&omega_x(&x0, j).scale(&x0[j], p), p);
            lin = lin.add(&zd[j].scale(&x0[j], p), p);
        }
        let phase0 = quad.scale(&pi, p).add(&lin.scale(&two_pi, p), p);
        let t0 = self.exp_i(&phase0);
        // Step multipliers B_j = exp(i pi (2 (Omega x)_j + Omega_jj) + 2 pi i (z_j + del_j)).
        let mut b0 = Vec::with_capacity(g);
        for j in 0..g {
            let ox = omega_x(&x0, j);
            let two_ox = ox.scale(&BigFloat::from_f64(2.0, p), p);
            let arg = two_ox.add(&omega[j * g + j], p).scale(&pi, p).add(&zd[j].scale(&two_pi, p), p);
            b0.push(self.exp_i(&arg));
        }
        // C_jl = exp(2 pi i Omega_jl).
        let mut cm = Vec::with_capacity(g * g);
        for idx in 0..g * g {
            let arg = omega[idx].scale(&two_pi, p);
            cm.push(self.exp_i(&arg));
        }

        // Derivative factor tables: (2 pi i x_k) for every box coordinate.
        let two_pi_i_x = |x: &BigFloat| -> BigC {
            BigC { re: BigFloat::from_f64(0.0, p), im: two_pi.mul(x, p, RM) }
        };
        let factor_tables: Vec<HashMap<i64, BigC>> = (0..g)
            .map(|k| {
                (lo[k]..=hi[k])
                    .map(|n| (n, two_pi_i_x(&BigFloat::from_f64(n as f64 + eps[k], p))))
                    .collect()
            })
            .collect();

        let mut sums = vec![BigC::zero(p); mus.len()];
        let mut n = lo.clone();
        let mut state = Walk { t: t0, b: b0 };
        walk(0, g, &lo, &hi, &mut n, &mut state, &cm, p, &mut |n, t| {
            for (s, mu) in sums.iter_mut().zip(mus) {
                let mut term = t.clone();
                for &k in mu.indices() {
                    term = term.mul(&factor_tables[k][&n[k]], p);
                }
                *s = s.add(&term, p);
            }
        });
        sums
    }

    fn sum(
        &mut self,
        period: &PeriodMatrix,
        z: &[Complex64],
        h: f64,
        offset: &[i64],
        c: &ThetaCharacteristic,
        mus: &[MultiIndex],
    ) -> Vec<Complex64> {
        self.sum_big(period, z, h, offset, c, mus).iter().map(BigC::to_c64).collect()
    }

    /// Derivatives `d^mu theta[c](z)` by brute-force differentiated lattice sum.
    pub fn theta_derivs(
        &mut self,
        period: &PeriodMatrix,
        z: &[Complex64],
        c: &ThetaCharacteristic,
        mus: &[MultiIndex],
    ) -> Vec<Complex64> {
        let zero = vec![0i64; period.genus()];
        self.sum(period, z, 0.0, &zero, c, mus)
    }

    pub fn theta(&mut self, period: &PeriodMatrix, z: &[Complex64], c: &ThetaCharacteristic) -> Complex64 {
        self.theta_derivs(period, z, c, &[MultiIndex::value()])[0]
    }

    /// Central finite-difference approximation of `d^mu theta[c](z)` with step
    /// `h`, built from theta values only. Each coordinate appearing `m` times in
    /// `mu` gets the standard `m`-th central difference stencil.
    pub fn finite_difference(
        &mut self,
        period: &PeriodMatrix,
        z: &[Complex64],
        c: &ThetaCharacteristic,
        mu: &MultiIndex,
        h: f64,
    ) -> Complex64 {
        let g = period.genus();
        let exps = mu.exponents(g);
        // Tensor product of 1-D stencils: list of (offset vector, weight).
        let mut stencil: Vec<(Vec<i64>, f64)> = vec![(vec![0; g], 1.0)];
        for (k, &m) in exps.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let (pts, scale) = central_stencil(m);
            let mut next = Vec::new();
            for (off, w) in &stencil {
                for &(dk, wk) in pts {
                    let mut o = off.clone();
                    o[k] += dk;
                    next.push((o, w * wk / scale));
                }
            }
            stencil = next;
        }
        // Combine at working precision: the differences cancel many digits.
        let p = self.prec;
        let mut acc = BigC::zero(p);
        for (off, w) in stencil {
            let v = self.sum_big(period, z, h, &off, c, &[MultiIndex::value()]).remove(0);
            acc = acc.add(&v.scale(&BigFloat::from_f64(w, p), p), p);
        }
        let mut hm = BigFloat::from_f64(1.0, p);
        for _ in 0..mu.order() {
            hm = hm.mul(&BigFloat::from_f64(h, p), p, RM);
        }
        let inv = BigFloat::from_f64(1.0, p).div(&hm, p, RM);
        acc.scale(&inv, p).to_c64()
    }
}

/// `(offset, weight)` pairs and the denominator (excluding `h^m`) of the
/// `m`-th central difference.
fn central_stencil(m: usize) -> (&'static [(i64, f64)], f64) {
    match m {
        1 => (&[(-1, -1.0), (1, 1.0)], 2.0),
        2 => (&[(-1, 1.0), (0, -2.0), (1, 1.0)], 1.0),
        3 => (&[(-2, -1.0), (-1, 2.0), (1, -2.0), (2, 1.0)], 2.0),
        4 => (&[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)], 1.0),
        _ => panic!("finite differences only up to order 4"),
    }
}

fn gaussian_center(period: &PeriodMatrix, z: &[Complex64], eps: &[f64]) -> Vec<f64> {
    // -eps - Y^{-1} Im z, with Y^{-1} Im z from a small Gaussian elimination.
    let g = period.genus();
    let mut a: Vec<Vec<f64>> = (0..g)
        .map(|i| {
            let mut row: Vec<f64> = (0..g).map(|j| period.entry(i, j).im).collect();
            row.push(z[i].im);
            row
        })
        .collect();
    for col in 0..g {
        let piv = (col..g).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        for r in 0..g {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..=g {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..g).map(|i| -eps[i] - a[i][g] / a[i][i]).collect()
}

struct Walk {
    t: BigC,
    b: Vec<BigC>,
}

#[allow(clippy::too_many_arguments)]
fn walk<F: FnMut(&[i64], &BigC)>(
    level: usize,
    g: usize,
    lo: &[i64],
    hi: &[i64],
    n: &mut Vec<i64>,
    state: &mut Walk,
    cm: &[BigC],
    p: usize,
    f: &mut F,
) {
    if level == g {
        f(n, &state.t);
        return;
    }
    let mut local = Walk { t: state.t.clone(), b: state.b.clone() };
    for k in lo[level]..=hi[level] {
        n[level] = k;
        let mut inner = Walk { t: local.t.clone(), b: local.b.clone() };
        walk(level + 1, g, lo, hi, n, &mut inner, cm, p, f);
        // Advance coordinate `level` by one.
        local.t = local.t.mul(&local.b[level], p);
        for j in 0..g {
            local.b[j] = local.b[j].mul(&cm[j * g + level], p);
        }
    }
    n[level] = lo[level];
}
