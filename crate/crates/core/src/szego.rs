//! The Szego kernel `theta[c](u) / theta[c](0)` on the Jacobian and the
//! genus-one vanishing locus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::theta::{self, MultiIndex, PeriodMatrix, ThetaCharacteristic, ThetaError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SzegoError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("characteristic {0} is odd")]
    OddCharacteristic(String),
    #[error("theta[{char}](0) = {value:e} vanishes; the kernel is undefined on the theta-null locus")]
    ThetaNull { char: String, value: f64 },
    #[error("no zero found: best residual {0:e}")]
    NotFound(f64),
}

pub type Result<T> = std::result::Result<T, SzegoError>;

/// Period matrix and even characteristic with `theta[c](0)` cached.
#[derive(Debug, Clone)]
pub struct SzegoContext {
    period: PeriodMatrix,
    char: ThetaCharacteristic,
    theta_at_zero: Complex64,
    tol: Tolerance,
}

impl SzegoContext {
    pub fn new(period: PeriodMatrix, char: ThetaCharacteristic, t: &Tolerance) -> Result<Self> {
        let g = period.genus();
        if char.genus() != g {
            return Err(ThetaError::DimensionMismatch { expected: g, found: char.genus() }.into());
        }
        if !char.is_even() {
            return Err(SzegoError::OddCharacteristic(char.to_string()));
        }
        let theta_at_zero = theta::theta(&period, &vec![Complex64::new(0.0, 0.0); g], &char, t)?;
        if theta_at_zero.norm() <= t.eps_zero {
            return Err(SzegoError::ThetaNull { char: char.to_string(), value: theta_at_zero.norm() });
        }
        Ok(SzegoContext { period, char, theta_at_zero, tol: *t })
    }

    pub fn period(&self) -> &PeriodMatrix {
        &self.period
    }

    pub fn characteristic(&self) -> &ThetaCharacteristic {
        &self.char
    }

    pub fn theta_at_zero(&self) -> Complex64 {
        self.theta_at_zero
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn szego(&self, u: &[Complex64]) -> Result<Complex64> {
        Ok(theta::theta(&self.period, u, &self.char, &self.tol)? / self.theta_at_zero)
    }

    /// Whether `|sz(u)| < eps_zero`.
    pub fn on_scorza_locus(&self, u: &[Complex64]) -> Result<bool> {
        Ok(self.szego(u)?.norm() < self.tol.eps_zero)
    }
}

/// Elliptic curve `C / (Z + tau Z)` with an even spin structure and the zero
/// of its theta function in the fundamental cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSpinPoint {
    pub tau: Complex64,
    pub char: ThetaCharacteristic,
    pub zero_w: Complex64,
    pub residual: f64,
}

const GRID: usize = 64;
const NEWTON_STEPS: usize = 50;
const RESIDUAL: f64 = 1e-10;

/// Lattice coordinates `(a, b)` with `w = a + b tau`.
pub fn lattice_coordinates(tau: Complex64, w: Complex64) -> (f64, f64) {
    let b = w.im / tau.im;
    (w.re - b * tau.re, b)
}

/// Representative of `w` in the cell `{a + b tau : 0 <= a, b < 1}`;
/// coordinates within `snap` of an integer are rounded to it first.
pub fn reduce_to_cell(tau: Complex64, w: Complex64, snap: f64) -> Complex64 {
    let reduce = |x: f64| {
        let r = x.round();
        let x = if (x - r).abs() < snap { r } else { x };
        x - x.floor()
    };
    let (a, b) = lattice_coordinates(tau, w);
    Complex64::new(reduce(a), 0.0) + reduce(b) * tau
}

/// Zero of `theta[c](. | tau)` in the fundamental cell: coarse grid search
/// followed by Newton refinement.
pub fn elliptic_scorza_offset(tau: Complex64, c: &ThetaCharacteristic, t: &Tolerance) -> Result<EllipticSpinPoint> {
    if c.genus() != 1 {
        return Err(ThetaError::DimensionMismatch { expected: 1, found: c.genus() }.into());
    }
    if !c.is_even() {
        return Err(SzegoError::OddCharacteristic(c.to_string()));
    }
    let p = PeriodMatrix::diagonal(&[tau])?;
    let f = |w: Complex64| theta::theta(&p, &[w], c, t);
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for j in 0..GRID {
        for k in 0..GRID {
            let w = Complex64::new(j as f64 / GRID as f64, 0.0) + (k as f64 / GRID as f64) * tau;
            let v = f(w)?.norm();
            if v < best.0 {
                best = (v, w);
            }
        }
    }
    let (mut residual, mut w) = best;
    let d1 = MultiIndex::new(&[0]);
    for _ in 0..NEWTON_STEPS {
        if residual < RESIDUAL {
            break;
        }
        let vals = theta::theta_derivs(&p, &[w], c, &[MultiIndex::value(), d1.clone()], t)?;
        if vals[1].norm() == 0.0 {
            break;
        }
        w -= vals[0] / vals[1];
        residual = f(w)?.norm();
    }
    if !(residual < RESIDUAL) {
        return Err(SzegoError::NotFound(residual));
    }
    let zero_w = reduce_to_cell(tau, w, 1e-9);
    let residual = f(zero_w)?.norm();
    Ok(EllipticSpinPoint { tau, char: c.clone(), zero_w, residual })
}
