//! Riemann theta functions with half-integer characteristics.
//!
//! The series
//!
//! ```text
//! theta[eps, del](z | Omega) = sum_{n in Z^g} exp(pi i (n+eps)^T Omega (n+eps) + 2 pi i (n+eps)^T (z+del))
//! ```
//!
//! is summed over the lattice points inside an ellipsoid adapted to `Im Omega`
//! and to the imaginary part of `z`. The ellipsoid radius is the smallest one
//! for which a Gaussian tail bound (disjoint balls around lattice points,
//! integrated against the radial majorant of the summand) drops below the
//! requested truncation tolerance. Derivatives are summed term by term.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Highest derivative order supported by [`theta_deriv`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("imaginary part of the period matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("period matrix is not symmetric (entry ({0}, {1}))")]
    NotSymmetric(usize, usize),
    #[error("period matrix must be square and non-empty")]
    NotSquare,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("derivative order {0} exceeds the supported maximum of 4")]
    OrderTooHigh(usize),
    #[error("derivative index {index} out of range for genus {g}")]
    IndexOutOfRange { index: usize, g: usize },
    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, ThetaError>;

/// Symmetric g x g complex matrix with positive definite imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeriodMatrixJson", into = "PeriodMatrixJson")]
pub struct PeriodMatrix {
    g: usize,
    omega: Vec<Complex64>,
    /// Upper Cholesky factor of `Im Omega`.
    chol: Vec<f64>,
    imag_inv: Vec<f64>,
    lambda_min: f64,
    /// Length of the shortest nonzero vector of the lattice with Gram matrix `pi Im Omega`.
    shortest: f64,
}

#[derive(Serialize, Deserialize)]
struct PeriodMatrixJson {
    g: usize,
    omega: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<PeriodMatrixJson> for PeriodMatrix {
    type Error = ThetaError;

    fn try_from(raw: PeriodMatrixJson) -> Result<Self> {
        if raw.omega.len() != raw.g {
            return Err(ThetaError::DimensionMismatch { expected: raw.g, found: raw.omega.len() });
        }
        let rows = raw
            .omega
            .iter()
            .map(|row| row.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
            .collect::<Vec<Vec<_>>>();
        PeriodMatrix::new(rows)
    }
}

impl From<PeriodMatrix> for PeriodMatrixJson {
    fn from(p: PeriodMatrix) -> Self {
        let g = p.g;
        let omega = (0..g)
            .map(|i| (0..g).map(|j| [p.omega[i * g + j].re, p.omega[i * g + j].im]).collect())
            .collect();
        PeriodMatrixJson { g, omega }
    }
}

impl PeriodMatrix {
    /// Validates symmetry and positive definiteness of the imaginary part.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let g = rows.len();
        if g == 0 || rows.iter().any(|r| r.len() != g) {
            return Err(ThetaError::NotSquare);
        }
        let mut omega = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..g {
            for j in 0..g {
                let a = rows[i][j];
                let b = rows[j][i];
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(ThetaError::NonPositiveDefinite);
                }
                let scale = 1.0f64.max(a.norm()).max(b.norm());
                if (a - b).norm() > 1e-12 * scale {
                    return Err(ThetaError::NotSymmetric(i, j));
                }
                omega[i * g + j] = (a + b) * 0.5;
            }
        }
        let imag: Vec<f64> = omega.iter().map(|z| z.im).collect();
        let eig = linalg::symmetric_eigenvalues(&imag, g);
        let lambda_min = eig[0];
        if !(lambda_min > 0.0) {
            return Err(ThetaError::NonPositiveDefinite);
        }
        let chol = linalg::cholesky_upper(&imag, g).ok_or(ThetaError::NonPositiveDefinite)?;
        let imag_inv = linalg::spd_inverse(&chol, g);
        let shortest = shortest_vector_length(&chol, &imag, g);
        Ok(PeriodMatrix { g, omega, chol, imag_inv, lambda_min, shortest })
    }

    /// Block-free diagonal period matrix `diag(tau_1, ..., tau_g)`.
    pub fn diagonal(taus: &[Complex64]) -> Result<Self> {
        let g = taus.len();
        let rows = (0..g)
            .map(|i| {
                (0..g)
                    .map(|j| if i == j { taus[i] } else { Complex64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.omega[i * self.g + j]
    }

    /// Smallest eigenvalue of `Im Omega`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    fn imag(&self, i: usize, j: usize) -> f64 {
        self.omega[i * self.g + j].im
    }

    /// `Omega * n` for an integer vector.
    pub fn apply_integer(&self, n: &[i64]) -> Vec<Complex64> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.entry(i, j) * n[j] as f64).sum())
            .collect()
    }
}

/// `min_{n != 0} sqrt(pi n^T Y n)` by enumerating the ellipsoid bounded by the
/// smallest diagonal entry.
fn shortest_vector_length(chol: &[f64], y: &[f64], g: usize) -> f64 {
    let bound = (0..g).map(|i| y[i * g + i]).fold(f64::INFINITY, f64::min);
    let center = vec![0.0; g];
    let mut best = bound;
    for_each_lattice_point(chol, g, &center, bound * (1.0 + 1e-9), |n, q| {
        if n.iter().any(|&k| k != 0) && q < best {
            best = q;
        }
    });
    (PI * best).sqrt()
}

/// Calls `f(n, q)` for every integer vector `n` with `q = |R (n - center)|^2 <= r2`,
/// where `R` is upper triangular. The inclusion test uses the directly
/// evaluated quadratic form, so point sets symmetric about `center` stay
/// symmetric in floating point.
pub(crate) fn for_each_lattice_point<F: FnMut(&[i64], f64)>(
    chol: &[f64],
    g: usize,
    center: &[f64],
    r2: f64,
    mut f: F,
) {
    let mut n = vec![0i64; g];
    let mut y = vec![0.0; g];
    enumerate_level(chol, g, center, r2, g, 0.0, &mut n, &mut y, &mut f);
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level<F: FnMut(&[i64], f64)>(
    chol: &[f64],
    g: usize,
    center: &[f64],
    r2: f64,
    level: usize,
    acc: f64,
    n: &mut [i64],
    y: &mut [f64],
    f: &mut F,
) {
    if level == 0 {
        let mut q = 0.0;
        for i in 0..g {
            let mut s = 0.0;
            for j in i..g {
                s += chol[i * g + j] * y[j];
            }
            q += s * s;
        }
        if q <= r2 {
            f(n, q);
        }
        return;
    }
    let i = level - 1;
    let rii = chol[i * g + i];
    let mut partial = 0.0;
    for j in (i + 1)..g {
        partial += chol[i * g + j] * y[j];
    }
    let rem = (r2 - acc).max(0.0);
    let half = rem.sqrt() / rii * (1.0 + 1e-9) + 1e-9;
    let mid = center[i] - partial / rii;
    let lo = (mid - half).ceil() as i64;
    let hi = (mid + half).floor() as i64;
    for k in lo..=hi {
        n[i] = k;
        y[i] = k as f64 - center[i];
        let t = rii * y[i] + partial;
        let next = acc + t * t;
        if next <= r2 * (1.0 + 1e-9) + 1e-12 {
            enumerate_level(chol, g, center, r2, i, next, n, y, f);
        }
    }
}

/// Half-integer characteristic `[eps; del]`, stored as numerators over 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CharacteristicJson", into = "CharacteristicJson")]
pub struct ThetaCharacteristic {
    eps: Vec<u8>,
    del: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct CharacteristicJson {
    eps: Vec<u8>,
    del: Vec<u8>,
}

impl TryFrom<CharacteristicJson> for ThetaCharacteristic {
    type Error = ThetaError;

    fn try_from(raw: CharacteristicJson) -> Result<Self> {
        ThetaCharacteristic::new(raw.eps, raw.del)
    }
}

impl From<ThetaCharacteristic> for CharacteristicJson {
    fn from(c: ThetaCharacteristic) -> Self {
        CharacteristicJson { eps: c.eps, del: c.del }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

impl ThetaCharacteristic {
    /// `eps` and `del` hold the numerators (0 or 1) of entries over 2.
    pub fn new(eps: Vec<u8>, del: Vec<u8>) -> Result<Self> {
        if eps.len() != del.len() || eps.is_empty() {
            return Err(ThetaError::InvalidCharacteristic(format!(
                "eps has length {}, del has length {}",
                eps.len(),
                del.len()
            )));
        }
        if eps.iter().chain(&del).any(|&v| v > 1) {
            return Err(ThetaError::InvalidCharacteristic(
                "entries must be 0 or 1 (numerators over 2)".into(),
            ));
        }
        Ok(ThetaCharacteristic { eps, del })
    }

    pub fn zero(g: usize) -> Self {
        ThetaCharacteristic { eps: vec![0; g], del: vec![0; g] }
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    pub fn eps_numerators(&self) -> &[u8] {
        &self.eps
    }

    pub fn del_numerators(&self) -> &[u8] {
        &self.del
    }

    pub fn eps(&self) -> Vec<f64> {
        self.eps.iter().map(|&e| e as f64 * 0.5).collect()
    }

    pub fn del(&self) -> Vec<f64> {
        self.del.iter().map(|&d| d as f64 * 0.5).collect()
    }

    /// Even iff `4 eps^T del` is even.
    pub fn parity(&self) -> Parity {
        let dot: u32 = self.eps.iter().zip(&self.del).map(|(&e, &d)| (e * d) as u32).sum();
        if dot % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Characteristic on a product of two period matrices.
    pub fn concat(&self, other: &ThetaCharacteristic) -> ThetaCharacteristic {
        let mut eps = self.eps.clone();
        eps.extend_from_slice(&other.eps);
        let mut del = self.del.clone();
        del.extend_from_slice(&other.del);
        ThetaCharacteristic { eps, del }
    }
}

impl fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.eps), join(&self.del))
    }
}

impl FromStr for ThetaCharacteristic {
    type Err = ThetaError;

    /// Parses `"e1,e2;d1,d2"` with entries 0 or 1 (numerators over 2).
    fn from_str(s: &str) -> Result<Self> {
        let (e, d) = s
            .split_once(';')
            .ok_or_else(|| ThetaError::InvalidCharacteristic(format!("missing ';' in {s:?}")))?;
        let parse = |part: &str| -> Result<Vec<u8>> {
            part.split(',')
                .map(|t| {
                    t.trim().parse::<u8>().map_err(|_| {
                        ThetaError::InvalidCharacteristic(format!("bad entry {t:?} in {s:?}"))
                    })
                })
                .collect()
        };
        ThetaCharacteristic::new(parse(e)?, parse(d)?)
    }
}

/// All `4^g` characteristics in lexicographic order of `(eps, del)` bit patterns.
pub fn all_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    (0..(1u32 << (2 * g)))
        .map(|bits| {
            let eps = (0..g).map(|k| ((bits >> (2 * g - 1 - k)) & 1) as u8).collect();
            let del = (0..g).map(|k| ((bits >> (g - 1 - k)) & 1) as u8).collect();
            ThetaCharacteristic { eps, del }
        })
        .collect()
}

pub fn even_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    all_characteristics(g).into_iter().filter(|c| c.is_even()).collect()
}

pub fn odd_characteristics(g: usize) -> Vec<ThetaCharacteristic> {
    all_characteristics(g).into_iter().filter(|c| !c.is_even()).collect()
}

/// Truncation target and zero-detection threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_trunc: f64,
    pub eps_zero: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_trunc: 1e-12, eps_zero: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(eps_trunc: f64, eps_zero: f64) -> Result<Self> {
        if !(eps_trunc > 0.0 && eps_trunc.is_finite()) {
            return Err(ThetaError::InvalidTolerance(format!("eps_trunc = {eps_trunc}")));
        }
        if !(eps_zero > 0.0 && eps_zero < 1.0) {
            return Err(ThetaError::InvalidTolerance(format!("eps_zero = {eps_zero}")));
        }
        Ok(Tolerance { eps_trunc, eps_zero })
    }
}

/// Partial derivative multi-index, stored as a sorted list of coordinate indices.
///
/// `[0, 0, 2]` is `d^3 / dz_0^2 dz_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: &[usize]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn value() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Exponent vector of length `g`.
    pub fn exponents(&self, g: usize) -> Vec<usize> {
        let mut e = vec![0; g];
        for &i in &self.0 {
            e[i] += 1;
        }
        e
    }

    /// Every sorted multi-index of the given order in `g` variables.
    pub fn all_of_order(g: usize, order: usize) -> Vec<MultiIndex> {
        fn rec(g: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..g {
                cur.push(i);
                rec(g, i, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(g, 0, order, &mut Vec::new(), &mut out);
        out
    }
}

impl FromStr for MultiIndex {
    type Err = ThetaError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(MultiIndex::value());
        }
        let v = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| ThetaError::InvalidCharacteristic(format!("bad index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiIndex::new(&v))
    }
}

fn check_point(p: &PeriodMatrix, z: &[Complex64]) -> Result<()> {
    if z.len() != p.g {
        return Err(ThetaError::DimensionMismatch { expected: p.g, found: z.len() });
    }
    Ok(())
}

fn check_char(p: &PeriodMatrix, c: &ThetaCharacteristic) -> Result<()> {
    if c.genus() != p.g {
        return Err(ThetaError::DimensionMismatch { expected: p.g, found: c.genus() });
    }
    Ok(())
}

fn check_index(p: &PeriodMatrix, mu: &MultiIndex) -> Result<()> {
    if mu.order() > MAX_DERIVATIVE_ORDER {
        return Err(ThetaError::OrderTooHigh(mu.order()));
    }
    if let Some(&bad) = mu.0.iter().find(|&&i| i >= p.g) {
        return Err(ThetaError::IndexOutOfRange { index: bad, g: p.g });
    }
    Ok(())
}

/// Ellipsoid center (in lattice coordinates) and `pi w^T Y w` for `w = Y^{-1} Im z`.
struct Shift {
    center: Vec<f64>,
    w_norm: f64,
    log_scale: f64,
}

fn shift(p: &PeriodMatrix, z: &[Complex64], eps: &[f64]) -> Shift {
    let g = p.g;
    let w: Vec<f64> = (0..g)
        .map(|i| (0..g).map(|j| p.imag_inv[i * g + j] * z[j].im).sum())
        .collect();
    let mut quad = 0.0;
    for i in 0..g {
        for j in 0..g {
            quad += w[i] * p.imag(i, j) * w[j];
        }
    }
    Shift {
        center: (0..g).map(|i| -eps[i] - w[i]).collect(),
        w_norm: w.iter().map(|x| x * x).sum::<f64>().sqrt(),
        log_scale: PI * quad,
    }
}

/// `e^x Gamma(a, x)` for `a` a positive half-integer.
fn scaled_upper_gamma(two_a: usize, x: f64) -> f64 {
    // Gamma(1/2, x) = sqrt(pi) erfc(sqrt x), Gamma(1, x) = e^{-x},
    // Gamma(a + 1, x) = a Gamma(a, x) + x^a e^{-x}.
    let (mut a, mut val) = if two_a % 2 == 1 {
        let head = if x > 600.0 {
            // asymptotic expansion of sqrt(pi) e^x erfc(sqrt x)
            (1.0 - 0.5 / x + 0.75 / (x * x)) / x.sqrt()
        } else {
            PI.sqrt() * libm::erfc(x.sqrt()) * x.exp()
        };
        (0.5, head)
    } else {
        (1.0, 1.0)
    };
    while ((2.0 * a) as usize) < two_a {
        val = a * val + x.powf(a);
        a += 1.0;
    }
    val
}

/// Natural log of the tail bound for summation radius `r` (in units where the
/// summand decays as `exp(-|v|^2)`).
fn log_tail_bound(p: &PeriodMatrix, sh: &Shift, order: usize, r: f64) -> f64 {
    let g = p.g;
    let rho = p.shortest;
    let x0 = r - rho;
    if x0 <= 0.0 {
        return f64::INFINITY;
    }
    let a = 1.0 / (PI * p.lambda_min).sqrt();
    let b = sh.w_norm;
    // Majorant h(s) = exp(-s^2) (a s + b)^N must be decreasing past x0.
    if order > 0 {
        let n = order as f64;
        let s_star = (-2.0 * b + (4.0 * b * b + 8.0 * n * a * a).sqrt()) / (4.0 * a);
        if x0 < s_star {
            return f64::INFINITY;
        }
    }
    // Coefficients of (s + rho/2)^{g-1} (a s + b)^N.
    let mut poly = vec![1.0];
    for _ in 0..g.saturating_sub(1) {
        poly = poly_mul(&poly, &[rho / 2.0, 1.0]);
    }
    for _ in 0..order {
        poly = poly_mul(&poly, &[b, a]);
    }
    let x2 = x0 * x0;
    // int_{x0}^inf s^k e^{-s^2} ds = Gamma((k+1)/2, x0^2) / 2
    let integral: f64 = poly
        .iter()
        .enumerate()
        .map(|(k, c)| c * 0.5 * scaled_upper_gamma(k + 1, x2))
        .sum();
    sh.log_scale - x2
        + order as f64 * (2.0 * PI).ln()
        + (g as f64).ln()
        + g as f64 * (2.0 / rho).ln()
        + integral.ln()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Smallest radius (in units of `sqrt(pi) |Im Omega^{1/2} (n - c)|`) whose tail
/// bound is below `eps`.
fn radius_for(p: &PeriodMatrix, sh: &Shift, order: usize, eps: f64) -> f64 {
    let target = eps.ln();
    let mut hi = p.shortest + 1.0;
    while log_tail_bound(p, sh, order, hi) > target {
        hi *= 1.5;
        if hi > 1e4 {
            break;
        }
    }
    let mut lo = p.shortest;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if log_tail_bound(p, sh, order, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Truncation radius used by [`theta_deriv`] for derivatives up to `order`.
pub fn truncation_radius(
    p: &PeriodMatrix,
    z: &[Complex64],
    c: &ThetaCharacteristic,
    order: usize,
    t: &Tolerance,
) -> Result<f64> {
    check_point(p, z)?;
    check_char(p, c)?;
    let sh = shift(p, z, &c.eps());
    Ok(radius_for(p, &sh, order, t.eps_trunc))
}

/// Evaluates several derivatives of `theta[c]` at `z` in one pass over the
/// lattice, using the given summation radius.
pub fn theta_derivs_with_radius(
    p: &PeriodMatrix,
    z: &[Complex64],
    c: &ThetaCharacteristic,
    mus: &[MultiIndex],
    radius: f64,
) -> Result<Vec<Complex64>> {
    check_point(p, z)?;
    check_char(p, c)?;
    for mu in mus {
        check_index(p, mu)?;
    }
    let g = p.g;
    let eps = c.eps();
    let del = c.del();
    let sh = shift(p, z, &eps);
    let zd: Vec<Complex64> = (0..g).map(|i| z[i] + del[i]).collect();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let pi_i = Complex64::new(0.0, PI);
    let mut sums = vec![Complex64::new(0.0, 0.0); mus.len()];
    let mut x = vec![0.0; g];
    let r2 = radius * radius / PI;
    for_each_lattice_point(&p.chol, g, &sh.center, r2, |n, _| {
        for i in 0..g {
            x[i] = n[i] as f64 + eps[i];
        }
        let mut quad = Complex64::new(0.0, 0.0);
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..g {
                row += p.omega[i * g + j] * x[j];
            }
            quad += row * x[i];
            lin += zd[i] * x[i];
        }
        let term = (pi_i * quad + two_pi_i * lin).exp();
        for (s, mu) in sums.iter_mut().zip(mus) {
            let mut factor = term;
            for &k in &mu.0 {
                factor *= two_pi_i * x[k];
            }
            *s += factor;
        }
    });
    Ok(sums)
}

/// Batch version of [`theta_deriv`]; the radius covers the highest order requested.
pub fn theta_derivs(
    p: &PeriodMatrix,
    z: &[Complex64],
    c: &ThetaCharacteristic,
    mus: &[MultiIndex],
    t: &Tolerance,
) -> Result<Vec<Complex64>> {
    for mu in mus {
        check_index(p, mu)?;
    }
    let order = mus.iter().map(MultiIndex::order).max().unwrap_or(0);
    let radius = truncation_radius(p, z, c, order, t)?;
    theta_derivs_with_radius(p, z, c, mus, radius)
}

/// `theta[c](z | Omega)` with truncation error below `t.eps_trunc`.
pub fn theta(
    p: &PeriodMatrix,
    z: &[Complex64],
    c: &ThetaCharacteristic,
    t: &Tolerance,
) -> Result<Complex64> {
    theta_deriv(p, z, c, &MultiIndex::value(), t)
}

/// Partial derivative `d^mu theta[c](z | Omega)` for `|mu| <= 4`.
pub fn theta_deriv(
    p: &PeriodMatrix,
    z: &[Complex64],
    c: &ThetaCharacteristic,
    mu: &MultiIndex,
    t: &Tolerance,
) -> Result<Complex64> {
    Ok(theta_derivs(p, z, c, std::slice::from_ref(mu), t)?[0])
}

/// Factor `f` with `theta[c](z + m + Omega n) = f theta[c](z)`.
pub fn quasi_period_factor(
    p: &PeriodMatrix,
    c: &ThetaCharacteristic,
    z: &[Complex64],
    m: &[i64],
    n: &[i64],
) -> Result<Complex64> {
    check_point(p, z)?;
    check_char(p, c)?;
    for v in [m, n] {
        if v.len() != p.g {
            return Err(ThetaError::DimensionMismatch { expected: p.g, found: v.len() });
        }
    }
    let eps = c.eps();
    let del = c.del();
    let omega_n = p.apply_integer(n);
    let mut quad = Complex64::new(0.0, 0.0);
    let mut lin = Complex64::new(0.0, 0.0);
    let mut chars = 0.0;
    for i in 0..p.g {
        let ni = n[i] as f64;
        quad += omega_n[i] * ni;
        lin += z[i] * ni;
        chars += eps[i] * m[i] as f64 - del[i] * ni;
    }
    let arg = Complex64::new(0.0, -PI) * quad
        + Complex64::new(0.0, -2.0 * PI) * lin
        + Complex64::new(0.0, 2.0 * PI * chars);
    Ok(arg.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parity_examples() {
        assert_eq!(ThetaCharacteristic::zero(3).parity(), Parity::Even);
        let odd: ThetaCharacteristic = "1;1".parse().unwrap();
        assert_eq!(odd.parity(), Parity::Odd);
        let even: ThetaCharacteristic = "1,1;1,1".parse().unwrap();
        assert_eq!(even.parity(), Parity::Even);
    }

    #[test]
    fn characteristic_counts() {
        for g in 1..=3 {
            let n = 1usize << g;
            assert_eq!(even_characteristics(g).len(), n * (n + 1) / 2);
            assert_eq!(odd_characteristics(g).len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn rejects_bad_characteristics() {
        assert!("0,2;0,0".parse::<ThetaCharacteristic>().is_err());
        assert!("0,1;0".parse::<ThetaCharacteristic>().is_err());
        assert!("0,1".parse::<ThetaCharacteristic>().is_err());
    }

    #[test]
    fn rejects_invalid_period_matrices() {
        let bad = PeriodMatrix::new(vec![vec![c(0.0, 1.0), c(0.0, 2.0)], vec![c(0.0, 2.0), c(0.0, 1.0)]]);
        assert_eq!(bad.unwrap_err(), ThetaError::NonPositiveDefinite);
        let asym = PeriodMatrix::new(vec![vec![c(0.0, 1.0), c(0.1, 0.0)], vec![c(0.2, 0.0), c(0.0, 1.0)]]);
        assert!(matches!(asym, Err(ThetaError::NotSymmetric(_, _))));
        assert!(PeriodMatrix::diagonal(&[c(0.3, -1.0)]).is_err());
    }

    #[test]
    fn classical_theta3_at_i() {
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let v = theta(&p, &[c(0.0, 0.0)], &ThetaCharacteristic::zero(1), &Tolerance::default()).unwrap();
        // theta_3(0, i) = pi^{1/4} / Gamma(3/4)
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn odd_characteristic_vanishes_at_origin() {
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let odd: ThetaCharacteristic = "1;1".parse().unwrap();
        let v = theta(&p, &[c(0.0, 0.0)], &odd, &Tolerance::default()).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn derivative_parity_at_origin() {
        let p = PeriodMatrix::new(vec![vec![c(0.1, 1.2), c(0.2, 0.3)], vec![c(0.2, 0.3), c(-0.1, 0.9)]]).unwrap();
        let t = Tolerance::default();
        let zero = [c(0.0, 0.0); 2];
        for ch in all_characteristics(2) {
            let orders: &[usize] = if ch.is_even() { &[1, 3] } else { &[0, 2, 4] };
            for &o in orders {
                for mu in MultiIndex::all_of_order(2, o) {
                    let v = theta_deriv(&p, &zero, &ch, &mu, &t).unwrap();
                    assert!(v.norm() < 1e-10, "{ch} {mu:?} {v}");
                }
            }
        }
    }

    #[test]
    fn order_too_high_and_bad_dimensions() {
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let t = Tolerance::default();
        let ch = ThetaCharacteristic::zero(1);
        let mu = MultiIndex::new(&[0, 0, 0, 0, 0]);
        assert_eq!(theta_deriv(&p, &[c(0.0, 0.0)], &ch, &mu, &t), Err(ThetaError::OrderTooHigh(5)));
        assert!(matches!(
            theta(&p, &[c(0.0, 0.0), c(0.0, 0.0)], &ch, &t),
            Err(ThetaError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            quasi_period_factor(&p, &ch, &[c(0.0, 0.0)], &[0, 0], &[0]),
            Err(ThetaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quasi_period_trivial_shifts() {
        let p = PeriodMatrix::diagonal(&[c(0.2, 1.1), c(0.0, 0.8)]).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.05)];
        let f = quasi_period_factor(&p, &"1,0;1,1".parse().unwrap(), &z, &[0, 0], &[0, 0]).unwrap();
        assert!((f - 1.0).norm() < 1e-15);
        let f = quasi_period_factor(&p, &ThetaCharacteristic::zero(2), &z, &[3, -2], &[0, 0]).unwrap();
        assert!((f - 1.0).norm() < 1e-14);
    }

    #[test]
    fn quasi_period_matches_ratio_genus_one() {
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let t = Tolerance::default();
        let ch = ThetaCharacteristic::zero(1);
        let z = [c(0.3, 0.2)];
        let shifted = [z[0] + p.entry(0, 0)];
        let ratio = theta(&p, &shifted, &ch, &t).unwrap() / theta(&p, &z, &ch, &t).unwrap();
        let f = quasi_period_factor(&p, &ch, &z, &[0], &[1]).unwrap();
        assert!((ratio - f).norm() / f.norm() < 1e-9);
    }

    #[test]
    fn diagonal_factorization() {
        let t = Tolerance::default();
        let (t1, t2) = (c(0.1, 1.3), c(-0.3, 0.7));
        let p = PeriodMatrix::diagonal(&[t1, t2]).unwrap();
        let p1 = PeriodMatrix::diagonal(&[t1]).unwrap();
        let p2 = PeriodMatrix::diagonal(&[t2]).unwrap();
        let z = [c(0.21, -0.1), c(0.4, 0.15)];
        let a: ThetaCharacteristic = "1;0".parse().unwrap();
        let b: ThetaCharacteristic = "0;1".parse().unwrap();
        let full = theta(&p, &z, &a.concat(&b), &t).unwrap();
        let prod = theta(&p1, &z[..1], &a, &t).unwrap() * theta(&p2, &z[1..], &b, &t).unwrap();
        assert!((full - prod).norm() / prod.norm() < 1e-12);
    }

    #[test]
    fn doubling_radius_changes_little() {
        let p = PeriodMatrix::new(vec![vec![c(0.1, 0.8), c(0.2, 0.1)], vec![c(0.2, 0.1), c(-0.1, 0.6)]]).unwrap();
        let t = Tolerance::default();
        let z = [c(0.3, 0.4), c(-0.2, -0.3)];
        for ch in all_characteristics(2) {
            for order in 0..=4 {
                let mu = MultiIndex::all_of_order(2, order).pop().unwrap();
                let r = truncation_radius(&p, &z, &ch, order, &t).unwrap();
                let a = theta_derivs_with_radius(&p, &z, &ch, std::slice::from_ref(&mu), r).unwrap()[0];
                let b = theta_derivs_with_radius(&p, &z, &ch, std::slice::from_ref(&mu), 2.0 * r).unwrap()[0];
                assert!((a - b).norm() < t.eps_trunc, "{ch} order {order}: {}", (a - b).norm());
            }
        }
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::all_of_order(3, 4).len(), 15);
        assert_eq!(MultiIndex::all_of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::new(&[2, 0, 1]).indices(), &[0, 1, 2]);
        assert_eq!("1, 0".parse::<MultiIndex>().unwrap(), MultiIndex::new(&[0, 1]));
    }

    #[test]
    fn json_round_trip() {
        let p = PeriodMatrix::new(vec![vec![c(0.1, 0.8), c(0.2, 0.1)], vec![c(0.2, 0.1), c(-0.1, 0.6)]]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: PeriodMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        let ch: ThetaCharacteristic = serde_json::from_str(r#"{"eps":[1,0],"del":[0,1]}"#).unwrap();
        assert_eq!(ch.to_string(), "1,0;0,1");
        assert!(serde_json::from_str::<ThetaCharacteristic>(r#"{"eps":[2],"del":[0]}"#).is_err());
        assert!(serde_json::from_str::<PeriodMatrix>(r#"{"g":1,"omega":[[[0,-1]]]}"#).is_err());
    }
}
