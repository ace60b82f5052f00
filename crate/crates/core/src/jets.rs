//! Taylor jets of even theta functions at the origin and the quartic
//! `F = theta_2^2 / 2 - theta_0 theta_4` built from them.
//!
//! Second and fourth order parts are stored as derivative tensors `H` and
//! `T`; the Taylor factors 1/2 and 1/24 appear only where a polynomial is
//! evaluated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::poly::{small, Poly, Scalar};
use crate::theta::{self, MultiIndex, PeriodMatrix, ThetaCharacteristic, ThetaError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed quartic form: {0}")]
    Malformed(String),
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sort4(idx: [usize; 4]) -> [usize; 4] {
    let mut s = idx;
    s.sort_unstable();
    s
}

fn rank4(idx: [usize; 4]) -> usize {
    let [a, b, c, d] = sort4(idx);
    a + binom(b + 1, 2) + binom(c + 2, 3) + binom(d + 3, 4)
}

/// Sorted index quadruples `i <= j <= k <= l`, in lexicographic order.
pub fn canonical_quadruples(g: usize) -> Vec<[usize; 4]> {
    MultiIndex::all_of_order(g, 4)
        .into_iter()
        .map(|m| {
            let v = m.indices();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

/// Symmetric g x g matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T = Complex64> {
    g: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(g: usize) -> Self {
        SymMatrix { g, data: vec![T::zero(); g * g] }
    }

    /// Builds the matrix from its upper triangle; `f` is called with `i <= j`.
    pub fn from_fn(g: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(g);
        for i in 0..g {
            for j in i..g {
                let v = f(i, j);
                m.data[j * g + i] = v.clone();
                m.data[i * g + j] = v;
            }
        }
        m
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.g + j].clone()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.g).map(|r| r.to_vec()).collect()
    }

    pub fn scale(&self, s: &T) -> Self {
        SymMatrix { g: self.g, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }
}

impl SymMatrix<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Fully symmetric rank-4 tensor stored by sorted index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor4<T = Complex64> {
    g: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymTensor4<T> {
    pub fn zeros(g: usize) -> Self {
        SymTensor4 { g, data: vec![T::zero(); binom(g + 3, 4)] }
    }

    /// `f` is called once per sorted quadruple.
    pub fn from_fn(g: usize, mut f: impl FnMut([usize; 4]) -> T) -> Self {
        let mut t = Self::zeros(g);
        for q in canonical_quadruples(g) {
            t.data[rank4(q)] = f(q);
        }
        t
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Entry at any index order.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.data[rank4([i, j, k, l])].clone()
    }

    pub fn set(&mut self, idx: [usize; 4], v: T) {
        self.data[rank4(idx)] = v;
    }

    /// Entries in the order of [`canonical_quadruples`].
    pub fn canonical_entries(&self) -> Vec<([usize; 4], T)> {
        canonical_quadruples(self.g).into_iter().map(|q| (q, self.data[rank4(q)].clone())).collect()
    }

    pub fn scale(&self, s: &T) -> Self {
        SymTensor4 { g: self.g, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.g, other.g);
        SymTensor4 {
            g: self.g,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    /// Homogeneous quartic `(1/24) sum T_ijkl z_i z_j z_k z_l` as a polynomial.
    pub fn to_polynomial(&self) -> Poly<T> {
        let mut p = Poly::zero(self.g);
        for q in canonical_quadruples(self.g) {
            let mut e = vec![0u32; self.g];
            for &i in &q {
                e[i] += 1;
            }
            // 24 / (number of orderings) = product of factorials of multiplicities
            let weight: i64 = e.iter().map(|&k| (1..=k as i64).product::<i64>()).product();
            p.add_term(e, self.data[rank4(q)].clone() * small::<T>(1) / small::<T>(weight));
        }
        p
    }

    /// Fourth derivative tensor of a polynomial at the origin.
    pub fn from_polynomial(p: &Poly<T>) -> Self {
        Self::from_fn(p.nvars(), |q| p.derivative_at_zero(&q))
    }
}

impl SymTensor4<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Quadrilinear form `Q(v1, v2, v3, v4)` given by a symmetric tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticForm<T = Complex64> {
    pub coeffs: SymTensor4<T>,
}

impl<T: Scalar> QuarticForm<T> {
    pub fn zeros(g: usize) -> Self {
        QuarticForm { coeffs: SymTensor4::zeros(g) }
    }

    pub fn g(&self) -> usize {
        self.coeffs.g
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.coeffs.get(i, j, k, l)
    }

    /// The form `l(v1) l(v2) l(v3) l(v4)`.
    pub fn fourth_power(l: &[T]) -> Self {
        QuarticForm {
            coeffs: SymTensor4::from_fn(l.len(), |[i, j, k, m]| {
                l[i].clone() * l[j].clone() * l[k].clone() * l[m].clone()
            }),
        }
    }

    /// `Q(v1, v2, v3, v4)`.
    pub fn evaluate(&self, v: [&[T]; 4]) -> T {
        let g = self.g();
        let mut acc = T::zero();
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    for l in 0..g {
                        acc = acc
                            + self.get(i, j, k, l)
                                * v[0][i].clone()
                                * v[1][j].clone()
                                * v[2][k].clone()
                                * v[3][l].clone();
                    }
                }
            }
        }
        acc
    }
}

impl QuarticForm<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.max_abs()
    }

    pub fn to_json(&self) -> QuarticFormJson {
        QuarticFormJson {
            g: self.g(),
            coeffs: self
                .coeffs
                .canonical_entries()
                .into_iter()
                .map(|(idx, z)| QuarticEntry { idx, re: z.re, im: z.im })
                .collect(),
        }
    }

    pub fn from_json(json: &QuarticFormJson) -> Result<Self, JetError> {
        let g = json.g;
        if g == 0 {
            return Err(JetError::Malformed("g must be positive".into()));
        }
        let mut seen = vec![false; binom(g + 3, 4)];
        let mut coeffs = SymTensor4::zeros(g);
        for e in &json.coeffs {
            if e.idx.iter().any(|&i| i >= g) {
                return Err(JetError::Malformed(format!("index {:?} out of range", e.idx)));
            }
            if sort4(e.idx) != e.idx {
                return Err(JetError::Malformed(format!("index {:?} is not sorted", e.idx)));
            }
            let r = rank4(e.idx);
            if seen[r] {
                return Err(JetError::Malformed(format!("index {:?} listed twice", e.idx)));
            }
            seen[r] = true;
            coeffs.set(e.idx, Complex64::new(e.re, e.im));
        }
        Ok(QuarticForm { coeffs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticEntry {
    pub idx: [usize; 4],
    pub re: f64,
    pub im: f64,
}

/// Wire format: only sorted index quadruples are listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticFormJson {
    pub g: usize,
    pub coeffs: Vec<QuarticEntry>,
}

impl Serialize for QuarticForm<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuarticForm<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = QuarticFormJson::deserialize(d)?;
        QuarticForm::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// Value, Hessian and fourth derivative tensor at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaJet<T = Complex64> {
    pub theta0: T,
    pub theta2: SymMatrix<T>,
    pub theta4: SymTensor4<T>,
}

impl<T: Scalar> ThetaJet<T> {
    pub fn zero(g: usize) -> Self {
        ThetaJet { theta0: T::zero(), theta2: SymMatrix::zeros(g), theta4: SymTensor4::zeros(g) }
    }

    pub fn g(&self) -> usize {
        self.theta2.g()
    }

    pub fn scale(&self, s: &T) -> Self {
        ThetaJet {
            theta0: self.theta0.clone() * s.clone(),
            theta2: self.theta2.scale(s),
            theta4: self.theta4.scale(s),
        }
    }

    /// `theta_2(z) = z^T H z / 2`.
    pub fn quadratic_part(&self) -> Poly<T> {
        let g = self.g();
        let mut p = Poly::zero(g);
        for i in 0..g {
            for j in 0..g {
                p = p.add(&Poly::monomial(g, &[i, j], self.theta2.get(i, j) / small::<T>(2)));
            }
        }
        p
    }

    pub fn quartic_part(&self) -> Poly<T> {
        self.theta4.to_polynomial()
    }
}

/// Jet of `theta[c]` at the origin. Odd characteristics give the zero jet.
pub fn theta_jet(p: &PeriodMatrix, c: &ThetaCharacteristic, t: &Tolerance) -> Result<ThetaJet, JetError> {
    let g = p.genus();
    if c.genus() != g {
        return Err(ThetaError::DimensionMismatch { expected: g, found: c.genus() }.into());
    }
    if !c.is_even() {
        return Ok(ThetaJet::zero(g));
    }
    let pairs = MultiIndex::all_of_order(g, 2);
    let quads = MultiIndex::all_of_order(g, 4);
    let mut mus = vec![MultiIndex::value()];
    mus.extend(pairs.iter().cloned());
    mus.extend(quads.iter().cloned());
    let zero = vec![Complex64::new(0.0, 0.0); g];
    let vals = theta::theta_derivs(p, &zero, c, &mus, t)?;
    let mut theta2 = SymMatrix::zeros(g);
    for (mu, v) in pairs.iter().zip(&vals[1..]) {
        let (i, j) = (mu.indices()[0], mu.indices()[1]);
        theta2.data[i * g + j] = *v;
        theta2.data[j * g + i] = *v;
    }
    let mut theta4 = SymTensor4::zeros(g);
    for (mu, v) in quads.iter().zip(&vals[1 + pairs.len()..]) {
        let m = mu.indices();
        theta4.set([m[0], m[1], m[2], m[3]], *v);
    }
    Ok(ThetaJet { theta0: vals[0], theta2, theta4 })
}

/// Fourth derivative tensor of `theta_2^2 / 2 - theta_0 theta_4`, computed
/// by expanding the polynomial and reading off its coefficients.
pub fn scorza_quartic<T: Scalar>(j: &ThetaJet<T>) -> QuarticForm<T> {
    let q2 = j.quadratic_part();
    let f = q2
        .mul(&q2)
        .scale(&(T::one() / small::<T>(2)))
        .sub(&j.quartic_part().scale(&j.theta0));
    QuarticForm { coeffs: SymTensor4::from_polynomial(&f) }
}

/// The combination
/// `d13 d24 + d14 d23 + d34 d12 - theta_0 d1234`
/// of derivatives of an even function at the origin, from callbacks
/// returning second and fourth partial derivatives.
pub fn beta_from_derivatives<T: Scalar>(
    g: usize,
    theta0: T,
    second: impl Fn(usize, usize) -> T,
    fourth: impl Fn([usize; 4]) -> T,
) -> QuarticForm<T> {
    QuarticForm {
        coeffs: SymTensor4::from_fn(g, |[a, b, c, d]| {
            second(a, c) * second(b, d) + second(a, d) * second(b, c) + second(c, d) * second(a, b)
                - theta0.clone() * fourth([a, b, c, d])
        }),
    }
}

/// The beta tensor evaluated directly from theta derivatives at the origin.
pub fn beta_tensor(p: &PeriodMatrix, c: &ThetaCharacteristic, t: &Tolerance) -> Result<QuarticForm, JetError> {
    let g = p.genus();
    if c.genus() != g {
        return Err(ThetaError::DimensionMismatch { expected: g, found: c.genus() }.into());
    }
    if !c.is_even() {
        return Ok(QuarticForm::zeros(g));
    }
    let zero = vec![Complex64::new(0.0, 0.0); g];
    let radius = theta::truncation_radius(p, &zero, c, 4, t)?;
    let d = |idx: &[usize]| -> Result<Complex64, ThetaError> {
        Ok(theta::theta_derivs_with_radius(p, &zero, c, &[MultiIndex::new(idx)], radius)?[0])
    };
    let theta0 = d(&[])?;
    let mut second = vec![Complex64::new(0.0, 0.0); g * g];
    for i in 0..g {
        for j in 0..g {
            second[i * g + j] = d(&[i, j])?;
        }
    }
    let mut fourth = SymTensor4::zeros(g);
    for q in canonical_quadruples(g) {
        fourth.set(q, d(&q)?);
    }
    Ok(beta_from_derivatives(g, theta0, |i, j| second[i * g + j], |q| fourth.get(q[0], q[1], q[2], q[3])))
}

/// `M[k][l] = Q(x, y, e_k, e_l)`.
pub fn polarize<T: Scalar>(f: &QuarticForm<T>, x: &[T], y: &[T]) -> Result<SymMatrix<T>, JetError> {
    let g = f.g();
    for v in [x, y] {
        if v.len() != g {
            return Err(JetError::DimensionMismatch { expected: g, found: v.len() });
        }
    }
    Ok(SymMatrix::from_fn(g, |k, l| {
        let mut acc = T::zero();
        for i in 0..g {
            for j in 0..g {
                acc = acc + f.get(i, j, k, l) * x[i].clone() * y[j].clone();
            }
        }
        acc
    }))
}

/// Singular values in descending order.
pub fn singular_values(m: &SymMatrix<Complex64>) -> Vec<f64> {
    linalg::singular_values_complex(m.as_slice(), m.g())
}

/// Numerical rank (singular values above `eps_zero` times the largest) and
/// the ratio of the second singular value to the first (0 when the rank is
/// at most 1).
pub fn rank_defect(m: &SymMatrix<Complex64>, t: &Tolerance) -> (usize, f64) {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return (0, 0.0);
    }
    let rank = sv.iter().filter(|&&s| s > t.eps_zero * top).count();
    let ratio = if rank <= 1 { 0.0 } else { sv[1] / top };
    (rank, ratio)
}

/// Scale-invariant distance between two tensors: the smallest relative
/// max-norm residual `|a - c b| / |a|` over complex scalars `c`, with `c`
/// taken from the least-squares fit.
pub fn projective_distance(a: &QuarticForm, b: &QuarticForm) -> f64 {
    let ea = a.coeffs.canonical_entries();
    let eb = b.coeffs.canonical_entries();
    let na = a.max_abs();
    let nb = b.max_abs();
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for ((_, x), (_, y)) in ea.iter().zip(&eb) {
        num += y.conj() * x;
        den += y.norm_sqr();
    }
    let c = num / den;
    ea.iter().zip(&eb).map(|((_, x), (_, y))| (x - c * y).norm()).fold(0.0, f64::max) / na
}

/// Max-norm relative difference `|a - b| / max(|a|, |b|)`.
pub fn relative_difference(a: &QuarticForm, b: &QuarticForm) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        return 0.0;
    }
    a.coeffs.sub(&b.coeffs).max_abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_storage_is_dense() {
        for g in 1..=4 {
            let qs = canonical_quadruples(g);
            assert_eq!(qs.len(), binom(g + 3, 4));
            let mut ranks: Vec<usize> = qs.iter().map(|&q| rank4(q)).collect();
            ranks.sort_unstable();
            assert_eq!(ranks, (0..qs.len()).collect::<Vec<_>>());
        }
        assert_eq!(rank4([2, 0, 1, 0]), rank4([0, 0, 1, 2]));
    }

    #[test]
    fn product_of_odd_characteristics() {
        let t = Tolerance::default();
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 2.0)]).unwrap();
        let ch: ThetaCharacteristic = "1,1;1,1".parse().unwrap();
        assert!(ch.is_even());
        let jet = theta_jet(&p, &ch, &t).unwrap();
        let odd: ThetaCharacteristic = "1;1".parse().unwrap();
        let d1 = theta::theta_deriv(
            &PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap(),
            &[c(0.0, 0.0)],
            &odd,
            &MultiIndex::new(&[0]),
            &t,
        )
        .unwrap();
        let d2 = theta::theta_deriv(
            &PeriodMatrix::diagonal(&[c(0.0, 2.0)]).unwrap(),
            &[c(0.0, 0.0)],
            &odd,
            &MultiIndex::new(&[0]),
            &t,
        )
        .unwrap();
        assert!(jet.theta0.norm() < 1e-14);
        assert!(jet.theta2.get(0, 0).norm() < 1e-12 && jet.theta2.get(1, 1).norm() < 1e-12);
        assert!((jet.theta2.get(0, 1) - d1 * d2).norm() < 1e-10 * (d1 * d2).norm());
    }

    #[test]
    fn odd_characteristic_gives_zero_jet_and_tensor() {
        let p = PeriodMatrix::new(vec![vec![c(0.1, 1.0), c(0.2, 0.3)], vec![c(0.2, 0.3), c(-0.3, 1.2)]]).unwrap();
        let t = Tolerance::default();
        for ch in crate::theta::odd_characteristics(2) {
            assert_eq!(theta_jet(&p, &ch, &t).unwrap(), ThetaJet::zero(2));
            assert_eq!(beta_tensor(&p, &ch, &t).unwrap(), QuarticForm::zeros(2));
        }
        assert_eq!(scorza_quartic(&ThetaJet::<Complex64>::zero(2)), QuarticForm::zeros(2));
    }

    #[test]
    fn beta_matches_polynomial_route_genus_two() {
        let p = PeriodMatrix::new(vec![vec![c(0.1, 1.0), c(0.2, 0.3)], vec![c(0.2, 0.3), c(-0.3, 1.2)]]).unwrap();
        let t = Tolerance::default();
        for ch in crate::theta::even_characteristics(2) {
            let q = scorza_quartic(&theta_jet(&p, &ch, &t).unwrap());
            let b = beta_tensor(&p, &ch, &t).unwrap();
            assert!(relative_difference(&q, &b) < 1e-12, "{ch}");
        }
    }

    #[test]
    fn genus_one_quartic() {
        let p = PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap();
        let jet = theta_jet(&p, &ThetaCharacteristic::zero(1), &Tolerance::default()).unwrap();
        let q = scorza_quartic(&jet);
        let h = jet.theta2.get(0, 0);
        let expect = 3.0 * h * h - jet.theta0 * jet.theta4.get(0, 0, 0, 0);
        assert!((q.get(0, 0, 0, 0) - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn exact_identity_on_rational_polynomial() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let g = 3;
        let jet = ThetaJet {
            theta0: q(5, 3),
            theta2: SymMatrix::from_fn(g, |i, j| q((i * 3 + j) as i64 - 2, (i + j + 1) as i64)),
            theta4: SymTensor4::from_fn(g, |[a, b, cc, d]| q((a + 2 * b) as i64 - (cc * d) as i64, 7)),
        };
        let poly = scorza_quartic(&jet);
        let beta =
            beta_from_derivatives(g, jet.theta0.clone(), |i, j| jet.theta2.get(i, j), |x| jet.theta4.get(x[0], x[1], x[2], x[3]));
        assert_eq!(poly, beta);
    }

    #[test]
    fn polarization_of_fourth_power_has_rank_one() {
        let l = [c(1.0, 0.5), c(-0.3, 2.0), c(0.7, -0.1)];
        let f = QuarticForm::fourth_power(&l);
        let x = [c(0.2, 0.1), c(1.0, 0.0), c(-0.5, 0.3)];
        let y = [c(0.0, 1.0), c(0.4, 0.4), c(0.9, 0.0)];
        let m = polarize(&f, &x, &y).unwrap();
        let (rank, ratio) = rank_defect(&m, &Tolerance::default());
        assert_eq!((rank, ratio), (1, 0.0));
        let sv = singular_values(&m);
        assert!(sv[1] / sv[0] < 1e-10);
        assert!(polarize(&f, &x[..2], &y).is_err());
    }

    #[test]
    fn rank_defect_examples() {
        let t = Tolerance::default();
        let id = SymMatrix::from_fn(2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(rank_defect(&id, &t), (2, 1.0));
        let v = [c(1.0, 2.0), c(-0.5, 0.0)];
        let vv = SymMatrix::from_fn(2, |i, j| v[i] * v[j]);
        assert_eq!(rank_defect(&vv, &t), (1, 0.0));
        assert_eq!(rank_defect(&SymMatrix::zeros(3), &t), (0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let f = QuarticForm { coeffs: SymTensor4::from_fn(2, |q| c(q[0] as f64, q[3] as f64 - 0.5)) };
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with("{\"g\":2,\"coeffs\":[{\"idx\":[0,0,0,0]"));
        let back: QuarticForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"g":2,"coeffs":[{"idx":[1,0,0,0],"re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<QuarticForm>(bad).is_err());
    }
}
