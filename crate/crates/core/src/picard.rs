//! Exact divisor-class arithmetic on the moduli space of even spin curves:
//! test curves, the Chern-class chain behind the Szego-Hodge class, the
//! solve for its boundary coefficients, slopes and pullback formulas.
//!
//! A class is written `c_lambda * lambda - sum_i (c_alpha[i] alpha_i + c_beta[i] beta_i)`
//! plus named symbolic terms added with their own coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degenerations::{self, Divisor};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("genus {g} is below the minimum {min}")]
    GenusTooSmall { g: u64, min: u64 },
    #[error("index i = {i} out of range for genus {g}")]
    IndexOutOfRange { i: u64, g: u64 },
    #[error("genus mismatch: {expected} vs {found}")]
    GenusMismatch { expected: u64, found: u64 },
    #[error("intersection depends on the unresolved coefficient {0}")]
    Unresolved(String),
    #[error("test-curve equations are inconsistent")]
    InconsistentSystem,
    #[error("test-curve equations do not determine every coefficient")]
    Underdetermined,
    #[error("slope {found} differs from the closed form {expected}")]
    SlopeMismatch { expected: String, found: String },
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
}

pub type Result<T> = std::result::Result<T, PicardError>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || PicardError::InvalidRational(s.to_string());
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Lowest terms, positive denominator, denominator 1 omitted.
pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

/// Serde adapter for rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for vectors of rationals.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// A boundary coefficient: a known rational, or a named unknown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Known(#[serde(with = "rational_str")] Q),
    Unknown { name: String, nonnegative: bool },
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Known(Q::zero())
    }

    pub fn known(&self) -> Option<&Q> {
        match self {
            Coefficient::Known(x) => Some(x),
            Coefficient::Unknown { .. } => None,
        }
    }
}

impl From<Q> for Coefficient {
    fn from(x: Q) -> Self {
        Coefficient::Known(x)
    }
}

/// Named class added to the expansion, e.g. `[D_sg]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicTerm {
    pub name: String,
    #[serde(with = "rational_str")]
    pub coeff: Q,
}

/// Half the genus, rounded down: the largest canonical boundary index.
pub fn half(g: u64) -> u64 {
    g / 2
}

/// Canonical storage index of `alpha_i` / `beta_i`: indices above `g/2`
/// fold to `g - i`.
pub fn fold_index(g: u64, i: u64) -> Result<usize> {
    if i > g {
        return Err(PicardError::IndexOutOfRange { i, g });
    }
    Ok(if i > half(g) { (g - i) as usize } else { i as usize })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinDivisorClass {
    pub g: u64,
    #[serde(rename = "lambda", with = "rational_str")]
    pub c_lambda: Q,
    #[serde(rename = "alpha")]
    pub c_alpha: Vec<Coefficient>,
    #[serde(rename = "beta")]
    pub c_beta: Vec<Coefficient>,
    #[serde(default)]
    pub symbolic: Vec<SymbolicTerm>,
}

impl SpinDivisorClass {
    pub fn zero(g: u64) -> Self {
        let n = half(g) as usize + 1;
        SpinDivisorClass {
            g,
            c_lambda: Q::zero(),
            c_alpha: vec![Coefficient::zero(); n],
            c_beta: vec![Coefficient::zero(); n],
            symbolic: Vec::new(),
        }
    }

    /// `c * lambda`.
    pub fn lambda(g: u64, c: Q) -> Self {
        SpinDivisorClass { c_lambda: c, ..Self::zero(g) }
    }

    /// `c_alpha(i)` with folding.
    pub fn c_alpha(&self, i: u64) -> Result<&Coefficient> {
        Ok(&self.c_alpha[fold_index(self.g, i)?])
    }

    pub fn c_beta(&self, i: u64) -> Result<&Coefficient> {
        Ok(&self.c_beta[fold_index(self.g, i)?])
    }

    fn check_shape(&self) -> Result<()> {
        let n = half(self.g) as usize + 1;
        for len in [self.c_alpha.len(), self.c_beta.len()] {
            if len != n {
                return Err(PicardError::IndexOutOfRange { i: len as u64 - 1, g: self.g });
            }
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: &mut bool, coeff: &Q, name: &str) -> fmt::Result {
    if coeff.is_zero() {
        return Ok(());
    }
    let sign = if coeff.is_negative() { "-" } else { "+" };
    let abs = coeff.abs();
    match (*first, coeff.is_negative()) {
        (true, false) => {}
        (true, true) => write!(f, "-")?,
        (false, _) => write!(f, " {sign} ")?,
    }
    if abs.is_one() {
        write!(f, "{name}")?;
    } else {
        write!(f, "{}*{name}", format_rational(&abs))?;
    }
    *first = false;
    Ok(())
}

impl fmt::Display for SpinDivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write_term(f, &mut first, &self.c_lambda, "lambda")?;
        for (kind, coeffs) in [("alpha", &self.c_alpha), ("beta", &self.c_beta)] {
            for (i, c) in coeffs.iter().enumerate() {
                let name = format!("{kind}_{i}");
                match c {
                    Coefficient::Known(x) => write_term(f, &mut first, &-x.clone(), &name)?,
                    Coefficient::Unknown { name: u, .. } => {
                        write!(f, "{}{u}*{name}", if first { "-" } else { " - " })?;
                        first = false;
                    }
                }
            }
        }
        for s in &self.symbolic {
            write_term(f, &mut first, &s.coeff, &s.name)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestCurveKind {
    F,
    G,
    H0,
    G0,
}

/// Which of the two listed values of `G_0 . beta_0` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum G0BetaReading {
    #[default]
    Zero,
    Twelve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCurve {
    pub g: u64,
    pub kind: TestCurveKind,
    pub i: Option<u64>,
    #[serde(with = "rational_str")]
    pub dot_lambda: Q,
    #[serde(with = "rational_vec")]
    pub dot_alpha: Vec<Q>,
    #[serde(with = "rational_vec")]
    pub dot_beta: Vec<Q>,
}

impl TestCurve {
    pub fn name(&self) -> String {
        match (self.kind, self.i) {
            (TestCurveKind::F, Some(i)) => format!("F_{i}"),
            (TestCurveKind::G, Some(i)) => format!("G_{i}"),
            (TestCurveKind::H0, _) => "H_0".into(),
            (TestCurveKind::G0, _) => "G_0".into(),
            (k, None) => format!("{k:?}"),
        }
    }
}

fn require_genus(g: u64) -> Result<()> {
    if g < 3 {
        return Err(PicardError::GenusTooSmall { g, min: 3 });
    }
    Ok(())
}

/// Intersection numbers of a test curve with `lambda`, `alpha_i`, `beta_i`.
/// `i` is required for `F` and `G` (`2 <= i <= g - 1`).
pub fn test_curve(g: u64, kind: TestCurveKind, i: Option<u64>, reading: G0BetaReading) -> Result<TestCurve> {
    require_genus(g)?;
    let n = half(g) as usize + 1;
    let mut t = TestCurve {
        g,
        kind,
        i: None,
        dot_lambda: Q::zero(),
        dot_alpha: vec![Q::zero(); n],
        dot_beta: vec![Q::zero(); n],
    };
    match kind {
        TestCurveKind::F | TestCurveKind::G => {
            let i = i.ok_or(PicardError::IndexOutOfRange { i: 0, g })?;
            if !(2..g).contains(&i) {
                return Err(PicardError::IndexOutOfRange { i, g });
            }
            let k = fold_index(g, i)?;
            let v = qi(2 - 2 * i as i64);
            if kind == TestCurveKind::F {
                t.dot_alpha[k] = v;
            } else {
                t.dot_beta[k] = v;
            }
            t.i = Some(i);
        }
        TestCurveKind::H0 => {
            t.dot_alpha[1] = qi(1);
            t.dot_beta[0] = qi(1 - g as i64);
        }
        TestCurveKind::G0 => {
            t.dot_lambda = qi(3);
            t.dot_alpha[0] = qi(12);
            t.dot_alpha[1] = qi(-3);
            t.dot_beta[0] = match reading {
                G0BetaReading::Zero => Q::zero(),
                G0BetaReading::Twelve => qi(12),
            };
        }
    }
    Ok(t)
}

/// `dot_lambda c_lambda - sum (dot_alpha c_alpha + dot_beta c_beta)`.
/// Symbolic terms and unknown coefficients must meet the curve trivially.
pub fn intersect(t: &TestCurve, d: &SpinDivisorClass) -> Result<Q> {
    if t.g != d.g {
        return Err(PicardError::GenusMismatch { expected: t.g, found: d.g });
    }
    d.check_shape()?;
    if let Some(s) = d.symbolic.iter().find(|s| !s.coeff.is_zero()) {
        return Err(PicardError::Unresolved(s.name.clone()));
    }
    let mut acc = &t.dot_lambda * &d.c_lambda;
    for (dots, coeffs) in [(&t.dot_alpha, &d.c_alpha), (&t.dot_beta, &d.c_beta)] {
        for (dot, c) in dots.iter().zip(coeffs.iter()) {
            if dot.is_zero() {
                continue;
            }
            match c {
                Coefficient::Known(x) => acc -= dot * x,
                Coefficient::Unknown { name, .. } => return Err(PicardError::Unresolved(name.clone())),
            }
        }
    }
    Ok(acc)
}

/// How a ledger value is obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LedgerRule {
    /// Taken as input; `source` names the result it comes from.
    Axiom { source: String },
    /// `constant + sum coeff * value(entry)` over earlier entries.
    Linear {
        #[serde(with = "rational_str")]
        constant: Q,
        terms: Vec<LedgerTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTerm {
    pub entry: String,
    #[serde(with = "rational_str")]
    pub coeff: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    /// First Chern class as a multiple of `lambda`.
    #[serde(with = "rational_str")]
    pub value: Q,
    pub rule: LedgerRule,
}

/// Ordered record of first Chern classes, each derived from earlier ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernLedger {
    pub g: u64,
    pub entries: Vec<LedgerEntry>,
}

/// Outcome of replaying one ledger entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayResult {
    pub name: String,
    pub stored: Q,
    pub recomputed: Option<Q>,
}

impl ReplayResult {
    pub fn ok(&self) -> bool {
        self.recomputed.as_ref() == Some(&self.stored)
    }
}

pub const LAMBDA_SZH: &str = "lambda_SzH";

impl ChernLedger {
    pub fn from_entries(g: u64, entries: Vec<LedgerEntry>) -> Self {
        ChernLedger { g, entries }
    }

    pub fn value(&self, name: &str) -> Option<&Q> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    /// Recomputes every linear entry from the stored values of earlier
    /// entries. A rule that refers to a missing or later entry fails.
    pub fn replay(&self) -> Vec<ReplayResult> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let recomputed = match &e.rule {
                    LedgerRule::Axiom { .. } => Some(e.value.clone()),
                    LedgerRule::Linear { constant, terms } => terms.iter().try_fold(constant.clone(), |acc, t| {
                        let v = self.entries[..k].iter().find(|p| p.name == t.entry)?;
                        Some(acc + &t.coeff * &v.value)
                    }),
                };
                ReplayResult { name: e.name.clone(), stored: e.value.clone(), recomputed }
            })
            .collect()
    }

    pub fn replays_cleanly(&self) -> bool {
        self.replay().iter().all(ReplayResult::ok)
    }
}

struct LedgerBuilder {
    entries: Vec<LedgerEntry>,
}

impl LedgerBuilder {
    fn axiom(&mut self, name: &str, value: Q, source: &str) {
        self.entries.push(LedgerEntry {
            name: name.into(),
            value,
            rule: LedgerRule::Axiom { source: source.into() },
        });
    }

    fn linear(&mut self, name: &str, constant: Q, terms: &[(&str, Q)]) {
        let mut value = constant.clone();
        for (entry, coeff) in terms {
            let v = &self.entries.iter().find(|e| e.name == *entry).expect("earlier entry").value;
            value += coeff * v;
        }
        self.entries.push(LedgerEntry {
            name: name.into(),
            value,
            rule: LedgerRule::Linear {
                constant,
                terms: terms.iter().map(|(e, c)| LedgerTerm { entry: e.to_string(), coeff: c.clone() }).collect(),
            },
        });
    }
}

/// Weight of the Szego-Hodge class over the interior, with the chain of
/// Chern class computations that produces it.
pub fn chern_weight(g: u64) -> Result<(Q, ChernLedger)> {
    require_genus(g)?;
    let gi = g as i64;
    let mut b = LedgerBuilder { entries: Vec::new() };
    b.axiom("E", qi(1), "Hodge bundle, c1 = lambda");
    b.axiom("E3", q(11, 2), "Grothendieck-Riemann-Roch for the pushforward of omega tensor the spin bundle");
    b.axiom("pi_*(omega^2)", qi(13), "Mumford");
    b.linear("Sym2 E", Q::zero(), &[("E", qi(gi + 1))]);
    b.linear("Wedge2 E", Q::zero(), &[("E", qi(gi - 1))]);
    // E3 has rank 2g - 2
    b.linear("Sym2 E3", Q::zero(), &[("E3", qi(2 * gi - 1))]);
    b.linear("Wedge2 E3", Q::zero(), &[("E3", qi(2 * gi - 3))]);
    b.linear("E+", Q::zero(), &[("E", qi(1)), ("Wedge2 E", qi(-1)), ("Sym2 E3", qi(1))]);
    b.linear("E_{3|1}", Q::zero(), &[("pi_*(omega^2)", qi(1)), ("Wedge2 E3", qi(1))]);
    b.linear("B", Q::zero(), &[("E_{3|1}", qi(1)), ("Sym2 E", qi(-1)), ("E", qi(1))]);
    b.linear("[Theta_null]", Q::zero(), &[("E", q(1, 4))]);
    b.linear("E-", Q::zero(), &[("B", qi(1)), ("[Theta_null]", qi(-(3 * gi - 3)))]);
    b.linear("delta_ram", Q::zero(), &[("[Theta_null]", qi(12 * (gi - 1)))]);
    b.linear("E- via delta_ram", Q::zero(), &[("E+", qi(1)), ("delta_ram", q(-1, 4))]);
    b.linear(LAMBDA_SZH, Q::zero(), &[("E+", qi(1)), ("E-", qi(1))]);
    let ledger = ChernLedger::from_entries(g, b.entries);
    let weight = ledger.value(LAMBDA_SZH).expect("final entry").clone();
    Ok((weight, ledger))
}

/// Curves whose intersections with the Szego-Hodge class are known, with
/// the required values.
pub fn szego_hodge_equations(g: u64, reading: G0BetaReading) -> Result<Vec<(TestCurve, Q)>> {
    require_genus(g)?;
    let mut eqs = Vec::new();
    for i in 2..g {
        eqs.push((test_curve(g, TestCurveKind::F, Some(i), reading)?, Q::zero()));
    }
    eqs.push((test_curve(g, TestCurveKind::H0, None, reading)?, Q::zero()));
    eqs.push((test_curve(g, TestCurveKind::G0, None, reading)?, qi(6 * g as i64 - 3)));
    Ok(eqs)
}

fn beta_unknown(i: usize) -> Coefficient {
    Coefficient::Unknown { name: format!("b_{i}"), nonnegative: true }
}

/// Unique solution of `A x = b` over the rationals.
fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>, n: usize) -> Result<Vec<Q>> {
    let m = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        b[row] *= &inv;
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let sub = &f * &a[row][c];
                    a[r][c] -= sub;
                }
                let sub = &f * &b[row];
                b[r] -= sub;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if b[row..].iter().any(|x| !x.is_zero()) {
        return Err(PicardError::InconsistentSystem);
    }
    if pivots.len() < n {
        return Err(PicardError::Underdetermined);
    }
    Ok(b[..n].to_vec())
}

/// The Szego-Hodge class: `c_lambda` from [`chern_weight`], the alpha
/// coefficients and `c_beta[0]` solved from the test curves, and
/// `c_beta[i]` for `i >= 1` left as nonnegative unknowns `b_i`.
pub fn szego_hodge_class(g: u64) -> Result<SpinDivisorClass> {
    szego_hodge_class_with(g, G0BetaReading::default())
}

pub fn szego_hodge_class_with(g: u64, reading: G0BetaReading) -> Result<SpinDivisorClass> {
    let (weight, _) = chern_weight(g)?;
    let h = half(g) as usize;
    let eqs = szego_hodge_equations(g, reading)?;
    // unknowns: c_alpha[0..=h], c_beta[0]
    let n = h + 2;
    let unit = |k: usize| {
        let mut d = SpinDivisorClass::zero(g);
        if k <= h {
            d.c_alpha[k] = qi(1).into();
        } else {
            d.c_beta[0] = qi(1).into();
        }
        d
    };
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    let base = SpinDivisorClass::lambda(g, weight.clone());
    for (t, target) in &eqs {
        let row: Vec<Q> = (0..n).map(|k| intersect(t, &unit(k))).collect::<Result<_>>()?;
        a.push(row);
        rhs.push(target - intersect(t, &base)?);
    }
    let x = solve_exact(a, rhs, n)?;
    let mut class = SpinDivisorClass::lambda(g, weight);
    for k in 0..=h {
        class.c_alpha[k] = x[k].clone().into();
    }
    class.c_beta[0] = x[h + 1].clone().into();
    for i in 1..=h {
        class.c_beta[i] = beta_unknown(i);
    }
    Ok(class)
}

/// `(curve, required, actual)` for every defining equation.
pub fn test_curve_residuals(d: &SpinDivisorClass, reading: G0BetaReading) -> Result<Vec<(String, Q, Q)>> {
    szego_hodge_equations(d.g, reading)?
        .into_iter()
        .map(|(t, target)| Ok((t.name(), target, intersect(&t, d)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slope {
    Finite(#[serde(with = "rational_str")] Q),
    Infinite,
    Undetermined,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(x) => write!(f, "{}", format_rational(x)),
            Slope::Infinite => write!(f, "inf"),
            Slope::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// `c_lambda / c_alpha[0]` for a class whose other coefficients are all
/// nonnegative. Unknown coefficients count as nonnegative only when flagged
/// so. A class with `c_alpha[0] <= 0` has infinite slope.
pub fn slope(d: &SpinDivisorClass) -> Slope {
    let negative = |c: &Coefficient| match c {
        Coefficient::Known(x) => x.is_negative(),
        Coefficient::Unknown { nonnegative, .. } => !nonnegative,
    };
    if d.c_lambda.is_negative()
        || d.c_alpha.iter().skip(1).any(negative)
        || d.c_beta.iter().any(negative)
        || d.symbolic.iter().any(|s| s.coeff.is_negative())
    {
        return Slope::Undetermined;
    }
    match d.c_alpha.first() {
        Some(Coefficient::Known(a0)) if a0.is_positive() => {
            if d.c_lambda.is_zero() {
                Slope::Undetermined
            } else {
                Slope::Finite(&d.c_lambda / a0)
            }
        }
        Some(Coefficient::Known(_)) => Slope::Infinite,
        _ => Slope::Undetermined,
    }
}

/// The theta-null divisor with `lambda` coefficient 1/4 and `alpha_0`
/// coefficient 1/16; the remaining boundary coefficients are not computed
/// here and appear as nonnegative unknowns.
pub fn theta_null_class(g: u64) -> Result<SpinDivisorClass> {
    require_genus(g)?;
    let mut d = SpinDivisorClass::lambda(g, q(1, 4));
    d.c_alpha[0] = q(1, 16).into();
    for i in 1..d.c_alpha.len() {
        d.c_alpha[i] = Coefficient::Unknown { name: format!("t_alpha_{i}"), nonnegative: true };
    }
    for i in 0..d.c_beta.len() {
        d.c_beta[i] = Coefficient::Unknown { name: format!("t_beta_{i}"), nonnegative: true };
    }
    Ok(d)
}

/// `4 + (32g - 16)/(69g - 21)`, checked against the slope of the
/// Szego-Hodge class.
pub fn moving_slope_bound(g: u64) -> Result<Q> {
    require_genus(g)?;
    let gi = g as i64;
    let bound = qi(4) + q(32 * gi - 16, 69 * gi - 21);
    match slope(&szego_hodge_class(g)?) {
        Slope::Finite(s) if s == bound => Ok(bound),
        other => Err(PicardError::SlopeMismatch {
            expected: format_rational(&bound),
            found: other.to_string(),
        }),
    }
}

pub const D_SG: &str = "[D_sg]";
pub const THETA_NULL: &str = "[Theta_null]";

/// Pullback of `delta_0'`: positive multiplicities of `alpha_i`, `beta_i`
/// (stored negated under the sign convention of the class), plus `[D_sg]`
/// and `12(g-1) [Theta_null]`.
pub fn pullback_delta0_prime(g: u64) -> Result<SpinDivisorClass> {
    require_genus(g)?;
    let gi = g as i64;
    let mut d = SpinDivisorClass::zero(g);
    d.c_alpha[0] = qi(-(2 * gi - 1)).into();
    d.c_beta[0] = qi(-(4 * gi - 2)).into();
    for i in 1..=half(g) as i64 {
        d.c_alpha[i as usize] = qi(-2 * (i * gi - i * i + gi)).into();
        d.c_beta[i as usize] = qi(-2 * i * (gi - i)).into();
    }
    d.symbolic = vec![
        SymbolicTerm { name: D_SG.into(), coeff: qi(1) },
        SymbolicTerm { name: THETA_NULL.into(), coeff: qi(12 * (gi - 1)) },
    ];
    Ok(d)
}

/// Pullback of `delta_i` for `i >= 1`, which vanishes.
pub fn pullback_delta_i(g: u64, i: u64) -> Result<SpinDivisorClass> {
    require_genus(g)?;
    if i == 0 || i > half(g) {
        return Err(PicardError::IndexOutOfRange { i, g });
    }
    Ok(SpinDivisorClass::zero(g))
}

/// `(label, multiplicity in the pullback, node count of the limit model)`
/// for every boundary component with a model.
pub fn node_count_crosscheck(g: u64) -> Result<Vec<(String, Q, Q)>> {
    let d = pullback_delta0_prime(g)?;
    let mult = |c: &Coefficient| -c.known().cloned().unwrap_or_else(Q::zero);
    let nodes = |m: degenerations::Result<degenerations::StableCurveModel>| -> Result<degenerations::StableCurveModel> {
        m.map_err(|_| PicardError::GenusTooSmall { g, min: 3 })
    };
    let mut out = Vec::new();
    let a0 = nodes(degenerations::limit_model_a0(g))?;
    out.push(("alpha_0".into(), mult(d.c_alpha(0)?), qi(a0.delta() as i64)));
    let b0 = nodes(degenerations::limit_model_b0(g))?;
    out.push(("beta_0".into(), mult(d.c_beta(0)?), qi(b0.delta() as i64)));
    for i in 1..=half(g) {
        let m = nodes(degenerations::limit_model_ai(g, i))?;
        out.push((format!("alpha_{i}"), mult(d.c_alpha(i)?), qi(m.delta() as i64)));
        if Divisor::Bi.index_range(g).contains(&i) {
            let m = nodes(degenerations::limit_model_bi(g, i))?;
            out.push((format!("beta_{i}"), mult(d.c_beta(i)?), qi(m.delta() as i64)));
        }
    }
    Ok(out)
}
