//! Stable-curve models of limit Scorza curves over boundary divisors, and
//! the genus bookkeeping that goes with them. Integer arithmetic only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegenerationError {
    #[error("genus {g} is below the minimum {min}")]
    GenusTooSmall { g: u64, min: u64 },
    #[error("index i = {i} out of range for genus {g}")]
    IndexOutOfRange { i: u64, g: u64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown divisor {0:?}")]
    UnknownDivisor(String),
}

pub type Result<T> = std::result::Result<T, DegenerationError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    pub genus: u64,
}

/// Nodes of a model: explicit component pairs (a self-pair is a
/// non-separating self-node) or only their total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nodes {
    Explicit(Vec<[usize; 2]>),
    Count { count: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ModelJson {
    components: Vec<Component>,
    nodes: Nodes,
    incidence_known: bool,
}

/// Nodal curve given by its components and nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct StableCurveModel {
    components: Vec<Component>,
    nodes: Nodes,
}

impl TryFrom<ModelJson> for StableCurveModel {
    type Error = DegenerationError;

    fn try_from(j: ModelJson) -> Result<Self> {
        let explicit = matches!(j.nodes, Nodes::Explicit(_));
        if explicit != j.incidence_known {
            return Err(DegenerationError::InvalidModel(
                "incidence_known must be true exactly when nodes are listed".into(),
            ));
        }
        StableCurveModel::new(j.components, j.nodes)
    }
}

impl From<StableCurveModel> for ModelJson {
    fn from(m: StableCurveModel) -> Self {
        let incidence_known = m.incidence_known();
        ModelJson { components: m.components, nodes: m.nodes, incidence_known }
    }
}

fn comp(label: impl Into<String>, genus: u64) -> Component {
    Component { label: label.into(), genus }
}

impl StableCurveModel {
    /// Validates: at least one component, node endpoints in range, and a
    /// connected dual graph when incidence is known.
    pub fn new(components: Vec<Component>, nodes: Nodes) -> Result<Self> {
        if components.is_empty() {
            return Err(DegenerationError::InvalidModel("no components".into()));
        }
        let m = StableCurveModel { components, nodes };
        if let Nodes::Explicit(pairs) = &m.nodes {
            let n = m.components.len();
            if let Some(p) = pairs.iter().find(|p| p[0] >= n || p[1] >= n) {
                return Err(DegenerationError::InvalidModel(format!("node {p:?} refers to a missing component")));
            }
            if !m.is_connected() {
                return Err(DegenerationError::InvalidModel("dual graph is disconnected".into()));
            }
        }
        Ok(m)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn nodes(&self) -> &Nodes {
        &self.nodes
    }

    pub fn incidence_known(&self) -> bool {
        matches!(self.nodes, Nodes::Explicit(_))
    }

    /// Number of components.
    pub fn nu(&self) -> u64 {
        self.components.len() as u64
    }

    /// Number of nodes.
    pub fn delta(&self) -> u64 {
        match &self.nodes {
            Nodes::Explicit(p) => p.len() as u64,
            Nodes::Count { count } => *count,
        }
    }

    /// Sum of the component genera.
    pub fn sigma(&self) -> u64 {
        self.components.iter().map(|c| c.genus).sum()
    }

    /// `sigma + delta - nu + 1`.
    pub fn arithmetic_genus(&self) -> i64 {
        self.sigma() as i64 + self.delta() as i64 - self.nu() as i64 + 1
    }

    fn is_connected(&self) -> bool {
        let Nodes::Explicit(pairs) = &self.nodes else {
            return true;
        };
        let n = self.components.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &[a, b] in pairs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|i| find(&mut parent, i) == root)
    }

    /// Node branches on each component; a self-node contributes two.
    pub fn branch_counts(&self) -> Option<Vec<u64>> {
        let Nodes::Explicit(pairs) = &self.nodes else {
            return None;
        };
        let mut b = vec![0; self.components.len()];
        for &[x, y] in pairs {
            b[x] += 1;
            b[y] += 1;
        }
        Some(b)
    }

    /// Every rational component carries at least three node branches.
    /// `None` when incidence is unknown.
    pub fn genus_zero_stable(&self) -> Option<bool> {
        let b = self.branch_counts()?;
        Some(self.components.iter().zip(b).all(|(c, k)| c.genus > 0 || k >= 3))
    }
}

/// Boundary divisors with a limit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Divisor {
    ThetaNull,
    TThetaNull,
    A0,
    B0,
    Ai,
    Bi,
}

impl Divisor {
    pub const ALL: [Divisor; 6] =
        [Divisor::ThetaNull, Divisor::TThetaNull, Divisor::A0, Divisor::B0, Divisor::Ai, Divisor::Bi];

    pub fn takes_index(self) -> bool {
        matches!(self, Divisor::Ai | Divisor::Bi)
    }

    /// Admissible range of `i` for genus `g` (empty for unindexed divisors).
    pub fn index_range(self, g: u64) -> std::ops::RangeInclusive<u64> {
        match self {
            Divisor::Ai => 1..=g.saturating_sub(1),
            Divisor::Bi => 2..=g.saturating_sub(2),
            _ => 1..=0,
        }
    }

    /// Arithmetic genus every limit model must have.
    pub fn expected_arithmetic_genus(self, g: u64) -> i64 {
        let g = g as i64;
        match self {
            Divisor::TThetaNull => 1 + 3 * g * (g - 1) / 2,
            _ => 1 + 3 * g * (g - 1),
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Divisor::ThetaNull => "thetanull",
            Divisor::TThetaNull => "T-thetanull",
            Divisor::A0 => "A0",
            Divisor::B0 => "B0",
            Divisor::Ai => "Ai",
            Divisor::Bi => "Bi",
        })
    }
}

impl FromStr for Divisor {
    type Err = DegenerationError;

    fn from_str(s: &str) -> Result<Self> {
        Divisor::ALL
            .into_iter()
            .find(|d| d.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| DegenerationError::UnknownDivisor(s.to_string()))
    }
}

fn require_genus(g: u64) -> Result<()> {
    if g < 3 {
        return Err(DegenerationError::GenusTooSmall { g, min: 3 });
    }
    Ok(())
}

fn repeat(pair: [usize; 2], k: u64) -> impl Iterator<Item = [usize; 2]> {
    std::iter::repeat(pair).take(k as usize)
}

/// Trace-curve double cover and the curve over the diagonal, meeting at the
/// `4g - 4` diagonal points.
pub fn limit_model_thetanull(g: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    StableCurveModel::new(
        vec![comp("Gamma~", (g - 1) * (3 * g - 8) + 1), comp("C~", 4 * g - 3)],
        Nodes::Explicit(repeat([0, 1], 4 * g - 4).collect()),
    )
}

/// Symmetric-square version: trace curve and the diagonal.
pub fn limit_model_t_thetanull(g: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    StableCurveModel::new(
        vec![comp("Gamma", (g - 3) * (3 * g - 4) / 2), comp("Delta", g)],
        Nodes::Explicit(repeat([0, 1], 4 * g - 4).collect()),
    )
}

/// Irreducible curve `Sigma` with `2g - 1` pairs of points identified.
pub fn limit_model_a0(g: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    StableCurveModel::new(
        vec![comp("Sigma", (g - 1) * (3 * g - 2))],
        Nodes::Explicit(repeat([0, 0], 2 * g - 1).collect()),
    )
}

/// `S(C) + C_1 + C_2` over the normalization `C` of genus `g - 1`.
pub fn limit_model_b0(g: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    let nodes = repeat([0, 1], 2 * g - 2).chain(repeat([0, 2], 2 * g - 2)).chain(repeat([1, 2], 2)).collect();
    StableCurveModel::new(
        vec![comp("S(C)", 1 + 3 * (g - 1) * (g - 2)), comp("C_1", g - 1), comp("C_2", g - 1)],
        Nodes::Explicit(nodes),
    )
}

fn check_index(d: Divisor, g: u64, i: u64) -> Result<()> {
    if !d.index_range(g).contains(&i) {
        return Err(DegenerationError::IndexOutOfRange { i, g });
    }
    Ok(())
}

/// Curve of compact type `C u D` with `g(C) = i`, `g(D) = g - i`: the two
/// Scorza curves plus the two product blocks `C x D` and `D x C`, each a grid
/// of vertical and horizontal copies.
pub fn limit_model_ai(g: u64, i: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    check_index(Divisor::Ai, g, i)?;
    let j = g - i;
    let mut components = vec![comp("S(C)", 1 + 3 * i * (i - 1)), comp("S(D)", 1 + 3 * j * (j - 1))];
    let mut nodes = Vec::new();
    for block in 0..2 {
        // In C x D the copies {x_l} x D (genus j) meet S(C) and C x {y_k}
        // (genus i) meet S(D); the D x C block mirrors this.
        let d_label = |l: u64| if block == 0 { format!("{{x_{l}}} x D") } else { format!("D x {{x_{l}}}") };
        let c_label = |k: u64| if block == 0 { format!("C x {{y_{k}}}") } else { format!("{{y_{k}}} x C") };
        let d_start = components.len();
        for l in 1..=i {
            components.push(comp(d_label(l), j));
            nodes.push([0, components.len() - 1]);
        }
        let c_start = components.len();
        for k in 1..=j {
            components.push(comp(c_label(k), i));
            nodes.push([1, components.len() - 1]);
        }
        for a in 0..i as usize {
            for b in 0..j as usize {
                nodes.push([d_start + a, c_start + b]);
            }
        }
    }
    StableCurveModel::new(components, Nodes::Explicit(nodes))
}

/// Limit over `B_i`, `2 <= i <= g - 2`. Only the total node count `2i(g-i)`
/// is recorded.
pub fn limit_model_bi(g: u64, i: u64) -> Result<StableCurveModel> {
    require_genus(g)?;
    check_index(Divisor::Bi, g, i)?;
    let j = g - i;
    let mut components = vec![comp("X'(C)", 3 * i * i + i - 1), comp("X'(D)", 3 * j * j + j - 1)];
    for k in 1..=2 * (i - 1) {
        components.push(comp(format!("D_{k}"), j));
    }
    for k in 1..=2 * (j - 1) {
        components.push(comp(format!("C_{k}"), i));
    }
    StableCurveModel::new(components, Nodes::Count { count: 2 * i * j })
}

/// Dispatches to the builder for `d`; `i` is required for `Ai` and `Bi`.
pub fn limit_model(d: Divisor, g: u64, i: Option<u64>) -> Result<StableCurveModel> {
    let idx = || i.ok_or(DegenerationError::IndexOutOfRange { i: 0, g });
    match d {
        Divisor::ThetaNull => limit_model_thetanull(g),
        Divisor::TThetaNull => limit_model_t_thetanull(g),
        Divisor::A0 => limit_model_a0(g),
        Divisor::B0 => limit_model_b0(g),
        Divisor::Ai => limit_model_ai(g, idx()?),
        Divisor::Bi => limit_model_bi(g, idx()?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymVariant {
    /// `L_M` on the symmetric square.
    Plain,
    /// `L_M(-delta/2)`.
    MinusDelta,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `(h0, h1, h2)` of the line bundle induced by `M` on `C_2`, from
/// `h0(M)` and `h1(M)`.
pub fn sym_square_cohomology(h0m: u64, h1m: u64, variant: SymVariant) -> (u64, u64, u64) {
    match variant {
        SymVariant::Plain => (choose2(h0m + 1), h0m * h1m, choose2(h1m)),
        SymVariant::MinusDelta => (choose2(h0m), h0m * h1m, choose2(h1m + 1)),
    }
}

/// Genera of the curves attached to a general spin curve of genus `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusTable {
    pub g: u64,
    /// Scorza curve
    pub scorza: i64,
    /// its quotient by the involution
    pub scorza_quotient: i64,
    pub trace_curve: i64,
    pub trace_curve_cover: i64,
    pub diagonal_cover: i64,
    pub sigma: i64,
    pub x_curve: i64,
    pub y_curve: i64,
}

pub fn genus_table(g: u64) -> Result<GenusTable> {
    require_genus(g)?;
    let g = g as i64;
    Ok(GenusTable {
        g: g as u64,
        scorza: 1 + 3 * g * (g - 1),
        scorza_quotient: 1 + 3 * g * (g - 1) / 2,
        trace_curve: (g - 3) * (3 * g - 4) / 2,
        trace_curve_cover: (g - 1) * (3 * g - 8) + 1,
        diagonal_cover: 4 * g - 3,
        sigma: (g - 1) * (3 * g - 2),
        x_curve: 3 * g * g + g,
        y_curve: g * (3 * g + 1) / 2,
    })
}

impl GenusTable {
    /// `(name, value)` in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, i64)> {
        vec![
            ("g(S)", self.scorza),
            ("g(T)", self.scorza_quotient),
            ("g(Gamma)", self.trace_curve),
            ("g(Gamma~)", self.trace_curve_cover),
            ("g(C~)", self.diagonal_cover),
            ("g(Sigma)", self.sigma),
            ("p_a(X)", self.x_curve),
            ("p_a(Y)", self.y_curve),
        ]
    }

    /// Riemann-Hurwitz and double-cover relations between the entries.
    pub fn consistency_checks(&self) -> Vec<(&'static str, bool)> {
        let g = self.g as i64;
        let branch = (4 * g - 4) / 2;
        vec![
            ("g(S) - 1 = 2 (g(T) - 1)", self.scorza - 1 == 2 * (self.scorza_quotient - 1)),
            ("g(Gamma~) = 2 g(Gamma) - 1 + (4g - 4)/2", self.trace_curve_cover == 2 * self.trace_curve - 1 + branch),
            ("g(C~) = 2g - 1 + (4g - 4)/2", self.diagonal_cover == 2 * g - 1 + branch),
            ("p_a(X) = 2 p_a(Y)", self.x_curve == 2 * self.y_curve),
        ]
    }
}
