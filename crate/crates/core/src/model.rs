//! Network instances, distance cost models and flow matrices.
//!
//! Nodes are indexed `1..=N`; index `0` is the data collector at the origin.
//! Energy and data volumes are dimensionless.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default absolute tolerance for flow-conservation residuals.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Sensors on the positive half line with the collector at `x_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    positions: Vec<f64>,
    data: Vec<f64>,
    regular: bool,
}

impl NetworkInstance {
    /// Builds an instance from strictly increasing positive positions and
    /// strictly positive data volumes.
    pub fn new(positions: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidInstance("at least one sensor is required".into()));
        }
        if positions.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: positions.len(),
                actual: data.len(),
            });
        }
        let mut prev = 0.0;
        for (idx, &x) in positions.iter().enumerate() {
            if !x.is_finite() || x <= prev {
                return Err(Error::InvalidInstance(format!(
                    "position x_{} = {} must be finite and greater than {}",
                    idx + 1,
                    x,
                    prev
                )));
            }
            prev = x;
        }
        for (idx, &q) in data.iter().enumerate() {
            if !q.is_finite() || q <= 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "data volume Q_{} = {} must be finite and positive",
                    idx + 1,
                    q
                )));
            }
        }
        let regular = positions
            .iter()
            .enumerate()
            .all(|(idx, &x)| x == (idx + 1) as f64);
        Ok(Self {
            positions,
            data,
            regular,
        })
    }

    /// The regular network `x_i = i` with identical data volume `q` per node.
    pub fn regular(n: usize, q: f64) -> Result<Self> {
        Self::regular_with_data(vec![q; n])
    }

    pub fn regular_with_data(data: Vec<f64>) -> Result<Self> {
        let positions = (1..=data.len()).map(|i| i as f64).collect();
        Self::new(positions, data)
    }

    /// Number of sensors `N`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// Position of node `i`; node 0 is the collector.
    pub fn position(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.positions[i - 1]
        }
    }

    /// Data generated by node `i`; the collector generates nothing.
    pub fn data(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.data[i - 1]
        }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn data_volumes(&self) -> &[f64] {
        &self.data
    }

    pub fn total_data(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Same geometry with every data volume multiplied by `factor > 0`.
    pub fn with_scaled_data(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.positions.clone(),
            self.data.iter().map(|q| q * factor).collect(),
        )
    }
}

/// One `lambda * d^exponent` summand of a cost function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub lambda: f64,
    pub exponent: f64,
}

impl Term {
    pub fn new(lambda: f64, exponent: f64) -> Self {
        Self { lambda, exponent }
    }
}

/// Gain function `γ(x_i, x_j) > 0` used by inverse-gain costs.
#[derive(Clone)]
pub struct GainFn(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl GainFn {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn eval(&self, xi: f64, xj: f64) -> f64 {
        (self.0)(xi, xj)
    }
}

impl fmt::Debug for GainFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GainFn(..)")
    }
}

impl PartialEq for GainFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// Per-unit-data transmission cost as a function of hop distance.
#[derive(Debug, Clone, PartialEq)]
pub enum CostModel {
    /// `d^a`
    Monomial { a: f64 },
    /// `d^a + lambda * d^b`
    TwoTerm { a: f64, b: f64, lambda: f64 },
    /// `sum_n lambda_n * d^alpha_n`
    MultiTerm(Vec<Term>),
    /// `1 / γ(x_i, x_j)` for an arbitrary positive gain.
    InverseGain(GainFn),
}

impl CostModel {
    pub fn monomial(a: f64) -> Result<Self> {
        let model = CostModel::Monomial { a };
        model.validate()?;
        Ok(model)
    }

    pub fn two_term(a: f64, b: f64, lambda: f64) -> Result<Self> {
        let model = CostModel::TwoTerm { a, b, lambda };
        model.validate()?;
        Ok(model)
    }

    pub fn multi_term(terms: Vec<Term>) -> Result<Self> {
        let model = CostModel::MultiTerm(terms);
        model.validate()?;
        Ok(model)
    }

    pub fn inverse_gain(gain: GainFn) -> Self {
        CostModel::InverseGain(gain)
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, value: f64) -> Result<()> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite { name, value })
            }
        }
        fn lambda_ok(value: f64) -> Result<()> {
            finite("lambda", value)?;
            if value < 0.0 {
                Err(Error::NegativeLambda(value))
            } else {
                Ok(())
            }
        }
        match self {
            CostModel::Monomial { a } => finite("a", *a),
            CostModel::TwoTerm { a, b, lambda } => {
                finite("a", *a)?;
                finite("b", *b)?;
                lambda_ok(*lambda)
            }
            CostModel::MultiTerm(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidInstance("multi-term cost needs at least one term".into()));
                }
                for t in terms {
                    finite("alpha", t.exponent)?;
                    lambda_ok(t.lambda)?;
                }
                Ok(())
            }
            CostModel::InverseGain(_) => Ok(()),
        }
    }

    /// Term list, or `None` for inverse-gain costs.
    pub fn terms(&self) -> Option<Vec<Term>> {
        match self {
            CostModel::Monomial { a } => Some(vec![Term::new(1.0, *a)]),
            CostModel::TwoTerm { a, b, lambda } => {
                Some(vec![Term::new(1.0, *a), Term::new(*lambda, *b)])
            }
            CostModel::MultiTerm(terms) => Some(terms.clone()),
            CostModel::InverseGain(_) => None,
        }
    }

    /// The same cost multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> CostModel {
        match self {
            CostModel::InverseGain(g) => {
                let g = g.clone();
                CostModel::InverseGain(GainFn::new(move |x, y| g.eval(x, y) / factor))
            }
            other => CostModel::MultiTerm(
                other
                    .terms()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|t| Term::new(t.lambda * factor, t.exponent))
                    .collect(),
            ),
        }
    }

    /// Energy to move one data unit directly from `xi` to `xj`.
    pub fn edge_cost(&self, xi: f64, xj: f64) -> Result<f64> {
        let d = (xi - xj).abs();
        let degenerate = || Error::DegenerateDistance { xi, xj };
        let power = |exponent: f64| -> Result<f64> {
            if d == 0.0 && exponent <= 0.0 {
                Err(degenerate())
            } else {
                Ok(d.powf(exponent))
            }
        };
        match self {
            CostModel::Monomial { a } => power(*a),
            CostModel::TwoTerm { a, b, lambda } => {
                if *lambda < 0.0 {
                    return Err(Error::NegativeLambda(*lambda));
                }
                let mut cost = power(*a)?;
                if *lambda > 0.0 {
                    cost += lambda * power(*b)?;
                }
                Ok(cost)
            }
            CostModel::MultiTerm(terms) => {
                let mut cost = 0.0;
                for t in terms {
                    if t.lambda < 0.0 {
                        return Err(Error::NegativeLambda(t.lambda));
                    }
                    if t.lambda > 0.0 {
                        cost += t.lambda * power(t.exponent)?;
                    }
                }
                Ok(cost)
            }
            CostModel::InverseGain(g) => {
                if d == 0.0 {
                    return Err(degenerate());
                }
                let gain = g.eval(xi, xj);
                if gain.is_nan() || gain <= 0.0 || gain.is_infinite() {
                    return Err(Error::DegenerateGain(xi));
                }
                Ok(1.0 / gain)
            }
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModel::Monomial { a } => write!(f, "d^{a}"),
            CostModel::TwoTerm { a, b, lambda } => write!(f, "d^{a} + {lambda}*d^{b}"),
            CostModel::MultiTerm(terms) => {
                for (idx, t) in terms.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{}*d^{}", t.lambda, t.exponent)?;
                }
                Ok(())
            }
            CostModel::InverseGain(_) => f.write_str("1/gain"),
        }
    }
}

/// Dense `(N+1) x (N+1)` table of edge costs; the diagonal is unused.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n: usize,
    cost: Vec<f64>,
}

impl CostMatrix {
    pub fn new(inst: &NetworkInstance, model: &CostModel) -> Result<Self> {
        model.validate()?;
        let n = inst.len();
        let mut cost = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    cost[i * (n + 1) + j] = model.edge_cost(inst.position(i), inst.position(j))?;
                }
            }
        }
        Ok(Self { n, cost })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cost[i * (self.n + 1) + j]
    }
}

/// `q[i][j]`: data sent directly from node `i` to node `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    n: usize,
    q: Vec<f64>,
}

impl FlowMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            q: vec![0.0; (n + 1) * (n + 1)],
        }
    }

    /// Builds a matrix from `(sender, receiver, amount)` triples; repeated
    /// edges accumulate.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = Self::zeros(n);
        for &(i, j, amount) in edges {
            m.add(i, j, amount)?;
        }
        Ok(m)
    }

    /// Number of sensors `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * (self.n + 1) + j]
    }

    fn check_edge(&self, i: usize, j: usize, amount: f64) -> Result<()> {
        if i > self.n || j > self.n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                min: 0,
                max: self.n,
            });
        }
        let reason = if !amount.is_finite() {
            Some("amount must be finite")
        } else if amount < 0.0 {
            Some("amount must be nonnegative")
        } else if amount > 0.0 && i == j {
            Some("self edges are not allowed")
        } else if amount > 0.0 && i == 0 {
            Some("the collector does not transmit")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidFlow { i, j, reason }),
            None => Ok(()),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, amount: f64) -> Result<()> {
        self.check_edge(i, j, amount)?;
        self.q[i * (self.n + 1) + j] = amount;
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, amount: f64) -> Result<()> {
        let total = self.get_checked(i, j)? + amount;
        self.set(i, j, total)
    }

    fn get_checked(&self, i: usize, j: usize) -> Result<f64> {
        if i > self.n || j > self.n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                min: 0,
                max: self.n,
            });
        }
        Ok(self.get(i, j))
    }

    /// Positive entries ordered by sender, then receiver.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..=n).flat_map(move |i| {
            (0..=n).filter_map(move |j| {
                let v = self.get(i, j);
                (v > 0.0).then_some((i, j, v))
            })
        })
    }

    pub fn outflow(&self, i: usize) -> f64 {
        (0..=self.n).map(|j| self.get(i, j)).sum()
    }

    pub fn inflow(&self, i: usize) -> f64 {
        (0..=self.n).map(|j| self.get(j, i)).sum()
    }

    /// `alpha * self + beta * other` for nonnegative coefficients.
    pub fn combine(&self, alpha: f64, other: &FlowMatrix, beta: f64) -> Result<FlowMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(Error::InvalidFlow {
                i: 0,
                j: 0,
                reason: "combination coefficients must be nonnegative",
            });
        }
        Ok(FlowMatrix {
            n: self.n,
            q: self
                .q
                .iter()
                .zip(&other.q)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
        })
    }
}

/// Outcome of a flow-conservation check.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// `residuals[i - 1] = |outflow_i - Q_i - inflow_i|` for node `i`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Node with the largest residual (1-based).
    pub worst_node: usize,
}

/// Checks that every sensor sends out exactly its own data plus everything
/// it receives.
pub fn check_feasible(inst: &NetworkInstance, q: &FlowMatrix, tol: f64) -> Result<Feasibility> {
    if q.n() != inst.len() {
        return Err(Error::DimensionMismatch {
            expected: inst.len(),
            actual: q.n(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NonFinite {
            name: "tol",
            value: tol,
        });
    }
    let residuals: Vec<f64> = (1..=inst.len())
        .map(|i| (q.outflow(i) - inst.data(i) - q.inflow(i)).abs())
        .collect();
    let (worst, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0_f64), |acc, (idx, r)| if r > acc.1 { (idx, r) } else { acc });
    Ok(Feasibility {
        feasible: max_residual <= tol,
        residuals,
        max_residual,
        worst_node: worst + 1,
    })
}

/// `sum_{i,j} q[i][j] * E(x_i, x_j)`.
pub fn total_energy(inst: &NetworkInstance, model: &CostModel, q: &FlowMatrix) -> Result<f64> {
    if q.n() != inst.len() {
        return Err(Error::DimensionMismatch {
            expected: inst.len(),
            actual: q.n(),
        });
    }
    model.validate()?;
    let mut energy = 0.0;
    for (i, j, amount) in q.edges() {
        energy += amount * model.edge_cost(inst.position(i), inst.position(j))?;
    }
    Ok(energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Additivity {
    /// A relay never increases the cost: `E(i,j) + E(j,k) <= E(i,k)`.
    Super,
    /// A relay never decreases the cost: `E(i,j) + E(j,k) >= E(i,k)`.
    Sub,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityCheck {
    pub class: Additivity,
    /// `E(xi,xj) + E(xj,xk) - E(xi,xk)`
    pub slack: f64,
}

/// Classifies one ordered triple `xi >= xj >= xk >= 0`. Zero slack (up to
/// rounding) counts as sub-additive.
pub fn superadditivity_check(model: &CostModel, xi: f64, xj: f64, xk: f64) -> Result<AdditivityCheck> {
    if !(xi >= xj && xj >= xk && xk >= 0.0) {
        return Err(Error::UnorderedTriple { xi, xj, xk });
    }
    let ij = model.edge_cost(xi, xj)?;
    let jk = model.edge_cost(xj, xk)?;
    let ik = model.edge_cost(xi, xk)?;
    let slack = ij + jk - ik;
    let scale = ij.abs() + jk.abs() + ik.abs();
    let class = if slack < -1e-12 * scale {
        Additivity::Super
    } else {
        Additivity::Sub
    };
    Ok(AdditivityCheck { class, slack })
}

/// Aggregate classification over several triples: `Neither` when some
/// triples are strictly super- and others strictly sub-additive.
pub fn classify_triples(model: &CostModel, triples: &[(f64, f64, f64)]) -> Result<Additivity> {
    let mut saw_super = false;
    let mut saw_strict_sub = false;
    for &(xi, xj, xk) in triples {
        let check = superadditivity_check(model, xi, xj, xk)?;
        match check.class {
            Additivity::Super => saw_super = true,
            Additivity::Sub if check.slack > 0.0 => saw_strict_sub = true,
            _ => {}
        }
    }
    Ok(match (saw_super, saw_strict_sub) {
        (true, true) => Additivity::Neither,
        (true, false) => Additivity::Super,
        _ => Additivity::Sub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_rejects_bad_input() {
        assert!(NetworkInstance::new(vec![], vec![]).is_err());
        assert!(NetworkInstance::new(vec![2.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(NetworkInstance::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(NetworkInstance::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(NetworkInstance::new(vec![1.0], vec![0.0]).is_err());
        assert!(matches!(
            NetworkInstance::new(vec![1.0], vec![1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn regular_flag_is_exact() {
        assert!(NetworkInstance::regular(4, 1.0).unwrap().is_regular());
        let inst = NetworkInstance::new(vec![1.0, 2.0, 3.0 + 1e-15], vec![1.0; 3]).unwrap();
        assert!(!inst.is_regular());
        let inst = NetworkInstance::new(vec![1.0, 2.5], vec![1.0; 2]).unwrap();
        assert!(!inst.is_regular());
    }

    #[test]
    fn edge_cost_examples() {
        let m = CostModel::monomial(2.0).unwrap();
        assert_eq!(m.edge_cost(3.0, 1.0).unwrap(), 4.0);
        let m = CostModel::monomial(0.0).unwrap();
        assert_eq!(m.edge_cost(5.0, 1.0).unwrap(), 1.0);
        let m = CostModel::two_term(2.0, 0.5, 3.0).unwrap();
        assert_eq!(m.edge_cost(4.0, 0.0).unwrap(), 22.0);
    }

    #[test]
    fn edge_cost_degenerate_and_negative_lambda() {
        let m = CostModel::monomial(-1.0).unwrap();
        assert!(matches!(m.edge_cost(2.0, 2.0), Err(Error::DegenerateDistance { .. })));
        let m = CostModel::monomial(0.0).unwrap();
        assert!(m.edge_cost(2.0, 2.0).is_err());
        let m = CostModel::monomial(2.0).unwrap();
        assert_eq!(m.edge_cost(2.0, 2.0).unwrap(), 0.0);
        assert_eq!(CostModel::two_term(1.0, 1.0, -0.5), Err(Error::NegativeLambda(-0.5)));
        assert!(CostModel::multi_term(vec![Term::new(-1.0, 2.0)]).is_err());
    }

    #[test]
    fn monomial_matches_zero_lambda_two_term() {
        for &a in &[-3.0, -0.5, 0.0, 0.7, 1.0, 2.5] {
            let m = CostModel::monomial(a).unwrap();
            for &b in &[-2.0, 0.0, 3.0] {
                let t = CostModel::two_term(a, b, 0.0).unwrap();
                for &(x, y) in &[(1.0, 0.0), (3.5, 1.25), (0.1, 7.0)] {
                    assert_eq!(m.edge_cost(x, y).unwrap(), t.edge_cost(x, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let inst = NetworkInstance::regular_with_data(vec![5.0]).unwrap();
        let q = FlowMatrix::from_edges(1, &[(1, 0, 5.0)]).unwrap();
        let f = check_feasible(&inst, &q, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert!(f.feasible);
        assert_eq!(f.max_residual, 0.0);

        let inst = NetworkInstance::regular(2, 1.0).unwrap();
        let q = FlowMatrix::from_edges(2, &[(2, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert!(check_feasible(&inst, &q, DEFAULT_FEASIBILITY_TOL).unwrap().feasible);

        let q = FlowMatrix::from_edges(2, &[(2, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let f = check_feasible(&inst, &q, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert!(!f.feasible);
        assert_eq!(f.worst_node, 1);
        assert_eq!(f.max_residual, 1.0);
        assert_eq!(f.residuals, vec![1.0, 0.0]);

        let q = FlowMatrix::zeros(3);
        assert!(matches!(
            check_feasible(&inst, &q, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn flow_matrix_rejects_invalid_entries() {
        let mut q = FlowMatrix::zeros(2);
        assert!(q.set(1, 1, 1.0).is_err());
        assert!(q.set(0, 1, 1.0).is_err());
        assert!(q.set(1, 0, -1.0).is_err());
        assert!(q.set(3, 0, 1.0).is_err());
        assert!(q.set(2, 0, 1.0).is_ok());
        assert_eq!(q.edges().collect::<Vec<_>>(), vec![(2, 0, 1.0)]);
    }

    #[test]
    fn total_energy_examples() {
        let inst = NetworkInstance::regular(3, 1.0).unwrap();
        let m = CostModel::monomial(2.0).unwrap();
        let next_hop = FlowMatrix::from_edges(3, &[(3, 2, 1.0), (2, 1, 2.0), (1, 0, 3.0)]).unwrap();
        assert_eq!(total_energy(&inst, &m, &next_hop).unwrap(), 6.0);
        let direct = FlowMatrix::from_edges(3, &[(1, 0, 1.0), (2, 0, 1.0), (3, 0, 1.0)]).unwrap();
        assert_eq!(total_energy(&inst, &m, &direct).unwrap(), 14.0);
        let linear = CostModel::monomial(1.0).unwrap();
        assert_eq!(total_energy(&inst, &linear, &next_hop).unwrap(), 6.0);
        assert_eq!(total_energy(&inst, &linear, &direct).unwrap(), 6.0);
    }

    #[test]
    fn additivity_examples() {
        let c = superadditivity_check(&CostModel::monomial(2.0).unwrap(), 3.0, 2.0, 0.0).unwrap();
        assert_eq!(c.class, Additivity::Super);
        assert_eq!(c.slack, 1.0 + 4.0 - 9.0);

        let c = superadditivity_check(&CostModel::monomial(0.5).unwrap(), 4.0, 1.0, 0.0).unwrap();
        assert_eq!(c.class, Additivity::Sub);
        assert!((c.slack - (3f64.sqrt() + 1.0 - 2.0)).abs() < 1e-15);

        let c = superadditivity_check(&CostModel::monomial(1.0).unwrap(), 5.0, 2.0, 1.0).unwrap();
        assert_eq!(c.class, Additivity::Sub);
        assert_eq!(c.slack, 0.0);

        assert!(superadditivity_check(&CostModel::monomial(1.0).unwrap(), 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn mixed_cost_is_neither() {
        // small distances dominated by d^3, large ones by d^0.2
        let m = CostModel::two_term(3.0, 0.2, 1.0).unwrap();
        let triples = [(0.2, 0.1, 0.0), (200.0, 100.0, 0.0)];
        assert_eq!(classify_triples(&m, &triples).unwrap(), Additivity::Neither);
    }

    #[test]
    fn inverse_gain_cost() {
        let g = GainFn::new(|x: f64, y: f64| (x - y).abs().powf(-2.0));
        let m = CostModel::inverse_gain(g);
        assert!((m.edge_cost(3.0, 0.0).unwrap() - 9.0).abs() < 1e-12);
        assert!(m.edge_cost(1.0, 1.0).is_err());
    }
}
