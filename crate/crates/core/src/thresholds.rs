//! Exponent roots `a_k`, exponent cells and lambda crossover thresholds.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::family::{n_prime, realize, TransmissionGraph};
use crate::model::{total_energy, CostModel, NetworkInstance};

/// Residual tolerance for the exponent roots.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const MAX_DOUBLINGS: usize = 2000;
const PARALLEL_REL_TOL: f64 = 1e-12;

/// `|x_N - x_k|^a + x_N^a - x_k^a`: relaying sensor `k` through sensor `N`
/// minus sending it directly, per data unit.
pub fn relay_excess(inst: &NetworkInstance, k: usize, a: f64) -> f64 {
    let xn = inst.position(inst.len());
    let xk = inst.position(k);
    (xn - xk).abs().powf(a) + xn.powf(a) - xk.powf(a)
}

/// Root `a_k < 0` of [`relay_excess`] for sensor `k` in the first half.
///
/// Dividing by `x_k^a` gives `r^a + s^a - 1` with `s = x_N/x_k > r =
/// (x_N - x_k)/x_k > 1`, which is strictly increasing in `a`, so the root is
/// unique. Bracketing and bisection run on that scaled form because it
/// cannot overflow for very negative `a`.
pub fn find_a_root(inst: &NetworkInstance, k: usize, tol: f64) -> Result<f64> {
    let max = n_prime(inst);
    if k == 0 || k > max {
        return Err(Error::IndexOutOfRange { index: k, min: 1, max });
    }
    let xn = inst.position(inst.len());
    let xk = inst.position(k);
    let r = (xn - xk) / xk;
    let s = xn / xk;
    let scaled = |a: f64| r.powf(a) + s.powf(a) - 1.0;

    let mut hi = 1.0_f64;
    let mut step = 1.0_f64;
    let mut lo = hi - step;
    let mut steps = 0;
    while scaled(lo) >= 0.0 {
        steps += 1;
        if steps >= MAX_DOUBLINGS || !lo.is_finite() {
            return Err(Error::NoBracket { k, steps });
        }
        hi = lo;
        step *= 2.0;
        lo = hi - step;
    }

    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if scaled(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_lo, f_hi) = (relay_excess(inst, k, lo), relay_excess(inst, k, hi));
    let (root, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo.abs()) } else { (hi, f_hi.abs()) };
    if residual > tol {
        return Err(Error::RootNotConverged { k, residual, tol });
    }
    Ok(root)
}

/// Position of an exponent among the roots: `k` means `a in [a_{k+1}, a_k]`
/// with `a_0 = 1`, `a_{N'+1} = -inf`; `k = -1` means `a >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentCell {
    pub k: i32,
    /// `a` sits exactly on the boundary shared with cell `k + 1`.
    pub tie: bool,
}

impl ExponentCell {
    /// Family index of the graph that is optimal for `d^a` in this cell.
    pub fn family_index(&self) -> usize {
        (self.k + 1) as usize
    }

    pub fn graph(&self) -> TransmissionGraph {
        TransmissionGraph::from_family_index(self.family_index())
    }
}

/// Which pair of graphs a lambda threshold separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaKind {
    /// `lambda_0`: `T0` against `T0+`.
    NextHop,
    /// `lambda_0'`: `T1` against `T1+`.
    Direct,
    /// `lambda_k`: `T^(k)` against `T^(k+1)`; sensor `k` switches from direct
    /// to relaying through `N`.
    Split(usize),
}

impl LambdaKind {
    pub fn graphs(&self) -> (TransmissionGraph, TransmissionGraph) {
        match *self {
            LambdaKind::NextHop => (TransmissionGraph::NextHop, TransmissionGraph::NextHopPerturbed),
            LambdaKind::Direct => (TransmissionGraph::Direct, TransmissionGraph::DirectPerturbed),
            LambdaKind::Split(k) => (
                TransmissionGraph::from_family_index(k),
                TransmissionGraph::from_family_index(k + 1),
            ),
        }
    }

    pub fn index(&self) -> usize {
        match *self {
            LambdaKind::NextHop | LambdaKind::Direct => 0,
            LambdaKind::Split(k) => k,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            LambdaKind::NextHop => "lambda_0".into(),
            LambdaKind::Direct => "lambda_0'".into(),
            LambdaKind::Split(k) => format!("lambda_{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdStatus {
    Valid,
    /// Crossover exists but is not a positive finite lambda.
    Nonpositive,
    /// Both graphs carry the same second-term energy.
    Parallel,
}

impl ThresholdStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThresholdStatus::Valid => "ok",
            ThresholdStatus::Nonpositive => "degenerate",
            ThresholdStatus::Parallel => "parallel",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaThreshold {
    pub kind: LambdaKind,
    /// `None` when the status is `Parallel`.
    pub value: Option<f64>,
    pub status: ThresholdStatus,
    /// Relative gap between the two graphs' two-term energies at `value`.
    pub residual: f64,
}

impl LambdaThreshold {
    /// The value, if it is a usable positive threshold.
    pub fn valid(&self) -> Option<f64> {
        match self.status {
            ThresholdStatus::Valid => self.value,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    /// `a_1 > a_2 > ... > a_{N'}`.
    pub a_roots: Vec<f64>,
    /// `|f_k(a_k)|` for each root.
    pub root_residuals: Vec<f64>,
    /// `(a, b)` the lambda thresholds were computed for.
    pub exponents: Option<(f64, f64)>,
    pub lambdas: Vec<LambdaThreshold>,
    /// Hash of the instance the table belongs to.
    pub fingerprint: u64,
}

impl ThresholdTable {
    /// Exponent roots only.
    pub fn new(inst: &NetworkInstance, tol: f64) -> Result<Self> {
        let np = n_prime(inst);
        let a_roots = (1..=np)
            .map(|k| find_a_root(inst, k, tol))
            .collect::<Result<Vec<_>>>()?;
        let root_residuals = a_roots
            .iter()
            .enumerate()
            .map(|(idx, &a)| relay_excess(inst, idx + 1, a).abs())
            .collect();
        Ok(Self {
            a_roots,
            root_residuals,
            exponents: None,
            lambdas: Vec::new(),
            fingerprint: fingerprint(inst),
        })
    }

    pub fn n_prime(&self) -> usize {
        self.a_roots.len()
    }

    /// `a_k` with sentinels `a_0 = 1` and `a_{N'+1} = -inf`.
    pub fn boundary(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else if k <= self.a_roots.len() {
            self.a_roots[k - 1]
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn classify(&self, a: f64) -> ExponentCell {
        classify_exponent(self, a)
    }

    pub fn lambda(&self, kind: LambdaKind) -> Option<&LambdaThreshold> {
        self.lambdas.iter().find(|t| t.kind == kind)
    }

    pub fn matches(&self, inst: &NetworkInstance) -> bool {
        self.fingerprint == fingerprint(inst)
    }
}

fn fingerprint(inst: &NetworkInstance) -> u64 {
    let mut h = DefaultHasher::new();
    for (&x, &q) in inst.positions().iter().zip(inst.data_volumes()) {
        x.to_bits().hash(&mut h);
        q.to_bits().hash(&mut h);
    }
    h.finish()
}

/// The unique cell containing `a`; on a boundary the lower index is
/// returned and `tie` is set.
pub fn classify_exponent(table: &ThresholdTable, a: f64) -> ExponentCell {
    if a >= 1.0 {
        return ExponentCell { k: -1, tie: a == 1.0 };
    }
    let np = table.n_prime();
    for k in 0..np {
        let lower = table.boundary(k + 1);
        if a >= lower {
            return ExponentCell {
                k: k as i32,
                tie: a == lower,
            };
        }
    }
    ExponentCell {
        k: np as i32,
        tie: false,
    }
}

/// `lambda* = (A2 - A1) / (B1 - B2)` where `A_i`, `B_i` are the energies of
/// graph `g_i` under `d^a` and `d^b`. At `lambda*` both graphs have equal
/// `d^a + lambda d^b` energy.
pub fn lambda_crossover(
    inst: &NetworkInstance,
    a: f64,
    b: f64,
    g1: TransmissionGraph,
    g2: TransmissionGraph,
) -> Result<f64> {
    let ma = CostModel::monomial(a)?;
    let mb = CostModel::monomial(b)?;
    let q1 = realize(inst, g1)?;
    let q2 = realize(inst, g2)?;
    let (a1, a2) = (total_energy(inst, &ma, &q1)?, total_energy(inst, &ma, &q2)?);
    let (b1, b2) = (total_energy(inst, &mb, &q1)?, total_energy(inst, &mb, &q2)?);
    let den = b1 - b2;
    if den.abs() <= PARALLEL_REL_TOL * b1.abs().max(b2.abs()) {
        return Err(Error::ParallelCosts {
            g1: g1.to_string(),
            g2: g2.to_string(),
        });
    }
    Ok((a2 - a1) / den)
}

/// Closed-form thresholds for the regular network `x_i = i`; `None` means
/// a vanishing denominator.
pub fn closed_form_lambda(n: usize, np: usize, kind: LambdaKind, a: f64, b: f64) -> Option<f64> {
    let p = |base: f64, e: f64| base.powf(e);
    let nf = n as f64;
    let (num, den_terms): (f64, [f64; 3]) = match kind {
        LambdaKind::NextHop => (p(2.0, a) - 2.0, [2.0, -p(2.0, b), 0.0]),
        LambdaKind::Direct => {
            let m = (n - np - 1) as f64;
            let r = (np + 1) as f64;
            (p(nf, a) - p(m, a) - p(r, a), [p(m, b), p(r, b), -p(nf, b)])
        }
        LambdaKind::Split(k) => {
            let kf = k as f64;
            (
                p(nf - kf, a) + p(nf, a) - p(kf, a),
                [p(kf, b), -p(nf - kf, b), -p(nf, b)],
            )
        }
    };
    let den: f64 = den_terms.iter().sum();
    let scale = den_terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
    if den.abs() <= PARALLEL_REL_TOL * scale {
        None
    } else {
        Some(num / den)
    }
}

/// Kinds that exist on `inst`.
pub fn lambda_kinds(inst: &NetworkInstance) -> Vec<LambdaKind> {
    let mut kinds = Vec::new();
    if TransmissionGraph::NextHopPerturbed.routing_tree(inst).is_ok() {
        kinds.push(LambdaKind::NextHop);
    }
    if TransmissionGraph::DirectPerturbed.routing_tree(inst).is_ok() {
        kinds.push(LambdaKind::Direct);
    }
    kinds.extend((1..=n_prime(inst)).map(LambdaKind::Split));
    kinds
}

/// Roots plus every lambda threshold for the cost `d^a + lambda d^b`.
/// Regular networks use the closed forms, others the realized-graph
/// crossovers.
pub fn lambda_table(inst: &NetworkInstance, a: f64, b: f64, tol: f64) -> Result<ThresholdTable> {
    let mut table = ThresholdTable::new(inst, tol)?;
    table.exponents = Some((a, b));
    let np = table.n_prime();
    for kind in lambda_kinds(inst) {
        let value = if inst.is_regular() {
            closed_form_lambda(inst.len(), np, kind, a, b)
        } else {
            let (g1, g2) = kind.graphs();
            match lambda_crossover(inst, a, b, g1, g2) {
                Ok(v) => Some(v),
                Err(Error::ParallelCosts { .. }) => None,
                Err(e) => return Err(e),
            }
        };
        let (status, residual) = match value {
            None => (ThresholdStatus::Parallel, f64::NAN),
            Some(v) => {
                let status = if v.is_finite() && v > 0.0 {
                    ThresholdStatus::Valid
                } else {
                    ThresholdStatus::Nonpositive
                };
                let residual = if v.is_finite() && v >= 0.0 {
                    crossover_residual(inst, a, b, v, kind)?
                } else {
                    f64::NAN
                };
                (status, residual)
            }
        };
        table.lambdas.push(LambdaThreshold {
            kind,
            value,
            status,
            residual,
        });
    }
    Ok(table)
}

fn crossover_residual(inst: &NetworkInstance, a: f64, b: f64, lambda: f64, kind: LambdaKind) -> Result<f64> {
    let model = CostModel::two_term(a, b, lambda)?;
    let (g1, g2) = kind.graphs();
    let e1 = total_energy(inst, &model, &realize(inst, g1)?)?;
    let e2 = total_energy(inst, &model, &realize(inst, g2)?)?;
    Ok((e1 - e2).abs() / e1.abs().max(e2.abs()))
}
