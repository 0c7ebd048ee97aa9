//! Optimal transmission graphs for monomial, two-term and multi-term costs.
//!
//! Every graph named by the cell rules is checked against the shortest-path
//! optimality conditions before it is reported as certified. Candidates that
//! fail the check, and parameter regions no rule covers, fall back to a
//! search over the extended family and then to the exhaustive oracle.

use std::fmt;

use crate::error::Result;
use crate::family::{enumerate_extended, realize, TransmissionGraph};
use crate::format::g12;
use crate::model::{total_energy, CostMatrix, CostModel, FlowMatrix, NetworkInstance, Term};
use crate::oracle::{oracle_min_with, OracleOptions, DEFAULT_ORACLE_CAP};
use crate::routing::RoutingTree;
use crate::thresholds::{lambda_table, ExponentCell, LambdaKind, ThresholdTable, DEFAULT_ROOT_TOL};

/// Cell rule that named a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Monomial cost: the exponent's cell decides.
    MonomialCell,
    /// Every exponent lies in one cell.
    SharedCell,
    /// Two exponents in neighbouring cells, split by one threshold.
    AdjacentCells,
    /// `a >= 1` and `b` below the first root.
    NextHopToRelay,
    /// Both exponents below one, several cells apart.
    RelaySequence,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::MonomialCell => "monomial-cell",
            Rule::SharedCell => "shared-cell",
            Rule::AdjacentCells => "adjacent-cells",
            Rule::NextHopToRelay => "next-hop-to-relay",
            Rule::RelaySequence => "relay-sequence",
        }
    }
}

/// How the returned graph was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Rule(Rule),
    /// Best member of the canonical and perturbed family.
    FamilySearch,
    /// Exhaustive search over all routing trees.
    Oracle,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Rule(r) => write!(f, "rule:{}", r.as_str()),
            Basis::FamilySearch => f.write_str("family-search"),
            Basis::Oracle => f.write_str("oracle"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// `None` when the optimum came from the oracle and is not a family member.
    pub graph: Option<TransmissionGraph>,
    pub tree: RoutingTree,
    pub flow: FlowMatrix,
    /// `total_energy(flow)` under the requested cost model.
    pub energy: f64,
    pub regime: String,
    pub basis: Basis,
    /// A cell rule named the graph and it passed the optimality check.
    pub certified: bool,
    /// The returned tree passes the optimality check.
    pub verified: bool,
    /// Other family graphs with the same energy.
    pub ties: Vec<TransmissionGraph>,
    /// Rule whose candidate failed the optimality check, if any.
    pub rejected_rule: Option<Rule>,
}

impl Solution {
    /// Graph name, or the explicit tree when it is not a family member.
    pub fn graph_name(&self) -> String {
        match self.graph {
            Some(g) => g.to_string(),
            None => format!("tree[{}]", self.tree),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub root_tol: f64,
    /// Largest `N` handed to the oracle in uncovered regions.
    pub oracle_cap: usize,
    /// Relative slack allowed in the optimality check.
    pub certificate_tol: f64,
    /// Relative energy gap under which family graphs count as tied.
    pub tie_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            root_tol: DEFAULT_ROOT_TOL,
            oracle_cap: DEFAULT_ORACLE_CAP,
            certificate_tol: 1e-10,
            tie_tol: 1e-9,
        }
    }
}

pub fn solve(inst: &NetworkInstance, model: &CostModel) -> Result<Solution> {
    solve_with(inst, model, &SolveOptions::default())
}

pub fn solve_with(inst: &NetworkInstance, model: &CostModel, opts: &SolveOptions) -> Result<Solution> {
    model.validate()?;
    match model {
        CostModel::Monomial { a } => solve_monomial_with(inst, *a, opts),
        CostModel::TwoTerm { a, b, lambda } => solve_twoterm_with(inst, *a, *b, *lambda, opts),
        CostModel::MultiTerm(terms) => solve_multiterm_with(inst, terms, opts),
        CostModel::InverseGain(_) => {
            let ctx = Context::new(inst, model, opts)?;
            ctx.fallback("inverse-gain cost: no cell rule applies".into(), None)
        }
    }
}

pub fn solve_monomial(inst: &NetworkInstance, a: f64) -> Result<Solution> {
    solve_monomial_with(inst, a, &SolveOptions::default())
}

pub fn solve_monomial_with(inst: &NetworkInstance, a: f64, opts: &SolveOptions) -> Result<Solution> {
    let model = CostModel::monomial(a)?;
    let ctx = Context::new(inst, &model, opts)?;
    let table = ThresholdTable::new(inst, opts.root_tol)?;
    let cell = table.classify(a);
    let regime = describe_cell("a", a, cell, &table);
    ctx.named(&[cell.graph()], Rule::MonomialCell, regime)
}

pub fn solve_multiterm(inst: &NetworkInstance, terms: &[Term]) -> Result<Solution> {
    solve_multiterm_with(inst, terms, &SolveOptions::default())
}

pub fn solve_multiterm_with(inst: &NetworkInstance, terms: &[Term], opts: &SolveOptions) -> Result<Solution> {
    let model = CostModel::multi_term(terms.to_vec())?;
    let active: Vec<Term> = terms.iter().copied().filter(|t| t.lambda > 0.0).collect();
    let ctx = Context::new(inst, &model, opts)?;
    if active.is_empty() {
        return ctx.named(&[TransmissionGraph::NextHop], Rule::SharedCell, "zero cost: every graph is optimal".into());
    }
    let table = ThresholdTable::new(inst, opts.root_tol)?;
    // a boundary exponent belongs to both of its cells
    let mut lo = 0usize;
    let mut hi = usize::MAX;
    for t in &active {
        let cell = table.classify(t.exponent);
        let g = cell.family_index();
        lo = lo.max(g);
        hi = hi.min(if cell.tie { g + 1 } else { g });
    }
    if lo <= hi {
        let graph = TransmissionGraph::from_family_index(lo);
        let regime = format!("all {} exponents share the cell of {graph}", active.len());
        return ctx.named(&[graph], Rule::SharedCell, regime);
    }
    if active.len() == 2 {
        let (t1, t2) = (active[0], active[1]);
        let inner = solve_twoterm_with(inst, t1.exponent, t2.exponent, t2.lambda / t1.lambda, opts)?;
        let energy = total_energy(inst, &model, &inner.flow)?;
        let ties = ctx.ties(inner.graph, energy)?;
        return Ok(Solution {
            energy,
            ties,
            regime: format!("two active terms scaled by {}: {}", g12(t1.lambda), inner.regime),
            ..inner
        });
    }
    ctx.fallback(format!("{} exponents spread over several cells", active.len()), None)
}

pub fn solve_twoterm(inst: &NetworkInstance, a: f64, b: f64, lambda: f64) -> Result<Solution> {
    solve_twoterm_with(inst, a, b, lambda, &SolveOptions::default())
}

pub fn solve_twoterm_with(inst: &NetworkInstance, a: f64, b: f64, lambda: f64, opts: &SolveOptions) -> Result<Solution> {
    let model = CostModel::two_term(a, b, lambda)?;
    if lambda == 0.0 {
        let mono = solve_monomial_with(inst, a, opts)?;
        let energy = total_energy(inst, &model, &mono.flow)?;
        return Ok(Solution {
            energy,
            regime: format!("lambda = 0: {}", mono.regime),
            ..mono
        });
    }
    let ctx = Context::new(inst, &model, opts)?;
    let (hi, lo, lam, mut prefix) = if a >= b {
        (a, b, lambda, String::new())
    } else {
        let lam = 1.0 / lambda;
        (b, a, lam, format!("exponents swapped, lambda rescaled to {}; ", g12(lam)))
    };
    let table = lambda_table(inst, hi, lo, opts.root_tol)?;
    let ca = table.classify(hi);
    let cb = table.classify(lo);
    prefix.push_str(&format!(
        "{}, {}, lambda = {}: ",
        describe_cell("a", hi, ca, &table),
        describe_cell("b", lo, cb, &table),
        g12(lam)
    ));
    match dispatch_twoterm(&table, ca, cb, lam) {
        Dispatch::Named(rule, graphs, why) => ctx.named(&graphs, rule, prefix + &why),
        Dispatch::Gap(why) => ctx.fallback(prefix + &why, None),
    }
}

enum Dispatch {
    Named(Rule, Vec<TransmissionGraph>, String),
    Gap(String),
}

fn threshold(table: &ThresholdTable, kind: LambdaKind) -> Option<f64> {
    table.lambda(kind).and_then(|t| t.valid())
}

fn show(label: &str, v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{label} = {}", g12(v)),
        None => format!("{label} undefined"),
    }
}

fn dispatch_twoterm(table: &ThresholdTable, ca: ExponentCell, cb: ExponentCell, lam: f64) -> Dispatch {
    use TransmissionGraph as G;
    let mut ga = ca.family_index();
    let gb = cb.family_index();
    if ca.tie && ga < gb {
        ga += 1;
    }
    let graph = G::from_family_index;
    if ga == gb {
        return Dispatch::Named(Rule::SharedCell, vec![graph(ga)], format!("both exponents in the cell of {}", graph(ga)));
    }
    if gb == ga + 1 {
        if ga == 0 {
            let l0 = threshold(table, LambdaKind::NextHop);
            let l0p = threshold(table, LambdaKind::Direct);
            let below = l0.is_some_and(|l| lam <= l);
            let above = l0p.is_some_and(|l| lam >= l);
            let bounds = format!("{}, {}", show("lambda_0", l0), show("lambda_0'", l0p));
            return match (below, above) {
                (true, true) => Dispatch::Named(Rule::AdjacentCells, vec![G::NextHop, G::Direct], bounds),
                (true, false) => Dispatch::Named(Rule::AdjacentCells, vec![G::NextHop], bounds),
                (false, true) => Dispatch::Named(Rule::AdjacentCells, vec![G::Direct], bounds),
                (false, false) => Dispatch::Gap(format!("between next hop and direct ({bounds})")),
            };
        }
        let kind = LambdaKind::Split(ga);
        let bound = show(&kind.label(), threshold(table, kind));
        return match threshold(table, kind) {
            Some(l) if lam <= l => Dispatch::Named(Rule::AdjacentCells, vec![graph(ga)], bound),
            Some(_) => Dispatch::Named(Rule::AdjacentCells, vec![graph(ga + 1)], bound),
            None => Dispatch::Gap(format!("adjacent cells with {bound}")),
        };
    }
    if ga == 0 {
        let l0 = threshold(table, LambdaKind::NextHop);
        let kind = LambdaKind::Split(gb - 1);
        let lk = threshold(table, kind);
        let bounds = format!("{}, {}", show("lambda_0", l0), show(&kind.label(), lk));
        let mut graphs = Vec::new();
        if l0.is_some_and(|l| lam <= l) {
            graphs.push(G::NextHop);
        }
        if lk.is_some_and(|l| lam >= l) {
            graphs.push(graph(gb));
        }
        return if graphs.is_empty() {
            Dispatch::Gap(format!("between next hop and {} ({bounds})", graph(gb)))
        } else {
            Dispatch::Named(Rule::NextHopToRelay, graphs, bounds)
        };
    }
    let seq: Option<Vec<f64>> = (ga..gb).map(|k| threshold(table, LambdaKind::Split(k))).collect();
    let seq = match seq {
        Some(s) if s.windows(2).all(|w| w[0] <= w[1]) => s,
        _ => return Dispatch::Gap(format!("thresholds lambda_{ga}..lambda_{} are not an increasing sequence", gb - 1)),
    };
    let g = ga + seq.iter().filter(|&&l| l < lam).count();
    if g == 1 {
        if let Some(l0p) = threshold(table, LambdaKind::Direct) {
            if lam > l0p {
                return Dispatch::Gap(format!("direct above lambda_0' = {}", g12(l0p)));
            }
        }
    }
    let listed: Vec<String> = seq.iter().map(|&l| g12(l)).collect();
    Dispatch::Named(
        Rule::RelaySequence,
        vec![graph(g)],
        format!("thresholds lambda_{ga}..lambda_{} = [{}]", gb - 1, listed.join(", ")),
    )
}

fn describe_cell(name: &str, value: f64, cell: ExponentCell, table: &ThresholdTable) -> String {
    let tie = if cell.tie { " (on boundary)" } else { "" };
    let k = cell.k;
    let range = if k < 0 {
        "[1, inf)".to_string()
    } else {
        let k = k as usize;
        let lower = if k == table.n_prime() { "-inf".to_string() } else { format!("a_{} = {}", k + 1, g12(table.boundary(k + 1))) };
        let upper = if k == 0 { "1".to_string() } else { format!("a_{k} = {}", g12(table.boundary(k))) };
        format!("[{lower}, {upper}]")
    };
    format!("{name} = {} in {range}{tie}", g12(value))
}

/// Shared state for building solutions on one instance and cost model.
struct Context<'a> {
    inst: &'a NetworkInstance,
    model: &'a CostModel,
    costs: CostMatrix,
    opts: &'a SolveOptions,
}

impl<'a> Context<'a> {
    fn new(inst: &'a NetworkInstance, model: &'a CostModel, opts: &'a SolveOptions) -> Result<Self> {
        Ok(Self {
            inst,
            model,
            costs: CostMatrix::new(inst, model)?,
            opts,
        })
    }

    fn evaluate(&self, g: TransmissionGraph) -> Result<(RoutingTree, FlowMatrix, f64)> {
        let tree = g.routing_tree(self.inst)?;
        let flow = realize(self.inst, g)?;
        let energy = total_energy(self.inst, self.model, &flow)?;
        Ok((tree, flow, energy))
    }

    fn is_tied(&self, e1: f64, e2: f64) -> bool {
        (e1 - e2).abs() <= self.opts.tie_tol * e1.abs().max(e2.abs())
    }

    fn ties(&self, primary: Option<TransmissionGraph>, energy: f64) -> Result<Vec<TransmissionGraph>> {
        let mut ties = Vec::new();
        for g in enumerate_extended(self.inst) {
            if Some(g) == primary {
                continue;
            }
            let (_, _, e) = self.evaluate(g)?;
            if self.is_tied(e, energy) {
                ties.push(g);
            }
        }
        Ok(ties)
    }

    fn passes(&self, tree: &RoutingTree) -> bool {
        tree.is_optimal(&self.costs, self.opts.certificate_tol)
    }

    /// Lowest-energy graph among `graphs` (earliest on ties), certified if
    /// it passes the optimality check.
    fn named(&self, graphs: &[TransmissionGraph], rule: Rule, regime: String) -> Result<Solution> {
        let mut best: Option<(TransmissionGraph, RoutingTree, FlowMatrix, f64)> = None;
        for &g in graphs {
            let (tree, flow, energy) = self.evaluate(g)?;
            let better = match &best {
                None => true,
                Some((_, _, _, e)) => energy < *e && !self.is_tied(energy, *e),
            };
            if better {
                best = Some((g, tree, flow, energy));
            }
        }
        let (g, tree, flow, energy) = best.expect("at least one candidate graph");
        if !self.passes(&tree) {
            return self.fallback(format!("{regime}; {g} rejected by the optimality check"), Some(rule));
        }
        Ok(Solution {
            graph: Some(g),
            ties: self.ties(Some(g), energy)?,
            tree,
            flow,
            energy,
            regime,
            basis: Basis::Rule(rule),
            certified: true,
            verified: true,
            rejected_rule: None,
        })
    }

    /// Best extended-family graph, replaced by the oracle optimum when it
    /// fails the optimality check and the instance is small enough.
    fn fallback(&self, regime: String, rejected_rule: Option<Rule>) -> Result<Solution> {
        let mut best: Option<(TransmissionGraph, RoutingTree, FlowMatrix, f64)> = None;
        for g in enumerate_extended(self.inst) {
            let (tree, flow, energy) = self.evaluate(g)?;
            if best.as_ref().is_none_or(|b| energy < b.3 && !self.is_tied(energy, b.3)) {
                best = Some((g, tree, flow, energy));
            }
        }
        let (g, tree, flow, energy) = best.expect("family is never empty");
        if self.passes(&tree) {
            return Ok(Solution {
                graph: Some(g),
                ties: self.ties(Some(g), energy)?,
                tree,
                flow,
                energy,
                regime: format!("{regime}; best family graph"),
                basis: Basis::FamilySearch,
                certified: false,
                verified: true,
                rejected_rule,
            });
        }
        if self.inst.len() <= self.opts.oracle_cap {
            let oracle = oracle_min_with(
                self.inst,
                self.model,
                OracleOptions {
                    cap: self.opts.oracle_cap,
                    keep_energies: false,
                },
            )?;
            let sol = oracle.solution;
            return Ok(Solution {
                ties: self.ties(sol.graph, sol.energy)?,
                regime: format!("{regime}; family best {g} beaten, exhaustive optimum"),
                rejected_rule,
                ..sol
            });
        }
        Ok(Solution {
            graph: Some(g),
            ties: self.ties(Some(g), energy)?,
            tree,
            flow,
            energy,
            regime: format!("{regime}; best family graph, not optimal and too large for exhaustive search"),
            basis: Basis::FamilySearch,
            certified: false,
            verified: false,
            rejected_rule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_min;

    fn regular(n: usize) -> NetworkInstance {
        NetworkInstance::regular(n, 1.0).unwrap()
    }

    #[test]
    fn monomial_examples() {
        let s = solve_monomial(&regular(3), 2.0).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::NextHop));
        assert_eq!(s.energy, 6.0);
        assert!(s.certified);

        let s = solve_monomial(&regular(3), 0.5).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::Direct));
        assert!((s.energy - (1.0 + 2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);

        let s = solve_monomial(&regular(4), -2.0).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::Split(1)));
        let expect = 2.0 / 9.0 + 0.25 + 2.0 / 16.0;
        assert!((s.energy - expect).abs() < 1e-12);
        assert!((s.energy - 0.5972).abs() < 1e-4);
        assert_eq!(s.flow.get(1, 4), 1.0);
    }

    #[test]
    fn boundary_ties_report_both_graphs() {
        let s = solve_monomial(&regular(3), 1.0).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::NextHop));
        assert!(s.ties.contains(&TransmissionGraph::Direct));

        let inst = regular(5);
        let table = ThresholdTable::new(&inst, DEFAULT_ROOT_TOL).unwrap();
        let a1 = table.a_roots[0];
        let s = solve_monomial(&inst, a1).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::Direct));
        assert!(s.ties.contains(&TransmissionGraph::Split(1)));
    }

    #[test]
    fn monomial_matches_oracle_on_irregular_instance() {
        let inst = NetworkInstance::new(vec![0.3, 0.7, 1.9, 2.4, 4.0], vec![0.5, 1.5, 1.0, 0.2, 2.0]).unwrap();
        for &a in &[-4.0, -1.3, -0.6, -0.2, 0.0, 0.4, 1.0, 2.5] {
            let s = solve_monomial(&inst, a).unwrap();
            let o = oracle_min(&inst, &CostModel::monomial(a).unwrap()).unwrap();
            assert!(s.certified, "a = {a}");
            assert!((s.energy - o.min_energy).abs() <= 1e-9 * o.min_energy, "a = {a}");
        }
    }

    #[test]
    fn multiterm_examples() {
        let s = solve_multiterm(&regular(4), &[Term::new(1.0, 2.0), Term::new(5.0, 3.0)]).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::NextHop));
        assert!(s.certified);
        let s = solve_multiterm(&regular(3), &[Term::new(1.0, 0.9), Term::new(2.0, 0.5)]).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::Direct));
        let s = solve_multiterm(&regular(4), &[Term::new(4.0, 2.0)]).unwrap();
        assert_eq!(s.graph, solve_monomial(&regular(4), 2.0).unwrap().graph);
        assert_eq!(s.energy, 4.0 * (4.0 + 3.0 + 2.0 + 1.0));
    }

    #[test]
    fn multiterm_two_terms_delegate() {
        let inst = regular(4);
        let s = solve_multiterm(&inst, &[Term::new(2.0, 2.0), Term::new(0.2, 0.0)]).unwrap();
        let t = solve_twoterm(&inst, 2.0, 0.0, 0.1).unwrap();
        assert_eq!(s.graph, t.graph);
        assert!((s.energy - 2.0 * t.energy).abs() < 1e-12 * s.energy);
    }

    #[test]
    fn twoterm_examples() {
        let inst = regular(4);
        let s = solve_twoterm(&inst, 2.0, 0.0, 0.1).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::NextHop));
        assert!(s.certified);

        let s = solve_twoterm(&inst, 2.0, 0.5, 0.0).unwrap();
        let m = solve_monomial(&inst, 2.0).unwrap();
        assert_eq!(s.graph, m.graph);
        assert_eq!(s.energy, m.energy);

        let s = solve_twoterm(&inst, 0.0, -3.0, 1e6).unwrap();
        assert_eq!(s.graph, Some(TransmissionGraph::Split(1)));
        assert!(s.certified);
    }

    #[test]
    fn swapped_exponents_give_same_graph() {
        let inst = regular(5);
        let s = solve_twoterm(&inst, 0.5, 2.0, 4.0).unwrap();
        let t = solve_twoterm(&inst, 2.0, 0.5, 0.25).unwrap();
        assert_eq!(s.graph, t.graph);
        assert!(s.regime.contains("swapped"));
        assert!((s.energy - 4.0 * t.energy).abs() < 1e-12 * s.energy);
    }

    #[test]
    fn twoterm_never_beats_oracle_and_certified_matches() {
        let inst = regular(5);
        for &(a, b) in &[(2.0, 0.5), (2.0, -3.0), (0.5, -3.0), (0.9, -0.9), (3.0, 1.5), (-0.5, -6.0)] {
            for &lam in &[0.01, 0.3, 1.0, 2.0, 7.0, 50.0, 1e4] {
                let model = CostModel::two_term(a, b, lam).unwrap();
                let s = solve_twoterm(&inst, a, b, lam).unwrap();
                let o = oracle_min(&inst, &model).unwrap();
                let tol = 1e-9 * o.min_energy;
                assert!(s.energy >= o.min_energy - tol, "({a}, {b}, {lam})");
                if s.certified || s.verified {
                    assert!((s.energy - o.min_energy).abs() <= tol, "({a}, {b}, {lam}): {}", s.regime);
                }
                assert_eq!(s.energy, total_energy(&inst, &model, &s.flow).unwrap());
            }
        }
    }

    #[test]
    fn inverse_gain_uses_search() {
        let gain = crate::model::GainFn::new(|x: f64, y: f64| (x - y).abs().powf(-2.0));
        let s = solve(&regular(4), &CostModel::inverse_gain(gain)).unwrap();
        assert!(!s.certified);
        assert!(s.verified);
        assert_eq!(s.graph, Some(TransmissionGraph::NextHop));
    }
}
