//! Signal-power formulation: SINR channel capacities, the reduction to the
//! flow problem and interference-free transmission schedules.
//!
//! A sender reaches its receiver with received power `P0` by transmitting at
//! `P0 / γ`. Interference only lowers capacity, so optimal transmissions never
//! overlap and every link runs at the noise-limited capacity
//! `C0 = log(1 + P0/N0)`.

use crate::error::{Error, Result};
use crate::format::g12;
use crate::model::{check_feasible, CostModel, FlowMatrix, GainFn, NetworkInstance};
use crate::solver::{solve_with, Solution, SolveOptions};

/// Signal gain `γ(x_i, x_j)` between a transmitter and a receiver.
#[derive(Debug, Clone, PartialEq)]
pub enum Gain {
    /// `|x_i - x_j|^(-a)`
    PowerLaw { a: f64 },
    /// `1 / (|x_i - x_j|^a + lambda |x_i - x_j|^b)`
    TwoTerm { a: f64, b: f64, lambda: f64 },
    Custom(GainFn),
}

impl Gain {
    /// `γ^-1` as a per-unit cost model.
    pub fn cost_model(&self) -> Result<CostModel> {
        match self {
            Gain::PowerLaw { a } => CostModel::monomial(*a),
            Gain::TwoTerm { a, b, lambda } => CostModel::two_term(*a, *b, *lambda),
            Gain::Custom(g) => Ok(CostModel::inverse_gain(g.clone())),
        }
    }

    pub fn eval(&self, xi: f64, xj: f64) -> Result<f64> {
        if xi == xj {
            return Err(Error::DegenerateGain(xi));
        }
        let gain = match self {
            Gain::Custom(g) => g.eval(xi, xj),
            other => 1.0 / other.cost_model()?.edge_cost(xi, xj)?,
        };
        if gain.is_finite() && gain > 0.0 {
            Ok(gain)
        } else {
            Err(Error::DegenerateGain(xi))
        }
    }

    /// `γ^-1`, the transmit power per unit of received power.
    pub fn inverse(&self, xi: f64, xj: f64) -> Result<f64> {
        Ok(1.0 / self.eval(xi, xj)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    /// Minimal received signal power.
    pub p0: f64,
    /// Noise power.
    pub n0: f64,
    pub gain: Gain,
    /// Base of the capacity logarithm.
    pub log_base: f64,
}

impl RadioParams {
    /// Capacities in bits (base-2 logarithm).
    pub fn new(p0: f64, n0: f64, gain: Gain) -> Result<Self> {
        Self::with_log_base(p0, n0, gain, 2.0)
    }

    pub fn with_log_base(p0: f64, n0: f64, gain: Gain, log_base: f64) -> Result<Self> {
        if !(p0.is_finite() && p0 > 0.0) {
            return Err(Error::InvalidRadio(format!("P0 = {p0} must be positive and finite")));
        }
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(Error::InvalidRadio(format!("N0 = {n0} must be positive and finite")));
        }
        if !(log_base.is_finite() && log_base > 0.0 && log_base != 1.0) {
            return Err(Error::InvalidRadio(format!("log base {log_base} must be positive and not 1")));
        }
        gain.cost_model()?;
        Ok(Self {
            p0,
            n0,
            gain,
            log_base,
        })
    }

    /// Noise-limited capacity `log(1 + P0/N0)`.
    pub fn c0(&self) -> f64 {
        (self.p0 / self.n0).ln_1p() / self.log_base.ln()
    }
}

/// `P0 / (N0 + P0 sum γ(x_k, x_m)^-1 γ(x_k, x_j))` for the link `xi -> xj`
/// while the pairs in `interferers` transmit at the same time.
pub fn sinr_value(params: &RadioParams, xi: f64, xj: f64, interferers: &[(f64, f64)]) -> Result<f64> {
    params.gain.eval(xi, xj)?;
    let mut interference = 0.0;
    for &(xk, xm) in interferers {
        if xk == xi && xm == xj {
            return Err(Error::InvalidInterferers("a link cannot interfere with itself"));
        }
        interference += params.gain.inverse(xk, xm)? * params.gain.eval(xk, xj)?;
    }
    Ok(params.p0 / (params.n0 + params.p0 * interference))
}

/// `log(1 + sinr)` in the configured base.
pub fn capacity(params: &RadioParams, xi: f64, xj: f64, interferers: &[(f64, f64)]) -> Result<f64> {
    Ok(sinr_value(params, xi, xj, interferers)?.ln_1p() / params.log_base.ln())
}

/// True when the interferers strictly lower the link capacity.
pub fn interference_penalty_check(params: &RadioParams, xi: f64, xj: f64, interferers: &[(f64, f64)]) -> Result<bool> {
    if interferers.is_empty() {
        return Err(Error::InvalidInterferers("at least one interfering pair is required"));
    }
    Ok(capacity(params, xi, xj, interferers)? < capacity(params, xi, xj, &[])?)
}

/// Flow problem equivalent to the interference-free signal-power problem:
/// data volumes scaled by `P0/C0` and edge costs `γ^-1`. A reduced flow `q'`
/// maps back to transmission times `q'/P0` and carried data `q' C0/P0`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: NetworkInstance,
    pub model: CostModel,
    pub p0: f64,
    pub c0: f64,
}

impl Reduction {
    pub fn transmission_times(&self, reduced: &FlowMatrix) -> Result<FlowMatrix> {
        scale_flow(reduced, 1.0 / self.p0)
    }

    /// Data carried on each link in the original units.
    pub fn data_flow(&self, reduced: &FlowMatrix) -> Result<FlowMatrix> {
        scale_flow(reduced, self.c0 / self.p0)
    }
}

fn scale_flow(flow: &FlowMatrix, factor: f64) -> Result<FlowMatrix> {
    flow.combine(factor, &FlowMatrix::zeros(flow.n()), 0.0)
}

pub fn reduce_to_flow(inst: &NetworkInstance, params: &RadioParams) -> Result<Reduction> {
    let c0 = params.c0();
    Ok(Reduction {
        instance: inst.with_scaled_data(params.p0 / c0)?,
        model: params.gain.cost_model()?,
        p0: params.p0,
        c0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub sender: usize,
    pub receiver: usize,
    pub start: f64,
    pub end: f64,
    pub rate: f64,
    pub amount: f64,
    /// `P0 γ^-1 (end - start)`
    pub energy: f64,
}

impl Slot {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

pub const SCHEDULE_CSV_HEADER: [&str; 7] = ["sender", "receiver", "start", "end", "rate", "amount", "slot_energy"];

/// Sequential transmissions; no two slots overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub slots: Vec<Slot>,
    /// Energy spent by sensors `1..=N`.
    pub node_energy: Vec<f64>,
    pub total_energy: f64,
}

impl Schedule {
    pub fn makespan(&self) -> f64 {
        self.slots.last().map_or(0.0, |s| s.end)
    }

    /// One CSV record per slot, matching [`SCHEDULE_CSV_HEADER`].
    pub fn csv_records(&self) -> Vec<[String; 7]> {
        self.slots
            .iter()
            .map(|s| {
                [
                    s.sender.to_string(),
                    s.receiver.to_string(),
                    g12(s.start),
                    g12(s.end),
                    g12(s.rate),
                    g12(s.amount),
                    g12(s.energy),
                ]
            })
            .collect()
    }

    /// Checks disjoint slots, `amount = rate * duration`, that every sender
    /// has received everything before it transmits, and the energy totals.
    pub fn validate(&self, inst: &NetworkInstance, params: &RadioParams) -> Result<()> {
        const REL: f64 = 1e-12;
        let close = |x: f64, y: f64| (x - y).abs() <= REL * x.abs().max(y.abs()).max(1.0);
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        let n = inst.len();
        for (idx, s) in self.slots.iter().enumerate() {
            if s.sender == 0 || s.sender > n || s.receiver > n || s.sender == s.receiver {
                return bad(format!("slot {idx} has invalid link {} -> {}", s.sender, s.receiver));
            }
            if s.end.is_nan() || s.end < s.start {
                return bad(format!("slot {idx} ends before it starts"));
            }
            if !close(s.amount, s.rate * s.duration()) {
                return bad(format!("slot {idx} carries {} but rate times duration is {}", s.amount, s.rate * s.duration()));
            }
            let power = params.p0 * params.gain.inverse(inst.position(s.sender), inst.position(s.receiver))?;
            if !close(s.energy, power * s.duration()) {
                return bad(format!("slot {idx} energy {} does not match its power", s.energy));
            }
        }
        let mut order: Vec<&Slot> = self.slots.iter().collect();
        order.sort_by(|x, y| x.start.total_cmp(&y.start));
        for w in order.windows(2) {
            if w[1].start < w[0].end && w[0].duration() > 0.0 && w[1].duration() > 0.0 {
                return bad(format!(
                    "slots {}->{} and {}->{} overlap",
                    w[0].sender, w[0].receiver, w[1].sender, w[1].receiver
                ));
            }
        }
        for s in &self.slots {
            let last_in = self
                .slots
                .iter()
                .filter(|r| r.receiver == s.sender)
                .map(|r| r.end)
                .fold(f64::NEG_INFINITY, f64::max);
            if last_in > s.start {
                return bad(format!("node {} transmits before all of its inflow arrived", s.sender));
            }
        }
        let mut node_energy = vec![0.0; n];
        for s in &self.slots {
            node_energy[s.sender - 1] += s.energy;
        }
        let total: f64 = node_energy.iter().sum();
        if node_energy.len() != self.node_energy.len()
            || node_energy.iter().zip(&self.node_energy).any(|(x, y)| !close(*x, *y))
            || !close(total, self.total_energy)
        {
            return bad("energy totals do not match the slots".into());
        }
        Ok(())
    }
}

/// Sequential schedule for a feasible data flow. Each positive `q[i][j]`
/// becomes one slot of length `q[i][j] / C0` at rate `C0`; senders go in
/// dependency order, farthest ready sensor first, receivers ascending.
pub fn make_schedule(inst: &NetworkInstance, params: &RadioParams, flow: &FlowMatrix) -> Result<Schedule> {
    let n = inst.len();
    let tol = 1e-9 * inst.total_data().max(1.0);
    let feas = check_feasible(inst, flow, tol)?;
    if !feas.feasible {
        return Err(Error::InfeasibleFlow {
            node: feas.worst_node,
            residual: feas.max_residual,
        });
    }
    let c0 = params.c0();
    let mut pending_in = vec![0usize; n + 1];
    for (_, j, _) in flow.edges() {
        pending_in[j] += 1;
    }
    let mut done = vec![false; n + 1];
    let mut slots = Vec::new();
    let mut node_energy = vec![0.0; n];
    let mut clock = 0.0;
    for _ in 0..n {
        let sender = (1..=n).rev().find(|&i| !done[i] && pending_in[i] == 0);
        let Some(i) = sender else {
            let stuck = (1..=n).find(|&i| !done[i]).unwrap_or(0);
            return Err(Error::CyclicFlow(stuck));
        };
        done[i] = true;
        for j in 0..=n {
            let amount = flow.get(i, j);
            if amount <= 0.0 {
                continue;
            }
            let duration = amount / c0;
            let power = params.p0 * params.gain.inverse(inst.position(i), inst.position(j))?;
            let energy = power * duration;
            let end = clock + duration;
            slots.push(Slot {
                sender: i,
                receiver: j,
                start: clock,
                end,
                rate: c0,
                amount,
                energy,
            });
            node_energy[i - 1] += energy;
            clock = end;
            pending_in[j] -= 1;
        }
    }
    let total_energy = node_energy.iter().sum();
    Ok(Schedule {
        slots,
        node_energy,
        total_energy,
    })
}

/// Result of solving the signal-power problem end to end.
#[derive(Debug, Clone)]
pub struct SinrPlan {
    pub reduction: Reduction,
    /// Solution of the reduced flow problem.
    pub solution: Solution,
    /// Data carried per link in the original units.
    pub data_flow: FlowMatrix,
    pub schedule: Schedule,
}

/// Reduces, solves the flow problem and schedules the optimal flow.
pub fn plan(inst: &NetworkInstance, params: &RadioParams, opts: &SolveOptions) -> Result<SinrPlan> {
    let reduction = reduce_to_flow(inst, params)?;
    let solution = solve_with(&reduction.instance, &reduction.model, opts)?;
    let data_flow = reduction.data_flow(&solution.flow)?;
    let schedule = make_schedule(inst, params, &data_flow)?;
    Ok(SinrPlan {
        reduction,
        solution,
        data_flow,
        schedule,
    })
}
