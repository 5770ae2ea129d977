//! Chemical-reaction engine: molecules with potential and kinetic energy,
//! the four elementary reactions, and the evaluation-bounded run loop.
//!
//! Each molecule wraps one deployment. Its potential energy (PE) is the
//! objective value of that deployment and its kinetic energy (KE) is the
//! tolerance it has for moving uphill. Reactions propose new structures and
//! are accepted only when the energy on hand pays for the new PE; whatever
//! is left over stays with the products as KE or drains into a central
//! buffer. Rejected reactions change nothing but the collision counters, so
//! the total energy in the container is an invariant of the whole run.
//!
//! The four reactions and their energy rules:
//!
//! * **on-wall collision** - one molecule, one bit flip. Accepted when
//!   `pe + ke >= pe'`; the molecule keeps a drawn fraction
//!   `a in [loss_rate, 1]` of the surplus and the rest goes to the buffer.
//! * **decomposition** - one molecule splits into two heavily perturbed
//!   copies. A deficit may be financed by a `d1*d2` share of the buffer;
//!   the surplus is split between the two products at a random fraction.
//! * **inter-molecular collision** - two molecules flip one bit each under
//!   a joint budget; the surplus is split between them at a random fraction.
//! * **synthesis** - two molecules merge by per-bit crossover; the product
//!   keeps the entire surplus as KE.

use crate::problem::{Deployment, ProblemInstance};
use crate::rng::{RandomSource, SeededRng};
use thiserror::Error;

// ---------------------------------------------------------------------------
// Structure operators
// ---------------------------------------------------------------------------

/// A fresh uniform deployment: each bit is 0 when the draw falls below 0.5,
/// otherwise 1. Used to seed the population.
pub fn random_deployment(n: usize, rng: &mut impl RandomSource) -> Deployment {
    Deployment::from_bits((0..n).map(|_| rng.unit() >= 0.5).collect())
}

/// Neighborhood move: flip exactly one uniformly chosen bit. The input is
/// left untouched.
pub fn neighbor(d: &Deployment, rng: &mut impl RandomSource) -> Deployment {
    assert!(!d.is_empty(), "cannot pick a neighbor of an empty deployment");
    let mut out = d.clone();
    out.toggle(rng.index(d.len()));
    out
}

/// Decomposition move: two copies of `d`, every bit of each copy flipped
/// independently with probability 0.5. The first copy consumes its draws
/// before the second.
pub fn decompose_structures(
    d: &Deployment,
    rng: &mut impl RandomSource,
) -> (Deployment, Deployment) {
    assert!(!d.is_empty(), "cannot decompose an empty deployment");
    let mut split = || {
        let mut out = d.clone();
        for i in 0..d.len() {
            if rng.unit() < 0.5 {
                out.toggle(i);
            }
        }
        out
    };
    let first = split();
    let second = split();
    (first, second)
}

/// Synthesis move: per-bit crossover. Each bit comes from `a` when its draw
/// exceeds 0.5 and from `b` otherwise.
pub fn synthesize_structures(
    a: &Deployment,
    b: &Deployment,
    rng: &mut impl RandomSource,
) -> Deployment {
    assert_eq!(a.len(), b.len(), "cannot synthesize deployments of different lengths");
    Deployment::from_bits(
        (0..a.len())
            .map(|i| if rng.unit() > 0.5 { a.bit(i) } else { b.bit(i) })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Energy accounting
// ---------------------------------------------------------------------------

/// Kinetic energy left after paying for the new potential energy out of
/// `funds`, or `None` when the reaction cannot conserve energy.
pub fn ke_pool(funds: f64, new_pe: f64) -> Option<f64> {
    let pool = funds - new_pe;
    (pool >= 0.0).then_some(pool)
}

/// Splits a KE pool in two: the first product takes `fraction` of it, the
/// second takes the remainder.
pub fn split_ke(pool: f64, fraction: f64) -> (f64, f64) {
    let first = pool * fraction;
    (first, pool - first)
}

/// The central energy buffer. Uses compensated (Neumaier) accumulation so
/// that ten thousand transactions leave the container's total energy intact
/// far below the 1e-9 audit tolerance.
///
/// Every accepted reaction settles through [`EnergyBuffer::settle`]: the
/// molecule-side energies it consumed are credited and the energies of its
/// products debited. On-wall losses therefore accumulate here, synthesis and
/// ineffective collisions net out to rounding dust, and decomposition loans
/// are withdrawn. Dust can leave the value a few ulps below zero when the
/// buffer is empty; loans scale with the value, so that stays harmless.
#[derive(Clone, Debug)]
pub struct EnergyBuffer {
    sum: f64,
    compensation: f64,
}

impl EnergyBuffer {
    pub fn new(initial: f64) -> Self {
        Self {
            sum: initial,
            compensation: 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn credit(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn debit(&mut self, x: f64) {
        self.credit(-x);
    }

    /// Books one accepted reaction: in-flows from the consumed molecules,
    /// out-flows to the produced ones.
    pub fn settle(&mut self, consumed: &[f64], produced: &[f64]) {
        for &x in consumed {
            self.credit(x);
        }
        for &x in produced {
            self.debit(x);
        }
    }
}

// ---------------------------------------------------------------------------
// Molecules and parameters
// ---------------------------------------------------------------------------

/// One candidate solution in the container.
#[derive(Clone, Debug)]
pub struct Molecule {
    /// Current deployment.
    pub structure: Deployment,
    /// Objective value of `structure`.
    pub pe: f64,
    /// Tolerance for uphill moves.
    pub ke: f64,
    /// Collisions this molecule has undergone.
    pub num_hit: u64,
    /// Best PE this molecule ever held.
    pub min_pe: f64,
    /// `num_hit` at the moment `min_pe` was reached.
    pub min_hit: u64,
    /// Structure that achieved `min_pe`.
    pub min_structure: Deployment,
}

impl Molecule {
    pub fn new(structure: Deployment, pe: f64, ke: f64) -> Self {
        Self {
            min_structure: structure.clone(),
            structure,
            pe,
            ke,
            num_hit: 0,
            min_pe: pe,
            min_hit: 0,
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.pe + self.ke
    }

    /// Installs an accepted candidate and refreshes the personal-best
    /// record when it improves.
    fn adopt(&mut self, structure: Deployment, pe: f64, ke: f64) {
        self.structure = structure;
        self.pe = pe;
        self.ke = ke;
        if pe < self.min_pe {
            self.min_pe = pe;
            self.min_hit = self.num_hit;
            self.min_structure = self.structure.clone();
        }
    }

    /// Collisions since this molecule last improved.
    fn staleness(&self) -> u64 {
        self.num_hit - self.min_hit
    }
}

/// Reactor tuning knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct ReactorParams {
    /// Objective evaluations allowed per run (initialization included).
    pub fe_limit: u64,
    /// Initial population size.
    pub pop_size: usize,
    /// Initial central energy buffer.
    pub initial_buffer: f64,
    /// Initial kinetic energy per molecule.
    pub initial_ke: f64,
    /// Fraction of iterations that attempt an inter-molecular collision.
    pub collision_rate: f64,
    /// Lower bound of the KE fraction retained in an on-wall collision.
    pub loss_rate: f64,
    /// Staleness (hits without improvement) that triggers decomposition.
    pub decomposition_threshold: u64,
    /// KE at or below which a molecule pair synthesizes instead of
    /// colliding.
    pub synthesis_threshold: f64,
}

impl Default for ReactorParams {
    fn default() -> Self {
        Self {
            fe_limit: 10_000,
            pop_size: 20,
            initial_buffer: 5_000.0,
            initial_ke: 5_000.0,
            collision_rate: 0.4,
            loss_rate: 0.8,
            decomposition_threshold: 300,
            synthesis_threshold: 100.0,
        }
    }
}

/// Why a parameter set was rejected.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("fe_limit must be positive")]
    ZeroEvaluationLimit,
    #[error("pop_size must be positive")]
    ZeroPopulation,
    #[error("initial_buffer must be non-negative and finite (got {0})")]
    BadBuffer(f64),
    #[error("initial_ke must be non-negative and finite (got {0})")]
    BadInitialKe(f64),
    #[error("collision_rate must lie strictly between 0 and 1 (got {0})")]
    BadCollisionRate(f64),
    #[error("loss_rate must lie in (0, 1] (got {0})")]
    BadLossRate(f64),
    #[error("decomposition_threshold must be positive")]
    ZeroDecompositionThreshold,
    #[error("synthesis_threshold must be non-negative and finite (got {0})")]
    BadSynthesisThreshold(f64),
}

impl ReactorParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.fe_limit == 0 {
            return Err(ParamError::ZeroEvaluationLimit);
        }
        if self.pop_size == 0 {
            return Err(ParamError::ZeroPopulation);
        }
        if !(self.initial_buffer >= 0.0 && self.initial_buffer.is_finite()) {
            return Err(ParamError::BadBuffer(self.initial_buffer));
        }
        if !(self.initial_ke >= 0.0 && self.initial_ke.is_finite()) {
            return Err(ParamError::BadInitialKe(self.initial_ke));
        }
        if !(self.collision_rate > 0.0 && self.collision_rate < 1.0) {
            return Err(ParamError::BadCollisionRate(self.collision_rate));
        }
        if !(self.loss_rate > 0.0 && self.loss_rate <= 1.0) {
            return Err(ParamError::BadLossRate(self.loss_rate));
        }
        if self.decomposition_threshold == 0 {
            return Err(ParamError::ZeroDecompositionThreshold);
        }
        if !(self.synthesis_threshold >= 0.0 && self.synthesis_threshold.is_finite()) {
            return Err(ParamError::BadSynthesisThreshold(self.synthesis_threshold));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Evaluation bookkeeping
// ---------------------------------------------------------------------------

/// Counts objective evaluations and tracks the best structure seen so far.
/// Every candidate a solver evaluates goes through here, accepted or not,
/// so the budget and the best-so-far record cannot drift apart.
///
/// Ties keep the earlier deployment; only a strictly better value replaces
/// the record.
pub struct Evaluator<'a> {
    instance: &'a ProblemInstance,
    evaluations: u64,
    best_objective: f64,
    best_deployment: Option<Deployment>,
    history: Vec<(u64, f64)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        Self {
            instance,
            evaluations: 0,
            best_objective: f64::INFINITY,
            best_deployment: None,
            history: Vec::new(),
        }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.instance
    }

    /// Evaluates one deployment, charging one unit of budget.
    pub fn evaluate(&mut self, d: &Deployment) -> f64 {
        let value = self.instance.objective(d);
        self.evaluations += 1;
        if value < self.best_objective {
            self.best_objective = value;
            self.best_deployment = Some(d.clone());
            self.history.push((self.evaluations, value));
        }
        value
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn best_objective(&self) -> f64 {
        self.best_objective
    }

    pub fn best_deployment(&self) -> Option<&Deployment> {
        self.best_deployment.as_ref()
    }

    /// Finishes the run. Panics if nothing was ever evaluated.
    pub fn into_result(self) -> RunResult {
        RunResult {
            best_objective: self.best_objective,
            best_deployment: self
                .best_deployment
                .expect("a run must evaluate at least one deployment"),
            evaluations_used: self.evaluations,
            history: Some(self.history),
        }
    }
}

/// Outcome of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_objective: f64,
    pub best_deployment: Deployment,
    pub evaluations_used: u64,
    /// `(evaluation count, best objective)` at each improvement.
    pub history: Option<Vec<(u64, f64)>>,
}

// ---------------------------------------------------------------------------
// The reactor
// ---------------------------------------------------------------------------

/// Whether a reaction replaced molecules or left the population unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReactionOutcome {
    Accepted,
    Rejected,
}

/// The container: population, buffer, evaluation budget, and randomness for
/// one run. Strictly sequential and deterministic for a fixed seed.
pub struct Reactor<'a, R: RandomSource> {
    params: ReactorParams,
    evaluator: Evaluator<'a>,
    population: Vec<Molecule>,
    buffer: EnergyBuffer,
    rng: R,
}

impl<'a, R: RandomSource> Reactor<'a, R> {
    /// Builds the initial population (each molecule costs one evaluation,
    /// capped by the budget) and fills the buffer. Panics on invalid
    /// parameters; `ReactorParams::validate` is the caller-facing check.
    pub fn new(instance: &'a ProblemInstance, params: ReactorParams, mut rng: R) -> Self {
        if let Err(e) = params.validate() {
            panic!("invalid reactor parameters: {e}");
        }
        let mut evaluator = Evaluator::new(instance);
        let n = instance.route_count();
        let mut population = Vec::with_capacity(params.pop_size);
        for _ in 0..params.pop_size {
            if evaluator.evaluations() >= params.fe_limit {
                break;
            }
            let structure = random_deployment(n, &mut rng);
            let pe = evaluator.evaluate(&structure);
            population.push(Molecule::new(structure, pe, params.initial_ke));
        }
        let buffer = EnergyBuffer::new(params.initial_buffer);
        Self {
            params,
            evaluator,
            population,
            buffer,
            rng,
        }
    }

    pub fn params(&self) -> &ReactorParams {
        &self.params
    }

    pub fn population(&self) -> &[Molecule] {
        &self.population
    }

    pub fn buffer(&self) -> f64 {
        self.buffer.value()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluator.evaluations()
    }

    pub fn best_objective(&self) -> f64 {
        self.evaluator.best_objective()
    }

    /// Total energy in the container: every molecule's PE and KE plus the
    /// buffer, summed with compensation. Constant across iterations.
    pub fn total_energy(&self) -> f64 {
        let mut acc = EnergyBuffer::new(0.0);
        for m in &self.population {
            acc.credit(m.pe);
            acc.credit(m.ke);
        }
        acc.credit(self.buffer.value());
        acc.value()
    }

    /// One iteration: pick a reaction category, pick molecules, react.
    ///
    /// A draw at or below `collision_rate` attempts an inter-molecular
    /// reaction (falling back to uni-molecular when only one molecule is
    /// left). A selected pair synthesizes when both KEs are at or below the
    /// synthesis threshold; a selected single molecule decomposes when its
    /// staleness exceeds the decomposition threshold.
    pub fn step(&mut self) {
        let m = self.population.len();
        let t = self.rng.unit();
        if t <= self.params.collision_rate && m >= 2 {
            let first = self.rng.index(m);
            let second = {
                let other = self.rng.index(m - 1);
                if other >= first {
                    other + 1
                } else {
                    other
                }
            };
            let low_ke = self.population[first].ke <= self.params.synthesis_threshold
                && self.population[second].ke <= self.params.synthesis_threshold;
            if low_ke {
                self.synthesis(first, second);
            } else {
                self.intermolecular_collision(first, second);
            }
        } else {
            let idx = self.rng.index(m);
            if self.population[idx].staleness() > self.params.decomposition_threshold {
                self.decomposition(idx);
            } else {
                self.on_wall_collision(idx);
            }
        }
    }

    /// Runs until the evaluation budget is spent. The last reaction may
    /// overshoot the limit by at most one evaluation.
    pub fn run_to_limit(&mut self) {
        while self.evaluator.evaluations() < self.params.fe_limit {
            self.step();
        }
    }

    pub fn into_result(self) -> RunResult {
        self.evaluator.into_result()
    }

    /// Single-molecule local move. Costs one evaluation.
    pub fn on_wall_collision(&mut self, idx: usize) -> ReactionOutcome {
        let candidate = neighbor(&self.population[idx].structure, &mut self.rng);
        let pe_new = self.evaluator.evaluate(&candidate);
        self.population[idx].num_hit += 1;
        let mol = &self.population[idx];
        let Some(pool) = ke_pool(mol.total_energy(), pe_new) else {
            return ReactionOutcome::Rejected;
        };
        let retained = self.rng.range(self.params.loss_rate, 1.0);
        let (ke_new, _lost) = split_ke(pool, retained);
        let consumed = [mol.pe, mol.ke];
        self.population[idx].adopt(candidate, pe_new, ke_new);
        self.buffer.settle(&consumed, &[pe_new, ke_new]);
        ReactionOutcome::Accepted
    }

    /// One molecule splits in two; the population grows by one. Costs two
    /// evaluations. A deficit may borrow a `d1*d2` share of the buffer.
    pub fn decomposition(&mut self, idx: usize) -> ReactionOutcome {
        let (cand_a, cand_b) = decompose_structures(&self.population[idx].structure, &mut self.rng);
        let pe_a = self.evaluator.evaluate(&cand_a);
        let pe_b = self.evaluator.evaluate(&cand_b);
        let funds = self.population[idx].total_energy();
        let pool = match ke_pool(funds, pe_a + pe_b) {
            Some(pool) => pool,
            None => {
                let loan = self.rng.unit() * self.rng.unit() * self.buffer.value();
                match ke_pool(funds + loan, pe_a + pe_b) {
                    Some(pool) => pool,
                    None => {
                        self.population[idx].num_hit += 1;
                        return ReactionOutcome::Rejected;
                    }
                }
            }
        };
        let (ke_a, ke_b) = split_ke(pool, self.rng.unit());
        let consumed = [self.population[idx].pe, self.population[idx].ke];
        self.population[idx] = Molecule::new(cand_a, pe_a, ke_a);
        self.population.push(Molecule::new(cand_b, pe_b, ke_b));
        self.buffer.settle(&consumed, &[pe_a, ke_a, pe_b, ke_b]);
        ReactionOutcome::Accepted
    }

    /// Two molecules each take a local move under a joint energy budget.
    /// Costs two evaluations.
    pub fn intermolecular_collision(&mut self, first: usize, second: usize) -> ReactionOutcome {
        assert_ne!(first, second, "inter-molecular collision needs two distinct molecules");
        let cand_a = neighbor(&self.population[first].structure, &mut self.rng);
        let cand_b = neighbor(&self.population[second].structure, &mut self.rng);
        let pe_a = self.evaluator.evaluate(&cand_a);
        let pe_b = self.evaluator.evaluate(&cand_b);
        self.population[first].num_hit += 1;
        self.population[second].num_hit += 1;
        let funds =
            self.population[first].total_energy() + self.population[second].total_energy();
        let Some(pool) = ke_pool(funds, pe_a + pe_b) else {
            return ReactionOutcome::Rejected;
        };
        let (ke_a, ke_b) = split_ke(pool, self.rng.unit());
        let consumed = [
            self.population[first].pe,
            self.population[first].ke,
            self.population[second].pe,
            self.population[second].ke,
        ];
        self.population[first].adopt(cand_a, pe_a, ke_a);
        self.population[second].adopt(cand_b, pe_b, ke_b);
        self.buffer.settle(&consumed, &[pe_a, ke_a, pe_b, ke_b]);
        ReactionOutcome::Accepted
    }

    /// Two molecules merge into one; the population shrinks by one. Costs
    /// one evaluation. Panics when fewer than two molecules remain: the
    /// selection stage must never offer synthesis then.
    pub fn synthesis(&mut self, first: usize, second: usize) -> ReactionOutcome {
        assert!(
            self.population.len() >= 2,
            "synthesis requires at least two molecules in the container"
        );
        assert_ne!(first, second, "synthesis needs two distinct molecules");
        let cand = synthesize_structures(
            &self.population[first].structure,
            &self.population[second].structure,
            &mut self.rng,
        );
        let pe_new = self.evaluator.evaluate(&cand);
        let funds =
            self.population[first].total_energy() + self.population[second].total_energy();
        let Some(ke_new) = ke_pool(funds, pe_new) else {
            self.population[first].num_hit += 1;
            self.population[second].num_hit += 1;
            return ReactionOutcome::Rejected;
        };
        let consumed = [
            self.population[first].pe,
            self.population[first].ke,
            self.population[second].pe,
            self.population[second].ke,
        ];
        let keep = first.min(second);
        let drop = first.max(second);
        self.population[keep] = Molecule::new(cand, pe_new, ke_new);
        self.population.remove(drop);
        self.buffer.settle(&consumed, &[pe_new, ke_new]);
        ReactionOutcome::Accepted
    }
}

/// Full seeded run with the given parameters. Deterministic per seed.
pub fn run(instance: &ProblemInstance, params: &ReactorParams, seed: u64) -> RunResult {
    let mut reactor = Reactor::new(instance, params.clone(), SeededRng::new(seed));
    reactor.run_to_limit();
    reactor.into_result()
}
