//! Enlargement of filtrations.
//!
//! An enlargement adds information at some time without removing any. The
//! operators here build enlargements (joins, progressive observation of a
//! random time), locate the first time the inclusion becomes strict,
//! check the immersion characterization, and construct the explicit
//! witness showing that the representation property cannot survive an
//! enlargement that starts strictly after time zero.

use crate::error::{Error, Result};
use crate::measures::{find_equivalent_mm, martingale_polytope, unique_emm_on_quotient};
use crate::rational::Rat;
use crate::representation::{integral_span, represent};
use crate::space::{
    conditional_expectation, Filtration, FiniteFilteredSpace, Measure, Partition, Process,
    RandomVariable,
};
use num_traits::Zero;

/// A grid-valued random time: one value in `0..=T` per outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomTime {
    values: Vec<usize>,
}

impl RandomTime {
    pub fn new(values: Vec<usize>, horizon: usize) -> Result<Self> {
        if values.iter().any(|&t| t > horizon) {
            return Err(Error::DimensionMismatch(
                "random time takes a value beyond the horizon".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// True iff the second filtration refines-or-equals the first at every
/// time and refines strictly at some time.
pub fn is_enlargement(f: &Filtration, g: &Filtration) -> Result<bool> {
    check_same_grid(f, g)?;
    let mut strict = false;
    for t in 0..=f.horizon() {
        if !g.at(t).refines(f.at(t)) {
            return Ok(false);
        }
        strict |= g.at(t) != f.at(t);
    }
    Ok(strict)
}

/// Pointwise-in-time join of two filtrations.
pub fn enlarge_join(f: &Filtration, f2: &Filtration) -> Result<Filtration> {
    f.join_with(f2)
}

/// Progressive enlargement by a random time: at time `t` the observer
/// additionally knows the value of `tau` on `{tau <= t}` and the event
/// `{tau > t}`.
pub fn progressive_enlargement(f: &Filtration, tau: &RandomTime) -> Result<Filtration> {
    if tau.len() != f.outcome_count() {
        return Err(Error::DimensionMismatch(
            "random time does not match the filtration".into(),
        ));
    }
    let mut partitions = Vec::with_capacity(f.horizon() + 1);
    for t in 0..=f.horizon() {
        let keys: Vec<usize> = tau.values().iter().map(|&v| v.min(t + 1)).collect();
        partitions.push(f.at(t).join(&Partition::from_keys(&keys))?);
    }
    Filtration::new(partitions)
}

/// Where and how an enlargement becomes strict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnlargementReport {
    /// Least time with strict refinement, if any.
    pub u: Option<usize>,
    /// On a finite grid a nonempty strict set attains its minimum, so
    /// this equals `u.is_some()`.
    pub u_is_min: bool,
    /// All times with strict refinement.
    pub strict_times: Vec<usize>,
    /// The enlarged filtration starts trivial.
    pub g0_trivial: bool,
    /// Strictness propagates to every time in `(u, T]`.
    pub strict_after_u: bool,
}

/// Locates the first strict-inclusion time and evaluates whether
/// strictness persists afterwards.
pub fn first_strict_time(f: &Filtration, g: &Filtration) -> Result<EnlargementReport> {
    check_same_grid(f, g)?;
    for t in 0..=f.horizon() {
        if !g.at(t).refines(f.at(t)) {
            return Err(Error::NotAnEnlargement);
        }
    }
    let strict_times: Vec<usize> =
        (0..=f.horizon()).filter(|&t| g.at(t) != f.at(t)).collect();
    let u = strict_times.first().copied();
    let strict_after_u = match u {
        None => true,
        Some(u) => (u..=f.horizon()).all(|t| strict_times.contains(&t)),
    };
    Ok(EnlargementReport {
        u,
        u_is_min: u.is_some(),
        strict_times,
        g0_trivial: g.at(0).block_count() == 1,
        strict_after_u,
    })
}

/// Both sides of the immersion characterization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImmersionReport {
    /// Every martingale of the small filtration stays a martingale in the
    /// large one.
    pub all_martingales_survive: bool,
    /// The small σ-algebra at each time is the intersection of its
    /// terminal σ-algebra with the large one.
    pub intersection_identity: bool,
    /// Conditional expectations of terminal-measurable variables given
    /// the large filtration stay terminal-measurable.
    pub conditional_measurability: bool,
    /// The two characterizations agree.
    pub equivalence_holds: bool,
}

impl ImmersionReport {
    pub fn immersion(&self) -> bool {
        self.all_martingales_survive
    }
}

/// Evaluates the immersion property over a basis of martingales and the
/// partition-algebra characterization, and asserts their equivalence.
pub fn immersion_check(
    f: &Filtration,
    g: &Filtration,
    q: &Measure,
    space: &FiniteFilteredSpace,
) -> Result<ImmersionReport> {
    check_same_grid(f, g)?;
    if f.outcome_count() != space.outcome_count() || f.horizon() != space.horizon() {
        return Err(Error::DimensionMismatch("filtrations do not match the space".into()));
    }
    if q.len() != space.outcome_count() {
        return Err(Error::DimensionMismatch("measure does not match the space".into()));
    }
    for t in 0..=f.horizon() {
        if !g.at(t).refines(f.at(t)) {
            return Err(Error::NotAnEnlargement);
        }
    }
    let n = space.outcome_count();
    let horizon = space.horizon();

    // (i) over the indicator basis of the terminal partition of f.
    let mut all_martingales_survive = true;
    for block in f.terminal().blocks() {
        let v = RandomVariable::indicator(n, block);
        let mut cols = Vec::with_capacity(horizon + 1);
        for t in 0..=horizon {
            cols.push(conditional_expectation(&v, f.at(t), q)?);
        }
        let process = Process::new(
            (0..n).map(|i| cols.iter().map(|c| c.value(i).clone()).collect()).collect(),
        )?;
        if !crate::space::is_martingale(&process, g, q)? {
            all_martingales_survive = false;
            break;
        }
    }

    // (ii.a): F_t equals the σ-algebra intersection of F_T and G_t.
    let mut intersection_identity = true;
    for t in 0..=horizon {
        if &f.terminal().meet(g.at(t))? != f.at(t) {
            intersection_identity = false;
            break;
        }
    }

    // (ii.b): E[Y | G_t] has a version measurable for the terminal
    // σ-algebra of f, for each indicator Y of a terminal block. Outcomes
    // with zero mass are not pinned by the conditional expectation, so
    // only positive-mass outcomes are compared.
    let mut conditional_measurability = true;
    'outer: for block in f.terminal().blocks() {
        let y = RandomVariable::indicator(n, block);
        for t in 0..=horizon {
            let ce = conditional_expectation(&y, g.at(t), q)?;
            for fb in f.terminal().blocks() {
                let positive: Vec<usize> =
                    fb.iter().copied().filter(|&i| !q.weight(i).is_zero()).collect();
                if let Some(&first) = positive.first() {
                    if positive.iter().any(|&i| ce.value(i) != ce.value(first)) {
                        conditional_measurability = false;
                        break 'outer;
                    }
                }
            }
        }
    }

    let condition_two = intersection_identity && conditional_measurability;
    Ok(ImmersionReport {
        all_martingales_survive,
        intersection_identity,
        conditional_measurability,
        equivalence_holds: all_martingales_survive == condition_two,
    })
}

/// Outcome of the representation-loss construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    /// The witness variable, when all hypotheses hold.
    pub witness: Option<RandomVariable>,
    /// Name of the first failed hypothesis, otherwise `None`.
    pub failed_hypothesis: Option<String>,
    /// First strict-inclusion time.
    pub u: Option<usize>,
    /// The chosen enlarged-information block that is invisible at `u` in
    /// the reference filtration.
    pub block: Option<Vec<usize>>,
    /// The equivalent martingale measure used for the construction.
    pub pricing_measure: Option<Measure>,
    /// `E[L | F_u] = 0` under the pricing measure, exactly.
    pub centered_given_reference: bool,
    /// Zero pairing against every element of the enlarged-filtration
    /// integral span of the process.
    pub orthogonal_to_span: bool,
    /// The witness is outside `constants + span`.
    pub not_representable: bool,
    /// Dimension gap between the terminal variables and
    /// `constants + span` under the enlarged filtration.
    pub codimension: usize,
    /// All certifying identities hold.
    pub certified: bool,
}

impl WitnessReport {
    fn failed(hypothesis: &str, u: Option<usize>) -> Self {
        WitnessReport {
            witness: None,
            failed_hypothesis: Some(hypothesis.to_string()),
            u,
            block: None,
            pricing_measure: None,
            centered_given_reference: false,
            orthogonal_to_span: false,
            not_representable: false,
            codimension: 0,
            certified: false,
        }
    }
}

/// Builds the explicit witness of representation loss: a nonzero variable
/// built from an enlarged-information block, centered given the reference
/// filtration at the first strict time, orthogonal to every
/// enlarged-predictable integral of the process, and outside
/// `constants + span`.
///
/// Hypotheses: a unique equivalent martingale measure for the reference
/// filtration, at least one equivalent martingale measure for the
/// enlarged one, a trivial enlarged initial σ-algebra, and a strict
/// inclusion attained at a positive time. When one fails the report names
/// it and carries no witness.
pub fn prp_loss_witness(
    x: &Process,
    f: &Filtration,
    g: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<WitnessReport> {
    check_same_grid(f, g)?;
    let enlargement = first_strict_time(f, g)?;
    if unique_emm_on_quotient(x, f, space)?.is_none() {
        return Ok(WitnessReport::failed(
            "no unique equivalent martingale measure for the reference filtration",
            enlargement.u,
        ));
    }
    let (g_quotient_space, g_quotient_procs) = space.quotient(g, &[x])?;
    let g_poly = martingale_polytope(
        &[&g_quotient_procs[0]],
        g_quotient_space.filtration(),
        &g_quotient_space,
    )?;
    let Some(q_atoms) = find_equivalent_mm(&g_poly) else {
        return Ok(WitnessReport::failed(
            "no equivalent martingale measure for the enlarged filtration",
            enlargement.u,
        ));
    };
    let q = space.lift_measure(g.terminal(), &q_atoms)?;
    if !enlargement.g0_trivial {
        return Ok(WitnessReport::failed(
            "the enlarged filtration does not start trivial",
            enlargement.u,
        ));
    }
    let Some(u) = enlargement.u else {
        return Ok(WitnessReport::failed(
            "the enlarged filtration never strictly refines the reference one",
            None,
        ));
    };
    debug_assert!(u > 0, "strictness at 0 contradicts a trivial initial σ-algebra");

    // Lexicographically first block of G_u that is not a union of F_u
    // blocks; guaranteed by strictness at u.
    let f_u = f.at(u);
    let block = g
        .at(u)
        .blocks()
        .iter()
        .find(|b| {
            let union: Vec<usize> = b
                .iter()
                .flat_map(|&i| f_u.blocks()[f_u.block_of(i)].iter().copied())
                .collect();
            b.iter().copied().collect::<std::collections::BTreeSet<_>>()
                != union.into_iter().collect()
        })
        .expect("strict refinement provides a block outside the reference σ-algebra")
        .clone();

    let n = space.outcome_count();
    let indicator = RandomVariable::indicator(n, &block);
    let projected = conditional_expectation(&indicator, f_u, &q)?;
    let witness = indicator.sub(&projected);

    let centered = conditional_expectation(&witness, f_u, &q)?.is_zero();
    let span = integral_span(&[x], g, space)?;
    let orthogonal = span.basis_vectors().iter().all(|s| {
        (0..n)
            .map(|i| q.weight(i) * s.value(i) * witness.value(i))
            .sum::<Rat>()
            .is_zero()
    });
    let rep = represent(&witness, &[x], g, space, &q)?;
    let not_representable = !rep.residual.is_zero();
    let codimension = g.terminal().block_count() - (span.dimension() + 1);
    let certified = !witness.is_zero() && centered && orthogonal && not_representable;
    Ok(WitnessReport {
        witness: Some(witness),
        failed_hypothesis: None,
        u: Some(u),
        block: Some(block),
        pricing_measure: Some(q),
        centered_given_reference: centered,
        orthogonal_to_span: orthogonal,
        not_representable,
        codimension,
        certified,
    })
}

fn check_same_grid(f: &Filtration, g: &Filtration) -> Result<()> {
    if f.outcome_count() != g.outcome_count() || f.horizon() != g.horizon() {
        return Err(Error::DimensionMismatch(
            "filtrations live on different grids".into(),
        ));
    }
    Ok(())
}
