//! Discrete stochastic calculus.
//!
//! Doob decomposition, stochastic integrals, quadratic (co)variation and
//! its predictable compensator, the structure condition, the Doléans
//! exponential, strong orthogonality and independence of filtrations. All
//! identities here are exact rational equalities.

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::space::{
    conditional_expectation, is_adapted, is_martingale, is_predictable, Filtration, Integrand,
    Measure, Process, RandomVariable,
};
use num_traits::{One, Zero};

/// The canonical decomposition `X = X_0 + M + A` with `M` a martingale and
/// `A` predictable, both null at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub initial: RandomVariable,
    pub martingale_part: Process,
    pub drift_part: Process,
}

/// The structure-condition data: predictable `alpha` with
/// `A_t = sum_{s<=t} alpha_s * d<M>_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureData {
    pub alpha: Integrand,
    pub predictable_qv: Process,
    pub satisfied: bool,
}

/// Doob decomposition: `dA_t = E[dX_t | F_{t-1}]` blockwise, `M = X - X_0 - A`.
pub fn doob_decomposition(
    x: &Process,
    filtration: &Filtration,
    measure: &Measure,
) -> Result<Decomposition> {
    if !is_adapted(x, filtration)? {
        return Err(Error::NotAdapted);
    }
    let n = x.outcome_count();
    let horizon = x.horizon();
    let mut drift = vec![vec![Rat::zero(); horizon + 1]; n];
    for t in 1..=horizon {
        let inc = RandomVariable::new((0..n).map(|i| x.increment(i, t)).collect());
        let da = conditional_expectation(&inc, filtration.at(t - 1), measure)?;
        for (row, d) in drift.iter_mut().zip(da.values()) {
            row[t] = &row[t - 1] + d;
        }
    }
    let drift_part = Process::new(drift)?;
    let mart = (0..n)
        .map(|i| {
            (0..=horizon)
                .map(|t| x.value(i, t) - x.value(i, 0) - drift_part.value(i, t))
                .collect()
        })
        .collect();
    Ok(Decomposition {
        initial: x.initial(),
        martingale_part: Process::new(mart)?,
        drift_part,
    })
}

/// `(xi . X)_t = sum_{s<=t} xi_s (X_s - X_{s-1})`, null at zero.
pub fn stochastic_integral(
    xi: &Integrand,
    x: &Process,
    filtration: &Filtration,
) -> Result<Process> {
    if xi.outcome_count() != x.outcome_count() || xi.horizon() != x.horizon() {
        return Err(Error::DimensionMismatch(
            "integrand does not match the integrator".into(),
        ));
    }
    if !is_predictable(xi, filtration)? {
        return Err(Error::NotPredictable);
    }
    Ok(integral_unchecked(xi, x))
}

/// The same sum without the predictability gate; used internally where the
/// integrand is elementary by construction.
pub(crate) fn integral_unchecked(xi: &Integrand, x: &Process) -> Process {
    let n = x.outcome_count();
    let horizon = x.horizon();
    let mut values = vec![vec![Rat::zero(); horizon + 1]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for t in 1..=horizon {
            row[t] = &row[t - 1] + &(xi.at(i, t) * &x.increment(i, t));
        }
    }
    Process::new(values).expect("integral rows are rectangular")
}

/// `[X,Y]_t = sum_{s<=t} dX_s dY_s`, null at zero. Bilinear and symmetric;
/// on a grid there is no continuous part.
pub fn quadratic_covariation(x: &Process, y: &Process) -> Result<Process> {
    if x.outcome_count() != y.outcome_count() || x.horizon() != y.horizon() {
        return Err(Error::DimensionMismatch("processes have different shapes".into()));
    }
    let n = x.outcome_count();
    let horizon = x.horizon();
    let mut values = vec![vec![Rat::zero(); horizon + 1]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for t in 1..=horizon {
            row[t] = &row[t - 1] + &(x.increment(i, t) * y.increment(i, t));
        }
    }
    Process::new(values)
}

/// Total variation `|A|_t = sum_{s<=t} |dA_s|`.
pub fn total_variation(a: &Process) -> Process {
    let n = a.outcome_count();
    let horizon = a.horizon();
    let mut values = vec![vec![Rat::zero(); horizon + 1]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for t in 1..=horizon {
            let inc = a.increment(i, t);
            let abs = if inc < Rat::zero() { -inc } else { inc };
            row[t] = &row[t - 1] + &abs;
        }
    }
    Process::new(values).expect("variation rows are rectangular")
}

/// `d<M>_t = E[(dM_t)^2 | F_{t-1}]` blockwise; predictable, nondecreasing,
/// and `[M] - <M>` is a martingale.
pub fn predictable_qv(m: &Process, filtration: &Filtration, measure: &Measure) -> Result<Process> {
    if !is_martingale(m, filtration, measure)? {
        return Err(Error::NotMartingale);
    }
    let n = m.outcome_count();
    let horizon = m.horizon();
    let mut values = vec![vec![Rat::zero(); horizon + 1]; n];
    for t in 1..=horizon {
        let sq = RandomVariable::new(
            (0..n)
                .map(|i| {
                    let d = m.increment(i, t);
                    &d * &d
                })
                .collect(),
        );
        let dqv = conditional_expectation(&sq, filtration.at(t - 1), measure)?;
        for (row, d) in values.iter_mut().zip(dqv.values()) {
            row[t] = &row[t - 1] + d;
        }
    }
    Process::new(values)
}

/// Solves `dA_t = alpha_t d<M>_t` blockwise. On blocks where `d<M> = 0`
/// the drift must not move and `alpha` is set to zero there.
pub fn structure_alpha(
    dec: &Decomposition,
    filtration: &Filtration,
    measure: &Measure,
) -> Result<StructureData> {
    let m = &dec.martingale_part;
    let a = &dec.drift_part;
    let qv = predictable_qv(m, filtration, measure)?;
    let n = m.outcome_count();
    let horizon = m.horizon();
    let mut alpha = Integrand::zero(n, horizon);
    for t in 1..=horizon {
        for block in filtration.at(t - 1).blocks() {
            let rep = block[0];
            let dqv = qv.increment(rep, t);
            let da = a.increment(rep, t);
            if dqv.is_zero() {
                if !da.is_zero() {
                    return Err(Error::StructureConditionFails);
                }
                continue;
            }
            let ratio = da / dqv;
            for &i in block {
                alpha.set(i, t, ratio.clone());
            }
        }
    }
    let reconstructed = integral_unchecked(&alpha, &qv);
    let satisfied = &reconstructed == a;
    Ok(StructureData { alpha, predictable_qv: qv, satisfied })
}

/// True iff `alpha_t(w) * dM_t(w) < 1` for every outcome and time.
pub fn jump_condition(alpha: &Integrand, m: &Process) -> bool {
    assert_eq!(alpha.outcome_count(), m.outcome_count());
    assert_eq!(alpha.horizon(), m.horizon());
    (1..=m.horizon()).all(|t| {
        (0..m.outcome_count()).all(|i| alpha.at(i, t) * &m.increment(i, t) < Rat::one())
    })
}

/// The Doléans exponential of `-(alpha . M)`:
/// `L_0 = 1`, `L_t = L_{t-1} (1 - alpha_t dM_t)`.
///
/// Requires the jump condition, which makes every factor strictly
/// positive; the result is then the density process of an equivalent
/// change of measure whenever `M` is a martingale.
pub fn doleans_exponential(alpha: &Integrand, m: &Process) -> Result<Process> {
    if !jump_condition(alpha, m) {
        return Err(Error::JumpConditionViolated);
    }
    let n = m.outcome_count();
    let horizon = m.horizon();
    let mut values = vec![vec![Rat::one(); horizon + 1]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for t in 1..=horizon {
            let factor = Rat::one() - alpha.at(i, t) * &m.increment(i, t);
            row[t] = &row[t - 1] * &factor;
        }
    }
    Process::new(values)
}

/// Strong orthogonality: both are martingales, their product is a
/// martingale, and the initial product vanishes on every outcome.
pub fn is_strongly_orthogonal(
    u: &Process,
    v: &Process,
    filtration: &Filtration,
    measure: &Measure,
) -> Result<bool> {
    if !is_martingale(u, filtration, measure)? || !is_martingale(v, filtration, measure)? {
        return Err(Error::NotMartingale);
    }
    let product = u.pointwise_mul(v)?;
    let initial_zero =
        (0..u.outcome_count()).all(|i| (u.value(i, 0) * v.value(i, 0)).is_zero());
    Ok(initial_zero && is_martingale(&product, filtration, measure)?)
}

/// Independence of the σ-algebras generated by the two filtrations:
/// `P(A ∩ B) = P(A) P(B)` for all terminal blocks `A`, `B`.
pub fn are_independent(fa: &Filtration, fb: &Filtration, measure: &Measure) -> Result<bool> {
    if fa.outcome_count() != fb.outcome_count() || fa.outcome_count() != measure.len() {
        return Err(Error::DimensionMismatch(
            "filtrations and measure must agree in size".into(),
        ));
    }
    let ta = fa.terminal();
    let tb = fb.terminal();
    for a in ta.blocks() {
        for b in tb.blocks() {
            let joint: Rat = a
                .iter()
                .filter(|&&i| tb.block_of(i) == tb.block_of(b[0]))
                .map(|&i| measure.weight(i))
                .sum();
            if joint != measure.mass_of(a) * measure.mass_of(b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Yoeurp's lemma instance check: for a martingale `M` and a predictable
/// finite-variation `A`, decides whether `[M, A]` is a martingale.
pub fn check_yoeurp(
    m: &Process,
    a: &Process,
    filtration: &Filtration,
    measure: &Measure,
) -> Result<bool> {
    if !is_martingale(m, filtration, measure)? {
        return Err(Error::NotMartingale);
    }
    if !is_process_predictable(a, filtration)? {
        return Err(Error::NotPredictable);
    }
    let bracket = quadratic_covariation(m, a)?;
    is_martingale(&bracket, filtration, measure)
}

/// A process is predictable when its time-`t` value is measurable at
/// `t-1` (and the initial value at time zero).
pub fn is_process_predictable(p: &Process, filtration: &Filtration) -> Result<bool> {
    if p.outcome_count() != filtration.outcome_count() || p.horizon() != filtration.horizon() {
        return Err(Error::DimensionMismatch(
            "process does not match the filtration".into(),
        ));
    }
    if !p.at_time(0).measurable_wrt(filtration.at(0)) {
        return Ok(false);
    }
    Ok((1..=p.horizon()).all(|t| p.at_time(t).measurable_wrt(filtration.at(t - 1))))
}
