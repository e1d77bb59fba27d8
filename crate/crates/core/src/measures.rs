//! Martingale-measure sets as polytopes.
//!
//! For a family of adapted processes the measures making all of them
//! martingales are exactly the solutions of a linear system
//! `{A q = b, q >= 0}`: one constraint per (process, time, block) plus
//! normalization. Existence, equivalence, uniqueness, extremality and
//! singularity all reduce to exact rank and sign computations on that
//! system.

use crate::error::{Error, Result};
use crate::linalg::{self, LpOutcome};
use crate::rational::Rat;
use crate::representation;
use crate::space::{
    conditional_expectation, is_adapted, is_martingale, is_trivial, Filtration,
    FiniteFilteredSpace, Measure, Partition, Process, RandomVariable,
};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// The constraint system `{A q = b, q >= 0}` whose solutions are the
/// martingale measures of a registered process family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurePolytope {
    constraint_matrix: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    outcome_count: usize,
}

/// One linear constraint per (time, block, process):
/// `sum_{w in block} q_w dX_t(w) = 0`, plus the normalization row.
pub fn martingale_polytope(
    processes: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<MeasurePolytope> {
    let n = space.outcome_count();
    if filtration.outcome_count() != n || filtration.horizon() != space.horizon() {
        return Err(Error::DimensionMismatch("filtration does not match the space".into()));
    }
    let mut matrix = vec![vec![Rat::one(); n]];
    let mut rhs = vec![Rat::one()];
    for p in processes {
        if !is_adapted(p, filtration)? {
            return Err(Error::NotAdapted);
        }
        for t in 1..=space.horizon() {
            for block in filtration.at(t - 1).blocks() {
                let mut row = vec![Rat::zero(); n];
                for &i in block {
                    row[i] = p.increment(i, t);
                }
                matrix.push(row);
                rhs.push(Rat::zero());
            }
        }
    }
    Ok(MeasurePolytope { constraint_matrix: matrix, rhs, outcome_count: n })
}

impl MeasurePolytope {
    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn constraint_matrix(&self) -> &[Vec<Rat>] {
        &self.constraint_matrix
    }

    pub fn rhs(&self) -> &[Rat] {
        &self.rhs
    }

    /// Exact membership: `A q = b` with nonnegative weights.
    pub fn contains(&self, q: &Measure) -> bool {
        q.len() == self.outcome_count
            && self
                .constraint_matrix
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| &linalg::dot(row, q.weights()) == b)
    }

    /// Dimension of the affine solution set, or `None` when the system is
    /// inconsistent. The sign constraints are ignored here.
    pub fn affine_dimension(&self) -> Option<usize> {
        linalg::solve(&self.constraint_matrix, &self.rhs)?;
        Some(self.outcome_count - linalg::rank(&self.constraint_matrix))
    }

    /// All vertices of `{A q = b, q >= 0}`, exactly, in lexicographic
    /// support order.
    ///
    /// The affine solution set is parametrized as `q0 + N z`; a vertex is
    /// a feasible point with `d = dim N` independent active coordinates,
    /// so all `d`-subsets of coordinates are probed with exact rank
    /// tests; outcome counts are desk scale.
    pub fn vertices(&self) -> Vec<Measure> {
        let n = self.outcome_count;
        let Some(q0) = linalg::solve(&self.constraint_matrix, &self.rhs) else {
            return Vec::new();
        };
        let null = linalg::nullspace(&self.constraint_matrix);
        let d = null.len();
        let mut found: BTreeSet<Vec<Rat>> = BTreeSet::new();
        if d == 0 {
            if q0.iter().all(|x| !x.is_negative()) {
                found.insert(q0);
            }
        } else {
            // Row i of the nullspace matrix, as seen by coordinate i.
            let rows: Vec<Vec<Rat>> =
                (0..n).map(|i| null.iter().map(|b| b[i].clone()).collect()).collect();
            let mut choice: Vec<usize> = (0..d).collect();
            loop {
                let sub: Vec<Vec<Rat>> = choice.iter().map(|&i| rows[i].clone()).collect();
                let neg: Vec<Rat> = choice.iter().map(|&i| -q0[i].clone()).collect();
                if linalg::rank(&sub) == d {
                    let z = linalg::solve(&sub, &neg).expect("full-rank square system");
                    let q: Vec<Rat> = (0..n)
                        .map(|i| &q0[i] + &linalg::dot(&rows[i], &z))
                        .collect();
                    if q.iter().all(|x| !x.is_negative()) {
                        found.insert(q);
                    }
                }
                if !next_combination(&mut choice, n) {
                    break;
                }
            }
        }
        let mut out: Vec<Measure> = found
            .into_iter()
            .map(|w| Measure::new(w).expect("vertex weights are a probability"))
            .collect();
        out.sort_by_key(|m| m.support());
        out
    }
}

/// Advances `choice` to the next `k`-combination of `0..n`; false when
/// exhausted.
fn next_combination(choice: &mut [usize], n: usize) -> bool {
    let k = choice.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if choice[i] < n - k + i {
            choice[i] += 1;
            for j in i + 1..k {
                choice[j] = choice[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// A strictly positive solution when one exists.
///
/// The barycenter of the vertex set is strictly positive exactly when
/// every coordinate is positive somewhere on the polytope, so one exact
/// enumeration answers the equivalence question.
pub fn find_equivalent_mm(poly: &MeasurePolytope) -> Option<Measure> {
    let vertices = poly.vertices();
    if vertices.is_empty() {
        return None;
    }
    let count = Rat::new((vertices.len() as i64).into(), 1.into());
    let weights: Vec<Rat> = (0..poly.outcome_count())
        .map(|i| vertices.iter().map(|v| v.weight(i)).sum::<Rat>() / &count)
        .collect();
    if weights.iter().any(Rat::is_zero) {
        return None;
    }
    Some(Measure::new(weights).expect("barycenter of probabilities"))
}

/// True iff the affine solution set is a single point and that point is
/// strictly positive. A positive-dimensional set meeting the open orthant
/// meets it in infinitely many points, so this is the full uniqueness
/// test.
pub fn is_unique_emm(poly: &MeasurePolytope) -> bool {
    match poly.affine_dimension() {
        Some(0) => {
            let q = linalg::solve(&poly.constraint_matrix, &poly.rhs)
                .expect("consistent by affine_dimension");
            q.iter().all(|x| x.is_positive())
        }
        _ => false,
    }
}

/// All extremal points of the polytope. Errors when the system is
/// infeasible.
pub fn extremal_points(poly: &MeasurePolytope) -> Result<Vec<Measure>> {
    if poly.affine_dimension().is_none() {
        return Err(Error::InfeasibleSystem);
    }
    Ok(poly.vertices())
}

/// True iff `q` is a vertex: the constraint columns of its support are
/// linearly independent.
pub fn is_extremal(q: &Measure, poly: &MeasurePolytope) -> Result<bool> {
    if !poly.contains(q) {
        return Err(Error::NotInPolytope);
    }
    let support = q.support();
    let cols: Vec<Vec<Rat>> = support
        .iter()
        .map(|&i| poly.constraint_matrix.iter().map(|row| row[i].clone()).collect())
        .collect();
    Ok(linalg::rank(&cols) == support.len())
}

/// Mutual singularity on a finite space: every pair of measures has
/// disjoint supports.
pub fn pairwise_singular(measures: &[Measure]) -> bool {
    for (i, a) in measures.iter().enumerate() {
        for b in &measures[i + 1..] {
            let sa: BTreeSet<usize> = a.support().into_iter().collect();
            if b.support().iter().any(|j| sa.contains(j)) {
                return false;
            }
        }
    }
    true
}

/// Minimal-martingale-measure test: `q` agrees with the base measure on
/// the initial σ-algebra, and every martingale strongly orthogonal to `m`
/// under the base measure stays a martingale under `q`.
///
/// The orthogonal martingales are parametrized by their terminal values:
/// the exact nullspace of the pairings against a basis of terminal
/// integrals of `m`.
pub fn minimal_mm_check(
    q: &Measure,
    m: &Process,
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<bool> {
    let n = space.outcome_count();
    if q.len() != n {
        return Err(Error::DimensionMismatch("measure does not match the space".into()));
    }
    if !q.has_full_support() {
        return Err(Error::NotEquivalent);
    }
    let p = space.measure();
    // Agreement on the initial σ-algebra.
    for block in filtration.at(0).blocks() {
        if q.mass_of(block) != p.mass_of(block) {
            return Ok(false);
        }
    }
    // Pairing rows: v is orthogonal to every integral of m iff
    // E[v * g] = 0 for each basis vector g of the terminal-integral span.
    // An empty span constrains nothing, so every terminal value then
    // parametrizes an orthogonal martingale.
    let span = representation::integral_span(&[m], filtration, space)?;
    let rows: Vec<Vec<Rat>> = span
        .basis_vectors()
        .iter()
        .map(|g| (0..n).map(|i| p.weight(i) * g.value(i)).collect())
        .collect();
    let orthogonal_terminals = if rows.is_empty() {
        (0..n)
            .map(|i| {
                let mut v = vec![Rat::zero(); n];
                v[i] = Rat::one();
                v
            })
            .collect()
    } else {
        linalg::nullspace(&rows)
    };
    for v in orthogonal_terminals {
        let v = RandomVariable::new(v);
        let mut cols = Vec::with_capacity(space.horizon() + 1);
        for t in 0..=space.horizon() {
            cols.push(conditional_expectation(&v, filtration.at(t), p)?);
        }
        let process = Process::new(
            (0..n).map(|i| cols.iter().map(|c| c.value(i).clone()).collect()).collect(),
        )?;
        if !is_martingale(&process, filtration, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reweights `base` by the density `l`, which must be strictly positive
/// with expectation one.
pub fn measure_from_density(base: &Measure, l: &RandomVariable) -> Result<Measure> {
    if base.len() != l.len() {
        return Err(Error::DimensionMismatch("density does not match the measure".into()));
    }
    if l.values().iter().any(|x| !x.is_positive()) {
        return Err(Error::NotADensity("density must be strictly positive".into()));
    }
    let mean = base.expectation(l);
    if !mean.is_one() {
        return Err(Error::NotADensity(format!(
            "density has expectation {}",
            crate::rational::format_rat(&mean)
        )));
    }
    Measure::new(
        base.weights().iter().zip(l.values()).map(|(w, x)| w * x).collect(),
    )
}

/// Builds `dQ/dP = lx * ly` from densities measurable for two independent
/// terminal partitions. The result keeps the two σ-algebras independent
/// and restricts to `measure_from_density(p, lx)` on the first one.
pub fn product_density_measure(
    p: &Measure,
    lx: &RandomVariable,
    terminal_x: &Partition,
    ly: &RandomVariable,
    terminal_y: &Partition,
) -> Result<Measure> {
    let n = p.len();
    if lx.len() != n || ly.len() != n || terminal_x.size() != n || terminal_y.size() != n {
        return Err(Error::DimensionMismatch(
            "densities and partitions must match the measure".into(),
        ));
    }
    if !lx.measurable_wrt(terminal_x) || !ly.measurable_wrt(terminal_y) {
        return Err(Error::NotADensity(
            "density is not measurable for its terminal partition".into(),
        ));
    }
    if !partitions_independent(terminal_x, terminal_y, p) {
        return Err(Error::FiltrationsNotIndependent);
    }
    for (l, name) in [(lx, "first"), (ly, "second")] {
        if l.values().iter().any(|x| !x.is_positive()) {
            return Err(Error::NotADensity(format!("{name} density is not strictly positive")));
        }
        if !p.expectation(l).is_one() {
            return Err(Error::NotADensity(format!(
                "{name} density does not have expectation one"
            )));
        }
    }
    Measure::new(
        p.weights()
            .iter()
            .zip(lx.values())
            .zip(ly.values())
            .map(|((w, a), b)| w * a * b)
            .collect(),
    )
}

/// `P(A ∩ B) = P(A) P(B)` over all blocks of the two partitions.
pub fn partitions_independent(pa: &Partition, pb: &Partition, measure: &Measure) -> bool {
    pa.blocks().iter().all(|a| {
        pb.blocks().iter().all(|b| {
            let joint: Rat = a
                .iter()
                .filter(|&&i| pb.block_of(i) == pb.block_of(b[0]))
                .map(|&i| measure.weight(i))
                .sum();
            joint == measure.mass_of(a) * measure.mass_of(b)
        })
    })
}

/// The product of the marginal laws as a measure on the joint space, or
/// `None` when some product cell is not represented by any outcome (the
/// product law is then not equivalent to any full-support measure on the
/// space).
///
/// Inside each joint cell the mass is spread in proportion to the base
/// measure, so independent marginals return the base measure itself.
pub fn product_law(
    space: &FiniteFilteredSpace,
    fa: &Filtration,
    fb: &Filtration,
) -> Option<Measure> {
    let pa = fa.terminal();
    let pb = fb.terminal();
    let p = space.measure();
    for a in pa.blocks() {
        for b in pb.blocks() {
            if !a.iter().any(|&i| pb.block_of(i) == pb.block_of(b[0])) {
                return None;
            }
        }
    }
    let mut weights = vec![Rat::zero(); space.outcome_count()];
    for a in pa.blocks() {
        for b in pb.blocks() {
            let cell: Vec<usize> = a
                .iter()
                .copied()
                .filter(|&i| pb.block_of(i) == pb.block_of(b[0]))
                .collect();
            let cell_mass = p.mass_of(&cell);
            let target = p.mass_of(a) * p.mass_of(b);
            for &i in &cell {
                weights[i] = &target * p.weight(i) / &cell_mass;
            }
        }
    }
    Some(Measure::new(weights).expect("product law weights are a probability"))
}

/// No-arbitrage in the span sense: the only nonnegative random variable
/// in the span of terminal stochastic integrals is zero (up to null sets
/// of the measure).
///
/// Decided by an exact linear program: maximize the total mass of a
/// nonnegative span element capped at one; the maximum is zero exactly
/// when the condition holds.
pub fn no_arbitrage_check(
    processes: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<bool> {
    let span = representation::integral_span(processes, filtration, space)?;
    let support = measure.support();
    let basis: Vec<Vec<Rat>> = span
        .basis_vectors()
        .iter()
        .map(|g| support.iter().map(|&i| g.value(i).clone()).collect())
        .collect();
    let k = basis.len();
    if k == 0 {
        return Ok(true);
    }
    // Variables: coefficients split into positive and negative parts.
    // w(i) = sum_j (c+_j - c-_j) basis_j(i); require w >= 0, sum w <= 1.
    let m = support.len();
    let mut a = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(2 * k);
        for b in &basis {
            row.push(-b[i].clone());
        }
        for b in &basis {
            row.push(b[i].clone());
        }
        a.push(row);
    }
    let sums: Vec<Rat> = basis.iter().map(|b| b.iter().sum()).collect();
    let mut cap = Vec::with_capacity(2 * k);
    for s in &sums {
        cap.push(s.clone());
    }
    for s in &sums {
        cap.push(-s.clone());
    }
    a.push(cap.clone());
    let mut rhs = vec![Rat::zero(); m];
    rhs.push(Rat::one());
    match linalg::simplex_max(&a, &rhs, &cap) {
        LpOutcome::Optimal(value, _) => Ok(value.is_zero()),
        LpOutcome::Unbounded => unreachable!("objective is capped at one"),
    }
}

/// Per-measure verdicts inside [`SecondFtapReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtapMeasureCheck {
    pub measure: Measure,
    pub equivalent: bool,
    pub extremal: bool,
    pub initial_trivial_under_q: bool,
    pub prp_under_q: bool,
    /// `extremal == (initial_trivial_under_q && prp_under_q)`.
    pub characterization_holds: bool,
}

/// The second fundamental theorem of asset pricing, instantiated: the
/// uniqueness verdict, the completeness verdict, their equivalence, and
/// the extremality characterization for every candidate measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondFtapReport {
    pub emm: Measure,
    pub unique_emm: bool,
    pub complete: bool,
    pub ftap_equivalence_holds: bool,
    pub checks: Vec<FtapMeasureCheck>,
    pub all_hold: bool,
}

/// Builds the polytope for `x`, requires an equivalent martingale measure
/// to exist, and evaluates both directions of the completeness theorem
/// plus the extremality characterization on every vertex and on the
/// equivalent barycenter.
pub fn second_ftap_report(
    x: &Process,
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<SecondFtapReport> {
    let poly = martingale_polytope(&[x], filtration, space)?;
    let Some(emm) = find_equivalent_mm(&poly) else {
        return Err(Error::NoEmm);
    };
    let unique_emm = is_unique_emm(&poly);
    let complete = representation::is_complete(&[x], filtration, space, space.measure())?;
    let mut candidates = poly.vertices();
    if !candidates.contains(&emm) {
        candidates.push(emm.clone());
    }
    let mut checks = Vec::with_capacity(candidates.len());
    for q in candidates {
        let extremal = is_extremal(&q, &poly)?;
        let initial_trivial = is_trivial(filtration.at(0), &q);
        let prp = representation::prp_under(&[x], filtration, space, &q)?;
        checks.push(FtapMeasureCheck {
            equivalent: q.has_full_support(),
            extremal,
            initial_trivial_under_q: initial_trivial,
            prp_under_q: prp,
            characterization_holds: extremal == (initial_trivial && prp),
            measure: q,
        });
    }
    let ftap_equivalence_holds = unique_emm == complete;
    let all_hold =
        ftap_equivalence_holds && checks.iter().all(|c| c.characterization_holds);
    Ok(SecondFtapReport { emm, unique_emm, complete, ftap_equivalence_holds, checks, all_hold })
}

/// Quotients the space by the terminal partition of `f` and decides
/// whether the process has a unique equivalent martingale measure there,
/// returning that measure lifted back to the outcomes when it exists.
///
/// This is the hypothesis "the martingale-measure set on the σ-algebra
/// generated by the process is a singleton" used by the representation
/// reports.
pub fn unique_emm_on_quotient(
    x: &Process,
    f: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<Option<Measure>> {
    let (qspace, qprocs) = space.quotient(f, &[x])?;
    let poly = martingale_polytope(&[&qprocs[0]], qspace.filtration(), &qspace)?;
    if !is_unique_emm(&poly) {
        return Ok(None);
    }
    let q = find_equivalent_mm(&poly).expect("unique EMM is strictly positive");
    Ok(Some(space.lift_measure(f.terminal(), &q)?))
}
