//! Finite filtered probability spaces.
//!
//! A σ-algebra on a finite outcome set is a partition, a filtration is a
//! time-indexed list of partitions that refine weakly in time, and every
//! conditional expectation is a block-weighted average. All invariants are
//! checked exactly at construction; the types are immutable afterwards.

use crate::error::{Error, Result};
use crate::rational::Rat;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A partition of `{0, .., n-1}` into disjoint nonempty blocks.
///
/// Canonical form: each block sorted ascending, blocks ordered by their
/// smallest element. Two partitions are equal iff they carry the same
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl Partition {
    /// Validates and canonicalizes a block list.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::PartitionInvalid("empty block".into()));
            }
            let mut b = block;
            b.sort_unstable();
            b.dedup();
            for &i in &b {
                if i >= n {
                    return Err(Error::PartitionInvalid(format!(
                        "outcome index {i} out of range (n = {n})"
                    )));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::PartitionInvalid(format!(
                        "outcome {i} appears in two blocks"
                    )));
                }
                owner[i] = 0; // placeholder until blocks are ordered
            }
            canon.push(b);
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::PartitionInvalid("blocks do not cover the outcome set".into()));
        }
        canon.sort_by_key(|b| b[0]);
        for (bi, b) in canon.iter().enumerate() {
            for &i in b {
                owner[i] = bi;
            }
        }
        Ok(Self { n, blocks: canon, owner })
    }

    /// The one-block partition.
    pub fn trivial(n: usize) -> Self {
        Self::new(n, vec![(0..n).collect()]).expect("trivial partition is valid")
    }

    /// The all-singletons partition.
    pub fn discrete(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| vec![i]).collect()).expect("discrete partition is valid")
    }

    /// Groups outcomes by key.
    pub fn from_keys<K: Ord>(keys: &[K]) -> Self {
        let mut groups: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            groups.entry(k).or_default().push(i);
        }
        Self::new(keys.len(), groups.into_values().collect()).expect("key groups form a partition")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `omega`.
    pub fn block_of(&self, omega: usize) -> usize {
        self.owner[omega]
    }

    /// True when every block of `self` is contained in a block of
    /// `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n == coarser.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| coarser.block_of(i) == coarser.block_of(b[0])))
    }

    /// Coarsest common refinement: blockwise intersections with empty
    /// intersections dropped.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.n != other.n {
            return Err(Error::PartitionInvalid(
                "join of partitions over different outcome sets".into(),
            ));
        }
        let keys: Vec<(usize, usize)> =
            (0..self.n).map(|i| (self.block_of(i), other.block_of(i))).collect();
        Ok(Partition::from_keys(&keys))
    }

    /// Atoms of the σ-algebra intersection: the finest partition coarser
    /// than both. Blocks are the connected components of the relation
    /// "shares a block in either partition".
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.n != other.n {
            return Err(Error::PartitionInvalid(
                "meet of partitions over different outcome sets".into(),
            ));
        }
        let mut comp: Vec<usize> = (0..self.n).collect();
        fn root(comp: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while comp[r] != r {
                r = comp[r];
            }
            let mut c = i;
            while comp[c] != r {
                let next = comp[c];
                comp[c] = r;
                c = next;
            }
            r
        }
        for p in [self, other] {
            for b in &p.blocks {
                for &i in &b[1..] {
                    let (r1, r2) = (root(&mut comp, b[0]), root(&mut comp, i));
                    comp[r1.max(r2)] = r1.min(r2);
                }
            }
        }
        let keys: Vec<usize> = (0..self.n).map(|i| root(&mut comp, i)).collect();
        Ok(Partition::from_keys(&keys))
    }
}

/// A probability measure as nonnegative rational weights summing to one.
///
/// The base measure of a [`FiniteFilteredSpace`] is additionally required
/// to have full support; polytope solutions may put mass zero on outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    weights: Vec<Rat>,
}

impl Measure {
    pub fn new(weights: Vec<Rat>) -> Result<Self> {
        for (i, w) in weights.iter().enumerate() {
            if w < &Rat::zero() {
                return Err(Error::NonPositiveProbability(i));
            }
        }
        let sum: Rat = weights.iter().sum();
        if !sum.is_one() {
            return Err(Error::ProbabilitySumNotOne(crate::rational::format_rat(&sum)));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rat::new(1.into(), (n as i64).into());
        Self { weights: vec![w; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn weight(&self, omega: usize) -> &Rat {
        &self.weights[omega]
    }

    /// Outcomes carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.weights[i].is_zero()).collect()
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }

    pub fn mass_of(&self, block: &[usize]) -> Rat {
        block.iter().map(|&i| &self.weights[i]).sum()
    }

    pub fn expectation(&self, rv: &RandomVariable) -> Rat {
        self.weights.iter().zip(rv.values()).map(|(w, v)| w * v).sum()
    }
}

/// A filtration: `T+1` partitions refining weakly in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::NotAFiltration);
        }
        let n = partitions[0].size();
        if partitions.iter().any(|p| p.size() != n) {
            return Err(Error::DimensionMismatch(
                "filtration partitions cover different outcome sets".into(),
            ));
        }
        for t in 0..partitions.len() - 1 {
            if !partitions[t + 1].refines(&partitions[t]) {
                return Err(Error::FiltrationNotRefining(t, t + 1));
            }
        }
        Ok(Self { partitions })
    }

    /// Number of time steps `T` (indices run `0..=T`).
    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn outcome_count(&self) -> usize {
        self.partitions[0].size()
    }

    pub fn at(&self, t: usize) -> &Partition {
        &self.partitions[t]
    }

    pub fn terminal(&self) -> &Partition {
        self.partitions.last().expect("filtration is nonempty")
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Pointwise-in-time join with another filtration.
    pub fn join_with(&self, other: &Filtration) -> Result<Filtration> {
        if self.partitions.len() != other.partitions.len() {
            return Err(Error::DimensionMismatch(
                "filtrations have different horizons".into(),
            ));
        }
        let joined: Result<Vec<Partition>> = self
            .partitions
            .iter()
            .zip(&other.partitions)
            .map(|(a, b)| a.join(b))
            .collect();
        Filtration::new(joined?)
    }
}

/// An adapted-or-not path matrix: one rational value per outcome and time
/// `0..=T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    values: Vec<Vec<Rat>>,
}

impl Process {
    /// `values[omega][t]`; rows must be nonempty and of equal length.
    pub fn new(values: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = values.first().map_or(0, Vec::len);
        if cols == 0 || values.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged or empty process matrix".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, horizon: usize, value: Rat) -> Self {
        Self { values: vec![vec![value; horizon + 1]; n] }
    }

    pub fn outcome_count(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> usize {
        self.values[0].len() - 1
    }

    pub fn value(&self, omega: usize, t: usize) -> &Rat {
        &self.values[omega][t]
    }

    /// `X_t - X_{t-1}` on outcome `omega`, for `t >= 1`.
    pub fn increment(&self, omega: usize, t: usize) -> Rat {
        &self.values[omega][t] - &self.values[omega][t - 1]
    }

    pub fn at_time(&self, t: usize) -> RandomVariable {
        RandomVariable::new(self.values.iter().map(|r| r[t].clone()).collect())
    }

    pub fn terminal(&self) -> RandomVariable {
        self.at_time(self.horizon())
    }

    pub fn initial(&self) -> RandomVariable {
        self.at_time(0)
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.values
    }

    /// Pointwise product process.
    pub fn pointwise_mul(&self, other: &Process) -> Result<Process> {
        same_shape(self, other)?;
        Ok(Process {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
                .collect(),
        })
    }

    pub fn pointwise_sub(&self, other: &Process) -> Result<Process> {
        same_shape(self, other)?;
        Ok(Process {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        })
    }

    pub fn pointwise_add(&self, other: &Process) -> Result<Process> {
        same_shape(self, other)?;
        Ok(Process {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|r| r.iter().all(Rat::is_zero))
    }
}

fn same_shape(a: &Process, b: &Process) -> Result<()> {
    if a.outcome_count() != b.outcome_count() || a.horizon() != b.horizon() {
        return Err(Error::DimensionMismatch("processes have different shapes".into()));
    }
    Ok(())
}

/// One rational value per outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomVariable {
    values: Vec<Rat>,
}

impl RandomVariable {
    pub fn new(values: Vec<Rat>) -> Self {
        Self { values }
    }

    pub fn zero(n: usize) -> Self {
        Self { values: vec![Rat::zero(); n] }
    }

    pub fn constant(n: usize, value: Rat) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn indicator(n: usize, block: &[usize]) -> Self {
        let mut v = vec![Rat::zero(); n];
        for &i in block {
            v[i] = Rat::one();
        }
        Self { values: v }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, omega: usize) -> &Rat {
        &self.values[omega]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    pub fn sub(&self, other: &RandomVariable) -> RandomVariable {
        RandomVariable::new(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, other: &RandomVariable) -> RandomVariable {
        RandomVariable::new(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    /// True when the variable is constant on every block of the partition.
    pub fn measurable_wrt(&self, partition: &Partition) -> bool {
        partition
            .blocks()
            .iter()
            .all(|b| b.iter().all(|&i| self.values[i] == self.values[b[0]]))
    }
}

/// A predictable-or-not integrand: one value per outcome for each time
/// `1..=T`, interpreted as the position held over `(t-1, t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Integrand {
    values: Vec<Vec<Rat>>,
}

impl Integrand {
    /// `values[omega][t-1]` is the value used over `(t-1, t]`.
    pub fn new(values: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = values.first().map_or(0, Vec::len);
        if cols == 0 || values.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged or empty integrand matrix".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, horizon: usize, value: Rat) -> Self {
        Self { values: vec![vec![value; horizon]; n] }
    }

    pub fn zero(n: usize, horizon: usize) -> Self {
        Self::constant(n, horizon, Rat::zero())
    }

    pub fn outcome_count(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> usize {
        self.values[0].len()
    }

    /// Value used over `(t-1, t]`, `t` in `1..=T`.
    pub fn at(&self, omega: usize, t: usize) -> &Rat {
        &self.values[omega][t - 1]
    }

    pub fn set(&mut self, omega: usize, t: usize, value: Rat) {
        self.values[omega][t - 1] = value;
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.values
    }
}

/// The ambient object: outcomes, a full-support base measure, a horizon
/// and a filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFilteredSpace {
    outcomes: Vec<String>,
    measure: Measure,
    horizon: usize,
    filtration: Filtration,
}

impl FiniteFilteredSpace {
    /// Builds and validates a space. The base measure must be strictly
    /// positive and sum to one; the partitions must refine weakly in time
    /// and there must be exactly `horizon + 1` of them.
    pub fn new(
        outcomes: Vec<String>,
        weights: Vec<Rat>,
        partitions: Vec<Partition>,
        horizon: usize,
    ) -> Result<Self> {
        let n = outcomes.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty outcome set".into()));
        }
        if weights.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} outcomes but {} probabilities",
                n,
                weights.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if w <= &Rat::zero() {
                return Err(Error::NonPositiveProbability(i));
            }
        }
        let measure = Measure::new(weights)?;
        if horizon == 0 {
            return Err(Error::DimensionMismatch("horizon must be at least 1".into()));
        }
        if partitions.len() != horizon + 1 {
            return Err(Error::DimensionMismatch(format!(
                "horizon {} requires {} partitions, got {}",
                horizon,
                horizon + 1,
                partitions.len()
            )));
        }
        if partitions.iter().any(|p| p.size() != n) {
            return Err(Error::DimensionMismatch(
                "partition outcome count differs from outcome list".into(),
            ));
        }
        let filtration = Filtration::new(partitions)?;
        Ok(Self { outcomes, measure, horizon, filtration })
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    /// Collapses the space to the atoms of `filtration`'s terminal
    /// partition, carrying the given processes along.
    ///
    /// Every process must be constant on each terminal atom at every time
    /// (which holds whenever it is adapted to `filtration`).
    pub fn quotient(
        &self,
        filtration: &Filtration,
        processes: &[&Process],
    ) -> Result<(FiniteFilteredSpace, Vec<Process>)> {
        if filtration.outcome_count() != self.outcome_count()
            || filtration.horizon() != self.horizon
        {
            return Err(Error::DimensionMismatch(
                "filtration does not match the space".into(),
            ));
        }
        let atoms = filtration.terminal().blocks();
        let labels: Vec<String> = atoms
            .iter()
            .map(|b| b.iter().map(|&i| self.outcomes[i].as_str()).collect::<Vec<_>>().join("+"))
            .collect();
        let weights: Vec<Rat> = atoms.iter().map(|b| self.measure.mass_of(b)).collect();
        let mut q_partitions = Vec::with_capacity(self.horizon + 1);
        for t in 0..=self.horizon {
            let keys: Vec<usize> =
                atoms.iter().map(|b| filtration.at(t).block_of(b[0])).collect();
            q_partitions.push(Partition::from_keys(&keys));
        }
        let mut q_processes = Vec::with_capacity(processes.len());
        for p in processes {
            if p.outcome_count() != self.outcome_count() || p.horizon() != self.horizon {
                return Err(Error::DimensionMismatch("process does not match the space".into()));
            }
            let mut rows = Vec::with_capacity(atoms.len());
            for b in atoms {
                let row = self.rows_constant_on(p, b)?;
                rows.push(row);
            }
            q_processes.push(Process::new(rows)?);
        }
        let space =
            FiniteFilteredSpace::new(labels, weights, q_partitions, self.horizon)?;
        Ok((space, q_processes))
    }

    fn rows_constant_on(&self, p: &Process, block: &[usize]) -> Result<Vec<Rat>> {
        let first = block[0];
        for t in 0..=self.horizon {
            for &i in block {
                if p.value(i, t) != p.value(first, t) {
                    return Err(Error::NotAdapted);
                }
            }
        }
        Ok(p.rows()[first].clone())
    }

    /// Lifts a measure on the atoms of `partition` back to outcomes,
    /// spreading each atom's mass across its outcomes in proportion to the
    /// base measure.
    pub fn lift_measure(&self, partition: &Partition, atom_measure: &Measure) -> Result<Measure> {
        if atom_measure.len() != partition.block_count()
            || partition.size() != self.outcome_count()
        {
            return Err(Error::DimensionMismatch(
                "atom measure does not match the partition".into(),
            ));
        }
        let mut weights = vec![Rat::zero(); self.outcome_count()];
        for (b, block) in partition.blocks().iter().enumerate() {
            let base_mass = self.measure.mass_of(block);
            for &i in block {
                weights[i] = atom_measure.weight(b) * self.measure.weight(i) / &base_mass;
            }
        }
        Measure::new(weights)
    }
}

/// Partition at each time groups outcomes with identical trajectories of
/// all the given processes on `[0, t]`; the result refines weakly in time
/// by construction.
pub fn natural_filtration(
    processes: &[&Process],
    space: &FiniteFilteredSpace,
) -> Result<Filtration> {
    let n = space.outcome_count();
    let horizon = space.horizon();
    for p in processes {
        if p.outcome_count() != n || p.horizon() != horizon {
            return Err(Error::DimensionMismatch(
                "process does not match the space".into(),
            ));
        }
    }
    let mut partitions = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let keys: Vec<Vec<&Rat>> = (0..n)
            .map(|omega| {
                processes
                    .iter()
                    .flat_map(|p| (0..=t).map(move |s| p.value(omega, s)))
                    .collect()
            })
            .collect();
        partitions.push(Partition::from_keys(&keys));
    }
    Filtration::new(partitions)
}

/// Blockwise weighted average. On a block of measure zero the value is
/// set to zero, the canonical version; the base measure of a space never
/// has such blocks.
pub fn conditional_expectation(
    rv: &RandomVariable,
    partition: &Partition,
    measure: &Measure,
) -> Result<RandomVariable> {
    if rv.len() != partition.size() || measure.len() != partition.size() {
        return Err(Error::DimensionMismatch(
            "random variable, partition and measure must agree in size".into(),
        ));
    }
    let mut out = vec![Rat::zero(); rv.len()];
    for block in partition.blocks() {
        let mass = measure.mass_of(block);
        if mass.is_zero() {
            continue;
        }
        let avg: Rat =
            block.iter().map(|&i| measure.weight(i) * rv.value(i)).sum::<Rat>() / &mass;
        for &i in block {
            out[i] = avg.clone();
        }
    }
    Ok(RandomVariable::new(out))
}

/// True iff column `t` is constant on each block of the partition at `t`,
/// for every `t`.
pub fn is_adapted(p: &Process, filtration: &Filtration) -> Result<bool> {
    if p.outcome_count() != filtration.outcome_count() || p.horizon() != filtration.horizon() {
        return Err(Error::DimensionMismatch(
            "process does not match the filtration".into(),
        ));
    }
    Ok((0..=p.horizon()).all(|t| p.at_time(t).measurable_wrt(filtration.at(t))))
}

/// True iff the value used over `(t-1, t]` is constant on each block of
/// the partition at `t-1`, for every `t >= 1`.
pub fn is_predictable(xi: &Integrand, filtration: &Filtration) -> Result<bool> {
    if xi.outcome_count() != filtration.outcome_count() || xi.horizon() != filtration.horizon() {
        return Err(Error::DimensionMismatch(
            "integrand does not match the filtration".into(),
        ));
    }
    Ok((1..=xi.horizon()).all(|t| {
        let col = RandomVariable::new(
            (0..xi.outcome_count()).map(|omega| xi.at(omega, t).clone()).collect(),
        );
        col.measurable_wrt(filtration.at(t - 1))
    }))
}

/// True iff the process is adapted and every increment has zero
/// conditional expectation given the previous partition, on every block
/// carrying positive mass.
pub fn is_martingale(p: &Process, filtration: &Filtration, measure: &Measure) -> Result<bool> {
    if measure.len() != filtration.outcome_count() {
        return Err(Error::DimensionMismatch(
            "measure does not match the filtration".into(),
        ));
    }
    if !is_adapted(p, filtration)? {
        return Ok(false);
    }
    for t in 1..=p.horizon() {
        for block in filtration.at(t - 1).blocks() {
            if measure.mass_of(block).is_zero() {
                continue;
            }
            let drift: Rat = block.iter().map(|&i| measure.weight(i) * p.increment(i, t)).sum();
            if !drift.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff all the measure's mass sits in a single block. For a
/// full-support measure this says the partition has exactly one block.
pub fn is_trivial(partition: &Partition, measure: &Measure) -> bool {
    partition
        .blocks()
        .iter()
        .any(|b| measure.mass_of(b).is_one())
}
