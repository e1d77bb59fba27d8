//! Random instance generation for property testing.
//!
//! Spaces, filtrations, adapted processes, martingales and predictable
//! integrands with small rational entries, plus the structured instances
//! (binary-branching trees, correlated coin pairs, product models) that
//! the hypothesis-laden statements need. Everything is driven by a caller
//! supplied RNG so suites stay reproducible from a seed.

use crate::rational::Rat;
use crate::space::{
    conditional_expectation, Filtration, FiniteFilteredSpace, Integrand, Measure, Partition,
    Process, RandomVariable,
};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

/// Bounds for random instances.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub max_outcomes: usize,
    pub max_horizon: usize,
    pub max_numerator: i64,
    pub max_denominator: i64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { max_outcomes: 12, max_horizon: 4, max_numerator: 6, max_denominator: 4 }
    }
}

impl Sampler {
    pub fn rational<R: Rng>(&self, rng: &mut R) -> Rat {
        let num = rng.gen_range(-self.max_numerator..=self.max_numerator);
        let den = rng.gen_range(1..=self.max_denominator);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// A strictly positive measure with small integer odds.
    pub fn measure<R: Rng>(&self, rng: &mut R, n: usize) -> Measure {
        let odds: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let total: i64 = odds.iter().sum();
        Measure::new(
            odds.into_iter()
                .map(|o| Rat::new(BigInt::from(o), BigInt::from(total)))
                .collect(),
        )
        .expect("positive odds normalize")
    }

    /// Splits some blocks of `p` at random; the result refines `p`.
    pub fn refine_partition<R: Rng>(&self, rng: &mut R, p: &Partition) -> Partition {
        let mut blocks = Vec::new();
        for block in p.blocks() {
            if block.len() >= 2 && rng.gen_bool(0.7) {
                let cut = rng.gen_range(1..block.len());
                let mut shuffled = block.clone();
                for i in (1..shuffled.len()).rev() {
                    shuffled.swap(i, rng.gen_range(0..=i));
                }
                blocks.push(shuffled[..cut].to_vec());
                blocks.push(shuffled[cut..].to_vec());
            } else {
                blocks.push(block.clone());
            }
        }
        Partition::new(p.size(), blocks).expect("splitting preserves partition invariants")
    }

    /// A random refining chain starting from `start`, `horizon + 1` long.
    pub fn filtration_from<R: Rng>(
        &self,
        rng: &mut R,
        start: Partition,
        horizon: usize,
    ) -> Filtration {
        let mut partitions = vec![start];
        for _ in 0..horizon {
            let prev = partitions.last().expect("nonempty");
            partitions.push(self.refine_partition(rng, prev));
        }
        Filtration::new(partitions).expect("refining chain is a filtration")
    }

    /// A random space. The initial σ-algebra is trivial most of the time;
    /// occasionally a coarse random partition, to exercise the nontrivial
    /// starting case.
    pub fn space<R: Rng>(&self, rng: &mut R) -> FiniteFilteredSpace {
        let n = rng.gen_range(2..=self.max_outcomes);
        let horizon = rng.gen_range(1..=self.max_horizon);
        let start = if rng.gen_bool(0.8) {
            Partition::trivial(n)
        } else {
            let keys: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            Partition::from_keys(&keys)
        };
        let filtration = self.filtration_from(rng, start, horizon);
        let measure = self.measure(rng, n);
        FiniteFilteredSpace::new(
            (0..n).map(|i| format!("w{i}")).collect(),
            measure.weights().to_vec(),
            filtration.partitions().to_vec(),
            horizon,
        )
        .expect("sampled data is consistent")
    }

    /// Adapted process: each block value at each time drawn independently.
    pub fn adapted_process<R: Rng>(&self, rng: &mut R, filtration: &Filtration) -> Process {
        let n = filtration.outcome_count();
        let mut values = vec![vec![Rat::zero(); filtration.horizon() + 1]; n];
        for t in 0..=filtration.horizon() {
            for block in filtration.at(t).blocks() {
                let v = self.rational(rng);
                for &i in block {
                    values[i][t] = v.clone();
                }
            }
        }
        Process::new(values).expect("rectangular by construction")
    }

    /// Martingale built backwards from a random terminal variable.
    pub fn martingale<R: Rng>(
        &self,
        rng: &mut R,
        filtration: &Filtration,
        measure: &Measure,
    ) -> Process {
        let n = filtration.outcome_count();
        let horizon = filtration.horizon();
        let mut terminal = vec![Rat::zero(); n];
        for block in filtration.terminal().blocks() {
            let v = self.rational(rng);
            for &i in block {
                terminal[i] = v.clone();
            }
        }
        let mut columns = vec![RandomVariable::new(terminal)];
        for t in (0..horizon).rev() {
            let next = columns.last().expect("nonempty");
            columns.push(
                conditional_expectation(next, filtration.at(t), measure)
                    .expect("sampled dimensions agree"),
            );
        }
        columns.reverse();
        Process::new(
            (0..n).map(|i| columns.iter().map(|c| c.value(i).clone()).collect()).collect(),
        )
        .expect("rectangular by construction")
    }

    /// As [`Sampler::martingale`] but started at zero.
    pub fn martingale_null_at_zero<R: Rng>(
        &self,
        rng: &mut R,
        filtration: &Filtration,
        measure: &Measure,
    ) -> Process {
        let m = self.martingale(rng, filtration, measure);
        let n = filtration.outcome_count();
        Process::new(
            (0..n)
                .map(|i| {
                    (0..=filtration.horizon())
                        .map(|t| m.value(i, t) - m.value(i, 0))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular by construction")
    }

    /// Predictable integrand: the value over `(t-1, t]` is drawn per block
    /// of the partition at `t - 1`.
    pub fn predictable<R: Rng>(&self, rng: &mut R, filtration: &Filtration) -> Integrand {
        let n = filtration.outcome_count();
        let mut xi = Integrand::zero(n, filtration.horizon());
        for t in 1..=filtration.horizon() {
            for block in filtration.at(t - 1).blocks() {
                let v = self.rational(rng);
                for &i in block {
                    xi.set(i, t, v.clone());
                }
            }
        }
        xi
    }

    /// Predictable finite-variation process null at zero.
    pub fn predictable_drift<R: Rng>(&self, rng: &mut R, filtration: &Filtration) -> Process {
        let xi = self.predictable(rng, filtration);
        let n = filtration.outcome_count();
        let mut values = vec![vec![Rat::zero(); filtration.horizon() + 1]; n];
        for (i, row) in values.iter_mut().enumerate() {
            for t in 1..=filtration.horizon() {
                row[t] = &row[t - 1] + xi.at(i, t);
            }
        }
        Process::new(values).expect("rectangular by construction")
    }

    /// An enlargement-or-equal of `f`: the pointwise join with another
    /// random filtration over the same grid.
    pub fn enlargement_of<R: Rng>(&self, rng: &mut R, f: &Filtration) -> Filtration {
        let extra = self.filtration_from(
            rng,
            Partition::trivial(f.outcome_count()),
            f.horizon(),
        );
        f.join_with(&extra).expect("join of filtrations over one grid")
    }
}

/// A one-dimensional binary-branching tree: at every node the process
/// moves to one of two distinct values, with branch probabilities chosen
/// so it is a martingale. Such a process has a unique equivalent
/// martingale measure for its natural filtration, namely the measure it
/// was built under.
#[derive(Debug, Clone)]
pub struct BinaryTreeFactor {
    /// Path-space weights (full support).
    pub weights: Vec<Rat>,
    /// Path values, one row per path, times `0..=T`.
    pub paths: Vec<Vec<Rat>>,
}

/// Samples a binary martingale tree with `horizon` steps.
pub fn binary_tree_factor<R: Rng>(s: &Sampler, rng: &mut R, horizon: usize) -> BinaryTreeFactor {
    let mut weights = vec![Rat::new(1.into(), 1.into())];
    let mut paths = vec![vec![s.rational(rng)]];
    for _ in 0..horizon {
        let mut new_weights = Vec::with_capacity(weights.len() * 2);
        let mut new_paths = Vec::with_capacity(paths.len() * 2);
        for (w, path) in weights.iter().zip(&paths) {
            let last = path.last().expect("paths are nonempty").clone();
            // Strictly positive up move, strictly negative down move.
            let up = Rat::new(
                BigInt::from(rng.gen_range(1..=s.max_numerator)),
                BigInt::from(rng.gen_range(1..=s.max_denominator)),
            );
            let down = -Rat::new(
                BigInt::from(rng.gen_range(1..=s.max_numerator)),
                BigInt::from(rng.gen_range(1..=s.max_denominator)),
            );
            // Martingale branch probability: p * up + (1 - p) * down = 0.
            let p_up = -&down / (&up - &down);
            let p_down = Rat::new(1.into(), 1.into()) - &p_up;
            for (delta, prob) in [(up, p_up), (down, p_down)] {
                let mut extended = path.clone();
                extended.push(&last + &delta);
                new_paths.push(extended);
                new_weights.push(w * &prob);
            }
        }
        weights = new_weights;
        paths = new_paths;
    }
    BinaryTreeFactor { weights, paths }
}

/// A correlated pair of one-step sign coins on four outcomes with
/// prescribed marginals: both coordinates are martingales null at zero
/// with binary branching (so each satisfies the unique-measure
/// hypothesis on its own filtration), and the joint law is independent
/// exactly when `tilt` is zero.
pub fn correlated_coin_pair<R: Rng>(
    s: &Sampler,
    rng: &mut R,
    tilt_zero: bool,
) -> (FiniteFilteredSpace, Process, Process) {
    let a_up = Rat::new(BigInt::from(rng.gen_range(1..=s.max_numerator)), 1.into());
    let a_down = -Rat::new(BigInt::from(rng.gen_range(1..=s.max_numerator)), 1.into());
    let b_up = Rat::new(BigInt::from(rng.gen_range(1..=s.max_numerator)), 1.into());
    let b_down = -Rat::new(BigInt::from(rng.gen_range(1..=s.max_numerator)), 1.into());
    let p = -&a_down / (&a_up - &a_down);
    let q = -&b_down / (&b_up - &b_down);
    let one = Rat::new(1.into(), 1.into());
    let mut joint = vec![
        &p * &q,
        &p * (&one - &q),
        (&one - &p) * &q,
        (&one - &p) * (&one - &q),
    ];
    if !tilt_zero {
        // Largest tilt keeping all four cells strictly positive, halved.
        let bound = joint.iter().skip(1).take(2).cloned().min().expect("two middle cells");
        let tilt = bound / Rat::new(2.into(), 1.into());
        joint[0] += &tilt;
        joint[1] -= &tilt;
        joint[2] -= &tilt;
        joint[3] += &tilt;
    }
    let zero = Rat::zero();
    let m = Process::new(vec![
        vec![zero.clone(), a_up.clone()],
        vec![zero.clone(), a_up.clone()],
        vec![zero.clone(), a_down.clone()],
        vec![zero.clone(), a_down.clone()],
    ])
    .expect("rectangular");
    let n = Process::new(vec![
        vec![zero.clone(), b_up.clone()],
        vec![zero.clone(), b_down.clone()],
        vec![zero.clone(), b_up.clone()],
        vec![zero.clone(), b_down],
    ])
    .expect("rectangular");
    let space = FiniteFilteredSpace::new(
        vec!["uu".into(), "ud".into(), "du".into(), "dd".into()],
        joint,
        vec![Partition::trivial(4), Partition::discrete(4)],
        1,
    )
    .expect("correlated pair weights are a full-support probability");
    (space, m, n)
}

/// Lifts two factor path spaces to their product with the product
/// measure, returning the joint space and the two lifted coordinate
/// processes.
pub fn product_of_factors(
    first: &BinaryTreeFactor,
    second: &BinaryTreeFactor,
) -> (FiniteFilteredSpace, Process, Process) {
    let horizon = first.paths[0].len() - 1;
    let mut outcomes = Vec::new();
    let mut weights = Vec::new();
    let mut x_rows = Vec::new();
    let mut y_rows = Vec::new();
    for (i, (wa, pa)) in first.weights.iter().zip(&first.paths).enumerate() {
        for (j, (wb, pb)) in second.weights.iter().zip(&second.paths).enumerate() {
            outcomes.push(format!("a{i}b{j}"));
            weights.push(wa * wb);
            x_rows.push(pa.clone());
            y_rows.push(pb.clone());
        }
    }
    let n = outcomes.len();
    let x = Process::new(x_rows).expect("rectangular");
    let y = Process::new(y_rows).expect("rectangular");
    let mut partitions = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let keys: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut k: Vec<Rat> = (0..=t).map(|s| x.value(i, s).clone()).collect();
                k.extend((0..=t).map(|s| y.value(i, s).clone()));
                k
            })
            .collect();
        partitions.push(Partition::from_keys(&keys));
    }
    let space = FiniteFilteredSpace::new(outcomes, weights, partitions, horizon)
        .expect("product space is consistent");
    (space, x, y)
}

/// Turns a factor into a standalone space carrying its natural filtration.
pub fn factor_space(factor: &BinaryTreeFactor) -> (FiniteFilteredSpace, Process) {
    let horizon = factor.paths[0].len() - 1;
    let n = factor.paths.len();
    let x = Process::new(factor.paths.clone()).expect("rectangular");
    let mut partitions = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let keys: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..=t).map(|s| x.value(i, s).clone()).collect()).collect();
        partitions.push(Partition::from_keys(&keys));
    }
    let space = FiniteFilteredSpace::new(
        (0..n).map(|i| format!("p{i}")).collect(),
        factor.weights.clone(),
        partitions,
        horizon,
    )
    .expect("factor space is consistent");
    (space, x)
}
