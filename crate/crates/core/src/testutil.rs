//! Shared model fixtures for unit tests.

use crate::rational::{rat, Rat};
use crate::space::{FiniteFilteredSpace, Partition, Process};

/// One-step binomial: X goes 1 -> 2 on `u`, 1 -> 1/2 on `d`.
pub fn bin_process() -> Process {
    Process::new(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(1, 1), rat(1, 2)]]).unwrap()
}

pub fn bin_space(p_up: Rat, p_down: Rat) -> FiniteFilteredSpace {
    FiniteFilteredSpace::new(
        vec!["u".into(), "d".into()],
        vec![p_up, p_down],
        vec![Partition::trivial(2), Partition::discrete(2)],
        1,
    )
    .unwrap()
}

/// The drifted binomial: same paths as BIN under P = (2/3, 1/3).
pub fn bin_drift() -> (FiniteFilteredSpace, Process) {
    (bin_space(rat(2, 3), rat(1, 3)), bin_process())
}

/// One-step trinomial: X goes 1 -> {2, 1, 1/2} under the uniform measure.
pub fn tri_model() -> (FiniteFilteredSpace, Process) {
    let space = FiniteFilteredSpace::new(
        vec!["u".into(), "m".into(), "d".into()],
        vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        vec![Partition::trivial(3), Partition::discrete(3)],
        1,
    )
    .unwrap();
    let x = Process::new(vec![
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(1, 1), rat(1, 1)],
        vec![rat(1, 1), rat(1, 2)],
    ])
    .unwrap();
    (space, x)
}

/// Two independent fair coins observed at time 1, uniform measure.
pub fn coin2_space() -> FiniteFilteredSpace {
    FiniteFilteredSpace::new(
        vec!["uu".into(), "ud".into(), "du".into(), "dd".into()],
        vec![rat(1, 4); 4],
        vec![Partition::trivial(4), Partition::discrete(4)],
        1,
    )
    .unwrap()
}

/// The two coordinate martingales of COIN2: M reads the first coin, N the
/// second, both null at zero.
pub fn coin2_processes() -> (Process, Process) {
    let m = Process::new(vec![
        vec![rat(0, 1), rat(1, 1)],
        vec![rat(0, 1), rat(1, 1)],
        vec![rat(0, 1), rat(-1, 1)],
        vec![rat(0, 1), rat(-1, 1)],
    ])
    .unwrap();
    let n = Process::new(vec![
        vec![rat(0, 1), rat(1, 1)],
        vec![rat(0, 1), rat(-1, 1)],
        vec![rat(0, 1), rat(1, 1)],
        vec![rat(0, 1), rat(-1, 1)],
    ])
    .unwrap();
    (m, n)
}

/// Two-step multiplicative binomial on four path outcomes, uniform
/// measure, natural filtration.
pub fn two_step_coin() -> (FiniteFilteredSpace, Process) {
    let x = Process::new(vec![
        vec![rat(1, 1), rat(2, 1), rat(4, 1)],
        vec![rat(1, 1), rat(2, 1), rat(1, 1)],
        vec![rat(1, 1), rat(1, 2), rat(1, 1)],
        vec![rat(1, 1), rat(1, 2), rat(1, 4)],
    ])
    .unwrap();
    let space = FiniteFilteredSpace::new(
        vec!["uu".into(), "ud".into(), "du".into(), "dd".into()],
        vec![rat(1, 4); 4],
        vec![
            Partition::trivial(4),
            Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::discrete(4),
        ],
        2,
    )
    .unwrap();
    (space, x)
}

/// TAU model: the two-step coin paired with an independent time uniform
/// on {1, 2}. Outcomes are (path, tau) pairs; the space filtration is the
/// natural filtration of X.
pub fn tau_model() -> (FiniteFilteredSpace, Process, Vec<usize>) {
    let paths = [
        vec![rat(1, 1), rat(2, 1), rat(4, 1)],
        vec![rat(1, 1), rat(2, 1), rat(1, 1)],
        vec![rat(1, 1), rat(1, 2), rat(1, 1)],
        vec![rat(1, 1), rat(1, 2), rat(1, 4)],
    ];
    let mut outcomes = Vec::new();
    let mut rows = Vec::new();
    let mut tau = Vec::new();
    for (pi, path) in paths.iter().enumerate() {
        for t in [1usize, 2] {
            outcomes.push(format!("{}{}", ["uu", "ud", "du", "dd"][pi], t));
            rows.push(path.clone());
            tau.push(t);
        }
    }
    let x = Process::new(rows).unwrap();
    let n = outcomes.len();
    let space = FiniteFilteredSpace::new(
        outcomes,
        vec![rat(1, 8); n],
        {
            // Natural filtration of X: group by path prefix.
            let keys1: Vec<usize> = (0..n).map(|i| i / 4).collect(); // first move
            let keys2: Vec<usize> = (0..n).map(|i| i / 2).collect(); // full path
            vec![
                Partition::trivial(n),
                Partition::from_keys(&keys1),
                Partition::from_keys(&keys2),
            ]
        },
        2,
    )
    .unwrap();
    (space, x, tau)
}

/// Product of two drifted binomials on four outcomes (X reads the first
/// coordinate, Y the second), product measure.
pub fn prod2_model() -> (FiniteFilteredSpace, Process, Process) {
    let space = FiniteFilteredSpace::new(
        vec!["uu".into(), "ud".into(), "du".into(), "dd".into()],
        vec![rat(4, 9), rat(2, 9), rat(2, 9), rat(1, 9)],
        vec![Partition::trivial(4), Partition::discrete(4)],
        1,
    )
    .unwrap();
    let x = Process::new(vec![
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(1, 1), rat(1, 2)],
        vec![rat(1, 1), rat(1, 2)],
    ])
    .unwrap();
    let y = Process::new(vec![
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(1, 1), rat(1, 2)],
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(1, 1), rat(1, 2)],
    ])
    .unwrap();
    (space, x, y)
}

