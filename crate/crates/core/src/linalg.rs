//! Dense exact linear algebra over rationals.
//!
//! Everything is Gauss–Jordan on [`Rat`] entries: rank, consistent solves,
//! nullspace bases, minimum-norm solutions and a small primal simplex used
//! for cone feasibility. Matrices are row-major `Vec<Vec<Rat>>`; sizes are
//! desk scale, so no pivoting heuristics beyond exact nonzero tests are
//! needed.

use crate::rational::Rat;
use num_traits::{One, Signed, Zero};

/// Reduces `m` to reduced row echelon form in place and returns the pivot
/// column indices in row order.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of the row set.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut m).len()
}

/// One solution of `A x = b` with free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.len(), b.len(), "row count must match rhs length");
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None; // pivot in the rhs column
    }
    let mut x = vec![Rat::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][cols].clone();
    }
    Some(x)
}

/// Basis of `{x : A x = 0}`, one vector per free column, in free-column
/// order.
pub fn nullspace(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = a.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// The minimum Euclidean-norm solution of a consistent system `A x = b`,
/// or `None` when inconsistent.
///
/// Uses the normal-equation factorization `x = Aᵀ y` with `A Aᵀ y = b`;
/// the ranges of `A` and `A Aᵀ` coincide, so consistency transfers.
pub fn min_norm_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut gram = vec![vec![Rat::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let d = dot(&a[i], &a[j]);
            gram[i][j] = d.clone();
            gram[j][i] = d;
        }
    }
    let y = solve(&gram, b)?;
    let mut x = vec![Rat::zero(); cols];
    for (yi, row) in y.iter().zip(a) {
        if yi.is_zero() {
            continue;
        }
        for (xj, aij) in x.iter_mut().zip(row) {
            *xj += yi * aij;
        }
    }
    Some(x)
}

/// Indices of the lexicographically first maximal linearly independent
/// subset of `vecs`.
pub fn independent_indices(vecs: &[Vec<Rat>]) -> Vec<usize> {
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    let mut kept = Vec::new();
    for (i, v) in vecs.iter().enumerate() {
        let mut red = v.clone();
        reduce_against(&mut red, &echelon);
        if red.iter().any(|x| !x.is_zero()) {
            normalize_leading(&mut red);
            echelon.push(red);
            echelon.sort_by_key(|r| leading_col(r));
            kept.push(i);
        }
    }
    kept
}

/// True when `v` lies in the span of `basis`.
pub fn in_span(v: &[Rat], basis: &[Vec<Rat>]) -> bool {
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    for b in basis {
        let mut red = b.clone();
        reduce_against(&mut red, &echelon);
        if red.iter().any(|x| !x.is_zero()) {
            normalize_leading(&mut red);
            echelon.push(red);
            echelon.sort_by_key(|r| leading_col(r));
        }
    }
    let mut red = v.to_vec();
    reduce_against(&mut red, &echelon);
    red.iter().all(Rat::is_zero)
}

fn leading_col(v: &[Rat]) -> usize {
    v.iter().position(|x| !x.is_zero()).unwrap_or(v.len())
}

fn normalize_leading(v: &mut [Rat]) {
    let lead = leading_col(v);
    if lead == v.len() {
        return;
    }
    let inv = v[lead].recip();
    for x in v.iter_mut() {
        *x *= &inv;
    }
}

fn reduce_against(v: &mut [Rat], echelon: &[Vec<Rat>]) {
    for row in echelon {
        let lead = leading_col(row);
        if lead == row.len() || v[lead].is_zero() {
            continue;
        }
        let f = v[lead].clone();
        for (x, r) in v.iter_mut().zip(row) {
            let sub = &f * r;
            *x -= sub;
        }
    }
}

/// Exact dot product.
pub fn dot(u: &[Rat], v: &[Rat]) -> Rat {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Outcome of [`simplex_max`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Optimal objective value and an optimal point.
    Optimal(Rat, Vec<Rat>),
    /// The objective increases without bound over the feasible set.
    Unbounded,
}

/// Maximizes `c·x` subject to `A x <= b`, `x >= 0`, for `b >= 0`.
///
/// The nonnegative right-hand side makes the slack basis feasible, so no
/// phase-one is needed. Bland's rule keeps the exact pivoting finite.
pub fn simplex_max(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert!(b.iter().all(|x| !x.is_negative()), "rhs must be nonnegative");
    // Tableau rows: m constraint rows over n structural + m slack columns
    // plus rhs; final row holds reduced costs and the negated objective.
    let mut t = vec![vec![Rat::zero(); n + m + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j].clone();
        }
        t[i][n + i] = Rat::one();
        t[i][n + m] = b[i].clone();
    }
    for j in 0..n {
        t[m][j] = -c[j].clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) else {
            let mut x = vec![Rat::zero(); n];
            for (i, &bj) in basis.iter().enumerate() {
                if bj < n {
                    x[bj] = t[i][n + m].clone();
                }
            }
            return LpOutcome::Optimal(t[m][n + m].clone(), x);
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][n + m] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return LpOutcome::Unbounded;
        };
        pivot(&mut t, leave, enter);
        basis[leave] = enter;
    }
}

fn pivot(t: &mut [Vec<Rat>], row: usize, col: usize) {
    let inv = t[row][col].recip();
    for x in t[row].iter_mut() {
        *x *= &inv;
    }
    for i in 0..t.len() {
        if i != row && !t[i][col].is_zero() {
            let f = t[i][col].clone();
            for j in 0..t[i].len() {
                let sub = &f * &t[row][j];
                t[i][j] -= sub;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn rank_and_rref() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0]])), 0);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[2, 1], &[1, -1]]);
        let x = solve(&a, &v(&[5, 1])).unwrap();
        assert_eq!(x, v(&[2, 1]));
        let a2 = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a2, &v(&[1, 3])), None);
    }

    #[test]
    fn nullspace_dimensions() {
        let a = m(&[&[1, 2, 3]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for b in &ns {
            assert!(dot(&a[0], b).is_zero());
        }
    }

    #[test]
    fn min_norm_picks_shortest() {
        // x + y = 2 has minimum-norm solution (1, 1).
        let a = m(&[&[1, 1]]);
        let x = min_norm_solve(&a, &v(&[2])).unwrap();
        assert_eq!(x, v(&[1, 1]));
        assert_eq!(min_norm_solve(&m(&[&[1, 1], &[2, 2]]), &v(&[1, 3])), None);
    }

    #[test]
    fn independent_subset_is_lexicographic() {
        let vecs = m(&[&[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        assert_eq!(independent_indices(&vecs), vec![0, 2]);
        assert!(in_span(&v(&[3, 5]), &vecs));
        assert!(!in_span(&v(&[1, 1, 0]), &m(&[&[1, 0, 0]])));
    }

    #[test]
    fn simplex_bounded_problem() {
        // max x + y st x <= 3, y <= 2.
        let out = simplex_max(&m(&[&[1, 0], &[0, 1]]), &v(&[3, 2]), &v(&[1, 1]));
        assert_eq!(out, LpOutcome::Optimal(rat(5, 1), v(&[3, 2])));
    }

    #[test]
    fn simplex_unbounded_problem() {
        // max x st x - y <= 1: push y, then x, forever.
        let out = simplex_max(&m(&[&[1, -1]]), &v(&[1]), &v(&[1, 0]));
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn simplex_degenerate_cone() {
        // max x + y st x + y <= 0 stays at the origin.
        let out = simplex_max(&m(&[&[1, 1]]), &v(&[0]), &v(&[1, 1]));
        match out {
            LpOutcome::Optimal(val, _) => assert!(val.is_zero()),
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
