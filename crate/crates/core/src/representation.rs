//! Integral spans, completeness decisions and representation solving.
//!
//! The set of terminal values of stochastic integrals against a process
//! family is a linear subspace generated by elementary integrands (one
//! block of the earlier partition, one time step, one integrator).
//! Representability of a terminal variable is a consistency question for
//! that generator system; completeness asks whether the span plus
//! constants is everything. Spans are computed over the plain real span
//! of terminal values — representability does not depend on the
//! (full-support) measure — while orthogonality statements use the
//! measure-weighted inner product.

use crate::calculus::{
    are_independent, doob_decomposition, doleans_exponential, is_strongly_orthogonal,
    jump_condition, quadratic_covariation, structure_alpha,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{
    find_equivalent_mm, is_unique_emm, martingale_polytope, measure_from_density,
    minimal_mm_check, product_density_measure,
};
use crate::rational::Rat;
use crate::space::{
    is_adapted, is_martingale, is_trivial, natural_filtration, Filtration, FiniteFilteredSpace,
    Integrand, Measure, Process, RandomVariable,
};
use num_traits::{One, Zero};

/// A basis of terminal integral values: each vector is the terminal value
/// of a stochastic integral against one of the registered integrators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanBasis {
    basis_vectors: Vec<RandomVariable>,
    dimension: usize,
}

impl SpanBasis {
    pub fn basis_vectors(&self) -> &[RandomVariable] {
        &self.basis_vectors
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Identifies an elementary generator: integrator index, time step,
/// block index of the partition at `t - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GeneratorTag {
    integrator: usize,
    time: usize,
    block: usize,
}

/// Terminal values `1_B(w) * dX_t(w)` of the elementary integrals, with
/// their tags, in (integrator, time, block) order.
fn elementary_generators(
    integrators: &[&Process],
    filtration: &Filtration,
) -> (Vec<Vec<Rat>>, Vec<GeneratorTag>) {
    let n = filtration.outcome_count();
    let mut vectors = Vec::new();
    let mut tags = Vec::new();
    for (j, x) in integrators.iter().enumerate() {
        for t in 1..=filtration.horizon() {
            for (b, block) in filtration.at(t - 1).blocks().iter().enumerate() {
                let mut v = vec![Rat::zero(); n];
                for &i in block {
                    v[i] = x.increment(i, t);
                }
                vectors.push(v);
                tags.push(GeneratorTag { integrator: j, time: t, block: b });
            }
        }
    }
    (vectors, tags)
}

fn check_integrators(
    integrators: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<()> {
    if filtration.outcome_count() != space.outcome_count()
        || filtration.horizon() != space.horizon()
    {
        return Err(Error::DimensionMismatch("filtration does not match the space".into()));
    }
    for x in integrators {
        if !is_adapted(x, filtration)? {
            return Err(Error::NotAdapted);
        }
    }
    Ok(())
}

/// Basis of `{ sum_j (xi_j . X_j)_T : xi_j predictable }`, reduced by
/// exact elimination from the elementary generators.
pub fn integral_span(
    integrators: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
) -> Result<SpanBasis> {
    check_integrators(integrators, filtration, space)?;
    let (vectors, _) = elementary_generators(integrators, filtration);
    let kept = linalg::independent_indices(&vectors);
    let basis_vectors: Vec<RandomVariable> = kept
        .into_iter()
        .map(|i| RandomVariable::new(vectors[i].clone()))
        .collect();
    let dimension = basis_vectors.len();
    Ok(SpanBasis { basis_vectors, dimension })
}

/// Completeness: the span of integrals together with the constants is the
/// whole outcome space and the initial σ-algebra is trivial under the
/// measure.
pub fn is_complete(
    integrators: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<bool> {
    check_integrators(integrators, filtration, space)?;
    if !is_trivial(filtration.at(0), measure) {
        return Ok(false);
    }
    let n = space.outcome_count();
    let (mut vectors, _) = elementary_generators(integrators, filtration);
    vectors.push(vec![Rat::one(); n]);
    Ok(linalg::rank(&vectors) == n)
}

/// The representation property seen from `q`: restricted to the support
/// of `q`, the span of integrals plus constants covers every terminal
/// variable class. For an equivalent `q` this coincides with the
/// unrestricted span test.
pub fn prp_under(
    integrators: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
    q: &Measure,
) -> Result<bool> {
    check_integrators(integrators, filtration, space)?;
    if q.len() != space.outcome_count() {
        return Err(Error::DimensionMismatch("measure does not match the space".into()));
    }
    let support = q.support();
    let (vectors, _) = elementary_generators(integrators, filtration);
    let mut restricted: Vec<Vec<Rat>> = vectors
        .iter()
        .map(|v| support.iter().map(|&i| v[i].clone()).collect())
        .collect();
    restricted.push(vec![Rat::one(); support.len()]);
    Ok(linalg::rank(&restricted) == support.len())
}

/// Outcome of an exact representation solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationResult {
    /// The constant term of the representation.
    pub constant: Rat,
    /// One integrand per integrator, in input order.
    pub integrands: Vec<Integrand>,
    /// `constant + sum_j (integrand_j . X_j)_T`, pointwise.
    pub reconstruction: RandomVariable,
    /// `target - reconstruction`; the representation exists iff this is
    /// identically zero.
    pub residual: RandomVariable,
    /// True when the elementary-coordinate system is nonsingular, which
    /// makes the integrands the unique solution.
    pub integrands_unique: bool,
}

/// Projects `h` onto `constant + span` in the measure-weighted inner
/// product and solves for integrands with minimum-norm coefficients in
/// elementary coordinates (the canonical tie-break when the system is
/// underdetermined).
///
/// The residual is measure-orthogonal to every span vector and vanishes
/// exactly when `h` is representable; in that case the reconstruction
/// equals `h` at every outcome.
pub fn represent(
    h: &RandomVariable,
    integrators: &[&Process],
    filtration: &Filtration,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<RepresentationResult> {
    check_integrators(integrators, filtration, space)?;
    let n = space.outcome_count();
    if h.len() != n || measure.len() != n {
        return Err(Error::DimensionMismatch(
            "target and measure must match the space".into(),
        ));
    }
    let (gen_vectors, tags) = elementary_generators(integrators, filtration);
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(gen_vectors.len() + 1);
    columns.push(vec![Rat::one(); n]);
    columns.extend(gen_vectors);

    // Measure-weighted projection onto the column span.
    let basis_idx = linalg::independent_indices(&columns);
    let k = basis_idx.len();
    let mut gram = vec![vec![Rat::zero(); k]; k];
    let mut rhs = vec![Rat::zero(); k];
    for (a, &ia) in basis_idx.iter().enumerate() {
        for (b, &ib) in basis_idx.iter().enumerate().skip(a) {
            let g: Rat = (0..n)
                .map(|i| measure.weight(i) * &columns[ia][i] * &columns[ib][i])
                .sum();
            gram[a][b] = g.clone();
            gram[b][a] = g;
        }
        rhs[a] = (0..n).map(|i| measure.weight(i) * &columns[ia][i] * h.value(i)).sum();
    }
    let beta = linalg::solve(&gram, &rhs).expect("normal equations are consistent");
    let projection: Vec<Rat> = (0..n)
        .map(|i| basis_idx.iter().zip(&beta).map(|(&ia, b)| b * &columns[ia][i]).sum())
        .collect();
    let residual =
        RandomVariable::new((0..n).map(|i| h.value(i) - &projection[i]).collect());

    // Minimum-norm coefficients over the full elementary system.
    let rows: Vec<Vec<Rat>> =
        (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let coeffs = linalg::min_norm_solve(&rows, &projection)
        .expect("projection lies in the column span");
    let horizon = space.horizon();
    let mut integrands = vec![Integrand::zero(n, horizon); integrators.len()];
    for (tag, c) in tags.iter().zip(&coeffs[1..]) {
        if c.is_zero() {
            continue;
        }
        for &i in &filtration.at(tag.time - 1).blocks()[tag.block] {
            integrands[tag.integrator].set(i, tag.time, c.clone());
        }
    }
    let integrands_unique = linalg::rank(&rows) == columns.len();
    Ok(RepresentationResult {
        constant: coeffs[0].clone(),
        integrands,
        reconstruction: RandomVariable::new(projection),
        residual,
        integrands_unique,
    })
}

/// When the process has a unique martingale measure on the σ-algebra its
/// own filtration generates, returns that measure's density against the
/// given reference measure, as a terminal-measurable variable. `None`
/// when the measure is not unique (or none exists).
fn marginal_emm_density(
    proc: &Process,
    f: &Filtration,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<Option<RandomVariable>> {
    if !measure.has_full_support() {
        return Err(Error::NotEquivalent);
    }
    let (qspace, qprocs) = space.quotient(f, &[proc])?;
    let poly = martingale_polytope(&[&qprocs[0]], qspace.filtration(), &qspace)?;
    if !is_unique_emm(&poly) {
        return Ok(None);
    }
    let q = find_equivalent_mm(&poly).expect("a unique martingale measure is strictly positive");
    let mut density = vec![Rat::zero(); space.outcome_count()];
    for (a, block) in f.terminal().blocks().iter().enumerate() {
        let value = q.weight(a) / measure.mass_of(block);
        for &i in block {
            density[i] = value.clone();
        }
    }
    Ok(Some(RandomVariable::new(density)))
}

/// True when the reference measure itself is the unique martingale
/// measure for the process on its own filtration (its density is
/// identically one).
fn reference_is_unique_marginal_emm(
    proc: &Process,
    f: &Filtration,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<bool> {
    Ok(match marginal_emm_density(proc, f, space, measure)? {
        Some(density) => density.values().iter().all(|x| x.is_one()),
        None => false,
    })
}

/// Three-way orthogonal decomposition of the centered terminal space into
/// the integral spans of two strongly orthogonal martingales and their
/// covariation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalDecompositionReport {
    pub dim_first: usize,
    pub dim_second: usize,
    pub dim_bracket: usize,
    /// Dimension of the terminal σ-algebra's function space.
    pub terminal_dimension: usize,
    pub spans_pairwise_orthogonal: bool,
    pub spans_centered: bool,
    pub direct_sum_is_everything: bool,
    pub bracket_orthogonal_to_first: bool,
    pub bracket_orthogonal_to_second: bool,
    pub pass: bool,
}

/// Verifies the hypotheses (each martingale has the representation
/// property for its own filtration with the base measure as unique
/// martingale measure; the pair is strongly orthogonal under the join)
/// and then checks the three-way orthogonal decomposition.
pub fn orthogonal_decomposition_report(
    m: &Process,
    n_proc: &Process,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<OrthogonalDecompositionReport> {
    let fm = natural_filtration(&[m], space)?;
    let fn_ = natural_filtration(&[n_proc], space)?;
    let g = fm.join_with(&fn_)?;
    for (proc, f, name) in [(m, &fm, "first"), (n_proc, &fn_, "second")] {
        if !is_martingale(proc, &g, measure)? {
            return Err(Error::HypothesisViolated(format!(
                "{name} process is not a martingale for the join filtration"
            )));
        }
        if !reference_is_unique_marginal_emm(proc, f, space, measure)? {
            return Err(Error::HypothesisViolated(format!(
                "the reference measure is not the unique martingale measure for the {name} \
                 process on its own filtration"
            )));
        }
    }
    if !is_strongly_orthogonal(m, n_proc, &g, measure)? {
        return Err(Error::HypothesisViolated(
            "the martingales are not strongly orthogonal under the join".into(),
        ));
    }
    let bracket = quadratic_covariation(m, n_proc)?;
    let span_m = integral_span(&[m], &g, space)?;
    let span_n = integral_span(&[n_proc], &g, space)?;
    let span_b = integral_span(&[&bracket], &g, space)?;
    let weighted = |u: &RandomVariable, v: &RandomVariable| -> Rat {
        (0..space.outcome_count())
            .map(|i| measure.weight(i) * u.value(i) * v.value(i))
            .sum()
    };
    let mut orthogonal = true;
    for (sa, sb) in [(&span_m, &span_n), (&span_m, &span_b), (&span_n, &span_b)] {
        for u in sa.basis_vectors() {
            for v in sb.basis_vectors() {
                if !weighted(u, v).is_zero() {
                    orthogonal = false;
                }
            }
        }
    }
    let ones = RandomVariable::constant(space.outcome_count(), Rat::one());
    let centered = [&span_m, &span_n, &span_b].iter().all(|s| {
        s.basis_vectors().iter().all(|v| weighted(v, &ones).is_zero())
    });
    let terminal_dimension = g.terminal().block_count();
    let dims_fill = span_m.dimension() + span_n.dimension() + span_b.dimension() + 1
        == terminal_dimension;
    let bracket_orth_m = is_strongly_orthogonal(&bracket, m, &g, measure)?;
    let bracket_orth_n = is_strongly_orthogonal(&bracket, n_proc, &g, measure)?;
    let direct_sum_is_everything = orthogonal && centered && dims_fill;
    let pass =
        direct_sum_is_everything && bracket_orth_m && bracket_orth_n;
    Ok(OrthogonalDecompositionReport {
        dim_first: span_m.dimension(),
        dim_second: span_n.dimension(),
        dim_bracket: span_b.dimension(),
        terminal_dimension,
        spans_pairwise_orthogonal: orthogonal,
        spans_centered: centered,
        direct_sum_is_everything,
        bracket_orthogonal_to_first: bracket_orth_m,
        bracket_orthogonal_to_second: bracket_orth_n,
        pass,
    })
}

/// The vanishing-covariation biconditional: `[X,Y]` is identically zero
/// iff the pair is complete for its joint natural filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovariationVanishingReport {
    pub covariation_vanishes: bool,
    pub pair_complete: bool,
    pub biconditional_holds: bool,
}

/// Checks the semimartingale-pair hypotheses (unique marginal martingale
/// measures, jump conditions, strong orthogonality of the martingale
/// parts under the join) and evaluates the biconditional.
pub fn covariation_vanishing_report(
    x: &Process,
    y: &Process,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<CovariationVanishingReport> {
    let (_, _, g) = checked_pair_hypotheses(x, y, space, measure)?;
    let bracket = quadratic_covariation(x, y)?;
    let covariation_vanishes = bracket.is_identically_zero();
    let pair_complete = is_complete(&[x, y], &g, space, measure)?;
    Ok(CovariationVanishingReport {
        covariation_vanishes,
        pair_complete,
        biconditional_holds: covariation_vanishes == pair_complete,
    })
}

/// Inheritance of the representation property by the martingale part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrpInheritanceReport {
    /// The density measure built from the Doléans exponential.
    pub doleans_measure: Measure,
    pub martingale_part_complete: bool,
    pub minimal_measure_ok: bool,
    /// The Doléans measure coincides with the unique martingale measure
    /// lifted from the process's own σ-algebra.
    pub doleans_matches_unique_emm: bool,
    pub pass: bool,
}

/// Under a unique marginal martingale measure and the jump condition,
/// the martingale part of `x` inherits the representation property for
/// the natural filtration of `x`; the Doléans measure is the minimal
/// martingale measure used along the way.
pub fn prp_inheritance_report(
    x: &Process,
    space: &FiniteFilteredSpace,
) -> Result<PrpInheritanceReport> {
    let measure = space.measure();
    let fx = natural_filtration(&[x], space)?;
    let Some(marginal_density) = marginal_emm_density(x, &fx, space, measure)? else {
        return Err(Error::HypothesisViolated(
            "no unique equivalent martingale measure on the process's own filtration".into(),
        ));
    };
    let px = measure_from_density(measure, &marginal_density)?;
    let dec = doob_decomposition(x, &fx, measure)?;
    let structure = structure_alpha(&dec, &fx, measure)?;
    let m = &dec.martingale_part;
    if !jump_condition(&structure.alpha, m) {
        return Err(Error::HypothesisViolated("jump condition fails".into()));
    }
    let l = doleans_exponential(&structure.alpha, m)?;
    let doleans_measure = measure_from_density(measure, &l.terminal())?;
    let martingale_part_complete = is_complete(&[m], &fx, space, measure)?;
    let minimal_measure_ok = minimal_mm_check(&doleans_measure, m, &fx, space)?;
    let doleans_matches_unique_emm = doleans_measure == px;
    let pass = martingale_part_complete && minimal_measure_ok && doleans_matches_unique_emm;
    Ok(PrpInheritanceReport {
        doleans_measure,
        martingale_part_complete,
        minimal_measure_ok,
        doleans_matches_unique_emm,
        pass,
    })
}

/// The triplet representation: under the product measure the pair becomes
/// independent martingales, and both the semimartingale triplet
/// `(X, Y, [X,Y])` and the martingale triplet `(M, N, [M,N])` span every
/// terminal variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletRepresentationReport {
    pub product_measure: Measure,
    pub x_martingale_under_q: bool,
    pub y_martingale_under_q: bool,
    pub independent_under_q: bool,
    /// Zero residual for every terminal basis element against
    /// `(X, Y, [X,Y])` with a constant term.
    pub semimartingale_representation_complete: bool,
    /// Zero residual for every terminal basis element against
    /// `(M, N, [M,N])` with a constant term.
    pub martingale_representation_complete: bool,
    pub semimartingale_integrands_unique: bool,
    pub martingale_integrands_unique: bool,
    pub pass: bool,
}

/// Verifies the pair hypotheses and evaluates the triplet representation
/// under the join filtration.
pub fn triplet_representation_report(
    x: &Process,
    y: &Process,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<TripletRepresentationReport> {
    let (lx, ly, g) = checked_pair_hypotheses(x, y, space, measure)?;
    let fx = natural_filtration(&[x], space)?;
    let fy = natural_filtration(&[y], space)?;
    let n = space.outcome_count();
    let q = product_density_measure(measure, &lx, fx.terminal(), &ly, fy.terminal())?;
    let x_martingale_under_q = is_martingale(x, &g, &q)?;
    let y_martingale_under_q = is_martingale(y, &g, &q)?;
    let independent_under_q = are_independent(&fx, &fy, &q)?;

    let bracket_xy = quadratic_covariation(x, y)?;
    let dec_x = doob_decomposition(x, &fx, measure)?;
    let dec_y = doob_decomposition(y, &fy, measure)?;
    let m = &dec_x.martingale_part;
    let n_mart = &dec_y.martingale_part;
    let bracket_mn = quadratic_covariation(m, n_mart)?;

    let basis: Vec<RandomVariable> = g
        .terminal()
        .blocks()
        .iter()
        .map(|b| RandomVariable::indicator(n, b))
        .collect();
    let mut semi_complete = true;
    let mut semi_unique = true;
    for h in &basis {
        let r = represent(h, &[x, y, &bracket_xy], &g, space, measure)?;
        semi_complete &= r.residual.is_zero();
        semi_unique &= r.integrands_unique;
    }
    let mut mart_complete = true;
    let mut mart_unique = true;
    for h in &basis {
        let r = represent(h, &[m, n_mart, &bracket_mn], &g, space, measure)?;
        mart_complete &= r.residual.is_zero();
        mart_unique &= r.integrands_unique;
    }
    let pass = x_martingale_under_q
        && y_martingale_under_q
        && independent_under_q
        && semi_complete
        && mart_complete;
    Ok(TripletRepresentationReport {
        product_measure: q,
        x_martingale_under_q,
        y_martingale_under_q,
        independent_under_q,
        semimartingale_representation_complete: semi_complete,
        martingale_representation_complete: mart_complete,
        semimartingale_integrands_unique: semi_unique,
        martingale_integrands_unique: mart_unique,
        pass,
    })
}

/// Common hypothesis block for the pair theorems: unique marginal
/// martingale measures for both processes, jump conditions for both
/// structure integrands, strongly orthogonal martingale parts under the
/// join. Returns the marginal measure densities (against the reference
/// measure) and the join filtration.
fn checked_pair_hypotheses(
    x: &Process,
    y: &Process,
    space: &FiniteFilteredSpace,
    measure: &Measure,
) -> Result<(RandomVariable, RandomVariable, Filtration)> {
    if x == y {
        return Err(Error::HypothesisViolated(
            "the two processes coincide, so the martingale parts cannot be strongly \
             orthogonal"
                .into(),
        ));
    }
    let fx = natural_filtration(&[x], space)?;
    let fy = natural_filtration(&[y], space)?;
    let g = fx.join_with(&fy)?;
    let mut densities = Vec::with_capacity(2);
    for (proc, f, name) in [(x, &fx, "first"), (y, &fy, "second")] {
        let Some(density) = marginal_emm_density(proc, f, space, measure)? else {
            return Err(Error::HypothesisViolated(format!(
                "no unique equivalent martingale measure for the {name} process on its own \
                 filtration"
            )));
        };
        let dec = doob_decomposition(proc, f, measure)?;
        let structure = structure_alpha(&dec, f, measure)?;
        if !jump_condition(&structure.alpha, &dec.martingale_part) {
            return Err(Error::HypothesisViolated(format!(
                "jump condition fails for the {name} process"
            )));
        }
        densities.push(density);
    }
    let dec_x = doob_decomposition(x, &fx, measure)?;
    let dec_y = doob_decomposition(y, &fy, measure)?;
    match is_strongly_orthogonal(&dec_x.martingale_part, &dec_y.martingale_part, &g, measure) {
        Ok(true) => {}
        Ok(false) => {
            return Err(Error::HypothesisViolated(
                "the martingale parts are not strongly orthogonal under the join".into(),
            ))
        }
        Err(Error::NotMartingale) => {
            return Err(Error::HypothesisViolated(
                "a martingale part is not a martingale for the join filtration".into(),
            ))
        }
        Err(e) => return Err(e),
    }
    let ly = densities.pop().expect("two densities");
    let lx = densities.pop().expect("two densities");
    Ok((lx, ly, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::space::Partition;
    use crate::testutil::*;

    #[test]
    fn span_of_constant_integrator_is_zero_dimensional() {
        let space = bin_space(rat(1, 2), rat(1, 2));
        let c = Process::constant(2, 1, rat(3, 1));
        let span = integral_span(&[&c], space.filtration(), &space).unwrap();
        assert_eq!(span.dimension(), 0);
    }

    #[test]
    fn span_of_bin_is_the_increment_direction() {
        let space = bin_space(rat(1, 2), rat(1, 2));
        let x = bin_process();
        let span = integral_span(&[&x], space.filtration(), &space).unwrap();
        assert_eq!(span.dimension(), 1);
        assert_eq!(
            span.basis_vectors()[0],
            RandomVariable::new(vec![rat(1, 1), rat(-1, 2)])
        );
    }

    #[test]
    fn span_of_coin2_triplet_is_full() {
        let space = coin2_space();
        let (m, n) = coin2_processes();
        let bracket = quadratic_covariation(&m, &n).unwrap();
        let span =
            integral_span(&[&m, &n, &bracket], space.filtration(), &space).unwrap();
        assert_eq!(span.dimension(), 3);
        let pair_span = integral_span(&[&m, &n], space.filtration(), &space).unwrap();
        assert_eq!(pair_span.dimension(), 2);
    }

    #[test]
    fn completeness_verdicts() {
        let space = bin_space(rat(1, 2), rat(1, 2));
        let x = bin_process();
        assert!(is_complete(&[&x], space.filtration(), &space, space.measure()).unwrap());

        let (tri_space, tri_x) = tri_model();
        assert!(!is_complete(&[&tri_x], tri_space.filtration(), &tri_space, tri_space.measure())
            .unwrap());

        let coin2 = coin2_space();
        let (m, n) = coin2_processes();
        let bracket = quadratic_covariation(&m, &n).unwrap();
        assert!(is_complete(
            &[&m, &n, &bracket],
            coin2.filtration(),
            &coin2,
            coin2.measure()
        )
        .unwrap());
        assert!(
            !is_complete(&[&m, &n], coin2.filtration(), &coin2, coin2.measure()).unwrap()
        );
    }

    #[test]
    fn representation_of_terminal_value_in_bin() {
        let space = bin_space(rat(1, 2), rat(1, 2));
        let x = bin_process();
        let h = x.terminal();
        let r = represent(&h, &[&x], space.filtration(), &space, space.measure()).unwrap();
        assert!(r.residual.is_zero());
        assert_eq!(r.constant, rat(1, 1));
        assert_eq!(r.integrands[0].at(0, 1), &rat(1, 1));
        assert_eq!(r.integrands[0].at(1, 1), &rat(1, 1));
        assert_eq!(r.reconstruction, h);
        assert!(r.integrands_unique);
    }

    #[test]
    fn orthogonal_direction_is_not_representable_by_the_pair() {
        let space = coin2_space();
        let (m, n) = coin2_processes();
        let h = RandomVariable::new(
            (0..4).map(|i| m.increment(i, 1) * n.increment(i, 1)).collect(),
        );
        let r = represent(&h, &[&m, &n], space.filtration(), &space, space.measure()).unwrap();
        assert!(!r.residual.is_zero());
        // The residual is measure-orthogonal to the span.
        let span = integral_span(&[&m, &n], space.filtration(), &space).unwrap();
        for v in span.basis_vectors() {
            let pairing: Rat = (0..4)
                .map(|i| space.measure().weight(i) * v.value(i) * r.residual.value(i))
                .sum();
            assert!(pairing.is_zero());
        }

        let bracket = quadratic_covariation(&m, &n).unwrap();
        let full = represent(
            &h,
            &[&m, &n, &bracket],
            space.filtration(),
            &space,
            space.measure(),
        )
        .unwrap();
        assert!(full.residual.is_zero());
        assert_eq!(full.constant, rat(0, 1));
        assert_eq!(full.integrands[0].at(0, 1), &rat(0, 1));
        assert_eq!(full.integrands[1].at(0, 1), &rat(0, 1));
        assert_eq!(full.integrands[2].at(0, 1), &rat(1, 1));
    }

    #[test]
    fn orthogonal_decomposition_on_coin2() {
        let space = coin2_space();
        let (m, n) = coin2_processes();
        let report =
            orthogonal_decomposition_report(&m, &n, &space, space.measure()).unwrap();
        assert!(report.pass);
        assert_eq!(
            (report.dim_first, report.dim_second, report.dim_bracket),
            (1, 1, 1)
        );
        assert_eq!(report.terminal_dimension, 4);
    }

    #[test]
    fn orthogonal_decomposition_on_two_step_coins() {
        // Two independent +/-1 coins at each of two steps: 16 outcomes.
        let n_outcomes = 16;
        let mut outcomes = Vec::new();
        let mut m_rows = Vec::new();
        let mut n_rows = Vec::new();
        for a in [1i64, -1] {
            for b in [1i64, -1] {
                for c in [1i64, -1] {
                    for d in [1i64, -1] {
                        outcomes.push(format!("{a}{b}{c}{d}"));
                        m_rows.push(vec![rat(0, 1), rat(a, 1), rat(a + b, 1)]);
                        n_rows.push(vec![rat(0, 1), rat(c, 1), rat(c + d, 1)]);
                    }
                }
            }
        }
        let m = Process::new(m_rows).unwrap();
        let n = Process::new(n_rows).unwrap();
        let keys1: Vec<(Rat, Rat)> = (0..n_outcomes)
            .map(|i| (m.value(i, 1).clone(), n.value(i, 1).clone()))
            .collect();
        let space = FiniteFilteredSpace::new(
            outcomes,
            vec![rat(1, 16); 16],
            vec![
                Partition::trivial(16),
                Partition::from_keys(&keys1),
                Partition::discrete(16),
            ],
            2,
        )
        .unwrap();
        let report =
            orthogonal_decomposition_report(&m, &n, &space, space.measure()).unwrap();
        assert!(report.pass, "report: {report:?}");
        assert_eq!(
            report.dim_first + report.dim_second + report.dim_bracket + 1,
            16
        );
    }

    #[test]
    fn orthogonal_decomposition_rejects_equal_martingales() {
        let space = coin2_space();
        let (m, _) = coin2_processes();
        let err = orthogonal_decomposition_report(&m, &m, &space, space.measure()).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)));
    }

    #[test]
    fn covariation_biconditional_on_coin2() {
        let space = coin2_space();
        let (m, n) = coin2_processes();
        let report = covariation_vanishing_report(&m, &n, &space, space.measure()).unwrap();
        assert!(!report.covariation_vanishes);
        assert!(!report.pair_complete);
        assert!(report.biconditional_holds);
    }

    #[test]
    fn covariation_biconditional_with_staggered_jumps() {
        // M moves only on step 1, N only on step 2: the product of the
        // increments vanishes pathwise and the pair is complete.
        let m = Process::new(vec![
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
            vec![rat(0, 1), rat(-1, 1), rat(-1, 1)],
            vec![rat(0, 1), rat(-1, 1), rat(-1, 1)],
        ])
        .unwrap();
        let n = Process::new(vec![
            vec![rat(0, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
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
        let report = covariation_vanishing_report(&m, &n, &space, space.measure()).unwrap();
        assert!(report.covariation_vanishes);
        assert!(report.pair_complete);
        assert!(report.biconditional_holds);
    }

    #[test]
    fn covariation_biconditional_with_constant_first_process() {
        // A constant first process contributes nothing: the covariation
        // vanishes and pair completeness reduces to completeness of the
        // second process alone.
        let (space, y) = bin_drift();
        let x = Process::constant(2, 1, rat(1, 1));
        let report = covariation_vanishing_report(&x, &y, &space, space.measure()).unwrap();
        assert!(report.covariation_vanishes);
        assert!(report.pair_complete);
        assert!(report.biconditional_holds);
    }

    #[test]
    fn prp_inheritance_on_bin_drift() {
        let (space, x) = bin_drift();
        let report = prp_inheritance_report(&x, &space).unwrap();
        assert!(report.pass);
        assert!(report.martingale_part_complete);
        assert!(report.minimal_measure_ok);
        assert!(report.doleans_matches_unique_emm);
        assert_eq!(report.doleans_measure.weights(), &[rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn prp_inheritance_trivial_for_martingale_input() {
        let space = bin_space(rat(1, 3), rat(2, 3));
        let x = bin_process();
        // Rebuild the space with X's natural filtration (same here).
        let report = prp_inheritance_report(&x, &space).unwrap();
        assert!(report.pass);
        assert_eq!(&report.doleans_measure, space.measure());
    }

    #[test]
    fn prp_inheritance_rejects_non_unique_emm() {
        let (space, x) = tri_model();
        // Add drift so the decomposition is nontrivial; the polytope is
        // still a segment.
        let drifted = Process::new(
            (0..3)
                .map(|i| vec![x.value(i, 0).clone(), x.value(i, 1) + rat(1, 10)])
                .collect(),
        )
        .unwrap();
        let err = prp_inheritance_report(&drifted, &space).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)));
    }

    #[test]
    fn triplet_representation_on_prod2() {
        let (space, x, y) = prod2_model();
        let report =
            triplet_representation_report(&x, &y, &space, space.measure()).unwrap();
        assert!(report.pass, "report: {report:?}");
        assert_eq!(
            report.product_measure.weights(),
            &[rat(1, 9), rat(2, 9), rat(2, 9), rat(4, 9)]
        );
        assert!(report.semimartingale_integrands_unique);
        assert!(report.martingale_integrands_unique);
    }

    #[test]
    fn triplet_representation_rejects_equal_inputs() {
        let (space, x, _) = prod2_model();
        let err =
            triplet_representation_report(&x, &x, &space, space.measure()).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)));
    }

    #[test]
    fn span_monotonicity() {
        let space = coin2_space();
        let (m, n) = coin2_processes();
        let d1 = integral_span(&[&m], space.filtration(), &space).unwrap().dimension();
        let d2 = integral_span(&[&m, &n], space.filtration(), &space).unwrap().dimension();
        assert!(d2 >= d1);
    }

    #[test]
    fn prp_under_restricts_to_the_support() {
        let (space, x) = tri_model();
        // Full support: incomplete.
        assert!(!prp_under(&[&x], space.filtration(), &space, space.measure()).unwrap());
        // On the support of the middle-outcome vertex the span plus
        // constants is everything.
        let vertex = Measure::new(vec![rat(0, 1), rat(1, 1), rat(0, 1)]).unwrap();
        assert!(prp_under(&[&x], space.filtration(), &space, &vertex).unwrap());
    }
}
