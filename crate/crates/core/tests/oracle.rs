use eqsearch::derivatives::DerivativeSpec;
use eqsearch::harness::{brute_force_oracle, equation_count, ORACLE_BUDGET};
use eqsearch::regression::DEFAULT_LAMBDA;
use eqsearch::representation::TokenPool;
use eqsearch::synthetic::{BenchmarkCase, BenchmarkName};
use eqsearch::Error;

fn burgers_table() -> eqsearch::derivatives::DerivativeTable {
    BenchmarkCase::generate(BenchmarkName::Burgers, 101, 101)
        .unwrap()
        .table(true)
        .unwrap()
}

#[test]
fn burgers_structure_is_the_minimum() {
    let pool = TokenPool::parse("u,du/dt,du/dx,d2u/dx2;factors=2;terms=3").unwrap();
    let r = brute_force_oracle(&burgers_table(), &pool, DEFAULT_LAMBDA).unwrap();
    assert_eq!(r.best.canonical(), "du/dt + u*du/dx = 0");
    assert_eq!(r.terms, 14);
    assert_eq!(r.enumerated, equation_count(14, 3));
}

#[test]
fn pool_without_the_advection_factor_cannot_fit() {
    let pool = TokenPool::parse("u,du/dt,d2u/dx2;factors=2;terms=3").unwrap();
    let r = brute_force_oracle(&burgers_table(), &pool, DEFAULT_LAMBDA).unwrap();
    assert!(r.best.q_op() > 1e-3, "{}: {:.3e}", r.best.canonical(), r.best.q_op());
}

#[test]
fn candidate_term_count() {
    let pool = TokenPool::from_derivatives(&[
        DerivativeSpec::FIELD,
        DerivativeSpec::t(1),
        DerivativeSpec::x(1),
        DerivativeSpec::x(2),
    ])
    .with_caps(2, 3);
    // singletons, unordered pairs, squares
    assert_eq!(pool.enumerate_terms().len(), 4 + 6 + 4);
}

#[test]
fn oversized_enumeration_names_the_count() {
    let pool = TokenPool::parse("u,du/dt,du/dx,d2u/dx2,d2u/dt2;factors=3;terms=6").unwrap();
    let n = pool.enumerate_terms().len();
    let count = equation_count(n, 6);
    assert!(count > ORACLE_BUDGET);
    let err = brute_force_oracle(&burgers_table(), &pool, DEFAULT_LAMBDA).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { count: c, .. } if c == count));
    assert!(err.to_string().contains(&count.to_string()));
}
