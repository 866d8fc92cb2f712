//! Holds the `acceptance` test target, which runs after the other workspace
//! tests so that a failing criterion does not hide their results.
