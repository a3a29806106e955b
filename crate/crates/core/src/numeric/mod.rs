//! Exact rationals, roots of unity, vanishing-sum tests and small dense
//! complex matrices.

mod cyclotomic;
mod matrix;
mod rational;

pub use cyclotomic::{
    character_sum_vanishes, exp_sum, exp_sum_of, unit_root, Cyclotomic, ExactSum, ExpSum,
    RootOfUnity,
};
pub use matrix::{
    is_unitary, AnyMatrix, ComplexMatrix, Mode, RootTable, UnitaryMatrix, DEFAULT_TOL,
};
pub use rational::{
    exponent_mod, factorize, format_rational, frac_mod1, lcm_denominators, mod_inverse,
    parse_rational, rational_gcd, valuation, Rational,
};
