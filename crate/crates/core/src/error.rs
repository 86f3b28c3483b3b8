use core::fmt;

/// Errors raised by the metric-measure routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// A distance matrix failed one of the metric axioms.
    InvalidMetric(&'static str),
    InvalidMeasure(&'static str),
    /// `restrict` was asked for a set whose mass is not one.
    MassNotOne {
        mass: f64,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    NonFinite,
    InvalidArgument(&'static str),
    /// The linear program or flow did not reach a certified optimum.
    SolverFailure(&'static str),
    TooLarge {
        n: usize,
        max: usize,
    },
    BadWitness,
    BadFamily,
    NotLipschitzOnSubset,
    BoundExceeded,
    Infeasible,
    NotDominated,
    MapMismatch,
    InvalidGroup(&'static str),
    NotRightInvariant,
    NotHomomorphism,
    BadElement(usize),
    InvalidAction(&'static str),
    BadPoint(usize),
    EmptySet,
    NotInvariant,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidMetric(why) => write!(f, "invalid metric: {why}"),
            Error::InvalidMeasure(why) => write!(f, "invalid measure: {why}"),
            Error::MassNotOne { mass } => write!(f, "restriction set has mass {mass}, expected 1"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for size {len}")
            }
            Error::NonFinite => f.write_str("non-finite value"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::SolverFailure(why) => write!(f, "solver failure: {why}"),
            Error::TooLarge { n, max } => write!(f, "instance of size {n} exceeds limit {max}"),
            Error::BadWitness => f.write_str("equicontinuity witness fails on the family"),
            Error::BadFamily => f.write_str("function family leaves the bounded 1-Lipschitz class"),
            Error::NotLipschitzOnSubset => f.write_str("function is not Lipschitz on the subset"),
            Error::BoundExceeded => f.write_str("function exceeds the sup-norm bound"),
            Error::Infeasible => f.write_str("requested mass exceeds one"),
            Error::NotDominated => f.write_str("first metric is not dominated by the second"),
            Error::MapMismatch => f.write_str("point map does not match the spaces"),
            Error::InvalidGroup(why) => write!(f, "invalid group: {why}"),
            Error::NotRightInvariant => f.write_str("metric is not right-invariant"),
            Error::NotHomomorphism => f.write_str("map is not a homomorphism"),
            Error::BadElement(g) => write!(f, "no group element {g}"),
            Error::InvalidAction(why) => write!(f, "invalid action: {why}"),
            Error::BadPoint(x) => write!(f, "no point {x}"),
            Error::EmptySet => f.write_str("element set is empty"),
            Error::NotInvariant => f.write_str("measure is not invariant under the action"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
