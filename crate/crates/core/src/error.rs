use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {0} exceeds the cap of {cap}", cap = crate::MAX_DEGREE)]
    DegreeCap(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("element is not a member of the group")]
    NotAMember,
    #[error("orbit exceeded the cap of {0} elements")]
    OrbitCapExceeded(usize),
    #[error("search space of {size} exceeds the cap of {cap}")]
    SpaceCapExceeded { size: String, cap: usize },
    #[error("group order exceeds the cap of {0}")]
    OrderCap(u64),
    #[error("index {index} exceeds the cap of {cap}")]
    IndexCap { index: String, cap: usize },
    #[error("no wreath structure declared for this group")]
    StructureMissing,
    #[error("group is not transitive")]
    NotTransitive,
    #[error("group is primitive")]
    IsPrimitive,
    #[error("invalid block system: {0}")]
    InvalidBlocks(String),
    #[error("not a subgroup")]
    NotSubgroup,
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("group is not solvable")]
    NotSolvable,
    #[error("matrix group is not irreducible")]
    NotIrreducible,
    #[error("stabilizer is not core-free (only one double coset)")]
    NotCoreFree,
    #[error("the designated normal subgroup lies inside the point stabilizer")]
    SocleInsideStabilizer,
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("invalid product instance: {0}")]
    InvalidInstance(String),
    #[error("property violated: {0}")]
    PropertyViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors raised because a configured resource cap was hit.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::OrbitCapExceeded(_)
                | Error::SpaceCapExceeded { .. }
                | Error::OrderCap(_)
                | Error::IndexCap { .. }
                | Error::DegreeCap(_)
        )
    }

    /// Errors that mean a claimed theorem failed on a concrete input.
    pub fn is_property_violation(&self) -> bool {
        matches!(self, Error::PropertyViolation(_) | Error::SearchExhausted(_))
    }
}
