pub mod ordinal;
pub mod pairgen;
pub mod schreier;
pub mod seqspace;

pub use ordinal::{FamilyIndex, Ordinal, OrdinalError};
pub use pairgen::{
    build_pair, validate_pair, AlternatingPair, BuildOptions, PairError, TailRule, Which,
};
pub use schreier::{FiniteSet, Schreier, SchreierError};
pub use seqspace::{CoeffVector, Precision, SeqError, SummingVector, WeightSpec};
pub mod dominate;
pub use dominate::{
    counterexample_report, domination_constant, singular_witnesses, CounterexampleReport,
    DominateError, DominationReport, Method, NormDescriptor, SingularWitness, Verdict,
};
