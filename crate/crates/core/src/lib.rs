pub mod error;
pub mod channels;
pub mod concat;
pub mod condensers;
pub mod decoders;
pub mod ensembles;
pub mod field;
pub mod gf2;
pub mod harness;
pub mod probability;

pub use channels::{Channel, ErasureDistribution, RngStream};
pub use concat::{ConcatenatedCode, ReedSolomonCode};
pub use condensers::{AffineSource, CondenserKind, LinearCondenser};
pub use ensembles::{CodeEnsemble, EnsembleKind, LinearCode, RankRepair};
pub use decoders::{DecodeOutcome, DecodeStatus};
pub use error::{Error, Result};
pub use field::{ExtField, FieldPoly};
pub use gf2::{BitMatrix, BitVec};
pub use probability::{FiniteDistribution, FlatDistribution};
