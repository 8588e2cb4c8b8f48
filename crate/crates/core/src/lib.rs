//! Future-constraint-aided successive cancellation decoding of concatenated
//! polar codes over the binary erasure channel.

pub mod bounds;
pub mod code;
pub mod de;
pub mod decoder;
pub mod error;
pub mod fc;
pub mod gf2;
pub mod map_oracle;
pub mod scl;
pub mod search;
pub mod sim;
pub mod symbol;

pub use code::{BitRole, CodeSpec, OuterCode, ReliabilityProfile};
pub use de::{de_run, DeDecoder, DeResult, SymbolPmf};
pub use decoder::{
    build_hypothesis, check_hypothesis, processing_index, CheckOptions, Hypothesis,
    HypothesisReport,
};
pub use error::{Error, Result};
pub use fc::ConstraintCache;
pub use gf2::{BitMatrix, BitVector};
pub use scl::decode_scl;
pub use search::{decode_sc, decode_with_fc, DecodeOutcome, DecodeStatus, Engine, SearchOptions};
pub use sim::{CrcKind, DecoderKind, PointSummary, SimConfig};
pub use symbol::ErasureSymbol;
