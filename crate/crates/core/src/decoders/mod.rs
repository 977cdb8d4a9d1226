//! The two decoders: erasure burst filling and change-point segmentation.

pub mod changepoint;
pub mod clean;

pub use changepoint::{
    changepoint_decode, error_budget, map_views, shiryaev_detect, ChangePointModel,
    ChangePointParams, Detection, ErrorBudget,
};
pub use clean::{
    erasure_clean_decode, erasure_clean_decode_with_length, CleanDecodeResult, CleanDecoder,
};
