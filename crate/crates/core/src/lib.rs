//! Capacity bounds, trace simulation and decoders for the noisy nanopore
//! channel: a de Bruijn Markov source of tau-mers, random duplication of each
//! tau-mer, and a discrete memoryless channel on the duplicated sequence.
//!
//! The pipeline, module by module:
//!
//! - [`alphabet`]: tau-mer codes, the shift map, run decomposition.
//! - [`spectral`] and [`source`]: Perron roots, noiseless capacities, de Bruijn
//!   kernels, stationary laws and sampling.
//! - [`duplication`]: duplication laws and the run-length entropy functionals.
//! - [`dmc`]: erasure, symmetric and general channels with their overlap and
//!   divergence functionals.
//! - [`bounds`]: lower and upper capacity bounds, each tagged with its unit.
//! - [`simulate`]: reproducible end-to-end traces.
//! - [`decoders`]: erasure burst filling and change-point segmentation.
//! - [`harness`]: sweeps, Monte Carlo estimates and the `nnc` command line.
//!
//! Each capability has a runnable example under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `capacity_table` | no-loop capacities for q = 2..4, tau = 1..6 |
//! | `stationary_source` | entropy rate in each unit, run counts, sampling |
//! | `conditional_entropy` | exact run-length entropy against the closed forms |
//! | `channel_capacity` | Blahut-Arimoto, overlaps, divergences |
//! | `bounds_report` | every bound for one configuration, with diagnostics |
//! | `erasure_bounds_sweep` | erasure bounds over eps and tau |
//! | `negativity_witness` | a vacuous (negative) lower bound |
//! | `trace_dump` | one sampled trace in the dump format |
//! | `erasure_decoder` | burst filling, Monte Carlo error rate |
//! | `shiryaev_detector` | detection delay and false alarms |
//! | `changepoint_decoder` | segmentation decoding, error budget, Fano rate |
//! | `experiment_harness` | the sweep harness driven from code |
//!
//! ```
//! use nnc::bounds::erasure_lb;
//! use nnc::duplication::make_iid;
//!
//! let v = erasure_lb(3, 2, &make_iid(0.999).unwrap(), 0.0).unwrap();
//! assert!(v.value > 0.99);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alphabet;
pub mod bounds;
pub mod decoders;
pub mod dmc;
pub mod duplication;
pub mod error;
pub mod harness;
pub mod info;
pub mod rng;
pub mod simulate;
pub mod source;
pub mod spectral;
pub mod units;
