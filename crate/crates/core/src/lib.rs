//! Analysis and simulation of generalized LDPC (GLDPC) codes decoded with
//! belief propagation at variable/SPC nodes and a-posteriori-probability (APP)
//! decoding at generalized constraint (GC) nodes.
//!
//! The crate covers:
//!
//! * [`subcodes`]: component block codes, codeword enumeration, coordinate
//!   automorphisms and ensemble design rates.
//! * [`gc_app`]: the APP extrinsic message map at GC nodes, soft and erasure.
//! * [`channels`]: BEC / BI-AWGN models, LLRs, initial L-densities, capacity.
//! * [`de_bec`]: exact density evolution on the BEC and threshold sweeps.
//! * [`density`] and [`de_awgn`]: quantized density evolution on the BI-AWGN
//!   channel with Monte-Carlo GC-node densities.
//! * [`gauss_approx`]: Gaussian and Gaussian-mixture approximations.
//! * [`ensemble_graph`]: finite Tanner graph sampling and 4-cycle removal.
//! * [`mp_decoder`]: flooding message-passing decoder and BLER harness.
//!
//! Monte-Carlo kernels run on rayon when the `parallel` feature is enabled
//! (the default). Every stochastic result is a pure function of its seed and
//! does not depend on the number of worker threads.

pub mod channels;
pub mod de_awgn;
pub mod de_bec;
pub mod density;
pub mod ensemble_graph;
pub mod error;
pub mod gauss_approx;
pub mod gc_app;
pub mod mp_decoder;
pub mod par;
pub mod subcodes;
pub mod threshold;

pub use error::{Error, Result};
