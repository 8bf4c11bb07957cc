//! A simulation laboratory for conservative pairwise wealth exchange.
//!
//! A population of agents holds non-negative integer wealth. At each Monte
//! Carlo step a linked pair is selected and one agent transfers a stake to
//! the other on a fair coin flip; total wealth never changes. Two stake
//! rules are provided — a fixed amount per trade, and a rounded fraction of
//! the poorer trader's wealth — optionally with an absorbing bankruptcy
//! state. Agents are linked either all-to-all or through a random network
//! whose degrees are uniform on `{1, ..., k_max}`.
//!
//! Module map:
//! - [`network`]: degree sampling, stub wiring with bounded retries,
//!   component extraction, edge-list export.
//! - [`engine`]: the exchange dynamics and trajectory recording.
//! - [`metrics`]: wealth histograms, Shannon entropy over exact integer
//!   wealth states, poverty counts, condensation detection.
//! - [`gf`]: exact generating-function predictions for the component
//!   structure of the random networks.
//! - [`fit`]: log-space least-squares fits, scaling exponents, wealth-class
//!   peak detection, and a two-sample location test.
//! - [`experiment`]: reproducible multi-realization experiments, parameter
//!   sweeps, canned scenario presets, and CSV export.
//!
//! Reproducibility: every experiment is keyed by one master seed.
//! Per-realization generators are derived with [`rng::stream_seed`] and
//! results are reduced in realization order, so a given configuration and
//! seed produce byte-identical output files regardless of thread count.

pub mod engine;
pub mod experiment;
pub mod fit;
pub mod gf;
pub mod metrics;
pub mod network;
pub mod rng;
