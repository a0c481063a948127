//! Link-level simulation and closed-form BER analysis for joint relay
//! selection and network coding in two-way relay channels.
//!
//! Two end users exchange BPSK-modulated bits through `N` decode-and-forward
//! relays over i.i.d. Rayleigh fading downlinks. The relays hold the XOR of
//! both users' bits; one, two, or all relays forward it (plain, Alamouti STBC,
//! or orthogonal MRC transmission), and each user recovers the other user's
//! bit by XORing with its own. The crate provides:
//!
//! * [`channel`] — deterministic counter-based generation of fading
//!   realizations and AWGN, and the SNR bookkeeping;
//! * [`phy`] — BPSK, XOR network coding, Alamouti encoding/combining, MRC,
//!   and per-scheme effective SNRs;
//! * [`selection`] — Min-Max, Double-Max, Chernoff-optimal single/dual/subset
//!   relay selection, and the decentralized backoff-timer procedure;
//! * [`analytic`] — exact and asymptotic average sum BER formulas for the
//!   four schemes, gain ratios, and independent quadrature/MGF oracles;
//! * [`montecarlo`] — the reproducible trial engine (bit-level and
//!   semi-analytic fidelities) and SNR-sweep driver;
//! * [`numerics`] — Q-function, log-gamma helpers, adaptive Gauss–Kronrod
//!   quadrature, pairwise summation, and the KS statistic.

pub mod analytic;
pub mod channel;
pub mod montecarlo;
pub mod numerics;
pub mod phy;
pub mod selection;

pub use channel::{ChannelRealization, RngStream, SnrConfig};
pub use montecarlo::{BerEstimate, Fidelity, SweepRow, SweepSpec, TrialConfig};
pub use selection::{SelectionDecision, StrategyKind};
