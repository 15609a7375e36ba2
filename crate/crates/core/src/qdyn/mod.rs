//! Many-body dynamics in the tilted ring: initial states, Krylov
//! propagation and Bloch-oscillation observables.

mod analysis;
mod krylov;
mod observables;
mod propagate;
mod state;

pub use analysis::{fit_decay, fit_decay_series, half_period_extrema, revival_envelope, DecayFit};
pub use observables::{linear_entropy, mean_momentum, momentum_from_hopping, one_particle_dm, OpdmTables};
pub use propagate::{default_dt, evolve, time_reversal_fidelity, EvolutionRecord, EvolveOptions, TiltedHamiltonian};
pub use state::{bec_state, ground_state, GroundState, StateVector};
