mod dynamics;
mod semiclassics;
mod statistics;
mod structure;

pub use dynamics::{bloch_classical, bloch_quantum, stability};
pub use semiclassics::bogoliubov;
pub use statistics::{overlap, rmt, stats};
pub use structure::{basis, spectrum, sweep_u};
