pub mod events;
pub mod tracking;
pub mod sync;
pub mod detect;
pub mod synth;
