pub mod benchmark;
pub mod classify;
pub mod fit;
pub mod plotdata;
pub mod simulate;
