pub mod dgmod;
pub mod diffmod;
pub mod exterior;
pub mod flags;
pub mod groebner;
pub mod koszul;
pub mod linalg;
pub mod matrix;
pub mod ring;
