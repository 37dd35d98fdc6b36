pub mod error;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod germ;
pub mod linkform;
pub mod smith;
pub mod family;
pub mod monodromy;
pub mod localsys;
pub mod blanchfield;
pub mod corpus;
pub mod verify;
pub mod io;
