//! Effect algebras, the order and interval topologies on finite posets, and
//! numerical checks of how these relate to the strong and weak operator
//! topologies on quantum effects.

pub mod algebra;
pub mod checks;
pub mod cli;
pub mod format;
pub mod l2;
pub mod numerics;
pub mod relations;
pub mod topology;
