pub mod classical;
pub mod concept;
pub mod fuzz;
pub mod kb;
pub mod oracle;
pub mod possibilistic;
pub mod query;
pub mod rational;
pub mod syntax;
pub mod tableau;
