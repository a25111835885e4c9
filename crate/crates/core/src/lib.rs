pub mod axisym;
pub mod cli;
pub mod energy;
pub mod flux;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod stability;
pub mod support;
