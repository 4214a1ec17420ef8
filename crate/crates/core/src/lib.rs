pub mod exactla;
pub mod freelie;
pub mod dk;
pub mod complexes;
pub mod operadkit;
pub mod grt;
pub mod cli;
pub mod suites;
