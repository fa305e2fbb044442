pub mod abelian;
pub mod algebra;
pub mod exterior;
pub mod francoise;
pub mod godbillon;
pub mod oracle;
