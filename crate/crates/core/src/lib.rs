//! Interval-verified analysis of tube domains `T_D = D + iR²` over planar
//! bases `D` (a horizontal strip minus closed obstacles).

pub mod cli_report;
pub mod geometry;
pub mod interval;
pub mod kobayashi;
pub mod predicates;
pub mod witness_maps;

pub use geometry::{build_figure1, build_figure2, figure2_default_teeth, Box2, Containment, DomainSpec, Point2};
pub use interval::Interval;
pub use witness_maps::{ContainmentCertificate, Matrix2, WitnessFamily};
