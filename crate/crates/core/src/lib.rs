//! Exact combinatorial representation theory for free and classical
//! unitary, orthogonal and symmetric (quantum) groups.
//!
//! Tensor words in the fundamental representation and its dual are
//! [`words::ColoredWord`]s. Partitions of their positions
//! ([`diagrams::Diagram`]) are realized as invariant tensors
//! ([`realize::SparseTensor`]), and the fixed-point spaces of each group
//! family ([`fixed_spaces::fixed_space`]) are compared with exact rational
//! linear algebra ([`exact_linalg`]). [`gencheck`] uses these to certify
//! topological generation statements word by word, up to a length cap.

pub mod cli;
pub mod diagrams;
pub mod exact_linalg;
pub mod fixed_spaces;
pub mod gencheck;
pub mod limits;
pub mod realize;
pub mod words;

pub use diagrams::{Diagram, DiagramFamily};
pub use exact_linalg::{ExactMatrix, SubspaceBasis};
pub use fixed_spaces::{GroupFamily, GroupSpec};
pub use gencheck::{GenerationReport, GenerationTask};
pub use limits::Limits;
pub use realize::SparseTensor;
pub use words::{Color, ColoredWord, Dimension};
