//! Distributed vector representations for programs in a textual LLVM-IR
//! subset.
//!
//! The pipeline has four stages, each exposed as a module and as an
//! `irvec` CLI subcommand:
//!
//! 1. [`ir`] parses `.ll` text into a module/function/block/instruction
//!    hierarchy, abstracting identifiers into generic operand classes and
//!    width-erased type entities.
//! 2. [`triplet`] turns a module into `<head, relation, tail>` training
//!    records over those entities (TypeOf, NextInst, Arg_i relations).
//! 3. [`transe`] learns an n-dimensional seed embedding for every entity
//!    and relation from the triplets, using translations `h + r ≈ t` under
//!    a margin-based ranking loss.
//! 4. [`encoder`] combines seed embeddings into instruction, basic-block,
//!    function and program vectors, either symbolically or flow-aware
//!    (operands replaced by the sum of their reaching definitions, with
//!    circular dependencies resolved as simultaneous linear equations).
//!
//! [`flow`] provides the reaching-definitions analysis behind the
//! flow-aware mode, [`inspect`] has vocabulary diagnostics (neighbors,
//! 2-D PCA, cluster separation), and [`gbdt`] is a small gradient-boosted
//! decision tree harness for classification tasks over program vectors.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod encoder;
pub mod error;
pub mod flow;
pub mod gbdt;
pub mod inspect;
pub mod ir;
pub mod linalg;
pub mod synth;
pub mod transe;
pub mod triplet;
pub mod vocab;

pub use error::{Error, Result};
pub use linalg::Vector;
