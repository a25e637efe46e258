//! Extraction of `<head, relation, tail>` training triplets from a module.
//!
//! Every instruction yields one `TypeOf` triplet, one `NextInst` triplet
//! when a next instruction exists (textual order inside a block; the last
//! instruction of a block links to the first instruction of the next block
//! in layout order; chains never cross function boundaries), and one
//! `Arg_i` triplet per operand, 1-based. The head is always the opcode.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::ir::IrModule;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triplet {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl Triplet {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        Triplet { head: head.into(), relation: relation.into(), tail: tail.into() }
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.head, self.relation, self.tail)
    }
}

/// Extract all triplets of a module, in instruction order. Duplicates are
/// kept: frequency matters for training.
pub fn extract_triplets(module: &IrModule) -> Vec<Triplet> {
    let mut out = Vec::new();
    for func in module.defined_functions() {
        let instrs: Vec<_> = func.instructions().collect();
        for (pos, instr) in instrs.iter().enumerate() {
            out.push(Triplet::new(
                instr.opcode.clone(),
                "TypeOf",
                instr.type_entity.name(),
            ));
            if let Some(next) = instrs.get(pos + 1) {
                out.push(Triplet::new(instr.opcode.clone(), "NextInst", next.opcode.clone()));
            }
            for (i, op) in instr.operands.iter().enumerate() {
                out.push(Triplet::new(
                    instr.opcode.clone(),
                    format!("Arg{}", i + 1),
                    op.clazz.name(),
                ));
            }
        }
    }
    out
}

/// Counts over a triplet multiset: distinct entities (heads and tails),
/// distinct relations, and the total number of triplets.
pub fn triplet_stats(triplets: &[Triplet]) -> (usize, usize, usize) {
    let mut entities: BTreeSet<&str> = BTreeSet::new();
    let mut relations: BTreeSet<&str> = BTreeSet::new();
    for t in triplets {
        entities.insert(&t.head);
        entities.insert(&t.tail);
        relations.insert(&t.relation);
    }
    (entities.len(), relations.len(), triplets.len())
}

/// Write triplets as tab-separated lines, one per triplet.
pub fn write_triplets<W: Write>(mut w: W, triplets: &[Triplet]) -> Result<()> {
    for t in triplets {
        writeln!(w, "{}", t)?;
    }
    Ok(())
}

/// Read a tab-separated triplet file produced by [`write_triplets`].
pub fn read_triplets(text: &str) -> Result<Vec<Triplet>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(h), Some(r), Some(t), None) => out.push(Triplet::new(h, r, t)),
            _ => {
                return Err(Error::Format(format!(
                    "line {}: expected `head<TAB>relation<TAB>tail`",
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}
