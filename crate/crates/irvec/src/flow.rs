//! Reaching-definitions analysis over memory slots, instruction
//! read/write classification, and the live-instruction set used for
//! basic-block aggregation.
//!
//! Definitions are tracked per *slot*: a slot is the memory behind an
//! `alloca` result or behind a pointer parameter. The alloca itself is the
//! slot's initial definition; every write to the slot (a `store` through a
//! pointer whose root is that slot) redefines it and kills the other
//! definitions of the same slot. SSA values need no flow analysis: a use
//! resolves to its unique definition.
//!
//! The analysis is a standard forward may-analysis (meet is union over
//! predecessors) iterated to the least fixed point with a worklist.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::ir::{IrBasicBlock, IrFunction, IrInstruction};

/// What a definition defines: the SSA value it names, or a memory slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Ssa(String),
    Slot(String),
}

/// One definition site: the defining instruction and the defined location.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefSite {
    pub instr: usize,
    pub location: Location,
}

/// Read/write classification of an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstrClass {
    Read,
    Write,
}

/// Classify an instruction: Write for the configured memory-writing
/// opcodes (`store` at minimum), Read otherwise.
pub fn classify(instr: &IrInstruction) -> InstrClass {
    if instr.writes_memory {
        InstrClass::Write
    } else {
        InstrClass::Read
    }
}

/// Reaching definitions per (instruction id, operand index).
///
/// An entry exists for every VAR/PTR operand of the function. SSA scalars
/// map to their single definition (or the empty set when the value comes
/// from outside, e.g. a parameter). Pointer operands with a known root map
/// to the slot definitions that reach the use; unknown provenance maps to
/// the empty set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReachingDefs {
    pub uses: BTreeMap<(usize, usize), BTreeSet<DefSite>>,
}

impl ReachingDefs {
    pub fn at(&self, instr: usize, operand: usize) -> Option<&BTreeSet<DefSite>> {
        self.uses.get(&(instr, operand))
    }

    /// Reaching definition ids for one operand, empty when untracked.
    pub fn def_ids(&self, instr: usize, operand: usize) -> Vec<usize> {
        self.at(instr, operand)
            .map(|s| s.iter().map(|d| d.instr).collect())
            .unwrap_or_default()
    }
}

/// The slot definition produced by an instruction, if any: an alloca
/// defines its own slot, a write instruction defines the slot behind its
/// address operand (when the root is known).
fn slot_def(instr: &IrInstruction) -> Option<String> {
    if instr.opcode == "alloca" {
        return instr.result_name.clone();
    }
    if instr.writes_memory {
        return instr.written_slot().map(|s| s.to_string());
    }
    None
}

/// Compute reaching definitions for a function definition.
pub fn reaching_definitions(func: &IrFunction) -> ReachingDefs {
    reaching_definitions_ordered(func, None)
}

/// Like [`reaching_definitions`] but with an explicit worklist seed order,
/// used to check that the fixed point is order-independent.
pub fn reaching_definitions_ordered(
    func: &IrFunction,
    worklist_order: Option<&[usize]>,
) -> ReachingDefs {
    let blocks = &func.blocks;
    let nblocks = blocks.len();
    let index_of: BTreeMap<&str, usize> =
        blocks.iter().enumerate().map(|(i, b)| (b.label.as_str(), i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nblocks];
    for (i, b) in blocks.iter().enumerate() {
        for s in &b.successors {
            let j = index_of[s.as_str()];
            if !preds[j].contains(&i) {
                preds[j].push(i);
            }
        }
    }

    // per-block slot-definition sets: (slot, defining instr)
    type SlotDefs = BTreeSet<(String, usize)>;

    let transfer = |b: &IrBasicBlock, input: &SlotDefs| -> SlotDefs {
        let mut cur = input.clone();
        for instr in &b.instructions {
            if let Some(slot) = slot_def(instr) {
                cur.retain(|(s, _)| *s != slot);
                cur.insert((slot, instr.id));
            }
        }
        cur
    };

    let mut ins: Vec<SlotDefs> = vec![SlotDefs::new(); nblocks];
    let mut outs: Vec<SlotDefs> = vec![SlotDefs::new(); nblocks];
    let mut work: VecDeque<usize> = match worklist_order {
        Some(order) => order.iter().copied().collect(),
        None => (0..nblocks).collect(),
    };
    let mut queued = vec![true; nblocks];
    while let Some(i) = work.pop_front() {
        queued[i] = false;
        let mut input = SlotDefs::new();
        for &p in &preds[i] {
            input.extend(outs[p].iter().cloned());
        }
        let output = transfer(&blocks[i], &input);
        ins[i] = input;
        if output != outs[i] {
            outs[i] = output;
            for s in &blocks[i].successors {
                let j = index_of[s.as_str()];
                if !queued[j] {
                    queued[j] = true;
                    work.push_back(j);
                }
            }
        }
    }

    // record per-use reaching definitions, walking each block once more
    let mut rd = ReachingDefs::default();
    for (i, b) in blocks.iter().enumerate() {
        let mut cur = ins[i].clone();
        for instr in &b.instructions {
            for (oi, op) in instr.operands.iter().enumerate() {
                use crate::ir::OperandClass::*;
                match op.clazz {
                    Var | Ptr => {
                        let mut sites = BTreeSet::new();
                        if let Some(root) = &op.pointee_root {
                            for (slot, id) in &cur {
                                if slot == root {
                                    sites.insert(DefSite {
                                        instr: *id,
                                        location: Location::Slot(slot.clone()),
                                    });
                                }
                            }
                        } else if let Some(def) = op.ssa_def {
                            sites.insert(DefSite {
                                instr: def,
                                location: Location::Ssa(
                                    op.raw.trim_start_matches('%').to_string(),
                                ),
                            });
                        }
                        rd.uses.insert((instr.id, oi), sites);
                    }
                    _ => {}
                }
            }
            if let Some(slot) = slot_def(instr) {
                cur.retain(|(s, _)| *s != slot);
                cur.insert((slot, instr.id));
            }
        }
    }
    rd
}

/// Instructions of a block that contribute to the block vector: everything
/// except write instructions whose slot is overwritten later in the same
/// block with no intervening read of that slot.
pub fn live_instructions(bb: &IrBasicBlock, _rd: &ReachingDefs, _func: &IrFunction) -> Vec<usize> {
    let instrs = &bb.instructions;
    let mut live = Vec::new();
    'outer: for (pos, instr) in instrs.iter().enumerate() {
        let slot = match (classify(instr), instr.written_slot()) {
            (InstrClass::Write, Some(slot)) => slot.to_string(),
            _ => {
                live.push(instr.id);
                continue;
            }
        };
        for later in &instrs[pos + 1..] {
            let later_writes_slot =
                later.writes_memory && later.written_slot() == Some(slot.as_str());
            // the overwriting store's own address operand is not a read
            let addr_idx =
                if later_writes_slot { later.operands.len().wrapping_sub(1) } else { usize::MAX };
            let reads = later.operands.iter().enumerate().any(|(oi, op)| {
                oi != addr_idx && op.pointee_root.as_deref() == Some(slot.as_str())
            });
            if reads {
                live.push(instr.id);
                continue 'outer;
            }
            if later_writes_slot {
                // overwritten before any read: killed within the block
                continue 'outer;
            }
        }
        live.push(instr.id);
    }
    live
}
