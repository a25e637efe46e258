//! Shared fixtures and independent reference oracles for the integration
//! and acceptance suites. Every oracle here is written against the public
//! data model only and stays independent of the implementation paths it
//! checks (worklist fixpoint, demand-driven encoder, fast tree walk).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use irvec::ir::{IrFunction, IrModule, OperandClass};
use irvec::linalg::Vector;
use irvec::triplet::Triplet;
use irvec::vocab::SeedVocabulary;

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Entry block of a function storing its arguments into fresh slots: three
/// allocas, three stores, then the jump into the loop scaffold.
pub const SPILL_ARGS_LL: &str = "define void @f(i32* %arr, i32 %size) {\n\
entry:\n\
\x20 %ptr = alloca i32*\n\
\x20 %range = alloca i32\n\
\x20 %i = alloca i32\n\
\x20 store i32* %arr, i32** %ptr\n\
\x20 store i32 %size, i32* %range\n\
\x20 store i32 0, i32* %i\n\
\x20 br label %next\n\
next:\n\
\x20 %p = load i32*, i32** %ptr\n\
\x20 ret void\n\
}\n";

/// Diamond with a bypass: the merged load of slot j can see the alloca
/// (id 1) and both stores (ids 3 and 6); the load of slot p sees the
/// alloca (id 0) and one store (id 5).
pub const DIAMOND_BYPASS_LL: &str = "define void @g(i32* %a, i32* %b, i32* %c, i1 %c1, i1 %c2) {\n\
entry:\n\
\x20 %p = alloca i32*\n\
\x20 %j = alloca i32*\n\
\x20 br i1 %c1, label %bb_a, label %merge\n\
bb_a:\n\
\x20 store i32* %a, i32** %j\n\
\x20 br i1 %c2, label %bb_b, label %merge\n\
bb_b:\n\
\x20 store i32* %b, i32** %p\n\
\x20 store i32* %c, i32** %j\n\
\x20 br label %merge\n\
merge:\n\
\x20 %v1 = load i32*, i32** %j\n\
\x20 %v2 = load i32*, i32** %p\n\
\x20 ret void\n\
}\n";

/// Mutually-reaching stores: the stores in b1 (id 3) and b2 (id 5) reach
/// each other through the cycle, and both are reached by the initializer
/// store (id 1). The final load (id 7) sees ids 1 and 5.
pub const MUTUAL_STORES_LL: &str = "define void @h(i32 %s, i32 %x, i32 %y, i1 %c) {\n\
entry:\n\
\x20 %i = alloca i32\n\
\x20 store i32 0, i32* %i\n\
\x20 switch i32 %s, label %exit [ i32 0, label %b1  i32 1, label %b2 ]\n\
b1:\n\
\x20 store i32 %x, i32* %i\n\
\x20 br label %b2\n\
b2:\n\
\x20 store i32 %y, i32* %i\n\
\x20 br i1 %c, label %b1, label %exit\n\
exit:\n\
\x20 %v = load i32, i32* %i\n\
\x20 ret void\n\
}\n";

/// A ring of `k` blocks all storing to one slot, so the k stores form one
/// strongly-interdependent cycle of instruction vectors.
pub fn ring_cycle_ll(k: usize) -> String {
    use std::fmt::Write as _;
    assert!(k >= 2);
    let mut out = String::new();
    let _ = writeln!(out, "define void @ring(i32 %x, i1 %c) {{");
    let _ = writeln!(out, "entry:");
    let _ = writeln!(out, "  %s = alloca i32");
    let _ = write!(out, "  switch i32 %x, label %exit [");
    for b in 0..k {
        let _ = write!(out, " i32 {}, label %r{} ", b, b);
    }
    let _ = writeln!(out, "]");
    for b in 0..k {
        let _ = writeln!(out, "r{}:", b);
        let _ = writeln!(out, "  store i32 %x, i32* %s");
        let next = (b + 1) % k;
        let _ = writeln!(out, "  br i1 %c, label %r{}, label %exit", next);
    }
    let _ = writeln!(out, "exit:");
    let _ = writeln!(out, "  %v = load i32, i32* %s");
    let _ = writeln!(out, "  ret void");
    let _ = writeln!(out, "}}");
    out
}

/// A deterministic dense vocabulary covering every opcode, type and class
/// entity of a module set; components are small rationals.
pub fn dense_vocab(modules: &[&IrModule], dim: usize) -> SeedVocabulary {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for m in modules {
        for t in irvec::triplet::extract_triplets(m) {
            names.insert(t.head);
            names.insert(t.tail);
        }
    }
    for class in OperandClass::all() {
        names.insert(class.name().to_string());
    }
    let mut vocab = SeedVocabulary::new(dim);
    for (k, name) in names.iter().enumerate() {
        let v: Vector = (0..dim)
            .map(|i| {
                let x = ((k as u64 + 3).wrapping_mul(37).wrapping_add(i as u64 * 13 + 5)) % 101;
                (x as f64) / 101.0 - 0.5
            })
            .collect();
        vocab.entities.insert(name.clone(), v);
    }
    vocab
}

// ---------------------------------------------------------------------------
// Triplet oracle: a second, naive extractor over the parse tree
// ---------------------------------------------------------------------------

/// Naive re-extraction that walks blocks and computes the successor
/// instruction by index arithmetic instead of iterator pairing.
pub fn naive_triplet_extract(module: &IrModule) -> Vec<Triplet> {
    let mut out = Vec::new();
    for func in &module.functions {
        if !func.is_definition {
            continue;
        }
        let mut flat: Vec<(String, Vec<String>, String)> = Vec::new();
        for block in &func.blocks {
            for instr in &block.instructions {
                let classes = instr.operands.iter().map(|o| o.clazz.name().to_string()).collect();
                flat.push((instr.opcode.clone(), classes, instr.type_entity.name().to_string()));
            }
        }
        for i in 0..flat.len() {
            let (opcode, classes, ty) = &flat[i];
            out.push(Triplet::new(opcode.clone(), "TypeOf", ty.clone()));
            if i + 1 < flat.len() {
                out.push(Triplet::new(opcode.clone(), "NextInst", flat[i + 1].0.clone()));
            }
            for (k, class) in classes.iter().enumerate() {
                out.push(Triplet::new(opcode.clone(), format!("Arg{}", k + 1), class.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Reaching-definitions oracle: brute-force path enumeration
// ---------------------------------------------------------------------------

/// Slot definitions of a function: (block index, position, instr id, slot).
fn slot_defs(func: &IrFunction) -> Vec<(usize, usize, usize, String)> {
    let mut defs = Vec::new();
    for (bi, block) in func.blocks.iter().enumerate() {
        for (pos, instr) in block.instructions.iter().enumerate() {
            if instr.opcode == "alloca" {
                if let Some(name) = &instr.result_name {
                    defs.push((bi, pos, instr.id, name.clone()));
                }
            } else if instr.writes_memory {
                if let Some(slot) = instr.written_slot() {
                    defs.push((bi, pos, instr.id, slot.to_string()));
                }
            }
        }
    }
    defs
}

/// Does instruction at `pos` in `block` kill the definition `def_id` of
/// `slot`? (Any other definition of the same slot does.)
fn kills(func: &IrFunction, bi: usize, pos: usize, slot: &str, def_id: usize) -> bool {
    let instr = &func.blocks[bi].instructions[pos];
    if instr.id == def_id {
        return false;
    }
    if instr.opcode == "alloca" {
        return instr.result_name.as_deref() == Some(slot);
    }
    instr.writes_memory && instr.written_slot() == Some(slot)
}

fn block_segment_kill_free(
    func: &IrFunction,
    bi: usize,
    range: std::ops::Range<usize>,
    slot: &str,
    def_id: usize,
) -> bool {
    range.clone().all(|pos| !kills(func, bi, pos, slot, def_id))
}

/// Does the definition at (def_block, def_pos) reach the use at
/// (use_block, use_pos) along some CFG path without an intervening kill?
/// Enumerates simple paths (distinct intermediate blocks) by DFS.
fn def_reaches_use(
    func: &IrFunction,
    succ: &[Vec<usize>],
    def: (usize, usize, usize, &str),
    use_at: (usize, usize),
) -> bool {
    let (db, dp, def_id, slot) = def;
    let (ub, up) = use_at;

    // same-block, definition strictly before the use, nothing in between
    if db == ub && dp < up && block_segment_kill_free(func, db, dp + 1..up, slot, def_id) {
        return true;
    }

    // the definition must survive to the end of its own block
    let def_block_len = func.blocks[db].instructions.len();
    if !block_segment_kill_free(func, db, dp + 1..def_block_len, slot, def_id) {
        return false;
    }
    // and the use block prefix must be kill-free
    if !block_segment_kill_free(func, ub, 0..up, slot, def_id) {
        return false;
    }

    // DFS over simple paths from db's successors to ub; intermediate
    // blocks must be entirely kill-free, except the def block itself,
    // which re-generates the definition when passed through
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        func: &IrFunction,
        succ: &[Vec<usize>],
        current: usize,
        target: usize,
        def_block: usize,
        slot: &str,
        def_id: usize,
        visited: &mut Vec<bool>,
    ) -> bool {
        for &next in &succ[current] {
            if next == target {
                return true;
            }
            if visited[next] {
                continue;
            }
            let len = func.blocks[next].instructions.len();
            let passable =
                next == def_block || block_segment_kill_free(func, next, 0..len, slot, def_id);
            if !passable {
                continue;
            }
            visited[next] = true;
            if dfs(func, succ, next, target, def_block, slot, def_id, visited) {
                return true;
            }
            visited[next] = false;
        }
        false
    }

    let mut visited = vec![false; func.blocks.len()];
    dfs(func, succ, db, ub, db, slot, def_id, &mut visited)
}

/// Brute-force reaching definitions: for every VAR/PTR operand, the set of
/// definition ids that reach it per path enumeration. Mirrors the
/// semantics of `flow::ReachingDefs` key for key.
pub fn rd_path_oracle(func: &IrFunction) -> BTreeMap<(usize, usize), BTreeSet<usize>> {
    let index_of: BTreeMap<&str, usize> =
        func.blocks.iter().enumerate().map(|(i, b)| (b.label.as_str(), i)).collect();
    let succ: Vec<Vec<usize>> = func
        .blocks
        .iter()
        .map(|b| b.successors.iter().map(|s| index_of[s.as_str()]).collect())
        .collect();
    let defs = slot_defs(func);

    let mut out = BTreeMap::new();
    for (ub, block) in func.blocks.iter().enumerate() {
        for (up, instr) in block.instructions.iter().enumerate() {
            for (oi, op) in instr.operands.iter().enumerate() {
                if !matches!(op.clazz, OperandClass::Var | OperandClass::Ptr) {
                    continue;
                }
                let mut set = BTreeSet::new();
                if let Some(root) = &op.pointee_root {
                    for (db, dp, id, slot) in &defs {
                        if slot == root
                            && def_reaches_use(
                                func,
                                &succ,
                                (*db, *dp, *id, slot),
                                (ub, up),
                            )
                        {
                            set.insert(*id);
                        }
                    }
                } else if let Some(def) = op.ssa_def {
                    set.insert(def);
                }
                out.insert((instr.id, oi), set);
            }
        }
    }
    out
}

/// Flatten `flow::ReachingDefs` to id sets for comparison with the oracle.
pub fn rd_to_id_sets(
    rd: &irvec::flow::ReachingDefs,
) -> BTreeMap<(usize, usize), BTreeSet<usize>> {
    rd.uses
        .iter()
        .map(|(k, sites)| (*k, sites.iter().map(|d| d.instr).collect()))
        .collect()
}

// ---------------------------------------------------------------------------
// Live-instruction oracle: last-writer simulation for single blocks
// ---------------------------------------------------------------------------

/// Reference computation of the live set for one block: simulate forward,
/// remembering the last writer per slot; a write whose slot is written
/// again with no read in between is dead.
pub fn last_writer_live_oracle(block: &irvec::ir::IrBasicBlock) -> Vec<usize> {
    let mut dead: BTreeSet<usize> = BTreeSet::new();
    let mut last_writer: BTreeMap<String, usize> = BTreeMap::new();
    for instr in &block.instructions {
        // reads: any operand rooted at a slot, except the address operand
        // of a store overwriting that same slot
        for (oi, op) in instr.operands.iter().enumerate() {
            if let Some(root) = &op.pointee_root {
                let is_own_address = instr.writes_memory
                    && oi + 1 == instr.operands.len()
                    && instr.written_slot() == Some(root.as_str());
                if !is_own_address {
                    last_writer.remove(root);
                }
            }
        }
        if instr.writes_memory {
            if let Some(slot) = instr.written_slot() {
                if let Some(prev) = last_writer.insert(slot.to_string(), instr.id) {
                    dead.insert(prev);
                }
            }
        }
    }
    block.instructions.iter().map(|i| i.id).filter(|id| !dead.contains(id)).collect()
}

// ---------------------------------------------------------------------------
// Dense reference solver (independent of linalg::lu_factor)
// ---------------------------------------------------------------------------

/// Plain Gauss-Jordan elimination with row pivoting, written directly over
/// `Vec<Vec<f64>>`. Returns `None` for (near-)singular systems.
pub fn reference_gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[pivot][col].abs() < 1e-11 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for j in 0..=n {
            m[col][j] /= p;
        }
        for row in 0..n {
            if row != col && m[row][col] != 0.0 {
                let f = m[row][col];
                for j in 0..=n {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

// ---------------------------------------------------------------------------
// Whole-function linear-system oracle for flow-aware encodings
// ---------------------------------------------------------------------------

/// Independently assemble every instruction-vector equation of a function
/// (no calls to defined functions allowed) and solve the global system
/// with [`reference_gauss_solve`]. Returns id -> vector.
pub fn global_encoding_oracle(
    func: &IrFunction,
    vocab: &SeedVocabulary,
    w_o: f64,
    w_t: f64,
    w_a: f64,
) -> BTreeMap<usize, Vector> {
    let rd = irvec::flow::reaching_definitions(func);
    let ids: Vec<usize> = func.instructions().map(|i| i.id).collect();
    let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(p, id)| (*id, p)).collect();
    let n = ids.len();
    let dim = vocab.dimension;

    // x_k = base_k + w_a * (known_k + sum coeffs * x_j)
    let mut coeffs = vec![vec![0.0; n]; n];
    let mut consts: Vec<Vector> = Vec::with_capacity(n);
    for (k, id) in ids.iter().enumerate() {
        let instr = func.instruction(*id).unwrap();
        let o = vocab.entities[&instr.opcode].clone();
        let t = vocab.entities[instr.type_entity.name()].clone();
        let mut known = vec![0.0; dim];
        for (oi, op) in instr.operands.iter().enumerate() {
            match op.clazz {
                OperandClass::Var | OperandClass::Ptr => {
                    let defs = rd.def_ids(instr.id, oi);
                    if defs.is_empty() {
                        let g = &vocab.entities[op.clazz.name()];
                        for d in 0..dim {
                            known[d] += g[d];
                        }
                    } else {
                        for def in defs {
                            coeffs[k][pos[&def]] += 1.0;
                        }
                    }
                }
                _ => {
                    let g = &vocab.entities[op.clazz.name()];
                    for d in 0..dim {
                        known[d] += g[d];
                    }
                }
            }
        }
        let c: Vector =
            (0..dim).map(|d| w_o * o[d] + w_t * t[d] + w_a * known[d]).collect();
        consts.push(c);
    }

    // (I - w_a * coeffs) X = consts, one scalar system per dimension
    let a: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| if k == j { 1.0 - w_a * coeffs[k][j] } else { -w_a * coeffs[k][j] })
                .collect()
        })
        .collect();
    let mut x = vec![vec![0.0; dim]; n];
    for d in 0..dim {
        let b: Vec<f64> = consts.iter().map(|c| c[d]).collect();
        let sol = reference_gauss_solve(&a, &b).expect("oracle system must be regular");
        for k in 0..n {
            x[k][d] = sol[k];
        }
    }
    ids.iter().enumerate().map(|(k, id)| (*id, x[k].clone())).collect()
}

// ---------------------------------------------------------------------------
// Hierarchy exactness
// ---------------------------------------------------------------------------

/// Recompute all aggregation sums in canonical order from the instruction
/// vectors and assert bit-for-bit equality with the stored hierarchy.
pub fn assert_hierarchy_exact(module: &IrModule, vectors: &irvec::encoder::ProgramVectors) {
    let dim = vectors.program.len();
    let mut program = vec![0.0; dim];
    for func in module.defined_functions() {
        let rd = irvec::flow::reaching_definitions(func);
        let mut func_sum = vec![0.0; dim];
        for block in &func.blocks {
            let live = irvec::flow::live_instructions(block, &rd, func);
            let mut block_sum = vec![0.0; dim];
            for id in live {
                let v = &vectors.per_instruction[&(func.name.clone(), id)];
                for d in 0..dim {
                    block_sum[d] += v[d];
                }
            }
            let stored = &vectors.per_block[&(func.name.clone(), block.label.clone())];
            assert_eq!(&block_sum, stored, "block {}/{} sum mismatch", func.name, block.label);
            for d in 0..dim {
                func_sum[d] += block_sum[d];
            }
        }
        let stored = &vectors.per_function[&func.name];
        assert_eq!(&func_sum, stored, "function {} sum mismatch", func.name);
        for d in 0..dim {
            program[d] += func_sum[d];
        }
    }
    assert_eq!(program, vectors.program, "program sum mismatch");
}
