//! Symbolic and Flow-Aware program encodings.
//!
//! An instruction vector is the weighted sum of its entity embeddings:
//!
//! ```text
//! v(I) = Wo*[opcode] + Wt*[type] + Wa*(sum of argument vectors)
//! ```
//!
//! In Symbolic mode every argument contributes its generic class embedding
//! (VAR, PTR, CONST, FUNCTION, LABEL). In Flow-Aware mode, arguments with
//! known reaching definitions contribute the sum of the defining
//! instructions' vectors (computed demand-driven and memoized), FUNCTION
//! arguments with an available definition contribute the callee's function
//! vector, and everything else falls back to the generic class embedding.
//!
//! Mutually-reaching writes make instruction vectors interdependent. Such
//! groups are detected as strongly connected components of the pending
//! dependency graph and solved jointly as a linear system: one coefficient
//! matrix shared by `n` scalar systems, one per dimension. A unique
//! solution is returned directly; an underdetermined but consistent system
//! yields the minimum-norm solution; an inconsistent system is retried
//! with the argument weight perturbed to `Wa - delta` until it converges
//! or the retry budget is exhausted.
//!
//! Block, function and program vectors are exact element-wise sums per the
//! aggregation hierarchy: blocks sum their live instructions, functions
//! their blocks in layout order, programs their defined functions in
//! declaration order.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{self, ReachingDefs};
use crate::ir::{IrFunction, IrInstruction, IrModule, OperandClass};
use crate::linalg::{self, lu_factor, min_norm_solve, Matrix, Vector};
use crate::vocab::SeedVocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    FlowAware,
}

#[derive(Debug, Clone)]
pub struct EncodingConfig {
    pub mode: Mode,
    pub w_o: f64,
    pub w_t: f64,
    pub w_a: f64,
    pub dimension: usize,
    /// Upper bound of the perturbation delta drawn for inconsistent cycle
    /// systems; delta is uniform in (0, delta_max].
    pub delta_max: f64,
    pub max_perturb_retries: usize,
    pub solver_tolerance: f64,
    pub rng_seed: u64,
    /// Escape hatch for weight-ordering experiments; when false the
    /// heuristic Wo > Wt > Wa is enforced.
    pub allow_unordered_weights: bool,
}

impl EncodingConfig {
    /// Default weights 1 / 0.5 / 0.2 with the given mode and dimension.
    pub fn new(mode: Mode, dimension: usize) -> Self {
        EncodingConfig {
            mode,
            w_o: 1.0,
            w_t: 0.5,
            w_a: 0.2,
            dimension,
            delta_max: 0.1,
            max_perturb_retries: 8,
            solver_tolerance: 1e-9,
            rng_seed: 42,
            allow_unordered_weights: false,
        }
    }

    pub fn with_weights(mut self, w_o: f64, w_t: f64, w_a: f64) -> Self {
        self.w_o = w_o;
        self.w_t = w_t;
        self.w_a = w_a;
        self.delta_max = w_a / 2.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("W_o", self.w_o), ("W_t", self.w_t), ("W_a", self.w_a)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidConfig(format!("{} must be in [0, 1], got {}", name, w)));
            }
        }
        if !self.allow_unordered_weights && !(self.w_o > self.w_t && self.w_t > self.w_a) {
            return Err(Error::InvalidConfig(format!(
                "weights must satisfy W_o > W_t > W_a (got {} / {} / {}); \
                 set allow_unordered_weights to experiment",
                self.w_o, self.w_t, self.w_a
            )));
        }
        if self.dimension < 1 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        if self.delta_max < 0.0 || self.delta_max > self.w_a {
            return Err(Error::InvalidConfig("delta_max must be in [0, W_a]".into()));
        }
        if self.solver_tolerance <= 0.0 {
            return Err(Error::InvalidConfig("solver tolerance must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum MemoState {
    InProgress,
    Final(Vector),
}

/// Hierarchical encoding output. Sums hold exactly, in canonical order:
/// block vectors sum live instructions in block order, function vectors
/// sum blocks in layout order, the program vector sums defined functions
/// in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramVectors {
    /// (function name, instruction id) -> vector
    pub per_instruction: BTreeMap<(String, usize), Vector>,
    /// (function name, block label) -> vector
    pub per_block: BTreeMap<(String, String), Vector>,
    pub per_function: BTreeMap<String, Vector>,
    pub program: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorLevel {
    Instruction,
    Block,
    Function,
    Program,
}

impl ProgramVectors {
    /// One `scope-id<TAB>components` line per unit at the given level.
    pub fn format_level(&self, level: VectorLevel, program_name: &str) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        match level {
            VectorLevel::Instruction => {
                for ((func, idx), v) in &self.per_instruction {
                    let _ = writeln!(
                        out,
                        "inst:{}/{}\t{}",
                        func,
                        idx,
                        crate::vocab::format_components(v)
                    );
                }
            }
            VectorLevel::Block => {
                for ((func, label), v) in &self.per_block {
                    let _ = writeln!(
                        out,
                        "bb:{}/{}\t{}",
                        func,
                        label,
                        crate::vocab::format_components(v)
                    );
                }
            }
            VectorLevel::Function => {
                for (func, v) in &self.per_function {
                    let _ =
                        writeln!(out, "func:{}\t{}", func, crate::vocab::format_components(v));
                }
            }
            VectorLevel::Program => {
                let _ = writeln!(
                    out,
                    "prog:{}\t{}",
                    program_name,
                    crate::vocab::format_components(&self.program)
                );
            }
        }
        out
    }
}

/// Demand-driven encoding session for one module. Memo entries move from
/// empty to in-progress to final exactly once; final vectors never change,
/// so evaluation order is unobservable in the output.
pub struct EncodingContext<'a> {
    module: &'a IrModule,
    vocab: &'a SeedVocabulary,
    config: EncodingConfig,
    rd: BTreeMap<String, ReachingDefs>,
    memo_instr: BTreeMap<(String, usize), MemoState>,
    memo_block: BTreeMap<(String, String), Vector>,
    memo_func: BTreeMap<String, MemoState>,
}

impl<'a> EncodingContext<'a> {
    pub fn new(
        module: &'a IrModule,
        vocab: &'a SeedVocabulary,
        config: EncodingConfig,
    ) -> Result<Self> {
        config.validate()?;
        if vocab.dimension != config.dimension {
            return Err(Error::DimensionMismatch {
                expected: config.dimension,
                got: vocab.dimension,
            });
        }
        let mut rd = BTreeMap::new();
        for func in module.defined_functions() {
            rd.insert(func.name.clone(), flow::reaching_definitions(func));
        }
        Ok(EncodingContext {
            module,
            vocab,
            config,
            rd,
            memo_instr: BTreeMap::new(),
            memo_block: BTreeMap::new(),
            memo_func: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &EncodingConfig {
        &self.config
    }

    pub fn reaching_defs(&self, func: &str) -> Option<&ReachingDefs> {
        self.rd.get(func)
    }

    fn func(&self, name: &str) -> Result<&'a IrFunction> {
        self.module.function(name).ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    fn class_vec(&self, clazz: OperandClass) -> Result<Vector> {
        Ok(self.vocab.entity(clazz.name())?.clone())
    }

    /// Weighted combination shared by every evaluation path, so that paths
    /// that must agree bit-for-bit do.
    fn combine(&self, opcode: &Vector, ty: &Vector, args: &Vector, w_a: f64) -> Vector {
        let (w_o, w_t) = (self.config.w_o, self.config.w_t);
        (0..self.config.dimension)
            .map(|i| w_o * opcode[i] + w_t * ty[i] + w_a * args[i])
            .collect()
    }

    fn final_instr(&self, func: &str, id: usize) -> Option<&Vector> {
        match self.memo_instr.get(&(func.to_string(), id)) {
            Some(MemoState::Final(v)) => Some(v),
            _ => None,
        }
    }

    /// Vector of one instruction, computed on demand.
    pub fn instruction_vector(&mut self, func_name: &str, id: usize) -> Result<Vector> {
        let func = self.func(func_name)?;
        if func.instruction(id).is_none() {
            return Err(Error::InvalidConfig(format!(
                "no instruction {} in function `{}`",
                id, func_name
            )));
        }
        if let Some(v) = self.final_instr(func_name, id) {
            return Ok(v.clone());
        }
        self.eval_instructions(func, id)?;
        Ok(self.final_instr(func_name, id).expect("evaluated").clone())
    }

    /// Flow dependencies of an instruction: ids of reaching definitions of
    /// its VAR/PTR operands. Empty in Symbolic mode.
    fn flow_deps(&self, func: &IrFunction, id: usize) -> Vec<usize> {
        if self.config.mode == Mode::Symbolic {
            return Vec::new();
        }
        let rd = &self.rd[&func.name];
        let instr = func.instruction(id).expect("instruction exists");
        let mut deps = Vec::new();
        for (oi, op) in instr.operands.iter().enumerate() {
            if matches!(op.clazz, OperandClass::Var | OperandClass::Ptr) {
                for def in rd.def_ids(instr.id, oi) {
                    if !deps.contains(&def) {
                        deps.push(def);
                    }
                }
            }
        }
        deps
    }

    /// Evaluate the uncomputed dependency subgraph reachable from `root`:
    /// Tarjan's algorithm finds strongly connected components, emitted
    /// dependencies-first; acyclic nodes evaluate directly, cyclic groups
    /// go through the joint solver.
    fn eval_instructions(&mut self, func: &'a IrFunction, root: usize) -> Result<()> {
        if self.final_instr(&func.name, root).is_some() {
            return Ok(());
        }

        #[derive(Debug)]
        struct Node {
            deps: Vec<usize>,
            index: usize,
            low: usize,
            on_stack: bool,
        }
        let mut nodes: BTreeMap<usize, Node> = BTreeMap::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut counter = 0usize;
        let mut sccs: Vec<Vec<usize>> = Vec::new();

        // frame: (node id, position in its dependency list)
        let mut frames: Vec<(usize, usize)> = Vec::new();

        let deps_of = |this: &Self, id: usize| -> Vec<usize> {
            this.flow_deps(func, id)
                .into_iter()
                .filter(|d| this.final_instr(&func.name, *d).is_none())
                .collect()
        };

        let root_deps = deps_of(self, root);
        self.memo_instr.insert((func.name.clone(), root), MemoState::InProgress);
        nodes.insert(root, Node { deps: root_deps, index: counter, low: counter, on_stack: true });
        counter += 1;
        stack.push(root);
        frames.push((root, 0));

        while let Some((v, child_pos)) = frames.pop() {
            let next = nodes[&v].deps.get(child_pos).copied();
            match next {
                Some(w) => {
                    frames.push((v, child_pos + 1));
                    if let Some(wn) = nodes.get(&w) {
                        if wn.on_stack {
                            let wi = wn.index;
                            let node_v = nodes.get_mut(&v).unwrap();
                            node_v.low = node_v.low.min(wi);
                        }
                    } else {
                        let wdeps = deps_of(self, w);
                        self.memo_instr.insert((func.name.clone(), w), MemoState::InProgress);
                        nodes.insert(
                            w,
                            Node { deps: wdeps, index: counter, low: counter, on_stack: true },
                        );
                        counter += 1;
                        stack.push(w);
                        frames.push((w, 0));
                    }
                }
                None => {
                    // v finished: propagate lowlink, maybe pop an SCC
                    let vlow = nodes[&v].low;
                    let vindex = nodes[&v].index;
                    if let Some(&(parent, _)) = frames.last() {
                        let p = nodes.get_mut(&parent).unwrap();
                        p.low = p.low.min(vlow);
                    }
                    if vlow == vindex {
                        let mut scc = Vec::new();
                        while let Some(w) = stack.pop() {
                            nodes.get_mut(&w).unwrap().on_stack = false;
                            scc.push(w);
                            if w == v {
                                break;
                            }
                        }
                        scc.sort_unstable();
                        sccs.push(scc);
                    }
                }
            }
        }

        for scc in sccs {
            let self_loop = scc.len() == 1 && nodes[&scc[0]].deps.contains(&scc[0]);
            if scc.len() == 1 && !self_loop {
                let v = self.direct_eval(func, scc[0])?;
                self.memo_instr.insert((func.name.clone(), scc[0]), MemoState::Final(v));
            } else {
                let set: BTreeSet<usize> = scc.iter().copied().collect();
                self.solve_system(func, &set)?;
            }
        }
        Ok(())
    }

    /// Argument vector of one operand. All flow dependencies must already
    /// be final; in-progress callees contribute the generic FUNCTION
    /// embedding (the recursion cut of the call-graph propagation).
    fn operand_vector(&mut self, func: &IrFunction, instr: &IrInstruction, oi: usize) -> Result<Vector> {
        let op = &instr.operands[oi];
        match op.clazz {
            OperandClass::Const | OperandClass::Label => self.class_vec(op.clazz),
            OperandClass::Function => {
                if self.config.mode == Mode::FlowAware {
                    if let Some(name) = op.raw.strip_prefix('@') {
                        if let Some(callee) = self.module.function(name) {
                            if callee.is_definition {
                                return match self.memo_func.get(name) {
                                    Some(MemoState::InProgress) => self.class_vec(op.clazz),
                                    Some(MemoState::Final(v)) => Ok(v.clone()),
                                    None => self.function_vector(&callee.name.clone()),
                                };
                            }
                        }
                    }
                }
                self.class_vec(op.clazz)
            }
            OperandClass::Var | OperandClass::Ptr => {
                if self.config.mode == Mode::FlowAware {
                    let defs = self.rd[&func.name].def_ids(instr.id, oi);
                    if !defs.is_empty() {
                        let mut sum = linalg::zeros(self.config.dimension);
                        for d in defs {
                            let v = self
                                .final_instr(&func.name, d)
                                .cloned()
                                .ok_or_else(|| {
                                    Error::InvalidConfig(format!(
                                        "dependency {} of {} not evaluated",
                                        d, instr.id
                                    ))
                                })?;
                            linalg::add_assign(&mut sum, &v);
                        }
                        return Ok(sum);
                    }
                }
                self.class_vec(op.clazz)
            }
        }
    }

    fn direct_eval(&mut self, func: &IrFunction, id: usize) -> Result<Vector> {
        let instr = func.instruction(id).expect("instruction exists");
        let opcode = self.vocab.entity(&instr.opcode)?.clone();
        let ty = self.vocab.entity(instr.type_entity.name())?.clone();
        let mut args = linalg::zeros(self.config.dimension);
        for oi in 0..instr.operands.len() {
            let v = self.operand_vector(func, instr, oi)?;
            linalg::add_assign(&mut args, &v);
        }
        Ok(self.combine(&opcode, &ty, &args, self.config.w_a))
    }

    /// Jointly solve the instruction vectors of a strongly-interdependent
    /// set. Already-final members are treated as constants. The returned
    /// map covers every id in `pending`.
    pub fn resolve_cycle(
        &mut self,
        func_name: &str,
        pending: &BTreeSet<usize>,
    ) -> Result<BTreeMap<usize, Vector>> {
        let func = self.func(func_name)?;
        if let Some(&bad) = pending.iter().find(|id| func.instruction(**id).is_none()) {
            return Err(Error::InvalidConfig(format!(
                "no instruction {} in function `{}`",
                bad, func_name
            )));
        }
        // make sure every dependency outside the pending set is final
        for &id in pending {
            for dep in self.flow_deps(func, id) {
                if !pending.contains(&dep) && self.final_instr(func_name, dep).is_none() {
                    self.eval_instructions(func, dep)?;
                }
            }
        }
        let unknowns: BTreeSet<usize> = pending
            .iter()
            .copied()
            .filter(|id| self.final_instr(func_name, *id).is_none())
            .collect();
        if !unknowns.is_empty() {
            self.solve_system(func, &unknowns)?;
        }
        let mut out = BTreeMap::new();
        for &id in pending {
            out.insert(id, self.final_instr(func_name, id).expect("solved").clone());
        }
        Ok(out)
    }

    /// Assemble and solve `(I - Wa*M) X = base + Wa*known`, one scalar
    /// system per dimension, and memoize the solutions.
    fn solve_system(&mut self, func: &'a IrFunction, unknowns: &BTreeSet<usize>) -> Result<()> {
        let order: Vec<usize> = unknowns.iter().copied().collect();
        for id in &order {
            self.memo_instr.insert((func.name.clone(), *id), MemoState::InProgress);
        }
        let m = order.len();
        let n = self.config.dimension;
        let pos_of: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(p, id)| (*id, p)).collect();

        struct Row {
            base: Vector,
            known: Vector,
            coeffs: Vec<f64>,
        }
        let mut rows: Vec<Row> = Vec::with_capacity(m);
        for &id in &order {
            let instr = func.instruction(id).expect("instruction exists");
            let opcode = self.vocab.entity(&instr.opcode)?.clone();
            let ty = self.vocab.entity(instr.type_entity.name())?.clone();
            let base: Vector =
                (0..n).map(|i| self.config.w_o * opcode[i] + self.config.w_t * ty[i]).collect();
            let mut known = linalg::zeros(n);
            let mut coeffs = vec![0.0; m];
            for (oi, op) in instr.operands.iter().enumerate() {
                match op.clazz {
                    OperandClass::Var | OperandClass::Ptr
                        if self.config.mode == Mode::FlowAware =>
                    {
                        let defs = self.rd[&func.name].def_ids(instr.id, oi);
                        if defs.is_empty() {
                            let v = self.class_vec(op.clazz)?;
                            linalg::add_assign(&mut known, &v);
                        } else {
                            for d in defs {
                                if let Some(&p) = pos_of.get(&d) {
                                    coeffs[p] += 1.0;
                                } else {
                                    let v = self
                                        .final_instr(&func.name, d)
                                        .cloned()
                                        .ok_or_else(|| {
                                            Error::InvalidConfig(format!(
                                                "dependency {} of {} not evaluated",
                                                d, instr.id
                                            ))
                                        })?;
                                    linalg::add_assign(&mut known, &v);
                                }
                            }
                        }
                    }
                    _ => {
                        let v = self.operand_vector(func, instr, oi)?;
                        linalg::add_assign(&mut known, &v);
                    }
                }
            }
            rows.push(Row { base, known, coeffs });
        }

        let tol = self.config.solver_tolerance;
        let retries = self.config.max_perturb_retries;
        let mut rng = self.cycle_rng(&func.name, &order);
        let mut singular_attempts = 0usize;
        let mut attempts = 0usize;

        for attempt in 0..=retries {
            attempts += 1;
            let w_a = if attempt == 0 {
                self.config.w_a
            } else {
                let u: f64 = rng.random_range(0.0..1.0);
                self.config.w_a - self.config.delta_max * (1.0 - u)
            };
            let mut a = Matrix::zeros(m, m);
            for (k, row) in rows.iter().enumerate() {
                for j in 0..m {
                    a[(k, j)] = if k == j { 1.0 - w_a * row.coeffs[j] } else { -w_a * row.coeffs[j] };
                }
            }
            let lu = lu_factor(&a, 1e-12);
            if lu.is_none() {
                singular_attempts += 1;
            }
            // solve one scalar system per dimension
            let mut x = vec![linalg::zeros(n); m];
            for d in 0..n {
                let b: Vector = rows.iter().map(|r| r.base[d] + w_a * r.known[d]).collect();
                let xd = match &lu {
                    Some(f) => f.solve(&b),
                    None => min_norm_solve(&a, &b, 1e-12),
                };
                for k in 0..m {
                    x[k][d] = xd[k];
                }
            }
            // check the defining equations
            let mut residual = 0.0_f64;
            for (k, row) in rows.iter().enumerate() {
                for d in 0..n {
                    let mut rhs_arg = row.known[d];
                    for j in 0..m {
                        rhs_arg += row.coeffs[j] * x[j][d];
                    }
                    let r = x[k][d] - (row.base[d] + w_a * rhs_arg);
                    residual = residual.max(r.abs());
                }
            }
            if residual < tol && x.iter().flatten().all(|v| v.is_finite()) {
                for (k, id) in order.iter().enumerate() {
                    self.memo_instr
                        .insert((func.name.clone(), *id), MemoState::Final(x[k].clone()));
                }
                return Ok(());
            }
        }
        if singular_attempts == attempts && attempts > 1 {
            Err(Error::SingularAfterPerturbation { retries })
        } else {
            Err(Error::NoConvergence { retries })
        }
    }

    /// Per-cycle deterministic RNG: seeded from the config seed, the
    /// function name and the unknown set, so results do not depend on
    /// evaluation order.
    fn cycle_rng(&self, func_name: &str, order: &[usize]) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |byte: u8| {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        for b in self.config.rng_seed.to_le_bytes() {
            mix(b);
        }
        for b in func_name.bytes() {
            mix(b);
        }
        for id in order {
            for b in (*id as u64).to_le_bytes() {
                mix(b);
            }
        }
        ChaCha8Rng::seed_from_u64(h)
    }

    /// Sum of the live instructions of a block.
    pub fn basic_block_vector(&mut self, func_name: &str, label: &str) -> Result<Vector> {
        let key = (func_name.to_string(), label.to_string());
        if let Some(v) = self.memo_block.get(&key) {
            return Ok(v.clone());
        }
        let func = self.func(func_name)?;
        let block = func
            .block(label)
            .ok_or_else(|| Error::InvalidConfig(format!("no block `{}` in `{}`", label, func_name)))?;
        let live = flow::live_instructions(block, &self.rd[func_name], func);
        let mut sum = linalg::zeros(self.config.dimension);
        for id in live {
            let v = self.instruction_vector(func_name, id)?;
            linalg::add_assign(&mut sum, &v);
        }
        self.memo_block.insert(key, sum.clone());
        Ok(sum)
    }

    /// Sum of the block vectors of a function definition, memoized.
    /// Recursive call chains are cut at the call operand: an in-progress
    /// callee contributes the generic FUNCTION embedding.
    pub fn function_vector(&mut self, func_name: &str) -> Result<Vector> {
        match self.memo_func.get(func_name) {
            Some(MemoState::Final(v)) => return Ok(v.clone()),
            Some(MemoState::InProgress) => {
                // direct re-entry; resolve like a call operand would
                return self.class_vec(OperandClass::Function);
            }
            None => {}
        }
        let func = self.func(func_name)?;
        if !func.is_definition {
            return Err(Error::UnknownFunction(func_name.to_string()));
        }
        self.memo_func.insert(func_name.to_string(), MemoState::InProgress);
        let labels: Vec<String> = func.blocks.iter().map(|b| b.label.clone()).collect();
        let mut sum = linalg::zeros(self.config.dimension);
        for label in labels {
            let v = self.basic_block_vector(func_name, &label)?;
            linalg::add_assign(&mut sum, &v);
        }
        self.memo_func.insert(func_name.to_string(), MemoState::Final(sum.clone()));
        Ok(sum)
    }

    /// Fully populated hierarchy for the module.
    pub fn program_vector(&mut self) -> Result<ProgramVectors> {
        let func_names: Vec<String> =
            self.module.defined_functions().map(|f| f.name.clone()).collect();
        let mut program = linalg::zeros(self.config.dimension);
        let mut per_function = BTreeMap::new();
        for name in &func_names {
            let v = self.function_vector(name)?;
            linalg::add_assign(&mut program, &v);
            per_function.insert(name.clone(), v);
        }
        let mut per_instruction = BTreeMap::new();
        let mut per_block = BTreeMap::new();
        for name in &func_names {
            let func = self.func(name)?;
            let ids: Vec<usize> = func.instructions().map(|i| i.id).collect();
            for id in ids {
                let v = self.instruction_vector(name, id)?;
                per_instruction.insert((name.clone(), id), v);
            }
            let labels: Vec<String> = func.blocks.iter().map(|b| b.label.clone()).collect();
            for label in labels {
                let v = self.basic_block_vector(name, &label)?;
                per_block.insert((name.clone(), label), v);
            }
        }
        Ok(ProgramVectors { per_instruction, per_block, per_function, program })
    }
}

/// Convenience: encode a module in one call.
pub fn encode(
    module: &IrModule,
    vocab: &SeedVocabulary,
    config: EncodingConfig,
) -> Result<ProgramVectors> {
    let mut ctx = EncodingContext::new(module, vocab, config)?;
    ctx.program_vector()
}
