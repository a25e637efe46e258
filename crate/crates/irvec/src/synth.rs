//! Deterministic generators for synthetic IR modules: random slot/CFG
//! programs for analysis testing, a small-function corpus for vocabulary
//! training demos, kernel families with contrasting instruction mixes,
//! and twin corpora that share an entity set but not statement shapes.
//!
//! Generators take explicit seeds and a [`NameStyle`], so the same module
//! can be emitted twice with all locals and labels renamed (alpha-renaming
//! experiments need structurally identical twins).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// Naming scheme for generated locals, labels and parameters.
#[derive(Debug, Clone)]
pub struct NameStyle {
    pub value_prefix: String,
    pub block_prefix: String,
    pub param_prefix: String,
}

impl NameStyle {
    pub fn plain() -> Self {
        NameStyle {
            value_prefix: "v".into(),
            block_prefix: "b".into(),
            param_prefix: "p".into(),
        }
    }

    /// An alpha-renamed twin of [`NameStyle::plain`].
    pub fn decorated() -> Self {
        NameStyle {
            value_prefix: "renamed.val".into(),
            block_prefix: "lbl.q".into(),
            param_prefix: "arg_".into(),
        }
    }

    fn value(&self, i: usize) -> String {
        format!("{}{}", self.value_prefix, i)
    }

    fn block(&self, i: usize) -> String {
        format!("{}{}", self.block_prefix, i)
    }

    fn param(&self, i: usize) -> String {
        format!("{}{}", self.param_prefix, i)
    }
}

/// Shape limits for [`random_slot_cfg`].
#[derive(Debug, Clone)]
pub struct CfgParams {
    pub max_blocks: usize,
    pub max_slots: usize,
    pub max_ops_per_block: usize,
}

impl Default for CfgParams {
    fn default() -> Self {
        CfgParams { max_blocks: 8, max_slots: 3, max_ops_per_block: 4 }
    }
}

/// One random function built from integer slots (allocas and optionally a
/// pointer parameter), stores, loads, adds and random branch structure.
/// Deterministic in `seed`; `style` only renames.
pub fn random_slot_cfg(seed: u64, params: &CfgParams, style: &NameStyle) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    emit_random_function(&mut rng, "f0", params, style, &mut out);
    out
}

/// A module of several random functions; later functions may call earlier
/// ones, exercising the call-graph path.
pub fn random_module(seed: u64, n_funcs: usize, params: &CfgParams, style: &NameStyle) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..n_funcs {
        if i > 0 {
            out.push('\n');
        }
        let name = format!("f{}", i);
        let callee = if i > 0 && rng.random_bool(0.5) {
            Some(format!("f{}", rng.random_range(0..i)))
        } else {
            None
        };
        emit_random_function_with_call(&mut rng, &name, callee.as_deref(), params, style, &mut out);
    }
    out
}

fn emit_random_function(
    rng: &mut ChaCha8Rng,
    name: &str,
    params: &CfgParams,
    style: &NameStyle,
    out: &mut String,
) {
    emit_random_function_with_call(rng, name, None, params, style, out)
}

fn emit_random_function_with_call(
    rng: &mut ChaCha8Rng,
    name: &str,
    callee: Option<&str>,
    params: &CfgParams,
    style: &NameStyle,
    out: &mut String,
) {
    let nb = rng.random_range(1..=params.max_blocks.max(1));
    let nslots = rng.random_range(1..=params.max_slots.max(1));
    let param_slot = nslots >= 1 && rng.random_bool(0.3);
    let n_allocas = nslots - usize::from(param_slot);

    let p_ptr = style.param(0);
    let p_int = style.param(1);
    let p_c0 = style.param(2);
    let p_c1 = style.param(3);
    let _ = writeln!(
        out,
        "define void @{}(i32* %{}, i32 %{}, i1 %{}, i1 %{}) {{",
        name, p_ptr, p_int, p_c0, p_c1
    );

    let mut next_value = 0usize;
    let fresh = |next_value: &mut usize| {
        let v = style.value(*next_value);
        *next_value += 1;
        v
    };

    // slots and int values available for use
    let mut slots: Vec<String> = Vec::new();
    if param_slot {
        slots.push(p_ptr.clone());
    }
    let mut alloca_lines = Vec::new();
    for _ in 0..n_allocas.max(1) {
        let v = fresh(&mut next_value);
        alloca_lines.push(format!("  %{} = alloca i32", v));
        slots.push(v);
    }
    let mut values: Vec<String> = vec![p_int.clone()];

    for b in 0..nb {
        let _ = writeln!(out, "{}:", style.block(b));
        if b == 0 {
            for l in &alloca_lines {
                let _ = writeln!(out, "{}", l);
            }
            if let Some(callee) = callee {
                let _ = writeln!(out, "  call void @{}(i32* %{}, i32 %{}, i1 %{}, i1 %{})",
                    callee, p_ptr, p_int, p_c0, p_c1);
            }
        }
        let ops = rng.random_range(1..=params.max_ops_per_block.max(1));
        for _ in 0..ops {
            match rng.random_range(0..6) {
                0 | 1 => {
                    let slot = slots[rng.random_range(0..slots.len())].clone();
                    let value = if rng.random_bool(0.5) {
                        format!("{}", rng.random_range(0..100))
                    } else {
                        format!("%{}", values[rng.random_range(0..values.len())])
                    };
                    let _ = writeln!(out, "  store i32 {}, i32* %{}", value, slot);
                }
                2 | 3 => {
                    let slot = slots[rng.random_range(0..slots.len())].clone();
                    let v = fresh(&mut next_value);
                    let _ = writeln!(out, "  %{} = load i32, i32* %{}", v, slot);
                    values.push(v);
                }
                _ => {
                    let a = format!("%{}", values[rng.random_range(0..values.len())]);
                    let b2 = if rng.random_bool(0.4) {
                        format!("{}", rng.random_range(0..50))
                    } else {
                        format!("%{}", values[rng.random_range(0..values.len())])
                    };
                    let v = fresh(&mut next_value);
                    let op = ["add", "sub", "mul", "and", "xor"][rng.random_range(0..5)];
                    let _ = writeln!(out, "  %{} = {} i32 {}, {}", v, op, a, b2);
                    values.push(v);
                }
            }
        }
        // terminator
        if b == nb - 1 || nb == 1 {
            let _ = writeln!(out, "  ret void");
        } else {
            let target = |rng: &mut ChaCha8Rng| style.block(rng.random_range(1..nb));
            match rng.random_range(0..10) {
                0..=4 => {
                    let _ = writeln!(out, "  br label %{}", target(rng));
                }
                5..=7 => {
                    let c = if rng.random_bool(0.5) { &p_c0 } else { &p_c1 };
                    let _ = writeln!(
                        out,
                        "  br i1 %{}, label %{}, label %{}",
                        c,
                        target(rng),
                        target(rng)
                    );
                }
                8 => {
                    let _ = writeln!(
                        out,
                        "  switch i32 %{}, label %{} [ i32 0, label %{}  i32 1, label %{} ]",
                        p_int,
                        target(rng),
                        target(rng),
                        target(rng)
                    );
                }
                _ => {
                    let _ = writeln!(out, "  ret void");
                }
            }
        }
    }
    let _ = writeln!(out, "}}");
}

// ---------------------------------------------------------------------------
// Small-function corpus for vocabulary training demos and tests
// ---------------------------------------------------------------------------

/// A corpus of `n` small single-function modules drawn from eight template
/// families, together covering 30+ opcodes.
pub fn toy_corpus(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| toy_function(&mut rng, i)).collect()
}

fn toy_function(rng: &mut ChaCha8Rng, idx: usize) -> String {
    let name = format!("toy{}", idx);
    match idx % 8 {
        0 => int_arith_function(rng, &name),
        1 => float_arith_function(rng, &name),
        2 => memory_function(rng, &name),
        3 => logic_function(rng, &name),
        4 => control_function(rng, &name),
        5 => cast_function(rng, &name),
        6 => call_function(rng, &name),
        _ => vector_function(rng, &name),
    }
}

fn int_arith_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let mut body = String::new();
    let mut last = "%x".to_string();
    let n = rng.random_range(3..7);
    for i in 0..n {
        let op = ["add", "sub", "mul", "sdiv", "udiv"][rng.random_range(0..5)];
        let rhs = if rng.random_bool(0.5) {
            format!("{}", rng.random_range(1..40))
        } else {
            "%y".to_string()
        };
        let _ = writeln!(body, "  %t{} = {} i32 {}, {}", i, op, last, rhs);
        last = format!("%t{}", i);
    }
    let _ = writeln!(body, "  %c = icmp slt i32 {}, %y", last);
    let _ = writeln!(body, "  br i1 %c, label %a, label %b");
    let _ = writeln!(body, "a:\n  ret i32 {}", last);
    let _ = writeln!(body, "b:\n  ret i32 %y");
    format!("define i32 @{}(i32 %x, i32 %y) {{\nentry:\n{}}}\n", name, body)
}

fn float_arith_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let mut body = String::new();
    let mut last = "%x".to_string();
    let n = rng.random_range(3..6);
    for i in 0..n {
        let op = ["fadd", "fsub", "fmul", "fdiv"][rng.random_range(0..4)];
        let _ = writeln!(body, "  %t{} = {} float {}, %y", i, op, last);
        last = format!("%t{}", i);
    }
    let _ = writeln!(body, "  %c = fcmp olt float {}, %y", last);
    let _ = writeln!(body, "  %r = select i1 %c, float {}, float %x", last);
    let _ = writeln!(body, "  ret float %r");
    format!("define float @{}(float %x, float %y) {{\n{}}}\n", name, body)
}

fn memory_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "  %buf = alloca i32");
    let _ = writeln!(body, "  %acc = alloca i32");
    let _ = writeln!(body, "  store i32 %x, i32* %buf");
    let _ = writeln!(body, "  store i32 0, i32* %acc");
    let n = rng.random_range(2..5);
    for i in 0..n {
        let _ = writeln!(body, "  %l{} = load i32, i32* %buf", i);
        let _ = writeln!(body, "  %g{} = getelementptr i32, i32* %p, i64 {}", i, i);
        let _ = writeln!(body, "  store i32 %l{}, i32* %g{}", i, i);
    }
    let _ = writeln!(body, "  %f = load i32, i32* %acc");
    let _ = writeln!(body, "  ret i32 %f");
    format!("define i32 @{}(i32 %x, i32* %p) {{\n{}}}\n", name, body)
}

fn logic_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let mut body = String::new();
    let mut last = "%x".to_string();
    let ops = ["and", "or", "xor", "shl", "lshr", "ashr"];
    let n = rng.random_range(4..7);
    for (i, _) in (0..n).enumerate() {
        let op = ops[rng.random_range(0..ops.len())];
        let rhs =
            if rng.random_bool(0.4) { format!("{}", rng.random_range(1..8)) } else { "%y".into() };
        let _ = writeln!(body, "  %t{} = {} i32 {}, {}", i, op, last, rhs);
        last = format!("%t{}", i);
    }
    let _ = writeln!(body, "  ret i32 {}", last);
    format!("define i32 @{}(i32 %x, i32 %y) {{\n{}}}\n", name, body)
}

fn control_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let k = rng.random_range(1..30);
    format!(
        "define i32 @{name}(i32 %x) {{\nentry:\n  switch i32 %x, label %d [ i32 0, label %a  i32 {k}, label %b ]\n\
         a:\n  br label %m\n\
         b:\n  br label %m\n\
         d:\n  unreachable\n\
         m:\n  %r = phi i32 [ 1, %a ], [ 2, %b ]\n  ret i32 %r\n}}\n"
    )
}

fn cast_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let c = rng.random_range(1..100);
    format!(
        "define i64 @{name}(i32 %x, float %f, i32* %p) {{\n\
         \x20 %a = sext i32 %x to i64\n\
         \x20 %b = trunc i64 %a to i16\n\
         \x20 %c = zext i16 %b to i64\n\
         \x20 %d = sitofp i32 %x to double\n\
         \x20 %e = fptosi double %d to i64\n\
         \x20 %g = bitcast i32* %p to i64*\n\
         \x20 %h = add i64 %c, {c}\n\
         \x20 ret i64 %h\n}}\n"
    )
}

fn call_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let c = rng.random_range(1..50);
    format!(
        "define i32 @{name}_inner(i32 %x) {{\n  %r = mul i32 %x, {c}\n  ret i32 %r\n}}\n\
         define i32 @{name}(i32 %x) {{\n\
         \x20 %a = call i32 @{name}_inner(i32 %x)\n\
         \x20 %b = call i32 @{name}_inner(i32 {c})\n\
         \x20 %s = add i32 %a, %b\n\
         \x20 ret i32 %s\n}}\n"
    )
}

fn vector_function(rng: &mut ChaCha8Rng, name: &str) -> String {
    let n = rng.random_range(1..4);
    let mut body = String::new();
    let mut last = "%x".to_string();
    for i in 0..n {
        let op = ["fadd", "fmul"][rng.random_range(0..2)];
        let _ = writeln!(body, "  %w{} = {} <4 x float> {}, %y", i, op, last);
        last = format!("%w{}", i);
    }
    let _ = writeln!(body, "  ret void");
    format!(
        "define void @{}(<4 x float> %x, <4 x float> %y) {{\n{}}}\n",
        name, body
    )
}

// ---------------------------------------------------------------------------
// Kernel families with contrasting instruction mixes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    MemoryHeavy,
    ArithmeticHeavy,
}

/// One kernel of the requested family. Memory-heavy kernels are dominated
/// by alloca/store/load/getelementptr traffic; arithmetic-heavy kernels by
/// integer and float computation.
pub fn family_module(seed: u64, family: Family, idx: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match family {
        Family::MemoryHeavy => {
            let mut body = String::new();
            let nslots = rng.random_range(2..5);
            for s in 0..nslots {
                let _ = writeln!(body, "  %s{} = alloca i32", s);
            }
            let n = rng.random_range(8..16);
            let mut loads = 0usize;
            for i in 0..n {
                match rng.random_range(0..5) {
                    0 | 1 => {
                        let s = rng.random_range(0..nslots);
                        let v = rng.random_range(0..100);
                        let _ = writeln!(body, "  store i32 {}, i32* %s{}", v, s);
                    }
                    2 | 3 => {
                        let s = rng.random_range(0..nslots);
                        let _ = writeln!(body, "  %l{} = load i32, i32* %s{}", loads, s);
                        loads += 1;
                    }
                    _ => {
                        let _ = writeln!(
                            body,
                            "  %g{} = getelementptr i32, i32* %q, i64 {}",
                            i,
                            rng.random_range(0..16)
                        );
                        let _ = writeln!(body, "  store i32 %a, i32* %g{}", i);
                    }
                }
            }
            let _ = writeln!(body, "  ret void");
            format!("define void @mem{}(i32 %a, i32* %q) {{\n{}}}\n", idx, body)
        }
        Family::ArithmeticHeavy => {
            let mut body = String::new();
            let mut last = "%a".to_string();
            let mut flast = "%f".to_string();
            let n = rng.random_range(12..22);
            for i in 0..n {
                if rng.random_bool(0.7) {
                    let op = ["add", "sub", "mul", "and", "or", "xor", "shl"]
                        [rng.random_range(0..7)];
                    let rhs = if rng.random_bool(0.5) {
                        format!("{}", rng.random_range(1..64))
                    } else {
                        "%b".to_string()
                    };
                    let _ = writeln!(body, "  %t{} = {} i32 {}, {}", i, op, last, rhs);
                    last = format!("%t{}", i);
                } else {
                    let op = ["fadd", "fsub", "fmul"][rng.random_range(0..3)];
                    let _ = writeln!(body, "  %u{} = {} float {}, %f", i, op, flast);
                    flast = format!("%u{}", i);
                }
            }
            let _ = writeln!(body, "  ret i32 {}", last);
            format!(
                "define i32 @arith{}(i32 %a, i32 %b, float %f) {{\n{}}}\n",
                idx, body
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Twin corpora: one entity set, disjoint statement shapes
// ---------------------------------------------------------------------------

/// Training corpus: every opcode/type/class entity the twin corpus uses,
/// in its own fixed statement shapes.
pub fn oov_corpus_a() -> Vec<String> {
    vec![
        "define i32 @a_int(i32 %x, i32 %y) {\n\
         \x20 %v0 = add i32 %x, %y\n  %v1 = sub i32 %v0, %y\n  %v2 = mul i32 %v0, %v1\n\
         \x20 %v3 = sdiv i32 %v2, %x\n  %v4 = udiv i32 %v2, %x\n  %v5 = and i32 %v0, %v1\n\
         \x20 %v6 = or i32 %v0, %v1\n  %v7 = xor i32 %v0, %v1\n  %v8 = shl i32 %v0, %x\n\
         \x20 %v9 = lshr i32 %v0, %x\n  %v10 = ashr i32 %v0, %x\n  ret i32 %v10\n}\n"
            .to_string(),
        "define float @a_float(float %x, float %y) {\n\
         \x20 %v0 = fadd float %x, %y\n  %v1 = fsub float %v0, %y\n\
         \x20 %v2 = fmul float %v0, %v1\n  %v3 = fdiv float %v2, %x\n\
         \x20 %c = fcmp olt float %v3, %y\n  %r = select i1 %c, float %v3, float %x\n\
         \x20 ret float %r\n}\n"
            .to_string(),
        "define i32 @a_mem(i32 %x, i32* %p) {\n\
         \x20 %buf = alloca i32\n  %fbuf = alloca float\n  store i32 %x, i32* %buf\n\
         \x20 %l = load i32, i32* %buf\n  %g = getelementptr i32, i32* %p, i64 4\n\
         \x20 store i32 %l, i32* %g\n  ret i32 %l\n}\n"
            .to_string(),
        "define i32 @a_ctl(i32 %x, i32 %y) {\nentry:\n\
         \x20 %c = icmp slt i32 %x, %y\n  br i1 %c, label %t, label %f\n\
         t:\n  br label %m\n\
         f:\n  br label %m\n\
         m:\n  %r = phi i32 [ %x, %t ], [ %y, %f ]\n  ret i32 %r\n}\n"
            .to_string(),
        "define void @a_switch(i32 %x) {\nentry:\n\
         \x20 switch i32 %x, label %d [ i32 3, label %one ]\n\
         one:\n  ret void\n\
         d:\n  unreachable\n}\n"
            .to_string(),
        "define i32 @a_callee(i32 %x) {\n  %r = mul i32 %x, 3\n  ret i32 %r\n}\n\
         define i32 @a_call(i32 %x) {\n  %r = call i32 @a_callee(i32 %x)\n  ret i32 %r\n}\n"
            .to_string(),
        "define i64 @a_cast(i32 %x, float %f, i32* %p) {\n\
         \x20 %a = trunc i32 %x to i16\n  %b = zext i16 %a to i64\n  %c = sext i32 %x to i64\n\
         \x20 %d = bitcast i32* %p to i64*\n  %e = sitofp i32 %x to double\n\
         \x20 %g = fptosi double %e to i64\n  %h = add i64 %b, %c\n  ret i64 %h\n}\n"
            .to_string(),
    ]
}

/// Held-out corpus: the same opcode/type/class entities as
/// [`oov_corpus_a`], combined into statement shapes the training corpus
/// never contains (constants in new positions, new types for memory ops,
/// new arities).
pub fn oov_corpus_b() -> Vec<String> {
    vec![
        "define i32 @b_int(i32 %x) {\n\
         \x20 %v0 = add i32 %x, 7\n  %v1 = sub i32 9, %v0\n  %v2 = mul i32 %v1, 3\n\
         \x20 %v3 = sdiv i32 100, %v2\n  %v4 = udiv i32 %v3, 2\n  %v5 = and i32 %v4, 15\n\
         \x20 %v6 = or i32 8, %v5\n  %v7 = xor i32 5, %v6\n  %v8 = shl i32 %v7, 2\n\
         \x20 %v9 = lshr i32 %v8, 1\n  %v10 = ashr i32 %v9, 1\n  ret i32 7\n}\n"
            .to_string(),
        "define float @b_float(float %x) {\n\
         \x20 %v0 = fadd float %x, 1.5\n  %v1 = fsub float %v0, 0.25\n\
         \x20 %v2 = fmul float 2.0, %v1\n  %v3 = fdiv float %v2, 4.0\n\
         \x20 %c = fcmp olt float %v3, 1.0\n  %r = select i1 %c, float 3.5, float 7.5\n\
         \x20 ret float %r\n}\n"
            .to_string(),
        "define float @b_mem(float %x, float* %p, i32** %pp) {\n\
         \x20 %fb = alloca float\n  %pb = alloca i32*\n  store float %x, float* %fb\n\
         \x20 %l = load float, float* %fb\n  %q = load i32*, i32** %pp\n\
         \x20 store float 0.5, float* %p\n\
         \x20 %g = getelementptr float, float* %p, i64 2, i32 1\n\
         \x20 ret float %l\n}\n"
            .to_string(),
        "define i32 @b_ctl(i32 %x) {\nentry:\n\
         \x20 %c = icmp slt i32 %x, 42\n  br i1 %c, label %t, label %f\n\
         t:\n  br label %m\n\
         f:\n  br label %m\n\
         m:\n  %r = phi i32 [ 11, %t ], [ 22, %f ]\n  ret i32 %r\n}\n"
            .to_string(),
        "define void @b_switch(i32 %x) {\nentry:\n\
         \x20 switch i32 %x, label %d [ i32 0, label %one  i32 9, label %two ]\n\
         one:\n  ret void\n\
         two:\n  ret void\n\
         d:\n  unreachable\n}\n"
            .to_string(),
        "define float @b_callee(float %x, float %y) {\n\
         \x20 %r = fadd float %x, %y\n  ret float %r\n}\n\
         define float @b_call(float %x) {\n\
         \x20 %r = call float @b_callee(float %x, float %x)\n  ret float %r\n}\n"
            .to_string(),
        "define i64 @b_cast(float %f) {\n\
         \x20 %a = trunc i64 900 to i16\n  %b = zext i16 100 to i64\n  %c = sext i16 -3 to i64\n\
         \x20 %d = bitcast float %f to i32\n  %e = sitofp i64 77 to double\n\
         \x20 %g = fptosi double 2.5 to i64\n  %h = add i64 %b, 1\n  ret i64 %h\n}\n"
            .to_string(),
    ]
}
