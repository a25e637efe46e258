//! Line-oriented parser for the textual LLVM-IR subset.
//!
//! The parser runs in two phases. Phase one builds the structural module
//! (functions, blocks, instructions) with operands recorded as raw tokens
//! plus a syntactic kind. Phase two resolves `%`-operands against
//! parameter lists and instruction results to assign operand classes,
//! SSA definition links and pointee roots, and validates the module
//! invariants (unique names, terminator placement, branch targets).

use std::collections::{BTreeMap, BTreeSet};

use super::{
    IrBasicBlock, IrFunction, IrInstruction, IrModule, IrParam, Operand, OperandClass, TypeEntity,
};
use crate::error::{Error, Result};

/// Parser configuration. `write_opcodes` is the set of opcodes classified
/// as memory-writing; it contains `store` at minimum.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub write_opcodes: BTreeSet<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        let mut write_opcodes = BTreeSet::new();
        write_opcodes.insert("store".to_string());
        ParseOptions { write_opcodes }
    }
}

pub fn parse_module(text: &str) -> Result<IrModule> {
    parse_module_with(text, &ParseOptions::default(), "module")
}

pub fn parse_module_named(text: &str, name: &str) -> Result<IrModule> {
    parse_module_with(text, &ParseOptions::default(), name)
}

/// Internal full type representation; only pointer-ness and the erased
/// entity survive into the module.
#[derive(Debug, Clone, PartialEq)]
enum Type {
    Void,
    Int,
    Float,
    Ptr,
    Vector,
    Array,
    Struct,
    Func,
    Label,
    Metadata,
    Unknown,
}

impl Type {
    fn erase(&self) -> TypeEntity {
        match self {
            Type::Void => TypeEntity::VoidTy,
            Type::Int => TypeEntity::IntegerTy,
            Type::Float => TypeEntity::FloatTy,
            Type::Ptr => TypeEntity::PointerTy,
            Type::Vector => TypeEntity::VectorTy,
            Type::Array => TypeEntity::ArrayTy,
            Type::Struct => TypeEntity::StructTy,
            Type::Func => TypeEntity::FunctionTy,
            Type::Label => TypeEntity::LabelTy,
            Type::Metadata | Type::Unknown => TypeEntity::UnknownTy,
        }
    }

    fn is_pointer(&self) -> bool {
        matches!(self, Type::Ptr)
    }
}

/// A parsed type with one level of inner structure: the pointee of a
/// pointer type (recovers the loaded type from an old-style `load i32*
/// %p`) or the return component of a function type.
#[derive(Debug, Clone)]
struct ParsedType {
    ty: Type,
    pointee: Option<Box<ParsedType>>,
}

impl ParsedType {
    fn plain(ty: Type) -> Self {
        ParsedType { ty, pointee: None }
    }
}

pub(super) fn normalize_type_token(raw: &str) -> TypeEntity {
    let mut cur = Cursor::new(raw, 0);
    match parse_type(&mut cur) {
        Ok(t) => t.ty.erase(),
        Err(_) => TypeEntity::UnknownTy,
    }
}

/// Raw operand before class resolution.
#[derive(Debug, Clone)]
enum RawOperand {
    /// `%name` in a value position.
    Local(String),
    /// `@name` in a value position.
    Global(String),
    /// Literal or constant expression.
    Const(String),
    /// `%name` in a label position (branch target, phi incoming label).
    Label(String),
}

#[derive(Debug)]
struct PreInstruction {
    opcode: String,
    type_entity: TypeEntity,
    operands: Vec<RawOperand>,
    result_name: Option<String>,
    result_pointer: Option<bool>,
    successors: Vec<String>,
    is_terminator: bool,
    text: String,
    line: usize,
}

#[derive(Debug)]
struct PreBlock {
    label: String,
    instructions: Vec<PreInstruction>,
    line: usize,
}

#[derive(Debug)]
struct PreFunction {
    name: String,
    params: Vec<(String, ParsedType)>,
    blocks: Vec<PreBlock>,
    header: String,
    line: usize,
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Local(String),
    Global(String),
    Num(String),
    Str(String),
    Meta(String),
    AttrGroup(String),
    Punct(char),
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: std::marker::PhantomData<&'a str>,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '$' | '-')
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, _src: std::marker::PhantomData }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.pos + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn peek_char(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn take_string(&mut self) -> String {
        // opening quote already peeked
        let mut s = String::from('"');
        self.pos += 1;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            s.push(c);
            self.pos += 1;
            if c == '"' {
                break;
            }
        }
        s
    }

    fn take_name(&mut self) -> String {
        if self.chars.get(self.pos) == Some(&'"') {
            let quoted = self.take_string();
            return quoted.trim_matches('"').to_string();
        }
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos]) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn next_tok(&mut self) -> Result<Tok> {
        self.skip_ws();
        let c = *self.chars.get(self.pos).ok_or_else(|| self.err("unexpected end of line"))?;
        match c {
            '%' => {
                self.pos += 1;
                Ok(Tok::Local(self.take_name()))
            }
            '@' => {
                self.pos += 1;
                Ok(Tok::Global(self.take_name()))
            }
            '!' => {
                self.pos += 1;
                Ok(Tok::Meta(self.take_name()))
            }
            '#' => {
                self.pos += 1;
                Ok(Tok::AttrGroup(self.take_name()))
            }
            '"' => Ok(Tok::Str(self.take_string())),
            '-' | '+' => {
                self.pos += 1;
                let rest = self.take_num();
                Ok(Tok::Num(format!("{}{}", c, rest)))
            }
            d if d.is_ascii_digit() => Ok(Tok::Num(self.take_num())),
            a if a.is_ascii_alphabetic() || a == '_' || a == '.' || a == '$' => {
                let w = self.take_name();
                if w.is_empty() {
                    self.pos += 1;
                    Ok(Tok::Punct(a))
                } else {
                    Ok(Tok::Word(w))
                }
            }
            p => {
                self.pos += 1;
                Ok(Tok::Punct(p))
            }
        }
    }

    fn take_num(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_hexdigit()
                || matches!(c, '.' | 'x' | 'X' | 'e' | 'E' | 'p' | 'P')
                || ((c == '+' || c == '-')
                    && matches!(self.chars.get(self.pos - 1), Some('e') | Some('E')))
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn peek_tok(&mut self) -> Option<Tok> {
        let save = self.pos;
        let t = self.next_tok().ok();
        self.pos = save;
        t
    }

    fn eat_punct(&mut self, p: char) -> bool {
        let save = self.pos;
        match self.next_tok() {
            Ok(Tok::Punct(c)) if c == p => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    fn expect_punct(&mut self, p: char) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", p)))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let save = self.pos;
        match self.next_tok() {
            Ok(Tok::Word(s)) if s == w => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", w)))
        }
    }

    fn expect_local(&mut self) -> Result<String> {
        match self.next_tok()? {
            Tok::Local(n) => Ok(n),
            t => Err(self.err(format!("expected local value, found {:?}", t))),
        }
    }

    /// Skip a balanced group starting at the given opening punct
    /// (already consumed); returns the consumed text.
    fn skip_balanced(&mut self, open: char, close: char) -> Result<String> {
        let start = self.pos;
        let mut depth = 1usize;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c == '"' {
                self.take_string();
                continue;
            }
            self.pos += 1;
            if c == open {
                depth += 1;
            } else if c == close {
                depth -= 1;
                if depth == 0 {
                    let inner: String = self.chars[start..self.pos - 1].iter().collect();
                    return Ok(inner);
                }
            }
        }
        Err(self.err(format!("unbalanced `{}`", open)))
    }
}

fn is_float_keyword(w: &str) -> bool {
    matches!(w, "half" | "bfloat" | "float" | "double" | "fp128" | "x86_fp80" | "ppc_fp128")
}

fn is_int_type(w: &str) -> bool {
    w.len() > 1 && w.starts_with('i') && w[1..].chars().all(|c| c.is_ascii_digit())
}

fn parse_type(cur: &mut Cursor) -> Result<ParsedType> {
    let save = cur.pos;
    let tok = cur.next_tok()?;
    let mut base = match tok {
        Tok::Word(w) => {
            if w == "void" {
                ParsedType::plain(Type::Void)
            } else if is_int_type(&w) {
                ParsedType::plain(Type::Int)
            } else if is_float_keyword(&w) {
                ParsedType::plain(Type::Float)
            } else if w == "label" {
                ParsedType::plain(Type::Label)
            } else if w == "metadata" {
                ParsedType::plain(Type::Metadata)
            } else if w == "ptr" {
                ParsedType { ty: Type::Ptr, pointee: Some(Box::new(ParsedType::plain(Type::Unknown))) }
            } else if w == "opaque" {
                ParsedType::plain(Type::Struct)
            } else {
                ParsedType::plain(Type::Unknown)
            }
        }
        Tok::Local(_) => ParsedType::plain(Type::Struct), // named struct type
        Tok::Punct('<') => {
            // <N x T> or <vscale x N x T> or packed struct <{ ... }>
            if cur.peek_char() == Some('{') {
                cur.next_tok()?;
                cur.skip_balanced('{', '}')?;
                cur.expect_punct('>')?;
                ParsedType::plain(Type::Struct)
            } else {
                cur.eat_word("vscale");
                let _ = cur.eat_punct('x');
                match cur.next_tok()? {
                    Tok::Num(_) => {}
                    t => return Err(cur.err(format!("expected vector length, found {:?}", t))),
                }
                cur.expect_punct('x')
                    .or_else(|_| cur.expect_word("x"))
                    .map_err(|_| cur.err("expected `x` in vector type"))?;
                parse_type(cur)?;
                cur.expect_punct('>')?;
                ParsedType::plain(Type::Vector)
            }
        }
        Tok::Punct('[') => {
            match cur.next_tok()? {
                Tok::Num(_) => {}
                t => return Err(cur.err(format!("expected array length, found {:?}", t))),
            }
            cur.expect_punct('x').or_else(|_| cur.expect_word("x")).map_err(|_| cur.err("expected `x` in array type"))?;
            parse_type(cur)?;
            cur.expect_punct(']')?;
            ParsedType::plain(Type::Array)
        }
        Tok::Punct('{') => {
            cur.skip_balanced('{', '}')?;
            ParsedType::plain(Type::Struct)
        }
        _ => {
            cur.pos = save;
            return Err(cur.err("expected type"));
        }
    };
    loop {
        if cur.eat_punct('*') {
            base = ParsedType { ty: Type::Ptr, pointee: Some(Box::new(base)) };
        } else if cur.peek_char() == Some('(') {
            cur.next_tok()?;
            cur.skip_balanced('(', ')')?;
            // function type; the return component rides in `pointee`
            base = ParsedType { ty: Type::Func, pointee: Some(Box::new(base)) };
        } else {
            break;
        }
    }
    Ok(base)
}

const CONST_WORDS: &[&str] =
    &["true", "false", "null", "undef", "poison", "none", "zeroinitializer"];

const CONSTEXPR_WORDS: &[&str] = &[
    "getelementptr", "bitcast", "inttoptr", "ptrtoint", "trunc", "zext", "sext", "icmp", "fcmp",
    "add", "sub", "mul", "select", "addrspacecast",
];

/// Parse one value token in a typed position. `ty` is the declared type of
/// the position when known (used to pre-classify locals is deferred; here
/// it only matters for diagnostics).
fn parse_value(cur: &mut Cursor) -> Result<RawOperand> {
    let save = cur.pos;
    let tok = cur.next_tok()?;
    match tok {
        Tok::Local(n) => Ok(RawOperand::Local(n)),
        Tok::Global(n) => Ok(RawOperand::Global(n)),
        Tok::Num(n) => Ok(RawOperand::Const(n)),
        Tok::Str(s) => Ok(RawOperand::Const(s)),
        Tok::Word(w) if CONST_WORDS.contains(&w.as_str()) => Ok(RawOperand::Const(w)),
        Tok::Word(w) if w == "c" && cur.peek_char() == Some('"') => {
            let s = match cur.next_tok()? {
                Tok::Str(s) => s,
                _ => unreachable!(),
            };
            Ok(RawOperand::Const(format!("c{}", s)))
        }
        Tok::Word(w) if w == "blockaddress" && cur.peek_char() == Some('(') => {
            cur.next_tok()?;
            let inner = cur.skip_balanced('(', ')')?;
            Ok(RawOperand::Label(format!("blockaddress({})", inner.trim())))
        }
        Tok::Word(w) if CONSTEXPR_WORDS.contains(&w.as_str()) => {
            // constant expression: op ( ... ) possibly prefixed by keywords
            while cur.eat_word("inbounds") || cur.eat_word("nuw") || cur.eat_word("nsw") {}
            if cur.peek_char() == Some('(') {
                cur.next_tok()?;
                let inner = cur.skip_balanced('(', ')')?;
                Ok(RawOperand::Const(format!("{}({})", w, inner.trim())))
            } else {
                cur.pos = save;
                Err(cur.err(format!("expected value, found `{}`", w)))
            }
        }
        Tok::Punct(p @ ('<' | '[' | '{')) => {
            let close = match p {
                '<' => '>',
                '[' => ']',
                _ => '}',
            };
            let inner = cur.skip_balanced(p, close)?;
            Ok(RawOperand::Const(format!("{}{}{}", p, inner, close)))
        }
        t => {
            cur.pos = save;
            Err(cur.err(format!("expected value, found {:?}", t)))
        }
    }
}

fn parse_label_ref(cur: &mut Cursor) -> Result<String> {
    cur.expect_word("label")?;
    cur.expect_local()
}

// ---------------------------------------------------------------------------
// Instruction parsing
// ---------------------------------------------------------------------------

const BINOPS: &[&str] = &[
    "add", "sub", "mul", "sdiv", "udiv", "srem", "urem", "fadd", "fsub", "fmul", "fdiv", "frem",
    "and", "or", "xor", "shl", "lshr", "ashr",
];

const CAST_OPS: &[&str] = &[
    "trunc", "zext", "sext", "fptrunc", "fpext", "fptoui", "fptosi", "uitofp", "sitofp",
    "ptrtoint", "inttoptr", "bitcast", "addrspacecast",
];

const FLAG_WORDS: &[&str] = &[
    "nuw", "nsw", "exact", "fast", "nnan", "ninf", "nsz", "arcp", "contract", "afn", "reassoc",
    "disjoint",
];

const UNSUPPORTED_OPS: &[&str] = &[
    "invoke", "callbr", "resume", "landingpad", "catchswitch", "catchret", "cleanupret",
    "cleanuppad", "catchpad", "indirectbr", "va_arg", "cmpxchg", "atomicrmw", "fence",
];

const ICMP_PREDS: &[&str] = &["eq", "ne", "ugt", "uge", "ult", "ule", "sgt", "sge", "slt", "sle"];
const FCMP_PREDS: &[&str] = &[
    "oeq", "ogt", "oge", "olt", "ole", "one", "ord", "ueq", "ugt", "uge", "ult", "ule", "une",
    "uno", "false", "true",
];

struct InstrParser;

impl InstrParser {
    fn parse(&self, cur: &mut Cursor, text: &str) -> Result<PreInstruction> {
        let mut result_name = None;
        let save = cur.pos;
        if let Ok(Tok::Local(n)) = cur.next_tok() {
            if cur.eat_punct('=') {
                result_name = Some(n);
            } else {
                cur.pos = save;
            }
        } else {
            cur.pos = save;
        }

        // drop call markers
        while cur.eat_word("tail") || cur.eat_word("musttail") || cur.eat_word("notail") {}

        let opcode = match cur.next_tok()? {
            Tok::Word(w) => w,
            t => return Err(cur.err(format!("expected opcode, found {:?}", t))),
        };

        if UNSUPPORTED_OPS.contains(&opcode.as_str()) {
            return Err(Error::UnsupportedConstruct { line: cur.line, token: opcode });
        }

        let mut instr = PreInstruction {
            opcode: opcode.clone(),
            type_entity: TypeEntity::UnknownTy,
            operands: Vec::new(),
            result_name,
            result_pointer: None,
            successors: Vec::new(),
            is_terminator: false,
            text: text.to_string(),
            line: cur.line,
        };

        let no_result = |instr: &PreInstruction, cur: &Cursor| -> Result<()> {
            if instr.result_name.is_some() {
                Err(cur.err(format!("`{}` cannot define a value", instr.opcode)))
            } else {
                Ok(())
            }
        };

        match opcode.as_str() {
            "alloca" => {
                cur.eat_word("inalloca");
                let allocated = parse_type(cur)?;
                instr.type_entity = allocated.ty.erase();
                instr.result_pointer = Some(true);
                // optional `, <ty> <count>` and/or `, align N`, `, addrspace(N)`
                while cur.eat_punct(',') {
                    if cur.eat_word("align") {
                        cur.next_tok()?;
                    } else if cur.eat_word("addrspace") {
                        if cur.eat_punct('(') {
                            cur.skip_balanced('(', ')')?;
                        }
                    } else {
                        parse_type(cur)?;
                        let count = parse_value(cur)?;
                        instr.operands.push(count);
                    }
                }
            }
            "load" => {
                cur.eat_word("volatile");
                let t1 = parse_type(cur)?;
                let loaded = if cur.eat_punct(',') {
                    parse_type(cur)?;
                    t1
                } else {
                    match t1.pointee {
                        Some(p) => *p,
                        None => return Err(cur.err("load of a non-pointer type")),
                    }
                };
                let ptr = parse_value(cur)?;
                instr.operands.push(ptr);
                instr.type_entity = loaded.ty.erase();
                instr.result_pointer = Some(loaded.ty.is_pointer());
                self.skip_trailing(cur)?;
            }
            "store" => {
                no_result(&instr, cur)?;
                cur.eat_word("volatile");
                let vt = parse_type(cur)?;
                let value = parse_value(cur)?;
                cur.expect_punct(',')?;
                parse_type(cur)?;
                let ptr = parse_value(cur)?;
                instr.operands.push(value);
                instr.operands.push(ptr);
                instr.type_entity = vt.ty.erase();
                self.skip_trailing(cur)?;
            }
            op if BINOPS.contains(&op) => {
                while let Some(Tok::Word(w)) = cur.peek_tok() {
                    if FLAG_WORDS.contains(&w.as_str()) {
                        cur.next_tok()?;
                    } else {
                        break;
                    }
                }
                let ty = parse_type(cur)?;
                let a = parse_value(cur)?;
                cur.expect_punct(',')?;
                let b = parse_value(cur)?;
                instr.operands.push(a);
                instr.operands.push(b);
                instr.type_entity = ty.ty.erase();
                instr.result_pointer = Some(ty.ty.is_pointer());
            }
            "fneg" => {
                while let Some(Tok::Word(w)) = cur.peek_tok() {
                    if FLAG_WORDS.contains(&w.as_str()) {
                        cur.next_tok()?;
                    } else {
                        break;
                    }
                }
                let ty = parse_type(cur)?;
                let v = parse_value(cur)?;
                instr.operands.push(v);
                instr.type_entity = ty.ty.erase();
                instr.result_pointer = Some(false);
            }
            "icmp" | "fcmp" => {
                while let Some(Tok::Word(w)) = cur.peek_tok() {
                    if FLAG_WORDS.contains(&w.as_str()) && opcode == "fcmp" {
                        cur.next_tok()?;
                    } else {
                        break;
                    }
                }
                let pred = match cur.next_tok()? {
                    Tok::Word(w) => w,
                    t => return Err(cur.err(format!("expected predicate, found {:?}", t))),
                };
                let preds = if opcode == "icmp" { ICMP_PREDS } else { FCMP_PREDS };
                if !preds.contains(&pred.as_str()) {
                    return Err(cur.err(format!("unknown {} predicate `{}`", opcode, pred)));
                }
                parse_type(cur)?;
                let a = parse_value(cur)?;
                cur.expect_punct(',')?;
                let b = parse_value(cur)?;
                instr.operands.push(a);
                instr.operands.push(b);
                // comparison results are booleans
                instr.type_entity = TypeEntity::IntegerTy;
                instr.result_pointer = Some(false);
            }
            "br" => {
                no_result(&instr, cur)?;
                instr.is_terminator = true;
                instr.type_entity = TypeEntity::VoidTy;
                if cur.eat_word("label") {
                    let target = cur.expect_local()?;
                    instr.operands.push(RawOperand::Label(target.clone()));
                    instr.successors.push(target);
                } else {
                    parse_type(cur)?;
                    let cond = parse_value(cur)?;
                    cur.expect_punct(',')?;
                    let t = parse_label_ref(cur)?;
                    cur.expect_punct(',')?;
                    let f = parse_label_ref(cur)?;
                    instr.operands.push(cond);
                    instr.operands.push(RawOperand::Label(t.clone()));
                    instr.operands.push(RawOperand::Label(f.clone()));
                    instr.successors.push(t);
                    if !instr.successors.contains(&f) {
                        instr.successors.push(f);
                    }
                }
            }
            "switch" => {
                no_result(&instr, cur)?;
                instr.is_terminator = true;
                instr.type_entity = TypeEntity::VoidTy;
                parse_type(cur)?;
                let v = parse_value(cur)?;
                cur.expect_punct(',')?;
                let default = parse_label_ref(cur)?;
                instr.operands.push(v);
                instr.operands.push(RawOperand::Label(default.clone()));
                instr.successors.push(default);
                cur.expect_punct('[')?;
                loop {
                    if cur.eat_punct(']') {
                        break;
                    }
                    parse_type(cur)?;
                    let case = parse_value(cur)?;
                    cur.expect_punct(',')?;
                    let target = parse_label_ref(cur)?;
                    instr.operands.push(case);
                    instr.operands.push(RawOperand::Label(target.clone()));
                    if !instr.successors.contains(&target) {
                        instr.successors.push(target);
                    }
                }
            }
            "ret" => {
                no_result(&instr, cur)?;
                instr.is_terminator = true;
                if cur.eat_word("void") {
                    instr.type_entity = TypeEntity::VoidTy;
                } else {
                    let ty = parse_type(cur)?;
                    let v = parse_value(cur)?;
                    instr.operands.push(v);
                    instr.type_entity = ty.ty.erase();
                }
            }
            "unreachable" => {
                no_result(&instr, cur)?;
                instr.is_terminator = true;
                instr.type_entity = TypeEntity::VoidTy;
            }
            "call" => {
                // strip calling conventions and return attributes
                loop {
                    match cur.peek_tok() {
                        Some(Tok::Word(w))
                            if matches!(
                                w.as_str(),
                                "ccc" | "fastcc" | "coldcc" | "tailcc" | "swiftcc"
                                    | "zeroext" | "signext" | "inreg" | "noundef" | "nonnull"
                                    | "noalias" | "nocapture" | "nofree" | "range"
                            ) =>
                        {
                            cur.next_tok()?;
                            if cur.peek_char() == Some('(') {
                                cur.next_tok()?;
                                cur.skip_balanced('(', ')')?;
                            }
                        }
                        _ => break,
                    }
                }
                let ret = parse_type(cur)?;
                let callee = match cur.next_tok()? {
                    Tok::Global(g) => RawOperand::Global(g),
                    Tok::Local(l) => RawOperand::Local(l),
                    Tok::Word(w) if w == "asm" => {
                        return Err(Error::UnsupportedConstruct {
                            line: cur.line,
                            token: "inline asm".to_string(),
                        })
                    }
                    t => return Err(cur.err(format!("expected callee, found {:?}", t))),
                };
                instr.operands.push(callee);
                cur.expect_punct('(')?;
                loop {
                    if cur.eat_punct(')') {
                        break;
                    }
                    parse_type(cur)?;
                    // parameter attributes between type and value
                    while let Some(Tok::Word(w)) = cur.peek_tok() {
                        if matches!(
                            w.as_str(),
                            "noundef" | "nocapture" | "readonly" | "writeonly" | "nonnull"
                                | "noalias" | "signext" | "zeroext" | "inreg" | "returned"
                                | "dereferenceable" | "byval" | "sret" | "align" | "nofree"
                                | "immarg"
                        ) {
                            cur.next_tok()?;
                            if cur.peek_char() == Some('(') {
                                cur.next_tok()?;
                                cur.skip_balanced('(', ')')?;
                            } else if w == "align" {
                                cur.next_tok()?;
                            }
                        } else {
                            break;
                        }
                    }
                    let arg = parse_value(cur)?;
                    instr.operands.push(arg);
                    if !cur.eat_punct(',') {
                        cur.expect_punct(')')?;
                        break;
                    }
                }
                // `call i32 (i8*, ...) @f` (or the `fnty*` form) writes the
                // full function type; the instruction's type is its return
                // component
                instr.type_entity = match (&ret.ty, &ret.pointee) {
                    (Type::Func, Some(r)) => r.ty.erase(),
                    (Type::Ptr, Some(inner)) if inner.ty == Type::Func => inner
                        .pointee
                        .as_ref()
                        .map(|r| r.ty.erase())
                        .unwrap_or(TypeEntity::UnknownTy),
                    (t, _) => t.erase(),
                };
                instr.result_pointer = Some(instr.type_entity == TypeEntity::PointerTy);
                self.skip_trailing(cur)?;
            }
            "getelementptr" => {
                cur.eat_word("inbounds");
                cur.eat_word("nuw");
                cur.eat_word("nusw");
                let t1 = parse_type(cur)?;
                let base = if cur.eat_punct(',') {
                    parse_type(cur)?;
                    parse_value(cur)?
                } else {
                    let _ = t1;
                    parse_value(cur)?
                };
                instr.operands.push(base);
                while cur.eat_punct(',') {
                    cur.eat_word("inrange");
                    parse_type(cur)?;
                    let idx = parse_value(cur)?;
                    instr.operands.push(idx);
                }
                instr.type_entity = TypeEntity::PointerTy;
                instr.result_pointer = Some(true);
            }
            op if CAST_OPS.contains(&op) => {
                parse_type(cur)?;
                let v = parse_value(cur)?;
                cur.expect_word("to")?;
                let target = parse_type(cur)?;
                instr.operands.push(v);
                instr.type_entity = target.ty.erase();
                instr.result_pointer = Some(target.ty.is_pointer());
            }
            "phi" => {
                while let Some(Tok::Word(w)) = cur.peek_tok() {
                    if FLAG_WORDS.contains(&w.as_str()) {
                        cur.next_tok()?;
                    } else {
                        break;
                    }
                }
                let ty = parse_type(cur)?;
                loop {
                    cur.expect_punct('[')?;
                    let v = parse_value(cur)?;
                    cur.expect_punct(',')?;
                    let label = cur.expect_local()?;
                    cur.expect_punct(']')?;
                    instr.operands.push(v);
                    instr.operands.push(RawOperand::Label(label));
                    if !cur.eat_punct(',') {
                        break;
                    }
                }
                instr.type_entity = ty.ty.erase();
                instr.result_pointer = Some(ty.ty.is_pointer());
            }
            "select" => {
                parse_type(cur)?;
                let c = parse_value(cur)?;
                cur.expect_punct(',')?;
                let ty = parse_type(cur)?;
                let a = parse_value(cur)?;
                cur.expect_punct(',')?;
                parse_type(cur)?;
                let b = parse_value(cur)?;
                instr.operands.push(c);
                instr.operands.push(a);
                instr.operands.push(b);
                instr.type_entity = ty.ty.erase();
                instr.result_pointer = Some(ty.ty.is_pointer());
            }
            _ => {
                // Unrecognized opcode: parse generically, keeping the entity
                // set open. Operand-looking tokens are collected; type and
                // attribute syntax is skipped.
                self.parse_generic(cur, &mut instr)?;
            }
        }

        Ok(instr)
    }

    fn parse_generic(&self, cur: &mut Cursor, instr: &mut PreInstruction) -> Result<()> {
        instr.type_entity = TypeEntity::UnknownTy;
        instr.result_pointer = Some(false);
        while !cur.at_end() {
            let save = cur.pos;
            match cur.next_tok() {
                Ok(Tok::Local(n)) => instr.operands.push(RawOperand::Local(n)),
                Ok(Tok::Global(n)) => instr.operands.push(RawOperand::Global(n)),
                Ok(Tok::Num(n)) => instr.operands.push(RawOperand::Const(n)),
                Ok(Tok::Word(w)) if CONST_WORDS.contains(&w.as_str()) => {
                    instr.operands.push(RawOperand::Const(w))
                }
                Ok(Tok::Punct(p @ ('<' | '[' | '{'))) => {
                    let close = match p {
                        '<' => '>',
                        '[' => ']',
                        _ => '}',
                    };
                    cur.skip_balanced(p, close)?;
                }
                Ok(Tok::Punct('(')) => {
                    cur.skip_balanced('(', ')')?;
                }
                Ok(_) => {}
                Err(_) => {
                    cur.pos = save;
                    break;
                }
            }
        }
        Ok(())
    }

    /// Skip `, align N`, `, !metadata ...` and attribute-group tails.
    fn skip_trailing(&self, cur: &mut Cursor) -> Result<()> {
        loop {
            if cur.eat_punct(',') {
                if cur.eat_word("align") {
                    cur.next_tok()?;
                } else if let Some(Tok::Meta(_)) = cur.peek_tok() {
                    cur.next_tok()?;
                    if cur.peek_char() == Some('{') {
                        cur.next_tok()?;
                        cur.skip_balanced('{', '}')?;
                    }
                } else {
                    return Err(cur.err("unexpected token after instruction"));
                }
            } else if let Some(Tok::AttrGroup(_)) = cur.peek_tok() {
                cur.next_tok()?;
            } else {
                break;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Module-level parsing
// ---------------------------------------------------------------------------

fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            ';' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_module_with(text: &str, opts: &ParseOptions, default_name: &str) -> Result<IrModule> {
    let ip = InstrParser;

    let mut module_name = default_name.to_string();
    let mut functions: Vec<PreFunction> = Vec::new();
    let mut external_declarations: BTreeSet<String> = BTreeSet::new();
    let mut declaration_texts: Vec<String> = Vec::new();
    let mut globals: BTreeSet<String> = BTreeSet::new();

    let mut current: Option<PreFunction> = None;

    // Merge multi-line `switch` bodies so every instruction is one line.
    let mut merged: Vec<(usize, String)> = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stripped = strip_comment(raw_line).trim().to_string();
        if stripped.is_empty() {
            continue;
        }
        if let Some((start, mut acc)) = pending.take() {
            acc.push(' ');
            acc.push_str(&stripped);
            if stripped.contains(']') {
                merged.push((start, acc));
            } else {
                pending = Some((start, acc));
            }
            continue;
        }
        if stripped.contains('[') && !stripped.contains(']') && stripped.starts_with("switch") {
            pending = Some((line_no, stripped));
            continue;
        }
        merged.push((line_no, stripped));
    }
    if let Some((line, _)) = pending {
        return Err(Error::Syntax { line, col: 1, msg: "unterminated `[` group".to_string() });
    }

    for (line_no, line) in merged {
        let line = line.as_str();

        if current.is_none() {
            if line.starts_with("source_filename") {
                if let Some(q) = line.split('"').nth(1) {
                    module_name = q.to_string();
                }
                continue;
            }
            if line.starts_with("target ") || line.starts_with("attributes ") {
                continue;
            }
            if line.starts_with('!') {
                continue;
            }
            if line.starts_with("module asm") {
                return Err(Error::UnsupportedConstruct {
                    line: line_no,
                    token: "module asm".to_string(),
                });
            }
            if line.starts_with("declare") {
                let mut cur = Cursor::new(line, line_no);
                cur.expect_word("declare")?;
                let name = parse_declare_name(&mut cur)?;
                external_declarations.insert(name);
                declaration_texts.push(line.to_string());
                continue;
            }
            if line.starts_with("define") {
                let mut cur = Cursor::new(line, line_no);
                current = Some(parse_define_header(&mut cur, line)?);
                continue;
            }
            if line.starts_with('%') {
                // named type definition: %struct.X = type { ... }
                if line.contains("= type") {
                    continue;
                }
                return Err(Error::Syntax {
                    line: line_no,
                    col: 1,
                    msg: "value definition outside a function".to_string(),
                });
            }
            if line.starts_with('@') {
                // module-level global; record the name and move on
                let mut cur = Cursor::new(line, line_no);
                if let Ok(Tok::Global(name)) = cur.next_tok() {
                    globals.insert(name);
                }
                continue;
            }
            return Err(Error::UnsupportedConstruct {
                line: line_no,
                token: line.split_whitespace().next().unwrap_or("").to_string(),
            });
        }

        // inside a function body
        if line == "}" {
            functions.push(current.take().unwrap());
            continue;
        }
        let func = current.as_mut().unwrap();
        if let Some(label) = block_label(line) {
            func.blocks.push(PreBlock { label, instructions: Vec::new(), line: line_no });
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let instr = ip.parse(&mut cur, line)?;
        if !cur.at_end() {
            // tolerate metadata/attr tails, reject anything else
            match cur.peek_tok() {
                Some(Tok::Meta(_)) | Some(Tok::AttrGroup(_)) | Some(Tok::Punct(',')) => {}
                Some(t) => {
                    return Err(cur.err(format!("trailing tokens after instruction: {:?}", t)))
                }
                None => {}
            }
        }
        if func.blocks.is_empty() {
            func.blocks.push(PreBlock {
                label: "entry".to_string(),
                instructions: Vec::new(),
                line: line_no,
            });
        }
        func.blocks.last_mut().unwrap().instructions.push(instr);
    }

    if current.is_some() {
        return Err(Error::Syntax {
            line: text.lines().count(),
            col: 1,
            msg: "unterminated function body (missing `}`)".to_string(),
        });
    }

    resolve_module(module_name, functions, external_declarations, declaration_texts, globals, opts)
}

fn parse_declare_name(cur: &mut Cursor) -> Result<String> {
    skip_header_qualifiers(cur);
    parse_type(cur)?;
    match cur.next_tok()? {
        Tok::Global(name) => Ok(name),
        t => Err(cur.err(format!("expected function name, found {:?}", t))),
    }
}

const HEADER_QUALIFIERS: &[&str] = &[
    "private", "internal", "available_externally", "linkonce", "weak", "common", "appending",
    "extern_weak", "linkonce_odr", "weak_odr", "external", "dso_local", "dso_preemptable",
    "hidden", "protected", "default", "ccc", "fastcc", "coldcc", "tailcc", "swiftcc", "zeroext",
    "signext", "inreg", "noundef", "noalias", "nonnull", "unnamed_addr", "local_unnamed_addr",
];

fn skip_header_qualifiers(cur: &mut Cursor) {
    while let Some(Tok::Word(w)) = cur.peek_tok() {
        if HEADER_QUALIFIERS.contains(&w.as_str()) {
            let _ = cur.next_tok();
        } else {
            break;
        }
    }
}

fn parse_define_header(cur: &mut Cursor, line: &str) -> Result<PreFunction> {
    cur.expect_word("define")?;
    skip_header_qualifiers(cur);
    parse_type(cur)?;
    let name = match cur.next_tok()? {
        Tok::Global(name) => name,
        t => return Err(cur.err(format!("expected function name, found {:?}", t))),
    };
    cur.expect_punct('(')?;
    let mut params = Vec::new();
    loop {
        if cur.eat_punct(')') {
            break;
        }
        if cur.eat_punct('.') {
            // varargs ellipsis `...`
            cur.eat_punct('.');
            cur.eat_punct('.');
            if !cur.eat_punct(',') {
                cur.expect_punct(')')?;
                break;
            }
            continue;
        }
        let ty = parse_type(cur)?;
        // parameter attributes
        while let Some(Tok::Word(w)) = cur.peek_tok() {
            if matches!(
                w.as_str(),
                "noundef" | "nocapture" | "readonly" | "writeonly" | "nonnull" | "noalias"
                    | "signext" | "zeroext" | "inreg" | "returned" | "dereferenceable" | "byval"
                    | "sret" | "align" | "nofree" | "swiftself" | "immarg"
            ) {
                let _ = cur.next_tok();
                if cur.peek_char() == Some('(') {
                    let _ = cur.next_tok();
                    cur.skip_balanced('(', ')')?;
                } else if w == "align" {
                    cur.next_tok()?;
                }
            } else {
                break;
            }
        }
        let pname = match cur.next_tok()? {
            Tok::Local(n) => n,
            t => return Err(cur.err(format!("expected parameter name, found {:?}", t))),
        };
        params.push((pname, ty));
        if !cur.eat_punct(',') {
            cur.expect_punct(')')?;
            break;
        }
    }
    if !line.trim_end().ends_with('{') {
        return Err(cur.err("expected `{` at end of function header"));
    }
    let header = line.trim_end().to_string();
    Ok(PreFunction { name, params, blocks: Vec::new(), header, line: cur.line })
}

fn block_label(line: &str) -> Option<String> {
    let trimmed = line.trim_end();
    if !trimmed.ends_with(':') {
        return None;
    }
    let name = &trimmed[..trimmed.len() - 1];
    if name.is_empty() {
        return None;
    }
    if name.starts_with('"') && name.ends_with('"') && name.len() >= 2 {
        return Some(name[1..name.len() - 1].to_string());
    }
    if name.chars().all(is_ident_char) {
        return Some(name.to_string());
    }
    None
}

// ---------------------------------------------------------------------------
// Phase two: resolution and validation
// ---------------------------------------------------------------------------

fn resolve_module(
    name: String,
    pre_functions: Vec<PreFunction>,
    mut external_declarations: BTreeSet<String>,
    declaration_texts: Vec<String>,
    globals: BTreeSet<String>,
    opts: &ParseOptions,
) -> Result<IrModule> {
    let defined: BTreeSet<String> = pre_functions.iter().map(|f| f.name.clone()).collect();
    {
        let mut seen = BTreeSet::new();
        for f in &pre_functions {
            if !seen.insert(f.name.clone()) {
                return Err(Error::Syntax {
                    line: f.line,
                    col: 1,
                    msg: format!("function `@{}` defined twice", f.name),
                });
            }
        }
    }

    let mut functions = Vec::new();
    for pre in &pre_functions {
        let func = resolve_function(pre, &defined, &mut external_declarations, &globals, opts)?;
        functions.push(func);
    }

    Ok(IrModule { name, functions, external_declarations, declaration_texts })
}

struct DefInfo {
    id: usize,
    is_pointer: bool,
    is_alloca: bool,
}

fn resolve_function(
    pre: &PreFunction,
    defined: &BTreeSet<String>,
    externals: &mut BTreeSet<String>,
    globals: &BTreeSet<String>,
    opts: &ParseOptions,
) -> Result<IrFunction> {
    if pre.blocks.is_empty() {
        return Err(Error::Syntax {
            line: pre.line,
            col: 1,
            msg: format!("function `@{}` has no body", pre.name),
        });
    }

    let mut labels: BTreeSet<String> = BTreeSet::new();
    for b in &pre.blocks {
        if !labels.insert(b.label.clone()) {
            return Err(Error::Syntax {
                line: b.line,
                col: 1,
                msg: format!("duplicate block label `{}`", b.label),
            });
        }
        if b.instructions.is_empty() {
            return Err(Error::Syntax {
                line: b.line,
                col: 1,
                msg: format!("empty basic block `{}`", b.label),
            });
        }
        let last = b.instructions.len() - 1;
        for (i, instr) in b.instructions.iter().enumerate() {
            if i == last && !instr.is_terminator {
                return Err(Error::Syntax {
                    line: instr.line,
                    col: 1,
                    msg: format!("block `{}` does not end with a terminator", b.label),
                });
            }
            if i != last && instr.is_terminator {
                return Err(Error::Syntax {
                    line: instr.line,
                    col: 1,
                    msg: "terminator in the middle of a block".to_string(),
                });
            }
        }
        for instr in &b.instructions {
            for target in &instr.successors {
                let known = pre.blocks.iter().any(|bb| bb.label == *target);
                if !known {
                    return Err(Error::Syntax {
                        line: instr.line,
                        col: 1,
                        msg: format!("branch to unknown label `%{}`", target),
                    });
                }
            }
        }
    }

    // parameter info
    let mut params = Vec::new();
    let mut param_info: BTreeMap<String, OperandClass> = BTreeMap::new();
    for (pname, pty) in &pre.params {
        let clazz = if pty.ty.is_pointer() { OperandClass::Ptr } else { OperandClass::Var };
        if param_info.insert(pname.clone(), clazz).is_some() {
            return Err(Error::Syntax {
                line: pre.line,
                col: 1,
                msg: format!("duplicate parameter `%{}`", pname),
            });
        }
        params.push(IrParam { name: pname.clone(), type_entity: pty.ty.erase(), clazz });
    }

    // SSA definition table
    let mut defs: BTreeMap<String, DefInfo> = BTreeMap::new();
    let mut id = 0usize;
    for b in &pre.blocks {
        for instr in &b.instructions {
            if let Some(rn) = &instr.result_name {
                if param_info.contains_key(rn) || defs.contains_key(rn) {
                    return Err(Error::Syntax {
                        line: instr.line,
                        col: 1,
                        msg: format!("`%{}` defined more than once", rn),
                    });
                }
                defs.insert(
                    rn.clone(),
                    DefInfo {
                        id,
                        is_pointer: instr.result_pointer.unwrap_or(false),
                        is_alloca: instr.opcode == "alloca",
                    },
                );
            }
            id += 1;
        }
    }

    // build resolved blocks
    let mut blocks = Vec::new();
    let mut id = 0usize;
    for b in &pre.blocks {
        let mut instructions = Vec::new();
        for instr in &b.instructions {
            let mut operands = Vec::new();
            for raw in &instr.operands {
                operands.push(resolve_operand(
                    raw,
                    &labels,
                    &param_info,
                    &defs,
                    defined,
                    externals,
                    globals,
                    instr,
                )?);
            }
            let writes_memory = opts.write_opcodes.contains(&instr.opcode);
            let result_class = instr.result_name.as_ref().map(|_| {
                if instr.result_pointer.unwrap_or(false) {
                    OperandClass::Ptr
                } else {
                    OperandClass::Var
                }
            });
            instructions.push(IrInstruction {
                id,
                opcode: instr.opcode.clone(),
                type_entity: instr.type_entity,
                operands,
                result_name: instr.result_name.clone(),
                writes_memory,
                result_class,
                text: instr.text.clone(),
            });
            id += 1;
        }
        let succs = instructions.last().map(|t| t_successors(t, &pre.blocks)).unwrap_or_default();
        blocks.push(IrBasicBlock { label: b.label.clone(), instructions, successors: succs });
    }

    Ok(IrFunction {
        name: pre.name.clone(),
        params,
        blocks,
        is_definition: true,
        header: pre.header.clone(),
    })
}

fn t_successors(term: &IrInstruction, _blocks: &[PreBlock]) -> Vec<String> {
    let mut out = Vec::new();
    for op in &term.operands {
        if op.clazz == OperandClass::Label {
            let name = op.raw.trim_start_matches('%').to_string();
            if !out.contains(&name) {
                out.push(name);
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn resolve_operand(
    raw: &RawOperand,
    labels: &BTreeSet<String>,
    params: &BTreeMap<String, OperandClass>,
    defs: &BTreeMap<String, DefInfo>,
    defined: &BTreeSet<String>,
    externals: &mut BTreeSet<String>,
    globals: &BTreeSet<String>,
    instr: &PreInstruction,
) -> Result<Operand> {
    match raw {
        RawOperand::Label(l) => Ok(Operand {
            raw: format!("%{}", l),
            clazz: OperandClass::Label,
            ssa_def: None,
            pointee_root: None,
        }),
        RawOperand::Const(c) => Ok(Operand {
            raw: c.clone(),
            clazz: OperandClass::Const,
            ssa_def: None,
            pointee_root: None,
        }),
        RawOperand::Global(g) => {
            let clazz = if defined.contains(g) || externals.contains(g) {
                OperandClass::Function
            } else if globals.contains(g) {
                OperandClass::Ptr
            } else if instr.opcode == "call" {
                // tolerate calls to undeclared symbols; they resolve at link
                // time and become externals
                externals.insert(g.clone());
                OperandClass::Function
            } else {
                OperandClass::Ptr
            };
            Ok(Operand {
                raw: format!("@{}", g),
                clazz,
                ssa_def: None,
                pointee_root: None,
            })
        }
        RawOperand::Local(n) => {
            if let Some(clazz) = params.get(n) {
                let pointee_root =
                    if *clazz == OperandClass::Ptr { Some(n.clone()) } else { None };
                return Ok(Operand {
                    raw: format!("%{}", n),
                    clazz: *clazz,
                    ssa_def: None,
                    pointee_root,
                });
            }
            if let Some(info) = defs.get(n) {
                let clazz = if info.is_pointer { OperandClass::Ptr } else { OperandClass::Var };
                let pointee_root = if info.is_alloca { Some(n.clone()) } else { None };
                return Ok(Operand {
                    raw: format!("%{}", n),
                    clazz,
                    ssa_def: Some(info.id),
                    pointee_root,
                });
            }
            if labels.contains(n) {
                return Ok(Operand {
                    raw: format!("%{}", n),
                    clazz: OperandClass::Label,
                    ssa_def: None,
                    pointee_root: None,
                });
            }
            Err(Error::Syntax {
                line: instr.line,
                col: 1,
                msg: format!("use of undefined value `%{}`", n),
            })
        }
    }
}
