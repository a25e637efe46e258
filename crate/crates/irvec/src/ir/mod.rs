//! In-memory model of the supported LLVM-IR subset.
//!
//! A module is a collection of functions; a function is a list of basic
//! blocks; a block is a non-empty instruction sequence whose last
//! instruction is a terminator. Concrete identifiers and types are
//! abstracted into generic entities at parse time: operands become one of
//! the five operand classes, types are width-erased into a fixed set of
//! base type entities.
//!
//! The grammar accepted by the parser is documented in `docs/ir-subset.md`.

mod parser;

pub use parser::{parse_module, parse_module_named, parse_module_with, ParseOptions};

use std::collections::BTreeSet;
use std::fmt;

/// Generic representation of an operand identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperandClass {
    Var,
    Ptr,
    Const,
    Function,
    Label,
}

impl OperandClass {
    pub fn name(self) -> &'static str {
        match self {
            OperandClass::Var => "VAR",
            OperandClass::Ptr => "PTR",
            OperandClass::Const => "CONST",
            OperandClass::Function => "FUNCTION",
            OperandClass::Label => "LABEL",
        }
    }

    pub fn all() -> [OperandClass; 5] {
        [
            OperandClass::Var,
            OperandClass::Ptr,
            OperandClass::Const,
            OperandClass::Function,
            OperandClass::Label,
        ]
    }
}

impl fmt::Display for OperandClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Width-erased base type of an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeEntity {
    VoidTy,
    IntegerTy,
    FloatTy,
    PointerTy,
    VectorTy,
    StructTy,
    ArrayTy,
    FunctionTy,
    LabelTy,
    UnknownTy,
}

impl TypeEntity {
    pub fn name(self) -> &'static str {
        match self {
            TypeEntity::VoidTy => "VoidTy",
            TypeEntity::IntegerTy => "IntegerTy",
            TypeEntity::FloatTy => "FloatTy",
            TypeEntity::PointerTy => "PointerTy",
            TypeEntity::VectorTy => "VectorTy",
            TypeEntity::StructTy => "StructTy",
            TypeEntity::ArrayTy => "ArrayTy",
            TypeEntity::FunctionTy => "FunctionTy",
            TypeEntity::LabelTy => "LabelTy",
            TypeEntity::UnknownTy => "UnknownTy",
        }
    }

    pub fn all() -> [TypeEntity; 10] {
        [
            TypeEntity::VoidTy,
            TypeEntity::IntegerTy,
            TypeEntity::FloatTy,
            TypeEntity::PointerTy,
            TypeEntity::VectorTy,
            TypeEntity::StructTy,
            TypeEntity::ArrayTy,
            TypeEntity::FunctionTy,
            TypeEntity::LabelTy,
            TypeEntity::UnknownTy,
        ]
    }
}

impl fmt::Display for TypeEntity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single instruction operand, abstracted per the identifier mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Operand {
    /// Operand text as written, sigil included (`%a`, `@sum`, `0`, `null`).
    pub raw: String,
    pub clazz: OperandClass,
    /// Id of the in-function instruction defining this SSA value, if any.
    pub ssa_def: Option<usize>,
    /// Memory slot this pointer statically refers to (alloca result name or
    /// pointer parameter name). `None` when provenance is unknown.
    pub pointee_root: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrInstruction {
    /// Stable index within the function, in layout order.
    pub id: usize,
    pub opcode: String,
    pub type_entity: TypeEntity,
    pub operands: Vec<Operand>,
    /// SSA value defined by this instruction, without the `%` sigil.
    pub result_name: Option<String>,
    pub writes_memory: bool,
    /// Class of the defined SSA value (Var or Ptr) when `result_name` is set.
    pub result_class: Option<OperandClass>,
    /// Normalized source text, used for printing.
    pub text: String,
}

impl IrInstruction {
    pub fn is_terminator(&self) -> bool {
        matches!(self.opcode.as_str(), "br" | "ret" | "switch" | "unreachable")
    }

    /// Slot written by this instruction when it is a write with a
    /// statically known target (the address operand's pointee root).
    pub fn written_slot(&self) -> Option<&str> {
        if !self.writes_memory {
            return None;
        }
        // store's address is its second operand; any other configured write
        // opcode is assumed to take the address last.
        self.operands.last().and_then(|op| op.pointee_root.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrBasicBlock {
    pub label: String,
    pub instructions: Vec<IrInstruction>,
    /// Labels of the terminator's targets, duplicates removed.
    pub successors: Vec<String>,
}

/// A function parameter: name (without sigil), erased type, operand class.
#[derive(Debug, Clone, PartialEq)]
pub struct IrParam {
    pub name: String,
    pub type_entity: TypeEntity,
    pub clazz: OperandClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrFunction {
    pub name: String,
    pub params: Vec<IrParam>,
    pub blocks: Vec<IrBasicBlock>,
    pub is_definition: bool,
    /// Original header line, used for printing.
    pub header: String,
}

impl IrFunction {
    pub fn entry_block(&self) -> Option<&IrBasicBlock> {
        self.blocks.first()
    }

    pub fn block(&self, label: &str) -> Option<&IrBasicBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// All instructions in layout order (which matches id order).
    pub fn instructions(&self) -> impl Iterator<Item = &IrInstruction> {
        self.blocks.iter().flat_map(|b| b.instructions.iter())
    }

    pub fn instruction(&self, id: usize) -> Option<&IrInstruction> {
        self.instructions().find(|i| i.id == id)
    }

    pub fn instruction_count(&self) -> usize {
        self.blocks.iter().map(|b| b.instructions.len()).sum()
    }

    pub fn param(&self, name: &str) -> Option<&IrParam> {
        self.params.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrModule {
    pub name: String,
    pub functions: Vec<IrFunction>,
    pub external_declarations: BTreeSet<String>,
    /// Original `declare` lines, kept so the module can be reprinted.
    pub declaration_texts: Vec<String>,
}

impl IrModule {
    pub fn function(&self, name: &str) -> Option<&IrFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn defined_functions(&self) -> impl Iterator<Item = &IrFunction> {
        self.functions.iter().filter(|f| f.is_definition)
    }
}

impl fmt::Display for IrModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for decl in &self.declaration_texts {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "{}", decl)?;
        }
        for func in &self.functions {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "{}", func.header)?;
            for block in &func.blocks {
                writeln!(f, "{}:", block.label)?;
                for instr in &block.instructions {
                    writeln!(f, "  {}", instr.text)?;
                }
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

/// Map a raw operand token to its generic class, per the identifier table.
///
/// Literals map to CONST, `@`-symbols to FUNCTION, and `%`-values are
/// resolved against the function's labels, parameters and instruction
/// results; pointer-typed values map to PTR, everything else to VAR.
pub fn classify_operand(raw: &str, context: &IrFunction) -> OperandClass {
    if let Some(name) = raw.strip_prefix('@') {
        let _ = name;
        return OperandClass::Function;
    }
    if let Some(name) = raw.strip_prefix('%') {
        if context.blocks.iter().any(|b| b.label == name) {
            return OperandClass::Label;
        }
        if let Some(p) = context.param(name) {
            return p.clazz;
        }
        for instr in context.instructions() {
            if instr.result_name.as_deref() == Some(name) {
                return instr.result_class.unwrap_or(OperandClass::Var);
            }
        }
        return OperandClass::Var;
    }
    OperandClass::Const
}

/// Width-erase a type token (`i32` -> IntegerTy, `<4 x float>` -> VectorTy).
/// Unknown tokens map to UnknownTy.
pub fn normalize_type(raw_type: &str) -> TypeEntity {
    parser::normalize_type_token(raw_type)
}
