//! The `.tsg` structure description format.
//!
//! Line-oriented, `#` starts a comment, tokens are whitespace-separated and
//! indentation is cosmetic; child lines bind to the most recent parent:
//!
//! ```text
//! structure <name>
//! gravity <gx> <gy> <gz>
//! body <name> mass=<kg> [fixed]
//!   node <id> <x> <y> <z>
//!   rod <nodeA> <nodeB> mass=<kg>
//! cable <id> kind=<active|passive> k=<N/m> b=<N·s/m> rest=<m> min=<m> max=<m>
//!   route <body>.<node> <body>.<node> [...]
//!   actuator vmax=<m/s> amax=<m/s2>     # required iff kind=active
//! ```
//!
//! Inertia is never written: it is derived from the optional `rod` member
//! list (thin rods fused by the parallel-axis theorem) or defaults to a
//! uniform 1 cm sphere about the node centroid. UTF-8 in, LF or CRLF
//! accepted, LF emitted.

pub(crate) mod parse;
mod write;

pub use parse::parse_structure;
pub use write::{serialize_structure, SerializeError};

use std::fmt;

/// Location of a token in the source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed token (bad number, illegal identifier character).
    Lex,
    /// Wrong statement shape: unknown keyword, missing field, orphan child.
    Syntax,
    /// Reference to an unknown body or node.
    Reference,
    /// Value outside its legal range.
    Range,
    /// Repeated identifier.
    Duplicate,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lex => "lex",
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::Reference => "reference",
            ParseErrorKind::Range => "range",
            ParseErrorKind::Duplicate => "duplicate",
        };
        f.write_str(s)
    }
}

/// One diagnostic from [`parse_structure`]. Parsing recovers where it can,
/// so a bad file usually yields several of these in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line, self.span.column, self.kind, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// `true` if `s` is a legal identifier: `[A-Za-z_][A-Za-z0-9_-]*`.
pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}
