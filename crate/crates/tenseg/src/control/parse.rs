//! Controller program file parser. Same lexical rules as the `.tsg`
//! format:
//!
//! ```text
//! sine <cable> center=<m> amp=<m> period=<s> phase=<rad>
//! pair <a> <b> total=<m>
//! hold <cable> len=<m>
//! ```
//!
//! A `pair` line consumes the `sine` line for its first cable as the
//! excursion source; every other `sine` is a standalone channel.

use super::{AntagonisticPair, ControllerProgram, SineChannel};
use crate::model::{CableKind, StructureDef};
use crate::topology::{ParseError, ParseErrorKind, SourceSpan};

use crate::topology::parse::{tokenize, Token};

struct Ctx<'s> {
    structure: &'s StructureDef,
    errors: Vec<ParseError>,
}

impl Ctx<'_> {
    fn err(&mut self, span: SourceSpan, kind: ParseErrorKind, message: impl Into<String>) {
        self.errors.push(ParseError {
            span,
            kind,
            message: message.into(),
        });
    }

    fn number(&mut self, tok: Token<'_>) -> Option<f64> {
        match tok.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            Ok(_) => {
                self.err(tok.span, ParseErrorKind::Range, "number must be finite");
                None
            }
            Err(_) => {
                self.err(
                    tok.span,
                    ParseErrorKind::Lex,
                    format!("`{}` is not a number", tok.text),
                );
                None
            }
        }
    }

    fn keyed(&mut self, tok: Token<'_>, key: &str) -> Option<f64> {
        match tok.text.split_once('=') {
            Some((k, v)) if k == key => self.number(Token {
                text: v,
                span: SourceSpan {
                    line: tok.span.line,
                    column: tok.span.column + k.len() + 1,
                },
            }),
            _ => {
                self.err(
                    tok.span,
                    ParseErrorKind::Syntax,
                    format!("expected `{key}=<value>`, found `{}`", tok.text),
                );
                None
            }
        }
    }

    /// Check an active-cable reference; returns its index when usable.
    fn active_cable(&mut self, tok: Token<'_>) -> Option<usize> {
        match self.structure.cables.iter().position(|c| c.id == tok.text) {
            None => {
                self.err(
                    tok.span,
                    ParseErrorKind::Reference,
                    format!("unknown cable `{}`", tok.text),
                );
                None
            }
            Some(i) if self.structure.cables[i].kind != CableKind::Active => {
                self.err(
                    tok.span,
                    ParseErrorKind::Reference,
                    format!("cable `{}` is passive and cannot be actuated", tok.text),
                );
                None
            }
            Some(i) => Some(i),
        }
    }
}

struct RawSine {
    channel: SineChannel,
    cable_idx: usize,
    span: SourceSpan,
}

struct RawPair {
    a: usize,
    b: usize,
    total: f64,
    span: SourceSpan,
}

/// Parse controller text against a structure. All diagnostics from one
/// pass, ordered by source position.
pub fn parse_program(
    text: &str,
    structure: &StructureDef,
) -> Result<ControllerProgram, Vec<ParseError>> {
    let mut ctx = Ctx {
        structure,
        errors: Vec::new(),
    };
    let mut sines: Vec<RawSine> = Vec::new();
    let mut pairs: Vec<RawPair> = Vec::new();
    let mut holds: Vec<(usize, f64, SourceSpan)> = Vec::new();

    for line in tokenize(text) {
        let head = line[0];
        let rest = &line[1..];
        match head.text {
            "sine" => {
                if rest.len() != 5 {
                    ctx.err(
                        head.span,
                        ParseErrorKind::Syntax,
                        "expected `sine <cable> center= amp= period= phase=`",
                    );
                    continue;
                }
                let cable = ctx.active_cable(rest[0]);
                let center = ctx.keyed(rest[1], "center");
                let amp = ctx.keyed(rest[2], "amp");
                let period = ctx.keyed(rest[3], "period");
                let phase = ctx.keyed(rest[4], "phase");
                if let (Some(ci), Some(center), Some(amp), Some(period), Some(phase)) =
                    (cable, center, amp, period, phase)
                {
                    if period <= 0.0 {
                        ctx.err(rest[3].span, ParseErrorKind::Range, "period must be positive");
                    }
                    if amp < 0.0 {
                        ctx.err(rest[2].span, ParseErrorKind::Range, "amp must be non-negative");
                    }
                    let c = &structure.cables[ci];
                    if center - amp < c.min_length - 1e-12 || center + amp > c.max_length + 1e-12 {
                        ctx.err(
                            rest[1].span,
                            ParseErrorKind::Range,
                            format!(
                                "excursion [{}, {}] leaves cable bounds [{}, {}]",
                                center - amp,
                                center + amp,
                                c.min_length,
                                c.max_length
                            ),
                        );
                    }
                    sines.push(RawSine {
                        channel: SineChannel {
                            cable_id: structure.cables[ci].id.clone(),
                            center,
                            amplitude: amp,
                            period,
                            phase,
                        },
                        cable_idx: ci,
                        span: rest[0].span,
                    });
                }
            }
            "pair" => {
                if rest.len() != 3 {
                    ctx.err(head.span, ParseErrorKind::Syntax, "expected `pair <a> <b> total=`");
                    continue;
                }
                let a = ctx.active_cable(rest[0]);
                let b = ctx.active_cable(rest[1]);
                let total = ctx.keyed(rest[2], "total");
                if let (Some(a), Some(b), Some(total)) = (a, b, total) {
                    if a == b {
                        ctx.err(
                            rest[1].span,
                            ParseErrorKind::Duplicate,
                            "pair cables must differ",
                        );
                        continue;
                    }
                    let min_sum =
                        structure.cables[a].min_length + structure.cables[b].min_length;
                    if total <= min_sum {
                        ctx.err(
                            rest[2].span,
                            ParseErrorKind::Range,
                            format!("total must exceed the combined minimum {min_sum}"),
                        );
                    }
                    pairs.push(RawPair {
                        a,
                        b,
                        total,
                        span: head.span,
                    });
                }
            }
            "hold" => {
                if rest.len() != 2 {
                    ctx.err(head.span, ParseErrorKind::Syntax, "expected `hold <cable> len=`");
                    continue;
                }
                let cable = ctx.active_cable(rest[0]);
                let len = ctx.keyed(rest[1], "len");
                if let (Some(ci), Some(len)) = (cable, len) {
                    let c = &structure.cables[ci];
                    if len < c.min_length || len > c.max_length {
                        ctx.err(
                            rest[1].span,
                            ParseErrorKind::Range,
                            format!(
                                "hold length {len} outside cable bounds [{}, {}]",
                                c.min_length, c.max_length
                            ),
                        );
                    }
                    holds.push((ci, len, rest[0].span));
                }
            }
            other => ctx.err(
                head.span,
                ParseErrorKind::Syntax,
                format!("unknown keyword `{other}`"),
            ),
        }
    }

    // Attach each pair's excursion source.
    let mut consumed = vec![false; sines.len()];
    let mut built_pairs = Vec::new();
    for pair in &pairs {
        let source = (0..sines.len()).find(|&si| sines[si].cable_idx == pair.a && !consumed[si]);
        match source {
            Some(si) => {
                consumed[si] = true;
                built_pairs.push(AntagonisticPair {
                    cable_a: structure.cables[pair.a].id.clone(),
                    cable_b: structure.cables[pair.b].id.clone(),
                    total_length: pair.total,
                    source: sines[si].channel.clone(),
                });
            }
            None => ctx.err(
                pair.span,
                ParseErrorKind::Reference,
                format!(
                    "pair needs a `sine {} ...` line as its excursion source",
                    structure.cables[pair.a].id
                ),
            ),
        }
    }

    // Role uniqueness, reported at the later claim.
    let mut claimed: Vec<(usize, SourceSpan)> = Vec::new();
    for (si, sine) in sines.iter().enumerate() {
        if !consumed[si] {
            claimed.push((sine.cable_idx, sine.span));
        }
    }
    for pair in &pairs {
        claimed.push((pair.a, pair.span));
        claimed.push((pair.b, pair.span));
    }
    for (ci, _, span) in &holds {
        claimed.push((*ci, *span));
    }
    for (i, (ci, span)) in claimed.iter().enumerate() {
        if claimed[..i].iter().any(|(cj, _)| cj == ci) {
            ctx.err(
                *span,
                ParseErrorKind::Duplicate,
                format!(
                    "cable `{}` has more than one controller role",
                    structure.cables[*ci].id
                ),
            );
        }
    }

    if !ctx.errors.is_empty() {
        ctx.errors.sort_by_key(|e| (e.span, e.kind as u8));
        return Err(ctx.errors);
    }

    Ok(ControllerProgram {
        channels: sines
            .into_iter()
            .zip(consumed)
            .filter(|(_, used)| !used)
            .map(|(s, _)| s.channel)
            .collect(),
        pairs: built_pairs,
        holds: holds
            .into_iter()
            .map(|(ci, len, _)| (structure.cables[ci].id.clone(), len))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_elbow_joint;

    #[test]
    fn parses_sine_pair_and_hold() {
        let s = build_elbow_joint();
        let pitch = s.cable("elbow_pitch").unwrap();
        let yaw = s.cable("elbow_yaw_l").unwrap();
        let total = yaw.rest_length * 2.0;
        let text = format!(
            "sine elbow_yaw_l center={} amp=0.01 period=8 phase=0\n\
             pair elbow_yaw_l elbow_yaw_r total={}\n\
             hold elbow_pitch len={}\n",
            yaw.rest_length, total, pitch.rest_length
        );
        let program = parse_program(&text, &s).unwrap();
        assert_eq!(program.channels.len(), 0);
        assert_eq!(program.pairs.len(), 1);
        assert_eq!(program.holds.len(), 1);
        assert_eq!(program.validate(&s), Vec::<String>::new());
    }

    #[test]
    fn pair_without_source_is_a_reference_error() {
        let s = build_elbow_joint();
        let errs = parse_program("pair elbow_yaw_l elbow_yaw_r total=0.6\n", &s).unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Reference);
        assert!(errs[0].message.contains("excursion source"));
    }

    #[test]
    fn passive_cable_is_rejected() {
        let s = build_elbow_joint();
        let errs = parse_program("hold lig_c len=0.07\n", &s).unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Reference);
    }

    #[test]
    fn double_role_is_a_duplicate_error() {
        let s = build_elbow_joint();
        let pitch = s.cable("elbow_pitch").unwrap().rest_length;
        let text = format!(
            "hold elbow_pitch len={pitch}\nhold elbow_pitch len={pitch}\n"
        );
        let errs = parse_program(&text, &s).unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Duplicate);
        assert_eq!(errs[0].span.line, 2);
    }
}
