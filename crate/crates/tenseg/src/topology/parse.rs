//! Parser for the `.tsg` format: one tokenizing pass, one semantic pass,
//! collecting every recoverable error with its source span.

use super::{is_identifier, ParseError, ParseErrorKind, SourceSpan};
use crate::model::{
    validate_structure, ActuatorSpec, BodyNode, CableKind, CableSpec, NodeRef, RigidBodySpec, Rod,
    StructureDef,
};
use crate::math::Vec3;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub(crate) text: &'a str,
    pub(crate) span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut tokens = Vec::new();
        let mut col = 0usize;
        for piece in content.split_inclusive(char::is_whitespace) {
            let trimmed = piece.trim_end_matches(char::is_whitespace);
            if !trimmed.is_empty() {
                tokens.push(Token {
                    text: trimmed,
                    span: SourceSpan {
                        line: li + 1,
                        column: col + 1,
                    },
                });
            }
            col += piece.chars().count();
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

/// A parsed number that remembers where it came from.
#[derive(Debug, Clone, Copy)]
struct Num {
    value: f64,
    span: SourceSpan,
}

#[derive(Debug)]
struct RawBody<'a> {
    name: &'a str,
    span: SourceSpan,
    mass: Num,
    fixed: bool,
    nodes: Vec<(&'a str, SourceSpan, Vec3)>,
    rods: Vec<(&'a str, &'a str, SourceSpan, Num)>,
}

#[derive(Debug)]
struct RawCable<'a> {
    id: &'a str,
    span: SourceSpan,
    kind: CableKind,
    k: Num,
    b: Num,
    rest: Num,
    min: Num,
    max: Num,
    route: Vec<(NodeRef, SourceSpan)>,
    actuator: Option<(Num, Num)>,
    actuator_span: Option<SourceSpan>,
}

struct Parser<'a> {
    errors: Vec<ParseError>,
    structure_name: Option<(&'a str, SourceSpan)>,
    gravity: Option<(Vec3, SourceSpan)>,
    bodies: Vec<RawBody<'a>>,
    cables: Vec<RawCable<'a>>,
}

impl<'a> Parser<'a> {
    fn err(&mut self, span: SourceSpan, kind: ParseErrorKind, message: impl Into<String>) {
        self.errors.push(ParseError {
            span,
            kind,
            message: message.into(),
        });
    }

    fn ident(&mut self, tok: Token<'a>, what: &str) -> Option<&'a str> {
        if is_identifier(tok.text) {
            Some(tok.text)
        } else {
            self.err(
                tok.span,
                ParseErrorKind::Lex,
                format!("`{}` is not a valid {what} identifier", tok.text),
            );
            None
        }
    }

    fn number(&mut self, tok: Token<'a>) -> Option<Num> {
        match tok.text.parse::<f64>() {
            Ok(value) if value.is_finite() => Some(Num {
                value,
                span: tok.span,
            }),
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

    /// Parse a `key=value` token, checking the key name.
    fn keyed(&mut self, tok: Token<'a>, key: &str) -> Option<Num> {
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

    fn node_ref(&mut self, tok: Token<'a>) -> Option<(NodeRef, SourceSpan)> {
        if let Some((b, n)) = tok.text.split_once('.') {
            if is_identifier(b) && is_identifier(n) {
                return Some((NodeRef::new(b, n), tok.span));
            }
        }
        self.err(
            tok.span,
            ParseErrorKind::Lex,
            format!("`{}` is not a `body.node` reference", tok.text),
        );
        None
    }
}

/// Parse `.tsg` text. On success the returned structure passes
/// [`validate_structure`] with no violations; otherwise all diagnostics
/// found in one pass are returned, ordered by source position.
pub fn parse_structure(text: &str) -> Result<StructureDef, Vec<ParseError>> {
    let lines = tokenize(text);
    let mut p = Parser {
        errors: Vec::new(),
        structure_name: None,
        gravity: None,
        bodies: Vec::new(),
        cables: Vec::new(),
    };

    for line in &lines {
        let head = line[0];
        let rest = &line[1..];
        match head.text {
            "structure" => parse_structure_line(&mut p, head, rest),
            "gravity" => parse_gravity_line(&mut p, head, rest),
            "body" => parse_body_line(&mut p, head, rest),
            "node" => parse_node_line(&mut p, head, rest),
            "rod" => parse_rod_line(&mut p, head, rest),
            "cable" => parse_cable_line(&mut p, head, rest),
            "route" => parse_route_line(&mut p, head, rest),
            "actuator" => parse_actuator_line(&mut p, head, rest),
            other => p.err(
                head.span,
                ParseErrorKind::Syntax,
                format!("unknown keyword `{other}`"),
            ),
        }
    }

    if p.structure_name.is_none() {
        p.errors.push(ParseError {
            span: SourceSpan { line: 1, column: 1 },
            kind: ParseErrorKind::Syntax,
            message: "missing `structure <name>` header".into(),
        });
    }

    semantic_pass(&mut p);

    if !p.errors.is_empty() {
        p.errors.sort_by_key(|e| (e.span, e.kind as u8));
        return Err(p.errors);
    }

    let structure = assemble(&p);
    // Safety net: anything the passes above missed still surfaces as a
    // diagnostic instead of leaking an invalid structure.
    let leftover = validate_structure(&structure);
    if !leftover.is_empty() {
        let errors = leftover
            .into_iter()
            .map(|v| ParseError {
                span: span_of_element(&p, &v.element),
                kind: ParseErrorKind::Range,
                message: v.rule,
            })
            .collect();
        return Err(errors);
    }
    Ok(structure)
}

fn parse_structure_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if rest.len() != 1 {
        p.err(head.span, ParseErrorKind::Syntax, "expected `structure <name>`");
        return;
    }
    let Some(name) = p.ident(rest[0], "structure") else {
        return;
    };
    if p.structure_name.is_some() {
        p.err(rest[0].span, ParseErrorKind::Duplicate, "second `structure` line");
    } else {
        p.structure_name = Some((name, head.span));
    }
}

fn parse_gravity_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if rest.len() != 3 {
        p.err(head.span, ParseErrorKind::Syntax, "expected `gravity <gx> <gy> <gz>`");
        return;
    }
    let (x, y, z) = (p.number(rest[0]), p.number(rest[1]), p.number(rest[2]));
    if let (Some(x), Some(y), Some(z)) = (x, y, z) {
        if p.gravity.is_some() {
            p.err(head.span, ParseErrorKind::Duplicate, "second `gravity` line");
        } else {
            p.gravity = Some((Vec3::new(x.value, y.value, z.value), head.span));
        }
    }
}

fn parse_body_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    let fixed = rest.last().is_some_and(|t| t.text == "fixed");
    let rest = if fixed { &rest[..rest.len() - 1] } else { rest };
    if rest.len() != 2 {
        p.err(
            head.span,
            ParseErrorKind::Syntax,
            "expected `body <name> mass=<kg> [fixed]`",
        );
        return;
    }
    let name = p.ident(rest[0], "body");
    let mass = p.keyed(rest[1], "mass");
    if let (Some(name), Some(mass)) = (name, mass) {
        p.bodies.push(RawBody {
            name,
            span: head.span,
            mass,
            fixed,
            nodes: Vec::new(),
            rods: Vec::new(),
        });
    }
}

fn parse_node_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if p.bodies.is_empty() {
        p.err(head.span, ParseErrorKind::Syntax, "`node` before any `body`");
        return;
    }
    if rest.len() != 4 {
        p.err(head.span, ParseErrorKind::Syntax, "expected `node <id> <x> <y> <z>`");
        return;
    }
    let id = p.ident(rest[0], "node");
    let span = rest[0].span;
    let (x, y, z) = (p.number(rest[1]), p.number(rest[2]), p.number(rest[3]));
    if let (Some(id), Some(x), Some(y), Some(z)) = (id, x, y, z) {
        let body = p.bodies.last_mut().unwrap();
        body.nodes.push((id, span, Vec3::new(x.value, y.value, z.value)));
    }
}

fn parse_rod_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if p.bodies.is_empty() {
        p.err(head.span, ParseErrorKind::Syntax, "`rod` before any `body`");
        return;
    }
    if rest.len() != 3 {
        p.err(
            head.span,
            ParseErrorKind::Syntax,
            "expected `rod <nodeA> <nodeB> mass=<kg>`",
        );
        return;
    }
    let a = p.ident(rest[0], "node");
    let b = p.ident(rest[1], "node");
    let mass = p.keyed(rest[2], "mass");
    if let (Some(a), Some(b), Some(mass)) = (a, b, mass) {
        let body = p.bodies.last_mut().unwrap();
        body.rods.push((a, b, head.span, mass));
    }
}

fn parse_cable_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if rest.len() != 7 {
        p.err(
            head.span,
            ParseErrorKind::Syntax,
            "expected `cable <id> kind=<active|passive> k= b= rest= min= max=`",
        );
        return;
    }
    let id = p.ident(rest[0], "cable");
    let kind = match rest[1].text.split_once('=') {
        Some(("kind", "active")) => Some(CableKind::Active),
        Some(("kind", "passive")) => Some(CableKind::Passive),
        _ => {
            p.err(
                rest[1].span,
                ParseErrorKind::Syntax,
                format!("expected `kind=active` or `kind=passive`, found `{}`", rest[1].text),
            );
            None
        }
    };
    let k = p.keyed(rest[2], "k");
    let b = p.keyed(rest[3], "b");
    let rest_len = p.keyed(rest[4], "rest");
    let min = p.keyed(rest[5], "min");
    let max = p.keyed(rest[6], "max");
    if let (Some(id), Some(kind), Some(k), Some(b), Some(rest_len), Some(min), Some(max)) =
        (id, kind, k, b, rest_len, min, max)
    {
        p.cables.push(RawCable {
            id,
            span: head.span,
            kind,
            k,
            b,
            rest: rest_len,
            min,
            max,
            route: Vec::new(),
            actuator: None,
            actuator_span: None,
        });
    }
}

fn parse_route_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if p.cables.is_empty() {
        p.err(head.span, ParseErrorKind::Syntax, "`route` before any `cable`");
        return;
    }
    if rest.len() < 2 {
        p.err(
            head.span,
            ParseErrorKind::Syntax,
            "route needs at least two `body.node` references",
        );
        return;
    }
    let refs: Vec<_> = rest.iter().filter_map(|t| p.node_ref(*t)).collect();
    let cable = p.cables.last_mut().unwrap();
    if !cable.route.is_empty() {
        p.errors.push(ParseError {
            span: head.span,
            kind: ParseErrorKind::Duplicate,
            message: format!("cable `{}` already has a route", cable.id),
        });
        return;
    }
    cable.route = refs;
}

fn parse_actuator_line<'a>(p: &mut Parser<'a>, head: Token<'a>, rest: &[Token<'a>]) {
    if p.cables.is_empty() {
        p.err(head.span, ParseErrorKind::Syntax, "`actuator` before any `cable`");
        return;
    }
    if rest.len() != 2 {
        p.err(
            head.span,
            ParseErrorKind::Syntax,
            "expected `actuator vmax=<m/s> amax=<m/s2>`",
        );
        return;
    }
    let vmax = p.keyed(rest[0], "vmax");
    let amax = p.keyed(rest[1], "amax");
    if let (Some(vmax), Some(amax)) = (vmax, amax) {
        let cable = p.cables.last_mut().unwrap();
        if cable.actuator.is_some() {
            p.errors.push(ParseError {
                span: head.span,
                kind: ParseErrorKind::Duplicate,
                message: format!("cable `{}` already has an actuator", cable.id),
            });
        } else {
            cable.actuator = Some((vmax, amax));
            cable.actuator_span = Some(head.span);
        }
    }
}

fn semantic_pass(p: &mut Parser<'_>) {
    let mut errors = Vec::new();
    let mut err = |span: SourceSpan, kind: ParseErrorKind, message: String| {
        errors.push(ParseError {
            span,
            kind,
            message,
        })
    };

    for (i, body) in p.bodies.iter().enumerate() {
        if p.bodies[..i].iter().any(|b| b.name == body.name) {
            err(
                body.span,
                ParseErrorKind::Duplicate,
                format!("duplicate body `{}`", body.name),
            );
        }
        if body.nodes.is_empty() {
            err(
                body.span,
                ParseErrorKind::Syntax,
                format!("body `{}` has no nodes", body.name),
            );
        }
        if !body.fixed && body.mass.value <= 0.0 {
            err(
                body.mass.span,
                ParseErrorKind::Range,
                "mass must be positive".into(),
            );
        }
        for (j, node) in body.nodes.iter().enumerate() {
            if body.nodes[..j].iter().any(|n| n.0 == node.0) {
                err(
                    node.1,
                    ParseErrorKind::Duplicate,
                    format!("duplicate node `{}` on body `{}`", node.0, body.name),
                );
            }
        }
        let mut rod_sum = 0.0;
        for rod in &body.rods {
            for end in [rod.0, rod.1] {
                if !body.nodes.iter().any(|n| n.0 == end) {
                    err(
                        rod.2,
                        ParseErrorKind::Reference,
                        format!("rod references unknown node `{}.{end}`", body.name),
                    );
                }
            }
            if rod.3.value <= 0.0 {
                err(rod.3.span, ParseErrorKind::Range, "rod mass must be positive".into());
            }
            rod_sum += rod.3.value;
        }
        if !body.rods.is_empty() && (rod_sum - body.mass.value).abs() > 1e-9 * body.mass.value.abs().max(1.0)
        {
            err(
                body.span,
                ParseErrorKind::Range,
                format!(
                    "rod masses sum to {rod_sum} but body `{}` has mass {}",
                    body.name, body.mass.value
                ),
            );
        }
    }

    for (i, cable) in p.cables.iter().enumerate() {
        if p.cables[..i].iter().any(|c| c.id == cable.id) {
            err(
                cable.span,
                ParseErrorKind::Duplicate,
                format!("duplicate cable `{}`", cable.id),
            );
        }
        if cable.k.value <= 0.0 {
            err(cable.k.span, ParseErrorKind::Range, "k must be positive".into());
        }
        if cable.b.value < 0.0 {
            err(cable.b.span, ParseErrorKind::Range, "b must be non-negative".into());
        }
        let (min, rest, max) = (cable.min.value, cable.rest.value, cable.max.value);
        if !(min > 0.0 && min <= rest && rest <= max) {
            err(
                cable.rest.span,
                ParseErrorKind::Range,
                "lengths must satisfy 0 < min <= rest <= max".into(),
            );
        }
        if cable.route.len() < 2 {
            err(
                cable.span,
                ParseErrorKind::Syntax,
                format!("cable `{}` has no route", cable.id),
            );
        }
        for pair in cable.route.windows(2) {
            if pair[0].0 == pair[1].0 {
                err(
                    pair[1].1,
                    ParseErrorKind::Duplicate,
                    format!("consecutive route entries repeat `{}`", pair[0].0),
                );
            }
        }
        for (node_ref, span) in &cable.route {
            let ok = p
                .bodies
                .iter()
                .find(|b| b.name == node_ref.body)
                .map(|b| b.nodes.iter().any(|n| n.0 == node_ref.node))
                .unwrap_or(false);
            if !ok {
                err(
                    *span,
                    ParseErrorKind::Reference,
                    format!("unknown node `{node_ref}`"),
                );
            }
        }
        match (cable.kind, &cable.actuator) {
            (CableKind::Active, None) => err(
                cable.span,
                ParseErrorKind::Syntax,
                format!("active cable `{}` needs an `actuator` line", cable.id),
            ),
            (CableKind::Passive, Some(_)) => err(
                cable.actuator_span.unwrap(),
                ParseErrorKind::Syntax,
                format!("passive cable `{}` must not have an actuator", cable.id),
            ),
            (CableKind::Active, Some((vmax, amax))) => {
                if vmax.value <= 0.0 {
                    err(vmax.span, ParseErrorKind::Range, "vmax must be positive".into());
                }
                if amax.value <= 0.0 {
                    err(amax.span, ParseErrorKind::Range, "amax must be positive".into());
                }
            }
            (CableKind::Passive, None) => {}
        }
    }

    let gravity = p.gravity.map(|(g, _)| g).unwrap_or_else(Vec3::zeros);
    if gravity.norm() != 0.0 && !p.bodies.iter().any(|b| b.fixed) {
        let span = p
            .gravity
            .map(|(_, s)| s)
            .unwrap_or(SourceSpan { line: 1, column: 1 });
        err(
            span,
            ParseErrorKind::Range,
            "structure needs at least one fixed body or zero gravity".into(),
        );
    }

    p.errors.extend(errors);
}

fn assemble(p: &Parser<'_>) -> StructureDef {
    let bodies = p
        .bodies
        .iter()
        .map(|raw| {
            let nodes = raw
                .nodes
                .iter()
                .map(|(id, _, pos)| BodyNode {
                    id: (*id).to_string(),
                    local_position: *pos,
                })
                .collect();
            let rods = raw
                .rods
                .iter()
                .map(|(a, b, _, m)| Rod {
                    node_a: (*a).to_string(),
                    node_b: (*b).to_string(),
                    mass: m.value,
                })
                .collect();
            RigidBodySpec::from_parts(raw.name, raw.fixed, raw.mass.value, nodes, rods)
        })
        .collect();
    let cables = p
        .cables
        .iter()
        .map(|raw| CableSpec {
            id: raw.id.to_string(),
            route: raw.route.iter().map(|(r, _)| r.clone()).collect(),
            stiffness_k: raw.k.value,
            damping_b: raw.b.value,
            rest_length: raw.rest.value,
            min_length: raw.min.value,
            max_length: raw.max.value,
            kind: raw.kind,
            actuator: raw.actuator.map(|(vmax, amax)| ActuatorSpec {
                target_velocity: vmax.value,
                max_accel: amax.value,
            }),
        })
        .collect();
    StructureDef {
        name: p.structure_name.map(|(n, _)| n).unwrap_or("").to_string(),
        bodies,
        cables,
        gravity: p.gravity.map(|(g, _)| g).unwrap_or_else(Vec3::zeros),
    }
}

fn span_of_element(p: &Parser<'_>, element: &str) -> SourceSpan {
    if let Some(name) = element.strip_prefix("body ") {
        if let Some(b) = p.bodies.iter().find(|b| b.name == name) {
            return b.span;
        }
    }
    if let Some(id) = element.strip_prefix("cable ") {
        if let Some(c) = p.cables.iter().find(|c| c.id == id) {
            return c.span;
        }
    }
    p.structure_name
        .map(|(_, s)| s)
        .unwrap_or(SourceSpan { line: 1, column: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
structure pendulum
gravity 0 0 -9.81
body base mass=1 fixed
  node hook 0 0 1
body bob mass=0.5
  node p 0 0 0
cable tether kind=passive k=100 b=1 rest=0.9 min=0.5 max=1.5
  route base.hook bob.p
";

    #[test]
    fn minimal_file_parses() {
        let s = parse_structure(MINIMAL).unwrap();
        assert_eq!(s.name, "pendulum");
        assert_eq!(s.bodies.len(), 2);
        assert_eq!(s.cables.len(), 1);
        assert_eq!(validate_structure(&s), vec![]);
    }

    #[test]
    fn unknown_route_node_is_a_reference_error_with_span() {
        let text = MINIMAL.replace("route base.hook bob.p", "route base.hook arm.q");
        let errs = parse_structure(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::Reference);
        assert_eq!(errs[0].span.line, 8);
        assert!(errs[0].message.contains("arm.q"));
    }

    #[test]
    fn negative_stiffness_is_a_range_error_at_the_value() {
        let text = MINIMAL.replace("k=100", "k=-5");
        let errs = parse_structure(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseErrorKind::Range);
        assert_eq!(errs[0].span.line, 7);
    }

    #[test]
    fn several_errors_reported_in_one_pass() {
        let text = MINIMAL
            .replace("k=100", "k=-5")
            .replace("node p 0 0 0", "node p 0 zero 0");
        let errs = parse_structure(&text).unwrap_err();
        assert!(errs.len() >= 2);
        assert!(errs.windows(2).all(|w| w[0].span <= w[1].span));
    }

    #[test]
    fn crlf_input_is_accepted() {
        let text = MINIMAL.replace('\n', "\r\n");
        assert!(parse_structure(&text).is_ok());
    }

    #[test]
    fn duplicate_cable_reported_at_second_occurrence() {
        let dup = "cable tether kind=passive k=100 b=1 rest=0.9 min=0.5 max=1.5\n  route base.hook bob.p\n";
        let text = format!("{MINIMAL}{dup}");
        let errs = parse_structure(&text).unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Duplicate);
        assert_eq!(errs[0].span.line, 9);
    }

    #[test]
    fn missing_actuator_on_active_cable() {
        let text = MINIMAL.replace("kind=passive", "kind=active");
        let errs = parse_structure(&text).unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::Syntax);
        assert!(errs[0].message.contains("actuator"));
    }

    #[test]
    fn empty_input_reports_missing_header() {
        let errs = parse_structure("# just a comment\n").unwrap_err();
        assert_eq!(errs[0].span, SourceSpan { line: 1, column: 1 });
    }
}
