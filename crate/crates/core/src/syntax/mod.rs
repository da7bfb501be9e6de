//! Lexing, parsing and printing of VML source.

pub mod ast;
mod lexer;
mod parser;
mod printer;

pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse_expr, parse_model};
pub use printer::pretty_print;

#[cfg(test)]
mod tests {
    use super::ast::*;
    use super::*;
    use crate::diagnostic::Code;
    use crate::expr::{BinaryOp, ExprKind};

    const VELOCITY: &str = include_str!("../../fixtures/velocity_verbatim.vml");
    const COFFEE: &str = include_str!("../../fixtures/coffee.vml");

    #[test]
    fn velocity_listing_counts() {
        let m = parse_model(VELOCITY).unwrap();
        assert_eq!(m.types().count(), 2);
        assert_eq!(m.contexts().count(), 2);
        assert_eq!(m.rules().count(), 3);
        assert_eq!(m.properties().count(), 2);
        assert_eq!(m.varpoints().count(), 2);
        let perf = m.properties().next().unwrap();
        assert_eq!(perf.direction, Some(Direction::Maximized));
        assert_eq!(perf.priorities[0].params[0].name, "ctx_battery");
    }

    #[test]
    fn coffee_listing_counts() {
        let m = parse_model(COFFEE).unwrap();
        assert_eq!(m.types().count(), 5);
        assert_eq!(m.types().filter(|t| matches!(t, TypeDef::Enum(_))).count(), 1);
        assert_eq!(m.contexts().count(), 6);
        assert_eq!(m.general_vars().count(), 2);
        assert_eq!(m.rules().count(), 4);
        assert_eq!(m.varpoints().count(), 1);
        assert!(m.general_vars().all(|g| g.ty.is_none()));
    }

    #[test]
    fn empty_range_is_rejected() {
        let err = parse_model("number t { range: [1,0]; precision: 1; }").unwrap_err();
        assert_eq!(err[0].code, Code::InvalidType);
        assert!(err[0].message.contains("empty range"), "{}", err[0].message);
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a < 1 & !b | c = d + e * -f").unwrap();
        // (a < 1 & !b) | (c = (d + (e * -f)))
        let ExprKind::Binary(BinaryOp::Or, lhs, rhs) = &e.kind else { panic!("{e:?}") };
        assert!(matches!(lhs.kind, ExprKind::Binary(BinaryOp::And, _, _)));
        let ExprKind::Binary(BinaryOp::Eq, _, sum) = &rhs.kind else { panic!() };
        assert!(matches!(sum.kind, ExprKind::Binary(BinaryOp::Add, _, _)));
        assert_eq!(e.to_string(), "a < 1 & !b | c = d + e * -f");
    }

    #[test]
    fn printer_keeps_needed_parentheses() {
        for src in ["(a + b) * c", "a - (b - c)", "-(a + b)", "!(a & b)", "(a < b) = c"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), src);
        }
        assert_eq!(parse_expr("((a)) + (b * c)").unwrap().to_string(), "a + b * c");
    }

    #[test]
    fn syntax_errors_recover_at_semicolon() {
        let src = "context a : t\ncontext b : t;\nrule r : a < => x = 1;\nvarpoint x : t;";
        let err = parse_model(src).unwrap_err();
        assert_eq!(err.len(), 2, "{err:?}");
        assert!(err.iter().all(|d| d.code == Code::Syntax));
        assert_eq!(err[0].span.line, 2);
        assert!(err[0].message.contains("expected `;`"), "{}", err[0].message);
        assert_eq!(err[1].span.line, 3);
        assert!(err[1].message.contains("expected expression"));
    }

    #[test]
    fn error_inside_braces_skips_the_whole_block() {
        let src = "number t { range: [0 10]; precision: 1; }\ncontext c : t;";
        let err = parse_model(src).unwrap_err();
        assert_eq!(err.len(), 1, "{err:?}");
    }

    #[test]
    fn varpoint_body() {
        let m = parse_model(
            "number t { range: [0,10]; precision: 1; }\n\
             varpoint x : t { x >= 2, y > 3 => x = 4; }\nvarpoint y : t;",
        )
        .unwrap();
        let vp = m.varpoints().next().unwrap();
        assert_eq!(vp.body.len(), 2);
        assert!(matches!(vp.body[0], Constraint::Invariant(_)));
        assert!(matches!(vp.body[1], Constraint::Implication(_)));
    }

    #[test]
    fn enum_codes_print_only_when_explicit() {
        let m = parse_model("enum e { A; B(5); C; }").unwrap();
        let text = pretty_print(&m);
        assert_eq!(text, "enum e { A; B(5); C; }\n");
    }

    #[test]
    fn round_trip_listings() {
        for src in [VELOCITY, COFFEE] {
            let m = parse_model(src).unwrap();
            let printed = pretty_print(&m);
            let again = parse_model(&printed).unwrap();
            assert_eq!(m, again);
            assert_eq!(printed, pretty_print(&again));
        }
    }

    #[test]
    fn diagnostics_are_deterministic() {
        let src = "context a : t\nrule r : => ;\n@";
        assert_eq!(parse_model(src).unwrap_err(), parse_model(src).unwrap_err());
    }
}
