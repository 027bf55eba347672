//! A small s-expression reader with source positions.
//!
//! PDDL is case-insensitive, so every symbol is lowercased on the way in.

use std::fmt;

use super::ParseError;

/// 1-based line/column of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Symbol(..) => None,
        }
    }

    /// The leading symbol of a list, if any: `(and ...)` gives `"and"`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExpr::as_symbol)
    }
}

/// Reads every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut token = String::new();
    let mut token_pos = Pos::default();

    fn flush(token: &mut String, pos: Pos, stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>) {
        if token.is_empty() {
            return;
        }
        let sym = SExpr::Symbol(std::mem::take(token).to_lowercase(), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(sym),
            None => top.push(sym),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                let (items, open) =
                    stack.pop().ok_or_else(|| ParseError::Syntax { line, col, message: "unexpected ')'".into() })?;
                let list = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut top);

    if let Some((_, open)) = stack.pop() {
        return Err(ParseError::Syntax {
            line: open.line,
            col: open.col,
            message: "unbalanced '(' is never closed".into(),
        });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let exprs = read_all("(a (B c)\n  d) ; comment\n(e)").unwrap();
        assert_eq!(exprs.len(), 2);
        let items = exprs[0].as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some("a"));
        assert_eq!(items[1].head(), Some("b"));
        assert_eq!(items[2].pos(), Pos { line: 2, col: 3 });
        assert_eq!(exprs[1].pos(), Pos { line: 3, col: 1 });
    }

    #[test]
    fn unclosed_paren_reports_its_position() {
        let err = read_all("(define\n  (domain x)").unwrap_err();
        assert_eq!(err, ParseError::Syntax { line: 1, col: 1, message: "unbalanced '(' is never closed".into() });
    }

    #[test]
    fn stray_close_paren() {
        let err = read_all("(a))").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, col: 4, .. }));
    }
}
