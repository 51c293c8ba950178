//! Concrete syntax: `term := x<digits> | name | name '(' term (',' term)* ')'`.

use crate::error::{Error, Result};
use crate::term::{is_variable_lexeme, Identity, Signature, Term};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    sig: Option<&'a Signature>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        for (i, c) in self.src[start..].char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            self.pos = start + i + c.len_utf8();
        }
        if self.pos == start {
            return self.err("expected a variable or symbol name");
        }
        Ok(&self.src[start..self.pos])
    }

    fn term(&mut self) -> Result<Term> {
        let start = self.pos;
        let name = self.ident()?;
        if is_variable_lexeme(name) {
            let index: u32 = name[1..].parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("variable index out of range in `{name}`"),
            })?;
            if index == 0 {
                return Err(Error::Syntax {
                    offset: start,
                    message: "variable indices start at 1".into(),
                });
            }
            if self.peek() == Some('(') {
                return self.err(format!("variable `{name}` cannot take arguments"));
            }
            return Ok(Term::Var(index));
        }
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected `,` or `)`"),
                }
            }
        }
        let symbol = match self.sig {
            Some(sig) => {
                let arity = sig
                    .arity(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: name.to_string(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                sig.symbol(name).expect("symbol present")
            }
            None => name.into(),
        };
        Ok(Term::App(symbol, args))
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

/// Parses a term and checks it against `sig`.
pub fn parse_term(input: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser {
        src: input,
        pos: 0,
        sig: Some(sig),
    };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a term without a signature; arities are whatever the text uses.
pub fn parse_term_untyped(input: &str) -> Result<Term> {
    let mut p = Parser {
        src: input,
        pos: 0,
        sig: None,
    };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `lhs = rhs` (also accepts `≈`).
pub fn parse_identity(input: &str, sig: &Signature) -> Result<Identity> {
    let (lhs, rhs) = split_identity(input)?;
    Ok(Identity::new(parse_term(lhs, sig)?, parse_term(rhs, sig)?))
}

pub fn parse_identity_untyped(input: &str) -> Result<Identity> {
    let (lhs, rhs) = split_identity(input)?;
    Ok(Identity::new(
        parse_term_untyped(lhs)?,
        parse_term_untyped(rhs)?,
    ))
}

fn split_identity(input: &str) -> Result<(&str, &str)> {
    let (lhs, rhs) = input
        .split_once('=')
        .or_else(|| input.split_once('≈'))
        .ok_or_else(|| Error::Syntax {
            offset: 0,
            message: "expected `lhs = rhs`".into(),
        })?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig() -> Signature {
        Signature::parse("f/2, g/1, c/0").unwrap()
    }

    #[test]
    fn grammar_cases() {
        assert_eq!(
            parse_term("f(x1,x2)", &sig()).unwrap(),
            Term::app("f", vec![Term::var(1), Term::var(2)])
        );
        assert_eq!(parse_term(" g ( c ) ", &sig()).unwrap().to_string(), "g(c)");
        let ex1 = "f(f(x1,f(f(f(x1,x2),x2),x3)),x4)";
        assert_eq!(parse_term(ex1, &sig()).unwrap().to_string(), ex1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_term("f(x1)", &sig()),
            Err(Error::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert!(matches!(parse_term("h(x1)", &sig()), Err(Error::UnknownSymbol(_))));
        assert!(matches!(
            parse_term("f(x1,", &sig()),
            Err(Error::Syntax { offset: 5, .. })
        ));
        assert!(parse_term("x0", &sig()).is_err());
        assert!(parse_term("x1(x2)", &sig()).is_err());
        assert!(parse_term("f(x1,x2) x3", &sig()).is_err());
    }

    #[test]
    fn identities() {
        let e = parse_identity("f(x1,x1) = x1", &sig()).unwrap();
        assert_eq!(e.to_string(), "f(x1,x1) = x1");
        assert!(parse_identity("f(x1,x1)", &sig()).is_err());
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (1u32..6).prop_map(Term::Var),
            Just(Term::app("c", vec![])),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app("f", vec![a, b])),
                inner.prop_map(|a| Term::app("g", vec![a])),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(t in arb_term()) {
            let back = parse_term(&t.to_string(), &sig()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
