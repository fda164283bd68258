//! Surface syntax: lexer and parser for `.utt` programs.
//!
//! A program is a sequence of definitions:
//!
//! ```text
//! def plus : Nat -> Nat -> Nat := fun m n => natelim (x => Nat) n (k ih => su ih) m
//! def two unfolds plus : Nat := plus 1 1
//! abbreviation def three : Nat := 3
//! abstract def secret : Nat := 2
//! def lemma : Id Nat two 2 := unfold two plus in refl
//! ```
//!
//! Line comments start with `--`. Identifiers may contain `-` when it is
//! followed by an identifier character, so `a->b` still lexes as an arrow.
//! Operator names are written in parentheses, as in `(+)`.

use std::fmt;

use crate::error::{Span, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Num(u64),
    KwDef,
    KwUnfolds,
    KwAbbreviation,
    KwAbstract,
    KwUnfold,
    KwIn,
    KwFun,
    KwNatElim,
    KwJ,
    KwRefl,
    KwSu,
    KwZe,
    KwNat,
    KwUniv,
    KwId,
    KwEl,
    Colon,
    ColonEq,
    Arrow,
    FatArrow,
    LParen,
    RParen,
    Question,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Ident(s) => write!(f, "`{s}`"),
            Num(n) => write!(f, "`{n}`"),
            KwDef => write!(f, "`def`"),
            KwUnfolds => write!(f, "`unfolds`"),
            KwAbbreviation => write!(f, "`abbreviation`"),
            KwAbstract => write!(f, "`abstract`"),
            KwUnfold => write!(f, "`unfold`"),
            KwIn => write!(f, "`in`"),
            KwFun => write!(f, "`fun`"),
            KwNatElim => write!(f, "`natelim`"),
            KwJ => write!(f, "`j`"),
            KwRefl => write!(f, "`refl`"),
            KwSu => write!(f, "`su`"),
            KwZe => write!(f, "`ze`"),
            KwNat => write!(f, "`Nat`"),
            KwUniv => write!(f, "`U`"),
            KwId => write!(f, "`Id`"),
            KwEl => write!(f, "`El`"),
            Colon => write!(f, "`:`"),
            ColonEq => write!(f, "`:=`"),
            Arrow => write!(f, "`->`"),
            FatArrow => write!(f, "`=>`"),
            LParen => write!(f, "`(`"),
            RParen => write!(f, "`)`"),
            Question => write!(f, "`?`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn keyword(s: &str) -> Option<TokenKind> {
    use TokenKind::*;
    Some(match s {
        "def" => KwDef,
        "unfolds" => KwUnfolds,
        "abbreviation" => KwAbbreviation,
        "abstract" => KwAbstract,
        "unfold" => KwUnfold,
        "in" => KwIn,
        "fun" => KwFun,
        "natelim" => KwNatElim,
        "j" => KwJ,
        "refl" => KwRefl,
        "su" => KwSu,
        "ze" => KwZe,
        "Nat" => KwNat,
        "U" => KwUniv,
        "Id" => KwId,
        "El" => KwEl,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_op_char(c: char) -> bool {
    "+-*/=<>&|^%!~".contains(c)
}

pub fn lex(src: &str) -> Result<Vec<Token>, SurfaceError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    // byte offset tracking for spans
    let offsets: Vec<usize> = src.char_indices().map(|(o, _)| o).collect();
    let byte_at = |i: usize| offsets.get(i).copied().unwrap_or(src.len());
    while i < bytes.len() {
        let c = bytes[i];
        let start = byte_at(i);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && bytes.get(i + 1) == Some(&'-') {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let kind = if is_ident_start(c) {
            let mut j = i + 1;
            loop {
                match bytes.get(j) {
                    Some(&ch) if is_ident_char(ch) => j += 1,
                    // a dash continues the identifier only before another
                    // identifier character, so arrows still terminate it
                    Some(&'-')
                        if bytes
                            .get(j + 1)
                            .is_some_and(|&ch| is_ident_char(ch)) =>
                    {
                        j += 2
                    }
                    _ => break,
                }
            }
            let word: String = bytes[i..j].iter().collect();
            i = j;
            keyword(&word).unwrap_or(TokenKind::Ident(word))
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while bytes.get(j).is_some_and(|ch| ch.is_ascii_digit()) {
                j += 1;
            }
            let word: String = bytes[i..j].iter().collect();
            let n = word.parse::<u64>().map_err(|_| SurfaceError::Lex {
                msg: format!("numeral `{word}` is out of range"),
                span: Span::new(start, byte_at(j)),
            })?;
            i = j;
            TokenKind::Num(n)
        } else if c == '(' {
            // operator names: `(` immediately followed by operator
            // characters and a closing `)`
            let mut j = i + 1;
            while bytes.get(j).is_some_and(|&ch| is_op_char(ch)) {
                j += 1;
            }
            if j > i + 1 && bytes.get(j) == Some(&')') {
                let word: String = bytes[i..=j].iter().collect();
                i = j + 1;
                TokenKind::Ident(word)
            } else {
                i += 1;
                TokenKind::LParen
            }
        } else if c == ')' {
            i += 1;
            TokenKind::RParen
        } else if c == '?' {
            i += 1;
            TokenKind::Question
        } else if c == ':' {
            if bytes.get(i + 1) == Some(&'=') {
                i += 2;
                TokenKind::ColonEq
            } else {
                i += 1;
                TokenKind::Colon
            }
        } else if c == '-' && bytes.get(i + 1) == Some(&'>') {
            i += 2;
            TokenKind::Arrow
        } else if c == '=' && bytes.get(i + 1) == Some(&'>') {
            i += 2;
            TokenKind::FatArrow
        } else {
            return Err(SurfaceError::Lex {
                msg: format!("unexpected character `{c}`"),
                span: Span::new(start, byte_at(i + 1)),
            });
        };
        toks.push(Token {
            kind,
            span: Span::new(start, byte_at(i)),
        });
    }
    Ok(toks)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Nat,
    Univ,
    Zero,
    Lit(u64),
    /// `su`, `refl`, `El`, and `Id` are first-class heads; their arguments
    /// arrive through `App` and arity is resolved during elaboration.
    SuKw,
    ReflKw,
    ElKw,
    IdKw,
    Hole,
    Fun(Vec<(String, Span)>, Box<Expr>),
    /// `(x : A) -> B`.
    Pi(String, Box<Expr>, Box<Expr>),
    /// `A -> B`.
    Arrow(Box<Expr>, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    /// `natelim (x => C) b (k ih => s) t`.
    NatElim {
        motive_var: String,
        motive: Box<Expr>,
        base: Box<Expr>,
        step_vars: (String, String),
        step: Box<Expr>,
        target: Box<Expr>,
    },
    /// `j (y e => C) r t`.
    J {
        motive_vars: (String, String),
        motive: Box<Expr>,
        refl_case: Box<Expr>,
        target: Box<Expr>,
    },
    Unfold(Vec<(String, Span)>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Def {
    pub is_abbreviation: bool,
    pub is_abstract: bool,
    pub name: String,
    pub name_span: Span,
    pub unfolds: Vec<(String, Span)>,
    pub ty: Expr,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub defs: Vec<Def>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(toks: Vec<Token>, src_len: usize) -> Parser {
        Parser {
            toks,
            pos: 0,
            end: src_len,
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek2(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos + 1).map(|t| &t.kind)
    }

    fn here(&self) -> Span {
        self.toks
            .get(self.pos)
            .map(|t| t.span)
            .unwrap_or(Span::new(self.end, self.end))
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, SurfaceError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(SurfaceError::Parse {
                expected: format!("{kind}, found {}", t.kind),
                span: t.span,
            }),
            None => Err(SurfaceError::Parse {
                expected: format!("{kind}, found end of input"),
                span: Span::new(self.end, self.end),
            }),
        }
    }

    fn ident(&mut self) -> Result<(String, Span), SurfaceError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::Ident(s),
                span,
            }) => Ok((s, span)),
            Some(t) => Err(SurfaceError::Parse {
                expected: format!("an identifier, found {}", t.kind),
                span: t.span,
            }),
            None => Err(SurfaceError::Parse {
                expected: "an identifier, found end of input".into(),
                span: Span::new(self.end, self.end),
            }),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<(String, Span)>, SurfaceError> {
        let mut out = vec![self.ident()?];
        while matches!(self.peek(), Some(TokenKind::Ident(_))) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn program(&mut self) -> Result<Program, SurfaceError> {
        let mut defs: Vec<Def> = Vec::new();
        while self.peek().is_some() {
            let d = self.def()?;
            if defs.iter().any(|e| e.name == d.name) {
                return Err(SurfaceError::DuplicateDef {
                    name: d.name,
                    span: d.name_span,
                });
            }
            defs.push(d);
        }
        Ok(Program { defs })
    }

    fn def(&mut self) -> Result<Def, SurfaceError> {
        let start = self.here();
        let mut is_abbreviation = false;
        let mut is_abstract = false;
        loop {
            match self.peek() {
                Some(TokenKind::KwAbbreviation) => {
                    self.next();
                    is_abbreviation = true;
                }
                Some(TokenKind::KwAbstract) => {
                    self.next();
                    is_abstract = true;
                }
                _ => break,
            }
        }
        self.expect(TokenKind::KwDef)?;
        let (name, name_span) = self.ident()?;
        let unfolds = if matches!(self.peek(), Some(TokenKind::KwUnfolds)) {
            self.next();
            self.ident_list()?
        } else {
            Vec::new()
        };
        self.expect(TokenKind::Colon)?;
        let ty = self.expr()?;
        self.expect(TokenKind::ColonEq)?;
        let body = self.expr()?;
        let span = start.join(body.span);
        Ok(Def {
            is_abbreviation,
            is_abstract,
            name,
            name_span,
            unfolds,
            ty,
            body,
            span,
        })
    }

    fn expr(&mut self) -> Result<Expr, SurfaceError> {
        match self.peek() {
            Some(TokenKind::KwFun) => {
                let start = self.here();
                self.next();
                let params = self.ident_list()?;
                self.expect(TokenKind::FatArrow)?;
                let body = self.expr()?;
                let span = start.join(body.span);
                Ok(Expr {
                    kind: ExprKind::Fun(params, Box::new(body)),
                    span,
                })
            }
            Some(TokenKind::KwUnfold) => {
                let start = self.here();
                self.next();
                let names = self.ident_list()?;
                self.expect(TokenKind::KwIn)?;
                let body = self.expr()?;
                let span = start.join(body.span);
                Ok(Expr {
                    kind: ExprKind::Unfold(names, Box::new(body)),
                    span,
                })
            }
            _ => self.arrow(),
        }
    }

    fn arrow(&mut self) -> Result<Expr, SurfaceError> {
        // dependent binder: `(x : A) -> B`
        if matches!(self.peek(), Some(TokenKind::LParen))
            && matches!(self.peek2(), Some(TokenKind::Ident(_)))
            && matches!(
                self.toks.get(self.pos + 2).map(|t| &t.kind),
                Some(TokenKind::Colon)
            )
        {
            let start = self.here();
            self.next();
            let (x, _) = self.ident()?;
            self.expect(TokenKind::Colon)?;
            let dom = self.expr()?;
            self.expect(TokenKind::RParen)?;
            self.expect(TokenKind::Arrow)?;
            let cod = self.arrow()?;
            let span = start.join(cod.span);
            return Ok(Expr {
                kind: ExprKind::Pi(x, Box::new(dom), Box::new(cod)),
                span,
            });
        }
        let lhs = self.app()?;
        if matches!(self.peek(), Some(TokenKind::Arrow)) {
            self.next();
            let rhs = self.arrow()?;
            let span = lhs.span.join(rhs.span);
            Ok(Expr {
                kind: ExprKind::Arrow(Box::new(lhs), Box::new(rhs)),
                span,
            })
        } else {
            Ok(lhs)
        }
    }

    fn app(&mut self) -> Result<Expr, SurfaceError> {
        match self.peek() {
            Some(TokenKind::KwNatElim) => return self.natelim(),
            Some(TokenKind::KwJ) => return self.jexpr(),
            _ => {}
        }
        let mut head = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            let span = head.span.join(arg.span);
            head = Expr {
                kind: ExprKind::App(Box::new(head), Box::new(arg)),
                span,
            };
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                TokenKind::Ident(_)
                    | TokenKind::Num(_)
                    | TokenKind::KwZe
                    | TokenKind::KwNat
                    | TokenKind::KwUniv
                    | TokenKind::KwSu
                    | TokenKind::KwRefl
                    | TokenKind::KwEl
                    | TokenKind::KwId
                    | TokenKind::LParen
                    | TokenKind::Question
            )
        )
    }

    fn natelim(&mut self) -> Result<Expr, SurfaceError> {
        let start = self.here();
        self.expect(TokenKind::KwNatElim)?;
        self.expect(TokenKind::LParen)?;
        let (x, _) = self.ident()?;
        self.expect(TokenKind::FatArrow)?;
        let motive = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let base = self.atom()?;
        self.expect(TokenKind::LParen)?;
        let (k, _) = self.ident()?;
        let (ih, _) = self.ident()?;
        self.expect(TokenKind::FatArrow)?;
        let step = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let target = self.atom()?;
        let span = start.join(target.span);
        Ok(Expr {
            kind: ExprKind::NatElim {
                motive_var: x,
                motive: Box::new(motive),
                base: Box::new(base),
                step_vars: (k, ih),
                step: Box::new(step),
                target: Box::new(target),
            },
            span,
        })
    }

    fn jexpr(&mut self) -> Result<Expr, SurfaceError> {
        let start = self.here();
        self.expect(TokenKind::KwJ)?;
        self.expect(TokenKind::LParen)?;
        let (y, _) = self.ident()?;
        let (e, _) = self.ident()?;
        self.expect(TokenKind::FatArrow)?;
        let motive = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let refl_case = self.atom()?;
        let target = self.atom()?;
        let span = start.join(target.span);
        Ok(Expr {
            kind: ExprKind::J {
                motive_vars: (y, e),
                motive: Box::new(motive),
                refl_case: Box::new(refl_case),
                target: Box::new(target),
            },
            span,
        })
    }

    fn atom(&mut self) -> Result<Expr, SurfaceError> {
        let span = self.here();
        let kind = match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let (s, _) = self.ident()?;
                ExprKind::Var(s)
            }
            Some(TokenKind::Num(n)) => {
                let n = *n;
                self.next();
                ExprKind::Lit(n)
            }
            Some(TokenKind::KwZe) => {
                self.next();
                ExprKind::Zero
            }
            Some(TokenKind::KwNat) => {
                self.next();
                ExprKind::Nat
            }
            Some(TokenKind::KwUniv) => {
                self.next();
                ExprKind::Univ
            }
            Some(TokenKind::KwSu) => {
                self.next();
                ExprKind::SuKw
            }
            Some(TokenKind::KwRefl) => {
                self.next();
                ExprKind::ReflKw
            }
            Some(TokenKind::KwEl) => {
                self.next();
                ExprKind::ElKw
            }
            Some(TokenKind::KwId) => {
                self.next();
                ExprKind::IdKw
            }
            Some(TokenKind::Question) => {
                self.next();
                ExprKind::Hole
            }
            Some(TokenKind::LParen) => {
                self.next();
                let e = self.expr()?;
                let close = self.expect(TokenKind::RParen)?;
                return Ok(Expr {
                    kind: e.kind,
                    span: span.join(close.span),
                });
            }
            _ => {
                return Err(SurfaceError::Parse {
                    expected: match self.next() {
                        Some(t) => format!("an expression, found {}", t.kind),
                        None => "an expression, found end of input".into(),
                    },
                    span,
                })
            }
        };
        Ok(Expr { kind, span })
    }
}

pub fn parse_program(src: &str) -> Result<Program, SurfaceError> {
    let toks = lex(src)?;
    let mut p = Parser::new(toks, src.len());
    p.program()
}

pub fn parse_expr(src: &str) -> Result<Expr, SurfaceError> {
    let toks = lex(src)?;
    let mut p = Parser::new(toks, src.len());
    let e = p.expr()?;
    if let Some(t) = p.next() {
        return Err(SurfaceError::Parse {
            expected: format!("end of input, found {}", t.kind),
            span: t.span,
        });
    }
    Ok(e)
}

/// Print a surface expression back to parseable text.
pub fn print_expr(e: &Expr) -> String {
    print_prec(e, 0)
}

fn print_prec(e: &Expr, prec: u8) -> String {
    let paren = |cond: bool, s: String| if cond { format!("({s})") } else { s };
    match &e.kind {
        ExprKind::Var(s) => s.clone(),
        ExprKind::Nat => "Nat".into(),
        ExprKind::Univ => "U".into(),
        ExprKind::Zero => "ze".into(),
        ExprKind::Lit(n) => n.to_string(),
        ExprKind::SuKw => "su".into(),
        ExprKind::ReflKw => "refl".into(),
        ExprKind::ElKw => "El".into(),
        ExprKind::IdKw => "Id".into(),
        ExprKind::Hole => "?".into(),
        ExprKind::Fun(params, body) => {
            let ps: Vec<&str> = params.iter().map(|(s, _)| s.as_str()).collect();
            paren(
                prec > 0,
                format!("fun {} => {}", ps.join(" "), print_prec(body, 0)),
            )
        }
        ExprKind::Pi(x, dom, cod) => paren(
            prec > 0,
            format!("({} : {}) -> {}", x, print_prec(dom, 0), print_prec(cod, 0)),
        ),
        ExprKind::Arrow(a, b) => paren(
            prec > 0,
            format!("{} -> {}", print_prec(a, 1), print_prec(b, 0)),
        ),
        ExprKind::App(f, a) => paren(
            prec > 1,
            format!("{} {}", print_prec(f, 1), print_prec(a, 2)),
        ),
        ExprKind::NatElim {
            motive_var,
            motive,
            base,
            step_vars,
            step,
            target,
        } => paren(
            prec > 1,
            format!(
                "natelim ({} => {}) {} ({} {} => {}) {}",
                motive_var,
                print_prec(motive, 0),
                print_prec(base, 2),
                step_vars.0,
                step_vars.1,
                print_prec(step, 0),
                print_prec(target, 2)
            ),
        ),
        ExprKind::J {
            motive_vars,
            motive,
            refl_case,
            target,
        } => paren(
            prec > 1,
            format!(
                "j ({} {} => {}) {} {}",
                motive_vars.0,
                motive_vars.1,
                print_prec(motive, 0),
                print_prec(refl_case, 2),
                print_prec(target, 2)
            ),
        ),
        ExprKind::Unfold(names, body) => {
            let ns: Vec<&str> = names.iter().map(|(s, _)| s.as_str()).collect();
            paren(
                prec > 0,
                format!("unfold {} in {}", ns.join(" "), print_prec(body, 0)),
            )
        }
    }
}
