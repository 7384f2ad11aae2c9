//! Scalar expression parsing and evaluation.
//!
//! Coefficient functions in scenario files are written as plain text
//! expressions over named variables (`x1..xn` for chart coordinates,
//! `s1..sp` for map parameters). The grammar is small and fixed:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?            # right-associative
//! atom    := number | variable | func '(' sum ')' | '(' sum ')'
//! func    := sin | cos | tan | exp | log | sqrt | abs
//! ```
//!
//! Whitespace is ignored. There is no implicit multiplication: `2x` is a
//! trailing-garbage error, `2*x1` is not. Every parse and evaluation error
//! carries the byte offset of the offending token or node.

use std::fmt;
use std::sync::Arc;

/// Built-in single-argument functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "tan" => Some(Func::Tan),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Binary operators in increasing precedence: `+ -` < `* /` < `^`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree. Variables are referenced by position in the
/// variable list given to [`parse`].
#[derive(Clone, Debug)]
pub enum ExprAst {
    Const(f64),
    Var(usize),
    Neg {
        arg: Box<ExprAst>,
        offset: usize,
    },
    Bin {
        op: BinOp,
        lhs: Box<ExprAst>,
        rhs: Box<ExprAst>,
        offset: usize,
    },
    Call {
        func: Func,
        arg: Box<ExprAst>,
        offset: usize,
    },
}

/// A rejected input: where, what, and what would have been accepted.
#[derive(Clone, Debug)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: {} (expected {})",
            self.offset, self.message, self.expected
        )
    }
}

impl std::error::Error for ParseError {}

/// A runtime failure (pole, log of non-positive, non-finite result) with
/// the byte offset of the node that produced it.
#[derive(Clone, Debug)]
pub struct EvalError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "evaluation error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for EvalError {}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token together with its starting byte offset.
    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Token::End, start));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            self.pos += 1;
            return Ok((tok, start));
        }
        if c.is_ascii_digit() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
            if end < self.src.len() && self.src[end] == b'.' {
                end += 1;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut exp_end = end + 1;
                if exp_end < self.src.len() && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-') {
                    exp_end += 1;
                }
                if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                    end = exp_end;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                }
            }
            let text = std::str::from_utf8(&self.src[start..end]).expect("ascii");
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                message: format!("malformed number '{text}'"),
                expected: "a decimal literal".into(),
            })?;
            self.pos = end;
            return Ok((Token::Num(value), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[start..end]).expect("ascii").to_string();
            self.pos = end;
            return Ok((Token::Ident(text), start));
        }
        Err(ParseError {
            offset: start,
            message: format!("unexpected character '{}'", c as char),
            expected: "a number, identifier, operator or parenthesis".into(),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: (Token, usize),
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, variables: &'a [String]) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let current = lexer.next()?;
        Ok(Parser {
            lexer,
            current,
            variables,
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        self.current = self.lexer.next()?;
        Ok(())
    }

    fn sum(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let (op, offset) = match &self.current {
                (Token::Plus, off) => (BinOp::Add, *off),
                (Token::Minus, off) => (BinOp::Sub, *off),
                _ => break,
            };
            self.advance()?;
            let rhs = self.product()?;
            lhs = ExprAst::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                offset,
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (op, offset) = match &self.current {
                (Token::Star, off) => (BinOp::Mul, *off),
                (Token::Slash, off) => (BinOp::Div, *off),
                _ => break,
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = ExprAst::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                offset,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if let (Token::Minus, off) = &self.current {
            let offset = *off;
            self.advance()?;
            let arg = self.unary()?;
            return Ok(ExprAst::Neg {
                arg: Box::new(arg),
                offset,
            });
        }
        if let (Token::Plus, _) = &self.current {
            self.advance()?;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if let (Token::Caret, off) = &self.current {
            let offset = *off;
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(ExprAst::Bin {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
                offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let (token, offset) = self.current.clone();
        match token {
            Token::Num(v) => {
                self.advance()?;
                Ok(ExprAst::Const(v))
            }
            Token::Ident(name) => {
                self.advance()?;
                if let Some(func) = Func::from_name(&name) {
                    let (tok, off) = self.current.clone();
                    if tok != Token::LParen {
                        return Err(ParseError {
                            offset: off,
                            message: format!("found {} after function '{}'", tok.describe(), name),
                            expected: "'('".into(),
                        });
                    }
                    self.advance()?;
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(ExprAst::Call {
                        func,
                        arg: Box::new(arg),
                        offset,
                    });
                }
                match self.variables.iter().position(|v| v == &name) {
                    Some(index) => Ok(ExprAst::Var(index)),
                    None => Err(ParseError {
                        offset,
                        message: format!("unknown identifier '{name}'"),
                        expected: format!(
                            "one of the variables {} or a function name",
                            self.variables.join(", ")
                        ),
                    }),
                }
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Token::End => Err(ParseError {
                offset,
                message: "unexpected end of input".into(),
                expected: "a number, variable, function call or '('".into(),
            }),
            other => Err(ParseError {
                offset,
                message: format!("unexpected {}", other.describe()),
                expected: "a number, variable, function call or '('".into(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let (tok, off) = self.current.clone();
        if tok == Token::RParen {
            self.advance()
        } else {
            Err(ParseError {
                offset: off,
                message: format!("found {} where a group should close", tok.describe()),
                expected: "')'".into(),
            })
        }
    }
}

/// Parse `text` over the given variable names. Variable names must be
/// distinct and nonempty; the resulting AST references them by position.
pub fn parse(text: &str, variables: &[String]) -> Result<ExprAst, ParseError> {
    if variables.is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "no variables declared".into(),
            expected: "at least one variable name".into(),
        });
    }
    for (i, name) in variables.iter().enumerate() {
        if name.is_empty() || variables[..i].contains(name) {
            return Err(ParseError {
                offset: 0,
                message: format!("variable list invalid at entry {}: '{}'", i + 1, name),
                expected: "distinct nonempty names".into(),
            });
        }
    }
    let mut parser = Parser::new(text, variables)?;
    if parser.current.0 == Token::End {
        return Err(ParseError {
            offset: 0,
            message: "empty input".into(),
            expected: "an expression".into(),
        });
    }
    let ast = parser.sum()?;
    let (tok, off) = parser.current.clone();
    if tok != Token::End {
        return Err(ParseError {
            offset: off,
            message: format!("trailing {}", tok.describe()),
            expected: "end of input".into(),
        });
    }
    Ok(ast)
}

/// Evaluate `ast` at the coordinate vector `coords` in IEEE double
/// precision, operands left to right. Division by zero, log of a
/// non-positive value, sqrt of a negative value and non-finite results
/// fail with the offset of the responsible node.
pub fn evaluate(ast: &ExprAst, coords: &[f64]) -> Result<f64, EvalError> {
    match ast {
        ExprAst::Const(v) => Ok(*v),
        ExprAst::Var(i) => coords.get(*i).copied().ok_or_else(|| EvalError {
            offset: 0,
            message: format!("variable index {} out of range for arity {}", i + 1, coords.len()),
        }),
        ExprAst::Neg { arg, .. } => Ok(-evaluate(arg, coords)?),
        ExprAst::Bin {
            op,
            lhs,
            rhs,
            offset,
        } => {
            let a = evaluate(lhs, coords)?;
            let b = evaluate(rhs, coords)?;
            let value = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(EvalError {
                            offset: *offset,
                            message: "division by zero".into(),
                        });
                    }
                    a / b
                }
                BinOp::Pow => a.powf(b),
            };
            if value.is_finite() {
                Ok(value)
            } else {
                Err(EvalError {
                    offset: *offset,
                    message: format!("non-finite result of '{}'", op.symbol()),
                })
            }
        }
        ExprAst::Call { func, arg, offset } => {
            let v = evaluate(arg, coords)?;
            let value = match func {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(EvalError {
                            offset: *offset,
                            message: format!("log of non-positive value {v}"),
                        });
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(EvalError {
                            offset: *offset,
                            message: format!("sqrt of negative value {v}"),
                        });
                    }
                    v.sqrt()
                }
                Func::Abs => v.abs(),
            };
            if value.is_finite() {
                Ok(value)
            } else {
                Err(EvalError {
                    offset: *offset,
                    message: format!("non-finite result of '{}'", func.name()),
                })
            }
        }
    }
}

/// Render `ast` fully parenthesized. Parsing the output again yields an
/// evaluation-equivalent tree.
pub fn pretty(ast: &ExprAst, variables: &[String]) -> String {
    match ast {
        ExprAst::Const(v) => {
            if *v < 0.0 {
                // keep unary minus out of the literal so the printout re-lexes
                format!("(-{})", -v)
            } else {
                format!("{v}")
            }
        }
        ExprAst::Var(i) => variables[*i].clone(),
        ExprAst::Neg { arg, .. } => format!("(-{})", pretty(arg, variables)),
        ExprAst::Bin { op, lhs, rhs, .. } => format!(
            "({} {} {})",
            pretty(lhs, variables),
            op.symbol(),
            pretty(rhs, variables)
        ),
        ExprAst::Call { func, arg, .. } => format!("{}({})", func.name(), pretty(arg, variables)),
    }
}

/// Highest variable index referenced plus one; zero for constant trees.
pub fn max_arity(ast: &ExprAst) -> usize {
    match ast {
        ExprAst::Const(_) => 0,
        ExprAst::Var(i) => i + 1,
        ExprAst::Neg { arg, .. } => max_arity(arg),
        ExprAst::Bin { lhs, rhs, .. } => max_arity(lhs).max(max_arity(rhs)),
        ExprAst::Call { arg, .. } => max_arity(arg),
    }
}

/// Wrap an AST with its variable names for reuse.
#[derive(Clone, Debug)]
pub struct Expr {
    pub ast: Arc<ExprAst>,
    pub text: String,
    pub variables: Arc<[String]>,
}

impl Expr {
    pub fn parse(text: &str, variables: &[String]) -> Result<Expr, ParseError> {
        let ast = parse(text, variables)?;
        Ok(Expr {
            ast: Arc::new(ast),
            text: text.to_string(),
            variables: variables.into(),
        })
    }

    pub fn eval(&self, coords: &[f64]) -> Result<f64, EvalError> {
        evaluate(&self.ast, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn eval_str(text: &str, names: &[&str], coords: &[f64]) -> f64 {
        let ast = parse(text, &vars(names)).expect("parse");
        evaluate(&ast, coords).expect("eval")
    }

    #[test]
    fn arithmetic_and_calls() {
        assert_eq!(eval_str("x1 + 2*x2", &["x1", "x2"], &[1.0, 3.0]), 7.0);
        let v = eval_str("sin(x1)*x2", &["x1", "x2"], &[std::f64::consts::FRAC_PI_2, 3.0]);
        assert!((v - 3.0).abs() < 1e-15);
        let cot = eval_str("cos(x1)/sin(x1)", &["x1"], &[std::f64::consts::FRAC_PI_3]);
        assert!((cot - 0.5773502691896258).abs() < 1e-15);
        assert_eq!(eval_str("3.5", &["x1"], &[42.0]), 3.5);
        assert_eq!(eval_str("x1^3 - 2", &["x1"], &[2.0]), 6.0);
    }

    #[test]
    fn precedence() {
        assert_eq!(eval_str("2 + 3 * 4", &["x1"], &[0.0]), 14.0);
        assert_eq!(eval_str("2 ^ 3 ^ 2", &["x1"], &[0.0]), 512.0); // right assoc
        assert_eq!(eval_str("-2^2", &["x1"], &[0.0]), -4.0); // ^ binds tighter than unary -
        assert_eq!(eval_str("2^-1", &["x1"], &[0.0]), 0.5);
    }

    #[test]
    fn division_by_zero_carries_offset() {
        let ast = parse("1/x1", &vars(&["x1"])).unwrap();
        let err = evaluate(&ast, &[0.0]).unwrap_err();
        assert_eq!(err.offset, 1);
        assert!(err.message.contains("division by zero"));
    }

    #[test]
    fn parse_errors_have_positions() {
        let e = parse("x1 + ", &vars(&["x1"])).unwrap_err();
        assert_eq!(e.offset, 5);

        let e = parse("x1 + y", &vars(&["x1"])).unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.message.contains("unknown identifier"));

        let e = parse("(x1 + 1", &vars(&["x1"])).unwrap_err();
        assert_eq!(e.offset, 7);

        let e = parse("", &vars(&["x1"])).unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.message.contains("empty input"));

        let e = parse("2x1", &vars(&["x1"])).unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(e.message.contains("trailing"));
    }

    #[test]
    fn pretty_round_trip_is_equivalent() {
        let names = vars(&["x1", "x2"]);
        let src = "sin(x1)*x2 - 2/(x1 + 3) + x2^2^x1";
        let ast = parse(src, &names).unwrap();
        let printed = pretty(&ast, &names);
        let again = parse(&printed, &names).unwrap();
        for &(a, b) in &[(0.3, 1.7), (1.1, -0.4), (2.0, 2.0)] {
            let u = evaluate(&ast, &[a, b]).unwrap();
            let v = evaluate(&again, &[a, b]).unwrap();
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn domain_errors_from_functions() {
        let ast = parse("log(x1)", &vars(&["x1"])).unwrap();
        assert!(evaluate(&ast, &[-1.0]).is_err());
        let ast = parse("sqrt(x1)", &vars(&["x1"])).unwrap();
        assert!(evaluate(&ast, &[-1.0]).is_err());
        let ast = parse("exp(x1)", &vars(&["x1"])).unwrap();
        assert!(evaluate(&ast, &[1.0e6]).is_err()); // overflow -> non-finite
    }
}
