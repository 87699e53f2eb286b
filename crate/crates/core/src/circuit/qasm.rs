//! A small OpenQASM 3 subset: one register, the gates of [`Gate`], and an
//! optional terminal full-register measurement.
//!
//! ```text
//! OPENQASM 3.0;
//! qubit[2] q;
//! bit[2] c;
//! h q[0];
//! cx q[0], q[1];
//! c = measure q;
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown gate '{name}'")]
    UnknownGate {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}, column {column}: qubit index {index} out of range for register of size {size}")]
    QubitIndex {
        line: usize,
        column: usize,
        index: usize,
        size: usize,
    },
}

/// `%.17g`: shortest-form printing with 17 significant digits, which is
/// enough to round-trip any `f64`.
fn format_angle(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let exp_sign = if exp < 0 { '-' } else { '+' };
        let dot = if frac.is_empty() { "" } else { "." };
        return format!(
            "{sign}{}{dot}{frac}e{exp_sign}{:02}",
            &digits[..1],
            exp.abs()
        );
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        let frac = digits[split..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{}", &digits[..split])
        } else {
            format!("{sign}{}.{frac}", &digits[..split])
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{}", digits.trim_end_matches('0'))
    }
}

fn write_body(circuit: &Circuit, out: &mut String) {
    let n = circuit.num_qubits();
    out.push_str("OPENQASM 3.0;\n");
    let _ = writeln!(out, "qubit[{n}] q;");
    let _ = writeln!(out, "bit[{n}] c;");
    for gate in circuit.gates() {
        let _ = match *gate {
            Gate::Rz { qubit, angle } => writeln!(out, "rz({}) q[{qubit}];", format_angle(angle)),
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}], q[{target}];"),
            Gate::Cz(a, b) => writeln!(out, "cz q[{a}], q[{b}];"),
            Gate::Id(q) | Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::Sx(q) => {
                writeln!(out, "{} q[{q}];", gate.kind().name())
            }
        };
    }
}

/// Header, declarations and one line per gate. No measurement.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    write_body(circuit, &mut out);
    out
}

/// Like [`emit_qasm`] with the terminal `c = measure q;` appended.
pub fn emit_qasm_measured(circuit: &Circuit) -> String {
    let mut out = emit_qasm(circuit);
    out.push_str("c = measure q;\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
}

struct Line {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Line {
    fn new(line: usize, src: &str) -> Self {
        Self {
            line,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> QasmError {
        QasmError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    /// Next token and the column it starts at.
    fn next(&mut self) -> Result<(Tok, usize), QasmError> {
        self.skip_ws();
        let start = self.pos;
        let col = self.column();
        let Some(&c) = self.chars.get(self.pos) else {
            return Err(self.err("unexpected end of line"));
        };
        if c.is_ascii_alphabetic() || c == '_' {
            while self
                .chars
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
            {
                self.pos += 1;
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            return Ok((Tok::Ident(s), col));
        }
        if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
            self.pos += 1;
            while let Some(&d) = self.chars.get(self.pos) {
                let prev = self.chars[self.pos - 1];
                let exp_sign = (d == '-' || d == '+') && (prev == 'e' || prev == 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            return Ok((Tok::Number(s), col));
        }
        if "[]();,=".contains(c) {
            self.pos += 1;
            return Ok((Tok::Punct(c), col));
        }
        Err(self.err(format!("unexpected character '{c}'")))
    }

    fn expect_punct(&mut self, p: char) -> Result<(), QasmError> {
        let save = self.pos;
        match self.next()? {
            (Tok::Punct(q), _) if q == p => Ok(()),
            _ => {
                self.pos = save;
                self.skip_ws();
                Err(self.err(format!("expected '{p}'")))
            }
        }
    }

    fn expect_ident(&mut self, word: &str) -> Result<(), QasmError> {
        let save = self.pos;
        match self.next()? {
            (Tok::Ident(s), _) if s == word => Ok(()),
            _ => {
                self.pos = save;
                self.skip_ws();
                Err(self.err(format!("expected '{word}'")))
            }
        }
    }

    fn expect_uint(&mut self) -> Result<usize, QasmError> {
        self.skip_ws();
        let col = self.column();
        match self.next()? {
            (Tok::Number(s), _) if s.chars().all(|c| c.is_ascii_digit()) => {
                s.parse().map_err(|_| QasmError::Syntax {
                    line: self.line,
                    column: col,
                    message: format!("integer '{s}' too large"),
                })
            }
            _ => Err(QasmError::Syntax {
                line: self.line,
                column: col,
                message: "expected a non-negative integer".into(),
            }),
        }
    }

    /// `;` followed by nothing but whitespace.
    fn finish(&mut self) -> Result<(), QasmError> {
        self.expect_punct(';')?;
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("one statement per line"))
        }
    }

    /// `name[size];` register declaration, after the type keyword.
    fn register_decl(&mut self, keyword: &str, name: &str) -> Result<usize, QasmError> {
        self.expect_ident(keyword)?;
        self.expect_punct('[')?;
        let size = self.expect_uint()?;
        self.expect_punct(']')?;
        self.expect_ident(name)?;
        self.finish()?;
        Ok(size)
    }

    fn qubit_operand(&mut self, size: usize) -> Result<usize, QasmError> {
        self.skip_ws();
        let col = self.column();
        self.expect_ident("q")?;
        self.expect_punct('[')?;
        let index = self.expect_uint()?;
        self.expect_punct(']')?;
        if index >= size {
            return Err(QasmError::QubitIndex {
                line: self.line,
                column: col,
                index,
                size,
            });
        }
        Ok(index)
    }
}

enum Statement {
    Gate(Gate),
    Measure,
}

fn parse_statement(cur: &mut Line, size: usize) -> Result<Statement, QasmError> {
    let (tok, col) = cur.next()?;
    let Tok::Ident(name) = tok else {
        return Err(QasmError::Syntax {
            line: cur.line,
            column: col,
            message: "expected a gate name".into(),
        });
    };
    if name == "c" {
        cur.expect_punct('=')?;
        cur.expect_ident("measure")?;
        cur.expect_ident("q")?;
        cur.finish()?;
        return Ok(Statement::Measure);
    }

    let angle = if name == "rz" {
        cur.expect_punct('(')?;
        cur.skip_ws();
        let acol = cur.column();
        let line = cur.line;
        let bad = |message: String| QasmError::Syntax {
            line,
            column: acol,
            message,
        };
        let value = match cur.next()? {
            (Tok::Number(s), _) => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("invalid angle '{s}'")))?,
            _ => return Err(bad("expected an angle".into())),
        };
        cur.expect_punct(')')?;
        Some(value)
    } else {
        None
    };

    let arity = match name.as_str() {
        "id" | "x" | "z" | "h" | "sx" | "rz" => 1,
        "cx" | "cz" => 2,
        _ => {
            return Err(QasmError::UnknownGate {
                line: cur.line,
                column: col,
                name,
            })
        }
    };

    let first = cur.qubit_operand(size)?;
    let gate = if arity == 1 {
        match name.as_str() {
            "id" => Gate::Id(first),
            "x" => Gate::X(first),
            "z" => Gate::Z(first),
            "h" => Gate::H(first),
            "sx" => Gate::Sx(first),
            _ => Gate::Rz {
                qubit: first,
                angle: angle.expect("rz angle parsed above"),
            },
        }
    } else {
        cur.expect_punct(',')?;
        cur.skip_ws();
        let col2 = cur.column();
        let second = cur.qubit_operand(size)?;
        if second == first {
            return Err(QasmError::Syntax {
                line: cur.line,
                column: col2,
                message: format!("'{name}' operands must differ"),
            });
        }
        if name == "cx" {
            Gate::Cnot {
                control: first,
                target: second,
            }
        } else {
            Gate::Cz(first, second)
        }
    };
    cur.finish()?;
    Ok(Statement::Gate(gate))
}

/// Parses the subset emitted by [`emit_qasm`] / [`emit_qasm_measured`].
/// Blank lines are ignored; nothing but blank lines may follow the measurement.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let eof = |what: &str| QasmError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("unexpected end of input, expected {what}"),
    };

    let (no, src) = lines.next().ok_or_else(|| eof("'OPENQASM 3.0;'"))?;
    let mut cur = Line::new(no, src);
    cur.expect_ident("OPENQASM")?;
    cur.skip_ws();
    let vcol = cur.column();
    match cur.next()? {
        (Tok::Number(v), _) if v == "3.0" || v == "3" => {}
        _ => {
            return Err(QasmError::Syntax {
                line: no,
                column: vcol,
                message: "expected version 3.0".into(),
            })
        }
    }
    cur.finish()?;

    let (no, src) = lines.next().ok_or_else(|| eof("'qubit[N] q;'"))?;
    let mut cur = Line::new(no, src);
    let size = cur.register_decl("qubit", "q")?;
    if size == 0 {
        return Err(QasmError::Syntax {
            line: no,
            column: 1,
            message: "register size must be positive".into(),
        });
    }

    let (no, src) = lines.next().ok_or_else(|| eof("'bit[N] c;'"))?;
    let mut cur = Line::new(no, src);
    let bits = cur.register_decl("bit", "c")?;
    if bits != size {
        return Err(QasmError::Syntax {
            line: no,
            column: 1,
            message: format!("bit register size {bits} differs from qubit register size {size}"),
        });
    }

    let mut circuit = Circuit::new(size);
    let mut measured = false;
    for (no, src) in lines {
        let mut cur = Line::new(no, src);
        if measured {
            return Err(cur.err("statement after terminal measurement"));
        }
        match parse_statement(&mut cur, size)? {
            Statement::Gate(g) => circuit.gates.push(g),
            Statement::Measure => measured = true,
        }
    }
    Ok(circuit)
}
