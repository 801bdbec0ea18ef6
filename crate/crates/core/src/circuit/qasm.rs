//! Reader and writer for the OpenQASM 2 subset the scheduler understands.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

struct Statement {
    text: String,
    line: usize,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits source text into `;`-terminated statements, dropping `//` comments.
fn statements(src: &str) -> Result<Vec<Statement>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start: Option<(usize, usize)> = None;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for (col, ch) in line.chars().enumerate() {
            if ch == ';' {
                let (l, c) = start.unwrap_or((lineno + 1, col + 1));
                out.push(Statement {
                    text: cur.trim().to_string(),
                    line: l,
                    column: c,
                });
                cur.clear();
                start = None;
            } else {
                if start.is_none() && !ch.is_whitespace() {
                    start = Some((lineno + 1, col + 1));
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if let Some((l, c)) = start {
        return Err(parse_err(l, c, "statement is missing its terminating ';'"));
    }
    Ok(out)
}

/// Angle expressions: numbers, `pi`, `+ - * /`, unary minus and parentheses.
struct Expr<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
}

impl<'a> Expr<'a> {
    fn eval(src: &'a str) -> std::result::Result<f64, String> {
        let mut p = Expr {
            chars: src.char_indices().peekable(),
            src,
        };
        let v = p.sum()?;
        p.skip_ws();
        match p.chars.peek() {
            None => Ok(v),
            Some(&(i, c)) => Err(format!("unexpected '{c}' at offset {i} in angle '{src}'")),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some(&(_, '+')) => {
                    self.chars.next();
                    v += self.product()?;
                }
                Some(&(_, '-')) => {
                    self.chars.next();
                    v -= self.product()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some(&(_, '*')) => {
                    self.chars.next();
                    v *= self.unary()?;
                }
                Some(&(_, '/')) => {
                    self.chars.next();
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        self.skip_ws();
        match self.chars.peek() {
            Some(&(_, '-')) => {
                self.chars.next();
                Ok(-self.unary()?)
            }
            Some(&(_, '+')) => {
                self.chars.next();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        self.skip_ws();
        let Some(&(start, c)) = self.chars.peek() else {
            return Err(format!("angle '{}' ends early", self.src));
        };
        if c == '(' {
            self.chars.next();
            let v = self.sum()?;
            self.skip_ws();
            return match self.chars.next() {
                Some((_, ')')) => Ok(v),
                _ => Err(format!("unbalanced parentheses in angle '{}'", self.src)),
            };
        }
        let mut end = start;
        while let Some(&(i, ch)) = self.chars.peek() {
            let exponent_sign = (ch == '-' || ch == '+')
                && self.src[start..i].ends_with(['e', 'E'])
                && self.src[start..i].starts_with(|c: char| c.is_ascii_digit() || c == '.');
            if ch.is_ascii_alphanumeric() || ch == '.' || ch == '_' || exponent_sign {
                end = i + ch.len_utf8();
                self.chars.next();
            } else {
                break;
            }
        }
        let token = &self.src[start..end];
        match token {
            "" => Err(format!("unexpected '{c}' in angle '{}'", self.src)),
            "pi" => Ok(std::f64::consts::PI),
            _ => token
                .parse::<f64>()
                .map_err(|_| format!("cannot read '{token}' in angle '{}'", self.src)),
        }
    }
}

fn parse_operand(text: &str, regs: &HashMap<String, (usize, usize)>, line: usize, column: usize) -> Result<usize> {
    let text = text.trim();
    let (name, rest) = text
        .split_once('[')
        .ok_or_else(|| parse_err(line, column, format!("expected 'reg[index]', got '{text}'")))?;
    let index = rest
        .strip_suffix(']')
        .and_then(|s| s.trim().parse::<usize>().ok())
        .ok_or_else(|| parse_err(line, column, format!("bad qubit index in '{text}'")))?;
    let &(offset, size) = regs
        .get(name.trim())
        .ok_or_else(|| parse_err(line, column, format!("unknown register '{}'", name.trim())))?;
    if index >= size {
        return Err(parse_err(
            line,
            column,
            format!("index {index} out of range for '{}'", name.trim()),
        ));
    }
    Ok(offset + index)
}

/// Gate kind, operands, angle, and source position, before the register size is known.
type PendingGate = (GateKind, Vec<usize>, Option<f64>, usize, usize);

/// Parses the supported OpenQASM 2 subset (`qreg` plus `rx ry rz rzz h cx cp swap`).
pub fn parse_circuit<T: Scalar>(src: &str) -> Result<Circuit<T>> {
    let mut regs: HashMap<String, (usize, usize)> = HashMap::new();
    let mut qubits = 0usize;
    let mut pending: Vec<PendingGate> = Vec::new();

    for st in statements(src)? {
        let (line, column) = (st.line, st.column);
        let text = st.text.as_str();
        if text.is_empty() {
            continue;
        }
        let head: String = text
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        match head.as_str() {
            "OPENQASM" => continue,
            "include" => continue,
            "qreg" => {
                let decl = text["qreg".len()..].trim();
                let (name, rest) = decl
                    .split_once('[')
                    .ok_or_else(|| parse_err(line, column, "expected 'qreg name[size]'"))?;
                let size = rest
                    .strip_suffix(']')
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .ok_or_else(|| parse_err(line, column, "bad register size"))?;
                if !pending.is_empty() {
                    return Err(parse_err(line, column, "qreg must precede gates"));
                }
                if regs.insert(name.trim().to_string(), (qubits, size)).is_some() {
                    return Err(parse_err(
                        line,
                        column,
                        format!("register '{}' declared twice", name.trim()),
                    ));
                }
                qubits += size;
            }
            "" => return Err(parse_err(line, column, format!("unexpected '{text}'"))),
            name => {
                let Some(kind) = GateKind::from_name(name) else {
                    return Err(Error::Unsupported(format!(
                        "statement '{name}' at {line}:{column} is not part of the supported subset"
                    )));
                };
                let mut rest = text[name.len()..].trim_start();
                let mut angle = None;
                if let Some(after) = rest.strip_prefix('(') {
                    let close = after
                        .rfind(')')
                        .ok_or_else(|| parse_err(line, column, "unclosed parameter list"))?;
                    let v = Expr::eval(&after[..close]).map_err(|m| parse_err(line, column, m))?;
                    angle = Some(v);
                    rest = after[close + 1..].trim_start();
                }
                let operands = rest
                    .split(',')
                    .map(|op| parse_operand(op, &regs, line, column))
                    .collect::<Result<Vec<_>>>()?;
                pending.push((kind, operands, angle, line, column));
            }
        }
    }

    let mut circuit = Circuit::new(qubits);
    for (kind, operands, angle, line, column) in pending {
        circuit
            .push(kind, &operands, angle.map(T::from_f64_lossy))
            .map_err(|e| parse_err(line, column, e.to_string()))?;
    }
    Ok(circuit)
}

pub(super) fn emit<T: Scalar>(circuit: &Circuit<T>) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.qubit_count());
    for g in circuit.gates() {
        out.push_str(g.kind.name());
        if let Some(a) = g.angle {
            // shortest round-tripping decimal
            let _ = write!(out, "({:?})", a.to_f64().unwrap_or(f64::NAN));
        }
        let ops: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
        let _ = writeln!(out, " {};", ops.join(","));
    }
    out
}
