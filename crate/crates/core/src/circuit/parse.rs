//! Parser for the line-oriented circuit text format.
//!
//! ```text
//! platform (qubit|cv)
//! wires <N>
//! params <m>
//! gate <KIND> <wire>[ <wire>...] <arg>[ <arg>...]
//! observe <term> [+ <term>...]
//! ```
//! `#` starts a comment. `params` is optional and defaults to one past the
//! largest referenced index.

use crate::circuit::{
    general_squeeze, CircuitIR, CvTerm, Gate, GateKind, ObservableSpec, ParamBinding, Pauli, PauliTerm, Platform,
};
use crate::cv::poly::Quadrature;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cx, lit, Real};

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    col: line[..s].chars().count() + 1,
                    text: &line[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            col: line[..s].chars().count() + 1,
            text: &line[s..],
        });
    }
    out
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: col,
            message: message.into(),
        }
    }

    fn float(&self, tok: Token<'_>) -> Result<f64> {
        self.float_str(tok.text, tok.col)
    }

    fn float_str(&self, s: &str, col: usize) -> Result<f64> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(col, format!("expected a number, found `{s}`"))),
        }
    }

    fn usize(&self, tok: Token<'_>) -> Result<usize> {
        tok.text
            .parse::<usize>()
            .map_err(|_| self.err(tok.col, format!("expected a non-negative integer, found `{}`", tok.text)))
    }
}

fn parse_arg<T: Real>(ctx: &Ctx, tok: Token<'_>) -> Result<ParamBinding<T>> {
    let s = tok.text;
    let Some(th) = s.find("th[") else {
        return Ok(ParamBinding::Literal(lit(ctx.float(tok)?)));
    };
    let prefix = &s[..th];
    let coefficient = match prefix {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => {
            let Some(num) = p.strip_suffix('*') else {
                return Err(ctx.err(tok.col, format!("expected `<float>*th[k]`, found `{s}`")));
            };
            ctx.float_str(num, tok.col)?
        }
    };
    let rest = &s[th + 3..];
    let Some(close) = rest.find(']') else {
        return Err(ctx.err(tok.col + th, "unterminated `th[`"));
    };
    let index = rest[..close]
        .parse::<usize>()
        .map_err(|_| ctx.err(tok.col + th + 3, format!("bad parameter index `{}`", &rest[..close])))?;
    let tail = &rest[close + 1..];
    let offset = match tail {
        "" => 0.0,
        t if t.starts_with('+') || t.starts_with('-') => ctx.float_str(t, tok.col + th + 4 + close)?,
        t => return Err(ctx.err(tok.col + th + 4 + close, format!("unexpected `{t}` after parameter"))),
    };
    if coefficient == 0.0 {
        return Err(ctx.err(tok.col, "parameter coefficient must be nonzero"));
    }
    Ok(ParamBinding::Affine {
        coefficient: lit(coefficient),
        index,
        offset: lit(offset),
    })
}

enum ParsedKind<T> {
    Single(GateKind<T>),
    GeneralSqueeze,
}

fn gate_kind<T: Real>(ctx: &Ctx, platform: Platform, tok: Token<'_>) -> Result<ParsedKind<T>> {
    let upper = tok.text.to_ascii_uppercase();
    let unknown = || Error::UnknownGate {
        line: ctx.line,
        name: tok.text.to_string(),
    };
    let kind = match platform {
        Platform::Qubit => {
            if let Some(word) = upper.strip_prefix("PAULIROT(").and_then(|w| w.strip_suffix(')')) {
                let paulis: Option<Vec<Pauli>> = word.chars().map(Pauli::from_char).collect();
                match paulis {
                    Some(p) if !p.is_empty() => GateKind::PauliRot(p),
                    _ => return Err(ctx.err(tok.col, format!("bad Pauli word in `{}`", tok.text))),
                }
            } else {
                match upper.as_str() {
                    "RX" => GateKind::Rx,
                    "RY" => GateKind::Ry,
                    "RZ" => GateKind::Rz,
                    "EXPW" => GateKind::ExpW,
                    "EXPZ" => GateKind::ExpZ,
                    "EXP11" => GateKind::Exp11,
                    "CROSSRES" => GateKind::CrossRes,
                    "H" => GateKind::Hadamard,
                    "CNOT" | "CX" => GateKind::Cnot,
                    "CZ" => GateKind::Cz,
                    "SWAP" => GateKind::Swap,
                    "X" => GateKind::PauliX,
                    "Y" => GateKind::PauliY,
                    "Z" => GateKind::PauliZ,
                    "S" => GateKind::SGate,
                    "T" => GateKind::TGate,
                    _ => return Err(unknown()),
                }
            }
        }
        Platform::Cv => match upper.as_str() {
            "R" => GateKind::Rotation,
            "D" => GateKind::Displacement,
            "S" => GateKind::Squeeze,
            "S2" => return Ok(ParsedKind::GeneralSqueeze),
            "BS" => GateKind::BeamSplitter,
            "CUBICPHASE" | "V" => GateKind::CubicPhase,
            _ => return Err(unknown()),
        },
    };
    Ok(ParsedKind::Single(kind))
}

fn parse_gate<T: Real>(ctx: &Ctx, platform: Platform, toks: &[Token<'_>], out: &mut Vec<Gate<T>>) -> Result<()> {
    let Some(&kind_tok) = toks.first() else {
        return Err(ctx.err(1, "missing gate kind"));
    };
    let kind = gate_kind::<T>(ctx, platform, kind_tok)?;
    let (wires, arity) = match &kind {
        ParsedKind::Single(k) => (k.wire_count(), k.arity()),
        ParsedKind::GeneralSqueeze => (1, 2),
    };
    let rest = &toks[1..];
    if rest.len() != wires + arity {
        let col = rest.get(wires + arity).map_or(kind_tok.col, |t| t.col);
        return Err(ctx.err(
            col,
            format!(
                "`{}` takes {wires} wire(s) and {arity} argument(s), found {} token(s)",
                kind_tok.text,
                rest.len()
            ),
        ));
    }
    let wire_list = rest[..wires].iter().map(|&t| ctx.usize(t)).collect::<Result<Vec<_>>>()?;
    let args = rest[wires..]
        .iter()
        .map(|&t| parse_arg::<T>(ctx, t))
        .collect::<Result<Vec<_>>>()?;
    match kind {
        ParsedKind::Single(kind) => out.push(Gate::new(kind, wire_list, args)),
        ParsedKind::GeneralSqueeze => out.extend(general_squeeze(wire_list[0], args[0], args[1])),
    }
    Ok(())
}

/// Splits observe tokens into signed terms: each term is (sign, tokens).
fn split_terms<'a>(ctx: &Ctx, toks: &[Token<'a>]) -> Result<Vec<(f64, Vec<Token<'a>>)>> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut current: Vec<Token<'a>> = Vec::new();
    for &t in toks {
        match t.text {
            "+" | "-" => {
                if current.is_empty() {
                    return Err(ctx.err(t.col, "empty observable term"));
                }
                terms.push((sign, std::mem::take(&mut current)));
                sign = if t.text == "-" { -1.0 } else { 1.0 };
            }
            _ => current.push(t),
        }
    }
    if current.is_empty() {
        let col = toks.last().map_or(1, |t| t.col);
        return Err(ctx.err(col, "empty observable term"));
    }
    terms.push((sign, current));
    Ok(terms)
}

/// Leading coefficient of a term; absent means 1.
fn term_coefficient<'a, 'b>(ctx: &Ctx, toks: &'b [Token<'a>]) -> Result<(f64, &'b [Token<'a>])> {
    let first = toks[0];
    let starts_numeric = first
        .text
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '.' || c == '-' || c == '+');
    if starts_numeric {
        Ok((ctx.float(first)?, &toks[1..]))
    } else {
        Ok((1.0, toks))
    }
}

fn parse_pauli_word(ctx: &Ctx, tok: Token<'_>, word: &mut Vec<(usize, Pauli)>) -> Result<()> {
    let chars: Vec<char> = tok.text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let Some(p) = Pauli::from_char(chars[i]) else {
            return Err(ctx.err(tok.col + i, format!("expected X, Y or Z, found `{}`", chars[i])));
        };
        let start = i + 1;
        let mut end = start;
        while end < chars.len() && chars[end].is_ascii_digit() {
            end += 1;
        }
        if end == start {
            return Err(ctx.err(tok.col + start, "missing wire index after Pauli"));
        }
        let wire: usize = chars[start..end].iter().collect::<String>().parse().unwrap();
        if word.iter().any(|&(w, _)| w == wire) {
            return Err(ctx.err(tok.col + i, format!("wire {wire} repeated in Pauli word")));
        }
        word.push((wire, p));
        i = end;
    }
    Ok(())
}

fn parse_quadratures(ctx: &Ctx, tok: Token<'_>, word: &mut Vec<Quadrature>) -> Result<()> {
    let mut offset = 0;
    for factor in tok.text.split('*') {
        let col = tok.col + offset;
        offset += factor.len() + 1;
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => {
                let pow = p
                    .parse::<u32>()
                    .map_err(|_| ctx.err(col, format!("bad exponent in `{factor}`")))?;
                (b, pow)
            }
            None => (factor, 1),
        };
        let mut chars = base.chars();
        let q = chars.next();
        let mode = chars
            .as_str()
            .parse::<usize>()
            .map_err(|_| ctx.err(col, format!("expected x<i> or p<i>, found `{factor}`")))?;
        let quad = match q {
            Some('x') => Quadrature::X(mode),
            Some('p') => Quadrature::P(mode),
            _ => return Err(ctx.err(col, format!("expected x<i> or p<i>, found `{factor}`"))),
        };
        word.extend(std::iter::repeat_n(quad, power as usize));
    }
    Ok(())
}

fn parse_matrix_observable<T: Real>(ctx: &Ctx, toks: &[Token<'_>]) -> Result<ObservableSpec<T>> {
    let open = toks
        .iter()
        .position(|t| t.text == "[")
        .ok_or_else(|| ctx.err(toks.last().map_or(1, |t| t.col), "expected `[` before matrix entries"))?;
    let wires = toks[..open].iter().map(|&t| ctx.usize(t)).collect::<Result<Vec<_>>>()?;
    let close_tok = toks.last().copied().unwrap();
    if close_tok.text != "]" || toks.len() < open + 2 {
        return Err(ctx.err(close_tok.col, "expected `]` after matrix entries"));
    }
    let mut rows: Vec<Vec<crate::scalar::Cx<T>>> = vec![Vec::new()];
    for &t in &toks[open + 1..toks.len() - 1] {
        if t.text == ";" {
            rows.push(Vec::new());
            continue;
        }
        let entry = match t.text.split_once(',') {
            Some((re, im)) => cx(lit(ctx.float_str(re, t.col)?), lit(ctx.float_str(im, t.col)?)),
            None => cx(lit(ctx.float(t)?), T::zero()),
        };
        rows.last_mut().unwrap().push(entry);
    }
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(ctx.err(toks[open].col, "matrix observable must be square"));
    }
    let matrix = CMatrix::from_rows(dim, dim, rows.into_iter().flatten().collect());
    Ok(ObservableSpec::Matrix { wires, matrix })
}

fn parse_observable<T: Real>(ctx: &Ctx, platform: Platform, toks: &[Token<'_>]) -> Result<ObservableSpec<T>> {
    if toks.is_empty() {
        return Err(ctx.err(1, "empty observable"));
    }
    if platform == Platform::Qubit && toks[0].text.eq_ignore_ascii_case("hermitian") {
        return parse_matrix_observable(ctx, &toks[1..]);
    }
    let mut pauli = Vec::new();
    let mut cv = Vec::new();
    for (sign, term) in split_terms(ctx, toks)? {
        let (coef, rest) = term_coefficient(ctx, &term)?;
        let coefficient: T = lit(sign * coef);
        match platform {
            Platform::Qubit => {
                let mut word = Vec::new();
                for &t in rest {
                    parse_pauli_word(ctx, t, &mut word)?;
                }
                pauli.push(PauliTerm { coefficient, word });
            }
            Platform::Cv => {
                let mut word = Vec::new();
                for &t in rest {
                    parse_quadratures(ctx, t, &mut word)?;
                }
                cv.push(CvTerm { coefficient, word });
            }
        }
    }
    Ok(match platform {
        Platform::Qubit => ObservableSpec::pauli(pauli),
        Platform::Cv => ObservableSpec::cv(cv),
    })
}

/// Parses and validates a circuit in the text format.
pub fn parse_circuit<T: Real>(text: &str) -> Result<CircuitIR<T>> {
    let mut platform: Option<Platform> = None;
    let mut wires: Option<usize> = None;
    let mut params: Option<usize> = None;
    let mut gates: Vec<Gate<T>> = Vec::new();
    let mut observable: Option<ObservableSpec<T>> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let ctx = Ctx { line: idx + 1 };
        last_line = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line);
        let Some(&head) = toks.first() else { continue };
        let rest = &toks[1..];
        let single = |what: &str| -> Result<Token<'_>> {
            match rest {
                [t] => Ok(*t),
                _ => Err(ctx.err(head.col, format!("`{}` takes exactly one {what}", head.text))),
            }
        };
        match head.text {
            "platform" => {
                if platform.is_some() {
                    return Err(ctx.err(head.col, "duplicate `platform`"));
                }
                let t = single("value")?;
                platform = Some(match t.text {
                    "qubit" => Platform::Qubit,
                    "cv" => Platform::Cv,
                    other => return Err(ctx.err(t.col, format!("unknown platform `{other}`"))),
                });
            }
            "wires" => {
                if wires.is_some() {
                    return Err(ctx.err(head.col, "duplicate `wires`"));
                }
                let n = ctx.usize(single("count")?)?;
                if n == 0 {
                    return Err(ctx.err(rest[0].col, "wire count must be positive"));
                }
                wires = Some(n);
            }
            "params" => {
                if params.is_some() {
                    return Err(ctx.err(head.col, "duplicate `params`"));
                }
                params = Some(ctx.usize(single("count")?)?);
            }
            "gate" => {
                let Some(p) = platform else {
                    return Err(ctx.err(head.col, "`platform` must precede gates"));
                };
                parse_gate(&ctx, p, rest, &mut gates)?;
            }
            "observe" => {
                let Some(p) = platform else {
                    return Err(ctx.err(head.col, "`platform` must precede `observe`"));
                };
                if observable.is_some() {
                    return Err(ctx.err(head.col, "duplicate `observe`"));
                }
                observable = Some(parse_observable(&ctx, p, rest)?);
            }
            other => return Err(ctx.err(head.col, format!("unknown directive `{other}`"))),
        }
    }

    let eof = Ctx { line: last_line.max(1) };
    let platform = platform.ok_or_else(|| eof.err(1, "missing `platform`"))?;
    let wires = wires.ok_or_else(|| eof.err(1, "missing `wires`"))?;
    let observable = observable.ok_or_else(|| eof.err(1, "missing `observe`"))?;
    let used = gates
        .iter()
        .flat_map(|g| g.args.iter().filter_map(ParamBinding::index))
        .max()
        .map_or(0, |m| m + 1);
    let param_count = params.unwrap_or(used);
    CircuitIR::new(platform, wires, param_count, gates, observable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ry_example() {
        let c: CircuitIR<f64> = parse_circuit("platform qubit\nwires 1\ngate RY 0 th[0]\nobserve 1.0 Z0").unwrap();
        assert_eq!(c.platform(), Platform::Qubit);
        assert_eq!(c.wire_count(), 1);
        assert_eq!(c.param_count(), 1);
        assert_eq!(c.gates(), &[Gate::new(GateKind::Ry, vec![0], vec![ParamBinding::param(0)])]);
        assert_eq!(
            c.observable(),
            &ObservableSpec::pauli(vec![PauliTerm {
                coefficient: 1.0,
                word: vec![(0, Pauli::Z)]
            }])
        );
    }

    #[test]
    fn parses_cv_example() {
        let c: CircuitIR<f64> = parse_circuit("platform cv\nwires 1\ngate S 0 th[0]\nobserve 1.0 x0^2").unwrap();
        assert_eq!(c.platform(), Platform::Cv);
        assert_eq!(c.gates()[0].kind, GateKind::Squeeze);
        let poly = c.observable().cv_polynomial().unwrap();
        assert_eq!(poly.degree(), 2);
        assert_eq!(poly.len(), 1);
    }

    #[test]
    fn parses_affine_argument() {
        let ctx = Ctx { line: 1 };
        let tok = Token {
            col: 1,
            text: "0.5*th[1]+0.1",
        };
        assert_eq!(
            parse_arg::<f64>(&ctx, tok).unwrap(),
            ParamBinding::Affine {
                coefficient: 0.5,
                index: 1,
                offset: 0.1
            }
        );
        let neg = Token { col: 1, text: "-th[2]-3" };
        assert_eq!(
            parse_arg::<f64>(&ctx, neg).unwrap(),
            ParamBinding::Affine {
                coefficient: -1.0,
                index: 2,
                offset: -3.0
            }
        );
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_circuit::<f64>("platform qubit\nwires 1\ngate RY 0 th[x]\nobserve 1 Z0").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 14, .. }), "{err:?}");
        let err = parse_circuit::<f64>("platform qubit\nwires 1\ngate FOO 0\nobserve 1 Z0").unwrap_err();
        assert!(matches!(err, Error::UnknownGate { line: 3, .. }));
    }

    #[test]
    fn rejects_out_of_range_wire_and_non_hermitian() {
        let err = parse_circuit::<f64>("platform qubit\nwires 1\ngate RX 1 0.1\nobserve 1 Z0").unwrap_err();
        assert!(matches!(err, Error::WireOutOfRange { wire: 1, .. }));
        let err = parse_circuit::<f64>("platform cv\nwires 1\nobserve 1 x0 p0").unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
        let err =
            parse_circuit::<f64>("platform qubit\nwires 1\nobserve hermitian 0 [ 0 1 ; 0 0 ]").unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn parses_signed_sums_and_matrices() {
        let c: CircuitIR<f64> =
            parse_circuit("platform qubit\nwires 2 # two\nobserve 0.5 Z0Z1 - 2 X1 + 1").unwrap();
        let ObservableSpec::PauliSum(terms) = c.observable() else {
            panic!()
        };
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[1].coefficient, -2.0);
        assert!(terms[2].word.is_empty());

        let m: CircuitIR<f64> =
            parse_circuit("platform qubit\nwires 1\nobserve hermitian 0 [ 1 0,-1 ; 0,1 -1 ]").unwrap();
        let ObservableSpec::Matrix { matrix, .. } = m.observable() else {
            panic!()
        };
        assert_eq!(matrix[(0, 1)], cx(0.0, -1.0));
    }

    #[test]
    fn general_squeeze_expands_to_three_gates() {
        let c: CircuitIR<f64> = parse_circuit("platform cv\nwires 1\ngate S2 0 th[0] th[1]\nobserve 1 x0").unwrap();
        assert_eq!(c.gates().len(), 3);
        let occ = c.occurrences(1).unwrap();
        assert_eq!(occ.len(), 2);
        assert_eq!((occ[0].gate, occ[0].coefficient), (0, -0.5));
        assert_eq!((occ[1].gate, occ[1].coefficient), (2, 0.5));
    }

    #[test]
    fn explicit_params_count_is_respected() {
        let c: CircuitIR<f64> = parse_circuit("platform qubit\nwires 1\nparams 3\ngate RX 0 th[0]\nobserve 1 Z0").unwrap();
        assert_eq!(c.param_count(), 3);
        assert!(parse_circuit::<f64>("platform qubit\nwires 1\nparams 1\ngate RX 0 th[2]\nobserve 1 Z0").is_err());
    }
}
