use std::fmt::Write;

use crate::circuit::{CircuitIR, GateKind, ObservableSpec, ParamBinding};
use crate::cv::poly::Quadrature;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn arg<T: Real>(b: &ParamBinding<T>) -> String {
    match *b {
        ParamBinding::Literal(v) => format!("{v}"),
        ParamBinding::Affine {
            coefficient,
            index,
            offset,
        } => {
            let mut s = if coefficient == T::one() {
                format!("th[{index}]")
            } else if coefficient == -T::one() {
                format!("-th[{index}]")
            } else {
                format!("{coefficient}*th[{index}]")
            };
            if !offset.is_zero() {
                if offset > T::zero() {
                    write!(s, "+{offset}").unwrap();
                } else {
                    write!(s, "{offset}").unwrap();
                }
            }
            s
        }
    }
}

fn cv_word(word: &[Quadrature]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let mut j = i;
        while j < word.len() && word[j] == word[i] {
            j += 1;
        }
        let run = j - i;
        parts.push(if run > 1 {
            format!("{}^{run}", word[i])
        } else {
            word[i].to_string()
        });
        i = j;
    }
    parts.join(" ")
}

pub(super) fn print_circuit<T: Real>(c: &CircuitIR<T>) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "platform {}", c.platform().name()).unwrap();
    writeln!(out, "wires {}", c.wire_count()).unwrap();
    writeln!(out, "params {}", c.param_count()).unwrap();
    for gate in c.gates() {
        if let GateKind::Custom { label, .. } = &gate.kind {
            return Err(Error::InvalidArgument(format!(
                "custom gate `{label}` has no text representation"
            )));
        }
        let mut line = format!("gate {}", gate.kind.name());
        for w in &gate.wires {
            write!(line, " {w}").unwrap();
        }
        for a in &gate.args {
            write!(line, " {}", arg(a)).unwrap();
        }
        writeln!(out, "{line}").unwrap();
    }
    let terms: Vec<String> = match c.observable() {
        ObservableSpec::PauliSum(terms) => terms
            .iter()
            .map(|t| {
                let word: String = t.word.iter().map(|(w, p)| format!("{}{w}", p.as_char())).collect();
                if word.is_empty() {
                    format!("{}", t.coefficient)
                } else {
                    format!("{} {word}", t.coefficient)
                }
            })
            .collect(),
        ObservableSpec::Matrix { wires, matrix } => {
            let mut s = String::from("hermitian");
            for w in wires {
                write!(s, " {w}").unwrap();
            }
            s.push_str(" [");
            for i in 0..matrix.rows() {
                if i > 0 {
                    s.push_str(" ;");
                }
                for j in 0..matrix.cols() {
                    let z = matrix[(i, j)];
                    if z.im.is_zero() {
                        write!(s, " {}", z.re).unwrap();
                    } else {
                        write!(s, " {},{}", z.re, z.im).unwrap();
                    }
                }
            }
            s.push_str(" ]");
            vec![s]
        }
        ObservableSpec::Cv { terms, .. } => terms
            .iter()
            .map(|t| {
                if t.word.is_empty() {
                    format!("{}", t.coefficient)
                } else {
                    format!("{} {}", t.coefficient, cv_word(&t.word))
                }
            })
            .collect(),
    };
    let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    writeln!(out, "observe {body}").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use crate::circuit::parse_circuit;
    use crate::circuit::CircuitIR;

    #[test]
    fn roundtrip_examples() {
        let sources = [
            "platform qubit\nwires 2\ngate RX 0 0.5*th[1]+0.1\ngate CNOT 0 1\ngate PAULIROT(XY) 0 1 -th[0]-0.25\nobserve 1 Z0 + -0.5 X0Y1 + 2",
            "platform qubit\nwires 2\ngate CROSSRES 0 1 th[0] 0.5 0.3\nobserve hermitian 1 [ 1 0,-1 ; 0,1 -1 ]",
            "platform cv\nwires 2\ngate S2 0 th[0] 0.3\ngate BS 0 1 th[1] 0.2\ngate V 1 0.1\nobserve 1 x0^2 + 0.5 x1 p1 + 0.5 p1 x1",
        ];
        for src in sources {
            let first: CircuitIR<f64> = parse_circuit(src).unwrap();
            let printed = first.to_text().unwrap();
            let second: CircuitIR<f64> = parse_circuit(&printed).unwrap();
            assert_eq!(first, second, "{printed}");
        }
    }
}
