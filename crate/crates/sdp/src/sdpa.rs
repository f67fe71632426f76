//! SDPA sparse format (`.dat-s`) reader and writer.
//!
//! Layout written by [`export_sdpa`]:
//!
//! ```text
//! m                      number of variables / dual constraints
//! nBlocks
//! s_1 s_2 ...            block sizes, diagonal blocks negative
//! c_1 c_2 ... c_m
//! matno blkno i j value  one line per upper-triangle nonzero, 1-based
//! ```
//!
//! Matrix number 0 is `F_0`. Values use 17 significant digits and lines end
//! with `\n`, so the output is byte-stable for a given problem.

use std::fmt::Write as _;

use crate::error::SdpError;
use crate::numfmt::format_g17;
use crate::problem::{BlockKind, SdpProblem, SymSparse};

pub fn export_sdpa(problem: &SdpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", problem.num_variables());
    let _ = writeln!(out, "{}", problem.blocks.len());
    let codes: Vec<String> = problem.blocks.iter().map(|b| b.sdpa_code().to_string()).collect();
    let _ = writeln!(out, "{}", codes.join(" "));
    let costs: Vec<String> = problem.objective.iter().map(|&c| format_g17(c)).collect();
    let _ = writeln!(out, "{}", costs.join(" "));

    let matrices = std::iter::once(&problem.constant).chain(problem.coefficients.iter());
    for (matno, mat) in matrices.enumerate() {
        for e in mat.normalized().entries() {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                matno,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                format_g17(e.value)
            );
        }
    }
    out
}

fn is_comment(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with('"') || t.starts_with('*')
}

/// SDPA allows `{ } ( ) ,` as decoration on the header lines.
fn header_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || "{}(),".contains(c))
        .filter(|t| !t.is_empty())
}

fn parse_err(line: usize, message: impl Into<String>) -> SdpError {
    SdpError::Parse {
        line,
        message: message.into(),
    }
}

pub fn import_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .skip_while(|(_, l)| is_comment(l) || l.trim().is_empty());

    let mut next_header = |what: &str| {
        lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| parse_err(text.lines().count(), format!("missing {what}")))
    };

    let (ln, line) = next_header("variable count")?;
    let m: usize = header_tokens(line)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected variable count"))?;

    let (ln, line) = next_header("block count")?;
    let nblocks: usize = header_tokens(line)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected block count"))?;

    let (ln, line) = next_header("block structure")?;
    let blocks = header_tokens(line)
        .take(nblocks)
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0)
                .and_then(|v| BlockKind::from_sdpa_code(v as i64))
                .ok_or_else(|| parse_err(ln, format!("bad block size '{t}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if blocks.len() != nblocks {
        return Err(parse_err(ln, format!("expected {nblocks} block sizes, found {}", blocks.len())));
    }

    let mut objective = Vec::with_capacity(m);
    let mut last_line = ln;
    while objective.len() < m {
        let (ln, line) = next_header("cost vector")?;
        last_line = ln;
        for t in header_tokens(line) {
            let v: f64 = t.parse().map_err(|_| parse_err(ln, format!("bad cost '{t}'")))?;
            objective.push(v);
        }
    }
    if objective.len() != m {
        return Err(parse_err(last_line, format!("expected {m} costs, found {}", objective.len())));
    }

    let mut problem = SdpProblem::new(blocks);
    problem.objective = objective;
    problem.coefficients = vec![SymSparse::new(); m];

    for (ln, line) in lines {
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(parse_err(ln, format!("expected 'matno blkno i j value', got '{}'", line.trim())));
        }
        let int = |t: &str, what: &str| -> Result<usize, SdpError> {
            t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad {what} '{t}'")))
        };
        let matno = int(toks[0], "matrix number")?;
        let blkno = int(toks[1], "block number")?;
        let i = int(toks[2], "row index")?;
        let j = int(toks[3], "column index")?;
        let value: f64 = toks[4]
            .parse()
            .map_err(|_| parse_err(ln, format!("bad value '{}'", toks[4])))?;

        if matno > m {
            return Err(parse_err(ln, format!("matrix number {matno} exceeds {m}")));
        }
        let kind = blocks_get(&problem.blocks, blkno).ok_or_else(|| {
            parse_err(ln, format!("block {blkno} out of range 1..={}", problem.blocks.len()))
        })?;
        let dim = kind.dim();
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(parse_err(
                ln,
                format!("index ({i}, {j}) outside block {blkno} of size {dim}"),
            ));
        }
        if matches!(kind, BlockKind::Diagonal(_)) && i != j {
            return Err(parse_err(ln, format!("off-diagonal entry in diagonal block {blkno}")));
        }
        let target = if matno == 0 {
            &mut problem.constant
        } else {
            &mut problem.coefficients[matno - 1]
        };
        target.add(blkno - 1, i - 1, j - 1, value);
    }
    Ok(problem)
}

fn blocks_get(blocks: &[BlockKind], blkno: usize) -> Option<BlockKind> {
    blkno.checked_sub(1).and_then(|b| blocks.get(b)).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> SdpProblem {
        // min x  s.t.  x E11 + I ⪰ 0, i.e. the dual of min tr(Y) s.t. Y11 = 1.
        let mut p = SdpProblem::new(vec![BlockKind::Psd(2)]);
        let mut f0 = SymSparse::new();
        f0.add(0, 0, 0, -1.0);
        f0.add(0, 1, 1, -1.0);
        p.constant = f0;
        let mut f1 = SymSparse::new();
        f1.add(0, 0, 0, 1.0);
        p.add_variable(1.0, f1);
        p
    }

    #[test]
    fn toy_golden_file() {
        let text = export_sdpa(&toy());
        assert_eq!(text, "1\n1\n2\n1\n0 1 1 1 -1\n0 1 2 2 -1\n1 1 1 1 1\n");
    }

    #[test]
    fn comment_headers_are_skipped() {
        let plain = export_sdpa(&toy());
        let commented = format!("\"toy problem\n* generated by hand\n{plain}");
        let a = import_sdpa(&plain).unwrap();
        let b = import_sdpa(&commented).unwrap();
        assert!(a.structurally_eq(&b));
    }

    #[test]
    fn decorated_headers_parse() {
        let text = "2 =mdim\n2 =nblocks\n{2, -1}\n{1.0, 2.0}\n1 1 1 2 0.5\n2 2 1 1 1\n";
        let p = import_sdpa(text).unwrap();
        assert_eq!(p.blocks, vec![BlockKind::Psd(2), BlockKind::Diagonal(1)]);
        assert_eq!(p.objective, vec![1.0, 2.0]);
    }

    #[test]
    fn out_of_range_entry_names_line() {
        let text = "1\n1\n2\n1\n1 1 3 2 0.5\n";
        match import_sdpa(text) {
            Err(SdpError::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("outside block"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn garbage_value_is_rejected() {
        let text = "1\n1\n2\n1\n1 1 1 1 abc\n";
        assert!(matches!(import_sdpa(text), Err(SdpError::Parse { line: 5, .. })));
    }
}
