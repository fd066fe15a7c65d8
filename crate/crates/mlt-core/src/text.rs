//! Rule text (`A B -> C D; `) and the compact task file format.

use crate::{GlyphTable, MltError, Phrasebook, PhrasebookSet, Result};
use crate::sequence::{tuple_chars, tuple_index};

/// Rules in ascending input-index order, each followed by `"; "`.
/// `level` is 1-based: inputs use glyph level `level`, outputs `level + 1`.
pub fn serialize_phrasebook(pb: &Phrasebook, level: usize, glyphs: &GlyphTable) -> Result<String> {
    let n = pb.n();
    if glyphs.alphabet_size() != n {
        return Err(MltError::invalid(format!(
            "glyph table has {} symbols per level, phrasebook needs {n}",
            glyphs.alphabet_size()
        )));
    }
    if level == 0 || level + 1 > glyphs.level_count() {
        return Err(MltError::invalid(format!("level {level} outside glyph table")));
    }
    let mut out = String::new();
    for i in 0..n * n {
        let (a, b) = tuple_chars(n, i);
        let (c, d) = pb.map_pair(a, b);
        out.push_str(&format!(
            "{} {} -> {} {}; ",
            glyphs.glyph(level, a),
            glyphs.glyph(level, b),
            glyphs.glyph(level + 1, c),
            glyphs.glyph(level + 1, d)
        ));
    }
    Ok(out)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn parse_err(text: &str, offset: usize, message: impl Into<String>) -> MltError {
    let (line, column) = line_col(text, offset);
    MltError::Parse { line, column, message: message.into() }
}

struct RawRule {
    offset: usize,
    glyphs: [char; 4],
}

fn split_rules(text: &str) -> Result<Vec<RawRule>> {
    let mut rules = Vec::new();
    let mut start = 0;
    for piece in text.split(';') {
        let offset = start + (piece.len() - piece.trim_start().len());
        start += piece.len() + 1;
        let body = piece.trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let ok = tokens.len() == 5 && tokens[2] == "->" && [0, 1, 3, 4].iter().all(|&k| tokens[k].chars().count() == 1);
        if !ok {
            return Err(parse_err(text, offset, format!("malformed rule {body:?}, expected \"a b -> C D\"")));
        }
        let g = |k: usize| tokens[k].chars().next().unwrap();
        rules.push(RawRule { offset, glyphs: [g(0), g(1), g(3), g(4)] });
    }
    Ok(rules)
}

/// Accepts rules in any order. Returns the phrasebook and its 1-based level.
pub fn parse_phrasebook(text: &str, glyphs: &GlyphTable) -> Result<(Phrasebook, usize)> {
    let rules = split_rules(text)?;
    let first = rules.first().ok_or_else(|| parse_err(text, 0, "no rules found"))?;
    let n = glyphs.alphabet_size();
    let level = (1..glyphs.level_count())
        .find(|&l| glyphs.lookup(l, first.glyphs[0]).is_some())
        .ok_or_else(|| parse_err(text, first.offset, format!("unknown glyph {:?}", first.glyphs[0])))?;

    let mut perm: Vec<Option<usize>> = vec![None; n * n];
    let mut used = vec![false; n * n];
    for r in &rules {
        let mut ch = [0usize; 4];
        for (k, g) in r.glyphs.iter().enumerate() {
            let lv = if k < 2 { level } else { level + 1 };
            ch[k] = glyphs
                .lookup(lv, *g)
                .ok_or_else(|| parse_err(text, r.offset, format!("unknown glyph {g:?} for level {lv}")))?;
        }
        let src = tuple_index(n, ch[0], ch[1]);
        let dst = tuple_index(n, ch[2], ch[3]);
        if perm[src].is_some() {
            return Err(parse_err(text, r.offset, "duplicate rule for input tuple"));
        }
        if used[dst] {
            return Err(parse_err(text, r.offset, "output tuple used twice; rules are not bijective"));
        }
        perm[src] = Some(dst);
        used[dst] = true;
    }
    if let Some(missing) = perm.iter().position(Option::is_none) {
        let (a, b) = tuple_chars(n, missing);
        return Err(parse_err(
            text,
            text.len(),
            format!("missing rule for {} {}", glyphs.glyph(level, a), glyphs.glyph(level, b)),
        ));
    }
    let pb = Phrasebook::from_perm(n, perm.into_iter().map(Option::unwrap).collect())?;
    Ok((pb, level))
}

/// `MLT v1 d=<d> n=<n>` then one line of `n*n` integers per level.
pub fn write_task(task: &PhrasebookSet) -> String {
    let mut out = format!("MLT v1 d={} n={}\n", task.depth(), task.n());
    for pb in task.books() {
        let line: Vec<String> = pb.perm().iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn header_field(text: &str, token: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let tok = token.ok_or_else(|| MltError::Parse { line, column: 1, message: format!("missing {key}=") })?;
    let col = text.find(tok).unwrap_or(0) + 1;
    tok.strip_prefix(&format!("{key}="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| MltError::Parse { line, column: col, message: format!("expected {key}=<integer>, got {tok:?}") })
}

pub fn parse_task(text: &str) -> Result<PhrasebookSet> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(MltError::Parse { line: 1, column: 1, message: "empty task file".into() })?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("MLT") || tok.next() != Some("v1") {
        return Err(MltError::Parse { line: hl + 1, column: 1, message: "expected header \"MLT v1 d=<d> n=<n>\"".into() });
    }
    let d = header_field(header, tok.next(), "d", hl + 1)?;
    let n = header_field(header, tok.next(), "n", hl + 1)?;
    let mut books = Vec::with_capacity(d);
    for _ in 0..d {
        let (li, line) = lines.next().ok_or(MltError::Parse {
            line: text.lines().count() + 1,
            column: 1,
            message: format!("expected {d} phrasebook lines"),
        })?;
        let mut perm = Vec::with_capacity(n * n);
        let mut col = 0;
        for word in line.split(' ') {
            if word.is_empty() {
                col += 1;
                continue;
            }
            let v = word.parse::<usize>().map_err(|_| MltError::Parse {
                line: li + 1,
                column: col + 1,
                message: format!("not an integer: {word:?}"),
            })?;
            perm.push(v);
            col += word.len() + 1;
        }
        let pb = Phrasebook::from_perm(n, perm).map_err(|e| MltError::Parse {
            line: li + 1,
            column: 1,
            message: e.to_string(),
        })?;
        books.push(pb);
    }
    if let Some((li, _)) = lines.next() {
        return Err(MltError::Parse { line: li + 1, column: 1, message: "trailing content after phrasebooks".into() });
    }
    PhrasebookSet::new(books)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_text() {
        let g = GlyphTable::default_for(2, 1).unwrap();
        let s = serialize_phrasebook(&Phrasebook::identity(2), 1, &g).unwrap();
        assert_eq!(s, "A A -> C C; A B -> C D; B A -> D C; B B -> D D; ");
    }

    #[test]
    fn order_insensitive() {
        let g = GlyphTable::default_for(2, 1).unwrap();
        let (pb, level) = parse_phrasebook("B B -> D D; A B -> C D; B A -> D C; A A -> C C;", &g).unwrap();
        assert_eq!(pb, Phrasebook::identity(2));
        assert_eq!(level, 1);
    }

    #[test]
    fn parse_errors() {
        let g = GlyphTable::default_for(2, 2).unwrap();
        let dup = "A A -> C C; A A -> C D; B A -> D C; B B -> D D;";
        assert!(matches!(parse_phrasebook(dup, &g), Err(MltError::Parse { .. })));
        let missing = "A A -> C C; A B -> C D; B A -> D C;";
        assert!(parse_phrasebook(missing, &g).is_err());
        let twice = "A A -> C C; A B -> C C; B A -> D C; B B -> D D;";
        assert!(parse_phrasebook(twice, &g).is_err());
        let unknown = "A A -> C Z; A B -> C D; B A -> D C; B B -> D D;";
        assert!(parse_phrasebook(unknown, &g).is_err());
        let junk = "A A C C;";
        assert!(parse_phrasebook(junk, &g).is_err());
    }

    #[test]
    fn second_level_detected() {
        let g = GlyphTable::default_for(2, 2).unwrap();
        let pb = Phrasebook::from_perm(2, vec![3, 2, 1, 0]).unwrap();
        let s = serialize_phrasebook(&pb, 2, &g).unwrap();
        assert!(s.starts_with("C C -> F F"));
        assert_eq!(parse_phrasebook(&s, &g).unwrap(), (pb, 2));
    }

    #[test]
    fn task_file_round_trip() {
        let task = PhrasebookSet::random(3, 4, 5).unwrap();
        let text = write_task(&task);
        assert!(text.starts_with("MLT v1 d=4 n=3\n"));
        assert_eq!(parse_task(&text).unwrap(), task);
    }

    #[test]
    fn task_file_errors_carry_position() {
        let bad = "MLT v1 d=1 n=2\n0 1 x 3\n";
        match parse_task(bad) {
            Err(MltError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_task("MLT v2 d=1 n=2\n0 1 2 3\n").is_err());
        assert!(parse_task("MLT v1 d=2 n=2\n0 1 2 3\n").is_err());
        assert!(parse_task("MLT v1 d=1 n=2\n0 1 2 2\n").is_err());
    }
}
