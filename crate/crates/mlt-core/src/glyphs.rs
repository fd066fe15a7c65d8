use crate::{MltError, Result};

const DEFAULT_STREAM: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Printable symbols for each alphabet level (level 1 is the input alphabet).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphTable {
    levels: Vec<Vec<char>>,
}

impl GlyphTable {
    pub fn new(levels: Vec<Vec<char>>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(MltError::invalid("a glyph table needs at least two levels"));
        }
        let n = levels[0].len();
        for (i, lv) in levels.iter().enumerate() {
            if lv.len() != n {
                return Err(MltError::invalid(format!("level {} has {} glyphs, expected {n}", i + 1, lv.len())));
            }
            for (a, ga) in lv.iter().enumerate() {
                if ga.is_whitespace() || *ga == ';' {
                    return Err(MltError::invalid(format!("glyph {ga:?} is reserved")));
                }
                if lv[a + 1..].contains(ga) {
                    return Err(MltError::invalid(format!("glyph {ga:?} repeated in level {}", i + 1)));
                }
            }
        }
        Ok(GlyphTable { levels })
    }

    /// Consecutive blocks of `n` from `A-Z a-z 0-9`, one block per level.
    pub fn default_for(n: usize, d: usize) -> Result<Self> {
        let stream: Vec<char> = DEFAULT_STREAM.chars().collect();
        if (d + 1) * n > stream.len() {
            return Err(MltError::invalid(format!(
                "default glyph table holds 62 symbols; (d+1)*n = {}",
                (d + 1) * n
            )));
        }
        Self::new(stream.chunks(n).take(d + 1).map(|c| c.to_vec()).collect())
    }

    pub fn alphabet_size(&self) -> usize {
        self.levels[0].len()
    }

    /// Number of alphabets (one more than the number of phrasebooks it can render).
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Glyph of character `c` at 1-based `level`.
    pub fn glyph(&self, level: usize, c: usize) -> char {
        self.levels[level - 1][c]
    }

    pub fn lookup(&self, level: usize, g: char) -> Option<usize> {
        self.levels.get(level.wrapping_sub(1))?.iter().position(|&x| x == g)
    }
}
