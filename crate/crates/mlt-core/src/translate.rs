use crate::{MltError, Phrasebook, PhrasebookSet, Result, Sequence};

fn check_alphabet(expected: usize, s: &Sequence) -> Result<()> {
    if s.n() != expected {
        return Err(MltError::invalid(format!(
            "sequence alphabet {} does not match phrasebook alphabet {expected}",
            s.n()
        )));
    }
    Ok(())
}

fn translate_pairs(pb: &Phrasebook, s: &Sequence) -> Sequence {
    let mut out = Vec::with_capacity(s.len());
    for j in 0..s.len() / 2 {
        let (a, b) = s.pair(j);
        let (c, d) = pb.map_pair(a, b);
        out.push(c);
        out.push(d);
    }
    Sequence::new(s.n(), out).expect("translation preserves validity")
}

/// One level: rotate left by one character, then translate each pair.
pub fn apply_step(pb: &Phrasebook, s: &Sequence) -> Result<Sequence> {
    check_alphabet(pb.n(), s)?;
    Ok(translate_pairs(pb, &s.rotate_left(1)))
}

pub fn mlt_forward(task: &PhrasebookSet, s: &Sequence) -> Result<Sequence> {
    check_alphabet(task.n(), s)?;
    let mut cur = s.clone();
    for pb in task.books() {
        cur = translate_pairs(pb, &cur.rotate_left(1));
    }
    Ok(cur)
}

pub fn mlt_inverse(task: &PhrasebookSet, y: &Sequence) -> Result<Sequence> {
    check_alphabet(task.n(), y)?;
    let mut cur = y.clone();
    for pb in task.books().iter().rev() {
        cur = translate_pairs(&pb.inverse(), &cur).rotate_right(1);
    }
    Ok(cur)
}

/// Every level of one run: `levels[0]` is the input, `levels[d]` the output,
/// and `shifted[i]` is `levels[i]` rotated left by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub levels: Vec<Sequence>,
    pub shifted: Vec<Sequence>,
}

pub fn intermediates(task: &PhrasebookSet, s: &Sequence) -> Result<Trace> {
    check_alphabet(task.n(), s)?;
    let mut levels = vec![s.clone()];
    let mut shifted = Vec::with_capacity(task.depth());
    for pb in task.books() {
        let rotated = levels.last().unwrap().rotate_left(1);
        levels.push(translate_pairs(pb, &rotated));
        shifted.push(rotated);
    }
    Ok(Trace { levels, shifted })
}
