use std::io::{BufRead, Write};

/// Supplies the environment's choices for `!` quantifiers.
pub trait MoveSource {
    /// Next move for the variable `var`, or `None` when no move is available.
    fn next_move(&mut self, var: &str) -> Option<u64>;

    /// Moves supplied but never consumed.
    fn remaining(&self) -> usize {
        0
    }
}

/// A prerecorded list of moves consumed left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveScript {
    moves: Vec<u64>,
    cursor: usize,
}

impl MoveScript {
    pub fn new(moves: Vec<u64>) -> Self {
        MoveScript { moves, cursor: 0 }
    }

    pub fn consumed(&self) -> &[u64] {
        &self.moves[..self.cursor]
    }
}

impl MoveSource for MoveScript {
    fn next_move(&mut self, _var: &str) -> Option<u64> {
        let m = self.moves.get(self.cursor).copied()?;
        self.cursor += 1;
        Some(m)
    }

    fn remaining(&self) -> usize {
        self.moves.len() - self.cursor
    }
}

/// Asks for each move on `prompt`, reading answers from `input`.
/// Anything that is not a natural number is asked again.
pub struct Interactive<R, W> {
    input: R,
    prompt: W,
}

impl<R: BufRead, W: Write> Interactive<R, W> {
    pub fn new(input: R, prompt: W) -> Self {
        Interactive { input, prompt }
    }
}

impl<R: BufRead, W: Write> MoveSource for Interactive<R, W> {
    fn next_move(&mut self, var: &str) -> Option<u64> {
        loop {
            write!(self.prompt, "move for {var}? ").ok()?;
            self.prompt.flush().ok()?;
            let mut line = String::new();
            if self.input.read_line(&mut line).ok()? == 0 {
                return None;
            }
            match line.trim().parse::<u64>() {
                Ok(n) => return Some(n),
                Err(_) => {
                    writeln!(self.prompt, "not a natural number: {}", line.trim()).ok()?;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_in_order() {
        let mut s = MoveScript::new(vec![4, 7]);
        assert_eq!(s.next_move("x"), Some(4));
        assert_eq!(s.remaining(), 1);
        assert_eq!(s.next_move("y"), Some(7));
        assert_eq!(s.next_move("z"), None);
        assert_eq!(s.consumed(), &[4, 7]);
    }

    #[test]
    fn interactive_reprompts() {
        let mut out = Vec::new();
        let mut m = Interactive::new(&b"four\n-1\n4\n"[..], &mut out);
        assert_eq!(m.next_move("x"), Some(4));
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("move for x? ").count(), 3);
    }

    #[test]
    fn interactive_eof() {
        let mut out = Vec::new();
        let mut m = Interactive::new(&b""[..], &mut out);
        assert_eq!(m.next_move("x"), None);
    }
}
