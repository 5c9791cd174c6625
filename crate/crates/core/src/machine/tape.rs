//! Tape storage.
//!
//! The head only ever moves one cell per step, so the set of cells that
//! have been read is always a contiguous interval containing cell 0. The
//! tape stores exactly that interval: `right[i]` is cell `i` and `left[i]`
//! is cell `-(i + 1)`. Unread cells hold their initial content: the input
//! prefix for cells `0..input.len()`, the fill symbol everywhere else.

use super::Symbol;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    fill: Symbol,
    input: Vec<Symbol>,
    right: Vec<Symbol>,
    left: Vec<Symbol>,
}

impl Tape {
    /// A tape filled uniformly with `fill`.
    pub fn new(fill: Symbol) -> Self {
        Self::with_input(fill, Vec::new())
    }

    /// A tape whose cells `0..input.len()` initially hold `input` and whose
    /// other cells hold `fill`.
    pub fn with_input(fill: Symbol, input: Vec<Symbol>) -> Self {
        Self {
            fill,
            input,
            right: Vec::new(),
            left: Vec::new(),
        }
    }

    pub fn fill(&self) -> Symbol {
        self.fill
    }

    /// Number of distinct cells read so far.
    pub fn visited(&self) -> usize {
        self.right.len() + self.left.len()
    }

    /// Leftmost and rightmost visited cell, if any.
    pub fn visited_range(&self) -> Option<(i64, i64)> {
        if self.visited() == 0 {
            return None;
        }
        Some((-(self.left.len() as i64), self.right.len() as i64 - 1))
    }

    pub fn is_visited(&self, cell: i64) -> bool {
        if cell >= 0 {
            (cell as usize) < self.right.len()
        } else {
            ((-cell - 1) as usize) < self.left.len()
        }
    }

    fn initial(&self, cell: i64) -> Symbol {
        if cell >= 0 {
            self.input.get(cell as usize).copied().unwrap_or(self.fill)
        } else {
            self.fill
        }
    }

    /// Current value of a cell without marking it visited.
    pub fn peek(&self, cell: i64) -> Symbol {
        let slot = if cell >= 0 {
            self.right.get(cell as usize)
        } else {
            self.left.get((-cell - 1) as usize)
        };
        slot.copied().unwrap_or_else(|| self.initial(cell))
    }

    fn slot_mut(&mut self, cell: i64) -> &mut Symbol {
        let initial = self.initial(cell);
        let (cells, idx) = if cell >= 0 {
            (&mut self.right, cell as usize)
        } else {
            (&mut self.left, (-cell - 1) as usize)
        };
        if idx >= cells.len() {
            // Contiguity: a new cell is always adjacent to the visited interval.
            debug_assert_eq!(idx, cells.len());
            cells.push(initial);
        }
        &mut cells[idx]
    }

    /// Reads a cell, marking it visited.
    pub fn read(&mut self, cell: i64) -> Symbol {
        *self.slot_mut(cell)
    }

    /// Writes a cell that has already been read.
    pub fn write(&mut self, cell: i64, symbol: Symbol) {
        debug_assert!(self.is_visited(cell));
        *self.slot_mut(cell) = symbol;
    }

    /// Visited cells whose content differs from the fill, sorted by index.
    pub fn overlay(&self) -> Vec<(i64, Symbol)> {
        let left = self.left.iter().enumerate().rev().map(|(i, &s)| (-(i as i64) - 1, s));
        let right = self.right.iter().enumerate().map(|(i, &s)| (i as i64, s));
        left.chain(right).filter(|&(_, s)| s != self.fill).collect()
    }

    /// Equality of full tape content, ignoring which cells happen to be visited.
    pub fn same_content(&self, other: &Tape) -> bool {
        if self.fill != other.fill {
            return false;
        }
        let hi = [self.right.len(), self.input.len(), other.right.len(), other.input.len()]
            .into_iter()
            .max()
            .unwrap_or(0) as i64;
        let lo = self.left.len().max(other.left.len()) as i64;
        (-lo..hi).all(|cell| self.peek(cell) == other.peek(cell))
    }
}
