//! Byte cells and replicated tapes built from them.
//!
//! A [`ByteCell`] keeps eight bits that only change on explicit writes and a
//! head that drifts back to the low bit whenever nothing is written. A
//! [`Tape`] strings cells together, keeps up to three replicas of the
//! content, and stores its head position in a further byte cell whose
//! coordinates are cleared one per idle tick.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Bits per cell and positions on the cell's decay chain.
pub const CELL_BITS: usize = 8;

/// Longest tape whose head position fits in one counter cell.
pub const MAX_TAPE_BITS: usize = 1 << CELL_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    /// Idle tick.
    #[serde(rename = "e")]
    Tick,
    /// Move the head down.
    #[serde(rename = "μ")]
    Mu,
    /// Move the head up.
    #[serde(rename = "ν")]
    Nu,
    /// Write 1 under the head.
    #[serde(rename = "α")]
    Alpha,
    /// Write 0 under the head.
    #[serde(rename = "ω")]
    Omega,
}

impl Symbol {
    pub const ALL: [Symbol; 5] = [Symbol::Tick, Symbol::Mu, Symbol::Nu, Symbol::Alpha, Symbol::Omega];

    pub fn glyph(self) -> &'static str {
        match self {
            Symbol::Tick => "e",
            Symbol::Mu => "μ",
            Symbol::Nu => "ν",
            Symbol::Alpha => "α",
            Symbol::Omega => "ω",
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(Symbol::Tick),
            "μ" | "mu" => Ok(Symbol::Mu),
            "ν" | "nu" => Ok(Symbol::Nu),
            "α" | "alpha" => Ok(Symbol::Alpha),
            "ω" | "omega" => Ok(Symbol::Omega),
            _ => Err(Error::UnknownSymbol(s.to_string())),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

/// Parses a whitespace-separated symbol script; `#` starts a comment.
pub fn parse_script(text: &str) -> Result<Vec<Symbol>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::parse)
        .collect()
}

/// What a cell or tape shows after one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Emission {
    /// The bit under the head after the move.
    pub bit: bool,
    /// A head move ran into the end and had no effect.
    pub boundary: bool,
}

/// Eight stored bits plus a head on a downward-only decay chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByteCell {
    bits: u8,
    head: u8,
    scale: i32,
}

impl ByteCell {
    pub fn new(scale: i32) -> Self {
        Self {
            bits: 0,
            head: 0,
            scale,
        }
    }

    pub fn with_bits(bits: u8, scale: i32) -> Self {
        Self { bits, head: 0, scale }
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn head(&self) -> usize {
        self.head as usize
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn bit(&self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    pub fn at_rest(&self) -> bool {
        self.head == 0
    }

    /// Applies one symbol in place.
    pub fn apply_mut(&mut self, s: Symbol) -> Emission {
        let mut boundary = false;
        match s {
            Symbol::Tick => self.head = self.head.saturating_sub(1),
            Symbol::Mu => {
                boundary = self.head == 0;
                self.head = self.head.saturating_sub(1);
            }
            Symbol::Nu => {
                boundary = self.head as usize == CELL_BITS - 1;
                if !boundary {
                    self.head += 1;
                }
            }
            Symbol::Alpha => self.bits |= 1 << self.head,
            Symbol::Omega => self.bits &= !(1 << self.head),
        }
        Emission {
            bit: self.bit(self.head as usize),
            boundary,
        }
    }

    pub fn apply(&self, s: Symbol) -> (ByteCell, Emission) {
        let mut next = *self;
        let e = next.apply_mut(s);
        (next, e)
    }

    /// Moves the head to `k` with μ and ν.
    fn seek(&mut self, k: usize) {
        while self.head() < k {
            self.apply_mut(Symbol::Nu);
        }
        while self.head() > k {
            self.apply_mut(Symbol::Mu);
        }
    }

    /// Drives the head to coordinate `k` and writes `value` there.
    pub fn write(&mut self, k: usize, value: bool) {
        self.seek(k);
        self.apply_mut(if value { Symbol::Alpha } else { Symbol::Omega });
    }
}

impl fmt::Display for ByteCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08b}@{}", self.bits, self.head)
    }
}

/// Entries in the full transition table of a cell: one per stored value,
/// head position and symbol.
pub fn transition_table_size(alphabet_size: u64, positions: u64, symbols: u64) -> u128 {
    alphabet_size as u128 * positions as u128 * symbols as u128
}

/// A bit tape made of byte cells, kept in one or three replicas, with the
/// head position held in binary by a counter cell one scale down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    replicas: Vec<Vec<ByteCell>>,
    counter: ByteCell,
    len: usize,
    scale: i32,
}

impl Tape {
    pub fn new(len: usize, replicas: usize, scale: i32) -> Result<Self> {
        if len == 0 || !len.is_multiple_of(CELL_BITS) || len > MAX_TAPE_BITS {
            return Err(Error::Invalid(format!(
                "tape length must be a positive multiple of {CELL_BITS} up to {MAX_TAPE_BITS}, got {len}"
            )));
        }
        if replicas != 1 && replicas != 3 {
            return Err(Error::Invalid(format!("a tape keeps 1 or 3 replicas, not {replicas}")));
        }
        let row = vec![ByteCell::new(scale - 1); len / CELL_BITS];
        Ok(Self {
            replicas: vec![row; replicas],
            counter: ByteCell::new(scale - 1),
            len,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn replica_count(&self) -> usize {
        self.replicas.len()
    }

    pub fn counter(&self) -> &ByteCell {
        &self.counter
    }

    /// Decoded head position.
    pub fn head(&self) -> usize {
        self.counter.bits() as usize
    }

    fn set_head(&mut self, target: usize) {
        for k in 0..CELL_BITS {
            let want = target >> k & 1 == 1;
            if self.counter.bit(k) != want {
                self.counter.write(k, want);
            }
        }
    }

    fn replica_bit(&self, r: usize, pos: usize) -> bool {
        self.replicas[r][pos / CELL_BITS].bit(pos % CELL_BITS)
    }

    /// The stored bit at `pos`: the majority over three replicas, or the
    /// single copy.
    pub fn read(&self, pos: usize) -> bool {
        let ones = (0..self.replicas.len())
            .filter(|&r| self.replica_bit(r, pos))
            .count();
        2 * ones > self.replicas.len()
    }

    pub fn majority_read(&self, pos: usize) -> Result<bool> {
        if self.replicas.len() < 3 {
            return Err(Error::Unsupported(
                "majority read needs three replicas".into(),
            ));
        }
        if pos >= self.len {
            return Err(Error::Invalid(format!("position {pos} beyond tape of {}", self.len)));
        }
        Ok(self.read(pos))
    }

    /// Flips one bit of one replica, as a fault would.
    pub fn corrupt(&mut self, replica: usize, pos: usize) -> Result<()> {
        if replica >= self.replicas.len() || pos >= self.len {
            return Err(Error::Invalid(format!(
                "no bit {pos} in replica {replica} of a {}x{} tape",
                self.replicas.len(),
                self.len
            )));
        }
        let cell = &mut self.replicas[replica][pos / CELL_BITS];
        let k = pos % CELL_BITS;
        let flipped = !cell.bit(k);
        cell.write(k, flipped);
        Ok(())
    }

    pub fn apply_mut(&mut self, s: Symbol) -> Emission {
        let head = self.head();
        let mut boundary = false;
        match s {
            Symbol::Tick => {
                // One counter coordinate per tick, highest first, so the
                // head rests after at most eight ticks.
                if self.counter.bits() != 0 {
                    let top = CELL_BITS - 1 - self.counter.bits().leading_zeros() as usize;
                    self.counter.write(top, false);
                }
                self.counter.apply_mut(Symbol::Tick);
                for row in &mut self.replicas {
                    for cell in row.iter_mut() {
                        cell.apply_mut(Symbol::Tick);
                    }
                }
            }
            Symbol::Mu => match head.checked_sub(1) {
                Some(h) => self.set_head(h),
                None => boundary = true,
            },
            Symbol::Nu => {
                if head + 1 < self.len {
                    self.set_head(head + 1);
                } else {
                    boundary = true;
                }
            }
            Symbol::Alpha | Symbol::Omega => {
                for row in &mut self.replicas {
                    row[head / CELL_BITS].write(head % CELL_BITS, s == Symbol::Alpha);
                }
            }
        }
        Emission {
            bit: self.read(self.head()),
            boundary,
        }
    }

    pub fn apply(&self, s: Symbol) -> (Tape, Emission) {
        let mut next = self.clone();
        let e = next.apply_mut(s);
        (next, e)
    }

    pub fn run(&mut self, script: &[Symbol]) -> Vec<Emission> {
        script.iter().map(|&s| self.apply_mut(s)).collect()
    }

    pub fn idle(&self, ticks: u64) -> Tape {
        let mut t = self.clone();
        for _ in 0..ticks {
            t.apply_mut(Symbol::Tick);
            if t.at_rest() {
                break;
            }
        }
        t
    }

    /// Counter and every cell head are at rest.
    pub fn at_rest(&self) -> bool {
        self.counter.bits() == 0
            && self.counter.at_rest()
            && self.replicas.iter().flatten().all(ByteCell::at_rest)
    }

    /// Majority content, position 0 first.
    pub fn content(&self) -> Vec<bool> {
        (0..self.len).map(|p| self.read(p)).collect()
    }

    pub fn replica(&self, r: usize) -> Vec<bool> {
        (0..self.len).map(|p| self.replica_bit(r, p)).collect()
    }

    pub fn replicas_agree(&self) -> bool {
        self.replicas.iter().all(|row| row == &self.replicas[0])
    }

    /// Majority content as hex, one byte per cell, low position in the low bit.
    pub fn to_hex(&self) -> String {
        self.content()
            .chunks(CELL_BITS)
            .map(|c| {
                let byte = c.iter().enumerate().fold(0u8, |b, (k, &v)| b | (v as u8) << k);
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn dump(&self) -> TapeDump {
        TapeDump {
            len: self.len,
            replicas: self.replicas.len(),
            content: self.to_hex(),
            head: self.head(),
            counter: format!("{:08b}", self.counter.bits()),
            replicas_agree: self.replicas_agree(),
        }
    }
}

/// The two-level tape: 256 bits in three replicas, counter one scale down.
pub fn build_t1() -> Tape {
    Tape::new(MAX_TAPE_BITS, 3, 1).expect("valid dimensions")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TapeDump {
    pub len: usize,
    pub replicas: usize,
    pub content: String,
    pub head: usize,
    pub counter: String,
    pub replicas_agree: bool,
}
