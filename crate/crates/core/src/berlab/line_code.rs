//! 8b/10b line code for data characters.
//!
//! Code groups are emitted in transmission order `abcdei fghj`. Bytes map to
//! `HGF EDCBA` with `A` the least significant bit.

use crate::error::{CodeViolation, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Disparity {
    Negative,
    Positive,
}

impl Disparity {
    pub fn sign(self) -> i8 {
        match self {
            Disparity::Negative => -1,
            Disparity::Positive => 1,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Disparity::Negative => Disparity::Positive,
            Disparity::Positive => Disparity::Negative,
        }
    }
}

/// 5b/6b sub-block codes for RD-, `abcdei` with `a` in bit 5.
const SIX_B: [u8; 32] = [
    0b100111, 0b011101, 0b101101, 0b110001, 0b110101, 0b101001, 0b011001, 0b111000, //
    0b111001, 0b100101, 0b010101, 0b110100, 0b001101, 0b101100, 0b011100, 0b010111, //
    0b011011, 0b100011, 0b010011, 0b110010, 0b001011, 0b101010, 0b011010, 0b111010, //
    0b110011, 0b100110, 0b010110, 0b110110, 0b001110, 0b101110, 0b011110, 0b101011,
];

/// 3b/4b sub-block codes for RD-, `fghj` with `f` in bit 3. Index 7 is the primary D.x.P7.
const FOUR_B: [u8; 8] = [0b1011, 0b1001, 0b0101, 0b1100, 0b1101, 0b1010, 0b0110, 0b1110];
const FOUR_B_A7: u8 = 0b0111;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCodeBlock {
    pub payload: Vec<u8>,
    /// One entry per channel bit, each 0 or 1.
    pub encoded: Vec<u8>,
    /// Running disparity before the first group and after every group.
    pub running_disparity_trace: Vec<Disparity>,
}

impl LineCodeBlock {
    pub fn final_disparity(&self) -> Disparity {
        *self.running_disparity_trace.last().expect("trace holds the initial disparity")
    }
}

fn six_b_for(x: u8, rd: Disparity) -> u8 {
    let code = SIX_B[x as usize];
    let unbalanced = code.count_ones() != 3;
    if rd == Disparity::Positive && (unbalanced || x == 7) {
        !code & 0x3F
    } else {
        code
    }
}

fn four_b_for(x: u8, y: u8, rd: Disparity) -> u8 {
    let alternate = y == 7
        && match rd {
            Disparity::Negative => matches!(x, 17 | 18 | 20),
            Disparity::Positive => matches!(x, 11 | 13 | 14),
        };
    let code = if alternate { FOUR_B_A7 } else { FOUR_B[y as usize] };
    let unbalanced = code.count_ones() != 2;
    if rd == Disparity::Positive && (unbalanced || y == 3 || alternate) {
        !code & 0x0F
    } else {
        code
    }
}

fn next_rd(rd: Disparity, code: u8, width: u32) -> Disparity {
    if 2 * code.count_ones() == width {
        rd
    } else {
        rd.flipped()
    }
}

/// Encode one byte; returns the 10-bit group (first transmitted bit in bit 9)
/// and the running disparity after it.
pub fn encode_symbol(byte: u8, rd: Disparity) -> (u16, Disparity) {
    let x = byte & 0x1F;
    let y = byte >> 5;
    let six = six_b_for(x, rd);
    let rd = next_rd(rd, six, 6);
    let four = four_b_for(x, y, rd);
    let rd = next_rd(rd, four, 4);
    (((six as u16) << 4) | four as u16, rd)
}

pub fn encode_8b10b(payload: &[u8], initial_disparity: Disparity) -> LineCodeBlock {
    let mut rd = initial_disparity;
    let mut encoded = Vec::with_capacity(payload.len() * 10);
    let mut trace = Vec::with_capacity(payload.len() + 1);
    trace.push(rd);
    for &byte in payload {
        let (group, next) = encode_symbol(byte, rd);
        encoded.extend((0..10).rev().map(|i| ((group >> i) & 1) as u8));
        rd = next;
        trace.push(rd);
    }
    LineCodeBlock {
        payload: payload.to_vec(),
        encoded,
        running_disparity_trace: trace,
    }
}

fn pack_group(bits: &[u8]) -> u16 {
    bits.iter().fold(0u16, |acc, &b| (acc << 1) | (b & 1) as u16)
}

fn lookup_six(code: u8) -> Option<u8> {
    (0..32u8).find(|&x| {
        six_b_for(x, Disparity::Negative) == code || six_b_for(x, Disparity::Positive) == code
    })
}

fn lookup_four(code: u8) -> Option<u8> {
    if code == FOUR_B_A7 || code == (!FOUR_B_A7 & 0x0F) {
        return Some(7);
    }
    (0..8u8).find(|&y| {
        let c = FOUR_B[y as usize];
        let plus = if c.count_ones() != 2 || y == 3 { !c & 0x0F } else { c };
        c == code || plus == code
    })
}

/// Table lookup of one 10-bit group, ignoring running disparity.
pub fn lookup_symbol(group: u16) -> Option<u8> {
    let x = lookup_six((group >> 4) as u8 & 0x3F)?;
    let y = lookup_four(group as u8 & 0x0F)?;
    Some((y << 5) | x)
}

/// Strict decoder: every group must be a data code group legal at the current
/// running disparity.
pub fn decode_8b10b(bits: &[u8], initial_disparity: Disparity) -> Result<Vec<u8>> {
    if bits.len() % 10 != 0 {
        return Err(Error::domain(
            "bits",
            format!("length {} is not a multiple of 10", bits.len()),
        ));
    }
    let mut rd = initial_disparity;
    let mut out = Vec::with_capacity(bits.len() / 10);
    for (index, chunk) in bits.chunks_exact(10).enumerate() {
        let group = pack_group(chunk);
        let byte = lookup_symbol(group).ok_or(Error::Decode {
            index,
            kind: CodeViolation::InvalidCode,
        })?;
        let (expected, next) = encode_symbol(byte, rd);
        if expected != group {
            return Err(Error::Decode {
                index,
                kind: CodeViolation::Disparity,
            });
        }
        rd = next;
        out.push(byte);
    }
    Ok(out)
}

/// Longest run of identical bits.
pub fn max_run_length(bits: &[u8]) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut prev = None;
    for &b in bits {
        if Some(b) == prev {
            run += 1;
        } else {
            run = 1;
            prev = Some(b);
        }
        best = best.max(run);
    }
    best
}
