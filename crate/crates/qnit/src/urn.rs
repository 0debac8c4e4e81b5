//! A quasi-classical analogue of nit measurements: generalized urns.
//!
//! Every state becomes a ball type painted with one symbol per
//! partition, each symbol in that partition's color. A lens of a model
//! color reveals exactly that partition's symbol — one look answers one
//! query, and only the full set of colors identifies the ball. A lens in
//! a color the model does not use either shows nothing (monospectral
//! filtering: all balls look uniformly black) or shows every symbol at
//! once, darker and with less contrast (broadened transmission).
//!
//! Randomness contract: draws use the ChaCha8 stream cipher seeded from
//! a caller-supplied 64-bit seed, reduced to the ball count by rejection
//! sampling — the sequence of draws is identical on every platform.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{NitSet, StateIndex};

/// How a lens whose color is foreign to the model behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LensMode {
    /// Transmits only its own wavelength: every ball appears black.
    Monospectral,
    /// Transmits a broadened band: all symbols show at once.
    Broadened,
}

/// A colored lens. The mode only matters when the color is not one of
/// the model's colors; a matched lens always reveals its partition's
/// symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lens {
    /// Color name, matched against the model's colors.
    pub color: String,
    /// Behavior when the color is foreign to the model.
    pub mode: LensMode,
}

/// What one look at one ball shows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LookResult {
    /// The matched partition's symbol.
    Symbol(String),
    /// Nothing readable (foreign monospectral lens).
    NoAnswer,
    /// Every symbol on the ball, one per model color, in model color
    /// order (foreign broadened lens).
    SymbolSet(Vec<String>),
}

/// An urn of ball types built from a valid nit set: ball `i` carries,
/// for the `j`-th color, the glyph of the block of partition `j`
/// containing state `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnModel {
    colors: Vec<String>,
    glyphs: Vec<String>,
    /// `balls[state - 1][j]` = 0-based block index in partition `j`.
    balls: Vec<Vec<usize>>,
}

impl UrnModel {
    /// Color names, one per partition.
    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    /// The glyph alphabet, one glyph per block index.
    pub fn glyphs(&self) -> &[String] {
        &self.glyphs
    }

    /// Number of ball types (= number of states).
    pub fn ball_count(&self) -> usize {
        self.balls.len()
    }

    /// The 0-based block index per color for a ball.
    pub fn block_tuple(&self, ball: StateIndex) -> Result<&[usize]> {
        if ball == 0 || ball as usize > self.balls.len() {
            return Err(Error::InvalidParameter(format!(
                "ball {ball} out of range 1..={}",
                self.balls.len()
            )));
        }
        Ok(&self.balls[ball as usize - 1])
    }

    /// The glyphs painted on a ball, in model color order.
    pub fn glyph_tuple(&self, ball: StateIndex) -> Result<Vec<&str>> {
        Ok(self
            .block_tuple(ball)?
            .iter()
            .map(|&b| self.glyphs[b].as_str())
            .collect())
    }
}

/// Builds the urn for a valid nit set. `colors` names the partitions
/// (one distinct name each); `glyphs` labels the blocks (one distinct
/// glyph per block index, shared across colors).
pub fn urn_from_nit_set(set: &NitSet, colors: &[String], glyphs: &[String]) -> Result<UrnModel> {
    let report = set.validate();
    if !report.is_valid() {
        return Err(Error::InvalidNitSet(report));
    }
    let n = set.params.n() as usize;
    let k = set.params.k() as usize;
    if colors.len() != k {
        return Err(Error::InvalidParameter(format!(
            "{} colors given for {k} partitions",
            colors.len()
        )));
    }
    if glyphs.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} glyphs given for {n} blocks per partition",
            glyphs.len()
        )));
    }
    for (i, c) in colors.iter().enumerate() {
        if colors[..i].contains(c) {
            return Err(Error::InvalidParameter(format!("color {c:?} repeats")));
        }
    }
    for (i, g) in glyphs.iter().enumerate() {
        if glyphs[..i].contains(g) {
            return Err(Error::InvalidParameter(format!("glyph {g:?} repeats")));
        }
    }
    let n_states = set.params.state_count();
    let mut balls = vec![Vec::with_capacity(k); n_states];
    for partition in &set.partitions {
        let membership = partition.membership(n_states)?;
        for (s0, &b) in membership.iter().enumerate() {
            balls[s0].push(b);
        }
    }
    Ok(UrnModel {
        colors: colors.to_vec(),
        glyphs: glyphs.to_vec(),
        balls,
    })
}

/// One look at a ball through a lens.
pub fn look(ball: StateIndex, urn: &UrnModel, lens: &Lens) -> Result<LookResult> {
    let blocks = urn.block_tuple(ball)?;
    match urn.colors.iter().position(|c| *c == lens.color) {
        Some(j) => Ok(LookResult::Symbol(urn.glyphs[blocks[j]].clone())),
        None => match lens.mode {
            LensMode::Monospectral => Ok(LookResult::NoAnswer),
            LensMode::Broadened => Ok(LookResult::SymbolSet(
                blocks.iter().map(|&b| urn.glyphs[b].clone()).collect(),
            )),
        },
    }
}

/// A reproducible stream of uniform ball draws.
pub struct UrnSession {
    rng: ChaCha8Rng,
    ball_count: u64,
}

impl UrnSession {
    /// Starts a session with a fixed seed; the draw sequence depends
    /// only on the seed and the ball count.
    pub fn new(urn: &UrnModel, seed: u64) -> UrnSession {
        UrnSession {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ball_count: urn.ball_count() as u64,
        }
    }

    /// Draws one ball uniformly (modulo-rejection sampling, bias-free).
    pub fn draw(&mut self) -> StateIndex {
        let bound = self.ball_count;
        // Reject the top partial interval of the 2^64 range so that the
        // remainder is an exact multiple of `bound`.
        let spill = (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.rng.next_u64();
            if spill == 0 || x <= u64::MAX - spill {
                return (x % bound + 1) as StateIndex;
            }
        }
    }
}

/// One draw with a fresh session; successive calls with the same seed
/// repeat the same ball.
pub fn draw_one(urn: &UrnModel, seed: u64) -> StateIndex {
    UrnSession::new(urn, seed).draw()
}

/// One aggregated line of a session tally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TallyEntry {
    /// `"symbol"`, `"no_answer"`, or `"symbol_set"`.
    pub kind: String,
    /// The glyphs seen (empty for no answer).
    pub glyphs: Vec<String>,
    /// How many draws produced this result.
    pub count: u64,
    /// Qualitative rendering note for broadened viewing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

/// Counts of every distinct look result over a seeded run of draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionTally {
    /// Number of draws performed.
    pub draws: u64,
    /// The lens used throughout.
    pub lens: Lens,
    /// Aggregated results in a fixed, deterministic order.
    pub results: Vec<TallyEntry>,
}

/// Draws `draws` balls with a fixed seed and tallies the look results.
pub fn run_session(urn: &UrnModel, lens: &Lens, draws: u64, seed: u64) -> Result<SessionTally> {
    let mut session = UrnSession::new(urn, seed);
    let mut tally: BTreeMap<LookResult, u64> = BTreeMap::new();
    for _ in 0..draws {
        let ball = session.draw();
        let result = look(ball, urn, lens)?;
        *tally.entry(result).or_insert(0) += 1;
    }
    let results = tally
        .into_iter()
        .map(|(result, count)| match result {
            LookResult::Symbol(g) => TallyEntry {
                kind: "symbol".into(),
                glyphs: vec![g],
                count,
                annotation: None,
            },
            LookResult::NoAnswer => TallyEntry {
                kind: "no_answer".into(),
                glyphs: Vec::new(),
                count,
                annotation: None,
            },
            LookResult::SymbolSet(glyphs) => TallyEntry {
                kind: "symbol_set".into(),
                glyphs,
                count,
                annotation: Some("darker, reduced contrast".into()),
            },
        })
        .collect();
    Ok(SessionTally {
        draws,
        lens: lens.clone(),
        results,
    })
}
