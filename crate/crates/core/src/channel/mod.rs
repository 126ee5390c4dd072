//! The `(rho_r, rho_w)` adversarial wiretap channel and the public
//! discussion channel.
//!
//! An AWTP round is an action loop: the adversary strategy picks positions
//! one at a time to read (seeing the current symbol) or to write (adding a
//! nonzero error vector). Every action is checked against the round budget
//! before it takes effect; an over-budget action aborts the round with
//! [`Error::ProtocolViolation`].

mod strategies;

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use strategies::{build_strategy, strategy_library, STRATEGY_NAMES};

use crate::error::{param, Error, Result};
use crate::gf::Field;
use crate::rational::{floor_mul, Fraction};
use crate::Symbol;

/// Read, write and touched fractions of one channel use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelParams {
    rho_r: Fraction,
    rho_w: Fraction,
    rho: Fraction,
}

impl ChannelParams {
    pub fn new(rho_r: Fraction, rho_w: Fraction, rho: Fraction) -> Result<Self> {
        let one = Fraction::from_integer(1);
        if rho_r < Fraction::zero() || rho_w < Fraction::zero() || rho > one {
            return Err(param(format!(
                "fractions must lie in [0, 1]; got rho_r = {rho_r}, rho_w = {rho_w}, rho = {rho}"
            )));
        }
        if rho < rho_r.max(rho_w) {
            return Err(param(format!(
                "max(rho_r, rho_w) <= rho violated: max({rho_r}, {rho_w}) > {rho}"
            )));
        }
        if rho > rho_r + rho_w {
            return Err(param(format!(
                "rho <= rho_r + rho_w violated: {rho} > {rho_r} + {rho_w}"
            )));
        }
        Ok(ChannelParams { rho_r, rho_w, rho })
    }

    pub fn noiseless() -> Self {
        ChannelParams {
            rho_r: Fraction::zero(),
            rho_w: Fraction::zero(),
            rho: Fraction::zero(),
        }
    }

    pub fn rho_r(&self) -> Fraction {
        self.rho_r
    }
    pub fn rho_w(&self) -> Fraction {
        self.rho_w
    }
    pub fn rho(&self) -> Fraction {
        self.rho
    }

    /// `rho_0 = rho_r + rho_w - rho`, the read-and-written fraction.
    pub fn overlap(&self) -> Fraction {
        self.rho_r + self.rho_w - self.rho
    }

    /// `1 + rho - rho_r - 2 rho_w`.
    pub fn lv_rate(&self) -> Fraction {
        Fraction::from_integer(1) + self.rho - self.rho_r - self.rho_w * 2
    }

    pub fn budget(&self, len: usize) -> Budget {
        Budget {
            reads: floor_mul(self.rho_r, len),
            writes: floor_mul(self.rho_w, len),
            union: floor_mul(self.rho, len),
            overlap: floor_mul(self.overlap(), len),
        }
    }
}

/// Per-round limits on `|S_r|`, `|S_w|`, `|S_r ∪ S_w|` and `|S_r ∩ S_w|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub reads: usize,
    pub writes: usize,
    pub union: usize,
    pub overlap: usize,
}

impl Budget {
    /// Largest `(reads, writes, overlap)` not exceeding the request that
    /// satisfies all four limits at once.
    pub fn plan(&self, reads: usize, writes: usize, overlap: usize) -> (usize, usize, usize) {
        let mut r = reads.min(self.reads);
        let mut w = writes.min(self.writes);
        let mut o = overlap.min(self.overlap).min(r).min(w);
        while r + w - o > self.union {
            if r > o {
                r -= 1;
            } else if w > o {
                w -= 1;
            } else {
                o -= 1;
                r -= 1;
                w -= 1;
            }
        }
        (r, w, o)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Awtp,
    Pd,
}

/// What the symbols of a round carry, so strategies can target them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// `(r_i in F_q^{u-1}, beta_i)` pairs of the first strong round.
    MacPairs,
    /// LV codeword components `(c_i, r_i, t_i)` with message length `k`.
    Lv { k: usize },
    /// Weak-protocol components `(s_i, r_i, t_i)`, tags over the whole `s`.
    WeakAmd,
    /// Raw field elements.
    Opaque,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundContext {
    /// 1-based round number within the session.
    pub round: usize,
    pub direction: Direction,
    pub layout: Layout,
    pub field: Field,
    pub u: usize,
    pub len: usize,
    pub budget: Budget,
}

impl RoundContext {
    pub fn new(
        round: usize,
        direction: Direction,
        layout: Layout,
        field: Field,
        u: usize,
        len: usize,
        params: &ChannelParams,
    ) -> Self {
        RoundContext {
            round,
            direction,
            layout,
            field,
            u,
            len,
            budget: params.budget(len),
        }
    }
}

/// The adversary's knowledge of the current round.
#[derive(Clone, Debug, Default)]
pub struct RoundView {
    pub observation: Vec<(usize, Symbol)>,
    pub read_set: BTreeSet<usize>,
    pub write_set: BTreeSet<usize>,
    pub actions: usize,
}

impl RoundView {
    /// Latest value read at `pos`, if any.
    pub fn seen(&self, pos: usize) -> Option<&Symbol> {
        self.observation.iter().rev().find(|(p, _)| *p == pos).map(|(_, s)| s)
    }

    fn overlap(&self) -> usize {
        self.read_set.intersection(&self.write_set).count()
    }

    fn union(&self) -> usize {
        self.read_set.union(&self.write_set).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversaryAction {
    Read(usize),
    Write { position: usize, error: Symbol },
    Done,
}

/// An adaptive adversary. State may persist across rounds of a session.
pub trait AdversaryStrategy: Send {
    fn name(&self) -> &str;

    fn next_action(&mut self, ctx: &RoundContext, view: &RoundView) -> AdversaryAction;

    /// Called after a public-discussion round; the whole word is visible.
    fn observe_public(&mut self, _ctx: &RoundContext, _word: &[Symbol]) {}
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub channel: ChannelKind,
    pub direction: Direction,
    pub sent: Vec<Symbol>,
    pub received: Vec<Symbol>,
    pub read_set: Vec<usize>,
    pub write_set: Vec<usize>,
    pub observation: Vec<(usize, Symbol)>,
}

impl RoundLog {
    /// `received - sent` componentwise.
    pub fn error(&self, field: Field) -> Vec<Symbol> {
        self.received
            .iter()
            .zip(&self.sent)
            .map(|(r, s)| r.iter().zip(s).map(|(&a, &b)| field.sub(a, b)).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("round log serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

fn violation(ctx: &RoundContext, reason: impl Into<String>) -> Error {
    Error::ProtocolViolation {
        round: ctx.round,
        reason: reason.into(),
    }
}

/// One use of the AWTP channel.
pub fn awtp_transmit(
    word: &[Symbol],
    strategy: &mut dyn AdversaryStrategy,
    ctx: &RoundContext,
) -> Result<RoundLog> {
    let n = word.len();
    if n != ctx.len {
        return Err(Error::Usage(format!(
            "round {} context expects {} symbols, word has {n}",
            ctx.round, ctx.len
        )));
    }
    let q = ctx.field.modulus();
    let b = ctx.budget;
    let mut received = word.to_vec();
    let mut view = RoundView::default();
    let max_actions = 4 * n + 4;

    loop {
        if view.read_set.len() >= b.reads && view.write_set.len() >= b.writes {
            break;
        }
        if view.actions >= max_actions {
            return Err(violation(ctx, format!("more than {max_actions} actions")));
        }
        let action = strategy.next_action(ctx, &view);
        view.actions += 1;
        match action {
            AdversaryAction::Done => break,
            AdversaryAction::Read(p) => {
                if p >= n {
                    return Err(violation(ctx, format!("read position {p} out of range {n}")));
                }
                if !view.read_set.contains(&p) {
                    if view.read_set.len() + 1 > b.reads {
                        return Err(violation(ctx, format!("read budget {} exceeded", b.reads)));
                    }
                    if !view.write_set.contains(&p) && view.union() + 1 > b.union {
                        return Err(violation(ctx, format!("touched budget {} exceeded", b.union)));
                    }
                    if view.write_set.contains(&p) && view.overlap() + 1 > b.overlap {
                        return Err(violation(ctx, format!("overlap budget {} exceeded", b.overlap)));
                    }
                    view.read_set.insert(p);
                }
                view.observation.push((p, received[p].clone()));
            }
            AdversaryAction::Write { position: p, error } => {
                if p >= n {
                    return Err(violation(ctx, format!("write position {p} out of range {n}")));
                }
                if error.len() != ctx.u || error.iter().any(|&e| e >= q) {
                    return Err(violation(ctx, "error vector is not an element of F_q^u"));
                }
                if error.iter().all(|&e| e == 0) {
                    return Err(violation(ctx, "error vector must be nonzero"));
                }
                if view.write_set.contains(&p) {
                    return Err(violation(ctx, format!("position {p} written twice")));
                }
                if view.write_set.len() + 1 > b.writes {
                    return Err(violation(ctx, format!("write budget {} exceeded", b.writes)));
                }
                if !view.read_set.contains(&p) && view.union() + 1 > b.union {
                    return Err(violation(ctx, format!("touched budget {} exceeded", b.union)));
                }
                if view.read_set.contains(&p) && view.overlap() + 1 > b.overlap {
                    return Err(violation(ctx, format!("overlap budget {} exceeded", b.overlap)));
                }
                view.write_set.insert(p);
                for (c, e) in received[p].iter_mut().zip(&error) {
                    *c = ctx.field.add(*c, *e);
                }
            }
        }
    }

    Ok(RoundLog {
        round: ctx.round,
        channel: ChannelKind::Awtp,
        direction: ctx.direction,
        sent: word.to_vec(),
        received,
        read_set: view.read_set.into_iter().collect(),
        write_set: view.write_set.into_iter().collect(),
        observation: view.observation,
    })
}

/// One use of the public-discussion channel: delivered intact, fully read.
pub fn pd_transmit(word: &[Symbol], round: usize, direction: Direction) -> RoundLog {
    RoundLog {
        round,
        channel: ChannelKind::Pd,
        direction,
        sent: word.to_vec(),
        received: word.to_vec(),
        read_set: (0..word.len()).collect(),
        write_set: Vec::new(),
        observation: word.iter().cloned().enumerate().collect(),
    }
}
