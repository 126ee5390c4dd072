//! Library of adversary strategies.
//!
//! Each attacking strategy plans its read and write sets when a round
//! starts, reads first, and then issues writes whose error vectors may
//! depend on what it read.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdversaryAction, AdversaryStrategy, Layout, RoundContext, RoundView};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::primitives::AmdParams;
use crate::Symbol;

pub const STRATEGY_NAMES: [&str; 5] = [
    "passive",
    "random_additive",
    "overlap_overwrite",
    "tail_reader",
    "mac_forger",
];

pub fn strategy_library() -> &'static [&'static str] {
    &STRATEGY_NAMES
}

/// Instantiates a library strategy with its own seeded generator.
pub fn build_strategy(name: &str, seed: u64) -> Result<Box<dyn AdversaryStrategy>> {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match name {
        "passive" => Box::new(Passive),
        "tail_reader" => Box::new(TailReader),
        "random_additive" => Box::new(Planned::new(RandomAdditive, rng)),
        "overlap_overwrite" => Box::new(Planned::new(OverlapOverwrite, rng)),
        "mac_forger" => Box::new(Planned::new(MacForger, rng)),
        other => return Err(Error::UnknownStrategy(other.to_string())),
    })
}

struct Passive;

impl AdversaryStrategy for Passive {
    fn name(&self) -> &str {
        "passive"
    }

    fn next_action(&mut self, _: &RoundContext, _: &RoundView) -> AdversaryAction {
        AdversaryAction::Done
    }
}

/// Reads the last `floor(rho_r n)` positions and never writes.
struct TailReader;

impl AdversaryStrategy for TailReader {
    fn name(&self) -> &str {
        "tail_reader"
    }

    fn next_action(&mut self, ctx: &RoundContext, view: &RoundView) -> AdversaryAction {
        let reads = ctx.budget.reads.min(ctx.budget.union);
        if view.actions < reads {
            AdversaryAction::Read(ctx.len - reads + view.actions)
        } else {
            AdversaryAction::Done
        }
    }
}

fn random_nonzero(field: Field, u: usize, rng: &mut ChaCha8Rng) -> Symbol {
    loop {
        let e: Symbol = (0..u).map(|_| rng.gen_range(0..field.modulus())).collect();
        if e.iter().any(|&v| v != 0) {
            return e;
        }
    }
}

fn difference(field: Field, target: &[u32], current: &[u32]) -> Symbol {
    target.iter().zip(current).map(|(&t, &c)| field.sub(t, c)).collect()
}

/// Per-round attack sets.
#[derive(Debug, Default)]
struct RoundPlan {
    reads: Vec<usize>,
    /// Read positions that are also rewritten.
    overwrite: Vec<usize>,
    /// Unread positions that are written.
    blind: Vec<usize>,
    errors: Vec<(usize, Symbol)>,
}

/// How an attacking strategy sizes its sets and chooses its errors.
trait Policy: Send {
    const NAME: &'static str;

    /// Desired `(reads, writes, overlap)`; clamped by the round budget.
    fn sizes(&self, ctx: &RoundContext, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
        let _ = rng;
        let b = ctx.budget;
        b.plan(b.reads, b.writes, b.overlap)
    }

    /// Errors for the planned writes, called once all reads are done.
    fn errors(
        &mut self,
        ctx: &RoundContext,
        view: &RoundView,
        plan: &RoundPlan,
        rng: &mut ChaCha8Rng,
    ) -> Vec<(usize, Symbol)>;
}

struct Planned<P> {
    policy: P,
    rng: ChaCha8Rng,
    plan: RoundPlan,
    cursor: usize,
}

impl<P: Policy> Planned<P> {
    fn new(policy: P, rng: ChaCha8Rng) -> Self {
        Planned {
            policy,
            rng,
            plan: RoundPlan::default(),
            cursor: 0,
        }
    }

    fn start_round(&mut self, ctx: &RoundContext) {
        let (r, w, o) = self.policy.sizes(ctx, &mut self.rng);
        let mut pos: Vec<usize> = (0..ctx.len).collect();
        pos.shuffle(&mut self.rng);
        let reads = pos[..r].to_vec();
        let overwrite = pos[..o].to_vec();
        let blind = pos[r..r + (w - o)].to_vec();
        self.plan = RoundPlan {
            reads,
            overwrite,
            blind,
            errors: Vec::new(),
        };
        self.cursor = 0;
    }
}

impl<P: Policy> AdversaryStrategy for Planned<P> {
    fn name(&self) -> &str {
        P::NAME
    }

    fn next_action(&mut self, ctx: &RoundContext, view: &RoundView) -> AdversaryAction {
        if view.actions == 0 {
            self.start_round(ctx);
        }
        if self.cursor < self.plan.reads.len() {
            self.cursor += 1;
            return AdversaryAction::Read(self.plan.reads[self.cursor - 1]);
        }
        if self.cursor == self.plan.reads.len() {
            self.plan.errors = self.policy.errors(ctx, view, &self.plan, &mut self.rng);
        }
        let i = self.cursor - self.plan.reads.len();
        self.cursor += 1;
        match self.plan.errors.get(i) {
            Some((position, error)) => AdversaryAction::Write {
                position: *position,
                error: error.clone(),
            },
            None => AdversaryAction::Done,
        }
    }
}

/// Uniformly random sets, uniformly random nonzero errors.
struct RandomAdditive;

impl Policy for RandomAdditive {
    const NAME: &'static str = "random_additive";

    fn sizes(&self, ctx: &RoundContext, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
        let b = ctx.budget;
        let (r, w, hi) = b.plan(b.reads, b.writes, b.overlap);
        let lo = (r + w).saturating_sub(b.union).min(hi);
        (r, w, rng.gen_range(lo..=hi))
    }

    fn errors(&mut self, ctx: &RoundContext, _: &RoundView, plan: &RoundPlan, rng: &mut ChaCha8Rng) -> Vec<(usize, Symbol)> {
        plan.overwrite
            .iter()
            .chain(&plan.blind)
            .map(|&p| (p, random_nonzero(ctx.field, ctx.u, rng)))
            .collect()
    }
}

/// A fresh AMD-consistent component `(c', r, f(c', r))` keeping the read `r`.
fn amd_consistent_rewrite(ctx: &RoundContext, current: &[u32], rng: &mut ChaCha8Rng) -> Option<Symbol> {
    let d = ctx.u.checked_sub(2).filter(|&d| d >= 1)?;
    let amd = AmdParams::new(ctx.field, d).ok()?;
    let payload: Vec<u32> = (0..d).map(|_| rng.gen_range(0..ctx.field.modulus())).collect();
    let r = current[d];
    let t = amd.tag(&payload, r);
    Some([payload, vec![r, t]].concat())
}

/// Rewrites every read-and-written position with chosen values; the
/// remaining write budget goes to random errors on unread positions.
struct OverlapOverwrite;

impl Policy for OverlapOverwrite {
    const NAME: &'static str = "overlap_overwrite";

    fn errors(&mut self, ctx: &RoundContext, view: &RoundView, plan: &RoundPlan, rng: &mut ChaCha8Rng) -> Vec<(usize, Symbol)> {
        let mut out = Vec::new();
        for &p in &plan.overwrite {
            let current = view.seen(p).expect("overwrite positions are read first");
            let target = match ctx.layout {
                Layout::Lv { .. } | Layout::WeakAmd => amd_consistent_rewrite(ctx, current, rng),
                _ => None,
            }
            .unwrap_or_else(|| (0..ctx.u).map(|_| rng.gen_range(0..ctx.field.modulus())).collect());
            let mut e = difference(ctx.field, &target, current);
            if e.iter().all(|&v| v == 0) {
                e[0] = 1;
            }
            out.push((p, e));
        }
        for &p in &plan.blind {
            out.push((p, random_nonzero(ctx.field, ctx.u, rng)));
        }
        out
    }
}

/// Structured offsets against the MAC and AMD tags.
///
/// * MAC pairs: shifts `r_i` while leaving `beta_i`, hoping for a hash
///   collision under Bob's later `alpha_i`.
/// * LV components: adds the RS codeword of the unit message on stream 0.
///   Known components get a consistent tag; blind ones get the tag shift
///   for a guessed `r`.
/// * Weak components: shifts `s` on the read-and-written positions and
///   repairs every tag whose randomness it has read.
struct MacForger;

impl Policy for MacForger {
    const NAME: &'static str = "mac_forger";

    fn errors(&mut self, ctx: &RoundContext, view: &RoundView, plan: &RoundPlan, rng: &mut ChaCha8Rng) -> Vec<(usize, Symbol)> {
        let f = ctx.field;
        let q = f.modulus();
        let u = ctx.u;
        let mut out = Vec::new();
        match ctx.layout {
            Layout::Lv { .. } if u >= 3 => {
                let d = u - 2;
                // Delta c_i = (1, 0, ..., 0) for every i: the codeword of the
                // constant message shift. Delta t = r_i (Delta r = 0).
                for &p in &plan.overwrite {
                    let current = view.seen(p).expect("read first");
                    let mut e = vec![0u32; u];
                    e[0] = 1;
                    e[d + 1] = current[d];
                    out.push((p, e));
                }
                for &p in &plan.blind {
                    let guess = rng.gen_range(0..q);
                    let mut e = vec![0u32; u];
                    e[0] = 1;
                    e[d + 1] = guess;
                    out.push((p, e));
                }
            }
            Layout::WeakAmd if u >= 3 => {
                let d = u - 2;
                // Shift the first coordinate of every rewritten s_j by 1.
                let shifted: Vec<usize> = plan.overwrite.iter().map(|&p| p * d).collect();
                let tag_shift = |r: u32| {
                    shifted
                        .iter()
                        .fold(0u32, |acc, &k| f.add(acc, f.pow(r, k as u64 + 1)))
                };
                for &p in &plan.overwrite {
                    let current = view.seen(p).expect("read first");
                    let mut e = vec![0u32; u];
                    e[0] = 1;
                    e[d + 1] = tag_shift(current[d]);
                    out.push((p, e));
                }
                for &p in &plan.blind {
                    let mut e = vec![0u32; u];
                    e[d + 1] = tag_shift(rng.gen_range(0..q));
                    if e.iter().all(|&v| v == 0) {
                        e[d + 1] = 1;
                    }
                    out.push((p, e));
                }
            }
            _ => {
                // MAC pairs (and anything opaque): perturb the r-part only.
                for &p in plan.overwrite.iter().chain(&plan.blind) {
                    let mut e = vec![0u32; u];
                    let span = u.saturating_sub(1).max(1);
                    e[rng.gen_range(0..span)] = rng.gen_range(1..q);
                    out.push((p, e));
                }
            }
        }
        out
    }
}
