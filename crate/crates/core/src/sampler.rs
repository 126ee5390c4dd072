//! Sources of uniform field elements.
//!
//! Protocols draw every random value through a [`FieldSampler`] in a fixed
//! order, so the same code path serves seeded simulation ([`RngSampler`]) and
//! exhaustive enumeration of the whole randomness space ([`ScriptedSampler`]).

use rand::{Rng, RngCore};

use crate::gf::Field;

pub trait FieldSampler {
    /// A uniform element of `field`.
    fn draw(&mut self, field: Field) -> u32;

    fn draw_vec(&mut self, field: Field, len: usize) -> Vec<u32> {
        (0..len).map(|_| self.draw(field)).collect()
    }
}

impl<S: FieldSampler + ?Sized> FieldSampler for &mut S {
    fn draw(&mut self, field: Field) -> u32 {
        (**self).draw(field)
    }
}

/// Wraps any `rand` generator.
#[derive(Debug, Clone)]
pub struct RngSampler<R>(pub R);

impl<R: RngCore> FieldSampler for RngSampler<R> {
    fn draw(&mut self, field: Field) -> u32 {
        self.0.gen_range(0..field.modulus())
    }
}

/// Replays a fixed script of values; past the end it yields zeros.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSampler {
    script: Vec<u32>,
    pos: usize,
}

impl ScriptedSampler {
    pub fn new(script: Vec<u32>) -> Self {
        ScriptedSampler { script, pos: 0 }
    }

    /// Number of draws consumed so far.
    pub fn consumed(&self) -> usize {
        self.pos
    }
}

impl FieldSampler for ScriptedSampler {
    fn draw(&mut self, field: Field) -> u32 {
        let v = self.script.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        v % field.modulus()
    }
}
