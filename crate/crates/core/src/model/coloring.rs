use alloc::vec;
use alloc::vec::Vec;

use super::{ColorId, ModelError, Vertex};
use crate::gen::GeneratorSpec;
use crate::math::{ceil_log2, choose3, triple_rank};

pub const MAX_COLORS: u32 = 16;
/// Largest vertex count whose triple ranks fit in a `u64`.
pub const MAX_VERTICES: u32 = 1 << 21;

/// Colors packed at `ceil(log2 l)` bits each, in colex rank order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedColors {
    bits: u32,
    len: u64,
    words: Vec<u64>,
}

impl PackedColors {
    pub fn zeroed(colors: u32, len: u64) -> Self {
        let bits = ceil_log2(colors as u64);
        let n_words = (len * bits as u64).div_ceil(64) as usize;
        PackedColors { bits, len, words: vec![0; n_words] }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn get(&self, rank: u64) -> u8 {
        if self.bits == 0 {
            return 0;
        }
        let pos = rank * self.bits as u64;
        let (w, off) = ((pos / 64) as usize, (pos % 64) as u32);
        let mask = (1u64 << self.bits) - 1;
        let mut v = self.words[w] >> off;
        if off + self.bits > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        (v & mask) as u8
    }

    #[inline]
    pub fn set(&mut self, rank: u64, color: u8) {
        if self.bits == 0 {
            return;
        }
        let pos = rank * self.bits as u64;
        let (w, off) = ((pos / 64) as usize, (pos % 64) as u32);
        let mask = (1u64 << self.bits) - 1;
        let value = color as u64 & mask;
        self.words[w] = (self.words[w] & !(mask << off)) | (value << off);
        if off + self.bits > 64 {
            let spill = 64 - off;
            self.words[w + 1] = (self.words[w + 1] & !(mask >> spill)) | (value >> spill);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backing {
    Explicit(PackedColors),
    Implicit(GeneratorSpec),
}

/// An ℓ-coloring of all triples of `{0, .., N-1}`.
///
/// Colorings are immutable once built. Implicit colorings are pure functions of
/// their generator spec and evaluate without storage, which is what makes large
/// vertex counts usable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleColoring {
    n: u32,
    colors: u32,
    backing: Backing,
}

fn check_dims(n: u64, colors: u32) -> Result<(), ModelError> {
    if colors == 0 || colors > MAX_COLORS {
        return Err(ModelError::ColorCount { colors, max: MAX_COLORS });
    }
    if !(3..=MAX_VERTICES as u64).contains(&n) {
        return Err(ModelError::VertexCount { n, max: MAX_VERTICES });
    }
    Ok(())
}

impl TripleColoring {
    /// An implicit coloring evaluated through `spec`.
    pub fn implicit(n: u32, colors: u32, spec: GeneratorSpec) -> Result<Self, ModelError> {
        check_dims(n as u64, colors)?;
        spec.validate(n, colors)?;
        Ok(TripleColoring { n, colors, backing: Backing::Implicit(spec) })
    }

    pub fn constant(n: u32, colors: u32, color: ColorId) -> Result<Self, ModelError> {
        Self::implicit(n, colors, GeneratorSpec::constant(color))
    }

    /// An explicit coloring from colors listed in colex rank order.
    pub fn explicit(n: u32, colors: u32, by_rank: &[ColorId]) -> Result<Self, ModelError> {
        check_dims(n as u64, colors)?;
        let expected = choose3(n as u64);
        if by_rank.len() as u64 != expected {
            return Err(ModelError::PayloadLength { expected, got: by_rank.len() as u64 });
        }
        let mut packed = PackedColors::zeroed(colors, expected);
        for (rank, &c) in by_rank.iter().enumerate() {
            if c.0 as u32 >= colors {
                return Err(ModelError::ColorOutOfRange { color: c.0 as u32, colors });
            }
            packed.set(rank as u64, c.0);
        }
        Ok(TripleColoring { n, colors, backing: Backing::Explicit(packed) })
    }

    /// Wraps an already packed payload.
    pub fn from_packed(n: u32, colors: u32, packed: PackedColors) -> Result<Self, ModelError> {
        check_dims(n as u64, colors)?;
        let expected = choose3(n as u64);
        if packed.len() != expected {
            return Err(ModelError::PayloadLength { expected, got: packed.len() });
        }
        if packed.bits() != ceil_log2(colors as u64) {
            return Err(ModelError::PayloadLength { expected, got: packed.len() });
        }
        Ok(TripleColoring { n, colors, backing: Backing::Explicit(packed) })
    }

    /// Explicit copy of this coloring, with every triple evaluated once.
    pub fn materialize(&self) -> Result<Self, ModelError> {
        let triples = choose3(self.n as u64);
        let bytes = triples.saturating_mul(ceil_log2(self.colors as u64) as u64) / 8;
        if bytes > (isize::MAX as u64) / 2 || triples > (1 << 40) {
            return Err(ModelError::TooLarge { triples });
        }
        let mut packed = PackedColors::zeroed(self.colors, triples);
        let mut rank = 0u64;
        for k in 2..self.n {
            for j in 1..k {
                for i in 0..j {
                    packed.set(rank, self.color_sorted(i, j, k).0);
                    rank += 1;
                }
            }
        }
        Ok(TripleColoring { n: self.n, colors: self.colors, backing: Backing::Explicit(packed) })
    }

    /// Copy with the color of one triple replaced; materializes implicit colorings.
    pub fn with_recolored(&self, triple: [Vertex; 3], color: ColorId) -> Result<Self, ModelError> {
        let [i, j, k] = self.sorted_checked(triple[0], triple[1], triple[2])?;
        if color.0 as u32 >= self.colors {
            return Err(ModelError::ColorOutOfRange { color: color.0 as u32, colors: self.colors });
        }
        let mut out = match self.backing {
            Backing::Explicit(_) => self.clone(),
            Backing::Implicit(_) => self.materialize()?,
        };
        if let Backing::Explicit(ref mut packed) = out.backing {
            packed.set(triple_rank(i, j, k), color.0);
        }
        Ok(out)
    }

    pub fn n_vertices(&self) -> u32 {
        self.n
    }

    pub fn n_colors(&self) -> u32 {
        self.colors
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    pub fn generator(&self) -> Option<&GeneratorSpec> {
        match &self.backing {
            Backing::Implicit(spec) => Some(spec),
            Backing::Explicit(_) => None,
        }
    }

    fn sorted_checked(&self, a: Vertex, b: Vertex, c: Vertex) -> Result<[Vertex; 3], ModelError> {
        for v in [a, b, c] {
            if v >= self.n {
                return Err(ModelError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let mut t = [a, b, c];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            return Err(ModelError::RepeatedVertex { vertex: t[1] });
        }
        Ok(t)
    }

    /// Color of the triple `{i, j, k}` in any order.
    pub fn color_of(&self, i: Vertex, j: Vertex, k: Vertex) -> Result<ColorId, ModelError> {
        let [a, b, c] = self.sorted_checked(i, j, k)?;
        Ok(self.color_sorted(a, b, c))
    }

    /// Unchecked lookup for distinct in-range vertices given in any order.
    #[inline]
    pub fn color_unordered(&self, a: Vertex, b: Vertex, c: Vertex) -> ColorId {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let (b, c) = if b < c { (b, c) } else { (c, b) };
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.color_sorted(a, b, c)
    }

    /// Unchecked lookup for `i < j < k < N`.
    #[inline]
    pub fn color_sorted(&self, i: Vertex, j: Vertex, k: Vertex) -> ColorId {
        debug_assert!(i < j && j < k && k < self.n);
        match &self.backing {
            Backing::Explicit(packed) => ColorId(packed.get(triple_rank(i, j, k))),
            Backing::Implicit(spec) => spec.evaluate(self.colors, i, j, k),
        }
    }
}
