//! Path-ORAM with a client-side position map and stash.
//!
//! The tree has height `L = ⌈log2 N⌉` and `2^L` leaves; buckets are stored in
//! heap order (root 0, children of b at 2b+1 and 2b+2) and bucket b owns slots
//! `b*Z .. b*Z+Z`. Slots are 0-based. Block ids are 1-based.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type BlockId = u32;
pub type Slot = usize;

pub const DEFAULT_Z: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OramError {
    #[error("block id {0} outside 1..={1}")]
    IdOutOfRange(BlockId, usize),
    #[error("slot {0} outside 0..{1}")]
    SlotOutOfRange(Slot, usize),
    #[error("N and Z must be at least 1")]
    Params,
}

/// One access: the path read and the write-back on the same path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessPattern {
    pub leaf: usize,
    /// `(read slot, write slot)`; read slots run root to leaf, write slots leaf to root.
    pub pairs: Vec<(Slot, Slot)>,
    /// Block found in each read slot, aligned with `pairs`.
    pub read_ids: Vec<Option<BlockId>>,
    /// Block placed in each write slot, aligned with `pairs`.
    pub write_ids: Vec<Option<BlockId>>,
    /// The accessed id had never been placed before this access.
    pub created: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OramState {
    n: usize,
    z: usize,
    height: u32,
    posmap: Vec<u32>,
    present: Vec<bool>,
    slots: Vec<Option<BlockId>>,
    stash: BTreeSet<BlockId>,
    remap: bool,
    max_stash: usize,
}

/// Tree height for `n` blocks.
pub fn height_for(n: usize) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

/// Server slot count `Z · (2^{L+1} − 1)`.
pub fn slot_count(n: usize, z: usize) -> usize {
    z * ((1usize << (height_for(n) + 1)) - 1)
}

impl OramState {
    /// Fresh state with a uniformly random position map.
    pub fn setup(n: usize, z: usize, rng: &mut impl Rng) -> Result<(OramState, usize), OramError> {
        if n == 0 || z == 0 {
            return Err(OramError::Params);
        }
        let height = height_for(n);
        let leaves = 1usize << height;
        let m = slot_count(n, z);
        let s = OramState {
            n,
            z,
            height,
            posmap: (0..n).map(|_| rng.gen_range(0..leaves) as u32).collect(),
            present: vec![false; n],
            slots: vec![None; m],
            stash: BTreeSet::new(),
            remap: true,
            max_stash: 0,
        };
        Ok((s, m))
    }

    /// Deliberately broken control: block i lives on leaf (i−1) mod 2^L forever.
    pub fn identity_control(n: usize, z: usize) -> Result<(OramState, usize), OramError> {
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        let (mut s, m) = OramState::setup(n, z, &mut rng)?;
        let leaves = s.leaves();
        s.posmap = (0..n).map(|i| (i % leaves) as u32).collect();
        s.remap = false;
        Ok((s, m))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn leaves(&self) -> usize {
        1 << self.height
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn path_len(&self) -> usize {
        self.z * (self.height as usize + 1)
    }

    pub fn stash(&self) -> &BTreeSet<BlockId> {
        &self.stash
    }

    pub fn max_stash(&self) -> usize {
        self.max_stash
    }

    pub fn leaf_of(&self, id: BlockId) -> Result<usize, OramError> {
        self.check_id(id)?;
        Ok(self.posmap[id as usize - 1] as usize)
    }

    fn check_id(&self, id: BlockId) -> Result<(), OramError> {
        if id == 0 || id as usize > self.n {
            return Err(OramError::IdOutOfRange(id, self.n));
        }
        Ok(())
    }

    /// Heap index of the bucket at `level` on the path to `leaf`.
    fn bucket(&self, leaf: usize, level: u32) -> usize {
        (1usize << level) - 1 + (leaf >> (self.height - level))
    }

    /// Slots on the path to `leaf`, root first.
    pub fn path_slots(&self, leaf: usize) -> Vec<Slot> {
        (0..=self.height)
            .flat_map(|l| {
                let b = self.bucket(leaf, l);
                b * self.z..(b + 1) * self.z
            })
            .collect()
    }

    /// Block currently assigned to `slot`, `None` for a dummy.
    pub fn get_id(&self, slot: Slot) -> Result<Option<BlockId>, OramError> {
        self.slots.get(slot).copied().ok_or(OramError::SlotOutOfRange(slot, self.slots.len()))
    }

    pub fn is_present(&self, id: BlockId) -> bool {
        self.check_id(id).is_ok() && self.present[id as usize - 1]
    }

    /// Reads the path of `id` into the stash, remaps `id`, and evicts greedily.
    pub fn gen_ap(&mut self, id: BlockId, rng: &mut impl Rng) -> Result<AccessPattern, OramError> {
        self.check_id(id)?;
        let leaf = self.posmap[id as usize - 1] as usize;
        let read_slots = self.path_slots(leaf);
        let mut read_ids = Vec::with_capacity(read_slots.len());
        for &s in &read_slots {
            let b = self.slots[s].take();
            if let Some(b) = b {
                self.stash.insert(b);
            }
            read_ids.push(b);
        }

        let created = !self.present[id as usize - 1];
        if created {
            self.present[id as usize - 1] = true;
            self.stash.insert(id);
        }
        debug_assert!(self.stash.contains(&id));
        self.max_stash = self.max_stash.max(self.stash.len());

        if self.remap {
            self.posmap[id as usize - 1] = rng.gen_range(0..self.leaves()) as u32;
        }

        let mut write_slots = Vec::with_capacity(read_slots.len());
        let mut write_ids = Vec::with_capacity(read_slots.len());
        for level in (0..=self.height).rev() {
            let shift = self.height - level;
            let b = self.bucket(leaf, level);
            let fits: Vec<BlockId> = self
                .stash
                .iter()
                .copied()
                .filter(|&x| (self.posmap[x as usize - 1] as usize) >> shift == leaf >> shift)
                .take(self.z)
                .collect();
            for x in &fits {
                self.stash.remove(x);
            }
            for k in 0..self.z {
                let s = b * self.z + k;
                let placed = fits.get(k).copied();
                self.slots[s] = placed;
                write_slots.push(s);
                write_ids.push(placed);
            }
        }

        Ok(AccessPattern {
            leaf,
            pairs: read_slots.into_iter().zip(write_slots).collect(),
            read_ids,
            write_ids,
            created,
        })
    }
}
