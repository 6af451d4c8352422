use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Network;

/// One composed snapshot: a location per process, every variable slot
/// (globals first, then each process's locals) and every clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemState {
    pub locations: Vec<usize>,
    pub vars: Vec<i64>,
    pub clocks: Vec<i64>,
}

/// Canonical fixed-width byte encoding of a [`SystemState`], used as the
/// visited-set key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub Box<[u8]>);

impl StateKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("key has {found} bytes, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("{what} value {value} out of range")]
    OutOfRange { what: String, value: i64 },
}

fn width(span: u64) -> usize {
    match span {
        0..=0xff => 1,
        0x100..=0xffff => 2,
        0x1_0000..=0xffff_ffff => 4,
        _ => 8,
    }
}

fn put(out: &mut Vec<u8>, v: u64, w: usize) {
    out.extend_from_slice(&v.to_le_bytes()[..w]);
}

fn get(bytes: &[u8], pos: &mut usize, w: usize) -> u64 {
    let mut buf = [0u8; 8];
    buf[..w].copy_from_slice(&bytes[*pos..*pos + w]);
    *pos += w;
    u64::from_le_bytes(buf)
}

impl Network {
    fn loc_width(&self, pid: usize) -> usize {
        width(self.processes[pid].locations.len() as u64 - 1)
    }

    fn var_width(&self, slot: usize) -> usize {
        let r = self.var_slots[slot].range;
        width(r.hi.abs_diff(r.lo))
    }

    fn clock_width(&self, clock: usize) -> usize {
        width(self.clock_slots[clock].ceiling as u64)
    }

    /// Byte width of every key for this network.
    pub fn key_width(&self) -> usize {
        (0..self.processes.len()).map(|p| self.loc_width(p)).sum::<usize>()
            + (0..self.var_slots.len()).map(|s| self.var_width(s)).sum::<usize>()
            + (0..self.clock_slots.len()).map(|c| self.clock_width(c)).sum::<usize>()
    }

    /// Encodes a state. Values are stored as offsets from each slot's lower
    /// bound, so the state must respect the declared ranges.
    pub fn encode(&self, s: &SystemState) -> StateKey {
        let mut out = Vec::with_capacity(self.key_width());
        for (p, &l) in s.locations.iter().enumerate() {
            put(&mut out, l as u64, self.loc_width(p));
        }
        for (slot, &v) in s.vars.iter().enumerate() {
            let lo = self.var_slots[slot].range.lo;
            put(&mut out, v.wrapping_sub(lo) as u64, self.var_width(slot));
        }
        for (c, &v) in s.clocks.iter().enumerate() {
            put(&mut out, v as u64, self.clock_width(c));
        }
        StateKey(out.into_boxed_slice())
    }

    pub fn decode(&self, key: &StateKey) -> Result<SystemState, DecodeError> {
        let bytes = key.as_bytes();
        let expected = self.key_width();
        if bytes.len() != expected {
            return Err(DecodeError::Length { expected, found: bytes.len() });
        }
        let mut pos = 0;
        let mut locations = Vec::with_capacity(self.processes.len());
        for p in 0..self.processes.len() {
            let l = get(bytes, &mut pos, self.loc_width(p));
            if l as usize >= self.processes[p].locations.len() {
                return Err(DecodeError::OutOfRange {
                    what: format!("{} location", self.processes[p].name),
                    value: l as i64,
                });
            }
            locations.push(l as usize);
        }
        let mut vars = Vec::with_capacity(self.var_slots.len());
        for slot in 0..self.var_slots.len() {
            let info = &self.var_slots[slot];
            let off = get(bytes, &mut pos, self.var_width(slot));
            let v = info.range.lo.wrapping_add(off as i64);
            if off > info.range.hi.abs_diff(info.range.lo) {
                return Err(DecodeError::OutOfRange { what: info.name.clone(), value: v });
            }
            vars.push(v);
        }
        let mut clocks = Vec::with_capacity(self.clock_slots.len());
        for c in 0..self.clock_slots.len() {
            let v = get(bytes, &mut pos, self.clock_width(c)) as i64;
            if v > self.clock_slots[c].ceiling {
                return Err(DecodeError::OutOfRange { what: self.clock_slots[c].name.clone(), value: v });
            }
            clocks.push(v);
        }
        Ok(SystemState { locations, vars, clocks })
    }

    /// Whether `s` has this network's shape and every component lies in
    /// its declared range.
    pub fn is_valid_state(&self, s: &SystemState) -> bool {
        s.locations.len() == self.processes.len()
            && s.vars.len() == self.var_slots.len()
            && s.clocks.len() == self.clock_slots.len()
            && s.locations.iter().enumerate().all(|(p, &l)| l < self.processes[p].locations.len())
            && s.vars.iter().enumerate().all(|(k, &v)| self.var_slots[k].range.contains(v))
            && s.clocks.iter().enumerate().all(|(c, &v)| (0..=self.clock_slots[c].ceiling).contains(&v))
    }

    /// Named rendering of a state, independent of slot layout.
    pub fn view(&self, s: &SystemState) -> StateView {
        StateView {
            locations: s
                .locations
                .iter()
                .enumerate()
                .map(|(p, &l)| (self.processes[p].name.clone(), self.location_name(p, l).to_string()))
                .collect(),
            variables: s.vars.iter().enumerate().map(|(slot, &v)| (self.var_slots[slot].name.clone(), v)).collect(),
            clocks: s.clocks.iter().enumerate().map(|(c, &v)| (self.clock_slots[c].name.clone(), v)).collect(),
        }
    }
}

/// A state keyed by names: process name to location, `Proc.var` / global
/// element names to values, `Proc.clock` to clock values.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateView {
    pub locations: BTreeMap<String, String>,
    pub variables: BTreeMap<String, i64>,
    pub clocks: BTreeMap<String, i64>,
}

impl StateView {
    /// Human-readable differences from `before` to `self`, in key order.
    pub fn diff(&self, before: &StateView) -> Vec<String> {
        let mut out = Vec::new();
        for (p, loc) in &self.locations {
            match before.locations.get(p) {
                Some(old) if old == loc => {}
                Some(old) => out.push(format!("{p}: {old} -> {loc}")),
                None => out.push(format!("{p}: {loc}")),
            }
        }
        for (map, old_map) in [(&self.variables, &before.variables), (&self.clocks, &before.clocks)] {
            for (k, v) in map {
                match old_map.get(k) {
                    Some(old) if old == v => {}
                    Some(old) => out.push(format!("{k}: {old} -> {v}")),
                    None => out.push(format!("{k}: {v}")),
                }
            }
        }
        out
    }
}
