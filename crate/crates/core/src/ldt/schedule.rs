use serde::Serialize;

use super::LdtError;

/// The five named rounds of a transmission block, in the order they are processed when
/// several fall on the same round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    DownReceive,
    DownSend,
    Side,
    UpReceive,
    UpSend,
}

impl Slot {
    pub const ALL: [Slot; 5] =
        [Slot::DownReceive, Slot::DownSend, Slot::Side, Slot::UpReceive, Slot::UpSend];
}

/// Named rounds of one node inside a block of `2n + 1` rounds starting at `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransmissionSchedule {
    pub down_receive: Option<u64>,
    pub down_send: u64,
    pub side: u64,
    pub up_receive: u64,
    pub up_send: Option<u64>,
}

impl TransmissionSchedule {
    pub fn round(&self, slot: Slot) -> Option<u64> {
        match slot {
            Slot::DownReceive => self.down_receive,
            Slot::DownSend => Some(self.down_send),
            Slot::Side => Some(self.side),
            Slot::UpReceive => Some(self.up_receive),
            Slot::UpSend => self.up_send,
        }
    }

    /// Slots that exist for this node, ordered by round and then by slot order.
    pub fn ordered(&self) -> Vec<(u64, Slot)> {
        let mut v: Vec<(u64, Slot)> =
            Slot::ALL.iter().filter_map(|&s| self.round(s).map(|r| (r, s))).collect();
        v.sort();
        v
    }
}

/// Named rounds for a node at `depth` in a block starting at `start` for trees of at most
/// `n_bound` nodes. The root has no Down-Receive and no Up-Send.
pub fn transmission_schedule(
    depth: u64,
    n_bound: u64,
    is_root: bool,
    start: u64,
) -> Result<TransmissionSchedule, LdtError> {
    if n_bound == 0 {
        return Err(LdtError::ZeroBound);
    }
    if depth > n_bound {
        return Err(LdtError::DepthTooLarge { depth, n_bound });
    }
    if is_root {
        return Ok(TransmissionSchedule {
            down_receive: None,
            down_send: start,
            side: start + n_bound,
            up_receive: start + 2 * n_bound,
            up_send: None,
        });
    }
    if depth == 0 {
        return Err(LdtError::NonRootAtDepthZero);
    }
    Ok(TransmissionSchedule {
        down_receive: Some(start + depth - 1),
        down_send: start + depth,
        side: start + n_bound,
        up_receive: start + 2 * n_bound - depth,
        up_send: Some(start + 2 * n_bound - depth + 1),
    })
}

/// Length of one block.
pub fn block_len(n_bound: u64) -> u64 {
    2 * n_bound + 1
}

/// Finds the next wanted slot group of a block strictly after round `after`, if any.
///
/// Returns the round and every wanted slot falling on it.
pub(crate) fn next_slots(
    schedule: &TransmissionSchedule,
    after: Option<u64>,
    mut wants: impl FnMut(Slot) -> bool,
) -> Option<(u64, Vec<Slot>)> {
    let mut found: Option<(u64, Vec<Slot>)> = None;
    for (round, slot) in schedule.ordered() {
        if after.is_some_and(|a| round <= a) {
            continue;
        }
        if let Some((r, slots)) = found.as_mut() {
            if round != *r {
                break;
            }
            if wants(slot) {
                slots.push(slot);
            }
            continue;
        }
        if wants(slot) {
            found = Some((round, vec![slot]));
        }
    }
    found
}
