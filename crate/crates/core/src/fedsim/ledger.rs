//! Typed protocol messages and the communication ledger.
//!
//! Every element crossing a (from, to) edge is a 64-bit float counted as 8
//! bytes. The O3M protocol itself contributes two message kinds (mask-shard
//! delivery and masked-context delivery); the action/reward exchange with
//! the user is a separate channel, recorded in the same ledger but reported
//! apart so the protocol totals can be compared against the closed-form
//! communication model. Shard totals count all `M` participants — the
//! aggregator's own shard included — making them an upper bound for
//! deployments where the aggregator masks locally without a network hop.

use std::collections::BTreeMap;

/// Number of bytes per transferred array element.
pub const ELEMENT_BYTES: u64 = 8;

/// Addressable parties in the simulation. Participants are numbered
/// `1..=M`, participant 1 being the active participant; the mask generator
/// and the reward-emitting user sit outside that range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Party {
    Pmg,
    Participant(usize),
    User,
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Pmg => write!(f, "pmg"),
            Party::Participant(i) => write!(f, "p{i}"),
            Party::User => write!(f, "user"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageKind {
    /// One mask column block, `d x d_j` elements.
    MaskShard,
    /// One round of masked contexts from one sender, `K x d` elements.
    MaskedContext,
    /// The chosen arm, 1 element.
    Action,
    /// The realized reward, 1 element.
    Reward,
}

/// One ledgered transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub from: Party,
    pub to: Party,
    pub round: u64,
    pub elements: u64,
}

/// Monotone element/byte counters, grouped by edge, kind, and sender.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    per_pair: BTreeMap<(Party, Party), u64>,
    per_kind: BTreeMap<MessageKind, u64>,
    messages_sent: BTreeMap<Party, u64>,
    total_elements: u64,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, msg: Message) {
        *self.per_pair.entry((msg.from, msg.to)).or_insert(0) += msg.elements;
        *self.per_kind.entry(msg.kind).or_insert(0) += msg.elements;
        *self.messages_sent.entry(msg.from).or_insert(0) += 1;
        self.total_elements += msg.elements;
    }

    /// Elements sent along one (from, to) edge.
    pub fn elements_between(&self, from: Party, to: Party) -> u64 {
        self.per_pair.get(&(from, to)).copied().unwrap_or(0)
    }

    pub fn elements_of_kind(&self, kind: MessageKind) -> u64 {
        self.per_kind.get(&kind).copied().unwrap_or(0)
    }

    /// Elements attributable to the masking protocol itself (mask shards
    /// plus masked contexts); this is the quantity the closed-form
    /// communication model predicts.
    pub fn o3m_elements(&self) -> u64 {
        self.elements_of_kind(MessageKind::MaskShard)
            + self.elements_of_kind(MessageKind::MaskedContext)
    }

    pub fn o3m_bytes(&self) -> u64 {
        self.o3m_elements() * ELEMENT_BYTES
    }

    /// Every element recorded, user channel included.
    pub fn total_elements(&self) -> u64 {
        self.total_elements
    }

    pub fn total_bytes(&self) -> u64 {
        self.total_elements * ELEMENT_BYTES
    }

    /// Number of messages (not elements) a party has sent.
    pub fn messages_sent_by(&self, party: Party) -> u64 {
        self.messages_sent.get(&party).copied().unwrap_or(0)
    }

    /// Stable iteration over (from, to, elements) edges.
    pub fn edges(&self) -> impl Iterator<Item = (Party, Party, u64)> + '_ {
        self.per_pair.iter().map(|(&(f, t), &e)| (f, t, e))
    }
}
