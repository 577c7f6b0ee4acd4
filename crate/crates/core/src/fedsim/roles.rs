//! Participant roles and roster construction.

use super::ledger::Party;
use super::FedsimError;
use crate::o3m::DimPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleKind {
    ActiveParticipant,
    PassiveParticipant,
    PrivacyMaskGenerator,
}

/// Who generates and distributes the mask: a standalone third party
/// (default), or one of the passive participants flagged for the job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PmgMode {
    #[default]
    ThirdParty,
    /// 1-based participant index; must be a passive participant (the mask
    /// generator is assumed never to collude with the active participant,
    /// so participant 1 is not eligible).
    Participant(usize),
}

/// One simulated party. Feature-holding participants carry their slice
/// width; a standalone mask generator holds no features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipantRole {
    pub kind: RoleKind,
    /// Party index: participants are `1..=M`, a standalone generator is 0.
    pub index: usize,
    pub local_dim: Option<usize>,
    /// Whether this party generates and distributes the mask.
    pub generates_mask: bool,
}

/// Build the roster for a partition: participant 1 is the single active
/// participant, the rest are passive, and exactly one party carries the
/// mask-generator flag.
pub fn build_roster(
    partition: &DimPartition,
    pmg: PmgMode,
) -> Result<Vec<ParticipantRole>, FedsimError> {
    let m = partition.participants();
    if let PmgMode::Participant(j) = pmg {
        if j < 2 || j > m {
            return Err(FedsimError::InvalidPmg {
                index: j,
                participants: m,
            });
        }
    }
    let mut roster = Vec::with_capacity(m + 1);
    if pmg == PmgMode::ThirdParty {
        roster.push(ParticipantRole {
            kind: RoleKind::PrivacyMaskGenerator,
            index: 0,
            local_dim: None,
            generates_mask: true,
        });
    }
    for (pos, &dj) in partition.parts().iter().enumerate() {
        let index = pos + 1;
        roster.push(ParticipantRole {
            kind: if index == 1 {
                RoleKind::ActiveParticipant
            } else {
                RoleKind::PassiveParticipant
            },
            index,
            local_dim: Some(dj),
            generates_mask: pmg == PmgMode::Participant(index),
        });
    }
    debug_assert_eq!(
        roster.iter().filter(|r| r.generates_mask).count(),
        1,
        "exactly one mask generator"
    );
    Ok(roster)
}

/// The ledger address of the mask generator under `pmg`.
pub fn pmg_party(pmg: PmgMode) -> Party {
    match pmg {
        PmgMode::ThirdParty => Party::Pmg,
        PmgMode::Participant(j) => Party::Participant(j),
    }
}
