//! Transmitter architecture taxonomy and per-architecture dimensions.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The seven compared transmitter architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArchitectureKind {
    /// DMA-only: one RF chain feeding a single DMA, no phase shifters.
    Do,
    /// DMA-digital hybrid: one DMA per RF chain, digital precoding only.
    Dh,
    /// Tri-hybrid: digital + analog + DMA stages.
    Th,
    /// Fully-analog: one RF chain and per-antenna phase shifters.
    A,
    /// Partially-connected hybrid: one phase-shifter subarray per chain.
    Hp,
    /// Fully-connected hybrid: every chain reaches every antenna.
    Hf,
    /// Fully-digital: one RF chain per antenna.
    Fd,
}

impl ArchitectureKind {
    pub const ALL: [ArchitectureKind; 7] = [
        ArchitectureKind::Do,
        ArchitectureKind::Dh,
        ArchitectureKind::Th,
        ArchitectureKind::A,
        ArchitectureKind::Hp,
        ArchitectureKind::Hf,
        ArchitectureKind::Fd,
    ];

    /// Short uppercase label used in configs and result files.
    pub fn label(&self) -> &'static str {
        match self {
            ArchitectureKind::Do => "DO",
            ArchitectureKind::Dh => "DH",
            ArchitectureKind::Th => "TH",
            ArchitectureKind::A => "A",
            ArchitectureKind::Hp => "HP",
            ArchitectureKind::Hf => "HF",
            ArchitectureKind::Fd => "FD",
        }
    }

    /// True for the architectures with an electromagnetic (DMA) stage.
    pub fn uses_dma(&self) -> bool {
        matches!(
            self,
            ArchitectureKind::Do | ArchitectureKind::Dh | ArchitectureKind::Th
        )
    }
}

impl fmt::Display for ArchitectureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ArchitectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DO" => Ok(ArchitectureKind::Do),
            "DH" => Ok(ArchitectureKind::Dh),
            "TH" => Ok(ArchitectureKind::Th),
            "A" => Ok(ArchitectureKind::A),
            "HP" => Ok(ArchitectureKind::Hp),
            "HF" => Ok(ArchitectureKind::Hf),
            "FD" => Ok(ArchitectureKind::Fd),
            other => Err(Error::Config(format!(
                "unknown architecture '{other}' (expected one of DO, DH, TH, A, HP, HF, FD)"
            ))),
        }
    }
}

/// Dimension parameters of one architecture instance.
///
/// `n_t` counts antenna ports (feeds for DMA architectures), `n_rf` the
/// RF chains, `n_uc` the unit cells per DMA, `m_dma` the DMAs per feed,
/// and `n_s` the spatial streams. For architectures without a DMA stage
/// `n_uc` and `m_dma` are 1 by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchitectureSpec {
    pub kind: ArchitectureKind,
    pub n_t: usize,
    pub n_rf: usize,
    pub n_uc: usize,
    pub m_dma: usize,
    pub n_s: usize,
}

impl ArchitectureSpec {
    pub fn new(
        kind: ArchitectureKind,
        n_t: usize,
        n_rf: usize,
        n_uc: usize,
        m_dma: usize,
        n_s: usize,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            n_t,
            n_rf,
            n_uc,
            m_dma,
            n_s,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t == 0 || self.n_rf == 0 || self.n_uc == 0 || self.m_dma == 0 || self.n_s == 0 {
            return Err(Error::InvalidDimension(format!(
                "{}: all counts must be at least 1",
                self.kind
            )));
        }
        let fail = |msg: String| Err(Error::InvalidDimension(format!("{}: {msg}", self.kind)));
        match self.kind {
            ArchitectureKind::Do => {
                if self.n_rf != 1 || self.n_t != 1 {
                    return fail("single feed and single RF chain required".into());
                }
                if self.m_dma != 1 {
                    return fail("one DMA total".into());
                }
            }
            ArchitectureKind::Dh => {
                if self.n_t != self.n_rf {
                    return fail("one DMA per RF chain".into());
                }
                if self.m_dma != 1 {
                    return fail("one DMA per feed".into());
                }
            }
            ArchitectureKind::Th => {
                if self.n_t % self.n_rf != 0 {
                    return fail(format!(
                        "n_t = {} not divisible by n_rf = {}",
                        self.n_t, self.n_rf
                    ));
                }
            }
            ArchitectureKind::A => {
                if self.n_rf != 1 {
                    return fail("single RF chain required".into());
                }
            }
            ArchitectureKind::Hp => {
                if self.n_t % self.n_rf != 0 {
                    return fail(format!(
                        "n_t = {} not divisible by n_rf = {}",
                        self.n_t, self.n_rf
                    ));
                }
            }
            ArchitectureKind::Hf => {
                if self.n_rf > self.n_t {
                    return fail("more RF chains than antennas".into());
                }
            }
            ArchitectureKind::Fd => {
                if self.n_rf != self.n_t {
                    return fail("one RF chain per antenna required".into());
                }
            }
        }
        if self.n_s > self.n_rf {
            return fail(format!(
                "n_s = {} exceeds RF chain count {}",
                self.n_s, self.n_rf
            ));
        }
        Ok(())
    }

    /// Radiating element count: unit cells for DMA architectures,
    /// antennas otherwise.
    pub fn radiating_elements(&self) -> usize {
        match self.kind {
            ArchitectureKind::Do => self.n_uc,
            ArchitectureKind::Dh => self.n_t * self.n_uc,
            ArchitectureKind::Th => self.n_t * self.m_dma * self.n_uc,
            _ => self.n_t,
        }
    }

    /// Phase shifter count, following the architecture table (the
    /// fully-connected hybrid carries one shifter per antenna per chain).
    pub fn phase_shifters(&self) -> usize {
        match self.kind {
            ArchitectureKind::Th | ArchitectureKind::A | ArchitectureKind::Hp => self.n_t,
            ArchitectureKind::Hf => self.n_t * self.n_rf,
            ArchitectureKind::Do | ArchitectureKind::Dh | ArchitectureKind::Fd => 0,
        }
    }

    /// Slots driven by one feed, for DMA architectures.
    pub fn slots_per_feed(&self) -> usize {
        self.m_dma * self.n_uc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for kind in ArchitectureKind::ALL {
            assert_eq!(kind.label().parse::<ArchitectureKind>().unwrap(), kind);
        }
        assert!("XX".parse::<ArchitectureKind>().is_err());
        assert_eq!("th".parse::<ArchitectureKind>().unwrap(), ArchitectureKind::Th);
    }

    #[test]
    fn table_constraints_are_enforced() {
        assert!(ArchitectureSpec::new(ArchitectureKind::Do, 1, 1, 64, 1, 1).is_ok());
        assert!(ArchitectureSpec::new(ArchitectureKind::Do, 2, 1, 64, 1, 1).is_err());
        assert!(ArchitectureSpec::new(ArchitectureKind::Fd, 8, 8, 1, 1, 2).is_ok());
        assert!(ArchitectureSpec::new(ArchitectureKind::Fd, 8, 4, 1, 1, 2).is_err());
        assert!(ArchitectureSpec::new(ArchitectureKind::Hp, 8, 3, 1, 1, 2).is_err());
        assert!(ArchitectureSpec::new(ArchitectureKind::A, 8, 1, 1, 1, 1).is_ok());
        assert!(ArchitectureSpec::new(ArchitectureKind::Th, 2, 2, 16, 2, 2).is_ok());
        // more streams than chains
        assert!(ArchitectureSpec::new(ArchitectureKind::Dh, 2, 2, 32, 1, 3).is_err());
    }

    #[test]
    fn radiating_element_counts_match_table() {
        let th = ArchitectureSpec::new(ArchitectureKind::Th, 2, 2, 16, 2, 2).unwrap();
        assert_eq!(th.radiating_elements(), 64);
        let fd = ArchitectureSpec::new(ArchitectureKind::Fd, 64, 64, 1, 1, 2).unwrap();
        assert_eq!(fd.radiating_elements(), 64);
        let do_ = ArchitectureSpec::new(ArchitectureKind::Do, 1, 1, 1, 1, 1).unwrap();
        assert_eq!(do_.radiating_elements(), 1);
        let dh = ArchitectureSpec::new(ArchitectureKind::Dh, 2, 2, 32, 1, 2).unwrap();
        assert_eq!(dh.radiating_elements(), 64);
    }

    #[test]
    fn phase_shifter_counts_match_table() {
        let hf = ArchitectureSpec::new(ArchitectureKind::Hf, 64, 4, 1, 1, 2).unwrap();
        assert_eq!(hf.phase_shifters(), 256);
        let hp = ArchitectureSpec::new(ArchitectureKind::Hp, 64, 4, 1, 1, 2).unwrap();
        assert_eq!(hp.phase_shifters(), 64);
        let fd = ArchitectureSpec::new(ArchitectureKind::Fd, 64, 64, 1, 1, 2).unwrap();
        assert_eq!(fd.phase_shifters(), 0);
    }
}
