//! Resource accounting for windowed versus standard phase estimation.
//!
//! Costs of `U` itself stay abstract: applications are counted, depths are
//! reported in units of the depth of one controlled-`U`. The inverse QFT on
//! `m` qubits is `m` Hadamards, `m(m-1)/2` controlled rotations and
//! `floor(m/2)` swaps (the decomposition the statevector simulator runs).

use std::fmt::Write as _;

use serde::Serialize;

use crate::binary::MAX_TOTAL_BITS;
use crate::error::{AwqpeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Circuit {
    /// 1-based block index.
    Block(usize),
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IqftCount {
    pub hadamards: u64,
    pub rotations: u64,
    pub swaps: u64,
}

impl IqftCount {
    pub fn for_width(m: u32) -> Self {
        let m = m as u64;
        IqftCount {
            hadamards: m,
            rotations: m * m.saturating_sub(1) / 2,
            swaps: m / 2,
        }
    }

    pub fn total(&self) -> u64 {
        self.hadamards + self.rotations + self.swaps
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitResources {
    /// `"standard"` or the 1-based block number.
    pub label: String,
    pub start_bit: u32,
    pub control_qubits: u32,
    pub u_applications: u64,
    pub iqft: IqftCount,
    /// Exponent `e` of the dominant controlled power, `U^(2^e)`.
    pub depth_exponent: u32,
    /// `2^e`: depth of the deepest controlled power in units of depth(U).
    pub depth_dominant: u64,
    /// Depth of all controlled powers run back to back; equals the number
    /// of `U` applications.
    pub depth_sequential: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub m_list: Vec<u32>,
    pub blocks: Vec<CircuitResources>,
    pub standard: CircuitResources,
    pub total_u_applications: u64,
    pub max_control_qubits: u32,
}

fn check_m_list(m_list: &[u32]) -> Result<u32> {
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(AwqpeError::Config(format!("invalid window list {m_list:?}")));
    }
    let n: u32 = m_list.iter().sum();
    if n > MAX_TOTAL_BITS {
        return Err(AwqpeError::Config(format!("{n} total bits exceeds {MAX_TOTAL_BITS}")));
    }
    Ok(n)
}

fn circuit(label: String, start_bit: u32, m: u32) -> CircuitResources {
    // sum_{p<m} 2^(k+p) = 2^k (2^m - 1); fits because k + m <= 64
    let apps = ((1u128 << start_bit) * ((1u128 << m) - 1)) as u64;
    let exponent = start_bit + m - 1;
    CircuitResources {
        label,
        start_bit,
        control_qubits: m,
        u_applications: apps,
        iqft: IqftCount::for_width(m),
        depth_exponent: exponent,
        depth_dominant: 1u64 << exponent,
        depth_sequential: apps,
    }
}

/// Applications of `U` in one block, or in the standard circuit of width `sum m_i`.
pub fn u_applications(m_list: &[u32], which: Circuit) -> Result<u64> {
    let n = check_m_list(m_list)?;
    match which {
        Circuit::Standard => Ok(circuit("standard".into(), 0, n).u_applications),
        Circuit::Block(i) => {
            if i == 0 || i > m_list.len() {
                return Err(AwqpeError::Config(format!("block {i} out of range")));
            }
            let k = m_list[..i - 1].iter().sum();
            Ok(circuit(i.to_string(), k, m_list[i - 1]).u_applications)
        }
    }
}

pub fn report(m_list: &[u32]) -> Result<ResourceReport> {
    let n = check_m_list(m_list)?;
    let mut k = 0;
    let blocks: Vec<CircuitResources> = m_list
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let c = circuit((i + 1).to_string(), k, m);
            k += m;
            c
        })
        .collect();
    Ok(ResourceReport {
        m_list: m_list.to_vec(),
        total_u_applications: blocks.iter().map(|b| b.u_applications).sum(),
        max_control_qubits: *m_list.iter().max().expect("non-empty"),
        blocks,
        standard: circuit("standard".into(), 0, n),
    })
}

const COLUMNS: [&str; 9] = [
    "circuit",
    "start_bit",
    "control_qubits",
    "u_applications",
    "iqft_h",
    "iqft_cp",
    "iqft_swap",
    "depth_dominant",
    "depth_sequential",
];

fn row(c: &CircuitResources) -> [String; 9] {
    [
        c.label.clone(),
        c.start_bit.to_string(),
        c.control_qubits.to_string(),
        c.u_applications.to_string(),
        c.iqft.hadamards.to_string(),
        c.iqft.rotations.to_string(),
        c.iqft.swaps.to_string(),
        format!("2^{}", c.depth_exponent),
        c.depth_sequential.to_string(),
    ]
}

impl ResourceReport {
    fn rows(&self) -> Vec<[String; 9]> {
        let mut rows: Vec<_> = self.blocks.iter().map(row).collect();
        let mut total = row(&self.standard);
        total[0] = "total(blocks)".into();
        total[1] = "-".into();
        total[2] = format!("max {}", self.max_control_qubits);
        total[3] = self.total_u_applications.to_string();
        for cell in &mut total[4..] {
            *cell = "-".into();
        }
        rows.push(total);
        rows.push(row(&self.standard));
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for r in self.rows() {
            w.write_record(&r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn to_text(&self) -> String {
        let rows = self.rows();
        let widths: Vec<usize> = (0..COLUMNS.len())
            .map(|c| rows.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(COLUMNS.to_vec(), &mut out);
        for r in &rows {
            line(r.iter().map(String::as_str).collect(), &mut out);
        }
        out
    }
}

/// Plain-text gate listing of the window circuit that starts at bit `k`.
pub fn circuit_summary(k: u32, m: u32, target_qubits: u32) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "window k={k} m={m}: {m} control + {target_qubits} target qubits"
    );
    let _ = writeln!(s, "  prepare target in eigenstate |u>");
    let _ = writeln!(s, "  H on c0..c{}", m - 1);
    for p in 0..m {
        let _ = writeln!(s, "  c{p} controls U^(2^{})", k + p);
    }
    let iqft = IqftCount::for_width(m);
    let _ = writeln!(
        s,
        "  IQFT: {} swaps, {} controlled phases, {} H",
        iqft.swaps, iqft.rotations, iqft.hadamards
    );
    let _ = writeln!(s, "  measure c0..c{} (c_p has weight 2^p)", m - 1);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walkthrough_blocks() {
        let m = [3, 2, 3];
        let apps: Vec<u64> = (1..=3).map(|i| u_applications(&m, Circuit::Block(i)).unwrap()).collect();
        assert_eq!(apps, vec![7, 24, 224]);
        assert_eq!(apps.iter().sum::<u64>(), 255);
        assert_eq!(u_applications(&[8], Circuit::Standard).unwrap(), 255);
        assert_eq!(u_applications(&m, Circuit::Standard).unwrap(), 255);
        assert!(u_applications(&m, Circuit::Block(4)).is_err());
        assert!(u_applications(&m, Circuit::Block(0)).is_err());
    }

    #[test]
    fn report_columns() {
        let r = report(&[3, 2, 3]).unwrap();
        let qubits: Vec<u32> = r.blocks.iter().map(|b| b.control_qubits).collect();
        assert_eq!(qubits, vec![3, 2, 3]);
        assert_eq!(r.max_control_qubits, 3);
        assert_eq!(r.standard.control_qubits, 8);
        let exps: Vec<u32> = r.blocks.iter().map(|b| b.depth_exponent).collect();
        assert_eq!(exps, vec![2, 4, 7]);
        assert_eq!(r.total_u_applications, 255);
    }

    #[test]
    fn single_block_is_standard() {
        let r = report(&[8]).unwrap();
        let mut block = r.blocks[0].clone();
        block.label = "standard".into();
        assert_eq!(block, r.standard);
    }

    #[test]
    fn iqft_counts() {
        assert_eq!(
            IqftCount::for_width(3),
            IqftCount {
                hadamards: 3,
                rotations: 3,
                swaps: 1
            }
        );
        assert_eq!(IqftCount::for_width(1).total(), 1);
    }

    #[test]
    fn conservation_for_all_compositions_to_16() {
        for n in 1..=16u32 {
            // each composition of n <-> a subset of the n-1 cut points
            for mask in 0u32..(1 << (n - 1)) {
                let mut parts = vec![];
                let mut run = 1;
                for cut in 0..n - 1 {
                    if mask & (1 << cut) != 0 {
                        parts.push(run);
                        run = 1;
                    } else {
                        run += 1;
                    }
                }
                parts.push(run);
                let r = report(&parts).unwrap();
                assert_eq!(r.total_u_applications, (1u64 << n) - 1);
                let deepest = r.blocks.iter().map(|b| b.depth_sequential).max().unwrap();
                assert!(deepest <= r.standard.depth_sequential);
                assert_eq!(deepest == r.standard.depth_sequential, parts.len() == 1);
                assert!(r.blocks.iter().all(|b| b.depth_dominant <= r.standard.depth_dominant));
            }
        }
    }

    #[test]
    fn renders_tables() {
        let r = report(&[3, 2, 3]).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("circuit,start_bit,control_qubits,u_applications"));
        assert!(csv.contains("\n1,0,3,7,3,3,1,2^2,7\n"));
        assert!(csv.contains("total(blocks),-,max 3,255"));
        assert!(csv.contains("standard,0,8,255,8,28,4,2^7,255"));
        let text = r.to_text();
        assert_eq!(text.lines().count(), 1 + 3 + 2);
    }

    #[test]
    fn summary_lists_powers() {
        let s = circuit_summary(3, 2, 1);
        assert!(s.contains("c0 controls U^(2^3)"));
        assert!(s.contains("c1 controls U^(2^4)"));
    }
}
