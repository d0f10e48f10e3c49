//! Controlled-U applications, qubit counts and depth for a window split,
//! next to the single-register circuit, plus the gate listing of each block.
//!
//! `cargo run --example resources -- [m1,m2,...]`

use awqpe::resources::{circuit_summary, report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m_list: Vec<u32> = match std::env::args().nth(1) {
        Some(s) => s.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => vec![3, 2, 3],
    };
    print!("{}", report(&m_list)?.to_text());
    let mut k = 0;
    for &m in &m_list {
        println!();
        print!("{}", circuit_summary(k, m, 1));
        k += m;
    }
    Ok(())
}
