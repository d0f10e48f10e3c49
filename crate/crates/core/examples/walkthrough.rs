//! The eight-bit example 0.8203125 with windows [3, 2, 3], window by window.
//!
//! `cargo run --example walkthrough -- [seed]`

use awqpe::harness::{estimate, walkthrough_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let (model, cfg) = walkthrough_config(seed);
    println!("phi = {}, windows {:?}, {} shots, seed {seed}", model.eigenphase(), cfg.m_list, cfg.shots);

    let (raw, resolved) = estimate(&model, &cfg)?;
    for w in &raw.windows {
        println!(
            "block {} (bits {}..{}): top {:?}, ratio {:.3} -> chunk {}{}",
            w.block,
            w.start_bit + 1,
            w.start_bit + w.width,
            w.counts.top(3),
            w.ratio,
            w.chunk,
            if w.flag_amb { " (ambiguous)" } else { "" }
        );
    }
    println!("raw   0.{}", raw.raw_bits);
    println!("final 0.{} = {}", resolved.est_bits, resolved.value);
    Ok(())
}
