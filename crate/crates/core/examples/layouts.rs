//! Draw seeded layouts, save them as JSON lines and read them back.
//!
//! cargo run --example layouts

use linq::network::{generate_layouts, read_layouts, write_layouts, LayoutRecord, SystemParams};

fn main() -> linq::Result<()> {
    let params = SystemParams::default();
    let layouts = generate_layouts(&params, 50, 3, 7)?;
    for l in &layouts {
        let lengths: Vec<f64> = (0..l.n_links()).map(|i| l.link_length(i)).collect();
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        println!(
            "seed {:>20}  links {}  mean link length {:.1} m",
            l.seed(),
            l.n_links(),
            mean
        );
    }

    let dir = std::env::temp_dir().join("linq-layouts-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("layouts.jsonl");
    let records: Vec<LayoutRecord> = layouts.into_iter().map(LayoutRecord::path_loss).collect();
    write_layouts(&path, &records)?;
    let back = read_layouts(&path, params.dense_cap)?;
    assert_eq!(back, records);
    println!(
        "round-tripped {} layouts through {}",
        back.len(),
        path.display()
    );
    Ok(())
}
