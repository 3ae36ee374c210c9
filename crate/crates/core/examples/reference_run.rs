//! Prints the seed-42 reference sweep over the bundled edge list.

use friendrec_core::{assign_books, bundled, encode_books, split, sweep, BookCatalog};

fn main() -> friendrec_core::Result<()> {
    let catalog = BookCatalog::default();
    let edges = assign_books(&bundled::edges(), &catalog, bundled::REFERENCE_SEED)?;
    let rows = encode_books(&edges, &catalog)?;
    let parts = split(&rows, 0.7, bundled::REFERENCE_SEED)?;
    let report = sweep(&parts, 2, 5)?;
    print!("{}", report.to_table());
    println!("chosen K: {}", report.chosen_k);
    for e in &report.entries {
        println!("k={} correct={} total={} accuracy={:?}", e.k, e.correct, e.total, e.accuracy);
    }

    let tiny = friendrec_core::load_edges("1,0\n0,1\n2,3\n".as_bytes())?;
    let annotated = assign_books(&tiny, &catalog, bundled::REFERENCE_SEED)?;
    friendrec_core::write_annotated(std::io::stdout(), &annotated)?;
    Ok(())
}
