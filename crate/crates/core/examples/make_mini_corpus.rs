//! Writes a small synthetic raw corpus (WAV, landmark track and transcript
//! per record, plus manifest.json).
//!
//! ```text
//! cargo run --example make_mini_corpus -- <out-dir> [records] [seed]
//! ```

use std::path::PathBuf;

use interview_analytics::synthetic::write_raw_corpus;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "mini_corpus".into()));
    let n: usize = args.next().map(|a| a.parse().expect("records")).unwrap_or(6);
    let seed: u64 = args.next().map(|a| a.parse().expect("seed")).unwrap_or(1);
    match write_raw_corpus(&dir, n, seed) {
        Ok(path) => println!("{}", path.display()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
