use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use sftnorm::alphabet::{Alphabet, Sym};
use sftnorm::measure::Measure;
use sftnorm::shift::ShiftSpec;
use sftnorm::transducer::Transducer;

use crate::Failure;

/// Default cap on symbols read from a sequence file.
pub const DEFAULT_MAX_SYMBOLS: usize = 1 << 30;

const LINE_WIDTH: usize = 80;

fn read_text(stage: &'static str, path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::validation(stage, format!("{}: {e}", path.display())))
}

pub fn load_shift(path: &Path) -> Result<ShiftSpec, Failure> {
    let text = read_text("shift", path)?;
    ShiftSpec::from_json(&text).map_err(|e| Failure::from_lib("shift", e))
}

pub fn load_transducer(path: &Path) -> Result<Transducer, Failure> {
    let text = read_text("transducer", path)?;
    Transducer::from_json(&text).map_err(|e| Failure::from_lib("transducer", e))
}

pub fn load_measure(path: &Path) -> Result<Measure, Failure> {
    let text = read_text("measure", path)?;
    let mu = Measure::from_json(&text).map_err(|e| Failure::from_lib("measure", e))?;
    mu.validate().map_err(|e| Failure::from_lib("measure", e))?;
    Ok(mu)
}

pub fn load_matrix(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let text = read_text("matrix", path)?;
    serde_json::from_str(&text).map_err(|e| Failure::validation("matrix", format!("{}: {e}", path.display())))
}

/// Reads a sequence file line by line, skipping whitespace.
pub fn load_sequence(path: &Path, alphabet: &Alphabet, max_symbols: usize) -> Result<Vec<Sym>, Failure> {
    let file = File::open(path).map_err(|e| Failure::validation("sequence", format!("{}: {e}", path.display())))?;
    let mut x = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Failure::validation("sequence", format!("{}: {e}", path.display())))?;
        let w = alphabet
            .parse_sequence(&line)
            .map_err(|e| Failure::validation("sequence", format!("{} line {}: {e}", path.display(), i + 1)))?;
        if x.len() + w.len() > max_symbols {
            return Err(Failure::validation("sequence", format!("more than {max_symbols} symbols")));
        }
        x.extend(w);
    }
    Ok(x)
}

pub fn render_sequence(x: &[Sym], alphabet: &Alphabet) -> String {
    let mut s = String::with_capacity(x.len() + x.len() / LINE_WIDTH + 1);
    for line in x.chunks(LINE_WIDTH) {
        s.push_str(&alphabet.render(line));
        s.push('\n');
    }
    s
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::internal("output", format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Failure::internal("output", e.to_string()))
        }
    }
}

pub fn write_file(stage: &'static str, path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::internal(stage, format!("{}: {e}", path.display())))
}
