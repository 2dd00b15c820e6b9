//! CSV emission: `#`-prefixed manifest header, one column-header row, data
//! rows. Files are written to a temporary sibling and renamed into place so
//! a failed run leaves nothing behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Run provenance embedded at the top of every CSV.
pub struct Manifest {
    pub command: &'static str,
    pub parameters: Vec<(String, String)>,
    pub seed: u64,
    pub excluded_samples: usize,
}

impl Manifest {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            parameters: Vec::new(),
            seed: 0,
            excluded_samples: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    fn write_header(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# tool_version: {}", env!("CARGO_PKG_VERSION"))?;
        for (k, v) in &self.parameters {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# excluded_samples: {}", self.excluded_samples)?;
        Ok(())
    }
}

/// Write one CSV atomically: manifest, header row, then rows from `body`.
pub fn write_csv(
    path: &Path,
    manifest: &Manifest,
    header: &str,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    let tmp: PathBuf = {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".tmp");
        path.with_file_name(name)
    };
    let result = (|| -> io::Result<()> {
        let mut file = io::BufWriter::new(fs::File::create(&tmp)?);
        manifest.write_header(&mut file)?;
        writeln!(file, "{header}")?;
        body(&mut file)?;
        file.flush()?;
        Ok(())
    })();
    match result {
        Ok(()) => fs::rename(&tmp, path),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}
