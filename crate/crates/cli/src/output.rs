//! File emission. CSV files open with `#` lines holding the experiment,
//! seed and resolved config; JSON files carry the same under `meta`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    experiment: &'a str,
    seed: u64,
    config: &'a C,
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, T: Serialize> {
    meta: Meta<'a, C>,
    result: &'a T,
}

pub struct Output<'a, C: Serialize> {
    dir: PathBuf,
    meta: Meta<'a, C>,
    pub written: Vec<PathBuf>,
}

impl<'a, C: Serialize> Output<'a, C> {
    pub fn create(dir: &Path, experiment: &'a str, seed: u64, config: &'a C) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
        Ok(Self { dir: dir.to_owned(), meta: Meta { experiment, seed, config }, written: Vec::new() })
    }

    fn write(&mut self, name: &str, text: String) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }

    /// `body` must start with its header row. `notes` become extra `#` lines.
    pub fn csv(&mut self, name: &str, notes: &[String], body: &str) -> Result<(), CliError> {
        let config = serde_json::to_string(self.meta.config).expect("config serializes");
        let mut text = format!("# symbreak {}\n# seed: {}\n# config: {config}\n", self.meta.experiment, self.meta.seed);
        for n in notes {
            text.push_str(&format!("# {n}\n"));
        }
        text.push_str(body);
        self.write(name, text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        let doc = Document {
            meta: Meta { experiment: self.meta.experiment, seed: self.meta.seed, config: self.meta.config },
            result,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        self.write(name, text)
    }
}
