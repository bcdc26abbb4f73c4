//! Stage outputs are written under a `.partial` suffix and renamed into
//! place only once the whole stage succeeded; each stage also leaves a
//! manifest of what it read and wrote.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{io_at, CliError};

pub const PARTIAL_SUFFIX: &str = ".partial";
pub const CONFIG_FILE: &str = "config.effective.toml";

fn partial(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(PARTIAL_SUFFIX);
    path.with_file_name(name)
}

/// Hex SHA-256 of a file, or of a directory as its sorted relative paths
/// and file contents.
pub fn sha256_path(path: &Path) -> Result<String, CliError> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, path, &mut files)?;
        files.sort();
        for rel in files {
            hasher.update(rel.to_string_lossy().as_bytes());
            hasher.update([0]);
            hasher.update(fs::read(path.join(&rel)).map_err(io_at(path.join(&rel)))?);
            hasher.update([0]);
        }
    } else {
        hasher.update(fs::read(path).map_err(io_at(path))?);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    for entry in fs::read_dir(dir).map_err(io_at(dir))? {
        let path = entry.map_err(io_at(dir))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            out.push(path.strip_prefix(root).unwrap_or(&path).to_path_buf());
        }
    }
    Ok(())
}

/// Outputs and provenance of one stage run.
pub struct Stage {
    name: &'static str,
    out_dir: PathBuf,
    pending: Vec<PathBuf>,
    inputs: Vec<(PathBuf, String)>,
    notes: Vec<(String, String)>,
}

impl Stage {
    pub fn begin(name: &'static str, config: &PipelineConfig) -> Result<Self, CliError> {
        let out_dir = config.output_dir().to_path_buf();
        fs::create_dir_all(&out_dir).map_err(io_at(&out_dir))?;
        Ok(Stage {
            name,
            out_dir,
            pending: Vec::new(),
            inputs: Vec::new(),
            notes: Vec::new(),
        })
    }

    /// Final location of an output of this or an earlier stage.
    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Records an input file or directory for the manifest.
    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = sha256_path(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    /// An artifact made by an earlier stage, which must exist.
    pub fn artifact(&mut self, name: &str, producer: &'static str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        if !path.exists() {
            return Err(CliError::MissingArtifact { path, producer });
        }
        self.input(&path)?;
        Ok(path)
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    /// Writes `name` under its partial name through `fill`.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let target = partial(&self.path(name));
        let file = File::create(&target).map_err(io_at(&target))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        w.flush().map_err(io_at(&target))?;
        self.pending.push(self.path(name));
        Ok(())
    }

    /// A fresh partial directory for `name`.
    pub fn dir(&mut self, name: &str) -> Result<PathBuf, CliError> {
        let target = partial(&self.path(name));
        if target.exists() {
            fs::remove_dir_all(&target).map_err(io_at(&target))?;
        }
        fs::create_dir_all(&target).map_err(io_at(&target))?;
        self.pending.push(self.path(name));
        Ok(target)
    }

    /// Writes the manifest and moves every output into place.
    pub fn commit(mut self, config: &PipelineConfig) -> Result<(), CliError> {
        let config_text = config.canonical();
        let mut manifest = String::from("kind\tname\tvalue\n");
        manifest.push_str(&format!("stage\tname\t{}\n", self.name));
        manifest.push_str(&format!("config\tsha256\t{}\n", hex::encode(Sha256::digest(config_text.as_bytes()))));
        manifest.push_str(&format!("config\tfile\t{CONFIG_FILE}\n"));
        manifest.push_str(&format!("seed\tseed\t{}\n", config.seed));
        manifest.push_str(&format!("workers\tworkers\t{}\n", config.workers));
        for (path, digest) in &self.inputs {
            manifest.push_str(&format!("input\t{}\t{digest}\n", path.display()));
        }
        for path in &self.pending {
            let digest = sha256_path(&partial(path))?;
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            manifest.push_str(&format!("output\t{name}\t{digest}\n"));
        }
        for (key, value) in &self.notes {
            manifest.push_str(&format!("note\t{key}\t{value}\n"));
        }
        let config_name = CONFIG_FILE;
        self.write(config_name, |w| w.write_all(config_text.as_bytes()).map_err(io_at(config_name)))?;
        let manifest_name = format!("manifest.{}.tsv", self.name);
        self.write(&manifest_name, |w| w.write_all(manifest.as_bytes()).map_err(io_at(&manifest_name)))?;

        for path in &self.pending {
            let from = partial(path);
            if path.is_dir() {
                fs::remove_dir_all(path).map_err(io_at(path))?;
            }
            fs::rename(&from, path).map_err(io_at(&from))?;
        }
        log::info!("{}: {} artifacts written to {}", self.name, self.pending.len(), self.out_dir.display());
        Ok(())
    }
}
