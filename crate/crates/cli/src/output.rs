use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use gfgm_core::bernoulli::BernoulliPmf;
use gfgm_core::bounds::fmt_sig;
use gfgm_core::scalar::ExactScalar;
use gfgm_core::validate::ValidationReport;
use gfgm_core::Rational;

use crate::args::Format;

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Output {
    pub fn write(&self, render: impl FnOnce(Format) -> Result<String>) -> Result<()> {
        self.write_default(Format::Json, render)
    }

    pub fn write_default(
        &self,
        default: Format,
        render: impl FnOnce(Format) -> Result<String>,
    ) -> Result<()> {
        let from_ext = self
            .out
            .as_deref()
            .and_then(|p| match p.extension()?.to_str()? {
                "csv" => Some(Format::Csv),
                "json" => Some(Format::Json),
                _ => None,
            });
        let mut text = render(self.format.or(from_ext).unwrap_or(default))?;
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                std::io::stdout().lock().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// Write to a sibling temporary file, then rename over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().context("output path has no file name")?;
    let tmp = path.with_file_name(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

/// One row per vertex: `id,f0,…,f{2^d-1}` with rational entries.
pub fn vertices_csv(verts: &[BernoulliPmf<Rational>]) -> String {
    let Some(first) = verts.first() else {
        return String::from("id\n");
    };
    let mut s = String::from("id");
    for i in 0..first.values().len() {
        s += &format!(",f{i}");
    }
    s.push('\n');
    for (k, v) in verts.iter().enumerate() {
        s += &format!("v{}", k + 1);
        for x in v.values() {
            s += &format!(",{}", x.to_canonical());
        }
        s.push('\n');
    }
    s
}

pub fn validation_csv(r: &ValidationReport) -> String {
    let mut s = String::from("check,analytic,empirical,std_error,z,pass\n");
    for c in &r.checks {
        s += &format!(
            "{},{},{},{},{},{}\n",
            c.name,
            fmt_sig(c.analytic),
            fmt_sig(c.empirical),
            fmt_sig(c.std_error),
            fmt_sig(c.z),
            c.pass
        );
    }
    s += &format!(
        "ks,0,{},{},,{}\n",
        fmt_sig(r.ks_distance),
        fmt_sig(r.ks_threshold),
        r.ks_distance <= r.ks_threshold
    );
    s
}
