//! CSV exports for external plotting.

use std::io::Write;
use std::path::{Path, PathBuf};

use seqsing_core::dominate::{CounterexampleReport, SingularWitness};
use seqsing_core::AlternatingPair;
use serde::Serialize;

use crate::CliError;

pub const WITNESS_HEADER: [&str; 3] = ["k", "n_k", "ratio"];
pub const WEIGHTS_HEADER: [&str; 4] = ["n", "w", "wtilde", "segment"];
pub const WITNESS_FILE: &str = "witnesses.csv";
pub const WEIGHTS_FILE: &str = "weights.csv";

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io {
            path: path.into(),
            source,
        },
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    }
}

/// Witness rows sorted by stage.
pub fn write_witnesses<W: Write>(
    out: W,
    witnesses: &[SingularWitness],
    path: &Path,
) -> Result<(), CliError> {
    let mut sorted: Vec<&SingularWitness> = witnesses.iter().collect();
    sorted.sort_by_key(|w| w.k);
    let mut wr = csv::Writer::from_writer(out);
    let err = csv_err(path);
    wr.write_record(WITNESS_HEADER).map_err(&err)?;
    for w in sorted {
        wr.write_record([w.k.to_string(), w.n_k.to_string(), w.ratio.to_string()])
            .map_err(&err)?;
    }
    wr.flush().map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// `n, w_n, w̃_n` for `n ≤ min(N_built, rows)`. The segment column is
/// `i/j`, the positions of the segments holding `n` in each weight.
pub fn write_weights<W: Write>(
    out: W,
    pair: &AlternatingPair,
    rows: u64,
    path: &Path,
) -> Result<(), CliError> {
    let (w, wt) = (pair.w(), pair.wt());
    let len = pair.n_built().min(u128::from(rows));
    let mut wr = csv::Writer::from_writer(out);
    let err = csv_err(path);
    wr.write_record(WEIGHTS_HEADER).map_err(&err)?;
    for n in 1..=len {
        let cell = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        let seg = |i: Option<usize>| i.map_or_else(|| "-".to_string(), |i| i.to_string());
        let segment = format!("{}/{}", seg(w.locate(n)), seg(wt.locate(n)));
        wr.write_record([n.to_string(), cell(w.value(n)), cell(wt.value(n)), segment])
            .map_err(&err)?;
    }
    wr.flush().map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotFiles {
    pub witnesses: PathBuf,
    pub weights: PathBuf,
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes `witnesses.csv` and `weights.csv` into `dir`, creating it if needed.
pub fn emit_plotdata(
    report: &CounterexampleReport,
    dir: &Path,
    rows: u64,
) -> Result<PlotFiles, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.into(),
        source,
    })?;
    let files = PlotFiles {
        witnesses: dir.join(WITNESS_FILE),
        weights: dir.join(WEIGHTS_FILE),
    };
    let all: Vec<SingularWitness> = report
        .witnesses_w
        .iter()
        .chain(&report.witnesses_wt)
        .cloned()
        .collect();
    write_witnesses(create(&files.witnesses)?, &all, &files.witnesses)?;
    write_weights(create(&files.weights)?, &report.pair, rows, &files.weights)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_witness_list_is_header_only() {
        let mut buf = Vec::new();
        write_witnesses(&mut buf, &[], Path::new("mem")).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,n_k,ratio\n");
    }

    #[test]
    fn weight_rows() {
        let pair = seqsing_core::build_pair(2.0, 1.0, 2, &Default::default()).unwrap();
        let mut buf = Vec::new();
        write_weights(&mut buf, &pair, 1000, Path::new("mem")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,w,wtilde,segment");
        assert_eq!(lines.len(), 31);
        assert_eq!(lines[1], "1,1,1,0/0");
    }
}
