//! Text forms for norms and weight files.
//!
//! ```text
//! lp:2   lp:inf   c0   power:0.5[:q]   lorentz:pair.json#wt   pair:pair.json
//! ```

use std::path::Path;

use seqsing_core::{AlternatingPair, NormDescriptor, WeightSpec, Which};

use crate::CliError;

/// Long enough that no search ever runs off the end.
const POWER_LAW_LEN: u128 = 1 << 100;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn load_pair(path: &Path) -> Result<AlternatingPair, CliError> {
    AlternatingPair::from_json(&read_text(path)?)
        .map_err(|e| CliError::Usage(format!("{}: not a pair file: {e}", path.display())))
}

fn parse_which(frag: &str) -> Result<Which, CliError> {
    frag.parse().map_err(CliError::Usage)
}

/// `FILE[#w|#wt]`: one weight of a pair file, or a bare weight spec.
pub fn load_weights(arg: &str) -> Result<WeightSpec, CliError> {
    let (file, frag) = match arg.rsplit_once('#') {
        Some((f, w)) => (f, Some(w)),
        None => (arg, None),
    };
    if let Some(rest) = file.strip_prefix("power:") {
        return power_law(rest);
    }
    let text = read_text(Path::new(file))?;
    if let Ok(pair) = AlternatingPair::from_json(&text) {
        let which = frag.map(parse_which).transpose()?.unwrap_or(Which::W);
        return Ok(pair.weights(which));
    }
    let spec: WeightSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{file}: neither a pair nor a weight file: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn number(text: &str, what: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("bad {what} {text:?}")))
}

/// `s[:q]`, `q` defaulting to 1.
fn power_law(rest: &str) -> Result<WeightSpec, CliError> {
    let (s, q) = match rest.split_once(':') {
        Some((s, q)) => (number(s, "exponent")?, number(q, "q")?),
        None => (number(rest, "exponent")?, 1.0),
    };
    let spec = WeightSpec::power_law(s, POWER_LAW_LEN, q);
    spec.validate()?;
    Ok(spec)
}

pub fn parse_norm(text: &str) -> Result<NormDescriptor, CliError> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let norm = match kind {
        "c0" if rest.is_empty() => NormDescriptor::C0,
        "lp" if rest == "inf" => NormDescriptor::C0,
        "lp" => NormDescriptor::Lp {
            p: number(rest, "p")?,
        },
        "power" => NormDescriptor::Lorentz {
            weights: power_law(rest)?,
        },
        "lorentz" => NormDescriptor::Lorentz {
            weights: load_weights(rest)?,
        },
        "pair" => {
            let pair = load_pair(Path::new(rest))?;
            NormDescriptor::PairSum {
                w: pair.w(),
                wt: pair.wt(),
            }
        }
        _ => return Err(CliError::Usage(format!("unknown norm {text:?}"))),
    };
    norm.validate()?;
    Ok(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use seqsing_core::pairgen::{build_pair, BuildOptions};

    #[test]
    fn inline_forms() {
        assert_eq!(parse_norm("lp:2").unwrap(), NormDescriptor::Lp { p: 2.0 });
        assert_eq!(parse_norm("lp:inf").unwrap(), NormDescriptor::C0);
        assert_eq!(parse_norm("c0").unwrap(), NormDescriptor::C0);
        let NormDescriptor::Lorentz { weights } = parse_norm("power:0.5:1.5").unwrap() else {
            panic!("not lorentz")
        };
        assert_eq!((weights.q, weights.value(4)), (1.5, Some(0.5)));
        for bad in [
            "lp:0.5",
            "lp:x",
            "c1",
            "power:-1",
            "lorentz:/nonexistent.json",
        ] {
            assert!(parse_norm(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pair_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pair.json");
        let pair = build_pair(2.0, 1.0, 3, &BuildOptions::default()).unwrap();
        std::fs::write(&path, pair.to_json()).unwrap();
        let p = path.display();
        assert_eq!(
            parse_norm(&format!("lorentz:{p}#wt")).unwrap(),
            NormDescriptor::Lorentz { weights: pair.wt() }
        );
        assert_eq!(
            parse_norm(&format!("lorentz:{p}")).unwrap(),
            NormDescriptor::Lorentz { weights: pair.w() }
        );
        assert_eq!(
            parse_norm(&format!("pair:{p}")).unwrap(),
            NormDescriptor::PairSum {
                w: pair.w(),
                wt: pair.wt()
            }
        );
        assert!(parse_norm(&format!("lorentz:{p}#x")).is_err());
        let single = dir.path().join("w.json");
        std::fs::write(&single, serde_json::to_string(&pair.w()).unwrap()).unwrap();
        assert_eq!(
            load_weights(&single.display().to_string()).unwrap(),
            pair.w()
        );
    }
}
