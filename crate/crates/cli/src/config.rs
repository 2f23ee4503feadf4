//! `key = value` defaults file. Blank lines and `#` comments are ignored.
//!
//! ```text
//! seed = 7          # randomized sweeps
//! samples = 20000   # gallery and A_n sample budget
//! dim = 8           # truncation dimension / level
//! tol = 0.1         # covering radius for X_n and X^
//! pairs = 200       # Hausdorff oracle pairs
//! max_points = 2000 # largest oracle cloud
//! ```

use std::path::Path;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub dim: Option<usize>,
    pub tol: Option<f64>,
    pub pairs: Option<usize>,
    pub max_points: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut c = Config::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", k + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| format!("line {}: {key}: {e}", k + 1);
            match key {
                "seed" => c.seed = Some(value.parse().map_err(|e| bad(&e))?),
                "samples" => c.samples = Some(value.parse().map_err(|e| bad(&e))?),
                "dim" => c.dim = Some(value.parse().map_err(|e| bad(&e))?),
                "tol" => c.tol = Some(value.parse().map_err(|e| bad(&e))?),
                "pairs" => c.pairs = Some(value.parse().map_err(|e| bad(&e))?),
                "max_points" => c.max_points = Some(value.parse().map_err(|e| bad(&e))?),
                _ => return Err(format!("line {}: unknown key {key:?}", k + 1)),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Values set in `over` win.
    pub fn merge(self, over: Config) -> Config {
        Config {
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            dim: over.dim.or(self.dim),
            tol: over.tol.or(self.tol),
            pairs: over.pairs.or(self.pairs),
            max_points: over.max_points.or(self.max_points),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = Config::parse("# defaults\nseed = 3\n\ntol=0.05 # finer\n").unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.tol, Some(0.05));
        assert_eq!(c.samples, None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("colour = red").unwrap_err().contains("unknown key"));
        assert!(Config::parse("seed = x").is_err());
        assert!(Config::parse("seed").is_err());
    }

    #[test]
    fn flags_override_the_file() {
        let file = Config::parse("seed = 3\nsamples = 10").unwrap();
        let flags = Config { seed: Some(9), ..Default::default() };
        let m = file.merge(flags);
        assert_eq!((m.seed, m.samples), (Some(9), Some(10)));
    }
}
