use std::str::FromStr;

use anyhow::{anyhow, bail, Context};

/// An inclusive list of integers written as `24`, `24..120`, `24..120:8`,
/// or a comma-separated mix of those.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntList(pub Vec<u64>);

impl FromStr for IntList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (span, step) = match part.split_once(':') {
                Some((span, step)) => (span, step.parse::<u64>().with_context(|| format!("bad step in {part:?}"))?),
                None => (part, 1),
            };
            if step == 0 {
                bail!("step must be positive in {part:?}");
            }
            match span.split_once("..") {
                Some((lo, hi)) => {
                    let lo: u64 = lo.parse().with_context(|| format!("bad start in {part:?}"))?;
                    let hi: u64 = hi.trim_start_matches('=').parse().with_context(|| format!("bad end in {part:?}"))?;
                    if hi < lo {
                        bail!("empty range {part:?}");
                    }
                    out.extend((lo..=hi).step_by(step as usize));
                }
                None => out.push(span.parse().with_context(|| format!("bad number {part:?}"))?),
            }
        }
        if out.is_empty() {
            return Err(anyhow!("empty list"));
        }
        out.sort_unstable();
        out.dedup();
        Ok(IntList(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!("7".parse::<IntList>().unwrap().0, vec![7]);
        assert_eq!("24..40:8".parse::<IntList>().unwrap().0, vec![24, 32, 40]);
        assert_eq!("0..=2".parse::<IntList>().unwrap().0, vec![0, 1, 2]);
        assert_eq!("5,1..2,5".parse::<IntList>().unwrap().0, vec![1, 2, 5]);
        assert!("9..3".parse::<IntList>().is_err());
        assert!("1..4:0".parse::<IntList>().is_err());
        assert!("".parse::<IntList>().is_err());
    }
}
