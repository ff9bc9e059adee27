use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;

/// A maximal run of consecutive samples strictly above a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceEvent {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub peak: f64,
    pub threshold: f64,
}

impl ExceedanceEvent {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Periods during which the series exceeds `threshold`. Missing samples end
/// a run.
pub fn exceedance_events(s: &TimeSeries, threshold: f64) -> Vec<ExceedanceEvent> {
    let mut events = Vec::new();
    let mut current: Option<ExceedanceEvent> = None;
    for (i, v) in s.values().iter().enumerate() {
        match (v.filter(|&x| x > threshold), current.as_mut()) {
            (Some(x), Some(ev)) => {
                ev.end = i;
                ev.peak = ev.peak.max(x);
            }
            (Some(x), None) => {
                current = Some(ExceedanceEvent {
                    start: i,
                    end: i,
                    peak: x,
                    threshold,
                })
            }
            (None, _) => events.extend(current.take()),
        }
    }
    events.extend(current);
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Frequency;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn series(v: Vec<Option<f64>>) -> TimeSeries {
        TimeSeries::new("gic", Frequency::Daily, NaiveDate::from_ymd_opt(2003, 10, 28).unwrap(), v).unwrap()
    }

    #[test]
    fn single_spike() {
        let ev = exceedance_events(&series(vec![Some(1.0), Some(5.0), Some(2.0)]), 4.0);
        assert_eq!(ev, vec![ExceedanceEvent { start: 1, end: 1, peak: 5.0, threshold: 4.0 }]);
        assert!(exceedance_events(&series(vec![Some(1.0); 5]), 4.0).is_empty());
        // equality does not exceed; gaps split runs
        let ev = exceedance_events(&series(vec![Some(4.0), Some(6.0), None, Some(7.0), Some(9.0)]), 4.0);
        assert_eq!(ev.len(), 2);
        assert_eq!((ev[1].start, ev[1].end, ev[1].peak), (3, 4, 9.0));
    }

    fn scan_oracle(v: &[Option<f64>], threshold: f64) -> Vec<(usize, usize)> {
        let above: Vec<bool> = v.iter().map(|x| x.is_some_and(|x| x > threshold)).collect();
        (0..v.len())
            .filter(|&i| above[i] && (i == 0 || !above[i - 1]))
            .map(|s| {
                let mut e = s;
                while e + 1 < v.len() && above[e + 1] {
                    e += 1;
                }
                (s, e)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn random_walk_matches_scan_and_partitions(steps in proptest::collection::vec(-1.0f64..1.0, 1..300), threshold in -3.0f64..3.0) {
            let walk: Vec<Option<f64>> = steps.iter().scan(0.0, |acc, s| { *acc += s; Some(Some(*acc)) }).collect();
            let ev = exceedance_events(&series(walk.clone()), threshold);
            let bounds: Vec<(usize, usize)> = ev.iter().map(|e| (e.start, e.end)).collect();
            prop_assert_eq!(&bounds, &scan_oracle(&walk, threshold));
            let mut covered = vec![0u8; walk.len()];
            for e in &ev {
                for i in e.start..=e.end {
                    covered[i] += 1;
                    prop_assert!(walk[i].unwrap() > threshold);
                }
                let peak = (e.start..=e.end).map(|i| walk[i].unwrap()).fold(f64::MIN, f64::max);
                prop_assert_eq!(e.peak, peak);
                if e.start > 0 { prop_assert!(walk[e.start - 1].unwrap() <= threshold); }
                if e.end + 1 < walk.len() { prop_assert!(walk[e.end + 1].unwrap() <= threshold); }
            }
            for (i, c) in covered.iter().enumerate() {
                prop_assert!(*c <= 1);
                if *c == 0 { prop_assert!(walk[i].unwrap() <= threshold); }
            }
        }
    }
}
