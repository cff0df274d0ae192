use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, Months, NaiveDate};

use super::{QueryPost, TaggingDataset, Timestamp};
use crate::error::{Error, Result};

/// Length of the test period at the end of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestWindow {
    /// Posts strictly later than `last - days`.
    Days(u32),
    /// Posts in the last `n` calendar months, counting the month of the
    /// most recent post.
    Months(u32),
}

impl TestWindow {
    fn cutoff(self, last: Timestamp) -> Result<Timestamp> {
        match self {
            TestWindow::Days(0) | TestWindow::Months(0) => {
                Err(Error::InvalidArgument("test window must be positive".into()))
            }
            TestWindow::Days(d) => Ok(last - Duration::days(i64::from(d))),
            TestWindow::Months(m) => {
                let month_start = NaiveDate::from_ymd_opt(last.year(), last.month(), 1)
                    .expect("first of month exists");
                let start = month_start
                    .checked_sub_months(Months::new(m - 1))
                    .ok_or_else(|| Error::InvalidArgument("test window out of range".into()))?;
                // shift by an epsilon so that `>` keeps the first instant of the window
                Ok(start.and_hms_opt(0, 0, 0).unwrap() - Duration::nanoseconds(1))
            }
        }
    }
}

impl FromStr for TestWindow {
    type Err = Error;

    /// `10d` or `2m`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad test window `{s}` (expected e.g. 10d or 2m)"));
        let (num, unit) = s.split_at(s.len().saturating_sub(1));
        let value: u32 = num.parse().map_err(|_| bad())?;
        match unit {
            "d" => Ok(TestWindow::Days(value)),
            "m" => Ok(TestWindow::Months(value)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for TestWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestWindow::Days(d) => write!(f, "{d}d"),
            TestWindow::Months(m) => write!(f, "{m}m"),
        }
    }
}

/// Splits off the final `window` of the dataset's time range as test data.
pub fn date_split(
    dataset: &TaggingDataset,
    window: TestWindow,
) -> Result<(TaggingDataset, Vec<QueryPost>)> {
    let Some((_, last)) = dataset.time_range() else {
        window.cutoff(Timestamp::default())?;
        return Ok((TaggingDataset::default(), Vec::new()));
    };
    let cutoff = window.cutoff(last)?;
    let (test, train): (Vec<_>, Vec<_>) =
        dataset.posts().iter().partition(|p| p.timestamp > cutoff);
    Ok((
        TaggingDataset::new(train.into_iter().cloned()),
        test.into_iter().map(|p| p.to_query()).collect(),
    ))
}

/// Moves each user's most recent post to the test set. Timestamp ties are
/// broken by taking the lexicographically greatest document id.
pub fn leave_one_out_split(dataset: &TaggingDataset) -> Result<(TaggingDataset, Vec<QueryPost>)> {
    if dataset.is_empty() {
        return Err(Error::Empty("leave-one-out split needs at least one post"));
    }
    let mut held_out: HashSet<(&str, &str)> = HashSet::new();
    let mut test = Vec::with_capacity(dataset.user_count());
    for user in dataset.users() {
        let last = dataset
            .posts_of_user(user)
            .max_by(|a, b| (a.timestamp, &a.document).cmp(&(b.timestamp, &b.document)))
            .expect("indexed users have posts");
        held_out.insert(last.key());
        test.push(last.to_query());
    }
    let train = dataset
        .posts()
        .iter()
        .filter(|p| !held_out.contains(&p.key()))
        .cloned();
    Ok((TaggingDataset::new(train), test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Post;

    fn day(n: i64) -> Timestamp {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap()
            + Duration::days(n - 1)
    }

    #[test]
    fn last_days_window() {
        let ds = TaggingDataset::new((1..=100).map(|d| Post::new("u", &format!("d{d}"), ["t"], day(d))));
        let (train, test) = date_split(&ds, TestWindow::Days(10)).unwrap();
        assert_eq!(train.len(), 90);
        assert_eq!(test.len(), 10);
        assert!(train.posts().iter().all(|p| p.timestamp <= day(90)));
        assert!(test.iter().all(|q| q.timestamp.unwrap() >= day(91)));
        assert!(test.iter().all(|q| q.true_tags.is_some()));
    }

    #[test]
    fn single_timestamp_goes_to_test() {
        let ds = TaggingDataset::new((0..5).map(|i| Post::new(&format!("u{i}"), "d", ["t"], day(3))));
        let (train, test) = date_split(&ds, TestWindow::Days(1)).unwrap();
        assert!(train.is_empty());
        assert_eq!(test.len(), 5);
    }

    #[test]
    fn calendar_months() {
        // one post on the 1st and one on the 28th of each of 14 months
        let mut posts = Vec::new();
        for m in 0..14u32 {
            let first = NaiveDate::from_ymd_opt(2011, 1, 1).unwrap() + Months::new(m);
            for (k, d) in [1u32, 28].into_iter().enumerate() {
                let date = first.with_day(d).unwrap().and_hms_opt(12, 0, 0).unwrap();
                posts.push(Post::new(&format!("u{m}_{k}"), "d", ["t"], date));
            }
        }
        let ds = TaggingDataset::new(posts);
        let (train, test) = date_split(&ds, TestWindow::Months(2)).unwrap();
        assert_eq!(test.len(), 4);
        assert_eq!(train.len(), 24);
        let boundary = NaiveDate::from_ymd_opt(2012, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        assert!(test.iter().all(|q| q.timestamp.unwrap() >= boundary));
    }

    #[test]
    fn empty_and_zero_window() {
        let (train, test) = date_split(&TaggingDataset::default(), TestWindow::Days(3)).unwrap();
        assert!(train.is_empty() && test.is_empty());
        let ds = TaggingDataset::new([Post::new("u", "d", ["t"], day(1))]);
        assert!(date_split(&ds, TestWindow::Days(0)).is_err());
    }

    #[test]
    fn window_parsing() {
        assert_eq!("10d".parse::<TestWindow>().unwrap(), TestWindow::Days(10));
        assert_eq!("2m".parse::<TestWindow>().unwrap(), TestWindow::Months(2));
        assert!("2y".parse::<TestWindow>().is_err());
        assert!("m".parse::<TestWindow>().is_err());
    }

    #[test]
    fn leave_one_out_takes_latest() {
        let ds = TaggingDataset::new((1..=3).map(|d| Post::new("u1", &format!("d{d}"), ["t"], day(d))));
        let (train, test) = leave_one_out_split(&ds).unwrap();
        assert_eq!(test.len(), 1);
        assert_eq!(test[0].document, "d3");
        assert_eq!(train.len(), 2);
    }

    #[test]
    fn leave_one_out_single_posts() {
        let ds = TaggingDataset::new([
            Post::new("u1", "d1", ["t"], day(1)),
            Post::new("u2", "d2", ["t"], day(2)),
        ]);
        let (train, test) = leave_one_out_split(&ds).unwrap();
        assert!(train.is_empty());
        assert_eq!(test.len(), 2);
    }

    #[test]
    fn leave_one_out_tie_break() {
        let ds = TaggingDataset::new([
            Post::new("u1", "b", ["t"], day(5)),
            Post::new("u1", "a", ["t"], day(5)),
            Post::new("u1", "c", ["t"], day(4)),
        ]);
        let (_, test) = leave_one_out_split(&ds).unwrap();
        assert_eq!(test[0].document, "b");
        assert!(leave_one_out_split(&TaggingDataset::default()).is_err());
    }
}
