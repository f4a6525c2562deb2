use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maps a 5-point Likert rating onto `[0, 1]` as `(r - 1) / 4`. A rating of
/// 1 therefore removes the item's influence rather than counting against it.
pub fn likert_to_weight(rating: i64) -> Result<f64> {
    if !(1..=5).contains(&rating) {
        return Err(Error::RatingOutOfRange(rating));
    }
    Ok((rating - 1) as f64 / 4.0)
}

/// A user's Likert ratings, keyed by item id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    ratings: BTreeMap<String, u8>,
}

impl UserProfile {
    pub fn new(user_id: impl Into<String>) -> Self {
        UserProfile {
            user_id: user_id.into(),
            ratings: BTreeMap::new(),
        }
    }

    pub fn with_ratings<I, S>(user_id: impl Into<String>, ratings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut p = Self::new(user_id);
        for (item, r) in ratings {
            p.rate(item, r)?;
        }
        Ok(p)
    }

    /// Sets or replaces a rating.
    pub fn rate(&mut self, item_id: impl Into<String>, rating: i64) -> Result<()> {
        likert_to_weight(rating)?;
        self.ratings.insert(item_id.into(), rating as u8);
        Ok(())
    }

    pub fn rating(&self, item_id: &str) -> Option<u8> {
        self.ratings.get(item_id).copied()
    }

    pub fn ratings(&self) -> &BTreeMap<String, u8> {
        &self.ratings
    }

    /// Number of rated items.
    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// Weights in item id order.
    pub fn weights(&self) -> Vec<(String, f64)> {
        self.ratings
            .iter()
            .map(|(id, &r)| (id.clone(), (r as f64 - 1.0) / 4.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likert_endpoints_and_midpoint() {
        assert_eq!(likert_to_weight(5).unwrap(), 1.0);
        assert_eq!(likert_to_weight(1).unwrap(), 0.0);
        assert_eq!(likert_to_weight(3).unwrap(), 0.5);
    }

    #[test]
    fn out_of_range_ratings_rejected() {
        for r in [0, 6, 7, -1] {
            assert!(matches!(likert_to_weight(r), Err(Error::RatingOutOfRange(x)) if x == r));
        }
        let mut p = UserProfile::new("u");
        assert!(p.rate("a", 7).is_err());
        assert!(p.is_empty());
    }

    #[test]
    fn rerating_replaces() {
        let mut p = UserProfile::new("u");
        p.rate("a", 2).unwrap();
        p.rate("a", 5).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.weights(), vec![("a".to_string(), 1.0)]);
    }
}
