use crate::error::{Error, Result};

/// A dense table of values indexed by consecutive calendar years.
#[derive(Debug, Clone, PartialEq)]
pub struct YearSeries {
    name: String,
    first_year: i32,
    values: Vec<f64>,
}

impl YearSeries {
    pub fn new(name: impl Into<String>, first_year: i32, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            first_year,
            values,
        }
    }

    /// Series holding the same value for every year of `first..=last`.
    pub fn constant(name: impl Into<String>, first: i32, last: i32, value: f64) -> Self {
        let len = (last - first + 1).max(0) as usize;
        Self::new(name, first, vec![value; len])
    }

    pub fn from_fn(
        name: impl Into<String>,
        first: i32,
        last: i32,
        mut f: impl FnMut(i32) -> f64,
    ) -> Self {
        Self::new(name, first, (first..=last).map(&mut f).collect())
    }

    /// Builds a series from (year, value) pairs, which must cover a
    /// contiguous range of years with no duplicates.
    pub fn from_pairs(name: impl Into<String>, pairs: &[(i32, f64)]) -> Result<Self> {
        let name = name.into();
        let mut sorted = pairs.to_vec();
        sorted.sort_by_key(|p| p.0);
        let Some(&(first, _)) = sorted.first() else {
            return Err(Error::InvalidInput(format!("series `{name}` is empty")));
        };
        for (i, &(year, _)) in sorted.iter().enumerate() {
            if year != first + i as i32 {
                return Err(Error::InvalidInput(format!(
                    "series `{name}` is not contiguous at year {year}"
                )));
            }
        }
        Ok(Self::new(
            name,
            first,
            sorted.into_iter().map(|p| p.1).collect(),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn covers(&self, first: i32, last: i32) -> bool {
        !self.is_empty() && first >= self.first_year && last <= self.last_year()
    }

    pub fn get(&self, year: i32) -> Result<f64> {
        self.index(year).map(|i| self.values[i])
    }

    pub fn set(&mut self, year: i32, value: f64) -> Result<()> {
        let i = self.index(year)?;
        self.values[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first_year + i as i32, v))
    }

    pub fn map(&self, mut f: impl FnMut(i32, f64) -> f64) -> Self {
        Self::new(
            self.name.clone(),
            self.first_year,
            self.iter().map(|(y, v)| f(y, v)).collect(),
        )
    }

    fn index(&self, year: i32) -> Result<usize> {
        if self.is_empty() || year < self.first_year || year > self.last_year() {
            return Err(self.out_of_range(year));
        }
        Ok((year - self.first_year) as usize)
    }

    pub(crate) fn out_of_range(&self, year: i32) -> Error {
        Error::YearOutOfRange {
            series: self.name.clone(),
            year,
            first: self.first_year,
            last: self.last_year(),
        }
    }
}
