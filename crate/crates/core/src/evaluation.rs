//! Scores, normalized value scale, ranking and the card presentation of a
//! consistent preference matrix.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::builder::pivot_consistency_certificate;
use crate::error::{Error, Result};
use crate::model::{check_consistency, check_reciprocity, ObjectId, ObjectSet, PreferenceMatrix};

pub type Rational = Ratio<i64>;

/// Default base of the exponential transform.
pub const DEFAULT_BASE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueScale {
    /// Units above the worst object, indexed by object id.
    pub u: Vec<i64>,
    /// `u / u[winner]`, exact; all zero when degenerate.
    #[serde(with = "rational_strings")]
    pub v: Vec<Rational>,
    pub worst: ObjectId,
    pub winner: ObjectId,
    pub degenerate: bool,
}

impl ValueScale {
    pub fn v_decimal(&self) -> Vec<f64> {
        self.v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `v` rendered with four fractional digits.
    pub fn v_fixed(&self) -> Vec<String> {
        self.v_decimal().iter().map(|x| format!("{x:.4}")).collect()
    }
}

/// Requires `M` reciprocal and consistent; the champion must be a best
/// object. The worst object is the column where the champion's row peaks,
/// lowest id on ties.
pub fn value_scale(matrix: &PreferenceMatrix, champion: ObjectId) -> Result<ValueScale> {
    let m = matrix.m();
    let c = champion.index();
    if c >= m {
        return Err(Error::ObjectOutOfRange(c));
    }
    if !check_reciprocity(matrix) {
        return Err(Error::NotReciprocal);
    }
    if !pivot_consistency_certificate(matrix, champion)? {
        let report = check_consistency(matrix);
        let first = report.violations.first().copied().expect("failed certificate implies a violation");
        return Err(Error::Inconsistent(first));
    }

    let mut worst = 0;
    for k in 1..m {
        if matrix.get(c, k) > matrix.get(c, worst) {
            worst = k;
        }
    }
    let span = matrix.get(c, worst);
    let u: Vec<i64> = (0..m).map(|i| matrix.get(i, worst)).collect();
    if u.iter().any(|&x| x > span) {
        return Err(Error::ChampionNotMaximal(champion));
    }
    let degenerate = span == 0;
    let v = if degenerate { vec![Rational::zero(); m] } else { u.iter().map(|&x| Rational::new(x, span)).collect() };
    Ok(ValueScale { u, v, worst: ObjectId(worst), winner: champion, degenerate })
}

/// `M[i][j] = u[i] - u[j]`; consistent for every `u`.
pub fn reconstruct_matrix(u: &[i64]) -> PreferenceMatrix {
    let m = u.len();
    let entries = u.iter().flat_map(|&ui| u.iter().map(move |&uj| ui - uj)).collect();
    PreferenceMatrix::from_flat(m, entries)
}

/// Groups of equally valued objects, best group first; ids ascending within
/// a group.
pub type Ranking = Vec<Vec<ObjectId>>;

pub fn ranking(scale: &ValueScale) -> Ranking {
    let mut ids: Vec<usize> = (0..scale.v.len()).collect();
    ids.sort_by(|&a, &b| scale.v[b].cmp(&scale.v[a]).then(a.cmp(&b)));
    let mut groups: Ranking = Vec::new();
    for id in ids {
        match groups.last_mut() {
            Some(group) if scale.v[group[0].index()] == scale.v[id] => group.push(ObjectId(id)),
            _ => groups.push(vec![ObjectId(id)]),
        }
    }
    groups
}

/// Blank cards between consecutive rank groups: the unit gap minus one.
pub fn card_distribution(scale: &ValueScale, ranking: &Ranking) -> Result<Vec<u32>> {
    if scale.degenerate {
        return Err(Error::DegenerateScale);
    }
    ranking
        .windows(2)
        .map(|pair| {
            let gap = scale.u[pair[0][0].index()] - scale.u[pair[1][0].index()];
            u32::try_from(gap - 1).map_err(|_| Error::InvalidRanking(format!("groups not descending (gap {gap})")))
        })
        .collect()
}

/// Ratio-scale matrix `base^M[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeMatrix {
    m: usize,
    entries: Vec<f64>,
    base: f64,
}

impl MultiplicativeMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| (0..self.m).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Largest `|P[i][j] * P[j][i] - 1|`.
    pub fn max_reciprocity_residual(&self) -> f64 {
        let m = self.m;
        (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) * self.get(j, i) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|P[i][k] * P[k][j] / P[i][j] - 1|` over all triples.
    pub fn max_consistency_residual(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for k in 0..m {
                for j in 0..m {
                    worst = worst.max((self.get(i, k) * self.get(k, j) / self.get(i, j) - 1.0).abs());
                }
            }
        }
        worst
    }

    /// Entry-wise logarithm in the transform's base.
    pub fn log_entries(&self) -> Vec<Vec<f64>> {
        let ln_base = self.base.ln();
        (0..self.m).map(|i| (0..self.m).map(|j| self.get(i, j).ln() / ln_base).collect()).collect()
    }
}

pub fn to_multiplicative(matrix: &PreferenceMatrix, base: f64) -> Result<MultiplicativeMatrix> {
    if !(base.is_finite() && base > 1.0) {
        return Err(Error::InvalidBase(base));
    }
    if !check_reciprocity(matrix) {
        return Err(Error::NotReciprocal);
    }
    let m = matrix.m();
    let entries =
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| base.powf(matrix.get(i, j) as f64)).collect();
    Ok(MultiplicativeMatrix { m, entries, base })
}

/// The results document exchanged with clients. Fields are declared in
/// lexicographic order so the compact serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub cards_between: Vec<u32>,
    pub degenerate: bool,
    pub ranking: Vec<Vec<String>>,
    pub u: Vec<i64>,
    pub v: Vec<String>,
    pub v_decimal: Vec<f64>,
}

impl ResultsDocument {
    pub fn new(objects: &ObjectSet, scale: &ValueScale) -> Result<Self> {
        let groups = ranking(scale);
        let cards_between = if scale.degenerate { Vec::new() } else { card_distribution(scale, &groups)? };
        Ok(Self {
            cards_between,
            degenerate: scale.degenerate,
            ranking: groups.iter().map(|g| g.iter().map(|&id| objects.name(id).to_string()).collect()).collect(),
            u: scale.u.clone(),
            v: scale.v.iter().map(ToString::to_string).collect(),
            v_decimal: scale.v_decimal(),
        })
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("results document serializes")
    }
}

mod rational_strings {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse::<Rational>().map_err(|e| D::Error::custom(format!("bad rational `{s}`: {e}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_matrix() -> PreferenceMatrix {
        reconstruct_matrix(&[5, 3, 1, 0])
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn example_scale() {
        let scale = value_scale(&example_matrix(), ObjectId(0)).unwrap();
        assert_eq!(scale.worst, ObjectId(3));
        assert_eq!(scale.u, vec![5, 3, 1, 0]);
        assert_eq!(scale.v, vec![r(1, 1), r(3, 5), r(1, 5), r(0, 1)]);
        assert_eq!(scale.v_fixed(), vec!["1.0000", "0.6000", "0.2000", "0.0000"]);
        assert!(!scale.degenerate);
    }

    #[test]
    fn reconstruct_gives_example_matrix() {
        assert_eq!(
            example_matrix().to_rows(),
            vec![vec![0, 2, 4, 5], vec![-2, 0, 2, 3], vec![-4, -2, 0, 1], vec![-5, -3, -1, 0]]
        );
        assert_eq!(reconstruct_matrix(&[0, 0, 0]), PreferenceMatrix::zeros(3));
    }

    #[test]
    fn degenerate_scale() {
        let scale = value_scale(&PreferenceMatrix::zeros(2), ObjectId(0)).unwrap();
        assert!(scale.degenerate);
        assert_eq!(scale.v, vec![r(0, 1), r(0, 1)]);
        assert_eq!(ranking(&scale), vec![vec![ObjectId(0), ObjectId(1)]]);
        assert_eq!(card_distribution(&scale, &ranking(&scale)).unwrap_err(), Error::DegenerateScale);
    }

    #[test]
    fn inconsistent_matrix_is_refused_with_triple() {
        let bad = PreferenceMatrix::from_rows(vec![vec![0, 1, 5], vec![-1, 0, 1], vec![-5, -1, 0]]).unwrap();
        assert!(matches!(value_scale(&bad, ObjectId(0)), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn non_maximal_champion_is_refused() {
        assert_eq!(value_scale(&example_matrix(), ObjectId(1)).unwrap_err(), Error::ChampionNotMaximal(ObjectId(1)));
    }

    #[test]
    fn any_anchor_column_gives_same_scale() {
        // shift-and-scale from every column k' must reproduce v
        let u = [7, 2, 9, 2, 0, 4];
        let matrix = reconstruct_matrix(&u);
        let scale = value_scale(&matrix, ObjectId(2)).unwrap();
        for k in 0..u.len() {
            let col: Vec<i64> = (0..u.len()).map(|i| matrix.get(i, k)).collect();
            let lo = *col.iter().min().unwrap();
            let hi = *col.iter().max().unwrap();
            let v: Vec<Rational> = col.iter().map(|&x| Rational::new(x - lo, hi - lo)).collect();
            assert_eq!(v, scale.v, "column {k}");
        }
    }

    #[test]
    fn ranking_and_cards() {
        let scale = value_scale(&example_matrix(), ObjectId(0)).unwrap();
        let groups = ranking(&scale);
        assert_eq!(groups, vec![vec![ObjectId(0)], vec![ObjectId(1)], vec![ObjectId(2)], vec![ObjectId(3)]]);
        assert_eq!(card_distribution(&scale, &groups).unwrap(), vec![1, 1, 0]);

        let scale = value_scale(&reconstruct_matrix(&[1, 0]), ObjectId(0)).unwrap();
        assert_eq!(card_distribution(&scale, &ranking(&scale)).unwrap(), vec![0]);

        let scale = value_scale(&reconstruct_matrix(&[4, 4, 0]), ObjectId(0)).unwrap();
        let groups = ranking(&scale);
        assert_eq!(groups, vec![vec![ObjectId(0), ObjectId(1)], vec![ObjectId(2)]]);
        assert_eq!(card_distribution(&scale, &groups).unwrap(), vec![3]);
    }

    #[test]
    fn tie_in_ranking() {
        let scale = value_scale(&reconstruct_matrix(&[1, 1, 0]), ObjectId(1)).unwrap();
        assert_eq!(ranking(&scale), vec![vec![ObjectId(0), ObjectId(1)], vec![ObjectId(2)]]);
    }

    #[test]
    fn multiplicative_examples() {
        let two = PreferenceMatrix::from_rows(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        let p = to_multiplicative(&two, 2.0).unwrap();
        assert_eq!(p.to_rows(), vec![vec![1.0, 4.0], vec![0.25, 1.0]]);

        let ones = to_multiplicative(&PreferenceMatrix::zeros(3), 7.5).unwrap();
        assert!(ones.to_rows().iter().flatten().all(|&x| x == 1.0));

        let p = to_multiplicative(&example_matrix(), 2.0).unwrap();
        assert!(p.max_consistency_residual() < 1e-9);
        assert!(p.max_reciprocity_residual() < 1e-9);

        assert_eq!(to_multiplicative(&two, 1.0).unwrap_err(), Error::InvalidBase(1.0));
        let nonrecip = PreferenceMatrix::from_rows(vec![vec![0, 2], vec![-1, 0]]).unwrap();
        assert_eq!(to_multiplicative(&nonrecip, 2.0).unwrap_err(), Error::NotReciprocal);
    }

    #[test]
    fn results_document_is_canonical() {
        let objects = ObjectSet::numbered(4).unwrap();
        let scale = value_scale(&example_matrix(), ObjectId(0)).unwrap();
        let doc = ResultsDocument::new(&objects, &scale).unwrap();
        assert_eq!(
            doc.to_canonical_json(),
            r#"{"cards_between":[1,1,0],"degenerate":false,"ranking":[["a1"],["a2"],["a3"],["a4"]],"u":[5,3,1,0],"v":["1","3/5","1/5","0"],"v_decimal":[1.0,0.6,0.2,0.0]}"#
        );
    }

    #[test]
    fn scale_serde_round_trip() {
        let scale = value_scale(&example_matrix(), ObjectId(0)).unwrap();
        let json = serde_json::to_string(&scale).unwrap();
        assert!(json.contains(r#""v":["1","3/5","1/5","0"]"#));
        assert_eq!(serde_json::from_str::<ValueScale>(&json).unwrap(), scale);
    }
}
