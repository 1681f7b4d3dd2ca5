#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace ctm {

struct Rating {
  std::string item;
  std::string rater;
  int score = 0;
};

// Items x raters table of ordinal scores in [0, num_categories). Missing
// cells are allowed; every item needs at least two ratings.
class RatingMatrix {
 public:
  RatingMatrix(const std::vector<Rating>& ratings, int num_categories = 4);

  int num_categories() const { return num_categories_; }
  std::size_t num_items() const { return items_.size(); }
  // Per item, how many raters chose each category.
  const std::vector<std::vector<int>>& category_counts() const { return counts_; }

 private:
  int num_categories_;
  std::vector<std::string> items_;
  std::vector<std::vector<int>> counts_;
};

enum class AgreementWeights {
  kIdentity,  // unweighted AC1
  kOrdinal,   // w(k,l) = 1 - d(d+1) / (D(D+1)), d = |k-l|, D = q-1
};

std::vector<std::vector<double>> agreement_weights(int num_categories, AgreementWeights scheme);

struct AgreementBreakdown {
  double observed = 0.0;  // weighted p_a
  double chance = 0.0;    // Gwet's p_e
  double coefficient = 0.0;
};

// Gwet's chance-corrected agreement (AC1; with non-identity weights, AC2).
AgreementBreakdown gwet_agreement(const RatingMatrix& ratings, AgreementWeights scheme);

inline double gwet_ac1(const RatingMatrix& ratings, AgreementWeights scheme = AgreementWeights::kOrdinal) {
  return gwet_agreement(ratings, scheme).coefficient;
}

}  // namespace ctm
