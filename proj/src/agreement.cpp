#include "ctm/agreement.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "ctm/error.hpp"

namespace ctm {

RatingMatrix::RatingMatrix(const std::vector<Rating>& ratings, int num_categories)
    : num_categories_(num_categories) {
  if (num_categories < 2) throw InvalidArgument("a rating scale needs at least 2 categories");
  std::map<std::string, std::map<std::string, int>> table;
  for (const auto& r : ratings) {
    if (r.score < 0 || r.score >= num_categories) {
      throw InvalidArgument("score " + std::to_string(r.score) + " for item '" + r.item +
                            "' is outside [0, " + std::to_string(num_categories - 1) + "]");
    }
    if (!table[r.item].emplace(r.rater, r.score).second) {
      throw InvalidArgument("rater '" + r.rater + "' rated item '" + r.item + "' twice");
    }
  }
  if (table.empty()) throw InvalidArgument("no ratings");
  for (const auto& [item, by_rater] : table) {
    if (by_rater.size() < 2) {
      throw InvalidArgument("item '" + item + "' has fewer than 2 ratings");
    }
    std::vector<int> counts(static_cast<std::size_t>(num_categories), 0);
    for (const auto& [rater, score] : by_rater) ++counts[static_cast<std::size_t>(score)];
    items_.push_back(item);
    counts_.push_back(std::move(counts));
  }
}

std::vector<std::vector<double>> agreement_weights(int q, AgreementWeights scheme) {
  std::vector<std::vector<double>> w(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(q)));
  const double max_span = static_cast<double>((q - 1) * q);
  for (int k = 0; k < q; ++k) {
    for (int l = 0; l < q; ++l) {
      const int d = std::abs(k - l);
      w[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
          scheme == AgreementWeights::kIdentity ? (d == 0 ? 1.0 : 0.0)
                                                : 1.0 - static_cast<double>(d * (d + 1)) / max_span;
    }
  }
  return w;
}

AgreementBreakdown gwet_agreement(const RatingMatrix& ratings, AgreementWeights scheme) {
  const int q = ratings.num_categories();
  const auto w = agreement_weights(q, scheme);
  const auto& counts = ratings.category_counts();
  const double n = static_cast<double>(counts.size());

  AgreementBreakdown out;
  std::vector<double> pi(static_cast<std::size_t>(q), 0.0);
  std::set<int> used;
  for (const auto& row : counts) {
    double r = 0.0;
    for (int c : row) r += c;
    double item_agreement = 0.0;
    for (int k = 0; k < q; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (row[ku] == 0) continue;
      used.insert(k);
      double weighted = 0.0;
      for (int l = 0; l < q; ++l) weighted += w[ku][static_cast<std::size_t>(l)] * row[static_cast<std::size_t>(l)];
      item_agreement += row[ku] * (weighted - 1.0);
      pi[ku] += row[ku] / r;
    }
    out.observed += item_agreement / (r * (r - 1.0));
  }
  out.observed /= n;

  double weight_total = 0.0;
  for (const auto& row : w) {
    for (double x : row) weight_total += x;
  }
  double spread = 0.0;
  for (auto& p : pi) {
    p /= n;
    spread += p * (1.0 - p);
  }
  out.chance = weight_total / static_cast<double>(q * (q - 1)) * spread;

  // A single category in use: every rater agrees on everything.
  if (used.size() < 2 || out.chance >= 1.0) {
    out.coefficient = 1.0;
    return out;
  }
  out.coefficient = (out.observed - out.chance) / (1.0 - out.chance);
  return out;
}

}  // namespace ctm
