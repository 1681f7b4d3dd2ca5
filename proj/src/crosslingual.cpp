#include "ctm/crosslingual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ctm/error.hpp"

namespace ctm {
namespace {

void require_same_k(const PredictionSet& a, const PredictionSet& b) {
  if (a.num_topics() != b.num_topics()) {
    throw InvalidArgument("prediction sets have different topic counts (" + std::to_string(a.num_topics()) +
                          " vs " + std::to_string(b.num_topics()) + ")");
  }
}

std::vector<double> clamp_normalize(const std::vector<double>& v, double epsilon) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [epsilon](double x) { return std::max(x, epsilon); });
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (auto& x : out) x /= sum;
  return out;
}

std::vector<double> centroid(const std::vector<std::string>& words, const EmbeddingMatrix& table,
                             const char* side) {
  std::vector<double> c(table.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& w : words) {
    const auto row = table.find(w);
    if (row < 0) continue;
    const auto vec = table.vector(static_cast<std::size_t>(row));
    for (std::size_t i = 0; i < vec.size(); ++i) c[i] += vec[i];
    ++found;
  }
  if (found == 0) throw InvalidArgument(std::string("no word of topic ") + side + " has a vector");
  for (auto& x : c) x /= static_cast<double>(found);
  return c;
}

}  // namespace

void PredictionSet::add(std::string id, TopicDistribution dist) {
  if (dist.theta.size() != num_topics_) {
    throw InvalidArgument("prediction for '" + id + "' has " + std::to_string(dist.theta.size()) +
                          " topics, expected " + std::to_string(num_topics_));
  }
  double sum = 0.0;
  for (double x : dist.theta) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("prediction for '" + id + "' has a negative or non-finite component");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidArgument("prediction for '" + id + "' sums to " + std::to_string(sum) + ", not 1");
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw InvalidArgument("duplicate prediction id '" + id + "'");
  }
  ids_.push_back(std::move(id));
  dists_.push_back(std::move(dist));
}

const TopicDistribution* PredictionSet::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &dists_[it->second];
}

PredictionSet PredictionSet::restricted_to(const std::vector<std::string>& ids) const {
  PredictionSet out(num_topics_);
  for (const auto& id : ids) {
    const auto* d = find(id);
    if (d == nullptr) throw InvalidArgument("no prediction for id '" + id + "'");
    out.add(id, *d);
  }
  return out;
}

double match_rate(const PredictionSet& a, const PredictionSet& b) {
  require_same_k(a, b);
  if (a.size() != b.size()) throw InvalidArgument("prediction sets cover different ids");
  if (a.size() == 0) throw InvalidArgument("match rate of empty prediction sets");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto* other = b.find(a.ids()[i]);
    if (other == nullptr) throw InvalidArgument("id '" + a.ids()[i] + "' missing from second prediction set");
    if (a.at(i).argmax() == other->argmax()) ++matches;
  }
  return 100.0 * static_cast<double>(matches) / static_cast<double>(a.size());
}

double kl_divergence(const TopicDistribution& p, const TopicDistribution& q, double epsilon) {
  if (p.theta.size() != q.theta.size()) throw InvalidArgument("KL divergence of distributions with different K");
  const auto ps = clamp_normalize(p.theta, epsilon);
  const auto qs = clamp_normalize(q.theta, epsilon);
  double kl = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) kl += ps[k] * std::log(ps[k] / qs[k]);
  // Rounding can leave a -1e-17 residue for identical inputs.
  return std::max(kl, 0.0);
}

double centroid_similarity(const std::vector<std::string>& topic_a,
                           const std::vector<std::string>& topic_b,
                           const EmbeddingMatrix& word_vectors) {
  const auto a = centroid(topic_a, word_vectors, "a");
  const auto b = centroid(topic_b, word_vectors, "b");
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("zero-norm topic centroid");
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

TopicDistribution uniform_distribution(std::size_t num_topics) {
  if (num_topics == 0) throw InvalidArgument("uniform distribution needs K >= 1");
  return {std::vector<double>(num_topics, 1.0 / static_cast<double>(num_topics))};
}

double uniform_match_rate(const PredictionSet& reference) {
  if (reference.size() == 0) throw InvalidArgument("match rate of an empty prediction set");
  // All K uniform components tie, so the reference argmax is always among
  // them and earns a 1/K share.
  return 100.0 / static_cast<double>(reference.num_topics());
}

nlohmann::json CrossLingualReport::to_json() const {
  const auto row = [](const LanguageScores& s) {
    nlohmann::json j = {{"documents", s.documents}, {"mat", s.match}, {"kl", s.kl}};
    j["cd"] = s.centroid ? nlohmann::json(*s.centroid) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [lang, scores] : languages) langs[lang] = row(scores);
  return {{"num_topics", num_topics}, {"languages", langs}, {"baseline", row(baseline)}};
}

CrossLingualReport evaluate_crosslingual(
    const PredictionSet& english, const std::map<std::string, PredictionSet>& other_languages,
    const std::vector<std::vector<std::string>>& topic_words,
    const EmbeddingMatrix* word_vectors, const CrossLingualOptions& options) {
  if (english.size() == 0) throw InvalidArgument("English prediction set is empty");
  if (word_vectors != nullptr && topic_words.size() != english.num_topics()) {
    throw InvalidArgument("need one word list per topic for centroid similarity");
  }
  std::vector<std::vector<std::string>> heads;
  for (const auto& words : topic_words) {
    heads.emplace_back(words.begin(),
                       words.begin() + static_cast<std::ptrdiff_t>(std::min(options.centroid_words, words.size())));
  }

  CrossLingualReport report;
  report.num_topics = english.num_topics();
  for (const auto& [lang, preds] : other_languages) {
    require_same_k(english, preds);
    if (preds.size() == 0) throw InvalidArgument("prediction set for '" + lang + "' is empty");
    const PredictionSet reference = english.restricted_to(preds.ids());

    LanguageScores scores;
    scores.documents = preds.size();
    scores.match = match_rate(preds, reference);
    double kl_sum = 0.0;
    double cd_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& test = preds.at(i);
      const auto& eng = reference.at(i);
      kl_sum += options.kl_direction == KlDirection::kTestToEnglish
                    ? kl_divergence(test, eng, options.epsilon)
                    : kl_divergence(eng, test, options.epsilon);
      if (word_vectors != nullptr) {
        cd_sum += centroid_similarity(heads[test.argmax()], heads[eng.argmax()], *word_vectors);
      }
    }
    const double n = static_cast<double>(preds.size());
    scores.kl = kl_sum / n;
    if (word_vectors != nullptr) scores.centroid = cd_sum / n;
    report.languages.emplace(lang, scores);
  }

  const auto uniform = uniform_distribution(english.num_topics());
  double base_kl = 0.0;
  for (std::size_t i = 0; i < english.size(); ++i) {
    base_kl += options.baseline_kl_direction == BaselineKlDirection::kUniformToEnglish
                   ? kl_divergence(uniform, english.at(i), options.epsilon)
                   : kl_divergence(english.at(i), uniform, options.epsilon);
  }
  report.baseline.documents = english.size();
  report.baseline.match = uniform_match_rate(english);
  report.baseline.kl = base_kl / static_cast<double>(english.size());
  return report;
}

}  // namespace ctm
