#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "ctm/corpus.hpp"
#include "ctm/error.hpp"
#include "ctm/text.hpp"
#include "temp_dir.hpp"

namespace ctm {
namespace {

using testing::TempDir;

Document doc(std::string id, std::string text, std::string lang = "en") {
  return {std::move(id), std::move(lang), std::move(text)};
}

TEST(TextTest, SplitsOnUnicodeWhitespace) {
  // U+00A0 no-break space and U+3000 ideographic space both separate tokens.
  const auto tokens = text::split_whitespace("a\xC2\xA0" "b\t c\xE3\x80\x80" "d\n");
  EXPECT_EQ(tokens, (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(TextTest, NormalizesCaseAndPunctuation) {
  EXPECT_EQ(text::normalize_tokens("\"Hello,\" WORLD! ... Über (État)"),
            (std::vector<std::string>{"hello", "world", "über", "état"}));
  EXPECT_EQ(text::strip_punctuation("--don't--"), "don't");
}

TEST(LoadCorpusTest, ReadsWellFormedLinesInOrder) {
  TempDir dir;
  const auto path = dir.write("c.jsonl",
                              R"({"id":"d1","lang":"it","text":"uno"})"
                              "\n"
                              R"({"id":"d2","text":"due"})"
                              "\n"
                              R"({"id":"d3","lang":"it","text":"tre"})"
                              "\n");
  const auto result = load_corpus(path, "");
  ASSERT_EQ(result.documents.size(), 3u);
  EXPECT_EQ(result.documents[0], doc("d1", "uno", "it"));
  EXPECT_EQ(result.documents[1].lang, "");
  EXPECT_EQ(result.documents[2].id, "d3");
  EXPECT_EQ(result.dropped_empty, 0u);

  const auto forced = load_corpus(path, "en");
  for (const auto& d : forced.documents) EXPECT_EQ(d.lang, "en");
}

TEST(LoadCorpusTest, DropsEmptyText) {
  TempDir dir;
  const auto path = dir.write("c.jsonl",
                              R"({"id":"d1","text":"kept"})"
                              "\n"
                              R"({"id":"d2","text":"   "})"
                              "\n");
  const auto result = load_corpus(path, "en");
  EXPECT_EQ(result.documents.size(), 1u);
  EXPECT_EQ(result.dropped_empty, 1u);
}

TEST(LoadCorpusTest, MinCharsFilter) {
  TempDir dir;
  const auto path = dir.write("c.jsonl",
                              R"({"id":"d1","text":"short"})"
                              "\n"
                              R"({"id":"d2","text":"a considerably longer text"})"
                              "\n");
  const auto result = load_corpus(path, "en", {.min_chars = 10});
  ASSERT_EQ(result.documents.size(), 1u);
  EXPECT_EQ(result.documents[0].id, "d2");
  EXPECT_EQ(result.dropped_short, 1u);
}

TEST(LoadCorpusTest, MalformedLineReportsLineNumber) {
  TempDir dir;
  const auto path = dir.write("c.jsonl", R"({"id":"d1","text":"ok"})"
                                         "\n{not json\n");
  try {
    load_corpus(path, "en");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpusTest, UnreadableFile) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl", "en"), IoError);
}

TEST(TruncateTokensTest, Examples) {
  EXPECT_EQ(truncate_tokens(doc("d", "a b c d e"), 200).text, "a b c d e");
  EXPECT_EQ(truncate_tokens(doc("d", "a b c"), 2).text, "a b");

  std::string long_text;
  for (int i = 0; i < 300; ++i) long_text += "t" + std::to_string(i) + " ";
  const auto cut = truncate_tokens(doc("d", long_text, "fr"), 200);
  const auto tokens = text::split_whitespace(cut.text);
  ASSERT_EQ(tokens.size(), 200u);
  EXPECT_EQ(tokens.front(), "t0");
  EXPECT_EQ(tokens.back(), "t199");
  EXPECT_EQ(cut.id, "d");
  EXPECT_EQ(cut.lang, "fr");
  EXPECT_THROW(truncate_tokens(doc("d", "x"), 0), InvalidArgument);
}

TEST(TruncateTokensTest, IdempotentOnRandomTexts) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(0, 40), n(1, 30), ch(0, 5);
  const char* pieces[] = {"w", " ", "  ", "\t", "x.", "\xC2\xA0"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string t = "w";
    for (int i = len(rng); i > 0; --i) t += pieces[ch(rng)];
    const auto limit = static_cast<std::size_t>(n(rng));
    const auto once = truncate_tokens(doc("d", t), limit);
    EXPECT_EQ(truncate_tokens(once, limit), once);
  }
}

TEST(BuildVocabularyTest, KeepsAllWhenUnderCapacity) {
  const auto v = build_vocabulary({doc("1", "alpha beta"), doc("2", "gamma alpha")}, {}, 2000);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"alpha", "beta", "gamma"}));
}

TEST(BuildVocabularyTest, FrequencyOrderAndStopwords) {
  const auto v = build_vocabulary({doc("1", "x x y z")}, {"z"}, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"x"}));
}

TEST(BuildVocabularyTest, TieBreakIsLexicographic) {
  // Frozen from tests/oracles/small_values_oracle.py.
  const auto v = build_vocabulary({doc("1", "b a")}, {}, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"a"}));
}

TEST(BuildVocabularyTest, AllStopwordsIsAnError) {
  EXPECT_THROW(build_vocabulary({doc("1", "the a")}, {"the", "a"}, 10), InvalidArgument);
  EXPECT_THROW(build_vocabulary({}, {}, 10), InvalidArgument);
}

TEST(BuildVocabularyTest, InvariantsOnRandomCorpora) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> word(0, 60);
  std::vector<Document> docs;
  for (int d = 0; d < 30; ++d) {
    std::string t;
    for (int i = 0; i < 40; ++i) t += "w" + std::to_string(word(rng)) + " ";
    docs.push_back(doc(std::to_string(d), t));
  }
  const std::set<std::string> stop = {"w1", "w2", "w3"};
  const auto v = build_vocabulary(docs, stop, 25);
  EXPECT_EQ(v, build_vocabulary(docs, stop, 25));
  EXPECT_LE(v.size(), 25u);
  std::set<std::string> unique(v.tokens().begin(), v.tokens().end());
  EXPECT_EQ(unique.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_FALSE(stop.contains(v.token(i)));
    EXPECT_EQ(v.index(v.token(i)), static_cast<std::int64_t>(i));
  }
}

TEST(ToBowTest, Examples) {
  const Vocabulary vocab({"a", "b"});
  const auto bow = to_bow(doc("d", "a a b"), vocab);
  EXPECT_EQ(bow.counts, (std::map<std::size_t, std::uint32_t>{{0, 2}, {1, 1}}));
  EXPECT_EQ(bow.vocab_size, 2u);
  EXPECT_TRUE(to_bow(doc("d", "q r s"), vocab).empty());
  EXPECT_THROW(to_bow(doc("d", "a"), Vocabulary{}), InvalidArgument);
}

TEST(ToBowTest, CountSumMatchesBruteForceScan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> word(0, 3000);
  std::vector<std::string> tokens;
  for (int i = 0; i < 2000; ++i) tokens.push_back("v" + std::to_string(i));
  const Vocabulary vocab(tokens);
  for (int trial = 0; trial < 20; ++trial) {
    std::string t;
    for (int i = 0; i < 200; ++i) t += "V" + std::to_string(word(rng)) + (i % 7 == 0 ? ", " : " ");
    const auto bow = to_bow(doc("d", t), vocab);
    // Oracle: lowercase each raw token, drop the comma, look it up linearly.
    std::uint64_t expected = 0;
    for (auto raw : text::split_whitespace(t)) {
      if (raw.back() == ',') raw.pop_back();
      raw[0] = 'v';
      if (std::find(tokens.begin(), tokens.end(), raw) != tokens.end()) ++expected;
    }
    EXPECT_EQ(bow.total(), expected);
    EXPECT_LE(bow.total(), 200u);
    for (const auto& [idx, count] : bow.counts) {
      EXPECT_LT(idx, vocab.size());
      EXPECT_GE(count, 1u);
    }
  }
}

TEST(VocabularyFileTest, RoundTripsOneTokenPerLine) {
  TempDir dir;
  const Vocabulary v({"zeta", "alpha", "über"});
  write_vocabulary(v, dir / "vocab.txt");
  EXPECT_EQ(testing::read_file(dir / "vocab.txt"), "zeta\nalpha\nüber\n");
  EXPECT_EQ(read_vocabulary(dir / "vocab.txt"), v);
}

TEST(AlignParallelTest, FullAndNoOverlap) {
  const auto full = align_parallel({{"en", {doc("d1", "x")}}, {"it", {doc("d1", "y", "it")}}}, "en");
  ASSERT_EQ(full.entities.size(), 1u);
  EXPECT_EQ(full.entities.at("d1").size(), 2u);

  const auto none = align_parallel({{"en", {doc("d1", "x")}}, {"it", {doc("d2", "y", "it")}}}, "en");
  ASSERT_EQ(none.entities.size(), 1u);
  EXPECT_EQ(none.entities.at("d1").size(), 1u);
  EXPECT_EQ(none.coverage.at("it"), 0u);
  EXPECT_EQ(none.coverage.at("en"), 1u);
}

TEST(AlignParallelTest, FiveLanguageTestSet) {
  std::map<std::string, std::vector<Document>> corpora;
  const std::vector<std::string> langs = {"en", "it", "fr", "pt", "de"};
  for (const auto& lang : langs) {
    for (int i = 0; i < 300; ++i) corpora[lang].push_back(doc("e" + std::to_string(i), "text", lang));
  }
  // Extra non-English entity that must not appear.
  corpora["de"].push_back(doc("stray", "text", "de"));
  const auto pc = align_parallel(corpora, "en");
  EXPECT_EQ(pc.entities.size(), 300u);
  for (const auto& [id, by_lang] : pc.entities) EXPECT_EQ(by_lang.size(), 5u);
  for (const auto& lang : langs) EXPECT_EQ(pc.coverage.at(lang), 300u);
  EXPECT_FALSE(pc.entities.contains("stray"));
}

TEST(AlignParallelTest, Errors) {
  EXPECT_THROW(align_parallel({{"it", {doc("d1", "x")}}}, "en"), InvalidArgument);
  try {
    align_parallel({{"en", {doc("d1", "x")}}, {"it", {doc("dup", "a"), doc("dup", "b")}}}, "en");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("dup"), std::string::npos);
  }
}

}  // namespace
}  // namespace ctm
