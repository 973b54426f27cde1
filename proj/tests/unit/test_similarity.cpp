#include <random>

#include <gtest/gtest.h>

#include "instasum/similarity.hpp"

using namespace instasum;

namespace {

std::vector<Token> toks(std::initializer_list<const char*> words) {
  std::vector<Token> out;
  for (const char* w : words) out.push_back(Token{w});
  return out;
}

// Jaccard over explicitly expanded sets, written against std::set_* algorithms.
double jaccard_oracle(const TermSet& a, const TermSet& b, const std::vector<TermSet>& groups) {
  auto expand = [&](const TermSet& s) {
    TermSet out = s;
    for (const auto& g : groups)
      for (const auto& t : s)
        if (g.contains(t)) out.insert(g.begin(), g.end());
    return out;
  };
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const TermSet ea = expand(a), eb = expand(b);
  std::vector<std::string> inter, uni;
  std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(inter));
  std::set_union(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(uni));
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

}  // namespace

TEST(Cosine, KnownValues) {
  EXPECT_DOUBLE_EQ(cosine_similarity(term_vector(toks({"a", "b"})), term_vector(toks({"a", "b"}))), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(term_vector(toks({"a"})), term_vector(toks({"b"}))), 0.0);
  EXPECT_NEAR(cosine_similarity(term_vector(toks({"a", "b"})), term_vector(toks({"a", "c"}))), 0.5, 1e-12);
  EXPECT_NEAR(cosine_similarity(term_vector(toks({"a", "a", "b"})), term_vector(toks({"a"}))), 2.0 / std::sqrt(5.0),
              1e-12);
}

TEST(Cosine, EmptyVectorsScoreZero) {
  EXPECT_EQ(cosine_similarity(TermVector{}, TermVector{}), 0.0);
  EXPECT_EQ(cosine_similarity(term_vector(toks({"a"})), TermVector{}), 0.0);
}

TEST(Semantic, SynonymsCountAsOverlap) {
  SynonymLexicon lex(std::vector<TermSet>{{"car", "automobile"}});
  EXPECT_DOUBLE_EQ(semantic_similarity({"car"}, {"automobile"}, lex), 1.0);
  EXPECT_DOUBLE_EQ(semantic_similarity({"car"}, {"automobile"}, SynonymLexicon{}), 0.0);
  EXPECT_DOUBLE_EQ(semantic_similarity({"car", "red"}, {"automobile"}, lex), 2.0 / 3.0);
}

TEST(Semantic, EmptySets) {
  EXPECT_EQ(semantic_similarity({}, {}, SynonymLexicon{}), 1.0);
  EXPECT_EQ(semantic_similarity({"a"}, {}, SynonymLexicon{}), 0.0);
}

TEST(Semantic, FourOfFiveIsExactlyPointEight) {
  EXPECT_EQ(semantic_similarity({"w1", "w2", "w3", "w4", "w5"}, {"w1", "w2", "w3", "w4"}, SynonymLexicon{}), 0.8);
}

TEST(Lexicon, LoadsFixtureAndNormalizes) {
  const auto lex = SynonymLexicon::load(std::string(INSTASUM_FIXTURE_DIR) + "/lexicon.tsv");
  EXPECT_FALSE(lex.empty());
  EXPECT_TRUE(lex.expand({"love"}).contains("adore"));
  EXPECT_TRUE(lex.expand({"car"}).contains("automobile"));
  EXPECT_EQ(lex.expand({"zebra"}), TermSet{"zebra"});
  EXPECT_THROW(SynonymLexicon::load("/nonexistent/lexicon.tsv"), IoError);
  SynonymLexicon empty;
  EXPECT_THROW(empty.add_group({}), ArgumentError);
}

TEST(Combine, WeightsAndBounds) {
  const auto s = combine_scores(0.2, 0.6, 0.5);
  EXPECT_DOUBLE_EQ(s.combined, 0.4);
  EXPECT_DOUBLE_EQ(combine_scores(0.2, 0.6, 0.0).combined, 0.2);
  EXPECT_DOUBLE_EQ(combine_scores(0.2, 0.6, 1.0).combined, 0.6);
  EXPECT_THROW(combine_scores(0.2, 0.6, 1.5), ArgumentError);
  EXPECT_THROW(combine_scores(0.2, 0.6, -0.1), ArgumentError);
  EXPECT_THROW(combine_scores(0.2, 0.6, std::nan("")), ArgumentError);
}

TEST(CombinedSimilarity, RunsPreprocessingFirst) {
  PreprocessConfig cfg;
  cfg.stopwords = {"the", "a"};
  const auto s = combined_similarity("The CAR!", "a car", 0.5, SynonymLexicon{}, cfg);
  EXPECT_DOUBLE_EQ(s.cosine, 1.0);
  EXPECT_DOUBLE_EQ(s.semantic, 1.0);
  EXPECT_DOUBLE_EQ(s.combined, 1.0);
  const auto none = combined_similarity("the", "", 0.5, SynonymLexicon{}, cfg);
  EXPECT_DOUBLE_EQ(none.cosine, 0.0);
  EXPECT_DOUBLE_EQ(none.semantic, 1.0);
}

TEST(CombinedSimilarity, ContextMatchesFreeFunction) {
  SimilarityContext ctx{PreprocessConfig{}, SynonymLexicon(std::vector<TermSet>{{"happy", "glad"}})};
  EXPECT_EQ(ctx("happy day", "glad day", 0.5),
            combined_similarity("happy day", "glad day", 0.5, ctx.lexicon, ctx.preprocess));
  EXPECT_THROW(ctx("a", "b", 2.0), ArgumentError);
}

TEST(SimilarityProperties, BoundedSymmetricReflexive) {
  std::mt19937 rng(42);
  const std::vector<std::string> vocab{"sun", "beach", "car", "automobile", "love", "adore", "rain", "city", "x"};
  SynonymLexicon lex({{"car", "automobile"}, {"love", "adore"}});
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(0, 6);
  std::uniform_real_distribution<double> alpha(0.0, 1.0);
  auto random_tokens = [&] {
    std::vector<Token> t;
    for (std::size_t i = 0, n = len(rng); i < n; ++i) t.push_back(Token{vocab[pick(rng)]});
    return t;
  };
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_tokens(), b = random_tokens();
    const double al = alpha(rng);
    const auto ab = token_similarity(a, b, al, lex), ba = token_similarity(b, a, al, lex);
    EXPECT_EQ(ab.combined, ba.combined);
    for (double v : {ab.cosine, ab.semantic, ab.combined}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (!a.empty()) {
      EXPECT_DOUBLE_EQ(token_similarity(a, a, al, lex).combined, 1.0);
    }
  }
}

TEST(SimilarityProperties, JaccardMatchesSetOracle) {
  std::mt19937 rng(5);
  const std::vector<TermSet> groups{{"t0", "t1"}, {"t2", "t3", "t4"}, {"t4", "t5"}};
  SynonymLexicon lex(groups);
  std::bernoulli_distribution in(0.3);
  for (int i = 0; i < 500; ++i) {
    TermSet a, b;
    for (int t = 0; t < 10; ++t) {
      if (in(rng)) a.insert("t" + std::to_string(t));
      if (in(rng)) b.insert("t" + std::to_string(t));
    }
    EXPECT_DOUBLE_EQ(semantic_similarity(a, b, lex), jaccard_oracle(a, b, groups));
  }
}
