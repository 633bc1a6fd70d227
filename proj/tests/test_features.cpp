#include <doctest.h>

#include <fstream>

#include "mwecx/features.hpp"
#include "mwecx/rng.hpp"
#include "support/fixtures.hpp"

using namespace mwecx;
using namespace mwecx::testing;

namespace {

BigramFrequencyTable paper_row_table() {
    BigramFrequencyTable t;
    t.add("sledge", "hammers", 39);
    t.add("property", "sector", 120);
    t.add("sector", "property", 3);  // order matters
    return t;
}

LexiconScorer paper_row_scorer() {
    LexiconScorer s(0.0);
    s.set("sledge", 0.70);
    s.set("hammers", 0.50);
    s.set("property", 0.30);
    s.set("sector", 0.20);
    return s;
}

}  // namespace

TEST_CASE("feature row for a two-token compound") {
    auto inst = make_instance("a1", "sledge hammers", 0.15, MweType::MwCompound, Genre::News);
    auto v = extract_features(inst, paper_row_table(), paper_row_scorer());
    CHECK(v.mwe_type == MweType::MwCompound);
    CHECK(v.length == 2);
    CHECK(v.frequency == doctest::Approx(39.0));
    CHECK(v.max_cw == doctest::Approx(0.70));
    CHECK(v.mean_cw == doctest::Approx(0.60));
    CHECK(v.genre == Genre::News);
}

TEST_CASE("missing bigram contributes zero") {
    auto inst = make_instance("a1", "unknown pairing", 0.05);
    auto v = extract_features(inst, paper_row_table(), paper_row_scorer());
    CHECK(v.frequency == doctest::Approx(0.0));
}

TEST_CASE("three-token phrase averages its two bigrams") {
    BigramFrequencyTable t;
    t.add("alpha", "beta", 10);
    t.add("beta", "gamma", 20);
    auto inst = make_instance("a1", "alpha beta gamma", 0.05);
    auto v = extract_features(inst, t, paper_row_scorer());
    CHECK(v.frequency == doctest::Approx(15.0));
    CHECK(v.length == 3);
}

TEST_CASE("bigram lookup is order-sensitive") {
    auto table = paper_row_table();
    auto fwd = make_instance("a1", "property sector", 0.05);
    auto rev = make_instance("a2", "sector property", 0.05);
    auto scorer = paper_row_scorer();
    CHECK(extract_features(fwd, table, scorer).frequency == doctest::Approx(120.0));
    CHECK(extract_features(rev, table, scorer).frequency == doctest::Approx(3.0));
}

TEST_CASE("add-k smoothing shifts all bigram counts") {
    FeatureOptions opts;
    opts.smoothing_k = 0.5;
    auto inst = make_instance("a1", "unknown pairing", 0.05);
    auto v = extract_features(inst, paper_row_table(), paper_row_scorer(), opts);
    CHECK(v.frequency == doctest::Approx(0.5));
}

TEST_CASE("mean_cw never exceeds max_cw") {
    SplitMix64 rng(7, 0);
    auto table = paper_row_table();
    LexiconScorer scorer(0.0);
    std::vector<std::string> words = {"red", "green", "blue", "cyan", "magenta", "yellow"};
    for (const auto& w : words) scorer.set(w, rng.next_double());
    for (int trial = 0; trial < 100; ++trial) {
        std::string phrase = words[rng.next_below(words.size())] + " " +
                             words[rng.next_below(words.size())] + " " +
                             words[rng.next_below(words.size())];
        auto v = extract_features(make_instance("t", phrase, 0.05), table, scorer);
        CHECK(v.mean_cw <= v.max_cw + 1e-12);
    }
}

TEST_CASE("heuristic scorer is monotone in length, antitone in frequency, clamped") {
    BigramFrequencyTable t;
    t.add("common", "word", 100000);
    t.add("rare", "word", 2);
    HeuristicScorer h(t);
    CHECK(h.score("rare") > h.score("common"));             // same length, rarer wins
    CHECK(h.score("pneumonoultramicroscopics") >= h.score("cat"));  // longer scores higher
    for (const char* w : {"a", "common", "rare", "extraordinarily-long-compound-word"}) {
        CHECK(h.score(w) >= 0.0);
        CHECK(h.score(w) <= 1.0);
    }
    CHECK(h.score("rare") == h.score("rare"));  // deterministic
}

TEST_CASE("lexicon loader rejects out-of-range scores") {
    TempDir dir;
    std::string path = dir.path("lex.tsv");
    std::ofstream out(path);
    out << "word\tscore\nhello\t1.2\n";
    out.close();
    CHECK_THROWS_AS(LexiconScorer::load(path), MalformedRow);
}

TEST_CASE("encoder fitting: hand arithmetic and zero-variance guard") {
    std::vector<FeatureVector> train(2);
    train[0].mwe_type = train[1].mwe_type = MweType::MwCompound;
    train[0].length = 2;
    train[1].length = 4;
    train[0].frequency = train[1].frequency = 10.0;  // constant
    train[0].max_cw = 0.2;
    train[1].max_cw = 0.6;
    train[0].mean_cw = 0.1;
    train[1].mean_cw = 0.5;
    auto s = fit_encoder(train);
    CHECK(s.length.mean == doctest::Approx(3.0));
    CHECK(s.length.stddev == doctest::Approx(1.0));
    CHECK(s.frequency.constant);
    CHECK(s.frequency.log1p_first);

    auto e0 = encode(train[0], s);
    // frequency slot is 0 because the feature was constant in training
    CHECK(e0[1] == doctest::Approx(0.0));

    // fitting twice gives identical state
    auto s2 = fit_encoder(train);
    CHECK(s.length.mean == s2.length.mean);
    CHECK(s.length.stddev == s2.length.stddev);

    CHECK_THROWS_AS(fit_encoder({}), InvalidArgument);
}

TEST_CASE("encoded layout: one-hot blocks sum to 1, dimension bookkeeping") {
    std::vector<FeatureVector> train(3);
    for (std::size_t i = 0; i < 3; ++i) {
        train[i].length = 2 + i;
        train[i].frequency = 5.0 * static_cast<double>(i);
        train[i].max_cw = 0.3 + 0.1 * static_cast<double>(i);
        train[i].mean_cw = 0.2 + 0.1 * static_cast<double>(i);
        train[i].mwe_type = kAllMweTypes[i + 1];
        train[i].genre = kAllGenres[i];
    }
    auto s = fit_encoder(train);
    CHECK(s.dimension() == 4 + 3 + 12);
    for (const auto& v : train) {
        auto e = encode(v, s);
        REQUIRE(e.size() == s.dimension());
        double genre_sum = 0.0, mwe_sum = 0.0;
        for (std::size_t i = 4; i < 7; ++i) genre_sum += e[i];
        for (std::size_t i = 7; i < 19; ++i) mwe_sum += e[i];
        CHECK(genre_sum == doctest::Approx(1.0));
        CHECK(mwe_sum == doctest::Approx(1.0));
    }

    // masking the MWE group removes its 12 slots entirely
    FeatureGroupSet no_mwe = all_feature_groups();
    no_mwe.erase(FeatureGroup::MweType);
    auto masked = fit_encoder(train, no_mwe);
    CHECK(masked.dimension() == 4 + 3);
    CHECK(encode(train[0], masked).size() == 7);

    // a vector equal to the training means encodes numeric slots to ~0
    FeatureVector mean_vec = train[1];
    mean_vec.length = 3;
    mean_vec.frequency = std::expm1((std::log1p(0.0) + std::log1p(5.0) + std::log1p(10.0)) / 3.0);
    mean_vec.max_cw = 0.4;
    mean_vec.mean_cw = 0.3;
    auto e = encode(mean_vec, s);
    for (std::size_t i = 0; i < 4; ++i) CHECK(e[i] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("not-MWE rows cannot be encoded") {
    std::vector<FeatureVector> train(2);
    train[0].length = 2;
    train[1].length = 3;
    auto s = fit_encoder(train);
    FeatureVector v;
    v.mwe_type = MweType::NotMwe;
    v.length = 2;
    CHECK_THROWS_AS(encode(v, s), InvalidArgument);
}

TEST_CASE("bigram table file round trip") {
    TempDir dir;
    std::string path = dir.path("bigrams.tsv");
    std::ofstream out(path);
    out << "token1\ttoken2\tcount\nsledge\thammers\t39\nproperty\tsector\t120\n";
    out.close();
    auto t = BigramFrequencyTable::load(path);
    CHECK(t.count("sledge", "hammers") == 39);
    CHECK(t.count("hammers", "sledge") == 0);
    CHECK(t.unigram_count("sledge") == 39);
}
