#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "relink/experiment.hpp"
#include "relink/model.hpp"
#include "relink/tokenize.hpp"

namespace {

using namespace relink;

const std::string kSampleTweet =
    "Just benchmarked the new parser -- 3x faster!! #perf #CppCon2024 "
    "details at http://example.com/run?id=42 cc @dev_team";

AuthorCorpus make_corpus(std::size_t authors) {
    SynthConfig cfg;
    cfg.n_authors = authors;
    cfg.tweets_per_author = 60;
    cfg.tweet_len = 80;
    cfg.concentration = 0.5;
    cfg.seed = 11;
    return synth_corpus(cfg);
}

}  // namespace

static void BM_Normalize(benchmark::State& state) {
    for (auto _ : state) {
        std::string norm = normalize(kSampleTweet);
        benchmark::DoNotOptimize(norm.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * kSampleTweet.size()));
}
BENCHMARK(BM_Normalize);

static void BM_Tokenize(benchmark::State& state) {
    const auto scheme = static_cast<TokenScheme>(state.range(0));
    for (auto _ : state) {
        std::vector<std::uint16_t> tokens = tokenize(kSampleTweet, scheme);
        benchmark::DoNotOptimize(tokens.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * kSampleTweet.size()));
}
BENCHMARK(BM_Tokenize)->Arg(0)->Arg(1)->Arg(2);  // uni / bi / hashtag

static void BM_CountInto(benchmark::State& state) {
    TokenCounts counts(TokenScheme::TextBigram);
    for (auto _ : state) {
        count_into(counts, kSampleTweet);
        benchmark::DoNotOptimize(counts.counts.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * kSampleTweet.size()));
}
BENCHMARK(BM_CountInto);

static void BM_BuildModel(benchmark::State& state) {
    const auto scheme = static_cast<TokenScheme>(state.range(1));
    const AuthorCorpus corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        NBModel model = build_model(corpus, scheme);
        benchmark::DoNotOptimize(&model);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(corpus.tweet_count()));
}
BENCHMARK(BM_BuildModel)->Args({100, 0})->Args({100, 1})->Args({500, 1});

static void BM_ScoreBatch(benchmark::State& state) {
    const AuthorCorpus corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
    const NBModel model = build_model(corpus, TokenScheme::TextBigram);

    TokenCounts counts(TokenScheme::TextBigram);
    const std::vector<Tweet>& tweets = corpus.authors.begin()->second;
    for (std::size_t i = 0; i < tweets.size() && i < 50; ++i) count_into(counts, tweets[i].text);

    std::vector<double> scores;
    for (auto _ : state) {
        model.score_into(counts, scores);
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(model.author_count()));
}
BENCHMARK(BM_ScoreBatch)->Arg(100)->Arg(1000);

static void BM_EvaluateSweep(benchmark::State& state) {
    SynthConfig cfg;
    cfg.n_authors = static_cast<std::size_t>(state.range(0));
    cfg.tweets_per_author = 60;
    cfg.tweet_len = 80;
    cfg.concentration = 0.5;
    cfg.seed = 11;
    SplitConfig split_cfg;
    split_cfg.holdout = 20;
    split_cfg.ar_sizes = {5, 10, 20};
    split_cfg.seed = 11;
    const std::vector<RecordPair> pairs = split(synth_corpus(cfg), split_cfg);

    EvalOptions opts;
    opts.ar_sizes = split_cfg.ar_sizes;
    opts.workers = 1;
    for (auto _ : state) {
        LinkabilityReport report = evaluate(pairs, TokenScheme::TextUnigram, opts);
        benchmark::DoNotOptimize(report.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pairs.size()));
}
BENCHMARK(BM_EvaluateSweep)->Arg(100)->Arg(300);

BENCHMARK_MAIN();
