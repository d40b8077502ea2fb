// relink — corpus-scale tweet authorship linkage.
//
// Subcommands: stats, evaluate, train-beta, build-model, link, synth.
// Exit codes: 0 success, 1 usage/configuration error, 2 data error.
// Every command that draws randomness takes a mandatory --seed; identical
// flags and seed reproduce primary output files byte for byte.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relink/corpus.hpp"
#include "relink/experiment.hpp"
#include "relink/model.hpp"
#include "relink/report.hpp"
#include "relink/tokenize.hpp"

namespace {

using namespace relink;

struct InputOpts {
    std::vector<std::string> paths;
    std::string format = "jsonl";
    LoadOptions strips;
};

void add_input_options(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--input", in.paths, "input tweet file(s), merged in order")->required();
    cmd->add_option("--format", in.format, "input format")
        ->check(CLI::IsMember({"jsonl", "snap"}))
        ->capture_default_str();
    cmd->add_flag("--strip-retweets", in.strips.strip_retweets,
                  "drop tweets whose raw text starts with \"RT @\"");
    cmd->add_flag("--strip-urls", in.strips.strip_urls, "blank out http(s):// and www. spans");
    cmd->add_flag("--strip-mentions", in.strips.strip_mentions, "blank out @handle spans");
}

AuthorCorpus load_inputs(const InputOpts& in) {
    AuthorCorpus corpus;
    for (const std::string& path : in.paths) {
        if (in.format == "snap")
            load_snap_blocks_into(corpus, path, in.strips);
        else
            load_jsonl_into(corpus, path, in.strips);
    }
    return corpus;
}

struct BetaChoice {
    bool train = false;
    double value = 1.0;
};

BetaChoice parse_beta(const std::string& text) {
    if (text == "train") return {true, 0.0};
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || !(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(text);
        return {false, v};
    } catch (...) {
        throw std::invalid_argument("config: --beta must be a number in [0, 1] or 'train', got '" +
                                    text + "'");
    }
}

Metric metric_from_name(const std::string& name) {
    if (name == "top5") return Metric::Top5;
    if (name == "top10") return Metric::Top10;
    return Metric::Top1;
}

TokenScheme require_scheme(const std::string& name) {
    const std::optional<TokenScheme> scheme = scheme_from_name(name);
    if (!scheme) throw std::invalid_argument("config: unknown scheme '" + name + "'");
    return *scheme;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error(path + ": cannot open for writing");
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) throw std::runtime_error(path + ": write failed");
}

// ---------------------------------------------------------------- stats ----

struct StatsCmd {
    InputOpts in;
    std::string out;
};

int run_stats(const StatsCmd& cmd) {
    const AuthorCorpus corpus = load_inputs(cmd.in);
    const CorpusStats stats = corpus_stats(corpus, {1, 10, 50, 300, 500, 2000});

    std::cout << std::left;
    std::cout << std::setw(28) << "total_tweets" << stats.total_tweets << '\n';
    std::cout << std::setw(28) << "total_authors" << stats.total_authors << '\n';
    std::cout << std::setw(28) << "max_tweets_per_author" << stats.max_tweets_per_author << '\n';
    std::cout << std::setw(28) << "min_tweets_per_author" << stats.min_tweets_per_author << '\n';
    for (const auto& [threshold, fraction] : stats.fraction_at_least) {
        char line[64];
        std::snprintf(line, sizeof(line), "fraction_at_least_%" PRIu64, threshold);
        char value[32];
        std::snprintf(value, sizeof(value), "%.6f", fraction);
        std::cout << std::setw(28) << line << value << '\n';
    }
    if (!cmd.out.empty()) write_text_file(cmd.out, stats.to_csv());
    return 0;
}

// ------------------------------------------------------------- evaluate ----

struct EvaluateCmd {
    InputOpts in;
    std::string scheme = "uni";
    std::size_t min_tweets = 0;   // 0 = no prolificacy filter
    std::size_t max_tweets = 0;   // 0 = unbounded
    std::size_t hashtag_min = 0;  // 0 = no hashtag filter
    std::size_t sample_n = 0;     // 0 = keep every author
    std::size_t holdout = 100;
    std::vector<std::size_t> ar_sizes = {5, 10, 20, 50, 100};
    std::vector<std::size_t> topk = {1, 5, 10};
    std::vector<std::size_t> vary_users_sizes;
    std::uint64_t seed = 0;
    std::string beta;  // combined scheme only: number or "train"
    std::size_t inner_ar = 50;
    double grid_step = 0.1;
    std::string metric = "top1";
    unsigned workers = 0;
    std::string out;
};

AuthorCorpus prepare_corpus(const InputOpts& in, std::size_t min_tweets, std::size_t max_tweets,
                            std::size_t hashtag_min, std::size_t sample_n, std::uint64_t seed) {
    AuthorCorpus corpus = load_inputs(in);
    if (min_tweets > 0 || max_tweets > 0) {
        const std::optional<std::size_t> max =
            max_tweets > 0 ? std::optional<std::size_t>(max_tweets) : std::nullopt;
        corpus = filter_by_prolificacy(corpus, std::max<std::size_t>(min_tweets, 1), max);
    }
    if (hashtag_min > 0) corpus = filter_hashtag_bearing(corpus, hashtag_min);
    if (sample_n > 0) corpus = sample_authors(corpus, sample_n, seed);
    return corpus;
}

int run_evaluate(const EvaluateCmd& cmd) {
    // Configuration is rejected before any input is read.
    for (std::size_t y : cmd.ar_sizes) {
        if (y > cmd.holdout)
            throw std::invalid_argument("config: AR size " + std::to_string(y) +
                                        " exceeds the holdout of " + std::to_string(cmd.holdout));
    }
    for (std::size_t k : cmd.topk) {
        if (k != 1 && k != 5 && k != 10)
            throw std::invalid_argument(
                "config: report depths are fixed at top-1/5/10; --topk must be a subset of 1,5,10");
    }
    const bool combined = cmd.scheme == "combined";
    BetaChoice beta;
    if (combined) {
        if (cmd.beta.empty())
            throw std::invalid_argument(
                "config: the combined scheme requires --beta (a number in [0, 1] or 'train')");
        beta = parse_beta(cmd.beta);
        if (!cmd.vary_users_sizes.empty())
            throw std::invalid_argument("config: --vary-users supports single-token schemes only");
    } else if (!cmd.beta.empty()) {
        throw std::invalid_argument("config: --beta applies to the combined scheme only");
    }

    const AuthorCorpus corpus = prepare_corpus(cmd.in, cmd.min_tweets, cmd.max_tweets,
                                               cmd.hashtag_min, cmd.sample_n, cmd.seed);
    SplitConfig split_cfg;
    split_cfg.holdout = cmd.holdout;
    split_cfg.ar_sizes = cmd.ar_sizes;
    split_cfg.seed = cmd.seed;
    const std::vector<RecordPair> pairs = split(corpus, split_cfg);

    EvalOptions opts;
    opts.ar_sizes = cmd.ar_sizes;
    opts.workers = cmd.workers;

    LinkabilityReport report;
    if (combined) {
        double b = beta.value;
        if (beta.train) {
            const BetaTrainResult trained = train_beta(pairs, cmd.inner_ar, cmd.grid_step,
                                                       metric_from_name(cmd.metric), cmd.workers);
            b = trained.chosen;
            char line[64];
            std::snprintf(line, sizeof(line), "trained beta = %g\n", b);
            std::cout << line;
        }
        report = evaluate_combined(pairs, b, opts);
    } else if (!cmd.vary_users_sizes.empty()) {
        report = vary_users(pairs, require_scheme(cmd.scheme), cmd.vary_users_sizes, cmd.seed,
                            opts);
    } else {
        report = evaluate(pairs, require_scheme(cmd.scheme), opts);
    }

    report.print_table(std::cout);
    if (!cmd.out.empty()) report.write_csv(cmd.out);
    return 0;
}

// ----------------------------------------------------------- train-beta ----

struct TrainBetaCmd {
    InputOpts in;
    std::size_t min_tweets = 0;
    std::size_t max_tweets = 0;
    std::size_t hashtag_min = 300;  // paper's hashtag-prolificacy floor; 0 disables
    std::size_t sample_n = 0;
    std::size_t holdout = 100;
    std::size_t inner_ar = 50;
    double grid_step = 0.1;
    std::string metric = "top1";
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out;
};

int run_train_beta(const TrainBetaCmd& cmd) {
    const AuthorCorpus corpus = prepare_corpus(cmd.in, cmd.min_tweets, cmd.max_tweets,
                                               cmd.hashtag_min, cmd.sample_n, cmd.seed);
    if (corpus.author_count() < 2)
        throw std::runtime_error("train-beta: fewer than 2 hashtag-bearing authors after filtering");

    SplitConfig split_cfg;
    split_cfg.holdout = cmd.holdout;
    split_cfg.ar_sizes.clear();  // no outer evaluation here
    split_cfg.seed = cmd.seed;
    const std::vector<RecordPair> pairs = split(corpus, split_cfg);

    const BetaTrainResult result = train_beta(pairs, cmd.inner_ar, cmd.grid_step,
                                              metric_from_name(cmd.metric), cmd.workers);

    std::cout << std::right << std::setw(8) << "beta" << std::setw(10) << "top1" << std::setw(10)
              << "top5" << std::setw(10) << "top10" << '\n';
    for (const BetaTrainResult::Row& row : result.grid) {
        char line[96];
        std::snprintf(line, sizeof(line), "%8g%10.6f%10.6f%10.6f\n", row.beta, row.top1, row.top5,
                      row.top10);
        std::cout << line;
    }
    char chosen[48];
    std::snprintf(chosen, sizeof(chosen), "chosen beta = %g\n", result.chosen);
    std::cout << chosen;

    if (!cmd.out.empty()) write_text_file(cmd.out, result.to_csv());
    return 0;
}

// ---------------------------------------------------------- build-model ----

struct BuildModelCmd {
    InputOpts in;
    std::string scheme = "uni";
    std::size_t min_tweets = 0;
    std::size_t max_tweets = 0;
    std::string out;
};

int run_build_model(const BuildModelCmd& cmd) {
    const TokenScheme scheme = require_scheme(cmd.scheme);
    AuthorCorpus corpus = load_inputs(cmd.in);
    if (cmd.min_tweets > 0 || cmd.max_tweets > 0) {
        const std::optional<std::size_t> max =
            cmd.max_tweets > 0 ? std::optional<std::size_t>(cmd.max_tweets) : std::nullopt;
        corpus = filter_by_prolificacy(corpus, std::max<std::size_t>(cmd.min_tweets, 1), max);
    }
    if (corpus.author_count() == 0)
        throw std::runtime_error("build-model: no authors left to model");

    const NBModel model = build_model(corpus, scheme);
    model.save(cmd.out);
    std::cout << "wrote " << cmd.out << ": " << model.author_count() << " authors, scheme "
              << scheme_name(scheme) << ", vocab " << model.vocab() << '\n';
    return 0;
}

// ----------------------------------------------------------------- link ----

struct LinkCmd {
    std::string model;
    InputOpts query;
    std::string scheme = "uni";
    std::size_t topk = 10;
    std::string out;
};

int run_link(const LinkCmd& cmd) {
    const NBModel model = NBModel::load(cmd.model);
    const TokenScheme scheme = require_scheme(cmd.scheme);
    if (model.scheme() != scheme)
        throw std::invalid_argument("config: model file holds a '" +
                                    std::string(scheme_name(model.scheme())) +
                                    "' model but --scheme asked for '" + cmd.scheme + "'");

    // Every tweet in the query input forms one anonymous batch; author ids in
    // the query file are ignored.
    const AuthorCorpus query = load_inputs(cmd.query);
    TokenCounts counts(scheme);
    for (const auto& [author, tweets] : query.authors)
        for (const Tweet& tweet : tweets) count_into(counts, tweet.text);

    const bool empty = counts.total == 0;
    if (empty)
        std::cerr << "warning: query has no tokens under scheme '" << scheme_name(scheme)
                  << "'; ranking is a pure tie-break\n";

    const Ranking ranking = model.rank(counts);
    const std::size_t k = std::min(cmd.topk, ranking.entries.size());
    std::string text;
    if (empty) text += "# empty_tokens=true\n";
    for (std::size_t i = 0; i < k; ++i) {
        char score[32];
        std::snprintf(score, sizeof(score), "%.6f", ranking.entries[i].second);
        text += std::to_string(i + 1) + '\t' + ranking.entries[i].first + '\t' + score + '\n';
    }
    std::cout << text;
    if (!cmd.out.empty()) write_text_file(cmd.out, text);
    return 0;
}

// ---------------------------------------------------------------- synth ----

struct SynthCmd {
    std::size_t authors = 100;
    std::size_t tweets = 200;
    std::size_t tweet_len = 80;
    double concentration = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_synth(const SynthCmd& cmd) {
    SynthConfig cfg;
    cfg.n_authors = cmd.authors;
    cfg.tweets_per_author = cmd.tweets;
    cfg.tweet_len = cmd.tweet_len;
    cfg.concentration = cmd.concentration;
    cfg.seed = cmd.seed;
    const AuthorCorpus corpus = synth_corpus(cfg);

    std::string text;
    for (const auto& [author, tweets] : corpus.authors) {
        for (const Tweet& tweet : tweets) {
            nlohmann::ordered_json record;
            record["user"] = tweet.author;
            record["text"] = tweet.text;
            text += record.dump();
            text += '\n';
        }
    }
    write_text_file(cmd.out, text);
    std::cout << "wrote " << cmd.out << ": " << corpus.author_count() << " authors, "
              << corpus.tweet_count() << " tweets\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tweet authorship linkage: naive Bayes character profiles, IR/AR splits, "
                 "top-k linkability reports"};
    app.require_subcommand(1);

    StatsCmd stats_cfg;
    CLI::App* stats_cmd = app.add_subcommand("stats", "corpus statistics and prolificacy fractions");
    add_input_options(stats_cmd, stats_cfg.in);
    stats_cmd->add_option("--out", stats_cfg.out, "write the statistics as CSV");

    EvaluateCmd eval_cfg;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "IR/AR linkability evaluation sweep");
    add_input_options(eval_cmd, eval_cfg.in);
    eval_cmd->add_option("--scheme", eval_cfg.scheme, "token scheme")
        ->check(CLI::IsMember({"uni", "bi", "hashtag", "combined"}))
        ->capture_default_str();
    eval_cmd->add_option("--min-tweets", eval_cfg.min_tweets,
                         "keep authors with at least this many tweets (0 = no filter)");
    eval_cmd->add_option("--max-tweets", eval_cfg.max_tweets,
                         "keep authors with at most this many tweets (0 = unbounded)");
    eval_cmd->add_option("--hashtag-min", eval_cfg.hashtag_min,
                         "restrict to hashtag-bearing tweets, authors needing at least this many "
                         "(0 = off)");
    eval_cmd->add_option("--sample-n", eval_cfg.sample_n,
                         "seeded uniform author subsample (0 = keep all)");
    eval_cmd->add_option("--holdout", eval_cfg.holdout, "tweets held out per author as the AR pool")
        ->capture_default_str();
    eval_cmd->add_option("--ar-sizes", eval_cfg.ar_sizes, "anonymous record sizes")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--topk", eval_cfg.topk, "report depths; must be a subset of 1,5,10")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--vary-users", eval_cfg.vary_users_sizes,
                         "re-run over nested seeded author subsamples of these sizes")
        ->delimiter(',');
    eval_cmd->add_option("--seed", eval_cfg.seed, "random seed (mandatory, no wall-clock default)")
        ->required();
    eval_cmd->add_option("--beta", eval_cfg.beta,
                         "combined scheme weight: number in [0, 1] or 'train'");
    eval_cmd->add_option("--inner-ar", eval_cfg.inner_ar,
                         "inner AR size for --beta train (last tweets of each IR)")
        ->capture_default_str();
    eval_cmd->add_option("--grid-step", eval_cfg.grid_step, "beta grid step for --beta train")
        ->capture_default_str();
    eval_cmd->add_option("--metric", eval_cfg.metric, "selection metric for --beta train")
        ->check(CLI::IsMember({"top1", "top5", "top10"}))
        ->capture_default_str();
    eval_cmd->add_option("--workers", eval_cfg.workers,
                         "worker threads (0 = all cores); never changes results");
    eval_cmd->add_option("--out", eval_cfg.out, "write the report CSV here");

    TrainBetaCmd train_cfg;
    CLI::App* train_cmd =
        app.add_subcommand("train-beta", "grid-search the text/hashtag weight on an inner split");
    add_input_options(train_cmd, train_cfg.in);
    train_cmd->add_option("--min-tweets", train_cfg.min_tweets,
                          "keep authors with at least this many tweets (0 = no filter)");
    train_cmd->add_option("--max-tweets", train_cfg.max_tweets,
                          "keep authors with at most this many tweets (0 = unbounded)");
    train_cmd
        ->add_option("--hashtag-min", train_cfg.hashtag_min,
                     "restrict to hashtag-bearing tweets, authors needing at least this many "
                     "(0 = off)")
        ->capture_default_str();
    train_cmd->add_option("--sample-n", train_cfg.sample_n,
                          "seeded uniform author subsample (0 = keep all)");
    train_cmd->add_option("--holdout", train_cfg.holdout, "tweets held out per author")
        ->capture_default_str();
    train_cmd->add_option("--inner-ar", train_cfg.inner_ar, "inner AR size (last tweets of each IR)")
        ->capture_default_str();
    train_cmd->add_option("--grid-step", train_cfg.grid_step, "beta grid step")
        ->capture_default_str();
    train_cmd->add_option("--metric", train_cfg.metric, "selection metric")
        ->check(CLI::IsMember({"top1", "top5", "top10"}))
        ->capture_default_str();
    train_cmd->add_option("--seed", train_cfg.seed, "random seed (mandatory)")->required();
    train_cmd->add_option("--workers", train_cfg.workers, "worker threads (0 = all cores)");
    train_cmd->add_option("--out", train_cfg.out, "write the grid as CSV");

    BuildModelCmd build_cfg;
    CLI::App* build_cmd =
        app.add_subcommand("build-model", "serialize a naive Bayes profile model");
    add_input_options(build_cmd, build_cfg.in);
    build_cmd->add_option("--scheme", build_cfg.scheme, "token scheme")
        ->check(CLI::IsMember({"uni", "bi", "hashtag"}))
        ->capture_default_str();
    build_cmd->add_option("--min-tweets", build_cfg.min_tweets,
                          "keep authors with at least this many tweets (0 = no filter)");
    build_cmd->add_option("--max-tweets", build_cfg.max_tweets,
                          "keep authors with at most this many tweets (0 = unbounded)");
    build_cmd->add_option("--out", build_cfg.out, "model output path")->required();

    LinkCmd link_cfg;
    CLI::App* link_cmd =
        app.add_subcommand("link", "rank model authors against one anonymous tweet batch");
    link_cmd->add_option("--model", link_cfg.model, "serialized model path")->required();
    link_cmd->add_option("--query", link_cfg.query.paths, "query tweet file(s)")->required();
    link_cmd->add_option("--format", link_cfg.query.format, "query format")
        ->check(CLI::IsMember({"jsonl", "snap"}))
        ->capture_default_str();
    link_cmd->add_option("--scheme", link_cfg.scheme, "token scheme; must match the model")
        ->check(CLI::IsMember({"uni", "bi", "hashtag"}))
        ->capture_default_str();
    link_cmd->add_option("--topk", link_cfg.topk, "candidates to print")->capture_default_str();
    link_cmd->add_option("--out", link_cfg.out, "also write the ranking here");

    SynthCmd synth_cfg;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "generate a seeded synthetic corpus as JSONL");
    synth_cmd->add_option("--authors", synth_cfg.authors, "author count")->capture_default_str();
    synth_cmd->add_option("--tweets", synth_cfg.tweets, "tweets per author")
        ->capture_default_str();
    synth_cmd->add_option("--len", synth_cfg.tweet_len, "letters per tweet")
        ->capture_default_str();
    synth_cmd
        ->add_option("--concentration", synth_cfg.concentration,
                     "Dirichlet concentration; smaller = more distinctive authors")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_cfg.seed, "random seed (mandatory)")->required();
    synth_cmd->add_option("--out", synth_cfg.out, "output JSONL path")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(stats_cmd)) return run_stats(stats_cfg);
        if (app.got_subcommand(eval_cmd)) return run_evaluate(eval_cfg);
        if (app.got_subcommand(train_cmd)) return run_train_beta(train_cfg);
        if (app.got_subcommand(build_cmd)) return run_build_model(build_cfg);
        if (app.got_subcommand(link_cmd)) return run_link(link_cfg);
        if (app.got_subcommand(synth_cmd)) return run_synth(synth_cfg);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
