#include "relink/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "rng_util.hpp"

namespace relink {

namespace {

void check_ar_sizes(const std::vector<std::size_t>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("evaluate: at least one AR size required");
    for (std::size_t y : sizes)
        if (y == 0) throw std::invalid_argument("evaluate: AR sizes must be at least 1");
}

std::vector<const RecordPair*> ref_all(const std::vector<RecordPair>& pairs) {
    std::vector<const RecordPair*> refs;
    refs.reserve(pairs.size());
    for (const RecordPair& p : pairs) refs.push_back(&p);
    return refs;
}

NBModel model_from(const std::vector<const RecordPair*>& pairs, TokenScheme scheme) {
    std::vector<std::pair<std::string, std::span<const Tweet>>> slices;
    slices.reserve(pairs.size());
    for (const RecordPair* p : pairs)
        slices.emplace_back(p->author, std::span<const Tweet>(p->ir));
    return build_model(slices, scheme);
}

/// AR sizes processed smallest-first so the nested prefixes of each pool are
/// consumed in one pass; results land in the caller's size order.
std::vector<std::size_t> size_order(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sizes[a] < sizes[b]; });
    return order;
}

void check_pools(const std::vector<const RecordPair*>& queries, std::size_t max_size) {
    for (const RecordPair* q : queries) {
        if (q->ar_pool.size() < max_size)
            throw std::invalid_argument("evaluate: AR size " + std::to_string(max_size) +
                                        " exceeds author '" + q->author + "' AR pool of " +
                                        std::to_string(q->ar_pool.size()) + " tweets");
    }
}

/// positions[q * n_sizes + k]: 1-based rank of the true author of queries[q]
/// for ar_sizes[k], or 0 when that AR batch has no tokens. Each slot is
/// written by exactly one worker, so the result never depends on the thread
/// count.
std::vector<std::size_t> single_scheme_positions(const NBModel& model,
                                                 const std::vector<const RecordPair*>& queries,
                                                 const std::vector<std::size_t>& ar_sizes,
                                                 unsigned workers) {
    const std::vector<std::size_t> order = size_order(ar_sizes);
    check_pools(queries, ar_sizes[order.back()]);

    const std::size_t n_sizes = ar_sizes.size();
    std::vector<std::size_t> positions(queries.size() * n_sizes, 0);
    detail::parallel_for(queries.size(), workers, [&](std::size_t qi) {
        const RecordPair& q = *queries[qi];
        const std::size_t self = model.author_index(q.author);
        TokenCounts counts(model.scheme());
        std::vector<double> scores;
        std::size_t consumed = 0;
        for (std::size_t k : order) {
            for (; consumed < ar_sizes[k]; ++consumed) count_into(counts, q.ar_pool[consumed].text);
            if (counts.total == 0) continue;  // empty AR: slot stays 0
            model.score_into(counts, scores);
            positions[qi * n_sizes + k] = rank_position(scores, self);
        }
    });
    return positions;
}

/// An AR is empty for the combined score only when every scheme carrying
/// weight (text for beta > 0, hashtags for beta < 1) has no tokens; that way
/// the beta = 1 and beta = 0 rows reproduce the single-scheme rows exactly.
bool combined_empty(double beta, bool text_empty, bool hashtag_empty) {
    return (beta == 0.0 || text_empty) && (beta == 1.0 || hashtag_empty);
}

std::vector<std::size_t> combined_positions(const NBModel& text_model,
                                            const NBModel& hashtag_model,
                                            const std::vector<const RecordPair*>& queries,
                                            double beta, const std::vector<std::size_t>& ar_sizes,
                                            unsigned workers) {
    const std::vector<std::size_t> order = size_order(ar_sizes);
    check_pools(queries, ar_sizes[order.back()]);

    const std::size_t n_sizes = ar_sizes.size();
    std::vector<std::size_t> positions(queries.size() * n_sizes, 0);
    detail::parallel_for(queries.size(), workers, [&](std::size_t qi) {
        const RecordPair& q = *queries[qi];
        const std::size_t self = text_model.author_index(q.author);
        TokenCounts text_counts(TokenScheme::TextUnigram);
        TokenCounts hashtag_counts(TokenScheme::HashtagUnigram);
        std::vector<double> text_scores, hashtag_scores, combined;
        std::size_t consumed = 0;
        for (std::size_t k : order) {
            for (; consumed < ar_sizes[k]; ++consumed) {
                count_into(text_counts, q.ar_pool[consumed].text);
                count_into(hashtag_counts, q.ar_pool[consumed].text);
            }
            if (combined_empty(beta, text_counts.total == 0, hashtag_counts.total == 0)) continue;
            text_model.score_into(text_counts, text_scores);
            hashtag_model.score_into(hashtag_counts, hashtag_scores);
            combined.resize(text_scores.size());
            for (std::size_t j = 0; j < combined.size(); ++j)
                combined[j] = beta * text_scores[j] + (1.0 - beta) * hashtag_scores[j];
            positions[qi * n_sizes + k] = rank_position(combined, self);
        }
    });
    return positions;
}

LinkabilityReport rows_from_positions(std::string_view scheme_label, std::size_t user_count,
                                      std::optional<double> beta,
                                      const std::vector<std::size_t>& ar_sizes,
                                      const std::vector<std::size_t>& positions,
                                      std::size_t n_queries) {
    LinkabilityReport report;
    const std::size_t n_sizes = ar_sizes.size();
    for (std::size_t k = 0; k < n_sizes; ++k) {
        std::size_t top1 = 0, top5 = 0, top10 = 0, empty = 0;
        for (std::size_t q = 0; q < n_queries; ++q) {
            const std::size_t pos = positions[q * n_sizes + k];
            if (pos == 0) {
                ++empty;
                continue;
            }
            if (pos <= 1) ++top1;
            if (pos <= 5) ++top5;
            if (pos <= 10) ++top10;
        }
        ReportRow row;
        row.scheme = std::string(scheme_label);
        row.user_count = user_count;
        row.ar_size = ar_sizes[k];
        row.beta = beta;
        const double denom = static_cast<double>(n_queries);
        row.top1 = static_cast<double>(top1) / denom;
        row.top5 = static_cast<double>(top5) / denom;
        row.top10 = static_cast<double>(top10) / denom;
        row.n_ars = n_queries;
        row.n_empty_ars = empty;
        report.rows.push_back(std::move(row));
    }
    return report;
}

double normal01(std::mt19937_64& rng) {
    // Box-Muller, one value per call: caching the second value would make the
    // engine's consumption pattern depend on call parity.
    double u1;
    do {
        u1 = detail::uniform01(rng);
    } while (u1 == 0.0);
    const double u2 = detail::uniform01(rng);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double gamma_sample(std::mt19937_64& rng, double shape) {
    // Marsaglia-Tsang with the shape < 1 boost. Hand-rolled because
    // std::gamma_distribution's algorithm is implementation-defined and would
    // break cross-platform reproducibility.
    if (shape < 1.0) {
        double u;
        do {
            u = detail::uniform01(rng);
        } while (u == 0.0);
        return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal01(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u;
        do {
            u = detail::uniform01(rng);
        } while (u == 0.0);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

std::vector<RecordPair> split(AuthorCorpus corpus, const SplitConfig& cfg) {
    if (cfg.holdout == 0) throw std::invalid_argument("split: holdout must be at least 1");
    for (std::size_t y : cfg.ar_sizes) {
        if (y == 0) throw std::invalid_argument("split: AR sizes must be at least 1");
        if (y > cfg.holdout)
            throw std::invalid_argument("split: AR size " + std::to_string(y) +
                                        " exceeds the holdout of " + std::to_string(cfg.holdout));
    }

    std::vector<RecordPair> pairs;
    pairs.reserve(corpus.author_count());
    for (auto& [author, tweets] : corpus.authors) {
        if (tweets.size() <= cfg.holdout)
            throw std::invalid_argument(
                "split: author '" + author + "' has " + std::to_string(tweets.size()) +
                " tweets; needs more than the holdout of " + std::to_string(cfg.holdout));
        std::mt19937_64 rng(detail::derive_seed(cfg.seed, author));
        detail::fisher_yates(tweets, rng);

        RecordPair pair;
        pair.author = author;
        const auto cut = tweets.begin() + static_cast<std::ptrdiff_t>(tweets.size() - cfg.holdout);
        pair.ir.assign(std::make_move_iterator(tweets.begin()), std::make_move_iterator(cut));
        pair.ar_pool.assign(std::make_move_iterator(cut), std::make_move_iterator(tweets.end()));
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

LinkabilityReport evaluate(const std::vector<RecordPair>& pairs, TokenScheme scheme,
                           const EvalOptions& opts) {
    if (pairs.empty()) throw std::invalid_argument("evaluate: no record pairs");
    check_ar_sizes(opts.ar_sizes);
    const std::vector<const RecordPair*> refs = ref_all(pairs);
    const NBModel model = model_from(refs, scheme);
    const std::vector<std::size_t> positions =
        single_scheme_positions(model, refs, opts.ar_sizes, opts.workers);
    return rows_from_positions(scheme_name(scheme), pairs.size(), std::nullopt, opts.ar_sizes,
                               positions, pairs.size());
}

LinkabilityReport evaluate_combined(const std::vector<RecordPair>& pairs, double beta,
                                    const EvalOptions& opts) {
    if (pairs.empty()) throw std::invalid_argument("evaluate: no record pairs");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("evaluate: beta must lie in [0, 1]");
    check_ar_sizes(opts.ar_sizes);
    const std::vector<const RecordPair*> refs = ref_all(pairs);
    const NBModel text_model = model_from(refs, TokenScheme::TextUnigram);
    const NBModel hashtag_model = model_from(refs, TokenScheme::HashtagUnigram);
    const std::vector<std::size_t> positions =
        combined_positions(text_model, hashtag_model, refs, beta, opts.ar_sizes, opts.workers);
    return rows_from_positions("combined", pairs.size(), beta, opts.ar_sizes, positions,
                               pairs.size());
}

LinkabilityReport vary_users(const std::vector<RecordPair>& pairs, TokenScheme scheme,
                             const std::vector<std::size_t>& sizes, std::uint64_t seed,
                             const EvalOptions& opts) {
    if (pairs.empty()) throw std::invalid_argument("vary_users: no record pairs");
    if (sizes.empty())
        throw std::invalid_argument("vary_users: at least one subsample size required");
    for (std::size_t s : sizes) {
        if (s == 0 || s > pairs.size())
            throw std::invalid_argument("vary_users: subsample size " + std::to_string(s) +
                                        " is outside [1, " + std::to_string(pairs.size()) + "]");
    }
    check_ar_sizes(opts.ar_sizes);

    // One shuffle; subsamples are its nested prefixes, so the candidates at
    // size s are a superset of those at any smaller size.
    std::vector<std::size_t> shuffled(pairs.size());
    std::iota(shuffled.begin(), shuffled.end(), 0);
    std::mt19937_64 rng(seed);
    detail::fisher_yates(shuffled, rng);

    LinkabilityReport report;
    for (std::size_t s : sizes) {
        std::vector<const RecordPair*> refs;
        refs.reserve(s);
        for (std::size_t i = 0; i < s; ++i) refs.push_back(&pairs[shuffled[i]]);
        const NBModel model = model_from(refs, scheme);
        const std::vector<std::size_t> positions =
            single_scheme_positions(model, refs, opts.ar_sizes, opts.workers);
        report.append(
            rows_from_positions(scheme_name(scheme), s, std::nullopt, opts.ar_sizes, positions, s));
    }
    return report;
}

BetaTrainResult train_beta_grid(const std::vector<RecordPair>& pairs, std::size_t inner_ar,
                                const std::vector<double>& grid, Metric metric, unsigned workers) {
    if (pairs.empty()) throw std::invalid_argument("train_beta: no record pairs");
    if (inner_ar == 0) throw std::invalid_argument("train_beta: inner AR size must be at least 1");
    if (grid.empty()) throw std::invalid_argument("train_beta: empty beta grid");
    for (double b : grid)
        if (!(b >= 0.0 && b <= 1.0))
            throw std::invalid_argument("train_beta: beta values must lie in [0, 1]");
    for (const RecordPair& p : pairs) {
        if (p.ir.size() <= inner_ar)
            throw std::invalid_argument("train_beta: author '" + p.author + "' IR has " +
                                        std::to_string(p.ir.size()) +
                                        " tweets; needs more than the inner AR of " +
                                        std::to_string(inner_ar));
    }

    // Inner split: the last inner_ar tweets of each IR (in their split order)
    // become the inner AR, the rest the inner IR. The outer AR pool is never
    // touched, so beta is chosen without looking at evaluation data.
    std::vector<std::pair<std::string, std::span<const Tweet>>> inner_irs;
    inner_irs.reserve(pairs.size());
    for (const RecordPair& p : pairs)
        inner_irs.emplace_back(p.author,
                               std::span<const Tweet>(p.ir.data(), p.ir.size() - inner_ar));
    const NBModel text_model = build_model(inner_irs, TokenScheme::TextUnigram);
    const NBModel hashtag_model = build_model(inner_irs, TokenScheme::HashtagUnigram);

    const std::size_t n_beta = grid.size();
    std::vector<std::size_t> positions(pairs.size() * n_beta, 0);
    detail::parallel_for(pairs.size(), workers, [&](std::size_t qi) {
        const RecordPair& q = pairs[qi];
        const std::size_t self = text_model.author_index(q.author);
        TokenCounts text_counts(TokenScheme::TextUnigram);
        TokenCounts hashtag_counts(TokenScheme::HashtagUnigram);
        for (std::size_t i = q.ir.size() - inner_ar; i < q.ir.size(); ++i) {
            count_into(text_counts, q.ir[i].text);
            count_into(hashtag_counts, q.ir[i].text);
        }
        const bool text_empty = text_counts.total == 0;
        const bool hashtag_empty = hashtag_counts.total == 0;
        // Score each scheme once; every beta reuses the two vectors.
        std::vector<double> text_scores, hashtag_scores;
        text_model.score_into(text_counts, text_scores);
        hashtag_model.score_into(hashtag_counts, hashtag_scores);
        std::vector<double> combined(text_scores.size());
        for (std::size_t b = 0; b < n_beta; ++b) {
            const double beta = grid[b];
            if (combined_empty(beta, text_empty, hashtag_empty)) continue;
            for (std::size_t j = 0; j < combined.size(); ++j)
                combined[j] = beta * text_scores[j] + (1.0 - beta) * hashtag_scores[j];
            positions[qi * n_beta + b] = rank_position(combined, self);
        }
    });

    BetaTrainResult result;
    result.grid.reserve(n_beta);
    result.chosen = grid.front();
    double best_value = -1.0;
    const double denom = static_cast<double>(pairs.size());
    for (std::size_t b = 0; b < n_beta; ++b) {
        std::size_t top1 = 0, top5 = 0, top10 = 0;
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const std::size_t pos = positions[q * n_beta + b];
            if (pos == 0) continue;
            if (pos <= 1) ++top1;
            if (pos <= 5) ++top5;
            if (pos <= 10) ++top10;
        }
        const BetaTrainResult::Row row{grid[b], static_cast<double>(top1) / denom,
                                       static_cast<double>(top5) / denom,
                                       static_cast<double>(top10) / denom};
        result.grid.push_back(row);
        const double value = metric == Metric::Top1   ? row.top1
                             : metric == Metric::Top5 ? row.top5
                                                      : row.top10;
        if (value > best_value || (value == best_value && row.beta > result.chosen)) {
            best_value = value;
            result.chosen = row.beta;
        }
    }
    return result;
}

BetaTrainResult train_beta(const std::vector<RecordPair>& pairs, std::size_t inner_ar,
                           double grid_step, Metric metric, unsigned workers) {
    if (!(grid_step > 0.0 && grid_step <= 1.0))
        throw std::invalid_argument("train_beta: grid step must lie in (0, 1]");
    const double steps = std::round(1.0 / grid_step);
    if (std::abs(steps * grid_step - 1.0) > 1e-9)
        throw std::invalid_argument("train_beta: grid step must divide 1 evenly");
    const auto n_steps = static_cast<std::size_t>(steps);
    std::vector<double> grid;
    grid.reserve(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
        grid.push_back(static_cast<double>(i) / static_cast<double>(n_steps));
    return train_beta_grid(pairs, inner_ar, grid, metric, workers);
}

std::string BetaTrainResult::to_csv() const {
    std::string out = "beta,top1,top5,top10,chosen\n";
    char buf[128];
    for (const Row& r : grid) {
        std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,%.6f,%d\n", r.beta, r.top1, r.top5, r.top10,
                      r.beta == chosen ? 1 : 0);
        out += buf;
    }
    return out;
}

std::vector<RecordPair> merge_dual(std::vector<RecordPair> base_pairs,
                                   const std::vector<DualAccount>& duals, std::size_t holdout,
                                   std::uint64_t seed) {
    if (holdout == 0) throw std::invalid_argument("merge_dual: holdout must be at least 1");
    std::set<std::string> taken;
    for (const RecordPair& p : base_pairs) taken.insert(p.author);

    for (const DualAccount& dual : duals) {
        if (dual.owner.empty()) throw std::invalid_argument("merge_dual: empty owner id");
        if (!taken.insert(dual.owner).second)
            throw std::invalid_argument("merge_dual: owner id '" + dual.owner +
                                        "' collides with an existing author");
        if (dual.account_a.empty() || dual.account_b.empty())
            throw std::invalid_argument("merge_dual: owner '" + dual.owner +
                                        "' has an empty account");

        std::mt19937_64 rng(detail::derive_seed(seed, dual.owner));
        const bool a_is_ir = detail::bounded(rng, 2) == 0;

        RecordPair pair;
        pair.author = dual.owner;
        pair.ir = a_is_ir ? dual.account_a : dual.account_b;
        pair.ar_pool = a_is_ir ? dual.account_b : dual.account_a;
        detail::fisher_yates(pair.ar_pool, rng);
        if (pair.ar_pool.size() > holdout) pair.ar_pool.resize(holdout);
        // Both records belong to the owner from here on; the original account
        // ids must not leak into the merged corpus.
        for (Tweet& t : pair.ir) t.author = dual.owner;
        for (Tweet& t : pair.ar_pool) t.author = dual.owner;
        base_pairs.push_back(std::move(pair));
    }

    std::sort(base_pairs.begin(), base_pairs.end(),
              [](const RecordPair& a, const RecordPair& b) { return a.author < b.author; });
    return base_pairs;
}

LinkabilityReport evaluate_dual(const std::vector<RecordPair>& merged,
                                const std::set<std::string>& dual_ids, TokenScheme scheme,
                                const EvalOptions& opts) {
    if (merged.empty()) throw std::invalid_argument("evaluate: no record pairs");
    if (dual_ids.empty()) throw std::invalid_argument("evaluate: no dual-account owners given");
    check_ar_sizes(opts.ar_sizes);

    const std::vector<const RecordPair*> all = ref_all(merged);
    std::vector<const RecordPair*> queries;
    queries.reserve(dual_ids.size());
    for (const RecordPair* p : all)
        if (dual_ids.contains(p->author)) queries.push_back(p);
    if (queries.size() != dual_ids.size()) {
        for (const std::string& id : dual_ids) {
            if (std::none_of(merged.begin(), merged.end(),
                             [&](const RecordPair& p) { return p.author == id; }))
                throw std::invalid_argument("evaluate: dual owner '" + id +
                                            "' is missing from the merged pairs");
        }
    }

    const NBModel model = model_from(all, scheme);
    const std::vector<std::size_t> positions =
        single_scheme_positions(model, queries, opts.ar_sizes, opts.workers);
    return rows_from_positions(scheme_name(scheme), merged.size(), std::nullopt, opts.ar_sizes,
                               positions, queries.size());
}

AuthorCorpus synth_corpus(const SynthConfig& cfg) {
    if (cfg.n_authors == 0) throw std::invalid_argument("synth_corpus: n_authors must be at least 1");
    if (cfg.tweets_per_author == 0)
        throw std::invalid_argument("synth_corpus: tweets_per_author must be at least 1");
    if (cfg.tweet_len == 0) throw std::invalid_argument("synth_corpus: tweet_len must be at least 1");
    if (!(cfg.concentration > 0.0))
        throw std::invalid_argument("synth_corpus: concentration must be positive");

    AuthorCorpus corpus;
    for (std::size_t a = 0; a < cfg.n_authors; ++a) {
        char id[32];
        std::snprintf(id, sizeof(id), "u%06zu", a);
        std::mt19937_64 rng(detail::derive_seed(cfg.seed, id));

        // Per-author letter distribution: symmetric Dirichlet as normalized
        // i.i.d. gammas, turned into a CDF for inverse-transform sampling.
        std::array<double, 26> cdf{};
        double sum = 0.0;
        for (double& g : cdf) {
            g = gamma_sample(rng, cfg.concentration);
            sum += g;
        }
        double acc = 0.0;
        for (double& g : cdf) {
            acc += g / sum;
            g = acc;
        }
        cdf.back() = 1.0;  // absorb rounding shortfall so every draw lands

        std::vector<Tweet> tweets;
        tweets.reserve(cfg.tweets_per_author);
        for (std::size_t t = 0; t < cfg.tweets_per_author; ++t) {
            std::string text;
            text.reserve(cfg.tweet_len + cfg.tweet_len / 3);
            std::size_t gap = 3 + detail::bounded(rng, 6);  // letters until the next space
            std::size_t run = 0;
            for (std::size_t i = 0; i < cfg.tweet_len; ++i) {
                if (run == gap) {
                    text.push_back(' ');
                    run = 0;
                    gap = 3 + detail::bounded(rng, 6);
                }
                const double u = detail::uniform01(rng);
                const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
                const auto letter = std::min<std::ptrdiff_t>(it - cdf.begin(), 25);
                text.push_back(static_cast<char>('a' + letter));
                ++run;
            }
            tweets.push_back(Tweet{id, std::move(text), std::nullopt});
        }
        corpus.authors.emplace(id, std::move(tweets));
    }
    return corpus;
}

}  // namespace relink
