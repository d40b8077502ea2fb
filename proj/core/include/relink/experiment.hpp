#ifndef RELINK_EXPERIMENT_HPP
#define RELINK_EXPERIMENT_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/model.hpp"
#include "relink/report.hpp"
#include "relink/tokenize.hpp"

namespace relink {

/// How each author's tweets are split into an identified record (IR, training)
/// and an anonymous-record pool (AR pool, held out for linking).
struct SplitConfig {
    std::size_t holdout = 100;                         // tweets reserved per author
    std::vector<std::size_t> ar_sizes = {5, 10, 20, 50, 100};
    std::uint64_t seed = 0;
};

/// One author's evaluation split. The AR of size y is the first y tweets of
/// ar_pool, so ARs of increasing size are nested.
struct RecordPair {
    std::string author;
    std::vector<Tweet> ir;
    std::vector<Tweet> ar_pool;
};

enum class Metric { Top1, Top5, Top10 };

struct BetaTrainResult {
    struct Row {
        double beta;
        double top1, top5, top10;
    };
    std::vector<Row> grid;
    double chosen = 1.0;  // grid argmax of the selection metric, ties to larger beta

    std::string to_csv() const;  // beta,top1,top5,top10,chosen
};

struct DualAccount {
    std::string owner;            // must not collide with any base author id
    std::vector<Tweet> account_a;
    std::vector<Tweet> account_b;
};

struct SynthConfig {
    std::size_t n_authors = 1;
    std::size_t tweets_per_author = 1;
    std::size_t tweet_len = 1;      // letters per tweet, excluding inserted spaces
    double concentration = 1.0;     // symmetric Dirichlet parameter over 26 letters
    std::uint64_t seed = 0;
};

struct EvalOptions {
    std::vector<std::size_t> ar_sizes = {5, 10, 20, 50, 100};
    unsigned workers = 0;  // 0 = hardware concurrency; results never depend on it
};

/// Shuffles each author's tweets with a per-author engine derived from
/// (cfg.seed, author id), assigns all but the last cfg.holdout tweets to the
/// IR and the last cfg.holdout to the AR pool. Every author must own strictly
/// more than cfg.holdout tweets; the first offender is named in the error.
/// Pairs come back in ascending author order.
std::vector<RecordPair> split(AuthorCorpus corpus, const SplitConfig& cfg);

/// Builds one model from all IRs, then for every author and AR size ranks the
/// AR token batch and scores whether the true author lands in the top 1/5/10.
/// AR batches with no tokens under the scheme count as failures at every
/// depth and are reported in n_empty_ars.
LinkabilityReport evaluate(const std::vector<RecordPair>& pairs, TokenScheme scheme,
                           const EvalOptions& opts = {});

/// Same protocol with the beta-weighted text+hashtag score. An AR counts as
/// empty only when every scheme that actually contributes weight (text for
/// beta > 0, hashtags for beta < 1) has no tokens, so the beta = 1 / beta = 0
/// rows match the single-scheme evaluations exactly.
LinkabilityReport evaluate_combined(const std::vector<RecordPair>& pairs, double beta,
                                    const EvalOptions& opts = {});

/// Re-runs evaluate() inside nested seeded author subsamples of the given
/// sizes; both the model and the candidate set shrink to the subsample.
LinkabilityReport vary_users(const std::vector<RecordPair>& pairs, TokenScheme scheme,
                             const std::vector<std::size_t>& sizes, std::uint64_t seed,
                             const EvalOptions& opts = {});

/// Grid-searches beta on an IR-internal split: the last inner_ar tweets of
/// each IR (in their already-shuffled order) become inner ARs, the rest the
/// inner IRs. grid_step must divide 1 evenly; the grid is {0, step, ..., 1}.
/// chosen is the argmax of `metric`, ties resolved toward larger beta.
BetaTrainResult train_beta(const std::vector<RecordPair>& pairs, std::size_t inner_ar,
                           double grid_step, Metric metric = Metric::Top1,
                           unsigned workers = 0);
BetaTrainResult train_beta_grid(const std::vector<RecordPair>& pairs, std::size_t inner_ar,
                                const std::vector<double>& grid, Metric metric = Metric::Top1,
                                unsigned workers = 0);

/// Appends one RecordPair per dual-account owner: a seeded coin picks which
/// account becomes the IR wholesale; the other account is shuffled and its
/// first min(holdout, size) tweets become the AR pool. Owner ids must be
/// distinct from each other and from every base author.
std::vector<RecordPair> merge_dual(std::vector<RecordPair> base_pairs,
                                   const std::vector<DualAccount>& duals,
                                   std::size_t holdout, std::uint64_t seed);

/// evaluate() against the full merged candidate set, but with linkability
/// fractions computed over the dual owners only.
LinkabilityReport evaluate_dual(const std::vector<RecordPair>& merged,
                                const std::set<std::string>& dual_ids, TokenScheme scheme,
                                const EvalOptions& opts = {});

/// Desk-scale synthetic corpus: each author draws a letter distribution from
/// a symmetric Dirichlet over a-z, then emits i.i.d. letters in tweets of
/// cfg.tweet_len letters with spaces inserted every 3..8 letters. Entirely
/// deterministic for a fixed seed, independent of thread count.
AuthorCorpus synth_corpus(const SynthConfig& cfg);

}  // namespace relink

#endif  // RELINK_EXPERIMENT_HPP
