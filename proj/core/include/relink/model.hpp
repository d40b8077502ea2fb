#ifndef RELINK_MODEL_HPP
#define RELINK_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/tokenize.hpp"

namespace relink {

struct AuthorProfile {
    std::string author;
    TokenCounts counts;
};

/// Candidate authors sorted by log-score descending; ties broken by ascending
/// author id. Contains every model author exactly once.
struct Ranking {
    std::vector<std::pair<std::string, double>> entries;
};

/// Immutable per-author naive Bayes profiles for one token scheme.
///
/// Token probabilities are add-one smoothed over the scheme's full vocabulary:
///     P(t|U) = (count(t,U) + 1) / (total(U) + vocab_size)
/// so no token ever has zero probability. Scoring a token-count vector sums
/// count[t] * log P(t|U) in ascending token order, which keeps results
/// bit-identical across runs and worker counts.
class NBModel {
public:
    /// Builds from explicit profiles. Profiles are re-sorted by author id;
    /// duplicate ids, mismatched schemes or an empty profile list are errors.
    NBModel(TokenScheme scheme, std::vector<AuthorProfile> profiles);

    TokenScheme scheme() const { return scheme_; }
    std::size_t vocab() const { return vocab_; }
    std::size_t author_count() const { return authors_.size(); }

    /// Author ids in ascending order; scores and indices align with this list.
    const std::vector<std::string>& authors() const { return authors_; }

    /// Index of an author id; throws std::invalid_argument if unknown.
    std::size_t author_index(std::string_view author) const;

    std::span<const std::uint64_t> author_counts(std::size_t index) const;
    std::uint64_t author_total(std::size_t index) const { return totals_.at(index); }

    /// log P(token | author), always finite and <= 0.
    double token_log_prob(std::size_t author_index, std::size_t token) const;
    double token_log_prob(std::string_view author, std::size_t token) const;

    /// Log-likelihood of the token batch under every author, aligned with
    /// authors(). An all-zero count vector scores exactly 0 for everyone.
    /// Throws std::invalid_argument on a scheme mismatch.
    std::vector<double> score(const TokenCounts& tokens) const;
    void score_into(const TokenCounts& tokens, std::vector<double>& out) const;
    std::map<std::string, double> score_map(const TokenCounts& tokens) const;

    Ranking rank(const TokenCounts& tokens) const;

    /// 1-based position the author would occupy in rank(tokens), computed
    /// without materializing the full ranking.
    std::size_t rank_of(const TokenCounts& tokens, std::size_t author_index) const;

    /// Versioned little-endian binary serialization; save/load round-trips to
    /// byte-identical files.
    void save(const std::filesystem::path& path) const;
    static NBModel load(const std::filesystem::path& path);

private:
    TokenScheme scheme_;
    std::size_t vocab_;
    std::vector<std::string> authors_;       // ascending
    std::vector<std::uint64_t> counts_;      // author-major, authors x vocab
    std::vector<std::uint64_t> totals_;
    std::vector<double> log_probs_;          // author-major, authors x vocab
};

/// One profile per author from tokenize-and-count over all their tweets.
/// Zero authors is an error; an author whose tweets produce no tokens is legal
/// (smoothing gives a uniform profile).
NBModel build_model(const AuthorCorpus& corpus, TokenScheme scheme);
NBModel build_model(std::span<const std::pair<std::string, std::span<const Tweet>>> slices,
                    TokenScheme scheme);

/// 1-based position `index` takes when `scores` are ranked descending with
/// ties broken by ascending index. Computed without sorting; agrees with the
/// position of the same entry in a Ranking built from these scores.
std::size_t rank_position(const std::vector<double>& scores, std::size_t index);

/// Ranking by the beta-weighted combination of two single-scheme scores:
///     beta * text_score + (1 - beta) * hashtag_score
/// Both models must cover the identical author set; beta must lie in [0, 1].
/// beta == 1 reproduces the text-only ranking exactly and beta == 0 the
/// hashtag-only ranking, including bitwise-equal scores.
Ranking rank_combined(const NBModel& text_model, const NBModel& hashtag_model,
                      const TokenCounts& text_tokens, const TokenCounts& hashtag_tokens,
                      double beta);

}  // namespace relink

#endif  // RELINK_MODEL_HPP
