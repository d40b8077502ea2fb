#ifndef RELINK_CORPUS_HPP
#define RELINK_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relink {

/// Raised when an input file violates its format contract. The message
/// always names the file and the offending line or block.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct Tweet {
    std::string author;                      // non-empty account id
    std::string text;                        // raw UTF-8, no length cap
    std::optional<std::string> timestamp;    // informational only, never parsed

    bool operator==(const Tweet&) const = default;
};

/// Per-author tweet lists, keyed by author id. Tweets keep file order within
/// each author; the same id appearing in several input files is merged by
/// concatenation in load order.
struct AuthorCorpus {
    std::map<std::string, std::vector<Tweet>, std::less<>> authors;

    std::size_t author_count() const { return authors.size(); }
    std::size_t tweet_count() const;
};

struct CorpusStats {
    std::uint64_t total_tweets = 0;
    std::uint64_t total_authors = 0;
    std::uint64_t max_tweets_per_author = 0;
    std::uint64_t min_tweets_per_author = 0;
    std::map<std::uint64_t, double> fraction_at_least;  // threshold -> fraction of authors

    std::string to_csv() const;
};

struct LoadOptions {
    bool strip_retweets = false;   // drop tweets whose raw text starts with "RT @"
    bool strip_urls = false;       // blank out http(s)://... and www.... spans
    bool strip_mentions = false;   // blank out @handle spans
};

/// One JSON object per line with keys "user", "text" and optional "ts".
/// Blank lines are skipped; anything else that fails to parse is an error
/// naming the 1-based line number. An empty file yields an empty corpus.
AuthorCorpus load_jsonl(const std::filesystem::path& path, const LoadOptions& opts = {});
void load_jsonl_into(AuthorCorpus& corpus, const std::filesystem::path& path,
                     const LoadOptions& opts = {});

/// Blank-line-separated blocks of three lines "T <timestamp>", "U <url>",
/// "W <text>". The author id is the final path segment of the U line.
/// A block missing (or repeating) any of the three lines is an error naming
/// the 1-based block index.
AuthorCorpus load_snap_blocks(const std::filesystem::path& path, const LoadOptions& opts = {});
void load_snap_blocks_into(AuthorCorpus& corpus, const std::filesystem::path& path,
                           const LoadOptions& opts = {});

/// Dataset statistics. fraction_at_least[t] = (#authors with >= t tweets) /
/// total_authors; an empty corpus reports zero counts and zero fractions.
CorpusStats corpus_stats(const AuthorCorpus& corpus, const std::vector<std::uint64_t>& thresholds);

/// Keeps exactly the authors whose tweet count c satisfies min_tweets <= c
/// (and c <= max_tweets when present). Tweets are not modified.
AuthorCorpus filter_by_prolificacy(const AuthorCorpus& corpus, std::size_t min_tweets,
                                   std::optional<std::size_t> max_tweets = std::nullopt);

/// Uniform sample of n authors without replacement. Deterministic for a fixed
/// (corpus, n, seed): a Fisher-Yates shuffle over the lexicographically sorted
/// author ids, driven by std::mt19937_64 seeded with `seed` and rejection-
/// sampled bounded draws; the first n shuffled ids are taken.
AuthorCorpus sample_authors(const AuthorCorpus& corpus, std::size_t n, std::uint64_t seed);

/// Restricts every author to their hashtag-bearing tweets (tweets where the
/// tokenizer detects at least one hashtag) and drops authors left with fewer
/// than min_tweets of them.
AuthorCorpus filter_hashtag_bearing(const AuthorCorpus& corpus, std::size_t min_tweets);

}  // namespace relink

#endif  // RELINK_CORPUS_HPP
