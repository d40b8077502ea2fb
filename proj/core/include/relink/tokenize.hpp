#ifndef RELINK_TOKENIZE_HPP
#define RELINK_TOKENIZE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relink/corpus.hpp"

namespace relink {

/// The three token alphabets a model can be built over:
///   TextUnigram    26 tokens, the letters a-z of the normalized text
///   TextBigram    676 tokens, ordered letter pairs within unbroken letter runs
///   HashtagUnigram 37 tokens, letters, digits and '_' inside hashtag bodies
enum class TokenScheme : std::uint8_t {
    TextUnigram = 0,
    TextBigram = 1,
    HashtagUnigram = 2,
};

constexpr std::size_t vocab_size(TokenScheme scheme) {
    switch (scheme) {
        case TokenScheme::TextUnigram: return 26;
        case TokenScheme::TextBigram: return 676;
        case TokenScheme::HashtagUnigram: return 37;
    }
    return 0;
}

/// Short scheme names used in CSV reports and CLI flags: "uni", "bi", "hashtag".
std::string_view scheme_name(TokenScheme scheme);
std::optional<TokenScheme> scheme_from_name(std::string_view name);

/// Dense occurrence counts over one scheme's full vocabulary.
struct TokenCounts {
    TokenScheme scheme = TokenScheme::TextUnigram;
    std::vector<std::uint64_t> counts;  // length == vocab_size(scheme)
    std::uint64_t total = 0;            // == sum of counts

    explicit TokenCounts(TokenScheme s = TokenScheme::TextUnigram)
        : scheme(s), counts(vocab_size(s), 0) {}

    TokenCounts& operator+=(const TokenCounts& other);
    bool operator==(const TokenCounts&) const = default;
};

/// Case-folds and strips the input down to the working alphabet: only
/// a-z, 0-9, '_', '#' and single spaces survive; every other byte becomes a
/// space, runs of spaces collapse, and the result is trimmed. Idempotent.
std::string normalize(std::string_view text);

/// Hashtag bodies of the normalized text, in order of appearance: the body of
/// each maximal "#[a-z0-9_]+" match, without the '#'. A '#' directly followed
/// by another '#' starts no hashtag, so leading '#' repeats are skipped.
std::vector<std::string> extract_hashtags(std::string_view text);

/// True iff extract_hashtags(text) would be non-empty, without materializing it.
bool has_hashtag(std::string_view text);

/// Token id sequence of one tweet under a scheme. Ids index the scheme's
/// vocabulary:
///   TextUnigram     'a'..'z' -> 0..25
///   TextBigram      (first, second) -> 26*first + second
///   HashtagUnigram  'a'..'z' -> 0..25, '0'..'9' -> 26..35, '_' -> 36
/// Bigrams never cross a non-letter (space, digit, '_', '#' all break runs).
std::vector<std::uint16_t> tokenize(std::string_view text, TokenScheme scheme);

/// Human-readable spelling of a token id ("a", "qu", "_", ...).
std::string token_label(TokenScheme scheme, std::uint16_t token);

/// Accumulates the token counts of one raw text into `into` (single pass, no
/// intermediate token vector).
void count_into(TokenCounts& into, std::string_view text);

/// Total token counts over a tweet list. Empty input gives all-zero counts.
TokenCounts count(std::span<const Tweet> tweets, TokenScheme scheme);

}  // namespace relink

#endif  // RELINK_TOKENIZE_HPP
