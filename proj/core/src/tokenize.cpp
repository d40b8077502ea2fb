#include "relink/tokenize.hpp"

#include <array>
#include <stdexcept>

namespace relink {

namespace {

inline bool is_letter(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_body_char(char c) { return is_letter(c) || is_digit(c) || c == '_'; }

// 37-token hashtag alphabet: a-z -> 0..25, 0-9 -> 26..35, '_' -> 36.
inline std::uint16_t hashtag_token(char c) {
    if (is_letter(c)) return static_cast<std::uint16_t>(c - 'a');
    if (is_digit(c)) return static_cast<std::uint16_t>(26 + (c - '0'));
    return 36;
}

// Walks the hashtag bodies of a normalized string: emit(c) is called for every
// body character, break_tag() after each complete body.
template <typename EmitChar, typename BreakTag>
void scan_hashtag_bodies(std::string_view norm, EmitChar&& emit, BreakTag&& break_tag) {
    std::size_t i = 0;
    while (i < norm.size()) {
        if (norm[i] != '#' || i + 1 >= norm.size() || !is_body_char(norm[i + 1])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < norm.size() && is_body_char(norm[j])) {
            emit(norm[j]);
            ++j;
        }
        break_tag();
        i = j;
    }
}

}  // namespace

std::string_view scheme_name(TokenScheme scheme) {
    switch (scheme) {
        case TokenScheme::TextUnigram: return "uni";
        case TokenScheme::TextBigram: return "bi";
        case TokenScheme::HashtagUnigram: return "hashtag";
    }
    return "?";
}

std::optional<TokenScheme> scheme_from_name(std::string_view name) {
    if (name == "uni") return TokenScheme::TextUnigram;
    if (name == "bi") return TokenScheme::TextBigram;
    if (name == "hashtag") return TokenScheme::HashtagUnigram;
    return std::nullopt;
}

TokenCounts& TokenCounts::operator+=(const TokenCounts& other) {
    if (other.scheme != scheme)
        throw std::invalid_argument("TokenCounts: cannot add counts of different schemes");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
    return *this;
}

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char raw : text) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
        if (is_body_char(c) || c == '#') {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        } else {
            // Everything else (punctuation, whitespace, any non-ASCII byte)
            // collapses into at most one separating space.
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> extract_hashtags(std::string_view text) {
    const std::string norm = normalize(text);
    std::vector<std::string> bodies;
    std::string current;
    scan_hashtag_bodies(
        norm, [&](char c) { current.push_back(c); },
        [&] {
            bodies.push_back(std::move(current));
            current.clear();
        });
    return bodies;
}

bool has_hashtag(std::string_view text) {
    const std::string norm = normalize(text);
    for (std::size_t i = 0; i + 1 < norm.size(); ++i)
        if (norm[i] == '#' && is_body_char(norm[i + 1])) return true;
    return false;
}

std::vector<std::uint16_t> tokenize(std::string_view text, TokenScheme scheme) {
    const std::string norm = normalize(text);
    std::vector<std::uint16_t> tokens;
    switch (scheme) {
        case TokenScheme::TextUnigram:
            for (char c : norm)
                if (is_letter(c)) tokens.push_back(static_cast<std::uint16_t>(c - 'a'));
            break;
        case TokenScheme::TextBigram: {
            int prev = -1;  // previous letter of the current run, -1 = broken
            for (char c : norm) {
                if (!is_letter(c)) {
                    prev = -1;
                    continue;
                }
                const int cur = c - 'a';
                if (prev >= 0) tokens.push_back(static_cast<std::uint16_t>(26 * prev + cur));
                prev = cur;
            }
            break;
        }
        case TokenScheme::HashtagUnigram:
            scan_hashtag_bodies(
                norm, [&](char c) { tokens.push_back(hashtag_token(c)); }, [] {});
            break;
    }
    return tokens;
}

std::string token_label(TokenScheme scheme, std::uint16_t token) {
    if (token >= vocab_size(scheme)) throw std::invalid_argument("token_label: token out of range");
    switch (scheme) {
        case TokenScheme::TextUnigram: return std::string(1, static_cast<char>('a' + token));
        case TokenScheme::TextBigram: {
            std::string s(2, 'a');
            s[0] = static_cast<char>('a' + token / 26);
            s[1] = static_cast<char>('a' + token % 26);
            return s;
        }
        case TokenScheme::HashtagUnigram:
            if (token < 26) return std::string(1, static_cast<char>('a' + token));
            if (token < 36) return std::string(1, static_cast<char>('0' + (token - 26)));
            return "_";
    }
    return "?";
}

void count_into(TokenCounts& into, std::string_view text) {
    const std::string norm = normalize(text);
    switch (into.scheme) {
        case TokenScheme::TextUnigram:
            for (char c : norm) {
                if (is_letter(c)) {
                    ++into.counts[static_cast<std::size_t>(c - 'a')];
                    ++into.total;
                }
            }
            break;
        case TokenScheme::TextBigram: {
            int prev = -1;
            for (char c : norm) {
                if (!is_letter(c)) {
                    prev = -1;
                    continue;
                }
                const int cur = c - 'a';
                if (prev >= 0) {
                    ++into.counts[static_cast<std::size_t>(26 * prev + cur)];
                    ++into.total;
                }
                prev = cur;
            }
            break;
        }
        case TokenScheme::HashtagUnigram:
            scan_hashtag_bodies(
                norm,
                [&](char c) {
                    ++into.counts[hashtag_token(c)];
                    ++into.total;
                },
                [] {});
            break;
    }
}

TokenCounts count(std::span<const Tweet> tweets, TokenScheme scheme) {
    TokenCounts counts(scheme);
    for (const Tweet& tweet : tweets) count_into(counts, tweet.text);
    return counts;
}

}  // namespace relink
