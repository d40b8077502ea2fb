#ifndef RELINK_TESTS_ORACLE_HPP
#define RELINK_TESTS_ORACLE_HPP

// Reference implementations used only by tests. Everything is recomputed from
// first principles along different code paths than the library: normalization
// collapses via stream extraction, hashtags come from a regex, bigrams from an
// adjacent-letter-pair scan, and scores sum log-probabilities once per token
// occurrence instead of multiplying counts in. Agreement with the library is
// therefore evidence, not tautology.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <regex>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "relink/corpus.hpp"
#include "relink/tokenize.hpp"

namespace oracle {

inline bool is_letter(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string normalize(const std::string& raw) {
    std::string folded;
    folded.reserve(raw.size());
    for (const unsigned char byte : raw) {
        char c = static_cast<char>(byte);
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (!(is_letter(c) || is_digit(c) || c == '_' || c == '#')) c = ' ';
        folded.push_back(c);
    }
    std::istringstream words(folded);
    std::string word, result;
    while (words >> word) {
        if (!result.empty()) result += ' ';
        result += word;
    }
    return result;
}

inline std::vector<std::string> hashtags(const std::string& raw) {
    static const std::regex body_re("#([a-z0-9_]+)");
    const std::string norm = normalize(raw);
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(norm.begin(), norm.end(), body_re);
         it != std::sregex_iterator(); ++it)
        out.push_back((*it)[1].str());
    return out;
}

/// Token spellings of one raw tweet under a scheme ("a", "qu", "_", ...).
inline std::vector<std::string> tokens(const std::string& raw, relink::TokenScheme scheme) {
    std::vector<std::string> out;
    if (scheme == relink::TokenScheme::HashtagUnigram) {
        for (const std::string& body : hashtags(raw))
            for (const char c : body) out.emplace_back(1, c);
        return out;
    }
    const std::string norm = normalize(raw);
    if (scheme == relink::TokenScheme::TextUnigram) {
        for (const char c : norm)
            if (is_letter(c)) out.emplace_back(1, c);
        return out;
    }
    // Bigrams: every adjacent pair of letters. A pair of adjacent letters is,
    // by definition, inside one unbroken letter run.
    for (std::size_t i = 0; i + 1 < norm.size(); ++i)
        if (is_letter(norm[i]) && is_letter(norm[i + 1])) out.push_back(norm.substr(i, 2));
    return out;
}

inline std::size_t token_id(relink::TokenScheme scheme, const std::string& token) {
    switch (scheme) {
        case relink::TokenScheme::TextUnigram:
            return static_cast<std::size_t>(token.at(0) - 'a');
        case relink::TokenScheme::TextBigram:
            return 26u * static_cast<std::size_t>(token.at(0) - 'a') +
                   static_cast<std::size_t>(token.at(1) - 'a');
        case relink::TokenScheme::HashtagUnigram: {
            const char c = token.at(0);
            if (is_letter(c)) return static_cast<std::size_t>(c - 'a');
            if (is_digit(c)) return 26u + static_cast<std::size_t>(c - '0');
            return 36;
        }
    }
    return 0;
}

struct Profile {
    std::string author;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
};

inline Profile build_profile(const std::string& author, std::span<const relink::Tweet> tweets,
                             relink::TokenScheme scheme) {
    Profile p;
    p.author = author;
    p.counts.assign(relink::vocab_size(scheme), 0);
    for (const relink::Tweet& tweet : tweets) {
        for (const std::string& token : tokens(tweet.text, scheme)) {
            ++p.counts[token_id(scheme, token)];
            ++p.total;
        }
    }
    return p;
}

/// Laplace-smoothed log-likelihood of the batch under one profile, summed
/// once per token occurrence (the library multiplies counts in).
inline double score(const Profile& profile, std::span<const relink::Tweet> batch,
                    relink::TokenScheme scheme) {
    const double denom =
        static_cast<double>(profile.total) + static_cast<double>(relink::vocab_size(scheme));
    double sum = 0.0;
    for (const relink::Tweet& tweet : batch) {
        for (const std::string& token : tokens(tweet.text, scheme)) {
            const double numer = static_cast<double>(profile.counts[token_id(scheme, token)]) + 1.0;
            sum += std::log(numer / denom);
        }
    }
    return sum;
}

/// Full ranking: score descending, ties by ascending author id, via std::sort
/// over explicit pairs.
inline std::vector<std::pair<std::string, double>> rank(const std::vector<Profile>& profiles,
                                                        std::span<const relink::Tweet> batch,
                                                        relink::TokenScheme scheme) {
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(profiles.size());
    for (const Profile& p : profiles) entries.emplace_back(p.author, score(p, batch, scheme));
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return entries;
}

/// Small random corpora for oracle comparisons: messy tweets mixing letters,
/// digits, hashtags, punctuation and the occasional multi-byte character.
inline relink::AuthorCorpus random_corpus(std::uint64_t seed, std::size_t n_authors,
                                          std::size_t tweets_per_author, std::size_t max_len) {
    static const std::string palette = "abcdefghijklmnopqrstuvwxyzABCXYZ0123456789_##  .,!?@:/";
    std::mt19937_64 rng(seed);
    relink::AuthorCorpus corpus;
    for (std::size_t a = 0; a < n_authors; ++a) {
        const std::string author = "user" + std::to_string(a);
        std::vector<relink::Tweet> tweets;
        for (std::size_t t = 0; t < tweets_per_author; ++t) {
            const std::size_t len = 1 + rng() % max_len;
            std::string text;
            for (std::size_t i = 0; i < len; ++i) {
                if (rng() % 37 == 0)
                    text += "\xC3\xA9";  // e-acute: exercises multi-byte handling
                else
                    text.push_back(palette[rng() % palette.size()]);
            }
            tweets.push_back(relink::Tweet{author, std::move(text), std::nullopt});
        }
        corpus.authors.emplace(author, std::move(tweets));
    }
    return corpus;
}

}  // namespace oracle

#endif  // RELINK_TESTS_ORACLE_HPP
